//! Word maps on matrix groups and noncommutative-polynomial maps on matrix
//! algebras, evaluated as self-maps of matrix tuples in exact arithmetic.
//!
//! Entries are complex numbers with rational real and imaginary parts, so
//! trajectories have no rounding anywhere; entry growth is doubly
//! exponential in the iteration count, which fixed-width integers cannot
//! carry.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::error::DynError;

/// Parse/validation failures for words, polynomials and tuples.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("invalid word syntax: {0}")]
    Syntax(String),
    #[error("generator index {found} out of range, arity is {arity}")]
    GeneratorOutOfRange { found: usize, arity: usize },
    #[error("system needs at least one component")]
    Empty,
    #[error("invalid tuple: {0}")]
    BadTuple(String),
}

/// An exact complex scalar with rational real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactScalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        ExactScalar { re: BigRational::one(), im: BigRational::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        ExactScalar { re: BigRational::from_integer(BigInt::from(v)), im: BigRational::zero() }
    }

    pub fn from_rational(re: BigRational) -> Self {
        ExactScalar { re, im: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }

    fn sub(&self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }

    fn mul(&self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    fn div(&self, rhs: &ExactScalar) -> Option<ExactScalar> {
        let denom = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        if denom.is_zero() {
            return None;
        }
        Some(ExactScalar {
            re: (&self.re * &rhs.re + &self.im * &rhs.im) / &denom,
            im: (&self.im * &rhs.re - &self.re * &rhs.im) / &denom,
        })
    }

    fn neg(&self) -> ExactScalar {
        ExactScalar { re: -&self.re, im: -&self.im }
    }

    /// Parses `123`, `-4/7`, decimal-string integers of any length.
    pub fn parse(s: &str) -> Result<Self, WordError> {
        let s = s.trim();
        let rational = |t: &str| -> Result<BigRational, WordError> {
            if let Some((num, den)) = t.split_once('/') {
                let n: BigInt = num
                    .trim()
                    .parse()
                    .map_err(|_| WordError::Syntax(format!("bad numerator {num:?}")))?;
                let d: BigInt = den
                    .trim()
                    .parse()
                    .map_err(|_| WordError::Syntax(format!("bad denominator {den:?}")))?;
                if d.is_zero() {
                    return Err(WordError::Syntax("zero denominator".into()));
                }
                Ok(BigRational::new(n, d))
            } else {
                let n: BigInt = t
                    .parse()
                    .map_err(|_| WordError::Syntax(format!("bad integer {t:?}")))?;
                Ok(BigRational::from_integer(n))
            }
        };
        Ok(ExactScalar::from_rational(rational(s)?))
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: &BigRational| -> String {
            if r.denom().is_one() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        };
        if self.im.is_zero() {
            write!(f, "{}", show(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", show(&self.im))
        } else if self.im.is_negative() {
            write!(f, "{}{}i", show(&self.re), show(&self.im))
        } else {
            write!(f, "{}+{}i", show(&self.re), show(&self.im))
        }
    }
}

/// A square matrix with [`ExactScalar`] entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<ExactScalar>,
}

impl ExactMatrix {
    pub fn zeros(n: usize) -> Self {
        ExactMatrix { n, entries: vec![ExactScalar::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExactMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, ExactScalar::one());
        }
        m
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "rows must form a square matrix");
            entries.extend(row.iter().map(|&v| ExactScalar::from_int(v)));
        }
        ExactMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactScalar {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ExactScalar) {
        self.entries[i * self.n + j] = v;
    }

    pub fn add(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        ExactMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = ExactMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let add = aik.mul(rhs.get(k, j));
                    let cur = out.get(i, j).add(&add);
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &ExactScalar) -> ExactMatrix {
        ExactMatrix { n: self.n, entries: self.entries.iter().map(|e| e.mul(s)).collect() }
    }

    /// Binary exponentiation; `pow(0)` is the identity.
    pub fn pow(&self, mut e: u64) -> ExactMatrix {
        let mut base = self.clone();
        let mut acc = ExactMatrix::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact inverse by Gauss–Jordan over the rationals.
    pub fn inverse(&self) -> Result<ExactMatrix, DynError> {
        let n = self.n;
        let mut work = self.clone();
        let mut inv = ExactMatrix::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| !work.get(r, col).is_zero())
                .ok_or(DynError::NotInvertible)?;
            if pivot_row != col {
                for j in 0..n {
                    let a = work.get(col, j).clone();
                    let b = work.get(pivot_row, j).clone();
                    work.set(col, j, b);
                    work.set(pivot_row, j, a);
                    let a = inv.get(col, j).clone();
                    let b = inv.get(pivot_row, j).clone();
                    inv.set(col, j, b);
                    inv.set(pivot_row, j, a);
                }
            }
            let pivot = work.get(col, col).clone();
            for j in 0..n {
                let w = work.get(col, j).div(&pivot).expect("pivot is nonzero");
                work.set(col, j, w);
                let v = inv.get(col, j).div(&pivot).expect("pivot is nonzero");
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r == col || work.get(r, col).is_zero() {
                    continue;
                }
                let factor = work.get(r, col).clone();
                for j in 0..n {
                    let w = work.get(r, j).sub(&factor.mul(work.get(col, j)));
                    work.set(r, j, w);
                    let v = inv.get(r, j).sub(&factor.mul(inv.get(col, j)));
                    inv.set(r, j, v);
                }
            }
        }
        Ok(inv)
    }

    /// Integer/rational power, inverting exactly for negative exponents.
    pub fn pow_signed(&self, e: i64) -> Result<ExactMatrix, DynError> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inverse()?.pow(e.unsigned_abs()))
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        serde_json::json!({ "n": self.n, "entries": rows })
    }

    /// Parses `{"n": 2, "entries": [["1","0"],["1","1"]]}`. Entries may be
    /// JSON integers or strings (decimal, optionally `p/q`).
    pub fn from_json(value: &serde_json::Value) -> Result<Self, WordError> {
        let n = value
            .get("n")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| WordError::BadTuple("missing dimension field \"n\"".into()))? as usize;
        if n == 0 {
            return Err(WordError::BadTuple("dimension must be at least 1".into()));
        }
        let rows = value
            .get("entries")
            .and_then(|v| v.as_array())
            .ok_or_else(|| WordError::BadTuple("missing \"entries\" array".into()))?;
        if rows.len() != n {
            return Err(WordError::BadTuple(format!("expected {n} rows, got {}", rows.len())));
        }
        let mut out = ExactMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            let cells = row
                .as_array()
                .ok_or_else(|| WordError::BadTuple(format!("row {i} is not an array")))?;
            if cells.len() != n {
                return Err(WordError::BadTuple(format!(
                    "row {i}: expected {n} entries, got {}",
                    cells.len()
                )));
            }
            for (j, cell) in cells.iter().enumerate() {
                let scalar = match cell {
                    serde_json::Value::Number(num) => {
                        let as_int = num
                            .as_i64()
                            .ok_or_else(|| WordError::BadTuple(format!(
                                "entry ({i},{j}) must be an integer or a string, got {num}"
                            )))?;
                        ExactScalar::from_int(as_int)
                    }
                    serde_json::Value::String(s) => ExactScalar::parse(s)?,
                    other => {
                        return Err(WordError::BadTuple(format!(
                            "entry ({i},{j}) must be an integer or a string, got {other}"
                        )))
                    }
                };
                out.set(i, j, scalar);
            }
        }
        Ok(out)
    }
}

/// A reduced free-group word: adjacent letters use distinct generators and
/// every exponent is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupWord {
    letters: Vec<(usize, i64)>,
}

impl GroupWord {
    /// Reduces on construction by merging adjacent letters on the same
    /// generator and dropping zero exponents.
    pub fn new(letters: Vec<(usize, i64)>) -> Self {
        let mut reduced: Vec<(usize, i64)> = Vec::with_capacity(letters.len());
        for (gen, exp) in letters {
            if exp == 0 {
                continue;
            }
            match reduced.last_mut() {
                Some((last_gen, last_exp)) if *last_gen == gen => {
                    *last_exp += exp;
                    if *last_exp == 0 {
                        reduced.pop();
                    }
                }
                _ => reduced.push((gen, exp)),
            }
        }
        GroupWord { letters: reduced }
    }

    pub fn letters(&self) -> &[(usize, i64)] {
        &self.letters
    }

    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|&(g, _)| g).max().unwrap_or(0)
    }

    /// Parses `x1^2*x2`, `x2`, `x1^-1 x3^2`; `*` separators optional,
    /// whitespace ignored.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(WordError::Syntax("empty word".into()));
        }
        let mut letters = Vec::new();
        let mut rest = cleaned.as_str();
        while !rest.is_empty() {
            rest = rest.strip_prefix('*').unwrap_or(rest);
            let (gen, exp, tail) = parse_letter(rest)?;
            letters.push((gen, exp));
            rest = tail;
        }
        Ok(GroupWord::new(letters))
    }

    /// Substitutes the tuple members for the generators. Negative exponents
    /// need exact inverses and fail on singular members.
    pub fn eval(&self, tuple: &[ExactMatrix]) -> Result<ExactMatrix, DynError> {
        let n = tuple
            .first()
            .map(ExactMatrix::dim)
            .expect("tuple must be nonempty");
        let mut acc = ExactMatrix::identity(n);
        for &(gen, exp) in &self.letters {
            let member = tuple.get(gen - 1).ok_or_else(|| {
                DynError::DimensionMismatch(format!(
                    "word references generator x{gen} but the tuple has {} members",
                    tuple.len()
                ))
            })?;
            acc = acc.mul(&member.pow_signed(exp)?);
        }
        Ok(acc)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&(g, e)| if e == 1 { format!("x{g}") } else { format!("x{g}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// `x<digits>` optionally followed by `^<signed integer>`.
fn parse_letter(s: &str) -> Result<(usize, i64, &str), WordError> {
    let rest = s
        .strip_prefix('x')
        .ok_or_else(|| WordError::Syntax(format!("expected generator at {s:?}")))?;
    let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits == 0 {
        return Err(WordError::Syntax(format!("expected generator index at {rest:?}")));
    }
    let gen: usize = rest[..digits]
        .parse()
        .map_err(|_| WordError::Syntax(format!("bad generator index in {s:?}")))?;
    if gen == 0 {
        return Err(WordError::Syntax("generator indices start at 1".into()));
    }
    let rest = &rest[digits..];
    if let Some(exp_str) = rest.strip_prefix('^') {
        let signed = exp_str.starts_with('-') || exp_str.starts_with('+');
        let len = exp_str
            .chars()
            .enumerate()
            .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && signed))
            .count();
        if len == 0 || (signed && len == 1) {
            return Err(WordError::Syntax(format!("bad exponent in {s:?}")));
        }
        let exp: i64 = exp_str[..len]
            .parse()
            .map_err(|_| WordError::Syntax(format!("bad exponent in {s:?}")))?;
        if exp == 0 {
            return Err(WordError::Syntax("zero exponents are not reduced".into()));
        }
        Ok((gen, exp, &exp_str[len..]))
    } else {
        Ok((gen, 1, rest))
    }
}

/// A noncommutative polynomial: a sum of exact-coefficient monomials, each a
/// sequence of generator indices. The empty monomial is the unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcPolynomial {
    terms: Vec<(ExactScalar, Vec<usize>)>,
}

impl NcPolynomial {
    /// Merges duplicate monomials and drops zero coefficients.
    pub fn new(terms: Vec<(ExactScalar, Vec<usize>)>) -> Self {
        let mut merged: Vec<(ExactScalar, Vec<usize>)> = Vec::new();
        for (coeff, mono) in terms {
            match merged.iter_mut().find(|(_, m)| *m == mono) {
                Some((existing, _)) => *existing = existing.add(&coeff),
                None => merged.push((coeff, mono)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        merged.sort_by(|a, b| (a.1.len(), &a.1).cmp(&(b.1.len(), &b.1)));
        NcPolynomial { terms: merged }
    }

    pub fn terms(&self) -> &[(ExactScalar, Vec<usize>)] {
        &self.terms
    }

    pub fn max_generator(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|(_, m)| m.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Parses `x1^2 + x1 + x2`, `2*x1x2 - 1/2*x2 + 3`; whitespace ignored.
    /// Exponents expand into repeated factors and must be nonnegative.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(WordError::Syntax("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut rest = cleaned.as_str();
        let mut sign = 1i64;
        // Leading sign.
        if let Some(tail) = rest.strip_prefix('-') {
            sign = -1;
            rest = tail;
        } else if let Some(tail) = rest.strip_prefix('+') {
            rest = tail;
        }
        loop {
            let split = rest
                .char_indices()
                .find(|&(_, c)| c == '+' || c == '-')
                .map(|(i, _)| i);
            let (term_str, next) = match split {
                Some(i) => (&rest[..i], Some((&rest[i..i + 1], &rest[i + 1..]))),
                None => (rest, None),
            };
            let (coeff, mono) = parse_monomial(term_str)?;
            let coeff = if sign < 0 { coeff.neg() } else { coeff };
            terms.push((coeff, mono));
            match next {
                Some((op, tail)) => {
                    sign = if op == "-" { -1 } else { 1 };
                    rest = tail;
                }
                None => break,
            }
        }
        Ok(NcPolynomial::new(terms))
    }

    /// Substitutes tuple members for the generators; the empty monomial
    /// contributes its coefficient times the identity.
    pub fn eval(&self, tuple: &[ExactMatrix]) -> Result<ExactMatrix, DynError> {
        let n = tuple
            .first()
            .map(ExactMatrix::dim)
            .expect("tuple must be nonempty");
        let mut acc = ExactMatrix::zeros(n);
        for (coeff, mono) in &self.terms {
            let mut prod = ExactMatrix::identity(n);
            for &gen in mono {
                let member = tuple.get(gen - 1).ok_or_else(|| {
                    DynError::DimensionMismatch(format!(
                        "polynomial references generator x{gen} but the tuple has {} members",
                        tuple.len()
                    ))
                })?;
                prod = prod.mul(member);
            }
            acc = acc.add(&prod.scale(coeff));
        }
        Ok(acc)
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(coeff, mono)| {
                let mono_str = mono
                    .iter()
                    .map(|g| format!("x{g}"))
                    .collect::<Vec<_>>()
                    .join("*");
                if mono.is_empty() {
                    coeff.to_string()
                } else if *coeff == ExactScalar::one() {
                    mono_str
                } else {
                    format!("{coeff}*{mono_str}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `[coefficient *]? (x<idx>[^<uint>])*` or a bare coefficient.
fn parse_monomial(s: &str) -> Result<(ExactScalar, Vec<usize>), WordError> {
    if s.is_empty() {
        return Err(WordError::Syntax("empty term".into()));
    }
    let (coeff, mut rest) = if s.starts_with('x') {
        (ExactScalar::one(), s)
    } else {
        let cut = s.find('x').unwrap_or(s.len());
        let coeff_str = s[..cut].trim_end_matches('*');
        (ExactScalar::parse(coeff_str)?, &s[cut..])
    };
    let mut mono = Vec::new();
    while !rest.is_empty() {
        rest = rest.strip_prefix('*').unwrap_or(rest);
        let (gen, exp, tail) = parse_letter(rest)?;
        if exp < 0 {
            return Err(WordError::Syntax(
                "negative exponents are not defined in the free algebra".into(),
            ));
        }
        for _ in 0..exp {
            mono.push(gen);
        }
        rest = tail;
    }
    Ok((coeff, mono))
}

/// A self-map of r-tuples given by r words or r polynomials (never mixed:
/// the group and algebra settings are distinct categories).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSystem {
    arity: usize,
    components: Components,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Components {
    Group(Vec<GroupWord>),
    Algebra(Vec<NcPolynomial>),
}

/// Which free object the system lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Group,
    Algebra,
}

impl WordSystem {
    pub fn group(words: Vec<GroupWord>) -> Result<Self, WordError> {
        if words.is_empty() {
            return Err(WordError::Empty);
        }
        let arity = words.len();
        for w in &words {
            let g = w.max_generator();
            if g > arity {
                return Err(WordError::GeneratorOutOfRange { found: g, arity });
            }
        }
        Ok(WordSystem { arity, components: Components::Group(words) })
    }

    pub fn algebra(polys: Vec<NcPolynomial>) -> Result<Self, WordError> {
        if polys.is_empty() {
            return Err(WordError::Empty);
        }
        let arity = polys.len();
        for p in &polys {
            let g = p.max_generator();
            if g > arity {
                return Err(WordError::GeneratorOutOfRange { found: g, arity });
            }
        }
        Ok(WordSystem { arity, components: Components::Algebra(polys) })
    }

    /// Parses a `;`-separated component list in the given kind's grammar.
    pub fn parse(kind: SystemKind, text: &str) -> Result<Self, WordError> {
        let parts: Vec<&str> = text.split(';').collect();
        match kind {
            SystemKind::Group => {
                let words = parts
                    .iter()
                    .map(|p| GroupWord::parse(p))
                    .collect::<Result<Vec<_>, _>>()?;
                WordSystem::group(words)
            }
            SystemKind::Algebra => {
                let polys = parts
                    .iter()
                    .map(|p| NcPolynomial::parse(p))
                    .collect::<Result<Vec<_>, _>>()?;
                WordSystem::algebra(polys)
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> SystemKind {
        match self.components {
            Components::Group(_) => SystemKind::Group,
            Components::Algebra(_) => SystemKind::Algebra,
        }
    }

    pub fn component_strings(&self) -> Vec<String> {
        match &self.components {
            Components::Group(words) => words.iter().map(|w| w.to_string()).collect(),
            Components::Algebra(polys) => polys.iter().map(|p| p.to_string()).collect(),
        }
    }

    fn validate_tuple(&self, tuple: &[ExactMatrix]) -> Result<(), DynError> {
        if tuple.len() != self.arity {
            return Err(DynError::DimensionMismatch(format!(
                "system arity is {} but the tuple has {} members",
                self.arity,
                tuple.len()
            )));
        }
        let n = tuple[0].dim();
        if tuple.iter().any(|m| m.dim() != n) {
            return Err(DynError::DimensionMismatch(
                "tuple members must share one dimension".into(),
            ));
        }
        Ok(())
    }

    /// One simultaneous step: every component reads the input tuple.
    pub fn apply(&self, tuple: &[ExactMatrix]) -> Result<Vec<ExactMatrix>, DynError> {
        self.validate_tuple(tuple)?;
        match &self.components {
            Components::Group(words) => words.iter().map(|w| w.eval(tuple)).collect(),
            Components::Algebra(polys) => polys.iter().map(|p| p.eval(tuple)).collect(),
        }
    }

    /// The exact trajectory `tuple, S(tuple), ..., S^m(tuple)`.
    pub fn iterate(
        &self,
        tuple: &[ExactMatrix],
        m: usize,
    ) -> Result<Vec<Vec<ExactMatrix>>, DynError> {
        self.validate_tuple(tuple)?;
        let mut trajectory = Vec::with_capacity(m + 1);
        trajectory.push(tuple.to_vec());
        for _ in 0..m {
            let next = self.apply(trajectory.last().expect("trajectory is nonempty"))?;
            trajectory.push(next);
        }
        Ok(trajectory)
    }
}

/// Parses a tuple file: `{"matrices": [<matrix>, ...]}` with the matrix
/// format of [`ExactMatrix::from_json`].
pub fn tuple_from_json_str(s: &str) -> Result<Vec<ExactMatrix>, WordError> {
    let value: serde_json::Value =
        serde_json::from_str(s).map_err(|e| WordError::BadTuple(format!("bad JSON: {e}")))?;
    let arr = value
        .get("matrices")
        .and_then(|v| v.as_array())
        .ok_or_else(|| WordError::BadTuple("missing \"matrices\" array".into()))?;
    if arr.is_empty() {
        return Err(WordError::BadTuple("tuple must have at least one matrix".into()));
    }
    arr.iter().map(ExactMatrix::from_json).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The pair (A, B) from the group example: A upper, B lower unipotent.
    fn group_pair() -> Vec<ExactMatrix> {
        vec![
            ExactMatrix::from_int_rows(&[&[1, 1], &[0, 1]]),
            ExactMatrix::from_int_rows(&[&[1, 0], &[1, 1]]),
        ]
    }

    /// The pair (A, B) from the algebra example: A lower, B upper unipotent.
    fn algebra_pair() -> Vec<ExactMatrix> {
        vec![
            ExactMatrix::from_int_rows(&[&[1, 0], &[1, 1]]),
            ExactMatrix::from_int_rows(&[&[1, 1], &[0, 1]]),
        ]
    }

    #[test]
    fn identity_word() {
        let w = GroupWord::parse("x1").unwrap();
        assert_eq!(w.eval(&group_pair()).unwrap(), group_pair()[0]);
    }

    #[test]
    fn squared_word_by_hand() {
        let w = GroupWord::parse("x1^2*x2").unwrap();
        let got = w.eval(&group_pair()).unwrap();
        assert_eq!(got, ExactMatrix::from_int_rows(&[&[3, 2], &[1, 1]]));
    }

    #[test]
    fn word_reduces_to_identity() {
        let w = GroupWord::new(vec![(1, 1), (1, -1)]);
        assert!(w.letters().is_empty());
        assert_eq!(w.eval(&group_pair()).unwrap(), ExactMatrix::identity(2));
    }

    #[test]
    fn algebra_polynomial_by_hand() {
        let f = NcPolynomial::parse("x1^2 + x1 + x2").unwrap();
        let got = f.eval(&algebra_pair()).unwrap();
        assert_eq!(got, ExactMatrix::from_int_rows(&[&[3, 1], &[3, 3]]));
    }

    #[test]
    fn unit_monomial_is_identity() {
        let f = NcPolynomial::new(vec![(ExactScalar::one(), vec![])]);
        assert_eq!(f.eval(&algebra_pair()).unwrap(), ExactMatrix::identity(2));
    }

    #[test]
    fn projection_polynomial() {
        let f = NcPolynomial::parse("x2").unwrap();
        assert_eq!(f.eval(&algebra_pair()).unwrap(), algebra_pair()[1]);
    }

    #[test]
    fn group_trajectory_reaches_published_values() {
        let system = WordSystem::parse(SystemKind::Group, "x2 ; x1^2*x2").unwrap();
        let traj = system.iterate(&group_pair(), 6).unwrap();
        assert_eq!(traj[3][0], ExactMatrix::from_int_rows(&[&[3, 2], &[7, 5]]));
        assert_eq!(traj[3][1], ExactMatrix::from_int_rows(&[&[89, 62], &[33, 23]]));
        assert_eq!(
            traj[6][0],
            ExactMatrix::from_int_rows(&[&[69210849, 48219134], &[25665025, 17880799]])
        );
        assert_eq!(
            traj[6][1],
            ExactMatrix::from_int_rows(&[
                &[1557268252466751, 1084947340259330],
                &[3792477575677951, 2642215592726081],
            ])
        );
    }

    #[test]
    fn algebra_trajectory_reaches_published_values() {
        let system = WordSystem::parse(SystemKind::Algebra, "x2 ; x1^2 + x1 + x2").unwrap();
        let traj = system.iterate(&algebra_pair(), 5).unwrap();
        assert_eq!(traj[3][0], ExactMatrix::from_int_rows(&[&[5, 4], &[3, 5]]));
        assert_eq!(traj[3][1], ExactMatrix::from_int_rows(&[&[20, 11], &[24, 20]]));
        assert_eq!(traj[5][0], ExactMatrix::from_int_rows(&[&[62, 55], &[57, 62]]));
        assert_eq!(traj[5][1], ExactMatrix::from_int_rows(&[&[746, 506], &[1041, 746]]));
    }

    #[test]
    fn swap_system_has_order_two() {
        let system = WordSystem::parse(SystemKind::Group, "x2 ; x1").unwrap();
        let traj = system.iterate(&group_pair(), 2).unwrap();
        assert_eq!(traj[0], traj[2]);
        assert_eq!(traj[1][0], group_pair()[1]);
        assert_eq!(traj[1][1], group_pair()[0]);
    }

    #[test]
    fn step_composition_is_exact() {
        // Recomputing step 6 from step 5 reproduces identical big integers.
        let system = WordSystem::parse(SystemKind::Group, "x2 ; x1^2*x2").unwrap();
        let traj = system.iterate(&group_pair(), 6).unwrap();
        let recomputed = system.apply(&traj[5]).unwrap();
        assert_eq!(recomputed, traj[6]);
    }

    #[test]
    fn negative_exponent_needs_invertible() {
        let w = GroupWord::parse("x1^-1").unwrap();
        let singular = vec![ExactMatrix::from_int_rows(&[&[1, 1], &[1, 1]])];
        assert!(matches!(w.eval(&singular), Err(DynError::NotInvertible)));
        let got = w.eval(&group_pair()[..1]).unwrap();
        assert_eq!(got, ExactMatrix::from_int_rows(&[&[1, -1], &[0, 1]]));
    }

    #[test]
    fn exact_rational_inverse() {
        let m = ExactMatrix::from_int_rows(&[&[2, 0], &[0, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv.get(0, 0).to_string(), "1/2");
        assert_eq!(inv.get(1, 1).to_string(), "1/4");
        assert_eq!(m.mul(&inv), ExactMatrix::identity(2));
    }

    #[test]
    fn generator_out_of_range_rejected() {
        let err = WordSystem::parse(SystemKind::Group, "x3 ; x1").unwrap_err();
        assert!(matches!(err, WordError::GeneratorOutOfRange { found: 3, arity: 2 }));
    }

    #[test]
    fn tuple_json_round_trip() {
        let json = r#"{"matrices": [
            {"n": 2, "entries": [["1", "1"], ["0", "1"]]},
            {"n": 2, "entries": [[1, 0], [1, 1]]}
        ]}"#;
        let tuple = tuple_from_json_str(json).unwrap();
        assert_eq!(tuple, group_pair());
        let back = tuple[0].to_json();
        assert_eq!(back["entries"][0][0], "1");
    }

    proptest! {
        /// Inserting x_i x_i^{-1} anywhere leaves group-word evaluation
        /// unchanged.
        #[test]
        fn insertion_invariance(
            letters in proptest::collection::vec((1usize..=2, -2i64..=2), 1..6),
            pos_seed in 0usize..100,
            gen in 1usize..=2,
        ) {
            let letters: Vec<(usize, i64)> =
                letters.into_iter().filter(|&(_, e)| e != 0).collect();
            prop_assume!(!letters.is_empty());
            let word = GroupWord::new(letters.clone());
            let pos = pos_seed % (letters.len() + 1);
            let mut padded = letters.clone();
            padded.insert(pos, (gen, -1));
            padded.insert(pos, (gen, 1));
            let padded_word = GroupWord::new(padded);
            let tuple = group_pair();
            prop_assert_eq!(word.eval(&tuple).unwrap(), padded_word.eval(&tuple).unwrap());
        }
    }
}
