//! Monic polynomials over the complex numbers: evaluation, derivatives,
//! orbit iteration and the escape radius used by the classifiers.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

/// Orbit elements whose modulus exceeds this are never iterated further.
pub const SCALAR_OVERFLOW_GUARD: f64 = 1e150;

/// Validation and parse failures for [`MonicPoly`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("degree must be at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("leading coefficient must be exactly 1")]
    NotMonic,
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("invalid polynomial syntax: {0}")]
    Syntax(String),
}

/// A monic polynomial `p(z) = z^d + a_{d-1} z^{d-1} + ... + a_1 z + a_0`
/// of degree `d >= 2`. The leading coefficient is implicit and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPoly {
    /// Lower coefficients `a_0 .. a_{d-1}`; the degree is `coeffs.len()`.
    coeffs: Vec<Complex64>,
}

/// A scalar forward orbit `z, p(z), ..., p^m(z)`, possibly cut short by the
/// overflow guard.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarOrbit {
    pub points: Vec<Complex64>,
    /// True when iteration stopped early because an element exceeded
    /// [`SCALAR_OVERFLOW_GUARD`].
    pub truncated: bool,
}

impl MonicPoly {
    /// Builds `z^d + a_{d-1} z^{d-1} + ... + a_0` from the lower coefficients
    /// `a_0 .. a_{d-1}` (so the degree is the length of `coeffs`).
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, PolyError> {
        if coeffs.len() < 2 {
            return Err(PolyError::DegreeTooSmall(coeffs.len()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        Ok(MonicPoly { coeffs })
    }

    /// The power map `z^m`, `m >= 2`.
    pub fn power(m: usize) -> Result<Self, PolyError> {
        MonicPoly::new(vec![Complex64::new(0.0, 0.0); m])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Lower coefficients `a_0 .. a_{d-1}`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// True when every lower coefficient vanishes, i.e. `p(z) = z^d`.
    pub fn is_power_map(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Horner evaluation of `p(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc
    }

    /// The k-th derivative `p^{(k)}(z)`, computed by differentiating the
    /// coefficient array exactly and then evaluating with Horner.
    /// Returns 0 for `k > degree`.
    pub fn derivative_at(&self, z: Complex64, k: usize) -> Complex64 {
        let d = self.degree();
        if k > d {
            return Complex64::new(0.0, 0.0);
        }
        if k == 0 {
            return self.eval(z);
        }
        // c_j, j = k..=d, has derivative coefficient c_j * j!/(j-k)!.
        let falling = |j: usize| -> f64 { (j - k + 1..=j).map(|t| t as f64).product() };
        let mut acc = falling(d) * Complex64::new(1.0, 0.0);
        for j in (k..d).rev() {
            acc = acc * z + self.coeffs[j] * falling(j);
        }
        acc
    }

    /// First derivative, the multiplier building block.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.derivative_at(z, 1)
    }

    /// The forward orbit `z, p(z), ..., p^m(z)`. Iteration halts early
    /// (flagged) once an element's modulus exceeds the overflow guard.
    pub fn iterate(&self, z: Complex64, m: usize) -> ScalarOrbit {
        let mut points = Vec::with_capacity(m + 1);
        points.push(z);
        for _ in 0..m {
            let last = *points.last().expect("orbit is nonempty");
            if last.norm() > SCALAR_OVERFLOW_GUARD {
                return ScalarOrbit { points, truncated: true };
            }
            points.push(self.eval(last));
        }
        let truncated = points.len() < m + 1;
        ScalarOrbit { points, truncated }
    }

    /// `p^m(z)` without keeping the orbit; same guard as [`MonicPoly::iterate`].
    /// Returns `None` when the guard cut in before `m` applications.
    pub fn iterate_value(&self, z: Complex64, m: usize) -> Option<Complex64> {
        let mut w = z;
        for _ in 0..m {
            if w.norm() > SCALAR_OVERFLOW_GUARD {
                return None;
            }
            w = self.eval(w);
        }
        Some(w)
    }

    /// Escape radius `R = 2 + sum |a_i|`: for `|z| >= R` one has
    /// `|p(z)| >= |z|^{d-1}(|z| - sum|a_i|) >= 2|z|`, so the orbit runs off
    /// to infinity.
    pub fn escape_radius(&self) -> f64 {
        2.0 + self.coeffs.iter().map(|c| c.norm()).sum::<f64>()
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        write!(f, "z^{d}")?;
        for (i, a) in self.coeffs.iter().enumerate().rev() {
            if a.norm() == 0.0 {
                continue;
            }
            let coeff = format_complex(*a);
            match i {
                0 => write!(f, " + ({coeff})")?,
                1 => write!(f, " + ({coeff})z")?,
                _ => write!(f, " + ({coeff})z^{i}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for MonicPoly {
    type Err = PolyError;

    /// Accepts `power:M` shorthand or a sum of terms like
    /// `z^3 + (2)z + (1+0i)`. Coefficients are plain reals or parenthesized
    /// complex literals; the leading term must have coefficient 1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("power:") {
            let m: usize = rest
                .trim()
                .parse()
                .map_err(|_| PolyError::Syntax(format!("bad power map exponent {rest:?}")))?;
            return MonicPoly::power(m);
        }
        let mut terms: Vec<(f64, &str)> = Vec::new(); // (sign, body)
        let mut depth = 0usize;
        let mut start = 0usize;
        let mut sign = 1.0;
        let bytes = s.as_bytes();
        for (idx, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => {
                    depth = depth
                        .checked_sub(1)
                        .ok_or_else(|| PolyError::Syntax("unbalanced parentheses".into()))?
                }
                b'+' | b'-' if depth == 0 && idx > start => {
                    // A sign following an exponent marker belongs to a float literal.
                    let prev = bytes[..idx]
                        .iter()
                        .rev()
                        .copied()
                        .find(|c| !c.is_ascii_whitespace());
                    if !matches!(prev, Some(b'e') | Some(b'E')) {
                        terms.push((sign, s[start..idx].trim()));
                        sign = if b == b'-' { -1.0 } else { 1.0 };
                        start = idx + 1;
                    }
                }
                b'+' | b'-' if depth == 0 && idx == start => {
                    // Leading sign of the very first term.
                    if b == b'-' {
                        sign = -sign;
                    }
                    start = idx + 1;
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(PolyError::Syntax("unbalanced parentheses".into()));
        }
        terms.push((sign, s[start..].trim()));

        let mut by_power: Vec<(usize, Complex64)> = Vec::new();
        for (sign, body) in terms {
            if body.is_empty() {
                return Err(PolyError::Syntax("empty term".into()));
            }
            let (coeff, power) = parse_term(body)?;
            by_power.push((power, coeff * sign));
        }
        let degree = by_power.iter().map(|(p, _)| *p).max().unwrap_or(0);
        if degree < 2 {
            return Err(PolyError::DegreeTooSmall(degree));
        }
        let mut leading = Complex64::new(0.0, 0.0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); degree];
        for (p, c) in by_power {
            if p == degree {
                leading += c;
            } else {
                coeffs[p] += c;
            }
        }
        if (leading - Complex64::new(1.0, 0.0)).norm() != 0.0 {
            return Err(PolyError::NotMonic);
        }
        MonicPoly::new(coeffs)
    }
}

/// One term: `[coefficient][*][z[^k]]`, where the coefficient is a bare real
/// or a parenthesized complex literal.
fn parse_term(body: &str) -> Result<(Complex64, usize), PolyError> {
    let body = body.trim();
    let (coeff, rest) = if let Some(inner) = body.strip_prefix('(') {
        let close = inner
            .find(')')
            .ok_or_else(|| PolyError::Syntax(format!("unclosed parenthesis in {body:?}")))?;
        let c = parse_complex_literal(&inner[..close])
            .map_err(PolyError::Syntax)?;
        (c, inner[close + 1..].trim_start())
    } else {
        // Longest numeric prefix (digits, dot, exponent part).
        let mut end = 0usize;
        let bytes = body.as_bytes();
        while end < bytes.len() {
            let b = bytes[end];
            let numeric = b.is_ascii_digit() || b == b'.';
            let exp_marker = (b == b'e' || b == b'E')
                && end + 1 < bytes.len()
                && (bytes[end + 1].is_ascii_digit() || bytes[end + 1] == b'+' || bytes[end + 1] == b'-');
            if numeric {
                end += 1;
            } else if exp_marker && end > 0 {
                end += 2;
            } else {
                break;
            }
        }
        if end == 0 {
            (Complex64::new(1.0, 0.0), body)
        } else {
            let v: f64 = body[..end]
                .parse()
                .map_err(|_| PolyError::Syntax(format!("bad coefficient in {body:?}")))?;
            (Complex64::new(v, 0.0), body[end..].trim_start())
        }
    };
    let rest = rest.strip_prefix('*').unwrap_or(rest).trim();
    let power = if rest.is_empty() {
        0
    } else if rest == "z" {
        1
    } else if let Some(e) = rest.strip_prefix("z^") {
        e.trim()
            .parse::<usize>()
            .map_err(|_| PolyError::Syntax(format!("bad exponent in {rest:?}")))?
    } else {
        return Err(PolyError::Syntax(format!("unexpected token {rest:?}")));
    };
    Ok((coeff, power))
}

/// Parses complex literals such as `1+0i`, `-0.5`, `2i`, `0.5-0.25i`,
/// `1.5e-3+2e-1i`.
pub fn parse_complex_literal(s: &str) -> Result<Complex64, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    // Split point: a '+'/'-' that is not leading and not an exponent sign.
    let bytes = s.as_bytes();
    let mut split = None;
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-')
            && bytes[i - 1] != b'e'
            && bytes[i - 1] != b'E'
        {
            split = Some(i);
        }
    }
    let parse_real = |t: &str| -> Result<f64, String> {
        t.parse::<f64>().map_err(|_| format!("bad number {t:?}"))
    };
    let parse_imag_part = |t: &str| -> Result<f64, String> {
        let t = t
            .strip_suffix('i')
            .ok_or_else(|| format!("imaginary part {t:?} must end in 'i'"))?;
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => parse_real(t),
        }
    };
    match split {
        Some(i) => {
            let re = parse_real(&s[..i])?;
            let im = parse_imag_part(&s[i..])?;
            Ok(Complex64::new(re, im))
        }
        None => {
            if s.ends_with('i') {
                Ok(Complex64::new(0.0, parse_imag_part(&s)?))
            } else {
                Ok(Complex64::new(parse_real(&s)?, 0.0))
            }
        }
    }
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square() -> MonicPoly {
        MonicPoly::power(2).unwrap()
    }

    /// z^3 + 2z + 1
    fn cubic() -> MonicPoly {
        MonicPoly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn degree_one_rejected() {
        assert_eq!(
            MonicPoly::new(vec![c(1.0, 0.0)]),
            Err(PolyError::DegreeTooSmall(1))
        );
    }

    #[test]
    fn eval_square_at_one_plus_i() {
        assert_eq!(square().eval(c(1.0, 1.0)), c(0.0, 2.0));
    }

    #[test]
    fn eval_square_minus_one_at_zero() {
        let p = MonicPoly::new(vec![c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(p.eval(c(0.0, 0.0)), c(-1.0, 0.0));
    }

    #[test]
    fn eval_cubic_at_two() {
        assert_eq!(cubic().eval(c(2.0, 0.0)), c(13.0, 0.0));
    }

    #[test]
    fn derivative_square() {
        assert_eq!(square().derivative_at(c(3.0, 0.0), 1), c(6.0, 0.0));
    }

    #[test]
    fn derivative_above_degree_is_zero() {
        assert_eq!(square().derivative_at(c(1.7, -0.3), 3), c(0.0, 0.0));
    }

    #[test]
    fn second_derivative_cubic() {
        // (z^3 + 2z + 1)'' = 6z
        assert_eq!(cubic().derivative_at(c(1.0, 0.0), 2), c(6.0, 0.0));
    }

    #[test]
    fn orbit_of_two_under_square() {
        let orbit = square().iterate(c(2.0, 0.0), 3);
        let expected = [2.0, 4.0, 16.0, 256.0].map(|x| c(x, 0.0));
        assert_eq!(orbit.points, expected);
        assert!(!orbit.truncated);
    }

    #[test]
    fn fixed_point_orbit() {
        let orbit = square().iterate(c(0.0, 0.0), 5);
        assert_eq!(orbit.points, vec![c(0.0, 0.0); 6]);
    }

    #[test]
    fn period_two_orbit() {
        let p = MonicPoly::new(vec![c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let orbit = p.iterate(c(0.0, 0.0), 4);
        let expected = [0.0, -1.0, 0.0, -1.0, 0.0].map(|x| c(x, 0.0));
        assert_eq!(orbit.points, expected);
    }

    #[test]
    fn orbit_truncates_at_guard() {
        let orbit = square().iterate(c(1e100, 0.0), 10);
        assert!(orbit.truncated);
        assert!(orbit.points.len() < 11);
        assert!(orbit.points.iter().all(|z| !z.re.is_nan() && !z.im.is_nan()));
    }

    #[test]
    fn escape_radii() {
        assert_eq!(square().escape_radius(), 2.0);
        let p = MonicPoly::new(vec![c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(p.escape_radius(), 3.0);
        assert_eq!(cubic().escape_radius(), 5.0);
    }

    #[test]
    fn parse_power_shorthand() {
        let p: MonicPoly = "power:5".parse().unwrap();
        assert_eq!(p.degree(), 5);
        assert!(p.is_power_map());
    }

    #[test]
    fn parse_full_syntax() {
        let p: MonicPoly = "z^3 + (2)z + (1+0i)".parse().unwrap();
        assert_eq!(p, cubic());
        let q: MonicPoly = "z^2 - 1".parse().unwrap();
        assert_eq!(q.coeffs()[0], c(-1.0, 0.0));
        let r: MonicPoly = "z^2 + (0.5-0.25i)".parse().unwrap();
        assert_eq!(r.coeffs()[0], c(0.5, -0.25));
    }

    #[test]
    fn parse_rejects_non_monic() {
        assert_eq!("2z^2 + 1".parse::<MonicPoly>(), Err(PolyError::NotMonic));
        assert_eq!(
            "(2)z^3 + z".parse::<MonicPoly>(),
            Err(PolyError::NotMonic)
        );
    }

    #[test]
    fn parse_rejects_low_degree() {
        assert!(matches!(
            "z + 1".parse::<MonicPoly>(),
            Err(PolyError::DegreeTooSmall(1))
        ));
        assert!(matches!(
            "power:1".parse::<MonicPoly>(),
            Err(PolyError::DegreeTooSmall(1))
        ));
    }

    #[test]
    fn display_round_trips() {
        for p in [square(), cubic()] {
            let back: MonicPoly = p.to_string().parse().unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex_literal("1+0i").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex_literal("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex_literal("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex_literal("1.5e-3+2e-1i").unwrap(), c(1.5e-3, 0.2));
        assert_eq!(parse_complex_literal("-0.5").unwrap(), c(-0.5, 0.0));
    }

    /// Naive power-sum evaluation, the oracle for Horner.
    fn eval_naive(p: &MonicPoly, z: Complex64) -> Complex64 {
        let d = p.degree();
        let mut acc = z.powu(d as u32);
        for (i, a) in p.coeffs().iter().enumerate() {
            acc += a * z.powu(i as u32);
        }
        acc
    }

    proptest! {
        #[test]
        fn horner_matches_naive(
            degree in 2usize..=8,
            seed_coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
            zr in -2.0f64..2.0,
            zi in -2.0f64..2.0,
        ) {
            let coeffs: Vec<Complex64> = seed_coeffs[..degree]
                .iter()
                .map(|(re, im)| c(*re, *im))
                .collect();
            let p = MonicPoly::new(coeffs).unwrap();
            let z = c(zr, zi);
            let horner = p.eval(z);
            let naive = eval_naive(&p, z);
            let scale = naive.norm().max(1.0);
            prop_assert!((horner - naive).norm() <= 1e-12 * scale);
        }

        #[test]
        fn orbit_semigroup(
            a in 0usize..6,
            b in 0usize..6,
            zr in -0.9f64..0.9,
            zi in -0.9f64..0.9,
        ) {
            let p = square();
            let z = c(zr, zi);
            let full = p.iterate(z, a + b);
            let tail = p.iterate(full.points[a], b);
            prop_assert_eq!(&full.points[a..], &tail.points[..]);
        }

        #[test]
        fn escape_radius_doubles_modulus(
            zr in -4.0f64..4.0,
            zi in -4.0f64..4.0,
            c0 in (-1.0f64..1.0, -1.0f64..1.0),
            c1 in (-1.0f64..1.0, -1.0f64..1.0),
        ) {
            let p = MonicPoly::new(vec![c(c0.0, c0.1), c(c1.0, c1.1)]).unwrap();
            let r = p.escape_radius();
            let z = c(zr, zi);
            // Push the sample out to modulus >= R.
            let z = if z.norm() < r { z * (r / z.norm().max(1e-6)) } else { z };
            prop_assert!(p.eval(z).norm() >= 2.0 * z.norm() - 1e-9);
        }
    }

    #[test]
    fn escape_radius_many_samples() {
        // 1000 deterministic samples on and beyond the escape circle.
        let p = cubic();
        let r = p.escape_radius();
        for k in 0..1000 {
            let angle = k as f64 * 0.0628318;
            let modulus = r * (1.0 + (k % 17) as f64 * 0.25);
            let z = Complex64::from_polar(modulus, angle);
            assert!(p.eval(z).norm() >= 2.0 * z.norm());
        }
    }
}
