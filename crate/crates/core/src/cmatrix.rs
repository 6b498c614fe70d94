//! Dense complex matrices: arithmetic, norms, LU solves, eigenvalues and
//! eigenvalue clustering, Jordan-block constructors, and the JSON wire format.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::DynError;

/// Pivot moduli below this are treated as exact singularity.
pub const SINGULARITY_FLOOR: f64 = 1e-300;

/// Default relative deflation tolerance for the QR eigenvalue iteration.
pub const DEFAULT_DEFLATION_TOL: f64 = 1e-12;

/// A dense square matrix over the complex numbers, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Builds an `n x n` matrix from row-major data.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self, DynError> {
        if data.len() != n * n {
            return Err(DynError::DimensionMismatch(format!(
                "expected {} entries for an {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(CMatrix { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// The `m x m` Jordan block: `alpha` on the diagonal, 1 on the
    /// superdiagonal.
    pub fn jordan_block(alpha: Complex64, m: usize) -> Self {
        assert!(m >= 1, "jordan block size must be at least 1");
        let mut j = CMatrix::zeros(m);
        for i in 0..m {
            j[(i, i)] = alpha;
            if i + 1 < m {
                j[(i, i + 1)] = Complex64::new(1.0, 0.0);
            }
        }
        j
    }

    /// Convenience constructor from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "rows must form a square matrix");
            data.extend_from_slice(row);
        }
        CMatrix { n, data }
    }

    /// Real integer rows, handy in tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "rows must form a square matrix");
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        CMatrix { n, data }
    }

    /// Block-diagonal sum `self (+) other`.
    pub fn direct_sum(&self, other: &CMatrix) -> CMatrix {
        let n = self.n + other.n;
        let mut m = CMatrix::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                m[(self.n + i, self.n + j)] = other[(i, j)];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// Standard matrix product; errors on dimension mismatch.
    pub fn mat_mul(&self, rhs: &CMatrix) -> Result<CMatrix, DynError> {
        if self.n != rhs.n {
            return Err(DynError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n, self.n, rhs.n, rhs.n
            )));
        }
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * rhs.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus; cheap guard metric that cannot overflow
    /// before individual entries do.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Solves `A X = B` by LU with partial pivoting.
    pub fn lu_solve(&self, b: &CMatrix) -> Result<CMatrix, DynError> {
        if self.n != b.n {
            return Err(DynError::DimensionMismatch(format!(
                "lu_solve: coefficient matrix is {}x{} but rhs is {}x{}",
                self.n, self.n, b.n, b.n
            )));
        }
        let n = self.n;
        let mut lu = self.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            // Partial pivoting on column k.
            let mut best = k;
            let mut best_mag = lu[k * n + k].norm();
            for i in k + 1..n {
                let mag = lu[i * n + k].norm();
                if mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best_mag < SINGULARITY_FLOOR {
                return Err(DynError::SingularMatrix);
            }
            if best != k {
                for j in 0..n {
                    lu.swap(k * n + j, best * n + j);
                }
                piv.swap(k, best);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in k + 1..n {
                    let sub = factor * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
        // Forward/back substitution per right-hand-side column.
        let mut x = CMatrix::zeros(n);
        for col in 0..n {
            let mut y = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..n {
                let mut s = b.data[piv[i] * n + col];
                for j in 0..i {
                    s -= lu[i * n + j] * y[j];
                }
                y[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for j in i + 1..n {
                    s -= lu[i * n + j] * x.data[j * n + col];
                }
                x.data[i * n + col] = s / lu[i * n + i];
            }
        }
        Ok(x)
    }

    /// Matrix inverse via [`CMatrix::lu_solve`] against the identity.
    pub fn inverse(&self) -> Result<CMatrix, DynError> {
        self.lu_solve(&CMatrix::identity(self.n))
    }

    /// Similarity transform `Q A Q^{-1}`; errors when `Q` is singular.
    pub fn conjugate(&self, q: &CMatrix) -> Result<CMatrix, DynError> {
        let q_inv = q.inverse()?;
        q.mat_mul(self)?.mat_mul(&q_inv)
    }

    /// All `n` eigenvalues via balanced Householder/Hessenberg reduction and
    /// implicitly shifted complex QR. `deflation_tol` is relative; see
    /// [`DEFAULT_DEFLATION_TOL`].
    pub fn eigenvalues(&self, deflation_tol: f64) -> Result<Spectrum, DynError> {
        let eigs = eigen::eigenvalues(self, deflation_tol)?;
        Ok(Spectrum::new(eigs, default_cluster_tol(self.frobenius_norm())))
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> Result<f64, DynError> {
        Ok(self.eigenvalues(DEFAULT_DEFLATION_TOL)?.max_modulus())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<Vec<[f64; 2]>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| [self[(i, j)].re, self[(i, j)].im]).collect())
            .collect();
        serde_json::json!({ "n": self.n, "entries": entries })
    }

    /// Parses `{"n": 2, "entries": [[[re,im],...],...]}`; rejects ragged or
    /// non-finite input.
    pub fn from_json_str(s: &str) -> Result<Self, String> {
        let raw: MatrixJson = serde_json::from_str(s).map_err(|e| format!("bad matrix JSON: {e}"))?;
        raw.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = String;

    fn try_from(raw: MatrixJson) -> Result<Self, String> {
        if raw.n == 0 {
            return Err("matrix dimension must be at least 1".into());
        }
        if raw.entries.len() != raw.n {
            return Err(format!("expected {} rows, got {}", raw.n, raw.entries.len()));
        }
        let mut data = Vec::with_capacity(raw.n * raw.n);
        for row in &raw.entries {
            if row.len() != raw.n {
                return Err(format!("expected {} columns, got {}", raw.n, row.len()));
            }
            for &[re, im] in row {
                if !re.is_finite() || !im.is_finite() {
                    return Err("matrix entries must be finite".into());
                }
                data.push(Complex64::new(re, im));
            }
        }
        Ok(CMatrix { n: raw.n, data })
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.mat_mul(rhs).expect("dimension mismatch")
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "[")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Frobenius distance `||a - b||_F`.
pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).frobenius_norm()
}

/// Relative Frobenius distance with a floor so exact zero targets compare.
pub fn rel_frobenius_distance(got: &CMatrix, want: &CMatrix) -> f64 {
    frobenius_distance(got, want) / want.frobenius_norm().max(1e-30)
}

/// Default clustering tolerance, scaled by the source matrix norm.
pub fn default_cluster_tol(frobenius: f64) -> f64 {
    1e-6 * (1.0 + frobenius)
}

/// An eigenvalue multiset together with the tolerance used to group
/// numerically coincident values.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
    cluster_tol: f64,
}

/// One single-linkage group of eigenvalues.
#[derive(Debug, Clone)]
pub struct Cluster {
    /// Centroid of the member eigenvalues.
    pub center: Complex64,
    pub members: Vec<Complex64>,
    /// Largest pairwise member distance.
    pub diameter: f64,
}

impl Cluster {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

impl Spectrum {
    /// Sorts eigenvalues lexicographically by (re, im) so downstream output
    /// is deterministic regardless of deflation order.
    pub fn new(mut eigenvalues: Vec<Complex64>, cluster_tol: f64) -> Self {
        eigenvalues.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
        });
        Spectrum { eigenvalues, cluster_tol }
    }

    pub fn with_cluster_tol(mut self, tol: f64) -> Self {
        self.cluster_tol = tol;
        self
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn max_modulus(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Minimal distance from `point` to the eigenvalue multiset.
    pub fn distance_to(&self, point: Complex64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|&l| (l - point).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Single-linkage clusters at `cluster_tol`: two eigenvalues share a
    /// cluster when a chain of pairwise-within-tolerance values joins them.
    /// Clusters partition the multiset.
    pub fn clusters(&self) -> Vec<Cluster> {
        let n = self.eigenvalues.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let root = find(parent, parent[i]);
                parent[i] = root;
            }
            parent[i]
        }
        for i in 0..n {
            for j in i + 1..n {
                if (self.eigenvalues[i] - self.eigenvalues[j]).norm() <= self.cluster_tol {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
        let mut groups: Vec<Vec<Complex64>> = vec![Vec::new(); n];
        for i in 0..n {
            let root = find(&mut parent, i);
            groups[root].push(self.eigenvalues[i]);
        }
        groups
            .into_iter()
            .filter(|g| !g.is_empty())
            .map(|members| {
                let center = members.iter().sum::<Complex64>() / members.len() as f64;
                let mut diameter = 0.0f64;
                for a in 0..members.len() {
                    for b in a + 1..members.len() {
                        diameter = diameter.max((members[a] - members[b]).norm());
                    }
                }
                Cluster { center, members, diameter }
            })
            .collect()
    }
}
