//! Dynamics of monic polynomials on matrix space: orbit iteration, the
//! spectral Fatou/Julia classifier, closed-form Jordan iteration via Taylor
//! jets, the power-map differential, and Jordan–Chevalley decomposition
//! through spectral projectors.

use num_complex::Complex64;

use crate::cmatrix::{CMatrix, Spectrum, DEFAULT_DEFLATION_TOL};
use crate::error::DynError;
use crate::funcalc;
use crate::poly::MonicPoly;
use crate::scalar_dyn::{self, PerturbedVerdict};

/// Matrix orbits are truncated once the Frobenius norm exceeds this.
pub const MATRIX_OVERFLOW_GUARD: f64 = 1e100;

/// Taylor-jet coefficients beyond this abort closed-form Jordan iteration.
pub const JET_OVERFLOW_GUARD: f64 = 1e100;

/// Default norm bound for direct boundedness tests.
pub const DEFAULT_ORBIT_BOUND: f64 = 1e8;

/// Off-diagonal divided differences need eigenvalues at least this far apart.
pub const MIN_EIGENVALUE_GAP: f64 = 1e-12;

/// Relative slack when deciding that the running orbit maximum stabilized:
/// a late iterate only spoils boundedness when it beats the three-quarter
/// checkpoint maximum by more than this factor.
const STABILIZATION_SLACK: f64 = 1e-3;

/// Knobs for the spectral classifier.
#[derive(Debug, Clone)]
pub struct ClassifyParams {
    pub max_iter: usize,
    pub eps: f64,
    /// Boundary-proximity radius around each eigenvalue.
    pub prox_delta: f64,
    pub deflation_tol: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            max_iter: scalar_dyn::DEFAULT_MAX_ITER,
            eps: scalar_dyn::DEFAULT_EPS,
            prox_delta: scalar_dyn::DEFAULT_PROX_DELTA,
            deflation_tol: DEFAULT_DEFLATION_TOL,
        }
    }
}

/// Why a matrix is Fatou.
#[derive(Debug, Clone, PartialEq)]
pub enum FatouReason {
    /// Every eigenvalue classified decisively inside a bounded Fatou region.
    AllEigenvaluesFatou,
    /// Some eigenvalue lies in the basin of infinity, so the matrix orbit
    /// diverges uniformly.
    UniformEscape,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixVerdict {
    Fatou { reason: FatouReason },
    Julia { witness: Complex64 },
    Undecided { proximate_eigenvalues: Vec<Complex64> },
}

/// Spectral classification result with per-eigenvalue detail.
#[derive(Debug, Clone)]
pub struct MatrixClass {
    pub verdict: MatrixVerdict,
    pub spectrum: Spectrum,
    pub eigen_classes: Vec<(Complex64, PerturbedVerdict)>,
}

/// A matrix forward orbit, possibly cut short by the overflow guard.
#[derive(Debug, Clone)]
pub struct MatrixOrbit {
    pub states: Vec<CMatrix>,
    pub truncated: bool,
}

/// Outcome of a direct boundedness test.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitBehavior {
    Bounded,
    Escaped { iter: usize },
    /// Stayed under the bound but the running maximum was still growing.
    Inconclusive,
}

/// `p(X)` by Horner in matrix arithmetic.
pub fn eval_matrix(p: &MonicPoly, x: &CMatrix) -> CMatrix {
    let n = x.dim();
    let coeffs = p.coeffs();
    let d = coeffs.len();
    // acc = X + a_{d-1} I, then fold the remaining coefficients downward.
    let mut acc = x + &CMatrix::identity(n).scale(coeffs[d - 1]);
    for i in (0..d - 1).rev() {
        acc = &(&acc * x) + &CMatrix::identity(n).scale(coeffs[i]);
    }
    acc
}

/// The orbit `X, p(X), ..., p^m(X)`, truncated with a flag when the
/// Frobenius norm passes [`MATRIX_OVERFLOW_GUARD`].
pub fn iterate_matrix(p: &MonicPoly, x: &CMatrix, m: usize) -> MatrixOrbit {
    let mut states = Vec::with_capacity(m + 1);
    states.push(x.clone());
    for _ in 0..m {
        let last = states.last().expect("orbit is nonempty");
        if last.frobenius_norm() > MATRIX_OVERFLOW_GUARD {
            return MatrixOrbit { states, truncated: true };
        }
        let next = eval_matrix(p, last);
        states.push(next);
    }
    let truncated = states.len() < m + 1;
    MatrixOrbit { states, truncated }
}

/// Direct boundedness test: `Escaped` once the norm passes `bound`,
/// `Bounded` when every iterate stays under it and the running maximum
/// stabilized over the last quarter of the run, `Inconclusive` otherwise.
pub fn bounded_orbit(p: &MonicPoly, x: &CMatrix, max_iter: usize, bound: f64) -> OrbitBehavior {
    let checkpoint = max_iter - max_iter / 4;
    let mut current = x.clone();
    let mut norm = current.frobenius_norm();
    if norm > bound {
        return OrbitBehavior::Escaped { iter: 0 };
    }
    let mut max_early = norm;
    let mut max_late = 0.0f64;
    for it in 1..=max_iter {
        current = eval_matrix(p, &current);
        norm = current.frobenius_norm();
        if norm > bound || !norm.is_finite() {
            return OrbitBehavior::Escaped { iter: it };
        }
        if it <= checkpoint {
            max_early = max_early.max(norm);
        } else {
            max_late = max_late.max(norm);
        }
    }
    if max_late <= max_early * (1.0 + STABILIZATION_SLACK) {
        OrbitBehavior::Bounded
    } else {
        OrbitBehavior::Inconclusive
    }
}

/// Spectral classifier: the matrix is Julia exactly when some eigenvalue is
/// boundary-proximate, Fatou when every eigenvalue classifies decisively
/// away from the boundary, and Undecided when a perturbed eigenvalue
/// disagrees with its neighbors without an escape/bounded split.
pub fn classify_matrix_spectral(
    p: &MonicPoly,
    x: &CMatrix,
    params: &ClassifyParams,
) -> Result<MatrixClass, DynError> {
    let spectrum = x.eigenvalues(params.deflation_tol)?;
    let eigen_classes: Vec<(Complex64, PerturbedVerdict)> = spectrum
        .eigenvalues()
        .iter()
        .map(|&l| {
            (
                l,
                scalar_dyn::classify_perturbed(p, l, params.prox_delta, params.max_iter, params.eps),
            )
        })
        .collect();
    let verdict = if let Some((witness, _)) = eigen_classes
        .iter()
        .find(|(_, c)| matches!(c, PerturbedVerdict::JuliaProximate))
    {
        MatrixVerdict::Julia { witness: *witness }
    } else {
        let ambiguous: Vec<Complex64> = eigen_classes
            .iter()
            .filter(|(_, c)| matches!(c, PerturbedVerdict::Undecided))
            .map(|(l, _)| *l)
            .collect();
        if !ambiguous.is_empty() {
            MatrixVerdict::Undecided { proximate_eigenvalues: ambiguous }
        } else {
            let any_escape = eigen_classes.iter().any(|(_, c)| {
                matches!(
                    c,
                    PerturbedVerdict::Decisive(sc) if sc.verdict.is_escape()
                )
            });
            MatrixVerdict::Fatou {
                reason: if any_escape {
                    FatouReason::UniformEscape
                } else {
                    FatouReason::AllEigenvaluesFatou
                },
            }
        }
    };
    Ok(MatrixClass { verdict, spectrum, eigen_classes })
}

/// Power-map classifier on the general linear group: identical to
/// [`classify_matrix_spectral`] with `p = z^M`, except that singular input
/// is rejected up front.
pub fn power_map_classify(
    exponent: usize,
    x: &CMatrix,
    params: &ClassifyParams,
) -> Result<MatrixClass, DynError> {
    x.inverse()?;
    let p = MonicPoly::power(exponent).expect("exponent >= 2");
    classify_matrix_spectral(&p, x, params)
}

/// Truncated Taylor jet: coefficients `c_k = f^{(k)}(alpha) / k!` up to the
/// jet order. Propagating the identity jet through `m` Horner evaluations
/// yields the derivatives of the m-fold composition exactly (in jet space).
#[derive(Debug, Clone)]
struct Jet {
    c: Vec<Complex64>,
}

impl Jet {
    fn variable(alpha: Complex64, order: usize) -> Jet {
        let mut c = vec![Complex64::new(0.0, 0.0); order];
        c[0] = alpha;
        if order > 1 {
            c[1] = Complex64::new(1.0, 0.0);
        }
        Jet { c }
    }

    fn mul(&self, other: &Jet) -> Result<Jet, DynError> {
        let order = self.c.len();
        let mut out = vec![Complex64::new(0.0, 0.0); order];
        for (k, slot) in out.iter_mut().enumerate() {
            for i in 0..=k {
                *slot += self.c[i] * other.c[k - i];
            }
            if slot.norm() > JET_OVERFLOW_GUARD {
                return Err(DynError::JetOverflow);
            }
        }
        Ok(Jet { c: out })
    }
}

fn eval_jet(p: &MonicPoly, x: &Jet) -> Result<Jet, DynError> {
    let order = x.c.len();
    let mut acc = Jet { c: vec![Complex64::new(0.0, 0.0); order] };
    acc.c[0] = Complex64::new(1.0, 0.0);
    for a in p.coeffs().iter().rev() {
        acc = acc.mul(x)?;
        acc.c[0] += a;
    }
    Ok(acc)
}

/// Closed-form `p^m` of a Jordan block: the upper-triangular Toeplitz matrix
/// with `(i, i+k)` entry `(p^m)^{(k)}(alpha) / k!`, computed by jet
/// propagation rather than symbolic composition.
pub fn jordan_iterate_closed_form(
    p: &MonicPoly,
    alpha: Complex64,
    size: usize,
    m: usize,
) -> Result<CMatrix, DynError> {
    assert!(size >= 1, "jordan block size must be at least 1");
    let mut jet = Jet::variable(alpha, size);
    for _ in 0..m {
        jet = eval_jet(p, &jet)?;
    }
    let mut out = CMatrix::zeros(size);
    for i in 0..size {
        for k in 0..size - i {
            out[(i, i + k)] = jet.c[k];
        }
    }
    Ok(out)
}

/// Eigenvalues of the differential of the m-fold power map `x -> x^(M^m)`
/// at a regular semisimple point with the given eigenvalues: the matrix
/// units are eigenvectors with
/// `mu_ij = (a_i^E - a_j^E)/(a_i - a_j)` off the diagonal and
/// `mu_ii = E a_i^{E-1}` on it, where `E = M^m`.
pub fn power_map_differential_eigenvalues(
    base: usize,
    iterations: u32,
    eigs: &[Complex64],
) -> Result<CMatrix, DynError> {
    let exponent = (base as u64)
        .checked_pow(iterations)
        .filter(|&e| e <= u32::MAX as u64)
        .ok_or(DynError::Overflow("power-map exponent"))? as u32;
    let n = eigs.len();
    for i in 0..n {
        for j in i + 1..n {
            if (eigs[i] - eigs[j]).norm() < MIN_EIGENVALUE_GAP {
                return Err(DynError::DegenerateSpectrum { i, j, min_gap: MIN_EIGENVALUE_GAP });
            }
        }
    }
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = if i == j {
                Complex64::new(exponent as f64, 0.0) * eigs[i].powu(exponent - 1)
            } else {
                (eigs[i].powu(exponent) - eigs[j].powu(exponent)) / (eigs[i] - eigs[j])
            };
        }
    }
    Ok(out)
}

/// Residual diagnostics attached to a Jordan–Chevalley decomposition.
#[derive(Debug, Clone)]
pub struct JcResiduals {
    /// `||(S + N) - X||_F / ||X||_F`; zero by construction.
    pub reconstruction: f64,
    /// `||N^n||_F`, the nilpotency defect.
    pub nilpotency_defect: f64,
    /// `||SN - NS||_F`.
    pub commutator: f64,
}

/// `X = S + N` with `S` semisimple (a combination of spectral projectors)
/// and `N` nilpotent.
#[derive(Debug, Clone)]
pub struct JcDecomposition {
    pub semisimple: CMatrix,
    pub nilpotent: CMatrix,
    pub residuals: JcResiduals,
}

/// Default clustering tolerance for [`jordan_chevalley`]: loose enough to
/// absorb the eps^(1/m) eigenvalue splitting of defective blocks.
pub fn jc_cluster_tol(frobenius: f64) -> f64 {
    1e-3 * (1.0 + frobenius)
}

/// Jordan–Chevalley decomposition via spectral projectors: for each
/// eigenvalue cluster, integrate the resolvent on a circle enclosing exactly
/// that cluster; the semisimple part is the projector combination weighted
/// by cluster centroids.
pub fn jordan_chevalley(x: &CMatrix, cluster_tol: f64) -> Result<JcDecomposition, DynError> {
    let n = x.dim();
    let spectrum = x.eigenvalues(DEFAULT_DEFLATION_TOL)?.with_cluster_tol(cluster_tol);
    let clusters = spectrum.clusters();
    let semisimple = if clusters.len() == 1 {
        CMatrix::identity(n).scale(clusters[0].center)
    } else {
        let max_diameter = clusters.iter().map(|c| c.diameter).fold(0.0, f64::max);
        let mut min_gap = f64::INFINITY;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                for &a in &clusters[i].members {
                    for &b in &clusters[j].members {
                        min_gap = min_gap.min((a - b).norm());
                    }
                }
            }
        }
        // Separation precondition; cluster_tol acts as an effective diameter
        // floor so that a wrongly split defective block is refused instead
        // of integrated.
        let effective_diameter = max_diameter.max(cluster_tol);
        if min_gap <= 10.0 * effective_diameter {
            return Err(DynError::ClusterOverlap { gap: min_gap, diameter: effective_diameter });
        }
        let mut s = CMatrix::zeros(n);
        for cluster in &clusters {
            let radius = (2.0 * cluster.diameter).max(0.1 * min_gap).max(1e-6);
            let projector =
                funcalc::spectral_projector(x, cluster.center, radius, funcalc::DEFAULT_NODES)?;
            s = &s + &projector.scale(cluster.center);
        }
        s
    };
    let nilpotent = x - &semisimple;
    let mut nil_power = nilpotent.clone();
    for _ in 1..n {
        nil_power = nil_power.mat_mul(&nilpotent)?;
    }
    let commutator = &semisimple.mat_mul(&nilpotent)? - &nilpotent.mat_mul(&semisimple)?;
    let residuals = JcResiduals {
        reconstruction: (&(&semisimple + &nilpotent) - x).frobenius_norm()
            / x.frobenius_norm().max(1e-30),
        nilpotency_defect: nil_power.frobenius_norm(),
        commutator: commutator.frobenius_norm(),
    };
    Ok(JcDecomposition { semisimple, nilpotent, residuals })
}
