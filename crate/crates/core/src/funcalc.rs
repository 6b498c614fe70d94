//! Holomorphic functional calculus by contour quadrature: resolvents, the
//! matrix Cauchy integral for polynomial iterates, and spectral projectors.
//!
//! All integrals run the trapezoid rule on circles, which is spectrally
//! accurate for the analytic integrands that occur here. Node sums use a
//! fixed order so results are bit-reproducible.

use num_complex::Complex64;

use crate::cmatrix::{CMatrix, Spectrum, DEFAULT_DEFLATION_TOL};
use crate::error::DynError;
use crate::poly::MonicPoly;

/// Default quadrature nodes per circle.
pub const DEFAULT_NODES: usize = 128;

/// Fewest admissible nodes per circle.
pub const MIN_NODES: usize = 16;

/// No circle may pass closer than this to an eigenvalue.
pub const MIN_EIGEN_CLEARANCE: f64 = 1e-9;

/// Scalar integrand values beyond this abort the quadrature.
const SCALAR_GUARD: f64 = 1e140;

/// A union of oriented circles used as an integration contour.
#[derive(Debug, Clone)]
pub struct Contour {
    circles: Vec<(Complex64, f64)>,
    nodes_per_circle: usize,
}

impl Contour {
    pub fn new(circles: Vec<(Complex64, f64)>, nodes_per_circle: usize) -> Result<Self, DynError> {
        if nodes_per_circle < MIN_NODES {
            return Err(DynError::DimensionMismatch(format!(
                "need at least {MIN_NODES} quadrature nodes per circle, got {nodes_per_circle}"
            )));
        }
        if circles.is_empty() || circles.iter().any(|&(_, r)| !r.is_finite() || r <= 0.0) {
            return Err(DynError::DimensionMismatch(
                "contour needs at least one circle of positive radius".into(),
            ));
        }
        Ok(Contour { circles, nodes_per_circle })
    }

    /// Single-circle contour.
    pub fn circle(center: Complex64, radius: f64, nodes: usize) -> Result<Self, DynError> {
        Contour::new(vec![(center, radius)], nodes)
    }

    pub fn circles(&self) -> &[(Complex64, f64)] {
        &self.circles
    }

    pub fn nodes_per_circle(&self) -> usize {
        self.nodes_per_circle
    }

    /// Distance from the contour curve to the nearest eigenvalue.
    fn clearance(&self, spectrum: &Spectrum) -> f64 {
        let mut best = f64::INFINITY;
        for &(center, radius) in &self.circles {
            for &l in spectrum.eigenvalues() {
                best = best.min(((l - center).norm() - radius).abs());
            }
        }
        best
    }

    /// Every eigenvalue must sit inside exactly one circle.
    fn encloses_spectrum_once(&self, spectrum: &Spectrum) -> bool {
        spectrum.eigenvalues().iter().all(|&l| {
            self.circles
                .iter()
                .filter(|&&(c, r)| (l - c).norm() < r)
                .count()
                == 1
        })
    }
}

/// The resolvent `(zeta I - X)^{-1}`.
pub fn resolvent(x: &CMatrix, zeta: Complex64) -> Result<CMatrix, DynError> {
    let n = x.dim();
    let shifted = &CMatrix::identity(n).scale(zeta) - x;
    shifted.lu_solve(&CMatrix::identity(n))
}

/// Evaluates `p^m(X)` as the Cauchy integral
/// `(1/2 pi i) \oint p^m(zeta) (zeta I - X)^{-1} d zeta`
/// over a contour that winds once around the whole spectrum.
pub fn contour_eval(
    p: &MonicPoly,
    m: usize,
    x: &CMatrix,
    contour: &Contour,
) -> Result<CMatrix, DynError> {
    let spectrum = x.eigenvalues(DEFAULT_DEFLATION_TOL)?;
    let clearance = contour.clearance(&spectrum);
    if clearance < MIN_EIGEN_CLEARANCE {
        return Err(DynError::ContourTooClose { dist: clearance });
    }
    if !contour.encloses_spectrum_once(&spectrum) {
        return Err(DynError::ContourNotEnclosing);
    }
    quadrature(x, contour, |zeta| {
        p.iterate_value(zeta, m)
            .filter(|v| v.norm() < SCALAR_GUARD)
            .ok_or(DynError::Overflow("polynomial iterate at a contour node"))
    })
}

/// Spectral projector for the eigenvalue cluster enclosed by the circle:
/// `P = (1/2 pi i) \oint (zeta I - X)^{-1} d zeta`. The circle must separate
/// its cluster from the rest of the spectrum (caller's responsibility) and
/// must not pass near any eigenvalue (checked).
pub fn spectral_projector(
    x: &CMatrix,
    center: Complex64,
    radius: f64,
    nodes: usize,
) -> Result<CMatrix, DynError> {
    let contour = Contour::circle(center, radius, nodes)?;
    let spectrum = x.eigenvalues(DEFAULT_DEFLATION_TOL)?;
    let clearance = contour.clearance(&spectrum);
    if clearance < MIN_EIGEN_CLEARANCE {
        return Err(DynError::ContourTooClose { dist: clearance });
    }
    quadrature(x, &contour, |_| Ok(Complex64::new(1.0, 0.0)))
}

/// Trapezoid rule over every circle of the contour with a fixed summation
/// order. With `zeta(t) = c + r e^{it}` the weight for node k out of K is
/// `r e^{i theta_k} / K`.
fn quadrature<F>(x: &CMatrix, contour: &Contour, scalar: F) -> Result<CMatrix, DynError>
where
    F: Fn(Complex64) -> Result<Complex64, DynError>,
{
    let n = x.dim();
    let k_nodes = contour.nodes_per_circle();
    let mut acc = CMatrix::zeros(n);
    for &(center, radius) in contour.circles() {
        for k in 0..k_nodes {
            let theta = std::f64::consts::TAU * k as f64 / k_nodes as f64;
            let dir = Complex64::from_polar(1.0, theta);
            let zeta = center + dir * radius;
            let weight = dir * (radius / k_nodes as f64);
            let value = scalar(zeta)?;
            let res = resolvent(x, zeta)?;
            acc = &acc + &res.scale(value * weight);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::rel_frobenius_distance;
    use crate::matrix_dyn::iterate_matrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square() -> MonicPoly {
        MonicPoly::power(2).unwrap()
    }

    #[test]
    fn resolvent_of_diagonal() {
        let x = CMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let r = resolvent(&x, c(3.0, 0.0)).unwrap();
        assert!(rel_frobenius_distance(&r, &CMatrix::diag(&[c(0.5, 0.0), c(1.0, 0.0)])) < 1e-14);
    }

    #[test]
    fn resolvent_of_zero() {
        let x = CMatrix::zeros(3);
        let r = resolvent(&x, c(2.0, 0.0)).unwrap();
        assert!(rel_frobenius_distance(&r, &CMatrix::identity(3).scale(c(0.5, 0.0))) < 1e-15);
    }

    #[test]
    fn resolvent_of_nilpotent() {
        // (I - N)^{-1} = I + N for the 2x2 nilpotent block.
        let x = CMatrix::jordan_block(c(0.0, 0.0), 2);
        let r = resolvent(&x, c(1.0, 0.0)).unwrap();
        let want = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(rel_frobenius_distance(&r, &want) < 1e-14);
    }

    #[test]
    fn cauchy_identity_function() {
        // m = 0 realizes q(z) = z: the integral reproduces X itself.
        let x = CMatrix::from_rows(&[
            vec![c(0.3, 0.1), c(-0.2, 0.0)],
            vec![c(0.1, -0.4), c(0.5, 0.2)],
        ]);
        let contour = Contour::circle(c(0.0, 0.0), 2.0, 64).unwrap();
        let got = contour_eval(&square(), 0, &x, &contour).unwrap();
        assert!(rel_frobenius_distance(&got, &x) < 1e-10);
    }

    #[test]
    fn cauchy_square_of_diagonal() {
        let x = CMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let contour = Contour::circle(c(1.5, 0.0), 2.0, 64).unwrap();
        let got = contour_eval(&square(), 1, &x, &contour).unwrap();
        let want = CMatrix::diag(&[c(1.0, 0.0), c(4.0, 0.0)]);
        assert!(rel_frobenius_distance(&got, &want) < 1e-10);
    }

    #[test]
    fn cauchy_square_of_jordan_block() {
        let x = CMatrix::jordan_block(c(1.0, 0.0), 2);
        let contour = Contour::circle(c(1.0, 0.0), 0.5, 128).unwrap();
        let got = contour_eval(&square(), 1, &x, &contour).unwrap();
        let want = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(rel_frobenius_distance(&got, &want) < 1e-9);
    }

    #[test]
    fn agrees_with_direct_iteration() {
        // Clearance >= 0.3 * radius, m <= 4.
        let x = CMatrix::from_rows(&[
            vec![c(0.4, 0.1), c(0.3, 0.0), c(0.0, 0.1)],
            vec![c(0.0, 0.0), c(-0.3, 0.2), c(0.2, 0.0)],
            vec![c(0.1, 0.0), c(0.0, 0.0), c(0.2, -0.5)],
        ]);
        let contour = Contour::circle(c(0.0, 0.0), 1.25, DEFAULT_NODES).unwrap();
        for m in 0..=4 {
            let got = contour_eval(&square(), m, &x, &contour).unwrap();
            let direct = iterate_matrix(&square(), &x, m).states.last().unwrap().clone();
            assert!(
                rel_frobenius_distance(&got, &direct) < 1e-8,
                "m = {m}: error {}",
                rel_frobenius_distance(&got, &direct)
            );
        }
    }

    #[test]
    fn node_doubling_collapses_error() {
        // Eigenvalues at 0.8 of the circle radius: 64 nodes leave a visible
        // error, 128 nodes crush it by far more than 1e3.
        let x = CMatrix::diag(&[c(0.8, 0.0), c(-0.8, 0.0)]);
        let direct = iterate_matrix(&square(), &x, 2).states.last().unwrap().clone();
        let err = |nodes: usize| {
            let contour = Contour::circle(c(0.0, 0.0), 1.0, nodes).unwrap();
            let got = contour_eval(&square(), 2, &x, &contour).unwrap();
            (&got - &direct).frobenius_norm()
        };
        let e64 = err(64);
        let e128 = err(128);
        assert!(e128 <= 1e-8, "128-node error {e128}");
        assert!(e64 >= 1e3 * e128, "drop only {}", e64 / e128.max(1e-300));
    }

    #[test]
    fn projector_selects_cluster() {
        let x = CMatrix::diag(&[c(1.0, 0.0), c(5.0, 0.0)]);
        let p1 = spectral_projector(&x, c(1.0, 0.0), 1.0, DEFAULT_NODES).unwrap();
        assert!(rel_frobenius_distance(&p1, &CMatrix::diag(&[c(1.0, 0.0), c(0.0, 0.0)])) < 1e-10);
        let p2 = spectral_projector(&x, c(5.0, 0.0), 1.0, DEFAULT_NODES).unwrap();
        assert!(rel_frobenius_distance(&p2, &CMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0)])) < 1e-10);
    }

    #[test]
    fn projector_of_full_cluster_is_identity() {
        let x = CMatrix::jordan_block(c(2.0, 0.0), 2);
        let p = spectral_projector(&x, c(2.0, 0.0), 1.0, DEFAULT_NODES).unwrap();
        assert!(rel_frobenius_distance(&p, &CMatrix::identity(2)) < 1e-10);
    }

    #[test]
    fn projector_algebra() {
        // P_i P_j ~ 0, sum P_i ~ I on a well-separated spectrum.
        let x = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.4, 0.2), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(4.0, 0.0), c(-0.3, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 3.0)],
        ]);
        let centers = [c(1.0, 0.0), c(4.0, 0.0), c(0.0, 3.0)];
        let projectors: Vec<CMatrix> = centers
            .iter()
            .map(|&ctr| spectral_projector(&x, ctr, 1.0, DEFAULT_NODES).unwrap())
            .collect();
        let mut total = CMatrix::zeros(3);
        for p in &projectors {
            total = &total + p;
            // Idempotent, integer trace.
            let p2 = p.mat_mul(p).unwrap();
            assert!(rel_frobenius_distance(&p2, p) < 1e-8);
            let trace: Complex64 = (0..3).map(|i| p[(i, i)]).sum();
            assert!((trace - c(1.0, 0.0)).norm() < 1e-6);
        }
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let prod = projectors[i].mat_mul(&projectors[j]).unwrap();
                    assert!(prod.frobenius_norm() < 1e-8);
                }
            }
        }
        assert!(rel_frobenius_distance(&total, &CMatrix::identity(3)) < 1e-8);
    }

    #[test]
    fn contour_through_eigenvalue_rejected() {
        let x = CMatrix::diag(&[c(1.0, 0.0), c(3.0, 0.0)]);
        let contour = Contour::circle(c(0.0, 0.0), 1.0, 64).unwrap();
        assert!(matches!(
            contour_eval(&square(), 1, &x, &contour),
            Err(DynError::ContourTooClose { .. })
        ));
    }

    #[test]
    fn contour_missing_an_eigenvalue_rejected() {
        let x = CMatrix::diag(&[c(1.0, 0.0), c(5.0, 0.0)]);
        let contour = Contour::circle(c(1.0, 0.0), 1.5, 64).unwrap();
        assert!(matches!(
            contour_eval(&square(), 1, &x, &contour),
            Err(DynError::ContourNotEnclosing)
        ));
    }

    #[test]
    fn too_few_nodes_rejected() {
        assert!(Contour::circle(c(0.0, 0.0), 1.0, 8).is_err());
    }
}
