//! Numerical Fatou/Julia classification of points of the complex plane under
//! a monic polynomial: escape testing, attracting-cycle detection, and the
//! boundary-proximity surrogate for Julia membership.

use num_complex::Complex64;

use crate::poly::MonicPoly;

/// Default iteration budget for a single classification.
pub const DEFAULT_MAX_ITER: usize = 2000;

/// Default cycle-detection tolerance.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Default perturbation radius for boundary proximity outside renderer
/// contexts (renders tie it to the pixel size instead).
pub const DEFAULT_PROX_DELTA: f64 = 1e-3;

/// Longest cycle period the trailing-window scan looks for.
pub const MAX_CYCLE_PERIOD: usize = 32;

/// A cycle only counts as attracting when its multiplier modulus is below
/// this margin, keeping parabolic multipliers (modulus 1) out.
pub const MULTIPLIER_ACCEPT: f64 = 0.95;

/// Cycle detection runs every this many iterations, so decided verdicts do
/// not depend on the iteration budget.
const CYCLE_CHECK_STRIDE: usize = 64;

/// Where a point sits in the dynamical plane.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarVerdict {
    /// An iterate exceeded the escape radius at orbit index `escape_iter`.
    BasinInfinity { escape_iter: usize },
    /// The orbit settled onto a cycle with multiplier modulus below
    /// [`MULTIPLIER_ACCEPT`].
    AttractingBasin { period: usize, multiplier: Complex64 },
    /// The orbit stayed within the escape radius for the whole budget with
    /// no attracting cycle found (parabolic petals and Siegel disks land
    /// here, as do Julia points themselves).
    BoundedNonAttracting,
    /// Produced only by the perturbed classifier when nearby samples
    /// disagree without an escape/bounded split.
    Undecided,
}

impl ScalarVerdict {
    pub fn is_escape(&self) -> bool {
        matches!(self, ScalarVerdict::BasinInfinity { .. })
    }

    pub fn is_bounded(&self) -> bool {
        matches!(
            self,
            ScalarVerdict::AttractingBasin { .. } | ScalarVerdict::BoundedNonAttracting
        )
    }

    /// Coarse kind used when comparing perturbed samples.
    fn kind(&self) -> u8 {
        match self {
            ScalarVerdict::BasinInfinity { .. } => 0,
            ScalarVerdict::AttractingBasin { .. } => 1,
            ScalarVerdict::BoundedNonAttracting => 2,
            ScalarVerdict::Undecided => 3,
        }
    }
}

/// Classification result plus the number of polynomial applications spent.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarClass {
    pub verdict: ScalarVerdict,
    pub iterations_used: usize,
}

/// Classifies one point: escape wins, then attraction, then bounded.
/// Deterministic for fixed inputs, and a decided escape/attraction verdict
/// never changes when `max_iter` grows.
pub fn classify_point(p: &MonicPoly, z: Complex64, max_iter: usize, eps: f64) -> ScalarClass {
    let radius = p.escape_radius();
    let mut orbit = Vec::with_capacity(max_iter.min(4096) + 1);
    orbit.push(z);
    if z.norm() > radius {
        return ScalarClass {
            verdict: ScalarVerdict::BasinInfinity { escape_iter: 0 },
            iterations_used: 0,
        };
    }
    for it in 1..=max_iter {
        let next = p.eval(orbit[it - 1]);
        orbit.push(next);
        if next.norm() > radius {
            return ScalarClass {
                verdict: ScalarVerdict::BasinInfinity { escape_iter: it },
                iterations_used: it,
            };
        }
        if it % CYCLE_CHECK_STRIDE == 0 {
            if let Some((period, multiplier)) = detect_cycle(&orbit, p, eps) {
                return ScalarClass {
                    verdict: ScalarVerdict::AttractingBasin { period, multiplier },
                    iterations_used: it,
                };
            }
        }
    }
    if let Some((period, multiplier)) = detect_cycle(&orbit, p, eps) {
        return ScalarClass {
            verdict: ScalarVerdict::AttractingBasin { period, multiplier },
            iterations_used: max_iter,
        };
    }
    ScalarClass {
        verdict: ScalarVerdict::BoundedNonAttracting,
        iterations_used: max_iter,
    }
}

/// Scans the trailing window of an orbit for a period `q <= 32` with
/// `|z_{m+q} - z_m| < eps`. On a hit the multiplier is the product of the
/// derivative along the window; only multipliers with modulus below
/// [`MULTIPLIER_ACCEPT`] are reported.
pub fn detect_cycle(
    orbit: &[Complex64],
    p: &MonicPoly,
    eps: f64,
) -> Option<(usize, Complex64)> {
    let len = orbit.len();
    if len < 2 {
        return None;
    }
    let last = orbit[len - 1];
    for q in 1..=MAX_CYCLE_PERIOD.min(len - 1) {
        if (last - orbit[len - 1 - q]).norm() < eps {
            let multiplier: Complex64 = (0..q)
                .map(|j| p.derivative(orbit[len - 1 - q + j]))
                .product();
            if multiplier.norm() < MULTIPLIER_ACCEPT {
                return Some((q, multiplier));
            }
        }
    }
    None
}

/// The combined verdict over a point and its ring of eight perturbations.
#[derive(Debug, Clone, PartialEq)]
pub enum PerturbedVerdict {
    /// Every sample agrees with the center's verdict kind.
    Decisive(ScalarClass),
    /// At least one sample escaped and at least one stayed bounded: the point
    /// is within `delta` of the filled-Julia boundary.
    JuliaProximate,
    /// Samples disagree (attracting vs. bounded-non-attracting) without any
    /// escape: too close to an internal component boundary to call.
    Undecided,
}

/// Classifies `z` together with the eight perturbations
/// `z + delta * e^{2 pi i k / 8}`.
pub fn classify_perturbed(
    p: &MonicPoly,
    z: Complex64,
    delta: f64,
    max_iter: usize,
    eps: f64,
) -> PerturbedVerdict {
    let center = classify_point(p, z, max_iter, eps);
    let mut any_escape = center.verdict.is_escape();
    let mut any_bounded = center.verdict.is_bounded();
    let mut kinds_disagree = false;
    for k in 0..8 {
        let angle = std::f64::consts::TAU * k as f64 / 8.0;
        let sample = classify_point(p, z + Complex64::from_polar(delta, angle), max_iter, eps);
        any_escape |= sample.verdict.is_escape();
        any_bounded |= sample.verdict.is_bounded();
        kinds_disagree |= sample.verdict.kind() != center.verdict.kind();
        if any_escape && any_bounded {
            return PerturbedVerdict::JuliaProximate;
        }
    }
    if kinds_disagree {
        PerturbedVerdict::Undecided
    } else {
        PerturbedVerdict::Decisive(center)
    }
}

/// True when `z` sits within `delta` of the filled-Julia boundary: among the
/// point and its eight perturbations, at least one escapes and at least one
/// stays bounded. For polynomials that boundary is exactly the Julia set.
pub fn julia_proximate(p: &MonicPoly, z: Complex64, delta: f64, max_iter: usize) -> bool {
    matches!(
        classify_perturbed(p, z, delta, max_iter, DEFAULT_EPS),
        PerturbedVerdict::JuliaProximate
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MonicPoly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square() -> MonicPoly {
        MonicPoly::power(2).unwrap()
    }

    fn square_minus_one() -> MonicPoly {
        MonicPoly::new(vec![c(-1.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    /// z^2 + e^{2 pi i theta} z with theta the golden ratio: Siegel disk at 0.
    fn siegel() -> MonicPoly {
        let theta = (1.0 + 5.0f64.sqrt()) / 2.0;
        let lambda = Complex64::from_polar(1.0, std::f64::consts::TAU * theta);
        MonicPoly::new(vec![c(0.0, 0.0), lambda]).unwrap()
    }

    #[test]
    fn interior_point_attracts() {
        let class = classify_point(&square(), c(0.5, 0.0), 100, DEFAULT_EPS);
        match class.verdict {
            ScalarVerdict::AttractingBasin { period, multiplier } => {
                assert_eq!(period, 1);
                assert!(multiplier.norm() < 1e-6);
            }
            other => panic!("expected attraction, got {other:?}"),
        }
    }

    #[test]
    fn far_point_escapes_immediately() {
        let class = classify_point(&square(), c(3.0, 0.0), 100, DEFAULT_EPS);
        match class.verdict {
            ScalarVerdict::BasinInfinity { escape_iter } => assert!(escape_iter <= 2),
            other => panic!("expected escape, got {other:?}"),
        }
    }

    #[test]
    fn siegel_disk_point_is_bounded_non_attracting() {
        // Oracle: the orbit of 0.01 stays inside |z| < 0.1 for 1e5 steps.
        let p = siegel();
        let mut z = c(0.01, 0.0);
        for _ in 0..100_000 {
            z = p.eval(z);
            assert!(z.norm() < 0.1, "orbit left the Siegel disk at {z}");
        }
        let class = classify_point(&p, c(0.01, 0.0), 100_000, DEFAULT_EPS);
        assert_eq!(class.verdict, ScalarVerdict::BoundedNonAttracting);
    }

    #[test]
    fn detect_cycle_period_two() {
        let p = square_minus_one();
        let orbit = p.iterate(c(0.0, 0.0), 64).points;
        let (period, multiplier) = detect_cycle(&orbit, &p, DEFAULT_EPS).unwrap();
        assert_eq!(period, 2);
        assert!(multiplier.norm() < 1e-12);
    }

    #[test]
    fn detect_cycle_fixed_point() {
        let p = square();
        let orbit = p.iterate(c(0.5, 0.0), 64).points;
        let (period, multiplier) = detect_cycle(&orbit, &p, DEFAULT_EPS).unwrap();
        assert_eq!(period, 1);
        assert!(multiplier.norm() < 1e-12);
    }

    #[test]
    fn no_cycle_on_julia_set() {
        // e^{i} lies on the unit circle, the Julia set of z^2.
        let p = square();
        let orbit = p.iterate(Complex64::from_polar(1.0, 1.0), 256).points;
        assert_eq!(detect_cycle(&orbit, &p, DEFAULT_EPS), None);
    }

    #[test]
    fn parabolic_multiplier_rejected() {
        // z^2 + z has a parabolic fixed point at 0. By 5e4 iterations the
        // trailing differences fall under eps, so the cycle scan fires and
        // must refuse the multiplier (modulus ~1).
        let p = MonicPoly::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let class = classify_point(&p, c(-0.01, 0.0), 50_000, DEFAULT_EPS);
        assert_eq!(class.verdict, ScalarVerdict::BoundedNonAttracting);
        let orbit = p.iterate(c(-0.01, 0.0), 50_000).points;
        let last = orbit[orbit.len() - 1];
        let prev = orbit[orbit.len() - 2];
        assert!((last - prev).norm() < DEFAULT_EPS, "scan precondition");
        assert_eq!(detect_cycle(&orbit, &p, DEFAULT_EPS), None);
    }

    #[test]
    fn proximity_on_unit_circle() {
        let p = square();
        assert!(julia_proximate(&p, c(1.0, 0.0), 1e-3, DEFAULT_MAX_ITER));
        assert!(!julia_proximate(&p, c(0.0, 0.0), 1e-3, DEFAULT_MAX_ITER));
        assert!(!julia_proximate(&p, c(5.0, 0.0), 1e-3, DEFAULT_MAX_ITER));
    }

    #[test]
    fn proximity_monotone_in_delta() {
        let p = square();
        for k in 0..40 {
            let z = Complex64::from_polar(0.9 + 0.01 * k as f64, 0.37 * k as f64);
            for delta in [1e-4, 1e-3, 1e-2] {
                if julia_proximate(&p, z, delta, DEFAULT_MAX_ITER) {
                    assert!(
                        julia_proximate(&p, z, 2.0 * delta, DEFAULT_MAX_ITER),
                        "monotonicity failed at {z}, delta {delta}"
                    );
                }
            }
        }
    }

    #[test]
    fn power_map_verdicts_by_modulus() {
        // 1000 deterministic samples across the three regimes, M in {2,3,5}.
        for (mi, m) in [2usize, 3, 5].iter().enumerate() {
            let p = MonicPoly::power(*m).unwrap();
            let r = p.escape_radius();
            for k in 0..333 {
                let angle = 0.031 * (k + 1) as f64 + mi as f64;
                let inside = Complex64::from_polar(0.001 + 0.997 * (k as f64 / 333.0), angle);
                match classify_point(&p, inside, DEFAULT_MAX_ITER, DEFAULT_EPS).verdict {
                    ScalarVerdict::AttractingBasin { .. } => {}
                    other => panic!("|z|<1 should attract under z^{m}, got {other:?} at {inside}"),
                }
                let beyond = Complex64::from_polar(r + 0.01 + k as f64 * 0.01, angle);
                match classify_point(&p, beyond, DEFAULT_MAX_ITER, DEFAULT_EPS).verdict {
                    ScalarVerdict::BasinInfinity { escape_iter } => assert!(escape_iter <= 1),
                    other => panic!("|z|>R should escape at once, got {other:?}"),
                }
                let annulus =
                    Complex64::from_polar(1.0 + (0.002 + 0.9 * (k as f64 / 333.0)) * (r - 1.0), angle);
                match classify_point(&p, annulus, DEFAULT_MAX_ITER, DEFAULT_EPS).verdict {
                    ScalarVerdict::BasinInfinity { .. } => {}
                    other => panic!("1<|z|<=R should escape eventually, got {other:?} at {annulus}"),
                }
            }
        }
    }

    #[test]
    fn decided_verdicts_stable_under_budget_doubling() {
        let p = square_minus_one();
        for k in 0..60 {
            let z = c(-1.8 + 0.06 * k as f64, 0.013 * k as f64);
            let short = classify_point(&p, z, 500, DEFAULT_EPS);
            if matches!(
                short.verdict,
                ScalarVerdict::BasinInfinity { .. } | ScalarVerdict::AttractingBasin { .. }
            ) {
                let long = classify_point(&p, z, 1000, DEFAULT_EPS);
                assert_eq!(short.verdict, long.verdict, "verdict drifted at {z}");
            }
        }
    }

    #[test]
    fn perturbed_decisive_inside_basin() {
        match classify_perturbed(&square(), c(0.3, 0.0), 1e-3, DEFAULT_MAX_ITER, DEFAULT_EPS) {
            PerturbedVerdict::Decisive(class) => {
                assert!(matches!(class.verdict, ScalarVerdict::AttractingBasin { .. }));
            }
            other => panic!("expected decisive, got {other:?}"),
        }
    }
}
