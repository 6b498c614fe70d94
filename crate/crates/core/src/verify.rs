//! Seeded randomized cross-check of the spectral classifier against direct
//! orbit behavior: sample matrices whose eigenvalues classify decisively,
//! then demand that the spectral verdict and the observed orbit agree.
//!
//! Trials run in parallel with per-trial random streams, so reports are
//! reproducible from the seed regardless of the worker count.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cmatrix::CMatrix;
use crate::matrix_dyn::{
    bounded_orbit, classify_matrix_spectral, ClassifyParams, MatrixVerdict, OrbitBehavior,
    DEFAULT_ORBIT_BOUND,
};
use crate::poly::MonicPoly;
use crate::scalar_dyn::{self, PerturbedVerdict};

/// Harness configuration; the defaults match the CLI.
#[derive(Debug, Clone)]
pub struct TheoremConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Rejection margin: sampled eigenvalues must classify decisively even
    /// when perturbed by this radius.
    pub prox_margin: f64,
    pub max_iter: usize,
    pub bound: f64,
}

impl TheoremConfig {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        TheoremConfig {
            n,
            trials,
            seed,
            prox_margin: 0.05,
            max_iter: scalar_dyn::DEFAULT_MAX_ITER,
            bound: DEFAULT_ORBIT_BOUND,
        }
    }
}

/// One failed trial, with everything needed to reproduce it.
#[derive(Debug, Clone)]
pub struct Disagreement {
    pub trial: usize,
    pub matrix: CMatrix,
    pub sampled_eigenvalues: Vec<Complex64>,
    pub expected_escape: bool,
    pub spectral_verdict: String,
    pub orbit: OrbitBehavior,
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub trials: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
    pub seed: u64,
}

/// Runs the harness: per trial, sample eigenvalues from decisive regions,
/// pick a random Jordan structure, conjugate by a well-conditioned matrix,
/// and compare the spectral verdict with the direct orbit.
pub fn verify_theorem(p: &MonicPoly, cfg: &TheoremConfig) -> TheoremReport {
    let outcomes: Vec<Option<Disagreement>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(p, cfg, trial))
        .collect();
    let disagreements: Vec<Disagreement> = outcomes.into_iter().flatten().collect();
    TheoremReport {
        trials: cfg.trials,
        agreements: cfg.trials - disagreements.len(),
        disagreements,
        seed: cfg.seed,
    }
}

fn run_trial(p: &MonicPoly, cfg: &TheoremConfig, trial: usize) -> Option<Disagreement> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1 + trial as u64);

    let block_sizes = random_partition(&mut rng, cfg.n);
    let mut sampled = Vec::with_capacity(block_sizes.len());
    let mut expected_escape = false;
    let mut jordan: Option<CMatrix> = None;
    for &size in &block_sizes {
        let (value, escaping) = sample_decisive_eigenvalue(p, &mut rng, cfg.prox_margin, cfg.max_iter);
        expected_escape |= escaping;
        sampled.push(value);
        let block = CMatrix::jordan_block(value, size);
        jordan = Some(match jordan {
            None => block,
            Some(acc) => acc.direct_sum(&block),
        });
    }
    let jordan = jordan.expect("at least one block");
    let q = random_conditioned(&mut rng, cfg.n, 10.0);
    let x = jordan.conjugate(&q).expect("conditioned conjugator is invertible");

    let params = ClassifyParams { max_iter: cfg.max_iter, ..ClassifyParams::default() };
    let spectral = classify_matrix_spectral(p, &x, &params);
    let orbit = bounded_orbit(p, &x, cfg.max_iter, cfg.bound);

    let agree = match &spectral {
        Ok(mc) => {
            let fatou = matches!(mc.verdict, MatrixVerdict::Fatou { .. });
            let orbit_matches = if expected_escape {
                matches!(orbit, OrbitBehavior::Escaped { .. })
            } else {
                orbit == OrbitBehavior::Bounded
            };
            fatou && orbit_matches
        }
        Err(_) => false,
    };
    if agree {
        None
    } else {
        Some(Disagreement {
            trial,
            matrix: x,
            sampled_eigenvalues: sampled,
            expected_escape,
            spectral_verdict: match spectral {
                Ok(mc) => format!("{:?}", mc.verdict),
                Err(e) => format!("error: {e}"),
            },
            orbit,
        })
    }
}

/// Random composition of `n` into block sizes.
pub fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut remaining = n;
    let mut parts = Vec::new();
    while remaining > 0 {
        let part = rng.gen_range(1..=remaining);
        parts.push(part);
        remaining -= part;
    }
    parts
}

/// Rejection-samples an eigenvalue whose perturbed classification is
/// decisive at the margin; returns the value and whether it escapes.
pub fn sample_decisive_eigenvalue(
    p: &MonicPoly,
    rng: &mut ChaCha8Rng,
    margin: f64,
    max_iter: usize,
) -> (Complex64, bool) {
    let radius = p.escape_radius() * 1.1;
    for _ in 0..100_000 {
        let re = rng.gen_range(-radius..radius);
        let im = rng.gen_range(-radius..radius);
        let z = Complex64::new(re, im);
        if z.norm() > radius {
            continue;
        }
        if let PerturbedVerdict::Decisive(class) =
            scalar_dyn::classify_perturbed(p, z, margin, max_iter, scalar_dyn::DEFAULT_EPS)
        {
            return (z, class.verdict.is_escape());
        }
    }
    unreachable!("decisive regions have positive measure for these polynomials");
}

/// Random unitary via modified Gram–Schmidt on a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        let mut ok = true;
        for j in 0..n {
            for i in 0..j {
                let proj: Complex64 = (0..n).map(|k| cols[i][k].conj() * cols[j][k]).sum();
                for k in 0..n {
                    let sub = proj * cols[i][k];
                    cols[j][k] -= sub;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for k in 0..n {
                cols[j][k] /= norm;
            }
        }
        if !ok {
            continue;
        }
        let mut q = CMatrix::zeros(n);
        for j in 0..n {
            for i in 0..n {
                q[(i, j)] = cols[j][i];
            }
        }
        return q;
    }
}

/// `U diag(s) V` with random unitaries and log-uniform singular values in
/// `[1/sqrt(cond), sqrt(cond)]`, so the condition number never exceeds
/// `cond`.
pub fn random_conditioned(rng: &mut ChaCha8Rng, n: usize, cond: f64) -> CMatrix {
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let half_span = 0.5 * cond.ln();
    let singular: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new((rng.gen_range(-1.0..1.0) * half_span).exp(), 0.0))
        .collect();
    u.mat_mul(&CMatrix::diag(&singular))
        .and_then(|m| m.mat_mul(&v))
        .expect("dimensions agree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_sums_to_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=6 {
            for _ in 0..50 {
                let parts = random_partition(&mut rng, n);
                assert_eq!(parts.iter().sum::<usize>(), n);
                assert!(parts.iter().all(|&p| p >= 1));
            }
        }
    }

    #[test]
    fn unitary_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=5 {
            let q = random_unitary(&mut rng, n);
            let mut qh = CMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    qh[(i, j)] = q[(j, i)].conj();
                }
            }
            let prod = qh.mat_mul(&q).unwrap();
            assert!(
                crate::cmatrix::rel_frobenius_distance(&prod, &CMatrix::identity(n)) < 1e-12
            );
        }
    }

    #[test]
    fn conditioned_matrices_invert_stably() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q = random_conditioned(&mut rng, 3, 100.0);
            let inv = q.inverse().unwrap();
            let prod = q.mat_mul(&inv).unwrap();
            assert!(
                crate::cmatrix::rel_frobenius_distance(&prod, &CMatrix::identity(3)) < 1e-10
            );
        }
    }

    #[test]
    fn harness_smoke_agreement() {
        let p = MonicPoly::power(2).unwrap();
        let report = verify_theorem(&p, &TheoremConfig::new(2, 100, 7));
        assert_eq!(report.agreements, 100, "disagreements: {:?}", report.disagreements);
    }

    #[test]
    fn forced_structures_behave_as_classified() {
        use crate::matrix_dyn::{
            bounded_orbit, classify_matrix_spectral, ClassifyParams, MatrixVerdict, OrbitBehavior,
        };
        use num_complex::Complex64;
        let p = MonicPoly::power(2).unwrap();
        let params = ClassifyParams::default();

        // A 2x2 block at an interior eigenvalue: Fatou and bounded.
        let block = CMatrix::jordan_block(Complex64::new(0.5, 0.0), 2);
        let mc = classify_matrix_spectral(&p, &block, &params).unwrap();
        assert!(matches!(mc.verdict, MatrixVerdict::Fatou { .. }));
        assert_eq!(bounded_orbit(&p, &block, 2000, 1e8), OrbitBehavior::Bounded);

        // An eigenvalue of modulus 3: Fatou through uniform escape, and the
        // orbit does escape.
        let mixed = CMatrix::diag(&[Complex64::new(3.0, 0.0), Complex64::new(0.5, 0.0)]);
        let mc = classify_matrix_spectral(&p, &mixed, &params).unwrap();
        assert!(matches!(
            mc.verdict,
            MatrixVerdict::Fatou { reason: crate::matrix_dyn::FatouReason::UniformEscape }
        ));
        assert!(matches!(
            bounded_orbit(&p, &mixed, 2000, 1e8),
            OrbitBehavior::Escaped { .. }
        ));
    }

    #[test]
    fn harness_is_reproducible() {
        let p = MonicPoly::power(2).unwrap();
        let cfg = TheoremConfig::new(3, 10, 99);
        let a = verify_theorem(&p, &cfg);
        let b = verify_theorem(&p, &cfg);
        assert_eq!(a.agreements, b.agreements);
        assert_eq!(a.disagreements.len(), b.disagreements.len());
    }
}
