//! Shared input builders for the criterion benchmarks.

use matjulia::wordmap::ExactMatrix;
use matjulia::{CMatrix, MonicPoly};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded_matrix(seed: u64, n: usize) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    CMatrix::new(n, data).expect("square data")
}

pub fn square_poly() -> MonicPoly {
    MonicPoly::power(2).expect("degree 2")
}

pub fn group_example_tuple() -> Vec<ExactMatrix> {
    vec![
        ExactMatrix::from_int_rows(&[&[1, 1], &[0, 1]]),
        ExactMatrix::from_int_rows(&[&[1, 0], &[1, 1]]),
    ]
}
