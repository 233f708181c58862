//! Seeded random matrices for sampled checks, trials and tests.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numkernel::{Field, Matrix, Scalar};

/// Environment variable that overrides the default seed of sampled checks.
pub const SEED_ENV: &str = "FRAMEFORGE_SEED";

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed from `FRAMEFORGE_SEED`, defaulting to 0 when unset or unparsable.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

pub fn normal_scalar<R: Rng + ?Sized>(rng: &mut R, field: Field) -> Scalar {
    let re: f64 = rng.sample(StandardNormal);
    match field {
        Field::Real => Scalar::new(re, 0.0),
        Field::Complex => Scalar::new(re, rng.sample(StandardNormal)),
    }
}

/// Matrix with independent standard normal entries.
pub fn normal_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    field: Field,
) -> Matrix {
    let mut data = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            data[(i, j)] = normal_scalar(rng, field);
        }
    }
    Matrix::from_dmatrix(data)
}

/// Random `rows x cols` matrix of exact rank `rank` (a product of normal factors).
pub fn low_rank_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    rank: usize,
    field: Field,
) -> Matrix {
    let left = normal_matrix(rng, rows, rank, field);
    let right = normal_matrix(rng, rank, cols, field);
    &left * &right
}
