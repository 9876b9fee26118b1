//! Seeded random source for instance generation.
//!
//! The generator is ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`),
//! seeded through `SeedableRng::seed_from_u64`, whose output stream is
//! specified and stable across platforms. Gaussian samples come from
//! `rand_distr::StandardNormal` (ziggurat), drawn in column-major order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{Matrix, Vector};

pub type BenchRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> BenchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut BenchRng, n: usize) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Column-major Gaussian matrix.
pub fn gaussian_matrix(rng: &mut BenchRng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_iterator(
        rows,
        cols,
        (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)),
    )
}

/// Uniform point on the unit sphere of ℝⁿ (normalized Gaussian).
pub fn unit_sphere(rng: &mut BenchRng, n: usize) -> Vector {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Uniform integer in `lo..=hi`.
pub fn uniform_int(rng: &mut BenchRng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a = gaussian_matrix(&mut rng_from_seed(9), 4, 3);
        let b = gaussian_matrix(&mut rng_from_seed(9), 4, 3);
        assert_eq!(a, b);
        let c = gaussian_matrix(&mut rng_from_seed(10), 4, 3);
        assert_ne!(a, c);
    }

    #[test]
    fn sphere_points_have_unit_norm() {
        let mut rng = rng_from_seed(1);
        for _ in 0..20 {
            assert!((unit_sphere(&mut rng, 5).norm() - 1.0).abs() < 1e-14);
        }
    }
}
