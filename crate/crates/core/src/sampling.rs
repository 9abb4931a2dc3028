//! Random states and directions for property checks.

use crate::linalg::{ComplexMatrix, C64};
use crate::observable::BlochDirection;
use crate::state::DensityMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

fn gaussian_vector(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Uniformly distributed (Haar) pure state.
pub fn random_pure_state(dims: &[usize], rng: &mut impl Rng) -> DensityMatrix {
    let d = dims.iter().product();
    DensityMatrix::pure(&gaussian_vector(d, rng), dims.to_vec()).expect("nonzero Gaussian vector")
}

/// `G G† / Tr(G G†)` with `G` a `d × rank` complex Ginibre matrix.
pub fn random_mixed_state(dims: &[usize], rank: usize, rng: &mut impl Rng) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let mut m = ComplexMatrix::zeros(d);
    for _ in 0..rank.max(1) {
        m = &m + &ComplexMatrix::outer(&gaussian_vector(d, rng));
    }
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr), dims.to_vec()).expect("Ginibre states are valid")
}

/// Uniform direction on the Bloch sphere.
pub fn random_direction(rng: &mut impl Rng) -> BlochDirection {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    BlochDirection::new((1.0 - 2.0 * u).acos(), 2.0 * PI * v).expect("angles in range")
}
