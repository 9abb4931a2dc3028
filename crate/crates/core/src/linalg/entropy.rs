//! Entropies in nats.

use super::{hermitian_eigenvalues, ComplexMatrix};
use crate::error::{Error, Result};

/// Eigenvalues (or probabilities) below this are treated as invalid rather
/// than rounding noise.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-10;

const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// `x ln x` with the convention `0 ln 0 = 0`. Nonpositive inputs map to zero.
#[inline]
pub fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// A finite probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument("empty probability vector".into()));
        }
        if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "probabilities must be finite and nonnegative: {p:?}"
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::InvalidArgument(format!("probabilities sum to {sum}")));
        }
        Ok(Self(p))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    -p.0.iter().map(|&x| xlnx(x)).sum::<f64>()
}

/// `-Σ λ ln λ` over a spectrum, clamping `[-1e-10, 0)` to zero.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -NEGATIVITY_TOLERANCE {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: l });
        }
        s -= xlnx(l.min(1.0));
    }
    Ok(s)
}

pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let spectrum = hermitian_eigenvalues(rho)?;
    entropy_of_spectrum(spectrum.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, C64};
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    #[test]
    fn shannon_examples() {
        let half = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        assert!((shannon_entropy(&half) - LN_2).abs() < 1e-15);
        let certain = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(shannon_entropy(&certain), 0.0);
        let third = ProbabilityVector::uniform(3);
        assert!((shannon_entropy(&third) - 3f64.ln()).abs() < 1e-15);
        assert!((shannon_entropy(&third) - 1.0986).abs() < 1e-4);
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![-0.1, 1.1]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        assert!(ProbabilityVector::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn von_neumann_examples() {
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[0] = C64::new(0.6, 0.0);
        v[5] = C64::new(0.0, 0.8);
        let pure = ComplexMatrix::outer(&v);
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);

        let mixed = ComplexMatrix::identity(8).scale_real(0.125);
        assert!((von_neumann_entropy(&mixed).unwrap() - 3.0 * LN_2).abs() < 1e-14);
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0794).abs() < 1e-4);

        let cc = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!((von_neumann_entropy(&cc).unwrap() - LN_2).abs() < 1e-14);
    }

    #[test]
    fn clamps_noise_but_rejects_negative_states() {
        let noisy = ComplexMatrix::from_real_diagonal(&[1.0 + 5e-11, -5e-11]);
        assert!(von_neumann_entropy(&noisy).unwrap().abs() < 1e-9);
        let bad = ComplexMatrix::from_real_diagonal(&[1.1, -0.1]);
        assert!(matches!(
            von_neumann_entropy(&bad),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    fn diagonal_distribution() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 1..9).prop_filter_map("nonzero mass", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-3).then(|| w.iter().map(|x| x / s).collect())
        })
    }

    proptest! {
        #[test]
        fn diagonal_state_entropy_is_shannon(p in diagonal_distribution()) {
            let rho = ComplexMatrix::from_real_diagonal(&p);
            let s = von_neumann_entropy(&rho).unwrap();
            let h = -p.iter().map(|&x| xlnx(x)).sum::<f64>();
            prop_assert!((s - h).abs() < 1e-12);
        }

        #[test]
        fn entropy_bounded_by_log_dim(p in diagonal_distribution(), q in diagonal_distribution()) {
            let rho = kron(&ComplexMatrix::from_real_diagonal(&p), &ComplexMatrix::from_real_diagonal(&q));
            let s = von_neumann_entropy(&rho).unwrap();
            prop_assert!(s >= -1e-12);
            prop_assert!(s <= (rho.dim() as f64).ln() + 1e-12);
        }
    }
}
