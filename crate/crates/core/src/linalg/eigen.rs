use super::{ComplexMatrix, C64, MATRIX_TOLERANCE};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Real spectrum of a Hermitian matrix, sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSpectrum {
    eigenvalues: Vec<f64>,
}

impl HermitianSpectrum {
    pub(crate) fn from_unsorted(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// Full decomposition `m = V diag(λ) V†`; eigenvectors are the columns of `V`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub spectrum: HermitianSpectrum,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_real_diagonal(self.spectrum.eigenvalues());
        d.conjugate_by(&self.eigenvectors)
    }
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<C64> {
    let n = m.dim();
    DMatrix::from_row_slice(n, n, m.as_slice())
}

fn require_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_hermitian(MATRIX_TOLERANCE) {
        return Err(Error::InvalidOperator("matrix is not Hermitian".into()));
    }
    Ok(())
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<HermitianSpectrum> {
    require_hermitian(m)?;
    let values = to_nalgebra(m).symmetric_eigenvalues();
    Ok(HermitianSpectrum::from_unsorted(values.iter().copied().collect()))
}

pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    require_hermitian(m)?;
    let n = m.dim();
    let eig = SymmetricEigen::new(to_nalgebra(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = eig.eigenvectors[(row, k)];
        }
    }
    Ok(HermitianEigen {
        spectrum: HermitianSpectrum {
            eigenvalues: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        },
        eigenvectors: vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Haar-ish unitary via Gram-Schmidt on a random complex matrix.
    fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let mut cols: Vec<Vec<C64>> = Vec::new();
        while cols.len() < n {
            let mut v: Vec<C64> = (0..n)
                .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                cols.push(v.into_iter().map(|z| z / norm).collect());
            }
        }
        let mut u = ComplexMatrix::zeros(n);
        for (j, col) in cols.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                u[(i, j)] = z;
            }
        }
        u
    }

    #[test]
    fn pauli_z_spectrum() {
        let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert_eq!(hermitian_eigenvalues(&z).unwrap().eigenvalues(), &[1.0, -1.0]);
    }

    #[test]
    fn maximally_mixed_spectrum() {
        let m = ComplexMatrix::identity(8).scale_real(0.125);
        let s = hermitian_eigenvalues(&m).unwrap();
        assert_eq!(s.len(), 8);
        assert!(s.eigenvalues().iter().all(|&l| (l - 0.125).abs() < 1e-15));
    }

    #[test]
    fn ghz_projector_is_rank_one() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[0] = C64::new(h, 0.0);
        v[7] = C64::new(h, 0.0);
        let s = hermitian_eigenvalues(&ComplexMatrix::outer(&v)).unwrap();
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!(s.eigenvalues()[1..].iter().all(|l| l.abs() < 1e-14));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[&[ONE, ONE], &[C64::new(0.0, 0.0), ONE]]).unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(Error::InvalidOperator(_))
        ));
    }

    #[test]
    fn recovers_planted_spectrum_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 4, 8] {
            for _ in 0..20 {
                let mut diag: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
                let u = random_unitary(n, &mut rng);
                let m = ComplexMatrix::from_real_diagonal(&diag).conjugate_by(&u);
                let eig = hermitian_eigen(&m).unwrap();
                diag.sort_by(|a, b| b.total_cmp(a));
                for (got, want) in eig.spectrum.eigenvalues().iter().zip(&diag) {
                    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
                }
                assert!(eig.reconstruct().max_abs_diff(&m) < 1e-8);
                let values = hermitian_eigenvalues(&m).unwrap();
                assert_eq!(values.len(), n);
            }
        }
    }
}
