//! Density matrices and the state families used throughout the crate.

use crate::error::{Error, Result};
use crate::linalg::{
    check_dims, hermitian_eigenvalues, kron, kron_vec, partial_trace, von_neumann_entropy,
    ComplexMatrix, ProbabilityVector, C64,
};
use crate::observable::ProjectiveObservable;
use std::fmt;
use std::str::FromStr;

/// Tolerance for the Hermitian, unit-trace and positivity checks.
pub const STATE_TOLERANCE: f64 = 1e-10;

/// A validated density matrix on a composite system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Checks hermiticity, unit trace and positivity (eigenvalues ≥ −1e-10).
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(matrix.dim(), &dims)?;
        if !matrix.is_hermitian(STATE_TOLERANCE) {
            return Err(Error::InvalidOperator("density matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOLERANCE || tr.im.abs() > STATE_TOLERANCE {
            return Err(Error::InvalidArgument(format!("trace is {tr}, expected 1")));
        }
        let spectrum = hermitian_eigenvalues(&matrix)?;
        if spectrum.min() < -STATE_TOLERANCE {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: spectrum.min(),
            });
        }
        Ok(Self { matrix, dims })
    }

    /// For results of trace-preserving maps applied to a valid state.
    pub(crate) fn from_trusted(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert!(check_dims(matrix.dim(), &dims).is_ok());
        Self { matrix, dims }
    }

    /// `|ψ⟩⟨ψ|` after normalizing `ψ`.
    pub fn pure(ket: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        let normalized: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        check_dims(normalized.len(), &dims)?;
        Ok(Self::from_trusted(ComplexMatrix::outer(&normalized), dims))
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        check_dims(d, &dims)?;
        Ok(Self::from_trusted(
            ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            dims,
        ))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(&self.matrix)
    }

    /// Reduced state on the `keep` sites (ascending order).
    pub fn reduced(&self, keep: &[usize]) -> Result<Self> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let dims = kept.iter().map(|&s| self.dims[s]).collect();
        Ok(Self::from_trusted(m, dims))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        Self::from_trusted(kron(&self.matrix, &other.matrix), dims)
    }

    /// `w·self + (1−w)·other` for `w ∈ [0, 1]`.
    pub fn mix(&self, w: f64, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::InvalidDims(format!(
                "cannot mix {:?} with {:?}",
                self.dims, other.dims
            )));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidArgument(format!("mixing weight {w} outside [0, 1]")));
        }
        let m = &self.matrix.scale_real(w) + &other.matrix.scale_real(1.0 - w);
        Ok(Self::from_trusted(m, self.dims.clone()))
    }

    /// Reorders the subsystems: site `k` of the result is site `order[k]` of `self`.
    pub fn permute_sites(&self, order: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&s| s >= n || std::mem::replace(&mut seen[s], true)) {
            return Err(Error::InvalidArgument(format!("{order:?} is not a permutation")));
        }
        let new_dims: Vec<usize> = order.iter().map(|&s| self.dims[s]).collect();
        let d = self.dim();
        let old_index = |new_flat: usize| {
            let mut digits = vec![0; n];
            let mut rem = new_flat;
            for k in (0..n).rev() {
                digits[order[k]] = rem % new_dims[k];
                rem /= new_dims[k];
            }
            digits.iter().zip(&self.dims).fold(0, |acc, (&x, &dd)| acc * dd + x)
        };
        let map: Vec<usize> = (0..d).map(old_index).collect();
        let mut m = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.matrix[(map[i], map[j])];
            }
        }
        Ok(Self::from_trusted(m, new_dims))
    }
}

/// The two genuinely entangled three-qubit families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateFamily {
    Ghz,
    W,
}

impl StateFamily {
    pub fn name(&self) -> &'static str {
        match self {
            StateFamily::Ghz => "ghz",
            StateFamily::W => "w",
        }
    }

    pub fn pure_state(&self) -> DensityMatrix {
        match self {
            StateFamily::Ghz => ghz_state(),
            StateFamily::W => w_state(),
        }
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(StateFamily::Ghz),
            "w" => Ok(StateFamily::W),
            other => Err(Error::InvalidArgument(format!("unknown state family '{other}'"))),
        }
    }
}

/// A family member with white noise weight `𝔫 ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseFamilySpec {
    family: StateFamily,
    noise: f64,
}

impl NoiseFamilySpec {
    pub fn new(family: StateFamily, noise: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&noise) {
            return Err(Error::InvalidArgument(format!("noise {noise} outside [0, 1]")));
        }
        Ok(Self { family, noise })
    }

    pub fn family(&self) -> StateFamily {
        self.family
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }
}

/// Schmidt coefficients `ξ` of `Σ √ξ_i |i i i⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpec {
    xi: ProbabilityVector,
}

impl SchmidtSpec {
    pub fn new(xi: ProbabilityVector) -> Self {
        Self { xi }
    }

    pub fn xi(&self) -> &ProbabilityVector {
        &self.xi
    }
}

fn basis_ket(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[index] = C64::new(1.0, 0.0);
    v
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz_state() -> DensityMatrix {
    let mut v = vec![C64::new(0.0, 0.0); 8];
    v[0b000] = C64::new(1.0, 0.0);
    v[0b111] = C64::new(1.0, 0.0);
    DensityMatrix::pure(&v, vec![2, 2, 2]).expect("valid ket")
}

/// `(|100⟩ + |010⟩ + |001⟩)/√3`.
pub fn w_state() -> DensityMatrix {
    let mut v = vec![C64::new(0.0, 0.0); 8];
    v[0b100] = C64::new(1.0, 0.0);
    v[0b010] = C64::new(1.0, 0.0);
    v[0b001] = C64::new(1.0, 0.0);
    DensityMatrix::pure(&v, vec![2, 2, 2]).expect("valid ket")
}

/// `𝔫·𝟙/8 + (1−𝔫)|Ψ⟩⟨Ψ|`.
pub fn noisy_state(spec: NoiseFamilySpec) -> DensityMatrix {
    let white = DensityMatrix::maximally_mixed(vec![2, 2, 2]).expect("qubit dims");
    white
        .mix(spec.noise, &spec.family.pure_state())
        .expect("noise validated by the spec")
}

fn rank_one_vector(p: &ComplexMatrix) -> Result<Vec<C64>> {
    // Column with the largest diagonal weight spans the range of a rank-1 projector.
    let tr = p.trace().re;
    if (tr - 1.0).abs() > STATE_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "classical bases need rank-1 projectors, found trace {tr}"
        )));
    }
    let d = p.dim();
    let k = (0..d)
        .max_by(|&a, &b| p[(a, a)].re.total_cmp(&p[(b, b)].re))
        .expect("nonempty");
    let scale = p[(k, k)].re.sqrt();
    Ok((0..d).map(|i| p[(i, k)] / scale).collect())
}

/// `Σ_i p_i ⊗_s P^{(s)}_i` built from rank-1 projectors of each site's basis.
pub fn classical_state(p: &ProbabilityVector, bases: &[&ProjectiveObservable]) -> Result<DensityMatrix> {
    if bases.is_empty() {
        return Err(Error::InvalidArgument("no bases given".into()));
    }
    let min_count = bases.iter().map(|b| b.projectors().len()).min().unwrap_or(0);
    if p.len() > min_count {
        return Err(Error::InvalidArgument(format!(
            "{} probabilities but only {min_count} projectors per site",
            p.len()
        )));
    }
    let dims: Vec<usize> = bases.iter().map(|b| b.site_dim()).collect();
    let total: usize = dims.iter().product();
    let mut m = ComplexMatrix::zeros(total);
    for (i, &pi) in p.as_slice().iter().enumerate() {
        let mut ket = vec![C64::new(1.0, 0.0)];
        for b in bases {
            ket = kron_vec(&ket, &rank_one_vector(&b.projectors()[i])?);
        }
        m = &m + &ComplexMatrix::outer(&ket).scale_real(pi);
    }
    Ok(DensityMatrix::from_trusted(m, dims))
}

/// Classical-classical state `Σ p_i A'_i ⊗ B'_i`.
pub fn cc_state(
    p: &ProbabilityVector,
    basis_a: &ProjectiveObservable,
    basis_b: &ProjectiveObservable,
) -> Result<DensityMatrix> {
    classical_state(p, &[basis_a, basis_b])
}

/// Classical-classical-classical state `Σ p_i A'_i ⊗ B'_i ⊗ C'_i`.
pub fn ccc_state(p: &ProbabilityVector, bases: [&ProjectiveObservable; 3]) -> Result<DensityMatrix> {
    classical_state(p, &bases)
}

/// `Σ √ξ_i |i⟩|i⟩|i⟩` in the computational basis; qubits unless more than two
/// coefficients are given.
pub fn schmidt_pure_state(spec: &SchmidtSpec) -> DensityMatrix {
    let xi = spec.xi.as_slice();
    let d = xi.len().max(2);
    let mut ket = vec![C64::new(0.0, 0.0); d * d * d];
    for (i, &w) in xi.iter().enumerate() {
        let basis = basis_ket(d, i);
        let term = kron_vec(&kron_vec(&basis, &basis), &basis);
        for (k, t) in ket.iter_mut().zip(term) {
            *k += t * w.sqrt();
        }
    }
    DensityMatrix::pure(&ket, vec![d, d, d]).expect("probability vector has unit mass")
}
