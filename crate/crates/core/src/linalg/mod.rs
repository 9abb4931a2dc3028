//! Dense complex matrices for small composite systems.
//!
//! Matrices are square and stored row-major. Subsystem bookkeeping follows the
//! usual Kronecker convention: for dims `[d0, d1, ..]` the leftmost site is the
//! slowest-varying index.

mod eigen;
mod entropy;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen, HermitianSpectrum};
pub use entropy::{
    entropy_of_spectrum, shannon_entropy, von_neumann_entropy, xlnx, ProbabilityVector,
};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub type C64 = Complex64;

/// Absolute entrywise tolerance used for matrix comparisons.
pub const MATRIX_TOLERANCE: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails unless the length is a
    /// nonzero perfect square.
    pub fn from_row_major(entries: Vec<C64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(Error::InvalidDims(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidDims("rows do not form a square matrix".into()));
        }
        Ok(Self {
            dim,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|` for an (unnormalized) vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (i..self.dim).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product; `a` is the slow index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out.data[(i * nb + k) * n + j * nb + l] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of vectors, used for building product kets.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

pub(crate) fn check_dims(dim: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidDims(format!("{dims:?}")));
    }
    let prod: usize = dims.iter().product();
    if prod != dim {
        return Err(Error::InvalidDims(format!(
            "product of {dims:?} is {prod}, matrix dimension is {dim}"
        )));
    }
    Ok(())
}

/// Splits a flat index into per-site digits (mixed radix, site 0 slowest).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for s in (0..dims.len()).rev() {
        out[s] = index % dims[s];
        index /= dims[s];
    }
}

fn flatten(digits: &[usize], dims: &[usize], sites: &[usize]) -> usize {
    sites.iter().fold(0, |acc, &s| acc * dims[s] + digits[s])
}

/// Reduced matrix on the `keep` sites; kept sites appear in ascending order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_dims(m.dim, dims)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() >= dims.len() || kept.iter().any(|&s| s >= dims.len()) {
        return Err(Error::InvalidDims(format!(
            "keep {keep:?} must be a nonempty proper subset of sites 0..{}",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !kept.contains(s)).collect();
    let out_dim: usize = kept.iter().map(|&s| dims[s]).product();
    let mut out = ComplexMatrix::zeros(out_dim);
    let n = m.dim;
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            if traced.iter().all(|&s| di[s] == dj[s]) {
                let r = flatten(&di, dims, &kept);
                let c = flatten(&dj, dims, &kept);
                out[(r, c)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Embeds a single-site operator as `𝟙 ⊗ … ⊗ op ⊗ … ⊗ 𝟙`.
pub fn embed_site(op: &ComplexMatrix, dims: &[usize], site: usize) -> Result<ComplexMatrix> {
    if site >= dims.len() {
        return Err(Error::InvalidDims(format!("site {site} out of range for {dims:?}")));
    }
    if op.dim != dims[site] {
        return Err(Error::InvalidDims(format!(
            "operator of dimension {} on site {site} of {dims:?}",
            op.dim
        )));
    }
    let mut acc: Option<ComplexMatrix> = None;
    for (s, &d) in dims.iter().enumerate() {
        let factor = if s == site {
            op.clone()
        } else {
            ComplexMatrix::identity(d)
        };
        acc = Some(match acc {
            None => factor,
            Some(a) => kron(&a, &factor),
        });
    }
    Ok(acc.expect("dims is nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn kron_identity_and_diagonal_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert!(kron(&i2, &i2).approx_eq(&ComplexMatrix::identity(4), 0.0));
        let zz = kron(&sigma_z(), &sigma_z());
        assert!(zz.approx_eq(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0, -1.0, 1.0]), 0.0));
    }

    #[test]
    fn kron_basis_bookkeeping() {
        let p0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        let m = kron(&p0, &p1);
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (1, 1) { 1.0 } else { 0.0 };
                assert_eq!(m[(i, j)], c(want));
            }
        }
    }

    #[test]
    fn kron_left_factor_is_slow_index() {
        let a = ComplexMatrix::from_rows(&[&[c(1.0), c(2.0)], &[c(3.0), c(4.0)]]).unwrap();
        let b = ComplexMatrix::from_rows(&[&[c(0.0), c(5.0)], &[c(6.0), c(7.0)]]).unwrap();
        let m = kron(&a, &b);
        // block (0,1) is 2·b
        assert_eq!(m[(0, 3)], c(10.0));
        assert_eq!(m[(1, 2)], c(12.0));
        // block (1,0) is 3·b
        assert_eq!(m[(3, 1)], c(21.0));
    }

    #[test]
    fn partial_trace_of_product() {
        let ra = ComplexMatrix::from_rows(&[
            &[c(0.7), C64::new(0.1, 0.2)],
            &[C64::new(0.1, -0.2), c(0.3)],
        ])
        .unwrap();
        let rb = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]);
        let rho = kron(&ra, &rb);
        let red_a = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        let red_b = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert!(red_a.approx_eq(&ra, 1e-14));
        assert!(red_b.approx_eq(&rb, 1e-14));
    }

    #[test]
    fn partial_trace_keeps_site_order() {
        let a = ComplexMatrix::from_real_diagonal(&[0.9, 0.1]);
        let b = ComplexMatrix::from_real_diagonal(&[0.6, 0.4]);
        let cc = ComplexMatrix::from_real_diagonal(&[0.2, 0.8]);
        let rho = kron(&kron(&a, &b), &cc);
        let ac = partial_trace(&rho, &[2, 2, 2], &[2, 0]).unwrap();
        assert!(ac.approx_eq(&kron(&a, &cc), 1e-14));
    }

    #[test]
    fn partial_trace_maximally_mixed() {
        let rho = ComplexMatrix::identity(8).scale_real(0.125);
        let b = partial_trace(&rho, &[2, 2, 2], &[1]).unwrap();
        assert!(b.approx_eq(&ComplexMatrix::identity(2).scale_real(0.5), 1e-15));
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let rho = ComplexMatrix::identity(8);
        assert!(matches!(
            partial_trace(&rho, &[2, 3], &[0]),
            Err(Error::InvalidDims(_))
        ));
        assert!(partial_trace(&rho, &[2, 2, 2], &[0, 1, 2]).is_err());
        assert!(partial_trace(&rho, &[2, 2, 2], &[]).is_err());
        assert!(partial_trace(&rho, &[2, 2, 2], &[3]).is_err());
    }

    #[test]
    fn embed_site_matches_kron() {
        let z = sigma_z();
        let e = embed_site(&z, &[2, 2, 2], 1).unwrap();
        let i2 = ComplexMatrix::identity(2);
        assert!(e.approx_eq(&kron(&kron(&i2, &z), &i2), 0.0));
        assert!(embed_site(&z, &[3, 2], 0).is_err());
    }

    #[test]
    fn from_row_major_requires_square() {
        assert!(ComplexMatrix::from_row_major(vec![ONE; 3]).is_err());
        assert_eq!(ComplexMatrix::from_row_major(vec![ONE; 9]).unwrap().dim(), 3);
    }
}
