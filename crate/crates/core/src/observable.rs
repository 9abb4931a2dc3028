//! Projective measurements and measurement settings.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, MATRIX_TOLERANCE};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

/// Unit vector on the Bloch sphere, `n = (sin θ cos φ, sin θ sin φ, cos θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDirection {
    theta: f64,
    phi: f64,
}

impl BlochDirection {
    pub const Z: Self = Self { theta: 0.0, phi: 0.0 };
    pub const X: Self = Self { theta: FRAC_PI_2, phi: 0.0 };
    pub const Y: Self = Self { theta: FRAC_PI_2, phi: FRAC_PI_2 };

    /// Requires `θ ∈ [0, π]` and `φ ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidArgument(format!(
                "Bloch angles out of range: theta={theta}, phi={phi}"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// Like [`BlochDirection::new`] but wraps `φ` into `[0, 2π)`.
    pub fn wrapped(theta: f64, phi: f64) -> Result<Self> {
        Self::new(theta, phi.rem_euclid(2.0 * PI))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Eigenprojectors `(𝟙 ± n·σ)/2`, `+` first, as plain 2×2 arrays.
    pub(crate) fn projector_pair(&self) -> [[[C64; 2]; 2]; 2] {
        let [x, y, z] = self.unit_vector();
        let plus = [
            [C64::new((1.0 + z) / 2.0, 0.0), C64::new(x / 2.0, -y / 2.0)],
            [C64::new(x / 2.0, y / 2.0), C64::new((1.0 - z) / 2.0, 0.0)],
        ];
        let minus = [
            [C64::new((1.0 - z) / 2.0, 0.0), C64::new(-x / 2.0, y / 2.0)],
            [C64::new(-x / 2.0, -y / 2.0), C64::new((1.0 + z) / 2.0, 0.0)],
        ];
        [plus, minus]
    }
}

impl fmt::Display for BlochDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(θ={:.6}π, φ={:.6}π)", self.theta / PI, self.phi / PI)
    }
}

/// A complete set of orthogonal projectors on one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveObservable {
    projectors: Vec<ComplexMatrix>,
    site_dim: usize,
}

impl ProjectiveObservable {
    /// Validates idempotence, hermiticity, mutual orthogonality and completeness.
    pub fn from_projectors(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let site_dim = projectors
            .first()
            .map(ComplexMatrix::dim)
            .ok_or_else(|| Error::InvalidOperator("observable needs at least one projector".into()))?;
        let tol = MATRIX_TOLERANCE;
        let mut total = ComplexMatrix::zeros(site_dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != site_dim {
                return Err(Error::InvalidOperator("projector dimensions differ".into()));
            }
            if !p.is_hermitian(tol) || !p.matmul(p).approx_eq(p, tol) {
                return Err(Error::InvalidOperator(format!("element {i} is not a projector")));
            }
            for q in &projectors[i + 1..] {
                if !p.matmul(q).approx_eq(&ComplexMatrix::zeros(site_dim), tol) {
                    return Err(Error::InvalidOperator("projectors are not orthogonal".into()));
                }
            }
            total = &total + p;
        }
        if !total.approx_eq(&ComplexMatrix::identity(site_dim), tol) {
            return Err(Error::InvalidOperator("projectors do not resolve the identity".into()));
        }
        Ok(Self {
            projectors,
            site_dim,
        })
    }

    /// Spin observable `n·σ` for a qubit.
    pub fn bloch(dir: BlochDirection) -> Self {
        let projectors = dir
            .projector_pair()
            .iter()
            .map(|p| ComplexMatrix::from_rows(&[&p[0], &p[1]]).expect("2x2"))
            .collect();
        Self {
            projectors,
            site_dim: 2,
        }
    }

    /// Rank-1 projectors onto the computational basis of a `d`-level site.
    pub fn computational(d: usize) -> Self {
        let projectors = (0..d)
            .map(|k| {
                let mut diag = vec![0.0; d];
                diag[k] = 1.0;
                ComplexMatrix::from_real_diagonal(&diag)
            })
            .collect();
        Self {
            projectors,
            site_dim: d,
        }
    }

    pub fn sigma_x() -> Self {
        Self::bloch(BlochDirection::X)
    }

    pub fn sigma_y() -> Self {
        Self::bloch(BlochDirection::Y)
    }

    pub fn sigma_z() -> Self {
        Self::bloch(BlochDirection::Z)
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn site_dim(&self) -> usize {
        self.site_dim
    }

    /// Same unordered projector set, i.e. the same unrevealed measurement.
    pub fn same_measurement(&self, other: &Self, tol: f64) -> bool {
        self.site_dim == other.site_dim
            && self.projectors.len() == other.projectors.len()
            && self
                .projectors
                .iter()
                .all(|p| other.projectors.iter().any(|q| p.approx_eq(q, tol)))
    }
}

/// One observable per site: the measurement context.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    observables: Vec<ProjectiveObservable>,
}

impl Setting {
    pub fn new(observables: Vec<ProjectiveObservable>) -> Result<Self> {
        if !(2..=3).contains(&observables.len()) {
            return Err(Error::InvalidArgument(format!(
                "settings cover 2 or 3 sites, got {}",
                observables.len()
            )));
        }
        Ok(Self { observables })
    }

    pub fn observables(&self) -> &[ProjectiveObservable] {
        &self.observables
    }

    pub fn site_dims(&self) -> Vec<usize> {
        self.observables.iter().map(|o| o.site_dim()).collect()
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }
}

/// A qubit setting given by one Bloch direction per site.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochSetting {
    directions: Vec<BlochDirection>,
}

impl BlochSetting {
    pub fn new(directions: Vec<BlochDirection>) -> Result<Self> {
        if !(2..=3).contains(&directions.len()) {
            return Err(Error::InvalidArgument(format!(
                "settings cover 2 or 3 sites, got {}",
                directions.len()
            )));
        }
        Ok(Self { directions })
    }

    pub fn directions(&self) -> &[BlochDirection] {
        &self.directions
    }

    pub fn setting(&self) -> Setting {
        Setting {
            observables: self
                .directions
                .iter()
                .map(|&d| ProjectiveObservable::bloch(d))
                .collect(),
        }
    }
}

impl fmt::Display for BlochSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.directions.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}
