//! Unrevealed measurements, irreality and contextual realism-based nonlocality.
//!
//! These are the dense reference implementations: every map is applied as an
//! explicit matrix sum and every entropy comes from a full Hermitian
//! eigensolve. The optimizer uses a specialised qubit kernel and is checked
//! against this module.

use crate::error::{Error, Result};
use crate::linalg::{embed_site, ComplexMatrix};
use crate::observable::{ProjectiveObservable, Setting};
use crate::state::DensityMatrix;

/// Values in `[-NEGATIVITY_SLACK, 0)` are rounding noise and clamp to zero.
pub const NEGATIVITY_SLACK: f64 = 1e-10;

/// Index of a subsystem in a state's `dims` (A = 0, B = 1, C = 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteIndex(pub usize);

impl SiteIndex {
    pub const A: Self = Self(0);
    pub const B: Self = Self(1);
    pub const C: Self = Self(2);
}

fn check_site(rho: &DensityMatrix, obs: &ProjectiveObservable, site: SiteIndex) -> Result<()> {
    let dims = rho.dims();
    if site.0 >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "site {} out of range for {} sites",
            site.0,
            dims.len()
        )));
    }
    if obs.site_dim() != dims[site.0] {
        return Err(Error::InvalidArgument(format!(
            "observable of dimension {} on site {} of dimension {}",
            obs.site_dim(),
            site.0,
            dims[site.0]
        )));
    }
    Ok(())
}

/// `Φ(ρ) = Σ_a (P_a)_site ρ (P_a)_site`.
pub fn dephase(rho: &DensityMatrix, obs: &ProjectiveObservable, site: SiteIndex) -> Result<DensityMatrix> {
    check_site(rho, obs, site)?;
    let dims = rho.dims();
    let mut out = ComplexMatrix::zeros(rho.dim());
    for p in obs.projectors() {
        let e = embed_site(p, dims, site.0)?;
        out = &out + &e.matmul(rho.matrix()).matmul(&e);
    }
    Ok(DensityMatrix::from_trusted(out, dims.to_vec()))
}

/// Sequential dephasing over several sites. Maps on distinct sites commute.
pub fn dephase_multi(
    rho: &DensityMatrix,
    obs_by_site: &[(SiteIndex, &ProjectiveObservable)],
) -> Result<DensityMatrix> {
    let mut out = rho.clone();
    for (site, obs) in obs_by_site {
        out = dephase(&out, obs, *site)?;
    }
    Ok(out)
}

fn clamp_nonnegative(value: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NEGATIVITY_SLACK {
        Ok(0.0)
    } else {
        Err(Error::InternalConsistency(format!("{what} is negative: {value:e}")))
    }
}

/// `𝔍(ρ) = S(Φ(ρ)) − S(ρ)`.
pub fn irreality(rho: &DensityMatrix, obs: &ProjectiveObservable, site: SiteIndex) -> Result<f64> {
    let value = dephase(rho, obs, site)?.entropy()? - rho.entropy()?;
    clamp_nonnegative(value, "irreality")
}

/// The four entropies that make up a contextual nonlocality value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaBreakdown {
    /// `S(ρ)`
    pub state: f64,
    /// `S(Φ_target ρ)`
    pub target: f64,
    /// `S(Φ_remote ρ)`, all non-target sites dephased
    pub remote: f64,
    /// `S(Φ_all ρ)`
    pub all: f64,
    /// `target + remote − all − state`, clamped at zero
    pub eta: f64,
}

/// A state together with its cached entropy, for evaluating many contexts.
#[derive(Debug, Clone)]
pub struct RealismContext {
    rho: DensityMatrix,
    entropy: f64,
}

impl RealismContext {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        let entropy = rho.entropy()?;
        Ok(Self { rho, entropy })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    /// Contextual nonlocality of the `target` site's observable given
    /// unrevealed measurements of every other observable in `setting`.
    pub fn breakdown(&self, target: SiteIndex, setting: &Setting) -> Result<EtaBreakdown> {
        let n = self.rho.num_sites();
        if setting.len() != n {
            return Err(Error::InvalidArgument(format!(
                "setting has {} observables for a {n}-site state",
                setting.len()
            )));
        }
        if target.0 >= n {
            return Err(Error::InvalidArgument(format!("target site {} out of range", target.0)));
        }
        let obs = setting.observables();
        let remote: Vec<(SiteIndex, &ProjectiveObservable)> = (0..n)
            .filter(|&s| s != target.0)
            .map(|s| (SiteIndex(s), &obs[s]))
            .collect();
        let phi_target = dephase(&self.rho, &obs[target.0], target)?;
        let phi_remote = dephase_multi(&self.rho, &remote)?;
        let phi_all = dephase(&phi_remote, &obs[target.0], target)?;
        let s_target = phi_target.entropy()?;
        let s_remote = phi_remote.entropy()?;
        let s_all = phi_all.entropy()?;
        let raw = s_target + s_remote - s_all - self.entropy;
        Ok(EtaBreakdown {
            state: self.entropy,
            target: s_target,
            remote: s_remote,
            all: s_all,
            eta: clamp_nonnegative(raw, "contextual nonlocality")?,
        })
    }

    pub fn eta(&self, target: SiteIndex, setting: &Setting) -> Result<f64> {
        Ok(self.breakdown(target, setting)?.eta)
    }
}

/// `η_{A|B}(ρ) = 𝔍_A(ρ) − 𝔍_A(Φ_B ρ)` for a two-site state.
pub fn contextual_nl_2(
    rho: &DensityMatrix,
    a: &ProjectiveObservable,
    b: &ProjectiveObservable,
) -> Result<f64> {
    if rho.num_sites() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected a two-site state, got {} sites",
            rho.num_sites()
        )));
    }
    let setting = Setting::new(vec![a.clone(), b.clone()])?;
    RealismContext::new(rho.clone())?.eta(SiteIndex::A, &setting)
}

/// `η_{T|R,Q}(ρ)` for a three-site state with target site `T`.
pub fn contextual_nl_3(rho: &DensityMatrix, target: SiteIndex, setting: &Setting) -> Result<f64> {
    if rho.num_sites() != 3 {
        return Err(Error::InvalidArgument(format!(
            "expected a three-site state, got {} sites",
            rho.num_sites()
        )));
    }
    RealismContext::new(rho.clone())?.eta(target, setting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{shannon_entropy, ProbabilityVector};
    use crate::state::{cc_state, ghz_state, w_state};
    use std::f64::consts::LN_2;

    fn z() -> ProjectiveObservable {
        ProjectiveObservable::sigma_z()
    }

    fn x() -> ProjectiveObservable {
        ProjectiveObservable::sigma_x()
    }

    fn y() -> ProjectiveObservable {
        ProjectiveObservable::sigma_y()
    }

    fn setting(obs: [ProjectiveObservable; 3]) -> Setting {
        Setting::new(obs.to_vec()).unwrap()
    }

    fn ghz_diagonal() -> ComplexMatrix {
        let mut d = [0.0; 8];
        d[0] = 0.5;
        d[7] = 0.5;
        ComplexMatrix::from_real_diagonal(&d)
    }

    #[test]
    fn dephase_leaves_diagonal_state_alone() {
        let rho = DensityMatrix::new(ghz_diagonal(), vec![2, 2, 2]).unwrap();
        for s in 0..3 {
            let out = dephase(&rho, &z(), SiteIndex(s)).unwrap();
            assert!(out.matrix().approx_eq(rho.matrix(), 1e-15));
        }
    }

    #[test]
    fn dephase_ghz_on_a() {
        let out = dephase(&ghz_state(), &z(), SiteIndex::A).unwrap();
        assert!(out.matrix().approx_eq(&ghz_diagonal(), 1e-15));
    }

    #[test]
    fn dephase_is_idempotent() {
        let rho = w_state();
        let once = dephase(&rho, &x(), SiteIndex::B).unwrap();
        let twice = dephase(&once, &x(), SiteIndex::B).unwrap();
        assert!(once.matrix().approx_eq(twice.matrix(), 1e-14));
    }

    #[test]
    fn dephase_rejects_mismatched_site() {
        let qutrit = ProjectiveObservable::computational(3);
        assert!(dephase(&ghz_state(), &qutrit, SiteIndex::A).is_err());
        assert!(dephase(&ghz_state(), &z(), SiteIndex(3)).is_err());
    }

    #[test]
    fn remote_dephasing_matches_local_on_ghz() {
        let zz = dephase_multi(&ghz_state(), &[(SiteIndex::B, &z()), (SiteIndex::C, &z())]).unwrap();
        let a = dephase(&ghz_state(), &z(), SiteIndex::A).unwrap();
        assert!(zz.matrix().approx_eq(a.matrix(), 1e-15));
    }

    #[test]
    fn irreality_examples() {
        let i = irreality(&ghz_state(), &z(), SiteIndex::A).unwrap();
        assert!((i - LN_2).abs() < 1e-12);
        let white = DensityMatrix::maximally_mixed(vec![2, 2, 2]).unwrap();
        assert!(irreality(&white, &x(), SiteIndex::A).unwrap().abs() < 1e-12);
        let real = dephase(&w_state(), &y(), SiteIndex::C).unwrap();
        assert!(irreality(&real, &y(), SiteIndex::C).unwrap().abs() < 1e-10);
    }

    #[test]
    fn eta2_classical_state() {
        for p in [vec![0.5, 0.5], vec![0.8, 0.2]] {
            let p = ProbabilityVector::new(p).unwrap();
            let cc = cc_state(&p, &z(), &z()).unwrap();
            let conj = contextual_nl_2(&cc, &x(), &x()).unwrap();
            assert!((conj - shannon_entropy(&p)).abs() < 1e-12);
            assert!(contextual_nl_2(&cc, &z(), &z()).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn eta2_product_state_is_zero() {
        let white = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let half = |o: &ProjectiveObservable, w: f64| {
            let pure = DensityMatrix::new(o.projectors()[0].clone(), vec![2]).unwrap();
            pure.mix(w, &white).unwrap()
        };
        let prod = half(&x(), 0.6).tensor(&half(&y(), 0.3));
        for (a, b) in [(z(), z()), (x(), y()), (y(), x())] {
            assert!(contextual_nl_2(&prod, &a, &b).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn eta3_ghz_optimal_settings() {
        let ghz = RealismContext::new(ghz_state()).unwrap();
        for s in [[z(), z(), z()], [x(), x(), x()], [y(), y(), x()], [y(), x(), y()], [x(), y(), y()]] {
            assert!((ghz.eta(SiteIndex::A, &setting(s)).unwrap() - LN_2).abs() < 1e-9);
        }
        let w = contextual_nl_3(&w_state(), SiteIndex::A, &setting([z(), z(), z()])).unwrap();
        assert!((w - 0.6364).abs() < 5e-4);
        let h = -(1.0f64 / 3.0) * (1.0f64 / 3.0).ln() - (2.0f64 / 3.0) * (2.0f64 / 3.0).ln();
        assert!((w - h).abs() < 1e-12);
    }

    #[test]
    fn eta3_requires_matching_setting() {
        let s = Setting::new(vec![z(), z()]).unwrap();
        assert!(contextual_nl_3(&ghz_state(), SiteIndex::A, &s).is_err());
        assert!(contextual_nl_3(&ghz_state(), SiteIndex(3), &setting([z(), z(), z()])).is_err());
    }

    #[test]
    fn breakdown_reports_entropies() {
        let b = RealismContext::new(ghz_state())
            .unwrap()
            .breakdown(SiteIndex::A, &setting([z(), z(), z()]))
            .unwrap();
        assert!(b.state.abs() < 1e-12);
        assert!((b.target - LN_2).abs() < 1e-12);
        assert!((b.remote - LN_2).abs() < 1e-12);
        assert!((b.all - LN_2).abs() < 1e-12);
    }
}
