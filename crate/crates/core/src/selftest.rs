//! Invariant checks run at reduced scale by the `selftest` command.
//!
//! Each check returns a [`CheckOutcome`]; none of them panic on failure.

use crate::linalg::{kron, partial_trace, shannon_entropy, ComplexMatrix, ProbabilityVector};
use crate::observable::{BlochSetting, ProjectiveObservable, Setting};
use crate::optimize::{e3, OptimizationStrategy, Optimizer};
use crate::realism::{dephase, dephase_multi, RealismContext, SiteIndex};
use crate::sampling::{random_direction, random_mixed_state, random_pure_state};
use crate::settings::{GridIncrement, SettingGrid};
use crate::state::{ccc_state, schmidt_pure_state, DensityMatrix, SchmidtSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Three-site setting count of the π/8 grid.
pub const FULL_GRID_SETTINGS: usize = 2_985_984;
/// Two-site setting count of the π/8 grid.
pub const FULL_GRID_SETTINGS_2: usize = 20_736;

const MAP_TOLERANCE: f64 = 1e-12;
const ENTROPY_SLACK: f64 = 1e-10;
const THEOREM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Debug, Clone, Default)]
pub struct SelftestReport {
    pub checks: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

type CheckResult = Result<String, String>;

fn timed(name: &'static str, f: impl FnOnce() -> CheckResult) -> CheckOutcome {
    let start = Instant::now();
    let r = f();
    let millis = start.elapsed().as_millis();
    match r {
        Ok(detail) => CheckOutcome {
            name,
            passed: true,
            detail,
            millis,
        },
        Err(detail) => CheckOutcome {
            name,
            passed: false,
            detail,
            millis,
        },
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn random_qubit_observable(rng: &mut ChaCha8Rng) -> ProjectiveObservable {
    ProjectiveObservable::bloch(random_direction(rng))
}

fn random_setting3(rng: &mut ChaCha8Rng) -> Setting {
    BlochSetting::new(vec![random_direction(rng), random_direction(rng), random_direction(rng)])
        .expect("three sites")
        .setting()
}

fn random_state3(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let rank = rng.random_range(1..=8);
    random_mixed_state(&[2, 2, 2], rank, rng)
}

/// Fails unless the grid counts are 144³ and 144².
pub fn verify_grid_count(three_site: usize, two_site: usize) -> CheckResult {
    if three_site != FULL_GRID_SETTINGS || two_site != FULL_GRID_SETTINGS_2 {
        return Err(format!(
            "grid sizes {three_site}/{two_site}, expected {FULL_GRID_SETTINGS}/{FULL_GRID_SETTINGS_2}"
        ));
    }
    Ok(format!("{three_site} three-site, {two_site} two-site settings"))
}

/// Fails unless `N₃ = E₃ = H(ξ)` in nats.
pub fn verify_schmidt_values(n3: f64, e3: f64, xi: &[f64]) -> CheckResult {
    let h: f64 = xi.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
    if (n3 - h).abs() > THEOREM_TOLERANCE || (e3 - h).abs() > THEOREM_TOLERANCE {
        return Err(format!("ξ={xi:?}: N₃={n3}, E₃={e3}, H={h}"));
    }
    Ok(format!("ξ={xi:?}: H={h:.9}"))
}

fn check_grid_cardinality() -> CheckResult {
    let three = SettingGrid::new(GridIncrement::PI_OVER_8, 3, true).map_err(err)?.len();
    let two = SettingGrid::new(GridIncrement::PI_OVER_8, 2, true).map_err(err)?.len();
    verify_grid_count(three, two)
}

fn check_partial_trace(rng: &mut ChaCha8Rng) -> CheckResult {
    for _ in 0..100 {
        let rho = random_state3(rng);
        for keep in [&[0usize][..], &[1], &[2], &[0, 1], &[0, 2], &[1, 2]] {
            let red = partial_trace(rho.matrix(), rho.dims(), keep).map_err(err)?;
            let diff = (red.trace() - rho.matrix().trace()).norm();
            if diff > MAP_TOLERANCE {
                return Err(format!("trace changed by {diff:e} keeping {keep:?}"));
            }
        }
    }
    Ok("100 states, 6 reductions each".into())
}

fn check_dephase_idempotence(rng: &mut ChaCha8Rng) -> CheckResult {
    for _ in 0..100 {
        let rho = random_state3(rng);
        let obs = random_qubit_observable(rng);
        let site = SiteIndex(rng.random_range(0..3));
        let once = dephase(&rho, &obs, site).map_err(err)?;
        let twice = dephase(&once, &obs, site).map_err(err)?;
        let diff = once.matrix().max_abs_diff(twice.matrix());
        if diff > MAP_TOLERANCE {
            return Err(format!("ΦΦ ≠ Φ by {diff:e}"));
        }
    }
    Ok("100 random (state, observable, site)".into())
}

fn check_commutation(rng: &mut ChaCha8Rng) -> CheckResult {
    for _ in 0..100 {
        let rho = random_state3(rng);
        let (b, c) = (random_qubit_observable(rng), random_qubit_observable(rng));
        let bc = dephase_multi(&rho, &[(SiteIndex::B, &b), (SiteIndex::C, &c)]).map_err(err)?;
        let cb = dephase_multi(&rho, &[(SiteIndex::C, &c), (SiteIndex::B, &b)]).map_err(err)?;
        let diff = bc.matrix().max_abs_diff(cb.matrix());
        if diff > MAP_TOLERANCE {
            return Err(format!("Φ_BΦ_C ≠ Φ_CΦ_B by {diff:e}"));
        }
    }
    Ok("100 random states".into())
}

fn check_trace_and_unitality(rng: &mut ChaCha8Rng) -> CheckResult {
    let white = DensityMatrix::maximally_mixed(vec![2, 2, 2]).map_err(err)?;
    for _ in 0..100 {
        let rho = random_state3(rng);
        let obs = random_qubit_observable(rng);
        let site = SiteIndex(rng.random_range(0..3));
        let out = dephase(&rho, &obs, site).map_err(err)?;
        let dt = (out.matrix().trace().re - 1.0).abs();
        if dt > MAP_TOLERANCE {
            return Err(format!("trace off by {dt:e}"));
        }
        let w = dephase(&white, &obs, site).map_err(err)?;
        let du = w.matrix().max_abs_diff(white.matrix());
        if du > MAP_TOLERANCE {
            return Err(format!("Φ(𝟙/d) ≠ 𝟙/d by {du:e}"));
        }
    }
    Ok("100 random maps".into())
}

fn check_entropy_chain(rng: &mut ChaCha8Rng) -> CheckResult {
    for _ in 0..100 {
        let rho = random_state3(rng);
        let setting = random_setting3(rng);
        let obs = setting.observables();
        let r = SiteIndex(rng.random_range(0..3));
        let q = SiteIndex((r.0 + 1 + rng.random_range(0..2)) % 3);
        let s = rho.entropy().map_err(err)?;
        let s_r = dephase(&rho, &obs[r.0], r).map_err(err)?;
        let s_rq = dephase(&s_r, &obs[q.0], q).map_err(err)?;
        let last = SiteIndex(3 - r.0 - q.0);
        let s_all = dephase(&s_rq, &obs[last.0], last).map_err(err)?;
        let chain = [
            s,
            s_r.entropy().map_err(err)?,
            s_rq.entropy().map_err(err)?,
            s_all.entropy().map_err(err)?,
        ];
        if chain.windows(2).any(|w| w[1] < w[0] - ENTROPY_SLACK) {
            return Err(format!("entropy chain not monotone: {chain:?}"));
        }
    }
    Ok("S(ρ) ≤ S(Φ_R ρ) ≤ S(Φ_RQ ρ) ≤ S(Φ_ABC ρ) on 100 states".into())
}

fn check_pure_state_inequality(rng: &mut ChaCha8Rng) -> CheckResult {
    for _ in 0..100 {
        let rho = random_pure_state(&[2, 2, 2], rng);
        let setting = random_setting3(rng);
        let b = RealismContext::new(rho).map_err(err)?.breakdown(SiteIndex::A, &setting).map_err(err)?;
        if 2.0 * b.all < b.target + b.remote - ENTROPY_SLACK {
            return Err(format!(
                "2S(Φ_ABC)={} < S(Φ_A)+S(Φ_BC)={}",
                2.0 * b.all,
                b.target + b.remote
            ));
        }
    }
    // Saturation for a Schmidt state in its own basis.
    let xi = ProbabilityVector::new(vec![0.7, 0.3]).map_err(err)?;
    let schmidt = schmidt_pure_state(&SchmidtSpec::new(xi));
    let z = ProjectiveObservable::sigma_z();
    let zzz = Setting::new(vec![z.clone(), z.clone(), z]).map_err(err)?;
    let b = RealismContext::new(schmidt).map_err(err)?.breakdown(SiteIndex::A, &zzz).map_err(err)?;
    let gap = (2.0 * b.all - b.target - b.remote).abs();
    if gap > THEOREM_TOLERANCE {
        return Err(format!("Schmidt state does not saturate: gap {gap:e}"));
    }
    Ok("100 random pure states; saturated by Schmidt state".into())
}

fn check_eta_nonnegative(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut min = f64::INFINITY;
    for i in 0..10_000 {
        let rho = if i % 2 == 0 {
            random_state3(rng)
        } else {
            random_pure_state(&[2, 2, 2], rng)
        };
        let setting = random_setting3(rng);
        let target = SiteIndex(rng.random_range(0..3));
        let ctx = RealismContext::new(rho).map_err(err)?;
        let b = ctx.breakdown(target, &setting).map_err(err)?;
        min = min.min(b.target + b.remote - b.all - b.state);
    }
    Ok(format!("10000 (state, setting) pairs, min raw η {min:e}"))
}

fn check_reality_fixed_points(rng: &mut ChaCha8Rng) -> CheckResult {
    for _ in 0..50 {
        let rho = random_state3(rng);
        let setting = random_setting3(rng);
        let obs = setting.observables();
        let a_real = dephase(&rho, &obs[0], SiteIndex::A).map_err(err)?;
        let bc_real = dephase_multi(&rho, &[(SiteIndex::B, &obs[1]), (SiteIndex::C, &obs[2])]).map_err(err)?;
        for state in [a_real, bc_real] {
            let eta = RealismContext::new(state).map_err(err)?.eta(SiteIndex::A, &setting).map_err(err)?;
            if eta > ENTROPY_SLACK {
                return Err(format!("η = {eta:e} on a reality state"));
            }
        }
    }
    let ab = random_mixed_state(&[2, 2], 2, rng);
    let c = random_mixed_state(&[2], 1, rng);
    let setting = random_setting3(rng);
    let obs = setting.observables();
    let joint = RealismContext::new(ab.tensor(&c)).map_err(err)?.eta(SiteIndex::A, &setting).map_err(err)?;
    let two = Setting::new(vec![obs[0].clone(), obs[1].clone()]).map_err(err)?;
    let bip = RealismContext::new(ab).map_err(err)?.eta(SiteIndex::A, &two).map_err(err)?;
    if (joint - bip).abs() > ENTROPY_SLACK {
        return Err(format!("η(ρ_AB⊗ρ_C)={joint} but η(ρ_AB)={bip}"));
    }
    Ok("η vanishes on reality states; uncorrelated C is irrelevant".into())
}

fn check_schmidt_theorem() -> CheckResult {
    let opt = Optimizer::new(OptimizationStrategy::grid(GridIncrement::PI_OVER_4));
    let mut details = Vec::new();
    for xi in [vec![0.5, 0.5], vec![0.9, 0.1], vec![0.7, 0.3]] {
        let p = ProbabilityVector::new(xi.clone()).map_err(err)?;
        let rho = schmidt_pure_state(&SchmidtSpec::new(p));
        let n3 = opt.n3(&rho, false).map_err(err)?.value;
        let e = e3(&rho).map_err(err)?;
        details.push(verify_schmidt_values(n3, e, &xi)?);
    }
    Ok(details.join("; "))
}

fn check_ccc_witness() -> CheckResult {
    let z = ProjectiveObservable::sigma_z();
    let x = ProjectiveObservable::sigma_x();
    let xxx = Setting::new(vec![x.clone(), x.clone(), x]).map_err(err)?;
    for p in [vec![0.5, 0.5], vec![0.8, 0.2]] {
        let p = ProbabilityVector::new(p).map_err(err)?;
        let rho = ccc_state(&p, [&z, &z, &z]).map_err(err)?;
        let eta = RealismContext::new(rho).map_err(err)?.eta(SiteIndex::A, &xxx).map_err(err)?;
        let h = shannon_entropy(&p);
        if (eta - h).abs() > MAP_TOLERANCE {
            return Err(format!("η={eta} at the conjugate context, H(p)={h}"));
        }
    }
    Ok("η = H(p) at (σx,σx,σx)".into())
}

fn check_kernel_agreement(rng: &mut ChaCha8Rng) -> CheckResult {
    // The optimizer's tabulated sweep against dense evaluation of every setting.
    let grid = SettingGrid::new(GridIncrement::PI_OVER_2, 3, true).map_err(err)?;
    let opt = Optimizer::new(OptimizationStrategy::grid(GridIncrement::PI_OVER_2));
    for _ in 0..3 {
        let rho = random_state3(rng);
        let fast = opt.n3(&rho, false).map_err(err)?;
        let ctx = RealismContext::new(rho).map_err(err)?;
        for (cut, r) in &fast.cuts {
            let mut best = f64::NEG_INFINITY;
            for s in grid.iter() {
                best = best.max(ctx.eta(cut.target(), &s.setting()).map_err(err)?);
            }
            if (best - r.value).abs() > 1e-10 {
                return Err(format!("{cut}: sweep {} vs dense {best}", r.value));
            }
        }
    }
    Ok("π/2 grid maxima agree with dense evaluation".into())
}

fn check_product_kron() -> CheckResult {
    let z = ProjectiveObservable::sigma_z();
    let zz = kron(&z.projectors()[0], &z.projectors()[1]);
    let mut want = ComplexMatrix::zeros(4);
    want[(1, 1)] = crate::linalg::C64::new(1.0, 0.0);
    if !zz.approx_eq(&want, 0.0) {
        return Err("|0⟩⟨0| ⊗ |1⟩⟨1| misplaced".into());
    }
    Ok("Kronecker ordering".into())
}

/// Runs every check with a fixed seed.
pub fn run(seed: u64) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = vec![
        timed("grid-cardinality", check_grid_cardinality),
        timed("kron-ordering", check_product_kron),
        timed("partial-trace-preserves-trace", || check_partial_trace(&mut rng)),
        timed("dephase-idempotence", || check_dephase_idempotence(&mut rng)),
        timed("cross-site-commutation", || check_commutation(&mut rng)),
        timed("trace-preservation-unitality", || check_trace_and_unitality(&mut rng)),
        timed("entropy-monotonicity-chain", || check_entropy_chain(&mut rng)),
        timed("pure-state-entropy-inequality", || check_pure_state_inequality(&mut rng)),
        timed("eta-nonnegativity", || check_eta_nonnegative(&mut rng)),
        timed("reality-fixed-points", || check_reality_fixed_points(&mut rng)),
        timed("ccc-conjugate-context", check_ccc_witness),
        timed("schmidt-theorem", check_schmidt_theorem),
        timed("sweep-vs-dense", || check_kernel_agreement(&mut rng)),
    ];
    SelftestReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_selftest_passes() {
        let report = run(1);
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert_eq!(report.checks.len(), 13);
    }

    #[test]
    fn base_two_entropy_is_caught() {
        let xi = [0.7, 0.3];
        let bits: f64 = xi.iter().map(|&p: &f64| -p * p.log2()).sum();
        assert!(verify_schmidt_values(bits, bits, &xi).is_err());
        let nats: f64 = xi.iter().map(|&p: &f64| -p * p.ln()).sum();
        assert!(verify_schmidt_values(nats, nats, &xi).is_ok());
    }

    #[test]
    fn off_by_one_grid_is_caught() {
        // 9 θ values and 16 φ values; dropping or adding one value breaks the count.
        let off = |ntheta: usize, nphi: usize| (ntheta * nphi).pow(3);
        assert!(verify_grid_count(off(9, 16), 20_736).is_ok());
        assert!(verify_grid_count(off(8, 16), 20_736).is_err());
        assert!(verify_grid_count(off(9, 17), 20_736).is_err());
        assert!(verify_grid_count(2_985_984, 144 * 145).is_err());
    }
}
