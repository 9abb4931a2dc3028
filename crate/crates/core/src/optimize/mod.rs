//! Maximization of contextual nonlocality over measurement settings.
//!
//! `N₂` and `N_{T|RQ}` are maxima over a finite setting family (an angular
//! grid or a seeded random sample); `N₃` is the minimum over the three cuts.
//! Sweeps run on a rayon pool and reduce with a first-index tie-break, so the
//! value and argmax do not depend on the number of workers.

mod kernel;

use crate::error::{Error, Result};
use crate::linalg::von_neumann_entropy;
use crate::observable::{BlochSetting, Setting};
use crate::realism::SiteIndex;
use crate::sampling::random_direction;
use crate::settings::{GridIncrement, RandomSettings, SettingGrid};
use crate::state::DensityMatrix;
use kernel::{clamp, cut_mask, Partial, ThreeQubit, TwoQubit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::sync::Arc;

/// Purity threshold for [`e3`]: `Tr ς² ≥ 1 − PURITY_TOLERANCE`.
pub const PURITY_TOLERANCE: f64 = 1e-8;

/// Maximum disagreement allowed between cuts before the symmetric shortcut is refused.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

const SYMMETRY_PROBES: usize = 100;
const SYMMETRY_PROBE_SEED: u64 = 0x005e_ed0f_5e77;

/// How the setting space is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizationStrategy {
    Grid {
        increment: GridIncrement,
        keep_duplicates: bool,
    },
    Random {
        count: usize,
        seed: u64,
    },
}

impl OptimizationStrategy {
    /// The π/8 grid with every (possibly duplicated) angle tuple.
    pub fn default_grid() -> Self {
        Self::Grid {
            increment: GridIncrement::PI_OVER_8,
            keep_duplicates: true,
        }
    }

    pub fn grid(increment: GridIncrement) -> Self {
        Self::Grid {
            increment,
            keep_duplicates: true,
        }
    }

    pub fn random(count: usize, seed: u64) -> Self {
        Self::Random { count, seed }
    }

    /// Number of settings this strategy visits for `sites` parties.
    pub fn setting_count(&self, sites: usize) -> Result<usize> {
        Ok(match self {
            Self::Grid {
                increment,
                keep_duplicates,
            } => SettingGrid::new(*increment, sites, *keep_duplicates)?.len(),
            Self::Random { count, .. } => *count,
        })
    }
}

impl fmt::Display for OptimizationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Grid {
                increment,
                keep_duplicates,
            } => write!(
                f,
                "grid(increment={increment}, dedupe={})",
                !keep_duplicates
            ),
            Self::Random { count, seed } => write!(f, "random(count={count}, seed={seed})"),
        }
    }
}

/// A one-versus-two cut of a tripartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bipartition {
    AvsBC,
    BvsAC,
    CvsAB,
}

impl Bipartition {
    pub const ALL: [Bipartition; 3] = [Bipartition::AvsBC, Bipartition::BvsAC, Bipartition::CvsAB];

    /// The isolated site whose realism is probed.
    pub fn target(&self) -> SiteIndex {
        match self {
            Bipartition::AvsBC => SiteIndex::A,
            Bipartition::BvsAC => SiteIndex::B,
            Bipartition::CvsAB => SiteIndex::C,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Bipartition::AvsBC => "A|BC",
            Bipartition::BvsAC => "B|AC",
            Bipartition::CvsAB => "C|AB",
        }
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Optimized contextual nonlocality together with the setting that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlocalityResult {
    /// Nats, clamped at zero.
    pub value: f64,
    /// First maximizing setting in enumeration order.
    pub argmax: BlochSetting,
    /// Enumeration index of `argmax`.
    pub argmax_index: usize,
    pub evaluations: usize,
    pub strategy: OptimizationStrategy,
    pub target: SiteIndex,
}

impl NonlocalityResult {
    pub fn argmax_setting(&self) -> Setting {
        self.argmax.setting()
    }
}

/// `N₃` and the per-cut maxima it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct N3Result {
    pub value: f64,
    /// One entry per evaluated cut; a single `A|BC` entry under the symmetric shortcut.
    pub cuts: Vec<(Bipartition, NonlocalityResult)>,
    pub symmetric: bool,
}

impl N3Result {
    pub fn minimizing_cut(&self) -> &(Bipartition, NonlocalityResult) {
        self.cuts
            .iter()
            .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
            .expect("at least one cut")
    }

    pub fn evaluations(&self) -> usize {
        self.cuts.iter().map(|(_, r)| r.evaluations).sum()
    }
}

/// Inputs of the monogamy witness, computed once and reusable for any `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonogamyTerms {
    pub n3: f64,
    pub n2_ab: f64,
    pub n2_ac: f64,
}

impl MonogamyTerms {
    /// `N₃^α − N₂(ρ_AB)^α − N₂(ρ_AC)^α`. Powers commute with the maxima
    /// because `x ↦ x^α` is increasing on `x ≥ 0`.
    pub fn delta(&self, alpha: f64) -> f64 {
        self.n3.powf(alpha) - self.n2_ab.powf(alpha) - self.n2_ac.powf(alpha)
    }
}

/// Runs nonlocality maximizations with a fixed strategy and worker pool.
#[derive(Clone)]
pub struct Optimizer {
    strategy: OptimizationStrategy,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl fmt::Debug for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Optimizer")
            .field("strategy", &self.strategy)
            .field("workers", &self.workers())
            .finish()
    }
}

impl Optimizer {
    /// Uses rayon's global pool.
    pub fn new(strategy: OptimizationStrategy) -> Self {
        Self {
            strategy,
            pool: None,
        }
    }

    /// Uses a dedicated pool of `workers` threads.
    pub fn with_workers(strategy: OptimizationStrategy, workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidArgument("worker count must be positive".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?;
        Ok(Self {
            strategy,
            pool: Some(Arc::new(pool)),
        })
    }

    pub fn strategy(&self) -> OptimizationStrategy {
        self.strategy
    }

    pub fn workers(&self) -> usize {
        match &self.pool {
            Some(p) => p.current_num_threads(),
            None => rayon::current_num_threads(),
        }
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }

    fn result(&self, partial: &Partial, cut: usize, sites: usize) -> Result<NonlocalityResult> {
        let (value, index) = partial.best[cut];
        let argmax = match self.strategy {
            OptimizationStrategy::Grid {
                increment,
                keep_duplicates,
            } => SettingGrid::new(increment, sites, keep_duplicates)?.get(index),
            OptimizationStrategy::Random { count, seed } => RandomSettings::new(count, seed, sites)?.get(index),
        }
        .ok_or_else(|| Error::InternalConsistency(format!("argmax index {index} out of range")))?;
        Ok(NonlocalityResult {
            value: clamp(value),
            argmax,
            argmax_index: index,
            evaluations: self.strategy.setting_count(sites)?,
            strategy: self.strategy,
            target: SiteIndex(cut),
        })
    }

    /// `N₂(ρ) = max_{A,B} η_{A|B}(ρ)` for a two-qubit state.
    pub fn n2(&self, rho: &DensityMatrix) -> Result<NonlocalityResult> {
        let kernel = TwoQubit::new(rho)?;
        let partial = self.run(|| match self.strategy {
            OptimizationStrategy::Grid {
                increment,
                keep_duplicates,
            } => kernel.sweep_grid(&SettingGrid::new(increment, 2, keep_duplicates)?),
            OptimizationStrategy::Random { count, seed } => {
                kernel.sweep_random(&RandomSettings::new(count, seed, 2)?)
            }
        })?;
        self.result(&partial, 0, 2)
    }

    fn sweep3(&self, kernel: &ThreeQubit, mask: [bool; 3]) -> Result<Partial> {
        self.run(|| match self.strategy {
            OptimizationStrategy::Grid {
                increment,
                keep_duplicates,
            } => kernel.sweep_grid(&SettingGrid::new(increment, 3, keep_duplicates)?, mask),
            OptimizationStrategy::Random { count, seed } => {
                kernel.sweep_random(&RandomSettings::new(count, seed, 3)?, mask)
            }
        })
    }

    /// `N_{T|RQ}(ρ)`: maximum of `η` with the cut's isolated site as target.
    pub fn n_bipartition(&self, rho: &DensityMatrix, cut: Bipartition) -> Result<NonlocalityResult> {
        let kernel = ThreeQubit::new(rho)?;
        let partial = self.sweep3(&kernel, cut_mask(&[cut]))?;
        self.result(&partial, cut.target().0, 3)
    }

    /// `N₃(ρ) = min` over the three cuts. Each cut is maximized independently.
    ///
    /// With `symmetric`, only `A|BC` is optimized; the state is first probed on
    /// random settings and rejected unless all cuts agree.
    pub fn n3(&self, rho: &DensityMatrix, symmetric: bool) -> Result<N3Result> {
        let kernel = ThreeQubit::new(rho)?;
        if symmetric {
            check_permutation_symmetry(&kernel)?;
            let partial = self.sweep3(&kernel, [true, false, false])?;
            let a = self.result(&partial, 0, 3)?;
            return Ok(N3Result {
                value: a.value,
                cuts: vec![(Bipartition::AvsBC, a)],
                symmetric: true,
            });
        }
        let partial = self.sweep3(&kernel, [true; 3])?;
        let cuts = Bipartition::ALL
            .iter()
            .map(|&c| Ok((c, self.result(&partial, c.target().0, 3)?)))
            .collect::<Result<Vec<_>>>()?;
        let value = cuts.iter().map(|(_, r)| r.value).fold(f64::INFINITY, f64::min);
        Ok(N3Result {
            value,
            cuts,
            symmetric: false,
        })
    }

    /// `N₃(ρ)`, `N₂(ρ_AB)` and `N₂(ρ_AC)`; the two-site maxima use the
    /// two-site version of this optimizer's strategy.
    pub fn monogamy_terms(&self, rho: &DensityMatrix, symmetric: bool) -> Result<MonogamyTerms> {
        let n3 = self.n3(rho, symmetric)?.value;
        let n2_ab = self.n2(&rho.reduced(&[0, 1])?)?.value;
        let n2_ac = self.n2(&rho.reduced(&[0, 2])?)?.value;
        Ok(MonogamyTerms { n3, n2_ab, n2_ac })
    }

    /// `δN₃^α(ρ) = N₃^α(ρ) − [N₂^α(ρ_AB) + N₂^α(ρ_AC)]`.
    pub fn monogamy_witness(&self, rho: &DensityMatrix, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
        }
        Ok(self.monogamy_terms(rho, false)?.delta(alpha))
    }
}

/// Compares `η` across cuts on random settings, relabelling sites so each
/// cut sees the same physical context.
fn check_permutation_symmetry(kernel: &ThreeQubit) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(SYMMETRY_PROBE_SEED);
    let mut dir = || random_direction(&mut rng);
    for _ in 0..SYMMETRY_PROBES {
        let (t, r, q) = (dir(), dir(), dir());
        let a = kernel.eval(&[t, r, q], [true, false, false])?[0];
        let b = kernel.eval(&[r, t, q], [false, true, false])?[1];
        let c = kernel.eval(&[q, r, t], [false, false, true])?[2];
        let spread = (a - b).abs().max((a - c).abs());
        if spread > SYMMETRY_TOLERANCE {
            return Err(Error::NotSymmetric(format!(
                "cuts differ by {spread:e} at target {t}, remotes {r}, {q}"
            )));
        }
    }
    Ok(())
}

/// `E₃(ς) = min` over cuts of the single-site reduced entropy, for pure `ς`.
pub fn e3(rho: &DensityMatrix) -> Result<f64> {
    if rho.num_sites() != 3 {
        return Err(Error::InvalidArgument(format!(
            "expected a three-site state, got {} sites",
            rho.num_sites()
        )));
    }
    let purity = rho.purity();
    if purity < 1.0 - PURITY_TOLERANCE {
        return Err(Error::NotPure { purity });
    }
    (0..3)
        .map(|s| von_neumann_entropy(rho.reduced(&[s])?.matrix()))
        .try_fold(f64::INFINITY, |acc, s| s.map(|s| acc.min(s)))
}
