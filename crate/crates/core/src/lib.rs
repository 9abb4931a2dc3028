//! Realism-based nonlocality for two- and three-qubit states.
//!
//! The crate is layered bottom-up:
//!
//! * [`linalg`]: dense complex matrices, partial traces, Hermitian spectra, entropies
//! * [`state`], [`observable`], [`settings`]: state families, projective
//!   measurements and the setting grid / random sampler
//! * [`realism`]: unrevealed measurements `Φ`, irreality and contextual nonlocality `η`
//! * [`optimize`]: `N₂`, `N_{T|RQ}`, `N₃`, `E₃` and the monogamy witness
//! * [`selftest`]: the invariant suite at reduced scale
//!
//! All entropies are in nats.

pub mod error;
pub mod linalg;
pub mod observable;
pub mod optimize;
pub mod realism;
pub mod sampling;
pub mod selftest;
pub mod settings;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ProbabilityVector};
pub use observable::{BlochDirection, BlochSetting, ProjectiveObservable, Setting};
pub use optimize::{
    e3, Bipartition, MonogamyTerms, N3Result, NonlocalityResult, OptimizationStrategy, Optimizer,
};
pub use realism::{
    contextual_nl_2, contextual_nl_3, dephase, dephase_multi, irreality, RealismContext, SiteIndex,
};
pub use settings::{GridIncrement, RandomSettings, SettingGrid};
pub use state::{
    cc_state, ccc_state, classical_state, ghz_state, noisy_state, schmidt_pure_state, w_state,
    DensityMatrix, NoiseFamilySpec, SchmidtSpec, StateFamily,
};

/// Crate version, recorded in experiment outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
