//! Shared configuration for the sweep and monogamy commands.

use crate::error::{CliError, CliResult};
use crate::output::{fmt_real, Metadata};
use rbn_core::{GridIncrement, OptimizationStrategy, Optimizer, StateFamily};

/// Grid values are snapped to this resolution so `0.1 + 0.2` lands on `0.3`.
const SNAP: f64 = 1e12;
/// Step-count slack for ranges whose end is not an exact multiple of the step.
const RANGE_SLACK: f64 = 1e-9;

/// Inclusive arithmetic progression `start, start + step, …, ≤ end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Range {
    pub fn new(start: f64, end: f64, step: f64) -> CliResult<Self> {
        if ![start, end, step].iter().all(|v| v.is_finite()) {
            return Err(CliError::Usage("range bounds must be finite".into()));
        }
        if step <= 0.0 {
            return Err(CliError::Usage(format!("step must be positive, got {step}")));
        }
        if end < start {
            return Err(CliError::Usage(format!("range end {end} is below start {start}")));
        }
        Ok(Self { start, end, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + RANGE_SLACK).floor() as usize + 1;
        (0..n)
            .map(|k| {
                let v = self.start + k as f64 * self.step;
                ((v * SNAP).round() / SNAP).min(self.end)
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        format!("{}:{}:{}", fmt_real(self.start), fmt_real(self.end), fmt_real(self.step))
    }
}

pub fn noise_range(start: f64, end: f64, step: f64) -> CliResult<Range> {
    let r = Range::new(start, end, step)?;
    if start < 0.0 || end > 1.0 {
        return Err(CliError::Usage(format!("noise must lie in [0, 1], got {start}..{end}")));
    }
    Ok(r)
}

pub fn alpha_range(start: f64, end: f64, step: f64) -> CliResult<Range> {
    let r = Range::new(start, end, step)?;
    if start <= 0.0 {
        return Err(CliError::Usage(format!("alpha must be positive, got {start}")));
    }
    Ok(r)
}

/// How settings are searched and on how many threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub increment: GridIncrement,
    /// `(count, seed)` selects random sampling instead of the grid.
    pub random: Option<(usize, u64)>,
    pub dedupe: bool,
    pub symmetric: bool,
    pub workers: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            increment: GridIncrement::PI_OVER_8,
            random: None,
            dedupe: false,
            symmetric: false,
            workers: None,
        }
    }
}

impl SearchConfig {
    pub fn strategy(&self) -> OptimizationStrategy {
        match self.random {
            Some((count, seed)) => OptimizationStrategy::random(count, seed),
            None => OptimizationStrategy::Grid {
                increment: self.increment,
                keep_duplicates: !self.dedupe,
            },
        }
    }

    pub fn optimizer(&self) -> CliResult<Optimizer> {
        Ok(match self.workers {
            Some(k) => Optimizer::with_workers(self.strategy(), k)?,
            None => Optimizer::new(self.strategy()),
        })
    }

    pub fn metadata(&self, command: &str, chi: StateFamily, noise: &Range, alpha: Option<&Range>) -> Metadata {
        let (strategy, increment, seed, count) = match self.random {
            Some((count, seed)) => ("random", None, Some(seed), Some(count)),
            None => ("grid", Some(self.increment.to_string()), None, None),
        };
        Metadata {
            tool: "rbn".into(),
            version: rbn_core::VERSION.into(),
            command: command.into(),
            chi: chi.name().into(),
            strategy: strategy.into(),
            increment,
            seed,
            random_count: count,
            dedupe: self.dedupe,
            symmetric: self.symmetric,
            noise: noise.describe(),
            alpha: alpha.map(Range::describe),
        }
    }
}
