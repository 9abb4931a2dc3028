//! `N₃` of a noisy GHZ or W family across a range of noise weights.

use crate::error::{CliError, CliResult};
use crate::experiment::{Range, SearchConfig};
use crate::output::{fmt_real, Table};
use rbn_core::state::noisy_state;
use rbn_core::{NoiseFamilySpec, StateFamily};
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

/// Allowed increase of `N₃` between consecutive noise values before warning.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub chi: String,
    pub noise: f64,
    pub n3: f64,
    /// The cut attaining the minimum, e.g. `A|BC`.
    pub cut: String,
    /// `(θ_A, φ_A, θ_B, φ_B, θ_C, φ_C)` in units of π.
    pub argmax: [f64; 6],
    pub evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
    pub total_seconds: f64,
}

pub fn run_sweep(chi: StateFamily, noise: &Range, search: &SearchConfig, timings: bool) -> CliResult<SweepOutput> {
    let opt = search.optimizer()?;
    let start = Instant::now();
    let mut rows: Vec<SweepRow> = Vec::new();
    for n in noise.values() {
        let t = Instant::now();
        let rho = noisy_state(NoiseFamilySpec::new(chi, n)?);
        let r = opt.n3(&rho, search.symmetric)?;
        let (cut, best) = r.minimizing_cut();
        let mut argmax = [0.0; 6];
        for (i, d) in best.argmax.directions().iter().enumerate() {
            argmax[2 * i] = d.theta() / PI;
            argmax[2 * i + 1] = d.phi() / PI;
        }
        if r.value < 0.0 {
            return Err(CliError::Numerical(format!("negative N₃ {} at noise {n}", r.value)));
        }
        rows.push(SweepRow {
            chi: chi.name().into(),
            noise: n,
            n3: r.value,
            cut: cut.label().into(),
            argmax,
            evaluations: r.evaluations(),
            wall_seconds: timings.then(|| t.elapsed().as_secs_f64()),
        });
    }
    let warnings = rows
        .windows(2)
        .filter(|w| w[1].n3 > w[0].n3 + MONOTONE_TOLERANCE)
        .map(|w| {
            format!(
                "N₃ increases from {} at noise {} to {} at noise {}",
                fmt_real(w[0].n3),
                fmt_real(w[0].noise),
                fmt_real(w[1].n3),
                fmt_real(w[1].noise)
            )
        })
        .collect();
    Ok(SweepOutput {
        rows,
        warnings,
        total_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn sweep_table(out: &SweepOutput) -> Table {
    let timed = out.rows.iter().any(|r| r.wall_seconds.is_some());
    let mut header: Vec<String> = [
        "chi", "noise", "n3", "cut", "theta_a", "phi_a", "theta_b", "phi_b", "theta_c", "phi_c", "evaluations",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if timed {
        header.push("wall_seconds".into());
    }
    let rows = out
        .rows
        .iter()
        .map(|r| {
            let mut cells = vec![r.chi.clone(), fmt_real(r.noise), fmt_real(r.n3), r.cut.clone()];
            cells.extend(r.argmax.iter().map(|&a| fmt_real(a)));
            cells.push(r.evaluations.to_string());
            if let Some(w) = r.wall_seconds {
                cells.push(format!("{w:.3}"));
            }
            cells
        })
        .collect();
    let mut footer = Vec::new();
    if timed {
        footer.push(("runtime_seconds".into(), format!("{:.3}", out.total_seconds)));
    }
    Table { header, rows, footer }
}
