//! Monogamy witness `δN₃^α` over a noise × α grid.
//!
//! `N₃` and both reduced `N₂` are optimized once per noise value; each α
//! only raises those maxima to a power.

use crate::error::{CliError, CliResult};
use crate::experiment::{Range, SearchConfig};
use crate::output::{fmt_real, Table};
use rbn_core::state::noisy_state;
use rbn_core::{MonogamyTerms, NoiseFamilySpec, StateFamily};
use serde::Serialize;

/// `|δ − (N₃^α − N₂(AB)^α − N₂(AC)^α)|` allowed in each row.
pub const ROW_CONSISTENCY: f64 = 1e-12;
const REFINE_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonogamyRow {
    pub chi: String,
    pub noise: f64,
    pub alpha: f64,
    pub n3: f64,
    pub n2_ab: f64,
    pub n2_ac: f64,
    pub delta: f64,
    /// `δ / max δ`; absent when no row has positive `δ`.
    pub delta_normalized: Option<f64>,
}

impl MonogamyRow {
    pub fn recomputed_delta(&self) -> f64 {
        self.n3.powf(self.alpha) - self.n2_ab.powf(self.alpha) - self.n2_ac.powf(self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonogamySummary {
    /// Noise value of the first row, where threshold and peak are read off.
    pub reference_noise: f64,
    /// First sign change of `δ` from negative to nonnegative, refined by bisection.
    pub alpha_threshold: Option<f64>,
    /// Maximizer of `δ` over α at the reference noise, refined by golden section.
    pub alpha_peak: Option<f64>,
    pub delta_peak: Option<f64>,
    /// Largest `δ` anywhere on the grid and where it occurs.
    pub max_delta: f64,
    pub max_alpha: f64,
    pub max_noise: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonogamyOutput {
    pub rows: Vec<MonogamyRow>,
    pub terms: Vec<(f64, MonogamyTerms)>,
    pub summary: MonogamySummary,
}

fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..REFINE_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..REFINE_ITERATIONS {
        if hi - lo < 1e-12 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Threshold and peak of `δ(α)` for one set of terms, bracketed on `alphas`.
pub fn threshold_and_peak(terms: &MonogamyTerms, alphas: &[f64]) -> (Option<f64>, Option<(f64, f64)>) {
    let d: Vec<f64> = alphas.iter().map(|&a| terms.delta(a)).collect();
    let threshold = (1..alphas.len())
        .find(|&k| d[k - 1] < 0.0 && d[k] >= 0.0)
        .map(|k| bisect_root(|a| terms.delta(a), alphas[k - 1], alphas[k]));
    let mut best = 0;
    for k in 1..d.len() {
        if d[k] > d[best] {
            best = k;
        }
    }
    let interior = best > 0 && best + 1 < alphas.len();
    let peak = (!d.is_empty() && d[best] > 0.0).then(|| {
        let a = if interior {
            golden_max(|a| terms.delta(a), alphas[best - 1], alphas[best + 1])
        } else {
            alphas[best]
        };
        (a, terms.delta(a))
    });
    (threshold, peak)
}

pub fn run_monogamy(chi: StateFamily, noise: &Range, alpha: &Range, search: &SearchConfig) -> CliResult<MonogamyOutput> {
    let opt = search.optimizer()?;
    let alphas = alpha.values();
    let mut terms = Vec::new();
    for n in noise.values() {
        let rho = noisy_state(NoiseFamilySpec::new(chi, n)?);
        terms.push((n, opt.monogamy_terms(&rho, search.symmetric)?));
    }
    let mut rows = Vec::with_capacity(terms.len() * alphas.len());
    for (n, t) in &terms {
        for &a in &alphas {
            rows.push(MonogamyRow {
                chi: chi.name().into(),
                noise: *n,
                alpha: a,
                n3: t.n3,
                n2_ab: t.n2_ab,
                n2_ac: t.n2_ac,
                delta: t.delta(a),
                delta_normalized: None,
            });
        }
    }
    let mut max = (f64::NEG_INFINITY, 0.0, 0.0);
    for r in &rows {
        if r.delta > max.0 {
            max = (r.delta, r.alpha, r.noise);
        }
    }
    if max.0 > 0.0 {
        for r in &mut rows {
            r.delta_normalized = Some(r.delta / max.0);
        }
    }
    for r in &rows {
        let err = (r.recomputed_delta() - r.delta).abs();
        if err > ROW_CONSISTENCY {
            return Err(CliError::Numerical(format!(
                "δ column disagrees with N₃, N₂ columns by {err:e} at noise {}, α {}",
                r.noise, r.alpha
            )));
        }
    }
    let (reference_noise, reference) = terms[0].clone();
    let (threshold, peak) = threshold_and_peak(&reference, &alphas);
    let summary = MonogamySummary {
        reference_noise,
        alpha_threshold: threshold,
        alpha_peak: peak.map(|p| p.0),
        delta_peak: peak.map(|p| p.1),
        max_delta: max.0,
        max_alpha: max.1,
        max_noise: max.2,
    };
    Ok(MonogamyOutput { rows, terms, summary })
}

pub fn monogamy_table(out: &MonogamyOutput) -> Table {
    let header = ["chi", "noise", "alpha", "n3", "n2_ab", "n2_ac", "delta", "delta_normalized"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows = out
        .rows
        .iter()
        .map(|r| {
            vec![
                r.chi.clone(),
                fmt_real(r.noise),
                fmt_real(r.alpha),
                fmt_real(r.n3),
                fmt_real(r.n2_ab),
                fmt_real(r.n2_ac),
                fmt_real(r.delta),
                r.delta_normalized.map(fmt_real).unwrap_or_else(|| "nan".into()),
            ]
        })
        .collect();
    Table {
        header,
        rows,
        footer: summary_lines(&out.summary),
    }
}

pub fn summary_lines(s: &MonogamySummary) -> Vec<(String, String)> {
    let opt = |v: Option<f64>| v.map(fmt_real).unwrap_or_else(|| "none".into());
    vec![
        ("reference_noise".into(), fmt_real(s.reference_noise)),
        ("alpha_threshold".into(), opt(s.alpha_threshold)),
        ("alpha_peak".into(), opt(s.alpha_peak)),
        ("delta_peak".into(), opt(s.delta_peak)),
        ("max_delta".into(), fmt_real(s.max_delta)),
        ("max_delta_alpha".into(), fmt_real(s.max_alpha)),
        ("max_delta_noise".into(), fmt_real(s.max_noise)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_threshold_and_peak() {
        // δ = a^α − 2 b^α crosses zero at ln 2 / ln(a/b) and peaks where
        // (a/b)^α = 2 ln b / ln a.
        let t = MonogamyTerms {
            n3: 0.6365,
            n2_ab: 0.4621,
            n2_ac: 0.4621,
        };
        let alphas: Vec<f64> = (1..=1000).map(|k| k as f64 * 0.01).collect();
        let (th, peak) = threshold_and_peak(&t, &alphas);
        let r = (t.n3 / t.n2_ab).ln();
        let want_th = std::f64::consts::LN_2 / r;
        let want_peak = (2.0 * t.n2_ab.ln() / t.n3.ln()).ln() / r;
        assert!((th.unwrap() - want_th).abs() < 1e-10);
        assert!((peak.unwrap().0 - want_peak).abs() < 1e-6);
    }

    #[test]
    fn no_crossing_without_sign_change() {
        let ln2 = std::f64::consts::LN_2;
        let t = MonogamyTerms {
            n3: ln2,
            n2_ab: ln2,
            n2_ac: ln2,
        };
        let (th, peak) = threshold_and_peak(&t, &[0.5, 1.0, 2.0]);
        assert!(th.is_none());
        assert!(peak.is_none());
    }
}
