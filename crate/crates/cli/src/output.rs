//! CSV and JSON writers.
//!
//! CSV files start with `#` metadata lines, then a header row. Reals are
//! printed with 12 significant digits; angles are in units of π.

use crate::error::CliResult;
use serde::Serialize;
use std::io::Write;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Fixed-precision decimal with trailing zeros removed; `-0` prints as `0`.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Provenance written ahead of every table.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub chi: String,
    pub strategy: String,
    pub increment: Option<String>,
    pub seed: Option<u64>,
    pub random_count: Option<usize>,
    pub dedupe: bool,
    pub symmetric: bool,
    pub noise: String,
    pub alpha: Option<String>,
}

impl Metadata {
    fn lines(&self) -> Vec<(String, String)> {
        let opt = |v: &Option<String>| v.clone().unwrap_or_else(|| "-".into());
        let mut out = vec![
            ("tool".into(), format!("{} {}", self.tool, self.version)),
            ("command".into(), self.command.clone()),
            ("chi".into(), self.chi.clone()),
            ("strategy".into(), self.strategy.clone()),
            ("increment".into(), opt(&self.increment)),
            ("seed".into(), opt(&self.seed.map(|s| s.to_string()))),
            ("random_count".into(), opt(&self.random_count.map(|s| s.to_string()))),
            ("dedupe".into(), self.dedupe.to_string()),
            ("symmetric".into(), self.symmetric.to_string()),
            ("noise".into(), self.noise.clone()),
        ];
        if let Some(a) = &self.alpha {
            out.push(("alpha".into(), a.clone()));
        }
        out
    }
}

/// A table of string cells plus optional trailing `#` lines.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<(String, String)>,
}

pub fn write_csv(meta: &Metadata, table: &Table, out: &mut dyn Write) -> CliResult<()> {
    for (k, v) in meta.lines() {
        writeln!(out, "# {k}: {v}")?;
    }
    {
        let mut w = csv::WriterBuilder::new().from_writer(&mut *out);
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    for (k, v) in &table.footer {
        writeln!(out, "# {k}: {v}")?;
    }
    Ok(())
}

pub fn write_json<R: Serialize, S: Serialize>(
    meta: &Metadata,
    rows: &[R],
    summary: Option<&S>,
    out: &mut dyn Write,
) -> CliResult<()> {
    #[derive(Serialize)]
    struct Doc<'a, R, S> {
        metadata: &'a Metadata,
        rows: &'a [R],
        #[serde(skip_serializing_if = "Option::is_none")]
        summary: Option<&'a S>,
    }
    serde_json::to_writer_pretty(&mut *out, &Doc { metadata: meta, rows, summary })?;
    writeln!(out)?;
    Ok(())
}
