use crate::args::{Cli, Command, EvalArgs, Format, MonogamyArgs, OutputArgs, SelftestArgs, SweepArgs, Target};
use crate::error::{CliError, CliResult};
use crate::monogamy::{monogamy_table, run_monogamy, summary_lines};
use crate::output::{fmt_real, write_csv, write_json, Metadata, Table};
use crate::spec::{parse_setting, parse_state};
use crate::sweep::{run_sweep, sweep_table};
use rbn_core::{selftest, RealismContext, SiteIndex};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Eval(a) => eval(&a, stdout),
        Command::SweepNoise(a) => sweep(&a, stdout, stderr),
        Command::Monogamy(a) => monogamy(&a, stdout, stderr),
        Command::Selftest(a) => run_selftest(&a, stdout),
    }
}

fn eval(args: &EvalArgs, out: &mut dyn Write) -> CliResult<()> {
    let rho = parse_state(&args.state)?;
    let setting = parse_setting(&args.setting)?;
    if setting.directions().len() != 3 {
        return Err(CliError::Usage("eval needs one direction per site (three)".into()));
    }
    let (target, t, rq) = match args.target {
        Target::A => (SiteIndex::A, "A", "BC"),
        Target::B => (SiteIndex::B, "B", "AC"),
        Target::C => (SiteIndex::C, "C", "AB"),
    };
    let b = RealismContext::new(rho)?.breakdown(target, &setting.setting())?;
    writeln!(out, "state           {}", args.state.trim())?;
    writeln!(out, "setting         {setting}")?;
    writeln!(out, "S(rho)          {}", fmt_real(b.state))?;
    writeln!(out, "S(Phi_{t} rho)    {}", fmt_real(b.target))?;
    writeln!(out, "S(Phi_{rq} rho)   {}", fmt_real(b.remote))?;
    writeln!(out, "S(Phi_ABC rho)  {}", fmt_real(b.all))?;
    writeln!(out, "eta_{t}|{rq}        {}", fmt_real(b.eta))?;
    Ok(())
}

fn emit<R: Serialize, S: Serialize>(
    output: &OutputArgs,
    meta: &Metadata,
    table: &Table,
    rows: &[R],
    summary: Option<&S>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let write = |w: &mut dyn Write| match output.format {
        Format::Csv => write_csv(meta, table, w),
        Format::Json => write_json(meta, rows, summary, w),
    };
    match &output.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(())
        }
        None => write(stdout),
    }
}

fn sweep(args: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let noise = args.noise.range()?;
    let search = args.search.config()?;
    let chi = args.noise.chi.into();
    let out = run_sweep(chi, &noise, &search, args.output.timings)?;
    for w in &out.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    let meta = search.metadata("sweep-noise", chi, &noise, None);
    emit(&args.output, &meta, &sweep_table(&out), &out.rows, None::<&()>, stdout)?;
    if args.output.timings {
        writeln!(stderr, "runtime: {:.3} s over {} noise values", out.total_seconds, out.rows.len())?;
    }
    Ok(())
}

fn monogamy(args: &MonogamyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let noise = args.noise.range()?;
    let alpha = args.alpha()?;
    let search = args.search.config()?;
    let chi = args.noise.chi.into();
    let start = std::time::Instant::now();
    let out = run_monogamy(chi, &noise, &alpha, &search)?;
    let meta = search.metadata("monogamy", chi, &noise, Some(&alpha));
    emit(&args.output, &meta, &monogamy_table(&out), &out.rows, Some(&out.summary), stdout)?;
    for (k, v) in summary_lines(&out.summary) {
        writeln!(stderr, "{k}: {v}")?;
    }
    if args.output.timings {
        writeln!(stderr, "runtime: {:.3} s", start.elapsed().as_secs_f64())?;
    }
    Ok(())
}

fn run_selftest(args: &SelftestArgs, out: &mut dyn Write) -> CliResult<()> {
    let report = selftest::run(args.seed);
    for c in &report.checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{mark} {:<32} {:>6} ms  {}", c.name, c.millis, c.detail)?;
    }
    let failed = report.failures().count();
    writeln!(out, "{} checks, {failed} failed", report.checks.len())?;
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} self-test checks failed")));
    }
    Ok(())
}
