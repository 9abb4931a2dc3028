//! Textual state and setting specifications.
//!
//! States: `ghz`, `w`, `ghz(n)`, `w(n)`, `mixed(n)`, `zero`, `schmidt(p1,p2,...)`.
//! `n` is the white-noise weight; `mixed(n)` is `ghz(n)`.
//!
//! Settings: comma-separated per-site directions, each `x`, `y`, `z` (optionally
//! negated with `-`) or `theta:phi` in units of π.

use crate::error::{CliError, CliResult};
use rbn_core::state::{noisy_state, schmidt_pure_state};
use rbn_core::{
    BlochDirection, BlochSetting, DensityMatrix, NoiseFamilySpec, ProbabilityVector, SchmidtSpec, StateFamily,
};
use std::f64::consts::PI;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn split_call(s: &str) -> CliResult<(&str, Option<&str>)> {
    match s.find('(') {
        None => Ok((s, None)),
        Some(open) => {
            let inner = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| usage(format!("unbalanced parentheses in '{s}'")))?;
            Ok((&s[..open], Some(inner)))
        }
    }
}

fn parse_number(s: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| usage(format!("'{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(usage(format!("'{s}' is not finite")));
    }
    Ok(v)
}

pub fn parse_state(spec: &str) -> CliResult<DensityMatrix> {
    let lower = spec.trim().to_ascii_lowercase();
    let (name, arg) = split_call(&lower)?;
    let noisy = |family| -> CliResult<DensityMatrix> {
        let noise = arg.map(parse_number).transpose()?.unwrap_or(0.0);
        Ok(noisy_state(NoiseFamilySpec::new(family, noise)?))
    };
    match name.trim() {
        "ghz" | "mixed" => noisy(StateFamily::Ghz),
        "w" => noisy(StateFamily::W),
        "zero" if arg.is_none() => {
            let xi = ProbabilityVector::new(vec![1.0])?;
            Ok(schmidt_pure_state(&SchmidtSpec::new(xi)))
        }
        "schmidt" => {
            let arg = arg.ok_or_else(|| usage("schmidt needs coefficients, e.g. schmidt(0.7,0.3)"))?;
            let xi = arg.split(',').map(parse_number).collect::<CliResult<Vec<_>>>()?;
            if xi.len() > 2 {
                return Err(usage("schmidt states with more than two terms are not qubit states"));
            }
            Ok(schmidt_pure_state(&SchmidtSpec::new(ProbabilityVector::new(xi)?)))
        }
        _ => Err(usage(format!("unknown state '{spec}'"))),
    }
}

pub fn parse_direction(spec: &str) -> CliResult<BlochDirection> {
    let s = spec.trim().to_ascii_lowercase();
    if let Some((t, p)) = s.split_once(':') {
        let theta = parse_number(t)? * PI;
        let phi = parse_number(p)? * PI;
        return Ok(BlochDirection::wrapped(theta, phi)?);
    }
    let (neg, axis) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(&s)),
    };
    let (theta, phi) = match axis {
        "z" => (0.0, 0.0),
        "x" => (PI / 2.0, 0.0),
        "y" => (PI / 2.0, PI / 2.0),
        _ => return Err(usage(format!("unknown direction '{spec}'"))),
    };
    if neg {
        Ok(BlochDirection::wrapped(PI - theta, phi + PI)?)
    } else {
        Ok(BlochDirection::new(theta, phi)?)
    }
}

pub fn parse_setting(spec: &str) -> CliResult<BlochSetting> {
    let dirs = spec.split(',').map(parse_direction).collect::<CliResult<Vec<_>>>()?;
    Ok(BlochSetting::new(dirs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states() {
        assert_eq!(parse_state("GHZ").unwrap(), rbn_core::ghz_state());
        assert_eq!(parse_state("w").unwrap(), rbn_core::w_state());
        let white = DensityMatrix::maximally_mixed(vec![2, 2, 2]).unwrap();
        assert!(parse_state("mixed(1.0)").unwrap().matrix().approx_eq(white.matrix(), 1e-15));
        let want = noisy_state(NoiseFamilySpec::new(StateFamily::W, 0.5).unwrap());
        assert_eq!(parse_state("w(0.5)").unwrap(), want);
        assert!(parse_state("schmidt(0.7,0.3)").is_ok());
        assert!(parse_state("zero").unwrap().purity() > 1.0 - 1e-12);
        for bad in ["ghz(2)", "bell", "w(", "schmidt(0.5)", "schmidt(0.2,0.2,0.6)", "mixed(x)"] {
            assert!(matches!(parse_state(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn directions() {
        assert_eq!(parse_direction("z").unwrap(), BlochDirection::Z);
        assert_eq!(parse_direction("x").unwrap(), BlochDirection::X);
        assert_eq!(parse_direction("Y").unwrap(), BlochDirection::Y);
        let mz = parse_direction("-z").unwrap();
        assert!((mz.theta() - PI).abs() < 1e-15);
        let d = parse_direction("0.5:0.25").unwrap();
        assert!((d.theta() - PI / 2.0).abs() < 1e-15 && (d.phi() - PI / 4.0).abs() < 1e-15);
        assert!(parse_direction("q").is_err());
        assert!(parse_direction("1.5:0").is_err());
    }

    #[test]
    fn settings() {
        assert_eq!(parse_setting("z,z,z").unwrap().directions().len(), 3);
        assert_eq!(parse_setting("x, y").unwrap().directions().len(), 2);
        assert!(parse_setting("z").is_err());
        assert!(parse_setting("z,z,z,z").is_err());
    }
}
