//! Device parameter files: one `key=value` per line, `#` comments.
//!
//! Keys not present keep their default value. Every key may appear once.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pglab_core::DeviceParams;

use crate::netlist_text::{Num, ParseError};

/// Environment variable naming a params file used when none is given.
pub const PARAMS_ENV: &str = "PGLAB_PARAMS";

pub const KEYS: [&str; 9] = ["mu0_cox", "vth0", "dvth", "m", "gamma_prime", "eta", "v_t", "alpha", "vdd"];

fn slot<'a>(p: &'a mut DeviceParams, key: &str) -> Option<&'a mut f64> {
    Some(match key {
        "mu0_cox" => &mut p.mu0_cox,
        "vth0" => &mut p.vth0,
        "dvth" => &mut p.dvth,
        "m" => &mut p.m,
        "gamma_prime" => &mut p.gamma_prime,
        "eta" => &mut p.eta,
        "v_t" => &mut p.v_t,
        "alpha" => &mut p.alpha,
        "vdd" => &mut p.vdd,
        _ => return None,
    })
}

pub fn parse_params(text: &str) -> Result<DeviceParams, ParseError> {
    let mut p = DeviceParams::default();
    let mut seen = [0usize; KEYS.len()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split_once('#').map_or(raw, |(b, _)| b).trim();
        if body.is_empty() {
            continue;
        }
        let e = |message: String| ParseError { line, message };
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| e(format!("expected key=value, got `{body}`")))?;
        let (k, v) = (k.trim(), v.trim());
        let pos = KEYS
            .iter()
            .position(|key| *key == k)
            .ok_or_else(|| e(format!("unknown key `{k}`")))?;
        if seen[pos] != 0 {
            return Err(e(format!("key `{k}` already set at line {}", seen[pos])));
        }
        seen[pos] = line;
        let x: f64 = v
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite())
            .ok_or_else(|| e(format!("`{v}` is not a finite number")))?;
        *slot(&mut p, k).expect("key listed") = x;
    }
    p.validate().map_err(|err| ParseError {
        line: 0,
        message: err.to_string(),
    })?;
    Ok(p)
}

pub fn write_params(p: &DeviceParams) -> String {
    let mut copy = *p;
    let mut out = String::new();
    for key in KEYS {
        let v = *slot(&mut copy, key).expect("key listed");
        let _ = writeln!(out, "{key}={}", Num(v));
    }
    out
}

/// The params file to use: the explicit path, else the environment
/// variable, else none (built-in defaults).
pub fn params_path(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(PARAMS_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_defaults() {
        let p = DeviceParams::default();
        assert_eq!(parse_params(&write_params(&p)).unwrap(), p);
    }

    #[test]
    fn partial_file_with_comments() {
        let p = parse_params("# corner\nvdd = 0.9  # low supply\n\nvth0=0.45\n").unwrap();
        assert_eq!(p.vdd, 0.9);
        assert_eq!(p.vth0, 0.45);
        assert_eq!(p.m, DeviceParams::default().m);
    }

    #[test]
    fn rejects_bad_lines() {
        assert_eq!(parse_params("vdd=1\nvtho=0.4\n").unwrap_err().line, 2);
        assert_eq!(parse_params("vdd=1\nvdd=1.1\n").unwrap_err().line, 2);
        assert_eq!(parse_params("vdd\n").unwrap_err().line, 1);
        assert_eq!(parse_params("vdd=one\n").unwrap_err().line, 1);
        assert_eq!(parse_params("vdd=nan\n").unwrap_err().line, 1);
        assert!(parse_params("vdd=-1\n").is_err());
    }
}
