//! Signal CSV (`t,re,im`) with a `key=value` sidecar holding `sample_rate` and `t0`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::ComplexBaseband;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignalMeta {
    pub sample_rate: f64,
    pub t0: f64,
}

/// Float formatting uses Rust's shortest round-trip representation.
pub fn signal_to_csv(sig: &ComplexBaseband) -> String {
    let mut out = String::with_capacity(sig.len() * 48);
    out.push_str("t,re,im\n");
    for (i, z) in sig.samples().iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", sig.time(i), z.re, z.im);
    }
    out
}

pub fn signal_meta(sig: &ComplexBaseband) -> String {
    format!("sample_rate={}\nt0={}\n", sig.sample_rate(), sig.t0())
}

fn parse_f64(s: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("{what}: `{}` is not a number", s.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("{what}: `{}` is not finite", s.trim()),
        });
    }
    Ok(v)
}

pub fn parse_signal_meta(text: &str) -> Result<SignalMeta> {
    let mut sample_rate = None;
    let mut t0 = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (key, value) = l.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected key=value, got `{l}`"),
        })?;
        let slot = match key.trim() {
            "sample_rate" => &mut sample_rate,
            "t0" => &mut t0,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key `{other}`"),
                })
            }
        };
        if slot.is_some() {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{}`", key.trim()),
            });
        }
        *slot = Some(parse_f64(value, line, key.trim())?);
    }
    let sample_rate = sample_rate.ok_or_else(|| Error::Parse {
        line: 0,
        message: "missing key `sample_rate`".into(),
    })?;
    if sample_rate <= 0.0 {
        return Err(Error::Parse {
            line: 0,
            message: format!("sample_rate {sample_rate} must be positive"),
        });
    }
    Ok(SignalMeta {
        sample_rate,
        t0: t0.unwrap_or(0.0),
    })
}

/// Parses the CSV body and sidecar. The `t` column is checked for syntax only;
/// sample times come from the sidecar.
pub fn parse_signal_csv(csv: &str, meta: &str) -> Result<ComplexBaseband> {
    let meta = parse_signal_meta(meta)?;
    let mut lines = csv.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "t,re,im" => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `t,re,im`, got `{}`", h.trim()),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty signal file".into(),
            })
        }
    }
    let mut samples = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        let cols: Vec<&str> = l.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 columns, got {}", cols.len()),
            });
        }
        parse_f64(cols[0], line, "t")?;
        let re = parse_f64(cols[1], line, "re")?;
        let im = parse_f64(cols[2], line, "im")?;
        samples.push(Complex64::new(re, im));
    }
    if samples.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "signal file has no samples".into(),
        });
    }
    ComplexBaseband::new(samples, meta.sample_rate, meta.t0)
}

/// Sidecar path for a signal CSV: `x.csv` becomes `x.meta`.
pub fn meta_path(path: &Path) -> PathBuf {
    path.with_extension("meta")
}

pub fn write_signal(sig: &ComplexBaseband, path: &Path) -> Result<()> {
    fs::write(path, signal_to_csv(sig))?;
    fs::write(meta_path(path), signal_meta(sig))?;
    Ok(())
}

pub fn read_signal(path: &Path) -> Result<ComplexBaseband> {
    let csv = fs::read_to_string(path)?;
    let meta = fs::read_to_string(meta_path(path))?;
    parse_signal_csv(&csv, &meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let s = vec![
            Complex64::new(0.1, -1.0 / 3.0),
            Complex64::new(1e-300, 2.5e17),
            Complex64::new(-0.0, std::f64::consts::PI),
        ];
        let sig = ComplexBaseband::new(s, 12.5e6, 1.0 / 7.0).unwrap();
        let back = parse_signal_csv(&signal_to_csv(&sig), &signal_meta(&sig)).unwrap();
        assert_eq!(back, sig);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let meta = "sample_rate=1\n";
        match parse_signal_csv("t,re,im\n0,1,0\n1,x,0\n", meta) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_signal_csv("a,b\n", meta).is_err());
        assert!(parse_signal_csv("t,re,im\n", meta).is_err());
        assert!(parse_signal_csv("t,re,im\n0,1,0\n", "t0=0\n").is_err());
        assert!(parse_signal_csv("t,re,im\n0,1,0\n", "sample_rate=-1\n").is_err());
        assert!(parse_signal_csv("t,re,im\n0,1,0\n", "rate=1\n").is_err());
        assert!(parse_signal_csv("t,re,im\n0,inf,0\n", meta).is_err());
    }
}
