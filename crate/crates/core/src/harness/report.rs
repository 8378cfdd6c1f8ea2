//! CSV and JSON rendering of sweep rows.

use std::collections::BTreeMap;
use std::io::Write;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::harness::config::SweepConfig;
use crate::harness::sweep::{axes, is_asserted, Outcome, Row};
use crate::verify::{ParamValue, Target};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub target: Target,
    pub rows: usize,
    pub evaluated: usize,
    pub skipped: usize,
    pub max_ratio: Option<f64>,
    pub max_ratio_by_r: BTreeMap<u64, f64>,
    pub c_assert: f64,
    pub asserted: bool,
}

impl Summary {
    pub fn of(cfg: &SweepConfig, rows: &[Row]) -> Self {
        let mut max_ratio: Option<f64> = None;
        let mut by_r = BTreeMap::new();
        let mut evaluated = 0;
        for row in rows {
            if let Some(rep) = row.report() {
                evaluated += 1;
                let worse = |m: Option<f64>| match m {
                    Some(m) if !(rep.ratio > m) => m,
                    _ => rep.ratio,
                };
                max_ratio = Some(worse(max_ratio));
                if let Some(r) = row.input("r").and_then(|r| r.parse::<u64>().ok()) {
                    let e = by_r.entry(r).or_insert(rep.ratio);
                    if rep.ratio > *e {
                        *e = rep.ratio;
                    }
                }
            }
        }
        Summary {
            target: cfg.target,
            rows: rows.len(),
            evaluated,
            skipped: rows.len() - evaluated,
            max_ratio,
            max_ratio_by_r: by_r,
            c_assert: cfg.c_assert,
            asserted: is_asserted(cfg.target),
        }
    }

    /// True unless a held target has a ratio above the ceiling.
    pub fn passes(&self) -> bool {
        !self.asserted
            || self
                .max_ratio
                .is_none_or(|m| m.is_finite() && m <= self.c_assert)
    }
}

fn flags_field(flags: &[(&'static str, bool)]) -> String {
    flags
        .iter()
        .map(|(k, v)| format!("{k}={}", u8::from(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

fn params_field(params: &[(&'static str, ParamValue)]) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn header(cfg: &SweepConfig) -> Vec<String> {
    let mut cols = vec!["index".to_string()];
    cols.extend(axes(cfg.target).into_iter().map(|a| a.name().to_string()));
    for c in ["status", "lhs", "rhs", "ratio", "trivial_bound", "flags", "params"] {
        cols.push(c.to_string());
    }
    if cfg.record_timing {
        cols.push("wall_time".to_string());
    }
    cols.push("reason".to_string());
    cols
}

fn record(cfg: &SweepConfig, row: &Row) -> Vec<String> {
    let mut out = vec![row.index.to_string()];
    out.extend(row.inputs.iter().map(|(_, v)| v.clone()));
    let reason = match &row.outcome {
        Outcome::Done(rep) => {
            out.push("ok".into());
            out.push(rep.lhs.to_string());
            out.push(rep.rhs.to_string());
            out.push(rep.ratio.to_string());
            out.push(rep.trivial_bound.map(|t| t.to_string()).unwrap_or_default());
            out.push(flags_field(&rep.flags));
            out.push(params_field(&rep.params));
            String::new()
        }
        Outcome::Skipped(reason) => {
            out.push("skipped".into());
            out.extend(std::iter::repeat_n(String::new(), 6));
            reason.clone()
        }
    };
    if cfg.record_timing {
        out.push(row.wall_time.map(|t| t.to_string()).unwrap_or_default());
    }
    out.push(reason);
    out
}

pub fn write_csv<W: Write>(cfg: &SweepConfig, rows: &[Row], summary: &Summary, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("write failed: {e}"));
    writeln!(out, "# schema={SCHEMA_VERSION}").map_err(io)?;
    writeln!(out, "# target={}", cfg.target).map_err(io)?;
    {
        let mut w = csv::WriterBuilder::new().from_writer(&mut out);
        let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
        w.write_record(header(cfg)).map_err(csv_err)?;
        for row in rows {
            w.write_record(record(cfg, row)).map_err(csv_err)?;
        }
        w.flush().map_err(io)?;
    }
    for (r, m) in &summary.max_ratio_by_r {
        writeln!(out, "# max_ratio r={r} value={m}").map_err(io)?;
    }
    match summary.max_ratio {
        Some(m) => writeln!(out, "# max_ratio all value={m}").map_err(io)?,
        None => writeln!(out, "# max_ratio all value=none").map_err(io)?,
    }
    writeln!(
        out,
        "# rows total={} evaluated={} skipped={}",
        summary.rows, summary.evaluated, summary.skipped
    )
    .map_err(io)?;
    let verdict = if !summary.asserted {
        "unchecked"
    } else if summary.passes() {
        "pass"
    } else {
        "fail"
    };
    writeln!(out, "# ceiling C_assert={} result={verdict}", summary.c_assert).map_err(io)?;
    Ok(())
}

pub fn param_json(v: &ParamValue) -> Value {
    match v {
        ParamValue::Int(i) => Value::from(*i),
        ParamValue::Float(f) => float_json(*f),
        ParamValue::Text(s) => Value::from(s.as_str()),
    }
}

/// Finite floats as numbers; infinities as strings, since JSON has none.
pub fn float_json(f: f64) -> Value {
    serde_json::Number::from_f64(f).map_or_else(|| Value::from(f.to_string()), Value::Number)
}

/// Grid inputs that parse as integers become JSON numbers.
fn input_json(s: &str) -> Value {
    if let Ok(i) = s.parse::<i64>() {
        Value::from(i)
    } else if let Ok(f) = s.parse::<f64>() {
        float_json(f)
    } else {
        Value::from(s)
    }
}

/// A flat key to scalar object for one row.
pub fn row_json(row: &Row) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("target".into(), Value::from(row.target.as_str()));
    for (k, v) in &row.inputs {
        m.insert((*k).into(), input_json(v));
    }
    match &row.outcome {
        Outcome::Done(rep) => {
            m.insert("status".into(), Value::from("ok"));
            m.insert("lhs".into(), float_json(rep.lhs));
            m.insert("rhs".into(), float_json(rep.rhs));
            m.insert("ratio".into(), float_json(rep.ratio));
            if let Some(t) = rep.trivial_bound {
                m.insert("trivial_bound".into(), float_json(t));
            }
            for (k, v) in &rep.flags {
                m.insert((*k).into(), Value::from(*v));
            }
            for (k, v) in &rep.params {
                m.entry(*k).or_insert_with(|| param_json(v));
            }
        }
        Outcome::Skipped(reason) => {
            m.insert("status".into(), Value::from("skipped"));
            m.insert("reason".into(), Value::from(reason.as_str()));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::sweep::run_sweep;

    #[test]
    fn csv_has_schema_header_and_summary() {
        let mut cfg = SweepConfig::defaults(Target::Cishz);
        cfg.primes = vec![101];
        cfg.seeds = vec![1];
        let rows = run_sweep(&cfg, 1).unwrap();
        let summary = Summary::of(&cfg, &rows);
        let mut buf = Vec::new();
        write_csv(&cfg, &rows, &summary, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema=1");
        assert!(lines[2].starts_with("index,r,seed,eps,X,U,status"));
        assert_eq!(lines.len(), 3 + rows.len() + 4);
        assert!(text.contains("# ceiling C_assert=64 result=pass"));
        assert!(!text.contains("NaN"));
    }
}
