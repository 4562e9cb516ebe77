//! File emission: trajectory and metrics CSV, sweep CSV and JSON documents.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which
//! round-trips f64 exactly and keeps files byte-stable across runs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::experiments::{Comparison, SweepGrid};
use crate::metrics::MetricSeries;

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io("<csv>", source),
        other => Error::Numerical(format!("csv encoding failed: {other:?}")),
    }
}

pub fn trajectory_header(dim: usize) -> Vec<String> {
    let mut h = vec!["t_ps".to_string()];
    for i in 1..=dim {
        for j in i..=dim {
            if i == j {
                h.push(format!("rho{i}{j}"));
            } else {
                h.push(format!("rho{i}{j}_re"));
                h.push(format!("rho{i}{j}_im"));
            }
        }
    }
    h
}

pub fn write_trajectory_csv<W: Write>(w: W, traj: &Trajectory) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(trajectory_header(traj.dim())).map_err(csv_err)?;
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![fmt_f64(*t)];
        let d = rho.dim();
        for i in 0..d {
            for j in i..d {
                let c = rho.get(i, j);
                row.push(fmt_f64(c.re));
                if i != j {
                    row.push(fmt_f64(c.im));
                }
            }
        }
        wr.write_record(&row).map_err(csv_err)?;
    }
    wr.flush().map_err(|e| Error::io("<csv>", e))
}

pub fn write_metrics_csv<W: Write>(w: W, s: &MetricSeries) -> Result<()> {
    let mut wr = csv_writer(w);
    let d = s.populations.len();
    let mut header = vec!["t_ps".to_string()];
    header.extend((1..=d).map(|n| format!("P{n}")));
    header.extend(["E_eV", "P_W", "W_eV", "R", "purity"].map(String::from));
    wr.write_record(&header).map_err(csv_err)?;
    for i in 0..s.len() {
        let mut row = vec![fmt_f64(s.times[i])];
        row.extend(s.populations.iter().map(|p| fmt_f64(p[i])));
        for v in [s.energy[i], s.power[i], s.ergotropy[i], s.ratio[i], s.purity[i]] {
            row.push(fmt_f64(v));
        }
        wr.write_record(&row).map_err(csv_err)?;
    }
    wr.flush().map_err(|e| Error::io("<csv>", e))
}

/// `ip, is, E_eV, R` per cell; failed cells leave the values empty.
pub fn write_sweep_csv<W: Write>(w: W, g: &SweepGrid) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(["ip", "is", "E_eV", "R"]).map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for c in &g.cells {
        wr.write_record([fmt_f64(c.ip), fmt_f64(c.is), opt(c.e_sta), opt(c.ratio)]).map_err(csv_err)?;
    }
    wr.flush().map_err(|e| Error::io("<csv>", e))
}

/// Plot-ready comparison data: one line per element pair.
pub fn write_comparison_csv<W: Write>(w: W, c: &Comparison) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record([
        "element",
        "Z",
        "nuclear_id",
        "atomic_id",
        "E_nuclear_eV",
        "E_atomic_eV",
        "energy_ratio",
        "P_nuclear_W",
        "P_atomic_W",
        "power_ratio",
        "lifetime_s",
    ])
    .map_err(csv_err)?;
    for r in &c.rows {
        wr.write_record([
            r.element.clone(),
            r.z.map(|z| z.to_string()).unwrap_or_default(),
            r.nuclear_id.clone(),
            r.atomic_id.clone(),
            fmt_f64(r.e_nuclear),
            fmt_f64(r.e_atomic),
            fmt_f64(r.energy_ratio),
            fmt_f64(r.p_nuclear),
            fmt_f64(r.p_atomic),
            fmt_f64(r.power_ratio),
            r.lifetime_s.map(fmt_f64).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    wr.flush().map_err(|e| Error::io("<csv>", e))
}

/// Pretty JSON with every float in 17-significant-digit form.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Numerical(format!("JSON encoding failed: {e}")))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n("  ", n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => out.push_str(&u.to_string()),
            (_, Some(i), _) => out.push_str(&i.to_string()),
            (_, _, Some(f)) => out.push_str(&format!("{f:.16e}")),
            _ => out.push_str(&n.to_string()),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Creates `dir` (and parents) if needed.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes through `f` into `dir/name` and returns the path.
pub fn write_file(dir: &Path, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(&path, source),
        other => other,
    })?;
    fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn write_json_file<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let text = to_json_string(value)?;
    write_file(dir, name, |buf| {
        buf.extend_from_slice(text.as_bytes());
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(80240.0), "8.0240000000000000e4");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
        let x = 1.0 / 3.0;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn json_numbers_round_trip() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            n: usize,
            s: &'static str,
            v: Vec<f64>,
            o: Option<f64>,
        }
        let text = to_json_string(&S { a: 1.0 / 7.0, n: 3, s: "q\"x", v: vec![], o: None }).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"].as_f64().unwrap(), 1.0 / 7.0);
        assert_eq!(back["n"].as_u64().unwrap(), 3);
        assert_eq!(back["s"], "q\"x");
        assert!(back["o"].is_null());
        assert!(text.contains("\"a\": 1.4285714285714285e-1"));
    }

    #[test]
    fn trajectory_columns() {
        assert_eq!(trajectory_header(2), ["t_ps", "rho11", "rho12_re", "rho12_im", "rho22"]);
        assert_eq!(trajectory_header(3).len(), 10);
    }

    #[test]
    fn unwritable_directory() {
        let tmp = tempfile::tempdir().unwrap();
        let file = tmp.path().join("plain");
        fs::write(&file, b"x").unwrap();
        let err = write_json_file(&file, "a.json", &1.0).unwrap_err();
        assert!(matches!(err, Error::Io { ref path, .. } if path.ends_with("a.json")));
    }
}
