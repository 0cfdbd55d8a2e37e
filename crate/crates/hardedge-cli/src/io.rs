//! Output formats: CSV (header row, comma, LF), JSON, raw `f64` samples and
//! the run manifest that every data file points back to.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::mc::McResult;

/// 17 significant digits; `NaN` and infinities spelled out.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Field for an optional value: empty when absent.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

/// Finite numbers as JSON numbers, everything else as `null`.
pub fn jnum(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            other => CliError::Usage(format!("{}: {other:?}", path.display())),
        })?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    fs::write(path, s).map_err(|e| CliError::io(path, e))
}

/// Read `(x, y)` pairs from the named columns of a CSV file.
pub fn read_pairs(path: &Path, x_col: &str, y_col: &str) -> CliResult<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Usage(format!("{}: {other:?}", path.display())),
    })?;
    let headers = r.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Usage(format!("{}: no column {name:?}", path.display())))
    };
    let (ix, iy) = (find(x_col)?, find(y_col)?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> CliResult<Option<f64>> {
            let f = rec.get(i).unwrap_or("").trim();
            if f.is_empty() {
                return Ok(None);
            }
            f.parse::<f64>().map(Some).map_err(|_| CliError::Usage(format!("{}: bad number {f:?}", path.display())))
        };
        if let (Some(x), Some(y)) = (parse(ix)?, parse(iy)?) {
            out.push((x, y));
        }
    }
    Ok(out)
}

/// Little-endian `f64` array plus a JSON sidecar with the configuration.
pub fn write_samples(path: &Path, result: &McResult) -> CliResult<PathBuf> {
    let bytes: Vec<u8> = result.lambda_min.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))?;
    let cfg = &result.config;
    let sidecar = path.with_extension("json");
    write_json(
        &sidecar,
        &json!({
            "format": "f64 little-endian, one value per sample, indexed by sample",
            "count": result.lambda_min.len(),
            "m": cfg.m,
            "n0": cfg.n0,
            "nu": cfg.nu,
            "samples": cfg.samples,
            "seed": cfg.seed,
            "variance": cfg.variance.name(),
            "scaled": result.scaled,
            "rng": "ChaCha12, stream = sample index",
        }),
    )?;
    Ok(sidecar)
}

pub fn read_samples(path: &Path) -> CliResult<Vec<f64>> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.len() % 8 != 0 {
        return Err(CliError::Usage(format!("{}: length is not a multiple of 8", path.display())));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    pub seeds: Vec<u64>,
    pub started: f64,
    pub outputs: Vec<PathBuf>,
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

impl RunManifest {
    pub fn new(command: &str, params: Value, seeds: Vec<u64>) -> Self {
        Self { command: command.into(), params, seeds, started: unix_now(), outputs: Vec::new() }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "params": self.params,
            "seeds": self.seeds,
            "started_unix": self.started,
            "finished_unix": unix_now(),
            "outputs": self.outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        })
    }

    /// Writes `manifest.json` in `dir` and returns its path.
    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let p = dir.join("manifest.json");
        write_json(&p, &self.to_json())?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{sample_min_singular_sq, McConfig};

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, -15.826846765594, 1.0 / 3.0, 6.02e23, -0.0, 5e-324] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt17(f64::NAN), "NaN");
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn csv_round_trip_and_lf() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_csv(&p, &["r", "v"], &[vec!["1".into(), fmt17(-0.5)], vec!["2".into(), String::new()]]).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(!text.contains('\r'));
        assert_eq!(read_pairs(&p, "r", "v").unwrap(), vec![(1.0, -0.5)]);
        assert!(read_pairs(&p, "r", "missing").is_err());
    }

    #[test]
    fn samples_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let r = sample_min_singular_sq(&McConfig::new(1, 3, vec![1], 20, 4)).unwrap();
        let p = dir.path().join("s.bin");
        let side = write_samples(&p, &r).unwrap();
        assert_eq!(read_samples(&p).unwrap(), r.lambda_min);
        let v: Value = serde_json::from_str(&fs::read_to_string(side).unwrap()).unwrap();
        assert_eq!(v["seed"], 4);
    }
}
