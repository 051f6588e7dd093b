//! File formats.
//!
//! - Spikes: JSON `{"t_start": 0, "t_end": T, "units": [{"id": 0, "trials": [[t, ...], ...]}]}`.
//! - Signals: CSV with header `time,ch0_re,ch0_im,...` on a uniform grid, plus
//!   a sidecar `<stem>.meta.json` holding `{"dt", "T", "p", "whitened"}`.
//!
//! Floats are written in shortest round-trip form, so a write/read cycle is
//! lossless.

use crate::error::{Error, Result};
use crate::pointproc::{SpikeData, Unit};
use crate::signals::SignalMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

fn parse_error(file: &str, location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.to_string(),
        location: location.into(),
        message: message.into(),
    }
}

fn json_error(file: &str, e: &serde_json::Error) -> Error {
    parse_error(file, format!("line {}, column {}", e.line(), e.column()), e.to_string())
}

#[derive(Serialize)]
struct SpikeFileOut<'a> {
    t_start: f64,
    t_end: f64,
    units: &'a [Unit],
}

pub fn spikes_to_json(data: &SpikeData) -> String {
    let doc = SpikeFileOut {
        t_start: 0.0,
        t_end: data.window,
        units: &data.units,
    };
    serde_json::to_string(&doc).expect("spike data serializes")
}

fn number(file: &str, v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| parse_error(file, path, format!("expected a finite number, found {v}")))
}

/// Parses a spike document; `file` names the source in diagnostics.
pub fn spikes_from_json(text: &str, file: &str) -> Result<SpikeData> {
    let doc: Value = serde_json::from_str(text).map_err(|e| json_error(file, &e))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| parse_error(file, "$", "expected a JSON object"))?;
    let field = |name: &str| {
        obj.get(name)
            .ok_or_else(|| parse_error(file, format!("$.{name}"), "missing field"))
    };
    let t_start = number(file, field("t_start")?, "$.t_start")?;
    if t_start != 0.0 {
        return Err(parse_error(file, "$.t_start", format!("must be 0, found {t_start}")));
    }
    let t_end = number(file, field("t_end")?, "$.t_end")?;
    if !(t_end > 0.0) {
        return Err(parse_error(file, "$.t_end", format!("must be > 0, found {t_end}")));
    }
    let units_v = field("units")?
        .as_array()
        .ok_or_else(|| parse_error(file, "$.units", "expected an array"))?;
    let mut units = Vec::with_capacity(units_v.len());
    let mut expected_trials = None;
    for (u, unit_v) in units_v.iter().enumerate() {
        let here = format!("$.units[{u}]");
        let id = unit_v
            .get("id")
            .and_then(Value::as_u64)
            .ok_or_else(|| parse_error(file, format!("{here}.id"), "expected a nonnegative integer id"))?;
        let trials_v = unit_v
            .get("trials")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_error(file, format!("{here}.trials"), "expected an array of trials"))?;
        match expected_trials {
            None => expected_trials = Some(trials_v.len()),
            Some(k) if k != trials_v.len() => {
                return Err(parse_error(
                    file,
                    format!("{here}.trials"),
                    format!("{} trials, but earlier units have {k}", trials_v.len()),
                ))
            }
            _ => {}
        }
        let mut trials = Vec::with_capacity(trials_v.len());
        for (k, trial_v) in trials_v.iter().enumerate() {
            let at = format!("{here}.trials[{k}]");
            let arr = trial_v
                .as_array()
                .ok_or_else(|| parse_error(file, at.clone(), "expected an array of times"))?;
            let mut times = Vec::with_capacity(arr.len());
            for (i, tv) in arr.iter().enumerate() {
                let loc = format!("{at}[{i}]");
                let t = number(file, tv, &loc)?;
                if !(0.0..=t_end).contains(&t) {
                    return Err(parse_error(file, loc, format!("time {t} outside [0, {t_end}]")));
                }
                if let Some(&prev) = times.last() {
                    if t <= prev {
                        return Err(parse_error(file, loc, format!("time {t} does not increase (previous {prev})")));
                    }
                }
                times.push(t);
            }
            trials.push(times);
        }
        units.push(Unit { id, trials });
    }
    Ok(SpikeData {
        window: t_end,
        units,
    })
}

pub fn write_spikes(path: &Path, data: &SpikeData) -> Result<()> {
    fs::write(path, spikes_to_json(data))?;
    Ok(())
}

pub fn read_spikes(path: &Path) -> Result<SpikeData> {
    let text = fs::read_to_string(path)?;
    spikes_from_json(&text, &path.display().to_string())
}

/// Sidecar metadata of a signal CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalMeta {
    pub dt: f64,
    #[serde(rename = "T")]
    pub window: f64,
    pub p: usize,
    pub whitened: bool,
}

/// `x.csv` -> `x.meta.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

pub fn write_signals_csv<W: Write>(out: W, m: &SignalMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let p = m.channel_count();
    let mut header = vec!["time".to_string()];
    for c in 0..p {
        header.push(format!("ch{c}_re"));
        header.push(format!("ch{c}_im"));
    }
    w.write_record(&header).map_err(csv_io)?;
    let mut row = Vec::with_capacity(2 * p + 1);
    for k in 0..m.sample_count() {
        row.clear();
        row.push(format!("{:?}", m.time(k)));
        for z in m.samples_at(k) {
            row.push(format!("{:?}", z.re));
            row.push(format!("{:?}", z.im));
        }
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes the CSV and its sidecar.
pub fn write_signals(csv_path: &Path, m: &SignalMatrix) -> Result<()> {
    let file = fs::File::create(csv_path)?;
    write_signals_csv(std::io::BufWriter::new(file), m)?;
    let meta = SignalMeta {
        dt: m.dt(),
        window: m.window(),
        p: m.channel_count(),
        whitened: m.is_whitened(),
    };
    fs::write(sidecar_path(csv_path), serde_json::to_string_pretty(&meta).expect("metadata serializes"))?;
    Ok(())
}

/// Parses signal CSV text against its metadata.
pub fn signals_from_csv(text: &str, meta: &SignalMeta, file: &str) -> Result<SignalMatrix> {
    if !(meta.dt.is_finite() && meta.dt > 0.0) {
        return Err(parse_error(file, "metadata dt", format!("must be > 0, found {}", meta.dt)));
    }
    if meta.p == 0 {
        return Err(parse_error(file, "metadata p", "must be >= 1"));
    }
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| parse_error(file, "line 1", e.to_string()))?
        .clone();
    let want = 2 * meta.p + 1;
    if header.len() != want {
        return Err(parse_error(
            file,
            "line 1",
            format!("header has {} columns, expected {want} for p = {}", header.len(), meta.p),
        ));
    }
    for (i, name) in header.iter().enumerate() {
        let expected = match i {
            0 => "time".to_string(),
            _ if i % 2 == 1 => format!("ch{}_re", (i - 1) / 2),
            _ => format!("ch{}_im", (i - 1) / 2),
        };
        if name.trim() != expected {
            return Err(parse_error(file, "line 1", format!("column {} is {name:?}, expected {expected:?}", i + 1)));
        }
    }
    let mut data = Vec::new();
    let mut rows = 0usize;
    for (idx, record) in r.records().enumerate() {
        let line = format!("line {}", idx + 2);
        let record = record.map_err(|e| parse_error(file, line.clone(), e.to_string()))?;
        if record.len() != want {
            return Err(parse_error(file, line, format!("{} fields, expected {want}", record.len())));
        }
        let mut values = record.iter().enumerate().map(|(c, s)| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_error(file, format!("{line}, column {}", c + 1), format!("not a finite number: {s:?}")))
        });
        let t = values.next().expect("record is non-empty")?;
        let grid = idx as f64 * meta.dt;
        if (t - grid).abs() > 1e-6 * meta.dt {
            return Err(parse_error(file, line, format!("time {t} is off the grid point {grid}")));
        }
        while let Some(re) = values.next() {
            let im = values.next().expect("columns come in pairs")?;
            data.push(Complex64::new(re?, im));
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(parse_error(file, "line 2", "no samples"));
    }
    if (rows as f64 * meta.dt - meta.window).abs() > 0.5 * meta.dt {
        return Err(parse_error(
            file,
            format!("line {}", rows + 1),
            format!("{rows} rows of dt = {} do not cover T = {}", meta.dt, meta.window),
        ));
    }
    SignalMatrix::from_time_major(meta.dt, meta.p, data, meta.whitened)
}

pub fn read_signal_meta(path: &Path) -> Result<SignalMeta> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| json_error(&path.display().to_string(), &e))
}

/// Reads a signal CSV and its sidecar metadata.
pub fn read_signals(csv_path: &Path) -> Result<SignalMatrix> {
    let meta = read_signal_meta(&sidecar_path(csv_path))?;
    let text = fs::read_to_string(csv_path)?;
    signals_from_csv(&text, &meta, &csv_path.display().to_string())
}

/// Deserializes a JSON document, reporting the line and column of any error.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, file: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| json_error(file, &e))
}
