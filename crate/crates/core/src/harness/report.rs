use super::config::{ExperimentConfig, Tolerances};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

/// Outcome of one check against a named tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    /// Field of [`Tolerances`] the check uses.
    pub tolerance: String,
    pub basis: String,
    pub rule: String,
    pub statistic: f64,
    pub target: f64,
    pub pass: bool,
}

impl Verdict {
    fn new(check: &str, tolerance: &str, rule: String, statistic: f64, target: f64, pass: bool) -> Self {
        Verdict {
            check: check.to_string(),
            tolerance: tolerance.to_string(),
            basis: Tolerances::basis(tolerance).to_string(),
            rule,
            statistic,
            target,
            pass,
        }
    }

    /// `|mean - target| <= mult * se`; the statistic is the z-score.
    pub fn within_se(check: &str, tolerance: &str, mult: f64, mean: f64, se: f64, target: f64) -> Self {
        let z = (mean - target) / se;
        Verdict::new(check, tolerance, format!("|z| <= {mult}"), z, target, z.abs() <= mult)
    }

    /// `|value / target - 1| <= rel`.
    pub fn relative(check: &str, tolerance: &str, rel: f64, value: f64, target: f64) -> Self {
        let dev = value / target - 1.0;
        Verdict::new(check, tolerance, format!("|value/target - 1| <= {rel}"), value, target, dev.abs() <= rel)
    }

    /// `|value - target| <= abs`.
    pub fn absolute(check: &str, tolerance: &str, abs: f64, value: f64, target: f64) -> Self {
        Verdict::new(check, tolerance, format!("|value - target| <= {abs}"), value, target, (value - target).abs() <= abs)
    }

    /// `value < bound`.
    pub fn below(check: &str, tolerance: &str, value: f64, bound: f64) -> Self {
        Verdict::new(check, tolerance, format!("value < {bound}"), value, bound, value < bound)
    }

    /// `value >= bound`.
    pub fn at_least(check: &str, tolerance: &str, value: f64, bound: f64) -> Self {
        Verdict::new(check, tolerance, format!("value >= {bound}"), value, bound, value >= bound)
    }
}

/// Plot data: named columns of numbers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:?}"))).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Everything in a report except its run time; identical for identical
/// configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    /// Theoretical values, each computed by library calls.
    pub targets: BTreeMap<String, f64>,
    /// Aggregates, z-scores and distances.
    pub statistics: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
    /// Per-replicate statistics and plot data.
    pub tables: BTreeMap<String, Table>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    #[serde(flatten)]
    pub body: ReportBody,
    pub runtime_seconds: f64,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.body.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, check: &str) -> Option<&Verdict> {
        self.body.verdicts.iter().find(|v| v.check == check)
    }

    pub fn statistic(&self, name: &str) -> Option<f64> {
        self.body.statistics.get(name).copied()
    }

    pub fn target(&self, name: &str) -> Option<f64> {
        self.body.targets.get(name).copied()
    }

    /// Report body as JSON, without run time.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report serializes")
    }

    /// Writes `report.json` and one `<table>.csv` per table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self).expect("report serializes"))?;
        for (name, table) in &self.body.tables {
            table.write_csv(&dir.join(format!("{name}.csv")))?;
        }
        Ok(())
    }
}

/// Accumulates the body of a report.
pub(crate) struct Builder {
    pub body: ReportBody,
}

impl Builder {
    pub fn new(config: &ExperimentConfig) -> Self {
        Builder {
            body: ReportBody {
                experiment: config.experiment.name().to_string(),
                config: config.clone(),
                master_seed: config.master_seed,
                targets: BTreeMap::new(),
                statistics: BTreeMap::new(),
                verdicts: Vec::new(),
                tables: BTreeMap::new(),
                notes: Vec::new(),
            },
        }
    }

    pub fn target(&mut self, name: impl Into<String>, v: f64) {
        self.body.targets.insert(name.into(), v);
    }

    pub fn stat(&mut self, name: impl Into<String>, v: f64) {
        self.body.statistics.insert(name.into(), v);
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.body.verdicts.push(v);
    }

    pub fn table(&mut self, name: &str, t: Table) {
        self.body.tables.insert(name.to_string(), t);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.body.notes.push(s.into());
    }
}
