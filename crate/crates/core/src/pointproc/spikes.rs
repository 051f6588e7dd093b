use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One recorded unit: `trials[k]` holds the sorted event times of trial `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub id: u64,
    pub trials: Vec<Vec<f64>>,
}

impl Unit {
    pub fn total_count(&self) -> usize {
        self.trials.iter().map(Vec::len).sum()
    }

    /// Per-trial counts `N_k`.
    pub fn counts(&self) -> Vec<usize> {
        self.trials.iter().map(Vec::len).collect()
    }
}

/// `n` units observed over `K` independent trials on `[0, window]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeData {
    pub window: f64,
    pub units: Vec<Unit>,
}

impl SpikeData {
    /// Validates and wraps the units.
    pub fn new(window: f64, units: Vec<Unit>) -> Result<Self> {
        let data = SpikeData { window, units };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(Error::domain(format!("window must be > 0, got {}", self.window)));
        }
        let trials = self.trials();
        for unit in &self.units {
            if unit.trials.len() != trials {
                return Err(Error::domain(format!(
                    "unit {} has {} trials, expected {trials}",
                    unit.id,
                    unit.trials.len()
                )));
            }
            for (k, trial) in unit.trials.iter().enumerate() {
                if let Some(&t) = trial.iter().find(|t| !(0.0..=self.window).contains(*t)) {
                    return Err(Error::domain(format!(
                        "unit {}, trial {k}: time {t} outside [0, {}]",
                        unit.id, self.window
                    )));
                }
                if let Some(i) = trial.windows(2).position(|w| w[0] >= w[1]) {
                    return Err(Error::domain(format!(
                        "unit {}, trial {k}: times not strictly increasing at index {}",
                        unit.id,
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    /// Trial count `K` (taken from the first unit).
    pub fn trials(&self) -> usize {
        self.units.first().map_or(0, |u| u.trials.len())
    }

    pub fn single_unit(&self) -> Result<&Unit> {
        match self.units.as_slice() {
            [u] => Ok(u),
            _ => Err(Error::domain(format!(
                "expected spike data for one unit, got {}",
                self.units.len()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(id: u64, trials: Vec<Vec<f64>>) -> Unit {
        Unit { id, trials }
    }

    #[test]
    fn accepts_closed_interval() {
        let d = SpikeData::new(1.0, vec![unit(0, vec![vec![0.0, 0.5, 1.0], vec![]])]).unwrap();
        assert_eq!(d.trials(), 2);
        assert_eq!(d.units[0].counts(), vec![3, 0]);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(SpikeData::new(1.0, vec![unit(0, vec![vec![0.5, 0.5]])]).is_err());
        assert!(SpikeData::new(1.0, vec![unit(0, vec![vec![1.5]])]).is_err());
        assert!(SpikeData::new(1.0, vec![unit(0, vec![vec![]]), unit(1, vec![vec![], vec![]])]).is_err());
        assert!(SpikeData::new(0.0, vec![]).is_err());
    }
}
