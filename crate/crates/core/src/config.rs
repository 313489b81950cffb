//! Run configuration shared by the certifiers and the CLI.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::window::WindowSchedule;

/// Tunable parameters for certification runs.
///
/// All fields have documented defaults; [`RunConfig::validate`] rejects
/// nonsensical values rather than letting them skew verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Residual tolerance for `converges` / `holds` verdicts.
    pub tol: f64,
    /// Sup growth ratio between consecutive windows that counts as divergence
    /// evidence.
    pub growth_factor: f64,
    /// Number of leading rows and columns the regular-convergence certifier
    /// checks as one-dimensional sequences.
    pub fringe: usize,
    /// Sides of the square windows the certifiers walk, strictly increasing.
    pub schedule: Vec<usize>,
    /// Entrywise and row/column conditions are checked for indices in
    /// `[0..=prefix_p]`.
    pub prefix_p: usize,
    /// Hard cap on cells per materialized window.
    pub cell_cap: u64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            tol: 1e-8,
            growth_factor: 2.0,
            fringe: 4,
            schedule: vec![8, 16, 32, 64, 128, 256, 512, 1024],
            prefix_p: 16,
            cell_cap: 1 << 26,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.growth_factor > 1.0 && self.growth_factor.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "growth_factor must exceed 1, got {}",
                self.growth_factor
            )));
        }
        if self.cell_cap == 0 {
            return Err(Error::InvalidConfig("cell_cap must be positive".into()));
        }
        let schedule = self.window_schedule()?;
        if schedule.largest().cells() > self.cell_cap {
            return Err(Error::InvalidConfig(format!(
                "largest schedule window has {} cells, above the cap of {}",
                schedule.largest().cells(),
                self.cell_cap
            )));
        }
        Ok(())
    }

    pub fn window_schedule(&self) -> Result<WindowSchedule> {
        WindowSchedule::squares(&self.schedule)
    }

    /// Parses a JSON object with any subset of the fields, filling the rest
    /// from the defaults.
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
