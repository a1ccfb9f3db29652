use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// An m₀ grid; the endpoints are always included exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub log: bool,
}

impl Grid {
    pub fn new(min: f64, max: f64, steps: usize, log: bool) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(CliError::Usage(format!(
                "grid needs min < max, got [{min}, {max}]"
            )));
        }
        if steps < 2 {
            return Err(CliError::Usage(format!(
                "grid needs at least 2 steps, got {steps}"
            )));
        }
        if min <= 0.0 {
            return Err(CliError::Usage(format!(
                "masses must be positive, got min = {min}"
            )));
        }
        Ok(Self {
            min,
            max,
            steps,
            log,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    return self.max;
                }
                let f = i as f64 / last as f64;
                if self.log {
                    (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + f * (self.max - self.min)
                }
            })
            .collect()
    }

    /// One-line description written into CSV headers.
    pub fn describe(&self) -> String {
        format!(
            "m0 in [{}, {}], {} points, {} spacing",
            self.min,
            self.max,
            self.steps,
            if self.log { "log" } else { "linear" }
        )
    }
}
