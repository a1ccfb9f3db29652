//! Optional JSON config; command-line flags take precedence over every field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub m0: Option<f64>,
    pub m0_min: Option<f64>,
    pub m0_max: Option<f64>,
    pub steps: Option<usize>,
    pub log_grid: Option<bool>,
    pub mu: Option<Vec<f64>>,
    pub lambda0: Option<f64>,
    pub tv: Option<f64>,
    pub order: Option<i32>,
    pub delta_cut: Option<f64>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub json: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_config() {
        let c: FileConfig = serde_json::from_str(r#"{"mu": [0.5, 1, 2], "steps": 300}"#).unwrap();
        assert_eq!(c.mu, Some(vec![0.5, 1.0, 2.0]));
        assert_eq!(c.steps, Some(300));
        assert_eq!(c.tv, None);
        assert!(serde_json::from_str::<FileConfig>(r#"{"colour": 1}"#).is_err());
    }
}
