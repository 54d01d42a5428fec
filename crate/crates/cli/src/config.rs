//! Settings layered as defaults, config file, environment, flags.

use std::path::Path;

use philophase::Precision;
use serde::Deserialize;

use crate::CliError;

pub const MAX_CUTOFF_ENV: &str = "PHILOPHASE_MAX_CUTOFF";

#[derive(Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub tail_tol: Option<f64>,
    pub phase_tol: Option<f64>,
    pub max_cutoff: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))
    }
}

/// Flag values; `None` leaves the lower layers in charge.
#[derive(Debug, Default)]
pub struct Overrides {
    pub tail_tol: Option<f64>,
    pub phase_tol: Option<f64>,
    pub max_cutoff: Option<usize>,
}

pub fn resolve(file: Option<&FileConfig>, env: Option<&str>, flags: &Overrides) -> Result<Precision, CliError> {
    let mut p = Precision::default();
    if let Some(f) = file {
        p.tail_tol = f.tail_tol.unwrap_or(p.tail_tol);
        p.phase_tol = f.phase_tol.unwrap_or(p.phase_tol);
        p.max_cutoff = f.max_cutoff.unwrap_or(p.max_cutoff);
    }
    if let Some(v) = env {
        p.max_cutoff = v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{MAX_CUTOFF_ENV} must be a positive integer, got {v:?}")))?;
    }
    p.tail_tol = flags.tail_tol.unwrap_or(p.tail_tol);
    p.phase_tol = flags.phase_tol.unwrap_or(p.phase_tol);
    p.max_cutoff = flags.max_cutoff.unwrap_or(p.max_cutoff);
    p.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layering() {
        let file = FileConfig { tail_tol: Some(1e-9), phase_tol: None, max_cutoff: Some(100) };
        let p = resolve(Some(&file), Some("200"), &Overrides::default()).unwrap();
        assert_eq!((p.tail_tol, p.phase_tol, p.max_cutoff), (1e-9, 1e-10, 200));
        let flags = Overrides { max_cutoff: Some(300), ..Overrides::default() };
        assert_eq!(resolve(Some(&file), Some("200"), &flags).unwrap().max_cutoff, 300);
        assert!(resolve(None, Some("lots"), &Overrides::default()).is_err());
        let flags = Overrides { tail_tol: Some(2.0), ..Overrides::default() };
        assert!(resolve(None, None, &flags).is_err());
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
