use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::case::CaseKind;
use super::convergence::{ConvergenceConfig, OutputFormat};
use crate::forms::PlateMaterial;
use crate::schemes::SchemeKind;
use crate::Result;

/// JSON mirror of the `run` command line. Every field is optional in the
/// file; missing ones take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    pub t: f64,
    pub levels: usize,
    pub case: CaseKind,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub young: f64,
    pub poisson: f64,
    pub reference: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let m = PlateMaterial::default();
        Self {
            scheme: SchemeKind::RmMixed,
            t: 1e-2,
            levels: 3,
            case: CaseKind::Rm,
            out: None,
            format: OutputFormat::Csv,
            young: m.young,
            poisson: m.poisson,
            reference: true,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn convergence(&self) -> Result<ConvergenceConfig> {
        let mut c = ConvergenceConfig::new(self.scheme, self.case, self.t, self.levels);
        c.material = PlateMaterial::new(self.young, self.poisson, self.t.max(0.0))?;
        c.reference = self.reference;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_files_use_defaults() {
        let c: RunConfig =
            serde_json::from_str(r#"{"scheme": "k-mixed", "case": "kirchhoff", "levels": 2}"#)
                .unwrap();
        assert_eq!(c.scheme, SchemeKind::KMixed);
        assert_eq!(c.levels, 2);
        assert_eq!(c.format, OutputFormat::Csv);
        assert!(serde_json::from_str::<RunConfig>(r#"{"levles": 2}"#).is_err());
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), c);
    }
}
