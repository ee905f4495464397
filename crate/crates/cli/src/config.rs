//! Flag and configuration-file resolution.
//!
//! A run's parameters come from three layers: command-line flags, an optional
//! flat TOML file whose keys mirror the long flag names, and built-in
//! defaults. Flags override the file; the file overrides defaults. Keys not
//! used by the invoked command are ignored so one file can configure several
//! commands.

use std::path::{Path, PathBuf};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;

/// Parameter pairs (alpha, theta) fitted to the three reference data sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Dataset1,
    Dataset2,
    Dataset3,
}

impl Preset {
    pub fn params(self) -> (f64, f64) {
        match self {
            Preset::Dataset1 => (0.1760, 0.3472),
            Preset::Dataset2 => (0.2993, 1.2667),
            Preset::Dataset3 => (0.4450, 0.6453),
        }
    }

    fn from_key(name: &str) -> Result<Self, CliError> {
        match name {
            "dataset1" => Ok(Preset::Dataset1),
            "dataset2" => Ok(Preset::Dataset2),
            "dataset3" => Ok(Preset::Dataset3),
            other => Err(CliError::Usage(format!(
                "unknown preset {other:?}; expected dataset1, dataset2, or dataset3"
            ))),
        }
    }
}

/// The parsed configuration file; empty when no file was given.
#[derive(Debug, Default)]
pub struct ConfigFile {
    table: toml::Table,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let table = text.parse::<toml::Table>().map_err(|e| {
            CliError::Usage(format!("config file {} is not valid TOML: {e}", path.display()))
        })?;
        Ok(ConfigFile { table })
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Float(v)) => Ok(Some(*v)),
            Some(toml::Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(bad_type(key, "a number", other)),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
            Some(other) => Err(bad_type(key, "a nonnegative integer", other)),
        }
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>, CliError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Boolean(v)) => Ok(Some(*v)),
            Some(other) => Err(bad_type(key, "a boolean", other)),
        }
    }

    pub fn str(&self, key: &str) -> Result<Option<&str>, CliError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::String(v)) => Ok(Some(v)),
            Some(other) => Err(bad_type(key, "a string", other)),
        }
    }
}

fn bad_type(key: &str, expected: &str, got: &toml::Value) -> CliError {
    CliError::Usage(format!(
        "config key {key:?} must be {expected}, got {}",
        got.type_str()
    ))
}

/// Everything global to one invocation after resolution.
pub struct Context {
    pub seed: u64,
    pub workers: usize,
    pub file: ConfigFile,
    pub output: Option<PathBuf>,
}

impl Context {
    pub fn build(
        seed: Option<u64>,
        workers: Option<usize>,
        config_path: Option<&Path>,
        output: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let file = ConfigFile::load(config_path)?;
        let seed = match seed {
            Some(s) => s,
            None => file.u64("seed")?.unwrap_or(DEFAULT_SEED),
        };
        let workers = match workers {
            Some(w) => w,
            None => file.u64("workers")?.unwrap_or(0) as usize,
        };
        Ok(Context {
            seed,
            workers,
            file,
            output,
        })
    }

    /// flag > config file > default.
    pub fn resolve_f64(&self, flag: Option<f64>, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(flag.or(self.file.f64(key)?).unwrap_or(default))
    }

    pub fn resolve_u64(&self, flag: Option<u64>, key: &str, default: u64) -> Result<u64, CliError> {
        Ok(flag.or(self.file.u64(key)?).unwrap_or(default))
    }

    /// Resolve the counting-law parameters: an explicit (alpha, theta) pair
    /// or a preset naming one. A preset fixes both values; explicit flags
    /// conflict with it at the parser level, and file-level alpha/theta are
    /// ignored when a preset is in force.
    pub fn resolve_bt(
        &self,
        alpha: Option<f64>,
        theta: Option<f64>,
        preset: Option<Preset>,
    ) -> Result<(f64, f64), CliError> {
        let preset = match preset {
            Some(p) => Some(p),
            None if alpha.is_none() && theta.is_none() => {
                self.file.str("preset")?.map(Preset::from_key).transpose()?
            }
            None => None,
        };
        if let Some(p) = preset {
            return Ok(p.params());
        }
        let alpha = alpha.or(self.file.f64("alpha")?).ok_or_else(|| {
            CliError::Usage("--alpha (or --preset) is required".into())
        })?;
        let theta = theta.or(self.file.f64("theta")?).ok_or_else(|| {
            CliError::Usage("--theta (or --preset) is required".into())
        })?;
        Ok((alpha, theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> ConfigFile {
        ConfigFile {
            table: text.parse().unwrap(),
        }
    }

    #[test]
    fn typed_getters() {
        let f = file("alpha = 1.5\npaths = 10\nsummary = true\npreset = \"dataset2\"");
        assert_eq!(f.f64("alpha").unwrap(), Some(1.5));
        assert_eq!(f.f64("paths").unwrap(), Some(10.0));
        assert_eq!(f.u64("paths").unwrap(), Some(10));
        assert_eq!(f.bool("summary").unwrap(), Some(true));
        assert_eq!(f.str("preset").unwrap(), Some("dataset2"));
        assert_eq!(f.f64("missing").unwrap(), None);
        assert!(f.u64("alpha").is_err());
        assert!(f.str("paths").is_err());
    }

    #[test]
    fn precedence_is_flag_then_file_then_default() {
        let ctx = Context {
            seed: 1,
            workers: 0,
            file: file("horizon = 5.0"),
            output: None,
        };
        assert_eq!(ctx.resolve_f64(Some(2.0), "horizon", 10.0).unwrap(), 2.0);
        assert_eq!(ctx.resolve_f64(None, "horizon", 10.0).unwrap(), 5.0);
        assert_eq!(ctx.resolve_f64(None, "paths", 10.0).unwrap(), 10.0);
    }

    #[test]
    fn bt_resolution() {
        let ctx = Context {
            seed: 1,
            workers: 0,
            file: file("preset = \"dataset1\""),
            output: None,
        };
        // File preset applies when no explicit parameters are given.
        assert_eq!(ctx.resolve_bt(None, None, None).unwrap(), (0.1760, 0.3472));
        // Explicit flags beat the file preset.
        assert_eq!(
            ctx.resolve_bt(Some(1.0), Some(2.0), None).unwrap(),
            (1.0, 2.0)
        );
        // Flag preset beats everything.
        assert_eq!(
            ctx.resolve_bt(None, None, Some(Preset::Dataset3)).unwrap(),
            (0.4450, 0.6453)
        );
        let bare = Context {
            seed: 1,
            workers: 0,
            file: ConfigFile::default(),
            output: None,
        };
        assert!(matches!(
            bare.resolve_bt(None, None, None),
            Err(CliError::Usage(_))
        ));
        let bad = Context {
            seed: 1,
            workers: 0,
            file: file("preset = \"dataset9\""),
            output: None,
        };
        assert!(matches!(
            bad.resolve_bt(None, None, None),
            Err(CliError::Usage(_))
        ));
    }
}
