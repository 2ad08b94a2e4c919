//! Job configuration: flag values merged over an optional JSON config file,
//! then validated into a concrete job. Flags always win; unknown keys in the
//! file are rejected; every field is validated before any sampling begins.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use eville_core::mc::DEFAULT_SEED;

use crate::error::{usage, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

/// The resolved configuration of one job. Serializing and re-parsing a
/// `JobConfig` yields an identical value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k_trunc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_of_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<u8>,
    pub seed: u64,
    pub out: PathBuf,
    pub format: OutputFormat,
}

/// Partial configuration as read from `--config FILE` or collected from
/// flags; merged field-by-field with flags winning.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobPatch {
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub process: Option<String>,
    #[serde(default)]
    pub rule: Option<String>,
    #[serde(default)]
    pub horizon: Option<u64>,
    #[serde(default)]
    pub n_paths: Option<u64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(rename = "K", default)]
    pub k_trunc: Option<f64>,
    #[serde(default)]
    pub r_of_k: Option<f64>,
    #[serde(default)]
    pub k: Option<u64>,
    #[serde(default)]
    pub levels: Option<Vec<f64>>,
    #[serde(default)]
    pub n_max: Option<u32>,
    #[serde(default)]
    pub schedule: Option<PathBuf>,
    #[serde(default)]
    pub m: Option<u32>,
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(default)]
    pub trunc: Option<u32>,
    #[serde(default)]
    pub i: Option<u8>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

impl JobPatch {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| usage(format!("bad config {}: {e}", path.display())))
    }

    /// Resolves `flags` over `file` over defaults for `command`.
    pub fn resolve(command: &str, flags: JobPatch, file: Option<JobPatch>) -> Result<JobConfig, CliError> {
        let file = file.unwrap_or_default();
        if let Some(cfg_cmd) = &file.command {
            if cfg_cmd != command {
                return Err(usage(format!(
                    "config file is for command '{cfg_cmd}', invoked '{command}'"
                )));
            }
        }
        let format = flags.format.or(file.format).unwrap_or(OutputFormat::Csv);
        let out = flags.out.or(file.out).unwrap_or_else(|| {
            PathBuf::from(format!("eville-{command}.{}", format.extension()))
        });
        Ok(JobConfig {
            command: command.to_owned(),
            family: flags.family.or(file.family),
            process: flags.process.or(file.process),
            rule: flags.rule.or(file.rule),
            horizon: flags.horizon.or(file.horizon),
            n_paths: flags.n_paths.or(file.n_paths),
            alpha: flags.alpha.or(file.alpha),
            eps: flags.eps.or(file.eps),
            gamma: flags.gamma.or(file.gamma),
            k_trunc: flags.k_trunc.or(file.k_trunc),
            r_of_k: flags.r_of_k.or(file.r_of_k),
            k: flags.k.or(file.k),
            levels: flags.levels.or(file.levels),
            n_max: flags.n_max.or(file.n_max),
            schedule: flags.schedule.or(file.schedule),
            m: flags.m.or(file.m),
            n: flags.n.or(file.n),
            trunc: flags.trunc.or(file.trunc),
            i: flags.i.or(file.i),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out,
            format,
        })
    }
}

impl JobConfig {
    pub fn require<T: Copy>(&self, flag: &str, value: Option<T>) -> Result<T, CliError> {
        value.ok_or_else(|| usage(format!("'{}' requires --{flag}", self.command)))
    }

    pub fn require_str<'a>(
        &self,
        flag: &str,
        value: &'a Option<String>,
    ) -> Result<&'a str, CliError> {
        value
            .as_deref()
            .ok_or_else(|| usage(format!("'{}' requires --{flag}", self.command)))
    }

    pub fn horizon_usize(&self) -> Result<usize, CliError> {
        let h = self.require("horizon", self.horizon)?;
        usize::try_from(h).map_err(|_| usage("horizon too large for this platform"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let cfg = JobConfig {
            command: "verify-ville".into(),
            family: Some("gaussian:mu=0,sigma=1".into()),
            process: Some("L:lambda=0.2".into()),
            rule: None,
            horizon: Some(5000),
            n_paths: Some(20_000),
            alpha: Some(0.05),
            eps: None,
            gamma: None,
            k_trunc: None,
            r_of_k: None,
            k: None,
            levels: None,
            n_max: None,
            schedule: None,
            m: None,
            n: None,
            trunc: None,
            i: None,
            seed: 1939,
            out: PathBuf::from("out.csv"),
            format: OutputFormat::Csv,
        };
        let json = serde_json::to_string_pretty(&cfg).unwrap();
        let back: JobConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn flags_win_over_file() {
        let flags = JobPatch {
            seed: Some(7),
            ..JobPatch::default()
        };
        let file = JobPatch {
            seed: Some(99),
            horizon: Some(123),
            ..JobPatch::default()
        };
        let cfg = JobPatch::resolve("simulate", flags, Some(file)).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.horizon, Some(123));
        assert_eq!(cfg.out, PathBuf::from("eville-simulate.csv"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = serde_json::from_str::<JobPatch>(r#"{"bogus": 3}"#);
        assert!(err.is_err());
    }

    #[test]
    fn mismatched_config_command_rejected() {
        let file = JobPatch {
            command: Some("oracle".into()),
            ..JobPatch::default()
        };
        assert!(JobPatch::resolve("simulate", JobPatch::default(), Some(file)).is_err());
    }
}
