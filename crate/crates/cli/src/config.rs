//! Flat key=value run configuration: defaults, file loading, flag
//! overrides, validation, and the canonical rendering embedded in every
//! output header.
//!
//! Precedence: built-in defaults, then the `--config` file, then each
//! `--set key=value` in command-line order.

use std::fmt;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExcitationKind {
    None,
    Spin,
    Charge,
}

impl fmt::Display for ExcitationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExcitationKind::None => "none",
            ExcitationKind::Spin => "spin",
            ExcitationKind::Charge => "charge",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Jsonl,
    Csv,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Jsonl => "jsonl",
            OutputFormat::Csv => "csv",
        })
    }
}

/// Every knob a command can read. Field defaults are the reference
/// protocol values; `n_target` resolves to half filling when unset.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub lx: usize,
    pub ly: usize,
    pub t: f64,
    pub u: f64,
    pub alpha_p: f64,
    pub alpha_b: f64,
    pub mu_tilde: f64,
    n_target: Option<usize>,
    pub outer_steps: usize,
    pub inner_steps: usize,
    pub d_tau: f64,
    pub dt: f64,
    pub tau_max: f64,
    pub record_every: usize,
    pub dt_list: Vec<f64>,
    pub excitation: ExcitationKind,
    pub site: (usize, usize),
    pub seed: u64,
    pub oracle_crosscheck: bool,
    pub output: String,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lx: 2,
            ly: 2,
            t: 0.1,
            u: 1.0,
            alpha_p: 20.0,
            alpha_b: 20.0,
            mu_tilde: 20.0,
            n_target: None,
            outer_steps: 100,
            inner_steps: 10,
            d_tau: 0.01,
            dt: 0.01,
            tau_max: 20.0,
            record_every: 25,
            dt_list: vec![0.1, 0.05, 0.02, 0.01],
            excitation: ExcitationKind::None,
            site: (0, 0),
            seed: 7,
            oracle_crosscheck: false,
            output: "-".into(),
            format: OutputFormat::Jsonl,
        }
    }
}

/// A configuration error: message plus the offending key, always exit
/// code 2 at the boundary.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("cannot parse {key} = {value:?}")))
}

impl RunConfig {
    /// Half filling unless the file or a flag pinned a number.
    pub fn n_target(&self) -> usize {
        self.n_target.unwrap_or(self.lx * self.ly)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let mut config = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Applies one `key=value` assignment; unknown keys are errors so a
    /// typo cannot silently fall back to a default.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "lx" => self.lx = parse(key, value)?,
            "ly" => self.ly = parse(key, value)?,
            "t" => self.t = parse(key, value)?,
            "u" => self.u = parse(key, value)?,
            "alpha_p" => self.alpha_p = parse(key, value)?,
            "alpha_b" => self.alpha_b = parse(key, value)?,
            "mu_tilde" => self.mu_tilde = parse(key, value)?,
            "n_target" => self.n_target = Some(parse(key, value)?),
            "outer_steps" => self.outer_steps = parse(key, value)?,
            "inner_steps" => self.inner_steps = parse(key, value)?,
            "d_tau" => self.d_tau = parse(key, value)?,
            "dt" => self.dt = parse(key, value)?,
            "tau_max" => self.tau_max = parse(key, value)?,
            "record_every" => self.record_every = parse(key, value)?,
            "dt_list" => {
                self.dt_list = value
                    .split(',')
                    .map(|v| parse("dt_list entry", v))
                    .collect::<Result<_, _>>()?;
            }
            "excitation" => {
                self.excitation = match value {
                    "none" => ExcitationKind::None,
                    "spin" => ExcitationKind::Spin,
                    "charge" => ExcitationKind::Charge,
                    other => {
                        return Err(ConfigError(format!(
                            "excitation must be none, spin or charge, got {other:?}"
                        )))
                    }
                };
            }
            "site" => {
                let (x, y) = value
                    .split_once(',')
                    .ok_or_else(|| ConfigError(format!("site must be x,y, got {value:?}")))?;
                self.site = (parse("site x", x)?, parse("site y", y)?);
            }
            "seed" => self.seed = parse(key, value)?,
            "oracle_crosscheck" => self.oracle_crosscheck = parse(key, value)?,
            "output" => self.output = value.to_string(),
            "format" => {
                self.format = match value {
                    "jsonl" => OutputFormat::Jsonl,
                    "csv" => OutputFormat::Csv,
                    other => {
                        return Err(ConfigError(format!(
                            "format must be jsonl or csv, got {other:?}"
                        )))
                    }
                };
            }
            other => return Err(ConfigError(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Rejects non-finite or non-positive values before any command
    /// runs; lattice geometry is left to the lattice constructor so its
    /// messages stay authoritative.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positives = [
            ("t", self.t),
            ("u", self.u),
            ("alpha_p", self.alpha_p),
            ("alpha_b", self.alpha_b),
            ("mu_tilde", self.mu_tilde),
        ];
        for (key, v) in positives {
            if !v.is_finite() || v < 0.0 {
                return Err(ConfigError(format!("{key} must be finite and >= 0, got {v}")));
            }
        }
        for (key, v) in [("d_tau", self.d_tau), ("dt", self.dt)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(ConfigError(format!("{key} must be finite and > 0, got {v}")));
            }
        }
        if !self.tau_max.is_finite() || self.tau_max < 0.0 {
            return Err(ConfigError(format!("tau_max must be finite and >= 0, got {}", self.tau_max)));
        }
        if self.record_every == 0 {
            return Err(ConfigError("record_every must be positive".into()));
        }
        if self.outer_steps == 0 || self.inner_steps == 0 {
            return Err(ConfigError("schedule needs positive outer_steps and inner_steps".into()));
        }
        if self.dt_list.is_empty() {
            return Err(ConfigError("dt_list must not be empty".into()));
        }
        if self.dt_list.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(ConfigError("dt_list entries must be finite and > 0".into()));
        }
        if self.dt_list.windows(2).any(|w| w[0] <= w[1]) {
            return Err(ConfigError("dt_list must be strictly descending".into()));
        }
        Ok(())
    }

    /// Canonical one-key-per-line rendering, embedded in output headers
    /// so a file pins the exact run that produced it.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let dt_list =
            self.dt_list.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        for (key, value) in [
            ("alpha_b", self.alpha_b.to_string()),
            ("alpha_p", self.alpha_p.to_string()),
            ("d_tau", self.d_tau.to_string()),
            ("dt", self.dt.to_string()),
            ("dt_list", dt_list),
            ("excitation", self.excitation.to_string()),
            ("format", self.format.to_string()),
            ("inner_steps", self.inner_steps.to_string()),
            ("lx", self.lx.to_string()),
            ("ly", self.ly.to_string()),
            ("mu_tilde", self.mu_tilde.to_string()),
            ("n_target", self.n_target().to_string()),
            ("oracle_crosscheck", self.oracle_crosscheck.to_string()),
            ("outer_steps", self.outer_steps.to_string()),
            ("output", self.output.clone()),
            ("record_every", self.record_every.to_string()),
            ("seed", self.seed.to_string()),
            ("site", format!("{},{}", self.site.0, self.site.1)),
            ("t", self.t.to_string()),
            ("tau_max", self.tau_max.to_string()),
            ("u", self.u.to_string()),
        ] {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass_validation_and_render_canonically() {
        let config = RunConfig::default();
        config.validate().unwrap();
        let text = config.canonical();
        assert!(text.contains("t = 0.1\n"));
        assert!(text.contains("n_target = 4\n"));
        let keys: Vec<&str> = text.lines().map(|l| l.split(" = ").next().unwrap()).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted, "canonical keys must be sorted");
    }

    #[test]
    fn overrides_win_and_unknown_keys_fail() {
        let mut config = RunConfig::default();
        config.set("t", "0.5").unwrap();
        assert_eq!(config.t, 0.5);
        config.set("excitation", "charge").unwrap();
        assert_eq!(config.excitation, ExcitationKind::Charge);
        assert!(config.set("tee", "1").is_err());
        assert!(config.set("excitation", "both").is_err());
    }

    #[test]
    fn descending_dt_list_is_enforced() {
        let mut config = RunConfig::default();
        config.set("dt_list", "0.01,0.05").unwrap();
        assert!(config.validate().is_err());
        config.set("dt_list", "0.05,0.01").unwrap();
        config.validate().unwrap();
    }
}
