use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ModelTable,
    Curvature,
    PinchVerify,
    Lemma1Fuzz,
    Counterexample,
    RigidityClassify,
    TheoremB,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::ModelTable,
        Command::Curvature,
        Command::PinchVerify,
        Command::Lemma1Fuzz,
        Command::Counterexample,
        Command::RigidityClassify,
        Command::TheoremB,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::ModelTable => "model-table",
            Command::Curvature => "curvature",
            Command::PinchVerify => "pinch-verify",
            Command::Lemma1Fuzz => "lemma1-fuzz",
            Command::Counterexample => "counterexample",
            Command::RigidityClassify => "rigidity-classify",
            Command::TheoremB => "theorem-b",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| GeometryError::Parse(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(GeometryError::Parse(format!("output must be csv or json, got {s:?}"))),
        }
    }
}

/// Everything a run depends on. Keys of [`ScenarioConfig::set`] are the
/// command-line flag names without the leading dashes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub command: Command,
    pub profile: String,
    pub n: usize,
    pub a: f64,
    pub grid: usize,
    pub r_max: Option<f64>,
    pub tol: f64,
    pub seed: u64,
    pub output: OutputFormat,
    pub n_max: usize,
    pub trials: usize,
    pub pinch: Option<String>,
    pub theorem: String,
    pub radius: Option<f64>,
    pub epsilon: f64,
    pub dump: bool,
}

pub const MIN_GRID: usize = 16;

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| GeometryError::Parse(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(GeometryError::Parse(format!("{key}: expected a boolean, got {value:?}"))),
    }
}

impl ScenarioConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            profile: "sinh".into(),
            n: 3,
            a: -1.0,
            grid: 512,
            r_max: None,
            tol: 1e-9,
            seed: 0,
            output: OutputFormat::Csv,
            n_max: 8,
            trials: 1000,
            pinch: None,
            theorem: "A".into(),
            radius: None,
            epsilon: crate::counterexample::DEFAULT_EPSILON,
            dump: false,
        }
    }

    /// Sets one option; `_` and `-` are interchangeable in keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match key.as_str() {
            "profile" => self.profile = value.to_string(),
            "n" => self.n = parse_num(&key, value)?,
            "a" => self.a = parse_num(&key, value)?,
            "grid" => self.grid = parse_num(&key, value)?,
            "r-max" => self.r_max = Some(parse_num(&key, value)?),
            "tol" => self.tol = parse_num(&key, value)?,
            "seed" => self.seed = parse_num(&key, value)?,
            "output" => self.output = value.parse()?,
            "n-max" => self.n_max = parse_num(&key, value)?,
            "trials" => self.trials = parse_num(&key, value)?,
            "pinch" => self.pinch = Some(value.to_string()),
            "theorem" => self.theorem = value.to_string(),
            "radius" => self.radius = Some(parse_num(&key, value)?),
            "epsilon" => self.epsilon = parse_num(&key, value)?,
            "dump" => self.dump = parse_bool(&key, value)?,
            _ => return Err(GeometryError::Parse(format!("unknown option {key:?}"))),
        }
        Ok(())
    }

    /// Applies a config file of `key = value` lines. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| GeometryError::Parse(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GeometryError::InvalidParameter(msg));
        if self.grid < MIN_GRID {
            return bad(format!("grid must have at least {MIN_GRID} points, got {}", self.grid));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tol));
        }
        if self.n < 2 {
            return bad(format!("dimension must be at least 2, got {}", self.n));
        }
        if !self.a.is_finite() {
            return bad(format!("bound a must be finite, got {}", self.a));
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0) || !r.is_finite() {
                return bad(format!("r-max must be positive and finite, got {r}"));
            }
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) || !r.is_finite() {
                return bad(format!("radius must be positive and finite, got {r}"));
            }
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut cfg = ScenarioConfig::new(Command::PinchVerify);
        cfg.apply_file("# scenario\nprofile = perturbed:sinh:0.01:3\nn = 4\n\nr_max = 2.5\n").unwrap();
        cfg.set("n", "3").unwrap();
        assert_eq!(cfg.profile, "perturbed:sinh:0.01:3");
        assert_eq!(cfg.n, 3);
        assert_eq!(cfg.r_max, Some(2.5));
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let mut cfg = ScenarioConfig::new(Command::Curvature);
        assert!(cfg.apply_file("nonsense").is_err());
        assert!(cfg.set("colour", "red").is_err());
        assert!(cfg.set("n", "three").is_err());
        cfg.grid = 8;
        assert!(cfg.validate().is_err());
        cfg.grid = 16;
        cfg.tol = 0.0;
        assert!(cfg.validate().is_err());
        cfg.tol = 1e-9;
        cfg.n = 1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn command_names() {
        for c in Command::ALL {
            assert_eq!(c.as_str().parse::<Command>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.as_str()));
        }
    }
}
