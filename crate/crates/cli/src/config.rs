//! Run configuration: a flat key-value file with command-line overrides, and
//! the two in-repo presets.

use std::path::PathBuf;
use wlab_core::{LabError, Result};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub nodes: usize,
    pub t_final: f64,
    pub dt: f64,
    /// Legendre perturbation of the initial conformal factor.
    pub perturbation: Vec<(usize, f64)>,
    pub f_t_epsilon: f64,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            nodes: 128,
            t_final: 1.0,
            dt: 5e-4,
            perturbation: vec![],
            f_t_epsilon: 0.0,
            seed: 1,
            out: PathBuf::from("runs"),
        }
    }
}

pub const PRESET_ROUND: &str = "\
# Fixed point: round initial metric, constant terminal weight.
nodes = 128
T = 1.0
dt = 5e-4
perturbation =
fT_epsilon = 0.0
seed = 1
";

pub const PRESET_PERTURBED: &str = "\
# Standard perturbed run used by the acceptance suite.
nodes = 128
T = 1.0
dt = 5e-4
perturbation = 2:0.05
fT_epsilon = 0.1
seed = 42
";

pub fn parse_perturbation(s: &str) -> Result<Vec<(usize, f64)>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|item| {
            let (k, c) = item
                .split_once(':')
                .ok_or_else(|| LabError::InvalidConfig(format!("perturbation entry '{item}', want DEGREE:COEFF")))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| LabError::InvalidConfig(format!("bad degree in '{item}'")))?;
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| LabError::InvalidConfig(format!("bad coefficient in '{item}'")))?;
            Ok((k, c))
        })
        .collect()
}

impl RunConfig {
    pub fn from_preset(name: &str) -> Result<Self> {
        match name {
            "round-fixed-point" => Self::parse(PRESET_ROUND),
            "perturbed-default" => Self::parse(PRESET_PERTURBED),
            other => Err(LabError::InvalidConfig(format!("unknown preset '{other}'"))),
        }
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                LabError::InvalidConfig(format!("line {}: expected KEY = VALUE", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                LabError::InvalidConfig(format!("line {}: bad {what} '{value}'", lineno + 1))
            };
            match key {
                "nodes" => cfg.nodes = value.parse().map_err(|_| bad("node count"))?,
                "T" => cfg.t_final = value.parse().map_err(|_| bad("time horizon"))?,
                "dt" => cfg.dt = value.parse().map_err(|_| bad("time step"))?,
                "perturbation" => cfg.perturbation = parse_perturbation(value)?,
                "fT_epsilon" => cfg.f_t_epsilon = value.parse().map_err(|_| bad("epsilon"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "out" => cfg.out = PathBuf::from(value),
                other => {
                    return Err(LabError::InvalidConfig(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 16 {
            return Err(LabError::InvalidConfig("nodes must be at least 16".into()));
        }
        if self.dt <= 0.0 {
            return Err(LabError::InvalidConfig("dt must be positive".into()));
        }
        if self.t_final <= 0.0 || self.t_final > 5.0 {
            return Err(LabError::InvalidConfig("T must lie in (0, 5]".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        let r = RunConfig::from_preset("round-fixed-point").unwrap();
        assert_eq!(r.nodes, 128);
        assert!(r.perturbation.is_empty());
        let p = RunConfig::from_preset("perturbed-default").unwrap();
        assert_eq!(p.perturbation, vec![(2, 0.05)]);
        assert_eq!(p.seed, 42);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::parse("nodes = 4").is_err());
        assert!(RunConfig::parse("dt = -1\n").is_err());
        assert!(RunConfig::parse("bogus = 3").is_err());
        assert!(parse_perturbation("2;0.05").is_err());
    }
}
