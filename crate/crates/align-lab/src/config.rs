//! Flat `key = value` experiment configs.
//!
//! One key per line, `[a, b, c]` for lists, `#` starts a comment. The format
//! is deliberately schema-free so configs diff cleanly under version control.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use softbon::{FiniteDistribution, RewardFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    BestOfN,
    SoftBestOfN,
    Blockwise,
}

impl Strategy {
    pub fn label(self) -> &'static str {
        match self {
            Strategy::BestOfN => "bon",
            Strategy::SoftBestOfN => "soft_bon",
            Strategy::Blockwise => "blockwise",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub symbols: Option<Vec<String>>,
    pub probs: Option<Vec<f64>>,
    pub rewards: Option<Vec<f64>>,
    pub n_grid: Vec<u32>,
    pub lambda_grid: Vec<f64>,
    pub strategies: Vec<Strategy>,
    pub m: usize,
    pub mc_draws: Option<u64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub eps: f64,
    pub workers: usize,
}

/// 20 log-spaced temperatures covering both limits of the tradeoff curve.
pub fn default_lambda_grid() -> Vec<f64> {
    let (lo, hi) = (0.05f64.ln(), 5.0f64.ln());
    (0..20)
        .map(|i| (lo + (hi - lo) * i as f64 / 19.0).exp())
        .collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            symbols: None,
            probs: None,
            rewards: None,
            n_grid: vec![1, 2, 4, 8, 16, 32, 64],
            lambda_grid: default_lambda_grid(),
            strategies: vec![Strategy::BestOfN, Strategy::SoftBestOfN],
            m: 2,
            mc_draws: None,
            seed: 0,
            out: None,
            eps: 0.1,
            workers: 1,
        }
    }
}

impl ExperimentConfig {
    /// The configured base instance; commands that sweep a distribution
    /// require both `probs` and `rewards`.
    pub fn instance(&self) -> Result<(FiniteDistribution, RewardFunction), String> {
        let probs = self
            .probs
            .as_ref()
            .ok_or("config key `probs` is required for this command")?;
        let rewards = self
            .rewards
            .as_ref()
            .ok_or("config key `rewards` is required for this command")?;
        let dist = match &self.symbols {
            Some(names) => FiniteDistribution::new(names.clone(), probs.clone()),
            None => FiniteDistribution::from_probs(probs.clone()),
        }
        .map_err(|e| format!("invalid instance: {e}"))?;
        let reward = RewardFunction::new(rewards.clone())
            .map_err(|e| format!("invalid instance: {e}"))?;
        if dist.len() != reward.len() {
            return Err(format!(
                "probs has {} entries but rewards has {}",
                dist.len(),
                reward.len()
            ));
        }
        Ok((dist, reward))
    }

    /// Re-check invariants after command-line overrides are merged in.
    pub fn validate(&self) -> Result<(), String> {
        validate(self)
    }
}

fn parse_list(raw: &str) -> Result<Vec<&str>, String> {
    let inner = raw
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed list, got `{raw}`"))?;
    Ok(inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect())
}

fn parse_f64_list(key: &str, raw: &str) -> Result<Vec<f64>, String> {
    parse_list(raw)?
        .into_iter()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| format!("{key}: `{tok}` is not a number"))
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, String> {
    raw.parse::<T>()
        .map_err(|_| format!("{key}: `{raw}` is not a valid value"))
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::default();
    let mut seen = HashSet::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
        if !seen.insert(key.to_string()) {
            return Err(format!("line {}: duplicate key `{key}`", lineno + 1));
        }
        match key {
            "symbols" => {
                cfg.symbols = Some(parse_list(value)?.into_iter().map(String::from).collect())
            }
            "probs" => cfg.probs = Some(parse_f64_list(key, value)?),
            "rewards" => cfg.rewards = Some(parse_f64_list(key, value)?),
            "n_grid" => {
                cfg.n_grid = parse_list(value)?
                    .into_iter()
                    .map(|tok| parse_scalar::<u32>(key, tok))
                    .collect::<Result<_, _>>()?
            }
            "lambda_grid" => cfg.lambda_grid = parse_f64_list(key, value)?,
            "strategies" => {
                cfg.strategies = parse_list(value)?
                    .into_iter()
                    .map(|tok| match tok {
                        "bon" => Ok(Strategy::BestOfN),
                        "soft_bon" => Ok(Strategy::SoftBestOfN),
                        "blockwise" => Ok(Strategy::Blockwise),
                        other => Err(format!(
                            "strategies: `{other}` is not one of bon, soft_bon, blockwise"
                        )),
                    })
                    .collect::<Result<_, _>>()?
            }
            "m" => cfg.m = parse_scalar(key, value)?,
            "mc_draws" => cfg.mc_draws = Some(parse_scalar(key, value)?),
            "seed" => cfg.seed = parse_scalar(key, value)?,
            "out" => cfg.out = Some(PathBuf::from(value)),
            "eps" => cfg.eps = parse_scalar(key, value)?,
            "workers" => cfg.workers = parse_scalar(key, value)?,
            other => return Err(format!("line {}: unknown key `{other}`", lineno + 1)),
        }
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ExperimentConfig) -> Result<(), String> {
    if cfg.n_grid.is_empty() {
        return Err("n_grid must be non-empty".into());
    }
    if cfg.n_grid.contains(&0) {
        return Err("n_grid entries must be at least 1".into());
    }
    if cfg.lambda_grid.is_empty() {
        return Err("lambda_grid must be non-empty".into());
    }
    if cfg.lambda_grid.iter().any(|&l| !l.is_finite() || l <= 0.0) {
        return Err("lambda_grid entries must be positive and finite".into());
    }
    if cfg.strategies.is_empty() {
        return Err("strategies must be non-empty".into());
    }
    if cfg.m == 0 {
        return Err("m must be at least 1".into());
    }
    if cfg.mc_draws == Some(0) {
        return Err("mc_draws must be at least 1".into());
    }
    if !cfg.eps.is_finite() || cfg.eps <= 0.0 {
        return Err("eps must be positive and finite".into());
    }
    if cfg.workers == 0 {
        return Err("workers must be at least 1".into());
    }
    if let (Some(symbols), Some(probs)) = (&cfg.symbols, &cfg.probs) {
        if symbols.len() != probs.len() {
            return Err(format!(
                "symbols has {} entries but probs has {}",
                symbols.len(),
                probs.len()
            ));
        }
    }
    Ok(())
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = parse_config(
            "# demo instance\n\
             symbols = [a, b, c]\n\
             probs = [0.75, 0.2, 0.05]\n\
             rewards = [0.016, 0.164, 0.820]\n\
             n_grid = [1, 2, 4]\n\
             lambda_grid = [0.5, 1.0]\n\
             strategies = [bon, soft_bon]\n\
             m = 3\n\
             mc_draws = 1000\n\
             seed = 7\n\
             out = /tmp/x.csv\n\
             eps = 0.2\n\
             workers = 4\n",
        )
        .unwrap();
        assert_eq!(cfg.symbols.as_deref().unwrap(), ["a", "b", "c"]);
        assert_eq!(cfg.n_grid, vec![1, 2, 4]);
        assert_eq!(cfg.lambda_grid, vec![0.5, 1.0]);
        assert_eq!(
            cfg.strategies,
            vec![Strategy::BestOfN, Strategy::SoftBestOfN]
        );
        assert_eq!(cfg.m, 3);
        assert_eq!(cfg.mc_draws, Some(1000));
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.eps, 0.2);
        assert_eq!(cfg.workers, 4);
        let (p, r) = cfg.instance().unwrap();
        assert_eq!(p.symbols()[0], "a");
        assert_eq!(r.value(2), 0.820);
    }

    #[test]
    fn defaults_cover_missing_keys() {
        let cfg = parse_config("probs = [0.5, 0.5]\nrewards = [0.0, 1.0]\n").unwrap();
        assert_eq!(cfg.n_grid, vec![1, 2, 4, 8, 16, 32, 64]);
        assert_eq!(cfg.lambda_grid.len(), 20);
        assert!((cfg.lambda_grid[0] - 0.05).abs() < 1e-12);
        assert!((cfg.lambda_grid[19] - 5.0).abs() < 1e-12);
        assert_eq!(cfg.workers, 1);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.eps, 0.1);
        assert!(cfg.mc_draws.is_none());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_config("mystery = 3\n").unwrap_err().contains("unknown key"));
        assert!(parse_config("probs [0.5]\n").unwrap_err().contains("key = value"));
        assert!(parse_config("seed = 1\nseed = 2\n")
            .unwrap_err()
            .contains("duplicate"));
        assert!(parse_config("probs = 0.5\n")
            .unwrap_err()
            .contains("bracketed"));
        assert!(parse_config("n_grid = [0]\n").unwrap_err().contains("at least 1"));
        assert!(parse_config("lambda_grid = [-1.0]\n")
            .unwrap_err()
            .contains("positive"));
        assert!(parse_config("workers = 0\n").unwrap_err().contains("workers"));
        assert!(parse_config("strategies = [frontier]\n")
            .unwrap_err()
            .contains("not one of"));
    }

    #[test]
    fn instance_requires_both_halves() {
        let cfg = parse_config("probs = [0.5, 0.5]\n").unwrap();
        assert!(cfg.instance().unwrap_err().contains("rewards"));
        let cfg = parse_config("").unwrap();
        assert!(cfg.instance().unwrap_err().contains("probs"));
    }
}
