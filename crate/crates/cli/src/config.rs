use std::path::Path;
use std::sync::Arc;

use cantordiff::cantor::{CantorPair, PairConfig};
use cantordiff::{Error, FieldSpec, Result, Scalar};
use serde::Deserialize;

/// Pair file contents; `lambda` is an optional default for commands that take one.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    field: Option<String>,
    alpha: String,
    beta: String,
    lambda: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub source: PairConfig,
    pub pair: CantorPair,
    pub field: Option<Arc<FieldSpec>>,
    pub lambda: Option<Scalar>,
}

impl RunConfig {
    pub fn scalar(&self, text: &str) -> Result<Scalar> {
        Scalar::parse(text, self.field.as_ref())
    }

    /// `--lambda` if given, else the file default.
    pub fn lambda(&self, flag: Option<&str>) -> Result<Scalar> {
        match flag {
            Some(text) => self.scalar(text),
            None => self
                .lambda
                .clone()
                .ok_or_else(|| Error::InvalidParameter("--lambda is required (no default in the pair file)".into())),
        }
    }
}

fn preset(name: &str) -> Option<PairConfig> {
    let middle = |a: &str, b: &str| PairConfig { field: None, alpha: a.into(), beta: b.into() };
    match name {
        "golden" => Some(PairConfig::golden()),
        "third" => Some(middle("1/3", "1/3")),
        "quarter" => Some(middle("1/4", "1/4")),
        "two-fifths" => Some(middle("2/5", "2/5")),
        _ => None,
    }
}

/// Loads a preset name or a TOML/JSON file with keys `field`, `alpha`, `beta`, `lambda`.
pub fn load(spec: &str) -> Result<RunConfig> {
    let (source, lambda_text) = match preset(spec) {
        Some(p) if !Path::new(spec).exists() => (p, None),
        _ => {
            let text = std::fs::read_to_string(spec)
                .map_err(|e| Error::Parse(format!("cannot read pair file '{spec}': {e}")))?;
            let file: PairFile = if spec.ends_with(".json") {
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{spec}: {e}")))?
            } else {
                toml::from_str(&text).map_err(|e| Error::Parse(format!("{spec}: {e}")))?
            };
            (PairConfig { field: file.field, alpha: file.alpha, beta: file.beta }, file.lambda)
        }
    };
    let field = source.field_spec()?;
    let pair = source.to_pair()?;
    let lambda = lambda_text.map(|t| Scalar::parse(&t, field.as_ref())).transpose()?;
    Ok(RunConfig { source, pair, field, lambda })
}

/// `a:b` into two scalars.
pub fn split_pair(text: &str, what: &str) -> Result<(String, String)> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("{what} must look like a:b, got '{text}'")))?;
    Ok((a.to_string(), b.to_string()))
}

/// `a:b:count` sweep specification.
pub fn parse_sweep(cfg: &RunConfig, text: &str) -> Result<Vec<Scalar>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(Error::Parse(format!("sweep must look like a:b:count, got '{text}'")));
    };
    let count: usize = n.trim().parse().map_err(|_| Error::Parse(format!("bad sample count '{n}'")))?;
    sample(&cfg.scalar(a)?, &cfg.scalar(b)?, count)
}

/// `count` equally spaced exact points from `a` to `b` inclusive.
pub fn sample(a: &Scalar, b: &Scalar, count: usize) -> Result<Vec<Scalar>> {
    if count < 2 {
        return Err(Error::InvalidParameter("a sweep needs at least 2 samples".into()));
    }
    if a == b {
        return Err(Error::InvalidParameter("sweep range is empty".into()));
    }
    let step = (b - a) / Scalar::from_int(count as i64 - 1);
    Ok((0..count).map(|i| a + &(&step * &Scalar::from_int(i as i64))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_load() {
        let g = load("golden").unwrap();
        assert!(g.field.is_some());
        assert_eq!(load("quarter").unwrap().pair.p(), &Scalar::from_int(4));
        assert!(load("no-such-thing").is_err());
    }

    #[test]
    fn sweep_samples_are_exact() {
        let cfg = load("golden").unwrap();
        let xs = parse_sweep(&cfg, "1:2/g:11").unwrap();
        assert_eq!(xs.len(), 11);
        assert_eq!(xs[10], cfg.scalar("2/g").unwrap());
        assert!(parse_sweep(&cfg, "1:1:4").is_err());
        assert!(parse_sweep(&cfg, "0:1:1").is_err());
        assert!(parse_sweep(&cfg, "0:1").is_err());
    }
}
