//! Runtime configuration: a `key=value` file plus flag overrides.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use std::path::PathBuf;

#[derive(Clone, Debug, PartialEq)]
pub enum OutputFormat {
    Human,
    Delimited,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub truncation: usize,
    pub precision_bits: usize,
    pub denominator_bound: BigInt,
    pub cache_path: PathBuf,
    pub output_format: OutputFormat,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            truncation: 32,
            precision_bits: 256,
            denominator_bound: BigInt::from(3).pow(12),
            cache_path: PathBuf::from("picard.cache"),
            output_format: OutputFormat::Human,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.truncation < 8 {
            return Err(Error::OutOfStatedRange("truncation must be >= 8".into()));
        }
        if self.precision_bits < 128 {
            return Err(Error::OutOfStatedRange(
                "precision_bits must be >= 128".into(),
            ));
        }
        Ok(())
    }

    /// Parse a `key=value` config file body (panic-free).
    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse(format!(
                    "config line {} is not key=value: {raw:?}",
                    lineno + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "truncation" => {
                    cfg.truncation = value
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad truncation {value:?}")))?;
                }
                "precision_bits" => {
                    cfg.precision_bits = value
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad precision_bits {value:?}")))?;
                }
                "denominator_bound" => {
                    cfg.denominator_bound = value
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad denominator_bound {value:?}")))?;
                }
                "cache_path" => cfg.cache_path = PathBuf::from(value),
                "output_format" => {
                    cfg.output_format = match value {
                        "human" => OutputFormat::Human,
                        "delimited" => OutputFormat::Delimited,
                        _ => return Err(Error::Parse(format!("bad output_format {value:?}"))),
                    };
                }
                _ => return Err(Error::Parse(format!("unknown config key {key:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Config> {
        Config::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let cfg = Config::parse("truncation=16\nprecision_bits=192\n# comment\n").unwrap();
        assert_eq!(cfg.truncation, 16);
        assert_eq!(cfg.precision_bits, 192);
        assert!(Config::parse("truncation=4").is_err());
        assert!(Config::parse("nonsense").is_err());
        assert!(Config::parse("bogus_key=1").is_err());
    }
}
