//! Run configuration: parsing (JSON or TOML), defaults and validation.

use hqva::fock::FockCfg;
use hqva::series::{q, Q, Trunc};
use hqva::tau::{BracketVariant, CartanDatum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Suites run by `verify` when none are selected.
pub const DEFAULT_SUITES: [&str; 11] = [
    "tau-tech1",
    "unitarity",
    "qyb",
    "intertwine",
    "s-delta",
    "serre",
    "integrability",
    "fock-com",
    "fock-YE",
    "fock-e-coproduct",
    "classical-limit",
];

/// Registered suites that only run when selected.
pub const EXTRA_SUITES: [&str; 1] = ["fock-brackets"];

pub fn is_registered(s: &str) -> bool {
    DEFAULT_SUITES.contains(&s) || EXTRA_SUITES.contains(&s)
}

#[derive(Debug)]
pub enum ConfigError {
    Io(PathBuf, std::io::Error),
    Parse(String),
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            ConfigError::Parse(m) => write!(f, "config parse error: {m}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// A level written as an integer or as a rational string such as `"1/2"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Level {
    Int(i64),
    Text(String),
}

impl Level {
    pub fn value(&self) -> Result<Q, ConfigError> {
        match self {
            Level::Int(n) => Ok(q(*n)),
            Level::Text(s) => Q::from_str(s.trim()).map_err(|_| ConfigError::Invalid(format!("level `{s}` is not a rational"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumSpec {
    /// One of `A1`, `A2`, `A1xA1`, `sym12`, `sym13`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<i64>,
}

impl DatumSpec {
    pub fn named(name: &str) -> Self {
        DatumSpec { name: Some(name.to_string()), a: None, r: None }
    }

    pub fn build(&self) -> Result<CartanDatum, ConfigError> {
        match (&self.name, &self.a) {
            (Some(_), Some(_)) => Err(ConfigError::Invalid("datum: give either `name` or `a`, not both".into())),
            (Some(n), None) => {
                let d = named_datum(n).ok_or_else(|| ConfigError::Invalid(format!("unknown datum `{n}`")))?;
                match self.r {
                    Some(r) => CartanDatum::new(d.a, r).map_err(|e| ConfigError::Invalid(format!("datum: {e}"))),
                    None => Ok(d),
                }
            }
            (None, Some(a)) => CartanDatum::new(a.clone(), self.r.unwrap_or(1)).map_err(|e| ConfigError::Invalid(format!("datum: {e}"))),
            (None, None) => Err(ConfigError::Invalid("datum: `name` or `a` is required".into())),
        }
    }
}

pub fn named_datum(name: &str) -> Option<CartanDatum> {
    match name {
        "A1" => Some(CartanDatum::a1()),
        "A2" => Some(CartanDatum::a2()),
        "A1xA1" => Some(CartanDatum::a1xa1()),
        "sym12" => Some(CartanDatum::sym12()),
        "sym13" => Some(CartanDatum::g2t()),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Truncation {
    pub hbar_order: usize,
    /// z ceiling for operations with infinite expansions.
    pub z_window: i64,
    /// Degree cap of the secondary variable in two-variable expansions.
    pub bivar_cap: usize,
    /// Largest Fock mode (and bracket mode cutoff).
    pub mode_cutoff: usize,
    /// Largest Fock monomial degree.
    pub degree_cutoff: usize,
    /// Largest `k` for the Serre and integrability constants.
    pub struct_kcap: usize,
    /// Certified window of the secondary variable in Fock field products.
    pub fock_zwin: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { hbar_order: 4, z_window: 16, bivar_cap: 6, mode_cutoff: 3, degree_cutoff: 2, struct_kcap: 6, fock_zwin: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub datum: DatumSpec,
    #[serde(default = "default_levels")]
    pub levels: Vec<Level>,
    /// Explicit level pairs; derived from `levels` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_pairs: Option<Vec<(Level, Level)>>,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<String>>,
    #[serde(default)]
    pub bracket_variant: BracketVariant,
    #[serde(default)]
    pub seed: u64,
    /// Test fixture: perturb the level elements with the seed.
    #[serde(default)]
    pub corrupt: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_levels() -> Vec<Level> {
    vec![Level::Int(1), Level::Int(2)]
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            datum: DatumSpec::named("A1"),
            levels: default_levels(),
            level_pairs: None,
            truncation: Truncation::default(),
            suites: None,
            bracket_variant: BracketVariant::Plain,
            seed: 0,
            corrupt: false,
            output: None,
        }
    }
}

/// A validated configuration with everything resolved.
#[derive(Clone, Debug)]
pub struct Plan {
    pub datum: CartanDatum,
    pub levels: Vec<Q>,
    pub pairs: Vec<(Q, Q)>,
    pub triple: [Q; 3],
    pub suites: Vec<String>,
    pub trunc: Trunc,
    pub fock: FockCfg,
}

impl RunConfig {
    pub fn parse(text: &str, path: Option<&Path>) -> Result<RunConfig, ConfigError> {
        let json = match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("json") => true,
            Some("toml") => false,
            _ => text.trim_start().starts_with('{'),
        };
        if json {
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
        }
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        RunConfig::parse(&text, Some(path))
    }

    pub fn plan(&self, only: &[String]) -> Result<Plan, ConfigError> {
        let tr = &self.truncation;
        if tr.hbar_order < 2 {
            return Err(ConfigError::Invalid(format!("hbar_order = {} (must be at least 2)", tr.hbar_order)));
        }
        for (name, v) in [
            ("z_window", tr.z_window),
            ("bivar_cap", tr.bivar_cap as i64),
            ("mode_cutoff", tr.mode_cutoff as i64),
            ("degree_cutoff", tr.degree_cutoff as i64),
            ("struct_kcap", tr.struct_kcap as i64),
            ("fock_zwin", tr.fock_zwin as i64),
        ] {
            if v <= 0 {
                return Err(ConfigError::Invalid(format!("{name} = {v} (must be positive)")));
            }
        }
        let datum = self.datum.build()?;
        let levels = self.levels.iter().map(Level::value).collect::<Result<Vec<_>, _>>()?;
        if levels.is_empty() {
            return Err(ConfigError::Invalid("levels: at least one level is required".into()));
        }
        let pairs = match &self.level_pairs {
            Some(ps) => ps.iter().map(|(a, b)| Ok((a.value()?, b.value()?))).collect::<Result<Vec<_>, ConfigError>>()?,
            None if levels.len() == 1 => vec![(levels[0].clone(), levels[0].clone())],
            None => {
                let mut v = Vec::new();
                for a in 0..levels.len() {
                    for b in a + 1..levels.len() {
                        v.push((levels[a].clone(), levels[b].clone()));
                    }
                }
                v
            }
        };
        if pairs.is_empty() {
            return Err(ConfigError::Invalid("level_pairs: empty".into()));
        }
        let zero = q(0);
        if levels.iter().chain(pairs.iter().flat_map(|(a, b)| [a, b])).any(|l| *l < zero) {
            return Err(ConfigError::Invalid("levels must be nonnegative".into()));
        }
        let triple = [0, 1, 2].map(|k| levels[k % levels.len()].clone());
        let picked: Vec<String> = if !only.is_empty() {
            only.to_vec()
        } else if let Some(s) = &self.suites {
            s.clone()
        } else {
            DEFAULT_SUITES.iter().map(|s| s.to_string()).collect()
        };
        if picked.is_empty() {
            return Err(ConfigError::Invalid("no suites selected".into()));
        }
        if let Some(bad) = picked.iter().find(|s| !is_registered(s)) {
            return Err(ConfigError::Invalid(format!("unknown suite `{bad}`")));
        }
        let mut suites = Vec::new();
        for s in picked {
            if !suites.contains(&s) {
                suites.push(s);
            }
        }
        let trunc = Trunc::new(tr.hbar_order, tr.z_window);
        let fock = FockCfg { modes: tr.mode_cutoff, degree: tr.degree_cutoff, hbar: tr.hbar_order, zwin: tr.fock_zwin };
        Ok(Plan { datum, levels, pairs, triple, suites, trunc, fock })
    }
}

impl Plan {
    /// Every level a table lookup can touch: the configured ones and their sums.
    pub fn table_levels(&self) -> Vec<Q> {
        let mut v: Vec<Q> = self.levels.clone();
        for (a, b) in &self.pairs {
            v.extend([a.clone(), b.clone(), a + b]);
        }
        let [a, b, c] = &self.triple;
        v.extend([a + b, b + c]);
        v.sort();
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let t = r#"
            levels = [1, "1/2"]
            seed = 5
            [datum]
            name = "sym12"
            [truncation]
            hbar_order = 3
        "#;
        let j = r#"{"datum": {"name": "sym12"}, "levels": [1, "1/2"], "seed": 5, "truncation": {"hbar_order": 3}}"#;
        let a = RunConfig::parse(t, None).unwrap();
        let b = RunConfig::parse(j, None).unwrap();
        assert_eq!(a, b);
        let p = a.plan(&[]).unwrap();
        assert_eq!(p.pairs.len(), 1);
        assert_eq!(p.suites.len(), DEFAULT_SUITES.len());
        assert_eq!(p.datum.ri, vec![1, 2]);
    }

    #[test]
    fn rejects_low_hbar_order() {
        let mut c = RunConfig::default();
        c.truncation.hbar_order = 1;
        assert!(matches!(c.plan(&[]), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn rejects_unknown_suite_and_field() {
        let c = RunConfig { suites: Some(vec!["nope".into()]), ..RunConfig::default() };
        assert!(c.plan(&[]).is_err());
        assert!(RunConfig::parse("bogus = 1\n[datum]\nname = \"A1\"", None).is_err());
    }

    #[test]
    fn table_levels_include_sums() {
        let c = RunConfig { levels: vec![Level::Int(1), Level::Int(2), Level::Int(3)], ..RunConfig::default() };
        let p = c.plan(&[]).unwrap();
        for x in [1, 2, 3, 4, 5] {
            assert!(p.table_levels().contains(&q(x)));
        }
    }
}
