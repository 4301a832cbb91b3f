//! Experiment config: `[section]` headers, `key = value` lines, `;` comments.
//!
//! ```text
//! [topology]
//! cells = 2
//! racks_per_cell = 2
//! olts = 2
//! [resources]
//! time_slots = 10   ; default 10
//! planes = 2        ; must be 2
//! [demands]
//! include_intra_cell = true
//! include_olt_pairs = false
//! [solver]
//! kind = exact      ; or greedy
//! seed = 0
//! node_budget = 100000   ; optional, unlimited when absent
//! ```

use std::collections::BTreeMap;
use std::str::FromStr;

use cawgr_core::{DemandFlags, TopologyConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: key `{key}`: {message}")]
    Value { line: usize, key: String, message: String },
    #[error("missing key `{key}` in [{section}]")]
    Missing { section: &'static str, key: &'static str },
    #[error(transparent)]
    Invalid(#[from] cawgr_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub seed: u64,
    pub node_budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    pub topology: TopologyConfig,
    pub demands: DemandFlags,
    pub solver: SolverConfig,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("topology", &["cells", "racks_per_cell", "olts"]),
    ("resources", &["time_slots", "planes"]),
    ("demands", &["include_intra_cell", "include_olt_pairs"]),
    ("solver", &["kind", "seed", "node_budget"]),
];

struct Entry {
    line: usize,
    value: String,
}

struct Entries(BTreeMap<(&'static str, &'static str), Entry>);

impl Entries {
    fn get<T: FromStr>(&self, section: &'static str, key: &'static str) -> Result<Option<T>, ConfigError> {
        let Some(entry) = self.0.get(&(section, key)) else { return Ok(None) };
        entry.value.parse::<T>().ok().map(Some).ok_or_else(|| ConfigError::Value {
            line: entry.line,
            key: key.into(),
            message: format!("cannot parse `{}` as {}", entry.value, std::any::type_name::<T>()),
        })
    }

    fn require<T: FromStr>(&self, section: &'static str, key: &'static str) -> Result<T, ConfigError> {
        self.get(section, key)?.ok_or(ConfigError::Missing { section, key })
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section: Option<(&'static str, &'static [&'static str])> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split(';').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line,
                    message: format!("malformed section header `{content}`"),
                })?;
                let found = SECTIONS.iter().find(|(s, _)| *s == name.trim()).ok_or_else(|| ConfigError::Syntax {
                    line,
                    message: format!("unknown section [{}]", name.trim()),
                })?;
                section = Some(*found);
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let key = key.trim();
            let (name, keys) = section.ok_or_else(|| ConfigError::Value {
                line,
                key: key.into(),
                message: "key outside of any section".into(),
            })?;
            let known = keys.iter().find(|k| **k == key).ok_or_else(|| ConfigError::Value {
                line,
                key: key.into(),
                message: format!("unknown key in [{name}]"),
            })?;
            let previous = entries.insert((name, *known), Entry { line, value: value.trim().to_string() });
            if let Some(previous) = previous {
                return Err(ConfigError::Value {
                    line,
                    key: key.into(),
                    message: format!("already set on line {}", previous.line),
                });
            }
        }
        let entries = Entries(entries);

        let defaults = TopologyConfig::new(0, 0, 0);
        let topology = TopologyConfig {
            cells: entries.require("topology", "cells")?,
            racks_per_cell: entries.require("topology", "racks_per_cell")?,
            olts: entries.require("topology", "olts")?,
            time_slots: entries.get("resources", "time_slots")?.unwrap_or(defaults.time_slots),
            planes: entries.get("resources", "planes")?.unwrap_or(defaults.planes),
        };
        let flag_defaults = DemandFlags::default();
        let demands = DemandFlags {
            include_intra_cell: entries
                .get("demands", "include_intra_cell")?
                .unwrap_or(flag_defaults.include_intra_cell),
            include_olt_pairs: entries.get("demands", "include_olt_pairs")?.unwrap_or(flag_defaults.include_olt_pairs),
        };
        let kind = match entries.0.get(&("solver", "kind")) {
            None => SolverKind::Exact,
            Some(e) => match e.value.as_str() {
                "exact" => SolverKind::Exact,
                "greedy" => SolverKind::Greedy,
                other => {
                    return Err(ConfigError::Value {
                        line: e.line,
                        key: "kind".into(),
                        message: format!("expected `exact` or `greedy`, found `{other}`"),
                    })
                }
            },
        };
        let solver = SolverConfig {
            kind,
            seed: entries.get("solver", "seed")?.unwrap_or(0),
            node_budget: entries.get("solver", "node_budget")?,
        };
        Ok(Config { topology, demands, solver })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
; larger instance
[topology]
cells = 2
racks_per_cell = 2
olts = 2

[resources]
time_slots = 10 ; frame length
";

    #[test]
    fn parses_with_defaults() {
        let c = Config::parse(SMALL).unwrap();
        assert_eq!(c.topology, TopologyConfig::new(2, 2, 2));
        assert_eq!(c.demands, DemandFlags::default());
        assert_eq!(c.solver, SolverConfig { kind: SolverKind::Exact, seed: 0, node_budget: None });
    }

    #[test]
    fn parses_every_key() {
        let text = "[topology]\ncells=4\nracks_per_cell=4\nolts=4\n[resources]\ntime_slots=3\nplanes=2\n\
                    [demands]\ninclude_intra_cell=false\ninclude_olt_pairs=true\n\
                    [solver]\nkind=greedy\nseed=7\nnode_budget=1000\n";
        let c = Config::parse(text).unwrap();
        assert_eq!(c.topology, TopologyConfig::new(4, 4, 4).with_time_slots(3));
        assert_eq!(c.demands, DemandFlags { include_intra_cell: false, include_olt_pairs: true });
        assert_eq!(c.solver, SolverConfig { kind: SolverKind::Greedy, seed: 7, node_budget: Some(1000) });
    }

    #[test]
    fn errors_name_line_and_key() {
        let e = Config::parse("[topology]\ncells = 2\nrack = 2\n").unwrap_err();
        assert_eq!(e.to_string(), "line 3: key `rack`: unknown key in [topology]");
        let e = Config::parse("[topology]\ncells = two\n").unwrap_err();
        assert_eq!(e.to_string(), "line 2: key `cells`: cannot parse `two` as usize");
        let e = Config::parse("[topology]\ncells = 2\nracks_per_cell = 1\n").unwrap_err();
        assert_eq!(e.to_string(), "missing key `olts` in [topology]");
        let e = Config::parse("[network]\n").unwrap_err();
        assert_eq!(e.to_string(), "line 1: unknown section [network]");
        let e = Config::parse("[topology]\ncells = 2\ncells = 3\n").unwrap_err();
        assert_eq!(e.to_string(), "line 3: key `cells`: already set on line 2");
        let base = "[topology]\ncells = 2\nracks_per_cell = 1\nolts = 0\n";
        let e = Config::parse(&format!("{base}[demands]\ninclude_olt_pairs = yes\n")).unwrap_err();
        assert!(e.to_string().starts_with("line 6: key `include_olt_pairs`"), "{e}");
        let e = Config::parse(&format!("{base}[solver]\nkind = milp\n")).unwrap_err();
        assert!(e.to_string().starts_with("line 6: key `kind`"), "{e}");
    }

    #[test]
    fn keys_are_case_sensitive() {
        assert!(Config::parse("[topology]\nCells = 2\n").is_err());
    }
}
