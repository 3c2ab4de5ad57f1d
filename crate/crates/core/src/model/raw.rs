//! JSON model files and the validation report.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{DownwardFamily, EpistemicModel, InfoState, MAX_WORLDS};
use crate::formula::Signature;

/// The on-disk model description.
///
/// `sigma[agent][world]` lists the generating states of `Σ_agent(world)`;
/// subsumed generators are dropped silently.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub agents: Vec<String>,
    #[serde(default)]
    pub props: Vec<String>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub sigma: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Malformed { message: String },
    NonEmptiness { agent: String, world: String },
    Factivity { agent: String, world: String },
    Introspection { agent: String, world: String, other: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Malformed { message } => write!(f, "malformed: {message}"),
            Violation::NonEmptiness { agent, world } => {
                write!(f, "Σ_{agent}({world}) is empty")
            }
            Violation::Factivity { agent, world } => {
                write!(f, "{world} ∉ σ_{agent}({world})")
            }
            Violation::Introspection {
                agent,
                world,
                other,
            } => write!(
                f,
                "{other} ∈ σ_{agent}({world}) but Σ_{agent}({other}) ≠ Σ_{agent}({world})"
            ),
        }
    }
}

/// Every violated condition, with witnesses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn malformed(&mut self, message: String) {
        self.violations.push(Violation::Malformed { message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "invalid model: {}", parts.join("; "))
    }
}

impl std::error::Error for ValidationReport {}

impl RawModel {
    /// Parse and check every frame condition.
    pub fn validate(&self) -> Result<EpistemicModel, ValidationReport> {
        let m = self.build()?;
        let report = m.check_frame_conditions();
        if !report.is_ok() {
            return Err(report);
        }
        Ok(EpistemicModel {
            validated: true,
            ..m
        })
    }

    /// Structural checks only; the model is flagged unvalidated.
    pub fn build_unchecked(&self) -> Result<EpistemicModel, ValidationReport> {
        self.build()
    }

    fn build(&self) -> Result<EpistemicModel, ValidationReport> {
        let mut report = ValidationReport::default();
        if self.worlds.len() > MAX_WORLDS {
            report.malformed(format!(
                "{} worlds exceed the limit of {MAX_WORLDS}",
                self.worlds.len()
            ));
            return Err(report);
        }
        let mut seen = HashSet::new();
        for w in &self.worlds {
            if !seen.insert(w.as_str()) {
                report.malformed(format!("duplicate world `{w}`"));
            }
        }
        for (what, names) in [("agent", &self.agents), ("prop", &self.props)] {
            let mut seen = HashSet::new();
            for n in names {
                if !seen.insert(n.as_str()) {
                    report.malformed(format!("duplicate {what} `{n}`"));
                }
            }
        }
        if !report.is_ok() {
            return Err(report);
        }
        let sig = Signature::new(self.agents.iter().cloned(), self.props.iter().cloned());
        let index = |name: &str, report: &mut ValidationReport| -> Option<usize> {
            let i = self.worlds.iter().position(|w| w == name);
            if i.is_none() {
                report.malformed(format!("unknown world `{name}`"));
            }
            i
        };
        let state = |names: &[String], report: &mut ValidationReport| -> InfoState {
            InfoState::from_worlds(names.iter().filter_map(|n| index(n, report)))
        };

        for p in self.valuation.keys() {
            if !sig.has_prop(p) {
                report.malformed(format!("valuation for undeclared prop `{p}`"));
            }
        }
        let val: Vec<InfoState> = sig
            .props()
            .iter()
            .map(|p| {
                self.valuation
                    .get(p)
                    .map_or(InfoState::EMPTY, |ws| state(ws, &mut report))
            })
            .collect();

        for a in self.sigma.keys() {
            if !sig.has_agent(a) {
                report.malformed(format!("sigma for undeclared agent `{a}`"));
            }
        }
        let mut sigma = Vec::new();
        for a in sig.agents() {
            let row_in = self.sigma.get(a);
            if let Some(row) = row_in {
                for w in row.keys() {
                    if !self.worlds.contains(w) {
                        report.malformed(format!("sigma.{a} names unknown world `{w}`"));
                    }
                }
            }
            let mut row = Vec::new();
            for w in &self.worlds {
                match row_in.and_then(|r| r.get(w)) {
                    None => {
                        report.malformed(format!("sigma.{a}.{w} is missing"));
                        row.push(DownwardFamily::trivial());
                    }
                    Some(gens) if gens.is_empty() => {
                        report.violations.push(Violation::NonEmptiness {
                            agent: a.clone(),
                            world: w.clone(),
                        });
                        row.push(DownwardFamily::trivial());
                    }
                    Some(gens) => row.push(DownwardFamily::from_generators(
                        gens.iter().map(|g| state(g, &mut report)),
                    )),
                }
            }
            sigma.push(row);
        }
        if !report.is_ok() {
            return Err(report);
        }
        Ok(EpistemicModel::new_unchecked(
            sig,
            self.worlds.clone(),
            val,
            sigma,
        ))
    }
}

pub(super) fn to_raw(m: &EpistemicModel) -> RawModel {
    let names = |s: InfoState| m.state_names(s);
    let sig = m.sig();
    RawModel {
        worlds: m.worlds().to_vec(),
        agents: sig.agents().to_vec(),
        props: sig.props().to_vec(),
        valuation: sig
            .props()
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), names(m.valuation_by_index(i))))
            .collect(),
        sigma: sig
            .agents()
            .iter()
            .enumerate()
            .map(|(a, name)| {
                let row = (0..m.len())
                    .map(|w| {
                        let gens = m.sigma_family(a, w).maximal().iter();
                        (m.worlds()[w].clone(), gens.map(|&g| names(g)).collect())
                    })
                    .collect();
                (name.clone(), row)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn raw(v: serde_json::Value) -> RawModel {
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn m1_is_valid() {
        let m = raw(json!({
            "worlds": ["u", "v"], "agents": ["a"], "props": ["p"],
            "valuation": {"p": ["u"]},
            "sigma": {"a": {"u": [["u"], ["v"]], "v": [["u"], ["v"]]}}
        }))
        .validate()
        .unwrap();
        assert!(m.is_validated());
        assert_eq!(m.sigma(0, 0), InfoState::from_worlds([0, 1]));
        assert_eq!(m.to_raw().validate().unwrap(), m);
    }

    #[test]
    fn factivity_violation() {
        let gens = json!([["w1"], ["w2"]]);
        let r = raw(json!({
            "worlds": ["w1", "w2", "w3"], "agents": ["a"], "props": [],
            "sigma": {"a": {"w1": gens, "w2": gens, "w3": gens}}
        }));
        let report = r.validate().unwrap_err();
        assert!(report.violations.contains(&Violation::Factivity {
            agent: "a".into(),
            world: "w3".into()
        }));
        assert!(!r.build_unchecked().unwrap().is_validated());
    }

    #[test]
    fn introspection_violation() {
        let report = raw(json!({
            "worlds": ["u", "v"], "agents": ["a"], "props": [],
            "sigma": {"a": {"u": [["u", "v"]], "v": [["u"]]}}
        }))
        .validate()
        .unwrap_err();
        assert!(report.violations.contains(&Violation::Introspection {
            agent: "a".into(),
            world: "u".into(),
            other: "v".into()
        }));
    }

    #[test]
    fn structural_errors() {
        let report = raw(json!({
            "worlds": ["u", "u"], "agents": ["a"], "props": []
        }))
        .validate()
        .unwrap_err();
        assert!(matches!(report.violations[0], Violation::Malformed { .. }));
        let report = raw(json!({
            "worlds": ["u"], "agents": ["a"], "props": [],
            "sigma": {"a": {"u": []}}
        }))
        .validate()
        .unwrap_err();
        assert_eq!(
            report.violations,
            vec![Violation::NonEmptiness {
                agent: "a".into(),
                world: "u".into()
            }]
        );
        let report = raw(json!({
            "worlds": ["u"], "agents": ["a"], "props": ["p"],
            "valuation": {"p": ["x"]},
            "sigma": {"a": {"u": [["u"]]}}
        }))
        .validate()
        .unwrap_err();
        assert!(report.to_string().contains("unknown world `x`"));
    }
}
