//! Two-sorted relational encodings `(W, S, E_a, ε, P_p)` of epistemic models.
//!
//! States are stored extensionally as [`InfoState`]s, so `ε` is actual
//! membership. Encodings list `S` in canonical order (size, then
//! lexicographic).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fo::{rel_e, rel_p, GenericStructure, REL_IN, SORT_S, SORT_W};
use crate::formula::Signature;
use crate::model::{DownwardFamily, EpistemicModel, InfoState};

/// Largest world count for which a full encoding (`S = ℘(W)`) is built.
pub const FULL_ENCODING_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingFlavor {
    Minimal,
    LocallyFull,
    Full,
}

impl FromStr for EncodingFlavor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "minimal" | "rel" => Ok(EncodingFlavor::Minimal),
            "locally_full" | "locally-full" | "lf" => Ok(EncodingFlavor::LocallyFull),
            "full" => Ok(EncodingFlavor::Full),
            _ => Err(format!("unknown flavor `{s}` (minimal, locally_full, full)")),
        }
    }
}

impl fmt::Display for EncodingFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingFlavor::Minimal => "minimal",
            EncodingFlavor::LocallyFull => "locally_full",
            EncodingFlavor::Full => "full",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationalError {
    #[error("model was not validated")]
    NotValidated,
    #[error("full encoding of {worlds} worlds exceeds the cap {cap}")]
    Cap { worlds: usize, cap: usize },
    #[error("invalid relational model: {0}")]
    Invalid(RelationalReport),
    #[error("malformed relational model: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationalModel {
    pub sig: Signature,
    pub worlds: Vec<String>,
    pub states: Vec<InfoState>,
    /// `e[agent][world]`: sorted indices into `states`.
    pub e: Vec<Vec<Vec<usize>>>,
    /// By prop index.
    pub val: Vec<InfoState>,
}

/// A failed condition with its witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum RelViolation {
    Extensionality { first: usize, second: usize },
    LocalPowerset { state: Vec<String>, missing: Vec<String> },
    NonEmptiness { agent: String, world: String },
    DownwardClosure { agent: String, world: String, member: Vec<String>, missing: Vec<String> },
    Factivity { agent: String, world: String },
    Introspection { agent: String, world: String, other: String },
}

impl RelViolation {
    fn condition(&self) -> &'static str {
        match self {
            RelViolation::Extensionality { .. } => "extensionality",
            RelViolation::LocalPowerset { .. } => "local_powerset",
            RelViolation::NonEmptiness { .. } => "non_emptiness",
            RelViolation::DownwardClosure { .. } => "downward_closure",
            RelViolation::Factivity { .. } => "factivity",
            RelViolation::Introspection { .. } => "introspection",
        }
    }
}

pub const CONDITIONS: [&str; 6] = [
    "extensionality",
    "local_powerset",
    "non_emptiness",
    "downward_closure",
    "factivity",
    "introspection",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationalReport {
    /// Pass/fail per condition, in the order of [`CONDITIONS`].
    pub conditions: BTreeMap<String, bool>,
    pub violations: Vec<RelViolation>,
    pub locally_full: bool,
    pub full: bool,
}

impl RelationalReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for RelationalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed: Vec<&str> = self.violations.iter().map(|v| v.condition()).collect();
        write!(f, "failed conditions: {}", failed.join(", "))
    }
}

fn state_family(m: &EpistemicModel, flavor: EncodingFlavor, pointed: Option<InfoState>) -> Vec<InfoState> {
    let mut set: HashSet<InfoState> = HashSet::new();
    let na = m.sig().agents().len();
    match flavor {
        EncodingFlavor::Minimal => {
            for a in 0..na {
                for w in 0..m.len() {
                    for &g in m.sigma_family(a, w).maximal() {
                        set.extend(g.subsets());
                    }
                }
            }
        }
        EncodingFlavor::LocallyFull => {
            for a in 0..na {
                for w in 0..m.len() {
                    set.extend(m.sigma(a, w).subsets());
                }
            }
        }
        EncodingFlavor::Full => set.extend(m.all().subsets()),
    }
    if let Some(s) = pointed {
        set.extend(s.subsets());
    }
    let mut v: Vec<InfoState> = set.into_iter().collect();
    v.sort();
    v
}

/// `M^rel`, `M^lf` or `M^full`, optionally augmented by `℘(s)` for a
/// state-pointed model. `M` must be validated.
pub fn encode(m: &EpistemicModel, flavor: EncodingFlavor, pointed: Option<InfoState>) -> Result<RelationalModel, RelationalError> {
    encode_capped(m, flavor, pointed, FULL_ENCODING_CAP)
}

pub fn encode_capped(
    m: &EpistemicModel,
    flavor: EncodingFlavor,
    pointed: Option<InfoState>,
    cap: usize,
) -> Result<RelationalModel, RelationalError> {
    if !m.is_validated() {
        return Err(RelationalError::NotValidated);
    }
    let r = encode_unchecked(m, flavor, pointed, cap)?;
    let report = validate_relational(&r);
    if !report.is_ok() {
        return Err(RelationalError::Invalid(report));
    }
    Ok(r)
}

/// Encoding without any validity requirement on `M` (for illustrations
/// that break the frame conditions).
pub fn encode_unchecked(
    m: &EpistemicModel,
    flavor: EncodingFlavor,
    pointed: Option<InfoState>,
    cap: usize,
) -> Result<RelationalModel, RelationalError> {
    if flavor == EncodingFlavor::Full && m.len() > cap {
        return Err(RelationalError::Cap { worlds: m.len(), cap });
    }
    let states = state_family(m, flavor, pointed);
    let e = (0..m.sig().agents().len())
        .map(|a| {
            (0..m.len())
                .map(|w| {
                    let fam = m.sigma_family(a, w);
                    (0..states.len()).filter(|&i| fam.contains(states[i])).collect()
                })
                .collect()
        })
        .collect();
    Ok(RelationalModel {
        sig: m.sig().clone(),
        worlds: m.worlds().to_vec(),
        states,
        e,
        val: (0..m.sig().props().len()).map(|p| m.valuation_by_index(p)).collect(),
    })
}

impl RelationalModel {
    fn names(&self, s: InfoState) -> Vec<String> {
        s.iter().map(|w| self.worlds[w].clone()).collect()
    }

    /// `R_a[w]`: the union of `E_a[w]`.
    pub fn r(&self, a: usize, w: usize) -> InfoState {
        self.e[a][w]
            .iter()
            .fold(InfoState::EMPTY, |acc, &i| acc.union(self.states[i]))
    }

    /// Display name of a state, e.g. `{u,v}`.
    pub fn state_name(&self, s: InfoState) -> String {
        format!("{{{}}}", self.names(s).join(","))
    }

    pub fn to_json(&self) -> RelationalJson {
        RelationalJson {
            worlds: self.worlds.clone(),
            agents: self.sig.agents().to_vec(),
            props: self.sig.props().to_vec(),
            states: self.states.iter().map(|&s| self.names(s)).collect(),
            e: self
                .sig
                .agents()
                .iter()
                .enumerate()
                .map(|(a, name)| {
                    (
                        name.clone(),
                        self.worlds
                            .iter()
                            .enumerate()
                            .map(|(w, wn)| (wn.clone(), self.e[a][w].clone()))
                            .collect(),
                    )
                })
                .collect(),
            p: self
                .sig
                .props()
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), self.names(self.val[i])))
                .collect(),
        }
    }

    pub fn from_json(j: &RelationalJson) -> Result<RelationalModel, RelationalError> {
        let bad = |m: String| RelationalError::Malformed(m);
        if j.worlds.len() > crate::model::MAX_WORLDS {
            return Err(bad(format!("more than {} worlds", crate::model::MAX_WORLDS)));
        }
        let index: HashMap<&str, usize> = j.worlds.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        if index.len() != j.worlds.len() {
            return Err(bad("duplicate world".into()));
        }
        let state = |ws: &[String]| -> Result<InfoState, RelationalError> {
            ws.iter()
                .map(|w| index.get(w.as_str()).copied().ok_or_else(|| bad(format!("unknown world `{w}`"))))
                .collect::<Result<Vec<_>, _>>()
                .map(InfoState::from_worlds)
        };
        let sig = Signature::new(j.agents.iter().cloned(), j.props.iter().cloned());
        if sig.agents().len() != j.agents.len() || sig.props().len() != j.props.len() {
            return Err(bad("duplicate agent or prop".into()));
        }
        let states = j.states.iter().map(|s| state(s)).collect::<Result<Vec<_>, _>>()?;
        let mut e = Vec::new();
        for a in sig.agents() {
            let row = j.e.get(a).ok_or_else(|| bad(format!("E.{a} missing")))?;
            let mut out = Vec::new();
            for w in &j.worlds {
                let mut idx = row.get(w).cloned().unwrap_or_default();
                if idx.iter().any(|&i| i >= states.len()) {
                    return Err(bad(format!("E.{a}.{w} refers to a missing state")));
                }
                idx.sort_unstable();
                idx.dedup();
                out.push(idx);
            }
            e.push(out);
        }
        let val = sig
            .props()
            .iter()
            .map(|p| j.p.get(p).map_or(Ok(InfoState::EMPTY), |ws| state(ws)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RelationalModel {
            sig,
            worlds: j.worlds.clone(),
            states,
            e,
            val,
        })
    }

    /// The relational model as a [`GenericStructure`] with sorts `W`, `S`
    /// and relations `in`, `E[a]`, `P[p]`.
    pub fn to_structure(&self) -> GenericStructure {
        let snames: Vec<String> = self.states.iter().map(|&s| self.state_name(s)).collect();
        let mut b = GenericStructure::builder()
            .sort(SORT_W, self.worlds.iter().cloned())
            .sort(SORT_S, snames.iter().cloned());
        let mut inrel = Vec::new();
        for (i, &s) in self.states.iter().enumerate() {
            for w in s.iter() {
                inrel.push(vec![self.worlds[w].clone(), snames[i].clone()]);
            }
        }
        b = b.relation(REL_IN, &[SORT_W, SORT_S], inrel);
        for (a, name) in self.sig.agents().iter().enumerate() {
            let tuples = (0..self.worlds.len())
                .flat_map(|w| self.e[a][w].iter().map(move |&i| (w, i)))
                .map(|(w, i)| vec![self.worlds[w].clone(), snames[i].clone()]);
            b = b.relation(&rel_e(name), &[SORT_W, SORT_S], tuples);
        }
        for (p, name) in self.sig.props().iter().enumerate() {
            b = b.relation(&rel_p(name), &[SORT_W], self.val[p].iter().map(|w| vec![self.worlds[w].clone()]));
        }
        b.build().expect("relational model as structure")
    }
}

/// Check conditions (i)–(vi) and report fullness.
pub fn validate_relational(r: &RelationalModel) -> RelationalReport {
    let mut v = Vec::new();
    let mut first: HashMap<InfoState, usize> = HashMap::new();
    for (i, &s) in r.states.iter().enumerate() {
        if let Some(&j) = first.get(&s) {
            v.push(RelViolation::Extensionality { first: j, second: i });
        } else {
            first.insert(s, i);
        }
    }
    let mut distinct: Vec<InfoState> = first.keys().copied().collect();
    distinct.sort();
    for s in distinct {
        if let Some(t) = s.subsets().find(|t| !first.contains_key(t)) {
            v.push(RelViolation::LocalPowerset {
                state: r.names(s),
                missing: r.names(t),
            });
        }
    }
    let n = r.worlds.len();
    for (a, agent) in r.sig.agents().iter().enumerate() {
        for w in 0..n {
            let ew = &r.e[a][w];
            let wn = || r.worlds[w].clone();
            if ew.is_empty() {
                v.push(RelViolation::NonEmptiness { agent: agent.clone(), world: wn() });
            }
            'dc: for &i in ew {
                for (j, &t) in r.states.iter().enumerate() {
                    if t.is_subset(r.states[i]) && !ew.contains(&j) {
                        v.push(RelViolation::DownwardClosure {
                            agent: agent.clone(),
                            world: wn(),
                            member: r.names(r.states[i]),
                            missing: r.names(t),
                        });
                        break 'dc;
                    }
                }
            }
            let rw = r.r(a, w);
            if !rw.contains(w) {
                v.push(RelViolation::Factivity { agent: agent.clone(), world: wn() });
            }
            let set_w: HashSet<InfoState> = ew.iter().map(|&i| r.states[i]).collect();
            for u in rw.iter() {
                let set_u: HashSet<InfoState> = r.e[a][u].iter().map(|&i| r.states[i]).collect();
                if set_u != set_w {
                    v.push(RelViolation::Introspection {
                        agent: agent.clone(),
                        world: wn(),
                        other: r.worlds[u].clone(),
                    });
                    break;
                }
            }
        }
    }
    let locally_full = (0..r.sig.agents().len())
        .all(|a| (0..n).all(|w| r.r(a, w).subsets().all(|t| first.contains_key(&t))));
    let full = n < 64 && first.len() == 1usize << n;
    let conditions = CONDITIONS
        .iter()
        .map(|c| (c.to_string(), !v.iter().any(|x| x.condition() == *c)))
        .collect();
    RelationalReport {
        conditions,
        violations: v,
        locally_full,
        full,
    }
}

/// `M*`: `Σ_a(w) = E_a[w]`, `V(p) = P_p`. `R` must pass validation.
pub fn decode(r: &RelationalModel) -> Result<EpistemicModel, RelationalError> {
    let report = validate_relational(r);
    if !report.is_ok() {
        return Err(RelationalError::Invalid(report));
    }
    let sigma = (0..r.sig.agents().len())
        .map(|a| {
            (0..r.worlds.len())
                .map(|w| DownwardFamily::from_generators(r.e[a][w].iter().map(|&i| r.states[i])))
                .collect()
        })
        .collect();
    EpistemicModel::new(r.sig.clone(), r.worlds.clone(), r.val.clone(), sigma)
        .map_err(|e| RelationalError::Malformed(e.to_string()))
}

/// JSON form: states as sorted world-name lists, `E` as index arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationalJson {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub agents: Vec<String>,
    #[serde(default)]
    pub props: Vec<String>,
    pub states: Vec<Vec<String>>,
    #[serde(rename = "E", default)]
    pub e: BTreeMap<String, BTreeMap<String, Vec<usize>>>,
    #[serde(rename = "P", default)]
    pub p: BTreeMap<String, Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn illustration_sizes() {
        let m = samples::three_world_illustration();
        assert!(matches!(encode(&m, EncodingFlavor::Minimal, None), Err(RelationalError::NotValidated)));
        let size = |f| encode_unchecked(&m, f, None, FULL_ENCODING_CAP).unwrap().states.len();
        assert_eq!(size(EncodingFlavor::Minimal), 3);
        assert_eq!(size(EncodingFlavor::LocallyFull), 4);
        assert_eq!(size(EncodingFlavor::Full), 8);
        let r = encode_unchecked(&m, EncodingFlavor::Minimal, None, 16).unwrap();
        let names: Vec<String> = r.states.iter().map(|&s| r.state_name(s)).collect();
        assert_eq!(names, ["{}", "{w1}", "{w2}"]);
        assert_eq!(validate_relational(&r).conditions["factivity"], false);
    }

    #[test]
    fn m1_encodings() {
        let m1 = samples::m1();
        let lf = encode(&m1, EncodingFlavor::LocallyFull, None).unwrap();
        assert_eq!(lf.states.len(), 4);
        let rep = validate_relational(&lf);
        assert!(rep.is_ok() && rep.locally_full && rep.full);
        for f in [EncodingFlavor::Minimal, EncodingFlavor::LocallyFull, EncodingFlavor::Full] {
            assert_eq!(decode(&encode(&m1, f, None).unwrap()).unwrap(), m1);
        }
        let min = encode(&m1, EncodingFlavor::Minimal, None).unwrap();
        assert_eq!(min.states.len(), 3);
        let pointed = encode(&m1, EncodingFlavor::Minimal, Some(m1.all())).unwrap();
        assert_eq!(pointed.states.len(), 4);
        let back = RelationalModel::from_json(&lf.to_json()).unwrap();
        assert_eq!(back, lf);
    }

    #[test]
    fn violations() {
        let m1 = samples::m1();
        let mut r = encode(&m1, EncodingFlavor::Minimal, None).unwrap();
        // drop ∅ (index 0) and shift E
        r.states.remove(0);
        for row in &mut r.e {
            for ix in row.iter_mut() {
                *ix = ix.iter().filter(|&&i| i > 0).map(|i| i - 1).collect();
            }
        }
        let rep = validate_relational(&r);
        assert!(!rep.conditions["local_powerset"]);
        assert!(rep.conditions["extensionality"]);

        let mut r = encode(&m1, EncodingFlavor::Full, None).unwrap();
        // remove ∅ from E_a[u] only
        r.e[0][0].retain(|&i| i != 0);
        let rep = validate_relational(&r);
        assert!(!rep.conditions["downward_closure"]);
        assert!(!rep.conditions["introspection"]);
        assert!(decode(&r).is_err());

        let mut r = encode(&m1, EncodingFlavor::Full, None).unwrap();
        r.states.push(InfoState::EMPTY);
        assert!(!validate_relational(&r).conditions["extensionality"]);
    }

    #[test]
    fn same_star_different_s() {
        let m1 = samples::m1();
        let a = encode(&m1, EncodingFlavor::Minimal, None).unwrap();
        let b = encode(&m1, EncodingFlavor::Full, None).unwrap();
        assert_ne!(a.states, b.states);
        assert_eq!(decode(&a).unwrap(), decode(&b).unwrap());
    }

    #[test]
    fn structure_view() {
        let m1 = samples::m1();
        let a = encode(&m1, EncodingFlavor::LocallyFull, None).unwrap().to_structure();
        assert_eq!(a.size(), 6);
        assert_eq!(a.relation("in").unwrap().tuples().len(), 4);
        assert_eq!(a.relation("E[a]").unwrap().tuples().len(), 6);
    }
}
