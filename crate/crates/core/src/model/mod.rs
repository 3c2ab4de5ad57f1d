//! Finite inquisitive epistemic models.
//!
//! Worlds are dense indices (at most 128, so an information state fits in a
//! `u128`). Each inquisitive assignment `Σ_a(w)` is stored as the antichain of
//! its maximal states.

mod eval;
mod raw;

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::Signature;

pub use eval::{
    kripke_truth, semantically_truth_conditional, support_set, supports, truth, SupportTable,
    DEFAULT_SUPPORT_CAP,
};
pub use raw::{RawModel, ValidationReport, Violation};

/// Hard representation limit on the number of worlds.
pub const MAX_WORLDS: usize = 128;

/// A set of worlds, as a bitmask over world indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct InfoState(pub u128);

impl InfoState {
    pub const EMPTY: InfoState = InfoState(0);

    pub fn singleton(w: usize) -> InfoState {
        InfoState(1u128 << w)
    }

    /// `{0, …, n-1}`.
    pub fn full(n: usize) -> InfoState {
        if n >= 128 {
            InfoState(u128::MAX)
        } else {
            InfoState((1u128 << n) - 1)
        }
    }

    pub fn from_worlds(ws: impl IntoIterator<Item = usize>) -> InfoState {
        InfoState(ws.into_iter().fold(0, |m, w| m | (1u128 << w)))
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, w: usize) -> bool {
        w < 128 && self.0 >> w & 1 == 1
    }

    pub fn is_subset(self, other: InfoState) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: InfoState) -> InfoState {
        InfoState(self.0 | other.0)
    }

    pub fn intersect(self, other: InfoState) -> InfoState {
        InfoState(self.0 & other.0)
    }

    pub fn minus(self, other: InfoState) -> InfoState {
        InfoState(self.0 & !other.0)
    }

    pub fn insert(&mut self, w: usize) {
        self.0 |= 1u128 << w;
    }

    /// Member worlds in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let w = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(w)
            }
        })
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Every subset, the empty set first and `self` last.
    pub fn subsets(self) -> impl Iterator<Item = InfoState> {
        let full = self.0;
        let mut sub: u128 = 0;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = sub;
            if sub == full {
                done = true;
            } else {
                sub = (sub.wrapping_sub(full)) & full;
            }
            Some(InfoState(out))
        })
    }

    /// Map through a world renumbering.
    pub fn map(self, f: impl Fn(usize) -> usize) -> InfoState {
        InfoState::from_worlds(self.iter().map(f))
    }
}

impl fmt::Debug for InfoState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Canonical order: by size, then lexicographically on sorted member lists.
impl Ord for InfoState {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 >> diff.trailing_zeros() & 1 == 1 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for InfoState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A downward-closed family of states, given by its maximal elements.
///
/// `∅` is always a member; it is stored as a generator only when it is the
/// sole member.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DownwardFamily {
    maximal: Vec<InfoState>,
}

impl DownwardFamily {
    /// Downward closure of `gens`; subsumed generators are dropped.
    pub fn from_generators(gens: impl IntoIterator<Item = InfoState>) -> DownwardFamily {
        let mut gs: Vec<InfoState> = gens.into_iter().collect();
        gs.sort();
        gs.dedup();
        let mut maximal: Vec<InfoState> = Vec::with_capacity(gs.len());
        for (i, &g) in gs.iter().enumerate() {
            if !gs[i + 1..].iter().any(|&h| g.is_subset(h)) {
                maximal.push(g);
            }
        }
        if maximal.is_empty() {
            maximal.push(InfoState::EMPTY);
        }
        DownwardFamily { maximal }
    }

    /// `℘(s)`.
    pub fn powerset(s: InfoState) -> DownwardFamily {
        DownwardFamily { maximal: vec![s] }
    }

    /// Just `{∅}`.
    pub fn trivial() -> DownwardFamily {
        DownwardFamily::powerset(InfoState::EMPTY)
    }

    pub fn maximal(&self) -> &[InfoState] {
        &self.maximal
    }

    pub fn contains(&self, s: InfoState) -> bool {
        self.maximal.iter().any(|&g| s.is_subset(g))
    }

    /// Union of all members.
    pub fn union(&self) -> InfoState {
        self.maximal
            .iter()
            .fold(InfoState::EMPTY, |a, &g| a.union(g))
    }

    /// Every member, in canonical order. Exponential in generator size.
    pub fn members(&self) -> Vec<InfoState> {
        let mut out: Vec<InfoState> = self.maximal.iter().flat_map(|g| g.subsets()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn map(&self, f: impl Fn(usize) -> usize) -> DownwardFamily {
        DownwardFamily::from_generators(self.maximal.iter().map(|s| s.map(&f)))
    }

    /// Is every member of `self` a member of `other`?
    pub fn is_subfamily(&self, other: &DownwardFamily) -> bool {
        self.maximal.iter().all(|&g| other.contains(g))
    }
}

impl fmt::Debug for DownwardFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "↓")?;
        f.debug_list().entries(&self.maximal).finish()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("model has {0} worlds; the limit is {1}")]
    TooManyWorlds(usize, usize),
    #[error("model was built without validation")]
    NotValidated,
    #[error("{0}")]
    Invalid(ValidationReport),
}

/// A finite inquisitive epistemic model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpistemicModel {
    sig: Signature,
    worlds: Vec<String>,
    // indexed by the signature's prop order
    val: Vec<InfoState>,
    // [agent][world]
    sigma: Vec<Vec<DownwardFamily>>,
    validated: bool,
}

impl EpistemicModel {
    /// Assemble and validate. `val` follows `sig.props()`, `sigma` follows
    /// `sig.agents()` and then world order.
    pub fn new(
        sig: Signature,
        worlds: Vec<String>,
        val: Vec<InfoState>,
        sigma: Vec<Vec<DownwardFamily>>,
    ) -> Result<EpistemicModel, ValidationReport> {
        let m = EpistemicModel::new_unchecked(sig, worlds, val, sigma);
        let report = m.check_frame_conditions();
        if report.is_ok() {
            Ok(EpistemicModel {
                validated: true,
                ..m
            })
        } else {
            Err(report)
        }
    }

    /// Assemble without checking the frame conditions. The result is
    /// flagged as unvalidated.
    pub fn new_unchecked(
        sig: Signature,
        worlds: Vec<String>,
        val: Vec<InfoState>,
        sigma: Vec<Vec<DownwardFamily>>,
    ) -> EpistemicModel {
        assert!(worlds.len() <= MAX_WORLDS, "too many worlds");
        assert_eq!(val.len(), sig.props().len());
        assert_eq!(sigma.len(), sig.agents().len());
        assert!(sigma.iter().all(|row| row.len() == worlds.len()));
        EpistemicModel {
            sig,
            worlds,
            val,
            sigma,
            validated: false,
        }
    }

    /// Frame-condition report (empty when the model is an epistemic model).
    pub fn check_frame_conditions(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (ai, agent) in self.sig.agents().iter().enumerate() {
            for w in 0..self.worlds.len() {
                let fam = &self.sigma[ai][w];
                let sw = fam.union();
                if !sw.contains(w) {
                    violations.push(Violation::Factivity {
                        agent: agent.clone(),
                        world: self.worlds[w].clone(),
                    });
                }
                for v in sw.iter() {
                    if v < self.worlds.len() && self.sigma[ai][v] != *fam {
                        violations.push(Violation::Introspection {
                            agent: agent.clone(),
                            world: self.worlds[w].clone(),
                            other: self.worlds[v].clone(),
                        });
                        break;
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn all(&self) -> InfoState {
        InfoState::full(self.worlds.len())
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn world(&self, name: &str) -> Result<usize, ModelError> {
        self.world_index(name)
            .ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
    }

    /// Parse a comma-separated world list; the empty string is `∅`.
    pub fn parse_state(&self, text: &str) -> Result<InfoState, ModelError> {
        let mut s = InfoState::EMPTY;
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            s.insert(self.world(part)?);
        }
        Ok(s)
    }

    pub fn state_names(&self, s: InfoState) -> Vec<String> {
        s.iter().map(|w| self.worlds[w].clone()).collect()
    }

    /// `V(p)`; propositions outside the signature are false everywhere.
    pub fn valuation(&self, prop: &str) -> InfoState {
        self.sig
            .prop_index(prop)
            .map_or(InfoState::EMPTY, |i| self.val[i])
    }

    pub fn valuation_by_index(&self, i: usize) -> InfoState {
        self.val[i]
    }

    /// `Σ_a(w)` for an agent index.
    pub fn sigma_family(&self, agent: usize, w: usize) -> &DownwardFamily {
        &self.sigma[agent][w]
    }

    /// `Σ_a(w)` by agent name; agents outside the signature get `℘({w})`.
    pub fn inquisitive_state(&self, agent: &str, w: usize) -> DownwardFamily {
        match self.sig.agent_index(agent) {
            Some(a) => self.sigma[a][w].clone(),
            None => DownwardFamily::powerset(InfoState::singleton(w)),
        }
    }

    /// `σ_a(w)`, the union of `Σ_a(w)`.
    pub fn sigma(&self, agent: usize, w: usize) -> InfoState {
        self.sigma[agent][w].union()
    }

    pub fn sigma_by_name(&self, agent: &str, w: usize) -> InfoState {
        match self.sig.agent_index(agent) {
            Some(a) => self.sigma(a, w),
            None => InfoState::singleton(w),
        }
    }

    /// Propositional type of `w` as a bitmask over prop indices.
    pub fn prop_type(&self, w: usize) -> u64 {
        self.val
            .iter()
            .enumerate()
            .filter(|(_, v)| v.contains(w))
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    /// Distinct `a`-classes in order of their least world.
    pub fn classes(&self, agent: usize) -> Vec<InfoState> {
        let mut seen = InfoState::EMPTY;
        let mut out = Vec::new();
        for w in 0..self.len() {
            if !seen.contains(w) {
                let c = self.sigma(agent, w);
                seen = seen.union(c);
                out.push(c);
            }
        }
        out
    }

    /// Copy with a different name list (same length).
    pub fn renamed(&self, worlds: Vec<String>) -> EpistemicModel {
        assert_eq!(worlds.len(), self.worlds.len());
        EpistemicModel {
            worlds,
            ..self.clone()
        }
    }

    /// Copy with `Σ` replaced for one agent; frame conditions are rechecked.
    pub fn with_sigma(
        &self,
        agent: usize,
        row: Vec<DownwardFamily>,
    ) -> Result<EpistemicModel, ValidationReport> {
        let mut sigma = self.sigma.clone();
        sigma[agent] = row;
        EpistemicModel::new(self.sig.clone(), self.worlds.clone(), self.val.clone(), sigma)
    }

    /// Expand the signature; new props are false, new agents get `℘({w})`.
    pub fn extend_signature(&self, sig: &Signature) -> EpistemicModel {
        let merged = self.sig.merge(sig);
        let val = merged.props().iter().map(|p| self.valuation(p)).collect();
        let sigma = merged
            .agents()
            .iter()
            .map(|a| (0..self.len()).map(|w| self.inquisitive_state(a, w)).collect())
            .collect();
        EpistemicModel {
            sig: merged,
            worlds: self.worlds.clone(),
            val,
            sigma,
            validated: self.validated,
        }
    }

    pub fn kripke_companion(&self) -> KripkeFrame {
        KripkeFrame {
            worlds: self.worlds.clone(),
            agents: self.sig.agents().to_vec(),
            classes: (0..self.sig.agents().len()).map(|a| self.classes(a)).collect(),
        }
    }

    pub fn to_raw(&self) -> RawModel {
        raw::to_raw(self)
    }
}

/// The underlying S5 frame: one partition of the worlds per agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KripkeFrame {
    pub worlds: Vec<String>,
    pub agents: Vec<String>,
    /// `classes[a]` partitions the worlds.
    #[serde(skip)]
    pub classes: Vec<Vec<InfoState>>,
}

impl KripkeFrame {
    /// Build from explicit partitions; panics if some `classes[a]` is not a
    /// partition of the worlds.
    pub fn new(worlds: Vec<String>, agents: Vec<String>, classes: Vec<Vec<InfoState>>) -> Self {
        let all = InfoState::full(worlds.len());
        for part in &classes {
            let mut seen = InfoState::EMPTY;
            for &c in part {
                assert!(!c.is_empty() && c.intersect(seen).is_empty(), "classes overlap");
                seen = seen.union(c);
            }
            assert_eq!(seen, all, "classes do not cover the worlds");
        }
        KripkeFrame {
            worlds,
            agents,
            classes,
        }
    }

    /// `[w]_a`.
    pub fn class_of(&self, agent: usize, w: usize) -> InfoState {
        *self.classes[agent]
            .iter()
            .find(|c| c.contains(w))
            .expect("partition covers every world")
    }

    /// Is `R_a` reflexive, symmetric and transitive? True by construction for
    /// partitions; checked pairwise as a sanity assertion.
    pub fn is_equivalence(&self, agent: usize) -> bool {
        let n = self.worlds.len();
        (0..n).all(|v| {
            self.class_of(agent, v).contains(v)
                && (0..n).all(|w| {
                    let r = self.class_of(agent, v).contains(w);
                    r == self.class_of(agent, w).contains(v)
                        && (!r || self.class_of(agent, v) == self.class_of(agent, w))
                })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerates_all() {
        let s = InfoState::from_worlds([1, 3, 4]);
        let subs: Vec<InfoState> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert_eq!(subs[0], InfoState::EMPTY);
        assert_eq!(*subs.last().unwrap(), s);
        assert!(subs.iter().all(|t| t.is_subset(s)));
        assert_eq!(InfoState::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn canonical_order() {
        let a = InfoState::from_worlds([0, 2]);
        let b = InfoState::from_worlds([1, 2]);
        let c = InfoState::from_worlds([0]);
        let mut v = vec![b, a, c, InfoState::EMPTY];
        v.sort();
        assert_eq!(v, vec![InfoState::EMPTY, c, a, b]);
    }

    #[test]
    fn family_normalises() {
        let f = DownwardFamily::from_generators([
            InfoState::from_worlds([0]),
            InfoState::from_worlds([0, 1]),
            InfoState::EMPTY,
            InfoState::from_worlds([2]),
        ]);
        assert_eq!(
            f.maximal(),
            &[InfoState::from_worlds([2]), InfoState::from_worlds([0, 1])]
        );
        assert!(f.contains(InfoState::EMPTY));
        assert!(!f.contains(InfoState::from_worlds([1, 2])));
        assert_eq!(f.members().len(), 5);
        assert_eq!(DownwardFamily::from_generators([]).maximal(), &[InfoState::EMPTY]);
    }
}
