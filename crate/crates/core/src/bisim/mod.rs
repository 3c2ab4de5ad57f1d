//! Bisimulation: colourings by `∼ⁿ`-type, the two-player game, and
//! characteristic formulas.
//!
//! Everything cross-model runs on the juxtaposition of the two models (left
//! worlds first). Refinement uses the generator form of the one-round
//! condition: `w ∼ⁿ⁺¹ w'` iff both agree at level `n` and, for every agent,
//! the colour sets of maximal generators of `Σ_a(w)` and `Σ_a(w')` have the
//! same downward closure.

mod charform;
mod game;

use std::collections::HashMap;

use serde::Serialize;

use crate::formula::Signature;
use crate::model::{EpistemicModel, InfoState};

pub use charform::{char_formula, char_formula_state, CharFormulaError, DEFAULT_CHAR_CAP};
pub use game::{bisim_check, bisim_check_states, GameResult, Play, PlayStep, Position};

/// Depth of a game or colouring; `None` is the unbounded game.
pub type Depth = Option<usize>;

/// World colouring by `∼ⁿ`-class over one model or a juxtaposed pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Colouring {
    /// `None` for `∞`.
    pub level: Depth,
    /// Colour per world; left model first, then right model.
    pub classes: Vec<usize>,
    /// Number of worlds of the left model.
    pub split: usize,
}

impl Colouring {
    pub fn left(&self, w: usize) -> usize {
        self.classes[w]
    }

    pub fn right(&self, w: usize) -> usize {
        self.classes[self.split + w]
    }

    pub fn num_colours(&self) -> usize {
        self.classes.iter().max().map_or(0, |m| m + 1)
    }

    /// Colour set of a left-model state.
    pub fn colours_of(&self, s: InfoState) -> Vec<usize> {
        let mut v: Vec<usize> = s.iter().map(|w| self.classes[w]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Two models side by side over their merged signature.
pub(crate) struct Juxt<'a> {
    pub left: &'a EpistemicModel,
    pub right: Option<&'a EpistemicModel>,
    pub sig: Signature,
    pub n: usize,
    pub split: usize,
    // per world: truth of each merged prop
    pub ptype: Vec<Vec<bool>>,
    // [agent][world] maximal generators, global indices
    pub gens: Vec<Vec<Vec<Vec<usize>>>>,
}

impl<'a> Juxt<'a> {
    pub fn new(left: &'a EpistemicModel, right: Option<&'a EpistemicModel>) -> Juxt<'a> {
        let sig = match right {
            Some(r) => left.sig().merge(r.sig()),
            None => left.sig().clone(),
        };
        let split = left.len();
        let parts: Vec<(&EpistemicModel, usize)> =
            std::iter::once((left, 0)).chain(right.map(|r| (r, split))).collect();
        let n = split + right.map_or(0, |r| r.len());
        let mut ptype = Vec::with_capacity(n);
        for &(m, _) in &parts {
            for w in 0..m.len() {
                ptype.push(sig.props().iter().map(|p| m.valuation(p).contains(w)).collect());
            }
        }
        let gens = sig
            .agents()
            .iter()
            .map(|a| {
                let mut row = Vec::with_capacity(n);
                for &(m, off) in &parts {
                    for w in 0..m.len() {
                        let fam = m.inquisitive_state(a, w);
                        row.push(
                            fam.maximal()
                                .iter()
                                .map(|g| g.iter().map(|x| x + off).collect())
                                .collect(),
                        );
                    }
                }
                row
            })
            .collect();
        Juxt {
            left,
            right,
            sig,
            n,
            split,
            ptype,
            gens,
        }
    }

    pub fn name(&self, g: usize) -> (&'static str, String) {
        if g < self.split {
            ("left", self.left.worlds()[g].clone())
        } else {
            let r = self.right.expect("right model");
            ("right", r.worlds()[g - self.split].clone())
        }
    }

    /// Colourings at levels `0, 1, …, max`; for `max = None`, up to the
    /// first level that equals its successor. The flag reports stabilisation.
    pub fn levels(&self, max: Depth) -> (Vec<Vec<usize>>, bool) {
        let mut out = vec![canon(&self.ptype)];
        let mut stable = false;
        while max.map_or(true, |m| out.len() - 1 < m) {
            let next = self.refine(out.last().unwrap());
            if next == *out.last().unwrap() {
                stable = true;
                if let Some(m) = max {
                    while out.len() - 1 < m {
                        out.push(next.clone());
                    }
                }
                break;
            }
            out.push(next);
        }
        (out, stable)
    }

    /// Maximal colour sets of the generators of `Σ_a(w)`.
    pub fn profile(&self, col: &[usize], a: usize, w: usize) -> Vec<Vec<usize>> {
        let mut sets: Vec<Vec<usize>> = self.gens[a][w]
            .iter()
            .map(|g| {
                let mut c: Vec<usize> = g.iter().map(|&x| col[x]).collect();
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        sets.sort();
        sets.dedup();
        let keep: Vec<bool> = sets
            .iter()
            .map(|s| !sets.iter().any(|t| t != s && is_sub(s, t)))
            .collect();
        sets.into_iter()
            .zip(keep)
            .filter_map(|(s, k)| k.then_some(s))
            .collect()
    }

    fn refine(&self, col: &[usize]) -> Vec<usize> {
        let sigs: Vec<(usize, Vec<Vec<Vec<usize>>>)> = (0..self.n)
            .map(|w| {
                let per_agent = (0..self.sig.agents().len())
                    .map(|a| self.profile(col, a, w))
                    .collect();
                (col[w], per_agent)
            })
            .collect();
        canon(&sigs)
    }
}

/// Sorted-vector subset test.
pub(crate) fn is_sub(s: &[usize], t: &[usize]) -> bool {
    let mut j = 0;
    for x in s {
        while j < t.len() && t[j] < *x {
            j += 1;
        }
        if j == t.len() || t[j] != *x {
            return false;
        }
    }
    true
}

/// Renumber keys by first occurrence.
fn canon<K: std::hash::Hash + Eq + Clone>(keys: &[K]) -> Vec<usize> {
    let mut ids: HashMap<&K, usize> = HashMap::new();
    keys.iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k).or_insert(next)
        })
        .collect()
}

/// `ρ_n` on one model, or on the juxtaposition of two.
pub fn bisim_partition(left: &EpistemicModel, right: Option<&EpistemicModel>, n: Depth) -> Colouring {
    let j = Juxt::new(left, right);
    let (levels, _) = j.levels(n);
    Colouring {
        level: n,
        classes: levels.last().cloned().unwrap_or_default(),
        split: j.split,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn m1_splits_by_atom() {
        let c = bisim_partition(&samples::m1(), None, None);
        assert_ne!(c.left(0), c.left(1));
    }

    #[test]
    fn m0_m1_levels() {
        let (m0, m1) = (samples::m0(), samples::m1());
        let c0 = bisim_partition(&m0, Some(&m1), Some(0));
        assert_eq!(c0.left(0), c0.right(0));
        let c1 = bisim_partition(&m0, Some(&m1), Some(1));
        assert_ne!(c1.left(0), c1.right(0));
        let c = bisim_partition(&m0, Some(&m1), None);
        assert_ne!(c.left(0), c.right(0));
    }

    #[test]
    fn colour_ids_by_first_occurrence() {
        let c = bisim_partition(&samples::m1(), Some(&samples::m1()), None);
        assert_eq!(c.classes, vec![0, 1, 0, 1]);
    }

    #[test]
    fn levels_past_fixpoint() {
        let c = bisim_partition(&samples::m0(), Some(&samples::m1()), Some(7));
        assert_eq!(c.level, Some(7));
        assert_eq!(c.classes.len(), 4);
        assert_ne!(c.left(0), c.right(0));
    }

    #[test]
    fn subset_helper() {
        assert!(is_sub(&[1, 3], &[0, 1, 2, 3]));
        assert!(!is_sub(&[1, 4], &[0, 1, 2, 3]));
        assert!(is_sub(&[], &[]));
    }
}
