//! Characteristic formulas `χⁿ` for worlds and states.
//!
//! Types below are `∼ᵏ`-classes of the source model. For a set `T` of
//! `k`-types, `χ_T` is the classical disjunction of the member formulas; a
//! state supports it iff all its worlds have a type in `T`. Then
//!
//! ```text
//! χ⁰_w   = ⋀ literals of w
//! χᵏ⁺¹_w = χ⁰_w ∧ ⋀_a ( [+a] ⩾_{g} χᵏ_{ρ(g)}  ∧  ⋀_{g ≠ ∅} ¬[+a](χᵏ_{ρ(g)} → ψᵏ_{ρ(g)}) )
//! ψ_T    = ⩾_{c ∈ T} χ_{T∖{c}}
//! ```
//!
//! with `g` ranging over maximal generators of `Σ_a(w)`. The first conjunct
//! bounds the types of every member of `Σ_a`, the second demands a member
//! realising exactly `ρ(g)`.

use std::collections::HashMap;

use thiserror::Error;

use super::Juxt;
use crate::formula::{Formula, Signature};
use crate::model::{EpistemicModel, InfoState};

pub const DEFAULT_CHAR_CAP: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharFormulaError {
    #[error("characteristic formula exceeds {0} nodes")]
    TooLarge(usize),
}

struct Builder<'a> {
    m: &'a EpistemicModel,
    sig: &'a Signature,
    levels: Vec<Vec<usize>>,
    worlds: HashMap<(usize, usize), Formula>,
    cap: usize,
}

impl Builder<'_> {
    fn literals(&self, w: usize) -> Formula {
        Formula::conjunction(self.sig.props().iter().map(|p| {
            let a = Formula::atom(p.clone());
            if self.m.valuation(p).contains(w) {
                a
            } else {
                Formula::neg(a)
            }
        }))
    }

    fn check(&self, f: &Formula) -> Result<(), CharFormulaError> {
        if f.size() > self.cap {
            Err(CharFormulaError::TooLarge(self.cap))
        } else {
            Ok(())
        }
    }

    fn world(&mut self, w: usize, k: usize) -> Result<Formula, CharFormulaError> {
        let key = (k, self.levels[k][w]);
        if let Some(f) = self.worlds.get(&key) {
            return Ok(f.clone());
        }
        let mut parts = vec![self.literals(w)];
        if k > 0 {
            for a in self.sig.agents() {
                let fam = self.m.inquisitive_state(a, w);
                let mut types: Vec<Vec<usize>> = fam
                    .maximal()
                    .iter()
                    .map(|&g| self.type_set(g, k - 1))
                    .collect();
                types.sort();
                types.dedup();
                let mut alts = Vec::new();
                for t in &types {
                    alts.push(self.state_of_types(t, k - 1)?);
                }
                parts.push(Formula::wbox(a.clone(), Formula::inquisitive_disjunction(alts)));
                for t in types.iter().filter(|t| !t.is_empty()) {
                    let chi = self.state_of_types(t, k - 1)?;
                    let mut psi = Vec::new();
                    for i in 0..t.len() {
                        let mut rest = t.clone();
                        rest.remove(i);
                        psi.push(self.state_of_types(&rest, k - 1)?);
                    }
                    let body = Formula::implies(chi, Formula::inquisitive_disjunction(psi));
                    parts.push(Formula::neg(Formula::wbox(a.clone(), body)));
                }
            }
        }
        let f = Formula::conjunction(parts);
        self.check(&f)?;
        self.worlds.insert(key, f.clone());
        Ok(f)
    }

    // representative worlds of the k-types in s, sorted by colour
    fn type_set(&self, s: InfoState, k: usize) -> Vec<usize> {
        let col = &self.levels[k];
        let mut reps: Vec<usize> = Vec::new();
        for w in s.iter() {
            if !reps.iter().any(|&r| col[r] == col[w]) {
                reps.push(w);
            }
        }
        reps.sort_by_key(|&r| col[r]);
        reps
    }

    fn state_of_types(&mut self, reps: &[usize], k: usize) -> Result<Formula, CharFormulaError> {
        let mut parts = Vec::with_capacity(reps.len());
        for &r in reps {
            parts.push(self.world(r, k)?);
        }
        let f = Formula::classical_disjunction(parts);
        self.check(&f)?;
        Ok(f)
    }
}

fn builder<'a>(m: &'a EpistemicModel, sig: &'a Signature, n: usize, cap: usize) -> Builder<'a> {
    let j = Juxt::new(m, None);
    let (mut levels, _) = j.levels(Some(n));
    while levels.len() <= n {
        let last = levels.last().unwrap().clone();
        levels.push(last);
    }
    Builder {
        m,
        sig,
        levels,
        worlds: HashMap::new(),
        cap,
    }
}

/// `χⁿ_{M,w}` over `sig` (normally `M`'s own signature, or a superset of it
/// when comparing with another model).
pub fn char_formula(
    m: &EpistemicModel,
    sig: &Signature,
    w: usize,
    n: usize,
    cap: usize,
) -> Result<Formula, CharFormulaError> {
    builder(m, sig, n, cap).world(w, n)
}

/// `χⁿ_{M,s}`: supported at `s'` iff `s' ∼ⁿ t` for some `t ⊆ s`.
pub fn char_formula_state(
    m: &EpistemicModel,
    sig: &Signature,
    s: InfoState,
    n: usize,
    cap: usize,
) -> Result<Formula, CharFormulaError> {
    let mut b = builder(m, sig, n, cap);
    let reps = b.type_set(s, n);
    b.state_of_types(&reps, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::{bisim_check, bisim_check_states};
    use crate::model::{supports, truth};
    use crate::samples;

    #[test]
    fn base_case_is_literals() {
        let m = samples::m1();
        let f = char_formula(&m, m.sig(), 0, 0, DEFAULT_CHAR_CAP).unwrap();
        assert_eq!(f, Formula::atom("p"));
        let f = char_formula(&m, m.sig(), 1, 0, DEFAULT_CHAR_CAP).unwrap();
        assert_eq!(f, Formula::neg(Formula::atom("p")));
        let empty = Signature::new(["a"], Vec::<String>::new());
        assert_eq!(char_formula(&m, &empty, 0, 0, DEFAULT_CHAR_CAP).unwrap(), Formula::top());
    }

    #[test]
    fn contract_on_m0_m1() {
        let (m0, m1) = (samples::m0(), samples::m1());
        let sig = m0.sig().clone();
        let chi = char_formula(&m1, &sig, 0, 1, DEFAULT_CHAR_CAP).unwrap();
        assert!(!truth(&m0, 0, &chi));
        assert!(chi.modal_depth() <= 1);
        for (a, b) in [(&m0, &m1), (&m1, &m0), (&m0, &m0), (&m1, &m1)] {
            for n in 0..3 {
                for w in 0..2 {
                    let chi = char_formula(a, &sig, w, n, DEFAULT_CHAR_CAP).unwrap();
                    for w2 in 0..2 {
                        assert_eq!(truth(b, w2, &chi), bisim_check(a, w, b, w2, Some(n)).bisimilar);
                    }
                    for s in b.all().subsets() {
                        let chs = char_formula_state(a, &sig, InfoState::from_worlds([w]), n, DEFAULT_CHAR_CAP).unwrap();
                        let want = InfoState::from_worlds([w]).subsets().any(|t| {
                            bisim_check_states(a, t, b, s, Some(n)).bisimilar
                        });
                        assert_eq!(supports(b, s, &chs), want);
                    }
                }
            }
        }
    }

    #[test]
    fn cap() {
        let m = samples::m1();
        assert_eq!(
            char_formula(&m, m.sig(), 0, 2, 3),
            Err(CharFormulaError::TooLarge(3))
        );
    }
}
