//! Support and truth.
//!
//! [`supports`] follows the recursive clauses literally and is the reference
//! evaluator. [`SupportTable`] computes support at every state of a small
//! model at once and is what the bulk sweeps use; the two are cross-checked
//! in tests.

use super::{DownwardFamily, EpistemicModel, InfoState, KripkeFrame, ModelError};
use crate::formula::Formula;

/// Default limit on `|W|` for operations that enumerate `℘(W)`.
pub const DEFAULT_SUPPORT_CAP: usize = 24;

/// `M, s ⊨ φ`. Sugar is expanded on the fly.
pub fn supports(m: &EpistemicModel, s: InfoState, f: &Formula) -> bool {
    if f.is_core() {
        sup(m, s, f)
    } else {
        sup(m, s, &f.desugar())
    }
}

/// `M, w ⊨ φ`, i.e. support at `{w}`.
pub fn truth(m: &EpistemicModel, w: usize, f: &Formula) -> bool {
    supports(m, InfoState::singleton(w), f)
}

fn sup(m: &EpistemicModel, s: InfoState, f: &Formula) -> bool {
    match f {
        Formula::Atom(p) => s.is_subset(m.valuation(p)),
        Formula::Bottom => s.is_empty(),
        Formula::And(a, b) => sup(m, s, a) && sup(m, s, b),
        Formula::IDisj(a, b) => sup(m, s, a) || sup(m, s, b),
        Formula::Implies(a, b) => s.subsets().all(|t| !sup(m, t, a) || sup(m, t, b)),
        Formula::Box(ag, a) => s.iter().all(|w| sup(m, m.sigma_by_name(ag, w), a)),
        Formula::WBox(ag, a) => s.iter().all(|w| {
            m.inquisitive_state(ag, w)
                .members()
                .into_iter()
                .all(|t| sup(m, t, a))
        }),
        Formula::Not(_) | Formula::Or(..) | Formula::Question(_) => sup(m, s, &f.desugar()),
    }
}

/// Support of one formula at every state of a model with at most `cap`
/// worlds, indexed by state bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportTable {
    n: usize,
    table: Vec<bool>,
}

impl SupportTable {
    pub fn build(m: &EpistemicModel, f: &Formula, cap: usize) -> Result<SupportTable, ModelError> {
        let n = m.len();
        if n > cap || n > 30 {
            return Err(ModelError::TooManyWorlds(n, cap.min(30)));
        }
        let f = if f.is_core() { f.clone() } else { f.desugar() };
        Ok(SupportTable {
            n,
            table: table(m, &f),
        })
    }

    pub fn get(&self, s: InfoState) -> bool {
        self.table[s.bits() as usize]
    }

    pub fn holds_at(&self, w: usize) -> bool {
        self.table[1 << w]
    }

    /// Raw vector indexed by state bitmask.
    pub fn as_slice(&self) -> &[bool] {
        &self.table
    }

    /// The supporting states, by their maximal elements.
    pub fn support_set(&self) -> DownwardFamily {
        // A state is maximal iff it is supported and no one-world extension is.
        let full = (1usize << self.n) - 1;
        let maximal = (0..=full).filter(|&s| {
            self.table[s]
                && (0..self.n).all(|w| s >> w & 1 == 1 || !self.table[s | 1 << w])
        });
        DownwardFamily::from_generators(maximal.map(|s| InfoState(s as u128)))
    }
}

fn table(m: &EpistemicModel, f: &Formula) -> Vec<bool> {
    let n = m.len();
    let size = 1usize << n;
    match f {
        Formula::Atom(p) => {
            let v = m.valuation(p).bits() as usize;
            (0..size).map(|s| s & !v == 0).collect()
        }
        Formula::Bottom => (0..size).map(|s| s == 0).collect(),
        Formula::And(a, b) => zip(table(m, a), table(m, b), |x, y| x && y),
        Formula::IDisj(a, b) => zip(table(m, a), table(m, b), |x, y| x || y),
        Formula::Implies(a, b) => {
            // s fails iff some t ⊆ s supports a but not b: superset closure.
            let mut bad = zip(table(m, a), table(m, b), |x, y| x && !y);
            for i in 0..n {
                let bit = 1usize << i;
                for s in 0..size {
                    if s & bit != 0 && bad[s ^ bit] {
                        bad[s] = true;
                    }
                }
            }
            bad.into_iter().map(|x| !x).collect()
        }
        Formula::Box(ag, a) => {
            let t = table(m, a);
            let good = (0..n)
                .filter(|&w| t[m.sigma_by_name(ag, w).bits() as usize])
                .fold(0usize, |g, w| g | 1 << w);
            (0..size).map(|s| s & !good == 0).collect()
        }
        Formula::WBox(ag, a) => {
            // support is downward closed, so generators suffice
            let t = table(m, a);
            let good = (0..n)
                .filter(|&w| {
                    m.inquisitive_state(ag, w)
                        .maximal()
                        .iter()
                        .all(|g| t[g.bits() as usize])
                })
                .fold(0usize, |g, w| g | 1 << w);
            (0..size).map(|s| s & !good == 0).collect()
        }
        Formula::Not(_) | Formula::Or(..) | Formula::Question(_) => table(m, &f.desugar()),
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// `[φ]_M` by its maximal elements.
pub fn support_set(
    m: &EpistemicModel,
    f: &Formula,
    cap: usize,
) -> Result<DownwardFamily, ModelError> {
    Ok(SupportTable::build(m, f, cap)?.support_set())
}

/// Does `s ⊨ φ ⟺ ∀w∈s: w ⊨ φ` hold for every state of this one model?
pub fn semantically_truth_conditional(
    m: &EpistemicModel,
    f: &Formula,
    cap: usize,
) -> Result<bool, ModelError> {
    let t = SupportTable::build(m, f, cap)?;
    let good = (0..m.len())
        .filter(|&w| t.holds_at(w))
        .fold(0usize, |g, w| g | 1 << w);
    Ok(t.as_slice()
        .iter()
        .enumerate()
        .all(|(s, &v)| v == (s & !good == 0)))
}

/// Classical Kripke evaluation over the companion frame. `None` if the
/// formula uses `\/` or `[+a]`.
pub fn kripke_truth(
    m: &EpistemicModel,
    frame: &KripkeFrame,
    w: usize,
    f: &Formula,
) -> Option<bool> {
    Some(match f {
        Formula::Atom(p) => m.valuation(p).contains(w),
        Formula::Bottom => false,
        Formula::And(a, b) => kripke_truth(m, frame, w, a)? & kripke_truth(m, frame, w, b)?,
        Formula::Implies(a, b) => !kripke_truth(m, frame, w, a)? | kripke_truth(m, frame, w, b)?,
        Formula::Not(a) => !kripke_truth(m, frame, w, a)?,
        Formula::Or(a, b) => kripke_truth(m, frame, w, a)? | kripke_truth(m, frame, w, b)?,
        Formula::Box(ag, a) => {
            let class = match frame.agents.iter().position(|x| x == ag) {
                Some(i) => frame.class_of(i, w),
                None => InfoState::singleton(w),
            };
            let mut all = true;
            for v in class.iter() {
                all &= kripke_truth(m, frame, v, a)?;
            }
            all
        }
        Formula::IDisj(..) | Formula::WBox(..) | Formula::Question(_) => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::samples;

    #[test]
    fn m1_examples() {
        let m = samples::m1();
        let sig = m.sig().clone();
        let f = |t: &str| parse(t, &sig).unwrap();
        let uv = InfoState::from_worlds([0, 1]);
        let u = InfoState::singleton(0);
        assert!(!supports(&m, uv, &f("?p")));
        assert!(supports(&m, u, &f("?p")));
        assert!(supports(&m, u, &f("[+a]?p")));
        assert!(!supports(&m, u, &f("[a]?p")));
        assert!(truth(&m, 0, &f("p")));
        assert!(!truth(&m, 0, &f("[a]?p")));
        assert!(truth(&m, 0, &f("[+a]?p")));
    }

    #[test]
    fn support_sets() {
        let m = samples::m1();
        let sig = m.sig().clone();
        let ss = |t: &str| support_set(&m, &parse(t, &sig).unwrap(), 24).unwrap();
        assert_eq!(ss("p").maximal(), &[InfoState::singleton(0)]);
        assert_eq!(
            ss("?p").maximal(),
            &[InfoState::singleton(0), InfoState::singleton(1)]
        );
        assert_eq!(ss("bot").maximal(), &[InfoState::EMPTY]);
    }

    #[test]
    fn truth_conditionality_examples() {
        let m = samples::m1();
        let sig = m.sig().clone();
        let tc = |t: &str| semantically_truth_conditional(&m, &parse(t, &sig).unwrap(), 24).unwrap();
        assert!(tc("[a]?p"));
        assert!(!tc("?p"));
        assert!(tc("p"));
    }

    #[test]
    fn table_agrees_with_direct_evaluation() {
        use crate::formula::{enumerate_formulas, Signature};
        let sig = Signature::new(["a"], ["p"]);
        let fs = enumerate_formulas(&sig, 2, 6, 1_000_000).unwrap();
        for m in [samples::m0(), samples::m1()] {
            for f in &fs {
                let t = SupportTable::build(&m, f, 24).unwrap();
                for s in m.all().subsets() {
                    assert_eq!(t.get(s), supports(&m, s, f), "{f} at {s:?}");
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let m = samples::m1();
        assert!(matches!(
            support_set(&m, &Formula::Bottom, 1),
            Err(ModelError::TooManyWorlds(2, 1))
        ));
    }
}
