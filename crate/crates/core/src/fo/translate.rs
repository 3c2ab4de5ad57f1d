//! Standard translation of InqML into two-sorted first-order logic.
//!
//! Vocabulary: sorts `W` (worlds) and `S` (states); `in(x,s)` for
//! membership, `E[a](x,s)` for `s ∈ Σ_a(x)`, unary `P[p](x)` for the
//! valuation. The □ clause defines `σ_a(x)` as the union of `E[a](x,·)`,
//! so it is only faithful over encodings that contain every σ_a(x) — in
//! particular over locally full ones.

use super::formula::FoFormula;
use crate::formula::Formula;

pub const SORT_W: &str = "W";
pub const SORT_S: &str = "S";
pub const REL_IN: &str = "in";

pub fn rel_e(agent: &str) -> String {
    format!("E[{agent}]")
}

pub fn rel_p(prop: &str) -> String {
    format!("P[{prop}]")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    World,
    State,
}

/// Hook consulted before each subformula; returning `Some` replaces that
/// subformula's translation at the given variable.
pub type LeafHook<'a> = &'a dyn Fn(&Formula, Target, &str) -> Option<FoFormula>;

struct Tr<'a> {
    next: usize,
    hook: Option<LeafHook<'a>>,
}

impl Tr<'_> {
    fn fresh(&mut self, stem: char) -> String {
        self.next += 1;
        format!("{stem}_{}", self.next)
    }

    // ∀y(in(y,t) ↔ ∃u(E[a](x,u) ∧ in(y,u)))
    fn sigma_def(&mut self, a: &str, x: &str, t: &str) -> FoFormula {
        let y = self.fresh('x');
        let u = self.fresh('t');
        FoFormula::forall(
            &y,
            SORT_W,
            FoFormula::iff(
                FoFormula::rel(REL_IN, &[&y, t]),
                FoFormula::exists(
                    &u,
                    SORT_S,
                    FoFormula::and([
                        FoFormula::rel(&rel_e(a), &[x, &u]),
                        FoFormula::rel(REL_IN, &[&y, &u]),
                    ]),
                ),
            ),
        )
    }

    fn modal_at_world(&mut self, f: &Formula, w: &str) -> FoFormula {
        let t = self.fresh('t');
        match f {
            Formula::Box(a, g) => {
                let def = self.sigma_def(a, w, &t);
                let body = self.state(g, &t);
                FoFormula::exists(&t, SORT_S, FoFormula::and([def, body]))
            }
            Formula::WBox(a, g) => {
                let body = self.state(g, &t);
                FoFormula::forall(
                    &t,
                    SORT_S,
                    FoFormula::implies(FoFormula::rel(&rel_e(a), &[w, &t]), body),
                )
            }
            _ => unreachable!(),
        }
    }

    fn state(&mut self, f: &Formula, s: &str) -> FoFormula {
        if let Some(h) = self.hook {
            if let Some(r) = h(f, Target::State, s) {
                return r;
            }
        }
        match f {
            Formula::Atom(p) => {
                let x = self.fresh('x');
                FoFormula::forall(
                    &x,
                    SORT_W,
                    FoFormula::implies(
                        FoFormula::rel(REL_IN, &[&x, s]),
                        FoFormula::rel(&rel_p(p), &[&x]),
                    ),
                )
            }
            Formula::Bottom => {
                let x = self.fresh('x');
                FoFormula::not(FoFormula::exists(&x, SORT_W, FoFormula::rel(REL_IN, &[&x, s])))
            }
            Formula::And(a, b) => FoFormula::and([self.state(a, s), self.state(b, s)]),
            Formula::IDisj(a, b) => FoFormula::or([self.state(a, s), self.state(b, s)]),
            Formula::Implies(a, b) => {
                let t = self.fresh('t');
                let y = self.fresh('x');
                let sub = FoFormula::forall(
                    &y,
                    SORT_W,
                    FoFormula::implies(
                        FoFormula::rel(REL_IN, &[&y, &t]),
                        FoFormula::rel(REL_IN, &[&y, s]),
                    ),
                );
                let (fa, fb) = (self.state(a, &t), self.state(b, &t));
                FoFormula::forall(&t, SORT_S, FoFormula::implies(sub, FoFormula::implies(fa, fb)))
            }
            Formula::Box(..) | Formula::WBox(..) => {
                let x = self.fresh('x');
                let body = self.modal_at_world(f, &x);
                FoFormula::forall(
                    &x,
                    SORT_W,
                    FoFormula::implies(FoFormula::rel(REL_IN, &[&x, s]), body),
                )
            }
            _ => self.state(&f.desugar(), s),
        }
    }

    fn world(&mut self, f: &Formula, w: &str) -> FoFormula {
        if let Some(h) = self.hook {
            if let Some(r) = h(f, Target::World, w) {
                return r;
            }
        }
        match f {
            Formula::Atom(p) => FoFormula::rel(&rel_p(p), &[w]),
            Formula::Bottom => FoFormula::False,
            Formula::And(a, b) => FoFormula::and([self.world(a, w), self.world(b, w)]),
            Formula::IDisj(a, b) => FoFormula::or([self.world(a, w), self.world(b, w)]),
            Formula::Implies(a, b) => FoFormula::implies(self.world(a, w), self.world(b, w)),
            Formula::Box(..) | Formula::WBox(..) => self.modal_at_world(f, w),
            _ => self.world(&f.desugar(), w),
        }
    }
}

/// `φ*` with free variable `var` of sort `W` (world target) or `S` (state
/// target). Bound variables are named `x_<n>` / `t_<n>`; `var` must not
/// clash with those.
pub fn standard_translation(f: &Formula, target: Target, var: &str) -> FoFormula {
    translate_with(f, target, var, None)
}

pub fn translate_with(f: &Formula, target: Target, var: &str, hook: Option<LeafHook>) -> FoFormula {
    let mut tr = Tr { next: 0, hook };
    match target {
        Target::World => tr.world(f, var),
        Target::State => tr.state(f, var),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fo::parse_fo;

    #[test]
    fn base_clauses() {
        let p = standard_translation(&Formula::atom("p"), Target::State, "s");
        assert_eq!(p, parse_fo("(forall x_1 W (implies (in x_1 s) (P[p] x_1)))").unwrap());
        let bot = standard_translation(&Formula::Bottom, Target::State, "s");
        assert_eq!(bot, parse_fo("(not (exists x_1 W (in x_1 s)))").unwrap());
        assert_eq!(
            standard_translation(&Formula::atom("p"), Target::World, "w"),
            parse_fo("(P[p] w)").unwrap()
        );
    }

    #[test]
    fn ranks() {
        let f = Formula::boxed("a", Formula::question(Formula::atom("p")));
        let t = standard_translation(&f, Target::World, "w");
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec!["w".to_string()]);
        assert!(t.quantifier_rank() >= 3);
    }
}
