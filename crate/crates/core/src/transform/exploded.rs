//! Exploded views: the S5 core `(W, R_a)` plus, for every agent class, a
//! disjoint tagged copy of the class's full local encoding, tied to the core
//! by `RI = {(w, w_a)}`.
//!
//! Element names: core worlds keep their names, copies are `w|a`, states are
//! `{u,v}|a|k` with `k` the index of the class among the `a`-classes.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{cover::dummy_agent_expand, TransformError};
use crate::fo::{rel_e, rel_p, FoFormula, GenericStructure, REL_IN, SORT_S, SORT_W};
use crate::formula::Signature;
use crate::model::{EpistemicModel, InfoState};
use crate::relational::RelationalModel;

/// Largest class for which `℘(class)` is materialised.
pub const DEFAULT_CLASS_CAP: usize = 12;
pub const REL_I: &str = "RI";
/// Name of the distinguished element of a pointed view.
pub const VIEW_POINT: &str = "point";

pub fn rel_r(agent: &str) -> String {
    format!("R[{agent}]")
}

pub fn rel_mark(agent: &str) -> String {
    format!("mark[{agent}]")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViewPoint {
    World(usize),
    State(InfoState),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CopyTag {
    pub element: String,
    pub world: String,
    pub agent: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateTag {
    pub element: String,
    pub state: Vec<String>,
    pub agent: String,
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplodedView {
    pub structure: GenericStructure,
    /// The model actually exploded (the dummy-agent expansion for a state
    /// point).
    pub model: EpistemicModel,
    pub copies: Vec<CopyTag>,
    pub states: Vec<StateTag>,
}

pub fn exploded_view(m: &EpistemicModel, point: Option<ViewPoint>) -> Result<ExplodedView, TransformError> {
    exploded_view_capped(m, point, DEFAULT_CLASS_CAP)
}

pub fn exploded_view_capped(
    m: &EpistemicModel,
    point: Option<ViewPoint>,
    cap: usize,
) -> Result<ExplodedView, TransformError> {
    if !m.is_validated() {
        return Err(TransformError::NotValidated);
    }
    let model = match point {
        Some(ViewPoint::State(s)) => dummy_agent_expand(m, s)?,
        _ => m.clone(),
    };
    let dummy = model.sig().agents().iter().position(|a| !m.sig().has_agent(a));
    let m = &model;
    let sig = m.sig();
    for a in 0..sig.agents().len() {
        if let Some(c) = m.classes(a).into_iter().find(|c| c.len() > cap) {
            return Err(TransformError::Cap { size: c.len(), cap });
        }
    }
    let copy_name = |w: usize, a: &str| format!("{}|{a}", m.worlds()[w]);
    let mut first: Vec<String> = m.worlds().to_vec();
    let mut second = Vec::new();
    let mut copies = Vec::new();
    let mut states = Vec::new();
    let mut rels: BTreeMap<String, (Vec<&str>, Vec<Vec<String>>)> = BTreeMap::new();
    let add = |rels: &mut BTreeMap<String, (Vec<&str>, Vec<Vec<String>>)>, name: String, sorts: Vec<&'static str>, t: Vec<String>| {
        rels.entry(name).or_insert_with(|| (sorts, Vec::new())).1.push(t);
    };
    // declare every relation, even if empty
    for a in sig.agents() {
        rels.insert(rel_r(a), (vec![SORT_W, SORT_W], vec![]));
        rels.insert(rel_mark(a), (vec![SORT_W], vec![]));
        rels.insert(rel_e(a), (vec![SORT_W, SORT_S], vec![]));
    }
    for p in sig.props() {
        rels.insert(rel_p(p), (vec![SORT_W], vec![]));
    }
    rels.insert(REL_I.into(), (vec![SORT_W, SORT_W], vec![]));
    rels.insert(REL_IN.into(), (vec![SORT_W, SORT_S], vec![]));
    let mut point_elem = None;

    for (ai, a) in sig.agents().iter().enumerate() {
        for (k, class) in m.classes(ai).into_iter().enumerate() {
            let w0 = class.first().unwrap();
            let fam = m.sigma_family(ai, w0);
            for u in class.iter() {
                let cu = copy_name(u, a);
                first.push(cu.clone());
                copies.push(CopyTag {
                    element: cu.clone(),
                    world: m.worlds()[u].clone(),
                    agent: a.clone(),
                });
                add(&mut rels, rel_mark(a), vec![SORT_W], vec![cu.clone()]);
                add(&mut rels, REL_I.into(), vec![SORT_W, SORT_W], vec![m.worlds()[u].clone(), cu.clone()]);
                for v in class.iter() {
                    add(&mut rels, rel_r(a), vec![SORT_W, SORT_W], vec![m.worlds()[u].clone(), m.worlds()[v].clone()]);
                }
                for (p, pn) in sig.props().iter().enumerate() {
                    if m.valuation_by_index(p).contains(u) {
                        add(&mut rels, rel_p(pn), vec![SORT_W], vec![cu.clone()]);
                    }
                }
            }
            let mut subs: Vec<InfoState> = class.subsets().collect();
            subs.sort();
            for s in subs {
                let names = m.state_names(s);
                let sn = format!("{{{}}}|{a}|{k}", names.join(","));
                second.push(sn.clone());
                states.push(StateTag {
                    element: sn.clone(),
                    state: names,
                    agent: a.clone(),
                    class: k,
                });
                if dummy == Some(ai) && class == s && matches!(point, Some(ViewPoint::State(p)) if p == s) {
                    point_elem = Some(sn.clone());
                }
                for v in s.iter() {
                    add(&mut rels, REL_IN.into(), vec![SORT_W, SORT_S], vec![copy_name(v, a), sn.clone()]);
                }
                if fam.contains(s) {
                    for u in class.iter() {
                        add(&mut rels, rel_e(a), vec![SORT_W, SORT_S], vec![copy_name(u, a), sn.clone()]);
                    }
                }
            }
        }
    }
    let mut b = GenericStructure::builder().sort(SORT_W, first).sort(SORT_S, second);
    for (name, (sorts, tuples)) in rels {
        b = b.relation(&name, &sorts, tuples);
    }
    match point {
        Some(ViewPoint::World(w)) => b = b.point(VIEW_POINT, &m.worlds()[w]),
        Some(ViewPoint::State(_)) => b = b.point(VIEW_POINT, point_elem.as_deref().expect("dummy class present")),
        None => {}
    }
    let structure = b.build().map_err(|e| TransformError::MalformedView(e.to_string()))?;
    Ok(ExplodedView {
        structure,
        model,
        copies,
        states,
    })
}

fn strip<'a>(name: &'a str, head: &str) -> Option<&'a str> {
    name.strip_prefix(head)?.strip_prefix('[')?.strip_suffix(']')
}

/// Rebuild the locally full encoding from the relations of a view alone:
/// worlds are the unmarked first-sort elements, `Σ_a(w)` pulls `E[a]` of
/// the `a`-copy of `w` back through `RI` and `in`.
pub fn recover_from_exploded(x: &GenericStructure) -> Result<RelationalModel, TransformError> {
    let bad = |m: &str| TransformError::MalformedView(m.to_string());
    let sw = x.sort_index(SORT_W).ok_or_else(|| bad("no sort W"))?;
    let ss = x.sort_index(SORT_S).ok_or_else(|| bad("no sort S"))?;
    let ri = x.relation(REL_I).ok_or_else(|| bad("no RI"))?;
    let inr = x.relation(REL_IN).ok_or_else(|| bad("no in"))?;
    let agents: Vec<String> = x.relations().iter().filter_map(|r| strip(&r.name, "mark")).map(String::from).collect();
    let props: Vec<String> = x.relations().iter().filter_map(|r| strip(&r.name, "P")).map(String::from).collect();
    let sig = Signature::new(agents.clone(), props.clone());
    let marked = |e: usize| agents.iter().any(|a| x.relation(&rel_mark(a)).unwrap().holds(&[e]));
    let core: Vec<usize> = x.sort_range(sw).filter(|&e| !marked(e)).collect();
    if core.len() > crate::model::MAX_WORLDS {
        return Err(bad("too many worlds"));
    }
    let mut pos = vec![usize::MAX; x.size()];
    for (i, &e) in core.iter().enumerate() {
        pos[e] = i;
    }
    let copies_of = |w: usize| -> Vec<usize> { x.sort_range(sw).filter(|&c| ri.holds(&[w, c])).collect() };
    let copies: Vec<Vec<usize>> = core.iter().map(|&w| copies_of(w)).collect();
    let pull = |t: usize| -> InfoState {
        InfoState::from_worlds(
            core.iter()
                .enumerate()
                .filter(|(i, _)| copies[*i].iter().any(|&c| inr.holds(&[c, t])))
                .map(|(i, _)| i),
        )
    };
    let pulled: Vec<InfoState> = x.sort_range(ss).map(pull).collect();
    let mut states = pulled.clone();
    states.sort();
    states.dedup();
    let idx = |s: InfoState| states.binary_search(&s).unwrap();
    let mut e = Vec::new();
    for a in sig.agents() {
        let mark = x.relation(&rel_mark(a)).unwrap();
        let er = x.relation(&rel_e(a)).ok_or_else(|| bad("missing E relation"))?;
        let mut row = Vec::new();
        for (i, &w) in core.iter().enumerate() {
            let mine: Vec<usize> = copies[i].iter().copied().filter(|&c| mark.holds(&[c])).collect();
            let [c] = mine[..] else {
                return Err(bad(&format!("{} has {} copies for agent {a}", x.name(w), mine.len())));
            };
            let mut ix: Vec<usize> = x
                .sort_range(ss)
                .filter(|&t| er.holds(&[c, t]))
                .map(|t| idx(pulled[t - x.sort_range(ss).start]))
                .collect();
            ix.sort_unstable();
            ix.dedup();
            row.push(ix);
        }
        e.push(row);
    }
    let val = sig
        .props()
        .iter()
        .map(|p| {
            let r = x.relation(&rel_p(p)).unwrap();
            InfoState::from_worlds((0..core.len()).filter(|&i| copies[i].iter().any(|&c| r.holds(&[c]))))
        })
        .collect();
    Ok(RelationalModel {
        sig,
        worlds: core.iter().map(|&w| x.name(w).to_string()).collect(),
        states,
        e,
        val,
    })
}

/// `v ∈ X ∧ X ∈ Σ_a(w)` expressed in the view: free element variables `v`,
/// `w` (core) and a set variable `X` over the first sort.
pub fn pullback_formula(agent: &str) -> FoFormula {
    let core = |y: &str| FoFormula::exists("c0", SORT_W, FoFormula::rel(REL_I, &[y, "c0"]));
    let pulled = FoFormula::forall(
        "y",
        SORT_W,
        FoFormula::implies(
            core("y"),
            FoFormula::iff(
                FoFormula::mem("y", "X"),
                FoFormula::exists(
                    "c1",
                    SORT_W,
                    FoFormula::and([FoFormula::rel(REL_I, &["y", "c1"]), FoFormula::rel(REL_IN, &["c1", "t"])]),
                ),
            ),
        ),
    );
    let via_copy = FoFormula::exists(
        "c",
        SORT_W,
        FoFormula::and([
            FoFormula::rel(REL_I, &["w", "c"]),
            FoFormula::rel(&rel_mark(agent), &["c"]),
            FoFormula::rel(&rel_e(agent), &["c", "t"]),
        ]),
    );
    FoFormula::and([
        FoFormula::mem("v", "X"),
        FoFormula::exists("t", SORT_S, FoFormula::and([via_copy, pulled])),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fo::{eval_fo, Env, Value};
    use crate::relational::{encode, EncodingFlavor};
    use crate::samples;
    use crate::transform::disjoint_union;

    #[test]
    fn m1_layout() {
        let m1 = samples::m1();
        let x = exploded_view(&m1, None).unwrap().structure;
        let w = x.sort_index("W").unwrap();
        assert_eq!(x.sort_size(w), 4);
        assert_eq!(x.sort_size(x.sort_index("S").unwrap()), 4);
        assert_eq!(x.relation("RI").unwrap().tuples().len(), 2);
        let r = recover_from_exploded(&x).unwrap();
        assert_eq!(r, encode(&m1, EncodingFlavor::LocallyFull, None).unwrap());
    }

    #[test]
    fn state_point() {
        let m1 = samples::m1();
        let v = exploded_view(&m1, Some(ViewPoint::State(m1.all()))).unwrap();
        let x = &v.structure;
        assert_eq!(x.name(x.point(VIEW_POINT).unwrap()), "{u,v}|dummy|0");
        assert_eq!(
            recover_from_exploded(x).unwrap(),
            encode(&v.model, EncodingFlavor::LocallyFull, None).unwrap()
        );
        // u sits in an a-class and a dummy class: two copies
        assert_eq!(x.relation("RI").unwrap().tuples().iter().filter(|t| t[0] == 0).count(), 2);
    }

    #[test]
    fn union_compatible() {
        let (m0, m1) = (samples::m0(), samples::m1());
        let u = disjoint_union(&m1, &m0).unwrap();
        let lhs = exploded_view(&u, None).unwrap().structure;
        let rhs = exploded_view(&m1, None)
            .unwrap()
            .structure
            .disjoint_union(&exploded_view(&m0, None).unwrap().structure, "~");
        assert!(lhs.is_isomorphic(&rhs));
        let lone = exploded_view(&m1, None).unwrap().structure;
        assert!(!lhs.is_isomorphic(&lone));
    }

    #[test]
    fn pullback_exact() {
        for m in [samples::m0(), samples::m1()] {
            let x = exploded_view(&m, None).unwrap().structure;
            let sw = x.sort_index("W").unwrap();
            let f = pullback_formula("a");
            for s in m.all().subsets() {
                for v in 0..m.len() {
                    for w in 0..m.len() {
                        let env: Env = [
                            ("v".to_string(), Value::Elem(v)),
                            ("w".to_string(), Value::Elem(w)),
                            ("X".to_string(), Value::Set(sw, s.0)),
                        ]
                        .into_iter()
                        .collect();
                        let want = s.contains(v) && m.sigma_family(0, w).contains(s);
                        assert_eq!(eval_fo(&x, &f, &env).unwrap(), want);
                    }
                }
            }
        }
    }
}
