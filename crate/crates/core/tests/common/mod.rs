//! Shared fixtures: the seeded test corpus and a formula-class sweep.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use inqkit::corpus::{corpus, CorpusParams};
use inqkit::fo::{eval_fo, standard_translation, translate_with, Compiled, Env, FoFormula, GenericStructure, Target, Value, VarKind};
use inqkit::formula::{enumerate_formulas, Formula, DEFAULT_ENUMERATION_CAP};
use inqkit::model::{EpistemicModel, InfoState, SupportTable};
use inqkit::relational::{encode, EncodingFlavor};

pub const CORPUS_SEED: u64 = 20_240_611;
pub const CORPUS_SIZE: usize = 40;

pub fn test_corpus() -> Vec<EpistemicModel> {
    corpus(CORPUS_SEED, CORPUS_SIZE, &CorpusParams::default())
}

/// Everything the sweep needs to know about one formula on one model:
/// FO extensions of both translations over the locally full encoding, the
/// support table, and whether the formula is syntactically truth-conditional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key {
    pub tc: bool,
    /// Bit `i`: state translation holds at the `i`-th `S` element.
    pub st: u64,
    /// Bit `w`: world translation holds at world `w`.
    pub wd: u64,
    /// Bit `s`: `M, s ⊨ φ` for the state with mask `s`.
    pub table: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    And,
    Implies,
    IDisj,
    Box(usize),
    WBox(usize),
}

pub struct Sweep<'m> {
    m: &'m EpistemicModel,
    a: GenericStructure,
    /// Masks of the `S` elements, in order.
    pub states: Vec<InfoState>,
    s_lo: usize,
    w_lo: usize,
    rel_x: [usize; 2],
    rel_y: [usize; 2],
    templates: HashMap<(Op, Target), Compiled>,
    memo: HashMap<(Op, Target, u64, u64), u64>,
    /// Per agent and world: `σ_a(w)` and the maximal members of `Σ_a(w)`.
    sigma: Vec<Vec<(usize, Vec<usize>)>>,
}

const PH: [&str; 2] = ["#0", "#1"];

fn var(t: Target) -> &'static str {
    match t {
        Target::World => "x",
        Target::State => "s",
    }
}

impl<'m> Sweep<'m> {
    pub fn new(m: &'m EpistemicModel) -> Sweep<'m> {
        assert!(m.len() <= 6, "tables are 64-bit");
        let r = encode(m, EncodingFlavor::LocallyFull, None).unwrap();
        let base = r.to_structure();
        let (ws, ss) = (base.sort_index("W").unwrap(), base.sort_index("S").unwrap());
        let a = base
            .with_unary("X0", ss, [])
            .with_unary("X1", ss, [])
            .with_unary("Y0", ws, [])
            .with_unary("Y1", ws, []);
        let idx = |a: &GenericStructure, n: &str| a.relation_index(n).unwrap();
        let rel_x = [idx(&a, "X0"), idx(&a, "X1")];
        let rel_y = [idx(&a, "Y0"), idx(&a, "Y1")];
        let nag = m.sig().agents().len();
        let mut ops = vec![Op::And, Op::Implies, Op::IDisj];
        for g in 0..nag {
            ops.push(Op::Box(g));
            ops.push(Op::WBox(g));
        }
        let mut templates = HashMap::new();
        for &op in &ops {
            let p = |i: usize| Formula::atom(PH[i]);
            let f = match op {
                Op::And => Formula::and(p(0), p(1)),
                Op::Implies => Formula::implies(p(0), p(1)),
                Op::IDisj => Formula::idisj(p(0), p(1)),
                Op::Box(g) => Formula::boxed(m.sig().agents()[g].clone(), p(0)),
                Op::WBox(g) => Formula::wbox(m.sig().agents()[g].clone(), p(0)),
            };
            for t in [Target::World, Target::State] {
                let hook = |g: &Formula, tt: Target, v: &str| -> Option<FoFormula> {
                    let Formula::Atom(n) = g else { return None };
                    let i = PH.iter().position(|x| x == n)?;
                    let rel = match tt {
                        Target::State => ["X0", "X1"][i],
                        Target::World => ["Y0", "Y1"][i],
                    };
                    Some(FoFormula::rel(rel, &[v]))
                };
                let fo = translate_with(&f, t, var(t), Some(&hook));
                let sort = if t == Target::World { ws } else { ss };
                let c = Compiled::new(&a, &fo, &[(var(t), VarKind::Elem(sort))], 64).unwrap();
                templates.insert((op, t), c);
            }
        }
        let sigma = (0..nag)
            .map(|g| {
                (0..m.len())
                    .map(|w| {
                        let fam = m.sigma_family(g, w);
                        (m.sigma(g, w).0 as usize, fam.maximal().iter().map(|s| s.0 as usize).collect())
                    })
                    .collect()
            })
            .collect();
        Sweep {
            m,
            states: r.states.clone(),
            s_lo: a.sort_range(ss).start,
            w_lo: a.sort_range(ws).start,
            a,
            rel_x,
            rel_y,
            templates,
            memo: HashMap::new(),
            sigma,
        }
    }

    fn ext(&self, mask: u64, lo: usize) -> Vec<bool> {
        (0..self.a.size())
            .map(|e| e >= lo && e - lo < 64 && mask >> (e - lo) & 1 == 1)
            .collect()
    }

    fn fo(&mut self, op: Op, t: Target, x: u64, y: u64) -> u64 {
        if let Some(&v) = self.memo.get(&(op, t, x, y)) {
            return v;
        }
        // state templates read X*, world templates read Y* (binary) or X0 (modal)
        let modal = matches!(op, Op::Box(_) | Op::WBox(_));
        let (r, lo) = if t == Target::State || modal {
            (self.rel_x, self.s_lo)
        } else {
            (self.rel_y, self.w_lo)
        };
        let (e0, e1) = (self.ext(x, lo), self.ext(y, lo));
        self.a.set_unary(r[0], &e0);
        self.a.set_unary(r[1], &e1);
        let range = match t {
            Target::State => self.s_lo..self.s_lo + self.states.len(),
            Target::World => self.w_lo..self.w_lo + self.m.len(),
        };
        let c = &self.templates[&(op, t)];
        let mut out = 0u64;
        for (i, e) in range.enumerate() {
            if c.eval(&self.a, &[e as u128]) {
                out |= 1 << i;
            }
        }
        self.memo.insert((op, t, x, y), out);
        out
    }

    fn nstates(&self) -> usize {
        1 << self.m.len()
    }

    fn table_op(&self, op: Op, a: u64, b: u64) -> u64 {
        let n = self.nstates();
        match op {
            Op::And => a & b,
            Op::IDisj => a | b,
            Op::Implies => {
                let bad = a & !b;
                let mut out = 0;
                for s in 0..n {
                    // no t ⊆ s with t ∈ bad
                    let mut t = s;
                    let mut ok = true;
                    loop {
                        if bad >> t & 1 == 1 {
                            ok = false;
                            break;
                        }
                        if t == 0 {
                            break;
                        }
                        t = (t - 1) & s;
                    }
                    if ok {
                        out |= 1 << s;
                    }
                }
                out
            }
            Op::Box(g) | Op::WBox(g) => {
                let good: Vec<bool> = (0..self.m.len())
                    .map(|w| {
                        let (sig, gens) = &self.sigma[g][w];
                        match op {
                            Op::Box(_) => a >> sig & 1 == 1,
                            _ => gens.iter().all(|&gm| {
                                let mut t = gm;
                                loop {
                                    if a >> t & 1 == 0 {
                                        return false;
                                    }
                                    if t == 0 {
                                        return true;
                                    }
                                    t = (t - 1) & gm;
                                }
                            }),
                        }
                    })
                    .collect();
                (0..n)
                    .filter(|&s| (0..self.m.len()).all(|w| s >> w & 1 == 0 || good[w]))
                    .fold(0, |o, s| o | 1 << s)
            }
        }
    }

    fn combine(&mut self, op: Op, a: Key, b: Key) -> Key {
        let modal = matches!(op, Op::Box(_) | Op::WBox(_));
        let st = self.fo(op, Target::State, a.st, b.st);
        let wd = if modal {
            self.fo(op, Target::World, a.st, 0)
        } else {
            self.fo(op, Target::World, a.wd, b.wd)
        };
        let tc = match op {
            Op::And | Op::Implies => a.tc && b.tc,
            Op::IDisj => false,
            Op::Box(_) | Op::WBox(_) => true,
        };
        Key {
            tc,
            st,
            wd,
            table: self.table_op(op, a.table, b.table),
        }
    }

    /// Key of one formula, computed directly (reference path).
    pub fn direct_key(&self, f: &Formula) -> Key {
        let a = &self.a;
        let t = SupportTable::build(self.m, f, 24).unwrap();
        let mut key = Key {
            tc: f.syntactically_truth_conditional(),
            st: 0,
            wd: 0,
            table: (0..self.nstates()).filter(|&s| t.get(InfoState(s as u128))).fold(0, |o, s| o | 1 << s),
        };
        for (tg, lo, n) in [(Target::State, self.s_lo, self.states.len()), (Target::World, self.w_lo, self.m.len())] {
            let fo = standard_translation(f, tg, var(tg));
            for i in 0..n {
                let env: Env = [(var(tg).to_string(), Value::Elem(lo + i))].into_iter().collect();
                if eval_fo(a, &fo, &env).unwrap() {
                    match tg {
                        Target::State => key.st |= 1 << i,
                        Target::World => key.wd |= 1 << i,
                    }
                }
            }
        }
        key
    }

    /// `classes[n]`: keys of the formulas with exactly `n` nodes and modal
    /// depth at most `max_depth`, with how many formulas share each key.
    pub fn classes(&mut self, max_depth: usize, max_nodes: usize) -> Vec<BTreeMap<Key, u128>> {
        let nag = self.m.sig().agents().len();
        let mut by: Vec<Vec<BTreeMap<Key, u128>>> = vec![vec![BTreeMap::new(); max_nodes + 1]; max_depth + 1];
        let mut leaves = BTreeMap::new();
        for p in self.m.sig().props() {
            *leaves.entry(self.direct_key(&Formula::atom(p.clone()))).or_insert(0) += 1;
        }
        *leaves.entry(self.direct_key(&Formula::Bottom)).or_insert(0) += 1;
        for d in 0..=max_depth {
            by[d][1] = leaves.clone();
            for n in 2..=max_nodes {
                let mut level: BTreeMap<Key, u128> = BTreeMap::new();
                for i in 1..n.saturating_sub(1) {
                    let j = n - 1 - i;
                    let (l, r) = (by[d][i].clone(), by[d][j].clone());
                    for (&ka, &ca) in &l {
                        for (&kb, &cb) in &r {
                            for op in [Op::And, Op::Implies, Op::IDisj] {
                                let k = self.combine(op, ka, kb);
                                *level.entry(k).or_insert(0) += ca * cb;
                            }
                        }
                    }
                }
                if d >= 1 {
                    let below = by[d - 1][n - 1].clone();
                    for (&k, &c) in &below {
                        for g in 0..nag {
                            for op in [Op::Box(g), Op::WBox(g)] {
                                let kk = self.combine(op, k, k);
                                *level.entry(kk).or_insert(0) += c;
                            }
                        }
                    }
                }
                by[d][n] = level;
            }
        }
        by.pop().unwrap()
    }

    /// Keys of every enumerated formula, for cross-checking [`Sweep::classes`].
    pub fn direct_classes(&self, max_depth: usize, max_nodes: usize) -> Vec<BTreeMap<Key, u128>> {
        let mut out = vec![BTreeMap::new(); max_nodes + 1];
        for f in enumerate_formulas(self.m.sig(), max_depth, max_nodes, DEFAULT_ENUMERATION_CAP).unwrap() {
            *out[f.size()].entry(self.direct_key(&f)).or_insert(0) += 1;
        }
        out
    }

    /// Does the FO side of `k` agree with its support table?
    pub fn agrees(&self, k: &Key) -> bool {
        let st = self
            .states
            .iter()
            .enumerate()
            .all(|(i, s)| (k.st >> i & 1 == 1) == (k.table >> s.0 & 1 == 1));
        let wd = (0..self.m.len()).all(|w| (k.wd >> w & 1 == 1) == (k.table >> (1u64 << w) & 1 == 1));
        st && wd
    }

    /// `∅` supports, and the table is downward closed.
    pub fn persistent(&self, k: &Key) -> (bool, bool) {
        let empty = k.table & 1 == 1;
        let down = (0..self.nstates()).all(|s| {
            k.table >> s & 1 == 0 || (0..self.m.len()).all(|w| k.table >> (s & !(1 << w)) & 1 == 1)
        });
        (empty, down)
    }

    /// Support at `s` iff truth at each world of `s`.
    pub fn truth_conditional(&self, k: &Key) -> bool {
        let good: usize = (0..self.m.len()).filter(|&w| k.table >> (1u64 << w) & 1 == 1).fold(0, |g, w| g | 1 << w);
        (0..self.nstates()).all(|s| (k.table >> s & 1 == 1) == (s & !good == 0))
    }
}
