//! Ehrenfeucht–Fraïssé games (first-order and monadic second-order) and
//! threshold counting on coloured sets.
//!
//! Both games are decided through rank-k types: II wins k more rounds from a
//! position iff both sides have the same interned k-type, where the k-type
//! collects the atomic type of the pebbled tuple and the (k-1)-types of all
//! one-move extensions. Types are interned jointly for the two structures.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use super::formula::FoFormula;
use super::structure::GenericStructure;

/// Largest universe `ef_mso` searches by default.
pub const DEFAULT_MSO_CAP: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("parameter tuples do not match: {0}")]
    Mismatch(String),
    #[error("structure is not single-sorted")]
    NotSingleSorted,
    #[error("universe of size {size} exceeds the cap {cap}")]
    Cap { size: usize, cap: usize },
}

// Shared vocabulary: relation names (with sort names per position) and sort
// names, so atomic types are comparable across the two structures.
struct Vocab {
    sorts: Vec<String>,
    rels: Vec<String>,
}

impl Vocab {
    fn new(a: &GenericStructure, b: &GenericStructure) -> Vocab {
        let sorts: BTreeSet<String> = a.sort_names().iter().chain(b.sort_names()).cloned().collect();
        let rels: BTreeSet<String> = a
            .relations()
            .iter()
            .chain(b.relations())
            .map(|r| r.name.clone())
            .collect();
        Vocab {
            sorts: sorts.into_iter().collect(),
            rels: rels.into_iter().collect(),
        }
    }
}

struct Side<'a> {
    s: &'a GenericStructure,
    // vocabulary position -> own relation index
    rel: Vec<Option<usize>>,
    // own sort index -> vocabulary sort
    sort: Vec<usize>,
}

impl<'a> Side<'a> {
    fn new(s: &'a GenericStructure, v: &Vocab) -> Side<'a> {
        Side {
            s,
            rel: v.rels.iter().map(|r| s.relation_index(r)).collect(),
            sort: s
                .sort_names()
                .iter()
                .map(|n| v.sorts.iter().position(|x| x == n).unwrap())
                .collect(),
        }
    }

    fn sort(&self, e: usize) -> usize {
        self.sort[self.s.sort_of(e)]
    }

    // Atomic type of a tuple plus unary set memberships.
    fn atp(&self, tuple: &[usize], sets: &[u128]) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::new();
        let mut bits = 0u64;
        let mut nb = 0;
        let mut push = |b: bool, out: &mut Vec<u64>| {
            if b {
                bits |= 1 << nb;
            }
            nb += 1;
            if nb == 64 {
                out.push(bits);
                bits = 0;
                nb = 0;
            }
        };
        for &x in tuple {
            out.push(self.sort(x) as u64);
        }
        for (i, &x) in tuple.iter().enumerate() {
            for &y in &tuple[..i] {
                push(x == y, &mut out);
            }
            for &m in sets {
                push(m >> x & 1 == 1, &mut out);
            }
        }
        let mut args = Vec::new();
        for (vi, r) in self.rel.iter().enumerate() {
            out.push(u64::MAX - vi as u64);
            let Some(r) = r else { continue };
            let rel = &self.s.relations()[*r];
            let k = rel.arity();
            if k == 0 {
                continue;
            }
            // all k-tuples over positions of the pebbled tuple
            let n = tuple.len();
            if n == 0 {
                continue;
            }
            let mut idx = vec![0usize; k];
            loop {
                args.clear();
                args.extend(idx.iter().map(|&i| tuple[i]));
                let ok = args.iter().zip(&rel.sorts).all(|(&e, &s)| self.s.sort_of(e) == s);
                push(ok && rel.holds(&args), &mut out);
                let mut j = 0;
                while j < k {
                    idx[j] += 1;
                    if idx[j] < n {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == k {
                    break;
                }
            }
        }
        out.push(bits);
        out
    }
}

#[derive(Default)]
struct Interner {
    ids: HashMap<(Vec<u64>, Vec<usize>, Vec<usize>), usize>,
}

impl Interner {
    fn id(&mut self, key: (Vec<u64>, Vec<usize>, Vec<usize>)) -> usize {
        let n = self.ids.len();
        *self.ids.entry(key).or_insert(n)
    }
}

struct Solver<'a> {
    sides: [Side<'a>; 2],
    mso: bool,
    intern: Interner,
    memo: [HashMap<(usize, Vec<usize>, Vec<u128>), usize>; 2],
}

impl Solver<'_> {
    fn ty(&mut self, side: usize, k: usize, tuple: &mut Vec<usize>, sets: &mut Vec<u128>) -> usize {
        let key = (k, tuple.clone(), sets.clone());
        if let Some(&t) = self.memo[side].get(&key) {
            return t;
        }
        let atp = self.sides[side].atp(tuple, sets);
        let (mut ext, mut setx) = (Vec::new(), Vec::new());
        if k > 0 {
            let n = self.sides[side].s.size();
            for b in 0..n {
                tuple.push(b);
                ext.push(self.ty(side, k - 1, tuple, sets));
                tuple.pop();
            }
            if self.mso {
                for x in 0..1u128 << n {
                    sets.push(x);
                    setx.push(self.ty(side, k - 1, tuple, sets));
                    sets.pop();
                }
            }
            ext.sort_unstable();
            ext.dedup();
            setx.sort_unstable();
            setx.dedup();
        }
        let t = self.intern.id((atp, ext, setx));
        self.memo[side].insert(key, t);
        t
    }

    fn same(&mut self, k: usize, ta: &[usize], sa: &[u128], tb: &[usize], sb: &[u128]) -> bool {
        let x = self.ty(0, k, &mut ta.to_vec(), &mut sa.to_vec());
        let y = self.ty(1, k, &mut tb.to_vec(), &mut sb.to_vec());
        x == y
    }
}

/// One round of a lost game, from the spoiler's choice to the reply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EfRound {
    /// 0 = first structure, 1 = second.
    pub side: usize,
    /// Element name, or the set as a list of element names.
    pub pick: Vec<String>,
    pub reply: Vec<String>,
    pub set_move: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EfResult {
    pub duplicator_wins: bool,
    /// On a loss: a winning play of the spoiler against one reply each
    /// round, ending in a position whose pebbles are not a partial
    /// isomorphism.
    pub witness: Option<Vec<EfRound>>,
}

fn check_params(a: &GenericStructure, pa: &[usize], b: &GenericStructure, pb: &[usize]) -> Result<(), GameError> {
    if pa.len() != pb.len() {
        return Err(GameError::Mismatch("different lengths".into()));
    }
    for (&x, &y) in pa.iter().zip(pb) {
        if x >= a.size() || y >= b.size() {
            return Err(GameError::Mismatch("element out of range".into()));
        }
        if a.sort_names()[a.sort_of(x)] != b.sort_names()[b.sort_of(y)] {
            return Err(GameError::Mismatch(format!(
                "{} and {} have different sorts",
                a.name(x),
                b.name(y)
            )));
        }
    }
    Ok(())
}

fn solver<'a>(a: &'a GenericStructure, b: &'a GenericStructure, mso: bool) -> Solver<'a> {
    let v = Vocab::new(a, b);
    Solver {
        sides: [Side::new(a, &v), Side::new(b, &v)],
        mso,
        intern: Interner::default(),
        memo: [HashMap::new(), HashMap::new()],
    }
}

/// The `n`-round first-order pebble game on `(A, ā)` and `(B, b̄)`;
/// parameters are global element ids.
pub fn ef_fo(a: &GenericStructure, pa: &[usize], b: &GenericStructure, pb: &[usize], n: usize) -> Result<EfResult, GameError> {
    check_params(a, pa, b, pb)?;
    let mut s = solver(a, b, false);
    if s.same(n, pa, &[], pb, &[]) {
        return Ok(EfResult {
            duplicator_wins: true,
            witness: None,
        });
    }
    let mut play = Vec::new();
    let (mut ta, mut tb) = (pa.to_vec(), pb.to_vec());
    let names = |st: &GenericStructure, e: usize| vec![st.name(e).to_string()];
    for k in (1..=n).rev() {
        // position lost with k rounds left; find a spoiler move after
        // which every reply loses with k-1 left
        if s.sides[0].atp(&ta, &[]) != s.sides[1].atp(&tb, &[]) {
            break;
        }
        let mut found = None;
        'outer: for side in 0..2 {
            let (mine, theirs) = if side == 0 { (&ta, &tb) } else { (&tb, &ta) };
            let (ms, ts) = (s.sides[side].s, s.sides[1 - side].s);
            for x in 0..ms.size() {
                let mut m2 = mine.clone();
                m2.push(x);
                let tx = s.ty(side, k - 1, &mut m2.clone(), &mut Vec::new());
                let mut reply = None;
                let mut ok = false;
                for y in 0..ts.size() {
                    let mut t2 = theirs.clone();
                    t2.push(y);
                    if s.ty(1 - side, k - 1, &mut t2, &mut Vec::new()) == tx {
                        ok = true;
                        break;
                    }
                    if reply.is_none() && ts.sort_names()[ts.sort_of(y)] == ms.sort_names()[ms.sort_of(x)] {
                        reply = Some(y);
                    }
                }
                if !ok {
                    found = Some((side, x, reply.unwrap_or(0).min(ts.size().saturating_sub(1))));
                    break 'outer;
                }
            }
        }
        let Some((side, x, y)) = found else { break };
        let (sx, sy) = (s.sides[side].s, s.sides[1 - side].s);
        if sy.size() == 0 {
            play.push(EfRound {
                side,
                pick: names(sx, x),
                reply: vec![],
                set_move: false,
            });
            break;
        }
        play.push(EfRound {
            side,
            pick: names(sx, x),
            reply: names(sy, y),
            set_move: false,
        });
        if side == 0 {
            ta.push(x);
            tb.push(y);
        } else {
            tb.push(x);
            ta.push(y);
        }
    }
    Ok(EfResult {
        duplicator_wins: false,
        witness: Some(play),
    })
}

fn single_sorted(a: &GenericStructure, cap: usize) -> Result<(), GameError> {
    if a.sort_names().len() != 1 {
        return Err(GameError::NotSingleSorted);
    }
    if a.size() > cap.min(20) {
        return Err(GameError::Cap {
            size: a.size(),
            cap: cap.min(20),
        });
    }
    Ok(())
}

/// The `n`-round MSO game: each round the spoiler plays an element or a
/// subset. `P̄` are extra set parameters (masks over element ids).
#[allow(clippy::too_many_arguments)]
pub fn ef_mso(
    a: &GenericStructure,
    sets_a: &[u128],
    pa: &[usize],
    b: &GenericStructure,
    sets_b: &[u128],
    pb: &[usize],
    n: usize,
    cap: usize,
) -> Result<bool, GameError> {
    single_sorted(a, cap)?;
    single_sorted(b, cap)?;
    check_params(a, pa, b, pb)?;
    if sets_a.len() != sets_b.len() {
        return Err(GameError::Mismatch("different numbers of set parameters".into()));
    }
    let mut s = solver(a, b, true);
    Ok(s.same(n, pa, sets_a, pb, sets_b))
}

/// `=_d`: equal, or both at least `d`.
pub fn eq_cutoff(x: usize, y: usize, d: usize) -> bool {
    x == y || (x >= d && y >= d)
}

/// `≈^C_d` on coloured sets: `colours[e]` is the colour of element `e`,
/// `sets` are membership masks. Compared cell by cell over all atoms of the
/// boolean algebra generated by the sets, per colour.
pub fn threshold_equiv(colours: &[usize], sets: &[u128], colours2: &[usize], sets2: &[u128], d: usize) -> bool {
    assert_eq!(sets.len(), sets2.len(), "tuples of different length");
    let cells = |cs: &[usize], ps: &[u128]| {
        let mut m: BTreeMap<(usize, Vec<bool>), usize> = BTreeMap::new();
        for (e, &c) in cs.iter().enumerate() {
            let pat = ps.iter().map(|&p| p >> e & 1 == 1).collect();
            *m.entry((c, pat)).or_default() += 1;
        }
        m
    };
    let (x, y) = (cells(colours, sets), cells(colours2, sets2));
    x.keys()
        .chain(y.keys())
        .all(|k| eq_cutoff(*x.get(k).unwrap_or(&0), *y.get(k).unwrap_or(&0), d))
}

/// A coloured set as a single-sorted structure `U` with unary predicates
/// `C0..C{n-1}`.
pub fn coloured_set(colours: &[usize], ncolours: usize) -> GenericStructure {
    let names: Vec<String> = (0..colours.len()).map(|i| format!("e{i}")).collect();
    let mut b = GenericStructure::builder().sort("U", names.clone());
    for c in 0..ncolours {
        let t = colours
            .iter()
            .enumerate()
            .filter(|&(_, &x)| x == c)
            .map(|(i, _)| vec![names[i].clone()]);
        b = b.relation(&format!("C{c}"), &["U"], t);
    }
    b.build().expect("coloured set")
}

/// Rank-`k` Hintikka formula of `(A, ā)` with `ā` bound to `vars`: it holds
/// in `(B, b̄)` iff `(A, ā) ≡_k (B, b̄)`.
pub fn hintikka(a: &GenericStructure, tuple: &[usize], vars: &[String], k: usize) -> FoFormula {
    let mut lits = Vec::new();
    for (i, &x) in tuple.iter().enumerate() {
        for (j, &y) in tuple.iter().enumerate().take(i) {
            if a.sort_of(x) == a.sort_of(y) {
                let e = FoFormula::eq(&vars[j], &vars[i]);
                lits.push(if x == y { e } else { FoFormula::not(e) });
            }
        }
    }
    for r in a.relations() {
        let k = r.arity();
        let cands: Vec<Vec<usize>> = r
            .sorts
            .iter()
            .map(|&s| (0..tuple.len()).filter(|&i| a.sort_of(tuple[i]) == s).collect())
            .collect();
        let mut idx = vec![0usize; k];
        if cands.iter().any(|c| c.is_empty()) {
            continue;
        }
        loop {
            let args: Vec<usize> = (0..k).map(|j| tuple[cands[j][idx[j]]]).collect();
            let vs: Vec<&str> = (0..k).map(|j| vars[cands[j][idx[j]]].as_str()).collect();
            let at = FoFormula::rel(&r.name, &vs);
            lits.push(if r.holds(&args) { at } else { FoFormula::not(at) });
            let mut j = 0;
            while j < k {
                idx[j] += 1;
                if idx[j] < cands[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == k {
                break;
            }
        }
    }
    if k > 0 {
        let y = format!("h{}", tuple.len());
        let mut vs = vars.to_vec();
        vs.push(y.clone());
        for (si, sort) in a.sort_names().iter().enumerate() {
            let mut seen = BTreeSet::new();
            let mut alts = Vec::new();
            for b in a.sort_range(si) {
                let mut t = tuple.to_vec();
                t.push(b);
                let h = hintikka(a, &t, &vs, k - 1);
                if seen.insert(h.to_string()) {
                    lits.push(FoFormula::exists(&y, sort, h.clone()));
                    alts.push(h);
                }
            }
            lits.push(FoFormula::forall(&y, sort, FoFormula::or(alts)));
        }
    }
    FoFormula::and(lits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fo::{eval_fo, Env};

    fn set(n: usize) -> GenericStructure {
        GenericStructure::builder()
            .sort("U", (0..n).map(|i| format!("e{i}")))
            .build()
            .unwrap()
    }

    #[test]
    fn pure_sets() {
        let r = ef_fo(&set(1), &[], &set(2), &[], 1).unwrap();
        assert!(r.duplicator_wins);
        let r = ef_fo(&set(1), &[], &set(2), &[], 2).unwrap();
        assert!(!r.duplicator_wins);
        let w = r.witness.unwrap();
        assert_eq!(w.len(), 2);
        for n in 0..4 {
            assert!(ef_fo(&set(3), &[0], &set(3), &[0], n).unwrap().duplicator_wins);
        }
        assert!(ef_fo(&set(3), &[], &set(4), &[], 3).unwrap().duplicator_wins);
        assert!(!ef_fo(&set(3), &[], &set(4), &[], 4).unwrap().duplicator_wins);
    }

    #[test]
    fn mismatch() {
        assert!(ef_fo(&set(2), &[0], &set(2), &[], 1).is_err());
    }

    #[test]
    fn threshold_examples() {
        let mono = |n: usize| vec![0usize; n];
        let all = |n: usize| (1u128 << n) - 1;
        assert!(threshold_equiv(&mono(3), &[all(3)], &mono(5), &[all(5)], 2));
        assert!(!threshold_equiv(&mono(3), &[all(3)], &mono(5), &[all(5)], 4));
        // colour 0: 1 in P; colour 1: 2 vs 3 in P
        let c1 = [0, 1, 1];
        let c2 = [0, 1, 1, 1];
        assert!(threshold_equiv(&c1, &[0b111], &c2, &[0b1111], 2));
        assert!(!threshold_equiv(&c1, &[0b111], &c2, &[0b1111], 3));
    }

    // atomwise =_d agrees with termwise =_d over every boolean term
    #[test]
    fn atoms_suffice() {
        for n in 0..=4usize {
            for m in 0..=4usize {
                for p in 0..1u128 << n {
                    for q in 0..1u128 << (n.max(1)) {
                        for p2 in 0..1u128 << m {
                            for q2 in 0..1u128 << m.max(1) {
                                let (ca, cb) = (vec![0; n], vec![0; m]);
                                let q = q & ((1 << n) - 1);
                                let q2 = q2 & ((1 << m) - 1);
                                for d in 1..4 {
                                    let atom = threshold_equiv(&ca, &[p, q], &cb, &[p2, q2], d);
                                    let term = (0..16u32).all(|t| {
                                        let cnt = |n: usize, p: u128, q: u128| {
                                            (0..n)
                                                .filter(|&e| {
                                                    let i = (p >> e & 1) * 2 + (q >> e & 1);
                                                    t >> i & 1 == 1
                                                })
                                                .count()
                                        };
                                        eq_cutoff(cnt(n, p, q), cnt(m, p2, q2), d)
                                    });
                                    assert_eq!(atom, term);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mso_examples() {
        let mono = |n| coloured_set(&vec![0; n], 1);
        let all = |n: usize| (1u128 << n) - 1;
        assert!(ef_mso(&mono(4), &[all(4)], &[], &mono(6), &[all(6)], &[], 2, 6).unwrap());
        // sizes 3 and 5 are not separated in two rounds: the only rank-2
        // difference would need a parity or ≥4 count
        assert!(ef_mso(&mono(3), &[all(3)], &[], &mono(5), &[all(5)], &[], 2, 6).unwrap());
        assert!(!ef_mso(&mono(3), &[], &[], &mono(5), &[], &[], 3, 6).unwrap());
        assert!(!ef_mso(&mono(1), &[], &[], &mono(2), &[], &[], 2, 6).unwrap());
        assert!(ef_mso(&mono(1), &[], &[], &mono(2), &[], &[], 1, 6).unwrap());
        assert!(matches!(
            ef_mso(&mono(7), &[], &[], &mono(7), &[], &[], 1, 6),
            Err(GameError::Cap { .. })
        ));
    }

    #[test]
    fn hintikka_matches_game() {
        let a = set(2);
        let vars: Vec<String> = vec![];
        for k in 0..3 {
            let h = hintikka(&a, &[], &vars, k);
            for n in 1..4 {
                let want = ef_fo(&a, &[], &set(n), &[], k).unwrap().duplicator_wins;
                assert_eq!(eval_fo(&set(n), &h, &Env::new()).unwrap(), want, "k={k} n={n}");
            }
        }
    }
}
