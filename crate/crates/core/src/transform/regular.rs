//! Local structures, κ-regularity, regularization and `b_m` structures.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{cover::is_k_rich, TransformError};
use crate::bisim::{bisim_check, bisim_partition, Colouring, Depth};
use crate::fo::{FoFormula, GenericStructure};
use crate::formula::Signature;
use crate::model::{DownwardFamily, EpistemicModel, InfoState};

/// `M↾[w]_a` with its `ρ_m` colouring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalStructure {
    pub agent: String,
    /// The class, as world indices of the ambient model (ascending).
    pub worlds: Vec<usize>,
    /// Single-agent model on the class with constant `Σ_a`.
    pub model: EpistemicModel,
    /// `ρ_m` colour per local world (colour ids of the ambient model).
    pub colours: Vec<usize>,
    pub granularity: Depth,
}

impl LocalStructure {
    fn pi(&self) -> &DownwardFamily {
        self.model.sigma_family(0, 0)
    }

    /// Sorted colour set of a local state.
    pub fn colour_set(&self, s: InfoState) -> Vec<usize> {
        let mut v: Vec<usize> = s.iter().map(|w| self.colours[w]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// `ρ_m(Π ∖ {∅})`.
    pub fn realised(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for &g in self.pi().maximal() {
            let cs = self.colour_set(g);
            out.extend(nonempty_subsets(&cs));
        }
        out
    }
}

fn nonempty_subsets(cs: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (1u64..1 << cs.len()).map(move |mask| (0..cs.len()).filter(|i| mask >> i & 1 == 1).map(|i| cs[i]).collect())
}

fn colouring(m: &EpistemicModel, depth: Depth) -> Colouring {
    bisim_partition(m, None, depth)
}

fn local_with(m: &EpistemicModel, col: &Colouring, w: usize, ai: usize, depth: Depth) -> LocalStructure {
    let class = m.sigma(ai, w);
    let worlds: Vec<usize> = class.iter().collect();
    let pos = |v: usize| worlds.iter().position(|&x| x == v).unwrap();
    let agent = m.sig().agents()[ai].clone();
    let sig = Signature::new([agent.clone()], m.sig().props().to_vec());
    let restrict = |s: InfoState| InfoState::from_worlds(s.iter().filter(|&v| class.contains(v)).map(pos));
    let fam = m.sigma_family(ai, w).map(pos);
    let model = EpistemicModel::new(
        sig,
        worlds.iter().map(|&v| m.worlds()[v].clone()).collect(),
        (0..m.sig().props().len()).map(|p| restrict(m.valuation_by_index(p))).collect(),
        vec![vec![fam; worlds.len()]],
    )
    .expect("restriction of a validated model");
    LocalStructure {
        agent,
        colours: worlds.iter().map(|&v| col.left(v)).collect(),
        worlds,
        model,
        granularity: depth,
    }
}

/// The local `∼^m`-structure at `[w]_a` (`m = None` for `∼`).
pub fn local_structure(m: &EpistemicModel, w: usize, agent: &str, depth: Depth) -> Result<LocalStructure, TransformError> {
    if !m.is_validated() {
        return Err(TransformError::NotValidated);
    }
    let ai = m.sig().agent_index(agent).ok_or_else(|| TransformError::Invalid(format!("unknown agent `{agent}`")))?;
    Ok(local_with(m, &colouring(m, depth), w, ai, depth))
}

/// Blocks of cells over the local worlds of a [`LocalStructure`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BlockDecomposition {
    pub blocks: Vec<Vec<InfoState>>,
}

impl BlockDecomposition {
    /// Blocks as lists of cells, cells as world names.
    pub fn to_json(&self, l: &LocalStructure) -> Vec<Vec<Vec<String>>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&c| l.model.state_names(c)).collect())
            .collect()
    }

    pub fn from_json(l: &LocalStructure, j: &[Vec<Vec<String>>]) -> Result<BlockDecomposition, TransformError> {
        let blocks = j
            .iter()
            .map(|b| {
                b.iter()
                    .map(|c| {
                        let names = c.join(",");
                        l.model.parse_state(&names).map_err(|e| TransformError::Invalid(e.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BlockDecomposition { blocks })
    }
}

/// First reason the decomposition fails to witness κ-regularity.
pub fn check_kappa_regular(l: &LocalStructure, kappa: usize, d: &BlockDecomposition) -> Result<(), String> {
    if d.blocks.len() != kappa {
        return Err(format!("{} blocks, expected {kappa}", d.blocks.len()));
    }
    let all = InfoState::full(l.worlds.len());
    let mut seen = InfoState::EMPTY;
    for (i, b) in d.blocks.iter().enumerate() {
        if b.is_empty() {
            return Err(format!("block {i} is empty"));
        }
        for &c in b {
            if c.is_empty() || !c.is_subset(all) {
                return Err(format!("block {i} has an empty or foreign cell"));
            }
            if !c.intersect(seen).is_empty() {
                return Err(format!("cells overlap in block {i}"));
            }
            seen = seen.union(c);
        }
    }
    if seen != all {
        return Err("blocks do not cover the class".into());
    }
    let cells = d.blocks.iter().flatten().copied();
    if &DownwardFamily::from_generators(cells) != l.pi() {
        return Err("Σ is not generated by the cells".into());
    }
    let want = l.realised();
    for (i, b) in d.blocks.iter().enumerate() {
        let got: Vec<Vec<usize>> = b.iter().map(|&c| l.colour_set(c)).collect();
        let set: BTreeSet<Vec<usize>> = got.iter().cloned().collect();
        if set.len() != got.len() {
            return Err(format!("block {i} has two cells of one colour combination"));
        }
        if set != want {
            return Err(format!("block {i} does not realise each colour combination exactly once"));
        }
    }
    Ok(())
}

pub fn is_kappa_regular(l: &LocalStructure, kappa: usize, d: &BlockDecomposition) -> bool {
    check_kappa_regular(l, kappa, d).is_ok()
}

/// One class of a regularized model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDecomposition {
    pub agent: String,
    pub local: LocalStructure,
    pub decomposition: BlockDecomposition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regularized {
    pub model: EpistemicModel,
    pub classes: Vec<ClassDecomposition>,
}

fn max_depth(a: Depth, b: Depth) -> Depth {
    match (a, b) {
        (None, _) | (_, None) => None,
        (Some(x), Some(y)) => Some(x.max(y)),
    }
}

/// Rebuild every `Σ_a` on the same frame so that each class is κ-regular at
/// its granularity (the largest `m` over the class) and `K`-rich, keeping
/// every world's `∼`-type. The result is post-verified.
pub fn regularize(m: &EpistemicModel, kappa: usize, granularity: &[Depth], k: usize) -> Result<Regularized, TransformError> {
    if !m.is_validated() {
        return Err(TransformError::NotValidated);
    }
    assert!(kappa >= 1 && k >= 1, "κ and K must be positive");
    assert_eq!(granularity.len(), m.len(), "one granularity per world");
    let full = colouring(m, None);
    let mut levels: HashMap<Depth, Colouring> = HashMap::new();
    let mut sigma: Vec<Vec<DownwardFamily>> = Vec::new();
    let mut plan = Vec::new();
    for (ai, agent) in m.sig().agents().iter().enumerate() {
        let mut row = vec![DownwardFamily::trivial(); m.len()];
        for class in m.classes(ai) {
            let depth = class.iter().map(|w| granularity[w]).fold(Some(0), max_depth);
            let col = levels.entry(depth).or_insert_with(|| colouring(m, depth));
            // projection of full colours to level m
            let mut proj: HashMap<usize, usize> = HashMap::new();
            for w in 0..m.len() {
                proj.insert(full.left(w), col.left(w));
            }
            let pm = |d: &[usize]| -> Vec<usize> {
                let mut v: Vec<usize> = d.iter().map(|c| proj[c]).collect();
                v.sort_unstable();
                v.dedup();
                v
            };
            let names = m.state_names(class);
            let insufficient = |detail: String| TransformError::InsufficientRichness {
                agent: agent.clone(),
                class: names.clone(),
                detail,
            };
            let gens = m.sigma_family(ai, class.first().unwrap()).maximal();
            // maximal full colour sets
            let mut fs: Vec<Vec<usize>> = gens.iter().map(|&g| full.colours_of(g)).collect();
            fs.sort();
            fs.dedup();
            let f_max: Vec<Vec<usize>> = fs
                .iter()
                .filter(|f| !fs.iter().any(|g| g != *f && f.iter().all(|c| g.contains(c))))
                .cloned()
                .collect();
            let mut all_d: BTreeSet<Vec<usize>> = BTreeSet::new();
            for f in &f_max {
                all_d.extend(nonempty_subsets(f));
            }
            let alphas: BTreeSet<Vec<usize>> = all_d.iter().map(|d| pm(d)).collect();
            let mut choice: Vec<(Vec<usize>, Vec<Vec<usize>>)> = Vec::new();
            for alpha in alphas {
                let needed: Vec<Vec<usize>> = f_max.iter().filter(|f| pm(f) == alpha).cloned().collect();
                let list = if needed.is_empty() {
                    let best = all_d
                        .iter()
                        .filter(|d| pm(d) == alpha)
                        .max_by_key(|d| d.len())
                        .unwrap()
                        .clone();
                    vec![best]
                } else {
                    needed
                };
                if list.len() > kappa {
                    return Err(insufficient(format!(
                        "colour combination {alpha:?} needs {} distinct maximal cells but κ = {kappa}",
                        list.len()
                    )));
                }
                choice.push((alpha, list));
            }
            // cell (block i, combination j) -> full colour set
            let cells_d: Vec<Vec<Vec<usize>>> = (0..kappa)
                .map(|i| choice.iter().map(|(_, l)| l[i % l.len()].clone()).collect())
                .collect();
            let mut by_colour: HashMap<usize, VecDeque<usize>> = HashMap::new();
            for w in class.iter() {
                by_colour.entry(full.left(w)).or_default().push_back(w);
            }
            let mut cells: Vec<Vec<InfoState>> = cells_d.iter().map(|b| vec![InfoState::EMPTY; b.len()]).collect();
            let mut colours: Vec<usize> = by_colour.keys().copied().collect();
            colours.sort_unstable();
            for &c in &colours {
                let demand = cells_d.iter().flatten().filter(|d| d.contains(&c)).count() * k;
                let pool = by_colour.get_mut(&c).unwrap();
                if pool.len() < demand {
                    return Err(insufficient(format!(
                        "colour {c} has {} worlds but {demand} are needed",
                        pool.len()
                    )));
                }
                let mut first_cell = None;
                for (i, b) in cells_d.iter().enumerate() {
                    for (j, d) in b.iter().enumerate() {
                        if d.contains(&c) {
                            first_cell.get_or_insert((i, j));
                            for _ in 0..k {
                                cells[i][j].insert(pool.pop_front().unwrap());
                            }
                        }
                    }
                }
                let (i, j) = first_cell.ok_or_else(|| insufficient(format!("colour {c} fits in no cell")))?;
                while let Some(w) = pool.pop_front() {
                    cells[i][j].insert(w);
                }
            }
            let fam = DownwardFamily::from_generators(cells.iter().flatten().copied());
            for w in class.iter() {
                row[w] = fam.clone();
            }
            plan.push((ai, class, depth, cells));
        }
        sigma.push(row);
    }
    let val = (0..m.sig().props().len()).map(|p| m.valuation_by_index(p)).collect();
    let out = EpistemicModel::new(m.sig().clone(), m.worlds().to_vec(), val, sigma)
        .map_err(|e| TransformError::PostVerificationFailure(e.to_string()))?;
    // post-verification
    let fail = TransformError::PostVerificationFailure;
    for w in 0..m.len() {
        if !bisim_check(&out, w, m, w, None).bisimilar {
            return Err(fail(format!("{} lost its bisimulation type", m.worlds()[w])));
        }
    }
    if !is_k_rich(&out, k) {
        return Err(fail(format!("result is not {k}-rich")));
    }
    let mut classes = Vec::new();
    let mut cols: HashMap<Depth, Colouring> = HashMap::new();
    for (ai, class, depth, cells) in plan {
        let col = cols.entry(depth).or_insert_with(|| colouring(&out, depth));
        let local = local_with(&out, col, class.first().unwrap(), ai, depth);
        let pos = |v: usize| local.worlds.iter().position(|&x| x == v).unwrap();
        let decomposition = BlockDecomposition {
            blocks: cells.iter().map(|b| b.iter().map(|c| c.map(pos)).collect()).collect(),
        };
        check_kappa_regular(&local, kappa, &decomposition).map_err(|e| fail(format!("class {:?}: {e}", m.state_names(class))))?;
        classes.push(ClassDecomposition {
            agent: m.sig().agents()[ai].clone(),
            local,
            decomposition,
        });
    }
    Ok(Regularized { model: out, classes })
}

/// `m(u) = ℓ + 1 − d(w, u)`, floored at 0, with `d` the distance in the
/// underlying frame (unreachable worlds get 0).
pub fn granularity_schedule(m: &EpistemicModel, w: usize, ell: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; m.len()];
    dist[w] = 0;
    let mut q = VecDeque::from([w]);
    while let Some(x) = q.pop_front() {
        for a in 0..m.sig().agents().len() {
            for y in m.sigma(a, x).iter() {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                }
            }
        }
    }
    dist.iter().map(|&d| (ell + 1).saturating_sub(d)).collect()
}

/// `b_m([w]_a) = ([w]_a, ρ_m, B, (P_α))` on sort `U`: colours `C<id>`,
/// blocks as the equivalence `B`, and `P<j>` for the `j`-th realised colour
/// combination in sorted order.
pub fn b_structure(l: &LocalStructure, d: &BlockDecomposition) -> Result<GenericStructure, TransformError> {
    check_kappa_regular(l, d.blocks.len(), d).map_err(TransformError::NotRegular)?;
    let names = l.model.worlds().to_vec();
    let mut b = GenericStructure::builder().sort("U", names.clone());
    let mut ids: Vec<usize> = l.colours.clone();
    ids.sort_unstable();
    ids.dedup();
    for c in ids {
        b = b.relation(
            &format!("C{c}"),
            &["U"],
            (0..names.len()).filter(|&v| l.colours[v] == c).map(|v| vec![names[v].clone()]),
        );
    }
    let mut pairs = Vec::new();
    for block in &d.blocks {
        let all = block.iter().fold(InfoState::EMPTY, |a, &c| a.union(c));
        for x in all.iter() {
            for y in all.iter() {
                pairs.push(vec![names[x].clone(), names[y].clone()]);
            }
        }
    }
    b = b.relation("B", &["U", "U"], pairs);
    for (j, alpha) in l.realised().iter().enumerate() {
        let members = d
            .blocks
            .iter()
            .flatten()
            .filter(|&&c| &l.colour_set(c) == alpha)
            .flat_map(|c| c.iter())
            .map(|v| vec![names[v].clone()]);
        b = b.relation(&format!("P{j}"), &["U"], members);
    }
    b.build().map_err(|e| TransformError::NotRegular(e.to_string()))
}

/// `∃X(s ⊆ X ∧ ∀x∀y((Xx ∧ Xy) → Bxy) ∧ ⋁_j ∀x(Xx → P_j x))` with the free
/// set variable `s`.
pub fn b_membership_formula(num_combinations: usize) -> FoFormula {
    let sub = FoFormula::forall("x", "U", FoFormula::implies(FoFormula::mem("x", "s"), FoFormula::mem("x", "X")));
    let clique = FoFormula::forall(
        "x",
        "U",
        FoFormula::forall(
            "y",
            "U",
            FoFormula::implies(
                FoFormula::and([FoFormula::mem("x", "X"), FoFormula::mem("y", "X")]),
                FoFormula::rel("B", &["x", "y"]),
            ),
        ),
    );
    let inside = FoFormula::or((0..num_combinations).map(|j| {
        FoFormula::forall(
            "x",
            "U",
            FoFormula::implies(FoFormula::mem("x", "X"), FoFormula::rel(&format!("P{j}"), &["x"])),
        )
    }));
    FoFormula::exists_set("X", "U", FoFormula::and([sub, clique, inside]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fo::{eval_fo, Env, Value};
    use crate::samples;
    use crate::transform::rich_cover;

    #[test]
    fn m1_local() {
        let m1 = samples::m1();
        let l = local_structure(&m1, 0, "a", None).unwrap();
        assert_eq!(l.worlds, [0, 1]);
        assert_ne!(l.colours[0], l.colours[1]);
        assert_eq!(l.pi().maximal(), &[InfoState::singleton(0), InfoState::singleton(1)]);
        let d = BlockDecomposition {
            blocks: vec![vec![InfoState::singleton(0), InfoState::singleton(1)]],
        };
        assert!(is_kappa_regular(&l, 1, &d));
        assert!(!is_kappa_regular(&l, 2, &d));
        let l0 = local_structure(&m1, 0, "a", Some(0)).unwrap();
        assert_ne!(l0.colours[0], l0.colours[1]);

        let b = b_structure(&l, &d).unwrap();
        assert_eq!(b.relation("B").unwrap().tuples().len(), 4);
        let f = b_membership_formula(l.realised().len());
        for s in 0..4u128 {
            let env: Env = [("s".to_string(), Value::Set(0, s))].into_iter().collect();
            assert_eq!(eval_fo(&b, &f, &env).unwrap(), l.pi().contains(InfoState(s)), "{s}");
        }
    }

    // Σ = ℘({u,v}) realises {c_u}, {c_v} and {c_u, c_v}; a single cell
    // {u,v} leaves {c_u} without its own maximal element.
    #[test]
    fn m0_single_cell() {
        let m0 = samples::m0();
        let l = local_structure(&m0, 0, "a", None).unwrap();
        let d = BlockDecomposition {
            blocks: vec![vec![m0.all()]],
        };
        assert_eq!(l.realised().len(), 3);
        assert!(!is_kappa_regular(&l, 1, &d));
    }

    #[test]
    fn regularize_examples() {
        let m1 = samples::m1();
        let big = rich_cover(&m1, 8).unwrap().source;
        let r = regularize(&big, 2, &vec![Some(1); big.len()], 2).unwrap();
        assert!(r.classes.iter().all(|c| c.decomposition.blocks.len() == 2));
        assert!(matches!(
            regularize(&m1, 2, &[Some(1), Some(1)], 1),
            Err(TransformError::InsufficientRichness { .. })
        ));
        let same = regularize(&m1, 1, &[None, None], 1).unwrap();
        assert_eq!(same.model, m1);
    }

    #[test]
    fn schedule() {
        let m1 = samples::m1();
        assert_eq!(granularity_schedule(&m1, 0, 2), [3, 2]);
    }
}
