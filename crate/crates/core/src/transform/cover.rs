//! Disjoint unions, product covers, richness and the dummy agent.

use std::collections::HashSet;

use serde::Serialize;

use super::TransformError;
use crate::bisim::{bisim_check, bisim_partition};
use crate::formula::Signature;
use crate::model::{DownwardFamily, EpistemicModel, InfoState};

/// Base name of the agent added by [`dummy_agent_expand`].
pub const DUMMY_AGENT: &str = "dummy";

fn fresh(name: &str, taken: &HashSet<String>) -> String {
    let mut n = name.to_string();
    while taken.contains(&n) {
        n.push('\'');
    }
    n
}

/// `M ⊕ L` over the merged signature. Left names are kept; right names that
/// collide get primes appended.
pub fn disjoint_union(m: &EpistemicModel, l: &EpistemicModel) -> Result<EpistemicModel, TransformError> {
    if !m.is_validated() || !l.is_validated() {
        return Err(TransformError::NotValidated);
    }
    let sig = m.sig().merge(l.sig());
    let (m, l) = (m.extend_signature(&sig), l.extend_signature(&sig));
    let mut taken: HashSet<String> = m.worlds().iter().cloned().collect();
    let mut worlds = m.worlds().to_vec();
    for w in l.worlds() {
        let n = fresh(w, &taken);
        taken.insert(n.clone());
        worlds.push(n);
    }
    let off = m.len();
    let shift = |s: InfoState| InfoState(s.0 << off);
    let val = (0..sig.props().len())
        .map(|p| m.valuation_by_index(p).union(shift(l.valuation_by_index(p))))
        .collect();
    let sigma = (0..sig.agents().len())
        .map(|a| {
            let mut row: Vec<DownwardFamily> = (0..m.len()).map(|w| m.sigma_family(a, w).clone()).collect();
            row.extend((0..l.len()).map(|w| l.sigma_family(a, w).map(|v| v + off)));
            row
        })
        .collect();
    Ok(EpistemicModel::new(sig, worlds, val, sigma)?)
}

/// A bisimilar covering `π: M̂ → M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covering {
    pub source: EpistemicModel,
    pub target: EpistemicModel,
    /// `map[ŵ] = π(ŵ)`.
    pub map: Vec<usize>,
}

/// `M × [K]` with worlds `w#1 … w#K` (world-major). Maximal generators are
/// the full preimages of the maximal generators of `M`.
pub fn rich_cover(m: &EpistemicModel, k: usize) -> Result<Covering, TransformError> {
    if !m.is_validated() {
        return Err(TransformError::NotValidated);
    }
    assert!(k >= 1, "K must be positive");
    let n = m.len();
    if n * k > crate::model::MAX_WORLDS {
        return Err(TransformError::Cap {
            size: n * k,
            cap: crate::model::MAX_WORLDS,
        });
    }
    let worlds: Vec<String> = m
        .worlds()
        .iter()
        .flat_map(|w| (1..=k).map(move |i| format!("{w}#{i}")))
        .collect();
    let map: Vec<usize> = (0..n * k).map(|x| x / k).collect();
    let pre = |s: InfoState| InfoState::from_worlds(s.iter().flat_map(|w| w * k..(w + 1) * k));
    let val = (0..m.sig().props().len()).map(|p| pre(m.valuation_by_index(p))).collect();
    let sigma = (0..m.sig().agents().len())
        .map(|a| {
            (0..n * k)
                .map(|x| DownwardFamily::from_generators(m.sigma_family(a, map[x]).maximal().iter().map(|&g| pre(g))))
                .collect()
        })
        .collect();
    let source = EpistemicModel::new(m.sig().clone(), worlds, val, sigma)?;
    Ok(Covering {
        source,
        target: m.clone(),
        map,
    })
}

/// First failing condition of a covering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum CoveringFailure {
    Signature,
    Map { detail: String },
    NotSurjective { missing: String },
    Valuation { prop: String, world: String },
    Sigma { agent: String, world: String },
    NotBisimilar { world: String },
}

/// Surjectivity, `π(Σ̂_a(ŵ)) = Σ_a(π(ŵ))`, `V̂(p) = π⁻¹(V(p))`, plus the
/// game check `M̂,ŵ ∼ M,π(ŵ)` at every world.
pub fn verify_covering(c: &Covering) -> Result<(), CoveringFailure> {
    let (s, t) = (&c.source, &c.target);
    if s.sig() != t.sig() {
        return Err(CoveringFailure::Signature);
    }
    if c.map.len() != s.len() || c.map.iter().any(|&x| x >= t.len()) {
        return Err(CoveringFailure::Map {
            detail: "π must send every source world to a target world".into(),
        });
    }
    let image = InfoState::from_worlds(c.map.iter().copied());
    if let Some(w) = t.all().minus(image).first() {
        return Err(CoveringFailure::NotSurjective {
            missing: t.worlds()[w].clone(),
        });
    }
    for (p, name) in t.sig().props().iter().enumerate() {
        let vt = t.valuation_by_index(p);
        let vs = s.valuation_by_index(p);
        for x in 0..s.len() {
            if vs.contains(x) != vt.contains(c.map[x]) {
                return Err(CoveringFailure::Valuation {
                    prop: name.clone(),
                    world: s.worlds()[x].clone(),
                });
            }
        }
    }
    for (a, name) in t.sig().agents().iter().enumerate() {
        for x in 0..s.len() {
            let img = s.sigma_family(a, x).map(|v| c.map[v]);
            if &img != t.sigma_family(a, c.map[x]) {
                return Err(CoveringFailure::Sigma {
                    agent: name.clone(),
                    world: s.worlds()[x].clone(),
                });
            }
        }
    }
    for x in 0..s.len() {
        if !bisim_check(s, x, t, c.map[x], None).bisimilar {
            return Err(CoveringFailure::NotBisimilar {
                world: s.worlds()[x].clone(),
            });
        }
    }
    Ok(())
}

/// `K`-richness against the `∼`-colouring. For a generator `g` and a set
/// `T` of types present in `g`, the hardest member of `g` with types `T` is
/// `g ∩ ⋃T`; only maximal generators are tried as the enlargement `s'`.
pub fn is_k_rich(m: &EpistemicModel, k: usize) -> bool {
    let col = bisim_partition(m, None, None);
    for a in 0..m.sig().agents().len() {
        for class in m.classes(a) {
            let w = class.first().unwrap();
            let gens = m.sigma_family(a, w).maximal();
            let by_colour = |g: InfoState, c: usize| g.iter().filter(|&v| col.left(v) == c).count();
            for &g0 in gens {
                let types = col.colours_of(g0);
                for mask in 1u32..1 << types.len() {
                    let t: Vec<usize> = (0..types.len()).filter(|i| mask >> i & 1 == 1).map(|i| types[i]).collect();
                    let s = InfoState::from_worlds(g0.iter().filter(|&v| t.contains(&col.left(v))));
                    let ok = gens
                        .iter()
                        .any(|&g| s.is_subset(g) && t.iter().all(|&c| by_colour(g, c) >= k));
                    if !ok {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `M_s`: an extra agent whose only non-trivial class is `s`, with
/// `Σ(w) = ℘(s)` on `s`.
pub fn dummy_agent_expand(m: &EpistemicModel, s: InfoState) -> Result<EpistemicModel, TransformError> {
    if !m.is_validated() {
        return Err(TransformError::NotValidated);
    }
    if s.is_empty() {
        return Err(TransformError::EmptyState);
    }
    let taken: HashSet<String> = m.sig().agents().iter().cloned().collect();
    let d = fresh(DUMMY_AGENT, &taken);
    let sig = Signature::new(m.sig().agents().iter().cloned().chain([d.clone()]), m.sig().props().to_vec());
    let sigma = sig
        .agents()
        .iter()
        .map(|a| {
            (0..m.len())
                .map(|w| {
                    if *a == d {
                        DownwardFamily::powerset(if s.contains(w) { s } else { InfoState::singleton(w) })
                    } else {
                        m.inquisitive_state(a, w)
                    }
                })
                .collect()
        })
        .collect();
    let val = (0..sig.props().len()).map(|p| m.valuation_by_index(p)).collect();
    Ok(EpistemicModel::new(sig, m.worlds().to_vec(), val, sigma)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn union() {
        let m1 = samples::m1();
        let u = disjoint_union(&m1, &m1).unwrap();
        assert_eq!(u.len(), 4);
        assert_eq!(u.worlds(), ["u", "v", "u'", "v'"]);
        for w in 0..2 {
            assert!(bisim_check(&u, w, &m1, w, None).bisimilar);
            assert!(bisim_check(&u, w + 2, &m1, w, None).bisimilar);
        }
    }

    #[test]
    fn covers() {
        let m1 = samples::m1();
        let c = rich_cover(&m1, 2).unwrap();
        assert_eq!(c.source.len(), 4);
        let u = c.source.world_index("u#1").unwrap();
        assert_eq!(c.source.sigma_family(0, u).maximal(), &[InfoState::from_worlds([0, 1]), InfoState::from_worlds([2, 3])]);
        assert_eq!(verify_covering(&c), Ok(()));
        assert!(is_k_rich(&c.source, 2));
        assert!(is_k_rich(&m1, 1));
        assert!(!is_k_rich(&m1, 2));
        assert!(is_k_rich(&rich_cover(&m1, 3).unwrap().source, 3));
        let id = Covering {
            source: m1.clone(),
            target: m1.clone(),
            map: vec![0, 1],
        };
        assert_eq!(verify_covering(&id), Ok(()));
        let collapse = Covering {
            source: samples::m0(),
            target: m1.clone(),
            map: vec![0, 1],
        };
        assert!(matches!(verify_covering(&collapse), Err(CoveringFailure::Sigma { .. })));
        let one = rich_cover(&m1, 1).unwrap();
        assert_eq!(one.source.renamed(m1.worlds().to_vec()), m1);
    }

    // maximal-generator richness check against all members and all
    // enlargements
    #[test]
    fn richness_naive() {
        let naive = |m: &EpistemicModel, k: usize| {
            let col = bisim_partition(m, None, None);
            (0..m.sig().agents().len()).all(|a| {
                (0..m.len()).all(|w| {
                    let fam = m.sigma_family(a, w);
                    fam.members().iter().all(|&s| {
                        fam.members().iter().any(|&s2| {
                            s.is_subset(s2)
                                && col
                                    .colours_of(s)
                                    .iter()
                                    .all(|&c| s2.iter().filter(|&v| col.left(v) == c).count() >= k)
                        })
                    })
                })
            })
        };
        let mut models = vec![samples::m0(), samples::m1()];
        for seed in 0..40 {
            models.push(crate::corpus::random_model(seed, &crate::corpus::CorpusParams::default()));
        }
        let extra: Vec<EpistemicModel> = models.iter().map(|m| rich_cover(m, 2).unwrap().source).collect();
        models.extend(extra.into_iter().filter(|m| m.len() <= 8));
        for m in &models {
            for k in 1..4 {
                assert_eq!(is_k_rich(m, k), naive(m, k), "{m:?} K={k}");
            }
        }
    }

    #[test]
    fn dummy() {
        let m1 = samples::m1();
        let d = dummy_agent_expand(&m1, m1.all()).unwrap();
        assert_eq!(d.sig().agents(), ["a", "dummy"]);
        assert_eq!(d.sigma_family(1, 0).maximal(), &[m1.all()]);
        let d1 = dummy_agent_expand(&m1, InfoState::singleton(0)).unwrap();
        assert_eq!(d1.classes(1).len(), 2);
        assert_eq!(dummy_agent_expand(&m1, InfoState::EMPTY), Err(TransformError::EmptyState));
        let dd = dummy_agent_expand(&d, m1.all()).unwrap();
        assert_eq!(dd.sig().agents(), ["a", "dummy", "dummy'"]);
    }
}
