//! Seeded random epistemic models for tests and the `corpus` command.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::formula::Signature;
use crate::model::{DownwardFamily, EpistemicModel, InfoState};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusParams {
    pub min_worlds: usize,
    pub max_worlds: usize,
    pub max_agents: usize,
    pub max_props: usize,
    /// Generators drawn per class (at least one).
    pub max_generators: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            min_worlds: 2,
            max_worlds: 5,
            max_agents: 2,
            max_props: 2,
            max_generators: 3,
        }
    }
}

const AGENTS: [&str; 4] = ["a", "b", "c", "d"];
const PROPS: [&str; 4] = ["p", "q", "r", "s"];

fn random_subset(rng: &mut ChaCha8Rng, of: &[usize]) -> InfoState {
    loop {
        let s = InfoState::from_worlds(of.iter().copied().filter(|_| rng.gen_bool(0.5)));
        if !s.is_empty() {
            return s;
        }
    }
}

/// One model from `seed`. Each agent gets a random partition; each class a
/// random set of generators, enlarged until their union is the class.
pub fn random_model(seed: u64, p: &CorpusParams) -> EpistemicModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(p.min_worlds..=p.max_worlds);
    let na = rng.gen_range(1..=p.max_agents.clamp(1, AGENTS.len()));
    let np = rng.gen_range(1..=p.max_props.clamp(1, PROPS.len()));
    let sig = Signature::new(AGENTS[..na].iter().copied(), PROPS[..np].iter().copied());
    let worlds: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let val = (0..np)
        .map(|_| InfoState::from_worlds((0..n).filter(|_| rng.gen_bool(0.5))))
        .collect();
    let mut sigma = Vec::new();
    for _ in 0..na {
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let mut row = vec![DownwardFamily::trivial(); n];
        let mut ls = labels.clone();
        ls.sort_unstable();
        ls.dedup();
        for l in ls {
            let class: Vec<usize> = (0..n).filter(|&w| labels[w] == l).collect();
            let k = rng.gen_range(1..=p.max_generators.max(1));
            let mut gens: Vec<InfoState> = (0..k).map(|_| random_subset(&mut rng, &class)).collect();
            for &w in &class {
                if !gens.iter().any(|g| g.contains(w)) {
                    gens.choose_mut(&mut rng).unwrap().insert(w);
                }
            }
            let fam = DownwardFamily::from_generators(gens);
            for &w in &class {
                row[w] = fam.clone();
            }
        }
        sigma.push(row);
    }
    EpistemicModel::new(sig, worlds, val, sigma).expect("generator repairs the frame conditions")
}

/// `count` models from consecutive seeds derived from `seed`.
pub fn corpus(seed: u64, count: usize, p: &CorpusParams) -> Vec<EpistemicModel> {
    (0..count as u64)
        .map(|i| random_model(seed.wrapping_mul(1_000_003).wrapping_add(i), p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        let p = CorpusParams::default();
        let a = corpus(7, 30, &p);
        assert_eq!(a, corpus(7, 30, &p));
        for m in &a {
            assert!(m.is_validated());
            assert!((2..=5).contains(&m.len()));
            assert!(m.sig().agents().len() <= 2 && m.sig().props().len() <= 2);
        }
        assert_ne!(a, corpus(8, 30, &p));
    }
}
