//! Small hand-built models used throughout the tests and the CLI docs.

use crate::formula::Signature;
use crate::model::{DownwardFamily, EpistemicModel, InfoState, KripkeFrame};

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn two_worlds(gens: &[&[usize]]) -> EpistemicModel {
    let fam = DownwardFamily::from_generators(gens.iter().map(|g| InfoState::from_worlds(g.iter().copied())));
    EpistemicModel::new(
        Signature::new(["a"], ["p"]),
        vec!["u".into(), "v".into()],
        vec![InfoState::singleton(0)],
        vec![vec![fam.clone(), fam]],
    )
    .expect("valid")
}

/// `u, v` with `p` true at `u`; `Σ_a` generated by `{u,v}`.
pub fn m0() -> EpistemicModel {
    two_worlds(&[&[0, 1]])
}

/// `u, v` with `p` true at `u`; `Σ_a` generated by `{u}` and `{v}`.
pub fn m1() -> EpistemicModel {
    two_worlds(&[&[0], &[1]])
}

/// Three worlds with `Σ_a(w_i)` generated by `{w1}, {w2}` everywhere.
/// Violates factivity at `w3`; returned unvalidated.
pub fn three_world_illustration() -> EpistemicModel {
    let fam = DownwardFamily::from_generators([InfoState::singleton(0), InfoState::singleton(1)]);
    EpistemicModel::new_unchecked(
        Signature::new(["a"], Vec::<String>::new()),
        vec!["w1".into(), "w2".into(), "w3".into()],
        vec![],
        vec![vec![fam; 3]],
    )
}

/// Frame on `n` worlds where agent `k` links the pairs listed in
/// `links[k]`; every other world is alone in its class.
pub fn pair_frame(n: usize, agents: &[&str], links: &[&[(usize, usize)]]) -> KripkeFrame {
    let classes = links
        .iter()
        .map(|pairs| {
            let mut used = InfoState::EMPTY;
            let mut cls: Vec<InfoState> = pairs
                .iter()
                .map(|&(x, y)| {
                    used.insert(x);
                    used.insert(y);
                    InfoState::from_worlds([x, y])
                })
                .collect();
            cls.extend(InfoState::full(n).minus(used).iter().map(InfoState::singleton));
            cls
        })
        .collect();
    KripkeFrame::new(
        names("x", n),
        agents.iter().map(|a| a.to_string()).collect(),
        classes,
    )
}

/// Two worlds sharing a red and a blue class.
pub fn two_cycle() -> KripkeFrame {
    pair_frame(2, &["blue", "red"], &[&[(0, 1)], &[(0, 1)]])
}

/// `2k` worlds on a cycle whose edges alternate red and blue.
pub fn alternating_cycle(k: usize) -> KripkeFrame {
    let n = 2 * k;
    let red: Vec<(usize, usize)> = (0..k).map(|i| (2 * i, 2 * i + 1)).collect();
    let blue: Vec<(usize, usize)> = (0..k).map(|i| (2 * i + 1, (2 * i + 2) % n)).collect();
    pair_frame(n, &["blue", "red"], &[&blue, &red])
}

/// Three worlds pairwise linked by three different agents.
pub fn three_cycle() -> KripkeFrame {
    pair_frame(
        3,
        &["black", "blue", "red"],
        &[&[(2, 0)], &[(1, 2)], &[(0, 1)]],
    )
}

/// Six worlds on a cycle coloured red, blue, black, red, blue, black.
pub fn three_cycle_unfolded() -> KripkeFrame {
    pair_frame(
        6,
        &["black", "blue", "red"],
        &[&[(2, 3), (5, 0)], &[(1, 2), (4, 5)], &[(0, 1), (3, 4)]],
    )
}
