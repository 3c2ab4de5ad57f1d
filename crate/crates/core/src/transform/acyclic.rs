//! N-acyclicity of multi-agent S5 frames.

use crate::model::KripkeFrame;

/// No cyclic chain `w_0, …, w_{n-1}` (2 ≤ n ≤ N) of worlds with
/// `w_{i+1} ∈ [w_i]_{a_i}`, `w_{i+1} ≠ w_i` and `a_{i+1} ≠ a_i` (indices
/// mod n). Searched as closed walks over (world, last agent) pairs.
pub fn is_n_acyclic(frame: &KripkeFrame, n: usize) -> bool {
    assert!(n >= 2, "N must be at least 2");
    let na = frame.agents.len();
    let nw = frame.worlds.len();
    let class: Vec<Vec<_>> = (0..na).map(|a| (0..nw).map(|w| frame.class_of(a, w)).collect()).collect();
    for w0 in 0..nw {
        for a0 in 0..na {
            // layer[x][b]: can we stand at x, having just moved along agent b
            let mut layer = vec![vec![false; na]; nw];
            for v in class[a0][w0].iter().filter(|&v| v != w0) {
                layer[v][a0] = true;
            }
            for _ in 2..=n {
                let mut next = vec![vec![false; na]; nw];
                for x in 0..nw {
                    for b in 0..na {
                        if !layer[x][b] {
                            continue;
                        }
                        for c in (0..na).filter(|&c| c != b) {
                            for y in class[c][x].iter().filter(|&y| y != x) {
                                next[y][c] = true;
                            }
                        }
                    }
                }
                if (0..na).any(|b| b != a0 && next[w0][b]) {
                    return false;
                }
                layer = next;
            }
        }
    }
    true
}

/// Largest intersection of an `a`-class with a `b`-class, `a ≠ b`.
pub fn max_overlap(frame: &KripkeFrame) -> usize {
    let mut best = 0;
    for a in 0..frame.agents.len() {
        for b in 0..frame.agents.len() {
            if a == b {
                continue;
            }
            for &c in &frame.classes[a] {
                for &d in &frame.classes[b] {
                    best = best.max(c.intersect(d).len());
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn cycles() {
        assert!(!is_n_acyclic(&samples::two_cycle(), 2));
        let c4 = samples::alternating_cycle(2);
        assert!(is_n_acyclic(&c4, 3));
        assert!(!is_n_acyclic(&c4, 4));
        let c6 = samples::alternating_cycle(3);
        assert!(is_n_acyclic(&c6, 5));
        assert!(!is_n_acyclic(&c6, 6));
        assert!(!is_n_acyclic(&samples::three_cycle(), 3));
        assert!(is_n_acyclic(&samples::three_cycle(), 2));
        assert!(is_n_acyclic(&samples::three_cycle_unfolded(), 5));
        assert!(!is_n_acyclic(&samples::three_cycle_unfolded(), 6));
        assert!(is_n_acyclic(&samples::m0().kripke_companion(), 9));
        assert_eq!(max_overlap(&samples::two_cycle()), 2);
        assert_eq!(max_overlap(&c4), 1);
    }
}
