//! Gaifman distance, ℓ-neighbourhoods and ℓ-local r-equivalence.

use std::collections::VecDeque;

use super::games::{ef_fo, EfResult, GameError};
use super::structure::GenericStructure;

/// Name of the distinguished point in a neighbourhood.
pub const CENTRE: &str = "centre";

/// Gaifman adjacency: elements are adjacent when they co-occur in a tuple.
pub fn gaifman_graph(a: &GenericStructure) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); a.size()];
    for r in a.relations() {
        for t in r.tuples() {
            for (i, &x) in t.iter().enumerate() {
                for &y in &t[i + 1..] {
                    if x != y {
                        adj[x].push(y);
                        adj[y].push(x);
                    }
                }
            }
        }
    }
    for v in &mut adj {
        v.sort_unstable();
        v.dedup();
    }
    adj
}

/// Distances from `b`; `None` for unreachable elements.
pub fn gaifman_distances(a: &GenericStructure, b: usize) -> Vec<Option<usize>> {
    let adj = gaifman_graph(a);
    let mut dist = vec![None; a.size()];
    dist[b] = Some(0);
    let mut q = VecDeque::from([b]);
    while let Some(x) = q.pop_front() {
        let d = dist[x].unwrap();
        for &y in &adj[x] {
            if dist[y].is_none() {
                dist[y] = Some(d + 1);
                q.push_back(y);
            }
        }
    }
    dist
}

/// Induced substructure on the ℓ-ball around `b`, with `b` as the point
/// [`CENTRE`]. Existing points inside the ball are kept.
pub fn gaifman_neighborhood(a: &GenericStructure, b: usize, ell: usize) -> GenericStructure {
    let dist = gaifman_distances(a, b);
    let keep: Vec<bool> = dist.iter().map(|d| d.is_some_and(|d| d <= ell)).collect();
    let mut n = a.induced(&keep);
    n.set_point(CENTRE, n.element(a.name(b)).expect("centre kept"));
    n
}

/// `A↾N^ℓ(b), b ≡_r A'↾N^ℓ(b'), b'`, decided by the r-round game.
pub fn local_equiv(
    a: &GenericStructure,
    b: usize,
    a2: &GenericStructure,
    b2: usize,
    ell: usize,
    r: usize,
) -> Result<EfResult, GameError> {
    let n1 = gaifman_neighborhood(a, b, ell);
    let n2 = gaifman_neighborhood(a2, b2, ell);
    let c1 = n1.point(CENTRE).unwrap();
    let c2 = n2.point(CENTRE).unwrap();
    ef_fo(&n1, &[c1], &n2, &[c2], r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> GenericStructure {
        let els: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        GenericStructure::builder()
            .sort("V", els.clone())
            .relation("E", &["V", "V"], (1..n).map(|i| vec![els[i - 1].clone(), els[i].clone()]))
            .build()
            .unwrap()
    }

    #[test]
    fn balls() {
        let p = path(5);
        assert_eq!(gaifman_neighborhood(&p, 2, 0).size(), 1);
        assert_eq!(gaifman_neighborhood(&p, 2, 1).size(), 3);
        assert_eq!(gaifman_neighborhood(&p, 0, 2).size(), 3);
        let two = p.disjoint_union(&path(3), "'");
        assert_eq!(gaifman_neighborhood(&two, 0, 10).size(), 5);
        let prev: Vec<usize> = (0..6).map(|l| gaifman_neighborhood(&p, 1, l).size()).collect();
        assert!(prev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn local() {
        let (p5, p7) = (path(5), path(7));
        // the middle of long paths looks alike locally
        assert!(local_equiv(&p5, 2, &p7, 3, 1, 3).unwrap().duplicator_wins);
        assert!(!local_equiv(&p5, 2, &p7, 3, 3, 3).unwrap().duplicator_wins);
        assert!(!local_equiv(&p5, 0, &p7, 3, 1, 2).unwrap().duplicator_wins);
    }
}
