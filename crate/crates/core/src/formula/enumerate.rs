//! Exhaustive enumeration of small core formulas.

use thiserror::Error;

use super::{Formula, Signature};

/// Default ceiling on the number of formulas materialised at once.
pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("enumeration would produce {count} formulas (cap {cap})")]
    CapExceeded { count: u128, cap: u128 },
}

/// Number of core formulas with at most `max_nodes` nodes and modal depth at
/// most `max_depth`. Saturates at `u128::MAX`.
pub fn count_formulas(sig: &Signature, max_depth: usize, max_nodes: usize) -> u128 {
    let table = count_table(sig, max_depth, max_nodes);
    (1..=max_nodes).fold(0u128, |acc, n| acc.saturating_add(table[max_depth][n]))
}

// table[d][n] = number of formulas with exactly n nodes and depth <= d.
fn count_table(sig: &Signature, max_depth: usize, max_nodes: usize) -> Vec<Vec<u128>> {
    let leaves = sig.props().len() as u128 + 1;
    let agents = sig.agents().len() as u128;
    let mut t = vec![vec![0u128; max_nodes + 1]; max_depth + 1];
    for d in 0..=max_depth {
        for n in 1..=max_nodes {
            let mut c = if n == 1 { leaves } else { 0 };
            if n >= 3 {
                for i in 1..n - 1 {
                    let pair = t[d][i].saturating_mul(t[d][n - 1 - i]);
                    c = c.saturating_add(pair.saturating_mul(3));
                }
            }
            if n >= 2 && d >= 1 {
                c = c.saturating_add(t[d - 1][n - 1].saturating_mul(2 * agents));
            }
            t[d][n] = c;
        }
    }
    t
}

/// All core formulas within the bounds, ordered by node count and then by
/// the derived `Ord` of [`Formula`]. Fails without allocating if the count
/// exceeds `cap`.
pub fn enumerate_formulas(
    sig: &Signature,
    max_depth: usize,
    max_nodes: usize,
    cap: u128,
) -> Result<Vec<Formula>, EnumerationError> {
    let count = count_formulas(sig, max_depth, max_nodes);
    if count > cap {
        return Err(EnumerationError::CapExceeded { count, cap });
    }
    // by[d][n]: exactly n nodes, depth <= d
    let mut by: Vec<Vec<Vec<Formula>>> = vec![vec![Vec::new(); max_nodes + 1]; max_depth + 1];
    for d in 0..=max_depth {
        for n in 1..=max_nodes {
            let mut level = Vec::new();
            if n == 1 {
                level.extend(sig.props().iter().map(|p| Formula::Atom(p.clone())));
                level.push(Formula::Bottom);
            }
            if n >= 3 {
                for i in 1..n - 1 {
                    let j = n - 1 - i;
                    for a in &by[d][i] {
                        for b in &by[d][j] {
                            level.push(Formula::and(a.clone(), b.clone()));
                            level.push(Formula::implies(a.clone(), b.clone()));
                            level.push(Formula::idisj(a.clone(), b.clone()));
                        }
                    }
                }
            }
            if n >= 2 && d >= 1 {
                for ag in sig.agents() {
                    for a in &by[d - 1][n - 1] {
                        level.push(Formula::boxed(ag.clone(), a.clone()));
                        level.push(Formula::wbox(ag.clone(), a.clone()));
                    }
                }
            }
            level.sort();
            by[d][n] = level;
        }
    }
    let mut top = std::mem::take(&mut by[max_depth]);
    Ok(top.drain(..).flatten().collect())
}
