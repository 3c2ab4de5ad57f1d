//! Deciding the game, with a winning play for I on negative answers.

use serde::Serialize;

use super::{is_sub, Depth, Juxt};
use crate::model::{EpistemicModel, InfoState};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Position {
    World { left: String, right: String },
    State { left: Vec<String>, right: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlayStep {
    pub mover: &'static str,
    pub choice: String,
    pub position: Option<Position>,
}

/// A play won by I against II's canonical replies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Play {
    pub start: Position,
    pub steps: Vec<PlayStep>,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameResult {
    pub bisimilar: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Play>,
}

/// Does II win the `depth`-round game from `(w, w')`?
pub fn bisim_check(
    m: &EpistemicModel,
    w: usize,
    m2: &EpistemicModel,
    w2: usize,
    depth: Depth,
) -> GameResult {
    let j = Juxt::new(m, Some(m2));
    let (levels, _) = j.levels(depth);
    let top = levels.len() - 1;
    let (x, y) = (w, j.split + w2);
    if levels[top][x] == levels[top][y] {
        return GameResult {
            bisimilar: true,
            witness: None,
        };
    }
    let mut w = Witness {
        j: &j,
        levels: &levels,
        steps: Vec::new(),
    };
    let outcome = w.world(x, y, top);
    GameResult {
        bisimilar: false,
        witness: Some(Play {
            start: w.world_pos(x, y),
            steps: w.steps,
            outcome,
        }),
    }
}

/// State positions: every world of `s` has a partner in `s'` and back.
pub fn bisim_check_states(
    m: &EpistemicModel,
    s: InfoState,
    m2: &EpistemicModel,
    s2: InfoState,
    depth: Depth,
) -> GameResult {
    let j = Juxt::new(m, Some(m2));
    let (levels, _) = j.levels(depth);
    let top = levels.len() - 1;
    let gs: Vec<usize> = s.iter().collect();
    let gs2: Vec<usize> = s2.iter().map(|v| v + j.split).collect();
    let mut w = Witness {
        j: &j,
        levels: &levels,
        steps: Vec::new(),
    };
    let start = w.state_pos(&gs, &gs2);
    match w.state(&gs, &gs2, top) {
        None => GameResult {
            bisimilar: true,
            witness: None,
        },
        Some(outcome) => GameResult {
            bisimilar: false,
            witness: Some(Play {
                start,
                steps: w.steps,
                outcome,
            }),
        },
    }
}

struct Witness<'a, 'b> {
    j: &'a Juxt<'b>,
    levels: &'a [Vec<usize>],
    steps: Vec<PlayStep>,
}

impl Witness<'_, '_> {
    fn names(&self, xs: &[usize]) -> Vec<String> {
        xs.iter().map(|&x| self.j.name(x).1).collect()
    }

    fn world_pos(&self, x: usize, y: usize) -> Position {
        let (l, r) = if x < self.j.split { (x, y) } else { (y, x) };
        Position::World {
            left: self.j.name(l).1,
            right: self.j.name(r).1,
        }
    }

    fn state_pos(&self, s: &[usize], t: &[usize]) -> Position {
        let left_first = s.first().or(t.first()).map_or(true, |&x| {
            (x < self.j.split) == s.first().is_some()
        });
        let (l, r) = if left_first { (s, t) } else { (t, s) };
        Position::State {
            left: self.names(l),
            right: self.names(r),
        }
    }

    fn step(&mut self, mover: &'static str, choice: String, position: Option<Position>) {
        self.steps.push(PlayStep {
            mover,
            choice,
            position,
        });
    }

    // I wins the state position (s, t) within `level` rounds? Returns the
    // outcome if so. `s` and `t` live on opposite sides.
    fn state(&mut self, s: &[usize], t: &[usize], level: usize) -> Option<String> {
        let col = &self.levels[level];
        for (a, b) in [(s, t), (t, s)] {
            if let Some(&x) = a.iter().find(|&&x| !b.iter().any(|&y| col[y] == col[x])) {
                let (side, name) = self.j.name(x);
                self.step("I", format!("world {name} ({side})"), None);
                let Some(&y) = b.first() else {
                    return Some("II cannot answer from the empty state".into());
                };
                let (side2, name2) = self.j.name(y);
                let pos = self.world_pos(x, y);
                self.step("II", format!("world {name2} ({side2})"), Some(pos));
                return Some(self.world(x, y, level));
            }
        }
        None
    }

    // (x, y) differ at `level`; play it out.
    fn world(&mut self, x: usize, y: usize, level: usize) -> String {
        let first = (0..=level)
            .find(|&k| self.levels[k][x] != self.levels[k][y])
            .expect("positions differ");
        if first == 0 {
            let p = (0..self.j.sig.props().len())
                .find(|&i| self.j.ptype[x][i] != self.j.ptype[y][i])
                .expect("atomic types differ");
            return format!("atomic disagreement on {}", self.j.sig.props()[p]);
        }
        let col = &self.levels[first - 1];
        for a in 0..self.j.sig.agents().len() {
            for (u, v) in [(x, y), (y, x)] {
                let pu = self.j.profile(col, a, u);
                let pv = self.j.profile(col, a, v);
                let Some(bad) = pu.iter().find(|c| !pv.iter().any(|d| is_sub(c, d))) else {
                    continue;
                };
                let g: Vec<usize> = self.j.gens[a][u]
                    .iter()
                    .find(|g| {
                        let mut c: Vec<usize> = g.iter().map(|&z| col[z]).collect();
                        c.sort_unstable();
                        c.dedup();
                        c == *bad
                    })
                    .cloned()
                    .expect("profile comes from a generator");
                let agent = self.j.sig.agents()[a].clone();
                let (side, _) = self.j.name(u);
                self.step(
                    "I",
                    format!("agent {agent}, state {:?} ({side})", self.names(&g)),
                    None,
                );
                // II's reply: the best-overlapping generator, cut down to the
                // colours I offered.
                let reply: Vec<usize> = self.j.gens[a][v]
                    .iter()
                    .map(|h| {
                        h.iter()
                            .copied()
                            .filter(|&z| bad.contains(&col[z]))
                            .collect::<Vec<usize>>()
                    })
                    .max_by_key(|h| {
                        let mut c: Vec<usize> = h.iter().map(|&z| col[z]).collect();
                        c.sort_unstable();
                        c.dedup();
                        c.len()
                    })
                    .unwrap_or_default();
                let (side2, _) = self.j.name(v);
                let pos = self.state_pos(&g, &reply);
                self.step(
                    "II",
                    format!("state {:?} ({side2})", self.names(&reply)),
                    Some(pos),
                );
                return self
                    .state(&g, &reply, first - 1)
                    .expect("reply misses a colour");
            }
        }
        unreachable!("refinement separated the worlds for a reason")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DownwardFamily;
    use crate::samples;

    // Game over all members of Σ, straight from the rules.
    fn naive(m: &EpistemicModel, w: usize, m2: &EpistemicModel, w2: usize, k: usize) -> bool {
        let sig = m.sig().merge(m2.sig());
        if sig
            .props()
            .iter()
            .any(|p| m.valuation(p).contains(w) != m2.valuation(p).contains(w2))
        {
            return false;
        }
        if k == 0 {
            return true;
        }
        let states_ok = |s: InfoState, t: InfoState| {
            s.iter().all(|x| t.iter().any(|y| naive(m, x, m2, y, k - 1)))
                && t.iter().all(|y| s.iter().any(|x| naive(m, x, m2, y, k - 1)))
        };
        sig.agents().iter().all(|a| {
            let f: DownwardFamily = m.inquisitive_state(a, w);
            let f2 = m2.inquisitive_state(a, w2);
            let (ms, ms2) = (f.members(), f2.members());
            ms.iter().all(|&s| ms2.iter().any(|&t| states_ok(s, t)))
                && ms2.iter().all(|&t| ms.iter().any(|&s| states_ok(s, t)))
        })
    }

    #[test]
    fn m0_vs_m1() {
        let (m0, m1) = (samples::m0(), samples::m1());
        assert!(bisim_check(&m0, 0, &m1, 0, Some(0)).bisimilar);
        let r = bisim_check(&m0, 0, &m1, 0, Some(1));
        assert!(!r.bisimilar);
        let play = r.witness.unwrap();
        assert_eq!(play.steps[0].mover, "I");
        assert!(play.steps[0].choice.contains("[\"u\", \"v\"]"));
        assert!(play.outcome.contains("atomic disagreement"));
        assert!(bisim_check(&m1, 0, &m1, 0, None).bisimilar);
    }

    #[test]
    fn agrees_with_naive_game() {
        let models = [samples::m0(), samples::m1()];
        for m in &models {
            for m2 in &models {
                for w in 0..2 {
                    for w2 in 0..2 {
                        for k in 0..3 {
                            assert_eq!(
                                bisim_check(m, w, m2, w2, Some(k)).bisimilar,
                                naive(m, w, m2, w2, k)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn state_positions() {
        let m1 = samples::m1();
        let uv = InfoState::from_worlds([0, 1]);
        let u = InfoState::singleton(0);
        assert!(bisim_check_states(&m1, uv, &m1, uv, None).bisimilar);
        let r = bisim_check_states(&m1, uv, &m1, u, None);
        assert!(!r.bisimilar);
        assert!(r.witness.unwrap().outcome.contains("atomic"));
        let r = bisim_check_states(&m1, u, &m1, InfoState::EMPTY, Some(0));
        assert!(r.witness.unwrap().outcome.contains("empty"));
        assert!(bisim_check_states(&m1, InfoState::EMPTY, &m1, InfoState::EMPTY, Some(2)).bisimilar);
    }
}
