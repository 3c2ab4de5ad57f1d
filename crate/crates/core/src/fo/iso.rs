//! Isomorphism test by colour refinement with individualisation.

use std::collections::HashMap;

use super::structure::GenericStructure;

type Colours = (Vec<usize>, Vec<usize>);

struct Pair<'a> {
    a: &'a GenericStructure,
    b: &'a GenericStructure,
    // relation index in b for each relation of a
    rel_map: Vec<usize>,
    // incidence: element -> (relation, position, tuple index)
    inc_a: Vec<Vec<(usize, usize, usize)>>,
    inc_b: Vec<Vec<(usize, usize, usize)>>,
}

fn incidence(s: &GenericStructure, order: &[usize]) -> Vec<Vec<(usize, usize, usize)>> {
    let mut inc = vec![Vec::new(); s.size()];
    for (ri, &r) in order.iter().enumerate() {
        for (ti, t) in s.relations()[r].tuples().iter().enumerate() {
            for (pos, &e) in t.iter().enumerate() {
                inc[e].push((ri, pos, ti));
            }
        }
    }
    inc
}

pub(crate) fn isomorphic(a: &GenericStructure, b: &GenericStructure) -> bool {
    if a.size() != b.size() || a.sort_names().len() != b.sort_names().len() {
        return false;
    }
    let mut sort_b = Vec::new();
    for (i, s) in a.sort_names().iter().enumerate() {
        match b.sort_index(s) {
            Some(j) if b.sort_size(j) == a.sort_size(i) => sort_b.push(j),
            _ => return false,
        }
    }
    if a.relations().len() != b.relations().len() {
        return false;
    }
    let mut rel_map = Vec::new();
    for r in a.relations() {
        match b.relation_index(&r.name) {
            Some(j) => {
                let rb = &b.relations()[j];
                let same_sorts = r.sorts.iter().map(|&s| sort_b[s]).eq(rb.sorts.iter().copied());
                if !same_sorts || rb.tuples().len() != r.tuples().len() {
                    return false;
                }
                rel_map.push(j);
            }
            None => return false,
        }
    }
    if a.points().keys().ne(b.points().keys()) {
        return false;
    }
    let order_a: Vec<usize> = (0..a.relations().len()).collect();
    let p = Pair {
        a,
        b,
        inc_a: incidence(a, &order_a),
        inc_b: incidence(b, &rel_map),
        rel_map,
    };
    // initial colours: sort name and the points naming the element
    let init = |s: &GenericStructure, e: usize| -> (String, Vec<String>) {
        let pts = s
            .points()
            .iter()
            .filter(|(_, &x)| x == e)
            .map(|(n, _)| n.clone())
            .collect();
        (s.sort_names()[s.sort_of(e)].clone(), pts)
    };
    let mut ids: HashMap<(String, Vec<String>), usize> = HashMap::new();
    let mut intern = |k: (String, Vec<String>)| {
        let n = ids.len();
        *ids.entry(k).or_insert(n)
    };
    let ca: Vec<usize> = (0..a.size()).map(|e| intern(init(a, e))).collect();
    let cb: Vec<usize> = (0..b.size()).map(|e| intern(init(b, e))).collect();
    search(&p, (ca, cb))
}

fn refine(p: &Pair, (mut ca, mut cb): Colours) -> Option<Colours> {
    loop {
        let mut ids: HashMap<(usize, Vec<(usize, usize, Vec<usize>)>), usize> = HashMap::new();
        let mut sig = |s: &GenericStructure, inc: &[Vec<(usize, usize, usize)>], rels: &dyn Fn(usize) -> usize, col: &[usize], e: usize| {
            let mut v: Vec<(usize, usize, Vec<usize>)> = inc[e]
                .iter()
                .map(|&(ri, pos, ti)| {
                    let t = &s.relations()[rels(ri)].tuples()[ti];
                    (ri, pos, t.iter().map(|&x| col[x]).collect())
                })
                .collect();
            v.sort();
            let key = (col[e], v);
            let n = ids.len();
            *ids.entry(key).or_insert(n)
        };
        let na: Vec<usize> = (0..p.a.size())
            .map(|e| sig(p.a, &p.inc_a, &|r| r, &ca, e))
            .collect();
        let nb: Vec<usize> = (0..p.b.size())
            .map(|e| sig(p.b, &p.inc_b, &|r| p.rel_map[r], &cb, e))
            .collect();
        let hist = |c: &[usize]| {
            let mut h = vec![0usize; ids.len()];
            for &x in c {
                h[x] += 1;
            }
            h
        };
        if hist(&na) != hist(&nb) {
            return None;
        }
        let classes = |c: &[usize]| {
            let mut v = c.to_vec();
            v.sort_unstable();
            v.dedup();
            v.len()
        };
        let stable = classes(&na) == classes(&ca);
        ca = na;
        cb = nb;
        if stable {
            return Some((ca, cb));
        }
    }
}

fn search(p: &Pair, cols: Colours) -> bool {
    let Some((ca, cb)) = refine(p, cols) else {
        return false;
    };
    let mut count: HashMap<usize, usize> = HashMap::new();
    for &c in &ca {
        *count.entry(c).or_default() += 1;
    }
    let pick = (0..p.a.size())
        .filter(|&e| count[&ca[e]] > 1)
        .min_by_key(|&e| (count[&ca[e]], e));
    let Some(x) = pick else {
        return check(p, &ca, &cb);
    };
    let fresh = ca.iter().chain(&cb).max().unwrap() + 1;
    for y in (0..p.b.size()).filter(|&y| cb[y] == ca[x]) {
        let mut na = ca.clone();
        let mut nb = cb.clone();
        na[x] = fresh;
        nb[y] = fresh;
        if search(p, (na, nb)) {
            return true;
        }
    }
    false
}

// Discrete colourings: verify the induced bijection.
fn check(p: &Pair, ca: &[usize], cb: &[usize]) -> bool {
    let mut by_colour = HashMap::new();
    for (y, &c) in cb.iter().enumerate() {
        by_colour.insert(c, y);
    }
    let f: Vec<usize> = ca.iter().map(|c| by_colour[c]).collect();
    for (ri, r) in p.a.relations().iter().enumerate() {
        let rb = &p.b.relations()[p.rel_map[ri]];
        for t in r.tuples() {
            let img: Vec<usize> = t.iter().map(|&e| f[e]).collect();
            if !rb.holds(&img) {
                return false;
            }
        }
    }
    p.a
        .points()
        .iter()
        .all(|(n, &e)| p.b.point(n) == Some(f[e]))
}

#[cfg(test)]
mod tests {
    use crate::fo::GenericStructure;

    fn cycle(n: usize, name: &str) -> GenericStructure {
        let els: Vec<String> = (0..n).map(|i| format!("{name}{i}")).collect();
        let edges: Vec<Vec<String>> = (0..n)
            .map(|i| vec![els[i].clone(), els[(i + 1) % n].clone()])
            .collect();
        GenericStructure::builder()
            .sort("V", els)
            .relation("E", &["V", "V"], edges)
            .build()
            .unwrap()
    }

    #[test]
    fn regular_graphs() {
        // C6 vs C3 + C3: same degrees, not isomorphic
        let c6 = cycle(6, "a");
        let c33 = cycle(3, "b").disjoint_union(&cycle(3, "c"), "");
        assert!(!c6.is_isomorphic(&c33));
        assert!(c6.is_isomorphic(&cycle(6, "z")));
        assert!(c33.is_isomorphic(&cycle(3, "x").disjoint_union(&cycle(3, "y"), "")));
    }
}
