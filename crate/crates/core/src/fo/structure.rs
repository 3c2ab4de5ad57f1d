//! Finite many-sorted relational structures.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("duplicate sort `{0}`")]
    DuplicateSort(String),
    #[error("duplicate relation `{0}`")]
    DuplicateRelation(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("tuple {tuple:?} does not fit relation `{relation}`")]
    IllSorted { relation: String, tuple: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Extension {
    Unary(Vec<bool>),
    // row-major over global ids
    Binary { n: usize, bits: Vec<bool> },
    Sparse(HashSet<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    /// Sort index per argument position.
    pub sorts: Vec<usize>,
    tuples: Vec<Vec<usize>>,
    ext: Extension,
}

impl Relation {
    pub fn arity(&self) -> usize {
        self.sorts.len()
    }

    /// Sorted tuple list over global element ids.
    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    #[inline]
    pub fn holds(&self, args: &[usize]) -> bool {
        match &self.ext {
            Extension::Unary(v) => v[args[0]],
            Extension::Binary { n, bits } => bits[args[0] * n + args[1]],
            Extension::Sparse(set) => set.contains(args),
        }
    }
}

/// A finite structure with disjoint named sorts. Elements carry globally
/// unique names and dense global ids, sort by sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericStructure {
    sort_names: Vec<String>,
    // global id range per sort
    ranges: Vec<(usize, usize)>,
    names: Vec<String>,
    sort_of: Vec<usize>,
    relations: Vec<Relation>,
    points: BTreeMap<String, usize>,
}

/// Incremental construction.
#[derive(Clone, Debug, Default)]
pub struct StructureBuilder {
    sorts: Vec<(String, Vec<String>)>,
    relations: Vec<(String, Vec<String>, Vec<Vec<String>>)>,
    points: Vec<(String, String)>,
}

impl StructureBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sort(mut self, name: &str, elements: impl IntoIterator<Item = String>) -> Self {
        self.sorts.push((name.to_string(), elements.into_iter().collect()));
        self
    }

    pub fn relation(
        mut self,
        name: &str,
        sorts: &[&str],
        tuples: impl IntoIterator<Item = Vec<String>>,
    ) -> Self {
        self.relations.push((
            name.to_string(),
            sorts.iter().map(|s| s.to_string()).collect(),
            tuples.into_iter().collect(),
        ));
        self
    }

    pub fn point(mut self, name: &str, element: &str) -> Self {
        self.points.push((name.to_string(), element.to_string()));
        self
    }

    pub fn build(self) -> Result<GenericStructure, StructureError> {
        let mut sort_names = Vec::new();
        let mut ranges = Vec::new();
        let mut names = Vec::new();
        let mut sort_of = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for (si, (s, els)) in self.sorts.into_iter().enumerate() {
            if sort_names.contains(&s) {
                return Err(StructureError::DuplicateSort(s));
            }
            let start = names.len();
            for e in els {
                if index.insert(e.clone(), names.len()).is_some() {
                    return Err(StructureError::DuplicateElement(e));
                }
                names.push(e);
                sort_of.push(si);
            }
            ranges.push((start, names.len()));
            sort_names.push(s);
        }
        let mut seen = HashSet::new();
        let mut relations = Vec::new();
        for (name, sorts, tuples) in self.relations {
            if !seen.insert(name.clone()) {
                return Err(StructureError::DuplicateRelation(name));
            }
            let sorts: Vec<usize> = sorts
                .iter()
                .map(|s| {
                    sort_names
                        .iter()
                        .position(|x| x == s)
                        .ok_or_else(|| StructureError::UnknownSort(s.clone()))
                })
                .collect::<Result<_, _>>()?;
            let mut ids = Vec::with_capacity(tuples.len());
            for t in tuples {
                let tid: Vec<usize> = t
                    .iter()
                    .map(|e| {
                        index
                            .get(e)
                            .copied()
                            .ok_or_else(|| StructureError::UnknownElement(e.clone()))
                    })
                    .collect::<Result<_, _>>()?;
                if tid.len() != sorts.len() || tid.iter().zip(&sorts).any(|(&e, &s)| sort_of[e] != s) {
                    return Err(StructureError::IllSorted {
                        relation: name,
                        tuple: t,
                    });
                }
                ids.push(tid);
            }
            relations.push(make_relation(name, sorts, ids, names.len()));
        }
        let mut points = BTreeMap::new();
        for (p, e) in self.points {
            let id = *index.get(&e).ok_or(StructureError::UnknownElement(e))?;
            points.insert(p, id);
        }
        Ok(GenericStructure {
            sort_names,
            ranges,
            names,
            sort_of,
            relations,
            points,
        })
    }
}

fn make_relation(name: String, sorts: Vec<usize>, mut tuples: Vec<Vec<usize>>, n: usize) -> Relation {
    tuples.sort();
    tuples.dedup();
    let ext = match sorts.len() {
        1 => {
            let mut v = vec![false; n];
            for t in &tuples {
                v[t[0]] = true;
            }
            Extension::Unary(v)
        }
        2 if n <= 4096 => {
            let mut bits = vec![false; n * n];
            for t in &tuples {
                bits[t[0] * n + t[1]] = true;
            }
            Extension::Binary { n, bits }
        }
        _ => Extension::Sparse(tuples.iter().cloned().collect()),
    };
    Relation {
        name,
        sorts,
        tuples,
        ext,
    }
}

impl GenericStructure {
    pub fn builder() -> StructureBuilder {
        StructureBuilder::new()
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn sort_names(&self) -> &[String] {
        &self.sort_names
    }

    pub fn sort_index(&self, name: &str) -> Option<usize> {
        self.sort_names.iter().position(|s| s == name)
    }

    /// Global ids of one sort.
    pub fn sort_range(&self, sort: usize) -> std::ops::Range<usize> {
        self.ranges[sort].0..self.ranges[sort].1
    }

    pub fn sort_size(&self, sort: usize) -> usize {
        self.ranges[sort].1 - self.ranges[sort].0
    }

    pub fn sort_of(&self, e: usize) -> usize {
        self.sort_of[e]
    }

    pub fn name(&self, e: usize) -> &str {
        &self.names[e]
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn points(&self) -> &BTreeMap<String, usize> {
        &self.points
    }

    pub fn point(&self, name: &str) -> Option<usize> {
        self.points.get(name).copied()
    }

    /// Name (or rename) a distinguished element.
    pub fn set_point(&mut self, name: &str, e: usize) {
        assert!(e < self.size());
        self.points.insert(name.to_string(), e);
    }

    /// Copy with an extra (or replaced) unary relation on `sort`.
    pub fn with_unary(&self, name: &str, sort: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut out = self.clone();
        let tuples: Vec<Vec<usize>> = members.into_iter().map(|e| vec![e]).collect();
        debug_assert!(tuples.iter().all(|t| self.sort_of[t[0]] == sort));
        let rel = make_relation(name.to_string(), vec![sort], tuples, self.size());
        match out.relations.iter().position(|r| r.name == name) {
            Some(i) => out.relations[i] = rel,
            None => out.relations.push(rel),
        }
        out
    }

    /// Overwrite a unary relation's extension in place. Must exist.
    pub fn set_unary(&mut self, rel: usize, ext: &[bool]) {
        let r = &mut self.relations[rel];
        if let Extension::Unary(v) = &mut r.ext {
            v.copy_from_slice(ext);
        } else {
            panic!("relation `{}` is not unary", r.name);
        }
        r.tuples = ext
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(e, _)| vec![e])
            .collect();
    }

    /// Induced substructure on `keep` (global ids); sorts that lose all
    /// elements stay, empty. Points outside `keep` are dropped.
    pub fn induced(&self, keep: &[bool]) -> GenericStructure {
        let mut b = StructureBuilder::new();
        for (si, s) in self.sort_names.iter().enumerate() {
            b = b.sort(
                s,
                self.sort_range(si)
                    .filter(|&e| keep[e])
                    .map(|e| self.names[e].clone()),
            );
        }
        for r in &self.relations {
            let sorts: Vec<&str> = r.sorts.iter().map(|&s| self.sort_names[s].as_str()).collect();
            let tuples = r
                .tuples
                .iter()
                .filter(|t| t.iter().all(|&e| keep[e]))
                .map(|t| t.iter().map(|&e| self.names[e].clone()).collect());
            b = b.relation(&r.name, &sorts, tuples);
        }
        for (p, &e) in &self.points {
            if keep[e] {
                b = b.point(p, &self.names[e]);
            }
        }
        b.build().expect("substructure of a valid structure")
    }

    /// Disjoint union; right-hand names get `suffix`. Points come from the
    /// left operand only.
    pub fn disjoint_union(&self, other: &GenericStructure, suffix: &str) -> GenericStructure {
        let mut b = StructureBuilder::new();
        let mut sorts = self.sort_names.clone();
        for s in &other.sort_names {
            if !sorts.contains(s) {
                sorts.push(s.clone());
            }
        }
        let rn = |e: usize| format!("{}{suffix}", other.names[e]);
        for s in &sorts {
            let mut els = Vec::new();
            if let Some(i) = self.sort_index(s) {
                els.extend(self.sort_range(i).map(|e| self.names[e].clone()));
            }
            if let Some(i) = other.sort_index(s) {
                els.extend(other.sort_range(i).map(rn));
            }
            b = b.sort(s, els);
        }
        let mut rels: Vec<(String, Vec<String>, Vec<Vec<String>>)> = Vec::new();
        for (st, rename) in [(self, None), (other, Some(suffix))] {
            for r in &st.relations {
                let tuples: Vec<Vec<String>> = r
                    .tuples
                    .iter()
                    .map(|t| {
                        t.iter()
                            .map(|&e| match rename {
                                None => st.names[e].clone(),
                                Some(sfx) => format!("{}{sfx}", st.names[e]),
                            })
                            .collect()
                    })
                    .collect();
                match rels.iter_mut().find(|x| x.0 == r.name) {
                    Some(x) => x.2.extend(tuples),
                    None => rels.push((
                        r.name.clone(),
                        r.sorts.iter().map(|&s| st.sort_names[s].clone()).collect(),
                        tuples,
                    )),
                }
            }
        }
        for (n, s, t) in rels {
            let s: Vec<&str> = s.iter().map(String::as_str).collect();
            b = b.relation(&n, &s, t);
        }
        for (p, &e) in &self.points {
            b = b.point(p, &self.names[e]);
        }
        b.build().expect("disjoint union of valid structures")
    }

    pub fn to_json(&self) -> StructureJson {
        StructureJson {
            sorts: self
                .sort_names
                .iter()
                .enumerate()
                .map(|(i, s)| SortJson {
                    name: s.clone(),
                    elements: self.sort_range(i).map(|e| self.names[e].clone()).collect(),
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|r| RelationJson {
                    name: r.name.clone(),
                    sorts: r.sorts.iter().map(|&s| self.sort_names[s].clone()).collect(),
                    tuples: r
                        .tuples
                        .iter()
                        .map(|t| t.iter().map(|&e| self.names[e].clone()).collect())
                        .collect(),
                })
                .collect(),
            points: self
                .points
                .iter()
                .map(|(p, &e)| (p.clone(), self.names[e].clone()))
                .collect(),
        }
    }

    pub fn from_json(j: &StructureJson) -> Result<GenericStructure, StructureError> {
        let mut b = StructureBuilder::new();
        for s in &j.sorts {
            b = b.sort(&s.name, s.elements.iter().cloned());
        }
        for r in &j.relations {
            let sorts: Vec<&str> = r.sorts.iter().map(String::as_str).collect();
            b = b.relation(&r.name, &sorts, r.tuples.iter().cloned());
        }
        for (p, e) in &j.points {
            b = b.point(p, e);
        }
        b.build()
    }

    /// Is there a sort-, relation- and point-preserving bijection? Relations
    /// and sorts are matched by name.
    pub fn is_isomorphic(&self, other: &GenericStructure) -> bool {
        super::iso::isomorphic(self, other)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortJson {
    pub name: String,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationJson {
    pub name: String,
    pub sorts: Vec<String>,
    pub tuples: Vec<Vec<String>>,
}

/// Serialized form: sorts in order, relations with sort signatures,
/// distinguished points by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureJson {
    pub sorts: Vec<SortJson>,
    #[serde(default)]
    pub relations: Vec<RelationJson>,
    #[serde(default)]
    pub points: BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    fn path3() -> GenericStructure {
        GenericStructure::builder()
            .sort("V", s(&["a", "b", "c"]))
            .relation("R", &["V", "V"], [s(&["a", "b"]), s(&["b", "c"])])
            .point("x", "a")
            .build()
            .unwrap()
    }

    #[test]
    fn build_and_query() {
        let g = path3();
        let r = g.relation("R").unwrap();
        assert!(r.holds(&[0, 1]));
        assert!(!r.holds(&[1, 0]));
        assert_eq!(g.point("x"), Some(0));
        let j = g.to_json();
        assert_eq!(GenericStructure::from_json(&j).unwrap(), g);
    }

    #[test]
    fn errors() {
        let e = GenericStructure::builder()
            .sort("V", s(&["a"]))
            .sort("W", s(&["a"]))
            .build();
        assert_eq!(e, Err(StructureError::DuplicateElement("a".into())));
        let e = GenericStructure::builder()
            .sort("V", s(&["a"]))
            .sort("W", s(&["b"]))
            .relation("R", &["V", "V"], [s(&["a", "b"])])
            .build();
        assert!(matches!(e, Err(StructureError::IllSorted { .. })));
    }

    #[test]
    fn induced_and_union() {
        let g = path3();
        let sub = g.induced(&[true, true, false]);
        assert_eq!(sub.size(), 2);
        assert_eq!(sub.relation("R").unwrap().tuples().len(), 1);
        let u = g.disjoint_union(&g, "'");
        assert_eq!(u.size(), 6);
        assert_eq!(u.relation("R").unwrap().tuples().len(), 4);
        assert!(g.disjoint_union(&sub, "'").is_isomorphic(&g.disjoint_union(&sub, "''")));
        // the point stays with the left operand
        assert!(!sub.disjoint_union(&g, "'").is_isomorphic(&g.disjoint_union(&sub, "'")));
        assert!(!g.is_isomorphic(&sub));
    }
}
