//! Tarskian evaluation. Formulas are compiled against a structure first:
//! variables become slots, relation and sort names become indices, and
//! sorting is checked once.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::formula::FoFormula;
use super::structure::GenericStructure;

/// Default limit on the size of a sort that set quantifiers range over.
pub const DEFAULT_SET_CAP: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{0}` applied to the wrong number of arguments")]
    Arity(String),
    #[error("ill-sorted use of `{0}`")]
    IllSorted(String),
    #[error("set quantifier over sort `{sort}` of size {size} exceeds the cap {cap}")]
    SetCap { sort: String, size: usize, cap: usize },
}

/// Value of a variable: an element (global id) or a subset of one sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Elem(usize),
    /// Sort index and membership over that sort's elements in order.
    Set(usize, u128),
}

pub type Env = BTreeMap<String, Value>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Elem(usize),
    Set(usize),
}

#[derive(Clone, Debug)]
enum C {
    True,
    False,
    Rel(usize, Vec<usize>),
    Eq(usize, usize),
    Mem(usize, usize, usize),
    Not(Box<C>),
    And(Vec<C>),
    Or(Vec<C>),
    Implies(Box<C>, Box<C>),
    Iff(Box<C>, Box<C>),
    Exists(usize, usize, usize, Box<C>),
    Forall(usize, usize, usize, Box<C>),
    ExistsSet(usize, usize, Box<C>),
    ForallSet(usize, usize, Box<C>),
}

/// A formula compiled against one structure's vocabulary. It may be run on
/// any structure with the same sort layout and relation order, e.g. after
/// [`GenericStructure::set_unary`].
#[derive(Clone, Debug)]
pub struct Compiled {
    root: C,
    slots: usize,
    free: Vec<(String, VarKind)>,
}

struct Ctx<'a> {
    a: &'a GenericStructure,
    scope: Vec<(String, usize, VarKind)>,
    slots: usize,
    set_cap: usize,
}

impl Ctx<'_> {
    fn lookup(&self, v: &str) -> Result<(usize, VarKind), FoError> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _, _)| n == v)
            .map(|&(_, s, k)| (s, k))
            .ok_or_else(|| FoError::Unbound(v.to_string()))
    }

    fn elem(&self, v: &str) -> Result<(usize, usize), FoError> {
        match self.lookup(v)? {
            (s, VarKind::Elem(sort)) => Ok((s, sort)),
            _ => Err(FoError::IllSorted(v.to_string())),
        }
    }

    fn sort(&self, name: &str) -> Result<usize, FoError> {
        self.a
            .sort_index(name)
            .ok_or_else(|| FoError::UnknownSort(name.to_string()))
    }

    fn bind<T>(
        &mut self,
        v: &str,
        kind: VarKind,
        body: &FoFormula,
        k: impl FnOnce(usize, C) -> T,
    ) -> Result<T, FoError> {
        let slot = self.slots;
        self.slots += 1;
        self.scope.push((v.to_string(), slot, kind));
        let c = self.compile(body);
        self.scope.pop();
        Ok(k(slot, c?))
    }

    fn compile(&mut self, f: &FoFormula) -> Result<C, FoError> {
        Ok(match f {
            FoFormula::True => C::True,
            FoFormula::False => C::False,
            FoFormula::Rel(r, args) => {
                let ri = self
                    .a
                    .relation_index(r)
                    .ok_or_else(|| FoError::UnknownRelation(r.clone()))?;
                let rel = &self.a.relations()[ri];
                if rel.arity() != args.len() {
                    return Err(FoError::Arity(r.clone()));
                }
                let mut slots = Vec::with_capacity(args.len());
                for (arg, &want) in args.iter().zip(&rel.sorts) {
                    let (s, sort) = self.elem(arg)?;
                    if sort != want {
                        return Err(FoError::IllSorted(arg.clone()));
                    }
                    slots.push(s);
                }
                C::Rel(ri, slots)
            }
            FoFormula::Eq(x, y) => {
                let (sx, kx) = self.elem(x)?;
                let (sy, ky) = self.elem(y)?;
                if kx != ky {
                    return Err(FoError::IllSorted(format!("{x} = {y}")));
                }
                C::Eq(sx, sy)
            }
            FoFormula::Mem(x, set) => {
                let (sx, kx) = self.elem(x)?;
                match self.lookup(set)? {
                    (ss, VarKind::Set(sort)) if sort == kx => {
                        C::Mem(sx, ss, self.a.sort_range(sort).start)
                    }
                    _ => return Err(FoError::IllSorted(set.clone())),
                }
            }
            FoFormula::Not(g) => C::Not(Box::new(self.compile(g)?)),
            FoFormula::And(fs) => C::And(fs.iter().map(|g| self.compile(g)).collect::<Result<_, _>>()?),
            FoFormula::Or(fs) => C::Or(fs.iter().map(|g| self.compile(g)).collect::<Result<_, _>>()?),
            FoFormula::Implies(a, b) => C::Implies(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            FoFormula::Iff(a, b) => C::Iff(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            FoFormula::Exists(v, s, body) | FoFormula::Forall(v, s, body) => {
                let sort = self.sort(s)?;
                let r = self.a.sort_range(sort);
                let ex = matches!(f, FoFormula::Exists(..));
                self.bind(v, VarKind::Elem(sort), body, |slot, c| {
                    if ex {
                        C::Exists(slot, r.start, r.end, Box::new(c))
                    } else {
                        C::Forall(slot, r.start, r.end, Box::new(c))
                    }
                })?
            }
            FoFormula::ExistsSet(v, s, body) | FoFormula::ForallSet(v, s, body) => {
                let sort = self.sort(s)?;
                let size = self.a.sort_size(sort);
                if size > self.set_cap || size > 64 {
                    return Err(FoError::SetCap {
                        sort: s.clone(),
                        size,
                        cap: self.set_cap.min(64),
                    });
                }
                let ex = matches!(f, FoFormula::ExistsSet(..));
                self.bind(v, VarKind::Set(sort), body, |slot, c| {
                    if ex {
                        C::ExistsSet(slot, size, Box::new(c))
                    } else {
                        C::ForallSet(slot, size, Box::new(c))
                    }
                })?
            }
        })
    }
}

impl Compiled {
    /// Compile `f` with the given free variables (in slot order).
    pub fn new(
        a: &GenericStructure,
        f: &FoFormula,
        free: &[(&str, VarKind)],
        set_cap: usize,
    ) -> Result<Compiled, FoError> {
        let mut ctx = Ctx {
            a,
            scope: free
                .iter()
                .enumerate()
                .map(|(i, &(n, k))| (n.to_string(), i, k))
                .collect(),
            slots: free.len(),
            set_cap,
        };
        let root = ctx.compile(f)?;
        Ok(Compiled {
            root,
            slots: ctx.slots,
            free: free.iter().map(|&(n, k)| (n.to_string(), k)).collect(),
        })
    }

    pub fn free(&self) -> &[(String, VarKind)] {
        &self.free
    }

    /// Evaluate with the free variables bound to `args` (element ids, or
    /// set masks over the sort).
    pub fn eval(&self, a: &GenericStructure, args: &[u128]) -> bool {
        let mut slots = vec![0u128; self.slots];
        slots[..args.len()].copy_from_slice(args);
        run(a, &self.root, &mut slots)
    }
}

fn run(a: &GenericStructure, c: &C, s: &mut [u128]) -> bool {
    match c {
        C::True => true,
        C::False => false,
        C::Rel(r, args) => {
            let mut buf = [0usize; 8];
            if args.len() <= 8 {
                for (i, &x) in args.iter().enumerate() {
                    buf[i] = s[x] as usize;
                }
                a.relations()[*r].holds(&buf[..args.len()])
            } else {
                let v: Vec<usize> = args.iter().map(|&x| s[x] as usize).collect();
                a.relations()[*r].holds(&v)
            }
        }
        C::Eq(x, y) => s[*x] == s[*y],
        C::Mem(x, set, start) => s[*set] >> (s[*x] as usize - start) & 1 == 1,
        C::Not(g) => !run(a, g, s),
        C::And(gs) => gs.iter().all(|g| run(a, g, s)),
        C::Or(gs) => gs.iter().any(|g| run(a, g, s)),
        C::Implies(x, y) => !run(a, x, s) || run(a, y, s),
        C::Iff(x, y) => run(a, x, s) == run(a, y, s),
        C::Exists(v, lo, hi, g) => (*lo..*hi).any(|e| {
            s[*v] = e as u128;
            run(a, g, s)
        }),
        C::Forall(v, lo, hi, g) => (*lo..*hi).all(|e| {
            s[*v] = e as u128;
            run(a, g, s)
        }),
        C::ExistsSet(v, n, g) => (0..1u128 << n).any(|m| {
            s[*v] = m;
            run(a, g, s)
        }),
        C::ForallSet(v, n, g) => (0..1u128 << n).all(|m| {
            s[*v] = m;
            run(a, g, s)
        }),
    }
}

/// Evaluate `f` under `env`, which must bind every free variable.
pub fn eval_fo(a: &GenericStructure, f: &FoFormula, env: &Env) -> Result<bool, FoError> {
    eval_fo_capped(a, f, env, DEFAULT_SET_CAP)
}

pub fn eval_fo_capped(
    a: &GenericStructure,
    f: &FoFormula,
    env: &Env,
    set_cap: usize,
) -> Result<bool, FoError> {
    let mut free = Vec::new();
    let mut args = Vec::new();
    let free_vars = f.free_vars();
    for v in &free_vars {
        match env.get(v) {
            None => return Err(FoError::Unbound(v.clone())),
            Some(Value::Elem(e)) => {
                if *e >= a.size() {
                    return Err(FoError::IllSorted(v.clone()));
                }
                free.push((v.as_str(), VarKind::Elem(a.sort_of(*e))));
                args.push(*e as u128);
            }
            Some(Value::Set(sort, m)) => {
                free.push((v.as_str(), VarKind::Set(*sort)));
                args.push(*m);
            }
        }
    }
    let c = Compiled::new(a, f, &free, set_cap)?;
    Ok(c.eval(a, &args))
}

/// Build an environment from element names.
pub fn env_of(a: &GenericStructure, pairs: &[(&str, &str)]) -> Result<Env, FoError> {
    let index: HashMap<&str, usize> = (0..a.size()).map(|e| (a.name(e), e)).collect();
    pairs
        .iter()
        .map(|&(v, e)| {
            index
                .get(e)
                .map(|&id| (v.to_string(), Value::Elem(id)))
                .ok_or_else(|| FoError::Unbound(e.to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fo::parse_fo;

    fn set(n: usize) -> GenericStructure {
        GenericStructure::builder()
            .sort("U", (0..n).map(|i| format!("e{i}")))
            .relation("R", &["U"], Vec::<Vec<String>>::new())
            .build()
            .unwrap()
    }

    #[test]
    fn basics() {
        let a = set(3);
        let env = Env::new();
        assert!(!eval_fo(&a, &parse_fo("(exists x U (R x))").unwrap(), &env).unwrap());
        assert!(eval_fo(&a, &parse_fo("(exists-set X U (forall x U (mem x X)))").unwrap(), &env).unwrap());
        assert!(eval_fo(&a, &parse_fo("(forall x U (exists y U (= x y)))").unwrap(), &env).unwrap());
        let two = parse_fo("(exists x U (exists y U (not (= x y))))").unwrap();
        assert!(eval_fo(&a, &two, &env).unwrap());
        assert!(!eval_fo(&set(1), &two, &env).unwrap());
    }

    #[test]
    fn errors() {
        let a = set(2);
        let env = Env::new();
        assert_eq!(
            eval_fo(&a, &parse_fo("(R x)").unwrap(), &env),
            Err(FoError::Unbound("x".into()))
        );
        assert!(matches!(
            eval_fo(&a, &parse_fo("(exists x V (R x))").unwrap(), &env),
            Err(FoError::UnknownSort(_))
        ));
        assert!(matches!(
            eval_fo(&a, &parse_fo("(exists x U (Q x))").unwrap(), &env),
            Err(FoError::UnknownRelation(_))
        ));
        assert!(matches!(
            eval_fo_capped(&set(5), &parse_fo("(exists-set X U true)").unwrap(), &env, 4),
            Err(FoError::SetCap { size: 5, cap: 4, .. })
        ));
        let e = env_of(&a, &[("x", "e0")]).unwrap();
        assert!(!eval_fo(&a, &parse_fo("(R x)").unwrap(), &e).unwrap());
    }
}
