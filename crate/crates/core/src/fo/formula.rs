//! Sorted first-order formulas with monadic second-order quantifiers.
//!
//! Text form is an s-expression:
//!
//! ```text
//! (exists x W (forall t S (implies (E[a] x t) (not (= x x)))))
//! (exists-set X U (forall y U (mem y X)))
//! ```
//!
//! Keywords: `true false = mem not and or implies iff exists forall
//! exists-set forall-set`. Any other head symbol is a relation name.
//! `and`/`or` take any number of arguments.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FoFormula {
    True,
    False,
    Rel(String, Vec<String>),
    Eq(String, String),
    /// Element variable in set variable.
    Mem(String, String),
    Not(Box<FoFormula>),
    And(Vec<FoFormula>),
    Or(Vec<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Iff(Box<FoFormula>, Box<FoFormula>),
    /// Variable, sort name, body.
    Exists(String, String, Box<FoFormula>),
    Forall(String, String, Box<FoFormula>),
    ExistsSet(String, String, Box<FoFormula>),
    ForallSet(String, String, Box<FoFormula>),
}

impl FoFormula {
    pub fn rel(name: &str, args: &[&str]) -> FoFormula {
        FoFormula::Rel(name.to_string(), args.iter().map(|a| a.to_string()).collect())
    }

    pub fn eq(x: &str, y: &str) -> FoFormula {
        FoFormula::Eq(x.into(), y.into())
    }

    pub fn mem(x: &str, set: &str) -> FoFormula {
        FoFormula::Mem(x.into(), set.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: FoFormula) -> FoFormula {
        FoFormula::Not(Box::new(f))
    }

    pub fn and(fs: impl IntoIterator<Item = FoFormula>) -> FoFormula {
        FoFormula::And(fs.into_iter().collect())
    }

    pub fn or(fs: impl IntoIterator<Item = FoFormula>) -> FoFormula {
        FoFormula::Or(fs.into_iter().collect())
    }

    pub fn implies(a: FoFormula, b: FoFormula) -> FoFormula {
        FoFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: FoFormula, b: FoFormula) -> FoFormula {
        FoFormula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, sort: &str, f: FoFormula) -> FoFormula {
        FoFormula::Exists(v.into(), sort.into(), Box::new(f))
    }

    pub fn forall(v: &str, sort: &str, f: FoFormula) -> FoFormula {
        FoFormula::Forall(v.into(), sort.into(), Box::new(f))
    }

    pub fn exists_set(v: &str, sort: &str, f: FoFormula) -> FoFormula {
        FoFormula::ExistsSet(v.into(), sort.into(), Box::new(f))
    }

    pub fn forall_set(v: &str, sort: &str, f: FoFormula) -> FoFormula {
        FoFormula::ForallSet(v.into(), sort.into(), Box::new(f))
    }

    /// Nesting depth of quantifiers, first- and second-order alike.
    pub fn quantifier_rank(&self) -> usize {
        match self {
            FoFormula::True
            | FoFormula::False
            | FoFormula::Rel(..)
            | FoFormula::Eq(..)
            | FoFormula::Mem(..) => 0,
            FoFormula::Not(f) => f.quantifier_rank(),
            FoFormula::And(fs) | FoFormula::Or(fs) => {
                fs.iter().map(FoFormula::quantifier_rank).max().unwrap_or(0)
            }
            FoFormula::Implies(a, b) | FoFormula::Iff(a, b) => {
                a.quantifier_rank().max(b.quantifier_rank())
            }
            FoFormula::Exists(_, _, f)
            | FoFormula::Forall(_, _, f)
            | FoFormula::ExistsSet(_, _, f)
            | FoFormula::ForallSet(_, _, f) => 1 + f.quantifier_rank(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut see = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            FoFormula::True | FoFormula::False => {}
            FoFormula::Rel(_, args) => args.iter().for_each(|a| see(a, bound)),
            FoFormula::Eq(x, y) | FoFormula::Mem(x, y) => {
                see(x, bound);
                see(y, bound);
            }
            FoFormula::Not(f) => f.collect_free(bound, out),
            FoFormula::And(fs) | FoFormula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out))
            }
            FoFormula::Implies(a, b) | FoFormula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            FoFormula::Exists(v, _, f)
            | FoFormula::Forall(v, _, f)
            | FoFormula::ExistsSet(v, _, f)
            | FoFormula::ForallSet(v, _, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            FoFormula::True
            | FoFormula::False
            | FoFormula::Rel(..)
            | FoFormula::Eq(..)
            | FoFormula::Mem(..) => 1,
            FoFormula::Not(f) => 1 + f.size(),
            FoFormula::And(fs) | FoFormula::Or(fs) => 1 + fs.iter().map(FoFormula::size).sum::<usize>(),
            FoFormula::Implies(a, b) | FoFormula::Iff(a, b) => 1 + a.size() + b.size(),
            FoFormula::Exists(_, _, f)
            | FoFormula::Forall(_, _, f)
            | FoFormula::ExistsSet(_, _, f)
            | FoFormula::ForallSet(_, _, f) => 1 + f.size(),
        }
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = |f: &mut fmt::Formatter<'_>, kw: &str, v: &str, s: &str, b: &FoFormula| {
            write!(f, "({kw} {v} {s} {b})")
        };
        match self {
            FoFormula::True => write!(f, "true"),
            FoFormula::False => write!(f, "false"),
            FoFormula::Rel(r, args) => {
                write!(f, "({r}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
            FoFormula::Eq(x, y) => write!(f, "(= {x} {y})"),
            FoFormula::Mem(x, y) => write!(f, "(mem {x} {y})"),
            FoFormula::Not(a) => write!(f, "(not {a})"),
            FoFormula::And(fs) | FoFormula::Or(fs) => {
                let kw = if matches!(self, FoFormula::And(_)) { "and" } else { "or" };
                write!(f, "({kw}")?;
                for a in fs {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
            FoFormula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            FoFormula::Iff(a, b) => write!(f, "(iff {a} {b})"),
            FoFormula::Exists(v, s, b) => q(f, "exists", v, s, b),
            FoFormula::Forall(v, s, b) => q(f, "forall", v, s, b),
            FoFormula::ExistsSet(v, s, b) => q(f, "exists-set", v, s, b),
            FoFormula::ForallSet(v, s, b) => q(f, "forall-set", v, s, b),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("s-expression error at byte {pos}: {msg}")]
pub struct SexpError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn pos(&self) -> usize {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn read(text: &str) -> Result<Sexp, SexpError> {
    let b = text.as_bytes();
    let mut stack: Vec<(Vec<Sexp>, usize)> = Vec::new();
    let mut done: Option<Sexp> = None;
    let mut i = 0;
    let err = |pos, msg: &str| SexpError {
        pos,
        msg: msg.to_string(),
    };
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if done.is_some() {
            return Err(err(i, "trailing input"));
        }
        let item = match c {
            b'(' => {
                stack.push((Vec::new(), i));
                i += 1;
                continue;
            }
            b')' => {
                let (items, start) = stack.pop().ok_or_else(|| err(i, "unbalanced `)`"))?;
                i += 1;
                Sexp::List(items, start)
            }
            _ => {
                let start = i;
                while i < b.len() && !b[i].is_ascii_whitespace() && b[i] != b'(' && b[i] != b')' {
                    i += 1;
                }
                Sexp::Atom(text[start..i].to_string(), start)
            }
        };
        match stack.last_mut() {
            Some((items, _)) => items.push(item),
            None => done = Some(item),
        }
    }
    if let Some((_, p)) = stack.last() {
        return Err(err(*p, "unclosed `(`"));
    }
    done.ok_or_else(|| err(text.len(), "empty input"))
}

fn to_formula(s: &Sexp) -> Result<FoFormula, SexpError> {
    let err = |pos, msg: String| SexpError { pos, msg };
    let sym = |s: &Sexp| -> Result<String, SexpError> {
        match s {
            Sexp::Atom(a, _) => Ok(a.clone()),
            Sexp::List(_, p) => Err(err(*p, "expected a symbol".into())),
        }
    };
    match s {
        Sexp::Atom(a, p) => match a.as_str() {
            "true" => Ok(FoFormula::True),
            "false" => Ok(FoFormula::False),
            _ => Err(err(*p, format!("unexpected symbol `{a}`"))),
        },
        Sexp::List(items, p) => {
            let Some(head) = items.first() else {
                return Err(err(*p, "empty list".into()));
            };
            let head = sym(head)?;
            let args = &items[1..];
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(err(*p, format!("`{head}` takes {n} arguments")))
                }
            };
            match head.as_str() {
                "=" => {
                    arity(2)?;
                    Ok(FoFormula::Eq(sym(&args[0])?, sym(&args[1])?))
                }
                "mem" => {
                    arity(2)?;
                    Ok(FoFormula::Mem(sym(&args[0])?, sym(&args[1])?))
                }
                "not" => {
                    arity(1)?;
                    Ok(FoFormula::not(to_formula(&args[0])?))
                }
                "and" | "or" => {
                    let fs = args.iter().map(to_formula).collect::<Result<Vec<_>, _>>()?;
                    Ok(if head == "and" {
                        FoFormula::And(fs)
                    } else {
                        FoFormula::Or(fs)
                    })
                }
                "implies" | "iff" => {
                    arity(2)?;
                    let (a, b) = (to_formula(&args[0])?, to_formula(&args[1])?);
                    Ok(if head == "implies" {
                        FoFormula::implies(a, b)
                    } else {
                        FoFormula::iff(a, b)
                    })
                }
                "exists" | "forall" | "exists-set" | "forall-set" => {
                    arity(3)?;
                    let v = sym(&args[0])?;
                    let srt = sym(&args[1])?;
                    let body = Box::new(to_formula(&args[2])?);
                    Ok(match head.as_str() {
                        "exists" => FoFormula::Exists(v, srt, body),
                        "forall" => FoFormula::Forall(v, srt, body),
                        "exists-set" => FoFormula::ExistsSet(v, srt, body),
                        _ => FoFormula::ForallSet(v, srt, body),
                    })
                }
                "true" | "false" => Err(err(args.first().map_or(*p, Sexp::pos), format!("`{head}` takes no arguments"))),
                _ => Ok(FoFormula::Rel(
                    head,
                    args.iter().map(sym).collect::<Result<_, _>>()?,
                )),
            }
        }
    }
}

/// Parse the s-expression form.
pub fn parse_fo(text: &str) -> Result<FoFormula, SexpError> {
    to_formula(&read(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for t in [
            "(exists x W (forall t S (implies (E[a] x t) (not (= x x)))))",
            "(exists-set X U (forall y U (mem y X)))",
            "(and (R x y) (or) true (iff false (P x)))",
        ] {
            let f = parse_fo(t).unwrap();
            assert_eq!(f.to_string(), t);
        }
    }

    #[test]
    fn rank_and_free_vars() {
        let f = parse_fo("(and (R x y) (exists z V (forall-set X V (mem z X))))").unwrap();
        assert_eq!(f.quantifier_rank(), 2);
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["x", "y"]);
    }

    #[test]
    fn errors() {
        assert!(parse_fo("(and (R x)").is_err());
        assert!(parse_fo("(exists x (R x))").is_err());
        assert!(parse_fo("(R x))").is_err());
        assert!(parse_fo("").is_err());
        assert!(parse_fo("(not (R x) (R y))").is_err());
    }
}
