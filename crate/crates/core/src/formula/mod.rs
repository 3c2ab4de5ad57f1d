//! Syntax of inquisitive epistemic modal logic.
//!
//! A [`Formula`] is built from atoms, `bot`, conjunction, implication,
//! inquisitive disjunction and the two agent-indexed modalities: `[a]`
//! ("knows") and `[+a]` ("entertains"). Negation, classical disjunction and
//! the question operator are sugar and are removed by [`Formula::desugar`].

mod enumerate;
mod parse;

use std::fmt;

use thiserror::Error;

pub use enumerate::{count_formulas, enumerate_formulas, EnumerationError, DEFAULT_ENUMERATION_CAP};
pub use parse::{parse, ParseError};

/// Agents and atomic propositions of a modal language.
///
/// Both lists are kept sorted and duplicate-free so that every derived
/// object (models, colourings, enumerations) is reproducible.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    agents: Vec<String>,
    props: Vec<String>,
}

impl Signature {
    pub fn new<A, P>(agents: A, props: P) -> Self
    where
        A: IntoIterator,
        A::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let mut agents: Vec<String> = agents.into_iter().map(Into::into).collect();
        let mut props: Vec<String> = props.into_iter().map(Into::into).collect();
        agents.sort();
        agents.dedup();
        props.sort();
        props.dedup();
        Signature { agents, props }
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.binary_search_by(|a| a.as_str().cmp(name)).ok()
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.props.binary_search_by(|p| p.as_str().cmp(name)).ok()
    }

    pub fn has_agent(&self, name: &str) -> bool {
        self.agent_index(name).is_some()
    }

    pub fn has_prop(&self, name: &str) -> bool {
        self.prop_index(name).is_some()
    }

    /// Smallest signature containing both.
    pub fn merge(&self, other: &Signature) -> Signature {
        Signature::new(
            self.agents.iter().chain(&other.agents).cloned(),
            self.props.iter().chain(&other.props).cloned(),
        )
    }
}

/// An InqML formula.
///
/// The variant order matters: the derived `Ord` is the lexicographic order
/// used by [`enumerate_formulas`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Bottom,
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Inquisitive disjunction.
    IDisj(Box<Formula>, Box<Formula>),
    /// `[a]φ`: φ is supported by the agent's knowledge state.
    Box(String, std::boxed::Box<Formula>),
    /// `[+a]φ`: φ is supported by every state in the agent's inquisitive state.
    WBox(String, std::boxed::Box<Formula>),
    /// Sugar for `φ -> bot`.
    Not(Box<Formula>),
    /// Classical disjunction, sugar for `!(!φ & !ψ)`.
    Or(Box<Formula>, Box<Formula>),
    /// Polar question, sugar for `φ \/ !φ`.
    Question(Box<Formula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn idisj(a: Formula, b: Formula) -> Formula {
        Formula::IDisj(Box::new(a), Box::new(b))
    }

    pub fn boxed(agent: impl Into<String>, f: Formula) -> Formula {
        Formula::Box(agent.into(), Box::new(f))
    }

    pub fn wbox(agent: impl Into<String>, f: Formula) -> Formula {
        Formula::WBox(agent.into(), Box::new(f))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn question(f: Formula) -> Formula {
        Formula::Question(Box::new(f))
    }

    /// `bot -> bot`, supported everywhere.
    pub fn top() -> Formula {
        Formula::implies(Formula::Bottom, Formula::Bottom)
    }

    /// Core-syntax negation `φ -> bot`.
    pub fn neg(f: Formula) -> Formula {
        Formula::implies(f, Formula::Bottom)
    }

    /// Left-nested conjunction; the empty conjunction is [`Formula::top`].
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::top)
    }

    /// Left-nested inquisitive disjunction; the empty one is `bot`.
    pub fn inquisitive_disjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::idisj)
            .unwrap_or(Formula::Bottom)
    }

    /// Classical disjunction in core syntax: `(¬φ1 ∧ … ∧ ¬φk) -> bot`.
    ///
    /// A single disjunct is returned unchanged, the empty one is `bot`.
    pub fn classical_disjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        match parts.len() {
            0 => Formula::Bottom,
            1 => parts.pop().unwrap(),
            _ => Formula::neg(Formula::conjunction(parts.into_iter().map(Formula::neg))),
        }
    }

    /// Remove the sugar connectives `!`, `||` and `?`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Atom(p) => Formula::Atom(p.clone()),
            Formula::Bottom => Formula::Bottom,
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Implies(a, b) => Formula::implies(a.desugar(), b.desugar()),
            Formula::IDisj(a, b) => Formula::idisj(a.desugar(), b.desugar()),
            Formula::Box(ag, f) => Formula::boxed(ag.clone(), f.desugar()),
            Formula::WBox(ag, f) => Formula::wbox(ag.clone(), f.desugar()),
            Formula::Not(f) => Formula::neg(f.desugar()),
            Formula::Or(a, b) => Formula::neg(Formula::and(
                Formula::neg(a.desugar()),
                Formula::neg(b.desugar()),
            )),
            Formula::Question(f) => {
                let f = f.desugar();
                Formula::idisj(f.clone(), Formula::neg(f))
            }
        }
    }

    /// True when no sugar node occurs.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Bottom => true,
            Formula::And(a, b) | Formula::Implies(a, b) | Formula::IDisj(a, b) => {
                a.is_core() && b.is_core()
            }
            Formula::Box(_, f) | Formula::WBox(_, f) => f.is_core(),
            Formula::Not(_) | Formula::Or(..) | Formula::Question(_) => false,
        }
    }

    /// Nesting depth of `[a]` and `[+a]`, combined over all agents.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::And(a, b)
            | Formula::Implies(a, b)
            | Formula::IDisj(a, b)
            | Formula::Or(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Not(f) | Formula::Question(f) => f.modal_depth(),
            Formula::Box(_, f) | Formula::WBox(_, f) => 1 + f.modal_depth(),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 1,
            Formula::And(a, b)
            | Formula::Implies(a, b)
            | Formula::IDisj(a, b)
            | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Not(f)
            | Formula::Question(f)
            | Formula::Box(_, f)
            | Formula::WBox(_, f) => 1 + f.size(),
        }
    }

    /// Syntactic sufficient condition for truth-conditionality: every
    /// inquisitive disjunction sits under some modality.
    pub fn syntactically_truth_conditional(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Bottom => true,
            Formula::Box(..) | Formula::WBox(..) => true,
            Formula::IDisj(..) | Formula::Question(_) => false,
            Formula::And(a, b) | Formula::Implies(a, b) | Formula::Or(a, b) => {
                a.syntactically_truth_conditional() && b.syntactically_truth_conditional()
            }
            Formula::Not(f) => f.syntactically_truth_conditional(),
        }
    }

    /// Check that every atom and agent occurs in `sig`.
    pub fn check_signature(&self, sig: &Signature) -> Result<(), FormulaError> {
        match self {
            Formula::Atom(p) if !sig.has_prop(p) => Err(FormulaError::UnknownAtom(p.clone())),
            Formula::Atom(_) | Formula::Bottom => Ok(()),
            Formula::And(a, b)
            | Formula::Implies(a, b)
            | Formula::IDisj(a, b)
            | Formula::Or(a, b) => {
                a.check_signature(sig)?;
                b.check_signature(sig)
            }
            Formula::Not(f) | Formula::Question(f) => f.check_signature(sig),
            Formula::Box(ag, f) | Formula::WBox(ag, f) => {
                if !sig.has_agent(ag) {
                    return Err(FormulaError::UnknownAgent(ag.clone()));
                }
                f.check_signature(sig)
            }
        }
    }

    /// Minimal-parenthesis rendering in the ASCII concrete syntax.
    pub fn render(&self) -> String {
        let mut out = String::new();
        parse::render_into(self, 0, &mut out);
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn desugar_negation() {
        assert_eq!(
            Formula::not(p()).desugar(),
            Formula::implies(p(), Formula::Bottom)
        );
    }

    #[test]
    fn desugar_classical_or() {
        let q = Formula::atom("q");
        let expected = Formula::implies(
            Formula::and(
                Formula::implies(p(), Formula::Bottom),
                Formula::implies(q.clone(), Formula::Bottom),
            ),
            Formula::Bottom,
        );
        assert_eq!(Formula::or(p(), q).desugar(), expected);
    }

    #[test]
    fn desugar_question() {
        assert_eq!(
            Formula::question(p()).desugar(),
            Formula::idisj(p(), Formula::implies(p(), Formula::Bottom))
        );
    }

    #[test]
    fn depth_examples() {
        assert_eq!(Formula::and(p(), Formula::atom("q")).modal_depth(), 0);
        assert_eq!(Formula::boxed("a", Formula::question(p())).modal_depth(), 1);
        assert_eq!(
            Formula::wbox("a", Formula::boxed("b", p())).modal_depth(),
            2
        );
    }

    #[test]
    fn truth_conditional_syntax() {
        let q = Formula::idisj(p(), Formula::implies(p(), Formula::Bottom));
        assert!(Formula::boxed("a", q.clone()).syntactically_truth_conditional());
        assert!(!Formula::idisj(p(), Formula::atom("q")).syntactically_truth_conditional());
        assert!(p().syntactically_truth_conditional());
        assert!(!Formula::implies(p(), q).syntactically_truth_conditional());
    }

    #[test]
    fn signature_is_canonical() {
        let sig = Signature::new(["b", "a", "b"], ["q", "p"]);
        assert_eq!(sig.agents(), ["a", "b"]);
        assert_eq!(sig.props(), ["p", "q"]);
        assert_eq!(sig.agent_index("b"), Some(1));
        assert!(!sig.has_prop("r"));
    }

    #[test]
    fn unknown_identifiers_are_reported() {
        let sig = Signature::new(["a"], ["p"]);
        assert_eq!(
            Formula::atom("q").check_signature(&sig),
            Err(FormulaError::UnknownAtom("q".into()))
        );
        assert_eq!(
            Formula::boxed("b", p()).check_signature(&sig),
            Err(FormulaError::UnknownAgent("b".into()))
        );
    }
}
