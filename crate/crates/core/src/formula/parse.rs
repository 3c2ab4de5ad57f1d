//! ASCII concrete syntax.
//!
//! ```text
//! form  := impl
//! impl  := idisj ("->" impl)?
//! idisj := conj (("\/" | "||") conj)*
//! conj  := unary ("&" unary)*
//! unary := "!" unary | "?" unary | "[" ident "]" unary | "[+" ident "]" unary | atom
//! atom  := ident | "bot" | "(" form ")"
//! ```

use thiserror::Error;

use super::{Formula, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bot,
    And,
    IOr,
    COr,
    Arrow,
    Bang,
    Query,
    LBox,
    LWBox,
    RBracket,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Bot => "`bot`".into(),
        Tok::And => "`&`".into(),
        Tok::IOr => "`\\/`".into(),
        Tok::COr => "`||`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Query => "`?`".into(),
        Tok::LBox => "`[`".into(),
        Tok::LWBox => "`[+`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b = text.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let err = |pos: usize, msg: &str| ParseError::Syntax {
        pos,
        msg: msg.to_string(),
    };
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'&' => {
                i += 1;
                Tok::And
            }
            b'!' => {
                i += 1;
                Tok::Bang
            }
            b'?' => {
                i += 1;
                Tok::Query
            }
            b']' => {
                i += 1;
                Tok::RBracket
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'[' => {
                if b.get(i + 1) == Some(&b'+') {
                    i += 2;
                    Tok::LWBox
                } else {
                    i += 1;
                    Tok::LBox
                }
            }
            b'\\' if b.get(i + 1) == Some(&b'/') => {
                i += 2;
                Tok::IOr
            }
            b'|' if b.get(i + 1) == Some(&b'|') => {
                i += 2;
                Tok::COr
            }
            b'-' if b.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::Arrow
            }
            c if is_ident_start(c) => {
                while i < b.len() && is_ident_char(b[i]) {
                    i += 1;
                }
                let word = &text[start..i];
                if word == "bot" {
                    Tok::Bot
                } else {
                    Tok::Ident(word.to_string())
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(err(i, &format!("unexpected character `{ch}`")));
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            msg: format!("expected {wanted}, found {}", describe(self.peek())),
        }
    }

    fn form(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.idisj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.form()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn idisj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conj()?;
        loop {
            match self.peek() {
                Tok::IOr => {
                    self.bump();
                    acc = Formula::idisj(acc, self.conj()?);
                }
                Tok::COr => {
                    self.bump();
                    acc = Formula::or(acc, self.conj()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn agent(&mut self) -> Result<String, ParseError> {
        match self.bump() {
            Tok::Ident(a) => {
                if !self.sig.has_agent(&a) {
                    return Err(ParseError::UnknownAgent(a));
                }
                if *self.peek() != Tok::RBracket {
                    return Err(self.unexpected("`]`"));
                }
                self.bump();
                Ok(a)
            }
            _ => {
                self.at -= 1;
                Err(self.unexpected("agent name"))
            }
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Query => {
                self.bump();
                Ok(Formula::question(self.unary()?))
            }
            Tok::LBox => {
                self.bump();
                let a = self.agent()?;
                Ok(Formula::boxed(a, self.unary()?))
            }
            Tok::LWBox => {
                self.bump();
                let a = self.agent()?;
                Ok(Formula::wbox(a, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(p) => {
                if !self.sig.has_prop(&p) {
                    return Err(ParseError::UnknownAtom(p));
                }
                self.bump();
                Ok(Formula::Atom(p))
            }
            Tok::Bot => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::LParen => {
                self.bump();
                let f = self.form()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(f)
            }
            _ => Err(self.unexpected("formula")),
        }
    }
}

/// Parse `text` against `sig`. Every atom and agent must be declared.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, sig };
    let f = p.form()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

// Binding strength; larger binds tighter.
const IMPL: u8 = 1;
const DISJ: u8 = 2;
const CONJ: u8 = 3;
const UNARY: u8 = 4;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => IMPL,
        Formula::IDisj(..) | Formula::Or(..) => DISJ,
        Formula::And(..) => CONJ,
        _ => UNARY,
    }
}

pub(super) fn render_into(f: &Formula, ctx: u8, out: &mut String) {
    let paren = prec(f) < ctx;
    if paren {
        out.push('(');
    }
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::Bottom => out.push_str("bot"),
        Formula::And(a, b) => binary(a, " & ", b, CONJ, out),
        Formula::IDisj(a, b) => binary(a, " \\/ ", b, DISJ, out),
        Formula::Or(a, b) => binary(a, " || ", b, DISJ, out),
        Formula::Implies(a, b) => {
            render_into(a, IMPL + 1, out);
            out.push_str(" -> ");
            render_into(b, IMPL, out);
        }
        Formula::Not(a) => {
            out.push('!');
            render_into(a, UNARY, out);
        }
        Formula::Question(a) => {
            out.push('?');
            render_into(a, UNARY, out);
        }
        Formula::Box(ag, a) => {
            out.push('[');
            out.push_str(ag);
            out.push(']');
            render_into(a, UNARY, out);
        }
        Formula::WBox(ag, a) => {
            out.push_str("[+");
            out.push_str(ag);
            out.push(']');
            render_into(a, UNARY, out);
        }
    }
    if paren {
        out.push(')');
    }
}

// Left-associative binary operator at level `p`.
fn binary(a: &Formula, op: &str, b: &Formula, p: u8, out: &mut String) {
    render_into(a, p, out);
    out.push_str(op);
    render_into(b, p + 1, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["a", "b"], ["p", "q"])
    }

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn conjunction_with_negation() {
        assert_eq!(
            parse("p & !p", &sig()).unwrap(),
            Formula::and(p(), Formula::not(p()))
        );
    }

    #[test]
    fn question_and_box() {
        assert_eq!(parse("?p", &sig()).unwrap(), Formula::question(p()));
        assert_eq!(
            parse("[a]?p", &sig()).unwrap(),
            Formula::boxed("a", Formula::question(p()))
        );
        assert_eq!(
            parse("[+a]?p", &sig()).unwrap(),
            Formula::wbox("a", Formula::question(p()))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let q = Formula::atom("q");
        assert_eq!(
            parse("p -> q -> p", &sig()).unwrap(),
            Formula::implies(p(), Formula::implies(q.clone(), p()))
        );
        assert_eq!(
            parse("p \\/ q || p", &sig()).unwrap(),
            Formula::or(Formula::idisj(p(), q.clone()), p())
        );
        assert_eq!(
            parse("p & q \\/ p -> q", &sig()).unwrap(),
            Formula::implies(Formula::idisj(Formula::and(p(), q.clone()), p()), q)
        );
    }

    #[test]
    fn rendering() {
        assert_eq!(Formula::Bottom.render(), "bot");
        assert_eq!(Formula::idisj(p(), Formula::not(p())).render(), "p \\/ !p");
        assert_eq!(Formula::wbox("a", Formula::question(p())).render(), "[+a]?p");
        let f = Formula::implies(Formula::implies(p(), p()), p());
        assert_eq!(f.render(), "(p -> p) -> p");
        let g = Formula::and(p(), Formula::and(p(), p()));
        assert_eq!(g.render(), "p & (p & p)");
        assert_eq!(Formula::boxed("a", Formula::and(p(), p())).render(), "[a](p & p)");
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse("p & r", &sig()),
            Err(ParseError::UnknownAtom("r".into()))
        );
        assert_eq!(
            parse("[c]p", &sig()),
            Err(ParseError::UnknownAgent("c".into()))
        );
        match parse("p &", &sig()) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(p", &sig()), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("p $ q", &sig()), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("p q", &sig()), Err(ParseError::Syntax { .. })));
    }
}
