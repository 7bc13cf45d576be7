//! The dynamic epistemic language: formula AST, parser, and printer.
//!
//! Text grammar (ASCII), loosest-binding first:
//!
//! ```text
//! f ::= f '<->' f              (right-associative)
//!     | f '->' f               (right-associative)
//!     | f '|' f
//!     | f '&' f
//!     | '~' f | 'K' f | 'Kw' f | '[' name ']' f
//!     | 'true' | 'false' | atom | '(' f ')'
//! ```
//!
//! `K f` is knowledge, `Kw f` ("knowing whether") abbreviates `K f | K ~f`,
//! and `[name] f` is a dynamic modality: in a static evaluation context the
//! name resolves to an event model, in a domain context to an action label.
//! `K`, `Kw`, `true`, `false` are reserved words and cannot be atoms.

use std::fmt;

use crate::error::{Error, Result};

/// A formula of the dynamic epistemic language.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// Constant truth.
    Top,
    /// Constant falsity.
    Bot,
    /// Propositional atom, by name.
    Atom(String),
    /// Negation.
    Neg(Box<Formula>),
    /// Conjunction.
    And(Box<Formula>, Box<Formula>),
    /// Disjunction.
    Or(Box<Formula>, Box<Formula>),
    /// Material implication.
    Implies(Box<Formula>, Box<Formula>),
    /// Biconditional.
    Iff(Box<Formula>, Box<Formula>),
    /// Knowledge: true at a world iff the operand holds at every
    /// indistinguishable world.
    Know(Box<Formula>),
    /// Knowing whether: `Kw f` is definitionally `K f | K ~f`.
    KnowWhether(Box<Formula>),
    /// Dynamic modality over an event model, resolved by name through an
    /// evaluation environment. This is what `[name] f` parses to.
    DynEvent(String, Box<Formula>),
    /// Dynamic modality over an action label, evaluable only against a
    /// domain (the operand must hold after every way of taking the action).
    DynAction(String, Box<Formula>),
}

/// Atom by name.
pub fn atom(name: impl Into<String>) -> Formula {
    Formula::Atom(name.into())
}

/// Constant truth.
pub fn top() -> Formula {
    Formula::Top
}

/// Constant falsity.
pub fn bot() -> Formula {
    Formula::Bot
}

/// Negation.
pub fn neg(f: Formula) -> Formula {
    Formula::Neg(Box::new(f))
}

/// Conjunction.
pub fn and(f: Formula, g: Formula) -> Formula {
    Formula::And(Box::new(f), Box::new(g))
}

/// Disjunction.
pub fn or(f: Formula, g: Formula) -> Formula {
    Formula::Or(Box::new(f), Box::new(g))
}

/// Implication.
pub fn implies(f: Formula, g: Formula) -> Formula {
    Formula::Implies(Box::new(f), Box::new(g))
}

/// Biconditional.
pub fn iff(f: Formula, g: Formula) -> Formula {
    Formula::Iff(Box::new(f), Box::new(g))
}

/// Knowledge.
pub fn know(f: Formula) -> Formula {
    Formula::Know(Box::new(f))
}

/// Knowing whether.
pub fn kw(f: Formula) -> Formula {
    Formula::KnowWhether(Box::new(f))
}

/// Dynamic modality over an event model name.
pub fn dyn_event(name: impl Into<String>, f: Formula) -> Formula {
    Formula::DynEvent(name.into(), Box::new(f))
}

/// Dynamic modality over an action label.
pub fn dyn_action(name: impl Into<String>, f: Formula) -> Formula {
    Formula::DynAction(name.into(), Box::new(f))
}

/// Right-folded conjunction of a sequence; empty folds to `true`.
pub fn conj(fs: impl IntoIterator<Item = Formula>) -> Formula {
    fold_right(fs, Formula::Top, and)
}

/// Right-folded disjunction of a sequence; empty folds to `false`.
pub fn disj(fs: impl IntoIterator<Item = Formula>) -> Formula {
    fold_right(fs, Formula::Bot, or)
}

fn fold_right(
    fs: impl IntoIterator<Item = Formula>,
    empty: Formula,
    op: fn(Formula, Formula) -> Formula,
) -> Formula {
    let items: Vec<Formula> = fs.into_iter().collect();
    let mut iter = items.into_iter().rev();
    match iter.next() {
        None => empty,
        Some(last) => iter.fold(last, |acc, f| op(f, acc)),
    }
}

impl Formula {
    /// Parses a formula from its text form.
    pub fn parse(text: &str) -> Result<Formula> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let f = p.iff()?;
        match p.peek() {
            Tok::End => Ok(f),
            _ => Err(p.error("unexpected trailing input")),
        }
    }

    /// All atom names occurring in the formula.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::Atom(p) => out.push(p.clone()),
            Formula::Neg(f) | Formula::Know(f) | Formula::KnowWhether(f) => f.collect_atoms(out),
            Formula::DynEvent(_, f) | Formula::DynAction(_, f) => f.collect_atoms(out),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Implies(f, g) | Formula::Iff(f, g) => {
                f.collect_atoms(out);
                g.collect_atoms(out);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Neg(..)
            | Formula::Know(..)
            | Formula::KnowWhether(..)
            | Formula::DynEvent(..)
            | Formula::DynAction(..) => 5,
            Formula::Top | Formula::Bot | Formula::Atom(..) => 6,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let needs_parens = self.prec() < min_prec;
        if needs_parens {
            write!(f, "(")?;
        }
        match self {
            Formula::Top => write!(f, "true")?,
            Formula::Bot => write!(f, "false")?,
            Formula::Atom(p) => write!(f, "{p}")?,
            Formula::Neg(g) => {
                write!(f, "~")?;
                g.write(f, 5)?;
            }
            Formula::Know(g) => write_prefix(f, "K", g)?,
            Formula::KnowWhether(g) => write_prefix(f, "Kw", g)?,
            Formula::DynEvent(name, g) | Formula::DynAction(name, g) => {
                write_prefix(f, &format!("[{name}]"), g)?;
            }
            Formula::And(l, r) => write_binary(f, l, r, "&", 4)?,
            Formula::Or(l, r) => write_binary(f, l, r, "|", 3)?,
            Formula::Implies(l, r) => write_binary(f, l, r, "->", 2)?,
            Formula::Iff(l, r) => write_binary(f, l, r, "<->", 1)?,
        }
        if needs_parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn write_prefix(f: &mut fmt::Formatter<'_>, op: &str, operand: &Formula) -> fmt::Result {
    if operand.prec() < 5 {
        write!(f, "{op}(")?;
        operand.write(f, 0)?;
        write!(f, ")")
    } else {
        write!(f, "{op} ")?;
        operand.write(f, 5)
    }
}

fn write_binary(
    f: &mut fmt::Formatter<'_>,
    l: &Formula,
    r: &Formula,
    op: &str,
    prec: u8,
) -> fmt::Result {
    // Right-associative: the left child needs parentheses at equal
    // precedence, the right child does not.
    l.write(f, prec + 1)?;
    write!(f, " {op} ")?;
    r.write(f, prec)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Know,
    KnowWhether,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
                continue;
            }
            '~' => {
                out.push((Tok::Tilde, start));
                i += 1;
            }
            '&' => {
                out.push((Tok::Amp, start));
                i += 1;
            }
            '|' => {
                out.push((Tok::Pipe, start));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, start));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, start));
                i += 1;
            }
            '[' => {
                out.push((Tok::LBracket, start));
                i += 1;
            }
            ']' => {
                out.push((Tok::RBracket, start));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((Tok::Arrow, start));
                    i += 2;
                } else {
                    return Err(Error::FormulaParse {
                        pos: start,
                        msg: "expected `->`".to_string(),
                    });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    out.push((Tok::DArrow, start));
                    i += 3;
                } else {
                    return Err(Error::FormulaParse {
                        pos: start,
                        msg: "expected `<->`".to_string(),
                    });
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < bytes.len() && ((bytes[i] as char).is_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                out.push((
                    match word {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        "K" => Tok::Know,
                        "Kw" => Tok::KnowWhether,
                        _ => Tok::Ident(word.to_string()),
                    },
                    start,
                ));
            }
            _ => {
                return Err(Error::FormulaParse {
                    pos: start,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    out.push((Tok::End, bytes.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: &str) -> Error {
        Error::FormulaParse {
            pos: self.tokens[self.pos].1,
            msg: msg.to_string(),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn iff(&mut self) -> Result<Formula> {
        let lhs = self.imp()?;
        if *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.iff()?;
            Ok(iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn imp(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            Ok(implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let lhs = self.and()?;
        if *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.or()?;
            Ok(or(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn and(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.and()?;
            Ok(and(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(neg(self.unary()?))
            }
            Tok::Know => {
                self.bump();
                Ok(know(self.unary()?))
            }
            Tok::KnowWhether => {
                self.bump();
                Ok(kw(self.unary()?))
            }
            Tok::LBracket => {
                self.bump();
                let name = match self.bump() {
                    Tok::Ident(n) => n,
                    _ => return Err(self.error("expected a name inside `[...]`")),
                };
                self.expect(Tok::RBracket, "expected `]`")?;
                Ok(dyn_event(name, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(top())
            }
            Tok::False => {
                self.bump();
                Ok(bot())
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(atom(name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, "expected `)`")?;
                Ok(f)
            }
            _ => Err(self.error("expected a formula")),
        }
    }
}
