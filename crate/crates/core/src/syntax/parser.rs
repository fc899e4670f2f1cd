//! Parser for the theory text format.
//!
//! ```text
//! fact       := "fact" atom "."
//! assumption := "assume" atom "."
//! strict     := atom "<-" atom-list "."
//! defeasible := atom ":" atom "<=" atom-list "."      # name : head <= body
//! contrary   := "contrary" atom ":" atom-list "."     # subject : contraries
//! atom       := ident | ident "(" term {"," term} ")"
//! ```
//!
//! `#` starts a comment running to the end of the line. Variables match
//! `[A-Z][A-Za-z0-9_]*`, constants `[a-z][A-Za-z0-9_]*` or `[0-9]+`.

use std::collections::HashMap;

use thiserror::Error;

use super::{Atom, ContraryExpr, DefeasibleRule, StrictRule, Term, Theory, RESERVED_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: predicate `{predicate}` used with arity {found}, but earlier with arity {expected}")]
    ArityClash {
        line: usize,
        col: usize,
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: predicate `{predicate}` uses the reserved prefix `__`")]
    ReservedPredicate {
        line: usize,
        col: usize,
        predicate: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    LeftArrow,
    DefArrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::LeftArrow => "`<-`".into(),
            Tok::DefArrow => "`<=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

fn syntax(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Word(word), pos));
            continue;
        }
        chars.next();
        col += 1;
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => Tok::Colon,
            '<' => match chars.next() {
                Some('-') => {
                    col += 1;
                    Tok::LeftArrow
                }
                Some('=') => {
                    col += 1;
                    Tok::DefArrow
                }
                _ => return Err(syntax(pos, "expected `<-` or `<=`")),
            },
            other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    arities: HashMap<String, (usize, Pos)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let (tok, pos) = self.bump();
        if tok == want {
            Ok(())
        } else {
            Err(syntax(
                pos,
                format!("expected {}, found {}", want.describe(), tok.describe()),
            ))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (tok, pos) = self.bump();
        let Tok::Word(w) = tok else {
            return Err(syntax(pos, format!("expected a term, found {}", tok.describe())));
        };
        let first = w.chars().next().expect("words are non-empty");
        if first.is_ascii_uppercase() {
            Ok(Term::Var(w))
        } else if first.is_ascii_lowercase() || w.chars().all(|c| c.is_ascii_digit()) {
            Ok(Term::Const(w))
        } else {
            Err(syntax(pos, format!("`{w}` is neither a variable nor a constant")))
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let (tok, pos) = self.bump();
        let Tok::Word(name) = tok else {
            return Err(syntax(pos, format!("expected an atom, found {}", tok.describe())));
        };
        if name.starts_with(RESERVED_PREFIX) {
            return Err(ParseError::ReservedPredicate {
                line: pos.line,
                col: pos.col,
                predicate: name,
            });
        }
        if !name.starts_with(|c: char| c.is_ascii_lowercase()) {
            return Err(syntax(
                pos,
                format!("predicate `{name}` must start with a lowercase letter"),
            ));
        }
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            args.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
        }
        match self.arities.get(&name) {
            Some(&(expected, _)) if expected != args.len() => {
                return Err(ParseError::ArityClash {
                    line: pos.line,
                    col: pos.col,
                    predicate: name,
                    expected,
                    found: args.len(),
                })
            }
            Some(_) => {}
            None => {
                self.arities.insert(name.clone(), (args.len(), pos));
            }
        }
        Ok(Atom::new(name, args))
    }

    /// Possibly empty comma-separated list of atoms, terminated by `.`.
    fn atom_list(&mut self) -> Result<Vec<Atom>, ParseError> {
        let mut atoms = Vec::new();
        if *self.peek() == Tok::Dot {
            return Ok(atoms);
        }
        atoms.push(self.atom()?);
        while *self.peek() == Tok::Comma {
            self.bump();
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn statement(&mut self, theory: &mut Theory) -> Result<(), ParseError> {
        let keyword = match (self.peek(), self.peek2()) {
            (Tok::Word(k), Tok::Word(_)) => Some(k.clone()),
            _ => None,
        };
        match keyword.as_deref() {
            Some("fact") => {
                self.bump();
                let a = self.atom()?;
                self.expect(Tok::Dot)?;
                theory.facts.insert(a);
            }
            Some("assume") => {
                self.bump();
                let a = self.atom()?;
                self.expect(Tok::Dot)?;
                theory.assumptions.insert(a);
            }
            Some("contrary") => {
                self.bump();
                let subject = self.atom()?;
                self.expect(Tok::Colon)?;
                let pos = self.pos();
                let contraries = self.atom_list()?;
                if contraries.is_empty() {
                    return Err(syntax(pos, "a contrary expression needs at least one contrary"));
                }
                self.expect(Tok::Dot)?;
                theory.contraries.insert(ContraryExpr::new(subject, contraries));
            }
            Some(other) => {
                return Err(syntax(
                    self.pos(),
                    format!("unknown keyword `{other}` (expected fact, assume or contrary)"),
                ))
            }
            None => {
                let first = self.atom()?;
                let (tok, pos) = self.bump();
                match tok {
                    Tok::LeftArrow => {
                        let body = self.atom_list()?;
                        self.expect(Tok::Dot)?;
                        theory.strict.insert(StrictRule::new(body, first));
                    }
                    Tok::Colon => {
                        let head = self.atom()?;
                        self.expect(Tok::DefArrow)?;
                        let body = self.atom_list()?;
                        self.expect(Tok::Dot)?;
                        theory.defeasible.insert(DefeasibleRule::new(first, body, head));
                    }
                    other => {
                        return Err(syntax(
                            pos,
                            format!("expected `<-` or `:`, found {}", other.describe()),
                        ))
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses a theory. Duplicate statements collapse into one.
pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    let mut parser = Parser {
        toks: tokenize(text)?,
        at: 0,
        arities: HashMap::new(),
    };
    let mut theory = Theory::default();
    while *parser.peek() != Tok::Eof {
        parser.statement(&mut theory)?;
    }
    Ok(theory)
}

/// Parses a single atom, e.g. `f(1,X)`.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let mut parser = Parser {
        toks: tokenize(text)?,
        at: 0,
        arities: HashMap::new(),
    };
    let atom = parser.atom()?;
    match parser.bump() {
        (Tok::Eof, _) => Ok(atom),
        (tok, pos) => Err(syntax(pos, format!("trailing {}", tok.describe()))),
    }
}
