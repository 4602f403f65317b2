//! Text formats for programs and fact files.
//!
//! ```text
//! Rule  := Atom ("," Atom | "," "not" Atom)* "->" Atom "."
//! Atom  := ident "(" Term ("," Term)* ")"
//! Term  := ident | "?" ident
//! ident := [A-Za-z0-9_]+
//! ```
//!
//! `%` starts a comment that runs to the end of the line. A fact file holds
//! one ground atom per line, each terminated by `.`.

use std::collections::HashMap;

use crate::error::Error;
use crate::fact_store::FactStore;
use crate::syntax::{check_arity, check_safety, Atom, Fact, Program, Rule, Sym, Term};

/// A parsed program together with the source position of each rule.
#[derive(Clone, Debug)]
pub struct SourceProgram {
    pub text: String,
    pub program: Program,
    /// `(line, column)` of the first token of each rule, in source order.
    pub positions: Vec<(usize, usize)>,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { src: text.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, Error> {
        Err(Error::Syntax { line: self.line, column: self.col, message: message.into() })
    }

    fn bump(&mut self) -> Option<u8> {
        let c = *self.src.get(self.pos)?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_whitespace() {
                self.bump();
            } else if c == b'%' {
                while let Some(c) = self.bump() {
                    if c == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_trivia();
        self.src.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn expect(&mut self, token: &str) -> Result<(), Error> {
        self.skip_trivia();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            for _ in 0..token.len() {
                self.bump();
            }
            Ok(())
        } else {
            let found = self.describe_next();
            self.error(format!("expected `{token}`, found {found}"))
        }
    }

    fn describe_next(&mut self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(_) => {
                let rest = &self.src[self.pos..];
                let end = rest.iter().position(|c| c.is_ascii_whitespace()).unwrap_or(rest.len()).min(12);
                format!("`{}`", String::from_utf8_lossy(&rest[..end]))
            }
        }
    }

    fn ident(&mut self) -> Result<&'a str, Error> {
        self.skip_trivia();
        let start = self.pos;
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.bump();
            } else {
                break;
            }
        }
        if start == self.pos {
            let found = self.describe_next();
            return self.error(format!("expected identifier, found {found}"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    /// True if the next token is the keyword `not` used as negation (not a
    /// predicate named `not`).
    fn at_not(&mut self) -> bool {
        self.skip_trivia();
        let rest = &self.src[self.pos..];
        if !rest.starts_with(b"not") {
            return false;
        }
        let after = &rest[3..];
        match after.first() {
            Some(c) if c.is_ascii_alphanumeric() || *c == b'_' => false,
            _ => {
                let next = after.iter().find(|c| !c.is_ascii_whitespace());
                next != Some(&b'(')
            }
        }
    }

    fn term(&mut self) -> Result<Term, Error> {
        if self.peek() == Some(b'?') {
            self.bump();
            if !matches!(self.src.get(self.pos), Some(c) if c.is_ascii_alphanumeric() || *c == b'_') {
                return self.error("expected variable name after `?`");
            }
            Ok(Term::Var(Sym::new(self.ident()?)))
        } else {
            Ok(Term::Const(Sym::new(self.ident()?)))
        }
    }

    fn atom(&mut self) -> Result<Atom, Error> {
        let pred = self.ident()?;
        self.expect("(")?;
        let mut args = vec![self.term()?];
        while self.peek() == Some(b',') {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(")")?;
        Ok(Atom::new(pred, args))
    }

    fn rule(&mut self) -> Result<Rule, Error> {
        let mut pos = vec![self.atom()?];
        let mut neg = Vec::new();
        while self.peek() == Some(b',') {
            self.bump();
            if self.at_not() {
                self.expect("not")?;
                neg.push(self.atom()?);
            } else {
                pos.push(self.atom()?);
            }
        }
        self.expect("->")?;
        let head = self.atom()?;
        self.expect(".")?;
        Ok(Rule::new(head, pos, neg))
    }
}

/// Parses and checks a program (safety and predicate arities).
pub fn parse_program(text: &str) -> Result<Program, Error> {
    parse_source(text).map(|s| s.program)
}

pub fn parse_source(text: &str) -> Result<SourceProgram, Error> {
    let mut lx = Lexer::new(text);
    let mut rules = Vec::new();
    let mut positions = Vec::new();
    let mut arities = HashMap::new();
    while !lx.at_end() {
        let at = (lx.line, lx.col);
        let rule = lx.rule()?;
        let located = |e: Error| match e {
            Error::UnsafeRule { rule, var } => Error::UnsafeRule { rule: format!("{rule} (line {})", at.0), var },
            other => other,
        };
        check_safety(&rule).map_err(located)?;
        for atom in rule.atoms() {
            if let Err(e) = check_arity(&mut arities, atom.pred, atom.arity()) {
                return Err(Error::Syntax { line: at.0, column: at.1, message: e.to_string() });
            }
        }
        rules.push(rule);
        positions.push(at);
    }
    Ok(SourceProgram { text: text.to_string(), program: Program::new(rules)?, positions })
}

/// Parses a fact file.
pub fn parse_facts(text: &str) -> Result<FactStore, Error> {
    let mut lx = Lexer::new(text);
    let mut out = FactStore::new();
    let mut arities = HashMap::new();
    while !lx.at_end() {
        let at = (lx.line, lx.col);
        let atom = lx.atom()?;
        lx.expect(".")?;
        let Some(fact) = atom.to_fact() else {
            return Err(Error::Syntax { line: at.0, column: at.1, message: format!("fact `{atom}` contains a variable") });
        };
        if let Err(e) = check_arity(&mut arities, fact.pred, fact.arity()) {
            return Err(Error::Syntax { line: at.0, column: at.1, message: e.to_string() });
        }
        out.insert(fact);
    }
    Ok(out)
}

/// One fact per line, sorted by (predicate, args).
pub fn serialise_dataset(facts: &FactStore) -> String {
    serialise_facts(facts.iter())
}

pub fn serialise_facts<'a>(facts: impl IntoIterator<Item = &'a Fact>) -> String {
    let mut sorted: Vec<&Fact> = facts.into_iter().collect();
    sorted.sort_by(|a, b| a.cmp_text(b));
    sorted.dedup();
    let mut out = String::new();
    for fact in sorted {
        out.push_str(&fact.to_string());
        out.push_str(".\n");
    }
    out
}

pub fn serialise_program(program: &Program) -> String {
    program.to_string()
}
