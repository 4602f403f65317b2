//! Terms, atoms, facts, rules and programs.
//!
//! Constants, variable names and predicate names are interned into a
//! process-wide symbol table; equality and hashing are O(1).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use indexmap::IndexSet;
use once_cell::sync::Lazy;
use smallvec::SmallVec;

use crate::error::Error;

#[derive(Default)]
struct Interner {
    ids: HashMap<Arc<str>, u32>,
    names: Vec<Arc<str>>,
}

static INTERNER: Lazy<RwLock<Interner>> = Lazy::new(Default::default);

/// An interned identifier.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sym(u32);

impl Sym {
    pub fn new(name: &str) -> Sym {
        if let Some(&id) = INTERNER.read().unwrap().ids.get(name) {
            return Sym(id);
        }
        let mut table = INTERNER.write().unwrap();
        if let Some(&id) = table.ids.get(name) {
            return Sym(id);
        }
        let id = table.names.len() as u32;
        let name: Arc<str> = Arc::from(name);
        table.names.push(name.clone());
        table.ids.insert(name, id);
        Sym(id)
    }

    pub fn name(self) -> Arc<str> {
        INTERNER.read().unwrap().names[self.0 as usize].clone()
    }

    /// Orders by the symbol's text rather than its interning id.
    pub fn cmp_text(self, other: Sym) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let table = INTERNER.read().unwrap();
        table.names[self.0 as usize].cmp(&table.names[other.0 as usize])
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Sym {
        Sym::new(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Const(Sym),
    /// Variable name without the leading `?`.
    Var(Sym),
}

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::Const(Sym::new(name))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(Sym::new(name))
    }

    pub fn as_var(&self) -> Option<Sym> {
        match self {
            Term::Var(v) => Some(*v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "{c}"),
            Term::Var(v) => write!(f, "?{v}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Atom {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<Sym>, args: Vec<Term>) -> Atom {
        Atom { pred: pred.into(), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = Sym> + '_ {
        self.args.iter().filter_map(Term::as_var)
    }

    pub fn is_ground(&self) -> bool {
        self.vars().next().is_none()
    }

    /// Converts a variable-free atom into a fact.
    pub fn to_fact(&self) -> Option<Fact> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(*c),
                Term::Var(_) => None,
            })
            .collect::<Option<SmallVec<_>>>()?;
        Some(Fact { pred: self.pred, args })
    }

    pub fn apply(&self, subst: &Substitution) -> Option<Fact> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(*c),
                Term::Var(v) => subst.get(*v),
            })
            .collect::<Option<SmallVec<_>>>()?;
        Some(Fact { pred: self.pred, args })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.pred)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// A variable-free atom.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Fact {
    pub pred: Sym,
    pub args: SmallVec<[Sym; 2]>,
}

impl Fact {
    pub fn new(pred: impl Into<Sym>, args: &[&str]) -> Fact {
        Fact { pred: pred.into(), args: args.iter().map(|a| Sym::new(a)).collect() }
    }

    pub fn from_syms(pred: Sym, args: &[Sym]) -> Fact {
        Fact { pred, args: args.into() }
    }

    pub fn binary(pred: Sym, a: Sym, b: Sym) -> Fact {
        let mut args = SmallVec::new();
        args.push(a);
        args.push(b);
        Fact { pred, args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn to_atom(&self) -> Atom {
        Atom { pred: self.pred, args: self.args.iter().map(|&c| Term::Const(c)).collect() }
    }

    /// Lexicographic order on (predicate, args) by symbol text.
    pub fn cmp_text(&self, other: &Fact) -> Ordering {
        self.pred.cmp_text(other.pred).then_with(|| {
            for (a, b) in self.args.iter().zip(other.args.iter()) {
                match a.cmp_text(*b) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            self.args.len().cmp(&other.args.len())
        })
    }
}

impl fmt::Debug for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.pred)?;
        for (i, c) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// A mapping of variables to constants.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct Substitution(BTreeMap<VarKey, Sym>);

/// Orders variables by name so substitutions print deterministically.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct VarKey(pub Sym);

impl PartialOrd for VarKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VarKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp_text(other.0)
    }
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: Sym) -> Option<Sym> {
        self.0.get(&VarKey(var)).copied()
    }

    pub fn insert(&mut self, var: Sym, value: Sym) -> Option<Sym> {
        self.0.insert(VarKey(var), value)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Sym, Sym)> + '_ {
        self.0.iter().map(|(k, v)| (k.0, *v))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "?{k}↦{v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rule {
    pub head: Atom,
    pub pos: Vec<Atom>,
    pub neg: Vec<Atom>,
}

impl Rule {
    pub fn new(head: Atom, pos: Vec<Atom>, neg: Vec<Atom>) -> Rule {
        Rule { head, pos, neg }
    }

    /// Distinct variables of the rule, positive body first, in order of
    /// first occurrence.
    pub fn vars(&self) -> Vec<Sym> {
        let mut seen = IndexSet::new();
        for atom in self.pos.iter().chain(self.neg.iter()).chain(std::iter::once(&self.head)) {
            seen.extend(atom.vars());
        }
        seen.into_iter().collect()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        std::iter::once(&self.head).chain(self.pos.iter()).chain(self.neg.iter())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for atom in &self.pos {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{atom}")?;
        }
        for atom in &self.neg {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "not {atom}")?;
        }
        if !first {
            f.write_str(" ")?;
        }
        write!(f, "-> {}.", self.head)
    }
}

/// Every variable of the head and of the negative body must occur in a
/// positive body atom.
pub fn check_safety(rule: &Rule) -> Result<(), Error> {
    let bound: IndexSet<Sym> = rule.pos.iter().flat_map(Atom::vars).collect();
    for atom in std::iter::once(&rule.head).chain(rule.neg.iter()) {
        if let Some(var) = atom.vars().find(|v| !bound.contains(v)) {
            return Err(Error::UnsafeRule { rule: rule.to_string(), var: format!("?{var}") });
        }
    }
    Ok(())
}

/// A finite set of rules, kept in first-occurrence order.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Program {
    rules: Vec<Rule>,
}

impl Program {
    /// Drops duplicate rules, then checks safety and predicate arities.
    pub fn new(rules: impl IntoIterator<Item = Rule>) -> Result<Program, Error> {
        let unique: IndexSet<Rule> = rules.into_iter().collect();
        let rules: Vec<Rule> = unique.into_iter().collect();
        let mut arities = HashMap::new();
        for rule in &rules {
            check_safety(rule)?;
            for atom in rule.atoms() {
                check_arity(&mut arities, atom.pred, atom.arity())?;
            }
        }
        Ok(Program { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Predicate arities in order of first occurrence.
    pub fn arities(&self) -> indexmap::IndexMap<Sym, usize> {
        let mut out = indexmap::IndexMap::new();
        for atom in self.rules.iter().flat_map(Rule::atoms) {
            out.entry(atom.pred).or_insert(atom.arity());
        }
        out
    }

    /// Predicates in order of first occurrence.
    pub fn predicates(&self) -> Vec<Sym> {
        self.arities().into_keys().collect()
    }

    /// Rejects facts whose arity disagrees with the program or with each other.
    pub fn check_facts<'a>(&self, facts: impl IntoIterator<Item = &'a Fact>) -> Result<(), Error> {
        let mut arities: HashMap<Sym, usize> = self.arities().into_iter().collect();
        for fact in facts {
            check_arity(&mut arities, fact.pred, fact.arity())?;
        }
        Ok(())
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_arity(arities: &mut HashMap<Sym, usize>, pred: Sym, arity: usize) -> Result<(), Error> {
    match arities.get(&pred) {
        Some(&known) if known != arity => Err(Error::ArityClash { pred: pred.to_string(), expected: known, found: arity }),
        Some(_) => Ok(()),
        None => {
            arities.insert(pred, arity);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(pred: &str, args: &[&str]) -> Atom {
        Atom::new(
            pred,
            args.iter()
                .map(|a| match a.strip_prefix('?') {
                    Some(v) => Term::var(v),
                    None => Term::constant(a),
                })
                .collect(),
        )
    }

    #[test]
    fn transitivity_rule_is_safe() {
        let rule = Rule::new(atom("R", &["?x", "?z"]), vec![atom("R", &["?x", "?y"]), atom("R", &["?y", "?z"])], vec![]);
        assert!(check_safety(&rule).is_ok());
    }

    #[test]
    fn ground_rule_with_empty_body_is_safe() {
        let rule = Rule::new(atom("P", &["a"]), vec![], vec![]);
        assert!(check_safety(&rule).is_ok());
    }

    #[test]
    fn variable_only_in_negative_atom_is_unsafe() {
        let rule = Rule::new(atom("S", &["?x"]), vec![atom("P", &["?x"])], vec![atom("Q", &["?y"])]);
        match check_safety(&rule) {
            Err(Error::UnsafeRule { var, .. }) => assert_eq!(var, "?y"),
            other => panic!("expected unsafe rule, got {other:?}"),
        }
    }

    #[test]
    fn arity_clash_rejected() {
        let r1 = Rule::new(atom("R", &["?x"]), vec![atom("P", &["?x"])], vec![]);
        let r2 = Rule::new(atom("R", &["?x", "?x"]), vec![atom("P", &["?x"])], vec![]);
        assert!(matches!(Program::new([r1, r2]), Err(Error::ArityClash { .. })));
    }

    #[test]
    fn duplicate_rules_dropped() {
        let r = Rule::new(atom("R", &["?x"]), vec![atom("P", &["?x"])], vec![]);
        let p = Program::new([r.clone(), r]).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn fact_text_order() {
        let a = Fact::new("R", &["a", "b"]);
        let b = Fact::new("R", &["b", "a"]);
        assert_eq!(a.cmp_text(&b), Ordering::Less);
        assert_eq!(Fact::new("P", &["z"]).cmp_text(&a), Ordering::Less);
    }
}
