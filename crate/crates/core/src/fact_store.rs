//! Indexed fact storage, composite dataset views and nonrecursive
//! derivation counters.

use std::collections::HashMap;
use std::fmt;

use indexmap::{IndexMap, IndexSet};
use smallvec::SmallVec;

use crate::error::Error;
use crate::syntax::{Atom, Fact, Substitution, Sym, Term};

/// Read access to a set of facts.
///
/// `scan` must yield every fact of `pred` (restricted to those whose argument
/// at `key.0` equals `key.1` when a key is given) exactly once.
pub trait FactSource {
    fn contains(&self, fact: &Fact) -> bool;

    fn scan<'a>(&'a self, pred: Sym, key: Option<(usize, Sym)>) -> Box<dyn Iterator<Item = &'a Fact> + 'a>;

    fn iter<'a>(&'a self) -> Box<dyn Iterator<Item = &'a Fact> + 'a>;

    /// True when a position lookup on `pred` is served by an index.
    fn indexed(&self, pred: Sym, pos: usize) -> bool;
}

#[derive(Clone, Default)]
struct Relation {
    facts: IndexSet<Fact>,
    positions: SmallVec<[usize; 2]>,
    index: SmallVec<[HashMap<Sym, IndexSet<Fact>>; 2]>,
}

impl Relation {
    fn new(arity: usize) -> Relation {
        let positions: SmallVec<[usize; 2]> = match arity {
            0 => SmallVec::new(),
            2 => SmallVec::from_slice(&[0, 1]),
            _ => SmallVec::from_slice(&[0]),
        };
        let index = positions.iter().map(|_| HashMap::new()).collect();
        Relation { facts: IndexSet::new(), positions, index }
    }

    fn slot(&self, pos: usize) -> Option<usize> {
        self.positions.iter().position(|&p| p == pos)
    }
}

/// A set of facts with per-predicate argument indexes and a map of
/// nonrecursive derivation counters.
///
/// Binary predicates are indexed on both arguments; other predicates on the
/// first argument only.
#[derive(Clone, Default)]
pub struct FactStore {
    rels: IndexMap<Sym, Relation>,
    len: usize,
    nr: NrCounters,
}

impl FactStore {
    pub fn new() -> FactStore {
        FactStore::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, fact: Fact) -> bool {
        let rel = self.rels.entry(fact.pred).or_insert_with(|| Relation::new(fact.arity()));
        if rel.facts.contains(&fact) {
            return false;
        }
        for (slot, &pos) in rel.positions.iter().enumerate() {
            if let Some(&value) = fact.args.get(pos) {
                rel.index[slot].entry(value).or_default().insert(fact.clone());
            }
        }
        rel.facts.insert(fact);
        self.len += 1;
        true
    }

    pub fn remove(&mut self, fact: &Fact) -> bool {
        let Some(rel) = self.rels.get_mut(&fact.pred) else {
            return false;
        };
        if !rel.facts.swap_remove(fact) {
            return false;
        }
        for (slot, &pos) in rel.positions.iter().enumerate() {
            if let Some(value) = fact.args.get(pos) {
                if let Some(bucket) = rel.index[slot].get_mut(value) {
                    bucket.swap_remove(fact);
                    if bucket.is_empty() {
                        rel.index[slot].remove(value);
                    }
                }
            }
        }
        self.len -= 1;
        true
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.rels.get(&fact.pred).is_some_and(|r| r.facts.contains(fact))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> + '_ {
        self.rels.values().flat_map(|r| r.facts.iter())
    }

    /// Facts of one predicate.
    pub fn facts_of(&self, pred: Sym) -> impl Iterator<Item = &Fact> + '_ {
        self.rels.get(&pred).into_iter().flat_map(|r| r.facts.iter())
    }

    pub fn count_of(&self, pred: Sym) -> usize {
        self.rels.get(&pred).map_or(0, |r| r.facts.len())
    }

    pub fn extend<I: IntoIterator<Item = Fact>>(&mut self, facts: I) {
        for f in facts {
            self.insert(f);
        }
    }

    /// Copies every fact of `source` into a fresh store.
    pub fn collect_from(source: &dyn FactSource) -> FactStore {
        source.iter().cloned().collect()
    }

    /// Facts in lexicographic (predicate, args) order.
    pub fn sorted(&self) -> Vec<Fact> {
        let mut facts: Vec<Fact> = self.iter().cloned().collect();
        facts.sort_by(Fact::cmp_text);
        facts
    }

    pub fn is_subset(&self, other: &dyn FactSource) -> bool {
        self.iter().all(|f| other.contains(f))
    }

    pub fn nr(&self, fact: &Fact) -> u32 {
        self.nr.get(fact)
    }

    /// Adjusts the nonrecursive counter of `fact` by `delta` and returns the
    /// new value.
    pub fn adjust_nr(&mut self, fact: &Fact, delta: i32) -> Result<u32, Error> {
        self.nr.adjust(fact, delta)
    }

    pub fn counters(&self) -> &NrCounters {
        &self.nr
    }

    pub fn counters_mut(&mut self) -> &mut NrCounters {
        &mut self.nr
    }
}

impl FactSource for FactStore {
    fn contains(&self, fact: &Fact) -> bool {
        FactStore::contains(self, fact)
    }

    fn scan<'a>(&'a self, pred: Sym, key: Option<(usize, Sym)>) -> Box<dyn Iterator<Item = &'a Fact> + 'a> {
        let Some(rel) = self.rels.get(&pred) else {
            return Box::new(std::iter::empty());
        };
        match key {
            None => Box::new(rel.facts.iter()),
            Some((pos, value)) => match rel.slot(pos) {
                Some(slot) => Box::new(rel.index[slot].get(&value).into_iter().flat_map(|b| b.iter())),
                None => Box::new(rel.facts.iter().filter(move |f| f.args.get(pos) == Some(&value))),
            },
        }
    }

    fn iter<'a>(&'a self) -> Box<dyn Iterator<Item = &'a Fact> + 'a> {
        Box::new(FactStore::iter(self))
    }

    fn indexed(&self, pred: Sym, pos: usize) -> bool {
        self.rels.get(&pred).is_none_or(|r| r.slot(pos).is_some())
    }
}

impl FromIterator<Fact> for FactStore {
    fn from_iter<I: IntoIterator<Item = Fact>>(iter: I) -> Self {
        let mut store = FactStore::new();
        store.extend(iter);
        store
    }
}

impl<'a> FromIterator<&'a Fact> for FactStore {
    fn from_iter<I: IntoIterator<Item = &'a Fact>>(iter: I) -> Self {
        iter.into_iter().cloned().collect()
    }
}

/// Set equality; counters are ignored.
impl PartialEq for FactStore {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.iter().all(|f| other.contains(f))
    }
}

impl Eq for FactStore {}

impl fmt::Debug for FactStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.sorted()).finish()
    }
}

/// Per-fact count of currently valid nonrecursive derivations (explicit
/// membership counts as one).
#[derive(Clone, Default, Debug, PartialEq, Eq)]
pub struct NrCounters(HashMap<Fact, u32>);

impl NrCounters {
    pub fn new() -> NrCounters {
        NrCounters::default()
    }

    pub fn get(&self, fact: &Fact) -> u32 {
        self.0.get(fact).copied().unwrap_or(0)
    }

    pub fn adjust(&mut self, fact: &Fact, delta: i32) -> Result<u32, Error> {
        let current = self.get(fact) as i64;
        let next = current + delta as i64;
        if next < 0 {
            return Err(Error::NegativeCounter { fact: fact.to_string() });
        }
        if next == 0 {
            self.0.remove(fact);
        } else {
            self.0.insert(fact.clone(), next as u32);
        }
        Ok(next as u32)
    }

    pub fn set(&mut self, fact: Fact, value: u32) {
        if value == 0 {
            self.0.remove(&fact);
        } else {
            self.0.insert(fact, value);
        }
    }

    /// Facts with a nonzero counter.
    pub fn iter(&self) -> impl Iterator<Item = (&Fact, u32)> + '_ {
        self.0.iter().map(|(f, &c)| (f, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `left ∖ right`.
#[derive(Clone, Copy)]
pub struct Minus<'a> {
    pub left: &'a dyn FactSource,
    pub right: &'a dyn FactSource,
}

impl<'a> Minus<'a> {
    pub fn new(left: &'a dyn FactSource, right: &'a dyn FactSource) -> Self {
        Minus { left, right }
    }
}

impl FactSource for Minus<'_> {
    fn contains(&self, fact: &Fact) -> bool {
        self.left.contains(fact) && !self.right.contains(fact)
    }

    fn scan<'b>(&'b self, pred: Sym, key: Option<(usize, Sym)>) -> Box<dyn Iterator<Item = &'b Fact> + 'b> {
        Box::new(self.left.scan(pred, key).filter(move |f| !self.right.contains(f)))
    }

    fn iter<'b>(&'b self) -> Box<dyn Iterator<Item = &'b Fact> + 'b> {
        Box::new(self.left.iter().filter(move |f| !self.right.contains(f)))
    }

    fn indexed(&self, pred: Sym, pos: usize) -> bool {
        self.left.indexed(pred, pos)
    }
}

/// `left ∪ right`, yielding facts present in both only once.
#[derive(Clone, Copy)]
pub struct Union<'a> {
    pub left: &'a dyn FactSource,
    pub right: &'a dyn FactSource,
}

impl<'a> Union<'a> {
    pub fn new(left: &'a dyn FactSource, right: &'a dyn FactSource) -> Self {
        Union { left, right }
    }
}

impl FactSource for Union<'_> {
    fn contains(&self, fact: &Fact) -> bool {
        self.left.contains(fact) || self.right.contains(fact)
    }

    fn scan<'b>(&'b self, pred: Sym, key: Option<(usize, Sym)>) -> Box<dyn Iterator<Item = &'b Fact> + 'b> {
        Box::new(self.left.scan(pred, key).chain(self.right.scan(pred, key).filter(move |f| !self.left.contains(f))))
    }

    fn iter<'b>(&'b self) -> Box<dyn Iterator<Item = &'b Fact> + 'b> {
        Box::new(self.left.iter().chain(self.right.iter().filter(move |f| !self.left.contains(f))))
    }

    fn indexed(&self, pred: Sym, pos: usize) -> bool {
        self.left.indexed(pred, pos) && self.right.indexed(pred, pos)
    }
}

/// The empty dataset.
pub struct Empty;

impl FactSource for Empty {
    fn contains(&self, _: &Fact) -> bool {
        false
    }

    fn scan<'b>(&'b self, _: Sym, _: Option<(usize, Sym)>) -> Box<dyn Iterator<Item = &'b Fact> + 'b> {
        Box::new(std::iter::empty())
    }

    fn iter<'b>(&'b self) -> Box<dyn Iterator<Item = &'b Fact> + 'b> {
        Box::new(std::iter::empty())
    }

    fn indexed(&self, _: Sym, _: usize) -> bool {
        true
    }
}

/// The composite view `(base ∖ minus) ∪ plus`, realised without copying.
#[derive(Clone, Copy)]
pub struct DatasetView<'a> {
    pub base: &'a dyn FactSource,
    pub minus: &'a dyn FactSource,
    pub plus: &'a dyn FactSource,
}

impl<'a> DatasetView<'a> {
    pub fn new(base: &'a dyn FactSource, minus: &'a dyn FactSource, plus: &'a dyn FactSource) -> DatasetView<'a> {
        DatasetView { base, minus, plus }
    }

    fn in_base(&self, fact: &Fact) -> bool {
        self.base.contains(fact) && !self.minus.contains(fact)
    }
}

impl FactSource for DatasetView<'_> {
    fn contains(&self, fact: &Fact) -> bool {
        self.in_base(fact) || self.plus.contains(fact)
    }

    fn scan<'b>(&'b self, pred: Sym, key: Option<(usize, Sym)>) -> Box<dyn Iterator<Item = &'b Fact> + 'b> {
        let base = self.base.scan(pred, key).filter(move |f| !self.minus.contains(f));
        let plus = self.plus.scan(pred, key).filter(move |f| !self.in_base(f));
        Box::new(base.chain(plus))
    }

    fn iter<'b>(&'b self) -> Box<dyn Iterator<Item = &'b Fact> + 'b> {
        let base = self.base.iter().filter(move |f| !self.minus.contains(f));
        let plus = self.plus.iter().filter(move |f| !self.in_base(f));
        Box::new(base.chain(plus))
    }

    fn indexed(&self, pred: Sym, pos: usize) -> bool {
        self.base.indexed(pred, pos) && self.plus.indexed(pred, pos)
    }
}

/// All substitutions grounding `pattern` inside `view`, in scan order.
pub fn match_pattern(pattern: &Atom, view: &dyn FactSource) -> Vec<Substitution> {
    let key = pattern.args.iter().enumerate().find_map(|(i, t)| match t {
        Term::Const(c) if view.indexed(pattern.pred, i) => Some((i, *c)),
        _ => None,
    });
    let mut out = Vec::new();
    'facts: for fact in view.scan(pattern.pred, key) {
        if fact.arity() != pattern.arity() {
            continue;
        }
        let mut subst = Substitution::new();
        for (term, &value) in pattern.args.iter().zip(fact.args.iter()) {
            match term {
                Term::Const(c) if *c != value => continue 'facts,
                Term::Const(_) => {}
                Term::Var(v) => match subst.get(*v) {
                    Some(bound) if bound != value => continue 'facts,
                    Some(_) => {}
                    None => {
                        subst.insert(*v, value);
                    }
                },
            }
        }
        out.push(subst);
    }
    out
}
