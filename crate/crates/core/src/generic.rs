//! The generic module: seminaïve realisations of the four module functions
//! for an arbitrary set of recursive rules.

use crate::apply::{match_instances_with_head, match_rule_instances, CompiledRule, Delta};
use crate::fact_store::{FactSource, FactStore, Minus, NrCounters, Union};
use crate::instrument::Tally;
use crate::module::{Module, ModuleKind};
use crate::syntax::{Fact, Rule};

struct Rules<'a> {
    compiled: Vec<CompiledRule<'a>>,
    ids: Vec<usize>,
}

impl<'a> Rules<'a> {
    fn new(rules: &'a [Rule], ids: Option<&[usize]>) -> Self {
        Rules {
            compiled: rules.iter().map(CompiledRule::new).collect(),
            ids: ids.map_or_else(|| (0..rules.len()).collect(), <[usize]>::to_vec),
        }
    }

    /// `Π[I⁺, I⁻ :: Δ]` restricted to heads accepted by `keep`.
    fn apply(
        &self,
        ipos: &dyn FactSource,
        ineg: &dyn FactSource,
        delta: Option<Delta<'_>>,
        tally: &mut Tally,
        keep: &dyn Fn(&Fact) -> bool,
    ) -> FactStore {
        let mut out = FactStore::new();
        for (rule, &id) in self.compiled.iter().zip(&self.ids) {
            match_rule_instances(rule, ipos, ineg, delta, &mut |inst| {
                tally.instance(id, || inst.values());
                let head = inst.head();
                if keep(&head) {
                    out.insert(head);
                }
            });
        }
        out
    }

    fn semi(&self, ipos: &dyn FactSource, ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore {
        let mut j = FactStore::new();
        let mut frontier: Option<FactStore> = None;
        loop {
            let current: &dyn FactSource = frontier.as_ref().map_or(delta, |f| f as &dyn FactSource);
            let view = Union::new(ipos, &j);
            let new = self.apply(&view, ineg, Some(Delta::pos(current)), tally, &|f| !view.contains(f));
            if new.is_empty() {
                return j;
            }
            j.extend(new.iter().cloned());
            frontier = Some(new);
        }
    }

    fn inv_semi(
        &self,
        ipos: &dyn FactSource,
        ineg: &dyn FactSource,
        delta: &dyn FactSource,
        cnr: Option<&NrCounters>,
        tally: &mut Tally,
    ) -> FactStore {
        let mut j = FactStore::new();
        let mut result = FactStore::new();
        let mut frontier: Option<FactStore> = None;
        loop {
            let current: &dyn FactSource = frontier.as_ref().map_or(delta, |f| f as &dyn FactSource);
            let rest = Minus::new(ipos, &j);
            let keep = |f: &Fact| {
                !delta.contains(f) && !j.contains(f) && !current.contains(f) && cnr.is_none_or(|c| c.get(f) == 0)
            };
            let new = self.apply(&rest, ineg, Some(Delta::pos(current)), tally, &keep);
            j.extend(current.iter().cloned());
            // Heads outside I⁺ belong to the answer but match no body atom.
            let mut next = FactStore::new();
            for f in new.iter() {
                result.insert(f.clone());
                if ipos.contains(f) {
                    next.insert(f.clone());
                }
            }
            if next.is_empty() {
                return result;
            }
            frontier = Some(next);
        }
    }

    fn red(&self, ipos: &dyn FactSource, ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore {
        let base = Minus::new(ipos, delta);
        let mut j = FactStore::new();
        for fact in delta.iter() {
            let mut found = false;
            for (rule, &id) in self.compiled.iter().zip(&self.ids) {
                match_instances_with_head(rule, fact, &base, ineg, &mut |inst| {
                    tally.instance(id, || inst.values());
                    found = true;
                });
                if found {
                    break;
                }
            }
            if found {
                j.insert(fact.clone());
            }
        }
        let mut frontier = j.clone();
        while !frontier.is_empty() {
            let view = Union::new(&base, &j);
            let new = self.apply(&view, ineg, Some(Delta::pos(&frontier)), tally, &|f| delta.contains(f) && !j.contains(f));
            j.extend(new.iter().cloned());
            frontier = new;
        }
        j
    }
}

/// The smallest `J` with `Π[I⁺ ∪ J, I⁻ :: Δ ∪ J] ⊆ I⁺ ∪ J`.
pub fn semi(rules: &[Rule], ipos: &dyn FactSource, ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore {
    Rules::new(rules, None).semi(ipos, ineg, delta, tally)
}

/// Plain overdeletion: the smallest `J` with `Π[I⁺, I⁻ :: Δ ∪ J] ⊆ Δ ∪ J`.
pub fn inv_semi(rules: &[Rule], ipos: &dyn FactSource, ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore {
    Rules::new(rules, None).inv_semi(ipos, ineg, delta, None, tally)
}

/// Counter-aware overdeletion: propagation stops at facts whose
/// nonrecursive counter is positive.
pub fn inv_semi_c(
    rules: &[Rule],
    ipos: &dyn FactSource,
    ineg: &dyn FactSource,
    delta: &dyn FactSource,
    cnr: &NrCounters,
    tally: &mut Tally,
) -> FactStore {
    Rules::new(rules, None).inv_semi(ipos, ineg, delta, Some(cnr), tally)
}

/// The facts of `Δ` derivable from `I⁺ ∖ Δ` in one or more steps.
pub fn generic_red(rules: &[Rule], ipos: &dyn FactSource, ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore {
    Rules::new(rules, None).red(ipos, ineg, delta, tally)
}

/// `Π[I⁺, I⁺ :: Δ⁺, Δ⁻]`.
pub fn generic_diff(rules: &[Rule], ipos: &dyn FactSource, dpos: &dyn FactSource, dneg: &dyn FactSource, tally: &mut Tally) -> FactStore {
    Rules::new(rules, None).apply(ipos, ipos, Some(Delta::both(dpos, dneg)), tally, &|_| true)
}

/// A module holding an arbitrary set of recursive rules.
pub struct GenericModule {
    rules: Vec<Rule>,
    ids: Vec<usize>,
}

impl GenericModule {
    pub fn new(rules: Vec<Rule>, ids: Vec<usize>) -> GenericModule {
        assert_eq!(rules.len(), ids.len());
        GenericModule { rules, ids }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    fn compiled(&self) -> Rules<'_> {
        Rules::new(&self.rules, Some(&self.ids))
    }
}

impl Module for GenericModule {
    fn kind(&self) -> ModuleKind {
        ModuleKind::Generic
    }

    fn rule_ids(&self) -> &[usize] {
        &self.ids
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn add(&mut self, ipos: &dyn FactSource, ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore {
        self.compiled().semi(ipos, ineg, delta, tally)
    }

    fn del(
        &mut self,
        ipos: &dyn FactSource,
        ineg: &dyn FactSource,
        delta: &dyn FactSource,
        cnr: &NrCounters,
        tally: &mut Tally,
    ) -> FactStore {
        self.compiled().inv_semi(ipos, ineg, delta, Some(cnr), tally)
    }

    fn red(&mut self, ipos: &dyn FactSource, ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore {
        self.compiled().red(ipos, ineg, delta, tally)
    }

    fn diff(&mut self, ipos: &dyn FactSource, dpos: &dyn FactSource, dneg: &dyn FactSource, tally: &mut Tally) -> FactStore {
        self.compiled().apply(ipos, ipos, Some(Delta::both(dpos, dneg)), tally, &|_| true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fact_store::Empty;
    use crate::parser::parse_program;

    const TC: &str = "R(?x,?y), R(?y,?z) -> R(?x,?z).";
    const STC: &str = "R(?x,?y), R(?y,?z) -> R(?x,?z).\nR(?x,?y) -> R(?y,?x).";

    fn r(a: &str, b: &str) -> Fact {
        Fact::new("R", &[a, b])
    }

    fn store(facts: &[Fact]) -> FactStore {
        facts.iter().cloned().collect()
    }

    fn chain_closure(n: usize) -> FactStore {
        let mut out = FactStore::new();
        for i in 0..=n {
            for j in i + 1..=n {
                out.insert(r(&format!("c{i}"), &format!("c{j}")));
            }
        }
        out
    }

    #[test]
    fn semi_chain() {
        let p = parse_program(TC).unwrap();
        let e = store(&[r("c0", "c1"), r("c1", "c2"), r("c2", "c3")]);
        let j = semi(p.rules(), &e, &e, &e, &mut Tally::new());
        assert_eq!(j, store(&[r("c0", "c2"), r("c1", "c3"), r("c0", "c3")]));
    }

    #[test]
    fn semi_empty_delta() {
        let p = parse_program(TC).unwrap();
        let e = store(&[r("c0", "c1"), r("c1", "c2")]);
        assert!(semi(p.rules(), &e, &e, &Empty, &mut Tally::new()).is_empty());
    }

    #[test]
    fn semi_single_symmetric_edge() {
        let p = parse_program(STC).unwrap();
        let e = store(&[r("a", "b")]);
        let j = semi(p.rules(), &e, &e, &e, &mut Tally::new());
        assert_eq!(j, store(&[r("b", "a"), r("a", "a"), r("b", "b")]));
    }

    #[test]
    fn inv_semi_chain() {
        let p = parse_program(TC).unwrap();
        let i = chain_closure(3);
        let delta = store(&[r("c0", "c1")]);
        let j = inv_semi(p.rules(), &i, &i, &delta, &mut Tally::new());
        assert_eq!(j, store(&[r("c0", "c2"), r("c0", "c3")]));
        assert!(inv_semi(p.rules(), &i, &i, &Empty, &mut Tally::new()).is_empty());
    }

    #[test]
    fn inv_semi_c_stops_at_counters() {
        let p = parse_program(TC).unwrap();
        let i = chain_closure(3);
        let delta = store(&[r("c0", "c1")]);
        let mut cnr = NrCounters::new();
        assert_eq!(inv_semi_c(p.rules(), &i, &i, &delta, &cnr, &mut Tally::new()), store(&[r("c0", "c2"), r("c0", "c3")]));
        cnr.set(r("c0", "c2"), 1);
        // R(c0,c3) still follows from R(c0,c1), R(c1,c3).
        assert_eq!(inv_semi_c(p.rules(), &i, &i, &delta, &cnr, &mut Tally::new()), store(&[r("c0", "c3")]));
    }

    #[test]
    fn inv_semi_c_blocks_propagation() {
        let p = parse_program(TC).unwrap();
        let i = store(&[r("a", "b"), r("b", "c"), r("a", "c"), r("c", "d"), r("a", "d"), r("b", "d")]);
        let delta = store(&[r("a", "b")]);
        let mut cnr = NrCounters::new();
        cnr.set(r("a", "c"), 1);
        // R(a,d) follows from R(a,b), R(b,d), so it goes regardless.
        assert_eq!(inv_semi_c(p.rules(), &i, &i, &delta, &cnr, &mut Tally::new()), store(&[r("a", "d")]));
    }

    #[test]
    fn red_one_step() {
        let p = parse_program(TC).unwrap();
        let i = store(&[r("a", "b"), r("b", "c"), r("a", "c")]);
        let delta = store(&[r("a", "c")]);
        assert_eq!(generic_red(p.rules(), &i, &i, &delta, &mut Tally::new()), delta);
        let delta = store(&[r("a", "b")]);
        assert!(generic_red(p.rules(), &i, &i, &delta, &mut Tally::new()).is_empty());
    }

    #[test]
    fn red_multi_step() {
        let p = parse_program(TC).unwrap();
        // R(a,d) needs R(a,c), which itself is rederived first.
        let i = store(&[r("a", "b"), r("b", "c"), r("c", "d"), r("a", "c"), r("a", "d")]);
        let delta = store(&[r("a", "c"), r("a", "d")]);
        let j = generic_red(p.rules(), &i, &i, &delta, &mut Tally::new());
        assert_eq!(j, delta);
    }

    #[test]
    fn diff_examples() {
        let p = parse_program("A(?x,?y), B(?y) -> A2(?x,?y).\nA2(?x,?y), A2(?y,?z) -> A2(?x,?z).").unwrap();
        let i = store(&[Fact::new("A", &["a", "b"]), Fact::new("B", &["b"])]);
        let dpos = store(&[Fact::new("B", &["b"])]);
        let out = generic_diff(&p.rules()[..1], &i, &dpos, &Empty, &mut Tally::new());
        assert_eq!(out, store(&[Fact::new("A2", &["a", "b"])]));
        assert!(generic_diff(&p.rules()[..1], &i, &Empty, &Empty, &mut Tally::new()).is_empty());
        let tc = parse_program(TC).unwrap();
        assert!(generic_diff(tc.rules(), &chain_closure(3), &dpos, &Empty, &mut Tally::new()).is_empty());
    }

    #[test]
    fn diff_negative_delta() {
        let p = parse_program("P(?x), not Q(?x) -> S(?x).").unwrap();
        let i = store(&[Fact::new("P", &["a"]), Fact::new("P", &["b"])]);
        let dneg = store(&[Fact::new("Q", &["a"])]);
        let out = generic_diff(p.rules(), &i, &Empty, &dneg, &mut Tally::new());
        assert_eq!(out, store(&[Fact::new("S", &["a"])]));
    }
}
