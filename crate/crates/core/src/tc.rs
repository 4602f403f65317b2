//! Transitive closure module for the single rule
//! `R(?x,?y), R(?y,?z) -> R(?x,?z)`.
//!
//! Facts produced outside the module are kept in `X_R`; every `R`-fact of
//! the materialisation is the end of a chain of facts in `X_R`, so closing
//! only needs joins with an `X_R` fact on the left.

use std::collections::VecDeque;

use crate::fact_store::{FactSource, FactStore, NrCounters};
use crate::instrument::Tally;
use crate::module::{Module, ModuleKind};
use crate::syntax::{Fact, Sym};

pub struct TcModule {
    pred: Sym,
    rule_ids: Vec<usize>,
    external: FactStore,
}

impl TcModule {
    pub fn new(pred: Sym, rule_ids: Vec<usize>) -> TcModule {
        TcModule { pred, rule_ids, external: FactStore::new() }
    }

    pub fn pred(&self) -> Sym {
        self.pred
    }

    /// The set `X_R` of external facts.
    pub fn external(&self) -> &FactStore {
        &self.external
    }

    fn r_facts(&self, delta: &dyn FactSource) -> Vec<Fact> {
        delta.scan(self.pred, None).filter(|f| f.arity() == 2).cloned().collect()
    }

    /// Every `w` reachable from `u` through `X_R`.
    fn reachable(&self, u: Sym, tally: &mut Tally) -> Vec<Sym> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::from([u]);
        while let Some(v) = queue.pop_front() {
            for edge in self.external.scan(self.pred, Some((0, v))) {
                tally.joins(1);
                let w = edge.args[1];
                if seen.insert(w) {
                    out.push(w);
                    queue.push_back(w);
                }
            }
        }
        out
    }
}

impl Module for TcModule {
    fn kind(&self) -> ModuleKind {
        ModuleKind::Tc(self.pred)
    }

    fn rule_ids(&self) -> &[usize] {
        &self.rule_ids
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn add(&mut self, ipos: &dyn FactSource, _ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore {
        let r = self.pred;
        let delta_r = self.r_facts(delta);
        let mut j = FactStore::new();
        let mut queue: VecDeque<Fact> = delta_r.iter().cloned().collect();
        self.external.extend(delta_r.iter().cloned());

        for d in &delta_r {
            let (u, v) = (d.args[0], d.args[1]);
            for e in ipos.scan(r, Some((0, v))) {
                if delta.contains(e) {
                    continue;
                }
                tally.joins(1);
                let f = Fact::binary(r, u, e.args[1]);
                if !ipos.contains(&f) && j.insert(f.clone()) {
                    queue.push_back(f);
                }
            }
        }
        while let Some(d) = queue.pop_front() {
            let (v, w) = (d.args[0], d.args[1]);
            let mut found = Vec::new();
            for x in self.external.scan(r, Some((1, v))) {
                tally.joins(1);
                let f = Fact::binary(r, x.args[0], w);
                if !ipos.contains(&f) && !j.contains(&f) {
                    found.push(f);
                }
            }
            for f in found {
                if j.insert(f.clone()) {
                    queue.push_back(f);
                }
            }
        }
        j
    }

    fn del(
        &mut self,
        ipos: &dyn FactSource,
        _ineg: &dyn FactSource,
        delta: &dyn FactSource,
        cnr: &NrCounters,
        tally: &mut Tally,
    ) -> FactStore {
        let r = self.pred;
        let delta_r = self.r_facts(delta);
        let mut j = FactStore::new();
        let mut keep = Vec::new();
        let mut seen: FactStore = delta_r.iter().cloned().collect();
        let mut queue: VecDeque<Fact> = delta_r.iter().cloned().collect();
        for d in &delta_r {
            self.external.remove(d);
        }

        let mut visit = |f: Fact, seen: &mut FactStore, queue: &mut VecDeque<Fact>| {
            if ipos.contains(&f) && !seen.contains(&f) {
                seen.insert(f.clone());
                queue.push_back(f.clone());
                if cnr.get(&f) == 0 {
                    j.insert(f);
                } else {
                    keep.push(f);
                }
            }
        };
        for d in &delta_r {
            let (u, v) = (d.args[0], d.args[1]);
            let heads: Vec<Fact> = ipos
                .scan(r, Some((0, v)))
                .map(|e| {
                    tally.joins(1);
                    Fact::binary(r, u, e.args[1])
                })
                .collect();
            for f in heads {
                visit(f, &mut seen, &mut queue);
            }
        }
        while let Some(d) = queue.pop_front() {
            let (v, w) = (d.args[0], d.args[1]);
            let heads: Vec<Fact> = self
                .external
                .scan(r, Some((1, v)))
                .map(|x| {
                    tally.joins(1);
                    Fact::binary(r, x.args[0], w)
                })
                .collect();
            for f in heads {
                visit(f, &mut seen, &mut queue);
            }
        }

        // Overdeleted facts stop being external; surviving facts with a
        // nonrecursive derivation are external from now on.
        for f in j.iter() {
            self.external.remove(f);
        }
        self.external.extend(keep);
        delta_r.iter().for_each(|d| {
            j.remove(d);
        });
        j
    }

    fn red(&mut self, _ipos: &dyn FactSource, _ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore {
        let r = self.pred;
        let mut sources: Vec<Sym> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for f in self.r_facts(delta) {
            if seen.insert(f.args[0]) {
                sources.push(f.args[0]);
            }
        }
        let mut j = FactStore::new();
        for u in sources {
            for w in self.reachable(u, tally) {
                let f = Fact::binary(r, u, w);
                if delta.contains(&f) {
                    j.insert(f);
                }
            }
        }
        j
    }

    fn diff(&mut self, _ipos: &dyn FactSource, _dpos: &dyn FactSource, _dneg: &dyn FactSource, _tally: &mut Tally) -> FactStore {
        FactStore::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fact_store::{Empty, Union};
    use crate::generic::{inv_semi_c, semi};
    use crate::parser::parse_program;

    fn r(a: &str, b: &str) -> Fact {
        Fact::new("R", &[a, b])
    }

    fn store(facts: &[Fact]) -> FactStore {
        facts.iter().cloned().collect()
    }

    fn module() -> TcModule {
        TcModule::new(Sym::new("R"), vec![0])
    }

    fn closure(edges: &FactStore) -> FactStore {
        let p = parse_program("R(?x,?y), R(?y,?z) -> R(?x,?z).").unwrap();
        let j = semi(p.rules(), edges, edges, edges, &mut Tally::new());
        edges.iter().chain(j.iter()).cloned().collect()
    }

    #[test]
    fn add_chain() {
        let mut m = module();
        let e = store(&[r("c0", "c1"), r("c1", "c2"), r("c2", "c3")]);
        let j = m.add(&e, &e, &e, &mut Tally::new());
        assert_eq!(j, store(&[r("c0", "c2"), r("c1", "c3"), r("c0", "c3")]));
        assert_eq!(m.external(), &e);
    }

    #[test]
    fn add_empty_delta() {
        let mut m = module();
        let e = store(&[r("c0", "c1")]);
        m.add(&e, &e, &e, &mut Tally::new());
        assert!(m.add(&e, &e, &Empty, &mut Tally::new()).is_empty());
        assert_eq!(m.external(), &e);
    }

    #[test]
    fn add_extends_closed_chain() {
        let mut m = module();
        let edges = store(&[r("c0", "c1"), r("c1", "c2")]);
        let i = closure(&edges);
        m.add(&edges, &edges, &edges, &mut Tally::new());
        let delta = store(&[r("c2", "c3")]);
        let ipos = Union::new(&i, &delta);
        let mut t = Tally::new();
        let j = m.add(&ipos, &ipos, &delta, &mut t);
        assert_eq!(j, store(&[r("c1", "c3"), r("c0", "c3")]));
        // Queue pops R(c2,c3), R(c1,c3), R(c0,c3); one X_R predecessor each
        // for the first two.
        assert_eq!(t.join_results, 2);
    }

    #[test]
    fn del_chain() {
        let mut m = module();
        let e = store(&[r("c0", "c1"), r("c1", "c2"), r("c2", "c3")]);
        let i = closure(&e);
        m.add(&e, &e, &e, &mut Tally::new());
        let delta = store(&[r("c0", "c1")]);
        let j = m.del(&i, &i, &delta, &NrCounters::new(), &mut Tally::new());
        assert_eq!(j, store(&[r("c0", "c2"), r("c0", "c3")]));
    }

    #[test]
    fn del_with_counter_matches_inv_semi_c() {
        let p = parse_program("R(?x,?y), R(?y,?z) -> R(?x,?z).").unwrap();
        let mut m = module();
        let e = store(&[r("c0", "c1"), r("c1", "c2"), r("c2", "c3")]);
        let i = closure(&e);
        m.add(&e, &e, &e, &mut Tally::new());
        let delta = store(&[r("c0", "c1")]);
        let mut cnr = NrCounters::new();
        cnr.set(r("c0", "c2"), 1);
        let j = m.del(&i, &i, &delta, &cnr, &mut Tally::new());
        assert!(!j.contains(&r("c0", "c2")));
        assert_eq!(j, inv_semi_c(p.rules(), &i, &i, &delta, &cnr, &mut Tally::new()));
        assert!(m.external().contains(&r("c0", "c2")));
    }

    #[test]
    fn del_ignores_other_predicates() {
        let mut m = module();
        let e = store(&[r("a", "b")]);
        m.add(&e, &e, &e, &mut Tally::new());
        let delta = store(&[Fact::new("S", &["a", "b"])]);
        assert!(m.del(&e, &e, &delta, &NrCounters::new(), &mut Tally::new()).is_empty());
    }

    #[test]
    fn red_follows_external_paths() {
        let mut m = module();
        let e = store(&[r("a", "b"), r("b", "c")]);
        m.add(&e, &e, &e, &mut Tally::new());
        let delta = store(&[r("a", "c")]);
        assert_eq!(m.red(&e, &e, &delta, &mut Tally::new()), delta);

        let mut m = module();
        let e = store(&[r("a", "b")]);
        m.add(&e, &e, &e, &mut Tally::new());
        assert!(m.red(&e, &e, &delta, &mut Tally::new()).is_empty());
    }

    #[test]
    fn red_diamond_after_delete() {
        let mut m = module();
        let e = store(&[r("a", "b"), r("b", "d"), r("a", "c"), r("c", "d")]);
        let i = closure(&e);
        m.add(&e, &e, &e, &mut Tally::new());
        let delta = store(&[r("b", "d")]);
        let over = m.del(&i, &i, &delta, &NrCounters::new(), &mut Tally::new());
        assert_eq!(over, store(&[r("a", "d")]));
        let gone: FactStore = delta.iter().chain(over.iter()).cloned().collect();
        assert_eq!(m.red(&i, &i, &gone, &mut Tally::new()), store(&[r("a", "d")]));
    }

    #[test]
    fn diff_is_empty() {
        let mut m = module();
        let e = store(&[r("a", "b"), Fact::new("S", &["a", "b"])]);
        assert!(m.diff(&e, &e, &Empty, &mut Tally::new()).is_empty());
        assert!(m.diff(&Empty, &Empty, &Empty, &mut Tally::new()).is_empty());
    }
}
