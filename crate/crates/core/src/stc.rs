//! Symmetric-transitive closure module for the rules
//! `R(?x,?y), R(?y,?z) -> R(?x,?z)` and `R(?x,?y) -> R(?y,?x)`.
//!
//! `R` is treated as an undirected graph whose connected components `C_R`
//! are kept in a union-find structure; the closure is every pair inside a
//! component. `Y_R` holds facts that survive overdeletion through their
//! nonrecursive counters until rederivation replays them.

use std::collections::HashSet;

use crate::components::Components;
use crate::fact_store::{FactSource, FactStore, NrCounters};
use crate::instrument::Tally;
use crate::module::{Module, ModuleKind};
use crate::syntax::{Fact, Sym};

pub struct StcModule {
    pred: Sym,
    rule_ids: Vec<usize>,
    components: Components,
    pending: FactStore,
}

impl StcModule {
    pub fn new(pred: Sym, rule_ids: Vec<usize>) -> StcModule {
        StcModule { pred, rule_ids, components: Components::new(), pending: FactStore::new() }
    }

    pub fn pred(&self) -> Sym {
        self.pred
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    /// The set `Y_R`.
    pub fn pending(&self) -> &FactStore {
        &self.pending
    }

    /// All pair facts over the current components.
    pub fn closure(&self) -> FactStore {
        let mut out = FactStore::new();
        for set in self.components.sets() {
            for &u in &set {
                for &v in &set {
                    out.insert(Fact::binary(self.pred, u, v));
                }
            }
        }
        out
    }

    fn r_facts(&self, delta: &dyn FactSource) -> Vec<Fact> {
        delta.scan(self.pred, None).filter(|f| f.arity() == 2).cloned().collect()
    }

    /// Adds the edges to `C_R` and returns the pair facts this creates.
    pub fn close_edges<'a>(&mut self, edges: impl IntoIterator<Item = &'a Fact>, tally: &mut Tally) -> FactStore {
        let r = self.pred;
        let mut j = FactStore::new();
        for edge in edges {
            let (u, v) = (edge.args[0], edge.args[1]);
            for x in [u, v] {
                if self.components.add_vertex(x) {
                    tally.joins(1);
                    j.insert(Fact::binary(r, x, x));
                }
            }
            let a = self.components.find(u).unwrap();
            let b = self.components.find(v).unwrap();
            if a != b {
                for &x in self.components.members(a) {
                    for &y in self.components.members(b) {
                        tally.joins(2);
                        j.insert(Fact::binary(r, x, y));
                        j.insert(Fact::binary(r, y, x));
                    }
                }
                self.components.union(a, b);
            }
        }
        j
    }
}

impl Module for StcModule {
    fn kind(&self) -> ModuleKind {
        ModuleKind::Stc(self.pred)
    }

    fn rule_ids(&self) -> &[usize] {
        &self.rule_ids
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn add(&mut self, ipos: &dyn FactSource, _ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore {
        let edges = self.r_facts(delta);
        let mut j = self.close_edges(&edges, tally);
        let old: Vec<Fact> = j.iter().filter(|f| ipos.contains(f)).cloned().collect();
        for f in &old {
            j.remove(f);
        }
        j
    }

    fn del(
        &mut self,
        _ipos: &dyn FactSource,
        _ineg: &dyn FactSource,
        delta: &dyn FactSource,
        cnr: &NrCounters,
        tally: &mut Tally,
    ) -> FactStore {
        let r = self.pred;
        let edges = self.r_facts(delta);
        let mut j = FactStore::new();
        let mut done = HashSet::new();
        for edge in &edges {
            let (Some(a), Some(b)) = (self.components.find(edge.args[0]), self.components.find(edge.args[1])) else {
                continue;
            };
            if a != b || !done.insert(a) {
                continue;
            }
            let members = self.components.members(a).to_vec();
            for &x in &members {
                for &y in &members {
                    tally.joins(1);
                    let f = Fact::binary(r, x, y);
                    if cnr.get(&f) == 0 {
                        j.insert(f);
                    } else {
                        self.pending.insert(f);
                    }
                }
            }
            self.components.remove(a);
        }
        for edge in &edges {
            j.remove(edge);
        }
        j
    }

    fn red(&mut self, _ipos: &dyn FactSource, _ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore {
        let pending = std::mem::take(&mut self.pending);
        let mut j = self.close_edges(pending.iter(), tally);
        let outside: Vec<Fact> = j.iter().filter(|f| !delta.contains(f)).cloned().collect();
        for f in &outside {
            j.remove(f);
        }
        j
    }

    fn diff(&mut self, _ipos: &dyn FactSource, _dpos: &dyn FactSource, _dneg: &dyn FactSource, _tally: &mut Tally) -> FactStore {
        FactStore::new()
    }
}
