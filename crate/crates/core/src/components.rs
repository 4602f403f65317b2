//! Disjoint vertex sets with explicit member lists, supporting removal of a
//! whole set.

use std::collections::HashMap;

use crate::syntax::Sym;

#[derive(Clone, Debug, Default)]
pub struct Components {
    node: HashMap<Sym, usize>,
    parent: Vec<usize>,
    members: Vec<Vec<Sym>>,
    free: Vec<usize>,
}

impl Components {
    pub fn new() -> Components {
        Components::default()
    }

    /// Number of vertices currently in some component.
    pub fn vertex_count(&self) -> usize {
        self.node.len()
    }

    pub fn contains(&self, v: Sym) -> bool {
        self.node.contains_key(&v)
    }

    /// Adds `{v}` unless `v` is already present; returns true if added.
    pub fn add_vertex(&mut self, v: Sym) -> bool {
        if self.node.contains_key(&v) {
            return false;
        }
        let id = match self.free.pop() {
            Some(id) => {
                self.parent[id] = id;
                self.members[id] = vec![v];
                id
            }
            None => {
                self.parent.push(self.parent.len());
                self.members.push(vec![v]);
                self.parent.len() - 1
            }
        };
        self.node.insert(v, id);
        true
    }

    fn find_id(&mut self, mut id: usize) -> usize {
        while self.parent[id] != id {
            self.parent[id] = self.parent[self.parent[id]];
            id = self.parent[id];
        }
        id
    }

    /// Representative of the component holding `v`.
    pub fn find(&mut self, v: Sym) -> Option<usize> {
        let id = *self.node.get(&v)?;
        Some(self.find_id(id))
    }

    pub fn members(&self, root: usize) -> &[Sym] {
        &self.members[root]
    }

    /// Merges two distinct components, returning the new root.
    pub fn union(&mut self, a: usize, b: usize) -> usize {
        debug_assert!(a != b && self.parent[a] == a && self.parent[b] == b);
        let (big, small) = if self.members[a].len() >= self.members[b].len() { (a, b) } else { (b, a) };
        let moved = std::mem::take(&mut self.members[small]);
        self.members[big].extend(moved);
        self.parent[small] = big;
        big
    }

    /// Removes the component rooted at `root` together with its vertices.
    pub fn remove(&mut self, root: usize) {
        for v in std::mem::take(&mut self.members[root]) {
            if let Some(id) = self.node.remove(&v) {
                self.free.push(id);
            }
        }
    }

    /// Current components as sorted vertex lists, sorted.
    pub fn sets(&self) -> Vec<Vec<Sym>> {
        let mut out: Vec<Vec<Sym>> = self
            .node
            .values()
            .filter(|&&id| self.parent[id] == id)
            .map(|&id| {
                let mut m = self.members[id].clone();
                m.sort_by(|a, b| a.cmp_text(*b));
                m
            })
            .collect();
        out.sort_by(|a, b| a[0].cmp_text(b[0]));
        out
    }
}
