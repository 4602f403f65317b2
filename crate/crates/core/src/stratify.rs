//! Stratification of programs with negation.
//!
//! Predicates are grouped into strongly connected components of the
//! dependency graph; a component's stratum is the longest path to it where
//! negative edges weigh one and positive edges zero.

use std::collections::{HashMap, HashSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::Error;
use crate::syntax::{Program, Rule, Sym};

/// The rules of one stratum, as indexes into the program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stratum {
    pub nonrecursive: Vec<usize>,
    pub recursive: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratification {
    lambda: HashMap<Sym, usize>,
    max: usize,
    strata: Vec<Stratum>,
}

impl Stratification {
    /// The stratum of `pred`; predicates outside the program sit in stratum 1.
    pub fn stratum_of(&self, pred: Sym) -> usize {
        self.lambda.get(&pred).copied().unwrap_or(1)
    }

    pub fn lambda(&self) -> &HashMap<Sym, usize> {
        &self.lambda
    }

    /// Number of strata `S` (at least 1).
    pub fn max_stratum(&self) -> usize {
        self.max
    }

    /// Rules of stratum `s`, `1 ≤ s ≤ S`.
    pub fn stratum(&self, s: usize) -> &Stratum {
        &self.strata[s - 1]
    }

    pub fn strata(&self) -> impl Iterator<Item = (usize, &Stratum)> {
        self.strata.iter().enumerate().map(|(i, st)| (i + 1, st))
    }

    /// Builds the rule partition for a given predicate → stratum map after
    /// checking it is a valid stratification of `program`.
    pub fn from_lambda(program: &Program, lambda: HashMap<Sym, usize>) -> Result<Stratification, Error> {
        let level = |p: Sym| lambda.get(&p).copied().unwrap_or(1);
        for (&pred, &s) in &lambda {
            if s == 0 {
                return Err(Error::InvalidStratification(format!("{pred} is assigned stratum 0")));
            }
        }
        for rule in program.rules() {
            let h = level(rule.head.pred);
            if let Some(a) = rule.pos.iter().find(|a| level(a.pred) > h) {
                return Err(Error::InvalidStratification(format!("{} is above the head of `{rule}`", a.pred)));
            }
            if let Some(a) = rule.neg.iter().find(|a| level(a.pred) >= h) {
                return Err(Error::InvalidStratification(format!("negated {} is not below the head of `{rule}`", a.pred)));
            }
        }
        let max = lambda.values().copied().max().unwrap_or(1).max(1);
        let mut strata = vec![Stratum::default(); max];
        for (i, rule) in program.rules().iter().enumerate() {
            let h = level(rule.head.pred);
            if is_recursive(rule, h, &level) {
                strata[h - 1].recursive.push(i);
            } else {
                strata[h - 1].nonrecursive.push(i);
            }
        }
        Ok(Stratification { lambda, max, strata })
    }
}

/// A rule is recursive when some positive body predicate shares the head's
/// stratum.
fn is_recursive(rule: &Rule, head_level: usize, level: &dyn Fn(Sym) -> usize) -> bool {
    rule.pos.iter().any(|a| level(a.pred) == head_level)
}

/// Computes the canonical stratification of `program`.
pub fn stratify(program: &Program) -> Result<Stratification, Error> {
    let mut graph: DiGraph<Sym, bool> = DiGraph::new();
    let mut nodes: HashMap<Sym, NodeIndex> = HashMap::new();
    for pred in program.predicates() {
        nodes.insert(pred, graph.add_node(pred));
    }
    for rule in program.rules() {
        let head = nodes[&rule.head.pred];
        for atom in &rule.pos {
            let from = nodes[&atom.pred];
            if graph.find_edge(from, head).is_none() {
                graph.add_edge(from, head, false);
            }
        }
        for atom in &rule.neg {
            // A negative edge dominates a positive one between the same pair.
            graph.update_edge(nodes[&atom.pred], head, true);
        }
    }

    let sccs = tarjan_scc(&graph);
    let mut component = vec![0usize; graph.node_count()];
    for (c, scc) in sccs.iter().enumerate() {
        for &n in scc {
            component[n.index()] = c;
        }
    }
    for e in graph.edge_indices() {
        let (a, b) = graph.edge_endpoints(e).unwrap();
        if graph[e] && component[a.index()] == component[b.index()] {
            return Err(Error::NotStratifiable { cycle: cycle_witness(&graph, &component, a, b) });
        }
    }

    // tarjan_scc yields components in reverse topological order.
    let mut level = vec![1usize; sccs.len()];
    for c in (0..sccs.len()).rev() {
        for &n in &sccs[c] {
            for e in graph.edges_directed(n, petgraph::Direction::Incoming) {
                use petgraph::visit::EdgeRef;
                let src = component[e.source().index()];
                if src != c {
                    level[c] = level[c].max(level[src] + usize::from(*e.weight()));
                }
            }
        }
    }
    let lambda = nodes.iter().map(|(&p, &n)| (p, level[component[n.index()]])).collect();
    Stratification::from_lambda(program, lambda)
}

/// A cycle through the negative edge `a → b`: `a, b, …, a`.
fn cycle_witness(graph: &DiGraph<Sym, bool>, component: &[usize], a: NodeIndex, b: NodeIndex) -> Vec<String> {
    let c = component[a.index()];
    let mut prev: HashMap<NodeIndex, NodeIndex> = HashMap::new();
    let mut seen: HashSet<NodeIndex> = HashSet::from([b]);
    let mut queue = VecDeque::from([b]);
    while let Some(n) = queue.pop_front() {
        if n == a {
            break;
        }
        for m in graph.neighbors(n) {
            if component[m.index()] == c && seen.insert(m) {
                prev.insert(m, n);
                queue.push_back(m);
            }
        }
    }
    let mut path = vec![a];
    let mut n = a;
    while n != b {
        n = prev[&n];
        path.push(n);
    }
    path.push(a);
    path.reverse();
    path.into_iter().map(|n| graph[n].to_string()).collect()
}
