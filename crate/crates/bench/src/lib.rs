//! Workloads shared by the benchmarks.

use modlog_core::{parse_program, Fact, FactStore, Program};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TC: &str = "R(?x,?y), R(?y,?z) -> R(?x,?z).";
pub const STC: &str = "R(?x,?y), R(?y,?z) -> R(?x,?z).\nR(?x,?y) -> R(?y,?x).";

pub fn program(text: &str) -> Program {
    parse_program(text).expect("benchmark program parses")
}

fn edge(a: usize, b: usize) -> Fact {
    Fact::new("R", &[&format!("c{a}"), &format!("c{b}")])
}

pub fn chain(n: usize) -> FactStore {
    (0..n).map(|i| edge(i, i + 1)).collect()
}

pub fn cycle(n: usize) -> FactStore {
    (1..=n).map(|i| edge(i, i % n + 1)).collect()
}

/// `m` distinct edges `R(ci,cj)`, `i < j < n`, chosen uniformly.
pub fn dag(n: usize, m: usize, seed: u64) -> FactStore {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    index::sample(&mut rng, pairs.len(), m).into_iter().map(|k| edge(pairs[k].0, pairs[k].1)).collect()
}

/// Every `k`-th fact of `facts` in sorted order.
pub fn every(facts: &FactStore, k: usize) -> FactStore {
    facts.sorted().into_iter().step_by(k).collect()
}
