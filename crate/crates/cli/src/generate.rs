//! Synthetic graph workloads. The seed fully determines the output.

use anyhow::{bail, Result};
use modlog_core::{Fact, FactStore};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    /// `R(c0,c1), …, R(c{n-1},cn)`
    Chain,
    /// `R(c1,c2), …, R(cn,c1)`
    Cycle,
    /// `edges` distinct edges `R(ci,cj)`, `i < j`, over `n` nodes
    Dag,
    /// every `R(ci,cj)` with `i ≠ j` over `c1..cn`
    Clique,
}

fn node(i: usize) -> String {
    format!("c{i}")
}

pub fn generate(kind: Kind, pred: &str, n: usize, edges: Option<usize>, seed: u64) -> Result<FactStore> {
    if n == 0 {
        bail!("n must be at least 1");
    }
    let edge = |a: usize, b: usize| Fact::new(pred, &[&node(a), &node(b)]);
    let facts = match kind {
        Kind::Chain => (0..n).map(|i| edge(i, i + 1)).collect(),
        Kind::Cycle => (1..=n).map(|i| edge(i, i % n + 1)).collect(),
        Kind::Clique => (1..=n).flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| edge(i, j)).collect(),
        Kind::Dag => {
            let pairs = n * (n - 1) / 2;
            let m = edges.unwrap_or(pairs.min(2 * n));
            if m > pairs {
                bail!("a DAG on {n} nodes has at most {pairs} edges, {m} requested");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut chosen: Vec<(usize, usize)> = index::sample(&mut rng, pairs, m).into_iter().map(|k| unrank(n, k)).collect();
            chosen.sort_unstable();
            chosen.into_iter().map(|(i, j)| edge(i, j)).collect()
        }
    };
    Ok(facts)
}

/// The `k`-th pair `(i, j)`, `i < j < n`, in row-major order.
fn unrank(n: usize, mut k: usize) -> (usize, usize) {
    let mut i = 0;
    while k >= n - 1 - i {
        k -= n - 1 - i;
        i += 1;
    }
    (i, i + 1 + k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use modlog_core::serialise_dataset;

    #[test]
    fn chain_and_cycle() {
        assert_eq!(serialise_dataset(&generate(Kind::Chain, "R", 3, None, 0).unwrap()), "R(c0,c1).\nR(c1,c2).\nR(c2,c3).\n");
        let cycle = generate(Kind::Cycle, "R", 3, None, 0).unwrap();
        assert_eq!(cycle.len(), 3);
        assert!(cycle.contains(&Fact::new("R", &["c3", "c1"])));
    }

    #[test]
    fn unrank_covers_all_pairs() {
        let n = 6;
        let pairs: Vec<_> = (0..n * (n - 1) / 2).map(|k| unrank(n, k)).collect();
        let mut expected = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                expected.push((i, j));
            }
        }
        assert_eq!(pairs, expected);
    }

    #[test]
    fn dag_is_seeded() {
        let a = generate(Kind::Dag, "R", 10, Some(20), 7).unwrap();
        let b = generate(Kind::Dag, "R", 10, Some(20), 7).unwrap();
        assert_eq!(a.len(), 20);
        assert_eq!(serialise_dataset(&a), serialise_dataset(&b));
        assert!(generate(Kind::Dag, "R", 4, Some(7), 7).is_err());
        assert!(generate(Kind::Chain, "R", 0, None, 7).is_err());
    }

    #[test]
    fn clique_size() {
        assert_eq!(generate(Kind::Clique, "R", 5, None, 0).unwrap().len(), 20);
    }
}
