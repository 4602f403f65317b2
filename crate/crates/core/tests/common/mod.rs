#![allow(dead_code)]

use modlog_core::{parse_facts, parse_program, Fact, FactStore, Program};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub const TC: &str = "R(?x,?y), R(?y,?z) -> R(?x,?z).";
pub const STC: &str = "R(?x,?y), R(?y,?z) -> R(?x,?z).\nR(?x,?y) -> R(?y,?x).";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn program(text: &str) -> Program {
    parse_program(text).unwrap()
}

pub fn facts(text: &str) -> FactStore {
    parse_facts(text).unwrap()
}

pub fn r(a: &str, b: &str) -> Fact {
    Fact::new("R", &[a, b])
}

pub fn chain(n: usize) -> FactStore {
    (0..n).map(|i| r(&format!("c{i}"), &format!("c{}", i + 1))).collect()
}

pub fn cycle(n: usize) -> FactStore {
    (1..=n).map(|i| r(&format!("c{i}"), &format!("c{}", i % n + 1))).collect()
}

const VARS: [&str; 3] = ["?x", "?y", "?z"];
const CONSTS: [&str; 4] = ["a", "b", "c", "d"];

/// A stratifiable program over at most three predicates with at most five
/// rules. Predicates get a random level; negated atoms only use strictly
/// lower levels.
pub fn random_program(rng: &mut ChaCha8Rng) -> Program {
    loop {
        if let Some(p) = try_program(rng) {
            return p;
        }
    }
}

fn try_program(rng: &mut ChaCha8Rng) -> Option<Program> {
    let npred = rng.gen_range(1..=3);
    let preds: Vec<(String, usize, usize)> =
        (0..npred).map(|i| (format!("P{i}"), rng.gen_range(1..=2), rng.gen_range(0..=2))).collect();
    let nrules = rng.gen_range(1..=5);
    let mut text = String::new();
    for _ in 0..nrules {
        let (hname, harity, hlevel) = preds.choose(rng).unwrap().clone();
        let below: Vec<&(String, usize, usize)> = preds.iter().filter(|p| p.2 <= hlevel).collect();
        let strictly: Vec<&(String, usize, usize)> = preds.iter().filter(|p| p.2 < hlevel).collect();
        let mut bound: Vec<&str> = Vec::new();
        let mut body: Vec<String> = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let (name, arity, _) = below.choose(rng).unwrap();
            let args: Vec<&str> = (0..*arity)
                .map(|_| if rng.gen_bool(0.85) { *VARS.choose(rng).unwrap() } else { *CONSTS.choose(rng).unwrap() })
                .collect();
            bound.extend(args.iter().filter(|a| a.starts_with('?')));
            body.push(format!("{name}({})", args.join(",")));
        }
        if bound.is_empty() {
            continue;
        }
        if !strictly.is_empty() && rng.gen_bool(0.4) {
            let (name, arity, _) = strictly.choose(rng).unwrap();
            let args: Vec<&str> = (0..*arity).map(|_| *bound.choose(rng).unwrap()).collect();
            body.push(format!("not {name}({})", args.join(",")));
        }
        let head: Vec<&str> = (0..harity).map(|_| *bound.choose(rng).unwrap()).collect();
        text.push_str(&format!("{} -> {hname}({}).\n", body.join(", "), head.join(",")));
    }
    // Sometimes a transitive (and symmetric) closure rule for a binary predicate.
    if let Some((name, _, _)) = preds.iter().find(|p| p.1 == 2) {
        if rng.gen_bool(0.35) {
            text.push_str(&format!("{name}(?x,?y), {name}(?y,?z) -> {name}(?x,?z).\n"));
            if rng.gen_bool(0.5) {
                text.push_str(&format!("{name}(?x,?y) -> {name}(?y,?x).\n"));
            }
        }
    }
    parse_program(&text).ok()
}

/// Up to `max` facts over the program's predicates and four constants.
pub fn random_dataset(rng: &mut ChaCha8Rng, program: &Program, max: usize) -> FactStore {
    let preds: Vec<_> = program.arities().into_iter().collect();
    let mut out = FactStore::new();
    if preds.is_empty() {
        return out;
    }
    for _ in 0..rng.gen_range(0..=max) {
        let (p, arity) = preds.choose(rng).unwrap();
        let args: Vec<&str> = (0..*arity).map(|_| *CONSTS.choose(rng).unwrap()).collect();
        out.insert(Fact::new(*p, &args));
    }
    out
}

/// Random directed edges over `n` vertices named `v0…`.
pub fn random_graph(rng: &mut ChaCha8Rng, pred: &str, n: usize, edges: usize) -> FactStore {
    let mut out = FactStore::new();
    for _ in 0..edges {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        out.insert(Fact::new(pred, &[&format!("v{a}"), &format!("v{b}")]));
    }
    out
}

/// A random subset of `facts`, each kept with probability `p`.
pub fn sample(rng: &mut ChaCha8Rng, facts: &FactStore, p: f64) -> FactStore {
    facts.sorted().into_iter().filter(|_| rng.gen_bool(p)).collect()
}

pub fn to_set(facts: &FactStore) -> std::collections::HashSet<Fact> {
    facts.iter().cloned().collect()
}

pub fn to_store(facts: &std::collections::HashSet<Fact>) -> FactStore {
    facts.iter().cloned().collect()
}
