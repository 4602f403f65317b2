mod common;

use common::*;
use modlog_core::engine::recount_nonrecursive;
use modlog_core::oracle::{dred_reference, recompute, verify};
use modlog_core::{EngineConfig, FactStore, Materialisation, Phase, Program};

fn apply_to(e: &FactStore, delete: &FactStore, insert: &FactStore) -> FactStore {
    e.iter().filter(|f| !delete.contains(f) || insert.contains(f)).chain(insert.iter()).cloned().collect()
}

fn random_step(rng: &mut rand_chacha::ChaCha8Rng, p: &Program, e: &FactStore) -> (FactStore, FactStore) {
    let mut delete = sample(rng, e, 0.3);
    delete.extend(random_dataset(rng, p, 2).iter().cloned());
    let mut insert = random_dataset(rng, p, 3);
    insert.extend(sample(rng, &delete, 0.2).iter().cloned());
    (delete, insert)
}

fn assert_counters(m: &Materialisation) {
    let expected = recount_nonrecursive(m.program(), m.stratification(), m.explicit(), m.facts());
    for f in m.facts().iter() {
        assert_eq!(m.facts().nr(f), expected.get(f).copied().unwrap_or(0), "counter of {f}\n{}", m.program());
    }
}

#[test]
fn iterated_updates_track_recompute() {
    for seed in 0..150u64 {
        let mut rng = rng(20_000 + seed);
        let p = if seed % 4 == 0 { program(STC) } else { random_program(&mut rng) };
        let e = random_dataset(&mut rng, &p, 12);
        let steps: Vec<_> = {
            let mut cur = e.clone();
            (0..4)
                .map(|_| {
                    let step = random_step(&mut rng, &p, &cur);
                    cur = apply_to(&cur, &step.0, &step.1);
                    step
                })
                .collect()
        };
        for config in [EngineConfig::default(), EngineConfig::seminaive(), EngineConfig::generic_only()] {
            let mut m = Materialisation::new(p.clone(), e.clone(), config).unwrap();
            assert_counters(&m);
            let mut cur = e.clone();
            for (delete, insert) in &steps {
                m.update(delete, insert).unwrap();
                cur = apply_to(&cur, delete, insert);
                let report = verify(m.facts(), &recompute(&p, &cur).unwrap());
                assert!(report.is_equal(), "seed {seed}\n{p}\n{report}");
                assert_counters(&m);
            }
        }
    }
}

#[test]
fn dred_reference_matches_recompute() {
    for seed in 0..150u64 {
        let mut rng = rng(30_000 + seed);
        let p = random_program(&mut rng);
        let e = random_dataset(&mut rng, &p, 12);
        let (delete, insert) = random_step(&mut rng, &p, &e);
        let got = dred_reference(&p, &e, &delete, &insert).unwrap();
        let expected = recompute(&p, &apply_to(&e, &delete, &insert)).unwrap();
        assert_eq!(got, expected, "seed {seed}\n{p}");
    }
}

#[test]
fn dred_reference_clique_edge() {
    let p = program(STC);
    let e = cycle(6);
    let gone: FactStore = [r("c1", "c2")].into_iter().collect();
    let got = dred_reference(&p, &e, &gone, &FactStore::new()).unwrap();
    assert_eq!(got, recompute(&p, &apply_to(&e, &gone, &FactStore::new())).unwrap());
    assert_eq!(got.len(), 36);
}

#[test]
fn overlapping_delete_and_insert_cancel() {
    let p = program(TC);
    let e = chain(4);
    let mut m = Materialisation::new(p, e.clone(), EngineConfig::default()).unwrap();
    let before = m.facts().sorted();
    let both: FactStore = [r("c1", "c2")].into_iter().collect();
    let stats = m.update(&both, &both).unwrap();
    assert_eq!(stats.rule_instances() + stats.join_results(), 0);
    assert_eq!(m.facts().sorted(), before);
    assert_eq!(m.explicit(), &e);
}

#[test]
fn deleting_missing_fact_is_noop() {
    let p = program(TC);
    let mut m = Materialisation::new(p, chain(3), EngineConfig::default()).unwrap();
    let before = m.facts().sorted();
    // Derived but not explicit.
    let derived: FactStore = [r("c0", "c2")].into_iter().collect();
    m.update(&derived, &FactStore::new()).unwrap();
    assert_eq!(m.facts().sorted(), before);
}

#[test]
fn phase_counts_after_chain_delete() {
    let p = program(TC);
    let mut m = Materialisation::new(p, chain(3), EngineConfig::default()).unwrap();
    let gone: FactStore = [r("c1", "c2")].into_iter().collect();
    let stats = m.update(&gone, &FactStore::new()).unwrap();
    // R(c1,c2), R(c0,c2), R(c1,c3), R(c0,c3) go away; nothing comes back.
    assert_eq!(stats.phase(Phase::Overdelete).unwrap().facts_deleted, 4);
    assert_eq!(stats.phase(Phase::Rederive).unwrap().facts_rederived, 0);
    assert_eq!(stats.phase(Phase::Insert).unwrap().facts_added, 0);
    assert_eq!(m.facts().len(), 2);
}

#[test]
fn closing_cycle_builds_clique() {
    let p = program(STC);
    let mut m = Materialisation::new(p, chain(4), EngineConfig::default()).unwrap();
    assert_eq!(m.facts().len(), 25);
    let link: FactStore = [r("c4", "c9")].into_iter().collect();
    m.update(&FactStore::new(), &link).unwrap();
    assert_eq!(m.facts().len(), 36);
}
