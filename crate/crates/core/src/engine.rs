//! Materialisation and incremental maintenance over stratified programs.
//!
//! In modular mode each stratum's recursive rules are split into modules
//! (generic, transitive closure, symmetric-transitive closure) and the
//! engine only combines their outputs. Deletions use counter-aware
//! overdeletion followed by rederivation and insertion.

use std::collections::HashMap;
use std::time::Instant;

use crate::apply::{match_rule_instances, CompiledRule, Delta};
use crate::error::Error;
use crate::fact_store::{DatasetView, FactSource, FactStore, Minus, NrCounters, Union};
use crate::generic::GenericModule;
use crate::instrument::{Phase, PhaseStats, RunStats, Tally};
use crate::module::{Module, ModuleKind};
use crate::stc::StcModule;
use crate::stratify::{stratify, Stratification};
use crate::syntax::{Fact, Program, Rule, Sym, Term};
use crate::tc::TcModule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Plain seminaïve evaluation; one generic module per stratum for updates.
    Seminaive,
    #[default]
    Modular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub mode: Mode,
    /// Recognise transitive and symmetric-transitive rule pairs. When off
    /// every recursive rule goes to the generic module.
    pub detect_modules: bool,
    /// Remember every rule instance during materialisation so repeated
    /// enumerations can be reported.
    pub log_instances: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { mode: Mode::Modular, detect_modules: true, log_instances: false }
    }
}

impl EngineConfig {
    pub fn seminaive() -> Self {
        EngineConfig { mode: Mode::Seminaive, ..EngineConfig::default() }
    }

    pub fn generic_only() -> Self {
        EngineConfig { detect_modules: false, ..EngineConfig::default() }
    }
}

/// One module of a stratum: its kind and the program indexes of its rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleSpec {
    pub kind: ModuleKind,
    pub rules: Vec<usize>,
}

fn var_triple(atom: &crate::syntax::Atom) -> Option<(Sym, Sym)> {
    match atom.args.as_slice() {
        [Term::Var(a), Term::Var(b)] => Some((*a, *b)),
        _ => None,
    }
}

/// `R(?x,?y), R(?y,?z) -> R(?x,?z)` up to renaming and body order.
pub fn transitive_pred(rule: &Rule) -> Option<Sym> {
    if !rule.neg.is_empty() || rule.pos.len() != 2 {
        return None;
    }
    let r = rule.head.pred;
    if rule.pos.iter().any(|a| a.pred != r) {
        return None;
    }
    let (x, z) = var_triple(&rule.head)?;
    let (a, b) = var_triple(&rule.pos[0])?;
    let (c, d) = var_triple(&rule.pos[1])?;
    let chained = |(p, q): (Sym, Sym), (s, t): (Sym, Sym)| p == x && q == s && t == z && q != x && q != z;
    (x != z && (chained((a, b), (c, d)) || chained((c, d), (a, b)))).then_some(r)
}

/// `R(?x,?y) -> R(?y,?x)` up to renaming.
pub fn symmetric_pred(rule: &Rule) -> Option<Sym> {
    if !rule.neg.is_empty() || rule.pos.len() != 1 || rule.pos[0].pred != rule.head.pred {
        return None;
    }
    let (x, y) = var_triple(&rule.pos[0])?;
    let (h0, h1) = var_triple(&rule.head)?;
    (x != y && h0 == y && h1 == x).then_some(rule.head.pred)
}

/// Splits the recursive rules of every stratum into modules. Index `s - 1`
/// of the result holds stratum `s`.
pub fn detect_modules(program: &Program, strat: &Stratification, enabled: bool) -> Vec<Vec<ModuleSpec>> {
    let rules = program.rules();
    strat
        .strata()
        .map(|(_, stratum)| {
            let mut remaining: Vec<usize> = stratum.recursive.clone();
            let mut specs = Vec::new();
            if enabled {
                // One specialised module per predicate; further matching
                // rules for the same predicate go to the generic module.
                let mut taken: Vec<Sym> = Vec::new();
                for &id in &stratum.recursive {
                    let Some(r) = transitive_pred(&rules[id]) else { continue };
                    if taken.contains(&r) {
                        continue;
                    }
                    taken.push(r);
                    match remaining.iter().copied().find(|&k| symmetric_pred(&rules[k]) == Some(r)) {
                        Some(k) => {
                            specs.push(ModuleSpec { kind: ModuleKind::Stc(r), rules: vec![id, k] });
                            remaining.retain(|&x| x != id && x != k);
                        }
                        None => {
                            specs.push(ModuleSpec { kind: ModuleKind::Tc(r), rules: vec![id] });
                            remaining.retain(|&x| x != id);
                        }
                    }
                }
            }
            if !remaining.is_empty() {
                specs.push(ModuleSpec { kind: ModuleKind::Generic, rules: remaining });
            }
            specs
        })
        .collect()
}

fn build_module(program: &Program, spec: &ModuleSpec) -> Box<dyn Module> {
    match spec.kind {
        ModuleKind::Generic => {
            let rules = spec.rules.iter().map(|&i| program.rules()[i].clone()).collect();
            Box::new(GenericModule::new(rules, spec.rules.clone()))
        }
        ModuleKind::Tc(r) => Box::new(TcModule::new(r, spec.rules.clone())),
        ModuleKind::Stc(r) => Box::new(StcModule::new(r, spec.rules.clone())),
    }
}

/// A program together with its explicit facts and their materialisation.
pub struct Materialisation {
    program: Program,
    strat: Stratification,
    config: EngineConfig,
    explicit: FactStore,
    facts: FactStore,
    modules: Vec<Vec<Box<dyn Module>>>,
    stats: RunStats,
    repeats: u64,
}

impl std::fmt::Debug for Materialisation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Materialisation")
            .field("explicit", &self.explicit.len())
            .field("facts", &self.facts.len())
            .field("strata", &self.strat.max_stratum())
            .finish()
    }
}

impl Materialisation {
    /// Stratifies `program` and computes `Mat(Π, E)`.
    pub fn new(program: Program, explicit: FactStore, config: EngineConfig) -> Result<Materialisation, Error> {
        let strat = stratify(&program)?;
        Materialisation::with_stratification(program, strat, explicit, config)
    }

    pub fn with_stratification(
        program: Program,
        strat: Stratification,
        explicit: FactStore,
        config: EngineConfig,
    ) -> Result<Materialisation, Error> {
        program.check_facts(explicit.iter())?;
        let specs = match config.mode {
            Mode::Modular => detect_modules(&program, &strat, config.detect_modules),
            Mode::Seminaive => detect_modules(&program, &strat, false),
        };
        let modules = specs.iter().map(|stratum| stratum.iter().map(|s| build_module(&program, s)).collect()).collect();
        let mut m = Materialisation {
            program,
            strat,
            config,
            explicit: FactStore::new(),
            facts: FactStore::new(),
            modules,
            stats: RunStats::default(),
            repeats: 0,
        };
        m.explicit = explicit.iter().cloned().collect();
        m.materialise()?;
        Ok(m)
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn stratification(&self) -> &Stratification {
        &self.strat
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn explicit(&self) -> &FactStore {
        &self.explicit
    }

    /// The materialisation, with nonrecursive counters.
    pub fn facts(&self) -> &FactStore {
        &self.facts
    }

    /// Statistics of the last materialisation or update.
    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    /// Rule instances enumerated more than once during materialisation;
    /// always 0 unless `log_instances` is set.
    pub fn instance_repeats(&self) -> u64 {
        self.repeats
    }

    /// Modules of stratum `s`.
    pub fn modules(&self, s: usize) -> &[Box<dyn Module>] {
        &self.modules[s - 1]
    }

    pub fn module_kinds(&self) -> Vec<Vec<ModuleKind>> {
        self.modules.iter().map(|st| st.iter().map(|m| m.kind()).collect()).collect()
    }

    fn nonrecursive_rules(&self, s: usize) -> Vec<(usize, &Rule)> {
        self.strat.stratum(s).nonrecursive.iter().map(|&i| (i, &self.program.rules()[i])).collect()
    }

    fn materialise(&mut self) -> Result<(), Error> {
        let start = Instant::now();
        let mut tally = if self.config.log_instances { Tally::logging() } else { Tally::new() };
        let mut cnr = NrCounters::new();
        let mut facts = FactStore::new();
        for s in 1..=self.strat.max_stratum() {
            let mut delta = FactStore::new();
            for f in self.explicit.iter().filter(|f| self.strat.stratum_of(f.pred) == s) {
                cnr.adjust(f, 1)?;
                delta.insert(f.clone());
            }
            for (id, rule) in self.nonrecursive_rules(s) {
                let compiled = CompiledRule::new(rule);
                let mut heads = Vec::new();
                match_rule_instances(&compiled, &facts, &facts, None, &mut |inst| {
                    tally.instance(id, || inst.values());
                    heads.push(inst.head());
                });
                for h in heads {
                    cnr.adjust(&h, 1)?;
                    delta.insert(h);
                }
            }
            match self.config.mode {
                Mode::Seminaive => {
                    let recursive: Vec<(usize, CompiledRule<'_>)> = self
                        .strat
                        .stratum(s)
                        .recursive
                        .iter()
                        .map(|&i| (i, CompiledRule::new(&self.program.rules()[i])))
                        .collect();
                    while !delta.is_empty() {
                        facts.extend(delta.iter().cloned());
                        let mut next = FactStore::new();
                        for (id, rule) in &recursive {
                            match_rule_instances(rule, &facts, &facts, Some(Delta::pos(&delta)), &mut |inst| {
                                tally.instance(*id, || inst.values());
                                let h = inst.head();
                                if !facts.contains(&h) {
                                    next.insert(h);
                                }
                            });
                        }
                        delta = next;
                    }
                }
                Mode::Modular => {
                    let modules = &mut self.modules[s - 1];
                    let mut outputs: Vec<FactStore> = modules.iter().map(|_| FactStore::new()).collect();
                    while !delta.is_empty() {
                        facts.extend(delta.iter().cloned());
                        for (module, out) in modules.iter_mut().zip(outputs.iter_mut()) {
                            let arg = Minus::new(&delta, out);
                            debug_assert!(disjoint(&arg, out));
                            *out = module.add(&facts, &facts, &arg, &mut tally);
                        }
                        let mut next = FactStore::new();
                        for out in &outputs {
                            next.extend(out.iter().filter(|f| !facts.contains(f)).cloned());
                        }
                        delta = next;
                    }
                }
            }
        }
        *facts.counters_mut() = cnr;
        self.facts = facts;
        let mut phase = PhaseStats::new(Phase::Materialise);
        phase.absorb(&tally);
        phase.facts_added = self.facts.len() as u64;
        phase.wall_ms = start.elapsed().as_secs_f64() * 1000.0;
        self.repeats = tally.repeats();
        self.stats = RunStats { phases: vec![phase] };
        Ok(())
    }

    /// Replaces `E` by `(E ∖ E⁻) ∪ E⁺` and brings the materialisation up to
    /// date.
    pub fn update(&mut self, delete: &FactStore, insert: &FactStore) -> Result<&RunStats, Error> {
        self.program.check_facts(delete.iter().chain(insert.iter()))?;
        let e_minus: FactStore =
            delete.iter().filter(|f| self.explicit.contains(f) && !insert.contains(f)).cloned().collect();
        let e_plus: FactStore = insert.iter().filter(|f| !self.explicit.contains(f)).cloned().collect();

        let mut ws = Workspace {
            strat: &self.strat,
            rules: self.program.rules(),
            old: &self.facts,
            cnr: self.facts.counters().clone(),
            deleted: FactStore::new(),
            added: FactStore::new(),
            stats: [Phase::Overdelete, Phase::Rederive, Phase::Insert].map(PhaseStats::new),
        };
        for s in 1..=self.strat.max_stratum() {
            let modules = &mut self.modules[s - 1];
            ws.overdelete(s, &e_minus, modules)?;
            ws.rederive_insert(s, &e_plus, modules)?;
        }

        let Workspace { cnr, deleted, added, mut stats, .. } = ws;
        for f in e_minus.iter() {
            self.explicit.remove(f);
        }
        self.explicit.extend(e_plus.iter().cloned());
        for f in deleted.iter() {
            if !added.contains(f) {
                self.facts.remove(f);
            }
        }
        self.facts.extend(added.iter().cloned());
        *self.facts.counters_mut() = cnr;

        stats[0].facts_deleted = deleted.iter().filter(|f| !added.contains(f)).count() as u64;
        stats[1].facts_rederived = deleted.iter().filter(|f| added.contains(f)).count() as u64;
        stats[2].facts_added = added.iter().filter(|f| !deleted.contains(f)).count() as u64;
        self.stats = RunStats { phases: stats.to_vec() };
        Ok(&self.stats)
    }
}

/// The sets threaded through one update: the old materialisation `I`, the
/// overdeleted facts `D` and the added facts `A`.
struct Workspace<'a> {
    strat: &'a Stratification,
    rules: &'a [Rule],
    old: &'a FactStore,
    cnr: NrCounters,
    deleted: FactStore,
    added: FactStore,
    stats: [PhaseStats; 3],
}

impl Workspace<'_> {
    /// Heads of the nonrecursive instances of stratum `s` over `ipos` that
    /// touch the given deltas, one entry per instance.
    fn nonrecursive_heads(
        &self,
        s: usize,
        ipos: &dyn FactSource,
        delta: Delta<'_>,
        tally: &mut Tally,
    ) -> Vec<Fact> {
        let mut heads = Vec::new();
        for &id in &self.strat.stratum(s).nonrecursive {
            let compiled = CompiledRule::new(&self.rules[id]);
            match_rule_instances(&compiled, ipos, ipos, Some(delta), &mut |inst| {
                tally.instance(id, || inst.values());
                heads.push(inst.head());
            });
        }
        heads
    }

    fn overdelete(&mut self, s: usize, e_minus: &FactStore, modules: &mut [Box<dyn Module>]) -> Result<(), Error> {
        let start = Instant::now();
        let mut tally = Tally::new();
        let mut seeds = Vec::new();
        for f in e_minus.iter().filter(|f| self.strat.stratum_of(f.pred) == s) {
            self.cnr.adjust(f, -1)?;
            seeds.push(f.clone());
        }
        {
            let gone = Minus::new(&self.deleted, &self.added);
            let new = Minus::new(&self.added, &self.deleted);
            let heads = self.nonrecursive_heads(s, self.old, Delta::both(&gone, &new), &mut tally);
            for h in heads {
                self.cnr.adjust(&h, -1)?;
                seeds.push(h);
            }
        }
        // Facts keeping a nonrecursive derivation are not overdeleted.
        let mut delta: FactStore = seeds
            .into_iter()
            .filter(|f| self.cnr.get(f) == 0 && self.old.contains(f) && !self.deleted.contains(f))
            .collect();
        {
            let gone = Minus::new(&self.deleted, &self.added);
            let new = Minus::new(&self.added, &self.deleted);
            for module in modules.iter_mut() {
                let out = module.diff(self.old, &gone, &new, &mut tally);
                delta.extend(out.iter().filter(|f| self.cnr.get(f) == 0 && self.old.contains(f)).cloned());
            }
        }

        let mut outputs: Vec<FactStore> = modules.iter().map(|_| FactStore::new()).collect();
        while !delta.is_empty() {
            {
                let gone = Minus::new(&self.deleted, &self.added);
                let ipos = Minus::new(self.old, &gone);
                let ineg = Union::new(self.old, &self.added);
                for (module, out) in modules.iter_mut().zip(outputs.iter_mut()) {
                    let arg = Minus::new(&delta, out);
                    debug_assert!(disjoint(&arg, out));
                    *out = module.del(&ipos, &ineg, &arg, &self.cnr, &mut tally);
                }
            }
            self.deleted.extend(delta.iter().cloned());
            let mut next = FactStore::new();
            for out in &outputs {
                next.extend(out.iter().filter(|f| self.old.contains(f) && !self.deleted.contains(f)).cloned());
            }
            delta = next;
        }
        let phase = &mut self.stats[0];
        phase.absorb(&tally);
        phase.wall_ms += start.elapsed().as_secs_f64() * 1000.0;
        Ok(())
    }

    fn rederive_insert(&mut self, s: usize, e_plus: &FactStore, modules: &mut [Box<dyn Module>]) -> Result<(), Error> {
        let start = Instant::now();
        let mut tally = Tally::new();
        let mut seeds = Vec::new();
        for f in e_plus.iter().filter(|f| self.strat.stratum_of(f.pred) == s) {
            self.cnr.adjust(f, 1)?;
            seeds.push(f.clone());
        }
        {
            let current = DatasetView::new(self.old, &self.deleted, &self.added);
            let gone = Minus::new(&self.deleted, &self.added);
            let new = Minus::new(&self.added, &self.deleted);
            let heads = self.nonrecursive_heads(s, &current, Delta::both(&new, &gone), &mut tally);
            for h in heads {
                self.cnr.adjust(&h, 1)?;
                seeds.push(h);
            }
        }
        let mut delta: FactStore = {
            let current = DatasetView::new(self.old, &self.deleted, &self.added);
            seeds.into_iter().filter(|f| !current.contains(f)).collect()
        };

        let red_start = Instant::now();
        let mut red_tally = Tally::new();
        let mut outputs: Vec<FactStore> = Vec::with_capacity(modules.len());
        {
            let current = DatasetView::new(self.old, &self.deleted, &self.added);
            let gone = Minus::new(&self.deleted, &self.added);
            let new = Minus::new(&self.added, &self.deleted);
            for module in modules.iter_mut() {
                let red = module.red(self.old, &current, &gone, &mut red_tally);
                // Diff also sees the module's own rederived facts.
                let with_red = Union::new(&current, &red);
                let diff = module.diff(&with_red, &new, &gone, &mut tally);
                delta.extend(red.iter().cloned());
                delta.extend(diff.iter().filter(|f| !current.contains(f)).cloned());
                outputs.push(red);
            }
        }
        let red_ms = red_start.elapsed().as_secs_f64() * 1000.0;

        while !delta.is_empty() {
            self.added.extend(delta.iter().cloned());
            let current = DatasetView::new(self.old, &self.deleted, &self.added);
            for (module, out) in modules.iter_mut().zip(outputs.iter_mut()) {
                let arg = Minus::new(&delta, out);
                debug_assert!(disjoint(&arg, out));
                *out = module.add(&current, &current, &arg, &mut tally);
            }
            let mut next = FactStore::new();
            for out in &outputs {
                next.extend(out.iter().filter(|f| !current.contains(f)).cloned());
            }
            delta = next;
        }

        let red_phase = &mut self.stats[1];
        red_phase.absorb(&red_tally);
        red_phase.wall_ms += red_ms;
        let insert = &mut self.stats[2];
        insert.absorb(&tally);
        insert.wall_ms += start.elapsed().as_secs_f64() * 1000.0 - red_ms;
        Ok(())
    }
}

/// A module is never handed its own previous output.
fn disjoint(arg: &dyn FactSource, previous: &FactStore) -> bool {
    arg.iter().all(|f| !previous.contains(f))
}

/// Counts the nonrecursive derivations of every fact of `facts` from
/// scratch: valid nonrecursive instances plus one for explicit facts.
pub fn recount_nonrecursive(program: &Program, strat: &Stratification, explicit: &FactStore, facts: &FactStore) -> HashMap<Fact, u32> {
    let mut out: HashMap<Fact, u32> = HashMap::new();
    for f in explicit.iter() {
        *out.entry(f.clone()).or_default() += 1;
    }
    for (_, stratum) in strat.strata() {
        for &id in &stratum.nonrecursive {
            let compiled = CompiledRule::new(&program.rules()[id]);
            match_rule_instances(&compiled, facts, facts, None, &mut |inst| {
                *out.entry(inst.head()).or_default() += 1;
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_facts, parse_program};

    const TC: &str = "R(?x,?y), R(?y,?z) -> R(?x,?z).";
    const STC: &str = "R(?x,?y), R(?y,?z) -> R(?x,?z).\nR(?x,?y) -> R(?y,?x).";

    fn chain(n: usize) -> FactStore {
        (0..n).map(|i| Fact::new("R", &[&format!("c{i}"), &format!("c{}", i + 1)])).collect()
    }

    fn kinds(text: &str) -> Vec<ModuleKind> {
        let p = parse_program(text).unwrap();
        let st = stratify(&p).unwrap();
        detect_modules(&p, &st, true).concat().into_iter().map(|s| s.kind).collect()
    }

    #[test]
    fn detects_tc() {
        assert_eq!(kinds(TC), vec![ModuleKind::Tc(Sym::new("R"))]);
        assert_eq!(kinds("R(?b,?c), R(?a,?b) -> R(?a,?c)."), vec![ModuleKind::Tc(Sym::new("R"))]);
    }

    #[test]
    fn detects_stc() {
        assert_eq!(kinds(STC), vec![ModuleKind::Stc(Sym::new("R"))]);
    }

    #[test]
    fn tc_plus_generic() {
        let k = kinds("R(?x,?y), R(?y,?z) -> R(?x,?z).\nP(?x,?y), R(?y,?z) -> R(?x,?z).");
        assert_eq!(k, vec![ModuleKind::Tc(Sym::new("R")), ModuleKind::Generic]);
    }

    #[test]
    fn near_misses_are_generic() {
        assert_eq!(kinds("R(?x,?y), R(?y,?x) -> R(?x,?x)."), vec![ModuleKind::Generic]);
        assert_eq!(kinds("R(?x,?y), R(?y,?z), S(?x) -> R(?x,?z)."), vec![ModuleKind::Generic]);
        assert_eq!(kinds("R(?x,?x) -> R(?x,?x).\nR(?x,?y), R(?y,?z) -> R(?x,?z)."), vec![
            ModuleKind::Tc(Sym::new("R")),
            ModuleKind::Generic
        ]);
    }

    #[test]
    fn modules_can_be_disabled() {
        let p = parse_program(STC).unwrap();
        let st = stratify(&p).unwrap();
        let specs = detect_modules(&p, &st, false);
        assert_eq!(specs, vec![vec![ModuleSpec { kind: ModuleKind::Generic, rules: vec![0, 1] }]]);
    }

    #[test]
    fn chain_materialisation() {
        let p = parse_program(TC).unwrap();
        for config in [EngineConfig::default(), EngineConfig::seminaive(), EngineConfig::generic_only()] {
            let m = Materialisation::new(p.clone(), chain(3), config).unwrap();
            assert_eq!(m.facts().len(), 6);
        }
    }

    #[test]
    fn chain_instance_counts() {
        let p = parse_program(TC).unwrap();
        let semi = Materialisation::new(p.clone(), chain(3), EngineConfig::seminaive()).unwrap();
        assert_eq!(semi.stats().rule_instances(), 4);
        let modular = Materialisation::new(p, chain(3), EngineConfig::default()).unwrap();
        assert_eq!(modular.stats().rule_instances(), 0);
        assert!(modular.stats().join_results() <= 6);
    }

    #[test]
    fn cycle_materialisation() {
        let p = parse_program(STC).unwrap();
        let e = parse_facts("R(c1,c2).\nR(c2,c3).\nR(c3,c1).").unwrap();
        let m = Materialisation::new(p, e, EngineConfig::default()).unwrap();
        assert_eq!(m.facts().len(), 9);
    }

    #[test]
    fn empty_input() {
        let p = parse_program(TC).unwrap();
        let m = Materialisation::new(p, FactStore::new(), EngineConfig::default()).unwrap();
        assert!(m.facts().is_empty());
    }

    #[test]
    fn delete_chain_edge() {
        let p = parse_program(TC).unwrap();
        let mut m = Materialisation::new(p.clone(), chain(3), EngineConfig::default()).unwrap();
        let del: FactStore = [Fact::new("R", &["c2", "c3"])].into_iter().collect();
        m.update(&del, &FactStore::new()).unwrap();
        let expected = Materialisation::new(p, chain(2), EngineConfig::default()).unwrap();
        assert_eq!(m.facts(), expected.facts());
    }

    #[test]
    fn empty_update_is_noop() {
        let p = parse_program(TC).unwrap();
        let mut m = Materialisation::new(p, chain(3), EngineConfig::default()).unwrap();
        let before = m.facts().clone();
        let stats = m.update(&FactStore::new(), &FactStore::new()).unwrap();
        assert_eq!(stats.rule_instances() + stats.join_results(), 0);
        assert_eq!(m.facts(), &before);
    }

    #[test]
    fn closing_a_cycle_gives_clique() {
        let p = parse_program(STC).unwrap();
        let e = parse_facts("R(a,b).\nR(b,c).").unwrap();
        let mut m = Materialisation::new(p, e, EngineConfig::default()).unwrap();
        assert_eq!(m.facts().len(), 9);
        m.update(&FactStore::new(), &parse_facts("R(d,a).").unwrap()).unwrap();
        assert_eq!(m.facts().len(), 16);
    }

    #[test]
    fn counters_match_recount() {
        let p = parse_program("E(?x,?y) -> R(?x,?y).\nR(?x,?y), R(?y,?z) -> R(?x,?z).\nR(?x,?y), not E(?x,?y) -> D(?x,?y).").unwrap();
        let e = parse_facts("E(a,b).\nE(b,c).\nR(a,b).\nE(c,d).").unwrap();
        let mut m = Materialisation::new(p.clone(), e, EngineConfig::default()).unwrap();
        let check = |m: &Materialisation| {
            let expected = recount_nonrecursive(m.program(), m.stratification(), m.explicit(), m.facts());
            for f in m.facts().iter() {
                assert_eq!(m.facts().nr(f), expected.get(f).copied().unwrap_or(0), "{f}");
            }
        };
        check(&m);
        m.update(&parse_facts("E(b,c).").unwrap(), &parse_facts("E(d,a).").unwrap()).unwrap();
        check(&m);
    }
}
