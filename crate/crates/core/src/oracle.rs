//! Slow, index-free reference implementations for cross-checking the
//! engine: naive fixpoint materialisation, classic DRed, and the rule
//! operator evaluated straight from its definition.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::Error;
use crate::fact_store::FactStore;
use crate::parser::serialise_facts;
use crate::stratify::{stratify, Stratification};
use crate::syntax::{Atom, Fact, Program, Rule, Sym, Term};

pub type FactSet = HashSet<Fact>;

/// A ground rule instance: the rule's index, the substitution, and the
/// grounded atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundInstance {
    pub rule: usize,
    pub subst: BTreeMap<String, Sym>,
    pub head: Fact,
    pub pos: Vec<Fact>,
    pub neg: Vec<Fact>,
}

fn ground(atom: &Atom, binds: &BTreeMap<String, Sym>) -> Fact {
    let args: Vec<Sym> = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Const(c) => *c,
            Term::Var(v) => binds[&v.to_string()],
        })
        .collect();
    Fact::from_syms(atom.pred, &args)
}

fn extend(atom: &Atom, fact: &Fact, binds: &BTreeMap<String, Sym>) -> Option<BTreeMap<String, Sym>> {
    if atom.pred != fact.pred || atom.args.len() != fact.args.len() {
        return None;
    }
    let mut out = binds.clone();
    for (t, &v) in atom.args.iter().zip(fact.args.iter()) {
        match t {
            Term::Const(c) if *c != v => return None,
            Term::Const(_) => {}
            Term::Var(x) => {
                let key = x.to_string();
                match out.get(&key) {
                    Some(&b) if b != v => return None,
                    Some(_) => {}
                    None => {
                        out.insert(key, v);
                    }
                }
            }
        }
    }
    Some(out)
}

/// Every instance of `rule` whose positive body lies in `ipos` and whose
/// negative body avoids `ineg`, found by nested loops.
pub fn instances(rule_id: usize, rule: &Rule, ipos: &FactSet, ineg: &FactSet) -> Vec<GroundInstance> {
    let facts: Vec<&Fact> = ipos.iter().collect();
    let mut partial = vec![BTreeMap::new()];
    for atom in &rule.pos {
        let mut next = Vec::new();
        for binds in &partial {
            for f in &facts {
                if let Some(b) = extend(atom, f, binds) {
                    next.push(b);
                }
            }
        }
        partial = next;
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for binds in partial {
        if !seen.insert(binds.clone()) {
            continue;
        }
        let neg: Vec<Fact> = rule.neg.iter().map(|a| ground(a, &binds)).collect();
        if neg.iter().any(|f| ineg.contains(f)) {
            continue;
        }
        out.push(GroundInstance {
            rule: rule_id,
            head: ground(&rule.head, &binds),
            pos: rule.pos.iter().map(|a| ground(a, &binds)).collect(),
            neg,
            subst: binds,
        });
    }
    out
}

/// `Π[I⁺, I⁻ :: Δ⁺, Δ⁻]` from the definition; `None` drops the restriction.
pub fn apply(rules: &[Rule], ipos: &FactSet, ineg: &FactSet, delta: Option<(&FactSet, &FactSet)>) -> FactSet {
    apply_instances(rules, ipos, ineg, delta).into_iter().map(|i| i.head).collect()
}

pub fn apply_instances(
    rules: &[Rule],
    ipos: &FactSet,
    ineg: &FactSet,
    delta: Option<(&FactSet, &FactSet)>,
) -> Vec<GroundInstance> {
    let mut out = Vec::new();
    for (i, rule) in rules.iter().enumerate() {
        for inst in instances(i, rule, ipos, ineg) {
            let touches = match delta {
                None => true,
                Some((dp, dn)) => inst.pos.iter().any(|f| dp.contains(f)) || inst.neg.iter().any(|f| dn.contains(f)),
            };
            if touches {
                out.push(inst);
            }
        }
    }
    out
}

fn stratum_rules(program: &Program, strat: &Stratification, s: usize) -> Vec<Rule> {
    program.rules().iter().filter(|r| strat.stratum_of(r.head.pred) == s).cloned().collect()
}

/// Stratum by stratum, reapplies all rules until nothing changes.
pub fn naive_fixpoint(program: &Program, strat: &Stratification, explicit: &FactStore) -> FactStore {
    let mut i: FactSet = FactSet::new();
    for s in 1..=strat.max_stratum() {
        i.extend(explicit.iter().filter(|f| strat.stratum_of(f.pred) == s).cloned());
        let rules = stratum_rules(program, strat, s);
        loop {
            let derived = apply(&rules, &i, &i, None);
            let before = i.len();
            i.extend(derived);
            if i.len() == before {
                break;
            }
        }
    }
    i.into_iter().collect()
}

/// `Mat(Π, E)` computed from scratch.
pub fn recompute(program: &Program, explicit: &FactStore) -> Result<FactStore, Error> {
    let strat = stratify(program)?;
    Ok(naive_fixpoint(program, &strat, explicit))
}

/// Classic DRed over whole strata: overdelete everything depending on a
/// removed fact, rederive in one step, then insert to a fixpoint. Returns
/// `Mat(Π, (E ∖ E⁻) ∪ E⁺)`.
pub fn dred_reference(program: &Program, explicit: &FactStore, delete: &FactStore, insert: &FactStore) -> Result<FactStore, Error> {
    let strat = stratify(program)?;
    let old: FactSet = naive_fixpoint(program, &strat, explicit).iter().cloned().collect();
    let e: FactSet = explicit.iter().cloned().collect();
    let e_plus: FactSet = insert.iter().filter(|f| !e.contains(*f)).cloned().collect();
    let e_minus: FactSet = delete.iter().filter(|f| e.contains(*f) && !e_plus.contains(*f) && !insert.contains(f)).cloned().collect();
    let new_e: FactSet = e.iter().filter(|f| !e_minus.contains(*f)).chain(e_plus.iter()).cloned().collect();

    let mut d = FactSet::new();
    let mut a = FactSet::new();
    for s in 1..=strat.max_stratum() {
        let rules = stratum_rules(program, &strat, s);
        let gone: FactSet = d.difference(&a).cloned().collect();
        let fresh: FactSet = a.difference(&d).cloned().collect();

        // Overdeletion over the old materialisation.
        let mut over: FactSet = e_minus.iter().filter(|f| strat.stratum_of(f.pred) == s).cloned().collect();
        over.extend(apply(&rules, &old, &old, Some((&gone, &fresh))));
        loop {
            let all_gone: FactSet = gone.union(&over).cloned().collect();
            let more = apply(&rules, &old, &old, Some((&all_gone, &fresh)));
            let before = over.len();
            over.extend(more);
            if over.len() == before {
                break;
            }
        }
        over.retain(|f| old.contains(f));
        d.extend(over.iter().cloned());

        // One-step rederivation, then insertion.
        let current = |d: &FactSet, a: &FactSet| -> FactSet { old.iter().filter(|f| !d.contains(*f)).chain(a.iter()).cloned().collect() };
        let mut cur = current(&d, &a);
        let derivable = apply(&rules, &cur, &cur, None);
        for f in &over {
            if derivable.contains(f) || new_e.contains(f) {
                a.insert(f.clone());
            }
        }
        a.extend(e_plus.iter().filter(|f| strat.stratum_of(f.pred) == s).cloned());
        loop {
            cur = current(&d, &a);
            let derived = apply(&rules, &cur, &cur, None);
            let before = a.len();
            a.extend(derived.into_iter().filter(|f| !cur.contains(f)));
            if a.len() == before {
                break;
            }
        }
    }
    Ok(old.iter().filter(|f| !d.contains(*f)).chain(a.iter()).cloned().collect())
}

/// Least `J` with `Π[I⁺ ∪ J, I⁻ :: Δ ∪ J] ⊆ I⁺ ∪ J`.
pub fn semi(rules: &[Rule], ipos: &FactSet, ineg: &FactSet, delta: &FactSet) -> FactSet {
    let mut j = FactSet::new();
    loop {
        let base: FactSet = ipos.union(&j).cloned().collect();
        let touched: FactSet = delta.union(&j).cloned().collect();
        let new: Vec<Fact> = apply(rules, &base, ineg, Some((&touched, &FactSet::new())))
            .into_iter()
            .filter(|f| !base.contains(f))
            .collect();
        if new.is_empty() {
            return j;
        }
        j.extend(new);
    }
}

/// Least `J` with `Π[I⁺, I⁻ :: Δ ∪ J] ⊆ Δ ∪ J`, ignoring heads whose
/// counter in `cnr` is positive when one is given.
pub fn inv_semi(rules: &[Rule], ipos: &FactSet, ineg: &FactSet, delta: &FactSet, cnr: Option<&dyn Fn(&Fact) -> u32>) -> FactSet {
    let mut j = FactSet::new();
    loop {
        let touched: FactSet = delta.union(&j).cloned().collect();
        let new: Vec<Fact> = apply(rules, ipos, ineg, Some((&touched, &FactSet::new())))
            .into_iter()
            .filter(|f| !touched.contains(f) && cnr.is_none_or(|c| c(f) == 0))
            .collect();
        if new.is_empty() {
            return j;
        }
        j.extend(new);
    }
}

/// Least `J` with `Π[(I⁺ ∖ Δ) ∪ J, I⁻] ∩ Δ ⊆ J`.
pub fn red(rules: &[Rule], ipos: &FactSet, ineg: &FactSet, delta: &FactSet) -> FactSet {
    let mut j = FactSet::new();
    loop {
        let base: FactSet = ipos.iter().filter(|f| !delta.contains(*f)).chain(j.iter()).cloned().collect();
        let new: Vec<Fact> = apply(rules, &base, ineg, None).into_iter().filter(|f| delta.contains(f) && !j.contains(f)).collect();
        if new.is_empty() {
            return j;
        }
        j.extend(new);
    }
}

/// The difference between an expected and an actual dataset.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub expected: FactStore,
    pub actual: FactStore,
    pub missing: Vec<Fact>,
    pub extra: Vec<Fact>,
}

impl OracleReport {
    pub fn is_equal(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "expected {} facts, actual {} facts", self.expected.len(), self.actual.len())?;
        if self.is_equal() {
            return writeln!(f, "identical");
        }
        if !self.missing.is_empty() {
            writeln!(f, "missing {}:", self.missing.len())?;
            f.write_str(&serialise_facts(&self.missing))?;
        }
        if !self.extra.is_empty() {
            writeln!(f, "extra {}:", self.extra.len())?;
            f.write_str(&serialise_facts(&self.extra))?;
        }
        Ok(())
    }
}

pub fn verify(actual: &FactStore, expected: &FactStore) -> OracleReport {
    let mut missing: Vec<Fact> = expected.iter().filter(|f| !actual.contains(f)).cloned().collect();
    let mut extra: Vec<Fact> = actual.iter().filter(|f| !expected.contains(f)).cloned().collect();
    missing.sort_by(Fact::cmp_text);
    extra.sort_by(Fact::cmp_text);
    OracleReport { expected: expected.clone(), actual: actual.clone(), missing, extra }
}
