//! The rule-application operator `Π[I⁺, I⁻ :: Δ⁺, Δ⁻]` and the index-join
//! enumeration of rule instances behind it.
//!
//! Instances touching the deltas are enumerated through delta rules: for a
//! body with positive atoms `B1..Bk`, delta rule `j` matches `Bj` in `Δ⁺`,
//! atoms before `j` in `I⁺ ∖ Δ⁺` and atoms after `j` in `I⁺`. One further delta
//! rule per negative atom `Nm` matches `Nm` in `Δ⁻`, negative atoms before `m`
//! outside `Δ⁻` and all positive atoms in `I⁺ ∖ Δ⁺`. Every qualifying instance
//! is therefore produced exactly once.

use smallvec::SmallVec;

use crate::fact_store::{FactSource, FactStore, Minus};
use crate::syntax::{Atom, Fact, Rule, Substitution, Sym, Term};

/// The delta restriction of the operator. `None` on either side means the
/// corresponding delta is empty.
#[derive(Clone, Copy, Default)]
pub struct Delta<'a> {
    pub pos: Option<&'a dyn FactSource>,
    pub neg: Option<&'a dyn FactSource>,
}

impl<'a> Delta<'a> {
    pub fn pos(pos: &'a dyn FactSource) -> Self {
        Delta { pos: Some(pos), neg: None }
    }

    pub fn both(pos: &'a dyn FactSource, neg: &'a dyn FactSource) -> Self {
        Delta { pos: Some(pos), neg: Some(neg) }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Slot {
    Const(Sym),
    Var(usize),
}

#[derive(Debug)]
struct CompiledAtom {
    pred: Sym,
    args: SmallVec<[Slot; 3]>,
}

impl CompiledAtom {
    fn ground(&self, binds: &[Option<Sym>]) -> Fact {
        Fact {
            pred: self.pred,
            args: self
                .args
                .iter()
                .map(|s| match *s {
                    Slot::Const(c) => c,
                    Slot::Var(v) => binds[v].expect("unsafe rule reached the matcher"),
                })
                .collect(),
        }
    }
}

/// A rule with variables numbered densely, ready for joining.
#[derive(Debug)]
pub struct CompiledRule<'r> {
    pub rule: &'r Rule,
    vars: Vec<Sym>,
    head: CompiledAtom,
    pos: Vec<CompiledAtom>,
    neg: Vec<CompiledAtom>,
}

impl<'r> CompiledRule<'r> {
    pub fn new(rule: &'r Rule) -> Self {
        let vars = rule.vars();
        let compile = |atom: &Atom| CompiledAtom {
            pred: atom.pred,
            args: atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => Slot::Const(*c),
                    Term::Var(v) => Slot::Var(vars.iter().position(|x| x == v).unwrap()),
                })
                .collect(),
        };
        CompiledRule {
            rule,
            head: compile(&rule.head),
            pos: rule.pos.iter().map(compile).collect(),
            neg: rule.neg.iter().map(compile).collect(),
            vars,
        }
    }
}

/// One applicable rule instance `rσ`.
pub struct Instance<'a> {
    compiled: &'a CompiledRule<'a>,
    binds: &'a [Option<Sym>],
}

impl Instance<'_> {
    pub fn rule(&self) -> &Rule {
        self.compiled.rule
    }

    /// Values of the rule's variables, in `Rule::vars` order.
    pub fn values(&self) -> Vec<Sym> {
        self.binds.iter().map(|b| b.unwrap()).collect()
    }

    pub fn head(&self) -> Fact {
        self.compiled.head.ground(self.binds)
    }

    pub fn pos_body(&self) -> Vec<Fact> {
        self.compiled.pos.iter().map(|a| a.ground(self.binds)).collect()
    }

    pub fn neg_body(&self) -> Vec<Fact> {
        self.compiled.neg.iter().map(|a| a.ground(self.binds)).collect()
    }

    pub fn substitution(&self) -> Substitution {
        let mut s = Substitution::new();
        for (var, value) in self.compiled.vars.iter().zip(self.binds) {
            s.insert(*var, value.unwrap());
        }
        s
    }
}

struct Matcher<'a, 'r> {
    rule: &'a CompiledRule<'r>,
    ineg: &'a dyn FactSource,
}

impl<'a, 'r> Matcher<'a, 'r> {
    fn join(
        &self,
        plan: &[(&CompiledAtom, &dyn FactSource)],
        binds: &mut Vec<Option<Sym>>,
        leaf: &mut dyn FnMut(&[Option<Sym>]),
    ) {
        let Some(((atom, source), rest)) = plan.split_first() else {
            leaf(binds);
            return;
        };
        let mut key = None;
        for (pos, slot) in atom.args.iter().enumerate() {
            let value = match *slot {
                Slot::Const(c) => Some(c),
                Slot::Var(v) => binds[v],
            };
            if let Some(value) = value {
                if source.indexed(atom.pred, pos) {
                    key = Some((pos, value));
                    break;
                }
                key.get_or_insert((pos, value));
            }
        }
        let mut bound_here: SmallVec<[usize; 3]> = SmallVec::new();
        'facts: for fact in source.scan(atom.pred, key) {
            if fact.args.len() != atom.args.len() {
                continue;
            }
            for &v in &bound_here {
                binds[v] = None;
            }
            bound_here.clear();
            for (slot, &value) in atom.args.iter().zip(fact.args.iter()) {
                match *slot {
                    Slot::Const(c) if c != value => continue 'facts,
                    Slot::Const(_) => {}
                    Slot::Var(v) => match binds[v] {
                        Some(b) if b != value => continue 'facts,
                        Some(_) => {}
                        None => {
                            binds[v] = Some(value);
                            bound_here.push(v);
                        }
                    },
                }
            }
            self.join(rest, binds, leaf);
        }
        for &v in &bound_here {
            binds[v] = None;
        }
    }

    fn negatives_hold(&self, binds: &[Option<Sym>]) -> bool {
        self.rule.neg.iter().all(|a| !self.ineg.contains(&a.ground(binds)))
    }
}

fn unify_head(rule: &CompiledRule<'_>, head: &Fact, binds: &mut [Option<Sym>]) -> bool {
    if rule.head.pred != head.pred || rule.head.args.len() != head.args.len() {
        return false;
    }
    for (slot, &value) in rule.head.args.iter().zip(head.args.iter()) {
        match *slot {
            Slot::Const(c) if c != value => return false,
            Slot::Const(_) => {}
            Slot::Var(v) => match binds[v] {
                Some(b) if b != value => return false,
                _ => binds[v] = Some(value),
            },
        }
    }
    true
}

/// Enumerates every rule instance `rσ` with `b⁺(rσ) ⊆ I⁺`, `b⁻(rσ) ∩ I⁻ = ∅`
/// and, when `delta` is given, `b⁺(rσ) ∩ Δ⁺ ≠ ∅` or `b⁻(rσ) ∩ Δ⁻ ≠ ∅`.
pub fn match_rule_instances(
    rule: &CompiledRule<'_>,
    ipos: &dyn FactSource,
    ineg: &dyn FactSource,
    delta: Option<Delta<'_>>,
    sink: &mut dyn FnMut(&Instance<'_>),
) {
    enumerate(rule, None, ipos, ineg, delta, sink)
}

/// Like [`match_rule_instances`] without a delta restriction, but only
/// instances whose head is `head`.
pub fn match_instances_with_head(
    rule: &CompiledRule<'_>,
    head: &Fact,
    ipos: &dyn FactSource,
    ineg: &dyn FactSource,
    sink: &mut dyn FnMut(&Instance<'_>),
) {
    enumerate(rule, Some(head), ipos, ineg, None, sink)
}

fn enumerate(
    rule: &CompiledRule<'_>,
    head: Option<&Fact>,
    ipos: &dyn FactSource,
    ineg: &dyn FactSource,
    delta: Option<Delta<'_>>,
    sink: &mut dyn FnMut(&Instance<'_>),
) {
    let matcher = Matcher { rule, ineg };
    let mut binds = vec![None; rule.vars.len()];
    if let Some(head) = head {
        if !unify_head(rule, head, &mut binds) {
            return;
        }
    }
    let emit = |binds: &[Option<Sym>], sink: &mut dyn FnMut(&Instance<'_>)| {
        sink(&Instance { compiled: rule, binds });
    };
    match delta {
        None => {
            let plan: Vec<(&CompiledAtom, &dyn FactSource)> = rule.pos.iter().map(|a| (a, ipos)).collect();
            matcher.join(&plan, &mut binds, &mut |b| {
                if matcher.negatives_hold(b) {
                    emit(b, sink);
                }
            });
        }
        Some(Delta { pos, neg }) => {
            let old_pos;
            let rest: &dyn FactSource = match pos {
                Some(dp) => {
                    old_pos = Minus::new(ipos, dp);
                    &old_pos
                }
                None => ipos,
            };
            if let Some(dp) = pos {
                for j in 0..rule.pos.len() {
                    let mut plan: Vec<(&CompiledAtom, &dyn FactSource)> = Vec::with_capacity(rule.pos.len());
                    plan.push((&rule.pos[j], dp));
                    for (i, atom) in rule.pos.iter().enumerate() {
                        if i < j {
                            plan.push((atom, rest));
                        } else if i > j {
                            plan.push((atom, ipos));
                        }
                    }
                    matcher.join(&plan, &mut binds, &mut |b| {
                        if matcher.negatives_hold(b) {
                            emit(b, sink);
                        }
                    });
                }
            }
            if let Some(dn) = neg {
                for m in 0..rule.neg.len() {
                    let mut plan: Vec<(&CompiledAtom, &dyn FactSource)> = Vec::with_capacity(rule.pos.len() + 1);
                    plan.push((&rule.neg[m], dn));
                    plan.extend(rule.pos.iter().map(|a| (a, rest)));
                    matcher.join(&plan, &mut binds, &mut |b| {
                        let earlier_in_delta = rule.neg[..m].iter().any(|a| dn.contains(&a.ground(b)));
                        if !earlier_in_delta && matcher.negatives_hold(b) {
                            emit(b, sink);
                        }
                    });
                }
            }
        }
    }
}

/// `Π[I⁺, I⁻ :: Δ⁺, Δ⁻]`, or `Π[I⁺, I⁻]` when `delta` is `None`. Returns the
/// head facts and the number of instances considered.
pub fn apply_rules(rules: &[Rule], ipos: &dyn FactSource, ineg: &dyn FactSource, delta: Option<Delta<'_>>) -> (FactStore, u64) {
    let mut out = FactStore::new();
    let mut count = 0u64;
    for rule in rules {
        let compiled = CompiledRule::new(rule);
        match_rule_instances(&compiled, ipos, ineg, delta, &mut |inst| {
            count += 1;
            out.insert(inst.head());
        });
    }
    (out, count)
}
