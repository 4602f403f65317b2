//! The plugin contract between the engine and the recursive-rule modules.

use std::fmt;

use crate::fact_store::{FactSource, FactStore, NrCounters};
use crate::instrument::Tally;
use crate::syntax::Sym;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModuleKind {
    Generic,
    /// Transitive closure of the given binary predicate.
    Tc(Sym),
    /// Symmetric-transitive closure of the given binary predicate.
    Stc(Sym),
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleKind::Generic => f.write_str("generic"),
            ModuleKind::Tc(r) => write!(f, "tc({r})"),
            ModuleKind::Stc(r) => write!(f, "stc({r})"),
        }
    }
}

/// A module computing consequences of a fixed set of recursive rules.
///
/// * `add` returns the smallest `J` with `Π[I⁺ ∪ J, I⁻ :: Δ ∪ J] ⊆ I⁺ ∪ J`.
/// * `del` returns a set between the counter-aware and the plain
///   overdeletion bounds for deleting `Δ`.
/// * `red` returns the smallest `J` with `Π[(I⁺ ∖ Δ) ∪ J, I⁻] ∩ Δ ⊆ J`.
/// * `diff` returns `Π[I⁺ :: Δ⁺, Δ⁻]` for deltas over body-only predicates.
///
/// All calls take `Δ ⊆ I⁺`.
pub trait Module: Send {
    fn kind(&self) -> ModuleKind;

    fn as_any(&self) -> &dyn std::any::Any;

    /// Indexes of the module's rules in the program.
    fn rule_ids(&self) -> &[usize];

    fn add(&mut self, ipos: &dyn FactSource, ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore;

    fn del(
        &mut self,
        ipos: &dyn FactSource,
        ineg: &dyn FactSource,
        delta: &dyn FactSource,
        cnr: &NrCounters,
        tally: &mut Tally,
    ) -> FactStore;

    fn red(&mut self, ipos: &dyn FactSource, ineg: &dyn FactSource, delta: &dyn FactSource, tally: &mut Tally) -> FactStore;

    fn diff(&mut self, ipos: &dyn FactSource, dpos: &dyn FactSource, dneg: &dyn FactSource, tally: &mut Tally) -> FactStore;
}
