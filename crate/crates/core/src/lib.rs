//! Stratified datalog materialisation with pluggable modules for recursive
//! rules, including specialised transitive and symmetric-transitive closure
//! modules, and counter-aware incremental maintenance.

pub mod apply;
pub mod components;
pub mod engine;
pub mod error;
pub mod fact_store;
pub mod generic;
pub mod instrument;
pub mod module;
pub mod oracle;
pub mod parser;
pub mod stc;
pub mod stratify;
pub mod syntax;
pub mod tc;

pub use apply::{apply_rules, match_rule_instances, Delta};
pub use engine::{detect_modules, EngineConfig, Materialisation, Mode, ModuleSpec};
pub use error::{Error, Result};
pub use fact_store::{DatasetView, Empty, FactSource, FactStore, Minus, NrCounters, Union};
pub use instrument::{Phase, PhaseStats, RunStats, Tally};
pub use module::{Module, ModuleKind};
pub use parser::{parse_facts, parse_program, serialise_dataset, serialise_program};
pub use stratify::{stratify, Stratification};
pub use syntax::{Atom, Fact, Program, Rule, Substitution, Sym, Term};
