//! Work counters shared by the engine and the modules.

use std::collections::HashSet;
use std::fmt;

use crate::syntax::Sym;

/// Counts of the work done by one engine phase.
///
/// `rule_instances` counts rule instances enumerated by rule application
/// (generic module, nonrecursive rules). `join_results` counts the pairs and
/// pair-facts examined by the TC and STC inner loops.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub rule_instances: u64,
    pub join_results: u64,
    log: Option<HashSet<(usize, Vec<Sym>)>>,
    repeats: u64,
}

impl Tally {
    pub fn new() -> Tally {
        Tally::default()
    }

    /// A tally that also remembers every `(rule, σ)` it sees so repeated
    /// enumerations can be detected.
    pub fn logging() -> Tally {
        Tally { log: Some(HashSet::new()), ..Tally::default() }
    }

    pub fn instance(&mut self, rule_id: usize, values: impl FnOnce() -> Vec<Sym>) {
        self.rule_instances += 1;
        if let Some(log) = &mut self.log {
            if !log.insert((rule_id, values())) {
                self.repeats += 1;
            }
        }
    }

    pub fn joins(&mut self, n: u64) {
        self.join_results += n;
    }

    /// Number of instances enumerated more than once since logging started.
    pub fn repeats(&self) -> u64 {
        self.repeats
    }

    pub fn is_logging(&self) -> bool {
        self.log.is_some()
    }

    pub fn clear_log(&mut self) {
        if let Some(log) = &mut self.log {
            log.clear();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Materialise,
    Overdelete,
    Rederive,
    Insert,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Materialise => "materialise",
            Phase::Overdelete => "overdelete",
            Phase::Rederive => "rederive",
            Phase::Insert => "insert",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseStats {
    pub phase: Phase,
    pub rule_instances: u64,
    pub join_results: u64,
    pub facts_deleted: u64,
    pub facts_rederived: u64,
    pub facts_added: u64,
    pub wall_ms: f64,
}

impl PhaseStats {
    pub fn new(phase: Phase) -> PhaseStats {
        PhaseStats {
            phase,
            rule_instances: 0,
            join_results: 0,
            facts_deleted: 0,
            facts_rederived: 0,
            facts_added: 0,
            wall_ms: 0.0,
        }
    }

    pub fn absorb(&mut self, tally: &Tally) {
        self.rule_instances += tally.rule_instances;
        self.join_results += tally.join_results;
    }

    /// Rule instances plus join results.
    pub fn work(&self) -> u64 {
        self.rule_instances + self.join_results
    }
}

/// Per-phase statistics of the last engine operation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunStats {
    pub phases: Vec<PhaseStats>,
}

pub const CSV_HEADER: &str = "phase,rule_instances,join_results,facts_deleted,facts_rederived,facts_added,wall_ms";

impl RunStats {
    pub fn phase(&self, phase: Phase) -> Option<&PhaseStats> {
        self.phases.iter().find(|p| p.phase == phase)
    }

    pub fn rule_instances(&self) -> u64 {
        self.phases.iter().map(|p| p.rule_instances).sum()
    }

    pub fn join_results(&self) -> u64 {
        self.phases.iter().map(|p| p.join_results).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.phases {
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.3}\n",
                p.phase, p.rule_instances, p.join_results, p.facts_deleted, p.facts_rederived, p.facts_added, p.wall_ms
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeats_detected_only_when_logging() {
        let mut t = Tally::new();
        t.instance(0, || vec![Sym::new("a")]);
        t.instance(0, || vec![Sym::new("a")]);
        assert_eq!((t.rule_instances, t.repeats()), (2, 0));

        let mut t = Tally::logging();
        t.instance(0, || vec![Sym::new("a")]);
        t.instance(1, || vec![Sym::new("a")]);
        t.instance(0, || vec![Sym::new("a")]);
        assert_eq!((t.rule_instances, t.repeats()), (3, 1));
    }

    #[test]
    fn csv_layout() {
        let mut p = PhaseStats::new(Phase::Insert);
        p.rule_instances = 4;
        p.facts_added = 2;
        let stats = RunStats { phases: vec![p] };
        let csv = stats.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("insert,4,0,0,0,2,0.000"));
    }
}
