use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use modlog_core::oracle::{naive_fixpoint, verify};
use modlog_core::{
    parse_facts, parse_program, serialise_dataset, EngineConfig, Error, FactStore, Materialisation, Mode, ModuleKind, Program,
    RunStats,
};

mod generate;

/// Materialise and incrementally maintain stratified datalog programs.
#[derive(Parser, Debug)]
#[command(name = "modlog", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the materialisation of a program over a set of facts.
    Materialise {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Materialise, then delete and insert explicit facts incrementally.
    Update {
        #[command(flatten)]
        run: RunArgs,
        /// Explicit facts to delete.
        #[arg(long)]
        delete: Option<PathBuf>,
        /// Explicit facts to insert.
        #[arg(long)]
        insert: Option<PathBuf>,
    },
    /// Write a synthetic graph workload.
    Generate {
        #[arg(long, value_enum)]
        kind: generate::Kind,
        /// Number of nodes (edges for `chain`).
        #[arg(long)]
        n: usize,
        /// Number of edges for `dag` (default `min(2n, n(n-1)/2)`).
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "R")]
        pred: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the engine (or a materialisation file) against the reference
    /// fixpoint. Exits with 3 on a mismatch.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// A materialisation file to check instead of the engine's result.
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Print dataset and program statistics without writing the
    /// materialisation.
    Stats {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(short, long)]
    program: PathBuf,
    #[arg(short, long)]
    facts: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Modular)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Modules::Auto)]
    modules: Modules,
    /// Where to write the sorted materialisation (stdout if absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write per-phase statistics as CSV.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Format of the statistics printed to stderr.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Seminaive,
    Modular,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Modules {
    Auto,
    Off,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
}

impl RunArgs {
    fn config(&self) -> EngineConfig {
        EngineConfig {
            mode: match self.mode {
                ModeArg::Seminaive => Mode::Seminaive,
                ModeArg::Modular => Mode::Modular,
            },
            detect_modules: matches!(self.modules, Modules::Auto),
            log_instances: false,
        }
    }

    fn load(&self) -> Result<(Program, FactStore)> {
        let program = read_program(&self.program)?;
        let facts = read_facts(&self.facts)?;
        Ok((program, facts))
    }

    fn materialise(&self) -> Result<Materialisation> {
        let (program, facts) = self.load()?;
        Ok(Materialisation::new(program, facts, self.config())?)
    }

    fn write_output(&self, m: &Materialisation) -> Result<()> {
        write_text(self.output.as_deref(), &serialise_dataset(m.facts()))
    }

    fn report(&self, m: &Materialisation) -> Result<()> {
        match self.format {
            Format::Text => eprint!("{}", summary(m)),
            Format::Csv => eprint!("{}", m.stats().to_csv()),
        }
        if let Some(path) = &self.stats {
            fs::write(path, m.stats().to_csv()).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

fn read_program(path: &Path) -> Result<Program> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_program(&text).with_context(|| format!("in {}", path.display()))
}

fn read_facts(path: &Path) -> Result<FactStore> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_facts(&text).with_context(|| format!("in {}", path.display()))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summary(m: &Materialisation) -> String {
    let strat = m.stratification();
    let (nonrecursive, recursive) =
        strat.strata().fold((0, 0), |(n, r), (_, st)| (n + st.nonrecursive.len(), r + st.recursive.len()));
    let kinds: Vec<ModuleKind> = m.module_kinds().into_iter().flatten().collect();
    let count = |f: fn(&ModuleKind) -> bool| kinds.iter().filter(|k| f(k)).count();
    let mut out = String::new();
    out.push_str(&format!("explicit facts |E|    {}\n", m.explicit().len()));
    out.push_str(&format!("facts |I|             {}\n", m.facts().len()));
    out.push_str(&format!("strata S              {}\n", strat.max_stratum()));
    out.push_str(&format!("nonrecursive rules    {nonrecursive}\n"));
    out.push_str(&format!("recursive rules       {recursive}\n"));
    out.push_str(&format!("TC modules            {}\n", count(|k| matches!(k, ModuleKind::Tc(_)))));
    out.push_str(&format!("STC modules           {}\n", count(|k| matches!(k, ModuleKind::Stc(_)))));
    out.push_str(&format!("generic modules       {}\n", count(|k| matches!(k, ModuleKind::Generic))));
    out.push_str(&phase_lines(m.stats()));
    out
}

fn phase_lines(stats: &RunStats) -> String {
    stats
        .phases
        .iter()
        .map(|p| {
            format!(
                "{:<12} instances {} joins {} deleted {} rederived {} added {} ({:.3} ms)\n",
                p.phase.name(),
                p.rule_instances,
                p.join_results,
                p.facts_deleted,
                p.facts_rederived,
                p.facts_added,
                p.wall_ms
            )
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Materialise { run } => {
            let m = run.materialise()?;
            run.write_output(&m)?;
            run.report(&m)?;
        }
        Command::Update { run, delete, insert } => {
            let mut m = run.materialise()?;
            let delete = delete.as_deref().map(read_facts).transpose()?.unwrap_or_default();
            let insert = insert.as_deref().map(read_facts).transpose()?.unwrap_or_default();
            m.update(&delete, &insert)?;
            run.write_output(&m)?;
            run.report(&m)?;
        }
        Command::Generate { kind, n, edges, seed, pred, output } => {
            let facts = generate::generate(kind, &pred, n, edges, seed)?;
            write_text(output.as_deref(), &serialise_dataset(&facts))?;
        }
        Command::Verify { run, against } => {
            let (program, facts) = run.load()?;
            let strat = modlog_core::stratify(&program)?;
            let expected = naive_fixpoint(&program, &strat, &facts);
            let actual = match &against {
                Some(path) => read_facts(path)?,
                None => Materialisation::new(program, facts, run.config())?.facts().clone(),
            };
            let report = verify(&actual, &expected);
            print!("{report}");
            if !report.is_equal() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Stats { run } => {
            let m = run.materialise()?;
            print!("{}", summary(&m));
            if let Some(path) = &run.stats {
                fs::write(path, m.stats().to_csv()).with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>() {
                Some(Error::NotStratifiable { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
