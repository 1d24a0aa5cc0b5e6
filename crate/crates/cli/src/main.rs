use std::fs;
use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use powerham::decide::{export, verify_grid_certificate, ExportFormat, ExportKind};
use powerham::grid::GridObstruction;
use powerham::oracle::{find_hamiltonian, SearchConfig, SearchOutcome};
use powerham::power_graph::build_power_graph;
use powerham::selftest::{self, Level};
use powerham::{decide_grid, decide_group, verify_certificate, Certificate, FiniteAbelianGroup, Grid, GridDecision, Verdict, WalkKind};
use serde_json::json;

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_ERROR: u8 = 3;

/// Hamiltonicity of power graphs of finite abelian groups.
///
/// Groups are written as products of cyclic factors of prime-power order,
/// for example `Z2xZ3`, `Z9xZ3` or `Z2^3xZ3` (three copies of Z2).
#[derive(Parser)]
#[command(name = "powerham", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the power graph has a Hamiltonian cycle.
    Decide {
        /// Group, e.g. `Z2^2xZ3`.
        #[arg(required_unless_present = "grid", conflicts_with = "grid")]
        group: Option<FiniteAbelianGroup>,
        /// Decide a weighted grid `m,n,u,v` instead of a group.
        #[arg(long)]
        grid: Option<Grid>,
        #[arg(long)]
        json: bool,
    },
    /// Print (or write) only the certificate for a decision.
    Certify {
        group: FiniteAbelianGroup,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a certificate file against a group (or a grid with `--grid`).
    Verify {
        /// Group spec, or `m,n,u,v` with `--grid`.
        target: String,
        certificate: PathBuf,
        #[arg(long)]
        grid: bool,
        #[arg(long)]
        json: bool,
    },
    /// Render a structure as DOT or JSON.
    Export {
        group: FiniteAbelianGroup,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        /// Keep arc directions in the power graph.
        #[arg(long)]
        directed: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive search on the power graph.
    Oracle {
        group: FiniteAbelianGroup,
        #[arg(long, value_enum, default_value = "cycle")]
        kind: Kind,
        /// Time budget in seconds.
        #[arg(long)]
        time: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in acceptance suite.
    Selftest {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Power,
    Cluster,
    Ntree,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Cycle,
    Path,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

struct Style {
    color: bool,
}

impl Style {
    fn detect() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Self {
            color: !no_color && std::io::stdout().is_terminal(),
        }
    }

    fn paint(&self, text: &str, good: Option<bool>) -> String {
        let code = match good {
            Some(true) => "32",
            Some(false) => "31",
            None => "33",
        };
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { EXIT_ERROR } else { EXIT_YES });
        }
    };
    match run(cli.command, &Style::detect()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Hamiltonian => EXIT_YES,
        Verdict::NotHamiltonian => EXIT_NO,
        Verdict::Unsupported => EXIT_UNDECIDED,
    }
}

fn grid_certificate(grid: &Grid, d: &GridDecision) -> Option<Certificate> {
    let coords = |v: usize| {
        let (i, j) = grid.coords(v);
        vec![i as u64, j as u64]
    };
    match d {
        GridDecision::Hamiltonian(walk) => Some(Certificate::Cycle {
            vertices: walk.seq.iter().map(|&v| coords(v)).collect(),
        }),
        GridDecision::NotHamiltonian(GridObstruction::Cut { witness, .. }) => Some(Certificate::Cut {
            cut: witness.cut.iter().map(|&v| coords(v)).collect(),
            components: witness.components,
        }),
        GridDecision::NotHamiltonian(GridObstruction::TooLight { .. }) => None,
    }
}

fn run(command: Command, style: &Style) -> Result<u8> {
    match command {
        Command::Decide { group: Some(group), json, .. } => {
            let v = decide_group(&group)?;
            if json {
                emit(&v.to_json(), None)?;
            } else {
                let good = match v.verdict {
                    Verdict::Hamiltonian => Some(true),
                    Verdict::NotHamiltonian => Some(false),
                    Verdict::Unsupported => None,
                };
                println!("{}: {}", v.group, style.paint(&v.verdict.to_string(), good));
                for step in &v.method_trace {
                    println!("  {step}");
                }
                if let Some(c) = &v.certificate {
                    println!("{}", c.to_json());
                }
            }
            Ok(verdict_code(v.verdict))
        }
        Command::Decide { grid: Some(grid), json, .. } => {
            let d = decide_grid(&grid)?;
            let verdict = if d.is_hamiltonian() {
                Verdict::Hamiltonian
            } else {
                Verdict::NotHamiltonian
            };
            let cert = grid_certificate(&grid, &d);
            let obstruction = match &d {
                GridDecision::NotHamiltonian(o) => Some(o),
                GridDecision::Hamiltonian(_) => None,
            };
            if json {
                let doc = json!({
                    "grid": grid,
                    "verdict": verdict,
                    "criterion": grid.criterion_holds(),
                    "certificate": cert,
                    "obstruction": obstruction,
                });
                emit(&serde_json::to_string_pretty(&doc)?, None)?;
            } else {
                println!("grid {grid}: {}", style.paint(&verdict.to_string(), Some(d.is_hamiltonian())));
                if let Some(c) = &cert {
                    println!("{}", c.to_json());
                } else if let Some(o) = obstruction {
                    println!("{}", serde_json::to_string_pretty(o)?);
                }
            }
            Ok(verdict_code(verdict))
        }
        Command::Decide { .. } => unreachable!("clap requires a group or a grid"),
        Command::Certify { group, output } => {
            let v = decide_group(&group)?;
            match &v.certificate {
                Some(c) => emit(&c.to_json(), output.as_ref())?,
                None => eprintln!("{}: {} (no certificate)", v.group, v.verdict),
            }
            Ok(verdict_code(v.verdict))
        }
        Command::Verify {
            target,
            certificate,
            grid,
            json,
        } => {
            let text = fs::read_to_string(&certificate)
                .with_context(|| format!("reading {}", certificate.display()))?;
            let report = if grid {
                let g: Grid = target.parse()?;
                verify_grid_certificate(&g, &text)?
            } else {
                let g: FiniteAbelianGroup = target.parse()?;
                verify_certificate(&g, &text)?
            };
            if json {
                emit(&serde_json::to_string_pretty(&report)?, None)?;
            } else {
                let word = if report.valid { "valid" } else { "invalid" };
                println!("{}", style.paint(word, Some(report.valid)));
                for d in &report.diagnostics {
                    println!("  {d}");
                }
            }
            Ok(if report.valid { EXIT_YES } else { EXIT_NO })
        }
        Command::Export {
            group,
            what,
            format,
            directed,
            output,
        } => {
            let what = match what {
                What::Power => ExportKind::Power,
                What::Cluster => ExportKind::Cluster,
                What::Ntree => ExportKind::NTree,
                What::Grid => ExportKind::Grid,
            };
            let format = match format {
                Format::Dot => ExportFormat::Dot,
                Format::Json => ExportFormat::Json,
            };
            emit(&export(&group, what, format, directed)?, output.as_ref())?;
            Ok(EXIT_YES)
        }
        Command::Oracle { group, kind, time, json } => {
            let kind = match kind {
                Kind::Cycle => WalkKind::Cycle,
                Kind::Path => WalkKind::Path,
            };
            let mut cfg = SearchConfig::default();
            if let Some(secs) = time {
                let budget = Duration::try_from_secs_f64(secs).context("--time must be a nonnegative number")?;
                cfg = cfg.with_time_budget(budget);
            }
            let pg = build_power_graph(&group)?;
            let outcome = find_hamiltonian(&pg.undirected_view(), kind, &cfg);
            let elements = |seq: &[usize]| -> Vec<Vec<u64>> { seq.iter().map(|&v| pg.element(v).coords().to_vec()).collect() };
            let (word, code, cert, note) = match &outcome {
                SearchOutcome::Found(w) => ("found", EXIT_YES, Some(Certificate::walk(kind, elements(&w.seq))), None),
                SearchOutcome::None => ("none", EXIT_NO, None, None),
                SearchOutcome::Inconclusive(why) => ("inconclusive", EXIT_UNDECIDED, None, Some(why.clone())),
            };
            if json {
                let doc = json!({
                    "group": group.to_string(),
                    "kind": kind,
                    "outcome": word,
                    "certificate": cert,
                    "reason": note,
                });
                emit(&serde_json::to_string_pretty(&doc)?, None)?;
            } else {
                let good = outcome.decided();
                println!("{group} {kind}: {}", style.paint(word, good));
                if let Some(n) = note {
                    println!("  {n}");
                }
                if let Some(c) = cert {
                    println!("{}", c.to_json());
                }
            }
            Ok(code)
        }
        Command::Selftest { level, json } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let reports = selftest::run(level);
            let all = reports.iter().all(|r| r.passed);
            if json {
                emit(&serde_json::to_string_pretty(&reports)?, None)?;
            } else {
                for r in &reports {
                    let line = r.to_string();
                    let (head, rest) = line.split_at(4);
                    println!("{}{rest}", style.paint(head, Some(r.passed)));
                }
                let failed = reports.iter().filter(|r| !r.passed).count();
                println!("{} of {} criteria passed", reports.len() - failed, reports.len());
            }
            Ok(if all { EXIT_YES } else { EXIT_NO })
        }
    }
}
