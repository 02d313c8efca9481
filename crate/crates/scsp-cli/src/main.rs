//! Command-line front end: scenario files in, verdicts, witnesses,
//! refined matrices, linear systems and derived tables out.
//!
//! Exit codes: 0 consistent / success, 1 inconsistent (or no witness
//! found), 2 input error.

mod literal;
mod scenario;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use scsp_core::algebra::compose;
use scsp_core::angle::Point;
use scsp_core::calculi::{composition_table, Calculus, ALL_DIRECTIONS};
use scsp_core::config::Config;
use scsp_core::linearize::{bsp_to_lp, LinearRow};
use scsp_core::network::{translate_flagged, Network, PcOutcome};
use scsp_core::oracle::{sample_witness, OracleBudget};
use scsp_core::search::{solve_pipeline, PipelineResult, SearchConfig, Witness};

use literal::{format_relation, parse_relation};
use scenario::{parse_scenario, Scenario};

#[derive(Parser)]
#[command(
    name = "scsp",
    version,
    about = "Constraint reasoning over 2D points: cardinal directions and angular sectors"
)]
struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Tolerance for comparing angles and sector bounds.
    #[arg(long, global = true, default_value_t = 1e-9)]
    eps_angle: f64,

    /// Margin threshold for strict feasibility.
    #[arg(long, global = true, default_value_t = 1e-7)]
    eps_strict: f64,

    /// Seed for the sampling oracle.
    #[arg(long, global = true, default_value_t = 0xC0FFEE)]
    seed: u64,

    /// Accept path-consistent scenarios without the feasibility check.
    #[arg(long, global = true)]
    no_lp_leaves: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide consistency of a scenario file.
    Check { file: PathBuf },
    /// Decide consistency and print witness coordinates.
    Solve { file: PathBuf },
    /// Print the path-consistency refinement of the constraint matrix.
    Pc { file: PathBuf },
    /// Print the linear system of a basic scenario.
    Linearize { file: PathBuf },
    /// Compose two relation literals.
    Compose { left: String, right: String },
    /// Print the derived composition table of a calculus (cs or pb).
    Tables { calculus: String },
    /// Cross-validate a scenario with the witness-sampling oracle.
    Oracle { file: PathBuf },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {err}")]
    Io {
        path: String,
        #[source]
        err: std::io::Error,
    },
    #[error("{path}: {err}")]
    Parse {
        path: String,
        err: scenario::ParseError,
    },
    #[error("{0}")]
    Input(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = Config::default()
        .with_eps_angle(cli.eps_angle)
        .with_eps_strict(cli.eps_strict);
    let search = SearchConfig {
        lp_at_leaves: !cli.no_lp_leaves,
        ..SearchConfig::default()
    };
    match &cli.command {
        Command::Check { file } => check_or_solve(cli, &cfg, &search, file, false),
        Command::Solve { file } => check_or_solve(cli, &cfg, &search, file, true),
        Command::Pc { file } => pc(cli, &cfg, file),
        Command::Linearize { file } => linearize(cli, &cfg, file),
        Command::Compose { left, right } => compose_cmd(cli, &cfg, left, right),
        Command::Tables { calculus } => tables(cli, calculus),
        Command::Oracle { file } => oracle(cli, &cfg, file),
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|err| CliError::Io {
        path: display.clone(),
        err,
    })?;
    parse_scenario(&text).map_err(|err| CliError::Parse { path: display, err })
}

/// Translate every constraint into the quantitative layer, with the
/// constraints' own bound flags.
fn quantitative_network(s: &Scenario, cfg: &Config) -> Result<Network, CliError> {
    let mut constraints = Vec::new();
    for c in &s.input.cone_shaped {
        constraints.push((
            c.i,
            c.j,
            translate_flagged(Calculus::ConeShaped, &c.disjuncts, cfg),
        ));
    }
    for c in &s.input.projection_based {
        constraints.push((
            c.i,
            c.j,
            translate_flagged(Calculus::ProjectionBased, &c.disjuncts, cfg),
        ));
    }
    constraints.extend(s.input.quantitative.iter().cloned());
    Network::from_named_constraints(s.input.names.clone(), &constraints, cfg)
        .map_err(|e| CliError::Input(e.to_string()))
}

fn fmt_coord(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.6}")
    }
}

/// Witness coordinates shifted so the implicit origin sits at (0, 0); the
/// origin variable itself is not listed.
fn witness_entries(w: &Witness, s: &Scenario) -> Vec<(String, f64, f64)> {
    let shift = s
        .origin
        .map(|i| w.points[i])
        .unwrap_or_else(|| Point::new(0.0, 0.0));
    s.input
        .names
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != s.origin)
        .map(|(i, name)| {
            (
                name.clone(),
                w.points[i].x - shift.x,
                w.points[i].y - shift.y,
            )
        })
        .collect()
}

fn scenario_edges_json(net: &Network) -> Value {
    let mut edges = Vec::new();
    for i in 0..net.n() {
        for j in (i + 1)..net.n() {
            edges.push(json!({
                "from": net.names()[i],
                "to": net.names()[j],
                "relation": format_relation(net.entry(i, j)),
            }));
        }
    }
    Value::Array(edges)
}

fn check_or_solve(
    cli: &Cli,
    cfg: &Config,
    search: &SearchConfig,
    file: &Path,
    want_witness: bool,
) -> Result<u8, CliError> {
    let scenario = load_scenario(file)?;
    let result = solve_pipeline(&scenario.input, search, cfg)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let command = if want_witness { "solve" } else { "check" };
    let names = &scenario.input.names;
    match result {
        PipelineResult::Sat {
            scenario: chosen,
            witness,
        } => {
            let entries = witness.as_ref().map(|w| witness_entries(w, &scenario));
            if cli.json {
                let witness_json = entries.as_ref().map(|list| {
                    Value::Object(
                        list.iter()
                            .map(|(n, x, y)| (n.clone(), json!([x, y])))
                            .collect(),
                    )
                });
                println!(
                    "{}",
                    json!({
                        "command": command,
                        "consistent": true,
                        "refuted_at_step": Value::Null,
                        "calculus": Value::Null,
                        "edge": Value::Null,
                        "witness": witness_json.unwrap_or(Value::Null),
                        "scenario": if want_witness { scenario_edges_json(&chosen) } else { Value::Null },
                    })
                );
            } else {
                println!("CONSISTENT");
                if want_witness {
                    match entries {
                        Some(list) => {
                            for (name, x, y) in list {
                                println!("{name}: ({}, {})", fmt_coord(x), fmt_coord(y));
                            }
                        }
                        None => println!("(feasibility check disabled: no witness extracted)"),
                    }
                }
            }
            Ok(0)
        }
        PipelineResult::UnsatAtStep1 { calculus, i, j } => {
            report_unsat(cli, command, 1, Some(calculus), Some((&names[i], &names[j])));
            Ok(1)
        }
        PipelineResult::UnsatAtStep2 { i, j } => {
            report_unsat(cli, command, 2, None, Some((&names[i], &names[j])));
            Ok(1)
        }
        PipelineResult::Unsat => {
            report_unsat(cli, command, 3, None, None);
            Ok(1)
        }
    }
}

fn report_unsat(
    cli: &Cli,
    command: &str,
    step: u8,
    calculus: Option<Calculus>,
    edge: Option<(&String, &String)>,
) {
    if cli.json {
        println!(
            "{}",
            json!({
                "command": command,
                "consistent": false,
                "refuted_at_step": step,
                "calculus": calculus.map(|c| c.tag().to_string()),
                "edge": edge.map(|(a, b)| json!([a, b])),
                "witness": Value::Null,
                "scenario": Value::Null,
            })
        );
    } else {
        let detail = match step {
            1 => format!(
                "step 1: qualitative {}",
                calculus.map(|c| c.tag()).unwrap_or("?")
            ),
            2 => "step 2: quantitative propagation".to_string(),
            _ => "step 3: exhaustive search".to_string(),
        };
        println!("INCONSISTENT ({detail})");
    }
}

fn pc(cli: &Cli, cfg: &Config, file: &Path) -> Result<u8, CliError> {
    let scenario = load_scenario(file)?;
    let mut net = quantitative_network(&scenario, cfg)?;
    let outcome = net.path_consistency(cfg);
    match outcome {
        PcOutcome::Stable => {
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "command": "pc",
                        "empty_edge": Value::Null,
                        "matrix": scenario_edges_json(&net),
                    })
                );
            } else {
                for i in 0..net.n() {
                    for j in (i + 1)..net.n() {
                        println!(
                            "{} {}: {}",
                            net.names()[i],
                            net.names()[j],
                            format_relation(net.entry(i, j))
                        );
                    }
                }
            }
            Ok(0)
        }
        PcOutcome::Empty { i, j } => {
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "command": "pc",
                        "empty_edge": [net.names()[i], net.names()[j]],
                        "matrix": Value::Null,
                    })
                );
            } else {
                println!("EMPTY at {} {}", net.names()[i], net.names()[j]);
            }
            Ok(1)
        }
    }
}

/// Rows print as `c1*xA + c2*yA + c3*xB + c4*yB {<,<=} 0`, scaled so the
/// largest coefficient magnitude is one.
fn format_row(row: &LinearRow, names: &[String]) -> String {
    let scale = row
        .coeffs
        .iter()
        .fold(0.0f64, |acc, c| acc.max(c.abs()))
        .max(1e-300);
    let mut out = String::new();
    for (idx, c) in row.coeffs.iter().enumerate() {
        // Print the <= 0 form: negate the internal >= 0 coefficients.
        let c = -c / scale;
        if c == 0.0 {
            continue;
        }
        let axis = if idx % 2 == 0 { "x" } else { "y" };
        let name = &names[idx / 2];
        if out.is_empty() {
            let _ = write!(out, "{}*{axis}{name}", fmt_coord(c));
        } else if c < 0.0 {
            let _ = write!(out, " - {}*{axis}{name}", fmt_coord(-c));
        } else {
            let _ = write!(out, " + {}*{axis}{name}", fmt_coord(c));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    let _ = write!(out, " {} 0", if row.strict { "<" } else { "<=" });
    out
}

fn linearize(cli: &Cli, cfg: &Config, file: &Path) -> Result<u8, CliError> {
    let scenario = load_scenario(file)?;
    let net = quantitative_network(&scenario, cfg)?;
    let sys = bsp_to_lp(&net, cfg).map_err(|e| {
        CliError::Input(format!("{e} (the linearizer needs a basic scenario)"))
    })?;
    let lines: Vec<String> = sys
        .rows()
        .iter()
        .map(|r| format_row(r, net.names()))
        .collect();
    if cli.json {
        println!(
            "{}",
            json!({
                "command": "linearize",
                "unknowns": sys.unknowns(),
                "rows": lines,
            })
        );
    } else {
        for line in lines {
            println!("{line}");
        }
    }
    Ok(0)
}

fn compose_cmd(cli: &Cli, cfg: &Config, left: &str, right: &str) -> Result<u8, CliError> {
    let l = parse_relation(left).map_err(CliError::Input)?;
    let r = parse_relation(right).map_err(CliError::Input)?;
    let out = format_relation(&compose(&l, &r, cfg));
    if cli.json {
        println!(
            "{}",
            json!({
                "command": "compose",
                "left": format_relation(&l),
                "right": format_relation(&r),
                "result": out,
            })
        );
    } else {
        println!("{out}");
    }
    Ok(0)
}

fn tables(cli: &Cli, calculus: &str) -> Result<u8, CliError> {
    let calculus = match calculus {
        "cs" => Calculus::ConeShaped,
        "pb" => Calculus::ProjectionBased,
        other => {
            return Err(CliError::Input(format!(
                "unknown calculus `{other}` (expected cs or pb)"
            )))
        }
    };
    let table = composition_table(calculus);
    if cli.json {
        let mut entries = Vec::new();
        for r in ALL_DIRECTIONS {
            for s in ALL_DIRECTIONS {
                let atoms: Vec<String> =
                    table.entry(r, s).iter().map(|d| d.name().to_string()).collect();
                entries.push(json!({
                    "left": r.name(),
                    "right": s.name(),
                    "result": atoms,
                }));
            }
        }
        println!(
            "{}",
            json!({
                "command": "tables",
                "calculus": calculus.tag(),
                "entries": entries,
            })
        );
    } else {
        print!("{}", table.render());
    }
    Ok(0)
}

fn oracle(cli: &Cli, cfg: &Config, file: &Path) -> Result<u8, CliError> {
    let scenario = load_scenario(file)?;
    let net = quantitative_network(&scenario, cfg)?;
    let budget = OracleBudget {
        samples: 100_000,
        grid_extent: 4,
        seed: cli.seed,
    };
    match sample_witness(&net, &budget, cfg) {
        Some(w) => {
            let entries = witness_entries(&w, &scenario);
            if cli.json {
                let witness_json = Value::Object(
                    entries
                        .iter()
                        .map(|(n, x, y)| (n.clone(), json!([x, y])))
                        .collect(),
                );
                println!(
                    "{}",
                    json!({
                        "command": "oracle",
                        "witness_found": true,
                        "witness": witness_json,
                    })
                );
            } else {
                println!("witness found:");
                for (name, x, y) in entries {
                    println!("{name}: ({}, {})", fmt_coord(x), fmt_coord(y));
                }
            }
            Ok(0)
        }
        None => {
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "command": "oracle",
                        "witness_found": false,
                        "witness": Value::Null,
                    })
                );
            } else {
                println!("no witness found within budget (inconclusive)");
            }
            Ok(1)
        }
    }
}
