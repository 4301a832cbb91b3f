use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cawgr_core::{
    all_to_all_check, build_topology, check_table, min_slots, required_wavelengths, simulate, solve_exact,
    solve_greedy, AssignmentTable, DemandSet, Instance, SimOptions, SolveOutcome, SolveStatus, Topology, TrafficModel,
};
use clap::{Parser, Subcommand};

use crate::config::{Config, SolverKind};
use crate::{metrics, table};

#[derive(Debug, Parser)]
#[command(name = "cawgr", version, about = "Wavelength and time-slot assignment for cascaded-AWGR PON data centers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summarize the fabric and check all-to-all reachability.
    Topo { config: PathBuf },
    /// Compute an assignment table and write it to OUTPUT.
    Solve {
        config: PathBuf,
        output: PathBuf,
        /// Report solver wall-clock time on stderr.
        #[arg(long)]
        timing: bool,
    },
    /// Find the shortest frame that serves every demand on both planes.
    Minslots { config: PathBuf, output: Option<PathBuf> },
    /// Check an assignment table against the configured instance.
    Validate { config: PathBuf, table: PathBuf },
    /// Replay a table under synthetic traffic and write a metrics report.
    Simulate {
        config: PathBuf,
        table: PathBuf,
        /// `uniform:<k>`, `bernoulli:<p>` or `hotspot:<entity>:<multiplier>`.
        traffic: String,
        frames: usize,
        metrics: PathBuf,
        /// Seed for stochastic traffic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Usage = 1,
    Invalid = 2,
    BudgetExhausted = 3,
}

struct Failure {
    code: ExitCode,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: ExitCode::Usage, message: message.into() }
}

type Outcome = Result<ExitCode, Failure>;

/// Runs one command. Reports go to `out`; diagnostics go to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode {
    let result = match &cli.command {
        Command::Topo { config } => topo(config, out),
        Command::Solve { config, output, timing } => solve(config, output, *timing, out, err),
        Command::Minslots { config, output } => minslots(config, output.as_deref(), out),
        Command::Validate { config, table } => validate(config, table, out),
        Command::Simulate { config, table, traffic, frames, metrics, seed } => {
            simulate_cmd(config, table, traffic, *frames, metrics, *seed, out, err)
        }
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(Config, Topology, DemandSet), Failure> {
    let config = Config::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let topology = build_topology(config.topology).map_err(|e| usage(e.to_string()))?;
    let demands = DemandSet::build(&topology, config.demands);
    Ok((config, topology, demands))
}

fn load_table(path: &Path) -> Result<AssignmentTable, Failure> {
    table::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Failure {
    usage(e.to_string())
}

fn topo(config: &Path, out: &mut dyn Write) -> Outcome {
    let (config, topology, demands) = load(config)?;
    let n = topology.n();
    let w = required_wavelengths(n, config.demands.include_intra_cell).map_err(|e| usage(e.to_string()))?;
    writeln!(out, "N={n} W={w} T={}", topology.time_slots()).map_err(io)?;
    writeln!(
        out,
        "entities={} attachments={} demands={}",
        topology.entities().len(),
        topology.attachments().len(),
        demands.len()
    )
    .map_err(io)?;
    for a in topology.attachments() {
        writeln!(out, "attachment {} {}: {}", a.index, a.name, a.hosted.join(" ")).map_err(io)?;
    }
    let report = all_to_all_check(&topology);
    for (src, dst) in &report.failures {
        let names = (&topology.attachments()[*src].name, &topology.attachments()[*dst].name);
        writeln!(out, "unreachable {} -> {}", names.0, names.1).map_err(io)?;
    }
    writeln!(out, "all-to-all: {}", if report.is_success() { "OK" } else { "FAILED" }).map_err(io)?;
    Ok(if report.is_success() { ExitCode::Success } else { ExitCode::Invalid })
}

fn report_outcome(outcome: &SolveOutcome, out: &mut dyn Write) -> Result<(), Failure> {
    writeln!(out, "objective={} status={} nodes={}", outcome.objective, outcome.status, outcome.stats.nodes).map_err(io)
}

fn solve(config: &Path, output: &Path, timing: bool, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let (config, topology, demands) = load(config)?;
    let instance = Instance::new(&topology, &demands).map_err(|e| usage(e.to_string()))?;
    let outcome = match config.solver.kind {
        SolverKind::Exact => solve_exact(instance, config.solver.node_budget),
        SolverKind::Greedy => solve_greedy(instance, config.solver.seed),
    };
    write(output, &table::emit(&outcome.table))?;
    report_outcome(&outcome, out)?;
    if timing {
        if let Some(elapsed) = outcome.stats.elapsed {
            writeln!(err, "elapsed={:.3}ms", elapsed.as_secs_f64() * 1e3).map_err(io)?;
        }
    }
    Ok(match outcome.status {
        SolveStatus::BoundReached => ExitCode::BudgetExhausted,
        _ => ExitCode::Success,
    })
}

fn minslots(config: &Path, output: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let (config, topology, demands) = load(config)?;
    let found = match min_slots(&topology, &demands, config.solver.node_budget) {
        Ok(found) => found,
        Err(e @ cawgr_core::Error::BudgetExhausted { .. }) => {
            return Err(Failure { code: ExitCode::BudgetExhausted, message: e.to_string() })
        }
        Err(e) => return Err(usage(e.to_string())),
    };
    if let Some(path) = output {
        write(path, &table::emit(&found.outcome.table))?;
    }
    writeln!(out, "min_slots={} objective={}", found.time_slots, found.outcome.objective).map_err(io)?;
    Ok(ExitCode::Success)
}

fn validate(config: &Path, table_path: &Path, out: &mut dyn Write) -> Outcome {
    let (_, topology, demands) = load(config)?;
    let table = load_table(table_path)?;
    let report = check_table(&topology, &demands, &table);
    for v in &report.violations {
        writeln!(out, "{} {}", v.code, v.message).map_err(io)?;
    }
    writeln!(out, "verdict={} objective={}", report.verdict(), report.objective).map_err(io)?;
    Ok(if report.is_valid() { ExitCode::Success } else { ExitCode::Invalid })
}

/// Parses `uniform:<k>`, `bernoulli:<p>` or `hotspot:<entity>:<multiplier>`.
pub fn parse_traffic(spec: &str, seed: u64) -> Result<TrafficModel, String> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| format!("traffic spec `{spec}` has no parameters"))?;
    match kind {
        "uniform" => {
            let packets = rest.parse().map_err(|_| format!("uniform: `{rest}` is not a packet count"))?;
            Ok(TrafficModel::Uniform { packets })
        }
        "bernoulli" => {
            let probability: f64 = rest.parse().map_err(|_| format!("bernoulli: `{rest}` is not a number"))?;
            if !(0.0..=1.0).contains(&probability) {
                return Err(format!("bernoulli: probability {rest} out of range [0, 1]"));
            }
            Ok(TrafficModel::Bernoulli { probability, seed })
        }
        "hotspot" => {
            let (target, multiplier) =
                rest.rsplit_once(':').ok_or_else(|| "hotspot: expected `hotspot:<entity>:<multiplier>`".to_string())?;
            let multiplier: u32 =
                multiplier.parse().map_err(|_| format!("hotspot: `{multiplier}` is not a multiplier"))?;
            if multiplier < 1 || target.is_empty() {
                return Err("hotspot: multiplier must be ≥ 1 and entity non-empty".into());
            }
            Ok(TrafficModel::Hotspot { target: target.into(), multiplier })
        }
        other => Err(format!("unknown traffic model `{other}`")),
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    config: &Path,
    table_path: &Path,
    traffic: &str,
    frames: usize,
    metrics_path: &Path,
    seed: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let traffic = parse_traffic(traffic, seed).map_err(usage)?;
    if frames < 1 {
        return Err(usage("frames must be ≥ 1"));
    }
    let (_, topology, demands) = load(config)?;
    let table = load_table(table_path)?;
    let report = check_table(&topology, &demands, &table);
    if !report.is_valid() {
        for v in &report.violations {
            writeln!(err, "{} {}", v.code, v.message).map_err(io)?;
        }
        return Err(Failure {
            code: ExitCode::Invalid,
            message: format!("{}: table is invalid", table_path.display()),
        });
    }
    let (metrics, _) = simulate(&topology, &demands, &table, &traffic, frames, SimOptions::default())
        .map_err(|e| usage(e.to_string()))?;
    write(metrics_path, &metrics::emit(&metrics))?;
    writeln!(out, "{}", metrics::summary(&metrics)).map_err(io)?;
    Ok(ExitCode::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traffic_specs() {
        assert_eq!(parse_traffic("uniform:3", 0), Ok(TrafficModel::Uniform { packets: 3 }));
        assert_eq!(parse_traffic("bernoulli:0.25", 4), Ok(TrafficModel::Bernoulli { probability: 0.25, seed: 4 }));
        assert_eq!(
            parse_traffic("hotspot:olt1:4", 0),
            Ok(TrafficModel::Hotspot { target: "olt1".into(), multiplier: 4 })
        );
        assert!(parse_traffic("bernoulli:2", 0).unwrap_err().contains("out of range"));
        assert!(parse_traffic("uniform:-1", 0).is_err());
        assert!(parse_traffic("hotspot:olt1:0", 0).is_err());
        assert!(parse_traffic("hotspot:olt1", 0).is_err());
        assert!(parse_traffic("poisson:1", 0).is_err());
        assert!(parse_traffic("uniform", 0).is_err());
    }
}
