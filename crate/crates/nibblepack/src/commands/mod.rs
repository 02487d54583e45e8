//! The subcommands. Each writes its artifacts into the output directory and
//! returns a one-line summary.

mod analyze;
mod gen;
mod geometric;
mod nibble;

use std::path::{Path, PathBuf};
use std::time::Instant;

use nibblepack_core::graph::{max_codegree, Graph};
use nibblepack_core::nibble::{run_schedule, Clock, Mode, NibbleResult, RunOptions, Schedule};
use nibblepack_core::SeededRng;
use serde_json::{json, Value};

use crate::config::{Cli, Command, Settings};
use crate::error::{CliError, Result};
use crate::formats::{self, TraceRow};

pub use analyze::{concentration_parallel, geometry_tables, poisson_tail_table, GeometryTables, PoissonTailRow};
pub use geometric::POINT_BUDGET;

/// What a command wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let settings = match &cli.command {
        Command::Gen { settings, .. }
        | Command::Pack { settings }
        | Command::Code { settings }
        | Command::Nibble { settings, .. }
        | Command::Analyze { settings, .. } => settings.clone().resolve()?,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = settings.thread_count()? {
        if n == 0 {
            return Err(CliError::Config("thread count must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker threads: {e}")))?;
    let out = settings.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
    pool.install(|| match cli.command {
        Command::Gen { kind, .. } => gen::run(kind, &settings, &out),
        Command::Pack { .. } => geometric::pack(&settings, &out),
        Command::Code { .. } => geometric::code(&settings, &out),
        Command::Nibble { graph, .. } => nibble::run(&graph, &settings, &out),
        Command::Analyze { target, .. } => analyze::run(target, &settings, &out),
    })
}

/// Milliseconds since construction.
struct WallClock(Instant);

impl Clock for WallClock {
    fn now_ms(&self) -> u64 {
        self.0.elapsed().as_millis() as u64
    }
}

const DEFAULT_GAMMA: f64 = 0.25;
const DEFAULT_ALPHA: f64 = 0.125;
const DEFAULT_ROUNDS: usize = 8;

/// Builds the schedule for `g` and runs it.
fn nibble_graph(g: &Graph, settings: &Settings, rng: &mut SeededRng) -> Result<(Schedule, NibbleResult)> {
    let schedule = match settings.mode() {
        Mode::Paper => {
            if settings.gamma.is_some() || settings.alpha.is_some() || settings.rounds.is_some() {
                return Err(CliError::Config(
                    "--gamma, --alpha and --rounds are fixed by the paper schedule; use --mode custom".into(),
                ));
            }
            Schedule::paper(g.max_degree(), max_codegree(g))?
        }
        Mode::Custom => Schedule::custom_for(
            g,
            settings.gamma.unwrap_or(DEFAULT_GAMMA),
            settings.alpha.unwrap_or(DEFAULT_ALPHA),
            settings.rounds.unwrap_or(DEFAULT_ROUNDS),
        )?,
    };
    let mut params = schedule.params();
    if let Some(r) = settings.max_retries {
        params.max_retries = r;
    }
    let clock = WallClock(Instant::now());
    let mut options = RunOptions {
        auto_blow_up: settings.blow_up,
        ..RunOptions::default()
    };
    if settings.timing {
        options.clock = &clock;
    }
    let result = run_schedule(g, &schedule, &params, &options, rng)?;
    Ok((schedule, result))
}

fn schedule_json(s: &Schedule, max_retries: Option<usize>) -> Value {
    json!({
        "mode": match s.mode { Mode::Paper => "paper", Mode::Custom => "custom" },
        "gamma": s.gamma,
        "alpha": s.alpha,
        "rounds": s.rounds,
        "delta0": s.delta0,
        "codegree0": s.codegree0,
        "max_retries": max_retries.unwrap_or(nibblepack_core::nibble::DEFAULT_MAX_RETRIES),
    })
}

fn trace_rows(result: &NibbleResult) -> Vec<TraceRow> {
    result
        .trace
        .rounds
        .iter()
        .map(|r| TraceRow {
            i: r.index,
            n_i: r.n,
            delta_i: r.step_delta,
            delta2_i: r.max_codegree,
            a_i: r.a_size,
            e_ga_i: r.a_edges,
            i_i: r.i_size,
            retries: r.retries,
            ms: r.millis,
        })
        .collect()
}

fn stop_json(result: &NibbleResult) -> Value {
    use nibblepack_core::nibble::StopReason;
    match result.trace.stop {
        StopReason::RoundsCompleted => json!({ "reason": "rounds-completed" }),
        StopReason::EmptyResidual => json!({ "reason": "empty-residual" }),
        StopReason::EdgelessResidual { taken } => json!({ "reason": "edgeless-residual", "taken": taken }),
    }
}

fn write_trace(out: &Path, result: &NibbleResult, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = out.join("trace.csv");
    formats::write_csv(&path, &formats::TRACE_HEADER, &trace_rows(result))?;
    files.push(path);
    Ok(())
}
