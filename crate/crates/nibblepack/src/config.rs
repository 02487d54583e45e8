//! Command-line flags and the TOML config file they mirror.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nibblepack_core::nibble::Mode;
use nibblepack_core::pointproc::Domain;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "nibblepack",
    version,
    about = "Sphere packings and spherical codes from the iterated nibble"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated graph (or point cloud) to the output directory.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[command(flatten)]
        settings: Settings,
    },
    /// Sample, prune and nibble a Euclidean packing.
    Pack {
        #[command(flatten)]
        settings: Settings,
    },
    /// Sample, prune and nibble a spherical code.
    Code {
        #[command(flatten)]
        settings: Settings,
    },
    /// Run the nibble schedule on a graph file.
    Nibble {
        /// Graph JSON or binary graph file; the format is detected from its first bytes.
        graph: PathBuf,
        #[command(flatten)]
        settings: Settings,
    },
    /// Emit inequality tables and empirical tail checks as CSV and JSON.
    Analyze {
        #[arg(value_enum)]
        target: AnalyzeTarget,
        #[command(flatten)]
        settings: Settings,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Sharpness,
    Regular,
    Capped,
    Gnp,
    Polar,
    Cliques,
    Cloud,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeTarget {
    Geometry,
    Concentration,
    PoissonTail,
    Mecke,
    Abstract,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Paper,
    Custom,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Paper => Mode::Paper,
            ModeArg::Custom => Mode::Custom,
        }
    }
}

/// `box:L`, `ball:R` or `sphere`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "String")]
pub enum DomainArg {
    Box(f64),
    Ball(f64),
    Sphere,
}

impl DomainArg {
    pub fn build(self, dim: usize) -> Result<Domain> {
        let domain = match self {
            DomainArg::Box(side) => Domain::periodic_box(dim, side),
            DomainArg::Ball(radius) => Domain::ball(dim, radius),
            DomainArg::Sphere => Domain::unit_sphere(dim),
        };
        domain.map_err(|e| CliError::Config(e.to_string()))
    }
}

impl FromStr for DomainArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |v: &str| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x > 0.0)
                .ok_or_else(|| format!("`{v}` is not a positive length"))
        };
        match s.split_once(':') {
            Some(("box", v)) => parse(v).map(DomainArg::Box),
            Some(("ball", v)) => parse(v).map(DomainArg::Ball),
            None if s == "sphere" => Ok(DomainArg::Sphere),
            _ => Err(format!("`{s}` is not one of box:L, ball:R, sphere")),
        }
    }
}

impl TryFrom<String> for DomainArg {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl fmt::Display for DomainArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainArg::Box(side) => write!(f, "box:{side}"),
            DomainArg::Ball(radius) => write!(f, "ball:{radius}"),
            DomainArg::Sphere => f.write_str("sphere"),
        }
    }
}

/// Every tunable, shared by all commands. Each command reads the fields it
/// needs and applies its own defaults to the rest.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// TOML file with the same keys as the long flags; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Schedule: `paper` (asymptotic, refuses desk-scale Δ) or `custom` (default).
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Bite parameter γ in custom mode (default 0.25).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Slack α in custom mode; needs 2γ² ≤ α ≤ γ/2 (default 0.125).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of nibble rounds in custom mode (default 8).
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Failed attempts allowed per nibble step (default 64).
    #[arg(long)]
    pub max_retries: Option<usize>,
    /// Seed of every random choice (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ambient dimension d.
    #[arg(long)]
    pub dim: Option<usize>,
    /// `box:L` (periodic), `ball:R` or `sphere`.
    #[arg(long)]
    pub domain: Option<DomainArg>,
    /// Poisson intensity λ (points per unit volume, or expected count on the sphere).
    #[arg(long)]
    pub intensity: Option<f64>,
    /// Packing radius; the interaction distance is twice this.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Minimum angle of a code, in radians.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Prune points of threshold-graph degree at least this.
    #[arg(long)]
    pub degree_cap: Option<usize>,
    /// Prune points sharing at least this many neighbours with another point.
    #[arg(long)]
    pub codegree_cap: Option<usize>,
    /// Output directory (default `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the pruned threshold graph.
    #[arg(long)]
    pub emit_graph: bool,
    /// Write graphs in the binary format.
    #[arg(long)]
    pub binary: bool,
    /// Record wall-clock milliseconds in the trace (otherwise 0).
    #[arg(long)]
    pub timing: bool,
    /// Replace the graph by disjoint copies until it is large enough for the schedule.
    #[arg(long)]
    pub blow_up: bool,
    /// Worker threads; falls back to NIBBLEPACK_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Vertex count of a generated graph.
    #[arg(long)]
    pub vertices: Option<usize>,
    /// Degree of a generated graph.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Clique fraction η of the sharpness construction, or η of the concentration check.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Edge probability of G(n, p), or p of the abstract lemma check.
    #[arg(long)]
    pub edge_prob: Option<f64>,
    /// Field size of the polar graph W(3, q).
    #[arg(long)]
    pub q: Option<usize>,
    /// Clique size of the disjoint-cliques generator.
    #[arg(long)]
    pub clique_size: Option<usize>,
    /// Graphs sampled by the capped generator before giving up.
    #[arg(long)]
    pub attempts: Option<usize>,
    /// Random sets drawn by the concentration check.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Monte-Carlo samples of the tail and Mecke checks.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Two-hop pairs proposed per concentration trial.
    #[arg(long)]
    pub pair_samples: Option<usize>,
}

macro_rules! prefer_self {
    ($a:ident, $b:ident; $($opt:ident),*; $($flag:ident),*) => {
        Settings {
            config: $a.config,
            $($opt: $a.$opt.or($b.$opt),)*
            $($flag: $a.$flag || $b.$flag,)*
        }
    };
}

impl Settings {
    /// Fields set here win; unset ones come from `file`.
    pub fn over(self, file: Settings) -> Settings {
        prefer_self!(self, file;
            mode, gamma, alpha, rounds, max_retries, seed, dim, domain, intensity, radius, theta,
            degree_cap, codegree_cap, out, threads, vertices, degree, eta, edge_prob, q,
            clique_size, attempts, trials, samples, pair_samples;
            emit_graph, binary, timing, blow_up)
    }

    pub fn from_toml(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Format {
            what: "config file",
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Merges the config file, if any, under the flags.
    pub fn resolve(self) -> Result<Settings> {
        match &self.config {
            Some(path) => {
                let file = Settings::from_toml(path)?;
                Ok(self.over(file))
            }
            None => Ok(self),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode.map(Mode::from).unwrap_or_default()
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// `--threads`, else `NIBBLEPACK_THREADS`, else `None` (all cores).
    pub fn thread_count(&self) -> Result<Option<usize>> {
        if self.threads.is_some() {
            return Ok(self.threads);
        }
        match std::env::var("NIBBLEPACK_THREADS") {
            Ok(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("NIBBLEPACK_THREADS = `{v}` is not a thread count"))),
            Err(_) => Ok(None),
        }
    }

    pub fn require<T: Copy>(value: Option<T>, flag: &str, why: &str) -> Result<T> {
        value.ok_or_else(|| CliError::Config(format!("--{flag} is required {why}")))
    }
}
