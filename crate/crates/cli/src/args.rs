use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::table::OutputFormat;

#[derive(Debug, Parser)]
#[command(
    name = "biphoton",
    version,
    about = "Single- and two-photon interferometry experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-photon Mach–Zehnder detector probabilities
    Mzi(MziArgs),
    /// Joint distribution and correlation at one phase setting
    Rto(RtoArgs),
    /// Degree of correlation over a phase-difference grid
    Sweep(SweepArgs),
    /// Simple superposition vs. entangled pair, with discrepancy flags
    Table1(Table1Args),
    /// CHSH Bell test
    Chsh(ChshArgs),
    /// Self-interference fringes with a which-path detector
    Whichpath(WhichpathArgs),
    /// Coherence ledger of a premeasured state
    Ledger(LedgerArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,

    /// Write to this file instead of standard output
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,

    /// Read every phase argument in degrees (output stays in radians)
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    /// Monte Carlo trials; switches the command to sampled mode
    #[arg(long)]
    pub trials: Option<u64>,

    /// Seed for sampled mode (default: $BIPHOTON_SEED, else 0)
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Number of evenly spaced points from --start to --stop inclusive
    #[arg(long, default_value_t = 25)]
    pub points: usize,

    /// First grid phase (default 0)
    #[arg(long, value_parser = parse_phase, allow_hyphen_values = true)]
    pub start: Option<f64>,

    /// Last grid phase (default 2π)
    #[arg(long, value_parser = parse_phase, allow_hyphen_values = true)]
    pub stop: Option<f64>,

    /// Explicit comma-separated phases; overrides --points/--start/--stop
    #[arg(long, value_parser = parse_phase_list, allow_hyphen_values = true)]
    pub grid: Option<PhaseList>,
}

#[derive(Debug, Clone, Args)]
pub struct MziArgs {
    /// Path-1 shifter; when omitted, φ₁ is swept over the grid
    #[arg(long, value_parser = parse_phase, allow_hyphen_values = true)]
    pub phi1: Option<f64>,

    /// Path-2 shifter
    #[arg(long, value_parser = parse_phase, default_value = "0", allow_hyphen_values = true)]
    pub phi2: f64,

    #[command(flatten)]
    pub grid: GridArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ApparatusArgs {
    /// Simulate the interferometer instead of using the closed-form law
    #[arg(long)]
    pub apparatus: bool,

    /// Shifter placement used with --apparatus (a1b1, a1b2, a2b1, a2b2)
    #[arg(long, default_value = "a1b2")]
    pub placement: String,
}

#[derive(Debug, Clone, Args)]
pub struct RtoArgs {
    #[arg(long, value_parser = parse_phase, default_value = "0", allow_hyphen_values = true)]
    pub phase_a: f64,

    #[arg(long, value_parser = parse_phase, default_value = "0", allow_hyphen_values = true)]
    pub phase_b: f64,

    /// Fixed phase offset added to φ_B − φ_A
    #[arg(long, value_parser = parse_phase, default_value = "0", allow_hyphen_values = true)]
    pub w: f64,

    #[command(flatten)]
    pub apparatus: ApparatusArgs,

    #[command(flatten)]
    pub sampling: SamplingArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Fixed phase offset added to every Δ
    #[arg(long, value_parser = parse_phase, default_value = "0", allow_hyphen_values = true)]
    pub w: f64,

    #[command(flatten)]
    pub grid: GridArgs,

    #[command(flatten)]
    pub apparatus: ApparatusArgs,

    #[command(flatten)]
    pub sampling: SamplingArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Table1Args {
    /// Comma-separated phases (default: 0, π/4, π/2, 3π/4, π)
    #[arg(long, value_parser = parse_phase_list, allow_hyphen_values = true)]
    pub grid: Option<PhaseList>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ChshArgs {
    #[arg(long, value_parser = parse_phase, default_value = "0", allow_hyphen_values = true)]
    pub a: f64,

    #[arg(long, value_parser = parse_phase, default_value = "pi/2", allow_hyphen_values = true)]
    pub a_prime: f64,

    #[arg(long, value_parser = parse_phase, default_value = "pi/4", allow_hyphen_values = true)]
    pub b: f64,

    #[arg(long, value_parser = parse_phase, default_value = "3pi/4", allow_hyphen_values = true)]
    pub b_prime: f64,

    #[command(flatten)]
    pub apparatus: ApparatusArgs,

    /// Trials per correlator in sampled mode
    #[command(flatten)]
    pub sampling: SamplingArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OverlapArgs {
    /// Real part of the pointer-state overlap c (0: ideal detector, 1: none)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub overlap: f64,

    /// Imaginary part of c
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub overlap_im: f64,
}

#[derive(Debug, Clone, Args)]
pub struct WhichpathArgs {
    #[command(flatten)]
    pub overlap: OverlapArgs,

    #[command(flatten)]
    pub grid: GridArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LedgerArgs {
    #[command(flatten)]
    pub overlap: OverlapArgs,

    /// Points of the correlation sweep used for the correlation visibility
    #[arg(long, default_value_t = 25)]
    pub points: usize,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseList(pub Vec<f64>);

/// Parses a phase: a plain number or a multiple of π such as `pi`, `-pi/2`,
/// `3pi/4`, `0.5*pi`.
pub fn parse_phase(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    if let Ok(x) = t.parse::<f64>() {
        return if x.is_finite() {
            Ok(x)
        } else {
            Err(format!("phase must be finite: {s:?}"))
        };
    }
    let bad =
        || format!("invalid phase {s:?} (expected a number or a multiple of pi such as 3pi/4)");
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coeff = num
        .strip_suffix("pi")
        .or_else(|| num.strip_suffix('π'))
        .ok_or_else(bad)?
        .trim()
        .trim_end_matches('*')
        .trim();
    let coeff = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let x = coeff * PI / den;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad())
    }
}

pub fn parse_phase_list(s: &str) -> Result<PhaseList, String> {
    let v = s
        .split(',')
        .map(parse_phase)
        .collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err("empty phase list".into());
    }
    Ok(PhaseList(v))
}

impl GridArgs {
    /// Grid in radians, honoring `--degrees`.
    pub fn resolve(&self, degrees: bool) -> Result<Vec<f64>, String> {
        let scale = |x: f64| if degrees { x.to_radians() } else { x };
        if let Some(PhaseList(g)) = &self.grid {
            return Ok(g.iter().copied().map(scale).collect());
        }
        let start = self.start.map_or(0.0, scale);
        let stop = self.stop.map_or(TAU, scale);
        match self.points {
            0 => Err("--points must be at least 1".into()),
            1 => Ok(vec![start]),
            n => Ok((0..n)
                .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
                .collect()),
        }
    }
}
