use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use biphoton::correlate::{
    apparatus_sweep, chsh_value, correlation_degree, correlation_sweep, cos_law,
    joint_probs_analytic, state_correlation_sweep, table1_report, try_chsh_value, ApparatusLaw,
    ChshSetting, CorrelationReport, JointDistribution, CLASSICAL_BOUND, TSIRELSON_BOUND,
};
use biphoton::entangle::{
    coherence_ledger, fringe_scan, mzi_arm_state, premeasure_into, reduced_visibility,
    DetectorModel,
};
use biphoton::optics::{mzi_probabilities, BsConvention, MziConfig, Placement, LABEL_A, LABEL_B};
use biphoton::sampler::{
    estimate_correlation, sample_outcomes_in_block, EstimateWithError, RngSeed, TrialCounts,
};
use biphoton::{Complex, StateVector};
use serde_json::{Map, Value};

use crate::args::{
    ApparatusArgs, ChshArgs, GridArgs, LedgerArgs, MziArgs, OverlapArgs, RtoArgs, SamplingArgs,
    SweepArgs, Table1Args, WhichpathArgs,
};
use crate::table::{real_value, Cell, Table};
use crate::CliError;

pub const MZI_COLUMNS: [&str; 4] = ["phi1_rad", "phi2_rad", "p_1d", "p_2d"];
pub const RTO_COLUMNS: [&str; 9] = [
    "delta_rad",
    "w_rad",
    "p11",
    "p22",
    "p12",
    "p21",
    "p_corr",
    "p_anti",
    "degree",
];
pub const SWEEP_COLUMNS: [&str; 4] = ["delta_rad", "p_corr", "p_anti", "degree"];
pub const TABLE1_COLUMNS: [&str; 8] = [
    "phase_rad",
    "simple_p1",
    "local_p1_a",
    "local_p1_b",
    "p_corr",
    "p_anti",
    "paper_claim",
    "flag",
];
pub const CHSH_COLUMNS: [&str; 8] = [
    "a_rad",
    "a_prime_rad",
    "b_rad",
    "b_prime_rad",
    "s_value",
    "classical_bound",
    "tsirelson_bound",
    "violated",
];
pub const WHICHPATH_COLUMNS: [&str; 3] = ["phase_rad", "p_port1", "p_port2"];
pub const LEDGER_COLUMNS: [&str; 9] = [
    "overlap_re",
    "overlap_im",
    "global_purity",
    "local_purity_a",
    "local_purity_b",
    "local_l1_a",
    "local_l1_b",
    "correlation_visibility",
    "reduced_visibility",
];
const SAMPLED_COUNT_COLUMNS: [&str; 7] = ["trials", "n11", "n22", "n12", "n21", "c_hat", "std_err"];
const SAMPLED_SWEEP_COLUMNS: [&str; 3] = ["trials", "c_hat", "std_err"];
const SAMPLED_CHSH_COLUMNS: [&str; 4] = ["trials", "s_sampled", "s_std_err", "violated_sampled"];

/// What a subcommand produced: its resolved parameters and result rows.
pub struct Outcome {
    pub command: &'static str,
    pub parameters: Map<String, Value>,
    pub table: Table,
}

struct Params(Map<String, Value>);

impl Params {
    fn new() -> Self {
        Params(Map::new())
    }

    fn real(&mut self, key: &str, x: f64) -> &mut Self {
        self.0.insert(key.into(), real_value(x));
        self
    }

    fn text(&mut self, key: &str, s: &str) -> &mut Self {
        self.0.insert(key.into(), Value::String(s.into()));
        self
    }

    fn int(&mut self, key: &str, n: u64) -> &mut Self {
        self.0.insert(key.into(), Value::from(n));
        self
    }

    fn reals(&mut self, key: &str, xs: &[f64]) -> &mut Self {
        self.0.insert(
            key.into(),
            Value::Array(xs.iter().map(|&x| real_value(x)).collect()),
        );
        self
    }
}

fn columns(base: &[&'static str], extra: &[&'static str]) -> Vec<&'static str> {
    base.iter().chain(extra).copied().collect()
}

fn to_radians(x: f64, degrees: bool) -> f64 {
    if degrees {
        x.to_radians()
    } else {
        x
    }
}

fn grid(args: &GridArgs, degrees: bool) -> Result<Vec<f64>, CliError> {
    args.resolve(degrees).map_err(CliError::Usage)
}

/// Resolved sampling request: trials and seed.
#[derive(Debug, Clone, Copy)]
struct Sampling {
    trials: u64,
    seed: RngSeed,
}

fn sampling(args: &SamplingArgs, env_seed: Option<&str>) -> Result<Option<Sampling>, CliError> {
    let Some(trials) = args.trials else {
        if args.seed.is_some() {
            return Err(CliError::Usage("--seed requires --trials".into()));
        }
        return Ok(None);
    };
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let seed = match (args.seed, env_seed) {
        (Some(s), _) => s,
        (None, Some(env)) => env.trim().parse().map_err(|_| {
            CliError::Usage(format!("BIPHOTON_SEED is not an unsigned integer: {env:?}"))
        })?,
        (None, None) => 0,
    };
    Ok(Some(Sampling {
        trials,
        seed: RngSeed(seed),
    }))
}

impl Sampling {
    fn record(&self, p: &mut Params) {
        p.int("trials", self.trials).int("seed", self.seed.0);
    }
}

/// Closed-form law, or the calibrated simulated apparatus.
enum Law {
    Analytic,
    Apparatus(ApparatusLaw),
}

impl Law {
    fn from_args(args: &ApparatusArgs) -> Result<Self, CliError> {
        if !args.apparatus {
            return Ok(Law::Analytic);
        }
        let placement =
            Placement::parse(&args.placement).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Law::Apparatus(ApparatusLaw::new(
            placement,
            BsConvention::default(),
        )?))
    }

    /// Joint distribution at phase difference `delta` plus offset `w`.
    fn joint(&self, delta: f64, w: f64) -> Result<JointDistribution, CliError> {
        Ok(match self {
            Law::Analytic => joint_probs_analytic(delta, w)?,
            Law::Apparatus(law) => law.joint(delta + w)?,
        })
    }

    fn record(&self, p: &mut Params) {
        match self {
            Law::Analytic => {
                p.text("mode", "analytic");
            }
            Law::Apparatus(law) => {
                p.text("mode", "apparatus")
                    .text("placement", &law.placement.name())
                    .real(
                        "bs_transmission_phase_rad",
                        law.convention.transmission_phase,
                    )
                    .real("bs_reflection_phase_rad", law.convention.reflection_phase)
                    .real("apparatus_offset_rad", law.w);
            }
        }
    }
}

fn count_cells(tc: &TrialCounts, est: &EstimateWithError) -> Vec<Cell> {
    vec![
        est.n.into(),
        tc.n11.into(),
        tc.n22.into(),
        tc.n12.into(),
        tc.n21.into(),
        est.c_hat.into(),
        est.std_err.into(),
    ]
}

pub fn mzi(args: &MziArgs) -> Result<Outcome, CliError> {
    let deg = args.output.degrees;
    let phi2 = to_radians(args.phi2, deg);
    let mut p = Params::new();
    let phi1s = match args.phi1 {
        Some(x) => vec![to_radians(x, deg)],
        None => grid(&args.grid, deg)?,
    };
    p.reals("phi1_rad", &phi1s).real("phi2_rad", phi2);

    let mut table = Table::new(&MZI_COLUMNS);
    for &phi1 in &phi1s {
        let o = mzi_probabilities(&MziConfig { phi1, phi2 })?;
        table.push(vec![phi1.into(), phi2.into(), o.p_1d.into(), o.p_2d.into()]);
    }
    Ok(Outcome {
        command: "mzi",
        parameters: p.0,
        table,
    })
}

pub fn rto(args: &RtoArgs, env_seed: Option<&str>) -> Result<Outcome, CliError> {
    let deg = args.output.degrees;
    let phase_a = to_radians(args.phase_a, deg);
    let phase_b = to_radians(args.phase_b, deg);
    let w = to_radians(args.w, deg);
    let law = Law::from_args(&args.apparatus)?;
    let sampled = sampling(&args.sampling, env_seed)?;

    let mut p = Params::new();
    p.real("phase_a_rad", phase_a)
        .real("phase_b_rad", phase_b)
        .real("w_rad", w);
    law.record(&mut p);

    let delta = phase_b - phase_a;
    let jd = law.joint(delta, w)?;
    let corr = correlation_degree(&jd);
    let mut row: Vec<Cell> = vec![
        delta.into(),
        w.into(),
        jd.p11.into(),
        jd.p22.into(),
        jd.p12.into(),
        jd.p21.into(),
        corr.p_corr.into(),
        corr.p_anti.into(),
        corr.degree.into(),
    ];
    let mut table = match sampled {
        None => Table::new(&RTO_COLUMNS),
        Some(s) => {
            s.record(&mut p);
            let tc = sample_outcomes_in_block(&jd, s.trials, s.seed, 0)?;
            row.extend(count_cells(&tc, &estimate_correlation(&tc)?));
            Table {
                columns: columns(&RTO_COLUMNS, &SAMPLED_COUNT_COLUMNS),
                rows: Vec::new(),
            }
        }
    };
    table.push(row);
    Ok(Outcome {
        command: "rto",
        parameters: p.0,
        table,
    })
}

pub fn sweep(args: &SweepArgs, env_seed: Option<&str>) -> Result<Outcome, CliError> {
    let deg = args.output.degrees;
    let w = to_radians(args.w, deg);
    let deltas = grid(&args.grid, deg)?;
    let law = Law::from_args(&args.apparatus)?;
    let sampled = sampling(&args.sampling, env_seed)?;

    let mut p = Params::new();
    p.reals("delta_rad", &deltas).real("w_rad", w);
    law.record(&mut p);

    let reports: Vec<CorrelationReport> = match &law {
        Law::Analytic => correlation_sweep(&deltas, w)?,
        Law::Apparatus(a) => {
            let shifted: Vec<f64> = deltas.iter().map(|d| d + w).collect();
            let mut r = apparatus_sweep(&shifted, a.placement, a.convention)?;
            for (rep, &d) in r.iter_mut().zip(&deltas) {
                rep.delta = d;
            }
            r
        }
    };

    let mut table = match sampled {
        None => Table::new(&SWEEP_COLUMNS),
        Some(s) => {
            s.record(&mut p);
            Table::new(&columns(&SWEEP_COLUMNS, &SAMPLED_SWEEP_COLUMNS))
        }
    };
    for (k, r) in reports.iter().enumerate() {
        let mut row: Vec<Cell> = vec![
            r.delta.into(),
            r.p_corr.into(),
            r.p_anti.into(),
            r.degree.into(),
        ];
        if let Some(s) = sampled {
            let jd = law.joint(r.delta, w)?;
            let block = u32::try_from(k).map_err(|_| CliError::Usage("grid too large".into()))?;
            let est =
                estimate_correlation(&sample_outcomes_in_block(&jd, s.trials, s.seed, block)?)?;
            row.extend([Cell::Int(est.n), est.c_hat.into(), est.std_err.into()]);
        }
        table.push(row);
    }
    Ok(Outcome {
        command: "sweep",
        parameters: p.0,
        table,
    })
}

pub fn table1(args: &Table1Args) -> Result<Outcome, CliError> {
    let deg = args.output.degrees;
    let custom: Option<Vec<f64>> = args
        .grid
        .as_ref()
        .map(|g| g.0.iter().map(|&x| to_radians(x, deg)).collect());
    let rows = table1_report(custom.as_deref())?;

    let mut p = Params::new();
    let phases: Vec<f64> = rows.iter().map(|r| r.phase).collect();
    p.reals("phase_rad", &phases);

    let mut table = Table::new(&TABLE1_COLUMNS);
    for r in rows {
        table.push(vec![
            r.phase.into(),
            r.simple_p1.into(),
            r.local_p1_a.into(),
            r.local_p1_b.into(),
            r.p_corr.into(),
            r.p_anti.into(),
            r.printed.unwrap_or_default().into(),
            r.flag.as_str().into(),
        ]);
    }
    Ok(Outcome {
        command: "table1",
        parameters: p.0,
        table,
    })
}

pub fn chsh(args: &ChshArgs, env_seed: Option<&str>) -> Result<Outcome, CliError> {
    let deg = args.output.degrees;
    let s = ChshSetting {
        a: to_radians(args.a, deg),
        a_prime: to_radians(args.a_prime, deg),
        b: to_radians(args.b, deg),
        b_prime: to_radians(args.b_prime, deg),
    };
    let law = Law::from_args(&args.apparatus)?;
    let sampled = sampling(&args.sampling, env_seed)?;

    let mut p = Params::new();
    p.real("a_rad", s.a)
        .real("a_prime_rad", s.a_prime)
        .real("b_rad", s.b)
        .real("b_prime_rad", s.b_prime);
    law.record(&mut p);

    let value = match &law {
        Law::Analytic => chsh_value(&s, cos_law),
        Law::Apparatus(a) => try_chsh_value(&s, |d| a.degree(d))?,
    };
    let mut row: Vec<Cell> = vec![
        s.a.into(),
        s.a_prime.into(),
        s.b.into(),
        s.b_prime.into(),
        value.into(),
        CLASSICAL_BOUND.into(),
        TSIRELSON_BOUND.into(),
        (value > CLASSICAL_BOUND).into(),
    ];
    let mut table = match sampled {
        None => Table::new(&CHSH_COLUMNS),
        Some(smp) => {
            smp.record(&mut p);
            let mut e = [0.0; 4];
            let mut var = 0.0;
            for (k, (slot, d)) in e.iter_mut().zip(s.deltas()).enumerate() {
                let jd = law.joint(d, 0.0)?;
                let est = estimate_correlation(&sample_outcomes_in_block(
                    &jd, smp.trials, smp.seed, k as u32,
                )?)?;
                *slot = est.c_hat;
                var += est.std_err * est.std_err;
            }
            let s_hat = (e[0] - e[1] + e[2] + e[3]).abs();
            row.extend([
                Cell::Int(smp.trials),
                s_hat.into(),
                var.sqrt().into(),
                (s_hat > CLASSICAL_BOUND).into(),
            ]);
            Table::new(&columns(&CHSH_COLUMNS, &SAMPLED_CHSH_COLUMNS))
        }
    };
    table.push(row);
    Ok(Outcome {
        command: "chsh",
        parameters: p.0,
        table,
    })
}

fn detector(args: &OverlapArgs) -> Result<DetectorModel, CliError> {
    DetectorModel::new(Complex::new(args.overlap, args.overlap_im))
        .map_err(|e| CliError::Usage(e.to_string()))
}

pub fn whichpath(args: &WhichpathArgs) -> Result<Outcome, CliError> {
    let det = detector(&args.overlap)?;
    let phases = grid(&args.grid, args.output.degrees)?;
    let mut p = Params::new();
    p.real("overlap_re", args.overlap.overlap)
        .real("overlap_im", args.overlap.overlap_im)
        .reals("phase_rad", &phases);

    let scan = fringe_scan(&mzi_arm_state("S")?, &det, &phases)?;
    let mut table = Table::new(&WHICHPATH_COLUMNS);
    for pt in &scan.points {
        table.push(vec![
            pt.phase.into(),
            pt.p_port1.into(),
            (1.0 - pt.p_port1).into(),
        ]);
    }
    Ok(Outcome {
        command: "whichpath",
        parameters: p.0,
        table,
    })
}

pub fn ledger(args: &LedgerArgs) -> Result<Outcome, CliError> {
    let det = detector(&args.overlap)?;
    if args.points < 3 {
        return Err(CliError::Usage("--points must be at least 3".into()));
    }
    let deltas: Vec<f64> = (0..args.points)
        .map(|k| TAU * k as f64 / (args.points - 1) as f64)
        .collect();
    let mut p = Params::new();
    p.real("overlap_re", args.overlap.overlap)
        .real("overlap_im", args.overlap.overlap_im)
        .int("points", args.points as u64);

    let h = Complex::new(FRAC_1_SQRT_2, 0.0);
    let system = StateVector::two_path(LABEL_A, h, h)?;
    let joint = premeasure_into(&system, &det, LABEL_B)?;
    let sweep = state_correlation_sweep(
        &joint,
        &deltas,
        Placement::default(),
        BsConvention::default(),
    )?;
    let l = coherence_ledger(&joint, Some(&sweep))?;
    let vis = reduced_visibility(&joint, LABEL_A)?;

    let mut table = Table::new(&LEDGER_COLUMNS);
    table.push(vec![
        args.overlap.overlap.into(),
        args.overlap.overlap_im.into(),
        l.global_purity.into(),
        l.local_purity_a.into(),
        l.local_purity_b.into(),
        l.local_l1_a.into(),
        l.local_l1_b.into(),
        l.correlation_visibility.unwrap_or(f64::NAN).into(),
        vis.into(),
    ]);
    Ok(Outcome {
        command: "ledger",
        parameters: p.0,
        table,
    })
}
