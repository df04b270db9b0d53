//! Joint detector statistics of the two-photon interferometer: closed-form
//! and simulated distributions, the degree of correlation, phase sweeps, the
//! superposition-vs-entanglement table, the CHSH test and no-signaling checks.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{born_probabilities, partial_trace, StateVector, ALGEBRA_TOL};
use crate::optics::{
    build_rto_state, calibrate_offset, mzi_probabilities, run_stations, BsConvention, MziConfig,
    Placement, RtoConfig, LABEL_A, LABEL_B,
};

pub const CLASSICAL_BOUND: f64 = 2.0;
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

/// Probabilities of the four coincidence outcomes; `pXY` is port X at
/// station A and port Y at station B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub p11: f64,
    pub p22: f64,
    pub p12: f64,
    pub p21: f64,
}

impl JointDistribution {
    pub fn new(p11: f64, p22: f64, p12: f64, p21: f64) -> Result<Self> {
        let jd = JointDistribution { p11, p22, p12, p21 };
        for p in jd.to_array() {
            if !p.is_finite() || !(-ALGEBRA_TOL..=1.0 + ALGEBRA_TOL).contains(&p) {
                return Err(Error::Input(format!("probability {p} outside [0, 1]")));
            }
        }
        let total: f64 = jd.to_array().iter().sum();
        if (total - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::Normalization(total));
        }
        Ok(jd)
    }

    /// From Born probabilities in joint-basis order (11, 12, 21, 22).
    pub fn from_born(p: &[f64]) -> Result<Self> {
        if p.len() != 4 {
            return Err(Error::Shape(format!(
                "{} outcome probabilities for a 2x2 system",
                p.len()
            )));
        }
        Self::new(p[0], p[3], p[1], p[2])
    }

    /// `[p11, p22, p12, p21]`, the fixed outcome order used for sampling.
    pub fn to_array(&self) -> [f64; 4] {
        [self.p11, self.p22, self.p12, self.p21]
    }

    pub fn p_1a(&self) -> f64 {
        self.p11 + self.p12
    }

    pub fn p_1b(&self) -> f64 {
        self.p11 + self.p21
    }
}

/// `p11 = p22 = ¼[1 + cos(Δ + w)]`, `p12 = p21 = ¼[1 − cos(Δ + w)]`.
pub fn joint_probs_analytic(delta: f64, w: f64) -> Result<JointDistribution> {
    if !delta.is_finite() || !w.is_finite() {
        return Err(Error::Input("phases must be finite".into()));
    }
    let k = (delta + w).cos();
    let same = 0.25 * (1.0 + k);
    let diff = 0.25 * (1.0 - k);
    JointDistribution::new(same, same, diff, diff)
}

/// Born distribution of the simulated apparatus.
pub fn joint_probs_from_state(cfg: &RtoConfig) -> Result<JointDistribution> {
    JointDistribution::from_born(&born_probabilities(&build_rto_state(cfg)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub p_corr: f64,
    pub p_anti: f64,
    pub degree: f64,
}

pub fn correlation_degree(jd: &JointDistribution) -> Correlation {
    let p_corr = jd.p11 + jd.p22;
    let p_anti = jd.p12 + jd.p21;
    Correlation {
        p_corr,
        p_anti,
        degree: p_corr - p_anti,
    }
}

/// One point of a correlation-vs-phase curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub delta: f64,
    pub p_corr: f64,
    pub p_anti: f64,
    pub degree: f64,
}

impl CorrelationReport {
    pub fn new(delta: f64, jd: &JointDistribution) -> Self {
        let Correlation {
            p_corr,
            p_anti,
            degree,
        } = correlation_degree(jd);
        CorrelationReport {
            delta,
            p_corr,
            p_anti,
            degree,
        }
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Input("empty phase grid".into()));
    }
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::Input(format!("non-finite grid value {x}")));
    }
    Ok(())
}

/// Closed-form correlation curve with offset `w`.
pub fn correlation_sweep(grid: &[f64], w: f64) -> Result<Vec<CorrelationReport>> {
    check_grid(grid)?;
    grid.iter()
        .map(|&d| Ok(CorrelationReport::new(d, &joint_probs_analytic(d, w)?)))
        .collect()
}

/// Correlation curve of the simulated apparatus, each point set up at the
/// calibrated phase difference `Δ`.
pub fn apparatus_sweep(
    grid: &[f64],
    placement: Placement,
    conv: BsConvention,
) -> Result<Vec<CorrelationReport>> {
    check_grid(grid)?;
    let law = ApparatusLaw::new(placement, conv)?;
    grid.par_iter()
        .map(|&d| Ok(CorrelationReport::new(d, &law.joint(d)?)))
        .collect()
}

/// Correlation curve obtained by sending an arbitrary A⊗B two-path state
/// through both stations, with the phase origin calibrated on the pair source.
pub fn state_correlation_sweep(
    state: &StateVector,
    grid: &[f64],
    placement: Placement,
    conv: BsConvention,
) -> Result<Vec<CorrelationReport>> {
    check_grid(grid)?;
    let w = calibrate_offset(&conv, placement)?;
    let sign_b = placement.nonlocal_phase(0.0, 1.0);
    grid.par_iter()
        .map(|&d| {
            let out = run_stations(state, 0.0, sign_b * (d - w), placement, &conv)?;
            Ok(CorrelationReport::new(
                d,
                &JointDistribution::from_born(&born_probabilities(&out)?)?,
            ))
        })
        .collect()
}

/// Amplitude of the cosine component of a correlation curve.
///
/// Projects the degrees onto `cos Δ` and `sin Δ` separately (one inner
/// product each, normalized by the grid's own `Σcos²` and `Σsin²`). Exact for
/// grids spanning whole periods uniformly, with or without the closing point.
pub fn cosine_amplitude(reports: &[CorrelationReport]) -> Result<f64> {
    if reports.is_empty() {
        return Err(Error::Input("empty correlation sweep".into()));
    }
    let (mut cc, mut ss, mut yc, mut ys) = (0.0, 0.0, 0.0, 0.0);
    for r in reports {
        let (s, c) = r.delta.sin_cos();
        cc += c * c;
        ss += s * s;
        yc += r.degree * c;
        ys += r.degree * s;
    }
    if cc <= ALGEBRA_TOL || ss <= ALGEBRA_TOL {
        return Err(Error::Input(
            "phase grid does not resolve both quadratures".into(),
        ));
    }
    Ok((yc / cc).hypot(ys / ss))
}

/// Calibrated simulated apparatus, usable as a correlation law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApparatusLaw {
    pub w: f64,
    pub placement: Placement,
    pub convention: BsConvention,
}

impl ApparatusLaw {
    pub fn new(placement: Placement, convention: BsConvention) -> Result<Self> {
        Ok(ApparatusLaw {
            w: calibrate_offset(&convention, placement)?,
            placement,
            convention,
        })
    }

    pub fn config(&self, delta: f64) -> Result<RtoConfig> {
        if !delta.is_finite() {
            return Err(Error::Input(format!("non-finite phase difference {delta}")));
        }
        let phi_b = self.placement.nonlocal_phase(0.0, 1.0) * (delta - self.w);
        Ok(RtoConfig {
            phi_a: 0.0,
            phi_b,
            w: self.w,
            placement: self.placement,
            convention: self.convention,
        })
    }

    pub fn joint(&self, delta: f64) -> Result<JointDistribution> {
        joint_probs_from_state(&self.config(delta)?)
    }

    pub fn degree(&self, delta: f64) -> Result<f64> {
        Ok(correlation_degree(&self.joint(delta)?).degree)
    }
}

// ---------------------------------------------------------------------------
// Superposition vs. entanglement table

pub const TABLE1_GRID: [f64; 5] = [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4, PI];

/// A row of the originally published table, as printed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedRow {
    pub phase: f64,
    pub simple_p1: f64,
    pub p_corr: f64,
    pub text: &'static str,
}

pub const PRINTED_TABLE1: [PrintedRow; 5] = [
    PrintedRow {
        phase: 0.0,
        simple_p1: 1.00,
        p_corr: 1.00,
        text: "100% corr, 0% anti",
    },
    PrintedRow {
        phase: FRAC_PI_4,
        simple_p1: 0.71,
        p_corr: 0.71,
        text: "71% corr, 29% anti",
    },
    PrintedRow {
        phase: FRAC_PI_2,
        simple_p1: 0.50,
        p_corr: 0.50,
        text: "50% corr, 50% anti",
    },
    PrintedRow {
        phase: 3.0 * FRAC_PI_4,
        simple_p1: 0.29,
        p_corr: 0.29,
        text: "29% corr, 71% anti",
    },
    PrintedRow {
        phase: PI,
        simple_p1: 0.00,
        p_corr: 0.00,
        text: "0% corr, 100% anti",
    },
];

/// Printed values are whole percentages.
const PRINTED_ROUNDING: f64 = 0.005 + 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Table1Flag {
    Match,
    Mismatch,
    /// No printed row at this phase.
    NoReference,
}

impl Table1Flag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Table1Flag::Match => "match",
            Table1Flag::Mismatch => "mismatch",
            Table1Flag::NoReference => "n/a",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub phase: f64,
    /// P("1") of a simple single-photon superposition at this phase.
    pub simple_p1: f64,
    pub local_p1_a: f64,
    pub local_p1_b: f64,
    pub p_corr: f64,
    pub p_anti: f64,
    pub printed: Option<String>,
    pub flag: Table1Flag,
}

/// Computes the table from the interference laws and compares it against the
/// printed values where a printed row exists.
pub fn table1_report(grid: Option<&[f64]>) -> Result<Vec<Table1Row>> {
    let grid = grid.unwrap_or(&TABLE1_GRID);
    check_grid(grid)?;
    let law = ApparatusLaw::new(Placement::default(), BsConvention::default())?;
    grid.iter()
        .map(|&phase| {
            let simple_p1 = mzi_probabilities(&MziConfig {
                phi1: phase,
                phi2: 0.0,
            })?
            .p_1d;
            let state = build_rto_state(&law.config(phase)?)?;
            let local_p1_a = partial_trace(&state, LABEL_A)?.entry(0, 0).re;
            let local_p1_b = partial_trace(&state, LABEL_B)?.entry(0, 0).re;
            let corr = correlation_degree(&joint_probs_analytic(phase, 0.0)?);
            let printed = PRINTED_TABLE1
                .iter()
                .find(|r| (r.phase - phase).abs() <= 1e-9);
            let flag = match printed {
                None => Table1Flag::NoReference,
                Some(r) => {
                    let ok = (r.simple_p1 - simple_p1).abs() <= PRINTED_ROUNDING
                        && (r.p_corr - corr.p_corr).abs() <= PRINTED_ROUNDING;
                    if ok {
                        Table1Flag::Match
                    } else {
                        Table1Flag::Mismatch
                    }
                }
            };
            Ok(Table1Row {
                phase,
                simple_p1,
                local_p1_a,
                local_p1_b,
                p_corr: corr.p_corr,
                p_anti: corr.p_anti,
                printed: printed.map(|r| r.text.to_string()),
                flag,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// CHSH

/// Two phase settings per station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSetting {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl Default for ChshSetting {
    /// Settings of maximal violation for the cosine law.
    fn default() -> Self {
        ChshSetting {
            a: 0.0,
            a_prime: FRAC_PI_2,
            b: FRAC_PI_4,
            b_prime: 3.0 * FRAC_PI_4,
        }
    }
}

impl ChshSetting {
    /// The four phase differences `b−a, b′−a, b−a′, b′−a′`.
    pub fn deltas(&self) -> [f64; 4] {
        [
            self.b - self.a,
            self.b_prime - self.a,
            self.b - self.a_prime,
            self.b_prime - self.a_prime,
        ]
    }
}

pub fn cos_law(delta: f64) -> f64 {
    delta.cos()
}

/// `S = |E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)|` with `E(x,y) = correlation(y − x)`.
pub fn chsh_value(s: &ChshSetting, correlation: impl Fn(f64) -> f64) -> f64 {
    let [ab, abp, apb, apbp] = s.deltas().map(correlation);
    (ab - abp + apb + apbp).abs()
}

/// [`chsh_value`] for fallible correlation laws.
pub fn try_chsh_value(s: &ChshSetting, correlation: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut e = [0.0; 4];
    for (slot, d) in e.iter_mut().zip(s.deltas()) {
        *slot = correlation(d)?;
    }
    let [ab, abp, apb, apbp] = e;
    Ok((ab - abp + apb + apbp).abs())
}

// ---------------------------------------------------------------------------
// No-signaling

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalPoint {
    pub phi_a: f64,
    pub phi_b: f64,
    pub p_1a: f64,
    pub p_1b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignalingReport {
    pub points: Vec<MarginalPoint>,
    /// Largest `|P(1A) − ½|` or `|P(1B) − ½|` over the grid.
    pub max_deviation: f64,
}

/// Single-station marginals of the default apparatus over physical shifter settings.
pub fn no_signaling_scan(pairs: &[(f64, f64)]) -> Result<NoSignalingReport> {
    no_signaling_scan_with(pairs, Placement::default(), BsConvention::default())
}

pub fn no_signaling_scan_with(
    pairs: &[(f64, f64)],
    placement: Placement,
    conv: BsConvention,
) -> Result<NoSignalingReport> {
    if pairs.is_empty() {
        return Err(Error::Input("empty phase grid".into()));
    }
    let w = calibrate_offset(&conv, placement)?;
    let points = pairs
        .par_iter()
        .map(|&(phi_a, phi_b)| {
            if !phi_a.is_finite() || !phi_b.is_finite() {
                return Err(Error::Input("non-finite phase setting".into()));
            }
            let jd = joint_probs_from_state(&RtoConfig {
                phi_a,
                phi_b,
                w,
                placement,
                convention: conv,
            })?;
            Ok(MarginalPoint {
                phi_a,
                phi_b,
                p_1a: jd.p_1a(),
                p_1b: jd.p_1b(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = points
        .iter()
        .flat_map(|p| [(p.p_1a - 0.5).abs(), (p.p_1b - 0.5).abs()])
        .fold(0.0, f64::max);
    Ok(NoSignalingReport {
        points,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jd_close(jd: &JointDistribution, want: [f64; 4]) {
        for (g, w) in jd.to_array().iter().zip(want) {
            assert!((g - w).abs() <= 1e-12, "{jd:?} vs {want:?}");
        }
    }

    #[test]
    fn analytic_points() {
        jd_close(
            &joint_probs_analytic(0.0, 0.0).unwrap(),
            [0.5, 0.5, 0.0, 0.0],
        );
        jd_close(
            &joint_probs_analytic(PI, 0.0).unwrap(),
            [0.0, 0.0, 0.5, 0.5],
        );
        jd_close(
            &joint_probs_analytic(PI / 3.0, 0.0).unwrap(),
            [0.375, 0.375, 0.125, 0.125],
        );
        assert!(joint_probs_analytic(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn apparatus_points() {
        let law = ApparatusLaw::new(Placement::default(), BsConvention::default()).unwrap();
        jd_close(&law.joint(0.0).unwrap(), [0.5, 0.5, 0.0, 0.0]);
        jd_close(&law.joint(FRAC_PI_2).unwrap(), [0.25; 4]);
    }

    #[test]
    fn degree_examples() {
        let c = correlation_degree(&JointDistribution::new(0.5, 0.5, 0.0, 0.0).unwrap());
        assert_eq!(c.degree, 1.0);
        let c = correlation_degree(&JointDistribution::new(0.0, 0.0, 0.5, 0.5).unwrap());
        assert_eq!(c.degree, -1.0);
        let c = correlation_degree(&joint_probs_analytic(PI / 3.0, 0.0).unwrap());
        assert!((c.degree - 0.5).abs() <= 1e-12);
        assert!((c.p_corr - 0.75).abs() <= 1e-12);
    }

    #[test]
    fn distribution_validation() {
        assert!(JointDistribution::new(0.5, 0.5, 0.5, 0.0).is_err());
        assert!(JointDistribution::new(1.5, -0.5, 0.0, 0.0).is_err());
        assert!(JointDistribution::from_born(&[1.0]).is_err());
    }

    #[test]
    fn sweep_examples() {
        let s = correlation_sweep(&[0.0, FRAC_PI_2, PI], 0.0).unwrap();
        let d: Vec<f64> = s.iter().map(|r| r.degree).collect();
        for (g, w) in d.iter().zip([1.0, 0.0, -1.0]) {
            assert!((g - w).abs() <= 1e-12);
        }
        let s = correlation_sweep(&[FRAC_PI_4], 0.0).unwrap();
        assert!((s[0].degree - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-12);
        assert!(matches!(correlation_sweep(&[], 0.0), Err(Error::Input(_))));
    }

    #[test]
    fn reorigined_sweep_matches() {
        let grid: Vec<f64> = (0..9).map(|k| k as f64 * 0.7).collect();
        let shifted: Vec<f64> = grid.iter().map(|d| d - PI).collect();
        let a = correlation_sweep(&grid, 0.0).unwrap();
        let b = correlation_sweep(&shifted, PI).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.degree - y.degree).abs() <= 1e-12);
        }
    }

    #[test]
    fn table1_rows() {
        let rows = table1_report(None).unwrap();
        assert_eq!(rows.len(), 5);
        assert!((rows[0].p_corr - 1.0).abs() <= 1e-12);
        assert!((rows[2].p_corr - 0.5).abs() <= 1e-12 && (rows[2].p_anti - 0.5).abs() <= 1e-12);
        assert!((rows[1].p_corr - 0.5 * (1.0 + FRAC_PI_4.cos())).abs() <= 1e-12);
        let flags: Vec<Table1Flag> = rows.iter().map(|r| r.flag).collect();
        use Table1Flag::*;
        assert_eq!(flags, [Match, Mismatch, Match, Mismatch, Match]);
        for r in &rows {
            assert!((r.local_p1_a - 0.5).abs() <= 1e-12 && (r.local_p1_b - 0.5).abs() <= 1e-12);
        }
        let custom = table1_report(Some(&[1.0])).unwrap();
        assert_eq!(custom[0].flag, Table1Flag::NoReference);
        assert!(custom[0].printed.is_none());
    }

    #[test]
    fn chsh_examples() {
        let s = chsh_value(&ChshSetting::default(), cos_law);
        assert!((s - TSIRELSON_BOUND).abs() <= 1e-12);
        let zero = ChshSetting {
            a: 0.0,
            a_prime: 0.0,
            b: 0.0,
            b_prime: 0.0,
        };
        assert!((chsh_value(&zero, cos_law) - 2.0).abs() <= 1e-15);
        let law = ApparatusLaw::new(Placement::default(), BsConvention::default()).unwrap();
        let s = try_chsh_value(&ChshSetting::default(), |d| law.degree(d)).unwrap();
        assert!((s - TSIRELSON_BOUND).abs() <= 1e-12);
    }

    #[test]
    fn no_signaling_examples() {
        let r = no_signaling_scan(&[(0.0, 0.0)]).unwrap();
        assert!((r.points[0].p_1a - 0.5).abs() <= 1e-12);
        let only_a: Vec<(f64, f64)> = (0..10).map(|k| (k as f64 * 0.6, 0.4)).collect();
        let r = no_signaling_scan(&only_a).unwrap();
        let b0 = r.points[0].p_1b;
        assert!(r.points.iter().all(|p| (p.p_1b - b0).abs() <= 1e-12));
        assert!(no_signaling_scan(&[]).is_err());
    }

    #[test]
    fn cosine_amplitude_of_pure_cosine() {
        let grid: Vec<f64> = (0..25).map(|k| 2.0 * PI * k as f64 / 24.0).collect();
        let s = correlation_sweep(&grid, 0.0).unwrap();
        assert!((cosine_amplitude(&s).unwrap() - 1.0).abs() <= 1e-12);
        let shifted = correlation_sweep(&grid, 0.9).unwrap();
        assert!((cosine_amplitude(&shifted).unwrap() - 1.0).abs() <= 1e-12);
        assert!(cosine_amplitude(&correlation_sweep(&[0.0], 0.0).unwrap()).is_err());
    }
}
