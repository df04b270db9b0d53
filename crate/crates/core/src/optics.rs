//! Apparatus construction: beam splitters, phase shifters, the single-photon
//! Mach–Zehnder interferometer and the two-station, two-photon interferometer.
//!
//! Phases are carried as raw radians everywhere; [`wrap_phase`] is only used
//! when a value is reported.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    apply_unitary, born_probabilities, c, Complex, Layout, StateVector, UnitaryOperator,
};

pub const LABEL_A: &str = "A";
pub const LABEL_B: &str = "B";

/// Reduces a phase to `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Input(format!("{name} must be finite, got {x}")))
    }
}

/// One of the two path modes of an interferometer arm (or output port).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Path {
    One,
    Two,
}

impl Path {
    pub fn index(self) -> usize {
        match self {
            Path::One => 0,
            Path::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    // Sign with which a shifter on this path enters the relative phase of
    // the |2⟩|2⟩ branch against the |1⟩|1⟩ branch.
    fn branch_sign(self) -> f64 {
        match self {
            Path::One => -1.0,
            Path::Two => 1.0,
        }
    }
}

/// Phase convention of a lossless 50/50 beam splitter.
///
/// The matrix is `(1/√2)·[[e^{it}, e^{ir}], [e^{ir}, e^{i(2r−t+π)}]]` with
/// `t` the transmission phase and `r` the reflection phase. The transmission
/// phase of the second input is fixed by unitarity, so every `(t, r)` pair is
/// legal. The default `t = 0, r = π/2` is the symmetric `(1/√2)·[[1, i], [i, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsConvention {
    pub transmission_phase: f64,
    pub reflection_phase: f64,
}

impl Default for BsConvention {
    fn default() -> Self {
        BsConvention {
            transmission_phase: 0.0,
            reflection_phase: FRAC_PI_2,
        }
    }
}

impl BsConvention {
    pub fn new(transmission_phase: f64, reflection_phase: f64) -> Result<Self> {
        finite("transmission phase", transmission_phase)?;
        finite("reflection phase", reflection_phase)?;
        Ok(BsConvention {
            transmission_phase,
            reflection_phase,
        })
    }
}

pub fn beam_splitter_unitary(conv: &BsConvention) -> Result<UnitaryOperator> {
    let t = conv.transmission_phase;
    let r = conv.reflection_phase;
    let e = |phi: f64| Complex::from_polar(FRAC_1_SQRT_2, phi);
    UnitaryOperator::from_rows(2, &[e(t), e(r), e(r), e(2.0 * r - t + PI)])
}

/// Diagonal shifter multiplying the amplitude on `path` by `e^{iφ}`.
pub fn phase_shifter_unitary(phi: f64, path: Path) -> Result<UnitaryOperator> {
    finite("phase", phi)?;
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let shifted = Complex::from_polar(1.0, phi);
    let entries = match path {
        Path::One => [shifted, zero, zero, one],
        Path::Two => [one, zero, zero, shifted],
    };
    UnitaryOperator::from_rows(2, &entries)
}

// ---------------------------------------------------------------------------
// Single-photon Mach–Zehnder

/// Shifter settings of the Mach–Zehnder arms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MziConfig {
    pub phi1: f64,
    pub phi2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MziOutcome {
    pub p_1d: f64,
    pub p_2d: f64,
}

const MZI_LABEL: &str = "photon";

/// Raw output state of BS → shifters → BS for a photon entering on path 1.
pub fn mzi_output_state(conv: &BsConvention, cfg: &MziConfig) -> Result<StateVector> {
    let bs = beam_splitter_unitary(conv)?;
    let chain = bs
        .then(&phase_shifter_unitary(cfg.phi1, Path::One)?)?
        .then(&phase_shifter_unitary(cfg.phi2, Path::Two)?)?
        .then(&bs)?;
    apply_unitary(&chain, &StateVector::basis(MZI_LABEL, 2, 0)?, &[MZI_LABEL])
}

/// Output index that receives the photon at zero phase difference; this port
/// is named 1D.
fn constructive_port(conv: &BsConvention) -> Result<usize> {
    let p = born_probabilities(&mzi_output_state(conv, &MziConfig::default())?)?;
    Ok(if p[0] >= p[1] { 0 } else { 1 })
}

/// Detector probabilities of the default-convention Mach–Zehnder.
pub fn mzi_probabilities(cfg: &MziConfig) -> Result<MziOutcome> {
    finite("phi1", cfg.phi1)?;
    finite("phi2", cfg.phi2)?;
    let conv = BsConvention::default();
    let port_1d = constructive_port(&conv)?;
    let p = born_probabilities(&mzi_output_state(&conv, cfg)?)?;
    Ok(MziOutcome {
        p_1d: p[port_1d],
        p_2d: p[1 - port_1d],
    })
}

// ---------------------------------------------------------------------------
// Two-photon, two-station interferometer

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Station {
    A,
    B,
}

impl Station {
    pub fn label(self) -> &'static str {
        match self {
            Station::A => LABEL_A,
            Station::B => LABEL_B,
        }
    }
}

/// One of the four detectors 1A, 2A, 1B, 2B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PortLabel {
    pub station: Station,
    pub port: Path,
}

impl PortLabel {
    pub const ALL: [PortLabel; 4] = [
        PortLabel {
            station: Station::A,
            port: Path::One,
        },
        PortLabel {
            station: Station::A,
            port: Path::Two,
        },
        PortLabel {
            station: Station::B,
            port: Path::One,
        },
        PortLabel {
            station: Station::B,
            port: Path::Two,
        },
    ];
}

impl std::fmt::Display for PortLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.port.number(), self.station.label())
    }
}

/// Which arm carries each station's phase shifter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub a: Path,
    pub b: Path,
}

impl Default for Placement {
    fn default() -> Self {
        Placement {
            a: Path::One,
            b: Path::Two,
        }
    }
}

impl Placement {
    pub const ALL: [Placement; 4] = [
        Placement {
            a: Path::One,
            b: Path::One,
        },
        Placement {
            a: Path::One,
            b: Path::Two,
        },
        Placement {
            a: Path::Two,
            b: Path::One,
        },
        Placement {
            a: Path::Two,
            b: Path::Two,
        },
    ];

    /// Relative phase of the `|2⟩|2⟩` branch against `|1⟩|1⟩` produced by
    /// the shifters: `±φ_A ± φ_B`. For the default placement this is `φ_B − φ_A`.
    pub fn nonlocal_phase(&self, phi_a: f64, phi_b: f64) -> f64 {
        self.a.branch_sign() * phi_a + self.b.branch_sign() * phi_b
    }

    /// Short name such as `a1b2`.
    pub fn name(&self) -> String {
        format!("a{}b{}", self.a.number(), self.b.number())
    }

    pub fn parse(s: &str) -> Result<Self> {
        Placement::ALL
            .into_iter()
            .find(|p| p.name() == s.to_ascii_lowercase())
            .ok_or_else(|| {
                Error::Input(format!(
                    "unknown placement {s:?} (expected a1b1, a1b2, a2b1 or a2b2)"
                ))
            })
    }
}

/// Settings of the two-station interferometer.
///
/// `phi_a` and `phi_b` are the physical shifter settings. `w` is the fixed
/// apparatus offset, so that the detector statistics follow
/// `cos(nonlocal_phase + w)`; [`RtoConfig::reported_delta`] is the phase
/// difference measured from the calibrated origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtoConfig {
    pub phi_a: f64,
    pub phi_b: f64,
    pub w: f64,
    pub placement: Placement,
    pub convention: BsConvention,
}

impl RtoConfig {
    /// Physical shifter settings with the default placement and convention;
    /// `w` is calibrated.
    pub fn new(phi_a: f64, phi_b: f64) -> Result<Self> {
        Self::with_apparatus(phi_a, phi_b, Placement::default(), BsConvention::default())
    }

    pub fn with_apparatus(
        phi_a: f64,
        phi_b: f64,
        placement: Placement,
        convention: BsConvention,
    ) -> Result<Self> {
        finite("phi_a", phi_a)?;
        finite("phi_b", phi_b)?;
        let w = calibrate_offset(&convention, placement)?;
        Ok(RtoConfig {
            phi_a,
            phi_b,
            w,
            placement,
            convention,
        })
    }

    /// Shifter settings realizing the calibrated phase difference `delta`:
    /// station A's shifter at zero, B's shifter absorbing the offset.
    pub fn calibrated(delta: f64, placement: Placement, convention: BsConvention) -> Result<Self> {
        finite("delta", delta)?;
        let w = calibrate_offset(&convention, placement)?;
        let phi_b = placement.b.branch_sign() * (delta - w);
        Ok(RtoConfig {
            phi_a: 0.0,
            phi_b,
            w,
            placement,
            convention,
        })
    }

    pub fn nonlocal_phase(&self) -> f64 {
        self.placement.nonlocal_phase(self.phi_a, self.phi_b)
    }

    pub fn reported_delta(&self) -> f64 {
        self.nonlocal_phase() + self.w
    }

    fn validate(&self) -> Result<()> {
        finite("phi_a", self.phi_a)?;
        finite("phi_b", self.phi_b)?;
        finite("w", self.w)?;
        finite("transmission phase", self.convention.transmission_phase)?;
        finite("reflection phase", self.convention.reflection_phase)
    }
}

/// The pair source's output `(|1⟩_A|1⟩_B + |2⟩_A|2⟩_B)/√2`.
pub fn source_state() -> StateVector {
    let h = c(FRAC_1_SQRT_2, 0.0);
    let z = c(0.0, 0.0);
    StateVector::new(
        Layout::new([LABEL_A, LABEL_B], &[2, 2]).expect("static layout"),
        vec![h, z, z, h],
    )
    .expect("normalized source state")
}

/// Applies both stations (shifter, then beam splitter) to any A⊗B state of
/// two path modes.
pub fn run_stations(
    state: &StateVector,
    phi_a: f64,
    phi_b: f64,
    placement: Placement,
    conv: &BsConvention,
) -> Result<StateVector> {
    for label in [LABEL_A, LABEL_B] {
        if state.layout().dim_of(label)? != 2 {
            return Err(Error::Shape(format!(
                "station {label} must be a two-path subsystem"
            )));
        }
    }
    let bs = beam_splitter_unitary(conv)?;
    let station_a = phase_shifter_unitary(phi_a, placement.a)?.then(&bs)?;
    let station_b = phase_shifter_unitary(phi_b, placement.b)?.then(&bs)?;
    let v = apply_unitary(&station_a, state, &[LABEL_A])?;
    apply_unitary(&station_b, &v, &[LABEL_B])
}

/// Output state of the two-photon interferometer, ordered (1A1B, 1A2B, 2A1B, 2A2B).
pub fn build_rto_state(cfg: &RtoConfig) -> Result<StateVector> {
    cfg.validate()?;
    run_stations(
        &source_state(),
        cfg.phi_a,
        cfg.phi_b,
        cfg.placement,
        &cfg.convention,
    )
}

fn raw_degree(phi_a: f64, phi_b: f64, placement: Placement, conv: &BsConvention) -> Result<f64> {
    let v = run_stations(&source_state(), phi_a, phi_b, placement, conv)?;
    let p = born_probabilities(&v)?;
    Ok(p[0] + p[3] - p[1] - p[2])
}

/// The apparatus offset `w` in `[0, 2π)`.
///
/// Measures the degree of correlation of the simulated apparatus at nonlocal
/// phase 0 (giving `cos w`) and π/2 (giving `−sin w`).
pub fn calibrate_offset(conv: &BsConvention, placement: Placement) -> Result<f64> {
    let at_zero = raw_degree(0.0, 0.0, placement, conv)?;
    let at_quarter = raw_degree(0.0, placement.b.branch_sign() * FRAC_PI_2, placement, conv)?;
    Ok(wrap_phase((-at_quarter).atan2(at_zero)))
}
