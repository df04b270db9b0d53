//! System–detector premeasurement, which-path decoherence and the
//! bookkeeping of where coherence ends up.
//!
//! A detector is described by the overlap `c = ⟨d₁|d₂⟩` of the two pointer
//! states it reaches for system states `|1⟩` and `|2⟩`. `c = 0` is an ideal
//! which-path detector, `|c| = 1` learns nothing.

use serde::{Deserialize, Serialize};

use crate::correlate::{cosine_amplitude, CorrelationReport};
use crate::error::{Error, Result};
use crate::hilbert::{
    apply_unitary, born_probabilities, c, l1_coherence, partial_trace, purity, tensor, Complex,
    DensityMatrix, StateVector, UnitaryOperator, ALGEBRA_TOL,
};
use crate::optics::{beam_splitter_unitary, phase_shifter_unitary, BsConvention, Path};

/// Label given to the detector subsystem by [`premeasure`].
pub const DETECTOR_LABEL: &str = "D";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    overlap: Complex,
}

impl DetectorModel {
    pub fn new(overlap: Complex) -> Result<Self> {
        if !(overlap.re.is_finite() && overlap.im.is_finite()) {
            return Err(Error::Model("pointer overlap must be finite".into()));
        }
        if overlap.norm() > 1.0 + ALGEBRA_TOL {
            return Err(Error::Model(format!(
                "pointer overlap |c| = {} exceeds 1",
                overlap.norm()
            )));
        }
        Ok(DetectorModel { overlap })
    }

    pub fn real(overlap: f64) -> Result<Self> {
        Self::new(c(overlap, 0.0))
    }

    /// Perfectly distinguishing pointer states.
    pub fn ideal() -> Self {
        DetectorModel {
            overlap: c(0.0, 0.0),
        }
    }

    /// Identical pointer states: no measurement at all.
    pub fn absent() -> Self {
        DetectorModel {
            overlap: c(1.0, 0.0),
        }
    }

    pub fn overlap(&self) -> Complex {
        self.overlap
    }

    // sqrt(1 - |c|²), clamped against |c| marginally above 1
    fn complement(&self) -> f64 {
        (1.0 - self.overlap.norm_sqr()).max(0.0).sqrt()
    }

    /// Controlled coupling `|1⟩⟨1| ⊗ I + |2⟩⟨2| ⊗ V` with `V|d₁⟩ = |d₂⟩`.
    fn coupling(&self) -> Result<UnitaryOperator> {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let s = c(self.complement(), 0.0);
        let k = self.overlap;
        #[rustfmt::skip]
        let entries = [
            one, z, z, z,
            z, one, z, z,
            z, z, k, -s,
            z, z, s, k.conj(),
        ];
        UnitaryOperator::from_rows(4, &entries)
    }
}

/// Couples a two-path system to a detector initially in `|d₁⟩`, giving
/// `α|1⟩|d₁⟩ + β|2⟩|d₂⟩` with `|d₁⟩ = (1, 0)` and `|d₂⟩ = (c, √(1−|c|²))`.
pub fn premeasure(system: &StateVector, det: &DetectorModel) -> Result<StateVector> {
    premeasure_into(system, det, DETECTOR_LABEL)
}

/// [`premeasure`] with a caller-chosen label for the detector subsystem.
pub fn premeasure_into(
    system: &StateVector,
    det: &DetectorModel,
    detector_label: &str,
) -> Result<StateVector> {
    let layout = system.layout();
    if layout.len() != 1 || layout.total_dim() != 2 {
        return Err(Error::Shape(
            "premeasurement needs a single two-path system".into(),
        ));
    }
    let ready = StateVector::basis(detector_label, 2, 0)?;
    let joint = tensor(system, &ready)?;
    let sys_label = layout.labels()[0].clone();
    apply_unitary(
        &det.coupling()?,
        &joint,
        &[sys_label.as_str(), detector_label],
    )
}

/// Best attainable fringe contrast of one two-path subsystem on its own:
/// twice the magnitude of its reduced off-diagonal element.
pub fn reduced_visibility(joint: &StateVector, subsystem: &str) -> Result<f64> {
    if joint.layout().dim_of(subsystem)? != 2 {
        return Err(Error::Shape(format!(
            "subsystem {subsystem:?} is not two-dimensional"
        )));
    }
    let rho = partial_trace(joint, subsystem)?;
    Ok((2.0 * rho.entry(0, 1).norm()).min(1.0))
}

/// The state of a photon just after the first beam splitter of the default
/// Mach–Zehnder, `(|1⟩ + i|2⟩)/√2`.
pub fn mzi_arm_state(label: &str) -> Result<StateVector> {
    let bs = beam_splitter_unitary(&BsConvention::default())?;
    apply_unitary(&bs, &StateVector::basis(label, 2, 0)?, &[label])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringePoint {
    pub phase: f64,
    pub p_port1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeScan {
    pub points: Vec<FringePoint>,
}

impl FringeScan {
    /// `(max − min)/(max + min)` over the scanned points.
    pub fn visibility(&self) -> f64 {
        let max = self
            .points
            .iter()
            .map(|p| p.p_port1)
            .fold(f64::NEG_INFINITY, f64::max);
        let min = self
            .points
            .iter()
            .map(|p| p.p_port1)
            .fold(f64::INFINITY, f64::min);
        if max + min <= 0.0 {
            0.0
        } else {
            (max - min) / (max + min)
        }
    }
}

/// Interferes a premeasured system with itself while the detector stays put.
///
/// For each phase: premeasure, shift the system's path 1 by `φ`, recombine
/// at a beam splitter, and report the probability at port 1 (the port that
/// is fully constructive with no detector at `φ = 0`). For the arm state of
/// [`mzi_arm_state`] this is `½(1 + |c|·cos(φ − arg c))`.
pub fn fringe_scan(
    system: &StateVector,
    det: &DetectorModel,
    phase_grid: &[f64],
) -> Result<FringeScan> {
    if phase_grid.is_empty() {
        return Err(Error::Input("empty phase grid".into()));
    }
    let joint = premeasure(system, det)?;
    let label = system.layout().labels()[0].clone();
    let bs = beam_splitter_unitary(&BsConvention::default())?;
    // Port index 1 collects the photon when the arm state recombines unshifted.
    let port1 = 1;
    let points = phase_grid
        .iter()
        .map(|&phase| {
            let chain = phase_shifter_unitary(phase, Path::One)?.then(&bs)?;
            let out = apply_unitary(&chain, &joint, &[label.as_str()])?;
            let p = born_probabilities(&out)?;
            // system is first, detector second: sum over detector index
            Ok(FringePoint {
                phase,
                p_port1: p[2 * port1] + p[2 * port1 + 1],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FringeScan { points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceLedger {
    pub global_purity: f64,
    pub local_purity_a: f64,
    pub local_purity_b: f64,
    pub local_l1_a: f64,
    pub local_l1_b: f64,
    /// Cosine amplitude of the supplied correlation sweep, if any.
    pub correlation_visibility: Option<f64>,
}

/// Where the coherence of a bipartite pure state sits: globally, locally in
/// each subsystem, and in the phase-dependent correlations.
pub fn coherence_ledger(
    joint: &StateVector,
    correlation_law: Option<&[CorrelationReport]>,
) -> Result<CoherenceLedger> {
    let layout = joint.layout();
    if layout.len() != 2 {
        return Err(Error::Shape(format!(
            "coherence ledger needs a bipartite state, got {} subsystems",
            layout.len()
        )));
    }
    let rho_a = partial_trace(joint, &layout.labels()[0])?;
    let rho_b = partial_trace(joint, &layout.labels()[1])?;
    let correlation_visibility = correlation_law.map(cosine_amplitude).transpose()?;
    Ok(CoherenceLedger {
        global_purity: purity(&DensityMatrix::from_pure(joint)),
        local_purity_a: purity(&rho_a),
        local_purity_b: purity(&rho_b),
        local_l1_a: l1_coherence(&rho_a),
        local_l1_b: l1_coherence(&rho_b),
        correlation_visibility,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn equal(label: &str) -> StateVector {
        StateVector::two_path(label, c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)).unwrap()
    }

    fn uniform_grid(n: usize) -> Vec<f64> {
        (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
    }

    #[test]
    fn ideal_premeasurement_gives_entangled_pair() {
        let v = premeasure(&equal("S"), &DetectorModel::ideal()).unwrap();
        let h = FRAC_1_SQRT_2;
        for (a, e) in v.amplitudes().iter().zip([h, 0.0, 0.0, h]) {
            assert!((a - c(e, 0.0)).norm() <= 1e-12);
        }
        assert_eq!(v.layout().labels(), ["S", "D"]);
    }

    #[test]
    fn definite_system_stays_product() {
        let sys = StateVector::basis("S", 2, 0).unwrap();
        for k in [0.0, 0.3, 1.0] {
            let v = premeasure(&sys, &DetectorModel::real(k).unwrap()).unwrap();
            assert!((v.amplitudes()[0] - c(1.0, 0.0)).norm() <= 1e-12);
            assert!(v.amplitudes()[1..].iter().all(|a| a.norm() <= 1e-12));
        }
    }

    #[test]
    fn absent_detector_leaves_superposition() {
        let v = premeasure(&equal("S"), &DetectorModel::absent()).unwrap();
        let h = FRAC_1_SQRT_2;
        for (a, e) in v.amplitudes().iter().zip([h, 0.0, h, 0.0]) {
            assert!((a - c(e, 0.0)).norm() <= 1e-12);
        }
        assert!((reduced_visibility(&v, "S").unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn overlap_bounds() {
        assert!(matches!(DetectorModel::real(1.01), Err(Error::Model(_))));
        assert!(DetectorModel::new(c(0.6, 0.8)).is_ok());
        assert!(DetectorModel::real(f64::NAN).is_err());
    }

    #[test]
    fn partial_visibility() {
        let v = premeasure(&equal("S"), &DetectorModel::real(0.6).unwrap()).unwrap();
        assert!((reduced_visibility(&v, "S").unwrap() - 0.6).abs() <= 1e-12);
        assert!(
            (reduced_visibility(
                &premeasure(&equal("S"), &DetectorModel::ideal()).unwrap(),
                "S"
            )
            .unwrap())
            .abs()
                <= 1e-12
        );
    }

    #[test]
    fn fringes_follow_overlap() {
        let arm = mzi_arm_state("S").unwrap();
        let grid = uniform_grid(16);

        let full = fringe_scan(&arm, &DetectorModel::absent(), &grid).unwrap();
        assert!((full.points[0].p_port1 - 1.0).abs() <= 1e-12);
        assert!((full.visibility() - 1.0).abs() <= 1e-12);

        let flat = fringe_scan(&arm, &DetectorModel::ideal(), &grid).unwrap();
        assert!(flat.points.iter().all(|p| (p.p_port1 - 0.5).abs() <= 1e-12));

        let half = fringe_scan(&arm, &DetectorModel::real(0.5).unwrap(), &grid).unwrap();
        let max = half.points.iter().map(|p| p.p_port1).fold(0.0, f64::max);
        let min = half.points.iter().map(|p| p.p_port1).fold(1.0, f64::min);
        assert!((max - 0.75).abs() <= 1e-12 && (min - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn complex_overlap_shifts_fringe() {
        let k = c(0.0, 0.5);
        let arm = mzi_arm_state("S").unwrap();
        let grid = [0.3, 1.0, 2.2, 4.0];
        let scan = fringe_scan(&arm, &DetectorModel::new(k).unwrap(), &grid).unwrap();
        for p in &scan.points {
            let want = 0.5 * (1.0 + k.norm() * (p.phase - k.arg()).cos());
            assert!((p.p_port1 - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn ledger_of_partial_detector() {
        let v = premeasure(&equal("S"), &DetectorModel::real(0.6).unwrap()).unwrap();
        let l = coherence_ledger(&v, None).unwrap();
        assert!((l.global_purity - 1.0).abs() <= 1e-10);
        assert!((l.local_purity_a - 0.68).abs() <= 1e-12);
        assert!(l.correlation_visibility.is_none());
    }

    #[test]
    fn ledger_rejects_non_bipartite() {
        let err = coherence_ledger(&equal("S"), None).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn premeasure_needs_qubit_system() {
        let v = premeasure(&equal("S"), &DetectorModel::ideal()).unwrap();
        assert!(premeasure(&v, &DetectorModel::ideal()).is_err());
    }
}
