//! Simulation of single-photon and entangled two-photon interferometry.
//!
//! * [`hilbert`]: small dense state vectors, unitaries, density matrices, partial trace.
//! * [`optics`]: beam splitters, phase shifters, the Mach–Zehnder and the two-station interferometer.
//! * [`entangle`]: detector coupling, which-path fringe loss, coherence bookkeeping.
//! * [`correlate`]: joint statistics, correlation sweeps, CHSH, no-signaling.
//! * [`sampler`]: seeded Monte Carlo coincidence counts and estimators.

pub mod correlate;
pub mod entangle;
pub mod error;
pub mod hilbert;
pub mod optics;
pub mod sampler;

pub use correlate::{
    chsh_value, correlation_degree, correlation_sweep, joint_probs_analytic,
    joint_probs_from_state, no_signaling_scan, table1_report, ApparatusLaw, ChshSetting,
    CorrelationReport, JointDistribution, Table1Flag, Table1Row,
};
pub use entangle::{
    coherence_ledger, fringe_scan, premeasure, reduced_visibility, CoherenceLedger, DetectorModel,
};
pub use error::{Error, Result};
pub use hilbert::{
    apply_unitary, born_probabilities, l1_coherence, partial_trace, purity, tensor, Complex,
    DensityMatrix, Layout, StateVector, UnitaryOperator,
};
pub use optics::{
    beam_splitter_unitary, build_rto_state, calibrate_offset, mzi_probabilities,
    phase_shifter_unitary, BsConvention, MziConfig, Path, Placement, PortLabel, RtoConfig,
};
pub use sampler::{estimate_correlation, sample_outcomes, EstimateWithError, RngSeed, TrialCounts};
