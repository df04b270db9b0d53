use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use biphoton::correlate::{
    chsh_value, correlation_degree, correlation_sweep, cos_law, joint_probs_analytic, ApparatusLaw,
    ChshSetting, JointDistribution, TSIRELSON_BOUND,
};
use biphoton::entangle::{
    fringe_scan, mzi_arm_state, premeasure, reduced_visibility, DetectorModel,
};
use biphoton::hilbert::{
    apply_unitary, born_probabilities, partial_trace, purity, tensor, Complex, DensityMatrix,
    StateVector,
};
use biphoton::optics::{
    beam_splitter_unitary, build_rto_state, mzi_probabilities, phase_shifter_unitary, BsConvention,
    MziConfig, Path, Placement, RtoConfig,
};
use proptest::prelude::*;

fn phase() -> impl Strategy<Value = f64> {
    -20.0..20.0f64
}

fn qubit(label: &'static str) -> impl Strategy<Value = StateVector> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("non-zero", |(a, b, c, d)| {
            a * a + b * b + c * c + d * d > 1e-3
        })
        .prop_map(move |(a, b, c, d)| {
            StateVector::normalized(
                biphoton::Layout::single(label, 2).unwrap(),
                vec![Complex::new(a, b), Complex::new(c, d)],
            )
            .unwrap()
        })
}

fn placement() -> impl Strategy<Value = Placement> {
    (0usize..4).prop_map(|i| Placement::ALL[i])
}

fn convention() -> impl Strategy<Value = BsConvention> {
    (-PI..PI, -PI..PI).prop_map(|(t, r)| BsConvention::new(t, r).unwrap())
}

proptest! {
    #[test]
    fn apparatus_operators_are_unitary(conv in convention(), phi in phase()) {
        prop_assert!(beam_splitter_unitary(&conv).unwrap().unitarity_defect() <= 1e-12);
        prop_assert!(phase_shifter_unitary(phi, Path::One).unwrap().unitarity_defect() <= 1e-12);
        prop_assert!(phase_shifter_unitary(phi, Path::Two).unwrap().unitarity_defect() <= 1e-12);
    }

    #[test]
    fn unitaries_preserve_norm(a in qubit("A"), b in qubit("B"), conv in convention(), phi in phase()) {
        let v = tensor(&a, &b).unwrap();
        prop_assert!((v.norm_sqr() - 1.0).abs() <= 1e-12);
        let u = phase_shifter_unitary(phi, Path::Two).unwrap().then(&beam_splitter_unitary(&conv).unwrap()).unwrap();
        let out = apply_unitary(&u, &v, &["B"]).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() <= 1e-12);
        let p: f64 = born_probabilities(&out).unwrap().iter().sum();
        prop_assert!((p - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn partial_trace_of_product_recovers_factors(a in qubit("A"), b in qubit("B")) {
        let v = tensor(&a, &b).unwrap();
        for (label, factor) in [("A", &a), ("B", &b)] {
            let rho = partial_trace(&v, label).unwrap();
            let want = DensityMatrix::from_pure(factor);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((rho.entry(i, j) - want.entry(i, j)).norm() <= 1e-12);
                }
            }
            prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-12);
            prop_assert!((purity(&rho) - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn global_state_stays_pure(a in qubit("A"), b in qubit("B"), phi_a in phase(), phi_b in phase()) {
        let v = tensor(&a, &b).unwrap();
        let u = phase_shifter_unitary(phi_a, Path::One).unwrap()
            .then(&beam_splitter_unitary(&BsConvention::default()).unwrap()).unwrap();
        let out = apply_unitary(&u, &v, &["A"]).unwrap();
        let out = apply_unitary(&phase_shifter_unitary(phi_b, Path::Two).unwrap(), &out, &["B"]).unwrap();
        prop_assert!((purity(&DensityMatrix::from_pure(&out)) - 1.0).abs() <= 1e-10);
        for label in ["A", "B"] {
            let rho = partial_trace(&out, label).unwrap();
            prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn rto_probabilities_valid(phi_a in phase(), phi_b in phase(), pl in placement(), conv in convention()) {
        let cfg = RtoConfig::with_apparatus(phi_a, phi_b, pl, conv).unwrap();
        let v = build_rto_state(&cfg).unwrap();
        prop_assert!((v.norm_sqr() - 1.0).abs() <= 1e-12);
        let jd = biphoton::joint_probs_from_state(&cfg).unwrap();
        let arr = jd.to_array();
        prop_assert!(arr.iter().all(|p| (-1e-12..=1.0 + 1e-12).contains(p)));
        prop_assert!((arr.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn calibrated_law_is_cosine_for_every_placement_and_convention(
        delta in -TAU..TAU, pl in placement(), conv in convention()
    ) {
        let law = ApparatusLaw::new(pl, conv).unwrap();
        prop_assert!((law.degree(delta).unwrap() - delta.cos()).abs() <= 1e-12);
    }

    #[test]
    fn no_signaling_everywhere(phi_a in phase(), phi_b in phase(), pl in placement(), conv in convention()) {
        let jd = biphoton::joint_probs_from_state(&RtoConfig::with_apparatus(phi_a, phi_b, pl, conv).unwrap()).unwrap();
        prop_assert!((jd.p_1a() - 0.5).abs() <= 1e-12);
        prop_assert!((jd.p_1b() - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn degree_bounded(a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64, d in 0.0..1.0f64) {
        let s = a + b + c + d;
        prop_assume!(s > 1e-6);
        let jd = JointDistribution::new(a / s, b / s, c / s, 1.0 - (a + b + c) / s).unwrap();
        let corr = correlation_degree(&jd);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&corr.degree));
        prop_assert!((corr.p_corr + corr.p_anti - 1.0).abs() <= 1e-12);
        prop_assert!((corr.degree - (corr.p_corr - corr.p_anti)).abs() <= 1e-12);
    }

    #[test]
    fn degree_is_even(delta in phase()) {
        let plus = correlation_degree(&joint_probs_analytic(delta, 0.0).unwrap()).degree;
        let minus = correlation_degree(&joint_probs_analytic(-delta, 0.0).unwrap()).degree;
        prop_assert!((plus - minus).abs() <= 1e-12);
    }

    #[test]
    fn mzi_depends_on_difference_only(phi1 in phase(), phi2 in phase(), shift in phase()) {
        let a = mzi_probabilities(&MziConfig { phi1, phi2 }).unwrap();
        let b = mzi_probabilities(&MziConfig { phi1: phi1 + shift, phi2: phi2 + shift }).unwrap();
        prop_assert!((a.p_1d - b.p_1d).abs() <= 1e-12);
        prop_assert!((a.p_1d - 0.5 * (1.0 + (phi1 - phi2).cos())).abs() <= 1e-12);
        prop_assert!((a.p_1d + a.p_2d - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn tsirelson_bound_holds(a in phase(), ap in phase(), b in phase(), bp in phase()) {
        let s = chsh_value(&ChshSetting { a, a_prime: ap, b, b_prime: bp }, cos_law);
        prop_assert!(s <= TSIRELSON_BOUND + 1e-12);
    }

    #[test]
    fn premeasurement_is_unitary(sys in qubit("S"), re in -0.7..0.7f64, im in -0.7..0.7f64) {
        let det = DetectorModel::new(Complex::new(re, im)).unwrap();
        let v = premeasure(&sys, &det).unwrap();
        prop_assert!((v.norm_sqr() - 1.0).abs() <= 1e-12);
        prop_assert!((purity(&DensityMatrix::from_pure(&v)) - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn visibility_tracks_overlap_exactly() {
    let equal = StateVector::two_path(
        "S",
        Complex::new(FRAC_1_SQRT_2, 0.0),
        Complex::new(FRAC_1_SQRT_2, 0.0),
    )
    .unwrap();
    let arm = mzi_arm_state("S").unwrap();
    let grid: Vec<f64> = (0..24).map(|k| TAU * f64::from(k) / 24.0).collect();
    for k in 0..=10 {
        let overlap = f64::from(k) / 10.0;
        let det = DetectorModel::real(overlap).unwrap();
        let joint = premeasure(&equal, &det).unwrap();
        assert!((reduced_visibility(&joint, "S").unwrap() - overlap).abs() <= 1e-12);
        let scan = fringe_scan(&arm, &det, &grid).unwrap();
        assert!(
            (scan.visibility() - overlap).abs() <= 1e-12,
            "c = {overlap}"
        );
    }
}

#[test]
fn local_purity_rises_with_overlap() {
    let equal = StateVector::two_path(
        "S",
        Complex::new(FRAC_1_SQRT_2, 0.0),
        Complex::new(FRAC_1_SQRT_2, 0.0),
    )
    .unwrap();
    let mut last = 0.0;
    for k in 0..=10 {
        let overlap = f64::from(k) / 10.0;
        let joint = premeasure(&equal, &DetectorModel::real(overlap).unwrap()).unwrap();
        let p = purity(&partial_trace(&joint, "S").unwrap());
        assert!((p - 0.5 * (1.0 + overlap * overlap)).abs() <= 1e-12);
        assert!(p >= last);
        last = p;
    }
}

#[test]
fn ideal_detector_flattens_every_fringe_point() {
    let grid: Vec<f64> = (0..50).map(|k| -PI + 0.13 * f64::from(k)).collect();
    let scan = fringe_scan(&mzi_arm_state("S").unwrap(), &DetectorModel::ideal(), &grid).unwrap();
    assert!(scan.points.iter().all(|p| (p.p_port1 - 0.5).abs() <= 1e-12));
}

#[test]
fn rto_matches_closed_form_on_calibrated_grid() {
    let law = ApparatusLaw::new(Placement::default(), BsConvention::default()).unwrap();
    for k in 0..25 {
        let delta = TAU * f64::from(k) / 24.0;
        let sim = law.joint(delta).unwrap();
        let closed = joint_probs_analytic(delta, 0.0).unwrap();
        for (s, c) in sim.to_array().iter().zip(closed.to_array()) {
            assert!((s - c).abs() <= 1e-12);
        }
    }
    let sweep = correlation_sweep(&[0.0, 1.0], 0.0).unwrap();
    assert_eq!(sweep.len(), 2);
}
