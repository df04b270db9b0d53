//! Dense complex linear algebra over small tensor-product state spaces.
//!
//! Every state lives on a [`Layout`]: an ordered list of labeled subsystems
//! with their dimensions. Joint basis indices are row-major with the last
//! subsystem varying fastest, so for two subsystems `(a, b) ↦ a·dim_B + b`.
//! Path-mode subsystems use index 0 for path "1" and index 1 for path "2".

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Tolerance for algebraic identities (normalization, unitarity, hermiticity, trace).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Tolerance for eigenvalue positivity of density matrices.
pub const EIGEN_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn check_finite<'a>(values: impl IntoIterator<Item = &'a Complex>) -> Result<()> {
    if values
        .into_iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
    {
        Ok(())
    } else {
        Err(Error::Input("non-finite complex entry".into()))
    }
}

/// Ordered, labeled subsystem structure of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    labels: Vec<String>,
    dims: Vec<usize>,
}

impl Layout {
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        dims: &[usize],
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() != dims.len() {
            return Err(Error::Shape(format!(
                "{} labels for {} dimensions",
                labels.len(),
                dims.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::Shape(format!("subsystem dimension {d}")));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Label(format!("duplicate subsystem label {l:?}")));
            }
        }
        Ok(Layout {
            labels,
            dims: dims.to_vec(),
        })
    }

    /// A layout holding one subsystem.
    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Layout::new([label.into()], &[dim])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Label(format!("unknown subsystem label {label:?}")))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.position(label)?])
    }

    /// Splits a joint basis index into per-subsystem digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Inverse of [`Layout::digits`].
    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }

    fn concat(&self, other: &Layout) -> Result<Layout> {
        let labels = self.labels.iter().chain(&other.labels).cloned();
        let dims: Vec<usize> = self.dims.iter().chain(&other.dims).copied().collect();
        Layout::new(labels, &dims)
    }
}

/// A normalized pure state over a [`Layout`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: Layout,
    amplitudes: DVector<Complex>,
}

impl StateVector {
    /// Builds a state from amplitudes that must already be unit norm.
    pub fn new(layout: Layout, amplitudes: Vec<Complex>) -> Result<Self> {
        let v = Self::unchecked(layout, amplitudes)?;
        let n = v.norm_sqr();
        if (n - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::Normalization(n));
        }
        Ok(v)
    }

    /// Builds a state, rescaling the amplitudes to unit norm.
    pub fn normalized(layout: Layout, amplitudes: Vec<Complex>) -> Result<Self> {
        let mut v = Self::unchecked(layout, amplitudes)?;
        let n = v.norm_sqr();
        if n == 0.0 {
            return Err(Error::Normalization(0.0));
        }
        v.amplitudes /= Complex::from(n.sqrt());
        Ok(v)
    }

    fn unchecked(layout: Layout, amplitudes: Vec<Complex>) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::Shape(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        check_finite(&amplitudes)?;
        Ok(StateVector {
            layout,
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    /// Computational basis state `index` of a single subsystem.
    pub fn basis(label: impl Into<String>, dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Shape(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![Complex::from(0.0); dim];
        amps[index] = Complex::from(1.0);
        Self::new(Layout::single(label, dim)?, amps)
    }

    /// Two-path state `alpha|1⟩ + beta|2⟩` of a single subsystem.
    pub fn two_path(label: impl Into<String>, alpha: Complex, beta: Complex) -> Result<Self> {
        Self::new(Layout::single(label, 2)?, vec![alpha, beta])
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        self.amplitudes.as_slice()
    }

    pub fn amplitude(&self, digits: &[usize]) -> Complex {
        self.amplitudes[self.layout.index(digits)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`; layouts must have equal dimension.
    pub fn inner(&self, other: &StateVector) -> Result<Complex> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(
                "inner product of states of different dimension".into(),
            ));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// Tensor product `v ⊗ w`; the label sets must be disjoint.
pub fn tensor(v: &StateVector, w: &StateVector) -> Result<StateVector> {
    let layout = v.layout.concat(&w.layout)?;
    let amps = v.amplitudes.kronecker(&w.amplitudes);
    Ok(StateVector {
        layout,
        amplitudes: amps,
    })
}

/// A unitary matrix, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: DMatrix<Complex>,
}

impl UnitaryOperator {
    pub fn new(matrix: DMatrix<Complex>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "{}x{} operator is not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_finite(matrix.iter())?;
        let u = UnitaryOperator { matrix };
        let defect = u.unitarity_defect();
        if defect > ALGEBRA_TOL {
            return Err(Error::Model(format!(
                "operator is not unitary (max |U†U - I| = {defect:e})"
            )));
        }
        Ok(u)
    }

    /// Builds from row-major entries.
    pub fn from_rows(dim: usize, entries: &[Complex]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "{} entries for a {dim}x{dim} operator",
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        UnitaryOperator {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.matrix[(row, col)]
    }

    /// Largest entry of `|U†U − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        (prod - DMatrix::<Complex>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// The operator that applies `self` first and then `next`.
    pub fn then(&self, next: &UnitaryOperator) -> Result<UnitaryOperator> {
        if self.dim() != next.dim() {
            return Err(Error::Shape(
                "composing operators of different dimension".into(),
            ));
        }
        Ok(UnitaryOperator {
            matrix: &next.matrix * &self.matrix,
        })
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        UnitaryOperator {
            matrix: self.matrix.adjoint(),
        }
    }
}

/// Applies `u` to the listed subsystems of `v` and the identity elsewhere.
///
/// The order of `targets` fixes how `u`'s basis factorizes: the last target
/// varies fastest, as for joint indices.
pub fn apply_unitary(
    u: &UnitaryOperator,
    v: &StateVector,
    targets: &[&str],
) -> Result<StateVector> {
    let layout = &v.layout;
    let mut positions = Vec::with_capacity(targets.len());
    for t in targets {
        let p = layout.position(t)?;
        if positions.contains(&p) {
            return Err(Error::Label(format!("subsystem {t:?} targeted twice")));
        }
        positions.push(p);
    }
    let target_dims: Vec<usize> = positions.iter().map(|&p| layout.dims[p]).collect();
    let block: usize = target_dims.iter().product();
    if targets.is_empty() || block != u.dim() {
        return Err(Error::Shape(format!(
            "operator of dimension {} applied to targets of total dimension {block}",
            u.dim()
        )));
    }

    let mut out = DVector::from_element(v.dim(), Complex::from(0.0));
    for (idx, amp) in v.amplitudes.iter().enumerate() {
        if *amp == Complex::from(0.0) {
            continue;
        }
        let mut digits = layout.digits(idx);
        let col = positions
            .iter()
            .zip(&target_dims)
            .fold(0, |acc, (&p, &d)| acc * d + digits[p]);
        for row in 0..block {
            let coeff = u.matrix[(row, col)];
            if coeff == Complex::from(0.0) {
                continue;
            }
            let mut rem = row;
            for (&p, &d) in positions.iter().zip(&target_dims).rev() {
                digits[p] = rem % d;
                rem /= d;
            }
            out[layout.index(&digits)] += coeff * amp;
        }
    }
    Ok(StateVector {
        layout: layout.clone(),
        amplitudes: out,
    })
}

/// A Hermitian, positive, trace-one matrix over a [`Layout`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: Layout,
    matrix: DMatrix<Complex>,
}

impl DensityMatrix {
    pub fn new(layout: Layout, matrix: DMatrix<Complex>) -> Result<Self> {
        let n = layout.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Shape(format!(
                "{}x{} matrix for a space of dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_finite(matrix.iter())?;
        let herm = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (matrix[(i, j)] - matrix[(j, i)].conj()).norm())
            .fold(0.0, f64::max);
        if herm > ALGEBRA_TOL {
            return Err(Error::Model(format!(
                "density matrix is not Hermitian (defect {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > ALGEBRA_TOL || tr.im.abs() > ALGEBRA_TOL {
            return Err(Error::Normalization(tr.re));
        }
        let rho = DensityMatrix { layout, matrix };
        if let Some(&min) = rho.eigenvalues().first() {
            if min < -EIGEN_TOL {
                return Err(Error::Model(format!(
                    "density matrix has negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(rho)
    }

    /// The projector `|v⟩⟨v|`.
    pub fn from_pure(v: &StateVector) -> Self {
        DensityMatrix {
            layout: v.layout.clone(),
            matrix: &v.amplitudes * v.amplitudes.adjoint(),
        }
    }

    /// A diagonal (incoherent) single-subsystem state.
    pub fn diagonal(label: impl Into<String>, probabilities: &[f64]) -> Result<Self> {
        let layout = Layout::single(label, probabilities.len())?;
        let diag = DVector::from_iterator(
            probabilities.len(),
            probabilities.iter().map(|&p| Complex::from(p)),
        );
        Self::new(layout, DMatrix::from_diagonal(&diag))
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.matrix[(row, col)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Anything that can be viewed as a density matrix for partial tracing.
pub trait AsDensity {
    fn to_density(&self) -> DensityMatrix;
}

impl AsDensity for DensityMatrix {
    fn to_density(&self) -> DensityMatrix {
        self.clone()
    }
}

impl AsDensity for StateVector {
    fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Reduced state of subsystem `keep`, tracing out everything else.
pub fn partial_trace(state: &impl AsDensity, keep: &str) -> Result<DensityMatrix> {
    let rho = state.to_density();
    let layout = &rho.layout;
    let k = layout.position(keep)?;
    let dk = layout.dims[k];
    let n = rho.dim();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| layout.digits(i)).collect();

    let mut out = DMatrix::from_element(dk, dk, Complex::from(0.0));
    for i in 0..n {
        for j in 0..n {
            let same_env = digits[i]
                .iter()
                .zip(&digits[j])
                .enumerate()
                .all(|(p, (a, b))| p == k || a == b);
            if same_env {
                out[(digits[i][k], digits[j][k])] += rho.matrix[(i, j)];
            }
        }
    }
    DensityMatrix::new(Layout::single(keep, dk)?, out)
}

/// `Tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr(ρ²) = Σ_ij |ρ_ij|² for Hermitian ρ
    rho.matrix.iter().map(|z| z.norm_sqr()).sum()
}

/// Sum of off-diagonal magnitudes, `Σ_{i≠j} |ρ_ij|`.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| rho.matrix[(i, j)].norm())
        .sum()
}

/// Born-rule outcome probabilities over the joint basis.
pub fn born_probabilities(v: &StateVector) -> Result<Vec<f64>> {
    let n = v.norm_sqr();
    if (n - 1.0).abs() > ALGEBRA_TOL {
        return Err(Error::Normalization(n));
    }
    Ok(v.amplitudes.iter().map(|z| z.norm_sqr()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn assert_close(a: Complex, b: Complex) {
        assert!((a - b).norm() <= ALGEBRA_TOL, "{a} != {b}");
    }

    fn plus(label: &str) -> StateVector {
        StateVector::two_path(label, c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)).unwrap()
    }

    fn bell() -> StateVector {
        let h = FRAC_1_SQRT_2;
        StateVector::new(
            Layout::new(["A", "B"], &[2, 2]).unwrap(),
            vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let v = tensor(
            &StateVector::basis("A", 2, 0).unwrap(),
            &StateVector::basis("B", 2, 0).unwrap(),
        )
        .unwrap();
        assert_eq!(v.layout().dims(), &[2, 2]);
        let expected = [1.0, 0.0, 0.0, 0.0];
        for (a, e) in v.amplitudes().iter().zip(expected) {
            assert_eq!(*a, c(e, 0.0));
        }
    }

    #[test]
    fn tensor_distributes_over_superposition() {
        let v = tensor(&plus("A"), &StateVector::basis("B", 2, 0).unwrap()).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = [h, 0.0, h, 0.0];
        for (a, e) in v.amplitudes().iter().zip(expected) {
            assert_close(*a, c(e, 0.0));
        }
        assert!((v.norm_sqr() - 1.0).abs() <= ALGEBRA_TOL);
    }

    #[test]
    fn tensor_rejects_duplicate_labels() {
        let err = tensor(&plus("A"), &plus("A")).unwrap_err();
        assert!(matches!(err, Error::Label(_)));
    }

    #[test]
    fn constructors_validate() {
        let l = Layout::single("A", 2).unwrap();
        assert!(matches!(
            StateVector::new(l.clone(), vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::Normalization(_))
        ));
        assert!(matches!(
            StateVector::new(l.clone(), vec![c(1.0, 0.0)]),
            Err(Error::Shape(_))
        ));
        assert!(StateVector::new(l.clone(), vec![c(f64::NAN, 0.0), c(0.0, 0.0)]).is_err());
        let v = StateVector::normalized(l, vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((v.amplitudes()[0].re - 0.6).abs() < 1e-15);
        assert!(Layout::new(["A", "A"], &[2, 2]).is_err());
    }

    #[test]
    fn identity_leaves_state_exactly() {
        let v = bell();
        let out = apply_unitary(&UnitaryOperator::identity(2), &v, &["B"]).unwrap();
        assert_eq!(out, v);
    }

    #[test]
    fn apply_on_second_subsystem_and_pair() {
        // σx on B of |1⟩_A|1⟩_B gives |1⟩_A|2⟩_B
        let x =
            UnitaryOperator::from_rows(2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
                .unwrap();
        let v = tensor(
            &StateVector::basis("A", 2, 0).unwrap(),
            &StateVector::basis("B", 2, 0).unwrap(),
        )
        .unwrap();
        let out = apply_unitary(&x, &v, &["B"]).unwrap();
        assert_eq!(out.amplitude(&[0, 1]), c(1.0, 0.0));

        // SWAP acting with targets in reversed order is still SWAP
        let o = c(0.0, 0.0);
        let i = c(1.0, 0.0);
        let swap = UnitaryOperator::from_rows(4, &[i, o, o, o, o, o, i, o, o, i, o, o, o, o, o, i])
            .unwrap();
        let out2 = apply_unitary(&swap, &out, &["B", "A"]).unwrap();
        assert_eq!(out2.amplitude(&[1, 0]), i);
    }

    #[test]
    fn apply_rejects_mismatch() {
        let v = bell();
        assert!(matches!(
            apply_unitary(&UnitaryOperator::identity(4), &v, &["A"]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            apply_unitary(&UnitaryOperator::identity(2), &v, &["C"]),
            Err(Error::Label(_))
        ));
        assert!(matches!(
            apply_unitary(&UnitaryOperator::identity(4), &v, &["A", "A"]),
            Err(Error::Label(_))
        ));
    }

    #[test]
    fn non_unitary_rejected() {
        let m =
            UnitaryOperator::from_rows(2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(m, Err(Error::Model(_))));
    }

    #[test]
    fn reduced_state_of_entangled_pair_is_maximally_mixed() {
        for keep in ["A", "B"] {
            let rho = partial_trace(&bell(), keep).unwrap();
            assert_close(rho.entry(0, 0), c(0.5, 0.0));
            assert_close(rho.entry(1, 1), c(0.5, 0.0));
            assert_eq!(rho.entry(0, 1), c(0.0, 0.0));
            assert_eq!(rho.entry(1, 0), c(0.0, 0.0));
            assert!((purity(&rho) - 0.5).abs() < 1e-12);
            assert_eq!(l1_coherence(&rho), 0.0);
        }
        assert!((purity(&DensityMatrix::from_pure(&bell())) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_of_product_state_is_factor_projector() {
        let a = StateVector::two_path("A", c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let b = plus("B");
        let rho = partial_trace(&tensor(&a, &b).unwrap(), "A").unwrap();
        let want = DensityMatrix::from_pure(&a);
        for i in 0..2 {
            for j in 0..2 {
                assert_close(rho.entry(i, j), want.entry(i, j));
            }
        }
        assert!(partial_trace(&bell(), "Z").is_err());
    }

    #[test]
    fn purity_and_coherence_examples() {
        let proj = DensityMatrix::from_pure(&plus("A"));
        assert!((purity(&proj) - 1.0).abs() < 1e-12);
        assert!((l1_coherence(&proj) - 1.0).abs() < 1e-12);
        let half = DensityMatrix::diagonal("A", &[0.5, 0.5]).unwrap();
        assert!((purity(&half) - 0.5).abs() < 1e-15);
        assert_eq!(l1_coherence(&half), 0.0);
        let skew = DensityMatrix::diagonal("A", &[0.75, 0.25]).unwrap();
        assert!((purity(&skew) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::diagonal("A", &[1.5, -0.5]).is_err());
        assert!(matches!(
            DensityMatrix::diagonal("A", &[0.5, 0.6]),
            Err(Error::Normalization(_))
        ));
        let l = Layout::single("A", 2).unwrap();
        let m =
            DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(l, m).is_err());
    }

    #[test]
    fn born_rule() {
        let p = born_probabilities(&StateVector::basis("A", 2, 1).unwrap()).unwrap();
        assert_eq!(p, vec![0.0, 1.0]);
        let p = born_probabilities(&plus("A")).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn digits_round_trip() {
        let l = Layout::new(["A", "B", "C"], &[2, 3, 2]).unwrap();
        for i in 0..l.total_dim() {
            assert_eq!(l.index(&l.digits(i)), i);
        }
        assert_eq!(l.digits(7), vec![1, 0, 1]);
    }
}
