//! Multi-isometry checks on the coefficient matrices of a pure state.
//!
//! A state |ψ⟩ on parties S ∪ S̄ has a coefficient matrix A once the parties
//! are split into column labels S and row labels S̄: the amplitude at
//! (row, col) is ⟨row, col|ψ⟩. The state is a k-isometry when, for every
//! choice of k column parties out of 2k + 1, the Gram matrix A†A is
//! proportional to the identity. The proportionality constant may differ
//! between splits (it is tr(A†A)/dim S), which is what separates this notion
//! from k-unitarity, where all local dimensions agree, the matrix is square,
//! and A†A must equal the identity itself.
//!
//! Up to normalization, a state of 2k + 1 parties is k-uniform exactly when
//! it is a k-isometry, so [`check_k_isometry`] and
//! [`crate::verifier::verify_uniform`] must agree on such states.

use itertools::Itertools;
use nalgebra::DMatrix;
use num::complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::shape::SystemShape;
use crate::state::{Amplitude, PureState};

/// Relative tolerance for isometry deviations.
pub const ISOMETRY_TOLERANCE: f64 = 1e-10;

/// A pure state reshaped into a matrix over a row/column split of its parties.
#[derive(Debug, Clone)]
pub struct CoefficientMatrixView {
    row_parties: Vec<usize>,
    col_parties: Vec<usize>,
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
    matrix: DMatrix<Complex64>,
}

impl CoefficientMatrixView {
    /// Reshapes `state` with `col_parties` as column labels and the
    /// complementary parties as row labels.
    pub fn of_state(state: &PureState, col_parties: &[usize]) -> Result<Self> {
        let shape = state.shape();
        shape.check_proper_subset(col_parties)?;
        let col_parties = col_parties.to_vec();
        let row_parties = shape.complement(&col_parties);
        let row_dims: Vec<usize> = row_parties.iter().map(|&p| shape.dim(p)).collect();
        let col_dims: Vec<usize> = col_parties.iter().map(|&p| shape.dim(p)).collect();
        let rows = row_dims.iter().product();
        let cols = col_dims.iter().product();
        let mut matrix = DMatrix::zeros(rows, cols);
        for (index, amp) in state.terms() {
            let r = shape.flat_index_over(&row_parties, index);
            let c = shape.flat_index_over(&col_parties, index);
            matrix[(r, c)] = amp.value();
        }
        Ok(Self {
            row_parties,
            col_parties,
            row_dims,
            col_dims,
            matrix,
        })
    }

    /// Wraps an explicit matrix whose rows and columns carry the given local
    /// dimension factorizations.
    pub fn from_matrix(
        matrix: DMatrix<Complex64>,
        row_dims: Vec<usize>,
        col_dims: Vec<usize>,
    ) -> Result<Self> {
        let rows: usize = row_dims.iter().product();
        let cols: usize = col_dims.iter().product();
        if let Some(party) = row_dims.iter().chain(&col_dims).position(|&d| d == 0) {
            return Err(Error::ZeroDimension { party });
        }
        if matrix.nrows() != rows || matrix.ncols() != cols {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{} but the dimension lists require {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                rows,
                cols
            )));
        }
        let row_parties = (0..row_dims.len()).collect();
        let col_parties = (row_dims.len()..row_dims.len() + col_dims.len()).collect();
        Ok(Self {
            row_parties,
            col_parties,
            row_dims,
            col_dims,
            matrix,
        })
    }

    /// Column party labels in the original state.
    pub fn col_parties(&self) -> &[usize] {
        &self.col_parties
    }

    /// Row party labels in the original state.
    pub fn row_parties(&self) -> &[usize] {
        &self.row_parties
    }

    /// The reshaped coefficient matrix.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// The Gram matrix A†A over the column space.
    pub fn gram(&self) -> DMatrix<Complex64> {
        self.matrix.adjoint() * &self.matrix
    }
}

/// Outcome of the Gram test for one choice of column parties.
#[derive(Debug, Clone, Serialize)]
pub struct SplitReport {
    /// Column parties of the split, in increasing order.
    pub col_parties: Vec<usize>,
    /// Proportionality constant tr(A†A)/dim S for this split.
    pub constant: f64,
    /// Trace of the Gram matrix, which must not depend on the split.
    pub trace: f64,
    /// Largest entrywise deviation of A†A from `constant` times the identity.
    pub deviation: f64,
    /// Whether the deviation stayed below the relative tolerance.
    pub passed: bool,
}

/// Aggregate result of [`check_k_isometry`] over all k-column splits.
#[derive(Debug, Clone, Serialize)]
pub struct IsometryReport {
    pub k: usize,
    pub tolerance: f64,
    pub is_k_isometry: bool,
    /// Whether all splits reported the same Gram trace.
    pub trace_consistent: bool,
    pub splits: Vec<SplitReport>,
}

/// Aggregate result of [`check_k_unitary`] over all k-column splits.
#[derive(Debug, Clone, Serialize)]
pub struct UnitaryReport {
    pub k: usize,
    pub tolerance: f64,
    pub is_k_unitary: bool,
    pub splits: Vec<SplitReport>,
}

/// Tests whether a (2k+1)-party state is a k-isometry.
///
/// Every k-subset of parties is taken as column labels in turn and the Gram
/// matrix A†A compared against c·I with c = tr(A†A)/dim S. The deviation is
/// measured relative to c, so the check is insensitive to overall scaling and
/// accepts unnormalized states. The Gram trace equals ⟨ψ|ψ⟩ for any split;
/// the report flags a disagreement between splits, which would indicate a
/// reshaping defect rather than a property of the state.
pub fn check_k_isometry(state: &PureState, k: usize, tolerance: f64) -> Result<IsometryReport> {
    if k == 0 {
        return Err(Error::ParameterDomain(
            "isometry order k must be positive".into(),
        ));
    }
    let parties = state.shape().party_count();
    if parties != 2 * k + 1 {
        return Err(Error::NotApplicable(format!(
            "a k-isometry with k = {} lives on {} parties, got {}",
            k,
            2 * k + 1,
            parties
        )));
    }
    let mut splits = Vec::new();
    let mut all_passed = true;
    for cols in (0..parties).combinations(k) {
        let view = CoefficientMatrixView::of_state(state, &cols)?;
        let report = gram_split_report(&view, cols, None, tolerance);
        all_passed &= report.passed;
        splits.push(report);
    }
    let reference = splits[0].trace;
    let trace_consistent = splits
        .iter()
        .all(|s| (s.trace - reference).abs() <= 1e-12 * (1.0 + reference.abs()));
    Ok(IsometryReport {
        k,
        tolerance,
        is_k_isometry: all_passed && trace_consistent,
        trace_consistent,
        splits,
    })
}

/// Tests whether a 2k-party state with equal local dimensions is k-unitary.
///
/// Unlike [`check_k_isometry`] the Gram matrix must equal the identity
/// exactly (up to `tolerance`, taken as an absolute bound), so normalization
/// matters: the k-unitary convention keeps every matrix entry of modulus one
/// rather than dividing by the norm.
pub fn check_k_unitary(state: &PureState, k: usize, tolerance: f64) -> Result<UnitaryReport> {
    if k == 0 {
        return Err(Error::ParameterDomain(
            "unitarity order k must be positive".into(),
        ));
    }
    let shape = state.shape();
    let parties = shape.party_count();
    if parties != 2 * k {
        return Err(Error::NotApplicable(format!(
            "a k-unitary with k = {} lives on {} parties, got {}",
            k,
            2 * k,
            parties
        )));
    }
    if shape.is_heterogeneous() {
        return Err(Error::NotApplicable(format!(
            "k-unitarity needs equal local dimensions, got {}",
            shape
        )));
    }
    let mut splits = Vec::new();
    let mut all_passed = true;
    for cols in (0..parties).combinations(k) {
        let view = CoefficientMatrixView::of_state(state, &cols)?;
        let report = gram_split_report(&view, cols, Some(1.0), tolerance);
        all_passed &= report.passed;
        splits.push(report);
    }
    Ok(UnitaryReport {
        k,
        tolerance,
        is_k_unitary: all_passed,
        splits,
    })
}

fn gram_split_report(
    view: &CoefficientMatrixView,
    col_parties: Vec<usize>,
    target_constant: Option<f64>,
    tolerance: f64,
) -> SplitReport {
    let gram = view.gram();
    let side = gram.nrows();
    let trace: f64 = (0..side).map(|i| gram[(i, i)].re).sum();
    let constant = target_constant.unwrap_or(trace / side as f64);
    let mut deviation = 0.0f64;
    for i in 0..side {
        for j in 0..side {
            let target = if i == j {
                Complex64::new(constant, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            deviation = deviation.max((gram[(i, j)] - target).norm());
        }
    }
    let bound = match target_constant {
        Some(_) => tolerance,
        None => tolerance * constant.max(f64::MIN_POSITIVE),
    };
    SplitReport {
        col_parties,
        constant,
        trace,
        deviation,
        passed: deviation <= bound,
    }
}

/// Rebuilds a pure state from a coefficient matrix view.
///
/// The output parties are the row parties followed by the column parties,
/// with local dimensions taken from the view. Entries are kept as numeric
/// amplitudes and the state is normalized, so a view obtained from
/// [`CoefficientMatrixView::of_state`] on a normalized state round-trips up
/// to the induced party reordering.
pub fn state_from_isometry(view: &CoefficientMatrixView) -> Result<PureState> {
    let mut dims = view.row_dims.clone();
    dims.extend(&view.col_dims);
    let shape = SystemShape::new(dims)?;
    let row_shape = SystemShape::new(view.row_dims.clone())?;
    let col_shape = SystemShape::new(view.col_dims.clone())?;
    let mut terms = Vec::new();
    for r in 0..view.matrix.nrows() {
        for c in 0..view.matrix.ncols() {
            let value = view.matrix[(r, c)];
            if value.norm() == 0.0 {
                continue;
            }
            let mut index = row_shape.unflatten(r);
            index.extend(col_shape.unflatten(c));
            terms.push((index, Amplitude::numeric(value)));
        }
    }
    if terms.is_empty() {
        return Err(Error::ZeroState);
    }
    Ok(PureState::new_unnormalized(shape, terms)?.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{bell_state, ghz_state};
    use crate::exact::ExactForm;
    use crate::msa::{msa_to_state, worked_345_array};
    use crate::verifier::verify_uniform;
    use num::BigRational;

    fn frac(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    /// The worked 3x4x5 state scaled so every squared amplitude is y/1
    /// instead of y/l, with norm squared 5.
    fn unnormalized_345() -> PureState {
        let state = msa_to_state(&worked_345_array()).unwrap();
        state.scaled_sqrt(&frac(5, 1)).unwrap()
    }

    fn basis_state(dims: Vec<usize>, index: Vec<usize>) -> PureState {
        let shape = SystemShape::new(dims).unwrap();
        PureState::new(shape, vec![(index, Amplitude::numeric(1.0.into()))]).unwrap()
    }

    #[test]
    fn worked_state_is_a_one_isometry_with_per_split_constants() {
        let state = unnormalized_345();
        let report = check_k_isometry(&state, 1, ISOMETRY_TOLERANCE).unwrap();
        assert!(report.is_k_isometry);
        assert!(report.trace_consistent);
        assert_eq!(report.splits.len(), 3);
        let expected = [(vec![0], 5.0 / 3.0), (vec![1], 5.0 / 4.0), (vec![2], 1.0)];
        for (split, (cols, constant)) in report.splits.iter().zip(expected) {
            assert_eq!(split.col_parties, cols);
            assert!((split.constant - constant).abs() < 1e-12);
            assert!((split.trace - 5.0).abs() < 1e-12);
            assert!(split.passed);
        }
    }

    #[test]
    fn ghz_three_qubits_is_a_one_isometry() {
        let state = ghz_state(2, 3).unwrap();
        let report = check_k_isometry(&state, 1, ISOMETRY_TOLERANCE).unwrap();
        assert!(report.is_k_isometry);
        for split in &report.splits {
            assert!((split.constant - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_is_not_an_isometry() {
        let state = basis_state(vec![2, 2, 2], vec![0, 0, 0]);
        let report = check_k_isometry(&state, 1, ISOMETRY_TOLERANCE).unwrap();
        assert!(!report.is_k_isometry);
        assert!(report.splits.iter().any(|s| s.deviation > 0.4));
    }

    #[test]
    fn isometry_check_validates_party_count() {
        let bell = bell_state(2).unwrap();
        assert!(matches!(
            check_k_isometry(&bell, 1, ISOMETRY_TOLERANCE),
            Err(Error::NotApplicable(_))
        ));
        let ghz = ghz_state(2, 3).unwrap();
        assert!(matches!(
            check_k_isometry(&ghz, 0, ISOMETRY_TOLERANCE),
            Err(Error::ParameterDomain(_))
        ));
    }

    #[test]
    fn standard_isometry_embedding_is_rejected() {
        let mut matrix = DMatrix::zeros(4, 2);
        matrix[(0, 0)] = Complex64::new(1.0, 0.0);
        matrix[(1, 1)] = Complex64::new(1.0, 0.0);
        let view = CoefficientMatrixView::from_matrix(matrix, vec![2, 2], vec![2]).unwrap();
        assert_eq!(view.gram(), DMatrix::identity(2, 2));
        let state = state_from_isometry(&view).unwrap();
        let report = check_k_isometry(&state, 1, ISOMETRY_TOLERANCE).unwrap();
        assert!(!report.is_k_isometry);
        let verdict = verify_uniform(&state, 1, 1e-12).unwrap();
        assert!(!verdict.is_k_uniform);
    }

    #[test]
    fn unnormalized_bell_is_one_unitary_and_normalized_is_not() {
        let shape = SystemShape::new(vec![3, 3]).unwrap();
        let terms: Vec<_> = (0..3)
            .map(|j| {
                (
                    vec![j, j],
                    Amplitude::exact(ExactForm::positive_sqrt(frac(1, 1)).unwrap()),
                )
            })
            .collect();
        let raw = PureState::new_unnormalized(shape, terms).unwrap();
        let report = check_k_unitary(&raw, 1, 1e-12).unwrap();
        assert!(report.is_k_unitary);

        let normalized = raw.normalized();
        let report = check_k_unitary(&normalized, 1, 1e-12).unwrap();
        assert!(!report.is_k_unitary);
    }

    #[test]
    fn unitarity_check_validates_shape() {
        let ghz = ghz_state(2, 3).unwrap();
        assert!(matches!(
            check_k_unitary(&ghz, 1, 1e-12),
            Err(Error::NotApplicable(_))
        ));
        let shape = SystemShape::new(vec![2, 3]).unwrap();
        let lopsided =
            PureState::new(shape, vec![(vec![0, 0], Amplitude::numeric(1.0.into()))]).unwrap();
        assert!(matches!(
            check_k_unitary(&lopsided, 1, 1e-12),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn two_unitary_permutation_state_passes_and_bell_pair_product_fails() {
        let shape = SystemShape::new(vec![3; 4]).unwrap();
        let mut terms = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                terms.push((
                    vec![i, j, (i + j) % 3, (i + 2 * j) % 3],
                    Amplitude::numeric(1.0.into()),
                ));
            }
        }
        let state = PureState::new_unnormalized(shape, terms).unwrap();
        let report = check_k_unitary(&state, 2, 1e-12).unwrap();
        assert!(report.is_k_unitary);

        let shape = SystemShape::new(vec![2; 4]).unwrap();
        let mut terms = Vec::new();
        for j in 0..2 {
            for k in 0..2 {
                terms.push((vec![j, k, j, k], Amplitude::numeric(1.0.into())));
            }
        }
        let pairs = PureState::new_unnormalized(shape, terms).unwrap();
        let report = check_k_unitary(&pairs, 2, 1e-12).unwrap();
        assert!(!report.is_k_unitary);
        let failing: Vec<_> = report.splits.iter().filter(|s| !s.passed).collect();
        assert!(failing.iter().any(|s| s.col_parties == vec![1, 3]));
    }

    #[test]
    fn state_round_trips_through_matrix_view() {
        let state = unnormalized_345().normalized();
        let view = CoefficientMatrixView::of_state(&state, &[1]).unwrap();
        assert_eq!(view.row_parties(), &[0, 2]);
        let rebuilt = state_from_isometry(&view).unwrap();
        let reordered = state.permute_parties(&[0, 2, 1]).unwrap();
        let fidelity = rebuilt.fidelity(&reordered).unwrap();
        assert!((fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_does_not_build_a_state() {
        let view =
            CoefficientMatrixView::from_matrix(DMatrix::zeros(2, 2), vec![2], vec![2]).unwrap();
        assert!(matches!(state_from_isometry(&view), Err(Error::ZeroState)));
    }

    #[test]
    fn view_shape_validation() {
        let matrix = DMatrix::zeros(4, 2);
        assert!(matches!(
            CoefficientMatrixView::from_matrix(matrix.clone(), vec![2], vec![2]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            CoefficientMatrixView::from_matrix(matrix, vec![4, 0], vec![2]),
            Err(Error::ZeroDimension { .. })
        ));
        let bell = bell_state(2).unwrap();
        assert!(CoefficientMatrixView::of_state(&bell, &[0, 1]).is_err());
        assert!(CoefficientMatrixView::of_state(&bell, &[]).is_err());
    }
}
