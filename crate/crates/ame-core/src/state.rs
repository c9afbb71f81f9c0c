//! Sparse pure states and dense reduced density matrices.
//!
//! A [`PureState`] stores only its nonzero amplitudes, keyed by multi-index
//! in lexicographic order. Amplitudes carry an optional [`ExactForm`]
//! annotation so that states produced by the closed-form constructors keep
//! exact `sqrt(rational) * root-of-unity` values next to their f64
//! approximations.
//!
//! Reduced density matrices are computed as `rho = Tr_E |psi><psi| / <psi|psi>`,
//! so every [`DensityMatrix`] returned by [`PureState::partial_trace`] has
//! unit trace regardless of the input normalization.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num::rational::BigRational;
use num::Zero;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{rational_to_f64, ExactForm};
use crate::shape::SystemShape;

/// Relative tolerance for agreement between an amplitude's numeric value and
/// its exact annotation.
pub const EXACT_AGREEMENT_TOL: f64 = 1e-14;

/// Tolerance on the squared norm for states required to be normalized.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// One complex amplitude, optionally annotated with its exact closed form.
#[derive(Clone, Debug)]
pub struct Amplitude {
    value: Complex64,
    exact: Option<ExactForm>,
}

impl Amplitude {
    /// Amplitude known only numerically.
    pub fn numeric(value: Complex64) -> Self {
        Amplitude { value, exact: None }
    }

    /// Amplitude defined by its exact form; the numeric value is derived.
    pub fn exact(form: ExactForm) -> Self {
        Amplitude {
            value: form.value(),
            exact: Some(form),
        }
    }

    /// Numeric value with an annotation, checked for agreement.
    pub fn annotated(value: Complex64, form: ExactForm) -> Result<Self> {
        let reference = form.value();
        if (value - reference).norm() > EXACT_AGREEMENT_TOL * (1.0 + reference.norm()) {
            return Err(Error::ExactMismatch {
                index: vec![],
                re: value.re,
                im: value.im,
            });
        }
        Ok(Amplitude {
            value,
            exact: Some(form),
        })
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn exact_form(&self) -> Option<&ExactForm> {
        self.exact.as_ref()
    }

    pub fn squared_modulus(&self) -> f64 {
        self.value.norm_sqr()
    }

    /// Exact squared modulus when the annotation is present.
    pub fn exact_squared_modulus(&self) -> Option<&BigRational> {
        self.exact.as_ref().map(|f| f.squared_modulus())
    }

    fn is_zero(&self) -> bool {
        self.value == Complex64::zero() && self.exact.as_ref().map_or(true, |f| f.radicand().is_zero())
    }

    fn mul(&self, other: &Amplitude) -> Amplitude {
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        };
        Amplitude {
            value: self.value * other.value,
            exact,
        }
    }

    /// Multiplies by `sqrt(factor)` for a nonnegative rational factor.
    fn scale_sqrt(&self, factor: &BigRational) -> Amplitude {
        let num = rational_to_f64(factor).sqrt();
        Amplitude {
            value: self.value * num,
            exact: self
                .exact
                .as_ref()
                .and_then(|f| f.scale_radicand(factor).ok()),
        }
    }

    fn scale_numeric(&self, factor: f64) -> Amplitude {
        Amplitude {
            value: self.value * factor,
            exact: None,
        }
    }
}

/// A sparse pure state over a multipartite shape.
///
/// Zero amplitudes are never stored; the term map is ordered
/// lexicographically by multi-index, which fixes the serialization order and
/// makes all floating point reductions deterministic.
#[derive(Clone, Debug)]
pub struct PureState {
    shape: SystemShape,
    terms: BTreeMap<Vec<usize>, Amplitude>,
}

impl PureState {
    /// Builds a normalized state; fails if the squared norm deviates from 1
    /// by more than [`NORMALIZATION_TOL`].
    pub fn new(shape: SystemShape, terms: Vec<(Vec<usize>, Amplitude)>) -> Result<Self> {
        let state = Self::new_unnormalized(shape, terms)?;
        let norm_sq = state.norm_sq();
        if (norm_sq - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(state)
    }

    /// Builds a state without a normalization requirement. The state must
    /// still contain at least one nonzero amplitude.
    pub fn new_unnormalized(
        shape: SystemShape,
        terms: Vec<(Vec<usize>, Amplitude)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (index, amp) in terms {
            shape.check_index(&index)?;
            if amp.is_zero() {
                continue;
            }
            if map.insert(index.clone(), amp).is_some() {
                return Err(Error::DuplicateIndex(index));
            }
        }
        if map.is_empty() {
            return Err(Error::ZeroState);
        }
        Ok(PureState { shape, terms: map })
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    /// Number of stored nonzero amplitudes.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterates terms in lexicographic index order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Amplitude)> {
        self.terms.iter()
    }

    /// Amplitude at a basis index (zero when absent).
    pub fn amplitude(&self, index: &[usize]) -> Complex64 {
        self.terms
            .get(index)
            .map(|a| a.value())
            .unwrap_or_else(Complex64::zero)
    }

    /// Full amplitude record at a basis index, including any exact form.
    pub fn term(&self, index: &[usize]) -> Option<&Amplitude> {
        self.terms.get(index)
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|a| a.squared_modulus()).sum()
    }

    /// Exact squared norm when every amplitude carries an annotation.
    pub fn exact_norm_sq(&self) -> Option<BigRational> {
        let mut total = BigRational::zero();
        for amp in self.terms.values() {
            total += amp.exact_squared_modulus()?;
        }
        Some(total)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sq() - 1.0).abs() <= tol
    }

    /// Returns the state scaled to unit norm. Exact annotations survive when
    /// the exact squared norm is available.
    pub fn normalized(&self) -> PureState {
        if let Some(norm_sq) = self.exact_norm_sq() {
            if !norm_sq.is_zero() {
                let factor = norm_sq.recip();
                let terms = self
                    .terms
                    .iter()
                    .map(|(idx, amp)| (idx.clone(), amp.scale_sqrt(&factor)))
                    .collect();
                return PureState {
                    shape: self.shape.clone(),
                    terms,
                };
            }
        }
        let inv = 1.0 / self.norm_sq().sqrt();
        let terms = self
            .terms
            .iter()
            .map(|(idx, amp)| (idx.clone(), amp.scale_numeric(inv)))
            .collect();
        PureState {
            shape: self.shape.clone(),
            terms,
        }
    }

    /// Multiplies every amplitude by `sqrt(factor)` for a nonnegative
    /// rational factor, preserving exact annotations.
    pub fn scaled_sqrt(&self, factor: &BigRational) -> Result<PureState> {
        if factor < &BigRational::zero() {
            return Err(Error::ParameterDomain(
                "scale factor must be nonnegative".into(),
            ));
        }
        if factor.is_zero() {
            return Err(Error::ZeroState);
        }
        let terms = self
            .terms
            .iter()
            .map(|(idx, amp)| (idx.clone(), amp.scale_sqrt(factor)))
            .collect();
        Ok(PureState {
            shape: self.shape.clone(),
            terms,
        })
    }

    /// Reorders parties: output party `i` is input party `perm[i]`.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<PureState> {
        let n = self.shape.party_count();
        if perm.len() != n {
            return Err(Error::IndexArity {
                got: perm.len(),
                expected: n,
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidSubset(format!(
                    "{perm:?} is not a permutation of 0..{n}"
                )));
            }
            seen[p] = true;
        }
        let dims: Vec<usize> = perm.iter().map(|&p| self.shape.dim(p)).collect();
        let shape = SystemShape::new(dims)?;
        let mut terms = BTreeMap::new();
        for (idx, amp) in &self.terms {
            let new_idx: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
            terms.insert(new_idx, amp.clone());
        }
        Ok(PureState { shape, terms })
    }

    /// Reduced density matrix on the given sorted party subset.
    ///
    /// The subset must be a nonempty strict subset of the parties. The result
    /// is normalized to unit trace, so the input state need not be normalized.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.shape.check_proper_subset(keep)?;
        let env = self.shape.complement(keep);
        let side = self.shape.subset_dim(keep);

        // Group terms by the flattened environment index; each group
        // contributes a rank-one update to the reduced matrix.
        let mut groups: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (idx, amp) in &self.terms {
            let e = self.shape.flat_index_over(&env, idx);
            let k = self.shape.flat_index_over(keep, idx);
            groups.entry(e).or_default().push((k, amp.value()));
        }

        let mut entries = DMatrix::<Complex64>::zeros(side, side);
        for members in groups.values() {
            for (pos, &(i, a)) in members.iter().enumerate() {
                entries[(i, i)] += a * a.conj();
                for &(j, b) in &members[pos + 1..] {
                    let p = a * b.conj();
                    entries[(i, j)] += p;
                    entries[(j, i)] += p.conj();
                }
            }
        }
        let norm_sq = self.norm_sq();
        entries /= Complex64::new(norm_sq, 0.0);

        let dims: Vec<usize> = keep.iter().map(|&p| self.shape.dim(p)).collect();
        Ok(DensityMatrix {
            shape: SystemShape::new(dims)?,
            entries,
        })
    }

    /// Exact diagonal of the single-party reduced matrix, in units of the
    /// squared norm, when every amplitude carries an exact annotation.
    pub fn exact_single_party_diagonal(&self, party: usize) -> Option<Vec<BigRational>> {
        if party >= self.shape.party_count() {
            return None;
        }
        let norm = self.exact_norm_sq()?;
        if norm.is_zero() {
            return None;
        }
        let mut diag = vec![BigRational::zero(); self.shape.dim(party)];
        for (idx, amp) in &self.terms {
            diag[idx[party]] += amp.exact_squared_modulus()?;
        }
        Some(diag.into_iter().map(|d| d / norm.clone()).collect())
    }

    /// Tensor product with `other`, fusing the listed party pairs.
    ///
    /// `pairing` lists `(party_of_self, party_of_other)` merges; a fused party
    /// has dimension `d_self * d_other` and index `i_self * d_other + i_other`.
    /// Output party order: this state's parties in order (fused in place),
    /// then the unpaired parties of `other` in order.
    pub fn tensor_product(
        &self,
        other: &PureState,
        pairing: &[(usize, usize)],
    ) -> Result<PureState> {
        let na = self.shape.party_count();
        let nb = other.shape.party_count();
        let mut partner_of_a: Vec<Option<usize>> = vec![None; na];
        let mut paired_b = vec![false; nb];
        for &(pa, pb) in pairing {
            if pa >= na {
                return Err(Error::InvalidPairing(format!(
                    "left party {pa} out of range for {na} parties"
                )));
            }
            if pb >= nb {
                return Err(Error::InvalidPairing(format!(
                    "right party {pb} out of range for {nb} parties"
                )));
            }
            if partner_of_a[pa].is_some() {
                return Err(Error::InvalidPairing(format!("left party {pa} paired twice")));
            }
            if paired_b[pb] {
                return Err(Error::InvalidPairing(format!(
                    "right party {pb} paired twice"
                )));
            }
            partner_of_a[pa] = Some(pb);
            paired_b[pb] = true;
        }

        let mut dims = Vec::new();
        for pa in 0..na {
            let d = match partner_of_a[pa] {
                Some(pb) => self
                    .shape
                    .dim(pa)
                    .checked_mul(other.shape.dim(pb))
                    .ok_or(Error::IndexOverflow)?,
                None => self.shape.dim(pa),
            };
            dims.push(d);
        }
        let b_rest: Vec<usize> = (0..nb).filter(|&pb| !paired_b[pb]).collect();
        for &pb in &b_rest {
            dims.push(other.shape.dim(pb));
        }
        let shape = SystemShape::new(dims)?;

        let mut terms = BTreeMap::new();
        for (ia, aa) in &self.terms {
            for (ib, ab) in &other.terms {
                let mut idx = Vec::with_capacity(shape.party_count());
                for pa in 0..na {
                    match partner_of_a[pa] {
                        Some(pb) => idx.push(ia[pa] * other.shape.dim(pb) + ib[pb]),
                        None => idx.push(ia[pa]),
                    }
                }
                for &pb in &b_rest {
                    idx.push(ib[pb]);
                }
                let previous = terms.insert(idx, aa.mul(ab));
                debug_assert!(previous.is_none());
            }
        }
        Ok(PureState { shape, terms })
    }

    /// Squared overlap `|<self|other>|^2`, normalized to lie in `[0, 1]`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "cannot overlap states of shapes {} and {}",
                self.shape, other.shape
            )));
        }
        let mut overlap = Complex64::zero();
        for (idx, amp) in &self.terms {
            if let Some(b) = other.terms.get(idx) {
                overlap += amp.value().conj() * b.value();
            }
        }
        let f = overlap.norm_sqr() / (self.norm_sq() * other.norm_sq());
        Ok(f.min(1.0))
    }
}

/// A dense reduced density matrix over a party subset.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    shape: SystemShape,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(shape: SystemShape, entries: DMatrix<Complex64>) -> Result<Self> {
        let side = shape.total_dim();
        if entries.nrows() != side || entries.ncols() != side {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{} but shape {} has total dimension {side}",
                entries.nrows(),
                entries.ncols(),
                shape
            )));
        }
        Ok(DensityMatrix { shape, entries })
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Side length of the matrix.
    pub fn side(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diagonal().sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.side();
        for i in 0..n {
            for j in i..n {
                if (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Real eigenvalues in ascending order (the matrix is Hermitian).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.entries.clone().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()
            .first()
            .cloned()
            .unwrap_or(f64::NAN)
    }

    /// Largest absolute entrywise deviation from the maximally mixed state
    /// `I/D` on the same space.
    pub fn max_abs_deviation_from_maximally_mixed(&self) -> f64 {
        let d = self.side();
        let uniform = 1.0 / d as f64;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { uniform } else { 0.0 };
                let dev = (self.entries[(i, j)] - Complex64::new(target, 0.0)).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Trace distance `0.5 * ||rho - I/D||_1` from the maximally mixed state.
    pub fn trace_distance_from_maximally_mixed(&self) -> f64 {
        let d = self.side();
        let uniform = 1.0 / d as f64;
        let mut diff = self.entries.clone();
        for i in 0..d {
            diff[(i, i)] -= Complex64::new(uniform, 0.0);
        }
        let eig = diff.symmetric_eigen();
        0.5 * eig.eigenvalues.iter().map(|v| v.abs()).sum::<f64>()
    }
}
