//! Closed-form families of tripartite states with maximally mixed marginals.
//!
//! Every constructor emits exact amplitude annotations: each amplitude is
//! `sqrt(rational) * exp(2*pi*i * rational)`. The families are
//!
//! * [`construct_mmn`]: `m x m x n` for `n <= m^2`, a uniform superposition
//!   of generalized Bell basis states tagged by a third-party pointer;
//! * [`construct_lmkm`]: `l x m x km` for `l < m` and `1 <= k <= l`;
//! * [`construct_2mmn`]: `2 x m x (m+n)`, which exists exactly when `n`
//!   divides `m` (`n = 0` targets `2 x m x m` instead);
//! * [`direct_sum_ab`]: doubles the first two local dimensions of two
//!   equal-shape inputs by a flagged superposition;
//! * [`compose_fig1`]: inflates the `2 x k x (k+1)` seed with a maximally
//!   entangled pair of local dimension `l` into `2 x kl x (kl+l)`.
//!
//! Local dimensions of 1 are permitted everywhere and act as trivial parties.

use num::rational::BigRational;
use num::BigInt;

use crate::error::{Error, Result};
use crate::exact::ExactForm;
use crate::linear::LinearSystem;
use crate::shape::SystemShape;
use crate::state::{Amplitude, PureState, NORMALIZATION_TOL};
use crate::verifier::{verify_uniform, DEFAULT_TOLERANCE};

fn frac(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The orthonormal family `(D_t (x) P_s)|Omega_l>` on `C^l (x) C^m`.
///
/// `|Omega_l> = (1/sqrt(l)) sum_x |x,x>` is the maximally entangled state on
/// the `l`-dimensional support, `D_t = diag(1, w^t, ..., w^{(l-1)t})` with
/// `w = exp(2*pi*i/l)` twists it, and `P_s` shifts the second party
/// cyclically by `s` modulo `m`. The `l*m` elements with `t < l`, `s < m`
/// form an orthonormal basis of the full bipartite space.
#[derive(Clone, Copy, Debug)]
pub struct GeneralizedBellBasis {
    l: usize,
    m: usize,
}

impl GeneralizedBellBasis {
    /// Basis over `C^l (x) C^m`; requires `1 <= l <= m`.
    pub fn new(l: usize, m: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::ParameterDomain("l must be positive".into()));
        }
        if m < l {
            return Err(Error::ParameterDomain(format!(
                "target dimension m = {m} must be at least l = {l}"
            )));
        }
        Ok(GeneralizedBellBasis { l, m })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The element `(1/sqrt(l)) sum_x w^{tx} |x, (x+s) mod m>`.
    pub fn state(&self, t: usize, s: usize) -> Result<PureState> {
        if t >= self.l {
            return Err(Error::ParameterDomain(format!(
                "phase label t = {t} must be below l = {}",
                self.l
            )));
        }
        if s >= self.m {
            return Err(Error::ParameterDomain(format!(
                "shift label s = {s} must be below m = {}",
                self.m
            )));
        }
        let shape = SystemShape::new(vec![self.l, self.m])?;
        let rad = frac(1, self.l);
        let mut terms = Vec::with_capacity(self.l);
        for x in 0..self.l {
            let form =
                ExactForm::root_of_unity(rad.clone(), ((t * x) % self.l) as i64, self.l as i64)?;
            terms.push((vec![x, (x + s) % self.m], Amplitude::exact(form)));
        }
        PureState::new(shape, terms)
    }
}

/// Maximally entangled pair `(1/sqrt(d)) sum_j |j,j>` on `d x d`.
pub fn bell_state(d: usize) -> Result<PureState> {
    ghz_state(d, 2)
}

/// The state `(1/sqrt(d)) sum_j |j,...,j>` on `parties` parties of dimension `d`.
pub fn ghz_state(d: usize, parties: usize) -> Result<PureState> {
    if d == 0 {
        return Err(Error::ParameterDomain("d must be positive".into()));
    }
    if parties == 0 {
        return Err(Error::EmptyShape);
    }
    let shape = SystemShape::new(vec![d; parties])?;
    let rad = frac(1, d);
    let terms = (0..d)
        .map(|j| {
            ExactForm::positive_sqrt(rad.clone())
                .map(|form| (vec![j; parties], Amplitude::exact(form)))
        })
        .collect::<Result<Vec<_>>>()?;
    PureState::new(shape, terms)
}

/// State in `m x m x n` with all single-party marginals maximally mixed.
///
/// Builds `(1/sqrt(n)) sum_{j<n} |Psi_j>|j>` where `Psi_j` runs through the
/// `m x m` generalized Bell basis in the order `j = m*t + s`. Requires
/// `1 <= n <= m^2`; above `m^2` the third party is too large for its marginal
/// to be maximally mixed.
pub fn construct_mmn(m: usize, n: usize) -> Result<PureState> {
    if m == 0 || n == 0 {
        return Err(Error::ParameterDomain(
            "dimensions m and n must be positive".into(),
        ));
    }
    let bound = m.checked_mul(m).ok_or(Error::IndexOverflow)?;
    if n > bound {
        return Err(Error::NonExistence(format!(
            "no 1-uniform state exists in {m}x{m}x{n}: party 2 exceeds the \
             complementary dimension m^2 = {bound}"
        )));
    }
    let den = n.checked_mul(m).ok_or(Error::IndexOverflow)?;
    let rad = frac(1, den);
    let shape = SystemShape::new(vec![m, m, n])?;
    let mut terms = Vec::with_capacity(den);
    for j in 0..n {
        let (t, s) = (j / m, j % m);
        for x in 0..m {
            let form = ExactForm::root_of_unity(rad.clone(), ((t * x) % m) as i64, m as i64)?;
            terms.push((vec![x, (x + s) % m, j], Amplitude::exact(form)));
        }
    }
    PureState::new(shape, terms)
}

/// State in `l x m x km` with all single-party marginals maximally mixed,
/// for `l < m` and `1 <= k <= l`.
///
/// Builds `(1/sqrt(km)) sum_{t<k} sum_{s<m} |Psi_{t,s}>|m*t+s>` over the
/// `l x m` generalized Bell basis.
pub fn construct_lmkm(l: usize, m: usize, k: usize) -> Result<PureState> {
    if l == 0 {
        return Err(Error::ParameterDomain("l must be positive".into()));
    }
    if m <= l {
        return Err(Error::ParameterDomain(format!(
            "m = {m} must exceed l = {l}"
        )));
    }
    if k == 0 || k > l {
        return Err(Error::ParameterDomain(format!(
            "k = {k} must satisfy 1 <= k <= l = {l}"
        )));
    }
    let third = k.checked_mul(m).ok_or(Error::IndexOverflow)?;
    let den = third.checked_mul(l).ok_or(Error::IndexOverflow)?;
    let rad = frac(1, den);
    let shape = SystemShape::new(vec![l, m, third])?;
    let mut terms = Vec::with_capacity(den);
    for t in 0..k {
        for s in 0..m {
            for x in 0..l {
                let form = ExactForm::root_of_unity(rad.clone(), ((t * x) % l) as i64, l as i64)?;
                terms.push((vec![x, (x + s) % m, m * t + s], Amplitude::exact(form)));
            }
        }
    }
    PureState::new(shape, terms)
}

/// State in `2 x m x (m+n)` with all single-party marginals maximally mixed.
///
/// For `n >= 1` such a state exists if and only if `n` divides `m`; with
/// `k = m/n` the coefficients are
///
/// ```text
/// |psi> = sum_{j<m} x_j |0, j, j> + y_j |1, j, j+n>,
/// x_j^2 = (k - floor(j/n)) / (k(k+1)n),   y_j^2 = (floor(j/n) + 1) / (k(k+1)n).
/// ```
///
/// `n = 0` targets `2 x m x m` and is served by restricting the first party
/// of [`construct_mmn`]`(m, 2)` to two basis states.
pub fn construct_2mmn(m: usize, n: usize) -> Result<PureState> {
    if m == 0 {
        return Err(Error::ParameterDomain("m must be positive".into()));
    }
    if n == 0 {
        if m == 1 {
            return Err(Error::NonExistence(
                "no 2x1x1 state has a maximally mixed first party".into(),
            ));
        }
        return construct_mmn(m, 2)?.permute_parties(&[2, 0, 1]);
    }
    if m % n != 0 {
        return Err(Error::NonExistence(format!(
            "no 1-uniform state of shape 2x{m}x{} exists: {n} does not divide {m}",
            m + n
        )));
    }
    let k = m / n;
    let den = k
        .checked_mul(k + 1)
        .and_then(|p| p.checked_mul(n))
        .ok_or(Error::IndexOverflow)?;
    let shape = SystemShape::new(vec![2, m, m + n])?;
    let mut terms = Vec::with_capacity(2 * m);
    for j in 0..m {
        let jb = j / n;
        terms.push((
            vec![0, j, j],
            Amplitude::exact(ExactForm::positive_sqrt(frac(k - jb, den))?),
        ));
        terms.push((
            vec![1, j, j + n],
            Amplitude::exact(ExactForm::positive_sqrt(frac(jb + 1, den))?),
        ));
    }
    PureState::new(shape, terms)
}

/// Marginal equations deciding existence of a `2 x m x (m+n)` state of the
/// form `(1/sqrt(2)) (|0> sum_j x_j |j,j> + |1> sum_j y_j |j,j+n>)`.
///
/// Variables are `u_j = x_j^2` (columns `0..m`) and `v_j = y_j^2` (columns
/// `m..2m`). The second party forces `u_j + v_j = 2/m`; the third party
/// forces `u_j = 2/(m+n)` for `j < n`, `u_{j+n} + v_j = 2/(m+n)` for
/// `j < m-n`, and `v_j = 2/(m+n)` for `j >= m-n`. Nonnegative solutions
/// exist exactly when `n` divides `m`, and then the solution is unique.
pub fn two_mmn_feasibility_system(m: usize, n: usize) -> Result<LinearSystem> {
    if m == 0 || n == 0 || n > m {
        return Err(Error::ParameterDomain(format!(
            "the system is defined for 1 <= n <= m, got m = {m}, n = {n}"
        )));
    }
    let vars = 2 * m;
    let mut coeffs = Vec::new();
    let mut rhs = Vec::new();
    let one = BigRational::from(BigInt::from(1));
    let b_side = frac(2, m);
    let c_side = frac(2, m + n);
    for j in 0..m {
        let mut row = vec![BigRational::default(); vars];
        row[j] = one.clone();
        row[m + j] = one.clone();
        coeffs.push(row);
        rhs.push(b_side.clone());
    }
    for j in 0..n {
        let mut row = vec![BigRational::default(); vars];
        row[j] = one.clone();
        coeffs.push(row);
        rhs.push(c_side.clone());
    }
    for j in 0..m - n {
        let mut row = vec![BigRational::default(); vars];
        row[n + j] = one.clone();
        row[m + j] = one.clone();
        coeffs.push(row);
        rhs.push(c_side.clone());
    }
    for j in m - n..m {
        let mut row = vec![BigRational::default(); vars];
        row[m + j] = one.clone();
        coeffs.push(row);
        rhs.push(c_side.clone());
    }
    Ok(LinearSystem::new(coeffs, rhs))
}

/// Flagged superposition `(1/sqrt(2)) (|00>_AB |psi> + |11>_AB |phi>)` with
/// the flags absorbed into the first two parties.
///
/// Inputs must be normalized tripartite states of identical shape with all
/// single-party marginals maximally mixed; the output then has the same
/// property on shape `(2 d_A) x (2 d_B) x d_C`, indexing party A as
/// `flag * d_A + original` and likewise party B.
pub fn direct_sum_ab(psi: &PureState, phi: &PureState) -> Result<PureState> {
    if psi.shape().party_count() != 3 || phi.shape().party_count() != 3 {
        return Err(Error::PreconditionFailed(
            "the direct sum is defined for tripartite states".into(),
        ));
    }
    if psi.shape() != phi.shape() {
        return Err(Error::ShapeMismatch(format!(
            "direct sum needs identical shapes, got {} and {}",
            psi.shape(),
            phi.shape()
        )));
    }
    for (side, s) in [("left", psi), ("right", phi)] {
        if !s.is_normalized(NORMALIZATION_TOL) {
            return Err(Error::PreconditionFailed(format!(
                "{side} input is not normalized"
            )));
        }
        let verdict = verify_uniform(s, 1, DEFAULT_TOLERANCE)?;
        if !verdict.is_k_uniform {
            return Err(Error::PreconditionFailed(format!(
                "{side} input is not 1-uniform (worst marginal deviation {:.3e})",
                verdict.worst_deviation()
            )));
        }
    }
    let da = psi.shape().dim(0);
    let db = psi.shape().dim(1);
    let dc = psi.shape().dim(2);
    let half = frac(1, 2);
    let shape = SystemShape::new(vec![2 * da, 2 * db, dc])?;
    let mut terms = Vec::with_capacity(psi.term_count() + phi.term_count());
    let left = psi.scaled_sqrt(&half)?;
    for (idx, amp) in left.terms() {
        terms.push((idx.clone(), amp.clone()));
    }
    let right = phi.scaled_sqrt(&half)?;
    for (idx, amp) in right.terms() {
        terms.push((vec![da + idx[0], db + idx[1], idx[2]], amp.clone()));
    }
    PureState::new(shape, terms)
}

/// State in `2 x kl x (kl+l)` with all single-party marginals maximally
/// mixed, built by fusing a maximally entangled pair of local dimension `l`
/// into the last two parties of the `2 x k x (k+1)` seed.
pub fn compose_fig1(k: usize, l: usize) -> Result<PureState> {
    if k == 0 || l == 0 {
        return Err(Error::ParameterDomain(
            "parameters k and l must be positive".into(),
        ));
    }
    let seed = construct_2mmn(k, 1)?;
    let pair = bell_state(l)?;
    seed.tensor_product(&pair, &[(1, 0), (2, 1)])
}
