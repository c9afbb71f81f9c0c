//! Magic solution arrays: existence of tripartite maximally entangled states
//! as exact rational feasibility.
//!
//! For a tripartite system `l x m x n` (`l <= m <= n`), a magic solution
//! array is an `l x m` array `y` of nonnegative rationals satisfying three
//! exact constraint families:
//!
//! * row sums:      `sum_j y[k][j] = 1`            for every `k < l`,
//! * column sums:   `sum_k y[k][j] = l/m`          for every `j < m`,
//! * wrapped diagonals: `sum_{(k+j) mod n = s} y[k][j] = l/n` for every `s < n`.
//!
//! Whenever such an array exists with `3 <= l < m < n <= m + l - 1`, the state
//!
//! `(1/sqrt(l)) * sum_{k,j} sqrt(y[k][j]) |k> |j> |(j+k) mod n>`
//!
//! has all three single-party marginals maximally mixed, i.e. it is
//! absolutely maximally entangled. [`solve_msa`] decides existence over the
//! rationals and returns either an array or a Farkas refutation.

use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::ExactForm;
use crate::linear::{solve_feasibility, FarkasCertificate, Feasibility, LinearSystem};
use crate::shape::SystemShape;
use crate::state::{Amplitude, PureState};

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Dimension triple for a magic-solution-array query.
///
/// The guaranteed-existence regime of the tripartite construction is
/// `3 <= l < m < n <= m + l - 1`; [`MsaProblem::new`] enforces it. Outside
/// that regime the constraint system is still well defined and
/// [`MsaProblem::relaxed`] admits any `1 <= l <= m <= n` for exploration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MsaProblem {
    l: usize,
    m: usize,
    n: usize,
    relaxed: bool,
}

impl MsaProblem {
    /// Problem restricted to the guaranteed regime `3 <= l < m < n <= m+l-1`.
    pub fn new(l: usize, m: usize, n: usize) -> Result<Self> {
        if !Self::in_guaranteed_regime(l, m, n) {
            return Err(Error::ParameterDomain(format!(
                "dimensions {l}x{m}x{n} are outside the guaranteed regime \
                 3 <= l < m < n <= m+l-1; use relaxed mode to explore them"
            )));
        }
        Ok(MsaProblem {
            l,
            m,
            n,
            relaxed: false,
        })
    }

    /// Exploratory problem for any ordered triple `1 <= l <= m <= n`.
    pub fn relaxed(l: usize, m: usize, n: usize) -> Result<Self> {
        if l < 1 || l > m || m > n {
            return Err(Error::ParameterDomain(format!(
                "relaxed mode requires 1 <= l <= m <= n, got {l}x{m}x{n}"
            )));
        }
        Ok(MsaProblem {
            l,
            m,
            n,
            relaxed: true,
        })
    }

    pub fn in_guaranteed_regime(l: usize, m: usize, n: usize) -> bool {
        3 <= l && l < m && m < n && n <= m + l - 1
    }

    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The three equality families as one linear system over the `l*m`
    /// variables `y[k][j]` (row-major), with implicit nonnegativity.
    /// Equation order: `l` row sums, then `m` column sums, then `n` wrapped
    /// diagonal sums.
    pub fn system(&self) -> LinearSystem {
        let (l, m, n) = (self.l, self.m, self.n);
        let vars = l * m;
        let mut coeffs = Vec::with_capacity(l + m + n);
        let mut rhs = Vec::with_capacity(l + m + n);
        for k in 0..l {
            let mut row = vec![BigRational::zero(); vars];
            for j in 0..m {
                row[k * m + j] = BigRational::one();
            }
            coeffs.push(row);
            rhs.push(BigRational::one());
        }
        for j in 0..m {
            let mut row = vec![BigRational::zero(); vars];
            for k in 0..l {
                row[k * m + j] = BigRational::one();
            }
            coeffs.push(row);
            rhs.push(ratio(l, m));
        }
        for s in 0..n {
            let mut row = vec![BigRational::zero(); vars];
            for k in 0..l {
                for j in 0..m {
                    if (k + j) % n == s {
                        row[k * m + j] = BigRational::one();
                    }
                }
            }
            coeffs.push(row);
            rhs.push(ratio(l, n));
        }
        LinearSystem::new(coeffs, rhs)
    }
}

/// An `l x m` array of rationals tied to a dimension triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagicSolutionArray {
    l: usize,
    m: usize,
    n: usize,
    y: Vec<Vec<BigRational>>,
}

impl MagicSolutionArray {
    /// Wraps an array after checking only its rectangular shape; use
    /// [`verify_msa`] for the constraint check.
    pub fn new(l: usize, m: usize, n: usize, y: Vec<Vec<BigRational>>) -> Result<Self> {
        if l == 0 || m == 0 || n == 0 {
            return Err(Error::ParameterDomain(
                "array dimensions must be at least 1".into(),
            ));
        }
        if y.len() != l || y.iter().any(|row| row.len() != m) {
            return Err(Error::ShapeMismatch(format!(
                "array must be {l} rows of {m} entries"
            )));
        }
        Ok(MagicSolutionArray { l, m, n, y })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, k: usize, j: usize) -> &BigRational {
        &self.y[k][j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<BigRational>> {
        self.y.iter()
    }

    /// Flattened row-major copy of the entries.
    pub fn flattened(&self) -> Vec<BigRational> {
        self.y.iter().flatten().cloned().collect()
    }
}

/// Which constraint family a violation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintFamily {
    /// `sum_j y[k][j] = 1`
    RowSum,
    /// `sum_k y[k][j] = l/m`
    ColumnSum,
    /// `sum_{(k+j) mod n = s} y[k][j] = l/n`
    DiagonalSum,
    /// `y[k][j] >= 0`
    Nonnegativity,
}

impl std::fmt::Display for ConstraintFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConstraintFamily::RowSum => "row-sum",
            ConstraintFamily::ColumnSum => "column-sum",
            ConstraintFamily::DiagonalSum => "diagonal-sum",
            ConstraintFamily::Nonnegativity => "nonnegativity",
        };
        write!(f, "{s}")
    }
}

/// One violated constraint with its exact residual.
#[derive(Clone, Debug)]
pub struct MsaViolation {
    pub family: ConstraintFamily,
    /// Row, column, or diagonal index; for nonnegativity the flattened
    /// row-major entry index.
    pub index: usize,
    /// `achieved - required` for sum families; the entry itself for
    /// nonnegativity.
    pub residual: BigRational,
}

/// Exact verification result for an array.
#[derive(Clone, Debug)]
pub struct MsaCheck {
    pub passed: bool,
    pub violations: Vec<MsaViolation>,
}

/// Checks all three sum families and nonnegativity exactly.
pub fn verify_msa(arr: &MagicSolutionArray) -> MsaCheck {
    let (l, m, n) = (arr.l, arr.m, arr.n);
    let mut violations = Vec::new();

    for k in 0..l {
        let sum: BigRational = arr.y[k].iter().cloned().sum();
        if sum != BigRational::one() {
            violations.push(MsaViolation {
                family: ConstraintFamily::RowSum,
                index: k,
                residual: sum - BigRational::one(),
            });
        }
    }
    let col_target = ratio(l, m);
    for j in 0..m {
        let sum: BigRational = (0..l).map(|k| arr.y[k][j].clone()).sum();
        if sum != col_target {
            violations.push(MsaViolation {
                family: ConstraintFamily::ColumnSum,
                index: j,
                residual: sum - col_target.clone(),
            });
        }
    }
    let diag_target = ratio(l, n);
    for s in 0..n {
        let mut sum = BigRational::zero();
        for k in 0..l {
            for j in 0..m {
                if (k + j) % n == s {
                    sum += &arr.y[k][j];
                }
            }
        }
        if sum != diag_target {
            violations.push(MsaViolation {
                family: ConstraintFamily::DiagonalSum,
                index: s,
                residual: sum - diag_target.clone(),
            });
        }
    }
    for k in 0..l {
        for j in 0..m {
            if arr.y[k][j].is_negative() {
                violations.push(MsaViolation {
                    family: ConstraintFamily::Nonnegativity,
                    index: k * m + j,
                    residual: arr.y[k][j].clone(),
                });
            }
        }
    }

    MsaCheck {
        passed: violations.is_empty(),
        violations,
    }
}

/// Outcome of an existence query.
#[derive(Clone, Debug)]
pub enum MsaOutcome {
    /// An array that passes [`verify_msa`].
    Feasible(MagicSolutionArray),
    /// A Farkas refutation of the constraint system.
    Infeasible(FarkasCertificate),
}

impl MsaOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, MsaOutcome::Feasible(_))
    }
}

/// Decides existence of a magic solution array for the given dimensions.
///
/// The verdict is exact: a feasible outcome passes [`verify_msa`] and an
/// infeasible outcome carries a Farkas certificate that validates against
/// [`MsaProblem::system`].
pub fn solve_msa(problem: &MsaProblem) -> MsaOutcome {
    let sys = problem.system();
    match solve_feasibility(&sys) {
        Feasibility::Feasible(x) => {
            let y: Vec<Vec<BigRational>> = (0..problem.l)
                .map(|k| x[k * problem.m..(k + 1) * problem.m].to_vec())
                .collect();
            let arr = MagicSolutionArray::new(problem.l, problem.m, problem.n, y)
                .expect("solver output has the problem's shape");
            debug_assert!(verify_msa(&arr).passed);
            MsaOutcome::Feasible(arr)
        }
        Feasibility::Infeasible(cert) => MsaOutcome::Infeasible(cert),
    }
}

/// Builds the tripartite state encoded by a verified array:
/// `(1/sqrt(l)) * sum_{k,j} sqrt(y[k][j]) |k>|j>|(j+k) mod n>`.
///
/// Every amplitude carries the exact annotation `sqrt(y[k][j]/l)`, so the
/// squared amplitudes recover `y/l` exactly.
pub fn msa_to_state(arr: &MagicSolutionArray) -> Result<PureState> {
    let check = verify_msa(arr);
    if !check.passed {
        let first = &check.violations[0];
        return Err(Error::PreconditionFailed(format!(
            "array violates the {} constraint at index {} (residual {})",
            first.family, first.index, first.residual
        )));
    }
    let (l, m, n) = (arr.l, arr.m, arr.n);
    let shape = SystemShape::new(vec![l, m, n])?;
    let inv_l = ratio(1, l);
    let mut terms = Vec::new();
    for k in 0..l {
        for j in 0..m {
            let y = &arr.y[k][j];
            if y.is_zero() {
                continue;
            }
            let radicand = y * &inv_l;
            let form = ExactForm::positive_sqrt(radicand)?;
            terms.push((vec![k, j, (j + k) % n], Amplitude::exact(form)));
        }
    }
    PureState::new(shape, terms)
}

/// The worked 3x4x5 array used across the test suite.
#[cfg(test)]
pub(crate) fn worked_345_array() -> MagicSolutionArray {
    let rat = |s: &str| crate::exact::parse_rational(s).unwrap();
    let rows = vec![
        vec![rat("12/40"), rat("24/40"), rat("4/40"), rat("0")],
        vec![rat("0"), rat("2/40"), rat("20/40"), rat("18/40")],
        vec![rat("18/40"), rat("4/40"), rat("6/40"), rat("12/40")],
    ];
    MagicSolutionArray::new(3, 4, 5, rows).unwrap()
}
