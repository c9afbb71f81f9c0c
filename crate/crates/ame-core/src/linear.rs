//! Exact rational linear feasibility.
//!
//! Decides whether `A x = b, x >= 0` has a rational solution, using a
//! phase-one simplex over arbitrary-precision rationals with Bland's
//! anti-cycling rule. A feasible outcome carries an explicit solution; an
//! infeasible outcome carries a Farkas certificate `u` with `u^T A <= 0`
//! componentwise and `u^T b > 0`, which refutes feasibility independently of
//! the solver's internals. Both artifacts are re-checked against the input
//! before being returned.

use num::rational::BigRational;
use num::{Signed, Zero};

/// The system `A x = b` with the implicit constraint `x >= 0`.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    coeffs: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
}

impl LinearSystem {
    /// Builds a system from equation rows. All rows must have equal length.
    ///
    /// # Panics
    /// Panics if the rows are ragged or no row is given; the builders in this
    /// crate always produce rectangular systems.
    pub fn new(coeffs: Vec<Vec<BigRational>>, rhs: Vec<BigRational>) -> Self {
        assert_eq!(coeffs.len(), rhs.len(), "one rhs entry per equation");
        assert!(!coeffs.is_empty(), "system needs at least one equation");
        let width = coeffs[0].len();
        assert!(
            coeffs.iter().all(|r| r.len() == width),
            "ragged coefficient rows"
        );
        LinearSystem { coeffs, rhs }
    }

    pub fn equation_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn variable_count(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn coefficient(&self, eq: usize, var: usize) -> &BigRational {
        &self.coeffs[eq][var]
    }

    pub fn rhs(&self, eq: usize) -> &BigRational {
        &self.rhs[eq]
    }

    /// Residuals `A x - b`.
    pub fn residuals(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                row.iter()
                    .zip(x)
                    .fold(BigRational::zero(), |acc, (a, xi)| acc + a * xi)
                    - b
            })
            .collect()
    }

    /// True when `x >= 0` and `A x = b` exactly.
    pub fn is_solution(&self, x: &[BigRational]) -> bool {
        x.len() == self.variable_count()
            && x.iter().all(|v| !v.is_negative())
            && self.residuals(x).iter().all(|r| r.is_zero())
    }
}

/// Refutation of `A x = b, x >= 0`: multipliers `u` with `u^T A <= 0` and
/// `u^T b > 0`.
#[derive(Clone, Debug)]
pub struct FarkasCertificate {
    pub multipliers: Vec<BigRational>,
}

impl FarkasCertificate {
    /// Checks the certificate against a system, independently of how it was
    /// produced.
    pub fn validates(&self, sys: &LinearSystem) -> bool {
        if self.multipliers.len() != sys.equation_count() {
            return false;
        }
        for var in 0..sys.variable_count() {
            let mut dot = BigRational::zero();
            for (eq, u) in self.multipliers.iter().enumerate() {
                dot += u * sys.coefficient(eq, var);
            }
            if dot.is_positive() {
                return false;
            }
        }
        let mut rhs_dot = BigRational::zero();
        for (eq, u) in self.multipliers.iter().enumerate() {
            rhs_dot += u * sys.rhs(eq);
        }
        rhs_dot.is_positive()
    }
}

/// Outcome of a feasibility query.
#[derive(Clone, Debug)]
pub enum Feasibility {
    /// A verified nonnegative rational solution.
    Feasible(Vec<BigRational>),
    /// A verified Farkas refutation.
    Infeasible(FarkasCertificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Decides `A x = b, x >= 0` by phase-one simplex with Bland's rule.
pub fn solve_feasibility(sys: &LinearSystem) -> Feasibility {
    let m = sys.equation_count();
    let n = sys.variable_count();

    // Work on a sign-adjusted copy with b >= 0 so the artificial basis is
    // feasible; remember the flips to map the Farkas vector back.
    let mut flipped = vec![false; m];
    // Tableau layout: n original columns, m artificial columns, then rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for eq in 0..m {
        let flip = sys.rhs(eq).is_negative();
        flipped[eq] = flip;
        let mut row: Vec<BigRational> = Vec::with_capacity(width);
        for var in 0..n {
            let a = sys.coefficient(eq, var).clone();
            row.push(if flip { -a } else { a });
        }
        for art in 0..m {
            row.push(if art == eq {
                BigRational::from_integer(1.into())
            } else {
                BigRational::zero()
            });
        }
        let b = sys.rhs(eq).clone();
        row.push(if flip { -b } else { b });
        t.push(row);
    }

    // Phase-one objective: minimize the sum of artificials. With the
    // artificial basis, the reduced cost of column j is c_j minus the column
    // sum; the last entry tracks the negated objective value.
    let mut cost: Vec<BigRational> = vec![BigRational::zero(); width];
    for row in &t {
        for (c, v) in cost.iter_mut().zip(row) {
            *c -= v;
        }
    }
    for art in 0..m {
        cost[n + art] += BigRational::from_integer(1.into());
    }

    let mut basis: Vec<usize> = (n..n + m).collect();
    // Once an artificial variable leaves the basis it never re-enters; this
    // cannot flip a feasible instance to infeasible and keeps the final
    // reduced costs of the original columns valid for the Farkas vector.
    let mut blocked = vec![false; width - 1];

    loop {
        // Bland: entering column is the lowest-index eligible one.
        let entering = (0..n + m)
            .find(|&j| !blocked[j] && !basis.contains(&j) && cost[j].is_negative());
        let Some(enter) = entering else {
            break;
        };

        // Ratio test with Bland's tie-break on the leaving basis variable.
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((cur, best)) => {
                        ratio < *best || (ratio == *best && basis[i] < basis[*cur])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            // The phase-one objective is bounded below by zero, so an
            // unbounded ray cannot occur.
            unreachable!("phase-one simplex cannot be unbounded");
        };

        // Pivot.
        let pivot = t[pivot_row][enter].clone();
        for v in t[pivot_row].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..m {
            if i != pivot_row && !t[i][enter].is_zero() {
                let factor = t[i][enter].clone();
                for col in 0..width {
                    let delta = &factor * &t[pivot_row][col];
                    t[i][col] -= delta;
                }
            }
        }
        if !cost[enter].is_zero() {
            let factor = cost[enter].clone();
            for col in 0..width {
                let delta = &factor * &t[pivot_row][col];
                cost[col] -= delta;
            }
        }

        let leaving = basis[pivot_row];
        if leaving >= n {
            blocked[leaving] = true;
        }
        basis[pivot_row] = enter;
    }

    // cost[width-1] holds the negated objective value.
    if cost[width - 1].is_zero() {
        let mut x = vec![BigRational::zero(); n];
        for (i, &var) in basis.iter().enumerate() {
            if var < n {
                x[var] = t[i][width - 1].clone();
            } else {
                // A leftover artificial in the basis must sit at level zero.
                debug_assert!(t[i][width - 1].is_zero());
            }
        }
        debug_assert!(sys.is_solution(&x));
        Feasibility::Feasible(x)
    } else {
        // Simplex multipliers: pi_i = 1 - reduced cost of artificial i,
        // mapped back through the row sign flips.
        let one = BigRational::from_integer(1.into());
        let multipliers: Vec<BigRational> = (0..m)
            .map(|i| {
                let pi = &one - &cost[n + i];
                if flipped[i] {
                    -pi
                } else {
                    pi
                }
            })
            .collect();
        let cert = FarkasCertificate { multipliers };
        debug_assert!(cert.validates(sys));
        Feasibility::Infeasible(cert)
    }
}

/// Rank of a rational matrix by exact Gaussian elimination.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let nrows = m.len();
    let ncols = m[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..ncols {
        if row >= nrows {
            break;
        }
        let Some(pivot) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pivot);
        let p = m[row][col].clone();
        for c in col..ncols {
            m[row][c] /= &p;
        }
        for r in 0..nrows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..ncols {
                    let delta = &f * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        row += 1;
        rank += 1;
    }
    rank
}
