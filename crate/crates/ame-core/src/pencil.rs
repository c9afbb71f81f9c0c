//! Minimum Schmidt rank over a pencil of two bipartite states.
//!
//! For bipartite |x⟩ and |y⟩ with coefficient matrices X and Y, the member
//! α|x⟩ + β|y⟩ of the pencil has Schmidt rank rank(αX + βY), which is
//! invariant under scaling, so the minimum over all (α, β) ≠ (0, 0) equals
//! the minimum of rank(Y) and rank(X + λY) over complex λ. The rank takes a
//! generic value R away from the common zero set of the R×R minors, and
//! every exceptional λ is a root of any single minor that is nonzero at one
//! generic point. The search below finds R and a pivot submatrix by probing
//! distinct integer values of λ, interpolates that minor as a degree-R
//! polynomial, and takes the minimum rank across its roots together with
//! rank(X) and rank(Y).
//!
//! Roots are snapped to nearby Gaussian rationals and, when both inputs
//! carry exact amplitudes inside Q(i), the rank at a snapped root is
//! computed by exact elimination, so a certified rank drop never rests on a
//! floating-point threshold.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::{BigInt, BigRational};

use crate::error::{Error, Result};
use crate::exact::GaussianRational;
use crate::isometry::CoefficientMatrixView;
use crate::state::PureState;

const RANK_EPS_RELATIVE: f64 = 1e-9;
const COEFF_TRIM_RELATIVE: f64 = 1e-12;
const SNAP_TOLERANCE: f64 = 1e-7;
const SNAP_MAX_DENOMINATOR: i64 = 64;

/// Minimum Schmidt rank over the pencil spanned by two bipartite states.
pub fn pencil_min_schmidt_rank(x: &PureState, y: &PureState) -> Result<usize> {
    pencil_min_schmidt_rank_seeded(x, y, 0)
}

/// Seeded variant of [`pencil_min_schmidt_rank`]; the seed only moves the
/// integer probe points, never the mathematical answer.
pub fn pencil_min_schmidt_rank_seeded(x: &PureState, y: &PureState, seed: u64) -> Result<usize> {
    if x.shape().party_count() != 2 || y.shape().party_count() != 2 {
        return Err(Error::NotApplicable(
            "the pencil is defined for bipartite states".into(),
        ));
    }
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch(format!(
            "pencil endpoints live on {} and {}",
            x.shape(),
            y.shape()
        )));
    }
    let xx = overlap(x, x).re;
    let yy = overlap(y, y).re;
    let xy = overlap(x, y);
    let gram_det = xx * yy - xy.norm_sqr();
    if gram_det <= 1e-12 * xx * yy {
        return Err(Error::ParameterDomain(
            "pencil endpoints are linearly dependent".into(),
        ));
    }

    let xm = CoefficientMatrixView::of_state(x, &[1])?.matrix().clone();
    let ym = CoefficientMatrixView::of_state(y, &[1])?.matrix().clone();
    let exact = match (exact_matrix(x), exact_matrix(y)) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    };
    let rank_at_exact = |g: &GaussianRational| {
        exact
            .as_ref()
            .map(|(ex, ey)| exact_rank(exact_pencil_point(ex, ey, g)))
    };

    let r_cap = xm.nrows().min(xm.ncols());
    let mut probes = BTreeSet::new();
    let mut rng = seed;
    while probes.len() < r_cap + 1 {
        probes.insert((splitmix64(&mut rng) % 4096) as i64 + 1);
    }
    let mut normal_rank = 0;
    let mut best_lambda = 0i64;
    for &lam in &probes {
        let rank = match rank_at_exact(&GaussianRational::from_integer(lam)) {
            Some(rank) => rank,
            None => numeric_rank(&pencil_point(&xm, &ym, Complex64::new(lam as f64, 0.0))),
        };
        if rank > normal_rank {
            normal_rank = rank;
            best_lambda = lam;
        }
    }

    let rank_x = match rank_at_exact(&GaussianRational::zero()) {
        Some(rank) => rank,
        None => numeric_rank(&xm),
    };
    let rank_y = match exact.as_ref() {
        Some((_, ey)) => exact_rank(ey.clone()),
        None => numeric_rank(&ym),
    };
    let mut min_rank = normal_rank.min(rank_x).min(rank_y);

    let at_best = pencil_point(&xm, &ym, Complex64::new(best_lambda as f64, 0.0));
    let (rows, cols) = pivot_submatrix(&at_best, normal_rank);
    if rows.len() == normal_rank && normal_rank >= 1 {
        let values: Vec<Complex64> = (0..=normal_rank)
            .map(|node| {
                let m = pencil_point(&xm, &ym, Complex64::new(node as f64, 0.0));
                let sub = DMatrix::from_fn(normal_rank, normal_rank, |a, b| {
                    m[(rows[a], cols[b])]
                });
                sub.determinant()
            })
            .collect();
        let coeffs = trim_coefficients(interpolate_coefficients(&values));
        for root in polynomial_roots(&coeffs) {
            let rank = match snap_gaussian(root).and_then(|g| rank_at_exact(&g)) {
                Some(rank) => rank,
                None => numeric_rank(&pencil_point(&xm, &ym, root)),
            };
            min_rank = min_rank.min(rank);
        }
    }
    Ok(min_rank)
}

fn overlap(a: &PureState, b: &PureState) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (index, amp) in a.terms() {
        acc += amp.value().conj() * b.amplitude(index);
    }
    acc
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn pencil_point(
    xm: &DMatrix<Complex64>,
    ym: &DMatrix<Complex64>,
    lambda: Complex64,
) -> DMatrix<Complex64> {
    xm + ym.map(|v| v * lambda)
}

fn numeric_rank(m: &DMatrix<Complex64>) -> usize {
    let svd = m.clone().svd(false, false);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if sigma_max <= 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > RANK_EPS_RELATIVE * sigma_max)
        .count()
}

fn exact_matrix(state: &PureState) -> Option<Vec<Vec<GaussianRational>>> {
    let d0 = state.shape().dim(0);
    let d1 = state.shape().dim(1);
    let mut m = vec![vec![GaussianRational::zero(); d1]; d0];
    for (index, amp) in state.terms() {
        m[index[0]][index[1]] = amp.exact_form()?.as_gaussian()?;
    }
    Some(m)
}

fn exact_pencil_point(
    xm: &[Vec<GaussianRational>],
    ym: &[Vec<GaussianRational>],
    lambda: &GaussianRational,
) -> Vec<Vec<GaussianRational>> {
    xm.iter()
        .zip(ym)
        .map(|(xr, yr)| {
            xr.iter()
                .zip(yr)
                .map(|(a, b)| a.add(&b.mul(lambda)))
                .collect()
        })
        .collect()
}

fn exact_rank(mut m: Vec<Vec<GaussianRational>>) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let Some(pivot_row) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pivot_row);
        let pivot = m[row][col].clone();
        for r in row + 1..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].div(&pivot).expect("pivot is nonzero");
            for c in col..cols {
                let sub = factor.mul(&m[row][c]);
                m[r][c] = m[r][c].sub(&sub);
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Greedy full-pivot elimination choosing `target_rank` pivot positions.
fn pivot_submatrix(m: &DMatrix<Complex64>, target_rank: usize) -> (Vec<usize>, Vec<usize>) {
    let mut work = m.clone();
    let (nr, nc) = (work.nrows(), work.ncols());
    let mut used_rows = vec![false; nr];
    let mut used_cols = vec![false; nc];
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    let scale = work.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
    for _ in 0..target_rank {
        let mut best = (0, 0, 0.0f64);
        for i in (0..nr).filter(|&i| !used_rows[i]) {
            for j in (0..nc).filter(|&j| !used_cols[j]) {
                let v = work[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= 1e-12 * scale {
            break;
        }
        let (pi, pj, _) = best;
        used_rows[pi] = true;
        used_cols[pj] = true;
        rows.push(pi);
        cols.push(pj);
        let pivot = work[(pi, pj)];
        for i in (0..nr).filter(|&i| !used_rows[i]) {
            let factor = work[(i, pj)] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in (0..nc).filter(|&j| !used_cols[j]) {
                let sub = factor * work[(pi, j)];
                work[(i, j)] -= sub;
            }
        }
    }
    rows.sort_unstable();
    cols.sort_unstable();
    (rows, cols)
}

/// Coefficients (low to high) of the polynomial taking `values` at nodes
/// 0, 1, ..., values.len() - 1.
fn interpolate_coefficients(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (k, &vk) in values.iter().enumerate() {
        let mut basis = vec![Complex64::new(1.0, 0.0)];
        let mut denom = 1.0f64;
        for j in (0..n).filter(|&j| j != k) {
            let mut next = vec![Complex64::new(0.0, 0.0); basis.len() + 1];
            for (p, &c) in basis.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= c * (j as f64);
            }
            basis = next;
            denom *= k as f64 - j as f64;
        }
        for (p, &c) in basis.iter().enumerate() {
            coeffs[p] += vk * c / denom;
        }
    }
    coeffs
}

fn trim_coefficients(mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while let Some(last) = coeffs.last() {
        if last.norm() <= COEFF_TRIM_RELATIVE * max {
            coeffs.pop();
        } else {
            break;
        }
    }
    coeffs
}

/// Durand-Kerner root finder; `coeffs` run low to high with a nonzero lead.
fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    if coeffs.len() < 2 {
        return Vec::new();
    }
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| Complex64::new(0.4, 0.9).powu(k as u32 + 1))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in (0..degree).filter(|&j| j != i) {
                denom *= roots[i] - roots[j];
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(f64::MIN_POSITIVE, 0.0);
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-13 {
            break;
        }
    }
    roots
}

fn snap_rational(v: f64) -> Option<BigRational> {
    if !v.is_finite() {
        return None;
    }
    for den in 1..=SNAP_MAX_DENOMINATOR {
        let num = (v * den as f64).round();
        if num.abs() > 1e15 {
            return None;
        }
        if (v - num / den as f64).abs() <= SNAP_TOLERANCE {
            return Some(BigRational::new(
                BigInt::from(num as i64),
                BigInt::from(den),
            ));
        }
    }
    None
}

fn snap_gaussian(z: Complex64) -> Option<GaussianRational> {
    Some(GaussianRational::new(
        snap_rational(z.re)?,
        snap_rational(z.im)?,
    ))
}
