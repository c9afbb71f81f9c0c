//! Shared fixtures and an independent feasibility oracle for the
//! integration tests.
//!
//! The oracle decides `A x = b, x >= 0` by Gauss-Jordan reduction followed
//! by Fourier-Motzkin elimination of the free variables. The library solver
//! is a phase-one simplex, so agreement between the two is a genuine
//! cross-check rather than the same algorithm run twice. The equation
//! builders here are likewise written out from the defining sum families
//! instead of calling the library's builders.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use ame_core::exact::{parse_rational, ExactForm};
use ame_core::msa::MagicSolutionArray;
use ame_core::state::Amplitude;
use ame_core::{PureState, SystemShape};
use num::{BigInt, BigRational, One, Signed, Zero};

/// Parses a rational literal, panicking on malformed input.
pub fn rat(s: &str) -> BigRational {
    parse_rational(s).expect("fixture literal parses")
}

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The worked 3x4x5 array, frozen as literals independently of the library's
/// own copy.
pub fn worked_345_rows() -> Vec<Vec<BigRational>> {
    [
        ["12/40", "24/40", "4/40", "0"],
        ["0", "2/40", "20/40", "18/40"],
        ["18/40", "4/40", "6/40", "12/40"],
    ]
    .iter()
    .map(|row| row.iter().map(|s| rat(s)).collect())
    .collect()
}

/// The worked 3x4x5 array wrapped in the library type.
pub fn worked_345_array() -> MagicSolutionArray {
    MagicSolutionArray::new(3, 4, 5, worked_345_rows()).expect("fixture rows have shape 3x4")
}

/// Every (l, m, n) with `3 <= l < m < n <= m + l - 1` and `n <= 9`.
pub fn regime_instances() -> Vec<(usize, usize, usize)> {
    vec![
        (3, 4, 5),
        (3, 4, 6),
        (3, 5, 6),
        (3, 5, 7),
        (3, 6, 7),
        (3, 6, 8),
        (4, 5, 6),
        (4, 5, 7),
        (4, 5, 8),
        (4, 6, 7),
        (4, 6, 8),
        (4, 6, 9),
    ]
}

/// Row, column, and wrapped-diagonal balance equations for an `l x m` array
/// of squared amplitudes feeding an `l x m x n` tripartite state. Written
/// out directly from the three sum families; variable `(k, j)` is flattened
/// to `k * m + j`.
pub fn msa_equations(l: usize, m: usize, n: usize) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let vars = l * m;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for k in 0..l {
        let mut row = vec![BigRational::zero(); vars];
        for j in 0..m {
            row[k * m + j] = BigRational::one();
        }
        rows.push(row);
        rhs.push(BigRational::one());
    }
    for j in 0..m {
        let mut row = vec![BigRational::zero(); vars];
        for k in 0..l {
            row[k * m + j] = BigRational::one();
        }
        rows.push(row);
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
        rows.push(row);
        rhs.push(ratio(l, n));
    }
    (rows, rhs)
}

/// Marginal balance equations for a two-branch `2 x m x (m+n)` state with
/// branches `sum_j sqrt(u_j) |0, j, j>` and `sum_j sqrt(v_j) |1, j, j+n>`.
/// Column `j` holds `u_j` and column `m + j` holds `v_j`; each middle-party
/// level carries weight `2/m` and each third-party level `2/(m+n)`.
pub fn two_block_equations(m: usize, n: usize) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    assert!(n >= 1 && n <= m, "defined for 1 <= n <= m");
    let vars = 2 * m;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in 0..m {
        let mut row = vec![BigRational::zero(); vars];
        row[j] = BigRational::one();
        row[m + j] = BigRational::one();
        rows.push(row);
        rhs.push(ratio(2, m));
    }
    for level in 0..m + n {
        let mut row = vec![BigRational::zero(); vars];
        if level < m {
            row[level] = BigRational::one();
        }
        if level >= n && level - n < m {
            row[m + level - n] = BigRational::one();
        }
        rows.push(row);
        rhs.push(ratio(2, m + n));
    }
    (rows, rhs)
}

/// Decides feasibility of `A x = b, x >= 0` over exact rationals.
///
/// Gauss-Jordan reduction either exposes an inconsistent equation or
/// expresses the pivot variables through the free ones; nonnegativity of
/// all variables then becomes a pure inequality system over the free
/// variables, which Fourier-Motzkin elimination decides.
pub fn oracle_feasible(coeffs: &[Vec<BigRational>], rhs: &[BigRational]) -> bool {
    assert_eq!(coeffs.len(), rhs.len(), "one right-hand side per equation");
    let rows = coeffs.len();
    if rows == 0 {
        return true;
    }
    let cols = coeffs[0].len();
    let mut aug: Vec<Vec<BigRational>> = coeffs
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            assert_eq!(row.len(), cols, "equations share a variable count");
            let mut v = row.clone();
            v.push(b.clone());
            v
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(rank, p);
        let inv = aug[rank][col].clone();
        for c in col..=cols {
            aug[rank][c] = &aug[rank][c] / &inv;
        }
        for r in 0..rows {
            if r != rank && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in col..=cols {
                    let delta = &f * &aug[rank][c];
                    aug[r][c] = &aug[r][c] - &delta;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    if (rank..rows).any(|r| !aug[r][cols].is_zero()) {
        return false;
    }

    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut ineqs: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    for i in 0..rank {
        let row: Vec<BigRational> = free_cols.iter().map(|&f| aug[i][f].clone()).collect();
        ineqs.push((row, aug[i][cols].clone()));
    }
    for fi in 0..free_cols.len() {
        let mut row = vec![BigRational::zero(); free_cols.len()];
        row[fi] = -BigRational::one();
        ineqs.push((row, BigRational::zero()));
    }
    fourier_motzkin_feasible(ineqs, free_cols.len())
}

/// Feasibility of `C t <= e`. Each round eliminates the variable whose
/// positive and negative occurrence counts give the fewest combined rows,
/// which keeps structured systems from blowing up.
fn fourier_motzkin_feasible(
    mut rows: Vec<(Vec<BigRational>, BigRational)>,
    mut width: usize,
) -> bool {
    loop {
        if rows
            .iter()
            .any(|(c, e)| e.is_negative() && c.iter().all(|v| v.is_zero()))
        {
            return false;
        }
        if width == 0 {
            return true;
        }

        let mut var = 0;
        let mut best = usize::MAX;
        for v in 0..width {
            let pos = rows.iter().filter(|(c, _)| c[v].is_positive()).count();
            let neg = rows.iter().filter(|(c, _)| c[v].is_negative()).count();
            let cost = pos * neg;
            if cost < best {
                best = cost;
                var = v;
            }
            if best == 0 {
                break;
            }
        }

        let mut positive = Vec::new();
        let mut negative = Vec::new();
        let mut reduced: BTreeMap<Vec<BigRational>, BigRational> = BTreeMap::new();
        for (mut c, e) in rows {
            let lead = c.remove(var);
            match lead.cmp(&BigRational::zero()) {
                Ordering::Greater => positive.push((lead, c, e)),
                Ordering::Less => negative.push((lead, c, e)),
                Ordering::Equal => insert_tightest(&mut reduced, c, e),
            }
        }
        for (pl, pc, pe) in &positive {
            for (nl, nc, ne) in &negative {
                let neg_scale = -nl;
                let combined: Vec<BigRational> = pc
                    .iter()
                    .zip(nc)
                    .map(|(a, b)| a / pl + b / &neg_scale)
                    .collect();
                let bound = pe / pl + ne / &neg_scale;
                insert_tightest(&mut reduced, combined, bound);
            }
        }
        rows = reduced.into_iter().collect();
        assert!(
            rows.len() <= 100_000,
            "inequality count exploded during elimination"
        );
        width -= 1;
    }
}

/// Normalizes a row by its largest absolute coefficient and keeps the
/// tightest bound per direction.
fn insert_tightest(
    map: &mut BTreeMap<Vec<BigRational>, BigRational>,
    mut coeffs: Vec<BigRational>,
    mut bound: BigRational,
) {
    let scale = coeffs
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigRational::zero);
    if !scale.is_zero() {
        for c in &mut coeffs {
            *c = &*c / &scale;
        }
        bound = &bound / &scale;
    }
    match map.entry(coeffs) {
        Entry::Occupied(mut slot) => {
            if bound < *slot.get() {
                slot.insert(bound);
            }
        }
        Entry::Vacant(slot) => {
            slot.insert(bound);
        }
    }
}

/// Five-qubit ring graph state: 32 terms with amplitude
/// `(1/sqrt(32)) * (-1)^(sum_i b_i b_{i+1 mod 5})`. Its marginals are
/// maximally mixed on every one- and two-party subset.
pub fn ring_graph_state() -> PureState {
    let shape = SystemShape::new(vec![2; 5]).expect("five qubits");
    let mut terms = Vec::with_capacity(32);
    for bits in 0..32u32 {
        let b: Vec<usize> = (0..5).map(|i| ((bits >> i) & 1) as usize).collect();
        let parity: usize = (0..5).map(|i| b[i] * b[(i + 1) % 5]).sum();
        let form = ExactForm::root_of_unity(rat("1/32"), (parity % 2) as i64, 2)
            .expect("valid amplitude");
        terms.push((b, Amplitude::exact(form)));
    }
    PureState::new(shape, terms).expect("graph state is normalized")
}
