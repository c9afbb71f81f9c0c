//! Irreducibility classification for AME systems.
//!
//! An AME state is reducible when some local unitary turns it into a tensor
//! product of two AME states on the same parties with smaller local
//! dimensions, so each dimension factors as d_i = p_i·q_i across the two
//! factors. Number-theoretic conditions on the d_i alone can rule every such
//! factorization out:
//!
//! - tripartite (p, m, n) with p prime and gcd(m, n) = 1;
//! - exactly two prime dimensions p, q and, for tripartite systems, third
//!   dimension below pq (there the bound is tight), or for five or more
//!   parties some other dimension different from pq;
//! - at least three prime dimensions.
//!
//! When no condition fires, [`classify_system`] stays agnostic and returns
//! the factorizations that survive the counting filters: a factor vector may
//! contain at most one trivial dimension (two would drop its party count),
//! prime dimensions must land whole on one side, two primes on opposite
//! sides, and each side must pass the uniformity dimension precheck.
//! Deciding reducibility in general is out of reach; the three-valued
//! verdict is deliberate.
//!
//! For the 2×4×4 system, which admits both reducible and irreducible AME
//! states, [`certify_244_irreducible`] decides a given two-block state by
//! the minimum Schmidt rank over the pencil of its blocks: any product form
//! would place a Schmidt-rank-two vector in their span.

use serde::Serialize;

pub use crate::pencil::{pencil_min_schmidt_rank, pencil_min_schmidt_rank_seeded};

use crate::error::{Error, Result};
use crate::shape::SystemShape;
use crate::state::{Amplitude, PureState};
use crate::verifier::{dimension_precheck, verify_uniform, DEFAULT_TOLERANCE};

/// One candidate splitting: per-party dimensions of the two would-be factors.
pub type Factorization = (Vec<usize>, Vec<usize>);

/// Which argument certified a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassificationRule {
    /// Tripartite with one prime dimension and the other two coprime.
    PrimeCoprime,
    /// Exactly two prime dimensions with a dimension bound on the rest.
    TwoPrimesBound,
    /// At least three prime dimensions.
    ThreePrimes,
    /// An explicit product of two smaller AME states.
    FactorizationWitness,
    /// A pencil minimum Schmidt rank excluding every product form.
    PencilWitness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReducibilityStatus {
    IrreducibleCertified,
    ReducibleWitnessed,
    Unknown,
}

/// Outcome of [`classify_system`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducibilityVerdict {
    pub status: ReducibilityStatus,
    /// Rule behind a certified status; absent when unknown.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<ClassificationRule>,
    /// Admissible factorizations when the status is unknown.
    pub factorizations: Vec<Factorization>,
}

/// An explicit reducibility witness: two states whose party-wise tensor
/// product is a uniform state on the target shape.
#[derive(Debug, Clone)]
pub struct ReducibleWitness {
    pub factorization: Factorization,
    pub left: PureState,
    pub right: PureState,
    pub product: PureState,
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Classifies a system shape as certainly irreducible or unknown.
///
/// Certification means every AME state on the shape is irreducible. The
/// converse direction needs a concrete state, so this function never returns
/// a reducible verdict; see [`reducible_witness`] for that side.
pub fn classify_system(shape: &SystemShape) -> Result<ReducibilityVerdict> {
    let dims = shape.dims();
    let parties = dims.len();
    if parties % 2 == 0 {
        return Err(Error::NotApplicable(format!(
            "no AME state exists on {parties} heterogeneous parties; classification needs an odd party count"
        )));
    }
    if parties < 3 {
        return Err(Error::NotApplicable(
            "classification needs at least three parties".into(),
        ));
    }
    let primes: Vec<usize> = (0..parties).filter(|&i| is_prime(dims[i])).collect();

    if primes.len() >= 3 {
        return Ok(certified(ClassificationRule::ThreePrimes));
    }
    if parties == 3 {
        let coprime_pair = (0..3).any(|i| {
            let others: Vec<usize> = (0..3).filter(|&j| j != i).map(|j| dims[j]).collect();
            is_prime(dims[i]) && num::integer::gcd(others[0], others[1]) == 1
        });
        if coprime_pair {
            return Ok(certified(ClassificationRule::PrimeCoprime));
        }
    }
    if primes.len() == 2 {
        let pq = dims[primes[0]] * dims[primes[1]];
        let rest: Vec<usize> = (0..parties)
            .filter(|i| !primes.contains(i))
            .map(|i| dims[i])
            .collect();
        let bound_holds = if parties == 3 {
            rest[0] < pq
        } else {
            rest.iter().any(|&d| d != pq)
        };
        if bound_holds {
            return Ok(certified(ClassificationRule::TwoPrimesBound));
        }
    }
    Ok(ReducibilityVerdict {
        status: ReducibilityStatus::Unknown,
        reason: None,
        factorizations: admissible_factorizations(shape)?,
    })
}

fn certified(rule: ClassificationRule) -> ReducibilityVerdict {
    ReducibilityVerdict {
        status: ReducibilityStatus::IrreducibleCertified,
        reason: Some(rule),
        factorizations: Vec::new(),
    }
}

/// Enumerates the factorizations d_i = p_i·q_i that survive the counting
/// filters, as canonically ordered deduplicated pairs.
pub fn admissible_factorizations(shape: &SystemShape) -> Result<Vec<Factorization>> {
    let dims = shape.dims();
    let parties = dims.len();
    let prime_positions: Vec<usize> = (0..parties).filter(|&i| is_prime(dims[i])).collect();
    if prime_positions.len() >= 3 {
        return Ok(Vec::new());
    }
    let k = parties / 2;

    let divisor_pairs: Vec<Vec<(usize, usize)>> = dims
        .iter()
        .map(|&d| (1..=d).filter(|a| d % a == 0).map(|a| (a, d / a)).collect())
        .collect();

    let mut found = std::collections::BTreeSet::new();
    let mut choice = vec![0usize; parties];
    'outer: loop {
        let left: Vec<usize> = (0..parties).map(|i| divisor_pairs[i][choice[i]].0).collect();
        let right: Vec<usize> = (0..parties).map(|i| divisor_pairs[i][choice[i]].1).collect();
        if admits(&left, &right, dims, &prime_positions, k)? {
            let pair = if left <= right {
                (left, right)
            } else {
                (right, left)
            };
            found.insert(pair);
        }
        for i in 0..parties {
            choice[i] += 1;
            if choice[i] < divisor_pairs[i].len() {
                continue 'outer;
            }
            choice[i] = 0;
        }
        break;
    }
    Ok(found.into_iter().collect())
}

fn admits(
    left: &[usize],
    right: &[usize],
    dims: &[usize],
    prime_positions: &[usize],
    k: usize,
) -> Result<bool> {
    let ones = |side: &[usize]| side.iter().filter(|&&d| d == 1).count();
    match prime_positions {
        [] => {
            if ones(left) > 1 || ones(right) > 1 {
                return Ok(false);
            }
        }
        [t] => {
            let whole_elsewhere = (0..dims.len())
                .filter(|i| i != t)
                .all(|i| left[i] > 1 && right[i] > 1);
            if !whole_elsewhere {
                return Ok(false);
            }
        }
        [t1, t2] => {
            if (left[*t1] == 1) == (left[*t2] == 1) {
                return Ok(false);
            }
            let whole_elsewhere = (0..dims.len())
                .filter(|i| i != t1 && i != t2)
                .all(|i| left[i] > 1 && right[i] > 1);
            if !whole_elsewhere {
                return Ok(false);
            }
        }
        _ => return Ok(false),
    }
    for side in [left, right] {
        if side.iter().product::<usize>() <= 1 {
            return Ok(false);
        }
        let side_shape = SystemShape::new(side.to_vec())?;
        if !dimension_precheck(&side_shape, k)?.admissible {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Attempts to realize an admissible factorization of a tripartite shape by
/// explicit constructor outputs, returning the product state on success.
pub fn reducible_witness(shape: &SystemShape) -> Result<Option<ReducibleWitness>> {
    let parties = shape.party_count();
    if parties % 2 == 0 {
        return Err(Error::NotApplicable(
            "reducibility witnesses need an odd party count".into(),
        ));
    }
    if parties != 3 {
        return Ok(None);
    }
    for (left_dims, right_dims) in admissible_factorizations(shape)? {
        let Some(left) = tripartite_ame_for_dims(&left_dims) else {
            continue;
        };
        let Some(right) = tripartite_ame_for_dims(&right_dims) else {
            continue;
        };
        let product = left.tensor_product(&right, &[(0, 0), (1, 1), (2, 2)])?;
        let verdict = verify_uniform(&product, 1, DEFAULT_TOLERANCE)?;
        if !verdict.is_k_uniform {
            return Err(Error::Internal(
                "product of uniform factors failed re-verification".into(),
            ));
        }
        return Ok(Some(ReducibleWitness {
            factorization: (left_dims, right_dims),
            left,
            right,
            product,
        }));
    }
    Ok(None)
}

/// Builds some tripartite state with every single-party marginal maximally
/// mixed on the given dimensions, when one of the known constructions fits.
fn tripartite_ame_for_dims(dims: &[usize]) -> Option<PureState> {
    use crate::constructors::{bell_state, construct_2mmn, construct_lmkm, construct_mmn};

    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by_key(|&i| dims[i]);
    let sorted: Vec<usize> = order.iter().map(|&i| dims[i]).collect();
    let (a, b, c) = (sorted[0], sorted[1], sorted[2]);

    let built = if a == 1 {
        if b == c {
            let bell = bell_state(b).ok()?;
            let shape = SystemShape::new(vec![1, b, c]).ok()?;
            let terms = bell
                .terms()
                .map(|(idx, amp)| (vec![0, idx[0], idx[1]], amp.clone()))
                .collect();
            Some(PureState::new(shape, terms).ok()?)
        } else {
            None
        }
    } else if a == b {
        construct_mmn(a, c).ok()
    } else if b == c {
        construct_mmn(b, a).ok().map(|s| {
            s.permute_parties(&[2, 0, 1])
                .expect("party permutation of a fresh state")
        })
    } else if a == 2 {
        construct_2mmn(b, c - b).ok()
    } else if c % b == 0 {
        construct_lmkm(a, b, c / b).ok()
    } else {
        None
    }?;

    let mut inverse = vec![0usize; 3];
    for (position, &party) in order.iter().enumerate() {
        inverse[party] = position;
    }
    let state = built.permute_parties(&inverse).ok()?;
    let verdict = verify_uniform(&state, 1, DEFAULT_TOLERANCE).ok()?;
    verdict.is_k_uniform.then_some(state)
}

/// Decides irreducibility for a two-block 2×4×4 state.
///
/// Writing the state as |0⟩|x⟩ + |1⟩|y⟩, a product form would force a
/// Schmidt-rank-two vector inside span{|x⟩, |y⟩}, so the state is certified
/// irreducible when it is 1-uniform and the pencil of its blocks never drops
/// below Schmidt rank three.
pub fn certify_244_irreducible(state: &PureState) -> Result<bool> {
    if state.shape().dims() != [2, 4, 4] {
        return Err(Error::NotApplicable(format!(
            "the two-block certificate is specific to 2x4x4, got {}",
            state.shape()
        )));
    }
    let block_shape = SystemShape::new(vec![4, 4])?;
    let mut blocks: [Vec<(Vec<usize>, Amplitude)>; 2] = [Vec::new(), Vec::new()];
    for (index, amp) in state.terms() {
        blocks[index[0]].push((vec![index[1], index[2]], amp.clone()));
    }
    let [x_terms, y_terms] = blocks;
    if x_terms.is_empty() || y_terms.is_empty() {
        return Err(Error::PreconditionFailed(
            "state must have support on both values of the first party".into(),
        ));
    }
    let verdict = verify_uniform(state, 1, DEFAULT_TOLERANCE)?;
    if !verdict.is_k_uniform {
        return Ok(false);
    }
    let x = PureState::new_unnormalized(block_shape.clone(), x_terms)?.normalized();
    let y = PureState::new_unnormalized(block_shape, y_terms)?.normalized();
    Ok(pencil_min_schmidt_rank(&x, &y)? >= 3)
}
