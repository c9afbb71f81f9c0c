//! Marginal-based uniformity verification and projective steering.
//!
//! A pure state is `k`-uniform when every `k`-party reduced density matrix
//! equals the maximally mixed state on those parties. A `(2n+1)`-party state
//! is absolutely maximally entangled (AME) when it is `n`-uniform; for an
//! even party count an AME state additionally requires all local dimensions
//! equal, since no heterogeneous even-party state can be maximally mixed on
//! every balanced bipartition.

use itertools::Itertools;
use num::rational::BigRational;
use num::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::shape::SystemShape;
use crate::state::PureState;

/// Default entrywise tolerance for marginal deviations.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Deviation of one reduced density matrix from maximally mixed.
#[derive(Clone, Debug, Serialize)]
pub struct MarginalReport {
    /// The traced-onto party subset, ascending.
    pub subset: Vec<usize>,
    /// Largest absolute entrywise deviation from `I/D`.
    pub deviation: f64,
    /// Trace distance `0.5 * ||rho - I/D||_1`.
    pub trace_distance: f64,
    /// Whether `deviation <= tolerance`.
    pub passed: bool,
}

/// Outcome of a `k`-uniformity check.
#[derive(Clone, Debug, Serialize)]
pub struct UniformityVerdict {
    pub k: usize,
    pub tolerance: f64,
    pub is_k_uniform: bool,
    /// True when `k = floor(parties/2)`, the check passed, and the shape
    /// admits the AME reading (odd party count, or even and homogeneous).
    pub is_ame: bool,
    /// One report per `k`-subset, in lexicographic subset order.
    pub reports: Vec<MarginalReport>,
}

impl UniformityVerdict {
    /// Largest marginal deviation across all subsets.
    pub fn worst_deviation(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.deviation)
            .fold(0.0, f64::max)
    }
}

/// Checks every `k`-party marginal against the maximally mixed state.
///
/// Requires `1 <= k <= parties - 1`. Subsets are enumerated in lexicographic
/// order and each reduced matrix is formed, compared, and dropped before the
/// next one, so peak memory is one `D x D` matrix.
pub fn verify_uniform(state: &PureState, k: usize, tolerance: f64) -> Result<UniformityVerdict> {
    let parties = state.shape().party_count();
    if k == 0 || k >= parties {
        return Err(Error::ParameterDomain(format!(
            "uniformity order k = {k} must satisfy 1 <= k <= {}",
            parties.saturating_sub(1)
        )));
    }
    let mut reports = Vec::new();
    let mut all_passed = true;
    for subset in (0..parties).combinations(k) {
        let rho = state.partial_trace(&subset)?;
        let deviation = rho.max_abs_deviation_from_maximally_mixed();
        let trace_distance = rho.trace_distance_from_maximally_mixed();
        let passed = deviation <= tolerance;
        all_passed &= passed;
        reports.push(MarginalReport {
            subset,
            deviation,
            trace_distance,
            passed,
        });
    }
    let ame_order = k == parties / 2;
    let ame_shape = parties % 2 == 1 || !state.shape().is_heterogeneous();
    Ok(UniformityVerdict {
        k,
        tolerance,
        is_k_uniform: all_passed,
        is_ame: all_passed && ame_order && ame_shape,
        reports,
    })
}

/// Dimension admissibility of `k`-uniformity for a shape.
#[derive(Clone, Debug, Serialize)]
pub struct PrecheckReport {
    pub k: usize,
    pub admissible: bool,
    /// First (lexicographic) `k`-subset whose dimension product exceeds its
    /// complement's, when inadmissible.
    pub witness: Option<Vec<usize>>,
}

/// Necessary condition for `k`-uniformity: every `k`-subset's dimension
/// product must not exceed its complement's.
pub fn dimension_precheck(shape: &SystemShape, k: usize) -> Result<PrecheckReport> {
    let parties = shape.party_count();
    if k == 0 || k >= parties {
        return Err(Error::ParameterDomain(format!(
            "uniformity order k = {k} must satisfy 1 <= k <= {}",
            parties.saturating_sub(1)
        )));
    }
    let total = shape.total_dim();
    for subset in (0..parties).combinations(k) {
        let d = shape.subset_dim(&subset);
        // d > total/d without integer division pitfalls:
        if d * d > total {
            return Ok(PrecheckReport {
                k,
                admissible: false,
                witness: Some(subset),
            });
        }
    }
    Ok(PrecheckReport {
        k,
        admissible: true,
        witness: None,
    })
}

/// Result of a projective measurement on one party.
#[derive(Clone, Debug)]
pub struct SteerOutcome {
    /// Normalized conditional state on the remaining parties, in order.
    pub state: PureState,
    /// Outcome probability.
    pub probability: f64,
    /// Exact probability when every amplitude carries an exact annotation.
    pub probability_exact: Option<BigRational>,
}

/// Projects `party` onto the computational-basis `outcome` and returns the
/// steered state of the remaining parties with the outcome probability.
pub fn steer(state: &PureState, party: usize, outcome: usize) -> Result<SteerOutcome> {
    let shape = state.shape();
    let parties = shape.party_count();
    if parties < 2 {
        return Err(Error::InvalidSubset(
            "steering requires at least two parties".into(),
        ));
    }
    if party >= parties {
        return Err(Error::IndexOutOfRange {
            party,
            index: party,
            dim: parties,
        });
    }
    if outcome >= shape.dim(party) {
        return Err(Error::IndexOutOfRange {
            party,
            index: outcome,
            dim: shape.dim(party),
        });
    }

    let remaining_dims: Vec<usize> = shape
        .dims()
        .iter()
        .enumerate()
        .filter(|(p, _)| *p != party)
        .map(|(_, &d)| d)
        .collect();
    let remaining_shape = SystemShape::new(remaining_dims)?;

    let mut kept = Vec::new();
    let mut kept_norm_sq = 0.0;
    let mut kept_exact = Some(BigRational::zero());
    for (idx, amp) in state.terms() {
        if idx[party] != outcome {
            continue;
        }
        kept_norm_sq += amp.squared_modulus();
        kept_exact = match (kept_exact, amp.exact_squared_modulus()) {
            (Some(acc), Some(r)) => Some(acc + r),
            _ => None,
        };
        let reduced: Vec<usize> = idx
            .iter()
            .enumerate()
            .filter(|(p, _)| *p != party)
            .map(|(_, &i)| i)
            .collect();
        kept.push((reduced, amp.clone()));
    }
    if kept.is_empty() {
        return Err(Error::NullEvent { party, outcome });
    }

    let conditional = PureState::new_unnormalized(remaining_shape, kept)?.normalized();
    let probability = kept_norm_sq / state.norm_sq();
    let probability_exact = match (kept_exact, state.exact_norm_sq()) {
        (Some(num), Some(den)) if !den.is_zero() => Some(num / den),
        _ => None,
    };
    Ok(SteerOutcome {
        state: conditional,
        probability,
        probability_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_rational, ExactForm};
    use crate::state::Amplitude;
    use num_complex::Complex64;

    fn ghz(d: usize, parties: usize) -> PureState {
        let shape = SystemShape::new(vec![d; parties]).unwrap();
        let r = parse_rational(&format!("1/{d}")).unwrap();
        let terms = (0..d)
            .map(|j| {
                (
                    vec![j; parties],
                    Amplitude::exact(ExactForm::positive_sqrt(r.clone()).unwrap()),
                )
            })
            .collect();
        PureState::new(shape, terms).unwrap()
    }

    #[test]
    fn ghz_is_one_uniform_but_not_two_uniform() {
        let g = ghz(2, 3);
        let v1 = verify_uniform(&g, 1, DEFAULT_TOLERANCE).unwrap();
        assert!(v1.is_k_uniform);
        assert!(v1.is_ame);
        assert_eq!(v1.reports.len(), 3);
        let v2 = verify_uniform(&g, 2, DEFAULT_TOLERANCE).unwrap();
        assert!(!v2.is_k_uniform);
        assert!(!v2.is_ame);
        // A two-party marginal of GHZ is diag(1/2, 0, 0, 1/2): entrywise
        // deviation from I/4 is exactly 1/4.
        assert!((v2.worst_deviation() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn k_range_is_enforced() {
        let g = ghz(2, 3);
        assert!(verify_uniform(&g, 0, 1e-12).is_err());
        assert!(verify_uniform(&g, 3, 1e-12).is_err());
    }

    #[test]
    fn subset_enumeration_is_lexicographic() {
        let g = ghz(2, 4);
        let v = verify_uniform(&g, 2, DEFAULT_TOLERANCE).unwrap();
        let subsets: Vec<Vec<usize>> = v.reports.iter().map(|r| r.subset.clone()).collect();
        assert_eq!(
            subsets,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn heterogeneous_even_party_count_never_reads_as_ame() {
        // 2x2x2x8 admits no AME reading even if a 2-uniform state existed.
        let shape = SystemShape::new(vec![2, 2, 2, 8]).unwrap();
        let terms = (0..2usize)
            .flat_map(|a| (0..2usize).map(move |b| (a, b)))
            .map(|(a, b)| {
                (
                    vec![a, b, (a + b) % 2, 4 * a + 2 * b],
                    Amplitude::numeric(Complex64::new(0.5, 0.0)),
                )
            })
            .collect();
        let s = PureState::new(shape, terms).unwrap();
        let v = verify_uniform(&s, 2, DEFAULT_TOLERANCE).unwrap();
        assert!(!v.is_ame);
    }

    #[test]
    fn precheck_finds_offending_subset() {
        let shape = SystemShape::new(vec![2, 2, 5]).unwrap();
        let report = dimension_precheck(&shape, 1).unwrap();
        assert!(!report.admissible);
        assert_eq!(report.witness, Some(vec![2]));

        let ok = dimension_precheck(&SystemShape::new(vec![3, 4, 5]).unwrap(), 1).unwrap();
        assert!(ok.admissible);
        assert!(ok.witness.is_none());
    }

    #[test]
    fn steering_ghz_collapses_the_rest() {
        let g = ghz(2, 3);
        let out = steer(&g, 0, 1).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-15);
        assert_eq!(
            out.probability_exact.unwrap(),
            parse_rational("1/2").unwrap()
        );
        assert_eq!(out.state.shape().dims(), &[2, 2]);
        assert!((out.state.amplitude(&[1, 1]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn steering_errors() {
        let g = ghz(2, 3);
        assert!(matches!(
            steer(&g, 0, 5),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(steer(&g, 7, 0), Err(Error::IndexOutOfRange { .. })));
        // GHZ has no |0>|1>... component: outcome 1 after projecting party 0
        // onto 0 is fine, but a mixed index pattern is unreachable.
        let shape = SystemShape::new(vec![2, 2]).unwrap();
        let s = PureState::new(
            shape,
            vec![(vec![0, 0], Amplitude::numeric(Complex64::new(1.0, 0.0)))],
        )
        .unwrap();
        assert!(matches!(
            steer(&s, 0, 1),
            Err(Error::NullEvent { party: 0, outcome: 1 })
        ));
    }

    #[test]
    fn steering_probabilities_sum_to_one() {
        let g = ghz(3, 3);
        let mut total = 0.0;
        for outcome in 0..3 {
            total += steer(&g, 1, outcome).unwrap().probability;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }
}
