//! Building wider uniform states out of existing AME states.
//!
//! Two operations grow the party count. Splitting rewrites one party of a
//! 2n-party AME state as two subsystems of dimensions d_A·d_B, which leaves
//! every k-party marginal of the refined system maximally mixed and so
//! yields a (2n+1)-party AME state. Merging takes AME states |ψ⟩ on
//! (A, C₁, …) and |φ⟩ on (B, C₂, …), pairs up all parties except A and B,
//! and fuses each pair into one party. The reduced state on the fused
//! parties is a tensor product σ ⊗ γ of marginals that are each maximally
//! mixed, so the merge of two 2n-party AME states is a (2n+1)-party AME
//! state, while the merge of two (2n+1)-party AME states is a (2n+2)-party
//! state that is n-uniform but cannot be AME: its (n+1)-party marginals
//! already fail on subsets that split a fused pair.
//!
//! Every output is re-verified before it is returned, so a verdict here is
//! never inherited from the construction alone.

use crate::error::{Error, Result};
use crate::shape::SystemShape;
use crate::state::PureState;
use crate::verifier::{verify_uniform, DEFAULT_TOLERANCE};

/// Splits one party of a 2n-party AME state into two subsystems.
///
/// The index of the split party is rewritten as i = i_A·d_B + i_B and the
/// two new parties take its place, so the output has 2n+1 parties and is
/// AME; the result is re-verified before being returned.
pub fn split_party(state: &PureState, party: usize, d_a: usize, d_b: usize) -> Result<PureState> {
    let shape = state.shape();
    let parties = shape.party_count();
    if parties % 2 != 0 {
        return Err(Error::NotApplicable(format!(
            "splitting grows an even party count, got {parties} parties"
        )));
    }
    if party >= parties {
        return Err(Error::InvalidSubset(format!(
            "party {party} out of range for {parties} parties"
        )));
    }
    let d = shape.dim(party);
    if d_a == 0 || d_b == 0 || d_a * d_b != d {
        return Err(Error::ShapeMismatch(format!(
            "cannot split a dimension-{d} party as {d_a}x{d_b}"
        )));
    }
    let n = parties / 2;
    let verdict = verify_uniform(state, n, DEFAULT_TOLERANCE)?;
    if !verdict.is_ame {
        return Err(Error::PreconditionFailed(format!(
            "input must be an AME state, worst marginal deviation {:.3e}",
            verdict.worst_deviation()
        )));
    }

    let mut dims = shape.dims().to_vec();
    dims.splice(party..=party, [d_a, d_b]);
    let split_shape = SystemShape::new(dims)?;
    let terms = state
        .terms()
        .map(|(index, amp)| {
            let mut split_index = Vec::with_capacity(parties + 1);
            split_index.extend(&index[..party]);
            split_index.push(index[party] / d_b);
            split_index.push(index[party] % d_b);
            split_index.extend(&index[party + 1..]);
            (split_index, amp.clone())
        })
        .collect();
    let output = PureState::new_unnormalized(split_shape, terms)?;
    let verdict = verify_uniform(&output, n, DEFAULT_TOLERANCE)?;
    if !verdict.is_k_uniform {
        return Err(Error::Internal(
            "split state failed uniformity re-verification".into(),
        ));
    }
    Ok(output)
}

/// Merges two 2n-party AME states into a (2n+1)-party AME state.
///
/// Party 0 of each input stays unshared; `pairing` lists (party of ψ, party
/// of φ) pairs covering all remaining parties of both, and each pair is
/// fused into one party of dimension equal to the product. The output
/// parties are ordered A, B, then the fused parties in ψ's order, and the
/// result is re-verified as AME.
pub fn merge_compose_even(
    psi: &PureState,
    phi: &PureState,
    pairing: &[(usize, usize)],
) -> Result<PureState> {
    let parties = psi.shape().party_count();
    if parties % 2 != 0 {
        return Err(Error::NotApplicable(format!(
            "the even merge takes inputs with an even party count, got {parties}"
        )));
    }
    merge_compose(psi, phi, pairing)
}

/// Merges two (2n+1)-party AME states into a (2n+2)-party n-uniform state.
///
/// Same pairing convention as [`merge_compose_even`]. The output is
/// re-verified as n-uniform; it is never AME, since a balanced subset that
/// takes A, B and parts of the fused parties sees a non-mixed marginal.
pub fn merge_compose_odd(
    psi: &PureState,
    phi: &PureState,
    pairing: &[(usize, usize)],
) -> Result<PureState> {
    let parties = psi.shape().party_count();
    if parties % 2 == 0 {
        return Err(Error::NotApplicable(format!(
            "the odd merge takes inputs with an odd party count, got {parties}"
        )));
    }
    merge_compose(psi, phi, pairing)
}

fn merge_compose(
    psi: &PureState,
    phi: &PureState,
    pairing: &[(usize, usize)],
) -> Result<PureState> {
    let parties = psi.shape().party_count();
    if phi.shape().party_count() != parties {
        return Err(Error::ShapeMismatch(format!(
            "inputs have {} and {} parties",
            parties,
            phi.shape().party_count()
        )));
    }
    check_merge_pairing(pairing, parties)?;
    for (name, input) in [("first", psi), ("second", phi)] {
        let verdict = verify_uniform(input, parties / 2, DEFAULT_TOLERANCE)?;
        if !verdict.is_ame {
            return Err(Error::PreconditionFailed(format!(
                "{name} input must be an AME state, worst marginal deviation {:.3e}",
                verdict.worst_deviation()
            )));
        }
    }

    let fused = psi.tensor_product(phi, pairing)?;
    let total = fused.shape().party_count();
    let mut order = Vec::with_capacity(total);
    order.push(0);
    order.push(total - 1);
    order.extend(1..total - 1);
    let output = fused.permute_parties(&order)?;
    let verdict = verify_uniform(&output, parties / 2, DEFAULT_TOLERANCE)?;
    if !verdict.is_k_uniform {
        return Err(Error::Internal(
            "merged state failed uniformity re-verification".into(),
        ));
    }
    Ok(output)
}

fn check_merge_pairing(pairing: &[(usize, usize)], parties: usize) -> Result<()> {
    if pairing.len() != parties - 1 {
        return Err(Error::InvalidPairing(format!(
            "expected {} pairs to cover all shared parties, got {}",
            parties - 1,
            pairing.len()
        )));
    }
    let mut seen_left = vec![false; parties];
    let mut seen_right = vec![false; parties];
    for &(a, b) in pairing {
        if a == 0 || b == 0 {
            return Err(Error::InvalidPairing(
                "party 0 of each input stays unshared and cannot be paired".into(),
            ));
        }
        if a >= parties || b >= parties {
            return Err(Error::InvalidPairing(format!(
                "pair ({a}, {b}) out of range for {parties} parties"
            )));
        }
        if seen_left[a] || seen_right[b] {
            return Err(Error::InvalidPairing(format!(
                "pair ({a}, {b}) repeats an already paired party"
            )));
        }
        seen_left[a] = true;
        seen_right[b] = true;
    }
    Ok(())
}
