//! The acceptance gate: nine criteria, one test and one printed verdict line
//! each. Every criterion states its own tolerances and runtime budgets.

mod common;

use std::time::Instant;

use ame_core::constructors::{
    bell_state, compose_fig1, construct_2mmn, construct_lmkm, construct_mmn, direct_sum_ab,
    ghz_state, two_mmn_feasibility_system,
};
use ame_core::exact::ExactForm;
use ame_core::irreducibility::{
    certify_244_irreducible, classify_system, pencil_min_schmidt_rank, ClassificationRule,
    ReducibilityStatus,
};
use ame_core::isometry::check_k_isometry;
use ame_core::linear::{solve_feasibility, Feasibility};
use ame_core::msa::{msa_to_state, solve_msa, verify_msa, MsaOutcome, MsaProblem};
use ame_core::state::Amplitude;
use ame_core::verifier::{steer, verify_uniform};
use ame_core::{PureState, SystemShape};
use common::{
    msa_equations, oracle_feasible, rat, regime_instances, two_block_equations, worked_345_array,
};

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn criterion(number: usize, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => eprintln!("criterion {number}: PASS"),
        Err(message) => {
            eprintln!("criterion {number}: FAIL ({message})");
            panic!("criterion {number} failed: {message}");
        }
    }
}

#[test]
fn criterion_1_worked_array_verifies_exactly_and_quickly() {
    criterion(1, || {
        let arr = worked_345_array();
        let check = verify_msa(&arr);
        ensure!(
            check.passed,
            "the worked array violates {} constraints",
            check.violations.len()
        );
        let mut best = f64::INFINITY;
        for _ in 0..5 {
            let start = Instant::now();
            let check = verify_msa(&arr);
            let elapsed = start.elapsed().as_secs_f64();
            ensure!(check.passed, "verification flipped between runs");
            best = best.min(elapsed);
        }
        ensure!(
            best < 1e-3,
            "verification took {best:.6}s, budget is 1ms"
        );
        Ok(())
    });
}

#[test]
fn criterion_2_worked_state_marginals_are_maximally_mixed() {
    criterion(2, || {
        let state = msa_to_state(&worked_345_array()).map_err(|e| e.to_string())?;
        for (party, side) in [(0usize, 3usize), (1, 4), (2, 5)] {
            let rho = state.partial_trace(&[party]).map_err(|e| e.to_string())?;
            ensure!(
                rho.side() == side,
                "party {party} marginal has side {}, expected {side}",
                rho.side()
            );
            let dev = rho.max_abs_deviation_from_maximally_mixed();
            ensure!(
                dev <= 1e-12,
                "party {party} marginal deviates by {dev:.3e}, tolerance 1e-12"
            );
        }
        Ok(())
    });
}

#[test]
fn criterion_3_unnormalized_worked_state_isometry_constants() {
    criterion(3, || {
        let state = msa_to_state(&worked_345_array())
            .and_then(|s| s.scaled_sqrt(&rat("5")))
            .map_err(|e| e.to_string())?;
        let report = check_k_isometry(&state, 1, 1e-10).map_err(|e| e.to_string())?;
        ensure!(report.is_k_isometry, "the scaled state is not a 1-isometry");
        ensure!(report.trace_consistent, "split traces disagree");
        let expected = [(vec![0usize], 5.0 / 3.0), (vec![1], 5.0 / 4.0), (vec![2], 1.0)];
        for (cols, constant) in expected {
            let split = report
                .splits
                .iter()
                .find(|s| s.col_parties == cols)
                .ok_or_else(|| format!("no split over columns {cols:?}"))?;
            let err = (split.constant - constant).abs();
            ensure!(
                err <= 1e-12,
                "split {cols:?} constant {} deviates from {constant} by {err:.3e}",
                split.constant
            );
        }
        Ok(())
    });
}

#[test]
fn criterion_4_existence_grid_matches_divisibility_on_three_routes() {
    criterion(4, || {
        let start = Instant::now();
        for m in 1..=10usize {
            for n in 1..=m {
                let divisible = m % n == 0;
                let constructed = construct_2mmn(m, n);
                ensure!(
                    constructed.is_ok() == divisible,
                    "construct_2mmn({m}, {n}) succeeded = {}, divisibility = {divisible}",
                    constructed.is_ok()
                );
                if let Ok(state) = constructed {
                    let verdict =
                        verify_uniform(&state, 1, 1e-12).map_err(|e| e.to_string())?;
                    ensure!(
                        verdict.is_k_uniform,
                        "construct_2mmn({m}, {n}) output is not 1-uniform"
                    );
                }
                let sys = two_mmn_feasibility_system(m, n).map_err(|e| e.to_string())?;
                let solver = solve_feasibility(&sys);
                ensure!(
                    solver.is_feasible() == divisible,
                    "solver verdict at ({m}, {n}) disagrees with divisibility"
                );
                match solver {
                    Feasibility::Feasible(x) => {
                        ensure!(sys.is_solution(&x), "solver point fails the system")
                    }
                    Feasibility::Infeasible(cert) => {
                        ensure!(cert.validates(&sys), "refutation fails to validate")
                    }
                }
                let (rows, rhs) = two_block_equations(m, n);
                ensure!(
                    oracle_feasible(&rows, &rhs) == divisible,
                    "independent oracle at ({m}, {n}) disagrees with divisibility"
                );
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        ensure!(elapsed < 30.0, "grid took {elapsed:.1}s, budget is 30s");
        Ok(())
    });
}

#[test]
fn criterion_5_constructor_outputs_all_verify_uniform() {
    criterion(5, || {
        let mut states: Vec<(String, PureState)> = Vec::new();
        for m in 1..=5usize {
            for n in 1..=m * m {
                states.push((
                    format!("construct_mmn({m}, {n})"),
                    construct_mmn(m, n).map_err(|e| e.to_string())?,
                ));
            }
        }
        for l in 1..=5usize {
            for m in l + 1..=6 {
                for k in 1..=l {
                    states.push((
                        format!("construct_lmkm({l}, {m}, {k})"),
                        construct_lmkm(l, m, k).map_err(|e| e.to_string())?,
                    ));
                }
            }
        }
        let sum_pairs = [
            ("direct_sum_ab(mmn(2,2), mmn(2,2))", construct_mmn(2, 2), construct_mmn(2, 2)),
            ("direct_sum_ab(mmn(2,3), 2mmn(2,1))", construct_mmn(2, 3), construct_2mmn(2, 1)),
            ("direct_sum_ab(mmn(3,4), mmn(3,4))", construct_mmn(3, 4), construct_mmn(3, 4)),
        ];
        for (label, left, right) in sum_pairs {
            let sum = direct_sum_ab(
                &left.map_err(|e| e.to_string())?,
                &right.map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            states.push((label.to_string(), sum));
        }
        for k in 1..=4usize {
            for l in 1..=4 {
                states.push((
                    format!("compose_fig1({k}, {l})"),
                    compose_fig1(k, l).map_err(|e| e.to_string())?,
                ));
            }
        }
        for (label, state) in &states {
            let verdict = verify_uniform(state, 1, 1e-12).map_err(|e| e.to_string())?;
            ensure!(
                verdict.is_k_uniform,
                "{label} fails 1-uniformity with worst deviation {:.3e}",
                verdict.worst_deviation()
            );
        }
        ensure!(states.len() > 80, "sweep unexpectedly small: {}", states.len());
        Ok(())
    });
}

#[test]
fn criterion_6_solver_and_oracle_agree_with_artifacts() {
    criterion(6, || {
        let instances = regime_instances();
        ensure!(instances.len() == 12, "expected 12 instances");
        for (l, m, n) in instances {
            let problem = MsaProblem::new(l, m, n).map_err(|e| e.to_string())?;
            let outcome = solve_msa(&problem);
            let (rows, rhs) = msa_equations(l, m, n);
            let oracle = oracle_feasible(&rows, &rhs);
            ensure!(
                outcome.is_feasible() == oracle,
                "solver and oracle disagree at ({l}, {m}, {n})"
            );
            match outcome {
                MsaOutcome::Feasible(arr) => {
                    let check = verify_msa(&arr);
                    ensure!(
                        check.passed,
                        "feasible array fails verification at ({l}, {m}, {n})"
                    );
                }
                MsaOutcome::Infeasible(cert) => {
                    ensure!(
                        cert.validates(&problem.system()),
                        "Farkas certificate fails at ({l}, {m}, {n})"
                    );
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_7_irreducibility_verdicts() {
    criterion(7, || {
        let shape_345 = SystemShape::new(vec![3, 4, 5]).map_err(|e| e.to_string())?;
        let verdict = classify_system(&shape_345).map_err(|e| e.to_string())?;
        ensure!(
            verdict.status == ReducibilityStatus::IrreducibleCertified
                && verdict.reason == Some(ClassificationRule::PrimeCoprime),
            "(3, 4, 5) classified as {:?} via {:?}",
            verdict.status,
            verdict.reason
        );
        let shape_235 = SystemShape::new(vec![2, 3, 5]).map_err(|e| e.to_string())?;
        let verdict = classify_system(&shape_235).map_err(|e| e.to_string())?;
        ensure!(
            verdict.status == ReducibilityStatus::IrreducibleCertified
                && verdict.reason == Some(ClassificationRule::ThreePrimes),
            "(2, 3, 5) classified as {:?} via {:?}",
            verdict.status,
            verdict.reason
        );

        let two_branch = construct_2mmn(4, 0).map_err(|e| e.to_string())?;
        ensure!(
            certify_244_irreducible(&two_branch).map_err(|e| e.to_string())?,
            "the two-branch 2x4x4 state was not certified irreducible"
        );
        let ghz_bell = ghz_state(2, 3)
            .and_then(|g| {
                let b = bell_state(2)?;
                g.tensor_product(&b, &[(1, 0), (2, 1)])
            })
            .map_err(|e| e.to_string())?;
        ensure!(
            ghz_bell.shape().dims() == [2, 4, 4],
            "product state has shape {:?}",
            ghz_bell.shape().dims()
        );
        ensure!(
            !certify_244_irreducible(&ghz_bell).map_err(|e| e.to_string())?,
            "a tensor product was certified irreducible"
        );

        let quarter = || {
            Amplitude::exact(ExactForm::positive_sqrt(rat("1/16")).expect("valid radicand"))
        };
        let pair_shape = || SystemShape::new(vec![4, 4]).expect("two parties");
        let x = PureState::new_unnormalized(
            pair_shape(),
            (0..4).map(|j| (vec![j, j], quarter())).collect(),
        )
        .map_err(|e| e.to_string())?;
        let y = PureState::new_unnormalized(
            pair_shape(),
            (0..4).map(|j| (vec![j, (j + 1) % 4], quarter())).collect(),
        )
        .map_err(|e| e.to_string())?;
        let rank = pencil_min_schmidt_rank(&x, &y).map_err(|e| e.to_string())?;
        ensure!(rank == 3, "pencil rank is {rank}, expected 3");
        Ok(())
    });
}

#[test]
fn criterion_8_merge_composition_in_both_parities() {
    criterion(8, || {
        let ghz = ghz_state(2, 3).map_err(|e| e.to_string())?;
        let odd = ame_core::composer::merge_compose_odd(&ghz, &ghz, &[(1, 1), (2, 2)])
            .map_err(|e| e.to_string())?;
        ensure!(
            odd.shape().dims() == [2, 2, 4, 4],
            "odd merge has shape {:?}",
            odd.shape().dims()
        );
        let one = verify_uniform(&odd, 1, 1e-12).map_err(|e| e.to_string())?;
        ensure!(one.is_k_uniform, "odd merge is not 1-uniform");
        let two = verify_uniform(&odd, 2, 1e-12).map_err(|e| e.to_string())?;
        ensure!(!two.is_k_uniform, "odd merge is unexpectedly 2-uniform");
        ensure!(
            two.worst_deviation() > 0.1,
            "worst 2-party deviation {:.3e} is not above 0.1",
            two.worst_deviation()
        );

        let even = ame_core::composer::merge_compose_even(
            &bell_state(2).map_err(|e| e.to_string())?,
            &bell_state(3).map_err(|e| e.to_string())?,
            &[(1, 1)],
        )
        .map_err(|e| e.to_string())?;
        ensure!(
            even.shape().dims() == [2, 3, 6],
            "even merge has shape {:?}",
            even.shape().dims()
        );
        let verdict = verify_uniform(&even, 1, 1e-12).map_err(|e| e.to_string())?;
        ensure!(verdict.is_ame, "even merge is not maximally entangled");
        Ok(())
    });
}

#[test]
fn criterion_9_steering_collapses_to_uniform_bell_pairs() {
    criterion(9, || {
        let state = construct_mmn(2, 4).map_err(|e| e.to_string())?;
        for outcome in 0..4usize {
            let steered = steer(&state, 2, outcome).map_err(|e| e.to_string())?;
            let err = (steered.probability - 0.25).abs();
            ensure!(
                err <= 1e-12,
                "outcome {outcome} probability {} deviates by {err:.3e}",
                steered.probability
            );
            if let Some(exact) = &steered.probability_exact {
                ensure!(
                    *exact == rat("1/4"),
                    "outcome {outcome} exact probability is {exact}"
                );
            }
            let conditional = steered.state;
            ensure!(
                conditional.shape().dims() == [2, 2],
                "conditional state has shape {:?}",
                conditional.shape().dims()
            );
            let mut evs = conditional
                .partial_trace(&[0])
                .map_err(|e| e.to_string())?
                .eigenvalues();
            evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ensure!(evs.len() == 2, "expected two Schmidt terms");
            for ev in evs {
                let coeff = ev.max(0.0).sqrt();
                let err = (coeff - std::f64::consts::FRAC_1_SQRT_2).abs();
                ensure!(
                    err <= 1e-10,
                    "outcome {outcome} Schmidt coefficient {coeff} deviates by {err:.3e}"
                );
            }
        }
        Ok(())
    });
}
