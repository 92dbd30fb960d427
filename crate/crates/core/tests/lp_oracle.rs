//! Cross-checks of the simplex against the vertex-enumeration oracle on
//! randomly generated boxed programs, plus certificate spot checks.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{oracle_optimum, rv, vars};
use tradenet::lp::{self, LinearProgram, LpResult, Relation, Sense};
use tradenet::rat::{rat, Rat};

fn random_boxed_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1..=3);
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let index = tradenet::coords::IndexSet::new(names).unwrap();
    let objective = rv(
        &index,
        &(0..n)
            .map(|_| Rat::new(rng.gen_range(-5..=5), rng.gen_range(1..=2)))
            .collect::<Vec<_>>(),
    );
    let sense = if rng.gen_bool(0.5) {
        Sense::Maximize
    } else {
        Sense::Minimize
    };
    let mut lp = LinearProgram::new(sense, objective);
    for j in 0..n {
        let lo = rng.gen_range(-2..=0);
        let hi = rng.gen_range(0..=3);
        lp.set_lower(j, Rat::from_int(lo));
        lp.set_upper(j, Rat::from_int(hi));
    }
    for _ in 0..rng.gen_range(1..=4) {
        let coeffs = rv(
            &index,
            &(0..n)
                .map(|_| Rat::from_int(rng.gen_range(-3..=3)))
                .collect::<Vec<_>>(),
        );
        let relation = match rng.gen_range(0..3) {
            0 => Relation::Le,
            1 => Relation::Ge,
            _ => Relation::Eq,
        };
        lp.push(coeffs, relation, Rat::from_int(rng.gen_range(-3..=5)));
    }
    lp
}

#[test]
fn simplex_agrees_with_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc0);
    let mut optimal = 0;
    let mut infeasible = 0;
    for case in 0..120 {
        let lp = random_boxed_lp(&mut rng);
        let oracle = oracle_optimum(&lp);
        match (lp::solve(&lp), oracle) {
            (LpResult::Optimal(sol), Some(expected)) => {
                assert_eq!(
                    sol.optimum, expected,
                    "case {case}: simplex and oracle disagree on\n{lp}"
                );
                optimal += 1;
            }
            (LpResult::Infeasible(cert), None) => {
                lp::verify_farkas(&lp, &cert)
                    .unwrap_or_else(|e| panic!("case {case}: bad certificate: {e}\n{lp}"));
                infeasible += 1;
            }
            (got, want) => panic!(
                "case {case}: status mismatch (simplex {got:?}, oracle {want:?})\n{lp}"
            ),
        }
    }
    // The generator must exercise both outcomes for the check to mean much.
    assert!(optimal >= 20, "only {optimal} optimal cases");
    assert!(infeasible >= 20, "only {infeasible} infeasible cases");
}

#[test]
fn lottery_relaxation_value_matches_oracle() {
    // The golden relaxation: maximize the aggregate lottery value subject
    // to the substitution constraint, in raw LP form with boxed variables.
    let v = vars(&["l00", "l01", "l10", "l11"]);
    let mut lp = LinearProgram::new(
        Sense::Maximize,
        rv(&v, &[rat(-1, 1), rat(-2, 1), rat(-2, 1), rat(0, 1)]),
    );
    for j in 0..4 {
        lp.set_lower(j, Rat::zero());
        lp.set_upper(j, Rat::one());
    }
    lp.push(
        rv(&v, &[rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1)]),
        Relation::Eq,
        Rat::one(),
    );
    // mean_e ≤ 1, mean_g ≤ 1, mean_e + mean_g ≤ 1 with
    // mean_e = l10 + l11, mean_g = l01 + l11.
    lp.push(
        rv(&v, &[rat(0, 1), rat(0, 1), rat(1, 1), rat(1, 1)]),
        Relation::Le,
        Rat::one(),
    );
    lp.push(
        rv(&v, &[rat(0, 1), rat(1, 1), rat(0, 1), rat(1, 1)]),
        Relation::Le,
        Rat::one(),
    );
    lp.push(
        rv(&v, &[rat(0, 1), rat(1, 1), rat(1, 1), rat(2, 1)]),
        Relation::Le,
        Rat::one(),
    );
    let oracle = oracle_optimum(&lp).expect("feasible");
    assert_eq!(oracle, rat(-1, 2));
    let solved = lp::solve(&lp);
    assert_eq!(solved.expect_optimal().optimum, rat(-1, 2));
}

#[test]
fn golden_price_system_infeasibility_certificate() {
    // The two participation constraints at the no-trade outcome combine
    // with weights (1, 1) into 0 ≤ −1.
    let v = vars(&["p_e", "p_g"]);
    let mut lp = LinearProgram::feasibility(v.clone());
    lp.push(rv(&v, &[rat(1, 1), rat(-1, 1)]), Relation::Le, rat(-1, 2));
    lp.push(rv(&v, &[rat(-1, 1), rat(1, 1)]), Relation::Le, rat(-1, 2));
    match lp::solve(&lp) {
        LpResult::Infeasible(cert) => {
            assert_eq!(cert.row_mults, vec![rat(1, 1), rat(1, 1)]);
        }
        other => panic!("{other:?}"),
    }
}
