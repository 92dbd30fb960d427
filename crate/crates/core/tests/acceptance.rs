//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).
//! All equality checks are exact rational comparisons with zero tolerance.

mod common;

use std::time::{Duration, Instant};

use tradenet::builtin;
use tradenet::convexity::{is_msharp_concave_fn, FiniteIntFunction, FnViolation};
use tradenet::coords::{IndexSet, IntVec};
use tradenet::equilibrium::{certify_nonexistence, reverify_certificate, CertifyResult};
use tradenet::rat::{rat, Value};
use tradenet::solver::detect_gap;
use tradenet::suites::{
    suite_lemma22, suite_lp, suite_problem1, suite_thm21_cor21, suite_thm22, suite_thm23,
    suite_thm31, SuiteConfig, SuiteReport,
};

const SEED: u64 = 2020;

fn pass(name: &str, started: Instant) {
    println!(
        "criterion {name}: PASS ({:.2} s)",
        started.elapsed().as_secs_f64()
    );
}

fn fail(name: &str, detail: &str) -> ! {
    println!("criterion {name}: FAIL");
    panic!("criterion {name} failed: {detail}");
}

fn assert_suite(name: &str, report: &SuiteReport, started: Instant, budget: Option<Duration>) {
    if let Some(limit) = budget {
        let elapsed = started.elapsed();
        assert!(
            elapsed < limit,
            "criterion {name} exceeded its runtime budget: {elapsed:?} ≥ {limit:?}"
        );
    }
    if !report.passed() {
        fail(name, &report.failures.join("; "));
    }
    pass(name, started);
}

#[test]
fn criterion_01_example1_golden() {
    let name = "01 example1-golden";
    let started = Instant::now();
    let inst = builtin::example1();
    let report = detect_gap(&inst).expect("solves");

    if report.integral.value != Value::from(-1) {
        fail(name, &format!("integral optimum {}", report.integral.value));
    }
    let argmax: Vec<Vec<i64>> = report
        .integral
        .argmax
        .iter()
        .map(|x| x.values().to_vec())
        .collect();
    if argmax != vec![vec![0, 0]] {
        fail(name, &format!("integral argmax {argmax:?}"));
    }
    let fractional = report.fractional.as_ref().expect("finite support");
    if fractional.value != rat(-1, 2) {
        fail(name, &format!("fractional optimum {}", fractional.value));
    }
    let mut support: Vec<(Vec<i64>, String)> = fractional
        .lottery
        .support
        .iter()
        .map(|(x, w)| (x.values().to_vec(), w.to_string()))
        .collect();
    support.sort();
    let expected = vec![
        (vec![0, 0], "1/2".to_string()),
        (vec![1, 1], "1/2".to_string()),
    ];
    if support != expected {
        fail(name, &format!("lottery {support:?}"));
    }
    if !report.gap {
        fail(name, "gap not flagged");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(1),
        "criterion {name} exceeded 1 s: {elapsed:?}"
    );
    pass(name, started);
}

#[test]
fn criterion_02_example1_nonexistence() {
    let name = "02 example1-nonexistence";
    let started = Instant::now();
    let inst = builtin::example1();
    let result = certify_nonexistence(&inst).expect("certifies");
    let CertifyResult::Certificate(cert) = result else {
        fail(name, "an equilibrium was unexpectedly found");
    };
    let outcomes: Vec<Vec<i64>> = cert
        .entries
        .iter()
        .map(|e| e.outcome.values().to_vec())
        .collect();
    if outcomes != vec![vec![0, 0], vec![0, 1], vec![1, 0]] {
        fail(name, &format!("covered outcomes {outcomes:?}"));
    }
    for entry in &cert.entries {
        // Arc-only and rent-based searches both refuted, both certificates
        // re-verified by independent arithmetic over the rebuilt systems.
        if let Err(e) = reverify_certificate(&inst, &entry.arc_only) {
            fail(name, &format!("arc-only certificate: {e}"));
        }
        let Some(rents) = &entry.with_rents else {
            fail(name, "missing rent-based certificate");
        };
        if let Err(e) = reverify_certificate(&inst, rents) {
            fail(name, &format!("rent certificate: {e}"));
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(1),
        "criterion {name} exceeded 1 s: {elapsed:?}"
    );
    pass(name, started);
}

#[test]
fn criterion_03_msharp_valuations() {
    let name = "03 msharp-valuations";
    let started = Instant::now();
    let inst = builtin::example1();
    for agent in ["1", "2"] {
        if let Err(v) = is_msharp_concave_fn(&inst.valuation(agent).table) {
            fail(name, &format!("w{agent} rejected: {v}"));
        }
    }
    // The complements table fails with the documented witness
    // ((1,1),(0,0),first coordinate).
    let idx = IndexSet::new(["e", "g"]).unwrap();
    let iv = |vals: &[i64]| IntVec::new(idx.clone(), vals.to_vec()).unwrap();
    let complements = FiniteIntFunction::new(
        idx.clone(),
        vec![
            (iv(&[0, 0]), Value::from(1)),
            (iv(&[1, 1]), Value::from(1)),
            (iv(&[1, 0]), Value::from(0)),
            (iv(&[0, 1]), Value::from(0)),
        ],
    )
    .unwrap();
    match is_msharp_concave_fn(&complements) {
        Err(FnViolation::Exchange(e)) => {
            if e.x != iv(&[1, 1]) || e.y != iv(&[0, 0]) || e.u != "e" {
                fail(name, &format!("unexpected witness {e}"));
            }
        }
        other => fail(name, &format!("complements table: {other:?}")),
    }
    pass(name, started);
}

#[test]
fn criterion_04_thm23_suite() {
    let name = "04 thm23-suite";
    let started = Instant::now();
    // ≥ 200 generated (M♯-concave f, integral polymatroid P) pairs with
    // |E| ≤ 4 and capacities ≤ 2: relaxation = integer program exactly.
    let report = suite_thm23(SuiteConfig {
        seed: SEED,
        count: 200,
        max_arcs: 4,
    });
    assert_eq!(report.cases, 200);
    assert_suite(name, &report, started, Some(Duration::from_secs(120)));
}

#[test]
fn criterion_05_thm31_suite() {
    let name = "05 thm31-suite";
    let started = Instant::now();
    // ≥ 200 two-sided separable instances: no gap, rent-based prices found
    // at an integral optimum, and the equilibrium verifies end to end.
    let report = suite_thm31(SuiteConfig {
        seed: SEED,
        count: 200,
        max_arcs: 4,
    });
    assert_eq!(report.cases, 200);
    assert_suite(name, &report, started, Some(Duration::from_secs(120)));
}

#[test]
fn criterion_06_lemma22_suite() {
    let name = "06 lemma22-suite";
    let started = Instant::now();
    // ≥ 200 (f, x) pairs: the facet set must be M-convex, plus the
    // rebalancing checks. The rebalancing half and the M♯ property of the
    // facet set hold on every case; the M-convexity claim itself is
    // refuted by genuinely M♯-concave functions (see the suite note and
    // the repository decision record), so this criterion fails honestly
    // rather than being weakened.
    let report = suite_lemma22(SuiteConfig {
        seed: SEED,
        count: 200,
        max_arcs: 3,
    });
    assert_eq!(report.cases, 200);
    for note in &report.notes {
        println!("criterion {name} note: {note}");
    }
    // Everything except the overstated M-convexity claim must hold; any
    // other failure is a genuine bug in this crate.
    for f in &report.failures {
        assert!(
            f.contains("M-convexity of the facet set failed"),
            "unexpected failure kind: {f}"
        );
    }
    assert_suite(name, &report, started, None);
}

#[test]
fn criterion_07_thm21_cor21_round_trips() {
    let name = "07 thm21-cor21";
    let started = Instant::now();
    let report = suite_thm21_cor21(SuiteConfig {
        seed: SEED,
        count: 100,
        max_arcs: 4,
    });
    assert_eq!(report.cases, 100);
    assert_suite(name, &report, started, None);
}

#[test]
fn criterion_08_thm22_suite() {
    let name = "08 thm22";
    let started = Instant::now();
    let report = suite_thm22(SuiteConfig {
        seed: SEED,
        count: 100,
        max_arcs: 4,
    });
    assert_eq!(report.cases, 100);
    assert_suite(name, &report, started, None);
}

#[test]
fn criterion_09_first_welfare() {
    let name = "09 first-welfare";
    let started = Instant::now();
    // Every equilibrium found by the suites must attain the integral
    // optimum; the welfare check runs inside both price-producing suites.
    let thm31 = suite_thm31(SuiteConfig {
        seed: SEED.wrapping_add(9),
        count: 100,
        max_arcs: 4,
    });
    if !thm31.passed() {
        fail(name, &thm31.failures.join("; "));
    }
    let problem1 = suite_problem1(SuiteConfig {
        seed: SEED.wrapping_add(9),
        count: 100,
        max_arcs: 4,
    });
    if !problem1.passed() {
        fail(name, &problem1.failures.join("; "));
    }
    pass(name, started);
}

#[test]
fn criterion_10_lp_selfcheck() {
    let name = "10 lp-selfcheck";
    let started = Instant::now();
    // Strong duality is asserted inside every solve (the solver refuses to
    // return an unverified optimum); here the greedy vertex is matched
    // against the LP optimum on ≥ 100 random (P, w) pairs.
    let report = suite_lp(SuiteConfig {
        seed: SEED,
        count: 100,
        max_arcs: 4,
    });
    assert_eq!(report.cases, 100);
    assert_suite(name, &report, started, None);
}
