//! One line per acceptance criterion. Run with `--nocapture` to see them.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use orelat_core::catalog;
use orelat_core::certifier;
use orelat_core::reproduce::{self, GroupAudit, Suite};
use orelat_core::subgroups;
use orelat_core::totient::{self, IndexedInterval};

const FACTOR_LIST_BUDGET: Duration = Duration::from_secs(1);
const SCAN_BUDGET: Duration = Duration::from_secs(60);
const FIXTURE_BUDGET: Duration = Duration::from_secs(10);
const ORTHOGONALITY_TOLERANCE: f64 = 1e-6;
const MAX_CATALOG_ORDER: usize = 200;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn failing_claims(suite: &Suite) -> Vec<String> {
    suite
        .claims
        .iter()
        .filter(|c| !c.pass && !c.informational)
        .map(|c| format!("{} expected {} got {}", c.id, c.expected, c.actual))
        .collect()
}

fn catalog_audits() -> &'static Vec<GroupAudit> {
    static AUDITS: OnceLock<Vec<GroupAudit>> = OnceLock::new();
    AUDITS.get_or_init(|| {
        catalog::SMALL_CATALOG
            .iter()
            .map(|&name| catalog::group(name).unwrap())
            .zip(catalog::SMALL_CATALOG)
            .filter(|(g, _)| g.order() <= MAX_CATALOG_ORDER)
            .map(|(g, name)| reproduce::audit_group(name, &g).unwrap())
            .collect()
    })
}

fn factor_list() -> Outcome {
    let start = Instant::now();
    let suite = reproduce::factor_list().unwrap();
    let elapsed = start.elapsed();
    let fails = failing_claims(&suite);
    let seven = suite.results["seven"].as_array().unwrap().len();
    outcome(
        fails.is_empty() && elapsed < FACTOR_LIST_BUDGET,
        format!("{seven} seven-factor numbers, eight-factor {}, {elapsed:.2?}; {fails:?}", suite.results["eight"]),
    )
}

fn lemma_scan() -> Outcome {
    let start = Instant::now();
    let all = certifier::lemma_check_all(1).unwrap();
    let elapsed = start.elapsed();
    let failures: Vec<_> = all.iter().filter(|r| r.min < r.bound).collect();
    outcome(
        failures.is_empty() && elapsed < SCAN_BUDGET,
        format!("{} scans, {} below (a-1)^(n+2), {elapsed:.2?}", all.len(), failures.len()),
    )
}

fn closed_forms() -> Outcome {
    let suite = reproduce::totient_formulas().unwrap();
    let fails = failing_claims(&suite);
    let checked: Vec<String> = suite
        .results
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| format!("{k}: {}", v["checked"]))
        .collect();
    outcome(fails.is_empty(), format!("{}; {fails:?}", checked.join(", ")))
}

fn concrete_fixture() -> Outcome {
    let start = Instant::now();
    let g = catalog::psl27();
    let d8 = IndexedInterval::from_group_interval(&subgroups::overgroup_interval(&g, &catalog::psl27_d8()).unwrap());
    let s3 = IndexedInterval::from_group_interval(&subgroups::overgroup_interval(&g, &catalog::psl27_s3()).unwrap());
    let elapsed = start.elapsed();
    let qd8 = certifier::rank2_quadruple(&d8).unwrap();
    let qs3 = certifier::rank2_quadruple(&s3).unwrap();
    let phi_hat = totient::dual_totient(&d8).unwrap();
    let pass = d8.is_boolean()
        && d8.rank() == 2
        && qd8 == [7, 7, 3, 3]
        && qs3 == [7, 7, 4, 4]
        && phi_hat == 8
        && elapsed < FIXTURE_BUDGET;
    outcome(pass, format!("[D8,PSL(2,7)] {qd8:?} dual totient {phi_hat}, [S3,PSL(2,7)] {qs3:?}, {elapsed:.2?}"))
}

fn representation_identity() -> Outcome {
    let audits = catalog_audits();
    let worst = audits.iter().map(|a| a.orthogonality_error).fold(0.0, f64::max);
    let bad_tables = audits.iter().filter(|a| !a.degree_square_sum_ok).count();
    let failures: usize = audits.iter().map(|a| a.index_identity_failures).sum();
    let pairs: usize = audits.iter().map(|a| a.subgroups).sum();
    outcome(
        failures == 0 && bad_tables == 0 && worst <= ORTHOGONALITY_TOLERANCE,
        format!("{pairs} (G,H) pairs in {} groups, {failures} failures, max orthogonality error {worst:.1e}", audits.len()),
    )
}

fn ore_suite() -> Outcome {
    let audits = catalog_audits();
    let intervals: usize = audits.iter().map(|a| a.distributive_intervals).sum();
    let no_witness: usize = audits.iter().map(|a| a.ore_failures).sum();
    let mismatches: usize = audits.iter().map(|a| a.ore_count_mismatches).sum();
    outcome(
        no_witness == 0 && mismatches == 0,
        format!("{intervals} distributive intervals, {no_witness} without witness, {mismatches} totient/count mismatches"),
    )
}

fn soundness() -> Outcome {
    let audits = catalog_audits();
    let certified: usize = audits.iter().map(|a| a.certified_primitive).sum();
    let undecided: usize = audits.iter().map(|a| a.undecided).sum();
    let counter: usize = audits.iter().map(|a| a.soundness_counterexamples.len()).sum();
    outcome(
        counter == 0,
        format!("{certified} certified primitive, {undecided} undecided, {counter} counterexamples"),
    )
}

fn main_theorem_frontier() -> Outcome {
    let suite = reproduce::main_theorem().unwrap();
    let fails = failing_claims(&suite);
    let models = suite.claims.iter().filter(|c| c.id.starts_with("model-")).count();
    let info: Vec<String> = suite
        .claims
        .iter()
        .filter(|c| c.informational && !c.pass)
        .map(|c| format!("{} (informational) got {}", c.id, c.actual))
        .collect();
    outcome(
        fails.is_empty(),
        format!("{models} model traces match; {fails:?}; {}", info.join("; ")),
    )
}

fn conjecture_monitor() -> Outcome {
    let suite = reproduce::conjecture_monitor().unwrap();
    let all_hold = suite.claims.iter().all(|c| c.pass);
    outcome(
        all_hold,
        format!(
            "conjecture support: {} boolean intervals, {} at the bound, family {}",
            suite.results["boolean_intervals"], suite.results["attaining_bound"], suite.results["optimal_family"]
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("factor list", factor_list),
        ("iterative scan bound", lemma_scan),
        ("closed-form agreement", closed_forms),
        ("concrete interval fixture", concrete_fixture),
        ("representation identity", representation_identity),
        ("Ore property", ore_suite),
        ("primitivity soundness", soundness),
        ("main-theorem frontier", main_theorem_frontier),
        ("lower-bound monitor", conjecture_monitor),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("[{}] {}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
