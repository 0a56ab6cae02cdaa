//! Verification suites that recompute published values and compare them
//! with the fixtures in `fixtures/`.
//!
//! Every suite returns its raw results together with a list of claims.
//! A claim names where the expected value comes from, both values, and
//! whether they agree. Informational claims are reported but never make a
//! run fail.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::catalog::{self, CatalogError};
use crate::lattice::LatticeError;
use crate::certifier::{self, CertError, ChainScenario, ChainType, Verdict};
use crate::perm::FiniteGroup;
use crate::reptheory::{self, CharacterTable, RepError, TOLERANCE};
use crate::subgroups::{self, GroupInterval, SubgroupError};
use crate::totient::{self, IndexedInterval, TotientError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ReproduceError {
    #[error("unknown reproduce target `{0}`")]
    UnknownTarget(String),
    #[error("fixture {name} is malformed: {source}")]
    Fixture {
        name: &'static str,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Totient(#[from] TotientError),
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

type Result<T> = std::result::Result<T, ReproduceError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub id: String,
    pub paper_location: String,
    pub expected: Value,
    pub actual: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
}

impl Claim {
    pub fn new(id: impl Into<String>, location: impl Into<String>, expected: Value, actual: Value) -> Self {
        let pass = expected == actual;
        Claim {
            id: id.into(),
            paper_location: location.into(),
            expected,
            actual,
            pass,
            informational: false,
        }
    }

    fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub results: Value,
    pub claims: Vec<Claim>,
}

impl Report {
    pub fn new(command: impl Into<String>, results: Value, claims: Vec<Claim>) -> Self {
        Report {
            command: command.into(),
            version: VERSION.to_string(),
            results,
            claims,
        }
    }

    /// `true` iff every non-informational claim passes.
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.pass || c.informational)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.pass && !c.informational)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    All,
    FactorList,
    LemmaCheck,
    Rank2Table,
    TotientFormulas,
    CatalogPrimitivity,
    MainTheorem,
    ConjectureMonitor,
}

impl Target {
    pub const SUITES: [Target; 7] = [
        Target::FactorList,
        Target::LemmaCheck,
        Target::Rank2Table,
        Target::TotientFormulas,
        Target::CatalogPrimitivity,
        Target::MainTheorem,
        Target::ConjectureMonitor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::All => "all",
            Target::FactorList => "factor-list",
            Target::LemmaCheck => "lemma-check",
            Target::Rank2Table => "rank2-table",
            Target::TotientFormulas => "totient-formulas",
            Target::CatalogPrimitivity => "catalog-primitivity",
            Target::MainTheorem => "main-theorem",
            Target::ConjectureMonitor => "conjecture-monitor",
        }
    }
}

impl FromStr for Target {
    type Err = ReproduceError;

    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(Target::All)
            .chain(Target::SUITES)
            .find(|t| t.name() == s)
            .ok_or_else(|| ReproduceError::UnknownTarget(s.to_string()))
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Results and claims of one suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suite {
    pub results: Value,
    pub claims: Vec<Claim>,
}

pub fn reproduce(target: Target) -> Result<Report> {
    let command = format!("reproduce {target}");
    if target == Target::All {
        let mut results = serde_json::Map::new();
        let mut claims = Vec::new();
        for t in Target::SUITES {
            let suite = run_suite(t)?;
            results.insert(t.name().to_string(), suite.results);
            claims.extend(suite.claims.into_iter().map(|mut c| {
                c.id = format!("{}/{}", t.name(), c.id);
                c
            }));
        }
        return Ok(Report::new(command, Value::Object(results), claims));
    }
    let suite = run_suite(target)?;
    Ok(Report::new(command, suite.results, suite.claims))
}

pub fn run_suite(target: Target) -> Result<Suite> {
    match target {
        Target::All => Err(ReproduceError::UnknownTarget("all is not a single suite".into())),
        Target::FactorList => factor_list(),
        Target::LemmaCheck => lemma_check(),
        Target::Rank2Table => rank2_table(),
        Target::TotientFormulas => totient_formulas(),
        Target::CatalogPrimitivity => catalog_primitivity(),
        Target::MainTheorem => main_theorem(),
        Target::ConjectureMonitor => conjecture_monitor(),
    }
}

fn load<T: for<'de> Deserialize<'de>>(name: &'static str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| ReproduceError::Fixture { name, source })
}

#[derive(Debug, Deserialize)]
pub struct FactorListFixture {
    pub paper_location: String,
    pub limit: u64,
    pub min_factor: u64,
    pub seven: Vec<u64>,
    pub eight: Vec<u64>,
    pub max_seconds: f64,
}

pub fn factor_list_fixture() -> Result<FactorListFixture> {
    load("factor_list.json", include_str!("../fixtures/factor_list.json"))
}

pub fn factor_list() -> Result<Suite> {
    let fx = factor_list_fixture()?;
    let list = certifier::factor_products(fx.limit, fx.min_factor, 7);
    let with = |parts: usize| -> Vec<u64> { list.iter().filter(|f| f.has_parts(parts)).map(|f| f.n).collect() };
    let seven = with(7);
    let eight = with(8);
    let beyond: Vec<u64> = list.iter().filter(|f| f.max_parts() > 8).map(|f| f.n).collect();
    let claims = vec![
        Claim::new("seven-factors", &fx.paper_location, json!(fx.seven), json!(seven)),
        Claim::new("eight-factors", &fx.paper_location, json!(fx.eight), json!(eight)),
        Claim::new("nothing-else", &fx.paper_location, json!([]), json!(beyond)),
    ];
    let factorizations: BTreeMap<String, Vec<String>> = list
        .iter()
        .map(|f| {
            let forms = f
                .factorizations
                .iter()
                .filter(|v| v.len() >= 7)
                .map(|v| ChainType::new(v.clone()).to_string())
                .collect();
            (f.n.to_string(), forms)
        })
        .collect();
    Ok(Suite {
        results: json!({
            "limit": fx.limit,
            "min_factor": fx.min_factor,
            "seven": seven,
            "eight": eight,
            "factorizations": factorizations,
        }),
        claims,
    })
}

#[derive(Debug, Deserialize)]
pub struct SpotCheck {
    pub paper_location: String,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub n: usize,
    pub pass: bool,
}

#[derive(Debug, Deserialize)]
pub struct LemmaCheckFixture {
    pub paper_location: String,
    pub all_pass: bool,
    pub spot_checks: Vec<SpotCheck>,
    pub max_seconds: f64,
}

pub fn lemma_check_fixture() -> Result<LemmaCheckFixture> {
    load("lemma_check.json", include_str!("../fixtures/lemma_check.json"))
}

pub fn lemma_check() -> Result<Suite> {
    let fx = lemma_check_fixture()?;
    let all = certifier::lemma_check_all(1)?;
    let failures: Vec<_> = all.iter().filter(|r| !r.pass).collect();
    let tightest = all
        .iter()
        .min_by_key(|r| (r.min - r.bound, r.a, r.b, r.c, r.n))
        .expect("nonempty range");
    let mut claims = vec![Claim::new(
        "all-pass",
        &fx.paper_location,
        json!({ "all_pass": fx.all_pass, "failures": 0 }),
        json!({ "all_pass": failures.is_empty(), "failures": failures.len() }),
    )];
    for spot in &fx.spot_checks {
        let r = certifier::lemma_check_scan(spot.a, spot.b, spot.c, spot.n)?;
        claims.push(Claim::new(
            format!("scan-{}-{}-{}-{}", spot.a, spot.b, spot.c, spot.n),
            &spot.paper_location,
            json!({ "pass": spot.pass }),
            json!({ "pass": r.pass }),
        ));
    }
    let zero_failures = certifier::lemma_check_all(0)?.into_iter().filter(|r| !r.pass).count();
    Ok(Suite {
        results: json!({
            "scans": all.len(),
            "failures": failures,
            "tightest": tightest,
            "variant_from_zero_coatoms": { "failures": zero_failures },
        }),
        claims,
    })
}

#[derive(Debug, Deserialize)]
pub struct Rank2Exception {
    pub paper_location: String,
    pub group: String,
    pub subgroup: String,
    pub quadruple: [u64; 4],
    pub dual_totient: Option<i128>,
}

#[derive(Debug, Deserialize)]
pub struct LocatedId {
    pub id: String,
    pub paper_location: String,
}

#[derive(Debug, Deserialize)]
pub struct Rank2Fixture {
    pub paper_location: String,
    pub limit: u64,
    pub exceptions: Vec<Rank2Exception>,
    pub invariants: Vec<LocatedId>,
    pub max_seconds: f64,
}

pub fn rank2_fixture() -> Result<Rank2Fixture> {
    load("rank2_table.json", include_str!("../fixtures/rank2_table.json"))
}

/// Quadruple, boolean flag and dual totient of `[subgroup, group]`.
pub fn rank2_exception(group: &str, subgroup: &str) -> Result<(bool, usize, [u64; 4], i128)> {
    let g = catalog::group(group)?;
    let h = catalog::subgroup(group, subgroup)?;
    let interval = IndexedInterval::from_group_interval(&subgroups::overgroup_interval(&g, &h)?);
    let boolean = interval.is_boolean();
    let quadruple = certifier::rank2_quadruple(&interval)?;
    Ok((boolean, interval.rank(), quadruple, totient::dual_totient(&interval)?))
}

pub fn rank2_table() -> Result<Suite> {
    let fx = rank2_fixture()?;
    let table = certifier::rank2_index_table(fx.limit)?;
    let mut claims = Vec::new();
    for ex in &fx.exceptions {
        let (boolean, rank, quadruple, phi_hat) = rank2_exception(&ex.group, &ex.subgroup)?;
        let mut expected = json!({ "boolean": true, "rank": 2, "quadruple": ex.quadruple });
        let mut actual = json!({ "boolean": boolean, "rank": rank, "quadruple": quadruple });
        if let Some(v) = ex.dual_totient {
            expected["dual_totient"] = json!(v);
            actual["dual_totient"] = json!(phi_hat);
        }
        claims.push(Claim::new(
            format!("[{},{}]", ex.subgroup, ex.group),
            &ex.paper_location,
            expected,
            actual,
        ));
    }
    let location = |id: &str| {
        fx.invariants
            .iter()
            .find(|i| i.id == id)
            .map_or(fx.paper_location.clone(), |i| i.paper_location.clone())
    };
    let double_two = table
        .iter()
        .filter(|e| e.quadruple[..2] == [2, 2] || e.quadruple[2..] == [2, 2])
        .count();
    let duality = table
        .iter()
        .filter(|e| {
            let [a, b, c, d] = e.quadruple;
            (d == 2) != (b == 2) || (c == 2) != (a == 2)
        })
        .count();
    let inconsistent: Vec<_> = table.iter().filter(|e| !e.consistent).collect();
    claims.push(Claim::new("no-double-two", location("no-double-two"), json!(0), json!(double_two)));
    claims.push(Claim::new("index-two-duality", location("index-two-duality"), json!(0), json!(duality)));
    claims.push(Claim::new(
        "quadruple-pattern",
        location("quadruple-pattern"),
        json!([]),
        json!(inconsistent),
    ));
    let mut distinct: BTreeMap<String, usize> = BTreeMap::new();
    for e in &table {
        *distinct.entry(format!("{:?}", e.quadruple)).or_default() += 1;
    }
    Ok(Suite {
        results: json!({
            "limit": fx.limit,
            "intervals": table.len(),
            "quadruples": distinct,
            "exceptions": table.iter().filter(|e| e.quadruple[0] == 7).collect::<Vec<_>>(),
        }),
        claims,
    })
}

#[derive(Debug, Deserialize)]
pub struct TotientFormulasFixture {
    pub p_range: [u64; 2],
    pub q_max: u64,
    pub n_max: usize,
    pub formulas: Vec<LocatedId>,
}

pub fn totient_formulas_fixture() -> Result<TotientFormulasFixture> {
    load("totient_formulas.json", include_str!("../fixtures/totient_formulas.json"))
}

#[derive(Default)]
struct Tally {
    checked: usize,
    mismatches: Vec<Value>,
}

impl Tally {
    fn check(&mut self, model: Value, expected: i128, actual: i128) {
        self.checked += 1;
        if expected != actual {
            self.mismatches.push(json!({ "model": model, "formula": expected.to_string(), "direct": actual.to_string() }));
        }
    }
}

pub fn totient_formulas() -> Result<Suite> {
    let fx = totient_formulas_fixture()?;
    let mut tallies: BTreeMap<&str, Tally> = BTreeMap::new();
    for id in ["power", "pnq", "pn-square", "coatom-split"] {
        tallies.insert(id, Tally::default());
    }
    let split_check = |model: &IndexedInterval, label: &Value, direct: i128, tallies: &mut BTreeMap<&str, Tally>| -> Result<()> {
        for c in model.lattice().coatoms() {
            let v = totient::dual_totient_coatom_split(model, c)?;
            tallies.get_mut("coatom-split").expect("registered").check(label.clone(), direct, v);
        }
        Ok(())
    };
    for p in fx.p_range[0]..=fx.p_range[1] {
        for n in 1..=fx.n_max {
            let model = IndexedInterval::constant_model(p, n)?;
            let direct = totient::dual_totient(&model)?;
            let label = json!({ "p": p, "n": n });
            tallies.get_mut("power").expect("registered").check(label.clone(), totient::closed_form_p_n(p, n)?, direct);
            split_check(&model, &label, direct, &mut tallies)?;
            for q in p + 1..=fx.q_max {
                for m in 0..=n {
                    let model = IndexedInterval::pnq_model(p, q, n, m)?;
                    let direct = totient::dual_totient(&model)?;
                    let label = json!({ "p": p, "q": q, "n": n, "m": m });
                    let formula = totient::closed_form_p_n_q(p, q, n, m)?;
                    tallies.get_mut("pnq").expect("registered").check(label.clone(), formula, direct);
                    if q == p * p && m >= 1 {
                        let formula = totient::closed_form_p_n_p2(p, n, m)?;
                        tallies.get_mut("pn-square").expect("registered").check(label.clone(), formula, direct);
                    }
                    split_check(&model, &label, direct, &mut tallies)?;
                }
            }
        }
    }
    let mut claims = Vec::new();
    let mut results = serde_json::Map::new();
    for f in &fx.formulas {
        let tally = tallies.get(f.id.as_str()).ok_or_else(|| ReproduceError::Fixture {
            name: "totient_formulas.json",
            source: serde::de::Error::custom(format!("unknown formula `{}`", f.id)),
        })?;
        claims.push(Claim::new(
            &f.id,
            &f.paper_location,
            json!({ "mismatches": 0 }),
            json!({ "mismatches": tally.mismatches.len() }),
        ));
        results.insert(
            f.id.clone(),
            json!({ "checked": tally.checked, "mismatches": tally.mismatches.iter().take(10).collect::<Vec<_>>() }),
        );
    }
    Ok(Suite {
        results: Value::Object(results),
        claims,
    })
}

#[derive(Debug, Deserialize)]
pub struct Located {
    pub paper_location: String,
}

#[derive(Debug, Deserialize)]
pub struct OreFixture {
    pub paper_location: String,
    pub z12_count: u64,
}

#[derive(Debug, Deserialize)]
pub struct SoundnessFixture {
    pub paper_location: String,
    pub counterexamples: usize,
}

#[derive(Debug, Deserialize)]
pub struct PslD8Fixture {
    pub paper_location: String,
    pub certify: String,
    pub rule: String,
}

#[derive(Debug, Deserialize)]
pub struct CatalogFixture {
    pub max_order: usize,
    pub representation_identity: Located,
    pub ore: OreFixture,
    pub soundness: SoundnessFixture,
    pub psl_d8: PslD8Fixture,
}

pub fn catalog_fixture() -> Result<CatalogFixture> {
    load("catalog_primitivity.json", include_str!("../fixtures/catalog_primitivity.json"))
}

/// Per-group tallies of the catalog checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GroupAudit {
    pub group: String,
    pub order: usize,
    pub subgroups: usize,
    pub classes: usize,
    pub degree_square_sum_ok: bool,
    pub orthogonality_error: f64,
    pub index_identity_failures: usize,
    pub distributive_intervals: usize,
    pub ore_failures: usize,
    pub ore_count_mismatches: usize,
    pub certified_primitive: usize,
    pub undecided: usize,
    pub soundness_counterexamples: Vec<usize>,
    pub rules: BTreeMap<String, usize>,
}

/// Runs the representation, Ore and soundness checks on every interval
/// `[H, G]` of one group.
pub fn audit_group(name: &str, group: &FiniteGroup) -> Result<GroupAudit> {
    let table = reptheory::character_table(group)?;
    let full = subgroups::full_subgroup_lattice(group)?;
    let degree_sum: u64 = table.degrees().iter().map(|d| d * d).sum();
    let mut audit = GroupAudit {
        group: name.to_string(),
        order: group.order(),
        subgroups: full.len(),
        classes: table.len(),
        degree_square_sum_ok: degree_sum == group.order() as u64,
        orthogonality_error: table.row_orthogonality_error().max(table.column_orthogonality_error()),
        ..GroupAudit::default()
    };
    let top = full.top();
    for h in 0..full.len() {
        if !index_identity_holds(&table, full.member(h))? {
            audit.index_identity_failures += 1;
        }
        if !full.lattice().interval(h, top)?.lattice.is_distributive() {
            continue;
        }
        let interval = full.sub_interval(h, top)?;
        audit_distributive(&interval, &table, h, &mut audit)?;
    }
    Ok(audit)
}

fn index_identity_holds(table: &CharacterTable, sub: &FiniteGroup) -> Result<bool> {
    let dims = table.fixed_dims(sub)?;
    let total: u64 = table.degrees().iter().zip(&dims).map(|(d, k)| d * k).sum();
    Ok(total == (table.group().order() / sub.order()) as u64)
}

fn audit_distributive(interval: &GroupInterval, table: &CharacterTable, id: usize, audit: &mut GroupAudit) -> Result<()> {
    audit.distributive_intervals += 1;
    if interval.verify_ore().is_err() {
        audit.ore_failures += 1;
    }
    let indexed = IndexedInterval::from_group_interval(interval);
    if totient::euler_totient_distributive(&indexed)? != interval.generating_coset_count() as i128 {
        audit.ore_count_mismatches += 1;
    }
    let cert = certifier::certify(&indexed)?;
    if cert.is_primitive() {
        audit.certified_primitive += 1;
        let rule = cert.trace().join(" > ");
        *audit.rules.entry(rule).or_default() += 1;
        if reptheory::is_linearly_primitive(interval, table)?.is_none() {
            audit.soundness_counterexamples.push(id);
        }
    } else {
        audit.undecided += 1;
    }
    Ok(())
}

pub fn catalog_primitivity() -> Result<Suite> {
    let fx = catalog_fixture()?;
    let mut audits = Vec::new();
    for &name in catalog::SMALL_CATALOG {
        let group = catalog::group(name)?;
        if group.order() <= fx.max_order {
            audits.push(audit_group(name, &group)?);
        }
    }
    let sum = |f: fn(&GroupAudit) -> usize| audits.iter().map(f).sum::<usize>();
    let table_failures: Vec<&str> = audits
        .iter()
        .filter(|a| !a.degree_square_sum_ok || a.orthogonality_error > TOLERANCE)
        .map(|a| a.group.as_str())
        .collect();
    let z12 = subgroups::overgroup_interval(&catalog::cyclic(12), &FiniteGroup::trivial(12))?;
    let d8 = IndexedInterval::from_group_interval(&subgroups::overgroup_interval(
        &catalog::psl27(),
        &catalog::psl27_d8(),
    )?);
    let d8_cert = certifier::certify(&d8)?;
    let claims = vec![
        Claim::new(
            "character-tables",
            &fx.representation_identity.paper_location,
            json!({ "failing_groups": [] }),
            json!({ "failing_groups": table_failures }),
        ),
        Claim::new(
            "index-identity",
            &fx.representation_identity.paper_location,
            json!({ "failures": 0 }),
            json!({ "failures": sum(|a| a.index_identity_failures) }),
        ),
        Claim::new(
            "ore-witness",
            &fx.ore.paper_location,
            json!({ "failures": 0 }),
            json!({ "failures": sum(|a| a.ore_failures) }),
        ),
        Claim::new(
            "ore-count",
            &fx.ore.paper_location,
            json!({ "mismatches": 0, "z12": fx.ore.z12_count }),
            json!({ "mismatches": sum(|a| a.ore_count_mismatches), "z12": z12.generating_coset_count() }),
        ),
        Claim::new(
            "soundness",
            &fx.soundness.paper_location,
            json!({ "counterexamples": fx.soundness.counterexamples }),
            json!({ "counterexamples": sum(|a| a.soundness_counterexamples.len()) }),
        ),
        Claim::new(
            "[D8,PSL(2,7)]",
            &fx.psl_d8.paper_location,
            json!({ "certify": fx.psl_d8.certify, "rule": fx.psl_d8.rule }),
            json!({
                "certify": if d8_cert.is_primitive() { "primitive" } else { "undecided" },
                "rule": d8_cert.deciding_rule().map_or("none", |r| r.id()),
            }),
        ),
    ];
    Ok(Suite {
        results: json!({
            "groups": audits,
            "pairs": sum(|a| a.subgroups),
            "distributive_intervals": sum(|a| a.distributive_intervals),
            "certified_primitive": sum(|a| a.certified_primitive),
            "undecided": sum(|a| a.undecided),
        }),
        claims,
    })
}

#[derive(Debug, Deserialize)]
pub struct ModelFixture {
    pub paper_location: String,
    pub index: u64,
    pub rank: usize,
    pub chain_types: Vec<String>,
    pub verdict: String,
    pub trace: Vec<String>,
    pub method: Option<String>,
    pub deciding_type: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct FrontierFixture {
    pub paper_location: String,
    pub index: u64,
    pub undecided: Vec<Vec<String>>,
    #[serde(default)]
    pub informational: bool,
}

#[derive(Debug, Deserialize)]
pub struct MainTheoremFixture {
    pub models: Vec<ModelFixture>,
    pub index_frontier: Vec<FrontierFixture>,
}

pub fn main_theorem_fixture() -> Result<MainTheoremFixture> {
    load("main_theorem.json", include_str!("../fixtures/main_theorem.json"))
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Primitive => "primitive",
        Verdict::Undecided => "undecided",
    }
}

/// Verdict, rule trace, chain method and deciding type of one scenario.
pub fn scenario_summary(types: &[String]) -> Result<Value> {
    let parsed = types.iter().map(|t| t.parse::<ChainType>()).collect::<std::result::Result<Vec<_>, _>>()?;
    let scenario = ChainScenario::new(parsed)?;
    let cert = certifier::certify_scenario(&scenario)?;
    let evidence = cert.deciding_evidence();
    let field = |key: &str| evidence.and_then(|e| e.get(key)).cloned().unwrap_or(Value::Null);
    Ok(json!({
        "index": scenario.index,
        "rank": scenario.rank,
        "verdict": verdict_name(&cert.verdict),
        "trace": cert.step_trace(),
        "method": field("method"),
        "deciding_type": field("chain_type"),
    }))
}

pub fn main_theorem() -> Result<Suite> {
    let fx = main_theorem_fixture()?;
    let mut claims = Vec::new();
    for m in &fx.models {
        let actual = scenario_summary(&m.chain_types)?;
        let expected = json!({
            "index": m.index,
            "rank": m.rank,
            "verdict": m.verdict,
            "trace": m.trace,
            "method": m.method,
            "deciding_type": m.deciding_type,
        });
        claims.push(Claim::new(
            format!("model-{}-rank-{}", m.index, m.rank),
            &m.paper_location,
            expected,
            actual,
        ));
    }
    for f in &fx.index_frontier {
        let cert = certifier::certify_index(f.index)?;
        let undecided: Vec<Vec<String>> = cert.ranks.iter().flat_map(|r| r.undecided.clone()).collect();
        let claim = Claim::new(
            format!("index-frontier-{}", f.index),
            &f.paper_location,
            json!({ "undecided": f.undecided }),
            json!({ "undecided": undecided }),
        );
        claims.push(if f.informational { claim.informational() } else { claim });
    }
    let mut indices = Vec::new();
    for f in certifier::factor_products(10125, 3, 7) {
        let cert = certifier::certify_index(f.n)?;
        indices.push(cert);
    }
    Ok(Suite {
        results: json!({ "index_certificates": indices }),
        claims,
    })
}

#[derive(Debug, Deserialize)]
pub struct FamilyFixture {
    pub paper_location: String,
    pub n_max: usize,
}

#[derive(Debug, Deserialize)]
pub struct ConjectureFixture {
    pub paper_location: String,
    pub kind: String,
    pub optimal_family: FamilyFixture,
}

pub fn conjecture_fixture() -> Result<ConjectureFixture> {
    load("conjecture_monitor.json", include_str!("../fixtures/conjecture_monitor.json"))
}

/// Boolean intervals `[H, K]` of a catalog group with their rank and dual
/// totient, skipping rank 0.
pub fn boolean_intervals(group: &FiniteGroup) -> Result<Vec<(usize, usize, usize, i128)>> {
    let full = subgroups::full_subgroup_lattice(group)?;
    let indexed = IndexedInterval::from_group_interval(&full);
    let l = indexed.lattice();
    let mut out = Vec::new();
    for h in 0..l.len() {
        for k in h + 1..l.len() {
            if l.lt(h, k) && l.is_boolean_between(h, k) {
                let sub = indexed.interval(h, k)?;
                out.push((h, k, sub.rank(), totient::dual_totient(&sub)?));
            }
        }
    }
    Ok(out)
}

pub fn conjecture_monitor() -> Result<Suite> {
    let fx = conjecture_fixture()?;
    let mut checked = 0usize;
    let mut violations = Vec::new();
    let mut tight = 0usize;
    for &name in catalog::SMALL_CATALOG {
        let group = catalog::group(name)?;
        for (h, k, rank, phi_hat) in boolean_intervals(&group)? {
            checked += 1;
            let bound = 1i128 << (rank - 1);
            if phi_hat < bound {
                violations.push(json!({ "group": name, "bottom": h, "top": k, "rank": rank, "dual_totient": phi_hat.to_string() }));
            } else if phi_hat == bound {
                tight += 1;
            }
        }
    }
    let mut family = Vec::new();
    let mut claims = vec![Claim::new(
        "lower-bound",
        &fx.paper_location,
        json!({ "violations": [] }),
        json!({ "violations": violations }),
    )
    .informational()];
    for n in 1..=fx.optimal_family.n_max {
        let (g, h) = catalog::s2_times_s3_power(n);
        let interval = IndexedInterval::from_group_interval(&subgroups::overgroup_interval(&g, &h)?);
        let direct = totient::dual_totient(&interval)?;
        let split = totient::dual_totient_allsplit(&interval)?;
        family.push(json!({ "n": n, "rank": interval.rank(), "boolean": interval.is_boolean(), "direct": direct.to_string(), "allsplit": split.to_string() }));
        claims.push(
            Claim::new(
                format!("optimal-family-{n}"),
                &fx.optimal_family.paper_location,
                json!({ "boolean": true, "rank": n + 1, "direct": (1i128 << n).to_string(), "allsplit": (1i128 << n).to_string() }),
                json!({ "boolean": interval.is_boolean(), "rank": interval.rank(), "direct": direct.to_string(), "allsplit": split.to_string() }),
            )
            .informational(),
        );
    }
    Ok(Suite {
        results: json!({
            "kind": fx.kind,
            "boolean_intervals": checked,
            "attaining_bound": tight,
            "optimal_family": family,
        }),
        claims,
    })
}
