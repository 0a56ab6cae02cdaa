//! Certificates of linear primitivity for distributive intervals.
//!
//! `certify` runs a fixed pipeline of sufficient conditions and records
//! every rule it evaluates, with the numbers it used. Abstract
//! `ChainScenario`s (a boolean interval known only through its maximal chain
//! types) go through the same pipeline, minus the rules that need the
//! actual lattice.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::catalog::{self, CatalogError};
use crate::lattice::LatticeError;
use crate::subgroups::{self, SubgroupError};
use crate::totient::{self, IndexedInterval, TotientError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("interval lattice is not distributive")]
    NotDistributive,
    #[error("interval lattice is not boolean")]
    NotBoolean,
    #[error("invalid chain scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("too many chain types ({0}) to enumerate their subsets")]
    TooManyTypes(usize),
    #[error(transparent)]
    Totient(#[from] TotientError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

type Result<T> = std::result::Result<T, CertError>;

/// Sorted multiset of cover indices along one maximal chain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ChainType(Vec<u64>);

impl ChainType {
    pub fn new(mut entries: Vec<u64>) -> Self {
        entries.sort_unstable();
        ChainType(entries)
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn product(&self) -> u64 {
        self.0.iter().product()
    }

    fn without(&self, value: u64) -> ChainType {
        let mut v = self.0.clone();
        let pos = v.iter().position(|&x| x == value).expect("value is an entry");
        v.remove(pos);
        ChainType(v)
    }

    fn distinct(&self) -> Vec<u64> {
        let mut v = self.0.clone();
        v.dedup();
        v
    }

    /// `(p, n)` when every entry equals `p`.
    fn as_constant(&self) -> Option<(u64, usize)> {
        let first = *self.0.first()?;
        self.0.iter().all(|&x| x == first).then_some((first, self.0.len()))
    }

    /// `(p, q, n)` when the entries are `n-1` copies of `p` then one `q > p`.
    fn as_pnq(&self) -> Option<(u64, u64, usize)> {
        let n = self.0.len();
        if n < 2 {
            return None;
        }
        let p = self.0[0];
        let q = self.0[n - 1];
        (q > p && self.0[..n - 1].iter().all(|&x| x == p)).then_some((p, q, n))
    }

    /// `(a, b, c, n)` when the entries are `n` copies of `a` then `b <= c`,
    /// both larger than `a`.
    fn as_lemma_shape(&self) -> Option<(u64, u64, u64, usize)> {
        let len = self.0.len();
        if len < 3 {
            return None;
        }
        let a = self.0[0];
        let (b, c) = (self.0[len - 2], self.0[len - 1]);
        (b > a && self.0[..len - 2].iter().all(|&x| x == a)).then_some((a, b, c, len - 2))
    }

    /// No entry 7 and every product of two entries below 32.
    pub fn satisfies_small_split(&self) -> bool {
        let v = &self.0;
        !v.contains(&7) && (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i] * v[j] < 32))
    }

    /// As `satisfies_small_split`, but a pair of equal entries `x, x` with
    /// `x^2 >= 32` is also accepted when `x^2` has no other factorization
    /// into two entries of the type.
    pub fn satisfies_forced_square_split(&self) -> bool {
        let v = &self.0;
        if v.contains(&7) {
            return false;
        }
        let values = self.distinct();
        let pair_ok = |x: u64, y: u64| {
            if x * y < 32 {
                return true;
            }
            x == y
                && values
                    .iter()
                    .all(|&u| u == x || (x * x) % u != 0 || !values.contains(&(x * x / u)))
        };
        (0..v.len()).all(|i| (i + 1..v.len()).all(|j| pair_ok(v[i], v[j])))
    }

    pub fn split_product(&self) -> i128 {
        self.0.iter().map(|&k| k as i128 - 1).product()
    }
}

impl fmt::Display for ChainType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let x = self.0[i];
            let run = self.0[i..].iter().take_while(|&&y| y == x).count();
            parts.push(if run > 1 { format!("{x}^{run}") } else { x.to_string() });
            i += run;
        }
        write!(f, "({})", parts.join(","))
    }
}

impl std::str::FromStr for ChainType {
    type Err = CertError;

    /// Accepts `(3^5,4,10)` as well as `3,3,3,3,3,4,10`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || CertError::InvalidScenario(format!("cannot parse chain type `{text}`"));
        let body = text.trim().trim_start_matches('(').trim_end_matches(')');
        let mut entries = Vec::new();
        for part in body.split(',').map(str::trim) {
            let (base, count) = match part.split_once('^') {
                Some((b, c)) => (b.trim(), c.trim().parse::<usize>().map_err(|_| bad())?),
                None => (part, 1),
            };
            let k: u64 = base.parse().map_err(|_| bad())?;
            if k < 2 {
                return Err(bad());
            }
            entries.extend(std::iter::repeat_n(k, count));
        }
        if entries.is_empty() {
            return Err(bad());
        }
        Ok(ChainType::new(entries))
    }
}

/// Distinct chain types over all maximal chains of a boolean interval.
pub fn chain_types(interval: &IndexedInterval) -> Result<BTreeSet<ChainType>> {
    if !interval.is_boolean() {
        return Err(CertError::NotBoolean);
    }
    let l = interval.lattice();
    let n = l.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| std::cmp::Reverse(l.height(x)));
    let mut from: Vec<BTreeSet<Vec<u64>>> = vec![BTreeSet::new(); n];
    from[l.top()].insert(Vec::new());
    for &x in &order {
        if x == l.top() {
            continue;
        }
        let mut set = BTreeSet::new();
        for &y in l.upper_covers(x) {
            let k = interval.relative_index(x, y);
            for tail in &from[y] {
                let mut t = tail.clone();
                let pos = t.partition_point(|&v| v < k);
                t.insert(pos, k);
                set.insert(t);
            }
        }
        from[x] = set;
    }
    Ok(std::mem::take(&mut from[l.bottom()]).into_iter().map(ChainType).collect())
}

/// A boolean interval known only by its rank, index and the set of chain
/// types its maximal chains realize.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainScenario {
    pub rank: usize,
    pub index: u64,
    pub chain_types: Vec<ChainType>,
}

impl ChainScenario {
    pub fn new(types: Vec<ChainType>) -> Result<Self> {
        let set: BTreeSet<ChainType> = types.into_iter().collect();
        let first = set
            .iter()
            .next()
            .ok_or_else(|| CertError::InvalidScenario("no chain types".into()))?;
        let (rank, index) = (first.rank(), first.product());
        for t in &set {
            if t.rank() != rank || t.product() != index {
                return Err(CertError::InvalidScenario(format!(
                    "type {t} does not have rank {rank} and index {index}"
                )));
            }
            if t.entries().iter().any(|&k| k < 2) {
                return Err(CertError::InvalidScenario(format!("type {t} has an index below 2")));
            }
        }
        Ok(ChainScenario {
            rank,
            index,
            chain_types: set.into_iter().collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Distributive,
    BottomInterval,
    Trivial,
    RankOne,
    ReciprocalSumOne,
    ReciprocalSumTwo,
    IndexTwoAtom,
    IndexTwoCoatom,
    RankBelowSeven,
    NonzeroDualTotient,
    ChainTypeAnalysis,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::Distributive => "distributive",
            Rule::BottomInterval => "bottom-interval",
            Rule::Trivial => "trivial",
            Rule::RankOne => "rank-one",
            Rule::ReciprocalSumOne => "reciprocal-sum-one",
            Rule::ReciprocalSumTwo => "reciprocal-sum-two",
            Rule::IndexTwoAtom => "index-two-atom",
            Rule::IndexTwoCoatom => "index-two-coatom",
            Rule::RankBelowSeven => "rank-below-seven",
            Rule::NonzeroDualTotient => "nonzero-dual-totient",
            Rule::ChainTypeAnalysis => "chain-type-analysis",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Preconditions hold and the rule settles the interval.
    Fired,
    /// Preconditions hold but the rule does not settle the interval.
    Passed,
    /// The rule reduces to a sub-interval, recorded in `sub`.
    Reduced,
    /// The rule needs data the input does not carry.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Primitive,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub rule: Rule,
    pub target: String,
    pub outcome: Outcome,
    pub evidence: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub: Option<Box<Certificate>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub steps: Vec<Step>,
    /// Rules that were evaluated without settling an undecided interval.
    pub frontier: Vec<Rule>,
}

impl Certificate {
    fn new() -> Self {
        Certificate {
            verdict: Verdict::Undecided,
            steps: Vec::new(),
            frontier: Vec::new(),
        }
    }

    pub fn is_primitive(&self) -> bool {
        self.verdict == Verdict::Primitive
    }

    /// The rule that settled the interval, following reductions.
    pub fn deciding_rule(&self) -> Option<Rule> {
        let last = self.steps.last()?;
        match (&last.outcome, &last.sub) {
            (Outcome::Fired, _) => Some(last.rule),
            (Outcome::Reduced, Some(sub)) => sub.deciding_rule(),
            _ => None,
        }
    }

    /// Rule ids along the settling path, e.g. `bottom-interval > rank-one`.
    pub fn trace(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut cert = self;
        loop {
            let Some(last) = cert.steps.last() else { break };
            match (&last.outcome, &last.sub) {
                (Outcome::Reduced, Some(sub)) if sub.is_primitive() => {
                    out.push(last.rule.id());
                    cert = sub;
                }
                (Outcome::Fired, _) => {
                    out.push(last.rule.id());
                    break;
                }
                _ => break,
            }
        }
        out
    }

    /// Every evaluated step as `rule:outcome`; steps inside a reduction are
    /// prefixed with one `>` per level.
    pub fn step_trace(&self) -> Vec<String> {
        fn walk(cert: &Certificate, depth: usize, out: &mut Vec<String>) {
            for step in &cert.steps {
                let outcome = serde_json::to_value(step.outcome).expect("plain enum");
                let outcome = outcome.as_str().expect("unit variant");
                out.push(format!("{}{}:{}", ">".repeat(depth), step.rule.id(), outcome));
                if let Some(sub) = &step.sub {
                    walk(sub, depth + 1, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, 0, &mut out);
        out
    }

    /// Evidence of the settling step.
    pub fn deciding_evidence(&self) -> Option<&Value> {
        let last = self.steps.last()?;
        match (&last.outcome, &last.sub) {
            (Outcome::Fired, _) => Some(&last.evidence),
            (Outcome::Reduced, Some(sub)) => sub.deciding_evidence(),
            _ => None,
        }
    }

    fn record(&mut self, rule: Rule, target: &str, outcome: Outcome, evidence: Value) {
        self.steps.push(Step {
            rule,
            target: target.to_string(),
            outcome,
            evidence,
            sub: None,
        });
        if outcome == Outcome::Passed {
            self.frontier.push(rule);
        }
    }

    fn fire(mut self, rule: Rule, target: &str, evidence: Value) -> Self {
        self.record(rule, target, Outcome::Fired, evidence);
        self.verdict = Verdict::Primitive;
        self.frontier.clear();
        self
    }
}

fn ratio_string(r: Ratio<i128>) -> String {
    r.to_string()
}

fn describe(interval: &IndexedInterval) -> String {
    format!(
        "interval of rank {} and index {} with {} members",
        interval.rank(),
        interval.total_index(),
        interval.lattice().len()
    )
}

/// Runs the rule pipeline on a distributive interval.
pub fn certify(interval: &IndexedInterval) -> Result<Certificate> {
    let l = interval.lattice();
    let target = describe(interval);
    let mut cert = Certificate::new();
    if !l.is_distributive() {
        return Err(CertError::NotDistributive);
    }
    cert.record(Rule::Distributive, &target, Outcome::Passed, json!({ "distributive": true }));
    cert.frontier.clear();
    if !interval.is_boolean() {
        let b = l.join_all(l.atoms());
        let bottom = interval.interval(l.bottom(), b)?;
        let sub = certify_boolean(&bottom)?;
        cert.steps.push(Step {
            rule: Rule::BottomInterval,
            target,
            outcome: Outcome::Reduced,
            evidence: json!({
                "bottom_interval_rank": bottom.rank(),
                "bottom_interval_index": bottom.total_index(),
                "atoms": l.atoms().len(),
            }),
            sub: Some(Box::new(sub.clone())),
        });
        cert.verdict = sub.verdict.clone();
        cert.frontier = sub.frontier.clone();
        return Ok(cert);
    }
    let sub = certify_boolean(interval)?;
    cert.steps.extend(sub.steps);
    cert.verdict = sub.verdict;
    cert.frontier = sub.frontier;
    Ok(cert)
}

fn certify_boolean(interval: &IndexedInterval) -> Result<Certificate> {
    let l = interval.lattice();
    let target = describe(interval);
    let cert = Certificate::new();
    let rank = interval.rank();
    if rank == 0 {
        return Ok(cert.fire(Rule::Trivial, &target, json!({ "rank": 0 })));
    }
    if rank == 1 {
        return Ok(cert.fire(Rule::RankOne, &target, json!({ "index": interval.total_index() })));
    }
    let atom_indices = interval.atom_indices();
    let sum: Ratio<i128> = atom_indices.iter().map(|&k| Ratio::new(1, k as i128)).sum();
    let sum_evidence = json!({ "atom_indices": atom_indices, "reciprocal_sum": ratio_string(sum) });
    let mut cert = cert;
    if sum <= Ratio::from_integer(1) {
        return Ok(cert.fire(Rule::ReciprocalSumOne, &target, sum_evidence));
    }
    cert.record(Rule::ReciprocalSumOne, &target, Outcome::Passed, sum_evidence.clone());
    if sum <= Ratio::from_integer(2) {
        return Ok(cert.fire(Rule::ReciprocalSumTwo, &target, sum_evidence));
    }
    cert.record(Rule::ReciprocalSumTwo, &target, Outcome::Passed, sum_evidence);

    let bottom = l.bottom();
    let atoms = l.atoms();
    for &a in &atoms {
        if interval.relative_index(bottom, a) != 2 {
            continue;
        }
        let complement = l.join_all(atoms.iter().copied().filter(|&b| b != a));
        let face = interval.interval(bottom, complement)?;
        let sub = certify_boolean(&face)?;
        let primitive = sub.is_primitive();
        cert.steps.push(Step {
            rule: Rule::IndexTwoAtom,
            target: target.clone(),
            outcome: Outcome::Reduced,
            evidence: json!({ "atom_index": 2, "face_rank": face.rank(), "face_index": face.total_index() }),
            sub: Some(Box::new(sub)),
        });
        if primitive {
            cert.verdict = Verdict::Primitive;
            cert.frontier.clear();
            return Ok(cert);
        }
        cert.frontier.push(Rule::IndexTwoAtom);
    }
    for c in l.coatoms() {
        if interval.idx(c) != 2 {
            continue;
        }
        let lower = interval.interval(bottom, c)?;
        let sub = certify_boolean(&lower)?;
        let primitive = sub.is_primitive();
        cert.steps.push(Step {
            rule: Rule::IndexTwoCoatom,
            target: target.clone(),
            outcome: Outcome::Reduced,
            evidence: json!({ "coatom_index": 2, "lower_rank": lower.rank(), "lower_index": lower.total_index() }),
            sub: Some(Box::new(sub)),
        });
        if primitive {
            cert.verdict = Verdict::Primitive;
            cert.frontier.clear();
            return Ok(cert);
        }
        cert.frontier.push(Rule::IndexTwoCoatom);
    }
    if rank < 7 {
        return Ok(cert.fire(Rule::RankBelowSeven, &target, json!({ "rank": rank })));
    }
    cert.record(Rule::RankBelowSeven, &target, Outcome::Passed, json!({ "rank": rank }));

    let phi_hat = totient::dual_totient(interval)?;
    let evidence = json!({ "dual_totient": phi_hat.to_string() });
    if phi_hat != 0 {
        return Ok(cert.fire(Rule::NonzeroDualTotient, &target, evidence));
    }
    cert.record(Rule::NonzeroDualTotient, &target, Outcome::Passed, evidence);

    let types: Vec<ChainType> = chain_types(interval)?.into_iter().collect();
    match analyze_chain_types(&types)? {
        Some(found) => Ok(cert.fire(Rule::ChainTypeAnalysis, &target, found.to_json())),
        None => {
            cert.record(
                Rule::ChainTypeAnalysis,
                &target,
                Outcome::Passed,
                json!({ "chain_types": types.iter().map(ToString::to_string).collect::<Vec<_>>() }),
            );
            Ok(cert)
        }
    }
}

/// Runs the pipeline on an abstract chain scenario.
pub fn certify_scenario(scenario: &ChainScenario) -> Result<Certificate> {
    let target = format!("scenario of rank {} and index {}", scenario.rank, scenario.index);
    let mut cert = Certificate::new();
    cert.record(Rule::Distributive, &target, Outcome::Passed, json!({ "boolean": "assumed" }));
    cert.frontier.clear();
    let rank = scenario.rank;
    if rank == 0 {
        return Ok(cert.fire(Rule::Trivial, &target, json!({ "rank": 0 })));
    }
    if rank == 1 {
        return Ok(cert.fire(Rule::RankOne, &target, json!({ "index": scenario.index })));
    }
    let min_entry = scenario
        .chain_types
        .iter()
        .flat_map(|t| t.entries().iter().copied())
        .min()
        .expect("types are nonempty");
    // every atom index occurs in some chain type, so this bounds the sum
    let bound = Ratio::new(rank as i128, min_entry as i128);
    let evidence = json!({ "reciprocal_sum_upper_bound": ratio_string(bound), "min_cover_index": min_entry });
    if bound <= Ratio::from_integer(1) {
        return Ok(cert.fire(Rule::ReciprocalSumOne, &target, evidence));
    }
    cert.record(Rule::ReciprocalSumOne, &target, Outcome::Passed, evidence.clone());
    if bound <= Ratio::from_integer(2) {
        return Ok(cert.fire(Rule::ReciprocalSumTwo, &target, evidence));
    }
    cert.record(Rule::ReciprocalSumTwo, &target, Outcome::Passed, evidence);
    let has_two = min_entry == 2;
    let two_evidence = json!({ "index_two_edges": has_two });
    let two_outcome = if has_two { Outcome::NotApplicable } else { Outcome::Passed };
    cert.record(Rule::IndexTwoAtom, &target, two_outcome, two_evidence.clone());
    cert.record(Rule::IndexTwoCoatom, &target, two_outcome, two_evidence);
    cert.frontier.retain(|r| !matches!(r, Rule::IndexTwoAtom | Rule::IndexTwoCoatom));
    if rank < 7 {
        return Ok(cert.fire(Rule::RankBelowSeven, &target, json!({ "rank": rank })));
    }
    cert.record(Rule::RankBelowSeven, &target, Outcome::Passed, json!({ "rank": rank }));
    cert.record(
        Rule::NonzeroDualTotient,
        &target,
        Outcome::NotApplicable,
        json!({ "reason": "no lattice to sum over" }),
    );
    match analyze_chain_types(&scenario.chain_types)? {
        Some(found) => Ok(cert.fire(Rule::ChainTypeAnalysis, &target, found.to_json())),
        None => {
            cert.record(
                Rule::ChainTypeAnalysis,
                &target,
                Outcome::Passed,
                json!({
                    "chain_types": scenario.chain_types.iter().map(ToString::to_string).collect::<Vec<_>>(),
                }),
            );
            Ok(cert)
        }
    }
}

/// How the chain-type analysis bounded the dual totient away from zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainMethod {
    /// All entries equal `p`: the value is `(p-1)^n`.
    PowerClosedForm,
    /// Entries `(p^(n-1), q)`: closed form over the number of `q`-coatoms.
    PnqClosedForm,
    /// As above with `q = p^2`.
    PnSquareClosedForm,
    /// Some chain satisfies the small split condition: product formula.
    SmallSplitProduct,
    /// Some chain satisfies the split condition up to forced squares.
    ForcedSquareSplitProduct,
    /// Entries `(a^n, b, c)`: the iterative coatom scan.
    IterativeScan,
    /// Any single type: coatom split recursion with interval bounds.
    CoatomSplitRecursion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainAnalysis {
    pub method: ChainMethod,
    pub chain_type: ChainType,
    pub min: i128,
    pub max: i128,
}

impl ChainAnalysis {
    fn to_json(&self) -> Value {
        json!({
            "method": self.method,
            "chain_type": self.chain_type.to_string(),
            "dual_totient_min": self.min.to_string(),
            "dual_totient_max": self.max.to_string(),
        })
    }
}

/// Bounds on the dual totient that follow from the chain types alone, if
/// they exclude zero.
pub fn analyze_chain_types(types: &[ChainType]) -> Result<Option<ChainAnalysis>> {
    let found = |method, t: &ChainType, (min, max): (i128, i128)| {
        (min > 0).then(|| ChainAnalysis {
            method,
            chain_type: t.clone(),
            min,
            max,
        })
    };
    if let [t] = types {
        if let Some((p, n)) = t.as_constant() {
            let v = totient::closed_form_p_n(p, n)?;
            if let Some(a) = found(ChainMethod::PowerClosedForm, t, (v, v)) {
                return Ok(Some(a));
            }
        }
        if let Some((p, q, n)) = t.as_pnq() {
            let method = if q == p * p {
                ChainMethod::PnSquareClosedForm
            } else {
                ChainMethod::PnqClosedForm
            };
            if let Some(a) = found(method, t, pnq_range(p, q, n, 1)?) {
                return Ok(Some(a));
            }
        }
    }
    for t in types {
        if t.satisfies_small_split() {
            let v = t.split_product();
            if let Some(a) = found(ChainMethod::SmallSplitProduct, t, (v, v)) {
                return Ok(Some(a));
            }
        }
    }
    for t in types {
        if t.satisfies_forced_square_split() {
            let v = t.split_product();
            if let Some(a) = found(ChainMethod::ForcedSquareSplitProduct, t, (v, v)) {
                return Ok(Some(a));
            }
        }
    }
    if let [t] = types {
        if let Some((a, b, c, n)) = t.as_lemma_shape() {
            if (3..=12).contains(&a) && c <= 12 && (1..=6).contains(&n) {
                let range = scan_range(a, b, c, n, 1)?;
                if let Some(found) = found(ChainMethod::IterativeScan, t, range) {
                    return Ok(Some(found));
                }
            }
        }
        let range = coatom_split_range(t, &mut HashMap::new())?;
        if let Some(found) = found(ChainMethod::CoatomSplitRecursion, t, range) {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Range of the `p^(n-1) q` closed form over `m_min <= m <= n`.
pub fn pnq_range(p: u64, q: u64, n: usize, m_min: usize) -> Result<(i128, i128)> {
    let mut lo = i128::MAX;
    let mut hi = i128::MIN;
    for m in m_min..=n {
        let v = totient::closed_form_p_n_q(p, q, n, m)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

fn combine(c: u64, v: (i128, i128), w: (i128, i128)) -> Result<(i128, i128)> {
    let c = c as i128;
    let lo = c.checked_mul(v.0).and_then(|x| x.checked_sub(w.1));
    let hi = c.checked_mul(v.1).and_then(|x| x.checked_sub(w.0));
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(TotientError::Overflow.into()),
    }
}

fn scale(c: u64, v: (i128, i128)) -> Result<(i128, i128)> {
    let c = c as i128 - 1;
    match (c.checked_mul(v.0), c.checked_mul(v.1)) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(TotientError::Overflow.into()),
    }
}

fn merge(acc: Option<(i128, i128)>, v: (i128, i128)) -> Option<(i128, i128)> {
    Some(match acc {
        None => v,
        Some((lo, hi)) => (lo.min(v.0), hi.max(v.1)),
    })
}

/// Range of the dual totient over type `(a^n, b, c)` via the coatom of
/// index `c`, branching on the index of its complementary atom.
fn scan_range(a: u64, b: u64, c: u64, n: usize, m_min: usize) -> Result<(i128, i128)> {
    let v = pnq_range(a, b, n + 1, m_min)?;
    let mut acc = merge(None, scale(c, v)?);
    let w = pnq_range(a, c, n + 1, m_min)?;
    acc = merge(acc, combine(c, v, w)?);
    if n >= 1 {
        let s = scan_range(a, b, c, n - 1, m_min)?;
        acc = merge(acc, combine(c, v, s)?);
    }
    Ok(acc.expect("at least one branch"))
}

/// Bounds for a single chain type by repeated coatom splitting at its
/// largest entry.
fn coatom_split_range(t: &ChainType, memo: &mut HashMap<ChainType, (i128, i128)>) -> Result<(i128, i128)> {
    if let Some(&r) = memo.get(t) {
        return Ok(r);
    }
    let entries = t.entries();
    let result = if entries.len() == 1 {
        let v = entries[0] as i128 - 1;
        (v, v)
    } else if let Some((p, n)) = t.as_constant() {
        let v = totient::closed_form_p_n(p, n)?;
        (v, v)
    } else if let Some((p, q, n)) = t.as_pnq() {
        pnq_range(p, q, n, 1)?
    } else if t.satisfies_small_split() {
        let v = t.split_product();
        (v, v)
    } else {
        let c = *entries.last().expect("nonempty");
        let v = coatom_split_range(&t.without(c), memo)?;
        let mut acc = None;
        for x in t.distinct() {
            let branch = if x == c {
                scale(c, v)?
            } else {
                let w = coatom_split_range(&t.without(x), memo)?;
                combine(c, v, w)?
            };
            acc = merge(acc, branch);
        }
        acc.expect("at least one branch")
    };
    memo.insert(t.clone(), result);
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanResult {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub n: usize,
    pub min: i128,
    pub max: i128,
    pub bound: i128,
    pub pass: bool,
}

/// The iterative check for type `(a^n, b, c)`: minimum of the dual totient
/// over all branches against the bound `(a-1)^(n+2)`.
pub fn lemma_check_scan(a: u64, b: u64, c: u64, n: usize) -> Result<ScanResult> {
    lemma_check_scan_with_m_min(a, b, c, n, 1)
}

/// As `lemma_check_scan`, enumerating the number of `q`-coatoms of each
/// closed-form sub-interval from `m_min` upward.
pub fn lemma_check_scan_with_m_min(a: u64, b: u64, c: u64, n: usize, m_min: usize) -> Result<ScanResult> {
    if !(3 <= a && a <= b && b <= c && c <= 12) || !(1..=6).contains(&n) {
        return Err(CertError::InvalidParameters(format!(
            "need 3 <= a <= b <= c <= 12 and 1 <= n <= 6; got a={a} b={b} c={c} n={n}"
        )));
    }
    let (min, max) = scan_range(a, b, c, n, m_min)?;
    let bound = (a as i128 - 1).pow(n as u32 + 2);
    Ok(ScanResult {
        a,
        b,
        c,
        n,
        min,
        max,
        bound,
        pass: min >= bound,
    })
}

/// Every scan in the full parameter range.
pub fn lemma_check_all(m_min: usize) -> Result<Vec<ScanResult>> {
    let mut out = Vec::new();
    for a in 3..=12 {
        for b in a..=12 {
            for c in b..=12 {
                for n in 1..=6 {
                    out.push(lemma_check_scan_with_m_min(a, b, c, n, m_min)?);
                }
            }
        }
    }
    Ok(out)
}

/// `true` iff some chain type satisfies the small split condition.
pub fn check_allsplit_small(types: &[ChainType]) -> bool {
    types.iter().any(ChainType::satisfies_small_split)
}

/// As `check_allsplit_small` on the chain types of a boolean interval.
pub fn check_allsplit_small_interval(interval: &IndexedInterval) -> Result<bool> {
    let types: Vec<ChainType> = chain_types(interval)?.into_iter().collect();
    Ok(check_allsplit_small(&types))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorProduct {
    pub n: u64,
    /// Factorizations with at least `min_count` parts, each ascending.
    pub factorizations: Vec<Vec<u64>>,
}

impl FactorProduct {
    pub fn max_parts(&self) -> usize {
        self.factorizations.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_parts(&self, parts: usize) -> bool {
        self.factorizations.iter().any(|f| f.len() == parts)
    }
}

/// Every `n < limit` that is a product of at least `min_count` integers,
/// each at least `min_factor`.
pub fn factor_products(limit: u64, min_factor: u64, min_count: usize) -> Vec<FactorProduct> {
    fn walk(
        product: u64,
        smallest: u64,
        parts: &mut Vec<u64>,
        limit: u64,
        min_count: usize,
        out: &mut BTreeMap<u64, Vec<Vec<u64>>>,
    ) {
        if parts.len() >= min_count {
            out.entry(product).or_default().push(parts.clone());
        }
        let mut f = smallest;
        while product.saturating_mul(f) < limit {
            parts.push(f);
            walk(product * f, f, parts, limit, min_count, out);
            parts.pop();
            f += 1;
        }
    }
    let mut out = BTreeMap::new();
    if min_factor >= 2 {
        walk(1, min_factor, &mut Vec::new(), limit, min_count, &mut out);
    }
    out.into_iter()
        .map(|(n, mut factorizations)| {
            factorizations.sort();
            FactorProduct { n, factorizations }
        })
        .collect()
}

/// Chain types of `rank` entries, each at least `min_factor`, with product
/// `index`.
pub fn possible_chain_types(index: u64, rank: usize, min_factor: u64) -> Vec<ChainType> {
    fn walk(rest: u64, smallest: u64, slots: usize, parts: &mut Vec<u64>, out: &mut Vec<ChainType>) {
        if slots == 0 {
            if rest == 1 {
                out.push(ChainType(parts.clone()));
            }
            return;
        }
        let mut f = smallest;
        while f.checked_pow(slots as u32).is_some_and(|v| v <= rest) {
            if rest % f == 0 {
                parts.push(f);
                walk(rest / f, f, slots - 1, parts, out);
                parts.pop();
            }
            f += 1;
        }
    }
    let mut out = Vec::new();
    if min_factor >= 2 && index >= 1 {
        walk(index, min_factor, rank, &mut Vec::new(), &mut out);
    }
    out
}

/// Result of certifying every combination of chain types one index allows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexCertificate {
    pub index: u64,
    pub verdict: Verdict,
    pub ranks: Vec<RankCoverage>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCoverage {
    pub rank: usize,
    pub possible_types: Vec<String>,
    pub combinations_checked: usize,
    /// Combinations of chain types none of the rules settles.
    pub undecided: Vec<Vec<String>>,
    /// Deciding method per combination, keyed by the combination.
    pub methods: BTreeMap<String, String>,
}

/// Largest number of chain types whose subsets `certify_index` enumerates.
pub const MAX_INDEX_TYPES: usize = 12;

/// Certifies every boolean interval of the given index whose cover indices
/// are all at least 3, by enumerating each nonempty set of chain types that
/// could occur together at each rank of 7 or more.
pub fn certify_index(index: u64) -> Result<IndexCertificate> {
    let mut ranks = Vec::new();
    let mut verdict = Verdict::Primitive;
    let max_rank = if index < 3 { 0 } else { (index as f64).log(3.0).floor() as usize + 1 };
    for rank in 7..=max_rank {
        let types = possible_chain_types(index, rank, 3);
        if types.is_empty() {
            continue;
        }
        if types.len() > MAX_INDEX_TYPES {
            return Err(CertError::TooManyTypes(types.len()));
        }
        let mut undecided = Vec::new();
        let mut methods = BTreeMap::new();
        let count = (1usize << types.len()) - 1;
        for mask in 1..=count {
            let subset: Vec<ChainType> = (0..types.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| types[i].clone())
                .collect();
            let key = subset.iter().map(ToString::to_string).collect::<Vec<_>>();
            let cert = certify_scenario(&ChainScenario::new(subset)?)?;
            match cert.deciding_evidence().and_then(|e| e.get("method")).and_then(Value::as_str) {
                Some(m) if cert.is_primitive() => {
                    methods.insert(key.join(" "), m.to_string());
                }
                _ if cert.is_primitive() => {
                    let rule = cert.deciding_rule().map_or("unknown", Rule::id);
                    methods.insert(key.join(" "), rule.to_string());
                }
                _ => undecided.push(key),
            }
        }
        if !undecided.is_empty() {
            verdict = Verdict::Undecided;
        }
        ranks.push(RankCoverage {
            rank,
            possible_types: types.iter().map(ToString::to_string).collect(),
            combinations_checked: count,
            undecided,
            methods,
        });
    }
    Ok(IndexCertificate { index, verdict, ranks })
}

/// One rank-2 boolean interval `[H, G]` with atoms `K`, `L` ordered so that
/// `|G:K| <= |G:L|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rank2Entry {
    pub group: String,
    /// Ids of `H` and `G` in the full subgroup lattice of `group`.
    pub bottom: usize,
    pub top: usize,
    pub bottom_order: usize,
    pub top_order: usize,
    /// `(|G:K|, |G:L|, |L:H|, |K:H|)`.
    pub quadruple: [u64; 4],
    /// `(a,b) = (c,d)`, or `a = b = 7` with `c = d` in `{3, 4}`.
    pub consistent: bool,
}

fn quadruple_of(k: usize, l: usize, h: usize, g: usize, rel: impl Fn(usize, usize) -> u64) -> [u64; 4] {
    let (k, l) = if rel(k, g) <= rel(l, g) { (k, l) } else { (l, k) };
    [rel(k, g), rel(l, g), rel(h, l), rel(h, k)]
}

/// `(|G:K|, |G:L|, |L:H|, |K:H|)` for a boolean interval of rank 2.
pub fn rank2_quadruple(interval: &IndexedInterval) -> Result<[u64; 4]> {
    let l = interval.lattice();
    let atoms = l.atoms();
    if !interval.is_boolean() || atoms.len() != 2 {
        return Err(CertError::NotBoolean);
    }
    Ok(quadruple_of(atoms[0], atoms[1], l.bottom(), l.top(), |x, y| interval.relative_index(x, y)))
}

pub fn quadruple_consistent(q: [u64; 4]) -> bool {
    let [a, b, c, d] = q;
    if a == 7 {
        b == 7 && c == d && (c == 3 || c == 4)
    } else {
        (a, b) == (c, d)
    }
}

/// Every rank-2 boolean interval of index below `limit` inside the named
/// catalog groups.
pub fn rank2_index_table_for(groups: &[&str], limit: u64) -> Result<Vec<Rank2Entry>> {
    let mut out = Vec::new();
    for &name in groups {
        let group = catalog::group(name)?;
        let full = subgroups::full_subgroup_lattice(&group)?;
        let l = full.lattice();
        for h in 0..l.len() {
            for g in h + 1..l.len() {
                if !l.lt(h, g) || full.relative_index(h, g) >= limit {
                    continue;
                }
                let atoms: Vec<usize> = l.upper_covers(h).iter().copied().filter(|&k| l.lt(k, g)).collect();
                if atoms.len() != 2 || l.elements_between(h, g).len() != 4 {
                    continue;
                }
                let quadruple = quadruple_of(atoms[0], atoms[1], h, g, |x, y| full.relative_index(x, y));
                out.push(Rank2Entry {
                    group: name.to_string(),
                    bottom: h,
                    top: g,
                    bottom_order: full.member(h).order(),
                    top_order: full.member(g).order(),
                    quadruple,
                    consistent: quadruple_consistent(quadruple),
                });
            }
        }
    }
    Ok(out)
}

/// `rank2_index_table_for` over the whole small catalog.
pub fn rank2_index_table(limit: u64) -> Result<Vec<Rank2Entry>> {
    rank2_index_table_for(catalog::SMALL_CATALOG, limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FiniteLattice;

    fn ct(v: &[u64]) -> ChainType {
        ChainType::new(v.to_vec())
    }

    fn threes(k: usize, rest: &[u64]) -> ChainType {
        let mut v = vec![3; k];
        v.extend_from_slice(rest);
        ChainType::new(v)
    }

    #[test]
    fn chain_type_display() {
        assert_eq!(threes(5, &[4, 10]).to_string(), "(3^5,4,10)");
        assert_eq!(ct(&[7, 3]).to_string(), "(3,7)");
    }

    #[test]
    fn chain_types_of_models() {
        let constant = IndexedInterval::constant_model(3, 3).unwrap();
        let types = chain_types(&constant).unwrap();
        assert_eq!(types.into_iter().collect::<Vec<_>>(), vec![ct(&[3, 3, 3])]);
        let pnq = IndexedInterval::pnq_model(3, 5, 3, 2).unwrap();
        assert_eq!(chain_types(&pnq).unwrap().len(), 1);
        let chain = IndexedInterval::new(FiniteLattice::chain(2), vec![4, 2, 1]).unwrap();
        assert_eq!(chain_types(&chain).unwrap_err(), CertError::NotBoolean);
    }

    #[test]
    fn small_split_examples() {
        assert!(check_allsplit_small(&[ct(&[3; 9])]));
        assert!(!check_allsplit_small(&[threes(5, &[4, 10])]));
        assert!(!check_allsplit_small(&[threes(6, &[7])]));
        assert!(threes(5, &[6, 6]).satisfies_forced_square_split());
        assert!(!threes(5, &[4, 9]).satisfies_forced_square_split());
        assert!(!threes(6, &[12]).satisfies_forced_square_split());
    }

    #[test]
    fn factor_list_boundaries() {
        assert!(factor_products(2187, 3, 7).is_empty());
        let list = factor_products(10125, 3, 7);
        let seven: Vec<u64> = list.iter().filter(|f| f.has_parts(7)).map(|f| f.n).collect();
        assert_eq!(seven.len(), 25);
        assert_eq!(seven.first(), Some(&2187));
        assert_eq!(seven.last(), Some(&9720));
        let eight: Vec<u64> = list.iter().filter(|f| f.has_parts(8)).map(|f| f.n).collect();
        assert_eq!(eight, vec![6561, 8748]);
        assert!(list.iter().all(|f| f.max_parts() <= 8));
    }

    #[test]
    fn possible_types_of_9720() {
        let types = possible_chain_types(9720, 7, 3);
        assert_eq!(types, vec![threes(5, &[4, 10]), threes(5, &[5, 8]), threes(4, &[4, 5, 6])]);
    }

    #[test]
    fn scan_parameter_checks() {
        assert!(lemma_check_scan(3, 4, 5, 0).is_err());
        assert!(lemma_check_scan(2, 4, 5, 1).is_err());
        assert!(lemma_check_scan(3, 5, 4, 1).is_err());
        assert!(lemma_check_scan(3, 4, 5, 5).unwrap().pass);
    }

    #[test]
    fn scenario_9720_is_undecided() {
        let scenario = ChainScenario::new(vec![threes(5, &[4, 10]), threes(5, &[5, 8])]).unwrap();
        let cert = certify_scenario(&scenario).unwrap();
        assert_eq!(cert.verdict, Verdict::Undecided);
        assert!(cert.frontier.contains(&Rule::ChainTypeAnalysis));
        let index = certify_index(9720).unwrap();
        assert_eq!(index.verdict, Verdict::Undecided);
        assert_eq!(index.ranks[0].undecided, vec![vec!["(3^5,4,10)".to_string(), "(3^5,5,8)".to_string()]]);
    }

    #[test]
    fn synthetic_b7_fires_on_dual_totient() {
        let model = IndexedInterval::constant_model(3, 7).unwrap();
        let cert = certify(&model).unwrap();
        assert!(cert.is_primitive());
        assert_eq!(cert.deciding_rule(), Some(Rule::NonzeroDualTotient));
        assert_eq!(cert.deciding_evidence().unwrap()["dual_totient"], "128");
    }

    #[test]
    fn non_distributive_is_refused() {
        let m3 = FiniteLattice::diamond_m3();
        let model = IndexedInterval::new(m3, vec![4, 2, 2, 2, 1]).unwrap();
        assert_eq!(certify(&model).unwrap_err(), CertError::NotDistributive);
    }

    #[test]
    fn non_boolean_reduces_to_bottom_interval() {
        let (l, divs) = FiniteLattice::divisors(12);
        let model = IndexedInterval::new(l, divs.iter().map(|d| 12 / d).collect()).unwrap();
        let cert = certify(&model).unwrap();
        assert!(cert.is_primitive());
        assert_eq!(cert.trace(), vec!["bottom-interval", "reciprocal-sum-one"]);
    }

    #[test]
    fn index_two_coatom_recursion() {
        // rank 3 boolean with cover indices 2, 3, 3; the coatom of index 2
        // leaves a rank 2 interval
        let model = IndexedInterval::boolean_model(3, |mask| {
            let missing: u64 = [2u64, 3, 3]
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 0)
                .map(|(_, k)| *k)
                .product();
            missing
        })
        .unwrap();
        let cert = certify(&model).unwrap();
        assert!(cert.is_primitive());
    }
}
