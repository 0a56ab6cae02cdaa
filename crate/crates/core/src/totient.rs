//! Euler and dual Euler totients of index-labelled intervals.
//!
//! All sums are exact `i128` arithmetic with overflow checks; the rational
//! closed forms go through `Ratio<i128>` and are required to land on an
//! integer.

use std::sync::OnceLock;

use num_rational::Ratio;
use thiserror::Error;

use crate::lattice::{FiniteLattice, LatticeError};
use crate::subgroups::GroupInterval;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TotientError {
    #[error("interval lattice is not graded")]
    NotGraded,
    #[error("interval lattice is not distributive")]
    NotDistributive,
    #[error("interval lattice is not boolean")]
    NotBoolean,
    #[error("element {0} is not a coatom")]
    NotACoatom(usize),
    #[error("split condition fails for atom {atom} at member {member}")]
    SplitConditionFails { atom: usize, member: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid index labels: {0}")]
    InvalidLabels(String),
    #[error("integer overflow")]
    Overflow,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

type Result<T> = std::result::Result<T, TotientError>;

/// A graded lattice whose elements carry indices `|G : K|`.
#[derive(Debug, Clone)]
pub struct IndexedInterval {
    lattice: FiniteLattice,
    idx: Vec<u64>,
}

const MAX_CACHED_RANK: usize = 12;

fn cached_boolean(n: usize) -> FiniteLattice {
    static CACHE: [OnceLock<FiniteLattice>; MAX_CACHED_RANK + 1] =
        [const { OnceLock::new() }; MAX_CACHED_RANK + 1];
    if n <= MAX_CACHED_RANK {
        CACHE[n].get_or_init(|| FiniteLattice::boolean(n)).clone()
    } else {
        FiniteLattice::boolean(n)
    }
}

impl IndexedInterval {
    /// Checks that `idx(top) = 1` and that indices strictly decrease and
    /// divide along the order.
    pub fn new(lattice: FiniteLattice, idx: Vec<u64>) -> Result<Self> {
        if idx.len() != lattice.len() {
            return Err(TotientError::InvalidLabels(format!(
                "{} labels for {} elements",
                idx.len(),
                lattice.len()
            )));
        }
        if idx[lattice.top()] != 1 {
            return Err(TotientError::InvalidLabels("top must have index 1".into()));
        }
        for x in 0..lattice.len() {
            if idx[x] == 0 {
                return Err(TotientError::InvalidLabels(format!("element {x} has index 0")));
            }
            for &y in lattice.upper_covers(x) {
                if idx[x] <= idx[y] || idx[x] % idx[y] != 0 {
                    return Err(TotientError::InvalidLabels(format!(
                        "cover {x} < {y} has indices {} and {}",
                        idx[x], idx[y]
                    )));
                }
            }
        }
        Ok(IndexedInterval { lattice, idx })
    }

    pub fn from_group_interval(interval: &GroupInterval) -> Self {
        IndexedInterval {
            lattice: interval.lattice().clone(),
            idx: interval.indices().to_vec(),
        }
    }

    /// Boolean lattice on `n` atoms; element `mask` gets `index(mask)`.
    pub fn boolean_model<F: Fn(u32) -> u64>(n: usize, index: F) -> Result<Self> {
        let lattice = cached_boolean(n);
        let idx = (0..lattice.len()).map(|m| index(m as u32)).collect();
        Self::new(lattice, idx)
    }

    /// Boolean model of rank `n` with every cover index `p`.
    pub fn constant_model(p: u64, n: usize) -> Result<Self> {
        Self::boolean_model(n, |mask| p.pow(n as u32 - mask.count_ones()))
    }

    /// Boolean model of rank `n` and index `p^(n-1) q` in which exactly the
    /// coatoms missing one of the first `m` atoms have index `q`.
    pub fn pnq_model(p: u64, q: u64, n: usize, m: usize) -> Result<Self> {
        if m > n {
            return Err(TotientError::InvalidParameters(format!("m = {m} exceeds rank {n}")));
        }
        let special: u32 = (1u32 << m) - 1;
        Self::boolean_model(n, |mask| {
            let missing = n as u32 - mask.count_ones();
            if mask & special == special {
                p.pow(missing)
            } else {
                p.pow(missing - 1) * q
            }
        })
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn idx(&self, x: usize) -> u64 {
        self.idx[x]
    }

    pub fn indices(&self) -> &[u64] {
        &self.idx
    }

    /// `|G : H|`.
    pub fn total_index(&self) -> u64 {
        self.idx[self.lattice.bottom()]
    }

    pub fn rank(&self) -> usize {
        self.lattice.length()
    }

    /// `|upper : lower|`.
    pub fn relative_index(&self, lower: usize, upper: usize) -> u64 {
        self.idx[lower] / self.idx[upper]
    }

    /// The interval `[a, b]`, re-indexed relative to `b`.
    pub fn interval(&self, a: usize, b: usize) -> Result<Self> {
        let sub = self.lattice.interval(a, b)?;
        let top = self.idx[b];
        let idx = sub.embedding.iter().map(|&i| self.idx[i] / top).collect();
        Ok(IndexedInterval {
            lattice: sub.lattice,
            idx,
        })
    }

    pub fn is_boolean(&self) -> bool {
        self.lattice.is_boolean_between(self.lattice.bottom(), self.lattice.top())
    }

    /// Cover indices of the atoms over the bottom, i.e. `|A : H|`.
    pub fn atom_indices(&self) -> Vec<u64> {
        let b = self.lattice.bottom();
        self.lattice.atoms().into_iter().map(|a| self.relative_index(b, a)).collect()
    }

    /// Indices `|G : L|` of the coatoms.
    pub fn coatom_indices(&self) -> Vec<u64> {
        self.lattice.coatoms().into_iter().map(|c| self.idx[c]).collect()
    }
}

fn ranks(lattice: &FiniteLattice) -> Result<Vec<usize>> {
    if !lattice.is_graded() {
        return Err(TotientError::NotGraded);
    }
    Ok((0..lattice.len()).map(|x| lattice.height(x)).collect())
}

fn signed_sum<I: Iterator<Item = (bool, u64)>>(mut terms: I) -> Result<i128> {
    terms.try_fold(0i128, |acc, (negative, v)| {
        let v = v as i128;
        if negative {
            acc.checked_sub(v)
        } else {
            acc.checked_add(v)
        }
        .ok_or(TotientError::Overflow)
    })
}

/// `sum_K (-1)^rank(K) |G : K|`.
pub fn dual_totient(interval: &IndexedInterval) -> Result<i128> {
    let r = ranks(&interval.lattice)?;
    signed_sum((0..r.len()).map(|k| (r[k] % 2 == 1, interval.idx[k])))
}

/// `sum_K (-1)^corank(K) |K : H|`.
pub fn euler_totient(interval: &IndexedInterval) -> Result<i128> {
    let r = ranks(&interval.lattice)?;
    let total = r[interval.lattice.top()];
    let base = interval.total_index();
    signed_sum((0..r.len()).map(|k| ((total - r[k]) % 2 == 1, base / interval.idx[k])))
}

/// `|T : H| * phi(T, G)` with `T` the meet of the coatoms.
pub fn euler_totient_distributive(interval: &IndexedInterval) -> Result<i128> {
    let l = &interval.lattice;
    if !l.is_distributive() {
        return Err(TotientError::NotDistributive);
    }
    let t = l.meet_all(l.coatoms());
    let factor = interval.relative_index(l.bottom(), t) as i128;
    euler_totient(&interval.interval(t, l.top())?)?
        .checked_mul(factor)
        .ok_or(TotientError::Overflow)
}

/// `|G : B| * phi_hat(H, B)` with `B` the join of the atoms.
pub fn dual_totient_distributive(interval: &IndexedInterval) -> Result<i128> {
    let l = &interval.lattice;
    if !l.is_distributive() {
        return Err(TotientError::NotDistributive);
    }
    let b = l.join_all(l.atoms());
    let factor = interval.idx[b] as i128;
    dual_totient(&interval.interval(l.bottom(), b)?)?
        .checked_mul(factor)
        .ok_or(TotientError::Overflow)
}

fn checked_pow(base: i128, exp: usize) -> Result<i128> {
    base.checked_pow(exp as u32).ok_or(TotientError::Overflow)
}

fn binomial(n: usize, k: usize) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `(p-1)^n`, evaluated as `sum_k (-1)^k C(n,k) p^(n-k)`.
pub fn closed_form_p_n(p: u64, n: usize) -> Result<i128> {
    if p < 2 {
        return Err(TotientError::InvalidParameters(format!("p = {p} must be at least 2")));
    }
    (0..=n).try_fold(0i128, |acc, k| {
        let term = binomial(n, k)
            .checked_mul(checked_pow(p as i128, n - k)?)
            .ok_or(TotientError::Overflow)?;
        if k % 2 == 1 { acc.checked_sub(term) } else { acc.checked_add(term) }
            .ok_or(TotientError::Overflow)
    })
}

fn ratio_pow(base: i128, exp: usize) -> Result<Ratio<i128>> {
    Ok(Ratio::from_integer(checked_pow(base, exp)?))
}

fn integral(value: Ratio<i128>) -> Result<i128> {
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(TotientError::InvalidParameters(format!("closed form is not integral: {value}")))
    }
}

/// `(p-1)^n [1 + ((q-p)/p)(1 - 1/(1-p)^m)]` for index `p^(n-1) q` with `m`
/// coatoms of index `q`.
pub fn closed_form_p_n_q(p: u64, q: u64, n: usize, m: usize) -> Result<i128> {
    if p < 2 || q < p || n < 1 || m > n {
        return Err(TotientError::InvalidParameters(format!(
            "need 2 <= p <= q, n >= 1, m <= n; got p={p} q={q} n={n} m={m}"
        )));
    }
    let (p, q) = (p as i128, q as i128);
    let one = Ratio::from_integer(1);
    let shift = Ratio::new(q - p, p) * (one - one / ratio_pow(1 - p, m)?);
    integral(ratio_pow(p - 1, n)? * (one + shift))
}

/// `(p-1)^(n+1) + (p-1)^n - (-1)^m (p-1)^(n+1-m)` for index `p^(n+1)` in
/// rank `n`, `m` coatoms of index `p^2`.
pub fn closed_form_p_n_p2(p: u64, n: usize, m: usize) -> Result<i128> {
    if p < 2 || m < 1 || m > n {
        return Err(TotientError::InvalidParameters(format!(
            "need p >= 2 and 1 <= m <= n; got p={p} n={n} m={m}"
        )));
    }
    let b = p as i128 - 1;
    let sign = if m % 2 == 0 { 1 } else { -1 };
    let value = checked_pow(b, n + 1)?
        .checked_add(checked_pow(b, n)?)
        .and_then(|v| v.checked_sub(sign * checked_pow(b, n + 1 - m).ok()?))
        .ok_or(TotientError::Overflow)?;
    Ok(value)
}

/// `q phi_hat(H, L) - phi_hat(A, G)` with `A` the complement of the coatom
/// `L` and `q = |G : L|`.
pub fn dual_totient_coatom_split(interval: &IndexedInterval, coatom: usize) -> Result<i128> {
    let l = &interval.lattice;
    if !interval.is_boolean() {
        return Err(TotientError::NotBoolean);
    }
    if !l.coatoms().contains(&coatom) {
        return Err(TotientError::NotACoatom(coatom));
    }
    let a = l
        .atoms()
        .into_iter()
        .find(|&a| !l.leq(a, coatom))
        .expect("a coatom misses exactly one atom in a boolean lattice");
    let q = interval.idx[coatom] as i128;
    let lower = dual_totient(&interval.interval(l.bottom(), coatom)?)?;
    let upper = dual_totient(&interval.interval(a, l.top())?)?;
    q.checked_mul(lower)
        .and_then(|v| v.checked_sub(upper))
        .ok_or(TotientError::Overflow)
}

/// Checks that every atom `A` keeps its relative index across the face
/// `[H, A^c]`: `|K v A : K| = |A : H|` for all `K` there.
pub fn check_allsplit(interval: &IndexedInterval) -> Result<()> {
    let l = &interval.lattice;
    if !interval.is_boolean() {
        return Err(TotientError::NotBoolean);
    }
    let bottom = l.bottom();
    let atoms = l.atoms();
    for &a in &atoms {
        let ka = interval.relative_index(bottom, a);
        let complement = l.join_all(atoms.iter().copied().filter(|&b| b != a));
        for k in l.elements_between(bottom, complement) {
            if interval.relative_index(k, l.join(k, a)) != ka {
                return Err(TotientError::SplitConditionFails { atom: a, member: k });
            }
        }
    }
    Ok(())
}

/// `prod_A (|A : H| - 1)` once the all-split condition is verified.
pub fn dual_totient_allsplit(interval: &IndexedInterval) -> Result<i128> {
    check_allsplit(interval)?;
    interval
        .atom_indices()
        .into_iter()
        .try_fold(1i128, |acc, k| acc.checked_mul(k as i128 - 1).ok_or(TotientError::Overflow))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_model(q: u64) -> IndexedInterval {
        IndexedInterval::new(FiniteLattice::chain(1), vec![q, 1]).unwrap()
    }

    #[test]
    fn two_chain_normalization() {
        for q in 2..10 {
            assert_eq!(dual_totient(&chain_model(q)).unwrap(), q as i128 - 1);
            assert_eq!(euler_totient(&chain_model(q)).unwrap(), q as i128 - 1);
        }
    }

    #[test]
    fn label_validation() {
        let bad_top = IndexedInterval::new(FiniteLattice::chain(1), vec![3, 2]);
        assert!(matches!(bad_top, Err(TotientError::InvalidLabels(_))));
        let not_decreasing = IndexedInterval::new(FiniteLattice::chain(2), vec![3, 3, 1]);
        assert!(matches!(not_decreasing, Err(TotientError::InvalidLabels(_))));
        let wrong_len = IndexedInterval::new(FiniteLattice::chain(2), vec![3, 1]);
        assert!(matches!(wrong_len, Err(TotientError::InvalidLabels(_))));
    }

    #[test]
    fn rank_two_constant() {
        let model = IndexedInterval::constant_model(3, 2).unwrap();
        assert_eq!(model.total_index(), 9);
        assert_eq!(dual_totient(&model).unwrap(), 4);
    }

    #[test]
    fn not_graded_is_refused() {
        let n5 = FiniteLattice::from_relation(5, |x, y| {
            x == y || x == 0 || y == 4 || (x == 1 && y == 2)
        })
        .unwrap();
        let model = IndexedInterval::new(n5, vec![12, 6, 2, 3, 1]).unwrap();
        assert_eq!(dual_totient(&model).unwrap_err(), TotientError::NotGraded);
    }

    #[test]
    fn closed_forms_small_values() {
        assert_eq!(closed_form_p_n(3, 2).unwrap(), 4);
        assert_eq!(closed_form_p_n(2, 1).unwrap(), 1);
        assert_eq!(closed_form_p_n(3, 7).unwrap(), 128);
        assert_eq!(closed_form_p_n_q(3, 5, 2, 1).unwrap(), 8);
        assert_eq!(closed_form_p_n_q(3, 7, 2, 2).unwrap(), 8);
        for q in 2..12 {
            assert_eq!(closed_form_p_n_q(2, q, 1, 1).unwrap(), q as i128 - 1);
        }
        assert_eq!(closed_form_p_n_p2(3, 1, 1).unwrap(), 8);
        assert_eq!(closed_form_p_n_p2(3, 2, 2).unwrap(), 10);
    }

    #[test]
    fn closed_form_parameter_errors() {
        assert!(closed_form_p_n(1, 3).is_err());
        assert!(closed_form_p_n_q(5, 3, 2, 1).is_err());
        assert!(closed_form_p_n_q(3, 5, 2, 3).is_err());
        assert!(closed_form_p_n_q(3, 5, 0, 0).is_err());
        assert!(closed_form_p_n_p2(3, 2, 0).is_err());
        assert!(closed_form_p_n_p2(3, 2, 3).is_err());
    }

    #[test]
    fn remark_formula_is_prop_formula_with_square() {
        for p in 2..8u64 {
            for n in 1..7 {
                for m in 1..=n {
                    assert_eq!(
                        closed_form_p_n_p2(p, n, m).unwrap(),
                        closed_form_p_n_q(p, p * p, n, m).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn distributive_extensions_on_divisor_lattices() {
        // [1, Z/12] and [1, Z/8]: index of the divisor d is n/d
        for (n, phi, phi_hat) in [(12u64, 4, 4), (8, 4, 4)] {
            let (l, divs) = FiniteLattice::divisors(n);
            let idx = divs.iter().map(|d| n / d).collect();
            let model = IndexedInterval::new(l, idx).unwrap();
            assert_eq!(euler_totient_distributive(&model).unwrap(), phi);
            assert_eq!(dual_totient_distributive(&model).unwrap(), phi_hat);
        }
    }

    #[test]
    fn non_distributive_extension_errors() {
        let m3 = FiniteLattice::diamond_m3();
        let model = IndexedInterval::new(m3, vec![4, 2, 2, 2, 1]).unwrap();
        assert_eq!(euler_totient_distributive(&model).unwrap_err(), TotientError::NotDistributive);
    }

    #[test]
    fn coatom_split_on_pnq_models() {
        for m in 0..=3 {
            let model = IndexedInterval::pnq_model(3, 5, 3, m).unwrap();
            let direct = dual_totient(&model).unwrap();
            for c in model.lattice().coatoms() {
                assert_eq!(dual_totient_coatom_split(&model, c).unwrap(), direct);
            }
            assert_eq!(
                dual_totient_coatom_split(&model, model.lattice().bottom()).unwrap_err(),
                TotientError::NotACoatom(model.lattice().bottom())
            );
        }
    }

    #[test]
    fn allsplit_product() {
        let model = IndexedInterval::constant_model(3, 4).unwrap();
        assert_eq!(dual_totient_allsplit(&model).unwrap(), 16);
        let split = IndexedInterval::pnq_model(3, 5, 2, 1).unwrap();
        assert_eq!(dual_totient_allsplit(&split).unwrap(), 8);
        let skewed = IndexedInterval::pnq_model(3, 5, 2, 2).unwrap();
        assert!(matches!(
            dual_totient_allsplit(&skewed),
            Err(TotientError::SplitConditionFails { .. })
        ));
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(closed_form_p_n(1 << 40, 4).unwrap_err(), TotientError::Overflow);
    }
}
