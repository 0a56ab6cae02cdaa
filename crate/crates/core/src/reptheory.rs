//! Conjugacy classes, character tables and fixed-space dimensions.
//!
//! Tables are computed modulo a prime `p = 1 (mod exponent)` by splitting
//! the common eigenspaces of the class-multiplication matrices (Dixon's
//! method). Complex values are recovered from the eigenvalue multiplicities
//! of each class representative, so every value is known exactly as a sum
//! of roots of unity.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::modp;
use crate::perm::{lcm, FiniteGroup, Permutation};
use crate::subgroups::GroupInterval;

/// Tolerance for accepting a floating-point sum as an exact integer.
pub const TOLERANCE: f64 = 1e-6;

/// Largest group order accepted by `character_table`.
pub const TABLE_ORDER_CAP: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("character table validation failed: {0}")]
    ValidationFailed(String),
    #[error("fixed-space dimension {0} is not an integer")]
    NotAnInteger(f64),
    #[error("subgroup does not lie in the table's group")]
    NotASubgroup,
    #[error("group of order {0} exceeds the character table cap")]
    TooLarge(usize),
    #[error("character table belongs to a different group")]
    WrongGroup,
}

type Result<T> = std::result::Result<T, RepError>;

#[derive(Debug, Clone)]
pub struct ConjugacyClasses {
    class_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    inverse_class: Vec<usize>,
    rep_orders: Vec<usize>,
}

impl ConjugacyClasses {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Element indices (into the group's sorted element list) of class `c`.
    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    pub fn representative(&self, c: usize) -> usize {
        self.members[c][0]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn size(&self, c: usize) -> usize {
        self.members[c].len()
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    /// Class containing the inverses of class `c`.
    pub fn inverse_class(&self, c: usize) -> usize {
        self.inverse_class[c]
    }

    pub fn representative_order(&self, c: usize) -> usize {
        self.rep_orders[c]
    }
}

/// Orbits of the conjugation action; class 0 is the identity.
pub fn conjugacy_classes(group: &FiniteGroup) -> ConjugacyClasses {
    let els = group.elements();
    let n = els.len();
    let pos = |g: &Permutation| group.position(g).expect("closed under conjugation");
    let gens: Vec<(Permutation, Permutation)> =
        group.generators().iter().map(|g| (g.clone(), g.inverse())).collect();
    let mut class_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if class_of[start] != usize::MAX {
            continue;
        }
        let c = members.len();
        class_of[start] = c;
        let mut orbit = vec![start];
        let mut i = 0;
        while i < orbit.len() {
            let x = &els[orbit[i]];
            for (g, g_inv) in &gens {
                let y = pos(&g_inv.then(x).then(g));
                if class_of[y] == usize::MAX {
                    class_of[y] = c;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        members.push(orbit);
    }
    let inverse_class = members
        .iter()
        .map(|m| class_of[pos(&els[m[0]].inverse())])
        .collect();
    let rep_orders = members.iter().map(|m| els[m[0]].order()).collect();
    ConjugacyClasses {
        class_of,
        members,
        inverse_class,
        rep_orders,
    }
}

/// A character value `sum_k mult[k] * zeta_order^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicValue {
    pub order: usize,
    pub multiplicities: Vec<u64>,
}

impl CyclotomicValue {
    pub fn to_complex(&self) -> Complex64 {
        self.multiplicities
            .iter()
            .enumerate()
            .map(|(k, &m)| Complex64::from_polar(m as f64, 2.0 * PI * k as f64 / self.order as f64))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct CharacterTable {
    group: FiniteGroup,
    classes: ConjugacyClasses,
    prime: u64,
    degrees: Vec<u64>,
    modular: Vec<Vec<u64>>,
    exact: Vec<Vec<CyclotomicValue>>,
    values: Vec<Vec<Complex64>>,
}

/// A view of one row of a character table.
#[derive(Debug, Clone, Copy)]
pub struct IrreducibleCharacter<'a> {
    table: &'a CharacterTable,
    row: usize,
}

impl<'a> IrreducibleCharacter<'a> {
    pub fn row(&self) -> usize {
        self.row
    }

    pub fn degree(&self) -> u64 {
        self.table.degrees[self.row]
    }

    pub fn values(&self) -> &'a [Complex64] {
        &self.table.values[self.row]
    }

    pub fn exact_values(&self) -> &'a [CyclotomicValue] {
        &self.table.exact[self.row]
    }
}

fn class_matrices(group: &FiniteGroup, classes: &ConjugacyClasses, p: u64) -> Vec<Vec<Vec<u64>>> {
    let els = group.elements();
    let r = classes.len();
    let inverses: Vec<Permutation> = els.iter().map(Permutation::inverse).collect();
    // m[j][k][l] = #{ x in C_j : x^-1 z in C_k } for a fixed z in C_l
    let mut m = vec![vec![vec![0u64; r]; r]; r];
    for l in 0..r {
        let z = &els[classes.representative(l)];
        for (j, mj) in m.iter_mut().enumerate() {
            for &x in classes.members(j) {
                let y = group.position(&inverses[x].then(z)).expect("closed");
                let k = classes.class_of(y);
                mj[k][l] += 1;
            }
        }
    }
    for mj in &mut m {
        for row in mj.iter_mut() {
            for v in row.iter_mut() {
                *v %= p;
            }
        }
    }
    m
}

/// Simultaneous eigenvectors of commuting diagonalizable matrices.
fn common_eigenvectors(mats: &[Vec<Vec<u64>>], r: usize, p: u64) -> Result<Vec<Vec<u64>>> {
    let identity: Vec<Vec<u64>> = (0..r)
        .map(|i| (0..r).map(|j| u64::from(i == j)).collect())
        .collect();
    let mut spaces = vec![identity];
    for mat in mats {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::with_capacity(spaces.len());
        for mut basis in spaces {
            let dim = basis.len();
            if dim == 1 {
                next.push(basis);
                continue;
            }
            let pivots = modp::row_reduce(&mut basis, p);
            let images: Vec<Vec<u64>> = basis
                .iter()
                .map(|v| {
                    (0..r)
                        .map(|k| {
                            mat[k].iter().zip(v).fold(0, |acc, (a, b)| {
                                modp::add(acc, modp::mul(*a, *b, p), p)
                            })
                        })
                        .collect()
                })
                .collect();
            // restricted[a][b] = coordinate a of the image of basis vector b
            let restricted: Vec<Vec<u64>> = (0..dim)
                .map(|a| (0..dim).map(|b| images[b][pivots[a]]).collect())
                .collect();
            let mut found = 0;
            for lambda in 0..p {
                let shifted: Vec<Vec<u64>> = restricted
                    .iter()
                    .enumerate()
                    .map(|(a, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(b, &v)| if a == b { modp::sub(v, lambda, p) } else { v })
                            .collect()
                    })
                    .collect();
                let kernel = modp::nullspace(&shifted, p);
                if kernel.is_empty() {
                    continue;
                }
                found += kernel.len();
                let space = kernel
                    .iter()
                    .map(|c| {
                        (0..r)
                            .map(|k| {
                                c.iter().zip(&basis).fold(0, |acc, (cb, vb)| {
                                    modp::add(acc, modp::mul(*cb, vb[k], p), p)
                                })
                            })
                            .collect()
                    })
                    .collect();
                next.push(space);
                if found == dim {
                    break;
                }
            }
            if found != dim {
                return Err(RepError::ValidationFailed(
                    "class matrix is not diagonalizable over the chosen prime".into(),
                ));
            }
        }
        spaces = next;
    }
    if spaces.iter().any(|s| s.len() != 1) {
        return Err(RepError::ValidationFailed("eigenspaces did not split".into()));
    }
    Ok(spaces.into_iter().map(|mut s| s.pop().expect("one vector")).collect())
}

fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// The complete character table of `group`.
pub fn character_table(group: &FiniteGroup) -> Result<CharacterTable> {
    let order = group.order();
    if order > TABLE_ORDER_CAP {
        return Err(RepError::TooLarge(order));
    }
    let classes = conjugacy_classes(group);
    let r = classes.len();
    let exponent = (0..r).fold(1, |acc, c| lcm(acc, classes.representative_order(c))) as u64;
    let prime = modp::prime_congruent_one(exponent, 2 * isqrt(order as u64) + 2);
    let p = prime;
    let mats = class_matrices(group, &classes, p);
    let vectors = common_eigenvectors(&mats[1..], r, p)?;
    if vectors.len() != r {
        return Err(RepError::ValidationFailed(format!("{} characters for {r} classes", vectors.len())));
    }
    let els = group.elements();
    let w = modp::pow(modp::primitive_root(p), (p - 1) / exponent, p);
    let max_degree = isqrt(order as u64);
    let g_mod = order as u64 % p;

    let mut rows: Vec<(u64, Vec<u64>, Vec<CyclotomicValue>)> = Vec::with_capacity(r);
    for v in vectors {
        if v[0] == 0 {
            return Err(RepError::ValidationFailed("eigenvector vanishes at the identity".into()));
        }
        let scale = modp::inv(v[0], p);
        let omega: Vec<u64> = v.iter().map(|&x| modp::mul(x, scale, p)).collect();
        let s = (0..r).fold(0, |acc, l| {
            let t = modp::mul(omega[l], omega[classes.inverse_class(l)], p);
            modp::add(acc, modp::mul(t, modp::inv(classes.size(l) as u64 % p, p), p), p)
        });
        if s == 0 {
            return Err(RepError::ValidationFailed("degenerate degree equation".into()));
        }
        let d2 = modp::mul(g_mod, modp::inv(s, p), p);
        let degree = (1..=max_degree)
            .find(|&d| d * d % p == d2)
            .ok_or_else(|| RepError::ValidationFailed("no admissible degree".into()))?;
        let chi: Vec<u64> = (0..r)
            .map(|l| {
                let t = modp::mul(omega[l], degree, p);
                modp::mul(t, modp::inv(classes.size(l) as u64 % p, p), p)
            })
            .collect();
        let mut exact = Vec::with_capacity(r);
        for l in 0..r {
            let g = &els[classes.representative(l)];
            let o = classes.representative_order(l);
            let z = modp::pow(w, exponent / o as u64, p);
            let z_inv = modp::inv(z, p);
            let powers: Vec<u64> = {
                let mut acc = Permutation::identity(group.degree());
                (0..o)
                    .map(|_| {
                        let c = classes.class_of(group.position(&acc).expect("closed"));
                        acc = acc.then(g);
                        chi[c]
                    })
                    .collect()
            };
            let o_inv = modp::inv(o as u64 % p, p);
            let mut multiplicities = Vec::with_capacity(o);
            for k in 0..o {
                let step = modp::pow(z_inv, k as u64, p);
                let mut twist = 1;
                let mut sum = 0;
                for &val in &powers {
                    sum = modp::add(sum, modp::mul(val, twist, p), p);
                    twist = modp::mul(twist, step, p);
                }
                let m = modp::mul(sum, o_inv, p);
                if m > degree {
                    return Err(RepError::ValidationFailed(format!(
                        "eigenvalue multiplicity {m} exceeds degree {degree}"
                    )));
                }
                multiplicities.push(m);
            }
            if multiplicities.iter().sum::<u64>() != degree {
                return Err(RepError::ValidationFailed("multiplicities do not sum to the degree".into()));
            }
            exact.push(CyclotomicValue {
                order: o,
                multiplicities,
            });
        }
        rows.push((degree, chi, exact));
    }
    rows.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let values = rows
        .iter()
        .map(|(_, _, ex)| ex.iter().map(CyclotomicValue::to_complex).collect())
        .collect();
    let mut degrees = Vec::with_capacity(r);
    let mut modular = Vec::with_capacity(r);
    let mut exact = Vec::with_capacity(r);
    for (d, m, e) in rows {
        degrees.push(d);
        modular.push(m);
        exact.push(e);
    }
    let table = CharacterTable {
        group: group.clone(),
        classes,
        prime,
        degrees,
        modular,
        exact,
        values,
    };
    table.validate()?;
    Ok(table)
}

impl CharacterTable {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn classes(&self) -> &ConjugacyClasses {
        &self.classes
    }

    /// The prime the table was computed over.
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn character(&self, row: usize) -> IrreducibleCharacter<'_> {
        IrreducibleCharacter { table: self, row }
    }

    pub fn characters(&self) -> impl Iterator<Item = IrreducibleCharacter<'_>> {
        (0..self.len()).map(|row| self.character(row))
    }

    /// Largest deviation of the row inner products from the identity matrix.
    pub fn row_orthogonality_error(&self) -> f64 {
        let order = self.group.order() as f64;
        let sizes = self.classes.sizes();
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in 0..self.len() {
                let s: Complex64 = (0..sizes.len())
                    .map(|c| self.values[i][c] * self.values[j][c].conj() * sizes[c] as f64)
                    .sum::<Complex64>()
                    / order;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Largest deviation of the column inner products from `|C_G(g)|`.
    pub fn column_orthogonality_error(&self) -> f64 {
        let order = self.group.order() as f64;
        let sizes = self.classes.sizes();
        let mut worst: f64 = 0.0;
        for a in 0..sizes.len() {
            for b in 0..sizes.len() {
                let s: Complex64 = (0..self.len())
                    .map(|i| self.values[i][a] * self.values[i][b].conj())
                    .sum();
                let target = if a == b { order / sizes[a] as f64 } else { 0.0 };
                worst = worst.max((s - target).norm() / order);
            }
        }
        worst
    }

    fn validate(&self) -> Result<()> {
        let order = self.group.order() as u64;
        let sum_sq: u64 = self.degrees.iter().map(|d| d * d).sum();
        if sum_sq != order {
            return Err(RepError::ValidationFailed(format!("sum of squared degrees {sum_sq} != {order}")));
        }
        let row = self.row_orthogonality_error();
        if row > TOLERANCE {
            return Err(RepError::ValidationFailed(format!("row orthogonality off by {row}")));
        }
        let col = self.column_orthogonality_error();
        if col > TOLERANCE {
            return Err(RepError::ValidationFailed(format!("column orthogonality off by {col}")));
        }
        let p = self.prime;
        for i in 0..self.len() {
            for j in 0..self.len() {
                let s = (0..self.classes.len()).fold(0, |acc, c| {
                    let t = modp::mul(self.modular[i][c], self.modular[j][self.classes.inverse_class(c)], p);
                    modp::add(acc, modp::mul(t, self.classes.size(c) as u64 % p, p), p)
                });
                let target = if i == j { order % p } else { 0 };
                if s != target {
                    return Err(RepError::ValidationFailed("exact orthogonality fails".into()));
                }
            }
        }
        Ok(())
    }

    /// How many elements of `sub` fall in each class.
    pub fn class_counts(&self, sub: &FiniteGroup) -> Result<Vec<u64>> {
        if sub.degree() != self.group.degree() {
            return Err(RepError::NotASubgroup);
        }
        let mut counts = vec![0u64; self.classes.len()];
        for k in sub.elements() {
            let pos = self.group.position(k).ok_or(RepError::NotASubgroup)?;
            counts[self.classes.class_of(pos)] += 1;
        }
        Ok(counts)
    }

    fn fixed_dim_from_counts(&self, row: usize, counts: &[u64], order: u64) -> Result<u64> {
        let p = self.prime;
        let exact = counts.iter().enumerate().fold(0, |acc, (c, &n)| {
            modp::add(acc, modp::mul(self.modular[row][c], n % p, p), p)
        });
        let exact = modp::mul(exact, modp::inv(order % p, p), p);
        let numeric: Complex64 = counts
            .iter()
            .enumerate()
            .map(|(c, &n)| self.values[row][c] * n as f64)
            .sum::<Complex64>()
            / order as f64;
        let nearest = numeric.re.round();
        if (numeric.re - nearest).abs() > TOLERANCE || numeric.im.abs() > TOLERANCE || nearest < 0.0 {
            return Err(RepError::NotAnInteger(numeric.re));
        }
        if nearest as u64 != exact {
            return Err(RepError::ValidationFailed(format!(
                "fixed dimension {nearest} disagrees with exact value {exact}"
            )));
        }
        Ok(exact)
    }

    /// `dim V^K = (1/|K|) sum_{k in K} chi(k)`.
    pub fn fixed_dim(&self, row: usize, sub: &FiniteGroup) -> Result<u64> {
        let counts = self.class_counts(sub)?;
        self.fixed_dim_from_counts(row, &counts, sub.order() as u64)
    }

    /// Fixed dimensions of `sub` for every row.
    pub fn fixed_dims(&self, sub: &FiniteGroup) -> Result<Vec<u64>> {
        let counts = self.class_counts(sub)?;
        (0..self.len())
            .map(|row| self.fixed_dim_from_counts(row, &counts, sub.order() as u64))
            .collect()
    }
}

/// `dims[member][row]` for every member of the interval.
pub fn interval_fixed_dims(interval: &GroupInterval, table: &CharacterTable) -> Result<Vec<Vec<u64>>> {
    if table.group() != interval.ambient() {
        return Err(RepError::WrongGroup);
    }
    interval.members().iter().map(|m| table.fixed_dims(m)).collect()
}

fn closure_from_dims(interval: &GroupInterval, dims: &[Vec<u64>], row: usize) -> usize {
    let lattice = interval.lattice();
    let target = dims[interval.bottom()][row];
    let mut current = interval.bottom();
    loop {
        let keep: Vec<usize> = lattice
            .upper_covers(current)
            .iter()
            .copied()
            .filter(|&k| dims[k][row] == target)
            .collect();
        if keep.is_empty() {
            return current;
        }
        current = lattice.join_all(keep.into_iter().chain([current]));
    }
}

/// The largest member `K` with `dim V^K = dim V^H`, found by repeatedly
/// joining the covers that keep the fixed dimension.
pub fn pointwise_stabilizer_closure(
    interval: &GroupInterval,
    table: &CharacterTable,
    row: usize,
) -> Result<usize> {
    let dims = interval_fixed_dims(interval, table)?;
    Ok(closure_from_dims(interval, &dims, row))
}

/// Some row whose stabilizer closure is the base, if any.
pub fn is_linearly_primitive(interval: &GroupInterval, table: &CharacterTable) -> Result<Option<usize>> {
    let dims = interval_fixed_dims(interval, table)?;
    let bottom = interval.bottom();
    Ok((0..table.len()).find(|&row| closure_from_dims(interval, &dims, row) == bottom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::subgroups::overgroup_interval;

    #[test]
    fn class_counts_of_small_groups() {
        assert_eq!(conjugacy_classes(&catalog::cyclic(5)).len(), 5);
        let s3 = conjugacy_classes(&catalog::symmetric(3));
        let mut sizes = s3.sizes();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(s3.size(0), 1);
        let psl = conjugacy_classes(&catalog::psl27());
        assert_eq!(psl.len(), 6);
        assert_eq!(psl.sizes().iter().sum::<usize>(), 168);
    }

    #[test]
    fn degrees_of_small_groups() {
        let t = character_table(&catalog::symmetric(3)).unwrap();
        assert_eq!(t.degrees(), &[1, 1, 2]);
        let t = character_table(&catalog::psl27()).unwrap();
        assert_eq!(t.degrees(), &[1, 3, 3, 6, 7, 8]);
        assert_eq!(t.prime(), 337);
        let t = character_table(&catalog::cyclic(6)).unwrap();
        assert_eq!(t.degrees(), &[1; 6]);
        for chi in t.characters() {
            for v in chi.values() {
                assert!((v.norm() - 1.0).abs() < TOLERANCE);
            }
        }
    }

    #[test]
    fn fixed_dims_basic() {
        let g = catalog::psl27();
        let t = character_table(&g).unwrap();
        let d8 = catalog::psl27_d8();
        for row in 0..t.len() {
            let expected_whole = u64::from(row == 0);
            assert_eq!(t.fixed_dim(row, &g).unwrap(), expected_whole);
        }
        assert_eq!(t.fixed_dim(0, &d8).unwrap(), 1);
        let sum: u64 = t.degrees().iter().zip(t.fixed_dims(&d8).unwrap()).map(|(d, f)| d * f).sum();
        assert_eq!(sum, 21);
    }

    #[test]
    fn primitivity_examples() {
        let z5 = catalog::cyclic(5);
        let t = character_table(&z5).unwrap();
        let interval = overgroup_interval(&z5, &FiniteGroup::trivial(5)).unwrap();
        assert!(is_linearly_primitive(&interval, &t).unwrap().is_some());
        assert_eq!(pointwise_stabilizer_closure(&interval, &t, 0).unwrap(), interval.top());

        let v4 = catalog::klein_four();
        let t = character_table(&v4).unwrap();
        let interval = overgroup_interval(&v4, &FiniteGroup::trivial(4)).unwrap();
        assert_eq!(is_linearly_primitive(&interval, &t).unwrap(), None);

        let g = catalog::psl27();
        let t = character_table(&g).unwrap();
        let interval = overgroup_interval(&g, &catalog::psl27_d8()).unwrap();
        assert!(is_linearly_primitive(&interval, &t).unwrap().is_some());
    }
}
