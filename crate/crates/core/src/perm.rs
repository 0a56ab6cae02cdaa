//! Permutations and fully enumerated permutation groups.
//!
//! Groups are stored with their complete, sorted element list. This keeps
//! subgroup equality a plain set comparison, which the lattice code relies on
//! for deduplication. Points are 0-based; cycle notation is only parsed and
//! printed at the I/O boundary.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Mul;

use thiserror::Error;

/// Default bound on the number of elements a closure may produce.
pub const DEFAULT_ELEMENT_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("permutation has degree {found}, expected {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("group closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("element is not a member of the ambient group")]
    ElementOutsideGroup,
    #[error("not a subgroup of the ambient group")]
    NotASubgroup,
    #[error("images do not form a bijection on {0} points")]
    NotABijection(usize),
    #[error("bad cycle notation: {0}")]
    Parse(String),
}

/// A bijection of `{0, .., degree-1}` stored by its image list.
///
/// Products read left to right: `a * b` applies `a` first, then `b`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::NotABijection(n));
            }
            seen[i] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|i| i as u32).collect(),
        })
    }

    /// Builds a permutation from disjoint cycles over 0-based points.
    pub fn from_cycles<C: AsRef<[usize]>>(degree: usize, cycles: &[C]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            let cycle = cycle.as_ref();
            for (k, &point) in cycle.iter().enumerate() {
                if point >= degree {
                    return Err(PermError::Parse(format!(
                        "point {point} out of range for degree {degree}"
                    )));
                }
                if touched[point] {
                    return Err(PermError::Parse(format!("point {point} repeated")));
                }
                touched[point] = true;
                images[point] = cycle[(k + 1) % cycle.len()];
            }
        }
        Permutation::from_images(images)
    }

    /// Parses cycle notation such as `(1 2 3)(4 5)`; `()` is the identity.
    /// With `one_based` the points are shifted down by one.
    pub fn parse_cycles(text: &str, degree: usize, one_based: bool) -> Result<Self, PermError> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| PermError::Parse(format!("expected '(' in {text:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| PermError::Parse(format!("unclosed cycle in {text:?}")))?;
            let body = &open[..close];
            let mut cycle = Vec::new();
            for token in body.split(|c: char| c.is_whitespace() || c == ',') {
                if token.is_empty() {
                    continue;
                }
                let value: usize = token
                    .parse()
                    .map_err(|_| PermError::Parse(format!("bad point {token:?}")))?;
                let point = if one_based {
                    value
                        .checked_sub(1)
                        .ok_or_else(|| PermError::Parse("point 0 in 1-based notation".into()))?
                } else {
                    value
                };
                cycle.push(point);
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = open[close + 1..].trim_start();
        }
        Permutation::from_cycles(degree, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self
                .images
                .iter()
                .map(|&i| other.images[i as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Permutation { images }
    }

    pub fn pow(&self, exp: usize) -> Permutation {
        let mut acc = Permutation::identity(self.degree());
        for _ in 0..exp {
            acc = acc.then(self);
        }
        acc
    }

    pub fn order(&self) -> usize {
        // lcm of the cycle lengths
        let mut order = 1usize;
        for cycle in self.cycles() {
            order = lcm(order, cycle.len());
        }
        order
    }

    /// Non-trivial cycles, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.image(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.image(start);
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.image(next);
            }
            out.push(cycle);
        }
        out
    }

    pub fn to_cycle_string(&self, one_based: bool) -> String {
        let shift = usize::from(one_based);
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        cycles
            .iter()
            .map(|c| {
                let points: Vec<String> = c.iter().map(|p| (p + shift).to_string()).collect();
                format!("({})", points.join(" "))
            })
            .collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycle_string(false))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycle_string(false))
    }
}

impl Mul for &Permutation {
    type Output = Permutation;
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.then(rhs)
    }
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A permutation group with its full element list, sorted lexicographically
/// on image lists.
#[derive(Clone)]
pub struct FiniteGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for FiniteGroup {}

impl Hash for FiniteGroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.degree.hash(state);
        self.elements.hash(state);
    }
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

fn check_degree(degree: usize, perms: &[Permutation]) -> Result<(), PermError> {
    match perms.iter().find(|p| p.degree() != degree) {
        Some(p) => Err(PermError::DegreeMismatch {
            expected: degree,
            found: p.degree(),
        }),
        None => Ok(()),
    }
}

/// Breadth-first closure of the identity under right multiplication by the
/// generators.
fn closure(degree: usize, generators: &[Permutation], cap: usize) -> Result<Vec<Permutation>, PermError> {
    let identity = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    queue.push_back(identity);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = x.then(g);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(PermError::CapExceeded { cap });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut elements: Vec<Permutation> = seen.into_iter().collect();
    elements.sort();
    Ok(elements)
}

impl FiniteGroup {
    /// The group generated by `generators`, with the default element cap.
    pub fn generate(degree: usize, generators: Vec<Permutation>) -> Result<Self, PermError> {
        Self::generate_with_cap(degree, generators, DEFAULT_ELEMENT_CAP)
    }

    pub fn generate_with_cap(
        degree: usize,
        generators: Vec<Permutation>,
        cap: usize,
    ) -> Result<Self, PermError> {
        check_degree(degree, &generators)?;
        let generators: Vec<Permutation> =
            generators.into_iter().filter(|g| !g.is_identity()).collect();
        let elements = closure(degree, &generators, cap.max(1))?;
        Ok(FiniteGroup {
            degree,
            generators,
            elements,
        })
    }

    pub fn trivial(degree: usize) -> Self {
        FiniteGroup {
            degree,
            generators: Vec::new(),
            elements: vec![Permutation::identity(degree)],
        }
    }

    /// Wraps an element list already known to be closed, picking a small
    /// generating set greedily.
    pub(crate) fn from_closed_elements(degree: usize, mut elements: Vec<Permutation>) -> Self {
        elements.sort();
        elements.dedup();
        let mut generators: Vec<Permutation> = Vec::new();
        let mut span = vec![Permutation::identity(degree)];
        for x in &elements {
            if span.binary_search(x).is_err() {
                generators.push(x.clone());
                span = closure(degree, &generators, usize::MAX).expect("uncapped closure");
                if span.len() == elements.len() {
                    break;
                }
            }
        }
        debug_assert_eq!(span, elements);
        FiniteGroup {
            degree,
            generators,
            elements,
        }
    }

    /// Wraps a sorted, closed element list together with generators known to
    /// generate it.
    pub(crate) fn from_parts(
        degree: usize,
        generators: Vec<Permutation>,
        elements: Vec<Permutation>,
    ) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        FiniteGroup {
            degree,
            generators,
            elements,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.elements.binary_search(g).is_ok()
    }

    /// Position of `g` in the sorted element list.
    pub fn position(&self, g: &Permutation) -> Option<usize> {
        self.elements.binary_search(g).ok()
    }

    pub fn is_subgroup_of(&self, other: &FiniteGroup) -> bool {
        self.degree == other.degree
            && self.order() <= other.order()
            && other.order() % self.order() == 0
            && self.elements.iter().all(|x| other.contains(x))
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .enumerate()
            .all(|(i, a)| self.generators[i + 1..].iter().all(|b| a.then(b) == b.then(a)))
    }

    /// The subgroup of `self` generated by `seed`.
    pub fn subgroup_generated(&self, seed: &[Permutation]) -> Result<FiniteGroup, PermError> {
        check_degree(self.degree, seed)?;
        if seed.iter().any(|g| !self.contains(g)) {
            return Err(PermError::ElementOutsideGroup);
        }
        FiniteGroup::generate_with_cap(self.degree, seed.to_vec(), self.order())
    }

    pub fn intersect(&self, other: &FiniteGroup) -> Result<FiniteGroup, PermError> {
        if self.degree != other.degree {
            return Err(PermError::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        let (small, large) = if self.order() <= other.order() {
            (self, other)
        } else {
            (other, self)
        };
        let common: Vec<Permutation> = small
            .elements
            .iter()
            .filter(|x| large.contains(x))
            .cloned()
            .collect();
        Ok(FiniteGroup::from_closed_elements(self.degree, common))
    }

    /// The subgroup generated by both groups.
    pub fn join(&self, other: &FiniteGroup) -> Result<FiniteGroup, PermError> {
        self.join_with_cap(other, DEFAULT_ELEMENT_CAP)
    }

    pub fn join_with_cap(&self, other: &FiniteGroup, cap: usize) -> Result<FiniteGroup, PermError> {
        if self.degree != other.degree {
            return Err(PermError::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().filter(|g| !self.contains(g)).cloned());
        FiniteGroup::generate_with_cap(self.degree, gens, cap)
    }

    /// `|self : sub|`.
    pub fn index(&self, sub: &FiniteGroup) -> Result<u64, PermError> {
        if !sub.is_subgroup_of(self) {
            return Err(PermError::NotASubgroup);
        }
        Ok((self.order() / sub.order()) as u64)
    }

    /// `{ g h g^-1 : h in sub }` for `g` in `self`.
    pub fn conjugate(&self, sub: &FiniteGroup, g: &Permutation) -> Result<FiniteGroup, PermError> {
        if !sub.is_subgroup_of(self) {
            return Err(PermError::NotASubgroup);
        }
        if !self.contains(g) {
            return Err(PermError::ElementOutsideGroup);
        }
        let g_inv = g.inverse();
        let elements = sub.elements.iter().map(|h| g.then(h).then(&g_inv)).collect();
        let generators = sub.generators.iter().map(|h| g.then(h).then(&g_inv)).collect();
        let mut elements: Vec<Permutation> = elements;
        elements.sort();
        Ok(FiniteGroup {
            degree: self.degree,
            generators,
            elements,
        })
    }

    pub fn is_normal(&self, sub: &FiniteGroup) -> Result<bool, PermError> {
        if !sub.is_subgroup_of(self) {
            return Err(PermError::NotASubgroup);
        }
        Ok(self.generators.iter().all(|g| {
            let g_inv = g.inverse();
            sub.generators
                .iter()
                .all(|h| sub.contains(&g_inv.then(h).then(g)))
        }))
    }

    /// One representative per right coset `sub * g`, each the smallest
    /// element of its coset.
    pub fn right_cosets(&self, sub: &FiniteGroup) -> Result<Vec<Permutation>, PermError> {
        if !sub.is_subgroup_of(self) {
            return Err(PermError::NotASubgroup);
        }
        let mut covered = vec![false; self.order()];
        let mut reps = Vec::with_capacity(self.order() / sub.order());
        for (i, g) in self.elements.iter().enumerate() {
            if covered[i] {
                continue;
            }
            reps.push(g.clone());
            for h in &sub.elements {
                let pos = self.position(&h.then(g)).expect("coset element lies in the group");
                covered[pos] = true;
            }
        }
        Ok(reps)
    }

    /// Intersection of all conjugates of `sub`.
    pub fn normal_core(&self, sub: &FiniteGroup) -> Result<FiniteGroup, PermError> {
        let reps = self.right_cosets(sub)?;
        let mut core: Vec<Permutation> = sub.elements.clone();
        for g in reps {
            let g_inv = g.inverse();
            core.retain(|x| sub.contains(&g.then(x).then(&g_inv)));
            if core.len() == 1 {
                break;
            }
        }
        Ok(FiniteGroup::from_closed_elements(self.degree, core))
    }

    /// Direct product acting on the disjoint union of the two point sets.
    pub fn direct_product(&self, other: &FiniteGroup) -> Result<FiniteGroup, PermError> {
        let degree = self.degree + other.degree;
        let mut gens = Vec::new();
        for g in &self.generators {
            let mut images = g.images();
            images.extend(self.degree..degree);
            gens.push(Permutation::from_images(images)?);
        }
        for g in &other.generators {
            let mut images: Vec<usize> = (0..self.degree).collect();
            images.extend(g.images().into_iter().map(|i| i + self.degree));
            gens.push(Permutation::from_images(images)?);
        }
        FiniteGroup::generate(degree, gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(degree: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(degree, cycles).unwrap()
    }

    fn s3() -> FiniteGroup {
        FiniteGroup::generate(3, vec![perm(3, &[&[0, 1]]), perm(3, &[&[0, 1, 2]])]).unwrap()
    }

    #[test]
    fn s3_and_trivial_orders() {
        assert_eq!(s3().order(), 6);
        assert_eq!(FiniteGroup::generate(1, vec![]).unwrap().order(), 1);
    }

    #[test]
    fn elements_are_sorted_and_contain_identity() {
        let g = s3();
        assert!(g.elements().windows(2).all(|w| w[0] < w[1]));
        assert!(g.contains(&g.identity()));
    }

    #[test]
    fn degree_mismatch_is_reported() {
        let err = FiniteGroup::generate(4, vec![perm(3, &[&[0, 1]])]).unwrap_err();
        assert_eq!(err, PermError::DegreeMismatch { expected: 4, found: 3 });
    }

    #[test]
    fn cap_is_enforced() {
        let gens = vec![perm(5, &[&[0, 1]]), perm(5, &[&[0, 1, 2, 3, 4]])];
        let err = FiniteGroup::generate_with_cap(5, gens, 50).unwrap_err();
        assert_eq!(err, PermError::CapExceeded { cap: 50 });
    }

    #[test]
    fn subgroup_generated_and_outside_elements() {
        let g = s3();
        let c3 = g.subgroup_generated(&[perm(3, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(c3.order(), 3);
        assert_eq!(g.subgroup_generated(&[]).unwrap().order(), 1);
        let a4 = perm(4, &[&[0, 1, 2]]);
        assert!(matches!(g.subgroup_generated(&[a4]), Err(PermError::DegreeMismatch { .. })));
        let c4 = FiniteGroup::generate(4, vec![perm(4, &[&[0, 1, 2, 3]])]).unwrap();
        assert_eq!(
            c4.subgroup_generated(&[perm(4, &[&[0, 1]])]).unwrap_err(),
            PermError::ElementOutsideGroup
        );
    }

    #[test]
    fn intersect_and_join_in_s3() {
        let g = s3();
        let t01 = g.subgroup_generated(&[perm(3, &[&[0, 1]])]).unwrap();
        let t02 = g.subgroup_generated(&[perm(3, &[&[0, 2]])]).unwrap();
        let c3 = g.subgroup_generated(&[perm(3, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(t01.intersect(&t01).unwrap(), t01);
        assert_eq!(t01.intersect(&t02).unwrap().order(), 1);
        assert_eq!(t01.join(&FiniteGroup::trivial(3)).unwrap(), t01);
        assert_eq!(t01.join(&c3).unwrap(), g);
    }

    #[test]
    fn index_and_cosets() {
        let g = s3();
        let c3 = g.subgroup_generated(&[perm(3, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(g.index(&c3).unwrap(), 2);
        assert_eq!(g.index(&g).unwrap(), 1);
        assert_eq!(g.right_cosets(&c3).unwrap().len(), 2);
        assert!(g.is_normal(&c3).unwrap());
        assert_eq!(c3.index(&g).unwrap_err(), PermError::NotASubgroup);
    }

    #[test]
    fn conjugate_transposition() {
        let g = s3();
        let t01 = g.subgroup_generated(&[perm(3, &[&[0, 1]])]).unwrap();
        let t02 = g.subgroup_generated(&[perm(3, &[&[0, 2]])]).unwrap();
        let conj = g.conjugate(&t01, &perm(3, &[&[1, 2]])).unwrap();
        assert_eq!(conj, t02);
        assert!(!g.is_normal(&t01).unwrap());
    }

    #[test]
    fn normal_core_cases() {
        let g = s3();
        let t01 = g.subgroup_generated(&[perm(3, &[&[0, 1]])]).unwrap();
        let c3 = g.subgroup_generated(&[perm(3, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(g.normal_core(&t01).unwrap().order(), 1);
        assert_eq!(g.normal_core(&c3).unwrap(), c3);
    }

    #[test]
    fn cycle_notation_round_trip() {
        let p = Permutation::parse_cycles("(1 2 3)(4 5)", 6, true).unwrap();
        assert_eq!(p.images(), vec![1, 2, 0, 4, 3, 5]);
        assert_eq!(p.to_cycle_string(true), "(1 2 3)(4 5)");
        assert_eq!(p.order(), 6);
        assert!(Permutation::parse_cycles("()", 3, true).unwrap().is_identity());
        assert!(Permutation::parse_cycles("(1 2", 3, true).is_err());
        assert!(Permutation::parse_cycles("(1 1)", 3, true).is_err());
        assert!(Permutation::parse_cycles("(0 1)", 3, true).is_err());
    }

    #[test]
    fn from_images_rejects_non_bijection() {
        assert_eq!(
            Permutation::from_images(vec![0, 0, 1]).unwrap_err(),
            PermError::NotABijection(3)
        );
    }
}
