//! Finite lattices given by an explicit order relation.
//!
//! Meet and join tables are computed (and the lattice axioms verified) once at
//! construction; everything downstream assumes a valid lattice.

use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("relation is not a partial order: {0}")]
    NotAPartialOrder(String),
    #[error("elements {a} and {b} lack a unique {kind}")]
    NotALattice { a: usize, b: usize, kind: &'static str },
    #[error("lattice is not boolean")]
    NotBoolean,
    #[error("lattice is not graded")]
    NotGraded,
    #[error("element {a} is not below element {b}")]
    NotComparable { a: usize, b: usize },
    #[error("element {0} is out of range")]
    OutOfRange(usize),
}

/// An element id together with its graded rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankedElement {
    pub id: usize,
    pub rank: usize,
}

#[derive(Debug)]
pub struct FiniteLattice {
    n: usize,
    down: Vec<FixedBitSet>,
    up: Vec<FixedBitSet>,
    meet: Vec<u32>,
    join: Vec<u32>,
    bottom: usize,
    top: usize,
    upper_covers: Vec<Vec<usize>>,
    lower_covers: Vec<Vec<usize>>,
    height: Vec<usize>,
    graded: bool,
    distributive: OnceLock<bool>,
    boolean: OnceLock<bool>,
}

impl Clone for FiniteLattice {
    fn clone(&self) -> Self {
        let distributive = OnceLock::new();
        if let Some(&d) = self.distributive.get() {
            let _ = distributive.set(d);
        }
        let boolean = OnceLock::new();
        if let Some(&b) = self.boolean.get() {
            let _ = boolean.set(b);
        }
        FiniteLattice {
            n: self.n,
            down: self.down.clone(),
            up: self.up.clone(),
            meet: self.meet.clone(),
            join: self.join.clone(),
            bottom: self.bottom,
            top: self.top,
            upper_covers: self.upper_covers.clone(),
            lower_covers: self.lower_covers.clone(),
            height: self.height.clone(),
            graded: self.graded,
            distributive,
            boolean,
        }
    }
}

/// An interval (or other sublattice) together with the parent ids of its
/// elements. Local id `i` corresponds to parent id `embedding[i]`.
#[derive(Debug, Clone)]
pub struct SubLattice {
    pub lattice: FiniteLattice,
    pub embedding: Vec<usize>,
}

impl SubLattice {
    pub fn parent_id(&self, local: usize) -> usize {
        self.embedding[local]
    }

    pub fn local_id(&self, parent: usize) -> Option<usize> {
        self.embedding.binary_search(&parent).ok()
    }
}

fn unique_bound(
    candidates: &FixedBitSet,
    cones: &[FixedBitSet],
) -> Option<usize> {
    // The bound, if it exists, is the candidate whose cone holds all of them.
    let best = candidates
        .ones()
        .max_by_key(|&m| (cones[m].count_ones(..), std::cmp::Reverse(m)))?;
    candidates.is_subset(&cones[best]).then_some(best)
}

impl FiniteLattice {
    /// Validates `leq` as a lattice order on `0..n`.
    pub fn from_relation<F>(n: usize, leq: F) -> Result<Self, LatticeError>
    where
        F: Fn(usize, usize) -> bool,
    {
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for x in 0..n {
            for y in 0..n {
                if leq(x, y) {
                    down[y].insert(x);
                    up[x].insert(y);
                }
            }
        }
        for x in 0..n {
            if !down[x].contains(x) {
                return Err(LatticeError::NotAPartialOrder(format!("{x} is not <= itself")));
            }
            for y in down[x].ones() {
                if y != x && down[y].contains(x) {
                    return Err(LatticeError::NotAPartialOrder(format!(
                        "{x} and {y} are mutually below each other"
                    )));
                }
                if !down[y].is_subset(&down[x]) {
                    return Err(LatticeError::NotAPartialOrder(format!(
                        "order is not transitive through {y} <= {x}"
                    )));
                }
            }
        }
        let mut meet = vec![0u32; n * n];
        let mut join = vec![0u32; n * n];
        for a in 0..n {
            for b in a..n {
                let mut lower = down[a].clone();
                lower.intersect_with(&down[b]);
                let m = unique_bound(&lower, &down).ok_or(LatticeError::NotALattice {
                    a,
                    b,
                    kind: "meet",
                })?;
                let mut upper = up[a].clone();
                upper.intersect_with(&up[b]);
                let j = unique_bound(&upper, &up).ok_or(LatticeError::NotALattice {
                    a,
                    b,
                    kind: "join",
                })?;
                meet[a * n + b] = m as u32;
                meet[b * n + a] = m as u32;
                join[a * n + b] = j as u32;
                join[b * n + a] = j as u32;
            }
        }
        let bottom = (0..n).find(|&x| up[x].count_ones(..) == n).expect("meet of all exists");
        let top = (0..n).find(|&x| down[x].count_ones(..) == n).expect("join of all exists");
        Ok(Self::assemble(n, down, up, meet, join, bottom, top))
    }

    pub fn from_leq_matrix(leq: &[Vec<bool>]) -> Result<Self, LatticeError> {
        let n = leq.len();
        if leq.iter().any(|row| row.len() != n) {
            return Err(LatticeError::NotAPartialOrder("relation matrix is not square".into()));
        }
        Self::from_relation(n, |a, b| leq[a][b])
    }

    fn assemble(
        n: usize,
        down: Vec<FixedBitSet>,
        up: Vec<FixedBitSet>,
        meet: Vec<u32>,
        join: Vec<u32>,
        bottom: usize,
        top: usize,
    ) -> Self {
        let mut upper_covers = vec![Vec::new(); n];
        let mut lower_covers = vec![Vec::new(); n];
        for x in 0..n {
            for y in up[x].ones() {
                if y == x {
                    continue;
                }
                // y covers x when nothing lies strictly between them
                let mut between = up[x].clone();
                between.intersect_with(&down[y]);
                if between.count_ones(..) == 2 {
                    upper_covers[x].push(y);
                    lower_covers[y].push(x);
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| down[x].count_ones(..));
        let mut height = vec![0usize; n];
        for &x in &order {
            height[x] = lower_covers[x].iter().map(|&y| height[y] + 1).max().unwrap_or(0);
        }
        let graded = (0..n).all(|x| upper_covers[x].iter().all(|&y| height[y] == height[x] + 1));
        FiniteLattice {
            n,
            down,
            up,
            meet,
            join,
            bottom,
            top,
            upper_covers,
            lower_covers,
            height,
            graded,
            distributive: OnceLock::new(),
            boolean: OnceLock::new(),
        }
    }

    /// The subset lattice of an `n`-set; element id = bitmask.
    pub fn boolean(n: usize) -> Self {
        assert!(n < 20, "boolean lattice too large");
        let size = 1usize << n;
        Self::from_relation(size, |a, b| a & b == a).expect("subset order is a lattice")
    }

    /// The chain `0 < 1 < .. < length`.
    pub fn chain(length: usize) -> Self {
        Self::from_relation(length + 1, |a, b| a <= b).expect("chain is a lattice")
    }

    /// Bottom, three pairwise incomparable middles, top.
    pub fn diamond_m3() -> Self {
        Self::from_relation(5, |a, b| a == b || a == 0 || b == 4).expect("M3 is a lattice")
    }

    /// Divisors of `n` ordered by divisibility, ascending.
    pub fn divisors(n: u64) -> (Self, Vec<u64>) {
        let divs: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        let lattice = Self::from_relation(divs.len(), |a, b| divs[b] % divs[a] == 0)
            .expect("divisibility is a lattice");
        (lattice, divs)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.down[b].contains(a)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b] as usize
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b] as usize
    }

    pub fn join_all<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn meet_all<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn upper_covers(&self, x: usize) -> &[usize] {
        &self.upper_covers[x]
    }

    pub fn lower_covers(&self, x: usize) -> &[usize] {
        &self.lower_covers[x]
    }

    pub fn atoms(&self) -> Vec<usize> {
        self.upper_covers[self.bottom].clone()
    }

    pub fn coatoms(&self) -> Vec<usize> {
        self.lower_covers[self.top].clone()
    }

    /// Elements `c` with `a <= c <= b`, ascending by id.
    pub fn elements_between(&self, a: usize, b: usize) -> Vec<usize> {
        let mut set = self.up[a].clone();
        set.intersect_with(&self.down[b]);
        set.ones().collect()
    }

    /// Length of the longest chain from bottom to `x`.
    pub fn height(&self, x: usize) -> usize {
        self.height[x]
    }

    pub fn is_graded(&self) -> bool {
        self.graded
    }

    pub fn rank(&self, x: usize) -> Result<usize, LatticeError> {
        if x >= self.n {
            return Err(LatticeError::OutOfRange(x));
        }
        if !self.graded {
            return Err(LatticeError::NotGraded);
        }
        Ok(self.height[x])
    }

    /// Rank of the whole lattice (length of a maximal chain).
    pub fn length(&self) -> usize {
        self.height[self.top]
    }

    pub fn ranked_elements(&self) -> Result<Vec<RankedElement>, LatticeError> {
        (0..self.n)
            .map(|id| Ok(RankedElement { id, rank: self.rank(id)? }))
            .collect()
    }

    pub fn is_distributive(&self) -> bool {
        *self.distributive.get_or_init(|| {
            let n = self.n;
            for a in 0..n {
                for b in 0..n {
                    let ab = self.join(a, b);
                    for c in b + 1..n {
                        let lhs = self.join(a, self.meet(b, c));
                        let rhs = self.meet(ab, self.join(a, c));
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
            true
        })
    }

    fn find_complement(&self, b: usize) -> Option<usize> {
        (0..self.n).find(|&c| self.meet(b, c) == self.bottom && self.join(b, c) == self.top)
    }

    /// Distributive with every element complemented.
    pub fn is_boolean(&self) -> bool {
        *self.boolean.get_or_init(|| {
            self.is_distributive() && (0..self.n).all(|b| self.find_complement(b).is_some())
        })
    }

    pub fn complement(&self, b: usize) -> Result<usize, LatticeError> {
        if b >= self.n {
            return Err(LatticeError::OutOfRange(b));
        }
        if !self.is_boolean() {
            return Err(LatticeError::NotBoolean);
        }
        Ok(self.find_complement(b).expect("boolean lattices are complemented"))
    }

    /// The interval `[a, b]`, inheriting meet and join from `self`.
    pub fn interval(&self, a: usize, b: usize) -> Result<SubLattice, LatticeError> {
        if a >= self.n {
            return Err(LatticeError::OutOfRange(a));
        }
        if b >= self.n {
            return Err(LatticeError::OutOfRange(b));
        }
        if !self.leq(a, b) {
            return Err(LatticeError::NotComparable { a, b });
        }
        let embedding = self.elements_between(a, b);
        let m = embedding.len();
        let local = |parent: usize| embedding.binary_search(&parent).expect("closed under meet/join");
        let mut down = vec![FixedBitSet::with_capacity(m); m];
        let mut up = vec![FixedBitSet::with_capacity(m); m];
        let mut meet = vec![0u32; m * m];
        let mut join = vec![0u32; m * m];
        for (i, &x) in embedding.iter().enumerate() {
            for (j, &y) in embedding.iter().enumerate() {
                if self.leq(x, y) {
                    down[j].insert(i);
                    up[i].insert(j);
                }
                meet[i * m + j] = local(self.meet(x, y)) as u32;
                join[i * m + j] = local(self.join(x, y)) as u32;
            }
        }
        let lattice = Self::assemble(m, down, up, meet, join, local(a), local(b));
        Ok(SubLattice { lattice, embedding })
    }

    /// `[t, top]` with `t` the meet of the coatoms.
    pub fn top_interval(&self) -> SubLattice {
        let t = self.meet_all(self.coatoms());
        self.interval(t, self.top).expect("t <= top")
    }

    /// `[bottom, b]` with `b` the join of the atoms.
    pub fn bottom_interval(&self) -> SubLattice {
        let b = self.join_all(self.atoms());
        self.interval(self.bottom, b).expect("bottom <= b")
    }

    pub fn is_bottom_boolean(&self) -> bool {
        self.bottom_interval().lattice.is_boolean()
    }

    /// Whether `[a, b]` is boolean, decided on the parent tables: the interval
    /// must have `2^k` elements for `k` atoms, and every join of a set of
    /// atoms must lie above exactly that set of atoms.
    pub fn is_boolean_between(&self, a: usize, b: usize) -> bool {
        if !self.leq(a, b) {
            return false;
        }
        let atoms: Vec<usize> = self.upper_covers[a]
            .iter()
            .copied()
            .filter(|&x| self.leq(x, b))
            .collect();
        let k = atoms.len();
        let size = {
            let mut set = self.up[a].clone();
            set.intersect_with(&self.down[b]);
            set.count_ones(..)
        };
        if k >= usize::BITS as usize - 1 || size != 1usize << k {
            return false;
        }
        let mut joins = vec![a; 1 << k];
        for mask in 1usize..(1 << k) {
            let low = mask.trailing_zeros() as usize;
            let j = self.join(joins[mask & (mask - 1)], atoms[low]);
            joins[mask] = j;
            let below = atoms
                .iter()
                .enumerate()
                .filter(|&(_, &x)| self.leq(x, j))
                .fold(0usize, |acc, (i, _)| acc | (1 << i));
            if below != mask {
                return false;
            }
        }
        true
    }

    /// Whether the bottom interval of `[a, b]` is boolean.
    pub fn is_bottom_boolean_between(&self, a: usize, b: usize) -> bool {
        if !self.leq(a, b) {
            return false;
        }
        let atoms = self.upper_covers[a].iter().copied().filter(|&x| self.leq(x, b));
        let top = atoms.fold(a, |acc, x| self.join(acc, x));
        self.is_boolean_between(a, top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bowtie() -> Result<FiniteLattice, LatticeError> {
        // 0,1 minimal; 2,3 maximal; both minimal below both maximal
        FiniteLattice::from_relation(4, |a, b| a == b || (a < 2 && b >= 2))
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FiniteLattice::from_relation(0, |_, _| true).unwrap_err(), LatticeError::Empty);
        assert!(matches!(bowtie(), Err(LatticeError::NotALattice { .. })));
        let not_antisym = FiniteLattice::from_relation(2, |_, _| true);
        assert!(matches!(not_antisym, Err(LatticeError::NotAPartialOrder(_))));
        let not_refl = FiniteLattice::from_relation(2, |a, b| a < b);
        assert!(matches!(not_refl, Err(LatticeError::NotAPartialOrder(_))));
    }

    #[test]
    fn chain_and_b3_basics() {
        let c = FiniteLattice::chain(2);
        assert_eq!(c.len(), 3);
        assert_eq!(c.atoms(), vec![1]);
        let b3 = FiniteLattice::boolean(3);
        assert_eq!(b3.len(), 8);
        assert_eq!(b3.atoms().len(), 3);
        assert_eq!(b3.coatoms().len(), 3);
        let single = FiniteLattice::chain(0);
        assert!(single.atoms().is_empty());
        assert!(single.coatoms().is_empty());
    }

    #[test]
    fn distributivity_examples() {
        assert!(FiniteLattice::chain(4).is_distributive());
        assert!(!FiniteLattice::diamond_m3().is_distributive());
        let (d12, _) = FiniteLattice::divisors(12);
        assert!(d12.is_distributive());
        assert!(!d12.is_boolean());
    }

    #[test]
    fn booleanity_examples() {
        assert!(FiniteLattice::boolean(3).is_boolean());
        assert!(!FiniteLattice::chain(2).is_boolean());
        assert!(FiniteLattice::chain(0).is_boolean());
        assert!(FiniteLattice::chain(1).is_boolean());
    }

    #[test]
    fn complements_in_b3() {
        let b3 = FiniteLattice::boolean(3);
        assert_eq!(b3.complement(b3.bottom()).unwrap(), b3.top());
        // {1} -> {2,3}
        assert_eq!(b3.complement(0b001).unwrap(), 0b110);
        for atom in b3.atoms() {
            let c = b3.complement(atom).unwrap();
            assert!(b3.coatoms().contains(&c));
            assert_eq!(b3.complement(c).unwrap(), atom);
        }
        assert_eq!(FiniteLattice::chain(2).complement(1).unwrap_err(), LatticeError::NotBoolean);
    }

    #[test]
    fn top_and_bottom_intervals() {
        let b3 = FiniteLattice::boolean(3);
        assert_eq!(b3.bottom_interval().lattice.len(), 8);
        let c = FiniteLattice::chain(2);
        let bottom = c.bottom_interval();
        assert_eq!(bottom.embedding, vec![0, 1]);
        let top = c.top_interval();
        assert_eq!(top.embedding, vec![1, 2]);
        let (d12, divs) = FiniteLattice::divisors(12);
        let bi = d12.bottom_interval();
        let ti = d12.top_interval();
        assert!(bi.lattice.is_boolean());
        assert!(ti.lattice.is_boolean());
        let bi_divs: Vec<u64> = bi.embedding.iter().map(|&i| divs[i]).collect();
        assert_eq!(bi_divs, vec![1, 2, 3, 6]);
        let ti_divs: Vec<u64> = ti.embedding.iter().map(|&i| divs[i]).collect();
        assert_eq!(ti_divs, vec![2, 4, 6, 12]);
    }

    #[test]
    fn rank_and_intervals() {
        let b3 = FiniteLattice::boolean(3);
        assert_eq!(b3.rank(b3.top()).unwrap(), 3);
        let whole = b3.interval(b3.bottom(), b3.top()).unwrap();
        assert_eq!(whole.lattice.len(), 8);
        let upper = b3.interval(0b001, 0b111).unwrap();
        assert_eq!(upper.lattice.len(), 4);
        assert!(upper.lattice.is_boolean());
        assert_eq!(upper.lattice.length(), 2);
        assert_eq!(
            b3.interval(0b001, 0b010).unwrap_err(),
            LatticeError::NotComparable { a: 1, b: 2 }
        );
    }

    #[test]
    fn non_graded_rank_errors() {
        // pentagon N5: 0 < a < b < 1, 0 < c < 1
        let n5 = FiniteLattice::from_relation(5, |x, y| {
            x == y || x == 0 || y == 4 || (x == 1 && y == 2)
        })
        .unwrap();
        assert!(!n5.is_graded());
        assert_eq!(n5.rank(2).unwrap_err(), LatticeError::NotGraded);
        assert_eq!(n5.height(4), 3);
        assert!(!n5.is_distributive());
    }

    #[test]
    fn bottom_boolean_examples() {
        assert!(FiniteLattice::boolean(2).is_bottom_boolean());
        assert!(FiniteLattice::chain(3).is_bottom_boolean());
        assert!(!FiniteLattice::diamond_m3().is_bottom_boolean());
    }

    #[test]
    fn fast_boolean_test_matches_definition() {
        let lattices = [
            FiniteLattice::boolean(3),
            FiniteLattice::chain(3),
            FiniteLattice::diamond_m3(),
            FiniteLattice::divisors(36).0,
            FiniteLattice::divisors(30).0,
        ];
        for l in &lattices {
            for a in 0..l.len() {
                for b in 0..l.len() {
                    if !l.leq(a, b) {
                        continue;
                    }
                    let sub = l.interval(a, b).unwrap();
                    assert_eq!(l.is_boolean_between(a, b), sub.lattice.is_boolean());
                    assert_eq!(l.is_bottom_boolean_between(a, b), sub.lattice.is_bottom_boolean());
                }
            }
        }
    }
}
