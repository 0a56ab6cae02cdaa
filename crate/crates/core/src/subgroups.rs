//! Overgroup intervals `[H, G]` inside a fully enumerated ambient group.
//!
//! Members are found as joins of the cyclic extensions `<H, g>`, one per
//! right coset of `H`. Internally every subgroup is a bitset over the sorted
//! ambient element list.

use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::lattice::{FiniteLattice, LatticeError};
use crate::perm::{FiniteGroup, PermError, Permutation};

/// Default bound on the number of members an interval may have.
pub const DEFAULT_MEMBER_CAP: usize = 10_000;

const TABLE_LIMIT: usize = 2_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubgroupError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("interval has more than {cap} members")]
    CapExceeded { cap: usize },
    #[error("interval lattice is not distributive")]
    NotDistributive,
    #[error("no single coset generates the top group over a distributive interval")]
    OreViolation,
    #[error("subgroup is not a member of the interval")]
    NotAMember,
}

/// Multiplication in a fixed ambient group by element index.
struct Ambient<'a> {
    group: &'a FiniteGroup,
    table: Option<Vec<u32>>,
}

impl<'a> Ambient<'a> {
    fn new(group: &'a FiniteGroup) -> Self {
        let n = group.order();
        let table = (n <= TABLE_LIMIT).then(|| {
            let els = group.elements();
            let mut t = Vec::with_capacity(n * n);
            for a in els {
                for b in els {
                    t.push(group.position(&a.then(b)).expect("closed") as u32);
                }
            }
            t
        });
        Ambient { group, table }
    }

    fn len(&self) -> usize {
        self.group.order()
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.len() + b] as usize,
            None => {
                let els = self.group.elements();
                self.group.position(&els[a].then(&els[b])).expect("closed")
            }
        }
    }

    fn index(&self, g: &Permutation) -> Result<usize, PermError> {
        self.group.position(g).ok_or(PermError::ElementOutsideGroup)
    }

    fn identity(&self) -> usize {
        self.group.position(&self.group.identity()).expect("identity")
    }

    fn closure(&self, gens: &[usize]) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.len());
        let e = self.identity();
        set.insert(e);
        let mut queue = VecDeque::from([e]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !set.put(y) {
                    queue.push_back(y);
                }
            }
        }
        set
    }

    fn to_group(&self, bits: &FixedBitSet, gens: &[usize]) -> FiniteGroup {
        let els = self.group.elements();
        FiniteGroup::from_parts(
            self.group.degree(),
            gens.iter().map(|&i| els[i].clone()).collect(),
            bits.ones().map(|i| els[i].clone()).collect(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct GroupInterval {
    ambient: FiniteGroup,
    base: FiniteGroup,
    members: Vec<FiniteGroup>,
    lattice: FiniteLattice,
    index_of: Vec<u64>,
    /// Right coset representatives of the base, each with the member id of
    /// the group it generates together with the base.
    cosets: Vec<(Permutation, usize)>,
}

impl GroupInterval {
    pub fn ambient(&self) -> &FiniteGroup {
        &self.ambient
    }

    pub fn base(&self) -> &FiniteGroup {
        &self.base
    }

    pub fn members(&self) -> &[FiniteGroup] {
        &self.members
    }

    pub fn member(&self, id: usize) -> &FiniteGroup {
        &self.members[id]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    /// `|G : K|` for member `id`.
    pub fn index_of(&self, id: usize) -> u64 {
        self.index_of[id]
    }

    pub fn indices(&self) -> &[u64] {
        &self.index_of
    }

    /// `|upper : lower|` for members `lower <= upper`.
    pub fn relative_index(&self, lower: usize, upper: usize) -> u64 {
        self.index_of[lower] / self.index_of[upper]
    }

    pub fn bottom(&self) -> usize {
        self.lattice.bottom()
    }

    pub fn top(&self) -> usize {
        self.lattice.top()
    }

    pub fn find_member(&self, group: &FiniteGroup) -> Option<usize> {
        self.members.iter().position(|m| m == group)
    }

    /// Atoms of the interval, i.e. the minimal overgroups of the base.
    pub fn minimal_overgroups(&self) -> Vec<usize> {
        self.lattice.atoms()
    }

    pub fn coset_extensions(&self) -> &[(Permutation, usize)] {
        &self.cosets
    }

    /// The interval `[member(lower), member(upper)]` as a group interval in
    /// its own right.
    pub fn sub_interval(&self, lower: usize, upper: usize) -> Result<GroupInterval, SubgroupError> {
        let sub = self.lattice.interval(lower, upper)?;
        let ambient = self.members[upper].clone();
        let base = self.members[lower].clone();
        let members: Vec<FiniteGroup> =
            sub.embedding.iter().map(|&i| self.members[i].clone()).collect();
        let index_of = sub
            .embedding
            .iter()
            .map(|&i| self.index_of[i] / self.index_of[upper])
            .collect();
        let cosets = ambient
            .right_cosets(&base)?
            .into_iter()
            .map(|g| {
                let mut gens = base.generators().to_vec();
                gens.push(g.clone());
                let generated = FiniteGroup::generate_with_cap(ambient.degree(), gens, ambient.order())
                    .expect("closure stays inside the ambient group");
                let id = members
                    .iter()
                    .position(|m| *m == generated)
                    .expect("every cyclic extension is a member");
                (g, id)
            })
            .collect();
        Ok(GroupInterval {
            ambient,
            base,
            members,
            lattice: sub.lattice,
            index_of,
            cosets,
        })
    }

    /// Some `g` with `<H, g> = G`.
    pub fn verify_ore(&self) -> Result<Permutation, SubgroupError> {
        if !self.lattice.is_distributive() {
            return Err(SubgroupError::NotDistributive);
        }
        let top = self.top();
        self.cosets
            .iter()
            .find(|(_, id)| *id == top)
            .map(|(g, _)| g.clone())
            .ok_or(SubgroupError::OreViolation)
    }

    /// Number of right cosets `Hg` with `<Hg> = G`.
    pub fn generating_coset_count(&self) -> u64 {
        let top = self.top();
        self.cosets.iter().filter(|(_, id)| *id == top).count() as u64
    }
}

/// All subgroups `K` with `base <= K <= ambient`.
pub fn overgroup_interval(ambient: &FiniteGroup, base: &FiniteGroup) -> Result<GroupInterval, SubgroupError> {
    overgroup_interval_with_cap(ambient, base, DEFAULT_MEMBER_CAP)
}

pub fn overgroup_interval_with_cap(
    ambient: &FiniteGroup,
    base: &FiniteGroup,
    cap: usize,
) -> Result<GroupInterval, SubgroupError> {
    if !base.is_subgroup_of(ambient) {
        return Err(PermError::NotASubgroup.into());
    }
    let amb = Ambient::new(ambient);
    let base_gens: Vec<usize> = base
        .generators()
        .iter()
        .map(|g| amb.index(g))
        .collect::<Result<_, _>>()?;

    let mut bits: Vec<FixedBitSet> = Vec::new();
    let mut gens: Vec<Vec<usize>> = Vec::new();
    let mut lookup: HashMap<FixedBitSet, usize> = HashMap::new();
    let mut insert = |set: FixedBitSet, g: Vec<usize>, bits: &mut Vec<FixedBitSet>, gens: &mut Vec<Vec<usize>>| {
        if let Some(&id) = lookup.get(&set) {
            return Ok((id, false));
        }
        if bits.len() >= cap {
            return Err(SubgroupError::CapExceeded { cap });
        }
        let id = bits.len();
        lookup.insert(set.clone(), id);
        bits.push(set);
        gens.push(g);
        Ok((id, true))
    };

    insert(amb.closure(&base_gens), base_gens.clone(), &mut bits, &mut gens)?;
    let reps = ambient.right_cosets(base)?;
    let mut coset_ids = Vec::with_capacity(reps.len());
    // (generator over the base, member id) for each distinct cyclic extension
    let mut extensions: Vec<(usize, usize)> = Vec::new();
    for g in &reps {
        let gi = amb.index(g)?;
        if base.contains(g) {
            coset_ids.push(0);
            continue;
        }
        let mut g_gens = base_gens.clone();
        g_gens.push(gi);
        let (id, fresh) = insert(amb.closure(&g_gens), g_gens, &mut bits, &mut gens)?;
        if fresh {
            extensions.push((gi, id));
        }
        coset_ids.push(id);
    }

    let mut queue: VecDeque<usize> = (0..bits.len()).collect();
    while let Some(m) = queue.pop_front() {
        for &(g, e) in &extensions {
            if bits[e].is_subset(&bits[m]) || bits[m].is_subset(&bits[e]) {
                continue;
            }
            let mut j_gens = gens[m].clone();
            j_gens.push(g);
            let set = amb.closure(&j_gens);
            let (id, fresh) = insert(set, j_gens, &mut bits, &mut gens)?;
            if fresh {
                queue.push_back(id);
            }
        }
    }

    let mut order: Vec<usize> = (0..bits.len()).collect();
    let keys: Vec<(usize, Vec<usize>)> =
        bits.iter().map(|b| (b.count_ones(..), b.ones().collect())).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut new_id = vec![0usize; bits.len()];
    for (pos, &old) in order.iter().enumerate() {
        new_id[old] = pos;
    }
    let sorted_bits: Vec<&FixedBitSet> = order.iter().map(|&i| &bits[i]).collect();
    let lattice = FiniteLattice::from_relation(sorted_bits.len(), |a, b| {
        sorted_bits[a].is_subset(sorted_bits[b])
    })?;
    let members: Vec<FiniteGroup> =
        order.iter().map(|&i| amb.to_group(&bits[i], &gens[i])).collect();
    let index_of = members
        .iter()
        .map(|m| (ambient.order() / m.order()) as u64)
        .collect();
    let cosets = reps
        .into_iter()
        .zip(coset_ids)
        .map(|(g, id)| (g, new_id[id]))
        .collect();
    Ok(GroupInterval {
        ambient: ambient.clone(),
        base: members[0].clone(),
        members,
        lattice,
        index_of,
        cosets,
    })
}

/// The whole subgroup lattice, as the interval over the trivial subgroup.
pub fn full_subgroup_lattice(group: &FiniteGroup) -> Result<GroupInterval, SubgroupError> {
    overgroup_interval(group, &FiniteGroup::trivial(group.degree()))
}

/// Shortest number of bottom-boolean steps from each member up to the top.
fn bottom_boolean_distances(interval: &GroupInterval) -> Vec<usize> {
    let lattice = interval.lattice();
    let n = lattice.len();
    let top = lattice.top();
    let mut dist = vec![usize::MAX; n];
    dist[top] = 0;
    // members are sorted by order, so larger ids are never strictly below smaller ones
    for x in (0..n).rev() {
        if x == top {
            continue;
        }
        for y in x + 1..n {
            if dist[y] != usize::MAX && dist[y] + 1 < dist[x] && lattice.lt(x, y)
                && lattice.is_bottom_boolean_between(x, y)
            {
                dist[x] = dist[y] + 1;
            }
        }
    }
    dist
}

/// Length of a shortest chain from `base` to `group` whose steps are all
/// bottom-boolean intervals.
pub fn bbl_between(group: &FiniteGroup, base: &FiniteGroup) -> Result<usize, SubgroupError> {
    let interval = overgroup_interval(group, base)?;
    Ok(bottom_boolean_distances(&interval)[interval.bottom()])
}

pub fn bbl(group: &FiniteGroup) -> Result<usize, SubgroupError> {
    bbl_between(group, &FiniteGroup::trivial(group.degree()))
}

/// Minimum of `bbl_between(group, H)` over core-free subgroups `H`.
pub fn cfl(group: &FiniteGroup) -> Result<usize, SubgroupError> {
    let full = full_subgroup_lattice(group)?;
    let dist = bottom_boolean_distances(&full);
    let mut best = usize::MAX;
    for (id, member) in full.members().iter().enumerate() {
        if dist[id] < best && group.normal_core(member)?.order() == 1 {
            best = dist[id];
        }
    }
    Ok(best)
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

    fn cyclic(n: usize) -> FiniteGroup {
        let cycle: Vec<usize> = (0..n).collect();
        FiniteGroup::generate(n, vec![perm(n, &[&cycle])]).unwrap()
    }

    #[test]
    fn trivial_and_small_intervals() {
        let g = s3();
        let whole = overgroup_interval(&g, &g).unwrap();
        assert_eq!(whole.len(), 1);
        let a3 = g.subgroup_generated(&[perm(3, &[&[0, 1, 2]])]).unwrap();
        let chain = overgroup_interval(&g, &a3).unwrap();
        assert_eq!(chain.len(), 2);
        assert_eq!(chain.minimal_overgroups(), vec![chain.top()]);
        assert_eq!(chain.index_of(chain.bottom()), 2);
        assert_eq!(chain.index_of(chain.top()), 1);
    }

    #[test]
    fn full_lattices() {
        let s3_lattice = full_subgroup_lattice(&s3()).unwrap();
        assert_eq!(s3_lattice.len(), 6);
        assert!(!s3_lattice.lattice().is_bottom_boolean());
        let z12 = full_subgroup_lattice(&cyclic(12)).unwrap();
        assert_eq!(z12.len(), 6);
        assert!(z12.lattice().is_distributive());
        let v4 = FiniteGroup::generate(4, vec![perm(4, &[&[0, 1]]), perm(4, &[&[2, 3]])]).unwrap();
        let v4_lattice = full_subgroup_lattice(&v4).unwrap();
        assert_eq!(v4_lattice.len(), 5);
        assert!(!v4_lattice.lattice().is_distributive());
    }

    #[test]
    fn members_are_closed_and_ordered_by_inclusion() {
        let lat = full_subgroup_lattice(&s3()).unwrap();
        for a in 0..lat.len() {
            for b in 0..lat.len() {
                let ma = lat.member(a);
                let mb = lat.member(b);
                assert_eq!(lat.lattice().leq(a, b), ma.is_subgroup_of(mb));
                let meet = lat.member(lat.lattice().meet(a, b));
                assert_eq!(*meet, ma.intersect(mb).unwrap());
                let join = lat.member(lat.lattice().join(a, b));
                assert_eq!(*join, ma.join(mb).unwrap());
            }
        }
    }

    #[test]
    fn member_cap() {
        let err = overgroup_interval_with_cap(&s3(), &FiniteGroup::trivial(3), 3).unwrap_err();
        assert_eq!(err, SubgroupError::CapExceeded { cap: 3 });
    }

    #[test]
    fn sub_interval_matches_direct_construction() {
        let g = s3();
        let full = full_subgroup_lattice(&g).unwrap();
        for a in 0..full.len() {
            for b in 0..full.len() {
                if !full.lattice().leq(a, b) {
                    continue;
                }
                let sub = full.sub_interval(a, b).unwrap();
                let direct = overgroup_interval(full.member(b), full.member(a)).unwrap();
                assert_eq!(sub.members(), direct.members());
                assert_eq!(sub.indices(), direct.indices());
                assert_eq!(sub.generating_coset_count(), direct.generating_coset_count());
            }
        }
    }

    #[test]
    fn bbl_and_cfl_small() {
        assert_eq!(bbl(&cyclic(5)).unwrap(), 1);
        assert_eq!(bbl(&cyclic(12)).unwrap(), 1);
        assert_eq!(bbl(&s3()).unwrap(), 2);
        assert_eq!(cfl(&cyclic(5)).unwrap(), 1);
        assert_eq!(cfl(&s3()).unwrap(), 1);
    }

    #[test]
    fn ore_witnesses() {
        let g = s3();
        let a3 = g.subgroup_generated(&[perm(3, &[&[0, 1, 2]])]).unwrap();
        let interval = overgroup_interval(&g, &a3).unwrap();
        let w = interval.verify_ore().unwrap();
        assert_eq!(w.order(), 2);
        let z12 = full_subgroup_lattice(&cyclic(12)).unwrap();
        assert_eq!(z12.verify_ore().unwrap().order(), 12);
        assert_eq!(z12.generating_coset_count(), 4);
        let full_s3 = full_subgroup_lattice(&g).unwrap();
        assert_eq!(full_s3.verify_ore().unwrap_err(), SubgroupError::NotDistributive);
    }
}
