use orelat_core::catalog;
use orelat_core::subgroups;
use orelat_core::totient::IndexedInterval;

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn prime_factor_count(mut n: u64) -> usize {
    let mut count = 0;
    let mut d = 2;
    while n > 1 {
        while n % d == 0 {
            n /= d;
            count += 1;
        }
        d += 1;
    }
    count
}

/// Every boolean interval `[H, K]` of rank at least 2 in the catalog.
fn boolean_intervals() -> Vec<(String, IndexedInterval)> {
    let mut out = Vec::new();
    for &name in catalog::SMALL_CATALOG {
        let g = catalog::group(name).unwrap();
        let full = IndexedInterval::from_group_interval(&subgroups::full_subgroup_lattice(&g).unwrap());
        let l = full.lattice();
        for h in 0..l.len() {
            for k in h + 1..l.len() {
                if l.lt(h, k) && l.is_boolean_between(h, k) && l.height(k) - l.height(h) >= 2 {
                    let sub = full.interval(h, k).unwrap();
                    if sub.rank() >= 2 {
                        out.push((name.to_string(), sub));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn cover_indices_grow_along_faces() {
    for (name, interval) in boolean_intervals() {
        let l = interval.lattice();
        let atoms = l.atoms();
        for &a in &atoms {
            let complement = l.join_all(atoms.iter().copied().filter(|&b| b != a));
            let face = l.elements_between(l.bottom(), complement);
            let lift = |k: usize| interval.relative_index(k, l.join(k, a));
            for &k1 in &face {
                for &k2 in &face {
                    if l.leq(k1, k2) {
                        assert!(lift(k1) <= lift(k2), "{name}");
                    }
                }
            }
            if interval.idx(complement) == 2 {
                assert!(face.iter().all(|&k| lift(k) == 2), "{name}");
            }
        }
    }
}

#[test]
fn prime_cover_indices_when_index_has_rank_many_primes() {
    let mut seen = 0;
    for (name, interval) in boolean_intervals() {
        if prime_factor_count(interval.total_index()) != interval.rank() {
            continue;
        }
        seen += 1;
        let l = interval.lattice();
        for x in 0..l.len() {
            for &y in l.upper_covers(x) {
                let k = interval.relative_index(x, y);
                assert!(is_prime(k) && interval.total_index() % k == 0, "{name}: cover index {k}");
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn index_two_edge_forces_index_two_coatom() {
    for (name, interval) in boolean_intervals() {
        let l = interval.lattice();
        let has_two_edge = (0..l.len()).any(|x| l.upper_covers(x).iter().any(|&y| interval.relative_index(x, y) == 2));
        if has_two_edge {
            let atoms = l.atoms();
            let found = atoms.iter().any(|&a| {
                let complement = l.join_all(atoms.iter().copied().filter(|&b| b != a));
                interval.idx(complement) == 2
            });
            assert!(found, "{name}");
        }
    }
}
