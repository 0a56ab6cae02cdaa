//! Built-in groups addressed by name.
//!
//! Names: `Z<n>` (or `C<n>`), `V4`, `D<2n>` (dihedral of order `2n`), `S<n>`,
//! `A<n>`, `PSL(2,7)`, and direct products joined by `x`, with `^k` for
//! powers, e.g. `Z2xS3` or `S2xS3^3`.

use thiserror::Error;

use crate::perm::{FiniteGroup, PermError, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown catalog group `{0}`")]
    UnknownGroup(String),
    #[error("unknown subgroup `{sub}` of `{group}`")]
    UnknownSubgroup { group: String, sub: String },
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// Groups used by the catalog-wide checks; all have order at most 200.
pub const SMALL_CATALOG: &[&str] = &[
    "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z12", "Z16", "Z30", "V4",
    "D8", "D10", "D12", "S3", "S4", "A4", "A5", "S5", "PSL(2,7)", "Z2xZ4", "Z2xS3",
    "Z3xS3", "S3xS3", "Z2xZ2xZ2", "S2xS3^2",
];

fn perm(degree: usize, cycles: &[&[usize]]) -> Permutation {
    Permutation::from_cycles(degree, cycles).expect("catalog permutations are valid")
}

pub fn cyclic(n: usize) -> FiniteGroup {
    if n <= 1 {
        return FiniteGroup::trivial(1);
    }
    let cycle: Vec<usize> = (0..n).collect();
    FiniteGroup::generate(n, vec![perm(n, &[&cycle])]).expect("small group")
}

/// Dihedral group of order `2n` acting on `n` points.
pub fn dihedral(n: usize) -> FiniteGroup {
    assert!(n >= 3, "dihedral groups need n >= 3");
    let rotation: Vec<usize> = (0..n).collect();
    let mut reflection = vec![0usize; n];
    for (i, r) in reflection.iter_mut().enumerate() {
        *r = (n - i) % n;
    }
    FiniteGroup::generate(
        n,
        vec![
            perm(n, &[&rotation]),
            Permutation::from_images(reflection).expect("reflection is a bijection"),
        ],
    )
    .expect("small group")
}

pub fn symmetric(n: usize) -> FiniteGroup {
    if n <= 1 {
        return FiniteGroup::trivial(1);
    }
    let cycle: Vec<usize> = (0..n).collect();
    FiniteGroup::generate(n, vec![perm(n, &[&[0, 1]]), perm(n, &[&cycle])]).expect("small group")
}

pub fn alternating(n: usize) -> FiniteGroup {
    if n <= 2 {
        return FiniteGroup::trivial(n.max(1));
    }
    let gens = (2..n).map(|k| perm(n, &[&[0, 1, k]])).collect();
    FiniteGroup::generate(n, gens).expect("small group")
}

pub fn klein_four() -> FiniteGroup {
    FiniteGroup::generate(4, vec![perm(4, &[&[0, 1], &[2, 3]]), perm(4, &[&[0, 2], &[1, 3]])])
        .expect("small group")
}

/// PSL(2,7) acting on the projective line over F7; point 7 is infinity.
pub fn psl27() -> FiniteGroup {
    FiniteGroup::generate(
        8,
        vec![
            perm(8, &[&[0, 1, 2, 3, 4, 5, 6]]),
            perm(8, &[&[0, 7], &[1, 6], &[2, 3], &[4, 5]]),
        ],
    )
    .expect("order 168")
}

/// A Sylow 2-subgroup of `psl27()`.
pub fn psl27_d8() -> FiniteGroup {
    psl27()
        .subgroup_generated(&[
            perm(8, &[&[0, 1, 2, 7], &[3, 5, 4, 6]]),
            perm(8, &[&[0, 3], &[1, 6], &[2, 4], &[5, 7]]),
        ])
        .expect("elements of PSL(2,7)")
}

/// An S3 inside `psl27()` with two S4 overgroups.
pub fn psl27_s3() -> FiniteGroup {
    psl27()
        .subgroup_generated(&[
            perm(8, &[&[2, 6, 7], &[3, 5, 4]]),
            perm(8, &[&[0, 1], &[2, 3], &[4, 6], &[5, 7]]),
        ])
        .expect("elements of PSL(2,7)")
}

/// `S2 x S3^n` together with its subgroup `1 x S2^n`, where each `S2` sits
/// inside the matching `S3` as a point stabilizer.
pub fn s2_times_s3_power(n: usize) -> (FiniteGroup, FiniteGroup) {
    let degree = 2 + 3 * n;
    let mut g_gens = vec![perm(degree, &[&[0, 1]])];
    let mut h_gens = Vec::new();
    for i in 0..n {
        let o = 2 + 3 * i;
        g_gens.push(perm(degree, &[&[o, o + 1]]));
        g_gens.push(perm(degree, &[&[o, o + 1, o + 2]]));
        h_gens.push(perm(degree, &[&[o, o + 1]]));
    }
    let g = FiniteGroup::generate(degree, g_gens).expect("small group");
    let h = g.subgroup_generated(&h_gens).expect("elements of G");
    (g, h)
}

fn parse_factor(name: &str) -> Option<FiniteGroup> {
    let upper = name.to_ascii_uppercase();
    if upper == "PSL(2,7)" || upper == "PSL27" || upper == "L3(2)" {
        return Some(psl27());
    }
    if upper == "V4" {
        return Some(klein_four());
    }
    if upper.is_empty() || !upper.is_char_boundary(1) {
        return None;
    }
    let (head, tail) = upper.split_at(1);
    let n: usize = tail.parse().ok()?;
    match head {
        "Z" | "C" if (1..=64).contains(&n) => Some(cyclic(n)),
        "D" if n >= 6 && n % 2 == 0 && n <= 64 => Some(dihedral(n / 2)),
        "S" if (1..=6).contains(&n) => Some(symmetric(n)),
        "A" if (1..=6).contains(&n) => Some(alternating(n)),
        _ => None,
    }
}

/// Looks a group up by name.
pub fn group(name: &str) -> Result<FiniteGroup, CatalogError> {
    let unknown = || CatalogError::UnknownGroup(name.to_string());
    let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(unknown());
    }
    let mut result: Option<FiniteGroup> = None;
    for factor in compact.split(['x', 'X', '*']) {
        let (base, power) = match factor.split_once('^') {
            Some((b, p)) => (b, p.parse::<usize>().map_err(|_| unknown())?),
            None => (factor, 1),
        };
        let g = parse_factor(base).ok_or_else(unknown)?;
        for _ in 0..power {
            result = Some(match result {
                None => g.clone(),
                Some(acc) => acc.direct_product(&g)?,
            });
        }
    }
    result.ok_or_else(unknown)
}

/// Named subgroups: `trivial`, `whole`, and for PSL(2,7) also `D8` and `S3`.
/// For `S2xS3^n` the name `S2^n` gives the base subgroup `1 x S2^n`.
pub fn subgroup(group_name: &str, sub_name: &str) -> Result<FiniteGroup, CatalogError> {
    let g = group(group_name)?;
    let unknown = || CatalogError::UnknownSubgroup {
        group: group_name.to_string(),
        sub: sub_name.to_string(),
    };
    let sub = sub_name.trim().to_ascii_uppercase();
    match sub.as_str() {
        "TRIVIAL" | "1" => return Ok(FiniteGroup::trivial(g.degree())),
        "WHOLE" | "G" => return Ok(g),
        _ => {}
    }
    if g == psl27() {
        return match sub.as_str() {
            "D8" => Ok(psl27_d8()),
            "S3" => Ok(psl27_s3()),
            _ => Err(unknown()),
        };
    }
    if let Some(n) = sub.strip_prefix("S2^").and_then(|n| n.parse::<usize>().ok()) {
        let (big, base) = s2_times_s3_power(n);
        if big == g {
            return Ok(base);
        }
    }
    Err(unknown())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        let expected = [
            ("Z12", 12),
            ("V4", 4),
            ("D8", 8),
            ("D10", 10),
            ("S3", 6),
            ("S4", 24),
            ("S5", 120),
            ("A4", 12),
            ("A5", 60),
            ("PSL(2,7)", 168),
            ("Z2xS3", 12),
            ("S2xS3^3", 432),
            ("Z2xZ2xZ2", 8),
        ];
        for (name, order) in expected {
            assert_eq!(group(name).unwrap().order(), order, "{name}");
        }
        assert!(matches!(group("Q8"), Err(CatalogError::UnknownGroup(_))));
        assert!(group("").is_err());
    }

    #[test]
    fn psl27_subgroups() {
        let g = psl27();
        assert_eq!(g.order(), (7 * 7 * 7 - 7) / 2);
        let d8 = psl27_d8();
        assert_eq!(d8.order(), 8);
        assert!(!d8.is_abelian());
        assert_eq!(psl27_s3().order(), 6);
        assert_eq!(g.index(&d8).unwrap(), 21);
        assert_eq!(g.normal_core(&d8).unwrap().order(), 1);
    }

    #[test]
    fn power_products() {
        for n in 1..=3 {
            let (g, h) = s2_times_s3_power(n);
            assert_eq!(g.order(), 2 * 6usize.pow(n as u32));
            assert_eq!(h.order(), 2usize.pow(n as u32));
        }
        let name = "S2xS3^2";
        assert_eq!(subgroup(name, "S2^2").unwrap(), s2_times_s3_power(2).1);
    }

    #[test]
    fn small_catalog_resolves() {
        for name in SMALL_CATALOG {
            let g = group(name).unwrap();
            assert!(g.order() <= 200, "{name}");
        }
    }
}
