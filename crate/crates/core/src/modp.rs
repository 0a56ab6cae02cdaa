//! Arithmetic and linear algebra over a prime field `F_p` with `p < 2^31`.

pub(crate) fn mul(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

pub(crate) fn add(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

pub(crate) fn sub(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b) % p
}

pub(crate) fn pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base, p);
        }
        base = mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue.
pub(crate) fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow(a, p - 2, p)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest prime `p = 1 (mod modulus)` with `p > lower`.
pub(crate) fn prime_congruent_one(modulus: u64, lower: u64) -> u64 {
    let mut p = modulus + 1;
    while p <= lower || !is_prime(p) {
        p += modulus;
    }
    p
}

pub(crate) fn primitive_root(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow(g, (p - 1) / q, p) != 1))
        .unwrap_or(1)
}

/// Row-reduces `rows` in place; returns the pivot column of each nonzero row
/// and truncates the zero rows.
pub(crate) fn row_reduce(rows: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let scale = inv(rows[r][c], p);
        for v in rows[r].iter_mut() {
            *v = mul(*v, scale, p);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for k in 0..cols {
                    let t = mul(f, rows[r][k], p);
                    rows[i][k] = sub(rows[i][k], t, p);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{ x : a x = 0 }` for a square matrix `a`.
pub(crate) fn nullspace(a: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut rows = a.to_vec();
    let pivots = row_reduce(&mut rows, p);
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut x = vec![0u64; n];
        x[free] = 1;
        for (row, &pc) in rows.iter().zip(&pivots) {
            x[pc] = sub(0, row[free], p);
        }
        basis.push(x);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_roots() {
        assert_eq!(prime_congruent_one(84, 26), 337);
        assert_eq!(prime_congruent_one(60, 22), 61);
        assert_eq!(prime_congruent_one(6, 41), 43);
        let g = primitive_root(337);
        let mut seen = std::collections::HashSet::new();
        for k in 0..336 {
            seen.insert(pow(g, k, 337));
        }
        assert_eq!(seen.len(), 336);
    }

    #[test]
    fn nullspace_of_singular_matrix() {
        let p = 7;
        let a = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        let basis = nullspace(&a, p);
        assert_eq!(basis.len(), 1);
        for row in &a {
            let dot = row.iter().zip(&basis[0]).fold(0, |acc, (x, y)| add(acc, mul(*x, *y, p), p));
            assert_eq!(dot, 0);
        }
        assert_eq!(mul(inv(3, p), 3, p), 1);
    }
}
