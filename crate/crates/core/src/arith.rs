//! Small number-theoretic helpers shared by the local and global modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// p-adic valuation of a nonzero integer. Returns `None` for zero.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// Valuation with zero mapped to `cap`.
pub fn valuation_capped(n: &BigInt, p: u64, cap: u32) -> u32 {
    valuation(n, p).map_or(cap, |v| v.min(cap))
}

/// Strips every factor of `p` from `n`.
pub fn unit_part(n: &BigInt, p: u64) -> BigInt {
    let v = valuation(n, p).unwrap_or(0);
    n / BigInt::from(p).pow(v)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime divisors of a nonzero integer, ascending. Trial division.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Prime factorisation of |n| as (prime, exponent) pairs.
pub fn factorize(n: &BigInt) -> Vec<(u64, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut d: u64 = 2;
    loop {
        let dd = BigInt::from(d);
        if &dd * &dd > n {
            break;
        }
        let mut e = 0;
        while (&n % &dd).is_zero() {
            n /= &dd;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push((n.to_u64().expect("prime factor exceeds u64"), 1));
    }
    out
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let a = a.mod_floor(&pb);
    if a.is_zero() {
        return 0;
    }
    let e = BigInt::from((p - 1) / 2);
    let r = a.modpow(&e, &pb);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// Kronecker symbol (a/n) for n > 0.
pub fn kronecker(a: i64, n: i64) -> i32 {
    assert!(n > 0);
    let mut n = n;
    let mut result = 1;
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            0 | 2 | 4 | 6 => return 0,
            3 | 5 => result = -result,
            _ => {}
        }
    }
    // Jacobi (a/n) with n odd
    let mut a = a.rem_euclid(n);
    let mut m = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// Inverse of a unit modulo m.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Square-class coordinates of a unit modulo 8: (u ≡ 3 mod 4, u ≡ ±3 mod 8).
pub fn dyadic_unit_bits(u: i64) -> (bool, bool) {
    let r = u.rem_euclid(8);
    debug_assert!(r % 2 == 1);
    (r % 4 == 3, r == 3 || r == 5)
}

/// Squarefree part of a positive integer together with the square root of the cofactor.
pub fn squarefree_decomposition(n: &BigInt) -> (BigInt, BigInt) {
    let mut core = BigInt::one();
    let mut root = BigInt::one();
    for (p, e) in factorize(n) {
        let pb = BigInt::from(p);
        if e % 2 == 1 {
            core *= &pb;
        }
        root *= pb.pow(e / 2);
    }
    if n.is_negative() {
        core = -core;
    }
    (core, root)
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

pub fn ipow(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigInt::from(729), 3), Some(6));
        assert_eq!(valuation(&BigInt::from(-48), 2), Some(4));
        assert_eq!(valuation(&BigInt::from(0), 2), None);
        assert_eq!(unit_part(&BigInt::from(96), 2), BigInt::from(3));
    }

    #[test]
    fn factor_and_primes() {
        assert_eq!(factorize(&BigInt::from(175616)), vec![(2, 9), (7, 3)]);
        assert_eq!(prime_divisors(&BigInt::from(46656)), vec![2, 3]);
        assert!(is_prime(23) && !is_prime(1) && !is_prime(91));
    }

    #[test]
    fn symbols_agree_with_brute_force() {
        for p in [3u64, 5, 7, 11, 13] {
            for a in 1..p {
                let is_sq = (1..p).any(|x| (x * x) % p == a);
                assert_eq!(legendre(&BigInt::from(a), p), if is_sq { 1 } else { -1 });
                assert_eq!(kronecker(a as i64, p as i64), legendre(&BigInt::from(a), p));
            }
        }
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(12, 2), 0);
        assert_eq!(kronecker(12, 3), 0);
    }

    #[test]
    fn squarefree() {
        let (c, r) = squarefree_decomposition(&BigInt::from(72));
        assert_eq!((c, r), (BigInt::from(2), BigInt::from(6)));
    }
}
