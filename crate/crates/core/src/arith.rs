//! Integer helpers shared by the polynomial and p-adic layers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Deterministic primality test for the small moduli used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `p^e` as a machine integer, `None` on overflow.
pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    p.checked_pow(e)
}

pub fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Binomial coefficient with the convention `C(n, k) = 0` outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// The full row `C(n, 0..=n)` via the multiplicative recurrence.
pub fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

/// Canonical representative of `a` in `[0, m)`.
pub fn mod_floor(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

pub fn mod_floor_u64(a: &BigInt, m: u64) -> u64 {
    a.mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("residue fits below modulus")
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(a: &BigInt, p: u64) -> Option<u32> {
    if a.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut a = a.abs();
    let mut v = 0;
    loop {
        let (q, r) = a.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        a = q;
        v += 1;
    }
}

pub fn valuation_u64(mut a: u64, p: u64) -> Option<u32> {
    if a == 0 {
        return None;
    }
    let mut v = 0;
    while a.is_multiple_of(p) {
        a /= p;
        v += 1;
    }
    Some(v)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Residue of the rational `num/den` modulo `m`; `None` when `den` is not invertible.
pub fn rational_mod(num: i64, den: i64, m: u64) -> Option<u64> {
    let mi = m as i128;
    let d = (den as i128).rem_euclid(mi) as u64;
    let inv = inv_mod(d, m)?;
    let n = (num as i128).rem_euclid(mi) as u64;
    Some(mul_mod(n, inv, m))
}

/// `C(n, k) mod p^e` for `k = 0..=n`, tracking the p-adic valuation and
/// the unit part separately so that every step stays in machine integers.
pub fn binomial_row_mod(n: u64, p: u64, e: u32) -> Vec<u64> {
    let m = p.checked_pow(e).expect("modulus fits in u64");
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut unit = 1u64 % m;
    let mut val: u32 = 0;
    let split = |mut a: u64| -> (u64, u32) {
        let mut v = 0;
        while a.is_multiple_of(p) {
            a /= p;
            v += 1;
        }
        (a, v)
    };
    let emit = |unit: u64, val: u32| -> u64 {
        if val >= e {
            0
        } else {
            mul_mod(unit, p.pow(val), m)
        }
    };
    row.push(emit(unit, val));
    for k in 0..n {
        let (num, vn) = split(n - k);
        let (den, vd) = split(k + 1);
        unit = mul_mod(unit, num % m, m);
        unit = mul_mod(unit, inv_mod(den % m, m).expect("unit part is invertible"), m);
        val = val + vn - vd;
        row.push(emit(unit, val));
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(13, 1), BigInt::from(13));
        assert_eq!(binomial(4, 5), BigInt::zero());
        assert_eq!(binomial(4, -1), BigInt::zero());
        let row = binomial_row(6);
        let expect: Vec<BigInt> = [1, 6, 15, 20, 15, 6, 1].iter().map(|&c| BigInt::from(c)).collect();
        assert_eq!(row, expect);
        for k in 0..=40 {
            assert_eq!(binomial_row(40)[k as usize], binomial(40, k));
        }
    }

    #[test]
    fn binomial_rows_mod_prime_powers() {
        for &(n, p, e) in &[(40u64, 3u64, 3u32), (62, 5, 2), (100, 7, 2), (13, 13, 1), (0, 3, 1)] {
            let exact: Vec<u64> = binomial_row(n).iter().map(|c| mod_floor_u64(c, p.pow(e))).collect();
            assert_eq!(binomial_row_mod(n, p, e), exact, "n={n} p={p} e={e}");
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(2, 25), Some(13));
        assert_eq!(inv_mod(5, 25), None);
        assert_eq!(rational_mod(-1, 2, 9), Some(4));
        assert_eq!(rational_mod(-1, 3, 25), Some(8));
        assert_eq!(rational_mod(1, 3, 9), None);
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigInt::from(306), 3), Some(2));
        assert_eq!(valuation(&BigInt::from(-27), 3), Some(3));
        assert_eq!(valuation(&BigInt::zero(), 3), None);
        assert_eq!(valuation_u64(50, 5), Some(2));
    }
}
