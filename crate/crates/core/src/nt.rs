//! Small integer number theory used across the crate.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors, increasing.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
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

pub fn mobius(n: u64) -> i32 {
    let mut m = n;
    let mut sign = 1;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// p-adic valuation of a nonzero integer.
pub fn val_p(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// v_p(n!) by Legendre's formula.
pub fn val_p_factorial(n: u64, p: u64) -> u32 {
    let mut v = 0u64;
    let mut q = n / p;
    while q > 0 {
        v += q;
        q /= p;
    }
    v as u32
}

/// floor(log_p(n)) for n >= 1, and 0 for n = 0.
pub fn floor_log(n: u64, p: u64) -> u32 {
    let mut e = 0;
    let mut acc = p;
    while acc <= n {
        e += 1;
        match acc.checked_mul(p) {
            Some(a) => acc = a,
            None => break,
        }
    }
    e
}

pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

pub fn pow_u128(p: u64, e: u32) -> u128 {
    (0..e).fold(1u128, |acc, _| acc.saturating_mul(p as u128))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert!(is_prime(2) && is_prime(3) && is_prime(97));
        assert!(!is_prime(1) && !is_prime(91));
        assert_eq!(prime_factors(1953124), vec![2, 19, 31, 829]);
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(7), -1);
        assert_eq!(val_p_factorial(6, 2), 4);
        assert_eq!(val_p_factorial(39, 3), 18);
        assert_eq!(floor_log(39, 2), 5);
        assert_eq!(floor_log(1, 3), 0);
        assert_eq!(floor_log(3, 3), 1);
    }
}
