//! Deterministic Miller-Rabin primality testing for `u64`.

/// Witnesses sufficient for every odd `n < 341_550_071_728_321`.
pub const SMALL_WITNESSES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];

/// Exclusive upper limit for which [`SMALL_WITNESSES`] is a deterministic test.
pub const SMALL_WITNESS_LIMIT: u64 = 341_550_071_728_321;

/// Witnesses sufficient for the whole `u64` range.
const FULL_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// Miller-Rabin with an explicit witness set. Deterministic only when the
/// witness set is known to cover `n`.
pub fn miller_rabin(n: u64, witnesses: &[u64]) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &FULL_WITNESSES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in witnesses {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic primality for any `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < SMALL_WITNESS_LIMIT {
        miller_rabin(n, &SMALL_WITNESSES)
    } else {
        miller_rabin(n, &FULL_WITNESSES)
    }
}
