use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const WITNESSES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Deterministic primality test.
///
/// Miller-Rabin with the first 13 prime bases is exact below 3.3 * 10^24;
/// larger inputs are rejected rather than answered probabilistically.
pub fn is_prime(n: &BigInt) -> Result<bool> {
    if n < &BigInt::from(2) {
        return Ok(false);
    }
    if let Some(small) = n.to_u64() {
        if small < 4 {
            return Ok(true);
        }
        for &p in &WITNESSES {
            if small == p {
                return Ok(true);
            }
            if small % p == 0 {
                return Ok(false);
            }
        }
    }
    let limit: BigInt = "3317044064679887385961981".parse().unwrap();
    if n >= &limit {
        return Err(Error::Precondition(format!(
            "{n} exceeds the deterministic primality bound"
        )));
    }
    let one = BigInt::one();
    let n_minus_one = n - &one;
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while (&d % 2u32).is_zero() {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let a = BigInt::from(a);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    debug_assert!(n.is_positive());
    Ok(true)
}

/// The smallest prime strictly greater than `p`.
pub fn next_prime(p: &BigInt) -> Result<BigInt> {
    let mut c = p + 1u32;
    while !is_prime(&c)? {
        c += 1u32;
    }
    Ok(c)
}
