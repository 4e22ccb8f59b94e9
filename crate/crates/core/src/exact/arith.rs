use alloc::vec::Vec;

use num_integer::Integer;

use crate::error::{Error, Result};

pub fn gcd(a: i64, b: i64) -> u64 {
    a.unsigned_abs().gcd(&b.unsigned_abs())
}

/// x in [0, c) with a·x ≡ 1 (mod c); 0 when c = 1.
pub fn mod_inverse(a: i64, c: u64) -> Result<u64> {
    if c == 0 {
        return Err(Error::Invalid("modulus must be positive".into()));
    }
    if c == 1 {
        return Ok(0);
    }
    let m = c as i128;
    let r = (a as i128).rem_euclid(m);
    let e = r.extended_gcd(&m);
    if e.gcd != 1 {
        return Err(Error::NotInvertible { a, c });
    }
    Ok(e.x.rem_euclid(m) as u64)
}

pub fn is_prime(n: u64) -> bool {
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

/// Prime factorization in increasing order of primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = alloc::vec![1u64];
    for (p, k) in factorize(n) {
        let cur = ds.clone();
        let mut pk = 1;
        for _ in 0..k {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

pub fn moebius(n: u64) -> i8 {
    let f = factorize(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Smallest prime factor for every n ≤ limit (spf[0] = spf[1] = 0).
pub fn smallest_prime_factors(limit: usize) -> Vec<u32> {
    let mut spf = alloc::vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

pub fn primes_up_to(limit: usize) -> Vec<u64> {
    let spf = smallest_prime_factors(limit);
    (2..=limit).filter(|&i| spf[i] as usize == i).map(|i| i as u64).collect()
}

/// d₃(n), the number of ordered factorizations n = abc; bounds |A(1, n)|.
pub fn divisor_count3(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, k)| (k as u64 + 1) * (k as u64 + 2) / 2).product()
}
