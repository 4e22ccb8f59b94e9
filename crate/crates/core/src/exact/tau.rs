//! Ramanujan's τ from the q-expansion of η²⁴.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

/// Sparse Euler product ∏(1 − qⁿ) up to q^len: pentagonal exponents with signs.
fn euler_product(len: usize) -> Vec<(usize, i8)> {
    let mut terms = alloc::vec![(0usize, 1i8)];
    let mut k = 1usize;
    loop {
        let sign = if k % 2 == 1 { -1 } else { 1 };
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 >= len {
            break;
        }
        terms.push((g1, sign));
        if g2 < len {
            terms.push((g2, sign));
        }
        k += 1;
    }
    terms.sort_unstable();
    terms
}

fn power_i128(e: &[(usize, i8)], len: usize) -> Option<Vec<i128>> {
    let mut acc = alloc::vec![0i128; len];
    acc[0] = 1;
    for _ in 0..24 {
        let mut next = alloc::vec![0i128; len];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(j, s) in e {
                if i + j >= len {
                    break;
                }
                let v = if s > 0 { next[i + j].checked_add(a) } else { next[i + j].checked_sub(a) };
                next[i + j] = v?;
            }
        }
        acc = next;
    }
    Some(acc)
}

fn power_big(e: &[(usize, i8)], len: usize) -> Vec<BigInt> {
    let mut acc = alloc::vec![BigInt::zero(); len];
    acc[0] = BigInt::from(1);
    for _ in 0..24 {
        let mut next = alloc::vec![BigInt::zero(); len];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(j, s) in e {
                if i + j >= len {
                    break;
                }
                if s > 0 {
                    next[i + j] += a;
                } else {
                    next[i + j] -= a;
                }
            }
        }
        acc = next;
    }
    acc
}

/// τ(1), …, τ(n) (index 0 holds τ(1)).
pub fn tau_table(n: usize) -> Vec<BigInt> {
    if n == 0 {
        return Vec::new();
    }
    let e = euler_product(n);
    match power_i128(&e, n) {
        Some(v) => v.into_iter().map(BigInt::from).collect(),
        None => power_big(&e, n),
    }
}
