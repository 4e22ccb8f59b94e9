use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::arith::{gcd, mod_inverse};
use crate::error::{Error, Result};
use crate::precision::{Context, ExtComplex};

/// e(u) = exp(2πiu), with u reduced exactly modulo 1 first.
pub fn additive_character(u: &BigRational, ctx: &Context) -> ExtComplex {
    let frac = u - u.floor();
    if frac.is_zero() {
        return ExtComplex::one(ctx);
    }
    let den = frac.denom().to_u64();
    let num = frac.numer().to_u64();
    match (num, den) {
        (Some(1), Some(2)) => return ExtComplex::new(ctx.int(-1), ctx.zero()),
        (Some(1), Some(4)) => return ExtComplex::new(ctx.zero(), ctx.one()),
        (Some(3), Some(4)) => return ExtComplex::new(ctx.zero(), ctx.int(-1)),
        _ => {}
    }
    let theta = ctx.pi().ldexp(1) * ctx.from_rational(&frac);
    ExtComplex::cis(&theta, ctx)
}

/// e(k/c) for k = 0, …, c − 1.
pub fn roots_of_unity(c: u64, ctx: &Context) -> Vec<ExtComplex> {
    (0..c).map(|k| additive_character(&BigRational::new(BigInt::from(k), BigInt::from(c)), ctx)).collect()
}

/// S(a, b; c) = Σ_{x mod c, (x,c)=1} e((a x + b x̄)/c) as a complex number.
pub fn kloosterman_complex(a: i64, b: i64, c: u64, ctx: &Context) -> Result<ExtComplex> {
    if c == 0 {
        return Err(Error::Invalid("Kloosterman modulus must be positive".into()));
    }
    if c == 1 {
        return Ok(ExtComplex::one(ctx));
    }
    let roots = roots_of_unity(c, ctx);
    Ok(kloosterman_with_roots(a, b, c, &roots))
}

pub(crate) fn kloosterman_with_roots(a: i64, b: i64, c: u64, roots: &[ExtComplex]) -> ExtComplex {
    if c == 1 {
        return roots[0].clone();
    }
    let ci = c as i128;
    let (ar, br) = ((a as i128).rem_euclid(ci), (b as i128).rem_euclid(ci));
    let mut acc: Option<ExtComplex> = None;
    for x in 1..c {
        if gcd(x as i64, c as i64) != 1 {
            continue;
        }
        let xbar = mod_inverse(x as i64, c).expect("unit") as i128;
        let k = (ar * x as i128 + br * xbar).rem_euclid(ci) as usize;
        acc = Some(match acc {
            None => roots[k].clone(),
            Some(s) => &s + &roots[k],
        });
    }
    acc.expect("x = 1 is a unit")
}

/// Real Kloosterman sum S(a, b; c).
pub fn kloosterman(a: i64, b: i64, c: u64, ctx: &Context) -> Result<crate::precision::ExtReal> {
    Ok(kloosterman_complex(a, b, c, ctx)?.re)
}

/// Ramanujan sum c_q(n) = Σ_{d | (q, n)} μ(q/d) d, exact.
pub fn ramanujan_sum(q: u64, n: i64) -> i64 {
    let g = if n == 0 { q } else { gcd(q as i64, n) };
    super::arith::divisors(g).into_iter().map(|d| super::arith::moebius(q / d) as i64 * d as i64).sum()
}

/// Additive twist data a/c with a·abar ≡ 1 (mod c), and the index q.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistParams {
    pub a: i64,
    pub c: u64,
    pub abar: u64,
    pub q: u64,
}

impl TwistParams {
    pub fn new(a: i64, c: u64, q: u64) -> Result<Self> {
        if c == 0 || q == 0 {
            return Err(Error::Invalid("c and q must be positive".into()));
        }
        if c == 1 {
            return Ok(TwistParams { a: 0, c, abar: 0, q });
        }
        if gcd(a, c as i64) != 1 {
            return Err(Error::NotInvertible { a, c });
        }
        let abar = mod_inverse(a, c)?;
        Ok(TwistParams { a: a.mod_floor(&(c as i64)), c, abar, q })
    }

    /// Reduced residues a mod c for every c ≤ c_max and q ≤ q_max.
    pub fn grid(c_max: u64, q_max: u64) -> Vec<TwistParams> {
        let mut out = Vec::new();
        for c in 1..=c_max {
            for q in 1..=q_max {
                if c == 1 {
                    out.push(TwistParams { a: 0, c, abar: 0, q });
                    continue;
                }
                for a in 1..c as i64 {
                    if gcd(a, c as i64) == 1 {
                        out.push(TwistParams::new(a, c, q).expect("unit"));
                    }
                }
            }
        }
        out
    }
}
