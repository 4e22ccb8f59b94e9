//! Complex log-gamma and digamma by shifted Stirling series.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::complex::ExtComplex;
use super::real::{Context, ExtReal};
use crate::error::{Error, Result};

/// Even-index Bernoulli numbers B_2, B_4, ..., B_{2n} from tangent numbers.
pub fn bernoulli_even(n: usize) -> Vec<BigRational> {
    if n == 0 {
        return Vec::new();
    }
    let mut t: Vec<BigInt> = alloc::vec![BigInt::zero(); n + 1];
    t[1] = BigInt::one();
    for k in 2..=n {
        t[k] = &t[k - 1] * BigInt::from(k - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * BigInt::from(j - k) + &t[j] * BigInt::from(j - k + 2);
        }
    }
    (1..=n)
        .map(|k| {
            let four_k = BigInt::one() << (2 * k);
            let num = BigInt::from(2 * k) * &t[k];
            let den = &four_k * (&four_k - BigInt::one());
            let b = BigRational::new(num, den);
            if k % 2 == 1 {
                b
            } else {
                -b
            }
        })
        .collect()
}

/// B_{2k} at working precision, cached on the context.
fn bernoulli_cached(ctx: &Context, k: usize) -> ExtReal {
    let mut cache = ctx.stirling.borrow_mut();
    if cache.len() < k {
        let n = (2 * k).max(32);
        *cache = bernoulli_even(n).iter().map(|b| ctx.from_rational(b)).collect();
    }
    cache[k - 1].clone()
}

fn is_pole(z: &ExtComplex) -> bool {
    z.im.is_zero() && (z.re.is_zero() || z.re.is_negative()) && z.re.is_integer()
}

fn pole_error(what: &'static str, z: &ExtComplex) -> Error {
    Error::Pole { what, at: alloc::format!("{}", z.re.to_f64()) }
}

/// Shift count n such that z + n is in the Stirling region.
fn shift_count(z: &ExtComplex, bits: usize) -> usize {
    let w = (0.25 * bits as f64).max(12.0);
    let (x, y) = (z.re.to_f64(), z.im.to_f64());
    let mut need = (1.0 - x).max(0.0);
    if y.abs() < w {
        need = need.max((w * w - y * y).sqrt() - x);
    }
    libm::ceil(need).max(0.0) as usize
}

fn lift(z: &ExtComplex, bits: usize) -> ExtComplex {
    ExtComplex::new(z.re.with_precision(bits), z.im.with_precision(bits))
}

fn round_to(z: ExtComplex, bits: usize) -> ExtComplex {
    ExtComplex::new(z.re.with_precision(bits), z.im.with_precision(bits))
}

fn small_enough(term: &ExtComplex, sum: &ExtComplex, bits: usize) -> bool {
    let t = term.re.log2_abs().max(term.im.log2_abs());
    let s = sum.re.log2_abs().max(sum.im.log2_abs()).max(0.0);
    t < s - bits as f64
}

/// Principal branch of log Γ(z).
pub fn log_gamma(z: &ExtComplex, ctx: &Context) -> Result<ExtComplex> {
    if is_pole(z) {
        return Err(pole_error("log_gamma", z));
    }
    let g = ctx.guarded();
    let bits = g.bits();
    let z = lift(z, bits);
    let n = shift_count(&z, bits);
    let w = z.add_real(&g.int(n as i64));

    let lnw = w.ln(g);
    let half = g.ratio(1, 2);
    let ln2pi = (g.pi().ldexp(1)).ln(g);
    let mut sum = &(&w.add_real(&-&half) * &lnw) - &w;
    sum = sum.add_real(&ln2pi.ldexp(-1));
    let winv = w.recip();
    let winv2 = &winv * &winv;
    let mut pw = winv.clone();
    let mut k = 1;
    loop {
        let c = bernoulli_cached(g, k).div_i64((2 * k * (2 * k - 1)) as i64);
        let term = pw.scale(&c);
        sum = &sum + &term;
        if small_enough(&term, &sum, bits) {
            break;
        }
        if k > 4 * bits {
            return Err(Error::Invalid("Stirling series failed to converge".into()));
        }
        pw = &pw * &winv2;
        k += 1;
    }

    if n > 0 {
        let mut prod = z.clone();
        let mut arg_sum = libm::atan2(z.im.to_f64(), z.re.to_f64());
        for j in 1..n {
            let zj = z.add_real(&g.int(j as i64));
            arg_sum += libm::atan2(zj.im.to_f64(), zj.re.to_f64());
            prod = &prod * &zj;
        }
        let lp = prod.ln(g);
        let two_pi = g.pi().ldexp(1);
        let wraps = libm::round((arg_sum - lp.im.to_f64()) / core::f64::consts::TAU) as i64;
        let corr = ExtComplex::new(lp.re, &lp.im + &two_pi.mul_i64(wraps));
        sum = &sum - &corr;
    }
    Ok(round_to(sum, ctx.bits()))
}

/// Γ(z) = exp(log Γ(z)).
pub fn gamma(z: &ExtComplex, ctx: &Context) -> Result<ExtComplex> {
    Ok(log_gamma(z, ctx)?.exp(ctx))
}

/// ψ(z) = Γ'(z)/Γ(z).
pub fn digamma(z: &ExtComplex, ctx: &Context) -> Result<ExtComplex> {
    if is_pole(z) {
        return Err(pole_error("digamma", z));
    }
    let g = ctx.guarded();
    let bits = g.bits();
    let z = lift(z, bits);
    let n = shift_count(&z, bits);
    let w = z.add_real(&g.int(n as i64));

    let winv = w.recip();
    let mut sum = &w.ln(g) - &winv.div_i64(2);
    let winv2 = &winv * &winv;
    let mut pw = winv2.clone();
    let mut k = 1;
    loop {
        let c = bernoulli_cached(g, k).div_i64((2 * k) as i64);
        let term = pw.scale(&c);
        sum = &sum - &term;
        if small_enough(&term, &sum, bits) {
            break;
        }
        if k > 4 * bits {
            return Err(Error::Invalid("asymptotic digamma series failed to converge".into()));
        }
        pw = &pw * &winv2;
        k += 1;
    }
    for j in 0..n {
        let zj = z.add_real(&g.int(j as i64));
        sum = &sum - &zj.recip();
    }
    Ok(round_to(sum, ctx.bits()))
}
