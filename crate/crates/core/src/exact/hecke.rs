//! Hecke coefficients of the symmetric square lift, analytically normalized.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::arith::{divisors, gcd, is_prime, moebius, smallest_prime_factors};
use super::tau::tau_table;
use crate::error::{Error, Result};

fn a_p_from_tau(p: u64, tau_p: &BigInt) -> BigRational {
    let den = BigInt::from(p).pow(11u32);
    BigRational::new(tau_p * tau_p, den) - BigRational::one()
}

/// a_p = τ(p)²/p¹¹ − 1.
pub fn sym2_prime(p: u64) -> Result<BigRational> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let t = tau_table(p as usize);
    Ok(a_p_from_tau(p, &t[p as usize - 1]))
}

/// h_0, …, h_k for Satake parameters {α², 1, α⁻²} with e₁ = e₂ = a_p, e₃ = 1.
fn prime_power_chain(a_p: &BigRational, k: u32) -> Vec<BigRational> {
    let mut h: Vec<BigRational> = Vec::with_capacity(k as usize + 1);
    h.push(BigRational::one());
    for i in 1..=k as usize {
        let mut v = a_p * &h[i - 1];
        if i >= 2 {
            v -= a_p * &h[i - 2];
        }
        if i >= 3 {
            v += &h[i - 3];
        }
        h.push(v);
    }
    h
}

/// A(1, p^k).
pub fn sym2_prime_power(p: u64, k: u32) -> Result<BigRational> {
    let a = sym2_prime(p)?;
    Ok(prime_power_chain(&a, k).pop().unwrap())
}

/// Exact A(m, n) for all m·n ≤ N.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    n_max: u64,
    // rows[m][n] = A(m, n) for 1 ≤ n ≤ N/m and m ≤ row limit; index 0
    // unused in both. Other pairs are read through the symmetry.
    rows: Vec<Vec<BigRational>>,
}

impl CoefficientTable {
    pub fn new(n_max: u64) -> Result<Self> {
        Self::with_row_limit(n_max, n_max)
    }

    /// Stores rows m ≤ `rows` only; A(m, n) with min(m, n) ≤ `rows` stays
    /// available through the symmetry.
    pub fn with_row_limit(n_max: u64, rows: u64) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Invalid("table bound must be at least 1".into()));
        }
        let n = n_max as usize;
        let taus = tau_table(n);
        let spf = smallest_prime_factors(n);

        let mut single = alloc::vec![BigRational::zero(); n + 1];
        single[1] = BigRational::one();
        let mut chains: Vec<Vec<BigRational>> = alloc::vec![Vec::new(); n + 1];
        for i in 2..=n {
            let p = spf[i] as usize;
            let (mut rest, mut k) = (i, 0u32);
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            if chains[p].len() <= k as usize {
                let a = a_p_from_tau(p as u64, &taus[p - 1]);
                let kmax = (n as f64).ln() / (p as f64).ln();
                chains[p] = prime_power_chain(&a, kmax as u32 + 1);
            }
            single[i] = &single[rest] * &chains[p][k as usize];
        }

        let row_limit = (rows.max(1) as usize).min(n);
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(row_limit + 1);
        rows.push(Vec::new());
        rows.push(single.clone());
        for m in 2..=row_limit {
            let len = n / m;
            let mut row = alloc::vec![BigRational::zero(); len + 1];
            let dm = divisors(m as u64);
            for j in 1..=len {
                let g = gcd(m as i64, j as i64);
                let mut v = BigRational::zero();
                for &d in dm.iter().filter(|&&d| g % d == 0) {
                    let mu = moebius(d);
                    if mu == 0 {
                        continue;
                    }
                    let t = &single[m / d as usize] * &single[j / d as usize];
                    if mu > 0 {
                        v += t
                    } else {
                        v -= t
                    }
                }
                row[j] = v;
            }
            rows.push(row);
        }
        Ok(CoefficientTable { n_max, rows })
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn get(&self, m: u64, n: u64) -> Result<&BigRational> {
        if m == 0 || n == 0 || m.saturating_mul(n) > self.n_max {
            return Err(Error::OutOfRange { index: m.saturating_mul(n), bound: self.n_max });
        }
        let (r, c) = if (m as usize) < self.rows.len() { (m, n) } else { (n, m) };
        if r as usize >= self.rows.len() {
            return Err(Error::OutOfRange { index: m.min(n), bound: self.rows.len() as u64 - 1 });
        }
        Ok(&self.rows[r as usize][c as usize])
    }

    /// Largest first index stored directly.
    pub fn row_limit(&self) -> u64 {
        self.rows.len() as u64 - 1
    }

    /// a_n = A(1, n).
    pub fn a(&self, n: u64) -> Result<&BigRational> {
        self.get(1, n)
    }

    /// All stored (m, n, A(m, n)) in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (u64, u64, &BigRational)> {
        self.rows
            .iter()
            .enumerate()
            .skip(1)
            .flat_map(|(m, row)| row.iter().enumerate().skip(1).map(move |(n, v)| (m as u64, n as u64, v)))
    }

    /// The table with every coefficient scaled by λ.
    pub fn scaled(&self, lambda: &BigRational) -> Self {
        let rows = self.rows.iter().map(|r| r.iter().map(|v| v * lambda).collect()).collect();
        CoefficientTable { n_max: self.n_max, rows }
    }

    /// A copy with A(1, n) = A(n, 1) replaced by `v`.
    pub fn with_coefficient(&self, n: u64, v: BigRational) -> Result<Self> {
        self.get(1, n)?;
        let mut t = self.clone();
        t.rows[1][n as usize] = v.clone();
        if (n as usize) < t.rows.len() {
            t.rows[n as usize][1] = v;
        }
        Ok(t)
    }
}

/// a_n·n¹¹, which must be an integer.
pub fn integrality_witness(n: u64, table: &CoefficientTable) -> Result<BigInt> {
    let a = table.a(n)?;
    let v = a * BigRational::from_integer(BigInt::from(n).pow(11u32));
    if !v.is_integer() {
        return Err(Error::NotIntegral { n, value: alloc::format!("{v}") });
    }
    Ok(v.to_integer())
}
