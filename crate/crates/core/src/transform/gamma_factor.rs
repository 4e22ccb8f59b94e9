use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::precision::{digamma, log_gamma, Context, ExtComplex, ExtReal, TestFunction};

/// Archimedean data G(s) = π^{−ds/2} ∏ Γ((s+μᵢ)/2) and root number ε.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaFactorSystem {
    pub shifts: Vec<i64>,
    pub sign: i8,
}

impl Default for GammaFactorSystem {
    /// Symmetric square of a weight-12 level-1 form.
    fn default() -> Self {
        GammaFactorSystem { shifts: alloc::vec![1, 11, 12], sign: 1 }
    }
}

fn nonpositive_integer(z: &ExtComplex) -> Option<i64> {
    if z.im.is_zero() && (z.re.is_zero() || z.re.is_negative()) && z.re.is_integer() {
        z.re.round_i64()
    } else {
        None
    }
}

impl GammaFactorSystem {
    pub fn new(shifts: Vec<i64>, sign: i8) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::Invalid("at least one gamma shift is required".into()));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Invalid(alloc::format!("root number {sign} must be ±1")));
        }
        if shifts.iter().any(|&m| m < 0) {
            return Err(Error::Invalid("gamma shifts must be nonnegative".into()));
        }
        Ok(GammaFactorSystem { shifts, sign })
    }

    pub fn degree(&self) -> usize {
        self.shifts.len()
    }

    pub fn max_shift(&self) -> i64 {
        self.shifts.iter().copied().max().unwrap_or(0)
    }

    fn log_g(&self, s: &ExtComplex, ctx: &Context) -> Result<ExtComplex> {
        let d = self.degree() as i64;
        let lnpi = ctx.pi().ln(ctx);
        let mut acc = s.scale(&lnpi).mul_i64(-d).div_i64(2);
        for &mu in &self.shifts {
            let z = s.add_real(&ctx.int(mu)).div_i64(2);
            acc = &acc + &log_gamma(&z, ctx)?;
        }
        Ok(acc)
    }

    /// Poles of G(s) down to `lowest`, with multiplicities.
    pub fn poles(&self, lowest: i64) -> BTreeMap<i64, u8> {
        let mut out = BTreeMap::new();
        for &mu in &self.shifts {
            let mut p = -mu;
            while p >= lowest {
                *out.entry(p).or_insert(0) += 1;
                p -= 2;
            }
        }
        out
    }

    fn check_pole(&self, s: &ExtComplex, what: &'static str) -> Result<()> {
        for &mu in &self.shifts {
            let z = ExtComplex::new(&s.re + &ExtReal::from_i64_like(&s.re, mu), s.im.clone());
            if nonpositive_integer(&z).is_some_and(|n| n % 2 == 0) {
                return Err(Error::Pole { what, at: alloc::format!("{}", s.re.to_f64()) });
            }
        }
        Ok(())
    }

    fn check_zero(&self, s: &ExtComplex, what: &'static str) -> Result<()> {
        for &mu in &self.shifts {
            let z = ExtComplex::new(&ExtReal::from_i64_like(&s.re, 1 + mu) - &s.re, -&s.im);
            if nonpositive_integer(&z).is_some_and(|n| n % 2 == 0) {
                return Err(Error::Zero { what, at: alloc::format!("{}", s.re.to_f64()) });
            }
        }
        Ok(())
    }

    /// ε G(s)/G(1−s), from log-gamma differences exponentiated once.
    pub fn gamma_quotient(&self, s: &ExtComplex, ctx: &Context) -> Result<ExtComplex> {
        self.check_pole(s, "gamma_quotient")?;
        self.check_zero(s, "gamma_quotient")?;
        let one_minus = &ExtComplex::one(ctx) - s;
        let l = &self.log_g(s, ctx)? - &self.log_g(&one_minus, ctx)?;
        Ok(l.exp(ctx).mul_i64(self.sign as i64))
    }

    /// ε G(s)/G(1−s) · ½Γ((1−s+m)/2): MF(s) without amplitude and the
    /// (X²/π)^{(1−s+m)/2} factor.
    pub fn mf_base(&self, m: u32, s: &ExtComplex, ctx: &Context) -> Result<ExtComplex> {
        self.check_pole(s, "mf_transform")?;
        let one_minus = &ExtComplex::one(ctx) - s;
        let zm = one_minus.add_real(&ctx.int(m as i64)).div_i64(2);
        if nonpositive_integer(&zm).is_some() {
            return Err(Error::Pole { what: "mf_transform", at: alloc::format!("{}", s.re.to_f64()) });
        }
        let l = &(&self.log_g(s, ctx)? - &self.log_g(&one_minus, ctx)?) + &log_gamma(&zm, ctx)?;
        Ok(l.exp(ctx).ldexp_half().mul_i64(self.sign as i64))
    }

    /// MF(s) = ε G(s)/G(1−s) · Mf(1−s).
    pub fn mf_transform(&self, f: &TestFunction, s: &ExtComplex, ctx: &Context) -> Result<ExtComplex> {
        let base = self.mf_base(f.degree, s, ctx)?;
        let one_minus = &ExtComplex::one(ctx) - s;
        let e = one_minus.add_real(&ctx.int(f.degree as i64));
        let l = (f.scale.sqr() / ctx.pi()).ln(ctx).ldexp(-1);
        let w = e.scale(&l).exp(ctx);
        Ok((&base * &w).scale(&f.amplitude))
    }

    /// Laurent data (c₋₂, c₋₁) of `mf_base` at an integer pole, from the
    /// gamma residues Γ(−n+ε) = (−1)ⁿ/n!·(1/ε + ψ(n+1) + …) and digamma
    /// log-derivatives of the regular factors.
    pub fn analytic_laurent(&self, m: u32, s0: i64, ctx: &Context) -> Result<(ExtReal, ExtReal)> {
        let d = self.degree() as i64;
        let lnpi = ctx.pi().ln(ctx);
        let mut log_h = -(lnpi.mul_i64(d * s0)).div_i64(2);
        let mut dlog = -lnpi.mul_i64(d).div_i64(2);
        let mut coef = ctx.one();
        let mut psi_sing = ctx.zero();
        let mut order = 0;
        let mut sign_h = 1i64;
        for &mu in &self.shifts {
            let twice = s0 + mu;
            if twice <= 0 && twice % 2 == 0 {
                let n = -twice / 2;
                order += 1;
                let mut fact = ctx.one();
                for k in 2..=n {
                    fact = fact.mul_i64(k);
                }
                coef = (&coef / &fact).mul_i64(if n % 2 == 0 { 2 } else { -2 });
                let psi = digamma(&ExtComplex::from_real(ctx.int(n + 1), ctx), ctx)?;
                psi_sing = &psi_sing + &psi.re.ldexp(-1);
            } else {
                let z = ExtComplex::from_real(ctx.ratio(twice, 2), ctx);
                let lg = log_gamma(&z, ctx)?;
                let turns = libm::round(lg.im.to_f64() / core::f64::consts::PI) as i64;
                if turns % 2 != 0 {
                    sign_h = -sign_h;
                }
                log_h = &log_h + &lg.re;
                dlog = &dlog + &digamma(&z, ctx)?.re.ldexp(-1);
            }
        }
        // 1/G(1−s) and ½Γ((1−s+m)/2) at s0 are regular for s0 ≤ −1
        log_h = &log_h + &lnpi.mul_i64(d * (1 - s0)).div_i64(2);
        dlog = &dlog - &lnpi.mul_i64(d).div_i64(2);
        for &mu in &self.shifts {
            let z = ExtComplex::from_real(ctx.ratio(1 - s0 + mu, 2), ctx);
            log_h = &log_h - &log_gamma(&z, ctx)?.re;
            dlog = &dlog + &digamma(&z, ctx)?.re.ldexp(-1);
        }
        let z = ExtComplex::from_real(ctx.ratio(1 - s0 + m as i64, 2), ctx);
        log_h = &log_h + &log_gamma(&z, ctx)?.re;
        dlog = &dlog - &digamma(&z, ctx)?.re.ldexp(-1);
        let h = log_h.exp(ctx).ldexp(-1).mul_i64(self.sign as i64 * sign_h);
        let ch = &coef * &h;
        match order {
            1 => Ok((ctx.zero(), ch)),
            2 => Ok((ch.clone(), &ch * &(&dlog + &psi_sing))),
            _ => Err(Error::Invalid(alloc::format!("s = {s0} is not a pole of order 1 or 2"))),
        }
    }
}

trait HalfScale {
    fn ldexp_half(&self) -> Self;
}

impl HalfScale for ExtComplex {
    fn ldexp_half(&self) -> Self {
        ExtComplex::new(self.re.ldexp(-1), self.im.ldexp(-1))
    }
}
