//! Mellin inversion on the vertical line Re s = σ₀ by the trapezoid rule.
//! Independent of the residue series; used as its oracle.

use alloc::vec::Vec;

use super::gamma_factor::GammaFactorSystem;
use crate::error::{Error, Result};
use crate::precision::{Context, ExtComplex, ExtReal, TestFunction};

/// Abscissa σ₀, truncation height T and step count M per half line
/// (step h = T/M).
#[derive(Clone, Debug)]
pub struct QuadratureSpec {
    pub sigma0: ExtReal,
    pub height: ExtReal,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct QuadratureValue {
    pub value: ExtReal,
    /// Imaginary part of the assembled integral; zero for exact arithmetic.
    pub imag: ExtReal,
    /// |I_h − I_{2h}|.
    pub step_error: ExtReal,
    /// Size of the neglected tails, from the integrand at ±T.
    pub truncation_error: ExtReal,
}

impl QuadratureSpec {
    pub fn new(sigma0: ExtReal, height: ExtReal, steps: usize) -> Result<Self> {
        let zero = ExtReal::from_i64_like(&sigma0, 0);
        let one = ExtReal::from_i64_like(&sigma0, 1);
        if !(sigma0 > zero && sigma0 < one) {
            return Err(Error::Invalid(alloc::format!("contour abscissa {sigma0} must lie in (0, 1)")));
        }
        if height.is_negative() || height.is_zero() {
            return Err(Error::Invalid("truncation height must be positive".into()));
        }
        if steps == 0 {
            return Err(Error::Invalid("step count must be positive".into()));
        }
        Ok(QuadratureSpec { sigma0, height, steps })
    }

    /// A spec sized for relative accuracy `tol` on x ∈ [x_min, x_max]:
    /// T from the e^{−π|t|/4} decay of Mf(1−s), h from the distance to the
    /// nearest pole of MF (the integrand is analytic in that strip).
    pub fn auto(f: &TestFunction, x_min: f64, x_max: f64, tol: f64, ctx: &Context) -> Self {
        let sigma = 0.5;
        let m = f.degree as f64;
        let lt = -libm::log(tol);
        let mut t = 4.0 / core::f64::consts::PI * (lt + 10.0);
        for _ in 0..4 {
            t = 4.0 / core::f64::consts::PI * (lt + 10.0 + 0.5 * (m + 2.0) * libm::log(t.max(1.0)));
        }
        // MF is analytic for −1 < Re s < 1 + m
        let d = (sigma + 1.0_f64).min(1.0 + m - sigma).min(1.5) * 0.9;
        let lx = libm::log(x_max).abs().max(libm::log(x_min).abs());
        let h = 2.0 * core::f64::consts::PI * d / (lt + d * lx + 10.0);
        let steps = libm::ceil(t / h) as usize;
        QuadratureSpec { sigma0: ctx.ratio(1, 2), height: ctx.from_f64(libm::ceil(t)), steps }
    }
}

/// Samples MF(σ₀ + i t_k) for k = −M..M.
#[derive(Clone, Debug)]
pub struct QuadratureSamples {
    spec: QuadratureSpec,
    step: ExtReal,
    values: Vec<ExtComplex>,
}

impl QuadratureSamples {
    pub fn new(sys: &GammaFactorSystem, f: &TestFunction, spec: &QuadratureSpec, ctx: &Context) -> Result<Self> {
        let g = ctx.guarded();
        let m = spec.steps as i64;
        let step = spec.height.with_precision(g.bits()).div_i64(m);
        let sigma = spec.sigma0.with_precision(g.bits());
        let mut values = Vec::with_capacity(2 * spec.steps + 1);
        let mut peak = g.zero();
        for k in -m..=m {
            let s = ExtComplex::new(sigma.clone(), step.mul_i64(k));
            let v = sys.mf_transform(f, &s, g)?;
            let a = v.norm_sqr();
            if a > peak {
                peak = a;
            }
            values.push(v);
        }
        let ends = values[0].norm_sqr() + values[values.len() - 1].norm_sqr();
        let ratio = if peak.is_zero() { g.zero() } else { (ends / &peak).sqrt(g) };
        if ratio.to_f64() > 1e-15 {
            return Err(Error::NonDecaying { ratio: ratio.to_sci(3) });
        }
        Ok(QuadratureSamples { spec: spec.clone(), step, values })
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    /// F(x) = (1/2π) ∫ MF(σ₀+it) x^{−σ₀−it} dt.
    pub fn evaluate(&self, x: &ExtReal, ctx: &Context) -> Result<QuadratureValue> {
        if x.is_zero() || x.is_negative() {
            return Err(Error::Invalid(alloc::format!("F is evaluated at x > 0, got {x}")));
        }
        let g = ctx.guarded();
        let m = self.spec.steps;
        let x = x.with_precision(g.bits());
        let lnx = x.ln(g);
        let base = (-(&self.spec.sigma0.with_precision(g.bits()) * &lnx)).exp(g);
        let rot = ExtComplex::cis(&-(&self.step * &lnx), g);
        // x^{−i t_k} for k ≥ 0 by repeated multiplication; k < 0 by conjugation
        let mut pows = Vec::with_capacity(m + 1);
        pows.push(ExtComplex::one(g));
        for k in 1..=m {
            let next = &pows[k - 1] * &rot;
            pows.push(next);
        }
        let mut fine = ExtComplex::zero(g);
        let mut coarse = ExtComplex::zero(g);
        for (i, v) in self.values.iter().enumerate() {
            let k = i as i64 - m as i64;
            let p = if k >= 0 { pows[k as usize].clone() } else { pows[(-k) as usize].conj() };
            let mut term = v * &p;
            if k.unsigned_abs() as usize == m {
                term = term.div_i64(2);
            }
            fine = &fine + &term;
            if k % 2 == 0 {
                let mut c = v * &p;
                let edge = if m % 2 == 0 { m } else { m - 1 };
                if k.unsigned_abs() as usize == edge {
                    c = c.div_i64(2);
                }
                coarse = &coarse + &c;
            }
        }
        let two_pi = g.pi().ldexp(1);
        let w = &(&self.step / &two_pi) * &base;
        let fine = fine.scale(&w);
        let coarse = coarse.scale(&w).mul_i64(2);
        let step_error = (&fine - &coarse).abs(g);
        let ends = self.values[0].abs(g) + self.values[self.values.len() - 1].abs(g);
        let truncation_error = (&(&ends * &base) / &two_pi).mul_i64(4) / g.pi();
        let b = ctx.bits();
        Ok(QuadratureValue {
            value: fine.re.with_precision(b),
            imag: fine.im.with_precision(b),
            step_error: step_error.with_precision(b),
            truncation_error: truncation_error.with_precision(b),
        })
    }
}

pub fn quadrature_f(
    sys: &GammaFactorSystem,
    f: &TestFunction,
    x: &ExtReal,
    spec: &QuadratureSpec,
    ctx: &Context,
) -> Result<QuadratureValue> {
    QuadratureSamples::new(sys, f, spec, ctx)?.evaluate(x, ctx)
}

/// Several arguments sharing one set of samples.
pub fn quadrature_f_many(
    sys: &GammaFactorSystem,
    f: &TestFunction,
    xs: &[ExtReal],
    spec: &QuadratureSpec,
    ctx: &Context,
) -> Result<Vec<QuadratureValue>> {
    let samples = QuadratureSamples::new(sys, f, spec, ctx)?;
    xs.iter().map(|x| samples.evaluate(x, ctx)).collect()
}
