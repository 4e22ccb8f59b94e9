use super::complex::ExtComplex;
use super::gamma::log_gamma;
use super::real::{Context, ExtReal};
use crate::error::{Error, Result};

/// f(x) = amplitude · x^m · exp(−π x² / X²).
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub degree: u32,
    pub scale: ExtReal,
    pub amplitude: ExtReal,
}

impl TestFunction {
    pub fn new(degree: u32, scale: ExtReal) -> Result<Self> {
        if degree % 2 != 0 {
            return Err(Error::Invalid(alloc::format!("monomial degree {degree} must be even")));
        }
        if !scale.0.is_positive() || scale.is_zero() {
            return Err(Error::Invalid(alloc::format!("scale {scale} must be positive")));
        }
        let amplitude = ExtReal(astro_float::BigFloat::from_i64(1, scale.precision()));
        Ok(TestFunction { degree, scale, amplitude })
    }

    /// Same atom rescaled so its maximum on x > 0 is 1.
    pub fn peak_normalized(degree: u32, scale: ExtReal, ctx: &Context) -> Result<Self> {
        let mut f = Self::new(degree, scale)?;
        let x0 = f.peak_location(ctx);
        let peak = if x0.is_zero() { ctx.one() } else { f.eval(&x0, ctx) };
        f.amplitude = peak.recip();
        Ok(f)
    }

    /// X·sqrt(m/2π), where x^m e^{−πx²/X²} is largest.
    pub fn peak_location(&self, ctx: &Context) -> ExtReal {
        let m = ctx.int(self.degree as i64);
        &self.scale * (m / ctx.pi().ldexp(1)).sqrt(ctx)
    }

    pub fn with_amplitude(mut self, amplitude: ExtReal) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn eval(&self, x: &ExtReal, ctx: &Context) -> ExtReal {
        let t = x / &self.scale;
        let g = (-(ctx.pi() * t.sqr())).exp(ctx);
        &self.amplitude * x.powi(self.degree as u64) * g
    }

    /// ½ (X²/π)^{(s+m)/2} Γ((s+m)/2), continued meromorphically.
    pub fn mellin(&self, s: &ExtComplex, ctx: &Context) -> Result<ExtComplex> {
        let half = s.add_real(&ctx.int(self.degree as i64)).div_i64(2);
        let lg = log_gamma(&half, ctx)
            .map_err(|_| Error::Pole { what: "mellin_of_test_function", at: alloc::format!("{:?}", s) })?;
        let l = (self.scale.sqr() / ctx.pi()).ln(ctx);
        let v = (&lg + &half.scale(&l)).exp(ctx);
        Ok(v.scale(&self.amplitude.ldexp(-1)))
    }
}
