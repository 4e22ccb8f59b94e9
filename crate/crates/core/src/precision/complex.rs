use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use super::real::{Context, ExtReal};

#[derive(Clone, PartialEq)]
pub struct ExtComplex {
    pub re: ExtReal,
    pub im: ExtReal,
}

impl ExtComplex {
    pub fn new(re: ExtReal, im: ExtReal) -> Self {
        ExtComplex { re, im }
    }

    pub fn from_real(re: ExtReal, ctx: &Context) -> Self {
        ExtComplex { re, im: ctx.zero() }
    }

    pub fn zero(ctx: &Context) -> Self {
        ExtComplex { re: ctx.zero(), im: ctx.zero() }
    }

    pub fn one(ctx: &Context) -> Self {
        ExtComplex { re: ctx.one(), im: ctx.zero() }
    }

    pub fn from_f64(re: f64, im: f64, ctx: &Context) -> Self {
        ExtComplex { re: ctx.from_f64(re), im: ctx.from_f64(im) }
    }

    pub fn conj(&self) -> Self {
        ExtComplex { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> ExtReal {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self, ctx: &Context) -> ExtReal {
        self.norm_sqr().sqrt(ctx)
    }

    pub fn arg(&self, ctx: &Context) -> ExtReal {
        ExtReal::atan2(&self.im, &self.re, ctx)
    }

    pub fn scale(&self, k: &ExtReal) -> Self {
        ExtComplex { re: &self.re * k, im: &self.im * k }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        ExtComplex { re: self.re.mul_i64(k), im: self.im.mul_i64(k) }
    }

    pub fn div_i64(&self, k: i64) -> Self {
        ExtComplex { re: self.re.div_i64(k), im: self.im.div_i64(k) }
    }

    pub fn add_real(&self, k: &ExtReal) -> Self {
        ExtComplex { re: &self.re + k, im: self.im.clone() }
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        ExtComplex { re: &self.re / &d, im: -(&self.im / &d) }
    }

    pub fn exp(&self, ctx: &Context) -> Self {
        let r = self.re.exp(ctx);
        ExtComplex { re: &r * self.im.cos(ctx), im: &r * self.im.sin(ctx) }
    }

    /// Principal logarithm.
    pub fn ln(&self, ctx: &Context) -> Self {
        ExtComplex { re: self.norm_sqr().ln(ctx).ldexp(-1), im: self.arg(ctx) }
    }

    /// e^{iθ}.
    pub fn cis(theta: &ExtReal, ctx: &Context) -> Self {
        ExtComplex { re: theta.cos(ctx), im: theta.sin(ctx) }
    }

    pub fn is_real_zero_im(&self) -> bool {
        self.im.is_zero()
    }
}

impl fmt::Debug for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:e} + {:e}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl Add<&ExtComplex> for &ExtComplex {
    type Output = ExtComplex;
    fn add(self, o: &ExtComplex) -> ExtComplex {
        ExtComplex { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub<&ExtComplex> for &ExtComplex {
    type Output = ExtComplex;
    fn sub(self, o: &ExtComplex) -> ExtComplex {
        ExtComplex { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul<&ExtComplex> for &ExtComplex {
    type Output = ExtComplex;
    fn mul(self, o: &ExtComplex) -> ExtComplex {
        ExtComplex { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl Div<&ExtComplex> for &ExtComplex {
    type Output = ExtComplex;
    fn div(self, o: &ExtComplex) -> ExtComplex {
        let d = o.norm_sqr();
        ExtComplex { re: (&self.re * &o.re + &self.im * &o.im) / &d, im: (&self.im * &o.re - &self.re * &o.im) / &d }
    }
}

macro_rules! owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ExtComplex> for ExtComplex {
            type Output = ExtComplex;
            fn $m(self, o: ExtComplex) -> ExtComplex {
                (&self).$m(&o)
            }
        }
        impl $tr<&ExtComplex> for ExtComplex {
            type Output = ExtComplex;
            fn $m(self, o: &ExtComplex) -> ExtComplex {
                (&self).$m(o)
            }
        }
        impl $tr<ExtComplex> for &ExtComplex {
            type Output = ExtComplex;
            fn $m(self, o: ExtComplex) -> ExtComplex {
                self.$m(&o)
            }
        }
    };
}

owned!(Add, add);
owned!(Sub, sub);
owned!(Mul, mul);
owned!(Div, div);

impl Neg for ExtComplex {
    type Output = ExtComplex;
    fn neg(self) -> ExtComplex {
        ExtComplex { re: -self.re, im: -self.im }
    }
}

impl Neg for &ExtComplex {
    type Output = ExtComplex;
    fn neg(self) -> ExtComplex {
        ExtComplex { re: -&self.re, im: -&self.im }
    }
}
