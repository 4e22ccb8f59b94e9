use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::cell::{OnceCell, RefCell};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BigSign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision plus the cached constants astro-float needs for
/// transcendental functions. One context per thread; not `Sync`.
pub struct Context {
    bits: usize,
    consts: RefCell<Consts>,
    pub(crate) stirling: RefCell<alloc::vec::Vec<ExtReal>>,
    guard: OnceCell<Box<Context>>,
}

impl Context {
    /// Minimum accepted precision.
    pub const MIN_BITS: usize = 64;

    pub fn new(bits: usize) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::Invalid(alloc::format!(
                "precision {bits} bits is below the minimum {}",
                Self::MIN_BITS
            )));
        }
        let consts = Consts::new().map_err(|e| Error::Invalid(alloc::format!("{e:?}")))?;
        Ok(Context {
            bits,
            consts: RefCell::new(consts),
            stirling: RefCell::new(alloc::vec::Vec::new()),
            guard: OnceCell::new(),
        })
    }

    /// Guard bits added by [`Context::guarded`].
    pub const GUARD_BITS: usize = 32;

    /// A context with extra guard bits, created on first use.
    pub fn guarded(&self) -> &Context {
        self.guard
            .get_or_init(|| Box::new(Context::new(self.bits + Self::GUARD_BITS).expect("precision above minimum")))
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub(crate) fn with_consts<T>(&self, f: impl FnOnce(&mut Consts) -> T) -> T {
        f(&mut self.consts.borrow_mut())
    }

    pub fn int(&self, v: i64) -> ExtReal {
        ExtReal(BigFloat::from_i64(v, self.bits))
    }

    pub fn zero(&self) -> ExtReal {
        self.int(0)
    }

    pub fn one(&self) -> ExtReal {
        self.int(1)
    }

    /// Exact for every finite f64.
    pub fn from_f64(&self, v: f64) -> ExtReal {
        ExtReal(BigFloat::from_f64(v, self.bits.max(64)).with_prec(self.bits))
    }

    pub fn ratio(&self, num: i64, den: i64) -> ExtReal {
        self.int(num) / self.int(den)
    }

    pub fn from_bigint(&self, v: &BigInt) -> ExtReal {
        let (sign, digits) = v.to_u64_digits();
        if digits.is_empty() {
            return self.zero();
        }
        let bits = (digits.len() * 64).max(self.bits);
        let s = if sign == BigSign::Minus { Sign::Neg } else { Sign::Pos };
        let raw = BigFloat::from_words(&digits, s, (digits.len() * 64) as i32);
        ExtReal(raw.with_prec(bits))
    }

    /// Rounded once to the working precision.
    pub fn from_rational(&self, v: &BigRational) -> ExtReal {
        let n = self.from_bigint(v.numer());
        let d = self.from_bigint(v.denom());
        ExtReal(n.0.div(&d.0, self.bits, RM))
    }

    pub fn pi(&self) -> ExtReal {
        ExtReal(self.with_consts(|cc| cc.pi(self.bits, RM)))
    }

    pub fn ln2(&self) -> ExtReal {
        ExtReal(self.with_consts(|cc| cc.ln_2(self.bits, RM)))
    }

    /// Euler's constant, from the digamma asymptotics at 1.
    pub fn euler_gamma(&self) -> ExtReal {
        let one = crate::precision::ExtComplex::from_real(self.one(), self);
        let psi = crate::precision::gamma::digamma(&one, self).expect("1 is not a pole");
        -psi.re
    }

    pub fn parse(&self, s: &str) -> Result<ExtReal> {
        let t = s.trim();
        let ok = !t.is_empty() && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'));
        if !ok {
            return Err(Error::Invalid(alloc::format!("cannot parse {s:?} as a number")));
        }
        let v = self.with_consts(|cc| BigFloat::parse(t, Radix::Dec, self.bits, RM, cc));
        if v.is_nan() || v.is_inf() {
            return Err(Error::Invalid(alloc::format!("cannot parse {s:?} as a number")));
        }
        Ok(ExtReal(v))
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Context").field("bits", &self.bits).finish()
    }
}

trait WithPrec {
    fn with_prec(self, p: usize) -> Self;
}

impl WithPrec for BigFloat {
    fn with_prec(mut self, p: usize) -> Self {
        let _ = self.set_precision(p, RM);
        self
    }
}

/// Binary floating-point real carrying its own precision. Binary operations
/// round to the larger operand precision.
#[derive(Clone)]
pub struct ExtReal(pub(crate) BigFloat);

impl ExtReal {
    pub fn precision(&self) -> usize {
        self.0.mantissa_max_bit_len().unwrap_or(64)
    }

    fn p2(&self, o: &Self) -> usize {
        self.precision().max(o.precision())
    }

    /// The integer v at the precision of `like`.
    pub fn from_i64_like(like: &ExtReal, v: i64) -> Self {
        ExtReal(BigFloat::from_i64(v, like.precision()))
    }

    /// Rounded (or exactly extended) to `bits` of precision.
    pub fn with_precision(&self, bits: usize) -> Self {
        ExtReal(self.0.clone().with_prec(bits))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.0.is_nan() || self.0.is_inf())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        ExtReal(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        ExtReal(self.0.reciprocal(self.precision(), RM))
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn powi(&self, n: u64) -> Self {
        ExtReal(self.0.powi(n as usize, self.precision(), RM))
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let p = self.precision();
        ExtReal(self.0.mul(&BigFloat::from_i64(k, 64), p, RM))
    }

    pub fn div_i64(&self, k: i64) -> Self {
        let p = self.precision();
        ExtReal(self.0.div(&BigFloat::from_i64(k, 64), p, RM))
    }

    /// Exact scaling by 2^k.
    pub fn ldexp(&self, k: i32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = self.0.clone();
        let e = v.exponent().unwrap_or(0);
        v.set_exponent(e + k);
        ExtReal(v)
    }

    pub fn sqrt(&self, ctx: &Context) -> Self {
        ExtReal(self.0.sqrt(ctx.bits, RM))
    }

    pub fn exp(&self, ctx: &Context) -> Self {
        ExtReal(ctx.with_consts(|cc| self.0.exp(ctx.bits, RM, cc)))
    }

    pub fn ln(&self, ctx: &Context) -> Self {
        ExtReal(ctx.with_consts(|cc| self.0.ln(ctx.bits, RM, cc)))
    }

    pub fn sin(&self, ctx: &Context) -> Self {
        ExtReal(ctx.with_consts(|cc| self.0.sin(ctx.bits, RM, cc)))
    }

    pub fn cos(&self, ctx: &Context) -> Self {
        ExtReal(ctx.with_consts(|cc| self.0.cos(ctx.bits, RM, cc)))
    }

    pub fn atan(&self, ctx: &Context) -> Self {
        ExtReal(ctx.with_consts(|cc| self.0.atan(ctx.bits, RM, cc)))
    }

    /// Angle of the point (x, y) in (−π, π].
    pub fn atan2(y: &Self, x: &Self, ctx: &Context) -> Self {
        if x.is_zero() {
            let half_pi = ctx.pi().ldexp(-1);
            return if y.is_negative() {
                -half_pi
            } else if y.is_zero() {
                ctx.zero()
            } else {
                half_pi
            };
        }
        let t = (y / x).atan(ctx);
        if !x.is_negative() {
            t
        } else if y.is_negative() {
            t - ctx.pi()
        } else {
            t + ctx.pi()
        }
    }

    /// Nearest integer (ties to even), when it fits in an i64.
    pub fn round_i64(&self) -> Option<i64> {
        let r = self.0.round(0, RM);
        if r.is_zero() {
            return Some(0);
        }
        let (words, _, sign, e, _) = r.as_raw_parts()?;
        if e <= 0 {
            return Some(0);
        }
        if e > 63 {
            return None;
        }
        let top = *words.last()?;
        let v = (top >> (64 - e)) as i64;
        Some(if sign == Sign::Neg { -v } else { v })
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_inf_neg() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        match self.0.as_raw_parts() {
            Some((words, _, sign, e, _)) => {
                let top = *words.last().unwrap_or(&0);
                let m = libm::ldexp(top as f64, -64);
                let e = e.clamp(-1_000_000, 1_000_000);
                let v = libm::ldexp(m, e);
                if sign == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
            None => f64::NAN,
        }
    }

    /// log2 |x|, approximately; −∞ for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        match self.0.as_raw_parts() {
            Some((words, _, _, e, _)) => {
                let top = *words.last().unwrap_or(&1) as f64;
                libm::log2(top) - 64.0 + e as f64
            }
            None => f64::NAN,
        }
    }

    /// Shortest decimal string that round-trips at this precision.
    pub fn to_decimal(&self, ctx: &Context) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        ctx.with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".to_string())
    }

    /// Compact f64-based rendering for human-readable output.
    pub fn to_sci(&self, digits: usize) -> String {
        let v = self.to_f64();
        if v.is_finite() && v != 0.0 {
            alloc::format!("{v:.digits$e}")
        } else if v == 0.0 && !self.is_zero() {
            alloc::format!("~2^{:.0}", self.log2_abs())
        } else {
            alloc::format!("{v:e}")
        }
    }

    /// Exact rational value of this binary float.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        let (words, _, sign, e, _) = self.0.as_raw_parts()?;
        let mut m = BigInt::from_slice(
            BigSign::Plus,
            &words
                .iter()
                .flat_map(|w| [(*w & 0xffff_ffff) as u32, (*w >> 32) as u32])
                .collect::<alloc::vec::Vec<u32>>(),
        );
        if sign == Sign::Neg {
            m = -m;
        }
        let shift = e as i64 - (words.len() as i64) * 64;
        let one = BigInt::from(1u8);
        Some(if shift >= 0 {
            BigRational::from_integer(m << shift as usize)
        } else {
            BigRational::new(m, one << (-shift) as usize)
        })
    }

    /// Whether the value equals an integer exactly.
    pub fn is_integer(&self) -> bool {
        self.0.is_int()
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtReal({:e}, {} bits)", self.to_f64(), self.precision())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(15))
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, o: &Self) -> bool {
        self.0.cmp(&o.0) == Some(0)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.0.cmp(&o.0).map(|c| c.cmp(&0))
    }
}

/// Bit-level equality, including precision.
pub fn bit_identical(a: &ExtReal, b: &ExtReal) -> bool {
    match (a.0.as_raw_parts(), b.0.as_raw_parts()) {
        (Some(x), Some(y)) => x.0 == y.0 && x.2 == y.2 && x.3 == y.3,
        _ => a.is_zero() && b.is_zero(),
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:ident) => {
        impl $tr<&ExtReal> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, o: &ExtReal) -> ExtReal {
                ExtReal(self.0.$op(&o.0, self.p2(o), RM))
            }
        }
        impl $tr<ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $m(self, o: ExtReal) -> ExtReal {
                (&self).$m(&o)
            }
        }
        impl $tr<&ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $m(self, o: &ExtReal) -> ExtReal {
                (&self).$m(o)
            }
        }
        impl $tr<ExtReal> for &ExtReal {
            type Output = ExtReal;
            fn $m(self, o: ExtReal) -> ExtReal {
                self.$m(&o)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl AddAssign<&ExtReal> for ExtReal {
    fn add_assign(&mut self, o: &ExtReal) {
        *self = &*self + o;
    }
}

impl AddAssign<ExtReal> for ExtReal {
    fn add_assign(&mut self, o: ExtReal) {
        *self = &*self + &o;
    }
}

impl SubAssign<&ExtReal> for ExtReal {
    fn sub_assign(&mut self, o: &ExtReal) {
        *self = &*self - o;
    }
}

impl MulAssign<&ExtReal> for ExtReal {
    fn mul_assign(&mut self, o: &ExtReal) {
        *self = &*self * o;
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        let mut v = self.0.clone();
        v.inv_sign();
        ExtReal(v)
    }
}

impl Neg for &ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        let mut v = self.0.clone();
        v.inv_sign();
        ExtReal(v)
    }
}

/// Rational to decimal string with an f64 fallback, used in messages.
pub fn rational_to_f64(v: &BigRational) -> f64 {
    let n = v.numer().to_f64().unwrap_or(f64::NAN);
    let d = v.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() && d != 0.0 {
        return n / d;
    }
    let sign = if v.is_negative() { -1.0 } else { 1.0 };
    let ln = v.numer().bits() as i64 - v.denom().bits() as i64;
    sign * libm::exp2(ln as f64)
}
