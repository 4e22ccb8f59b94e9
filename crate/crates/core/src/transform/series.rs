//! Residue expansion of F(x) = (1/2πi)∫ MF(s) x^{−s} ds.
//!
//! Laurent data of the X-free part of MF are extracted on small circles
//! around the topmost pole of each parity class, then carried down the class
//! with the exact step h(s−2) = h(s)·R(s), so only two circles ever need
//! gamma-function evaluations.

use alloc::vec::Vec;

use super::gamma_factor::GammaFactorSystem;
use crate::error::{Error, Result};
use crate::precision::{Context, ExtComplex, ExtReal, TestFunction};

/// Radius of the extraction circles.
pub const CIRCLE_RADIUS: (i64, i64) = (1, 4);

/// Laurent coefficients (c₋₂, c₋₁) of `mf_base` at one pole.
#[derive(Clone, Debug)]
pub struct PoleLaurent {
    pub pole: i64,
    pub order: u8,
    pub a: ExtComplex,
    pub b: ExtComplex,
}

/// Laurent data for one monomial degree, independent of X and amplitude.
#[derive(Clone, Debug)]
pub struct LaurentTable {
    pub system: GammaFactorSystem,
    pub degree: u32,
    pub order: usize,
    pub precision_bits: usize,
    pub nodes: usize,
    /// Sorted by decreasing pole (increasing exponent).
    pub poles: Vec<PoleLaurent>,
}

/// Node count for circle extraction; aliasing error is about 4^{−M}.
pub fn circle_nodes(bits: usize) -> usize {
    let m = (bits + 1) / 2 + 32;
    m.div_ceil(8).max(8) * 8
}

fn step_factor(sys: &GammaFactorSystem, m: u32, s: &ExtComplex, konst: &ExtReal, ctx: &Context) -> ExtComplex {
    // R(s) = π^{2d} 2^{2d−1} (1−s+m) / ∏ (s+μ−2)(1−s+μ)
    let neg = -s;
    let num = neg.add_real(&ctx.int(1 + m as i64));
    let mut den: Option<ExtComplex> = None;
    for &mu in &sys.shifts {
        let a = s.add_real(&ctx.int(mu - 2));
        let b = neg.add_real(&ctx.int(1 + mu));
        let ab = &a * &b;
        den = Some(match den {
            None => ab,
            Some(d) => &d * &ab,
        });
    }
    (&num / &den.expect("nonempty shifts")).scale(konst)
}

impl LaurentTable {
    /// Poles down to −(max μ + 2K).
    pub fn build(sys: &GammaFactorSystem, m: u32, order: usize, ctx: &Context) -> Result<Self> {
        if order == 0 {
            return Err(Error::Invalid("residue order K must be at least 1".into()));
        }
        let g = ctx.guarded();
        let lowest = -(sys.max_shift() + 2 * order as i64);
        let poles = sys.poles(lowest);
        if let Some((p, k)) = poles.iter().find(|(_, &k)| k > 2) {
            return Err(Error::Invalid(alloc::format!("pole of order {k} at {p}; only orders 1 and 2 are supported")));
        }
        let nodes = circle_nodes(ctx.bits());
        let r = g.ratio(CIRCLE_RADIUS.0, CIRCLE_RADIUS.1);
        let d = sys.degree() as i64;
        let konst = g.pi().powi(2 * d as u64).ldexp((2 * d - 1) as i32);

        // unit-circle offsets r·ω_k and their squares
        let two_pi = g.pi().ldexp(1);
        let offs: Vec<ExtComplex> = (0..nodes)
            .map(|k| {
                let th = (&two_pi * &g.int(k as i64)).div_i64(nodes as i64);
                ExtComplex::cis(&th, g).scale(&r)
            })
            .collect();
        let offs2: Vec<ExtComplex> = offs.iter().map(|o| o * o).collect();

        let mut out: Vec<PoleLaurent> = Vec::with_capacity(poles.len());
        for parity in [0i64, 1] {
            let mut class: Vec<(i64, u8)> =
                poles.iter().filter(|(p, _)| p.rem_euclid(2) == parity).map(|(p, k)| (*p, *k)).collect();
            class.sort_by(|a, b| b.0.cmp(&a.0));
            let Some(&(top, _)) = class.first() else { continue };
            let centre = |p: i64| ExtComplex::from_real(g.int(p), g);
            let mut vals: Vec<ExtComplex> =
                offs.iter().map(|o| sys.mf_base(m, &(&centre(top) + o), g)).collect::<Result<_>>()?;
            let mut cur = top;
            for &(p, k) in &class {
                while cur > p {
                    let c = centre(cur);
                    for (v, o) in vals.iter_mut().zip(&offs) {
                        *v = &*v * &step_factor(sys, m, &(&c + o), &konst, g);
                    }
                    cur -= 2;
                }
                let mut b = ExtComplex::zero(g);
                let mut a = ExtComplex::zero(g);
                for ((v, o), o2) in vals.iter().zip(&offs).zip(&offs2) {
                    b = &b + &(v * o);
                    a = &a + &(v * o2);
                }
                b = b.div_i64(nodes as i64);
                a = a.div_i64(nodes as i64);
                out.push(PoleLaurent { pole: p, order: k, a: round(a, ctx.bits()), b: round(b, ctx.bits()) });
            }
        }
        out.sort_by(|x, y| y.pole.cmp(&x.pole));
        Ok(LaurentTable { system: sys.clone(), degree: m, order, precision_bits: ctx.bits(), nodes, poles: out })
    }

    /// Largest log2 of |Im| relative to the largest real coefficient at the
    /// same pole; MF is real on the real axis, so this measures extraction error.
    pub fn max_imag_log2(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for p in &self.poles {
            let scale = p.a.re.log2_abs().max(p.b.re.log2_abs());
            for z in [&p.a, &p.b] {
                if !z.im.is_zero() {
                    worst = worst.max(z.im.log2_abs() - scale);
                }
            }
        }
        worst
    }

    /// The series for one test function of this degree, keeping poles ≥ −(max μ + 2K).
    pub fn series_for(&self, f: &TestFunction, order: usize, ctx: &Context) -> Result<TransformSeries> {
        if f.degree != self.degree {
            return Err(Error::Invalid(alloc::format!(
                "table for degree {} used with degree {}",
                self.degree,
                f.degree
            )));
        }
        if order > self.order {
            return Err(Error::Invalid(alloc::format!("table has K = {}, requested {order}", self.order)));
        }
        let g = ctx.guarded();
        let lowest = -(self.system.max_shift() + 2 * order as i64);
        let root = (f.scale.with_precision(g.bits()) / g.pi().sqrt(g)).abs();
        let half_l = root.ln(g);
        let mut terms = Vec::new();
        for p in self.poles.iter().filter(|p| p.pole >= lowest) {
            let n = (1 - p.pole + f.degree as i64) as u64;
            let w = root.powi(n) * &f.amplitude;
            let b = &p.b - &p.a.scale(&half_l);
            terms.push(SeriesTerm {
                exponent: (-p.pole) as u32,
                coeff: (&w * &b.re).with_precision(ctx.bits()),
                logcoeff: -(&w * &p.a.re).with_precision(ctx.bits()),
            });
        }
        Ok(TransformSeries {
            shifts: self.system.shifts.clone(),
            sign: self.system.sign,
            precision_bits: ctx.bits(),
            order,
            degree: f.degree,
            terms,
        })
    }
}

fn round(z: ExtComplex, bits: usize) -> ExtComplex {
    ExtComplex::new(z.re.with_precision(bits), z.im.with_precision(bits))
}

#[derive(Clone, Debug)]
pub struct SeriesTerm {
    pub exponent: u32,
    pub coeff: ExtReal,
    pub logcoeff: ExtReal,
}

/// F(x) ≈ Σ x^{e_k}(c_k + l_k ln x), ascending exponents.
#[derive(Clone, Debug)]
pub struct TransformSeries {
    pub shifts: Vec<i64>,
    pub sign: i8,
    pub precision_bits: usize,
    pub order: usize,
    pub degree: u32,
    pub terms: Vec<SeriesTerm>,
}

/// Value of F with its error indicators.
#[derive(Clone, Debug)]
pub struct FValue {
    pub value: ExtReal,
    /// 10 × the larger of the last two terms.
    pub tail_bound: ExtReal,
    /// Σ|terms| · 2^{−P} · 16.
    pub rounding_bound: ExtReal,
    pub max_term: ExtReal,
}

/// F(x) for x > 0 as the residue series.
pub fn residue_series(
    sys: &GammaFactorSystem,
    f: &TestFunction,
    order: usize,
    ctx: &Context,
) -> Result<TransformSeries> {
    LaurentTable::build(sys, f.degree, order, ctx)?.series_for(f, order, ctx)
}

impl TransformSeries {
    /// Magnitudes log2 |x^e (c + l ln x)| of every term.
    pub fn term_log2(&self, x: f64) -> Vec<f64> {
        let lx = libm::log2(x);
        let lnx = libm::log(x).abs();
        self.terms
            .iter()
            .map(|t| {
                let c = t.coeff.log2_abs();
                let l = t.logcoeff.log2_abs() + if lnx > 0.0 { libm::log2(lnx) } else { f64::NEG_INFINITY };
                c.max(l) + t.exponent as f64 * lx
            })
            .collect()
    }

    /// Σ terms in ascending exponent order. With a tolerance, signals
    /// non-convergence when the final terms exceed it or do not decay, and
    /// precision loss when the rounding estimate exceeds it.
    pub fn evaluate(&self, x: &ExtReal, tol: Option<&ExtReal>, ctx: &Context) -> Result<FValue> {
        if x.is_zero() || x.is_negative() {
            return Err(Error::Invalid(alloc::format!("F is evaluated at x > 0, got {x}")));
        }
        if ctx.bits() < self.precision_bits {
            return Err(Error::Invalid(alloc::format!(
                "context has {} bits, series needs {}",
                ctx.bits(),
                self.precision_bits
            )));
        }
        let g = ctx.guarded();
        let x = x.with_precision(g.bits());
        let lnx = x.ln(g);
        let mut sum = g.zero();
        let mut abs_sum = g.zero();
        let mut max_term = g.zero();
        let mut mags: Vec<ExtReal> = Vec::with_capacity(self.terms.len());
        let mut pow = g.one();
        let mut e_prev = 0u32;
        for t in &self.terms {
            pow = &pow * &x.powi((t.exponent - e_prev) as u64);
            e_prev = t.exponent;
            let term = if t.logcoeff.is_zero() { &pow * &t.coeff } else { &pow * &(&t.coeff + &(&t.logcoeff * &lnx)) };
            let a = term.abs();
            if a > max_term {
                max_term = a.clone();
            }
            abs_sum += &a;
            sum += &term;
            mags.push(a);
        }
        let n = mags.len();
        let last = match n {
            0 => g.zero(),
            1 => mags[0].clone(),
            _ => {
                if mags[n - 1] > mags[n - 2] {
                    mags[n - 1].clone()
                } else {
                    mags[n - 2].clone()
                }
            }
        };
        let tail_bound = last.mul_i64(10);
        let rounding_bound = abs_sum.ldexp(4 - ctx.bits() as i32);
        if let Some(tol) = tol {
            let decaying = n < 8 || {
                let recent = mags[n - 4..].iter().fold(g.zero(), |m, v| if *v > m { v.clone() } else { m });
                let before = mags[n - 8..n - 4].iter().fold(g.zero(), |m, v| if *v > m { v.clone() } else { m });
                recent < before || recent.is_zero()
            };
            if tail_bound > *tol || !decaying {
                return Err(Error::Unconverged { x: x.to_sci(6), last: last.to_sci(3), tol: tol.to_sci(3) });
            }
            if rounding_bound > *tol {
                return Err(Error::PrecisionLoss {
                    x: x.to_sci(6),
                    bound: rounding_bound.to_sci(3),
                    tol: tol.to_sci(3),
                });
            }
        }
        let b = ctx.bits();
        Ok(FValue {
            value: sum.with_precision(b),
            tail_bound: tail_bound.with_precision(b),
            rounding_bound: rounding_bound.with_precision(b),
            max_term: max_term.with_precision(b),
        })
    }
}

/// evaluate_F with a required tolerance.
pub fn evaluate_f(series: &TransformSeries, x: &ExtReal, tol: &ExtReal, ctx: &Context) -> Result<FValue> {
    series.evaluate(x, Some(tol), ctx)
}
