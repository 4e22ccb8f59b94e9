use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::untwisted::relative_residual;
use crate::error::{Error, Result};
use crate::exact::{divisors, kloosterman_with_roots, roots_of_unity, CoefficientTable, TwistParams};
use crate::precision::{Context, ExtComplex, ExtReal, TestFunction};
use crate::transform::TransformSeries;

fn rat(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Which integers the twisted sums run over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumConvention {
    /// n ≥ 1 only.
    Positive,
    /// n ≠ 0, with A(q, −n) = A(q, n), f(−x) = f(x) and F(−t) = F(t), as
    /// for even test functions.
    NonZero,
}

impl core::fmt::Display for SumConvention {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            SumConvention::Positive => "n>=1",
            SumConvention::NonZero => "n!=0",
        })
    }
}

/// Σ_{n≤N} A(q, n) e(−na/c) f(n), over ±n for [`SumConvention::NonZero`].
pub fn twisted_lhs(
    table: &CoefficientTable,
    f: &TestFunction,
    twist: &TwistParams,
    n: u64,
    conv: SumConvention,
    ctx: &Context,
) -> Result<ExtComplex> {
    check_twist(twist)?;
    table.get(twist.q, n.max(1))?;
    let roots = roots_of_unity(twist.c, ctx);
    let c = twist.c as i128;
    let mut acc = ExtComplex::zero(ctx);
    for k in 1..=n {
        let a = ctx.from_rational(table.get(twist.q, k)?);
        let r = &a * &f.eval(&ctx.int(k as i64), ctx);
        let idx = (-(k as i128) * twist.a as i128).rem_euclid(c) as usize;
        let ch = match conv {
            SumConvention::Positive => roots[idx].clone(),
            SumConvention::NonZero => &roots[idx] + &roots[(c as usize - idx) % c as usize],
        };
        acc = &acc + &ch.scale(&r);
    }
    Ok(acc)
}

fn check_twist(t: &TwistParams) -> Result<()> {
    if t.c == 0 || t.q == 0 {
        return Err(Error::Invalid("c and q must be positive".into()));
    }
    if t.c > 1 && crate::exact::gcd(t.a, t.c as i64) != 1 {
        return Err(Error::NotInvertible { a: t.a, c: t.c });
    }
    Ok(())
}

/// Values of F at rational arguments, memoized across twists.
pub struct TransformCache<'a> {
    series: &'a TransformSeries,
    f_tol: Option<ExtReal>,
    values: BTreeMap<(u64, u64), ExtReal>,
}

impl<'a> TransformCache<'a> {
    pub fn new(series: &'a TransformSeries, f_tol: Option<ExtReal>) -> Self {
        TransformCache { series, f_tol, values: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// F(t) for t > 0.
    pub fn get(&mut self, t: &BigRational, ctx: &Context) -> Result<ExtReal> {
        let key = (
            t.numer().to_u64().ok_or_else(|| Error::Invalid("argument too large".into()))?,
            t.denom().to_u64().ok_or_else(|| Error::Invalid("argument too large".into()))?,
        );
        if let Some(v) = self.values.get(&key) {
            return Ok(v.clone());
        }
        let x = if key.1 == 1 { ctx.int(key.0 as i64) } else { ctx.from_rational(t) };
        let v = self.series.evaluate(&x, self.f_tol.as_ref(), ctx)?.value;
        self.values.insert(key, v.clone());
        Ok(v)
    }
}

/// Right side with its number of retained terms and an empirical tail.
#[derive(Clone, Debug)]
pub struct TwistedRhs {
    pub value: ExtComplex,
    pub terms: usize,
    /// 10 × the largest of the last eight retained terms of each d-sum.
    pub tail: ExtReal,
}

/// |c| Σ_{d | cq} Σ_{n≤N} A(n, d)/(nd) · S(q·abar, n; qc/d) · t^κ F(t) with
/// t = nd²/(c³q); terms with t > t_max are dropped when a cutoff is given.
/// The weights |c| A(n,d) t^κ/(nd) are formed exactly before rounding.
pub fn twisted_rhs(
    table: &CoefficientTable,
    cache: &mut TransformCache<'_>,
    twist: &TwistParams,
    n: u64,
    kappa: u32,
    t_max: Option<&BigRational>,
    conv: SumConvention,
    ctx: &Context,
) -> Result<TwistedRhs> {
    check_twist(twist)?;
    if kappa > 1 {
        return Err(Error::Invalid(alloc::format!("calibration exponent {kappa} must be 0 or 1")));
    }
    let cq = twist.c * twist.q;
    let c3q = twist.c * twist.c * twist.c * twist.q;
    let mut acc = ExtComplex::zero(ctx);
    let mut terms = 0;
    let mut tail = ctx.zero();
    for d in divisors(cq) {
        let modulus = cq / d;
        let roots = roots_of_unity(modulus, ctx);
        let first = (twist.q as i64 * twist.abar as i64) % modulus as i64;
        let mut kl: BTreeMap<u64, ExtComplex> = BTreeMap::new();
        let mut recent: Vec<ExtReal> = Vec::new();
        for k in 1..=n {
            let t = rat(k * d * d, c3q);
            if t_max.is_some_and(|m| &t > m) {
                break;
            }
            let s = kl
                .entry(k % modulus)
                .or_insert_with(|| {
                    let r = (k % modulus) as i64;
                    let plus = kloosterman_with_roots(first, r, modulus, &roots);
                    match conv {
                        SumConvention::Positive => plus,
                        SumConvention::NonZero => &plus + &kloosterman_with_roots(first, -r, modulus, &roots),
                    }
                })
                .clone();
            let a = table.get(k, d)?;
            let mut w = a * rat(twist.c, k * d);
            if kappa == 1 {
                w *= &t;
            }
            let fv = cache.get(&t, ctx)?;
            let r = &ctx.from_rational(&w) * &fv;
            let term = s.scale(&r);
            if recent.len() == 8 {
                recent.remove(0);
            }
            recent.push(term.abs(ctx));
            acc = &acc + &term;
            terms += 1;
        }
        for v in recent {
            if v > tail {
                tail = v;
            }
        }
    }
    Ok(TwistedRhs { value: acc, terms, tail: tail.mul_i64(10) })
}

/// One grid point, exponent and summation convention.
#[derive(Clone, Debug)]
pub struct CalibrationRow {
    pub atom: usize,
    pub twist: TwistParams,
    pub convention: SumConvention,
    pub kappa: u32,
    pub lhs: ExtComplex,
    pub rhs: ExtComplex,
    pub residual: ExtReal,
    pub rhs_terms: usize,
    pub rhs_tail: ExtReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CalibrationVerdict {
    /// Every grid point has residual below the threshold for this κ only.
    Calibrated(u32),
    /// Neither or both exponents pass uniformly; the data are in the rows.
    Inconclusive,
    /// No grid points.
    Empty,
}

/// Verdict for one summation convention.
#[derive(Clone, Debug)]
pub struct ConventionOutcome {
    pub convention: SumConvention,
    pub verdict: CalibrationVerdict,
    /// Largest residual per κ ∈ {0, 1}.
    pub worst: [f64; 2],
    /// Largest residual per κ over c = 1 grid points only.
    pub worst_c1: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct CalibrationReport {
    pub rows: Vec<CalibrationRow>,
    pub threshold: f64,
    pub outcomes: Vec<ConventionOutcome>,
}

impl CalibrationReport {
    pub fn outcome(&self, conv: SumConvention) -> Option<&ConventionOutcome> {
        self.outcomes.iter().find(|o| o.convention == conv)
    }
}

/// Truncations for the calibration sums.
#[derive(Clone, Debug)]
pub struct CalibrationSetup {
    /// Terms on the left side.
    pub n_lhs: u64,
    /// Right-side cutoff in the argument t of F.
    pub t_max: BigRational,
    pub threshold: f64,
}

impl CalibrationSetup {
    /// Table bound needed for the grid: q·n_lhs on the left and
    /// t_max·c³q on the right.
    pub fn table_bound(&self, grid: &[TwistParams]) -> u64 {
        let tm = self.t_max.ceil().to_integer().to_u64().unwrap_or(u64::MAX);
        grid.iter().map(|t| (t.q * self.n_lhs).max(tm.saturating_mul(t.c * t.c * t.c * t.q))).max().unwrap_or(1)
    }

    /// Largest d that occurs, which is the row limit the table needs.
    pub fn row_bound(&self, grid: &[TwistParams]) -> u64 {
        grid.iter().map(|t| t.c * t.q).max().unwrap_or(1)
    }
}

/// Residuals of the twisted identity over a grid for κ ∈ {0, 1} under each
/// requested summation convention, one family atom at a time. Right sides
/// run over n ≤ t_max·c³q, so every d-sum reaches the cutoff t_max.
pub fn calibrate_twist(
    table: &CoefficientTable,
    family: &[(&TestFunction, &TransformSeries)],
    grid: &[TwistParams],
    setup: &CalibrationSetup,
    conventions: &[SumConvention],
    f_tol: Option<&ExtReal>,
    ctx: &Context,
) -> Result<CalibrationReport> {
    let mut rows = Vec::new();
    let outer_bits = ctx.bits();
    for (j, (f, series)) in family.iter().enumerate() {
        // each atom is summed at the larger of its series precision and ctx
        let local = Context::new(series.precision_bits.max(ctx.bits()))?;
        let ctx = &local;
        let mut cache = TransformCache::new(series, f_tol.cloned());
        for tw in grid {
            let c3q = tw.c * tw.c * tw.c * tw.q;
            let n_rhs = (&setup.t_max * BigRational::from_integer(BigInt::from(c3q)))
                .floor()
                .to_integer()
                .to_u64()
                .unwrap_or(0)
                .max(1);
            for &conv in conventions {
                let lhs = twisted_lhs(table, f, tw, setup.n_lhs, conv, ctx)?;
                for kappa in [0u32, 1] {
                    let rhs = twisted_rhs(table, &mut cache, tw, n_rhs, kappa, Some(&setup.t_max), conv, ctx)?;
                    let diff = (&lhs - &rhs.value).abs(ctx);
                    let residual = relative_residual(&diff, &lhs.abs(ctx), &rhs.value.abs(ctx), ctx);
                    let b = outer_bits;
                    rows.push(CalibrationRow {
                        atom: j,
                        twist: *tw,
                        convention: conv,
                        kappa,
                        lhs: round(&lhs, b),
                        rhs: round(&rhs.value, b),
                        residual: residual.with_precision(b),
                        rhs_terms: rhs.terms,
                        rhs_tail: rhs.tail.with_precision(b),
                    });
                }
            }
        }
    }
    let outcomes = conventions
        .iter()
        .map(|&conv| {
            let mut worst = [0.0f64; 2];
            let mut worst_c1 = [0.0f64; 2];
            let mut any = false;
            for r in rows.iter().filter(|r| r.convention == conv) {
                any = true;
                let v = r.residual.to_f64();
                let v = if v.is_nan() { f64::INFINITY } else { v };
                let k = r.kappa as usize;
                worst[k] = worst[k].max(v);
                if r.twist.c == 1 {
                    worst_c1[k] = worst_c1[k].max(v);
                }
            }
            let verdict = if !any {
                CalibrationVerdict::Empty
            } else {
                match (worst[0] < setup.threshold, worst[1] < setup.threshold) {
                    (true, false) => CalibrationVerdict::Calibrated(0),
                    (false, true) => CalibrationVerdict::Calibrated(1),
                    _ => CalibrationVerdict::Inconclusive,
                }
            };
            ConventionOutcome { convention: conv, verdict, worst, worst_c1 }
        })
        .collect();
    Ok(CalibrationReport { rows, threshold: setup.threshold, outcomes })
}

fn round(z: &ExtComplex, bits: usize) -> ExtComplex {
    ExtComplex::new(z.re.with_precision(bits), z.im.with_precision(bits))
}
