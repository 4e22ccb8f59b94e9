use crate::error::Result;
use crate::exact::{divisor_count3, CoefficientTable};
use crate::precision::{Context, ExtReal, TestFunction};
use crate::transform::TransformSeries;

/// Both sides of Σ a_n f(n) = Σ a_n F(n) truncated at N.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    /// |lhs − rhs| / max(|lhs|, |rhs|, 1).
    pub residual: ExtReal,
    pub truncation: u64,
    /// Σ_{N<n≤N+8} d₃(n)|f(n)|, using |a_n| ≤ d₃(n).
    pub lhs_tail: ExtReal,
    /// Σ_{N<n≤N+8} d₃(n)|F(n)|.
    pub rhs_tail: ExtReal,
    pub precision_bits: usize,
}

pub(crate) fn relative_residual(diff: &ExtReal, l: &ExtReal, r: &ExtReal, ctx: &Context) -> ExtReal {
    let mut den = ctx.one();
    for v in [l, r] {
        if *v > den {
            den = v.clone();
        }
    }
    diff / &den
}

/// Sums in ascending n at the precision of `ctx`, which must cover the
/// series precision. `f_tol` is passed to every F evaluation.
pub fn untwisted_identity(
    table: &CoefficientTable,
    f: &TestFunction,
    series: &TransformSeries,
    n: u64,
    f_tol: Option<&ExtReal>,
    ctx: &Context,
) -> Result<IdentityReport> {
    table.a(n.max(1))?;
    let mut lhs = ctx.zero();
    let mut rhs = ctx.zero();
    for k in 1..=n {
        let a = ctx.from_rational(table.a(k)?);
        let x = ctx.int(k as i64);
        lhs += &a * &f.eval(&x, ctx);
        rhs += &a * &series.evaluate(&x, f_tol, ctx)?.value;
    }
    let mut lhs_tail = ctx.zero();
    let mut rhs_tail = ctx.zero();
    for k in n + 1..=n + 8 {
        let d = ctx.int(divisor_count3(k) as i64);
        let x = ctx.int(k as i64);
        lhs_tail += &d * &f.eval(&x, ctx).abs();
        rhs_tail += &d * &series.evaluate(&x, None, ctx)?.value.abs();
    }
    let residual = relative_residual(&(&lhs - &rhs).abs(), &lhs.abs(), &rhs.abs(), ctx);
    Ok(IdentityReport { lhs, rhs, residual, truncation: n, lhs_tail, rhs_tail, precision_bits: ctx.bits() })
}
