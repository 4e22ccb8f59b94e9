use alloc::vec::Vec;

use num_rational::BigRational;

use super::family::{family_transforms, AtomTransform, FamilySpec, TransformRequest};
use crate::error::{Error, Result};
use crate::exact::{divisor_count3, CoefficientTable};
use crate::precision::{Context, ExtReal};
use crate::transform::GammaFactorSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Terms N_u < n ≤ N_trunc move to the right side with oracle values.
    Validation,
    /// Those terms are dropped; their size is logged per row.
    Discovery,
}

impl core::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "validation" => Ok(Mode::Validation),
            "discovery" => Ok(Mode::Discovery),
            _ => Err(Error::Invalid(alloc::format!("mode {s:?} is neither validation nor discovery"))),
        }
    }
}

impl core::fmt::Display for Mode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Mode::Validation => "validation",
            Mode::Discovery => "discovery",
        })
    }
}

/// Rows Σ_{n=2}^{N_u} (f_j(n) − F_j(n)) a_n = −(f_j(1) − F_j(1)) [− moved tail].
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: Vec<Vec<ExtReal>>,
    pub rhs: Vec<ExtReal>,
    /// Unknowns are a_2, …, a_{N_u}.
    pub unknowns: u64,
    pub truncation: u64,
    pub mode: Mode,
    /// Discovery mode: Σ_{N_u<n≤N_trunc} d₃(n)|f_j(n) − F_j(n)| per row.
    pub dropped_tail: Vec<ExtReal>,
    pub precision_bits: usize,
}

/// f(n) − F(n) for n = 1..=N at the series precision.
pub fn row_values(t: &AtomTransform, n: u64, f_tol: Option<&ExtReal>) -> Result<Vec<ExtReal>> {
    let ctx = t.context()?;
    let tol = f_tol.map(|v| v.with_precision(ctx.bits()));
    (1..=n)
        .map(|k| {
            let x = ctx.int(k as i64);
            let fv = t.atom.eval(&x, &ctx);
            let big = t.series.evaluate(&x, tol.as_ref(), &ctx)?.value;
            Ok(fv - big)
        })
        .collect()
}

/// Assembles the system from per-row values φ_j(1..=N_trunc), rounding to
/// the precision of `ctx`.
pub fn assemble_system(
    rows: &[Vec<ExtReal>],
    n_trunc: u64,
    n_u: u64,
    mode: Mode,
    oracle: Option<&CoefficientTable>,
    ctx: &Context,
) -> Result<LinearSystem> {
    if n_u < 2 {
        return Err(Error::Invalid("at least one unknown (N_u ≥ 2) is required".into()));
    }
    if rows.len() as u64 != n_u - 1 {
        return Err(Error::Dimension { expected: (n_u - 1) as usize, found: rows.len() });
    }
    if n_trunc < n_u {
        return Err(Error::Invalid(alloc::format!("truncation {n_trunc} is below the unknown range {n_u}")));
    }
    if mode == Mode::Validation && n_trunc > n_u && oracle.is_none() {
        return Err(Error::Invalid("validation mode needs oracle coefficients for the moved terms".into()));
    }
    let p = ctx.bits();
    let mut matrix = Vec::with_capacity(rows.len());
    let mut rhs = Vec::with_capacity(rows.len());
    let mut dropped_tail = Vec::with_capacity(rows.len());
    for phi in rows {
        if phi.len() as u64 != n_trunc {
            return Err(Error::Dimension { expected: n_trunc as usize, found: phi.len() });
        }
        matrix.push(phi[1..n_u as usize].iter().map(|v| v.with_precision(p)).collect());
        let mut b = -phi[0].with_precision(p);
        let mut tail = ctx.zero();
        for k in n_u + 1..=n_trunc {
            let v = &phi[k as usize - 1];
            match mode {
                Mode::Validation => {
                    let a = ctx.from_rational(oracle.expect("checked").a(k)?);
                    b -= &(&a * &v.with_precision(p));
                }
                Mode::Discovery => {
                    tail += &(ctx.int(divisor_count3(k) as i64) * v.with_precision(p).abs());
                }
            }
        }
        rhs.push(b);
        dropped_tail.push(tail);
    }
    Ok(LinearSystem { matrix, rhs, unknowns: n_u, truncation: n_trunc, mode, dropped_tail, precision_bits: p })
}

/// build_system: per-row values followed by assembly.
pub fn build_system(
    family: &[AtomTransform],
    n_trunc: u64,
    n_u: u64,
    mode: Mode,
    oracle: Option<&CoefficientTable>,
    f_tol: Option<&ExtReal>,
    ctx: &Context,
) -> Result<LinearSystem> {
    if family.len() as u64 + 1 != n_u {
        return Err(Error::Dimension { expected: n_u.saturating_sub(1) as usize, found: family.len() });
    }
    let rows: Vec<Vec<ExtReal>> = family.iter().map(|t| row_values(t, n_trunc, f_tol)).collect::<Result<_>>()?;
    assemble_system(&rows, n_trunc, n_u, mode, oracle, ctx)
}

impl LinearSystem {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// The same matrix with right side M·a for the given coefficients
    /// a_2, …, a_{N_u}.
    pub fn with_generated_rhs(&self, coeffs: &[ExtReal]) -> Result<LinearSystem> {
        if coeffs.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: coeffs.len() });
        }
        let mut out = self.clone();
        out.rhs = self
            .matrix
            .iter()
            .map(|row| {
                let mut acc = ExtReal::from_i64_like(&row[0], 0);
                for (m, a) in row.iter().zip(coeffs) {
                    acc += &(m * a);
                }
                acc
            })
            .collect();
        Ok(out)
    }
}

/// Solution of a square system.
#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vec<ExtReal>,
    /// ‖M‖₁ ‖M⁻¹‖₁ with the inverse from the same factorization.
    pub condition: ExtReal,
    pub precision_bits: usize,
}

struct Lu {
    a: Vec<Vec<ExtReal>>,
    perm: Vec<usize>,
}

fn factor(m: &[Vec<ExtReal>], ctx: &Context) -> Result<Lu> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension { expected: n, found: m.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0) });
    }
    let mut a: Vec<Vec<ExtReal>> = m.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut scale = ctx.zero();
    for r in &a {
        for v in r {
            let av = v.abs();
            if av > scale {
                scale = av;
            }
        }
    }
    let floor = scale.ldexp(-(ctx.bits() as i32));
    for k in 0..n {
        // strict comparison keeps the lowest row on ties
        let mut p = k;
        let mut best = a[k][k].abs();
        for i in k + 1..n {
            let v = a[i][k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best.is_zero() || best <= floor {
            return Err(Error::Singular(k));
        }
        a.swap(k, p);
        perm.swap(k, p);
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let l = &row[k] / &pivot_row[k];
            for j in k + 1..n {
                let t = &l * &pivot_row[j];
                row[j] -= &t;
            }
            row[k] = l;
        }
    }
    Ok(Lu { a, perm })
}

impl Lu {
    fn solve(&self, b: &[ExtReal]) -> Vec<ExtReal> {
        let n = self.a.len();
        let mut y: Vec<ExtReal> = self.perm.iter().map(|&i| b[i].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = &self.a[i][j] * &y[j];
                y[i] -= &t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = &self.a[i][j] * &y[j];
                y[i] -= &t;
            }
            y[i] = &y[i] / &self.a[i][i];
        }
        y
    }
}

fn norm1(cols: impl Iterator<Item = ExtReal>, ctx: &Context) -> ExtReal {
    cols.fold(ctx.zero(), |m, v| if v > m { v } else { m })
}

/// Gaussian elimination with row pivoting at the precision of `ctx`.
pub fn solve_system(sys: &LinearSystem, ctx: &Context) -> Result<Solution> {
    let n = sys.dim();
    if sys.rhs.len() != n {
        return Err(Error::Dimension { expected: n, found: sys.rhs.len() });
    }
    let m: Vec<Vec<ExtReal>> =
        sys.matrix.iter().map(|r| r.iter().map(|v| v.with_precision(ctx.bits())).collect()).collect();
    let lu = factor(&m, ctx)?;
    let b: Vec<ExtReal> = sys.rhs.iter().map(|v| v.with_precision(ctx.bits())).collect();
    let x = lu.solve(&b);
    let a_norm = norm1((0..n).map(|j| (0..n).fold(ctx.zero(), |s, i| s + m[i][j].abs())), ctx);
    let inv_norm = norm1(
        (0..n).map(|j| {
            let mut e = alloc::vec![ctx.zero(); n];
            e[j] = ctx.one();
            lu.solve(&e).iter().fold(ctx.zero(), |s, v| s + v.abs())
        }),
        ctx,
    );
    Ok(Solution { x, condition: a_norm * inv_norm, precision_bits: ctx.bits() })
}

/// Solved against exact coefficients.
#[derive(Clone, Debug)]
pub struct SolveReport {
    /// n = 2, …, N_u.
    pub indices: Vec<u64>,
    pub solved: Vec<ExtReal>,
    pub exact: Vec<BigRational>,
    pub abs_error: Vec<ExtReal>,
    pub condition: ExtReal,
    pub mode: Mode,
    pub truncation: u64,
    pub precision_bits: usize,
    /// Largest per-row dropped tail in discovery mode.
    pub dropped_tail: ExtReal,
    pub elapsed_seconds: Option<f64>,
}

impl SolveReport {
    pub fn compare(sys: &LinearSystem, sol: &Solution, oracle: &CoefficientTable, ctx: &Context) -> Result<Self> {
        let indices: Vec<u64> = (2..=sys.unknowns).collect();
        let exact: Vec<BigRational> = indices.iter().map(|&n| oracle.a(n).cloned()).collect::<Result<_>>()?;
        let abs_error = sol.x.iter().zip(&exact).map(|(x, e)| (x - &ctx.from_rational(e)).abs()).collect();
        let dropped_tail = sys.dropped_tail.iter().fold(ctx.zero(), |m, v| if *v > m { v.clone() } else { m });
        Ok(SolveReport {
            indices,
            solved: sol.x.clone(),
            exact,
            abs_error,
            condition: sol.condition.clone(),
            mode: sys.mode,
            truncation: sys.truncation,
            precision_bits: sol.precision_bits,
            dropped_tail,
            elapsed_seconds: None,
        })
    }

    pub fn error_at(&self, n: u64) -> Option<&ExtReal> {
        self.indices.iter().position(|&i| i == n).map(|k| &self.abs_error[k])
    }
}

/// Everything the coefficient experiment depends on.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub precision_bits: usize,
    pub family: FamilySpec,
    pub truncation: u64,
    pub unknowns: u64,
    pub mode: Mode,
    /// Absolute accuracy demanded of every F(n).
    pub transform_tol: f64,
    pub system: GammaFactorSystem,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            precision_bits: 160,
            family: FamilySpec::Default,
            truncation: 50,
            unknowns: 50,
            mode: Mode::Discovery,
            transform_tol: 1e-50,
            system: GammaFactorSystem::default(),
        }
    }
}

/// Family → transforms → system → solve → comparison with the oracle.
pub fn run_solve_experiment(cfg: &ExperimentConfig) -> Result<SolveReport> {
    let ctx = Context::new(cfg.precision_bits)?;
    if cfg.family.len() as u64 + 1 != cfg.unknowns {
        return Err(Error::Dimension { expected: cfg.unknowns.saturating_sub(1) as usize, found: cfg.family.len() });
    }
    let atoms = cfg.family.atoms(&ctx)?;
    let req = TransformRequest { x_max: cfg.truncation as f64, tol: cfg.transform_tol, min_bits: cfg.precision_bits };
    let transforms = family_transforms(&cfg.system, &atoms, req)?;
    let oracle = CoefficientTable::new(cfg.truncation.max(cfg.unknowns))?;
    let tol = ctx.from_f64(cfg.transform_tol);
    let sys = build_system(&transforms, cfg.truncation, cfg.unknowns, cfg.mode, Some(&oracle), Some(&tol), &ctx)?;
    let sol = solve_system(&sys, &ctx)?;
    SolveReport::compare(&sys, &sol, &oracle, &ctx)
}
