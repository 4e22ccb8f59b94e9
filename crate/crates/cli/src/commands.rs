use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};
use voronoi_core::exact::{integrality_witness, tau_table, CoefficientTable, TwistParams};
use voronoi_core::identity::{
    assemble_system, calibrate_twist, degree_group, group_by_degree, row_values, scatter_groups, solve_system,
    untwisted_identity, AtomTransform, CalibrationReport, CalibrationSetup, CalibrationVerdict, LinearSystem, Solution,
    SolveReport, SumConvention, TransformRequest,
};
use voronoi_core::precision::{Context, ExtReal, TestFunction};
use voronoi_core::transform::{
    plan_series, quadrature_f_many, residue_series, GammaFactorSystem, QuadratureSpec, TransformSeries,
};

use crate::config::RunConfig;
use crate::report::{Report, Table};

const CONDITION_WARNING: f64 = 1e12;

fn dec(v: &ExtReal, ctx: &Context) -> String {
    v.to_decimal(ctx)
}

fn tol(ctx: &Context, s: &str) -> Result<ExtReal> {
    Ok(ctx.parse(s)?)
}

fn rational(ctx: &Context, s: &str) -> Result<BigRational> {
    ctx.parse(s)?.to_rational().ok_or_else(|| anyhow!("{s} has no exact binary value"))
}

/// Transforms for the atoms, one degree group per rayon task, each with
/// its own contexts.
pub fn transforms(
    sys: &GammaFactorSystem,
    atoms: &[TestFunction],
    req: TransformRequest,
    k_max: usize,
) -> Result<Vec<AtomTransform>> {
    let groups: Vec<(Vec<usize>, Vec<AtomTransform>)> = group_by_degree(atoms)
        .into_par_iter()
        .map(|(_, idx)| {
            let g: Vec<TestFunction> = idx.iter().map(|&i| atoms[i].clone()).collect();
            degree_group(sys, &g, req).map(|t| (idx, t))
        })
        .collect::<voronoi_core::Result<_>>()?;
    let out = scatter_groups(atoms.len(), groups);
    if let Some(t) = out.iter().find(|t| t.series.order > k_max) {
        bail!("degree {} needs residue order {} above residue_order_max = {k_max}", t.atom.degree, t.series.order);
    }
    Ok(out)
}

pub fn series_json(s: &TransformSeries) -> Value {
    let ctx = Context::new(s.precision_bits).expect("series precision is valid");
    json!({
        "shifts": s.shifts,
        "sign": s.sign,
        "precision_bits": s.precision_bits,
        "K": s.order,
        "degree": s.degree,
        "terms": s.terms.iter().map(|t| json!({
            "exponent": t.exponent,
            "coeff": dec(&t.coeff, &ctx),
            "logcoeff": dec(&t.logcoeff, &ctx),
        })).collect::<Vec<_>>(),
    })
}

pub fn oracle(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let n = cfg.oracle_n_max;
    let rows = cfg.oracle_rows.min(n);
    let table = CoefficientTable::with_row_limit(n, rows)?;
    let mut out = Table::new(&["m", "n", "value", "decimal"]);
    let mut records = Vec::new();
    for (m, k, v) in table.entries().filter(|e| e.0 <= rows) {
        out.push(vec![
            m.to_string(),
            k.to_string(),
            v.to_string(),
            format!("{:.6}", voronoi_core::precision::rational_to_f64(v)),
        ]);
        records.push(json!({
            "m": m, "n": k,
            "numerator": v.numer().to_string(),
            "denominator": v.denom().to_string(),
        }));
    }
    let bad: Vec<u64> = (1..=n).filter(|&k| integrality_witness(k, &table).is_err()).collect();
    rep.passed = bad.is_empty();
    if !bad.is_empty() {
        rep.warnings.push(format!("a_n n^11 is not integral at n = {bad:?}"));
    }
    rep.table = out;
    rep.body = json!({ "n_max": n, "rows": rows, "coefficients": records, "integral_through": n });
    Ok(())
}

pub fn tau(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let mut out = Table::new(&["n", "tau"]);
    let values = tau_table(cfg.oracle_n_max as usize);
    for (i, v) in values.iter().enumerate() {
        out.push(vec![(i + 1).to_string(), v.to_string()]);
    }
    rep.passed = true;
    rep.table = out;
    rep.body = json!({ "n_max": cfg.oracle_n_max, "tau": values.iter().map(|v| v.to_string()).collect::<Vec<_>>() });
    Ok(())
}

pub struct TransformArgs {
    pub degree: u32,
    pub scale: String,
    pub x_max: f64,
    pub points: Vec<String>,
    pub check: bool,
    pub normalize: bool,
}

pub fn transform(cfg: &RunConfig, args: &TransformArgs, rep: &mut Report) -> Result<()> {
    if args.degree % 2 == 1 {
        bail!("the degree m must be even, got {}", args.degree);
    }
    if !(args.x_max > 0.0) {
        bail!("x_max must be positive");
    }
    let ctx = Context::new(cfg.precision_bits)?;
    let sys = GammaFactorSystem::default();
    let x = ctx.parse(&args.scale)?;
    let f = if args.normalize {
        TestFunction::peak_normalized(args.degree, x, &ctx)?
    } else {
        TestFunction::new(args.degree, x)?
    };
    let ftol: f64 = cfg.transform_tol.parse()?;
    let plan = plan_series(&sys, &f, args.x_max, ftol, cfg.precision_bits)?;
    if plan.order > cfg.residue_order_max {
        bail!("residue order {} exceeds residue_order_max = {}", plan.order, cfg.residue_order_max);
    }
    let sctx = Context::new(plan.bits)?;
    let series = residue_series(&sys, &f, plan.order, &sctx)?;
    let xs: Vec<ExtReal> = args.points.iter().map(|p| ctx.parse(p)).collect::<voronoi_core::Result<_>>()?;
    if xs.iter().any(|v| v.is_negative() || v.is_zero()) {
        bail!("evaluation points must be positive");
    }
    let quad = if args.check {
        let spec = match (&cfg.quadrature_height, cfg.quadrature_steps) {
            (Some(h), Some(m)) => QuadratureSpec::new(ctx.parse(&cfg.quadrature_sigma0)?, ctx.parse(h)?, m)?,
            _ => {
                let lo = xs.iter().map(ExtReal::to_f64).fold(f64::INFINITY, f64::min);
                let hi = xs.iter().map(ExtReal::to_f64).fold(0.0, f64::max);
                QuadratureSpec::auto(&f, lo, hi, 1e-30, &ctx)
            }
        };
        Some(quadrature_f_many(&sys, &f, &xs, &spec, &ctx)?)
    } else {
        None
    };
    let check_tol = tol(&ctx, &cfg.transform_check_tol)?;
    let stol = tol(&sctx, &cfg.transform_tol)?;
    let mut out = Table::new(&["x", "series", "quadrature", "relative_difference"]);
    let mut values = Vec::new();
    let mut passed = true;
    for (i, x) in xs.iter().enumerate() {
        let v = series.evaluate(&x.with_precision(sctx.bits()), Some(&stol), &sctx)?;
        let sv = v.value.with_precision(ctx.bits());
        let (q, rel) = match &quad {
            Some(q) => {
                let q = &q[i];
                let den = if q.value.abs() > ctx.one().ldexp(-1000) { q.value.abs() } else { ctx.one() };
                let rel = (&sv - &q.value).abs() / den;
                passed &= rel <= check_tol;
                (Some(q.clone()), Some(rel))
            }
            None => (None, None),
        };
        out.push(vec![
            args.points[i].clone(),
            sv.to_sci(12),
            q.as_ref().map_or("-".into(), |q| q.value.to_sci(12)),
            rel.as_ref().map_or("-".into(), |r| r.to_sci(2)),
        ]);
        values.push(json!({
            "x": args.points[i],
            "series": dec(&v.value, &sctx),
            "tail_bound": dec(&v.tail_bound, &sctx),
            "rounding_bound": dec(&v.rounding_bound, &sctx),
            "quadrature": q.as_ref().map(|q| dec(&q.value, &ctx)),
            "quadrature_imag": q.as_ref().map(|q| dec(&q.imag, &ctx)),
            "quadrature_step_error": q.as_ref().map(|q| dec(&q.step_error, &ctx)),
            "quadrature_truncation_error": q.as_ref().map(|q| dec(&q.truncation_error, &ctx)),
            "relative_difference": rel.as_ref().map(|r| dec(r, &ctx)),
        }));
    }
    rep.passed = passed;
    rep.table = out;
    rep.body = json!({
        "degree": args.degree,
        "scale": args.scale,
        "amplitude": dec(&f.amplitude, &ctx),
        "plan": { "K": plan.order, "bits": plan.bits, "peak_log2": plan.peak_log2 },
        "series": series_json(&series),
        "values": values,
    });
    Ok(())
}

pub fn verify(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let ctx = Context::new(cfg.precision_bits)?;
    let sys = GammaFactorSystem::default();
    let n = cfg.verify_terms;
    let atoms = cfg.family.atoms(&ctx)?;
    let req = TransformRequest {
        x_max: (n + 8) as f64,
        tol: cfg.verify_transform_tol.parse()?,
        min_bits: cfg.precision_bits,
    };
    let ts = transforms(&sys, &atoms, req, cfg.residue_order_max)?;
    let table = CoefficientTable::with_row_limit(n, 1)?;
    let limit = tol(&ctx, &cfg.identity_tol)?;
    let results: Vec<_> = ts
        .par_iter()
        .map(|t| {
            let lctx = t.context()?;
            let ftol = lctx.parse(&cfg.verify_transform_tol)?;
            untwisted_identity(&table, &t.atom, &t.series, n, Some(&ftol), &lctx)
        })
        .collect::<voronoi_core::Result<_>>()?;
    let mut out = Table::new(&["atom", "m", "X", "K", "bits", "lhs", "rhs", "residual", "rhs_tail"]);
    let mut rows = Vec::new();
    let mut passed = true;
    for (i, (t, r)) in ts.iter().zip(&results).enumerate() {
        let lctx = t.context()?;
        let ok = r.residual.with_precision(ctx.bits()) < limit;
        passed &= ok;
        out.push(vec![
            i.to_string(),
            t.atom.degree.to_string(),
            t.atom.scale.to_sci(6),
            t.series.order.to_string(),
            t.series.precision_bits.to_string(),
            r.lhs.to_sci(12),
            r.rhs.to_sci(12),
            r.residual.to_sci(2),
            r.rhs_tail.to_sci(2),
        ]);
        rows.push(json!({
            "atom": i,
            "degree": t.atom.degree,
            "scale": dec(&t.atom.scale, &lctx),
            "K": t.series.order,
            "precision_bits": r.precision_bits,
            "lhs": dec(&r.lhs, &lctx),
            "rhs": dec(&r.rhs, &lctx),
            "residual": dec(&r.residual, &lctx),
            "lhs_tail": dec(&r.lhs_tail, &lctx),
            "rhs_tail": dec(&r.rhs_tail, &lctx),
            "passed": ok,
        }));
    }
    rep.passed = passed;
    rep.table = out;
    rep.body = json!({ "truncation": n, "tolerance": cfg.identity_tol, "atoms": rows });
    Ok(())
}

pub struct TwistArgs {
    pub a: i64,
    pub c: u64,
    pub q: u64,
    pub calibrate: bool,
}

fn verdict_str(v: CalibrationVerdict) -> String {
    match v {
        CalibrationVerdict::Calibrated(k) => format!("calibrated kappa = {k}"),
        CalibrationVerdict::Inconclusive => "inconclusive".into(),
        CalibrationVerdict::Empty => "empty".into(),
    }
}

fn calibration_json(r: &CalibrationReport, ctx: &Context) -> Value {
    json!({
        "threshold": r.threshold,
        "outcomes": r.outcomes.iter().map(|o| json!({
            "convention": o.convention.to_string(),
            "verdict": verdict_str(o.verdict),
            "worst_kappa0": o.worst[0],
            "worst_kappa1": o.worst[1],
            "worst_c1_kappa0": o.worst_c1[0],
            "worst_c1_kappa1": o.worst_c1[1],
        })).collect::<Vec<_>>(),
        "rows": r.rows.iter().map(|row| json!({
            "atom": row.atom,
            "a": row.twist.a, "c": row.twist.c, "q": row.twist.q,
            "convention": row.convention.to_string(),
            "kappa": row.kappa,
            "lhs": [dec(&row.lhs.re, ctx), dec(&row.lhs.im, ctx)],
            "rhs": [dec(&row.rhs.re, ctx), dec(&row.rhs.im, ctx)],
            "residual": dec(&row.residual, ctx),
            "rhs_terms": row.rhs_terms,
            "rhs_tail": dec(&row.rhs_tail, ctx),
        })).collect::<Vec<_>>(),
    })
}

fn push_rows(out: &mut Table, part: &str, r: &CalibrationReport) {
    for row in &r.rows {
        out.push(vec![
            part.into(),
            row.atom.to_string(),
            row.twist.a.to_string(),
            row.twist.c.to_string(),
            row.twist.q.to_string(),
            row.convention.to_string(),
            row.kappa.to_string(),
            row.lhs.re.to_sci(9),
            row.lhs.im.to_sci(9),
            row.rhs.re.to_sci(9),
            row.rhs.im.to_sci(9),
            row.residual.to_sci(2),
            row.rhs_terms.to_string(),
        ]);
    }
}

/// Residuals at one twist under both conventions, and optionally the
/// calibration grid.
pub fn twist(cfg: &RunConfig, args: &TwistArgs, rep: &mut Report) -> Result<()> {
    let tw = TwistParams::new(args.a, args.c, args.q)?;
    let ctx = Context::new(cfg.precision_bits)?;
    let sys = GammaFactorSystem::default();
    let atoms: Vec<TestFunction> = cfg
        .twist_atoms
        .iter()
        .map(|(m, x)| TestFunction::peak_normalized(*m, ctx.parse(x)?, &ctx))
        .collect::<voronoi_core::Result<_>>()?;
    let t_max = rational(&ctx, &cfg.twist_t_max)?;
    let setup = CalibrationSetup { n_lhs: cfg.twist_n_lhs, t_max, threshold: cfg.calibration_threshold.parse()? };
    let grid = if args.calibrate { TwistParams::grid(cfg.twist_c_max, cfg.twist_q_max) } else { Vec::new() };
    let mut all = grid.clone();
    all.push(tw);
    let table = CoefficientTable::with_row_limit(setup.table_bound(&all), setup.row_bound(&all))?;
    let req = TransformRequest {
        x_max: cfg.twist_t_max.parse()?,
        tol: cfg.verify_transform_tol.parse()?,
        min_bits: cfg.precision_bits,
    };
    let ts = transforms(&sys, &atoms, req, cfg.residue_order_max)?;
    let fam: Vec<(&TestFunction, &TransformSeries)> = ts.iter().map(|t| (&t.atom, &t.series)).collect();
    let conventions = [SumConvention::Positive, SumConvention::NonZero];
    let ftol = ctx.parse(&cfg.verify_transform_tol)?;
    let single = calibrate_twist(&table, &fam, &[tw], &setup, &conventions, Some(&ftol), &ctx)?;
    let mut out = Table::new(&[
        "part",
        "atom",
        "a",
        "c",
        "q",
        "sum",
        "kappa",
        "lhs_re",
        "lhs_im",
        "rhs_re",
        "rhs_im",
        "residual",
        "rhs_terms",
    ]);
    push_rows(&mut out, "twist", &single);
    let threshold = tol(&ctx, &cfg.calibration_threshold)?;
    rep.passed = single
        .rows
        .iter()
        .filter(|r| r.kappa == 1 && r.convention == SumConvention::NonZero)
        .all(|r| r.residual < threshold);
    let mut body = json!({
        "twist": { "a": tw.a, "c": tw.c, "q": tw.q, "abar": tw.abar },
        "t_max": cfg.twist_t_max,
        "n_lhs": cfg.twist_n_lhs,
        "result": calibration_json(&single, &ctx),
    });
    if args.calibrate {
        let cal = calibrate_twist(&table, &fam, &grid, &setup, &conventions, Some(&ftol), &ctx)?;
        push_rows(&mut out, "grid", &cal);
        for o in &cal.outcomes {
            rep.warnings.push(format!(
                "calibration over c <= {}, q <= {} with sum over {}: {} (worst residual kappa=0 {:.2e}, kappa=1 {:.2e})",
                cfg.twist_c_max,
                cfg.twist_q_max,
                o.convention,
                verdict_str(o.verdict),
                o.worst[0],
                o.worst[1]
            ));
        }
        body["calibration"] = calibration_json(&cal, &ctx);
    }
    rep.table = out;
    rep.body = body;
    Ok(())
}

/// The assembled system with its solution and comparison.
pub struct SolveRun {
    pub system: LinearSystem,
    pub solution: Solution,
    pub report: SolveReport,
}

pub fn solve(cfg: &RunConfig, rep: &mut Report) -> Result<SolveRun> {
    cfg.check_square()?;
    let start = Instant::now();
    let ctx = Context::new(cfg.precision_bits)?;
    let sys = GammaFactorSystem::default();
    let atoms = cfg.family.atoms(&ctx)?;
    let req = TransformRequest {
        x_max: cfg.truncation as f64,
        tol: cfg.transform_tol.parse()?,
        min_bits: cfg.precision_bits,
    };
    let ts = transforms(&sys, &atoms, req, cfg.residue_order_max)?;
    let oracle = CoefficientTable::with_row_limit(cfg.truncation, 1)?;
    let rows: Vec<Vec<ExtReal>> = ts
        .par_iter()
        .map(|t| {
            let lctx = t.context()?;
            let ftol = lctx.parse(&cfg.transform_tol)?;
            row_values(t, cfg.truncation, Some(&ftol))
        })
        .collect::<voronoi_core::Result<_>>()?;
    let system = assemble_system(&rows, cfg.truncation, cfg.unknowns, cfg.mode, Some(&oracle), &ctx)?;
    let sol = solve_system(&system, &ctx)?;
    let mut report = SolveReport::compare(&system, &sol, &oracle, &ctx)?;
    report.elapsed_seconds = Some(start.elapsed().as_secs_f64());

    let cond = report.condition.to_f64();
    if !(cond <= CONDITION_WARNING) {
        rep.warnings.push(format!("condition number {cond:.3e} exceeds {CONDITION_WARNING:e}"));
    }
    let mut out = Table::new(&["n", "solved", "exact", "error"]);
    let mut coeffs = Vec::new();
    for (i, &n) in report.indices.iter().enumerate() {
        out.push(vec![
            n.to_string(),
            report.solved[i].to_sci(9),
            report.exact[i].to_string(),
            report.abs_error[i].to_sci(3),
        ]);
        coeffs.push(json!({
            "n": n,
            "solved": dec(&report.solved[i], &ctx),
            "exact": report.exact[i].to_string(),
            "abs_error": dec(&report.abs_error[i], &ctx),
        }));
    }
    let a2_tol = tol(&ctx, &cfg.solve_tol_a2)?;
    let all_tol = tol(&ctx, &cfg.solve_tol)?;
    let a2_ok = report.error_at(2).is_some_and(|e| *e < a2_tol);
    let head_ok = (2..=10.min(cfg.unknowns)).all(|n| report.error_at(n).is_some_and(|e| *e < all_tol));
    rep.passed = a2_ok && head_ok;
    rep.table = out;
    rep.body = json!({
        "mode": report.mode.to_string(),
        "truncation": report.truncation,
        "unknowns": cfg.unknowns,
        "condition": dec(&report.condition, &ctx),
        "dropped_tail": dec(&report.dropped_tail, &ctx),
        "elapsed_seconds": report.elapsed_seconds,
        "transform_orders": ts.iter().map(|t| t.series.order).collect::<Vec<_>>(),
        "transform_bits": ts.iter().map(|t| t.series.precision_bits).collect::<Vec<_>>(),
        "coefficients": coeffs,
    });
    Ok(SolveRun { system, solution: sol, report })
}
