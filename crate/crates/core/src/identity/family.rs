use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::precision::{Context, TestFunction};
use crate::transform::{plan_from_pilot, GammaFactorSystem, LaurentTable, SeriesPlan, TransformSeries, PILOT_BITS};

/// The 49 atoms (m, X) of the default system, each scaled to peak value 1.
///
/// Degrees below 12 give F a slowly decaying x^{−1−m} tail, which keeps the
/// identity residual at N = 200 far above 10⁻⁸. These atoms were selected
/// from a grid of m ∈ [12, 40], X ∈ [3, 15] by local search on the size of
/// the discovery-mode error A⁻¹·(Σ_{n>50} a_n φ(n)) at a₂, …, a₁₀.
#[rustfmt::skip]
pub const DEFAULT_FAMILY: [(u32, f64); 49] = [
    (12, 4.125), (12, 5.25), (12, 6.0), (12, 6.375), (12, 7.125), (12, 7.875),
    (12, 8.625), (12, 9.375), (12, 14.25), (14, 4.125), (14, 4.5), (14, 4.875),
    (14, 5.25), (14, 6.0), (14, 6.75), (14, 7.125), (14, 7.875), (14, 8.625),
    (14, 9.75), (16, 4.125), (16, 4.5), (16, 4.875), (16, 5.625), (16, 6.0),
    (16, 6.75), (16, 7.5), (16, 8.25), (16, 9.0), (16, 9.75), (18, 4.125),
    (18, 4.5), (18, 5.25), (18, 5.625), (18, 6.375), (18, 6.75), (18, 7.5),
    (18, 8.25), (18, 10.125), (20, 4.5), (20, 4.875), (20, 5.25), (20, 5.625),
    (20, 6.375), (20, 7.125), (20, 7.5), (20, 8.25), (20, 9.375), (22, 5.25),
    (28, 4.5),
];

/// How the family of test functions is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    /// The built-in 49-atom family.
    Default,
    /// Explicit (m, X) pairs, X as a decimal string.
    Explicit(Vec<(u32, alloc::string::String)>),
    /// `count` atoms with X log-spaced over [x_lo, x_hi] and degrees taken
    /// round-robin from `degrees`.
    Generated { degrees: Vec<u32>, x_lo: f64, x_hi: f64, count: usize },
}

impl FamilySpec {
    pub fn len(&self) -> usize {
        match self {
            FamilySpec::Default => DEFAULT_FAMILY.len(),
            FamilySpec::Explicit(v) => v.len(),
            FamilySpec::Generated { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Peak-normalized atoms.
    pub fn atoms(&self, ctx: &Context) -> Result<Vec<TestFunction>> {
        let pairs: Vec<(u32, crate::precision::ExtReal)> = match self {
            FamilySpec::Default => DEFAULT_FAMILY.iter().map(|&(m, x)| (m, ctx.from_f64(x))).collect(),
            FamilySpec::Explicit(v) => v.iter().map(|(m, x)| Ok((*m, ctx.parse(x)?))).collect::<Result<_>>()?,
            FamilySpec::Generated { degrees, x_lo, x_hi, count } => {
                if degrees.is_empty() || *count == 0 {
                    return Err(Error::Invalid("generated family needs degrees and a positive count".into()));
                }
                if !(*x_lo > 0.0 && x_hi >= x_lo) {
                    return Err(Error::Invalid(alloc::format!("bad scale range [{x_lo}, {x_hi}]")));
                }
                (0..*count)
                    .map(|i| {
                        let t = if *count == 1 { 0.0 } else { i as f64 / (*count - 1) as f64 };
                        let x = x_lo * libm::pow(x_hi / x_lo, t);
                        (degrees[i % degrees.len()], ctx.from_f64(x))
                    })
                    .collect()
            }
        };
        pairs.into_iter().map(|(m, x)| TestFunction::peak_normalized(m, x, ctx)).collect()
    }
}

/// A test function with the residue series of its transform.
#[derive(Clone, Debug)]
pub struct AtomTransform {
    pub atom: TestFunction,
    pub series: TransformSeries,
    pub plan: SeriesPlan,
}

impl AtomTransform {
    /// A context at the series precision.
    pub fn context(&self) -> Result<Context> {
        Context::new(self.series.precision_bits)
    }
}

/// Accuracy demanded of F on (0, x_max].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformRequest {
    pub x_max: f64,
    pub tol: f64,
    pub min_bits: usize,
}

/// Series for atoms sharing one degree, from a single pilot and a single
/// Laurent table.
pub fn degree_group(
    sys: &GammaFactorSystem,
    atoms: &[TestFunction],
    req: TransformRequest,
) -> Result<Vec<AtomTransform>> {
    let Some(first) = atoms.first() else { return Ok(Vec::new()) };
    let m = first.degree;
    if atoms.iter().any(|f| f.degree != m) {
        return Err(Error::Invalid("degree group mixes monomial degrees".into()));
    }
    let pilot_ctx = Context::new(PILOT_BITS)?;
    let mut k = 64;
    let plans = loop {
        let pilot = LaurentTable::build(sys, m, k, &pilot_ctx)?;
        let plans: Vec<Option<SeriesPlan>> = atoms
            .iter()
            .map(|f| plan_from_pilot(&pilot, f, req.x_max, req.tol, req.min_bits))
            .collect::<Result<_>>()?;
        if plans.iter().all(Option::is_some) {
            break plans.into_iter().flatten().collect::<Vec<_>>();
        }
        if k >= 4096 {
            return Err(Error::Unconverged {
                x: alloc::format!("{}", req.x_max),
                last: alloc::format!("K = {k}"),
                tol: alloc::format!("{:e}", req.tol),
            });
        }
        k *= 2;
    };
    let joint = plans.iter().copied().reduce(SeriesPlan::join).expect("nonempty");
    let ctx = Context::new(joint.bits)?;
    let table = LaurentTable::build(sys, m, joint.order, &ctx)?;
    atoms
        .iter()
        .zip(plans)
        .map(|(f, plan)| {
            let series = table.series_for(f, joint.order, &ctx)?;
            Ok(AtomTransform { atom: f.clone(), series, plan })
        })
        .collect()
}

/// Indices of `atoms` grouped by degree, in ascending degree.
pub fn group_by_degree(atoms: &[TestFunction]) -> Vec<(u32, Vec<usize>)> {
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, f) in atoms.iter().enumerate() {
        groups.entry(f.degree).or_default().push(i);
    }
    groups.into_iter().collect()
}

/// Transforms for a whole family, in family order.
pub fn family_transforms(
    sys: &GammaFactorSystem,
    atoms: &[TestFunction],
    req: TransformRequest,
) -> Result<Vec<AtomTransform>> {
    let mut out: Vec<Option<AtomTransform>> = alloc::vec![None; atoms.len()];
    for (_, idx) in group_by_degree(atoms) {
        let group: Vec<TestFunction> = idx.iter().map(|&i| atoms[i].clone()).collect();
        for (i, t) in idx.into_iter().zip(degree_group(sys, &group, req)?) {
            out[i] = Some(t);
        }
    }
    Ok(out.into_iter().map(|t| t.expect("every atom is in a group")).collect())
}

/// Reassembles per-group results (as produced by [`degree_group`] over
/// [`group_by_degree`]) into family order.
pub fn scatter_groups(n: usize, groups: Vec<(Vec<usize>, Vec<AtomTransform>)>) -> Vec<AtomTransform> {
    let mut out: Vec<Option<AtomTransform>> = alloc::vec![None; n];
    for (idx, ts) in groups {
        for (i, t) in idx.into_iter().zip(ts) {
            out[i] = Some(t);
        }
    }
    out.into_iter().map(|t| t.expect("every atom is in a group")).collect()
}
