//! Choice of residue order and working precision for a target argument
//! range, from a low-precision pilot series.

use super::gamma_factor::GammaFactorSystem;
use super::series::LaurentTable;
use crate::error::{Error, Result};
use crate::precision::{Context, TestFunction};

/// Precision of pilot tables.
pub const PILOT_BITS: usize = 128;
const MAX_ORDER: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesPlan {
    /// Residue order K.
    pub order: usize,
    /// Working precision for building and evaluating the series.
    pub bits: usize,
    /// log2 of the largest term on the argument range.
    pub peak_log2: i64,
}

impl SeriesPlan {
    /// Covers both plans.
    pub fn join(self, other: SeriesPlan) -> SeriesPlan {
        SeriesPlan {
            order: self.order.max(other.order),
            bits: self.bits.max(other.bits),
            peak_log2: self.peak_log2.max(other.peak_log2),
        }
    }
}

/// Plan from an existing pilot table of the right degree. `None` when the
/// pilot is too short to see the terms fall below tolerance.
pub fn plan_from_pilot(
    pilot: &LaurentTable,
    f: &TestFunction,
    x_max: f64,
    tol: f64,
    min_bits: usize,
) -> Result<Option<SeriesPlan>> {
    if !(x_max > 0.0) || !(tol > 0.0) {
        return Err(Error::Invalid("planning needs x_max > 0 and tol > 0".into()));
    }
    let ctx = Context::new(pilot.precision_bits)?;
    let series = pilot.series_for(f, pilot.order, &ctx)?;
    let mags = series.term_log2(x_max.max(1.0));
    let goal = libm::log2(tol) - 10.0;
    let peak_at = mags.iter().enumerate().fold(0, |best, (i, v)| if *v > mags[best] { i } else { best });
    let peak = mags[peak_at];
    // first index past the peak from which every term stays below goal
    let mut cut = None;
    for i in (peak_at..mags.len()).rev() {
        if mags[i] >= goal {
            break;
        }
        cut = Some(i);
    }
    let Some(i) = cut.filter(|&i| i + 8 < mags.len()) else { return Ok(None) };
    let exponent = series.terms[i].exponent as i64;
    let max_shift = pilot.system.max_shift();
    let order = ((exponent - max_shift).max(0) as usize).div_ceil(2) + 8;
    let n = libm::log2(mags.len() as f64);
    let need = peak - libm::log2(tol) + n + 24.0;
    let bits = (libm::ceil(need).max(min_bits as f64) as usize).div_ceil(32) * 32;
    Ok(Some(SeriesPlan { order, bits, peak_log2: libm::ceil(peak) as i64 }))
}

/// Smallest K (with a margin) whose omitted terms at x ≤ x_max are below
/// tol·2^{−10} past the peak, and a precision that absorbs the
/// cancellation down from the peak term.
pub fn plan_series(
    sys: &GammaFactorSystem,
    f: &TestFunction,
    x_max: f64,
    tol: f64,
    min_bits: usize,
) -> Result<SeriesPlan> {
    let pilot_ctx = Context::new(PILOT_BITS)?;
    let mut k = 64;
    loop {
        let pilot = LaurentTable::build(sys, f.degree, k, &pilot_ctx)?;
        if let Some(plan) = plan_from_pilot(&pilot, f, x_max, tol, min_bits)? {
            return Ok(plan);
        }
        if k >= MAX_ORDER {
            return Err(Error::Unconverged {
                x: alloc::format!("{x_max}"),
                last: alloc::format!("K = {k}"),
                tol: alloc::format!("{tol:e}"),
            });
        }
        k *= 2;
    }
}
