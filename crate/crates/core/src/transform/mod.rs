//! The dual transform F of a test function, defined through
//! MF(s) = ε G(s)/G(1−s) · Mf(1−s), evaluated by its residue series and
//! checked by direct Mellin inversion.

mod gamma_factor;
mod plan;
mod quadrature;
mod series;

pub use gamma_factor::GammaFactorSystem;
pub use plan::{plan_from_pilot, plan_series, SeriesPlan, PILOT_BITS};
pub use quadrature::{quadrature_f, quadrature_f_many, QuadratureSamples, QuadratureSpec, QuadratureValue};
pub use series::{
    circle_nodes, evaluate_f, residue_series, FValue, LaurentTable, PoleLaurent, SeriesTerm, TransformSeries,
    CIRCLE_RADIUS,
};
