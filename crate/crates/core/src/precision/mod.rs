mod complex;
pub mod gamma;
mod real;
mod testfn;

pub use complex::ExtComplex;
pub use gamma::{digamma, gamma, log_gamma};
pub use real::{bit_identical, rational_to_f64, Context, ExtReal};
pub use testfn::TestFunction;
