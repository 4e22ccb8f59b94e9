//! Exact coefficients of the symmetric square lift of the discriminant
//! form, extended-precision special functions, the residue-series
//! construction of the dual transform F, and the truncated Voronoi-type
//! identities and linear systems built from them.
#![no_std]

extern crate alloc;

pub mod error;
pub mod exact;
pub mod identity;
pub mod precision;
pub mod transform;

pub use error::{Error, Result};
