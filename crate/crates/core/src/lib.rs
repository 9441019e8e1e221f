//! Criterion weighting with the best-worst method and alternative ranking
//! with TOPSIS, plus a total-cost-of-ownership model and the pipeline that
//! ties them together.

pub mod bwm;
pub mod domain;
pub mod pipeline;
pub mod tco;
pub mod topsis;

pub use domain::*;
