//! Command-line and HTTP front-ends for the vehicle decision pipeline.

pub mod api;
pub mod cli;
pub mod error;
pub mod ops;
pub mod report;
