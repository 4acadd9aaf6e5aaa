// NaN must fail the domain checks, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod camera;
pub mod cli;
pub mod codec;
pub mod cooltsn;
pub mod distributions;
pub mod error;
pub mod fixtures;
pub mod motion;
pub mod muscle;
pub mod palette;
pub mod recipe_io;
pub mod rng;
pub mod scenario;
pub mod stats;
pub mod variation;

pub use error::{Error, Result};
