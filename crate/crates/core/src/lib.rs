#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cosim;
pub mod dynamics;
pub mod error;
pub mod geom;
pub mod mapbuild;
pub mod roadnet;
pub mod safety;
pub mod scenario;
pub mod stats;
pub mod traffic;

pub use error::{Error, Result};
