//! Entropy-based quantification of attribute interactions in categorical data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cluster;
pub mod data;
pub mod error;
pub mod info;
pub mod prob;
pub mod report;
pub mod search;
pub mod significance;
pub mod synth;
pub mod viz;

pub use error::{Error, Result};
