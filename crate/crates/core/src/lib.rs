//! Inexact sGS-ADMM solver for generalized distance weighted discrimination
//! (DWD) on sparse, high-dimensional data.
//!
//! The crate is organised bottom-up: [`linalg`] provides the sparse and
//! dense kernels, [`subsolvers`] the three backends for the inner linear
//! system plus the scalar Newton solver, [`solver`] the ADMM loop with its
//! residuals and parameter rules, and [`ingest`] the LIBSVM reader and model
//! files. [`pipeline`] ties them together.

pub mod error;
pub mod ingest;
pub mod linalg;
pub mod pipeline;
pub mod solver;
pub mod subsolvers;

pub use error::{Error, Result};
pub use pipeline::{train_dataset, train_file, TrainOptions, TrainReport};
