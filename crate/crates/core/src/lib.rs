//! Matrix-function calculus for Hermitian operators, with executable checks of
//! operator inequalities for operator monotone and operator convex functions.
//!
//! The crate is organised bottom-up:
//!
//! - [`hermitian`]: Hermitian matrices, the Jacobi eigensolver, `f(A)` and the
//!   PSD order.
//! - [`catalog`] and [`representation`]: scalar functions with class tags and
//!   integral representations.
//! - [`lab`]: Löwner-matrix certificates, upper half-plane scans and the
//!   composition criterion.
//! - [`inequalities`]: one verifier per operator inequality.
//! - [`sampler`]: seeded instance generation and counterexample shrinking.
//! - [`suites`] and [`runner`]: named reproducible suites, reports and replay.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod domain;
pub mod error;
pub mod hermitian;
pub mod inequalities;
pub mod lab;
pub mod matrix;
pub mod matrix_json;
pub mod quadrature;
pub mod report;
pub mod representation;
pub mod runner;
pub mod sampler;
pub mod suites;

pub use catalog::{apply_function, catalog_list, complex_sample, ClassTag, ScalarFunctionSpec};
pub use domain::Interval;
pub use error::{Error, Result};
pub use hermitian::{
    leq, psd_check, resolvent_product, symmetrized_product, HermitianMatrix, PsdCertificate, Spectrum, Verdict,
};
pub use inequalities::{Check, ContractionFamily, SpectralWindow};
pub use lab::{loewner_certificate, order_n_monotone, pick_scan, GridSpec, LoewnerMatrix, PickReport};
pub use matrix::Matrix;
pub use matrix_json::MatrixJson;
pub use report::SuiteReport;
pub use representation::{reconstruct, IntegralRepresentation};
pub use runner::{replay, run, Format, RunConfig, RunReport};
pub use sampler::{generate, shrink, Instance, InstanceKind, InstanceSpec};
pub use suites::{run_suite, SuiteConfig, SUITES};
