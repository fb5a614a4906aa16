//! Binary logistic regression for survey-style data.
//!
//! The pipeline mirrors how a small econometric survey is analysed:
//! ingest a typed CSV ([`data_model`]), screen predictors by coefficient of
//! variation, fit the logit model by Newton/IRLS ([`estimator`]), then
//! report Wald and likelihood-ratio tests ([`inference`]) alongside
//! Pearson, deviance and Hosmer-Lemeshow goodness of fit and concordance
//! measures ([`diagnostics`]). The [`simulator`] module generates data from
//! a known logistic law and hosts the brute-force oracles used to check the
//! estimator.

// NaN-rejecting guards are written as negated comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data_model;
pub mod diagnostics;
mod error;
pub mod estimator;
pub mod inference;
pub mod linalg;
pub mod logit_core;
pub mod reference;
pub mod simulator;
pub mod special;

pub use data_model::{Dataset, DescriptiveStats, FrequencyTable, Role, VariableSpec};
pub use error::{Error, Result};
pub use estimator::{fit, FitConfig, FitResult};
pub use logit_core::{CoefficientVector, Probability};
