// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beurling;
pub mod cli;
pub mod contour;
pub mod dd;
pub mod dirichlet;
pub mod growth;
pub mod quadrature;
pub mod report;
pub mod special_functions;
pub mod sum;
pub mod uniqueness;
