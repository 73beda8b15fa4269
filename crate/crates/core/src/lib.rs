// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod design;
pub mod error;
pub mod experiment;
pub mod quad;
pub mod root;
pub mod scenario;
pub mod sim;
