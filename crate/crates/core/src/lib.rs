#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod exec;
pub mod export;
pub mod field;
pub mod geometry;
pub mod measure;
pub mod oracle;
pub mod quadrature;
pub mod regime;
pub mod roots;
pub mod signed_balayage;
pub mod verify;
