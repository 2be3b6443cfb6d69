//! Lie algebroids in local coordinates: construction, verification,
//! bicocycle double cross product decomposition, and the reversible and
//! dissipative dynamics they generate.

pub mod algebroid;
pub mod bdcp;
pub mod dynamics;
pub mod expr;
pub mod field;
pub mod io;
pub mod scenarios;
pub mod tensor;
pub mod verifier;
