//! Anticyclotomic p-adic L-functions of elliptic curves at an additive prime
//! with semistable reduction over an abelian extension, definite case.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod brandt;
pub mod cmtheta;
pub mod error;
pub mod evaluate;
pub mod ellcurve;
pub mod lattice;
pub mod pipeline;
pub mod loracle;
pub mod quadorders;
pub mod quatorders;

pub use error::{Error, Result};
