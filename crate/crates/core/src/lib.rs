//! Exact computations with type-A Hessenberg varieties: point counts over
//! finite fields, Poincaré polynomials by three independent routes,
//! irreducibility, symbolic patch determinants, and Schubert singular loci.

pub mod cache;
pub mod census;
pub mod cli;
pub mod closedform;
pub mod error;
pub mod ffla;
pub mod hesscore;
pub mod multipoly;
pub mod patches;
pub mod paving;
pub mod qpoly;
pub mod symgrp;

pub use error::{Error, Result};
