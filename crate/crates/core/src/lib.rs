//! Numerical construction and verification of breather and rogue-wave
//! gradient fields for semilinear curl-curl wave equations.
//!
//! The pipeline: phase-plane analysis of three reduced oscillator ODEs
//! ([`phase_plane`]), their period functions and monotone inverses
//! ([`period_maps`]), geometric profiles satisfying the eikonal-type
//! compatibility condition ([`geometry`]), assembly of vector-valued wave
//! fields ([`synthesis`]), and quantitative checks ([`verification`]).

pub mod error;
pub mod expr;
pub mod geometry;
pub mod ode;
pub mod period_maps;
pub mod phase_plane;
pub mod quad;
pub mod roots;
pub mod synthesis;
pub mod verification;

pub use error::{Error, Result};
