//! Critical-orbit, dynatomic and multiplier polynomials of the unicritical
//! family `f_λ(z) = z^d + λ`, together with the potential theory needed to
//! measure how their zeros equidistribute towards the bifurcation measure.

pub mod dynamics;
pub mod error;
pub mod exactpoly;
pub mod experiments;
pub mod measures;
pub mod ntheory;
pub mod rootfind;

pub use error::{Error, Result};
