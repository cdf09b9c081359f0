//! Pseudospectral solver and Besov-Morrey verification toolkit for the
//! time-space fractional Keller-Segel-Navier-Stokes system on a periodic torus.

pub mod config;
pub mod error;
pub mod profiles;
pub mod quad;
pub mod solver;
pub mod spaces;
pub mod spectral;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/special-functions.md")]
    mod special_functions {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/configuration.md")]
    mod configuration {}
}
