//! Spectral analysis of quadratic pencils of second-order difference
//! operators,
//!
//! ```text
//! a_n y_{n+1} + a_{n-1} y_{n-1} + (h_n + 2λ p_n + λ² - 2) y_n = 0,
//! ```
//!
//! with coefficients that are free outside a finite window.
//!
//! ```
//! use num_complex::Complex64;
//! use qpencil::pencil::CoefficientTriple;
//! use qpencil::spectrum::spectrum_report;
//!
//! let pencil = CoefficientTriple::single_site(0, Complex64::new(-3.0, 0.0));
//! let report = spectrum_report(&pencil, 1e-10).unwrap();
//! assert_eq!(report.eigenvalues.len(), 2);
//! ```
//!
//! The guide under `book/` walks through each module.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod jet;
pub mod jost;
pub mod pencil;
pub mod principal;
pub mod resolvent;
pub mod spectrum;
pub mod transforms;

pub use error::{Error, Result};

// Every chapter of the guide runs as a doctest.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/pencil.md")]
    mod pencil {}
    #[doc = include_str!("../../../book/src/jost.md")]
    mod jost {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/resolvent.md")]
    mod resolvent {}
    #[doc = include_str!("../../../book/src/principal.md")]
    mod principal {}
    #[doc = include_str!("../../../book/src/transforms.md")]
    mod transforms {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
