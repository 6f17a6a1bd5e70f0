//! Jet schemes of affine varieties, presented by explicit equations, with
//! exact (Gröbner-backed) verification of ring maps and isomorphism
//! certificates between them.
//!
//! The crate is organized bottom-up:
//!
//! - [`poly`]: exact multivariate polynomials over Q, parsing and printing.
//! - [`groebner`]: Buchberger's algorithm, normal forms, smoothness tests.
//! - [`jets`]: jet-scheme equations, grading checks, truncation and zero
//!   section maps, the fiber over the zero section.
//! - [`morphism`]: ring maps, isomorphism certificates, cotangent frames,
//!   prolongation isomorphisms and descent of graded isomorphisms.
//! - [`format`]: the line-oriented file formats for varieties, maps,
//!   certificates and frames.

pub mod corpus;
pub mod format;
pub mod groebner;
pub mod jets;
pub mod linalg;
pub mod morphism;
pub mod poly;
pub mod presentation;

pub use poly::{parse, Context, Monomial, PolyError, Polynomial, Rational, Variable};
pub use presentation::Presentation;
