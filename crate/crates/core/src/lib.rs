//! Numerical toolkit for the complex hyperbolic mass.
//!
//! The crate works in the global ball chart of complex hyperbolic space and
//! provides:
//!
//! * closed-form model metrics and finite-difference tensor calculus
//!   ([`model`]),
//! * the hyperbolic connections on `Λ²_J ⊕ T* ⊕ ℝ` and `T* ⊕ ℝ`, parallel
//!   transport, holonomy and the ambient picture in `ℂ^{m,1}`
//!   ([`connection`], [`ambient`]),
//! * Clifford algebra on `⊕ Λ^{0,k}` and the explicit Kählerian Killing
//!   spinor families ([`spinor`], [`killing`]),
//! * U(m)-invariant Kähler metrics built from momentum profiles
//!   ([`profile`]),
//! * the boundary-integral mass functional with sphere quadrature and
//!   extrapolation ([`mass`]).
//!
//! Everything is `no_std` (with `alloc`); IO and orchestration live in the
//! `chmass` crate.

#![no_std]
// `num_traits::Float` supplies f64 math without std; it looks unused whenever
// std is linked elsewhere in the build graph.
#![allow(unused_imports)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::too_many_arguments)]

extern crate alloc;

pub mod ambient;
pub mod connection;
pub mod error;
pub mod extrapolate;
pub mod fd;
pub mod killing;
pub mod linalg;
pub mod mass;
pub mod model;
pub mod ode;
pub mod profile;
pub mod quadrature;
pub mod spinor;

pub use error::{GeomError, Result};
pub use linalg::{Mat, Vector};
