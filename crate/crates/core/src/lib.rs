//! Approximate geodesics of Kähler metrics on the flat torus `T² = R²/Z²`.
//!
//! A real Hamiltonian `H` generates the vector field `X_H`; continuing its
//! flow to imaginary time `τ = it` and pulling back the coordinate gives the
//! conformal factor `h(t)` of the evolving metric. The pipeline is exact up
//! to the truncated series `Σ a_k t^k` and switches to `f64` only for
//! lattice evaluation.
//!
//! ```
//! use kgflow_core::hparse::parse_hamiltonian;
//! use kgflow_core::moser::{eval_conformal, ConformalSeries, EvalMode};
//!
//! let h = parse_hamiltonian("(1/8)*(sin(pi*x)^2 + sin(pi*y)^2)^2").unwrap();
//! let cs = ConformalSeries::build(&h, 4).unwrap();
//! let v = eval_conformal(&cs, 0.5, 0.5, 0.05, EvalMode::Rational);
//! assert!(v.h > 0.0);
//! ```

pub mod error;
pub mod hamflow;
pub mod hparse;
pub mod lattice;
pub mod moser;
pub mod trigpoly;

pub use error::{Error, Result};

/// Version string written into output metadata.
pub const VERSION: &str = concat!("kgflow ", env!("CARGO_PKG_VERSION"));
