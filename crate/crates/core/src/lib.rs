//! Orthogonal discrete-phase temporal codes for multi-RIS pilot
//! transmission.
//!
//! The library has four layers:
//!
//! - [`cyclotomic`]: exact arithmetic over roots of unity, including an
//!   exact vanishing-sum test, so code verification never depends on a
//!   floating-point tolerance.
//! - [`codes`]: construction, verification, and length minimization of
//!   phase code matrices (DFT, Sylvester, Paley, conference, Kronecker,
//!   and catalog constructions).
//! - [`airlink`]: seeded link-level simulation of pilot transmission and
//!   despreading, plus quantized-benchmark codes and leakage metrics.
//! - [`locexp`]: a wideband localization experiment with per-path TOA
//!   extraction and least-squares multilateration.

pub mod airlink;
pub mod codes;
pub mod cyclotomic;
pub mod locexp;

pub use codes::{
    design_code, design_code_inf, design_code_with_p, minimal_p, verify_code, DesignOutcome,
    PhaseCodeMatrix,
};
