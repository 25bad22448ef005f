//! Exact construction and verification of vector-valued Picard modular forms
//! on the unitary group `U(2,1)` attached to `Q(sqrt(-3))`, at the level of
//! truncated Fourier-Jacobi expansions over the Eisenstein integers.
//!
//! The crate has three layers:
//!
//! * exact algebra: [`cyclotomic`], [`eisenstein`], [`sections`], [`linalg`] —
//!   the coefficient field `Q(r)`, the ring `Z[r]`, and the graded section
//!   algebra `Q(r)[X,Y,Z]/(X^3 - r(Y^3-Z^3))` with its differential extension;
//! * analytic bootstrap: [`theta`] builds high-precision theta models of the
//!   sections `X, Y, Z`, evaluates the endomorphism operators `m_alpha` and the
//!   averaging operators `t_alpha`, and reconstructs them as exact data; the
//!   results are persisted by [`cache`];
//! * modular forms: [`fj`] (Fourier-Jacobi series, brackets, wedges,
//!   restriction to the modular curve), [`catalog`] (every named form and the
//!   identities between them), [`hecke`] (Hecke operators and eigenvalues) and
//!   [`structure`] (dimension formulas, module presentations, isotypic
//!   decompositions).

pub mod bigfloat;
pub mod cache;
pub mod cache_ensure;
pub mod catalog;
pub mod config;
pub mod cyclotomic;
pub mod eisenstein;
pub mod error;
pub mod fj;
pub mod hecke;
pub mod linalg;
pub mod sections;
pub mod structure;
pub mod textio;
pub mod theta;

pub use cyclotomic::Cyc;
pub use eisenstein::Eis;
pub use error::{Error, Result};
