//! Exact arithmetic for umbral calculus over local fields of positive
//! characteristic.
//!
//! Everything is computed over the rational function field F_q(x) with the
//! x-adic valuation; no floating point, no approximation. The layers:
//!
//! - [`gf`]: the finite field F_q, q = p^nu, with a deterministic modulus.
//! - [`poly`], [`ratfn`]: polynomials and canonical rational functions.
//! - [`carlitz`]: brackets [i] = x^{q^i} - x, factorials D_i and L_i,
//!   K-binomial coefficients, the Carlitz polynomials e_i and f_i, and the
//!   Carlitz module action.
//! - [`linpoly`]: F_q-linear polynomials in t (supported on exponents q^j)
//!   and the twisted operator algebra acting on them.
//! - [`umbral`]: delta operators delta = sum sigma_l tau^l d/dt, their basic
//!   sequences of K-binomial type, Taylor expansions, and orthonormality.
//! - [`genfun`]: generating functions in the tau-composition ring and the
//!   exp/log pair attached to a delta operator.
//! - [`laurent`]: truncated Laurent series at x = 0 for evaluating the
//!   function-field exponentials on concrete points.
//! - [`parse`]: a small expression grammar for rational functions, used by
//!   the command line tools and the serialized output formats.

pub mod carlitz;
pub mod cli;
pub mod error;
pub(crate) mod frac;
pub mod genfun;
pub mod gf;
pub mod laurent;
pub mod linpoly;
pub mod parse;
pub mod poly;
pub mod ratfn;
pub mod umbral;

pub use error::{Error, Result};
pub use gf::{FieldSpec, FqElem};
pub use poly::Poly;
pub use laurent::LaurentSeries;
pub use linpoly::{BiLinPoly, LinPoly};
pub use genfun::FormalLinSeries;
pub use ratfn::{RatFn, ValExp};
pub use umbral::{BasicSequence, DeltaOperator, SigmaSpec};
