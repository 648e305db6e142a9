//! Exact arithmetic for q-expansions of modular functions, with the operators
//! needed to study p-adic annihilation of genus-zero Hauptmoduln:
//!
//! - [`qseries`]: truncated Laurent series over arbitrary-precision rationals,
//!   the U_p / V_m operators, p-adic valuations, and reductions mod p^k;
//! - [`forms`]: Dedekind eta quotients, Eisenstein series, the j-function,
//!   and the Atkin–Lehner slash action on symbolic level-1 combinations;
//! - [`catalog`]: n|h+e,... group-symbol algebra and a registry of Hauptmodul
//!   q-expansions (eta quotients, Fricke symmetrizations, formal roots,
//!   coefficient files);
//! - [`annihilation`]: valuation sequences v_p(T|U_p^n) and checkers for the
//!   compression, functional-equation, and congruence identities;
//! - [`moonshine`]: character tables over quadratic extensions, multiplicity
//!   generating functions via Schur orthogonality, and the p-adic moonshine
//!   feasibility checks.
//!
//! All arithmetic is exact; there is no floating-point mode.  Every series
//! carries an explicit precision window `[low, high)` and every operation
//! propagates the tightest provable window, so each congruence verified here
//! is a statement about a named finite set of coefficients.

pub mod annihilation;
pub mod catalog;
pub mod forms;
pub mod moonshine;
pub mod numutil;
pub mod qseries;
pub mod report;

pub use qseries::LaurentSeries;

/// Arbitrary-precision integer used for all coefficient arithmetic.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational used for all coefficient arithmetic.
pub type Rat = num_rational::BigRational;
