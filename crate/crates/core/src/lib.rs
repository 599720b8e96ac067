//! Exact-arithmetic workbench for higher-order Fourier analysis on `F_p^n`
//! and for stabilizer-rank experiments on qudit magic states.
//!
//! Everything in this crate is computed over exact representations:
//! prime-field residues, `p`-power-denominator torus values, and elements
//! of the cyclotomic field `Q(ζ_m)` with arbitrary-precision rational
//! coefficients. Inequalities between real quantities are decided with
//! certified interval arithmetic on top of the exact values; there are no
//! floating-point fast paths and no tolerances anywhere in a result that
//! this crate reports as verified.
//!
//! The main pieces:
//!
//! - [`ff`]: prime-field scalars/vectors, the natural lift `|·|`, and
//!   exact linear algebra over `F_p`.
//! - [`torus`]: values in the `p`-power torsion of `R/Z`, the codomain of
//!   nonclassical polynomials.
//! - [`cyclo`]: the field `Q(ζ_m)` with exact arithmetic and conjugation.
//! - [`interval`]: certified rational intervals for sign decisions.
//! - [`poly`]: nonclassical polynomials in their unique global coefficient
//!   representation, with evaluation, derivatives, degree and
//!   interpolation.
//! - [`subspace`]: affine subspaces of `F_p^n` in canonical form, lattice
//!   operations and the constant-membership-pattern subspace construction.
//! - [`fourier`]: the exact Fourier transform over `F_p^n`, correlation
//!   magnitudes and exhaustive quadratic scans.
//! - [`stab`]: stabilizer states in `(H, Q)` normal form, exhaustive
//!   catalogs and magic states.
//! - [`rank`]: polynomial rank, Fourier rank and stabilizer rank, all with
//!   re-verifiable certificates.
//! - [`suites`]: the end-to-end verification suites driven by the CLI and
//!   the acceptance tests.
//!
//! # Quick start
//!
//! ```
//! use stabrank_core::rank::{stab_rank_exact, verify_certificate, SearchOutcome};
//! use stabrank_core::stab::{enumerate_stabilizers, magic_state};
//!
//! // All 6 single-qubit stabilizer states, checked against p^n·Π(p^k+1).
//! let catalog = enumerate_stabilizers(2, 1)?;
//! assert_eq!(catalog.len(), 6);
//!
//! // The magic state |0⟩ + ζ_8|1⟩ (normalization symbolic) needs exactly
//! // two of them; the witness ships with an independently checkable
//! // certificate and an exhaustive refutation of the single-state case.
//! let target = magic_state(2, 1, None)?;
//! match stab_rank_exact(&target, &catalog, 3)? {
//!     SearchOutcome::Found { rank, certificate } => {
//!         assert_eq!(rank, 2);
//!         assert!(verify_certificate(&certificate, 128)?.ok);
//!     }
//!     SearchOutcome::Exhausted { .. } => unreachable!(),
//! }
//! # Ok::<(), stabrank_core::Error>(())
//! ```

pub mod cyclo;
pub mod error;
pub mod ff;
pub mod fourier;
pub mod interval;
pub mod poly;
pub mod rank;
pub mod stab;
pub mod subspace;
pub mod suites;
pub mod torus;

pub use cyclo::{phase, CycloNumber};
pub use error::Error;
pub use ff::{lift_identity_f2, lift_identity_f3, nat_lift, FpMatrix, FpScalar, FpVector};
pub use fourier::PhaseTable;
pub use interval::RatInterval;
pub use poly::{FunctionTable, NonclassicalPoly};
pub use stab::{Catalog, StabilizerState, StateVector};
pub use subspace::{AffineFunctional, AffineMap, AffineSubspace};
pub use torus::TorusValue;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
