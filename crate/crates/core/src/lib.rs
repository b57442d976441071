//! Exact arithmetic in free nilpotent Lie algebras and truncated free
//! nilpotent groups, and the crossed homomorphisms built on top of them.
//!
//! The crate is organized bottom-up:
//!
//! - [`freelie`] — free nilpotent Lie algebras over ℚ: Hall bases, brackets,
//!   grading, structure constants, and the truncated free associative
//!   (tensor) algebra used as the computational backend.
//! - [`nilgroup`] — the truncated free nilpotent group in exponential
//!   coordinates: the Baker–Campbell–Hausdorff star product, evaluation of
//!   free-group words, extension of free-group endomorphisms to Lie algebra
//!   automorphisms, and the Andreadakis filtration test.
//! - [`latticecalc`] — the lattice Λ spanned by logarithms of group elements,
//!   integer-valued polynomial decompositions, and denominator bounds.
//! - [`polychain`] — polynomial straightening of group-homology simplices.
//! - [`vmap`] — the Lie algebra chain complex and the integration map `v`
//!   sending straightened chains to multivector chains.
//! - [`johnson`] — the Johnson homomorphism δ_k, its crossed-homomorphism
//!   extension dξ_S, and the surface (symplectic) specializations.
//! - [`morita`] — bar-complex chains of the free group, the boundary solver
//!   built from Fox derivatives, and the polynomial-straightening extension
//!   ε_k of the Morita homomorphisms.
//!
//! All coefficients are arbitrary-precision rationals; no floating point is
//! used anywhere in the computational pipeline.

pub mod error;
pub mod exec;
pub mod freelie;
pub mod johnson;
pub mod latticecalc;
pub mod linalg;
pub mod morita;
pub mod nilgroup;
pub mod poly;
pub mod polychain;
pub mod rat;
pub mod verify;
pub mod vmap;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
