//! Period lattices of generalized Fermat curves
//! `C_{k,n}: x₀ᵏ + x₁ᵏ + x₂ᵏ = 0, λ₁x₀ᵏ + x₁ᵏ + x₃ᵏ = 0, …`.
//!
//! The pipeline enumerates the holomorphic forms ([`curve`]) and a finite
//! generating set of first homology ([`homology`]), evaluates the closed-form
//! period vectors from branch-point integrals ([`periods`], [`quad`],
//! [`contour`]), and extracts a ℤ-basis of the lattice they span
//! ([`lattice`]). [`oracle`] re-derives the same numbers by independent
//! routes.

pub mod cli;
pub mod contour;
pub mod curve;
pub mod error;
pub mod homology;
pub mod lattice;
pub mod oracle;
pub mod periods;
pub mod quad;
pub mod special;

pub use curve::{CurveSpec, FormIndex};
pub use error::{Error, Result};
pub use homology::HomologyWord;
pub use lattice::LatticeBasis;
pub use periods::PeriodMatrix;
pub use quad::QuadConfig;
