//! Exact verification engine for the algebraic relation attached to the
//! Pachner move 3→3 on four-manifold triangulations, built on affine
//! volume-preserving geometry in ℝ³.
//!
//! Six labelled points A…F carry the combinatorics of the move: the three
//! 4-simplices around the 2-face ABC are traded for the three around DEF.
//! All ℝ³ quantities (oriented tetrahedron volumes, vector transports,
//! holonomies, deficit-angle components ω, the λ-parametrization, and the
//! Jacobi determinants of the main relation) are computed over exact
//! arbitrary-precision rationals, so every identity is tested for literal
//! equality — no tolerances. Derivatives are exact too, via first-order
//! dual numbers, cross-checked against an independent expression-tree
//! differentiator.
//!
//! The companion Euclidean relation in ℝ⁴ (dihedral angles, deficit angles,
//! and the differential identity under edge-length perturbations) is
//! floating-point and lives in [`euclidean4`].
//!
//! The [`runner`] module drives seeded randomized trials over all checks and
//! emits a deterministic JSON report; the `pachner33` binary is its CLI.

pub mod combinatorics;
pub mod euclidean4;
pub mod geometry3;
pub mod jacobians;
pub mod lambda_omega;
mod linalg;
pub mod runner;
pub mod scalars;
pub mod symdiff;

pub use scalars::{DualScalar, ExactScalar, Scalar};
