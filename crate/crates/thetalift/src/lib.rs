//! Exact and numerical machinery for theta lifts between Maass forms and
//! half-integral weight forms: metaplectic cocycles, matrix lattices and their
//! theta kernels, cusp geometry of `Γ₀(4/p)`, special functions and the
//! quadrature identities built on them.

pub mod arith;
pub mod automorphic;
pub mod dd;
pub mod finite_geom;
pub mod lattices;
pub mod metaplectic;
pub mod special;
pub mod theta;

pub use arith::{GroupSpec, Mat2, UpperHalfPoint};
