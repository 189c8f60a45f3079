//! Exact truncated hbar-adic series and the identity checks built on them for
//! quantum affine vertex algebras: deformation data, generator-level braiding
//! and coproduct tables, q-structure constants and a Heisenberg Fock model.

pub mod series;
pub mod fock;
pub mod genspace;
pub mod par;
pub mod report;
pub mod structconst;
pub mod tau;
