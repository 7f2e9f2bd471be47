//! Exact arithmetic on the algebraic Mukai lattice of a polarized K3 surface:
//! isometries, central-charge fixed points, wall enumeration along one-parameter
//! families of stability conditions, Kuznetsov-component lattices, and explicit
//! constructions of autoequivalence orbits.

pub mod atlas;
pub mod binary_form;
pub mod charge;
pub mod error;
pub mod isometry;
pub mod kuznetsov;
pub mod lattice;
pub mod matrix;
pub mod num;
pub mod surd;
pub mod walls;

pub use binary_form::binary_form_equivalent;
pub use error::{Error, Result};
pub use isometry::{compose, LatticeIsometry};
pub use lattice::{
    hodge_feasible, is_isotropic, is_spherical, pair, perp, square, DivisorClass, GramLattice,
    MukaiVector, Sublattice, SurfaceParams,
};
pub use surd::QuadSurd;
