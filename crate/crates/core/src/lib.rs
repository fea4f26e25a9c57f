//! Classification of positive definite integral quadratic lattices of rank 3
//! and 4 into classes, spinor genera and genera.

pub mod arith;
pub mod cache;
pub mod data;
pub mod enumerate;
pub mod error;
pub mod input;
pub mod isometry;
pub mod lattice;
pub mod linalg;
pub mod mass;
pub mod padic;
pub mod spinor;
pub mod verify;
pub mod watson;

pub use error::{Error, Result};
pub use lattice::{form_to_lattice, lattice_to_form, ClassicalForm, GramLattice};
