//! Discrete stratified Morse theory on finite simplicial complexes.

pub mod complex;
pub mod error;
pub mod fixtures;
pub mod homology;
pub mod io;
pub mod maximal;
pub mod morse;
pub mod pointdata;
pub mod random;
pub mod registry;
pub mod separating;
pub mod simplify;
pub mod strat;
pub mod stratify;
pub mod verify;

pub use complex::{build_complex, Complex, ScalarField, Simplex, SimplexId, SimplexSet};
pub use error::{Error, Result};
pub use morse::VectorField;
pub use strat::Stratification;
