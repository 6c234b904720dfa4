//! Filtered DGAs, action-filtered chain complexes, mapping cones, and persistence barcodes
//! over prime fields, with the Legendrian ℝPⁿ computation as a worked example.

pub mod action;
pub mod algebra;
pub mod barcode;
pub mod bounds;
pub mod complex;
pub mod dga;
pub mod error;
pub mod field;
pub mod gen;
pub mod grading;
pub mod io;
pub mod lemmas;
pub mod matrix;
pub mod pwc;
pub mod rabinowitz;
pub mod transform;

pub use action::{Action, Q};
pub use algebra::{Flavor, FreeElement, Generator};
pub use dga::FilteredDGA;
pub use error::{Error, Result};
pub use field::Fp;
pub use matrix::Matrix;
