//! Construction and spectral comparison of flat bordered surfaces glued from
//! copies of a polygonal tile along the coset structure of a finite group.
//!
//! The pipeline: a group with two subgroups whose coset representations are
//! isomorphic (`group`, `rep_theory`) yields two edge-labeled gluing graphs
//! (`schreier`), each of which turns a polygonal tile into a flat surface
//! (`tiler`).  Discrete Laplacians on those surfaces (`spectral`) have equal
//! Neumann spectra, witnessed operator-to-operator by an explicit intertwining
//! matrix (`transplant`), while Dirichlet spectra tell the two surfaces apart.

pub mod error;
pub mod group;
pub mod rep_theory;
pub mod schreier;
pub mod spectral;
pub mod tiler;
pub mod transplant;

pub use error::{Error, Result};
