//! Edge-indexed graphs with finite volume ("diagrams"): measures, Laplace
//! spectra, Cheeger constants, gap certificates, tree combinatorics and
//! universal covers.

pub mod cheeger;
pub mod cover;
pub mod diagram;
pub mod format;
pub mod generators;
pub mod hecke;
pub mod report;
pub mod spectral;

pub use diagram::{int, ratio, Diagram, DiagramError, DiagramSpec, IndexedGraph, Rational};
