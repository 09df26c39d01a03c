//! Exact and numeric computation engine for the dimer model on the m×n
//! triangular lattice on the torus.
//!
//! The crate constructs the four Kasteleyn matrices, computes their
//! Pfaffians symbolically and numerically in exact arithmetic, decomposes
//! the partition function by homology class, and verifies the sign pattern
//! of the Pfaffians, the Kasteleyn identities, the small-weight leading
//! terms, and the asymptotic free-energy formula.

pub mod asymptotics;
pub mod cli;
pub mod golden;
pub mod kasteleyn;
pub mod lattice;
pub mod oracle;
pub mod polyring;

pub use kasteleyn::{EdgeWeights, Orientation};
pub use lattice::TorusLattice;
pub use polyring::TriPoly;
