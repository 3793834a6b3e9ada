//! Exact homology of the Lie superalgebra `Λ•g` built from a Lie algebra `g`
//! by the Schouten-like bracket.
//!
//! ```
//! use superhomology::{algebra::{catalog_get, Bindings}, exterior::GeneratorSystem, homology::betti_row};
//!
//! let sc = catalog_get("heis3", &Bindings::new()).unwrap();
//! let gs = GeneratorSystem::canonical(&sc);
//! assert_eq!(betti_row(&gs, 3).betti, vec![0, 3, 10, 11, 4]);
//! ```

pub mod algebra;
pub mod chain;
pub mod error;
pub mod exterior;
pub mod homology;
pub mod ranklin;

pub use algebra::{Bindings, Rational, StructureConstants};
pub use chain::{Chain, SuperMonomial};
pub use error::{Error, Result};
pub use exterior::{GeneratorSystem, Multivector};
pub use homology::{BettiRow, BettiTable};
pub use ranklin::RationalMatrix;
