//! Incidence algebras `I(X, R)` of finite preordered sets over finite rings,
//! and their groups of multiplicative automorphisms.
//!
//! The crate is organised bottom-up:
//!
//! * [`ring`]: finite coefficient rings and their central units;
//! * [`preorder`]: preorders and the quotient partial order;
//! * [`graph`]: the comparability graph, spanning trees and fundamental cycles;
//! * [`algebra`]: incidence functions, convolution, units and conjugation;
//! * [`mult`]: multiplicative automorphisms as weight systems;
//! * [`oracle`]: brute-force cross-checks on small instances;
//! * [`formats`]: the text and JSON file formats.

pub mod algebra;
pub mod error;
pub mod formats;
pub mod graph;
pub mod instances;
pub mod mult;
pub mod oracle;
pub mod preorder;
pub mod ring;
pub mod sample;

pub use algebra::{IncidenceAlgebra, IncidenceFunction};
pub use error::{Error, Result};
pub use graph::{ComparabilityGraph, Edge, FundamentalCycle, SemiPath, SpanningTree};
pub use mult::{Decomposition, Innerness, Potential, WeightSpace, WeightSystem};
pub use preorder::{Preorder, QuotientPoset};
pub use ring::{CentralUnitGroup, Ring, RingElement, RingMatrix, RingSpec};
