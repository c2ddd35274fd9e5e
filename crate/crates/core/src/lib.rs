//! Combinatorial Heegaard Floer homology ranks over F2 from nice diagrams
//! built out of abstract open books, together with the Dehn twist exact
//! sequence realized at the chain level: the mapping-cone differential, the
//! connecting chain map, and the kernel/image ranks it shares with the
//! surgery cobordism map.
//!
//! The main entry points:
//! - [`openbook`] builds diagrams from abstract open books and applies
//!   monodromy as Dehn twists;
//! - [`floer`] enumerates generators and counts empty bigons and rectangles
//!   in nice diagrams;
//! - [`homology`] is the F2 homological algebra layer;
//! - [`pipeline`] orchestrates the full Dehn twist sequence report;
//! - [`grid`] is the independent grid-diagram oracle for knots in the
//!   three-sphere.

pub mod diagram;
pub mod intlin;
pub mod error;
pub mod f2;
pub mod fixtures;
pub mod floer;
pub mod grid;
pub mod homology;
pub mod nicify;
pub mod openbook;
pub mod pipeline;
pub mod surface;

pub use diagram::HeegaardDiagram;
pub use f2::F2Matrix;
pub use homology::{ChainComplexF2, ChainMapF2};
pub use surface::{ArcId, CurveId, Family, Mesh, RegionId, VertexId};
