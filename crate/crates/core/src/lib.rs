//! Periagroups and their mediangle Cayley graphs at desk scale.

pub mod action;
pub mod cayley;
pub mod embedding;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod hyperplanes;
pub mod par;
pub mod pipeline;
pub mod presentation;
pub mod quasicube;
pub mod separability;
pub mod verify;
pub mod word;

pub use cayley::{CayleyBall, EdgeLabel};
pub use error::{Error, Result};
pub use graph::{DistanceMatrix, Graph};
pub use hyperplanes::{Angle, ConvexEvenCycle, Hyperplane, Hyperplanes, Relation};
pub use presentation::{parse_presentation, FiniteGroupTable, PeriagroupSpec, PresentationError, VertexType};
pub use word::{GroupEnumeration, Letter, Periagroup, Word, WordError};
pub use verify::{AxiomReport, AxiomResult, AxiomStatus};
pub use quasicube::{quasi_cubulate, QmGraph, SpaceWithPartitions};
pub use action::{analyse, compute_obs, decompose, ActionReport, Clause, ObstructionSet};
pub use embedding::{build_target, verify_embedding, CrossingWord, GraphProductTarget, PiMinus};
pub use separability::{cross_set, verify_cross_double_coset, virtual_retract_witness, CrossSet};
