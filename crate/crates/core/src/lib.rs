//! Spray geometry on the prolongation of a Lie algebroid, in one chart.
//!
//! Every coordinate object (lifts, prolongation brackets, the Berwald
//! connection of a spray, the vertical and h-Berwald differentials, Lie
//! derivations along projectable sections, and the curvature tensors built
//! from the Jacobi endomorphism) is a DAG of [`Field`]s. Identities between
//! them are evaluated as [`Residual`]s at sample points. Derivatives come
//! from truncated multivariate Taylor arithmetic, not finite differences.

pub mod algebroid;
pub mod connection;
pub mod curvature;
pub mod derivation;
pub mod expr;
pub mod field;
pub mod jet;
pub mod plan;
pub mod prolong;
pub mod residual;
pub mod sample;
pub mod symmetry;
pub mod tensor;

pub use algebroid::{AlgebroidStructure, BaseSection, PullbackSection, StructureError, VectorField};
pub use connection::{BerwaldConnection, Spray, SprayKind};
pub use curvature::{CurvatureSuite, ProjectiveDimension};
pub use derivation::{DerivationError, LieDerivation, ProjectableSection};
pub use expr::{parse, EvalError, Expr, ParseError};
pub use field::{Field, Space};
pub use jet::Jet;
pub use plan::{eval_jet, JetError, Plan};
pub use prolong::ProlongSection;
pub use residual::{Residual, ResidualStats};
pub use sample::Sampling;
pub use tensor::{CoTensor, Tensor};
