//! Stochastic matching on compatibility graphs.
//!
//! Items of classes `V` arrive one by one and are matched in pairs along the
//! edges of a fixed compatibility graph `G = (V, E)`. The crate provides:
//!
//! * the graph analyses the stability theory relies on (independent sets,
//!   bipartiteness, separability, spanning odd cycles),
//! * arrival-stream generators and the exact-rational stability condition
//!   `mu(I) < mu(E(I))`,
//! * every standard matching policy (first/last come first matched, match the
//!   longest/shortest, priority, uniform and custom random policies) as pure
//!   state-transition maps on queue words and class-count vectors,
//! * trajectory engines for the natural chain and the backwards/forwards
//!   detailed chains, with word transforms and admissibility checks,
//! * exact computation of the product-form stationary law of first come,
//!   first matched, its normalizing constant, and algebraic verification of
//!   the reversibility identity and global balance,
//! * property-test engines for sub-additivity and non-expansiveness,
//! * constructive erasing words and their verifiers,
//! * a coupling-from-the-past perfect sampler and finite-window stationary
//!   perfect matchings.
//!
//! Verification paths use exact rational arithmetic throughout; floating
//! point appears only in Monte-Carlo estimation.

pub mod chain;
pub mod coupling;
pub mod erasing;
pub mod error;
pub mod graph;
pub mod input;
pub mod policy;
pub mod productform;
pub mod properties;
pub mod rational;

pub use chain::{DetailedLetter, DetailedWord, MatchingRecord, Trajectory, TrajectoryStep};
pub use coupling::{EvenState, Parity, PerfectMatchingWindow, PerfectSample, RenovationWitness};
pub use erasing::{Coverage, ErasingCertificate};
pub use error::MatchError;
pub use graph::{CompatibilityGraph, IndependentSet, Vertex, VertexSet};
pub use input::{ArrivalEvent, Measure, NcondReport, PairedEvent, StreamSpec};
pub use policy::{ClassDetail, PolicySpec, PreferenceList, QueueWord};
pub use productform::{BalanceReport, KellyReport, MarginalReport, NormalizingConstant};
pub use properties::PropertyReport;
pub use rational::Rational;
