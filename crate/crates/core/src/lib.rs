//! Joint power allocation, coherent phase regulation and relay selection for
//! a full-duplex amplify-and-forward relay network that shares spectrum with
//! a radar receiver under an interference cap.
//!
//! Quantities are linear (watts, power ratios) unless a name ends in `_db`.
//! Relay indices are 0-based.

pub mod error;
pub mod experiment;
pub mod interference;
pub mod model;
pub mod optimizer;
pub mod partition;
pub mod rate;
pub mod selection;

pub use error::{Error, Result};
pub use interference::{CoherentTerms, PhaseAssignment, PhasePartition};
pub use model::{
    db_to_linear, generate_channels, linear_to_db, ChannelRealization, PowerAllocation, RelaySubset,
    ScenarioConfig, Variance,
};
pub use optimizer::{solve, Mode, Schedule, SolveResult, SolverOptions};
pub use partition::{PartitionInstance, PartitionSolution};
pub use rate::{RateBreakdown, RateObjective};
pub use selection::{select, select_multi, select_single, Selection};
pub use experiment::{run_sweep, AlgorithmSpec, SweepReport, SweepRow, SweepSpec, SweptParam};
