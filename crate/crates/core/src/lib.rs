//! Multi-year investment planning: scenario data, three formulations of the
//! capacity-expansion model, and tools to size, compare and cross-check them.

pub mod analysis;
pub mod error;
pub mod formulation;
pub mod par;
pub mod scenario;
pub mod synthetic;

pub use error::{AnalysisError, BuildError, ScenarioError};
pub use scenario::{load_scenario, write_scenario, AssetId, FlowId, InvestmentMethod, Scenario, Slot, Year};
