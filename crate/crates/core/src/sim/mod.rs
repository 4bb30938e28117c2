//! Simulated deployment, cost accounting and the throughput model.

pub mod attacks;
pub mod costs;
pub mod network;
pub mod scenario;
pub mod throughput;
pub mod transcript;
pub mod world;

pub use costs::{measure_costs, message_sizes, MessageSize, ProtocolPhase, ProtocolTimes, Role, TimingTable};
pub use network::{Adversary, Envelope, Field, PassThrough, Rule, Scripted, SimNetwork, Tap};
pub use scenario::{run_protocol_scenario, Scenario, ScenarioError, ScenarioRun, Step};
pub use throughput::{
    run_sweep, run_throughput_sim, Arm, Estimate, SimConfig, SimError, SimResult, Sweep, SweepParam, TpRow,
};
pub use transcript::{Event, Outcome, Reason, Transcript};
pub use world::{World, WorldConfig, WorldError};
