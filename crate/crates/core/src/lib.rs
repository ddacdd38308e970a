//! Compiler for distributing quantum circuits over several QPUs joined by
//! EPR-generating interconnects.

pub mod bench;
pub mod circuit;
pub mod gadgets;
pub mod graph;
pub mod mapper;
pub mod partition;
pub mod qasm;
pub mod scalar;
pub mod sim;

pub use circuit::{Circuit, Gate, GateKind};
pub use qasm::{emit_qasm, parse_qasm};
pub use scalar::Real;

pub type Graph = graph::InteractionGraph<f64>;
pub type GraphF32 = graph::InteractionGraph<f32>;
pub type Branch = sim::BranchState<f64>;
pub type BranchF32 = sim::BranchState<f32>;
pub type Report = sim::EquivalenceReport<f64>;
