//! Cycle-stepped software model of the Diba reconfigurable stream processor.
//!
//! The crate is organized around the machine's own structure:
//!
//! * [`wire`], [`tuple`], [`instr`], [`money`] — segment/tuple/instruction
//!   wire formats and the fixed-point revenue arithmetic.
//! * [`noc`] — the communication layer: GSwitch-A/B, LSwitch, Collector and
//!   the serializing network interfaces.
//! * [`punits`] — processing units: selection, bypass,
//!   aggregation-group-by, order-by, synchronizer.
//! * [`join`] — the hash-based stream join and the multiway pipeline.
//! * [`topology`] — brick matrices, query plans, and program generation.
//! * [`engine`] — the deterministic global-clock simulator and metrics.
//! * [`tpch`] — `.tbl` ingestion, decompose/compose, dataset generation.
//! * [`oracle`] — brute-force reference evaluation for acceptance checks.

pub mod engine;
pub mod fault;
pub mod harness;
pub mod instr;
pub mod join;
pub mod money;
pub mod noc;
pub mod oracle;
pub mod punits;
pub mod topology;
pub mod tpch;
pub mod tuple;
pub mod wire;

pub use fault::Fault;
pub use instr::{CmpOp, NocInstruction, PredicateAtom, PredicateProgram};
pub use money::{compute_revenue, RevenueMicro};
pub use tuple::{Tuple, TupleLayout};
pub use wire::{Segment, StreamId};
