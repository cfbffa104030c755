//! Simulation faults. A fault aborts the run with a diagnostic; the fabric
//! never drops segments silently.

use crate::instr::InstrError;
use crate::tuple::CodecError;
use crate::wire::StreamId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Fault {
    #[error("unrouted stream {stream} at block {b_id}")]
    UnroutedStream { stream: StreamId, b_id: u16 },
    #[error("orphan continuation segment at block {b_id} port {port}")]
    OrphanContinuation { b_id: u16, port: usize },
    #[error("routing mask {mask:#06b} at block {b_id} selects a port that is not wired")]
    MaskBeyondPorts { b_id: u16, mask: u8 },
    #[error("stream {stream} has no layout at unit {b_id}")]
    UnknownStreamAtUnit { stream: StreamId, b_id: u16 },
    #[error("group buffer capacity {capacity} exceeded at unit {b_id}")]
    GroupCapacityExceeded { b_id: u16, capacity: usize },
    #[error("duplicate synchronizer token {token}")]
    DuplicateToken { token: u64 },
    #[error("instruction addressed to nonexistent block {b_id}")]
    UnknownBid { b_id: u16 },
    #[error("deployed entry missing or wrong at block {b_id}: {detail}")]
    DeployMismatch { b_id: u16, detail: String },
    #[error("cycle cap {cap} exceeded")]
    CycleCapExceeded { cap: u64 },
    #[error("no movement possible but {segments} segments still in flight (cycle {cycle})")]
    Stuck { segments: usize, cycle: u64 },
    #[error("malformed instruction on the wire: {0}")]
    Instr(#[from] InstrError),
    #[error("codec failure in unit {b_id}: {source}")]
    Codec { b_id: u16, source: CodecError },
    #[error("overflow buffer full at unit {b_id} (capacity invariant violated)")]
    OverflowFull { b_id: u16 },
}
