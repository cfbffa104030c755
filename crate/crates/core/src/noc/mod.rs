//! The communication layer: bounded wires, global and local switches, the
//! per-brick collector, and the serializing network interfaces.
//!
//! Every link is a [`Wire`]: a bounded FIFO of segments stamped with their
//! push cycle. A segment pushed at cycle `t` becomes visible to its consumer
//! at `t + 1`, which makes the per-cycle stepping order of components
//! irrelevant to the outcome and gives every hop a one-cycle latency. A full
//! wire stalls its producer; segments are never dropped.

pub mod collector;
pub mod gswitch;
pub mod lswitch;
pub mod ni;

pub use collector::Collector;
pub use gswitch::{GSwitchA, GSwitchB, RoutingEntry};
pub use lswitch::LSwitch;

use crate::wire::Segment;
use std::collections::VecDeque;

/// Index of a wire within a topology instance.
pub type WireId = usize;

/// A bounded point-to-point FIFO link.
#[derive(Debug, Clone)]
pub struct Wire {
    buf: VecDeque<(Segment, u64)>,
    capacity: usize,
}

impl Wire {
    pub fn new(capacity: usize) -> Wire {
        Wire { buf: VecDeque::with_capacity(capacity), capacity }
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn can_push(&self) -> bool {
        self.buf.len() < self.capacity
    }

    pub fn free(&self) -> usize {
        self.capacity - self.buf.len()
    }

    /// Pushes a segment stamped with the current cycle. Callers check
    /// `can_push` first; pushing into a full wire is a logic error.
    pub fn push(&mut self, segment: Segment, cycle: u64) {
        debug_assert!(self.can_push(), "push into full wire");
        self.buf.push_back((segment, cycle));
    }

    /// The front segment, if it was pushed on an earlier cycle.
    pub fn peek_ready(&self, cycle: u64) -> Option<Segment> {
        match self.buf.front() {
            Some(&(seg, stamp)) if stamp < cycle => Some(seg),
            _ => None,
        }
    }

    pub fn pop_ready(&mut self, cycle: u64) -> Option<Segment> {
        if self.peek_ready(cycle).is_some() {
            self.buf.pop_front().map(|(seg, _)| seg)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wire::StreamId;

    #[test]
    fn segments_become_visible_next_cycle() {
        let mut w = Wire::new(4);
        let seg = Segment::tagged(StreamId::data(2).unwrap(), 1);
        w.push(seg, 10);
        assert_eq!(w.peek_ready(10), None);
        assert_eq!(w.peek_ready(11), Some(seg));
        assert_eq!(w.pop_ready(11), Some(seg));
        assert!(w.is_empty());
    }

    #[test]
    fn capacity_is_enforced() {
        let mut w = Wire::new(2);
        let seg = Segment::null(0);
        w.push(seg, 0);
        assert!(w.can_push());
        w.push(seg, 0);
        assert!(!w.can_push());
        assert_eq!(w.free(), 0);
    }
}
