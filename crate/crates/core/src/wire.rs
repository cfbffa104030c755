//! Stream identifiers and the 64-bit segment, the NoC's unit of transfer.
//!
//! Every word moved by the network is a [`Segment`]: a 3-bit stream tag in
//! the most significant bits followed by a 61-bit payload. Tuples wider than
//! one payload span several segments; only the first segment carries the
//! stream id, the rest are tagged with the reserved NULL continuation value.
//!
//! Tag assignment:
//!
//! | tag | meaning                          |
//! |-----|----------------------------------|
//! | 0   | processing-unit instruction      |
//! | 1   | NoC (switch) instruction         |
//! | 2-6 | data streams                     |
//! | 7   | NULL continuation (never a stream) |
//!
//! The Q3 deployment uses 2=LINEITEM, 3=ORDERS, 4=CUSTOMER and 5 for the
//! END_MESSAGE control tuple that is fed once after all streams.

use serde::{Deserialize, Serialize};

/// Payload bits per segment (64 minus the 3-bit tag).
pub const PAYLOAD_BITS: u32 = 61;

/// Mask covering the payload bits of a segment word.
pub const PAYLOAD_MASK: u64 = (1u64 << PAYLOAD_BITS) - 1;

/// Raw tag value reserved for non-first segments of a multi-segment tuple.
pub const NULL_TAG: u8 = 7;

/// A 3-bit stream identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StreamId(u8);

impl StreamId {
    /// Tag 0: instruction addressed to a processing unit.
    pub const PU_INSTRUCTION: StreamId = StreamId(0);
    /// Tag 1: instruction addressed to a GSwitch or LSwitch.
    pub const NOC_INSTRUCTION: StreamId = StreamId(1);
    /// Control stream that flushes stateful units; by convention stream 5.
    pub const END: StreamId = StreamId(5);

    /// Builds a stream id, rejecting values outside the 3-bit range and the
    /// reserved NULL continuation value.
    pub fn new(value: u8) -> Result<StreamId, StreamIdError> {
        if value > 7 {
            Err(StreamIdError::OutOfRange(value))
        } else if value == NULL_TAG {
            Err(StreamIdError::ReservedNull)
        } else {
            Ok(StreamId(value))
        }
    }

    /// Const constructor for stream ids fixed at build time.
    pub const fn from_const(value: u8) -> StreamId {
        assert!(value <= 6, "stream id out of range");
        StreamId(value)
    }

    /// Builds a data-stream id (2..=6).
    pub fn data(value: u8) -> Result<StreamId, StreamIdError> {
        let id = StreamId::new(value)?;
        if id.is_data() {
            Ok(id)
        } else {
            Err(StreamIdError::NotData(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// True for data streams (2..=6), including the END control stream.
    pub fn is_data(self) -> bool {
        (2..=6).contains(&self.0)
    }

    pub fn is_pu_instruction(self) -> bool {
        self.0 == 0
    }

    pub fn is_noc_instruction(self) -> bool {
        self.0 == 1
    }
}

impl std::fmt::Display for StreamId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum StreamIdError {
    #[error("stream id {0} does not fit in 3 bits")]
    OutOfRange(u8),
    #[error("stream id 7 is the reserved NULL continuation tag")]
    ReservedNull,
    #[error("stream id {0} is not a data stream (2..=6)")]
    NotData(u8),
}

/// One 64-bit word on the network: 3-bit tag | 61-bit payload.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Segment(u64);

impl Segment {
    /// Assembles a segment from a raw 3-bit tag and a 61-bit payload.
    ///
    /// Panics if the payload overflows 61 bits; callers pack payloads with
    /// the codec helpers which cannot produce wider values.
    pub fn from_parts(tag: u8, payload: u64) -> Segment {
        assert!(tag <= 7, "tag {tag} does not fit in 3 bits");
        assert!(payload <= PAYLOAD_MASK, "payload wider than 61 bits");
        Segment(((tag as u64) << PAYLOAD_BITS) | payload)
    }

    /// First segment of a tuple: tagged with its stream id.
    pub fn tagged(stream: StreamId, payload: u64) -> Segment {
        Segment::from_parts(stream.value(), payload)
    }

    /// Continuation segment (NULL tag).
    pub fn null(payload: u64) -> Segment {
        Segment::from_parts(NULL_TAG, payload)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn from_raw(word: u64) -> Segment {
        Segment(word)
    }

    pub fn tag(self) -> u8 {
        (self.0 >> PAYLOAD_BITS) as u8
    }

    pub fn payload(self) -> u64 {
        self.0 & PAYLOAD_MASK
    }

    pub fn is_null_continuation(self) -> bool {
        self.tag() == NULL_TAG
    }

    /// The stream id of a first segment; `None` for NULL continuations.
    pub fn stream(self) -> Option<StreamId> {
        if self.is_null_continuation() {
            None
        } else {
            Some(StreamId(self.tag()))
        }
    }
}

impl std::fmt::Debug for Segment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Segment(tag={}, payload={:#018x})", self.tag(), self.payload())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_and_payload_round_trip() {
        let s = Segment::from_parts(4, 0x1234_5678_9abc);
        assert_eq!(s.tag(), 4);
        assert_eq!(s.payload(), 0x1234_5678_9abc);
        assert_eq!(s.stream(), Some(StreamId(4)));
        assert!(!s.is_null_continuation());
    }

    #[test]
    fn null_tag_has_no_stream() {
        let s = Segment::null(99);
        assert!(s.is_null_continuation());
        assert_eq!(s.stream(), None);
    }

    #[test]
    fn stream_id_validation() {
        assert!(StreamId::new(8).is_err());
        assert!(StreamId::new(7).is_err());
        assert!(StreamId::new(0).is_ok());
        assert!(StreamId::data(1).is_err());
        assert!(StreamId::data(2).is_ok());
        assert!(StreamId::data(6).is_ok());
    }

    #[test]
    fn total_width_is_64_bits() {
        let s = Segment::from_parts(7, PAYLOAD_MASK);
        assert_eq!(s.raw(), u64::MAX);
    }
}
