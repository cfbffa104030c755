//! Wire formats for the programmable instructions.
//!
//! NoC instructions program GSwitch-A and LSwitch routing tables. One
//! instruction fits a single segment; the layout, msb to lsb, is frozen as
//! the external format:
//!
//! ```text
//! bits 63..61  tag            = 1 (NoC instruction)
//! bit  60      kind           0 = GSwitch-A, 1 = LSwitch
//! bits 59..48  b_id           12-bit target block id
//! bits 47..45  target stream  3-bit stream id
//! bits 44..41  mask           4 bits; GSwitch-A uses the low 2 bits
//! bits 40..35  seg_count      6 bits; GSwitch-A only, 0 for LSwitch
//! bits 34..0   zero padding
//! ```
//!
//! Processing-unit instructions (tag 0) carry selection predicates. The
//! payload bitstream, spanning one or more segments (continuations tagged
//! NULL), is:
//!
//! ```text
//! b_id (12) | atom_count (3) | atom_count x [field (4) | op (3) | constant (32)]
//! ```
//!
//! Switches derive the segment count of a passing PU instruction from its
//! atom_count header, so routing them needs no table entry.

use crate::tuple::{get_bits, put_bits};
use crate::wire::{Segment, StreamId, PAYLOAD_BITS};
use serde::{Deserialize, Serialize};

pub const B_ID_BITS: u32 = 12;
pub const MAX_B_ID: u16 = (1 << B_ID_BITS) - 1;
pub const MAX_SEG_COUNT: u8 = (1 << 6) - 1;

/// GSwitch-A output-port mask bits. Port 0 routes down into the brick row
/// (the paper's "south"); port 1 routes east to the neighbouring switch.
pub const GSWITCH_PORT_SOUTH: u8 = 0b01;
pub const GSWITCH_PORT_EAST: u8 = 0b10;

/// A routing entry carried on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NocInstruction {
    /// Programs a GSwitch-A: route `seg_count`-segment tuples of `stream`
    /// to the output ports in `port_mask` (2 bits).
    GSwitchA { b_id: u16, stream: StreamId, port_mask: u8, seg_count: u8 },
    /// Programs an LSwitch: distribute `stream` to the slots selected by
    /// `s_filter` (4 bits, one per slot).
    LSwitch { b_id: u16, stream: StreamId, s_filter: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstrError {
    #[error("block id {0} does not fit in 12 bits")]
    BadBid(u16),
    #[error("port/slot mask must be non-zero and fit {bits} bits, got {mask:#06b}")]
    BadMask { mask: u8, bits: u32 },
    #[error("segment count must be 1..=63, got {0}")]
    BadSegCount(u8),
    #[error("segment with tag {0} is not a NoC instruction")]
    NotNocInstruction(u8),
    #[error("predicate must carry 1..=7 atoms, got {0}")]
    BadAtomCount(usize),
    #[error("atom field index {0} does not fit in 4 bits")]
    BadFieldIndex(usize),
    #[error("segment with tag {0} is not a processing-unit instruction")]
    NotPuInstruction(u8),
    #[error("processing-unit instruction expected {want} segments, got {got}")]
    PuSegmentCount { want: usize, got: usize },
}

impl NocInstruction {
    pub fn b_id(&self) -> u16 {
        match *self {
            NocInstruction::GSwitchA { b_id, .. } | NocInstruction::LSwitch { b_id, .. } => b_id,
        }
    }

    pub fn stream(&self) -> StreamId {
        match *self {
            NocInstruction::GSwitchA { stream, .. } | NocInstruction::LSwitch { stream, .. } => {
                stream
            }
        }
    }

    fn validate(&self) -> Result<(), InstrError> {
        match *self {
            NocInstruction::GSwitchA { b_id, port_mask, seg_count, .. } => {
                if b_id > MAX_B_ID {
                    return Err(InstrError::BadBid(b_id));
                }
                if port_mask == 0 || port_mask > 0b11 {
                    return Err(InstrError::BadMask { mask: port_mask, bits: 2 });
                }
                if seg_count == 0 || seg_count > MAX_SEG_COUNT {
                    return Err(InstrError::BadSegCount(seg_count));
                }
            }
            NocInstruction::LSwitch { b_id, s_filter, .. } => {
                if b_id > MAX_B_ID {
                    return Err(InstrError::BadBid(b_id));
                }
                if s_filter == 0 || s_filter > 0b1111 {
                    return Err(InstrError::BadMask { mask: s_filter, bits: 4 });
                }
            }
        }
        Ok(())
    }
}

/// Encodes a NoC instruction into its single tag-1 segment.
pub fn encode_noc_instruction(instr: &NocInstruction) -> Result<Segment, InstrError> {
    instr.validate()?;
    let (kind, b_id, stream, mask, seg_count) = match *instr {
        NocInstruction::GSwitchA { b_id, stream, port_mask, seg_count } => {
            (0u64, b_id, stream, port_mask, seg_count)
        }
        NocInstruction::LSwitch { b_id, stream, s_filter } => (1u64, b_id, stream, s_filter, 0),
    };
    // Payload bit i is word bit i, so the documented word positions apply
    // directly (kind at word bit 60 is the payload msb).
    let payload = kind << 60
        | (b_id as u64) << 48
        | (stream.value() as u64) << 45
        | (mask as u64) << 41
        | (seg_count as u64) << 35;
    Ok(Segment::tagged(StreamId::NOC_INSTRUCTION, payload))
}

/// Decodes a tag-1 segment back into a NoC instruction.
pub fn decode_noc_instruction(segment: Segment) -> Result<NocInstruction, InstrError> {
    if !segment.stream().map(|s| s.is_noc_instruction()).unwrap_or(false) {
        return Err(InstrError::NotNocInstruction(segment.tag()));
    }
    let word = segment.payload();
    let kind = (word >> 60) & 1;
    let b_id = ((word >> 48) & 0xfff) as u16;
    let stream = StreamId::new(((word >> 45) & 0b111) as u8)
        .map_err(|_| InstrError::BadMask { mask: 0, bits: 3 })?;
    let mask = ((word >> 41) & 0b1111) as u8;
    let seg_count = ((word >> 35) & 0x3f) as u8;
    let instr = if kind == 0 {
        NocInstruction::GSwitchA { b_id, stream, port_mask: mask & 0b11, seg_count }
    } else {
        NocInstruction::LSwitch { b_id, stream, s_filter: mask }
    };
    instr.validate()?;
    Ok(instr)
}

impl std::fmt::Display for NocInstruction {
    /// Textual dump form `kind:b_id:stream:mask:segs` used in CLI output.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            NocInstruction::GSwitchA { b_id, stream, port_mask, seg_count } => {
                write!(f, "A:{b_id}:{stream}:{port_mask:02b}:{seg_count}")
            }
            NocInstruction::LSwitch { b_id, stream, s_filter } => {
                write!(f, "L:{b_id}:{stream}:{s_filter:04b}:-")
            }
        }
    }
}

/// Comparison operator of a selection atom (3-bit encoding).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    Lt = 0,
    Gt = 1,
    Eq = 2,
    Ne = 3,
    Le = 4,
    Ge = 5,
}

impl CmpOp {
    pub fn eval(self, lhs: u64, rhs: u64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }

    fn from_bits(bits: u64) -> Option<CmpOp> {
        Some(match bits {
            0 => CmpOp::Lt,
            1 => CmpOp::Gt,
            2 => CmpOp::Eq,
            3 => CmpOp::Ne,
            4 => CmpOp::Le,
            5 => CmpOp::Ge,
            _ => return None,
        })
    }
}

impl std::fmt::Display for CmpOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
        };
        f.write_str(s)
    }
}

/// One predicate atom: `field <op> constant`, field by index into the
/// target unit's input layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateAtom {
    pub field: usize,
    pub op: CmpOp,
    pub value: u32,
}

/// A conjunction of atoms addressed to one processing unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateProgram {
    pub b_id: u16,
    pub atoms: Vec<PredicateAtom>,
}

const PU_HEADER_BITS: u32 = B_ID_BITS + 3;
const ATOM_BITS: u32 = 4 + 3 + 32;

/// Segments occupied by a PU instruction with `atom_count` atoms.
pub fn pu_segment_count(atom_count: usize) -> usize {
    (PU_HEADER_BITS + ATOM_BITS * atom_count as u32).div_ceil(PAYLOAD_BITS) as usize
}

/// Parses the atom count out of the first segment of a PU instruction,
/// returning the total segment count. Used by switches to forward whole
/// instructions without a routing entry.
pub fn pu_segment_count_from_header(first: Segment) -> Result<usize, InstrError> {
    if !first.stream().map(|s| s.is_pu_instruction()).unwrap_or(false) {
        return Err(InstrError::NotPuInstruction(first.tag()));
    }
    let payloads = [first.payload()];
    let count = get_bits(&payloads, B_ID_BITS, 3) as usize;
    if count == 0 {
        return Err(InstrError::BadAtomCount(count));
    }
    Ok(pu_segment_count(count))
}

/// Encodes a predicate program into its tag-0 segment sequence.
pub fn encode_pu_instruction(prog: &PredicateProgram) -> Result<Vec<Segment>, InstrError> {
    if prog.b_id > MAX_B_ID {
        return Err(InstrError::BadBid(prog.b_id));
    }
    if prog.atoms.is_empty() || prog.atoms.len() > 7 {
        return Err(InstrError::BadAtomCount(prog.atoms.len()));
    }
    let seg_count = pu_segment_count(prog.atoms.len());
    let mut payloads = vec![0u64; seg_count];
    put_bits(&mut payloads, 0, 12, prog.b_id as u64);
    put_bits(&mut payloads, 12, 3, prog.atoms.len() as u64);
    let mut pos = PU_HEADER_BITS;
    for atom in &prog.atoms {
        if atom.field > 0b1111 {
            return Err(InstrError::BadFieldIndex(atom.field));
        }
        put_bits(&mut payloads, pos, 4, atom.field as u64);
        put_bits(&mut payloads, pos + 4, 3, atom.op as u64);
        put_bits(&mut payloads, pos + 7, 32, atom.value as u64);
        pos += ATOM_BITS;
    }
    Ok(payloads
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if i == 0 {
                Segment::tagged(StreamId::PU_INSTRUCTION, p)
            } else {
                Segment::null(p)
            }
        })
        .collect())
}

/// Decodes a tag-0 segment sequence back into a predicate program.
pub fn decode_pu_instruction(segments: &[Segment]) -> Result<PredicateProgram, InstrError> {
    let first = *segments.first().ok_or(InstrError::PuSegmentCount { want: 1, got: 0 })?;
    let want = pu_segment_count_from_header(first)?;
    if segments.len() != want {
        return Err(InstrError::PuSegmentCount { want, got: segments.len() });
    }
    let payloads: Vec<u64> = segments.iter().map(|s| s.payload()).collect();
    let b_id = get_bits(&payloads, 0, 12) as u16;
    let count = get_bits(&payloads, 12, 3) as usize;
    let mut atoms = Vec::with_capacity(count);
    let mut pos = PU_HEADER_BITS;
    for _ in 0..count {
        let field = get_bits(&payloads, pos, 4) as usize;
        let op = CmpOp::from_bits(get_bits(&payloads, pos + 4, 3))
            .ok_or(InstrError::BadAtomCount(count))?;
        let value = get_bits(&payloads, pos + 7, 32) as u32;
        atoms.push(PredicateAtom { field, op, value });
        pos += ATOM_BITS;
    }
    Ok(PredicateProgram { b_id, atoms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(v: u8) -> StreamId {
        StreamId::data(v).unwrap()
    }

    #[test]
    fn gswitch_worked_example_round_trips() {
        // Block 23 routes three-segment tuples of stream 4 to its south port.
        let instr = NocInstruction::GSwitchA {
            b_id: 23,
            stream: data(4),
            port_mask: GSWITCH_PORT_SOUTH,
            seg_count: 3,
        };
        let seg = encode_noc_instruction(&instr).unwrap();
        assert_eq!(seg.stream(), Some(StreamId::NOC_INSTRUCTION));
        assert_eq!(decode_noc_instruction(seg).unwrap(), instr);
        assert_eq!(instr.to_string(), "A:23:4:01:3");
    }

    #[test]
    fn lswitch_kind_bit_is_set() {
        let instr = NocInstruction::LSwitch { b_id: 0, stream: data(2), s_filter: 0b0001 };
        let seg = encode_noc_instruction(&instr).unwrap();
        assert_eq!(seg.tag(), 1);
        // kind bit is the msb of the payload
        assert_eq!(seg.payload() >> 60, 1);
        assert_eq!(decode_noc_instruction(seg).unwrap(), instr);
    }

    #[test]
    fn data_segment_is_not_an_instruction() {
        let seg = Segment::tagged(data(2), 42);
        assert!(matches!(decode_noc_instruction(seg), Err(InstrError::NotNocInstruction(2))));
    }

    #[test]
    fn zero_mask_and_zero_segs_rejected() {
        let zero_mask =
            NocInstruction::GSwitchA { b_id: 1, stream: data(2), port_mask: 0, seg_count: 1 };
        assert!(encode_noc_instruction(&zero_mask).is_err());
        let zero_segs =
            NocInstruction::GSwitchA { b_id: 1, stream: data(2), port_mask: 1, seg_count: 0 };
        assert!(encode_noc_instruction(&zero_segs).is_err());
        let zero_filter = NocInstruction::LSwitch { b_id: 1, stream: data(2), s_filter: 0 };
        assert!(encode_noc_instruction(&zero_filter).is_err());
    }

    #[test]
    fn pu_instruction_round_trips_and_sizes() {
        assert_eq!(pu_segment_count(1), 1); // 15 + 39 = 54 bits
        assert_eq!(pu_segment_count(2), 2); // 93 bits
        assert_eq!(pu_segment_count(7), 5); // 288 bits

        let prog = PredicateProgram {
            b_id: 9,
            atoms: vec![
                PredicateAtom { field: 2, op: CmpOp::Gt, value: 1169 },
                PredicateAtom { field: 0, op: CmpOp::Ne, value: 7 },
            ],
        };
        let segs = encode_pu_instruction(&prog).unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].stream(), Some(StreamId::PU_INSTRUCTION));
        assert!(segs[1].is_null_continuation());
        assert_eq!(pu_segment_count_from_header(segs[0]).unwrap(), 2);
        assert_eq!(decode_pu_instruction(&segs).unwrap(), prog);
    }
}
