//! The local 1-to-N switch inside a topology brick.
//!
//! An LSwitch distributes tuples and instructions to the brick's slots by a
//! per-stream destination port filter (one mask bit per slot). Instructions
//! that do not belong to this switch are broadcast on every output port, as
//! are processing-unit instructions. With a single input port, continuation
//! segments simply follow the mask latched by their tuple's first segment.

use crate::fault::Fault;
use crate::instr::{decode_noc_instruction, NocInstruction};
use crate::noc::{Wire, WireId};
use crate::wire::StreamId;

#[derive(Debug, Clone)]
pub struct LSwitch {
    pub b_id: u16,
    table: [Option<u8>; 8],
    in_wire: WireId,
    out_wires: Vec<WireId>,
    latched_mask: Option<u8>,
}

impl LSwitch {
    pub fn new(b_id: u16, in_wire: WireId, out_wires: Vec<WireId>) -> LSwitch {
        assert!(
            !out_wires.is_empty() && out_wires.len() <= 4,
            "LSwitch supports 1..=4 slots"
        );
        LSwitch { b_id, table: [None; 8], in_wire, out_wires, latched_mask: None }
    }

    pub fn entry(&self, stream: StreamId) -> Option<u8> {
        self.table[stream.value() as usize]
    }

    /// Upserts the port filter for a stream.
    pub fn program(&mut self, stream: StreamId, s_filter: u8) {
        self.table[stream.value() as usize] = Some(s_filter);
    }

    fn broadcast_mask(&self) -> u8 {
        ((1u16 << self.out_wires.len()) - 1) as u8
    }

    /// One cycle: moves at most one segment, duplicated to every masked
    /// slot. The move is atomic across the mask; if any masked output is
    /// full the segment stalls.
    pub fn step(&mut self, cycle: u64, wires: &mut [Wire]) -> Result<bool, Fault> {
        let Some(seg) = wires[self.in_wire].peek_ready(cycle) else {
            return Ok(false);
        };
        let mask = match seg.stream() {
            None => self
                .latched_mask
                .ok_or(Fault::OrphanContinuation { b_id: self.b_id, port: 0 })?,
            Some(s) if s.is_noc_instruction() => {
                let instr = decode_noc_instruction(seg)?;
                if instr.b_id() == self.b_id {
                    if let NocInstruction::LSwitch { stream, s_filter, .. } = instr {
                        self.program(stream, s_filter);
                    }
                }
                self.broadcast_mask()
            }
            Some(s) if s.is_pu_instruction() => self.broadcast_mask(),
            Some(s) => match self.table[s.value() as usize] {
                Some(mask) => mask,
                None => return Err(Fault::UnroutedStream { stream: s, b_id: self.b_id }),
            },
        };
        if mask == 0 || mask as u16 >= 1 << self.out_wires.len() {
            return Err(Fault::MaskBeyondPorts { b_id: self.b_id, mask });
        }
        for (port, &out) in self.out_wires.iter().enumerate() {
            if mask & (1 << port) != 0 && !wires[out].can_push() {
                return Ok(false); // stall, retry next cycle
            }
        }
        wires[self.in_wire].pop_ready(cycle);
        for (port, &out) in self.out_wires.iter().enumerate() {
            if mask & (1 << port) != 0 {
                wires[out].push(seg, cycle);
            }
        }
        self.latched_mask = Some(mask);
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instr::encode_noc_instruction;
    use crate::wire::Segment;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sid(v: u8) -> StreamId {
        StreamId::data(v).unwrap()
    }

    #[test]
    fn q3_brick_one_masks_streams_to_their_slots() {
        // wires: 0 input, 1..=4 slots (bypass, sel-lineitem, sel-customer, sel-orders)
        let mut wires = vec![Wire::new(16); 5];
        let mut sw = LSwitch::new(2, 0, vec![1, 2, 3, 4]);
        sw.program(sid(2), 0b0010);
        sw.program(sid(3), 0b1000);
        sw.program(sid(4), 0b0100);
        sw.program(StreamId::END, 0b1111);
        for (stream, payload) in [(2u8, 1u64), (3, 2), (4, 3), (5, 4)] {
            wires[0].push(Segment::tagged(sid(stream), payload), 0);
        }
        for cycle in 1..=5 {
            sw.step(cycle, &mut wires).unwrap();
        }
        assert_eq!(wires[2].len(), 2, "lineitem slot sees its stream and END");
        assert_eq!(wires[4].len(), 2, "orders slot sees its stream and END");
        assert_eq!(wires[3].len(), 2, "customer slot sees its stream and END");
        assert_eq!(wires[1].len(), 1, "bypass sees only END");
    }

    #[test]
    fn pu_instruction_broadcasts_to_all_slots() {
        let mut wires = vec![Wire::new(16); 5];
        let mut sw = LSwitch::new(2, 0, vec![1, 2, 3, 4]);
        let instr = crate::instr::PredicateProgram {
            b_id: 9,
            atoms: vec![crate::instr::PredicateAtom {
                field: 0,
                op: crate::instr::CmpOp::Gt,
                value: 1,
            }],
        };
        for seg in crate::instr::encode_pu_instruction(&instr).unwrap() {
            wires[0].push(seg, 0);
        }
        for cycle in 1..=3 {
            sw.step(cycle, &mut wires).unwrap();
        }
        for slot in 1..=4 {
            assert_eq!(wires[slot].len(), 1, "slot {slot}");
        }
    }

    #[test]
    fn foreign_noc_instruction_broadcasts() {
        let mut wires = vec![Wire::new(16); 3];
        let mut sw = LSwitch::new(7, 0, vec![1, 2]);
        let instr = NocInstruction::LSwitch { b_id: 9, stream: sid(2), s_filter: 0b01 };
        wires[0].push(encode_noc_instruction(&instr).unwrap(), 0);
        sw.step(1, &mut wires).unwrap();
        assert_eq!(sw.entry(sid(2)), None, "table unchanged");
        assert_eq!(wires[1].len(), 1);
        assert_eq!(wires[2].len(), 1);
    }

    #[test]
    fn own_instruction_programs_and_broadcasts() {
        let mut wires = vec![Wire::new(16); 3];
        let mut sw = LSwitch::new(7, 0, vec![1, 2]);
        let instr = NocInstruction::LSwitch { b_id: 7, stream: sid(2), s_filter: 0b10 };
        wires[0].push(encode_noc_instruction(&instr).unwrap(), 0);
        sw.step(1, &mut wires).unwrap();
        assert_eq!(sw.entry(sid(2)), Some(0b10));
        assert_eq!(wires[1].len(), 1);
        assert_eq!(wires[2].len(), 1);
    }

    #[test]
    fn multicast_stalls_atomically_when_one_output_is_full() {
        let mut wires = vec![Wire::new(16), Wire::new(1), Wire::new(16)];
        let mut sw = LSwitch::new(1, 0, vec![1, 2]);
        sw.program(sid(2), 0b11);
        wires[1].push(Segment::null(99), 0); // pre-fill slot 0's wire
        wires[0].push(Segment::tagged(sid(2), 5), 0);
        assert!(!sw.step(1, &mut wires).unwrap(), "stalled");
        assert_eq!(wires[2].len(), 0, "nothing moved to the open port either");
        wires[1].pop_ready(1);
        assert!(sw.step(2, &mut wires).unwrap());
        assert_eq!(wires[1].len(), 1);
        assert_eq!(wires[2].len(), 1);
    }

    /// Random mask tables: every segment appears exactly on its masked
    /// ports, in order.
    #[test]
    fn random_masks_route_exactly_and_in_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x15C4);
        for _ in 0..100 {
            let n_out = rng.gen_range(1..=4usize);
            let mut wires = vec![Wire::new(1024); 1 + n_out];
            let mut sw = LSwitch::new(1, 0, (1..=n_out).collect());
            let mut masks = [0u8; 8];
            for s in 2..=6u8 {
                masks[s as usize] = rng.gen_range(1..(1u16 << n_out)) as u8;
                sw.program(sid(s), masks[s as usize]);
            }
            let mut sent: Vec<(u8, u64)> = Vec::new();
            for i in 0..rng.gen_range(1..60u64) {
                let s = rng.gen_range(2..=6u8);
                wires[0].push(Segment::tagged(sid(s), i), 0);
                sent.push((s, i));
            }
            for cycle in 1..=100 {
                sw.step(cycle, &mut wires).unwrap();
            }
            for port in 0..n_out {
                let got: Vec<u64> = std::iter::from_fn(|| wires[1 + port].pop_ready(u64::MAX))
                    .map(|s| s.payload())
                    .collect();
                let want: Vec<u64> = sent
                    .iter()
                    .filter(|(s, _)| masks[*s as usize] & (1 << port) != 0)
                    .map(|&(_, p)| p)
                    .collect();
                assert_eq!(got, want, "port {port}");
            }
        }
    }
}
