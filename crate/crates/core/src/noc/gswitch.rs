//! Global switches.
//!
//! `GSwitch-A` is the 2-in/2-out router that wires topology bricks together.
//! Its stream routing table holds, per stream, a destination port mask and
//! the tuple's segment count; a tuple's segments are routed atomically by
//! the entry of its first segment. Instructions need no table entry: NoC
//! instructions (tag 1) program the switch when addressed to it and are
//! forwarded on every output either way, and processing-unit instructions
//! (tag 0) are likewise forwarded on every output, with their length taken
//! from the atom-count header.
//!
//! `GSwitch-B` is the 1-in/N-out fan-out variant whose per-port queues are
//! disjoint views of one shared circular buffer, so a blocked port cannot
//! starve the others until the buffer fills with its entries.

use crate::fault::Fault;
use crate::instr::{decode_noc_instruction, pu_segment_count_from_header, NocInstruction};
use crate::noc::{Wire, WireId};
use crate::wire::{Segment, StreamId};
use std::collections::VecDeque;

/// One stream routing table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoutingEntry {
    /// Destination port mask; bit i selects output port i.
    pub dest_mask: u8,
    /// Segments per tuple of this stream (GSwitch-A only; 1 for GSwitch-B).
    pub seg_count: u8,
}

/// Routing state of one input port: the tuple currently in flight.
#[derive(Debug, Clone, Copy)]
struct InFlight {
    mask: u8,
    /// Remaining segments, or `None` to latch until the next tagged segment
    /// (used by terminal switches that default-route unprogrammed streams).
    remaining: Option<u8>,
}

#[derive(Debug, Clone)]
pub struct GSwitchA {
    pub b_id: u16,
    table: [Option<RoutingEntry>; 8],
    in_wires: [Option<WireId>; 2],
    out_wires: [Option<WireId>; 2],
    in_flight: [Option<InFlight>; 2],
    /// Which input port won the last admission; the other gets priority next.
    last_admitted: usize,
    /// Terminal switches route unprogrammed data streams out of port 0
    /// instead of faulting, which lets results drain to the sink without a
    /// dedicated exit program.
    default_route: bool,
}

impl GSwitchA {
    pub fn new(b_id: u16, in_wires: [Option<WireId>; 2], out_wires: [Option<WireId>; 2]) -> GSwitchA {
        GSwitchA {
            b_id,
            table: [None; 8],
            in_wires,
            out_wires,
            in_flight: [None; 2],
            last_admitted: 1,
            default_route: false,
        }
    }

    pub fn with_default_route(mut self) -> GSwitchA {
        self.default_route = true;
        self
    }

    pub fn entry(&self, stream: StreamId) -> Option<RoutingEntry> {
        self.table[stream.value() as usize]
    }

    /// Upserts the routing entry for a stream.
    pub fn program(&mut self, stream: StreamId, entry: RoutingEntry) {
        self.table[stream.value() as usize] = Some(entry);
    }

    fn ports_of(&self, mask: u8) -> Result<(), Fault> {
        for port in 0..2 {
            if mask & (1 << port) != 0 && self.out_wires[port].is_none() {
                return Err(Fault::MaskBeyondPorts { b_id: self.b_id, mask });
            }
        }
        Ok(())
    }

    fn broadcast_mask(&self) -> u8 {
        let mut mask = 0;
        for port in 0..2 {
            if self.out_wires[port].is_some() {
                mask |= 1 << port;
            }
        }
        mask
    }

    /// Resolves the in-flight descriptor for a fresh (tagged) segment,
    /// programming the table first when the segment is an instruction
    /// addressed to this switch.
    fn admit(&mut self, seg: Segment, input: usize) -> Result<InFlight, Fault> {
        let stream = match seg.stream() {
            Some(s) => s,
            None => return Err(Fault::OrphanContinuation { b_id: self.b_id, port: input }),
        };
        if stream.is_noc_instruction() {
            let instr = decode_noc_instruction(seg)?;
            if instr.b_id() == self.b_id {
                if let NocInstruction::GSwitchA { stream, port_mask, seg_count, .. } = instr {
                    self.program(stream, RoutingEntry { dest_mask: port_mask, seg_count });
                }
                // An instruction of the wrong kind for a matching b_id
                // cannot occur in built topologies: block ids are unique.
            }
            return Ok(InFlight { mask: self.broadcast_mask(), remaining: Some(1) });
        }
        if stream.is_pu_instruction() {
            let count = pu_segment_count_from_header(seg)?;
            return Ok(InFlight { mask: self.broadcast_mask(), remaining: Some(count as u8) });
        }
        match self.table[stream.value() as usize] {
            Some(entry) => {
                self.ports_of(entry.dest_mask)?;
                Ok(InFlight { mask: entry.dest_mask, remaining: Some(entry.seg_count) })
            }
            None if self.default_route => Ok(InFlight { mask: 0b01, remaining: None }),
            None => Err(Fault::UnroutedStream { stream, b_id: self.b_id }),
        }
    }

    /// Advances the switch by one cycle. Each input forwards at most one
    /// segment; a segment moves only when every port in its mask has space.
    pub fn step(&mut self, cycle: u64, wires: &mut [Wire]) -> Result<bool, Fault> {
        let mut moved = false;
        let mut port_used = [false; 2];
        // Input service order: alternate priority at tuple granularity.
        let first = (self.last_admitted + 1) % 2;
        for input in [first, 1 - first] {
            let Some(in_wire) = self.in_wires[input] else { continue };
            let Some(seg) = wires[in_wire].peek_ready(cycle) else {
                // Latched (count-free) tuples end when the input runs dry.
                if matches!(self.in_flight[input], Some(InFlight { remaining: None, .. })) {
                    self.in_flight[input] = None;
                }
                continue;
            };

            let flight = match self.in_flight[input] {
                Some(f @ InFlight { remaining: Some(_), .. }) => f,
                Some(f @ InFlight { remaining: None, .. }) => {
                    if seg.is_null_continuation() {
                        f
                    } else {
                        // Next tagged segment closes the latched tuple.
                        self.in_flight[input] = None;
                        let f = self.admit(seg, input)?;
                        self.last_admitted = input;
                        f
                    }
                }
                None => {
                    let f = self.admit(seg, input)?;
                    self.last_admitted = input;
                    f
                }
            };

            // All masked ports must be free this cycle and have buffer space.
            let mut ok = true;
            for port in 0..2 {
                if flight.mask & (1 << port) != 0 {
                    let out = self.out_wires[port].expect("mask validated");
                    if port_used[port] || !wires[out].can_push() {
                        ok = false;
                    }
                }
            }
            if !ok {
                self.in_flight[input] = Some(flight);
                continue;
            }
            wires[in_wire].pop_ready(cycle);
            for port in 0..2 {
                if flight.mask & (1 << port) != 0 {
                    let out = self.out_wires[port].expect("mask validated");
                    wires[out].push(seg, cycle);
                    port_used[port] = true;
                }
            }
            moved = true;
            self.in_flight[input] = match flight.remaining {
                Some(1) => None,
                Some(n) => Some(InFlight { mask: flight.mask, remaining: Some(n - 1) }),
                None => Some(flight),
            };
        }
        Ok(moved)
    }
}

/// The 1-to-N distribution switch with a shared circular buffer.
#[derive(Debug, Clone)]
pub struct GSwitchB {
    pub b_id: u16,
    table: [Option<u8>; 8],
    in_wire: WireId,
    out_wires: Vec<WireId>,
    /// Shared buffer entries: (segment, destination port, ready stamp).
    shared: VecDeque<(Segment, usize, u64)>,
    shared_capacity: usize,
    latched_mask: Option<u8>,
}

impl GSwitchB {
    pub fn new(b_id: u16, in_wire: WireId, out_wires: Vec<WireId>, shared_capacity: usize) -> GSwitchB {
        assert!(out_wires.len() <= 8, "GSwitch-B supports at most 8 ports");
        GSwitchB {
            b_id,
            table: [None; 8],
            in_wire,
            out_wires,
            shared: VecDeque::with_capacity(shared_capacity),
            shared_capacity,
            latched_mask: None,
        }
    }

    pub fn program(&mut self, stream: StreamId, mask: u8) {
        self.table[stream.value() as usize] = Some(mask);
    }

    pub fn entry(&self, stream: StreamId) -> Option<u8> {
        self.table[stream.value() as usize]
    }

    fn broadcast_mask(&self) -> u8 {
        ((1u16 << self.out_wires.len()) - 1) as u8
    }

    /// One cycle: enqueue at most one input segment (duplicated into the
    /// shared buffer once per masked port), then drain at most one entry per
    /// output port, oldest first.
    pub fn step(&mut self, cycle: u64, wires: &mut [Wire]) -> Result<bool, Fault> {
        let mut moved = false;

        if let Some(seg) = wires[self.in_wire].peek_ready(cycle) {
            let mask = match seg.stream() {
                None => self
                    .latched_mask
                    .ok_or(Fault::OrphanContinuation { b_id: self.b_id, port: 0 })?,
                Some(s) if s.is_noc_instruction() || s.is_pu_instruction() => {
                    if s.is_noc_instruction() {
                        let instr = decode_noc_instruction(seg)?;
                        if instr.b_id() == self.b_id {
                            if let NocInstruction::LSwitch { stream, s_filter, .. } = instr {
                                // B-kind switches share the mask-style
                                // instruction encoding with LSwitch.
                                self.program(stream, s_filter);
                            }
                        }
                    }
                    self.broadcast_mask()
                }
                Some(s) => match self.table[s.value() as usize] {
                    Some(mask) => mask,
                    None => return Err(Fault::UnroutedStream { stream: s, b_id: self.b_id }),
                },
            };
            let copies = mask.count_ones() as usize;
            if mask as u16 >= 1 << self.out_wires.len() {
                return Err(Fault::MaskBeyondPorts { b_id: self.b_id, mask });
            }
            if self.shared_capacity - self.shared.len() >= copies && copies > 0 {
                wires[self.in_wire].pop_ready(cycle);
                for (port, _) in self.out_wires.iter().enumerate() {
                    if mask & (1 << port) != 0 {
                        self.shared.push_back((seg, port, cycle));
                    }
                }
                self.latched_mask = Some(mask);
                moved = true;
            }
        }

        // Port collectors draw from the shared buffer FIFO-fairly: each
        // port takes its oldest ready entry.
        for (port, &out) in self.out_wires.iter().enumerate() {
            if !wires[out].can_push() {
                continue;
            }
            if let Some(pos) =
                self.shared.iter().position(|&(_, p, stamp)| p == port && stamp < cycle)
            {
                let (seg, _, _) = self.shared.remove(pos).expect("position valid");
                wires[out].push(seg, cycle);
                moved = true;
            }
        }
        Ok(moved)
    }

    pub fn shared_len(&self) -> usize {
        self.shared.len()
    }
}
