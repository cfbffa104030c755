//! The per-brick M-to-1 gatherer.
//!
//! The collector arbitrates linearly (round-robin) across its producer
//! ports. Once it takes a tagged segment from a port it keeps draining that
//! port's NULL continuations until it observes a segment with a stream id,
//! which starts the next tuple; whole tuples are never interleaved.
//! Producers admit results to their output queues tuple-atomically, so a
//! bound port with nothing ready means the current tuple is complete.
//!
//! END handling: every slot forwards one END tuple, so the collector treats
//! END as a barrier. It absorbs the per-port copies and emits a single END
//! downstream once every port has delivered one, which also guarantees the
//! emitted END follows all data of the brick.

use crate::fault::Fault;
use crate::noc::{Wire, WireId};
use crate::wire::StreamId;

#[derive(Debug, Clone)]
pub struct Collector {
    pub b_id: u16,
    in_wires: Vec<WireId>,
    out_wire: WireId,
    end_stream: StreamId,
    bound: Option<usize>,
    rr_next: usize,
    end_seen: Vec<bool>,
}

impl Collector {
    pub fn new(b_id: u16, in_wires: Vec<WireId>, out_wire: WireId, end_stream: StreamId) -> Collector {
        let ports = in_wires.len();
        assert!(ports >= 1, "collector needs at least one producer");
        Collector {
            b_id,
            in_wires,
            out_wire,
            end_stream,
            bound: None,
            rr_next: 0,
            end_seen: vec![false; ports],
        }
    }

    /// One cycle: emits at most one segment downstream.
    pub fn step(&mut self, cycle: u64, wires: &mut [Wire]) -> Result<bool, Fault> {
        if !wires[self.out_wire].can_push() {
            return Ok(false);
        }

        if let Some(port) = self.bound {
            match wires[self.in_wires[port]].peek_ready(cycle) {
                Some(seg) if seg.is_null_continuation() => {
                    wires[self.in_wires[port]].pop_ready(cycle);
                    wires[self.out_wire].push(seg, cycle);
                    return Ok(true);
                }
                // A tagged segment or an idle port both mean the bound
                // tuple is complete; move on round-robin.
                _ => {
                    self.bound = None;
                    self.rr_next = (port + 1) % self.in_wires.len();
                }
            }
        }

        let ports = self.in_wires.len();
        for i in 0..ports {
            let port = (self.rr_next + i) % ports;
            let Some(seg) = wires[self.in_wires[port]].peek_ready(cycle) else { continue };
            if seg.is_null_continuation() {
                return Err(Fault::OrphanContinuation { b_id: self.b_id, port });
            }
            if seg.stream() == Some(self.end_stream) {
                // Barrier: absorb this port's END; emit one END when the
                // last port delivers its copy.
                wires[self.in_wires[port]].pop_ready(cycle);
                self.end_seen[port] = true;
                self.rr_next = (port + 1) % ports;
                if self.end_seen.iter().all(|&seen| seen) {
                    self.end_seen.fill(false);
                    wires[self.out_wire].push(seg, cycle);
                }
                return Ok(true);
            }
            wires[self.in_wires[port]].pop_ready(cycle);
            wires[self.out_wire].push(seg, cycle);
            self.bound = Some(port);
            return Ok(true);
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wire::Segment;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sid(v: u8) -> StreamId {
        StreamId::data(v).unwrap()
    }

    fn collector(ports: usize) -> (Collector, Vec<Wire>) {
        // wires: 0..ports inputs, last = output
        let wires = vec![Wire::new(64); ports + 1];
        let c = Collector::new(9, (0..ports).collect(), ports, StreamId::END);
        (c, wires)
    }

    fn drain(wires: &mut [Wire], id: usize) -> Vec<Segment> {
        std::iter::from_fn(|| wires[id].pop_ready(u64::MAX)).collect()
    }

    #[test]
    fn whole_tuples_are_never_interleaved() {
        let (mut c, mut wires) = collector(2);
        // two ports, each holding one 2-segment tuple
        wires[0].push(Segment::tagged(sid(2), 10), 0);
        wires[0].push(Segment::null(11), 0);
        wires[1].push(Segment::tagged(sid(3), 20), 0);
        wires[1].push(Segment::null(21), 0);
        for cycle in 1..=6 {
            c.step(cycle, &mut wires).unwrap();
        }
        let out: Vec<(u8, u64)> = drain(&mut wires, 2).iter().map(|s| (s.tag(), s.payload())).collect();
        assert_eq!(out, vec![(2, 10), (7, 11), (3, 20), (7, 21)]);
    }

    #[test]
    fn one_empty_port_does_not_block_the_other() {
        let (mut c, mut wires) = collector(2);
        wires[1].push(Segment::tagged(sid(2), 1), 0);
        wires[1].push(Segment::tagged(sid(2), 2), 0);
        for cycle in 1..=5 {
            c.step(cycle, &mut wires).unwrap();
        }
        assert_eq!(drain(&mut wires, 2).len(), 2);
    }

    #[test]
    fn orphan_continuation_is_a_fault() {
        let (mut c, mut wires) = collector(2);
        wires[0].push(Segment::null(5), 0);
        match c.step(1, &mut wires) {
            Err(Fault::OrphanContinuation { b_id: 9, port: 0 }) => {}
            other => panic!("expected orphan fault, got {other:?}"),
        }
    }

    #[test]
    fn end_is_a_barrier_emitted_once_after_all_ports() {
        let (mut c, mut wires) = collector(3);
        let end = Segment::tagged(StreamId::END, 0);
        wires[0].push(end, 0);
        wires[0].push(end, 5); // a second END for the next run
        wires[1].push(Segment::tagged(sid(2), 7), 0);
        wires[1].push(end, 0);
        wires[2].push(end, 0);
        for cycle in 1..=8 {
            c.step(cycle, &mut wires).unwrap();
        }
        let out: Vec<(u8, u64)> = drain(&mut wires, 3).iter().map(|s| (s.tag(), s.payload())).collect();
        // the data tuple first, then exactly one END
        assert_eq!(out, vec![(2, 7), (5, 0)]);
    }

    /// Randomized multi-port schedules: the output tuple multiset equals
    /// the input multiset and per-port order is preserved.
    #[test]
    fn multiset_and_per_port_order_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0117);
        for _ in 0..100 {
            let ports = rng.gen_range(1..=4usize);
            let mut wires = vec![Wire::new(4096); ports + 1];
            let mut c = Collector::new(1, (0..ports).collect(), ports, StreamId::END);
            let mut per_port: Vec<Vec<(u64, usize)>> = vec![Vec::new(); ports];
            for p in 0..ports {
                // tuples pushed at staggered cycles to vary availability
                let mut cycle = 0;
                for i in 0..rng.gen_range(0..20u64) {
                    let segs = rng.gen_range(1..=3usize);
                    let id = (p as u64) << 32 | i;
                    wires[p].push(Segment::tagged(sid(2), id), cycle);
                    for _ in 1..segs {
                        cycle += rng.gen_range(0..2u64);
                        wires[p].push(Segment::null(id), cycle);
                    }
                    per_port[p].push((id, segs));
                    cycle += rng.gen_range(0..3u64);
                }
            }
            for cycle in 1..=2000 {
                c.step(cycle, &mut wires).unwrap();
            }
            let out = drain(&mut wires, ports);
            // reassemble tuples
            let mut got: Vec<(u64, usize)> = Vec::new();
            for s in &out {
                if s.is_null_continuation() {
                    got.last_mut().expect("tagged first").1 += 1;
                } else {
                    got.push((s.payload(), 1));
                }
            }
            let mut want: Vec<(u64, usize)> = per_port.iter().flatten().copied().collect();
            let mut got_sorted = got.clone();
            got_sorted.sort_unstable();
            want.sort_unstable();
            assert_eq!(got_sorted, want, "tuple multiset");
            for p in 0..ports {
                let seq: Vec<u64> = got
                    .iter()
                    .map(|&(id, _)| id)
                    .filter(|id| (id >> 32) as usize == p)
                    .collect();
                let want_seq: Vec<u64> = per_port[p].iter().map(|&(id, _)| id).collect();
                assert_eq!(seq, want_seq, "per-port order {p}");
            }
        }
    }
}
