//! Processing units occupying brick slots.
//!
//! Every unit follows the same protocol: one input port, one output port.
//! The wrapper in this module owns the protocol plumbing — segment
//! assembly into tuples, instruction pass-through, predicate programming,
//! the bounded output queue that results enter tuple-atomically, and the
//! busy counter that charges the cost model — while the unit kinds supply
//! the per-tuple behavior.
//!
//! Instructions (tags 0 and 1) are always forwarded downstream so a program
//! injected at the instance input reaches every block; a unit additionally
//! applies tag-0 instructions addressed to its own block id.

pub mod agg;
pub mod orderby;
pub mod selection;
pub mod sync;

pub use agg::{AggGroupBy, AggSpec};
pub use orderby::{OrderBy, OrderKey};
pub use selection::SelectionPredicate;
pub use sync::{synchronizer_merge, SynchronizerMerge};

use crate::engine::cost::CostModel;
use crate::fault::Fault;
use crate::instr::{decode_pu_instruction, pu_segment_count_from_header};
use crate::join::cmj::CmjCost;
use crate::join::q3::{OverflowOccupancy, Q3JoinCore};
use crate::noc::{Wire, WireId};
use crate::tuple::{decode_payloads, encode_tuple, Tuple, TupleLayout};
use crate::wire::{Segment, StreamId};
use std::collections::{BTreeMap, VecDeque};

/// Per-stream input layouts of a unit.
#[derive(Debug, Clone, Default)]
pub struct StreamLayouts {
    map: BTreeMap<u8, TupleLayout>,
}

impl StreamLayouts {
    pub fn new() -> StreamLayouts {
        StreamLayouts::default()
    }

    pub fn with(mut self, stream: StreamId, layout: TupleLayout) -> StreamLayouts {
        self.map.insert(stream.value(), layout);
        self
    }

    pub fn get(&self, stream: StreamId) -> Option<&TupleLayout> {
        self.map.get(&stream.value())
    }
}

/// What a unit does with each assembled input tuple.
#[derive(Debug, Clone)]
pub enum UnitKind {
    /// Pass-through; carries streams and instructions to the next row.
    Bypass,
    /// Predicate filter; the predicate arrives via a tag-0 instruction.
    Selection(SelectionPredicate),
    /// The three-way join customized for the shipping-priority query.
    JoinQ3(Box<JoinUnit>),
    /// Merged aggregation + group-by, flushed by END.
    AggGroupBy(Box<AggGroupBy>),
    /// Sorted top-k emission, flushed by END.
    OrderBy(Box<OrderBy>),
}

/// Join core plus its output encoding.
#[derive(Debug, Clone)]
pub struct JoinUnit {
    pub core: Q3JoinCore,
    pub out_stream: StreamId,
    pub out_layout: TupleLayout,
    /// Values of the output tuple, as indexes into (customer, order,
    /// lineitem) value vectors: (source, field) with source 0=c, 1=o, 2=l.
    pub projection: Vec<(u8, usize)>,
}

#[derive(Debug, Clone)]
struct Assembly {
    stream: StreamId,
    segs: Vec<Segment>,
    need: usize,
}

/// A processing unit in a brick slot.
#[derive(Debug, Clone)]
pub struct PUnit {
    pub b_id: u16,
    pub kind: UnitKind,
    in_wire: WireId,
    out_wire: WireId,
    layouts: StreamLayouts,
    end_stream: StreamId,
    asm: Option<Assembly>,
    /// Results waiting for queue space; admitted tuple-atomically.
    pending: VecDeque<Vec<Segment>>,
    out_queue: VecDeque<Segment>,
    queue_capacity: usize,
    busy_until: u64,
    /// Total busy cycles charged, for cost attribution.
    pub busy_total: u64,
    /// Assembled data tuples, recorded when tracing is on (delivery tests).
    pub ingest_log: Option<Vec<Tuple>>,
}

impl PUnit {
    pub fn new(
        b_id: u16,
        kind: UnitKind,
        in_wire: WireId,
        out_wire: WireId,
        layouts: StreamLayouts,
        end_stream: StreamId,
        queue_capacity: usize,
    ) -> PUnit {
        PUnit {
            b_id,
            kind,
            in_wire,
            out_wire,
            layouts,
            end_stream,
            asm: None,
            pending: VecDeque::new(),
            out_queue: VecDeque::new(),
            queue_capacity,
            busy_until: 0,
            busy_total: 0,
            ingest_log: None,
        }
    }

    pub fn record_ingest(&mut self) {
        self.ingest_log = Some(Vec::new());
    }

    /// Per-index overflow occupancy when this unit hosts the join.
    pub fn overflow_occupancy(&self) -> Option<OverflowOccupancy> {
        match &self.kind {
            UnitKind::JoinQ3(j) => Some(j.core.overflow_occupancy()),
            _ => None,
        }
    }

    pub fn has_backlog(&self) -> bool {
        !self.pending.is_empty() || !self.out_queue.is_empty() || self.asm.is_some()
    }

    pub fn is_busy(&self, cycle: u64) -> bool {
        self.busy_until > cycle
    }

    fn queue_tuple(&mut self, segs: Vec<Segment>) {
        debug_assert!(segs.len() <= self.queue_capacity);
        self.pending.push_back(segs);
    }

    /// One cycle. Drains the output queue by one segment, admits pending
    /// results when they fit whole, and consumes at most one input segment
    /// when idle.
    pub fn step(&mut self, cycle: u64, wires: &mut [Wire], cost: &CostModel) -> Result<bool, Fault> {
        let mut moved = false;

        if let Some(&seg) = self.out_queue.front() {
            if wires[self.out_wire].can_push() {
                wires[self.out_wire].push(seg, cycle);
                self.out_queue.pop_front();
                moved = true;
            }
        }

        while let Some(front) = self.pending.front() {
            if self.queue_capacity - self.out_queue.len() >= front.len() {
                let t = self.pending.pop_front().expect("front exists");
                self.out_queue.extend(t);
                moved = true;
            } else {
                break;
            }
        }

        if self.busy_until > cycle {
            // Busy counts as activity: the countdown itself is progress.
            return Ok(true);
        }
        // Results must fully drain into the queue before new input is
        // taken; keeps emission order equal to processing order.
        if !self.pending.is_empty() {
            return Ok(moved);
        }

        let Some(seg) = wires[self.in_wire].peek_ready(cycle) else {
            return Ok(moved);
        };

        if let UnitKind::Bypass = self.kind {
            // Pure segment pass-through with one cycle of latency.
            if self.out_queue.len() < self.queue_capacity {
                wires[self.in_wire].pop_ready(cycle);
                self.out_queue.push_back(seg);
                self.log_bypass(seg);
                return Ok(true);
            }
            return Ok(moved);
        }

        match seg.stream() {
            Some(s) if s.is_noc_instruction() => {
                if self.out_queue.len() < self.queue_capacity {
                    wires[self.in_wire].pop_ready(cycle);
                    self.out_queue.push_back(seg);
                    moved = true;
                }
            }
            Some(s) if s.is_pu_instruction() => {
                wires[self.in_wire].pop_ready(cycle);
                let need = pu_segment_count_from_header(seg)?;
                self.asm = Some(Assembly { stream: s, segs: vec![seg], need });
                self.finish_if_complete(cycle, cost)?;
                moved = true;
            }
            Some(s) => {
                let need = if s == self.end_stream {
                    1
                } else {
                    self.layouts
                        .get(s)
                        .ok_or(Fault::UnknownStreamAtUnit { stream: s, b_id: self.b_id })?
                        .segment_count()
                };
                wires[self.in_wire].pop_ready(cycle);
                self.asm = Some(Assembly { stream: s, segs: vec![seg], need });
                self.finish_if_complete(cycle, cost)?;
                moved = true;
            }
            None => {
                let Some(asm) = self.asm.as_mut() else {
                    return Err(Fault::OrphanContinuation { b_id: self.b_id, port: 0 });
                };
                wires[self.in_wire].pop_ready(cycle);
                asm.segs.push(seg);
                self.finish_if_complete(cycle, cost)?;
                moved = true;
            }
        }
        Ok(moved)
    }

    /// Bypass delivery tracing assembles tuples on the side without
    /// affecting forwarding: data payloads grouped by their tagged segment.
    fn log_bypass(&mut self, seg: Segment) {
        let Some(log) = self.ingest_log.as_mut() else { return };
        match seg.stream() {
            Some(s) if s.is_data() => log.push(Tuple::new(s, vec![seg.payload()])),
            None => {
                if let Some(last) = log.last_mut() {
                    last.values.push(seg.payload());
                }
            }
            _ => {}
        }
    }

    fn finish_if_complete(&mut self, cycle: u64, cost: &CostModel) -> Result<(), Fault> {
        let complete = self.asm.as_ref().map(|a| a.segs.len() == a.need).unwrap_or(false);
        if !complete {
            return Ok(());
        }
        let asm = self.asm.take().expect("assembly exists");
        if asm.stream.is_pu_instruction() {
            let prog = decode_pu_instruction(&asm.segs)?;
            if prog.b_id == self.b_id {
                if let UnitKind::Selection(pred) = &mut self.kind {
                    pred.program(&prog)?;
                }
            }
            self.queue_tuple(asm.segs);
            return Ok(());
        }
        self.process_tuple(asm, cycle, cost)
    }

    fn process_tuple(&mut self, asm: Assembly, cycle: u64, cost: &CostModel) -> Result<(), Fault> {
        let stream = asm.stream;
        let payloads: Vec<u64> = asm.segs.iter().map(|s| s.payload()).collect();
        let is_end = stream == self.end_stream;

        if let Some(log) = self.ingest_log.as_mut() {
            if !is_end {
                let layout = self.layouts.get(stream).expect("layout checked");
                log.push(Tuple::new(stream, decode_payloads(&payloads, layout)));
            }
        }

        match &mut self.kind {
            UnitKind::Bypass => unreachable!("bypass never assembles"),
            UnitKind::Selection(pred) => {
                self.busy_until = cycle + cost.selection;
                self.busy_total += cost.selection;
                if is_end {
                    self.queue_tuple(asm.segs);
                    return Ok(());
                }
                let layout = self.layouts.get(stream).expect("layout checked");
                let values = decode_payloads(&payloads, layout);
                if pred.matches(&values) {
                    self.queue_tuple(asm.segs);
                }
            }
            UnitKind::JoinQ3(join) => {
                if is_end {
                    self.busy_until = cycle + 1;
                    self.busy_total += 1;
                    self.queue_tuple(asm.segs);
                    return Ok(());
                }
                let b_id = self.b_id;
                let layout = self.layouts.get(stream).expect("layout checked");
                let values = decode_payloads(&payloads, layout);
                let cmj_cost = CmjCost {
                    insert: cost.insert,
                    expire_extra: cost.expire_extra,
                    hash_probe: cost.hash_probe,
                    overflow_scan: cost.overflow_scan,
                };
                let (matches, cycles) =
                    join.core.ingest(stream, values, &cmj_cost).map_err(|f| match f {
                        Fault::UnknownStreamAtUnit { stream, .. } => {
                            Fault::UnknownStreamAtUnit { stream, b_id }
                        }
                        other => other,
                    })?;
                let out_stream = join.out_stream;
                let out_layout = join.out_layout.clone();
                let projection = join.projection.clone();
                self.busy_until = cycle + cycles;
                self.busy_total += cycles;
                let mut out = Vec::new();
                for m in &matches {
                    let values: Vec<u64> = projection
                        .iter()
                        .map(|&(src, field)| match src {
                            0 => m.customer[field],
                            1 => m.order[field],
                            _ => m.lineitem[field],
                        })
                        .collect();
                    let tuple = Tuple::new(out_stream, values);
                    let segs = encode_tuple(&tuple, &out_layout)
                        .map_err(|source| Fault::Codec { b_id, source })?;
                    out.push(segs);
                }
                for segs in out {
                    self.queue_tuple(segs);
                }
            }
            UnitKind::AggGroupBy(agg) => {
                if is_end {
                    let (groups, busy) = agg.flush();
                    let out_stream = agg.out_stream;
                    let out_layout = agg.out_layout.clone();
                    self.busy_until = cycle + busy.max(1) * cost.agg;
                    self.busy_total += busy.max(1) * cost.agg;
                    let mut encoded = Vec::new();
                    for values in groups {
                        let tuple = Tuple::new(out_stream, values);
                        let segs = encode_tuple(&tuple, &out_layout)
                            .map_err(|source| Fault::Codec { b_id: self.b_id, source })?;
                        encoded.push(segs);
                    }
                    for segs in encoded {
                        self.queue_tuple(segs);
                    }
                    self.queue_tuple(asm.segs); // END follows the groups
                    return Ok(());
                }
                let b_id = self.b_id;
                let capacity = agg.capacity;
                let layout = self.layouts.get(stream).expect("layout checked");
                let values = decode_payloads(&payloads, layout);
                agg.accumulate(&values)
                    .map_err(|_| Fault::GroupCapacityExceeded { b_id, capacity })?;
                self.busy_until = cycle + cost.agg;
                self.busy_total += cost.agg;
            }
            UnitKind::OrderBy(ob) => {
                if is_end {
                    let (rows, busy) = ob.flush();
                    let out_stream = ob.out_stream;
                    let out_layout = ob.out_layout.clone();
                    self.busy_until = cycle + busy.max(1) * cost.orderby_compare;
                    self.busy_total += busy.max(1) * cost.orderby_compare;
                    let mut encoded = Vec::new();
                    for values in rows {
                        let tuple = Tuple::new(out_stream, values);
                        let segs = encode_tuple(&tuple, &out_layout)
                            .map_err(|source| Fault::Codec { b_id: self.b_id, source })?;
                        encoded.push(segs);
                    }
                    for segs in encoded {
                        self.queue_tuple(segs);
                    }
                    self.queue_tuple(asm.segs);
                    return Ok(());
                }
                let layout = self.layouts.get(stream).expect("layout checked");
                let values = decode_payloads(&payloads, layout);
                let comparisons = ob.insert(values);
                self.busy_until = cycle + comparisons.max(1) * cost.orderby_compare;
                self.busy_total += comparisons.max(1) * cost.orderby_compare;
            }
        }
        Ok(())
    }
}
