//! Query assignment: places plan operators onto compatible free slots and
//! emits the instruction program that wires their streams.
//!
//! Placement is slot-kind matching within one column: stage i+1 must land
//! on a strictly later row than stage i (the dataflow is unidirectional),
//! rows in between are bridged through bypass slots. Multi-column
//! topologies are reached through the row-0 east chain. Emission order is
//! frozen: GSwitch entries by (block, stream), then LSwitch entries, then
//! unit predicates by block.

use crate::engine::instance::{Block, TopologyInstance};
use crate::instr::{NocInstruction, PredicateAtom, PredicateProgram};
use crate::topology::plan::{PlanOp, QueryPlan};
use crate::wire::StreamId;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// The ordered instruction list produced for one plan.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionProgram {
    pub noc: Vec<NocInstruction>,
    pub predicates: Vec<PredicateProgram>,
}

impl InstructionProgram {
    pub fn len(&self) -> usize {
        self.noc.len() + self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The textual dump form, one instruction per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for i in &self.noc {
            out.push_str(&i.to_string());
            out.push('\n');
        }
        for p in &self.predicates {
            out.push_str(&format!("P:{}:{} atoms\n", p.b_id, p.atoms.len()));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignError {
    #[error("no feasible placement: {0}")]
    NoFeasiblePlacement(String),
    #[error("predicate field {field:?} not in the input layout of {slot}")]
    UnknownField { slot: String, field: String },
    #[error("conflicting segment counts for stream {stream} at block {b_id}")]
    SegCountConflict { b_id: u16, stream: StreamId },
    #[error("operator {0} needs an input layout for its predicate")]
    MissingLayout(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EntryKind {
    GSwitch,
    LSwitch,
}

#[derive(Debug, Clone, Copy)]
struct PendingEntry {
    kind: EntryKind,
    mask: u8,
    seg_count: u8,
}

struct Emitter<'a> {
    entries: BTreeMap<(u16, u8), PendingEntry>,
    instance: &'a TopologyInstance,
}

impl<'a> Emitter<'a> {
    fn new(instance: &'a TopologyInstance) -> Emitter<'a> {
        Emitter { entries: BTreeMap::new(), instance }
    }

    /// Merges an entry; masks union, segment counts must agree.
    fn add(
        &mut self,
        b_id: u16,
        kind: EntryKind,
        stream: StreamId,
        mask: u8,
        seg_count: u8,
    ) -> Result<(), AssignError> {
        // Fold in whatever an earlier deployment already routed here.
        let existing = match self.instance.block_by_bid(b_id) {
            Some(Block::GSwitchA(sw)) => {
                sw.entry(stream).map(|e| (e.dest_mask, e.seg_count))
            }
            Some(Block::LSwitch(sw)) => sw.entry(stream).map(|m| (m, seg_count)),
            _ => None,
        };
        let (base_mask, base_seg) = existing.unwrap_or((0, seg_count));
        if base_seg != seg_count {
            return Err(AssignError::SegCountConflict { b_id, stream });
        }
        let entry = self
            .entries
            .entry((b_id, stream.value()))
            .or_insert(PendingEntry { kind, mask: base_mask, seg_count });
        if entry.seg_count != seg_count {
            return Err(AssignError::SegCountConflict { b_id, stream });
        }
        entry.mask |= mask;
        Ok(())
    }

    fn into_program(self, predicates: Vec<PredicateProgram>) -> InstructionProgram {
        let mut gswitch = Vec::new();
        let mut lswitch = Vec::new();
        for ((b_id, stream), e) in self.entries {
            let stream = StreamId::new(stream).expect("stream validated");
            match e.kind {
                EntryKind::GSwitch => gswitch.push(NocInstruction::GSwitchA {
                    b_id,
                    stream,
                    port_mask: e.mask,
                    seg_count: e.seg_count,
                }),
                EntryKind::LSwitch => {
                    lswitch.push(NocInstruction::LSwitch { b_id, stream, s_filter: e.mask })
                }
            }
        }
        let mut noc = gswitch;
        noc.extend(lswitch);
        InstructionProgram { noc, predicates }
    }
}

/// A placed operator: its stage row and slot position.
#[derive(Debug, Clone)]
struct Placement {
    row: usize,
    /// (slot index, slot b_id) per op, stage-parallel with the plan.
    slots: Vec<(usize, u16)>,
}

const SOUTH: u8 = crate::instr::GSWITCH_PORT_SOUTH;
const EAST: u8 = crate::instr::GSWITCH_PORT_EAST;

fn try_place(
    plan: &QueryPlan,
    instance: &TopologyInstance,
    col: usize,
) -> Option<Vec<Placement>> {
    let rows = instance.meta.rows;
    let mut placements = Vec::with_capacity(plan.stages.len());
    let mut next_row = 0usize;
    for stage in &plan.stages {
        let mut placed = None;
        for row in next_row..rows {
            let brick = instance.meta.brick(row, col);
            let mut taken = vec![false; brick.slots.len()];
            let mut slots = Vec::with_capacity(stage.ops.len());
            let mut ok = true;
            for op in &stage.ops {
                let found = brick.slots.iter().enumerate().find(|(i, s)| {
                    !taken[*i] && s.kind == op.slot_kind && s.claimed_by.is_none()
                });
                match found {
                    Some((i, s)) => {
                        taken[i] = true;
                        slots.push((i, s.b_id));
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                placed = Some(Placement { row, slots });
                break;
            }
        }
        let p = placed?;
        next_row = p.row + 1;
        placements.push(p);
    }
    Some(placements)
}

/// Maps plan operators onto free slots and derives the program that routes
/// every plan edge to its consumers, the END control stream to every used
/// brick, and the final output down to the terminal switches.
pub fn assign_query(
    plan: &QueryPlan,
    instance: &mut TopologyInstance,
) -> Result<InstructionProgram, AssignError> {
    let cols = instance.meta.cols;
    let rows = instance.meta.rows;
    let (col, placements) = (0..cols)
        .find_map(|c| try_place(plan, instance, c).map(|p| (c, p)))
        .ok_or_else(|| {
            AssignError::NoFeasiblePlacement(format!(
                "no column offers the slot kinds of plan {:?} in stage order",
                plan.name
            ))
        })?;

    let mut emitter = Emitter::new(instance);
    let g_bid = |row: usize| instance.meta.gswitch_bids[row][col];
    let l_bid = |row: usize| instance.meta.brick(row, col).lswitch;
    let bypass_mask = |row: usize| -> u8 {
        let brick = instance.meta.brick(row, col);
        brick
            .slots
            .iter()
            .position(|s| s.kind == super::SlotKind::Bypass)
            .map(|i| 1 << i)
            .expect("every brick has a bypass")
    };
    let all_slots_mask = |row: usize| -> u8 {
        ((1u16 << instance.meta.brick(row, col).slots.len()) - 1) as u8
    };

    // Which stage produced each stream, for origin rows.
    let mut produced_at: BTreeMap<u8, usize> = BTreeMap::new();
    let mut predicates = Vec::new();

    for (stage_idx, (stage, placement)) in plan.stages.iter().zip(&placements).enumerate() {
        let dest_row = placement.row;
        for (op, &(slot_idx, slot_bid)) in stage.ops.iter().zip(&placement.slots) {
            for input in &op.inputs {
                let origin = produced_at
                    .get(&input.stream.value())
                    .map(|&row| row + 1)
                    .unwrap_or(0);
                // Source streams entering from the top reach the column
                // through the row-0 east chain.
                if origin == 0 {
                    for j in 0..col {
                        emitter.add(
                            instance.meta.gswitch_bids[0][j],
                            EntryKind::GSwitch,
                            input.stream,
                            EAST,
                            input.seg_count,
                        )?;
                    }
                }
                for row in origin..=dest_row {
                    emitter.add(
                        g_bid(row),
                        EntryKind::GSwitch,
                        input.stream,
                        SOUTH,
                        input.seg_count,
                    )?;
                    let mask = if row == dest_row { 1 << slot_idx } else { bypass_mask(row) };
                    emitter.add(l_bid(row), EntryKind::LSwitch, input.stream, mask, input.seg_count)?;
                }
            }
            if !op.predicate.is_empty() {
                predicates.push(resolve_predicate(op, slot_bid)?);
            }
        }
        for op in &stage.ops {
            if let Some(out) = &op.output {
                produced_at.insert(out.stream.value(), placement.row);
            }
        }
        let _ = stage_idx;
    }

    // Final outputs drain through the remaining rows to the terminal
    // switches, which default-route to the sink.
    if let (Some(last_stage), Some(last_placement)) = (plan.stages.last(), placements.last()) {
        for op in &last_stage.ops {
            if let Some(out) = &op.output {
                for row in last_placement.row + 1..rows {
                    emitter.add(g_bid(row), EntryKind::GSwitch, out.stream, SOUTH, out.seg_count)?;
                    emitter.add(
                        l_bid(row),
                        EntryKind::LSwitch,
                        out.stream,
                        bypass_mask(row),
                        out.seg_count,
                    )?;
                }
            }
        }
    }

    // The END control tuple flushes every brick of the used column.
    if plan.uses_end {
        let end = instance.end_stream;
        for j in 0..col {
            emitter.add(instance.meta.gswitch_bids[0][j], EntryKind::GSwitch, end, EAST, 1)?;
        }
        for row in 0..rows {
            emitter.add(g_bid(row), EntryKind::GSwitch, end, SOUTH, 1)?;
            emitter.add(l_bid(row), EntryKind::LSwitch, end, all_slots_mask(row), 1)?;
        }
    }

    let program = emitter.into_program(predicates);

    // Claim the slots for this plan.
    for (stage, placement) in plan.stages.iter().zip(&placements) {
        for (_, &(slot_idx, _)) in stage.ops.iter().zip(&placement.slots) {
            instance.meta.brick_mut(placement.row, col).slots[slot_idx].claimed_by =
                Some(plan.name.clone());
        }
    }
    Ok(program)
}

fn resolve_predicate(op: &PlanOp, b_id: u16) -> Result<PredicateProgram, AssignError> {
    let layout = op
        .input_layout
        .as_ref()
        .ok_or_else(|| AssignError::MissingLayout(op.slot_kind.name().to_string()))?;
    let atoms = op
        .predicate
        .iter()
        .map(|a| {
            layout
                .field_index(&a.field)
                .map(|field| PredicateAtom { field, op: a.op, value: a.value })
                .ok_or_else(|| AssignError::UnknownField {
                    slot: op.slot_kind.name().to_string(),
                    field: a.field.clone(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PredicateProgram { b_id, atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::plan::{q3_plan, NamedAtom, PlanStage, Q3Params};
    use crate::topology::{build_topology, BrickSpec, BuildConfig, SlotKind, TopologyMatrix};
    use crate::tpch::layouts;
    use crate::instr::CmpOp;
    use crate::join::q3::Q3Variant;
    use crate::topology::plan::StreamUse;

    fn single_selection_plan() -> QueryPlan {
        let layout = layouts::lineitem_q3();
        QueryPlan {
            name: "sel".into(),
            uses_end: false,
            stages: vec![PlanStage {
                ops: vec![PlanOp {
                    slot_kind: SlotKind::SelLineitemQ3,
                    inputs: vec![StreamUse { stream: layouts::LINEITEM, seg_count: 2 }],
                    output: Some(StreamUse { stream: layouts::LINEITEM, seg_count: 2 }),
                    predicate: vec![NamedAtom {
                        field: "l_shipdate".into(),
                        op: CmpOp::Gt,
                        value: 1169,
                    }],
                    input_layout: Some(layout),
                }],
            }],
        }
    }

    #[test]
    fn single_selection_on_1x1_needs_three_instructions() {
        let matrix = TopologyMatrix {
            bricks: vec![vec![BrickSpec {
                slots: vec![SlotKind::Bypass, SlotKind::SelLineitemQ3],
            }]],
        };
        let mut instance = build_topology(&matrix, &BuildConfig::default()).unwrap();
        let program = assign_query(&single_selection_plan(), &mut instance).unwrap();
        assert_eq!(program.len(), 3, "entry switch + local switch + predicate");
        assert_eq!(program.noc.len(), 2);
        assert_eq!(program.predicates.len(), 1);
    }

    #[test]
    fn misordered_plan_is_rejected() {
        // order-by placed before the selection upstream violates the flow
        let layout = layouts::group_out_q3();
        let plan = QueryPlan {
            name: "backwards".into(),
            uses_end: false,
            stages: vec![
                PlanStage {
                    ops: vec![PlanOp {
                        slot_kind: SlotKind::OrderByQ3,
                        inputs: vec![StreamUse { stream: layouts::LINEITEM, seg_count: 2 }],
                        output: None,
                        predicate: vec![],
                        input_layout: Some(layout),
                    }],
                },
                PlanStage {
                    ops: vec![PlanOp {
                        slot_kind: SlotKind::SelLineitemQ3,
                        inputs: vec![StreamUse { stream: layouts::LINEITEM, seg_count: 2 }],
                        output: None,
                        predicate: vec![],
                        input_layout: None,
                    }],
                },
            ],
        };
        let mut instance = build_topology(
            &TopologyMatrix::q3_4x1(Q3Variant::Optimized),
            &BuildConfig::default(),
        )
        .unwrap();
        assert!(matches!(
            assign_query(&plan, &mut instance),
            Err(AssignError::NoFeasiblePlacement(_))
        ));
    }

    #[test]
    fn q3_program_is_deterministic() {
        let cfg = BuildConfig::default();
        let mut a = build_topology(&TopologyMatrix::q3_4x1(Q3Variant::Optimized), &cfg).unwrap();
        let mut b = build_topology(&TopologyMatrix::q3_4x1(Q3Variant::Optimized), &cfg).unwrap();
        let plan = q3_plan(&Q3Params::default());
        assert_eq!(assign_query(&plan, &mut a).unwrap(), assign_query(&plan, &mut b).unwrap());
    }

    #[test]
    fn second_assignment_of_claimed_slots_fails() {
        let cfg = BuildConfig::default();
        let mut inst = build_topology(&TopologyMatrix::q3_4x1(Q3Variant::Optimized), &cfg).unwrap();
        let plan = q3_plan(&Q3Params::default());
        assign_query(&plan, &mut inst).unwrap();
        assert!(assign_query(&plan, &mut inst).is_err());
    }
}
