//! Deployment and the run loop.
//!
//! `deploy` feeds an instruction program through the Data Streams input,
//! drains the fabric to quiescence and then verifies that every targeted
//! block holds the intended entry. `run` injects a finite segment schedule
//! (one segment per cycle), samples metrics, and terminates when the
//! fabric is fully drained.

use crate::engine::instance::{Block, TopologyInstance};
use crate::engine::metrics::{CheckpointSample, MetricRecorder, MetricSample};
use crate::fault::Fault;
use crate::instr::{encode_noc_instruction, encode_pu_instruction, NocInstruction};
use crate::join::q3::OverflowOccupancy;
use crate::punits::UnitKind;
use crate::topology::InstructionProgram;
use crate::wire::{Segment, StreamId};

/// Default cycle cap; override per call or via `DIBA_CYCLE_CAP`.
pub const DEFAULT_CYCLE_CAP: u64 = 10_000_000_000;

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub cycle_cap: u64,
    /// Input tuples between occupancy checkpoints (0 disables).
    pub checkpoint_interval: u64,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions { cycle_cap: DEFAULT_CYCLE_CAP, checkpoint_interval: 250 }
    }
}

/// A tuple collected at the sink: stream id plus raw payload words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SinkTuple {
    pub stream: StreamId,
    pub payloads: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub outputs: Vec<SinkTuple>,
    pub total_cycles: u64,
    pub samples: Vec<MetricSample>,
    pub checkpoints: Vec<CheckpointSample>,
    pub input_tuples: u64,
}

fn join_occupancy(instance: &TopologyInstance) -> OverflowOccupancy {
    for block in &instance.blocks {
        if let Block::Unit(u) = block {
            if let Some(occ) = u.overflow_occupancy() {
                return occ;
            }
        }
    }
    [0; 4]
}

/// Drives the instance until nothing can move and nothing is buffered.
/// Movement-free but non-empty states are deadlocks and fault loudly.
fn run_to_quiescence(
    instance: &mut TopologyInstance,
    schedule: &[Segment],
    cycle_cap: u64,
    mut recorder: Option<&mut MetricRecorder>,
) -> Result<(Vec<SinkTuple>, u64), Fault> {
    let start_cycle = instance.cycle;
    let mut next = 0usize;
    let mut outputs: Vec<SinkTuple> = Vec::new();

    loop {
        let cycle = instance.cycle;
        if cycle - start_cycle >= cycle_cap {
            return Err(Fault::CycleCapExceeded { cap: cycle_cap });
        }

        // Source: one segment per cycle into the entry wire.
        let mut moved = false;
        if next < schedule.len() && instance.wires[instance.entry_wire].can_push() {
            let seg = schedule[next];
            instance.wires[instance.entry_wire].push(seg, cycle);
            next += 1;
            moved = true;
            if seg.stream().map(|s| s.is_data()).unwrap_or(false) {
                if let Some(rec) = recorder.as_deref_mut() {
                    rec.input_accepted(join_occupancy(instance));
                }
            }
        }

        if instance.advance_cycle()? {
            moved = true;
        }

        // Sink: drain everything that has arrived.
        while let Some(seg) = instance.wires[instance.sink_wire].pop_ready(instance.cycle) {
            moved = true;
            match seg.stream() {
                Some(s) if s.is_data() => {
                    outputs.push(SinkTuple { stream: s, payloads: vec![seg.payload()] })
                }
                Some(_) => {} // drained instructions are spent
                None => match outputs.last_mut() {
                    Some(t) => t.payloads.push(seg.payload()),
                    None => return Err(Fault::OrphanContinuation { b_id: u16::MAX, port: 0 }),
                },
            }
        }

        if let Some(rec) = recorder.as_deref_mut() {
            rec.cycle_end(join_occupancy(instance));
        }

        if !moved && next == schedule.len() {
            if instance.has_backlog() {
                return Err(Fault::Stuck {
                    segments: instance.segments_in_flight(),
                    cycle: instance.cycle,
                });
            }
            break;
        }
    }
    Ok((outputs, instance.cycle - start_cycle))
}

/// Encodes a program into its deployment segment schedule.
pub fn program_schedule(program: &InstructionProgram) -> Result<Vec<Segment>, Fault> {
    let mut schedule = Vec::new();
    for instr in &program.noc {
        schedule.push(encode_noc_instruction(instr)?);
    }
    for pred in &program.predicates {
        schedule.extend(encode_pu_instruction(pred)?);
    }
    Ok(schedule)
}

/// Feeds the program through the Data Streams input, drains to quiescence,
/// then verifies every instruction landed. Deploying the same program twice
/// is idempotent (table upserts).
pub fn deploy(instance: &mut TopologyInstance, program: &InstructionProgram) -> Result<(), Fault> {
    let schedule = program_schedule(program)?;
    run_to_quiescence(instance, &schedule, DEFAULT_CYCLE_CAP, None)?;
    verify_deployment(instance, program)
}

fn verify_deployment(
    instance: &TopologyInstance,
    program: &InstructionProgram,
) -> Result<(), Fault> {
    for instr in &program.noc {
        let block = instance
            .block_by_bid(instr.b_id())
            .ok_or(Fault::UnknownBid { b_id: instr.b_id() })?;
        let ok = match (instr, block) {
            (
                NocInstruction::GSwitchA { stream, port_mask, seg_count, .. },
                Block::GSwitchA(sw),
            ) => sw
                .entry(*stream)
                .map(|e| e.dest_mask == *port_mask && e.seg_count == *seg_count)
                .unwrap_or(false),
            (NocInstruction::LSwitch { stream, s_filter, .. }, Block::LSwitch(sw)) => {
                sw.entry(*stream) == Some(*s_filter)
            }
            _ => false,
        };
        if !ok {
            return Err(Fault::DeployMismatch {
                b_id: instr.b_id(),
                detail: format!("expected {instr}"),
            });
        }
    }
    for pred in &program.predicates {
        let block =
            instance.block_by_bid(pred.b_id).ok_or(Fault::UnknownBid { b_id: pred.b_id })?;
        let ok = match block {
            Block::Unit(u) => match &u.kind {
                UnitKind::Selection(sel) => sel.atoms() == pred.atoms.as_slice(),
                _ => false,
            },
            _ => false,
        };
        if !ok {
            return Err(Fault::DeployMismatch {
                b_id: pred.b_id,
                detail: "selection predicate not applied".into(),
            });
        }
    }
    Ok(())
}

/// Runs a deployed instance over a finite source schedule.
pub fn run(
    instance: &mut TopologyInstance,
    schedule: &[Segment],
    options: RunOptions,
) -> Result<RunResult, Fault> {
    let mut recorder = MetricRecorder::new(options.checkpoint_interval);
    let (outputs, total_cycles) =
        run_to_quiescence(instance, schedule, options.cycle_cap, Some(&mut recorder))?;
    recorder.finish();
    Ok(RunResult {
        outputs,
        total_cycles,
        samples: recorder.samples.clone(),
        checkpoints: recorder.checkpoints.clone(),
        input_tuples: recorder.input_total(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_options_have_documented_cap() {
        assert_eq!(RunOptions::default().cycle_cap, 10u64.pow(10));
    }
}
