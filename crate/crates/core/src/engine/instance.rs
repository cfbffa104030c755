//! The materialized topology: blocks, wires, and the single-cycle stepper.

use crate::engine::cost::CostModel;
use crate::fault::Fault;
use crate::noc::{Collector, GSwitchA, GSwitchB, LSwitch, Wire, WireId};
use crate::punits::PUnit;
use crate::topology::TopologyMeta;
use crate::wire::StreamId;

/// Every component kind that occupies a block id.
#[derive(Debug, Clone)]
pub enum Block {
    GSwitchA(GSwitchA),
    GSwitchB(GSwitchB),
    LSwitch(LSwitch),
    Collector(Collector),
    Unit(PUnit),
}

impl Block {
    pub fn b_id(&self) -> u16 {
        match self {
            Block::GSwitchA(b) => b.b_id,
            Block::GSwitchB(b) => b.b_id,
            Block::LSwitch(b) => b.b_id,
            Block::Collector(b) => b.b_id,
            Block::Unit(b) => b.b_id,
        }
    }

    fn step(&mut self, cycle: u64, wires: &mut [Wire], cost: &CostModel) -> Result<bool, Fault> {
        match self {
            Block::GSwitchA(b) => b.step(cycle, wires),
            Block::GSwitchB(b) => b.step(cycle, wires),
            Block::LSwitch(b) => b.step(cycle, wires),
            Block::Collector(b) => b.step(cycle, wires),
            Block::Unit(b) => b.step(cycle, wires, cost),
        }
    }

    fn has_backlog(&self, cycle: u64) -> bool {
        match self {
            Block::Unit(u) => u.has_backlog() || u.is_busy(cycle),
            Block::GSwitchB(b) => b.shared_len() > 0,
            _ => false,
        }
    }

    pub fn as_unit(&self) -> Option<&PUnit> {
        match self {
            Block::Unit(u) => Some(u),
            _ => None,
        }
    }

    pub fn as_unit_mut(&mut self) -> Option<&mut PUnit> {
        match self {
            Block::Unit(u) => Some(u),
            _ => None,
        }
    }
}

/// A wired brick matrix ready to be programmed and clocked.
///
/// Blocks are stored in topological order (sources feed lower indexes);
/// stepping walks them in that fixed order every cycle. Since segments
/// pushed into a wire only become visible the following cycle, the step
/// order never changes results, only keeps them reproducible.
#[derive(Debug, Clone)]
pub struct TopologyInstance {
    pub blocks: Vec<Block>,
    pub wires: Vec<Wire>,
    /// The Data Streams input port: instructions and tuples both enter here.
    pub entry_wire: WireId,
    /// Terminal wire drained by the sink.
    pub sink_wire: WireId,
    pub cost: CostModel,
    pub end_stream: StreamId,
    pub meta: TopologyMeta,
    pub cycle: u64,
}

impl TopologyInstance {
    /// Steps every component once. Returns whether anything moved or a
    /// busy countdown is pending; stalled components retry next cycle.
    pub fn advance_cycle(&mut self) -> Result<bool, Fault> {
        let cycle = self.cycle;
        let wires = &mut self.wires;
        let mut any = false;
        for block in &mut self.blocks {
            if block.step(cycle, wires, &self.cost)? {
                any = true;
            }
        }
        self.cycle += 1;
        Ok(any)
    }

    pub fn block_by_bid(&self, b_id: u16) -> Option<&Block> {
        self.blocks.iter().find(|b| b.b_id() == b_id)
    }

    pub fn block_by_bid_mut(&mut self, b_id: u16) -> Option<&mut Block> {
        self.blocks.iter_mut().find(|b| b.b_id() == b_id)
    }

    pub fn segments_in_flight(&self) -> usize {
        self.wires.iter().map(|w| w.len()).sum()
    }

    pub fn has_backlog(&self) -> bool {
        let cycle = self.cycle;
        self.segments_in_flight() > 0 || self.blocks.iter().any(|b| b.has_backlog(cycle))
    }
}
