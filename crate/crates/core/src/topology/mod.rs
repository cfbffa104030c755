//! Topology construction: brick matrices wired by global switches.
//!
//! A topology is a rows-by-columns matrix of bricks. Each brick packages
//! one LSwitch, up to four processing slots, and one collector. One
//! GSwitch-A sits above every brick: its south port feeds the brick's
//! LSwitch and its east port feeds the neighbouring column's switch, so
//! row 0 doubles as the distribution chain for multi-column layouts. The
//! collectors of the last row feed a chain of terminal GSwitch-A units
//! (one per column) that default-route results to the sink. A rows-by-one
//! matrix therefore uses rows+1 GSwitch-A units.
//!
//! Block ids are assigned breadth-first: per row, first the row's switches
//! west to east, then each brick's LSwitch, slots and collector; terminal
//! switches come last.

pub mod assign;
pub mod plan;

pub use assign::{assign_query, AssignError, InstructionProgram};
pub use plan::{NamedAtom, PlanOp, PlanStage, QueryPlan};

use crate::engine::cost::CostModel;
use crate::engine::instance::{Block, TopologyInstance};
use crate::join::hbsj::HbsjConfig;
use crate::join::q3::{Q3FieldMap, Q3JoinCore, Q3Variant};
use crate::noc::{Collector, GSwitchA, LSwitch, Wire, WireId};
use crate::punits::{AggGroupBy, AggSpec, JoinUnit, OrderBy, OrderKey, PUnit, SelectionPredicate, StreamLayouts, UnitKind};
use crate::tpch::layouts;
use crate::wire::StreamId;
use serde::{Deserialize, Serialize};

/// Slot kinds instantiable from the component library. Names follow the
/// identifiers used in the topology matrix sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotKind {
    #[serde(rename = "BYPASS")]
    Bypass,
    #[serde(rename = "Q3_SEL1")]
    SelLineitemQ3,
    #[serde(rename = "Q3_SEL2")]
    SelCustomerQ3,
    #[serde(rename = "Q3_SEL3")]
    SelOrdersQ3,
    #[serde(rename = "Q3_CMJOIN")]
    JoinQ3,
    #[serde(rename = "Q3_CMJOIN_DIRECT")]
    JoinQ3Direct,
    #[serde(rename = "Q3_GROUPBY_AGG")]
    AggQ3,
    #[serde(rename = "Q3_ORDERBY")]
    OrderByQ3,
    #[serde(rename = "Q1_SEL1")]
    SelLineitemQ1,
    #[serde(rename = "Q1_GROUPBY_AGG")]
    AggQ1,
    #[serde(rename = "Q1_ORDERBY")]
    OrderByQ1,
}

impl SlotKind {
    pub fn name(self) -> &'static str {
        match self {
            SlotKind::Bypass => "BYPASS",
            SlotKind::SelLineitemQ3 => "Q3_SEL1",
            SlotKind::SelCustomerQ3 => "Q3_SEL2",
            SlotKind::SelOrdersQ3 => "Q3_SEL3",
            SlotKind::JoinQ3 => "Q3_CMJOIN",
            SlotKind::JoinQ3Direct => "Q3_CMJOIN_DIRECT",
            SlotKind::AggQ3 => "Q3_GROUPBY_AGG",
            SlotKind::OrderByQ3 => "Q3_ORDERBY",
            SlotKind::SelLineitemQ1 => "Q1_SEL1",
            SlotKind::AggQ1 => "Q1_GROUPBY_AGG",
            SlotKind::OrderByQ1 => "Q1_ORDERBY",
        }
    }
}

/// One brick: its slot kinds in port order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BrickSpec {
    pub slots: Vec<SlotKind>,
}

/// Rows-by-columns matrix of brick specs (the TOPO_MATRIX source form).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyMatrix {
    pub bricks: Vec<Vec<BrickSpec>>,
}

impl TopologyMatrix {
    pub fn rows(&self) -> usize {
        self.bricks.len()
    }

    pub fn cols(&self) -> usize {
        self.bricks.first().map(|r| r.len()).unwrap_or(0)
    }

    /// A matrix of bypass-only bricks (used by routing fuzz tests).
    pub fn uniform_bypass(rows: usize, cols: usize, slots: usize) -> TopologyMatrix {
        TopologyMatrix {
            bricks: vec![
                vec![BrickSpec { slots: vec![SlotKind::Bypass; slots] }; cols];
                rows
            ],
        }
    }

    /// The four-row single-column layout of the shipping-priority query.
    pub fn q3_4x1(variant: Q3Variant) -> TopologyMatrix {
        let join = match variant {
            Q3Variant::Optimized => SlotKind::JoinQ3,
            Q3Variant::Direct => SlotKind::JoinQ3Direct,
        };
        TopologyMatrix {
            bricks: vec![
                vec![BrickSpec {
                    slots: vec![
                        SlotKind::Bypass,
                        SlotKind::SelLineitemQ3,
                        SlotKind::SelCustomerQ3,
                        SlotKind::SelOrdersQ3,
                    ],
                }],
                vec![BrickSpec { slots: vec![SlotKind::Bypass, join] }],
                vec![BrickSpec { slots: vec![SlotKind::Bypass, SlotKind::AggQ3] }],
                vec![BrickSpec { slots: vec![SlotKind::Bypass, SlotKind::OrderByQ3] }],
            ],
        }
    }

    /// A two-column layout hosting the pricing-summary pipeline in column 0
    /// and the shipping-priority pipeline in column 1.
    pub fn q1q3_4x2() -> TopologyMatrix {
        let q3 = TopologyMatrix::q3_4x1(Q3Variant::Optimized);
        let q1_col = [
            BrickSpec { slots: vec![SlotKind::Bypass, SlotKind::SelLineitemQ1] },
            BrickSpec { slots: vec![SlotKind::Bypass, SlotKind::AggQ1] },
            BrickSpec { slots: vec![SlotKind::Bypass, SlotKind::OrderByQ1] },
            BrickSpec { slots: vec![SlotKind::Bypass] },
        ];
        TopologyMatrix {
            bricks: q1_col
                .into_iter()
                .zip(q3.bricks)
                .map(|(q1, mut q3_row)| vec![q1, q3_row.remove(0)])
                .collect(),
        }
    }
}

/// Build-time configuration of an instance.
#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub buffer_depth: usize,
    pub hbsj: HbsjConfig,
    pub group_capacity: usize,
    /// The shipping-priority query's result limit.
    pub q3_limit: usize,
    pub cost: CostModel,
    pub end_stream: StreamId,
    /// Record every tuple assembled by every unit (delivery tests).
    pub record_ingest: bool,
}

impl Default for BuildConfig {
    fn default() -> BuildConfig {
        BuildConfig {
            buffer_depth: 16,
            hbsj: HbsjConfig::new(1 << 10, 1 << 11, 1 << 10),
            group_capacity: 1 << 14,
            q3_limit: 10,
            cost: CostModel::default(),
            end_stream: StreamId::END,
            record_ingest: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("topology matrix is empty")]
    EmptyMatrix,
    #[error("topology matrix is not rectangular")]
    NonRectangular,
    #[error("brick ({row},{col}) has no bypass slot")]
    MissingBypass { row: usize, col: usize },
    #[error("brick ({row},{col}) has {slots} slots; at most 4 are supported")]
    TooManySlots { row: usize, col: usize, slots: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("wiring graph has a cycle")]
    Cyclic,
}

/// Metadata describing the built structure, kept alongside the instance
/// for assignment and inspection.
#[derive(Debug, Clone)]
pub struct TopologyMeta {
    pub rows: usize,
    pub cols: usize,
    pub bricks: Vec<BrickMeta>,
    /// GSwitch block ids per (row, col).
    pub gswitch_bids: Vec<Vec<u16>>,
    /// Terminal switch ids, one per column.
    pub exit_bids: Vec<u16>,
}

impl TopologyMeta {
    pub fn brick(&self, row: usize, col: usize) -> &BrickMeta {
        &self.bricks[row * self.cols + col]
    }

    pub fn brick_mut(&mut self, row: usize, col: usize) -> &mut BrickMeta {
        &mut self.bricks[row * self.cols + col]
    }
}

#[derive(Debug, Clone)]
pub struct BrickMeta {
    pub row: usize,
    pub col: usize,
    pub lswitch: u16,
    pub slots: Vec<SlotMeta>,
    pub collector: u16,
}

#[derive(Debug, Clone)]
pub struct SlotMeta {
    pub b_id: u16,
    pub kind: SlotKind,
    /// Name of the query occupying this slot, once assigned.
    pub claimed_by: Option<String>,
}

/// The field positions of the three Q3 input layouts.
fn q3_field_map() -> Q3FieldMap {
    let l = layouts::lineitem_q3();
    let o = layouts::orders_q3();
    let c = layouts::customer_q3();
    Q3FieldMap {
        lineitem_stream: layouts::LINEITEM,
        orders_stream: layouts::ORDERS,
        customer_stream: layouts::CUSTOMER,
        l_orderkey: l.field_index("l_orderkey").unwrap(),
        o_orderkey: o.field_index("o_orderkey").unwrap(),
        o_custkey: o.field_index("o_custkey").unwrap(),
        c_custkey: c.field_index("c_custkey").unwrap(),
    }
}

fn make_unit(kind: SlotKind, b_id: u16, in_wire: WireId, out_wire: WireId, cfg: &BuildConfig) -> PUnit {
    let end = cfg.end_stream;
    let depth = cfg.buffer_depth;
    let (unit_kind, streams) = match kind {
        SlotKind::Bypass => (UnitKind::Bypass, StreamLayouts::new()),
        SlotKind::SelLineitemQ3 => {
            let layout = layouts::lineitem_q3();
            (
                UnitKind::Selection(SelectionPredicate::new(layout.fields().len())),
                StreamLayouts::new().with(layouts::LINEITEM, layout),
            )
        }
        SlotKind::SelCustomerQ3 => {
            let layout = layouts::customer_q3();
            (
                UnitKind::Selection(SelectionPredicate::new(layout.fields().len())),
                StreamLayouts::new().with(layouts::CUSTOMER, layout),
            )
        }
        SlotKind::SelOrdersQ3 => {
            let layout = layouts::orders_q3();
            (
                UnitKind::Selection(SelectionPredicate::new(layout.fields().len())),
                StreamLayouts::new().with(layouts::ORDERS, layout),
            )
        }
        SlotKind::JoinQ3 | SlotKind::JoinQ3Direct => {
            let variant = if kind == SlotKind::JoinQ3 {
                Q3Variant::Optimized
            } else {
                Q3Variant::Direct
            };
            let l = layouts::lineitem_q3();
            let o = layouts::orders_q3();
            let out = layouts::join_out_q3();
            // projection sources: 0 = customer, 1 = orders, 2 = lineitem
            let projection = vec![
                (2u8, l.field_index("l_orderkey").unwrap()),
                (1, o.field_index("o_orderdate").unwrap()),
                (1, o.field_index("o_shippriority").unwrap()),
                (2, l.field_index("l_extendedprice").unwrap()),
                (2, l.field_index("l_discount").unwrap()),
            ];
            (
                UnitKind::JoinQ3(Box::new(JoinUnit {
                    core: Q3JoinCore::new(variant, cfg.hbsj, q3_field_map()),
                    out_stream: layouts::LINEITEM,
                    out_layout: out,
                    projection,
                })),
                StreamLayouts::new()
                    .with(layouts::LINEITEM, l)
                    .with(layouts::ORDERS, o)
                    .with(layouts::CUSTOMER, layouts::customer_q3()),
            )
        }
        SlotKind::AggQ3 => {
            let input = layouts::join_out_q3();
            let agg = AggGroupBy::new(
                vec![
                    input.field_index("l_orderkey").unwrap(),
                    input.field_index("o_orderdate").unwrap(),
                    input.field_index("o_shippriority").unwrap(),
                ],
                vec![AggSpec::SumRevenue {
                    price_field: input.field_index("l_extendedprice").unwrap(),
                    discount_field: input.field_index("l_discount").unwrap(),
                }],
                layouts::LINEITEM,
                layouts::group_out_q3(),
                cfg.group_capacity,
            );
            (
                UnitKind::AggGroupBy(Box::new(agg)),
                StreamLayouts::new().with(layouts::LINEITEM, input),
            )
        }
        SlotKind::OrderByQ3 => {
            let input = layouts::group_out_q3();
            let ob = OrderBy::new(
                OrderKey::FieldDescThenAsc {
                    desc_field: input.field_index("revenue").unwrap(),
                    tie_field: input.field_index("l_orderkey").unwrap(),
                },
                Some(cfg.q3_limit),
                layouts::LINEITEM,
                input.clone(),
            );
            (UnitKind::OrderBy(Box::new(ob)), StreamLayouts::new().with(layouts::LINEITEM, input))
        }
        SlotKind::SelLineitemQ1 => {
            let layout = layouts::lineitem_q1();
            (
                UnitKind::Selection(SelectionPredicate::new(layout.fields().len())),
                StreamLayouts::new().with(layouts::LINEITEM_Q1, layout),
            )
        }
        SlotKind::AggQ1 => {
            let input = layouts::lineitem_q1();
            let agg = AggGroupBy::new(
                vec![
                    input.field_index("l_returnflag").unwrap(),
                    input.field_index("l_linestatus").unwrap(),
                ],
                vec![
                    AggSpec::Sum { field: input.field_index("l_quantity").unwrap() },
                    AggSpec::Sum { field: input.field_index("l_extendedprice").unwrap() },
                    AggSpec::SumRevenue {
                        price_field: input.field_index("l_extendedprice").unwrap(),
                        discount_field: input.field_index("l_discount").unwrap(),
                    },
                    AggSpec::Count,
                ],
                layouts::LINEITEM_Q1,
                layouts::group_out_q1(),
                cfg.group_capacity,
            );
            (
                UnitKind::AggGroupBy(Box::new(agg)),
                StreamLayouts::new().with(layouts::LINEITEM_Q1, input),
            )
        }
        SlotKind::OrderByQ1 => {
            let input = layouts::group_out_q1();
            let ob = OrderBy::new(
                OrderKey::FieldsAsc {
                    fields: vec![
                        input.field_index("l_returnflag").unwrap(),
                        input.field_index("l_linestatus").unwrap(),
                    ],
                },
                None,
                layouts::LINEITEM_Q1,
                input.clone(),
            );
            (
                UnitKind::OrderBy(Box::new(ob)),
                StreamLayouts::new().with(layouts::LINEITEM_Q1, input),
            )
        }
    };
    let mut unit = PUnit::new(b_id, unit_kind, in_wire, out_wire, streams, end, depth);
    if cfg.record_ingest {
        unit.record_ingest();
    }
    unit
}

/// Wires a matrix into a runnable instance.
pub fn build_topology(matrix: &TopologyMatrix, cfg: &BuildConfig) -> Result<TopologyInstance, BuildError> {
    let rows = matrix.rows();
    if rows == 0 || matrix.cols() == 0 {
        return Err(BuildError::EmptyMatrix);
    }
    let cols = matrix.cols();
    if matrix.bricks.iter().any(|r| r.len() != cols) {
        return Err(BuildError::NonRectangular);
    }
    for (r, row) in matrix.bricks.iter().enumerate() {
        for (c, brick) in row.iter().enumerate() {
            if brick.slots.len() > 4 {
                return Err(BuildError::TooManySlots { row: r, col: c, slots: brick.slots.len() });
            }
            if !brick.slots.contains(&SlotKind::Bypass) {
                return Err(BuildError::MissingBypass { row: r, col: c });
            }
        }
    }
    cfg.cost.validate().map_err(BuildError::BadConfig)?;
    cfg.hbsj.validate().map_err(|e| BuildError::BadConfig(e.to_string()))?;
    let max_tuple_segs = 3; // widest bundled layout
    if cfg.buffer_depth < max_tuple_segs {
        return Err(BuildError::BadConfig(format!(
            "buffer depth {} cannot hold a {max_tuple_segs}-segment tuple",
            cfg.buffer_depth
        )));
    }

    let mut wires: Vec<Wire> = Vec::new();
    let new_wire = |wires: &mut Vec<Wire>| -> WireId {
        wires.push(Wire::new(cfg.buffer_depth));
        wires.len() - 1
    };

    let entry_wire = new_wire(&mut wires);
    let mut blocks: Vec<Block> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut next_bid: u16 = 1;
    let bid = |next: &mut u16| {
        let id = *next;
        *next += 1;
        id
    };

    let mut bricks_meta: Vec<BrickMeta> = Vec::new();
    let mut gswitch_bids: Vec<Vec<u16>> = vec![vec![0; cols]; rows];
    // per column: the wire carrying the previous row's collector output
    let mut north_wire: Vec<Option<WireId>> = vec![None; cols];
    let mut north_block: Vec<Option<usize>> = vec![None; cols];

    for r in 0..rows {
        // Row switches, west to east.
        let mut g_index: Vec<usize> = Vec::with_capacity(cols);
        let mut g_south: Vec<WireId> = Vec::with_capacity(cols);
        let mut west_wire: Option<WireId> = None;
        let mut west_block: Option<usize> = None;
        for c in 0..cols {
            let in_north = if r == 0 {
                if c == 0 {
                    Some(entry_wire)
                } else {
                    None
                }
            } else {
                north_wire[c]
            };
            let south = new_wire(&mut wires);
            let east = if c < cols - 1 { Some(new_wire(&mut wires)) } else { None };
            let b_id = bid(&mut next_bid);
            gswitch_bids[r][c] = b_id;
            let sw = GSwitchA::new(b_id, [in_north, west_wire], [Some(south), east]);
            let idx = blocks.len();
            blocks.push(Block::GSwitchA(sw));
            if r > 0 {
                if let Some(producer) = north_block[c] {
                    edges.push((producer, idx));
                }
            }
            if let Some(w) = west_block {
                edges.push((w, idx));
            }
            g_index.push(idx);
            g_south.push(south);
            west_wire = east;
            west_block = Some(idx);
        }

        // Bricks of the row.
        for c in 0..cols {
            let spec = &matrix.bricks[r][c];
            let n_slots = spec.slots.len();
            let slot_in: Vec<WireId> = (0..n_slots).map(|_| new_wire(&mut wires)).collect();
            let slot_out: Vec<WireId> = (0..n_slots).map(|_| new_wire(&mut wires)).collect();
            let collector_out = new_wire(&mut wires);

            let l_bid = bid(&mut next_bid);
            let lswitch = LSwitch::new(l_bid, g_south[c], slot_in.clone());
            let l_idx = blocks.len();
            blocks.push(Block::LSwitch(lswitch));
            edges.push((g_index[c], l_idx));

            let mut slot_meta = Vec::with_capacity(n_slots);
            let mut slot_idx = Vec::with_capacity(n_slots);
            for (i, &kind) in spec.slots.iter().enumerate() {
                let u_bid = bid(&mut next_bid);
                let unit = make_unit(kind, u_bid, slot_in[i], slot_out[i], cfg);
                let idx = blocks.len();
                blocks.push(Block::Unit(unit));
                edges.push((l_idx, idx));
                slot_meta.push(SlotMeta { b_id: u_bid, kind, claimed_by: None });
                slot_idx.push(idx);
            }

            let col_bid = bid(&mut next_bid);
            let collector = Collector::new(col_bid, slot_out, collector_out, cfg.end_stream);
            let col_idx = blocks.len();
            blocks.push(Block::Collector(collector));
            for &s in &slot_idx {
                edges.push((s, col_idx));
            }

            bricks_meta.push(BrickMeta {
                row: r,
                col: c,
                lswitch: l_bid,
                slots: slot_meta,
                collector: col_bid,
            });
            north_wire[c] = Some(collector_out);
            north_block[c] = Some(col_idx);
        }
    }

    // Terminal chain: one default-routing switch per column, draining east
    // into the sink.
    let sink_wire = new_wire(&mut wires);
    let mut exit_bids = Vec::with_capacity(cols);
    let mut chain_wire: Option<WireId> = None;
    let mut chain_block: Option<usize> = None;
    for c in 0..cols {
        let out = if c < cols - 1 { new_wire(&mut wires) } else { sink_wire };
        let b_id = bid(&mut next_bid);
        let sw = GSwitchA::new(b_id, [north_wire[c], chain_wire], [Some(out), None])
            .with_default_route();
        let idx = blocks.len();
        blocks.push(Block::GSwitchA(sw));
        if let Some(producer) = north_block[c] {
            edges.push((producer, idx));
        }
        if let Some(w) = chain_block {
            edges.push((w, idx));
        }
        exit_bids.push(b_id);
        chain_wire = Some(out);
        chain_block = Some(idx);
    }

    if !is_acyclic(blocks.len(), &edges) {
        return Err(BuildError::Cyclic);
    }

    Ok(TopologyInstance {
        blocks,
        wires,
        entry_wire,
        sink_wire,
        cost: cfg.cost,
        end_stream: cfg.end_stream,
        meta: TopologyMeta { rows, cols, bricks: bricks_meta, gswitch_bids, exit_bids },
        cycle: 0,
    })
}

/// Kahn's algorithm over the wiring edges.
fn is_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut indegree = vec![0usize; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        indegree[b] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut visited = 0;
    while let Some(v) = queue.pop() {
        visited += 1;
        for &w in &adj[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                queue.push(w);
            }
        }
    }
    visited == n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_kinds(instance: &TopologyInstance) -> (usize, usize, usize, usize) {
        let mut g = 0;
        let mut l = 0;
        let mut col = 0;
        let mut units = 0;
        for b in &instance.blocks {
            match b {
                Block::GSwitchA(_) => g += 1,
                Block::LSwitch(_) => l += 1,
                Block::Collector(_) => col += 1,
                Block::Unit(_) => units += 1,
                Block::GSwitchB(_) => {}
            }
        }
        (g, l, col, units)
    }

    #[test]
    fn q3_matrix_counts_match_the_reported_utilization() {
        let instance =
            build_topology(&TopologyMatrix::q3_4x1(Q3Variant::Optimized), &BuildConfig::default())
                .unwrap();
        let (g, l, col, units) = count_kinds(&instance);
        assert_eq!(g, 5, "four bricks need five global switches");
        assert_eq!(l, 4);
        assert_eq!(col, 4);
        assert_eq!(units, 4 + 2 + 2 + 2);
    }

    #[test]
    fn one_by_one_has_entry_and_exit_switches() {
        let matrix = TopologyMatrix {
            bricks: vec![vec![BrickSpec {
                slots: vec![SlotKind::Bypass, SlotKind::SelLineitemQ3],
            }]],
        };
        let instance = build_topology(&matrix, &BuildConfig::default()).unwrap();
        let (g, ..) = count_kinds(&instance);
        assert_eq!(g, 2);
    }

    #[test]
    fn empty_matrix_is_rejected() {
        let matrix = TopologyMatrix { bricks: vec![] };
        assert!(matches!(
            build_topology(&matrix, &BuildConfig::default()),
            Err(BuildError::EmptyMatrix)
        ));
    }

    #[test]
    fn bypass_is_mandatory() {
        let matrix = TopologyMatrix {
            bricks: vec![vec![BrickSpec { slots: vec![SlotKind::SelLineitemQ3] }]],
        };
        assert!(matches!(
            build_topology(&matrix, &BuildConfig::default()),
            Err(BuildError::MissingBypass { row: 0, col: 0 })
        ));
    }

    #[test]
    fn block_ids_are_unique() {
        let instance = build_topology(&TopologyMatrix::q1q3_4x2(), &BuildConfig::default()).unwrap();
        let mut ids: Vec<u16> = instance.blocks.iter().map(|b| b.b_id()).collect();
        let n = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn matrix_serializes_with_slot_names() {
        let json = serde_json::to_string(&TopologyMatrix::q3_4x1(Q3Variant::Optimized)).unwrap();
        assert!(json.contains("\"Q3_CMJOIN\""));
        assert!(json.contains("\"BYPASS\""));
        let back: TopologyMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, TopologyMatrix::q3_4x1(Q3Variant::Optimized));
    }
}
