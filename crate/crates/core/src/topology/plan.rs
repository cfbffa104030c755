//! Logical query plans: ordered stages of operators, each matched to a
//! slot kind, with the streams they consume and produce. The two bundled
//! benchmark plans ship as presets; plans also round-trip through JSON for
//! the file interface.

use crate::instr::CmpOp;
use crate::join::q3::Q3Variant;
use crate::topology::SlotKind;
use crate::tpch::dates::day_number;
use crate::tpch::layouts;
use crate::tuple::TupleLayout;
use crate::wire::StreamId;
use serde::{Deserialize, Serialize};

/// A stream on a plan edge, with its tuple width on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamUse {
    pub stream: StreamId,
    pub seg_count: u8,
}

impl StreamUse {
    fn of(stream: StreamId, layout: &TupleLayout) -> StreamUse {
        StreamUse { stream, seg_count: layout.segment_count() as u8 }
    }
}

/// A predicate atom over named fields, resolved at assignment time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedAtom {
    pub field: String,
    pub op: CmpOp,
    pub value: u32,
}

/// One operator of a stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanOp {
    pub slot_kind: SlotKind,
    pub inputs: Vec<StreamUse>,
    pub output: Option<StreamUse>,
    #[serde(default)]
    pub predicate: Vec<NamedAtom>,
    /// Input layout for predicate field resolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_layout: Option<TupleLayout>,
}

/// Operators placed side by side in one brick row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStage {
    pub ops: Vec<PlanOp>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryPlan {
    pub name: String,
    /// Whether the query is terminated by the END control tuple (any plan
    /// with flush-on-END state must set this).
    pub uses_end: bool,
    pub stages: Vec<PlanStage>,
}

/// Predicate constants of the shipping-priority query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Q3Params {
    /// Market segment enumeration code.
    pub mktsegment: u64,
    /// Cutoff day for both date predicates.
    pub date_day: u16,
    pub variant: Q3Variant,
}

impl Default for Q3Params {
    fn default() -> Q3Params {
        Q3Params {
            mktsegment: layouts::mktsegment_code("BUILDING").unwrap(),
            date_day: day_number("1995-03-15").unwrap(),
            variant: Q3Variant::Optimized,
        }
    }
}

/// Predicate constants of the pricing-summary query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Q1Params {
    /// Latest ship day admitted (1998-12-01 minus 90 days).
    pub ship_cutoff_day: u16,
}

impl Default for Q1Params {
    fn default() -> Q1Params {
        Q1Params { ship_cutoff_day: day_number("1998-09-02").unwrap() }
    }
}

/// The shipping-priority plan: three selections feeding the three-way
/// join, then aggregation-group-by, then the top-k order-by.
pub fn q3_plan(params: &Q3Params) -> QueryPlan {
    let lineitem = layouts::lineitem_q3();
    let orders = layouts::orders_q3();
    let customer = layouts::customer_q3();
    let join_out = layouts::join_out_q3();
    let group_out = layouts::group_out_q3();
    let join_kind = match params.variant {
        Q3Variant::Optimized => SlotKind::JoinQ3,
        Q3Variant::Direct => SlotKind::JoinQ3Direct,
    };
    QueryPlan {
        name: match params.variant {
            Q3Variant::Optimized => "q3".to_string(),
            Q3Variant::Direct => "q3-direct".to_string(),
        },
        uses_end: true,
        stages: vec![
            PlanStage {
                ops: vec![
                    PlanOp {
                        slot_kind: SlotKind::SelLineitemQ3,
                        inputs: vec![StreamUse::of(layouts::LINEITEM, &lineitem)],
                        output: Some(StreamUse::of(layouts::LINEITEM, &lineitem)),
                        predicate: vec![NamedAtom {
                            field: "l_shipdate".into(),
                            op: CmpOp::Gt,
                            value: params.date_day as u32,
                        }],
                        input_layout: Some(lineitem.clone()),
                    },
                    PlanOp {
                        slot_kind: SlotKind::SelCustomerQ3,
                        inputs: vec![StreamUse::of(layouts::CUSTOMER, &customer)],
                        output: Some(StreamUse::of(layouts::CUSTOMER, &customer)),
                        predicate: vec![NamedAtom {
                            field: "c_mktsegment".into(),
                            op: CmpOp::Eq,
                            value: params.mktsegment as u32,
                        }],
                        input_layout: Some(customer.clone()),
                    },
                    PlanOp {
                        slot_kind: SlotKind::SelOrdersQ3,
                        inputs: vec![StreamUse::of(layouts::ORDERS, &orders)],
                        output: Some(StreamUse::of(layouts::ORDERS, &orders)),
                        predicate: vec![NamedAtom {
                            field: "o_orderdate".into(),
                            op: CmpOp::Lt,
                            value: params.date_day as u32,
                        }],
                        input_layout: Some(orders.clone()),
                    },
                ],
            },
            PlanStage {
                ops: vec![PlanOp {
                    slot_kind: join_kind,
                    inputs: vec![
                        StreamUse::of(layouts::LINEITEM, &lineitem),
                        StreamUse::of(layouts::ORDERS, &orders),
                        StreamUse::of(layouts::CUSTOMER, &customer),
                    ],
                    output: Some(StreamUse::of(layouts::LINEITEM, &join_out)),
                    predicate: vec![],
                    input_layout: None,
                }],
            },
            PlanStage {
                ops: vec![PlanOp {
                    slot_kind: SlotKind::AggQ3,
                    inputs: vec![StreamUse::of(layouts::LINEITEM, &join_out)],
                    output: Some(StreamUse::of(layouts::LINEITEM, &group_out)),
                    predicate: vec![],
                    input_layout: None,
                }],
            },
            PlanStage {
                ops: vec![PlanOp {
                    slot_kind: SlotKind::OrderByQ3,
                    inputs: vec![StreamUse::of(layouts::LINEITEM, &group_out)],
                    output: Some(StreamUse::of(layouts::LINEITEM, &group_out)),
                    predicate: vec![],
                    input_layout: None,
                }],
            },
        ],
    }
}

/// The pricing-summary plan: selection, aggregation-group-by, order-by
/// over a single lineitem stream.
pub fn q1_plan(params: &Q1Params) -> QueryPlan {
    let lineitem = layouts::lineitem_q1();
    let group_out = layouts::group_out_q1();
    QueryPlan {
        name: "q1".to_string(),
        uses_end: true,
        stages: vec![
            PlanStage {
                ops: vec![PlanOp {
                    slot_kind: SlotKind::SelLineitemQ1,
                    inputs: vec![StreamUse::of(layouts::LINEITEM_Q1, &lineitem)],
                    output: Some(StreamUse::of(layouts::LINEITEM_Q1, &lineitem)),
                    predicate: vec![NamedAtom {
                        field: "l_shipdate".into(),
                        op: CmpOp::Le,
                        value: params.ship_cutoff_day as u32,
                    }],
                    input_layout: Some(lineitem.clone()),
                }],
            },
            PlanStage {
                ops: vec![PlanOp {
                    slot_kind: SlotKind::AggQ1,
                    inputs: vec![StreamUse::of(layouts::LINEITEM_Q1, &lineitem)],
                    output: Some(StreamUse::of(layouts::LINEITEM_Q1, &group_out)),
                    predicate: vec![],
                    input_layout: None,
                }],
            },
            PlanStage {
                ops: vec![PlanOp {
                    slot_kind: SlotKind::OrderByQ1,
                    inputs: vec![StreamUse::of(layouts::LINEITEM_Q1, &group_out)],
                    output: Some(StreamUse::of(layouts::LINEITEM_Q1, &group_out)),
                    predicate: vec![],
                    input_layout: None,
                }],
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plans_round_trip_through_json() {
        let plan = q3_plan(&Q3Params::default());
        let json = serde_json::to_string_pretty(&plan).unwrap();
        let back: QueryPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(back, plan);
    }

    #[test]
    fn q3_defaults_use_the_benchmark_constants() {
        let p = Q3Params::default();
        assert_eq!(p.mktsegment, 1);
        assert_eq!(p.date_day, 1169);
    }
}
