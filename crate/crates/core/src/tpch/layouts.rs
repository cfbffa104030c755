//! Frozen stream assignments and wire layouts for the bundled queries.
//!
//! Stream ids (3-bit tags): 2 = LINEITEM, 3 = ORDERS, 4 = CUSTOMER,
//! 5 = END_MESSAGE, 6 = the pricing-summary query's lineitem copy. Derived
//! streams reuse an id downstream of the stage that consumed the original:
//! routing tables are per-switch, so the id is scoped to its path.
//!
//! Every decomposed tuple leads with its 32-bit row id so the composer can
//! reattach retained fields; aggregate outputs carry group keys instead.

use crate::tuple::TupleLayout;
use crate::wire::StreamId;

pub const LINEITEM: StreamId = StreamId::from_const(2);
pub const ORDERS: StreamId = StreamId::from_const(3);
pub const CUSTOMER: StreamId = StreamId::from_const(4);
pub const END: StreamId = StreamId::END;
pub const LINEITEM_Q1: StreamId = StreamId::from_const(6);

/// Market segment enumeration (alphabetical TPC-H order).
pub const MKT_SEGMENTS: [&str; 5] =
    ["AUTOMOBILE", "BUILDING", "FURNITURE", "HOUSEHOLD", "MACHINERY"];

pub fn mktsegment_code(name: &str) -> Option<u64> {
    MKT_SEGMENTS.iter().position(|&s| s == name).map(|i| i as u64)
}

/// l_returnflag: A, N, R; l_linestatus: F, O.
pub fn returnflag_code(c: char) -> Option<u64> {
    "ANR".find(c).map(|i| i as u64)
}

pub fn linestatus_code(c: char) -> Option<u64> {
    "FO".find(c).map(|i| i as u64)
}

fn layout(fields: &[(&str, u8)]) -> TupleLayout {
    TupleLayout::new(fields.iter().map(|&(n, b)| (n, b))).expect("static layout")
}

/// Lineitem fields used by the shipping-priority query (120 bits, 2 segs).
pub fn lineitem_q3() -> TupleLayout {
    layout(&[
        ("row_id", 32),
        ("l_orderkey", 32),
        ("l_shipdate", 16),
        ("l_extendedprice", 32),
        ("l_discount", 8),
    ])
}

/// Orders fields used by the shipping-priority query (120 bits, 2 segs).
pub fn orders_q3() -> TupleLayout {
    layout(&[
        ("row_id", 32),
        ("o_orderkey", 32),
        ("o_custkey", 32),
        ("o_orderdate", 16),
        ("o_shippriority", 8),
    ])
}

/// Customer fields used by the shipping-priority query (72 bits, 2 segs).
pub fn customer_q3() -> TupleLayout {
    layout(&[("row_id", 32), ("c_custkey", 32), ("c_mktsegment", 8)])
}

/// Join output: group keys plus revenue operands (96 bits, 2 segs).
pub fn join_out_q3() -> TupleLayout {
    layout(&[
        ("l_orderkey", 32),
        ("o_orderdate", 16),
        ("o_shippriority", 8),
        ("l_extendedprice", 32),
        ("l_discount", 8),
    ])
}

/// Aggregated group rows: key fields then the revenue sum (104 bits).
pub fn group_out_q3() -> TupleLayout {
    layout(&[
        ("l_orderkey", 32),
        ("o_orderdate", 16),
        ("o_shippriority", 8),
        ("revenue", 48),
    ])
}

/// The END tuple: a single marker bit, one segment.
pub fn end_layout() -> TupleLayout {
    layout(&[("end", 1)])
}

/// Lineitem fields used by the pricing-summary query (112 bits, 2 segs).
pub fn lineitem_q1() -> TupleLayout {
    layout(&[
        ("row_id", 32),
        ("l_returnflag", 8),
        ("l_linestatus", 8),
        ("l_quantity", 8),
        ("l_extendedprice", 32),
        ("l_discount", 8),
        ("l_shipdate", 16),
    ])
}

/// Pricing-summary group rows: flags, then sums and the row count.
pub fn group_out_q1() -> TupleLayout {
    layout(&[
        ("l_returnflag", 8),
        ("l_linestatus", 8),
        ("sum_qty", 32),
        ("sum_base_price", 48),
        ("sum_disc_price", 48),
        ("count_order", 32),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q3_stream_layouts_fit_two_segments() {
        assert_eq!(lineitem_q3().segment_count(), 2);
        assert_eq!(orders_q3().segment_count(), 2);
        assert_eq!(customer_q3().segment_count(), 2);
        assert_eq!(join_out_q3().segment_count(), 2);
        assert_eq!(group_out_q3().segment_count(), 2);
        assert_eq!(end_layout().segment_count(), 1);
        assert_eq!(lineitem_q1().segment_count(), 2);
        assert_eq!(group_out_q1().segment_count(), 3);
    }

    #[test]
    fn enum_codes() {
        assert_eq!(mktsegment_code("BUILDING"), Some(1));
        assert_eq!(mktsegment_code("MACHINERY"), Some(4));
        assert_eq!(mktsegment_code("PLASTICS"), None);
        assert_eq!(returnflag_code('R'), Some(2));
        assert_eq!(linestatus_code('O'), Some(1));
    }
}
