//! The decomposer and composer.
//!
//! The decomposer projects each row down to the fields a query needs,
//! prefixes the row id, and keeps every unprojected column in a parse
//! table. The composer reattaches retained columns to surviving row ids;
//! aggregated outputs carry group keys instead of row ids and pass through
//! unchanged.

use crate::tpch::layouts;
use crate::tpch::TableRows;
use crate::tuple::{Tuple, TupleLayout};
use crate::wire::StreamId;
use std::collections::HashMap;

/// Retained (unprojected) original fields, per row id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseTable {
    rows: HashMap<u64, Vec<String>>,
}

impl ParseTable {
    pub fn insert(&mut self, row_id: u64, retained: Vec<String>) {
        self.rows.insert(row_id, retained);
    }

    pub fn get(&self, row_id: u64) -> Option<&[String]> {
        self.rows.get(&row_id).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// One stream's worth of decomposed tuples.
#[derive(Debug, Clone)]
pub struct Decomposed {
    pub stream: StreamId,
    pub layout: TupleLayout,
    pub tuples: Vec<Tuple>,
    pub parse_table: ParseTable,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecomposeError {
    #[error("row id {0} not present in the parse table")]
    UnknownRowId(u64),
}

/// Projects rows into stream tuples. Row ids are assigned 1.. in row order
/// per stream (DBGen keys are reused where they are primary keys).
pub fn decompose(rows: &TableRows, stream: StreamId, query: Query) -> Decomposed {
    match (rows, query) {
        (TableRows::Lineitem(rows), Query::Q3) => {
            let layout = layouts::lineitem_q3();
            let mut parse_table = ParseTable::default();
            let tuples = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let row_id = i as u64 + 1;
                    parse_table.insert(row_id, r.retained.clone());
                    Tuple::new(
                        stream,
                        vec![row_id, r.l_orderkey, r.l_shipdate, r.l_extendedprice, r.l_discount],
                    )
                })
                .collect();
            Decomposed { stream, layout, tuples, parse_table }
        }
        (TableRows::Lineitem(rows), Query::Q1) => {
            let layout = layouts::lineitem_q1();
            let mut parse_table = ParseTable::default();
            let tuples = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let row_id = i as u64 + 1;
                    parse_table.insert(row_id, r.retained.clone());
                    Tuple::new(
                        stream,
                        vec![
                            row_id,
                            r.l_returnflag,
                            r.l_linestatus,
                            r.l_quantity,
                            r.l_extendedprice,
                            r.l_discount,
                            r.l_shipdate,
                        ],
                    )
                })
                .collect();
            Decomposed { stream, layout, tuples, parse_table }
        }
        (TableRows::Orders(rows), _) => {
            let layout = layouts::orders_q3();
            let mut parse_table = ParseTable::default();
            let tuples = rows
                .iter()
                .map(|r| {
                    parse_table.insert(r.o_orderkey, r.retained.clone());
                    Tuple::new(
                        stream,
                        vec![
                            r.o_orderkey,
                            r.o_orderkey,
                            r.o_custkey,
                            r.o_orderdate,
                            r.o_shippriority,
                        ],
                    )
                })
                .collect();
            Decomposed { stream, layout, tuples, parse_table }
        }
        (TableRows::Customer(rows), _) => {
            let layout = layouts::customer_q3();
            let mut parse_table = ParseTable::default();
            let tuples = rows
                .iter()
                .map(|r| {
                    parse_table.insert(r.c_custkey, r.retained.clone());
                    Tuple::new(stream, vec![r.c_custkey, r.c_custkey, r.c_mktsegment])
                })
                .collect();
            Decomposed { stream, layout, tuples, parse_table }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Query {
    Q3,
    Q1,
}

/// A composed output row: the projected values plus any retained fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedRow {
    pub values: Vec<u64>,
    pub retained: Vec<String>,
}

/// Reattaches retained fields to results that carry a row id (layout field
/// named `row_id`); aggregated rows pass through with no retained fields.
pub fn compose(
    results: &[Vec<u64>],
    layout: &TupleLayout,
    parse_table: &ParseTable,
) -> Result<Vec<ComposedRow>, DecomposeError> {
    let row_id_idx = layout.field_index("row_id");
    results
        .iter()
        .map(|values| match row_id_idx {
            Some(idx) => {
                let row_id = values[idx];
                let retained = parse_table
                    .get(row_id)
                    .ok_or(DecomposeError::UnknownRowId(row_id))?
                    .to_vec();
                Ok(ComposedRow { values: values.clone(), retained })
            }
            None => Ok(ComposedRow { values: values.clone(), retained: Vec::new() }),
        })
        .collect()
}
