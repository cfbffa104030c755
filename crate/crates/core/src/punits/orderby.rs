//! Order-by unit: bubble-inserts each finalized group into a sorted list
//! and, on END, emits the first `k` entries.
//!
//! The unit reports the number of comparisons each insert performed so the
//! engine can charge them one cycle each.

use crate::tuple::TupleLayout;
use crate::wire::StreamId;
use std::cmp::Ordering;

/// Sort rule over group rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderKey {
    /// Descending by one field, ties broken ascending by another
    /// (the shipping-priority query: revenue desc, orderkey asc).
    FieldDescThenAsc { desc_field: usize, tie_field: usize },
    /// Ascending lexicographic order over a list of fields
    /// (the pricing-summary query: by group key).
    FieldsAsc { fields: Vec<usize> },
}

impl OrderKey {
    fn compare(&self, a: &[u64], b: &[u64]) -> Ordering {
        match self {
            OrderKey::FieldDescThenAsc { desc_field, tie_field } => b[*desc_field]
                .cmp(&a[*desc_field])
                .then_with(|| a[*tie_field].cmp(&b[*tie_field])),
            OrderKey::FieldsAsc { fields } => {
                for &f in fields {
                    match a[f].cmp(&b[f]) {
                        Ordering::Equal => continue,
                        other => return other,
                    }
                }
                Ordering::Equal
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrderBy {
    pub order: OrderKey,
    /// Rows emitted on END; `None` emits every group.
    pub limit: Option<usize>,
    pub out_stream: StreamId,
    pub out_layout: TupleLayout,
    rows: Vec<Vec<u64>>,
}

impl OrderBy {
    pub fn new(
        order: OrderKey,
        limit: Option<usize>,
        out_stream: StreamId,
        out_layout: TupleLayout,
    ) -> OrderBy {
        OrderBy { order, limit, out_stream, out_layout, rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Bubble-inserts a row at its sorted position; returns the number of
    /// comparisons performed.
    pub fn insert(&mut self, row: Vec<u64>) -> u64 {
        let mut comparisons = 0u64;
        let mut pos = self.rows.len();
        while pos > 0 {
            comparisons += 1;
            if self.order.compare(&self.rows[pos - 1], &row) == Ordering::Greater {
                pos -= 1;
            } else {
                break;
            }
        }
        self.rows.insert(pos, row);
        comparisons.max(1)
    }

    /// Emits the first `min(k, len)` rows and clears the list; the second
    /// value is the emission count for cost accounting.
    pub fn flush(&mut self) -> (Vec<Vec<u64>>, u64) {
        let mut rows = std::mem::take(&mut self.rows);
        if let Some(k) = self.limit {
            rows.truncate(k);
        }
        let n = rows.len() as u64;
        (rows, n)
    }
}
