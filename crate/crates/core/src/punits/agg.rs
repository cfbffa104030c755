//! Merged aggregation + group-by unit.
//!
//! Each incoming tuple is matched against the group buffer by its key
//! fields; a hit folds the tuple into the group's accumulators, a miss
//! creates a new group. The END tuple flushes every group downstream.
//!
//! The group buffer is kept in key order so that flush emission is
//! deterministic across runs and platforms.

use crate::money::compute_revenue;
use crate::tuple::TupleLayout;
use crate::wire::StreamId;
use std::collections::BTreeMap;

/// One aggregate accumulator, operating on input field indexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggSpec {
    /// Number of tuples in the group.
    Count,
    /// Sum of a field.
    Sum { field: usize },
    /// Sum of `price * (1 - discount)` in 10^-4 dollar units.
    SumRevenue { price_field: usize, discount_field: usize },
}

/// Group-by state: key fields, aggregate specs, and the group buffer.
#[derive(Debug, Clone)]
pub struct AggGroupBy {
    pub key_fields: Vec<usize>,
    pub aggs: Vec<AggSpec>,
    pub out_stream: StreamId,
    /// Output layout: the key fields followed by one field per aggregate.
    pub out_layout: TupleLayout,
    pub capacity: usize,
    groups: BTreeMap<Vec<u64>, Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapacityExceeded;

impl AggGroupBy {
    pub fn new(
        key_fields: Vec<usize>,
        aggs: Vec<AggSpec>,
        out_stream: StreamId,
        out_layout: TupleLayout,
        capacity: usize,
    ) -> AggGroupBy {
        AggGroupBy { key_fields, aggs, out_stream, out_layout, capacity, groups: BTreeMap::new() }
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Folds one tuple into its group, creating the group on first sight.
    pub fn accumulate(&mut self, values: &[u64]) -> Result<(), CapacityExceeded> {
        let key: Vec<u64> = self.key_fields.iter().map(|&i| values[i]).collect();
        if !self.groups.contains_key(&key) && self.groups.len() == self.capacity {
            return Err(CapacityExceeded);
        }
        let accs = self.groups.entry(key).or_insert_with(|| vec![0u64; self.aggs.len()]);
        for (acc, spec) in accs.iter_mut().zip(&self.aggs) {
            match *spec {
                AggSpec::Count => *acc += 1,
                AggSpec::Sum { field } => *acc += values[field],
                AggSpec::SumRevenue { price_field, discount_field } => {
                    *acc += compute_revenue(values[price_field], values[discount_field])
                        .expect("discount validated by field width")
                        .value();
                }
            }
        }
        Ok(())
    }

    /// Emits every group as `key fields ++ aggregates` and clears the
    /// buffer; the second value is the emission count for cost accounting.
    pub fn flush(&mut self) -> (Vec<Vec<u64>>, u64) {
        let groups = std::mem::take(&mut self.groups);
        let count = groups.len() as u64;
        let rows = groups
            .into_iter()
            .map(|(mut key, accs)| {
                key.extend(accs);
                key
            })
            .collect();
        (rows, count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(capacity: usize) -> AggGroupBy {
        // input: [key, price, discount]; output: [key, revenue]
        AggGroupBy::new(
            vec![0],
            vec![AggSpec::SumRevenue { price_field: 1, discount_field: 2 }],
            StreamId::data(2).unwrap(),
            TupleLayout::new([("key", 32u8), ("revenue", 48)]).unwrap(),
            capacity,
        )
    }

    #[test]
    fn same_key_accumulates() {
        let mut agg = unit(16);
        agg.accumulate(&[7, 10_000, 0]).unwrap();
        agg.accumulate(&[7, 20_000, 0]).unwrap();
        assert_eq!(agg.group_count(), 1);
        let (rows, n) = agg.flush();
        assert_eq!(n, 1);
        assert_eq!(rows, vec![vec![7, 3_000_000]]);
    }

    #[test]
    fn flush_on_empty_is_empty() {
        let mut agg = unit(16);
        let (rows, n) = agg.flush();
        assert!(rows.is_empty());
        assert_eq!(n, 0);
    }

    #[test]
    fn flush_clears_state() {
        let mut agg = unit(16);
        agg.accumulate(&[1, 100, 0]).unwrap();
        agg.flush();
        assert_eq!(agg.group_count(), 0);
    }

    #[test]
    fn capacity_fault() {
        let mut agg = unit(2);
        agg.accumulate(&[1, 1, 0]).unwrap();
        agg.accumulate(&[2, 1, 0]).unwrap();
        assert!(agg.accumulate(&[3, 1, 0]).is_err());
        // existing groups still accept updates
        agg.accumulate(&[1, 1, 0]).unwrap();
    }

    #[test]
    fn matches_reference_hash_map_fold() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut agg = unit(1 << 14);
        let mut reference: std::collections::HashMap<u64, u64> = Default::default();
        for _ in 0..1000 {
            let key = rng.gen_range(0..50u64);
            let price = rng.gen_range(0..100_000u64);
            let discount = rng.gen_range(0..=10u64);
            agg.accumulate(&[key, price, discount]).unwrap();
            *reference.entry(key).or_default() += price * (100 - discount);
        }
        let (rows, _) = agg.flush();
        assert_eq!(rows.len(), reference.len());
        for row in rows {
            assert_eq!(reference[&row[0]], row[1], "group {}", row[0]);
        }
    }
}
