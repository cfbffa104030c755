//! The documented cycle-cost model.
//!
//! Switch forwarding is structural (one segment per port per cycle); the
//! remaining constants charge processing units. Overflow scanning is the
//! only input-dependent term, which is what makes the hash-table-size
//! sweeps reproduce the throughput trends: a smaller table pushes more
//! tuples into the overflow buffer and every probe then pays one cycle per
//! occupied slot. Absolute hardware cycle counts are not a target.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    /// Cycles per segment per port through any switch (structural).
    pub switch_forward: u64,
    /// Selection predicate evaluation per tuple.
    pub selection: u64,
    /// Aggregation-group-by step per tuple (and per emitted group).
    pub agg: u64,
    /// One order-by comparison.
    pub orderby_compare: u64,
    /// Hash computation plus the parallel probe of all four tables.
    pub hash_probe: u64,
    /// Nested-loop overflow scan, per occupied slot.
    pub overflow_scan: u64,
    /// Tuple store into a window.
    pub insert: u64,
    /// Additional cycle when a store expires the oldest tuple first.
    pub expire_extra: u64,
    /// Serial lanes of the network interfaces (64 = fully parallel links).
    pub ni_lanes: u32,
}

impl Default for CostModel {
    fn default() -> CostModel {
        CostModel {
            switch_forward: 1,
            selection: 1,
            agg: 1,
            orderby_compare: 1,
            hash_probe: 2,
            overflow_scan: 1,
            insert: 1,
            expire_extra: 1,
            ni_lanes: 64,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), String> {
        let all = [
            self.switch_forward,
            self.selection,
            self.agg,
            self.orderby_compare,
            self.hash_probe,
            self.overflow_scan,
            self.insert,
            self.expire_extra,
        ];
        if all.iter().any(|&c| c == 0) {
            return Err("all cost-model cycle counts must be at least 1".into());
        }
        crate::noc::ni::transfer_cycles(self.ni_lanes).map_err(|e| e.to_string())?;
        Ok(())
    }
}
