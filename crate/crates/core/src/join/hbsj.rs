//! Hash-based stream join storage: two hash functions addressing four
//! one-tuple-per-cell tables, an overflow buffer searched by nested loop,
//! and an ordered count-based sliding window driving expiration.
//!
//! Hash function 1 indexes tables 0 and 1, hash function 2 tables 2 and 3;
//! insertion tries the cells in order 0,1,2,3 and falls back to the
//! overflow buffer. Expiration removes the oldest tuple before each insert
//! once the window holds `w` tuples, so an overflow capacity of at least
//! `w` guarantees insertion never fails.

use crate::join::hash::{hash_key, HASH_SEED_1, HASH_SEED_2};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Sizing of one sliding-join index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HbsjConfig {
    /// Count-based window size in tuples.
    pub window: usize,
    /// Rows per hash table; must be a power of two.
    pub hash_table_rows: usize,
    /// Overflow buffer slots; must be at least `window`.
    pub overflow_capacity: usize,
    /// Seeds of the two hash functions.
    pub seeds: [u32; 2],
}

impl HbsjConfig {
    pub fn new(window: usize, hash_table_rows: usize, overflow_capacity: usize) -> HbsjConfig {
        HbsjConfig { window, hash_table_rows, overflow_capacity, seeds: [HASH_SEED_1, HASH_SEED_2] }
    }

    pub fn validate(&self) -> Result<(), HbsjConfigError> {
        if self.window == 0 {
            return Err(HbsjConfigError::ZeroWindow);
        }
        if !self.hash_table_rows.is_power_of_two() {
            return Err(HbsjConfigError::RowsNotPowerOfTwo(self.hash_table_rows));
        }
        if self.overflow_capacity < self.window {
            return Err(HbsjConfigError::OverflowTooSmall {
                overflow: self.overflow_capacity,
                window: self.window,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum HbsjConfigError {
    #[error("window size must be positive")]
    ZeroWindow,
    #[error("hash table rows {0} is not a power of two")]
    RowsNotPowerOfTwo(usize),
    #[error("overflow capacity {overflow} is smaller than the window {window}")]
    OverflowTooSmall { overflow: usize, window: usize },
}

/// A stored tuple: its join key plus the full value vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredTuple {
    pub key: u64,
    pub values: Vec<u64>,
}

/// Where a live tuple resides within one index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// One of the four hash tables, at the row selected by its hash.
    Table { table: u8, row: u32 },
    /// A slot of the overflow buffer.
    Overflow { slot: u32 },
}

/// Four hash tables plus the overflow buffer, without a window of its own.
/// [`SlidingJoinState`] pairs one store with an ordered window; the Q3
/// orders stage pairs two stores with a single window.
#[derive(Debug, Clone)]
pub struct IndexStore {
    rows: usize,
    seeds: [u32; 2],
    tables: [Vec<Option<StoredTuple>>; 4],
    overflow: Vec<Option<StoredTuple>>,
    /// Free overflow slots; initialized so the lowest indices are used first.
    free_slots: Vec<u32>,
    overflow_occupied: usize,
}

impl IndexStore {
    pub fn new(config: &HbsjConfig) -> IndexStore {
        config.validate().expect("invalid HB-SJ config");
        IndexStore {
            rows: config.hash_table_rows,
            seeds: config.seeds,
            tables: std::array::from_fn(|_| vec![None; config.hash_table_rows]),
            overflow: vec![None; config.overflow_capacity],
            free_slots: (0..config.overflow_capacity as u32).rev().collect(),
            overflow_occupied: 0,
        }
    }

    pub fn overflow_occupancy(&self) -> usize {
        self.overflow_occupied
    }

    fn row_for(&self, key: u64, hash_fn: usize) -> u32 {
        hash_key(key, self.seeds[hash_fn]) & (self.rows - 1) as u32
    }

    fn cell(&self, loc: Location) -> &Option<StoredTuple> {
        match loc {
            Location::Table { table, row } => &self.tables[table as usize][row as usize],
            Location::Overflow { slot } => &self.overflow[slot as usize],
        }
    }

    /// Stores a tuple, trying the four cells in order, then the overflow.
    /// Panics if the overflow is full; configs uphold capacity >= window.
    pub fn store(&mut self, tuple: StoredTuple) -> Location {
        let row1 = self.row_for(tuple.key, 0);
        let row2 = self.row_for(tuple.key, 1);
        let candidates = [
            Location::Table { table: 0, row: row1 },
            Location::Table { table: 1, row: row1 },
            Location::Table { table: 2, row: row2 },
            Location::Table { table: 3, row: row2 },
        ];
        let location = candidates
            .into_iter()
            .find(|&loc| self.cell(loc).is_none())
            .unwrap_or_else(|| {
                let slot =
                    self.free_slots.pop().expect("overflow full: capacity invariant violated");
                Location::Overflow { slot }
            });
        match location {
            Location::Table { table, row } => {
                self.tables[table as usize][row as usize] = Some(tuple);
            }
            Location::Overflow { slot } => {
                self.overflow[slot as usize] = Some(tuple);
                self.overflow_occupied += 1;
            }
        }
        location
    }

    pub fn clear(&mut self, loc: Location) -> Option<StoredTuple> {
        match loc {
            Location::Table { table, row } => self.tables[table as usize][row as usize].take(),
            Location::Overflow { slot } => {
                let t = self.overflow[slot as usize].take();
                if t.is_some() {
                    self.free_slots.push(slot);
                    self.overflow_occupied -= 1;
                }
                t
            }
        }
    }

    /// Returns the live tuples whose key equals `key`: the four table cells
    /// first (in table order), then overflow slots in slot order.
    pub fn probe(&self, key: u64) -> Vec<&StoredTuple> {
        let mut matches = Vec::new();
        let row1 = self.row_for(key, 0);
        let row2 = self.row_for(key, 1);
        for (table, row) in [(0, row1), (1, row1), (2, row2), (3, row2)] {
            if let Some(t) = &self.tables[table][row as usize] {
                if t.key == key {
                    matches.push(t);
                }
            }
        }
        for slot in &self.overflow {
            if let Some(t) = slot {
                if t.key == key {
                    matches.push(t);
                }
            }
        }
        matches
    }

    /// Probe cost under the documented model: hash + parallel table lookup,
    /// plus one scan step per occupied overflow slot.
    pub fn probe_cost(&self, hash_probe: u64, per_slot: u64) -> u64 {
        hash_probe + per_slot * self.overflow_occupied as u64
    }
}

/// Outcome of one windowed insert.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsertOutcome {
    pub location: Location,
    pub expired: Option<Location>,
}

/// One sliding-join index: an [`IndexStore`] plus the ordered count-based
/// window that drives expiration.
#[derive(Debug, Clone)]
pub struct SlidingJoinState {
    config: HbsjConfig,
    store: IndexStore,
    /// Oldest tuple at the front; every record points at an occupied cell.
    ordered_window: VecDeque<Location>,
}

impl SlidingJoinState {
    pub fn new(config: HbsjConfig) -> SlidingJoinState {
        SlidingJoinState {
            store: IndexStore::new(&config),
            ordered_window: VecDeque::with_capacity(config.window),
            config,
        }
    }

    pub fn config(&self) -> &HbsjConfig {
        &self.config
    }

    /// Live tuples currently stored.
    pub fn live_count(&self) -> usize {
        self.ordered_window.len()
    }

    /// Occupied overflow slots (the paper's per-index occupancy metric).
    pub fn overflow_occupancy(&self) -> usize {
        self.store.overflow_occupancy()
    }

    /// Expires the oldest tuple first when the window is full, then stores
    /// the new tuple.
    pub fn insert(&mut self, tuple: StoredTuple) -> InsertOutcome {
        let expired = if self.ordered_window.len() == self.config.window {
            let oldest = self.ordered_window.pop_front().expect("window non-empty");
            let removed = self.store.clear(oldest);
            debug_assert!(removed.is_some(), "ordered window pointed at an empty cell");
            Some(oldest)
        } else {
            None
        };
        let location = self.store.store(tuple);
        self.ordered_window.push_back(location);
        InsertOutcome { location, expired }
    }

    /// Equijoin probe; see [`IndexStore::probe`] for the result order.
    pub fn probe(&self, key: u64) -> Vec<&StoredTuple> {
        self.store.probe(key)
    }

    pub fn probe_cost(&self, hash_probe: u64, per_slot: u64) -> u64 {
        self.store.probe_cost(hash_probe, per_slot)
    }
}

/// One window of tuples reachable through two key fields: the combined
/// orders stage of the Q3 join. Both indexes cover the same tuples and
/// expire together.
#[derive(Debug, Clone)]
pub struct DualIndexWindow {
    window: usize,
    index_a: IndexStore,
    index_b: IndexStore,
    key_a_field: usize,
    key_b_field: usize,
    ordered_window: VecDeque<(Location, Location)>,
}

impl DualIndexWindow {
    pub fn new(config: HbsjConfig, key_a_field: usize, key_b_field: usize) -> DualIndexWindow {
        DualIndexWindow {
            window: config.window,
            index_a: IndexStore::new(&config),
            index_b: IndexStore::new(&config),
            key_a_field,
            key_b_field,
            ordered_window: VecDeque::with_capacity(config.window),
        }
    }

    pub fn live_count(&self) -> usize {
        self.ordered_window.len()
    }

    /// Inserts into both indexes; returns the number of expirations (0 or 2,
    /// one per index) for cost accounting.
    pub fn insert(&mut self, values: Vec<u64>) -> usize {
        let mut expirations = 0;
        if self.ordered_window.len() == self.window {
            let (loc_a, loc_b) = self.ordered_window.pop_front().expect("window non-empty");
            self.index_a.clear(loc_a);
            self.index_b.clear(loc_b);
            expirations = 2;
        }
        let key_a = values[self.key_a_field];
        let key_b = values[self.key_b_field];
        let loc_a = self.index_a.store(StoredTuple { key: key_a, values: values.clone() });
        let loc_b = self.index_b.store(StoredTuple { key: key_b, values });
        self.ordered_window.push_back((loc_a, loc_b));
        expirations
    }

    pub fn probe_a(&self, key: u64) -> Vec<&StoredTuple> {
        self.index_a.probe(key)
    }

    pub fn probe_b(&self, key: u64) -> Vec<&StoredTuple> {
        self.index_b.probe(key)
    }

    pub fn occupancy_a(&self) -> usize {
        self.index_a.overflow_occupancy()
    }

    pub fn occupancy_b(&self) -> usize {
        self.index_b.overflow_occupancy()
    }

    pub fn index_a(&self) -> &IndexStore {
        &self.index_a
    }

    pub fn index_b(&self) -> &IndexStore {
        &self.index_b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(key: u64, v: u64) -> StoredTuple {
        StoredTuple { key, values: vec![key, v] }
    }

    fn probe_values(st: &SlidingJoinState, key: u64) -> Vec<u64> {
        st.probe(key).iter().map(|s| s.values[1]).collect()
    }

    #[test]
    fn window_of_one_expires_immediately() {
        let mut st = SlidingJoinState::new(HbsjConfig::new(1, 32, 1));
        let first = st.insert(t(10, 1));
        assert!(first.expired.is_none());
        let second = st.insert(t(20, 2));
        assert_eq!(second.expired, Some(first.location));
        assert_eq!(probe_values(&st, 10), Vec::<u64>::new());
        assert_eq!(probe_values(&st, 20), vec![2]);
        assert_eq!(st.live_count(), 1);
    }

    #[test]
    fn fifth_same_key_tuple_lands_in_overflow() {
        let mut st = SlidingJoinState::new(HbsjConfig::new(32, 32, 32));
        for i in 0..5 {
            st.insert(t(42, i));
        }
        assert_eq!(st.overflow_occupancy(), 1);
        // probe returns table cells first, then overflow slots in order
        assert_eq!(probe_values(&st, 42), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn empty_window_probe_is_empty() {
        let st = SlidingJoinState::new(HbsjConfig::new(4, 32, 4));
        assert!(st.probe(7).is_empty());
    }

    #[test]
    fn single_element_probe() {
        let mut st = SlidingJoinState::new(HbsjConfig::new(4, 32, 4));
        st.insert(t(7, 99));
        assert_eq!(probe_values(&st, 7), vec![99]);
        assert!(st.probe(8).is_empty());
    }

    #[test]
    fn expired_overflow_slot_is_reused() {
        let mut st = SlidingJoinState::new(HbsjConfig::new(5, 1, 5));
        // ht=1: one row per table, 4 cells total; fifth tuple overflows.
        for i in 0..5 {
            st.insert(t(1, i));
        }
        assert_eq!(st.overflow_occupancy(), 1);
        // Window full: next insert expires tuple 0 (a table cell) and the
        // new tuple takes that cell back.
        st.insert(t(1, 5));
        assert_eq!(st.overflow_occupancy(), 1);
        assert_eq!(st.live_count(), 5);
        assert_eq!(probe_values(&st, 1).len(), 5);
    }

    #[test]
    fn dual_index_expires_both_sides_together() {
        let mut w = DualIndexWindow::new(HbsjConfig::new(2, 32, 2), 0, 1);
        w.insert(vec![100, 1, 77]);
        w.insert(vec![100, 2, 88]);
        assert_eq!(w.insert(vec![200, 3, 99]), 2); // expires [100, 1, 77]
        assert_eq!(w.probe_a(100).len(), 1);
        assert_eq!(w.probe_b(1).len(), 0);
        assert_eq!(w.probe_b(2).len(), 1);
        assert_eq!(w.probe_a(200).len(), 1);
        assert_eq!(w.live_count(), 2);
    }
}
