//! Scalable multiway stream join: an N-stage pipeline where each stage owns
//! the sliding window of one origin stream. A new tuple is stored in its
//! origin stage and probes the other N-1 stages in circular order,
//! cross-producting intermediate results; a result is emitted once it has
//! been processed in exactly N-1 stages.

use crate::fault::Fault;
use crate::join::hbsj::{HbsjConfig, SlidingJoinState, StoredTuple};
use crate::wire::StreamId;

/// One pipeline stage: the window of one origin stream.
#[derive(Debug, Clone)]
pub struct CmjStage {
    pub origin: StreamId,
    /// Field of the origin tuple the window is indexed on.
    pub index_field: usize,
    /// How an intermediate result derives the key that probes this stage:
    /// the first listed (stream, field) present in the intermediate wins.
    pub probe_sources: Vec<(StreamId, usize)>,
    pub window: SlidingJoinState,
}

impl CmjStage {
    pub fn new(
        origin: StreamId,
        index_field: usize,
        probe_sources: Vec<(StreamId, usize)>,
        config: HbsjConfig,
    ) -> CmjStage {
        CmjStage { origin, index_field, probe_sources, window: SlidingJoinState::new(config) }
    }
}

/// A joined result: one tuple per participating stream, in probe order
/// starting with the new tuple's origin.
pub type JoinedTuple = Vec<(StreamId, Vec<u64>)>;

#[derive(Debug, Clone)]
pub struct CmjPipeline {
    stages: Vec<CmjStage>,
}

impl CmjPipeline {
    pub fn new(stages: Vec<CmjStage>) -> CmjPipeline {
        let mut seen = Vec::new();
        for s in &stages {
            assert!(!seen.contains(&s.origin), "duplicate origin stream {}", s.origin);
            seen.push(s.origin);
        }
        CmjPipeline { stages }
    }

    pub fn stages(&self) -> &[CmjStage] {
        &self.stages
    }

    /// Stores the tuple in its origin stage, probes the other stages in
    /// circular order and returns the fully joined results plus the cycle
    /// cost (insert + per-probe hash/overflow-scan terms).
    pub fn route(
        &mut self,
        stream: StreamId,
        values: Vec<u64>,
        cost: &CmjCost,
    ) -> Result<(Vec<JoinedTuple>, u64), Fault> {
        let origin = self
            .stages
            .iter()
            .position(|s| s.origin == stream)
            .ok_or(Fault::UnknownStreamAtUnit { stream, b_id: 0 })?;

        let mut cycles = cost.insert;
        let key = values[self.stages[origin].index_field];
        let outcome = self.stages[origin].window.insert(StoredTuple { key, values: values.clone() });
        if outcome.expired.is_some() {
            cycles += cost.expire_extra;
        }

        let n = self.stages.len();
        let mut intermediates: Vec<JoinedTuple> = vec![vec![(stream, values)]];
        for step in 1..n {
            let stage = &self.stages[(origin + step) % n];
            let mut next = Vec::new();
            for inter in &intermediates {
                let probe_key = stage
                    .probe_sources
                    .iter()
                    .find_map(|(s, f)| {
                        inter.iter().find(|(is, _)| is == s).map(|(_, v)| v[*f])
                    })
                    .expect("pipeline config: no probe source present in intermediate");
                cycles += stage.window.probe_cost(cost.hash_probe, cost.overflow_scan);
                for m in stage.window.probe(probe_key) {
                    let mut joined = inter.clone();
                    joined.push((stage.origin, m.values.clone()));
                    next.push(joined);
                }
            }
            intermediates = next;
            if intermediates.is_empty() {
                break;
            }
        }
        let results = if intermediates.first().map(|i| i.len()) == Some(n) {
            intermediates
        } else {
            Vec::new()
        };
        Ok((results, cycles))
    }
}

/// Per-action cycle costs charged by [`CmjPipeline::route`].
#[derive(Debug, Clone, Copy)]
pub struct CmjCost {
    pub insert: u64,
    pub expire_extra: u64,
    pub hash_probe: u64,
    pub overflow_scan: u64,
}

impl Default for CmjCost {
    fn default() -> CmjCost {
        CmjCost { insert: 1, expire_extra: 1, hash_probe: 2, overflow_scan: 1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sid(v: u8) -> StreamId {
        StreamId::data(v).unwrap()
    }

    fn two_way() -> CmjPipeline {
        let cfg = HbsjConfig::new(64, 32, 64);
        CmjPipeline::new(vec![
            CmjStage::new(sid(2), 0, vec![(sid(3), 0)], cfg),
            CmjStage::new(sid(3), 0, vec![(sid(2), 0)], cfg),
        ])
    }

    #[test]
    fn probing_empty_windows_stores_without_output() {
        let mut p = two_way();
        let (out, _) = p.route(sid(2), vec![5, 100], &CmjCost::default()).unwrap();
        assert!(out.is_empty());
        assert_eq!(p.stages()[0].window.live_count(), 1);
    }

    #[test]
    fn three_way_single_match_chain() {
        // Three streams sharing one key attribute; one matching pair per
        // window yields exactly one 3-way result.
        let cfg = HbsjConfig::new(16, 32, 16);
        let any = |except: u8| {
            [2u8, 3, 4].iter().filter(|&&s| s != except).map(|&s| (sid(s), 0)).collect::<Vec<_>>()
        };
        let mut p = CmjPipeline::new(vec![
            CmjStage::new(sid(2), 0, any(2), cfg),
            CmjStage::new(sid(3), 0, any(3), cfg),
            CmjStage::new(sid(4), 0, any(4), cfg),
        ]);
        let c = CmjCost::default();
        assert!(p.route(sid(2), vec![1, 20], &c).unwrap().0.is_empty());
        assert!(p.route(sid(3), vec![1, 30], &c).unwrap().0.is_empty());
        let (out, _) = p.route(sid(4), vec![1, 40], &c).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].len(), 3);
    }

    #[test]
    fn unknown_origin_is_an_error() {
        let mut p = two_way();
        assert!(p.route(sid(6), vec![1], &CmjCost::default()).is_err());
    }
}
