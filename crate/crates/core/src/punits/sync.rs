//! Synchronizer: restores a global order across merged data paths.
//!
//! Tuples are annotated with monotone tokens at a common upstream point.
//! When several paths meet, the synchronizer holds tuples back until every
//! other input has either shown a later token or ended, then emits in token
//! order. A duplicate token is a fault.

use crate::fault::Fault;
use std::collections::VecDeque;

/// Streaming merge state over a fixed number of inputs.
#[derive(Debug, Clone)]
pub struct SynchronizerMerge<T> {
    queues: Vec<VecDeque<(u64, T)>>,
    ended: Vec<bool>,
    last_emitted: Option<u64>,
}

impl<T> SynchronizerMerge<T> {
    pub fn new(inputs: usize) -> SynchronizerMerge<T> {
        SynchronizerMerge {
            queues: (0..inputs).map(|_| VecDeque::new()).collect(),
            ended: vec![false; inputs],
            last_emitted: None,
        }
    }

    /// Feeds one token-annotated tuple from an input path.
    pub fn push(&mut self, input: usize, token: u64, item: T) {
        debug_assert!(!self.ended[input], "push after end");
        self.queues[input].push_back((token, item));
    }

    /// Marks one input as finished.
    pub fn end(&mut self, input: usize) {
        self.ended[input] = true;
    }

    /// Emits every tuple whose token is known to be globally next: an input
    /// blocks the merge until its next token is visible or it has ended.
    pub fn drain_ready(&mut self) -> Result<Vec<T>, Fault> {
        let mut out = Vec::new();
        loop {
            if self.queues.iter().zip(&self.ended).any(|(q, &e)| q.is_empty() && !e) {
                break; // a lagging input may still hold the smallest token
            }
            let next = self
                .queues
                .iter()
                .enumerate()
                .filter_map(|(i, q)| q.front().map(|&(tok, _)| (tok, i)))
                .min();
            let Some((token, input)) = next else { break };
            if self.last_emitted == Some(token) {
                return Err(Fault::DuplicateToken { token });
            }
            self.last_emitted = Some(token);
            let (_, item) = self.queues[input].pop_front().expect("front exists");
            out.push(item);
        }
        Ok(out)
    }
}

/// Merges complete token-annotated sequences into one ordered sequence.
pub fn synchronizer_merge<T>(inputs: Vec<Vec<(u64, T)>>) -> Result<Vec<T>, Fault> {
    let mut merge = SynchronizerMerge::new(inputs.len());
    for (i, seq) in inputs.into_iter().enumerate() {
        for (token, item) in seq {
            merge.push(i, token, item);
        }
        merge.end(i);
    }
    merge.drain_ready()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_by_token() {
        let merged =
            synchronizer_merge(vec![vec![(1, 'a'), (3, 'c')], vec![(2, 'b')]]).unwrap();
        assert_eq!(merged, vec!['a', 'b', 'c']);
    }

    #[test]
    fn empty_input_passes_the_other_through() {
        let merged = synchronizer_merge(vec![vec![(1, 'x'), (2, 'y')], vec![]]).unwrap();
        assert_eq!(merged, vec!['x', 'y']);
    }

    #[test]
    fn duplicate_token_is_a_fault() {
        let r = synchronizer_merge(vec![vec![(1, 'a')], vec![(1, 'b')]]);
        assert!(matches!(r, Err(Fault::DuplicateToken { token: 1 })));
    }

    #[test]
    fn blocks_on_lagging_input() {
        let mut m = SynchronizerMerge::new(2);
        m.push(0, 2, 'b');
        // input 1 has not spoken: nothing may be emitted yet
        assert!(m.drain_ready().unwrap().is_empty());
        m.push(1, 1, 'a');
        m.end(1);
        m.end(0);
        assert_eq!(m.drain_ready().unwrap(), vec!['a', 'b']);
    }

    #[test]
    fn split_then_merge_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let items: Vec<(u64, u64)> = (0..1000).map(|t| (t, t * 7)).collect();
        let mut parts: Vec<Vec<(u64, u64)>> = vec![Vec::new(); 4];
        for &it in &items {
            parts[rng.gen_range(0..4)].push(it);
        }
        let merged = synchronizer_merge(parts).unwrap();
        assert_eq!(merged, items.iter().map(|&(_, v)| v).collect::<Vec<_>>());
    }
}
