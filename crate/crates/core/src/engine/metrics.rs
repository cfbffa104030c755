//! Run metrics: per-bucket input throughput and overflow occupancy bands,
//! plus occupancy checkpoints at fixed input-tuple counts.

use crate::join::q3::OverflowOccupancy;
use serde::{Deserialize, Serialize};

/// Cycles per metric bucket.
pub const BUCKET_CYCLES: u64 = 100_000;

/// Names of the four join indexes in reporting order.
pub const OVERFLOW_INDEX_NAMES: [&str; 4] = ["l_orderkey", "o_orderkey", "c_cust", "o_cust"];

/// A min/avg/max band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub min: f64,
    pub avg: f64,
    pub max: f64,
}

impl Band {
    pub fn point(v: f64) -> Band {
        Band { min: v, avg: v, max: v }
    }

    /// Combines bands across repeated runs.
    pub fn merge(&mut self, other: &Band, runs: usize) {
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
        // running mean over `runs` samples seen so far including `other`
        self.avg += (other.avg - self.avg) / runs as f64;
    }
}

/// One 10^5-cycle window of measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub bucket: u64,
    /// Data tuples accepted at the instance input during the bucket.
    pub input_throughput: Band,
    /// Overflow occupancy per join index, sampled every cycle.
    pub overflow: [Band; 4],
}

/// Occupancy snapshot at an input-tuple-count checkpoint; this is the
/// series hash-table sweeps are compared on, since equal cycle indexes are
/// not comparable across costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointSample {
    pub input_tuples: u64,
    pub overflow: OverflowOccupancy,
}

/// Accumulates one run's samples cycle by cycle.
#[derive(Debug, Clone)]
pub struct MetricRecorder {
    pub samples: Vec<MetricSample>,
    pub checkpoints: Vec<CheckpointSample>,
    checkpoint_interval: u64,
    bucket: u64,
    input_count_bucket: u64,
    input_count_total: u64,
    ovf_min: [usize; 4],
    ovf_max: [usize; 4],
    ovf_sum: [u64; 4],
    cycles_in_bucket: u64,
}

impl MetricRecorder {
    pub fn new(checkpoint_interval: u64) -> MetricRecorder {
        MetricRecorder {
            samples: Vec::new(),
            checkpoints: Vec::new(),
            checkpoint_interval,
            bucket: 0,
            input_count_bucket: 0,
            input_count_total: 0,
            ovf_min: [usize::MAX; 4],
            ovf_max: [0; 4],
            ovf_sum: [0; 4],
            cycles_in_bucket: 0,
        }
    }

    /// Records one accepted input tuple; samples a checkpoint at every
    /// interval boundary.
    pub fn input_accepted(&mut self, occupancy: OverflowOccupancy) {
        self.input_count_bucket += 1;
        self.input_count_total += 1;
        if self.checkpoint_interval > 0 && self.input_count_total % self.checkpoint_interval == 0 {
            self.checkpoints
                .push(CheckpointSample { input_tuples: self.input_count_total, overflow: occupancy });
        }
    }

    /// Closes out the cycle; emits a sample at each bucket boundary.
    pub fn cycle_end(&mut self, occupancy: OverflowOccupancy) {
        for i in 0..4 {
            self.ovf_min[i] = self.ovf_min[i].min(occupancy[i]);
            self.ovf_max[i] = self.ovf_max[i].max(occupancy[i]);
            self.ovf_sum[i] += occupancy[i] as u64;
        }
        self.cycles_in_bucket += 1;
        if self.cycles_in_bucket == BUCKET_CYCLES {
            self.flush_bucket();
        }
    }

    fn flush_bucket(&mut self) {
        let cycles = self.cycles_in_bucket.max(1);
        let overflow = std::array::from_fn(|i| Band {
            min: self.ovf_min[i] as f64,
            avg: self.ovf_sum[i] as f64 / cycles as f64,
            max: self.ovf_max[i] as f64,
        });
        self.samples.push(MetricSample {
            bucket: self.bucket,
            input_throughput: Band::point(self.input_count_bucket as f64),
            overflow,
        });
        self.bucket += 1;
        self.input_count_bucket = 0;
        self.ovf_min = [usize::MAX; 4];
        self.ovf_max = [0; 4];
        self.ovf_sum = [0; 4];
        self.cycles_in_bucket = 0;
    }

    /// Finalizes the trailing partial bucket.
    pub fn finish(&mut self) {
        if self.cycles_in_bucket > 0 || self.input_count_bucket > 0 {
            self.flush_bucket();
        }
    }

    pub fn input_total(&self) -> u64 {
        self.input_count_total
    }
}

/// The documented metrics CSV header.
pub fn csv_header() -> String {
    let mut header = String::from("bucket,input_min,input_avg,input_max");
    for name in OVERFLOW_INDEX_NAMES {
        for stat in ["min", "avg", "max"] {
            header.push_str(&format!(",ovf_{name}_{stat}"));
        }
    }
    header
}

/// Serializes samples into the documented CSV (stable byte-for-byte).
pub fn samples_to_csv(samples: &[MetricSample]) -> String {
    let mut out = csv_header();
    out.push('\n');
    for s in samples {
        out.push_str(&format!(
            "{},{:.3},{:.3},{:.3}",
            s.bucket, s.input_throughput.min, s.input_throughput.avg, s.input_throughput.max
        ));
        for band in &s.overflow {
            out.push_str(&format!(",{:.3},{:.3},{:.3}", band.min, band.avg, band.max));
        }
        out.push('\n');
    }
    out
}

/// Merges per-bucket samples across repeated runs (min of mins, running
/// mean of avgs, max of maxes); run lengths may differ by trailing buckets.
pub fn merge_runs(runs: &[Vec<MetricSample>]) -> Vec<MetricSample> {
    let mut merged: Vec<MetricSample> = Vec::new();
    for (run_idx, run) in runs.iter().enumerate() {
        for (i, s) in run.iter().enumerate() {
            if i == merged.len() {
                merged.push(*s);
            } else {
                let m = &mut merged[i];
                m.input_throughput.merge(&s.input_throughput, run_idx + 1);
                for (band, other) in m.overflow.iter_mut().zip(&s.overflow) {
                    band.merge(other, run_idx + 1);
                }
            }
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands_keep_min_le_avg_le_max() {
        let mut rec = MetricRecorder::new(0);
        for occ in [0usize, 5, 3, 9, 1] {
            rec.cycle_end([occ, 0, 0, 0]);
        }
        rec.finish();
        let s = &rec.samples[0];
        assert!(s.overflow[0].min <= s.overflow[0].avg);
        assert!(s.overflow[0].avg <= s.overflow[0].max);
        assert_eq!(s.overflow[0].min, 0.0);
        assert_eq!(s.overflow[0].max, 9.0);
    }

    #[test]
    fn idle_bucket_has_zero_throughput() {
        let mut rec = MetricRecorder::new(0);
        for _ in 0..10 {
            rec.cycle_end([0; 4]);
        }
        rec.finish();
        assert_eq!(rec.samples[0].input_throughput.max, 0.0);
    }

    #[test]
    fn checkpoints_fire_at_interval() {
        let mut rec = MetricRecorder::new(2);
        for i in 0..5 {
            rec.input_accepted([i, 0, 0, 0]);
        }
        let counts: Vec<u64> = rec.checkpoints.iter().map(|c| c.input_tuples).collect();
        assert_eq!(counts, vec![2, 4]);
    }

    #[test]
    fn header_is_stable() {
        assert!(csv_header().starts_with("bucket,input_min,input_avg,input_max,ovf_l_orderkey_min"));
    }
}
