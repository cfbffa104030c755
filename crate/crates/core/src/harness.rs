//! End-to-end runners for the bundled queries: decompose rows, interleave
//! the source streams, build and program an instance, run it, and decode
//! the sink output. Shared by the CLI and the acceptance suite.

use crate::engine::{deploy, run, RunOptions, RunResult, SinkTuple};
use crate::fault::Fault;
use crate::join::hbsj::HbsjConfig;
use crate::oracle::{Q1Row, Q3Row};
use crate::topology::plan::{q1_plan, q3_plan, Q1Params, Q3Params};
use crate::topology::{assign_query, build_topology, AssignError, BuildConfig, BuildError, TopologyMatrix};
use crate::tpch::decompose::{decompose, Query};
use crate::tpch::gen::GeneratedRows;
use crate::tpch::layouts;
use crate::tpch::TableRows;
use crate::tuple::{encode_tuple, Tuple, TupleLayout};
use crate::wire::{Segment, StreamId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Assign(#[from] AssignError),
    #[error(transparent)]
    Fault(#[from] Fault),
    #[error("encoding: {0}")]
    Codec(#[from] crate::tuple::CodecError),
}

/// Interleaves per-stream tuple lists into one arrival sequence using a
/// seed-deterministic round-robin weighted by remaining cardinalities, so
/// the heavier stream arrives proportionally more often.
pub fn interleave_streams(streams: Vec<Vec<Tuple>>, seed: u64) -> Vec<Tuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queues: Vec<std::collections::VecDeque<Tuple>> =
        streams.into_iter().map(Into::into).collect();
    let mut out = Vec::with_capacity(queues.iter().map(|q| q.len()).sum());
    loop {
        let total: usize = queues.iter().map(|q| q.len()).sum();
        if total == 0 {
            break;
        }
        let mut pick = rng.gen_range(0..total);
        for q in &mut queues {
            if pick < q.len() {
                out.push(q.pop_front().expect("non-empty"));
                break;
            }
            pick -= q.len();
        }
    }
    out
}

/// The single END control tuple.
pub fn end_tuple() -> Tuple {
    Tuple::new(StreamId::END, vec![0])
}

/// Encodes an arrival sequence (plus the trailing END when requested) into
/// the flat segment schedule the engine injects one segment per cycle.
pub fn schedule_from_tuples(
    arrivals: &[Tuple],
    layout_of: impl Fn(StreamId) -> Option<TupleLayout>,
    append_end: bool,
) -> Result<Vec<Segment>, crate::tuple::CodecError> {
    let mut schedule = Vec::new();
    for t in arrivals {
        let layout = layout_of(t.stream).expect("layout for scheduled stream");
        schedule.extend(encode_tuple(t, &layout)?);
    }
    if append_end {
        schedule.extend(encode_tuple(&end_tuple(), &layouts::end_layout())?);
    }
    Ok(schedule)
}

/// Decodes sink tuples of one stream through a layout, skipping the END
/// marker and anything of a different shape.
pub fn decode_sink_rows(outputs: &[SinkTuple], stream: StreamId, layout: &TupleLayout) -> Vec<Vec<u64>> {
    outputs
        .iter()
        .filter(|t| t.stream == stream && t.payloads.len() == layout.segment_count())
        .map(|t| crate::tuple::decode_payloads(&t.payloads, layout))
        .collect()
}

/// Everything configurable about a harnessed run.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub hbsj: HbsjConfig,
    pub q3: Q3Params,
    pub q1: Q1Params,
    /// Source interleaving seed, recorded in the outcome.
    pub seed: u64,
    pub buffer_depth: usize,
    pub cycle_cap: u64,
    pub checkpoint_interval: u64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            hbsj: HbsjConfig::new(1 << 10, 1 << 11, 1 << 10),
            q3: Q3Params::default(),
            q1: Q1Params::default(),
            seed: crate::tpch::gen::MICRO_SEED,
            buffer_depth: 16,
            cycle_cap: crate::engine::DEFAULT_CYCLE_CAP,
            checkpoint_interval: 250,
        }
    }
}

impl RunConfig {
    pub fn build_config(&self) -> BuildConfig {
        BuildConfig {
            buffer_depth: self.buffer_depth,
            hbsj: self.hbsj,
            ..BuildConfig::default()
        }
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions { cycle_cap: self.cycle_cap, checkpoint_interval: self.checkpoint_interval }
    }
}

/// Outcome of a harnessed query run.
#[derive(Debug, Clone)]
pub struct QueryOutcome<Row> {
    pub rows: Vec<Row>,
    pub result: RunResult,
    /// The arrival sequence fed to the engine (and to the oracle).
    pub arrivals: Vec<Tuple>,
    pub seed: u64,
}

/// Decomposes the three tables into the Q3 arrival sequence.
pub fn q3_arrivals(rows: &GeneratedRows, seed: u64) -> Vec<Tuple> {
    let lineitems =
        decompose(&TableRows::Lineitem(rows.lineitems.clone()), layouts::LINEITEM, Query::Q3);
    let orders = decompose(&TableRows::Orders(rows.orders.clone()), layouts::ORDERS, Query::Q3);
    let customers =
        decompose(&TableRows::Customer(rows.customers.clone()), layouts::CUSTOMER, Query::Q3);
    interleave_streams(vec![lineitems.tuples, orders.tuples, customers.tuples], seed)
}

fn q3_layout_of(stream: StreamId) -> Option<TupleLayout> {
    if stream == layouts::LINEITEM {
        Some(layouts::lineitem_q3())
    } else if stream == layouts::ORDERS {
        Some(layouts::orders_q3())
    } else if stream == layouts::CUSTOMER {
        Some(layouts::customer_q3())
    } else if stream == layouts::LINEITEM_Q1 {
        Some(layouts::lineitem_q1())
    } else {
        None
    }
}

/// Builds the 4x1 instance, deploys the shipping-priority plan, runs the
/// dataset through it and decodes the top-k rows.
pub fn run_q3(rows: &GeneratedRows, cfg: &RunConfig) -> Result<QueryOutcome<Q3Row>, HarnessError> {
    let matrix = TopologyMatrix::q3_4x1(cfg.q3.variant);
    let mut instance = build_topology(&matrix, &cfg.build_config())?;
    let plan = q3_plan(&cfg.q3);
    let program = assign_query(&plan, &mut instance)?;
    deploy(&mut instance, &program)?;

    let arrivals = q3_arrivals(rows, cfg.seed);
    let schedule = schedule_from_tuples(&arrivals, q3_layout_of, true)?;
    let result = run(&mut instance, &schedule, cfg.run_options())?;

    let out_layout = layouts::group_out_q3();
    let rows_out = decode_sink_rows(&result.outputs, layouts::LINEITEM, &out_layout)
        .into_iter()
        .map(|v| [v[0], v[1], v[2], v[3]])
        .collect();
    Ok(QueryOutcome { rows: rows_out, result, arrivals, seed: cfg.seed })
}

/// Q1 arrival sequence: the lineitem table on its dedicated stream id.
pub fn q1_arrivals(rows: &GeneratedRows) -> Vec<Tuple> {
    decompose(&TableRows::Lineitem(rows.lineitems.clone()), layouts::LINEITEM_Q1, Query::Q1).tuples
}

/// Runs the pricing-summary plan on a 4x2 instance (column 0).
pub fn run_q1(rows: &GeneratedRows, cfg: &RunConfig) -> Result<QueryOutcome<Q1Row>, HarnessError> {
    let mut instance = build_topology(&TopologyMatrix::q1q3_4x2(), &cfg.build_config())?;
    let plan = q1_plan(&cfg.q1);
    let program = assign_query(&plan, &mut instance)?;
    deploy(&mut instance, &program)?;

    let arrivals = q1_arrivals(rows);
    let schedule = schedule_from_tuples(&arrivals, q3_layout_of, true)?;
    let result = run(&mut instance, &schedule, cfg.run_options())?;

    let out_layout = layouts::group_out_q1();
    let rows_out = decode_sink_rows(&result.outputs, layouts::LINEITEM_Q1, &out_layout)
        .into_iter()
        .map(|v| [v[0], v[1], v[2], v[3], v[4], v[5]])
        .collect();
    Ok(QueryOutcome { rows: rows_out, result, arrivals, seed: cfg.seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interleaving_preserves_per_stream_order_and_is_seeded() {
        let a: Vec<Tuple> =
            (0..50).map(|i| Tuple::new(layouts::LINEITEM, vec![i])).collect();
        let b: Vec<Tuple> = (0..20).map(|i| Tuple::new(layouts::ORDERS, vec![i])).collect();
        let merged = interleave_streams(vec![a.clone(), b.clone()], 7);
        assert_eq!(merged.len(), 70);
        let sub_a: Vec<&Tuple> =
            merged.iter().filter(|t| t.stream == layouts::LINEITEM).collect();
        assert!(sub_a.iter().zip(&a).all(|(x, y)| **x == *y));
        let again = interleave_streams(vec![a.clone(), b.clone()], 7);
        assert_eq!(merged, again);
        let different = interleave_streams(vec![a, b], 8);
        assert_ne!(merged, different);
    }
}
