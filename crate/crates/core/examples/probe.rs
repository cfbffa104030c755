// Development probe: run the micro dataset end to end and diff against the
// oracle; exercises the single-query and reconfigured dual-query flows.

use diba_core::engine::{deploy, run};
use diba_core::harness::{
    decode_sink_rows, q1_arrivals, q3_arrivals, run_q1, run_q3, schedule_from_tuples, RunConfig,
};
use diba_core::join::hbsj::HbsjConfig;
use diba_core::oracle::{oracle_q1, oracle_q3, OracleConfig};
use diba_core::topology::plan::{q1_plan, q3_plan};
use diba_core::topology::{assign_query, build_topology, TopologyMatrix};
use diba_core::tpch::gen::{generate_rows, DatasetSpec};
use diba_core::tpch::layouts;

fn main() {
    let rows = generate_rows(&DatasetSpec::micro());
    let cfg = RunConfig {
        hbsj: HbsjConfig::new(1 << 10, 1 << 8, 1 << 10),
        ..RunConfig::default()
    };

    let outcome = run_q3(&rows, &cfg).expect("q3 run");
    let oracle = oracle_q3(&outcome.arrivals, &OracleConfig::with_window(1 << 10));
    assert_eq!(outcome.rows, oracle);
    println!("q3: {} rows, {} cycles, MATCH", outcome.rows.len(), outcome.result.total_cycles);

    let q1 = run_q1(&rows, &cfg).expect("q1 run");
    let q1_oracle = oracle_q1(&q1.arrivals, 2436);
    assert_eq!(q1.rows, q1_oracle);
    println!("q1: {} rows, {} cycles, MATCH", q1.rows.len(), q1.result.total_cycles);

    // Online reconfiguration: deploy q1, run, then deploy q3 on the same
    // instance and run it.
    let mut instance = build_topology(&TopologyMatrix::q1q3_4x2(), &cfg.build_config()).unwrap();
    let q1_prog = assign_query(&q1_plan(&cfg.q1), &mut instance).unwrap();
    deploy(&mut instance, &q1_prog).unwrap();
    let layout_of = |s| {
        if s == layouts::LINEITEM {
            Some(layouts::lineitem_q3())
        } else if s == layouts::ORDERS {
            Some(layouts::orders_q3())
        } else if s == layouts::CUSTOMER {
            Some(layouts::customer_q3())
        } else if s == layouts::LINEITEM_Q1 {
            Some(layouts::lineitem_q1())
        } else {
            None
        }
    };
    let arrivals1 = q1_arrivals(&rows);
    let sched1 = schedule_from_tuples(&arrivals1, layout_of, true).unwrap();
    let res1 = run(&mut instance, &sched1, cfg.run_options()).unwrap();
    let got1: Vec<[u64; 6]> =
        decode_sink_rows(&res1.outputs, layouts::LINEITEM_Q1, &layouts::group_out_q1())
            .into_iter()
            .map(|v| [v[0], v[1], v[2], v[3], v[4], v[5]])
            .collect();
    assert_eq!(got1, oracle_q1(&arrivals1, 2436));
    println!("recfg q1: {} rows MATCH ({} cycles)", got1.len(), res1.total_cycles);

    let q3_prog = assign_query(&q3_plan(&cfg.q3), &mut instance).unwrap();
    deploy(&mut instance, &q3_prog).unwrap();
    let arrivals3 = q3_arrivals(&rows, cfg.seed);
    let sched3 = schedule_from_tuples(&arrivals3, layout_of, true).unwrap();
    let res3 = run(&mut instance, &sched3, cfg.run_options()).unwrap();
    let got3: Vec<[u64; 4]> =
        decode_sink_rows(&res3.outputs, layouts::LINEITEM, &layouts::group_out_q3())
            .into_iter()
            .map(|v| [v[0], v[1], v[2], v[3]])
            .collect();
    assert_eq!(got3, oracle_q3(&arrivals3, &OracleConfig::with_window(1 << 10)));
    println!("recfg q3: {} rows MATCH ({} cycles)", got3.len(), res3.total_cycles);
}
