// Development probe: per-unit busy-cycle attribution across scales.

use diba_core::engine::{deploy, run, Block};
use diba_core::harness::{q3_arrivals, schedule_from_tuples, RunConfig};
use diba_core::topology::plan::q3_plan;
use diba_core::topology::{assign_query, build_topology, TopologyMatrix};
use diba_core::tpch::gen::{generate_rows, DatasetSpec};
use diba_core::tpch::layouts;

fn main() {
    for scale in [1u64, 2, 4, 6, 8, 10] {
        let rows = generate_rows(&DatasetSpec::micro().scaled(scale));
        let cfg = RunConfig::default();
        let mut instance =
            build_topology(&TopologyMatrix::q3_4x1(cfg.q3.variant), &cfg.build_config()).unwrap();
        let program = assign_query(&q3_plan(&cfg.q3), &mut instance).unwrap();
        deploy(&mut instance, &program).unwrap();
        let arrivals = q3_arrivals(&rows, cfg.seed);
        let layout_of = |s| {
            if s == layouts::LINEITEM {
                Some(layouts::lineitem_q3())
            } else if s == layouts::ORDERS {
                Some(layouts::orders_q3())
            } else if s == layouts::CUSTOMER {
                Some(layouts::customer_q3())
            } else {
                None
            }
        };
        let schedule = schedule_from_tuples(&arrivals, layout_of, true).unwrap();
        let segs = schedule.len();
        let result = run(&mut instance, &schedule, cfg.run_options()).unwrap();
        print!("scale {scale}: total {} ({} segs)", result.total_cycles, segs);
        for b in &instance.blocks {
            if let Block::Unit(u) = b {
                if u.busy_total > 0 {
                    print!(" [b{} {:?} busy {}]", u.b_id, kind_name(u), u.busy_total);
                }
            }
        }
        println!();
    }
}

fn kind_name(u: &diba_core::punits::PUnit) -> &'static str {
    use diba_core::punits::UnitKind::*;
    match &u.kind {
        Bypass => "bypass",
        Selection(_) => "sel",
        JoinQ3(_) => "join",
        AggGroupBy(_) => "agg",
        OrderBy(_) => "orderby",
    }
}
