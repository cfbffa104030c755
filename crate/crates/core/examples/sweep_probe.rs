// Development probe for the trend criteria: hash-table sweep, input-size
// linearity, and overflow dominance.

use diba_core::harness::{run_q3, RunConfig};
use diba_core::join::hbsj::HbsjConfig;
use diba_core::tpch::gen::{generate_rows, DatasetSpec};

fn main() {
    let spec = DatasetSpec { seed: 0xD1BA2, customers: 500, orders: 2000, lineitems: 12_000, scale: 1 };
    let rows = generate_rows(&spec);

    let mut cycles = Vec::new();
    for exp in 5..=11u32 {
        let cfg = RunConfig {
            hbsj: HbsjConfig::new(1 << 10, 1 << exp, 1 << 10),
            ..RunConfig::default()
        };
        let t0 = std::time::Instant::now();
        let out = run_q3(&rows, &cfg).expect("run");
        println!(
            "ht=2^{exp}: {} cycles, {} rows, wall {:?}, checkpoints {}",
            out.result.total_cycles,
            out.rows.len(),
            t0.elapsed(),
            out.result.checkpoints.len()
        );
        cycles.push(out.result.total_cycles);
    }
    for w in cycles.windows(2) {
        assert!(w[1] <= w[0], "cycles must be non-increasing: {cycles:?}");
    }
    let ratio = cycles[0] as f64 / cycles[6] as f64;
    println!("ratio 2^5 / 2^11 = {ratio:.1}");
    assert!(ratio >= 10.0);

    // overflow dominance: ht=2^5 occupancy >= ht=2^11 at equal checkpoints
    let run_at = |exp: u32| {
        let cfg = RunConfig {
            hbsj: HbsjConfig::new(1 << 10, 1 << exp, 1 << 10),
            ..RunConfig::default()
        };
        run_q3(&rows, &cfg).expect("run").result.checkpoints
    };
    let small = run_at(5);
    let large = run_at(11);
    let mut violations = 0;
    for (s, l) in small.iter().zip(&large) {
        assert_eq!(s.input_tuples, l.input_tuples);
        for i in 0..4 {
            if s.overflow[i] < l.overflow[i] {
                violations += 1;
                println!(
                    "dominance violation at {} tuples, index {i}: {} < {}",
                    s.input_tuples, s.overflow[i], l.overflow[i]
                );
            }
        }
    }
    println!("dominance violations: {violations} over {} checkpoints", small.len());
    assert_eq!(violations, 0);

    // input-size linearity at ht=2^11
    let mut points = Vec::new();
    for scale in [1u64, 2, 4, 6, 8, 10] {
        let rows = generate_rows(&DatasetSpec::micro().scaled(scale));
        let cfg = RunConfig::default(); // ht = 2^11
        let out = run_q3(&rows, &cfg).expect("run");
        println!("scale {scale}: {} cycles", out.result.total_cycles);
        points.push((scale as f64, out.result.total_cycles as f64));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_res: f64 = points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    println!("linearity R^2 = {r2:.5}");
    assert!(r2 >= 0.99);
    println!("ALL TRENDS OK");
}
