// Development probe: linearity R^2 across candidate base dataset sizes.

use diba_core::harness::{run_q3, RunConfig};
use diba_core::tpch::gen::{generate_rows, DatasetSpec};

fn r2(points: &[(f64, f64)]) -> f64 {
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
    1.0 - ss_res / ss_tot
}

fn main() {
    for (cust, ord, line) in [(50u64, 200u64, 1000u64), (150, 600, 3000), (250, 1000, 5000), (500, 2000, 10000)] {
        let t0 = std::time::Instant::now();
        let mut points = Vec::new();
        for scale in [1u64, 2, 4, 6, 8, 10] {
            let spec = DatasetSpec { seed: 0xD1BA, customers: cust, orders: ord, lineitems: line, scale };
            let rows = generate_rows(&spec);
            let out = run_q3(&rows, &RunConfig::default()).expect("run");
            points.push((scale as f64, out.result.total_cycles as f64));
        }
        println!(
            "base {line} lineitems: R^2 = {:.5} in {:?}  points {:?}",
            r2(&points),
            t0.elapsed(),
            points.iter().map(|p| p.1 as u64).collect::<Vec<_>>()
        );
    }
}
