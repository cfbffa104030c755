//! Deterministic desk-scale dataset generation: a stand-in for DBGen with
//! referential integrity and the value shapes the bundled queries touch.
//! Generation is a pure function of the spec; files are byte-stable.

use crate::tpch::dates::day_to_date;
use crate::tpch::layouts::MKT_SEGMENTS;
use crate::tpch::{CustomerRow, LineitemRow, OrdersRow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// The bundled micro-dataset seed used by the acceptance runs.
pub const MICRO_SEED: u64 = 0xD1BA;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub seed: u64,
    pub customers: u64,
    pub orders: u64,
    pub lineitems: u64,
    /// Multiplies every cardinality (the scale-factor role).
    pub scale: u64,
}

impl DatasetSpec {
    /// The 50/200/1000-row micro dataset.
    pub fn micro() -> DatasetSpec {
        DatasetSpec { seed: MICRO_SEED, customers: 50, orders: 200, lineitems: 1000, scale: 1 }
    }

    pub fn scaled(mut self, scale: u64) -> DatasetSpec {
        self.scale = scale;
        self
    }

    fn counts(&self) -> (u64, u64, u64) {
        (self.customers * self.scale, self.orders * self.scale, self.lineitems * self.scale)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedRows {
    pub customers: Vec<CustomerRow>,
    pub orders: Vec<OrdersRow>,
    pub lineitems: Vec<LineitemRow>,
}

/// Generates typed rows. Dates span 1992-1998, about a quarter of the
/// customers sit in the BUILDING segment, ship dates trail order dates by
/// at most 121 days, and every foreign key resolves.
pub fn generate_rows(spec: &DatasetSpec) -> GeneratedRows {
    let (n_cust, n_ord, n_line) = spec.counts();
    assert!(n_cust > 0 && n_ord > 0 && n_line > 0, "zero cardinalities");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // 1992-01-01 .. 1998-08-02 leaves room for the 121-day ship lag.
    let max_order_day: u64 = 2405;

    let customers: Vec<CustomerRow> = (1..=n_cust)
        .map(|key| {
            let seg_idx = if rng.gen_bool(0.25) { 1 } else { [0usize, 2, 3, 4][rng.gen_range(0..4)] };
            CustomerRow {
                c_custkey: key,
                c_mktsegment: seg_idx as u64,
                retained: vec![
                    format!("Customer#{key:09}"),
                    format!("addr-{key}"),
                    format!("{}", rng.gen_range(0..25)),
                    format!("{:02}-000-000-{key:04}", rng.gen_range(10..35)),
                    format!("{}.{:02}", rng.gen_range(-99i64..10_000), rng.gen_range(0..100)),
                    "generated".to_string(),
                ],
            }
        })
        .collect();

    let orders: Vec<OrdersRow> = (1..=n_ord)
        .map(|key| {
            let custkey = rng.gen_range(1..=n_cust);
            let day = rng.gen_range(0..=max_order_day);
            OrdersRow {
                o_orderkey: key,
                o_custkey: custkey,
                o_orderdate: day,
                o_shippriority: 0,
                retained: vec![
                    if rng.gen_bool(0.5) { "O" } else { "F" }.to_string(),
                    format!("{}.{:02}", rng.gen_range(1000..300_000), rng.gen_range(0..100)),
                    format!("{}-GENERATED", rng.gen_range(1..6)),
                    format!("Clerk#{:09}", rng.gen_range(1..1000)),
                    "generated order".to_string(),
                ],
            }
        })
        .collect();

    let lineitems: Vec<LineitemRow> = (0..n_line)
        .map(|i| {
            let order = &orders[rng.gen_range(0..n_ord) as usize];
            let quantity = rng.gen_range(1..=50u64);
            let price = rng.gen_range(90_000..=10_000_000u64);
            let discount = rng.gen_range(0..=10u64);
            let ship_lag = rng.gen_range(1..=121u64);
            let returnflag = rng.gen_range(0..3u64);
            let linestatus = rng.gen_range(0..2u64);
            LineitemRow {
                l_orderkey: order.o_orderkey,
                l_quantity: quantity,
                l_extendedprice: price,
                l_discount: discount,
                l_returnflag: returnflag,
                l_linestatus: linestatus,
                l_shipdate: order.o_orderdate + ship_lag,
                retained: vec![
                    format!("{}", rng.gen_range(1..=200_000)),
                    format!("{}", rng.gen_range(1..=10_000)),
                    format!("{}", i % 7 + 1),
                    format!("0.0{}", rng.gen_range(0..9)),
                    day_to_date((order.o_orderdate + ship_lag + 10) as u16),
                    day_to_date((order.o_orderdate + ship_lag + 20) as u16),
                    "NONE".to_string(),
                    ["TRUCK", "MAIL", "SHIP", "RAIL"][rng.gen_range(0..4)].to_string(),
                    "generated lineitem".to_string(),
                ],
            }
        })
        .collect();

    GeneratedRows { customers, orders, lineitems }
}

fn flag_char(code: u64) -> char {
    ['A', 'N', 'R'][code as usize]
}

fn status_char(code: u64) -> char {
    ['F', 'O'][code as usize]
}

/// Writes `customer.tbl`, `orders.tbl` and `lineitem.tbl` in DBGen format
/// (pipe-delimited with a trailing pipe). Byte-identical for equal specs.
pub fn write_tbl_files(spec: &DatasetSpec, dir: &Path) -> std::io::Result<()> {
    let rows = generate_rows(spec);
    std::fs::create_dir_all(dir)?;

    let mut customer = Vec::new();
    for c in &rows.customers {
        writeln!(
            customer,
            "{}|{}|{}|{}|{}|{}|{}|{}|",
            c.c_custkey,
            c.retained[0],
            c.retained[1],
            c.retained[2],
            c.retained[3],
            c.retained[4],
            MKT_SEGMENTS[c.c_mktsegment as usize],
            c.retained[5],
        )?;
    }
    std::fs::write(dir.join("customer.tbl"), customer)?;

    let mut orders = Vec::new();
    for o in &rows.orders {
        writeln!(
            orders,
            "{}|{}|{}|{}|{}|{}|{}|{}|{}|",
            o.o_orderkey,
            o.o_custkey,
            o.retained[0],
            o.retained[1],
            day_to_date(o.o_orderdate as u16),
            o.retained[2],
            o.retained[3],
            o.o_shippriority,
            o.retained[4],
        )?;
    }
    std::fs::write(dir.join("orders.tbl"), orders)?;

    let mut lineitem = Vec::new();
    for l in &rows.lineitems {
        writeln!(
            lineitem,
            "{}|{}|{}|{}|{}|{}.{:02}|0.{:02}|{}|{}|{}|{}|{}|{}|{}|{}|{}|",
            l.l_orderkey,
            l.retained[0],
            l.retained[1],
            l.retained[2],
            l.l_quantity,
            l.l_extendedprice / 100,
            l.l_extendedprice % 100,
            l.l_discount,
            l.retained[3],
            flag_char(l.l_returnflag),
            status_char(l.l_linestatus),
            day_to_date(l.l_shipdate as u16),
            l.retained[4],
            l.retained[5],
            l.retained[6],
            l.retained[7],
            l.retained[8],
        )?;
    }
    std::fs::write(dir.join("lineitem.tbl"), lineitem)?;
    Ok(())
}
