//! TPC-H table ingestion, the decomposer/parse-table/composer path, and
//! deterministic desk-scale data generation.

pub mod dates;
pub mod decompose;
pub mod gen;
pub mod layouts;

pub use dates::{day_number, day_to_date};
pub use decompose::{compose, decompose, DecomposeError, Decomposed, ParseTable};
pub use gen::{generate_rows, write_tbl_files, DatasetSpec, GeneratedRows};

use std::path::Path;

/// Which benchmark table a `.tbl` file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Customer,
    Orders,
    Lineitem,
}

/// A parsed customer row: typed fields the queries touch, the rest kept
/// verbatim for the parse table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CustomerRow {
    pub c_custkey: u64,
    pub c_mktsegment: u64,
    /// Unprojected columns in file order.
    pub retained: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdersRow {
    pub o_orderkey: u64,
    pub o_custkey: u64,
    pub o_orderdate: u64,
    pub o_shippriority: u64,
    pub retained: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineitemRow {
    pub l_orderkey: u64,
    pub l_quantity: u64,
    pub l_extendedprice: u64,
    pub l_discount: u64,
    pub l_returnflag: u64,
    pub l_linestatus: u64,
    pub l_shipdate: u64,
    pub retained: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableRows {
    Customer(Vec<CustomerRow>),
    Orders(Vec<OrdersRow>),
    Lineitem(Vec<LineitemRow>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: expected {want} columns, found {got}")]
    ColumnCount { line: usize, want: usize, got: usize },
    #[error("line {line}: bad {column}: {value:?}")]
    BadValue { line: usize, column: &'static str, value: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn split_tbl_line(line: &str, want: usize, line_no: usize) -> Result<Vec<&str>, ParseError> {
    // DBGen lines end with a trailing delimiter.
    let trimmed = line.strip_suffix('|').unwrap_or(line);
    let cols: Vec<&str> = trimmed.split('|').collect();
    if cols.len() != want {
        return Err(ParseError::ColumnCount { line: line_no, want, got: cols.len() });
    }
    Ok(cols)
}

fn parse_u64(cols: &[&str], idx: usize, column: &'static str, line: usize) -> Result<u64, ParseError> {
    cols[idx]
        .parse()
        .map_err(|_| ParseError::BadValue { line, column, value: cols[idx].to_string() })
}

/// Money columns like `36085.34` become integer cents.
fn parse_cents(cols: &[&str], idx: usize, column: &'static str, line: usize) -> Result<u64, ParseError> {
    let text = cols[idx];
    let bad = || ParseError::BadValue { line, column, value: text.to_string() };
    let (whole, frac) = text.split_once('.').ok_or_else(bad)?;
    if frac.len() != 2 {
        return Err(bad());
    }
    let whole: u64 = whole.parse().map_err(|_| bad())?;
    let frac: u64 = frac.parse().map_err(|_| bad())?;
    Ok(whole * 100 + frac)
}

/// TPC-H discounts are hundredths written as `0.04`.
fn parse_hundredths(cols: &[&str], idx: usize, column: &'static str, line: usize) -> Result<u64, ParseError> {
    parse_cents(cols, idx, column, line)
}

fn parse_date(cols: &[&str], idx: usize, column: &'static str, line: usize) -> Result<u64, ParseError> {
    dates::day_number(cols[idx])
        .map(|d| d as u64)
        .map_err(|_| ParseError::BadValue { line, column, value: cols[idx].to_string() })
}

/// Parses DBGen pipe-delimited text for one table kind.
pub fn parse_tbl_text(text: &str, kind: TableKind) -> Result<TableRows, ParseError> {
    match kind {
        TableKind::Customer => {
            let mut rows = Vec::new();
            for (i, line) in text.lines().enumerate() {
                if line.is_empty() {
                    continue;
                }
                let n = i + 1;
                let c = split_tbl_line(line, 8, n)?;
                let seg = layouts::mktsegment_code(c[6]).ok_or(ParseError::BadValue {
                    line: n,
                    column: "c_mktsegment",
                    value: c[6].to_string(),
                })?;
                rows.push(CustomerRow {
                    c_custkey: parse_u64(&c, 0, "c_custkey", n)?,
                    c_mktsegment: seg,
                    retained: [1usize, 2, 3, 4, 5, 7].iter().map(|&j| c[j].to_string()).collect(),
                });
            }
            Ok(TableRows::Customer(rows))
        }
        TableKind::Orders => {
            let mut rows = Vec::new();
            for (i, line) in text.lines().enumerate() {
                if line.is_empty() {
                    continue;
                }
                let n = i + 1;
                let c = split_tbl_line(line, 9, n)?;
                rows.push(OrdersRow {
                    o_orderkey: parse_u64(&c, 0, "o_orderkey", n)?,
                    o_custkey: parse_u64(&c, 1, "o_custkey", n)?,
                    o_orderdate: parse_date(&c, 4, "o_orderdate", n)?,
                    o_shippriority: parse_u64(&c, 7, "o_shippriority", n)?,
                    retained: [2usize, 3, 5, 6, 8].iter().map(|&j| c[j].to_string()).collect(),
                });
            }
            Ok(TableRows::Orders(rows))
        }
        TableKind::Lineitem => {
            let mut rows = Vec::new();
            for (i, line) in text.lines().enumerate() {
                if line.is_empty() {
                    continue;
                }
                let n = i + 1;
                let c = split_tbl_line(line, 16, n)?;
                let quantity = parse_u64(&c, 4, "l_quantity", n)?;
                let returnflag = c[8]
                    .chars()
                    .next()
                    .and_then(layouts::returnflag_code)
                    .ok_or(ParseError::BadValue {
                        line: n,
                        column: "l_returnflag",
                        value: c[8].to_string(),
                    })?;
                let linestatus = c[9]
                    .chars()
                    .next()
                    .and_then(layouts::linestatus_code)
                    .ok_or(ParseError::BadValue {
                        line: n,
                        column: "l_linestatus",
                        value: c[9].to_string(),
                    })?;
                rows.push(LineitemRow {
                    l_orderkey: parse_u64(&c, 0, "l_orderkey", n)?,
                    l_quantity: quantity,
                    l_extendedprice: parse_cents(&c, 5, "l_extendedprice", n)?,
                    l_discount: parse_hundredths(&c, 6, "l_discount", n)?,
                    l_returnflag: returnflag,
                    l_linestatus: linestatus,
                    l_shipdate: parse_date(&c, 10, "l_shipdate", n)?,
                    retained: [1usize, 2, 3, 7, 11, 12, 13, 14, 15]
                        .iter()
                        .map(|&j| c[j].to_string())
                        .collect(),
                });
            }
            Ok(TableRows::Lineitem(rows))
        }
    }
}

/// Reads and parses one `.tbl` file.
pub fn parse_tbl(path: &Path, kind: TableKind) -> Result<TableRows, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_tbl_text(&text, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_has_no_rows() {
        match parse_tbl_text("", TableKind::Customer).unwrap() {
            TableRows::Customer(rows) => assert!(rows.is_empty()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn parses_dbgen_style_lines() {
        // Shapes taken from DBGen SF=0.01 output.
        let orders = "1|36901|O|173665.47|1996-01-02|5-LOW|Clerk#000000951|0|nstructions sleep furiously among |\n";
        match parse_tbl_text(orders, TableKind::Orders).unwrap() {
            TableRows::Orders(rows) => {
                assert_eq!(rows[0].o_orderkey, 1);
                assert_eq!(rows[0].o_custkey, 36901);
                assert_eq!(rows[0].o_orderdate, dates::day_number("1996-01-02").unwrap() as u64);
                assert_eq!(rows[0].o_shippriority, 0);
                assert_eq!(rows[0].retained.len(), 5);
            }
            _ => unreachable!(),
        }

        let lineitem = "1|155190|7706|1|17|21168.23|0.04|0.02|N|O|1996-03-13|1996-02-12|1996-03-22|DELIVER IN PERSON|TRUCK|egular courts above the|\n";
        match parse_tbl_text(lineitem, TableKind::Lineitem).unwrap() {
            TableRows::Lineitem(rows) => {
                assert_eq!(rows[0].l_orderkey, 1);
                assert_eq!(rows[0].l_extendedprice, 2_116_823);
                assert_eq!(rows[0].l_discount, 4);
                assert_eq!(rows[0].l_shipdate, dates::day_number("1996-03-13").unwrap() as u64);
            }
            _ => unreachable!(),
        }

        let customer = "1|Customer#000000001|IVhzIApeRb ot,c,E|15|25-989-741-2988|711.56|BUILDING|to the even, regular platelets|\n";
        match parse_tbl_text(customer, TableKind::Customer).unwrap() {
            TableRows::Customer(rows) => {
                assert_eq!(rows[0].c_custkey, 1);
                assert_eq!(rows[0].c_mktsegment, layouts::mktsegment_code("BUILDING").unwrap());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn money_becomes_cents() {
        let cols = vec!["36085.34"];
        assert_eq!(parse_cents(&cols, 0, "x", 1).unwrap(), 3_608_534);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "1|2|3|\n";
        match parse_tbl_text(text, TableKind::Orders) {
            Err(ParseError::ColumnCount { line: 1, want: 9, got: 3 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
