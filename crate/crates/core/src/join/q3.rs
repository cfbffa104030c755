//! The three-way stream join customized for the shipping-priority query.
//!
//! Both the lineitem and customer streams join against different attributes
//! of the orders stream, so no circular feedback path is needed. Two
//! variants are built:
//!
//! * `Direct` keeps two separately windowed orders stages, one indexed on
//!   o_custkey and one on o_orderkey.
//! * `Optimized` folds both orders indexes over a single window, since any
//!   incoming tuple probes at most one of them.
//!
//! Probe routing:
//! * ORDERS: store; probe CUSTOMER (on o_custkey); results emit after the
//!   LINE-ITEM stage (probe on o_orderkey).
//! * CUSTOMER: store; probe ORDERS via the custkey index; intermediates
//!   pass the customer stage unprocessed, then probe LINE-ITEM.
//! * LINEITEM: store; probe ORDERS via the orderkey index; then CUSTOMER.

use crate::fault::Fault;
use crate::join::cmj::CmjCost;
use crate::join::hbsj::{DualIndexWindow, HbsjConfig, SlidingJoinState, StoredTuple};
use crate::wire::StreamId;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Q3Variant {
    Direct,
    Optimized,
}

/// Field positions within the three input value vectors.
#[derive(Debug, Clone, Copy)]
pub struct Q3FieldMap {
    pub lineitem_stream: StreamId,
    pub orders_stream: StreamId,
    pub customer_stream: StreamId,
    pub l_orderkey: usize,
    pub o_orderkey: usize,
    pub o_custkey: usize,
    pub c_custkey: usize,
}

/// One fully joined (customer, orders, lineitem) triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q3Match {
    pub customer: Vec<u64>,
    pub order: Vec<u64>,
    pub lineitem: Vec<u64>,
}

#[derive(Debug, Clone)]
enum OrdersStage {
    /// One window, two indexes (index A: o_custkey, index B: o_orderkey).
    Dual(DualIndexWindow),
    /// Two replicated windows, each singly indexed.
    Direct { by_custkey: SlidingJoinState, by_orderkey: SlidingJoinState },
}

/// Per-index overflow occupancies in the order the experiments report them:
/// l_orderkey, o_orderkey, c_cust, o_cust.
pub type OverflowOccupancy = [usize; 4];

#[derive(Debug, Clone)]
pub struct Q3JoinCore {
    fields: Q3FieldMap,
    lineitem: SlidingJoinState,
    customer: SlidingJoinState,
    orders: OrdersStage,
}

impl Q3JoinCore {
    pub fn new(variant: Q3Variant, config: HbsjConfig, fields: Q3FieldMap) -> Q3JoinCore {
        let orders = match variant {
            Q3Variant::Optimized => {
                OrdersStage::Dual(DualIndexWindow::new(config, fields.o_custkey, fields.o_orderkey))
            }
            Q3Variant::Direct => OrdersStage::Direct {
                by_custkey: SlidingJoinState::new(config),
                by_orderkey: SlidingJoinState::new(config),
            },
        };
        Q3JoinCore {
            fields,
            lineitem: SlidingJoinState::new(config),
            customer: SlidingJoinState::new(config),
            orders,
        }
    }

    pub fn variant(&self) -> Q3Variant {
        match self.orders {
            OrdersStage::Dual(_) => Q3Variant::Optimized,
            OrdersStage::Direct { .. } => Q3Variant::Direct,
        }
    }

    fn orders_insert(&mut self, values: Vec<u64>) -> usize {
        match &mut self.orders {
            OrdersStage::Dual(w) => w.insert(values),
            OrdersStage::Direct { by_custkey, by_orderkey } => {
                let key_a = values[self.fields.o_custkey];
                let key_b = values[self.fields.o_orderkey];
                let mut expirations = 0;
                if by_custkey.insert(StoredTuple { key: key_a, values: values.clone() }).expired.is_some() {
                    expirations += 1;
                }
                if by_orderkey.insert(StoredTuple { key: key_b, values }).expired.is_some() {
                    expirations += 1;
                }
                expirations
            }
        }
    }

    fn orders_probe_custkey(&self, key: u64) -> (Vec<Vec<u64>>, u64) {
        match &self.orders {
            OrdersStage::Dual(w) => (
                w.probe_a(key).into_iter().map(|t| t.values.clone()).collect(),
                w.index_a().overflow_occupancy() as u64,
            ),
            OrdersStage::Direct { by_custkey, .. } => (
                by_custkey.probe(key).into_iter().map(|t| t.values.clone()).collect(),
                by_custkey.overflow_occupancy() as u64,
            ),
        }
    }

    fn orders_probe_orderkey(&self, key: u64) -> (Vec<Vec<u64>>, u64) {
        match &self.orders {
            OrdersStage::Dual(w) => (
                w.probe_b(key).into_iter().map(|t| t.values.clone()).collect(),
                w.index_b().overflow_occupancy() as u64,
            ),
            OrdersStage::Direct { by_orderkey, .. } => (
                by_orderkey.probe(key).into_iter().map(|t| t.values.clone()).collect(),
                by_orderkey.overflow_occupancy() as u64,
            ),
        }
    }

    /// Stores the tuple in its stage and runs the probe chain, returning the
    /// joined triples and the cycle cost.
    pub fn ingest(
        &mut self,
        stream: StreamId,
        values: Vec<u64>,
        cost: &CmjCost,
    ) -> Result<(Vec<Q3Match>, u64), Fault> {
        let f = self.fields;
        let mut cycles = 0u64;
        let mut results = Vec::new();

        if stream == f.lineitem_stream {
            cycles += cost.insert;
            let key = values[f.l_orderkey];
            if self.lineitem.insert(StoredTuple { key, values: values.clone() }).expired.is_some() {
                cycles += cost.expire_extra;
            }
            let (orders, ovf_b) = self.orders_probe_orderkey(key);
            cycles += cost.hash_probe + cost.overflow_scan * ovf_b;
            for order in orders {
                cycles += self.customer.probe_cost(cost.hash_probe, cost.overflow_scan);
                for customer in self.customer.probe(order[f.o_custkey]) {
                    results.push(Q3Match {
                        customer: customer.values.clone(),
                        order: order.clone(),
                        lineitem: values.clone(),
                    });
                }
            }
        } else if stream == f.orders_stream {
            let expirations = self.orders_insert(values.clone());
            cycles += 2 * cost.insert + cost.expire_extra * expirations as u64;
            cycles += self.customer.probe_cost(cost.hash_probe, cost.overflow_scan);
            let customers: Vec<Vec<u64>> = self
                .customer
                .probe(values[f.o_custkey])
                .into_iter()
                .map(|t| t.values.clone())
                .collect();
            for customer in customers {
                cycles += self.lineitem.probe_cost(cost.hash_probe, cost.overflow_scan);
                for lineitem in self.lineitem.probe(values[f.o_orderkey]) {
                    results.push(Q3Match {
                        customer: customer.clone(),
                        order: values.clone(),
                        lineitem: lineitem.values.clone(),
                    });
                }
            }
        } else if stream == f.customer_stream {
            cycles += cost.insert;
            let key = values[f.c_custkey];
            if self.customer.insert(StoredTuple { key, values: values.clone() }).expired.is_some() {
                cycles += cost.expire_extra;
            }
            let (orders, ovf_a) = self.orders_probe_custkey(key);
            cycles += cost.hash_probe + cost.overflow_scan * ovf_a;
            for order in orders {
                // intermediates pass the customer stage without processing
                cycles += self.lineitem.probe_cost(cost.hash_probe, cost.overflow_scan);
                for lineitem in self.lineitem.probe(order[f.o_orderkey]) {
                    results.push(Q3Match {
                        customer: values.clone(),
                        order: order.clone(),
                        lineitem: lineitem.values.clone(),
                    });
                }
            }
        } else {
            return Err(Fault::UnknownStreamAtUnit { stream, b_id: 0 });
        }
        Ok((results, cycles.max(1)))
    }

    /// Overflow occupancies in the reported order:
    /// [l_orderkey, o_orderkey, c_cust, o_cust].
    pub fn overflow_occupancy(&self) -> OverflowOccupancy {
        let (o_cust, o_orderkey) = match &self.orders {
            OrdersStage::Dual(w) => (w.occupancy_a(), w.occupancy_b()),
            OrdersStage::Direct { by_custkey, by_orderkey } => {
                (by_custkey.overflow_occupancy(), by_orderkey.overflow_occupancy())
            }
        };
        [self.lineitem.overflow_occupancy(), o_orderkey, self.customer.overflow_occupancy(), o_cust]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sid(v: u8) -> StreamId {
        StreamId::data(v).unwrap()
    }

    fn fields() -> Q3FieldMap {
        // lineitem: [l_orderkey, price, discount]
        // orders:   [o_orderkey, o_custkey, o_orderdate, o_shippriority]
        // customer: [c_custkey]
        Q3FieldMap {
            lineitem_stream: sid(2),
            orders_stream: sid(3),
            customer_stream: sid(4),
            l_orderkey: 0,
            o_orderkey: 0,
            o_custkey: 1,
            c_custkey: 0,
        }
    }

    fn core(variant: Q3Variant) -> Q3JoinCore {
        Q3JoinCore::new(variant, HbsjConfig::new(64, 32, 64), fields())
    }

    fn ingest(core: &mut Q3JoinCore, stream: u8, values: Vec<u64>) -> Vec<Q3Match> {
        core.ingest(sid(stream), values, &CmjCost::default()).unwrap().0
    }

    #[test]
    fn all_six_arrival_orders_yield_one_result() {
        for variant in [Q3Variant::Optimized, Q3Variant::Direct] {
            let lineitem = vec![5u64, 1000, 4];
            let order = vec![5u64, 9, 1200, 0];
            let customer = vec![9u64];
            let arrivals = [
                [(2, &lineitem), (3, &order), (4, &customer)],
                [(2, &lineitem), (4, &customer), (3, &order)],
                [(3, &order), (2, &lineitem), (4, &customer)],
                [(3, &order), (4, &customer), (2, &lineitem)],
                [(4, &customer), (2, &lineitem), (3, &order)],
                [(4, &customer), (3, &order), (2, &lineitem)],
            ];
            for order_case in arrivals {
                let mut c = core(variant);
                let mut total = Vec::new();
                for (s, v) in order_case {
                    total.extend(ingest(&mut c, s, v.clone()));
                }
                assert_eq!(total.len(), 1, "variant {variant:?} case {order_case:?}");
                assert_eq!(total[0].customer, customer);
                assert_eq!(total[0].order, order);
                assert_eq!(total[0].lineitem, lineitem);
            }
        }
    }

    #[test]
    fn lineitem_without_order_is_stored_silently() {
        let mut c = core(Q3Variant::Optimized);
        assert!(ingest(&mut c, 2, vec![5, 1000, 4]).is_empty());
        assert_eq!(c.lineitem.live_count(), 1);
    }

    #[test]
    fn order_matching_one_customer_and_three_lineitems() {
        let mut c = core(Q3Variant::Optimized);
        ingest(&mut c, 4, vec![9]);
        for i in 0..3 {
            ingest(&mut c, 2, vec![5, 1000 + i, 0]);
        }
        let out = ingest(&mut c, 3, vec![5, 9, 1200, 0]);
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn unknown_stream_is_a_fault() {
        let mut c = core(Q3Variant::Optimized);
        assert!(c.ingest(sid(6), vec![1], &CmjCost::default()).is_err());
    }
}
