//! Fixed-point revenue arithmetic shared by the engine and the oracle.
//!
//! Prices are integer cents, discounts integer hundredths. Revenue is kept
//! in units of 10^-4 dollars so that `price * (1 - discount)` stays exact:
//! cents times hundredths is micro-dollars-times-100, i.e. 10^-4 dollars.

use serde::{Deserialize, Serialize};

/// Revenue in 10^-4 dollar units.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct RevenueMicro(pub u64);

impl RevenueMicro {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl std::ops::Add for RevenueMicro {
    type Output = RevenueMicro;
    fn add(self, rhs: RevenueMicro) -> RevenueMicro {
        RevenueMicro(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for RevenueMicro {
    fn add_assign(&mut self, rhs: RevenueMicro) {
        self.0 += rhs.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MoneyError {
    #[error("discount {0} exceeds 100 hundredths")]
    DiscountRange(u64),
    #[error("revenue overflows 64 bits for price {0}")]
    Overflow(u64),
}

/// `price_cents * (100 - discount_hundredths)`, exact integer arithmetic.
pub fn compute_revenue(price_cents: u64, discount_hundredths: u64) -> Result<RevenueMicro, MoneyError> {
    if discount_hundredths > 100 {
        return Err(MoneyError::DiscountRange(discount_hundredths));
    }
    price_cents
        .checked_mul(100 - discount_hundredths)
        .map(RevenueMicro)
        .ok_or(MoneyError::Overflow(price_cents))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_discount_identity() {
        // $100.00 at full price -> 1_000_000 ten-thousandths
        assert_eq!(compute_revenue(10_000, 0).unwrap().value(), 1_000_000);
    }

    #[test]
    fn full_discount_is_zero() {
        assert_eq!(compute_revenue(10_000, 100).unwrap().value(), 0);
    }

    #[test]
    fn arbitrary_product() {
        // 12345 * 93, checked independently with big-integer arithmetic.
        assert_eq!(compute_revenue(12_345, 7).unwrap().value(), 1_148_085);
    }

    #[test]
    fn discount_over_100_rejected() {
        assert!(matches!(compute_revenue(1, 101), Err(MoneyError::DiscountRange(101))));
    }

    #[test]
    fn no_overflow_for_32_bit_prices() {
        let max_price = u32::MAX as u64;
        assert_eq!(compute_revenue(max_price, 0).unwrap().value(), max_price * 100);
    }
}
