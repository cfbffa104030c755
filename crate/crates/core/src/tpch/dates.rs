//! Date arithmetic: dates travel the fabric as day numbers relative to
//! 1992-01-01 (16 bits cover the benchmark's 1992-1998 range).

/// Days from the civil epoch 1970-01-01 (proleptic Gregorian).
fn days_from_civil(y: i64, m: u32, d: u32) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = (m as i64 + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

const EPOCH_1992: i64 = 8035; // days_from_civil(1992, 1, 1)

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid date {0:?}")]
pub struct DateError(pub String);

/// Parses `YYYY-MM-DD` into a day number since 1992-01-01.
pub fn day_number(date: &str) -> Result<u16, DateError> {
    let mut parts = date.split('-');
    let err = || DateError(date.to_string());
    let y: i64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(err)?;
    let m: u32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(err)?;
    let d: u32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(err)?;
    if parts.next().is_some() || !(1..=12).contains(&m) || !(1..=31).contains(&d) {
        return Err(err());
    }
    let days = days_from_civil(y, m, d) - EPOCH_1992;
    if !(0..=u16::MAX as i64).contains(&days) {
        return Err(err());
    }
    Ok(days as u16)
}

/// Formats a day number back into `YYYY-MM-DD`.
pub fn day_to_date(day: u16) -> String {
    // invert days_from_civil
    let z = day as i64 + EPOCH_1992 + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = if m <= 2 { y + 1 } else { y };
    format!("{y:04}-{m:02}-{d:02}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_is_zero() {
        assert_eq!(day_number("1992-01-01").unwrap(), 0);
    }

    #[test]
    fn known_anchors() {
        assert_eq!(day_number("1992-01-02").unwrap(), 1);
        assert_eq!(day_number("1993-01-01").unwrap(), 366); // 1992 is a leap year
        assert_eq!(day_number("1995-03-15").unwrap(), 1169);
        assert_eq!(day_number("1998-09-02").unwrap(), 2436);
    }

    #[test]
    fn round_trip() {
        for day in [0u16, 1, 365, 366, 1169, 2436, 2555] {
            assert_eq!(day_number(&day_to_date(day)).unwrap(), day);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(day_number("1992-13-01").is_err());
        assert!(day_number("not-a-date").is_err());
        assert!(day_number("1991-12-31").is_err()); // before the epoch
    }
}
