//! Parallel-to-serial and serial-to-parallel network interfaces.
//!
//! A 64-bit word can cross a narrower link by being split into `lanes`-bit
//! transfers, msb-first; the transfer then takes `64 / lanes` cycles in the
//! cost model. The lane count must divide the word width.

pub const WORD_BITS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum NiError {
    #[error("lane count {0} does not divide the word width 64")]
    NonDivisibleLanes(u32),
}

fn check(lanes: u32) -> Result<(), NiError> {
    if lanes == 0 || lanes > WORD_BITS || WORD_BITS % lanes != 0 {
        return Err(NiError::NonDivisibleLanes(lanes));
    }
    Ok(())
}

/// Splits a word into `64 / lanes` lane-sized transfers, msb-first.
pub fn serialize(word: u64, lanes: u32) -> Result<Vec<u64>, NiError> {
    check(lanes)?;
    let transfers = WORD_BITS / lanes;
    let mask = if lanes == 64 { u64::MAX } else { (1u64 << lanes) - 1 };
    Ok((0..transfers)
        .map(|i| (word >> (WORD_BITS - lanes * (i + 1))) & mask)
        .collect())
}

/// Reassembles the transfers produced by [`serialize`].
pub fn deserialize(transfers: &[u64], lanes: u32) -> Result<u64, NiError> {
    check(lanes)?;
    let mut word = 0u64;
    for &t in transfers {
        word = if lanes == 64 { t } else { (word << lanes) | t };
    }
    Ok(word)
}

/// Cycles one word transfer takes at the given lane count.
pub fn transfer_cycles(lanes: u32) -> Result<u64, NiError> {
    check(lanes)?;
    Ok((WORD_BITS / lanes) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_parallel_is_identity() {
        let w = 0x0123_4567_89ab_cdef;
        assert_eq!(serialize(w, 64).unwrap(), vec![w]);
        assert_eq!(transfer_cycles(64).unwrap(), 1);
        assert_eq!(deserialize(&[w], 64).unwrap(), w);
    }

    #[test]
    fn eight_lanes_take_eight_transfers() {
        let w = 0x0123_4567_89ab_cdef;
        let t = serialize(w, 8).unwrap();
        assert_eq!(t.len(), 8);
        assert_eq!(t[0], 0x01); // msb-first
        assert_eq!(transfer_cycles(8).unwrap(), 8);
        assert_eq!(deserialize(&t, 8).unwrap(), w);
    }

    #[test]
    fn non_divisible_lane_count_rejected() {
        assert!(serialize(0, 3).is_err());
        assert!(serialize(0, 0).is_err());
        assert!(serialize(0, 128).is_err());
    }
}
