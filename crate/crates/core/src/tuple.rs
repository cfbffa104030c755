//! Tuple layouts and the bit-exact tuple <-> segment codec.
//!
//! A layout is an ordered list of (name, bit-width) fields. Encoding packs
//! field values most-significant-first into a bitstream, splits the stream
//! into 61-bit payloads and zero-pads the tail. The first segment carries the
//! tuple's stream id, the rest the NULL continuation tag.
//!
//! Field widths for the bundled TPC-H streams: keys 32 bits, dates 16 bits
//! (days since 1992-01-01), money 32 bits (integer cents), discounts 8 bits
//! (integer hundredths), enumerations and priorities 8 bits. Aggregate sums
//! use 32 or 48 bits. Widths are sized for scale factors up to roughly 10.

use crate::wire::{Segment, StreamId, PAYLOAD_BITS};
use serde::{Deserialize, Serialize};

/// One named field and its width in bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub name: String,
    pub bits: u8,
}

/// An ordered list of fields; fixed per stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleLayout {
    fields: Vec<FieldSpec>,
    total_bits: u32,
}

impl TupleLayout {
    /// Builds a layout from `(name, bits)` pairs. Widths must be 1..=61 and
    /// at least one field is required (the END tuple uses a 1-bit marker).
    pub fn new<I, S>(fields: I) -> Result<TupleLayout, CodecError>
    where
        I: IntoIterator<Item = (S, u8)>,
        S: Into<String>,
    {
        let fields: Vec<FieldSpec> = fields
            .into_iter()
            .map(|(name, bits)| FieldSpec { name: name.into(), bits })
            .collect();
        if fields.is_empty() {
            return Err(CodecError::EmptyLayout);
        }
        for f in &fields {
            if f.bits == 0 || f.bits as u32 > PAYLOAD_BITS {
                return Err(CodecError::BadFieldWidth { field: f.name.clone(), bits: f.bits });
            }
        }
        let total_bits = fields.iter().map(|f| f.bits as u32).sum();
        Ok(TupleLayout { fields, total_bits })
    }

    pub fn fields(&self) -> &[FieldSpec] {
        &self.fields
    }

    pub fn total_bits(&self) -> u32 {
        self.total_bits
    }

    /// Number of segments a tuple of this layout occupies: ceil(total/61).
    pub fn segment_count(&self) -> usize {
        self.total_bits.div_ceil(PAYLOAD_BITS) as usize
    }

    /// Index of a field by name.
    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }
}

/// A decoded tuple: a stream id plus one value per layout field, in layout
/// order. Values are unsigned and must fit their field widths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tuple {
    pub stream: StreamId,
    pub values: Vec<u64>,
}

impl Tuple {
    pub fn new(stream: StreamId, values: Vec<u64>) -> Tuple {
        Tuple { stream, values }
    }

    /// Looks up a field value by name through the layout.
    pub fn field(&self, layout: &TupleLayout, name: &str) -> Option<u64> {
        layout.field_index(name).and_then(|i| self.values.get(i).copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("layout has no fields")]
    EmptyLayout,
    #[error("field {field} has invalid width {bits} (must be 1..=61)")]
    BadFieldWidth { field: String, bits: u8 },
    #[error("value {value} exceeds the {bits}-bit width of field {field}")]
    ValueTooWide { field: String, bits: u8, value: u64 },
    #[error("tuple has {got} values but the layout has {want} fields")]
    ArityMismatch { got: usize, want: usize },
    #[error("expected {want} segments, got {got}")]
    SegmentCountMismatch { want: usize, got: usize },
    #[error("unexpected stream tag {got} on continuation segment {index}")]
    UnexpectedStreamTag { index: usize, got: u8 },
    #[error("first segment is a NULL continuation")]
    LeadingNull,
    #[error("first segment tag {0} is not a data stream")]
    NotDataStream(u8),
}

/// Writes `width` low bits of `value` into the payload array at bit offset
/// `pos` (bit 0 is the msb of the first payload).
pub(crate) fn put_bits(payloads: &mut [u64], mut pos: u32, width: u8, value: u64) {
    let mut remaining = width as u32;
    while remaining > 0 {
        let seg = (pos / PAYLOAD_BITS) as usize;
        let offset = pos % PAYLOAD_BITS;
        let take = remaining.min(PAYLOAD_BITS - offset);
        let chunk = (value >> (remaining - take)) & mask(take);
        payloads[seg] |= chunk << (PAYLOAD_BITS - offset - take);
        pos += take;
        remaining -= take;
    }
}

/// Reads `width` bits starting at bit offset `pos` from the payload array.
pub(crate) fn get_bits(payloads: &[u64], mut pos: u32, width: u8) -> u64 {
    let mut remaining = width as u32;
    let mut value = 0u64;
    while remaining > 0 {
        let seg = (pos / PAYLOAD_BITS) as usize;
        let offset = pos % PAYLOAD_BITS;
        let take = remaining.min(PAYLOAD_BITS - offset);
        let chunk = (payloads[seg] >> (PAYLOAD_BITS - offset - take)) & mask(take);
        value = (value << take) | chunk;
        pos += take;
        remaining -= take;
    }
    value
}

fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Encodes a tuple into its segment sequence: first segment tagged with the
/// stream id, continuations tagged NULL, padding bits zero.
pub fn encode_tuple(tuple: &Tuple, layout: &TupleLayout) -> Result<Vec<Segment>, CodecError> {
    if tuple.values.len() != layout.fields().len() {
        return Err(CodecError::ArityMismatch {
            got: tuple.values.len(),
            want: layout.fields().len(),
        });
    }
    let mut payloads = vec![0u64; layout.segment_count()];
    let mut pos = 0u32;
    for (field, &value) in layout.fields().iter().zip(&tuple.values) {
        if field.bits < 64 && value >= 1u64 << field.bits {
            return Err(CodecError::ValueTooWide {
                field: field.name.clone(),
                bits: field.bits,
                value,
            });
        }
        put_bits(&mut payloads, pos, field.bits, value);
        pos += field.bits as u32;
    }
    Ok(payloads
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if i == 0 {
                Segment::tagged(tuple.stream, p)
            } else {
                Segment::null(p)
            }
        })
        .collect())
}

/// Decodes a segment sequence back into a tuple; exact inverse of
/// [`encode_tuple`] for every valid tuple.
pub fn decode_tuple(segments: &[Segment], layout: &TupleLayout) -> Result<Tuple, CodecError> {
    let want = layout.segment_count();
    if segments.len() != want {
        return Err(CodecError::SegmentCountMismatch { want, got: segments.len() });
    }
    let first = segments[0];
    let stream = match first.stream() {
        None => return Err(CodecError::LeadingNull),
        Some(s) if !s.is_data() => return Err(CodecError::NotDataStream(s.value())),
        Some(s) => s,
    };
    for (i, seg) in segments.iter().enumerate().skip(1) {
        if !seg.is_null_continuation() {
            return Err(CodecError::UnexpectedStreamTag { index: i, got: seg.tag() });
        }
    }
    let payloads: Vec<u64> = segments.iter().map(|s| s.payload()).collect();
    let mut pos = 0u32;
    let mut values = Vec::with_capacity(layout.fields().len());
    for field in layout.fields() {
        values.push(get_bits(&payloads, pos, field.bits));
        pos += field.bits as u32;
    }
    Ok(Tuple { stream, values })
}

/// Decodes only the values of a payload bitstream (used by units that have
/// already stripped tags during assembly).
pub fn decode_payloads(payloads: &[u64], layout: &TupleLayout) -> Vec<u64> {
    let mut pos = 0u32;
    let mut values = Vec::with_capacity(layout.fields().len());
    for field in layout.fields() {
        values.push(get_bits(payloads, pos, field.bits));
        pos += field.bits as u32;
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(v: u8) -> StreamId {
        StreamId::data(v).unwrap()
    }

    #[test]
    fn single_field_left_aligned() {
        // 32-bit single-field tuple -> 1 segment, payload = value << 29.
        let layout = TupleLayout::new([("key", 32u8)]).unwrap();
        let t = Tuple::new(stream(2), vec![0xDEAD_BEEF]);
        let segs = encode_tuple(&t, &layout).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].payload(), 0xDEAD_BEEFu64 << 29);
        assert_eq!(segs[0].stream(), Some(stream(2)));
    }

    #[test]
    fn two_segment_split() {
        // 122-bit layout -> exactly 2 segments, second tagged NULL.
        let layout = TupleLayout::new([("a", 61u8), ("b", 61u8)]).unwrap();
        let t = Tuple::new(stream(3), vec![1, 2]);
        let segs = encode_tuple(&t, &layout).unwrap();
        assert_eq!(segs.len(), 2);
        assert!(segs[1].is_null_continuation());
        assert_eq!(decode_tuple(&segs, &layout).unwrap(), t);
    }

    #[test]
    fn q3_lineitem_layout_is_two_segments() {
        // orderkey 32 + shipdate 16 + price 32 + discount 8 = 88 bits.
        let layout = TupleLayout::new([
            ("l_orderkey", 32u8),
            ("l_shipdate", 16),
            ("l_extendedprice", 32),
            ("l_discount", 8),
        ])
        .unwrap();
        assert_eq!(layout.total_bits(), 88);
        assert_eq!(layout.segment_count(), 2); // ceil(88/61)
        let t = Tuple::new(stream(2), vec![152, 1170, 3608534, 4]);
        let segs = encode_tuple(&t, &layout).unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(decode_tuple(&segs, &layout).unwrap(), t);
    }

    #[test]
    fn value_too_wide_names_field() {
        let layout = TupleLayout::new([("d", 8u8)]).unwrap();
        let t = Tuple::new(stream(2), vec![256]);
        match encode_tuple(&t, &layout) {
            Err(CodecError::ValueTooWide { field, .. }) => assert_eq!(field, "d"),
            other => panic!("expected ValueTooWide, got {other:?}"),
        }
    }

    #[test]
    fn continuation_with_stream_tag_is_rejected() {
        let layout = TupleLayout::new([("a", 61u8), ("b", 61u8)]).unwrap();
        let t = Tuple::new(stream(2), vec![7, 9]);
        let mut segs = encode_tuple(&t, &layout).unwrap();
        segs[1] = Segment::tagged(stream(3), segs[1].payload());
        match decode_tuple(&segs, &layout) {
            Err(CodecError::UnexpectedStreamTag { index: 1, got: 3 }) => {}
            other => panic!("expected UnexpectedStreamTag, got {other:?}"),
        }
    }

    #[test]
    fn wrong_segment_count_is_rejected() {
        let layout = TupleLayout::new([("a", 61u8), ("b", 61u8)]).unwrap();
        let t = Tuple::new(stream(2), vec![7, 9]);
        let segs = encode_tuple(&t, &layout).unwrap();
        assert!(matches!(
            decode_tuple(&segs[..1], &layout),
            Err(CodecError::SegmentCountMismatch { want: 2, got: 1 })
        ));
    }

    #[test]
    fn segment_count_law() {
        for total in [1u32, 60, 61, 62, 88, 120, 122, 176, 244] {
            // Decompose the width into chunks of at most 61 bits.
            let mut fields = Vec::new();
            let mut left = total;
            let mut i = 0;
            while left > 0 {
                let bits = left.min(61) as u8;
                fields.push((format!("f{i}"), bits));
                left -= bits as u32;
                i += 1;
            }
            let layout = TupleLayout::new(fields).unwrap();
            let t = Tuple::new(stream(2), vec![0; layout.fields().len()]);
            let segs = encode_tuple(&t, &layout).unwrap();
            assert_eq!(segs.len() as u32, total.div_ceil(61));
        }
    }
}
