// SPDX-License-Identifier: Apache-2.0

//! Bit-exact codec for MPLS label stacks carrying Network Action Sub-stacks.
//!
//! Words are classified top-down. A word whose label equals the NAS
//! indicator opens a NAS; the next word is the initial opcode (Format B) and
//! its NASL says how many words follow. Those are split into subsequent
//! opcodes (Format C) and ancillary data (Format D) purely by NAL chaining:
//! the NAL-many words after an opcode are data, the next one is an opcode.

mod bits;
mod dissect;
mod error;
pub mod layout;
mod types;
mod wire;

pub use bits::{format_c_mutable_mask, format_d_mutable_mask, mutable_bit_report, MutableBitReport};
pub use dissect::{dissect_text, dissect_with};
pub use error::{CodecError, MalformedReason, Violation};
pub use types::*;
pub use wire::{
    bytes_to_words, decode_stack, encode_stack, words_to_bytes, Codec, ParsedStack, Span, SpanKind,
    UNLIMITED_RLD,
};

/// Parses whitespace-insensitive hex text.
pub fn parse_hex(text: &str) -> Result<Vec<u8>, hex::FromHexError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let compact = compact
        .strip_prefix("0x")
        .or_else(|| compact.strip_prefix("0X"))
        .unwrap_or(&compact);
    hex::decode(compact)
}

pub fn to_hex(bytes: &[u8]) -> String {
    hex::encode(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_whitespace_insensitive() {
        assert_eq!(parse_hex("00 06 41\n40").unwrap(), [0, 6, 0x41, 0x40]);
        assert_eq!(parse_hex("0xDEADbeef").unwrap(), [0xde, 0xad, 0xbe, 0xef]);
        assert!(parse_hex("zz").is_err());
        assert!(parse_hex("abc").is_err());
        assert_eq!(to_hex(&[0xde, 0xad]), "dead");
    }
}
