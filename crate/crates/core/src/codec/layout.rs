// SPDX-License-Identifier: Apache-2.0

//! Bit layout of the four LSE encodings.
//!
//! Offsets count from the most significant bit of the 32-bit word, so the
//! first 20 bits (offsets 0..20) are the region ECMP hashing reads and that
//! transit nodes must leave alone.
//!
//! ```text
//!  0                   1                   2                   3
//!  0 1 2 3 4 5 6 7 8 9 0 1 2 3 4 5 6 7 8 9 0 1 2 3 4 5 6 7 8 9 0 1
//! +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
//! |                 Label                 |  TC |S|      TTL      |  MPLS / A
//! |   Opcode    |          Data           |IHS| NASL  | NAL |R|S|U|  B
//! |   Opcode    |         Data hi         |  Data lo  | NAL |S|r|  C
//! |              Data hi                |0|      Data lo      |S|  D
//! +-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+-+
//! ```
//!
//! The IANA registry has not fixed these offsets yet; everything that
//! depends on them reads this table, so a ratified layout replaces it here.

/// Bumped whenever any offset below changes.
pub const LAYOUT_VERSION: u32 = 1;

/// Bits at offsets below this boundary are hashed for ECMP.
pub const IMMUTABLE_PREFIX_BITS: u8 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    pub offset: u8,
    pub width: u8,
}

impl Field {
    pub const fn new(offset: u8, width: u8) -> Self {
        Field { offset, width }
    }

    #[inline]
    const fn shift(self) -> u32 {
        32 - self.offset as u32 - self.width as u32
    }

    #[inline]
    pub const fn max(self) -> u32 {
        if self.width == 32 {
            u32::MAX
        } else {
            (1u32 << self.width) - 1
        }
    }

    #[inline]
    pub const fn mask(self) -> u32 {
        self.max() << self.shift()
    }

    #[inline]
    pub const fn get(self, word: u32) -> u32 {
        (word >> self.shift()) & self.max()
    }

    /// Writes `value` (truncated to the field width) into `word`.
    #[inline]
    pub const fn set(self, word: u32, value: u32) -> u32 {
        (word & !self.mask()) | ((value & self.max()) << self.shift())
    }

    /// Number of this field's bits that lie outside the hashed prefix.
    pub const fn bits_past_prefix(self) -> u8 {
        let end = self.offset + self.width;
        if end <= IMMUTABLE_PREFIX_BITS {
            0
        } else if self.offset >= IMMUTABLE_PREFIX_BITS {
            self.width
        } else {
            end - IMMUTABLE_PREFIX_BITS
        }
    }
}

/// Plain MPLS LSE; also the NAS indicator (Format A).
pub mod mpls {
    use super::Field;
    pub const LABEL: Field = Field::new(0, 20);
    pub const TC: Field = Field::new(20, 3);
    pub const S: Field = Field::new(23, 1);
    pub const TTL: Field = Field::new(24, 8);
}

/// Initial opcode LSE.
pub mod format_b {
    use super::Field;
    pub const OPCODE: Field = Field::new(0, 7);
    pub const DATA: Field = Field::new(7, 13);
    pub const IHS: Field = Field::new(20, 2);
    pub const NASL: Field = Field::new(22, 4);
    pub const NAL: Field = Field::new(26, 3);
    pub const R: Field = Field::new(29, 1);
    pub const S: Field = Field::new(30, 1);
    pub const U: Field = Field::new(31, 1);
    pub const DATA_FIELDS: &[Field] = &[DATA];
}

/// Subsequent opcode LSE. The 20-bit data value is `hi << 7 | lo`.
pub mod format_c {
    use super::Field;
    pub const OPCODE: Field = Field::new(0, 7);
    pub const DATA_HI: Field = Field::new(7, 13);
    pub const DATA_LO: Field = Field::new(20, 7);
    pub const NAL: Field = Field::new(27, 3);
    pub const S: Field = Field::new(30, 1);
    pub const RESERVED: Field = Field::new(31, 1);
    pub const DATA_FIELDS: &[Field] = &[DATA_HI, DATA_LO];
}

/// Ancillary data LSE. The 30-bit data value is `hi << 11 | lo`.
pub mod format_d {
    use super::Field;
    pub const DATA_HI: Field = Field::new(0, 19);
    pub const DISC: Field = Field::new(19, 1);
    pub const DATA_LO: Field = Field::new(20, 11);
    pub const S: Field = Field::new(31, 1);
    pub const DATA_FIELDS: &[Field] = &[DATA_HI, DATA_LO];
}

pub const fn data_bits(fields: &[Field]) -> u32 {
    let mut total = 0;
    let mut i = 0;
    while i < fields.len() {
        total += fields[i].width as u32;
        i += 1;
    }
    total
}

pub const fn mutable_data_bits(fields: &[Field]) -> u32 {
    let mut total = 0;
    let mut i = 0;
    while i < fields.len() {
        total += fields[i].bits_past_prefix() as u32;
        i += 1;
    }
    total
}
