// SPDX-License-Identifier: Apache-2.0

//! Mutable-bit accounting for in-stack data.
//!
//! A bit is mutable when it belongs to a data field and lies past the first
//! 20 bits of its LSE. With the layout in [`super::layout`] that gives
//! B:0, C:7 and D:11 mutable bits, and B:13, C:20, D:30 data bits.
//!
//! The largest-mutable NAS (B, 7×D, C, 7×D) has 13 + 20 + 14·30 = 453 data
//! bits. Published accounts of that NAS quote 424 data bits, which no layout
//! with these per-format widths produces; this report returns 453. The total
//! size (544 bits) and mutable count (161) agree with the published values.

use serde::{Deserialize, Serialize};

use super::layout::{self, format_b, format_c, format_d};
use super::types::{Nas, NasLse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutableBitReport {
    pub total_bits: u32,
    pub data_bits: u32,
    pub mutable_bits: u32,
}

const B_DATA: u32 = layout::data_bits(format_b::DATA_FIELDS);
const C_DATA: u32 = layout::data_bits(format_c::DATA_FIELDS);
const D_DATA: u32 = layout::data_bits(format_d::DATA_FIELDS);
const B_MUTABLE: u32 = layout::mutable_data_bits(format_b::DATA_FIELDS);
const C_MUTABLE: u32 = layout::mutable_data_bits(format_c::DATA_FIELDS);
const D_MUTABLE: u32 = layout::mutable_data_bits(format_d::DATA_FIELDS);

pub fn mutable_bit_report(nas: &Nas) -> MutableBitReport {
    let (data, mutable) = nas.rest.iter().fold((B_DATA, B_MUTABLE), |(d, m), l| match l {
        NasLse::C(_) => (d + C_DATA, m + C_MUTABLE),
        NasLse::D(_) => (d + D_DATA, m + D_MUTABLE),
    });
    MutableBitReport {
        total_bits: 32 * nas.lse_count() as u32,
        data_bits: data,
        mutable_bits: mutable,
    }
}

/// Word mask of the mutable data bits of an ancillary-data LSE.
pub const fn format_d_mutable_mask() -> u32 {
    format_d::DATA_LO.mask()
}

/// Word mask of the mutable data bits of a subsequent-opcode LSE.
pub const fn format_c_mutable_mask() -> u32 {
    format_c::DATA_LO.mask()
}
