// SPDX-License-Identifier: Apache-2.0
#![no_main]

use libfuzzer_sys::fuzz_target;
use mna_core::codec::{parse_hex, to_hex};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(bytes) = parse_hex(text) {
        assert_eq!(parse_hex(&to_hex(&bytes)).unwrap(), bytes);
    }
});
