// SPDX-License-Identifier: Apache-2.0
#![no_main]

use libfuzzer_sys::fuzz_target;
use mna_core::codec::{decode_stack, UNLIMITED_RLD};
use mna_core::format::build_stack;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(bytes) = build_stack(text) {
        decode_stack(&bytes, UNLIMITED_RLD).expect("built stacks decode");
    }
});
