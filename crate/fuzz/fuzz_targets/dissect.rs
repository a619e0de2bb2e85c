// SPDX-License-Identifier: Apache-2.0
#![no_main]

use libfuzzer_sys::fuzz_target;
use mna_core::codec::dissect_text;

fuzz_target!(|data: &[u8]| {
    let Some((&rld, bytes)) = data.split_first() else {
        return;
    };
    let rld = (rld != 0).then_some(rld as usize);
    let _ = dissect_text(bytes, rld);
});
