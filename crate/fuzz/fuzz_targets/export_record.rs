// SPDX-License-Identifier: Apache-2.0
#![no_main]

use libfuzzer_sys::fuzz_target;
use mna_core::actions::ExportRecord;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(r) = text.parse::<ExportRecord>() {
        assert_eq!(r.to_string().parse::<ExportRecord>().unwrap(), r);
    }
});
