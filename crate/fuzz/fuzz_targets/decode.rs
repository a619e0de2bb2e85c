// SPDX-License-Identifier: Apache-2.0
#![no_main]

use libfuzzer_sys::fuzz_target;
use mna_core::codec::{bytes_to_words, encode_stack, Codec, UNLIMITED_RLD};

fuzz_target!(|data: &[u8]| {
    let Some((&rld, bytes)) = data.split_first() else {
        return;
    };
    let Ok(words) = bytes_to_words(bytes) else {
        return;
    };
    let _ = Codec::lenient().decode_words(&words, rld as usize);
    let _ = Codec::default().spans(&words);
    // Whatever strict decoding accepts must re-encode to the same bytes.
    if let Ok(p) = Codec::default().decode_words(&words, UNLIMITED_RLD) {
        assert_eq!(encode_stack(&p.into_stack()).unwrap(), bytes);
    }
});
