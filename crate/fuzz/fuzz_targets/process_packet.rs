// SPDX-License-Identifier: Apache-2.0
#![no_main]

use libfuzzer_sys::fuzz_target;
use mna_core::codec::bytes_to_words;
use mna_core::composer::NodeCapabilities;
use mna_core::engine::{NodeState, Packet, Route};

fuzz_target!(|data: &[u8]| {
    let Some((&rld, bytes)) = data.split_first() else {
        return;
    };
    let Ok(words) = bytes_to_words(bytes) else {
        return;
    };
    let mut node = NodeState::new(NodeCapabilities::new("R1", rld as usize), 0, 1);
    for label in 16..32 {
        let route = match label % 4 {
            0 => Route::PopAndForward { next_hop: "R2".into(), php: label % 8 == 0 },
            1 => Route::PopAndLookup,
            2 => Route::Swap { label: label + 1, next_hop: "R2".into() },
            _ => Route::Deliver,
        };
        node.table.insert(label, route).unwrap();
    }
    let mut pkt = Packet::from_words(words, 1, 0);
    let d = node.process_packet(&mut pkt, 0);
    assert!(d.immutable_ok);
});
