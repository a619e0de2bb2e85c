// SPDX-License-Identifier: Apache-2.0
#![no_main]

use libfuzzer_sys::fuzz_target;
use mna_core::format::parse_scenario;
use mna_core::simulator::run_scenario;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(mut sc) = parse_scenario(text) else {
        return;
    };
    // Bound the run so the fuzzer explores parsing and setup, not long simulations.
    sc.ticks = sc.ticks.min(50);
    for s in &mut sc.streams {
        s.rate = s.rate.min(20.0);
    }
    if let Ok(r) = run_scenario(&sc) {
        assert_eq!(r.immutable_violations, 0);
        for s in r.streams.values() {
            assert_eq!(s.sent, s.received + s.dropped());
        }
    }
});
