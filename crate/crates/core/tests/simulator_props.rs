// SPDX-License-Identifier: Apache-2.0

use mna_core::format::parse_scenario;
use mna_core::simulator::{expected_e2e_drop, run_scenario};
use proptest::prelude::*;

fn line_scenario(probs: &[f64], seed: u64, packets: u64, period: u64) -> String {
    let mut s = format!("[scenario]\nseed = {seed}\nticks = {packets}\n[nodes]\n");
    for (i, p) in probs.iter().enumerate() {
        s += &format!("R{} drop={p}\n", i + 1);
    }
    s += "[links]\n";
    for i in 1..probs.len() {
        s += &format!("R{}-R{}\n", i, i + 1);
    }
    s += "[paths]\np =";
    for i in 0..probs.len() {
        s += &format!(" R{}:{}", i + 1, 100 + i);
    }
    s += &format!(
        "\n[nas]\nm hbh amm\n[streams]\nm path=p rate=1 count={packets} flow=5 color_packets={period}\n"
    );
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn collector_equals_drop_ledger(
        probs in proptest::collection::vec(0.0f64..0.6, 1..5),
        seed: u64,
        packets in 1u64..3000,
        period in 1u64..500,
    ) {
        let sc = parse_scenario(&line_scenario(&probs, seed, packets, period)).unwrap();
        let r = run_scenario(&sc).unwrap();
        let s = &r.streams["m"];
        prop_assert_eq!(s.sent, packets);
        prop_assert_eq!(s.sent, s.received + s.dropped());
        let links = s.link_loss.as_ref().unwrap();
        prop_assert_eq!(links.len(), probs.len());
        for (k, l) in links.iter().enumerate() {
            prop_assert_eq!(l.delta, s.segment_drops[k] as i64);
        }
        prop_assert_eq!(s.segment_drops.iter().sum::<u64>(), s.dropped());
        prop_assert_eq!(r.immutable_violations, 0);
    }

    #[test]
    fn reserved_streams_within_capacity_are_lossless(
        shares in proptest::collection::vec(1u64..40, 1..4),
        noise in 1u64..200,
        seed: u64,
    ) {
        let cap: u64 = shares.iter().sum::<u64>() + 5;
        let mut text = format!(
            "[scenario]\nseed = {seed}\nticks = 300\nnrp_enforce = on\n[nodes]\nA\nB\n[links]\nA-B capacity={cap}\n[paths]\nn = A:900 B:901\n"
        );
        for i in 0..shares.len() {
            text += &format!("p{i} = A:{} B:{}\n", 100 + i, 200 + i);
        }
        text += "[nas]\n";
        for i in 0..shares.len() {
            text += &format!("s{i} hbh nrp {}\n", i + 1);
        }
        text += "[nrp]\nA default rate=0 burst=0\n";
        for (i, r) in shares.iter().enumerate() {
            text += &format!("A sel={} rate={r} burst={r}\n", i + 1);
        }
        text += "[streams]\n";
        for (i, r) in shares.iter().enumerate() {
            text += &format!("s{i} path=p{i} rate={r} size=1\n");
        }
        text += &format!("noise path=n rate={noise} size=1\n");
        let sc = parse_scenario(&text).unwrap();
        let r = run_scenario(&sc).unwrap();
        for i in 0..shares.len() {
            let s = &r.streams[&format!("s{i}")];
            prop_assert_eq!(s.dropped(), 0);
        }
        prop_assert_eq!(r.streams["noise"].received, 0);

        // Same offered load with enforcement off and 2x overload hurts everyone.
        let mut off = sc.clone();
        off.options.nrp_enforce = false;
        for s in off.streams.iter_mut().filter(|s| s.name == "noise") {
            s.rate = (cap + shares.iter().sum::<u64>()) as f64;
        }
        let r = run_scenario(&off).unwrap();
        for s in r.streams.values() {
            prop_assert!(s.dropped() > 0);
        }
    }

    #[test]
    fn eq1_is_a_probability(probs in proptest::collection::vec(0.0f64..=1.0, 0..8)) {
        let p = expected_e2e_drop(&probs).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let max = probs.iter().cloned().fold(0.0, f64::max);
        prop_assert!(p + 1e-12 >= max);
    }
}

#[test]
fn same_seed_same_report() {
    let sc = parse_scenario(&line_scenario(&[0.1, 0.2, 0.3], 11, 20_000, 2_000)).unwrap();
    let a = run_scenario(&sc).unwrap().to_json();
    assert_eq!(a, run_scenario(&sc).unwrap().to_json());
}
