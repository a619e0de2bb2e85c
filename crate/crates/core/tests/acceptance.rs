// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mna_core::actions::opcode;
use mna_core::codec::{decode_stack, encode_stack, mutable_bit_report, FormatB, Nas, Scope, UNLIMITED_RLD};
use mna_core::composer::{
    compose_stack, compose_stack_with, in_between_capacity, validate_stack_with, ActionSpec,
    ComposeError, DepthCounting, IssueKind, NasRequest, RequestScope,
};
use mna_core::engine::DropCause;
use mna_core::format::parse_scenario;
use mna_core::simulator::{collector_link_loss, expected_e2e_drop, run_scenario, Scenario, SimReport};
use mna_core::NodeId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ROUNDTRIP_STACKS: usize = 10_000;
const ROUNDTRIP_LIMIT: Duration = Duration::from_secs(5);
const E5_SEEDS: u64 = 10;
const E5_PACKETS: u64 = 1_000_000;
const E5_EXPECTED: f64 = 0.496;
const E5_TOLERANCE: f64 = 0.005;
const E5_LIMIT: Duration = Duration::from_secs(60);
const REF_COUNTERS: [u64; 4] = [1913168832, 1721832612, 1377440738, 964199933];
const REF_DELTAS: [i64; 3] = [191336220, 344391874, 413240805];
const REF_RATES: [&str; 3] = ["0.1000", "0.2000", "0.3000"];
const E6_PROBS: [f64; 3] = [0.1, 0.2, 0.3];
const E6_PACKETS: u64 = 1_000_000;
const E6_TOLERANCE: f64 = 0.01;
const E6_LIMIT: Duration = Duration::from_secs(60);
const E7_MIN_LOSS_UNENFORCED: f64 = 0.3;
const PLACEMENT_LIMIT: Duration = Duration::from_secs(10);
const NFFRR_TTL: u32 = 64;
const NFFRR_MAX_HOPS: u32 = 6;
const MAX_NAS_TOTAL: u32 = 544;
const MAX_NAS_MUTABLE: u32 = 161;
const MAX_NAS_DATA: u32 = 453;
const MAX_NAS_DATA_QUOTED: u32 = 424;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn scenario(name: &str) -> Scenario {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name]
        .iter()
        .collect();
    let text = std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    parse_scenario(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_codec_roundtrip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let start = Instant::now();
    let mut failures = 0;
    for _ in 0..ROUNDTRIP_STACKS {
        let s = common::random_stack(&mut rng);
        let ok = encode_stack(&s)
            .ok()
            .and_then(|b| decode_stack(&b, UNLIMITED_RLD).ok())
            .is_some_and(|p| p.into_stack() == s);
        failures += !ok as usize;
    }
    let t = start.elapsed();
    ensure(failures == 0, || format!("{failures} of {ROUNDTRIP_STACKS} stacks failed"))?;
    ensure(t < ROUNDTRIP_LIMIT, || format!("took {t:.2?}"))?;
    Ok(format!("{ROUNDTRIP_STACKS} stacks, 0 failures, {t:.2?}"))
}

fn c2_expected_drop_and_e5() -> Outcome {
    let exact = expected_e2e_drop(&[0.1, 0.2, 0.3]).map_err(|e| e.to_string())?;
    ensure(exact == E5_EXPECTED, || format!("expected drop gave {exact}"))?;
    let base = scenario("e5.scenario");
    let start = Instant::now();
    let mut sum = 0.0;
    for seed in 1..=E5_SEEDS {
        let mut sc = base.clone();
        sc.seed = seed;
        let r = run_scenario(&sc).map_err(|e| e.to_string())?;
        ensure(r.total_sent() == E5_PACKETS, || format!("seed {seed}: sent {}", r.total_sent()))?;
        sum += r.streams["lossy"].loss;
    }
    let t = start.elapsed();
    let mean = sum / E5_SEEDS as f64;
    ensure((mean - E5_EXPECTED).abs() <= E5_TOLERANCE, || {
        format!("mean loss {mean:.5} outside {E5_EXPECTED} +- {E5_TOLERANCE}")
    })?;
    ensure(t < E5_LIMIT, || format!("took {t:.2?}"))?;
    Ok(format!(
        "expected drop = {exact}; E5 mean loss {mean:.5} over {E5_SEEDS} seeds x {E5_PACKETS} packets, {t:.2?}"
    ))
}

fn c3_collector() -> Outcome {
    let l = collector_link_loss(&["generator", "R1", "R2", "R3"], &REF_COUNTERS);
    let deltas: Vec<i64> = l.iter().map(|x| x.delta).collect();
    let rates: Vec<String> = l.iter().map(|x| format!("{:.4}", x.rate)).collect();
    ensure(deltas == REF_DELTAS, || format!("deltas {deltas:?}"))?;
    ensure(rates == REF_RATES, || format!("rates {rates:?}"))?;
    Ok(format!("deltas {deltas:?}, rates {rates:?}"))
}

fn c4_e6() -> Outcome {
    let sc = scenario("e6.scenario");
    let start = Instant::now();
    let r = run_scenario(&sc).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let s = &r.streams["measured"];
    ensure(s.sent == E6_PACKETS, || format!("sent {}", s.sent))?;
    let stream = &sc.streams[0];
    let periods = match stream.color {
        Some(mna_core::simulator::ColorSchedule::Ticks(p)) => sc.ticks / p,
        _ => 0,
    };
    ensure(periods == 10, || format!("{periods} color periods"))?;
    let links = s.link_loss.as_ref().ok_or("no collector result")?;
    let mut rates = Vec::new();
    for (k, (l, want)) in links.iter().zip(E6_PROBS).enumerate() {
        ensure((l.rate - want).abs() <= E6_TOLERANCE, || {
            format!("link {} -> {}: rate {:.4}, configured {want}", l.from, l.to, l.rate)
        })?;
        ensure(l.delta == s.segment_drops[k] as i64, || {
            format!("link {} -> {}: collector {} vs ledger {}", l.from, l.to, l.delta, s.segment_drops[k])
        })?;
        rates.push(format!("{:.4}", l.rate));
    }
    ensure(links.len() == E6_PROBS.len(), || format!("{} links", links.len()))?;
    ensure(t < E6_LIMIT, || format!("took {t:.2?}"))?;
    Ok(format!("rates {rates:?}, collector == ledger on all links, {t:.2?}"))
}

fn c5_e7() -> Outcome {
    let on = scenario("e7.scenario");
    ensure(on.options.nrp_enforce, || "bundled e7 must enforce".into())?;
    let mut off = on.clone();
    off.options.nrp_enforce = false;

    let r = run_scenario(&off).map_err(|e| e.to_string())?;
    let offered: u64 = off.streams.iter().map(|s| (s.rate * s.pkt_size as f64) as u64).sum();
    let cap = off.links[0].capacity.unwrap_or(0);
    ensure(offered == 2 * cap, || format!("offered {offered} on a {cap}-unit bottleneck"))?;
    let mut off_losses = Vec::new();
    for (name, s) in &r.streams {
        ensure(s.loss > E7_MIN_LOSS_UNENFORCED, || format!("unenforced {name} loss {:.3}", s.loss))?;
        off_losses.push(format!("{name}={:.3}", s.loss));
    }

    let r = run_scenario(&on).map_err(|e| e.to_string())?;
    for name in ["X", "Y", "Z"] {
        let s = &r.streams[name];
        ensure(s.dropped() == 0, || format!("enforced {name} lost {}", s.dropped()))?;
    }
    let total: u64 = r.streams.values().map(|s| s.dropped()).sum();
    let noise = r.streams["interference"].dropped();
    ensure(total == noise && noise > 0, || format!("{noise} of {total} drops on interference"))?;
    Ok(format!(
        "off: {}; on: X/Y/Z lossless, interference takes {noise} of {total} drops",
        off_losses.join(" ")
    ))
}

fn c6_in_between() -> Outcome {
    let a = in_between_capacity(51, 17, 17);
    let b = in_between_capacity(51, 9, 9);
    ensure(a == 16 && b == 32, || format!("got {a} and {b}"))?;
    for rld in 0..=120 {
        for s in 0..=17 {
            for h in 0..=17 {
                let neg = in_between_capacity(rld, s, h) < 0;
                ensure(neg == (rld < s + h + 1), || format!("sign wrong at ({rld},{s},{h})"))?;
            }
        }
    }
    let threshold = (0..).find(|&r| in_between_capacity(r, 17, 17) >= 0).unwrap_or(-1);
    ensure(threshold == 35, || format!("threshold {threshold}"))?;
    Ok(format!("(51,17,17)={a}, (51,9,9)={b}; sign property holds; minimum RLD {threshold}"))
}

fn c7_placement() -> Outcome {
    let start = Instant::now();
    let mode = DepthCounting::NasAsSingleEntry;
    let p = common::path(3);
    let caps = common::caps(&[3, 3, 3], 17);
    let hbh = vec![ActionSpec::new(opcode::DUMMY, 0)];
    let req = [NasRequest::new(RequestScope::Hbh, hbh.clone())];
    let s = compose_stack_with(&p, &req, &caps, mode).map_err(|e| e.to_string())?;
    let pos = common::hbh_positions(&s);
    ensure(pos == [1, 2], || format!("copies below {pos:?}"))?;

    let removed = |idx: usize| {
        let mut cut = s.clone();
        cut.entries.remove(idx);
        validate_stack_with(&cut.sealed(), &p, &caps, mode).map(|r| r.issues)
    };
    let below_l2 = removed(2).map_err(|e| e.to_string())?;
    ensure(
        below_l2.len() == 1
            && below_l2[0].node == NodeId::new("R1")
            && matches!(below_l2[0].kind, IssueKind::NasOutOfRld { .. }),
        || format!("removing copy below L2: {below_l2:?}"),
    )?;
    let below_l3 = removed(4).map_err(|e| e.to_string())?;
    ensure(
        below_l3.len() == 1 && below_l3[0].kind == IssueKind::HbhMissing,
        || format!("removing copy below L3: {below_l3:?}"),
    )?;

    let real = scenario("rld-fig28.scenario");
    let stream = &real.streams[0];
    let reqs = real
        .stream_requests(stream, mna_core::actions::Color::A)
        .map_err(|e| e.to_string())?;
    let rp = &real.path(&stream.path).ok_or("no path")?.path;
    let rs = compose_stack(rp, &reqs, &real.caps()).map_err(|e| e.to_string())?;
    let rpos = common::hbh_positions(&rs);
    ensure(rpos == [1, 2], || format!("rld-fig28.scenario copies below {rpos:?}"))?;

    let mut checked = 0;
    for (modes, max_rld) in [(DepthCounting::NasAsSingleEntry, 6), (DepthCounting::Lses, 8)] {
        for rlds in common::all_rld_vectors(5, max_rld) {
            let c = common::caps(&rlds, 17);
            let p = common::path(rlds.len());
            let oracle = common::brute_force_min_copies(&p, &hbh, &c, modes);
            match (compose_stack_with(&p, &req, &c, modes), oracle) {
                (Ok(s), Some(min)) => {
                    let got = common::hbh_positions(&s).len() as u32;
                    ensure(got == min, || format!("{rlds:?}: {got} copies, oracle {min}"))?;
                }
                (Err(ComposeError::CapacityExceeded { .. }), None) => {}
                (r, o) => return Err(format!("{rlds:?}: composer {r:?}, oracle {o:?}")),
            }
            checked += 1;
        }
    }
    let t = start.elapsed();
    ensure(t < PLACEMENT_LIMIT, || format!("took {t:.2?}"))?;
    Ok(format!(
        "copies below L2 and L3; both removal variants flagged; minimal on {checked} capability vectors, {t:.2?}"
    ))
}

fn c8_nffrr() -> Outcome {
    let on = scenario("nffrr-fig10.scenario");
    ensure(on.options.nffrr, || "bundled scenario must enable NFFRR".into())?;
    let mut off = on.clone();
    off.options.nffrr = false;
    let probe = |r: &SimReport| -> Result<(DropCause, u32, u32), String> {
        let s = &r.streams["probe"];
        let (cause, n) = s.drops.iter().next().ok_or("probe was delivered")?;
        let hops = r.hop_histogram.keys().next().copied().ok_or("no hop count")?;
        ensure(*n == 1 && r.hop_histogram.len() == 1, || "expected one probe".into())?;
        Ok((*cause, hops, s.max_reroutes))
    };
    let ttl = on.paths[0].path.ttl as u32;
    ensure(ttl == NFFRR_TTL, || format!("initial TTL {ttl}"))?;
    let (cause, hops, _) = probe(&run_scenario(&off).map_err(|e| e.to_string())?)?;
    ensure(cause == DropCause::TtlExpired && hops == ttl, || {
        format!("without NFFRR: {cause} after {hops} hops")
    })?;
    let (cause2, hops2, reroutes) = probe(&run_scenario(&on).map_err(|e| e.to_string())?)?;
    ensure(
        cause2 == DropCause::Nffrr && hops2 <= NFFRR_MAX_HOPS && reroutes == 1,
        || format!("with NFFRR: {cause2} after {hops2} hops, {reroutes} reroutes"),
    )?;
    Ok(format!(
        "without: {cause} at hop {hops}; with: {cause2} at hop {hops2} on the second reroute attempt"
    ))
}

fn c9_mutable_bits() -> Outcome {
    let mut nas = Nas::new(FormatB::new(opcode::NOOP, 0, Scope::Hbh));
    for _ in 0..7 {
        nas.push_ad(0);
    }
    nas.push_action(opcode::DUMMY, 0);
    for _ in 0..7 {
        nas.push_ad(0);
    }
    let r = mutable_bit_report(&nas);
    ensure(
        r.total_bits == MAX_NAS_TOTAL && r.mutable_bits == MAX_NAS_MUTABLE && r.data_bits == MAX_NAS_DATA,
        || format!("{r:?}"),
    )?;
    Ok(format!(
        "total {} bits, mutable {}; data {} (quoted elsewhere as {MAX_NAS_DATA_QUOTED}, see docs/formats.md)",
        r.total_bits, r.mutable_bits, r.data_bits
    ))
}

fn c10_immutable_region() -> Outcome {
    let mut runs = 0;
    let mut packets = 0;
    for name in ["e1", "e2", "e5", "e6", "e7", "nffrr-fig10", "rld-fig28"] {
        let sc = scenario(&format!("{name}.scenario"));
        let mut variants = vec![sc.clone()];
        let mut flipped = sc.clone();
        flipped.options.nffrr = !sc.options.nffrr;
        flipped.options.nrp_enforce = !sc.options.nrp_enforce;
        variants.push(flipped);
        for v in variants {
            let r = run_scenario(&v).map_err(|e| format!("{name}: {e}"))?;
            ensure(r.immutable_violations == 0, || {
                format!("{name}: {} violations", r.immutable_violations)
            })?;
            runs += 1;
            packets += r.total_sent();
        }
    }
    Ok(format!(
        "line rate, RTTs and per-hop latency excluded; immutable-prefix assertion clean over {runs} runs, {packets} packets"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("codec roundtrip", c1_codec_roundtrip),
        ("expected end-to-end drop and E5", c2_expected_drop_and_e5),
        ("collector arithmetic on reference counters", c3_collector),
        ("E6 link-specific loss", c4_e6),
        ("E7 bandwidth reservation", c5_e7),
        ("in-between capacity", c6_in_between),
        ("HBH copy placement", c7_placement),
        ("no-further fast reroute", c8_nffrr),
        ("mutable-bit report", c9_mutable_bits),
        ("desk-scale substitutes", c10_immutable_region),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match std::panic::catch_unwind(f) {
            Ok(Ok(d)) => ("PASS", d),
            Ok(Err(d)) => ("FAIL", d),
            Err(_) => ("FAIL", "panicked".to_string()),
        };
        failed += (tag == "FAIL") as usize;
        println!("[{tag}] {:>2}. {name}: {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
