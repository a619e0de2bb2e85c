// SPDX-License-Identifier: Apache-2.0

//! Shared generators and reference implementations for integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use mna_core::codec::{
    FormatB, LabelStack, Nas, NasLse, RawLse, Scope, StackEntry, DEFAULT_NAS_INDICATOR,
};
use mna_core::composer::{
    render_nas, validate_stack_with, ActionSpec, DepthCounting, NodeCapabilities, PathSpec,
};
use mna_core::NodeId;
use rand::Rng;

fn random_nas<R: Rng>(rng: &mut R, scope: Scope) -> Nas {
    let mut b = FormatB::new(rng.random_range(0..128), rng.random_range(0..1 << 13), scope);
    b.r = rng.random();
    b.u = rng.random();
    let mut nas = Nas::new(b);
    nas.indicator.tc = rng.random_range(0..8);
    nas.indicator.ttl = rng.random();
    let budget = rng.random_range(0..=15usize);
    let mut first = true;
    while nas.rest.len() < budget {
        if !first {
            nas.push_action(rng.random_range(0..128), rng.random_range(0..1 << 20));
            if let Some(NasLse::C(c)) = nas.rest.last_mut() {
                c.reserved = rng.random();
            }
        }
        first = false;
        let room = budget - nas.rest.len();
        for _ in 0..rng.random_range(0..=room.min(7)) {
            nas.push_ad(rng.random_range(0..1 << 30));
        }
    }
    nas
}

/// A random stack satisfying every encoder invariant: one or more
/// segments of a forwarding label, an optional select NAS and an optional
/// HBH NAS, with an optional I2E NAS at the bottom.
pub fn random_stack<R: Rng>(rng: &mut R) -> LabelStack {
    let mut s = LabelStack::new();
    for _ in 0..rng.random_range(1..=5) {
        let mut l = RawLse::new(rng.random_range(16..1 << 20), rng.random());
        l.tc = rng.random_range(0..8);
        s.entries.push(StackEntry::Forwarding(l));
        if rng.random_bool(0.3) {
            s.push_nas(random_nas(rng, Scope::Select));
        }
        if rng.random_bool(0.3) {
            s.push_nas(random_nas(rng, Scope::Hbh));
        }
    }
    if rng.random_bool(0.3) {
        s.push_nas(random_nas(rng, Scope::I2e));
    }
    s.sealed()
}

/// Packs a stack with plain shifts and masks, independent of the codec's
/// field tables.
pub fn oracle_words(stack: &LabelStack) -> Vec<u32> {
    let mpls = |label: u32, tc: u8, s: bool, ttl: u8| {
        label << 12 | (tc as u32) << 9 | (s as u32) << 8 | ttl as u32
    };
    let mut out = Vec::new();
    for e in &stack.entries {
        match e {
            StackEntry::Forwarding(l) => out.push(mpls(l.label, l.tc, l.bos, l.ttl)),
            StackEntry::Nas(n) => {
                let a = &n.indicator;
                out.push(mpls(a.bspl, a.tc, a.bos, a.ttl));
                let b = &n.initial;
                let ihs = match b.scope {
                    Scope::I2e => 0,
                    Scope::Hbh => 1,
                    Scope::Select => 2,
                };
                out.push(
                    (b.opcode as u32) << 25
                        | (b.data as u32) << 12
                        | ihs << 10
                        | (b.nasl as u32) << 6
                        | (b.nal as u32) << 3
                        | (b.r as u32) << 2
                        | (b.s as u32) << 1
                        | b.u as u32,
                );
                for l in &n.rest {
                    out.push(match l {
                        NasLse::C(c) => {
                            (c.opcode as u32) << 25
                                | (c.data >> 7) << 12
                                | (c.data & 0x7f) << 5
                                | (c.nal as u32) << 2
                                | (c.s as u32) << 1
                                | c.reserved as u32
                        }
                        NasLse::D(d) => (d.data >> 11) << 13 | (d.data & 0x7ff) << 1 | d.s as u32,
                    });
                }
            }
        }
    }
    out
}

pub fn indicator() -> u32 {
    DEFAULT_NAS_INDICATOR
}

pub fn caps(rlds: &[usize], max_hbh: usize) -> BTreeMap<NodeId, NodeCapabilities> {
    rlds.iter()
        .enumerate()
        .map(|(i, &r)| {
            let c = NodeCapabilities::new(&format!("R{}", i + 1), r).with_max_nas(0, max_hbh);
            (c.node.clone(), c)
        })
        .collect()
}

pub fn path(n: usize) -> PathSpec {
    let names: Vec<String> = (1..=n).map(|i| format!("R{i}")).collect();
    let hops: Vec<(&str, u32)> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), 100 + i as u32))
        .collect();
    PathSpec::new(&hops)
}

/// Path indices below whose forwarding label an HBH NAS sits.
pub fn hbh_positions(s: &LabelStack) -> Vec<usize> {
    let mut hop = 0usize;
    let mut out = Vec::new();
    for e in &s.entries {
        match e {
            StackEntry::Forwarding(_) => hop += 1,
            StackEntry::Nas(n) if n.scope() == Scope::Hbh => out.push(hop - 1),
            _ => {}
        }
    }
    out
}

/// Stack with one copy of `hbh` below each label whose bit is set in `mask`.
pub fn stack_with_copies(p: &PathSpec, hbh: &[ActionSpec], mask: u32) -> LabelStack {
    let nas = render_nas(Scope::Hbh, hbh).unwrap();
    let mut s = LabelStack::new();
    for (j, h) in p.hops.iter().enumerate() {
        s.push_label(h.label, p.ttl);
        if mask >> j & 1 == 1 {
            s.push_nas(nas.clone());
        }
    }
    s.sealed()
}

/// Fewest HBH copies that pass validation, by trying every placement.
pub fn brute_force_min_copies(
    p: &PathSpec,
    hbh: &[ActionSpec],
    caps: &BTreeMap<NodeId, NodeCapabilities>,
    mode: DepthCounting,
) -> Option<u32> {
    let n = p.hops.len();
    (1u32..1 << n)
        .filter(|&mask| {
            validate_stack_with(&stack_with_copies(p, hbh, mask), p, caps, mode)
                .is_ok_and(|r| r.is_valid())
        })
        .map(u32::count_ones)
        .min()
}

/// Every rld vector over 1..=max_rld for paths up to `max_hops`.
pub fn all_rld_vectors(max_hops: usize, max_rld: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for n in 1..=max_hops {
        let mut v = vec![1; n];
        loop {
            out.push(v.clone());
            let mut i = 0;
            while i < n && v[i] == max_rld {
                v[i] = 1;
                i += 1;
            }
            if i == n {
                break;
            }
            v[i] += 1;
        }
    }
    out
}
