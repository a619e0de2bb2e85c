// SPDX-License-Identifier: Apache-2.0

//! Best-effort textual dissection of a label stack.

use std::fmt::Write;

use super::error::CodecError;
use super::types::{Scope, DEFAULT_NAS_INDICATOR};
use super::wire::{walk, WalkEnd, WordKind, UNLIMITED_RLD};

fn scope_long(scope: Scope) -> &'static str {
    match scope {
        Scope::I2e => "ingress-to-egress",
        Scope::Hbh => "hop-by-hop",
        Scope::Select => "select",
    }
}

fn line(out: &mut String, i: usize, kind: &WordKind, word: u32) {
    let _ = write!(out, "#{i:<3} {word:08x}  ");
    let _ = match kind {
        WordKind::Forwarding(l) => writeln!(
            out,
            "FWD label={} (0x{:05x}) tc={} s={} ttl={}",
            l.label, l.label, l.tc, l.bos as u8, l.ttl
        ),
        WordKind::Indicator(a) => writeln!(
            out,
            "A   NAS indicator bspl={} (0x{:05x}) tc={} s={} ttl={}",
            a.bspl, a.bspl, a.tc, a.bos as u8, a.ttl
        ),
        WordKind::Initial(b) => writeln!(
            out,
            "B   opcode={} (0x{:02x}) data={} (0x{:04x}) ihs={} ({}) nasl={} nal={} r={} s={} u={}",
            b.opcode,
            b.opcode,
            b.data,
            b.data,
            b.scope.name(),
            scope_long(b.scope),
            b.nasl,
            b.nal,
            b.r as u8,
            b.s as u8,
            b.u as u8
        ),
        WordKind::Opcode(c) => writeln!(
            out,
            "C   opcode={} (0x{:02x}) data={} (0x{:05x}) nal={} s={}",
            c.opcode, c.opcode, c.data, c.data, c.nal, c.s as u8
        ),
        WordKind::Ancillary(d) => writeln!(
            out,
            "D   data={} (0x{:08x}) s={}",
            d.data, d.data, d.s as u8
        ),
    };
}

/// Renders one line per LSE. Never fails; problems are annotated inline.
pub fn dissect_text(bytes: &[u8], rld: Option<usize>) -> String {
    dissect_with(bytes, rld, DEFAULT_NAS_INDICATOR)
}

pub fn dissect_with(bytes: &[u8], rld: Option<usize>, indicator: u32) -> String {
    if bytes.is_empty() {
        return "empty stack\n".to_string();
    }
    let mut out = String::new();
    let words: Vec<u32> = bytes
        .chunks_exact(4)
        .map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let rld = rld.unwrap_or(UNLIMITED_RLD);
    let (kinds, end) = walk(&words, indicator, rld);
    for (i, k) in kinds.iter().enumerate() {
        line(&mut out, i, k, words[i]);
    }
    match end {
        WalkEnd::Bottom(at) => {
            for (i, w) in words.iter().enumerate().skip(at + 1) {
                let _ = writeln!(out, "#{i:<3} {w:08x}  TRAILING after bottom of stack");
            }
        }
        WalkEnd::Rld => {
            let _ = writeln!(out, "TRUNCATED at RLD ({rld} LSEs read of {})", words.len());
        }
        WalkEnd::Exhausted => {
            let _ = writeln!(out, "MISSING bottom-of-stack flag");
        }
        WalkEnd::Malformed(CodecError::MalformedNas { at, reason }) => {
            if let Some(w) = words.get(at) {
                let _ = writeln!(out, "#{at:<3} {w:08x}  ???");
            }
            let _ = writeln!(out, "MALFORMED: {reason} (LSE {at})");
        }
        WalkEnd::Malformed(e) => {
            let _ = writeln!(out, "MALFORMED: {e}");
        }
    }
    if !bytes.len().is_multiple_of(4) {
        let _ = writeln!(
            out,
            "MALFORMED: {}",
            CodecError::UnalignedLength(bytes.len())
        );
    }
    out
}
