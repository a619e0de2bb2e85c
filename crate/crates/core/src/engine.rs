// SPDX-License-Identifier: Apache-2.0

//! Per-node LSR processing.
//!
//! A hop runs, in order: ingress random drop, stack decode, the topmost HBH
//! NAS (if it ends within the RLD), the forwarding-table lookup with its
//! pops (executing the select NAS exposed by each pop), the I2E NAS on
//! delivery, metering, fast reroute and finally the TTL check.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{
    nffrr_data, opcode, ActionContext, ActionRegistry, Effect, ExportRecord, Invocation,
    MeterVerdict,
};
use crate::codec::{
    format_d_mutable_mask, layout, Codec, CodecError, FormatB, FormatC, FormatD, LabelStack,
    Nas, RawLse, Scope, Span, SpanKind, DEFAULT_NAS_INDICATOR, MAX_NAL, MAX_NASL,
};
use crate::composer::{NodeCapabilities, FIRST_UNRESERVED_LABEL};
use crate::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Route {
    /// Pop the label (and the NAS it exposes) and send to `next_hop`. With
    /// `php` the next forwarding label is popped as well.
    PopAndForward { next_hop: NodeId, php: bool },
    /// Pop the label and look up the one below it.
    PopAndLookup,
    Swap { label: u32, next_hop: NodeId },
    /// Pop the label and hand the packet to the local stack.
    Deliver,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("label {0} is reserved (< 16)")]
    ReservedLabel(u32),
    #[error("ingress drop probability {0} is outside [0, 1]")]
    Probability(f64),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForwardingTable {
    routes: BTreeMap<u32, Route>,
}

impl ForwardingTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: u32, route: Route) -> Result<Option<Route>, EngineError> {
        if label < FIRST_UNRESERVED_LABEL {
            return Err(EngineError::ReservedLabel(label));
        }
        Ok(self.routes.insert(label, route))
    }

    pub fn get(&self, label: u32) -> Option<&Route> {
        self.routes.get(&label)
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &Route)> {
        self.routes.iter()
    }
}

/// Backup path for a protected link: labels to push and the neighbor that
/// receives the packet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackupTunnel {
    pub labels: Vec<u32>,
    pub next_hop: NodeId,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownOpcode {
    #[default]
    Skip,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub indicator: u32,
    pub strict: bool,
    /// Mark rerouted packets and refuse a second reroute.
    pub nffrr: bool,
    pub unknown_opcode: UnknownOpcode,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            indicator: DEFAULT_NAS_INDICATOR,
            strict: true,
            nffrr: false,
            unknown_opcode: UnknownOpcode::Skip,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropCause {
    TtlExpired,
    Nffrr,
    MeterExceeded,
    NoRoute,
    Malformed,
    RandomLoss,
    /// Per-tick link capacity exhausted.
    Congestion,
}

impl DropCause {
    pub const ALL: [DropCause; 7] = [
        DropCause::TtlExpired,
        DropCause::Nffrr,
        DropCause::MeterExceeded,
        DropCause::NoRoute,
        DropCause::Malformed,
        DropCause::RandomLoss,
        DropCause::Congestion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DropCause::TtlExpired => "ttl_expired",
            DropCause::Nffrr => "nffrr",
            DropCause::MeterExceeded => "meter_exceeded",
            DropCause::NoRoute => "no_route",
            DropCause::Malformed => "malformed",
            DropCause::RandomLoss => "random_loss",
            DropCause::Congestion => "congestion",
        }
    }
}

impl fmt::Display for DropCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Forward(NodeId),
    Delivered,
    Dropped(DropCause),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    Arrived,
    Executed { scope: Scope, opcode: u8 },
    Popped(u32),
    Swapped { from: u32, to: u32 },
    Rerouted { failed: NodeId, pushed: Vec<u32> },
    Forwarded(NodeId),
    Delivered,
    Dropped(DropCause),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    /// Label stack as network-order words.
    pub stack: Vec<u32>,
    /// Size in link-capacity units.
    pub payload_len: u64,
    pub flow_key: u64,
    /// Set while the packet carries the reroute mark at the current hop.
    pub reroute_marked: bool,
    pub hops: u32,
    pub trace: Option<Vec<(NodeId, TraceEvent)>>,
}

impl Packet {
    pub fn from_bytes(stack_bytes: &[u8], payload_len: u64, flow_key: u64) -> Result<Self, CodecError> {
        Ok(Packet::from_words(
            crate::codec::bytes_to_words(stack_bytes)?,
            payload_len,
            flow_key,
        ))
    }

    pub fn from_stack(stack: &LabelStack, payload_len: u64, flow_key: u64) -> Result<Self, CodecError> {
        Ok(Packet::from_words(
            Codec::default().encode_words(stack)?,
            payload_len,
            flow_key,
        ))
    }

    pub fn from_words(stack: Vec<u32>, payload_len: u64, flow_key: u64) -> Self {
        Packet {
            stack,
            payload_len,
            flow_key,
            reroute_marked: false,
            hops: 0,
            trace: None,
        }
    }

    pub fn traced(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn stack_bytes(&self) -> Vec<u8> {
        crate::codec::words_to_bytes(&self.stack)
    }

    fn log(&mut self, node: &NodeId, ev: TraceEvent) {
        if let Some(t) = &mut self.trace {
            t.push((node.clone(), ev));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disposition {
    pub verdict: Verdict,
    pub executed: Vec<(Scope, u8)>,
    pub exports: Vec<ExportRecord>,
    /// Words removed from the top of the arriving stack (a swap counts as one).
    pub popped: usize,
    /// Words added on top of what remains (a swap counts as one).
    pub pushed: usize,
    /// The first 20 bits of every retained LSE came through unchanged.
    pub immutable_ok: bool,
    /// Sent into a backup tunnel at this hop.
    pub rerouted: bool,
}

impl Disposition {
    fn new(verdict: Verdict) -> Self {
        Disposition {
            verdict,
            executed: Vec::new(),
            exports: Vec::new(),
            popped: 0,
            pushed: 0,
            immutable_ok: true,
            rerouted: false,
        }
    }

    pub fn dropped(&self) -> Option<DropCause> {
        match self.verdict {
            Verdict::Dropped(c) => Some(c),
            _ => None,
        }
    }
}

/// Compares the immutable prefix of the retained words: `before[popped..]`
/// against `after[pushed..]`.
pub fn immutable_prefix_preserved(before: &[u32], after: &[u32], popped: usize, pushed: usize) -> bool {
    let shift = 32 - layout::IMMUTABLE_PREFIX_BITS;
    let (Some(old), Some(new)) = (before.get(popped..), after.get(pushed..)) else {
        return false;
    };
    old.len() == new.len() && old.iter().zip(new).all(|(a, b)| a >> shift == b >> shift)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NasExecError {
    #[error("NAS word count {found} does not match NASL {nasl}")]
    Length { nasl: usize, found: usize },
    #[error("action at NAS index {at} needs {nal} AD LSEs past the end")]
    MissingAd { at: usize, nal: usize },
    #[error("reserved scope code {0}")]
    ReservedScope(u32),
    #[error("unknown opcode {0}")]
    UnknownOpcode(u8),
}

/// Runs one NAS in place. `words` starts at the initial opcode.
///
/// Every word after the initial opcode is first read as a subsequent opcode;
/// the NAL of each dispatched action then marks its AD words as processed so
/// they are skipped. AD written back by actions is masked to the mutable bits.
pub fn execute_nas(
    registry: &mut ActionRegistry,
    words: &mut [u32],
    ctx: &mut ActionContext<'_>,
    unknown: UnknownOpcode,
) -> Result<Vec<u8>, NasExecError> {
    let b = FormatB::from_word(*words.first().ok_or(NasExecError::Length { nasl: 0, found: 0 })?)
        .map_err(NasExecError::ReservedScope)?;
    let nasl = b.nasl as usize;
    if words.len() != nasl + 1 {
        return Err(NasExecError::Length {
            nasl,
            found: words.len().saturating_sub(1),
        });
    }
    let mask = format_d_mutable_mask();
    let mut processed = [false; MAX_NASL + 1];
    let mut dispatched = Vec::new();
    for idx in 0..=nasl {
        if processed[idx] {
            continue;
        }
        let (op, nal, data) = if idx == 0 {
            (b.opcode, b.nal as usize, b.data as u32)
        } else {
            let c = FormatC::from_word(words[idx]);
            (c.opcode, c.nal as usize, c.data)
        };
        if idx + nal > nasl {
            return Err(NasExecError::MissingAd { at: idx, nal });
        }
        processed[idx..=idx + nal].fill(true);
        let mut ad = [FormatD::new(0); MAX_NAL as usize];
        for k in 0..nal {
            ad[k] = FormatD::from_word(words[idx + 1 + k]);
        }
        let mut inv = Invocation {
            scope: b.scope,
            opcode: op,
            data,
            ad: &mut ad[..nal],
        };
        if registry.dispatch(&mut inv, ctx) {
            dispatched.push(op);
            for k in 0..nal {
                let w = &mut words[idx + 1 + k];
                *w = (*w & !mask) | (ad[k].to_word() & mask);
            }
        } else {
            match unknown {
                UnknownOpcode::Skip => log::debug!("{}: skipping unknown opcode {op}", ctx.node),
                UnknownOpcode::Drop => return Err(NasExecError::UnknownOpcode(op)),
            }
        }
    }
    Ok(dispatched)
}

/// Words to push for a reroute and where to send the packet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrrPush {
    pub words: Vec<u32>,
    pub labels: Vec<u32>,
    pub next_hop: NodeId,
}

#[derive(Debug)]
pub struct NodeState {
    pub id: NodeId,
    pub caps: NodeCapabilities,
    pub table: ForwardingTable,
    pub registry: ActionRegistry,
    pub config: EngineConfig,
    /// Backup tunnels keyed by the neighbor whose link they protect.
    pub backups: BTreeMap<NodeId, BackupTunnel>,
    /// Neighbors whose link from this node is down.
    pub failed_links: BTreeSet<NodeId>,
    /// HBH NAS present but ending beyond the RLD.
    pub hbh_unreadable: u64,
    ingress_drop_prob: f64,
    rng: ChaCha8Rng,
}

impl NodeState {
    /// `stream` selects an independent ChaCha stream for this node's draws.
    pub fn new(caps: NodeCapabilities, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NodeState {
            id: caps.node.clone(),
            caps,
            table: ForwardingTable::new(),
            registry: ActionRegistry::standard(None),
            config: EngineConfig::default(),
            backups: BTreeMap::new(),
            failed_links: BTreeSet::new(),
            hbh_unreadable: 0,
            ingress_drop_prob: 0.0,
            rng,
        }
    }

    pub fn ingress_drop_prob(&self) -> f64 {
        self.ingress_drop_prob
    }

    pub fn set_ingress_drop_prob(&mut self, p: f64) -> Result<(), EngineError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(EngineError::Probability(p));
        }
        self.ingress_drop_prob = p;
        Ok(())
    }

    fn codec(&self) -> Codec {
        Codec {
            indicator: self.config.indicator,
            strict: self.config.strict,
        }
    }

    /// Backup push for a failed link, or the drop it forces.
    pub fn apply_frr(&self, marked: bool, failed: &NodeId) -> Result<FrrPush, DropCause> {
        if marked && self.config.nffrr {
            return Err(DropCause::Nffrr);
        }
        let tunnel = self.backups.get(failed).ok_or(DropCause::NoRoute)?;
        let Some((&last, init)) = tunnel.labels.split_last() else {
            return Err(DropCause::NoRoute);
        };
        let mut words: Vec<u32> = init.iter().map(|&l| RawLse::new(l, 0).to_word()).collect();
        words.push(RawLse::new(last, 0).to_word());
        if self.config.nffrr {
            let mut nas = Nas::new(FormatB::new(opcode::NFFRR, nffrr_data(true), Scope::Select));
            nas.indicator.bspl = self.config.indicator;
            words.push(nas.indicator.to_word());
            words.push(nas.initial.to_word());
        }
        Ok(FrrPush {
            words,
            labels: tunnel.labels.clone(),
            next_hop: tunnel.next_hop.clone(),
        })
    }

    fn run_nas(
        &mut self,
        pkt: &mut Packet,
        span: &Span,
        now: u64,
        disp: &mut Disposition,
        effects: &mut Vec<Effect>,
    ) -> Result<(), DropCause> {
        let SpanKind::Nas(scope) = span.kind else {
            return Ok(());
        };
        if span.end() > self.caps.rld {
            if scope == Scope::Hbh {
                self.hbh_unreadable += 1;
            }
            log::debug!("{}: {scope} NAS at {} beyond RLD", self.id, span.start);
            return Ok(());
        }
        let mut ctx = ActionContext::new(&self.id, now, pkt.payload_len);
        let words = &mut pkt.stack[span.start + 1..span.end()];
        let ops = execute_nas(&mut self.registry, words, &mut ctx, self.config.unknown_opcode)
            .map_err(|e| {
                log::debug!("{}: {e}", self.id);
                DropCause::Malformed
            })?;
        effects.append(&mut ctx.effects);
        for op in ops {
            disp.executed.push((scope, op));
            pkt.log(&self.id, TraceEvent::Executed { scope, opcode: op });
        }
        Ok(())
    }

    /// Pops the label at span `i` and every select/HBH NAS below it, running
    /// each select NAS. Returns the index of the first span left.
    fn pop_label(
        &mut self,
        pkt: &mut Packet,
        spans: &[Span],
        i: usize,
        now: u64,
        disp: &mut Disposition,
        effects: &mut Vec<Effect>,
    ) -> Result<usize, DropCause> {
        let mut j = i;
        if spans.get(i).is_some_and(|s| s.kind == SpanKind::Label) {
            pkt.log(&self.id, TraceEvent::Popped(RawLse::from_word(pkt.stack[spans[i].start]).label));
            j += 1;
        }
        while let Some(s) = spans.get(j) {
            match s.kind {
                SpanKind::Nas(Scope::Select) => self.run_nas(pkt, s, now, disp, effects)?,
                SpanKind::Nas(Scope::Hbh) => {}
                _ => break,
            }
            j += 1;
        }
        Ok(j)
    }

    pub fn process_packet(&mut self, pkt: &mut Packet, now: u64) -> Disposition {
        pkt.hops += 1;
        pkt.reroute_marked = false;
        pkt.log(&self.id, TraceEvent::Arrived);
        let mut disp = self.handle(pkt, now);
        let ev = match &disp.verdict {
            Verdict::Forward(n) => TraceEvent::Forwarded(n.clone()),
            Verdict::Delivered => TraceEvent::Delivered,
            Verdict::Dropped(c) => TraceEvent::Dropped(*c),
        };
        pkt.log(&self.id, ev);
        if disp.dropped().is_some() {
            disp.popped = 0;
            disp.pushed = 0;
        }
        disp
    }

    fn handle(&mut self, pkt: &mut Packet, now: u64) -> Disposition {
        let drop = |c| Disposition::new(Verdict::Dropped(c));
        if self.ingress_drop_prob > 0.0 && self.rng.random::<f64>() < self.ingress_drop_prob {
            return drop(DropCause::RandomLoss);
        }
        if pkt.stack.is_empty() {
            // Last label popped upstream and nothing below it.
            return Disposition::new(Verdict::Delivered);
        }
        let spans = match self.codec().spans(&pkt.stack) {
            Ok(s) => s,
            Err(e) => {
                log::debug!("{}: {e}", self.id);
                return drop(DropCause::Malformed);
            }
        };
        let before = pkt.stack.clone();
        let mut disp = Disposition::new(Verdict::Delivered);
        let mut effects = Vec::new();
        match self.walk(pkt, &spans, now, &mut disp, &mut effects) {
            Ok(Some(out)) => self.finish(pkt, &before, &spans, out, now, disp, effects),
            Ok(None) => {
                if let Some(c) = self.collect(pkt, &mut disp, effects) {
                    disp.verdict = Verdict::Dropped(c);
                }
                disp
            }
            Err(c) => {
                self.collect(pkt, &mut disp, effects);
                disp.verdict = Verdict::Dropped(c);
                disp
            }
        }
    }

    /// Folds action effects into the disposition. Returns a meter drop, if any.
    fn collect(&mut self, pkt: &mut Packet, disp: &mut Disposition, effects: Vec<Effect>) -> Option<DropCause> {
        let mut cause = None;
        for e in effects {
            match e {
                Effect::Export(r) => disp.exports.push(r),
                Effect::MarkRerouted => pkt.reroute_marked = true,
                Effect::MeterExceeded { .. } => cause = Some(DropCause::MeterExceeded),
                Effect::MeterPassed { .. } => {}
            }
        }
        cause
    }

    /// Runs the NAS and the label lookup. `Some` carries the forwarding
    /// decision, `None` means delivered.
    fn walk(
        &mut self,
        pkt: &mut Packet,
        spans: &[Span],
        now: u64,
        disp: &mut Disposition,
        effects: &mut Vec<Effect>,
    ) -> Result<Option<Outgoing>, DropCause> {
        if let Some(h) = spans.iter().find(|s| s.kind == SpanKind::Nas(Scope::Hbh)) {
            self.run_nas(pkt, h, now, disp, effects)?;
        }
        let mut top = 0;
        loop {
            let Some(span) = spans.get(top) else {
                return Ok(None);
            };
            if span.kind != SpanKind::Label {
                // NAS exposed on top (after PHP upstream): consume it here.
                top = self.pop_label(pkt, spans, top, now, disp, effects)?;
                return self.deliver(pkt, spans, top, now, disp, effects);
            }
            let label = RawLse::from_word(pkt.stack[span.start]).label;
            let route = self.table.get(label).cloned().ok_or(DropCause::NoRoute)?;
            match route {
                Route::Swap { label: to, next_hop } => {
                    pkt.log(&self.id, TraceEvent::Swapped { from: label, to });
                    return Ok(Some(Outgoing {
                        rest: top + 1,
                        swap: Some((top, to)),
                        next_hop,
                    }));
                }
                Route::PopAndForward { next_hop, php } => {
                    let mut rest = self.pop_label(pkt, spans, top, now, disp, effects)?;
                    if php && spans.get(rest).is_some_and(|s| s.kind == SpanKind::Label) {
                        pkt.log(&self.id, TraceEvent::Popped(RawLse::from_word(pkt.stack[spans[rest].start]).label));
                        rest += 1;
                    }
                    return Ok(Some(Outgoing {
                        rest,
                        swap: None,
                        next_hop,
                    }));
                }
                Route::PopAndLookup => top = self.pop_label(pkt, spans, top, now, disp, effects)?,
                Route::Deliver => {
                    top = self.pop_label(pkt, spans, top, now, disp, effects)?;
                    return self.deliver(pkt, spans, top, now, disp, effects);
                }
            }
        }
    }

    fn deliver(
        &mut self,
        pkt: &mut Packet,
        spans: &[Span],
        top: usize,
        now: u64,
        disp: &mut Disposition,
        effects: &mut Vec<Effect>,
    ) -> Result<Option<Outgoing>, DropCause> {
        if let Some(s) = spans.get(top) {
            if s.kind == SpanKind::Nas(Scope::I2e) {
                self.run_nas(pkt, s, now, disp, effects)?;
            }
        }
        Ok(None)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &mut self,
        pkt: &mut Packet,
        before: &[u32],
        spans: &[Span],
        out: Outgoing,
        now: u64,
        mut disp: Disposition,
        effects: Vec<Effect>,
    ) -> Disposition {
        let metered_by_action = effects
            .iter()
            .any(|e| matches!(e, Effect::MeterPassed { .. } | Effect::MeterExceeded { .. }));
        if let Some(c) = self.collect(pkt, &mut disp, effects) {
            disp.verdict = Verdict::Dropped(c);
            return disp;
        }
        if !metered_by_action {
            if let Some(nrp) = self.registry.nrp_mut() {
                if nrp.meter_unselected(pkt.payload_len, now) == MeterVerdict::Drop {
                    disp.verdict = Verdict::Dropped(DropCause::MeterExceeded);
                    return disp;
                }
            }
        }

        let in_ttl = RawLse::from_word(before[0]).ttl;
        if in_ttl <= 1 {
            disp.verdict = Verdict::Dropped(DropCause::TtlExpired);
            return disp;
        }
        let ttl = |w: u32| layout::mpls::TTL.set(w, (in_ttl - 1) as u32);

        let rest_word = spans.get(out.rest).map_or(pkt.stack.len(), |s| s.start);
        let mut head: Vec<u32> = Vec::new();
        if let Some((i, to)) = out.swap {
            let mut l = RawLse::from_word(pkt.stack[spans[i].start]);
            l.label = to;
            head.push(ttl(l.to_word()));
        }
        let mut next_hop = out.next_hop;
        if self.failed_links.contains(&next_hop) {
            match self.apply_frr(pkt.reroute_marked, &next_hop) {
                Ok(push) => {
                    pkt.log(
                        &self.id,
                        TraceEvent::Rerouted {
                            failed: next_hop.clone(),
                            pushed: push.labels.clone(),
                        },
                    );
                    let mut words = push.words;
                    for w in &mut words[..push.labels.len()] {
                        *w = ttl(*w);
                    }
                    words.append(&mut head);
                    head = words;
                    next_hop = push.next_hop;
                    pkt.reroute_marked = self.config.nffrr;
                    disp.rerouted = true;
                }
                Err(c) => {
                    disp.verdict = Verdict::Dropped(c);
                    return disp;
                }
            }
        }

        let mut stack = head;
        let pushed = stack.len();
        stack.extend_from_slice(&pkt.stack[rest_word..]);
        if out.swap.is_none() && spans.get(out.rest).is_some_and(|s| s.kind == SpanKind::Label) {
            stack[pushed] = ttl(stack[pushed]);
        }

        disp.popped = rest_word;
        disp.pushed = pushed;
        disp.immutable_ok = immutable_prefix_preserved(before, &stack, rest_word, pushed);
        if !disp.immutable_ok {
            log::warn!("{}: immutable prefix changed in transit", self.id);
        }
        pkt.stack = stack;
        disp.verdict = Verdict::Forward(next_hop);
        disp
    }
}

struct Outgoing {
    /// First span left in place.
    rest: usize,
    swap: Option<(usize, u32)>,
    next_hop: NodeId,
}

/// Free-function form of [`NodeState::process_packet`].
pub fn process_packet(node: &mut NodeState, pkt: &mut Packet, now: u64) -> Disposition {
    node.process_packet(pkt, now)
}
