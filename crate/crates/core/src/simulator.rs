// SPDX-License-Identifier: Apache-2.0

//! Deterministic packet-level scenario runner and the AMM loss collector.
//!
//! Time advances in ticks. Every packet injected in a tick is walked hop by
//! hop to delivery or drop within that tick; links carry at most `capacity`
//! units per tick and direction and drop the excess. There are no queues.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{
    amm_encode, opcode, ActionRegistry, Color, ExportRecord, FlowCounters, MeterState,
    TokenBucket, DEFAULT_BURST_PACKETS,
};
use crate::codec::Codec;
use crate::composer::{
    compose_stack, validate_stack, ActionSpec, NasRequest, NodeCapabilities, PathSpec,
    RequestScope,
};
use crate::engine::{
    BackupTunnel, DropCause, EngineConfig, NodeState, Packet, Route, Verdict,
};
use crate::NodeId;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// 1 − Π(1 − pᵢ)
pub fn expected_e2e_drop(probs: &[f64]) -> Result<f64, SimError> {
    let mut keep = 1.0;
    for &p in probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(SimError::Probability(p));
        }
        keep *= 1.0 - p;
    }
    Ok(1.0 - keep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkLoss {
    pub from: String,
    pub to: String,
    pub delta: i64,
    pub rate: f64,
}

/// Link loss from consecutive counters. `counters[0]` is the generator's
/// sent total; the rest follow the path.
pub fn collector_link_loss(names: &[&str], counters: &[u64]) -> Vec<LinkLoss> {
    counters
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let delta = w[0] as i64 - w[1] as i64;
            LinkLoss {
                from: names.get(i).map_or_else(|| i.to_string(), |s| s.to_string()),
                to: names
                    .get(i + 1)
                    .map_or_else(|| (i + 1).to_string(), |s| s.to_string()),
                delta,
                rate: if w[0] == 0 { 0.0 } else { delta as f64 / w[0] as f64 },
            }
        })
        .collect()
}

/// Keeps the latest exported counter per (node, flow, color).
#[derive(Debug, Clone, Default)]
pub struct Collector {
    latest: BTreeMap<(NodeId, u32, Color), u64>,
    received: u64,
}

impl Collector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, rec: &ExportRecord) {
        self.received += 1;
        self.latest
            .insert((rec.node.clone(), rec.flow_id, rec.color), rec.counter);
    }

    pub fn records_received(&self) -> u64 {
        self.received
    }

    /// n_a + n_b as last exported by `node` for `flow`.
    pub fn total(&self, node: &NodeId, flow: u32) -> Option<u64> {
        let a = self.latest.get(&(node.clone(), flow, Color::A));
        let b = self.latest.get(&(node.clone(), flow, Color::B));
        match (a, b) {
            (None, None) => None,
            _ => Some(a.copied().unwrap_or(0) + b.copied().unwrap_or(0)),
        }
    }

    pub fn link_loss(&self, flow: u32, generated: u64, path: &[NodeId]) -> Result<Vec<LinkLoss>, SimError> {
        let mut counters = vec![generated];
        for n in path {
            counters.push(
                self.total(n, flow)
                    .ok_or_else(|| SimError::MissingCounter(n.clone()))?,
            );
        }
        let mut names = vec!["generator"];
        names.extend(path.iter().map(NodeId::as_str));
        Ok(collector_link_loss(&names, &counters))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("no counter exported by {0}")]
    MissingCounter(NodeId),
    #[error("{location}: {reason}")]
    ScenarioInvalid { location: String, reason: String },
}

fn invalid(line: usize, what: impl fmt::Display, reason: impl fmt::Display) -> SimError {
    let location = if line > 0 {
        format!("line {line}")
    } else {
        what.to_string()
    };
    SimError::ScenarioInvalid {
        location,
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOptions {
    pub php: bool,
    pub strict: bool,
    pub nrp_enforce: bool,
    pub nffrr: bool,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions {
            php: false,
            strict: true,
            nrp_enforce: false,
            nffrr: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub caps: NodeCapabilities,
    pub drop_prob: f64,
    pub line: usize,
}

/// Bidirectional link; `capacity` in units per tick and direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub capacity: Option<u64>,
    pub up: bool,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunnelSpec {
    pub at: NodeId,
    /// Neighbor whose link the tunnel protects.
    pub protects: NodeId,
    pub tunnel: BackupTunnel,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteSpec {
    pub node: NodeId,
    pub label: u32,
    pub route: Route,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDef {
    pub name: String,
    pub path: PathSpec,
    /// Derive pop/deliver routes from the hop list.
    pub auto_routes: bool,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NrpSpec {
    pub node: NodeId,
    /// `None` configures the default meter.
    pub selector: Option<u16>,
    pub rate: u64,
    pub burst: Option<u64>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionTemplate {
    /// AMM with the stream's flow id and current color.
    Amm,
    Fixed(ActionSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamNas {
    pub scope: RequestScope,
    pub action: ActionTemplate,
    pub line: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorSchedule {
    /// Flip every this many ticks.
    Ticks(u64),
    /// Flip every this many packets of the stream.
    Packets(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub name: String,
    pub path: String,
    /// Packets per tick.
    pub rate: f64,
    /// Capacity units per packet.
    pub pkt_size: u64,
    pub count: Option<u64>,
    pub start: u64,
    pub flow_id: u32,
    pub color: Option<ColorSchedule>,
    pub nas: Vec<StreamNas>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub ticks: u64,
    pub options: ScenarioOptions,
    pub nodes: Vec<NodeSpec>,
    pub links: Vec<LinkSpec>,
    pub tunnels: Vec<TunnelSpec>,
    pub routes: Vec<RouteSpec>,
    pub paths: Vec<PathDef>,
    pub nrp: Vec<NrpSpec>,
    pub streams: Vec<StreamSpec>,
}

impl Scenario {
    pub fn new(name: &str) -> Self {
        Scenario {
            name: name.to_string(),
            seed: 0,
            ticks: 0,
            options: ScenarioOptions::default(),
            nodes: Vec::new(),
            links: Vec::new(),
            tunnels: Vec::new(),
            routes: Vec::new(),
            paths: Vec::new(),
            nrp: Vec::new(),
            streams: Vec::new(),
        }
    }

    pub fn caps(&self) -> BTreeMap<NodeId, NodeCapabilities> {
        self.nodes
            .iter()
            .map(|n| (n.caps.node.clone(), n.caps.clone()))
            .collect()
    }

    pub fn path(&self, name: &str) -> Option<&PathDef> {
        self.paths.iter().find(|p| p.name == name)
    }

    /// Stack requests of a stream with AMM rendered for `color`.
    pub fn stream_requests(&self, s: &StreamSpec, color: Color) -> Result<Vec<NasRequest>, SimError> {
        let mut out: Vec<NasRequest> = Vec::new();
        for n in &s.nas {
            let spec = match &n.action {
                ActionTemplate::Fixed(a) => a.clone(),
                ActionTemplate::Amm => {
                    let c = amm_encode(s.flow_id, color.bit(), false)
                        .map_err(|e| invalid(n.line, &s.name, e))?;
                    ActionSpec::new(opcode::AMM, c.data)
                }
            };
            match out.iter_mut().find(|r| r.scope == n.scope) {
                Some(r) => r.actions.push(spec),
                None => out.push(NasRequest::new(n.scope.clone(), vec![spec])),
            }
        }
        Ok(out)
    }

    fn has_amm(s: &StreamSpec) -> bool {
        s.nas.iter().any(|n| n.action == ActionTemplate::Amm)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StreamReport {
    pub sent: u64,
    pub received: u64,
    pub drops: BTreeMap<DropCause, u64>,
    pub loss: f64,
    /// Most backup tunnels any one packet entered.
    pub max_reroutes: u32,
    /// Drops by measurement segment: index k counts packets lost after the
    /// k-th AMM count (0 = between generator and first counting node).
    pub segment_drops: Vec<u64>,
    pub link_loss: Option<Vec<LinkLoss>>,
    pub collector_error: Option<String>,
}

impl StreamReport {
    pub fn dropped(&self) -> u64 {
        self.drops.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub ticks: u64,
    pub streams: BTreeMap<String, StreamReport>,
    pub amm: BTreeMap<NodeId, BTreeMap<u32, FlowCounters>>,
    pub actions: BTreeMap<NodeId, BTreeMap<String, u64>>,
    pub hop_histogram: BTreeMap<u32, u64>,
    pub exports: u64,
    pub immutable_violations: u64,
    pub hbh_unreadable: BTreeMap<NodeId, u64>,
}

impl SimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn total_sent(&self) -> u64 {
        self.streams.values().map(|s| s.sent).sum()
    }

    pub fn total_received(&self) -> u64 {
        self.streams.values().map(|s| s.received).sum()
    }

    /// Per-stream loss and per-link AMM loss as a plain-text table.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {} (seed {}, {} ticks)", self.scenario, self.seed, self.ticks);
        let _ = writeln!(
            out,
            "{:<16} {:>12} {:>12} {:>12} {:>9}",
            "stream", "sent", "received", "dropped", "loss %"
        );
        for (name, s) in &self.streams {
            let _ = writeln!(
                out,
                "{:<16} {:>12} {:>12} {:>12} {:>9.3}",
                name,
                s.sent,
                s.received,
                s.dropped(),
                100.0 * s.loss
            );
        }
        for (name, s) in &self.streams {
            if let Some(links) = &s.link_loss {
                let _ = writeln!(out, "AMM link loss, stream {name}");
                let _ = writeln!(
                    out,
                    "  {:<12} {:<12} {:>12} {:>9}",
                    "from", "to", "delta", "rate"
                );
                for l in links {
                    let _ = writeln!(
                        out,
                        "  {:<12} {:<12} {:>12} {:>9.4}",
                        l.from, l.to, l.delta, l.rate
                    );
                }
            }
            if let Some(e) = &s.collector_error {
                let _ = writeln!(out, "AMM link loss, stream {name}: {e}");
            }
        }
        if self.immutable_violations > 0 {
            let _ = writeln!(out, "immutable-prefix violations: {}", self.immutable_violations);
        }
        out
    }
}

struct Link {
    capacity: Option<u64>,
    up: bool,
}

struct StreamRun {
    entry: usize,
    templates: [Vec<u32>; 2],
    amm_nodes: Option<Vec<NodeId>>,
    acc: f64,
    sent: u64,
    color: Color,
}

struct Pending {
    stream: usize,
    words: Vec<u32>,
}

fn build_nodes(sc: &Scenario) -> Result<(Vec<NodeState>, BTreeMap<NodeId, usize>), SimError> {
    let mut index = BTreeMap::new();
    let mut nodes = Vec::with_capacity(sc.nodes.len());
    let max_size = sc.streams.iter().map(|s| s.pkt_size).max().unwrap_or(1);
    for (i, spec) in sc.nodes.iter().enumerate() {
        let id = spec.caps.node.clone();
        if index.insert(id.clone(), i).is_some() {
            return Err(invalid(spec.line, &id, format!("duplicate node {id}")));
        }
        let mut n = NodeState::new(spec.caps.clone(), sc.seed, i as u64 + 1);
        n.set_ingress_drop_prob(spec.drop_prob)
            .map_err(|e| invalid(spec.line, &id, e))?;
        n.config = EngineConfig {
            strict: sc.options.strict,
            nffrr: sc.options.nffrr,
            ..EngineConfig::default()
        };
        if sc.options.nrp_enforce {
            let mine: Vec<&NrpSpec> = sc.nrp.iter().filter(|r| r.node == id).collect();
            if !mine.is_empty() {
                let burst = |r: &NrpSpec| r.burst.unwrap_or(DEFAULT_BURST_PACKETS * max_size);
                let default = mine
                    .iter()
                    .find(|r| r.selector.is_none())
                    .map_or(TokenBucket::new(u64::MAX, u64::MAX), |r| {
                        TokenBucket::new(r.rate, burst(r))
                    });
                let mut meters = MeterState::new(default);
                for r in mine.iter().filter(|r| r.selector.is_some()) {
                    meters = meters.with_meter(r.selector.unwrap_or(0), TokenBucket::new(r.rate, burst(r)));
                }
                n.registry = ActionRegistry::standard(Some(meters));
            }
        }
        nodes.push(n);
    }
    for r in &sc.nrp {
        if !index.contains_key(&r.node) {
            return Err(invalid(r.line, "nrp", format!("unknown node {}", r.node)));
        }
    }
    Ok((nodes, index))
}

fn node_idx(index: &BTreeMap<NodeId, usize>, id: &NodeId, line: usize, what: &str) -> Result<usize, SimError> {
    index
        .get(id)
        .copied()
        .ok_or_else(|| invalid(line, what, format!("unknown node {id}")))
}

pub fn run_scenario(sc: &Scenario) -> Result<SimReport, SimError> {
    let (mut nodes, index) = build_nodes(sc)?;

    let mut links: BTreeMap<(usize, usize), Link> = BTreeMap::new();
    for l in &sc.links {
        let a = node_idx(&index, &l.a, l.line, "links")?;
        let b = node_idx(&index, &l.b, l.line, "links")?;
        for key in [(a, b), (b, a)] {
            links.insert(
                key,
                Link {
                    capacity: l.capacity,
                    up: l.up,
                },
            );
        }
        if !l.up {
            nodes[a].failed_links.insert(l.b.clone());
            nodes[b].failed_links.insert(l.a.clone());
        }
    }
    let has_link = |a: usize, b: usize| links.contains_key(&(a, b));

    for t in &sc.tunnels {
        let at = node_idx(&index, &t.at, t.line, "tunnels")?;
        let via = node_idx(&index, &t.tunnel.next_hop, t.line, "tunnels")?;
        let protects = node_idx(&index, &t.protects, t.line, "tunnels")?;
        if !has_link(at, protects) || !has_link(at, via) {
            return Err(invalid(t.line, "tunnels", "backup tunnel references a missing link"));
        }
        nodes[at].backups.insert(t.protects.clone(), t.tunnel.clone());
    }

    let mut routes: BTreeMap<(usize, u32), (Route, usize)> = BTreeMap::new();
    let mut add_route = |node: usize, label: u32, route: Route, line: usize| -> Result<(), SimError> {
        if let Some((prev, _)) = routes.get(&(node, label)) {
            if *prev != route {
                return Err(invalid(line, "routes", format!("conflicting routes for label {label}")));
            }
        }
        routes.insert((node, label), (route, line));
        Ok(())
    };
    for r in &sc.routes {
        let n = node_idx(&index, &r.node, r.line, "routes")?;
        add_route(n, r.label, r.route.clone(), r.line)?;
    }
    for p in &sc.paths {
        let hops = &p.path.hops;
        let idx: Vec<usize> = hops
            .iter()
            .map(|h| node_idx(&index, &h.node, p.line, &p.name))
            .collect::<Result<_, _>>()?;
        if !p.auto_routes {
            continue;
        }
        for (i, h) in hops.iter().enumerate() {
            let route = if i + 1 == hops.len() {
                Route::Deliver
            } else {
                if !has_link(idx[i], idx[i + 1]) {
                    return Err(invalid(
                        p.line,
                        &p.name,
                        format!("no link {} - {}", h.node, hops[i + 1].node),
                    ));
                }
                Route::PopAndForward {
                    next_hop: hops[i + 1].node.clone(),
                    php: (p.path.php || sc.options.php) && i + 2 == hops.len(),
                }
            };
            add_route(idx[i], h.label, route, p.line)?;
        }
    }
    for ((n, label), (route, line)) in routes {
        match &route {
            Route::Swap { next_hop, .. } | Route::PopAndForward { next_hop, .. } => {
                let to = node_idx(&index, next_hop, line, "routes")?;
                if !has_link(n, to) {
                    return Err(invalid(line, "routes", format!("no link {} - {next_hop}", nodes[n].id)));
                }
            }
            _ => {}
        }
        nodes[n]
            .table
            .insert(label, route)
            .map_err(|e| invalid(line, "routes", e))?;
    }

    let caps = sc.caps();
    let codec = Codec {
        strict: sc.options.strict,
        ..Codec::default()
    };
    let mut runs = Vec::with_capacity(sc.streams.len());
    for s in &sc.streams {
        let p = sc
            .path(&s.path)
            .ok_or_else(|| invalid(s.line, &s.name, format!("unknown path {}", s.path)))?;
        if s.rate.is_nan() || s.rate <= 0.0 || !s.rate.is_finite() {
            return Err(invalid(s.line, &s.name, "rate must be positive"));
        }
        let mut path = p.path.clone();
        path.php |= sc.options.php;
        let mut templates: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
        for color in [Color::A, Color::B] {
            let reqs = sc.stream_requests(s, color)?;
            let stack = compose_stack(&path, &reqs, &caps).map_err(|e| invalid(s.line, &s.name, e))?;
            let report = validate_stack(&stack, &path, &caps).map_err(|e| invalid(s.line, &s.name, e))?;
            if let Some(issue) = report.issues.first() {
                return Err(invalid(s.line, &s.name, format!("{issue:?}")));
            }
            templates[color.bit() as usize] = codec
                .encode_words(&stack)
                .map_err(|e| invalid(s.line, &s.name, e))?;
        }
        let amm_nodes = (Scenario::has_amm(s) && p.auto_routes)
            .then(|| path.hops.iter().map(|h| h.node.clone()).collect());
        runs.push(StreamRun {
            entry: index[&path.hops[0].node],
            templates,
            amm_nodes,
            acc: 0.0,
            sent: 0,
            color: Color::A,
        });
    }

    let mut report = SimReport {
        schema_version: REPORT_SCHEMA_VERSION,
        scenario: sc.name.clone(),
        seed: sc.seed,
        ticks: sc.ticks,
        streams: BTreeMap::new(),
        amm: BTreeMap::new(),
        actions: BTreeMap::new(),
        hop_histogram: BTreeMap::new(),
        exports: 0,
        immutable_violations: 0,
        hbh_unreadable: BTreeMap::new(),
    };
    let mut stream_reports: Vec<StreamReport> = sc
        .streams
        .iter()
        .map(|s| StreamReport {
            segment_drops: vec![0; sc.path(&s.path).map_or(0, |p| p.path.hops.len()) + 1],
            ..StreamReport::default()
        })
        .collect();
    let mut action_counts: Vec<BTreeMap<u8, u64>> = vec![BTreeMap::new(); nodes.len()];
    let mut collector = Collector::new();
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    let mut used: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut batch: Vec<Pending> = Vec::new();

    for tick in 0..sc.ticks {
        batch.clear();
        used.clear();
        for (si, (s, run)) in sc.streams.iter().zip(runs.iter_mut()).enumerate() {
            if tick < s.start {
                continue;
            }
            if let Some(ColorSchedule::Ticks(period)) = s.color {
                if period > 0 && tick > s.start && (tick - s.start) % period == 0 {
                    run.color = run.color.flip();
                }
            }
            run.acc += s.rate;
            while run.acc >= 1.0 {
                if s.count.is_some_and(|c| run.sent >= c) {
                    run.acc = 0.0;
                    break;
                }
                run.acc -= 1.0;
                if let Some(ColorSchedule::Packets(n)) = s.color {
                    if n > 0 && run.sent > 0 && run.sent % n == 0 {
                        run.color = run.color.flip();
                    }
                }
                run.sent += 1;
                batch.push(Pending {
                    stream: si,
                    words: run.templates[run.color.bit() as usize].clone(),
                });
            }
        }
        batch.shuffle(&mut rng);

        for pending in batch.drain(..) {
            let s = &sc.streams[pending.stream];
            let sr = &mut stream_reports[pending.stream];
            sr.sent += 1;
            let mut pkt = Packet::from_words(pending.words, s.pkt_size, s.flow_id as u64);
            let mut at = runs[pending.stream].entry;
            let mut amm_counts = 0usize;
            let mut reroutes = 0u32;
            let outcome = loop {
                let d = nodes[at].process_packet(&mut pkt, tick);
                for &(_, op) in &d.executed {
                    *action_counts[at].entry(op).or_default() += 1;
                    if op == opcode::AMM {
                        amm_counts += 1;
                    }
                }
                for rec in &d.exports {
                    collector.push(rec);
                }
                if !d.immutable_ok {
                    report.immutable_violations += 1;
                }
                if d.rerouted {
                    reroutes += 1;
                }
                match d.verdict {
                    Verdict::Delivered => break None,
                    Verdict::Dropped(c) => break Some(c),
                    Verdict::Forward(next) => {
                        let Some(&to) = index.get(&next) else {
                            break Some(DropCause::NoRoute);
                        };
                        let Some(link) = links.get(&(at, to)) else {
                            break Some(DropCause::NoRoute);
                        };
                        if !link.up {
                            break Some(DropCause::NoRoute);
                        }
                        if let Some(cap) = link.capacity {
                            let u = used.entry((at, to)).or_default();
                            if *u + s.pkt_size > cap {
                                break Some(DropCause::Congestion);
                            }
                            *u += s.pkt_size;
                        }
                        at = to;
                    }
                }
            };
            *report.hop_histogram.entry(pkt.hops).or_default() += 1;
            sr.max_reroutes = sr.max_reroutes.max(reroutes);
            match outcome {
                None => sr.received += 1,
                Some(c) => {
                    *sr.drops.entry(c).or_default() += 1;
                    if sr.segment_drops.len() <= amm_counts {
                        sr.segment_drops.resize(amm_counts + 1, 0);
                    }
                    sr.segment_drops[amm_counts] += 1;
                }
            }
        }
    }

    for n in &nodes {
        if let Some(amm) = n.registry.amm() {
            for rec in amm.state.flush(&n.id, sc.ticks) {
                collector.push(&rec);
            }
            if !amm.state.flows.is_empty() {
                report.amm.insert(n.id.clone(), amm.state.flows.clone());
            }
        }
        if n.hbh_unreadable > 0 {
            report.hbh_unreadable.insert(n.id.clone(), n.hbh_unreadable);
        }
    }
    for (n, counts) in nodes.iter().zip(&action_counts) {
        if !counts.is_empty() {
            report.actions.insert(
                n.id.clone(),
                counts
                    .iter()
                    .map(|(&op, &c)| (opcode::name(op).to_string(), c))
                    .collect(),
            );
        }
    }
    report.exports = collector.records_received();

    for ((s, run), mut sr) in sc.streams.iter().zip(&runs).zip(stream_reports) {
        sr.loss = if sr.sent == 0 {
            0.0
        } else {
            sr.dropped() as f64 / sr.sent as f64
        };
        if let Some(path) = &run.amm_nodes {
            match collector.link_loss(s.flow_id, sr.sent, path) {
                Ok(l) => sr.link_loss = Some(l),
                Err(e) => sr.collector_error = Some(e.to_string()),
            }
        }
        report.streams.insert(s.name.clone(), sr);
    }
    Ok(report)
}
