// SPDX-License-Identifier: Apache-2.0

//! Ingress stack construction under readable-label-depth limits.
//!
//! A path of `n` nodes carries forwarding labels `L1..Ln`; node `Ri` pops
//! `Li`. Below each label the composer lays out one segment:
//!
//! ```text
//! Li | select NAS for Ri | HBH copy (optional)
//! ```
//!
//! and the I2E NAS goes after the last segment. A node's RLD is counted from
//! the label it receives, so node `Ri` can read a copy below `Lk` (k ≥ i)
//! when every LSE from `Li` down to the end of that copy fits in its RLD.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::opcode;
use crate::codec::{FormatB, LabelStack, Nas, Scope, StackEntry, MAX_NAL, MAX_NASL};
use crate::NodeId;

/// Lowest non-reserved label value.
pub const FIRST_UNRESERVED_LABEL: u32 = 16;

/// Largest NAS, in LSEs.
pub const MAX_NAS_SIZE: usize = MAX_NASL + 2;

/// Signaled per-node limits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCapabilities {
    pub node: NodeId,
    pub rld: usize,
    pub max_select_nas: usize,
    pub max_hbh_nas: usize,
}

impl NodeCapabilities {
    pub fn new(node: &str, rld: usize) -> Self {
        NodeCapabilities {
            node: NodeId::new(node),
            rld,
            max_select_nas: MAX_NAS_SIZE,
            max_hbh_nas: MAX_NAS_SIZE,
        }
    }

    pub fn with_max_nas(mut self, select: usize, hbh: usize) -> Self {
        self.max_select_nas = select;
        self.max_hbh_nas = hbh;
        self
    }

    pub fn in_between_capacity(&self) -> i64 {
        in_between_capacity(self.rld as i64, self.max_select_nas as i64, self.max_hbh_nas as i64)
    }
}

/// Size of the stack a node can parse between a maximum select NAS and a
/// maximum HBH NAS. Negative means the node cannot take part in MNA.
pub fn in_between_capacity(rld: i64, max_select: i64, max_hbh: i64) -> i64 {
    rld - max_select - max_hbh - 1
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RequestScope {
    Select(NodeId),
    Hbh,
    I2e,
}

impl RequestScope {
    pub fn scope(&self) -> Scope {
        match self {
            RequestScope::Select(_) => Scope::Select,
            RequestScope::Hbh => Scope::Hbh,
            RequestScope::I2e => Scope::I2e,
        }
    }
}

/// One network action to embed: opcode, inline data and AD payloads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpec {
    pub opcode: u8,
    pub data: u32,
    pub ad: Vec<u32>,
}

impl ActionSpec {
    pub fn new(opcode: u8, data: u32) -> Self {
        ActionSpec {
            opcode,
            data,
            ad: Vec::new(),
        }
    }

    pub fn with_ad(mut self, ad: Vec<u32>) -> Self {
        self.ad = ad;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NasRequest {
    pub scope: RequestScope,
    pub actions: Vec<ActionSpec>,
}

impl NasRequest {
    pub fn new(scope: RequestScope, actions: Vec<ActionSpec>) -> Self {
        NasRequest { scope, actions }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathHop {
    pub node: NodeId,
    pub label: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSpec {
    pub hops: Vec<PathHop>,
    pub php: bool,
    /// TTL written into every forwarding label.
    pub ttl: u8,
}

impl PathSpec {
    pub fn new(hops: &[(&str, u32)]) -> Self {
        PathSpec {
            hops: hops
                .iter()
                .map(|&(n, l)| PathHop {
                    node: NodeId::new(n),
                    label: l,
                })
                .collect(),
            php: false,
            ttl: 64,
        }
    }

    pub fn with_php(mut self, php: bool) -> Self {
        self.php = php;
        self
    }

    fn index_of(&self, node: &NodeId) -> Option<usize> {
        self.hops.iter().position(|h| &h.node == node)
    }
}

/// How NAS entries count against a node's RLD.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthCounting {
    /// Every LSE counts.
    #[default]
    Lses,
    /// A whole NAS counts as one entry.
    NasAsSingleEntry,
}

impl DepthCounting {
    pub fn size(self, e: &StackEntry) -> usize {
        match (self, e) {
            (_, StackEntry::Forwarding(_)) => 1,
            (DepthCounting::Lses, StackEntry::Nas(n)) => n.lse_count(),
            (DepthCounting::NasAsSingleEntry, StackEntry::Nas(_)) => 1,
        }
    }

    fn nas_size(self, nas: &Nas) -> usize {
        match self {
            DepthCounting::Lses => nas.lse_count(),
            DepthCounting::NasAsSingleEntry => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("path is empty")]
    EmptyPath,
    #[error("no capabilities for node {0}")]
    UnknownNode(NodeId),
    #[error("label {label} at hop {hop} is reserved (< 16)")]
    ReservedLabel { hop: usize, label: u32 },
    #[error("select target {0} is not on the path")]
    TargetNotOnPath(NodeId),
    #[error("invalid {scope} request: {reason}")]
    InvalidRequest { scope: Scope, reason: String },
    #[error("node {node}: needs {required} readable LSEs, has {available}")]
    CapacityExceeded {
        node: NodeId,
        required: usize,
        available: usize,
    },
    #[error("node {node}: {scope} NAS of {size} LSEs exceeds cap {cap}")]
    NasTooLarge {
        node: NodeId,
        scope: Scope,
        size: usize,
        cap: usize,
    },
}

/// Renders actions into one NAS. A first action whose inline data does not
/// fit Format B is preceded by a NOOP.
pub fn render_nas(scope: Scope, actions: &[ActionSpec]) -> Result<Nas, ComposeError> {
    let invalid = |reason: String| ComposeError::InvalidRequest { scope, reason };
    let Some(first) = actions.first() else {
        return Err(invalid("no actions".into()));
    };
    for a in actions {
        if a.opcode as u16 >= opcode::LIMIT {
            return Err(invalid(format!("opcode {} out of range", a.opcode)));
        }
        if a.data >= 1 << 20 {
            return Err(invalid(format!("inline data {:#x} exceeds 20 bits", a.data)));
        }
        if a.ad.len() > MAX_NAL as usize {
            return Err(invalid(format!("{} AD LSEs exceed NAL limit", a.ad.len())));
        }
        if let Some(v) = a.ad.iter().find(|&&v| v >= 1 << 30) {
            return Err(invalid(format!("AD value {v:#x} exceeds 30 bits")));
        }
    }
    let (mut nas, tail) = if first.data < 1 << 13 {
        let mut nas = Nas::new(FormatB::new(first.opcode, first.data as u16, scope));
        for &v in &first.ad {
            nas.push_ad(v);
        }
        (nas, &actions[1..])
    } else {
        (Nas::new(FormatB::new(opcode::NOOP, 0, scope)), actions)
    };
    for a in tail {
        if nas.rest.len() + 1 + a.ad.len() > MAX_NASL {
            return Err(invalid(format!(
                "more than {MAX_NASL} LSEs after the initial opcode"
            )));
        }
        nas.push_action(a.opcode, a.data);
        for &v in &a.ad {
            nas.push_ad(v);
        }
    }
    Ok(nas)
}

fn caps_for<'a>(
    caps: &'a BTreeMap<NodeId, NodeCapabilities>,
    node: &NodeId,
) -> Result<&'a NodeCapabilities, ComposeError> {
    caps.get(node)
        .ok_or_else(|| ComposeError::UnknownNode(node.clone()))
}

struct Layout {
    select: Vec<Option<Nas>>,
    hbh: Option<Nas>,
    i2e: Option<Nas>,
}

fn merge(requests: &[NasRequest], path: &PathSpec) -> Result<Layout, ComposeError> {
    let n = path.hops.len();
    let mut select: Vec<Vec<ActionSpec>> = vec![Vec::new(); n];
    let mut hbh = Vec::new();
    let mut i2e = Vec::new();
    for r in requests {
        match &r.scope {
            RequestScope::Select(t) => {
                let i = path
                    .index_of(t)
                    .ok_or_else(|| ComposeError::TargetNotOnPath(t.clone()))?;
                select[i].extend(r.actions.iter().cloned());
            }
            RequestScope::Hbh => hbh.extend(r.actions.iter().cloned()),
            RequestScope::I2e => i2e.extend(r.actions.iter().cloned()),
        }
    }
    let render = |scope, a: &[ActionSpec]| -> Result<Option<Nas>, ComposeError> {
        if a.is_empty() {
            Ok(None)
        } else {
            render_nas(scope, a).map(Some)
        }
    };
    Ok(Layout {
        select: select
            .iter()
            .map(|a| render(Scope::Select, a))
            .collect::<Result<_, _>>()?,
        hbh: render(Scope::Hbh, &hbh)?,
        i2e: render(Scope::I2e, &i2e)?,
    })
}

/// Minimum set of copy positions (path indices), preferring deep positions.
/// `sees(i, k)`: node `i` can read a copy placed below `Lk`.
fn place_copies(n: usize, sees: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    // best[k]: fewest copies at positions ≥ k given a copy at k, with the
    // deepest choice for the next copy.
    let mut best: Vec<Option<(usize, Option<usize>)>> = vec![None; n];
    best[n - 1] = Some((1, None));
    for k in (0..n - 1).rev() {
        let mut pick: Option<(usize, usize)> = None;
        for next in (k + 1..n).rev() {
            let Some((cost, _)) = best[next] else { continue };
            if !(k + 1..=next).all(|i| sees(i, next)) {
                continue;
            }
            if pick.is_none_or(|(c, _)| cost < c) {
                pick = Some((cost, next));
            }
        }
        best[k] = pick.map(|(c, next)| (c + 1, Some(next)));
    }
    let mut first: Option<(usize, usize)> = None;
    for j in (0..n).rev() {
        let Some((cost, _)) = best[j] else { continue };
        if !(0..=j).all(|i| sees(i, j)) {
            continue;
        }
        if first.is_none_or(|(c, _)| cost < c) {
            first = Some((cost, j));
        }
    }
    let (_, mut at) = first?;
    let mut out = vec![at];
    while let Some((_, Some(next))) = best[at] {
        out.push(next);
        at = next;
    }
    Some(out)
}

pub fn compose_stack(
    path: &PathSpec,
    requests: &[NasRequest],
    caps: &BTreeMap<NodeId, NodeCapabilities>,
) -> Result<LabelStack, ComposeError> {
    compose_stack_with(path, requests, caps, DepthCounting::Lses)
}

pub fn compose_stack_with(
    path: &PathSpec,
    requests: &[NasRequest],
    caps: &BTreeMap<NodeId, NodeCapabilities>,
    mode: DepthCounting,
) -> Result<LabelStack, ComposeError> {
    let n = path.hops.len();
    if n == 0 {
        return Err(ComposeError::EmptyPath);
    }
    let node_caps: Vec<&NodeCapabilities> = path
        .hops
        .iter()
        .map(|h| caps_for(caps, &h.node))
        .collect::<Result<_, _>>()?;
    for (hop, h) in path.hops.iter().enumerate() {
        if h.label < FIRST_UNRESERVED_LABEL {
            return Err(ComposeError::ReservedLabel {
                hop,
                label: h.label,
            });
        }
    }
    let layout = merge(requests, path)?;

    let too_large = |c: &NodeCapabilities, scope, size, cap| {
        (size > cap).then(|| ComposeError::NasTooLarge {
            node: c.node.clone(),
            scope,
            size,
            cap,
        })
    };
    for (c, sel) in node_caps.iter().zip(&layout.select) {
        if let Some(s) = sel {
            if let Some(e) = too_large(c, Scope::Select, s.lse_count(), c.max_select_nas) {
                return Err(e);
            }
        }
        if let Some(h) = &layout.hbh {
            if let Some(e) = too_large(c, Scope::Hbh, h.lse_count(), c.max_hbh_nas) {
                return Err(e);
            }
        }
    }

    // Depth of the end of segment k's select NAS as seen from node i.
    let seg: Vec<usize> = layout
        .select
        .iter()
        .map(|s| 1 + s.as_ref().map_or(0, |s| mode.nas_size(s)))
        .collect();
    let php_skip = |i: usize| usize::from(path.php && i == n - 1 && n > 1);
    let reach = |i: usize, k: usize| seg[i..=k].iter().sum::<usize>() - php_skip(i);
    let fail = |i: usize, required: usize| ComposeError::CapacityExceeded {
        node: node_caps[i].node.clone(),
        required,
        available: node_caps[i].rld,
    };

    for (i, c) in node_caps.iter().enumerate() {
        if layout.select[i].is_some() && reach(i, i) > c.rld {
            return Err(fail(i, reach(i, i)));
        }
    }

    let copies = match &layout.hbh {
        None => Vec::new(),
        Some(h) => {
            let hs = mode.nas_size(h);
            let sees = |i: usize, k: usize| reach(i, k) + hs <= node_caps[i].rld;
            if let Some(i) = (0..n).find(|&i| !sees(i, i)) {
                return Err(fail(i, reach(i, i) + hs));
            }
            place_copies(n, sees).expect("a copy below every label is always feasible")
        }
    };

    if let Some(e) = &layout.i2e {
        let last = n - 1;
        let hs = layout.hbh.as_ref().map_or(0, |h| mode.nas_size(h));
        let required = reach(last, last) + hs + mode.nas_size(e);
        if required > node_caps[last].rld {
            return Err(fail(last, required));
        }
    }

    let mut stack = LabelStack::new();
    for (k, hop) in path.hops.iter().enumerate() {
        stack.push_label(hop.label, path.ttl);
        if let Some(s) = &layout.select[k] {
            stack.push_nas(s.clone());
        }
        if copies.contains(&k) {
            stack.push_nas(layout.hbh.clone().expect("copies imply an HBH NAS"));
        }
    }
    if let Some(e) = layout.i2e {
        stack.push_nas(e);
    }
    stack.seal();
    log::debug!("composed {} LSEs, HBH copies below hops {copies:?}", stack.lse_count());
    Ok(stack)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    /// The forwarding label on top does not match the path.
    LabelMismatch { expected: u32, found: Option<u32> },
    /// The stack carries HBH NAS, but none is left for this node.
    HbhMissing,
    NasOutOfRld { scope: Scope, depth: usize, rld: usize },
    NasTooLarge { scope: Scope, size: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub node: NodeId,
    pub hop: usize,
    #[serde(flatten)]
    pub kind: IssueKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (hop {}): ", self.node, self.hop + 1)?;
        match &self.kind {
            IssueKind::LabelMismatch { expected, found: Some(l) } => {
                write!(f, "top label {l}, expected {expected}")
            }
            IssueKind::LabelMismatch { expected, found: None } => {
                write!(f, "no forwarding label, expected {expected}")
            }
            IssueKind::HbhMissing => f.write_str("no HBH NAS left in the stack"),
            IssueKind::NasOutOfRld { scope, depth, rld } => {
                write!(f, "{scope} NAS ends at depth {depth}, beyond RLD {rld}")
            }
            IssueKind::NasTooLarge { scope, size, cap } => {
                write!(f, "{scope} NAS has {size} LSEs, node accepts {cap}")
            }
        }
    }
}

pub fn validate_stack(
    stack: &LabelStack,
    path: &PathSpec,
    caps: &BTreeMap<NodeId, NodeCapabilities>,
) -> Result<ValidationReport, ComposeError> {
    validate_stack_with(stack, path, caps, DepthCounting::Lses)
}

/// Replays the per-hop pops and checks every NAS each node should act on.
pub fn validate_stack_with(
    stack: &LabelStack,
    path: &PathSpec,
    caps: &BTreeMap<NodeId, NodeCapabilities>,
    mode: DepthCounting,
) -> Result<ValidationReport, ComposeError> {
    let n = path.hops.len();
    let has_hbh = stack.nases().any(|x| x.scope() == Scope::Hbh);
    let mut report = ValidationReport::default();
    let mut view: &[StackEntry] = &stack.entries;

    for (i, hop) in path.hops.iter().enumerate() {
        let c = caps_for(caps, &hop.node)?;
        let mut issue = |kind| {
            report.issues.push(Issue {
                node: hop.node.clone(),
                hop: i,
                kind,
            })
        };
        let php_popped = path.php && i == n - 1 && n > 1;
        if !php_popped {
            let found = view.first().and_then(StackEntry::as_label).map(|l| l.label);
            if found != Some(hop.label) {
                issue(IssueKind::LabelMismatch {
                    expected: hop.label,
                    found,
                });
                break;
            }
        }

        let mut depth = 0;
        let mut ends = Vec::with_capacity(view.len());
        for e in view {
            depth += mode.size(e);
            ends.push(depth);
        }
        let check = |issue: &mut dyn FnMut(IssueKind), idx: usize, nas: &Nas, cap: usize| {
            if ends[idx] > c.rld {
                issue(IssueKind::NasOutOfRld {
                    scope: nas.scope(),
                    depth: ends[idx],
                    rld: c.rld,
                });
            }
            if nas.lse_count() > cap {
                issue(IssueKind::NasTooLarge {
                    scope: nas.scope(),
                    size: nas.lse_count(),
                    cap,
                });
            }
        };

        let own = usize::from(!php_popped);
        if let Some(sel) = view.get(own).and_then(StackEntry::as_nas) {
            if sel.scope() == Scope::Select {
                check(&mut issue, own, sel, c.max_select_nas);
            }
        }
        if has_hbh {
            match view
                .iter()
                .position(|e| e.as_nas().is_some_and(|x| x.scope() == Scope::Hbh))
            {
                Some(idx) => {
                    let nas = view[idx].as_nas().expect("position matched a NAS");
                    check(&mut issue, idx, nas, c.max_hbh_nas);
                }
                None => issue(IssueKind::HbhMissing),
            }
        }
        if i == n - 1 {
            if let Some(StackEntry::Nas(e)) = view.last() {
                if e.scope() == Scope::I2e {
                    check(&mut issue, view.len() - 1, e, usize::MAX);
                }
            }
        }

        // Pop own label and the NAS it exposes; with PHP the penultimate
        // node also pops the last label but leaves the NAS below it.
        let mut rest = &view[own..];
        while let Some(StackEntry::Nas(x)) = rest.first() {
            if x.scope() == Scope::I2e {
                break;
            }
            rest = &rest[1..];
        }
        if path.php && n > 1 && i == n - 2 {
            if let Some(StackEntry::Forwarding(_)) = rest.first() {
                rest = &rest[1..];
            }
        }
        view = rest;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps(rlds: &[usize]) -> BTreeMap<NodeId, NodeCapabilities> {
        rlds.iter()
            .enumerate()
            .map(|(i, &r)| {
                let c = NodeCapabilities::new(&format!("R{}", i + 1), r);
                (c.node.clone(), c)
            })
            .collect()
    }

    fn path(n: usize) -> PathSpec {
        let names: Vec<String> = (1..=n).map(|i| format!("R{i}")).collect();
        let hops: Vec<(&str, u32)> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), 100 + i as u32))
            .collect();
        PathSpec::new(&hops)
    }

    fn hbh() -> NasRequest {
        NasRequest::new(RequestScope::Hbh, vec![ActionSpec::new(opcode::DUMMY, 0)])
    }

    /// Path index below whose label each HBH copy sits.
    fn copy_positions(s: &LabelStack) -> Vec<usize> {
        let mut hop = 0;
        let mut out = Vec::new();
        for e in &s.entries {
            match e {
                StackEntry::Forwarding(_) => hop += 1,
                StackEntry::Nas(x) if x.scope() == Scope::Hbh => out.push(hop - 1),
                _ => {}
            }
        }
        out
    }

    #[test]
    fn in_between_values() {
        assert_eq!(in_between_capacity(51, 17, 17), 16);
        assert_eq!(in_between_capacity(51, 9, 9), 32);
        assert_eq!(in_between_capacity(35, 17, 17), 0);
        assert_eq!(in_between_capacity(34, 17, 17), -1);
    }

    #[test]
    fn three_hops_rld3_copies_below_l2_and_l3() {
        let p = path(3);
        let c = caps(&[3, 3, 3]);
        let mode = DepthCounting::NasAsSingleEntry;
        let s = compose_stack_with(&p, &[hbh()], &c, mode).unwrap();
        assert_eq!(copy_positions(&s), vec![1, 2]);
        assert!(validate_stack_with(&s, &p, &c, mode).unwrap().is_valid());

        // Without the copy below L2, R1 cannot reach the one below L3.
        let mut cut = s.clone();
        cut.entries.remove(2);
        cut.seal();
        let report = validate_stack_with(&cut, &p, &c, mode).unwrap();
        assert_eq!(report.issues.len(), 1);
        assert_eq!(report.issues[0].node, NodeId::new("R1"));
        assert!(matches!(report.issues[0].kind, IssueKind::NasOutOfRld { depth: 4, rld: 3, .. }));

        // Without the copy below L3, nothing is left for R3.
        let mut cut = s.clone();
        cut.entries.remove(4);
        cut.seal();
        let report = validate_stack_with(&cut, &p, &c, mode).unwrap();
        assert_eq!(report.issues.len(), 1);
        assert_eq!(report.issues[0].kind, IssueKind::HbhMissing);
        assert_eq!(report.issues[0].node, NodeId::new("R3"));
    }

    #[test]
    fn bottom_only_copy_fails_r1() {
        let p = path(3);
        let c = caps(&[3, 3, 3]);
        let mut s = LabelStack::new();
        s.push_label(100, 64).push_label(101, 64).push_label(102, 64);
        s.push_nas(render_nas(Scope::Hbh, &[ActionSpec::new(opcode::DUMMY, 0)]).unwrap());
        s.seal();
        let r = validate_stack_with(&s, &p, &c, DepthCounting::NasAsSingleEntry).unwrap();
        assert_eq!(r.issues.len(), 1);
        assert_eq!(r.issues[0].node, NodeId::new("R1"));
    }

    #[test]
    fn unlimited_rld_single_bottom_copy() {
        let p = path(4);
        let c = caps(&[usize::MAX; 4]);
        let s = compose_stack(&p, &[hbh()], &c).unwrap();
        assert_eq!(copy_positions(&s), vec![3]);
        assert!(matches!(s.entries.last(), Some(StackEntry::Nas(_))));
    }

    #[test]
    fn placement_and_labels() {
        let p = path(3);
        let c = caps(&[usize::MAX; 3]);
        let reqs = [
            NasRequest::new(
                RequestScope::Select(NodeId::new("R2")),
                vec![ActionSpec::new(opcode::NRP, 7)],
            ),
            NasRequest::new(RequestScope::I2e, vec![ActionSpec::new(opcode::DUMMY, 1)]),
            hbh(),
        ];
        let s = compose_stack(&p, &reqs, &c).unwrap();
        let labels: Vec<u32> = s.forwarding_labels().map(|l| l.label).collect();
        assert_eq!(labels, vec![100, 101, 102]);
        assert_eq!(s.entries[2].as_nas().unwrap().scope(), Scope::Select);
        assert_eq!(s.entries.last().unwrap().as_nas().unwrap().scope(), Scope::I2e);
        assert!(validate_stack(&s, &p, &c).unwrap().is_valid());
    }

    #[test]
    fn wide_first_action_gets_noop() {
        let nas = render_nas(Scope::Hbh, &[ActionSpec::new(opcode::AMM, 0xFFFFF)]).unwrap();
        assert_eq!(nas.initial.opcode, opcode::NOOP);
        assert_eq!(nas.actions()[1].data, 0xFFFFF);
        let nas = render_nas(Scope::Hbh, &[ActionSpec::new(opcode::AMM, 0x1FFF)]).unwrap();
        assert_eq!(nas.lse_count(), 2);
    }

    #[test]
    fn errors() {
        let p = path(2);
        let c = caps(&[3, 2]);
        assert_eq!(
            compose_stack(&p, &[hbh()], &c),
            Err(ComposeError::CapacityExceeded {
                node: NodeId::new("R2"),
                required: 3,
                available: 2,
            })
        );

        let big = NasRequest::new(
            RequestScope::Hbh,
            vec![ActionSpec::new(opcode::DUMMY, 0).with_ad(vec![0; 7]),
                 ActionSpec::new(opcode::DUMMY, 0).with_ad(vec![0; 2])],
        );
        let mut c = caps(&[usize::MAX; 2]);
        c.get_mut(&NodeId::new("R2")).unwrap().max_hbh_nas = 9;
        assert_eq!(
            compose_stack(&p, &[big], &c),
            Err(ComposeError::NasTooLarge {
                node: NodeId::new("R2"),
                scope: Scope::Hbh,
                size: 12,
                cap: 9,
            })
        );

        let c = caps(&[usize::MAX; 2]);
        let mut bad = path(2);
        bad.hops[0].label = 3;
        assert!(matches!(
            compose_stack(&bad, &[], &c),
            Err(ComposeError::ReservedLabel { hop: 0, label: 3 })
        ));
        assert!(matches!(
            compose_stack(&path(3), &[], &c),
            Err(ComposeError::UnknownNode(_))
        ));
    }

    #[test]
    fn oversized_nas_reported_by_validator() {
        let p = path(1);
        let mut c = caps(&[usize::MAX]);
        let req = NasRequest::new(
            RequestScope::Hbh,
            vec![ActionSpec::new(opcode::DUMMY, 0).with_ad(vec![0; 7]),
                 ActionSpec::new(opcode::DUMMY, 0).with_ad(vec![0; 2])],
        );
        let s = compose_stack(&p, &[req], &c).unwrap();
        c.get_mut(&NodeId::new("R1")).unwrap().max_hbh_nas = 9;
        let r = validate_stack(&s, &p, &c).unwrap();
        assert_eq!(
            r.issues[0].kind,
            IssueKind::NasTooLarge {
                scope: Scope::Hbh,
                size: 12,
                cap: 9
            }
        );
    }

    #[test]
    fn php_last_node_view() {
        let p = path(3).with_php(true);
        let c = caps(&[usize::MAX, usize::MAX, 2]);
        let s = compose_stack(&p, &[hbh()], &c).unwrap();
        assert!(validate_stack(&s, &p, &c).unwrap().is_valid());
        let no_php = path(3);
        assert!(compose_stack(&no_php, &[hbh()], &c).is_err());
    }
}
