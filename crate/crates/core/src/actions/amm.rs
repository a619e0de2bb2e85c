// SPDX-License-Identifier: Apache-2.0

//! Alternate-marking loss measurement.

use std::any::Any;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{opcode, ActionContext, ActionError, Effect, Invocation, NetworkAction};
use crate::codec::FormatC;
use crate::NodeId;

pub const FLOW_ID_BITS: u32 = 18;
pub const FLOW_ID_MAX: u32 = (1 << FLOW_ID_BITS) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    A,
    B,
}

impl Color {
    /// Loss-bit value: A = 0, B = 1.
    pub fn from_bit(bit: bool) -> Color {
        if bit {
            Color::B
        } else {
            Color::A
        }
    }

    pub fn bit(self) -> bool {
        self == Color::B
    }

    pub fn flip(self) -> Color {
        Color::from_bit(!self.bit())
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::A => "a",
            Color::B => "b",
        })
    }
}

/// data(20) = flow_id(18) | L | D
pub fn amm_encode(flow_id: u32, loss: bool, delay: bool) -> Result<FormatC, ActionError> {
    if flow_id > FLOW_ID_MAX {
        return Err(ActionError::Range {
            field: "flow_id",
            value: flow_id as u64,
            max: FLOW_ID_MAX as u64,
        });
    }
    let data = (flow_id << 2) | ((loss as u32) << 1) | delay as u32;
    Ok(FormatC::new(opcode::AMM, data, 0))
}

/// Returns (flow_id, loss bit, delay bit).
pub fn amm_decode(data: u32) -> (u32, bool, bool) {
    ((data >> 2) & FLOW_ID_MAX, data & 0b10 != 0, data & 1 != 0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowCounters {
    pub n_a: u64,
    pub n_b: u64,
    pub last: Option<Color>,
}

impl FlowCounters {
    pub fn total(&self) -> u64 {
        self.n_a + self.n_b
    }

    pub fn get(&self, c: Color) -> u64 {
        match c {
            Color::A => self.n_a,
            Color::B => self.n_b,
        }
    }
}

/// Per-flow counters of one node.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmmState {
    pub flows: BTreeMap<u32, FlowCounters>,
}

impl AmmState {
    /// Counts one packet; on a color change returns the previous color's counter.
    pub fn process(&mut self, node: &NodeId, data: u32, now: u64) -> Option<ExportRecord> {
        let (flow_id, l, _) = amm_decode(data);
        let color = Color::from_bit(l);
        let fc = self.flows.entry(flow_id).or_default();
        match color {
            Color::A => fc.n_a += 1,
            Color::B => fc.n_b += 1,
        }
        let prev = fc.last.replace(color);
        match prev {
            Some(p) if p != color => Some(ExportRecord {
                node: node.clone(),
                flow_id,
                color: p,
                counter: fc.get(p),
                timestamp: now,
            }),
            _ => None,
        }
    }

    /// End-of-measurement readout of both counters of every flow.
    pub fn flush(&self, node: &NodeId, now: u64) -> Vec<ExportRecord> {
        let mut out = Vec::with_capacity(2 * self.flows.len());
        for (&flow_id, fc) in &self.flows {
            for color in [Color::A, Color::B] {
                out.push(ExportRecord {
                    node: node.clone(),
                    flow_id,
                    color,
                    counter: fc.get(color),
                    timestamp: now,
                });
            }
        }
        out
    }
}

#[derive(Debug, Default)]
pub struct AmmAction {
    pub state: AmmState,
}

impl NetworkAction for AmmAction {
    fn name(&self) -> &'static str {
        "amm"
    }

    fn execute(&mut self, inv: &mut Invocation<'_>, ctx: &mut ActionContext<'_>) {
        if let Some(rec) = self.state.process(ctx.node, inv.data, ctx.now) {
            ctx.effects.push(Effect::Export(rec));
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn as_any_mut(&mut self) -> &mut dyn Any {
        self
    }
}

/// Counter export sent to the collector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportRecord {
    pub node: NodeId,
    pub flow_id: u32,
    pub color: Color,
    pub counter: u64,
    pub timestamp: u64,
}

impl fmt::Display for ExportRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{}",
            self.node, self.flow_id, self.color, self.counter, self.timestamp
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportParseError {
    #[error("expected 5 comma-separated fields, found {0}")]
    FieldCount(usize),
    #[error("empty node id")]
    EmptyNode,
    #[error("invalid {field}: {value:?}")]
    Invalid { field: &'static str, value: String },
}

impl FromStr for ExportRecord {
    type Err = ExportParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(ExportParseError::FieldCount(parts.len()));
        }
        if parts[0].is_empty() {
            return Err(ExportParseError::EmptyNode);
        }
        let invalid = |field, value: &str| ExportParseError::Invalid {
            field,
            value: value.to_string(),
        };
        let flow_id: u32 = parts[1].parse().map_err(|_| invalid("flow_id", parts[1]))?;
        if flow_id > FLOW_ID_MAX {
            return Err(invalid("flow_id", parts[1]));
        }
        let color = match parts[2] {
            "a" => Color::A,
            "b" => Color::B,
            other => return Err(invalid("color", other)),
        };
        Ok(ExportRecord {
            node: NodeId::new(parts[0]),
            flow_id,
            color,
            counter: parts[3].parse().map_err(|_| invalid("counter", parts[3]))?,
            timestamp: parts[4].parse().map_err(|_| invalid("timestamp", parts[4]))?,
        })
    }
}
