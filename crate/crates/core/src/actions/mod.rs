// SPDX-License-Identifier: Apache-2.0

//! Network action registry and the concrete actions.
//!
//! Every node owns one [`ActionRegistry`]; handlers keep their per-node
//! state (AMM counters, meters) inside themselves, so nothing is shared
//! across nodes.

mod amm;
mod dummy;
mod nffrr;
mod nrp;

use std::any::Any;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::codec::{FormatD, Scope};
use crate::NodeId;

pub use amm::{
    amm_decode, amm_encode, AmmAction, AmmState, Color, ExportParseError, ExportRecord, FlowCounters,
    FLOW_ID_MAX,
};
pub use dummy::{dummy_process, DummyAction};
pub use nffrr::{nffrr_data, nffrr_process, NffrrAction};
pub use nrp::{nrp_process, MeterState, MeterVerdict, NrpAction, TokenBucket, DEFAULT_BURST_PACKETS};

/// Opcode assignments. Placeholders until IANA allocates real values.
pub mod opcode {
    pub const NOOP: u8 = 1;
    pub const NFFRR: u8 = 2;
    pub const AMM: u8 = 3;
    pub const NRP: u8 = 4;
    pub const DUMMY: u8 = 5;

    /// Opcodes are 7 bits wide.
    pub const LIMIT: u16 = 128;

    pub fn name(op: u8) -> &'static str {
        match op {
            NOOP => "noop",
            NFFRR => "nffrr",
            AMM => "amm",
            NRP => "nrp",
            DUMMY => "dummy",
            _ => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("opcode {0} is outside the 7-bit opcode space")]
    OpcodeRange(u16),
    #[error("opcode {0} is already registered")]
    Duplicate(u8),
    #[error("{field}={value} exceeds {max}")]
    Range {
        field: &'static str,
        value: u64,
        max: u64,
    },
}

/// One dispatched network action.
pub struct Invocation<'a> {
    pub scope: Scope,
    pub opcode: u8,
    /// Inline data of the opcode LSE (13 bits for B, 20 bits for C).
    pub data: u32,
    /// The action's ancillary-data LSEs; handlers may rewrite mutable bits.
    pub ad: &'a mut [FormatD],
}

/// Side effects an action asks the engine to apply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Effect {
    Export(ExportRecord),
    /// Packet carries the "already rerouted" mark.
    MarkRerouted,
    MeterPassed { selector: u16 },
    MeterExceeded { selector: Option<u16> },
}

/// Packet-side context handed to every action of one NAS execution.
#[derive(Debug)]
pub struct ActionContext<'a> {
    pub node: &'a NodeId,
    pub now: u64,
    /// Packet size in capacity units.
    pub pkt_size: u64,
    pub effects: Vec<Effect>,
}

impl<'a> ActionContext<'a> {
    pub fn new(node: &'a NodeId, now: u64, pkt_size: u64) -> Self {
        ActionContext {
            node,
            now,
            pkt_size,
            effects: Vec::new(),
        }
    }
}

pub trait NetworkAction: Send {
    fn name(&self) -> &'static str;

    fn execute(&mut self, inv: &mut Invocation<'_>, ctx: &mut ActionContext<'_>);

    fn as_any(&self) -> &dyn Any;

    fn as_any_mut(&mut self) -> &mut dyn Any;
}

#[derive(Default)]
pub struct ActionRegistry {
    handlers: BTreeMap<u8, Box<dyn NetworkAction>>,
    executions: BTreeMap<u8, u64>,
}

impl std::fmt::Debug for ActionRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map()
            .entries(self.handlers.iter().map(|(op, h)| (op, h.name())))
            .finish()
    }
}

impl ActionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// NOOP, NFFRR, AMM, NRP (metering with `meters`, if any) and DUMMY.
    pub fn standard(meters: Option<MeterState>) -> Self {
        let mut r = ActionRegistry::new();
        let std: [(u8, Box<dyn NetworkAction>); 5] = [
            (opcode::NOOP, Box::new(NoopAction)),
            (opcode::NFFRR, Box::new(NffrrAction)),
            (opcode::AMM, Box::new(AmmAction::default())),
            (opcode::NRP, Box::new(NrpAction::new(meters))),
            (opcode::DUMMY, Box::new(DummyAction::default())),
        ];
        for (op, h) in std {
            r.register(op as u16, h).expect("standard opcodes are distinct");
        }
        r
    }

    pub fn register(&mut self, op: u16, handler: Box<dyn NetworkAction>) -> Result<(), ActionError> {
        if op >= opcode::LIMIT {
            return Err(ActionError::OpcodeRange(op));
        }
        let op = op as u8;
        if self.handlers.contains_key(&op) {
            return Err(ActionError::Duplicate(op));
        }
        self.handlers.insert(op, handler);
        Ok(())
    }

    pub fn is_registered(&self, op: u8) -> bool {
        self.handlers.contains_key(&op)
    }

    /// Runs the handler for `inv.opcode`; `false` if none is registered.
    pub fn dispatch(&mut self, inv: &mut Invocation<'_>, ctx: &mut ActionContext<'_>) -> bool {
        match self.handlers.get_mut(&inv.opcode) {
            Some(h) => {
                h.execute(inv, ctx);
                *self.executions.entry(inv.opcode).or_default() += 1;
                true
            }
            None => false,
        }
    }

    /// Executions per opcode.
    pub fn executions(&self) -> &BTreeMap<u8, u64> {
        &self.executions
    }

    pub fn get<T: 'static>(&self, op: u8) -> Option<&T> {
        self.handlers.get(&op)?.as_any().downcast_ref()
    }

    pub fn get_mut<T: 'static>(&mut self, op: u8) -> Option<&mut T> {
        self.handlers.get_mut(&op)?.as_any_mut().downcast_mut()
    }

    pub fn amm(&self) -> Option<&AmmAction> {
        self.get(opcode::AMM)
    }

    pub fn amm_mut(&mut self) -> Option<&mut AmmAction> {
        self.get_mut(opcode::AMM)
    }

    pub fn nrp_mut(&mut self) -> Option<&mut NrpAction> {
        self.get_mut(opcode::NRP)
    }
}

/// Does nothing; fills the initial opcode slot when the first real action
/// needs more inline data than Format B offers.
#[derive(Debug, Default)]
pub struct NoopAction;

impl NetworkAction for NoopAction {
    fn name(&self) -> &'static str {
        "noop"
    }

    fn execute(&mut self, _: &mut Invocation<'_>, _: &mut ActionContext<'_>) {}

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn as_any_mut(&mut self) -> &mut dyn Any {
        self
    }
}
