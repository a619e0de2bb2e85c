// SPDX-License-Identifier: Apache-2.0

//! No-further fast reroute marking.

use std::any::Any;

use super::{ActionContext, Effect, Invocation, NetworkAction};

const MARK: u32 = 1;

/// Inline data of an NFFRR action.
pub fn nffrr_data(marked: bool) -> u16 {
    marked as u16
}

/// Whether the action's inline data carries the reroute mark.
pub fn nffrr_process(data: u32) -> bool {
    data & MARK != 0
}

#[derive(Debug, Default)]
pub struct NffrrAction;

impl NetworkAction for NffrrAction {
    fn name(&self) -> &'static str {
        "nffrr"
    }

    fn execute(&mut self, inv: &mut Invocation<'_>, ctx: &mut ActionContext<'_>) {
        if nffrr_process(inv.data) {
            ctx.effects.push(Effect::MarkRerouted);
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn as_any_mut(&mut self) -> &mut dyn Any {
        self
    }
}
