// SPDX-License-Identifier: Apache-2.0

//! Stress action that scribbles over the mutable bits of its AD LSEs.

use std::any::Any;

use super::{ActionContext, Invocation, NetworkAction};
use crate::codec::FormatD;

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Overwrites the mutable low bits of every AD LSE with values derived from
/// `data` and `salt`. Bits in the immutable prefix are left untouched.
pub fn dummy_process(data: u32, salt: u64, ad: &mut [FormatD]) {
    for (i, d) in ad.iter_mut().enumerate() {
        let v = mix(salt ^ ((data as u64) << 32) ^ i as u64) as u32;
        d.data = (d.data & !FormatD::MUTABLE_MASK) | (v & FormatD::MUTABLE_MASK);
    }
}

#[derive(Debug, Default)]
pub struct DummyAction {
    pub executions: u64,
}

impl NetworkAction for DummyAction {
    fn name(&self) -> &'static str {
        "dummy"
    }

    fn execute(&mut self, inv: &mut Invocation<'_>, _: &mut ActionContext<'_>) {
        dummy_process(inv.data, self.executions, inv.ad);
        self.executions += 1;
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn as_any_mut(&mut self) -> &mut dyn Any {
        self
    }
}
