// SPDX-License-Identifier: Apache-2.0

//! Network resource partition metering.

use std::any::Any;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ActionContext, Effect, Invocation, NetworkAction};

/// Burst of a meter configured without one, in packets of the largest size.
pub const DEFAULT_BURST_PACKETS: u64 = 2;

/// Integer token bucket; rate in capacity units per tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenBucket {
    pub rate: u64,
    pub burst: u64,
    pub tokens: u64,
    pub last: u64,
}

impl TokenBucket {
    /// Starts full.
    pub fn new(rate: u64, burst: u64) -> Self {
        TokenBucket {
            rate,
            burst,
            tokens: burst,
            last: 0,
        }
    }

    fn refill(&mut self, now: u64) {
        if now > self.last {
            let add = self.rate.saturating_mul(now - self.last);
            self.tokens = self.tokens.saturating_add(add).min(self.burst);
            self.last = now;
        }
    }

    pub fn try_consume(&mut self, size: u64, now: u64) -> bool {
        self.refill(now);
        if self.tokens >= size {
            self.tokens -= size;
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeterVerdict {
    Pass,
    Drop,
}

/// One meter per NRP selector plus a default meter for everything else.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeterState {
    pub meters: BTreeMap<u16, TokenBucket>,
    pub default: TokenBucket,
}

impl MeterState {
    pub fn new(default: TokenBucket) -> Self {
        MeterState {
            meters: BTreeMap::new(),
            default,
        }
    }

    pub fn with_meter(mut self, selector: u16, bucket: TokenBucket) -> Self {
        self.meters.insert(selector, bucket);
        self
    }
}

/// Meters one packet. Unregistered selectors share the default meter.
pub fn nrp_process(meters: &mut MeterState, selector: u16, pkt_size: u64, now: u64) -> MeterVerdict {
    let bucket = meters.meters.get_mut(&selector).unwrap_or(&mut meters.default);
    verdict(bucket.try_consume(pkt_size, now))
}

fn verdict(pass: bool) -> MeterVerdict {
    if pass {
        MeterVerdict::Pass
    } else {
        MeterVerdict::Drop
    }
}

/// The NRP action. Without meters (enforcement off) it only counts.
#[derive(Debug, Default)]
pub struct NrpAction {
    pub meters: Option<MeterState>,
}

impl NrpAction {
    pub fn new(meters: Option<MeterState>) -> Self {
        NrpAction { meters }
    }

    /// Meters a packet that carries no NRP selector.
    pub fn meter_unselected(&mut self, pkt_size: u64, now: u64) -> MeterVerdict {
        match &mut self.meters {
            Some(m) => verdict(m.default.try_consume(pkt_size, now)),
            None => MeterVerdict::Pass,
        }
    }
}

impl NetworkAction for NrpAction {
    fn name(&self) -> &'static str {
        "nrp"
    }

    fn execute(&mut self, inv: &mut Invocation<'_>, ctx: &mut ActionContext<'_>) {
        let Some(meters) = &mut self.meters else {
            return;
        };
        let selector = (inv.data & 0x1FFF) as u16;
        let known = meters.meters.contains_key(&selector);
        match nrp_process(meters, selector, ctx.pkt_size, ctx.now) {
            MeterVerdict::Pass => ctx.effects.push(Effect::MeterPassed { selector }),
            MeterVerdict::Drop => ctx.effects.push(Effect::MeterExceeded {
                selector: known.then_some(selector),
            }),
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn as_any_mut(&mut self) -> &mut dyn Any {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Scalar bucket written out longhand, one tick at a time.
    fn oracle(rate: u64, burst: u64, arrivals: &[(u64, u64)]) -> Vec<bool> {
        let mut fill = burst;
        let mut t = 0;
        let mut out = Vec::new();
        for &(at, size) in arrivals {
            while t < at {
                t += 1;
                fill = std::cmp::min(burst, fill + rate);
            }
            if fill >= size {
                fill -= size;
                out.push(true);
            } else {
                out.push(false);
            }
        }
        out
    }

    fn arrivals() -> impl Strategy<Value = Vec<(u64, u64)>> {
        proptest::collection::vec((0u64..4, 1u64..20), 0..200).prop_map(|v| {
            let mut t = 0;
            v.into_iter()
                .map(|(dt, s)| {
                    t += dt;
                    (t, s)
                })
                .collect()
        })
    }

    #[test]
    fn steady_state_at_reserved_rate() {
        let mut m = MeterState::new(TokenBucket::new(0, 0)).with_meter(1, TokenBucket::new(20, 20));
        for t in 0..1000 {
            for _ in 0..2 {
                assert_eq!(nrp_process(&mut m, 1, 10, t), MeterVerdict::Pass);
            }
        }
    }

    #[test]
    fn unselected_traffic_hits_default_meter() {
        let default = TokenBucket::new(0, DEFAULT_BURST_PACKETS * 10);
        let mut m = MeterState::new(default).with_meter(1, TokenBucket::new(100, 100));
        assert_eq!(nrp_process(&mut m, 9, 10, 0), MeterVerdict::Pass);
        assert_eq!(nrp_process(&mut m, 9, 10, 0), MeterVerdict::Pass);
        assert_eq!(nrp_process(&mut m, 9, 10, 5), MeterVerdict::Drop);
        assert_eq!(nrp_process(&mut m, 1, 10, 5), MeterVerdict::Pass);
    }

    #[test]
    fn e7_meters() {
        // X/Y/Z reserve 20/30/50 units of a 100-unit bottleneck; interference
        // is unreserved and hits the default meter with the default burst.
        let default = TokenBucket::new(0, DEFAULT_BURST_PACKETS * 10);
        let mut m = MeterState::new(default)
            .with_meter(1, TokenBucket::new(20, 20))
            .with_meter(2, TokenBucket::new(30, 30))
            .with_meter(3, TokenBucket::new(50, 50));
        let mut interference_pass = 0;
        for t in 0..100 {
            for (sel, n) in [(1, 2), (2, 3), (3, 5)] {
                for _ in 0..n {
                    assert_eq!(nrp_process(&mut m, sel, 10, t), MeterVerdict::Pass);
                }
            }
            for _ in 0..10 {
                if nrp_process(&mut m, 0, 10, t) == MeterVerdict::Pass {
                    interference_pass += 1;
                }
            }
        }
        assert_eq!(interference_pass, DEFAULT_BURST_PACKETS);
    }

    proptest! {
        #[test]
        fn matches_scalar_oracle(rate in 0u64..30, burst in 0u64..60, arr in arrivals()) {
            let mut b = TokenBucket::new(rate, burst);
            let got: Vec<bool> = arr.iter().map(|&(t, s)| b.try_consume(s, t)).collect();
            prop_assert_eq!(got, oracle(rate, burst, &arr));
        }

        #[test]
        fn conservation(rate in 0u64..30, burst in 0u64..60, arr in arrivals()) {
            let mut b = TokenBucket::new(rate, burst);
            let mut passed = 0;
            for &(t, s) in &arr {
                if b.try_consume(s, t) {
                    passed += s;
                }
                prop_assert!(b.tokens <= b.burst);
                prop_assert!(passed <= rate * t + burst);
            }
        }
    }
}
