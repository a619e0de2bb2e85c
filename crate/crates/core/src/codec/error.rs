// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// A broken type invariant found while encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("{field}={value} exceeds {max}")]
    FieldRange {
        field: &'static str,
        value: u32,
        max: u32,
    },
    #[error("NAS indicator {found} does not match configured bSPL {expected}")]
    IndicatorMismatch { found: u32, expected: u32 },
    #[error("forwarding label {0} collides with the NAS indicator")]
    LabelIsIndicator(u32),
    #[error("NAS carries {0} LSEs after the initial opcode, at most 15 allowed")]
    NasTooLong(usize),
    #[error("NASL {nasl} but {actual} LSEs follow the initial opcode")]
    NaslMismatch { nasl: u8, actual: usize },
    #[error("NAL chain broken at NAS LSE {index}")]
    NalChain { index: usize },
    #[error("bottom-of-stack flag must be set on the last LSE only")]
    BottomOfStack,
    #[error("more than one select-scoped NAS below one forwarding label")]
    DuplicateSelect,
    #[error("I2E-scoped NAS is not at the bottom of the stack")]
    I2eNotLast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MalformedReason {
    #[error("NAL exceeds NASL")]
    NalExceedsNasl,
    #[error("NASL words missing before end of input")]
    MissingNasWords,
    #[error("bottom of stack inside NAS")]
    BottomInsideNas,
    #[error("NAS indicator at bottom of stack")]
    IndicatorAtBottom,
    #[error("reserved IHS value {0}")]
    ReservedScope(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("invariant violated at entry {entry}: {violation}")]
    InvariantViolation { entry: usize, violation: Violation },
    #[error("malformed NAS at LSE {at}: {reason}")]
    MalformedNas { at: usize, reason: MalformedReason },
    #[error("{count} trailing LSE(s) after bottom of stack at LSE {at}")]
    TrailingGarbage { at: usize, count: usize },
    #[error("no bottom-of-stack flag in {0} LSE(s)")]
    MissingBottomOfStack(usize),
    #[error("input length {0} is not a multiple of 4")]
    UnalignedLength(usize),
    #[error("empty label stack")]
    Empty,
}
