// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::error::{CodecError, MalformedReason, Violation};
use super::types::*;

/// Reading every LSE of the input.
pub const UNLIMITED_RLD: usize = usize::MAX;

/// Result of decoding a stack within a readable label depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedStack {
    /// Complete entries only; a NAS cut by the RLD is left out.
    pub entries: Vec<StackEntry>,
    /// Parsing stopped at the RLD before reaching bottom of stack.
    pub truncated: bool,
    /// Words read, including any partial trailing NAS.
    pub consumed_lse_count: usize,
}

impl ParsedStack {
    pub fn into_stack(self) -> LabelStack {
        LabelStack::from_entries(self.entries)
    }

    /// Word offset of each entry.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.entries
            .iter()
            .map(|e| {
                let o = off;
                off += e.lse_count();
                o
            })
            .collect()
    }
}

/// Role of one word as established by NAL chaining.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WordKind {
    Forwarding(RawLse),
    Indicator(FormatA),
    Initial(FormatB),
    Opcode(FormatC),
    Ancillary(FormatD),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum WalkEnd {
    /// Word at this index carried bottom of stack.
    Bottom(usize),
    /// RLD reached first.
    Rld,
    /// Input ran out outside a NAS.
    Exhausted,
    Malformed(CodecError),
}

enum State {
    Top,
    AfterIndicator,
    InNas { remaining: usize, pending_ad: usize },
}

/// Classifies words top-down the way a parser with `rld` LSEs of lookahead
/// would, stopping at bottom of stack. Malformed words are not classified.
pub(crate) fn walk(words: &[u32], indicator: u32, rld: usize) -> (Vec<WordKind>, WalkEnd) {
    let mut out = Vec::with_capacity(words.len().min(rld));
    let mut state = State::Top;
    let malformed = |at, reason| WalkEnd::Malformed(CodecError::MalformedNas { at, reason });

    for (i, &w) in words.iter().enumerate() {
        if i >= rld {
            return (out, WalkEnd::Rld);
        }
        match state {
            State::Top => {
                let raw = RawLse::from_word(w);
                if raw.label == indicator {
                    if raw.bos {
                        return (out, malformed(i, MalformedReason::IndicatorAtBottom));
                    }
                    out.push(WordKind::Indicator(FormatA::from_word(w)));
                    state = State::AfterIndicator;
                } else {
                    out.push(WordKind::Forwarding(raw));
                    if raw.bos {
                        return (out, WalkEnd::Bottom(i));
                    }
                }
            }
            State::AfterIndicator => {
                let b = match FormatB::from_word(w) {
                    Ok(b) => b,
                    Err(code) => return (out, malformed(i, MalformedReason::ReservedScope(code))),
                };
                if b.nal > b.nasl {
                    return (out, malformed(i, MalformedReason::NalExceedsNasl));
                }
                if b.nasl > 0 && b.s {
                    return (out, malformed(i, MalformedReason::BottomInsideNas));
                }
                out.push(WordKind::Initial(b));
                if b.nasl == 0 {
                    state = State::Top;
                    if b.s {
                        return (out, WalkEnd::Bottom(i));
                    }
                } else {
                    state = State::InNas {
                        remaining: b.nasl as usize,
                        pending_ad: b.nal as usize,
                    };
                }
            }
            State::InNas {
                remaining,
                pending_ad,
            } => {
                let remaining = remaining - 1;
                let (kind, s, pending_ad) = if pending_ad > 0 {
                    let d = FormatD::from_word(w);
                    (WordKind::Ancillary(d), d.s, pending_ad - 1)
                } else {
                    let c = FormatC::from_word(w);
                    if c.nal as usize > remaining {
                        return (out, malformed(i, MalformedReason::NalExceedsNasl));
                    }
                    (WordKind::Opcode(c), c.s, c.nal as usize)
                };
                if s && remaining > 0 {
                    return (out, malformed(i, MalformedReason::BottomInsideNas));
                }
                out.push(kind);
                if remaining == 0 {
                    state = State::Top;
                    if s {
                        return (out, WalkEnd::Bottom(i));
                    }
                } else {
                    state = State::InNas {
                        remaining,
                        pending_ad,
                    };
                }
            }
        }
    }
    match state {
        State::Top => (out, WalkEnd::Exhausted),
        _ => (
            out,
            malformed(words.len(), MalformedReason::MissingNasWords),
        ),
    }
}

/// Groups classified words into entries; drops a trailing incomplete NAS.
fn group(kinds: &[WordKind]) -> Vec<StackEntry> {
    let mut entries = Vec::new();
    let mut open: Option<(FormatA, Option<FormatB>, Vec<NasLse>)> = None;
    for k in kinds {
        match *k {
            WordKind::Forwarding(l) => entries.push(StackEntry::Forwarding(l)),
            WordKind::Indicator(a) => open = Some((a, None, Vec::new())),
            WordKind::Initial(b) => {
                if let Some((_, slot, _)) = open.as_mut() {
                    *slot = Some(b);
                }
            }
            WordKind::Opcode(c) => {
                if let Some((_, _, rest)) = open.as_mut() {
                    rest.push(NasLse::C(c));
                }
            }
            WordKind::Ancillary(d) => {
                if let Some((_, _, rest)) = open.as_mut() {
                    rest.push(NasLse::D(d));
                }
            }
        }
        if let Some((a, Some(b), rest)) = &open {
            if rest.len() == b.nasl as usize {
                entries.push(StackEntry::Nas(Nas {
                    indicator: *a,
                    initial: *b,
                    rest: rest.clone(),
                }));
                open = None;
            }
        }
    }
    entries
}

/// Stack codec parameterised by the NAS indicator value and strictness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Codec {
    pub indicator: u32,
    /// Reject words after bottom of stack and stacks without one.
    pub strict: bool,
}

impl Default for Codec {
    fn default() -> Self {
        Codec {
            indicator: DEFAULT_NAS_INDICATOR,
            strict: true,
        }
    }
}

impl Codec {
    pub fn lenient() -> Self {
        Codec {
            strict: false,
            ..Codec::default()
        }
    }

    pub fn encode_words(&self, stack: &LabelStack) -> Result<Vec<u32>, CodecError> {
        if stack.is_empty() {
            return Err(CodecError::Empty);
        }
        stack
            .check(self.indicator)
            .map_err(|(entry, violation)| CodecError::InvariantViolation { entry, violation })?;
        Ok(stack.words())
    }

    pub fn encode(&self, stack: &LabelStack) -> Result<Vec<u8>, CodecError> {
        Ok(words_to_bytes(&self.encode_words(stack)?))
    }

    pub fn decode(&self, bytes: &[u8], rld: usize) -> Result<ParsedStack, CodecError> {
        self.decode_words(&bytes_to_words(bytes)?, rld)
    }

    pub fn decode_words(&self, words: &[u32], rld: usize) -> Result<ParsedStack, CodecError> {
        if words.is_empty() && self.strict {
            return Err(CodecError::Empty);
        }
        let (kinds, end) = walk(words, self.indicator, rld);
        let truncated = match end {
            WalkEnd::Malformed(e) => return Err(e),
            WalkEnd::Bottom(at) => {
                let count = words.len() - at - 1;
                if self.strict && count > 0 {
                    return Err(CodecError::TrailingGarbage { at, count });
                }
                false
            }
            WalkEnd::Exhausted => {
                if self.strict {
                    return Err(CodecError::MissingBottomOfStack(words.len()));
                }
                false
            }
            WalkEnd::Rld => true,
        };
        let parsed = ParsedStack {
            entries: group(&kinds),
            truncated,
            consumed_lse_count: kinds.len(),
        };
        if self.strict && !truncated {
            let stack = LabelStack::from_entries(parsed.entries);
            stack
                .check_placement()
                .map_err(|(entry, violation)| CodecError::InvariantViolation { entry, violation })?;
            return Ok(ParsedStack {
                entries: stack.entries,
                ..parsed
            });
        }
        Ok(parsed)
    }
}

/// Kind of one stack entry located by [`Codec::spans`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanKind {
    Label,
    Nas(Scope),
}

/// Word range of one stack entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub len: usize,
    pub kind: SpanKind,
}

impl Span {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

impl Codec {
    /// Locates every entry of a complete stack without materialising it.
    pub fn spans(&self, words: &[u32]) -> Result<Vec<Span>, CodecError> {
        if words.is_empty() {
            return Err(CodecError::Empty);
        }
        let (kinds, end) = walk(words, self.indicator, UNLIMITED_RLD);
        match end {
            WalkEnd::Malformed(e) => return Err(e),
            WalkEnd::Bottom(at) if self.strict && at + 1 < words.len() => {
                return Err(CodecError::TrailingGarbage {
                    at,
                    count: words.len() - at - 1,
                })
            }
            WalkEnd::Exhausted if self.strict => {
                return Err(CodecError::MissingBottomOfStack(words.len()))
            }
            _ => {}
        }
        let mut spans: Vec<Span> = Vec::new();
        for (i, k) in kinds.iter().enumerate() {
            match k {
                WordKind::Forwarding(_) => spans.push(Span {
                    start: i,
                    len: 1,
                    kind: SpanKind::Label,
                }),
                WordKind::Indicator(_) => spans.push(Span {
                    start: i,
                    len: 1,
                    kind: SpanKind::Nas(Scope::I2e),
                }),
                WordKind::Initial(b) => {
                    let last = spans.last_mut().expect("initial opcode follows an indicator");
                    last.len = 2 + b.nasl as usize;
                    last.kind = SpanKind::Nas(b.scope);
                }
                WordKind::Opcode(_) | WordKind::Ancillary(_) => {}
            }
        }
        if self.strict {
            let mut select_seen = false;
            for (i, s) in spans.iter().enumerate() {
                match s.kind {
                    SpanKind::Label => select_seen = false,
                    SpanKind::Nas(Scope::Select) => {
                        if select_seen {
                            return Err(CodecError::InvariantViolation {
                                entry: i,
                                violation: Violation::DuplicateSelect,
                            });
                        }
                        select_seen = true;
                    }
                    SpanKind::Nas(Scope::I2e) if i + 1 != spans.len() => {
                        return Err(CodecError::InvariantViolation {
                            entry: i,
                            violation: Violation::I2eNotLast,
                        })
                    }
                    SpanKind::Nas(_) => {}
                }
            }
        }
        Ok(spans)
    }
}

pub fn encode_stack(stack: &LabelStack) -> Result<Vec<u8>, CodecError> {
    Codec::default().encode(stack)
}

/// Strict decode with the default NAS indicator.
pub fn decode_stack(bytes: &[u8], rld: usize) -> Result<ParsedStack, CodecError> {
    Codec::default().decode(bytes, rld)
}

pub fn bytes_to_words(bytes: &[u8]) -> Result<Vec<u32>, CodecError> {
    if !bytes.len().is_multiple_of(4) {
        return Err(CodecError::UnalignedLength(bytes.len()));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

pub fn words_to_bytes(words: &[u32]) -> Vec<u8> {
    words.iter().flat_map(|w| w.to_be_bytes()).collect()
}
