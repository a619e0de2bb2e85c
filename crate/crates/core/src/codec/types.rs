// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Serialize};

use super::error::Violation;
use super::layout::{format_b, format_c, format_d, mpls};

/// Default NAS indicator. The bSPL is not assigned by IANA yet.
pub const DEFAULT_NAS_INDICATOR: u32 = 4;

/// Maximum number of LSEs following the initial opcode (4-bit NASL).
pub const MAX_NASL: usize = 15;
/// Maximum number of ancillary-data LSEs per network action (3-bit NAL).
pub const MAX_NAL: u8 = 7;
/// Indicator + initial opcode + `MAX_NASL`.
pub const MAX_NAS_LSES: usize = MAX_NASL + 2;

/// A plain MPLS label stack entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RawLse {
    pub label: u32,
    pub tc: u8,
    pub bos: bool,
    pub ttl: u8,
}

impl RawLse {
    pub fn new(label: u32, ttl: u8) -> Self {
        RawLse {
            label,
            tc: 0,
            bos: false,
            ttl,
        }
    }

    pub fn from_word(w: u32) -> Self {
        RawLse {
            label: mpls::LABEL.get(w),
            tc: mpls::TC.get(w) as u8,
            bos: mpls::S.get(w) == 1,
            ttl: mpls::TTL.get(w) as u8,
        }
    }

    pub fn to_word(&self) -> u32 {
        let w = mpls::LABEL.set(0, self.label);
        let w = mpls::TC.set(w, self.tc as u32);
        let w = mpls::S.set(w, self.bos as u32);
        mpls::TTL.set(w, self.ttl as u32)
    }

    pub(crate) fn check(&self) -> Result<(), Violation> {
        range("label", self.label, mpls::LABEL.max())?;
        range("tc", self.tc as u32, mpls::TC.max())
    }
}

/// NAS indicator LSE: an MPLS LSE whose label is the NAS bSPL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormatA {
    pub bspl: u32,
    pub tc: u8,
    pub bos: bool,
    pub ttl: u8,
}

impl FormatA {
    pub fn new(bspl: u32) -> Self {
        FormatA {
            bspl,
            tc: 0,
            bos: false,
            ttl: 0,
        }
    }

    pub fn from_word(w: u32) -> Self {
        let raw = RawLse::from_word(w);
        FormatA {
            bspl: raw.label,
            tc: raw.tc,
            bos: raw.bos,
            ttl: raw.ttl,
        }
    }

    pub fn to_word(&self) -> u32 {
        RawLse {
            label: self.bspl,
            tc: self.tc,
            bos: self.bos,
            ttl: self.ttl,
        }
        .to_word()
    }
}

/// Scope of a NAS, carried in the IHS field of its initial opcode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// Processed only by the egress LER.
    I2e,
    /// Processed by every node on the path.
    Hbh,
    /// Processed by the node that pops the label above it.
    Select,
}

impl Scope {
    pub const fn code(self) -> u32 {
        match self {
            Scope::I2e => 0,
            Scope::Hbh => 1,
            Scope::Select => 2,
        }
    }

    pub const fn from_code(code: u32) -> Option<Scope> {
        match code {
            0 => Some(Scope::I2e),
            1 => Some(Scope::Hbh),
            2 => Some(Scope::Select),
            _ => None,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Scope::I2e => "I2E",
            Scope::Hbh => "HBH",
            Scope::Select => "SELECT",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Initial opcode LSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormatB {
    pub opcode: u8,
    pub data: u16,
    pub scope: Scope,
    pub nasl: u8,
    pub nal: u8,
    pub r: bool,
    pub s: bool,
    pub u: bool,
}

impl FormatB {
    pub fn new(opcode: u8, data: u16, scope: Scope) -> Self {
        FormatB {
            opcode,
            data,
            scope,
            nasl: 0,
            nal: 0,
            r: false,
            s: false,
            u: false,
        }
    }

    /// Fails only on the reserved IHS code point.
    pub fn from_word(w: u32) -> Result<Self, u32> {
        let ihs = format_b::IHS.get(w);
        let scope = Scope::from_code(ihs).ok_or(ihs)?;
        Ok(FormatB {
            opcode: format_b::OPCODE.get(w) as u8,
            data: format_b::DATA.get(w) as u16,
            scope,
            nasl: format_b::NASL.get(w) as u8,
            nal: format_b::NAL.get(w) as u8,
            r: format_b::R.get(w) == 1,
            s: format_b::S.get(w) == 1,
            u: format_b::U.get(w) == 1,
        })
    }

    pub fn to_word(&self) -> u32 {
        let mut w = format_b::OPCODE.set(0, self.opcode as u32);
        w = format_b::DATA.set(w, self.data as u32);
        w = format_b::IHS.set(w, self.scope.code());
        w = format_b::NASL.set(w, self.nasl as u32);
        w = format_b::NAL.set(w, self.nal as u32);
        w = format_b::R.set(w, self.r as u32);
        w = format_b::S.set(w, self.s as u32);
        format_b::U.set(w, self.u as u32)
    }

    pub(crate) fn check(&self) -> Result<(), Violation> {
        range("opcode", self.opcode as u32, format_b::OPCODE.max())?;
        range("data", self.data as u32, format_b::DATA.max())?;
        range("nasl", self.nasl as u32, format_b::NASL.max())?;
        range("nal", self.nal as u32, format_b::NAL.max())
    }
}

/// Subsequent opcode LSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormatC {
    pub opcode: u8,
    /// 20-bit value; the low 7 bits land outside the hashed prefix.
    pub data: u32,
    pub nal: u8,
    pub s: bool,
    pub reserved: bool,
}

impl FormatC {
    pub const DATA_BITS: u32 = 20;
    const LO_BITS: u32 = format_c::DATA_LO.width as u32;

    pub fn new(opcode: u8, data: u32, nal: u8) -> Self {
        FormatC {
            opcode,
            data,
            nal,
            s: false,
            reserved: false,
        }
    }

    pub fn from_word(w: u32) -> Self {
        FormatC {
            opcode: format_c::OPCODE.get(w) as u8,
            data: (format_c::DATA_HI.get(w) << Self::LO_BITS) | format_c::DATA_LO.get(w),
            nal: format_c::NAL.get(w) as u8,
            s: format_c::S.get(w) == 1,
            reserved: format_c::RESERVED.get(w) == 1,
        }
    }

    pub fn to_word(&self) -> u32 {
        let mut w = format_c::OPCODE.set(0, self.opcode as u32);
        w = format_c::DATA_HI.set(w, self.data >> Self::LO_BITS);
        w = format_c::DATA_LO.set(w, self.data);
        w = format_c::NAL.set(w, self.nal as u32);
        w = format_c::S.set(w, self.s as u32);
        format_c::RESERVED.set(w, self.reserved as u32)
    }

    pub(crate) fn check(&self) -> Result<(), Violation> {
        range("opcode", self.opcode as u32, format_c::OPCODE.max())?;
        range("data", self.data, (1 << Self::DATA_BITS) - 1)?;
        range("nal", self.nal as u32, format_c::NAL.max())
    }
}

/// Ancillary data LSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormatD {
    /// 30-bit value; the low 11 bits land outside the hashed prefix.
    pub data: u32,
    pub s: bool,
}

impl FormatD {
    pub const DATA_BITS: u32 = 30;
    pub const MUTABLE_MASK: u32 = format_d::DATA_LO.max();
    const LO_BITS: u32 = format_d::DATA_LO.width as u32;

    pub fn new(data: u32) -> Self {
        FormatD { data, s: false }
    }

    /// The discriminator bit is ignored; C and D are told apart by NAL chaining.
    pub fn from_word(w: u32) -> Self {
        FormatD {
            data: (format_d::DATA_HI.get(w) << Self::LO_BITS) | format_d::DATA_LO.get(w),
            s: format_d::S.get(w) == 1,
        }
    }

    pub fn to_word(&self) -> u32 {
        let mut w = format_d::DATA_HI.set(0, self.data >> Self::LO_BITS);
        w = format_d::DISC.set(w, 0);
        w = format_d::DATA_LO.set(w, self.data);
        format_d::S.set(w, self.s as u32)
    }

    pub(crate) fn check(&self) -> Result<(), Violation> {
        range("data", self.data, (1 << Self::DATA_BITS) - 1)
    }
}

/// An LSE following the initial opcode inside a NAS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NasLse {
    C(FormatC),
    D(FormatD),
}

impl NasLse {
    pub fn to_word(&self) -> u32 {
        match self {
            NasLse::C(c) => c.to_word(),
            NasLse::D(d) => d.to_word(),
        }
    }

    pub fn s(&self) -> bool {
        match self {
            NasLse::C(c) => c.s,
            NasLse::D(d) => d.s,
        }
    }

    fn set_s(&mut self, s: bool) {
        match self {
            NasLse::C(c) => c.s = s,
            NasLse::D(d) => d.s = s,
        }
    }
}

/// One network action inside a NAS, located by LSE index (0 = Format B).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionSlot {
    pub index: usize,
    pub opcode: u8,
    pub nal: u8,
    pub data: u32,
}

/// Network Action Sub-stack.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Nas {
    pub indicator: FormatA,
    pub initial: FormatB,
    pub rest: Vec<NasLse>,
}

impl Nas {
    /// A bare NAS (indicator + initial opcode) with the default indicator.
    pub fn new(initial: FormatB) -> Self {
        Nas {
            indicator: FormatA::new(DEFAULT_NAS_INDICATOR),
            initial,
            rest: Vec::new(),
        }
    }

    pub fn scope(&self) -> Scope {
        self.initial.scope
    }

    pub fn lse_count(&self) -> usize {
        2 + self.rest.len()
    }

    /// Appends ancillary data to the most recent action.
    pub fn push_ad(&mut self, data: u32) -> &mut Self {
        match self.rest.iter_mut().rev().find_map(|l| match l {
            NasLse::C(c) => Some(c),
            NasLse::D(_) => None,
        }) {
            Some(c) => c.nal += 1,
            None => self.initial.nal += 1,
        }
        self.rest.push(NasLse::D(FormatD::new(data)));
        self.initial.nasl = self.rest.len() as u8;
        self
    }

    /// Appends a subsequent network action.
    pub fn push_action(&mut self, opcode: u8, data: u32) -> &mut Self {
        self.rest.push(NasLse::C(FormatC::new(opcode, data, 0)));
        self.initial.nasl = self.rest.len() as u8;
        self
    }

    /// Walks the NAL chain, yielding every action and skipping its AD LSEs.
    pub fn actions(&self) -> Vec<ActionSlot> {
        let mut out = vec![ActionSlot {
            index: 0,
            opcode: self.initial.opcode,
            nal: self.initial.nal,
            data: self.initial.data as u32,
        }];
        for (i, lse) in self.rest.iter().enumerate() {
            if let NasLse::C(c) = lse {
                out.push(ActionSlot {
                    index: i + 1,
                    opcode: c.opcode,
                    nal: c.nal,
                    data: c.data,
                });
            }
        }
        out
    }

    pub(crate) fn words_into(&self, out: &mut Vec<u32>) {
        out.push(self.indicator.to_word());
        out.push(self.initial.to_word());
        out.extend(self.rest.iter().map(NasLse::to_word));
    }

    pub(crate) fn check(&self, indicator: u32) -> Result<(), Violation> {
        if self.indicator.bspl != indicator {
            return Err(Violation::IndicatorMismatch {
                found: self.indicator.bspl,
                expected: indicator,
            });
        }
        range("indicator tc", self.indicator.tc as u32, mpls::TC.max())?;
        self.initial.check()?;
        if self.rest.len() > MAX_NASL {
            return Err(Violation::NasTooLong(self.rest.len()));
        }
        if self.initial.nasl as usize != self.rest.len() {
            return Err(Violation::NaslMismatch {
                nasl: self.initial.nasl,
                actual: self.rest.len(),
            });
        }
        // Exact NAL chaining: each opcode is followed by exactly `nal` D LSEs.
        let mut pending = self.initial.nal as usize;
        for (i, lse) in self.rest.iter().enumerate() {
            match lse {
                NasLse::D(d) => {
                    d.check()?;
                    if pending == 0 {
                        return Err(Violation::NalChain { index: i + 1 });
                    }
                    pending -= 1;
                }
                NasLse::C(c) => {
                    c.check()?;
                    if pending != 0 {
                        return Err(Violation::NalChain { index: i + 1 });
                    }
                    pending = c.nal as usize;
                }
            }
        }
        if pending != 0 {
            return Err(Violation::NalChain {
                index: self.rest.len() + 1,
            });
        }
        Ok(())
    }

    fn clear_bos(&mut self) {
        self.indicator.bos = false;
        self.initial.s = false;
        for l in &mut self.rest {
            l.set_s(false);
        }
    }

    fn set_last_bos(&mut self) {
        match self.rest.last_mut() {
            Some(l) => l.set_s(true),
            None => self.initial.s = true,
        }
    }

    fn last_bos(&self) -> bool {
        match self.rest.last() {
            Some(l) => l.s(),
            None => self.initial.s,
        }
    }

    /// Bottom-of-stack flags of all but the last LSE.
    fn inner_bos(&self) -> bool {
        let n = self.rest.len();
        self.indicator.bos
            || (n > 0 && self.initial.s)
            || self.rest.iter().take(n.saturating_sub(1)).any(NasLse::s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StackEntry {
    Forwarding(RawLse),
    Nas(Nas),
}

impl StackEntry {
    pub fn lse_count(&self) -> usize {
        match self {
            StackEntry::Forwarding(_) => 1,
            StackEntry::Nas(n) => n.lse_count(),
        }
    }

    pub fn as_nas(&self) -> Option<&Nas> {
        match self {
            StackEntry::Nas(n) => Some(n),
            StackEntry::Forwarding(_) => None,
        }
    }

    pub fn as_label(&self) -> Option<&RawLse> {
        match self {
            StackEntry::Forwarding(l) => Some(l),
            StackEntry::Nas(_) => None,
        }
    }
}

/// An MPLS label stack, top first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelStack {
    pub entries: Vec<StackEntry>,
}

impl LabelStack {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<StackEntry>) -> Self {
        LabelStack { entries }
    }

    pub fn push_label(&mut self, label: u32, ttl: u8) -> &mut Self {
        self.entries
            .push(StackEntry::Forwarding(RawLse::new(label, ttl)));
        self
    }

    pub fn push_nas(&mut self, nas: Nas) -> &mut Self {
        self.entries.push(StackEntry::Nas(nas));
        self
    }

    pub fn lse_count(&self) -> usize {
        self.entries.iter().map(StackEntry::lse_count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Clears every bottom-of-stack flag and sets it on the final LSE.
    pub fn seal(&mut self) -> &mut Self {
        for e in &mut self.entries {
            match e {
                StackEntry::Forwarding(l) => l.bos = false,
                StackEntry::Nas(n) => n.clear_bos(),
            }
        }
        match self.entries.last_mut() {
            Some(StackEntry::Forwarding(l)) => l.bos = true,
            Some(StackEntry::Nas(n)) => n.set_last_bos(),
            None => {}
        }
        self
    }

    pub fn sealed(mut self) -> Self {
        self.seal();
        self
    }

    pub fn forwarding_labels(&self) -> impl Iterator<Item = &RawLse> {
        self.entries.iter().filter_map(StackEntry::as_label)
    }

    pub fn nases(&self) -> impl Iterator<Item = &Nas> {
        self.entries.iter().filter_map(StackEntry::as_nas)
    }

    /// Checks every type invariant; returns the offending entry index.
    pub(crate) fn check(&self, indicator: u32) -> Result<(), (usize, Violation)> {
        let last = self.entries.len().checked_sub(1);
        for (i, e) in self.entries.iter().enumerate() {
            let is_last = Some(i) == last;
            match e {
                StackEntry::Forwarding(l) => {
                    l.check().map_err(|v| (i, v))?;
                    if l.label == indicator {
                        return Err((i, Violation::LabelIsIndicator(l.label)));
                    }
                    if l.bos != is_last {
                        return Err((i, Violation::BottomOfStack));
                    }
                }
                StackEntry::Nas(n) => {
                    n.check(indicator).map_err(|v| (i, v))?;
                    if n.inner_bos() || n.last_bos() != is_last {
                        return Err((i, Violation::BottomOfStack));
                    }
                }
            }
        }
        self.check_placement()
    }

    /// Scope placement rules: one select NAS per label, I2E only at the bottom.
    pub(crate) fn check_placement(&self) -> Result<(), (usize, Violation)> {
        let mut select_seen = false;
        let last = self.entries.len().saturating_sub(1);
        for (i, e) in self.entries.iter().enumerate() {
            match e {
                StackEntry::Forwarding(_) => select_seen = false,
                StackEntry::Nas(n) => match n.scope() {
                    Scope::Select => {
                        if select_seen {
                            return Err((i, Violation::DuplicateSelect));
                        }
                        select_seen = true;
                    }
                    Scope::I2e if i != last => return Err((i, Violation::I2eNotLast)),
                    _ => {}
                },
            }
        }
        Ok(())
    }

    pub(crate) fn words(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.lse_count());
        for e in &self.entries {
            match e {
                StackEntry::Forwarding(l) => out.push(l.to_word()),
                StackEntry::Nas(n) => n.words_into(&mut out),
            }
        }
        out
    }
}

fn range(field: &'static str, value: u32, max: u32) -> Result<(), Violation> {
    if value > max {
        Err(Violation::FieldRange { field, value, max })
    } else {
        Ok(())
    }
}
