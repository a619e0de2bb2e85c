// SPDX-License-Identifier: Apache-2.0

//! MPLS Network Actions (MNA) toolkit.
//!
//! - [`codec`]: bit-exact label stack encoding with Network Action Sub-stacks.
//! - [`composer`]: ingress stack construction under readable-label-depth limits.
//! - [`engine`]: per-node LSR processing of labels and network actions.
//! - [`actions`]: the action registry and the AMM, NRP, NFFRR and dummy actions.
//! - [`simulator`]: deterministic packet-level scenario runner and loss collector.
//! - [`format`]: the line-oriented stack description and scenario file formats.

pub mod actions;
pub mod codec;
pub mod composer;
pub mod engine;
pub mod format;
pub mod simulator;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Name of a node (LSR or LER).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(Arc<str>);

impl NodeId {
    pub fn new(name: &str) -> Self {
        NodeId(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
