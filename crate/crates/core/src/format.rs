// SPDX-License-Identifier: Apache-2.0

//! Line-oriented text formats: stack descriptions and scenario files.
//!
//! Both formats ignore blank lines and everything after `#`. The grammar is
//! documented in `docs/formats.md`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::actions::{opcode, DEFAULT_BURST_PACKETS};
use crate::codec::{
    Codec, CodecError, FormatB, LabelStack, Nas, RawLse, Scope, StackEntry, DEFAULT_NAS_INDICATOR,
};
use crate::composer::{ActionSpec, NodeCapabilities, PathHop, PathSpec, RequestScope};
use crate::engine::{BackupTunnel, Route};
use crate::simulator::{
    ActionTemplate, ColorSchedule, LinkSpec, NodeSpec, NrpSpec, PathDef, RouteSpec, Scenario,
    StreamNas, StreamSpec, TunnelSpec,
};
use crate::NodeId;

/// A problem in a text input, located by 1-based line (0 = whole input).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

fn err<T>(line: usize, message: impl fmt::Display) -> Result<T, FormatError> {
    Err(FormatError {
        line,
        message: message.to_string(),
    })
}

/// Non-empty lines with comments stripped, paired with their line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn number<T: FromStr>(line: usize, what: &str, v: &str) -> Result<T, FormatError> {
    let parsed = match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16)
            .ok()
            .and_then(|n| n.to_string().parse().ok()),
        None => v.parse().ok(),
    };
    parsed.map_or_else(|| err(line, format!("bad {what} `{v}`")), Ok)
}

fn flag(line: usize, what: &str, v: &str) -> Result<bool, FormatError> {
    match v {
        "1" | "true" | "on" | "yes" => Ok(true),
        "0" | "false" | "off" | "no" => Ok(false),
        _ => err(line, format!("bad {what} `{v}`, expected true or false")),
    }
}

/// Splits `key=value` tokens from positional ones.
struct Tokens<'a> {
    line: usize,
    positional: Vec<&'a str>,
    keyed: Vec<(&'a str, &'a str, bool)>,
}

impl<'a> Tokens<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        let mut positional = Vec::new();
        let mut keyed = Vec::new();
        for t in text.split_whitespace() {
            match t.split_once('=') {
                Some((k, v)) => keyed.push((k, v, false)),
                None => positional.push(t),
            }
        }
        Tokens {
            line,
            positional,
            keyed,
        }
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        self.keyed
            .iter_mut()
            .find(|(k, _, used)| *k == key && !*used)
            .map(|e| {
                e.2 = true;
                e.1
            })
    }

    fn num<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, FormatError> {
        self.take(key).map(|v| number(self.line, key, v)).transpose()
    }

    fn finish(self) -> Result<(), FormatError> {
        match self.keyed.iter().find(|e| !e.2) {
            Some((k, _, _)) => err(self.line, format!("unknown option `{k}`")),
            None => Ok(()),
        }
    }
}

fn opcode_by_name(line: usize, t: &str) -> Result<u8, FormatError> {
    Ok(match t.to_ascii_lowercase().as_str() {
        "noop" => opcode::NOOP,
        "nffrr" => opcode::NFFRR,
        "amm" => opcode::AMM,
        "nrp" => opcode::NRP,
        "dummy" => opcode::DUMMY,
        _ => number(line, "opcode", t)?,
    })
}

fn scope_by_name(line: usize, t: &str) -> Result<Scope, FormatError> {
    match t.to_ascii_lowercase().as_str() {
        "i2e" => Ok(Scope::I2e),
        "hbh" => Ok(Scope::Hbh),
        "select" => Ok(Scope::Select),
        _ => err(line, format!("unknown scope `{t}`")),
    }
}

/// A parsed stack description with the source line of every entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackDescription {
    pub stack: LabelStack,
    pub entry_lines: Vec<usize>,
}

impl StackDescription {
    /// Encodes through `codec`, locating invariant violations by line.
    pub fn encode(&self, codec: &Codec) -> Result<Vec<u8>, FormatError> {
        codec.encode(&self.stack).map_err(|e| {
            let line = match &e {
                CodecError::InvariantViolation { entry, .. } => {
                    self.entry_lines.get(*entry).copied().unwrap_or(0)
                }
                _ => 0,
            };
            FormatError {
                line,
                message: e.to_string(),
            }
        })
    }
}

/// Parses a stack description:
///
/// ```text
/// fwd 100 ttl=64
/// nas hbh
/// b noop
/// c amm data=0x1234
/// d 7
/// ```
pub fn parse_stack_description(text: &str) -> Result<StackDescription, FormatError> {
    let mut entries: Vec<StackEntry> = Vec::new();
    let mut entry_lines = Vec::new();
    // Scope and line of a `nas` line still waiting for its `b` line.
    let mut open: Option<(Scope, usize, u8, u8)> = None;

    for (n, l) in lines(text) {
        let mut t = Tokens::new(n, l);
        let Some(&kw) = t.positional.first() else {
            return err(n, "expected a keyword");
        };
        let args = &t.positional[1..].to_vec();
        if let Some((_, at, _, _)) = open {
            if kw != "b" {
                return err(n, format!("NAS opened on line {at} needs a `b` line next"));
            }
        }
        match kw {
            "fwd" => {
                let [label] = args[..] else {
                    return err(n, "usage: fwd <label> [ttl=N] [tc=N]");
                };
                let label = number(n, "label", label)?;
                let ttl = t.num("ttl")?.unwrap_or(64);
                let tc = t.num("tc")?.unwrap_or(0);
                t.finish()?;
                let mut lse = RawLse::new(label, ttl);
                lse.tc = tc;
                entries.push(StackEntry::Forwarding(lse));
                entry_lines.push(n);
            }
            "nas" => {
                let [scope] = args[..] else {
                    return err(n, "usage: nas <i2e|hbh|select> [ttl=N] [tc=N]");
                };
                let scope = scope_by_name(n, scope)?;
                let ttl = t.num("ttl")?.unwrap_or(0);
                let tc = t.num("tc")?.unwrap_or(0);
                t.finish()?;
                open = Some((scope, n, ttl, tc));
            }
            "b" => {
                let Some((scope, _, ttl, tc)) = open.take() else {
                    return err(n, "`b` must follow a `nas` line");
                };
                let [op] = args[..] else {
                    return err(n, "usage: b <opcode> [data=N] [r=1] [u=1]");
                };
                let mut b = FormatB::new(opcode_by_name(n, op)?, t.num("data")?.unwrap_or(0), scope);
                b.r = t.take("r").map(|v| flag(n, "r", v)).transpose()?.unwrap_or(false);
                b.u = t.take("u").map(|v| flag(n, "u", v)).transpose()?.unwrap_or(false);
                t.finish()?;
                let mut nas = Nas::new(b);
                nas.indicator.ttl = ttl;
                nas.indicator.tc = tc;
                entries.push(StackEntry::Nas(nas));
                entry_lines.push(n);
            }
            "c" | "d" => {
                let Some(StackEntry::Nas(nas)) = entries.last_mut() else {
                    return err(n, format!("`{kw}` must follow a NAS"));
                };
                if kw == "c" {
                    let [op] = args[..] else {
                        return err(n, "usage: c <opcode> [data=N]");
                    };
                    let op = opcode_by_name(n, op)?;
                    nas.push_action(op, t.num("data")?.unwrap_or(0));
                } else {
                    let [v] = args[..] else {
                        return err(n, "usage: d <value>");
                    };
                    nas.push_ad(number(n, "data", v)?);
                }
                t.finish()?;
            }
            _ => return err(n, format!("unknown keyword `{kw}`")),
        }
    }
    if let Some((_, at, _, _)) = open {
        return err(at, "NAS has no `b` line");
    }
    if entries.is_empty() {
        return err(0, "empty stack description");
    }
    let mut stack = LabelStack::from_entries(entries);
    stack.seal();
    Ok(StackDescription { stack, entry_lines })
}

/// Parses a description and encodes it with the default codec.
pub fn build_stack(text: &str) -> Result<Vec<u8>, FormatError> {
    parse_stack_description(text)?.encode(&Codec::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Scenario,
    Nodes,
    Links,
    Tunnels,
    Routes,
    Paths,
    Nas,
    Nrp,
    Streams,
}

impl Section {
    fn parse(line: usize, name: &str) -> Result<Self, FormatError> {
        Ok(match name {
            "scenario" => Section::Scenario,
            "nodes" => Section::Nodes,
            "links" => Section::Links,
            "tunnels" => Section::Tunnels,
            "routes" => Section::Routes,
            "paths" => Section::Paths,
            "nas" => Section::Nas,
            "nrp" => Section::Nrp,
            "streams" => Section::Streams,
            _ => return err(line, format!("unknown section [{name}]")),
        })
    }
}

fn node_list(line: usize, v: &str) -> Result<Vec<u32>, FormatError> {
    v.split(',').map(|x| number(line, "label", x)).collect()
}

/// Parses a scenario file. References between sections are checked by
/// [`crate::simulator::run_scenario`], which reports them by line as well.
pub fn parse_scenario(text: &str) -> Result<Scenario, FormatError> {
    let mut sc = Scenario::new("unnamed");
    let mut section: Option<Section> = None;
    let mut nas_lines: Vec<(String, StreamNas)> = Vec::new();
    let mut any = false;

    for (n, l) in lines(text) {
        any = true;
        if let Some(name) = l.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return err(n, "unterminated section header");
            };
            section = Some(Section::parse(n, name.trim())?);
            continue;
        }
        let Some(sec) = section else {
            return err(n, "content before the first section");
        };
        match sec {
            Section::Scenario => scenario_kv(&mut sc, n, l)?,
            Section::Nodes => sc.nodes.push(node_line(n, l)?),
            Section::Links => sc.links.push(link_line(n, l)?),
            Section::Tunnels => sc.tunnels.push(tunnel_line(n, l)?),
            Section::Routes => sc.routes.push(route_line(n, l)?),
            Section::Paths => sc.paths.push(path_line(n, l)?),
            Section::Nas => nas_lines.push(nas_line(n, l)?),
            Section::Nrp => sc.nrp.push(nrp_line(n, l)?),
            Section::Streams => sc.streams.push(stream_line(n, l)?),
        }
    }
    if !any {
        return err(0, "empty scenario");
    }
    for (stream, nas) in nas_lines {
        let line = nas.line;
        match sc.streams.iter_mut().find(|s| s.name == stream) {
            Some(s) => s.nas.push(nas),
            None => return err(line, format!("unknown stream `{stream}`")),
        }
    }
    Ok(sc)
}

/// Applies one `key = value` setting of the `[scenario]` section.
pub fn set_scenario_option(sc: &mut Scenario, setting: &str) -> Result<(), FormatError> {
    scenario_kv(sc, 0, setting)
}

fn scenario_kv(sc: &mut Scenario, n: usize, l: &str) -> Result<(), FormatError> {
    let Some((k, v)) = l.split_once('=') else {
        return err(n, "expected key = value");
    };
    let (k, v) = (k.trim(), v.trim());
    match k {
        "name" => sc.name = v.to_string(),
        "seed" => sc.seed = number(n, k, v)?,
        "ticks" => sc.ticks = number(n, k, v)?,
        "php" => sc.options.php = flag(n, k, v)?,
        "strict" => sc.options.strict = flag(n, k, v)?,
        "nrp_enforce" => sc.options.nrp_enforce = flag(n, k, v)?,
        "nffrr" => sc.options.nffrr = flag(n, k, v)?,
        _ => return err(n, format!("unknown scenario key `{k}`")),
    }
    Ok(())
}

fn node_line(n: usize, l: &str) -> Result<NodeSpec, FormatError> {
    let mut t = Tokens::new(n, l);
    let [name] = t.positional[..] else {
        return err(n, "usage: <node> [rld=N] [max_select=N] [max_hbh=N] [drop=P]");
    };
    let mut caps = NodeCapabilities::new(name, t.num("rld")?.unwrap_or(usize::MAX));
    caps.max_select_nas = t.num("max_select")?.unwrap_or(caps.max_select_nas);
    caps.max_hbh_nas = t.num("max_hbh")?.unwrap_or(caps.max_hbh_nas);
    let drop_prob = t.num("drop")?.unwrap_or(0.0);
    t.finish()?;
    Ok(NodeSpec {
        caps,
        drop_prob,
        line: n,
    })
}

fn link_line(n: usize, l: &str) -> Result<LinkSpec, FormatError> {
    let mut t = Tokens::new(n, l);
    let (ends, up) = match t.positional[..] {
        [ends] => (ends, true),
        [ends, "down"] => (ends, false),
        [ends, "up"] => (ends, true),
        _ => return err(n, "usage: <a>-<b> [capacity=N] [down]"),
    };
    let Some((a, b)) = ends.split_once('-').filter(|(a, b)| !a.is_empty() && !b.is_empty()) else {
        return err(n, format!("bad link `{ends}`, expected A-B"));
    };
    let capacity = t.num("capacity")?;
    t.finish()?;
    Ok(LinkSpec {
        a: a.into(),
        b: b.into(),
        capacity,
        up,
        line: n,
    })
}

fn tunnel_line(n: usize, l: &str) -> Result<TunnelSpec, FormatError> {
    let mut t = Tokens::new(n, l);
    let usage = "usage: <node> protects=<neighbor> via=<next hop> labels=L[,L...]";
    let [at] = t.positional[..] else {
        return err(n, usage);
    };
    let (Some(protects), Some(via), Some(labels)) = (t.take("protects"), t.take("via"), t.take("labels")) else {
        return err(n, usage);
    };
    let labels = node_list(n, labels)?;
    t.finish()?;
    Ok(TunnelSpec {
        at: at.into(),
        protects: protects.into(),
        tunnel: BackupTunnel {
            labels,
            next_hop: via.into(),
        },
        line: n,
    })
}

fn route_line(n: usize, l: &str) -> Result<RouteSpec, FormatError> {
    let t = Tokens::new(n, l);
    let p = t.positional.clone();
    if p.len() < 3 {
        return err(n, "usage: <node> <label> swap <label> <next> | pop <next> [php] | pop_lookup | deliver");
    }
    let label = number(n, "label", p[1])?;
    let route = match (p[2], &p[3..]) {
        ("swap", [out, next]) => Route::Swap {
            label: number(n, "label", out)?,
            next_hop: NodeId::new(next),
        },
        ("pop", [next]) => Route::PopAndForward {
            next_hop: NodeId::new(next),
            php: false,
        },
        ("pop", [next, "php"]) => Route::PopAndForward {
            next_hop: NodeId::new(next),
            php: true,
        },
        ("pop_lookup", []) => Route::PopAndLookup,
        ("deliver", []) => Route::Deliver,
        (op, _) => return err(n, format!("bad route `{op}` or wrong argument count")),
    };
    t.finish()?;
    Ok(RouteSpec {
        node: p[0].into(),
        label,
        route,
        line: n,
    })
}

fn path_line(n: usize, l: &str) -> Result<PathDef, FormatError> {
    let Some((name, rest)) = l.split_once('=') else {
        return err(n, "usage: <name> = <node>:<label> ... [ttl=N] [php] [routes=auto|manual]");
    };
    let mut t = Tokens::new(n, rest);
    let mut hops = Vec::new();
    let mut php = false;
    for tok in &t.positional {
        if *tok == "php" {
            php = true;
            continue;
        }
        let Some((node, label)) = tok.split_once(':') else {
            return err(n, format!("bad hop `{tok}`, expected node:label"));
        };
        hops.push(PathHop {
            node: node.into(),
            label: number(n, "label", label)?,
        });
    }
    if hops.is_empty() {
        return err(n, "path has no hops");
    }
    let ttl = t.num("ttl")?.unwrap_or(64);
    let auto_routes = match t.take("routes") {
        None | Some("auto") => true,
        Some("manual") => false,
        Some(v) => return err(n, format!("bad routes `{v}`, expected auto or manual")),
    };
    t.finish()?;
    Ok(PathDef {
        name: name.trim().to_string(),
        path: PathSpec { hops, php, ttl },
        auto_routes,
        line: n,
    })
}

fn nas_line(n: usize, l: &str) -> Result<(String, StreamNas), FormatError> {
    let mut t = Tokens::new(n, l);
    let usage = "usage: <stream> <hbh|i2e|select NODE> <action> [data] [data=N] [ad=V,...]";
    let p = t.positional.clone();
    let (stream, scope, rest) = match p[..] {
        [s, "select", node, ref rest @ ..] => (s, RequestScope::Select(node.into()), rest),
        [s, "hbh", ref rest @ ..] => (s, RequestScope::Hbh, rest),
        [s, "i2e", ref rest @ ..] => (s, RequestScope::I2e, rest),
        _ => return err(n, usage),
    };
    let (action, data) = match rest {
        [a] => (*a, None),
        [a, d] => (*a, Some(number::<u32>(n, "data", d)?)),
        _ => return err(n, usage),
    };
    let data = match (data, t.num::<u32>("data")?) {
        (Some(_), Some(_)) => return err(n, "data given twice"),
        (a, b) => a.or(b),
    };
    let ad = t.take("ad").map(|v| node_list(n, v)).transpose()?.unwrap_or_default();
    t.finish()?;
    let action = if action.eq_ignore_ascii_case("amm") {
        if data.is_some() || !ad.is_empty() {
            return err(n, "amm data is derived from the stream's flow and color");
        }
        ActionTemplate::Amm
    } else {
        let mut spec = ActionSpec::new(opcode_by_name(n, action)?, data.unwrap_or(0));
        spec.ad = ad;
        ActionTemplate::Fixed(spec)
    };
    Ok((
        stream.to_string(),
        StreamNas {
            scope,
            action,
            line: n,
        },
    ))
}

fn nrp_line(n: usize, l: &str) -> Result<NrpSpec, FormatError> {
    let mut t = Tokens::new(n, l);
    let usage = "usage: <node> sel=N|default rate=N [burst=N]";
    let (node, selector) = match t.positional[..] {
        [node] => (node, Some(t.num("sel")?.map_or_else(|| err(n, usage), Ok)?)),
        [node, "default"] => (node, None),
        _ => return err(n, usage),
    };
    let Some(rate) = t.num("rate")? else {
        return err(n, usage);
    };
    let burst = t.num("burst")?;
    t.finish()?;
    Ok(NrpSpec {
        node: node.into(),
        selector,
        rate,
        burst,
        line: n,
    })
}

fn stream_line(n: usize, l: &str) -> Result<StreamSpec, FormatError> {
    let mut t = Tokens::new(n, l);
    let [name] = t.positional[..] else {
        return err(n, "usage: <name> path=P rate=R [size=N] [count=N] [start=T] [flow=F] [color_period=T|color_packets=N]");
    };
    let Some(path) = t.take("path") else {
        return err(n, "stream needs path=");
    };
    let Some(rate) = t.num::<f64>("rate")? else {
        return err(n, "stream needs rate=");
    };
    if rate.is_nan() || rate <= 0.0 || !rate.is_finite() {
        return err(n, "rate must be positive");
    }
    let pkt_size = t.num("size")?.unwrap_or(1);
    let count = t.num("count")?;
    let start = t.num("start")?.unwrap_or(0);
    let flow_id = t.num("flow")?.unwrap_or(0);
    let color = match (t.num("color_period")?, t.num("color_packets")?) {
        (Some(_), Some(_)) => return err(n, "color_period and color_packets are exclusive"),
        (Some(p), None) => Some(ColorSchedule::Ticks(p)),
        (None, Some(p)) => Some(ColorSchedule::Packets(p)),
        (None, None) => None,
    };
    t.finish()?;
    Ok(StreamSpec {
        name: name.to_string(),
        path: path.to_string(),
        rate,
        pkt_size,
        count,
        start,
        flow_id,
        color,
        nas: Vec::new(),
        line: n,
    })
}

/// Default burst for an NRP line without `burst=`, in units.
pub fn default_burst(max_pkt_size: u64) -> u64 {
    DEFAULT_BURST_PACKETS * max_pkt_size
}

/// The NAS indicator used by every description unless the codec overrides it.
pub const STACK_INDICATOR: u32 = DEFAULT_NAS_INDICATOR;
