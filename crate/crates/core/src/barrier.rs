//! Surface barrier: absolute detection by exact matching against known
//! malicious IPv4 addresses and ports.
//!
//! The rule set only grows (no expiry). Every rule remembers where it came
//! from and a logical insertion sequence number; re-inserting an existing
//! value keeps the first writer's provenance.

use std::collections::BTreeMap;
use std::fmt;
use std::net::Ipv4Addr;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::traffic::FlowRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RuleOrigin {
    ExternalFeed,
    TrainingFeedback,
    DetectionFeedback,
    Sync,
}

impl fmt::Display for RuleOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleOrigin::ExternalFeed => "external_feed",
            RuleOrigin::TrainingFeedback => "training_feedback",
            RuleOrigin::DetectionFeedback => "detection_feedback",
            RuleOrigin::Sync => "sync",
        };
        f.write_str(s)
    }
}

impl FromStr for RuleOrigin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "external_feed" => Ok(RuleOrigin::ExternalFeed),
            "training_feedback" => Ok(RuleOrigin::TrainingFeedback),
            "detection_feedback" => Ok(RuleOrigin::DetectionFeedback),
            "sync" => Ok(RuleOrigin::Sync),
            other => Err(Error::invalid("origin", other.to_string())),
        }
    }
}

/// Where a rule came from and when (logical insertion counter, not wall
/// time, so serialized sets are reproducible).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub origin: RuleOrigin,
    pub seq: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchedRule {
    Ip(Ipv4Addr),
    Port(u16),
}

impl fmt::Display for MatchedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchedRule::Ip(ip) => write!(f, "ip {ip}"),
            MatchedRule::Port(p) => write!(f, "port {p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierVerdict {
    pub matched: bool,
    pub probability: f64,
    pub matched_rule: Option<MatchedRule>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BarrierRuleSet {
    ips: BTreeMap<Ipv4Addr, Provenance>,
    ports: BTreeMap<u16, Provenance>,
    next_seq: u64,
}

impl BarrierRuleSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an address rule. Returns false (and keeps the existing
    /// provenance) if the address is already known.
    pub fn add_ip(&mut self, ip: Ipv4Addr, origin: RuleOrigin) -> bool {
        if self.ips.contains_key(&ip) {
            return false;
        }
        let seq = self.take_seq();
        self.ips.insert(ip, Provenance { origin, seq });
        true
    }

    /// Inserts a port rule; same idempotence contract as [`Self::add_ip`].
    pub fn add_port(&mut self, port: u16, origin: RuleOrigin) -> bool {
        if self.ports.contains_key(&port) {
            return false;
        }
        let seq = self.take_seq();
        self.ports.insert(port, Provenance { origin, seq });
        true
    }

    fn take_seq(&mut self) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        seq
    }

    pub fn contains_ip(&self, ip: Ipv4Addr) -> bool {
        self.ips.contains_key(&ip)
    }

    pub fn contains_port(&self, port: u16) -> bool {
        self.ports.contains_key(&port)
    }

    pub fn ips(&self) -> impl Iterator<Item = (Ipv4Addr, Provenance)> + '_ {
        self.ips.iter().map(|(ip, p)| (*ip, *p))
    }

    pub fn ports(&self) -> impl Iterator<Item = (u16, Provenance)> + '_ {
        self.ports.iter().map(|(port, p)| (*port, *p))
    }

    pub fn len(&self) -> usize {
        self.ips.len() + self.ports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ips.is_empty() && self.ports.is_empty()
    }

    /// Set union. Values present in both keep the local provenance; values
    /// new to this set keep the remote origin but are stamped with a fresh
    /// local sequence number. Returns how many rules were added.
    pub fn merge(&mut self, remote: &BarrierRuleSet) -> usize {
        let mut added = 0;
        for (ip, prov) in &remote.ips {
            if self.add_ip(*ip, prov.origin) {
                added += 1;
            }
        }
        for (port, prov) in &remote.ports {
            if self.add_port(*port, prov.origin) {
                added += 1;
            }
        }
        added
    }

    /// One rule per line, addresses sorted lexicographically then ports
    /// ascending, so serialized sets diff cleanly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut ips: Vec<(String, Provenance)> = self
            .ips
            .iter()
            .map(|(ip, p)| (ip.to_string(), *p))
            .collect();
        ips.sort_by(|a, b| a.0.cmp(&b.0));
        for (ip, prov) in ips {
            out.push_str(&format!("ip {ip} {} {}\n", prov.origin, prov.seq));
        }
        for (port, prov) in &self.ports {
            out.push_str(&format!("port {port} {} {}\n", prov.origin, prov.seq));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut set = BarrierRuleSet::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(' ').collect();
            if parts.len() != 4 {
                return Err(Error::parse(line_no, 1, "expected 'ip|port <value> <origin> <seq>'"));
            }
            let origin: RuleOrigin = parts[2]
                .parse()
                .map_err(|_| Error::parse(line_no, 3, format!("bad origin '{}'", parts[2])))?;
            let seq: u64 = parts[3]
                .parse()
                .map_err(|_| Error::parse(line_no, 4, format!("bad seq '{}'", parts[3])))?;
            match parts[0] {
                "ip" => {
                    let ip: Ipv4Addr = parts[1]
                        .parse()
                        .map_err(|_| Error::parse(line_no, 2, format!("bad address '{}'", parts[1])))?;
                    set.ips.insert(ip, Provenance { origin, seq });
                }
                "port" => {
                    let port = validate_port(parts[1])
                        .map_err(|e| Error::parse(line_no, 2, e.to_string()))?;
                    set.ports.insert(port, Provenance { origin, seq });
                }
                other => {
                    return Err(Error::parse(line_no, 1, format!("unknown rule kind '{other}'")));
                }
            }
            set.next_seq = set.next_seq.max(seq + 1);
        }
        Ok(set)
    }
}

/// Parses a port value, rejecting anything outside 0-65535.
pub fn validate_port(s: &str) -> Result<u16> {
    let wide: u64 = s
        .parse()
        .map_err(|_| Error::invalid("port", format!("not an integer: '{s}'")))?;
    u16::try_from(wide).map_err(|_| Error::invalid("port", format!("{wide} outside 0-65535")))
}

/// Exact value matching; the first match in the fixed order src_ip, dst_ip,
/// src_port, dst_port wins. The verdict is crisp: probability 1 or 0.
pub fn check<F: Scalar>(flow: &FlowRecord<F>, rules: &BarrierRuleSet) -> BarrierVerdict {
    let matched_rule = if rules.contains_ip(flow.src_ip) {
        Some(MatchedRule::Ip(flow.src_ip))
    } else if rules.contains_ip(flow.dst_ip) {
        Some(MatchedRule::Ip(flow.dst_ip))
    } else if rules.contains_port(flow.src_port) {
        Some(MatchedRule::Port(flow.src_port))
    } else if rules.contains_port(flow.dst_port) {
        Some(MatchedRule::Port(flow.dst_port))
    } else {
        None
    };
    BarrierVerdict {
        matched: matched_rule.is_some(),
        probability: if matched_rule.is_some() { 1.0 } else { 0.0 },
        matched_rule,
    }
}
