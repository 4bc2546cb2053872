//! Flow records, traffic sequences and per-characteristic feature
//! extraction.
//!
//! Records either come from KDD Cup 1999 text (see [`crate::kdd`]) or from
//! the engine's own tab-separated dataset format. Timestamps are synthetic:
//! record `i` of a file is assigned `i * delta` seconds on ingest, so the
//! innate layer always has an ordering to window over.

use std::fmt;
use std::io::{BufRead, Write};
use std::net::Ipv4Addr;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

pub const DATASET_HEADER: &str = "#immunids-dataset v1";

/// Fixed flow columns preceding the per-dataset feature columns in the
/// tab-separated format.
const FIXED_COLUMNS: [&str; 10] = [
    "timestamp",
    "src_ip",
    "dst_ip",
    "src_port",
    "dst_port",
    "protocol",
    "duration",
    "bytes_in",
    "bytes_out",
    "label",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    Tcp,
    Udp,
    Icmp,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Protocol::Tcp => "tcp",
            Protocol::Udp => "udp",
            Protocol::Icmp => "icmp",
        };
        f.write_str(s)
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tcp" => Ok(Protocol::Tcp),
            "udp" => Ok(Protocol::Udp),
            "icmp" => Ok(Protocol::Icmp),
            other => Err(Error::invalid("protocol", other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Normal,
    Attack(String),
    Unlabeled,
}

impl Label {
    pub fn is_attack(&self) -> bool {
        matches!(self, Label::Attack(_))
    }

    pub fn is_normal(&self) -> bool {
        matches!(self, Label::Normal)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Normal => f.write_str("normal"),
            Label::Attack(name) => write!(f, "attack:{name}"),
            Label::Unlabeled => f.write_str("unlabeled"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(Label::Normal),
            "unlabeled" => Ok(Label::Unlabeled),
            other => match other.strip_prefix("attack:") {
                Some(name) if !name.is_empty() => Ok(Label::Attack(name.to_string())),
                _ => Err(Error::invalid("label", other.to_string())),
            },
        }
    }
}

/// One observed network flow. For KDD data the address and port fields are
/// unspecified (`0.0.0.0` / port 0) because the dataset does not carry them;
/// the barrier skips unspecified values when learning rules.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRecord<F: Scalar = f64> {
    pub timestamp: f64,
    pub src_ip: Ipv4Addr,
    pub dst_ip: Ipv4Addr,
    pub src_port: u16,
    pub dst_port: u16,
    pub protocol: Protocol,
    pub duration: F,
    pub bytes_in: u64,
    pub bytes_out: u64,
    pub numeric_features: Vec<F>,
    pub label: Label,
}

impl<F: Scalar> FlowRecord<F> {
    /// Full numeric view of the record, the layout the adaptive layer is
    /// trained on: duration, byte counts, then the remaining features.
    pub fn feature_vector(&self) -> Vec<F> {
        let mut v = Vec::with_capacity(3 + self.numeric_features.len());
        v.push(self.duration);
        v.push(scalar::from_u64(self.bytes_in));
        v.push(scalar::from_u64(self.bytes_out));
        v.extend_from_slice(&self.numeric_features);
        v
    }

    pub fn has_src_ip(&self) -> bool {
        !self.src_ip.is_unspecified()
    }

    pub fn has_dst_port(&self) -> bool {
        self.dst_port != 0
    }
}

/// Built-in per-window aggregates a characteristic can select.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extractor {
    BytesInRate,
    BytesOutRate,
    MeanDuration,
}

impl fmt::Display for Extractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Extractor::BytesInRate => "bytes_in_rate",
            Extractor::BytesOutRate => "bytes_out_rate",
            Extractor::MeanDuration => "mean_duration",
        };
        f.write_str(s)
    }
}

impl FromStr for Extractor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bytes_in_rate" => Ok(Extractor::BytesInRate),
            "bytes_out_rate" => Ok(Extractor::BytesOutRate),
            "mean_duration" => Ok(Extractor::MeanDuration),
            other => Err(Error::invalid("extractor", other.to_string())),
        }
    }
}

/// A single traffic parameter one innate detector monitors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Characteristic {
    pub id: String,
    pub description: String,
    pub extractor: Extractor,
}

impl Characteristic {
    pub fn new(id: impl Into<String>, description: impl Into<String>, extractor: Extractor) -> Self {
        Characteristic {
            id: id.into(),
            description: description.into(),
            extractor,
        }
    }
}

/// The default detector registry: incoming rate, outgoing rate, and request
/// handling time.
pub fn default_characteristics() -> Vec<Characteristic> {
    vec![
        Characteristic::new(
            "bytes_in_rate",
            "incoming data rate in bytes/sec",
            Extractor::BytesInRate,
        ),
        Characteristic::new(
            "bytes_out_rate",
            "outgoing data rate in bytes/sec",
            Extractor::BytesOutRate,
        ),
        Characteristic::new(
            "mean_duration",
            "time required to handle incoming request",
            Extractor::MeanDuration,
        ),
    ]
}

/// One value per time window for a single characteristic.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficSequence<F: Scalar = f64> {
    pub characteristic: String,
    pub values: Vec<F>,
    pub window_seconds: f64,
}

/// Buckets sorted records into consecutive half-open windows
/// `[t_first + k*w, t_first + (k+1)*w)` and emits one aggregate value per
/// window. A record exactly on a boundary belongs to the later window.
pub fn extract_sequence<F: Scalar>(
    records: &[FlowRecord<F>],
    characteristic: &Characteristic,
    window_seconds: f64,
) -> Result<TrafficSequence<F>> {
    if records.is_empty() {
        return Err(Error::EmptyStream);
    }
    if !(window_seconds > 0.0) {
        return Err(Error::invalid("window_seconds", "must be positive"));
    }
    if records.windows(2).any(|w| w[1].timestamp < w[0].timestamp) {
        return Err(Error::Unsorted);
    }

    let t0 = records[0].timestamp;
    let t_last = records[records.len() - 1].timestamp;
    let windows = ((t_last - t0) / window_seconds).floor() as usize + 1;

    let mut sums = vec![0u64; windows];
    let mut dur_sums = vec![F::zero(); windows];
    let mut counts = vec![0usize; windows];
    for rec in records {
        let k = ((rec.timestamp - t0) / window_seconds).floor() as usize;
        let k = k.min(windows - 1);
        counts[k] += 1;
        match characteristic.extractor {
            Extractor::BytesInRate => sums[k] += rec.bytes_in,
            Extractor::BytesOutRate => sums[k] += rec.bytes_out,
            Extractor::MeanDuration => dur_sums[k] = dur_sums[k] + rec.duration,
        }
    }

    let w = scalar::from_f64::<F>(window_seconds);
    let values = (0..windows)
        .map(|k| match characteristic.extractor {
            Extractor::BytesInRate | Extractor::BytesOutRate => scalar::from_u64::<F>(sums[k]) / w,
            Extractor::MeanDuration => {
                if counts[k] == 0 {
                    F::zero()
                } else {
                    dur_sums[k] / scalar::from_usize(counts[k])
                }
            }
        })
        .collect();

    Ok(TrafficSequence {
        characteristic: characteristic.id.clone(),
        values,
        window_seconds,
    })
}

/// An ordered record collection with aligned feature names.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<F: Scalar = f64> {
    records: Vec<FlowRecord<F>>,
    feature_names: Vec<String>,
}

impl<F: Scalar> LabeledDataset<F> {
    /// Builds a dataset, stably sorting records by timestamp. Every record
    /// must have as many numeric features as there are feature names.
    pub fn new(mut records: Vec<FlowRecord<F>>, feature_names: Vec<String>) -> Result<Self> {
        for (i, rec) in records.iter().enumerate() {
            if rec.numeric_features.len() != feature_names.len() {
                return Err(Error::invalid(
                    "dataset",
                    format!(
                        "record {i} has {} features, expected {}",
                        rec.numeric_features.len(),
                        feature_names.len()
                    ),
                ));
            }
        }
        records.sort_by(|a, b| {
            a.timestamp
                .partial_cmp(&b.timestamp)
                .expect("finite timestamps")
        });
        Ok(LabeledDataset {
            records,
            feature_names,
        })
    }

    pub fn records(&self) -> &[FlowRecord<F>] {
        &self.records
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Names aligned with [`FlowRecord::feature_vector`].
    pub fn full_feature_names(&self) -> Vec<String> {
        let mut names = vec![
            "duration".to_string(),
            "bytes_in".to_string(),
            "bytes_out".to_string(),
        ];
        names.extend(self.feature_names.iter().cloned());
        names
    }

    pub fn feature_matrix(&self) -> Vec<Vec<F>> {
        self.records.iter().map(|r| r.feature_vector()).collect()
    }

    /// Binary class per record: 0 = normal, 1 = attack. Unlabeled records
    /// are rejected.
    pub fn binary_labels(&self) -> Result<Vec<usize>> {
        self.records
            .iter()
            .map(|r| match &r.label {
                Label::Normal => Ok(0),
                Label::Attack(_) => Ok(1),
                Label::Unlabeled => Err(Error::invalid("dataset", "unlabeled record")),
            })
            .collect()
    }

    pub fn has_both_classes(&self) -> bool {
        self.records.iter().any(|r| r.label.is_normal())
            && self.records.iter().any(|r| r.label.is_attack())
    }

    /// Writes the versioned tab-separated dataset format.
    pub fn write_tsv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{DATASET_HEADER}")?;
        let mut header: Vec<&str> = FIXED_COLUMNS.to_vec();
        header.extend(self.feature_names.iter().map(|s| s.as_str()));
        writeln!(out, "{}", header.join("\t"))?;
        for rec in &self.records {
            let mut cols: Vec<String> = vec![
                rec.timestamp.to_string(),
                rec.src_ip.to_string(),
                rec.dst_ip.to_string(),
                rec.src_port.to_string(),
                rec.dst_port.to_string(),
                rec.protocol.to_string(),
                rec.duration.to_string(),
                rec.bytes_in.to_string(),
                rec.bytes_out.to_string(),
                rec.label.to_string(),
            ];
            cols.extend(rec.numeric_features.iter().map(|v| v.to_string()));
            writeln!(out, "{}", cols.join("\t"))?;
        }
        Ok(())
    }

    /// Reads the tab-separated format written by [`Self::write_tsv`].
    /// The caller has already consumed the header line.
    pub fn read_tsv_body(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(2, 1, "missing column header"))??;
        let cols: Vec<&str> = header.split('\t').collect();
        if cols.len() < FIXED_COLUMNS.len() {
            return Err(Error::parse(2, 1, "column header too short"));
        }
        for (i, name) in FIXED_COLUMNS.iter().enumerate() {
            if cols[i] != *name {
                return Err(Error::parse(
                    2,
                    i + 1,
                    format!("expected column '{name}', got '{}'", cols[i]),
                ));
            }
        }
        let feature_names: Vec<String> = cols[FIXED_COLUMNS.len()..]
            .iter()
            .map(|s| s.to_string())
            .collect();

        let mut records = Vec::new();
        for (idx, line) in lines.enumerate() {
            let line = line?;
            let line_no = idx + 3;
            if line.is_empty() {
                continue;
            }
            records.push(parse_tsv_record(&line, feature_names.len()).map_err(|e| e.at_line(line_no))?);
        }
        LabeledDataset::new(records, feature_names)
    }
}

fn parse_tsv_record<F: Scalar>(line: &str, n_features: usize) -> Result<FlowRecord<F>> {
    let fields: Vec<&str> = line.split('\t').collect();
    let expected = FIXED_COLUMNS.len() + n_features;
    if fields.len() != expected {
        return Err(Error::parse(
            0,
            1,
            format!("expected {expected} columns, got {}", fields.len()),
        ));
    }
    let col = |i: usize| -> usize { i + 1 };
    let parse_num = |i: usize| -> Result<F> {
        let v: F = fields[i]
            .parse()
            .map_err(|_| Error::parse(0, col(i), format!("not a number: '{}'", fields[i])))?;
        if !v.is_finite() {
            return Err(Error::parse(0, col(i), "non-finite value"));
        }
        Ok(v)
    };

    let timestamp: f64 = fields[0]
        .parse()
        .map_err(|_| Error::parse(0, col(0), "bad timestamp"))?;
    let src_ip: Ipv4Addr = fields[1]
        .parse()
        .map_err(|_| Error::parse(0, col(1), "bad src_ip"))?;
    let dst_ip: Ipv4Addr = fields[2]
        .parse()
        .map_err(|_| Error::parse(0, col(2), "bad dst_ip"))?;
    let src_port: u16 = fields[3]
        .parse()
        .map_err(|_| Error::parse(0, col(3), "port outside 0-65535"))?;
    let dst_port: u16 = fields[4]
        .parse()
        .map_err(|_| Error::parse(0, col(4), "port outside 0-65535"))?;
    let protocol: Protocol = fields[5].parse().map_err(|e: Error| match e {
        Error::Invalid { message, .. } => Error::parse(0, col(5), format!("bad protocol '{message}'")),
        other => other,
    })?;
    let duration = parse_num(6)?;
    if duration < F::zero() {
        return Err(Error::parse(0, col(6), "negative duration"));
    }
    let bytes_in: u64 = fields[7]
        .parse()
        .map_err(|_| Error::parse(0, col(7), "bad bytes_in"))?;
    let bytes_out: u64 = fields[8]
        .parse()
        .map_err(|_| Error::parse(0, col(8), "bad bytes_out"))?;
    let label: Label = fields[9].parse().map_err(|e: Error| match e {
        Error::Invalid { message, .. } => Error::parse(0, col(9), format!("bad label '{message}'")),
        other => other,
    })?;
    let mut numeric_features = Vec::with_capacity(n_features);
    for i in FIXED_COLUMNS.len()..fields.len() {
        numeric_features.push(parse_num(i)?);
    }
    Ok(FlowRecord {
        timestamp,
        src_ip,
        dst_ip,
        src_port,
        dst_port,
        protocol,
        duration,
        bytes_in,
        bytes_out,
        numeric_features,
        label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64, bytes_in: u64) -> FlowRecord {
        FlowRecord {
            timestamp: t,
            src_ip: Ipv4Addr::UNSPECIFIED,
            dst_ip: Ipv4Addr::UNSPECIFIED,
            src_port: 0,
            dst_port: 0,
            protocol: Protocol::Tcp,
            duration: 0.0,
            bytes_in,
            bytes_out: 2 * bytes_in,
            numeric_features: vec![],
            label: Label::Normal,
        }
    }

    fn bytes_in_rate() -> Characteristic {
        default_characteristics().remove(0)
    }

    #[test]
    fn single_window_sums_bytes() {
        let recs = vec![rec(0.0, 100), rec(0.5, 200)];
        let seq = extract_sequence(&recs, &bytes_in_rate(), 1.0).unwrap();
        assert_eq!(seq.values, vec![300.0]);
    }

    #[test]
    fn empty_middle_window_is_zero() {
        let recs = vec![rec(0.0, 10), rec(2.5, 20)];
        let seq = extract_sequence(&recs, &bytes_in_rate(), 1.0).unwrap();
        assert_eq!(seq.values, vec![10.0, 0.0, 20.0]);
    }

    #[test]
    fn hand_bucketed_three_windows() {
        let recs = vec![rec(0.0, 10), rec(0.5, 20), rec(1.2, 30), rec(2.9, 40)];
        let seq = extract_sequence(&recs, &bytes_in_rate(), 1.0).unwrap();
        assert_eq!(seq.values, vec![30.0, 30.0, 40.0]);
    }

    #[test]
    fn boundary_record_starts_later_window() {
        let recs = vec![rec(0.0, 1), rec(1.0, 2)];
        let seq = extract_sequence(&recs, &bytes_in_rate(), 1.0).unwrap();
        assert_eq!(seq.values, vec![1.0, 2.0]);
    }

    #[test]
    fn empty_stream_rejected() {
        let recs: Vec<FlowRecord> = vec![];
        assert!(matches!(
            extract_sequence(&recs, &bytes_in_rate(), 1.0),
            Err(Error::EmptyStream)
        ));
    }

    #[test]
    fn unsorted_input_rejected() {
        let recs = vec![rec(1.0, 1), rec(0.0, 2)];
        assert!(matches!(
            extract_sequence(&recs, &bytes_in_rate(), 1.0),
            Err(Error::Unsorted)
        ));
    }

    #[test]
    fn mean_duration_zero_for_empty_window() {
        let mut a = rec(0.0, 0);
        a.duration = 3.0;
        let mut b = rec(2.0, 0);
        b.duration = 1.0;
        let c = Characteristic::new("d", "", Extractor::MeanDuration);
        let seq = extract_sequence(&[a, b], &c, 1.0).unwrap();
        assert_eq!(seq.values, vec![3.0, 0.0, 1.0]);
    }

    #[test]
    fn dataset_sorts_stably_and_validates_widths() {
        let mut a = rec(1.0, 1);
        a.numeric_features = vec![1.0];
        let mut b = rec(0.0, 2);
        b.numeric_features = vec![2.0];
        let ds = LabeledDataset::new(vec![a, b], vec!["f0".into()]).unwrap();
        assert_eq!(ds.records()[0].timestamp, 0.0);

        let mut bad = rec(0.0, 0);
        bad.numeric_features = vec![1.0, 2.0];
        assert!(LabeledDataset::new(vec![bad], vec!["f0".into()]).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let mut a = rec(0.0, 7);
        a.src_ip = "10.0.0.1".parse().unwrap();
        a.dst_port = 6667;
        a.numeric_features = vec![0.5, 2.0];
        a.label = Label::Attack("smurf".into());
        let mut b = rec(1.0, 9);
        b.numeric_features = vec![0.25, -1.5];
        let ds = LabeledDataset::new(vec![a, b], vec!["x".into(), "y".into()]).unwrap();

        let mut buf = Vec::new();
        ds.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.as_bytes();
        let mut first = String::new();
        lines.read_line(&mut first).unwrap();
        assert_eq!(first.trim_end(), DATASET_HEADER);
        let back = LabeledDataset::read_tsv_body(lines).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn generic_over_f32() {
        let recs: Vec<FlowRecord<f32>> = vec![FlowRecord {
            timestamp: 0.0,
            src_ip: Ipv4Addr::UNSPECIFIED,
            dst_ip: Ipv4Addr::UNSPECIFIED,
            src_port: 0,
            dst_port: 0,
            protocol: Protocol::Udp,
            duration: 0.5f32,
            bytes_in: 100,
            bytes_out: 0,
            numeric_features: vec![],
            label: Label::Normal,
        }];
        let seq = extract_sequence(&recs, &bytes_in_rate(), 1.0).unwrap();
        assert_eq!(seq.values, vec![100.0f32]);
    }
}
