//! KDD Cup 1999 record parsing.
//!
//! Each line carries 41 comma-separated feature columns plus a trailing
//! label column ("normal." or an attack name with a trailing dot). Lines
//! with exactly 41 columns are accepted as unlabeled detection input.
//!
//! The three symbolic columns are mapped so the adaptive layer sees a pure
//! numeric matrix: `protocol_type` becomes the protocol enum, while
//! `service` and `flag` become small-integer codes appended after the
//! continuous columns. Unknown symbols map to an overflow code one past the
//! table, and serialize back as the literal `unknown`, so parse → serialize
//! → parse is stable even for symbols outside the tables.
//!
//! The dataset has no timing, so record `i` of a file is assigned the
//! synthetic timestamp `i * delta`.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::net::Ipv4Addr;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::traffic::{FlowRecord, Label, LabeledDataset, Protocol, DATASET_HEADER};

/// Service names in code order, as documented for the dataset.
pub const SERVICES: [&str; 70] = [
    "aol",
    "auth",
    "bgp",
    "courier",
    "csnet_ns",
    "ctf",
    "daytime",
    "discard",
    "domain",
    "domain_u",
    "echo",
    "eco_i",
    "ecr_i",
    "efs",
    "exec",
    "finger",
    "ftp",
    "ftp_data",
    "gopher",
    "harvest",
    "hostnames",
    "http",
    "http_2784",
    "http_443",
    "http_8001",
    "imap4",
    "IRC",
    "iso_tsap",
    "klogin",
    "kshell",
    "ldap",
    "link",
    "login",
    "mtp",
    "name",
    "netbios_dgm",
    "netbios_ns",
    "netbios_ssn",
    "netstat",
    "nnsp",
    "nntp",
    "ntp_u",
    "other",
    "pm_dump",
    "pop_2",
    "pop_3",
    "printer",
    "private",
    "red_i",
    "remote_job",
    "rje",
    "shell",
    "smtp",
    "sql_net",
    "ssh",
    "sunrpc",
    "supdup",
    "systat",
    "telnet",
    "tftp_u",
    "tim_i",
    "time",
    "urh_i",
    "urp_i",
    "uucp",
    "uucp_path",
    "vmnet",
    "whois",
    "X11",
    "Z39_50",
];

/// TCP connection status flags in code order.
pub const FLAGS: [&str; 11] = [
    "OTH", "REJ", "RSTO", "RSTOS0", "RSTR", "S0", "S1", "S2", "S3", "SF", "SH",
];

/// Continuous columns 7..41 of the record, in file order.
const CONTINUOUS_NAMES: [&str; 35] = [
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
];

const FEATURE_COLUMNS: usize = 41;

pub fn service_code(name: &str) -> usize {
    SERVICES.iter().position(|s| *s == name).unwrap_or(SERVICES.len())
}

pub fn service_name(code: usize) -> &'static str {
    SERVICES.get(code).copied().unwrap_or("unknown")
}

pub fn flag_code(name: &str) -> usize {
    FLAGS.iter().position(|s| *s == name).unwrap_or(FLAGS.len())
}

pub fn flag_name(code: usize) -> &'static str {
    FLAGS.get(code).copied().unwrap_or("unknown")
}

/// Names aligned with the `numeric_features` this parser produces: the 35
/// continuous columns followed by the two symbol codes.
pub fn kdd_feature_names() -> Vec<String> {
    let mut names: Vec<String> = CONTINUOUS_NAMES.iter().map(|s| s.to_string()).collect();
    names.push("service_code".to_string());
    names.push("flag_code".to_string());
    names
}

/// Parses one record line. The caller assigns the timestamp.
pub fn parse_kdd_record<F: Scalar>(line: &str) -> Result<FlowRecord<F>> {
    let fields: Vec<&str> = line.split(',').collect();
    let label = match fields.len() {
        n if n == FEATURE_COLUMNS + 1 => {
            let raw = fields[FEATURE_COLUMNS];
            let name = raw.strip_suffix('.').unwrap_or(raw);
            if name.is_empty() {
                return Err(Error::parse(0, FEATURE_COLUMNS + 1, "empty label"));
            }
            if name == "normal" {
                Label::Normal
            } else {
                Label::Attack(name.to_string())
            }
        }
        n if n == FEATURE_COLUMNS => Label::Unlabeled,
        n => {
            return Err(Error::parse(
                0,
                1,
                format!("expected {} or {FEATURE_COLUMNS} columns, got {n}", FEATURE_COLUMNS + 1),
            ))
        }
    };

    let numeric = |i: usize| -> Result<F> {
        let v: F = fields[i]
            .parse()
            .map_err(|_| Error::parse(0, i + 1, format!("not a number: '{}'", fields[i])))?;
        if !v.is_finite() {
            return Err(Error::parse(0, i + 1, "non-finite value"));
        }
        Ok(v)
    };
    let count = |i: usize| -> Result<u64> {
        fields[i]
            .parse()
            .map_err(|_| Error::parse(0, i + 1, format!("not a count: '{}'", fields[i])))
    };

    let duration = numeric(0)?;
    if duration < F::zero() {
        return Err(Error::parse(0, 1, "negative duration"));
    }
    let protocol: Protocol = fields[1]
        .parse()
        .map_err(|_| Error::parse(0, 2, format!("bad protocol_type '{}'", fields[1])))?;
    let service = service_code(fields[2]);
    let flag = flag_code(fields[3]);
    let bytes_in = count(4)?;
    let bytes_out = count(5)?;

    let mut numeric_features = Vec::with_capacity(CONTINUOUS_NAMES.len() + 2);
    for i in 6..FEATURE_COLUMNS {
        numeric_features.push(numeric(i)?);
    }
    numeric_features.push(F::from(service).expect("small code"));
    numeric_features.push(F::from(flag).expect("small code"));

    Ok(FlowRecord {
        timestamp: 0.0,
        src_ip: Ipv4Addr::UNSPECIFIED,
        dst_ip: Ipv4Addr::UNSPECIFIED,
        src_port: 0,
        dst_port: 0,
        protocol,
        duration,
        bytes_in,
        bytes_out,
        numeric_features,
        label,
    })
}

/// Serializes a record parsed from KDD text back to the line format.
pub fn kdd_line<F: Scalar>(rec: &FlowRecord<F>) -> Result<String> {
    let expected = CONTINUOUS_NAMES.len() + 2;
    if rec.numeric_features.len() != expected {
        return Err(Error::invalid(
            "record",
            format!(
                "expected {expected} numeric features from a KDD record, got {}",
                rec.numeric_features.len()
            ),
        ));
    }
    let n = rec.numeric_features.len();
    let service = rec.numeric_features[n - 2]
        .to_usize()
        .ok_or_else(|| Error::invalid("record", "service code is not an index"))?;
    let flag = rec.numeric_features[n - 1]
        .to_usize()
        .ok_or_else(|| Error::invalid("record", "flag code is not an index"))?;

    let mut cols: Vec<String> = Vec::with_capacity(FEATURE_COLUMNS + 1);
    cols.push(rec.duration.to_string());
    cols.push(rec.protocol.to_string());
    cols.push(service_name(service).to_string());
    cols.push(flag_name(flag).to_string());
    cols.push(rec.bytes_in.to_string());
    cols.push(rec.bytes_out.to_string());
    for v in &rec.numeric_features[..n - 2] {
        cols.push(v.to_string());
    }
    match &rec.label {
        Label::Normal => cols.push("normal.".to_string()),
        Label::Attack(name) => cols.push(format!("{name}.")),
        Label::Unlabeled => {}
    }
    Ok(cols.join(","))
}

/// Reads a whole KDD file, assigning timestamp `i * delta` to record `i`.
pub fn read_kdd<F: Scalar>(reader: impl BufRead, delta: f64) -> Result<LabeledDataset<F>> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "must be positive"));
    }
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut rec: FlowRecord<F> = parse_kdd_record(&line).map_err(|e| e.at_line(i + 1))?;
        rec.timestamp = records.len() as f64 * delta;
        records.push(rec);
    }
    if records.is_empty() {
        return Err(Error::EmptyStream);
    }
    LabeledDataset::new(records, kdd_feature_names())
}

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

/// Opens a file, transparently decompressing gzip input.
pub fn open_reader(path: &Path) -> Result<Box<dyn BufRead>> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic)?;
    let file = File::open(path)?;
    if n == 2 && magic == GZIP_MAGIC {
        Ok(Box::new(BufReader::new(flate2::read::GzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Loads a dataset from either supported format, sniffed from the first
/// line: the native tab-separated header, or KDD comma-separated text.
pub fn read_dataset_path<F: Scalar>(path: &Path, delta: f64) -> Result<LabeledDataset<F>> {
    let mut reader = open_reader(path)?;
    let mut first = String::new();
    if reader.read_line(&mut first)? == 0 {
        return Err(Error::EmptyStream);
    }
    if first.trim_end_matches(['\r', '\n']) == DATASET_HEADER {
        LabeledDataset::read_tsv_body(reader)
    } else {
        let joined = std::io::Cursor::new(first).chain(reader);
        read_kdd(BufReader::new(joined), delta)
    }
}
