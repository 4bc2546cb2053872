//! Innate immune layer: per-characteristic detectors that classify traffic
//! sequences as self or non-self by Dynamic Time Warping distance to
//! pattern templates.
//!
//! The DTW table uses the symmetric weighting: a diagonal step costs twice
//! the local distance, horizontal and vertical steps cost it once, and the
//! first cell is seeded with `2 d(1,1)`. The accumulated path cost is
//! normalized by the constant `n + m` so distances of differently sized
//! sequences compare.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};
use crate::traffic::{Characteristic, LabeledDataset, TrafficSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PatternClass {
    Self_,
    NonSelf,
}

impl fmt::Display for PatternClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternClass::Self_ => f.write_str("self"),
            PatternClass::NonSelf => f.write_str("nonself"),
        }
    }
}

impl FromStr for PatternClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "self" => Ok(PatternClass::Self_),
            "nonself" => Ok(PatternClass::NonSelf),
            other => Err(Error::invalid("pattern class", other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PatternOrigin {
    ExternalFeed,
    Training,
    DetectionFeedback,
    Sync,
}

impl fmt::Display for PatternOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PatternOrigin::ExternalFeed => "external_feed",
            PatternOrigin::Training => "training",
            PatternOrigin::DetectionFeedback => "detection_feedback",
            PatternOrigin::Sync => "sync",
        };
        f.write_str(s)
    }
}

impl FromStr for PatternOrigin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "external_feed" => Ok(PatternOrigin::ExternalFeed),
            "training" => Ok(PatternOrigin::Training),
            "detection_feedback" => Ok(PatternOrigin::DetectionFeedback),
            "sync" => Ok(PatternOrigin::Sync),
            other => Err(Error::invalid("pattern origin", other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pattern<F: Scalar = f64> {
    pub id: String,
    pub class: PatternClass,
    pub sequence: Vec<F>,
    pub characteristic: String,
    pub origin: PatternOrigin,
}

impl<F: Scalar> Pattern<F> {
    pub fn new(
        id: impl Into<String>,
        class: PatternClass,
        sequence: Vec<F>,
        characteristic: impl Into<String>,
        origin: PatternOrigin,
    ) -> Result<Self> {
        if sequence.is_empty() {
            return Err(Error::EmptySequence);
        }
        if sequence.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "pattern sequence" });
        }
        Ok(Pattern {
            id: id.into(),
            class,
            sequence,
            characteristic: characteristic.into(),
            origin,
        })
    }
}

/// Serializes a pattern in the line format
/// `<characteristic> <self|nonself> <comma-separated values> <origin>`.
/// The id is positional and regenerated on load.
pub fn pattern_line<F: Scalar>(p: &Pattern<F>) -> String {
    let values: Vec<String> = p.sequence.iter().map(|v| v.to_string()).collect();
    format!("{} {} {} {}", p.characteristic, p.class, values.join(","), p.origin)
}

pub fn parse_pattern_line<F: Scalar>(line: &str, id: impl Into<String>) -> Result<Pattern<F>> {
    let parts: Vec<&str> = line.split(' ').collect();
    if parts.len() != 4 {
        return Err(Error::parse(0, 1, "expected '<characteristic> <class> <values> <origin>'"));
    }
    let class: PatternClass = parts[1]
        .parse()
        .map_err(|_| Error::parse(0, 2, format!("bad pattern class '{}'", parts[1])))?;
    let mut sequence = Vec::new();
    for (i, tok) in parts[2].split(',').enumerate() {
        let v: F = tok
            .parse()
            .map_err(|_| Error::parse(0, 3, format!("bad value {} '{tok}'", i + 1)))?;
        sequence.push(v);
    }
    let origin: PatternOrigin = parts[3]
        .parse()
        .map_err(|_| Error::parse(0, 4, format!("bad origin '{}'", parts[3])))?;
    Pattern::new(id, class, sequence, parts[0], origin)
}

/// All patterns one detector matches against. Every member shares the
/// set's characteristic and ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSet<F: Scalar = f64> {
    characteristic: String,
    patterns: Vec<Pattern<F>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOutcome {
    Added,
    /// The identical sequence with the same label is already present.
    SkippedDuplicate,
}

impl<F: Scalar> PatternSet<F> {
    pub fn new(characteristic: impl Into<String>) -> Self {
        PatternSet {
            characteristic: characteristic.into(),
            patterns: Vec::new(),
        }
    }

    pub fn characteristic(&self) -> &str {
        &self.characteristic
    }

    pub fn patterns(&self) -> &[Pattern<F>] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn count_class(&self, class: PatternClass) -> usize {
        self.patterns.iter().filter(|p| p.class == class).count()
    }

    /// Appends a pattern. A duplicate sequence under the same label is
    /// skipped; the same sequence under the opposite label is a
    /// contradiction and surfaces as an error, as does an id collision.
    pub fn add(&mut self, p: Pattern<F>) -> Result<AddOutcome> {
        if p.characteristic != self.characteristic {
            return Err(Error::CharacteristicMismatch {
                expected: self.characteristic.clone(),
                got: p.characteristic,
            });
        }
        for existing in &self.patterns {
            if existing.sequence == p.sequence {
                if existing.class == p.class {
                    return Ok(AddOutcome::SkippedDuplicate);
                }
                return Err(Error::PatternConflict { id: p.id });
            }
        }
        if self.patterns.iter().any(|e| e.id == p.id) {
            return Err(Error::PatternIdConflict { id: p.id });
        }
        self.patterns.push(p);
        Ok(AddOutcome::Added)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtwResult<F: Scalar = f64> {
    /// Normalized distance `g(n, m) / (n + m)`.
    pub distance: F,
    /// Accumulated weighted path cost `g(n, m)`.
    pub path_cost: F,
    /// The constant normalizer `n + m`.
    pub normalizer: usize,
}

/// Dynamic Time Warping distance between two univariate sequences with the
/// symmetric step weighting (1, 2, 1) and local cost `|a_i - b_j|`.
pub fn dtw_distance<F: Scalar>(a: &[F], b: &[F]) -> Result<DtwResult<F>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySequence);
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "dtw input" });
    }

    let n = a.len();
    let m = b.len();
    let two = scalar::from_f64::<F>(2.0);

    // Row i of g, swept over a; prev holds row i-1.
    let mut prev = vec![F::zero(); m];
    let mut curr = vec![F::zero(); m];

    for j in 0..m {
        let d = (a[0] - b[j]).abs();
        prev[j] = if j == 0 { two * d } else { prev[j - 1] + d };
    }
    for i in 1..n {
        for j in 0..m {
            let d = (a[i] - b[j]).abs();
            curr[j] = if j == 0 {
                prev[0] + d
            } else {
                let horizontal = curr[j - 1] + d;
                let diagonal = prev[j - 1] + two * d;
                let vertical = prev[j] + d;
                horizontal.min(diagonal).min(vertical)
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }

    let path_cost = prev[m - 1];
    let normalizer = n + m;
    Ok(DtwResult {
        distance: path_cost / scalar::from_usize(normalizer),
        path_cost,
        normalizer,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnateVerdict<F: Scalar = f64> {
    pub probability: F,
    pub nearest_self: (String, F),
    pub nearest_nonself: (String, F),
    pub characteristic: String,
}

/// The distance-to-probability mapping, isolated so it stays the single
/// interpretation point: P = Ds / (Ds + Dn), with the boundary conventions
/// Ds = Dn = 0 -> 0.5, Dn = 0 -> 1, Ds = 0 -> 0.
pub fn probability_from_distances<F: Scalar>(d_self: F, d_nonself: F) -> F {
    let zero = F::zero();
    if d_self == zero && d_nonself == zero {
        return scalar::from_f64(0.5);
    }
    if d_nonself == zero {
        return F::one();
    }
    if d_self == zero {
        return zero;
    }
    d_self / (d_self + d_nonself)
}

/// Matches a sequence against every pattern in the set and maps the two
/// nearest-class distances to an intrusion probability. Distance ties are
/// broken toward the lexicographically lowest pattern id.
pub fn classify_sequence<F: Scalar>(
    seq: &TrafficSequence<F>,
    pats: &PatternSet<F>,
) -> Result<InnateVerdict<F>> {
    if seq.characteristic != pats.characteristic {
        return Err(Error::CharacteristicMismatch {
            expected: pats.characteristic.clone(),
            got: seq.characteristic.clone(),
        });
    }
    let mut nearest_self: Option<(String, F)> = None;
    let mut nearest_nonself: Option<(String, F)> = None;
    for p in &pats.patterns {
        let d = dtw_distance(&seq.values, &p.sequence)?.distance;
        let slot = match p.class {
            PatternClass::Self_ => &mut nearest_self,
            PatternClass::NonSelf => &mut nearest_nonself,
        };
        let better = match slot {
            None => true,
            Some((best_id, best_d)) => d < *best_d || (d == *best_d && p.id < *best_id),
        };
        if better {
            *slot = Some((p.id.clone(), d));
        }
    }
    let nearest_self = nearest_self.ok_or_else(|| Error::MissingPatternClass {
        characteristic: pats.characteristic.clone(),
        class: "self",
    })?;
    let nearest_nonself = nearest_nonself.ok_or_else(|| Error::MissingPatternClass {
        characteristic: pats.characteristic.clone(),
        class: "nonself",
    })?;
    Ok(InnateVerdict {
        probability: probability_from_distances(nearest_self.1, nearest_nonself.1),
        nearest_self,
        nearest_nonself,
        characteristic: pats.characteristic.clone(),
    })
}

/// Learns self and non-self pattern templates from labeled traffic.
///
/// Normal-labeled and attack-labeled records are windowed separately, the
/// resulting sequences sliced into non-overlapping segments of
/// `segment_len` (a shorter trailing segment is kept), and segments
/// deduplicated. A segment observed under both labels carries no signal
/// and is dropped from both classes. Data without any normal records
/// cannot produce self templates and is rejected; attack records are
/// optional here because nonself templates may also arrive from the
/// external feed.
pub fn learn_patterns_from_training<F: Scalar>(
    data: &LabeledDataset<F>,
    c: &Characteristic,
    window_seconds: f64,
    segment_len: usize,
) -> Result<Vec<Pattern<F>>> {
    if segment_len < 2 {
        return Err(Error::invalid("segment_len", "must be at least 2"));
    }
    if data.records().iter().any(|r| matches!(r.label, crate::traffic::Label::Unlabeled)) {
        return Err(Error::invalid("training data", "contains unlabeled records"));
    }
    let normal: Vec<_> = data
        .records()
        .iter()
        .filter(|r| r.label.is_normal())
        .cloned()
        .collect();
    let attack: Vec<_> = data
        .records()
        .iter()
        .filter(|r| r.label.is_attack())
        .cloned()
        .collect();
    if normal.is_empty() {
        return Err(Error::SingleClass { missing: "normal" });
    }

    let mut self_segments = segment_values(
        &crate::traffic::extract_sequence(&normal, c, window_seconds)?.values,
        segment_len,
    );
    let mut nonself_segments = if attack.is_empty() {
        Vec::new()
    } else {
        segment_values(
            &crate::traffic::extract_sequence(&attack, c, window_seconds)?.values,
            segment_len,
        )
    };

    let ambiguous: Vec<Vec<F>> = self_segments
        .iter()
        .filter(|s| nonself_segments.contains(s))
        .cloned()
        .collect();
    self_segments.retain(|s| !ambiguous.contains(s));
    nonself_segments.retain(|s| !ambiguous.contains(s));

    let mut out = Vec::new();
    for (k, seg) in self_segments.into_iter().enumerate() {
        out.push(Pattern::new(
            format!("{}-self-{k}", c.id),
            PatternClass::Self_,
            seg,
            c.id.clone(),
            PatternOrigin::Training,
        )?);
    }
    for (k, seg) in nonself_segments.into_iter().enumerate() {
        out.push(Pattern::new(
            format!("{}-nonself-{k}", c.id),
            PatternClass::NonSelf,
            seg,
            c.id.clone(),
            PatternOrigin::Training,
        )?);
    }
    Ok(out)
}

/// Non-overlapping segments in first-occurrence order, exact duplicates
/// removed.
fn segment_values<F: Scalar>(values: &[F], segment_len: usize) -> Vec<Vec<F>> {
    let mut segments: Vec<Vec<F>> = Vec::new();
    for chunk in values.chunks(segment_len) {
        let seg = chunk.to_vec();
        if !segments.contains(&seg) {
            segments.push(seg);
        }
    }
    segments
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(values: Vec<f64>) -> TrafficSequence {
        TrafficSequence {
            characteristic: "c".into(),
            values,
            window_seconds: 1.0,
        }
    }

    fn pat(id: &str, class: PatternClass, values: Vec<f64>) -> Pattern {
        Pattern::new(id, class, values, "c", PatternOrigin::ExternalFeed).unwrap()
    }

    #[test]
    fn identical_sequences_have_zero_distance() {
        let a = [1.0, 5.0, 2.0, 7.5];
        let r = dtw_distance(&a, &a).unwrap();
        assert_eq!(r.distance, 0.0);
        assert_eq!(r.path_cost, 0.0);
        assert_eq!(r.normalizer, 8);
    }

    #[test]
    fn singletons_reduce_to_absolute_difference() {
        let r = dtw_distance(&[3.0], &[7.5]).unwrap();
        assert_eq!(r.path_cost, 9.0);
        assert_eq!(r.normalizer, 2);
        assert_eq!(r.distance, 4.5);
    }

    #[test]
    fn worked_table_example() {
        // a=[1,3] vs b=[1,2,3]: the cheapest warping path accumulates
        // g(2,3)=1 and the normalizer is 5.
        let r = dtw_distance(&[1.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.path_cost, 1.0);
        assert_eq!(r.normalizer, 5);
        assert_eq!(r.distance, 0.2);
    }

    #[test]
    fn distance_is_symmetric() {
        let a = [0.0, 2.0, 1.5, 9.0];
        let b = [1.0, 1.0, 4.0];
        let ab = dtw_distance(&a, &b).unwrap();
        let ba = dtw_distance(&b, &a).unwrap();
        assert_eq!(ab.distance, ba.distance);
        assert_eq!(ab.path_cost, ba.path_cost);
    }

    #[test]
    fn empty_and_non_finite_inputs_error() {
        assert!(matches!(
            dtw_distance::<f64>(&[], &[1.0]),
            Err(Error::EmptySequence)
        ));
        assert!(matches!(
            dtw_distance(&[1.0], &[f64::NAN]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn exact_nonself_match_gives_probability_one() {
        let mut set = PatternSet::new("c");
        set.add(pat("s0", PatternClass::Self_, vec![0.0, 0.0])).unwrap();
        set.add(pat("n0", PatternClass::NonSelf, vec![5.0, 5.0])).unwrap();
        let v = classify_sequence(&seq(vec![5.0, 5.0]), &set).unwrap();
        assert_eq!(v.probability, 1.0);
        assert_eq!(v.nearest_nonself, ("n0".to_string(), 0.0));
    }

    #[test]
    fn exact_self_match_gives_probability_zero() {
        let mut set = PatternSet::new("c");
        set.add(pat("s0", PatternClass::Self_, vec![0.0, 0.0])).unwrap();
        set.add(pat("n0", PatternClass::NonSelf, vec![5.0, 5.0])).unwrap();
        let v = classify_sequence(&seq(vec![0.0, 0.0]), &set).unwrap();
        assert_eq!(v.probability, 0.0);
    }

    #[test]
    fn near_nonself_sequence_scores_high() {
        // Hand-checked distances: Ds = 61/6 against [0,0,0] and
        // Dn = 1/6 against [10,10,10], so P = 61/62.
        let mut set = PatternSet::new("c");
        set.add(pat("s0", PatternClass::Self_, vec![0.0, 0.0, 0.0])).unwrap();
        set.add(pat("n0", PatternClass::NonSelf, vec![10.0, 10.0, 10.0])).unwrap();
        let v = classify_sequence(&seq(vec![10.0, 10.0, 10.5]), &set).unwrap();
        assert_eq!(v.nearest_self.1, 61.0 / 6.0);
        assert_eq!(v.nearest_nonself.1, 1.0 / 6.0);
        assert_eq!(v.probability, (61.0 / 6.0) / (61.0 / 6.0 + 1.0 / 6.0));
        assert!(v.probability > 0.9);
    }

    #[test]
    fn equal_distances_give_half() {
        assert_eq!(probability_from_distances(0.0, 0.0), 0.5);
        assert_eq!(probability_from_distances(3.0, 3.0), 0.5);
    }

    #[test]
    fn distance_ties_break_toward_lowest_id() {
        let mut set = PatternSet::new("c");
        set.add(pat("s-b", PatternClass::Self_, vec![1.0])).unwrap();
        set.add(pat("s-a", PatternClass::Self_, vec![0.0, 2.0])).unwrap();
        set.add(pat("n0", PatternClass::NonSelf, vec![9.0])).unwrap();
        // Both self patterns are at distance 0.5 from [1,1]:
        // |1-1|*... vs [1]: cost 2*0+... = hand-checked equal.
        let v = classify_sequence(&seq(vec![1.0, 1.0]), &set).unwrap();
        assert_eq!(v.nearest_self.1, dtw_distance(&[1.0, 1.0], &[1.0]).unwrap().distance);
        let d_other = dtw_distance(&[1.0, 1.0], &[0.0, 2.0]).unwrap().distance;
        assert_eq!(v.nearest_self.1, d_other);
        assert_eq!(v.nearest_self.0, "s-a");
    }

    #[test]
    fn missing_class_and_characteristic_mismatch_error() {
        let mut set = PatternSet::new("c");
        set.add(pat("s0", PatternClass::Self_, vec![0.0])).unwrap();
        assert!(matches!(
            classify_sequence(&seq(vec![0.0]), &set),
            Err(Error::MissingPatternClass { class: "nonself", .. })
        ));
        let other = TrafficSequence {
            characteristic: "other".into(),
            values: vec![0.0],
            window_seconds: 1.0,
        };
        assert!(matches!(
            classify_sequence(&other, &set),
            Err(Error::CharacteristicMismatch { .. })
        ));
    }

    #[test]
    fn add_pattern_dedups_and_surfaces_conflicts() {
        let mut set = PatternSet::new("c");
        assert_eq!(
            set.add(pat("a", PatternClass::Self_, vec![1.0, 2.0])).unwrap(),
            AddOutcome::Added
        );
        assert_eq!(
            set.add(pat("b", PatternClass::Self_, vec![1.0, 2.0])).unwrap(),
            AddOutcome::SkippedDuplicate
        );
        assert_eq!(set.len(), 1);
        assert!(matches!(
            set.add(pat("x", PatternClass::NonSelf, vec![1.0, 2.0])),
            Err(Error::PatternConflict { .. })
        ));
        assert!(matches!(
            set.add(pat("a", PatternClass::Self_, vec![9.0])),
            Err(Error::PatternIdConflict { .. })
        ));
        let wrong = Pattern::new("z", PatternClass::Self_, vec![1.0], "other", PatternOrigin::Sync)
            .unwrap();
        assert!(matches!(
            set.add(wrong),
            Err(Error::CharacteristicMismatch { .. })
        ));
    }

    #[test]
    fn pattern_line_round_trip() {
        let p = pat("p0", PatternClass::NonSelf, vec![1.5, -0.25, 1e-9]);
        let line = pattern_line(&p);
        assert_eq!(line, "c nonself 1.5,-0.25,0.000000001 external_feed");
        let back: Pattern = parse_pattern_line(&line, "p0").unwrap();
        assert_eq!(back, p);
    }

    mod learning {
        use super::*;
        use crate::traffic::{default_characteristics, FlowRecord, Label, Protocol};
        use std::net::Ipv4Addr;

        fn rec(t: f64, bytes_in: u64, label: Label) -> FlowRecord {
            FlowRecord {
                timestamp: t,
                src_ip: Ipv4Addr::UNSPECIFIED,
                dst_ip: Ipv4Addr::UNSPECIFIED,
                src_port: 0,
                dst_port: 0,
                protocol: Protocol::Tcp,
                duration: 0.0,
                bytes_in,
                bytes_out: 0,
                numeric_features: vec![],
                label,
            }
        }

        fn bytes_in_rate() -> Characteristic {
            default_characteristics().remove(0)
        }

        #[test]
        fn four_normal_records_one_window_pair_one_self_pattern() {
            let recs = vec![
                rec(0.0, 10, Label::Normal),
                rec(0.5, 20, Label::Normal),
                rec(1.0, 30, Label::Normal),
                rec(1.5, 40, Label::Normal),
            ];
            let ds = LabeledDataset::new(recs, vec![]).unwrap();
            let pats = learn_patterns_from_training(&ds, &bytes_in_rate(), 1.0, 2).unwrap();
            assert_eq!(pats.len(), 1);
            assert_eq!(pats[0].class, PatternClass::Self_);
            assert_eq!(pats[0].sequence, vec![30.0, 70.0]);
            assert_eq!(pats[0].origin, PatternOrigin::Training);
        }

        #[test]
        fn all_attack_dataset_errors() {
            let recs = vec![
                rec(0.0, 10, Label::Attack("smurf".into())),
                rec(1.0, 20, Label::Attack("smurf".into())),
            ];
            let ds = LabeledDataset::new(recs, vec![]).unwrap();
            assert!(matches!(
                learn_patterns_from_training(&ds, &bytes_in_rate(), 1.0, 2),
                Err(Error::SingleClass { missing: "normal" })
            ));
        }

        #[test]
        fn mixed_dataset_produces_both_classes() {
            let mut recs = Vec::new();
            for i in 0..4 {
                recs.push(rec(i as f64, 10, Label::Normal));
            }
            for i in 4..8 {
                recs.push(rec(i as f64, 9000 + i as u64, Label::Attack("smurf".into())));
            }
            let ds = LabeledDataset::new(recs, vec![]).unwrap();
            let pats = learn_patterns_from_training(&ds, &bytes_in_rate(), 1.0, 2).unwrap();
            assert!(pats.iter().any(|p| p.class == PatternClass::Self_));
            assert!(pats.iter().any(|p| p.class == PatternClass::NonSelf));
        }

        #[test]
        fn ambiguous_segments_are_dropped_from_both_classes() {
            // Both labels produce the segment [5,5]; only the segments
            // unique to one side survive.
            let recs = vec![
                rec(0.0, 5, Label::Normal),
                rec(1.0, 5, Label::Normal),
                rec(2.0, 1, Label::Normal),
                rec(3.0, 1, Label::Normal),
                rec(4.0, 5, Label::Attack("x".into())),
                rec(5.0, 5, Label::Attack("x".into())),
                rec(6.0, 99, Label::Attack("x".into())),
                rec(7.0, 99, Label::Attack("x".into())),
            ];
            let ds = LabeledDataset::new(recs, vec![]).unwrap();
            let pats = learn_patterns_from_training(&ds, &bytes_in_rate(), 1.0, 2).unwrap();
            let seqs: Vec<&[f64]> = pats.iter().map(|p| p.sequence.as_slice()).collect();
            assert!(!seqs.contains(&[5.0, 5.0].as_slice()));
            assert!(seqs.contains(&[1.0, 1.0].as_slice()));
            assert!(seqs.contains(&[99.0, 99.0].as_slice()));
        }

        #[test]
        fn trailing_partial_segment_is_kept() {
            let recs = vec![
                rec(0.0, 1, Label::Normal),
                rec(1.0, 2, Label::Normal),
                rec(2.0, 3, Label::Normal),
            ];
            let ds = LabeledDataset::new(recs, vec![]).unwrap();
            let pats = learn_patterns_from_training(&ds, &bytes_in_rate(), 1.0, 2).unwrap();
            assert_eq!(pats.len(), 2);
            assert_eq!(pats[0].sequence, vec![1.0, 2.0]);
            assert_eq!(pats[1].sequence, vec![3.0]);
        }
    }
}
