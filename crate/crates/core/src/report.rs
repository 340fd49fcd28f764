//! Serializable reports and their JSON, CSV and plain-text renderings.
//!
//! Every JSON report carries `"schema": 1`. Field order is fixed by the
//! struct definitions and maps are ordered, so identical inputs produce
//! identical bytes.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cf::{cf_expand, psl_equivalent, Expansion};
use crate::classify::{AuditReport, Classifier};
use crate::diagram::{Method, OrbitPartition};
use crate::element::Element;
use crate::enumeration::AmbiguousSet;
use crate::error::{Error, Result};
use crate::harness::{
    ClassSummary, ExamplesReport, FindingStatus, RowStatus, SweepTable, VerdictReport,
};
use crate::words::{circuit_from_path, stabilizer_word, Circuit, FixVerdict, Word};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
    Csv,
    Dot,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" | "text" => Ok(Format::Human),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "dot" => Ok(Format::Dot),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Human => "human",
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Dot => "dot",
        })
    }
}

/// Header and rows for CSV output.
pub struct CsvTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub trait Report: Serialize {
    fn human(&self) -> String;

    fn csv_table(&self) -> Option<CsvTable> {
        None
    }
}

pub fn serialize_report<R: Report>(report: &R, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(report)
                .map_err(|e| Error::Serialization(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Human => Ok(report.human().into_bytes()),
        Format::Csv => {
            let table = report
                .csv_table()
                .ok_or_else(|| Error::UnsupportedFormat("csv".into()))?;
            let mut writer = csv::Writer::from_writer(Vec::new());
            let sink = |e: csv::Error| Error::Serialization(e.to_string());
            writer.write_record(&table.header).map_err(sink)?;
            for row in &table.rows {
                writer.write_record(row).map_err(sink)?;
            }
            writer
                .into_inner()
                .map_err(|e| Error::Serialization(e.to_string()))
        }
        Format::Dot => Err(Error::UnsupportedFormat("dot".into())),
    }
}

pub fn parse_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

/// `[a, b, c]` with the wide-integer rule applied to each entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple(
    #[serde(with = "crate::serde_int")] pub BigInt,
    #[serde(with = "crate::serde_int")] pub BigInt,
    #[serde(with = "crate::serde_int")] pub BigInt,
);

impl From<&Element> for Triple {
    fn from(e: &Element) -> Self {
        Triple(e.a().clone(), e.b().clone(), e.c().clone())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0, self.1, self.2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Int(#[serde(with = "crate::serde_int")] pub BigInt);

fn ints(values: &[BigInt]) -> Vec<Int> {
    values.iter().cloned().map(Int).collect()
}

fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguousReport {
    pub schema: u32,
    #[serde(with = "crate::serde_int")]
    pub n: BigInt,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elements: Option<Vec<Triple>>,
}

impl AmbiguousReport {
    pub fn new(set: &AmbiguousSet, count_only: bool) -> Self {
        AmbiguousReport {
            schema: SCHEMA,
            n: set.n().clone(),
            count: set.len(),
            elements: (!count_only).then(|| set.iter().map(Triple::from).collect()),
        }
    }
}

impl Report for AmbiguousReport {
    fn human(&self) -> String {
        match &self.elements {
            None => format!("{}\n", self.count),
            Some(elements) => {
                let mut out = format!("{} ambiguous numbers in Q*(√{})\n", self.count, self.n);
                for t in elements {
                    let _ = writeln!(out, "{},{},{}", t.0, t.1, t.2);
                }
                out
            }
        }
    }

    fn csv_table(&self) -> Option<CsvTable> {
        let rows = match &self.elements {
            Some(elements) => elements
                .iter()
                .map(|t| {
                    vec![
                        self.n.to_string(),
                        t.0.to_string(),
                        t.1.to_string(),
                        t.2.to_string(),
                    ]
                })
                .collect(),
            None => Vec::new(),
        };
        Some(CsvTable {
            header: vec!["n", "a", "b", "c"],
            rows,
        })
    }
}

/// One orbit: its representative, ambiguous members, circuit, the word
/// read along its closed path from the representative, and the class of
/// the representative under every applicable classifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    #[serde(with = "crate::serde_int")]
    pub n: BigInt,
    pub rep: Element,
    pub members: Vec<Triple>,
    pub circuit: Circuit,
    pub word: Word,
    pub classes: BTreeMap<String, i8>,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitsReport {
    pub schema: u32,
    #[serde(with = "crate::serde_int")]
    pub n: BigInt,
    pub methods: Vec<Method>,
    pub count: usize,
    pub orbits: Vec<OrbitRecord>,
}

impl OrbitsReport {
    pub fn new(partition: &OrbitPartition, methods: Vec<Method>) -> Result<Self> {
        let classifiers = Classifier::applicable_to(partition.n());
        let mut orbits = Vec::with_capacity(partition.count());
        for orbit in partition.orbits() {
            let rep = orbit.representative();
            let mut classes = BTreeMap::new();
            for classifier in &classifiers {
                classes.insert(classifier.key(), classifier.classify(rep)?.value);
            }
            orbits.push(OrbitRecord {
                n: partition.n().clone(),
                rep: rep.clone(),
                members: orbit.members().iter().map(Triple::from).collect(),
                circuit: circuit_from_path(orbit.path())?,
                word: stabilizer_word(rep)?,
                classes,
                length: orbit.ambiguous_length(),
            });
        }
        Ok(OrbitsReport {
            schema: SCHEMA,
            n: partition.n().clone(),
            methods,
            count: orbits.len(),
            orbits,
        })
    }
}

fn class_text(classes: &BTreeMap<String, i8>) -> String {
    classes
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

impl Report for OrbitsReport {
    fn human(&self) -> String {
        let mut out = format!("{} orbits of Q*(√{})\n", self.count, self.n);
        for (i, orbit) in self.orbits.iter().enumerate() {
            let _ = writeln!(
                out,
                "orbit {i}: rep {} length {} circuit {}",
                orbit.rep.short(),
                orbit.length,
                orbit.circuit
            );
            let _ = writeln!(out, "  word {}", orbit.word);
            if !orbit.classes.is_empty() {
                let _ = writeln!(out, "  classes {}", class_text(&orbit.classes));
            }
        }
        out
    }

    fn csv_table(&self) -> Option<CsvTable> {
        let rows = self
            .orbits
            .iter()
            .enumerate()
            .map(|(i, o)| {
                vec![
                    o.n.to_string(),
                    i.to_string(),
                    o.rep.short(),
                    o.length.to_string(),
                    o.circuit.to_string(),
                    o.word.to_string(),
                    class_text(&o.classes),
                ]
            })
            .collect();
        Some(CsvTable {
            header: vec!["n", "orbit", "rep", "length", "circuit", "word", "classes"],
            rows,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub schema: u32,
    #[serde(with = "crate::serde_int")]
    pub n: BigInt,
    pub reps: Vec<Element>,
    pub summaries: Vec<ClassSummary>,
    pub audits: Vec<AuditReport>,
}

impl ClassifyReport {
    pub fn passed(&self) -> bool {
        self.audits.iter().all(AuditReport::passed) && self.summaries.iter().all(|s| s.homogeneous)
    }
}

impl Report for ClassifyReport {
    fn human(&self) -> String {
        let mut out = String::new();
        for summary in &self.summaries {
            let _ = writeln!(out, "{} on Q*(√{}):", summary.classifier, self.n);
            for (rep, class) in self.reps.iter().zip(&summary.orbit_classes) {
                let class = class.map_or_else(|| "mixed".to_string(), |c| c.to_string());
                let _ = writeln!(out, "  orbit of {}: {class}", rep.short());
            }
            let _ = writeln!(
                out,
                "  occupied {:?}, homogeneous {}, bijective {}",
                summary.occupied, summary.homogeneous, summary.bijective
            );
        }
        for audit in &self.audits {
            let _ = writeln!(
                out,
                "audit {} depth {} seed {}: {} moves from {} elements, {} violations",
                audit.classifier.key(),
                audit.depth,
                audit.seed,
                audit.moves_checked,
                audit.elements_checked,
                audit.violations.len()
            );
            for v in &audit.violations {
                let _ = writeln!(
                    out,
                    "  {} --{}--> {}: {} -> {}",
                    v.element, v.generator, v.image, v.before, v.after
                );
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfReport {
    pub schema: u32,
    pub element: Element,
    pub preperiod: Vec<Int>,
    pub cycle: Vec<Int>,
    pub period: usize,
    pub entry_index: usize,
    pub cycle_states: Vec<Triple>,
}

impl CfReport {
    pub fn new(e: &Element) -> Result<Self> {
        let x: Expansion = cf_expand(e)?;
        Ok(CfReport {
            schema: SCHEMA,
            element: e.clone(),
            preperiod: ints(x.preperiod()),
            cycle: ints(x.cycle()),
            period: x.period(),
            entry_index: x.entry_index(),
            cycle_states: x.cycle_states().iter().map(Triple::from).collect(),
        })
    }
}

impl Report for CfReport {
    fn human(&self) -> String {
        let pre: Vec<&BigInt> = self.preperiod.iter().map(|i| &i.0).collect();
        let cyc: Vec<&BigInt> = self.cycle.iter().map(|i| &i.0).collect();
        format!(
            "{} = [{}; ({})], period {}\n",
            self.element,
            join(&pre, ","),
            join(&cyc, ","),
            self.period
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub schema: u32,
    pub left: Element,
    pub right: Element,
    pub equivalent: bool,
}

impl EquivalenceReport {
    pub fn new(left: &Element, right: &Element) -> Result<Self> {
        Ok(EquivalenceReport {
            schema: SCHEMA,
            left: left.clone(),
            right: right.clone(),
            equivalent: psl_equivalent(left, right)?,
        })
    }
}

impl Report for EquivalenceReport {
    fn human(&self) -> String {
        format!(
            "{} and {} are {}equivalent under PSL(2,Z)\n",
            self.left,
            self.right,
            if self.equivalent { "" } else { "not " }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitReport {
    pub schema: u32,
    pub rep: Element,
    pub path_length: usize,
    pub circuit: Circuit,
    pub word: Word,
    pub cf_cycle: Vec<Int>,
}

impl CircuitReport {
    pub fn new(rep: &Element) -> Result<Self> {
        let path = crate::diagram::closed_path(rep)?;
        Ok(CircuitReport {
            schema: SCHEMA,
            rep: rep.clone(),
            path_length: path.len(),
            circuit: circuit_from_path(&path)?,
            word: stabilizer_word(rep)?,
            cf_cycle: ints(cf_expand(rep)?.cycle()),
        })
    }
}

impl Report for CircuitReport {
    fn human(&self) -> String {
        let cyc: Vec<&BigInt> = self.cf_cycle.iter().map(|i| &i.0).collect();
        format!(
            "rep {}\ncircuit {}\nword {}\nclosed path length {}\ncontinued fraction cycle ({})\n",
            self.rep,
            self.circuit,
            self.word,
            self.path_length,
            join(&cyc, ",")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckWordReport {
    pub schema: u32,
    pub input: String,
    pub notices: Vec<String>,
    #[serde(flatten)]
    pub verdict: FixVerdict,
}

impl Report for CheckWordReport {
    fn human(&self) -> String {
        let v = &self.verdict;
        let mut out = String::new();
        for notice in &self.notices {
            let _ = writeln!(out, "note: {notice}");
        }
        let (a, b, c) = &v.fixed_quadratic;
        let _ = writeln!(out, "word {}", v.word);
        let _ = writeln!(out, "matrix {}", v.matrix);
        let _ = writeln!(out, "fixed-point quadratic ({a},{b},{c})");
        let _ = writeln!(out, "image of {} is {}", v.element, v.image);
        let _ = writeln!(out, "{}", if v.fixes { "fixes" } else { "does not fix" });
        out
    }
}

impl Report for VerdictReport {
    fn human(&self) -> String {
        let mut out = String::new();
        let title = match self.theorem {
            Some(t) => format!("theorem {t}"),
            None => "no theorem".to_string(),
        };
        let _ = writeln!(
            out,
            "{title}: p = {}, k = {}, l = {}, n = {} ({:?})",
            self.p, self.k, self.l, self.n, self.scope
        );
        let _ = writeln!(
            out,
            "ambiguous numbers {}, orbits {} (sizes {:?})",
            self.ambiguous_count, self.computed_count, self.orbit_sizes
        );
        if let (Some(expected), Some(matched)) = (self.expected_count, self.count_match) {
            let _ = writeln!(
                out,
                "expected {expected}: {}",
                if matched { "match" } else { "MISMATCH" }
            );
        }
        for r in &self.reps {
            let _ = writeln!(
                out,
                "rep {} -> {} ({:?}, class {}, orbit {})",
                r.stated,
                r.element.short(),
                r.status,
                r.class,
                r.orbit.map_or_else(|| "-".to_string(), |o| o.to_string())
            );
        }
        if let Some(summary) = &self.classes {
            let _ = writeln!(
                out,
                "{}: occupied {:?}, homogeneous {}, bijective {}",
                summary.classifier, summary.occupied, summary.homogeneous, summary.bijective
            );
        }
        for e in &self.errata {
            let _ = writeln!(out, "ERRATUM: {e}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(ms) = self.runtime_ms {
            let _ = writeln!(out, "runtime {ms:.1} ms");
        }
        out
    }
}

impl Report for ExamplesReport {
    fn human(&self) -> String {
        let mut out = String::new();
        for f in &self.findings {
            let tag = match f.status {
                FindingStatus::Confirmed => "confirmed",
                FindingStatus::Errata => "ERRATUM",
            };
            let _ = writeln!(out, "[{tag}] {}: {}", f.id, f.claim);
            let _ = writeln!(out, "    {}", f.detail);
        }
        out
    }

    fn csv_table(&self) -> Option<CsvTable> {
        Some(CsvTable {
            header: vec!["id", "status", "claim", "detail"],
            rows: self
                .findings
                .iter()
                .map(|f| {
                    let status = match f.status {
                        FindingStatus::Confirmed => "confirmed",
                        FindingStatus::Errata => "errata",
                    };
                    vec![
                        f.id.clone(),
                        status.into(),
                        f.claim.clone(),
                        f.detail.clone(),
                    ]
                })
                .collect(),
        })
    }
}

fn status_label(status: RowStatus) -> &'static str {
    match status {
        RowStatus::Pass => "pass",
        RowStatus::Errata => "errata",
        RowStatus::Exploratory => "exploratory",
        RowStatus::OutOfScope => "out_of_scope",
        RowStatus::Skipped => "skipped",
        RowStatus::Error => "error",
    }
}

impl Report for SweepTable {
    fn human(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let theorem = row
                .theorem
                .map_or_else(|| "-".to_string(), |t| t.to_string());
            let counts = match &row.verdict {
                Some(v) => match v.expected_count {
                    Some(x) => format!("{} orbits (expected {x})", v.computed_count),
                    None => format!("{} orbits", v.computed_count),
                },
                None => row.error.clone().unwrap_or_default(),
            };
            let _ = writeln!(
                out,
                "p={} k={} l={} n={} theorem {theorem}: {} {counts}",
                row.p,
                row.k,
                row.l,
                row.n,
                status_label(row.status)
            );
        }
        let t = &self.totals;
        let _ = writeln!(
            out,
            "pass {} errata {} exploratory {} out-of-scope {} skipped {} error {}",
            t.pass, t.errata, t.exploratory, t.out_of_scope, t.skipped, t.error
        );
        out
    }

    fn csv_table(&self) -> Option<CsvTable> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let v = row.verdict.as_ref();
                let opt = |x: Option<String>| x.unwrap_or_default();
                vec![
                    row.p.to_string(),
                    row.k.to_string(),
                    row.l.to_string(),
                    row.n.to_string(),
                    opt(row.theorem.map(|t| t.to_string())),
                    status_label(row.status).to_string(),
                    opt(v.and_then(|v| v.expected_count).map(|c| c.to_string())),
                    opt(v.map(|v| v.computed_count.to_string())),
                    opt(v.and_then(|v| v.count_match).map(|m| m.to_string())),
                    opt(v.map(|v| v.errata.join(" | "))),
                    opt(row.error.clone()),
                ]
            })
            .collect();
        Some(CsvTable {
            header: vec![
                "p",
                "k",
                "l",
                "n",
                "theorem",
                "status",
                "expected",
                "computed",
                "count_match",
                "errata",
                "error",
            ],
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::partition_graph;
    use crate::enumeration::{enumerate_ambiguous, Limits};

    fn orbits(n: i64) -> OrbitsReport {
        let set = enumerate_ambiguous(&BigInt::from(n), &Limits::default()).unwrap();
        OrbitsReport::new(&partition_graph(&set).unwrap(), vec![Method::Graph]).unwrap()
    }

    #[test]
    fn orbit_record_fields() {
        let bytes = serialize_report(&orbits(125), Format::Json).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(value["schema"], 1);
        assert_eq!(value["orbits"].as_array().unwrap().len(), 2);
        let record = value["orbits"][0].as_object().unwrap();
        let keys: Vec<&str> = record.keys().map(String::as_str).collect();
        for key in [
            "n", "rep", "members", "circuit", "word", "classes", "length",
        ] {
            assert!(keys.contains(&key), "missing {key}");
        }
        assert_eq!(record["classes"]["mod5"], 1);
    }

    #[test]
    fn deterministic_bytes() {
        let first = serialize_report(&orbits(243), Format::Json).unwrap();
        let second = serialize_report(&orbits(243), Format::Json).unwrap();
        assert_eq!(first, second);
        let csv1 = serialize_report(&orbits(243), Format::Csv).unwrap();
        assert_eq!(csv1, serialize_report(&orbits(243), Format::Csv).unwrap());
        assert!(String::from_utf8(csv1)
            .unwrap()
            .starts_with("n,orbit,rep,length,circuit,word,classes\n"));
    }

    #[test]
    fn unsupported_formats() {
        let report = orbits(5);
        assert_eq!(
            serialize_report(&report, Format::Dot),
            Err(Error::UnsupportedFormat("dot".into()))
        );
        let cf = CfReport::new(&Element::new(0, 1, 5).unwrap()).unwrap();
        assert!(matches!(
            serialize_report(&cf, Format::Csv),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!("xml".parse::<Format>().is_err());
    }

    #[test]
    fn round_trip() {
        let report = orbits(1000);
        let bytes = serialize_report(&report, Format::Json).unwrap();
        let back: OrbitsReport = parse_json(&bytes).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn wide_integers_become_strings() {
        let n: BigInt = "340282366920938463463374607431768211507".parse().unwrap();
        let e = Element::new(1, 2, n.clone()).unwrap();
        let report = CfReport {
            schema: SCHEMA,
            element: e.clone(),
            preperiod: vec![Int(n.clone())],
            cycle: vec![Int(BigInt::from(3))],
            period: 1,
            entry_index: 1,
            cycle_states: vec![Triple::from(&e)],
        };
        let bytes = serialize_report(&report, Format::Json).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains(&format!("\"{n}\"")));
        assert!(text.contains("3"));
        let back: CfReport = parse_json(&bytes).unwrap();
        assert_eq!(back, report);
    }
}
