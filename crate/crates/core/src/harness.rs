//! Orbit-count claims for `n = 2^l p^k`, checked against both partition
//! methods, plus an audit of the worked examples and a parameter sweep.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::cf::partition_cf;
use crate::classify::{legendre_degenerate, Classifier};
use crate::diagram::closed_path;
use crate::diagram::{partition_graph, OrbitPartition};
use crate::element::Element;
use crate::enumeration::{enumerate_ambiguous, AmbiguousSet, Limits};
use crate::error::{Error, Result};
use crate::words::{check_word_fixes, circuit_from_path, parse_word, stabilizer_word, Word};

/// The seven orbit-count statements covered by the harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    T2_1,
    T2_3,
    T2_5,
    T2_6,
    T2_7,
    T2_8,
    T2_9,
}

/// Which residues of `p mod 4` a statement requires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeFamily {
    OneMod4,
    ThreeMod4,
    Any,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::T2_1,
        TheoremId::T2_3,
        TheoremId::T2_5,
        TheoremId::T2_6,
        TheoremId::T2_7,
        TheoremId::T2_8,
        TheoremId::T2_9,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TheoremId::T2_1 => "2.1",
            TheoremId::T2_3 => "2.3",
            TheoremId::T2_5 => "2.5",
            TheoremId::T2_6 => "2.6",
            TheoremId::T2_7 => "2.7",
            TheoremId::T2_8 => "2.8",
            TheoremId::T2_9 => "2.9",
        }
    }

    pub fn family(self) -> PrimeFamily {
        match self {
            TheoremId::T2_1 | TheoremId::T2_5 | TheoremId::T2_7 => PrimeFamily::OneMod4,
            TheoremId::T2_3 | TheoremId::T2_6 | TheoremId::T2_8 => PrimeFamily::ThreeMod4,
            TheoremId::T2_9 => PrimeFamily::Any,
        }
    }

    /// Smallest power of 2 allowed, and the largest (`None` for unbounded).
    pub fn l_range(self) -> (u32, Option<u32>) {
        match self {
            TheoremId::T2_1 | TheoremId::T2_3 => (0, Some(0)),
            TheoremId::T2_5 | TheoremId::T2_6 => (1, Some(1)),
            TheoremId::T2_7 | TheoremId::T2_8 => (2, Some(2)),
            TheoremId::T2_9 => (3, None),
        }
    }

    pub fn expected_count(self) -> usize {
        match self {
            TheoremId::T2_9 => 4,
            _ => 2,
        }
    }

    /// The statement covering `p^k 2^l`, ignoring the constraint on `k`.
    pub fn for_parameters(p: &BigInt, l: u32) -> Option<TheoremId> {
        let one_mod_4 = p.mod_floor(&BigInt::from(4)) == BigInt::one();
        Some(match (l, one_mod_4) {
            (0, true) => TheoremId::T2_1,
            (0, false) => TheoremId::T2_3,
            (1, true) => TheoremId::T2_5,
            (1, false) => TheoremId::T2_6,
            (2, true) => TheoremId::T2_7,
            (2, false) => TheoremId::T2_8,
            _ => TheoremId::T2_9,
        })
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.label() == s.trim())
            .ok_or_else(|| {
                Error::InvalidCase(format!(
                    "unknown theorem {s:?}; expected one of 2.1, 2.3, 2.5, 2.6, 2.7, 2.8, 2.9"
                ))
            })
    }
}

impl Serialize for TheoremId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for TheoremId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A statement applied to concrete `(p, k, l)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremCase {
    pub theorem: TheoremId,
    #[serde(with = "crate::serde_int")]
    pub p: BigInt,
    pub k: u32,
    pub l: u32,
}

impl TheoremCase {
    pub fn new(theorem: TheoremId, p: impl Into<BigInt>, k: u32, l: u32) -> Result<Self> {
        let p = p.into();
        if !arith::is_odd_prime(&p) {
            return Err(Error::NotOddPrime(p));
        }
        if k < 3 || k.is_multiple_of(2) {
            return Err(Error::InvalidCase(format!(
                "k = {k} must be an odd integer at least 3"
            )));
        }
        let (lo, hi) = theorem.l_range();
        if l < lo || hi.is_some_and(|hi| l > hi) {
            let wanted = match hi {
                Some(hi) if hi == lo => format!("l = {lo}"),
                _ => format!("l >= {lo}"),
            };
            return Err(Error::InvalidCase(format!(
                "theorem {theorem} requires {wanted}, got l = {l}"
            )));
        }
        let residue = p.mod_floor(&BigInt::from(4));
        let family_ok = match theorem.family() {
            PrimeFamily::OneMod4 => residue == BigInt::one(),
            PrimeFamily::ThreeMod4 => residue == BigInt::from(3),
            PrimeFamily::Any => true,
        };
        if !family_ok {
            let needed = if theorem.family() == PrimeFamily::OneMod4 {
                1
            } else {
                3
            };
            return Err(Error::InvalidCase(format!(
                "theorem {theorem} requires p ≡ {needed} (mod 4), got p = {p}"
            )));
        }
        Ok(TheoremCase { theorem, p, k, l })
    }

    /// `2^l p^k`.
    pub fn n(&self) -> BigInt {
        compose_n(&self.p, self.k, self.l)
    }

    /// The classifier the statement's proof separates orbits with.
    pub fn classifier(&self) -> Classifier {
        if self.l >= 3 {
            Classifier::Mod8
        } else {
            Classifier::ModP { p: self.p.clone() }
        }
    }
}

impl fmt::Display for TheoremCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "theorem {} (p = {}, k = {}, l = {}, n = {})",
            self.theorem,
            self.p,
            self.k,
            self.l,
            self.n()
        )
    }
}

pub fn compose_n(p: &BigInt, k: u32, l: u32) -> BigInt {
    Pow::pow(p, k) << l as usize
}

/// A stated orbit representative `(a + √n)/c` together with the class it is
/// meant to occupy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedRep {
    #[serde(with = "crate::serde_int")]
    pub a: BigInt,
    #[serde(with = "crate::serde_int")]
    pub c: BigInt,
    pub intended_class: i8,
}

impl ExpectedRep {
    fn new(a: i64, c: i64, intended_class: i8) -> Self {
        ExpectedRep {
            a: a.into(),
            c: c.into(),
            intended_class,
        }
    }

    /// `(a+√n)/c` in text.
    pub fn notation(&self) -> String {
        format!("({}+√n)/{}", self.a, self.c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    pub count: usize,
    pub classifier: Classifier,
    pub reps: Vec<ExpectedRep>,
}

pub fn predict(case: &TheoremCase) -> Expectation {
    let reps = match case.theorem.family() {
        PrimeFamily::OneMod4 => vec![ExpectedRep::new(0, 1, 1), ExpectedRep::new(1, 2, -1)],
        PrimeFamily::ThreeMod4 => vec![ExpectedRep::new(0, 1, 1), ExpectedRep::new(0, -1, -1)],
        PrimeFamily::Any => vec![
            ExpectedRep::new(0, 1, 1),
            ExpectedRep::new(0, -1, 7),
            ExpectedRep::new(1, 3, 3),
            ExpectedRep::new(-1, -3, 5),
        ],
    };
    Expectation {
        count: case.theorem.expected_count(),
        classifier: case.classifier(),
        reps,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepStatus {
    /// The stated triple is itself a valid ambiguous element.
    Valid,
    /// The stated triple was rejected and replaced.
    Substituted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepResolution {
    pub stated: String,
    pub intended_class: i8,
    pub status: RepStatus,
    pub element: Element,
    pub class: i8,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orbit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

/// Returns the stated representative when it is a valid ambiguous element,
/// otherwise the least ambiguous element (by `(a, c)`) of the intended class.
pub fn resolve_rep(
    rep: &ExpectedRep,
    classifier: &Classifier,
    set: &AmbiguousSet,
) -> Result<RepResolution> {
    let literal = Element::new(rep.a.clone(), rep.c.clone(), set.n().clone()).and_then(|e| {
        if e.is_ambiguous() {
            Ok(e)
        } else {
            Err(Error::NotAmbiguous(e))
        }
    });
    let stated = rep.notation();
    match literal {
        Ok(element) => {
            let class = classifier.classify(&element)?.value;
            let note = (class != rep.intended_class).then(|| {
                format!(
                    "{stated} has {} {class}, not the intended {}",
                    classifier, rep.intended_class
                )
            });
            Ok(RepResolution {
                stated,
                intended_class: rep.intended_class,
                status: RepStatus::Valid,
                element,
                class,
                orbit: None,
                note,
            })
        }
        Err(reason) => {
            let mut substitute = None;
            for e in set {
                if classifier.classify(e)?.value == rep.intended_class {
                    let key = (e.a(), e.c());
                    if substitute
                        .as_ref()
                        .is_none_or(|s: &Element| key < (s.a(), s.c()))
                    {
                        substitute = Some(e.clone());
                    }
                }
            }
            let element = substitute.ok_or_else(|| Error::EmptyClass {
                class: format!("{} {}", classifier, rep.intended_class),
                n: set.n().clone(),
            })?;
            let note = format!(
                "stated representative {stated} is not in Q*(√{}): {reason}; substituted {element}",
                set.n()
            );
            Ok(RepResolution {
                stated,
                intended_class: rep.intended_class,
                status: RepStatus::Substituted,
                element,
                class: rep.intended_class,
                orbit: None,
                note: Some(note),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Covered by a statement whose proof applies.
    InScope,
    /// Covered by a statement, but its separating classifier is degenerate.
    Exploratory,
    /// Parameters outside every statement; nothing is predicted.
    OutOfScope,
}

/// How the classifier distributes over the computed orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub classifier: Classifier,
    /// Class of each orbit in partition order, `None` when an orbit is mixed.
    pub orbit_classes: Vec<Option<i8>>,
    pub homogeneous: bool,
    pub occupied: Vec<i8>,
    /// Every orbit has its own class and every class value is occupied.
    pub bijective: bool,
}

/// Classes of every member of every orbit under `classifier`.
pub fn summarize_classes(
    partition: &OrbitPartition,
    classifier: &Classifier,
) -> Result<ClassSummary> {
    let mut orbit_classes = Vec::with_capacity(partition.count());
    let mut occupied = BTreeSet::new();
    for orbit in partition.orbits() {
        let mut seen = BTreeSet::new();
        for e in orbit.members() {
            seen.insert(classifier.classify(e)?.value);
        }
        occupied.extend(seen.iter().copied());
        orbit_classes.push(if seen.len() == 1 {
            seen.first().copied()
        } else {
            None
        });
    }
    let homogeneous = orbit_classes.iter().all(Option::is_some);
    let distinct: BTreeSet<i8> = orbit_classes.iter().flatten().copied().collect();
    let bijective = homogeneous
        && distinct.len() == orbit_classes.len()
        && distinct.len() == classifier.values().len();
    Ok(ClassSummary {
        classifier: classifier.clone(),
        orbit_classes,
        homogeneous,
        occupied: occupied.into_iter().collect(),
        bijective,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub schema: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theorem: Option<TheoremId>,
    #[serde(with = "crate::serde_int")]
    pub p: BigInt,
    pub k: u32,
    pub l: u32,
    #[serde(with = "crate::serde_int")]
    pub n: BigInt,
    pub scope: Scope,
    pub ambiguous_count: usize,
    pub computed_count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub count_match: Option<bool>,
    pub orbit_sizes: Vec<usize>,
    pub reps: Vec<RepResolution>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reps_distinct: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classes: Option<ClassSummary>,
    pub errata: Vec<String>,
    pub notes: Vec<String>,
    /// Wall time in milliseconds; dropped by [`VerdictReport::without_timing`].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_ms: Option<f64>,
}

impl VerdictReport {
    pub fn has_errata(&self) -> bool {
        !self.errata.is_empty()
    }

    pub fn without_timing(mut self) -> Self {
        self.runtime_ms = None;
        self
    }
}

/// Both partitions of the ambiguous set, required to agree.
pub fn checked_partition(set: &AmbiguousSet) -> Result<OrbitPartition> {
    let (graph, cf) = rayon::join(|| partition_graph(set), || partition_cf(set));
    let (graph, cf) = (graph?, cf?);
    if !graph.same_components(&cf) {
        let witness = graph
            .first_disagreement(&cf)
            .map(|e| e.to_string())
            .unwrap_or_else(|| "?".to_string());
        return Err(Error::InternalInconsistency(format!(
            "graph partition ({} orbits) and continued-fraction partition ({} orbits) of n = {} disagree at {witness}",
            graph.count(),
            cf.count(),
            set.n()
        )));
    }
    Ok(graph)
}

pub fn verify_case(case: &TheoremCase, limits: &Limits) -> Result<VerdictReport> {
    let expectation = predict(case);
    let exploratory = matches!(expectation.classifier, Classifier::ModP { ref p } if legendre_degenerate(p))
        && case.theorem.family() == PrimeFamily::OneMod4;
    let scope = if exploratory {
        Scope::Exploratory
    } else {
        Scope::InScope
    };
    run(
        case.n(),
        &case.p,
        case.k,
        case.l,
        Some((case, expectation)),
        scope,
        limits,
    )
}

/// Computes the partition for parameters no statement covers.
pub fn survey(p: &BigInt, k: u32, l: u32, limits: &Limits) -> Result<VerdictReport> {
    run(compose_n(p, k, l), p, k, l, None, Scope::OutOfScope, limits)
}

fn run(
    n: BigInt,
    p: &BigInt,
    k: u32,
    l: u32,
    case: Option<(&TheoremCase, Expectation)>,
    scope: Scope,
    limits: &Limits,
) -> Result<VerdictReport> {
    let start = Instant::now();
    limits.check(&n)?;
    let set = enumerate_ambiguous(&n, limits)?;
    let partition = checked_partition(&set)?;
    let computed = partition.count();
    let mut errata = Vec::new();
    let mut notes = Vec::new();

    let classifier = case
        .as_ref()
        .map(|(_, x)| x.classifier.clone())
        .or_else(|| {
            if l >= 3 {
                Some(Classifier::Mod8)
            } else if n.is_multiple_of(p) && arith::is_odd_prime(p) {
                Some(Classifier::ModP { p: p.clone() })
            } else {
                None
            }
        });
    let classes = classifier
        .as_ref()
        .map(|c| summarize_classes(&partition, c))
        .transpose()?;

    let mut reps = Vec::new();
    let mut reps_distinct = None;
    let mut expected_count = None;
    let mut count_match = None;
    if let Some((case, expectation)) = &case {
        expected_count = Some(expectation.count);
        count_match = Some(computed == expectation.count);
        for rep in &expectation.reps {
            match resolve_rep(rep, &expectation.classifier, &set) {
                Ok(mut r) => {
                    r.orbit = partition.orbit_of(&r.element);
                    if r.orbit.is_none() {
                        return Err(Error::InternalInconsistency(format!(
                            "{} lies in no computed orbit",
                            r.element
                        )));
                    }
                    reps.push(r);
                }
                Err(Error::EmptyClass { class, n }) => {
                    let text = format!(
                        "no ambiguous element of class {class} exists for n = {n}; {} cannot be placed",
                        rep.notation()
                    );
                    if scope == Scope::Exploratory {
                        notes.push(text);
                    } else {
                        errata.push(text);
                    }
                }
                Err(e) => return Err(e),
            }
        }
        let orbits: BTreeSet<usize> = reps.iter().filter_map(|r| r.orbit).collect();
        reps_distinct = Some(orbits.len() == reps.len() && reps.len() == expectation.reps.len());

        let mut findings = Vec::new();
        if computed != expectation.count {
            findings.push(format!(
                "computed {computed} orbits for n = {n}; theorem {} states {}",
                case.theorem, expectation.count
            ));
        }
        for r in &reps {
            if let Some(note) = &r.note {
                findings.push(note.clone());
            }
        }
        for (i, left) in reps.iter().enumerate() {
            for right in &reps[i + 1..] {
                if left.orbit == right.orbit {
                    findings.push(format!(
                        "{} and {} lie in the same orbit",
                        left.element, right.element
                    ));
                }
            }
        }
        if let Some(summary) = &classes {
            if !summary.homogeneous {
                findings.push(format!(
                    "{} is not constant on every orbit",
                    summary.classifier
                ));
            }
            if summary.occupied.len() != computed {
                findings.push(format!(
                    "{} occupied classes {:?} but {computed} orbits",
                    summary.classifier, summary.occupied
                ));
            }
        }
        if case.theorem == TheoremId::T2_8 {
            notes.push(
                "the statement writes the representatives with √(2p); for n = 4p^k they are taken as ±√n/1".to_string(),
            );
        }
        if scope == Scope::Exploratory {
            notes.push(format!(
                "classifier degeneracy: p = {p} ≡ 1 (mod 8), so (2/p) = 1 and both stated representatives have Legendre class +1; the count is recorded but not asserted"
            ));
            notes.extend(findings);
        } else {
            errata.extend(findings);
        }
    }

    Ok(VerdictReport {
        schema: 1,
        theorem: case.as_ref().map(|(c, _)| c.theorem),
        p: p.clone(),
        k,
        l,
        n,
        scope,
        ambiguous_count: set.len(),
        computed_count: computed,
        expected_count,
        count_match,
        orbit_sizes: partition
            .orbits()
            .iter()
            .map(|o| o.members().len())
            .collect(),
        reps,
        reps_distinct,
        classes,
        errata,
        notes,
        runtime_ms: Some(start.elapsed().as_secs_f64() * 1000.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingStatus {
    Confirmed,
    Errata,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub id: String,
    pub claim: String,
    pub status: FindingStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamplesReport {
    pub schema: u32,
    pub findings: Vec<Finding>,
}

impl ExamplesReport {
    pub fn has_errata(&self) -> bool {
        self.findings
            .iter()
            .any(|f| f.status == FindingStatus::Errata)
    }
}

/// The first word exactly as printed, including two adjacent `(yx)` blocks.
pub const EXAMPLE_WORD_1: &str =
    "(yx)^{22}(y^2x)^{5}(yx)^{1}(y^2x)^{1}(yx)^{5}(yx)^{22}(y^2x)^{5}(yx)^{1}(y^2x)^{1}(yx)^{5}";
pub const EXAMPLE_WORD_2: &str = "(yx)^5(y^2x)^{11}(yx)^6";
pub const EXAMPLE_WORD_243: &str =
    "(yx)^{15}(y^2x)^{1}(yx)^{1}(y^2x)^{2}(yx)^{3}(y^2x)^{15}(yx)^{3}(y^2x)^{2}(yx)^{1}(y^2x)^{1}(yx)^{15}";

struct Audit {
    findings: Vec<Finding>,
    limits: Limits,
}

impl Audit {
    fn push(&mut self, id: &str, claim: &str, holds: bool, detail: String) {
        self.findings.push(Finding {
            id: id.to_string(),
            claim: claim.to_string(),
            status: if holds {
                FindingStatus::Confirmed
            } else {
                FindingStatus::Errata
            },
            detail,
        });
    }

    fn partition(&self, n: i64) -> Result<OrbitPartition> {
        checked_partition(&enumerate_ambiguous(&BigInt::from(n), &self.limits)?)
    }

    fn fixes(&self, word: &Word, a: i64, c: i64, n: i64) -> Result<bool> {
        Ok(check_word_fixes(word, &Element::new(a, c, n)?)?.fixes)
    }
}

fn render(elements: &[(i64, i64, i64, bool)]) -> String {
    elements
        .iter()
        .map(|(a, c, n, fixed)| {
            format!(
                "({a},{c}|{n}) {}",
                if *fixed { "fixed" } else { "not fixed" }
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Re-derives every worked example and reports each claim as confirmed or
/// as an erratum.
pub fn check_paper_examples() -> Result<ExamplesReport> {
    let mut audit = Audit {
        findings: Vec::new(),
        limits: Limits::default(),
    };

    let p3125 = audit.partition(3125)?;
    audit.push(
        "2.2-count",
        "Q*(√3125) has exactly two orbits",
        p3125.count() == 2,
        format!("computed {} orbits", p3125.count()),
    );
    let plus = Element::new(0, 1, 3125)?;
    let minus = Element::new(0, -1, 3125)?;
    let half = Element::new(1, 2, 3125)?;
    let orbit_label = |e: &Element| {
        p3125
            .orbit_of(e)
            .map_or_else(|| "none".to_string(), |i| i.to_string())
    };
    let (o_plus, o_minus, o_half) = (orbit_label(&plus), orbit_label(&minus), orbit_label(&half));
    audit.push(
        "2.2-reps",
        "the two orbits of Q*(√3125) are (25√5)^G and (-25√5)^G",
        o_plus != o_minus,
        format!("{plus} in orbit {o_plus}, {minus} in orbit {o_minus}, {half} in orbit {o_half}"),
    );

    let parsed = parse_word(EXAMPLE_WORD_1)?;
    let candidates = [
        (0, 1, 3125),
        (0, -1, 3125),
        (1, 2, 3125),
        (0, 1, 125),
        (0, -1, 125),
        (1, 2, 125),
    ];
    let mut results = Vec::new();
    for &(a, c, n) in &candidates {
        results.push((a, c, n, audit.fixes(&parsed.word, a, c, n)?));
    }
    let fixed_any = results.iter().any(|r| r.3);
    let mut detail = format!("read as {}", parsed.word);
    for notice in &parsed.notices {
        detail.push_str(&format!("; {notice}"));
    }
    detail.push_str(&format!("; {}", render(&results)));
    audit.push(
        "2.2-word-1",
        "the first circuit word fixes a representative of Q*(√3125)",
        fixed_any && parsed.notices.is_empty(),
        detail,
    );

    let word2 = parse_word(EXAMPLE_WORD_2)?.word;
    let on_3125 = audit.fixes(&word2, 1, 2, 3125)?;
    let on_125 = audit.fixes(&word2, 1, 2, 125)?;
    let matrix = crate::words::word_to_matrix(&word2);
    audit.push(
        "2.2-word-2",
        "(yx)^5(y^2x)^11(yx)^6 fixes (1+25√5)/2 in Q*(√3125)",
        on_3125,
        format!(
            "matrix {matrix}; (1,2|3125) {}; (1,2|125) {}",
            if on_3125 { "fixed" } else { "not fixed" },
            if on_125 {
                "fixed, so the word belongs to n = 125"
            } else {
                "not fixed"
            }
        ),
    );

    let word243 = parse_word(EXAMPLE_WORD_243)?.word;
    let root_plus = Element::new(0, 1, 243)?;
    let root_minus = Element::new(0, -1, 243)?;
    let fixes_plus = check_word_fixes(&word243, &root_plus)?.fixes;
    let fixes_minus = check_word_fixes(&word243, &root_minus)?.fixes;
    audit.push(
        "2.4-word",
        "the stated word fixes 9√3 in Q*(√243)",
        fixes_plus,
        format!(
            "{root_plus} {}; {root_minus} {}",
            if fixes_plus { "fixed" } else { "not fixed" },
            if fixes_minus { "fixed" } else { "not fixed" }
        ),
    );
    let expected = [30, 1, 1, 2, 3, 15, 3, 2, 1, 1];
    let circuit_plus = circuit_from_path(&closed_path(&root_plus)?)?;
    let circuit_minus = circuit_from_path(&closed_path(&root_minus)?)?;
    let stab = stabilizer_word(&root_plus)?;
    audit.push(
        "2.4-circuit",
        "the circuit of 9√3 is (30,1,1,2,3,15,3,2,1,1)",
        circuit_plus.matches_cyclic(&expected),
        format!("stabilizer word {stab}; canonical circuit {circuit_plus}"),
    );
    let p243 = audit.partition(243)?;
    let distinct = p243.orbit_of(&root_plus) != p243.orbit_of(&root_minus);
    audit.push(
        "2.4-orbits",
        "9√3 and -9√3 lie in different orbits of Q*(√243)",
        distinct && p243.count() == 2,
        format!(
            "{} orbits; circuits {} and {} ({})",
            p243.count(),
            circuit_plus,
            circuit_minus,
            if circuit_plus == circuit_minus {
                "identical, so the circuit alone does not separate them"
            } else {
                "different"
            }
        ),
    );

    for (id, n) in [
        ("2.10-count-69984", 69984i64),
        ("2.10-count-139968", 139968),
    ] {
        let partition = audit.partition(n)?;
        let sizes: Vec<usize> = partition
            .orbits()
            .iter()
            .map(|o| o.members().len())
            .collect();
        audit.push(
            id,
            &format!("Q*(√{n}) has exactly four orbits"),
            partition.count() == 4,
            format!("computed {} orbits, sizes {sizes:?}", partition.count()),
        );
    }
    let mut invalid = Vec::new();
    for (n, a, c) in [(69984i64, 0i64, 3i64), (139968, 0, 3)] {
        if let Err(e) = Element::new(a, c, n) {
            invalid.push(format!("({a}+√{n})/{c}: {e}"));
        }
    }
    audit.push(
        "2.10-reps",
        "the listed representatives (0+√n)/3 lie in Q*(√n)",
        invalid.is_empty(),
        {
            let mut detail = if invalid.is_empty() {
                "all valid".to_string()
            } else {
                invalid.join("; ")
            };
            detail.push_str("; each list also repeats the /1 representative where /-1 is meant");
            detail
        },
    );

    Ok(ExamplesReport {
        schema: 1,
        findings: audit.findings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Pass,
    Errata,
    Exploratory,
    OutOfScope,
    Skipped,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(with = "crate::serde_int")]
    pub p: BigInt,
    pub k: u32,
    pub l: u32,
    #[serde(with = "crate::serde_int")]
    pub n: BigInt,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theorem: Option<TheoremId>,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<VerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepTotals {
    pub pass: usize,
    pub errata: usize,
    pub exploratory: usize,
    pub out_of_scope: usize,
    pub skipped: usize,
    pub error: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub schema: u32,
    pub rows: Vec<SweepRow>,
    pub totals: SweepTotals,
}

impl SweepTable {
    pub fn has_errata(&self) -> bool {
        self.totals.errata > 0
    }

    pub fn has_inconsistency(&self) -> bool {
        self.rows.iter().any(|r| {
            r.error
                .as_deref()
                .is_some_and(|e| e.starts_with("internal inconsistency"))
        })
    }

    pub fn without_timing(mut self) -> Self {
        for row in &mut self.rows {
            if let Some(v) = row.verdict.take() {
                row.verdict = Some(v.without_timing());
            }
        }
        self
    }
}

fn sweep_row(p: &BigInt, k: u32, l: u32, limits: &Limits) -> SweepRow {
    let n = compose_n(p, k, l);
    let mut row = SweepRow {
        p: p.clone(),
        k,
        l,
        n: n.clone(),
        theorem: None,
        status: RowStatus::Skipped,
        verdict: None,
        error: None,
    };
    if limits.check(&n).is_err() {
        return row;
    }
    if !arith::is_odd_prime(p) {
        row.status = RowStatus::Error;
        row.error = Some(Error::NotOddPrime(p.clone()).to_string());
        return row;
    }
    let in_scope = k >= 3 && k % 2 == 1;
    let outcome = if in_scope {
        let theorem = TheoremId::for_parameters(p, l).expect("every l has a statement");
        row.theorem = Some(theorem);
        TheoremCase::new(theorem, p.clone(), k, l).and_then(|case| verify_case(&case, limits))
    } else if k == 0 || arith::is_perfect_square(&n) {
        Err(Error::SquareN(n.clone()))
    } else {
        survey(p, k, l, limits)
    };
    match outcome {
        Ok(verdict) => {
            row.status = match verdict.scope {
                Scope::OutOfScope => RowStatus::OutOfScope,
                Scope::Exploratory => RowStatus::Exploratory,
                Scope::InScope if verdict.has_errata() => RowStatus::Errata,
                Scope::InScope => RowStatus::Pass,
            };
            row.verdict = Some(verdict);
        }
        Err(e) => {
            row.status = RowStatus::Error;
            row.error = Some(e.to_string());
        }
    }
    row
}

/// Runs every `(p, k, l)` combination in lexicographic order. Rows whose
/// `n` exceeds the cap are marked skipped; failures are recorded per row.
pub fn sweep(ps: &[BigInt], ks: &[u32], ls: &[u32], limits: &Limits) -> SweepTable {
    let cases: Vec<(&BigInt, u32, u32)> = ps
        .iter()
        .flat_map(|p| {
            ks.iter()
                .flat_map(move |&k| ls.iter().map(move |&l| (p, k, l)))
        })
        .collect();
    let rows: Vec<SweepRow> = cases
        .par_iter()
        .map(|&(p, k, l)| sweep_row(p, k, l, limits))
        .collect();
    let mut totals = SweepTotals::default();
    for row in &rows {
        *match row.status {
            RowStatus::Pass => &mut totals.pass,
            RowStatus::Errata => &mut totals.errata,
            RowStatus::Exploratory => &mut totals.exploratory,
            RowStatus::OutOfScope => &mut totals.out_of_scope,
            RowStatus::Skipped => &mut totals.skipped,
            RowStatus::Error => &mut totals.error,
        } += 1;
    }
    SweepTable {
        schema: 1,
        rows,
        totals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(t: &str, p: i64, k: u32, l: u32) -> TheoremCase {
        TheoremCase::new(t.parse().unwrap(), p, k, l).unwrap()
    }

    #[test]
    fn case_validation() {
        assert_eq!(case("2.1", 5, 3, 0).n(), BigInt::from(125));
        assert_eq!(case("2.9", 3, 5, 5).n(), BigInt::from(7776));
        assert!(matches!(
            TheoremCase::new(TheoremId::T2_1, 3, 3, 0),
            Err(Error::InvalidCase(_))
        ));
        assert!(matches!(
            TheoremCase::new(TheoremId::T2_3, 3, 4, 0),
            Err(Error::InvalidCase(_))
        ));
        assert!(matches!(
            TheoremCase::new(TheoremId::T2_5, 5, 3, 2),
            Err(Error::InvalidCase(_))
        ));
        assert!(matches!(
            TheoremCase::new(TheoremId::T2_9, 9, 3, 3),
            Err(Error::NotOddPrime(_))
        ));
        assert!("2.2".parse::<TheoremId>().is_err());
    }

    #[test]
    fn predictions() {
        let x = predict(&case("2.1", 5, 3, 0));
        assert_eq!(x.count, 2);
        assert_eq!(
            x.reps
                .iter()
                .map(|r| (r.a.clone(), r.c.clone()))
                .collect::<Vec<_>>(),
            vec![(0.into(), 1.into()), (1.into(), 2.into())]
        );
        let x = predict(&case("2.3", 3, 5, 0));
        assert_eq!(x.reps[1].c, BigInt::from(-1));
        let x = predict(&case("2.9", 3, 3, 3));
        assert_eq!(x.count, 4);
        assert_eq!(x.classifier, Classifier::Mod8);
        let classes: Vec<i8> = x.reps.iter().map(|r| r.intended_class).collect();
        assert_eq!(classes, vec![1, 7, 3, 5]);
    }

    #[test]
    fn rep_resolution() {
        let set = enumerate_ambiguous(&BigInt::from(1000), &Limits::default()).unwrap();
        let r = resolve_rep(&ExpectedRep::new(1, 3, 3), &Classifier::Mod8, &set).unwrap();
        assert_eq!(r.status, RepStatus::Valid);
        assert_eq!(r.element, Element::new(1, 3, 1000).unwrap());
        assert_eq!(r.element.b(), &BigInt::from(-333));

        let set = enumerate_ambiguous(&BigInt::from(216), &Limits::default()).unwrap();
        let r = resolve_rep(&ExpectedRep::new(1, 3, 3), &Classifier::Mod8, &set).unwrap();
        assert_eq!(r.status, RepStatus::Substituted);
        assert_eq!(Classifier::Mod8.classify(&r.element).unwrap().value, 3);
        assert!(r.element.is_ambiguous());
        // Oracle: the least (a, c) among all class-3 elements, found by scan.
        let least = set
            .iter()
            .filter(|e| class_value(e) == 3)
            .min_by_key(|e| (e.a().clone(), e.c().clone()))
            .unwrap();
        assert_eq!(&r.element, least);
    }

    fn class_value(e: &Element) -> i8 {
        Classifier::Mod8.classify(e).unwrap().value
    }

    #[test]
    fn empty_class_reported() {
        let set = enumerate_ambiguous(&BigInt::from(4913), &Limits::default()).unwrap();
        let classifier = Classifier::ModP { p: 17.into() };
        let stated = ExpectedRep::new(1, 2, -1);
        let r = resolve_rep(&stated, &classifier, &set).unwrap();
        assert_eq!(r.status, RepStatus::Valid);
        assert_eq!(r.class, 1);
        assert!(r.note.is_some());
        let missing = ExpectedRep::new(1, 4913, -1);
        assert!(matches!(
            resolve_rep(&missing, &classifier, &set),
            Err(Error::EmptyClass { .. })
        ));
    }

    #[test]
    fn verify_theorem_2_1() {
        let v = verify_case(&case("2.1", 5, 3, 0), &Limits::default()).unwrap();
        assert_eq!(v.computed_count, 2);
        assert_eq!(v.count_match, Some(true));
        assert_eq!(v.reps_distinct, Some(true));
        assert!(v.errata.is_empty(), "{:?}", v.errata);
        assert_eq!(v.scope, Scope::InScope);
    }

    #[test]
    fn verify_theorem_2_9() {
        let v = verify_case(&case("2.9", 5, 3, 3), &Limits::default()).unwrap();
        assert_eq!(v.computed_count, 4);
        let classes = v.classes.unwrap();
        assert!(classes.bijective);
        assert_eq!(classes.occupied, vec![1, 3, 5, 7]);
    }

    #[test]
    fn exploratory_case() {
        let v = verify_case(&case("2.1", 17, 3, 0), &Limits::default()).unwrap();
        assert_eq!(v.scope, Scope::Exploratory);
        assert!(v.errata.is_empty());
        assert!(v.notes.iter().any(|n| n.contains("degeneracy")));
        assert_eq!(v.computed_count, 2);
    }

    #[test]
    fn sweep_order_and_skips() {
        let limits = Limits {
            max_n: BigInt::from(2000),
        };
        let table = sweep(&[3.into(), 5.into()], &[3, 2], &[0, 3], &limits);
        let keys: Vec<(i64, u32, u32)> = table
            .rows
            .iter()
            .map(|r| (i64::try_from(&r.p).unwrap(), r.k, r.l))
            .collect();
        assert_eq!(
            keys,
            vec![
                (3, 3, 0),
                (3, 3, 3),
                (3, 2, 0),
                (3, 2, 3),
                (5, 3, 0),
                (5, 3, 3),
                (5, 2, 0),
                (5, 2, 3)
            ]
        );
        assert_eq!(table.rows[0].status, RowStatus::Pass);
        assert_eq!(table.rows[2].status, RowStatus::Error);
        assert_eq!(table.rows[3].status, RowStatus::OutOfScope);
        assert_eq!(table.rows[5].status, RowStatus::Pass);
        assert!(sweep(&[], &[3], &[0], &limits).rows.is_empty());
        let capped = sweep(&[3.into()], &[7], &[0], &limits);
        assert_eq!(capped.rows[0].status, RowStatus::Skipped);
        assert_eq!(capped.totals.skipped, 1);
    }
}
