//! Closed paths of ambiguous numbers in the coset diagram and the orbit
//! partition computed from them.
//!
//! From an ambiguous `e`, the element `x(e)` is again ambiguous and exactly
//! one of `y(x(e))` (which is `e + 1`) and `y²(x(e))` (which is `e/(1 + e)`)
//! is ambiguous. Following that unique branch is the successor map; its
//! cycles are the closed paths.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::element::Element;
use crate::enumeration::AmbiguousSet;
use crate::error::{DichotomyViolation, Error, Result};
use crate::union_find::DisjointSet;

/// A move along a closed path: `yx` (translation `α ↦ α + 1`) or `y²x`
/// (`α ↦ α/(1 + α)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepType {
    #[serde(rename = "yx")]
    YX,
    #[serde(rename = "y2x")]
    YYX,
}

impl StepType {
    pub fn apply(self, e: &Element) -> Element {
        let f = e.apply_x();
        match self {
            StepType::YX => f.apply_y(),
            StepType::YYX => f.apply_yy(),
        }
    }

    pub fn other(self) -> StepType {
        match self {
            StepType::YX => StepType::YYX,
            StepType::YYX => StepType::YX,
        }
    }

    /// Short label used for DOT edges.
    pub fn label(self) -> &'static str {
        match self {
            StepType::YX => "yx",
            StepType::YYX => "y2x",
        }
    }

    /// Block notation, `(yx)` or `(y^2x)`.
    pub fn notation(self) -> &'static str {
        match self {
            StepType::YX => "(yx)",
            StepType::YYX => "(y^2x)",
        }
    }
}

impl fmt::Display for StepType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The unique ambiguous neighbour of `e` reached by `yx` or `y²x`.
pub fn successor(e: &Element) -> Result<(Element, StepType)> {
    if !e.is_ambiguous() {
        return Err(Error::NotAmbiguous(e.clone()));
    }
    let f = e.apply_x();
    let via_y = f.apply_y();
    let via_yy = f.apply_yy();
    match (via_y.is_ambiguous(), via_yy.is_ambiguous()) {
        (true, false) => Ok((via_y, StepType::YX)),
        (false, true) => Ok((via_yy, StepType::YYX)),
        (via_y_ambiguous, via_yy_ambiguous) => {
            Err(Error::DichotomyViolation(Box::new(DichotomyViolation {
                element: e.clone(),
                via_y,
                via_yy,
                via_y_ambiguous,
                via_yy_ambiguous,
            })))
        }
    }
}

/// A cycle of the successor map, starting and ending at `anchor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedPath {
    anchor: Element,
    steps: Vec<(StepType, Element)>,
}

impl ClosedPath {
    pub fn anchor(&self) -> &Element {
        &self.anchor
    }

    /// `(step, target)` pairs; the last target is the anchor.
    pub fn steps(&self) -> &[(StepType, Element)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn step_types(&self) -> Vec<StepType> {
        self.steps.iter().map(|(t, _)| *t).collect()
    }

    /// Path vertices in traversal order, anchor first.
    pub fn vertices(&self) -> Vec<&Element> {
        std::iter::once(&self.anchor)
            .chain(self.steps[..self.steps.len() - 1].iter().map(|(_, e)| e))
            .collect()
    }
}

/// Default traversal bound: the ambiguous set never has more than
/// `8 (isqrt(n) + 1)²` elements.
pub(crate) fn default_cycle_bound(n: &BigInt) -> usize {
    let root = arith::isqrt(n).expect("n is positive") + 1u32;
    let bound: BigInt = root.pow(2) * 8u32 + 1u32;
    usize::try_from(bound).unwrap_or(usize::MAX)
}

/// The closed path through `e`.
pub fn closed_path(e: &Element) -> Result<ClosedPath> {
    closed_path_bounded(e, default_cycle_bound(e.n()))
}

/// The closed path through `e`, giving up after `limit` steps.
pub fn closed_path_bounded(e: &Element, limit: usize) -> Result<ClosedPath> {
    let mut steps = Vec::new();
    let mut seen = HashSet::new();
    let mut current = e.clone();
    loop {
        if steps.len() >= limit {
            return Err(Error::CycleLimitExceeded {
                start: e.clone(),
                limit,
            });
        }
        let (next, step) = successor(&current)?;
        if next == *e {
            steps.push((step, next));
            return Ok(ClosedPath {
                anchor: e.clone(),
                steps,
            });
        }
        if !seen.insert(next.clone()) {
            return Err(Error::InternalInconsistency(format!(
                "successor orbit of {e} enters a cycle at {next} without returning"
            )));
        }
        steps.push((step, next.clone()));
        current = next;
    }
}

/// Path vertices together with their `x`-images, sorted and deduplicated.
pub fn orbit_members(path: &ClosedPath) -> Vec<Element> {
    let mut members: Vec<Element> = path
        .vertices()
        .into_iter()
        .flat_map(|v| [v.clone(), v.apply_x()])
        .collect();
    members.sort();
    members.dedup();
    members
}

/// One G-orbit, described by its ambiguous numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    representative: Element,
    members: Vec<Element>,
    path: ClosedPath,
}

impl Orbit {
    /// Least member by `(a, c)`.
    pub fn representative(&self) -> &Element {
        &self.representative
    }

    pub fn members(&self) -> &[Element] {
        &self.members
    }

    /// The closed path anchored at the representative.
    pub fn path(&self) -> &ClosedPath {
        &self.path
    }

    /// Number of ambiguous numbers in the orbit.
    pub fn ambiguous_length(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.members.binary_search(e).is_ok()
    }
}

/// How an [`OrbitPartition`] was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Graph,
    Cf,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Graph => "graph",
            Method::Cf => "cf",
        })
    }
}

/// The ambiguous numbers of Q*(√n) split into G-orbits, ordered by
/// representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    n: Arc<BigInt>,
    method: Method,
    orbits: Vec<Orbit>,
}

impl OrbitPartition {
    /// Builds orbit records from member groups. Each group must be exactly
    /// `path ∪ x(path)` for the path through its least member.
    pub(crate) fn from_groups(
        set: &AmbiguousSet,
        method: Method,
        groups: Vec<Vec<Element>>,
    ) -> Result<Self> {
        let limit = set.len() + 1;
        let mut orbits = Vec::with_capacity(groups.len());
        for mut members in groups {
            members.sort();
            let representative = members[0].clone();
            let path = closed_path_bounded(&representative, limit)?;
            let closure = orbit_members(&path);
            if closure != members {
                return Err(Error::InternalInconsistency(format!(
                    "{method} component of {representative} has {} members but path ∪ x(path) has {}",
                    members.len(),
                    closure.len()
                )));
            }
            orbits.push(Orbit {
                representative,
                members,
                path,
            });
        }
        orbits.sort_by(|l, r| l.representative.cmp(&r.representative));
        Ok(OrbitPartition {
            n: Arc::new(set.n().clone()),
            method,
            orbits,
        })
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    pub fn total_members(&self) -> usize {
        self.orbits.iter().map(Orbit::ambiguous_length).sum()
    }

    /// Index of the orbit containing `e`.
    pub fn orbit_of(&self, e: &Element) -> Option<usize> {
        self.orbits.iter().position(|o| o.contains(e))
    }

    /// True when both partitions have identical member sets.
    pub fn same_components(&self, other: &OrbitPartition) -> bool {
        self.n == other.n
            && self.orbits.len() == other.orbits.len()
            && self
                .orbits
                .iter()
                .zip(&other.orbits)
                .all(|(l, r)| l.members == r.members)
    }

    /// Smallest element whose orbit differs between the two partitions.
    pub fn first_disagreement(&self, other: &OrbitPartition) -> Option<Element> {
        let mut candidates: Vec<&Element> = self
            .orbits
            .iter()
            .zip(other.orbits.iter().map(Some).chain(std::iter::repeat(None)))
            .filter(|(l, r)| r.is_none_or(|r| l.members != r.members))
            .map(|(l, _)| &l.representative)
            .collect();
        candidates.sort();
        candidates.first().map(|e| (*e).clone())
    }
}

/// Orbits as connected components of the generator graph on the ambiguous set.
pub fn partition_graph(set: &AmbiguousSet) -> Result<OrbitPartition> {
    let elements = set.elements();
    let mut ds = DisjointSet::new(elements.len());
    for (i, e) in elements.iter().enumerate() {
        for image in [e.apply_x(), e.apply_y(), e.apply_yy()] {
            if image.is_ambiguous() {
                let j = set.index_of(&image).ok_or_else(|| {
                    Error::InternalInconsistency(format!(
                        "ambiguous image {image} of {e} missing from the enumeration"
                    ))
                })?;
                ds.union(i, j);
            }
        }
    }
    let groups = ds
        .groups()
        .into_iter()
        .map(|g| g.into_iter().map(|i| elements[i].clone()).collect())
        .collect();
    OrbitPartition::from_groups(set, Method::Graph, groups)
}

/// Renders the orbit containing `selector` as a DOT digraph: successor edges
/// are directed, `x`-pairings are undirected dashed edges.
pub fn export_dot(partition: &OrbitPartition, selector: &Element) -> Result<String> {
    let index = partition
        .orbit_of(selector)
        .ok_or_else(|| Error::UnknownOrbit(selector.to_string()))?;
    let orbit = &partition.orbits[index];
    let node = |e: &Element| format!("\"{},{},{}\"", e.a(), e.b(), e.c());

    let mut out = String::new();
    let _ = writeln!(
        out,
        "digraph orbit {{\n  label=\"n = {}, representative {}\";",
        partition.n(),
        orbit.representative.short()
    );
    for e in &orbit.members {
        let _ = writeln!(out, "  {};", node(e));
    }

    let mut directed = Vec::new();
    let mut visited = HashSet::new();
    for e in &orbit.members {
        if visited.contains(e) {
            continue;
        }
        let path = closed_path_bounded(e, orbit.members.len() + 1)?;
        for (source, (step, target)) in path.vertices().into_iter().zip(path.steps()) {
            visited.insert(source.clone());
            directed.push((source.clone(), target.clone(), *step));
        }
    }
    directed.sort();
    for (source, target, step) in directed {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{}\"];",
            node(&source),
            node(&target),
            step.label()
        );
    }

    for e in &orbit.members {
        let partner = e.apply_x();
        if *e < partner {
            let _ = writeln!(
                out,
                "  {} -> {} [style=dashed, dir=none, label=\"x\"];",
                node(e),
                node(&partner)
            );
        }
    }
    out.push_str("}\n");
    Ok(out)
}
