//! Exact continued fractions of elements of Q*(√n) and the PSL(2,Z)
//! equivalence test built on them.
//!
//! One step replaces `e` by `1/(e - ⌊e⌋)`. With `a' = a - ⌊e⌋·c` and
//! `b' = (a'² - n)/c`, the new triple is `(-a', -c, -b')`, so every tail
//! stays in Q*(√n) and periodicity is detected by exact triple equality.
//!
//! If `e` first reaches tail `t` after `i` steps then `e = M·t` with
//! `det M = (-1)^i`. Two elements with the same periodic cycle are
//! therefore properly equivalent when the cycle length is odd (the cycle
//! itself supplies a determinant -1 automorph) or when they enter a common
//! state at indices of equal parity.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;

use crate::arith;
use crate::diagram::{Method, OrbitPartition};
use crate::element::Element;
use crate::enumeration::AmbiguousSet;
use crate::error::{Error, Result};

/// Eventually periodic continued fraction with its exact tail states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    preperiod: Vec<BigInt>,
    cycle: Vec<BigInt>,
    cycle_states: Vec<Element>,
    entry_index: usize,
}

impl Expansion {
    pub fn preperiod(&self) -> &[BigInt] {
        &self.preperiod
    }

    /// Partial quotients of the period, aligned with [`Expansion::cycle_states`].
    pub fn cycle(&self) -> &[BigInt] {
        &self.cycle
    }

    pub fn cycle_states(&self) -> &[Element] {
        &self.cycle_states
    }

    /// Number of steps before the first periodic state.
    pub fn entry_index(&self) -> usize {
        self.entry_index
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    /// Step index at which `state` is first reached.
    pub fn first_entry(&self, state: &Element) -> Option<usize> {
        self.cycle_states
            .iter()
            .position(|s| s == state)
            .map(|j| self.entry_index + j)
    }
}

/// `⌊(a + √n)/c⌋`, computed from `isqrt(n)` without floating point.
pub fn floor_element(e: &Element) -> BigInt {
    let root = arith::isqrt(e.n()).expect("n is positive");
    let numerator = e.a() + &root;
    if e.c().is_positive() {
        arith::floor_div(&numerator, e.c())
    } else {
        // √n is irrational, so -(a + √n)/|c| lies strictly between
        // -(a + s + 1)/|c| and -(a + s)/|c|.
        let magnitude = -e.c();
        -arith::floor_div(&numerator, &magnitude) - 1
    }
}

/// One continued fraction step: the partial quotient and the next tail.
pub fn cf_step(e: &Element) -> (BigInt, Element) {
    let q = floor_element(e);
    let shifted = e.a() - &q * e.c();
    let b = (&shifted * &shifted - e.n()) / e.c();
    let next = Element::in_field(-shifted, -b, e.shared_n())
        .expect("continued fraction step preserves membership");
    (q, next)
}

/// Default bound on the number of steps before a cycle must close.
pub fn default_step_limit(e: &Element) -> usize {
    let root = arith::isqrt(e.n()).expect("n is positive") + 1u32;
    let states: BigInt = root.pow(2) * 8u32;
    let warmup = (e.a().bits() + e.c().bits()) as usize * 2 + 8;
    usize::try_from(states)
        .unwrap_or(usize::MAX)
        .saturating_add(warmup)
}

pub fn cf_expand(e: &Element) -> Result<Expansion> {
    cf_expand_bounded(e, default_step_limit(e))
}

pub fn cf_expand_bounded(e: &Element, limit: usize) -> Result<Expansion> {
    let mut seen: HashMap<Element, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut quotients = Vec::new();
    let mut current = e.clone();
    while !seen.contains_key(&current) {
        if states.len() >= limit {
            return Err(Error::CycleLimitExceeded {
                start: e.clone(),
                limit,
            });
        }
        seen.insert(current.clone(), states.len());
        let (q, next) = cf_step(&current);
        states.push(current);
        quotients.push(q);
        current = next;
    }
    let entry_index = seen[&current];
    let cycle = quotients.split_off(entry_index);
    let cycle_states = states.split_off(entry_index);
    Ok(Expansion {
        preperiod: quotients,
        cycle,
        cycle_states,
        entry_index,
    })
}

fn ensure_same_n(e1: &Element, e2: &Element) -> Result<()> {
    if e1.n() != e2.n() {
        return Err(Error::MismatchedN(e1.n().clone(), e2.n().clone()));
    }
    Ok(())
}

/// True when some `M ∈ PSL(2,Z)` maps `e1` to `e2`.
pub fn psl_equivalent(e1: &Element, e2: &Element) -> Result<bool> {
    ensure_same_n(e1, e2)?;
    let x1 = cf_expand(e1)?;
    let x2 = cf_expand(e2)?;
    let common = &x1.cycle_states[0];
    let Some(i2) = x2.first_entry(common) else {
        return Ok(false);
    };
    let i1 = x1.entry_index;
    Ok(x1.period() % 2 == 1 || i1 % 2 == i2 % 2)
}

/// Equivalence under GL(2,Z): tails eventually coincide.
#[allow(dead_code)]
pub(crate) fn gl_equivalent(e1: &Element, e2: &Element) -> Result<bool> {
    ensure_same_n(e1, e2)?;
    let x1 = cf_expand(e1)?;
    let x2 = cf_expand(e2)?;
    Ok(x2.first_entry(&x1.cycle_states[0]).is_some())
}

/// Hashable PSL(2,Z) class key: the minimal rotation of the partial
/// quotient cycle plus, for even periods, the parity of the step at which
/// that rotation's starting state is first reached.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EquivalenceKey {
    pub cycle: Vec<BigInt>,
    pub parity: Option<u8>,
}

pub fn equivalence_key(e: &Element) -> Result<EquivalenceKey> {
    let x = cf_expand(e)?;
    let shift = minimal_rotation(&x.cycle);
    let mut cycle = x.cycle.clone();
    cycle.rotate_left(shift);
    let parity = (x.period() % 2 == 0).then(|| ((x.entry_index + shift) % 2) as u8);
    Ok(EquivalenceKey { cycle, parity })
}

/// Offset of the lexicographically least rotation. The quotient cycle of a
/// minimal state cycle is primitive, so this offset is unique.
fn minimal_rotation<T: Ord>(seq: &[T]) -> usize {
    (0..seq.len())
        .min_by(|&i, &j| {
            let left = seq[i..].iter().chain(&seq[..i]);
            let right = seq[j..].iter().chain(&seq[..j]);
            left.cmp(right)
        })
        .unwrap_or(0)
}

/// Orbits as PSL(2,Z)-equivalence classes of continued fraction tails.
pub fn partition_cf(set: &AmbiguousSet) -> Result<OrbitPartition> {
    let keys: Vec<EquivalenceKey> = set
        .elements()
        .par_iter()
        .map(equivalence_key)
        .collect::<Result<_>>()?;
    let mut classes: BTreeMap<EquivalenceKey, Vec<Element>> = BTreeMap::new();
    for (key, e) in keys.into_iter().zip(set) {
        classes.entry(key).or_default().push(e.clone());
    }
    OrbitPartition::from_groups(set, Method::Cf, classes.into_values().collect())
}

/// Convenience: expansion of `e` as `(preperiod, cycle)` in `i64` when small.
pub fn quotients_i64(x: &Expansion) -> Option<(Vec<i64>, Vec<i64>)> {
    use num_traits::ToPrimitive;
    let conv = |v: &[BigInt]| v.iter().map(|q| q.to_i64()).collect::<Option<Vec<_>>>();
    Some((conv(&x.preperiod)?, conv(&x.cycle)?))
}
