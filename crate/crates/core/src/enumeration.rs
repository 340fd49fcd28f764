//! The finite set of ambiguous numbers of Q*(√n).

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::element::{validate_n, Element};
use crate::error::{Error, Result};

/// Guards against runaway inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    #[serde(with = "crate::serde_int")]
    pub max_n: BigInt,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_n: BigInt::from(100_000_000u64),
        }
    }
}

impl Limits {
    pub fn check(&self, n: &BigInt) -> Result<()> {
        if n > &self.max_n {
            return Err(Error::LimitExceeded {
                n: n.clone(),
                cap: self.max_n.clone(),
            });
        }
        Ok(())
    }
}

/// All ambiguous elements of one Q*(√n), sorted by `(a, c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguousSet {
    n: Arc<BigInt>,
    elements: Vec<Element>,
}

impl AmbiguousSet {
    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Element> {
        self.elements.iter()
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.elements.binary_search(e).ok()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.index_of(e).is_some()
    }
}

impl<'a> IntoIterator for &'a AmbiguousSet {
    type Item = &'a Element;
    type IntoIter = std::slice::Iter<'a, Element>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// Every primitive `(a, b, c)` with `a² < n` and `c | a² - n`.
pub fn enumerate_ambiguous(n: &BigInt, limits: &Limits) -> Result<AmbiguousSet> {
    validate_n(n)?;
    limits.check(n)?;
    let root = arith::isqrt(n)?;
    let root = root.to_i64().ok_or_else(|| Error::LimitExceeded {
        n: n.clone(),
        cap: limits.max_n.clone(),
    })?;
    let shared = Arc::new(n.clone());

    let slices: Vec<Vec<Element>> = (-root..=root)
        .into_par_iter()
        .map(|a| {
            let a = BigInt::from(a);
            let numerator = &a * &a - n;
            arith::divisors_signed(&numerator)
                .expect("a^2 - n is nonzero for nonsquare n")
                .into_iter()
                .filter_map(|c| Element::in_field(a.clone(), c, &shared).ok())
                .collect()
        })
        .collect();

    let mut elements: Vec<Element> = slices.into_iter().flatten().collect();
    elements.sort();
    Ok(AmbiguousSet {
        n: shared,
        elements,
    })
}
