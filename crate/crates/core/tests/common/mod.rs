#![allow(dead_code)]

use ambigraph_core::arith::is_perfect_square;
use ambigraph_core::{enumerate_ambiguous, AmbiguousSet, Element, Limits};
use num_bigint::BigInt;

/// Every nonsquare `n` in `2..=max`.
pub fn corpus(max: u32) -> Vec<BigInt> {
    (2..=max)
        .map(BigInt::from)
        .filter(|n| !is_perfect_square(n))
        .collect()
}

pub fn ambiguous(n: impl Into<BigInt>) -> AmbiguousSet {
    enumerate_ambiguous(&n.into(), &Limits::default()).expect("n within limits")
}

pub fn el(a: i64, c: i64, n: i64) -> Element {
    Element::new(a, c, n).expect("valid element")
}
