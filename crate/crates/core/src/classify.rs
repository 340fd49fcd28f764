//! G-subset classifiers: the Legendre class modulo an odd prime dividing
//! `n`, and the residue class modulo 8 when `8 | n`.
//!
//! Both are decision trees over `c` first, `b` second. For the prime
//! classifier `p` cannot divide both `b` and `c` (it would divide `a²` and
//! then `a`). For the mod-8 classifier `c ≡ 2 (mod 4)` is impossible, and
//! when `c` is even `b` is odd.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::element::{Element, Generator};
use crate::enumeration::AmbiguousSet;
use crate::error::{Error, Result};

/// Legendre symbol `(u/p)` by Euler's criterion.
pub fn legendre(u: &BigInt, p: &BigInt) -> Result<i8> {
    if !arith::is_odd_prime(p) {
        return Err(Error::NotOddPrime(p.clone()));
    }
    Ok(legendre_unchecked(u, p))
}

fn legendre_unchecked(u: &BigInt, p: &BigInt) -> i8 {
    let r = u.mod_floor(p);
    if r.is_zero() {
        return 0;
    }
    let exponent: BigInt = (p - 1u32) >> 1;
    if r.modpow(&exponent, p).is_one() {
        1
    } else {
        -1
    }
}

/// Which invariant a [`ResidueClass`] was computed with.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classifier {
    ModP {
        #[serde(with = "crate::serde_int")]
        p: BigInt,
    },
    Mod8,
}

impl Classifier {
    /// Checks that the classifier is defined on Q*(√n).
    pub fn check_applicable(&self, n: &BigInt) -> Result<()> {
        match self {
            Classifier::ModP { p } => {
                if !arith::is_odd_prime(p) {
                    return Err(Error::NotOddPrime(p.clone()));
                }
                if !n.is_multiple_of(p) {
                    return Err(Error::PNotDividesN {
                        p: p.clone(),
                        n: n.clone(),
                    });
                }
                Ok(())
            }
            Classifier::Mod8 => {
                if !n.is_multiple_of(&BigInt::from(8)) {
                    return Err(Error::NNotDivisibleBy8(n.clone()));
                }
                Ok(())
            }
        }
    }

    pub fn classify(&self, e: &Element) -> Result<ResidueClass> {
        match self {
            Classifier::ModP { p } => class_mod_p(e, p),
            Classifier::Mod8 => class_mod8(e),
        }
    }

    /// Every value the classifier can take.
    pub fn values(&self) -> &'static [i8] {
        match self {
            Classifier::ModP { .. } => &[1, -1],
            Classifier::Mod8 => &[1, 3, 5, 7],
        }
    }

    /// Short name used as a report key, e.g. `mod5` or `mod8`.
    pub fn key(&self) -> String {
        match self {
            Classifier::ModP { p } => format!("mod{p}"),
            Classifier::Mod8 => "mod8".to_string(),
        }
    }

    /// Classifiers applicable to `n`: one per odd prime divisor, plus mod 8.
    pub fn applicable_to(n: &BigInt) -> Vec<Classifier> {
        let mut out: Vec<Classifier> = arith::odd_prime_divisors(n)
            .into_iter()
            .map(|p| Classifier::ModP { p })
            .collect();
        if n.is_multiple_of(&BigInt::from(8)) {
            out.push(Classifier::Mod8);
        }
        out
    }
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classifier::ModP { p } => write!(f, "Legendre class mod {p}"),
            Classifier::Mod8 => f.write_str("residue class mod 8"),
        }
    }
}

/// The class of one element under one classifier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueClass {
    pub classifier: Classifier,
    pub value: i8,
    #[serde(with = "crate::serde_int")]
    pub n: BigInt,
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.classifier {
            Classifier::ModP { .. } if self.value > 0 => write!(f, "+{}", self.value),
            _ => write!(f, "{}", self.value),
        }
    }
}

/// `(c/p)` when `p ∤ c`, otherwise `(b/p)`.
pub fn class_mod_p(e: &Element, p: &BigInt) -> Result<ResidueClass> {
    let classifier = Classifier::ModP { p: p.clone() };
    classifier.check_applicable(e.n())?;
    let by_c = legendre_unchecked(e.c(), p);
    let by_b = legendre_unchecked(e.b(), p);
    if by_c != 0 && by_b != 0 && by_c != by_b {
        return Err(Error::InternalInconsistency(format!(
            "{e}: (c/{p}) = {by_c} but (b/{p}) = {by_b}"
        )));
    }
    let value = if by_c != 0 { by_c } else { by_b };
    if value == 0 {
        return Err(Error::InternalInconsistency(format!(
            "{e}: {p} divides both b and c"
        )));
    }
    Ok(ResidueClass {
        classifier,
        value,
        n: e.n().clone(),
    })
}

/// `c mod 8` when `c` is odd, otherwise `b mod 8`.
pub fn class_mod8(e: &Element) -> Result<ResidueClass> {
    Classifier::Mod8.check_applicable(e.n())?;
    let eight = BigInt::from(8);
    let by_c = e.c().mod_floor(&eight);
    let by_b = e.b().mod_floor(&eight);
    let value = match (by_c.is_odd(), by_b.is_odd()) {
        (true, true) if by_c != by_b => {
            return Err(Error::InternalInconsistency(format!(
                "{e}: b and c odd but b ≢ c (mod 8)"
            )))
        }
        (true, _) => by_c,
        (false, true) => by_b,
        (false, false) => {
            return Err(Error::InternalInconsistency(format!(
                "{e}: b and c both even"
            )))
        }
    };
    Ok(ResidueClass {
        classifier: Classifier::Mod8,
        value: value.to_i8().expect("residue below 8"),
        n: e.n().clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub element: Element,
    pub generator: String,
    pub image: Element,
    pub before: i8,
    pub after: i8,
}

/// Result of checking that a classifier is constant along generator moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    #[serde(with = "crate::serde_int")]
    pub n: BigInt,
    pub classifier: Classifier,
    pub depth: usize,
    pub seed: u64,
    pub elements_checked: usize,
    pub moves_checked: usize,
    /// Occupied class values among the ambiguous numbers, ascending.
    pub occupied: Vec<i8>,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `class(g·e) = class(e)` for every generator `g`, every ambiguous
/// `e`, and every element on a seeded random walk of `depth` moves from it.
pub fn invariance_audit(
    set: &AmbiguousSet,
    classifier: &Classifier,
    depth: usize,
    seed: u64,
) -> Result<AuditReport> {
    classifier.check_applicable(set.n())?;
    let per_start: Vec<Result<(usize, Vec<Violation>)>> = set
        .elements()
        .par_iter()
        .enumerate()
        .map(|(index, start)| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            let mut violations = Vec::new();
            let mut moves = 0;
            let mut current = start.clone();
            for step in 0..=depth {
                let before = classifier.classify(&current)?.value;
                for g in Generator::ALL {
                    let image = g.apply(&current);
                    let after = classifier.classify(&image)?.value;
                    moves += 1;
                    if after != before {
                        violations.push(Violation {
                            element: current.clone(),
                            generator: g.symbol().to_string(),
                            image,
                            before,
                            after,
                        });
                    }
                }
                if step < depth {
                    let g = Generator::ALL[rng.gen_range(0..3)];
                    current = g.apply(&current);
                }
            }
            Ok((moves, violations))
        })
        .collect();

    let mut moves_checked = 0;
    let mut violations = Vec::new();
    for item in per_start {
        let (moves, found) = item?;
        moves_checked += moves;
        violations.extend(found);
    }
    let mut occupied: Vec<i8> = set
        .iter()
        .map(|e| classifier.classify(e).map(|c| c.value))
        .collect::<Result<_>>()?;
    occupied.sort();
    occupied.dedup();
    Ok(AuditReport {
        n: set.n().clone(),
        classifier: classifier.clone(),
        depth,
        seed,
        elements_checked: set.len(),
        moves_checked,
        occupied,
        violations,
    })
}

/// Whether the Legendre classifier mod `p` is guaranteed to see both
/// classes: `(2/p) = -1` exactly when `p ≡ ±3 (mod 8)`.
pub fn two_is_nonresidue(p: &BigInt) -> bool {
    let r = p.mod_floor(&BigInt::from(8));
    r == BigInt::from(3) || r == BigInt::from(5)
}

/// `true` if `p` is `1 (mod 8)`, where Legendre class -1 of `Q*(√(p^k))` is
/// empty.
pub fn legendre_degenerate(p: &BigInt) -> bool {
    p.mod_floor(&BigInt::from(8)).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{enumerate_ambiguous, Limits};

    fn el(a: i64, c: i64, n: i64) -> Element {
        Element::new(a, c, n).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// Brute force: is `u` a nonzero square modulo `p`?
    fn is_residue(u: i64, p: i64) -> bool {
        (1..p).any(|x| (x * x - u).rem_euclid(p) == 0)
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(&big(1), &big(7)), Ok(1));
        assert_eq!(legendre(&big(2), &big(5)), Ok(-1));
        assert_eq!(legendre(&big(3), &big(7)), Ok(-1));
        assert_eq!(legendre(&big(14), &big(7)), Ok(0));
        assert_eq!(legendre(&big(3), &big(9)), Err(Error::NotOddPrime(big(9))));
        assert_eq!(legendre(&big(3), &big(2)), Err(Error::NotOddPrime(big(2))));
    }

    #[test]
    fn legendre_matches_brute_force() {
        for p in [3i64, 5, 7, 11, 13, 17, 19, 23] {
            for u in -30i64..30 {
                let expected = if u.rem_euclid(p) == 0 {
                    0
                } else if is_residue(u, p) {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre(&big(u), &big(p)).unwrap(), expected, "({u}/{p})");
            }
        }
    }

    #[test]
    fn mod_p_examples() {
        assert_eq!(class_mod_p(&el(0, 1, 125), &big(5)).unwrap().value, 1);
        assert_eq!(class_mod_p(&el(1, 2, 125), &big(5)).unwrap().value, -1);
        assert_eq!(class_mod_p(&el(0, -1, 243), &big(3)).unwrap().value, -1);
        assert_eq!(
            class_mod_p(&el(0, 1, 125), &big(3)),
            Err(Error::PNotDividesN {
                p: big(3),
                n: big(125)
            })
        );
    }

    #[test]
    fn mod8_examples() {
        assert_eq!(class_mod8(&el(0, 1, 216)).unwrap().value, 1);
        assert_eq!(class_mod8(&el(0, -1, 216)).unwrap().value, 7);
        let e = el(1, -5, 216);
        assert_eq!(e.b(), &big(43));
        assert_eq!(class_mod8(&e).unwrap().value, 3);
        assert_eq!(
            class_mod8(&el(0, 1, 125)),
            Err(Error::NNotDivisibleBy8(big(125)))
        );
    }

    #[test]
    fn audits_find_no_violations() {
        let cases = [
            (125, Classifier::ModP { p: big(5) }),
            (216, Classifier::Mod8),
            (216, Classifier::ModP { p: big(3) }),
        ];
        for (n, classifier) in cases {
            let set = enumerate_ambiguous(&big(n), &Limits::default()).unwrap();
            let report = invariance_audit(&set, &classifier, 20, 0).unwrap();
            assert!(report.passed(), "{n} {classifier}: {:?}", report.violations);
            assert_eq!(report.moves_checked, set.len() * 21 * 3);
            assert_eq!(report, invariance_audit(&set, &classifier, 20, 0).unwrap());
        }
    }

    #[test]
    fn degenerate_prime_leaves_class_empty() {
        let set = enumerate_ambiguous(&big(4913), &Limits::default()).unwrap();
        let report = invariance_audit(&set, &Classifier::ModP { p: big(17) }, 2, 0).unwrap();
        assert_eq!(report.occupied, vec![1]);
        assert!(legendre_degenerate(&big(17)));
        assert!(!two_is_nonresidue(&big(17)));
        assert!(two_is_nonresidue(&big(5)));
    }

    #[test]
    fn applicable_classifiers() {
        assert_eq!(
            Classifier::applicable_to(&big(1000)),
            vec![Classifier::ModP { p: big(5) }, Classifier::Mod8]
        );
        assert_eq!(
            Classifier::applicable_to(&big(54)),
            vec![Classifier::ModP { p: big(3) }]
        );
    }
}
