//! Elements of Q*(√n) and the generator action of the modular group.
//!
//! An element is the real number `(a + √n) / c` with `b = (a² - n) / c`
//! integral and `gcd(a, b, c) = 1`. The triple is stored without any sign
//! normalization: `(a + √n)/c` and `(-a + √n)/(-c)` are different numbers.
//!
//! The generators act by
//!
//! * `x: α ↦ -1/α`, which maps `(a, b, c)` to `(-a, c, b)`;
//! * `y: α ↦ (α - 1)/α`, which maps `(a, b, c)` to `(b - a, b - 2a + c, b)`;
//! * `y²: α ↦ -1/(α - 1)`, which maps `(a, b, c)` to `(c - a, c, b - 2a + c)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    n: Arc<BigInt>,
}

/// One of the three nontrivial generator moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    X,
    Y,
    YY,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::X, Generator::Y, Generator::YY];

    pub fn apply(self, e: &Element) -> Element {
        match self {
            Generator::X => e.apply_x(),
            Generator::Y => e.apply_y(),
            Generator::YY => e.apply_yy(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Generator::X => "x",
            Generator::Y => "y",
            Generator::YY => "y^2",
        }
    }
}

/// Checks that `n` is a positive nonsquare.
pub fn validate_n(n: &BigInt) -> Result<()> {
    if !n.is_positive() {
        return Err(Error::NonPositiveN(n.clone()));
    }
    if arith::is_perfect_square(n) {
        return Err(Error::SquareN(n.clone()));
    }
    Ok(())
}

impl Element {
    /// Builds `(a + √n)/c`, validating every membership condition.
    pub fn new(a: impl Into<BigInt>, c: impl Into<BigInt>, n: impl Into<BigInt>) -> Result<Self> {
        let n = n.into();
        validate_n(&n)?;
        Self::in_field(a.into(), c.into(), &Arc::new(n))
    }

    /// Like [`Element::new`] but shares an already validated `n`.
    pub(crate) fn in_field(a: BigInt, c: BigInt, n: &Arc<BigInt>) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let numerator = &a * &a - n.as_ref();
        let (b, rem) = numerator.div_rem(&c);
        if !rem.is_zero() {
            return Err(Error::NotDivisible { c, numerator });
        }
        if !arith::gcd3(&a, &b, &c).is_one() {
            return Err(Error::NotPrimitive { a, b, c });
        }
        Ok(Element {
            a,
            b,
            c,
            n: Arc::clone(n),
        })
    }

    /// Assembles a triple produced by a membership-preserving map.
    fn derived(a: BigInt, b: BigInt, c: BigInt, n: &Arc<BigInt>) -> Self {
        let e = Element {
            a,
            b,
            c,
            n: Arc::clone(n),
        };
        debug_assert!(e.check_invariants().is_ok(), "invariant broken: {e}");
        e
    }

    /// Re-checks `bc = a² - n`, `c ≠ 0` and primitivity.
    pub fn check_invariants(&self) -> Result<()> {
        if self.c.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if &self.b * &self.c != &self.a * &self.a - self.n.as_ref() {
            return Err(Error::InternalInconsistency(format!(
                "{self}: b*c != a^2 - n"
            )));
        }
        if !arith::gcd3(&self.a, &self.b, &self.c).is_one() {
            return Err(Error::NotPrimitive {
                a: self.a.clone(),
                b: self.b.clone(),
                c: self.c.clone(),
            });
        }
        Ok(())
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub(crate) fn shared_n(&self) -> &Arc<BigInt> {
        &self.n
    }

    /// `-1/α`.
    pub fn apply_x(&self) -> Element {
        Self::derived(-&self.a, self.c.clone(), self.b.clone(), &self.n)
    }

    /// `(α - 1)/α`.
    pub fn apply_y(&self) -> Element {
        let a = &self.b - &self.a;
        let b = &self.b - (&self.a << 1) + &self.c;
        Self::derived(a, b, self.b.clone(), &self.n)
    }

    /// `-1/(α - 1)`, the same map as two applications of `y`.
    pub fn apply_yy(&self) -> Element {
        let a = &self.c - &self.a;
        let c = &self.b - (&self.a << 1) + &self.c;
        Self::derived(a, self.c.clone(), c, &self.n)
    }

    pub fn apply(&self, g: Generator) -> Element {
        g.apply(self)
    }

    /// The algebraic conjugate `(a - √n)/c`, i.e. the triple `(-a, -b, -c)`.
    pub fn conjugate(&self) -> Element {
        Self::derived(-&self.a, -&self.b, -&self.c, &self.n)
    }

    /// True when the element and its conjugate have opposite signs.
    pub fn is_ambiguous(&self) -> bool {
        (&self.b * &self.c).is_negative()
    }

    /// Floating approximation for display and sorting only.
    pub fn value_approx(&self) -> f64 {
        // √n is carried with 64 + bits(n) fractional bits so that a + √n keeps
        // full relative precision even when a ≈ -√n.
        let extra = 64 + self.n.bits() as usize;
        let root = arith::isqrt(&(self.n.as_ref() << (2 * extra))).expect("n is positive");
        let numerator = (&self.a << extra) + root;
        let denominator = &self.c << extra;
        arith::ratio_to_f64(&numerator, &denominator)
    }

    /// `(a, c)` text form used on the command line, `"a,c"`.
    pub fn short(&self) -> String {
        format!("{},{}", self.a, self.c)
    }

    /// Parses `"a,c"` relative to a given `n`.
    pub fn parse_short(text: &str, n: &BigInt) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [a, c] => Element::new(parse_int(a, 0)?, parse_int(c, a.len() + 1)?, n.clone()),
            [a, b, c] => {
                let e = Element::new(
                    parse_int(a, 0)?,
                    parse_int(c, a.len() + b.len() + 2)?,
                    n.clone(),
                )?;
                let b = parse_int(b, a.len() + 1)?;
                if b != e.b {
                    return Err(Error::ParseError {
                        position: a.len() + 1,
                        message: format!("b should be {} for a={}, c={}", e.b, e.a, e.c),
                    });
                }
                Ok(e)
            }
            _ => Err(Error::ParseError {
                position: 0,
                message: format!("expected \"a,c\" or \"a,b,c\", got {text:?}"),
            }),
        }
    }
}

pub(crate) fn parse_int(text: &str, position: usize) -> Result<BigInt> {
    text.trim()
        .parse::<BigInt>()
        .map_err(|_| Error::ParseError {
            position,
            message: format!("not an integer: {text:?}"),
        })
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.a.cmp(&other.a))
            .then_with(|| self.c.cmp(&other.c))
            .then_with(|| self.b.cmp(&other.b))
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}|{}", self.a, self.b, self.c, self.n)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

impl FromStr for Element {
    type Err = Error;

    /// Parses the `"a,b,c|n"` text form.
    fn from_str(text: &str) -> Result<Self> {
        let (triple, n) = text.split_once('|').ok_or(Error::ParseError {
            position: 0,
            message: format!("expected \"a,b,c|n\", got {text:?}"),
        })?;
        let n = parse_int(n, triple.len() + 1)?;
        validate_n(&n)?;
        Element::parse_short(triple, &n)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(a: i64, c: i64, n: i64) -> Element {
        Element::new(a, c, n).unwrap()
    }

    fn triple(e: &Element) -> (BigInt, BigInt, BigInt) {
        (e.a().clone(), e.b().clone(), e.c().clone())
    }

    fn t(a: i64, b: i64, c: i64) -> (BigInt, BigInt, BigInt) {
        (a.into(), b.into(), c.into())
    }

    #[test]
    fn make_element_examples() {
        assert_eq!(triple(&el(0, 1, 5)), t(0, -5, 1));
        assert_eq!(triple(&el(1, 2, 125)), t(1, -62, 2));
        assert!(matches!(
            Element::new(0, 3, 216),
            Err(Error::NotPrimitive { .. })
        ));
    }

    #[test]
    fn make_element_errors() {
        assert_eq!(Element::new(1, 0, 5), Err(Error::ZeroDenominator));
        assert!(matches!(
            Element::new(1, 3, 5),
            Err(Error::NotDivisible { .. })
        ));
        assert_eq!(Element::new(0, 1, 16), Err(Error::SquareN(16.into())));
        assert_eq!(Element::new(0, 1, 0), Err(Error::NonPositiveN(0.into())));
        assert_eq!(
            Element::new(0, 1, -3),
            Err(Error::NonPositiveN((-3).into()))
        );
    }

    #[test]
    fn generator_examples() {
        assert_eq!(triple(&el(0, 1, 5).apply_x()), t(0, 1, -5));
        assert_eq!(triple(&el(1, 2, 125).apply_x()), t(-1, 2, -62));
        assert_eq!(triple(&el(0, 1, 5).apply_y()), t(-5, -4, -5));
        assert_eq!(triple(&el(-1, -62, 125).apply_y()), t(3, -58, 2));
        assert_eq!(triple(&el(0, 1, 5).apply_yy()), t(1, 1, -4));
        assert_eq!(triple(&el(0, -243, 243).apply_yy()), t(-243, -243, -242));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(triple(&el(0, 1, 5).conjugate()), t(0, 5, -1));
        assert_eq!(triple(&el(1, 2, 125).conjugate()), t(-1, 62, -2));
    }

    #[test]
    fn ambiguity_examples() {
        assert!(el(0, 1, 125).is_ambiguous());
        assert!(!el(12, 1, 125).is_ambiguous());
        assert!(el(1, 2, 125).is_ambiguous());
    }

    #[test]
    fn value_examples() {
        assert!((el(0, 1, 5).value_approx() - 2.2360679).abs() < 1e-7);
        assert!((el(1, 2, 125).value_approx() - 6.0901699).abs() < 1e-7);
        assert!((el(0, -1, 5).value_approx() + 2.2360679).abs() < 1e-7);
    }

    #[test]
    fn value_survives_cancellation() {
        // (-11 + √125)/1 ≈ 0.1803398875
        let e = el(-11, 1, 125);
        assert!((e.value_approx() - (125f64.sqrt() - 11.0)).abs() < 1e-12);
        let huge = Element::new(0, 1, BigInt::from(10).pow(80) + 1).unwrap();
        assert!((huge.value_approx() / 1e40 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn text_form() {
        let e = el(1, 2, 125);
        assert_eq!(e.to_string(), "1,-62,2|125");
        assert_eq!("1,-62,2|125".parse::<Element>().unwrap(), e);
        assert!("1,-61,2|125".parse::<Element>().is_err());
        assert!("1,2".parse::<Element>().is_err());
        assert_eq!(Element::parse_short("1,2", &125.into()).unwrap(), e);
    }

    #[test]
    fn ordering_is_by_a_then_c() {
        let mut v = [el(1, 2, 5), el(0, -1, 5), el(0, 1, 5), el(-1, 2, 5)];
        v.sort();
        let keys: Vec<String> = v.iter().map(Element::short).collect();
        assert_eq!(keys, vec!["-1,2", "0,-1", "0,1", "1,2"]);
    }
}
