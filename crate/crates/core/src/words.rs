//! Words over the blocks `yx` and `y²x`, their integer matrices, circuits
//! and stabilizer words.
//!
//! A block `(yx)^m` acts as `α ↦ α + m` and `(y²x)^m` as
//! `α ↦ α/(mα + 1)`. In a written word the first block acts first, so the
//! matrix of `B₁B₂…B_k` is the product `M_k ⋯ M₂ M₁`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diagram::{closed_path, ClosedPath, StepType};
use crate::element::Element;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub step: StepType,
    pub exponent: u64,
}

/// Alternating product of `(yx)` and `(y²x)` powers. The empty word is the
/// identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word {
    blocks: Vec<Block>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Builds a word, merging adjacent blocks of the same type. Returns the
    /// word and how many merges happened.
    pub fn from_blocks(blocks: impl IntoIterator<Item = Block>) -> Result<(Self, usize)> {
        let mut out: Vec<Block> = Vec::new();
        let mut merges = 0;
        for block in blocks {
            if block.exponent == 0 {
                return Err(Error::ParseError {
                    position: 0,
                    message: "block exponents must be positive".into(),
                });
            }
            match out.last_mut() {
                Some(last) if last.step == block.step => {
                    last.exponent += block.exponent;
                    merges += 1;
                }
                _ => out.push(block),
            }
        }
        Ok((Word { blocks: out }, merges))
    }

    /// Run-length encodes a sequence of steps.
    pub fn from_steps(steps: &[StepType]) -> Self {
        let mut blocks: Vec<Block> = Vec::new();
        for &step in steps {
            match blocks.last_mut() {
                Some(last) if last.step == step => last.exponent += 1,
                _ => blocks.push(Block { step, exponent: 1 }),
            }
        }
        Word { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn exponents(&self) -> Vec<u64> {
        self.blocks.iter().map(|b| b.exponent).collect()
    }

    /// Applies the word one generator step at a time.
    pub fn apply_stepwise(&self, e: &Element) -> Element {
        let mut current = e.clone();
        for block in &self.blocks {
            for _ in 0..block.exponent {
                current = block.step.apply(&current);
            }
        }
        current
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return f.write_str("1");
        }
        for block in &self.blocks {
            write!(f, "{}^{}", block.step.notation(), block.exponent)?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_word(&text)
            .map(|parsed| parsed.word)
            .map_err(serde::de::Error::custom)
    }
}

/// A parsed word plus notices about normalizations applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedWord {
    pub word: Word,
    pub notices: Vec<String>,
}

/// Parses block notation such as `(yx)^5(y^2x)^11(yx)^6` (LaTeX braces and
/// whitespace allowed) or raw generator strings such as `yxyyx`.
pub fn parse_word(text: &str) -> Result<ParsedWord> {
    let mut parser = WordParser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let mut blocks = Vec::new();
    let mut notices = Vec::new();
    parser.skip_space();
    if parser.peek() == Some('1') && parser.rest_is_blank(1) {
        return Ok(ParsedWord {
            word: Word::identity(),
            notices,
        });
    }
    while let Some(ch) = parser.peek() {
        let start = parser.pos;
        let block = match ch {
            '(' => {
                parser.pos += 1;
                let step = parser.block_body()?;
                parser.expect(')')?;
                let exponent = parser.exponent()?.unwrap_or(1);
                Block { step, exponent }
            }
            'y' => Block {
                step: parser.block_body()?,
                exponent: 1,
            },
            _ => return Err(parser.error(format!("unexpected character {ch:?}"))),
        };
        if block.exponent == 0 {
            return Err(Error::ParseError {
                position: start,
                message: "block exponents must be positive".into(),
            });
        }
        if let Some(&Block { step, exponent }) = blocks.last() {
            if step == block.step {
                notices.push(format!(
                    "merged adjacent {}^{}{}^{} at position {start}",
                    step.notation(),
                    exponent,
                    step.notation(),
                    block.exponent
                ));
            }
        }
        blocks.push(block);
        parser.skip_space();
    }
    let (word, _) = Word::from_blocks(blocks)?;
    Ok(ParsedWord { word, notices })
}

struct WordParser {
    chars: Vec<char>,
    pos: usize,
}

impl WordParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_space(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn rest_is_blank(&self, from: usize) -> bool {
        self.chars[self.pos + from..]
            .iter()
            .all(|c| c.is_whitespace())
    }

    fn error(&self, message: String) -> Error {
        Error::ParseError {
            position: self.pos,
            message,
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_space();
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {want:?}")))
        }
    }

    /// `yx`, `yyx`, `y^2x`, `y^{2}x`, `y2x` or `y²x`.
    fn block_body(&mut self) -> Result<StepType> {
        self.skip_space();
        if self.peek() != Some('y') {
            return Err(self.error("expected 'y'".into()));
        }
        self.pos += 1;
        self.skip_space();
        let step = match self.peek() {
            Some('x') => StepType::YX,
            Some('y') => {
                self.pos += 1;
                StepType::YYX
            }
            Some('2') | Some('²') => {
                self.pos += 1;
                StepType::YYX
            }
            Some('^') => {
                self.pos += 1;
                match self.number()? {
                    2 => StepType::YYX,
                    1 => StepType::YX,
                    other => return Err(self.error(format!("y^{other} is not a block generator"))),
                }
            }
            _ => return Err(self.error("expected 'x', 'y' or '^2' after 'y'".into())),
        };
        self.skip_space();
        if self.peek() != Some('x') {
            return Err(self.error("block must end with 'x'".into()));
        }
        self.pos += 1;
        Ok(step)
    }

    fn exponent(&mut self) -> Result<Option<u64>> {
        self.skip_space();
        if self.peek() != Some('^') {
            return Ok(None);
        }
        self.pos += 1;
        self.number().map(Some)
    }

    /// Digits, optionally wrapped in braces.
    fn number(&mut self) -> Result<u64> {
        self.skip_space();
        let braced = self.peek() == Some('{');
        if braced {
            self.pos += 1;
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number".into()));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let value = digits
            .parse()
            .map_err(|_| self.error(format!("exponent {digits} out of range")))?;
        if braced {
            self.expect('}')?;
        }
        Ok(value)
    }
}

/// Integer 2×2 matrix `[[p, q], [r, s]]` acting by `α ↦ (pα + q)/(rα + s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub p: BigInt,
    pub q: BigInt,
    pub r: BigInt,
    pub s: BigInt,
}

impl Mat2 {
    pub fn new(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        r: impl Into<BigInt>,
        s: impl Into<BigInt>,
    ) -> Self {
        Mat2 {
            p: p.into(),
            q: q.into(),
            r: r.into(),
            s: s.into(),
        }
    }

    pub fn identity() -> Self {
        Mat2::new(1, 0, 0, 1)
    }

    /// `x: α ↦ -1/α`.
    pub fn x() -> Self {
        Mat2::new(0, -1, 1, 0)
    }

    /// `y: α ↦ (α - 1)/α`.
    pub fn y() -> Self {
        Mat2::new(1, -1, 1, 0)
    }

    pub fn block(step: StepType, exponent: u64) -> Self {
        match step {
            StepType::YX => Mat2::new(1, exponent, 0, 1),
            StepType::YYX => Mat2::new(1, 0, exponent, 1),
        }
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            p: &self.p * &rhs.p + &self.q * &rhs.r,
            q: &self.p * &rhs.q + &self.q * &rhs.s,
            r: &self.r * &rhs.p + &self.s * &rhs.r,
            s: &self.r * &rhs.q + &self.s * &rhs.s,
        }
    }

    pub fn det(&self) -> BigInt {
        &self.p * &self.s - &self.q * &self.r
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 {
            p: -&self.p,
            q: -&self.q,
            r: -&self.r,
            s: -&self.s,
        }
    }

    /// Equality in PSL(2,Z): up to a common sign.
    pub fn projectively_eq(&self, other: &Mat2) -> bool {
        self == other || self.neg() == *other
    }

    pub fn entries(&self) -> [[&BigInt; 2]; 2] {
        [[&self.p, &self.q], [&self.r, &self.s]]
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.p, self.q, self.r, self.s)
    }
}

#[derive(Serialize, Deserialize)]
struct Int(#[serde(with = "crate::serde_int")] BigInt);

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows = serializer.serialize_seq(Some(2))?;
        rows.serialize_element(&[Int(self.p.clone()), Int(self.q.clone())])?;
        rows.serialize_element(&[Int(self.r.clone()), Int(self.s.clone())])?;
        rows.end()
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [[Int(p), Int(q)], [Int(r), Int(s)]] = <[[Int; 2]; 2]>::deserialize(deserializer)?;
        Ok(Mat2 { p, q, r, s })
    }
}

pub fn word_to_matrix(word: &Word) -> Mat2 {
    word.blocks.iter().fold(Mat2::identity(), |acc, block| {
        Mat2::block(block.step, block.exponent).mul(&acc)
    })
}

/// `(pα + q)/(rα + s)` on an element, computed exactly on the triple.
pub fn mobius_apply(m: &Mat2, e: &Element) -> Result<Element> {
    if !m.det().is_one() {
        return Err(Error::InternalInconsistency(format!(
            "matrix {m} has determinant {}",
            m.det()
        )));
    }
    let (a, c, n) = (e.a(), e.c(), e.n());
    let top = &m.p * a + &m.q * c;
    let bottom = &m.r * a + &m.s * c;
    let new_a_times_c = &top * &bottom - &m.p * &m.r * n;
    let new_c_times_c = &bottom * &bottom - &m.r * &m.r * n;
    let (new_a, rem_a) = new_a_times_c.div_rem(c);
    let (new_c, rem_c) = new_c_times_c.div_rem(c);
    if !rem_a.is_zero() || !rem_c.is_zero() {
        return Err(Error::InternalInconsistency(format!(
            "Möbius image of {e} under {m} is not divisible by c"
        )));
    }
    Element::in_field(new_a, new_c, e.shared_n()).map_err(|err| {
        Error::InternalInconsistency(format!("Möbius image of {e} under {m}: {err}"))
    })
}

/// Coefficients `(r, s - p, -q)` of the fixed-point equation
/// `rα² + (s - p)α - q = 0`.
pub fn fixed_quadratic(m: &Mat2) -> (BigInt, BigInt, BigInt) {
    (m.r.clone(), &m.s - &m.p, -&m.q)
}

/// True when `u` is a rational multiple of `v` (the zero vector is a
/// multiple of everything).
pub fn proportional(u: &(BigInt, BigInt, BigInt), v: &(BigInt, BigInt, BigInt)) -> bool {
    &u.0 * &v.1 == &u.1 * &v.0 && &u.0 * &v.2 == &u.2 * &v.0 && &u.1 * &v.2 == &u.2 * &v.1
}

/// `(c, -2a, b)`: the quadratic whose roots are `e` and its conjugate.
pub fn minimal_quadratic(e: &Element) -> (BigInt, BigInt, BigInt) {
    (e.c().clone(), e.a() * -2, e.b().clone())
}

/// Cyclic sequence of block exponents of a closed path, canonicalized so
/// that block 0 is a `yx` run and the sequence is the least among rotations
/// by an even number of blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    exponents: Vec<u64>,
    start: StepType,
}

impl Circuit {
    /// Canonicalizes a cyclic alternating exponent sequence whose first
    /// block has type `start`.
    pub fn new(exponents: Vec<u64>, start: StepType) -> Result<Self> {
        if exponents.len() % 2 == 1 {
            return Err(Error::OddBlockCount(exponents.len()));
        }
        let mut exponents = exponents;
        if start == StepType::YYX && !exponents.is_empty() {
            exponents.rotate_left(1);
        }
        let best = (0..exponents.len())
            .step_by(2)
            .min_by(|&i, &j| {
                let left = exponents[i..].iter().chain(&exponents[..i]);
                let right = exponents[j..].iter().chain(&exponents[..j]);
                left.cmp(right)
            })
            .unwrap_or(0);
        exponents.rotate_left(best);
        Ok(Circuit {
            exponents,
            start: StepType::YX,
        })
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn start(&self) -> StepType {
        self.start
    }

    pub fn blocks(&self) -> usize {
        self.exponents.len()
    }

    /// True when `seq`, read cyclically, is some rotation of this circuit.
    pub fn matches_cyclic(&self, seq: &[u64]) -> bool {
        cyclically_equal(&self.exponents, seq)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for Circuit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.exponents.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let exponents = Vec::<u64>::deserialize(deserializer)?;
        Circuit::new(exponents, StepType::YX).map_err(serde::de::Error::custom)
    }
}

/// Rotation equality of two sequences.
pub fn cyclically_equal<T: PartialEq>(u: &[T], v: &[T]) -> bool {
    u.len() == v.len()
        && (u.is_empty() || (0..u.len()).any(|k| u[k..].iter().chain(&u[..k]).eq(v.iter())))
}

pub fn circuit_from_path(path: &ClosedPath) -> Result<Circuit> {
    let types = path.step_types();
    let len = types.len();
    let boundary = (0..len)
        .find(|&i| types[i] != types[(i + len - 1) % len])
        .ok_or_else(|| {
            Error::InternalInconsistency(format!(
                "closed path at {} uses a single step type",
                path.anchor()
            ))
        })?;
    let mut rotated = types.clone();
    rotated.rotate_left(boundary);
    let word = Word::from_steps(&rotated);
    Circuit::new(word.exponents(), rotated[0])
}

/// The word read off the closed path through `e`, starting at `e`. It fixes
/// `e`; its first and last blocks may share a type.
pub fn stabilizer_word(e: &Element) -> Result<Word> {
    let path = closed_path(e)?;
    Ok(Word::from_steps(&path.step_types()))
}

/// Everything needed to judge whether a word fixes an element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixVerdict {
    pub word: Word,
    pub element: Element,
    pub matrix: Mat2,
    #[serde(with = "triple_serde")]
    pub fixed_quadratic: (BigInt, BigInt, BigInt),
    pub proportional: bool,
    pub image: Element,
    pub fixes: bool,
}

pub fn check_word_fixes(word: &Word, e: &Element) -> Result<FixVerdict> {
    let matrix = word_to_matrix(word);
    let quadratic = fixed_quadratic(&matrix);
    let proportional = proportional(&quadratic, &minimal_quadratic(e));
    let image = mobius_apply(&matrix, e)?;
    let fixes = image == *e;
    if fixes != proportional {
        return Err(Error::InternalInconsistency(format!(
            "{word} on {e}: image test says {fixes}, fixed-point quadratic says {proportional}"
        )));
    }
    Ok(FixVerdict {
        word: word.clone(),
        element: e.clone(),
        matrix,
        fixed_quadratic: quadratic,
        proportional,
        image,
        fixes,
    })
}

mod triple_serde {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Int;

    pub fn serialize<S: Serializer>(
        v: &(BigInt, BigInt, BigInt),
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        [Int(v.0.clone()), Int(v.1.clone()), Int(v.2.clone())].serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<(BigInt, BigInt, BigInt), D::Error> {
        let [Int(a), Int(b), Int(c)] = <[Int; 3]>::deserialize(deserializer)?;
        Ok((a, b, c))
    }
}
