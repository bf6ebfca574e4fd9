//! Supported group families, their normal forms and exact arithmetic.
//!
//! A [`GroupSpec`] is a finite tree built from free abelian groups, free
//! groups and cyclic groups with direct and free products. Every element has
//! a unique normal form ([`Element`]), so equality of elements is structural
//! equality.

mod element;
mod generators;
mod notation;

use std::fmt;
use std::str::FromStr;

pub use element::{Element, Side, Syllable};
pub use generators::{power_generators, standard_generators, GeneratorSet};
pub use notation::Notation;

use crate::error::{Error, Result};

/// Structural description of a group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    /// `Z^rank`.
    FreeAbelian(u32),
    /// Free group on `rank` letters.
    Free(u32),
    /// Cyclic group of the given order; `Cyclic(1)` is trivial.
    Cyclic(u64),
    DirectProduct(Box<GroupSpec>, Box<GroupSpec>),
    FreeProduct(Box<GroupSpec>, Box<GroupSpec>),
}

impl GroupSpec {
    pub fn direct(left: GroupSpec, right: GroupSpec) -> Self {
        GroupSpec::DirectProduct(Box::new(left), Box::new(right))
    }

    pub fn free_product(left: GroupSpec, right: GroupSpec) -> Self {
        GroupSpec::FreeProduct(Box::new(left), Box::new(right))
    }

    pub fn identity(&self) -> Element {
        match self {
            GroupSpec::FreeAbelian(rank) => Element::Lattice(vec![0; *rank as usize]),
            GroupSpec::Free(_) => Element::Word(Vec::new()),
            GroupSpec::Cyclic(_) => Element::Residue(0),
            GroupSpec::DirectProduct(l, r) => Element::Pair(Box::new(l.identity()), Box::new(r.identity())),
            GroupSpec::FreeProduct(..) => Element::Syllables(Vec::new()),
        }
    }

    /// Whether `a` is a canonical element of this group.
    pub fn contains(&self, a: &Element) -> bool {
        match (self, a) {
            (GroupSpec::FreeAbelian(rank), Element::Lattice(v)) => v.len() == *rank as usize,
            (GroupSpec::Free(rank), Element::Word(w)) => {
                let r = *rank as i32;
                w.iter().all(|&l| l != 0 && l.abs() <= r) && w.windows(2).all(|p| p[0] != -p[1])
            }
            (GroupSpec::Cyclic(order), Element::Residue(k)) => k < order,
            (GroupSpec::DirectProduct(l, r), Element::Pair(a, b)) => l.contains(a) && r.contains(b),
            (GroupSpec::FreeProduct(l, r), Element::Syllables(s)) => {
                s.windows(2).all(|p| p[0].side != p[1].side)
                    && s.iter().all(|syl| {
                        let factor = match syl.side {
                            Side::Left => l,
                            Side::Right => r,
                        };
                        factor.contains(&syl.value) && !factor.is_identity(&syl.value)
                    })
            }
            _ => false,
        }
    }

    pub fn is_identity(&self, a: &Element) -> bool {
        a.is_identity()
    }

    /// Product `a·b` in normal form.
    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn invert(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(self.inv(a))
    }

    pub(crate) fn check(&self, a: &Element) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::Mismatch { spec: self.to_string() })
        }
    }

    /// Unchecked multiplication; both arguments must be canonical for `self`.
    pub(crate) fn mul(&self, a: &Element, b: &Element) -> Element {
        match (self, a, b) {
            (GroupSpec::FreeAbelian(_), Element::Lattice(x), Element::Lattice(y)) => {
                Element::Lattice(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupSpec::Free(_), Element::Word(x), Element::Word(y)) => {
                let mut out = x.clone();
                for &letter in y {
                    if out.last() == Some(&-letter) {
                        out.pop();
                    } else {
                        out.push(letter);
                    }
                }
                Element::Word(out)
            }
            (GroupSpec::Cyclic(order), Element::Residue(x), Element::Residue(y)) => {
                Element::Residue(((*x as u128 + *y as u128) % *order as u128) as u64)
            }
            (GroupSpec::DirectProduct(l, r), Element::Pair(a1, a2), Element::Pair(b1, b2)) => {
                Element::Pair(Box::new(l.mul(a1, b1)), Box::new(r.mul(a2, b2)))
            }
            (GroupSpec::FreeProduct(l, r), Element::Syllables(x), Element::Syllables(y)) => {
                let mut out = x.clone();
                let mut i = 0;
                // Merge across the junction until the sides differ.
                while i < y.len() {
                    let syl = &y[i];
                    match out.last_mut() {
                        Some(last) if last.side == syl.side => {
                            let factor = if syl.side == Side::Left { l } else { r };
                            let merged = factor.mul(&last.value, &syl.value);
                            i += 1;
                            if merged.is_identity() {
                                out.pop();
                            } else {
                                last.value = merged;
                                break;
                            }
                        }
                        _ => break,
                    }
                }
                out.extend_from_slice(&y[i..]);
                Element::Syllables(out)
            }
            _ => panic!("element does not match group {self}"),
        }
    }

    pub(crate) fn inv(&self, a: &Element) -> Element {
        match (self, a) {
            (GroupSpec::FreeAbelian(_), Element::Lattice(x)) => Element::Lattice(x.iter().map(|v| -v).collect()),
            (GroupSpec::Free(_), Element::Word(x)) => Element::Word(x.iter().rev().map(|l| -l).collect()),
            (GroupSpec::Cyclic(order), Element::Residue(x)) => Element::Residue(if *x == 0 { 0 } else { order - x }),
            (GroupSpec::DirectProduct(l, r), Element::Pair(a1, a2)) => {
                Element::Pair(Box::new(l.inv(a1)), Box::new(r.inv(a2)))
            }
            (GroupSpec::FreeProduct(l, r), Element::Syllables(x)) => Element::Syllables(
                x.iter()
                    .rev()
                    .map(|syl| Syllable {
                        side: syl.side,
                        value: match syl.side {
                            Side::Left => l.inv(&syl.value),
                            Side::Right => r.inv(&syl.value),
                        },
                    })
                    .collect(),
            ),
            _ => panic!("element does not match group {self}"),
        }
    }

    /// Whether the group is finite.
    pub fn is_finite(&self) -> bool {
        match self {
            GroupSpec::Cyclic(_) => true,
            GroupSpec::FreeAbelian(_) | GroupSpec::Free(_) => false,
            GroupSpec::DirectProduct(l, r) => l.is_finite() && r.is_finite(),
            GroupSpec::FreeProduct(l, r) => (l.is_trivial() && r.is_finite()) || (r.is_trivial() && l.is_finite()),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            GroupSpec::Cyclic(n) => *n == 1,
            GroupSpec::FreeAbelian(_) | GroupSpec::Free(_) => false,
            GroupSpec::DirectProduct(l, r) | GroupSpec::FreeProduct(l, r) => l.is_trivial() && r.is_trivial(),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::FreeAbelian(1) => write!(f, "Z"),
            GroupSpec::FreeAbelian(rank) => write!(f, "Z^{rank}"),
            GroupSpec::Free(rank) => write!(f, "F{rank}"),
            GroupSpec::Cyclic(order) => write!(f, "C{order}"),
            GroupSpec::DirectProduct(l, r) => write!(f, "({l} x {r})"),
            GroupSpec::FreeProduct(l, r) => write!(f, "({l} * {r})"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_spec(s)
    }
}

/// Parses the group grammar
/// `G ::= "Z" | "Z^"nat | "F"nat | "C"nat | "(" G "x" G ")" | "(" G "*" G ")"`,
/// ignoring whitespace.
pub fn parse_spec(text: &str) -> Result<GroupSpec> {
    let mut parser = SpecParser { text, pos: 0 };
    let spec = parser.group()?;
    parser.skip_ws();
    if parser.pos != text.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    // Every spec must be printable.
    Notation::new(&spec).map_err(|message| Error::Syntax { offset: 0, message })?;
    Ok(spec)
}

struct SpecParser<'a> {
    text: &'a str,
    pos: usize,
}

impl SpecParser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn nat(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a natural number"));
        }
        let value: u64 = self.text[start..self.pos].parse().map_err(|_| Error::Syntax {
            offset: start,
            message: "number too large".into(),
        })?;
        if value == 0 {
            return Err(Error::Syntax {
                offset: start,
                message: "rank and order must be at least 1".into(),
            });
        }
        Ok(value)
    }

    fn group(&mut self) -> Result<GroupSpec> {
        self.skip_ws();
        let start = self.pos;
        match self.bump() {
            Some('Z') => {
                self.skip_ws();
                if self.peek() == Some('^') {
                    self.bump();
                    let rank = self.nat()?;
                    let rank = u32::try_from(rank).map_err(|_| Error::Syntax {
                        offset: start,
                        message: "rank too large".into(),
                    })?;
                    Ok(GroupSpec::FreeAbelian(rank))
                } else {
                    Ok(GroupSpec::FreeAbelian(1))
                }
            }
            Some('F') => {
                let rank = self.nat()?;
                let rank = u32::try_from(rank).map_err(|_| Error::Syntax {
                    offset: start,
                    message: "rank too large".into(),
                })?;
                Ok(GroupSpec::Free(rank))
            }
            Some('C') => Ok(GroupSpec::Cyclic(self.nat()?)),
            Some('(') => {
                let left = self.group()?;
                self.skip_ws();
                let op = self.pos;
                let product = match self.bump() {
                    Some('x') => GroupSpec::direct as fn(GroupSpec, GroupSpec) -> GroupSpec,
                    Some('*') => GroupSpec::free_product,
                    _ => {
                        self.pos = op;
                        return Err(self.error("expected 'x' or '*'"));
                    }
                };
                let right = self.group()?;
                self.skip_ws();
                if self.bump() != Some(')') {
                    return Err(Error::Syntax {
                        offset: self.pos.saturating_sub(1),
                        message: "expected ')'".into(),
                    });
                }
                Ok(product(left, right))
            }
            _ => {
                self.pos = start;
                Err(self.error("expected Z, F, C or '('"))
            }
        }
    }
}
