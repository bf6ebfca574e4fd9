//! Canonical text syntax for elements.
//!
//! * identity of any group: `e`
//! * `Z`: an integer, `Z^d`: `(3,-1)`
//! * free group: letter runs joined by `.`, e.g. `x2.y-1.x`
//! * cyclic group: its letter with an exponent, e.g. `a`, `b2`
//! * direct product: `(left,right)`
//! * free product: syllables joined by `.`, e.g. `a.b2.a`
//!
//! Letters are handed out in depth-first order over the group tree. Free
//! generators draw from `x y z w v u t s r q p o n`, cyclic factors (and
//! free abelian factors that sit inside a free product) from
//! `a b c d f g h i j k l m`; either pool borrows from the other when it runs
//! dry. Inside a free product, free abelian syllables are written with
//! letters (`a3.b-1`) so that every syllable names the factor it comes from.

use super::{Element, GroupSpec, Side, Syllable};
use crate::error::{Error, Result};

const FREE_POOL: &str = "xyzwvutsrqpon";
const OTHER_POOL: &str = "abcdfghijklm";

/// Letter assignment and printer/parser for one group spec.
#[derive(Debug, Clone)]
pub struct Notation {
    spec: GroupSpec,
    root: Node,
}

#[derive(Debug, Clone)]
enum Node {
    Lattice {
        letters: Option<Vec<char>>,
    },
    Free {
        letters: Vec<char>,
    },
    Cyclic {
        letter: char,
    },
    Pair(Box<Node>, Box<Node>),
    Product {
        left: Box<Node>,
        right: Box<Node>,
        left_letters: Vec<char>,
        right_letters: Vec<char>,
    },
}

struct Letters {
    free: Vec<char>,
    other: Vec<char>,
}

impl Letters {
    fn take(&mut self, free: bool) -> std::result::Result<char, String> {
        let (first, second) = if free {
            (&mut self.free, &mut self.other)
        } else {
            (&mut self.other, &mut self.free)
        };
        if !first.is_empty() {
            Ok(first.remove(0))
        } else if !second.is_empty() {
            Ok(second.remove(0))
        } else {
            Err("too many generators for the printable alphabet".to_string())
        }
    }
}

impl Node {
    fn build(spec: &GroupSpec, lettered: bool, pool: &mut Letters) -> std::result::Result<Node, String> {
        Ok(match spec {
            GroupSpec::FreeAbelian(rank) => Node::Lattice {
                letters: if lettered {
                    Some(
                        (0..*rank)
                            .map(|_| pool.take(false))
                            .collect::<std::result::Result<_, _>>()?,
                    )
                } else {
                    None
                },
            },
            GroupSpec::Free(rank) => Node::Free {
                letters: (0..*rank)
                    .map(|_| pool.take(true))
                    .collect::<std::result::Result<_, _>>()?,
            },
            GroupSpec::Cyclic(_) => Node::Cyclic {
                letter: pool.take(false)?,
            },
            GroupSpec::DirectProduct(l, r) => Node::Pair(
                Box::new(Node::build(l, lettered, pool)?),
                Box::new(Node::build(r, lettered, pool)?),
            ),
            GroupSpec::FreeProduct(l, r) => {
                let left = Node::build(l, true, pool)?;
                let right = Node::build(r, true, pool)?;
                let mut left_letters = Vec::new();
                left.collect_letters(&mut left_letters);
                let mut right_letters = Vec::new();
                right.collect_letters(&mut right_letters);
                Node::Product {
                    left: Box::new(left),
                    right: Box::new(right),
                    left_letters,
                    right_letters,
                }
            }
        })
    }

    fn collect_letters(&self, out: &mut Vec<char>) {
        match self {
            Node::Lattice { letters, .. } => out.extend(letters.iter().flatten()),
            Node::Free { letters } => out.extend(letters),
            Node::Cyclic { letter, .. } => out.push(*letter),
            Node::Pair(l, r) => {
                l.collect_letters(out);
                r.collect_letters(out);
            }
            Node::Product {
                left_letters,
                right_letters,
                ..
            } => {
                out.extend(left_letters);
                out.extend(right_letters);
            }
        }
    }
}

fn power_token(out: &mut String, letter: char, exponent: i64) {
    out.push(letter);
    if exponent != 1 {
        out.push_str(&exponent.to_string());
    }
}

impl Notation {
    pub fn new(spec: &GroupSpec) -> std::result::Result<Self, String> {
        let mut pool = Letters {
            free: FREE_POOL.chars().collect(),
            other: OTHER_POOL.chars().collect(),
        };
        Ok(Notation {
            spec: spec.clone(),
            root: Node::build(spec, false, &mut pool)?,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Canonical printed form of `a`, which must be canonical for the group.
    pub fn print(&self, a: &Element) -> String {
        let mut out = String::new();
        print_node(&self.root, a, &mut out);
        out
    }

    /// Parses (and normalizes) an element.
    pub fn parse(&self, text: &str) -> Result<Element> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        parse_node(&self.spec, &self.root, &compact).map_err(|message| Error::MalformedElement {
            text: text.to_string(),
            message,
        })
    }
}

fn print_node(node: &Node, a: &Element, out: &mut String) {
    if a.is_identity() {
        out.push('e');
        return;
    }
    match (node, a) {
        (Node::Lattice { letters: None, .. }, Element::Lattice(v)) => {
            if v.len() == 1 {
                out.push_str(&v[0].to_string());
            } else {
                out.push('(');
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&x.to_string());
                }
                out.push(')');
            }
        }
        (
            Node::Lattice {
                letters: Some(letters), ..
            },
            Element::Lattice(v),
        ) => {
            let mut first = true;
            for (letter, &x) in letters.iter().zip(v) {
                if x != 0 {
                    if !first {
                        out.push('.');
                    }
                    first = false;
                    power_token(out, *letter, x);
                }
            }
        }
        (Node::Free { letters }, Element::Word(w)) => {
            let mut i = 0;
            while i < w.len() {
                let mut j = i;
                while j < w.len() && w[j] == w[i] {
                    j += 1;
                }
                if i > 0 {
                    out.push('.');
                }
                let letter = letters[(w[i].unsigned_abs() - 1) as usize];
                let run = (j - i) as i64;
                power_token(out, letter, if w[i] > 0 { run } else { -run });
                i = j;
            }
        }
        (Node::Cyclic { letter, .. }, Element::Residue(k)) => power_token(out, *letter, *k as i64),
        (Node::Pair(l, r), Element::Pair(x, y)) => {
            out.push('(');
            print_node(l, x, out);
            out.push(',');
            print_node(r, y, out);
            out.push(')');
        }
        (Node::Product { left, right, .. }, Element::Syllables(s)) => {
            for (i, syl) in s.iter().enumerate() {
                if i > 0 {
                    out.push('.');
                }
                let factor = if syl.side == Side::Left { left } else { right };
                print_node(factor, &syl.value, out);
            }
        }
        _ => panic!("element does not match notation"),
    }
}

/// Splits on `sep` outside parentheses.
fn split_top(text: &str, sep: char) -> std::result::Result<Vec<&str>, String> {
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced parentheses".into());
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    parts.push(&text[start..]);
    Ok(parts)
}

/// Splits a lettered token `x-2` into its letter and exponent.
fn letter_token(token: &str) -> std::result::Result<(char, i64), String> {
    let mut chars = token.chars();
    let letter = chars.next().ok_or("empty token")?;
    if !letter.is_ascii_alphabetic() {
        return Err(format!("expected a letter in {token:?}"));
    }
    let rest = chars.as_str();
    let exponent = if rest.is_empty() {
        1
    } else {
        rest.parse::<i64>().map_err(|_| format!("bad exponent in {token:?}"))?
    };
    Ok((letter, exponent))
}

fn parse_node(spec: &GroupSpec, node: &Node, text: &str) -> std::result::Result<Element, String> {
    if text == "e" {
        return Ok(spec.identity());
    }
    if text.is_empty() {
        return Err("empty element".into());
    }
    match (spec, node) {
        (GroupSpec::FreeAbelian(rank), Node::Lattice { letters: None, .. }) => {
            let entries: Vec<&str> = match text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
                Some(inner) => inner.split(',').collect(),
                None => vec![text],
            };
            if entries.len() != *rank as usize {
                return Err(format!("expected {rank} coordinates"));
            }
            entries
                .iter()
                .map(|t| t.parse::<i64>().map_err(|_| format!("bad coordinate {t:?}")))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Element::Lattice)
        }
        (
            GroupSpec::FreeAbelian(rank),
            Node::Lattice {
                letters: Some(letters), ..
            },
        ) => {
            let mut v = vec![0i64; *rank as usize];
            for token in split_top(text, '.')? {
                let (letter, exponent) = letter_token(token)?;
                let i = letters
                    .iter()
                    .position(|&l| l == letter)
                    .ok_or_else(|| format!("unknown letter {letter:?}"))?;
                v[i] = v[i].checked_add(exponent).ok_or("exponent overflow")?;
            }
            Ok(Element::Lattice(v))
        }
        (GroupSpec::Free(_), Node::Free { letters }) => {
            let mut acc = spec.identity();
            for token in split_top(text, '.')? {
                let (letter, exponent) = letter_token(token)?;
                let i = letters
                    .iter()
                    .position(|&l| l == letter)
                    .ok_or_else(|| format!("unknown letter {letter:?}"))?;
                if exponent == 0 {
                    return Err(format!("zero exponent in {token:?}"));
                }
                let signed = if exponent > 0 { i as i32 + 1 } else { -(i as i32 + 1) };
                let run = Element::Word(vec![signed; exponent.unsigned_abs() as usize]);
                acc = spec.mul(&acc, &run);
            }
            Ok(acc)
        }
        (GroupSpec::Cyclic(order), Node::Cyclic { letter, .. }) => {
            let mut k: i128 = 0;
            for token in split_top(text, '.')? {
                let (l, exponent) = letter_token(token)?;
                if l != *letter {
                    return Err(format!("unknown letter {l:?}"));
                }
                k += exponent as i128;
            }
            Ok(Element::Residue(k.rem_euclid(*order as i128) as u64))
        }
        (GroupSpec::DirectProduct(ls, rs), Node::Pair(ln, rn)) => {
            let inner = text
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or("expected (left,right)")?;
            let parts = split_top(inner, ',')?;
            if parts.len() != 2 {
                return Err("expected exactly two components".into());
            }
            Ok(Element::Pair(
                Box::new(parse_node(ls, ln, parts[0])?),
                Box::new(parse_node(rs, rn, parts[1])?),
            ))
        }
        (
            GroupSpec::FreeProduct(ls, rs),
            Node::Product {
                left,
                right,
                left_letters,
                right_letters,
            },
        ) => {
            let tokens = split_top(text, '.')?;
            let mut groups: Vec<(Side, Vec<&str>)> = Vec::new();
            for token in tokens {
                let side = token
                    .chars()
                    .find_map(|c| {
                        if left_letters.contains(&c) {
                            Some(Side::Left)
                        } else if right_letters.contains(&c) {
                            Some(Side::Right)
                        } else {
                            None
                        }
                    })
                    .ok_or_else(|| format!("token {token:?} names no factor"))?;
                match groups.last_mut() {
                    Some((s, g)) if *s == side => g.push(token),
                    _ => groups.push((side, vec![token])),
                }
            }
            let mut acc = spec.identity();
            for (side, tokens) in groups {
                let joined = tokens.join(".");
                let (factor_spec, factor_node) = match side {
                    Side::Left => (ls.as_ref(), left.as_ref()),
                    Side::Right => (rs.as_ref(), right.as_ref()),
                };
                let value = parse_node(factor_spec, factor_node, &joined)?;
                if !value.is_identity() {
                    let syllable = Element::Syllables(vec![Syllable { side, value }]);
                    acc = spec.mul(&acc, &syllable);
                }
            }
            Ok(acc)
        }
        _ => unreachable!("notation mirrors its spec"),
    }
}
