/// Normal form of a group element.
///
/// The variant always matches the [`GroupSpec`](super::GroupSpec) node it
/// belongs to. Normal forms are unique, so the derived `Eq`/`Hash` decide
/// equality in the group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    /// Exponent vector in a free abelian group.
    Lattice(Vec<i64>),
    /// Freely reduced word; letter `i + 1` is the `i`-th generator and
    /// `-(i + 1)` its inverse.
    Word(Vec<i32>),
    /// Residue in `[0, order)`.
    Residue(u64),
    /// Componentwise element of a direct product.
    Pair(Box<Element>, Box<Element>),
    /// Alternating non-identity syllables of a free product.
    Syllables(Vec<Syllable>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub side: Side,
    pub value: Element,
}

impl Syllable {
    pub fn left(value: Element) -> Self {
        Syllable {
            side: Side::Left,
            value,
        }
    }

    pub fn right(value: Element) -> Self {
        Syllable {
            side: Side::Right,
            value,
        }
    }
}

impl Element {
    pub fn is_identity(&self) -> bool {
        match self {
            Element::Lattice(v) => v.iter().all(|&x| x == 0),
            Element::Word(w) => w.is_empty(),
            Element::Residue(k) => *k == 0,
            Element::Pair(a, b) => a.is_identity() && b.is_identity(),
            Element::Syllables(s) => s.is_empty(),
        }
    }
}
