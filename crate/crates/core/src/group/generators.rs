use std::collections::HashSet;

use super::{Element, GroupSpec, Notation, Side, Syllable};
use crate::error::{Error, Result};

/// A finite symmetric generating set containing the identity.
///
/// Elements are kept sorted by printed form so that everything built on top
/// of the set (breadth-first order, tie-breaks) is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    elements: Vec<Element>,
    power: u32,
}

impl GeneratorSet {
    /// Builds a set from arbitrary elements, adding the identity and inverses.
    pub fn new(spec: &GroupSpec, elements: impl IntoIterator<Item = Element>, power: u32) -> Result<Self> {
        let mut all = vec![spec.identity()];
        for el in elements {
            spec.check(&el)?;
            all.push(spec.inv(&el));
            all.push(el);
        }
        Self::from_closed(spec, all, power)
    }

    fn from_closed(spec: &GroupSpec, elements: Vec<Element>, power: u32) -> Result<Self> {
        let notation = Notation::new(spec).map_err(Error::Precondition)?;
        let mut seen = HashSet::new();
        let mut keyed: Vec<(String, Element)> = elements
            .into_iter()
            .filter(|e| seen.insert(e.clone()))
            .map(|e| (notation.print(&e), e))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(GeneratorSet {
            elements: keyed.into_iter().map(|(_, e)| e).collect(),
            power: power.max(1),
        })
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

    /// Exponent `t` such that this set is `K₀^t` for the standard set `K₀`
    /// (1 for sets given explicitly).
    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn contains(&self, a: &Element) -> bool {
        self.elements.contains(a)
    }

    /// Non-identity elements, in set order.
    pub fn steps(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(|e| !e.is_identity())
    }
}

fn basis(spec: &GroupSpec) -> Vec<Element> {
    match spec {
        GroupSpec::FreeAbelian(rank) => (0..*rank as usize)
            .map(|i| {
                let mut v = vec![0; *rank as usize];
                v[i] = 1;
                Element::Lattice(v)
            })
            .collect(),
        GroupSpec::Free(rank) => (1..=*rank as i32).map(|l| Element::Word(vec![l])).collect(),
        GroupSpec::Cyclic(order) if *order > 1 => vec![Element::Residue(1)],
        GroupSpec::Cyclic(_) => Vec::new(),
        GroupSpec::DirectProduct(l, r) => {
            let mut out: Vec<Element> = basis(l)
                .into_iter()
                .map(|g| Element::Pair(Box::new(g), Box::new(r.identity())))
                .collect();
            out.extend(
                basis(r)
                    .into_iter()
                    .map(|g| Element::Pair(Box::new(l.identity()), Box::new(g))),
            );
            out
        }
        GroupSpec::FreeProduct(l, r) => {
            let syllable = |side, g: Element| Element::Syllables(vec![Syllable { side, value: g }]);
            let mut out: Vec<Element> = basis(l).into_iter().map(|g| syllable(Side::Left, g)).collect();
            out.extend(basis(r).into_iter().map(|g| syllable(Side::Right, g)));
            out
        }
    }
}

/// The standard generating set `K₀`: basis letters, their inverses and the
/// identity, embedded through products.
pub fn standard_generators(spec: &GroupSpec) -> GeneratorSet {
    GeneratorSet::new(spec, basis(spec), 1).expect("basis elements belong to their group")
}

/// `K^t`: all products of at most `t` elements of `K`.
pub fn power_generators(spec: &GroupSpec, k: &GeneratorSet, t: u32) -> Result<GeneratorSet> {
    if t == 0 {
        return Err(Error::Precondition("generator power must be at least 1".into()));
    }
    let mut current: HashSet<Element> = k.elements().iter().cloned().collect();
    let mut frontier: Vec<Element> = current.iter().cloned().collect();
    for _ in 1..t {
        let mut next = Vec::new();
        for a in &frontier {
            for b in k.elements() {
                let p = spec.mul(a, b);
                if current.insert(p.clone()) {
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    GeneratorSet::from_closed(spec, current.into_iter().collect(), k.power() * t)
}
