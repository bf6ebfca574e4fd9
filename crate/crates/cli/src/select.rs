//! Set selectors accepted by `clopen`.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use coarse_ends::{components, Element, Error, ExplicitSet, Region, Result, SetSelector, Window};

/// `component:r=N:index=I`: one component of `window \ B(r)`, extended
/// through the window edge.
#[derive(Debug, Clone, Copy)]
pub struct ComponentSelector {
    pub r: u32,
    pub index: usize,
}

impl SetSelector for ComponentSelector {
    fn resolve(&self, window: &Window) -> Result<Region> {
        let d = components(window, self.r, window.generators())?;
        if self.index >= d.components.len() {
            return Err(Error::Precondition(format!(
                "component {} requested, radius {} has {}",
                self.index,
                self.r,
                d.components.len()
            )));
        }
        d.region(window, &[self.index])
    }
}

/// `half:axis=I:min=M`: elements whose `I`-th integer coordinate is at
/// least `M`. Integer coordinates are the lattice entries read left to right.
#[derive(Debug, Clone, Copy)]
pub struct HalfSpace {
    pub axis: usize,
    pub min: i64,
}

fn coordinates(g: &Element, out: &mut Vec<i64>) {
    match g {
        Element::Lattice(v) => out.extend_from_slice(v),
        Element::Pair(a, b) => {
            coordinates(a, out);
            coordinates(b, out);
        }
        _ => {}
    }
}

impl SetSelector for HalfSpace {
    fn resolve(&self, window: &Window) -> Result<Region> {
        let mut coords = Vec::new();
        coordinates(window.element(0), &mut coords);
        if self.axis >= coords.len() {
            return Err(Error::Precondition(format!(
                "axis {} requested, {} has {} integer coordinates",
                self.axis,
                window.spec(),
                coords.len()
            )));
        }
        Ok(Region::from_predicate(window, |_, g| {
            coords.clear();
            coordinates(g, &mut coords);
            coords[self.axis] >= self.min
        }))
    }
}

pub enum Selector {
    Component(ComponentSelector),
    Half(HalfSpace),
    Prefix(Element),
    Listed(ExplicitSet),
}

impl SetSelector for Selector {
    fn resolve(&self, window: &Window) -> Result<Region> {
        match self {
            Selector::Component(c) => c.resolve(window),
            Selector::Half(h) => h.resolve(window),
            Selector::Prefix(p) => prefix_region(window, p),
            Selector::Listed(l) => l.resolve(window),
        }
    }
}

/// Elements whose normal form begins with the normal form of `p`: the
/// subtree below `p` for free groups and free products.
fn prefix_region(window: &Window, p: &Element) -> Result<Region> {
    match p {
        Element::Word(head) => Ok(Region::from_predicate(
            window,
            |_, g| matches!(g, Element::Word(w) if w.starts_with(head)),
        )),
        Element::Syllables(head) => Ok(Region::from_predicate(
            window,
            |_, g| matches!(g, Element::Syllables(s) if s.starts_with(head)),
        )),
        _ => Err(Error::Precondition(
            "prefix selectors need a free group or a free product".into(),
        )),
    }
}

fn field<'a>(part: Option<&'a str>, key: &str, text: &str) -> Result<&'a str> {
    part.and_then(|p| p.strip_prefix(key))
        .and_then(|p| p.strip_prefix('='))
        .ok_or_else(|| Error::Syntax {
            offset: 0,
            message: format!("expected {key}=... in selector {text:?}"),
        })
}

fn number<T: std::str::FromStr>(value: &str, text: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Syntax {
        offset: 0,
        message: format!("bad number {value:?} in selector {text:?}"),
    })
}

pub fn parse_selector(text: &str, window: &Window) -> Result<Selector> {
    if let Some(rest) = text.strip_prefix("prefix:") {
        let el = window.notation().parse(rest)?;
        return Ok(Selector::Prefix(el));
    }
    let mut parts = text.split(':');
    match parts.next() {
        Some("component") => {
            let r = number(field(parts.next(), "r", text)?, text)?;
            let index = number(field(parts.next(), "index", text)?, text)?;
            Ok(Selector::Component(ComponentSelector { r, index }))
        }
        Some("half") => {
            let axis = number(field(parts.next(), "axis", text)?, text)?;
            let min = number(field(parts.next(), "min", text)?, text)?;
            Ok(Selector::Half(HalfSpace { axis, min }))
        }
        _ => Err(Error::Syntax {
            offset: 0,
            message: format!("unknown selector {text:?}; use component:, half: or prefix:"),
        }),
    }
}

/// One printed element per line; blank lines and `#` comments are skipped.
/// Every element must lie in `window`.
pub fn read_elements(path: &Path, window: &Window) -> Result<Selector> {
    let text = fs::read_to_string(path).map_err(|e| Error::MalformedElement {
        text: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut set = HashSet::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let el = window.notation().parse(line)?;
        if window.id(&el).is_none() {
            return Err(Error::OutOfWindow(line.to_string()));
        }
        set.insert(el);
    }
    Ok(Selector::Listed(ExplicitSet(set)))
}
