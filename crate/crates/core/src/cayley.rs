//! Finite balls of a Cayley graph.
//!
//! A [`Window`] holds the ball `B(R)` around the identity for a generating
//! set `K`, together with the `K`-norm of every element. Distances between
//! arbitrary elements reduce to norms through left invariance,
//! `d(g, h) = |g⁻¹·h|`.

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::ops::Range;
use std::sync::Arc;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::group::{Element, GeneratorSet, GroupSpec, Notation};

pub const DEFAULT_ELEMENT_CAP: usize = 5_000_000;

/// Version tag of the text window format.
pub const WINDOW_FORMAT_VERSION: u32 = 1;

const NONE: u32 = u32::MAX;

/// The ball of radius `radius` in the Cayley graph of `(spec, generators)`.
///
/// Element ids are assigned in breadth-first order, so ids are sorted by norm
/// and the identity has id 0.
#[derive(Debug)]
pub struct Window {
    spec: GroupSpec,
    notation: Notation,
    generators: GeneratorSet,
    radius: u32,
    elements: IndexSet<Element>,
    names: Vec<String>,
    norms: Vec<u32>,
    sphere_starts: Vec<usize>,
    steps: Vec<Element>,
    adjacency: Vec<u32>,
    parent: Vec<u32>,
    exhausted: bool,
}

/// A geodesic `K`-chain from the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geodesic {
    pub chain: Vec<Element>,
}

impl Geodesic {
    pub fn terminal(&self) -> &Element {
        self.chain.last().expect("a chain starts at the identity")
    }

    pub fn len(&self) -> usize {
        self.chain.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Window {
    pub fn build(spec: &GroupSpec, generators: &GeneratorSet, radius: u32) -> Result<Self> {
        Self::build_with_cap(spec, generators, radius, DEFAULT_ELEMENT_CAP)
    }

    pub fn build_with_cap(spec: &GroupSpec, generators: &GeneratorSet, radius: u32, cap: usize) -> Result<Self> {
        for g in generators.elements() {
            spec.check(g)?;
        }
        let steps: Vec<Element> = generators.steps().cloned().collect();
        let mut elements = IndexSet::new();
        let mut norms = vec![0u32];
        elements.insert(spec.identity());
        let mut start = 0;
        for r in 0..radius {
            let end = elements.len();
            if start == end {
                break;
            }
            for id in start..end {
                for k in &steps {
                    let p = spec.mul(&elements[id], k);
                    if elements.insert(p) {
                        norms.push(r + 1);
                    }
                }
                if elements.len() > cap {
                    return Err(Error::ResourceCap {
                        cap,
                        radius,
                        reached: r,
                    });
                }
            }
            start = end;
        }
        Self::assemble(spec, generators, radius, elements, norms)
    }

    /// Completes a window from elements listed in breadth-first order.
    fn assemble(
        spec: &GroupSpec,
        generators: &GeneratorSet,
        radius: u32,
        elements: IndexSet<Element>,
        norms: Vec<u32>,
    ) -> Result<Self> {
        let notation = Notation::new(spec).map_err(Error::Precondition)?;
        let steps: Vec<Element> = generators.steps().cloned().collect();
        if steps.iter().any(|k| !steps.contains(&spec.inv(k))) {
            return Err(Error::Precondition("generating set is not symmetric".into()));
        }

        let n = elements.len();
        let mut sphere_starts = vec![0usize; radius as usize + 2];
        for (r, slot) in sphere_starts.iter_mut().enumerate() {
            *slot = norms.partition_point(|&x| (x as usize) < r);
        }
        let names: Vec<String> = elements.iter().map(|e| notation.print(e)).collect();

        let mut adjacency = vec![NONE; n * steps.len()];
        let mut exhausted = true;
        for (id, g) in elements.iter().enumerate() {
            for (j, k) in steps.iter().enumerate() {
                match elements.get_index_of(&spec.mul(g, k)) {
                    Some(h) => adjacency[id * steps.len() + j] = h as u32,
                    None => exhausted = false,
                }
            }
        }

        let mut parent = vec![NONE; n];
        for id in 1..n {
            let mut best: Option<u32> = None;
            for j in 0..steps.len() {
                let h = adjacency[id * steps.len() + j];
                if h != NONE && norms[h as usize] + 1 == norms[id] {
                    let better = match best {
                        None => true,
                        Some(b) => names[h as usize] < names[b as usize],
                    };
                    if better {
                        best = Some(h);
                    }
                }
            }
            parent[id] =
                best.ok_or_else(|| Error::Cache(format!("element {} has no geodesic predecessor", names[id])))?;
        }

        Ok(Window {
            spec: spec.clone(),
            notation,
            generators: generators.clone(),
            radius,
            elements,
            names,
            norms,
            sphere_starts,
            steps,
            adjacency,
            parent,
            exhausted,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn notation(&self) -> &Notation {
        &self.notation
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True when the ball already contains the whole (finite) group.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn id(&self, g: &Element) -> Option<u32> {
        self.elements.get_index_of(g).map(|i| i as u32)
    }

    pub fn element(&self, id: u32) -> &Element {
        &self.elements[id as usize]
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn norm(&self, id: u32) -> u32 {
        self.norms[id as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = (u32, &Element)> {
        self.elements.iter().enumerate().map(|(i, e)| (i as u32, e))
    }

    /// Non-identity generators, in generating-set order.
    pub fn steps(&self) -> &[Element] {
        &self.steps
    }

    /// The id of `g·k_j` if it lies in the window.
    pub fn neighbor(&self, id: u32, step: usize) -> Option<u32> {
        let h = self.adjacency[id as usize * self.steps.len() + step];
        (h != NONE).then_some(h)
    }

    pub fn neighbors(&self, id: u32) -> impl Iterator<Item = u32> + '_ {
        let n = self.steps.len();
        self.adjacency[id as usize * n..(id as usize + 1) * n]
            .iter()
            .copied()
            .filter(|&h| h != NONE)
    }

    /// Canonical geodesic predecessor (lexicographically least).
    pub fn parent(&self, id: u32) -> Option<u32> {
        (id != 0).then(|| self.parent[id as usize])
    }

    pub fn knorm(&self, g: &Element) -> Result<u32> {
        self.id(g)
            .map(|id| self.norm(id))
            .ok_or_else(|| Error::OutOfWindow(self.describe(g)))
    }

    pub fn distance(&self, g: &Element, h: &Element) -> Result<u32> {
        self.spec.check(g)?;
        self.spec.check(h)?;
        self.knorm(&self.spec.mul(&self.spec.inv(g), h))
    }

    /// `d(g, h)` for window ids, `None` when it exceeds the window radius.
    pub fn distance_ids(&self, g: u32, h: u32) -> Option<u32> {
        if g == h {
            return Some(0);
        }
        let ratio = self.spec.mul(&self.spec.inv(self.element(g)), self.element(h));
        self.id(&ratio).map(|i| self.norm(i))
    }

    pub fn geodesic(&self, g: &Element) -> Result<Geodesic> {
        let id = self.id(g).ok_or_else(|| Error::OutOfWindow(self.describe(g)))?;
        Ok(Geodesic {
            chain: self
                .geodesic_ids(id)
                .into_iter()
                .map(|i| self.element(i).clone())
                .collect(),
        })
    }

    /// Ids along the canonical geodesic from the identity to `id`.
    pub fn geodesic_ids(&self, id: u32) -> Vec<u32> {
        let mut chain = vec![id];
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        chain
    }

    /// Term of index `depth` on the canonical geodesic to `id`.
    pub fn ancestor(&self, id: u32, depth: u32) -> u32 {
        let mut cur = id;
        while self.norm(cur) > depth {
            cur = self.parent[cur as usize];
        }
        cur
    }

    /// Generator indices spelling the canonical geodesic to `id`.
    pub fn word(&self, id: u32) -> Vec<usize> {
        let chain = self.geodesic_ids(id);
        chain
            .windows(2)
            .map(|pair| {
                (0..self.steps.len())
                    .find(|&j| self.neighbor(pair[0], j) == Some(pair[1]))
                    .expect("consecutive geodesic terms are adjacent")
            })
            .collect()
    }

    /// `g·c` where `word` spells `c`; walks the adjacency table and falls
    /// back to exact multiplication when the walk leaves the window.
    pub fn translate(&self, id: u32, word: &[usize], c: &Element) -> Option<u32> {
        let mut cur = id;
        for &j in word {
            match self.neighbor(cur, j) {
                Some(h) => cur = h,
                None => return self.id(&self.spec.mul(self.element(id), c)),
            }
        }
        Some(cur)
    }

    /// Ids of `center·B(r)` that fall inside the window.
    pub fn ball_ids(&self, center: u32, r: u32) -> Vec<u32> {
        let end = self.ball_end(r.min(self.radius));
        (0..end as u32)
            .filter_map(|b| self.translate(center, &self.word(b), self.element(b)))
            .collect()
    }

    /// Ids of the sphere of radius `r`.
    pub fn sphere_ids(&self, r: u32) -> Result<Range<u32>> {
        if r > self.radius {
            return Err(Error::RadiusOutOfRange {
                radius: r,
                window: self.radius,
            });
        }
        let r = r as usize;
        Ok(self.sphere_starts[r] as u32..self.sphere_starts[r + 1] as u32)
    }

    /// Number of elements of norm at most `r`.
    pub fn ball_end(&self, r: u32) -> usize {
        self.sphere_starts[(r.min(self.radius) + 1) as usize]
    }

    pub fn sphere(&self, r: u32) -> Result<Vec<Element>> {
        Ok(self.sphere_ids(r)?.map(|i| self.element(i).clone()).collect())
    }

    /// Elements with `r1 < norm <= r2`.
    pub fn annulus(&self, r1: u32, r2: u32) -> Result<Vec<Element>> {
        if r2 > self.radius || r1 >= r2 {
            return Err(Error::RadiusOutOfRange {
                radius: r2,
                window: self.radius,
            });
        }
        let start = self.sphere_starts[r1 as usize + 1];
        let end = self.sphere_starts[r2 as usize + 1];
        Ok((start..end).map(|i| self.elements[i].clone()).collect())
    }

    pub fn describe(&self, g: &Element) -> String {
        if self.spec.contains(g) {
            self.notation.print(g)
        } else {
            format!("{g:?}")
        }
    }

    /// Writes the norm table in the versioned text format.
    pub fn write_text(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "coarse-ends-window {WINDOW_FORMAT_VERSION}")?;
        writeln!(out, "spec {}", self.spec)?;
        writeln!(out, "power {}", self.generators.power())?;
        let gens: Vec<String> = self
            .generators
            .elements()
            .iter()
            .map(|g| self.notation.print(g))
            .collect();
        writeln!(out, "generators {}", gens.join(" "))?;
        writeln!(out, "radius {}", self.radius)?;
        writeln!(out, "count {}", self.len())?;
        for (name, norm) in self.names.iter().zip(&self.norms) {
            writeln!(out, "{name}\t{norm}")?;
        }
        Ok(())
    }

    /// Reads a window written by [`Window::write_text`], checking that it was
    /// produced for the same spec, generators and radius.
    pub fn read_text(input: impl BufRead, spec: &GroupSpec, generators: &GeneratorSet, radius: u32) -> Result<Self> {
        let notation = Notation::new(spec).map_err(Error::Precondition)?;
        let mut lines = input.lines();
        let mut header = |key: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Cache("truncated header".into()))?
                .map_err(|e| Error::Cache(e.to_string()))?;
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| Error::Cache(format!("expected {key} line")))
        };
        let version = header("coarse-ends-window")?;
        if version != WINDOW_FORMAT_VERSION.to_string() {
            return Err(Error::Cache(format!("unsupported format version {version}")));
        }
        if header("spec")? != spec.to_string() {
            return Err(Error::Cache("spec mismatch".into()));
        }
        if header("power")? != generators.power().to_string() {
            return Err(Error::Cache("generator power mismatch".into()));
        }
        let gens: Vec<String> = generators.elements().iter().map(|g| notation.print(g)).collect();
        if header("generators")? != gens.join(" ") {
            return Err(Error::Cache("generator mismatch".into()));
        }
        if header("radius")? != radius.to_string() {
            return Err(Error::Cache("radius mismatch".into()));
        }
        let count: usize = header("count")?.parse().map_err(|_| Error::Cache("bad count".into()))?;

        let mut elements = IndexSet::with_capacity(count);
        let mut norms = Vec::with_capacity(count);
        for line in lines {
            let line = line.map_err(|e| Error::Cache(e.to_string()))?;
            let (name, norm) = line.split_once('\t').ok_or_else(|| Error::Cache("bad entry".into()))?;
            let norm: u32 = norm.parse().map_err(|_| Error::Cache("bad norm".into()))?;
            let el = notation.parse(name).map_err(|e| Error::Cache(e.to_string()))?;
            if norms.last().is_some_and(|&last| norm < last) || norm > radius {
                return Err(Error::Cache("entries out of order".into()));
            }
            if !elements.insert(el) {
                return Err(Error::Cache("duplicate entry".into()));
            }
            norms.push(norm);
        }
        if elements.len() != count || norms.first() != Some(&0) {
            return Err(Error::Cache("entry count mismatch".into()));
        }
        let window = Self::assemble(spec, generators, radius, elements, norms)?;
        window.check_bfs()?;
        Ok(window)
    }

    /// Neighbouring norms differ by at most one and every nonzero norm has a
    /// predecessor; with the identity at norm 0 this pins the norm map.
    fn check_bfs(&self) -> Result<()> {
        if !self.element(0).is_identity() {
            return Err(Error::Cache("identity is not first".into()));
        }
        for id in 0..self.len() as u32 {
            let n = self.norm(id);
            for h in self.neighbors(id) {
                if self.norm(h).abs_diff(n) > 1 {
                    return Err(Error::Cache(format!("inconsistent norm at {}", self.name(id))));
                }
            }
            if n < self.radius && self.neighbors(id).count() < self.steps.len() {
                return Err(Error::Cache(format!("missing neighbour of {}", self.name(id))));
            }
        }
        Ok(())
    }
}

/// Source of windows; lets callers plug in caching.
pub trait WindowProvider: Sync {
    fn window(&self, spec: &GroupSpec, generators: &GeneratorSet, radius: u32) -> Result<Arc<Window>>;
}

/// Builds every window from scratch.
#[derive(Debug, Clone, Copy)]
pub struct FreshWindows {
    pub cap: usize,
}

impl Default for FreshWindows {
    fn default() -> Self {
        FreshWindows {
            cap: DEFAULT_ELEMENT_CAP,
        }
    }
}

impl WindowProvider for FreshWindows {
    fn window(&self, spec: &GroupSpec, generators: &GeneratorSet, radius: u32) -> Result<Arc<Window>> {
        Window::build_with_cap(spec, generators, radius, self.cap).map(Arc::new)
    }
}

/// Convenience wrapper matching the build signature used throughout.
pub fn build_window(spec: &GroupSpec, generators: &GeneratorSet, radius: u32) -> Result<Window> {
    Window::build(spec, generators, radius)
}

/// Element ids of a window collected into a hash set; test helper shared with
/// integration tests.
pub fn element_set(window: &Window, ids: impl IntoIterator<Item = u32>) -> HashSet<Element> {
    ids.into_iter().map(|i| window.element(i).clone()).collect()
}
