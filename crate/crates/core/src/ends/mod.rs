//! Components of ball complements, the end-approximation tree and end-count
//! verdicts.
//!
//! The complement of `B(r)` is taken over the shell `r <= |g| <= R - 1` of a
//! window of radius `R`: the open ball of radius `r` is removed and the
//! sphere of radius `R` is the window edge. A component is *outer* when it
//! reaches norm `R - 1`; outer components stand in for the unbounded
//! components of the infinite graph.

mod tree;

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

pub use tree::{component_tree, component_tree_with, EndTree, TreeLevel, TreeNode};

use crate::asdim::greedy_cover;
use crate::cayley::{FreshWindows, Window, WindowProvider};
use crate::covers::{interface, InterfaceReport, ScaleSet};
use crate::error::{Error, Result};
use crate::group::{power_generators, Element, GeneratorSet, GroupSpec};
use crate::region::Region;

const UNLABELED: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Member ids in increasing order.
    pub members: Vec<u32>,
    pub outer: bool,
    pub max_norm: u32,
    /// Lexicographically least printed member; components are ordered by it.
    pub least: String,
}

impl Component {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone)]
pub struct ComponentDecomposition {
    pub base_radius: u32,
    pub window_radius: u32,
    pub components: Vec<Component>,
    labels: Vec<u32>,
}

impl ComponentDecomposition {
    pub fn outer_count(&self) -> usize {
        self.components.iter().filter(|c| c.outer).count()
    }

    pub fn inner_count(&self) -> usize {
        self.components.len() - self.outer_count()
    }

    /// Index of the component containing `id`, `None` inside the removed set.
    pub fn label(&self, id: u32) -> Option<usize> {
        let l = self.labels[id as usize];
        (l != UNLABELED).then_some(l as usize)
    }

    /// Union of the selected components, extended through the window edge.
    pub fn region(&self, window: &Window, selection: &[usize]) -> Result<Region> {
        let mut region = Region::empty(window);
        for &i in selection {
            let c = self.components.get(i).ok_or_else(|| {
                Error::Precondition(format!(
                    "component index {i} out of range ({} components)",
                    self.components.len()
                ))
            })?;
            for &id in &c.members {
                region.insert(id);
            }
        }
        // Edge elements follow the component of their canonical predecessor.
        let edge = window.sphere_ids(self.window_radius)?;
        for id in edge {
            if let Some(p) = window.parent(id) {
                if region.contains(p) {
                    region.insert(id);
                }
            }
        }
        Ok(region)
    }
}

/// Right multiplications used as edges.
enum Steps<'a> {
    Window,
    Words(&'a [(Element, Vec<usize>)]),
}

fn step_words(window: &Window, step: &GeneratorSet) -> Result<Vec<(Element, Vec<usize>)>> {
    step.steps()
        .map(|k| {
            let id = window.id(k).ok_or_else(|| Error::WindowTooSmall {
                window: window.radius(),
                needed: window.radius() + 1,
            })?;
            Ok((k.clone(), window.word(id)))
        })
        .collect()
}

/// Components of the elements of norm at most `boundary` outside `removed`.
fn decompose(
    window: &Window,
    removed: &Region,
    steps: Steps<'_>,
    base_radius: u32,
    boundary: u32,
) -> ComponentDecomposition {
    let n = window.ball_end(boundary);
    let mut labels = vec![UNLABELED; window.len()];
    let mut raw: Vec<Vec<u32>> = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n as u32 {
        if removed.contains(start) || labels[start as usize] != UNLABELED {
            continue;
        }
        let label = raw.len() as u32;
        let mut members = vec![start];
        labels[start as usize] = label;
        queue.push_back(start);
        while let Some(g) = queue.pop_front() {
            let mut visit = |h: u32| {
                if (h as usize) < n && !removed.contains(h) && labels[h as usize] == UNLABELED {
                    labels[h as usize] = label;
                    members.push(h);
                    queue.push_back(h);
                }
            };
            match &steps {
                Steps::Window => window.neighbors(g).for_each(&mut visit),
                Steps::Words(words) => {
                    for (k, word) in words.iter() {
                        if let Some(h) = window.translate(g, word, k) {
                            visit(h);
                        }
                    }
                }
            }
        }
        members.sort_unstable();
        raw.push(members);
    }

    let mut components: Vec<Component> = raw
        .into_iter()
        .map(|members| {
            let least = members
                .iter()
                .map(|&id| window.name(id))
                .min()
                .expect("components are nonempty")
                .to_string();
            let max_norm = window.norm(*members.last().expect("nonempty"));
            Component {
                outer: max_norm == boundary && !window.is_exhausted(),
                max_norm,
                least,
                members,
            }
        })
        .collect();
    components.sort_by(|a, b| a.least.cmp(&b.least));
    for (i, c) in components.iter().enumerate() {
        for &id in &c.members {
            labels[id as usize] = i as u32;
        }
    }
    ComponentDecomposition {
        base_radius,
        window_radius: window.radius(),
        components,
        labels,
    }
}

/// `K_step`-components of `{g : r <= |g| <= R - 1}`.
pub fn components(window: &Window, r: u32, step: &GeneratorSet) -> Result<ComponentDecomposition> {
    if r >= window.radius() {
        return Err(Error::RadiusOutOfRange {
            radius: r,
            window: window.radius(),
        });
    }
    let removed = match r {
        0 => Region::empty(window),
        _ => Region::ball(window, r - 1),
    };
    let boundary = window.radius() - 1;
    if step == window.generators() {
        Ok(decompose(window, &removed, Steps::Window, r, boundary))
    } else {
        let words = step_words(window, step)?;
        Ok(decompose(window, &removed, Steps::Words(&words), r, boundary))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Zero,
    One,
    Two,
    Infinite,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RadiusCount {
    pub r: u32,
    pub outer: usize,
    pub inner: usize,
    pub inner_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndEvidence {
    pub window_radius: u32,
    pub counts: Vec<RadiusCount>,
    /// Outer counts over the stabilization span on the window enlarged by 4.
    pub enlarged_counts: Option<Vec<usize>>,
    pub stabilization_span: u32,
    pub growth_span: u32,
    pub growing: bool,
    /// A stable finite count of at least three was observed.
    pub anomaly: bool,
    /// Radius of the whole group when the window exhausted it.
    pub exhausted_radius: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndVerdict {
    pub verdict: Verdict,
    pub evidence: EndEvidence,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EndParams {
    pub r_max: u32,
    /// Window radius; defaults to `2·r_max + 4`.
    pub window: Option<u32>,
    pub stab_span: u32,
    pub growth_span: u32,
}

impl Default for EndParams {
    fn default() -> Self {
        EndParams {
            r_max: 4,
            window: None,
            stab_span: 3,
            growth_span: 3,
        }
    }
}

impl EndParams {
    pub fn window_radius(&self) -> u32 {
        self.window.unwrap_or(2 * self.r_max + 4)
    }
}

fn counts_on(window: &Window, radii: &[u32]) -> Result<Vec<RadiusCount>> {
    radii
        .par_iter()
        .map(|&r| {
            let d = components(window, r, window.generators())?;
            let inner_size = d.components.iter().filter(|c| !c.outer).map(Component::size).sum();
            Ok(RadiusCount {
                r,
                outer: d.outer_count(),
                inner: d.inner_count(),
                inner_size,
            })
        })
        .collect()
}

/// End-count verdict from outer-component counts at radii `1..=r_max`.
pub fn end_count(spec: &GroupSpec, generators: &GeneratorSet, params: &EndParams) -> Result<EndVerdict> {
    end_count_with(&FreshWindows::default(), spec, generators, params)
}

pub fn end_count_with(
    provider: &dyn WindowProvider,
    spec: &GroupSpec,
    generators: &GeneratorSet,
    params: &EndParams,
) -> Result<EndVerdict> {
    if params.r_max == 0 || params.stab_span == 0 || params.growth_span < 2 {
        return Err(Error::Precondition(
            "r_max and stabilization span must be positive, growth span at least 2".into(),
        ));
    }
    if params.stab_span > params.r_max || params.growth_span > params.r_max {
        return Err(Error::Precondition("spans cannot exceed r_max".into()));
    }
    let radius = params.window_radius();
    if radius <= params.r_max {
        return Err(Error::WindowTooSmall {
            window: radius,
            needed: params.r_max + 1,
        });
    }
    let window = provider.window(spec, generators, radius)?;
    let mut evidence = EndEvidence {
        window_radius: radius,
        counts: Vec::new(),
        enlarged_counts: None,
        stabilization_span: params.stab_span,
        growth_span: params.growth_span,
        growing: false,
        anomaly: false,
        exhausted_radius: None,
    };
    if window.is_exhausted() {
        evidence.exhausted_radius = Some(window.norm(window.len() as u32 - 1));
        return Ok(EndVerdict {
            verdict: Verdict::Zero,
            evidence,
            note: "finite group: the ball exhausts it, no ends".into(),
        });
    }

    let radii: Vec<u32> = (1..=params.r_max).collect();
    evidence.counts = counts_on(&window, &radii)?;
    let outer: Vec<usize> = evidence.counts.iter().map(|c| c.outer).collect();

    let tail = &outer[outer.len() - params.growth_span as usize..];
    evidence.growing = tail.windows(2).all(|p| p[0] < p[1]);
    if evidence.growing {
        return Ok(EndVerdict {
            verdict: Verdict::Infinite,
            evidence,
            note: "outer counts keep growing: infinitely many ends, so the group splits over a finite subgroup".into(),
        });
    }

    let stable_tail = &outer[outer.len() - params.stab_span as usize..];
    let constant = stable_tail.windows(2).all(|p| p[0] == p[1]);
    if !constant {
        return Ok(EndVerdict {
            verdict: Verdict::Undetermined,
            evidence,
            note: "outer counts neither stabilize nor grow over the spans".into(),
        });
    }
    let count = stable_tail[0];
    let tail_radii = &radii[radii.len() - params.stab_span as usize..];
    let larger = provider.window(spec, generators, radius + 4)?;
    let enlarged = counts_on(&larger, tail_radii)?;
    let enlarged_outer: Vec<usize> = enlarged.iter().map(|c| c.outer).collect();
    let unchanged = enlarged_outer.iter().all(|&c| c == count);
    let inner_last = evidence.counts.last().map(|c| c.inner_size);
    let inner_stable = enlarged.last().map(|c| c.inner_size) == inner_last;
    evidence.enlarged_counts = Some(enlarged_outer);

    let (verdict, note) = if !unchanged {
        (Verdict::Undetermined, "counts changed when the window grew".to_string())
    } else if !inner_stable {
        (
            Verdict::Undetermined,
            "bounded components grow with the window; the component description of ends does not apply".to_string(),
        )
    } else {
        match count {
            1 => (Verdict::One, "one end".to_string()),
            2 => (
                Verdict::Two,
                "two ends: consistent with an infinite cyclic subgroup of finite index".to_string(),
            ),
            0 => (Verdict::Undetermined, "no outer components".to_string()),
            c => {
                evidence.anomaly = true;
                (
                    Verdict::Undetermined,
                    format!("stable count {c} >= 3 is impossible for a group; the window is too small"),
                )
            }
        }
    };
    Ok(EndVerdict {
        verdict,
        evidence,
        note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundedMass {
    pub count: usize,
    pub total_size: usize,
    pub max_norm: i64,
}

/// Aggregate of the inner (bounded) components of `window \ B(r)`.
pub fn bounded_mass_report(
    provider: &dyn WindowProvider,
    spec: &GroupSpec,
    generators: &GeneratorSet,
    r: u32,
    radius: u32,
) -> Result<BoundedMass> {
    let window = provider.window(spec, generators, radius)?;
    let d = components(&window, r, generators)?;
    let inner: Vec<&Component> = d.components.iter().filter(|c| !c.outer).collect();
    Ok(BoundedMass {
        count: inner.len(),
        total_size: inner.iter().map(|c| c.size()).sum(),
        max_norm: inner.iter().map(|c| c.max_norm as i64).max().unwrap_or(-1),
    })
}

#[derive(Debug, Clone)]
pub struct UnionCheck {
    pub report: InterfaceReport,
    /// `r + 2t`: the interface must hug the removed ball.
    pub bound: i64,
    pub holds: bool,
}

/// Interface at scale `K^t` of a union of components of `window \ B(r)`.
pub fn union_component_clopen_check(
    decomposition: &ComponentDecomposition,
    selection: &[usize],
    window: &Window,
    t: u32,
) -> Result<UnionCheck> {
    let union = decomposition.region(window, selection)?;
    let core = window.radius().checked_sub(2 * t).ok_or(Error::WindowTooSmall {
        window: window.radius(),
        needed: 2 * t,
    })?;
    let report = interface(&union, &ScaleSet::ball(window, t)?, window, core)?;
    let bound = decomposition.base_radius as i64 + 2 * t as i64;
    let holds = report.clopen && report.rho <= bound;
    Ok(UnionCheck { report, bound, holds })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComponentBound {
    /// Outer `K⁴`-components of `window \ L`.
    pub observed: usize,
    /// Greedy number of translates `g·K` covering `st(L, U_K)`, at least 1.
    pub bound: usize,
}

impl ComponentBound {
    pub fn holds(&self) -> bool {
        self.observed <= self.bound
    }
}

/// Counts `K⁴`-components of the complement of a bounded set `L` and the
/// covering bound on their number.
pub fn k4_component_bound(window: &Window, l: &Region) -> Result<ComponentBound> {
    let needed = (l.max_norm(window) + 5).max(0) as u32;
    if needed > window.radius() {
        return Err(Error::WindowTooSmall {
            window: window.radius(),
            needed,
        });
    }
    let k4 = power_generators(window.spec(), window.generators(), 4)?;
    let words = step_words(window, &k4)?;
    let d = decompose(window, l, Steps::Words(&words), 0, window.radius());
    let neighbourhood = crate::covers::star(l, &ScaleSet::ball(window, 1)?, window).set;
    let m = greedy_cover(window, &neighbourhood, 1);
    Ok(ComponentBound {
        observed: d.outer_count(),
        bound: m.max(1),
    })
}
