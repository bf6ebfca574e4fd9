//! Stars, interfaces and coarsely clopen certificates at a finite scale.
//!
//! A scale set `B` stands for the cover `{g·B : g ∈ G}`. The star of `A` in
//! that cover is exactly `A·B⁻¹·B`. The interface of `A` is the part of the
//! core where the stars of `A` and of its complement meet; `A` is coarsely
//! clopen when that set stays bounded at every scale.

use std::collections::HashSet;

use serde::Serialize;

use crate::cayley::{FreshWindows, Window, WindowProvider};
use crate::error::{Error, Result};
use crate::group::Element;
use crate::region::Region;

/// A finite symmetric set `B` containing the identity, inside a window.
#[derive(Debug, Clone)]
pub struct ScaleSet {
    elements: Vec<Element>,
    max_norm: u32,
    /// `B⁻¹·B` with the canonical generator word of each element.
    spread: Vec<(Element, Vec<usize>)>,
}

impl ScaleSet {
    pub fn new(window: &Window, elements: impl IntoIterator<Item = Element>) -> Result<Self> {
        let spec = window.spec();
        let mut seen = HashSet::new();
        let elements: Vec<Element> = elements.into_iter().filter(|e| seen.insert(e.clone())).collect();
        if !seen.contains(&spec.identity()) {
            return Err(Error::Precondition("scale set must contain the identity".into()));
        }
        let mut max_norm = 0;
        for b in &elements {
            spec.check(b)?;
            if !seen.contains(&spec.inv(b)) {
                return Err(Error::Precondition(format!(
                    "scale set is not symmetric: missing inverse of {}",
                    window.describe(b)
                )));
            }
            max_norm = max_norm.max(window.knorm(b)?);
        }
        if 2 * max_norm > window.radius() {
            return Err(Error::WindowTooSmall {
                window: window.radius(),
                needed: 2 * max_norm,
            });
        }
        let mut spread_set = HashSet::new();
        let mut spread = Vec::new();
        for b1 in &elements {
            let b1_inv = spec.inv(b1);
            for b2 in &elements {
                let c = spec.mul(&b1_inv, b2);
                if spread_set.insert(c.clone()) {
                    let id = window.id(&c).expect("B⁻¹B lies in the window");
                    spread.push((id, c));
                }
            }
        }
        spread.sort_by_key(|(id, _)| *id);
        Ok(ScaleSet {
            elements,
            max_norm,
            spread: spread.into_iter().map(|(id, c)| (c, window.word(id))).collect(),
        })
    }

    /// The ball `K^t = B(t)` of the window's own metric.
    pub fn ball(window: &Window, t: u32) -> Result<Self> {
        if t > window.radius() {
            return Err(Error::WindowTooSmall {
                window: window.radius(),
                needed: t,
            });
        }
        Self::new(
            window,
            (0..window.ball_end(t) as u32).map(|i| window.element(i).clone()),
        )
    }

    /// Just the identity; its star is the set itself.
    pub fn trivial(window: &Window) -> Self {
        Self::new(window, [window.spec().identity()]).expect("identity is a scale set")
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn max_norm(&self) -> u32 {
        self.max_norm
    }

    fn hits(&self, window: &Window, g: u32, set: &Region, inside: bool) -> bool {
        self.spread
            .iter()
            .any(|(c, word)| window.translate(g, word, c).is_some_and(|h| set.contains(h) == inside))
    }
}

/// Result of a star computation; `truncated` counts products that fell
/// outside the window.
#[derive(Debug, Clone)]
pub struct Star {
    pub set: Region,
    pub truncated: usize,
}

/// `st(A, U_B) = A·B⁻¹·B`, restricted to the window.
pub fn star(a: &Region, scale: &ScaleSet, window: &Window) -> Star {
    let mut set = Region::empty(window);
    let mut truncated = 0;
    for g in a.iter() {
        for (c, word) in &scale.spread {
            match window.translate(g, word, c) {
                Some(h) => set.insert(h),
                None => truncated += 1,
            }
        }
    }
    Star { set, truncated }
}

#[derive(Debug, Clone)]
pub struct InterfaceReport {
    /// `st(A) ∩ st(Aᶜ) ∩ B(core_radius)`.
    pub set: Region,
    /// Largest norm in the interface, -1 when empty.
    pub rho: i64,
    pub core_radius: u32,
    /// Interface sits strictly inside the core.
    pub clopen: bool,
}

/// Interface of `A` at scale `B` within the core `B(core_radius)`.
///
/// Exact for the infinite group as long as `core_radius + 2·maxnorm(B)` fits
/// in the window.
pub fn interface(a: &Region, scale: &ScaleSet, window: &Window, core_radius: u32) -> Result<InterfaceReport> {
    let needed = core_radius + 2 * scale.max_norm;
    if needed > window.radius() {
        return Err(Error::WindowTooSmall {
            window: window.radius(),
            needed,
        });
    }
    let core_end = window.ball_end(core_radius) as u32;
    let set = Region::from_ids(
        window,
        (0..core_end).filter(|&g| scale.hits(window, g, a, true) && scale.hits(window, g, a, false)),
    );
    let rho = set.max_norm(window);
    Ok(InterfaceReport {
        set,
        rho,
        core_radius,
        clopen: rho < core_radius as i64,
    })
}

/// Something that picks out a subset of any window, so the same set can be
/// re-examined on a larger window.
pub trait SetSelector: Sync {
    fn resolve(&self, window: &Window) -> Result<Region>;
}

impl<F> SetSelector for F
where
    F: Fn(&Element) -> bool + Sync,
{
    fn resolve(&self, window: &Window) -> Result<Region> {
        Ok(Region::from_predicate(window, |_, g| self(g)))
    }
}

/// A finite, explicitly listed set.
#[derive(Debug, Clone, Default)]
pub struct ExplicitSet(pub HashSet<Element>);

impl SetSelector for ExplicitSet {
    fn resolve(&self, window: &Window) -> Result<Region> {
        for g in &self.0 {
            window.spec().check(g)?;
        }
        Ok(Region::from_elements(window, &self.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateRow {
    pub scale_t: u32,
    pub rho: i64,
    pub core_radius: u32,
    pub stable: bool,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub rows: Vec<CertificateRow>,
    /// `rho(1)`, the reference for the affine scale law.
    pub reference_radius: i64,
    pub affine_law: bool,
    pub clopen_consistent: bool,
}

/// Checks interfaces at the scales `K^t`, `t = 1..=t_max`, where the core for
/// scale `t` is `B(R - 2t)`, and repeats each on a window four larger.
pub fn clopen_scale_test(selector: &dyn SetSelector, window: &Window, t_max: u32) -> Result<Certificate> {
    clopen_scale_test_with(&FreshWindows::default(), selector, window, t_max)
}

pub fn clopen_scale_test_with(
    provider: &dyn WindowProvider,
    selector: &dyn SetSelector,
    window: &Window,
    t_max: u32,
) -> Result<Certificate> {
    if t_max == 0 {
        return Err(Error::Precondition("t_max must be at least 1".into()));
    }
    // maxnorm(K) is 1 in the window's own metric.
    if window.radius() <= 2 * t_max {
        return Err(Error::WindowTooSmall {
            window: window.radius(),
            needed: 2 * t_max + 1,
        });
    }
    let larger = provider.window(window.spec(), window.generators(), window.radius() + 4)?;
    let a = selector.resolve(window)?;
    let a_large = selector.resolve(&larger)?;

    let mut rows = Vec::new();
    for t in 1..=t_max {
        let core = window.radius() - 2 * t;
        let here = interface(&a, &ScaleSet::ball(window, t)?, window, core)?;
        let there = interface(&a_large, &ScaleSet::ball(&larger, t)?, &larger, core)?;
        // Ids of B(R) agree between the two windows (breadth-first prefix).
        let stable = here.rho == there.rho && here.set.iter().eq(there.set.iter());
        rows.push(CertificateRow {
            scale_t: t,
            rho: here.rho,
            core_radius: core,
            stable,
            verdict: here.clopen && stable,
        });
    }
    let reference_radius = rows[0].rho;
    let affine_law = rows
        .iter()
        .all(|row| row.rho <= reference_radius + 2 * row.scale_t as i64);
    let clopen_consistent = affine_law && rows.iter().all(|row| row.verdict);
    Ok(Certificate {
        rows,
        reference_radius,
        affine_law,
        clopen_consistent,
    })
}

/// Largest norm in `A Δ C`, -1 when the sets agree.
pub fn coarsely_identical(a: &Region, c: &Region, window: &Window) -> i64 {
    a.symmetric_difference(c).max_norm(window)
}

/// Checks `I(A₁ ∩ A₂) ⊆ I(A₁) ∪ I(A₂)` within the core.
pub fn clopen_intersection_law(
    a1: &Region,
    a2: &Region,
    scale: &ScaleSet,
    window: &Window,
    core_radius: u32,
) -> Result<bool> {
    let both = interface(&a1.intersection(a2), scale, window, core_radius)?;
    let first = interface(a1, scale, window, core_radius)?;
    let second = interface(a2, scale, window, core_radius)?;
    Ok(both.set.is_subset(&first.set.union(&second.set)))
}

/// Interface of `st(A, U_B)` at scale `V`.
pub fn star_preserves_clopen(
    a: &Region,
    b: &ScaleSet,
    v: &ScaleSet,
    window: &Window,
    core_radius: u32,
) -> Result<InterfaceReport> {
    let needed = core_radius + 2 * v.max_norm + 2 * b.max_norm;
    if needed > window.radius() {
        return Err(Error::WindowTooSmall {
            window: window.radius(),
            needed,
        });
    }
    interface(&star(a, b, window).set, v, window, core_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{parse_spec, standard_generators, Element};

    fn window(spec: &str, r: u32) -> Window {
        let spec = parse_spec(spec).unwrap();
        Window::build(&spec, &standard_generators(&spec), r).unwrap()
    }

    fn int(g: &Element) -> i64 {
        match g {
            Element::Lattice(v) => v[0],
            _ => unreachable!(),
        }
    }

    fn ints(w: &Window, region: &Region) -> Vec<i64> {
        let mut v: Vec<i64> = region.iter().map(|id| int(w.element(id))).collect();
        v.sort();
        v
    }

    #[test]
    fn star_of_empty_set() {
        let w = window("Z", 8);
        let s = star(&Region::empty(&w), &ScaleSet::ball(&w, 2).unwrap(), &w);
        assert!(s.set.is_empty());
    }

    #[test]
    fn star_on_the_line() {
        let w = window("Z", 12);
        let a = Region::from_predicate(&w, |_, g| int(g) >= 1);
        let s = star(&a, &ScaleSet::ball(&w, 2).unwrap(), &w);
        assert_eq!(ints(&w, &s.set), (-3..=12).collect::<Vec<_>>());
        assert!(s.truncated > 0);
    }

    #[test]
    fn interface_of_half_line() {
        let w = window("Z", 20);
        let a = Region::from_predicate(&w, |_, g| int(g) >= 1);
        for r in 1..=3 {
            let rep = interface(&a, &ScaleSet::ball(&w, r).unwrap(), &w, 20 - 2 * r).unwrap();
            assert_eq!(
                ints(&w, &rep.set),
                ((1 - 2 * r as i64)..=2 * r as i64).collect::<Vec<_>>()
            );
            assert_eq!(rep.rho, 2 * r as i64);
            assert!(rep.clopen);
        }
    }

    #[test]
    fn interface_of_evens_fills_the_core() {
        let w = window("Z", 12);
        let a = Region::from_predicate(&w, |_, g| int(g) % 2 == 0);
        let rep = interface(&a, &ScaleSet::ball(&w, 1).unwrap(), &w, 10).unwrap();
        assert_eq!(rep.set, Region::ball(&w, 10));
        assert_eq!(rep.rho, 10);
        assert!(!rep.clopen);
    }

    #[test]
    fn interface_of_whole_window_is_empty() {
        let w = window("F2", 5);
        let rep = interface(&Region::full(&w), &ScaleSet::ball(&w, 1).unwrap(), &w, 3).unwrap();
        assert!(rep.set.is_empty());
        assert_eq!(rep.rho, -1);
        assert!(rep.clopen);
    }

    #[test]
    fn core_too_large() {
        let w = window("Z", 10);
        let a = Region::full(&w);
        assert!(matches!(
            interface(&a, &ScaleSet::ball(&w, 2).unwrap(), &w, 7),
            Err(Error::WindowTooSmall { needed: 11, .. })
        ));
    }

    #[test]
    fn scale_set_validation() {
        let w = window("Z", 10);
        let one = Element::Lattice(vec![1]);
        assert!(ScaleSet::new(&w, [w.spec().identity(), one.clone()]).is_err());
        assert!(ScaleSet::new(&w, [one.clone(), Element::Lattice(vec![-1])]).is_err());
        assert!(ScaleSet::new(
            &w,
            [
                w.spec().identity(),
                Element::Lattice(vec![6]),
                Element::Lattice(vec![-6])
            ]
        )
        .is_err());
    }

    #[test]
    fn coarse_identity_on_the_line() {
        let w = window("Z", 10);
        let a = Region::from_predicate(&w, |_, g| int(g) >= 1);
        let c = Region::from_predicate(&w, |_, g| int(g) >= 5);
        assert_eq!(coarsely_identical(&a, &a, &w), -1);
        assert_eq!(coarsely_identical(&a, &c, &w), 4);
    }

    #[test]
    fn certificates_on_the_line() {
        let w = window("Z", 20);
        let half = |g: &Element| int(g) >= 1;
        let cert = clopen_scale_test(&half, &w, 4).unwrap();
        assert!(cert.clopen_consistent);
        let rhos: Vec<i64> = cert.rows.iter().map(|r| r.rho).collect();
        assert_eq!(rhos, [2, 4, 6, 8]);

        let evens = |g: &Element| int(g) % 2 == 0;
        let cert = clopen_scale_test(&evens, &w, 4).unwrap();
        assert!(!cert.clopen_consistent);
        for row in &cert.rows {
            assert_eq!(row.rho, row.core_radius as i64);
        }

        let empty = ExplicitSet::default();
        let cert = clopen_scale_test(&empty, &w, 2).unwrap();
        assert!(cert.clopen_consistent);
        assert!(cert.rows.iter().all(|r| r.rho == -1));

        assert!(clopen_scale_test(&half, &w, 10).is_err());
    }

    #[test]
    fn star_of_half_line_stays_clopen() {
        let w = window("Z", 16);
        let a = Region::from_predicate(&w, |_, g| int(g) >= 1);
        let b = ScaleSet::ball(&w, 1).unwrap();
        let rep = star_preserves_clopen(&a, &b, &b, &w, 10).unwrap();
        // st(A) = {n >= -1}; its interface at B(1) is {-3..0}.
        assert_eq!(ints(&w, &rep.set), vec![-3, -2, -1, 0]);
        assert_eq!(rep.rho, 3);
        assert!(rep.rho <= 4);
        let trivial = ScaleSet::trivial(&w);
        let same = star_preserves_clopen(&a, &trivial, &b, &w, 10).unwrap();
        assert_eq!(same.set, interface(&a, &b, &w, 10).unwrap().set);
    }
}
