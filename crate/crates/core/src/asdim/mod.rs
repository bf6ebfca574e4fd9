//! Growth data, covering numbers and the annulus-cover witness for an upper
//! bound on asymptotic dimension.

mod annulus;
mod delta;

use std::collections::HashSet;

use serde::Serialize;

pub use annulus::{
    asdim_upper_bound, asdim_upper_bound_with, build_annulus_cover, verify_cover, AnnulusCover, AsdimParams,
    AsdimWitness, CoverStats, SeparatedNet, DEFAULT_PAIR_BUDGET,
};
pub use delta::{estimate_delta, DeltaEstimate};

use crate::cayley::Window;
use crate::error::{Error, Result};
use crate::group::Element;
use crate::region::Region;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringSample {
    pub t: u32,
    pub base_radius: u32,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthTable {
    pub spheres: Vec<usize>,
    pub balls: Vec<usize>,
    pub coverings: Vec<CoveringSample>,
}

/// Sphere and ball sizes for `r = 0..=r_max`.
pub fn growth_series(window: &Window, r_max: u32) -> Result<GrowthTable> {
    if r_max > window.radius() {
        return Err(Error::RadiusOutOfRange {
            radius: r_max,
            window: window.radius(),
        });
    }
    let spheres: Vec<usize> = (0..=r_max)
        .map(|r| window.sphere_ids(r).map(|ids| ids.len()))
        .collect::<Result<_>>()?;
    let balls = spheres
        .iter()
        .scan(0, |acc, s| {
            *acc += s;
            Some(*acc)
        })
        .collect();
    Ok(GrowthTable {
        spheres,
        balls,
        coverings: Vec::new(),
    })
}

impl GrowthTable {
    /// Adds `N_t(S)` samples for every `t` in `offsets` and `S` in `bases`
    /// that fit the window.
    pub fn with_coverings(mut self, window: &Window, offsets: &[u32], bases: &[u32]) -> Result<Self> {
        for &t in offsets {
            for &s in bases {
                if s + t <= window.radius() {
                    self.coverings.push(CoveringSample {
                        t,
                        base_radius: s,
                        count: covering_number(window, s, t)?,
                    });
                }
            }
        }
        Ok(self)
    }
}

/// Words for every element of `B(r)`, reused to enumerate translates
/// `g·B(r)` through the adjacency table.
pub(crate) struct BallTemplate<'w> {
    window: &'w Window,
    entries: Vec<(Vec<usize>, &'w Element)>,
}

impl<'w> BallTemplate<'w> {
    pub(crate) fn new(window: &'w Window, r: u32) -> Self {
        let end = window.ball_end(r) as u32;
        BallTemplate {
            window,
            entries: (0..end).map(|b| (window.word(b), window.element(b))).collect(),
        }
    }

    /// Window ids of `g·B(r)`.
    pub(crate) fn around(&self, g: u32) -> impl Iterator<Item = u32> + '_ {
        self.entries
            .iter()
            .filter_map(move |(word, c)| self.window.translate(g, word, c))
    }
}

/// Greedy count of translates `g·B(s)` covering `target`.
///
/// Repeatedly takes the uncovered element `x` of largest norm (ties broken
/// lexicographically) and, among the target elements within `s` of `x`,
/// the center covering the most uncovered elements (ties: least norm, then
/// lexicographic).
pub fn greedy_cover(window: &Window, target: &Region, s: u32) -> usize {
    let ball = BallTemplate::new(window, s);
    let around = |g: u32| ball.around(g);

    let mut order: Vec<u32> = target.iter().collect();
    order.sort_by(|&a, &b| {
        window
            .norm(b)
            .cmp(&window.norm(a))
            .then_with(|| window.name(a).cmp(window.name(b)))
    });
    let mut covered = Region::empty(window);
    let mut count = 0;
    for x in order {
        if covered.contains(x) {
            continue;
        }
        let mut best: Option<(usize, u32)> = None;
        for g in around(x).filter(|&g| target.contains(g)) {
            let gain = around(g)
                .filter(|&h| target.contains(h) && !covered.contains(h))
                .count();
            let better = match best {
                None => true,
                Some((best_gain, b)) => {
                    gain > best_gain
                        || (gain == best_gain && (window.norm(g), window.name(g)) < (window.norm(b), window.name(b)))
                }
            };
            if better {
                best = Some((gain, g));
            }
        }
        let (_, center) = best.expect("x itself is a candidate");
        for h in around(center) {
            if target.contains(h) {
                covered.insert(h);
            }
        }
        count += 1;
    }
    count
}

/// Greedy upper bound on the number of translates `g·K^s` covering `K^(s+t)`.
pub fn covering_number(window: &Window, s: u32, t: u32) -> Result<usize> {
    if s + t > window.radius() {
        return Err(Error::WindowTooSmall {
            window: window.radius(),
            needed: s + t,
        });
    }
    Ok(greedy_cover(window, &Region::ball(window, s + t), s))
}

/// Least number of translates `g·K^s` (over all `g` in the group) covering
/// `K^(s+t)`, or `None` when the target has more than `cap` elements.
pub fn exact_covering_number(window: &Window, s: u32, t: u32, cap: usize) -> Result<Option<usize>> {
    if s + t > window.radius() {
        return Err(Error::WindowTooSmall {
            window: window.radius(),
            needed: s + t,
        });
    }
    let target_len = window.ball_end(s + t);
    if target_len > cap || target_len > 63 {
        return Ok(None);
    }
    let spec = window.spec();
    let targets: Vec<&Element> = (0..target_len as u32).map(|i| window.element(i)).collect();
    let ball: Vec<&Element> = (0..window.ball_end(s) as u32).map(|i| window.element(i)).collect();

    // Any useful center lies within s of some target element.
    let mut seen = HashSet::new();
    let mut masks = HashSet::new();
    for h in &targets {
        for b in &ball {
            let g = spec.mul(h, b);
            if !seen.insert(g.clone()) {
                continue;
            }
            let g_inv = spec.inv(&g);
            let mut mask = 0u64;
            for (i, h2) in targets.iter().enumerate() {
                let within = window.id(&spec.mul(&g_inv, h2)).is_some_and(|id| window.norm(id) <= s);
                if within {
                    mask |= 1 << i;
                }
            }
            masks.insert(mask);
        }
    }
    let masks: Vec<u64> = masks.into_iter().collect();
    let full = if target_len == 64 {
        u64::MAX
    } else {
        (1u64 << target_len) - 1
    };

    fn search(uncovered: u64, budget: usize, masks: &[u64]) -> bool {
        if uncovered == 0 {
            return true;
        }
        if budget == 0 {
            return false;
        }
        let lowest = uncovered & uncovered.wrapping_neg();
        masks
            .iter()
            .filter(|&&m| m & lowest != 0)
            .any(|&m| search(uncovered & !m, budget - 1, masks))
    }
    Ok((1..=target_len).find(|&k| search(full, k, &masks)))
}

/// Greedy number of translates of `K` covering `K·K`.
pub fn bounded_geometry_check(window: &Window) -> Result<usize> {
    if window.radius() < 3 {
        return Err(Error::WindowTooSmall {
            window: window.radius(),
            needed: 3,
        });
    }
    covering_number(window, 1, 1)
}
