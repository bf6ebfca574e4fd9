use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::Window;

/// Thinness diagnostic over pairs of canonical geodesics from the identity.
///
/// `delta_hat` is a lower bound for the true constant: only canonical
/// geodesics are compared, and only pairs whose distance the window knows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaEstimate {
    pub delta_hat: u32,
    pub window_radius: u32,
    pub pairs: u64,
    pub exhaustive: bool,
    pub seed: u64,
    /// A pair attaining `delta_hat`, by name.
    pub witness: Option<(String, String)>,
}

/// For geodesics `c` to `g` and `d` to `h`, the largest `d(c_i, d_i)` over
/// `i ≤ (|g| + |h| - d(g, h)) / 2`. Distances beyond the window count as
/// `R + 1`.
fn pair_spread(window: &Window, g: u32, h: u32) -> Option<u32> {
    let d = window.distance_ids(g, h)?;
    let reach = (window.norm(g) + window.norm(h) - d) / 2;
    let mut a = window.ancestor(g, reach);
    let mut b = window.ancestor(h, reach);
    let mut worst = 0;
    // Canonical geodesics form a tree, so once the chains meet they agree
    // for every smaller index.
    while a != b {
        let gap = window.distance_ids(a, b).unwrap_or(window.radius() + 1);
        worst = worst.max(gap);
        a = window.parent(a).expect("non-identity has a parent");
        b = window.parent(b).expect("non-identity has a parent");
    }
    Some(worst)
}

/// Scans every unordered pair of window elements, or `sample_budget` seeded
/// random pairs when there are more.
pub fn estimate_delta(window: &Window, sample_budget: u64, seed: u64) -> DeltaEstimate {
    let n = window.len() as u64;
    let total = n * n.saturating_sub(1) / 2;
    let exhaustive = total <= sample_budget;
    let best = if exhaustive {
        (0..n as u32)
            .into_par_iter()
            .filter_map(|g| {
                (g + 1..n as u32)
                    .filter_map(|h| pair_spread(window, g, h).map(|v| (v, g, h)))
                    .max_by(rank)
            })
            .max_by(rank)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<(u32, u32)> = (0..sample_budget)
            .map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)))
            .collect();
        pairs
            .into_par_iter()
            .filter(|(g, h)| g != h)
            .filter_map(|(g, h)| pair_spread(window, g.min(h), g.max(h)).map(|v| (v, g.min(h), g.max(h))))
            .max_by(rank)
    };
    let (delta_hat, witness) = match best {
        Some((v, g, h)) if v > 0 => (v, Some((window.name(g).to_string(), window.name(h).to_string()))),
        _ => (0, None),
    };
    DeltaEstimate {
        delta_hat,
        window_radius: window.radius(),
        pairs: if exhaustive { total } else { sample_budget },
        exhaustive,
        seed,
        witness,
    }
}

// Larger value wins; among equals the smaller ids win, so the result does
// not depend on scheduling.
fn rank(a: &(u32, u32, u32), b: &(u32, u32, u32)) -> std::cmp::Ordering {
    a.0.cmp(&b.0).then_with(|| (b.1, b.2).cmp(&(a.1, a.2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{parse_spec, standard_generators};

    fn estimate(spec: &str, r: u32) -> DeltaEstimate {
        let spec = parse_spec(spec).unwrap();
        let w = Window::build(&spec, &standard_generators(&spec), r).unwrap();
        estimate_delta(&w, u64::MAX, 7)
    }

    #[test]
    fn trees_are_thin() {
        assert_eq!(estimate("Z", 8).delta_hat, 0);
        assert_eq!(estimate("F2", 5).delta_hat, 0);
        assert!(estimate("F2", 5).exhaustive);
    }

    #[test]
    fn plane_grows() {
        let v: Vec<u32> = [4, 6, 8].iter().map(|&r| estimate("Z^2", r).delta_hat).collect();
        assert!(v[0] < v[1] && v[1] < v[2], "{v:?}");
    }

    #[test]
    fn sampling_is_seeded() {
        let spec = parse_spec("Z^2").unwrap();
        let w = Window::build(&spec, &standard_generators(&spec), 6).unwrap();
        let a = estimate_delta(&w, 500, 3);
        let b = estimate_delta(&w, 500, 3);
        assert!(!a.exhaustive);
        assert_eq!(a, b);
        assert!(a.delta_hat <= estimate_delta(&w, u64::MAX, 0).delta_hat);
    }
}
