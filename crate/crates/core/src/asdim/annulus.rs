use std::collections::HashMap;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use super::{covering_number, estimate_delta, BallTemplate, CoveringSample, DeltaEstimate};
use crate::cayley::{FreshWindows, Window, WindowProvider};
use crate::error::{Error, Result};
use crate::group::{GeneratorSet, GroupSpec};

/// Greedy `2ps`-separated net in the shell `K^(2n) \ K^(2n-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatedNet {
    pub shell_radius: u32,
    pub separation: u32,
    pub points: Vec<u32>,
    pub maximal: bool,
}

/// Sets `U_i = {g in A : d(r(g), x_i) <= 2ps}` over the annulus
/// `A = K^(2n+2ps) \ K^(2n)`, where `r(g)` is the term of norm `2n` on the
/// canonical geodesic to `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnulusCover {
    pub n: u32,
    pub p: u32,
    pub s: u32,
    pub net: SeparatedNet,
    /// Annulus ids; contiguous because ids follow norm.
    pub members: Range<u32>,
    /// `r(g)` for each member, in member order.
    pub last_exit: Vec<u32>,
    /// Net indices assigned to each member, ascending.
    pub assignment: Vec<Vec<u32>>,
    pub sets: Vec<Vec<u32>>,
}

impl AnnulusCover {
    pub fn ps(&self) -> u32 {
        self.p * self.s
    }

    pub fn inner_radius(&self) -> u32 {
        2 * self.n
    }

    pub fn outer_radius(&self) -> u32 {
        2 * self.n + 2 * self.ps()
    }

    /// Net indices of the sets containing `id`, if it lies in the annulus.
    pub fn indices(&self, id: u32) -> Option<&[u32]> {
        self.members
            .contains(&id)
            .then(|| self.assignment[(id - self.members.start) as usize].as_slice())
    }

    /// Least assigned index: the partition refinement used for display.
    pub fn primary(&self, id: u32) -> Option<u32> {
        self.indices(id).map(|ix| ix[0])
    }
}

pub fn build_annulus_cover(window: &Window, n: u32, p: u32, s: u32) -> Result<AnnulusCover> {
    if p == 0 || s == 0 {
        return Err(Error::Precondition("p and s must be positive".into()));
    }
    let ps = p * s;
    if n <= ps {
        return Err(Error::Precondition(format!("n = {n} must exceed p·s = {ps}")));
    }
    let outer = 2 * n + 2 * ps;
    if outer > window.radius() {
        return Err(Error::WindowTooSmall {
            window: window.radius(),
            needed: outer,
        });
    }
    let shell = window.sphere_ids(2 * n)?;
    if shell.is_empty() {
        return Err(Error::EmptyShell(2 * n));
    }

    let mut order: Vec<u32> = shell.clone().collect();
    order.sort_by(|&a, &b| window.name(a).cmp(window.name(b)));
    let near = BallTemplate::new(window, 2 * ps - 1);
    let mut index_of: HashMap<u32, u32> = HashMap::new();
    let mut points = Vec::new();
    for x in order {
        if near.around(x).any(|h| index_of.contains_key(&h)) {
            continue;
        }
        index_of.insert(x, points.len() as u32);
        points.push(x);
    }

    let reach = BallTemplate::new(window, 2 * ps);
    let by_shell: Vec<Vec<u32>> = shell
        .clone()
        .into_par_iter()
        .map(|r| {
            let mut ix: Vec<u32> = reach.around(r).filter_map(|h| index_of.get(&h).copied()).collect();
            ix.sort_unstable();
            ix
        })
        .collect();
    // Every shell element skipped by the greedy pass saw a net point.
    let maximal = by_shell.iter().all(|ix| !ix.is_empty());

    let members = window.ball_end(2 * n) as u32..window.ball_end(outer) as u32;
    let last_exit: Vec<u32> = members.clone().map(|g| window.ancestor(g, 2 * n)).collect();
    let mut assignment = Vec::with_capacity(last_exit.len());
    let mut sets = vec![Vec::new(); points.len()];
    for (g, &r) in members.clone().zip(&last_exit) {
        let ix = by_shell[(r - shell.start) as usize].clone();
        if ix.is_empty() {
            return Err(Error::Verification {
                center: window.name(g).to_string(),
                message: "annulus element outside every set".into(),
            });
        }
        for &i in &ix {
            sets[i as usize].push(g);
        }
        assignment.push(ix);
    }
    Ok(AnnulusCover {
        n,
        p,
        s,
        net: SeparatedNet {
            shell_radius: 2 * n,
            separation: 2 * ps,
            points,
            maximal,
        },
        members,
        last_exit,
        assignment,
        sets,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverStats {
    pub n: u32,
    pub net_size: usize,
    pub sets: usize,
    pub max_diameter: u32,
    /// False when some pair was bounded through its net point instead of
    /// measured, because the pair scan exceeded its budget or the window.
    pub diameter_exact: bool,
    /// Net point of a set attaining `max_diameter`.
    pub widest_set: Option<String>,
    pub max_multiplicity: usize,
    /// Entry `r` is the largest number of sets met by a probe ball of
    /// radius `r`.
    pub multiplicity_by_radius: Vec<usize>,
    pub worst_center: Option<String>,
    pub probe_radius: u32,
    #[serde(rename = "N2delta")]
    pub n2delta: usize,
    pub claimed_bound: usize,
    pub passed: bool,
}

/// Default budget of pairwise distance evaluations per cover.
pub const DEFAULT_PAIR_BUDGET: u64 = 20_000_000;

/// Diameters of every set and probe-ball multiplicities over all probe
/// centers whose ball lies inside the window.
pub fn verify_cover(
    window: &Window,
    cover: &AnnulusCover,
    probe_radius: u32,
    n2delta: usize,
    pair_budget: u64,
) -> Result<CoverStats> {
    let ps = cover.ps();
    if probe_radius > ps {
        return Err(Error::Precondition(format!(
            "probe radius {probe_radius} exceeds p·s = {ps}"
        )));
    }
    let beyond = window.radius() + 1;
    let pairs: u64 = cover.sets.iter().map(|u| (u.len() as u64).pow(2) / 2).sum();
    let exhaustive = pairs <= pair_budget;
    let diameters: Vec<(u32, bool)> = cover
        .sets
        .par_iter()
        .zip(cover.net.points.par_iter())
        .map(|(u, &x)| set_diameter(window, u, x, exhaustive, beyond))
        .collect();
    let widest = (0..diameters.len()).max_by(|&a, &b| diameters[a].0.cmp(&diameters[b].0).then(b.cmp(&a)));
    let max_diameter = widest.map_or(0, |i| diameters[i].0);
    let diameter_exact = diameters.iter().all(|d| d.1);

    let lo = (cover.inner_radius() + 1).saturating_sub(probe_radius);
    let hi = (cover.outer_radius() + probe_radius).min(window.radius().saturating_sub(probe_radius));
    let first = if lo == 0 { 0 } else { window.ball_end(lo - 1) as u32 };
    let centers = first..(window.ball_end(hi) as u32).max(first);
    let mut multiplicity_by_radius = Vec::new();
    let mut worst: Option<(usize, u32)> = None;
    for r in 0..=probe_radius {
        let ball = BallTemplate::new(window, r);
        let best = centers
            .clone()
            .into_par_iter()
            .map(|x| {
                let mut met: Vec<u32> = ball
                    .around(x)
                    .filter_map(|h| cover.indices(h))
                    .flatten()
                    .copied()
                    .collect();
                met.sort_unstable();
                met.dedup();
                (met.len(), x)
            })
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
        multiplicity_by_radius.push(best.map_or(0, |b| b.0));
        if r == probe_radius {
            worst = best;
        }
    }
    let max_multiplicity = *multiplicity_by_radius.last().unwrap();
    Ok(CoverStats {
        n: cover.n,
        net_size: cover.net.points.len(),
        sets: cover.sets.iter().filter(|u| !u.is_empty()).count(),
        max_diameter,
        diameter_exact,
        widest_set: widest.map(|i| window.name(cover.net.points[i]).to_string()),
        max_multiplicity,
        multiplicity_by_radius,
        worst_center: worst.map(|(_, x)| window.name(x).to_string()),
        probe_radius,
        n2delta,
        claimed_bound: n2delta.saturating_mul(2).saturating_sub(1),
        passed: max_diameter <= 8 * ps && max_multiplicity <= n2delta,
    })
}

fn set_diameter(window: &Window, set: &[u32], x: u32, exhaustive: bool, beyond: u32) -> (u32, bool) {
    let to_net: Vec<u32> = set
        .iter()
        .map(|&g| window.distance_ids(g, x).unwrap_or(beyond))
        .collect();
    if !exhaustive {
        let mut far = to_net.clone();
        far.sort_unstable_by(|a, b| b.cmp(a));
        return (far.iter().take(2).sum(), false);
    }
    let mut diameter = 0;
    let mut exact = true;
    for (i, &g) in set.iter().enumerate() {
        for (j, &h) in set.iter().enumerate().skip(i + 1) {
            let d = window.distance_ids(g, h).unwrap_or_else(|| {
                exact = false;
                to_net[i] + to_net[j]
            });
            diameter = diameter.max(d);
        }
    }
    (diameter, exact)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsdimParams {
    pub p: u32,
    pub s: u32,
    /// Annulus parameters; must step by `p·s`. Defaults to `annuli` values
    /// starting at `p·s + 1`.
    pub n_list: Option<Vec<u32>>,
    pub annuli: usize,
    pub window: Option<u32>,
    /// Two window radii on which the thinness estimate must not grow.
    pub delta_windows: [u32; 2],
    pub sample_budget: u64,
    pub pair_budget: u64,
    pub seed: u64,
}

impl Default for AsdimParams {
    fn default() -> Self {
        AsdimParams {
            p: 1,
            s: 1,
            n_list: None,
            annuli: 2,
            window: None,
            delta_windows: [4, 6],
            sample_budget: 2_000_000,
            pair_budget: DEFAULT_PAIR_BUDGET,
            seed: 0,
        }
    }
}

impl AsdimParams {
    pub fn ps(&self) -> u32 {
        self.p * self.s
    }

    pub fn resolved_n_list(&self) -> Result<Vec<u32>> {
        let ps = self.ps();
        let list = match &self.n_list {
            Some(list) => list.clone(),
            None => (0..self.annuli as u32).map(|k| ps + 1 + k * ps).collect(),
        };
        if list.is_empty() {
            return Err(Error::Precondition("no annuli requested".into()));
        }
        if let Some(&n) = list.iter().find(|&&n| n <= ps) {
            return Err(Error::Precondition(format!("n = {n} must exceed p·s = {ps}")));
        }
        if list.windows(2).any(|w| w[1] != w[0] + ps) {
            return Err(Error::Precondition(format!(
                "consecutive n values must differ by p·s = {ps}"
            )));
        }
        Ok(list)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AsdimWitness {
    pub delta_hat: u32,
    pub delta_checks: Vec<DeltaEstimate>,
    pub delta: u32,
    pub t: u32,
    #[serde(rename = "N2delta")]
    pub n2delta: usize,
    pub covering_samples: Vec<CoveringSample>,
    pub p: u32,
    pub s: u32,
    pub window_radius: u32,
    /// The central ball `K^(2 n_0)` counted as one set.
    pub central_radius: u32,
    pub annuli: Vec<CoverStats>,
    pub cross_multiplicity: usize,
    pub cross_center: Option<String>,
    pub bound: usize,
    pub caveat: &'static str,
}

const CAVEAT: &str = "delta_hat compares canonical geodesics only and N2delta maximizes over sampled radii; the bound holds for the explored window";

pub fn asdim_upper_bound(spec: &GroupSpec, generators: &GeneratorSet, params: &AsdimParams) -> Result<AsdimWitness> {
    asdim_upper_bound_with(&FreshWindows::default(), spec, generators, params)
}

pub fn asdim_upper_bound_with(
    provider: &dyn WindowProvider,
    spec: &GroupSpec,
    generators: &GeneratorSet,
    params: &AsdimParams,
) -> Result<AsdimWitness> {
    if params.p == 0 || params.s == 0 {
        return Err(Error::Precondition("p and s must be positive".into()));
    }
    let ps = params.ps();
    let n_list = params.resolved_n_list()?;

    let [small_r, large_r] = params.delta_windows;
    if small_r >= large_r {
        return Err(Error::Precondition("delta windows must increase".into()));
    }
    let small = estimate_delta(
        &*provider.window(spec, generators, small_r)?,
        params.sample_budget,
        params.seed,
    );
    let large = estimate_delta(
        &*provider.window(spec, generators, large_r)?,
        params.sample_budget,
        params.seed,
    );
    if large.delta_hat > small.delta_hat {
        return Err(Error::NonHyperbolic {
            small: small.delta_hat,
            small_radius: small_r,
            large: large.delta_hat,
            large_radius: large_r,
        });
    }
    let delta_hat = small.delta_hat.max(large.delta_hat);
    let delta = delta_hat.max(1) + 1;
    let t = 2 * delta;

    let last = *n_list.last().unwrap();
    let needed = (2 * last + 3 * ps).max(2 * t);
    let radius = params.window.unwrap_or(needed.max(2 * t + 1));
    if radius < needed {
        return Err(Error::WindowTooSmall { window: radius, needed });
    }
    let window = provider.window(spec, generators, radius)?;

    let covering_samples: Vec<CoveringSample> = [t, t + 1]
        .into_iter()
        .filter(|&base| base + t <= radius)
        .map(|base| {
            covering_number(&window, base, t).map(|count| CoveringSample {
                t,
                base_radius: base,
                count,
            })
        })
        .collect::<Result<_>>()?;
    let n2delta = covering_samples.iter().map(|c| c.count).max().unwrap_or(1);

    let covers: Vec<AnnulusCover> = n_list
        .par_iter()
        .map(|&n| build_annulus_cover(&window, n, params.p, params.s))
        .collect::<Result<_>>()?;
    let mut annuli = Vec::with_capacity(covers.len());
    for cover in &covers {
        let stats = verify_cover(&window, cover, ps, n2delta, params.pair_budget)?;
        if stats.max_diameter > 8 * ps {
            return Err(Error::Verification {
                center: stats.widest_set.clone().unwrap_or_default(),
                message: format!("set diameter {} exceeds {}", stats.max_diameter, 8 * ps),
            });
        }
        if stats.max_multiplicity > n2delta {
            return Err(Error::Verification {
                center: stats.worst_center.clone().unwrap_or_default(),
                message: format!(
                    "probe ball meets {} sets of annulus n = {}, more than {n2delta}",
                    stats.max_multiplicity, cover.n
                ),
            });
        }
        annuli.push(stats);
    }

    let central_radius = 2 * n_list[0];
    let (cross_multiplicity, cross_center) = cross_scan(&window, &covers, central_radius, ps);
    if cross_multiplicity > 2 * n2delta {
        return Err(Error::Verification {
            center: window.name(cross_center).to_string(),
            message: format!("probe ball meets {cross_multiplicity} sets, more than {}", 2 * n2delta),
        });
    }
    Ok(AsdimWitness {
        delta_hat,
        delta_checks: vec![small, large],
        delta,
        t,
        n2delta,
        covering_samples,
        p: params.p,
        s: params.s,
        window_radius: radius,
        central_radius,
        annuli,
        cross_multiplicity,
        cross_center: Some(window.name(cross_center).to_string()),
        bound: 2 * n2delta - 1,
        caveat: CAVEAT,
    })
}

/// Largest number of pieces met by a probe ball of radius `ps`, where the
/// pieces are the central ball and every set of every annulus cover.
fn cross_scan(window: &Window, covers: &[AnnulusCover], central_radius: u32, ps: u32) -> (usize, u32) {
    let outer = covers.last().map_or(central_radius, |c| c.outer_radius());
    let hi = (outer + ps).min(window.radius() - ps);
    let ball = BallTemplate::new(window, ps);
    (0..window.ball_end(hi) as u32)
        .into_par_iter()
        .map(|x| {
            let mut central = false;
            let mut met: Vec<(usize, u32)> = Vec::new();
            for h in ball.around(x) {
                if window.norm(h) <= central_radius {
                    central = true;
                    continue;
                }
                for (k, cover) in covers.iter().enumerate() {
                    if let Some(ix) = cover.indices(h) {
                        met.extend(ix.iter().map(|&i| (k, i)));
                    }
                }
            }
            met.sort_unstable();
            met.dedup();
            (met.len() + central as usize, x)
        })
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
        .unwrap_or((0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{parse_spec, standard_generators};

    fn window(spec: &str, r: u32) -> Window {
        let spec = parse_spec(spec).unwrap();
        Window::build(&spec, &standard_generators(&spec), r).unwrap()
    }

    fn names(w: &Window, ids: &[u32]) -> Vec<String> {
        let mut v: Vec<String> = ids.iter().map(|&i| w.name(i).to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn line_cover() {
        let w = window("Z", 12);
        let c = build_annulus_cover(&w, 4, 1, 1).unwrap();
        assert_eq!(names(&w, &c.net.points), ["-8", "8"]);
        assert_eq!(names(&w, &c.sets[0]), ["-10", "-9"]);
        assert_eq!(names(&w, &c.sets[1]), ["10", "9"]);
        let stats = verify_cover(&w, &c, 1, 2, DEFAULT_PAIR_BUDGET).unwrap();
        assert_eq!(stats.max_diameter, 1);
        assert_eq!(stats.max_multiplicity, 1);
        assert!(stats.passed);
    }

    #[test]
    fn free_group_cover() {
        let w = window("F2", 10);
        let c = build_annulus_cover(&w, 3, 1, 2).unwrap();
        assert!(c.net.maximal);
        assert_eq!(c.assignment.len(), c.members.len());
        assert!(c.assignment.iter().all(|ix| !ix.is_empty()));
        for (k, g) in c.members.clone().enumerate() {
            assert!(w.geodesic_ids(g).contains(&c.last_exit[k]));
            assert_eq!(w.norm(c.last_exit[k]), 6);
        }
        let stats = verify_cover(&w, &c, 2, usize::MAX, 0).unwrap();
        assert!(stats.max_diameter <= 16);
    }

    #[test]
    fn refusals() {
        let w = window("C6", 10);
        assert!(matches!(build_annulus_cover(&w, 2, 1, 1), Err(Error::EmptyShell(4))));
        let z = window("Z", 12);
        assert!(build_annulus_cover(&z, 1, 1, 1).is_err());
        assert!(build_annulus_cover(&z, 6, 1, 1).is_err());
        let c = build_annulus_cover(&z, 4, 1, 1).unwrap();
        assert!(verify_cover(&z, &c, 2, 2, 0).is_err());
    }

    #[test]
    fn line_bound() {
        let spec = parse_spec("Z").unwrap();
        let w = asdim_upper_bound(&spec, &standard_generators(&spec), &AsdimParams::default()).unwrap();
        assert_eq!(w.delta_hat, 0);
        assert_eq!(w.n2delta, 2);
        assert_eq!(w.bound, 3);
        assert!(w.cross_multiplicity <= 4);
    }

    #[test]
    fn plane_is_refused() {
        let spec = parse_spec("Z^2").unwrap();
        let err = asdim_upper_bound(&spec, &standard_generators(&spec), &AsdimParams::default()).unwrap_err();
        assert!(matches!(err, Error::NonHyperbolic { .. }));
    }

    #[test]
    fn n_list_must_step_by_ps() {
        let params = AsdimParams {
            n_list: Some(vec![2, 4]),
            ..AsdimParams::default()
        };
        assert!(params.resolved_n_list().is_err());
        assert_eq!(AsdimParams::default().resolved_n_list().unwrap(), [2, 3]);
    }
}
