//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use coarse_ends::asdim::exact_covering_number;
use coarse_ends::covers::clopen_intersection_law;
use coarse_ends::ends::k4_component_bound;
use coarse_ends::{
    asdim_upper_bound, clopen_scale_test, component_tree, components, covering_number, end_count, estimate_delta,
    growth_series, interface, power_generators, standard_generators, star, AsdimParams, Element, EndParams, Error,
    Region, ScaleSet, Verdict, Window,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    cached_window, flood_fill, int, line_cover_count, outer_component_count, product_set, reduce_free, spec,
    star_oracle, window, FAMILIES,
};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;
type Selector = fn(&Element) -> bool;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn verdicts() -> Outcome {
    let cases = [
        ("Z", Verdict::Two),
        ("(Z x C2)", Verdict::Two),
        ("(C2 * C2)", Verdict::Two),
        ("Z^2", Verdict::One),
        ("F2", Verdict::Infinite),
        ("(C2 * C3)", Verdict::Infinite),
        ("C6", Verdict::Zero),
    ];
    let mut slowest = Duration::ZERO;
    for (text, expected) in cases {
        let g = spec(text);
        let (v, took) = timed(|| end_count(&g, &standard_generators(&g), &EndParams::default()));
        let v = v.map_err(|e| format!("{text}: {e}"))?;
        ensure!(
            v.verdict == expected,
            "{text}: got {:?}, expected {expected:?}",
            v.verdict
        );
        ensure!(!v.evidence.anomaly, "{text}: stable count of three or more");
        ensure!(took < Duration::from_secs(30), "{text}: took {took:?}");
        slowest = slowest.max(took);
    }
    Ok(format!("7 verdicts exact, slowest {slowest:.2?}"))
}

fn component_counts() -> Outcome {
    let check = |text: &str, r: u32, expected: usize| -> Result<(), String> {
        let radius = 2 * r + 4;
        let w = window(text, radius);
        let got = components(&w, r, w.generators())
            .map_err(|e| e.to_string())?
            .outer_count();
        let oracle = outer_component_count(&spec(text), r, radius);
        ensure!(
            got == expected && oracle == expected,
            "{text} r = {r}: library {got}, flood fill {oracle}, expected {expected}"
        );
        Ok(())
    };
    for r in 1..=4 {
        check("F2", r, 4 * 3usize.pow(r - 1))?;
    }
    for r in 1..=6 {
        check("Z", r, 2)?;
        check("Z^2", r, 1)?;
    }
    Ok("F2 4·3^(r-1) for r = 1..4, Z 2 and Z^2 1 for r = 1..6, all equal to flood fill".into())
}

fn tree_laws() -> Outcome {
    let g = spec("F2");
    let tree = component_tree(&g, &standard_generators(&g), 1, 4, 12).map_err(|e| e.to_string())?;
    ensure!(tree.widths() == [4, 12, 36, 108], "widths {:?}", tree.widths());
    for pair in tree.levels.windows(2) {
        for node in pair[1].outer() {
            let p = node.parent.ok_or(format!("orphan at r = {}", pair[1].r))?;
            ensure!(
                pair[0].components[p].outer,
                "parent of a level-{} node is inner",
                pair[1].r
            );
        }
    }
    ensure!(
        tree.branching().iter().all(|level| level.iter().all(|&b| b == 3)),
        "branching {:?}",
        tree.branching()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..1000 {
        let text = FAMILIES[rng.gen_range(0..FAMILIES.len())];
        let radius = rng.gen_range(4..=7);
        let r = rng.gen_range(0..radius);
        let w = cached_window(text, radius);
        let d = components(w, r, w.generators()).map_err(|e| e.to_string())?;
        let mut seen = HashSet::new();
        for c in &d.components {
            for &id in &c.members {
                ensure!(seen.insert(id), "case {case} {text}: {} twice", w.name(id));
            }
        }
        let shell: HashSet<u32> = (0..w.len() as u32)
            .filter(|&id| r <= w.norm(id) && w.norm(id) < radius)
            .collect();
        ensure!(seen == shell, "case {case} {text} r = {r}: not a partition");
        for &x in &shell {
            for y in w.neighbors(x) {
                ensure!(
                    !shell.contains(&y) || d.label(x) == d.label(y),
                    "case {case} {text} r = {r}: edge {} {} crosses",
                    w.name(x),
                    w.name(y)
                );
            }
        }
    }
    Ok("single parents, F2 widths 4/12/36/108 with branching 3, 1000 random partitions".into())
}

fn random_region(w: &Window, rng: &mut ChaCha8Rng) -> Region {
    let density = rng.gen_range(0.1..0.9);
    Region::from_predicate(w, |_, _| rng.gen_bool(density))
}

fn clopen_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for text in ["Z", "Z^2", "F2", "(C2 * C3)"] {
        let w = cached_window(text, 6);
        for case in 0..1000 {
            let t = 1 + case % 2;
            let core = 6 - 2 * t;
            let (a1, a2) = (random_region(w, &mut rng), random_region(w, &mut rng));
            let scale = ScaleSet::ball(w, t).map_err(|e| e.to_string())?;
            let law = clopen_intersection_law(&a1, &a2, &scale, w, core).map_err(|e| e.to_string())?;
            ensure!(law, "{text} case {case}: intersection law fails");
            if case < 100 {
                // Same inclusion, from stars computed by the translate oracle.
                let b: Vec<Element> = (0..w.ball_end(t) as u32).map(|id| w.element(id).clone()).collect();
                let iface = |a: &Region| -> HashSet<Element> {
                    let s1 = star_oracle(w, a, &b);
                    let s2 = star_oracle(w, &a.complement(), &b);
                    s1.intersection(&s2)
                        .filter(|g| w.knorm(g).unwrap() <= core)
                        .cloned()
                        .collect()
                };
                let both = iface(&a1.intersection(&a2));
                let either: HashSet<Element> = iface(&a1).union(&iface(&a2)).cloned().collect();
                ensure!(both.is_subset(&either), "{text} case {case}: oracle inclusion fails");
                let lib = interface(&a1, &scale, w, core).map_err(|e| e.to_string())?;
                ensure!(
                    lib.set.to_elements(w) == iface(&a1),
                    "{text} case {case}: interface differs from oracle"
                );

                let s = star(&a1, &scale, w).set.to_elements(w);
                let in_core = |set: &HashSet<Element>| -> HashSet<Element> {
                    set.iter().filter(|g| w.knorm(g).unwrap() <= core).cloned().collect()
                };
                ensure!(
                    in_core(&s) == in_core(&star_oracle(w, &a1, &b)),
                    "{text} case {case}: star differs from A·B⁻¹·B"
                );
                ensure!(
                    in_core(&product_set(w, &a1, &b)).is_subset(&in_core(&s)),
                    "{text} case {case}: A·B not inside the star"
                );
            }
        }
    }

    let w = window("Z", 20);
    let half = |g: &Element| int(g) >= 1;
    let cert = clopen_scale_test(&half, &w, 4).map_err(|e| e.to_string())?;
    for row in &cert.rows {
        ensure!(
            row.rho == 2 * row.scale_t as i64,
            "half-line rho({}) = {}",
            row.scale_t,
            row.rho
        );
    }
    ensure!(cert.clopen_consistent, "half-line certificate rejected");
    let evens = |g: &Element| int(g) % 2 == 0;
    let cert = clopen_scale_test(&evens, &w, 4).map_err(|e| e.to_string())?;
    ensure!(!cert.clopen_consistent, "evens accepted");
    Ok("4x1000 intersection cases, star sandwich equal to oracle, half-line rho = 2t, evens rejected".into())
}

fn k4_bound() -> Outcome {
    let (result, took) = timed(|| -> Result<usize, String> {
        let mut cases = 0;
        for text in ["Z", "F2", "(C2 * C3)"] {
            let g = spec(text);
            let w = window(text, 8);
            let k4 = power_generators(&g, &standard_generators(&g), 4).map_err(|e| e.to_string())?;
            let ball = common::bfs_ball(&g, 8);
            for r in 1..=3 {
                let l = Region::ball(&w, r);
                let bound = k4_component_bound(&w, &l).map_err(|e| e.to_string())?;
                ensure!(bound.holds(), "{text} L = B({r}): {} > {}", bound.observed, bound.bound);

                // Flood fill with K⁴ steps over the oracle ball.
                let rest = ball.shell(r + 1, 8);
                let steps = common::Ball {
                    radius: 8,
                    norms: ball.norms.clone(),
                    gens: k4.elements().to_vec(),
                };
                let outer = flood_fill(&g, &steps, &rest)
                    .iter()
                    .filter(|(_, far)| *far == 8)
                    .count();
                ensure!(
                    outer == bound.observed,
                    "{text} r = {r}: library {} vs oracle {outer}",
                    bound.observed
                );
                cases += 1;
            }
        }
        Ok(cases)
    });
    let cases = result?;
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!("{cases} cases within the covering bound in {took:.2?}"))
}

fn free_distance(a: &Element, b: &Element) -> u32 {
    match (a, b) {
        (Element::Word(x), Element::Word(y)) => {
            let mut w: Vec<i32> = x.iter().rev().map(|l| -l).collect();
            w.extend_from_slice(y);
            reduce_free(&w).len() as u32
        }
        _ => unreachable!(),
    }
}

fn asdim_witness() -> Outcome {
    let z = spec("Z");
    let wz = asdim_upper_bound(&z, &standard_generators(&z), &AsdimParams::default()).map_err(|e| e.to_string())?;
    ensure!(
        wz.n2delta == 2 && wz.bound == 3,
        "Z: N = {}, bound = {}",
        wz.n2delta,
        wz.bound
    );

    let f2 = spec("F2");
    let (wf, took) = timed(|| asdim_upper_bound(&f2, &standard_generators(&f2), &AsdimParams::default()));
    let wf = wf.map_err(|e| e.to_string())?;
    ensure!(wf.window_radius <= 14, "F2 window {}", wf.window_radius);
    ensure!(took < Duration::from_secs(120), "F2 took {took:?}");
    for w in [&wz, &wf] {
        let ps = w.p * w.s;
        ensure!(w.bound == 2 * w.n2delta - 1, "bound is not 2N - 1");
        ensure!(
            w.cross_multiplicity <= 2 * w.n2delta,
            "cross multiplicity {}",
            w.cross_multiplicity
        );
        for a in &w.annuli {
            ensure!(a.max_diameter <= 8 * ps, "n = {}: diameter {}", a.n, a.max_diameter);
            ensure!(a.diameter_exact, "n = {}: diameter not measured exactly", a.n);
            ensure!(
                a.max_multiplicity <= w.n2delta,
                "n = {}: multiplicity {}",
                a.n,
                a.max_multiplicity
            );
        }
    }

    // Diameters of the free-group sets, measured by word reduction.
    let win = window("F2", wf.window_radius);
    for &n in &[2u32, 3] {
        let cover = coarse_ends::build_annulus_cover(&win, n, 1, 1).map_err(|e| e.to_string())?;
        for set in &cover.sets {
            for &g in set {
                for &h in set {
                    let d = free_distance(win.element(g), win.element(h));
                    ensure!(d <= 8, "F2 n = {n}: {} to {} is {d}", win.name(g), win.name(h));
                }
            }
        }
    }
    Ok(format!(
        "Z N = 2 bound 3; F2 N = {} bound {} cross {} in {took:.2?}",
        wf.n2delta, wf.bound, wf.cross_multiplicity
    ))
}

fn hyperbolicity_diagnostic() -> Outcome {
    let est = |text: &str, r: u32| estimate_delta(&window(text, r), u64::MAX, 0).delta_hat;
    let plane: Vec<u32> = [4, 6, 8].iter().map(|&r| est("Z^2", r)).collect();
    ensure!(plane[0] < plane[1] && plane[1] < plane[2], "Z^2 estimates {plane:?}");
    ensure!(est("Z", 8) == 0, "Z estimate is not 0");
    ensure!(est("F2", 6) == 0, "F2 estimate is not 0");
    let g = spec("Z^2");
    let err = asdim_upper_bound(&g, &standard_generators(&g), &AsdimParams::default()).unwrap_err();
    ensure!(matches!(err, Error::NonHyperbolic { .. }), "Z^2 refusal: {err}");
    ensure!(err.exit_code() == 4, "Z^2 exit code {}", err.exit_code());
    Ok(format!(
        "Z^2 estimates {plane:?}, Z and F2 zero, Z^2 refused with exit code 4"
    ))
}

fn growth_covering() -> Outcome {
    let z = window("Z", 12);
    let n = covering_number(&z, 5, 4).map_err(|e| e.to_string())?;
    ensure!(n == 2 && line_cover_count(5, 4) == 2, "Z covering number {n}");
    let f2 = window("F2", 7);
    let values: Vec<usize> = (3..=5).map(|s| covering_number(&f2, s, 2).unwrap()).collect();
    ensure!(
        values.iter().all(|&v| v == values[0] && v <= 13),
        "F2 values {values:?}"
    );
    let mut instances = 0;
    for text in FAMILIES {
        // Largest radius whose ball has at most 18 elements, capped for finite groups.
        let mut m = 0;
        while m < 12 && window(text, m + 1).ball_end(m + 1) <= 18 {
            m += 1;
        }
        let w = window(text, m);
        for s in 1..=m {
            for t in 0..=m - s {
                let exact = exact_covering_number(&w, s, t, 18).map_err(|e| e.to_string())?.unwrap();
                let greedy = covering_number(&w, s, t).map_err(|e| e.to_string())?;
                ensure!(
                    greedy >= exact,
                    "{text} S = {s} t = {t}: greedy {greedy} < exact {exact}"
                );
                instances += 1;
            }
        }
    }
    let growth = growth_series(&window("Z^2", 6), 6).map_err(|e| e.to_string())?;
    ensure!(
        (1..=6).all(|r| growth.spheres[r] == 4 * r),
        "Z^2 spheres {:?}",
        growth.spheres
    );
    Ok(format!(
        "Z N(5,4) = 2, F2 N(S,2) = {} for S = 3..5, greedy >= exact on {instances} instances",
        values[0]
    ))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap()
}

fn run_all_commands() -> Vec<String> {
    let f2 = spec("F2");
    let z = spec("Z");
    let kf = standard_generators(&f2);
    let kz = standard_generators(&z);
    let half = |g: &Element| int(g) >= 1;
    vec![
        json(&end_count(&f2, &kf, &EndParams::default()).unwrap()),
        json(&end_count(&z, &kz, &EndParams::default()).unwrap()),
        json(&component_tree(&f2, &kf, 1, 3, 8).unwrap()),
        json(&clopen_scale_test(&half, &window("Z", 12), 4).unwrap()),
        json(
            &growth_series(&window("F2", 7), 7)
                .unwrap()
                .with_coverings(&window("F2", 7), &[2], &[3, 4, 5])
                .unwrap(),
        ),
        json(&asdim_upper_bound(&z, &kz, &AsdimParams::default()).unwrap()),
        json(&asdim_upper_bound(&f2, &kf, &AsdimParams::default()).unwrap()),
        json(&estimate_delta(&window("Z^2", 8), 5000, 7)),
    ]
}

fn determinism() -> Outcome {
    let pool = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let single = pool(1).install(run_all_commands);
    let again = pool(1).install(run_all_commands);
    let many = pool(8).install(run_all_commands);
    ensure!(single == again, "repeat runs differ");
    ensure!(single == many, "one thread and eight threads differ");
    Ok(format!(
        "{} outputs identical across repeats and 1 vs 8 threads",
        single.len()
    ))
}

fn window_stability() -> Outcome {
    for text in ["Z", "(Z x C2)", "(C2 * C2)", "Z^2", "C6"] {
        let g = spec(text);
        let k = standard_generators(&g);
        let base = EndParams::default();
        let enlarged = EndParams {
            window: Some(base.window_radius() + 4),
            ..base
        };
        let a = end_count(&g, &k, &base).map_err(|e| e.to_string())?.verdict;
        let b = end_count(&g, &k, &enlarged).map_err(|e| e.to_string())?.verdict;
        ensure!(a == b, "{text}: {a:?} became {b:?}");
    }
    // Windows of radius above 4·t_max, so the core can hold an interface of radius 2t.
    let halves: [(&str, Selector, u32, u32); 3] = [
        ("Z", |g| int(g) >= 1, 3, 13),
        ("Z", |g| int(g) % 2 == 0, 3, 13),
        ("F2", |g| matches!(g, Element::Word(v) if v.first() == Some(&1)), 1, 5),
    ];
    for (text, select, t_max, radius) in halves {
        let small = window(text, radius);
        let large = window(text, radius + 4);
        let a = clopen_scale_test(&select, &small, t_max).map_err(|e| e.to_string())?;
        let b = clopen_scale_test(&select, &large, t_max).map_err(|e| e.to_string())?;
        ensure!(a.clopen_consistent == b.clopen_consistent, "{text}: verdict changed");
        for (x, y) in a.rows.iter().zip(&b.rows) {
            ensure!(x.verdict == y.verdict, "{text} t = {}: row verdict changed", x.scale_t);
            if a.clopen_consistent {
                ensure!(
                    x.rho == y.rho,
                    "{text} t = {}: rho {} became {}",
                    x.scale_t,
                    x.rho,
                    y.rho
                );
            } else {
                ensure!(
                    x.rho == x.core_radius as i64 && y.rho == y.core_radius as i64,
                    "{text} t = {}: rejected set does not saturate the core",
                    x.scale_t
                );
            }
        }
    }
    Ok("verdicts and certificates unchanged at R + 4".into())
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("end verdicts", verdicts),
        ("component counts", component_counts),
        ("end-tree laws", tree_laws),
        ("clopen algebra", clopen_algebra),
        ("K4-component bound", k4_bound),
        ("annulus-cover witness", asdim_witness),
        ("non-hyperbolicity diagnostic", hyperbolicity_diagnostic),
        ("growth and covering", growth_covering),
        ("determinism", determinism),
        ("window stability", window_stability),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (outcome, took) = timed(check);
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
