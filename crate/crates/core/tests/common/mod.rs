#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Mutex, OnceLock};

use coarse_ends::{parse_spec, standard_generators, Element, GroupSpec, Region, Window};

/// Group families exercised by the property suites.
pub const FAMILIES: &[&str] = &[
    "Z",
    "Z^2",
    "F2",
    "C6",
    "(Z x C2)",
    "(C2 * C3)",
    "(C2 * C2)",
    "(F2 x C3)",
    "(Z^2 * C2)",
];

pub fn spec(text: &str) -> GroupSpec {
    parse_spec(text).unwrap()
}

pub fn window(text: &str, radius: u32) -> Window {
    let spec = spec(text);
    Window::build(&spec, &standard_generators(&spec), radius).unwrap()
}

/// Windows shared across property-test cases.
pub fn cached_window(text: &str, radius: u32) -> &'static Window {
    static CACHE: OnceLock<Mutex<HashMap<(String, u32), &'static Window>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().unwrap();
    cache
        .entry((text.to_string(), radius))
        .or_insert_with(|| Box::leak(Box::new(window(text, radius))))
}

pub fn generators(spec: &GroupSpec) -> Vec<Element> {
    standard_generators(spec).elements().to_vec()
}

/// Product of generators picked by index.
pub fn product(spec: &GroupSpec, gens: &[Element], picks: &[usize]) -> Element {
    picks.iter().fold(spec.identity(), |acc, &i| {
        spec.multiply(&acc, &gens[i % gens.len()]).unwrap()
    })
}

/// Free reduction by a stack.
pub fn reduce_free(word: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for &x in word {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Distances from the identity by breadth-first search on right
/// multiplication, kept apart from the library's window.
pub struct Ball {
    pub radius: u32,
    pub norms: HashMap<Element, u32>,
    pub gens: Vec<Element>,
}

pub fn bfs_ball(spec: &GroupSpec, radius: u32) -> Ball {
    let gens = generators(spec);
    let mut norms = HashMap::new();
    let mut queue = VecDeque::new();
    norms.insert(spec.identity(), 0);
    queue.push_back(spec.identity());
    while let Some(g) = queue.pop_front() {
        let d = norms[&g];
        if d == radius {
            continue;
        }
        for k in &gens {
            let h = spec.multiply(&g, k).unwrap();
            if !norms.contains_key(&h) {
                norms.insert(h.clone(), d + 1);
                queue.push_back(h);
            }
        }
    }
    Ball { radius, norms, gens }
}

impl Ball {
    /// Elements with norm in `lo..=hi`.
    pub fn shell(&self, lo: u32, hi: u32) -> HashSet<Element> {
        self.norms
            .iter()
            .filter(|(_, &n)| lo <= n && n <= hi)
            .map(|(g, _)| g.clone())
            .collect()
    }

    pub fn sphere_size(&self, r: u32) -> usize {
        self.norms.values().filter(|&&n| n == r).count()
    }
}

/// Flood fill of `set` under generator steps; each component with the
/// largest norm it reaches.
pub fn flood_fill(spec: &GroupSpec, ball: &Ball, set: &HashSet<Element>) -> Vec<(HashSet<Element>, u32)> {
    let mut seen: HashSet<Element> = HashSet::new();
    let mut out = Vec::new();
    let mut starts: Vec<&Element> = set.iter().collect();
    starts.sort_by_key(|g| format!("{g:?}"));
    for start in starts {
        if seen.contains(start) {
            continue;
        }
        let mut comp = HashSet::new();
        let mut far = 0;
        let mut stack = vec![start.clone()];
        seen.insert(start.clone());
        while let Some(g) = stack.pop() {
            far = far.max(ball.norms[&g]);
            for k in &ball.gens {
                let h = spec.multiply(&g, k).unwrap();
                if set.contains(&h) && seen.insert(h.clone()) {
                    stack.push(h);
                }
            }
            comp.insert(g);
        }
        out.push((comp, far));
    }
    out
}

/// Outer components of the shell `r <= |g| <= R - 1`.
pub fn outer_component_count(spec: &GroupSpec, r: u32, radius: u32) -> usize {
    let ball = bfs_ball(spec, radius);
    let shell = ball.shell(r, radius - 1);
    flood_fill(spec, &ball, &shell)
        .iter()
        .filter(|(_, far)| *far == radius - 1)
        .count()
}

/// `A·B⁻¹·B` by scanning translates, restricted to the window.
pub fn star_oracle(window: &Window, a: &Region, b: &[Element]) -> HashSet<Element> {
    let spec = window.spec();
    let mut out = HashSet::new();
    for id in a.iter() {
        let x = window.element(id);
        for b1 in b {
            let g = spec.multiply(x, &spec.invert(b1).unwrap()).unwrap();
            for b2 in b {
                let h = spec.multiply(&g, b2).unwrap();
                if window.id(&h).is_some() {
                    out.insert(h);
                }
            }
        }
    }
    out
}

/// `A·B`, restricted to the window.
pub fn product_set(window: &Window, a: &Region, b: &[Element]) -> HashSet<Element> {
    let spec = window.spec();
    a.iter()
        .flat_map(|id| b.iter().map(move |k| spec.multiply(window.element(id), k).unwrap()))
        .filter(|h| window.id(h).is_some())
        .collect()
}

/// Fewest intervals of length `2s + 1` covering `[-(s + t), s + t]`.
pub fn line_cover_count(s: u32, t: u32) -> usize {
    let len = 2 * (s + t) + 1;
    len.div_ceil(2 * s + 1) as usize
}

pub fn int(g: &Element) -> i64 {
    match g {
        Element::Lattice(v) => v[0],
        other => panic!("not an integer: {other:?}"),
    }
}
