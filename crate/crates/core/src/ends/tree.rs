use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{components, ComponentDecomposition};
use crate::cayley::{FreshWindows, WindowProvider};
use crate::error::{Error, Result};
use crate::group::{GeneratorSet, GroupSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub id: usize,
    pub size: usize,
    pub outer: bool,
    /// Index of the containing component one level up.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeLevel {
    pub r: u32,
    pub components: Vec<TreeNode>,
}

impl TreeLevel {
    pub fn outer(&self) -> impl Iterator<Item = &TreeNode> {
        self.components.iter().filter(|c| c.outer)
    }
}

/// Containment tree of the components of `window \ B(r)` across radii.
/// Nodes are the outer components; inner ones are kept for reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndTree {
    pub window_radius: u32,
    pub levels: Vec<TreeLevel>,
}

impl EndTree {
    /// Outer component count per level.
    pub fn widths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.outer().count()).collect()
    }

    /// Number of outer children of every outer node, level by level.
    pub fn branching(&self) -> Vec<Vec<usize>> {
        self.levels
            .windows(2)
            .map(|pair| {
                pair[0]
                    .components
                    .iter()
                    .filter(|c| c.outer)
                    .map(|c| pair[1].outer().filter(|d| d.parent == Some(c.id)).count())
                    .collect()
            })
            .collect()
    }

    /// Graphviz rendering; node labels are `r:index:size`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph ends {\n  rankdir=TB;\n  node [shape=box];\n");
        for level in &self.levels {
            for node in level.outer() {
                let label = format!("{}:{}:{}", level.r, node.id, node.size);
                writeln!(out, "  \"{label}\";").unwrap();
            }
        }
        for pair in self.levels.windows(2) {
            for node in pair[1].outer() {
                if let Some(p) = node.parent {
                    let parent = &pair[0].components[p];
                    writeln!(
                        out,
                        "  \"{}:{}:{}\" -> \"{}:{}:{}\";",
                        pair[0].r, parent.id, parent.size, pair[1].r, node.id, node.size
                    )
                    .unwrap();
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn component_tree(
    spec: &GroupSpec,
    generators: &GeneratorSet,
    r_min: u32,
    r_max: u32,
    radius: u32,
) -> Result<EndTree> {
    component_tree_with(&FreshWindows::default(), spec, generators, r_min, r_max, radius)
}

pub fn component_tree_with(
    provider: &dyn WindowProvider,
    spec: &GroupSpec,
    generators: &GeneratorSet,
    r_min: u32,
    r_max: u32,
    radius: u32,
) -> Result<EndTree> {
    if r_min > r_max {
        return Err(Error::Precondition("r_min exceeds r_max".into()));
    }
    if r_max >= radius {
        return Err(Error::WindowTooSmall {
            window: radius,
            needed: r_max + 1,
        });
    }
    let window = provider.window(spec, generators, radius)?;
    let decompositions: Vec<ComponentDecomposition> = (r_min..=r_max)
        .into_par_iter()
        .map(|r| components(&window, r, generators))
        .collect::<Result<_>>()?;

    let mut levels = Vec::with_capacity(decompositions.len());
    for (i, d) in decompositions.iter().enumerate() {
        let above = i.checked_sub(1).map(|j| &decompositions[j]);
        let nodes = d
            .components
            .iter()
            .enumerate()
            .map(|(id, c)| TreeNode {
                id,
                size: c.size(),
                outer: c.outer,
                parent: above.map(|a| {
                    a.label(c.members[0])
                        .expect("a component of a smaller complement contains it")
                }),
            })
            .collect();
        levels.push(TreeLevel {
            r: d.base_radius,
            components: nodes,
        });
    }
    Ok(EndTree {
        window_radius: radius,
        levels,
    })
}
