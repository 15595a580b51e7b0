//! Breadth-first enumeration of the `SL(2, ℤ)`-orbit of an origami and the
//! monodromy it carries.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::matrix::IntMatrix;
use crate::homology::{homology, HomologyData};
use crate::origami::{stratum, Origami};

use super::cylinders::{multitwist_matrix, Direction};
use super::moves::{act_with, CocycleMatrix, Move};

pub const GENERATOR_CAVEAT: &str = "generators: possibly proper subgroup of the monodromy image";

#[derive(Debug, Clone)]
pub struct OrbitNode {
    pub origami: Origami,
    pub homology: HomologyData,
    pub depth: usize,
    /// Cocycle along the spanning-tree path from the base node.
    pub path: CocycleMatrix,
}

#[derive(Debug, Clone)]
pub struct OrbitEdge {
    pub from: usize,
    pub to: usize,
    pub mv: Move,
    pub cocycle: CocycleMatrix,
    pub tree: bool,
}

#[derive(Debug, Clone)]
pub struct OrbitOptions {
    pub max_nodes: usize,
    pub max_depth: Option<usize>,
    /// Order in which moves are tried at every node.
    pub moves: Vec<Move>,
    /// Collect conjugated multitwists at every node.
    pub multitwists: bool,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions { max_nodes: 5000, max_depth: None, moves: vec![Move::T, Move::S], multitwists: true }
    }
}

#[derive(Debug, Clone)]
pub struct OrbitGraph {
    pub nodes: Vec<OrbitNode>,
    pub edges: Vec<OrbitEdge>,
    /// Loops based at node 0, in base-node coordinates.
    pub monodromy_generators: Vec<CocycleMatrix>,
    /// False when a depth limit cut the search short.
    pub complete: bool,
    pub caveats: Vec<String>,
    index: HashMap<(usize, Move), usize>,
    reverse: HashMap<(usize, Move), usize>,
}

pub fn veech_orbit(o: &Origami, max_nodes: usize) -> Result<OrbitGraph> {
    veech_orbit_with(o, &OrbitOptions { max_nodes, ..OrbitOptions::default() })
}

pub fn veech_orbit_with(o: &Origami, opts: &OrbitOptions) -> Result<OrbitGraph> {
    let (base, _) = o.canonical();
    let base_hd = homology(&base)?;
    let (r, a) = (base_hd.rel_rank, base_hd.abs_rank);
    let mut nodes = vec![OrbitNode { origami: base.clone(), homology: base_hd, depth: 0, path: CocycleMatrix::identity(r, a) }];
    let mut seen: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
    seen.insert(base.key(), 0);
    let mut edges = Vec::new();
    let mut complete = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        if opts.max_depth.is_some_and(|d| nodes[x].depth >= d) {
            complete = false;
            continue;
        }
        for &mv in &opts.moves {
            let res = act_with(&nodes[x].origami, &nodes[x].homology, mv)?;
            let key = res.target.key();
            let (to, tree) = match seen.get(&key) {
                Some(&y) => (y, false),
                None => {
                    if nodes.len() >= opts.max_nodes {
                        return Err(Error::OrbitTooLarge { max_nodes: opts.max_nodes });
                    }
                    let y = nodes.len();
                    seen.insert(key, y);
                    let path = nodes[x].path.then(&res.cocycle);
                    nodes.push(OrbitNode { origami: res.target, homology: res.target_homology, depth: nodes[x].depth + 1, path });
                    queue.push_back(y);
                    (y, true)
                }
            };
            edges.push(OrbitEdge { from: x, to, mv, cocycle: res.cocycle, tree });
        }
    }

    let mut generators = Vec::new();
    let mut inverses: Vec<Option<CocycleMatrix>> = vec![None; nodes.len()];
    let mut inverse_path = |y: usize, nodes: &[OrbitNode]| -> Result<CocycleMatrix> {
        if inverses[y].is_none() {
            inverses[y] = Some(nodes[y].path.inverse()?);
        }
        Ok(inverses[y].clone().unwrap())
    };
    for e in edges.iter().filter(|e| !e.tree) {
        let back = inverse_path(e.to, &nodes)?;
        generators.push(nodes[e.from].path.then(&e.cocycle).then(&back));
    }
    if opts.multitwists {
        for x in 0..nodes.len() {
            let back = inverse_path(x, &nodes)?;
            for dir in [Direction::Horizontal, Direction::Vertical] {
                let mt = multitwist_matrix(&nodes[x].origami, &nodes[x].homology, dir)?;
                generators.push(nodes[x].path.then(&mt).then(&back));
            }
        }
    }
    let index = edges.iter().enumerate().map(|(k, e)| ((e.from, e.mv), k)).collect();
    let reverse = edges.iter().enumerate().map(|(k, e)| ((e.to, e.mv), k)).collect();
    let mut caveats = vec![GENERATOR_CAVEAT.to_string()];
    if !complete {
        caveats.push("orbit truncated by depth limit; loops through unexplored nodes are missing".to_string());
    }
    Ok(OrbitGraph { nodes, edges, monodromy_generators: generators, complete, caveats, index, reverse })
}

impl OrbitGraph {
    pub fn base(&self) -> &OrbitNode {
        &self.nodes[0]
    }

    pub fn base_homology(&self) -> &HomologyData {
        &self.nodes[0].homology
    }

    pub fn edge(&self, node: usize, mv: Move) -> Option<&OrbitEdge> {
        self.index.get(&(node, mv)).map(|&k| &self.edges[k])
    }

    /// The inverse move from `node`: the source of the `mv`-edge ending at
    /// `node`, with the inverse cocycle.
    pub fn inverse_step(&self, node: usize, mv: Move) -> Option<(usize, CocycleMatrix)> {
        let &k = self.reverse.get(&(node, mv))?;
        let e = &self.edges[k];
        let inv = e.cocycle.inverse().ok()?;
        Some((e.from, inv))
    }

    /// Every cocycle matrix held by the graph: edges, tree paths and
    /// generators.
    pub fn all_matrices(&self) -> impl Iterator<Item = &CocycleMatrix> {
        self.edges.iter().map(|e| &e.cocycle).chain(self.nodes.iter().map(|n| &n.path)).chain(self.monodromy_generators.iter())
    }

    /// Absolute blocks of the monodromy generators.
    pub fn abs_generators(&self) -> Vec<IntMatrix> {
        self.monodromy_generators.iter().map(|g| g.abs_block.clone()).collect()
    }

    pub fn to_json(&self) -> Result<OrbitGraphJson> {
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(k, n)| {
                let st = stratum(&n.origami);
                let j = n.origami.to_json();
                OrbitNodeJson { index: k, depth: n.depth, h: j.h, v: j.v, kappa: st.kappa }
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| OrbitEdgeJson { from: e.from, to: e.to, label: e.mv.letter().to_string(), tree: e.tree })
            .collect();
        let generators = self
            .monodromy_generators
            .iter()
            .map(|g| {
                Ok(GeneratorJson {
                    word: g.word.clone(),
                    abs_block: checked_rows(&g.abs_block)?,
                    rel_block: checked_rows(&g.rel_block)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(OrbitGraphJson { n_nodes: self.nodes.len(), complete: self.complete, nodes, edges, generators, caveats: self.caveats.clone() })
    }
}

pub(crate) fn checked_rows(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    m.to_i64_rows().ok_or_else(|| Error::Internal("matrix entry exceeds 64 bits".into()))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OrbitNodeJson {
    pub index: usize,
    pub depth: usize,
    pub h: Vec<i64>,
    pub v: Vec<i64>,
    pub kappa: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OrbitEdgeJson {
    pub from: usize,
    pub to: usize,
    pub label: String,
    pub tree: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GeneratorJson {
    pub word: String,
    pub abs_block: Vec<Vec<i64>>,
    pub rel_block: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OrbitGraphJson {
    pub n_nodes: usize,
    pub complete: bool,
    pub nodes: Vec<OrbitNodeJson>,
    pub edges: Vec<OrbitEdgeJson>,
    pub generators: Vec<GeneratorJson>,
    pub caveats: Vec<String>,
}
