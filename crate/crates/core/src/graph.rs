//! Breadth-first enumeration of the exchange graph on unlabeled seeds.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{rows_from_json, rows_to_json, JsonInt};
use crate::laurent::LaurentPolynomial;
use crate::matrix::{ExchangeMatrix, IntMatrix};
use crate::par::map_ordered;
use crate::seed::{Seed, SeedKey};

pub const DEFAULT_MAX_NODES: usize = 10_000;
pub const DEFAULT_MAX_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: usize,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: DEFAULT_MAX_NODES, max_depth: DEFAULT_MAX_DEPTH }
    }
}

/// Mutation edge leaving a node's labeled representative.
///
/// `back` is the direction in the target's representative that mutates back.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub target: usize,
    pub back: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub key: SeedKey,
    pub seed: Seed,
    pub depth: usize,
    /// One slot per direction; `None` only when enumeration stopped early.
    pub edges: Vec<Option<Edge>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeGraph {
    rank: usize,
    nodes: Vec<Node>,
    index: HashMap<SeedKey, usize>,
    complete: bool,
}

/// Enumerates seeds reachable from `initial` breadth-first, deduplicated by
/// canonical key.
///
/// Each BFS layer is mutated on `jobs` workers; new nodes are then inserted
/// sequentially in (parent order, direction) order, so the result does not
/// depend on `jobs`. Hitting a bound yields a graph with `complete == false`.
pub fn explore(initial: &Seed, limits: Limits, jobs: usize) -> Result<ExchangeGraph> {
    let n = initial.rank();
    let root = Node { key: initial.canonical_key(), seed: initial.clone(), depth: 0, edges: vec![None; n] };
    let mut graph =
        ExchangeGraph { rank: n, index: HashMap::from([(root.key.clone(), 0)]), nodes: vec![root], complete: true };
    if limits.max_nodes == 0 {
        graph.complete = false;
        return Ok(graph);
    }

    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let depth = graph.nodes[frontier[0]].depth;
        if depth >= limits.max_depth {
            graph.complete = false;
            break;
        }
        let nodes = &graph.nodes;
        let expanded = map_ordered(&frontier, jobs, |&u| {
            (0..n)
                .map(|k| {
                    let s = nodes[u].seed.mutate(k)?;
                    let key = s.canonical_key();
                    Ok((s, key))
                })
                .collect::<Result<Vec<_>>>()
        });

        let mut next = Vec::new();
        for (&u, neighbours) in frontier.iter().zip(expanded) {
            for (k, (s, key)) in neighbours?.into_iter().enumerate() {
                let v = match graph.index.get(&key) {
                    Some(&v) => v,
                    None if graph.nodes.len() >= limits.max_nodes => {
                        graph.complete = false;
                        continue;
                    }
                    None => {
                        let v = graph.nodes.len();
                        graph.index.insert(key.clone(), v);
                        graph.nodes.push(Node { key, seed: s.clone(), depth: depth + 1, edges: vec![None; n] });
                        next.push(v);
                        v
                    }
                };
                let back = graph.nodes[v].seed.position(&s.cluster()[k]).expect("mutated variable is in the target");
                graph.nodes[u].edges[k] = Some(Edge { target: v, back });
            }
        }
        frontier = next;
    }
    Ok(graph)
}

impl ExchangeGraph {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn initial(&self) -> &Seed {
        &self.nodes[0].seed
    }

    pub fn find(&self, key: &SeedKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Number of undirected edges with both endpoints present.
    pub fn edge_count(&self) -> usize {
        self.undirected_edges().count()
    }

    fn undirected_edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.nodes.iter().enumerate().flat_map(|(u, node)| {
            node.edges.iter().enumerate().filter_map(move |(k, e)| e.filter(|e| u < e.target).map(|e| (u, k, e.target)))
        })
    }

    /// Every cluster variable of every node, deduplicated. Only meaningful
    /// for complete graphs.
    pub fn cluster_variables(&self) -> Result<BTreeSet<LaurentPolynomial>> {
        if !self.complete {
            return Err(Error::PartialGraph);
        }
        Ok(self.variables_seen())
    }

    /// Cluster variables of the enumerated nodes, complete or not.
    pub fn variables_seen(&self) -> BTreeSet<LaurentPolynomial> {
        self.nodes.iter().flat_map(|n| n.seed.cluster().iter().cloned()).collect()
    }

    /// Each node has `n` resolved edges and every edge is matched by one back.
    pub fn is_regular_and_symmetric(&self) -> bool {
        self.nodes.iter().enumerate().all(|(u, node)| {
            node.edges.len() == self.rank
                && node.edges.iter().enumerate().all(|(k, e)| match e {
                    Some(e) => self.nodes[e.target].edges[e.back] == Some(Edge { target: u, back: k }),
                    None => false,
                })
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph exchange {\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", node.key);
        }
        for (u, k, v) in self.undirected_edges() {
            let _ = writeln!(out, "  n{u} -- n{v} [label=\"{}\"];", k + 1);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            rank: self.rank,
            complete: self.complete,
            initial: 0,
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, node)| NodeDocument {
                    id,
                    depth: node.depth,
                    path: node.seed.path().iter().map(|k| k + 1).collect(),
                    cluster: node.seed.cluster().iter().map(ToString::to_string).collect(),
                    matrix: rows_to_json(node.seed.matrix().rows()),
                })
                .collect(),
            edges: self
                .nodes
                .iter()
                .enumerate()
                .flat_map(|(u, node)| {
                    node.edges.iter().enumerate().filter_map(move |(k, e)| {
                        e.map(|e| EdgeDocument { source: u, direction: k + 1, target: e.target, back: e.back + 1 })
                    })
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("graph document serializes")
    }

    /// Rebuilds a graph from its JSON export. Seeds are taken as written; no
    /// mutation is replayed, so a tampered document loads as tampered.
    pub fn from_document(doc: &GraphDocument) -> Result<ExchangeGraph> {
        let n = doc.rank;
        let bad = |msg: String| Error::Document(msg);
        let mut nodes = Vec::with_capacity(doc.nodes.len());
        let mut index = HashMap::new();
        for (i, nd) in doc.nodes.iter().enumerate() {
            if nd.id != i {
                return Err(bad(format!("node {i} has id {}", nd.id)));
            }
            let cluster = nd.cluster.iter().map(|s| LaurentPolynomial::parse(s, n)).collect::<Result<Vec<_>>>()?;
            let matrix = ExchangeMatrix::new(IntMatrix::from_rows(rows_from_json(nd.matrix.clone()))?)?;
            let path = nd
                .path
                .iter()
                .map(|&k| k.checked_sub(1).ok_or_else(|| bad("paths are one-based".into())))
                .collect::<Result<Vec<_>>>()?;
            let seed = Seed::from_parts(cluster, matrix, path)?;
            let key = seed.canonical_key();
            if index.insert(key.clone(), i).is_some() {
                return Err(bad(format!("node {i} duplicates an earlier seed")));
            }
            nodes.push(Node { key, seed, depth: nd.depth, edges: vec![None; n] });
        }
        if nodes.is_empty() || doc.initial != 0 {
            return Err(bad("the initial seed must be node 0".into()));
        }
        for e in &doc.edges {
            let (Some(k), Some(back)) = (e.direction.checked_sub(1), e.back.checked_sub(1)) else {
                return Err(bad("directions are one-based".into()));
            };
            if e.source >= nodes.len() || e.target >= nodes.len() || k >= n || back >= n {
                return Err(bad(format!("edge {} -> {} out of range", e.source, e.target)));
            }
            nodes[e.source].edges[k] = Some(Edge { target: e.target, back });
        }
        Ok(ExchangeGraph { rank: n, nodes, index, complete: doc.complete })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub rank: usize,
    pub complete: bool,
    pub initial: usize,
    pub nodes: Vec<NodeDocument>,
    pub edges: Vec<EdgeDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDocument {
    pub id: usize,
    pub depth: usize,
    pub path: Vec<usize>,
    pub cluster: Vec<String>,
    pub matrix: Vec<Vec<JsonInt>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub source: usize,
    pub direction: usize,
    pub target: usize,
    pub back: usize,
}
