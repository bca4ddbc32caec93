//! Causal DAGs over observed and latent binary variables.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{CiRelation, CiSet, DistError, JointDistribution};

/// Row-sum tolerance for conditional probability tables.
pub const CPT_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("edge {0} -> {1} would close a directed cycle")]
    Cycle(String, String),
    #[error("query sets must be disjoint: {0}")]
    Overlap(String),
    #[error("relation mentions `{0}`, which is not an observed node")]
    NameMismatch(String),
    #[error("missing or malformed CPT for `{0}`: {1}")]
    Cpt(String, String),
    #[error(transparent)]
    Distribution(#[from] DistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Observed,
    Latent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
}

/// A DAG whose acyclicity is enforced on every insertion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CausalGraph {
    nodes: Vec<Node>,
    edges: BTreeSet<(usize, usize)>,
}

impl CausalGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Observed nodes only, in the given order.
    pub fn with_observed(names: &[&str]) -> Result<Self, GraphError> {
        let mut g = Self::new();
        for n in names {
            g.add_node(n, NodeKind::Observed)?;
        }
        Ok(g)
    }

    pub fn add_node(&mut self, name: &str, kind: NodeKind) -> Result<usize, GraphError> {
        if self.index_of(name).is_some() {
            return Err(GraphError::DuplicateNode(name.to_string()));
        }
        self.nodes.push(Node { name: name.to_string(), kind });
        Ok(self.nodes.len() - 1)
    }

    pub fn ensure_node(&mut self, name: &str, kind: NodeKind) -> usize {
        match self.index_of(name) {
            Some(i) => i,
            None => {
                self.nodes.push(Node { name: name.to_string(), kind });
                self.nodes.len() - 1
            }
        }
    }

    pub fn add_edge(&mut self, from: &str, to: &str) -> Result<(), GraphError> {
        let f = self.require(from)?;
        let t = self.require(to)?;
        if f == t {
            return Err(GraphError::SelfLoop(from.to_string()));
        }
        if self.edges.contains(&(f, t)) {
            return Err(GraphError::DuplicateEdge(from.to_string(), to.to_string()));
        }
        if self.reaches(t, f) {
            return Err(GraphError::Cycle(from.to_string(), to.to_string()));
        }
        self.edges.insert((f, t));
        Ok(())
    }

    /// Builds a graph from node and edge lists, validating everything.
    pub fn from_parts(nodes: &[(&str, NodeKind)], edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let mut g = Self::new();
        for (n, k) in nodes {
            g.add_node(n, *k)?;
        }
        for (f, t) in edges {
            g.add_edge(f, t)?;
        }
        Ok(g)
    }

    fn reaches(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            if std::mem::replace(&mut seen[u], true) {
                continue;
            }
            stack.extend(self.children(u));
        }
        false
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    fn require(&self, name: &str) -> Result<usize, GraphError> {
        self.index_of(name).ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn name(&self, i: usize) -> &str {
        &self.nodes[i].name
    }

    pub fn kind(&self, name: &str) -> Option<NodeKind> {
        self.index_of(name).map(|i| self.nodes[i].kind)
    }

    pub fn observed(&self) -> Vec<&str> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Observed).map(|n| n.name.as_str()).collect()
    }

    pub fn latents(&self) -> Vec<&str> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Latent).map(|n| n.name.as_str()).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(from, to)` names in insertion-independent order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges.iter().map(|&(f, t)| (self.name(f), self.name(t)))
    }

    pub fn edge_set(&self) -> BTreeSet<(String, String)> {
        self.edges().map(|(f, t)| (f.to_string(), t.to_string())).collect()
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(f), Some(t)) => self.edges.contains(&(f, t)),
            _ => false,
        }
    }

    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    fn parents(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.1 == v).map(|e| e.0)
    }

    fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((v, 0)..(v + 1, 0)).map(|e| e.1)
    }

    pub fn parents_of(&self, name: &str) -> Vec<&str> {
        match self.index_of(name) {
            Some(v) => self.parents(v).map(|p| self.name(p)).collect(),
            None => Vec::new(),
        }
    }

    pub fn children_of(&self, name: &str) -> Vec<&str> {
        match self.index_of(name) {
            Some(v) => self.children(v).map(|c| self.name(c)).collect(),
            None => Vec::new(),
        }
    }

    /// Set-valued d-separation via reachability ("Bayes ball").
    pub fn d_separated_sets(&self, xs: &[&str], ys: &[&str], given: &[&str]) -> Result<bool, GraphError> {
        let xs: Vec<usize> = xs.iter().map(|n| self.require(n)).collect::<Result<_, _>>()?;
        let ys: Vec<usize> = ys.iter().map(|n| self.require(n)).collect::<Result<_, _>>()?;
        let zs: Vec<usize> = given.iter().map(|n| self.require(n)).collect::<Result<_, _>>()?;
        let n = self.nodes.len();
        let mut role = vec![0u8; n];
        for (set, tag) in [(&xs, 1u8), (&ys, 2), (&zs, 4)] {
            for &v in set {
                if role[v] != 0 && role[v] != tag {
                    return Err(GraphError::Overlap(self.name(v).to_string()));
                }
                role[v] = tag;
            }
        }
        let in_z: Vec<bool> = role.iter().map(|r| *r == 4).collect();

        // Ancestors of the conditioning set, inclusive.
        let mut anc = vec![false; n];
        let mut stack = zs.clone();
        while let Some(u) = stack.pop() {
            if std::mem::replace(&mut anc[u], true) {
                continue;
            }
            stack.extend(self.parents(u));
        }

        // (node, arrived_from_child)
        let mut seen = vec![[false; 2]; n];
        let mut queue: VecDeque<(usize, bool)> = xs.iter().map(|&x| (x, true)).collect();
        while let Some((v, up)) = queue.pop_front() {
            if std::mem::replace(&mut seen[v][up as usize], true) {
                continue;
            }
            if !in_z[v] && role[v] == 2 {
                return Ok(false);
            }
            if up {
                if !in_z[v] {
                    queue.extend(self.parents(v).map(|p| (p, true)));
                    queue.extend(self.children(v).map(|c| (c, false)));
                }
            } else {
                if !in_z[v] {
                    queue.extend(self.children(v).map(|c| (c, false)));
                }
                if anc[v] {
                    queue.extend(self.parents(v).map(|p| (p, true)));
                }
            }
        }
        Ok(true)
    }

    pub fn d_separated(&self, x: &str, y: &str, given: &[&str]) -> Result<bool, GraphError> {
        self.d_separated_sets(&[x], &[y], given)
    }

    /// Colliders `left -> collider <- right` with non-adjacent parents,
    /// sorted by (collider, left, right) with `left < right`.
    pub fn v_structures(&self) -> Vec<VStructure> {
        let mut out = Vec::new();
        for c in 0..self.nodes.len() {
            let mut parents: Vec<&str> = self.parents(c).map(|p| self.name(p)).collect();
            parents.sort_unstable();
            for (i, l) in parents.iter().enumerate() {
                for r in &parents[i + 1..] {
                    if !self.adjacent(l, r) {
                        out.push(VStructure {
                            left: l.to_string(),
                            collider: self.name(c).to_string(),
                            right: r.to_string(),
                        });
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Every pairwise d-separation among observed nodes.
    pub fn observed_d_separations(&self) -> CiSet {
        let obs = self.observed();
        let mut out = CiSet::new();
        for (i, x) in obs.iter().enumerate() {
            for y in &obs[i + 1..] {
                let rest: Vec<&str> = obs.iter().copied().filter(|v| v != x && v != y).collect();
                for mask in 0..(1usize << rest.len()) {
                    let given: Vec<&str> =
                        rest.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, v)| *v).collect();
                    if self.d_separated(x, y, &given).expect("observed names are valid") {
                        out.insert(CiRelation::single(x, y, &given).expect("disjoint by construction"));
                    }
                }
            }
        }
        out
    }

    fn holds_as_d_separation(&self, r: &CiRelation) -> Result<bool, GraphError> {
        for v in r.variables() {
            if self.kind(v) != Some(NodeKind::Observed) {
                return Err(GraphError::NameMismatch(v.clone()));
            }
        }
        let x: Vec<&str> = r.x().iter().map(String::as_str).collect();
        let y: Vec<&str> = r.y().iter().map(String::as_str).collect();
        let z: Vec<&str> = r.given().iter().map(String::as_str).collect();
        self.d_separated_sets(&x, &y, &z)
    }

    /// Markov and faithfulness check of `cis` against this graph.
    pub fn markov_consistent(&self, cis: &CiSet) -> Result<bool, GraphError> {
        self.markov_check(cis, MarkovCheck::Faithful)
    }

    pub fn markov_check(&self, cis: &CiSet, mode: MarkovCheck) -> Result<bool, GraphError> {
        for r in cis {
            if !self.holds_as_d_separation(r)? {
                return Ok(false);
            }
        }
        if mode == MarkovCheck::MarkovOnly {
            return Ok(true);
        }
        let closure = cis.semigraphoid_closure();
        Ok(self.observed_d_separations().is_subset(&closure))
    }

    /// Joint over all nodes, in node order, from `prod_j P(X_j | Pa(X_j))`.
    pub fn factorized_joint(&self, params: &CptParameters) -> Result<JointDistribution, GraphError> {
        let n = self.nodes.len();
        let parents: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                let mut p: Vec<usize> = self.parents(v).collect();
                p.sort_unstable();
                p
            })
            .collect();
        let mut rows: Vec<&[[f64; 2]]> = Vec::with_capacity(n);
        for (v, pa) in parents.iter().enumerate() {
            let name = self.name(v);
            let table = params.table(name).ok_or_else(|| GraphError::Cpt(name.into(), "no table".into()))?;
            if table.len() != 1 << pa.len() {
                return Err(GraphError::Cpt(
                    name.into(),
                    format!("expected {} rows, got {}", 1 << pa.len(), table.len()),
                ));
            }
            rows.push(table);
        }
        let mut probabilities = vec![0.0; 1 << n];
        for (idx, entry) in probabilities.iter_mut().enumerate() {
            let bit = |v: usize| (idx >> (n - 1 - v)) & 1;
            *entry = (0..n)
                .map(|v| {
                    let row = parents[v].iter().fold(0usize, |acc, &p| (acc << 1) | bit(p));
                    rows[v][row][bit(v)]
                })
                .product();
        }
        Ok(JointDistribution::new(self.nodes.iter().map(|n| n.name.clone()).collect(), probabilities)?)
    }

    /// Factorized joint with latent nodes summed out.
    pub fn observed_joint(&self, params: &CptParameters) -> Result<JointDistribution, GraphError> {
        let full = self.factorized_joint(params)?;
        Ok(full.marginalize(&self.observed())?)
    }

    /// Graphviz rendering. Latent nodes are dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for n in &self.nodes {
            match n.kind {
                NodeKind::Observed => writeln!(out, "  {};", dot_id(&n.name)).unwrap(),
                NodeKind::Latent => {
                    writeln!(out, "  {} [label=\"{}\", style=dashed];", dot_id(&n.name), latent_label(&n.name)).unwrap()
                }
            }
        }
        for (f, t) in self.edges() {
            writeln!(out, "  {} -> {};", dot_id(f), dot_id(t)).unwrap();
        }
        out.push_str("}\n");
        out
    }

    /// Node positions permuted by `rename`; used for relabeling checks.
    pub fn relabel(&self, rename: &BTreeMap<String, String>) -> Result<CausalGraph, GraphError> {
        let mut g = CausalGraph::new();
        for n in &self.nodes {
            let name = rename.get(&n.name).unwrap_or(&n.name);
            g.add_node(name, n.kind)?;
        }
        for (f, t) in self.edges() {
            let f = rename.get(f).map(String::as_str).unwrap_or(f);
            let t = rename.get(t).map(String::as_str).unwrap_or(t);
            g.add_edge(f, t)?;
        }
        Ok(g)
    }
}

/// Every DAG over the given observed nodes: each pair is unlinked, `a -> b`
/// or `b -> a`, cyclic combinations dropped.
pub fn all_dags(names: &[&str]) -> Vec<CausalGraph> {
    let pairs: Vec<(&str, &str)> =
        names.iter().enumerate().flat_map(|(i, a)| names[i + 1..].iter().map(move |b| (*a, *b))).collect();
    let mut out = Vec::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut g = CausalGraph::with_observed(names).expect("distinct names");
        let mut rest = code;
        let mut ok = true;
        for (a, b) in &pairs {
            let r = match rest % 3 {
                1 => g.add_edge(a, b),
                2 => g.add_edge(b, a),
                _ => Ok(()),
            };
            rest /= 3;
            if r.is_err() {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(g);
        }
    }
    out
}

fn dot_id(name: &str) -> String {
    if !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('"', "\\\""))
    }
}

fn latent_label(name: &str) -> &str {
    match name {
        "lambda" => "λ",
        "mu" => "μ",
        "nu" => "ν",
        "xi" => "ξ",
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkovCheck {
    /// Every relation is a d-separation and every observed d-separation is
    /// implied by the relations.
    Faithful,
    /// Only the first half.
    MarkovOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VStructure {
    pub left: String,
    pub collider: String,
    pub right: String,
}

/// Per-node tables `P(node | parents)`; row index is the parents' assignment
/// with parents in graph node order, first parent most significant.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CptParameters {
    tables: BTreeMap<String, Vec<[f64; 2]>>,
}

impl CptParameters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, node: &str, rows: Vec<[f64; 2]>) -> Result<(), GraphError> {
        for row in &rows {
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || (row[0] + row[1] - 1.0).abs() > CPT_TOL {
                return Err(GraphError::Cpt(node.into(), format!("bad row {row:?}")));
            }
        }
        self.tables.insert(node.to_string(), rows);
        Ok(())
    }

    pub fn table(&self, node: &str) -> Option<&[[f64; 2]]> {
        self.tables.get(node).map(Vec::as_slice)
    }

    /// Every row drawn uniformly from the 1-simplex.
    pub fn random<R: Rng>(g: &CausalGraph, rng: &mut R) -> Self {
        let mut p = Self::new();
        for node in g.nodes() {
            let rows = 1usize << g.parents_of(&node.name).len();
            let table = (0..rows)
                .map(|_| {
                    let q: f64 = rng.gen();
                    [1.0 - q, q]
                })
                .collect();
            p.tables.insert(node.name.clone(), table);
        }
        p
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    nodes: Vec<Node>,
    edges: Vec<[String; 2]>,
}

impl Serialize for CausalGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson {
            nodes: self.nodes.clone(),
            edges: self.edges().map(|(f, t)| [f.to_string(), t.to_string()]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CausalGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        let mut g = CausalGraph::new();
        for n in &raw.nodes {
            g.add_node(&n.name, n.kind).map_err(serde::de::Error::custom)?;
        }
        for [f, t] in &raw.edges {
            g.add_edge(f, t).map_err(serde::de::Error::custom)?;
        }
        Ok(g)
    }
}
