//! IC* structure discovery over observed variables, allowing latent common
//! causes.
//!
//! The algorithm runs in three phases:
//!
//! 1. **Adjacency**: two variables are linked (`o-o`) when no subset of the
//!    other variables separates them. The first separating set found, by
//!    increasing size and then lexicographically by name, is recorded.
//! 2. **Colliders**: for non-adjacent `a`, `b` with a common neighbour `c`
//!    outside `S_ab`, arrowheads are put at `c` on both links.
//! 3. **Propagation** to a fixed point:
//!    - R1: `a *-> c`, `c` not an arrowhead on `c - b`, `a`, `b` non-adjacent
//!      => mark `c -*-> b`.
//!    - R2: adjacent `a`, `b` joined by a directed path of marked links from
//!      `a` to `b` => arrowhead at `b` on `a - b`.
//!
//! Every phase-2 and phase-3 action is logged in [`Pattern::firings`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::distributions::{CiRelation, CiSet, DistError, JointDistribution};
use crate::graphs::VStructure;

/// Largest variable count accepted by [`ic_star`].
pub const MAX_DISCOVERY_VARIABLES: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum DiscoveryError {
    #[error("oracle answered asymmetrically for {x}, {y} | {given:?}")]
    InconsistentOracle { x: String, y: String, given: Vec<String> },
    #[error("too many variables for discovery: {0}")]
    TooManyVariables(usize),
    #[error("duplicate or unknown variable `{0}`")]
    BadVariable(String),
    #[error(transparent)]
    Distribution(#[from] DistError),
}

/// Source of conditional-independence answers.
pub trait CiOracle {
    fn independent(&self, x: &str, y: &str, given: &[&str]) -> Result<bool, DiscoveryError>;
}

/// Answers by testing a distribution at a fixed tolerance.
pub struct DistributionOracle<'a> {
    dist: &'a JointDistribution,
    tol: f64,
}

impl<'a> DistributionOracle<'a> {
    pub fn new(dist: &'a JointDistribution, tol: f64) -> Self {
        Self { dist, tol }
    }
}

impl CiOracle for DistributionOracle<'_> {
    fn independent(&self, x: &str, y: &str, given: &[&str]) -> Result<bool, DiscoveryError> {
        Ok(self.dist.is_conditionally_independent(&[x], &[y], given, self.tol)?)
    }
}

/// Answers by membership in a relation set, closed under the semi-graphoid
/// axioms when the oracle is built.
pub struct CiSetOracle {
    closed: CiSet,
}

impl CiSetOracle {
    pub fn new(cis: &CiSet) -> Self {
        Self { closed: cis.semigraphoid_closure() }
    }

    pub fn relations(&self) -> &CiSet {
        &self.closed
    }
}

impl CiOracle for CiSetOracle {
    fn independent(&self, x: &str, y: &str, given: &[&str]) -> Result<bool, DiscoveryError> {
        Ok(self.closed.holds(x, y, given))
    }
}

/// Mark at one end of a pattern link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EndMark {
    Circle,
    Arrow,
    Tail,
}

/// A link between `x < y` (by name) with the mark at each end. `genuine`
/// flags a marked link (`-*->`, genuine cause).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternEdge {
    pub x: String,
    pub y: String,
    pub at_x: EndMark,
    pub at_y: EndMark,
    pub genuine: bool,
}

impl PatternEdge {
    pub fn undetermined(a: &str, b: &str) -> Self {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        Self { x: x.into(), y: y.into(), at_x: EndMark::Circle, at_y: EndMark::Circle, genuine: false }
    }

    pub fn is_undetermined(&self) -> bool {
        self.at_x == EndMark::Circle && self.at_y == EndMark::Circle && !self.genuine
    }

    pub fn mark_at(&self, node: &str) -> EndMark {
        if node == self.x {
            self.at_x
        } else {
            self.at_y
        }
    }

    fn set_mark(&mut self, node: &str, mark: EndMark) {
        if node == self.x {
            self.at_x = mark;
        } else {
            self.at_y = mark;
        }
    }

    pub fn other(&self, node: &str) -> &str {
        if node == self.x {
            &self.y
        } else {
            &self.x
        }
    }

    pub fn arrowheads(&self) -> usize {
        [self.at_x, self.at_y].iter().filter(|m| **m == EndMark::Arrow).count()
    }

    /// `(from, to, mark)` with the arrowhead, if exactly one, at `to`.
    pub fn oriented(&self) -> (&str, &str, &'static str) {
        use EndMark::*;
        let flip = self.at_x == Arrow && self.at_y != Arrow;
        let (from, to, at_from, at_to) =
            if flip { (&self.y, &self.x, self.at_y, self.at_x) } else { (&self.x, &self.y, self.at_x, self.at_y) };
        let mark = match (at_from, at_to) {
            (Circle, Circle) => "oo",
            (Arrow, Arrow) => "<->",
            (Circle, Arrow) => "o->",
            (Tail, Arrow) if self.genuine => "*->",
            (Tail, Arrow) => "->",
            (Tail, Tail) => "--",
            (Tail, Circle) => "-o",
            (Circle, Tail) => "o-",
            (Arrow, _) => unreachable!("flipped above"),
        };
        (from, to, mark)
    }
}

impl fmt::Display for PatternEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (from, to, mark) = self.oriented();
        let glyph = match mark {
            "oo" => "o-o",
            "*->" => "-*->",
            other => other,
        };
        write!(f, "{from} {glyph} {to}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RuleFiring {
    /// Phase 2 arrowheads `a *-> c <-* b`.
    Collider { a: String, c: String, b: String },
    /// `a *-> c`, c - b marked as `c -*-> b`.
    R1 { a: String, c: String, b: String },
    /// Arrowhead at `b` on `a - b` from a marked path.
    R2 { a: String, b: String },
}

impl RuleFiring {
    pub fn is_closure_rule(&self) -> bool {
        !matches!(self, RuleFiring::Collider { .. })
    }
}

/// IC* output: a marked pattern over the observed variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    nodes: Vec<String>,
    edges: BTreeMap<(String, String), PatternEdge>,
    separating_sets: BTreeMap<(String, String), BTreeSet<String>>,
    firings: Vec<RuleFiring>,
}

fn key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl Pattern {
    /// Builds a pattern with undetermined links, e.g. for hand-made or
    /// mutated inputs to enumeration.
    pub fn from_undetermined(
        nodes: &[&str],
        links: &[(&str, &str)],
        separating_sets: &[((&str, &str), &[&str])],
    ) -> Self {
        let mut p = Pattern {
            nodes: nodes.iter().map(|n| n.to_string()).collect(),
            edges: BTreeMap::new(),
            separating_sets: BTreeMap::new(),
            firings: Vec::new(),
        };
        for (a, b) in links {
            p.edges.insert(key(a, b), PatternEdge::undetermined(a, b));
        }
        for ((a, b), s) in separating_sets {
            p.separating_sets.insert(key(a, b), s.iter().map(|v| v.to_string()).collect());
        }
        p
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = &PatternEdge> {
        self.edges.values()
    }

    pub fn edge(&self, a: &str, b: &str) -> Option<&PatternEdge> {
        self.edges.get(&key(a, b))
    }

    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        self.edges.contains_key(&key(a, b))
    }

    /// Adds an undetermined link, replacing any recorded separating set.
    pub fn add_undetermined(&mut self, a: &str, b: &str) {
        self.separating_sets.remove(&key(a, b));
        self.edges.insert(key(a, b), PatternEdge::undetermined(a, b));
    }

    pub fn separating_set(&self, a: &str, b: &str) -> Option<&BTreeSet<String>> {
        self.separating_sets.get(&key(a, b))
    }

    pub fn separating_sets(&self) -> &BTreeMap<(String, String), BTreeSet<String>> {
        &self.separating_sets
    }

    pub fn firings(&self) -> &[RuleFiring] {
        &self.firings
    }

    pub fn closure_firings(&self) -> usize {
        self.firings.iter().filter(|f| f.is_closure_rule()).count()
    }

    pub fn arrowhead_count(&self) -> usize {
        self.edges.values().map(PatternEdge::arrowheads).sum()
    }

    fn neighbours(&self, v: &str) -> Vec<&str> {
        self.edges.values().filter(|e| e.x == v || e.y == v).map(|e| e.other(v)).collect()
    }

    /// Triples `l *-> c <-* r` with `l`, `r` non-adjacent.
    pub fn colliders(&self) -> Vec<VStructure> {
        let mut out = Vec::new();
        for c in &self.nodes {
            let mut into: Vec<&str> = self
                .edges
                .values()
                .filter(|e| (e.x == *c || e.y == *c) && e.mark_at(c) == EndMark::Arrow)
                .map(|e| e.other(c))
                .collect();
            into.sort_unstable();
            for (i, l) in into.iter().enumerate() {
                for r in &into[i + 1..] {
                    if !self.adjacent(l, r) {
                        out.push(VStructure { left: l.to_string(), collider: c.clone(), right: r.to_string() });
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Re-checks every recorded separating set against `oracle`.
    pub fn verify_separations(&self, oracle: &dyn CiOracle) -> Result<bool, DiscoveryError> {
        for ((a, b), s) in &self.separating_sets {
            let given: Vec<&str> = s.iter().map(String::as_str).collect();
            if !oracle.independent(a, b, &given)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same pattern with node names mapped through `rename`.
    pub fn relabel(&self, rename: &BTreeMap<String, String>) -> Pattern {
        let r = |s: &String| rename.get(s).cloned().unwrap_or_else(|| s.clone());
        let mut edges = BTreeMap::new();
        for e in self.edges.values() {
            let (x, y) = (r(&e.x), r(&e.y));
            let mut ne = PatternEdge::undetermined(&x, &y);
            ne.set_mark(&x, e.at_x);
            ne.set_mark(&y, e.at_y);
            ne.genuine = e.genuine;
            edges.insert(key(&x, &y), ne);
        }
        Pattern {
            nodes: self.nodes.iter().map(r).collect(),
            edges,
            separating_sets: self
                .separating_sets
                .iter()
                .map(|((a, b), s)| (key(&r(a), &r(b)), s.iter().map(r).collect()))
                .collect(),
            firings: Vec::new(),
        }
    }

    /// Structural equality ignoring node order and firing log.
    pub fn same_structure(&self, other: &Pattern) -> bool {
        let n1: BTreeSet<&String> = self.nodes.iter().collect();
        let n2: BTreeSet<&String> = other.nodes.iter().collect();
        n1 == n2 && self.edges == other.edges && self.separating_sets == other.separating_sets
    }

    fn set_arrow(&mut self, a: &str, b: &str, at: &str) -> bool {
        let e = self.edges.get_mut(&key(a, b)).expect("caller checked adjacency");
        if e.mark_at(at) == EndMark::Arrow {
            return false;
        }
        e.set_mark(at, EndMark::Arrow);
        true
    }

    /// Directed path of marked links from `from` to `to`.
    fn marked_path(&self, from: &str, to: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from.to_string()];
        while let Some(u) = stack.pop() {
            if !seen.insert(u.clone()) {
                continue;
            }
            for e in self.edges.values().filter(|e| e.genuine && (e.x == u || e.y == u)) {
                let v = e.other(&u);
                if e.mark_at(&u) == EndMark::Tail && e.mark_at(v) == EndMark::Arrow {
                    if v == to {
                        return true;
                    }
                    stack.push(v.to_string());
                }
            }
        }
        false
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes: {}", self.nodes.join(", "))?;
        if self.edges.is_empty() {
            writeln!(f, "no links")?;
        }
        for e in self.edges.values() {
            writeln!(f, "{e}")?;
        }
        for ((a, b), s) in &self.separating_sets {
            writeln!(f, "S({a},{b}) = {{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","))?;
        }
        write!(f, "closure rule firings: {}", self.closure_firings())
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct EdgeJson<'a> {
            from: &'a str,
            to: &'a str,
            mark: &'a str,
        }
        let edges: Vec<EdgeJson> = self
            .edges
            .values()
            .map(|e| {
                let (from, to, mark) = e.oriented();
                EdgeJson { from, to, mark }
            })
            .collect();
        let sets: BTreeMap<String, &BTreeSet<String>> =
            self.separating_sets.iter().map(|((a, b), set)| (format!("{a}|{b}"), set)).collect();
        let mut st = s.serialize_struct("Pattern", 4)?;
        st.serialize_field("nodes", &self.nodes)?;
        st.serialize_field("edges", &edges)?;
        st.serialize_field("separating_sets", &sets)?;
        st.serialize_field("rule_firings", &self.firings)?;
        st.end()
    }
}

/// First subset of `vars \ {a, b}` that separates `a` and `b`, by size
/// then lexicographic order of names.
pub fn find_separating_set(
    oracle: &dyn CiOracle,
    a: &str,
    b: &str,
    vars: &[&str],
) -> Result<Option<BTreeSet<String>>, DiscoveryError> {
    let mut rest: Vec<&str> = vars.iter().copied().filter(|v| *v != a && *v != b).collect();
    rest.sort_unstable();
    rest.dedup();
    for size in 0..=rest.len() {
        for given in combinations(&rest, size) {
            let ab = oracle.independent(a, b, &given)?;
            let ba = oracle.independent(b, a, &given)?;
            if ab != ba {
                return Err(DiscoveryError::InconsistentOracle {
                    x: a.into(),
                    y: b.into(),
                    given: given.iter().map(|s| s.to_string()).collect(),
                });
            }
            if ab {
                return Ok(Some(given.iter().map(|s| s.to_string()).collect()));
            }
        }
    }
    Ok(None)
}

/// Size-`k` subsets in lexicographic order of positions.
fn combinations<'a>(items: &[&'a str], k: usize) -> Vec<Vec<&'a str>> {
    fn go<'a>(items: &[&'a str], k: usize, start: usize, cur: &mut Vec<&'a str>, out: &mut Vec<Vec<&'a str>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

pub fn ic_star(oracle: &dyn CiOracle, vars: &[&str]) -> Result<Pattern, DiscoveryError> {
    if vars.len() > MAX_DISCOVERY_VARIABLES {
        return Err(DiscoveryError::TooManyVariables(vars.len()));
    }
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(*v) {
            return Err(DiscoveryError::BadVariable(v.to_string()));
        }
    }
    let mut p = Pattern {
        nodes: vars.iter().map(|v| v.to_string()).collect(),
        edges: BTreeMap::new(),
        separating_sets: BTreeMap::new(),
        firings: Vec::new(),
    };

    // adjacency
    for (i, a) in vars.iter().enumerate() {
        for b in &vars[i + 1..] {
            match find_separating_set(oracle, a, b, vars)? {
                Some(s) => {
                    p.separating_sets.insert(key(a, b), s);
                }
                None => {
                    p.edges.insert(key(a, b), PatternEdge::undetermined(a, b));
                }
            }
        }
    }

    let mut names: Vec<String> = p.nodes.clone();
    names.sort();

    // colliders
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            if p.adjacent(a, b) {
                continue;
            }
            let sep = p.separating_sets[&key(a, b)].clone();
            for c in &names {
                if c == a || c == b || sep.contains(c) || !p.adjacent(a, c) || !p.adjacent(b, c) {
                    continue;
                }
                let changed = p.set_arrow(a, c, c) | p.set_arrow(b, c, c);
                if changed {
                    p.firings.push(RuleFiring::Collider { a: a.clone(), c: c.clone(), b: b.clone() });
                }
            }
        }
    }

    // propagation
    loop {
        let mut changed = false;
        for a in &names {
            for c in p.neighbours(a).into_iter().map(str::to_string).collect::<Vec<_>>() {
                if p.edge(a, &c).map(|e| e.mark_at(&c)) != Some(EndMark::Arrow) {
                    continue;
                }
                for b in p.neighbours(&c).into_iter().map(str::to_string).collect::<Vec<_>>() {
                    if b == *a || p.adjacent(a, &b) {
                        continue;
                    }
                    let e = p.edges.get_mut(&key(&c, &b)).expect("neighbour");
                    if e.mark_at(&c) == EndMark::Arrow || (e.genuine && e.mark_at(&b) == EndMark::Arrow) {
                        continue;
                    }
                    e.set_mark(&c, EndMark::Tail);
                    e.set_mark(&b, EndMark::Arrow);
                    e.genuine = true;
                    p.firings.push(RuleFiring::R1 { a: a.clone(), c: c.clone(), b });
                    changed = true;
                }
            }
        }
        let pairs: Vec<(String, String)> = p.edges.keys().cloned().collect();
        for (x, y) in pairs {
            for (a, b) in [(&x, &y), (&y, &x)] {
                if p.edge(a, b).map(|e| e.mark_at(b)) == Some(EndMark::Arrow) {
                    continue;
                }
                if p.marked_path(a, b) {
                    p.set_arrow(a, b, b);
                    p.firings.push(RuleFiring::R2 { a: a.clone(), b: b.clone() });
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(p)
}

/// Convenience: relations → pattern over `vars`.
pub fn ic_star_from_relations(cis: &CiSet, vars: &[&str]) -> Result<Pattern, DiscoveryError> {
    ic_star(&CiSetOracle::new(cis), vars)
}

/// `{A ⫫ C | B}`
pub fn reference_relations() -> CiSet {
    [CiRelation::single("A", "C", &["B"]).expect("valid")].into_iter().collect()
}

/// The two-link chain `A o-o B o-o C` with `S_AC = {B}`.
pub fn reference_pattern() -> Pattern {
    Pattern::from_undetermined(&["A", "B", "C"], &[("A", "B"), ("B", "C")], &[(("A", "C"), &["B"])])
}
