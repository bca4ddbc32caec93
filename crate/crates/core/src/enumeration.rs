//! Concrete latent-variable causal structures compatible with a pattern, per
//! detection ordering, and the predicates evaluated over them.
//!
//! Every undetermined link `X o-o Y` is realized in one of five ways (in this
//! order): `X -> Y`, `Y -> X`, `X <- L -> Y`, `X -> Y` plus `L`, `Y -> X` plus
//! `L`, where `L` is a fresh latent root. Latents precede every detection, so
//! orderings constrain only links between observed variables.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::discovery::{Pattern, PatternEdge};
use crate::distributions::CiSet;
use crate::graphs::{CausalGraph, GraphError, NodeKind, VStructure};

/// Latent names handed out to pattern links in link order.
pub const LATENT_NAMES: [&str; 6] = ["lambda", "mu", "nu", "xi", "omicron", "rho"];

/// Photon path variable.
pub const PHOTON: &str = "A";
/// Control of the second beamsplitter.
pub const CONTROL: &str = "B";
/// Partner qubit.
pub const PARTNER: &str = "C";

#[derive(Debug, Error, PartialEq)]
pub enum EnumerationError {
    #[error("link {0} is not undetermined")]
    NotUndetermined(String),
    #[error("bad detection ordering `{0}`")]
    BadOrdering(String),
    #[error("pattern has more links than latent names ({0})")]
    TooManyLinks(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizationKind {
    Forward,
    Backward,
    LatentOnly,
    ForwardWithLatent,
    BackwardWithLatent,
}

impl RealizationKind {
    pub const ALL: [RealizationKind; 5] = [
        RealizationKind::Forward,
        RealizationKind::Backward,
        RealizationKind::LatentOnly,
        RealizationKind::ForwardWithLatent,
        RealizationKind::BackwardWithLatent,
    ];

    pub fn uses_latent(self) -> bool {
        matches!(self, Self::LatentOnly | Self::ForwardWithLatent | Self::BackwardWithLatent)
    }
}

/// One option for realizing the link `x o-o y`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgeRealization {
    pub x: String,
    pub y: String,
    pub latent: String,
    pub kind: RealizationKind,
}

impl EdgeRealization {
    /// Directed edges this option contributes.
    pub fn edges(&self) -> Vec<(&str, &str)> {
        let (x, y, l) = (self.x.as_str(), self.y.as_str(), self.latent.as_str());
        match self.kind {
            RealizationKind::Forward => vec![(x, y)],
            RealizationKind::Backward => vec![(y, x)],
            RealizationKind::LatentOnly => vec![(l, x), (l, y)],
            RealizationKind::ForwardWithLatent => vec![(x, y), (l, x), (l, y)],
            RealizationKind::BackwardWithLatent => vec![(y, x), (l, x), (l, y)],
        }
    }

    fn apply(&self, g: &mut CausalGraph) -> Result<(), GraphError> {
        if self.kind.uses_latent() {
            g.add_node(&self.latent, NodeKind::Latent)?;
        }
        for (f, t) in self.edges() {
            g.add_edge(f, t)?;
        }
        Ok(())
    }
}

impl fmt::Display for EdgeRealization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y, l) = (&self.x, &self.y, &self.latent);
        match self.kind {
            RealizationKind::Forward => write!(f, "{x}->{y}"),
            RealizationKind::Backward => write!(f, "{y}->{x}"),
            RealizationKind::LatentOnly => write!(f, "{x}<-{l}->{y}"),
            RealizationKind::ForwardWithLatent => write!(f, "{x}->{y}+{l}"),
            RealizationKind::BackwardWithLatent => write!(f, "{y}->{x}+{l}"),
        }
    }
}

/// The five realizations of an undetermined link, in canonical order.
pub fn expand_edge(edge: &PatternEdge, latent_name: &str) -> Result<[EdgeRealization; 5], EnumerationError> {
    if !edge.is_undetermined() {
        return Err(EnumerationError::NotUndetermined(edge.to_string()));
    }
    Ok(RealizationKind::ALL.map(|kind| EdgeRealization {
        x: edge.x.clone(),
        y: edge.y.clone(),
        latent: latent_name.to_string(),
        kind,
    }))
}

/// A total order of detections, earliest first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DetectionOrdering(Vec<String>);

impl DetectionOrdering {
    pub fn new(order: &[&str]) -> Result<Self, EnumerationError> {
        let set: BTreeSet<&str> = order.iter().copied().collect();
        if set.len() != order.len() || order.is_empty() {
            return Err(EnumerationError::BadOrdering(order.join("<")));
        }
        Ok(Self(order.iter().map(|s| s.to_string()).collect()))
    }

    /// Parses `"ACB"` or `"A<C<B"` as a permutation of A, B, C.
    pub fn parse_abc(s: &str) -> Result<Self, EnumerationError> {
        let parts: Vec<String> = if s.contains('<') {
            s.split('<').map(|p| p.trim().to_string()).collect()
        } else {
            s.chars().map(String::from).collect()
        };
        let mut sorted = parts.clone();
        sorted.sort();
        if sorted != ["A", "B", "C"] {
            return Err(EnumerationError::BadOrdering(s.to_string()));
        }
        Ok(Self(parts))
    }

    /// The six permutations of A, B, C in the order used for reports.
    pub fn all_abc() -> Vec<DetectionOrdering> {
        ["ABC", "BAC", "BCA", "CBA", "ACB", "CAB"].iter().map(|s| Self::parse_abc(s).expect("valid")).collect()
    }

    pub fn position(&self, v: &str) -> Option<usize> {
        self.0.iter().position(|x| x == v)
    }

    /// Compact tag, e.g. `ACB`, used in file names.
    pub fn tag(&self) -> String {
        self.0.concat()
    }
}

impl fmt::Display for DetectionOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join("<"))
    }
}

impl FromStr for DetectionOrdering {
    type Err = EnumerationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_abc(s)
    }
}

/// One concrete realization of a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalStructure {
    graph: CausalGraph,
    realizations: Vec<EdgeRealization>,
}

impl CausalStructure {
    pub fn build(observed: &[&str], realizations: Vec<EdgeRealization>) -> Result<Self, EnumerationError> {
        let mut graph = CausalGraph::with_observed(observed)?;
        for r in &realizations {
            r.apply(&mut graph)?;
        }
        Ok(Self { graph, realizations })
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn realizations(&self) -> &[EdgeRealization] {
        &self.realizations
    }

    pub fn label(&self) -> String {
        self.realizations.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    }
}

pub fn hidden_variable_count(s: &CausalStructure) -> usize {
    s.graph.latents().len()
}

/// True when `s` has a v-structure absent from the pattern's colliders.
pub fn creates_new_v_structure(s: &CausalStructure, pattern: &Pattern) -> bool {
    new_v_structures(s, pattern).next().is_some()
}

pub fn new_v_structures<'a>(s: &'a CausalStructure, pattern: &Pattern) -> impl Iterator<Item = VStructure> + 'a {
    let allowed: BTreeSet<VStructure> = pattern.colliders().into_iter().collect();
    s.graph.v_structures().into_iter().filter(move |v| !allowed.contains(v))
}

/// Every edge between observed nodes points from earlier to later.
pub fn respects_ordering(s: &CausalStructure, ord: &DetectionOrdering) -> bool {
    s.graph.edges().all(|(f, t)| {
        let observed = s.graph.kind(f) == Some(NodeKind::Observed) && s.graph.kind(t) == Some(NodeKind::Observed);
        match (observed, ord.position(f), ord.position(t)) {
            (true, Some(pf), Some(pt)) => pf < pt,
            _ => true,
        }
    })
}

/// All acyclic realizations of `pattern` that add no v-structure, in
/// lexicographic order of per-link option indices.
pub fn all_structures(pattern: &Pattern) -> Result<Vec<CausalStructure>, EnumerationError> {
    let links: Vec<&PatternEdge> = pattern.edges().collect();
    if links.len() > LATENT_NAMES.len() {
        return Err(EnumerationError::TooManyLinks(links.len()));
    }
    let options: Vec<[EdgeRealization; 5]> =
        links.iter().zip(LATENT_NAMES).map(|(e, l)| expand_edge(e, l)).collect::<Result<_, _>>()?;
    let observed: Vec<&str> = pattern.nodes().iter().map(String::as_str).collect();

    let mut out = Vec::new();
    let total = 5usize.pow(links.len() as u32);
    for code in 0..total {
        let mut rest = code;
        let mut choice = vec![0usize; links.len()];
        for slot in choice.iter_mut().rev() {
            *slot = rest % 5;
            rest /= 5;
        }
        let realizations: Vec<EdgeRealization> =
            choice.iter().zip(&options).map(|(&k, opts)| opts[k].clone()).collect();
        let s = match CausalStructure::build(&observed, realizations) {
            Ok(s) => s,
            Err(EnumerationError::Graph(GraphError::Cycle(..))) => continue,
            Err(e) => return Err(e),
        };
        if !creates_new_v_structure(&s, pattern) {
            out.push(s);
        }
    }
    Ok(out)
}

pub fn enumerate_structures(
    pattern: &Pattern,
    ord: &DetectionOrdering,
) -> Result<Vec<CausalStructure>, EnumerationError> {
    Ok(all_structures(pattern)?.into_iter().filter(|s| respects_ordering(s, ord)).collect())
}

/// Observed pairs treated as space-like separated.
pub fn default_spacelike() -> Vec<(String, String)> {
    vec![(PHOTON.into(), PARTNER.into()), (CONTROL.into(), PARTNER.into())]
}

/// No direct edge, in either direction, joins a space-like pair.
pub fn is_superluminal_free(s: &CausalStructure, spacelike: &[(String, String)]) -> bool {
    spacelike.iter().all(|(a, b)| !s.graph.adjacent(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectivityVariant {
    /// A latent common cause of A and B, and no edge B -> A.
    LatentWithoutControlCause,
    /// A latent common cause of A and B, and no direct A-B edge at all.
    LatentOnly,
}

impl ObjectivityVariant {
    pub const ALL: [ObjectivityVariant; 2] = [Self::LatentWithoutControlCause, Self::LatentOnly];
}

pub fn assumes_objectivity(s: &CausalStructure) -> bool {
    assumes_objectivity_with(s, ObjectivityVariant::LatentWithoutControlCause)
}

pub fn assumes_objectivity_with(s: &CausalStructure, variant: ObjectivityVariant) -> bool {
    let g = &s.graph;
    let common_latent = g.latents().into_iter().any(|l| g.has_edge(l, PHOTON) && g.has_edge(l, CONTROL));
    let direct_ok = match variant {
        ObjectivityVariant::LatentWithoutControlCause => !g.has_edge(CONTROL, PHOTON),
        ObjectivityVariant::LatentOnly => !g.adjacent(CONTROL, PHOTON),
    };
    common_latent && direct_ok
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureFlags {
    pub hidden_count: usize,
    pub superluminal_free: bool,
    pub objective: bool,
    pub objective_strict: bool,
    pub markov_consistent: bool,
    pub separates_a_c_given_b: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureEntry {
    pub label: String,
    pub graph: CausalGraph,
    pub realizations: Vec<EdgeRealization>,
    pub flags: StructureFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingGroup {
    pub ordering: String,
    pub tag: String,
    pub count: usize,
    pub structures: Vec<StructureEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    /// Labels of offending structures, as `<ordering>#<index>: <label>`.
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoGoReport {
    pub groups: Vec<OrderingGroup>,
    pub ordering_free_count: usize,
    pub max_hidden_count: usize,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

impl NoGoReport {
    pub fn group(&self, tag: &str) -> Option<&OrderingGroup> {
        self.groups.iter().find(|g| g.tag == tag)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.count).collect()
    }
}

#[derive(Debug, Clone)]
pub struct NoGoConfig {
    pub relations: CiSet,
    pub spacelike: Vec<(String, String)>,
}

impl Default for NoGoConfig {
    fn default() -> Self {
        Self { relations: crate::discovery::reference_relations(), spacelike: default_spacelike() }
    }
}

pub const TWO_LATENT_EXCLUSION: &str = "two_latent_exclusion";
pub const NO_GO_LENIENT: &str = "no_superluminal_free_objective_structure";
pub const NO_GO_STRICT: &str = "no_superluminal_free_objective_structure_strict";
pub const MARKOV_CONSISTENCY: &str = "markov_consistency";

/// Enumerates all six orderings and evaluates the exclusion predicates.
pub fn no_go_report(pattern: &Pattern) -> Result<NoGoReport, EnumerationError> {
    no_go_report_with(pattern, &NoGoConfig::default())
}

pub fn no_go_report_with(pattern: &Pattern, cfg: &NoGoConfig) -> Result<NoGoReport, EnumerationError> {
    let universe = all_structures(pattern)?;
    let mut groups = Vec::new();
    let mut two_latent = Vec::new();
    let mut lenient = Vec::new();
    let mut strict = Vec::new();
    let mut markov = Vec::new();
    let mut max_hidden = 0;

    for ord in DetectionOrdering::all_abc() {
        let mut entries = Vec::new();
        for (i, s) in universe.iter().filter(|s| respects_ordering(s, &ord)).enumerate() {
            let witness = format!("{}#{}: {}", ord.tag(), i, s.label());
            let markov_ok = s.graph.markov_consistent(&cfg.relations)?;
            let flags = StructureFlags {
                hidden_count: hidden_variable_count(s),
                superluminal_free: is_superluminal_free(s, &cfg.spacelike),
                objective: assumes_objectivity_with(s, ObjectivityVariant::LatentWithoutControlCause),
                objective_strict: assumes_objectivity_with(s, ObjectivityVariant::LatentOnly),
                markov_consistent: markov_ok,
                separates_a_c_given_b: s.graph.d_separated(PHOTON, PARTNER, &[CONTROL]).unwrap_or(false),
            };
            max_hidden = max_hidden.max(flags.hidden_count);
            if flags.hidden_count > 1 {
                two_latent.push(witness.clone());
            }
            if flags.superluminal_free && flags.objective {
                lenient.push(witness.clone());
            }
            if flags.superluminal_free && flags.objective_strict {
                strict.push(witness.clone());
            }
            if !flags.markov_consistent {
                markov.push(witness);
            }
            entries.push(StructureEntry {
                label: s.label(),
                graph: s.graph.clone(),
                realizations: s.realizations.clone(),
                flags,
            });
        }
        groups.push(OrderingGroup {
            ordering: ord.to_string(),
            tag: ord.tag(),
            count: entries.len(),
            structures: entries,
        });
    }

    let assertions: Vec<Assertion> = [
        (TWO_LATENT_EXCLUSION, two_latent),
        (NO_GO_LENIENT, lenient),
        (NO_GO_STRICT, strict),
        (MARKOV_CONSISTENCY, markov),
    ]
    .into_iter()
    .map(|(name, witnesses)| Assertion { name: name.into(), passed: witnesses.is_empty(), witnesses })
    .collect();
    let passed = assertions.iter().all(|a| a.passed);
    Ok(NoGoReport { groups, ordering_free_count: universe.len(), max_hidden_count: max_hidden, assertions, passed })
}
