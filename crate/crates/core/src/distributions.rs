//! Probability tables over named binary variables, conditional-independence
//! tests and semi-graphoid closure.
//!
//! Tables are stored in lexicographic assignment order: the first variable is
//! the most significant bit of the index.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerance for conditional-independence tests.
pub const DEFAULT_CI_TOL: f64 = 1e-9;
/// Conditioning events at or below this probability are treated as vacuous.
pub const ZERO_PROB: f64 = 1e-12;
/// Sum-to-one tolerance accepted for a table.
pub const TABLE_SUM_TOL: f64 = 1e-9;
/// Largest variable count for the exhaustive relation scan.
pub const MAX_SCAN_VARIABLES: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum DistError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("invalid probability table: {0}")]
    InvalidTable(String),
    #[error("unconditionable: evidence has probability {0:e}")]
    Unconditionable(f64),
    #[error("variable sets overlap or are empty: {0}")]
    BadVariableSets(String),
    #[error("too many variables for an exhaustive scan: {0}")]
    TooManyVariables(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct JointDistribution {
    variables: Vec<String>,
    probabilities: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    variables: Vec<String>,
    probabilities: Vec<f64>,
}

impl TryFrom<RawDistribution> for JointDistribution {
    type Error = DistError;
    fn try_from(raw: RawDistribution) -> Result<Self, DistError> {
        JointDistribution::new(raw.variables, raw.probabilities)
    }
}

impl JointDistribution {
    pub fn new(variables: Vec<String>, probabilities: Vec<f64>) -> Result<Self, DistError> {
        let mut seen = BTreeSet::new();
        for v in &variables {
            if !seen.insert(v.as_str()) {
                return Err(DistError::DuplicateVariable(v.clone()));
            }
        }
        if variables.len() >= usize::BITS as usize - 1 {
            return Err(DistError::TooManyVariables(variables.len()));
        }
        if probabilities.len() != 1usize << variables.len() {
            return Err(DistError::InvalidTable(format!(
                "expected {} entries, got {}",
                1usize << variables.len(),
                probabilities.len()
            )));
        }
        if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(DistError::InvalidTable(format!("entry {p} is not a nonnegative number")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > TABLE_SUM_TOL {
            return Err(DistError::InvalidTable(format!("entries sum to {total}")));
        }
        Ok(Self { variables, probabilities })
    }

    /// Product of independent marginals `P(v = 1) = p`.
    pub fn product(marginals: &[(&str, f64)]) -> Result<Self, DistError> {
        let n = marginals.len();
        let mut probabilities = vec![1.0; 1 << n];
        for (idx, entry) in probabilities.iter_mut().enumerate() {
            for (i, (_, p1)) in marginals.iter().enumerate() {
                let bit = (idx >> (n - 1 - i)) & 1;
                *entry *= if bit == 1 { *p1 } else { 1.0 - p1 };
            }
        }
        Self::new(marginals.iter().map(|(v, _)| v.to_string()).collect(), probabilities)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn position(&self, name: &str) -> Result<usize, DistError> {
        self.variables.iter().position(|v| v == name).ok_or_else(|| DistError::UnknownVariable(name.to_string()))
    }

    fn bit(&self, index: usize, var: usize) -> usize {
        (index >> (self.variables.len() - 1 - var)) & 1
    }

    /// Probability of a full assignment given in variable order.
    pub fn probability(&self, assignment: &[u8]) -> Option<f64> {
        if assignment.len() != self.variables.len() {
            return None;
        }
        let idx = assignment.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
        self.probabilities.get(idx).copied()
    }

    /// Probability of a partial assignment.
    pub fn event_probability(&self, evidence: &[(&str, u8)]) -> Result<f64, DistError> {
        let pos = evidence
            .iter()
            .map(|(n, v)| Ok((self.position(n)?, *v as usize)))
            .collect::<Result<Vec<_>, DistError>>()?;
        Ok(self
            .probabilities
            .iter()
            .enumerate()
            .filter(|(idx, _)| pos.iter().all(|&(i, v)| self.bit(*idx, i) == v))
            .map(|(_, p)| p)
            .sum())
    }

    /// Sums out every variable not in `keep`. The result lists the kept
    /// variables in their original order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointDistribution, DistError> {
        if keep.is_empty() {
            return Err(DistError::BadVariableSets("keep set is empty".into()));
        }
        let mut kept: Vec<usize> = keep.iter().map(|k| self.position(k)).collect::<Result<_, _>>()?;
        kept.sort_unstable();
        kept.dedup();
        let m = kept.len();
        let mut table = vec![0.0; 1 << m];
        for (idx, p) in self.probabilities.iter().enumerate() {
            let sub = kept.iter().fold(0usize, |acc, &i| (acc << 1) | self.bit(idx, i));
            table[sub] += p;
        }
        let total: f64 = table.iter().sum();
        table.iter_mut().for_each(|p| *p /= total);
        Ok(JointDistribution {
            variables: kept.iter().map(|&i| self.variables[i].clone()).collect(),
            probabilities: table,
        })
    }

    /// Conditions on a partial assignment and renormalizes over the remaining
    /// variables.
    pub fn condition(&self, evidence: &[(&str, u8)]) -> Result<JointDistribution, DistError> {
        let mut fixed: Vec<(usize, usize)> = Vec::with_capacity(evidence.len());
        for (name, value) in evidence {
            let i = self.position(name)?;
            if *value > 1 {
                return Err(DistError::BadVariableSets(format!("value {value} for binary `{name}`")));
            }
            match fixed.iter().find(|(j, _)| *j == i) {
                Some((_, v)) if *v != *value as usize => {
                    return Err(DistError::BadVariableSets(format!("conflicting evidence on `{name}`")))
                }
                Some(_) => {}
                None => fixed.push((i, *value as usize)),
            }
        }
        let rest: Vec<usize> = (0..self.variables.len()).filter(|i| fixed.iter().all(|(j, _)| j != i)).collect();
        let mut table = vec![0.0; 1 << rest.len()];
        let mut mass = 0.0;
        for (idx, p) in self.probabilities.iter().enumerate() {
            if fixed.iter().all(|&(i, v)| self.bit(idx, i) == v) {
                let sub = rest.iter().fold(0usize, |acc, &i| (acc << 1) | self.bit(idx, i));
                table[sub] += p;
                mass += p;
            }
        }
        if mass <= ZERO_PROB {
            return Err(DistError::Unconditionable(mass));
        }
        table.iter_mut().for_each(|p| *p /= mass);
        Ok(JointDistribution {
            variables: rest.iter().map(|&i| self.variables[i].clone()).collect(),
            probabilities: table,
        })
    }

    /// Largest violation `|P(x,y|z) - P(x|z) P(y|z)|` over all assignments,
    /// ignoring conditioning assignments with `P(z) <= ZERO_PROB`.
    pub fn independence_gap(&self, x: &[&str], y: &[&str], given: &[&str]) -> Result<f64, DistError> {
        let xs = self.positions_of(x)?;
        let ys = self.positions_of(y)?;
        let zs = self.positions_of(given)?;
        if xs.is_empty() || ys.is_empty() {
            return Err(DistError::BadVariableSets("x and y must be nonempty".into()));
        }
        let all: Vec<usize> = xs.iter().chain(&ys).chain(&zs).copied().collect();
        let distinct: BTreeSet<usize> = all.iter().copied().collect();
        if distinct.len() != all.len() {
            return Err(DistError::BadVariableSets(format!("{x:?}, {y:?} | {given:?}")));
        }

        let (nx, ny, nz) = (1usize << xs.len(), 1usize << ys.len(), 1usize << zs.len());
        let pack = |idx: usize, pos: &[usize]| pos.iter().fold(0usize, |acc, &i| (acc << 1) | self.bit(idx, i));
        let mut xyz = vec![0.0; nx * ny * nz];
        for (idx, p) in self.probabilities.iter().enumerate() {
            let (xv, yv, zv) = (pack(idx, &xs), pack(idx, &ys), pack(idx, &zs));
            xyz[(xv * ny + yv) * nz + zv] += p;
        }

        let mut worst: f64 = 0.0;
        for zv in 0..nz {
            let pz: f64 = (0..nx * ny).map(|xy| xyz[xy * nz + zv]).sum();
            if pz <= ZERO_PROB {
                continue;
            }
            let px: Vec<f64> =
                (0..nx).map(|xv| (0..ny).map(|yv| xyz[(xv * ny + yv) * nz + zv]).sum::<f64>() / pz).collect();
            let py: Vec<f64> =
                (0..ny).map(|yv| (0..nx).map(|xv| xyz[(xv * ny + yv) * nz + zv]).sum::<f64>() / pz).collect();
            for xv in 0..nx {
                for yv in 0..ny {
                    let joint = xyz[(xv * ny + yv) * nz + zv] / pz;
                    worst = worst.max((joint - px[xv] * py[yv]).abs());
                }
            }
        }
        Ok(worst)
    }

    pub fn is_conditionally_independent(
        &self,
        x: &[&str],
        y: &[&str],
        given: &[&str],
        tol: f64,
    ) -> Result<bool, DistError> {
        Ok(self.independence_gap(x, y, given)? <= tol)
    }

    fn positions_of(&self, names: &[&str]) -> Result<Vec<usize>, DistError> {
        names.iter().map(|n| self.position(n)).collect()
    }

    /// Tests every unordered pair of single variables against every subset of
    /// the remaining variables.
    pub fn all_ci_relations(&self, tol: f64) -> Result<CiSet, DistError> {
        let n = self.variables.len();
        if n > MAX_SCAN_VARIABLES {
            return Err(DistError::TooManyVariables(n));
        }
        let mut out = CiSet::new();
        for i in 0..n {
            for j in i + 1..n {
                let others: Vec<&str> =
                    (0..n).filter(|&k| k != i && k != j).map(|k| self.variables[k].as_str()).collect();
                for mask in 0..(1usize << others.len()) {
                    let given: Vec<&str> = subset(&others, mask);
                    let (x, y) = (self.variables[i].as_str(), self.variables[j].as_str());
                    if self.is_conditionally_independent(&[x], &[y], &given, tol)? {
                        out.insert(CiRelation::single(x, y, &given).expect("disjoint by construction"));
                    }
                }
            }
        }
        Ok(out)
    }
}

fn subset<'a>(items: &[&'a str], mask: usize) -> Vec<&'a str> {
    items.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, v)| *v).collect()
}

/// `x ⫫ y | given` over sets of variable names. Stored with `x <= y` so the
/// two symmetric forms are one value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRelation")]
pub struct CiRelation {
    x: BTreeSet<String>,
    y: BTreeSet<String>,
    given: BTreeSet<String>,
}

#[derive(Deserialize)]
struct RawRelation {
    x: Vec<String>,
    y: Vec<String>,
    #[serde(default)]
    given: Vec<String>,
}

impl TryFrom<RawRelation> for CiRelation {
    type Error = DistError;
    fn try_from(raw: RawRelation) -> Result<Self, DistError> {
        CiRelation::new(raw.x, raw.y, raw.given)
    }
}

impl CiRelation {
    pub fn new<I, J, K, S>(x: I, y: J, given: K) -> Result<Self, DistError>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = S>,
        K: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let x: BTreeSet<String> = x.into_iter().map(Into::into).collect();
        let y: BTreeSet<String> = y.into_iter().map(Into::into).collect();
        let given: BTreeSet<String> = given.into_iter().map(Into::into).collect();
        if x.is_empty() || y.is_empty() {
            return Err(DistError::BadVariableSets("both sides of a relation must be nonempty".into()));
        }
        if !x.is_disjoint(&y) || !x.is_disjoint(&given) || !y.is_disjoint(&given) {
            return Err(DistError::BadVariableSets(format!("{x:?} ⫫ {y:?} | {given:?}")));
        }
        Ok(Self::from_sets(x, y, given))
    }

    pub fn single(x: &str, y: &str, given: &[&str]) -> Result<Self, DistError> {
        Self::new([x], [y], given.iter().copied())
    }

    fn from_sets(x: BTreeSet<String>, y: BTreeSet<String>, given: BTreeSet<String>) -> Self {
        if x <= y {
            Self { x, y, given }
        } else {
            Self { x: y, y: x, given }
        }
    }

    pub fn x(&self) -> &BTreeSet<String> {
        &self.x
    }

    pub fn y(&self) -> &BTreeSet<String> {
        &self.y
    }

    pub fn given(&self) -> &BTreeSet<String> {
        &self.given
    }

    /// True for a relation between two single variables.
    pub fn is_pairwise(&self) -> bool {
        self.x.len() == 1 && self.y.len() == 1
    }

    pub fn variables(&self) -> impl Iterator<Item = &String> {
        self.x.iter().chain(&self.y).chain(&self.given)
    }

    /// Renders the relation with its sides swapped.
    pub fn display_swapped(&self) -> String {
        format!("{} ⫫ {} | {}", fmt_set(&self.y), fmt_set(&self.x), fmt_braced(&self.given))
    }
}

fn fmt_set(s: &BTreeSet<String>) -> String {
    if s.len() == 1 {
        s.iter().next().cloned().unwrap_or_default()
    } else {
        fmt_braced(s)
    }
}

fn fmt_braced(s: &BTreeSet<String>) -> String {
    format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","))
}

impl fmt::Display for CiRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⫫ {} | {}", fmt_set(&self.x), fmt_set(&self.y), fmt_braced(&self.given))
    }
}

/// A canonical set of relations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CiSet {
    relations: BTreeSet<CiRelation>,
}

impl CiSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, r: CiRelation) -> bool {
        self.relations.insert(r)
    }

    pub fn contains(&self, r: &CiRelation) -> bool {
        self.relations.contains(r)
    }

    /// Membership test for the pairwise relation `x ⫫ y | given`.
    pub fn holds(&self, x: &str, y: &str, given: &[&str]) -> bool {
        CiRelation::single(x, y, given).map(|r| self.contains(&r)).unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CiRelation> {
        self.relations.iter()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn is_subset(&self, other: &CiSet) -> bool {
        self.relations.is_subset(&other.relations)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.relations.iter().flat_map(|r| r.variables().cloned()).collect()
    }

    pub fn pairwise(&self) -> CiSet {
        self.relations.iter().filter(|r| r.is_pairwise()).cloned().collect()
    }

    /// Closure under symmetry, decomposition, weak union and contraction.
    pub fn semigraphoid_closure(&self) -> CiSet {
        let mut closed = self.relations.clone();
        let mut frontier: Vec<CiRelation> = closed.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut derived = Vec::new();
            for r in &frontier {
                for (x, y) in [(&r.x, &r.y), (&r.y, &r.x)] {
                    for part in proper_subsets(y) {
                        // decomposition: X ⫫ YW | Z  =>  X ⫫ Y | Z
                        derived.push(CiRelation::from_sets(x.clone(), part.clone(), r.given.clone()));
                        // weak union: X ⫫ YW | Z  =>  X ⫫ Y | ZW
                        let rest: BTreeSet<String> = y.difference(&part).cloned().collect();
                        let given: BTreeSet<String> = r.given.union(&part).cloned().collect();
                        derived.push(CiRelation::from_sets(x.clone(), rest, given));
                    }
                }
                // contraction, with r in either premise position
                for other in closed.iter() {
                    derived.extend(contract(r, other));
                    derived.extend(contract(other, r));
                }
            }
            frontier = derived.into_iter().filter(|d| closed.insert(d.clone())).collect();
        }
        CiSet { relations: closed }
    }
}

/// `X ⫫ Y | Z` and `X ⫫ W | Z ∪ Y` give `X ⫫ Y ∪ W | Z`.
fn contract(first: &CiRelation, second: &CiRelation) -> Vec<CiRelation> {
    let mut out = Vec::new();
    for (x, y) in [(&first.x, &first.y), (&first.y, &first.x)] {
        let needed: BTreeSet<String> = first.given.union(y).cloned().collect();
        if second.given != needed {
            continue;
        }
        for (x2, w) in [(&second.x, &second.y), (&second.y, &second.x)] {
            if x2 == x {
                let joined: BTreeSet<String> = y.union(w).cloned().collect();
                out.push(CiRelation::from_sets(x.clone(), joined, first.given.clone()));
            }
        }
    }
    out
}

fn proper_subsets(s: &BTreeSet<String>) -> Vec<BTreeSet<String>> {
    let items: Vec<&String> = s.iter().collect();
    let full = (1usize << items.len()) - 1;
    (1..full)
        .map(|mask| items.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, v)| (*v).clone()).collect())
        .collect()
}

impl FromIterator<CiRelation> for CiSet {
    fn from_iter<T: IntoIterator<Item = CiRelation>>(iter: T) -> Self {
        CiSet { relations: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a CiSet {
    type Item = &'a CiRelation;
    type IntoIter = std::collections::btree_set::Iter<'a, CiRelation>;
    fn into_iter(self) -> Self::IntoIter {
        self.relations.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{closed_form_state, joint_distribution, CircuitParams};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn joint(eta: f64, alpha: f64, phi: f64) -> JointDistribution {
        joint_distribution(&closed_form_state(&CircuitParams::new(eta, alpha, phi).unwrap()))
    }

    fn rel(x: &str, y: &str, given: &[&str]) -> CiRelation {
        CiRelation::single(x, y, given).unwrap()
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            JointDistribution::new(vec!["A".into(), "A".into()], vec![0.25; 4]),
            Err(DistError::DuplicateVariable(_))
        ));
        assert!(JointDistribution::new(vec!["A".into()], vec![0.5, 0.6]).is_err());
        assert!(JointDistribution::new(vec!["A".into()], vec![1.5, -0.5]).is_err());
        assert!(JointDistribution::new(vec!["A".into()], vec![1.0]).is_err());
    }

    #[test]
    fn marginalize_examples() {
        let u = JointDistribution::product(&[("A", 0.5), ("B", 0.5)]).unwrap();
        let m = u.marginalize(&["A"]).unwrap();
        assert_eq!(m.variables(), ["A"]);
        assert!(m.probabilities().iter().all(|p| (p - 0.5).abs() < 1e-15));

        let d = joint(0.5, FRAC_PI_4, FRAC_PI_2);
        let b = d.marginalize(&["B"]).unwrap();
        assert!((b.probabilities()[0] - 0.5).abs() < 1e-12);

        let same = d.marginalize(&["C", "A", "B"]).unwrap();
        assert_eq!(same.variables(), d.variables());
        for (l, r) in same.probabilities().iter().zip(d.probabilities()) {
            assert!((l - r).abs() < 1e-15);
        }
        assert!(matches!(d.marginalize(&["Q"]), Err(DistError::UnknownVariable(_))));
        assert!(d.marginalize(&[]).is_err());
    }

    #[test]
    fn condition_examples() {
        let d = joint(0.5, FRAC_PI_6, FRAC_PI_3);
        let c = d.condition(&[("B", 0)]).unwrap();
        let a = c.marginalize(&["A"]).unwrap();
        assert!((a.probabilities()[0] - 0.5).abs() < 1e-12);

        let point = d.condition(&[("A", 1), ("B", 1), ("C", 0)]).unwrap();
        assert!(point.is_empty());
        assert_eq!(point.probabilities(), [1.0]);

        let particle_only = joint(1.0, FRAC_PI_6, FRAC_PI_3);
        assert!(matches!(particle_only.condition(&[("B", 1)]), Err(DistError::Unconditionable(_))));
        assert!(matches!(d.condition(&[("Z", 1)]), Err(DistError::UnknownVariable(_))));
    }

    #[test]
    fn ci_examples() {
        let d = joint(0.5, FRAC_PI_6, FRAC_PI_3);
        assert!(d.is_conditionally_independent(&["A"], &["C"], &["B"], DEFAULT_CI_TOL).unwrap());
        assert!(!d.is_conditionally_independent(&["A"], &["C"], &[], DEFAULT_CI_TOL).unwrap());
        let prod = JointDistribution::product(&[("A", 0.3), ("B", 0.8)]).unwrap();
        assert!(prod.is_conditionally_independent(&["A"], &["B"], &[], DEFAULT_CI_TOL).unwrap());
        assert!(matches!(
            d.is_conditionally_independent(&["A"], &["A"], &[], 1e-9),
            Err(DistError::BadVariableSets(_))
        ));
        assert!(d.is_conditionally_independent(&["A"], &["C"], &["A"], 1e-9).is_err());
    }

    #[test]
    fn relation_scan() {
        let generic = joint(0.5, FRAC_PI_6, FRAC_PI_3).all_ci_relations(DEFAULT_CI_TOL).unwrap();
        assert_eq!(generic.iter().cloned().collect::<Vec<_>>(), vec![rel("A", "C", &["B"])]);

        let degenerate = joint(0.5, FRAC_PI_4, FRAC_PI_2).all_ci_relations(DEFAULT_CI_TOL).unwrap();
        assert!(degenerate.contains(&rel("A", "B", &[])));
        assert!(degenerate.contains(&rel("A", "C", &[])));

        let point = JointDistribution::product(&[("A", 1.0), ("B", 0.0), ("C", 1.0)]).unwrap();
        assert_eq!(point.all_ci_relations(DEFAULT_CI_TOL).unwrap().len(), 3 * 2);
    }

    #[test]
    fn relation_symmetry_is_structural() {
        assert_eq!(rel("C", "A", &["B"]), rel("A", "C", &["B"]));
        assert_eq!(rel("A", "C", &["B"]).to_string(), "A ⫫ C | {B}");
        assert_eq!(rel("A", "C", &["B"]).display_swapped(), "C ⫫ A | {B}");
        assert!(CiRelation::single("A", "A", &[]).is_err());
        assert!(CiRelation::single("A", "B", &["A"]).is_err());
    }

    #[test]
    fn closure_examples() {
        let base: CiSet = [rel("A", "C", &["B"])].into_iter().collect();
        let closed = base.semigraphoid_closure();
        assert!(closed.contains(&rel("C", "A", &["B"])));
        assert_eq!(closed, base);

        let xyw: CiSet = [CiRelation::new(["X"], ["Y", "W"], Vec::<&str>::new()).unwrap()].into_iter().collect();
        let closed = xyw.semigraphoid_closure();
        assert!(closed.contains(&rel("X", "Y", &[])));
        assert!(closed.contains(&rel("X", "Y", &["W"])));
        assert!(closed.contains(&rel("X", "W", &[])));
        assert!(closed.contains(&rel("X", "W", &["Y"])));

        assert!(CiSet::new().semigraphoid_closure().is_empty());
    }

    #[test]
    fn contraction_fires() {
        let s: CiSet = [rel("X", "Y", &[]), rel("X", "W", &["Y"])].into_iter().collect();
        let closed = s.semigraphoid_closure();
        assert!(closed.contains(&CiRelation::new(["X"], ["W", "Y"], Vec::<&str>::new()).unwrap()));
        assert!(closed.contains(&rel("X", "W", &[])));
    }

    #[test]
    fn json_forms() {
        let d = JointDistribution::product(&[("A", 0.5)]).unwrap();
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["variables"][0], "A");
        let back: JointDistribution = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
        let bad = serde_json::json!({"variables": ["A"], "probabilities": [0.2, 0.2]});
        assert!(serde_json::from_value::<JointDistribution>(bad).is_err());

        let s: CiSet = serde_json::from_str(r#"[{"x":["C"],"y":["A"],"given":["B"]}]"#).unwrap();
        assert!(s.contains(&rel("A", "C", &["B"])));
    }
}
