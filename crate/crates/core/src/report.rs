//! Full reproduction run: CI extraction and discovery over the generic grid,
//! the degenerate (fine-tuned) parameter set with its perturbed neighbours,
//! the no-go enumeration, and a randomized d-separation soundness sweep.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discovery::{ic_star, reference_pattern, DiscoveryError, DistributionOracle, Pattern};
use crate::distributions::{CiSet, DistError};
use crate::enumeration::{no_go_report, EnumerationError, NoGoReport};
use crate::graphs::{all_dags, CptParameters, GraphError};
use crate::qsim::{self, CircuitParams};

/// Seed for the randomized soundness sweep unless overridden.
pub const DEFAULT_SEED: u64 = 20_240_917;
/// Random parameterizations per 3-node DAG in the soundness sweep.
pub const DEFAULT_TRIALS_PER_DAG: usize = 8;
/// Perturbation applied around each degenerate point.
pub const PERTURBATION: f64 = 0.01;

pub const GRID_ETA: [f64; 3] = [0.25, 0.5, 0.75];
pub const GRID_ALPHA: [f64; 3] = [FRAC_PI_6, PI / 5.0, FRAC_PI_3];
pub const GRID_PHI: [f64; 3] = [FRAC_PI_6, FRAC_PI_3, 2.0 * FRAC_PI_3];

/// Base point from which single degenerate coordinates are varied.
pub const BASE: (f64, f64, f64) = (0.5, FRAC_PI_6, FRAC_PI_3);

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Distribution(#[from] DistError),
    #[error(transparent)]
    Discovery(#[from] DiscoveryError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Params(#[from] qsim::QsimError),
}

/// The generic 3x3x3 grid.
pub fn generic_grid() -> Vec<CircuitParams> {
    let mut out = Vec::with_capacity(27);
    for eta in GRID_ETA {
        for alpha in GRID_ALPHA {
            for phi in GRID_PHI {
                out.push(CircuitParams { eta, alpha, phi });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    Eta,
    Alpha,
    Phi,
}

/// A degenerate point: one coordinate of [`BASE`] moved onto a degeneracy
/// locus.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DegenerateSpec {
    pub label: &'static str,
    pub coordinate: Coordinate,
    pub value: f64,
}

pub fn degenerate_set() -> Vec<DegenerateSpec> {
    vec![
        DegenerateSpec { label: "eta=0", coordinate: Coordinate::Eta, value: 0.0 },
        DegenerateSpec { label: "eta=1", coordinate: Coordinate::Eta, value: 1.0 },
        DegenerateSpec { label: "alpha=0", coordinate: Coordinate::Alpha, value: 0.0 },
        DegenerateSpec { label: "alpha=pi/2", coordinate: Coordinate::Alpha, value: FRAC_PI_2 },
        DegenerateSpec { label: "alpha=pi/4", coordinate: Coordinate::Alpha, value: FRAC_PI_4 },
        DegenerateSpec { label: "phi=pi/2", coordinate: Coordinate::Phi, value: FRAC_PI_2 },
    ]
}

impl DegenerateSpec {
    pub fn params(&self) -> CircuitParams {
        self.with(self.value)
    }

    fn with(&self, v: f64) -> CircuitParams {
        let (mut eta, mut alpha, mut phi) = BASE;
        match self.coordinate {
            Coordinate::Eta => eta = v,
            Coordinate::Alpha => alpha = v,
            Coordinate::Phi => phi = v,
        }
        CircuitParams { eta, alpha, phi }
    }

    /// Points at `value ± PERTURBATION`, keeping eta inside [0, 1].
    pub fn neighbours(&self) -> Vec<CircuitParams> {
        [self.value - PERTURBATION, self.value + PERTURBATION]
            .into_iter()
            .filter(|v| self.coordinate != Coordinate::Eta || (0.0..=1.0).contains(v))
            .map(|v| self.with(v))
            .collect()
    }
}

/// Relations and pattern extracted at one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct PointAnalysis {
    pub params: CircuitParams,
    pub relations: CiSet,
    pub pattern: Pattern,
    pub matches_reference_pattern: bool,
    pub circuit_residual: f64,
    pub literal_amplitude_discrepancy: f64,
}

pub fn analyze_point(params: &CircuitParams, tol: f64) -> Result<PointAnalysis, ReportError> {
    let dist = qsim::joint_distribution(&qsim::closed_form_state(params));
    let relations = dist.all_ci_relations(tol)?.semigraphoid_closure();
    let pattern = ic_star(&DistributionOracle::new(&dist, tol), &["A", "B", "C"])?;
    Ok(PointAnalysis {
        params: *params,
        matches_reference_pattern: pattern.same_structure(&reference_pattern()) && pattern.arrowhead_count() == 0,
        relations,
        pattern,
        circuit_residual: qsim::circuit_residual(params),
        literal_amplitude_discrepancy: qsim::literal_amplitude_discrepancy(params),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateAnalysis {
    pub spec: DegenerateSpec,
    pub point: PointAnalysis,
    pub strictly_contains_generic: bool,
    pub pattern_differs: bool,
    pub neighbours: Vec<PointAnalysis>,
    pub neighbours_restore_reference: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SoundnessSweep {
    pub seed: u64,
    pub dags: usize,
    pub parameterizations: usize,
    pub checks: usize,
    pub violations: Vec<String>,
}

/// For every DAG on three observed nodes and `trials` random CPTs each,
/// every d-separation must show up as an independence at `tol`.
pub fn soundness_sweep(seed: u64, trials: usize, tol: f64) -> Result<SoundnessSweep, ReportError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dags = all_dags(&["A", "B", "C"]);
    let mut checks = 0;
    let mut violations = Vec::new();
    for (gi, g) in dags.iter().enumerate() {
        let seps = g.observed_d_separations();
        for t in 0..trials {
            let params = CptParameters::random(g, &mut rng);
            let dist = g.observed_joint(&params)?;
            for r in &seps {
                checks += 1;
                let x: Vec<&str> = r.x().iter().map(String::as_str).collect();
                let y: Vec<&str> = r.y().iter().map(String::as_str).collect();
                let z: Vec<&str> = r.given().iter().map(String::as_str).collect();
                if !dist.is_conditionally_independent(&x, &y, &z, tol)? {
                    violations.push(format!("dag #{gi} trial {t}: {r}"));
                }
            }
        }
    }
    Ok(SoundnessSweep { seed, dags: dags.len(), parameterizations: dags.len() * trials, checks, violations })
}

#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub tol: f64,
    pub seed: u64,
    pub trials_per_dag: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self { tol: crate::distributions::DEFAULT_CI_TOL, seed: DEFAULT_SEED, trials_per_dag: DEFAULT_TRIALS_PER_DAG }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproductionReport {
    pub tol: f64,
    pub generic: Vec<PointAnalysis>,
    pub degenerate: Vec<DegenerateAnalysis>,
    pub no_go: NoGoReport,
    pub soundness: SoundnessSweep,
    pub failures: Vec<String>,
    pub passed: bool,
}

pub fn build_report(cfg: &ReportConfig) -> Result<ReproductionReport, ReportError> {
    let mut failures = Vec::new();
    let reference = crate::discovery::reference_relations();

    let generic = generic_grid().iter().map(|p| analyze_point(p, cfg.tol)).collect::<Result<Vec<_>, _>>()?;
    for g in &generic {
        if g.relations != reference {
            failures.push(format!("generic {:?}: relations {:?}", g.params, names(&g.relations)));
        }
        if !g.matches_reference_pattern {
            failures.push(format!("generic {:?}: pattern differs from the two-link chain", g.params));
        }
    }

    let mut degenerate = Vec::new();
    for spec in degenerate_set() {
        let point = analyze_point(&spec.params(), cfg.tol)?;
        let neighbours = spec.neighbours().iter().map(|p| analyze_point(p, cfg.tol)).collect::<Result<Vec<_>, _>>()?;
        let strictly = reference.is_subset(&point.relations) && point.relations != reference;
        let differs = !point.matches_reference_pattern;
        let restored = neighbours.iter().all(|n| n.matches_reference_pattern && n.relations == reference);
        if !(strictly && differs && restored) {
            failures.push(format!(
                "degenerate {}: strictly_contains={strictly} pattern_differs={differs} neighbours_restore={restored}",
                spec.label
            ));
        }
        degenerate.push(DegenerateAnalysis {
            spec,
            point,
            strictly_contains_generic: strictly,
            pattern_differs: differs,
            neighbours,
            neighbours_restore_reference: restored,
        });
    }

    let no_go = no_go_report(&reference_pattern())?;
    for a in no_go.assertions.iter().filter(|a| !a.passed) {
        failures.push(format!("no-go assertion {} failed: {:?}", a.name, a.witnesses));
    }

    let soundness = soundness_sweep(cfg.seed, cfg.trials_per_dag, cfg.tol)?;
    if !soundness.violations.is_empty() {
        failures.push(format!("{} d-separation soundness violations", soundness.violations.len()));
    }

    Ok(ReproductionReport {
        tol: cfg.tol,
        generic,
        degenerate,
        no_go,
        soundness,
        passed: failures.is_empty(),
        failures,
    })
}

fn names(s: &CiSet) -> Vec<String> {
    s.iter().map(ToString::to_string).collect()
}
