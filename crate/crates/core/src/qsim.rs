//! Three-qubit statevector simulation of the entanglement-controlled
//! delayed-choice interferometer.
//!
//! Qubit order is (A, B, C). Basis label `(a, b, c)` maps to index
//! `4a + 2b + c`. A is the photon path, B the quantum control of the second
//! beamsplitter (`|1>` = present), C the partner entangled with B and rotated
//! by `alpha` before detection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::JointDistribution;

/// Normalization tolerance for every state built here.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum QsimError {
    #[error("domain error: {0}")]
    Domain(String),
}

/// Circuit parameters: entanglement `eta`, rotation `alpha` of C, and
/// interferometer phase `phi` (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub eta: f64,
    pub alpha: f64,
    pub phi: f64,
}

impl CircuitParams {
    pub fn new(eta: f64, alpha: f64, phi: f64) -> Result<Self, QsimError> {
        check_eta(eta)?;
        if !alpha.is_finite() {
            return Err(QsimError::Domain(format!("alpha must be finite, got {alpha}")));
        }
        if !phi.is_finite() {
            return Err(QsimError::Domain(format!("phi must be finite, got {phi}")));
        }
        Ok(Self { eta, alpha, phi })
    }
}

fn check_eta(eta: f64) -> Result<(), QsimError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(QsimError::Domain(format!("eta must lie in [0, 1], got {eta}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    A,
    B,
    C,
}

impl Qubit {
    fn mask(self) -> usize {
        match self {
            Qubit::A => 0b100,
            Qubit::B => 0b010,
            Qubit::C => 0b001,
        }
    }
}

/// A 2x2 complex matrix, row-major.
pub type Gate = [[Complex64; 2]; 2];

pub fn hadamard() -> Gate {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// `diag(1, e^{i phi})`
pub fn phase(phi: f64) -> Gate {
    let zero = Complex64::new(0.0, 0.0);
    [[Complex64::new(1.0, 0.0), zero], [zero, Complex64::from_polar(1.0, phi)]]
}

/// Real rotation `[[cos a, sin a], [-sin a, cos a]]`.
pub fn rotation(alpha: f64) -> Gate {
    let (s, c) = alpha.sin_cos();
    [[Complex64::new(c, 0.0), Complex64::new(s, 0.0)], [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)]]
}

/// Single-qubit pure state `amp0 |0> + amp1 |1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub amp0: Complex64,
    pub amp1: Complex64,
}

impl QubitState {
    pub fn amp(&self, bit: usize) -> Complex64 {
        if bit == 0 {
            self.amp0
        } else {
            self.amp1
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }
}

/// Particle-like state `(|0> + e^{i phi}|1>)/sqrt 2`.
pub fn particle_state(phi: f64) -> QubitState {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    QubitState { amp0: Complex64::new(r, 0.0), amp1: Complex64::from_polar(r, phi) }
}

/// Wave-like state `e^{i phi/2}(cos(phi/2)|0> - i sin(phi/2)|1>)`.
pub fn wave_state(phi: f64) -> QubitState {
    let global = Complex64::from_polar(1.0, phi / 2.0);
    let (s, c) = (phi / 2.0).sin_cos();
    QubitState { amp0: global * c, amp1: global * Complex64::new(0.0, -s) }
}

/// Eight amplitudes over (A, B, C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    amplitudes: [Complex64; 8],
}

pub fn basis_index(a: usize, b: usize, c: usize) -> usize {
    4 * a + 2 * b + c
}

impl StateVector {
    /// Builds a state from raw amplitudes; rejects anything not normalized
    /// to within [`NORM_TOL`].
    pub fn from_amplitudes(amplitudes: [Complex64; 8]) -> Result<Self, QsimError> {
        let s = Self { amplitudes };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(QsimError::Domain(format!("state not normalized: |psi|^2 = {n}")));
        }
        Ok(s)
    }

    pub fn basis(a: usize, b: usize, c: usize) -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); 8];
        amplitudes[basis_index(a, b, c)] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64; 8] {
        &self.amplitudes
    }

    pub fn amplitude(&self, a: usize, b: usize, c: usize) -> Complex64 {
        self.amplitudes[basis_index(a, b, c)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(other.amplitudes.iter()).map(|(l, r)| l.conj() * r).sum()
    }

    /// Applies `gate` to `target`.
    pub fn apply(&self, target: Qubit, gate: &Gate) -> StateVector {
        self.apply_if(None, target, gate)
    }

    /// Applies `gate` to `target` on the subspace where `control` is `|1>`.
    pub fn apply_controlled(&self, control: Qubit, target: Qubit, gate: &Gate) -> StateVector {
        self.apply_if(Some(control), target, gate)
    }

    fn apply_if(&self, control: Option<Qubit>, target: Qubit, gate: &Gate) -> StateVector {
        let t = target.mask();
        let mut out = self.amplitudes;
        for i0 in (0..8).filter(|i| i & t == 0) {
            if let Some(c) = control {
                if i0 & c.mask() == 0 {
                    continue;
                }
            }
            let i1 = i0 | t;
            let (x0, x1) = (self.amplitudes[i0], self.amplitudes[i1]);
            out[i0] = gate[0][0] * x0 + gate[0][1] * x1;
            out[i1] = gate[1][0] * x0 + gate[1][1] * x1;
        }
        StateVector { amplitudes: out }
    }

    /// Reduced single-qubit state of A, provided B and C sit in the definite
    /// basis state `(b, c)`. Returns `None` when that branch carries
    /// (numerically) no weight on its complement, i.e. A is not separable.
    pub fn a_register(&self, b: usize, c: usize) -> Option<QubitState> {
        let mut rest = 0.0;
        for (i, z) in self.amplitudes.iter().enumerate() {
            if (i >> 1) & 1 != b || i & 1 != c {
                rest += z.norm_sqr();
            }
        }
        if rest > NORM_TOL {
            return None;
        }
        Some(QubitState { amp0: self.amplitude(0, b, c), amp1: self.amplitude(1, b, c) })
    }

    /// Serializable form: eight `[re, im]` pairs in index order.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.amplitudes.iter().map(|z| [z.re, z.im]).collect()
    }
}

/// `|0>_A (sqrt(eta)|00>_BC + sqrt(1-eta)|11>_BC)`
pub fn build_initial_state(eta: f64) -> Result<StateVector, QsimError> {
    check_eta(eta)?;
    let mut amplitudes = [Complex64::new(0.0, 0.0); 8];
    amplitudes[basis_index(0, 0, 0)] = Complex64::new(eta.sqrt(), 0.0);
    amplitudes[basis_index(0, 1, 1)] = Complex64::new((1.0 - eta).sqrt(), 0.0);
    Ok(StateVector { amplitudes })
}

/// First beamsplitter, phase shift, B-controlled second beamsplitter, then
/// the rotation of C.
pub fn apply_delayed_choice_circuit(state: &StateVector, params: &CircuitParams) -> StateVector {
    state
        .apply(Qubit::A, &hadamard())
        .apply(Qubit::A, &phase(params.phi))
        .apply_controlled(Qubit::B, Qubit::A, &hadamard())
        .apply(Qubit::C, &rotation(params.alpha))
}

/// Pre-measurement state built directly from the particle/wave registers,
/// with the rotation of C taken as [`rotation`]:
///
/// ```text
/// (sqrt(eta) cos a |p>|0> + sqrt(1-eta) sin a |w>|1>) |0>_C
/// - (sqrt(eta) sin a |p>|0> - sqrt(1-eta) cos a |w>|1>) |1>_C
/// ```
pub fn closed_form_state(params: &CircuitParams) -> StateVector {
    build_closed_form(params, 1.0)
}

/// The same expansion with the minus sign in front of the `|1>_C` bracket
/// distributed over both terms. No rotation acting on C alone produces it;
/// it agrees with [`closed_form_state`] on every probability and differs in
/// the sign of the `|w>|1>|1>` amplitudes.
pub fn literal_closed_form_state(params: &CircuitParams) -> StateVector {
    build_closed_form(params, -1.0)
}

fn build_closed_form(params: &CircuitParams, wave_c1_sign: f64) -> StateVector {
    let p = particle_state(params.phi);
    let w = wave_state(params.phi);
    let (sa, ca) = params.alpha.sin_cos();
    let (se, sw) = (params.eta.sqrt(), (1.0 - params.eta).sqrt());
    let mut amplitudes = [Complex64::new(0.0, 0.0); 8];
    for a in 0..2 {
        amplitudes[basis_index(a, 0, 0)] = p.amp(a) * (se * ca);
        amplitudes[basis_index(a, 1, 0)] = w.amp(a) * (sw * sa);
        amplitudes[basis_index(a, 0, 1)] = p.amp(a) * (-se * sa);
        amplitudes[basis_index(a, 1, 1)] = w.amp(a) * (wave_c1_sign * sw * ca);
    }
    StateVector { amplitudes }
}

/// Born-rule detection distribution over variables `A`, `B`, `C`.
pub fn joint_distribution(state: &StateVector) -> JointDistribution {
    let probabilities = state.amplitudes.iter().map(|z| z.norm_sqr()).collect();
    JointDistribution::new(vec!["A".into(), "B".into(), "C".into()], probabilities)
        .expect("a normalized state yields a valid distribution")
}

/// Largest entrywise gap between the closed-form and the simulated circuit
/// distributions.
pub fn circuit_residual(params: &CircuitParams) -> f64 {
    let init = build_initial_state(params.eta).expect("params validated on construction");
    let simulated = joint_distribution(&apply_delayed_choice_circuit(&init, params));
    let closed = joint_distribution(&closed_form_state(params));
    simulated.probabilities().iter().zip(closed.probabilities()).map(|(l, r)| (l - r).abs()).fold(0.0, f64::max)
}

/// Largest amplitude gap between [`literal_closed_form_state`] and
/// [`closed_form_state`].
pub fn literal_amplitude_discrepancy(params: &CircuitParams) -> f64 {
    let u = closed_form_state(params);
    let l = literal_closed_form_state(params);
    u.amplitudes.iter().zip(l.amplitudes.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
