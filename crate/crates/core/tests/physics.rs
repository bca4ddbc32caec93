use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qdc_core::distributions::{CiRelation, CiSet, JointDistribution};
use qdc_core::qsim::{self, CircuitParams, Qubit, StateVector};

fn params() -> impl Strategy<Value = CircuitParams> {
    (0.0..=1.0f64, -PI..PI, -2.0 * PI..2.0 * PI).prop_map(|(eta, alpha, phi)| CircuitParams { eta, alpha, phi })
}

fn random_state() -> impl Strategy<Value = StateVector> {
    prop::array::uniform8((-1.0..1.0f64, -1.0..1.0f64)).prop_filter_map("zero vector", |raw| {
        let n: f64 = raw.iter().map(|(r, i)| r * r + i * i).sum::<f64>().sqrt();
        (n > 1e-3).then(|| StateVector::from_amplitudes(raw.map(|(r, i)| Complex64::new(r / n, i / n))).unwrap())
    })
}

fn outcome_law(p: &CircuitParams) -> [f64; 8] {
    let (c2, s2) = (p.alpha.cos().powi(2), p.alpha.sin().powi(2));
    let w = [(p.phi / 2.0).cos().powi(2), (p.phi / 2.0).sin().powi(2)];
    let mut out = [0.0; 8];
    for a in 0..2 {
        out[4 * a] = p.eta * c2 / 2.0;
        out[4 * a + 1] = p.eta * s2 / 2.0;
        out[4 * a + 2] = (1.0 - p.eta) * s2 * w[a];
        out[4 * a + 3] = (1.0 - p.eta) * c2 * w[a];
    }
    out
}

/// Positive weights over `n` binary variables named A, B, C, ...
fn random_joint(n: usize) -> impl Strategy<Value = JointDistribution> {
    prop::collection::vec(0.01..1.0f64, 1 << n).prop_map(move |w| {
        let total: f64 = w.iter().sum();
        let names = (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect();
        JointDistribution::new(names, w.iter().map(|x| x / total).collect()).unwrap()
    })
}

fn all_relations(vars: &[&str]) -> Vec<CiRelation> {
    let n = vars.len();
    let mut out = Vec::new();
    // Assign each variable to X (1), Y (2), Z (3) or unused (0).
    for code in 0..4usize.pow(n as u32) {
        let mut parts: [Vec<&str>; 4] = Default::default();
        let mut c = code;
        for v in vars {
            parts[c % 4].push(v);
            c /= 4;
        }
        if !parts[1].is_empty() && !parts[2].is_empty() && parts[1] < parts[2] {
            out.push(CiRelation::new(parts[1].clone(), parts[2].clone(), parts[3].clone()).unwrap());
        }
    }
    out
}

proptest! {
    #[test]
    fn closed_form_is_normalized(p in params()) {
        prop_assert!((qsim::closed_form_state(&p).norm_sqr() - 1.0).abs() <= 1e-12);
        prop_assert!((qsim::literal_closed_form_state(&p).norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn gates_are_unitary(s in random_state(), t in random_state(), alpha in -PI..PI, phi in -PI..PI) {
        for gate in [qsim::hadamard(), qsim::phase(phi), qsim::rotation(alpha)] {
            for q in [Qubit::A, Qubit::B, Qubit::C] {
                let (gs, gt) = (s.apply(q, &gate), t.apply(q, &gate));
                prop_assert!((gs.inner(&gt) - s.inner(&t)).norm() <= 1e-12);
            }
            let (gs, gt) = (s.apply_controlled(Qubit::B, Qubit::A, &gate), t.apply_controlled(Qubit::B, Qubit::A, &gate));
            prop_assert!((gs.inner(&gt) - s.inner(&t)).norm() <= 1e-12);
        }
    }

    #[test]
    fn circuit_matches_closed_form(p in params()) {
        prop_assert!(qsim::circuit_residual(&p) <= 1e-12);
    }

    #[test]
    fn closed_form_follows_outcome_law(p in params()) {
        let d = qsim::joint_distribution(&qsim::closed_form_state(&p));
        for (got, want) in d.probabilities().iter().zip(outcome_law(&p)) {
            prop_assert!((got - want).abs() <= 1e-12);
        }
        let lit = qsim::joint_distribution(&qsim::literal_closed_form_state(&p));
        for (got, want) in lit.probabilities().iter().zip(outcome_law(&p)) {
            prop_assert!((got - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn condition_and_marginalize_commute(d in random_joint(4), v in 0u8..2) {
        let a = d.condition(&[("B", v)]).unwrap().marginalize(&["A", "C"]).unwrap();
        let b = d.marginalize(&["A", "B", "C"]).unwrap().condition(&[("B", v)]).unwrap().marginalize(&["A", "C"]).unwrap();
        prop_assert_eq!(a.variables(), b.variables());
        for (x, y) in a.probabilities().iter().zip(b.probabilities()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn marginal_of_marginal(d in random_joint(4)) {
        let direct = d.marginalize(&["D", "A"]).unwrap();
        let staged = d.marginalize(&["A", "C", "D"]).unwrap().marginalize(&["A", "D"]).unwrap();
        prop_assert_eq!(direct.variables(), staged.variables());
        for (x, y) in direct.probabilities().iter().zip(staged.probabilities()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn ci_is_symmetric(d in random_joint(3), tol in prop::sample::select(vec![1e-9, 1e-3, 0.05])) {
        let vars = ["A", "B", "C"];
        for r in all_relations(&vars) {
            let x: Vec<&str> = r.x().iter().map(String::as_str).collect();
            let y: Vec<&str> = r.y().iter().map(String::as_str).collect();
            let z: Vec<&str> = r.given().iter().map(String::as_str).collect();
            prop_assert_eq!(
                d.is_conditionally_independent(&x, &y, &z, tol).unwrap(),
                d.is_conditionally_independent(&y, &x, &z, tol).unwrap()
            );
        }
    }

    #[test]
    fn closure_is_idempotent_and_monotone(mask in prop::collection::vec(any::<bool>(), 50), extra in prop::collection::vec(any::<bool>(), 50)) {
        let universe = all_relations(&["A", "B", "C", "D"]);
        let pick = |m: &[bool]| -> CiSet {
            universe.iter().zip(m.iter().cycle()).filter(|(_, keep)| **keep).map(|(r, _)| r.clone()).collect()
        };
        let small: CiSet = pick(&mask).iter().take(6).cloned().collect();
        let large: CiSet = small.iter().cloned().chain(pick(&extra).iter().take(4).cloned()).collect();
        let c = small.semigraphoid_closure();
        prop_assert_eq!(&c.semigraphoid_closure(), &c);
        prop_assert!(small.is_subset(&c));
        prop_assert!(c.is_subset(&large.semigraphoid_closure()));
    }
}

#[test]
fn circuit_matches_closed_form_on_grid() {
    let mut n = 0;
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                let p = CircuitParams { eta: i as f64 / 4.0, alpha: j as f64 * PI / 4.0, phi: k as f64 * PI / 2.0 };
                let circuit = qsim::joint_distribution(&qsim::apply_delayed_choice_circuit(
                    &qsim::build_initial_state(p.eta).unwrap(),
                    &p,
                ));
                let closed = qsim::joint_distribution(&qsim::closed_form_state(&p));
                for ((x, y), z) in circuit.probabilities().iter().zip(closed.probabilities()).zip(outcome_law(&p)) {
                    assert!((x - y).abs() <= 1e-12 && (y - z).abs() <= 1e-12, "{p:?}");
                }
                n += 1;
            }
        }
    }
    assert_eq!(n, 125);
}

#[test]
fn circuit_amplitudes_match_closed_form() {
    let p = CircuitParams { eta: 0.37, alpha: 0.81, phi: 2.2 };
    let circuit = qsim::apply_delayed_choice_circuit(&qsim::build_initial_state(p.eta).unwrap(), &p);
    let closed = qsim::closed_form_state(&p);
    for (x, y) in circuit.amplitudes().iter().zip(closed.amplitudes()) {
        assert!((x - y).norm() <= 1e-12);
    }
    // The hand-written form differs only in the sign of the b = c = 1 wave amplitudes.
    let literal = qsim::literal_closed_form_state(&p);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let (u, l) = (closed.amplitude(a, b, c), literal.amplitude(a, b, c));
                let want = if b == 1 && c == 1 { -u } else { u };
                assert!((l - want).norm() <= 1e-12, "{a}{b}{c}");
            }
        }
    }
}

#[test]
fn rejects_out_of_domain() {
    assert!(CircuitParams::new(1.2, 0.0, 0.0).is_err());
    assert!(CircuitParams::new(0.5, f64::NAN, 0.0).is_err());
    assert!(qsim::build_initial_state(-0.1).is_err());
    assert!(StateVector::from_amplitudes([Complex64::new(0.5, 0.0); 8]).is_err());
}

#[test]
fn conditioning_on_null_event_fails() {
    let d = qsim::joint_distribution(&qsim::closed_form_state(&CircuitParams { eta: 1.0, alpha: 0.3, phi: 0.4 }));
    assert!(d.condition(&[("B", 1)]).is_err());
    assert!(d.condition(&[("B", 0)]).is_ok());
}
