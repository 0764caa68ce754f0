use std::f64::consts::PI;

use cavity_grover::gate::{build_ideal_cpf, build_noisy_cpf, GateParams};
use cavity_grover::grover::{run_search, uniform_state, GateChoice};
use cavity_grover::BasisState;
use proptest::prelude::*;

const OMEGA1: f64 = 2.0 * PI * 4.9e3;

fn noisy(n: usize, mu: f64) -> GateChoice {
    GateChoice::Noisy(GateParams::new(n, OMEGA1, 10.0, mu).unwrap())
}

#[test]
fn ideal_search_is_unitary() {
    let n = 6;
    let oracle = build_ideal_cpf(n).unwrap();
    let mut state = uniform_state(n).unwrap();
    for _ in 0..20 {
        state.grover_iterate(&oracle, &oracle).unwrap();
        assert!((state.survival() - 1.0).abs() < 1e-12);
        assert!(state.leaked() < 1e-12);
    }
}

#[test]
fn noisy_survival_never_grows() {
    let marked = BasisState::parse_for("0011000000", 10).unwrap();
    let trace = run_search(10, &marked, &noisy(10, 0.1), 30).unwrap();
    for w in trace.rows.windows(2) {
        assert!(w[1].survival <= w[0].survival + 1e-15);
        assert!(w[1].p_success <= w[1].survival + 1e-15);
    }
}

#[test]
fn noisy_gate_has_no_gain() {
    let diag = build_noisy_cpf(&GateParams::new(8, OMEGA1, 3.0, 0.1).unwrap()).unwrap();
    assert!(diag.entries().iter().all(|e| e.abs() <= 1.0 + 1e-15));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn noisy_search_is_covariant_in_marked_state(index in 0usize..1024) {
        let reference = BasisState::new(10, 0).unwrap();
        let marked = BasisState::new(10, index).unwrap();
        let gate = noisy(10, 0.05);
        let a = run_search(10, &reference, &gate, 12).unwrap();
        let b = run_search(10, &marked, &gate, 12).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            prop_assert!((x.p_success - y.p_success).abs() < 1e-12);
            prop_assert!((x.survival - y.survival).abs() < 1e-12);
        }
    }
}
