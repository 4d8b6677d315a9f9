//! Property-based checks on the simulator, the adjoint kernel, and the
//! text formats, over randomized feasible inputs.

use dicekit::diffkernel::fd_check;
use dicekit::dynamics::{carbon_step, simulate, Controls, PerturbTarget, Perturbation};
use dicekit::optimizer::{project, ScenarioConstraints};
use dicekit::params::{params_from_str, to_text, Params};
use dicekit::testdata;
use proptest::prelude::*;

fn desk() -> Params {
    testdata::desk()
}

/// Feasible interior controls for the desk horizon, componentwise in
/// (margin, 1 - margin) of each box.
fn controls_strategy(p: &Params, margin: f64) -> impl Strategy<Value = Controls> {
    let n = p.t_max;
    let mu_caps: Vec<f64> = p.pi35.clone();
    (
        proptest::collection::vec(margin..(1.0 - margin), n),
        proptest::collection::vec(margin..(1.0 - margin), n),
    )
        .prop_map(move |(s, f)| {
            let mu = f.iter().zip(&mu_caps).map(|(f, cap)| f * cap).collect();
            Controls::new(s, mu)
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    /// Adjoint gradients agree with central finite differences at any
    /// feasible interior point, in the block-normalized metric.
    #[test]
    fn adjoint_matches_finite_differences(
        u in controls_strategy(&desk(), 0.02),
    ) {
        let p = desk();
        let rep = fd_check(&p, &u, 1e-5).unwrap();
        prop_assert!(
            rep.max_rel_error() <= 1e-6,
            "rel error {:.3e}\n{}",
            rep.max_rel_error(),
            rep.render()
        );
    }

    /// An emission-equation perturbation at period t leaves all state
    /// strictly before t unchanged.
    #[test]
    fn perturbations_are_causal(
        u in controls_strategy(&desk(), 0.02),
        t in 2usize..=20,
        amount in -0.5f64..0.5,
    ) {
        let p = desk();
        let base = simulate(&p, &u, &[]).unwrap();
        let bumped = simulate(&p, &u, &[Perturbation {
            target: PerturbTarget::EmissionsEq,
            period: t,
            amount,
        }]).unwrap();
        for i in 0..t - 1 {
            prop_assert_eq!(base.m_at[i], bumped.m_at[i]);
            prop_assert_eq!(base.t_at[i], bumped.t_at[i]);
            prop_assert_eq!(base.k[i], bumped.k[i]);
            prop_assert_eq!(base.cons[i], bumped.cons[i]);
        }
    }

    /// The three-box exchange conserves total carbon up to the injected
    /// emissions, for arbitrary box states.
    #[test]
    fn carbon_is_conserved(
        m_at in 100.0f64..5000.0,
        m_up in 100.0f64..5000.0,
        m_lo in 100.0f64..20000.0,
        e in 0.0f64..200.0,
        steps in 1usize..60,
    ) {
        let p = testdata::dice2016();
        let (mut a, mut u, mut l) = (m_at, m_up, m_lo);
        let mut injected = 0.0;
        for _ in 0..steps {
            (a, u, l) = carbon_step(a, u, l, e, &p);
            injected += e;
        }
        let total0 = m_at + m_up + m_lo + injected;
        prop_assert!(((a + u + l - total0) / total0).abs() <= 1e-9);
    }

    /// Parameter files survive a text round-trip bit-for-bit, including
    /// mutated scalar values.
    #[test]
    fn params_text_round_trip(
        pi2 in -3.0f64..-0.5,
        pi3 in 1.001f64..1.1,
        temp_scale in 0.5f64..2.0,
    ) {
        let mut p = desk();
        p.pi2 = pi2;
        p.pi3 = pi3;
        p.pi32 *= temp_scale;
        let text = to_text(&p);
        let q = params_from_str(&text).unwrap();
        prop_assert_eq!(p, q);
    }

    /// Projection onto the box is idempotent and never leaves the box.
    #[test]
    fn projection_is_idempotent(
        s in proptest::collection::vec(-2.0f64..3.0, 20),
        mu in proptest::collection::vec(-2.0f64..3.0, 20),
    ) {
        let p = desk();
        let sc = ScenarioConstraints::default();
        let raw = Controls::new(s, mu);
        let once = project(&raw, &p, &sc);
        once.check_bounds(&p).unwrap();
        let twice = project(&once, &p, &sc);
        prop_assert_eq!(once, twice);
    }
}
