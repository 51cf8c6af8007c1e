use graphmm::baseline_oracle::{pg_solve, OracleConfig};
use graphmm::graph_model::{edge_count, objective, ProblemInstance};
use graphmm::mm_solver::{compute_c, mm_update, solve, solve_with_observer, surrogate_value, SolverConfig};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = ProblemInstance> {
    (3usize..=12).prop_flat_map(|p| {
        (
            Just(p),
            prop::collection::vec(0.0f64..5.0, edge_count(p)),
            0.05f64..20.0,
            0.05f64..20.0,
        )
            .prop_map(|(p, d, a, b)| ProblemInstance::new(p, d, a, b).unwrap())
    })
}

fn positive_weights(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..4.0, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_never_increases(prob in instance()) {
        let res = solve(&prob, &SolverConfig::default()).unwrap();
        prop_assert!(res.converged);
        prop_assert!(res.trace.max_increase() <= 1e-10, "increase {}", res.trace.max_increase());
    }

    #[test]
    fn coefficients_sum_to_alpha_p(prob in instance()) {
        let target = prob.alpha() * prob.nodes() as f64;
        let mut worst = 0.0f64;
        solve_with_observer(&prob, &SolverConfig::default(), |v| {
            worst = worst.max((v.c_sum() - target).abs() / target);
        })
        .unwrap();
        prop_assert!(worst <= 1e-12, "rel err {worst}");
    }

    #[test]
    fn update_solves_its_quadratic(
        (prob, w) in instance().prop_flat_map(|pr| { let m = pr.edges(); (Just(pr), positive_weights(m)) })
    ) {
        let c = compute_c(&w, &prob).unwrap();
        let next = mm_update(&c, &prob).unwrap();
        let beta = prob.beta();
        for ((&cj, &wj), &dj) in c.iter().zip(&next).zip(prob.distances().values()) {
            prop_assert!(wj >= 0.0);
            let residual = 2.0 * dj * wj + 2.0 * beta * wj * wj - cj;
            prop_assert!(residual.abs() <= 1e-10 * cj.max(1.0), "residual {residual}");
        }
    }

    #[test]
    fn one_step_decreases_surrogate_and_objective(
        (prob, w) in instance().prop_flat_map(|pr| { let m = pr.edges(); (Just(pr), positive_weights(m)) })
    ) {
        let next = mm_update(&compute_c(&w, &prob).unwrap(), &prob).unwrap();
        let g_next = surrogate_value(&next, &w, &prob).unwrap();
        let g_here = surrogate_value(&w, &w, &prob).unwrap();
        let f_next = objective(&next, &prob).unwrap();
        let f_here = objective(&w, &prob).unwrap();
        prop_assert!(g_next <= g_here + 1e-9);
        prop_assert!(f_next <= g_next + 1e-9);
        prop_assert!(f_next <= f_here + 1e-9);
    }

    #[test]
    fn elimination_does_not_change_the_optimum(prob in instance()) {
        let tight = SolverConfig { epsilon: 1e-13, max_iters: 1_000_000, ..Default::default() };
        let with = solve(&prob, &tight).unwrap();
        let without = solve(&prob, &SolverConfig { elimination_enabled: false, ..tight }).unwrap();
        let rel = (with.f_star - without.f_star).abs() / without.f_star.abs().max(1.0);
        prop_assert!(rel <= 1e-6, "{} vs {}", with.f_star, without.f_star);
    }
}

#[test]
fn matches_projected_gradient_on_a_dense_instance() {
    let p = 6;
    let d: Vec<f64> = (0..edge_count(p)).map(|k| ((k * 7) % 5) as f64 * 0.3).collect();
    let prob = ProblemInstance::new(p, d, 2.0, 0.5).unwrap();
    let mm = solve(&prob, &SolverConfig { epsilon: 1e-14, max_iters: 1_000_000, ..Default::default() }).unwrap();
    let pg = pg_solve(&prob, &OracleConfig::default()).unwrap();
    assert!((mm.f_star - pg.f_star).abs() <= 1e-8 * pg.f_star.abs(), "{} vs {}", mm.f_star, pg.f_star);
}
