use proptest::prelude::*;
use surprise_core::closed_form::discount_factor;
use surprise_core::{
    evaluate_scaled, surprise_kernel, surprise_modulation, utility, Branch, HazardSpec,
    ModelParams, Modulation, ResolutionNode, ScalingMode, SurpriseValue,
};

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (
        1.01f64..6.0,
        1.01f64..3.0,
        0.0f64..5.0,
        0.0f64..20.0,
        any::<bool>(),
    )
        .prop_map(|(k, alpha, k1, k2, exp)| {
            let m = if exp {
                Modulation::ExponentialNegative
            } else {
                Modulation::Hyperbolic
            };
            ModelParams::new(k, alpha, k1, k2)
                .unwrap()
                .with_modulation(m)
        })
}

fn node_from(weights: Vec<f64>, children: Vec<ResolutionNode>, weight: f64) -> ResolutionNode {
    let total: f64 = weights.iter().sum();
    ResolutionNode::Internal {
        branches: weights
            .into_iter()
            .zip(children)
            .map(|(w, c)| Branch::new(w / total, c))
            .collect(),
        surprise_weight: weight,
    }
}

fn tree_strategy() -> impl Strategy<Value = ResolutionNode> {
    let leaf = (-10.0f64..10.0).prop_map(ResolutionNode::terminal);
    leaf.prop_recursive(4, 40, 3, |inner| {
        prop::collection::vec((0.05f64..1.0, inner), 1..4).prop_flat_map(|pairs| {
            let (ws, cs): (Vec<f64>, Vec<ResolutionNode>) = pairs.into_iter().unzip();
            prop_oneof![Just(1.0), 0.0f64..3.0]
                .prop_map(move |weight| node_from(ws.clone(), cs.clone(), weight))
        })
    })
}

proptest! {
    #[test]
    fn kernel_is_odd_up_to_k(z in 1e-6f64..50.0, params in params_strategy()) {
        let pos = surprise_kernel(z, &params).unwrap();
        let neg = surprise_kernel(-z, &params).unwrap();
        prop_assert!((neg + params.k() * pos).abs() <= 1e-12 * pos.max(1.0) * params.k());
    }

    #[test]
    fn kernel_is_increasing(a in -20.0f64..20.0, b in -20.0f64..20.0, params in params_strategy()) {
        prop_assume!(a < b);
        prop_assert!(surprise_kernel(a, &params).unwrap() < surprise_kernel(b, &params).unwrap());
    }

    #[test]
    fn kernel_convex_on_gains(z in 0.0f64..20.0, h in 1e-3f64..2.0, params in params_strategy()) {
        let f = |x: f64| surprise_kernel(x, &params).unwrap();
        let second = f(z + 2.0 * h) - 2.0 * f(z + h) + f(z);
        prop_assert!(second >= -1e-9 * f(z + 2.0 * h).max(1.0));
    }

    #[test]
    fn modulation_is_positive_and_monotone(
        a in -30.0f64..5.0,
        b in -30.0f64..5.0,
        params in params_strategy(),
    ) {
        prop_assume!(a <= b);
        let ga = surprise_modulation(SurpriseValue::new(a).unwrap(), &params);
        let gb = surprise_modulation(SurpriseValue::new(b).unwrap(), &params);
        prop_assert!(ga > 0.0);
        prop_assert!(ga <= gb);
    }

    #[test]
    fn utility_is_linear_in_expected_value(
        u0 in 0.0f64..100.0,
        c in 0.0f64..10.0,
        delta in -5.0f64..2.0,
        params in params_strategy(),
    ) {
        let d = SurpriseValue::new(delta).unwrap();
        let scaled = utility(c * u0, d, &params);
        let expected = c * utility(u0, d, &params);
        prop_assert!((scaled - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn tree_is_a_martingale(tree in tree_strategy()) {
        for (path, r) in tree.martingale_residuals().unwrap() {
            prop_assert!(r.abs() < 1e-12, "{path}: {r}");
        }
    }

    #[test]
    fn stage_sum_equals_node_sum(tree in tree_strategy(), params in params_strategy()) {
        let stages: f64 = tree.stage_surprises(&params).unwrap().iter().sum();
        let nodes: f64 = tree
            .node_contributions(&params)
            .unwrap()
            .iter()
            .map(|c| c.weighted())
            .sum();
        prop_assert!((stages - nodes).abs() <= 1e-12 * stages.abs().max(1.0));
    }

    #[test]
    fn collapse_preserves_evaluation(tree in tree_strategy(), params in params_strategy()) {
        let a = tree.evaluate(&params).unwrap();
        let b = tree.collapse_deterministic().evaluate(&params).unwrap();
        prop_assert_eq!(a.expected_value, b.expected_value);
        prop_assert!((a.total_surprise - b.total_surprise).abs() <= 1e-12 * a.total_surprise.abs().max(1.0));
    }

    #[test]
    fn json_round_trip(tree in tree_strategy()) {
        let (back, report) = ResolutionNode::from_json(&tree.to_json()).unwrap();
        prop_assert!(report.renormalized.iter().all(|r| (r.original_sum - 1.0).abs() < 1e-12));
        prop_assert_eq!(back.depth(), tree.depth());
        prop_assert_eq!(back.payoffs(), tree.payoffs());
        let (a, b) = (back.expected_value().unwrap(), tree.expected_value().unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn full_scaling_is_affine_equivariant(
        tree in tree_strategy(),
        a in 0.01f64..100.0,
        b in -100.0f64..100.0,
        params in params_strategy(),
    ) {
        let mapped = tree.map_payoffs(&|x| a * x + b);
        let base = evaluate_scaled(&tree, &params, ScalingMode::Full).unwrap().utility;
        let moved = evaluate_scaled(&mapped, &params, ScalingMode::Full).unwrap().utility;
        let expected = a * base + b;
        prop_assert!((moved - expected).abs() <= 1e-9 * expected.abs().max(1.0));
    }

    // Holds for hyperbolic modulation at small hazards; exponential
    // modulation with large k2 can rise with p.
    #[test]
    fn discount_factor_falls_with_delay_and_hazard(
        p in 0.002f64..0.2,
        n in 0u32..60,
        k in 2.0f64..5.0,
        alpha in 1.2f64..2.0,
        k2 in 0.0f64..20.0,
    ) {
        let params = ModelParams::new(k, alpha, 2.0, k2).unwrap();
        let at = |p: f64, n: u32| discount_factor(&HazardSpec::new(p, n as f64).unwrap(), &params);
        prop_assert!(at(p, n + 1) < at(p, n));
        prop_assert!(at(p * 1.01, n + 1) < at(p, n + 1));
    }
}

#[test]
fn zero_variance_node_is_silent() {
    let params = ModelParams::default();
    let flat = ResolutionNode::internal(vec![
        Branch::new(0.3, ResolutionNode::terminal(2.0)),
        Branch::new(0.7, ResolutionNode::terminal(2.0)),
    ])
    .unwrap();
    let r = flat.evaluate(&params).unwrap();
    assert_eq!(r.total_surprise, 0.0);
    assert_eq!(r.utility, 2.0);
}

#[test]
fn collapse_unwraps_certain_links() {
    let chain = ResolutionNode::internal(vec![Branch::new(
        1.0,
        ResolutionNode::internal(vec![Branch::new(
            1.0,
            ResolutionNode::internal(vec![Branch::new(1.0, ResolutionNode::terminal(1.0))])
                .unwrap(),
        )])
        .unwrap(),
    )])
    .unwrap();
    assert_eq!(
        chain.collapse_deterministic(),
        ResolutionNode::terminal(1.0)
    );
}
