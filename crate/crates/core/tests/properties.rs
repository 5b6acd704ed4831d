use std::sync::Arc;

use distp::audit::{audit_distp, audit_div_dp, audit_xdistp, expected_utility_loss};
use distp::divergence::{
    approx_max_divergence, approx_max_divergence_exhaustive, delta_required, max_divergence, Divergence, FDivergence,
};
use distp::mechanism::{
    build_coupling_mechanism, pre_process, seq_compose, AdaptiveKernel, CouplingMechanismSpec, CouplingMode,
    Fallback,
};
use distp::prob::{
    DistributionPairRelation, FiniteDistribution, Ground, GroundMetric, Label, PointRelation, StochasticKernel,
    TaggedDistribution,
};
use distp::tolerance::{TAU_MASS, TAU_NUM};
use distp::transport::{
    diameter, emd, lifted_member, northwest_corner, validate_coupling, wasserstein_inf, wasserstein_p, Coupling,
    DistributionMetric,
};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 96,
        failure_persistence: None,
        rng_seed: RngSeed::Fixed(0x5eed),
        ..ProptestConfig::default()
    }
}

fn weight() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 5 => 0.02f64..1.0]
}

fn positive() -> impl Strategy<Value = f64> {
    0.02f64..1.0
}

fn dist(g: &Arc<Ground>, w: &[f64]) -> FiniteDistribution {
    let z: f64 = w.iter().sum();
    if z <= 0.0 {
        return FiniteDistribution::uniform(g.clone());
    }
    FiniteDistribution::new(g.clone(), w.iter().map(|v| v / z).collect()).unwrap()
}

fn kernel(x: &Arc<Ground>, y: &Arc<Ground>, rows: &[Vec<f64>]) -> StochasticKernel {
    StochasticKernel::from_rows(x.clone(), rows.iter().map(|r| dist(y, r)).collect()).unwrap()
}

fn all_divergences() -> Vec<Divergence> {
    let mut v: Vec<Divergence> = FDivergence::TABLE.into_iter().map(Into::into).collect();
    v.push(Divergence::MAX);
    v
}

fn le(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol || (a.is_infinite() && b.is_infinite() && a > 0.0)
}

/// Ground size, two weight vectors.
fn two_dists(max: usize, w: fn() -> BoxedStrategy<f64>) -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (2usize..=max).prop_flat_map(move |n| (Just(n), vec(w(), n), vec(w(), n)))
}

fn any_weight() -> BoxedStrategy<f64> {
    weight().boxed()
}

fn pos_weight() -> BoxedStrategy<f64> {
    positive().boxed()
}

fn kernel_case(max: usize) -> impl Strategy<Value = (usize, usize, Vec<Vec<f64>>)> {
    (2usize..=max, 2usize..=max).prop_flat_map(|(n, m)| (Just(n), Just(m), vec(vec(weight(), m), n)))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn lift_is_affine((n, m, rows) in kernel_case(5), a in vec(weight(), 5), b in vec(weight(), 5), alpha in 0.0f64..=1.0) {
        let (x, y) = (Ground::indexed(n), Ground::indexed(m));
        let k = kernel(&x, &y, &rows);
        let (l0, l1) = (dist(&x, &a[..n]), dist(&x, &b[..n]));
        let mixed = k.lift(&l0.mix(alpha, &l1).unwrap()).unwrap();
        let expect = k.lift(&l0).unwrap().mix(alpha, &k.lift(&l1).unwrap()).unwrap();
        prop_assert!(mixed.approx_eq(&expect, TAU_NUM));
    }

    #[test]
    fn lift_of_point_mass_is_the_row((n, m, rows) in kernel_case(5)) {
        let (x, y) = (Ground::indexed(n), Ground::indexed(m));
        let k = kernel(&x, &y, &rows);
        for i in 0..n {
            let p = FiniteDistribution::point(x.label(i), x.clone()).unwrap();
            prop_assert_eq!(&k.lift(&p).unwrap(), k.row(i));
        }
    }

    #[test]
    fn event_probability_is_additive((n, w, _) in two_dists(8, any_weight), mask in vec(0u8..3, 8)) {
        let g = Ground::indexed(n);
        let d = dist(&g, &w);
        let pick = |k: u8| -> Vec<Label> { (0..n).filter(|&i| mask[i] == k).map(|i| g.label(i).clone()).collect() };
        let (r0, r1) = (pick(0), pick(1));
        let union: Vec<Label> = r0.iter().chain(&r1).cloned().collect();
        let sum = d.event_probability(&r0).unwrap() + d.event_probability(&r1).unwrap();
        prop_assert!((d.event_probability(&union).unwrap() - sum).abs() <= TAU_NUM);
    }

    #[test]
    fn constructed_distributions_are_normalized((n, w, v) in two_dists(8, any_weight), alpha in 0.0f64..=1.0) {
        let g = Ground::indexed(n);
        let (a, b) = (dist(&g, &w), dist(&g, &v));
        for d in [a.clone(), a.mix(alpha, &b).unwrap(), a.product(&b)] {
            prop_assert!(d.probs().iter().all(|&p| p >= 0.0));
            prop_assert!((d.probs().iter().sum::<f64>() - 1.0).abs() <= TAU_MASS);
        }
    }

    #[test]
    fn divergences_are_nonnegative_and_vanish_on_equal((n, w, v) in two_dists(6, any_weight)) {
        let g = Ground::indexed(n);
        let (a, b) = (dist(&g, &w), dist(&g, &v));
        let far = a.probs().iter().zip(b.probs()).any(|(p, q)| (p - q).abs() > 1e-3);
        for div in all_divergences() {
            let ab = div.evaluate(&a, &b).unwrap();
            prop_assert!(ab >= 0.0, "{} gave {}", div.name(), ab);
            prop_assert_eq!(div.evaluate(&a, &a).unwrap(), 0.0);
            if far {
                prop_assert!(ab > 0.0 || div.evaluate(&b, &a).unwrap() > 0.0, "{} vanished on distinct inputs", div.name());
            }
        }
    }

    #[test]
    fn prefix_rule_matches_exhaustive_oracle((n, w, v) in two_dists(10, any_weight), di in 0usize..4) {
        let delta = [0.0, 0.05, 0.1, 0.3][di];
        let g = Ground::indexed(n);
        let (a, b) = (dist(&g, &w), dist(&g, &v));
        let fast = approx_max_divergence(&a, &b, delta).unwrap();
        let slow = approx_max_divergence_exhaustive(&a, &b, delta).unwrap();
        prop_assert!(fast == slow || (fast - slow).abs() <= TAU_NUM, "{} vs {}", fast, slow);
    }

    #[test]
    fn approx_max_divergence_is_monotone_in_delta((n, w, v) in two_dists(8, any_weight), d0 in 0.0f64..0.5, d1 in 0.0f64..0.5) {
        let g = Ground::indexed(n);
        let (a, b) = (dist(&g, &w), dist(&g, &v));
        let (lo, hi) = (d0.min(d1), d0.max(d1));
        prop_assert!(approx_max_divergence(&a, &b, lo).unwrap() >= approx_max_divergence(&a, &b, hi).unwrap() - TAU_NUM);
        prop_assert_eq!(approx_max_divergence(&a, &b, 0.0).unwrap(), max_divergence(&a, &b).unwrap());
    }

    #[test]
    fn delta_required_characterises_approximate_dp(
        (n, m, rows) in kernel_case(6),
        pairs in vec((0usize..6, 0usize..6), 1..6),
        eps in 0.0f64..1.5,
        delta in 0.0f64..0.5,
    ) {
        let (x, y) = (Ground::indexed(n), Ground::indexed(m));
        let k = kernel(&x, &y, &rows);
        let phi = PointRelation::from_indices(x, pairs.into_iter().map(|(a, b)| (a % n, b % n))).unwrap();
        let required = delta_required(&k, &phi, eps).unwrap();
        prop_assume!((required - delta).abs() > 1e-9);
        let mut values = Vec::new();
        for &(a, b) in phi.pairs() {
            values.push(approx_max_divergence_exhaustive(k.row(a), k.row(b), delta).unwrap());
            values.push(approx_max_divergence_exhaustive(k.row(b), k.row(a), delta).unwrap());
        }
        prop_assume!(values.iter().all(|v| (v - eps).abs() > 1e-9));
        prop_assert_eq!(required <= delta, values.iter().all(|&v| v <= eps));
    }

    #[test]
    fn tv_matches_closed_form((n, w, v) in two_dists(8, any_weight)) {
        let g = Ground::indexed(n);
        let (a, b) = (dist(&g, &w), dist(&g, &v));
        let closed: f64 = 0.5 * a.probs().iter().zip(b.probs()).map(|(p, q)| (p - q).abs()).sum::<f64>();
        let tv = FDivergence::TotalVariation.divergence(&a, &b).unwrap();
        // positions outside supp(b) are outside the f-divergence sum
        if b.probs().iter().zip(a.probs()).all(|(&q, &p)| q > 0.0 || p == 0.0) {
            prop_assert!((tv - closed).abs() <= TAU_NUM);
        } else {
            prop_assert_eq!(tv, f64::INFINITY);
        }
    }

    #[test]
    fn data_processing_inequality((n, m, rows) in kernel_case(5), a in vec(weight(), 5), b in vec(weight(), 5)) {
        let (x, y) = (Ground::indexed(n), Ground::indexed(m));
        let k = kernel(&x, &y, &rows);
        let (l0, l1) = (dist(&x, &a[..n]), dist(&x, &b[..n]));
        for f in FDivergence::TABLE {
            let before = f.divergence(&l0, &l1).unwrap();
            let after = f.divergence(&k.lift(&l0).unwrap(), &k.lift(&l1).unwrap()).unwrap();
            prop_assert!(le(after, before, TAU_NUM), "{}: {} > {}", f.name(), after, before);
        }
    }

    #[test]
    fn transport_couplings_have_the_marginals((n, w, v) in two_dists(6, any_weight), pos in vec(0.0f64..10.0, 6)) {
        let g = Ground::indexed(n);
        let (a, b) = (dist(&g, &w), dist(&g, &v));
        let d = GroundMetric::on_line(g, &pos[..n]).unwrap();
        for gamma in [
            emd(&a, &b, &d).unwrap().coupling,
            wasserstein_inf(&a, &b, &d).unwrap().coupling,
            wasserstein_p(&a, &b, &d, 2.0).unwrap().coupling,
            northwest_corner(&a, &b),
        ] {
            prop_assert!(validate_coupling(&gamma, &a, &b).unwrap());
        }
    }

    #[test]
    fn emd_satisfies_complementary_slackness((n, w, v) in two_dists(6, pos_weight), c in vec(vec(0.0f64..5.0, 6), 6)) {
        let g = Ground::indexed(n);
        let (a, b) = (dist(&g, &w), dist(&g, &v));
        // a random metric: shortest paths over random symmetric weights
        let mut m: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { c[i.min(j)][i.max(j)] + 0.1 }).collect()).collect();
        for k in 0..n { for i in 0..n { for j in 0..n { m[i][j] = m[i][j].min(m[i][k] + m[k][j]); } } }
        let d = GroundMetric::new(g, m).unwrap();
        let r = emd(&a, &b, &d).unwrap();
        for i in 0..n {
            for j in 0..n {
                let slack = d.cost(i, j) - r.duals.u[i] - r.duals.v[j];
                prop_assert!(slack >= -1e-9, "dual infeasible at ({}, {}): {}", i, j, slack);
                if r.coupling.get(i, j) > 1e-12 {
                    prop_assert!(slack.abs() <= 1e-9, "slackness fails at ({}, {}): {}", i, j, slack);
                }
            }
        }
    }

    #[test]
    fn northwest_is_optimal_on_line_metrics((n, w, v) in two_dists(7, any_weight), mut pos in vec(0.0f64..10.0, 7)) {
        pos.truncate(n);
        pos.sort_by(f64::total_cmp);
        let g = Ground::indexed(n);
        let (a, b) = (dist(&g, &w), dist(&g, &v));
        let d = GroundMetric::on_line(g.clone(), &pos).unwrap();
        prop_assert!(d.is_submodular());
        let nw = northwest_corner(&a, &b).cost(&d.as_cost_matrix());
        prop_assert!((nw - emd(&a, &b, &d).unwrap().cost).abs() <= TAU_NUM);
    }

    #[test]
    fn metric_chain_and_p_monotonicity((n, w, v) in two_dists(6, any_weight), pos in vec(0.0f64..10.0, 6)) {
        let g = Ground::indexed(n);
        let (a, b) = (dist(&g, &w), dist(&g, &v));
        let d = GroundMetric::on_line(g, &pos[..n]).unwrap();
        let w1 = emd(&a, &b, &d).unwrap().cost;
        let winf = wasserstein_inf(&a, &b, &d).unwrap().cost;
        prop_assert!(w1 <= winf + TAU_NUM);
        prop_assert!(winf <= diameter(&a, &b, &d).unwrap() + TAU_NUM);
        let mut last = w1;
        for p in [1.5, 2.0, 3.0, 5.0] {
            let wp = wasserstein_p(&a, &b, &d, p).unwrap().cost;
            prop_assert!(wp >= last - 1e-7, "W_{} = {} < {}", p, wp, last);
            prop_assert!(wp <= winf + 1e-7);
            last = wp;
        }
    }

    #[test]
    fn wasserstein_of_point_masses_is_the_distance(n in 2usize..6, i in 0usize..6, j in 0usize..6, pos in vec(0.0f64..10.0, 6)) {
        let g = Ground::indexed(n);
        let (i, j) = (i % n, j % n);
        let d = GroundMetric::on_line(g.clone(), &pos[..n]).unwrap();
        let (a, b) = (FiniteDistribution::point(g.label(i), g.clone()).unwrap(), FiniteDistribution::point(g.label(j), g.clone()).unwrap());
        for p in [1.0, 2.0, 3.5] {
            prop_assert!((wasserstein_p(&a, &b, &d, p).unwrap().cost - d.cost(i, j)).abs() <= TAU_NUM);
        }
        prop_assert!((wasserstein_inf(&a, &b, &d).unwrap().cost - d.cost(i, j)).abs() <= TAU_NUM);
    }

    #[test]
    fn related_points_are_lifted_members(n in 2usize..6, pairs in vec((0usize..6, 0usize..6), 1..8)) {
        let g = Ground::indexed(n);
        let phi = PointRelation::from_indices(g.clone(), pairs.into_iter().map(|(a, b)| (a % n, b % n))).unwrap();
        for &(a, b) in phi.pairs() {
            let (x, y) = (FiniteDistribution::point(g.label(a), g.clone()).unwrap(), FiniteDistribution::point(g.label(b), g.clone()).unwrap());
            prop_assert!(lifted_member(&phi, &x, &y).unwrap());
        }
    }

    #[test]
    fn coupling_mechanism_invariants((n, w, v) in two_dists(6, pos_weight), extra in vec(positive(), 6), pos in vec(0.0f64..10.0, 6)) {
        let g = Ground::indexed(n);
        let (lhat, mu, other) = (dist(&g, &w), dist(&g, &v), dist(&g, &extra[..n]));
        let d = GroundMetric::on_line(g, &pos[..n]).unwrap();
        let spec = build_coupling_mechanism(mu.clone(), vec![("s0".into(), lhat.clone()), ("s1".into(), other.clone())], CouplingMode::Optimal(&d), Fallback::Error).unwrap();
        for a in &spec.aux {
            let k = spec.kernel(&a.s).unwrap();
            prop_assert!(k.lift(&a.approx_input).unwrap().approx_eq(&mu, TAU_NUM));
            let loss = expected_utility_loss(&k, &a.approx_input, &d).unwrap();
            prop_assert!((loss - emd(&a.approx_input, &mu, &d).unwrap().cost).abs() <= TAU_NUM);
        }
        let mech = spec.to_aux_kernel().unwrap();
        let tagged = [TaggedDistribution::tagged("s0", lhat), TaggedDistribution::tagged("s1", other)];
        let psi = DistributionPairRelation::new(vec![distp::prob::DistributionPair { left: tagged[0].clone(), right: tagged[1].clone() }]).unwrap();
        for div in all_divergences() {
            prop_assert!(audit_distp(&mech, &psi, &div).unwrap().observed_eps <= TAU_NUM);
        }
    }

    #[test]
    fn seq_composition_adds_kl(
        (n, m, rows0) in kernel_case(4),
        b0 in vec(vec(positive(), 4), 4),
        b1 in vec(vec(positive(), 4), 4),
        b2 in vec(vec(positive(), 4), 4),
        b3 in vec(vec(positive(), 4), 4),
    ) {
        let (x, y0) = (Ground::indexed(n), Ground::indexed(m));
        let y1 = Ground::indexed(3);
        let a0 = kernel(&x, &y0, &rows0);
        let branch_rows = [b0, b1, b2, b3];
        let branches: Vec<StochasticKernel> = (0..m).map(|i| {
            let rows: Vec<Vec<f64>> = branch_rows[i][..n].iter().map(|r| r[..3].to_vec()).collect();
            kernel(&x, &y1, &rows)
        }).collect();
        let a1 = AdaptiveKernel::new(y0, branches).unwrap();
        let full = PointRelation::full(x);
        let kl: Divergence = FDivergence::Kl.into();
        let e0 = audit_div_dp(&a0, &full, &kl).unwrap().observed_eps;
        let e1 = a1.branches().iter().map(|b| audit_div_dp(b, &full, &kl).unwrap().observed_eps).fold(0.0, f64::max);
        let joint = audit_div_dp(&seq_compose(&a0, &a1, false).unwrap(), &full, &kl).unwrap().observed_eps;
        prop_assert!(le(joint, e0 + e1, TAU_NUM), "{} > {} + {}", joint, e0, e1);
        let marginal = audit_div_dp(&seq_compose(&a0, &a1, true).unwrap(), &full, &kl).unwrap().observed_eps;
        prop_assert!(le(marginal, joint, TAU_NUM));
    }

    #[test]
    fn post_processing_never_increases_audits((n, m, rows) in kernel_case(5), post in vec(vec(weight(), 4), 5)) {
        let (x, y, z) = (Ground::indexed(n), Ground::indexed(m), Ground::indexed(4));
        let a = kernel(&x, &y, &rows);
        let b = kernel(&y, &z, &post[..m]);
        let ba = a.then(&b).unwrap();
        let full = PointRelation::full(x);
        for div in all_divergences() {
            let before = audit_div_dp(&a, &full, &div).unwrap().observed_eps;
            let after = audit_div_dp(&ba, &full, &div).unwrap().observed_eps;
            prop_assert!(le(after, before, TAU_NUM), "{}: {} > {}", div.name(), after, before);
        }
    }

    #[test]
    fn distp_on_point_masses_is_dp((n, m, rows) in kernel_case(5), pairs in vec((0usize..5, 0usize..5), 1..8)) {
        let (x, y) = (Ground::indexed(n), Ground::indexed(m));
        let k = kernel(&x, &y, &rows);
        let phi = PointRelation::from_indices(x, pairs.into_iter().map(|(a, b)| (a % n, b % n))).unwrap();
        let psi = DistributionPairRelation::points(&phi);
        for div in all_divergences() {
            let dp = audit_div_dp(&k, &phi, &div).unwrap().observed_eps;
            let distp = audit_distp(&k, &psi, &div).unwrap().observed_eps;
            prop_assert_eq!(dp.to_bits(), distp.to_bits());
        }
    }

    #[test]
    fn extended_audits_order(
        (n, m, rows) in kernel_case(5),
        ws in vec(vec(weight(), 5), 2..6),
        pos in vec(0.0f64..10.0, 5),
    ) {
        let (x, y) = (Ground::indexed(n), Ground::indexed(m));
        let k = kernel(&x, &y, &rows);
        let d = GroundMetric::on_line(x.clone(), &pos[..n]).unwrap();
        let ds: Vec<FiniteDistribution> = ws.iter().map(|w| dist(&x, &w[..n])).collect();
        let pairs: Vec<_> = ds.windows(2).filter(|p| emd(&p[0], &p[1], &d).unwrap().cost > 1e-6).map(|p| (p[0].clone(), p[1].clone())).collect();
        prop_assume!(!pairs.is_empty());
        let psi = DistributionPairRelation::from_pairs(pairs.clone()).unwrap();
        for div in all_divergences() {
            let w1 = audit_xdistp(&k, &psi, DistributionMetric::W1(&d), &div).unwrap().observed_eps;
            let winf = audit_xdistp(&k, &psi, DistributionMetric::Winf(&d), &div).unwrap().observed_eps;
            prop_assert!(le(winf, w1, TAU_NUM), "{}: {} > {}", div.name(), winf, w1);
        }
        let tv = audit_distp(&k, &psi, &FDivergence::TotalVariation.into()).unwrap();
        let dinf = audit_distp(&k, &psi, &Divergence::MAX).unwrap();
        for (t, m) in tv.per_pair.iter().zip(&dinf.per_pair) {
            prop_assert!(le(t.value, m.value, TAU_NUM));
        }
        prop_assert!(le(tv.observed_eps, dinf.observed_eps, TAU_NUM));
    }

    #[test]
    fn pre_processing_scales_by_stability(
        (n, m, rows) in kernel_case(4),
        trows in vec(vec(weight(), 4), 4),
        ws in vec(vec(positive(), 4), 2..5),
        pos in vec(0.0f64..10.0, 4),
    ) {
        let (x, y) = (Ground::indexed(n), Ground::indexed(m));
        let a = kernel(&x, &y, &rows);
        let t = kernel(&x, &x, &trows[..n].iter().map(|r| r[..n].to_vec()).collect::<Vec<_>>());
        let d = GroundMetric::on_line(x.clone(), &pos[..n]).unwrap();
        let w1 = DistributionMetric::W1(&d);
        let ds: Vec<FiniteDistribution> = ws.iter().map(|w| dist(&x, &w[..n])).collect();
        let pairs: Vec<_> = ds.windows(2).map(|p| (p[0].clone(), p[1].clone())).filter(|(p, q)| {
            let (tp, tq) = (t.lift(p).unwrap(), t.lift(q).unwrap());
            w1.distance(p, q).unwrap() > 1e-6 && w1.distance(&tp, &tq).unwrap() > 1e-6
        }).collect();
        prop_assume!(!pairs.is_empty());
        let c = pairs.iter().map(|(p, q)| w1.distance(&t.lift(p).unwrap(), &t.lift(q).unwrap()).unwrap() / w1.distance(p, q).unwrap()).fold(0.0, f64::max);
        prop_assert!(distp::mechanism::is_metric_stable(&t, &pairs, w1, c).unwrap());
        let images: Vec<_> = pairs.iter().map(|(p, q)| (t.lift(p).unwrap(), t.lift(q).unwrap())).collect();
        let psi = DistributionPairRelation::from_pairs(pairs).unwrap();
        let psi_t = DistributionPairRelation::from_pairs(images).unwrap();
        let at = pre_process(&t, &a).unwrap();
        for f in FDivergence::TABLE {
            let div: Divergence = f.into();
            let composed = audit_xdistp(&at, &psi, w1, &div).unwrap().observed_eps;
            let base = audit_xdistp(&a, &psi_t, w1, &div).unwrap().observed_eps;
            prop_assert!(le(composed, c * base, 1e-7), "{}: {} > {} * {}", div.name(), composed, c, base);
        }
    }

    #[test]
    fn json_round_trips((n, m, rows) in kernel_case(4), (k, w, v) in two_dists(4, any_weight)) {
        let (x, y) = (Ground::indexed(n), Ground::indexed(m));
        let kern = kernel(&x, &y, &rows);
        let back: StochasticKernel = serde_json::from_str(&serde_json::to_string(&kern).unwrap()).unwrap();
        prop_assert!(back.rows().iter().zip(kern.rows()).all(|(a, b)| a.approx_eq(b, TAU_NUM)));
        let g = Ground::indexed(k);
        let (a, b) = (dist(&g, &w), dist(&g, &v));
        let back: FiniteDistribution = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        prop_assert!(back.approx_eq(&a, TAU_NUM));
        let gamma = northwest_corner(&a, &b);
        let back: Coupling = serde_json::from_str(&serde_json::to_string(&gamma).unwrap()).unwrap();
        prop_assert!(validate_coupling(&back, &a, &b).unwrap());
        let spec = build_coupling_mechanism(b.clone(), vec![("s".into(), a.clone())], CouplingMode::NorthWest, Fallback::SampleTarget).unwrap();
        let back: CouplingMechanismSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        prop_assert_eq!(back.fallback, spec.fallback);
        prop_assert!(back.aux[0].approx_input.approx_eq(&a, TAU_NUM));
        let d = GroundMetric::line(g);
        let back = distp::io::read_cost_csv(distp::io::write_cost_csv(&d).unwrap().as_bytes()).unwrap();
        prop_assert_eq!(back, d);
    }
}
