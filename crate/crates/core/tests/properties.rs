use proptest::prelude::*;

use pure_explore::concentration::{bernstein_transfer, kl_categorical, Thresholds};
use pure_explore::empirical::EmpiricalModel;
use pure_explore::envs::make_random_mdp;
use pure_explore::mdp::{dot, next_value_variance, sample_episode_with};
use pure_explore::rf_express::compute_w;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn simplex(size: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-6f64..1.0, size).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        raw.iter().map(|x| x / total).collect()
    })
}

/// `(p, q, f, b)` with matching sizes and `f` in `[0, b]^S`.
fn triple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, f64)> {
    (2usize..7, 0.1f64..10.0).prop_flat_map(|(size, b)| {
        (
            simplex(size),
            simplex(size),
            prop::collection::vec(0.0..=1.0f64, size)
                .prop_map(move |f| f.iter().map(|x| x * b).collect()),
            Just(b),
        )
    })
}

fn slack(x: f64) -> f64 {
    1e-12 * (1.0 + x.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn transfer_bound_holds((p, q, f, b) in triple()) {
        let alpha = kl_categorical(&p, &q);
        let lhs = (dot(&p, &f) - dot(&q, &f)).abs();
        let rhs = bernstein_transfer(next_value_variance(&q, &f), alpha, b);
        prop_assert!(lhs <= rhs + slack(rhs));
    }

    #[test]
    fn variance_switch_between_distributions((p, q, f, b) in triple()) {
        let alpha = kl_categorical(&p, &q);
        let (vp, vq) = (next_value_variance(&p, &f), next_value_variance(&q, &f));
        let extra = 4.0 * b * b * alpha;
        prop_assert!(vq <= 2.0 * vp + extra + slack(vq));
        prop_assert!(vp <= 2.0 * vq + extra + slack(vp));
    }

    #[test]
    fn variance_switch_between_functions((p, f, g, b) in triple().prop_flat_map(|(p, _, f, b)| {
        let size = p.len();
        (Just(p), Just(f), prop::collection::vec(0.0..=1.0f64, size).prop_map(move |g| g.iter().map(|x| x * b).collect::<Vec<_>>()), Just(b))
    })) {
        let vf = next_value_variance(&p, &f);
        let vg = next_value_variance(&p, &g);
        let diff: Vec<f64> = f.iter().zip(&g).map(|(x, y)| (x - y).abs()).collect();
        prop_assert!(vf <= 2.0 * vg + 2.0 * b * dot(&p, &diff) + slack(vf));
    }

    #[test]
    fn harmonic_increment_sum(us in prop::collection::vec(0.0..=1.0f64, 1..400)) {
        let mut cumulative = 0.0;
        let mut total = 0.0;
        for &u in &us {
            total += u / f64::max(cumulative, 1.0);
            cumulative += u;
        }
        prop_assert!(total <= 4.0 * (cumulative + 1.0).ln() + 1e-12);
    }

    #[test]
    fn w_is_clamped_and_counts_consistent(seed in 0u64..1000, episodes in 0usize..300) {
        let mdp = make_random_mdp(3, 2, 3, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = EmpiricalModel::new(3, 3, 2);
        for _ in 0..episodes {
            let traj = sample_episode_with(&mdp, |_, _, rng| rng.random_range(0..2), &mut rng);
            model.update(&traj).unwrap();
        }
        prop_assert!(model.check_invariants().is_ok());
        let th = Thresholds::for_mdp(&mdp, 0.1).unwrap();
        let w = compute_w(&model, &th, 1.0);
        for h in 0..3 {
            let visits: u64 = (0..3).flat_map(|s| (0..2).map(move |a| (s, a))).map(|(s, a)| model.count(h, s, a)).sum();
            prop_assert_eq!(visits, episodes as u64);
            for s in 0..3 {
                for a in 0..2 {
                    let x = w.get(h, s, a);
                    prop_assert!((0.0..=3.0).contains(&x));
                    if model.count(h, s, a) == 0 {
                        prop_assert_eq!(x, 3.0);
                    }
                }
            }
        }
    }

    #[test]
    fn smaller_scale_never_increases_w(seed in 0u64..500, episodes in 1usize..200, scale in 0.01f64..1.0) {
        let mdp = make_random_mdp(2, 2, 2, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
        let mut model = EmpiricalModel::new(2, 2, 2);
        for _ in 0..episodes {
            let traj = sample_episode_with(&mdp, |_, _, rng| rng.random_range(0..2), &mut rng);
            model.update(&traj).unwrap();
        }
        let th = Thresholds::for_mdp(&mdp, 0.1).unwrap();
        let full = compute_w(&model, &th, 1.0);
        let scaled = compute_w(&model, &th, scale);
        for (x, y) in scaled.values().iter().zip(full.values()) {
            prop_assert!(x <= y);
        }
    }
}
