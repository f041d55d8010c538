use proptest::prelude::*;
use relage_core::SurvivalCopula;
use relage_oracles::stats::{clayton_tau, fgm_tau, gumbel_tau, kendall_tau, ks_critical_01, ks_statistic, proportion};

fn families(n: usize) -> Vec<SurvivalCopula> {
    vec![
        SurvivalCopula::independence(n).unwrap(),
        SurvivalCopula::fgm(0.8, n).unwrap(),
        SurvivalCopula::fgm(-0.6, n).unwrap(),
        SurvivalCopula::gumbel(1.7, n).unwrap(),
        SurvivalCopula::clayton(2.5, n).unwrap(),
    ]
}

#[test]
fn marginals_of_samples_are_uniform() {
    let count = 20_000;
    for c in families(3) {
        let sample = c.sample(count, 11).unwrap();
        for i in 0..3 {
            let column: Vec<f64> = sample.iter().map(|u| u[i]).collect();
            let d = ks_statistic(&column, |x| x.clamp(0.0, 1.0));
            assert!(d < ks_critical_01(count), "{:?} coordinate {i}: KS {d}", c.family().name());
        }
    }
}

#[test]
fn joint_distribution_matches_copula_values() {
    let count = 40_000;
    let points = [[0.3, 0.6, 0.8], [0.5, 0.5, 0.5], [0.9, 0.2, 0.7], [0.75, 0.85, 0.95]];
    for c in families(3) {
        let sample = c.sample(count, 5).unwrap();
        for u in points {
            let hits = sample.iter().filter(|s| s.iter().zip(&u).all(|(a, b)| a <= b)).count();
            let (est, se) = proportion(hits, count);
            let exact = c.eval(&u).unwrap();
            assert!((est - exact).abs() < 4.0 * se.max(1e-3), "{} at {u:?}: {est} vs {exact}", c.family().name());
        }
    }
}

#[test]
fn kendall_tau_matches_families() {
    let count = 20_000;
    let cases: Vec<(SurvivalCopula, f64)> = vec![
        (SurvivalCopula::fgm(0.9, 2).unwrap(), fgm_tau(0.9)),
        (SurvivalCopula::fgm(-0.9, 2).unwrap(), fgm_tau(-0.9)),
        (SurvivalCopula::gumbel(2.0, 2).unwrap(), gumbel_tau(2.0)),
        (SurvivalCopula::clayton(1.0, 2).unwrap(), clayton_tau(1.0)),
        (SurvivalCopula::independence(2).unwrap(), 0.0),
    ];
    for (c, tau) in cases {
        let s = c.sample(count, 99).unwrap();
        let x: Vec<f64> = s.iter().map(|u| u[0]).collect();
        let y: Vec<f64> = s.iter().map(|u| u[1]).collect();
        let est = kendall_tau(&x, &y);
        assert!((est - tau).abs() < 0.02, "{}: tau {est} vs {tau}", c.family().name());
    }
}

#[test]
fn sampling_is_deterministic_per_seed() {
    for c in families(4) {
        assert_eq!(c.sample(50, 3).unwrap(), c.sample(50, 3).unwrap());
        assert_ne!(c.sample(50, 3).unwrap(), c.sample(50, 4).unwrap());
    }
}

fn copula_strategy() -> impl Strategy<Value = SurvivalCopula> {
    (2usize..=5, 0usize..4, 0.0f64..1.0).prop_map(|(n, family, t)| match family {
        0 => SurvivalCopula::independence(n).unwrap(),
        1 => SurvivalCopula::fgm(2.0 * t - 1.0, n).unwrap(),
        2 => SurvivalCopula::gumbel(1.0 + 4.0 * t, n).unwrap(),
        _ => SurvivalCopula::clayton(0.05 + 5.0 * t, n).unwrap(),
    })
}

proptest! {
    #[test]
    fn values_are_probabilities_with_uniform_margins(
        c in copula_strategy(),
        u in prop::collection::vec(0.0f64..=1.0, 5),
        i in 0usize..5,
        v in 0.0f64..=1.0,
    ) {
        let n = c.dim();
        let u = &u[..n];
        let k = c.eval(u).unwrap();
        prop_assert!((0.0..=1.0).contains(&k));
        // bounded by every coordinate (Fréchet upper bound)
        prop_assert!(u.iter().all(|&x| k <= x + 1e-12));
        let mut one = vec![1.0; n];
        one[i % n] = v;
        prop_assert!((c.eval(&one).unwrap() - v).abs() < 1e-12);
    }

    #[test]
    fn values_are_monotone_in_each_coordinate(
        c in copula_strategy(),
        u in prop::collection::vec(0.01f64..0.99, 5),
        i in 0usize..5,
        bump in 0.0f64..0.5,
    ) {
        let n = c.dim();
        let mut lo = u[..n].to_vec();
        let k0 = c.eval(&lo).unwrap();
        lo[i % n] = (lo[i % n] + bump).min(1.0);
        prop_assert!(c.eval(&lo).unwrap() >= k0 - 1e-14);
    }

    #[test]
    fn exchangeable_under_permutation(c in copula_strategy(), u in prop::collection::vec(0.01f64..0.99, 5)) {
        let n = c.dim();
        let a = u[..n].to_vec();
        let mut b = a.clone();
        b.reverse();
        prop_assert!((c.eval(&a).unwrap() - c.eval(&b).unwrap()).abs() < 1e-13);
    }
}
