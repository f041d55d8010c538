//! Acceptance criteria, one PASS/FAIL line each, with runtime limits.
//! Runs without the test harness so every line is always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relage::report::Report;
use relage::reproduce;
use relage_core::betainc::regularized_incomplete_beta;
use relage_core::distortion::{build_distortion, distortion_k_out_of_n};
use relage_core::lifetimes::system_lifetime;
use relage_core::monotone::check_monotone;
use relage_core::orders::{
    check_order, check_sufficient_conditions, compare_systems_exact, redundancy_verdict, residual_verdict, CheckConfig,
    Method, Relation,
};
use relage_core::polynomial::Polynomial;
use relage_core::{
    Distortion, Level, LifetimeModel, Marginal, Mode, MonotoneConfig, Monotonicity, Order, Overall, StructureFunction,
    SurvivalCopula,
};
use relage_oracles::closed_forms as cf;
use relage_oracles::marginals::{exponential_sf, frechet_cdf, weibull_sf};
use relage_oracles::stats::proportion;
use relage_oracles::{binomial_tail, five_point_derivative, inverse_h_integral, inverse_r_integral};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn cfg() -> CheckConfig {
    CheckConfig::default()
}

fn unit_class(f: impl Fn(f64) -> f64) -> Monotonicity {
    check_monotone(f, 1e-4, 1.0 - 1e-4, &MonotoneConfig::default()).unwrap().class
}

fn fgm_pair(theta: f64) -> (Distortion, Distortion) {
    let c = SurvivalCopula::fgm(theta, 3).unwrap();
    (
        build_distortion(&StructureFunction::from_path_sets(3, &[[1, 2], [1, 3]]).unwrap(), &c).unwrap(),
        build_distortion(&StructureFunction::series(3).unwrap(), &c).unwrap(),
    )
}

fn criterion_1() -> Outcome {
    let case_i: Vec<f64> = (-9..=5).map(|i| i as f64 / 10.0).collect();
    let case_ii: Vec<f64> = (0..=5).map(|i| (75 + 5 * i) as f64 / 100.0).collect();
    for &theta in &case_i {
        let (d1, d2) = fgm_pair(theta);
        let r = compare_systems_exact(&d1, &d2, Mode::C, &cfg()).map_err(|e| e.to_string())?;
        let class = r.entries[0].class().unwrap();
        ensure!(class == Monotonicity::Decreasing, "θ={theta}: H1/H2 is {class:?}");
        ensure!(r.relation == Relation::Precedes, "θ={theta}: relation {:?}", r.relation);
        ensure!(unit_class(|p| cf::ex31_s(theta, p)) == class, "θ={theta}: closed form disagrees");
    }
    for &theta in &case_ii {
        let (d1, d2) = fgm_pair(theta);
        let r = compare_systems_exact(&d1, &d2, Mode::C, &cfg()).map_err(|e| e.to_string())?;
        let e = &r.entries[0];
        ensure!(e.class() == Some(Monotonicity::NonMonotone), "θ={theta}: H1/H2 is {:?}", e.class());
        let (rise, fall) = e.witnesses().ok_or(format!("θ={theta}: no witnesses"))?;
        // the witnesses are real movements of the closed-form ratio
        let s = |p: f64| cf::ex31_s(theta, p);
        ensure!(s(rise.b) > s(rise.a) && s(fall.b) < s(fall.a), "θ={theta}: witnesses not confirmed by closed form");
    }
    Ok(format!("{} θ decreasing, {} θ non-monotone with witnesses", case_i.len(), case_ii.len()))
}

fn criterion_2() -> Outcome {
    let thetas: Vec<f64> = (-5..=5).map(|i| i as f64 / 5.0).collect();
    for &theta in &thetas {
        let (d1, d2) = fgm_pair(theta);
        let v = unit_class(|p| {
            let l = Level::new(p);
            d2.jet(l).big_r / d1.jet(l).big_r
        });
        ensure!(v == Monotonicity::Increasing, "θ={theta}: v is {v:?}");
        ensure!(unit_class(|p| cf::ex32_v(theta, p)) == v, "θ={theta}: closed-form v disagrees");
        let r = compare_systems_exact(&d1, &d2, Mode::B, &cfg()).map_err(|e| e.to_string())?;
        ensure!(r.relation == Relation::Succeeds, "θ={theta}: τ1 vs τ2 relation {:?}", r.relation);
    }
    Ok(format!("v increasing and τ1 ≻b τ2 for all {} θ", thetas.len()))
}

fn criterion_3() -> Outcome {
    let par = distortion_k_out_of_n(1, 3).unwrap();
    let x = LifetimeModel::Marginal(Marginal::weibull(2.0, 3.0).unwrap());
    let y = LifetimeModel::Marginal(Marginal::weibull(0.1, 2.0).unwrap());
    let range = cfg().with_x_range(0.05, 3.0);
    let comp = check_order(&x, &y, Order::AgingFasterC, &range).map_err(|e| e.to_string())?;
    ensure!(comp.detail.class == Monotonicity::Increasing, "r_X/r_Y is {:?}", comp.detail.class);
    let suff = check_sufficient_conditions(&par, &par, &x, &y, Mode::C, &cfg()).map_err(|e| e.to_string())?;
    ensure!(!suff.entry("(iii) Y≤rhX").unwrap().holds, "rhr precondition unexpectedly holds");
    let sys = check_order(&system_lifetime(&par, &x), &system_lifetime(&par, &y), Order::AgingFasterC, &range)
        .map_err(|e| e.to_string())?;
    ensure!(sys.detail.class == Monotonicity::NonMonotone, "k(x) is {:?}", sys.detail.class);
    let (rise, fall) = sys.detail.witnesses().ok_or("no witnesses")?;
    let k = cf::ce31_k;
    ensure!(k(rise.b) > k(rise.a) && k(fall.b) < k(fall.a), "witnesses not confirmed by closed form");
    Ok(format!("r_X/r_Y increasing, Y≤rhX false, k rises on [{:.3}, {:.3}] and falls on [{:.3}, {:.3}]", rise.a, rise.b, fall.a, fall.b))
}

fn criterion_4() -> Outcome {
    let ser = distortion_k_out_of_n(2, 2).unwrap();
    let x = LifetimeModel::Marginal(Marginal::frechet(2.1, 7.0).unwrap());
    let y = LifetimeModel::Marginal(Marginal::frechet(2.0, 3.0).unwrap());
    let suff = check_sufficient_conditions(&ser, &ser, &x, &y, Mode::B, &cfg()).map_err(|e| e.to_string())?;
    let hr = suff.entry("(iii) X≤hrY").unwrap().holds;
    let sys = check_order(
        &system_lifetime(&ser, &x),
        &system_lifetime(&ser, &y),
        Order::AgingFasterB,
        &cfg().with_x_range(0.5, 10.0),
    )
    .map_err(|e| e.to_string())?;
    let oracle = check_monotone(cf::ce32_l_cancelled, 0.5, 10.0, &MonotoneConfig::default()).unwrap().class;
    ensure!(!hr, "hr precondition reported true");
    ensure!(
        sys.detail.class == Monotonicity::NonMonotone && sys.detail.witnesses().is_some(),
        "system reversed hazard ratio is {:?} on [0.5, 10] (closed-form l is {:?}); hr precondition correctly false",
        sys.detail.class,
        oracle
    );
    Ok("reversed hazard ratio non-monotone, X≤hrY false".into())
}

fn criterion_5() -> Outcome {
    let x = LifetimeModel::Marginal(Marginal::exponential(1.0).unwrap());
    for n in 2..=5usize {
        let d = Distortion::power(n);
        let r = redundancy_verdict(&d, 1, Mode::C, Method::Iff, &cfg()).map_err(|e| e.to_string())?;
        ensure!(r.relation == Relation::Succeeds, "n={n}: {}", r.conclusion);
        ensure!(r.entry("cross-validation").unwrap().holds, "n={n}: built-in cross-validation failed");
        ensure!(unit_class(|p| cf::cor41_ratio(n as u32, p)) == Monotonicity::Increasing, "n={n}: closed form");
        // T_S: two series systems in parallel; T_C: series of duplicated components
        let ts = Distortion::from_polynomial(
            Polynomial::x().pow(n as u32).scale(2.0).sub(&Polynomial::x().pow(2 * n as u32)).coefficients(),
        )
        .map_err(|e| e.to_string())?;
        let tc = Distortion::from_polynomial(Polynomial::new(vec![0.0, 2.0, -1.0]).pow(n as u32).coefficients())
            .map_err(|e| e.to_string())?;
        let v = check_order(&system_lifetime(&ts, &x), &system_lifetime(&tc, &x), Order::AgingFasterC, &cfg())
            .map_err(|e| e.to_string())?;
        ensure!(v.holds_reverse && !v.holds_forward, "n={n}: explicit lifetimes give {:?}", v.detail.class);
    }
    Ok("T_S ≻c T_C for n = 2..5, explicit exponential lifetimes agree".into())
}

fn criterion_6() -> Outcome {
    for (n, theta) in [(2usize, 1.5f64), (3, 2.0), (4, 3.0)] {
        let d = build_distortion(&StructureFunction::series(n).unwrap(), &SurvivalCopula::gumbel(theta, n).unwrap())
            .map_err(|e| e.to_string())?;
        let a = (n as f64).powf(1.0 / theta);
        let oracle = check_monotone(|p| cf::ex41_p_dlog_r(a, p), 1e-4, 1.0 - 1e-4, &MonotoneConfig::default()).unwrap();
        ensure!(oracle.class == Monotonicity::Decreasing && oracle.min_value > 0.0, "a={a}: closed form");
        let s = redundancy_verdict(&d, 1, Mode::B, Method::Sufficient, &cfg()).map_err(|e| e.to_string())?;
        ensure!(s.overall == Overall::SufficientHolds && s.relation == Relation::Precedes, "n={n}: {}", s.conclusion);
        for m in [1, 2] {
            let r = redundancy_verdict(&d, m, Mode::B, Method::Iff, &cfg()).map_err(|e| e.to_string())?;
            ensure!(r.overall == Overall::IffHolds && r.relation == Relation::Precedes, "n={n} m={m}: {}", r.conclusion);
        }
    }
    Ok("pR'/R decreasing and positive; T_S ≺b T_C, iff agrees for m = 1, 2".into())
}

fn criterion_7() -> Outcome {
    let mut count = 0;
    for n in 1..=6 {
        for k in 1..=n {
            let d = distortion_k_out_of_n(k, n).unwrap();
            let r = residual_verdict(&d, Mode::C, Method::Iff, &cfg()).map_err(|e| format!("{k}|{n}: {e}"))?;
            ensure!(r.overall.holds(), "{k}|{n}: {}", r.overall.as_str());
            count += 1;
        }
    }
    for n in 2..=6u32 {
        let d = distortion_k_out_of_n(1, n as usize).unwrap();
        ensure!((d.eval(0.3) - cf::parallel(n, 0.3)).abs() < 1e-15, "parallel distortion");
        let r = residual_verdict(&d, Mode::B, Method::Iff, &cfg()).map_err(|e| format!("1|{n}: {e}"))?;
        ensure!(r.overall.holds(), "1|{n} mode b: {}", r.overall.as_str());
    }
    Ok(format!("mode c holds for {count} k|n systems, mode b for parallel n = 2..6"))
}

fn criterion_8() -> Outcome {
    let mut total = 0;
    for case in ["lemma-2.3", "lemma-2.4"] {
        let mut report = Report::new("reproduce", &cfg(), 0);
        reproduce::run(case, &cfg(), 0, &mut report).map_err(|e| e.to_string())?;
        for a in &report.assertions {
            ensure!(a.pass, "{case} {}: expected {}, observed {}", a.name, a.expected, a.observed);
            total += a.expected.split(' ').next().unwrap().parse::<usize>().unwrap();
        }
    }
    for (k, n) in [(2u32, 4u32), (3, 5), (4, 7)] {
        let d = distortion_k_out_of_n(k as usize, n as usize).unwrap();
        for i in 1..=21 {
            let p = i as f64 / 22.0;
            let j = d.jet(Level::new(p));
            let (ih, ir) = (inverse_h_integral(k, n, p), inverse_r_integral(k, n, p));
            ensure!((1.0 / j.big_h - ih).abs() < 1e-8 * ih, "1/H_{k}|{n}({p}) vs integral");
            ensure!((1.0 / j.big_r - ir).abs() < 1e-8 * ir, "1/R_{k}|{n}({p}) vs integral");
        }
    }
    Ok(format!("{total} monotonicity statements hold; integral representations agree"))
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & 1 << i != 0).map(|i| i + 1).collect())
        .collect()
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=5 {
        for k in 1..=n {
            let phi = StructureFunction::from_path_sets(n, &k_subsets(n, k)).unwrap();
            let d = build_distortion(&phi, &SurvivalCopula::independence(n).unwrap()).unwrap();
            for i in 1..100 {
                let p = i as f64 / 100.0;
                let beta = regularized_incomplete_beta(k as f64, (n - k + 1) as f64, p);
                let err = (d.eval(p) - beta).abs();
                ensure!(err < 1e-10 && (beta - binomial_tail(k as u32, n as u32, p)).abs() < 1e-10, "{k}|{n} at {p}");
                worst = worst.max(err);
            }
        }
    }
    let phi = StructureFunction::from_path_sets(3, &[[1, 2], [1, 3]]).unwrap();
    let count = 100_000;
    let mut worst_z: f64 = 0.0;
    for theta in [-0.5, 0.0, 0.5] {
        let c = SurvivalCopula::fgm(theta, 3).unwrap();
        let d = build_distortion(&phi, &c).unwrap();
        let sample = c.sample(count, 2024).map_err(|e| e.to_string())?;
        for i in 1..=21 {
            let p = i as f64 / 22.0;
            let up = |u: f64| u < p;
            let hits = sample.iter().filter(|u| up(u[0]) && (up(u[1]) || up(u[2]))).count();
            let (est, se) = proportion(hits, count);
            let z = (est - d.eval(p)).abs() / se;
            ensure!(z < 4.0, "θ={theta}, p={p}: |z| = {z}");
            worst_z = worst_z.max(z);
        }
    }
    Ok(format!("max IE/beta gap {worst:.1e}; max Monte Carlo |z| {worst_z:.2}"))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for trial in 0..5 {
        let n = rng.random_range(2..=5usize);
        let k = rng.random_range(1..=n);
        let d = distortion_k_out_of_n(k, n).unwrap();
        let h = move |p: f64| binomial_tail(k as u32, n as u32, p);
        let (a, b) = (rng.random_range(0.3..3.0f64), rng.random_range(0.5..4.0f64));
        let (m, sf): (Marginal, Box<dyn Fn(f64) -> f64>) = match rng.random_range(0..3) {
            0 => (Marginal::weibull(a, b).unwrap(), Box::new(move |x| weibull_sf(a, b, x))),
            1 => (Marginal::frechet(a, b).unwrap(), Box::new(move |x| 1.0 - frechet_cdf(a, b, x))),
            _ => (Marginal::exponential(a).unwrap(), Box::new(move |x| exponential_sf(a, x))),
        };
        let tau = system_lifetime(&d, &LifetimeModel::Marginal(m));
        let (lo, hi) = tau.x_range(0.05, 0.95).map_err(|e| e.to_string())?;
        for j in 0..=20 {
            let x = lo + (hi - lo) * j as f64 / 20.0;
            let step = 1e-4 * x;
            let r = -five_point_derivative(|t| h(sf(t)).ln(), x, step);
            let rr = five_point_derivative(|t| (1.0 - h(sf(t))).ln(), x, step);
            let j = d.jet(m.level(x));
            let (got_r, got_rr) = (m.hazard(x) * j.big_h, m.rev_hazard(x) * j.big_r);
            ensure!((got_r - r).abs() < 1e-6 * r.abs(), "pair {trial} ({k}|{n}, {}): r at {x}", m.label());
            ensure!((got_rr - rr).abs() < 1e-6 * rr.abs(), "pair {trial} ({k}|{n}, {}): r̃ at {x}", m.label());
            ensure!((tau.hazard(x) - got_r).abs() <= 1e-12 * got_r, "pair {trial}: lifetime hazard");
            ensure!((tau.rev_hazard(x) - got_rr).abs() <= 1e-12 * got_rr, "pair {trial}: lifetime reversed hazard");
        }
    }
    Ok("5 random pairs, 21 points each".into())
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "ex-3.1 H1/H2 classification", limit: Duration::from_secs(5), run: criterion_1 },
        Criterion { id: 2, name: "ex-5.1 v = R2/R1 increasing", limit: Duration::from_secs(5), run: criterion_2 },
        Criterion { id: 3, name: "ce-3.1 hazard counterexample", limit: Duration::from_secs(2), run: criterion_3 },
        Criterion { id: 4, name: "ce-3.2 reversed hazard counterexample", limit: Duration::from_secs(2), run: criterion_4 },
        Criterion { id: 5, name: "cor-4.1 series redundancy", limit: Duration::from_secs(5), run: criterion_5 },
        Criterion { id: 6, name: "ex-4.1 Gumbel series redundancy", limit: Duration::from_secs(5), run: criterion_6 },
        Criterion { id: 7, name: "cor-5.1/cor-5.2 residual systems", limit: Duration::from_secs(30), run: criterion_7 },
        Criterion { id: 8, name: "lemma-2.3/lemma-2.4 property suites", limit: Duration::from_secs(60), run: criterion_8 },
        Criterion { id: 9, name: "distortion oracle equivalence", limit: Duration::from_secs(30), run: criterion_9 },
        Criterion { id: 10, name: "hazard identities", limit: Duration::from_secs(5), run: criterion_10 },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; but took longer than {:?}", c.limit)),
            other => other,
        };
        let secs = elapsed.as_secs_f64();
        let limit = c.limit.as_secs();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} [{}] {secs:.2}s (limit {limit}s): {detail}", c.id, c.name),
            Err(why) => {
                println!("FAIL criterion {:>2} [{}] {secs:.2}s (limit {limit}s): {why}", c.id, c.name);
                failed.push(c.id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: {} of {} criteria failed: {failed:?}", failed.len(), criteria.len());
        std::process::exit(1);
    }
}
