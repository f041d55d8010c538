//! The registry of reproducible examples, counterexamples and property
//! suites. Each case recomputes its result and records the expected and
//! observed classifications as assertions.

use rayon::prelude::*;
use relage_core::distortion::{build_distortion, distortion_k_out_of_n};
use relage_core::lifetimes::system_lifetime;
use relage_core::monotone::check_monotone;
use relage_core::orders::{
    check_order, check_sufficient_conditions, compare_systems_exact, redundancy_verdict, residual_verdict, CheckConfig,
    Method,
};
use relage_core::{
    ConditionReport, CopulaError, Distortion, DistortionError, Level, LifetimeError, LifetimeModel, Marginal, Mode,
    MonotonicityVerdict, Order, OrderError, StructureError, StructureFunction, SurvivalCopula,
};
use thiserror::Error;

use crate::report::{Assertion, ConditionJson, Report};

#[derive(Debug, Error)]
pub enum ReproduceError {
    #[error("unknown case `{0}`; known cases: {known}", known = case_ids().join(", "))]
    UnknownCase(String),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Distortion(#[from] DistortionError),
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error(transparent)]
    Lifetime(#[from] LifetimeError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

type Result<T> = std::result::Result<T, ReproduceError>;

/// Case identifiers with a one-line description.
pub const CASES: [(&str, &str); 11] = [
    ("ex-1.1", "FGM distortion of the 3-component system with path sets {1,2},{1,3}"),
    ("ex-3.1", "FGM {1,2},{1,3} system vs FGM series: H1/H2 across θ"),
    ("ce-3.1", "Weibull parallel systems: X ≺c Y without Y ≤rh X"),
    ("ce-3.2", "Fréchet series systems: X ≺b Y without X ≤hr Y"),
    ("ex-5.1", "FGM {1,2},{1,3} system vs FGM series: R2/R1 across θ"),
    ("ex-4.1", "Gumbel series systems: system vs component redundancy under ≺b"),
    ("cor-4.1", "independent series systems: system vs component redundancy under ≺c"),
    ("cor-5.1", "k-out-of-n systems of used components vs used systems under ≺c"),
    ("cor-5.2", "parallel systems of used components vs used systems under ≺b"),
    ("lemma-2.3", "monotonicity of H for independent k-out-of-n systems"),
    ("lemma-2.4", "monotonicity of R for independent k-out-of-n systems"),
];

pub fn case_ids() -> Vec<&'static str> {
    CASES.iter().map(|c| c.0).collect()
}

pub fn is_known(case: &str) -> bool {
    CASES.iter().any(|c| c.0 == case)
}

/// Runs `case`, adding its conditions and assertions to `report`.
pub fn run(case: &str, cfg: &CheckConfig, seed: u64, report: &mut Report) -> Result<()> {
    report.case = Some(case.to_string());
    match case {
        "ex-1.1" => ex11(cfg, seed, report),
        "ex-3.1" => ex31(cfg, report),
        "ce-3.1" => ce31(cfg, report),
        "ce-3.2" => ce32(cfg, report),
        "ex-5.1" => ex51(cfg, report),
        "ex-4.1" => ex41(cfg, report),
        "cor-4.1" => cor41(cfg, report),
        "cor-5.1" => cor51(cfg, report),
        "cor-5.2" => cor52(cfg, report),
        "lemma-2.3" => lemma_h(cfg, report),
        "lemma-2.4" => lemma_r(cfg, report),
        other => Err(ReproduceError::UnknownCase(other.to_string())),
    }?;
    let passed = report.assertions.iter().all(|a| a.pass);
    report.verdict = if passed { "pass" } else { "mismatch" }.into();
    Ok(())
}

fn min_max_structure() -> Result<StructureFunction> {
    Ok(StructureFunction::from_path_sets(3, &[[1, 2], [1, 3]])?)
}

/// The `{1,2},{1,3}` system and the series system under FGM(θ).
fn fgm_pair(theta: f64) -> Result<(Distortion, Distortion)> {
    let c = SurvivalCopula::fgm(theta, 3)?;
    let d1 = build_distortion(&min_max_structure()?, &c)?.with_label(format!("h1[θ={theta}]"));
    let d2 = build_distortion(&StructureFunction::series(3)?, &c)?.with_label(format!("h2[θ={theta}]"));
    Ok((d1, d2))
}

fn class_with_witnesses(v: Option<&MonotonicityVerdict>) -> String {
    match v {
        Some(v) if v.witnesses().is_some() => format!("{} with witnesses", v.class.as_str()),
        Some(v) => v.class.as_str().to_string(),
        None => "missing".into(),
    }
}

fn ex11(cfg: &CheckConfig, seed: u64, report: &mut Report) -> Result<()> {
    const COUNT: usize = 100_000;
    let phi = min_max_structure()?;
    for theta in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let c = SurvivalCopula::fgm(theta, 3)?;
        let d = build_distortion(&phi, &c)?;
        d.validate()?;
        let v = check_monotone(|p| d.eval(p), cfg.eps, 1.0 - cfg.eps, &cfg.monotone).map_err(OrderError::from)?;
        report.conditions.push(ConditionJson::plain(format!("θ={theta}: h"), "h nondecreasing", v.class.is_nondecreasing()).with_verdict(&v));
        let mut max_err: f64 = 0.0;
        for i in 1..100 {
            let p = i as f64 / 100.0;
            let k = c.eval(&[p, p, 1.0])? + c.eval(&[p, 1.0, p])? - c.eval(&[p, p, p])?;
            max_err = max_err.max((d.eval(p) - k).abs());
        }
        report.assertions.push(Assertion::check(
            format!("θ={theta}: h(p) = K(p,p,1)+K(p,1,p)-K(p,p,p)"),
            "max |Δ| < 1e-12 on 99 points",
            format!("max |Δ| = {max_err:e}"),
            max_err < 1e-12,
        ));
    }
    // the system survives level p when component 1 and one of 2, 3 do
    let theta = 0.5;
    let c = SurvivalCopula::fgm(theta, 3)?;
    let d = build_distortion(&phi, &c)?;
    let sample = c.sample(COUNT, seed)?;
    let mut worst: f64 = 0.0;
    for i in 1..=21 {
        let p = i as f64 / 22.0;
        let up = |u: f64| u < p;
        let hits = sample.iter().filter(|u| up(u[0]) && (up(u[1]) || up(u[2]))).count();
        let est = hits as f64 / COUNT as f64;
        let se = (est * (1.0 - est) / COUNT as f64).sqrt();
        worst = worst.max((est - d.eval(p)).abs() / se);
    }
    report.assertions.push(Assertion::check(
        format!("θ={theta}: Monte Carlo system survival ({COUNT} samples, 21 levels)"),
        "within 4 standard errors",
        format!("max |z| = {worst:.3}"),
        worst < 4.0,
    ));
    report.conclusion = Some("h(p) = K(p,p,1) + K(p,1,p) - K(p,p,p)".into());
    Ok(())
}

fn push_reports(report: &mut Report, results: Vec<(String, Result<ConditionReport>)>) -> Result<Vec<(String, ConditionReport)>> {
    let mut out = Vec::with_capacity(results.len());
    for (label, r) in results {
        let r = r?;
        report.push_condition_report(&label, &r);
        out.push((label, r));
    }
    Ok(out)
}

fn ex31(cfg: &CheckConfig, report: &mut Report) -> Result<()> {
    let case_i: Vec<f64> = (-9..=5).map(|i| i as f64 / 10.0).collect();
    let case_ii: Vec<f64> = (0..=5).map(|i| (75 + 5 * i) as f64 / 100.0).collect();
    let thetas: Vec<(f64, &str)> =
        case_i.iter().map(|&t| (t, "decreasing")).chain(case_ii.iter().map(|&t| (t, "non-monotone with witnesses"))).collect();
    let results: Vec<_> = thetas
        .par_iter()
        .map(|&(theta, _)| {
            let r = fgm_pair(theta).and_then(|(d1, d2)| Ok(compare_systems_exact(&d1, &d2, Mode::C, cfg)?));
            (format!("θ={theta}"), r)
        })
        .collect();
    let reports = push_reports(report, results)?;
    for ((label, r), (_, expected)) in reports.iter().zip(&thetas) {
        let observed = class_with_witnesses(r.entries[0].verdict.as_ref());
        report.assertions.push(Assertion::new(format!("{label}: H1/H2"), *expected, observed));
    }
    report.conclusion = Some("τ1 ≺c τ2 for θ ≤ 0.5; no ≺c relation for θ ≥ 0.75".into());
    Ok(())
}

fn ce31(cfg: &CheckConfig, report: &mut Report) -> Result<()> {
    let par = distortion_k_out_of_n(1, 3)?;
    let (mx, my) = (Marginal::weibull(2.0, 3.0)?, Marginal::weibull(0.1, 2.0)?);
    let (x, y) = (LifetimeModel::Marginal(mx), LifetimeModel::Marginal(my));
    let range = cfg.clone().with_x_range(0.05, 3.0);

    let comp = check_order(&x, &y, Order::AgingFasterC, &range)?;
    report.push_order_verdict("r_X/r_Y", &comp);
    report.assertions.push(Assertion::new("r_X/r_Y = 30x on [0.05, 3]", "increasing", comp.detail.class.as_str()));

    let suff = check_sufficient_conditions(&par, &par, &x, &y, Mode::C, cfg)?;
    report.push_condition_report("hypotheses", &suff);
    for (name, expected) in [("(iii) X≺cY", true), ("(iii) Y≤rhX", false)] {
        let observed = suff.entry(name).map(|e| e.holds.to_string()).unwrap_or_else(|| "missing".into());
        report.assertions.push(Assertion::new(name, expected.to_string(), observed));
    }

    let sys = check_order(&system_lifetime(&par, &x), &system_lifetime(&par, &y), Order::AgingFasterC, &range)?;
    report.push_order_verdict("k(x) = r_τ(X)/r_τ(Y)", &sys);
    report.assertions.push(Assertion::new(
        "k(x) on [0.05, 3]",
        "non-monotone with witnesses",
        class_with_witnesses(Some(&sys.detail)),
    ));
    report.conclusion = Some("the component-level ≺c relation does not lift to the parallel systems".into());
    Ok(())
}

fn ce32(cfg: &CheckConfig, report: &mut Report) -> Result<()> {
    let ser = distortion_k_out_of_n(2, 2)?;
    let (mx, my) = (Marginal::frechet(2.1, 7.0)?, Marginal::frechet(2.0, 3.0)?);
    let (x, y) = (LifetimeModel::Marginal(mx), LifetimeModel::Marginal(my));

    let suff = check_sufficient_conditions(&ser, &ser, &x, &y, Mode::B, cfg)?;
    report.push_condition_report("hypotheses", &suff);
    for (name, expected) in [("(iii) X≺bY", true), ("(iii) X≤hrY", false)] {
        let observed = suff.entry(name).map(|e| e.holds.to_string()).unwrap_or_else(|| "missing".into());
        report.assertions.push(Assertion::new(name, expected.to_string(), observed));
    }

    let range = cfg.clone().with_x_range(0.5, 10.0);
    let sys = check_order(&system_lifetime(&ser, &x), &system_lifetime(&ser, &y), Order::AgingFasterB, &range)?;
    report.push_order_verdict("r̃_τ(X)/r̃_τ(Y)", &sys);
    report.assertions.push(Assertion::new(
        "reversed hazard ratio of the systems on [0.5, 10]",
        "non-monotone with witnesses",
        class_with_witnesses(Some(&sys.detail)),
    ));
    report.notes.push(
        "l(x) = r̃_τ(Y)/r̃_τ(X) satisfies d ln l/dx = 4/x - r_Y/(1+F̄_Y) + r_X/(1+F̄_X) > 1/x, since \
         x·r_Y(x) = 3z/(e^z - 1) < 3 with z = (2/x)^3; the ratio is strictly monotone on x > 0, so a \
         non-monotone classification is unattainable"
            .into(),
    );
    report.conclusion = Some(format!(
        "τ(X) {} τ(Y) under ≺b on [0.5, 10] although X ≤hr Y fails",
        if sys.holds_forward { "precedes" } else { "does not precede" }
    ));
    Ok(())
}

fn ex51(cfg: &CheckConfig, report: &mut Report) -> Result<()> {
    let thetas: Vec<f64> = (-5..=5).map(|i| i as f64 / 5.0).collect();
    let results: Vec<_> = thetas
        .par_iter()
        .map(|&theta| {
            let r = fgm_pair(theta).and_then(|(d1, d2)| Ok(compare_systems_exact(&d1, &d2, Mode::B, cfg)?));
            (format!("θ={theta}"), r)
        })
        .collect();
    let reports = push_reports(report, results)?;
    for (label, r) in &reports {
        // the entry classifies R1/R2; v is its reciprocal
        let v = r.entries[0].class().map(|c| c.reversed().as_str()).unwrap_or("missing");
        report.assertions.push(Assertion::new(format!("{label}: v = R2/R1"), "increasing", v));
        report.assertions.push(Assertion::new(format!("{label}: relation of τ1 to τ2"), "succeeds", r.relation.as_str()));
    }
    report.conclusion = Some("τ1 ≻b τ2 for every θ ∈ [-1, 1]".into());
    Ok(())
}

fn ex41(cfg: &CheckConfig, report: &mut Report) -> Result<()> {
    let cases = [(2usize, 1.5f64), (3, 2.0), (4, 3.0)];
    let mut jobs = Vec::new();
    for (n, theta) in cases {
        jobs.push((n, theta, 1, Method::Sufficient));
        jobs.push((n, theta, 1, Method::Iff));
        jobs.push((n, theta, 2, Method::Iff));
    }
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(n, theta, m, method)| {
            let r = (|| {
                let d = build_distortion(&StructureFunction::series(n)?, &SurvivalCopula::gumbel(theta, n)?)?;
                Ok(redundancy_verdict(&d, m, Mode::B, method, cfg)?)
            })();
            (format!("n={n} θ={theta} m={m} {}", method.as_str()), r)
        })
        .collect();
    let reports = push_reports(report, results)?;
    for ((label, r), (_, _, _, method)) in reports.iter().zip(&jobs) {
        let expected = match method {
            Method::Sufficient => "sufficient-holds",
            Method::Iff => "iff-holds",
        };
        report.assertions.push(Assertion::new(format!("{label}: verdict"), expected, r.overall.as_str()));
        report.assertions.push(Assertion::new(format!("{label}: T_S to T_C"), "precedes", r.relation.as_str()));
    }
    report.conclusion = Some("T_S ≺b T_C (h = p^a, a = n^(1/θ))".into());
    Ok(())
}

fn cor41(cfg: &CheckConfig, report: &mut Report) -> Result<()> {
    let results: Vec<_> = (2..=5usize)
        .into_par_iter()
        .map(|n| {
            let r = distortion_k_out_of_n(n, n).map_err(ReproduceError::from).and_then(|d| Ok(redundancy_verdict(&d, 1, Mode::C, Method::Iff, cfg)?));
            (format!("n={n}"), r)
        })
        .collect();
    let reports = push_reports(report, results)?;
    for (label, r) in &reports {
        report.assertions.push(Assertion::new(format!("{label}: T_S to T_C"), "succeeds", r.relation.as_str()));
        let cv = r.entry("cross-validation").map(|e| e.holds.to_string()).unwrap_or_else(|| "missing".into());
        report.assertions.push(Assertion::new(format!("{label}: exponential cross-validation"), "true", cv));
    }
    report.conclusion = Some("T_S ≻c T_C for series systems with m = 1".into());
    Ok(())
}

fn residual_suite(
    cfg: &CheckConfig,
    report: &mut Report,
    systems: Vec<(usize, usize)>,
    mode: Mode,
) -> Result<()> {
    let results: Vec<_> = systems
        .par_iter()
        .map(|&(k, n)| {
            let r = distortion_k_out_of_n(k, n).map_err(ReproduceError::from).and_then(|d| Ok(residual_verdict(&d, mode, Method::Iff, cfg)?));
            (format!("{k}|{n}"), r)
        })
        .collect();
    let reports = push_reports(report, results)?;
    for (label, r) in &reports {
        report.assertions.push(Assertion::new(format!("{label}: verdict"), "iff-holds", r.overall.as_str()));
    }
    Ok(())
}

fn cor51(cfg: &CheckConfig, report: &mut Report) -> Result<()> {
    let systems = (1..=6).flat_map(|n| (1..=n).map(move |k| (k, n))).collect();
    residual_suite(cfg, report, systems, Mode::C)?;
    report.conclusion = Some("τ(X_t) ≺c (τ(X))_t for every k-out-of-n system, n ≤ 6".into());
    Ok(())
}

fn cor52(cfg: &CheckConfig, report: &mut Report) -> Result<()> {
    residual_suite(cfg, report, (2..=6).map(|n| (1, n)).collect(), Mode::B)?;
    report.conclusion = Some("τ(X_t) ≺b (τ(X))_t for parallel systems, 2 ≤ n ≤ 6".into());
    Ok(())
}

const LEMMA_MAX_N: usize = 8;

fn systems_up_to(max_n: usize) -> Vec<(usize, usize)> {
    (1..=max_n).flat_map(|n| (1..=n).map(move |k| (k, n))).collect()
}

/// One statement family: every item is classified and must satisfy `ok`.
struct Family<'a> {
    name: &'a str,
    statement: String,
    results: Vec<(String, MonotonicityVerdict)>,
    ok: fn(&MonotonicityVerdict) -> bool,
}

fn record_family(report: &mut Report, f: Family<'_>) {
    let total = f.results.len();
    let failures: Vec<&(String, MonotonicityVerdict)> = f.results.iter().filter(|(_, v)| !(f.ok)(v)).collect();
    for (label, v) in &failures {
        report.conditions.push(ConditionJson::plain(format!("{}: {label}", f.name), &f.statement, false).with_verdict(v));
    }
    report.conditions.push(ConditionJson::plain(f.name, &f.statement, failures.is_empty()).with_note(format!(
        "{} of {total} cases classified as required",
        total - failures.len()
    )));
    report.assertions.push(Assertion::new(
        format!("{}: {}", f.name, f.statement),
        format!("{total} of {total}"),
        format!("{} of {total}", total - failures.len()),
    ));
}

fn classify_all<T: Sync>(
    cfg: &CheckConfig,
    items: &[T],
    label: impl Fn(&T) -> String + Sync,
    f: impl Fn(&T, f64) -> f64 + Sync,
) -> Result<Vec<(String, MonotonicityVerdict)>> {
    items
        .par_iter()
        .map(|it| {
            let v = check_monotone(|p| f(it, p), cfg.eps, 1.0 - cfg.eps, &cfg.monotone).map_err(OrderError::from)?;
            Ok((label(it), v))
        })
        .collect()
}

type Indexed = (usize, usize, Distortion);

fn lemma_systems() -> Result<Vec<Indexed>> {
    systems_up_to(LEMMA_MAX_N).into_iter().map(|(k, n)| Ok((k, n, distortion_k_out_of_n(k, n)?))).collect()
}

fn lemma_h(cfg: &CheckConfig, report: &mut Report) -> Result<()> {
    let all = lemma_systems()?;
    let label = |s: &Indexed| format!("{}|{}", s.0, s.1);
    let h = classify_all(cfg, &all, label, |s, p| s.2.jet(Level::new(p)).big_h)?;
    let qh = classify_all(cfg, &all, label, |s, p| {
        let l = Level::new(p);
        s.2.jet(l).q_dlog_h(l)
    })?;
    let pairs: Vec<(&Indexed, &Indexed)> = all
        .iter()
        .flat_map(|a| all.iter().map(move |b| (a, b)))
        .filter(|(a, b)| a.0 <= b.0 && b.1 - b.0 <= a.1 - a.0)
        .collect();
    let ratio = classify_all(
        cfg,
        &pairs,
        |(a, b)| format!("{}|{} / {}|{}", a.0, a.1, b.0, b.1),
        |(a, b), p| {
            let l = Level::new(p);
            a.2.jet(l).big_h / b.2.jet(l).big_h
        },
    )?;
    let dec = |v: &MonotonicityVerdict| v.class.is_nonincreasing();
    record_family(report, Family { name: "(i)", statement: "H_k|n decreasing, 1 ≤ k ≤ n ≤ 8".into(), results: h, ok: dec });
    record_family(report, Family { name: "(ii)", statement: "(1-p)H'_k|n/H_k|n decreasing".into(), results: qh, ok: dec });
    record_family(
        report,
        Family { name: "(iii)", statement: "H_k|n/H_l|m decreasing for k ≤ l, m-l ≤ n-k".into(), results: ratio, ok: dec },
    );
    report.conclusion = Some("all monotonicity statements for H hold on the grid".into());
    Ok(())
}

fn lemma_r(cfg: &CheckConfig, report: &mut Report) -> Result<()> {
    let all = lemma_systems()?;
    let label = |s: &Indexed| format!("{}|{}", s.0, s.1);
    let r = classify_all(cfg, &all, label, |s, p| s.2.jet(Level::new(p)).big_r)?;
    let pr = classify_all(cfg, &all, label, |s, p| {
        let l = Level::new(p);
        s.2.jet(l).p_dlog_r(l)
    })?;
    let pairs: Vec<(&Indexed, &Indexed)> = all
        .iter()
        .flat_map(|a| all.iter().map(move |b| (a, b)))
        .filter(|(a, b)| b.0 <= a.0 && a.1 - a.0 <= b.1 - b.0)
        .collect();
    let ratio = classify_all(
        cfg,
        &pairs,
        |(a, b)| format!("{}|{} / {}|{}", a.0, a.1, b.0, b.1),
        |(a, b), p| {
            let l = Level::new(p);
            a.2.jet(l).big_r / b.2.jet(l).big_r
        },
    )?;
    let inc = |v: &MonotonicityVerdict| v.class.is_nondecreasing();
    let dec = |v: &MonotonicityVerdict| v.class.is_nonincreasing();
    record_family(report, Family { name: "(i)", statement: "R_k|n increasing, 1 ≤ k ≤ n ≤ 8".into(), results: r, ok: inc });
    record_family(report, Family { name: "(ii)", statement: "pR'_k|n/R_k|n decreasing".into(), results: pr, ok: dec });
    record_family(
        report,
        Family { name: "(iii)", statement: "R_k|n/R_l|m increasing for l ≤ k, n-k ≤ m-l".into(), results: ratio, ok: inc },
    );
    report.conclusion = Some("all monotonicity statements for R hold on the grid".into());
    Ok(())
}
