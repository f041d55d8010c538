//! Stochastic and ageing-faster orders, and the criteria that decide them.
//!
//! Lifetime-level checks ([`check_order`]) classify the defining ratio on an
//! `x` grid. Distortion-level criteria work on `p = F̄(x) ∈ (ε, 1-ε)` and are
//! marginal-free; wherever a criterion is an equivalence or a sufficient
//! condition, a passing verdict is cross-validated against [`check_order`] on
//! explicitly constructed lifetimes, and disagreement is an error rather than
//! a silent verdict.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::copulas::{CopulaError, Generator, SurvivalCopula};
use crate::distortion::{
    build_distortion, transform_redundancy, Distortion, DistortionError, Level, RedundancyLevel, DEFAULT_EPS,
};
use crate::lifetimes::{residual_model, system_lifetime, LifetimeError, LifetimeModel, Marginal, ResidualKind};
use crate::math::{ln, powi};
use crate::monotone::{check_monotone, MonotoneConfig, MonotoneError, Monotonicity, MonotonicityVerdict, Spacing, Witness};
use crate::structures::{StructureError, StructureFunction};

/// Survival levels of the component-lifetime cross-validation points.
const RESIDUAL_SF_LEVELS: [f64; 3] = [0.8, 0.5, 0.2];
/// Survival band defining the default `x` range of a lifetime.
const X_SF_BAND: f64 = 1e-4;
const GENERATOR_TAIL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrderError {
    #[error("internal inconsistency in {check}: {detail}")]
    InternalInconsistency { check: String, detail: String },
    #[error("{check} has no {method} criterion in mode {mode}")]
    UnsupportedMethod { check: &'static str, mode: Mode, method: Method },
    #[error("generator is not decreasing near x={x}")]
    GeneratorNotDecreasing { x: f64 },
    #[error("no common x range: [{lo}, {hi}]")]
    EmptyRange { lo: f64, hi: f64 },
    #[error("redundancy must be at least 1")]
    BadRedundancy,
    #[error(transparent)]
    Monotone(#[from] MonotoneError),
    #[error(transparent)]
    Distortion(#[from] DistortionError),
    #[error(transparent)]
    Lifetime(#[from] LifetimeError),
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// `X ≤hr Y`: `F̄_Y / F̄_X` increasing.
    Hr,
    /// `X ≤rh Y`: `F_Y / F_X` increasing.
    Rhr,
    /// `X ≺c Y`: `r_X / r_Y` increasing.
    AgingFasterC,
    /// `X ≺b Y`: `r̃_X / r̃_Y` decreasing.
    AgingFasterB,
}

impl Order {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Hr => "hr",
            Self::Rhr => "rhr",
            Self::AgingFasterC => "aging_faster_c",
            Self::AgingFasterB => "aging_faster_b",
        }
    }

    /// Monotonicity of the defining ratio that means "A related to B".
    fn forward_class(&self) -> Monotonicity {
        match self {
            Self::AgingFasterB => Monotonicity::Decreasing,
            _ => Monotonicity::Increasing,
        }
    }

    pub fn ratio_label(&self) -> &'static str {
        match self {
            Self::Hr => "sf_B/sf_A",
            Self::Rhr => "cdf_B/cdf_A",
            Self::AgingFasterC => "r_A/r_B",
            Self::AgingFasterB => "rev_r_A/rev_r_B",
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Hazard-rate ageing, `≺c`.
    C,
    /// Reversed-hazard ageing, `≺b`.
    B,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::C => "c",
            Self::B => "b",
        }
    }

    pub fn order(&self) -> Order {
        match self {
            Self::C => Order::AgingFasterC,
            Self::B => Order::AgingFasterB,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Iff,
    Sufficient,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Iff => "iff",
            Self::Sufficient => "sufficient",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderVerdict {
    pub order: Order,
    pub holds_forward: bool,
    pub holds_reverse: bool,
    pub detail: MonotonicityVerdict,
}

impl OrderVerdict {
    fn new(order: Order, detail: MonotonicityVerdict) -> Self {
        let forward = order.forward_class();
        let holds_forward = detail.class == forward || detail.class == Monotonicity::Constant;
        let holds_reverse = detail.class == forward.reversed() || detail.class == Monotonicity::Constant;
        Self { order, holds_forward, holds_reverse, detail }
    }
}

/// The relation between the first and second object of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// First ages faster than second (`≺`).
    Precedes,
    /// Second ages faster than first (`≻`).
    Succeeds,
    /// Both directions (constant ratio).
    Both,
    Neither,
}

impl Relation {
    /// Maps a ratio class when `decreasing_means` is the relation implied by
    /// a decreasing ratio.
    fn from_class(class: Monotonicity, decreasing_means: Relation) -> Self {
        let increasing_means = match decreasing_means {
            Relation::Precedes => Relation::Succeeds,
            _ => Relation::Precedes,
        };
        match class {
            Monotonicity::Decreasing => decreasing_means,
            Monotonicity::Increasing => increasing_means,
            Monotonicity::Constant => Relation::Both,
            Monotonicity::NonMonotone => Relation::Neither,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Precedes => "precedes",
            Self::Succeeds => "succeeds",
            Self::Both => "both",
            Self::Neither => "neither",
        }
    }

    /// `self` is compatible with the claimed `other`.
    fn implies(&self, claimed: Relation) -> bool {
        *self == claimed || *self == Relation::Both
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overall {
    SufficientHolds,
    SufficientFails,
    IffHolds,
    IffFailsWithWitness,
}

impl Overall {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::SufficientHolds => "sufficient-holds",
            Self::SufficientFails => "sufficient-fails",
            Self::IffHolds => "iff-holds",
            Self::IffFailsWithWitness => "iff-fails-with-witness",
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, Self::SufficientHolds | Self::IffHolds)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionEntry {
    pub name: String,
    /// What was required, e.g. `"H1/H2 decreasing"`.
    pub statement: String,
    pub holds: bool,
    pub verdict: Option<MonotonicityVerdict>,
    /// For lifetime-level entries, the order verdict behind `verdict`.
    pub order: Option<Order>,
    pub note: Option<String>,
}

impl ConditionEntry {
    fn monotone(name: impl Into<String>, statement: impl Into<String>, holds: bool, v: MonotonicityVerdict) -> Self {
        Self { name: name.into(), statement: statement.into(), holds, verdict: Some(v), order: None, note: None }
    }

    fn from_order(name: impl Into<String>, statement: impl Into<String>, holds: bool, v: OrderVerdict) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            holds,
            verdict: Some(v.detail),
            order: Some(v.order),
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn witnesses(&self) -> Option<(Witness, Witness)> {
        self.verdict.as_ref().and_then(|v| v.witnesses())
    }

    pub fn class(&self) -> Option<Monotonicity> {
        self.verdict.as_ref().map(|v| v.class)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub check: &'static str,
    pub mode: Option<Mode>,
    pub method: Method,
    pub entries: Vec<ConditionEntry>,
    pub overall: Overall,
    pub relation: Relation,
    /// Human-readable conclusion, e.g. `"T_S ≻c T_C"`.
    pub conclusion: String,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn entry(&self, name: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Witness pairs of every non-monotone entry.
    pub fn witnesses(&self) -> Vec<(String, Witness, Witness)> {
        self.entries.iter().filter_map(|e| e.witnesses().map(|(r, f)| (e.name.clone(), r, f))).collect()
    }
}

/// Shared settings of every checker.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub monotone: MonotoneConfig,
    /// `p` ranges are clipped to `[eps, 1-eps]`.
    pub eps: f64,
    /// Overrides the default `x` range of lifetime checks.
    pub x_range: Option<(f64, f64)>,
    pub q_points: usize,
    /// Ages used for residual cross-validation; defaults to the ages at
    /// which an exponential(1) component survives with 0.8, 0.5, 0.2.
    pub residual_ts: Option<Vec<f64>>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { monotone: MonotoneConfig::default(), eps: DEFAULT_EPS, x_range: None, q_points: 50, residual_ts: None }
    }
}

impl CheckConfig {
    pub fn with_x_range(mut self, lo: f64, hi: f64) -> Self {
        self.x_range = Some((lo, hi));
        self
    }

    fn p_monotone(&self, f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<MonotonicityVerdict, OrderError> {
        Ok(check_monotone(f, lo, hi, &self.monotone)?)
    }

    fn p_unit(&self, f: impl Fn(f64) -> f64) -> Result<MonotonicityVerdict, OrderError> {
        self.p_monotone(f, self.eps, 1.0 - self.eps)
    }
}

/// Classifies the ratio defining `order` between `a` and `b` ("A related to
/// B") on a log-spaced `x` grid. Without an explicit range the grid covers
/// the `x` values where both survivals lie within `[1e-4, 1-1e-4]`.
pub fn check_order(
    a: &LifetimeModel,
    b: &LifetimeModel,
    order: Order,
    cfg: &CheckConfig,
) -> Result<OrderVerdict, OrderError> {
    let (lo, hi) = match cfg.x_range {
        Some(r) => r,
        None => {
            let ra = a.x_range(X_SF_BAND, 1.0 - X_SF_BAND)?;
            let rb = b.x_range(X_SF_BAND, 1.0 - X_SF_BAND)?;
            (ra.0.max(rb.0), ra.1.min(rb.1))
        }
    };
    if !(lo < hi && lo > 0.0) {
        return Err(OrderError::EmptyRange { lo, hi });
    }
    let mcfg = cfg.monotone.with_spacing(Spacing::Geometric);
    let ratio = |x: f64| match order {
        // survival and distribution ratios through logs, so deep tails
        // neither underflow nor turn into 0/0
        Order::Hr => {
            let (la, lb) = (a.level(x), b.level(x));
            crate::math::exp(crate::math::ln_from_pair(lb.p, lb.q) - crate::math::ln_from_pair(la.p, la.q))
        }
        Order::Rhr => {
            let (la, lb) = (a.level(x), b.level(x));
            crate::math::exp(crate::math::ln_from_pair(lb.q, lb.p) - crate::math::ln_from_pair(la.q, la.p))
        }
        Order::AgingFasterC => a.hazard(x) / b.hazard(x),
        Order::AgingFasterB => a.rev_hazard(x) / b.rev_hazard(x),
    };
    let detail = check_monotone(ratio, lo, hi, &mcfg)?;
    Ok(OrderVerdict::new(order, detail))
}

fn symbol(mode: Mode) -> &'static str {
    match mode {
        Mode::C => "c",
        Mode::B => "b",
    }
}

fn relation_text(first: &str, second: &str, mode: Mode, relation: Relation) -> String {
    let m = symbol(mode);
    match relation {
        Relation::Precedes => format!("{first} ≺{m} {second}"),
        Relation::Succeeds => format!("{first} ≻{m} {second}"),
        Relation::Both => format!("{first} ≺{m} {second} and {first} ≻{m} {second}"),
        Relation::Neither => format!("{first} and {second} are not ≺{m}-comparable"),
    }
}

fn iff_overall(relation: Relation) -> Overall {
    match relation {
        Relation::Neither => Overall::IffFailsWithWitness,
        _ => Overall::IffHolds,
    }
}

/// Decides `τ1 ≺ τ2` for two systems sharing a component lifetime from the
/// ratio `H1/H2` (mode c, decreasing ⇔ `≺c`) or `R1/R2` (mode b,
/// increasing ⇔ `≺b`).
pub fn compare_systems_exact(
    d1: &Distortion,
    d2: &Distortion,
    mode: Mode,
    cfg: &CheckConfig,
) -> Result<ConditionReport, OrderError> {
    let (statement, verdict, decreasing_means) = match mode {
        Mode::C => {
            let v = cfg.p_unit(|p| {
                let l = Level::new(p);
                d1.jet(l).big_h / d2.jet(l).big_h
            })?;
            ("H1/H2 monotone in p", v, Relation::Precedes)
        }
        Mode::B => {
            let v = cfg.p_unit(|p| {
                let l = Level::new(p);
                d1.jet(l).big_r / d2.jet(l).big_r
            })?;
            ("R1/R2 monotone in p", v, Relation::Succeeds)
        }
    };
    let relation = Relation::from_class(verdict.class, decreasing_means);
    let holds = relation != Relation::Neither;
    Ok(ConditionReport {
        check: "compare_systems_exact",
        mode: Some(mode),
        method: Method::Iff,
        entries: alloc::vec![ConditionEntry::monotone("ratio", statement, holds, verdict)],
        overall: iff_overall(relation),
        relation,
        conclusion: relation_text("τ1", "τ2", mode, relation),
        notes: alloc::vec!["marginal-free: holds for every common component lifetime".to_string()],
    })
}

/// Checks the hypotheses of the sufficient criteria for `τ1(X) ≺ τ2(Y)`:
///
/// * mode c: (i) `H1` and `H1/H2` decreasing, (ii) `(1-p)H1'/H1` or
///   `(1-p)H2'/H2` decreasing, (iii) `X ≺c Y` and `Y ≤rh X`;
/// * mode b: (i) `R1` and `R1/R2` increasing, (ii) `pR1'/R1` or `pR2'/R2`
///   decreasing, (iii) `X ≺b Y` and `X ≤hr Y`.
///
/// When all hold the conclusion is verified on the system lifetimes.
pub fn check_sufficient_conditions(
    d1: &Distortion,
    d2: &Distortion,
    x: &LifetimeModel,
    y: &LifetimeModel,
    mode: Mode,
    cfg: &CheckConfig,
) -> Result<ConditionReport, OrderError> {
    let mut entries = Vec::new();
    let (alt1, alt2);
    match mode {
        Mode::C => {
            let v = cfg.p_unit(|p| d1.jet(Level::new(p)).big_h)?;
            entries.push(ConditionEntry::monotone("(i) H1", "H1 decreasing", v.class.is_nonincreasing(), v));
            let v = cfg.p_unit(|p| {
                let l = Level::new(p);
                d1.jet(l).big_h / d2.jet(l).big_h
            })?;
            entries.push(ConditionEntry::monotone("(i) H1/H2", "H1/H2 decreasing", v.class.is_nonincreasing(), v));
            let v1 = cfg.p_unit(|p| {
                let l = Level::new(p);
                d1.jet(l).q_dlog_h(l)
            })?;
            let v2 = cfg.p_unit(|p| {
                let l = Level::new(p);
                d2.jet(l).q_dlog_h(l)
            })?;
            alt1 = v1.class.is_nonincreasing();
            alt2 = v2.class.is_nonincreasing();
            entries.push(ConditionEntry::monotone("(ii) alt 1", "(1-p)H1'/H1 decreasing", alt1, v1));
            entries.push(ConditionEntry::monotone("(ii) alt 2", "(1-p)H2'/H2 decreasing", alt2, v2));
        }
        Mode::B => {
            let v = cfg.p_unit(|p| d1.jet(Level::new(p)).big_r)?;
            entries.push(ConditionEntry::monotone("(i) R1", "R1 increasing", v.class.is_nondecreasing(), v));
            let v = cfg.p_unit(|p| {
                let l = Level::new(p);
                d1.jet(l).big_r / d2.jet(l).big_r
            })?;
            entries.push(ConditionEntry::monotone("(i) R1/R2", "R1/R2 increasing", v.class.is_nondecreasing(), v));
            let v1 = cfg.p_unit(|p| {
                let l = Level::new(p);
                d1.jet(l).p_dlog_r(l)
            })?;
            let v2 = cfg.p_unit(|p| {
                let l = Level::new(p);
                d2.jet(l).p_dlog_r(l)
            })?;
            alt1 = v1.class.is_nonincreasing();
            alt2 = v2.class.is_nonincreasing();
            entries.push(ConditionEntry::monotone("(ii) alt 1", "pR1'/R1 decreasing", alt1, v1));
            entries.push(ConditionEntry::monotone("(ii) alt 2", "pR2'/R2 decreasing", alt2, v2));
        }
    }
    let which = match (alt1, alt2) {
        (true, true) => "both alternatives hold",
        (true, false) => "alternative 1 holds",
        (false, true) => "alternative 2 holds",
        (false, false) => "neither alternative holds",
    };
    entries.push(ConditionEntry {
        name: "(ii)".into(),
        statement: "either alternative".into(),
        holds: alt1 || alt2,
        verdict: None,
        order: None,
        note: Some(which.into()),
    });
    match mode {
        Mode::C => {
            let v = check_order(x, y, Order::AgingFasterC, cfg)?;
            entries.push(ConditionEntry::from_order("(iii) X≺cY", "X ≺c Y", v.holds_forward, v));
            let v = check_order(y, x, Order::Rhr, cfg)?;
            entries.push(ConditionEntry::from_order("(iii) Y≤rhX", "Y ≤rh X", v.holds_forward, v));
        }
        Mode::B => {
            let v = check_order(x, y, Order::AgingFasterB, cfg)?;
            entries.push(ConditionEntry::from_order("(iii) X≺bY", "X ≺b Y", v.holds_forward, v));
            let v = check_order(x, y, Order::Hr, cfg)?;
            entries.push(ConditionEntry::from_order("(iii) X≤hrY", "X ≤hr Y", v.holds_forward, v));
        }
    }
    let all = entries.iter().filter(|e| !e.name.starts_with("(ii) alt")).all(|e| e.holds);
    let mut notes = Vec::new();
    let m = symbol(mode);
    let conclusion = if all {
        let (t1, t2) = (system_lifetime(d1, x), system_lifetime(d2, y));
        let v = check_order(&t1, &t2, mode.order(), cfg)?;
        if !v.holds_forward {
            return Err(OrderError::InternalInconsistency {
                check: "check_sufficient_conditions".into(),
                detail: format!("hypotheses hold but τ1(X) ≺{m} τ2(Y) fails ({})", v.detail.class.as_str()),
            });
        }
        entries.push(ConditionEntry::from_order(
            "conclusion",
            format!("τ1(X) ≺{m} τ2(Y) on the system lifetimes"),
            true,
            v,
        ));
        format!("τ1(X) ≺{m} τ2(Y)")
    } else {
        notes.push("hypotheses not all satisfied; no conclusion asserted".into());
        "not established".into()
    };
    Ok(ConditionReport {
        check: "check_sufficient_conditions",
        mode: Some(mode),
        method: Method::Sufficient,
        entries,
        overall: if all { Overall::SufficientHolds } else { Overall::SufficientFails },
        relation: if all { Relation::Precedes } else { Relation::Neither },
        conclusion,
        notes,
    })
}

fn geometric_sum(x: f64, m: u32) -> f64 {
    (0..=m).fold(0.0, |acc, i| acc + powi(x, i))
}

/// `(u, 1-u)` with `u = 1-(1-p)^(m+1)`, the survival of an (m+1)-fold
/// redundant component.
fn redundant_level(p: f64, m: u32) -> Level {
    let uc = powi(1.0 - p, m + 1);
    Level::pair(-crate::math::expm1((m + 1) as f64 * crate::math::ln_1p(-p)), uc)
}

/// `H_S/H_C`: the hazard multipliers of system-level over component-level
/// redundancy with `m` spares.
fn km0(d: &Distortion, m: u32, p: f64) -> f64 {
    let q = 1.0 - p;
    let j = d.jet(Level::new(p));
    let k = d.jet(redundant_level(p, m));
    j.big_h * powi(j.hc / q, m) * geometric_sum(q, m) / (geometric_sum(j.hc, m) * k.big_h)
}

fn exponential() -> Marginal {
    Marginal::Exponential { rate: 1.0 }
}

/// Compares redundancy at the system level (`T_S`) with redundancy at the
/// component level (`T_C`), `m` spares each.
///
/// Mode c, iff: `H_S/H_C` decreasing ⇔ `T_S ≺c T_C` (increasing ⇔ `≻c`).
/// Mode b, iff: `R(p)/R(1-(1-p)^(m+1))` increasing ⇔ `T_S ≺b T_C`.
/// Mode b, sufficient: `pR'/R` decreasing and positive ⇒ `T_S ≺b T_C`.
pub fn redundancy_verdict(
    d: &Distortion,
    m: u32,
    mode: Mode,
    method: Method,
    cfg: &CheckConfig,
) -> Result<ConditionReport, OrderError> {
    if m == 0 {
        return Err(OrderError::BadRedundancy);
    }
    let mut entries = Vec::new();
    let (overall, relation) = match (mode, method) {
        (Mode::C, Method::Iff) => {
            let v = cfg.p_unit(|p| km0(d, m, p))?;
            let relation = Relation::from_class(v.class, Relation::Precedes);
            entries.push(ConditionEntry::monotone(
                "km0",
                "((1-h)^m h'/(1-(1-h)^(m+1))) · (h(u)/((1-p)^m h'(u))) monotone, u = 1-(1-p)^(m+1)",
                relation != Relation::Neither,
                v,
            ));
            (iff_overall(relation), relation)
        }
        (Mode::B, Method::Iff) => {
            let v = cfg.p_unit(|p| d.jet(Level::new(p)).big_r / d.jet(redundant_level(p, m)).big_r)?;
            let holds = v.class.is_nondecreasing();
            // only the increasing direction is an equivalence
            let relation = if holds { Relation::Precedes } else { Relation::Neither };
            entries.push(ConditionEntry::monotone("R ratio", "R(p)/R(1-(1-p)^(m+1)) increasing", holds, v));
            (if holds { Overall::IffHolds } else { Overall::IffFailsWithWitness }, relation)
        }
        (Mode::B, Method::Sufficient) => {
            let v = cfg.p_unit(|p| {
                let l = Level::new(p);
                d.jet(l).p_dlog_r(l)
            })?;
            let positive = v.min_value > 0.0;
            let decreasing = v.class.is_nonincreasing();
            let min = v.min_value;
            entries.push(ConditionEntry::monotone("pR'/R decreasing", "pR'/R decreasing", decreasing, v));
            entries.push(ConditionEntry {
                name: "pR'/R positive".into(),
                statement: "pR'/R > 0".into(),
                holds: positive,
                verdict: None,
                order: None,
                note: Some(format!("minimum on grid {min:e}")),
            });
            if decreasing && positive {
                (Overall::SufficientHolds, Relation::Precedes)
            } else {
                (Overall::SufficientFails, Relation::Neither)
            }
        }
        (Mode::C, Method::Sufficient) => {
            return Err(OrderError::UnsupportedMethod { check: "redundancy_verdict", mode, method })
        }
    };

    // cross-validation on explicit lifetimes with an exponential component
    let ts = transform_redundancy(d, RedundancyLevel::System, m)?;
    let tc = transform_redundancy(d, RedundancyLevel::Component, m)?;
    let x = LifetimeModel::Marginal(exponential());
    let explicit = check_order(&system_lifetime(&ts, &x), &system_lifetime(&tc, &x), mode.order(), cfg)?;
    let observed = match (explicit.holds_forward, explicit.holds_reverse) {
        (true, true) => Relation::Both,
        (true, false) => Relation::Precedes,
        (false, true) => Relation::Succeeds,
        (false, false) => Relation::Neither,
    };
    if overall.holds() && !observed.implies(relation) {
        return Err(OrderError::InternalInconsistency {
            check: "redundancy_verdict".into(),
            detail: format!(
                "criterion gives {} but the exponential-marginal lifetimes give {}",
                relation_text("T_S", "T_C", mode, relation),
                relation_text("T_S", "T_C", mode, observed)
            ),
        });
    }
    entries.push(
        ConditionEntry::from_order(
            "cross-validation",
            format!("T_S vs T_C with an exponential component, order {}", mode.order()),
            !overall.holds() || observed.implies(relation),
            explicit,
        )
        .with_note(relation_text("T_S", "T_C", mode, observed)),
    );
    Ok(ConditionReport {
        check: "redundancy_verdict",
        mode: Some(mode),
        method,
        entries,
        overall,
        relation,
        conclusion: relation_text("T_S", "T_C", mode, relation),
        notes: alloc::vec![format!("m = {m}; T_S: redundancy at system level, T_C: at component level")],
    })
}

/// `[h'(p/q)/h'(p)] · [(h(q)-h(p))/(1-h(p/q))]` for `0 < p < q < 1`.
fn rs0(d: &Distortion, jq: &crate::distortion::Jet, p: f64, q: f64) -> f64 {
    let jp = d.jet(Level::new(p));
    let jr = d.jet(Level::pair(p / q, (q - p) / q));
    // difference from whichever representation is smaller
    let diff = if jq.h < 0.5 { jq.h - jp.h } else { jp.hc - jq.hc };
    jr.d1 / jp.d1 * diff / jr.hc
}

fn residual_ages(cfg: &CheckConfig) -> Vec<f64> {
    match &cfg.residual_ts {
        Some(ts) => ts.clone(),
        None => RESIDUAL_SF_LEVELS.iter().map(|&s| -ln(s)).collect(),
    }
}

/// Compares `τ(X_t)` (a system of used components) with `(τ(X))_t` (a used
/// system).
///
/// Mode c, iff: `pH'/H` decreasing ⇔ `τ(X_t) ≺c (τ(X))_t` for all `t`.
/// Mode c, sufficient: `(1-p)H'/H` decreasing and negative.
/// Mode b, iff: the expression `[h'(p/q)/h'(p)]·[(h(q)-h(p))/(1-h(p/q))]`
/// increasing in `p ∈ (0, q)` for every `q` ⇔ `≺b`; decreasing for every
/// `q` ⇔ `≻b`. The `q` sweep is a grid, so the verdict is grid-certified.
pub fn residual_verdict(
    d: &Distortion,
    mode: Mode,
    method: Method,
    cfg: &CheckConfig,
) -> Result<ConditionReport, OrderError> {
    let mut entries = Vec::new();
    let mut notes = Vec::new();
    let (overall, relation) = match (mode, method) {
        (Mode::C, Method::Iff) => {
            let v = cfg.p_unit(|p| d.jet(Level::new(p)).p_dlog_h())?;
            let relation = Relation::from_class(v.class, Relation::Precedes);
            entries.push(ConditionEntry::monotone("pH'/H", "pH'/H decreasing", v.class.is_nonincreasing(), v));
            // only the decreasing direction is an equivalence
            if relation == Relation::Precedes || relation == Relation::Both {
                (Overall::IffHolds, Relation::Precedes)
            } else {
                (Overall::IffFailsWithWitness, Relation::Neither)
            }
        }
        (Mode::C, Method::Sufficient) => {
            let v = cfg.p_unit(|p| {
                let l = Level::new(p);
                d.jet(l).q_dlog_h(l)
            })?;
            let negative = v.max_value < 0.0;
            let decreasing = v.class.is_nonincreasing();
            let max = v.max_value;
            entries.push(ConditionEntry::monotone("(1-p)H'/H decreasing", "(1-p)H'/H decreasing", decreasing, v));
            entries.push(ConditionEntry {
                name: "(1-p)H'/H negative".into(),
                statement: "(1-p)H'/H < 0".into(),
                holds: negative,
                verdict: None,
                order: None,
                note: Some(format!("maximum on grid {max:e}")),
            });
            if decreasing && negative {
                (Overall::SufficientHolds, Relation::Precedes)
            } else {
                (Overall::SufficientFails, Relation::Neither)
            }
        }
        (Mode::B, Method::Iff) => {
            let n = cfg.q_points.max(1);
            let (q_lo, q_hi) = (0.02, 0.98);
            let (mut all_inc, mut all_dec) = (true, true);
            let mut offending = Vec::new();
            for i in 0..n {
                let q = if n == 1 { 0.5 } else { q_lo + (q_hi - q_lo) * i as f64 / (n - 1) as f64 };
                let jq = d.jet(Level::new(q));
                let v = cfg.p_monotone(|p| rs0(d, &jq, p, q), cfg.eps, q - cfg.eps)?;
                let inc = v.class.is_nondecreasing();
                let dec = v.class.is_nonincreasing();
                all_inc &= inc;
                all_dec &= dec;
                if !inc {
                    offending.push(q);
                }
                entries.push(ConditionEntry::monotone(format!("rs0 q={q:.4}"), "monotone in p ∈ (0, q)", inc || dec, v));
            }
            notes.push(format!("verdict is grid-certified over {n} values of q in [{q_lo}, {q_hi}], not symbolic"));
            if !all_inc && !all_dec {
                notes.push(format!("q values without an increasing profile: {offending:?}"));
            }
            let relation = match (all_inc, all_dec) {
                (true, true) => Relation::Both,
                (true, false) => Relation::Precedes,
                (false, true) => Relation::Succeeds,
                (false, false) => Relation::Neither,
            };
            (iff_overall(relation), relation)
        }
        (Mode::B, Method::Sufficient) => {
            return Err(OrderError::UnsupportedMethod { check: "residual_verdict", mode, method })
        }
    };

    for t in residual_ages(cfg) {
        let a = residual_model(d, &exponential(), t, ResidualKind::SystemOfUsed)?;
        let b = residual_model(d, &exponential(), t, ResidualKind::UsedSystem)?;
        let v = check_order(&a, &b, mode.order(), cfg)?;
        let observed = match (v.holds_forward, v.holds_reverse) {
            (true, true) => Relation::Both,
            (true, false) => Relation::Precedes,
            (false, true) => Relation::Succeeds,
            (false, false) => Relation::Neither,
        };
        let agrees = !overall.holds() || observed.implies(relation);
        if !agrees {
            return Err(OrderError::InternalInconsistency {
                check: "residual_verdict".into(),
                detail: format!(
                    "criterion gives {} but at t={t} the exponential-marginal lifetimes give {}",
                    relation_text("τ(X_t)", "(τ(X))_t", mode, relation),
                    relation_text("τ(X_t)", "(τ(X))_t", mode, observed)
                ),
            });
        }
        entries.push(
            ConditionEntry::from_order(
                format!("cross-validation t={t:.4}"),
                format!("τ(X_t) vs (τ(X))_t with an exponential component, order {}", mode.order()),
                agrees,
                v,
            )
            .with_note(relation_text("τ(X_t)", "(τ(X))_t", mode, observed)),
        );
    }
    Ok(ConditionReport {
        check: "residual_verdict",
        mode: Some(mode),
        method,
        entries,
        overall,
        relation,
        conclusion: relation_text("τ(X_t)", "(τ(X))_t", mode, relation),
        notes,
    })
}

/// Which generator function is tested by [`generator_condition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorVariant {
    /// `x (ln g)'` with `g = -ψ'/ψ`; series systems `h_n(p) = ψ(nψ⁻¹(p))`
    /// under `≺c`.
    HazardSeries,
    /// `x (ln g)'` with `g = -ψ'/(1-ψ)`; parallel systems (the duals of the
    /// series distortions) under `≺c`.
    HazardParallel,
    /// `x (ln g)'` with `g = -ψ'/ψ` on parallel systems, and with
    /// `g = -ψ'/(1-ψ)` on series systems, both under `≺b`.
    Rhr,
}

impl GeneratorVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::HazardSeries => "hazard-series",
            Self::HazardParallel => "hazard-parallel",
            Self::Rhr => "rhr",
        }
    }
}

/// `x · d/dx ln(-ψ'(x)/ψ(x))` or, with `complement`, `x · d/dx
/// ln(-ψ'(x)/(1-ψ(x)))`.
fn generator_fn(g: &dyn Generator, x: f64, complement: bool) -> f64 {
    let d1 = g.psi_d1(x);
    let d2 = g.psi_d2(x);
    if complement {
        x * (d2 / d1 + d1 / g.psi_complement(x))
    } else {
        x * (d2 / d1 - d1 / g.psi(x))
    }
}

/// Series distortions `ψ(nψ⁻¹(p))` for `n = 2, 3` under the generator.
fn induced_series(g: &Arc<dyn Generator>) -> Result<(Distortion, Distortion), OrderError> {
    let build = |n: usize| -> Result<Distortion, OrderError> {
        let copula = SurvivalCopula::archimedean(g.clone(), n)?;
        Ok(build_distortion(&StructureFunction::series(n)?, &copula)?)
    };
    Ok((build(3)?, build(2)?))
}

/// Classifies the Archimedean generator functions and maps them to
/// comparisons of series/parallel systems of `n ≥ m` components.
///
/// The copula is read as generated by the decreasing generator `ψ`
/// (`K(u) = ψ(Σ ψ⁻¹(u_i))`) and `ln'` as the derivative of the natural
/// logarithm; both readings are recorded in the report notes. A decreasing
/// function gives, for `n ≥ m`:
///
/// * hazard-series: `series(n) ≻c series(m)`;
/// * hazard-parallel: `parallel(n) ≺c parallel(m)`;
/// * rhr: `parallel(n) ≻b parallel(m)` and `series(n) ≺b series(m)`,
///
/// with the opposite relations for an increasing function. Each implication
/// is cross-checked on the explicit distortions for `n = 3, m = 2`.
pub fn generator_condition(
    g: Arc<dyn Generator>,
    variant: GeneratorVariant,
    cfg: &CheckConfig,
) -> Result<ConditionReport, OrderError> {
    let eps = cfg.eps;
    let w_lo = g.psi_inv(Level::from_complement(eps));
    let w_hi = g.psi_inv(Level::new(eps));
    let x_max = g.psi_inv(Level::new(GENERATOR_TAIL));
    let lo = w_lo.min(1e-3);
    let hi = x_max.max(3.0 * w_hi);
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(OrderError::EmptyRange { lo, hi });
    }
    let mcfg = cfg.monotone.with_spacing(Spacing::Geometric);
    // ψ must be decreasing across the range
    let mut prev = g.psi(lo);
    for i in 1..=200 {
        let x = lo * crate::math::powf(hi / lo, i as f64 / 200.0);
        let v = g.psi(x);
        if !(v < prev || (v == prev && v == 0.0)) || !(g.psi_d1(x) < 0.0 || v == 0.0) {
            return Err(OrderError::GeneratorNotDecreasing { x });
        }
        prev = v;
    }

    let (series3, series2) = induced_series(&g)?;
    let mut entries = Vec::new();
    let parts: Vec<(&str, bool, Mode, bool)> = match variant {
        // (label, complement, mode, parallel systems)
        GeneratorVariant::HazardSeries => alloc::vec![("-ψ'/ψ", false, Mode::C, false)],
        GeneratorVariant::HazardParallel => alloc::vec![("-ψ'/(1-ψ)", true, Mode::C, true)],
        GeneratorVariant::Rhr => alloc::vec![("-ψ'/ψ", false, Mode::B, true), ("-ψ'/(1-ψ)", true, Mode::B, false)],
    };
    let mut all = true;
    let mut conclusions = Vec::new();
    for (label, complement, mode, parallel) in parts {
        let v = check_monotone(|x| generator_fn(g.as_ref(), x, complement), lo, hi, &mcfg)?;
        // relation of (n components) to (m components) implied by a
        // decreasing function; increasing gives the opposite
        let decreasing_means = match (mode, parallel) {
            (Mode::C, false) => Relation::Succeeds,
            (Mode::C, true) => Relation::Precedes,
            (Mode::B, true) => Relation::Succeeds,
            (Mode::B, false) => Relation::Precedes,
        };
        let implied = Relation::from_class(v.class, decreasing_means);
        let system = if parallel { "parallel" } else { "series" };
        let holds = implied != Relation::Neither;
        all &= holds;
        let text = relation_text(&format!("{system}(n)"), &format!("{system}(m)"), mode, implied);
        entries.push(
            ConditionEntry::monotone(
                format!("x ln'[{label}]"),
                format!("x ln'[{label}] monotone on [{lo:e}, {hi:e}]"),
                holds,
                v,
            )
            .with_note(format!("for n ≥ m: {text}")),
        );
        let (d3, d2) = if parallel { (series3.dual(), series2.dual()) } else { (series3.clone(), series2.clone()) };
        let explicit = compare_systems_exact(&d3, &d2, mode, cfg)?;
        if holds && !explicit.relation.implies(implied) {
            return Err(OrderError::InternalInconsistency {
                check: "generator_condition".into(),
                detail: format!(
                    "{label} gives {text} but the induced distortions give {}",
                    relation_text(&format!("{system}(3)"), &format!("{system}(2)"), mode, explicit.relation)
                ),
            });
        }
        let ratio = explicit.entries.into_iter().next().and_then(|e| e.verdict);
        entries.push(ConditionEntry {
            name: format!("cross-check {system} n=3 vs m=2"),
            statement: format!("compare_systems_exact mode {mode} on the induced {system} distortions"),
            holds: !holds || explicit.relation.implies(implied),
            verdict: ratio,
            order: None,
            note: Some(relation_text(&format!("{system}(3)"), &format!("{system}(2)"), mode, explicit.relation)),
        });
        conclusions.push(text);
    }
    Ok(ConditionReport {
        check: "generator_condition",
        mode: None,
        method: Method::Sufficient,
        entries,
        overall: if all { Overall::SufficientHolds } else { Overall::SufficientFails },
        relation: Relation::Neither,
        conclusion: conclusions.join("; "),
        notes: alloc::vec![
            format!("generator {}; variant {}", g.name(), variant.as_str()),
            "φ is read as the decreasing generator ψ with K(u) = ψ(Σψ⁻¹(u_i))".into(),
            "ln' is read as the derivative of the natural logarithm of the bracketed expression".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copulas::{ClaytonGenerator, ExpGenerator, GumbelGenerator};
    use crate::distortion::distortion_k_out_of_n;

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn reflexive_orders_hold_both_ways() {
        let x = LifetimeModel::Marginal(Marginal::weibull(1.0, 2.0).unwrap());
        for order in [Order::Hr, Order::Rhr, Order::AgingFasterC, Order::AgingFasterB] {
            let v = check_order(&x, &x, order, &cfg()).unwrap();
            assert!(v.holds_forward && v.holds_reverse, "{order}");
            assert_eq!(v.detail.class, Monotonicity::Constant);
        }
    }

    #[test]
    fn weibull_hazard_ratio_increases() {
        let x = LifetimeModel::Marginal(Marginal::weibull(2.0, 3.0).unwrap());
        let y = LifetimeModel::Marginal(Marginal::weibull(0.1, 2.0).unwrap());
        let v = check_order(&x, &y, Order::AgingFasterC, &cfg().with_x_range(0.05, 3.0)).unwrap();
        assert_eq!(v.detail.class, Monotonicity::Increasing);
        assert!(v.holds_forward && !v.holds_reverse);
    }

    #[test]
    fn series_systems_compare_by_size() {
        // H_n = n: constant ratio
        let r = compare_systems_exact(&Distortion::power(3), &Distortion::power(2), Mode::C, &cfg()).unwrap();
        assert_eq!(r.relation, Relation::Both);
        assert_eq!(r.overall, Overall::IffHolds);
    }

    #[test]
    fn single_component_redundancy_is_indifferent() {
        for m in 1..=3 {
            let r = redundancy_verdict(&Distortion::identity(), m, Mode::C, Method::Iff, &cfg()).unwrap();
            assert_eq!(r.relation, Relation::Both);
        }
        assert!(matches!(
            redundancy_verdict(&Distortion::identity(), 1, Mode::C, Method::Sufficient, &cfg()),
            Err(OrderError::UnsupportedMethod { .. })
        ));
        assert_eq!(
            redundancy_verdict(&Distortion::identity(), 0, Mode::C, Method::Iff, &cfg()).unwrap_err(),
            OrderError::BadRedundancy
        );
    }

    #[test]
    fn series_residual_holds_trivially() {
        let r = residual_verdict(&Distortion::power(3), Mode::C, Method::Iff, &cfg()).unwrap();
        assert_eq!(r.overall, Overall::IffHolds);
        assert_eq!(r.entry("pH'/H").unwrap().class(), Some(Monotonicity::Constant));
    }

    #[test]
    fn sufficient_conditions_on_identical_inputs() {
        let d = Distortion::power(3);
        let x = LifetimeModel::Marginal(Marginal::exponential(1.0).unwrap());
        let r = check_sufficient_conditions(&d, &d, &x, &x, Mode::C, &cfg()).unwrap();
        assert_eq!(r.overall, Overall::SufficientHolds);
        assert!(r.entry("conclusion").is_some());
    }

    #[test]
    fn sufficient_conditions_k_out_of_n_pair() {
        let d1 = distortion_k_out_of_n(2, 4).unwrap();
        let d2 = distortion_k_out_of_n(3, 4).unwrap();
        let x = LifetimeModel::Marginal(Marginal::exponential(1.0).unwrap());
        let y = LifetimeModel::Marginal(Marginal::exponential(2.0).unwrap());
        let r = check_sufficient_conditions(&d1, &d2, &x, &y, Mode::C, &cfg()).unwrap();
        assert_eq!(r.overall, Overall::SufficientHolds, "{:#?}", r.entries);
    }

    #[test]
    fn independence_generator_is_constant() {
        let r = generator_condition(Arc::new(ExpGenerator), GeneratorVariant::HazardSeries, &cfg()).unwrap();
        assert_eq!(r.entries[0].class(), Some(Monotonicity::Constant));
        assert_eq!(r.overall, Overall::SufficientHolds);
        assert!(r.notes.iter().any(|n| n.contains("ln'")));
    }

    #[test]
    fn archimedean_generators_cross_check() {
        let gumbel: Arc<dyn Generator> = Arc::new(GumbelGenerator { theta: 2.0 });
        generator_condition(gumbel, GeneratorVariant::Rhr, &cfg()).unwrap();
        let clayton: Arc<dyn Generator> = Arc::new(ClaytonGenerator { theta: 1.0 });
        generator_condition(clayton.clone(), GeneratorVariant::HazardSeries, &cfg()).unwrap();
        generator_condition(clayton, GeneratorVariant::HazardParallel, &cfg()).unwrap();
    }
}
