//! Dual distortion functions `h` with `F̄_τ(x) = h(F̄_X(x))`, their
//! derivatives, and the hazard / reversed-hazard multipliers
//! `H(p) = p h'(p)/h(p)` and `R(p) = (1-p) h'(p)/(1-h(p))`.
//!
//! Every backing evaluates at a [`Level`], a survival probability paired with
//! its complement, so quantities near either end of `[0, 1]` keep their
//! relative accuracy.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::bernstein::Bernstein;
use crate::betainc::{beta_pair, ln_beta};
use crate::copulas::{CopulaError, CopulaFamily, Generator, ScalarFn, SurvivalCopula};
use crate::math::{abs, binomial_i128, exp, expm1, ln_from_pair, powf, powi};
use crate::polynomial::Polynomial;
use crate::structures::{StructureError, StructureFunction};

/// Largest `n` for which an independent `k`-out-of-`n` system gets an exact
/// polynomial backing; beyond it the incomplete beta function is used.
pub const EXACT_DEGREE_CAP: usize = 30;

/// Default margin keeping evaluations away from `p = 0` and `p = 1`.
pub const DEFAULT_EPS: f64 = 1e-4;

/// Values of `h` or `1 - h` below this are treated as degenerate.
const DEGENERATE: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistortionError {
    #[error("p={p} is outside [{eps}, 1-{eps}]")]
    BoundaryEvaluation { p: f64, eps: f64 },
    #[error("distortion is degenerate at p={p} (h or 1-h below 1e-300)")]
    DegenerateDistortion { p: f64 },
    #[error("structure has {structure} components but the copula has dimension {copula}")]
    DimensionMismatch { structure: usize, copula: usize },
    #[error("threshold k={k} outside 1..={n}")]
    BadThreshold { k: usize, n: usize },
    #[error("redundancy count must be at least 1")]
    BadRedundancy,
    #[error("not a distortion at p={p}: {reason}")]
    InvalidDistortion { p: f64, reason: &'static str },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("invalid copula: {0}")]
    InvalidCopula(#[from] CopulaError),
}

/// A survival probability `p` together with `q = 1 - p`, each carried at
/// full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub p: f64,
    pub q: f64,
}

impl Level {
    pub fn new(p: f64) -> Self {
        Self { p, q: 1.0 - p }
    }

    pub fn from_complement(q: f64) -> Self {
        Self { p: 1.0 - q, q }
    }

    /// Trusts the caller that `p + q = 1`.
    pub fn pair(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    pub fn swap(self) -> Self {
        Self { p: self.q, q: self.p }
    }
}

/// Value and derivative data of a distortion at one level.
///
/// `ph2 = p h''/h'` and `qh2 = (1-p) h''/h'` are carried separately because
/// the ratio functionals only ever need them in this scaled form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub h: f64,
    pub hc: f64,
    pub d1: f64,
    pub d2: f64,
    pub big_h: f64,
    pub big_r: f64,
    pub ph2: f64,
    pub qh2: f64,
}

impl Jet {
    pub(crate) fn from_values(level: Level, h: f64, hc: f64, d1: f64, d2: f64) -> Self {
        let (ph2, qh2) = if d2 == 0.0 { (0.0, 0.0) } else { (level.p * d2 / d1, level.q * d2 / d1) };
        Self { h, hc, d1, d2, big_h: level.p * d1 / h, big_r: level.q * d1 / hc, ph2, qh2 }
    }

    /// `p H'(p) / H(p) = 1 + p h''/h' - H`.
    pub fn p_dlog_h(&self) -> f64 {
        1.0 + self.ph2 - self.big_h
    }

    /// `(1-p) H'(p) / H(p)`.
    pub fn q_dlog_h(&self, level: Level) -> f64 {
        level.q / level.p * self.p_dlog_h()
    }

    /// `p R'(p) / R(p) = p h''/h' + (p/q)(R - 1)`.
    pub fn p_dlog_r(&self, level: Level) -> f64 {
        self.ph2 + level.p / level.q * (self.big_r - 1.0)
    }
}

/// The functionals of a distortion at one interior point.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValues {
    pub p: f64,
    pub h: f64,
    pub h_prime: f64,
    pub h_second: f64,
    pub H: f64,
    pub R: f64,
    /// `p H'(p) / H(p)`
    pub pHpH: f64,
    /// `(1-p) H'(p) / H(p)`
    pub one_minus_p_HpH: f64,
    /// `p R'(p) / R(p)`
    pub pRpR: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RedundancyLevel {
    /// Each component gets `m` independent active spares.
    Component,
    /// The whole system gets `m` independent active copies.
    System,
}

enum Backing {
    Bernstein(Bernstein),
    /// `Σ w_j p^{c_j}` with `Σ w_j = 1`.
    PowerSum(Vec<(f64, f64)>),
    /// `Σ a_j ψ(j ψ⁻¹(p))`.
    Archimedean { weights: Vec<f64>, generator: Arc<dyn Generator> },
    /// `I_p(k, n-k+1)`.
    IncBeta { k: usize, n: usize, ln_b: f64 },
    /// `h(1 - (1-p)^{m+1})`.
    ComponentRedundancy { inner: Distortion, m: u32 },
    /// `1 - (1 - h(p))^{m+1}`.
    SystemRedundancy { inner: Distortion, m: u32 },
    /// `1 - h(1 - p)`.
    Dual(Distortion),
    /// Central differences of an arbitrary function.
    Numeric(ScalarFn),
}

/// An evaluable dual distortion. Cheap to clone.
#[derive(Clone)]
pub struct Distortion {
    backing: Arc<Backing>,
    label: String,
}

impl fmt::Debug for Distortion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Distortion")
            .field("label", &self.label)
            .field("exact", &self.is_exact())
            .finish()
    }
}

fn numeric_step(level: Level, base: f64) -> f64 {
    base.max(base * level.p * level.q).min(0.5 * level.p).min(0.5 * level.q)
}

impl Distortion {
    fn from_backing(backing: Backing, label: impl Into<String>) -> Self {
        Self { backing: Arc::new(backing), label: label.into() }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `h(p) = p`.
    pub fn identity() -> Self {
        Self::from_backing(Backing::Bernstein(Bernstein::from_counts(&[0, 1])), "identity")
    }

    /// `h(p) = p^n`, the series system of `n` independent components.
    pub fn power(n: usize) -> Self {
        let mut up = alloc::vec![0.0; n + 1];
        up[n] = 1.0;
        Self::from_backing(Backing::Bernstein(Bernstein::from_coefficients(up)), format!("p^{n}"))
    }

    /// `h(p) = p^a` for real `a > 0`.
    pub fn power_real(a: f64) -> Result<Self, DistortionError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(DistortionError::InvalidDistortion { p: 0.0, reason: "exponent must be positive" });
        }
        Ok(Self::from_backing(Backing::PowerSum(alloc::vec![(1.0, a)]), format!("p^{a}")))
    }

    /// Builds from Bernstein coefficients `b_0..b_N` (`h = Σ b_i C(N,i) p^i
    /// (1-p)^(N-i)`); requires `b_0 = 0`, `b_N = 1` and a nondecreasing `h`.
    pub fn from_bernstein(coeffs: Vec<f64>) -> Result<Self, DistortionError> {
        if coeffs.len() < 2 {
            return Err(DistortionError::InvalidDistortion { p: 0.0, reason: "degree must be at least 1" });
        }
        let d = Self::from_backing(Backing::Bernstein(Bernstein::from_coefficients(coeffs)), "bernstein");
        d.validate()?;
        Ok(d)
    }

    /// Builds from monomial coefficients in ascending degree.
    pub fn from_polynomial(coeffs: &[f64]) -> Result<Self, DistortionError> {
        let poly = Polynomial::new(coeffs.to_vec());
        let mut b = poly.to_bernstein(1);
        // snap rounding at the ends so the boundary zeros stay exact
        let last = b.len() - 1;
        if abs(b[0]) < 1e-14 {
            b[0] = 0.0;
        }
        if abs(b[last] - 1.0) < 1e-14 {
            b[last] = 1.0;
        }
        let d = Self::from_backing(Backing::Bernstein(Bernstein::from_coefficients(b)), "polynomial");
        d.validate()?;
        Ok(d)
    }

    /// A distortion known only through its values; derivatives are central
    /// differences.
    pub fn from_fn(label: impl Into<String>, f: ScalarFn) -> Result<Self, DistortionError> {
        let d = Self::from_backing(Backing::Numeric(f), label);
        d.validate()?;
        Ok(d)
    }

    /// Checks `h(0+) ≈ 0`, `h(1-) ≈ 1` and monotonicity on a 2001-point grid.
    pub fn validate(&self) -> Result<(), DistortionError> {
        let lo = self.jet(Level::new(1e-8));
        let hi = self.jet(Level::from_complement(1e-8));
        if !(abs(lo.h) <= 1e-6) {
            return Err(DistortionError::InvalidDistortion { p: 1e-8, reason: "h(0+) must be 0" });
        }
        if !(abs(hi.hc) <= 1e-6) {
            return Err(DistortionError::InvalidDistortion { p: 1.0 - 1e-8, reason: "h(1-) must be 1" });
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=2000 {
            let p = i as f64 / 2000.0;
            let v = self.eval(p);
            if !v.is_finite() {
                return Err(DistortionError::InvalidDistortion { p, reason: "h must be finite" });
            }
            if v < prev - 1e-12 {
                return Err(DistortionError::InvalidDistortion { p, reason: "h must be nondecreasing" });
            }
            prev = v;
        }
        Ok(())
    }

    /// Value and derivatives at a level. No domain checks: callers that need
    /// the `ε` margin use [`eval_functionals`].
    pub fn jet(&self, level: Level) -> Jet {
        match self.backing.as_ref() {
            Backing::Bernstein(b) => b.jet(level),
            Backing::PowerSum(terms) => power_sum_jet(terms, level),
            Backing::Archimedean { weights, generator } => archimedean_jet(weights, generator.as_ref(), level),
            Backing::IncBeta { k, n, ln_b } => inc_beta_jet(*k, *n, *ln_b, level),
            Backing::ComponentRedundancy { inner, m } => component_jet(inner, *m, level),
            Backing::SystemRedundancy { inner, m } => system_jet(inner, *m, level),
            Backing::Dual(inner) => {
                let j = inner.jet(level.swap());
                Jet {
                    h: j.hc,
                    hc: j.h,
                    d1: j.d1,
                    d2: -j.d2,
                    big_h: j.big_r,
                    big_r: j.big_h,
                    ph2: -j.qh2,
                    qh2: -j.ph2,
                }
            }
            Backing::Numeric(f) => {
                let h = f(level.p);
                let d1 = central_difference(f.as_ref(), level, 1e-6);
                let s = numeric_step(level, 1e-4);
                let d2 = (f(level.p + s) - 2.0 * h + f(level.p - s)) / (s * s);
                Jet::from_values(level, h, 1.0 - h, d1, d2)
            }
        }
    }

    pub fn eval(&self, p: f64) -> f64 {
        self.jet(Level::new(p)).h
    }

    pub fn derivative(&self, p: f64) -> f64 {
        self.jet(Level::new(p)).d1
    }

    pub fn second_derivative(&self, p: f64) -> f64 {
        self.jet(Level::new(p)).d2
    }

    /// Central-difference `h'(p)` of the values alone, step
    /// `max(1e-6, 1e-6·p(1-p))`; a cross-check on analytic derivatives.
    pub fn numeric_derivative(&self, p: f64) -> f64 {
        let f = |x: f64| self.eval(x);
        central_difference(&f, Level::new(p), 1e-6)
    }

    /// Largest relative disagreement of the central-difference `h'` between
    /// steps `1e-6` and `1e-7` over 101 interior points. Values above `1e-3`
    /// mark distortions whose numeric derivatives are not trustworthy.
    pub fn numeric_oscillation(&self) -> f64 {
        let f = |x: f64| self.eval(x);
        let mut worst: f64 = 0.0;
        for i in 1..=101 {
            let level = Level::new(i as f64 / 102.0);
            let a = central_difference(&f, level, 1e-6);
            let b = central_difference(&f, level, 1e-7);
            let scale = abs(a).max(abs(b)).max(1e-12);
            worst = worst.max(abs(a - b) / scale);
        }
        worst
    }

    pub fn is_numerically_unstable(&self) -> bool {
        matches!(self.backing.as_ref(), Backing::Numeric(_)) && self.numeric_oscillation() > 1e-3
    }

    /// Whether `h` is a polynomial whose derivatives are formal.
    pub fn is_exact(&self) -> bool {
        match self.backing.as_ref() {
            Backing::Bernstein(_) => true,
            Backing::ComponentRedundancy { inner, .. } | Backing::SystemRedundancy { inner, .. } | Backing::Dual(inner) => {
                inner.is_exact()
            }
            _ => false,
        }
    }

    /// Monomial coefficients, ascending degree, for polynomial distortions.
    pub fn exact_coefficients(&self) -> Option<Vec<f64>> {
        self.exact_polynomial().map(Polynomial::into_coefficients)
    }

    pub fn exact_polynomial(&self) -> Option<Polynomial> {
        let one = Polynomial::constant(1.0);
        let one_minus_x = Polynomial::new(alloc::vec![1.0, -1.0]);
        match self.backing.as_ref() {
            Backing::Bernstein(b) => Some(Polynomial::from_bernstein(b.coefficients())),
            Backing::ComponentRedundancy { inner, m } => {
                let u = one.sub(&one_minus_x.pow(m + 1));
                Some(inner.exact_polynomial()?.compose(&u))
            }
            Backing::SystemRedundancy { inner, m } => {
                let h = inner.exact_polynomial()?;
                Some(one.sub(&one.sub(&h).pow(m + 1)))
            }
            Backing::Dual(inner) => Some(one.sub(&inner.exact_polynomial()?.compose(&one_minus_x))),
            _ => None,
        }
    }

    /// `p ↦ 1 - h(1 - p)`: the parallel analogue obtained by swapping the
    /// roles of survival and failure.
    pub fn dual(&self) -> Self {
        Self::from_backing(Backing::Dual(self.clone()), format!("dual[{}]", self.label))
    }
}

fn central_difference(f: &dyn Fn(f64) -> f64, level: Level, base: f64) -> f64 {
    let s = numeric_step(level, base);
    (f(level.p + s) - f(level.p - s)) / (2.0 * s)
}

fn power_sum_jet(terms: &[(f64, f64)], level: Level) -> Jet {
    let lp = ln_from_pair(level.p, level.q);
    let (mut h, mut hc, mut d1, mut d2) = (0.0, 0.0, 0.0, 0.0);
    let (mut s1, mut s2) = (0.0, 0.0);
    // s1 = p h', s2 = p^2 h''
    for &(w, c) in terms {
        let pc = exp(c * lp);
        h += w * pc;
        hc += w * -expm1(c * lp);
        d1 += w * c * exp((c - 1.0) * lp);
        d2 += w * c * (c - 1.0) * exp((c - 2.0) * lp);
        s1 += w * c * pc;
        s2 += w * c * (c - 1.0) * pc;
    }
    let big_h = if h > 0.0 { s1 / h } else { terms.iter().map(|t| t.1).fold(f64::INFINITY, f64::min) };
    let ph2 = if s1 != 0.0 { s2 / s1 } else { 0.0 };
    Jet { h, hc, d1, d2, big_h, big_r: level.q * d1 / hc, ph2, qh2: level.q / level.p * ph2 }
}

fn archimedean_jet(weights: &[f64], g: &dyn Generator, level: Level) -> Jet {
    let w = g.psi_inv(level);
    let dw = g.psi_d1(w);
    let ddw = g.psi_d2(w);
    let (mut h, mut hc, mut d1, mut d2) = (0.0, 0.0, 0.0, 0.0);
    for (j, &a) in weights.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let jf = j as f64;
        let x = jf * w;
        h += a * g.psi(x);
        hc += a * g.psi_complement(x);
        let d = g.psi_d1(x);
        d1 += a * jf * d;
        d2 += a * jf * (jf * g.psi_d2(x) * dw - d * ddw);
    }
    let d1 = d1 / dw;
    let d2 = d2 / (dw * dw * dw);
    Jet::from_values(level, h, hc, d1, d2)
}

fn inc_beta_jet(k: usize, n: usize, ln_b: f64, level: Level) -> Jet {
    let a = k as f64;
    let b = (n - k + 1) as f64;
    let (h, hc) = beta_pair(a, b, level.p, level.q);
    let lp = ln_from_pair(level.p, level.q);
    let lq = ln_from_pair(level.q, level.p);
    let km1 = (k - 1) as f64;
    let nmk = (n - k) as f64;
    let d1 = exp(km1 * lp + nmk * lq - ln_b);
    let ph2 = km1 - nmk * level.p / level.q;
    let qh2 = km1 * level.q / level.p - nmk;
    let d2 = d1 * (km1 / level.p - nmk / level.q);
    Jet { h, hc, d1, d2, big_h: level.p * d1 / h, big_r: level.q * d1 / hc, ph2, qh2 }
}

/// `Σ_{i=0}^{m} x^i`.
fn geometric_sum(x: f64, m: u32) -> f64 {
    (0..=m).fold(0.0, |acc, i| acc + powi(x, i))
}

fn component_jet(inner: &Distortion, m: u32, level: Level) -> Jet {
    let m1 = (m + 1) as f64;
    let uc = powi(level.q, m + 1);
    let up = -expm1(m1 * ln_from_pair(level.q, level.p));
    let u = Level::pair(up, uc);
    let j = inner.jet(u);
    let du = m1 * powi(level.q, m);
    let ddu = -m1 * m as f64 * powi(level.q, m.saturating_sub(1));
    let pu_over_u = m1 * powi(level.q, m) / geometric_sum(level.q, m);
    Jet {
        h: j.h,
        hc: j.hc,
        d1: j.d1 * du,
        d2: j.d2 * du * du + j.d1 * ddu,
        big_h: j.big_h * pu_over_u,
        big_r: m1 * j.big_r,
        ph2: j.ph2 * pu_over_u - m as f64 * level.p / level.q,
        qh2: m1 * j.qh2 - m as f64,
    }
}

fn system_jet(inner: &Distortion, m: u32, level: Level) -> Jet {
    let m1 = (m + 1) as f64;
    let j = inner.jet(level);
    let s = geometric_sum(j.hc, m);
    let pow_m = powi(j.hc, m);
    let mf = m as f64;
    Jet {
        h: j.h * s,
        hc: pow_m * j.hc,
        d1: m1 * pow_m * j.d1,
        d2: m1 * (pow_m * j.d2 - mf * powi(j.hc, m.saturating_sub(1)) * j.d1 * j.d1),
        big_h: j.big_h * m1 * pow_m / s,
        big_r: m1 * j.big_r,
        ph2: j.ph2 - mf * level.p / level.q * j.big_r,
        qh2: j.qh2 - mf * j.big_r,
    }
}

/// `h_{k|n}(p) = I_p(k, n-k+1)`: the independent `k`-out-of-`n` system.
pub fn distortion_k_out_of_n(k: usize, n: usize) -> Result<Distortion, DistortionError> {
    if k == 0 || k > n {
        return Err(DistortionError::BadThreshold { k, n });
    }
    let label = format!("{k}-out-of-{n}");
    if n <= EXACT_DEGREE_CAP {
        let counts: Vec<i128> = (0..=n).map(|i| if i >= k { binomial_i128(n, i) } else { 0 }).collect();
        Ok(Distortion::from_backing(Backing::Bernstein(Bernstein::from_counts(&counts)), label))
    } else {
        let ln_b = ln_beta(k as f64, (n - k + 1) as f64);
        Ok(Distortion::from_backing(Backing::IncBeta { k, n, ln_b }, label))
    }
}

/// The dual distortion of a structure whose components are coupled by an
/// exchangeable survival copula, by inclusion–exclusion over the minimal
/// path sets.
pub fn build_distortion(phi: &StructureFunction, copula: &SurvivalCopula) -> Result<Distortion, DistortionError> {
    let n = phi.n();
    if copula.dim() != n {
        return Err(DistortionError::DimensionMismatch { structure: n, copula: copula.dim() });
    }
    let structure_label = match phi.threshold() {
        Some(k) => format!("{k}-out-of-{n}"),
        None => format!("path-sets(n={n})"),
    };
    let independent = |label: String| -> Result<Distortion, DistortionError> {
        if let (Some(k), true) = (phi.threshold(), n > EXACT_DEGREE_CAP) {
            return Ok(distortion_k_out_of_n(k, n)?.with_label(label));
        }
        let counts = phi.working_state_counts()?;
        Ok(Distortion::from_backing(Backing::Bernstein(Bernstein::from_counts(&counts)), label))
    };
    let d = match copula.family() {
        CopulaFamily::Independence => independent(format!("{structure_label} | independence"))?,
        CopulaFamily::GumbelHougaard { theta } if *theta == 1.0 => {
            independent(format!("{structure_label} | gumbel(theta=1)"))?
        }
        CopulaFamily::Fgm { theta } => {
            let counts = phi.working_state_counts()?;
            let a_n = phi.union_weights()?[n];
            fgm_bernstein(&counts, a_n, *theta, format!("{structure_label} | fgm(theta={theta})"))
        }
        CopulaFamily::GumbelHougaard { theta } => {
            let weights = phi.union_weights()?;
            let terms = weights
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0)
                .map(|(j, &a)| (a as f64, powf(j as f64, 1.0 / theta)))
                .collect();
            Distortion::from_backing(Backing::PowerSum(terms), format!("{structure_label} | gumbel(theta={theta})"))
        }
        CopulaFamily::ClaytonOakes { .. } | CopulaFamily::Archimedean(_) => {
            let generator = copula.generator().expect("archimedean family has a generator");
            let weights = phi.union_weights()?.iter().map(|&a| a as f64).collect();
            let label = format!("{structure_label} | {}", generator.name());
            Distortion::from_backing(Backing::Archimedean { weights, generator }, label)
        }
    };
    if matches!(copula.family(), CopulaFamily::Archimedean(_)) {
        d.validate()?;
    }
    Ok(d)
}

/// FGM adds `θ a_n p^n (1-p)^n` to the independent distortion; degree is
/// elevated to `2n` so both parts share one Bernstein basis.
fn fgm_bernstein(counts: &[i128], a_n: i128, theta: f64, label: String) -> Distortion {
    let n = counts.len() - 1;
    let mut up = Vec::with_capacity(2 * n + 1);
    let mut down = Vec::with_capacity(2 * n + 1);
    for i in 0..=2 * n {
        let num: i128 = (i.saturating_sub(n)..=i.min(n)).map(|j| counts[j] * binomial_i128(n, i - j)).sum();
        let den = binomial_i128(2 * n, i);
        let extra = if i == n { theta * a_n as f64 } else { 0.0 };
        up.push((num as f64 + extra) / den as f64);
        down.push(((den - num) as f64 - extra) / den as f64);
    }
    Distortion::from_backing(Backing::Bernstein(Bernstein::from_parts(up, down)), label)
}

/// Active redundancy with `m` spares at the component or system level.
pub fn transform_redundancy(d: &Distortion, level: RedundancyLevel, m: u32) -> Result<Distortion, DistortionError> {
    if m == 0 {
        return Err(DistortionError::BadRedundancy);
    }
    Ok(match level {
        RedundancyLevel::Component => Distortion::from_backing(
            Backing::ComponentRedundancy { inner: d.clone(), m },
            format!("component-redundancy(m={m})[{}]", d.label),
        ),
        RedundancyLevel::System => Distortion::from_backing(
            Backing::SystemRedundancy { inner: d.clone(), m },
            format!("system-redundancy(m={m})[{}]", d.label),
        ),
    })
}

/// `h`, `h'`, `H`, `R` and the ratio functionals at an interior `p`.
pub fn eval_functionals(d: &Distortion, p: f64, eps: f64) -> Result<FunctionalValues, DistortionError> {
    if !(p >= eps && p <= 1.0 - eps) {
        return Err(DistortionError::BoundaryEvaluation { p, eps });
    }
    let level = Level::new(p);
    let j = d.jet(level);
    if !(j.h >= DEGENERATE && j.hc >= DEGENERATE) {
        return Err(DistortionError::DegenerateDistortion { p });
    }
    Ok(functionals_from_jet(&j, level))
}

pub(crate) fn functionals_from_jet(j: &Jet, level: Level) -> FunctionalValues {
    FunctionalValues {
        p: level.p,
        h: j.h,
        h_prime: j.d1,
        h_second: j.d2,
        H: j.big_h,
        R: j.big_r,
        pHpH: j.p_dlog_h(),
        one_minus_p_HpH: j.q_dlog_h(level),
        pRpR: j.p_dlog_r(level),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::StructureFunction;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        abs(a - b) <= tol * abs(b).max(1.0)
    }

    /// Reference values `(h, 1-h, h', h'')` at `p`.
    type Reference<'a> = &'a dyn Fn(f64) -> (f64, f64, f64, f64);

    fn assert_jet_matches(d: &Distortion, reference: Reference<'_>) {
        for i in 1..100 {
            let p = i as f64 / 100.0;
            let (h, hc, d1, d2) = reference(p);
            let j = d.jet(Level::new(p));
            assert!(close(j.h, h, 1e-12), "{}: h({p})", d.label());
            assert!(close(j.hc, hc, 1e-12), "{}: hc({p})", d.label());
            assert!(close(j.d1, d1, 1e-10), "{}: h'({p}) {} vs {}", d.label(), j.d1, d1);
            assert!(close(j.d2, d2, 1e-9), "{}: h''({p}) {} vs {}", d.label(), j.d2, d2);
            assert!(close(j.big_h, p * d1 / h, 1e-10), "{}: H({p})", d.label());
            assert!(close(j.big_r, (1.0 - p) * d1 / hc, 1e-10), "{}: R({p}) {} vs {}", d.label(), j.big_r, (1.0 - p) * d1 / hc);
            assert!(close(j.ph2, p * d2 / d1, 1e-9), "{}: ph2({p})", d.label());
            assert!(close(j.qh2, (1.0 - p) * d2 / d1, 1e-9), "{}: qh2({p})", d.label());
        }
    }

    /// `(h, 1-h, h', h'')` of a monomial polynomial; the complement is
    /// re-expanded in `q = 1 - p` so it keeps its digits near `p = 1`.
    fn polynomial_reference(poly: &Polynomial) -> impl Fn(f64, f64) -> (f64, f64, f64, f64) {
        let one = Polynomial::constant(1.0);
        let mut c = one.sub(poly).compose(&one.sub(&Polynomial::x())).into_coefficients();
        c[0] = 0.0; // h(1) = 1 exactly
        let comp = Polynomial::new(c);
        let (poly, dp) = (poly.clone(), poly.derivative());
        let ddp = dp.derivative();
        move |p, q| (poly.eval(p), comp.eval(q), dp.eval(p), ddp.eval(p))
    }

    fn assert_jet_matches_polynomial(d: &Distortion, poly: &Polynomial) {
        let r = polynomial_reference(poly);
        assert_jet_matches(d, &|p| r(p, 1.0 - p));
    }

    #[test]
    fn min_max_fgm_matches_closed_form() {
        let phi = StructureFunction::from_path_sets(3, &[[1, 2], [1, 3]]).unwrap();
        for theta in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            let d = build_distortion(&phi, &SurvivalCopula::fgm(theta, 3).unwrap()).unwrap();
            // 2p^2 - p^3 - θ p^3 (1-p)^3
            let poly = Polynomial::new(alloc::vec![0.0, 0.0, 2.0, -1.0 - theta, 3.0 * theta, -3.0 * theta, theta]);
            assert_jet_matches_polynomial(&d, &poly);
            let c = d.exact_coefficients().unwrap();
            for (x, y) in c.iter().zip(poly.coefficients()) {
                assert!(abs(x - y) < 1e-12);
            }
        }
    }

    #[test]
    fn series_fgm_matches_closed_form() {
        let phi = StructureFunction::series(3).unwrap();
        let theta = 0.7;
        let d = build_distortion(&phi, &SurvivalCopula::fgm(theta, 3).unwrap()).unwrap();
        let poly = Polynomial::new(alloc::vec![0.0, 0.0, 0.0, 1.0 + theta, -3.0 * theta, 3.0 * theta, -theta]);
        assert_jet_matches_polynomial(&d, &poly);
    }

    #[test]
    fn k_out_of_n_examples() {
        let d = distortion_k_out_of_n(1, 1).unwrap();
        assert_eq!(d.eval(0.37), 0.37);
        assert!(abs(distortion_k_out_of_n(2, 3).unwrap().eval(0.5) - 0.5) < 1e-15);
        let tail: f64 = (3..=5)
            .map(|j| crate::math::binomial(5, j) * powi(0.3, j as u32) * powi(0.7, (5 - j) as u32))
            .sum();
        assert!(abs(distortion_k_out_of_n(3, 5).unwrap().eval(0.3) - tail) < 1e-15);
        assert!(distortion_k_out_of_n(0, 3).is_err());
    }

    #[test]
    fn incomplete_beta_backing_agrees_with_polynomial() {
        // force the continued-fraction path by comparing with the same
        // system built through the exact path at the cap
        let k = 7;
        let n = EXACT_DEGREE_CAP;
        let exact = distortion_k_out_of_n(k, n).unwrap();
        let ln_b = ln_beta(k as f64, (n - k + 1) as f64);
        let beta = Distortion::from_backing(Backing::IncBeta { k, n, ln_b }, "beta");
        for i in 1..50 {
            let level = Level::new(i as f64 / 50.0);
            let a = exact.jet(level);
            let b = beta.jet(level);
            assert!(abs(a.h - b.h) < 1e-12 && abs(a.hc - b.hc) < 1e-12);
            assert!(close(a.d1, b.d1, 1e-9) && close(a.d2, b.d2, 1e-8));
            assert!(close(a.big_h, b.big_h, 1e-9) && close(a.big_r, b.big_r, 1e-9));
            assert!(close(a.ph2, b.ph2, 1e-8) && close(a.qh2, b.qh2, 1e-8));
        }
        assert!(!distortion_k_out_of_n(3, 40).unwrap().is_exact());
    }

    #[test]
    fn redundancy_transforms_match_chain_rule() {
        let base = build_distortion(
            &StructureFunction::from_path_sets(3, &[[1, 2], [1, 3]]).unwrap(),
            &SurvivalCopula::fgm(0.4, 3).unwrap(),
        )
        .unwrap();
        let r = polynomial_reference(&base.exact_polynomial().unwrap());
        for m in 1..=3u32 {
            let mf = m as f64;
            let component = transform_redundancy(&base, RedundancyLevel::Component, m).unwrap();
            assert_jet_matches(&component, &|p| {
                let q = 1.0 - p;
                let uc = q.powi(m as i32 + 1);
                let (h, hc, d1, d2) = r(1.0 - uc, uc);
                let du = (mf + 1.0) * q.powi(m as i32);
                let ddu = -(mf + 1.0) * mf * q.powi(m as i32 - 1);
                (h, hc, d1 * du, d2 * du * du + d1 * ddu)
            });
            let system = transform_redundancy(&base, RedundancyLevel::System, m).unwrap();
            assert_jet_matches(&system, &|p| {
                let (_, hc, d1, d2) = r(p, 1.0 - p);
                let gc = hc.powi(m as i32 + 1);
                let g1 = (mf + 1.0) * hc.powi(m as i32) * d1;
                let g2 = (mf + 1.0) * (hc.powi(m as i32) * d2 - mf * hc.powi(m as i32 - 1) * d1 * d1);
                (1.0 - gc, gc, g1, g2)
            });
        }
        let dual = base.dual();
        assert_jet_matches(&dual, &|p| {
            let (h, hc, d1, d2) = r(1.0 - p, p);
            (hc, h, d1, -d2)
        });
        // the exact expansions agree with the transforms too
        for m in 1..=3 {
            let t = transform_redundancy(&base, RedundancyLevel::System, m).unwrap();
            let poly = t.exact_polynomial().unwrap();
            for i in 1..20 {
                let p = i as f64 / 20.0;
                assert!(abs(poly.eval(p) - t.eval(p)) < 1e-12);
            }
        }
    }

    #[test]
    fn redundancy_examples() {
        let t = transform_redundancy(&Distortion::identity(), RedundancyLevel::System, 1).unwrap();
        for i in 1..20 {
            let p = i as f64 / 20.0;
            assert!(abs(t.eval(p) - (1.0 - (1.0 - p) * (1.0 - p))) < 1e-15);
        }
        let n = 3;
        let c = transform_redundancy(&Distortion::power(n), RedundancyLevel::Component, 2).unwrap();
        let s = transform_redundancy(&Distortion::power(n), RedundancyLevel::System, 1).unwrap();
        for i in 1..20 {
            let p = i as f64 / 20.0;
            let u = 1.0 - (1.0 - p).powi(3);
            assert!(abs(c.eval(p) - u.powi(3)) < 1e-15);
            assert!(abs(s.eval(p) - (1.0 - (1.0 - p.powi(3)).powi(2))) < 1e-15);
        }
        assert_eq!(transform_redundancy(&t, RedundancyLevel::System, 0).unwrap_err(), DistortionError::BadRedundancy);
    }

    #[test]
    fn multipliers_of_series_and_parallel() {
        let series = Distortion::power(3);
        let parallel = distortion_k_out_of_n(1, 2).unwrap();
        for i in 1..100 {
            let p = i as f64 / 100.0;
            let f = eval_functionals(&series, p, DEFAULT_EPS).unwrap();
            assert!(abs(f.H - 3.0) < 1e-12);
            assert!(abs(f.pHpH) < 1e-12);
            let g = eval_functionals(&parallel, p, DEFAULT_EPS).unwrap();
            assert!(abs(g.R - 2.0) < 1e-12);
        }
    }

    #[test]
    fn boundary_and_degenerate_errors() {
        let d = Distortion::power(2);
        assert!(matches!(eval_functionals(&d, 1e-5, DEFAULT_EPS), Err(DistortionError::BoundaryEvaluation { .. })));
        let tiny = Distortion::power(200);
        assert!(matches!(eval_functionals(&tiny, 1e-2, DEFAULT_EPS), Err(DistortionError::DegenerateDistortion { .. })));
    }

    #[test]
    fn gumbel_series_is_a_real_power() {
        let theta = 2.0;
        let d = build_distortion(&StructureFunction::series(3).unwrap(), &SurvivalCopula::gumbel(theta, 3).unwrap()).unwrap();
        let a = 3f64.powf(1.0 / theta);
        for i in 1..50 {
            let p = i as f64 / 50.0;
            let j = d.jet(Level::new(p));
            assert!(close(j.h, p.powf(a), 1e-14));
            assert!(close(j.big_h, a, 1e-14));
            assert!(close(j.ph2, a - 1.0, 1e-13));
        }
    }

    #[test]
    fn archimedean_backing_matches_power_sum() {
        // Gumbel through the generic generator route against the closed form
        let theta = 1.7;
        let phi = StructureFunction::from_path_sets(3, &[[1, 2], [1, 3]]).unwrap();
        let closed = build_distortion(&phi, &SurvivalCopula::gumbel(theta, 3).unwrap()).unwrap();
        let generator: Arc<dyn Generator> = Arc::new(crate::copulas::GumbelGenerator { theta });
        let generic = build_distortion(&phi, &SurvivalCopula::archimedean(generator, 3).unwrap()).unwrap();
        for i in 1..50 {
            let level = Level::new(i as f64 / 50.0);
            let a = closed.jet(level);
            let b = generic.jet(level);
            assert!(close(a.h, b.h, 1e-12) && close(a.hc, b.hc, 1e-11));
            assert!(close(a.d1, b.d1, 1e-10), "{} vs {}", a.d1, b.d1);
            assert!(close(a.d2, b.d2, 1e-8), "{} vs {}", a.d2, b.d2);
        }
    }

    #[test]
    fn numeric_backing_matches_exact() {
        let f: ScalarFn = Arc::new(|p: f64| 3.0 * p * p - 2.0 * p * p * p);
        let numeric = Distortion::from_fn("2-out-of-3 numeric", f).unwrap();
        let exact = distortion_k_out_of_n(2, 3).unwrap();
        for i in 1..50 {
            let level = Level::new(i as f64 / 50.0);
            let a = numeric.jet(level);
            let b = exact.jet(level);
            assert!(close(a.d1, b.d1, 1e-8));
            assert!(close(a.d2, b.d2, 1e-5));
        }
        assert!(!numeric.is_numerically_unstable());
        assert!(numeric.exact_coefficients().is_none());
    }

    #[test]
    fn noisy_numeric_distortion_is_flagged() {
        let f: ScalarFn = Arc::new(|p: f64| p + 1e-9 * (p * 1e9).sin() * p * (1.0 - p));
        let d = Distortion::from_fn("noisy", f).unwrap();
        assert!(d.is_numerically_unstable());
    }

    #[test]
    fn rejects_non_distortions() {
        assert!(Distortion::from_polynomial(&[0.5, 0.5]).is_err());
        assert!(Distortion::from_polynomial(&[0.0, 2.0, -1.0]).is_ok());
        assert!(Distortion::from_bernstein(alloc::vec![0.0, 1.0, 0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let phi = StructureFunction::series(3).unwrap();
        let err = build_distortion(&phi, &SurvivalCopula::independence(2).unwrap()).unwrap_err();
        assert_eq!(err, DistortionError::DimensionMismatch { structure: 3, copula: 2 });
    }
}
