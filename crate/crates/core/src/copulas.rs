//! Exchangeable survival copulas: evaluation, Archimedean generators and
//! seeded sampling.
//!
//! A survival copula `K` couples the component survival probabilities:
//! `P(X_1 > x_1, …, X_n > x_n) = K(F̄(x_1), …, F̄(x_n))`. Equivalently `K` is
//! the joint distribution function of `U_i = F̄(X_i)`, which is what
//! [`SurvivalCopula::sample`] draws.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use thiserror::Error;

use crate::distortion::Level;
use crate::math::{abs, exp, expm1, ln, ln_1p, ln_from_pair, powf, sin, sqrt};

/// Values outside `[0, 1]` by no more than this are treated as rounding.
const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CopulaError {
    #[error("{family} copula: {name}={value} {reason}")]
    InvalidParameter { family: &'static str, name: &'static str, value: f64, reason: &'static str },
    #[error("copula dimension must be positive")]
    ZeroDimension,
    #[error("argument has length {got}, copula dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {index} = {value} is outside [0, 1]")]
    OutOfUnitInterval { index: usize, value: f64 },
    #[error("no frailty sampler for the {family} family")]
    UnsupportedFamilyForSampling { family: String },
    #[error("invalid generator at x={x}: {reason}")]
    InvalidGenerator { x: f64, reason: &'static str },
    #[error("sample count must be positive")]
    EmptySample,
}

/// An Archimedean generator `ψ`: continuous, strictly decreasing from
/// `ψ(0) = 1` to `ψ(∞) = 0`. Derivatives and the inverse default to numeric
/// approximations; the built-in families override them analytically.
pub trait Generator: fmt::Debug + Send + Sync {
    fn name(&self) -> String;

    fn psi(&self, x: f64) -> f64;

    /// `1 - ψ(x)`, overridden where it can be computed without cancellation.
    fn psi_complement(&self, x: f64) -> f64 {
        1.0 - self.psi(x)
    }

    fn psi_d1(&self, x: f64) -> f64 {
        let h = numeric_step(x, 1e-5);
        if x >= h {
            (self.psi(x + h) - self.psi(x - h)) / (2.0 * h)
        } else {
            (-3.0 * self.psi(x) + 4.0 * self.psi(x + h) - self.psi(x + 2.0 * h)) / (2.0 * h)
        }
    }

    fn psi_d2(&self, x: f64) -> f64 {
        let h = numeric_step(x, 1e-4);
        if x >= h {
            (self.psi(x + h) - 2.0 * self.psi(x) + self.psi(x - h)) / (h * h)
        } else {
            (self.psi(x) - 2.0 * self.psi(x + h) + self.psi(x + 2.0 * h)) / (h * h)
        }
    }

    /// `ψ⁻¹(p)` at a survival level; bisection to relative width `1e-12`
    /// unless overridden.
    fn psi_inv(&self, level: Level) -> f64 {
        bisect_inverse(self, level)
    }
}

fn numeric_step(x: f64, rel: f64) -> f64 {
    rel * x.max(1.0)
}

fn bisect_inverse<G: Generator + ?Sized>(g: &G, level: Level) -> f64 {
    if level.q <= 0.0 {
        return 0.0;
    }
    if level.p <= 0.0 {
        return f64::INFINITY;
    }
    // compare on whichever side keeps digits
    let below = |w: f64| {
        if level.p > 0.5 {
            g.psi_complement(w) > level.q
        } else {
            g.psi(w) < level.p
        }
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while !below(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    for _ in 0..2000 {
        let mid = if lo > 0.0 && hi / lo > 4.0 {
            sqrt(lo * hi)
        } else if lo == 0.0 && hi > 1e-300 {
            hi / 4.0
        } else {
            0.5 * (lo + hi)
        };
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `ψ(x) = e^{-x}`: the independence copula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpGenerator;

impl Generator for ExpGenerator {
    fn name(&self) -> String {
        "independence".to_string()
    }
    fn psi(&self, x: f64) -> f64 {
        exp(-x)
    }
    fn psi_complement(&self, x: f64) -> f64 {
        -expm1(-x)
    }
    fn psi_d1(&self, x: f64) -> f64 {
        -exp(-x)
    }
    fn psi_d2(&self, x: f64) -> f64 {
        exp(-x)
    }
    fn psi_inv(&self, level: Level) -> f64 {
        -ln_from_pair(level.p, level.q)
    }
}

/// Gumbel–Hougaard generator `ψ(x) = exp(-x^{1/θ})`, `θ >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GumbelGenerator {
    pub theta: f64,
}

impl Generator for GumbelGenerator {
    fn name(&self) -> String {
        format!("gumbel(theta={})", self.theta)
    }
    fn psi(&self, x: f64) -> f64 {
        exp(-powf(x, 1.0 / self.theta))
    }
    fn psi_complement(&self, x: f64) -> f64 {
        -expm1(-powf(x, 1.0 / self.theta))
    }
    fn psi_d1(&self, x: f64) -> f64 {
        let a = 1.0 / self.theta;
        -a * powf(x, a - 1.0) * self.psi(x)
    }
    fn psi_d2(&self, x: f64) -> f64 {
        let a = 1.0 / self.theta;
        self.psi(x) * (a * a * powf(x, 2.0 * a - 2.0) - a * (a - 1.0) * powf(x, a - 2.0))
    }
    fn psi_inv(&self, level: Level) -> f64 {
        powf(-ln_from_pair(level.p, level.q), self.theta)
    }
}

/// Clayton–Oakes generator `ψ(x) = (1 + x)^{-1/θ}`, `θ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaytonGenerator {
    pub theta: f64,
}

impl Generator for ClaytonGenerator {
    fn name(&self) -> String {
        format!("clayton(theta={})", self.theta)
    }
    fn psi(&self, x: f64) -> f64 {
        exp(-ln_1p(x) / self.theta)
    }
    fn psi_complement(&self, x: f64) -> f64 {
        -expm1(-ln_1p(x) / self.theta)
    }
    fn psi_d1(&self, x: f64) -> f64 {
        let a = 1.0 / self.theta;
        -a * exp(-(a + 1.0) * ln_1p(x))
    }
    fn psi_d2(&self, x: f64) -> f64 {
        let a = 1.0 / self.theta;
        a * (a + 1.0) * exp(-(a + 2.0) * ln_1p(x))
    }
    fn psi_inv(&self, level: Level) -> f64 {
        expm1(-self.theta * ln_from_pair(level.p, level.q))
    }
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied generator; `ψ⁻¹` is optional and found by bisection when
/// absent.
#[derive(Clone)]
pub struct FnGenerator {
    name: String,
    psi: ScalarFn,
    psi_inv: Option<ScalarFn>,
}

impl FnGenerator {
    pub fn new(name: impl Into<String>, psi: ScalarFn, psi_inv: Option<ScalarFn>) -> Self {
        Self { name: name.into(), psi, psi_inv }
    }
}

impl fmt::Debug for FnGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnGenerator")
            .field("name", &self.name)
            .field("has_inverse", &self.psi_inv.is_some())
            .finish()
    }
}

impl Generator for FnGenerator {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn psi(&self, x: f64) -> f64 {
        (self.psi)(x)
    }
    fn psi_inv(&self, level: Level) -> f64 {
        match &self.psi_inv {
            Some(inv) => inv(level.p),
            None => bisect_inverse(self, level),
        }
    }
}

/// Checks the generator axioms on a log-spaced sample grid.
pub fn validate_generator(g: &dyn Generator) -> Result<(), CopulaError> {
    let at_zero = g.psi(0.0);
    if !(abs(at_zero - 1.0) <= ROUNDING_SLACK) {
        return Err(CopulaError::InvalidGenerator { x: 0.0, reason: "psi(0) must equal 1" });
    }
    let mut prev = at_zero;
    let mut prev_x = 0.0;
    for i in 0..=120 {
        let x = powf(10.0, -6.0 + 0.175 * i as f64);
        let v = g.psi(x);
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(CopulaError::InvalidGenerator { x, reason: "psi must map into [0, 1]" });
        }
        if v > prev || (v == prev && v > 0.0 && v < 1.0) {
            return Err(CopulaError::InvalidGenerator { x, reason: "psi must be strictly decreasing" });
        }
        prev = v;
        prev_x = x;
    }
    if prev > 0.5 * g.psi(1.0) {
        return Err(CopulaError::InvalidGenerator { x: prev_x, reason: "psi must tend to 0 at infinity" });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum CopulaFamily {
    Independence,
    /// `K(u) = Π u_i (1 + θ Π (1 - u_i))`, `θ ∈ [-1, 1]`.
    Fgm { theta: f64 },
    GumbelHougaard { theta: f64 },
    ClaytonOakes { theta: f64 },
    Archimedean(Arc<dyn Generator>),
}

impl CopulaFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Independence => "independence",
            Self::Fgm { .. } => "fgm",
            Self::GumbelHougaard { .. } => "gumbel",
            Self::ClaytonOakes { .. } => "clayton",
            Self::Archimedean(_) => "archimedean",
        }
    }
}

/// A validated exchangeable survival copula of a fixed dimension.
#[derive(Debug, Clone)]
pub struct SurvivalCopula {
    family: CopulaFamily,
    n: usize,
}

fn finite_theta(family: &'static str, theta: f64) -> Result<(), CopulaError> {
    if theta.is_finite() {
        Ok(())
    } else {
        Err(CopulaError::InvalidParameter { family, name: "theta", value: theta, reason: "must be finite" })
    }
}

impl SurvivalCopula {
    pub fn new(family: CopulaFamily, n: usize) -> Result<Self, CopulaError> {
        if n == 0 {
            return Err(CopulaError::ZeroDimension);
        }
        match &family {
            CopulaFamily::Independence => {}
            CopulaFamily::Fgm { theta } => {
                finite_theta("fgm", *theta)?;
                if !(-1.0..=1.0).contains(theta) {
                    return Err(CopulaError::InvalidParameter {
                        family: "fgm",
                        name: "theta",
                        value: *theta,
                        reason: "must lie in [-1, 1]",
                    });
                }
            }
            CopulaFamily::GumbelHougaard { theta } => {
                finite_theta("gumbel", *theta)?;
                if *theta < 1.0 {
                    return Err(CopulaError::InvalidParameter {
                        family: "gumbel",
                        name: "theta",
                        value: *theta,
                        reason: "must be at least 1",
                    });
                }
            }
            CopulaFamily::ClaytonOakes { theta } => {
                finite_theta("clayton", *theta)?;
                if *theta <= 0.0 {
                    return Err(CopulaError::InvalidParameter {
                        family: "clayton",
                        name: "theta",
                        value: *theta,
                        reason: "must be positive",
                    });
                }
            }
            CopulaFamily::Archimedean(g) => validate_generator(g.as_ref())?,
        }
        let copula = Self { family, n };
        copula.check_boundary()?;
        Ok(copula)
    }

    pub fn independence(n: usize) -> Result<Self, CopulaError> {
        Self::new(CopulaFamily::Independence, n)
    }

    pub fn fgm(theta: f64, n: usize) -> Result<Self, CopulaError> {
        Self::new(CopulaFamily::Fgm { theta }, n)
    }

    pub fn gumbel(theta: f64, n: usize) -> Result<Self, CopulaError> {
        Self::new(CopulaFamily::GumbelHougaard { theta }, n)
    }

    pub fn clayton(theta: f64, n: usize) -> Result<Self, CopulaError> {
        Self::new(CopulaFamily::ClaytonOakes { theta }, n)
    }

    pub fn archimedean(generator: Arc<dyn Generator>, n: usize) -> Result<Self, CopulaError> {
        Self::new(CopulaFamily::Archimedean(generator), n)
    }

    /// `K(1,…,1) = 1` and `K = 0` with a zero coordinate.
    fn check_boundary(&self) -> Result<(), CopulaError> {
        let ones = alloc::vec![1.0; self.n];
        let top = self.eval(&ones)?;
        if abs(top - 1.0) > ROUNDING_SLACK {
            return Err(CopulaError::InvalidGenerator { x: 0.0, reason: "K(1,...,1) must equal 1" });
        }
        let mut u = ones;
        u[0] = 0.0;
        if self.eval(&u)? > 1e-15 {
            return Err(CopulaError::InvalidGenerator { x: f64::INFINITY, reason: "K must vanish with a zero coordinate" });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> &CopulaFamily {
        &self.family
    }

    /// The same family in another dimension.
    pub fn with_dim(&self, n: usize) -> Result<Self, CopulaError> {
        Self::new(self.family.clone(), n)
    }

    /// The Archimedean generator, for families that have one.
    pub fn generator(&self) -> Option<Arc<dyn Generator>> {
        match &self.family {
            CopulaFamily::Independence => Some(Arc::new(ExpGenerator)),
            CopulaFamily::GumbelHougaard { theta } => Some(Arc::new(GumbelGenerator { theta: *theta })),
            CopulaFamily::ClaytonOakes { theta } => Some(Arc::new(ClaytonGenerator { theta: *theta })),
            CopulaFamily::Archimedean(g) => Some(g.clone()),
            CopulaFamily::Fgm { .. } => None,
        }
    }

    pub fn eval(&self, u: &[f64]) -> Result<f64, CopulaError> {
        if u.len() != self.n {
            return Err(CopulaError::DimensionMismatch { expected: self.n, got: u.len() });
        }
        for (index, &value) in u.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(CopulaError::OutOfUnitInterval { index, value });
            }
        }
        if u.contains(&0.0) {
            return Ok(0.0);
        }
        let v = match &self.family {
            CopulaFamily::Independence => u.iter().product(),
            CopulaFamily::Fgm { theta } => {
                let prod: f64 = u.iter().product();
                let co: f64 = u.iter().map(|&v| 1.0 - v).product();
                prod * (1.0 + theta * co)
            }
            CopulaFamily::GumbelHougaard { theta } => {
                // log domain: -ln K = (Σ (-ln u_i)^θ)^{1/θ}
                let s: f64 = u.iter().map(|&v| powf(-ln(v), *theta)).sum();
                exp(-powf(s, 1.0 / theta))
            }
            CopulaFamily::ClaytonOakes { theta } => {
                let s: f64 = u.iter().map(|&v| expm1(-theta * ln(v))).sum();
                exp(-ln_1p(s) / theta)
            }
            CopulaFamily::Archimedean(g) => {
                let s: f64 = u.iter().map(|&v| g.psi_inv(Level::new(v))).sum();
                g.psi(s)
            }
        };
        Ok(clamp_unit(v))
    }

    /// `count` draws of `(U_1, …, U_n)` with joint distribution function
    /// `K`. Deterministic for a fixed seed.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>, CopulaError> {
        if count == 0 {
            return Err(CopulaError::EmptySample);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.n;
        let mut out = Vec::with_capacity(count);
        match &self.family {
            CopulaFamily::Independence => {
                for _ in 0..count {
                    out.push((0..n).map(|_| rng.sample::<f64, _>(Open01)).collect());
                }
            }
            CopulaFamily::Fgm { theta } => {
                // Lower-dimensional margins of this FGM are independent; the
                // last coordinate has conditional density 1 + a(1 - 2u).
                for _ in 0..count {
                    let mut u: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Open01)).collect();
                    if n >= 2 {
                        let a = theta * u[..n - 1].iter().map(|&v| 1.0 - 2.0 * v).product::<f64>();
                        let v = u[n - 1];
                        let b = 1.0 + a;
                        u[n - 1] = 2.0 * v / (b + sqrt(b * b - 4.0 * a * v));
                    }
                    out.push(u);
                }
            }
            CopulaFamily::GumbelHougaard { theta } => {
                let g = GumbelGenerator { theta: *theta };
                let alpha = 1.0 / theta;
                for _ in 0..count {
                    let v = positive_stable(&mut rng, alpha);
                    out.push(frailty_draw(&mut rng, &g, v, n));
                }
            }
            CopulaFamily::ClaytonOakes { theta } => {
                let g = ClaytonGenerator { theta: *theta };
                let gamma = Gamma::new(1.0 / theta, 1.0).map_err(|_| CopulaError::InvalidParameter {
                    family: "clayton",
                    name: "theta",
                    value: *theta,
                    reason: "gives an invalid gamma frailty",
                })?;
                for _ in 0..count {
                    let v: f64 = gamma.sample(&mut rng);
                    out.push(frailty_draw(&mut rng, &g, v, n));
                }
            }
            CopulaFamily::Archimedean(g) => {
                return Err(CopulaError::UnsupportedFamilyForSampling { family: g.name() });
            }
        }
        Ok(out)
    }
}

fn clamp_unit(v: f64) -> f64 {
    if (-ROUNDING_SLACK..0.0).contains(&v) {
        0.0
    } else if v > 1.0 && v <= 1.0 + ROUNDING_SLACK {
        1.0
    } else {
        v
    }
}

/// Marshall–Olkin step: `U_i = ψ(E_i / V)` with `V` the frailty whose
/// Laplace transform is `ψ`.
fn frailty_draw<G: Generator>(rng: &mut ChaCha8Rng, g: &G, v: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            g.psi(e / v)
        })
        .collect()
}

/// Kanter's representation of a positive `α`-stable variable with Laplace
/// transform `exp(-s^α)`, `0 < α <= 1`.
fn positive_stable(rng: &mut ChaCha8Rng, alpha: f64) -> f64 {
    if alpha >= 1.0 {
        return 1.0;
    }
    let u: f64 = PI * rng.sample::<f64, _>(Open01);
    let e: f64 = Exp1.sample(rng);
    let a = sin(alpha * u) / powf(sin(u), 1.0 / alpha);
    let b = powf(sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
    a * b
}
