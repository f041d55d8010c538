//! Parametric component lifetimes and the system-level lifetime models built
//! from them.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;

use thiserror::Error;

use crate::distortion::{Distortion, Level};
use crate::math::{exp, expm1, ln, ln_1p, powf};

/// A used system is rejected when its survival at `t` falls below this.
pub const DEAD_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LifetimeError {
    #[error("parameter {name}={value} must be positive and finite")]
    BadParameter { name: &'static str, value: f64 },
    #[error("lifetime evaluated at x={0}; x must be positive")]
    NonpositiveX(f64),
    #[error("survival at t={t} is {survival:e}, too small to condition on")]
    DeadAtT { t: f64, survival: f64 },
    #[error("survival probability {0} outside (0, 1)")]
    BadSurvivalTarget(f64),
}

fn positive(name: &'static str, value: f64) -> Result<(), LifetimeError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(LifetimeError::BadParameter { name, value })
    }
}

/// A component lifetime distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal {
    /// `F̄(x) = exp(-λ x^κ)`.
    Weibull { rate: f64, shape: f64 },
    /// `F(x) = exp(-(σ/x)^κ)`.
    Frechet { scale: f64, shape: f64 },
    /// `F̄(x) = exp(-λ x)`.
    Exponential { rate: f64 },
}

/// `F`, `F̄`, `f`, `r` and `r̃` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeValues {
    pub cdf: f64,
    pub sf: f64,
    pub pdf: f64,
    pub hazard: f64,
    pub rev_hazard: f64,
}

impl Marginal {
    pub fn weibull(rate: f64, shape: f64) -> Result<Self, LifetimeError> {
        positive("rate", rate)?;
        positive("shape", shape)?;
        Ok(Self::Weibull { rate, shape })
    }

    pub fn frechet(scale: f64, shape: f64) -> Result<Self, LifetimeError> {
        positive("scale", scale)?;
        positive("shape", shape)?;
        Ok(Self::Frechet { scale, shape })
    }

    pub fn exponential(rate: f64) -> Result<Self, LifetimeError> {
        positive("rate", rate)?;
        Ok(Self::Exponential { rate })
    }

    pub fn label(&self) -> String {
        match self {
            Self::Weibull { rate, shape } => format!("weibull(rate={rate}, shape={shape})"),
            Self::Frechet { scale, shape } => format!("frechet(scale={scale}, shape={shape})"),
            Self::Exponential { rate } => format!("exponential(rate={rate})"),
        }
    }

    fn weibull_params(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Weibull { rate, shape } => Some((rate, shape)),
            Self::Exponential { rate } => Some((rate, 1.0)),
            Self::Frechet { .. } => None,
        }
    }

    /// `(F̄(x), F(x))`, each without cancellation.
    pub fn level(&self, x: f64) -> Level {
        match self.weibull_params() {
            Some((rate, shape)) => {
                let z = rate * powf(x, shape);
                Level::pair(exp(-z), -expm1(-z))
            }
            None => {
                let z = self.frechet_z(x);
                Level::pair(-expm1(-z), exp(-z))
            }
        }
    }

    fn frechet_z(&self, x: f64) -> f64 {
        match *self {
            Self::Frechet { scale, shape } => powf(scale / x, shape),
            _ => unreachable!("frechet_z on a Weibull-type marginal"),
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.level(x).p
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.level(x).q
    }

    pub fn log_sf(&self, x: f64) -> f64 {
        match self.weibull_params() {
            Some((rate, shape)) => -rate * powf(x, shape),
            None => ln_1p(-exp(-self.frechet_z(x))),
        }
    }

    pub fn hazard(&self, x: f64) -> f64 {
        match self.weibull_params() {
            Some((rate, shape)) => rate * shape * powf(x, shape - 1.0),
            None => {
                let z = self.frechet_z(x);
                self.rev_hazard(x) / expm1(z)
            }
        }
    }

    pub fn rev_hazard(&self, x: f64) -> f64 {
        match self.weibull_params() {
            Some((rate, shape)) => self.hazard(x) / expm1(rate * powf(x, shape)),
            None => {
                // κ σ^κ x^{-κ-1}, computed as κ z / x
                let shape = match *self {
                    Self::Frechet { shape, .. } => shape,
                    _ => unreachable!(),
                };
                shape * self.frechet_z(x) / x
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self.weibull_params() {
            Some(_) => self.hazard(x) * self.sf(x),
            None => self.rev_hazard(x) * self.cdf(x),
        }
    }

    /// `F̄⁻¹(u)` for `u ∈ (0, 1)`.
    pub fn inverse_sf(&self, u: f64) -> f64 {
        match self.weibull_params() {
            Some((rate, shape)) => powf(-ln(u) / rate, 1.0 / shape),
            None => match *self {
                Self::Frechet { scale, shape } => scale * powf(-ln_1p(-u), -1.0 / shape),
                _ => unreachable!(),
            },
        }
    }

    pub fn eval(&self, x: f64) -> Result<LifetimeValues, LifetimeError> {
        LifetimeModel::Marginal(*self).values(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualKind {
    /// `(τ(X))_t`: the system aged `t`, survival `h(F̄(t+x)) / h(F̄(t))`.
    UsedSystem,
    /// `τ(X_t)`: a fresh system of components each aged `t`, survival
    /// `h(F̄(t+x) / F̄(t))`.
    SystemOfUsed,
}

/// A nonnegative lifetime exposing `F`, `F̄`, `f`, `r` and `r̃`.
#[derive(Debug, Clone)]
pub enum LifetimeModel {
    Marginal(Marginal),
    /// `X_t = (X - t | X > t)`.
    Residual { base: Marginal, t: f64, log_sf_t: f64 },
    /// `F̄ = h ∘ F̄_base`.
    System { distortion: Distortion, base: Box<LifetimeModel> },
    /// `F̄(x) = h(F̄_X(t+x)) / h(F̄_X(t))`.
    UsedSystem { distortion: Distortion, base: Marginal, t: f64, h_t: f64 },
}

impl From<Marginal> for LifetimeModel {
    fn from(m: Marginal) -> Self {
        Self::Marginal(m)
    }
}

/// The lifetime of a system with dual distortion `d` built from components
/// distributed as `marginal`.
pub fn system_lifetime(d: &Distortion, marginal: &LifetimeModel) -> LifetimeModel {
    LifetimeModel::System { distortion: d.clone(), base: Box::new(marginal.clone()) }
}

/// The residual life `X_t` of a marginal.
pub fn residual_marginal(base: &Marginal, t: f64) -> Result<LifetimeModel, LifetimeError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(LifetimeError::BadParameter { name: "t", value: t });
    }
    let log_sf_t = if t == 0.0 { 0.0 } else { base.log_sf(t) };
    let survival = exp(log_sf_t);
    if survival <= DEAD_THRESHOLD {
        return Err(LifetimeError::DeadAtT { t, survival });
    }
    Ok(LifetimeModel::Residual { base: *base, t, log_sf_t })
}

/// A used system or a system of used components at age `t`.
pub fn residual_model(
    d: &Distortion,
    marginal: &Marginal,
    t: f64,
    kind: ResidualKind,
) -> Result<LifetimeModel, LifetimeError> {
    let residual = residual_marginal(marginal, t)?;
    match kind {
        ResidualKind::SystemOfUsed => Ok(system_lifetime(d, &residual)),
        ResidualKind::UsedSystem => {
            let level = if t == 0.0 { Level::pair(1.0, 0.0) } else { marginal.level(t) };
            let h_t = d.jet(level).h;
            if h_t <= DEAD_THRESHOLD {
                return Err(LifetimeError::DeadAtT { t, survival: h_t });
            }
            Ok(LifetimeModel::UsedSystem { distortion: d.clone(), base: *marginal, t, h_t })
        }
    }
}

impl LifetimeModel {
    pub fn label(&self) -> String {
        match self {
            Self::Marginal(m) => m.label(),
            Self::Residual { base, t, .. } => format!("residual(t={t})[{}]", base.label()),
            Self::System { distortion, base } => format!("system[{}]({})", distortion.label(), base.label()),
            Self::UsedSystem { distortion, base, t, .. } => {
                format!("used-system(t={t})[{}]({})", distortion.label(), base.label())
            }
        }
    }

    /// `(F̄(x), F(x))`.
    pub fn level(&self, x: f64) -> Level {
        match self {
            Self::Marginal(m) => m.level(x),
            Self::Residual { base, t, log_sf_t } => {
                let ls = base.log_sf(t + x) - log_sf_t;
                Level::pair(exp(ls), -expm1(ls))
            }
            Self::System { distortion, base } => {
                let j = distortion.jet(base.level(x));
                Level::pair(j.h, j.hc)
            }
            Self::UsedSystem { distortion, base, t, h_t } => {
                let h = distortion.jet(base.level(t + x)).h;
                Level::pair(h / h_t, (h_t - h) / h_t)
            }
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.level(x).p
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.level(x).q
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Self::Marginal(m) => m.pdf(x),
            Self::Residual { base, t, log_sf_t } => base.pdf(t + x) * exp(-log_sf_t),
            Self::System { distortion, base } => base.pdf(x) * distortion.jet(base.level(x)).d1,
            Self::UsedSystem { distortion, base, t, h_t } => {
                base.pdf(t + x) * distortion.jet(base.level(t + x)).d1 / h_t
            }
        }
    }

    /// `r(x) = f(x) / F̄(x)`; for systems `r_X(x) · H(F̄_X(x))`.
    pub fn hazard(&self, x: f64) -> f64 {
        match self {
            Self::Marginal(m) => m.hazard(x),
            Self::Residual { base, t, .. } => base.hazard(t + x),
            Self::System { distortion, base } => base.hazard(x) * distortion.jet(base.level(x)).big_h,
            Self::UsedSystem { distortion, base, t, .. } => {
                base.hazard(t + x) * distortion.jet(base.level(t + x)).big_h
            }
        }
    }

    /// `r̃(x) = f(x) / F(x)`; for systems `r̃_X(x) · R(F̄_X(x))`.
    pub fn rev_hazard(&self, x: f64) -> f64 {
        match self {
            Self::Marginal(m) => m.rev_hazard(x),
            Self::Residual { base, .. } => {
                let l = self.level(x);
                base.hazard(x + self.age()) * l.p / l.q
            }
            Self::System { distortion, base } => base.rev_hazard(x) * distortion.jet(base.level(x)).big_r,
            Self::UsedSystem { distortion, base, t, h_t } => {
                let j = distortion.jet(base.level(t + x));
                base.pdf(t + x) * j.d1 / (h_t - j.h)
            }
        }
    }

    fn age(&self) -> f64 {
        match self {
            Self::Residual { t, .. } | Self::UsedSystem { t, .. } => *t,
            _ => 0.0,
        }
    }

    pub fn values(&self, x: f64) -> Result<LifetimeValues, LifetimeError> {
        if !(x > 0.0) {
            return Err(LifetimeError::NonpositiveX(x));
        }
        let l = self.level(x);
        Ok(LifetimeValues { cdf: l.q, sf: l.p, pdf: self.pdf(x), hazard: self.hazard(x), rev_hazard: self.rev_hazard(x) })
    }

    /// `x` with `F̄(x) = target`, by bisection in `ln x`.
    pub fn quantile_sf(&self, target: f64) -> Result<f64, LifetimeError> {
        if !(target > 0.0 && target < 1.0) {
            return Err(LifetimeError::BadSurvivalTarget(target));
        }
        let mut lo = -60.0f64;
        let mut hi = 60.0f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.sf(exp(mid)) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 {
                break;
            }
        }
        Ok(exp(0.5 * (lo + hi)))
    }

    /// `[x_lo, x_hi]` on which `F̄` runs from `hi_sf` down to `lo_sf`.
    pub fn x_range(&self, lo_sf: f64, hi_sf: f64) -> Result<(f64, f64), LifetimeError> {
        Ok((self.quantile_sf(hi_sf)?, self.quantile_sf(lo_sf)?))
    }
}
