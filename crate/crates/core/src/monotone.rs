//! Grid-certified monotonicity classification.
//!
//! A function is sampled on a grid; any pair `x_a < x_b` with `f(x_b) -
//! f(x_a)` beyond tolerance is evidence of rising, and likewise of falling.
//! Pairs are not restricted to neighbours, so slow drifts that never exceed
//! tolerance in a single step still count. Before a function is declared
//! non-monotone the grid is refined tenfold around both witnesses.

use alloc::vec::Vec;

use thiserror::Error;

use crate::math::{abs, exp, ln};

pub const DEFAULT_GRID_POINTS: usize = 2001;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const ABS_FLOOR: f64 = 1e-12;
pub const REFINE_FACTOR: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonotoneError {
    #[error("non-finite value {value} at x={x}")]
    NonFiniteValue { x: f64, value: f64 },
    #[error("interval [{lo}, {hi}] is empty or not finite")]
    BadInterval { lo: f64, hi: f64 },
    #[error("grid needs at least 3 points, got {0}")]
    GridTooSmall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    /// Log-spaced; requires a positive interval.
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneConfig {
    pub grid_points: usize,
    /// Relative tolerance; differences below `max(tol · max(|f_a|, |f_b|),
    /// abs_floor)` are ties.
    pub tol: f64,
    pub abs_floor: f64,
    pub spacing: Spacing,
}

impl Default for MonotoneConfig {
    fn default() -> Self {
        Self { grid_points: DEFAULT_GRID_POINTS, tol: DEFAULT_TOL, abs_floor: ABS_FLOOR, spacing: Spacing::Linear }
    }
}

impl MonotoneConfig {
    pub fn with_spacing(mut self, spacing: Spacing) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn with_grid(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn threshold(&self, fa: f64, fb: f64) -> f64 {
        (self.tol * abs(fa).max(abs(fb))).max(self.abs_floor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    NonMonotone,
}

impl Monotonicity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Increasing => "increasing",
            Self::Decreasing => "decreasing",
            Self::Constant => "constant",
            Self::NonMonotone => "non-monotone",
        }
    }

    /// Nondecreasing in the non-strict reading (constant counts).
    pub fn is_nondecreasing(&self) -> bool {
        matches!(self, Self::Increasing | Self::Constant)
    }

    pub fn is_nonincreasing(&self) -> bool {
        matches!(self, Self::Decreasing | Self::Constant)
    }

    /// The class of `x ↦ f(-x)`, or of `f` read along a reversed axis.
    pub fn reversed(&self) -> Self {
        match self {
            Self::Increasing => Self::Decreasing,
            Self::Decreasing => Self::Increasing,
            other => *other,
        }
    }
}

/// Two evaluated points `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub a: f64,
    pub b: f64,
    pub fa: f64,
    pub fb: f64,
}

impl Witness {
    pub fn change(&self) -> f64 {
        self.fb - self.fa
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridInfo {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub spacing: Spacing,
    /// Points added by local refinement.
    pub refined_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityVerdict {
    pub class: Monotonicity,
    /// Largest rise beyond tolerance, if any.
    pub rising: Option<Witness>,
    /// Largest fall beyond tolerance, if any.
    pub falling: Option<Witness>,
    /// Largest movement against the reported class: for a monotone verdict
    /// the biggest opposing change (below tolerance); for `NonMonotone` the
    /// smaller of the two witnessed changes.
    pub max_violation: f64,
    /// Sign changes of successive differences, ties skipped.
    pub sign_changes: usize,
    pub min_value: f64,
    pub max_value: f64,
    pub grid: GridInfo,
}

impl MonotonicityVerdict {
    /// Both witness pairs, present exactly for `NonMonotone`.
    pub fn witnesses(&self) -> Option<(Witness, Witness)> {
        match (self.class, self.rising, self.falling) {
            (Monotonicity::NonMonotone, Some(r), Some(f)) => Some((r, f)),
            _ => None,
        }
    }
}

pub fn grid(lo: f64, hi: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    let last = (points - 1) as f64;
    match spacing {
        Spacing::Linear => (0..points)
            .map(|i| if i + 1 == points { hi } else { lo + (hi - lo) * i as f64 / last })
            .collect(),
        Spacing::Geometric => {
            let (a, b) = (ln(lo), ln(hi));
            (0..points)
                .map(|i| match i {
                    0 => lo,
                    _ if i + 1 == points => hi,
                    _ => exp(a + (b - a) * i as f64 / last),
                })
                .collect()
        }
    }
}

struct Scan {
    rising: Option<(Witness, f64)>,
    falling: Option<(Witness, f64)>,
    max_rise: f64,
    max_fall: f64,
    rise_idx: Option<(usize, usize)>,
    fall_idx: Option<(usize, usize)>,
}

/// Scans all ordered pairs in `O(n)` through running extrema, keeping the
/// pair with the largest excess over tolerance in each direction.
fn scan(xs: &[f64], fs: &[f64], cfg: &MonotoneConfig) -> Scan {
    let mut out =
        Scan { rising: None, falling: None, max_rise: 0.0, max_fall: 0.0, rise_idx: None, fall_idx: None };
    let (mut imin, mut imax) = (0usize, 0usize);
    for j in 1..fs.len() {
        let rise = fs[j] - fs[imin];
        if rise > out.max_rise {
            out.max_rise = rise;
        }
        let excess = rise - cfg.threshold(fs[imin], fs[j]);
        if excess > 0.0 && out.rising.is_none_or(|(_, e)| excess > e) {
            out.rising = Some((Witness { a: xs[imin], b: xs[j], fa: fs[imin], fb: fs[j] }, excess));
            out.rise_idx = Some((imin, j));
        }
        let fall = fs[imax] - fs[j];
        if fall > out.max_fall {
            out.max_fall = fall;
        }
        let excess = fall - cfg.threshold(fs[imax], fs[j]);
        if excess > 0.0 && out.falling.is_none_or(|(_, e)| excess > e) {
            out.falling = Some((Witness { a: xs[imax], b: xs[j], fa: fs[imax], fb: fs[j] }, excess));
            out.fall_idx = Some((imax, j));
        }
        if fs[j] < fs[imin] {
            imin = j;
        }
        if fs[j] > fs[imax] {
            imax = j;
        }
    }
    out
}

fn sign_changes(fs: &[f64], cfg: &MonotoneConfig) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for w in fs.windows(2) {
        let d = w[1] - w[0];
        let s = if d > cfg.threshold(w[0], w[1]) {
            1
        } else if -d > cfg.threshold(w[0], w[1]) {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

fn evaluate<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, MonotoneError> {
    let value = f(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(MonotoneError::NonFiniteValue { x, value })
    }
}

/// Classifies `f` on `[lo, hi]`.
pub fn check_monotone<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    cfg: &MonotoneConfig,
) -> Result<MonotonicityVerdict, MonotoneError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || (cfg.spacing == Spacing::Geometric && lo <= 0.0) {
        return Err(MonotoneError::BadInterval { lo, hi });
    }
    if cfg.grid_points < 3 {
        return Err(MonotoneError::GridTooSmall(cfg.grid_points));
    }
    let mut xs = grid(lo, hi, cfg.grid_points, cfg.spacing);
    let mut fs = xs.iter().map(|&x| evaluate(&f, x)).collect::<Result<Vec<_>, _>>()?;
    let mut s = scan(&xs, &fs, cfg);
    let mut refined_points = 0;

    if s.rising.is_some() && s.falling.is_some() {
        // refine tenfold around each witness endpoint
        let mut centers: Vec<usize> = Vec::new();
        for (a, b) in [s.rise_idx, s.fall_idx].into_iter().flatten() {
            centers.push(a);
            centers.push(b);
        }
        let mut extra: Vec<(f64, f64)> = Vec::new();
        for &c in &centers {
            let l = c.saturating_sub(1);
            let r = (c + 1).min(xs.len() - 1);
            for k in l..r {
                let sub = grid(xs[k], xs[k + 1], REFINE_FACTOR + 1, cfg.spacing);
                for &x in &sub[1..REFINE_FACTOR] {
                    extra.push((x, evaluate(&f, x)?));
                }
            }
        }
        refined_points = extra.len();
        let mut merged: Vec<(f64, f64)> = xs.iter().copied().zip(fs.iter().copied()).chain(extra).collect();
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        merged.dedup_by(|a, b| a.0 == b.0);
        xs = merged.iter().map(|m| m.0).collect();
        fs = merged.iter().map(|m| m.1).collect();
        s = scan(&xs, &fs, cfg);
    }

    let class = match (s.rising.is_some(), s.falling.is_some()) {
        (true, true) => Monotonicity::NonMonotone,
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (false, false) => Monotonicity::Constant,
    };
    let max_violation = match class {
        Monotonicity::Increasing => s.max_fall,
        Monotonicity::Decreasing => s.max_rise,
        Monotonicity::Constant => s.max_rise.max(s.max_fall),
        Monotonicity::NonMonotone => s.max_rise.min(s.max_fall),
    };
    let (min_value, max_value) =
        fs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(MonotonicityVerdict {
        class,
        rising: s.rising.map(|r| r.0),
        falling: s.falling.map(|r| r.0),
        max_violation,
        sign_changes: sign_changes(&fs, cfg),
        min_value,
        max_value,
        grid: GridInfo { lo, hi, points: cfg.grid_points, spacing: cfg.spacing, refined_points },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> MonotoneConfig {
        MonotoneConfig::default()
    }

    #[test]
    fn basic_classes() {
        let v = check_monotone(|p| p * p, 1e-4, 1.0 - 1e-4, &cfg()).unwrap();
        assert_eq!(v.class, Monotonicity::Increasing);
        assert!(v.witnesses().is_none());
        assert_eq!(check_monotone(|_| 0.7, 1e-4, 1.0 - 1e-4, &cfg()).unwrap().class, Monotonicity::Constant);
        assert_eq!(check_monotone(|p| -p, 0.0, 1.0, &cfg()).unwrap().class, Monotonicity::Decreasing);
        let v = check_monotone(|p| (p - 0.5) * (p - 0.5), 0.0, 1.0, &cfg()).unwrap();
        assert_eq!(v.class, Monotonicity::NonMonotone);
        let (r, f) = v.witnesses().unwrap();
        assert!(r.change() > 0.0 && f.change() < 0.0);
        assert_eq!(v.sign_changes, 1);
    }

    #[test]
    fn drift_below_step_tolerance_is_detected() {
        // each step moves 1e-13, total 2e-10 against values near 1
        let v = check_monotone(|x| 1.0 + 2e-10 * x, 0.0, 1.0, &cfg()).unwrap();
        assert_eq!(v.class, Monotonicity::Constant, "below relative tolerance 1e-9");
        let v = check_monotone(|x| 1.0 + 2e-8 * x, 0.0, 1.0, &cfg()).unwrap();
        assert_eq!(v.class, Monotonicity::Increasing);
    }

    #[test]
    fn refinement_keeps_witnesses_valid() {
        let f = |x: f64| (x - 0.3).abs();
        let v = check_monotone(f, 0.0, 1.0, &cfg().with_grid(101)).unwrap();
        assert_eq!(v.class, Monotonicity::NonMonotone);
        assert!(v.grid.refined_points > 0);
        let (r, fall) = v.witnesses().unwrap();
        for w in [r, fall] {
            assert!(w.a < w.b);
            assert_eq!(w.fa, f(w.a));
            assert_eq!(w.fb, f(w.b));
        }
    }

    #[test]
    fn geometric_grid_and_errors() {
        let v = check_monotone(|x: f64| x.ln(), 1e-3, 1e3, &cfg().with_spacing(Spacing::Geometric)).unwrap();
        assert_eq!(v.class, Monotonicity::Increasing);
        assert!(matches!(
            check_monotone(|x| 1.0 / (x - 0.5), 0.0, 1.0, &cfg().with_grid(3)),
            Err(MonotoneError::NonFiniteValue { .. })
        ));
        assert!(check_monotone(|x| x, 1.0, 0.0, &cfg()).is_err());
        assert!(check_monotone(|x| x, 0.0, 1.0, &cfg().with_spacing(Spacing::Geometric)).is_err());
    }
}
