//! Bernstein-form polynomials on `[0, 1]` with tail-accurate evaluation.
//!
//! A distortion `h(p) = Σ b_i C(N,i) p^i q^(N-i)` is stored twice: as the
//! coefficients `b_i` and as their complements `1 - b_i`. Structural zeros in
//! either vector are exact, so `h` near `p = 0` and `1 - h` near `p = 1` are
//! evaluated by factoring out the leading power instead of by subtraction.

use alloc::vec::Vec;

use crate::distortion::{Jet, Level};
use crate::math::{abs, binomial, powi};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Bernstein {
    up: Vec<f64>,
    down: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

/// Forward difference `c_{i+1} - c_i` taken from whichever representation is
/// smaller in magnitude; both-zero neighbourhoods give an exact zero.
fn differences(up: &[f64], down: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(up.len().saturating_sub(1));
    for i in 0..up.len().saturating_sub(1) {
        let from_up = up[i + 1] - up[i];
        let from_down = down[i] - down[i + 1];
        let d = if abs(up[i]).max(abs(up[i + 1])) <= abs(down[i]).max(abs(down[i + 1])) {
            from_up
        } else {
            from_down
        };
        out.push(d);
    }
    out
}

fn second_differences(up: &[f64], down: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(up.len().saturating_sub(2));
    for i in 0..up.len().saturating_sub(2) {
        let mu = abs(up[i]).max(abs(up[i + 1])).max(abs(up[i + 2]));
        let md = abs(down[i]).max(abs(down[i + 1])).max(abs(down[i + 2]));
        out.push(if mu <= md {
            up[i + 2] - 2.0 * up[i + 1] + up[i]
        } else {
            -(down[i + 2] - 2.0 * down[i + 1] + down[i])
        });
    }
    out
}

/// Lowest index with a nonzero coefficient and the number of trailing zeros.
fn support(c: &[f64]) -> Option<(usize, usize)> {
    let lo = c.iter().position(|&v| v != 0.0)?;
    let hi = c.iter().rposition(|&v| v != 0.0)?;
    Some((lo, c.len() - 1 - hi))
}

/// `Σ c_i C(M,i) p^(i-s) q^(M-i-t)` over the support of `c`, where `M =
/// c.len() - 1` and `(s, t)` is the support returned by [`support`].
fn scaled_sum(c: &[f64], s: usize, t: usize, level: Level) -> f64 {
    let m = c.len() - 1;
    let mut acc = 0.0;
    for (i, &ci) in c.iter().enumerate().take(m + 1 - t).skip(s) {
        if ci != 0.0 {
            acc += ci * binomial(m, i) * powi(level.p, (i - s) as u32) * powi(level.q, (m - i - t) as u32);
        }
    }
    acc
}

/// A polynomial in Bernstein form `Σ c_i B_{M,i}` factored as
/// `p^s q^t · scaled`, so ratios of such values never divide underflowed
/// powers.
#[derive(Debug, Clone, Copy)]
struct Factored {
    s: i64,
    t: i64,
    scaled: f64,
}

impl Factored {
    fn of(c: &[f64], level: Level) -> Self {
        match support(c) {
            Some((s, t)) => Self { s: s as i64, t: t as i64, scaled: scaled_sum(c, s, t, level) },
            None => Self { s: 0, t: 0, scaled: 0.0 },
        }
    }

    fn value(self, level: Level) -> f64 {
        if self.scaled == 0.0 {
            return 0.0;
        }
        self.scaled * powi(level.p, self.s as u32) * powi(level.q, self.t as u32)
    }

    /// `p^a q^b · self / other` with the power bookkeeping done symbolically.
    fn ratio(self, other: Self, a: i64, b: i64, level: Level) -> f64 {
        let ep = self.s - other.s + a;
        let eq = self.t - other.t + b;
        let mut r = self.scaled / other.scaled;
        r *= if ep >= 0 { powi(level.p, ep as u32) } else { 1.0 / powi(level.p, (-ep) as u32) };
        r *= if eq >= 0 { powi(level.q, eq as u32) } else { 1.0 / powi(level.q, (-eq) as u32) };
        r
    }
}

impl Bernstein {
    /// Builds from coefficients and their complements; the caller guarantees
    /// `up[i] + down[i] == 1` up to rounding and exactness of any zeros.
    pub(crate) fn from_parts(up: Vec<f64>, down: Vec<f64>) -> Self {
        debug_assert_eq!(up.len(), down.len());
        debug_assert!(!up.is_empty());
        let d1 = differences(&up, &down);
        let d2 = second_differences(&up, &down);
        Self { up, down, d1, d2 }
    }

    /// Coefficients given as exact integer counts over the binomial weights:
    /// `b_i = counts[i] / C(N, i)`.
    pub(crate) fn from_counts(counts: &[i128]) -> Self {
        let n = counts.len() - 1;
        let mut up = Vec::with_capacity(n + 1);
        let mut down = Vec::with_capacity(n + 1);
        for (i, &c) in counts.iter().enumerate() {
            let total = crate::math::binomial_i128(n, i);
            up.push(c as f64 / total as f64);
            down.push((total - c) as f64 / total as f64);
        }
        Self::from_parts(up, down)
    }

    /// Coefficients `b_i` with complements computed by subtraction; values
    /// exactly 0 or 1 keep exact complements.
    pub(crate) fn from_coefficients(up: Vec<f64>) -> Self {
        let down = up.iter().map(|&b| 1.0 - b).collect();
        Self::from_parts(up, down)
    }

    pub(crate) fn degree(&self) -> usize {
        self.up.len() - 1
    }

    pub(crate) fn coefficients(&self) -> &[f64] {
        &self.up
    }

    pub(crate) fn jet(&self, level: Level) -> Jet {
        let n = self.degree();
        let h = Factored::of(&self.up, level);
        let hc = Factored::of(&self.down, level);
        if n == 0 {
            return Jet::from_values(level, h.value(level), hc.value(level), 0.0, 0.0);
        }
        let nf = n as f64;
        let d1 = Factored::of(&self.d1, level);
        let h_val = h.value(level);
        let hc_val = hc.value(level);
        let d1_val = nf * d1.value(level);
        let (d2_val, ph2, qh2) = if n >= 2 {
            let d2 = Factored::of(&self.d2, level);
            let scale = (n - 1) as f64;
            if d1.scaled == 0.0 {
                (nf * scale * d2.value(level), f64::NAN, f64::NAN)
            } else if d2.scaled == 0.0 {
                (0.0, 0.0, 0.0)
            } else {
                (nf * scale * d2.value(level), scale * d2.ratio(d1, 1, 0, level), scale * d2.ratio(d1, 0, 1, level))
            }
        } else {
            (0.0, 0.0, 0.0)
        };
        let big_h = if h.scaled == 0.0 { f64::NAN } else { nf * d1.ratio(h, 1, 0, level) };
        let big_r = if hc.scaled == 0.0 { f64::NAN } else { nf * d1.ratio(hc, 0, 1, level) };
        Jet { h: h_val, hc: hc_val, d1: d1_val, d2: d2_val, big_h, big_r, ph2, qh2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_has_constant_hazard_multiplier_at_extremes() {
        // p^3
        let b = Bernstein::from_counts(&[0, 0, 0, 1]);
        for &p in &[1e-30, 1e-4, 0.5, 1.0 - 1e-9] {
            let j = b.jet(Level::new(p));
            assert!((j.big_h - 3.0).abs() < 1e-13, "p={p} H={}", j.big_h);
            assert!((j.ph2 - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn parallel_has_constant_reversed_multiplier_at_extremes() {
        // 1 - q^3
        let b = Bernstein::from_counts(&[0, 3, 3, 1]);
        for &q in &[1e-30, 1e-4, 0.5, 1.0 - 1e-9] {
            let j = b.jet(Level::from_complement(q));
            assert!((j.big_r - 3.0).abs() < 1e-12, "q={q} R={}", j.big_r);
            assert!((j.hc - q * q * q).abs() <= 1e-15 * q * q * q);
        }
    }

    #[test]
    fn two_out_of_three_values() {
        let b = Bernstein::from_counts(&[0, 0, 3, 1]);
        let j = b.jet(Level::new(0.3));
        let h = 3.0 * 0.09 - 2.0 * 0.027;
        assert!((j.h - h).abs() < 1e-15);
        assert!((j.hc - (1.0 - h)).abs() < 1e-15);
        assert!((j.d1 - (6.0 * 0.3 - 6.0 * 0.09)).abs() < 1e-14);
        assert!((j.d2 - (6.0 - 12.0 * 0.3)).abs() < 1e-13);
    }

    #[test]
    fn exact_zero_at_the_boundary() {
        let b = Bernstein::from_counts(&[0, 0, 3, 1]);
        let j = b.jet(Level::new(0.0));
        assert_eq!(j.h, 0.0);
        assert_eq!(j.big_h, 2.0);
        let j = b.jet(Level::from_complement(0.0));
        assert_eq!(j.hc, 0.0);
        assert_eq!(j.big_r, 2.0);
    }
}
