//! Independent reference computations for the test suites.
//!
//! Nothing here depends on `relage-core`: every value is recomputed from
//! closed forms, brute-force enumeration, or textbook numerics so that the
//! library can be checked against something it did not produce.

use std::f64::consts::PI;

/// `C(n, k)` by the multiplicative formula.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `P(Bin(n, p) ≥ k)`: survival of an independent `k`-out-of-`n` system.
pub fn binomial_tail(k: u32, n: u32, p: f64) -> f64 {
    (k..=n).map(|j| binomial(n, j) * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32)).sum()
}

/// Survival of a coherent system with independent components, each up with
/// probability `p`, by summing over all `2^n` states. Path sets are 1-based.
pub fn enumerate_system_survival(n: usize, path_sets: &[Vec<usize>], p: f64) -> f64 {
    let masks: Vec<u64> = path_sets.iter().map(|s| s.iter().fold(0u64, |m, &i| m | 1 << (i - 1))).collect();
    let mut total = 0.0;
    for state in 0u64..(1 << n) {
        if masks.iter().any(|&m| state & m == m) {
            let up = state.count_ones() as i32;
            total += p.powi(up) * (1.0 - p).powi(n as i32 - up);
        }
    }
    total
}

/// Nodes and weights of `n`-point Gauss–Legendre quadrature on `[-1, 1]`.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre_rule(order);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + width * k as f64;
        let mid = lo + 0.5 * width;
        for (x, w) in nodes.iter().zip(&weights) {
            total += w * f(mid + 0.5 * width * x);
        }
    }
    total * 0.5 * width
}

/// `1/H_{k|n}(p) = ∫₀¹ u^(k-1) ((1-up)/(1-p))^(n-k) du`.
pub fn inverse_h_integral(k: u32, n: u32, p: f64) -> f64 {
    integrate(|u| u.powi(k as i32 - 1) * ((1.0 - u * p) / (1.0 - p)).powi((n - k) as i32), 0.0, 1.0, 4, 20)
}

/// `1/R_{k|n}(p) = ∫₀¹ u^(n-k) ((1-u(1-p))/p)^(k-1) du`.
pub fn inverse_r_integral(k: u32, n: u32, p: f64) -> f64 {
    integrate(|u| u.powi((n - k) as i32) * ((1.0 - u * (1.0 - p)) / p).powi(k as i32 - 1), 0.0, 1.0, 4, 20)
}

/// Central-difference derivative with step `h`.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Five-point stencil derivative, error `O(h^4)`.
pub fn five_point_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

pub mod marginals {
    //! Survival and distribution functions straight from their formulas.

    /// `F̄(x) = exp(-λ x^α)`.
    pub fn weibull_sf(rate: f64, shape: f64, x: f64) -> f64 {
        (-rate * x.powf(shape)).exp()
    }

    /// `F(x) = exp(-(σ/x)^κ)`.
    pub fn frechet_cdf(scale: f64, shape: f64, x: f64) -> f64 {
        (-(scale / x).powf(shape)).exp()
    }

    pub fn exponential_sf(rate: f64, x: f64) -> f64 {
        (-rate * x).exp()
    }
}

pub mod closed_forms {
    //! Published closed forms of the worked examples and counterexamples.

    /// `k(x) = r_{τ1}(x)/r_{τ2}(x)` for parallel systems of three Weibull(2,3)
    /// versus three Weibull(0.1,2) components: `30x` times the ratio of the
    /// parallel multipliers `3s(1-s)²/(1-(1-s)³)` at `s = e^{-2x³}` and
    /// `s = e^{-0.1x²}`.
    pub fn ce31_k(x: f64) -> f64 {
        let a = (-2.0 * x.powi(3)).exp();
        let b = (-0.1 * x * x).exp();
        // r_τ = r · 3(1-F̄)² F̄ / (1 - (1-F̄)³), with the F̄ cancelled
        let mult = |s: f64| 3.0 * (1.0 - s).powi(2) / (3.0 - 3.0 * s + s * s);
        30.0 * x * mult(a) / mult(b)
    }

    /// `l(x) = r̃_{τ2(Y)}(x)/r̃_{τ1(X)}(x)` for two-component series systems
    /// of Fréchet(2.1,7) (X) and Fréchet(2,3) (Y) components, in the written
    /// form with `a = e^{-(2/x)³}`, `b = e^{-(2.1/x)⁷}`.
    pub fn ce32_l(x: f64) -> f64 {
        let a = (-(2.0 / x).powi(3)).exp();
        let b = (-(2.1 / x).powi(7)).exp();
        let first = 24.0 * x.powi(4) * a * (1.0 - a) / (7.0 * 2.1f64.powi(7) * b * (1.0 - b));
        let second = (1.0 - (1.0 - b).powi(2)) / (1.0 - (1.0 - a).powi(2));
        first * second
    }

    /// `l(x)` with the common factors `a` and `b` cancelled, usable where
    /// they underflow.
    pub fn ce32_l_cancelled(x: f64) -> f64 {
        let a = (-(2.0 / x).powi(3)).exp();
        let b = (-(2.1 / x).powi(7)).exp();
        24.0 * x.powi(4) / (7.0 * 2.1f64.powi(7)) * (1.0 - a) * (2.0 - b) / ((2.0 - a) * -(-(2.1 / x).powi(7)).exp_m1())
    }

    /// Distortions of `min{X1, max{X2, X3}}` and `min{X1, X2, X3}` under the
    /// trivariate FGM copula.
    pub fn ex31_h1(theta: f64, p: f64) -> f64 {
        2.0 * p * p - p.powi(3) - theta * p.powi(3) * (1.0 - p).powi(3)
    }

    pub fn ex31_h2(theta: f64, p: f64) -> f64 {
        p.powi(3) + theta * p.powi(3) * (1.0 - p).powi(3)
    }

    pub fn ex31_big_h1(t: f64, p: f64) -> f64 {
        (4.0 * p * p - 3.0 * (1.0 + t) * p.powi(3) + 12.0 * t * p.powi(4) - 15.0 * t * p.powi(5) + 6.0 * t * p.powi(6))
            / (2.0 * p * p - (1.0 + t) * p.powi(3) + 3.0 * t * p.powi(4) - 3.0 * t * p.powi(5) + t * p.powi(6))
    }

    pub fn ex31_big_h2(t: f64, p: f64) -> f64 {
        (3.0 * (1.0 + t) * p.powi(3) - 6.0 * t * p.powi(6) - 12.0 * t * p.powi(4) + 15.0 * t * p.powi(5))
            / ((1.0 + t) * p.powi(3) - t * p.powi(6) - 3.0 * t * p.powi(4) + 3.0 * t * p.powi(5))
    }

    pub fn ex31_s(t: f64, p: f64) -> f64 {
        ex31_big_h1(t, p) / ex31_big_h2(t, p)
    }

    pub fn ex32_r1(t: f64, p: f64) -> f64 {
        (4.0 * p - (7.0 + 3.0 * t) * p * p + 3.0 * (1.0 + 5.0 * t) * p.powi(3) - 27.0 * t * p.powi(4)
            + 21.0 * t * p.powi(5)
            - 6.0 * t * p.powi(6))
            / (1.0 - 2.0 * p * p + (1.0 + t) * p.powi(3) - 3.0 * t * p.powi(4) + 3.0 * t * p.powi(5) - t * p.powi(6))
    }

    pub fn ex32_r2(t: f64, p: f64) -> f64 {
        (3.0 * (1.0 + t) * p * p - 3.0 * (1.0 + 5.0 * t) * p.powi(3) + 27.0 * t * p.powi(4) - 21.0 * t * p.powi(5)
            + 6.0 * t * p.powi(6))
            / (1.0 - (1.0 + t) * p.powi(3) + t * p.powi(6) + 3.0 * t * p.powi(4) - 3.0 * t * p.powi(5))
    }

    /// `v_θ = R2/R1`.
    pub fn ex32_v(t: f64, p: f64) -> f64 {
        ex32_r2(t, p) / ex32_r1(t, p)
    }

    /// `pR'/R` for `h(p) = p^a`.
    pub fn ex41_p_dlog_r(a: f64, p: f64) -> f64 {
        (a - 1.0 - a * p + p.powf(a)) / (1.0 - p - p.powf(a) + p.powf(a + 1.0))
    }

    /// The single-spare comparison expression for `h = p^n`:
    /// `(2-p)(1-p^n) / ((1-p)(2-p^n))`.
    pub fn cor41_ratio(n: u32, p: f64) -> f64 {
        (2.0 - p) * (1.0 - p.powi(n as i32)) / ((1.0 - p) * (2.0 - p.powi(n as i32)))
    }

    /// `h(p) = 1 - (1-p)^n`, the independent parallel system.
    pub fn parallel(n: u32, p: f64) -> f64 {
        1.0 - (1.0 - p).powi(n as i32)
    }
}

pub mod stats {
    //! Goodness-of-fit and dependence statistics.

    /// Kolmogorov–Smirnov distance between the empirical distribution of
    /// `samples` and `cdf`.
    pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
        let mut xs = samples.to_vec();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Asymptotic KS critical value at level 0.01.
    pub fn ks_critical_01(n: usize) -> f64 {
        1.6276 / (n as f64).sqrt()
    }

    /// Kendall's tau-a by merge-sort inversion counting, `O(n log n)`;
    /// assumes no ties.
    pub fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
        let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        let mut buf = vec![0.0; n];
        let discordant = count_inversions(&mut ys, &mut buf);
        let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
        (pairs - 2.0 * discordant as f64) / pairs
    }

    fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
        let n = v.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut count = {
            let (l, r) = v.split_at_mut(mid);
            let (bl, br) = buf.split_at_mut(mid);
            count_inversions(l, bl) + count_inversions(r, br)
        };
        let (mut i, mut j, mut k) = (0, mid, 0);
        while i < mid && j < n {
            if v[i] <= v[j] {
                buf[k] = v[i];
                i += 1;
            } else {
                buf[k] = v[j];
                count += (mid - i) as u64;
                j += 1;
            }
            k += 1;
        }
        buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
        k += mid - i;
        buf[k..k + n - j].copy_from_slice(&v[j..n]);
        v.copy_from_slice(&buf[..n]);
        count
    }

    /// Sample mean and its standard error for a 0/1 indicator sample.
    pub fn proportion(successes: usize, n: usize) -> (f64, f64) {
        let p = successes as f64 / n as f64;
        (p, (p * (1.0 - p) / n as f64).sqrt())
    }

    /// Kendall's tau of the bivariate FGM, Gumbel–Hougaard and Clayton
    /// copulas.
    pub fn fgm_tau(theta: f64) -> f64 {
        2.0 * theta / 9.0
    }

    pub fn gumbel_tau(theta: f64) -> f64 {
        1.0 - 1.0 / theta
    }

    pub fn clayton_tau(theta: f64) -> f64 {
        theta / (theta + 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_is_exact_for_polynomials() {
        let v = integrate(|x| x.powi(9) - 3.0 * x * x, 0.0, 2.0, 1, 10);
        assert!((v - (102.4 - 8.0)).abs() < 1e-11);
        let v = integrate(f64::sin, 0.0, PI, 4, 20);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tail_and_enumeration_agree() {
        let sets = vec![vec![1, 2], vec![1, 3], vec![2, 3]];
        for p in [0.1, 0.5, 0.9] {
            assert!((binomial_tail(2, 3, p) - enumerate_system_survival(3, &sets, p)).abs() < 1e-15);
        }
    }

    #[test]
    fn integral_representations_match_definitions() {
        // H_{1|1} = 1, H_{n|n} = n, R_{1|n} = n
        assert!((inverse_h_integral(3, 3, 0.4) - 1.0 / 3.0).abs() < 1e-14);
        assert!((inverse_r_integral(1, 4, 0.4) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn kendall_by_brute_force() {
        let x: [f64; 6] = [0.3, 0.1, 0.7, 0.9, 0.5, 0.2];
        let y = [0.2, 0.4, 0.6, 0.8, 0.1, 0.3];
        let mut s = 0.0;
        for i in 0..6 {
            for j in i + 1..6 {
                s += ((x[i] - x[j]) * (y[i] - y[j])).signum();
            }
        }
        assert!((stats::kendall_tau(&x, &y) - s / 15.0).abs() < 1e-15);
    }

    #[test]
    fn ce32_forms_agree_away_from_underflow() {
        for x in [1.5, 2.0, 4.0, 8.0] {
            let a = closed_forms::ce32_l(x);
            let b = closed_forms::ce32_l_cancelled(x);
            assert!((a - b).abs() < 1e-9 * b, "{x}: {a} vs {b}");
        }
    }
}
