//! Thin wrappers over `libm` so the numeric code reads the same with or
//! without `std`.

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Integer power by repeated squaring; `powi(0, 0) == 1`.
pub(crate) fn powi(mut base: f64, mut e: u32) -> f64 {
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// `ln p` given both `p` and its complement `q = 1 - p`, picking the
/// representation that does not lose digits near `p = 1`.
#[inline]
pub(crate) fn ln_from_pair(p: f64, q: f64) -> f64 {
    if p < 0.5 {
        ln(p)
    } else {
        ln_1p(-q)
    }
}

/// Exact binomial coefficient as `i128`. Panics on overflow, which cannot
/// happen for the degrees this crate builds (`n <= 120`).
pub(crate) fn binomial_i128(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as i128)
            .expect("binomial coefficient overflow")
            / (i as i128 + 1);
    }
    acc
}

/// Binomial coefficient in floating point (multiplicative form).
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_agree() {
        for n in 0..40 {
            for k in 0..=n {
                let exact = binomial_i128(n, k) as f64;
                let approx = binomial(n, k);
                assert!((exact - approx).abs() <= 1e-12 * exact, "C({n},{k})");
            }
        }
        assert_eq!(binomial_i128(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn powi_matches_repeated_product() {
        assert_eq!(powi(0.0, 0), 1.0);
        assert_eq!(powi(0.5, 3), 0.125);
        assert!((powi(1.1, 17) - 1.1f64.powi(17)).abs() < 1e-12);
    }

    #[test]
    fn ln_from_pair_keeps_digits_near_one() {
        let q = 1e-12;
        let p = 1.0 - q;
        let v = ln_from_pair(p, q);
        assert!((v + 1e-12).abs() < 1e-24);
    }
}
