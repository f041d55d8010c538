//! Dense polynomials in the monomial basis, used to expose exact
//! coefficients of polynomial distortions and their transforms.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::binomial;

/// `Σ c_i p^i`, ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The identity `p`.
    pub fn x() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(0.0);
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        Self::new((0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(1.0);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self(inner(p))`, by Horner's scheme over polynomials.
    pub fn compose(&self, inner: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::constant(0.0), |acc, &c| acc.mul(inner).add(&Self::constant(c)))
    }

    /// Converts Bernstein coefficients `b_i` of degree `N` to monomial form.
    pub fn from_bernstein(b: &[f64]) -> Self {
        // Σ_i b_i C(N,i) p^i (1-p)^(N-i) = Σ_k p^k C(N,k) Σ_{i<=k} (-1)^(k-i) C(k,i) b_i
        let n = b.len() - 1;
        let coeffs = (0..=n)
            .map(|k| {
                let inner: f64 = (0..=k)
                    .map(|i| {
                        let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
                        sign * binomial(k, i) * b[i]
                    })
                    .sum();
                binomial(n, k) * inner
            })
            .collect();
        Self::new(coeffs)
    }

    /// Bernstein coefficients of degree `max(degree, min_degree)`.
    pub fn to_bernstein(&self, min_degree: usize) -> Vec<f64> {
        // b_i = Σ_{k<=i} C(i,k)/C(N,k) a_k
        let n = self.degree().max(min_degree);
        (0..=n)
            .map(|i| {
                (0..=i.min(self.degree()))
                    .map(|k| binomial(i, k) / binomial(n, k) * self.coeffs[k])
                    .sum()
            })
            .collect()
    }
}
