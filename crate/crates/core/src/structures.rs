//! Coherent structure functions described by minimal path sets, with
//! `k`-out-of-`n` kept symbolic.

use alloc::vec::Vec;
use thiserror::Error;

use crate::math::binomial_i128;

/// `k`-out-of-`n` path sets are only materialized up to this many components.
pub const ENUMERATION_CAP: usize = 12;

/// Path-set structures are stored as bit masks.
pub const MAX_COMPONENTS: usize = 64;

/// Largest number of path sets accepted for inclusion–exclusion (`2^r <= 2^20`).
pub const MAX_PATH_SETS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("structure has no path sets")]
    EmptyPathSets,
    #[error("path set {subset} is contained in path set {superset}")]
    NonMinimalPathSet { subset: usize, superset: usize },
    #[error("component {index} appears in no path set")]
    IrrelevantComponent { index: usize },
    #[error("component index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("threshold k={k} outside 1..={n}")]
    BadThreshold { k: usize, n: usize },
    #[error("structure needs at least one component")]
    NoComponents,
    #[error("{n} components exceed the path-set limit of {max}")]
    TooManyComponents { n: usize, max: usize },
    #[error("state vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{count} path sets exceed the inclusion-exclusion limit of {max}")]
    PathSetExplosion { count: usize, max: usize },
}

/// Unvalidated structure description, as read from a system file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureSpec {
    /// Minimal path sets over components `1..=n`.
    PathSets { n: usize, path_sets: Vec<Vec<usize>> },
    KOutOfN { k: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Form {
    PathSets(Vec<u64>),
    KOutOfN(usize),
}

/// A validated coherent structure function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureFunction {
    n: usize,
    form: Form,
}

/// Validates a structure description.
pub fn build_structure(spec: &StructureSpec) -> Result<StructureFunction, StructureError> {
    match spec {
        StructureSpec::KOutOfN { k, n } => StructureFunction::k_out_of_n(*k, *n),
        StructureSpec::PathSets { n, path_sets } => StructureFunction::from_path_sets(*n, path_sets),
    }
}

impl StructureFunction {
    pub fn k_out_of_n(k: usize, n: usize) -> Result<Self, StructureError> {
        if n == 0 {
            return Err(StructureError::NoComponents);
        }
        if k == 0 || k > n {
            return Err(StructureError::BadThreshold { k, n });
        }
        Ok(Self { n, form: Form::KOutOfN(k) })
    }

    pub fn series(n: usize) -> Result<Self, StructureError> {
        Self::k_out_of_n(n, n)
    }

    pub fn parallel(n: usize) -> Result<Self, StructureError> {
        Self::k_out_of_n(1, n)
    }

    /// Builds a structure from 1-based minimal path sets. Non-minimal input is
    /// rejected rather than reduced.
    pub fn from_path_sets<S: AsRef<[usize]>>(n: usize, path_sets: &[S]) -> Result<Self, StructureError> {
        if n == 0 {
            return Err(StructureError::NoComponents);
        }
        if n > MAX_COMPONENTS {
            return Err(StructureError::TooManyComponents { n, max: MAX_COMPONENTS });
        }
        if path_sets.is_empty() {
            return Err(StructureError::EmptyPathSets);
        }
        let mut masks = Vec::with_capacity(path_sets.len());
        for set in path_sets {
            let set = set.as_ref();
            if set.is_empty() {
                return Err(StructureError::EmptyPathSets);
            }
            let mut mask = 0u64;
            for &index in set {
                if index == 0 || index > n {
                    return Err(StructureError::IndexOutOfRange { index, n });
                }
                mask |= 1u64 << (index - 1);
            }
            masks.push(mask);
        }
        for (i, &a) in masks.iter().enumerate() {
            for (j, &b) in masks.iter().enumerate() {
                if i != j && a & b == a && (a != b || i > j) {
                    return Err(StructureError::NonMinimalPathSet { subset: i, superset: j });
                }
            }
        }
        let covered = masks.iter().fold(0u64, |acc, m| acc | m);
        for index in 1..=n {
            if covered & (1u64 << (index - 1)) == 0 {
                return Err(StructureError::IrrelevantComponent { index });
            }
        }
        Ok(Self { n, form: Form::PathSets(masks) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The threshold `k` when the structure is a symbolic `k`-out-of-`n`.
    pub fn threshold(&self) -> Option<usize> {
        match self.form {
            Form::KOutOfN(k) => Some(k),
            Form::PathSets(_) => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.form, Form::KOutOfN(_))
    }

    /// Minimal path sets as 1-based index lists. `None` for a `k`-out-of-`n`
    /// structure above [`ENUMERATION_CAP`] components.
    pub fn path_sets(&self) -> Option<Vec<Vec<usize>>> {
        let masks = self.path_masks()?;
        Some(
            masks
                .iter()
                .map(|&m| (0..self.n).filter(|i| m & (1u64 << i) != 0).map(|i| i + 1).collect())
                .collect(),
        )
    }

    fn path_masks(&self) -> Option<Vec<u64>> {
        match &self.form {
            Form::PathSets(m) => Some(m.clone()),
            Form::KOutOfN(k) => {
                if self.n > ENUMERATION_CAP {
                    return None;
                }
                Some((0u64..(1u64 << self.n)).filter(|m| m.count_ones() as usize == *k).collect())
            }
        }
    }

    /// Evaluates the structure on a binary state vector (`true` = working).
    pub fn evaluate(&self, states: &[bool]) -> Result<bool, StructureError> {
        if states.len() != self.n {
            return Err(StructureError::LengthMismatch { expected: self.n, got: states.len() });
        }
        let up = states
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &s)| if s { acc | (1u64 << i) } else { acc });
        Ok(self.evaluate_mask(up))
    }

    pub(crate) fn evaluate_mask(&self, up: u64) -> bool {
        match &self.form {
            Form::KOutOfN(k) => up.count_ones() as usize >= *k,
            Form::PathSets(masks) => masks.iter().any(|&m| up & m == m),
        }
    }

    /// Inclusion–exclusion weights `a_j`, `j = 0..=n`: for an exchangeable
    /// survival copula, `h(p) = Σ_j a_j K(p,…,p,1,…,1)` with `j` entries equal
    /// to `p`.
    pub fn union_weights(&self) -> Result<Vec<i128>, StructureError> {
        let n = self.n;
        match &self.form {
            Form::KOutOfN(k) => {
                let k = *k;
                let mut weights = alloc::vec![0i128; n + 1];
                for (j, w) in weights.iter_mut().enumerate().skip(k) {
                    let sign = if (j - k) % 2 == 0 { 1 } else { -1 };
                    *w = sign * binomial_i128(j - 1, k - 1) * binomial_i128(n, j);
                }
                Ok(weights)
            }
            Form::PathSets(masks) if masks.len() <= MAX_PATH_SETS => {
                let mut weights = alloc::vec![0i128; n + 1];
                accumulate_unions(masks, 0, 0, 0, &mut weights);
                Ok(weights)
            }
            Form::PathSets(_) => {
                // a_j = Σ_{i<=j} (-1)^{j-i} C(n-i, j-i) count_i
                let counts = self.enumerate_states()?;
                Ok((0..=n)
                    .map(|j| {
                        (0..=j)
                            .map(|i| {
                                let sign = if (j - i) % 2 == 0 { 1 } else { -1 };
                                sign * binomial_i128(n - i, j - i) * counts[i]
                            })
                            .sum()
                    })
                    .collect())
            }
        }
    }

    /// Number of working states with exactly `i` components up, `i = 0..=n`.
    /// Equivalently, the scaled Bernstein coefficients of the reliability
    /// polynomial under independence.
    pub fn working_state_counts(&self) -> Result<Vec<i128>, StructureError> {
        let n = self.n;
        match &self.form {
            Form::KOutOfN(k) => Ok((0..=n).map(|i| if i >= *k { binomial_i128(n, i) } else { 0 }).collect()),
            Form::PathSets(masks) if masks.len() <= MAX_PATH_SETS => {
                let weights = self.union_weights()?;
                Ok((0..=n)
                    .map(|i| (0..=i).map(|j| weights[j] * binomial_i128(n - j, i - j)).sum())
                    .collect())
            }
            Form::PathSets(_) => self.enumerate_states(),
        }
    }

    fn enumerate_states(&self) -> Result<Vec<i128>, StructureError> {
        let n = self.n;
        if n > MAX_PATH_SETS {
            let count = match &self.form {
                Form::PathSets(m) => m.len(),
                Form::KOutOfN(_) => 0,
            };
            return Err(StructureError::PathSetExplosion { count, max: MAX_PATH_SETS });
        }
        let mut counts = alloc::vec![0i128; n + 1];
        for up in 0u64..(1u64 << n) {
            if self.evaluate_mask(up) {
                counts[up.count_ones() as usize] += 1;
            }
        }
        Ok(counts)
    }
}

fn accumulate_unions(masks: &[u64], start: usize, union: u64, chosen: usize, weights: &mut [i128]) {
    for i in start..masks.len() {
        let u = union | masks[i];
        let size = chosen + 1;
        weights[u.count_ones() as usize] += if size % 2 == 1 { 1 } else { -1 };
        accumulate_unions(masks, i + 1, u, size, weights);
    }
}
