//! Relative ageing of coherent systems with dependent, identically
//! distributed components.
//!
//! A coherent system built from `n` exchangeably dependent components has
//! survival `h(F̄(x))`, where `F̄` is the common component survival function
//! and `h` is the system's dual distortion. This crate builds `h` from a
//! structure function and a survival copula, composes it with parametric
//! component lifetimes, and decides ageing-faster relations (in hazard and
//! reversed hazard rate) between systems, redundancy placements, and used
//! systems by grid-certified monotonicity checks.
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`structures`] | minimal path sets and `k`-out-of-`n` structures |
//! | [`copulas`] | exchangeable survival copulas, Archimedean generators, sampling |
//! | [`distortion`] | dual distortions, the `H`/`R` functionals, redundancy transforms |
//! | [`lifetimes`] | Weibull / Fréchet marginals and system-level lifetime models |
//! | [`monotone`] | the monotonicity engine |
//! | [`orders`] | stochastic and ageing-faster order checkers |
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature.
#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

pub mod betainc;
pub mod copulas;
pub mod distortion;
pub mod lifetimes;
pub(crate) mod math;
pub mod monotone;
pub mod orders;
pub mod polynomial;
pub mod structures;

mod bernstein;

pub use copulas::{CopulaError, CopulaFamily, Generator, SurvivalCopula};
pub use distortion::{Distortion, DistortionError, FunctionalValues, Level, RedundancyLevel};
pub use lifetimes::{LifetimeError, LifetimeModel, Marginal, ResidualKind};
pub use monotone::{MonotoneConfig, Monotonicity, MonotonicityVerdict, Spacing};
pub use orders::{ConditionReport, Mode, Order, OrderError, OrderVerdict, Overall};
pub use structures::{StructureError, StructureFunction, StructureSpec};
