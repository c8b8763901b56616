//! Rank statistics on the Kemeny metric.
//!
//! The crate measures association between paired samples through
//! integer pair counts: an exact distance between orderings, the
//! correlation estimators built from it, Studentised tests with
//! small-sample continuity handling, exhaustive small-n population
//! oracles for validating the closed forms, and seeded Monte Carlo
//! and bootstrap harnesses whose output is independent of worker
//! count.
//!
//! Quick tour:
//!
//! ```
//! use kemeny::sample::Sample;
//! use kemeny::kernel::kemeny_distance;
//! use kemeny::estimators::tau_kappa;
//! use kemeny::inference::{tau_wald_test, CorrectionPolicy};
//!
//! let x = Sample::new(vec![1.0, 2.0, 2.0, 4.0]).unwrap();
//! let y = Sample::new(vec![1.5, 0.5, 3.0, 4.0]).unwrap();
//! assert_eq!(kemeny_distance(&x, &y).unwrap(), 3);
//! let tau = tau_kappa(&x, &y).unwrap();
//! assert!(tau.estimate > 0.0);
//! let test = tau_wald_test(&x, &y, CorrectionPolicy::example_consistent()).unwrap();
//! assert!(test.p_value > 0.0 && test.p_value < 1.0);
//! ```

pub mod data;
pub mod dist;
pub mod engine;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod kernel;
pub mod oracle;
pub mod sample;
pub mod simulation;

mod special;

pub use error::{Error, Result};
pub use sample::Sample;
