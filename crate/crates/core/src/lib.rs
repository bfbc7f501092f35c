//! Exact fixed-point statistics for actions of the symmetric group.
//!
//! Every quantity that can be computed exactly is carried as a
//! [`Rational`] or a [`BigUint`]; the few floating constants carry an
//! explicit error bound. Small-degree results can be checked against the
//! brute-force tables in [`oracle`].

pub mod actions;
pub mod distributions;
pub mod error;
pub mod interval;
pub mod limits;
pub mod oracle;
pub mod partitions;
pub mod perm;
pub mod rational;
pub mod reproduce;
pub mod rng;
pub mod samplers;
pub mod series;
pub mod shuffle;
pub mod special;

pub use actions::FixedPointCount;
pub use distributions::{Action, ExactDistribution, RankBounds};
pub use error::{Error, Result};
pub use limits::CertifiedReal;
pub use num_bigint::BigUint;
pub use partitions::CycleType;
pub use perm::Permutation;
pub use rational::Rational;
pub use samplers::{ChoiceTreeResult, PayneVariant, Start};
pub use series::{AsymptoticConstant, PowerSeries};
pub use shuffle::ShuffleChain;

/// Version string embedded in every machine-readable artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
