//! Wireless energy transfer by energy beamforming from estimated backscatter
//! channels.
//!
//! An energy transmitter with `M` antennas learns the concatenated
//! forward-backward channel of each of `K` backscatter receivers by LS
//! estimation, then beams energy to them. This crate provides
//!
//! - closed-form harvested energy and its bounds ([`energy`]),
//! - a Monte Carlo simulator of the same system used as an oracle ([`montecarlo`]),
//! - the allocation solvers for single-receiver, weighted-sum and
//!   proportional-fair objectives ([`allocator`]),
//! - scenario files and CSV/JSON output ([`config`], [`report`]).

pub mod allocator;
pub mod channel;
pub mod config;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod montecarlo;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod specfun;

pub use error::{Result, WetError};
pub use scenario::{Allocation, ErProfile, PathLossModel, Scenario};
