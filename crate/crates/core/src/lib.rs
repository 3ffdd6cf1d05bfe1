// Copyright 2026 The cavity-discord Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum mutual information, classical correlation and discord of two
//! atoms, each dispersively coupled to its own lossy cavity that starts in a
//! coherent state.
//!
//! All times are the scaled `tau = Omega t` and the decay enters only through
//! `kappa = k / Omega`. Entropies are in bits.

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod correlations;
pub mod error;
pub mod format;
pub mod lindblad;
pub mod measurement;
pub mod scenario;
pub mod statespace;

pub use analysis::{
    find_transitions, stationary_values, sweep, Family, StationaryReport, TransitionReport,
};
pub use channel::{coherence_factor, reduced_state, CoherenceFactor};
pub use correlations::{discord_closed, CorrelationTriple};
pub use error::{Error, Result};
pub use statespace::{ChannelParams, TwoQubitDensityMatrix, XStateParams};
