// Copyright 2026 The cavity-discord Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::statespace::PhysicalityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rejected X-state parameters: {0}")]
    Unphysical(PhysicalityReport),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("Fock dimension {dim} leaves a coherent-state tail of {tail:e} for |alpha|^2 = {mean_photons}")]
    TruncationTooSmall {
        dim: usize,
        mean_photons: f64,
        tail: f64,
    },

    #[error("step {step} is unstable: trace drift {drift:e} at tau = {tau}")]
    StepSize { step: f64, drift: f64, tau: f64 },

    #[error("stationary limit needs kappa > 0; without damping |F|^2 oscillates forever")]
    NoDissipation,
}
