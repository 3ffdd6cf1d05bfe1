// Copyright 2026 The cavity-discord Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form mutual information, classical correlation and discord of the
//! dephased X states, in bits.
//!
//! Both marginals stay maximally mixed, so `I = 2 - S(rho_AB)`. The classical
//! correlation obtained by measuring atom B is `1 - H2((1 + m) / 2)` with
//! `m = max{|c3|, |F|^2 max(|c1|, |c2|)}`.

use serde::Serialize;

use crate::channel::spectrum;
use crate::error::{Error, Result};
use crate::statespace::{TwoQubitDensityMatrix, WernerParams, XStateParams, POSITIVITY_TOL};

/// `(I, C, Q)` in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationTriple {
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
}

impl CorrelationTriple {
    /// Builds the triple with `discord = mutual_info - classical`, clamping
    /// rounding-level negatives to zero.
    pub fn from_parts(mutual_info: f64, classical: f64) -> Self {
        Self {
            mutual_info: clamp_rounding(mutual_info),
            classical: clamp_rounding(classical),
            discord: clamp_rounding(mutual_info - classical),
        }
    }

    pub fn zero() -> Self {
        Self {
            mutual_info: 0.0,
            classical: 0.0,
            discord: 0.0,
        }
    }
}

fn clamp_rounding(x: f64) -> f64 {
    if x < 0.0 && x >= -POSITIVITY_TOL {
        0.0
    } else {
        x
    }
}

/// `-x log2 x`, with `0 log 0 = 0` and tiny negatives treated as zero.
pub(crate) fn neg_x_log2_x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy of a probability vector, in bits.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| neg_x_log2_x(p)).sum()
}

pub(crate) fn h2(p: f64) -> f64 {
    neg_x_log2_x(p) + neg_x_log2_x(1.0 - p)
}

/// `H2(p) = -p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-POSITIVITY_TOL..=1.0 + POSITIVITY_TOL).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    Ok(h2(p.clamp(0.0, 1.0)))
}

/// Entropy of the qubit state with Bloch-vector length `eta`:
/// `R(eta) = H2((1 + eta) / 2)`.
pub fn conditional_entropy_of_eta(eta: f64) -> Result<f64> {
    if !(-POSITIVITY_TOL..=1.0 + POSITIVITY_TOL).contains(&eta) {
        return Err(Error::OutOfRange {
            name: "eta",
            value: eta,
            range: "[0, 1]",
        });
    }
    Ok(h2((1.0 + eta.clamp(0.0, 1.0)) / 2.0))
}

pub fn von_neumann_entropy(rho: &TwoQubitDensityMatrix) -> f64 {
    shannon_entropy(&rho.eigenvalues())
}

/// `I = 2 + sum_i lambda_i log2 lambda_i` over the reduced-state spectrum.
pub fn mutual_information(c: &XStateParams, abs2: f64) -> f64 {
    2.0 - shannon_entropy(&spectrum(c, abs2))
}

/// Largest Bloch-vector length reachable from the coherences,
/// `|F|^2 max(|c1|, |c2|)`.
pub fn w_factor(c: &XStateParams, abs2: f64) -> f64 {
    abs2 * c.max_transverse()
}

/// `m = max{|c3|, W}`.
pub fn optimal_eta(c: &XStateParams, abs2: f64) -> f64 {
    c.c3.abs().max(w_factor(c, abs2))
}

/// `(1+x)/2 log2(1+x) + (1-x)/2 log2(1-x)`, i.e. `1 - H2((1+x)/2)`.
fn paired_log(m: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { x / 2.0 * x.log2() };
    term(1.0 - m) + term(1.0 + m)
}

pub fn classical_correlation_closed(c: &XStateParams, abs2: f64) -> f64 {
    paired_log(optimal_eta(c, abs2))
}

pub fn discord_closed(c: &XStateParams, abs2: f64) -> CorrelationTriple {
    CorrelationTriple::from_parts(
        mutual_information(c, abs2),
        classical_correlation_closed(c, abs2),
    )
}

/// Explicit expressions for `c = (1, -c3, c3)`.
pub fn frozen_family_correlations(c3: f64, abs2: f64) -> CorrelationTriple {
    let mutual_info = paired_log(c3) + paired_log(abs2);
    let m = c3.abs().max(abs2);
    CorrelationTriple::from_parts(mutual_info, paired_log(m))
}

/// Werner family `c1 = c2 = c3 = -r`. The spectrum is `(1-r)/4` (twice) and
/// `(1 + r +- 2 r |F|^2) / 4`; since `|F|^2 <= 1` the optimal Bloch length is
/// always `r` and the classical correlation never moves.
pub fn werner_correlations(r: f64, abs2: f64) -> Result<CorrelationTriple> {
    let WernerParams { r } = WernerParams::new(r)?;
    let spectrum = [
        (1.0 - r) / 4.0,
        (1.0 - r) / 4.0,
        (1.0 + r + 2.0 * r * abs2) / 4.0,
        (1.0 + r - 2.0 * r * abs2) / 4.0,
    ];
    let mutual_info = 2.0 - shannon_entropy(&spectrum);
    let n = r.max(r * abs2);
    Ok(CorrelationTriple::from_parts(mutual_info, paired_log(n)))
}
