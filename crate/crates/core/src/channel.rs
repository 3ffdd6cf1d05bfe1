// Copyright 2026 The cavity-discord Authors
// SPDX-License-Identifier: Apache-2.0

//! The dephasing channel seen by the atoms.
//!
//! Each cavity starts in `|alpha>` and is pulled toward `|alpha_+(tau)>` or
//! `|alpha_-(tau)>` depending on the atom being excited or ground, with
//! `alpha_pm(tau) = alpha exp(-(kappa +- i) tau)`. Tracing the cavities out
//! leaves the atomic populations alone and multiplies every single-atom
//! coherence by the complex factor `F(tau) = f(tau) chi(tau)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statespace::{
    validate_physicality, x_matrix, ChannelParams, TwoQubitDensityMatrix, XStateParams,
};

/// `F(tau)` together with `|F(tau)|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceFactor {
    pub value: Complex64,
    pub abs2: f64,
}

impl CoherenceFactor {
    pub fn new(value: Complex64) -> Self {
        Self {
            value,
            abs2: value.norm_sqr(),
        }
    }

    /// `F(0)`.
    pub fn unit() -> Self {
        Self::new(Complex64::new(1.0, 0.0))
    }
}

/// Damping prefactor of the `|e><g|` cavity block:
///
/// `f = exp{-i tau + |alpha|^2 (e^{-2 kappa tau} - 1)}
///      * exp{|alpha|^2 kappa / (kappa + i) * (1 - e^{-2 (kappa + i) tau})}`.
pub fn f_factor(tau: f64, params: &ChannelParams) -> Complex64 {
    debug_assert!(tau >= 0.0, "tau must be non-negative");
    let n = params.mean_photons();
    let kappa = params.kappa;
    let i = Complex64::i();
    let rate = Complex64::new(kappa, 1.0);
    let first = -i * tau + n * ((-2.0 * kappa * tau).exp() - 1.0);
    let second = (n * kappa) / rate * (1.0 - (-2.0 * rate * tau).exp());
    (first + second).exp()
}

/// `chi = <alpha_-(tau)|alpha_+(tau)>`.
///
/// Both amplitudes have modulus `|alpha| e^{-kappa tau}` and
/// `conj(alpha_-) alpha_+ = |alpha|^2 e^{-2 (kappa + i) tau}`, so the
/// coherent-state overlap collapses to
/// `exp{|alpha|^2 e^{-2 kappa tau} (e^{-2 i tau} - 1)}`.
pub fn chi_overlap(tau: f64, params: &ChannelParams) -> Complex64 {
    debug_assert!(tau >= 0.0, "tau must be non-negative");
    let n_t = params.mean_photons() * (-2.0 * params.kappa * tau).exp();
    let phase = Complex64::from_polar(1.0, -2.0 * tau);
    (n_t * (phase - 1.0)).exp()
}

pub fn coherence_factor(tau: f64, params: &ChannelParams) -> CoherenceFactor {
    if tau == 0.0 {
        return CoherenceFactor::unit();
    }
    CoherenceFactor::new(f_factor(tau, params) * chi_overlap(tau, params))
}

/// `lim_{tau -> inf} |F(tau)|^2 = exp(-2 |alpha|^2 / (1 + kappa^2))`.
///
/// Only meaningful for `kappa > 0`; at `kappa = 0` this is merely the value
/// of `|f|^2`, and `|chi|^2` never settles.
pub fn stationary_abs2(params: &ChannelParams) -> f64 {
    (-2.0 * params.mean_photons() / (1.0 + params.kappa * params.kappa)).exp()
}

/// Reduced atomic state at scaled time `tau`.
pub fn reduced_state(
    c: &XStateParams,
    tau: f64,
    params: &ChannelParams,
) -> Result<TwoQubitDensityMatrix> {
    reduced_state_with_factor(c, &coherence_factor(tau, params))
}

/// Reduced atomic state for an arbitrary coherence factor.
pub fn reduced_state_with_factor(
    c: &XStateParams,
    factor: &CoherenceFactor,
) -> Result<TwoQubitDensityMatrix> {
    validate_physicality(c).map_err(Error::Unphysical)?;
    TwoQubitDensityMatrix::new(x_matrix(c, factor.value))
}

/// Eigenvalues of the reduced state as a function of `abs2 = |F|^2`:
/// `[(1-c3) +- abs2 (c1+c2)] / 4` followed by `[(1+c3) +- abs2 (c1-c2)] / 4`.
pub fn spectrum(c: &XStateParams, abs2: f64) -> [f64; 4] {
    let XStateParams { c1, c2, c3 } = *c;
    [
        ((1.0 - c3) + abs2 * (c1 + c2)) / 4.0,
        ((1.0 - c3) - abs2 * (c1 + c2)) / 4.0,
        ((1.0 + c3) + abs2 * (c1 - c2)) / 4.0,
        ((1.0 + c3) - abs2 * (c1 - c2)) / 4.0,
    ]
}
