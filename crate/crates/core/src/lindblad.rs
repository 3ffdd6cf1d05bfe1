// Copyright 2026 The cavity-discord Authors
// SPDX-License-Identifier: Apache-2.0

//! Truncated-Fock integration of the zero-temperature master equation, used
//! to check the analytic reduced state.
//!
//! The interaction `V = sum_i [(n_i + 1)|e><e|_i - n_i |g><g|_i]` is diagonal
//! in the atomic basis and cavity losses act on the fields only, so every
//! atomic matrix element `|a><b|` of one atom carries its own cavity operator
//! `X_ab` obeying
//!
//! `dX_ab/dtau = -i (H_a X_ab - X_ab H_b) + kappa (2 a X_ab a^+ - n X_ab - X_ab n)`
//!
//! with `H_e = n + 1`, `H_g = -n`. The joint state never needs to be
//! assembled: the reduced two-atom element is the initial element times
//! `tr X_{a_A b_A} * tr X_{a_B b_B}`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::statespace::{
    validate_physicality, x_state_density, ChannelParams, TwoQubitDensityMatrix, XStateParams,
};

/// Largest coherent-state population allowed beyond the truncation.
pub const TAIL_BOUND: f64 = 1e-12;
/// Trace drift that marks an integration as unstable.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-8;
pub const MIN_DEFAULT_DIM: usize = 20;

/// Photon levels `0..dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation {
    pub dim: usize,
}

/// Poisson weight of levels `>= dim` in `|alpha>`.
pub fn coherent_tail(mean_photons: f64, dim: usize) -> f64 {
    if mean_photons == 0.0 {
        return if dim >= 1 { 0.0 } else { 1.0 };
    }
    // sum upward from the first omitted level; avoids 1 - (almost 1)
    let ln_first = -mean_photons + dim as f64 * mean_photons.ln() - ln_factorial(dim);
    let mut term = ln_first.exp();
    let mut sum = 0.0;
    let mut n = dim;
    while term > sum * 1e-17 || n < dim + 10 {
        sum += term;
        n += 1;
        term *= mean_photons / n as f64;
        if n > dim + 10_000 {
            break;
        }
    }
    sum
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

impl FockTruncation {
    /// Checked truncation for the cavity amplitude in `params`.
    pub fn new(dim: usize, params: &ChannelParams) -> Result<Self> {
        let tail = coherent_tail(params.mean_photons(), dim);
        if dim < 2 || tail >= TAIL_BOUND {
            return Err(Error::TruncationTooSmall {
                dim,
                mean_photons: params.mean_photons(),
                tail,
            });
        }
        Ok(Self { dim })
    }

    /// Smallest dimension meeting `TAIL_BOUND`, but at least 20.
    pub fn for_params(params: &ChannelParams) -> Self {
        let mut dim = MIN_DEFAULT_DIM;
        while coherent_tail(params.mean_photons(), dim) >= TAIL_BOUND {
            dim += 1;
        }
        Self { dim }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomLevel {
    Excited,
    Ground,
}

impl AtomLevel {
    pub const ALL: [AtomLevel; 2] = [AtomLevel::Excited, AtomLevel::Ground];

    /// Dispersive energy of the cavity with `n` photons, in units of Omega.
    fn energy(self, n: usize) -> f64 {
        match self {
            AtomLevel::Excited => n as f64 + 1.0,
            AtomLevel::Ground => -(n as f64),
        }
    }
}

/// Generator of one cavity block `X_ab`, stored row-major.
///
/// `(a X a^+)_{mn} = sqrt((m+1)(n+1)) X_{m+1,n+1}` and the number operator is
/// diagonal, so the right-hand side is a banded elementwise map.
#[derive(Debug, Clone)]
pub struct BlockGenerator {
    pub dim: usize,
    pub row: AtomLevel,
    pub col: AtomLevel,
    diagonal: Vec<Complex64>,
    feed: Vec<f64>,
}

impl BlockGenerator {
    pub fn new(row: AtomLevel, col: AtomLevel, kappa: f64, dim: usize) -> Self {
        let mut diagonal = Vec::with_capacity(dim * dim);
        let mut feed = Vec::with_capacity(dim * dim);
        for m in 0..dim {
            for n in 0..dim {
                let detuning = row.energy(m) - col.energy(n);
                diagonal.push(Complex64::new(-kappa * (m + n) as f64, -detuning));
                feed.push(if m + 1 < dim && n + 1 < dim {
                    2.0 * kappa * (((m + 1) * (n + 1)) as f64).sqrt()
                } else {
                    0.0
                });
            }
        }
        Self {
            dim,
            row,
            col,
            diagonal,
            feed,
        }
    }

    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for m in 0..d {
            for n in 0..d {
                let k = m * d + n;
                let mut v = self.diagonal[k] * x[k];
                if self.feed[k] != 0.0 {
                    v += x[k + d + 1] * self.feed[k];
                }
                out[k] = v;
            }
        }
    }
}

/// The four generators `X_ee, X_eg, X_ge, X_gg` of one cavity.
pub fn build_superoperator_blocks(
    params: &ChannelParams,
    truncation: FockTruncation,
) -> [BlockGenerator; 4] {
    let k = params.kappa;
    let d = truncation.dim;
    use AtomLevel::*;
    [
        BlockGenerator::new(Excited, Excited, k, d),
        BlockGenerator::new(Excited, Ground, k, d),
        BlockGenerator::new(Ground, Excited, k, d),
        BlockGenerator::new(Ground, Ground, k, d),
    ]
}

/// `|alpha><alpha|` in the truncated basis, row-major.
pub fn coherent_projector(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut amp = Vec::with_capacity(dim);
    let mut a = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            a = a * alpha / (n as f64).sqrt();
        }
        amp.push(a);
    }
    let mut out = Vec::with_capacity(dim * dim);
    for m in 0..dim {
        for n in 0..dim {
            out.push(amp[m] * amp[n].conj());
        }
    }
    out
}

fn trace(x: &[Complex64], dim: usize) -> Complex64 {
    (0..dim).map(|i| x[i * dim + i]).sum()
}

/// Classical fourth-order Runge-Kutta step in place.
fn rk4_step(gen: &BlockGenerator, x: &mut [Complex64], h: f64, scratch: &mut [Vec<Complex64>; 5]) {
    let [k1, k2, k3, k4, tmp] = scratch;
    gen.apply(x, k1);
    for i in 0..x.len() {
        tmp[i] = x[i] + k1[i] * (h / 2.0);
    }
    gen.apply(tmp, k2);
    for i in 0..x.len() {
        tmp[i] = x[i] + k2[i] * (h / 2.0);
    }
    gen.apply(tmp, k3);
    for i in 0..x.len() {
        tmp[i] = x[i] + k3[i] * h;
    }
    gen.apply(tmp, k4);
    for i in 0..x.len() {
        x[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Fock dimension; `None` picks [`FockTruncation::for_params`].
    pub fock_dim: Option<usize>,
    pub step: f64,
    pub sample_interval: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            fock_dim: None,
            step: 1e-3,
            sample_interval: 0.01,
        }
    }
}

/// Traces `tr X_ab(tau)` of one cavity, indexed `[a][b]`, at each sample.
#[derive(Debug, Clone)]
pub struct CavityTraces {
    pub taus: Vec<f64>,
    pub traces: Vec<[[Complex64; 2]; 2]>,
    pub max_trace_drift: f64,
}

/// Integrate the four blocks of one cavity from `|alpha><alpha|`.
pub fn integrate_cavity(
    params: &ChannelParams,
    truncation: FockTruncation,
    tau_max: f64,
    config: &OracleConfig,
) -> Result<CavityTraces> {
    let h = config.step;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::OutOfRange {
            name: "step",
            value: h,
            range: "(0, inf)",
        });
    }
    if !(tau_max >= 0.0 && tau_max.is_finite()) {
        return Err(Error::OutOfRange {
            name: "tau_max",
            value: tau_max,
            range: "[0, inf)",
        });
    }
    let ratio = config.sample_interval / h;
    let steps_per_sample = ratio.round();
    if steps_per_sample < 1.0 || (ratio - steps_per_sample).abs() > 1e-6 {
        return Err(Error::OutOfRange {
            name: "sample_interval",
            value: config.sample_interval,
            range: "positive integer multiples of the step",
        });
    }
    let steps_per_sample = steps_per_sample as usize;
    let n_samples = (tau_max / config.sample_interval + 1e-9).floor() as usize + 1;
    let dim = truncation.dim;
    let initial = coherent_projector(params.alpha, dim);
    let initial_trace = trace(&initial, dim);

    let generators = build_superoperator_blocks(params, truncation);
    let per_block: Vec<Result<(Vec<Complex64>, f64)>> = generators
        .par_iter()
        .map(|gen| {
            let mut x = initial.clone();
            let mut scratch: [Vec<Complex64>; 5] =
                std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); dim * dim]);
            let mut samples = Vec::with_capacity(n_samples);
            let mut drift: f64 = 0.0;
            samples.push(trace(&x, dim));
            for s in 1..n_samples {
                for _ in 0..steps_per_sample {
                    rk4_step(gen, &mut x, h, &mut scratch);
                }
                let tr = trace(&x, dim);
                if gen.row == gen.col {
                    let d = (tr - initial_trace).norm();
                    drift = drift.max(d);
                    if !(d <= TRACE_DRIFT_LIMIT) {
                        return Err(Error::StepSize {
                            step: h,
                            drift: d,
                            tau: s as f64 * config.sample_interval,
                        });
                    }
                }
                samples.push(tr);
            }
            Ok((samples, drift))
        })
        .collect();

    let mut block_traces = Vec::with_capacity(4);
    let mut max_drift: f64 = 0.0;
    for r in per_block {
        let (samples, drift) = r?;
        max_drift = max_drift.max(drift);
        block_traces.push(samples);
    }
    let traces = (0..n_samples)
        .map(|s| {
            [
                [block_traces[0][s], block_traces[1][s]],
                [block_traces[2][s], block_traces[3][s]],
            ]
        })
        .collect();
    let taus = (0..n_samples)
        .map(|s| s as f64 * config.sample_interval)
        .collect();
    Ok(CavityTraces {
        taus,
        traces,
        max_trace_drift: max_drift,
    })
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub taus: Vec<f64>,
    pub states: Vec<TwoQubitDensityMatrix>,
    pub fock_dim: usize,
    pub max_trace_drift: f64,
}

/// Evolve `rho_atoms(0) x |alpha><alpha| x |alpha><alpha|` and return the
/// reduced atomic state every `sample_interval` on `[0, tau_max]`.
pub fn integrate(
    c: &XStateParams,
    params: &ChannelParams,
    tau_max: f64,
    config: &OracleConfig,
) -> Result<Trajectory> {
    validate_physicality(c).map_err(Error::Unphysical)?;
    let truncation = match config.fock_dim {
        Some(dim) => FockTruncation::new(dim, params)?,
        None => FockTruncation::for_params(params),
    };
    let initial = x_state_density(c)?.into_matrix();
    // the two cavities are identical, so one integration serves both
    let cavity = integrate_cavity(params, truncation, tau_max, config)?;
    let norm = trace_of_projector(params.alpha, truncation.dim);
    let states = cavity
        .traces
        .iter()
        .map(|t| {
            let m = Matrix4::from_fn(|row, col| {
                let (a_row, b_row) = (row / 2, row % 2);
                let (a_col, b_col) = (col / 2, col % 2);
                initial[(row, col)] * t[a_row][a_col] * t[b_row][b_col] / (norm * norm)
            });
            TwoQubitDensityMatrix::new(m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        taus: cavity.taus,
        states,
        fock_dim: truncation.dim,
        max_trace_drift: cavity.max_trace_drift,
    })
}

fn trace_of_projector(alpha: Complex64, dim: usize) -> Complex64 {
    trace(&coherent_projector(alpha, dim), dim)
}

/// Half the sum of singular values of `a - b`.
pub fn trace_distance(a: &TwoQubitDensityMatrix, b: &TwoQubitDensityMatrix) -> f64 {
    let diff = a.matrix() - b.matrix();
    0.5 * diff.singular_values().sum()
}
