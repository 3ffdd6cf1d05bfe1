// Copyright 2026 The cavity-discord Authors
// SPDX-License-Identifier: Apache-2.0

//! Brute-force maximization of the classical correlation over projective
//! measurements on atom B.
//!
//! The basis `{|theta_1>, |theta_2>}` with
//! `|theta_1> = cos(theta)|e> + e^{i phi} sin(theta)|g>` and
//! `|theta_2> = e^{-i phi} sin(theta)|e> - cos(theta)|g>` points along the
//! Bloch direction with polar angle `2 theta` and azimuth `phi`, so
//! `theta in [0, pi/2]`, `phi in [0, 2 pi)` covers every rank-one projective
//! measurement on a qubit.

use std::f64::consts::{FRAC_PI_2, PI};

use log::warn;
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::CoherenceFactor;
use crate::correlations::{
    classical_correlation_closed, discord_closed, h2, von_neumann_entropy, CorrelationTriple,
};
use crate::error::{Error, Result};
use crate::statespace::{TwoQubitDensityMatrix, XStateParams};

/// Numeric classical correlation may exceed the closed form by at most this
/// much before it counts as a violation of the analytic bound.
pub const BOUND_VIOLATION_TOL: f64 = 1e-9;

/// Ties between grid cells closer than this keep the earlier cell.
const TIE_TOL: f64 = 1e-14;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectorAngles {
    pub theta: f64,
    pub phi: f64,
}

impl ProjectorAngles {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// The two measurement kets, as coefficients on `(|e>, |g>)`.
    pub fn kets(&self) -> [Vector2<Complex64>; 2] {
        let (s, c) = self.theta.sin_cos();
        let e_phi = Complex64::from_polar(1.0, self.phi);
        [
            Vector2::new(Complex64::new(c, 0.0), e_phi * s),
            Vector2::new(e_phi.conj() * s, Complex64::new(-c, 0.0)),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalOutcome {
    pub probability: f64,
    /// Post-measurement state of atom A; zero when `probability == 0`.
    pub state: Matrix2<Complex64>,
}

impl ConditionalOutcome {
    /// Bloch-vector length of the normalized state.
    pub fn bloch_length(&self) -> f64 {
        bloch_length(&self.state)
    }

    pub fn entropy(&self) -> f64 {
        if self.probability <= 0.0 {
            0.0
        } else {
            h2((1.0 + self.bloch_length()) / 2.0)
        }
    }
}

/// `sqrt((rho_ee - rho_gg)^2 + 4 |rho_eg|^2)` for a unit-trace qubit state.
fn bloch_length(m: &Matrix2<Complex64>) -> f64 {
    let dz = m[(0, 0)].re - m[(1, 1)].re;
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    (dz * dz + 4.0 * off.norm_sqr()).sqrt().min(1.0)
}

/// Measure atom B in the basis given by `angles`. Outcome `k` has
/// probability `p_k = tr[(I x B_k) rho (I x B_k)]` and leaves atom A in
/// `tr_B[(I x B_k) rho (I x B_k)] / p_k`.
pub fn conditional_states(
    rho: &TwoQubitDensityMatrix,
    angles: &ProjectorAngles,
) -> [ConditionalOutcome; 2] {
    let m = rho.matrix();
    angles.kets().map(|v| {
        // <v|_B rho |v>_B, an operator on A
        let block = Matrix2::from_fn(|a, ap| {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..2 {
                for bp in 0..2 {
                    acc += v[b].conj() * m[(2 * a + b, 2 * ap + bp)] * v[bp];
                }
            }
            acc
        });
        let p = block.trace().re;
        if p <= 0.0 {
            ConditionalOutcome {
                probability: 0.0,
                state: Matrix2::zeros(),
            }
        } else {
            ConditionalOutcome {
                probability: p,
                state: block.unscale(p),
            }
        }
    })
}

/// `sum_k p_k S(rho_A^k)`.
pub fn measured_conditional_entropy(rho: &TwoQubitDensityMatrix, angles: &ProjectorAngles) -> f64 {
    conditional_states(rho, angles)
        .iter()
        .map(|o| o.probability * o.entropy())
        .sum()
}

/// Bloch length of either conditional state of the dephased X state,
///
/// `eta^2 = c3^2 cos^2(2 theta)
///        + |F|^4/4 [2(c1^2 + c2^2) + 2(c1^2 - c2^2) cos(2 phi + arg F^2)] sin^2(2 theta)`.
pub fn eta_value(c: &XStateParams, factor: &CoherenceFactor, angles: &ProjectorAngles) -> f64 {
    let XStateParams { c1, c2, c3 } = *c;
    let phase = if factor.abs2 > 0.0 {
        (factor.value * factor.value).arg()
    } else {
        0.0
    };
    let two_theta = 2.0 * angles.theta;
    let a4 = factor.abs2 * factor.abs2;
    let transverse = 2.0 * (c1 * c1 + c2 * c2)
        + 2.0 * (c1 * c1 - c2 * c2) * (2.0 * angles.phi + phase).cos();
    let eta2 = c3 * c3 * two_theta.cos().powi(2) + a4 / 4.0 * transverse * two_theta.sin().powi(2);
    eta2.max(0.0).sqrt()
}

/// Grid and refinement settings for [`maximize_classical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Points in `theta in [0, pi/2]`, endpoints included.
    pub grid_theta: usize,
    /// Points in `phi in [0, 2 pi)`.
    pub grid_phi: usize,
    /// Golden-section iterations per coordinate.
    pub refine_iters: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_theta: 181,
            grid_phi: 360,
            refine_iters: 40,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("grid_theta", self.grid_theta), ("grid_phi", self.grid_phi)] {
            if n < 8 {
                return Err(Error::OutOfRange {
                    name,
                    value: n as f64,
                    range: "[8, inf)",
                });
            }
        }
        Ok(())
    }

    fn theta_step(&self) -> f64 {
        FRAC_PI_2 / (self.grid_theta - 1) as f64
    }

    fn phi_step(&self) -> f64 {
        2.0 * PI / self.grid_phi as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalOptimum {
    /// `S(rho_A) - min sum_k p_k S(rho_A^k)`.
    pub classical: f64,
    pub conditional_entropy: f64,
    pub angles: ProjectorAngles,
}

/// Grid search over measurement bases followed by coordinate-wise
/// golden-section refinement around the best cell.
///
/// Grid rows are evaluated in parallel. Among (near-)equal cells the
/// lexicographically smallest `(theta, phi)` wins.
pub fn maximize_classical(
    rho: &TwoQubitDensityMatrix,
    config: &SearchConfig,
) -> Result<ClassicalOptimum> {
    config.validate()?;
    let d_theta = config.theta_step();
    let d_phi = config.phi_step();
    let objective = |theta: f64, phi: f64| {
        measured_conditional_entropy(rho, &ProjectorAngles::new(theta, phi))
    };

    let rows: Vec<(f64, usize)> = (0..config.grid_theta)
        .into_par_iter()
        .map(|i| {
            let theta = i as f64 * d_theta;
            let mut best = (f64::INFINITY, 0);
            for j in 0..config.grid_phi {
                let v = objective(theta, j as f64 * d_phi);
                if v < best.0 - TIE_TOL {
                    best = (v, j);
                }
            }
            best
        })
        .collect();

    let mut best = (f64::INFINITY, 0, 0);
    for (i, &(v, j)) in rows.iter().enumerate() {
        if v < best.0 - TIE_TOL {
            best = (v, i, j);
        }
    }
    let (mut value, i, j) = best;
    let mut theta = i as f64 * d_theta;
    let mut phi = j as f64 * d_phi;

    if config.refine_iters > 0 {
        for _sweep in 0..2 {
            let (p, v) = golden_min(|x| objective(theta, x), phi - d_phi, phi + d_phi, config.refine_iters);
            if v < value - TIE_TOL {
                phi = p.rem_euclid(2.0 * PI);
                value = v;
            }
            let lo = (theta - d_theta).max(0.0);
            let hi = (theta + d_theta).min(FRAC_PI_2);
            let (t, v) = golden_min(|x| objective(x, phi), lo, hi, config.refine_iters);
            if v < value - TIE_TOL {
                theta = t;
                value = v;
            }
        }
    }

    let marginal = h2((1.0 + bloch_length(&rho.reduced_a())) / 2.0);
    Ok(ClassicalOptimum {
        classical: marginal - value,
        conditional_entropy: value,
        angles: ProjectorAngles::new(theta, phi),
    })
}

/// Minimum of `f` on `[lo, hi]` by golden-section search.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let mut x1 = hi - INV_GOLDEN * (hi - lo);
    let mut x2 = lo + INV_GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Discord from dense entropies and the optimizer:
/// `I = S(rho_A) + S(rho_B) - S(rho_AB)`, `Q = I - C_numeric`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericDiscord {
    pub triple: CorrelationTriple,
    pub angles: ProjectorAngles,
}

pub fn discord_numeric(rho: &TwoQubitDensityMatrix, config: &SearchConfig) -> Result<NumericDiscord> {
    let optimum = maximize_classical(rho, config)?;
    let s_a = h2((1.0 + bloch_length(&rho.reduced_a())) / 2.0);
    let s_b = h2((1.0 + bloch_length(&rho.reduced_b())) / 2.0);
    let mutual_info = s_a + s_b - von_neumann_entropy(rho);
    Ok(NumericDiscord {
        triple: CorrelationTriple::from_parts(mutual_info, optimum.classical),
        angles: optimum.angles,
    })
}

/// Closed form against optimizer at one `(c, F)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormCheck {
    pub closed: CorrelationTriple,
    pub numeric: CorrelationTriple,
    pub angles: ProjectorAngles,
    pub discord_gap: f64,
}

/// Runs the optimizer on the state dressed by `factor` and compares with the
/// closed form. A numeric classical correlation above the closed-form value
/// means the analytic upper bound on `eta` failed, which is logged.
pub fn check_closed_form(
    c: &XStateParams,
    rho: &TwoQubitDensityMatrix,
    factor: &CoherenceFactor,
    config: &SearchConfig,
) -> Result<ClosedFormCheck> {
    let numeric = discord_numeric(rho, config)?;
    let closed = discord_closed(c, factor.abs2);
    let excess = numeric.triple.classical - classical_correlation_closed(c, factor.abs2);
    if excess > BOUND_VIOLATION_TOL {
        warn!(
            "numeric classical correlation exceeds closed form by {:e} at c = {:?}, |F|^2 = {}",
            excess, c, factor.abs2
        );
    }
    Ok(ClosedFormCheck {
        closed,
        numeric: numeric.triple,
        angles: numeric.angles,
        discord_gap: (numeric.triple.discord - closed.discord).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::reduced_state_with_factor;
    use crate::correlations::binary_entropy;
    use crate::statespace::{werner_params, x_state_density};
    use nalgebra::Matrix4;
    use std::f64::consts::FRAC_PI_4;

    fn dressed(c: &XStateParams, abs2: f64, phase: f64) -> (TwoQubitDensityMatrix, CoherenceFactor) {
        let f = CoherenceFactor::new(Complex64::from_polar(abs2.sqrt(), phase));
        (reduced_state_with_factor(c, &f).unwrap(), f)
    }

    /// `tr_B[(I x B) rho (I x B)]` built from explicit 4x4 matrices.
    fn dense_conditional(rho: &Matrix4<Complex64>, ket: &Vector2<Complex64>) -> Matrix2<Complex64> {
        let proj = ket * ket.adjoint();
        let id = Matrix2::<Complex64>::identity();
        let lift = id.kronecker(&proj);
        let post = lift * rho * lift;
        Matrix2::from_fn(|a, ap| post[(2 * a, 2 * ap)] + post[(2 * a + 1, 2 * ap + 1)])
    }

    #[test]
    fn kets_are_orthonormal() {
        let [a, b] = ProjectorAngles::new(0.3, 2.1).kets();
        assert!((a.dotc(&a).re - 1.0).abs() < 1e-15);
        assert!((b.dotc(&b).re - 1.0).abs() < 1e-15);
        assert!(a.dotc(&b).norm() < 1e-15);
    }

    #[test]
    fn computational_basis_measurement() {
        let c = XStateParams::new(0.7, -0.2, 0.4).unwrap();
        let (rho, _) = dressed(&c, 0.5, 0.9);
        let [o1, o2] = conditional_states(&rho, &ProjectorAngles::new(0.0, 0.0));
        assert!((o1.probability - 0.5).abs() < 1e-15);
        assert!((o2.probability - 0.5).abs() < 1e-15);
        assert!((o1.state[(0, 0)].re - 0.7).abs() < 1e-15);
        assert!((o1.state[(1, 1)].re - 0.3).abs() < 1e-15);
        assert!(o1.state[(0, 1)].norm() < 1e-15);
        assert!((o2.state[(0, 0)].re - 0.3).abs() < 1e-15);
        assert!((o2.state[(1, 1)].re - 0.7).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_gives_half_identity() {
        let rho = x_state_density(&XStateParams::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        for angles in [ProjectorAngles::new(0.4, 1.0), ProjectorAngles::new(1.2, 5.0)] {
            for o in conditional_states(&rho, &angles) {
                assert!((o.probability - 0.5).abs() < 1e-15);
                assert!((o.state - Matrix2::identity().scale(0.5)).norm() < 1e-15);
            }
        }
        let opt = maximize_classical(&rho, &SearchConfig::default()).unwrap();
        assert!(opt.classical.abs() < 1e-14);
    }

    #[test]
    fn conditional_states_match_dense_projection() {
        let c = XStateParams::new(0.8, -0.5, 0.3).unwrap();
        let (rho, _) = dressed(&c, 0.6, 2.2);
        for angles in [ProjectorAngles::new(0.37, 1.3), ProjectorAngles::new(1.1, 4.4)] {
            let outcomes = conditional_states(&rho, &angles);
            for (o, ket) in outcomes.iter().zip(angles.kets()) {
                let dense = dense_conditional(rho.matrix(), &ket);
                let p = dense.trace().re;
                assert!((o.probability - p).abs() < 1e-12);
                assert!((o.state - dense.unscale(p)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eta_matches_conditional_states() {
        let cases = [
            (XStateParams::new(1.0, -0.6, 0.6).unwrap(), 0.8, 0.4),
            (XStateParams::new(0.3, -0.7, 0.2).unwrap(), 0.5, -1.9),
            (XStateParams::new(-0.4, 0.1, -0.2).unwrap(), 0.9, 2.7),
        ];
        for (c, abs2, phase) in cases {
            let (rho, f) = dressed(&c, abs2, phase);
            for (theta, phi) in [(0.0, 0.0), (0.3, 0.7), (FRAC_PI_4, 2.0), (1.2, 5.5)] {
                let angles = ProjectorAngles::new(theta, phi);
                let eta = eta_value(&c, &f, &angles);
                for o in conditional_states(&rho, &angles) {
                    let det = o.state.determinant().re;
                    let from_det = (1.0 - 4.0 * det).max(0.0).sqrt();
                    assert!((eta - from_det).abs() < 1e-10, "{} vs {}", eta, from_det);
                    // eigenvalues (1 +- eta)/2
                    let tr = o.state.trace().re;
                    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
                    assert!(((tr + disc) / 2.0 - (1.0 + eta) / 2.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn eta_special_angles() {
        let c = XStateParams::new(0.6, -0.3, 0.2).unwrap();
        let f = CoherenceFactor::new(Complex64::from_polar(0.8f64.sqrt(), 1.3));
        assert!((eta_value(&c, &f, &ProjectorAngles::new(0.0, 2.0)) - 0.2).abs() < 1e-15);
        let best = (0..3600)
            .map(|j| eta_value(&c, &f, &ProjectorAngles::new(FRAC_PI_4, j as f64 * PI / 1800.0)))
            .fold(0.0, f64::max);
        assert!((best - 0.8 * 0.6).abs() < 1e-6);
    }

    #[test]
    fn phi_maximum_is_phase_covariant() {
        let c = XStateParams::new(0.6, 0.1, 0.2).unwrap();
        let max_over_phi = |phase: f64| {
            let f = CoherenceFactor::new(Complex64::from_polar(0.7f64.sqrt(), phase));
            (0..720)
                .map(|j| eta_value(&c, &f, &ProjectorAngles::new(FRAC_PI_4, j as f64 * PI / 360.0)))
                .fold(0.0, f64::max)
        };
        let reference = max_over_phi(0.0);
        // rotations of arg F^2 by multiples of the grid spacing are exact shifts
        for k in [1, 17, 200] {
            assert!((max_over_phi(k as f64 * PI / 360.0) - reference).abs() < 1e-10);
        }
    }

    #[test]
    fn optimum_on_coherence_branch() {
        let c = XStateParams::new(1.0, -0.6, 0.6).unwrap();
        let (rho, _) = dressed(&c, 1.0, 0.0);
        let opt = maximize_classical(&rho, &SearchConfig::default()).unwrap();
        assert!((opt.classical - 1.0).abs() < 1e-7);
        assert!((opt.angles.theta - FRAC_PI_4).abs() < 1e-3);
    }

    #[test]
    fn optimum_on_population_branch() {
        let c = XStateParams::new(1.0, -0.6, 0.6).unwrap();
        let (rho, _) = dressed(&c, 0.3, 1.7);
        let opt = maximize_classical(&rho, &SearchConfig::default()).unwrap();
        let expect = 1.0 - binary_entropy(0.8).unwrap();
        assert!((opt.classical - expect).abs() < 1e-9);
        assert_eq!(opt.angles.theta, 0.0);
    }

    #[test]
    fn tie_reports_smaller_angles() {
        // |c3| = W exactly: theta = 0 and theta = pi/4 are both optimal
        let c = XStateParams::new(1.0, -0.5, 0.5).unwrap();
        let (rho, _) = dressed(&c, 0.5, 0.0);
        let opt = maximize_classical(&rho, &SearchConfig::default()).unwrap();
        assert_eq!((opt.angles.theta, opt.angles.phi), (0.0, 0.0));
    }

    #[test]
    fn numeric_discord_extremes() {
        let singlet = x_state_density(&werner_params(1.0).unwrap()).unwrap();
        let d = discord_numeric(&singlet, &SearchConfig::default()).unwrap();
        assert!((d.triple.discord - 1.0).abs() < 1e-9);
        let mixed = x_state_density(&XStateParams::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        let d = discord_numeric(&mixed, &SearchConfig::default()).unwrap();
        assert!(d.triple.discord.abs() < 1e-12);
        assert!(d.triple.mutual_info.abs() < 1e-12);
    }

    #[test]
    fn rejects_small_grids() {
        let rho = x_state_density(&XStateParams::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        let cfg = SearchConfig {
            grid_theta: 4,
            ..SearchConfig::default()
        };
        assert!(maximize_classical(&rho, &cfg).is_err());
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, v) = golden_min(|x| (x - 0.3).powi(2), 0.0, 1.0, 60);
        assert!((x - 0.3).abs() < 1e-10);
        assert!(v < 1e-20);
    }
}
