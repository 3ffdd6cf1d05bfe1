// Copyright 2026 The cavity-discord Authors
// SPDX-License-Identifier: Apache-2.0

//! Transition times, long-time limits and trajectory sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{coherence_factor, stationary_abs2, CoherenceFactor};
use crate::correlations::{
    discord_closed, frozen_family_correlations, h2, werner_correlations, CorrelationTriple,
};
use crate::error::{Error, Result};
use crate::measurement::{discord_numeric, SearchConfig};
use crate::channel::reduced_state_with_factor;
use crate::statespace::{werner_params, ChannelParams, XStateParams};

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_TOL: f64 = 1e-12;
/// A refined extremum within this distance of the threshold is a touch.
pub const TOUCH_TOL: f64 = 1e-12;
pub const DEFAULT_TRANSITION_SAMPLES: usize = 10_000;

/// Initial-state family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `c = (1, -c3, c3)`.
    Frozen { c3: f64 },
    /// `c = (-r, -r, -r)`.
    Werner { r: f64 },
    General { c1: f64, c2: f64, c3: f64 },
}

impl Family {
    pub fn x_state(&self) -> Result<XStateParams> {
        match *self {
            Family::Frozen { c3 } => XStateParams::frozen_family(c3),
            Family::Werner { r } => werner_params(r),
            Family::General { c1, c2, c3 } => XStateParams::new(c1, c2, c3),
        }
    }

    pub fn correlations(&self, abs2: f64) -> Result<CorrelationTriple> {
        match *self {
            Family::Frozen { c3 } => {
                XStateParams::frozen_family(c3)?;
                Ok(frozen_family_correlations(c3, abs2))
            }
            Family::Werner { r } => werner_correlations(r, abs2),
            Family::General { .. } => Ok(discord_closed(&self.x_state()?, abs2)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Frozen { .. } => "frozen",
            Family::Werner { .. } => "werner",
            Family::General { .. } => "general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `|F|^2` falls through the threshold.
    Down,
    Up,
    /// Tangential touch.
    Touch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub tau: f64,
    pub direction: Direction,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `|F|^2 >= |c3|` in the frozen family: discord is constant.
    DiscordFrozen,
    /// Measurement along z is optimal: classical correlation is constant.
    ClassicalFrozen,
    /// Coherence branch of a general X state; nothing is frozen.
    CoherenceDominated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeInterval {
    pub start: f64,
    pub end: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionReport {
    /// Value of `|F|^2` at which the optimal measurement switches branch.
    pub threshold: f64,
    pub crossings: Vec<Crossing>,
    /// Frozen discord `1 - H2((1 + |c3|) / 2)`; frozen family only.
    pub plateau_value: Option<f64>,
    pub regimes: Vec<RegimeInterval>,
}

impl TransitionReport {
    pub fn first_crossing(&self) -> Option<f64> {
        self.crossings.first().map(|c| c.tau)
    }
}

/// Every root of `g` on `[lo, hi]`.
///
/// `g` is sampled on `samples` points; sign changes are bisected. Where the
/// samples show an extremum pointing toward zero without a sign change the
/// extremum is refined by golden section, which uncovers crossing pairs
/// hidden inside one sample interval and tangential touches.
pub fn find_roots(g: impl Fn(f64) -> f64 + Sync, lo: f64, hi: f64, samples: usize) -> Vec<Crossing> {
    let samples = samples.max(2);
    let step = (hi - lo) / (samples - 1) as f64;
    let taus: Vec<f64> = (0..samples).map(|i| lo + i as f64 * step).collect();
    let values: Vec<f64> = taus.par_iter().map(|&t| g(t)).collect();

    let mut out = Vec::new();
    for i in 0..samples {
        let v = values[i];
        if v == 0.0 {
            let before = if i > 0 { values[i - 1] } else { 0.0 };
            let after = if i + 1 < samples { values[i + 1] } else { 0.0 };
            let direction = if before > 0.0 && after < 0.0 {
                Direction::Down
            } else if before < 0.0 && after > 0.0 {
                Direction::Up
            } else {
                Direction::Touch
            };
            out.push(Crossing {
                tau: taus[i],
                direction,
                degenerate: direction == Direction::Touch,
            });
            continue;
        }
        if i + 1 < samples {
            let w = values[i + 1];
            if w != 0.0 && (v > 0.0) != (w > 0.0) {
                out.push(Crossing {
                    tau: bisect(&g, taus[i], taus[i + 1], v),
                    direction: if v > 0.0 { Direction::Down } else { Direction::Up },
                    degenerate: false,
                });
            }
        }
        if i > 0 && i + 1 < samples {
            let (a, b) = (values[i - 1], values[i + 1]);
            let same_sign = a != 0.0 && b != 0.0 && (a > 0.0) == (v > 0.0) && (b > 0.0) == (v > 0.0);
            if same_sign && v.abs() <= a.abs() && v.abs() < b.abs() {
                out.extend(refine_extremum(&g, taus[i - 1], taus[i + 1], v > 0.0));
            }
        }
    }
    out.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    out.dedup_by(|b, a| (b.tau - a.tau).abs() < 10.0 * BISECTION_TOL);
    out
}

fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, g_lo: f64) -> f64 {
    let lo_positive = g_lo > 0.0;
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimizes `|g|` along the side it lives on within `[lo, hi]`.
fn refine_extremum(g: &impl Fn(f64) -> f64, lo: f64, hi: f64, positive: bool) -> Vec<Crossing> {
    const INV_GOLDEN: f64 = 0.618_033_988_749_894_8;
    let signed = |t: f64| if positive { g(t) } else { -g(t) };
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let (mut f1, mut f2) = (signed(x1), signed(x2));
    while b - a > BISECTION_TOL {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = signed(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = signed(x2);
        }
        if f1 < 0.0 || f2 < 0.0 {
            break;
        }
    }
    let (t_min, f_min) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if f_min < 0.0 {
        let v_lo = g(lo);
        let v_min = g(t_min);
        vec![
            Crossing {
                tau: bisect(g, lo, t_min, v_lo),
                direction: if positive { Direction::Down } else { Direction::Up },
                degenerate: false,
            },
            Crossing {
                tau: bisect(g, t_min, hi, v_min),
                direction: if positive { Direction::Up } else { Direction::Down },
                degenerate: false,
            },
        ]
    } else if f_min <= TOUCH_TOL {
        vec![Crossing {
            tau: t_min,
            direction: Direction::Touch,
            degenerate: true,
        }]
    } else {
        Vec::new()
    }
}

fn check_window(window: (f64, f64)) -> Result<()> {
    if !(window.0 >= 0.0 && window.1 >= window.0 && window.1.is_finite()) {
        return Err(Error::OutOfRange {
            name: "window",
            value: window.1,
            range: "0 <= start <= end < inf",
        });
    }
    Ok(())
}

/// Times where `|F(tau)|^2 = threshold` and the regime on each interval.
fn branch_switches(
    threshold: f64,
    params: &ChannelParams,
    window: (f64, f64),
    samples: usize,
    above: Regime,
) -> Result<TransitionReport> {
    check_window(window)?;
    let g = |t: f64| coherence_factor(t, params).abs2 - threshold;
    let crossings = find_roots(g, window.0, window.1, samples);

    let mut edges = vec![window.0];
    edges.extend(crossings.iter().map(|c| c.tau));
    edges.push(window.1);
    let mut regimes: Vec<RegimeInterval> = Vec::new();
    for pair in edges.windows(2) {
        if pair[1] <= pair[0] {
            continue;
        }
        let regime = if g(0.5 * (pair[0] + pair[1])) >= 0.0 {
            above
        } else {
            Regime::ClassicalFrozen
        };
        match regimes.last_mut() {
            // touches do not change the regime
            Some(last) if last.regime == regime => last.end = pair[1],
            _ => regimes.push(RegimeInterval {
                start: pair[0],
                end: pair[1],
                regime,
            }),
        }
    }
    Ok(TransitionReport {
        threshold,
        crossings,
        plateau_value: None,
        regimes,
    })
}

/// Sudden transitions of the frozen family `c = (1, -c3, c3)`: the instants
/// where `|F(tau)|^2` crosses `|c3|`.
pub fn find_transitions(
    c3: f64,
    params: &ChannelParams,
    window: (f64, f64),
    samples: usize,
) -> Result<TransitionReport> {
    if !(c3.abs() > 0.0 && c3.abs() < 1.0) {
        return Err(Error::OutOfRange {
            name: "c3",
            value: c3,
            range: "0 < |c3| < 1",
        });
    }
    let mut report = branch_switches(c3.abs(), params, window, samples, Regime::DiscordFrozen)?;
    report.plateau_value = Some(1.0 - h2((1.0 + c3.abs()) / 2.0));
    Ok(report)
}

/// Branch switches of `m = max{|c3|, |F|^2 max(|c1|, |c2|)}` for any X state.
/// Returns `None` when the coherence branch can never win.
pub fn find_branch_switches(
    c: &XStateParams,
    params: &ChannelParams,
    window: (f64, f64),
    samples: usize,
) -> Result<Option<TransitionReport>> {
    let transverse = c.max_transverse();
    if transverse == 0.0 || c.c3.abs() > transverse {
        return Ok(None);
    }
    let frozen = (c.c1 - 1.0).abs() < 1e-15 && (c.c2 + c.c3).abs() < 1e-15;
    if frozen && c.c3.abs() > 0.0 && c.c3.abs() < 1.0 {
        return find_transitions(c.c3, params, window, samples).map(Some);
    }
    branch_switches(
        c.c3.abs() / transverse,
        params,
        window,
        samples,
        Regime::CoherenceDominated,
    )
    .map(Some)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryReport {
    pub f_inf_abs2: f64,
    pub triple: CorrelationTriple,
}

/// Correlations in the `tau -> inf` limit.
pub fn stationary_values(family: &Family, params: &ChannelParams) -> Result<StationaryReport> {
    if params.kappa <= 0.0 {
        return Err(Error::NoDissipation);
    }
    let f_inf_abs2 = stationary_abs2(params);
    Ok(StationaryReport {
        f_inf_abs2,
        triple: family.correlations(f_inf_abs2)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub tau: f64,
    pub factor: CoherenceFactorRow,
    pub triple: CorrelationTriple,
    pub discord_numeric: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceFactorRow {
    pub re: f64,
    pub im: f64,
    pub abs2: f64,
}

impl From<CoherenceFactor> for CoherenceFactorRow {
    fn from(f: CoherenceFactor) -> Self {
        Self {
            re: f.value.re,
            im: f.value.im,
            abs2: f.abs2,
        }
    }
}

/// `tau_max` split into `samples` evenly spaced points, both ends included.
pub fn tau_grid(tau_max: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|i| tau_max * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Closed-form correlations along `taus`; with `numeric` set, also the
/// optimizer's discord for each row.
pub fn sweep(
    family: &Family,
    params: &ChannelParams,
    taus: &[f64],
    numeric: Option<&SearchConfig>,
) -> Result<Vec<SweepRow>> {
    let c = family.x_state()?;
    if let Some(cfg) = numeric {
        cfg.validate()?;
    }
    taus.par_iter()
        .map(|&tau| {
            if !(tau >= 0.0) {
                return Err(Error::OutOfRange {
                    name: "tau",
                    value: tau,
                    range: "[0, inf)",
                });
            }
            let factor = coherence_factor(tau, params);
            let triple = family.correlations(factor.abs2)?;
            let discord_numeric = match numeric {
                Some(cfg) => {
                    let rho = reduced_state_with_factor(&c, &factor)?;
                    Some(discord_numeric(&rho, cfg)?.triple.discord)
                }
                None => None,
            };
            Ok(SweepRow {
                tau,
                factor: factor.into(),
                triple,
                discord_numeric,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, kappa: f64) -> ChannelParams {
        ChannelParams::real(alpha, kappa).unwrap()
    }

    #[test]
    fn roots_of_sine() {
        let roots = find_roots(|t: f64| t.sin(), 0.5, 10.0, 50);
        let taus: Vec<f64> = roots.iter().map(|c| c.tau).collect();
        assert_eq!(taus.len(), 3);
        for (k, t) in taus.iter().enumerate() {
            assert!((t - (k + 1) as f64 * std::f64::consts::PI).abs() < 1e-11);
        }
        assert_eq!(roots[0].direction, Direction::Down);
        assert_eq!(roots[1].direction, Direction::Up);
    }

    #[test]
    fn hidden_pair_inside_one_interval() {
        // dips below zero between 1.0 and 1.002 only
        let g = |t: f64| (t - 1.001).powi(2) - 1e-7;
        let roots = find_roots(g, 0.0, 2.0, 11);
        assert_eq!(roots.len(), 2);
        assert!((roots[0].tau - (1.001 - 1e-7f64.sqrt())).abs() < 1e-10);
        assert!((roots[1].tau - (1.001 + 1e-7f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn tangential_touch_is_flagged() {
        let g = |t: f64| (t - 0.7).powi(2);
        let roots = find_roots(g, 0.0, 2.0, 9);
        assert_eq!(roots.len(), 1);
        assert!(roots[0].degenerate);
        assert_eq!(roots[0].direction, Direction::Touch);
        assert!((roots[0].tau - 0.7).abs() < 1e-5);
    }

    #[test]
    fn first_crossing_alpha_one() {
        let r = find_transitions(0.6, &params(1.0, 0.05), (0.0, 10.0), DEFAULT_TRANSITION_SAMPLES)
            .unwrap();
        let first = r.first_crossing().unwrap();
        assert!((first - 0.37).abs() < 0.05);
        assert!((first - 0.370142459220489).abs() < 1e-9);
        assert_eq!(r.crossings.len(), 1);
        assert_eq!(r.regimes[0].regime, Regime::DiscordFrozen);
        assert_eq!(r.regimes[1].regime, Regime::ClassicalFrozen);
        assert!((r.plateau_value.unwrap() - 0.2780719051126377).abs() < 1e-15);
    }

    #[test]
    fn recrossings_are_all_reported() {
        let r = find_transitions(0.6, &params(0.8, 0.05), (0.0, 10.0), DEFAULT_TRANSITION_SAMPLES)
            .unwrap();
        let taus: Vec<f64> = r.crossings.iter().map(|c| c.tau).collect();
        let expect = [0.4708498358960839, 2.8415720122169943, 3.4478956368880094];
        assert_eq!(taus.len(), 3);
        for (a, b) in taus.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(taus.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(r.regimes.len(), 4);
    }

    #[test]
    fn unaffected_regime_has_no_crossing() {
        let r = find_transitions(0.7, &params(0.8, 2.0), (0.0, 50.0), DEFAULT_TRANSITION_SAMPLES)
            .unwrap();
        assert!(r.crossings.is_empty());
        assert_eq!(r.regimes.len(), 1);
        assert_eq!(r.regimes[0].regime, Regime::DiscordFrozen);
    }

    #[test]
    fn crossing_approaches_zero_as_c3_approaches_one() {
        let p = params(1.0, 0.05);
        let mut prev = f64::INFINITY;
        for c3 in [0.9, 0.99, 0.999, 0.99999] {
            let t = find_transitions(c3, &p, (0.0, 5.0), DEFAULT_TRANSITION_SAMPLES)
                .unwrap()
                .first_crossing()
                .unwrap();
            assert!(t > 0.0 && t < prev);
            prev = t;
        }
        assert!(prev < 0.01);
        let t = find_transitions(0.99, &p, (0.0, 5.0), DEFAULT_TRANSITION_SAMPLES)
            .unwrap()
            .first_crossing()
            .unwrap();
        assert!(t < 0.1);
    }

    #[test]
    fn rejects_degenerate_c3() {
        assert!(find_transitions(0.0, &params(1.0, 0.05), (0.0, 1.0), 100).is_err());
        assert!(find_transitions(1.0, &params(1.0, 0.05), (0.0, 1.0), 100).is_err());
        assert!(find_transitions(0.5, &params(1.0, 0.05), (2.0, 1.0), 100).is_err());
    }

    #[test]
    fn general_branch_switch() {
        let p = params(1.0, 0.05);
        let c = XStateParams::new(0.5, -0.2, 0.3).unwrap();
        let r = find_branch_switches(&c, &p, (0.0, 10.0), 5000).unwrap().unwrap();
        assert!((r.threshold - 0.6).abs() < 1e-15);
        assert_eq!(r.plateau_value, None);
        assert_eq!(r.regimes[0].regime, Regime::CoherenceDominated);
        let dominant = XStateParams::new(0.2, 0.1, 0.5).unwrap();
        assert!(find_branch_switches(&dominant, &p, (0.0, 10.0), 5000).unwrap().is_none());
    }

    #[test]
    fn stationary_cases() {
        let p = params(0.8, 0.05);
        let s = stationary_values(&Family::Frozen { c3: 0.6 }, &p).unwrap();
        assert!((s.f_inf_abs2 - 0.27893).abs() < 1e-5);
        assert!((s.triple.discord - 0.056872053651918386).abs() < 1e-12);
        assert_eq!(
            stationary_values(&Family::Frozen { c3: 0.6 }, &params(0.8, 0.0)),
            Err(Error::NoDissipation)
        );
        let strong = stationary_values(&Family::Frozen { c3: 0.6 }, &params(0.8, 1e6)).unwrap();
        assert!((strong.f_inf_abs2 - 1.0).abs() < 1e-11);
        let initial = frozen_family_correlations(0.6, 1.0);
        assert!((strong.triple.discord - initial.discord).abs() < 1e-10);
    }

    #[test]
    fn werner_stationary_grows_with_kappa() {
        let p01 = params(0.5, 0.1);
        let p1 = params(0.5, 1.0);
        let fam = Family::Werner { r: 0.9 };
        let q01 = stationary_values(&fam, &p01).unwrap().triple.discord;
        let q1 = stationary_values(&fam, &p1).unwrap().triple.discord;
        assert!((q01 - 0.24329154426884636).abs() < 1e-12);
        assert!((q1 - 0.4175897260164321).abs() < 1e-12);
        assert!(q1 > q01);
    }

    #[test]
    fn sweep_initial_row() {
        let fam = Family::Frozen { c3: 0.6 };
        let rows = sweep(&fam, &params(1.2, 0.05), &[0.0], None).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].factor.abs2, 1.0);
        assert_eq!(rows[0].triple, frozen_family_correlations(0.6, 1.0));
    }

    #[test]
    fn sweep_follows_piecewise_law() {
        let fam = Family::Frozen { c3: 0.6 };
        let p = params(0.8, 0.05);
        let taus = tau_grid(10.0, 2001);
        let rows = sweep(&fam, &p, &taus, None).unwrap();
        let c = fam.x_state().unwrap();
        for row in &rows {
            let expect = if row.factor.abs2 >= 0.6 {
                0.2780719051126377
            } else {
                1.0 - h2((1.0 + row.factor.abs2) / 2.0)
            };
            assert!((row.triple.discord - expect).abs() < 1e-12);
            let general = discord_closed(&c, row.factor.abs2);
            assert!((row.triple.discord - general.discord).abs() < 1e-12);
        }
    }

    #[test]
    fn werner_sweep_keeps_classical_constant() {
        for r in [0.5, 0.9] {
            let rows = sweep(&Family::Werner { r }, &params(0.5, 0.05), &tau_grid(50.0, 501), None)
                .unwrap();
            let c0 = rows[0].triple.classical;
            assert!(rows.iter().all(|row| (row.triple.classical - c0).abs() < 1e-12));
        }
    }

    #[test]
    fn sweep_numeric_column() {
        let cfg = SearchConfig {
            grid_theta: 46,
            grid_phi: 90,
            refine_iters: 40,
        };
        let rows = sweep(&Family::Frozen { c3: 0.6 }, &params(1.0, 0.05), &[0.0, 1.0], Some(&cfg))
            .unwrap();
        for row in rows {
            assert!((row.discord_numeric.unwrap() - row.triple.discord).abs() < 1e-6);
        }
    }

    #[test]
    fn grid_shapes() {
        assert!(tau_grid(5.0, 0).is_empty());
        assert_eq!(tau_grid(5.0, 1), vec![0.0]);
        assert_eq!(tau_grid(5.0, 3), vec![0.0, 2.5, 5.0]);
    }
}
