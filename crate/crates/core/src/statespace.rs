// Copyright 2026 The cavity-discord Authors
// SPDX-License-Identifier: Apache-2.0

//! Parameter and state types shared by every other module.
//!
//! Two-qubit matrices are always written in the product basis
//! `{|ee>, |eg>, |ge>, |gg>}`, atom A being the left factor. Index `2*a + b`
//! addresses `|a b>` with `e = 0`, `g = 1`.

use std::fmt;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labels of the two-qubit basis, in matrix index order.
pub const BASIS_LABELS: [&str; 4] = ["ee", "eg", "ge", "gg"];

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Slack on eigenvalue positivity, absorbs rounding.
pub const POSITIVITY_TOL: f64 = 1e-10;

const COEFFICIENT_TOL: f64 = 1e-12;

/// Correlation coefficients `(c1, c2, c3)` of a Bell-diagonal two-qubit state
/// `(I + sum_i c_i sigma_i x sigma_i) / 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl XStateParams {
    /// Checked constructor.
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let c = Self { c1, c2, c3 };
        validate_physicality(&c).map_err(Error::Unphysical)?;
        Ok(c)
    }

    /// The `c1 = 1, c2 = -c3` family whose discord freezes.
    pub fn frozen_family(c3: f64) -> Result<Self> {
        Self::new(1.0, -c3, c3)
    }

    /// The four Bell-diagonal eigenvalues, in the order
    /// `(1-c1-c2-c3)/4, (1-c1+c2+c3)/4, (1+c1-c2+c3)/4, (1+c1+c2-c3)/4`.
    pub fn bell_eigenvalues(&self) -> [f64; 4] {
        let XStateParams { c1, c2, c3 } = *self;
        [
            (1.0 - c1 - c2 - c3) / 4.0,
            (1.0 - c1 + c2 + c3) / 4.0,
            (1.0 + c1 - c2 + c3) / 4.0,
            (1.0 + c1 + c2 - c3) / 4.0,
        ]
    }

    pub fn max_transverse(&self) -> f64 {
        self.c1.abs().max(self.c2.abs())
    }
}

const BELL_EIGENVALUE_FORMS: [&str; 4] = [
    "(1-c1-c2-c3)/4",
    "(1-c1+c2+c3)/4",
    "(1+c1-c2+c3)/4",
    "(1+c1+c2-c3)/4",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    CoefficientOutOfRange { index: usize, value: f64 },
    NegativeEigenvalue { form: &'static str, value: f64 },
    NotFinite,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CoefficientOutOfRange { index, value } => {
                write!(f, "|c{}| = {} exceeds 1", index, value.abs())
            }
            Violation::NegativeEigenvalue { form, value } => {
                write!(f, "eigenvalue {} = {} is negative", form, value)
            }
            Violation::NotFinite => write!(f, "coefficients must be finite"),
        }
    }
}

/// Everything wrong with a candidate `XStateParams`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalityReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for PhysicalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", v)?;
        }
        Ok(())
    }
}

/// Ok iff `|c_i| <= 1` and all four Bell-diagonal eigenvalues are
/// non-negative (with `POSITIVITY_TOL` slack).
pub fn validate_physicality(c: &XStateParams) -> std::result::Result<(), PhysicalityReport> {
    let coeffs = [c.c1, c.c2, c.c3];
    if coeffs.iter().any(|x| !x.is_finite()) {
        return Err(PhysicalityReport {
            violations: vec![Violation::NotFinite],
        });
    }
    let mut violations = Vec::new();
    for (i, &value) in coeffs.iter().enumerate() {
        if value.abs() > 1.0 + COEFFICIENT_TOL {
            violations.push(Violation::CoefficientOutOfRange { index: i + 1, value });
        }
    }
    for (form, value) in BELL_EIGENVALUE_FORMS.iter().zip(c.bell_eigenvalues()) {
        if value < -POSITIVITY_TOL {
            violations.push(Violation::NegativeEigenvalue { form, value });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(PhysicalityReport { violations })
    }
}

/// Werner mixing weight `r` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    pub r: f64,
}

impl WernerParams {
    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::OutOfRange {
                name: "r",
                value: r,
                range: "[0, 1]",
            });
        }
        Ok(Self { r })
    }
}

/// `(1-r) I/4 + r |singlet><singlet|` corresponds to `c1 = c2 = c3 = -r`.
pub fn werner_params(r: f64) -> Result<XStateParams> {
    let w = WernerParams::new(r)?;
    Ok(XStateParams {
        c1: -w.r,
        c2: -w.r,
        c3: -w.r,
    })
}

/// Coherent amplitude and decay ratio `kappa = k / Omega` of the two
/// (identical) cavities. Times are always the scaled `tau = Omega t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub alpha: Complex64,
    pub kappa: f64,
}

impl ChannelParams {
    pub fn new(alpha: Complex64, kappa: f64) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha.norm(),
                range: "finite complex numbers",
            });
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::OutOfRange {
                name: "kappa",
                value: kappa,
                range: "[0, inf)",
            });
        }
        Ok(Self { alpha, kappa })
    }

    pub fn real(alpha: f64, kappa: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), kappa)
    }

    /// Mean photon number `|alpha|^2`.
    pub fn mean_photons(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensityMatrix(Matrix4<Complex64>);

impl TwoQubitDensityMatrix {
    /// Accepts `m` if it is Hermitian, has unit trace and no eigenvalue
    /// below `-POSITIVITY_TOL`.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let herm_err = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(herm_err <= HERMITIAN_TOL) {
            return Err(Error::NotDensityMatrix(format!(
                "Hermiticity error {:e}",
                herm_err
            )));
        }
        let tr = m.trace();
        if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
            return Err(Error::NotDensityMatrix(format!("trace {}", tr)));
        }
        let rho = Self(m);
        let min_eig = rho.eigenvalues()[0];
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "eigenvalue {:e} is negative",
                min_eig
            )));
        }
        Ok(rho)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix4<Complex64> {
        self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        // symmetrize first; the eigensolver reads one triangle only
        let h = (self.0 + self.0.adjoint()).scale(0.5);
        let ev = h.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2], ev[3]];
        out.sort_by(f64::total_cmp);
        out
    }

    /// State of atom A (trace over B).
    pub fn reduced_a(&self) -> Matrix2<Complex64> {
        Matrix2::from_fn(|a, ap| (0..2).map(|b| self.0[(2 * a + b, 2 * ap + b)]).sum())
    }

    /// State of atom B (trace over A).
    pub fn reduced_b(&self) -> Matrix2<Complex64> {
        Matrix2::from_fn(|b, bp| (0..2).map(|a| self.0[(2 * a + b, 2 * a + bp)]).sum())
    }
}

/// The X-shaped matrix `(I + sum_i c_i sigma_i x sigma_i) / 4`.
pub fn x_state_density(c: &XStateParams) -> Result<TwoQubitDensityMatrix> {
    validate_physicality(c).map_err(Error::Unphysical)?;
    TwoQubitDensityMatrix::new(x_matrix(c, Complex64::new(1.0, 0.0)))
}

/// X matrix whose coherences are dressed by the decoherence factor `factor`:
/// the `|ee><gg|` entry scales by `factor^2`, the `|eg><ge|` entry by
/// `|factor|^2`. Populations are untouched.
pub(crate) fn x_matrix(c: &XStateParams, factor: Complex64) -> Matrix4<Complex64> {
    let re = |x: f64| Complex64::new(x, 0.0);
    let outer = re((c.c1 - c.c2) / 4.0) * factor * factor;
    let inner = re((c.c1 + c.c2) / 4.0 * factor.norm_sqr());
    let mut m = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        re((1.0 + c.c3) / 4.0),
        re((1.0 - c.c3) / 4.0),
        re((1.0 - c.c3) / 4.0),
        re((1.0 + c.c3) / 4.0),
    ));
    m[(0, 3)] = outer;
    m[(3, 0)] = outer.conj();
    m[(1, 2)] = inner;
    m[(2, 1)] = inner;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() < 1e-15
    }

    #[test]
    fn basis_order_is_ee_eg_ge_gg() {
        assert_eq!(BASIS_LABELS, ["ee", "eg", "ge", "gg"]);
        // c3 weights the aligned populations ee and gg
        let rho = x_state_density(&XStateParams::new(0.0, 0.0, 1.0).unwrap()).unwrap();
        assert!(close(rho.matrix()[(0, 0)], 0.5));
        assert!(close(rho.matrix()[(1, 1)], 0.0));
        assert!(close(rho.matrix()[(3, 3)], 0.5));
    }

    #[test]
    fn maximally_mixed_at_origin() {
        let rho = x_state_density(&XStateParams::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(close(rho.matrix()[(i, j)], if i == j { 0.25 } else { 0.0 }));
            }
        }
    }

    #[test]
    fn frozen_family_entries() {
        let c = XStateParams::new(1.0, -0.6, 0.6).unwrap();
        let m = x_state_density(&c).unwrap().into_matrix();
        for (i, d) in [0.4, 0.1, 0.1, 0.4].iter().enumerate() {
            assert!(close(m[(i, i)], *d));
        }
        assert!(close(m[(0, 3)], 0.4));
        assert!(close(m[(3, 0)], 0.4));
        assert!(close(m[(1, 2)], 0.1));
        assert!(close(m[(2, 1)], 0.1));
    }

    #[test]
    fn singlet_limit() {
        let rho = x_state_density(&werner_params(1.0).unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = nalgebra::Vector4::new(0.0, s, -s, 0.0).map(|x| Complex64::new(x, 0.0));
        let proj = psi * psi.adjoint();
        assert!((rho.matrix() - proj).norm() < 1e-15);
    }

    #[test]
    fn werner_mapping() {
        assert_eq!(werner_params(0.0).unwrap(), XStateParams { c1: 0.0, c2: 0.0, c3: 0.0 });
        assert_eq!(werner_params(1.0).unwrap(), XStateParams { c1: -1.0, c2: -1.0, c3: -1.0 });
        assert_eq!(werner_params(0.7).unwrap(), XStateParams { c1: -0.7, c2: -0.7, c3: -0.7 });
        assert!(werner_params(1.2).is_err());
        assert!(werner_params(-0.1).is_err());
    }

    #[test]
    fn physicality_reports() {
        let bad = XStateParams { c1: 1.0, c2: 1.0, c3: 1.0 };
        let report = validate_physicality(&bad).unwrap_err();
        assert_eq!(
            report.violations,
            vec![Violation::NegativeEigenvalue {
                form: "(1-c1-c2-c3)/4",
                value: -0.5
            }]
        );
        assert!(report.to_string().contains("(1-c1-c2-c3)/4"));

        let ok = XStateParams { c1: 1.0, c2: -0.6, c3: 0.6 };
        assert!(validate_physicality(&ok).is_ok());
        let ev = ok.bell_eigenvalues();
        let expect = [0.0, 0.0, 0.8, 0.2];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(validate_physicality(&XStateParams { c1: 0.0, c2: 0.0, c3: 0.0 }).is_ok());

        let out = XStateParams { c1: 1.5, c2: 0.0, c3: 0.0 };
        let report = validate_physicality(&out).unwrap_err();
        assert!(report
            .violations
            .contains(&Violation::CoefficientOutOfRange { index: 1, value: 1.5 }));
        assert!(matches!(x_state_density(&bad), Err(Error::Unphysical(_))));
    }

    #[test]
    fn density_matrix_rejections() {
        let mut m = Matrix4::<Complex64>::identity().scale(0.25);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(TwoQubitDensityMatrix::new(m).is_err());
        let m = Matrix4::<Complex64>::identity().scale(0.3);
        assert!(TwoQubitDensityMatrix::new(m).is_err());
        let m = Matrix4::from_diagonal(&nalgebra::Vector4::new(0.6, 0.6, -0.1, -0.1))
            .map(|x| Complex64::new(x, 0.0));
        assert!(TwoQubitDensityMatrix::new(m).is_err());
    }

    #[test]
    fn channel_params_validation() {
        assert!(ChannelParams::real(0.8, -0.1).is_err());
        assert!(ChannelParams::real(f64::NAN, 0.1).is_err());
        assert!(ChannelParams::real(0.8, 0.0).is_ok());
        let p = ChannelParams::new(Complex64::new(0.6, 0.8), 1.0).unwrap();
        assert!((p.mean_photons() - 1.0).abs() < 1e-15);
    }
}
