// Copyright 2026 The cavity-discord Authors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic text output.

use std::fmt::Write as _;

use crate::analysis::SweepRow;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub const CSV_HEADER: &str = "tau,F_re,F_im,F_abs2,mutual_info,classical,discord";

/// `%.12g`: 12 significant digits, trailing zeros dropped, scientific
/// notation outside `[1e-5, 1e12)`.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{}", x);
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let mantissa = trim_zeros(mantissa.to_string());
        format!("{}e{}{:02}", mantissa, if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// CSV body for a sweep, header included, LF line endings.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let numeric = rows.iter().any(|r| r.discord_numeric.is_some());
    let mut out = String::from(CSV_HEADER);
    if numeric {
        out.push_str(",discord_numeric");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            sig(r.tau),
            sig(r.factor.re),
            sig(r.factor.im),
            sig(r.factor.abs2),
            sig(r.triple.mutual_info),
            sig(r.triple.classical),
            sig(r.triple.discord)
        );
        if numeric {
            let _ = write!(out, ",{}", r.discord_numeric.map(sig).unwrap_or_default());
        }
        out.push('\n');
    }
    out
}
