//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 7-point Gauss / 15-point Kronrod pair evaluated on a shrinking interval
//! stack: an interval whose Gauss-Kronrod discrepancy exceeds its share of the
//! error budget is bisected. This serves as the crate's independent numerical
//! oracle for the closed-form error-probability expressions, so it is kept
//! deliberately simple and tight (absolute tolerance, smooth integrands).

// The node/weight tables are the standard published values; keep every digit.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

/// 15-point Kronrod abscissae on [-1, 1] (non-negative half; symmetric).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// 7-point Gauss weights for the odd-indexed abscissae of `XGK`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod evaluation on `[a, b]`: returns the Kronrod estimate and
/// the absolute Gauss-Kronrod discrepancy used as the error estimate.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let pair = f(center - x) + f(center + x);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (half * kronrod, (half * (kronrod - gauss)).abs())
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol` by adaptive
/// bisection of the Gauss-Kronrod rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration bounds must be finite".into()));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive and finite".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    const MAX_INTERVALS: usize = 4096;
    // Stack of (lo, hi, budget) intervals still above their error budget.
    let mut stack = vec![(a, b, tol)];
    let mut total = 0.0;
    let mut processed = 0usize;
    while let Some((lo, hi, budget)) = stack.pop() {
        processed += 1;
        if processed > MAX_INTERVALS {
            return Err(Error::Numerical(format!(
                "quadrature used more than {MAX_INTERVALS} subintervals without \
                 reaching tolerance {tol:e}"
            )));
        }
        let (estimate, err) = gk15(&f, lo, hi);
        let mid = 0.5 * (lo + hi);
        if err <= budget || mid <= lo || mid >= hi {
            total += estimate;
        } else {
            stack.push((lo, mid, 0.5 * budget));
            stack.push((mid, hi, 0.5 * budget));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn polynomials_up_to_degree_22_are_exact_in_one_panel() {
        // K15 is exact through degree 22; single-panel results must be
        // correct to rounding.
        let exact = 2.0 / 23.0; // integral of x^22 over [-1, 1]
        let got = integrate(|x: f64| x.powi(22), -1.0, 1.0, 1e-13).unwrap();
        assert_abs_diff_eq!(got, exact, epsilon = 1e-15);
    }

    #[test]
    fn smooth_transcendental_integrals() {
        let got = integrate(f64::sin, 0.0, PI, 1e-13).unwrap();
        assert_abs_diff_eq!(got, 2.0, epsilon = 1e-13);
        let got = integrate(|x: f64| (-x * x).exp(), -6.0, 6.0, 1e-13).unwrap();
        assert_abs_diff_eq!(got, PI.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn needs_subdivision_for_oscillatory_integrand() {
        // sin(40 x) over [0, pi/2]: exact value (1 - cos(20 pi)) / 40 = 0.
        let got = integrate(|x: f64| (40.0 * x).sin(), 0.0, FRAC_PI_2, 1e-12).unwrap();
        assert_abs_diff_eq!(got, 0.0, epsilon = 1e-11);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(integrate(f64::cos, 1.0, 1.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(integrate(f64::cos, 0.0, f64::INFINITY, 1e-12).is_err());
        assert!(integrate(f64::cos, 0.0, 1.0, 0.0).is_err());
        assert!(integrate(f64::cos, 0.0, 1.0, -1e-3).is_err());
    }
}
