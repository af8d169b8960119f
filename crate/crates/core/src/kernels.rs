//! The integration kernels behind Ω_f and Ψ_f.
//!
//! `v_s(t) = (1 - ist - e^{-ist}) / t²` is the twice-integrated exponential
//! `∫_0^s ∫_0^σ e^{-iτt} dτ dσ`, and `u_s(t) = (1 - e^{-ist}) / (it)` is the
//! once-integrated one. Both depend on `(s, t)` only through `s·t` up to a
//! power of `s`, so they are evaluated as `s²·v_1(st)` and `s·u_1(st)`.
//! Near `st = 0` the closed forms cancel catastrophically and a Taylor series
//! is used instead.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{self, DecayClass, IntegrandSpec};
use crate::special::sinc;


/// Below this value of |s·t| the kernels are evaluated from their series.
pub const SERIES_SWITCH: f64 = 1e-2;
const SERIES_TERMS: usize = 8;
// v_1' loses about 1/x² digits in closed form, so its series runs further.
const DERIVATIVE_SERIES_SWITCH: f64 = 0.5;
const DERIVATIVE_SERIES_TERMS: usize = 18;

/// Which evaluation path produced a kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Series,
    ClosedForm,
}

/// A kernel value together with the branch that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEval {
    pub s: f64,
    pub t: f64,
    pub value: Complex64,
    pub branch: Branch,
}

fn branch_for(x: f64) -> Branch {
    if x.abs() < SERIES_SWITCH {
        Branch::Series
    } else {
        Branch::ClosedForm
    }
}

/// `v_1(x)`; real part `2 sin²(x/2)/x²`, imaginary part `(sin x - x)/x²`.
fn v1(x: f64) -> Complex64 {
    match branch_for(x) {
        Branch::Series => {
            // v_1(x) = -Σ_{n≥2} (-i)^n x^{n-2} / n!
            let mut sum = Complex64::new(0.0, 0.0);
            let mut xpow = 1.0;
            let mut fact = 2.0;
            for n in 2..2 + SERIES_TERMS {
                sum -= minus_i_pow(n as u32) * (xpow / fact);
                xpow *= x;
                fact *= (n + 1) as f64;
            }
            sum
        }
        Branch::ClosedForm => {
            let half = (0.5 * x).sin();
            Complex64::new(2.0 * half * half, sin_minus_x(x)) / (x * x)
        }
    }
}

/// `sin x - x` without the cancellation of the direct difference.
fn sin_minus_x(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return x.sin() - x;
    }
    // -x³/3! + x⁵/5! - ..., 12 terms reach below 1e-17 relative for |x| < 1
    let x2 = x * x;
    let mut term = -x * x2 / 6.0;
    let mut sum = term;
    for k in 2..14 {
        term *= -x2 / ((2 * k) as f64 * (2 * k + 1) as f64);
        sum += term;
    }
    sum
}

#[inline]
fn minus_i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `v_1'(x) = [-ix(1 - e^{-ix}) - 2(1 - ix - e^{-ix})] / x³`.
fn v1_prime(x: f64) -> Complex64 {
    if x.abs() < DERIVATIVE_SERIES_SWITCH {
        // v_1'(x) = -Σ_{n≥3} (-i)^n (n-2) x^{n-3} / n!
        let mut sum = Complex64::new(0.0, 0.0);
        let mut xpow = 1.0;
        let mut fact = 6.0;
        for n in 3..3 + DERIVATIVE_SERIES_TERMS {
            sum -= minus_i_pow(n as u32) * ((n - 2) as f64 * xpow / fact);
            xpow *= x;
            fact *= (n + 1) as f64;
        }
        sum
    } else {
        let (sin, cos) = x.sin_cos();
        let half = (0.5 * x).sin();
        let one_minus_cos = 2.0 * half * half;
        // numerator = ix(1 + e^{-ix}) - 2(1 - e^{-ix})
        let re = x * sin - 2.0 * one_minus_cos;
        let im = x * (1.0 + cos) - 2.0 * sin;
        Complex64::new(re, im) / (x * x * x)
    }
}

/// `u_1(x) = (1 - e^{-ix}) / (ix)`.
fn u1(x: f64) -> Complex64 {
    match branch_for(x) {
        Branch::Series => {
            // u_1(x) = Σ_{n≥1} (-ix)^{n-1} / n!
            let mut sum = Complex64::new(0.0, 0.0);
            let mut pow = Complex64::new(1.0, 0.0);
            let mut fact = 1.0;
            for n in 1..1 + SERIES_TERMS {
                sum += pow / fact;
                pow *= Complex64::new(0.0, -x);
                fact *= (n + 1) as f64;
            }
            sum
        }
        Branch::ClosedForm => {
            let half = (0.5 * x).sin();
            Complex64::new(x.sin(), -2.0 * half * half) / x
        }
    }
}

/// `v_s(t) = (1 - ist - e^{-ist}) / t²`, with `v_s(0) = s²/2`.
pub fn v(s: f64, t: f64) -> Complex64 {
    s * s * v1(s * t)
}

/// [`v`] with the branch that produced it.
pub fn v_eval(s: f64, t: f64) -> KernelEval {
    KernelEval {
        s,
        t,
        value: v(s, t),
        branch: branch_for(s * t),
    }
}

/// `∂v_s(t)/∂t`.
pub fn v_dt(s: f64, t: f64) -> Complex64 {
    s * s * s * v1_prime(s * t)
}

/// `u_s(t) = (1 - e^{-ist}) / (it)`, with `u_s(0) = s`.
pub fn u(s: f64, t: f64) -> Complex64 {
    s * u1(s * t)
}

/// [`u`] with the branch that produced it.
pub fn u_eval(s: f64, t: f64) -> KernelEval {
    KernelEval {
        s,
        t,
        value: u(s, t),
        branch: branch_for(s * t),
    }
}

/// `v_{s+h}(t) - 2v_s(t) + v_{s-h}(t) = h² e^{-ist} sinc²(ht/2)`.
pub fn second_difference_kernel(s: f64, h: f64, t: f64) -> Complex64 {
    let w = sinc(0.5 * h * t);
    Complex64::from_polar(h * h * w * w, -s * t)
}

/// Upper bound for |v_1'(t)|: `(2|t| + 4)/|t|³`, valid for all t ≠ 0 and
/// also `≤ 1/6` everywhere.
pub fn v1_prime_envelope(t: f64) -> f64 {
    let a = t.abs();
    if a < 2.0 {
        1.0 / 6.0
    } else {
        (2.0 * a + 4.0) / (a * a * a)
    }
}

/// Outcome of [`var_v1`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationConstant {
    pub value: f64,
    pub error_estimate: f64,
    /// Radius beyond which the envelope `(2|t|+4)/|t|³` integrates to less
    /// than a tenth of the tolerance.
    pub envelope_cutoff: f64,
    pub evaluations: usize,
}

/// The k-th positive zero of `v_1'`, `x = 2y` with `tan y = y` and
/// `y ∈ (kπ, (k + 1/2)π)`.
pub fn v1_prime_zero(k: usize) -> f64 {
    assert!(k >= 1, "zeros are numbered from 1");
    let top = (k as f64 + 0.5) * PI;
    let mut y = top - 1.0 / top;
    for _ in 0..50 {
        let (sin, cos) = y.sin_cos();
        let step = (sin - y * cos) / (y * sin);
        y -= step;
        if step.abs() <= 4.0 * f64::EPSILON * y {
            break;
        }
    }
    2.0 * y
}

/// `c = var(v_1) = ∫|v_1'(t)| dt`.
///
/// Integrated adaptively between consecutive zeros of `v_1'` (where `|v_1'|`
/// has corners), with the partial sums at doubling checkpoints extrapolated.
/// The envelope radius `T` where a plain truncation would be allowed is
/// reported alongside.
pub fn var_v1(tol: f64) -> Result<VariationConstant> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    // ∫_T^∞ (2t + 4)/t³ dt = 2/T + 2/T², twice for both half-lines.
    let target = tol / 10.0;
    let envelope_cutoff = {
        let (mut lo, mut hi) = (2.0_f64, 4.0_f64);
        while 4.0 / hi + 4.0 / (hi * hi) > target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if 4.0 / mid + 4.0 / (mid * mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let integrand = |t: f64| Complex64::new(v1_prime(t).norm(), 0.0);
    // |v_1'| is even, with corners at its zeros; pieces run corner to corner.
    let spec = IntegrandSpec::new(integrand).decay(DecayClass::AbsolutelyIntegrable);
    let head = quadrature::integrate_finite(&spec, 0.0, v1_prime_zero(1), tol / 8.0)?;
    let tail = quadrature::integrate_breaks(&spec, &|i| v1_prime_zero(i + 1), tol / 8.0)?;
    let half = head.combine(tail).require("var(v_1)")?;
    Ok(VariationConstant {
        value: 2.0 * half.value.re,
        error_estimate: 2.0 * half.error_estimate,
        envelope_cutoff,
        evaluations: half.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    /// Direct (1 - ist - e^{-ist}) / t² in extended form, no branch logic.
    fn v_direct(s: f64, t: f64) -> Complex64 {
        (Complex64::new(1.0, -s * t) - Complex64::from_polar(1.0, -s * t)) / (t * t)
    }

    #[test]
    fn v_at_origin_is_half_s_squared() {
        assert_eq!(v(1.0, 0.0), Complex64::new(0.5, 0.0));
        assert_eq!(v(3.0, 0.0), Complex64::new(4.5, 0.0));
        assert_eq!(v_eval(1.0, 0.0).branch, Branch::Series);
    }

    #[test]
    fn v_vanishes_at_zero_frequency() {
        assert_eq!(v(0.0, 7.3), Complex64::new(0.0, 0.0));
        assert_eq!(u(0.0, 1.0), Complex64::new(0.0, 0.0));
        assert_eq!(v_dt(0.0, 2.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn v_scaling_example() {
        assert!(close(v(2.0, 0.5), 4.0 * v(1.0, 1.0), 1e-13));
    }

    #[test]
    fn v_closed_form_matches_direct_away_from_zero() {
        for &(s, t) in &[(1.0, 2.0), (-0.7, 3.1), (5.0, -0.4), (0.3, 40.0)] {
            assert!(close(v(s, t), v_direct(s, t), 1e-14), "s={s} t={t}");
        }
    }

    #[test]
    fn v_dt_at_origin() {
        // 1 - it - e^{-it} = t²/2 - i t³/6 - t⁴/24 + ..., so v_1'(0) = -i/6.
        assert!(close(v_dt(1.0, 0.0), -I / 6.0, 1e-16));
    }

    #[test]
    fn v_dt_matches_finite_difference() {
        let step = 1e-5;
        let fd = (v(1.0, 2.0 + step) - v(1.0, 2.0 - step)) / (2.0 * step);
        assert!(close(v_dt(1.0, 2.0), fd, 1e-8));
        // across the series switch as well
        let t = 0.009;
        let fd = (v(1.0, t + 1e-5) - v(1.0, t - 1e-5)) / 2e-5;
        assert!(close(v_dt(1.0, t), fd, 1e-8));
    }

    #[test]
    fn u_examples() {
        assert_eq!(u(3.0, 0.0), Complex64::new(3.0, 0.0));
        assert!(close(u(2.0, 1.0), 2.0 * u(1.0, 2.0), 1e-13));
        let direct = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -1.3)) / (I * 1.0);
        assert!(close(u(1.3, 1.0), direct, 1e-15));
    }

    #[test]
    fn second_difference_kernel_examples() {
        assert_relative_eq!(second_difference_kernel(0.4, 0.3, 0.0).re, 0.09, max_relative = 1e-15);
        let expected = v(1.1, 2.0) - 2.0 * v(1.0, 2.0) + v(0.9, 2.0);
        assert!(close(second_difference_kernel(1.0, 0.1, 2.0), expected, 1e-12));
        let k = second_difference_kernel(0.0, 1.0, PI);
        assert_relative_eq!(k.re, 4.0 / (PI * PI), max_relative = 1e-14);
        assert!(k.im.abs() < 1e-16);
    }

    #[test]
    fn branch_continuity_across_switch() {
        for &s in &[1.0, 0.01, 30.0] {
            for &x in &[0.0099, 0.00999999, 0.0100000001, 0.0101] {
                let t = x / s;
                let expected = s * s * v_direct(1.0, x);
                assert!(close(v(s, t), expected, 1e-12 * s * s), "s={s} x={x}");
            }
        }
        let below = v1(SERIES_SWITCH * (1.0 - 1e-12));
        let above = v1(SERIES_SWITCH * (1.0 + 1e-12));
        assert!(close(below, above, 1e-12));
        let below = v1_prime(DERIVATIVE_SERIES_SWITCH * (1.0 - 1e-12));
        let above = v1_prime(DERIVATIVE_SERIES_SWITCH * (1.0 + 1e-12));
        assert!(close(below, above, 1e-12));
    }

    #[test]
    fn envelope_dominates_derivative() {
        for k in 0..2000 {
            let t = -50.0 + 0.05 * k as f64 + 0.013;
            assert!(v1_prime(t).norm() <= v1_prime_envelope(t) * (1.0 + 1e-12), "t={t}");
        }
    }

    #[test]
    fn variation_constant_bounds() {
        let c = var_v1(1e-6).unwrap();
        // net change of v_1 on each half-line is 1/2
        assert!(c.value >= 1.0);
        assert!(c.error_estimate <= 1e-6);
        assert!(c.envelope_cutoff > 1e6);
    }

    #[test]
    fn derivative_zeros() {
        for k in [1, 2, 7, 100, 5000] {
            let x = v1_prime_zero(k);
            assert!(x > (2 * k) as f64 * PI && x < (2 * k + 1) as f64 * PI);
            assert!(v1_prime(x).norm() < 1e-15 * v1_prime_envelope(x) * x, "k={k}");
        }
    }

    #[test]
    fn var_v1_rejects_bad_tolerance() {
        assert!(var_v1(0.0).is_err());
        assert!(var_v1(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn conjugation(s in -50.0f64..50.0, t in -50.0f64..50.0) {
            prop_assert!(close(v(-s, t), v(s, t).conj(), 1e-13 * (1.0 + s * s)));
            prop_assert!(close(u(-s, t), -u(s, t).conj(), 1e-13 * (1.0 + s.abs())));
        }

        #[test]
        fn sup_norm_is_at_origin(s in 0.1f64..10.0, t in -100.0f64..100.0) {
            prop_assert!(v(s, t).norm() <= 0.5 * s * s * (1.0 + 1e-12));
        }

        #[test]
        fn second_s_derivative_is_exponential(s in -3.0f64..3.0, t in -10.0f64..10.0) {
            let step = 1e-4;
            let d2 = (v(s + step, t) - 2.0 * v(s, t) + v(s - step, t)) / (step * step);
            prop_assert!(close(d2, Complex64::from_polar(1.0, -s * t), 1e-6));
        }
    }
}
