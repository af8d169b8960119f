//! Nonlinear limit transforms for sequences of partial integrals: Wynn's
//! epsilon algorithm and the Levin u-transform.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Limit estimate of a partial-sum sequence along with the disagreement
/// between neighbouring entries of the epsilon table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: Complex64,
    pub error: f64,
}

/// Epsilon table restricted to even columns, evaluated on a prefix.
///
/// Returns, for the last counter-diagonal of the table built from `seq`, the
/// even-column entries `[ε_0, ε_2, ε_4, ...]` (ε_0 being the last element).
fn last_diagonal(seq: &[Complex64]) -> Vec<Complex64> {
    let n = seq.len();
    // columns[k][m] = ε_k^{(m)}
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1]; // ε_{-1}
    let mut cur: Vec<Complex64> = seq.to_vec(); // ε_0
    let mut even = vec![cur[n - 1]];
    let mut k = 0;
    while cur.len() >= 2 {
        let len = cur.len() - 1;
        let mut next = Vec::with_capacity(len);
        let mut broken = false;
        for m in 0..len {
            let diff = cur[m + 1] - cur[m];
            if diff.norm() == 0.0 || !diff.norm().is_finite() {
                broken = true;
                break;
            }
            next.push(prev[m + 1] + diff.inv());
        }
        if broken {
            break;
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            let last = cur[cur.len() - 1];
            if !last.re.is_finite() || !last.im.is_finite() {
                break;
            }
            even.push(last);
        }
    }
    even
}

/// Best limit estimate from the epsilon table of `seq`. The error of each
/// even-column entry is its change over the last two extensions of the
/// sequence.
pub(crate) fn wynn(seq: &[Complex64]) -> Extrapolation {
    let n = seq.len();
    if n == 0 {
        return Extrapolation { value: Complex64::new(0.0, 0.0), error: f64::INFINITY };
    }
    if n < 3 {
        let last = seq[n - 1];
        let error = if n == 2 { (seq[1] - seq[0]).norm() } else { f64::INFINITY };
        return Extrapolation { value: last, error };
    }
    let diag = last_diagonal(seq);
    let prev = last_diagonal(&seq[..n - 1]);
    let prev2 = last_diagonal(&seq[..n - 2]);
    let mut best = Extrapolation { value: diag[0], error: f64::INFINITY };
    for (j, &d) in diag.iter().enumerate() {
        let (Some(&p1), Some(&p2)) = (prev.get(j), prev2.get(j)) else {
            break;
        };
        let error = (d - p1).norm() + (p1 - p2).norm();
        if error < best.error {
            best = Extrapolation { value: d, error };
        }
    }
    best.error = best.error.max(10.0 * f64::EPSILON * best.value.norm());
    best
}

/// Longest Levin order tried; higher orders only amplify rounding.
const LEVIN_MAX_ORDER: usize = 30;

/// Levin u-transform with remainder estimates `ω_m = (m + 1)·a_m`, where
/// `a_m` are the increments of the sequence. Orders `k` use the last `k + 1`
/// entries; the estimate with the smallest change against the two next-lower
/// orders wins.
pub(crate) fn levin(seq: &[Complex64]) -> Extrapolation {
    let n = seq.len();
    let none = Extrapolation { value: seq.last().copied().unwrap_or_default(), error: f64::INFINITY };
    if n < 3 {
        return none;
    }
    let mut omega = Vec::with_capacity(n);
    for m in 0..n {
        let a = if m == 0 { seq[0] } else { seq[m] - seq[m - 1] };
        let w = a * (m as f64 + 1.0);
        if w.norm() == 0.0 || !w.norm().is_finite() {
            return none;
        }
        omega.push(w);
    }
    let transform = |k: usize| -> Complex64 {
        let start = n - 1 - k;
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        let mut binom = 1.0;
        let last = (start + k) as f64 + 1.0;
        for j in 0..=k {
            let ratio = ((start + j) as f64 + 1.0) / last;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let c = sign * binom * ratio.powi(k as i32 - 1);
            let inv = omega[start + j].inv();
            num += inv * seq[start + j] * c;
            den += inv * c;
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        num / den
    };
    let orders = (n - 1).min(LEVIN_MAX_ORDER);
    let values: Vec<Complex64> = (0..=orders).map(transform).collect();
    let mut best = none;
    for k in 2..=orders {
        let v = values[k];
        if !(v.re.is_finite() && v.im.is_finite()) {
            continue;
        }
        let error = (v - values[k - 1]).norm() + (values[k - 1] - values[k - 2]).norm();
        if error < best.error {
            best = Extrapolation { value: v, error };
        }
    }
    best.error = best.error.max(10.0 * f64::EPSILON * best.value.norm());
    best
}

/// The better of [`wynn`] and [`levin`] by estimated error.
pub(crate) fn extrapolate(seq: &[Complex64]) -> Extrapolation {
    let w = wynn(seq);
    let l = levin(seq);
    if l.error < w.error {
        l
    } else {
        w
    }
}

/// Limit of a sequence of partial integrals (or sums) by the epsilon
/// algorithm and the Levin u-transform, whichever is more self-consistent.
/// Fails when the transform's successive entries disagree by more than `tol`.
pub fn accelerate(partials: &[Complex64], tol: f64) -> Result<(Complex64, f64)> {
    if partials.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "acceleration needs at least 4 partial values, got {}",
            partials.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let last = partials[partials.len() - 1];
    if partials.iter().all(|p| *p == last) {
        return Ok((last, 0.0));
    }
    let est = extrapolate(partials);
    if est.error <= tol && est.value.re.is_finite() && est.value.im.is_finite() {
        Ok((est.value, est.error))
    } else {
        Err(Error::NotAccelerated { estimate: est.value, error: est.error })
    }
}
