//! Pointwise values of `f̂ = Ω_f''` from second central differences of Ω,
//! with Richardson extrapolation in the step, and the closed route for
//! compactly supported primitives.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{Primitive, TestFunction};
use crate::error::{Error, Result};
use crate::omega;
use crate::quadrature::{self, IntegrandSpec, QuadResult, Status};
use crate::weight::Weight;

pub const DEFAULT_H0: f64 = 0.25;
pub const DEFAULT_LEVELS: usize = 4;

/// Ω values are never requested more accurately than this.
const OMEGA_TOL_FLOOR: f64 = 1e-13;

/// A strictly increasing list of finite sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    points: Vec<f64>,
    /// Common spacing when the points are equally spaced.
    spacing: Option<f64>,
}

impl SamplingGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("grid points must be finite".to_string()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("grid points must be strictly increasing".to_string()));
        }
        Ok(SamplingGrid { points, spacing: None })
    }

    /// `count` equally spaced points from `min` to `max` inclusive; a single
    /// point requires `min == max`.
    pub fn uniform(min: f64, max: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter("a grid needs at least one point".to_string()));
        }
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid bounds must be finite, got [{min}, {max}]")));
        }
        if count == 1 {
            if min != max {
                return Err(Error::InvalidParameter("a one-point grid needs min = max".to_string()));
            }
            return Ok(SamplingGrid { points: vec![min], spacing: None });
        }
        if min >= max {
            return Err(Error::InvalidParameter(format!("grid needs min < max, got [{min}, {max}]")));
        }
        let step = (max - min) / (count - 1) as f64;
        let points = (0..count).map(|i| if i + 1 == count { max } else { min + step * i as f64 }).collect();
        Ok(SamplingGrid { points, spacing: Some(step) })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> Option<f64> {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformStatus {
    Converged,
    /// The Richardson diagonal did not settle monotonically; the error
    /// estimate is inflated to the largest diagonal change.
    NonMonotone,
    /// Within `2·h0` of a singularity of `f̂`; a single unextrapolated
    /// difference quotient is reported.
    NearSingularity,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformEstimate {
    pub s: f64,
    pub value: Complex64,
    pub h_used: f64,
    pub extrapolation_levels: usize,
    pub error_estimate: f64,
    pub status: TransformStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
    }
}

fn omega_tol(tol: f64, h: f64) -> f64 {
    (0.25 * tol * h * h).max(OMEGA_TOL_FLOOR)
}

fn quotient(plus: QuadResult, centre: QuadResult, minus: QuadResult, h: f64) -> QuadResult {
    let scale = 1.0 / (h * h);
    QuadResult {
        value: (plus.value - centre.value * 2.0 + minus.value) * scale,
        error_estimate: (plus.error_estimate + 2.0 * centre.error_estimate + minus.error_estimate) * scale,
        evaluations: plus.evaluations + centre.evaluations + minus.evaluations,
        status: plus.status.worst(centre.status).worst(minus.status),
    }
}

fn omega_result(f: &TestFunction, s: f64, tol: f64) -> Result<QuadResult> {
    let o = omega::omega(f, s, tol)?;
    Ok(QuadResult { value: o.value, error_estimate: o.error_estimate, evaluations: o.evaluations, status: o.status })
}

/// `(Ω_f(s+h) - 2Ω_f(s) + Ω_f(s-h)) / h²`.
pub fn ft_second_difference(f: &TestFunction, s: f64, h: f64, tol: f64) -> Result<QuadResult> {
    check_positive("h", h)?;
    check_positive("tolerance", tol)?;
    let t = omega_tol(tol, h);
    let plus = omega_result(f, s + h, t)?;
    let centre = omega_result(f, s, t)?;
    let minus = omega_result(f, s - h, t)?;
    Ok(quotient(plus, centre, minus, h))
}

/// `∫ e^{-ist} sinc²(ht/2) f(t) dt`, equal to [`ft_second_difference`] and
/// computed without differencing.
pub fn ft_windowed(f: &TestFunction, s: f64, h: f64, tol: f64) -> Result<QuadResult> {
    check_positive("h", h)?;
    check_positive("tolerance", tol)?;
    if f.is_real_valued() && s < 0.0 {
        let r = ft_windowed(f, -s, h, tol)?;
        return Ok(QuadResult { value: r.value.conj(), ..r });
    }
    f.integrate_against(&Weight::fejer(s, h), tol)?.require(&format!("windowed transform of `{}` at s = {s}", f.id()))
}

/// Richardson extrapolation of [`ft_second_difference`] over the steps
/// `h_k = h0·2^{-k}`, `k < levels`, eliminating `h², h⁴, ...` in turn.
pub fn ft_extrapolated(f: &TestFunction, s: f64, h0: f64, levels: usize, tol: f64) -> Result<TransformEstimate> {
    check_positive("h0", h0)?;
    check_positive("tolerance", tol)?;
    if levels < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 extrapolation levels, got {levels}")));
    }
    if f.is_real_valued() && s < 0.0 {
        let mut e = ft_extrapolated(f, -s, h0, levels, tol)?;
        e.s = s;
        e.value = e.value.conj();
        return Ok(e);
    }
    let steps: Vec<f64> = (0..levels).map(|k| h0 / 2f64.powi(k as i32)).collect();
    let h_min = steps[levels - 1];
    let t = omega_tol(tol, h_min);
    let mut abscissae = vec![s];
    for h in &steps {
        abscissae.push(s + h);
        abscissae.push(s - h);
    }
    let omegas: Vec<Result<QuadResult>> = abscissae.par_iter().map(|x| omega_result(f, *x, t)).collect();
    let omegas: Vec<QuadResult> = omegas.into_iter().collect::<Result<_>>()?;
    let centre = omegas[0];
    let quotients: Vec<QuadResult> =
        steps.iter().enumerate().map(|(k, h)| quotient(omegas[1 + 2 * k], centre, omegas[2 + 2 * k], *h)).collect();

    let mut table: Vec<Vec<Complex64>> = Vec::with_capacity(levels);
    for (k, q) in quotients.iter().enumerate() {
        let mut row = vec![q.value];
        for j in 1..=k {
            let factor = 4f64.powi(j as i32);
            let prev = table[k - 1][j - 1];
            let cur = row[j - 1];
            row.push(cur + (cur - prev) / (factor - 1.0));
        }
        table.push(row);
    }
    let n = levels - 1;
    let value = table[n][n];
    let quad_error = quotients.iter().map(|q| q.error_estimate).fold(0.0, f64::max);
    let mut error = (table[n][n] - table[n][n - 1]).norm() + 2.0 * quad_error;
    let changes: Vec<f64> = (1..=n).map(|k| (table[k][k] - table[k - 1][k - 1]).norm()).collect();
    let noise = 10.0 * quad_error + 1e-14 * value.norm();
    let monotone = changes.windows(2).all(|w| w[1] <= w[0] + noise);
    let status = if monotone {
        TransformStatus::Converged
    } else {
        error = error.max(changes.iter().copied().fold(0.0, f64::max));
        TransformStatus::NonMonotone
    };
    let status = if quotients.iter().any(|q| q.status == Status::Failed) { TransformStatus::Failed } else { status };
    Ok(TransformEstimate {
        s,
        value,
        h_used: h_min,
        extrapolation_levels: levels,
        error_estimate: error,
        status,
        message: None,
    })
}

/// `F(∞)e^{-isβ} + is ∫_α^β e^{-ist} F(t) dt` for `F` constant outside
/// `[α, β]`.
pub fn ft_compact_support(primitive: &Primitive, s: f64, tol: f64) -> Result<QuadResult> {
    check_positive("tolerance", tol)?;
    let (alpha, beta) = primitive
        .support_hint()
        .ok_or_else(|| Error::Missing("the primitive has no declared support".to_string()))?;
    let boundary = primitive.limit_at_plus_infinity() * Complex64::from_polar(1.0, -s * beta);
    if s == 0.0 {
        return Ok(QuadResult::exact(boundary));
    }
    let spec = IntegrandSpec::new(|t| Complex64::from_polar(1.0, -s * t) * primitive.eval(t));
    let inner = quadrature::integrate_finite(&spec, alpha, beta, tol / s.abs())?.require("compact-support transform")?;
    let scaled = inner.scale(Complex64::new(0.0, s));
    Ok(QuadResult { value: boundary + scaled.value, ..scaled })
}

/// [`ft_extrapolated`] at every grid point, in grid order. Points within
/// `2·h0` of a declared singularity of `f̂` get a single difference quotient
/// at `h0` instead; failures are recorded per point.
pub fn ft_grid(f: &TestFunction, grid: &SamplingGrid, h0: f64, levels: usize, tol: f64) -> Vec<TransformEstimate> {
    grid.points()
        .par_iter()
        .map(|&s| {
            let near = f.get_transform_singularities().iter().any(|p| (p - s).abs() < 2.0 * h0);
            let outcome = if near {
                ft_second_difference(f, s, h0, tol).map(|q| TransformEstimate {
                    s,
                    value: q.value,
                    h_used: h0,
                    extrapolation_levels: 1,
                    error_estimate: f64::INFINITY,
                    status: TransformStatus::NearSingularity,
                    message: None,
                })
            } else {
                ft_extrapolated(f, s, h0, levels, tol)
            };
            outcome.unwrap_or_else(|e| TransformEstimate {
                s,
                value: Complex64::new(f64::NAN, f64::NAN),
                h_used: h0,
                extrapolation_levels: 0,
                error_estimate: f64::INFINITY,
                status: TransformStatus::Failed,
                message: Some(e.to_string()),
            })
        })
        .collect()
}
