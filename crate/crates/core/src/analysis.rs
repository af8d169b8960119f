//! Bounded-variation measures, exchange-formula eligibility and checks,
//! convolution identities and the `s^{-ν} log(1 + y²/(s-x)²)` integral.
//!
//! Moment and variation integrals are computed on geometric shells: halving
//! toward every finite breakpoint and doubling toward infinity. The ratio of
//! consecutive shells decides between a convergent geometric remainder and
//! divergence, which is reported as `f64::INFINITY` rather than an error.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{Flag, Parity, TestFunction};
use crate::error::{Error, Result};
use crate::kernels;
use crate::omega::{self, NormSource};
use crate::quadrature::{self, DecayClass, IntegrandSpec, QuadResult, Status};
use crate::special;
use crate::transform::{self, DEFAULT_H0, DEFAULT_LEVELS};
use crate::weight::Weight;

/// Radius past which partial integrals growing by more than 1% per doubling
/// are declared divergent.
pub const DIVERGENCE_RADIUS: f64 = 1e4;
const GROWTH_INFINITE: f64 = 1e-2;
const GROWTH_BORDERLINE: f64 = 1e-4;
const RATIO_INFINITE: f64 = 1.0 - 1e-4;
const RATIO_BORDERLINE: f64 = 0.99;
const MAX_SHELLS: usize = 46;
const OUTER_LIMIT: f64 = 1e8;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must be positive and finite, got {tol}")))
    }
}

/// A nonnegative integral, `+∞` when divergence was detected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measure {
    pub value: f64,
    /// The shell ratios were close to the divergence threshold.
    pub borderline: bool,
}

impl Measure {
    pub const INFINITE: Measure = Measure { value: f64::INFINITY, borderline: false };

    pub fn finite(value: f64) -> Self {
        Measure { value, borderline: false }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    fn add(self, other: Measure) -> Measure {
        Measure { value: self.value + other.value, borderline: self.borderline || other.borderline }
    }
}

/// Geometric ratio of the last shells, averaged over three steps.
fn shell_ratio(sums: &[f64]) -> f64 {
    let k = sums.len();
    if k < 4 {
        return if k >= 2 && sums[k - 2] > 0.0 { sums[k - 1] / sums[k - 2] } else { 0.0 };
    }
    let (first, last) = (sums[k - 4], sums[k - 1]);
    if first > 0.0 {
        (last / first).cbrt()
    } else if last > 0.0 {
        2.0
    } else {
        0.0
    }
}

fn geometric_tail(last: f64, r: f64) -> f64 {
    if r < 1.0 {
        last * r / (1.0 - r)
    } else {
        0.0
    }
}

fn shell(h: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let spec = IntegrandSpec::real(h);
    Ok(quadrature::integrate_finite(&spec, a.min(b), a.max(b), tol)?.value.re)
}

/// `∫ h` from `m` to the endpoint `e`, on shells halving toward `e`.
fn shells_toward(h: &dyn Fn(f64) -> f64, m: f64, e: f64, tol: f64) -> Result<Measure> {
    let w = m - e;
    let mut sums: Vec<f64> = Vec::new();
    let mut total: f64 = 0.0;
    for k in 0..MAX_SHELLS {
        let outer = e + w / 2f64.powi(k as i32);
        let inner = e + w / 2f64.powi(k as i32 + 1);
        if inner == outer || inner == e {
            break;
        }
        let s = shell(h, inner, outer, 1e-2 * tol * total.max(1.0))?;
        if !s.is_finite() {
            return Ok(Measure::INFINITE);
        }
        sums.push(s);
        total += s;
        if sums.len() >= 4 && s <= 1e-3 * tol * total.max(1.0) {
            return Ok(Measure::finite(total + geometric_tail(s, shell_ratio(&sums))));
        }
    }
    let r = shell_ratio(&sums);
    if r >= RATIO_INFINITE {
        return Ok(Measure::INFINITE);
    }
    let last = sums.last().copied().unwrap_or(0.0);
    Ok(Measure { value: total + geometric_tail(last, r), borderline: r > RATIO_BORDERLINE })
}

/// `∫_start^∞ h` on shells of doubling width.
fn shells_outward(h: &dyn Fn(f64) -> f64, start: f64, tol: f64) -> Result<Measure> {
    let mut width = start.abs().max(1.0);
    let mut edge = start;
    let mut sums: Vec<f64> = Vec::new();
    let mut total: f64 = 0.0;
    let mut growth_at_radius: Option<f64> = None;
    loop {
        let next = edge + width;
        let s = shell(h, edge, next, 1e-2 * tol * total.max(1.0))?;
        if !s.is_finite() {
            return Ok(Measure::INFINITE);
        }
        sums.push(s);
        total += s;
        edge = next;
        width *= 2.0;
        if sums.len() >= 4 && s <= 1e-3 * tol * total.max(1.0) {
            return Ok(Measure::finite(total + geometric_tail(s, shell_ratio(&sums))));
        }
        if edge > DIVERGENCE_RADIUS {
            let growth = if total > 0.0 { s / total } else { 0.0 };
            if growth > GROWTH_INFINITE {
                return Ok(Measure::INFINITE);
            }
            growth_at_radius.get_or_insert(growth);
        }
        if edge > OUTER_LIMIT {
            let r = shell_ratio(&sums);
            if r >= RATIO_INFINITE {
                return Ok(Measure::INFINITE);
            }
            let borderline = growth_at_radius.unwrap_or(0.0) > GROWTH_BORDERLINE || r > RATIO_BORDERLINE;
            return Ok(Measure { value: total + geometric_tail(s, r), borderline });
        }
    }
}

/// `∫_lo^hi h` for `h ≥ 0` with divergence detection.
///
/// `breaks` lists every point where `h` may be singular or non-smooth;
/// `lo`/`hi` may be infinite. Each piece between consecutive breaks is
/// integrated on shells halving toward both ends, and infinite ends on shells
/// of doubling width. A shell ratio that does not fall below 1 marks the
/// integral as infinite.
pub fn positive_integral(h: &(dyn Fn(f64) -> f64 + Sync), lo: f64, hi: f64, breaks: &[f64], tol: f64) -> Result<Measure> {
    check_tol(tol)?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidParameter(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let mut knots: Vec<f64> = breaks.iter().copied().filter(|b| b.is_finite() && *b > lo && *b < hi).collect();
    knots.extend([lo, hi].into_iter().filter(|x| x.is_finite()));
    if knots.is_empty() {
        knots.push(0.0);
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut total = Measure::finite(0.0);
    for pair in knots.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let m = 0.5 * (a + b);
        total = total.add(shells_toward(h, m, a, tol)?).add(shells_toward(h, m, b, tol)?);
    }
    if lo == f64::NEG_INFINITY {
        total = total.add(shells_outward(&|t| h(-t), -knots[0], tol)?);
    }
    if hi == f64::INFINITY {
        total = total.add(shells_outward(h, knots[knots.len() - 1], tol)?);
    }
    if !total.value.is_finite() {
        return Ok(Measure::INFINITE);
    }
    Ok(total)
}

/// `var(g)` on `interval`: `∫|g'|` over the smooth pieces plus the jump
/// magnitudes at the breakpoints.
///
/// Without an explicit derivative, `g'` is taken by a Richardson-extrapolated
/// central difference whose step stays clear of the breakpoints. Jumps are
/// sampled as `g(b+ε) - g(b-ε)`.
pub fn total_variation(
    g: &(dyn Fn(f64) -> Complex64 + Sync),
    derivative: Option<&(dyn Fn(f64) -> Complex64 + Sync)>,
    breakpoints: &[f64],
    interval: (f64, f64),
    tol: f64,
) -> Result<Measure> {
    let (lo, hi) = interval;
    let mut breaks: Vec<f64> = breakpoints.iter().copied().filter(|b| *b > lo && *b < hi).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut fences = breaks.clone();
    fences.extend([lo, hi].into_iter().filter(|x| x.is_finite()));

    let numeric = |s: f64| -> Complex64 {
        let gap = fences.iter().map(|b| (s - b).abs()).fold(f64::INFINITY, f64::min);
        let h = (1e-3 * s.abs().max(1.0)).min(0.25 * gap);
        let d = |h: f64| (g(s + h) - g(s - h)) / (2.0 * h);
        (d(0.5 * h) * 4.0 - d(h)) / 3.0
    };
    let slope = |s: f64| -> f64 {
        match derivative {
            Some(d) => d(s).norm(),
            None => numeric(s).norm(),
        }
    };
    let mut total = positive_integral(&slope, lo, hi, &breaks, tol)?;
    for b in &breaks {
        let eps = 1e-12 * b.abs().max(1.0);
        total = total.add(Measure::finite((g(b + eps) - g(b - eps)).norm()));
    }
    Ok(total)
}

/// Verdict on the exchange-formula hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Eligible,
    Ineligible,
    /// Eligible, but a deciding integral sat near the divergence threshold.
    Borderline,
}

/// Moment and variation integrals of `g` deciding whether
/// `∫ f̂ g = ∫ f ĝ` may be evaluated through `∫ Ω_f dg'`.
///
/// Infinite entries are `f64::INFINITY` (serialized as `null`). With
/// `p_n(s) = s^n` and `h = p_2 g' + 2 p_1 g`:
#[derive(Debug, Clone, Serialize)]
pub struct EligibilityReport {
    /// `∫|g|`.
    pub g_l1_norm: f64,
    /// `∫|s||g'(s)| ds`, jumps of `g` included.
    pub moment1_gprime: f64,
    /// `∫ s²|dg'(s)|`.
    pub moment2_dgprime: f64,
    /// `var(p_1 g)`.
    pub var_p1g: f64,
    /// `var(p_2 g')`.
    pub var_p2gprime: f64,
    /// `var(h)`.
    pub var_h: f64,
    /// `‖h/p_1‖_1`.
    pub h_over_p1_l1: f64,
    pub verdict: Verdict,
    /// Moment route: `g`, `p_1 g'`, `p_2 dg'` all finite.
    pub moment_route: bool,
    /// Variation route: `g ∈ L¹`, `p_1 g` and `p_2 g'` of bounded variation.
    pub variation_route: bool,
    pub failing_conditions: Vec<String>,
    pub borderline_conditions: Vec<String>,
    /// Translation applied before the conditions were evaluated.
    pub shift: f64,
}

impl EligibilityReport {
    pub fn is_eligible(&self) -> bool {
        self.verdict != Verdict::Ineligible
    }
}

/// Every point where `g` or its derivatives may misbehave, plus 0 (where
/// the moment weights vanish).
fn breakpoints(g: &TestFunction) -> Vec<f64> {
    let mut b: Vec<f64> = vec![0.0];
    b.extend(g.get_singular_points());
    b.extend(g.get_power_laws().iter().map(|p| p.at));
    b.extend(g.get_derivative_jumps().iter().map(|(a, _)| *a));
    b.extend(g.get_value_jumps().iter().map(|(a, _)| *a));
    if let Some((lo, hi)) = g.get_support() {
        b.extend([lo, hi]);
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn domain(g: &TestFunction) -> (f64, f64) {
    g.get_support().unwrap_or((f64::NEG_INFINITY, f64::INFINITY))
}

const G_L1: &str = "∫|g| < ∞";
const MOMENT1: &str = "∫|s||g'(s)| ds < ∞";
const MOMENT2: &str = "∫ s²|dg'(s)| < ∞";
const VAR_P1G: &str = "var(p_1 g) < ∞";
const VAR_P2GPRIME: &str = "var(p_2 g') < ∞";
const VAR_H: &str = "var(h) < ∞";
const H_OVER_P1: &str = "‖h/p_1‖_1 < ∞";

/// Moment and variation conditions of the exchange formula for `g`,
/// computed concurrently with divergence detection. Divergence is a verdict,
/// not an error.
pub fn exchange_eligible(g: &TestFunction, tol: f64) -> Result<EligibilityReport> {
    check_tol(tol)?;
    let (lo, hi) = domain(g);
    let breaks = breakpoints(g);
    let abs_g = |s: f64| g.eval(s).norm();

    if !g.has_derivatives() {
        let l1 = positive_integral(&abs_g, lo, hi, &breaks, tol)?;
        let inf = f64::INFINITY;
        return Ok(EligibilityReport {
            g_l1_norm: l1.value,
            moment1_gprime: inf,
            moment2_dgprime: inf,
            var_p1g: inf,
            var_p2gprime: inf,
            var_h: inf,
            h_over_p1_l1: inf,
            verdict: Verdict::Ineligible,
            moment_route: false,
            variation_route: false,
            failing_conditions: vec!["g' and g'' are not declared".to_string()],
            borderline_conditions: Vec::new(),
            shift: 0.0,
        });
    }

    let d1 = |s: f64| g.derivative_at(s).unwrap_or(ZERO);
    let d2 = |s: f64| g.second_derivative_at(s).unwrap_or(ZERO);
    let integrands: Vec<Box<dyn Fn(f64) -> f64 + Sync + '_>> = vec![
        Box::new(abs_g),
        Box::new(move |s| s.abs() * d1(s).norm()),
        Box::new(move |s| s * s * d2(s).norm()),
        Box::new(move |s| (g.eval(s) + d1(s) * s).norm()),
        Box::new(move |s| (d1(s) * (2.0 * s) + d2(s) * (s * s)).norm()),
        Box::new(move |s| (d2(s) * (s * s) + d1(s) * (4.0 * s) + g.eval(s) * 2.0).norm()),
        Box::new(move |s| (d1(s) * s + g.eval(s) * 2.0).norm()),
    ];
    let measures: Vec<Measure> = integrands
        .par_iter()
        .map(|h| positive_integral(h.as_ref(), lo, hi, &breaks, tol))
        .collect::<Result<Vec<_>>>()?;

    let value_jumps: Vec<(f64, Complex64)> =
        g.get_value_jumps().iter().copied().filter(|(_, j)| j.norm() > 0.0).collect();
    let slope_jumps: f64 = g.get_derivative_jumps().iter().map(|(a, j)| a * a * j.norm()).sum();
    let first_jumps: f64 = value_jumps.iter().map(|(a, j)| a.abs() * j.norm()).sum();
    let with = |m: Measure, extra: f64, infinite: bool| {
        if infinite {
            Measure::INFINITE
        } else {
            m.add(Measure::finite(extra))
        }
    };
    let jumpy = !value_jumps.is_empty();
    let g_l1 = measures[0];
    let moment1 = with(measures[1], first_jumps, false);
    let moment2 = with(measures[2], slope_jumps, jumpy);
    let var_p1g = with(measures[3], first_jumps, false);
    let var_p2gprime = with(measures[4], slope_jumps, jumpy);
    let var_h = with(measures[5], slope_jumps, jumpy);
    let h_over_p1 = with(measures[6], 0.0, jumpy);

    let named = [
        (G_L1, g_l1),
        (MOMENT1, moment1),
        (MOMENT2, moment2),
        (VAR_P1G, var_p1g),
        (VAR_P2GPRIME, var_p2gprime),
        (VAR_H, var_h),
        (H_OVER_P1, h_over_p1),
    ];
    let failing_conditions: Vec<String> =
        named.iter().filter(|(_, m)| !m.is_finite()).map(|(n, _)| n.to_string()).collect();
    let borderline_conditions: Vec<String> =
        named.iter().filter(|(_, m)| m.borderline).map(|(n, _)| n.to_string()).collect();

    let moment_route = g_l1.is_finite() && moment1.is_finite() && moment2.is_finite();
    let variation_route = g_l1.is_finite() && var_p1g.is_finite() && var_p2gprime.is_finite();
    let clean = |ms: &[Measure]| ms.iter().all(|m| !m.borderline);
    let verdict = if !(moment_route || variation_route) {
        Verdict::Ineligible
    } else if (moment_route && clean(&[g_l1, moment1, moment2]))
        || (variation_route && clean(&[g_l1, var_p1g, var_p2gprime]))
    {
        Verdict::Eligible
    } else {
        Verdict::Borderline
    };
    Ok(EligibilityReport {
        g_l1_norm: g_l1.value,
        moment1_gprime: moment1.value,
        moment2_dgprime: moment2.value,
        var_p1g: var_p1g.value,
        var_p2gprime: var_p2gprime.value,
        var_h: var_h.value,
        h_over_p1_l1: h_over_p1.value,
        verdict,
        moment_route,
        variation_route,
        failing_conditions,
        borderline_conditions,
        shift: 0.0,
    })
}

/// The conditions for the translate `s ↦ g(s + a)`, i.e. with the moment
/// weights centred at `a`.
pub fn exchange_eligible_shifted(g: &TestFunction, shift: f64, tol: f64) -> Result<EligibilityReport> {
    let mut report = exchange_eligible(&g.shifted(-shift)?, tol)?;
    report.shift = shift;
    Ok(report)
}

/// `c = var(v_1)`, computed once.
pub fn variation_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| kernels::var_v1(1e-12).map(|c| c.value).expect("var(v_1) converges"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformSource {
    ClosedForm,
    Extrapolated,
}

/// How each side of the exchange identity was computed.
#[derive(Debug, Clone, Serialize)]
pub struct ExchangeRoutes {
    /// Always the Stieltjes route `∫ Ω_f(s) g''(s) ds + Σ Ω_f(s_j) Δg'(s_j)`.
    pub lhs: &'static str,
    /// Number of point masses from jumps of `g'`.
    pub jump_terms: usize,
    /// Source of `ĝ` in `∫ f ĝ`.
    pub rhs: TransformSource,
}

/// Both sides of `∫ f̂ g = ∫ f ĝ` with the a-priori bound on the left.
#[derive(Debug, Clone, Serialize)]
pub struct ExchangeResult {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    /// `c ‖f‖ (var(h) + 10 ‖h/p_1‖_1)`.
    pub bound: f64,
    pub norm_f: f64,
    pub variation_constant: f64,
    pub routes: ExchangeRoutes,
    pub shift: f64,
    pub eligibility: EligibilityReport,
}

impl ExchangeResult {
    pub fn difference(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// `ĝ(t)`, from the closed form when declared, otherwise by extrapolated
/// second differences of `Ω_g`.
fn transform_of<'a>(
    g: &'a TestFunction,
    tol: f64,
    failure: &'a RefCell<Option<Error>>,
) -> (Box<dyn Fn(f64) -> Complex64 + 'a>, TransformSource) {
    match g.transform_fn() {
        Some(hat) => (Box::new(move |t| hat(t)), TransformSource::ClosedForm),
        None => (
            Box::new(move |t| match transform::ft_extrapolated(g, t, DEFAULT_H0, DEFAULT_LEVELS, tol) {
                Ok(e) => e.value,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    ZERO
                }
            }),
            TransformSource::Extrapolated,
        ),
    }
}

/// `∫ Ω_f(s) dg'(s)`: the absolutely continuous part `∫ Ω_f g''` plus the
/// point masses at jumps of `g'`.
fn stieltjes_omega(f: &TestFunction, g: &TestFunction, tol: f64) -> Result<(QuadResult, usize)> {
    let omega_tol = 0.1 * tol;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let omega_at = |s: f64| -> Complex64 {
        match omega::omega(f, s, omega_tol) {
            Ok(o) => o.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                ZERO
            }
        }
    };
    let d2 = |s: f64| g.second_derivative_at(s).unwrap_or(ZERO);
    let spec = IntegrandSpec::new(|s| omega_at(s) * d2(s)).singular_points(breakpoints(g));
    let mut r = match g.get_support() {
        Some((lo, hi)) => quadrature::integrate_finite(&spec.compact_support(lo, hi), lo, hi, tol)?,
        None => quadrature::integrate_line(&spec.decay(DecayClass::AbsolutelyIntegrable), tol)?,
    };
    let jumps = g.get_derivative_jumps();
    for (at, size) in jumps {
        let o = omega::omega(f, *at, omega_tol)?;
        r = r.combine(QuadResult { value: o.value * size, error_estimate: o.error_estimate * size.norm(), evaluations: o.evaluations, status: Status::Converged });
    }
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let r = r.require("∫ Ω_f dg'")?;
    Ok((r, jumps.len()))
}

/// `∫ f ĝ` against the transform of `g`.
fn against_transform(f: &TestFunction, g: &TestFunction, tol: f64) -> Result<(QuadResult, TransformSource)> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let (hat, source) = transform_of(g, 0.1 * tol, &failure);
    let mut w = Weight::new(hat).singular_points(g.get_transform_singularities().iter().copied());
    if g.is_real_valued() {
        w = w.hermitian();
    }
    let r = f.integrate_against(&w, tol)?;
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    Ok((r.require("∫ f ĝ")?, source))
}

/// Evaluates both sides of `∫ f̂ g = ∫ f ĝ`.
///
/// The left side never touches `f̂`: it is `∫ Ω_f dg'`. The right side is
/// the ordinary integral of `f` against `ĝ`. With `shift = Some(a)` the
/// hypotheses are checked on the translate `G(s) = g(s + a)`, and the left
/// side is computed as `∫ Ω_{e^{-iat}f} dG'`, which is the same number since
/// `f̂(s + a)` is the transform of `e^{-iat} f`.
pub fn exchange_check(f: &TestFunction, g: &TestFunction, shift: Option<f64>, tol: f64) -> Result<ExchangeResult> {
    check_tol(tol)?;
    let a = shift.unwrap_or(0.0);
    let (f_eff, g_eff) = if a == 0.0 { (f.clone(), g.clone()) } else { (f.modulated(-a)?, g.shifted(-a)?) };
    let mut eligibility = exchange_eligible(&g_eff, tol)?;
    eligibility.shift = a;
    if eligibility.verdict == Verdict::Ineligible {
        return Err(Error::Ineligible(format!(
            "`{}` fails the exchange conditions: {}",
            g.id(),
            eligibility.failing_conditions.join(", ")
        )));
    }
    let (lhs, jump_terms) = stieltjes_omega(&f_eff, &g_eff, tol)?;
    let (rhs, source) = against_transform(f, g, tol)?;
    let norm = omega::alexiewicz_norm(&NormSource::Function(&f_eff), None, tol)?;
    let c = variation_constant();
    let bound = c * norm.value * (eligibility.var_h + 10.0 * eligibility.h_over_p1_l1);
    Ok(ExchangeResult {
        lhs: lhs.value,
        rhs: rhs.value,
        lhs_error: lhs.error_estimate,
        rhs_error: rhs.error_estimate,
        bound,
        norm_f: norm.value,
        variation_constant: c,
        routes: ExchangeRoutes { lhs: "stieltjes_omega", jump_terms, rhs: source },
        shift: a,
        eligibility,
    })
}

/// Numeric and closed-form values of `∫_0^∞ s^{-ν} log(1 + y²/(s-x)²) ds`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExampleIntegral {
    pub nu: f64,
    pub x: f64,
    pub y: f64,
    pub numeric: f64,
    pub closed_form: f64,
    pub error_estimate: f64,
}

impl ExampleIntegral {
    pub fn relative_error(&self) -> f64 {
        (self.numeric - self.closed_form).abs() / self.closed_form.abs()
    }
}

/// `2π²[cos(νπ) x^{1-ν} - (x²+y²)^{(1-ν)/2} sin((1-ν)θ - νπ/2)] / (Γ(ν)Γ(2-ν) sin²(νπ))`
/// with `θ = arctan(x/y) ∈ (0, π/2)`.
pub fn example_closed_form(nu: f64, x: f64, y: f64) -> f64 {
    let theta = (x / y).atan();
    let head = (nu * PI).cos() * x.powf(1.0 - nu);
    let tail = (x * x + y * y).powf(0.5 * (1.0 - nu)) * ((1.0 - nu) * theta - 0.5 * nu * PI).sin();
    let denom = special::gamma(nu) * special::gamma(2.0 - nu) * (nu * PI).sin().powi(2);
    2.0 * PI * PI * (head - tail) / denom
}

/// `∫_0^∞ s^{-ν} log(1 + y²/(s-x)²) ds` by quadrature next to its closed form.
pub fn example_integral(nu: f64, x: f64, y: f64, tol: f64) -> Result<ExampleIntegral> {
    check_tol(tol)?;
    if !(0.05..=0.95).contains(&nu) {
        return Err(Error::InvalidParameter(format!("ν must lie in [0.05, 0.95], got {nu}")));
    }
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::InvalidParameter(format!("x and y must be positive, got x = {x}, y = {y}")));
    }
    let y2 = y * y;
    let spec = IntegrandSpec::real(move |s: f64| {
        let d = s - x;
        s.powf(-nu) * (y2 / (d * d)).ln_1p()
    })
    .singular_points([0.0, x])
    .power_law(0.0, -nu)
    // logarithmic at x; the square-root substitution removes it
    .power_law(x, -0.5)
    .decay(DecayClass::AbsolutelyIntegrable);
    let head = quadrature::integrate_finite(&spec, 0.0, 2.0 * x, tol / 2.0)?;
    let tail = quadrature::integrate_upper(&spec, 2.0 * x, tol / 2.0)?;
    let r = head.combine(tail).require("example integral")?;
    Ok(ExampleIntegral {
        nu,
        x,
        y,
        numeric: r.value.re,
        closed_form: example_closed_form(nu, x, y),
        error_estimate: r.error_estimate,
    })
}

/// The two sides of a convolution identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvolutionCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub lhs_error: f64,
    pub rhs_error: f64,
}

impl ConvolutionCheck {
    pub fn relative_difference(&self) -> f64 {
        let scale = self.lhs.norm().max(self.rhs.norm());
        if scale == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).norm() / scale
        }
    }
}

/// `∫_{|t|>1} t²|g^{(n)}(t)| dt < ∞` for `n = 0, 1, 2` and `g ∈ C²`.
fn check_admissible(g: &TestFunction, tol: f64) -> Result<()> {
    if !g.has_derivatives() {
        return Err(Error::Ineligible(format!("`{}` has no declared derivatives", g.id())));
    }
    if !g.get_value_jumps().is_empty() || !g.get_derivative_jumps().is_empty() {
        return Err(Error::Ineligible(format!("`{}` is not twice continuously differentiable", g.id())));
    }
    let mut breaks = breakpoints(g);
    breaks.extend([-1.0, 1.0]);
    let (lo, hi) = domain(g);
    let derivs: [(&str, Box<dyn Fn(f64) -> Complex64 + Sync + '_>); 3] = [
        ("g", Box::new(|t| g.eval(t))),
        ("g'", Box::new(|t| g.derivative_at(t).unwrap_or(ZERO))),
        ("g''", Box::new(|t| g.second_derivative_at(t).unwrap_or(ZERO))),
    ];
    for (name, d) in &derivs {
        let h = |t: f64| if t.abs() > 1.0 { t * t * d(t).norm() } else { 0.0 };
        if !positive_integral(&h, lo, hi, &breaks, tol)?.is_finite() {
            return Err(Error::Ineligible(format!("∫_{{|t|>1}} t²|{name}| diverges for `{}`", g.id())));
        }
    }
    Ok(())
}

/// `∫ g(y) k(y) dy` over the line, honouring the structure of `g`.
fn against_line(g: &TestFunction, k: impl Fn(f64) -> Complex64, tol: f64) -> Result<QuadResult> {
    let spec = IntegrandSpec::new(move |y| g.eval(y) * k(y)).singular_points(breakpoints(g));
    match g.get_support() {
        Some((lo, hi)) => quadrature::integrate_finite(&spec.compact_support(lo, hi), lo, hi, tol),
        None => quadrature::integrate_line(&spec.decay(DecayClass::AbsolutelyIntegrable), tol),
    }
}

/// `∫ \widehat{f∗g_1} g_2 = ∫ f̂ ĝ_1 g_2`, evaluated as
/// `∫ (f∗g_1) ĝ_2` against `∫ f (g̃_1 ∗ ĝ_2)` with `g̃_1(y) = g_1(-y)`.
pub fn convolution_exchange_check(f: &TestFunction, g1: &TestFunction, g2: &TestFunction, tol: f64) -> Result<ConvolutionCheck> {
    check_tol(tol)?;
    check_admissible(g1, tol)?;
    check_admissible(g2, tol)?;
    let inner_tol = 1e-2 * tol;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let (hat2, _) = transform_of(g2, inner_tol, &failure);
    let note = |r: Result<QuadResult>| -> Complex64 {
        match r {
            Ok(q) => q.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                ZERO
            }
        }
    };

    // (f∗g_1)(t) = ∫ f(s) g_1(t - s) ds
    let conv = |t: f64| -> Complex64 {
        let shifted: Vec<f64> = breakpoints(g1).iter().map(|p| t - p).collect();
        let w = Weight::new(|s| g1.eval(t - s)).singular_points(shifted);
        note(f.integrate_against(&w, inner_tol))
    };
    let lhs_spec = IntegrandSpec::new(|t| conv(t) * hat2(t)).decay(DecayClass::AbsolutelyIntegrable);
    let lhs = quadrature::integrate_line(&lhs_spec, tol)?;

    // (g̃_1 ∗ ĝ_2)(s) = ∫ g_1(y) ĝ_2(s + y) dy
    let kernel = |s: f64| note(against_line(g1, |y| hat2(s + y), inner_tol));
    let mut w = Weight::new(kernel);
    if g1.is_real_valued() && g1.get_parity() == Some(Parity::Even) && g2.is_real_valued() {
        w = w.hermitian();
    }
    let rhs = f.integrate_against(&w, tol)?;
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let lhs = lhs.require("∫ (f∗g_1) ĝ_2")?;
    let rhs = rhs.require("∫ f (g̃_1∗ĝ_2)")?;
    Ok(ConvolutionCheck { lhs: lhs.value, rhs: rhs.value, lhs_error: lhs.error_estimate, rhs_error: rhs.error_estimate })
}

/// `g_1 ∗ g_2` by quadrature, with its derivatives `g_1 ∗ g_2'` and
/// `g_1 ∗ g_2''` (plus the jumps of `g_2'` as point masses) and the
/// transform `ĝ_1 ĝ_2` when both are known.
pub fn convolve(g1: &TestFunction, g2: &TestFunction, tol: f64) -> Result<TestFunction> {
    check_tol(tol)?;
    let conv = |kernel: std::sync::Arc<dyn Fn(f64) -> Complex64 + Send + Sync>| {
        let (g1, g2) = (g1.clone(), g2.clone());
        move |s: f64| -> Complex64 {
            let spec_breaks: Vec<f64> = breakpoints(&g2)
                .into_iter()
                .chain(breakpoints(&g1).into_iter().map(|p| s - p))
                .collect();
            let k = &kernel;
            let g1 = &g1;
            let spec = IntegrandSpec::new(move |t| g1.eval(s - t) * k(t)).singular_points(spec_breaks);
            let r = match g2.get_support() {
                Some((lo, hi)) => quadrature::integrate_finite(&spec.compact_support(lo, hi), lo, hi, tol),
                None => quadrature::integrate_line(&spec.decay(DecayClass::AbsolutelyIntegrable), tol),
            };
            r.map(|q| q.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        }
    };
    let mut out = TestFunction::custom(&format!("{}*{}", g1.id(), g2.id()), conv(g2.evaluator()));
    if g1.has_derivatives() && g2.has_derivatives() {
        let g2c = g2.clone();
        let first = conv(std::sync::Arc::new(move |t| g2c.derivative_at(t).unwrap_or(ZERO)));
        let g2c = g2.clone();
        let second_ac = conv(std::sync::Arc::new(move |t| g2c.second_derivative_at(t).unwrap_or(ZERO)));
        let (g1c, jumps) = (g1.clone(), g2.get_derivative_jumps().to_vec());
        let second = move |s: f64| {
            jumps.iter().fold(second_ac(s), |acc, (at, size)| acc + g1c.eval(s - at) * size)
        };
        out = out.derivatives(first, second);
    }
    if let (Some(h1), Some(h2)) = (g1.transform_fn(), g2.transform_fn()) {
        out = out.transform(move |s| h1(s) * h2(s));
    }
    if g1.is_real_valued() && g2.is_real_valued() {
        out = out.real_valued();
        if let (Some(p1), Some(p2)) = (g1.get_parity(), g2.get_parity()) {
            out = out.parity(if p1 == p2 { Parity::Even } else { Parity::Odd });
        }
    }
    if let (Some((a, b)), Some((c, d))) = (g1.get_support(), g2.get_support()) {
        out = out.support(a + c, b + d);
    }
    let ((a, b), (c, d)) = (g1.get_extent(), g2.get_extent());
    Ok(out.extent(a + c, b + d).flags([Flag::L1]))
}

/// `∫ f̂ (g_1∗g_2) = ∫ f ĝ_1 ĝ_2`: the left side through [`exchange_check`]
/// on the quadrature-built convolution, the right side directly.
pub fn convolution_hat_check(f: &TestFunction, g1: &TestFunction, g2: &TestFunction, tol: f64) -> Result<ConvolutionCheck> {
    check_tol(tol)?;
    for g in [g1, g2] {
        if !g.has_derivatives() || !g.get_value_jumps().is_empty() {
            return Err(Error::Ineligible(format!("`{}` is not absolutely continuous with a declared derivative", g.id())));
        }
        let (lo, hi) = domain(g);
        let breaks = breakpoints(g);
        let p1g = |s: f64| s.abs() * g.eval(s).norm();
        let p2gp = |s: f64| s * s * g.derivative_at(s).unwrap_or(ZERO).norm();
        if !positive_integral(&p1g, lo, hi, &breaks, tol)?.is_finite() {
            return Err(Error::Ineligible(format!("p_1 g ∉ L¹ for `{}`", g.id())));
        }
        if !positive_integral(&p2gp, lo, hi, &breaks, tol)?.is_finite() {
            return Err(Error::Ineligible(format!("p_2 g' ∉ L¹ for `{}`", g.id())));
        }
    }
    let (Some(h1), Some(h2)) = (g1.transform_fn(), g2.transform_fn()) else {
        return Err(Error::Missing("closed-form transforms of g_1 and g_2".to_string()));
    };
    let g = convolve(g1, g2, 1e-3 * tol)?;
    let lhs = exchange_check(f, &g, None, tol)?;
    let mut w = Weight::new(|t| h1(t) * h2(t));
    if g1.is_real_valued() && g2.is_real_valued() {
        w = w.hermitian();
    }
    let rhs = f.integrate_against(&w, tol)?.require("∫ f ĝ_1 ĝ_2")?;
    Ok(ConvolutionCheck { lhs: lhs.lhs, rhs: rhs.value, lhs_error: lhs.lhs_error, rhs_error: rhs.error_estimate })
}

/// `(1 - |t|)_+ ∗ e^{-t²/2}`: smooth, even, with transform
/// `sinc²(s/2) √(2π) e^{-s²/2}`.
pub fn triangle_smoothed_gauss() -> TestFunction {
    fn phi(x: f64) -> f64 {
        (-0.5 * x * x).exp()
    }
    // ∫_a^b φ(t - u) du and ∫_a^b (u - t) φ(t - u) du
    fn i0(a: f64, b: f64, t: f64) -> f64 {
        let r = std::f64::consts::FRAC_PI_2.sqrt();
        let s = std::f64::consts::SQRT_2;
        r * (special::erf((t - a) / s) - special::erf((t - b) / s))
    }
    fn i1(a: f64, b: f64, t: f64) -> f64 {
        phi(a - t) - phi(b - t)
    }
    let root_2pi = (2.0 * PI).sqrt();
    TestFunction::custom_real("triangle_smoothed_gauss", |t| {
        (1.0 + t) * i0(-1.0, 0.0, t) + i1(-1.0, 0.0, t) + (1.0 - t) * i0(0.0, 1.0, t) - i1(0.0, 1.0, t)
    })
    .parity(Parity::Even)
    .derivatives(
        |t| Complex64::new(i0(-1.0, 0.0, t) - i0(0.0, 1.0, t), 0.0),
        |t| Complex64::new(phi(t + 1.0) - 2.0 * phi(t) + phi(t - 1.0), 0.0),
    )
    .transform(move |s| {
        let half = 0.5 * s;
        let sinc = if half == 0.0 { 1.0 } else { half.sin() / half };
        Complex64::new(sinc * sinc * root_2pi * (-0.5 * s * s).exp(), 0.0)
    })
    .extent(-10.0, 10.0)
    .flags([Flag::L1])
}
