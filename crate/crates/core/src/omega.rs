//! Ω_f(s) = ∫ v_s f, Ψ_f(s) = ∫ u_s f, and the Alexiewicz norm `sup |F|`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{Primitive, TestFunction};
use crate::error::{Error, Result};
use crate::kernels;
use crate::quadrature::{self, IntegrandSpec, QuadResult, Status, TailComponent};
use crate::transform::SamplingGrid;
use crate::weight::Weight;

pub const NORM_GRID_POINTS: usize = 4001;
const NORM_PADDING: f64 = 0.2;
const REFINE_ROUNDS: usize = 3;
const REFINE_POINTS: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ViaF,
    ViaPrimitive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaSample {
    pub s: f64,
    pub value: Complex64,
    pub error_estimate: f64,
    pub route: Route,
    pub evaluations: usize,
    pub status: Status,
}

impl OmegaSample {
    fn from_quad(s: f64, q: QuadResult, route: Route) -> Self {
        OmegaSample { s, value: q.value, error_estimate: q.error_estimate, route, evaluations: q.evaluations, status: q.status }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must be positive and finite, got {tol}")))
    }
}

/// `Ω_f(s)`. `Ω_f(0) = 0` exactly; for real `f`, `Ω_f(-s) = conj Ω_f(s)`
/// is used for negative `s`.
pub fn omega(f: &TestFunction, s: f64, tol: f64) -> Result<OmegaSample> {
    check_tol(tol)?;
    if s == 0.0 {
        return Ok(OmegaSample::from_quad(0.0, QuadResult::zero(), Route::ViaF));
    }
    if f.is_real_valued() && s < 0.0 {
        let mut o = omega(f, -s, tol)?;
        o.s = s;
        o.value = o.value.conj();
        return Ok(o);
    }
    omega_raw(f, s, tol)
}

fn omega_raw(f: &TestFunction, s: f64, tol: f64) -> Result<OmegaSample> {
    let q = f.integrate_against(&Weight::omega(s), tol)?.require(&format!("Ω of `{}` at s = {s}", f.id()))?;
    Ok(OmegaSample::from_quad(s, q, Route::ViaF))
}

/// `Ω(s) = -∫ F(t) ∂_t v_s(t) dt` for a primitive `F` with `F(-∞) = 0`.
pub fn omega_from_primitive(primitive: &Primitive, s: f64, tol: f64) -> Result<OmegaSample> {
    check_tol(tol)?;
    if s == 0.0 {
        return Ok(OmegaSample::from_quad(0.0, QuadResult::zero(), Route::ViaPrimitive));
    }
    let integrand = |t: f64| -primitive.eval(t) * kernels::v_dt(s, t);
    let context = format!("Ω from a primitive at s = {s}");
    let q = match primitive.support_hint() {
        Some((alpha, beta)) => {
            let spec = IntegrandSpec::new(integrand).oscillation(s);
            let inner = quadrature::integrate_finite(&spec, alpha, beta, tol)?;
            // F = F(∞) on [β, ∞) and v_s(∞) = 0
            inner.combine(QuadResult::exact(primitive.limit_at_plus_infinity() * kernels::v(s, beta)))
        }
        None => {
            // ∂_t v_s(t) = (ist - 2)/t³ + e^{-ist}(ist + 2)/t³
            let tail = || -> Vec<TailComponent<'_>> {
                vec![
                    TailComponent::new(0.0, move |t| {
                        -primitive.eval(t) * Complex64::new(-2.0, s * t) / (t * t * t)
                    }),
                    TailComponent::new(-s, move |t| {
                        -primitive.eval(t) * Complex64::new(2.0, s * t) / (t * t * t)
                    }),
                ]
            };
            let spec = IntegrandSpec::new(integrand).oscillation(s).upper_tail(tail()).lower_tail(tail());
            quadrature::integrate_line(&spec, tol)?
        }
    };
    Ok(OmegaSample::from_quad(s, q.require(&context)?, Route::ViaPrimitive))
}

/// `Ψ_f(s) = ∫_0^s f̂ = ∫ u_s f`, defined for integrable and `L^p` inputs.
pub fn psi(f: &TestFunction, s: f64, tol: f64) -> Result<QuadResult> {
    check_tol(tol)?;
    if f.is_distribution_only() || !(f.is_l1() || f.is_lp()) {
        return Err(Error::Ineligible(format!("Ψ needs an L1 or Lp input, `{}` is neither", f.id())));
    }
    if s == 0.0 {
        return Ok(QuadResult::zero());
    }
    if f.is_real_valued() && s < 0.0 {
        let r = psi(f, -s, tol)?;
        return Ok(QuadResult { value: -r.value.conj(), ..r });
    }
    f.integrate_against(&Weight::psi(s), tol)?.require(&format!("Ψ of `{}` at s = {s}", f.id()))
}

/// [`omega`] at every point of a grid, in grid order.
pub fn omega_grid(f: &TestFunction, grid: &SamplingGrid, tol: f64) -> Vec<Result<OmegaSample>> {
    grid.points().par_iter().map(|&s| omega(f, s, tol)).collect()
}

pub enum NormSource<'a> {
    Function(&'a TestFunction),
    Primitive(&'a Primitive),
}

/// Grid estimate of `‖f‖ = sup_x |F(x)|`. The value is a lower bound: the
/// maximum over the grid, the refinement around the best grid point, and
/// `|F(∞)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlexiewiczNorm {
    pub value: f64,
    pub grid_max: f64,
    /// Increase of the maximum produced by the local refinement.
    pub refinement_change: f64,
    pub argmax: f64,
    pub limit: f64,
    pub points: usize,
}

/// The default norm grid: the support (or the nominal extent) padded by
/// 20% on each side.
pub fn default_norm_grid(source: &NormSource<'_>) -> Result<SamplingGrid> {
    let (lo, hi) = match source {
        NormSource::Function(f) => f.get_support().unwrap_or_else(|| f.get_extent()),
        NormSource::Primitive(p) => p.support_hint().unwrap_or((-20.0, 20.0)),
    };
    let pad = NORM_PADDING * (hi - lo);
    SamplingGrid::uniform(lo - pad, hi + pad, NORM_GRID_POINTS)
}

/// `F` at sorted points: the first by a half-line integral, the rest by
/// parallel increments and a prefix sum.
fn cumulative_values(f: &TestFunction, xs: &[f64], tol: f64) -> Result<Vec<Complex64>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    let share = tol / xs.len() as f64;
    let first = f.cumulative(xs[0], tol)?.require("cumulative integral")?.value;
    let increments: Vec<Result<Complex64>> = xs
        .par_windows(2)
        .map(|w| Ok(f.integrate_between(w[0], w[1], share.max(1e-15))?.require("cumulative increment")?.value))
        .collect();
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = first;
    out.push(acc);
    for inc in increments {
        acc += inc?;
        out.push(acc);
    }
    Ok(out)
}

fn primitive_values(source: &NormSource<'_>, xs: &[f64], tol: f64) -> Result<Vec<Complex64>> {
    match source {
        NormSource::Primitive(p) => Ok(xs.iter().map(|x| p.eval(*x)).collect()),
        NormSource::Function(f) => match f.get_primitive() {
            Some(p) => Ok(xs.iter().map(|x| p.eval(*x)).collect()),
            None => cumulative_values(f, xs, tol),
        },
    }
}

pub fn alexiewicz_norm(source: &NormSource<'_>, grid: Option<&SamplingGrid>, tol: f64) -> Result<AlexiewiczNorm> {
    check_tol(tol)?;
    let default;
    let grid = match grid {
        Some(g) => g,
        None => {
            default = default_norm_grid(source)?;
            &default
        }
    };
    let limit = match source {
        NormSource::Primitive(p) => p.limit_at_plus_infinity().norm(),
        NormSource::Function(f) => match f.get_primitive() {
            Some(p) => p.limit_at_plus_infinity().norm(),
            None => f.integral(tol)?.require("integral over the line")?.value.norm(),
        },
    };
    let xs = grid.points();
    if xs.is_empty() {
        return Ok(AlexiewiczNorm { value: limit, grid_max: 0.0, refinement_change: 0.0, argmax: f64::INFINITY, limit, points: 0 });
    }
    let values = primitive_values(source, xs, tol)?;
    let (mut best_i, mut grid_max) = (0, 0.0);
    for (i, v) in values.iter().enumerate() {
        if v.norm() > grid_max {
            grid_max = v.norm();
            best_i = i;
        }
    }
    let mut argmax = xs[best_i];
    let mut best = grid_max;
    let mut points = xs.len();
    if xs.len() > 1 {
        let mut radius = xs[(best_i + 1).min(xs.len() - 1)] - xs[best_i.saturating_sub(1)];
        for _ in 0..REFINE_ROUNDS {
            let local = SamplingGrid::uniform(argmax - radius, argmax + radius, REFINE_POINTS)?;
            let local_values = primitive_values(source, local.points(), tol)?;
            points += REFINE_POINTS;
            for (x, v) in local.points().iter().zip(&local_values) {
                if v.norm() > best {
                    best = v.norm();
                    argmax = *x;
                }
            }
            radius *= 4.0 / (REFINE_POINTS - 1) as f64;
        }
    }
    let (value, argmax) = if limit > best { (limit, f64::INFINITY) } else { (best, argmax) };
    Ok(AlexiewiczNorm { value, grid_max, refinement_change: best - grid_max, argmax, limit, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, lookup_default, Component};
    use crate::special::{erf, sine_integral};
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    const C: f64 = 1.936071040763141709;

    #[test]
    fn gauss_at_one_matches_the_double_integral() {
        let expected = PI * (erf(1.0 / 2f64.sqrt()) + (2.0 / PI).sqrt() * ((-0.5f64).exp() - 1.0));
        let o = omega(&lookup_default("gauss").unwrap(), 1.0, 1e-12).unwrap();
        assert!((o.value.re - expected).abs() < 1e-10 && o.value.im.abs() < 1e-12, "{o:?}");
        assert!((expected - 1.158450919616096273).abs() < 1e-14);
    }

    #[test]
    fn omega_at_zero_is_exactly_zero() {
        for id in ["gauss", "sinc_abs", "fresnel4"] {
            let o = omega(&lookup_default(id).unwrap(), 0.0, 1e-10).unwrap();
            assert_eq!(o.value, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn indicator_small_s_asymptotic() {
        let s = 1e-3;
        let o = omega(&lookup_default("indicator").unwrap(), s, 1e-14).unwrap();
        assert!((o.value / (s * s) - 0.5).norm() < 1e-3, "{:?}", o.value / (s * s));
    }

    #[test]
    fn negative_s_is_conjugate_for_real_f() {
        let f = lookup_default("triangle").unwrap();
        let shifted = f.shifted(0.3).unwrap();
        for s in [0.7, 3.0] {
            let plus = omega(&shifted, s, 1e-11).unwrap().value;
            let raw = omega_raw(&shifted, -s, 1e-11).unwrap().value;
            assert!((raw - plus.conj()).norm() < 1e-9, "{raw} vs {plus}");
        }
    }

    #[test]
    fn routes_agree() {
        for id in ["indicator", "gauss", "sinc_abs", "triangle", "log_lorentz"] {
            let f = lookup_default(id).unwrap();
            let p = f.get_primitive().unwrap();
            for s in [0.5, 2.0, 7.0] {
                let a = omega(&f, s, 1e-10).unwrap();
                let b = omega_from_primitive(p, s, 1e-10).unwrap();
                assert_eq!(b.route, Route::ViaPrimitive);
                let slack = 10.0 * (a.error_estimate + b.error_estimate) + 1e-9;
                assert!((a.value - b.value).norm() < slack, "{id} s={s}: {} vs {}", a.value, b.value);
            }
        }
    }

    #[test]
    fn zero_primitive_gives_zero() {
        let p = Primitive::real(|_| 0.0, 0.0);
        assert!(omega_from_primitive(&p, 1.3, 1e-10).unwrap().value.norm() < 1e-14);
    }

    fn weierstrass(terms: u32) -> Primitive {
        Primitive::real(
            move |x| {
                let taper = (PI * x).sin().powi(2);
                (1..=terms).map(|k| 2f64.powf(-0.5 * k as f64) * (4f64.powi(k as i32) * x).cos()).sum::<f64>() * taper
            },
            0.0,
        )
        .with_support(0.0, 1.0)
        .unwrap()
    }

    #[test]
    fn weierstrass_primitive_is_stable() {
        let a = omega_from_primitive(&weierstrass(7), 1.0, 1e-10).unwrap();
        let b = omega_from_primitive(&weierstrass(8), 1.0, 1e-10).unwrap();
        assert!(a.value.norm().is_finite());
        let bound = 2f64.powf(-4.0) * C;
        assert!((a.value - b.value).norm() < 1e-6 && (a.value - b.value).norm() <= bound, "{} {}", a.value, b.value);
    }

    #[test]
    fn psi_examples() {
        let gauss = lookup_default("gauss").unwrap();
        let expected = (2.0 * PI).sqrt() * (PI / 2.0).sqrt() * erf(1.0 / 2f64.sqrt());
        let r = psi(&gauss, 1.0, 1e-12).unwrap();
        assert!((r.value.re - expected).abs() < 1e-10, "{r:?}");
        assert_eq!(psi(&gauss, 0.0, 1e-10).unwrap().value, Complex64::new(0.0, 0.0));
        let odd = lookup_default("odd_lorentz").unwrap();
        let r = psi(&odd, 1.0, 1e-11).unwrap();
        let expected = Complex64::new(0.0, -PI * (1.0 - (-1.0f64).exp()));
        assert!((r.value - expected).norm() < 1e-8, "{r:?}");
        let neg = psi(&odd, -1.0, 1e-11).unwrap();
        assert!((neg.value + r.value.conj()).norm() < 1e-12);
    }

    #[test]
    fn psi_refuses_hk_only_input() {
        let f = lookup_default("sinc_abs").unwrap();
        assert!(matches!(psi(&f, 1.0, 1e-8), Err(Error::Ineligible(_))));
    }

    #[test]
    fn psi_matches_integrated_transform() {
        let f = lookup_default("triangle").unwrap();
        let fhat = f.transform_fn().unwrap();
        let spec = IntegrandSpec::new(move |x| fhat(x));
        for s in [0.5, 2.5] {
            let direct = quadrature::integrate_finite(&spec, 0.0, s, 1e-13).unwrap().value;
            let p = psi(&f, s, 1e-11).unwrap().value;
            assert!((direct - p).norm() < 1e-8, "{direct} vs {p}");
        }
    }

    #[test]
    fn norm_examples() {
        let ind = lookup_default("indicator").unwrap();
        let n = alexiewicz_norm(&NormSource::Function(&ind), None, 1e-10).unwrap();
        assert!((n.value - 1.0).abs() < 1e-12, "{n:?}");

        let half = |sign: f64| move |t: f64| Complex64::new(0.0, -0.5 * sign / t);
        let tails = || vec![Component::new(1.0, half(1.0)), Component::new(-1.0, half(-1.0))];
        let sinc = TestFunction::custom_real("sinc", crate::special::sinc)
            .parity(crate::catalog::Parity::Even)
            .conditionally_convergent()
            .tails(tails(), tails());
        let grid = SamplingGrid::uniform(-10.0, 10.0, 2001).unwrap();
        let n = alexiewicz_norm(&NormSource::Function(&sinc), Some(&grid), 1e-10).unwrap();
        let expected = PI / 2.0 + sine_integral(PI);
        assert!((n.value - expected).abs() < 1e-8, "{n:?}");
        assert!((expected - 3.4227333787773627896).abs() < 1e-14);
        assert!((n.argmax - PI).abs() < 1e-3);

        let z = TestFunction::zero();
        assert_eq!(alexiewicz_norm(&NormSource::Function(&z), None, 1e-10).unwrap().value, 0.0);
    }

    #[test]
    fn norm_from_quadrature_matches_primitive() {
        let f = lookup_default("gauss").unwrap();
        let p = f.get_primitive().unwrap().clone();
        let bare = TestFunction::custom_real("g", |t| (-0.5 * t * t).exp());
        let grid = SamplingGrid::uniform(-6.0, 6.0, 201).unwrap();
        let a = alexiewicz_norm(&NormSource::Primitive(&p), Some(&grid), 1e-10).unwrap();
        let b = alexiewicz_norm(&NormSource::Function(&bare), Some(&grid), 1e-10).unwrap();
        assert!((a.value - b.value).abs() < 1e-8, "{a:?} {b:?}");
    }

    fn norm(f: &TestFunction) -> f64 {
        alexiewicz_norm(&NormSource::Function(f), None, 1e-9).unwrap().value
    }

    #[test]
    fn bound_holds_across_the_catalog() {
        let mut p = BTreeMap::new();
        p.insert("nu".to_string(), 2.0);
        let entries = [
            lookup_default("indicator").unwrap(),
            lookup_default("gauss").unwrap(),
            lookup_default("sinc_abs").unwrap(),
            lookup_default("triangle").unwrap(),
            lookup("bessel_window", &p).unwrap(),
        ];
        for f in &entries {
            let n = norm(f);
            for s in [0.1, 1.0, 10.0] {
                let o = omega(f, s, 1e-11).unwrap();
                assert!(o.value.norm() <= C * n * s * s + 1e-9, "{} s={s}: {} > {}", f.id(), o.value.norm(), C * n * s * s);
            }
        }
    }

    #[test]
    fn large_s_decay_for_integrable_entries() {
        for id in ["indicator", "gauss", "triangle"] {
            let s = 1e3;
            let o = omega(&lookup_default(id).unwrap(), s, 1e-8).unwrap();
            assert!(o.value.norm() / (s * s) < 1e-2, "{id}: {}", o.value.norm() / (s * s));
        }
    }

    #[test]
    fn holder_modulus_is_bounded() {
        for id in ["indicator", "gauss", "sinc_abs"] {
            let f = lookup_default(id).unwrap();
            let n = norm(&f);
            let mut ratios = Vec::new();
            for s in [0.0, 1.0, 5.0] {
                let base = omega(&f, s, 1e-13).unwrap().value;
                for h in [1e-2, 1e-3, 1e-4] {
                    let next = omega(&f, s + h, 1e-13).unwrap().value;
                    let scale = n * (s.abs() * h * h.ln().abs() + (s * s + 1.0) * h);
                    ratios.push((next - base).norm() / scale);
                }
            }
            let max = ratios.iter().copied().fold(0.0, f64::max);
            assert!(max < 10.0, "{id}: {ratios:?}");
        }
    }

    #[test]
    fn first_central_difference_vanishes() {
        for id in ["gauss", "triangle", "bessel_k0"] {
            let f = lookup_default(id).unwrap();
            let h = 1e-3;
            for s in [0.5, 2.0] {
                let o: Vec<Complex64> = [s - h, s, s + h].iter().map(|x| omega(&f, *x, 1e-13).unwrap().value).collect();
                let d = (o[2] - 2.0 * o[1] + o[0]) / h;
                assert!(d.norm() < 1e-2 * (1.0 + o[1].norm()), "{id} s={s}: {d}");
            }
        }
    }

    #[test]
    fn grid_keeps_order() {
        let f = lookup_default("gauss").unwrap();
        let grid = SamplingGrid::new(vec![-2.0, 0.0, 0.5, 3.0]).unwrap();
        let out = omega_grid(&f, &grid, 1e-10);
        let ss: Vec<f64> = out.iter().map(|o| o.as_ref().unwrap().s).collect();
        assert_eq!(ss, grid.points());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn bound_and_conjugation(s in -20.0f64..20.0) {
                let f = lookup_default("gauss").unwrap().shifted(0.4).unwrap();
                let o = omega(&f, s, 1e-11).unwrap().value;
                let n = (2.0 * PI).sqrt();
                prop_assert!(o.norm() <= C * n * s * s + 1e-9);
                let minus = omega(&f, -s, 1e-11).unwrap().value;
                prop_assert!((minus - o.conj()).norm() < 1e-12);
            }

            #[test]
            fn linear_in_f(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, s in 0.1f64..8.0) {
                let f = lookup_default("gauss").unwrap();
                let g = lookup_default("triangle").unwrap();
                let h = TestFunction::linear_combination(alpha, &f, beta, &g).unwrap();
                let lhs = omega(&h, s, 1e-11).unwrap().value;
                let rhs = alpha * omega(&f, s, 1e-11).unwrap().value + beta * omega(&g, s, 1e-11).unwrap().value;
                prop_assert!((lhs - rhs).norm() < 1e-8 * (1.0 + rhs.norm()));
            }
        }
    }
}
