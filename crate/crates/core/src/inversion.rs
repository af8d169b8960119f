//! Recovering `f` from `f̂`: summability kernels in the Alexiewicz norm, and
//! pointwise `L^p` inversion through the second derivative of `Ω_{f̂}`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{Component, Primitive, TestFunction};
use crate::error::{Error, Result};
use crate::omega::{self, alexiewicz_norm, AlexiewiczNorm, NormSource};
use crate::quadrature::{self, IntegrandSpec, QuadResult};
use crate::special::{erfc, sinc, sine_integral};
use crate::transform::SamplingGrid;
use crate::weight::Weight;

/// Summability kernels `K_a` on the transform side and their mates `ψ_a`,
/// related by `K_a = ψ̂_a / 2π` so that `ψ_a(x) = ∫ e^{ixs} K_a(s) ds`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    CesaroFejer,
    AbelPoisson,
    GaussWeierstrass,
    /// Not an approximate identity in the Alexiewicz norm; kept so that
    /// callers get an explanation rather than a number.
    Dirichlet,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 4] =
        [KernelFamily::CesaroFejer, KernelFamily::AbelPoisson, KernelFamily::GaussWeierstrass, KernelFamily::Dirichlet];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::CesaroFejer => "cesaro_fejer",
            KernelFamily::AbelPoisson => "abel_poisson",
            KernelFamily::GaussWeierstrass => "gauss_weierstrass",
            KernelFamily::Dirichlet => "dirichlet",
        }
    }

    pub fn is_admissible(self) -> bool {
        self != KernelFamily::Dirichlet
    }

    /// `K_a(s)`.
    pub fn k(self, a: f64, s: f64) -> f64 {
        let inside = s.abs() <= 1.0 / a;
        let base = match self {
            KernelFamily::CesaroFejer => {
                if inside {
                    1.0 - a * s.abs()
                } else {
                    0.0
                }
            }
            KernelFamily::AbelPoisson => (-a * s.abs()).exp(),
            KernelFamily::GaussWeierstrass => (-a * a * s * s).exp(),
            KernelFamily::Dirichlet => {
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
        };
        base / (2.0 * PI)
    }

    /// `ψ_a(x)`.
    pub fn psi(self, a: f64, x: f64) -> f64 {
        match self {
            KernelFamily::CesaroFejer => {
                let w = sinc(0.5 * x / a);
                w * w / (2.0 * PI * a)
            }
            KernelFamily::AbelPoisson => a / (PI * (x * x + a * a)),
            KernelFamily::GaussWeierstrass => (-x * x / (4.0 * a * a)).exp() / (2.0 * a * PI.sqrt()),
            KernelFamily::Dirichlet => sinc(x / a) / (PI * a),
        }
    }

    /// `∫_{-∞}^x ψ_a`.
    pub fn psi_cdf(self, a: f64, x: f64) -> f64 {
        match self {
            KernelFamily::CesaroFejer => {
                let y = x / a;
                let half = (0.5 * y).sin();
                let tail = if y == 0.0 { 0.0 } else { 2.0 * half * half / y };
                0.5 + (sine_integral(y) - tail) / PI
            }
            KernelFamily::AbelPoisson => 0.5 + (x / a).atan() / PI,
            KernelFamily::GaussWeierstrass => 0.5 * erfc(-x / (2.0 * a)),
            KernelFamily::Dirichlet => 0.5 + sine_integral(x / a) / PI,
        }
    }

    /// `ψ_a` as a catalog-style function, with its far-field structure.
    pub fn psi_function(self, a: f64) -> Result<TestFunction> {
        check_a(a)?;
        let f = TestFunction::custom_real(self.name(), move |x| self.psi(a, x))
            .parity(crate::catalog::Parity::Even)
            .with_param("a", a);
        Ok(match self {
            KernelFamily::CesaroFejer => {
                let tail = move || {
                    vec![
                        Component::new(0.0, move |t| Complex64::new(a / (PI * t * t), 0.0)),
                        Component::new(1.0 / a, move |t| Complex64::new(-a / (2.0 * PI * t * t), 0.0)),
                        Component::new(-1.0 / a, move |t| Complex64::new(-a / (2.0 * PI * t * t), 0.0)),
                    ]
                };
                f.tails(tail(), tail()).flags([crate::catalog::Flag::L1])
            }
            KernelFamily::Dirichlet => {
                let tail = move || {
                    vec![
                        Component::new(1.0 / a, |t| Complex64::new(0.0, -0.5 / (PI * t))),
                        Component::new(-1.0 / a, |t| Complex64::new(0.0, 0.5 / (PI * t))),
                    ]
                };
                f.tails(tail(), tail()).conditionally_convergent().flags([crate::catalog::Flag::HkOnly])
            }
            _ => f.flags([crate::catalog::Flag::L1]),
        })
    }

    /// `K_a` as a function of `s`, with derivatives and jumps declared, and
    /// transform `ψ_a`.
    pub fn k_function(self, a: f64) -> Result<TestFunction> {
        check_a(a)?;
        let re = |x: f64| Complex64::new(x, 0.0);
        let scale = 1.0 / (2.0 * PI);
        let f = TestFunction::custom_real(&format!("k_{}", self.name()), move |s| self.k(a, s))
            .parity(crate::catalog::Parity::Even)
            .with_param("a", a)
            .transform(move |t| re(self.psi(a, t)))
            .flags([crate::catalog::Flag::L1]);
        Ok(match self {
            KernelFamily::CesaroFejer => f
                .derivatives(move |s| re(if s.abs() < 1.0 / a { -a * s.signum() * scale } else { 0.0 }), move |_| re(0.0))
                .derivative_jump(-1.0 / a, a * scale)
                .derivative_jump(0.0, -2.0 * a * scale)
                .derivative_jump(1.0 / a, a * scale)
                .support(-1.0 / a, 1.0 / a),
            KernelFamily::AbelPoisson => f
                .derivatives(
                    move |s| re(-a * s.signum() * (-a * s.abs()).exp() * scale),
                    move |s| re(a * a * (-a * s.abs()).exp() * scale),
                )
                .derivative_jump(0.0, -2.0 * a * scale),
            KernelFamily::GaussWeierstrass => f.derivatives(
                move |s| re(-2.0 * a * a * s * (-a * a * s * s).exp() * scale),
                move |s| re((4.0 * a.powi(4) * s * s - 2.0 * a * a) * (-a * a * s * s).exp() * scale),
            ),
            KernelFamily::Dirichlet => f
                .derivatives(move |_| re(0.0), move |_| re(0.0))
                .value_jump(-1.0 / a, scale)
                .value_jump(1.0 / a, -scale)
                .support(-1.0 / a, 1.0 / a),
        })
    }

    /// `t ↦ ψ_a(x - t)` as a weight.
    fn weight(self, a: f64, x: f64) -> Weight<'static> {
        let w = Weight::real(move |t| self.psi(a, x - t)).singular_points([x]);
        match self {
            KernelFamily::CesaroFejer => {
                let phase = Complex64::from_polar(1.0, x / a);
                w.both(0.0, move |t| Complex64::new(a / (PI * (x - t) * (x - t)), 0.0))
                    .both(-1.0 / a, move |t| -phase * a / (2.0 * PI * (x - t) * (x - t)))
                    .both(1.0 / a, move |t| -phase.conj() * a / (2.0 * PI * (x - t) * (x - t)))
            }
            _ => w,
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', ' '], "_");
        KernelFamily::ALL
            .into_iter()
            .find(|k| k.name() == key || k.name().replace('_', "") == key)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown kernel family `{s}` (expected cesaro_fejer, abel_poisson, gauss_weierstrass or dirichlet)"
                ))
            })
    }
}

fn check_a(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("kernel scale a must be positive and finite, got {a}")))
    }
}

fn check_family(family: KernelFamily) -> Result<()> {
    if family.is_admissible() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "the Dirichlet kernel does not give convergence in the Alexiewicz norm: its p_2ψ̂' is not of bounded \
             variation; use cesaro_fejer, abel_poisson or gauss_weierstrass"
                .to_string(),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inversion {
    pub x: f64,
    pub a: f64,
    pub family: KernelFamily,
    /// `(f∗ψ_a)(x)`.
    pub value: Complex64,
    pub error_estimate: f64,
    /// `∫ e^{ixs} K_a(s) f̂(s) ds`, when `f̂` is known in closed form.
    pub spectral: Option<Complex64>,
    pub spectral_error: Option<f64>,
}

/// `I_a[f](x) = (f∗ψ_a)(x)`, with the spectral form as a cross-check when
/// `f̂` is available.
pub fn invert(f: &TestFunction, family: KernelFamily, a: f64, x: f64, tol: f64) -> Result<Inversion> {
    check_family(family)?;
    check_a(a)?;
    let conv = f.integrate_against(&family.weight(a, x), tol)?.require(&format!("{family} convolution at x = {x}"))?;
    let spectral = match f.transform_fn() {
        Some(f_hat) => Some(spectral_inverse(&f_hat, f.get_transform_singularities(), family, a, x, tol)?),
        None => None,
    };
    Ok(Inversion {
        x,
        a,
        family,
        value: conv.value,
        error_estimate: conv.error_estimate,
        spectral: spectral.map(|q| q.value),
        spectral_error: spectral.map(|q| q.error_estimate),
    })
}

fn spectral_inverse(
    f_hat: &crate::catalog::ComplexFn,
    singular: &[f64],
    family: KernelFamily,
    a: f64,
    x: f64,
    tol: f64,
) -> Result<QuadResult> {
    let spec = IntegrandSpec::new(move |s| Complex64::from_polar(family.k(a, s), x * s) * f_hat(s))
        .singular_points(singular.iter().copied().chain([0.0]))
        .oscillation(x);
    let context = format!("{family} spectral inversion at x = {x}");
    let r = match family {
        KernelFamily::CesaroFejer => quadrature::integrate_finite(&spec, -1.0 / a, 1.0 / a, tol)?,
        _ => quadrature::integrate_line(&spec, tol)?,
    };
    r.require(&context)
}

/// Grid estimate of `‖f - I_a[f]‖`.
///
/// The primitive of `f - f∗ψ_a` is `F - F∗ψ_a`. It is computed from the
/// primitive of `f` when one is known, and otherwise as `∫ f(t)(1_{t<x} -
/// Φ_a(x-t)) dt` with `Φ_a` the distribution function of `ψ_a`; the second
/// route is used for the non-oscillating kernels only.
pub fn inversion_error(
    f: &TestFunction,
    family: KernelFamily,
    a: f64,
    grid: Option<&SamplingGrid>,
    tol: f64,
) -> Result<AlexiewiczNorm> {
    check_family(family)?;
    check_a(a)?;
    let failed = Arc::new(AtomicBool::new(false));
    let flag = failed.clone();
    let g: Box<dyn Fn(f64) -> Complex64 + Send + Sync> = match f.get_primitive() {
        Some(p) => {
            let p = p.clone();
            let big_f = TestFunction::custom("F", {
                let p = p.clone();
                move |t| p.eval(t)
            });
            Box::new(move |x| {
                match big_f.integrate_against(&family.weight(a, x), tol).and_then(|r| r.require("F∗ψ_a")) {
                    Ok(r) => p.eval(x) - r.value,
                    Err(_) => {
                        flag.store(true, Ordering::Relaxed);
                        Complex64::new(f64::NAN, f64::NAN)
                    }
                }
            })
        }
        None if family != KernelFamily::CesaroFejer => {
            let f = f.clone();
            Box::new(move |x| {
                let w = Weight::real(move |t| if t < x { 1.0 } else { 0.0 } - family.psi_cdf(a, x - t)).singular_points([x]);
                match f.integrate_against(&w, tol).and_then(|r| r.require("f∗(H - Φ_a)")) {
                    Ok(r) => r.value,
                    Err(_) => {
                        flag.store(true, Ordering::Relaxed);
                        Complex64::new(f64::NAN, f64::NAN)
                    }
                }
            })
        }
        None => {
            return Err(Error::Missing(format!(
                "`{}` has no primitive; the {family} error norm needs one",
                f.id()
            )))
        }
    };
    let difference = Primitive::new(g, Complex64::new(0.0, 0.0));
    let default;
    let grid = match grid {
        Some(g) => g,
        None => {
            default = omega::default_norm_grid(&NormSource::Function(f))?;
            &default
        }
    };
    let norm = alexiewicz_norm(&NormSource::Primitive(&difference), Some(grid), tol)?;
    if failed.load(Ordering::Relaxed) {
        return Err(Error::Convergence {
            context: format!("{family} inversion error of `{}`", f.id()),
            detail: "a convolution did not converge".to_string(),
        });
    }
    Ok(norm)
}

/// [`inversion_error`] for several kernel scales.
pub fn inversion_error_sweep(
    f: &TestFunction,
    family: KernelFamily,
    scales: &[f64],
    grid: Option<&SamplingGrid>,
    tol: f64,
) -> Vec<Result<AlexiewiczNorm>> {
    scales.par_iter().map(|a| inversion_error(f, family, *a, grid, tol)).collect()
}

/// `f(x) = (1/2π) d²/dx² Ω_{f̂}(-x)` by a second central difference in `h`
/// with one Richardson step.
pub fn lp_pointwise_inverse(f: &TestFunction, x: f64, h: f64, tol: f64) -> Result<QuadResult> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("h must be positive and finite, got {h}")));
    }
    let g = f.transform_as_function()?;
    let omega_tol = (0.1 * tol * h * h).max(1e-14);
    let points = [-x - h, -x - 0.5 * h, -x, -x + 0.5 * h, -x + h];
    let values: Vec<Result<QuadResult>> = points
        .par_iter()
        .map(|s| {
            let o = omega::omega(&g, *s, omega_tol)?;
            Ok(QuadResult { value: o.value, error_estimate: o.error_estimate, evaluations: o.evaluations, status: o.status })
        })
        .collect();
    let v: Vec<QuadResult> = values.into_iter().collect::<Result<_>>()?;
    let quad_err = v.iter().map(|q| q.error_estimate).sum::<f64>();
    let d_h = (v[0].value - 2.0 * v[2].value + v[4].value) / (h * h);
    let d_half = (v[1].value - 2.0 * v[2].value + v[3].value) / (0.25 * h * h);
    let value = (4.0 * d_half - d_h) / 3.0 / (2.0 * PI);
    let error = ((d_half - d_h).norm() / 3.0 + 8.0 * quad_err / (h * h)) / (2.0 * PI);
    let status = v.iter().fold(v[0].status, |s, q| s.worst(q.status));
    Ok(QuadResult { value, error_estimate: error, evaluations: v.iter().map(|q| q.evaluations).sum(), status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup_default;
    use crate::special::erf;

    const ADMISSIBLE: [KernelFamily; 3] =
        [KernelFamily::CesaroFejer, KernelFamily::AbelPoisson, KernelFamily::GaussWeierstrass];

    #[test]
    fn kernel_mass_is_one() {
        for fam in ADMISSIBLE {
            for a in [1.0, 0.1] {
                let m = fam.psi_function(a).unwrap().integral(1e-12).unwrap().value;
                assert!((m.re - 1.0).abs() < 1e-10 && m.im.abs() < 1e-12, "{fam} a={a}: {m}");
            }
        }
    }

    #[test]
    fn kernels_are_transform_pairs() {
        for fam in KernelFamily::ALL {
            for a in [1.0, 0.25] {
                let psi = fam.psi_function(a).unwrap();
                for s in [0.0, 0.5 / a] {
                    let t = psi.integrate_against(&Weight::fourier(s), 1e-12).unwrap().value;
                    assert!((t.re - 2.0 * PI * fam.k(a, s)).abs() < 1e-8 && t.im.abs() < 1e-10, "{fam} a={a} s={s}: {t}");
                }
            }
        }
    }

    #[test]
    fn cdf_matches_quadrature() {
        for fam in KernelFamily::ALL {
            let a = 0.3;
            let psi = fam.psi_function(a).unwrap();
            for x in [-1.0, 0.2, 2.5] {
                let q = psi.cumulative(x, 1e-12).unwrap().value.re;
                assert!((q - fam.psi_cdf(a, x)).abs() < 1e-9, "{fam} x={x}: {q} vs {}", fam.psi_cdf(a, x));
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for fam in KernelFamily::ALL {
            assert_eq!(fam.name().parse::<KernelFamily>().unwrap(), fam);
        }
        assert_eq!("Gauss-Weierstrass".parse::<KernelFamily>().unwrap(), KernelFamily::GaussWeierstrass);
        assert!("box".parse::<KernelFamily>().is_err());
    }

    #[test]
    fn dirichlet_is_rejected() {
        let f = lookup_default("gauss").unwrap();
        let e = invert(&f, KernelFamily::Dirichlet, 0.5, 0.0, 1e-8).unwrap_err();
        assert!(matches!(e, Error::Unsupported(ref m) if m.contains("Dirichlet")));
    }

    #[test]
    fn gaussian_convolution() {
        let f = lookup_default("gauss").unwrap();
        let a: f64 = 0.5;
        let inv = invert(&f, KernelFamily::GaussWeierstrass, a, 0.0, 1e-12).unwrap();
        // e^{-t²/2} ∗ N(0, 2a²) at 0
        let expected = 1.0 / (1.0 + 2.0 * a * a).sqrt();
        assert!((inv.value.re - expected).abs() < 1e-10, "{inv:?}");
        assert!((inv.spectral.unwrap().re - expected).abs() < 1e-9, "{inv:?}");
    }

    #[test]
    fn indicator_gauss_weierstrass_limit() {
        let f = lookup_default("indicator").unwrap();
        let a = 0.02;
        let inv = invert(&f, KernelFamily::GaussWeierstrass, a, 0.5, 1e-12).unwrap();
        let expected = 0.5 * (erf(0.5 / (2.0 * a)) + erf(0.5 / (2.0 * a)));
        assert!((inv.value.re - expected).abs() < 1e-10);
        assert!((inv.value.re - 1.0).abs() < 1e-3);
        let mid = invert(&f, KernelFamily::GaussWeierstrass, a, 0.0, 1e-12).unwrap();
        assert!((mid.value.re - 0.5).abs() < 1e-3, "{mid:?}");
    }

    #[test]
    fn zero_function_inverts_to_zero() {
        let z = TestFunction::zero();
        for fam in ADMISSIBLE {
            assert_eq!(invert(&z, fam, 0.3, 0.7, 1e-10).unwrap().value.norm(), 0.0);
            assert_eq!(inversion_error(&z, fam, 0.3, None, 1e-10).unwrap().value, 0.0);
        }
    }

    #[test]
    fn routes_agree() {
        for id in ["gauss", "triangle", "indicator"] {
            let f = lookup_default(id).unwrap();
            for fam in ADMISSIBLE {
                for x in [0.0, 0.3, 1.7] {
                    let inv = invert(&f, fam, 0.25, x, 1e-11).unwrap();
                    let sp = inv.spectral.unwrap();
                    assert!((inv.value - sp).norm() < 1e-7, "{id} {fam} x={x}: {} vs {sp}", inv.value);
                }
            }
        }
    }

    #[test]
    fn approximate_identity_at_continuity_points() {
        for id in ["gauss", "triangle"] {
            let f = lookup_default(id).unwrap();
            for fam in ADMISSIBLE {
                for x in [0.0, 0.3] {
                    let target = f.eval(x);
                    let mut last = f64::INFINITY;
                    for a in [0.4, 0.2, 0.1, 0.05] {
                        let d = (invert(&f, fam, a, x, 1e-12).unwrap().value - target).norm();
                        assert!(d <= last + 1e-8, "{id} {fam} x={x} a={a}: {d} after {last}");
                        last = d;
                    }
                }
            }
        }
    }

    #[test]
    fn error_norm_decreases() {
        let tri = lookup_default("triangle").unwrap();
        let grid = SamplingGrid::uniform(-3.0, 3.0, 241).unwrap();
        let errs: Vec<f64> = inversion_error_sweep(&tri, KernelFamily::GaussWeierstrass, &[0.4, 0.2, 0.1], Some(&grid), 1e-10)
            .into_iter()
            .map(|r| r.unwrap().value)
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");

        let ind = lookup_default("indicator").unwrap();
        let e4 = inversion_error(&ind, KernelFamily::CesaroFejer, 0.4, Some(&grid), 1e-10).unwrap().value;
        let e1 = inversion_error(&ind, KernelFamily::CesaroFejer, 0.1, Some(&grid), 1e-10).unwrap().value;
        assert!(e4 > e1, "{e4} {e1}");
    }

    #[test]
    fn error_norm_without_primitive_agrees() {
        let tri = lookup_default("triangle").unwrap();
        let bare = TestFunction::custom_real("tri", |t| (1.0 - t.abs()).max(0.0)).support(-1.0, 1.0).singular_points([0.0]);
        let grid = SamplingGrid::uniform(-2.0, 2.0, 81).unwrap();
        for fam in [KernelFamily::GaussWeierstrass, KernelFamily::AbelPoisson] {
            let a = inversion_error(&tri, fam, 0.2, Some(&grid), 1e-10).unwrap().value;
            let b = inversion_error(&bare, fam, 0.2, Some(&grid), 1e-10).unwrap().value;
            assert!((a - b).abs() < 1e-7, "{fam}: {a} vs {b}");
        }
        assert!(matches!(inversion_error(&bare, KernelFamily::CesaroFejer, 0.2, Some(&grid), 1e-10), Err(Error::Missing(_))));
    }

    #[test]
    fn lp_inverse_examples() {
        let f = lookup_default("odd_lorentz").unwrap();
        let r = lp_pointwise_inverse(&f, 1.0, 0.05, 1e-8).unwrap();
        assert!((r.value - 0.5).norm() < 1e-3, "{r:?}");
        let z = lp_pointwise_inverse(&f, 0.0, 0.05, 1e-8).unwrap();
        assert!(z.value.norm() < 1e-6, "{z:?}");
        assert!(matches!(lp_pointwise_inverse(&lookup_default("fresnel4").unwrap(), 1.0, 0.05, 1e-8), Err(Error::Missing(_))));
    }

    #[test]
    fn proof_identity() {
        let f = lookup_default("odd_lorentz").unwrap();
        let g = f.transform_as_function().unwrap();
        let lhs = omega::omega(&g, -1.0, 1e-12).unwrap().value / (2.0 * PI);
        let spec = IntegrandSpec::real(|y| (1.0 - y) * y / (1.0 + y * y));
        let rhs = quadrature::integrate_finite(&spec, 0.0, 1.0, 1e-14).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-6, "{lhs} vs {rhs}");
        assert!((rhs.re - 0.13197175367742096432).abs() < 1e-14);
    }
}
