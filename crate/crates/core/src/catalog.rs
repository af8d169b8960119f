//! Registry of example functions with closed-form transforms.
//!
//! Each entry bundles the function, its primitive when one is known in closed
//! form, its Fourier transform `f̂(s) = ∫ e^{-ist} f(t) dt` when known, and
//! the structural facts the integrators need: singular points, power-law
//! endpoint behaviour, support, parity, and the oscillatory make-up of the
//! tails. Entries intended as multipliers `g` in the exchange formula also
//! carry `g'`, `g''` and the jumps of `g'`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernels;
use crate::quadrature::{self, DecayClass, IntegrandSpec, PowerLaw, QuadResult, TailComponent};
use crate::special;
use crate::weight::Weight;

/// A shareable complex-valued function of one real variable.
pub type ComplexFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn complex_fn(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> ComplexFn {
    Arc::new(f)
}

fn real_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ComplexFn {
    Arc::new(move |t| Complex64::new(f(t), 0.0))
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Classification of a test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flag {
    L1,
    HkOnly,
    CompactSupport,
    /// In `L^p` exactly for `p > p_above`, not in `L^1`.
    LpOnly { p_above: f64 },
    DistributionOnly,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flag::L1 => write!(f, "L1"),
            Flag::HkOnly => write!(f, "HK_only"),
            Flag::CompactSupport => write!(f, "compact_support"),
            Flag::LpOnly { p_above } => write!(f, "Lp_only(p>{p_above})"),
            Flag::DistributionOnly => write!(f, "distribution_only"),
        }
    }
}

impl Serialize for Flag {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

/// A continuous primitive `F` with `F(-∞) = 0`, standing for the
/// distribution `F'`.
#[derive(Clone)]
pub struct Primitive {
    evaluator: ComplexFn,
    limit: Complex64,
    support: Option<(f64, f64)>,
}

impl Primitive {
    pub fn new(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static, limit_at_plus_infinity: Complex64) -> Self {
        Primitive { evaluator: Arc::new(f), limit: limit_at_plus_infinity, support: None }
    }

    pub fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'static, limit_at_plus_infinity: f64) -> Self {
        Primitive { evaluator: real_fn(f), limit: re(limit_at_plus_infinity), support: None }
    }

    /// Declares `F = 0` left of `lo` and `F = F(∞)` right of `hi`; the
    /// evaluator is only consulted inside.
    pub fn with_support(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!("support must be a finite interval, got [{lo}, {hi}]")));
        }
        self.support = Some((lo, hi));
        Ok(self)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        if let Some((lo, hi)) = self.support {
            if x <= lo {
                return ZERO;
            }
            if x >= hi {
                return self.limit;
            }
        }
        (self.evaluator)(x)
    }

    pub fn limit_at_plus_infinity(&self) -> Complex64 {
        self.limit
    }

    pub fn support_hint(&self) -> Option<(f64, f64)> {
        self.support
    }
}

impl fmt::Debug for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Primitive").field("limit", &self.limit).field("support", &self.support).finish()
    }
}

/// One term `e^{iωt}·a(t)` of a function's behaviour far out on a half-line.
#[derive(Clone)]
pub struct Component {
    pub frequency: f64,
    pub amplitude: ComplexFn,
}

impl Component {
    pub fn new(frequency: f64, amplitude: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Component { frequency, amplitude: Arc::new(amplitude) }
    }
}

/// `f(t) = t^α e^{i t^p}` for `t > 0` and zero for `t < 0`. Integrals
/// against such a function are taken in the variable `u = t^p`, where the
/// oscillation has constant frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chirp {
    pub amplitude_exponent: f64,
    pub phase_power: f64,
}

/// A named parameter of a catalog entry and its allowed closed range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
    pub description: &'static str,
}

/// A function of the catalog (or a user-built one) with its metadata.
#[derive(Clone)]
pub struct TestFunction {
    id: String,
    params: BTreeMap<String, f64>,
    f: ComplexFn,
    primitive: Option<Primitive>,
    transform: Option<ComplexFn>,
    flags: Vec<Flag>,
    real_valued: bool,
    parity: Option<Parity>,
    singular_points: Vec<f64>,
    power_laws: Vec<PowerLaw>,
    support: Option<(f64, f64)>,
    conditionally_convergent: bool,
    upper_tail: Vec<Component>,
    lower_tail: Vec<Component>,
    extent: Option<(f64, f64)>,
    derivative: Option<ComplexFn>,
    second_derivative: Option<ComplexFn>,
    derivative_jumps: Vec<(f64, Complex64)>,
    value_jumps: Vec<(f64, Complex64)>,
    transform_singularities: Vec<f64>,
    chirp: Option<Chirp>,
    metadata: BTreeMap<String, f64>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.id)
            .field("params", &self.params)
            .field("flags", &self.flags)
            .finish_non_exhaustive()
    }
}

impl TestFunction {
    /// A function with no metadata besides its values; hints are added with
    /// the builder methods.
    pub fn custom(id: &str, f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        TestFunction {
            id: id.to_string(),
            params: BTreeMap::new(),
            f: Arc::new(f),
            primitive: None,
            transform: None,
            flags: Vec::new(),
            real_valued: false,
            parity: None,
            singular_points: Vec::new(),
            power_laws: Vec::new(),
            support: None,
            conditionally_convergent: false,
            upper_tail: Vec::new(),
            lower_tail: Vec::new(),
            extent: None,
            derivative: None,
            second_derivative: None,
            derivative_jumps: Vec::new(),
            value_jumps: Vec::new(),
            transform_singularities: Vec::new(),
            chirp: None,
            metadata: BTreeMap::new(),
        }
    }

    /// A real-valued [`custom`](Self::custom) function.
    pub fn custom_real(id: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let mut tf = Self::custom(id, move |t| re(f(t)));
        tf.real_valued = true;
        tf
    }

    /// The zero function.
    pub fn zero() -> Self {
        Self::custom_real("zero", |_| 0.0)
            .parity(Parity::Even)
            .primitive(Primitive::real(|_| 0.0, 0.0))
            .transform(|_| ZERO)
            .support(-1.0, 1.0)
            .derivatives(|_| ZERO, |_| ZERO)
            .flags([Flag::L1, Flag::CompactSupport])
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn real_valued(mut self) -> Self {
        self.real_valued = true;
        self
    }

    pub fn parity(mut self, parity: Parity) -> Self {
        self.parity = Some(parity);
        self
    }

    pub fn primitive(mut self, primitive: Primitive) -> Self {
        self.primitive = Some(primitive);
        self
    }

    pub fn transform(mut self, f_hat: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        self.transform = Some(Arc::new(f_hat));
        self
    }

    pub fn flags(mut self, flags: impl IntoIterator<Item = Flag>) -> Self {
        self.flags.extend(flags);
        self
    }

    pub fn singular_points(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.singular_points.extend(points);
        self.singular_points.sort_by(f64::total_cmp);
        self.singular_points.dedup();
        self
    }

    /// An integrable singularity like `|t - at|^exponent`, `exponent > -1`.
    pub fn power_law(mut self, at: f64, exponent: f64) -> Self {
        self.power_laws.push(PowerLaw { at, exponent });
        self.singular_points([at])
    }

    /// `f = 0` outside `[lo, hi]`.
    pub fn support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    /// The integral over the line exists only as a limit of integrals over
    /// expanding intervals.
    pub fn conditionally_convergent(mut self) -> Self {
        self.conditionally_convergent = true;
        self
    }

    /// The function as sums of single-frequency terms for large `t > 0`
    /// (`upper`) and large `t < 0` (`lower`).
    pub fn tails(mut self, upper: Vec<Component>, lower: Vec<Component>) -> Self {
        self.upper_tail = upper;
        self.lower_tail = lower;
        self
    }

    /// Interval outside which the primitive is essentially constant.
    pub fn extent(mut self, lo: f64, hi: f64) -> Self {
        self.extent = Some((lo, hi));
        self
    }

    pub fn derivatives(
        mut self,
        first: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        second: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Arc::new(first));
        self.second_derivative = Some(Arc::new(second));
        self
    }

    /// A jump `f'(at+) - f'(at-)` of the first derivative.
    pub fn derivative_jump(mut self, at: f64, size: f64) -> Self {
        self.derivative_jumps.push((at, re(size)));
        self.singular_points([at])
    }

    /// A jump `f(at+) - f(at-)` of the function itself.
    pub fn value_jump(mut self, at: f64, size: f64) -> Self {
        self.value_jumps.push((at, re(size)));
        self.singular_points([at])
    }

    /// Points where `f̂` is singular.
    pub fn transform_singularities(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.transform_singularities.extend(points);
        self
    }

    pub fn chirp(mut self, chirp: Chirp) -> Self {
        self.chirp = Some(chirp);
        self
    }

    pub fn metadata(mut self, key: &str, value: f64) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        (self.f)(t)
    }

    pub fn evaluator(&self) -> ComplexFn {
        self.f.clone()
    }

    pub fn get_primitive(&self) -> Option<&Primitive> {
        self.primitive.as_ref()
    }

    pub fn transform_at(&self, s: f64) -> Option<Complex64> {
        self.transform.as_ref().map(|g| g(s))
    }

    pub fn transform_fn(&self) -> Option<ComplexFn> {
        self.transform.clone()
    }

    pub fn get_flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn is_l1(&self) -> bool {
        self.flags.contains(&Flag::L1)
    }

    pub fn is_lp(&self) -> bool {
        self.flags.iter().any(|f| matches!(f, Flag::LpOnly { .. }))
    }

    pub fn is_distribution_only(&self) -> bool {
        self.flags.contains(&Flag::DistributionOnly)
    }

    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    pub fn get_parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn get_singular_points(&self) -> &[f64] {
        &self.singular_points
    }

    pub fn get_power_laws(&self) -> &[PowerLaw] {
        &self.power_laws
    }

    pub fn get_support(&self) -> Option<(f64, f64)> {
        self.support
    }

    pub fn is_conditionally_convergent(&self) -> bool {
        self.conditionally_convergent
    }

    pub fn get_extent(&self) -> (f64, f64) {
        self.extent.or(self.support).unwrap_or((-20.0, 20.0))
    }

    pub fn derivative_at(&self, t: f64) -> Option<Complex64> {
        self.derivative.as_ref().map(|g| g(t))
    }

    pub fn second_derivative_at(&self, t: f64) -> Option<Complex64> {
        self.second_derivative.as_ref().map(|g| g(t))
    }

    pub fn has_derivatives(&self) -> bool {
        self.derivative.is_some() && self.second_derivative.is_some()
    }

    pub fn get_derivative_jumps(&self) -> &[(f64, Complex64)] {
        &self.derivative_jumps
    }

    pub fn get_value_jumps(&self) -> &[(f64, Complex64)] {
        &self.value_jumps
    }

    pub fn get_transform_singularities(&self) -> &[f64] {
        &self.transform_singularities
    }

    pub fn get_chirp(&self) -> Option<Chirp> {
        self.chirp
    }

    pub fn get_metadata(&self) -> &BTreeMap<String, f64> {
        &self.metadata
    }

    fn upper_components(&self) -> Vec<Component> {
        if self.upper_tail.is_empty() {
            vec![Component { frequency: 0.0, amplitude: self.f.clone() }]
        } else {
            self.upper_tail.clone()
        }
    }

    fn lower_components(&self) -> Vec<Component> {
        if self.lower_tail.is_empty() {
            vec![Component { frequency: 0.0, amplitude: self.f.clone() }]
        } else {
            self.lower_tail.clone()
        }
    }

    /// The integrand `w·f` with every structural hint of both factors.
    pub fn spec_with<'s>(&'s self, w: &'s Weight<'_>) -> IntegrandSpec<'s> {
        let f = &self.f;
        let mut spec = IntegrandSpec::new(move |t| w.evaluate(t) * f(t))
            .singular_points(self.singular_points.iter().copied().chain(w.singular().iter().copied()));
        for p in &self.power_laws {
            if p.exponent != 0.0 {
                spec = spec.power_law(p.at, p.exponent);
            }
        }
        if let Some((lo, hi)) = self.support {
            return spec.compact_support(lo, hi);
        }
        let product = |wc: Vec<(f64, std::rc::Rc<dyn Fn(f64) -> Complex64 + 's>)>, fc: Vec<Component>| {
            let mut out: Vec<TailComponent<'s>> = Vec::new();
            for (wf, wa) in &wc {
                for c in &fc {
                    let (wa, fa) = (wa.clone(), c.amplitude.clone());
                    out.push(TailComponent::new(wf + c.frequency, move |t| wa(t) * fa(t)));
                }
            }
            out
        };
        let decay = if self.conditionally_convergent {
            DecayClass::ConditionallyConvergent
        } else {
            DecayClass::AbsolutelyIntegrable
        };
        spec.decay(decay)
            .upper_tail(product(w.upper_components(), self.upper_components()))
            .lower_tail(product(w.lower_components(), self.lower_components()))
    }

    /// `∫ w(t) f(t) dt` over the line.
    ///
    /// For real `f` of known parity and a Hermitian weight the exact
    /// symmetry is imposed on the result: even `f` gives a real integral,
    /// odd `f` an imaginary one.
    pub fn integrate_against(&self, w: &Weight<'_>, tol: f64) -> Result<QuadResult> {
        let mut r = match self.chirp {
            Some(chirp) => self.integrate_chirp(chirp, w, tol)?,
            None => quadrature::integrate_line(&self.spec_with(w), tol)?,
        };
        if self.real_valued && w.is_hermitian() {
            match self.parity {
                Some(Parity::Even) => r.value.im = 0.0,
                Some(Parity::Odd) => r.value.re = 0.0,
                None => {}
            }
        }
        Ok(r)
    }

    /// `∫ f` over the line.
    pub fn integral(&self, tol: f64) -> Result<QuadResult> {
        self.integrate_against(&Weight::one(), tol)
    }

    /// `∫_{-∞}^x f` by quadrature.
    pub fn cumulative(&self, x: f64, tol: f64) -> Result<QuadResult> {
        if self.chirp.is_some() {
            return self.integrate_between(0.0, x, tol);
        }
        let one = Weight::one();
        let spec = self.spec_with(&one);
        quadrature::integrate_lower(&spec, x, tol)
    }

    /// `∫_a^b f` by quadrature, `a < b`.
    pub fn integrate_between(&self, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
        if let Some(chirp) = self.chirp {
            let (a, b) = (a.max(0.0), b.max(0.0));
            if a >= b {
                return Ok(QuadResult::zero());
            }
            let p = chirp.phase_power;
            let e = (chirp.amplitude_exponent + 1.0) / p - 1.0;
            let mut spec = IntegrandSpec::new(move |u: f64| Complex64::from_polar(u.powf(e) / p, u));
            if a == 0.0 {
                spec = spec.power_law(0.0, e);
            }
            return quadrature::integrate_finite(&spec, a.powf(p), b.powf(p), tol);
        }
        let one = Weight::one();
        let spec = self.spec_with(&one);
        quadrature::integrate_finite(&spec, a, b, tol)
    }

    fn integrate_chirp(&self, chirp: Chirp, w: &Weight<'_>, tol: f64) -> Result<QuadResult> {
        let p = chirp.phase_power;
        let e = (chirp.amplitude_exponent + 1.0) / p - 1.0;
        let g = move |u: f64| {
            let t = u.powf(1.0 / p);
            w.evaluate(t) * Complex64::from_polar(u.powf(e) / p, u)
        };
        let spec = IntegrandSpec::new(g)
            .power_law(0.0, e)
            .singular_points(w.singular().iter().filter(|t| **t > 0.0).map(|t| t.powf(p)))
            .oscillation(1.0)
            .decay(DecayClass::ConditionallyConvergent);
        // past u*, where the weight's own phase moves at the rate of e^{iu},
        // the combined phase is monotone with slowly varying speed
        let stationary = (w.frequency_scale() / p).powf(p / (p - 1.0));
        let core = 50.0 + 20.0 * stationary;
        let head = quadrature::integrate_finite(&spec, 0.0, core, tol / 2.0)?;
        let tail = quadrature::integrate_upper(&spec, core, tol / 2.0)?;
        Ok(head.combine(tail))
    }

    /// `t ↦ f(t - c)`.
    pub fn shifted(&self, c: f64) -> Result<TestFunction> {
        if self.chirp.is_some() {
            return Err(Error::Unsupported(format!("`{}` cannot be shifted", self.id)));
        }
        if c == 0.0 {
            return Ok(self.clone());
        }
        let shift_fn = |g: &ComplexFn| -> ComplexFn {
            let g = g.clone();
            complex_fn(move |t| g(t - c))
        };
        let shift_tail = |tail: &[Component]| -> Vec<Component> {
            tail.iter()
                .map(|comp| {
                    let a = comp.amplitude.clone();
                    let phase = Complex64::from_polar(1.0, -comp.frequency * c);
                    Component { frequency: comp.frequency, amplitude: complex_fn(move |t| phase * a(t - c)) }
                })
                .collect()
        };
        let mut out = self.clone();
        out.id = format!("{}+shift", self.id);
        out.params.insert("shift".to_string(), c);
        out.f = shift_fn(&self.f);
        out.primitive = self.primitive.as_ref().map(|p| {
            let ev = p.evaluator.clone();
            Primitive {
                evaluator: complex_fn(move |x| ev(x - c)),
                limit: p.limit,
                support: p.support.map(|(lo, hi)| (lo + c, hi + c)),
            }
        });
        out.transform = self.transform.as_ref().map(|g| {
            let g = g.clone();
            complex_fn(move |s| Complex64::from_polar(1.0, -c * s) * g(s))
        });
        out.parity = None;
        out.singular_points = self.singular_points.iter().map(|p| p + c).collect();
        out.power_laws = self.power_laws.iter().map(|p| PowerLaw { at: p.at + c, exponent: p.exponent }).collect();
        out.support = self.support.map(|(lo, hi)| (lo + c, hi + c));
        out.upper_tail = shift_tail(&self.upper_tail);
        out.lower_tail = shift_tail(&self.lower_tail);
        out.extent = Some({
            let (lo, hi) = self.get_extent();
            (lo + c, hi + c)
        });
        out.derivative = self.derivative.as_ref().map(shift_fn);
        out.second_derivative = self.second_derivative.as_ref().map(shift_fn);
        out.derivative_jumps = self.derivative_jumps.iter().map(|(a, j)| (a + c, *j)).collect();
        out.value_jumps = self.value_jumps.iter().map(|(a, j)| (a + c, *j)).collect();
        Ok(out)
    }

    /// `t ↦ e^{iωt} f(t)`. Derivative data and the primitive are dropped.
    pub fn modulated(&self, omega: f64) -> Result<TestFunction> {
        if self.chirp.is_some() {
            return Err(Error::Unsupported(format!("`{}` cannot be modulated", self.id)));
        }
        if omega == 0.0 {
            return Ok(self.clone());
        }
        let modulate = |g: &ComplexFn| -> ComplexFn {
            let g = g.clone();
            complex_fn(move |t| Complex64::from_polar(1.0, omega * t) * g(t))
        };
        let shift_tail = |tail: &[Component]| -> Vec<Component> {
            tail.iter().map(|c| Component { frequency: c.frequency + omega, amplitude: c.amplitude.clone() }).collect()
        };
        let mut out = self.clone();
        out.id = format!("{}*exp", self.id);
        out.params.insert("modulation".to_string(), omega);
        out.f = modulate(&self.f);
        out.upper_tail = shift_tail(&self.upper_components());
        out.lower_tail = shift_tail(&self.lower_components());
        out.primitive = None;
        out.transform = self.transform.as_ref().map(|g| {
            let g = g.clone();
            complex_fn(move |s| g(s - omega))
        });
        out.transform_singularities = self.transform_singularities.iter().map(|p| p + omega).collect();
        out.real_valued = false;
        out.parity = None;
        out.derivative = None;
        out.second_derivative = None;
        out.derivative_jumps = Vec::new();
        out.value_jumps = Vec::new();
        Ok(out)
    }

    /// `α f + β g`, keeping every hint that both summands support.
    pub fn linear_combination(alpha: f64, f: &TestFunction, beta: f64, g: &TestFunction) -> Result<TestFunction> {
        if f.chirp.is_some() || g.chirp.is_some() {
            return Err(Error::Unsupported("linear combinations of chirps".to_string()));
        }
        let sum = |a: &ComplexFn, b: &ComplexFn| -> ComplexFn {
            let (a, b) = (a.clone(), b.clone());
            complex_fn(move |t| a(t) * alpha + b(t) * beta)
        };
        let both = |a: &Option<ComplexFn>, b: &Option<ComplexFn>| match (a, b) {
            (Some(a), Some(b)) => Some(sum(a, b)),
            _ => None,
        };
        let support = match (f.support, g.support) {
            (Some((a, b)), Some((c, d))) => Some((a.min(c), b.max(d))),
            _ => None,
        };
        let tail = |side: fn(&TestFunction) -> Vec<Component>| -> Vec<Component> {
            let mut out = Vec::new();
            if support.is_none() {
                for (coef, h) in [(alpha, f), (beta, g)] {
                    if h.support.is_some() {
                        continue;
                    }
                    for comp in side(h) {
                        let a = comp.amplitude.clone();
                        out.push(Component { frequency: comp.frequency, amplitude: complex_fn(move |t| a(t) * coef) });
                    }
                }
            }
            out
        };
        let mut flags = Vec::new();
        for flag in [Flag::L1, Flag::CompactSupport, Flag::HkOnly] {
            if f.flags.contains(&flag) && g.flags.contains(&flag) {
                flags.push(flag);
            }
        }
        let mut power_laws: Vec<PowerLaw> = Vec::new();
        for p in f.power_laws.iter().chain(&g.power_laws) {
            match power_laws.iter_mut().find(|q| q.at == p.at) {
                Some(q) => q.exponent = q.exponent.min(p.exponent),
                None => power_laws.push(*p),
            }
        }
        let jumps = |a: &[(f64, Complex64)], b: &[(f64, Complex64)]| -> Vec<(f64, Complex64)> {
            let mut out: Vec<(f64, Complex64)> = Vec::new();
            for (coef, list) in [(alpha, a), (beta, b)] {
                for (at, j) in list {
                    match out.iter_mut().find(|(x, _)| x == at) {
                        Some((_, k)) => *k += j * coef,
                        None => out.push((*at, j * coef)),
                    }
                }
            }
            out
        };
        let (fe, ge) = (f.get_extent(), g.get_extent());
        let mut metadata = BTreeMap::new();
        metadata.insert("alpha".to_string(), alpha);
        metadata.insert("beta".to_string(), beta);
        Ok(TestFunction {
            id: format!("{alpha}*{}+{beta}*{}", f.id, g.id),
            params: BTreeMap::new(),
            f: sum(&f.f, &g.f),
            primitive: match (&f.primitive, &g.primitive) {
                (Some(p), Some(q)) => {
                    let (p, q) = (p.clone(), q.clone());
                    let limit = p.limit * alpha + q.limit * beta;
                    Some(Primitive { evaluator: complex_fn(move |x| p.eval(x) * alpha + q.eval(x) * beta), limit, support: None })
                }
                _ => None,
            },
            transform: both(&f.transform, &g.transform),
            flags,
            real_valued: f.real_valued && g.real_valued,
            parity: if f.parity == g.parity { f.parity } else { None },
            singular_points: {
                let mut v: Vec<f64> = f.singular_points.iter().chain(&g.singular_points).copied().collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            },
            power_laws,
            support,
            conditionally_convergent: f.conditionally_convergent || g.conditionally_convergent,
            upper_tail: tail(TestFunction::upper_components),
            lower_tail: tail(TestFunction::lower_components),
            extent: Some((fe.0.min(ge.0), fe.1.max(ge.1))),
            derivative: both(&f.derivative, &g.derivative),
            second_derivative: both(&f.second_derivative, &g.second_derivative),
            derivative_jumps: jumps(&f.derivative_jumps, &g.derivative_jumps),
            value_jumps: jumps(&f.value_jumps, &g.value_jumps),
            transform_singularities: f.transform_singularities.iter().chain(&g.transform_singularities).copied().collect(),
            chirp: None,
            metadata,
        })
    }

    /// The known transform `f̂` as a function in its own right, for
    /// computing `Ω_{f̂}`.
    pub fn transform_as_function(&self) -> Result<TestFunction> {
        let f_hat = self
            .transform
            .clone()
            .ok_or_else(|| Error::Missing(format!("`{}` has no closed-form transform", self.id)))?;
        let mut out = TestFunction::custom(&format!("{}^", self.id), move |s| f_hat(s))
            .singular_points(self.transform_singularities.iter().copied());
        if self.real_valued {
            // real even f has a real even transform, real odd f an imaginary odd one
            out.parity = self.parity;
            out.real_valued = self.parity == Some(Parity::Even);
        }
        Ok(out)
    }
}

type Params = BTreeMap<String, f64>;

struct Entry {
    id: &'static str,
    description: &'static str,
    params: &'static [ParamSpec],
    build: fn(&Params) -> TestFunction,
}

const OSC_POWER_PARAMS: &[ParamSpec] = &[
    ParamSpec { name: "nu", default: 0.5, min: 0.05, max: 0.95, description: "exponent ν of |t|^{ν-1}" },
    ParamSpec { name: "x", default: 1.0, min: 1e-3, max: 1e3, description: "frequency" },
];

const REGISTRY: &[Entry] = &[
    Entry { id: "indicator", description: "indicator of [0, 1]", params: &[], build: indicator },
    Entry { id: "gauss", description: "exp(-t²/2)", params: &[], build: gauss },
    Entry { id: "sinc_abs", description: "sin(t)/|t|", params: &[], build: sinc_abs },
    Entry { id: "bessel_k0", description: "K_0(|t|)", params: &[], build: bessel_k0 },
    Entry {
        id: "bessel_window",
        description: "(1 - t²)^{ν-1/2} on (-1, 1)",
        params: &[ParamSpec { name: "nu", default: 2.0, min: 0.5, max: 10.0, description: "order ν" }],
        build: bessel_window,
    },
    Entry { id: "fresnel4", description: "t² exp(i t⁴) for t ≥ 0", params: &[], build: fresnel4 },
    Entry {
        id: "log_lorentz",
        description: "log(1 + y²/t²)",
        params: &[ParamSpec { name: "y", default: 1.0, min: 1e-3, max: 1e3, description: "width" }],
        build: log_lorentz,
    },
    Entry {
        id: "osc_power",
        description: "|t|^{ν-1} sin(x|t| + νπ/2)",
        params: OSC_POWER_PARAMS,
        build: osc_power,
    },
    Entry { id: "odd_lorentz", description: "t/(1 + t²)", params: &[], build: odd_lorentz },
    Entry { id: "triangle", description: "max(0, 1 - |t|)", params: &[], build: triangle },
];

/// A catalog entry as listed by [`list`].
#[derive(Debug, Clone, Serialize)]
pub struct EntryInfo {
    pub id: &'static str,
    pub description: &'static str,
    pub params: Vec<ParamSpec>,
    pub flags: Vec<Flag>,
}

/// Every registered entry, in a fixed order.
pub fn list() -> Vec<EntryInfo> {
    REGISTRY
        .iter()
        .map(|e| EntryInfo {
            id: e.id,
            description: e.description,
            params: e.params.to_vec(),
            flags: (e.build)(&defaults(e)).flags,
        })
        .collect()
}

fn defaults(e: &Entry) -> Params {
    e.params.iter().map(|p| (p.name.to_string(), p.default)).collect()
}

/// The entry `id` with `params` bound; unspecified parameters take their
/// defaults.
pub fn lookup(id: &str, params: &BTreeMap<String, f64>) -> Result<TestFunction> {
    let entry = REGISTRY.iter().find(|e| e.id == id).ok_or_else(|| Error::UnknownFunction(id.to_string()))?;
    let mut bound = defaults(entry);
    for (name, value) in params {
        let spec = entry.params.iter().find(|p| p.name == name).ok_or_else(|| {
            Error::InvalidParameter(format!("`{id}` has no parameter `{name}`"))
        })?;
        if !(value.is_finite() && *value >= spec.min && *value <= spec.max) {
            return Err(Error::InvalidParameter(format!(
                "`{id}`: {name} = {value} outside [{}, {}]",
                spec.min, spec.max
            )));
        }
        bound.insert(name.clone(), *value);
    }
    let mut tf = (entry.build)(&bound);
    tf.params = bound;
    Ok(tf)
}

/// [`lookup`] with every parameter at its default.
pub fn lookup_default(id: &str) -> Result<TestFunction> {
    lookup(id, &BTreeMap::new())
}

fn indicator(_: &Params) -> TestFunction {
    TestFunction::custom_real("indicator", |t| if (0.0..=1.0).contains(&t) { 1.0 } else { 0.0 })
        .primitive(Primitive::real(|x| x.clamp(0.0, 1.0), 1.0).with_support(0.0, 1.0).expect("valid support"))
        .transform(|s| kernels::u(1.0, s))
        .support(0.0, 1.0)
        .singular_points([0.0, 1.0])
        .derivatives(|_| ZERO, |_| ZERO)
        .value_jump(0.0, 1.0)
        .value_jump(1.0, -1.0)
        .flags([Flag::L1, Flag::CompactSupport])
}

fn gauss(_: &Params) -> TestFunction {
    let root_2pi = (2.0 * PI).sqrt();
    TestFunction::custom_real("gauss", |t| (-0.5 * t * t).exp())
        .parity(Parity::Even)
        .primitive(Primitive::real(|x| FRAC_PI_2.sqrt() * special::erfc(-x / 2f64.sqrt()), root_2pi))
        .transform(move |s| re(root_2pi * (-0.5 * s * s).exp()))
        .derivatives(|t| re(-t * (-0.5 * t * t).exp()), |t| re((t * t - 1.0) * (-0.5 * t * t).exp()))
        .extent(-9.0, 9.0)
        .flags([Flag::L1])
}

fn sinc_abs(_: &Params) -> TestFunction {
    let half = |sign: f64| complex_fn(move |t| I * (-0.5 * sign / t));
    let neg_half = |sign: f64| complex_fn(move |t| I * (0.5 * sign / t));
    TestFunction::custom_real("sinc_abs", |t| if t == 0.0 { 0.0 } else { t.sin() / t.abs() })
        .parity(Parity::Odd)
        .primitive(Primitive::real(|x| special::sine_integral(x.abs()) - FRAC_PI_2, 0.0))
        .transform(|s| I * ((s - 1.0).abs() / (s + 1.0).abs()).ln())
        .singular_points([0.0])
        .conditionally_convergent()
        // sin t / (±t) = ±(e^{it} - e^{-it}) / (2it)
        .tails(
            vec![
                Component { frequency: 1.0, amplitude: half(1.0) },
                Component { frequency: -1.0, amplitude: neg_half(1.0) },
            ],
            vec![
                Component { frequency: 1.0, amplitude: half(-1.0) },
                Component { frequency: -1.0, amplitude: neg_half(-1.0) },
            ],
        )
        .transform_singularities([-1.0, 1.0])
        .extent(-30.0, 30.0)
        .flags([Flag::HkOnly])
}

fn bessel_k0(_: &Params) -> TestFunction {
    TestFunction::custom_real("bessel_k0", |t| if t == 0.0 { f64::INFINITY } else { special::bessel_k0(t.abs()) })
        .parity(Parity::Even)
        .transform(|s| re(PI / (s * s + 1.0).sqrt()))
        // logarithmic at 0; the square-root substitution removes it
        .power_law(0.0, -0.5)
        .derivatives(
            |t| re(-t.signum() * special::bessel_k1(t.abs())),
            |t| {
                let a = t.abs();
                re(special::bessel_k0(a) + special::bessel_k1(a) / a)
            },
        )
        .extent(-40.0, 40.0)
        .flags([Flag::L1])
}

fn bessel_window(p: &Params) -> TestFunction {
    let nu = p["nu"];
    let e = nu - 0.5;
    let scale = PI.sqrt() * 2f64.powf(nu) * special::gamma(nu + 0.5);
    let inside = |t: f64| t.abs() < 1.0;
    let k = 2.0 * nu - 1.0;
    let mut tf = TestFunction::custom_real("bessel_window", move |t| if inside(t) { (1.0 - t * t).powf(e) } else { 0.0 })
        .parity(Parity::Even)
        .transform(move |s| re(scale * special::bessel_j_over_pow(nu, s.abs())))
        .support(-1.0, 1.0)
        .singular_points([-1.0, 1.0])
        .power_law(-1.0, e)
        .power_law(1.0, e)
        .derivatives(
            move |t| if inside(t) { re(-k * t * (1.0 - t * t).powf(nu - 1.5)) } else { ZERO },
            move |t| {
                if inside(t) {
                    let q = 1.0 - t * t;
                    re(-k * q.powf(nu - 1.5) + k * (2.0 * nu - 3.0) * t * t * q.powf(nu - 2.5))
                } else {
                    ZERO
                }
            },
        )
        .flags([Flag::L1, Flag::CompactSupport]);
    if nu == 0.5 {
        tf = tf.value_jump(-1.0, 1.0).value_jump(1.0, -1.0);
    } else if (nu - 1.5).abs() < 1e-12 {
        // g'(±1∓) = ∓2 and g' = 0 outside
        tf = tf.derivative_jump(-1.0, 2.0).derivative_jump(1.0, 2.0);
    }
    tf
}

fn fresnel4(_: &Params) -> TestFunction {
    TestFunction::custom("fresnel4", |t| if t < 0.0 { ZERO } else { Complex64::from_polar(t * t, t.powi(4)) })
        .chirp(Chirp { amplitude_exponent: 2.0, phase_power: 4.0 })
        .singular_points([0.0])
        .conditionally_convergent()
        .extent(0.0, 6.0)
        .metadata("growth_exponent", 1.0 / 3.0)
        .metadata("phase_exponent", 4.0 / 3.0)
        .flags([Flag::HkOnly])
}

fn log_lorentz(p: &Params) -> TestFunction {
    let y = p["y"];
    let y2 = y * y;
    TestFunction::custom_real("log_lorentz", move |t| if t == 0.0 { f64::INFINITY } else { (y2 / (t * t)).ln_1p() })
        .parity(Parity::Even)
        .primitive(Primitive::real(
            move |x| {
                let log_term = if x == 0.0 { 0.0 } else { x * (y2 / (x * x)).ln_1p() };
                log_term + 2.0 * y * (x / y).atan() + PI * y
            },
            2.0 * PI * y,
        ))
        .transform(move |s| {
            let a = s.abs();
            re(if a == 0.0 { 2.0 * PI * y } else { -2.0 * PI * (-y * a).exp_m1() / a })
        })
        .power_law(0.0, -0.5)
        .derivatives(
            move |t| re(-2.0 * y2 / (t * (t * t + y2))),
            move |t| {
                let q = t * (t * t + y2);
                re(2.0 * y2 * (3.0 * t * t + y2) / (q * q))
            },
        )
        .extent(-50.0 * y, 50.0 * y)
        .flags([Flag::L1])
}

fn osc_power(p: &Params) -> TestFunction {
    let (nu, x) = (p["nu"], p["x"]);
    let phase = nu * FRAC_PI_2;
    let scale = special::gamma(nu) * (nu * PI).sin();
    // sin(x|t| + φ) = (e^{i(x|t|+φ)} - e^{-i(x|t|+φ)}) / (2i)
    let plus = Complex64::from_polar(1.0, phase) / (2.0 * I);
    let minus = -Complex64::from_polar(1.0, -phase) / (2.0 * I);
    let amp = move |c: Complex64| complex_fn(move |t: f64| c * t.abs().powf(nu - 1.0));
    TestFunction::custom_real("osc_power", move |t| {
        if t == 0.0 {
            f64::INFINITY
        } else {
            t.abs().powf(nu - 1.0) * (x * t.abs() + phase).sin()
        }
    })
    .parity(Parity::Even)
    .transform(move |s| {
        let a = s.abs();
        let value = if a < x {
            (x + a).powf(-nu) + (x - a).powf(-nu)
        } else if a > x {
            (x + a).powf(-nu)
        } else {
            f64::INFINITY
        };
        re(scale * value)
    })
    .power_law(0.0, nu - 1.0)
    .conditionally_convergent()
    .tails(
        vec![Component { frequency: x, amplitude: amp(plus) }, Component { frequency: -x, amplitude: amp(minus) }],
        vec![Component { frequency: -x, amplitude: amp(plus) }, Component { frequency: x, amplitude: amp(minus) }],
    )
    .transform_singularities([-x, x])
    .extent(-60.0 / x, 60.0 / x)
    .flags([Flag::HkOnly])
}

fn odd_lorentz(_: &Params) -> TestFunction {
    TestFunction::custom_real("odd_lorentz", |t| t / (1.0 + t * t))
        .parity(Parity::Odd)
        .transform(|s| if s == 0.0 { ZERO } else { -I * PI * s.signum() * (-s.abs()).exp() })
        .conditionally_convergent()
        .transform_singularities([0.0])
        .flags([Flag::LpOnly { p_above: 1.0 }])
}

fn triangle(_: &Params) -> TestFunction {
    TestFunction::custom_real("triangle", |t| (1.0 - t.abs()).max(0.0))
        .parity(Parity::Even)
        .primitive(
            Primitive::real(
                |x| {
                    if x <= 0.0 {
                        0.5 * (1.0 + x) * (1.0 + x)
                    } else {
                        1.0 - 0.5 * (1.0 - x) * (1.0 - x)
                    }
                },
                1.0,
            )
            .with_support(-1.0, 1.0)
            .expect("valid support"),
        )
        .transform(|s| {
            let w = special::sinc(0.5 * s);
            re(w * w)
        })
        .support(-1.0, 1.0)
        .singular_points([-1.0, 0.0, 1.0])
        .derivatives(|t| if t.abs() < 1.0 { re(-t.signum()) } else { ZERO }, |_| ZERO)
        .derivative_jump(-1.0, 1.0)
        .derivative_jump(0.0, -2.0)
        .derivative_jump(1.0, 1.0)
        .flags([Flag::L1, Flag::CompactSupport])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(pairs: &[(&str, f64)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn spec_examples() {
        let v = lookup_default("sinc_abs").unwrap().transform_at(2.0).unwrap();
        assert!(v.re.abs() < 1e-15);
        assert!((v.im - (1.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((v.im + 1.0986).abs() < 1e-4);
        let g = lookup_default("gauss").unwrap().transform_at(0.0).unwrap();
        assert!((g.re - (2.0 * PI).sqrt()).abs() < 1e-15);
        let k = lookup_default("bessel_k0").unwrap().transform_at(0.0).unwrap();
        assert!((k.re - PI).abs() < 1e-15);
    }

    #[test]
    fn listing_is_complete_and_round_trips() {
        let entries = list();
        assert!(entries.len() >= 10);
        assert!(entries.iter().any(|e| e.id == "sinc_abs"));
        for e in &entries {
            let tf = lookup_default(e.id).unwrap();
            assert_eq!(tf.id(), e.id);
            assert_eq!(tf.get_flags(), e.flags.as_slice());
        }
        let again: Vec<&str> = list().iter().map(|e| e.id).collect();
        assert_eq!(again, entries.iter().map(|e| e.id).collect::<Vec<_>>());
        let json = serde_json::to_string(&entries).unwrap();
        assert!(json.contains("\"Lp_only(p>1)\""));
    }

    #[test]
    fn bad_lookups_are_rejected() {
        assert!(matches!(lookup_default("nope"), Err(Error::UnknownFunction(_))));
        assert!(matches!(lookup("osc_power", &params(&[("nu", 0.0)])), Err(Error::InvalidParameter(_))));
        assert!(matches!(lookup("osc_power", &params(&[("nu", 0.99)])), Err(Error::InvalidParameter(_))));
        assert!(matches!(lookup("gauss", &params(&[("y", 1.0)])), Err(Error::InvalidParameter(_))));
        let tf = lookup("osc_power", &params(&[("x", 2.0)])).unwrap();
        assert_eq!(tf.params()["nu"], 0.5);
        assert_eq!(tf.params()["x"], 2.0);
    }

    fn entries_with_primitive() -> Vec<TestFunction> {
        list()
            .iter()
            .map(|e| lookup_default(e.id).unwrap())
            .chain([lookup("log_lorentz", &params(&[("y", 2.5)])).unwrap()])
            .filter(|tf| tf.get_primitive().is_some())
            .collect()
    }

    fn near_singular(tf: &TestFunction, x: f64, d: f64) -> bool {
        tf.get_singular_points().iter().any(|p| (p - x).abs() < d)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn primitive_derivative_matches_function(x in -6.0f64..6.0) {
            for tf in entries_with_primitive() {
                if near_singular(&tf, x, 1e-3) {
                    continue;
                }
                let p = tf.get_primitive().unwrap();
                let h = 1e-5;
                let d = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
                prop_assert!((d - tf.eval(x)).norm() < 1e-6, "{}: x={x} {d} vs {}", tf.id(), tf.eval(x));
            }
        }

        #[test]
        fn primitive_differences_match_quadrature(a in -8.0f64..8.0, b in -8.0f64..8.0) {
            prop_assume!((a - b).abs() > 1e-3);
            let (lo, hi) = (a.min(b), a.max(b));
            for tf in entries_with_primitive() {
                let p = tf.get_primitive().unwrap();
                let one = Weight::one();
                let spec = tf.spec_with(&one);
                let q = quadrature::integrate_finite(&spec, lo, hi, 1e-11).unwrap();
                let diff = p.eval(hi) - p.eval(lo);
                prop_assert!((q.value - diff).norm() < 1e-8, "{}: [{lo}, {hi}] {} vs {diff}", tf.id(), q.value);
            }
        }
    }

    #[test]
    fn primitives_vanish_at_minus_infinity() {
        for tf in entries_with_primitive() {
            let p = tf.get_primitive().unwrap();
            let vals: Vec<f64> = [1e2, 1e4, 1e6].iter().map(|t| p.eval(-t).norm()).collect();
            assert!(vals[2] <= vals[0] && vals[2] < 1e-5, "{}: {vals:?}", tf.id());
        }
    }

    #[test]
    fn compact_support_entries_vanish_outside() {
        for e in list() {
            let tf = lookup_default(e.id).unwrap();
            if let Some((lo, hi)) = tf.get_support() {
                assert!(tf.get_flags().contains(&Flag::CompactSupport));
                for d in [1e-9, 0.5, 3.0, 100.0] {
                    assert_eq!(tf.eval(lo - d), ZERO);
                    assert_eq!(tf.eval(hi + d), ZERO);
                }
            }
        }
    }

    #[test]
    fn l1_transforms_match_quadrature() {
        let mut entries: Vec<TestFunction> = list().iter().map(|e| lookup_default(e.id).unwrap()).collect();
        entries.push(lookup("bessel_window", &params(&[("nu", 1.0)])).unwrap());
        entries.push(lookup("bessel_window", &params(&[("nu", 0.5)])).unwrap());
        for tf in entries.iter().filter(|tf| tf.is_l1() && tf.transform_fn().is_some()) {
            for s in [0.3, 1.0, 2.7] {
                let q = tf.integrate_against(&Weight::fourier(s), 1e-11).unwrap();
                let exact = tf.transform_at(s).unwrap();
                let err = (q.value - exact).norm();
                assert!(err <= 1e-6 * exact.norm() || err < 1e-8, "{} at s={s}: {} vs {exact}", tf.id(), q.value);
            }
        }
    }

    #[test]
    fn odd_lorentz_transform_matches_residue_value() {
        let tf = lookup_default("odd_lorentz").unwrap();
        let q = tf.integrate_against(&Weight::fourier(1.0), 1e-10).unwrap();
        let exact = -I * PI / 1f64.exp();
        assert_eq!(q.value.re, 0.0);
        assert!((q.value - exact).norm() < 1e-8, "{q:?}");
        assert!((tf.transform_at(1.0).unwrap() - exact).norm() < 1e-15);
    }

    #[test]
    fn hk_only_transforms_match_quadrature() {
        let sinc = lookup_default("sinc_abs").unwrap();
        for s in [0.5, 2.0, 5.0] {
            let q = sinc.integrate_against(&Weight::fourier(s), 1e-10).unwrap();
            assert!((q.value - sinc.transform_at(s).unwrap()).norm() < 1e-7, "s={s}: {q:?}");
        }
        let osc = lookup("osc_power", &params(&[("nu", 0.3), ("x", 1.5)])).unwrap();
        for s in [0.4, 2.5] {
            let q = osc.integrate_against(&Weight::fourier(s), 1e-10).unwrap();
            let exact = osc.transform_at(s).unwrap();
            assert!((q.value - exact).norm() < 1e-7 * exact.norm(), "s={s}: {q:?} vs {exact}");
        }
    }

    #[test]
    fn fresnel_integral_limit() {
        let tf = lookup_default("fresnel4").unwrap();
        let q = tf.integral(1e-10).unwrap();
        let exact = Complex64::from_polar(special::gamma(0.75) / 4.0, 3.0 * PI / 8.0);
        assert!((q.value - exact).norm() < 1e-8, "{q:?} vs {exact}");
        let c = tf.cumulative(1.3, 1e-12).unwrap();
        let one = Weight::one();
        let direct = quadrature::integrate_finite(&tf.spec_with(&one), 0.0, 1.3, 1e-12).unwrap();
        assert!((c.value - direct.value).norm() < 1e-10);
    }

    #[test]
    fn fresnel_windowed_transform_grows_like_cube_root() {
        let tf = lookup_default("fresnel4").unwrap();
        let m = |s: f64| tf.integrate_against(&Weight::fejer(s, 0.25), 1e-8).unwrap().value.norm();
        let ratio = (m(40.0) / m(20.0)).ln();
        let expected = tf.get_metadata()["growth_exponent"] * 2f64.ln();
        assert!((ratio - expected).abs() < 0.15, "log ratio {ratio} vs {expected}");
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let entries = [
            lookup_default("gauss").unwrap(),
            lookup_default("bessel_k0").unwrap(),
            lookup("bessel_window", &params(&[("nu", 2.3)])).unwrap(),
            lookup("log_lorentz", &params(&[("y", 0.7)])).unwrap(),
            lookup_default("triangle").unwrap(),
        ];
        let h = 1e-5;
        for tf in &entries {
            for t in [-2.2, -0.6, 0.35, 0.8, 1.7, 4.0] {
                let d1 = (tf.eval(t + h) - tf.eval(t - h)) / (2.0 * h);
                let d2 = (tf.derivative_at(t + h).unwrap() - tf.derivative_at(t - h).unwrap()) / (2.0 * h);
                let g1 = tf.derivative_at(t).unwrap();
                let g2 = tf.second_derivative_at(t).unwrap();
                assert!((d1 - g1).norm() < 1e-6 * (1.0 + g1.norm()), "{} g' at {t}", tf.id());
                assert!((d2 - g2).norm() < 1e-5 * (1.0 + g2.norm()), "{} g'' at {t}", tf.id());
            }
        }
    }

    #[test]
    fn bessel_window_jumps_follow_the_order() {
        let jumps = |nu: f64| lookup("bessel_window", &params(&[("nu", nu)])).unwrap().get_derivative_jumps().len();
        assert_eq!(jumps(1.5), 2);
        assert_eq!(jumps(2.0), 0);
        assert_eq!(jumps(1.0), 0);
        let w = lookup("bessel_window", &params(&[("nu", 1.5)])).unwrap();
        assert!((w.derivative_at(1.0 - 1e-9).unwrap().re + 2.0).abs() < 1e-6);
    }

    #[test]
    fn shift_moves_function_and_transform() {
        let g = lookup_default("gauss").unwrap();
        let s = g.shifted(0.7).unwrap();
        assert_eq!(s.eval(1.2), g.eval(0.5));
        let q = s.integrate_against(&Weight::fourier(1.3), 1e-11).unwrap();
        assert!((q.value - s.transform_at(1.3).unwrap()).norm() < 1e-9);
        let sinc = lookup_default("sinc_abs").unwrap().shifted(-0.4).unwrap();
        let q = sinc.integrate_against(&Weight::fourier(2.0), 1e-10).unwrap();
        assert!((q.value - sinc.transform_at(2.0).unwrap()).norm() < 1e-7, "{q:?}");
    }

    #[test]
    fn linear_combination_is_linear() {
        let g = lookup_default("gauss").unwrap();
        let t = lookup_default("triangle").unwrap();
        let c = TestFunction::linear_combination(2.0, &g, -0.5, &t).unwrap();
        assert_eq!(c.eval(0.3), g.eval(0.3) * 2.0 - t.eval(0.3) * 0.5);
        assert!(c.is_l1() && c.get_support().is_none());
        let q = c.integrate_against(&Weight::fourier(0.9), 1e-11).unwrap();
        assert!((q.value - c.transform_at(0.9).unwrap()).norm() < 1e-9);
        let p = c.get_primitive().unwrap();
        assert!((p.limit_at_plus_infinity().re - (2.0 * (2.0 * PI).sqrt() - 0.5)).abs() < 1e-14);
    }

    #[test]
    fn zero_function_integrates_to_zero() {
        let z = TestFunction::zero();
        assert_eq!(z.integrate_against(&Weight::omega(3.0), 1e-10).unwrap().value, ZERO);
    }
}
