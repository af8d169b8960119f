//! Weights that multiply a test function inside a line integral.
//!
//! A weight is evaluated pointwise on the core interval, and far out it is
//! described as a sum of terms `e^{iωt}·a(t)` with non-oscillating `a`. When
//! a weight and a test function both carry such descriptions, the tail of
//! their product is integrated one frequency at a time.

use std::rc::Rc;

use num_complex::Complex64;

use crate::kernels;
use crate::special::sinc;

type Amplitude<'a> = Rc<dyn Fn(f64) -> Complex64 + 'a>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub struct Weight<'a> {
    eval: Amplitude<'a>,
    upper: Vec<(f64, Amplitude<'a>)>,
    lower: Vec<(f64, Amplitude<'a>)>,
    singular: Vec<f64>,
    hermitian: bool,
    frequency_scale: f64,
}

impl<'a> Weight<'a> {
    /// A non-oscillating weight; unless components are added it is its own
    /// single zero-frequency component on both half-lines.
    pub fn new(eval: impl Fn(f64) -> Complex64 + 'a) -> Self {
        Weight {
            eval: Rc::new(eval),
            upper: Vec::new(),
            lower: Vec::new(),
            singular: Vec::new(),
            hermitian: false,
            frequency_scale: 0.0,
        }
    }

    pub fn real(eval: impl Fn(f64) -> f64 + 'a) -> Self {
        Self::new(move |t| Complex64::new(eval(t), 0.0))
    }

    /// Adds `e^{iωt}·a(t)` to the description for large positive `t`.
    pub fn upper(mut self, frequency: f64, amplitude: impl Fn(f64) -> Complex64 + 'a) -> Self {
        self.upper.push((frequency, Rc::new(amplitude)));
        self.frequency_scale = self.frequency_scale.max(frequency.abs());
        self
    }

    /// Adds `e^{iωt}·a(t)` to the description for large negative `t`.
    pub fn lower(mut self, frequency: f64, amplitude: impl Fn(f64) -> Complex64 + 'a) -> Self {
        self.lower.push((frequency, Rc::new(amplitude)));
        self.frequency_scale = self.frequency_scale.max(frequency.abs());
        self
    }

    /// Adds the same term on both half-lines.
    pub fn both(mut self, frequency: f64, amplitude: impl Fn(f64) -> Complex64 + 'a) -> Self {
        let a: Amplitude<'a> = Rc::new(amplitude);
        self.upper.push((frequency, a.clone()));
        self.lower.push((frequency, a));
        self.frequency_scale = self.frequency_scale.max(frequency.abs());
        self
    }

    /// Declares `w(-t) = conj(w(t))`.
    pub fn hermitian(mut self) -> Self {
        self.hermitian = true;
        self
    }

    pub fn singular_points(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.singular.extend(points);
        self
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        (self.eval)(t)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn singular(&self) -> &[f64] {
        &self.singular
    }

    /// Largest declared frequency magnitude.
    pub fn frequency_scale(&self) -> f64 {
        self.frequency_scale
    }

    pub(crate) fn upper_components(&self) -> Vec<(f64, Amplitude<'a>)> {
        if self.upper.is_empty() {
            vec![(0.0, self.eval.clone())]
        } else {
            self.upper.clone()
        }
    }

    pub(crate) fn lower_components(&self) -> Vec<(f64, Amplitude<'a>)> {
        if self.lower.is_empty() {
            vec![(0.0, self.eval.clone())]
        } else {
            self.lower.clone()
        }
    }

    /// The constant 1.
    pub fn one() -> Weight<'static> {
        Weight::real(|_| 1.0).hermitian()
    }

    /// `e^{-ist}`.
    pub fn fourier(s: f64) -> Weight<'static> {
        Weight::new(move |t| Complex64::from_polar(1.0, -s * t)).both(-s, |_| Complex64::new(1.0, 0.0)).hermitian()
    }

    /// `e^{-ist}·sinc²(ht/2)`, the Fejér-windowed exponential.
    pub fn fejer(s: f64, h: f64) -> Weight<'static> {
        let c = 1.0 / (h * h);
        Weight::new(move |t| {
            let w = sinc(0.5 * h * t);
            Complex64::from_polar(w * w, -s * t)
        })
        .both(-s, move |t| Complex64::new(2.0 * c / (t * t), 0.0))
        .both(h - s, move |t| Complex64::new(-c / (t * t), 0.0))
        .both(-h - s, move |t| Complex64::new(-c / (t * t), 0.0))
        .hermitian()
    }

    /// `v_s(t)`, the kernel of Ω.
    pub fn omega(s: f64) -> Weight<'static> {
        Weight::new(move |t| kernels::v(s, t))
            .both(0.0, move |t| Complex64::new(1.0, -s * t) / (t * t))
            .both(-s, |t| Complex64::new(-1.0 / (t * t), 0.0))
            .hermitian()
    }

    /// `u_s(t)`, the kernel of Ψ.
    pub fn psi(s: f64) -> Weight<'static> {
        Weight::new(move |t| kernels::u(s, t))
            .both(0.0, |t| -I / t)
            .both(-s, |t| I / t)
            .hermitian()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_components(w: &Weight<'_>, ts: &[f64]) {
        for &t in ts {
            let comps = if t > 0.0 { w.upper_components() } else { w.lower_components() };
            let sum: Complex64 = comps.iter().map(|(f, a)| Complex64::from_polar(1.0, f * t) * a(t)).sum();
            let direct = w.evaluate(t);
            assert!((sum - direct).norm() <= 1e-12 * (1.0 + direct.norm()), "t={t}: {sum} vs {direct}");
        }
    }

    #[test]
    fn components_reproduce_the_weights() {
        let ts = [-37.5, -3.0, 2.5, 11.0, 123.4];
        check_components(&Weight::fourier(1.7), &ts);
        check_components(&Weight::fejer(2.0, 0.3), &ts);
        check_components(&Weight::omega(-1.3), &ts);
        check_components(&Weight::psi(0.8), &ts);
    }

    #[test]
    fn declared_hermitian_weights_are() {
        for w in [Weight::fourier(1.1), Weight::fejer(0.7, 0.2), Weight::omega(2.0), Weight::psi(-0.4)] {
            for t in [0.3, 1.0, 7.0] {
                assert!((w.evaluate(-t) - w.evaluate(t).conj()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn plain_weight_is_its_own_component() {
        let w = Weight::real(|t| 1.0 / (1.0 + t * t));
        assert_eq!(w.upper_components().len(), 1);
        assert_eq!(w.upper_components()[0].0, 0.0);
        assert_eq!(w.frequency_scale(), 0.0);
    }
}
