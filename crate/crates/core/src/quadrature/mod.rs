//! Adaptive quadrature on finite intervals, half-lines and the whole line.
//!
//! Finite intervals use global adaptive bisection with the 7/15-point
//! Gauss–Kronrod pair. Infinite ranges are split into a core interval and a
//! tail; the tail is cut into pieces (half-periods of the dominant
//! oscillation when one is declared) whose partial sums are either seen to
//! converge directly or are extrapolated with the epsilon algorithm. The
//! whole line is handled by folding `t ↦ f(t) + f(-t)` onto `[0, ∞)`, so
//! odd integrands integrate to exactly zero.

mod accel;
mod rule;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

pub use accel::{accelerate, Extrapolation};

use crate::error::{Error, Result};
use rule::{gk15, PanelEstimate, EVALUATIONS_PER_PANEL};

/// Maximum bisection depth of a single panel.
pub const MAX_DEPTH: u32 = 60;
/// Panels narrower than this fraction of the interval are not split further.
pub const MIN_PANEL_FRACTION: f64 = 1e-14;
const MAX_PANELS: usize = 40_000;
/// Tail pieces tried with plain partial sums before switching to the
/// doubling checkpoints.
const ALTERNATING_BUDGET: usize = 120;
const TAIL_SEGMENT_BUDGET: usize = 1 << 18;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// How an integrand behaves at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DecayClass {
    AbsolutelyIntegrable,
    ConditionallyConvergent,
    CompactSupport { lo: f64, hi: f64 },
}

/// An integrable endpoint singularity behaving like `|t - at|^exponent`,
/// removed by the substitution `|t - at| = w^{1/(exponent+1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLaw {
    pub at: f64,
    pub exponent: f64,
}

/// Outcome classification of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxDepth,
    Accelerated,
    Failed,
}

impl Status {
    pub fn is_success(self) -> bool {
        matches!(self, Status::Converged | Status::Accelerated)
    }

    /// The less favourable of two statuses, for combining partial results.
    pub fn worst(self, other: Status) -> Status {
        fn rank(s: Status) -> u8 {
            match s {
                Status::Converged => 0,
                Status::Accelerated => 1,
                Status::MaxDepth => 2,
                Status::Failed => 3,
            }
        }
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub status: Status,
}

impl QuadResult {
    /// The exact result 0.
    pub fn zero() -> Self {
        Self::exact(ZERO)
    }

    /// A value known exactly, with no quadrature behind it.
    pub fn exact(value: Complex64) -> Self {
        QuadResult { value, error_estimate: 0.0, evaluations: 0, status: Status::Converged }
    }

    /// Sum of two results; errors add, the status is the worse one.
    pub fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            status: self.status.worst(other.status),
        }
    }

    pub fn scale(self, factor: Complex64) -> QuadResult {
        QuadResult {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.norm(),
            ..self
        }
    }

    /// Turns a non-successful status into an error carrying `context`.
    pub fn require(self, context: &str) -> Result<QuadResult> {
        if self.status.is_success() {
            Ok(self)
        } else {
            Err(Error::Convergence {
                context: context.to_string(),
                detail: format!(
                    "status {:?}, value {:.6e}, error estimate {:.3e} after {} evaluations",
                    self.status, self.value, self.error_estimate, self.evaluations
                ),
            })
        }
    }
}

/// Frequencies below this are treated as non-oscillating.
const FREQUENCY_FLOOR: f64 = 1e-9;

/// One term `e^{iωt}·a(t)` of an integrand's tail, with `a` free of
/// oscillation.
pub struct TailComponent<'a> {
    frequency: f64,
    amplitude: Box<dyn Fn(f64) -> Complex64 + 'a>,
}

impl<'a> TailComponent<'a> {
    pub fn new(frequency: f64, amplitude: impl Fn(f64) -> Complex64 + 'a) -> Self {
        TailComponent { frequency, amplitude: Box::new(amplitude) }
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn amplitude(&self, t: f64) -> Complex64 {
        (self.amplitude)(t)
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.frequency * t) * (self.amplitude)(t)
    }

    fn reflected(&self) -> TailComponent<'_> {
        TailComponent { frequency: -self.frequency, amplitude: Box::new(move |t| (self.amplitude)(-t)) }
    }

    fn borrowed(&self) -> TailComponent<'_> {
        TailComponent { frequency: self.frequency, amplitude: Box::new(move |t| (self.amplitude)(t)) }
    }
}

/// An integrand with the structural hints the integrators use.
///
/// Besides singular points and a dominant frequency, an integrand may
/// declare its behaviour far out on each half-line as a sum of
/// single-frequency components. The tail beyond the core interval is then
/// integrated component by component, so integrands that mix several
/// frequencies (products of oscillating kernels and oscillating functions)
/// still present a clean structure to the sequence transforms.
pub struct IntegrandSpec<'a> {
    evaluator: Box<dyn Fn(f64) -> Complex64 + 'a>,
    singular_points: Vec<f64>,
    power_laws: Vec<PowerLaw>,
    oscillation_frequency: Option<f64>,
    decay_class: DecayClass,
    upper_tail: Vec<TailComponent<'a>>,
    lower_tail: Vec<TailComponent<'a>>,
}

impl<'a> IntegrandSpec<'a> {
    pub fn new(f: impl Fn(f64) -> Complex64 + 'a) -> Self {
        IntegrandSpec {
            evaluator: Box::new(f),
            singular_points: Vec::new(),
            power_laws: Vec::new(),
            oscillation_frequency: None,
            decay_class: DecayClass::AbsolutelyIntegrable,
            upper_tail: Vec::new(),
            lower_tail: Vec::new(),
        }
    }

    /// Real-valued integrand convenience constructor.
    pub fn real(f: impl Fn(f64) -> f64 + 'a) -> Self {
        Self::new(move |t| Complex64::new(f(t), 0.0))
    }

    pub fn singular_points(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.singular_points.extend(points);
        self.singular_points.sort_by(f64::total_cmp);
        self.singular_points.dedup();
        self
    }

    pub fn power_law(mut self, at: f64, exponent: f64) -> Self {
        assert!(exponent > -1.0, "power-law exponent must exceed -1");
        self.power_laws.push(PowerLaw { at, exponent });
        self.singular_points(std::iter::once(at))
    }

    pub fn oscillation(mut self, frequency: f64) -> Self {
        if frequency != 0.0 && frequency.is_finite() {
            self.oscillation_frequency = Some(frequency.abs());
        }
        self
    }

    pub fn decay(mut self, class: DecayClass) -> Self {
        self.decay_class = class;
        self
    }

    /// Components whose sum equals the integrand for large positive `t`.
    pub fn upper_tail(mut self, components: Vec<TailComponent<'a>>) -> Self {
        self.upper_tail = components;
        self
    }

    /// Components whose sum equals the integrand for large negative `t`.
    pub fn lower_tail(mut self, components: Vec<TailComponent<'a>>) -> Self {
        self.lower_tail = components;
        self
    }

    pub fn compact_support(self, lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "support must be a nonempty interval");
        self.decay(DecayClass::CompactSupport { lo, hi })
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        (self.evaluator)(t)
    }

    pub fn singular(&self) -> &[f64] {
        &self.singular_points
    }

    pub fn oscillation_frequency(&self) -> Option<f64> {
        self.oscillation_frequency
    }

    pub fn decay_class(&self) -> DecayClass {
        self.decay_class
    }

    fn power_law_at(&self, point: f64) -> Option<PowerLaw> {
        self.power_laws.iter().copied().find(|p| p.at == point)
    }

    /// `t ↦ f(-t)` with every hint mirrored.
    fn reflected(&self) -> IntegrandSpec<'_> {
        IntegrandSpec {
            evaluator: Box::new(move |t| self.evaluate(-t)),
            singular_points: {
                let mut v: Vec<f64> = self.singular_points.iter().map(|p| -p).collect();
                v.sort_by(f64::total_cmp);
                v
            },
            power_laws: self.power_laws.iter().map(|p| PowerLaw { at: -p.at, exponent: p.exponent }).collect(),
            oscillation_frequency: self.oscillation_frequency,
            decay_class: match self.decay_class {
                DecayClass::CompactSupport { lo, hi } => DecayClass::CompactSupport { lo: -hi, hi: -lo },
                other => other,
            },
            upper_tail: self.lower_tail.iter().map(TailComponent::reflected).collect(),
            lower_tail: self.upper_tail.iter().map(TailComponent::reflected).collect(),
        }
    }

    /// `t ↦ f(t) + f(-t)` on `[0, ∞)`.
    fn folded(&self) -> IntegrandSpec<'_> {
        let mut singular: Vec<f64> = self.singular_points.iter().map(|p| p.abs()).collect();
        singular.sort_by(f64::total_cmp);
        singular.dedup();
        let mut power_laws: Vec<PowerLaw> = Vec::new();
        for p in &self.power_laws {
            let at = p.at.abs();
            match power_laws.iter_mut().find(|q| q.at == at) {
                Some(q) => q.exponent = q.exponent.min(p.exponent),
                None => power_laws.push(PowerLaw { at, exponent: p.exponent }),
            }
        }
        IntegrandSpec {
            evaluator: Box::new(move |t| self.evaluate(t) + self.evaluate(-t)),
            singular_points: singular,
            power_laws,
            oscillation_frequency: self.oscillation_frequency,
            decay_class: match self.decay_class {
                DecayClass::CompactSupport { lo, hi } => {
                    DecayClass::CompactSupport { lo: 0.0, hi: lo.abs().max(hi.abs()) }
                }
                other => other,
            },
            upper_tail: {
                let mut tail: Vec<TailComponent<'_>> = self.upper_tail.iter().map(TailComponent::borrowed).collect();
                let declared = !tail.is_empty() || !self.lower_tail.is_empty();
                if declared && self.upper_tail.is_empty() {
                    tail.push(TailComponent::new(0.0, move |t| self.evaluate(t)));
                }
                tail.extend(self.lower_tail.iter().map(TailComponent::reflected));
                if declared && self.lower_tail.is_empty() {
                    tail.push(TailComponent::new(0.0, move |t| self.evaluate(-t)));
                }
                tail
            },
            lower_tail: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Mapping {
    Identity,
    /// t = at + len·w^{1/β}, w ∈ [0, 1]
    FromLeft { at: f64, len: f64, beta: f64 },
    /// t = at - len·w^{1/β}, w ∈ [0, 1]
    FromRight { at: f64, len: f64, beta: f64 },
}

impl Mapping {
    #[inline]
    fn eval(self, spec: &IntegrandSpec<'_>, w: f64) -> Complex64 {
        match self {
            Mapping::Identity => spec.evaluate(w),
            Mapping::FromLeft { at, len, beta } => {
                let r = w.powf(1.0 / beta);
                let jac = len / beta * w.powf(1.0 / beta - 1.0);
                spec.evaluate(at + len * r) * jac
            }
            Mapping::FromRight { at, len, beta } => {
                let r = w.powf(1.0 / beta);
                let jac = len / beta * w.powf(1.0 / beta - 1.0);
                spec.evaluate(at - len * r) * jac
            }
        }
    }
}

struct Piece {
    lo: f64,
    hi: f64,
    mapping: Mapping,
}

#[derive(Clone, Copy)]
struct Panel {
    piece: usize,
    a: f64,
    b: f64,
    depth: u32,
    est: PanelEstimate,
}

#[derive(PartialEq)]
struct HeapKey(f64, usize);

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger error first; ties broken by lower index for determinism
        self.0.total_cmp(&other.0).then_with(|| other.1.cmp(&self.1))
    }
}

fn split_pieces(spec: &IntegrandSpec<'_>, a: f64, b: f64) -> Vec<Piece> {
    let mut cuts = vec![a];
    cuts.extend(spec.singular_points.iter().copied().filter(|p| *p > a && *p < b));
    cuts.push(b);
    let mut pieces = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let left = spec.power_law_at(lo);
        let right = spec.power_law_at(hi);
        match (left, right) {
            (Some(l), Some(r)) => {
                let mid = 0.5 * (lo + hi);
                pieces.push(Piece {
                    lo: 0.0,
                    hi: 1.0,
                    mapping: Mapping::FromLeft { at: lo, len: mid - lo, beta: l.exponent + 1.0 },
                });
                pieces.push(Piece {
                    lo: 0.0,
                    hi: 1.0,
                    mapping: Mapping::FromRight { at: hi, len: hi - mid, beta: r.exponent + 1.0 },
                });
            }
            (Some(l), None) => pieces.push(Piece {
                lo: 0.0,
                hi: 1.0,
                mapping: Mapping::FromLeft { at: lo, len: hi - lo, beta: l.exponent + 1.0 },
            }),
            (None, Some(r)) => pieces.push(Piece {
                lo: 0.0,
                hi: 1.0,
                mapping: Mapping::FromRight { at: hi, len: hi - lo, beta: r.exponent + 1.0 },
            }),
            (None, None) => pieces.push(Piece { lo, hi, mapping: Mapping::Identity }),
        }
    }
    pieces
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must be positive and finite, got {tol}")))
    }
}

/// `∫_a^b f` by global adaptive bisection.
///
/// Panels touching a declared singular point are never evaluated at that
/// point; panels at a declared power-law point are mapped so the singularity
/// disappears. The result carries `MaxDepth` when the tolerance could not be
/// met before the depth or panel limits.
pub fn integrate_finite(spec: &IntegrandSpec<'_>, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    check_tolerance(tol)?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParameter(format!("need finite a < b, got [{a}, {b}]")));
    }
    let pieces = split_pieces(spec, a, b);
    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    let mut total_error = 0.0;

    let estimate = |piece: &Piece, lo: f64, hi: f64| -> PanelEstimate {
        let mapping = piece.mapping;
        gk15(&|w: f64| mapping.eval(spec, w), lo, hi)
    };
    let refinable = |p: &Panel, width0: f64| -> bool {
        p.depth < MAX_DEPTH && (p.b - p.a) > MIN_PANEL_FRACTION * width0 && p.est.error > p.est.floor
    };

    for (i, piece) in pieces.iter().enumerate() {
        let est = estimate(piece, piece.lo, piece.hi);
        evaluations += EVALUATIONS_PER_PANEL;
        total_error += est.error;
        let panel = Panel { piece: i, a: piece.lo, b: piece.hi, depth: 0, est };
        if refinable(&panel, piece.hi - piece.lo) {
            heap.push(HeapKey(est.error, panels.len()));
        }
        panels.push(panel);
    }

    let mut hit_limit = false;
    while total_error > tol {
        let Some(HeapKey(_, idx)) = heap.pop() else {
            break;
        };
        if panels.len() + 1 > MAX_PANELS {
            hit_limit = true;
            break;
        }
        let parent = panels[idx];
        let piece = &pieces[parent.piece];
        let width0 = piece.hi - piece.lo;
        let mid = 0.5 * (parent.a + parent.b);
        let left = estimate(piece, parent.a, mid);
        let right = estimate(piece, mid, parent.b);
        evaluations += 2 * EVALUATIONS_PER_PANEL;
        total_error += left.error + right.error - parent.est.error;
        let lp = Panel { piece: parent.piece, a: parent.a, b: mid, depth: parent.depth + 1, est: left };
        let rp = Panel { piece: parent.piece, a: mid, b: parent.b, depth: parent.depth + 1, est: right };
        panels[idx] = lp;
        if refinable(&lp, width0) {
            heap.push(HeapKey(left.error, idx));
        }
        let ridx = panels.len();
        panels.push(rp);
        if refinable(&rp, width0) {
            heap.push(HeapKey(right.error, ridx));
        }
    }

    // fixed summation order: by piece, then position
    panels.sort_by(|x, y| x.piece.cmp(&y.piece).then(x.a.total_cmp(&y.a)));
    let mut value = ZERO;
    let mut error = 0.0;
    for p in &panels {
        value += p.est.value;
        error += p.est.error;
    }
    // panels whose error sits at their rounding floor cannot improve; the
    // tolerance is judged on the rest
    let resolvable: f64 = panels.iter().filter(|p| p.est.error > p.est.floor).map(|p| p.est.error).sum();
    let status = if error <= tol || (!hit_limit && resolvable <= tol) { Status::Converged } else { Status::MaxDepth };
    Ok(QuadResult { value, error_estimate: error, evaluations, status })
}

/// Length of the core interval for a given oscillation frequency.
fn core_length(frequency: Option<f64>) -> f64 {
    match frequency {
        Some(w) => 10f64.max(50.0 / w),
        None => 10.0,
    }
}

/// `∫_a^∞ f`.
pub fn integrate_upper(spec: &IntegrandSpec<'_>, a: f64, tol: f64) -> Result<QuadResult> {
    check_tolerance(tol)?;
    if !a.is_finite() {
        return Err(Error::InvalidParameter(format!("lower limit must be finite, got {a}")));
    }
    if let DecayClass::CompactSupport { lo, hi } = spec.decay_class {
        if hi <= a {
            return Ok(QuadResult::zero());
        }
        return integrate_finite(spec, a.max(lo), hi, tol);
    }
    let components = &spec.upper_tail;
    let dominant = components
        .iter()
        .map(|c| c.frequency.abs())
        .filter(|w| *w > FREQUENCY_FLOOR)
        .fold(spec.oscillation_frequency, |acc, w| Some(acc.map_or(w, |x: f64| x.max(w))));
    let mut core_end = a.max(0.0) + core_length(dominant);
    if let Some(last) = spec.singular_points.iter().copied().filter(|p| *p >= a).last() {
        core_end = core_end.max(last + 1.0);
    }
    if components.is_empty() {
        if let Some(w) = spec.oscillation_frequency {
            // whole periods from `a`, so tail pieces keep the phase at `a`
            let period = 2.0 * PI / w;
            core_end = a + ((core_end - a) / period).ceil() * period;
        }
    }
    let core = integrate_finite(spec, a, core_end, tol / 2.0)?;
    if components.is_empty() {
        return Ok(core.combine(integrate_tail(spec, core_end, tol / 2.0)?));
    }
    let groups = frequency_groups(components);
    let share = tol / 2.0 / groups.len() as f64;
    let mut total = core;
    for (frequency, members) in &groups {
        let w = *frequency;
        let eval = move |t: f64| {
            let amp: Complex64 = members.iter().map(|c| c.amplitude(t)).sum();
            Complex64::from_polar(1.0, w * t) * amp
        };
        let mut piece = IntegrandSpec::new(eval);
        piece = if w.abs() > FREQUENCY_FLOOR {
            piece.decay(DecayClass::ConditionallyConvergent).oscillation(w)
        } else {
            piece.decay(spec.decay_class)
        };
        total = total.combine(integrate_tail(&piece, core_end, share)?);
    }
    Ok(total)
}

/// Components grouped by (numerically) equal frequency, in increasing order.
fn frequency_groups<'c, 'a>(components: &'c [TailComponent<'a>]) -> Vec<(f64, Vec<&'c TailComponent<'a>>)> {
    let mut sorted: Vec<&TailComponent<'a>> = components.iter().collect();
    sorted.sort_by(|x, y| x.frequency.total_cmp(&y.frequency));
    let mut groups: Vec<(f64, Vec<&TailComponent<'a>>)> = Vec::new();
    for c in sorted {
        let w = if c.frequency.abs() <= FREQUENCY_FLOOR { 0.0 } else { c.frequency };
        match groups.last_mut() {
            Some((g, members)) if (w - *g).abs() <= 1e-12 * g.abs().max(1.0) => members.push(c),
            _ => groups.push((w, vec![c])),
        }
    }
    groups
}

/// `∫_{-∞}^b f`.
pub fn integrate_lower(spec: &IntegrandSpec<'_>, b: f64, tol: f64) -> Result<QuadResult> {
    integrate_upper(&spec.reflected(), -b, tol)
}

/// `lim_{a→-∞, b→∞} ∫_a^b f`, computed on the folded integrand.
pub fn integrate_line(spec: &IntegrandSpec<'_>, tol: f64) -> Result<QuadResult> {
    let folded = spec.folded();
    let mut r = integrate_upper(&folded, 0.0, tol)?;
    r.evaluations *= 2;
    Ok(r)
}

/// Tail `∫_start^∞ f` from partial integrals over consecutive pieces.
fn integrate_tail(spec: &IntegrandSpec<'_>, start: f64, tol: f64) -> Result<QuadResult> {
    let frequency = spec.oscillation_frequency;
    let piece_len = match frequency {
        Some(w) => PI / w,
        None => start.abs().max(1.0),
    };
    let breaks = move |i: usize| start + i as f64 * piece_len;
    let mut tail = TailPieces::new(spec, &breaks, tol / 100.0);

    if let (DecayClass::ConditionallyConvergent, Some(_)) = (spec.decay_class, frequency) {
        if let Some(r) = tail.alternating(tol)? {
            return Ok(r);
        }
    }
    let unit = match frequency {
        // checkpoints a whole number of periods apart, roughly doubling `start`
        Some(_) => 2 * ((start.abs().max(1.0) / (2.0 * piece_len)).round().max(1.0) as usize),
        None => 1,
    };
    tail.doubling(tol, unit)
}

/// `∫_{b_0}^∞ f` summed over the pieces `[b_i, b_{i+1}]` of a caller-supplied
/// increasing, unbounded break sequence `b_i = breaks(i)`.
///
/// Useful when the integrand has infinitely many known corners: putting them
/// on piece boundaries keeps every piece smooth. Partial sums are taken at
/// `b_{2^k - 1}` and extrapolated, so the breaks should grow roughly linearly
/// in `i`, with the integrand's structure (if periodic) repeating from piece
/// to piece.
pub fn integrate_breaks(spec: &IntegrandSpec<'_>, breaks: &dyn Fn(usize) -> f64, tol: f64) -> Result<QuadResult> {
    check_tolerance(tol)?;
    let mut tail = TailPieces::new(spec, breaks, tol / 100.0);
    tail.doubling(tol, 1)
}

struct TailPieces<'s, 'a> {
    spec: &'s IntegrandSpec<'a>,
    breaks: &'s dyn Fn(usize) -> f64,
    piece_tol: f64,
    values: Vec<Complex64>,
    partial: Vec<Complex64>,
    errors: f64,
    evaluations: usize,
    worst: Status,
}

impl<'s, 'a> TailPieces<'s, 'a> {
    fn new(spec: &'s IntegrandSpec<'a>, breaks: &'s dyn Fn(usize) -> f64, piece_tol: f64) -> Self {
        TailPieces {
            spec,
            breaks,
            piece_tol,
            values: Vec::new(),
            partial: vec![ZERO],
            errors: 0.0,
            evaluations: 0,
            worst: Status::Converged,
        }
    }

    /// Makes sure the first `n` pieces are integrated.
    fn ensure(&mut self, n: usize) -> Result<()> {
        while self.values.len() < n {
            let i = self.values.len();
            let (lo, hi) = ((self.breaks)(i), (self.breaks)(i + 1));
            let r = integrate_finite(self.spec, lo, hi, self.piece_tol)?;
            self.evaluations += r.evaluations;
            self.errors += r.error_estimate;
            self.worst = self.worst.worst(r.status);
            let last = *self.partial.last().unwrap();
            self.values.push(r.value);
            self.partial.push(last + r.value);
        }
        Ok(())
    }

    fn finish(&self, value: Complex64, extrapolation_error: f64, status: Status) -> QuadResult {
        let status = if status.is_success() && self.worst == Status::MaxDepth { Status::MaxDepth } else { status };
        QuadResult {
            value,
            error_estimate: extrapolation_error + self.errors,
            evaluations: self.evaluations,
            status,
        }
    }

    /// Partial sums after every half-period, extrapolated. `None` when the
    /// budget runs out without a stable limit.
    fn alternating(&mut self, tol: f64) -> Result<Option<QuadResult>> {
        let mut agreed = 0;
        let mut previous: Option<Complex64> = None;
        for n in 1..=ALTERNATING_BUDGET {
            self.ensure(n)?;
            if n < 6 {
                continue;
            }
            let est = accel::extrapolate(&self.partial[1..=n]);
            let stable = previous.is_some_and(|p| (p - est.value).norm() <= tol / 2.0);
            previous = Some(est.value);
            if est.error <= tol / 2.0 && stable {
                agreed += 1;
                if agreed >= 2 {
                    let status = if self.values[n - 3..n].iter().all(|v| v.norm() <= tol / 8.0) {
                        Status::Converged
                    } else {
                        Status::Accelerated
                    };
                    return Ok(Some(self.finish(est.value, est.error, status)));
                }
            } else {
                agreed = 0;
            }
        }
        Ok(None)
    }

    /// Partial sums after `unit·(2^k - 1)` pieces. With equal pieces and a
    /// suitable `unit` the checkpoints are whole periods apart, so the phase of
    /// the remainder is the same at each of them.
    fn doubling(&mut self, tol: f64, unit: usize) -> Result<QuadResult> {
        let mut checkpoints: Vec<Complex64> = Vec::new();
        let mut last_est: Option<accel::Extrapolation> = None;
        let mut small_chunks = 0;
        let mut previous = 0usize;
        let mut k = 1u32;
        loop {
            let n = unit * ((1usize << k) - 1);
            if n > TAIL_SEGMENT_BUDGET {
                break;
            }
            self.ensure(n)?;
            let s = self.partial[n];
            let chunk = s - self.partial[previous];
            checkpoints.push(s);
            if previous > 0 && chunk.norm() <= tol / 8.0 {
                small_chunks += 1;
                if small_chunks >= 2 {
                    return Ok(self.finish(s, chunk.norm(), Status::Converged));
                }
            } else {
                small_chunks = 0;
            }
            if checkpoints.len() >= 4 {
                let est = accel::extrapolate(&checkpoints);
                let stable = last_est.is_some_and(|p| (p.value - est.value).norm() <= tol / 2.0);
                if est.error <= tol && stable {
                    return Ok(self.finish(est.value, est.error, Status::Accelerated));
                }
                last_est = Some(est);
            }
            previous = n;
            k += 1;
        }
        let (value, err) = match last_est {
            Some(e) => (e.value, e.error),
            None => (*self.partial.last().unwrap(), f64::INFINITY),
        };
        Ok(self.finish(value, err, Status::Failed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn constant_on_unit_interval() {
        let spec = IntegrandSpec::real(|_| 1.0);
        let r = integrate_finite(&spec, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-14);
        assert_eq!(r.status, Status::Converged);
        assert!(r.evaluations > 0);
    }

    #[test]
    fn gaussian_on_finite_interval() {
        let spec = IntegrandSpec::real(|t| (-t * t).exp());
        let r = integrate_finite(&spec, -8.0, 8.0, 1e-12).unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn inverse_square_root_singularity() {
        let spec = IntegrandSpec::real(|t| 1.0 / t.sqrt()).singular_points([0.0]);
        let r = integrate_finite(&spec, 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn power_law_substitution_is_exact_enough() {
        let spec = IntegrandSpec::real(|t| t.powf(-0.75) * t.cos()).power_law(0.0, -0.75);
        let r = integrate_finite(&spec, 0.0, 1.0, 1e-13).unwrap();
        // ∫_0^1 t^{-3/4} cos t dt, series Σ (-1)^k / ((2k)! (2k + 1/4))
        let mut expected = 0.0;
        let mut fact = 1.0;
        for k in 0..12 {
            if k > 0 {
                fact *= (2 * k - 1) as f64 * (2 * k) as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            expected += sign / (fact * (2.0 * k as f64 + 0.25));
        }
        assert!((r.value.re - expected).abs() < 1e-12, "{} vs {}", r.value.re, expected);
        assert!(r.evaluations < 200);
    }

    #[test]
    fn rejects_bad_intervals_and_tolerances() {
        let spec = IntegrandSpec::real(|_| 1.0);
        assert!(integrate_finite(&spec, 1.0, 0.0, 1e-8).is_err());
        assert!(integrate_finite(&spec, 0.0, f64::INFINITY, 1e-8).is_err());
        assert!(integrate_finite(&spec, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn gaussian_on_the_line() {
        let spec = IntegrandSpec::real(|t| (-t * t).exp());
        let r = integrate_line(&spec, 1e-12).unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-10, "{r:?}");
        assert_eq!(r.status, Status::Converged);
    }

    #[test]
    fn sine_over_t_on_half_line() {
        let spec = IntegrandSpec::real(|t| if t == 0.0 { 1.0 } else { t.sin() / t })
            .decay(DecayClass::ConditionallyConvergent)
            .oscillation(1.0);
        let r = integrate_upper(&spec, 0.0, 1e-10).unwrap();
        assert!((r.value.re - FRAC_PI_2).abs() < 1e-8, "{r:?}");
        assert!(r.status.is_success());
    }

    #[test]
    fn zero_function_converges() {
        let spec = IntegrandSpec::real(|_| 0.0).decay(DecayClass::ConditionallyConvergent);
        let r = integrate_line(&spec, 1e-10).unwrap();
        assert_eq!(r.value, ZERO);
        assert_eq!(r.status, Status::Converged);
    }

    #[test]
    fn odd_integrands_vanish_exactly() {
        let spec = IntegrandSpec::real(|t| t.sin() / (1.0 + t * t))
            .decay(DecayClass::ConditionallyConvergent)
            .oscillation(1.0);
        let r = integrate_line(&spec, 1e-10).unwrap();
        assert_eq!(r.value, ZERO);
    }

    #[test]
    fn lower_half_line_mirrors_upper() {
        let spec = IntegrandSpec::real(|t| (t / 3.0).exp()).decay(DecayClass::AbsolutelyIntegrable);
        let r = integrate_lower(&spec, 0.0, 1e-11).unwrap();
        assert!((r.value.re - 3.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn laplace_kernel_transform() {
        for &s in &[1.0, 5.0, 20.0] {
            let spec = IntegrandSpec::new(move |t: f64| Complex64::from_polar((-t.abs() / 10.0).exp(), -s * t))
                .singular_points([0.0])
                .oscillation(s);
            let r = integrate_line(&spec, 1e-10).unwrap();
            let expected = 0.2 / (s * s + 0.01);
            assert!((r.value - Complex64::new(expected, 0.0)).norm() < 1e-8, "s={s}: {r:?}");
        }
    }

    #[test]
    fn two_frequency_tail_by_components() {
        // ∫ e^{-2it} sin t/|t| dt = i ln(1/3)
        let i2 = Complex64::new(0.0, 2.0);
        let spec = IntegrandSpec::new(|t: f64| {
            if t == 0.0 {
                ZERO
            } else {
                Complex64::from_polar(t.sin() / t.abs(), -2.0 * t)
            }
        })
        .singular_points([0.0])
        .decay(DecayClass::ConditionallyConvergent)
        .upper_tail(vec![
            TailComponent::new(-1.0, move |t| 1.0 / (i2 * t)),
            TailComponent::new(-3.0, move |t| -1.0 / (i2 * t)),
        ])
        .lower_tail(vec![
            TailComponent::new(-1.0, move |t| -1.0 / (i2 * t)),
            TailComponent::new(-3.0, move |t| 1.0 / (i2 * t)),
        ]);
        let r = integrate_line(&spec, 1e-10).unwrap();
        let expected = Complex64::new(0.0, (1.0f64 / 3.0).ln());
        assert!((r.value - expected).norm() < 1e-8, "{r:?}");
        assert!(r.status.is_success());
    }

    #[test]
    fn slow_monotone_tail_is_extrapolated() {
        // ∫_1^∞ dt / (t² + t) = ln 2
        let spec = IntegrandSpec::real(|t| 1.0 / (t * t + t));
        let r = integrate_upper(&spec, 1.0, 1e-10).unwrap();
        assert!((r.value.re - std::f64::consts::LN_2).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn mixed_tail_with_oscillation_and_drift() {
        // ∫_0^∞ (1 - cos t)/(1 + t²) dt = (π/2)(1 - e^{-1})
        let spec = IntegrandSpec::real(|t| (1.0 - t.cos()) / (1.0 + t * t))
            .decay(DecayClass::ConditionallyConvergent)
            .oscillation(1.0);
        let r = integrate_upper(&spec, 0.0, 1e-10).unwrap();
        let expected = FRAC_PI_2 * (1.0 - (-1f64).exp());
        assert!((r.value.re - expected).abs() < 1e-8, "{r:?}");
    }
}
