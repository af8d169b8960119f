//! The acceptance criteria as runnable checks, grouped into suites.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::{rngs::StdRng, Rng, SeedableRng};
use serde::Serialize;

use crate::analysis::{self, Verdict};
use crate::catalog::{self, TestFunction};
use crate::error::{Error, Result};
use crate::inversion::{self, KernelFamily};
use crate::kernels;
use crate::omega::{self, NormSource};
use crate::quadrature::{self, IntegrandSpec};
use crate::transform::{self, SamplingGrid, DEFAULT_H0, DEFAULT_LEVELS};

/// Wall-clock budget for `verify all`, criterion 12.
pub const FULL_RUN_BUDGET_SECONDS: f64 = 300.0;

/// The oracle values for the `s^{-ν} log(1 + y²/(s-x)²)` integral, computed
/// independently at high precision.
pub const EXAMPLE_ORACLES: [(f64, f64, f64, f64); 3] = [
    (0.5, 1.0, 1.0, 5.718_827_850_661_987_149_6),
    (0.75, 2.0, 1.0, 4.193_570_531_516_896_918),
    (0.25, 1.0, 3.0, 12.614_592_273_257_322_535),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Kernels,
    Omega,
    Transform,
    Inversion,
    Exchange,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernels => "kernels",
            Suite::Omega => "omega",
            Suite::Transform => "transform",
            Suite::Inversion => "inversion",
            Suite::Exchange => "exchange",
            Suite::All => "all",
        }
    }

    /// Criteria run by the suite; `all` adds criterion 12 on top.
    pub fn criteria(self) -> Vec<u8> {
        match self {
            Suite::Kernels => vec![1],
            Suite::Omega => vec![2, 3, 4],
            Suite::Transform => vec![5],
            Suite::Inversion => vec![6, 7],
            Suite::Exchange => vec![8, 9, 10, 11],
            Suite::All => (1..=11).collect(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "kernels" => Suite::Kernels,
            "omega" => Suite::Omega,
            "transform" => Suite::Transform,
            "inversion" => Suite::Inversion,
            "exchange" => Suite::Exchange,
            "all" => Suite::All,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown suite `{other}` (expected kernels, omega, transform, inversion, exchange or all)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: Option<f64>,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2}  {}  {:>8.2}s  {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.title,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub outcomes: Vec<CriterionOutcome>,
    pub seconds: f64,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed).count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            writeln!(f, "{o}")?;
        }
        write!(
            f,
            "suite {}: {} passed, {} failed in {:.2}s",
            self.suite,
            self.outcomes.len() - self.failures(),
            self.failures(),
            self.seconds
        )
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "kernel identities",
        2 => "variation constant and growth bound",
        3 => "Gaussian Omega against nested quadrature",
        4 => "small- and large-s asymptotics",
        5 => "pointwise transform recovery",
        6 => "inversion error decay",
        7 => "L^p pointwise inversion",
        8 => "exchange identity",
        9 => "eligibility verdicts",
        10 => "log-power example integral",
        11 => "convolution identities",
        12 => "full run budget",
        _ => "unknown",
    }
}

fn budget(id: u8) -> Option<f64> {
    match id {
        1 => Some(5.0),
        3 => Some(30.0),
        5 => Some(120.0),
        10 => Some(60.0),
        12 => Some(FULL_RUN_BUDGET_SECONDS),
        _ => None,
    }
}

type Check = Result<(bool, String)>;

/// Runs one of criteria 1 to 11.
pub fn run_criterion(id: u8) -> Result<CriterionOutcome> {
    let check: fn() -> Check = match id {
        1 => kernel_identities,
        2 => variation_constant,
        3 => gaussian_omega,
        4 => asymptotics,
        5 => transform_recovery,
        6 => inversion_decay,
        7 => lp_inversion,
        8 => exchange_identity,
        9 => eligibility_verdicts,
        10 => example_integral,
        11 => convolution_identities,
        other => return Err(Error::InvalidParameter(format!("no runnable criterion {other}"))),
    };
    let start = Instant::now();
    let (mut passed, mut detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    if let Some(limit) = budget(id) {
        if seconds >= limit {
            passed = false;
            detail = format!("{detail}; over the {limit} s budget");
        }
    }
    Ok(CriterionOutcome { id, title: title(id), passed, detail, seconds, budget_seconds: budget(id) })
}

/// Runs a suite, calling `progress` after every criterion.
pub fn verify_with(suite: Suite, mut progress: impl FnMut(&CriterionOutcome)) -> VerifyReport {
    let start = Instant::now();
    let mut outcomes = Vec::new();
    for id in suite.criteria() {
        let outcome = run_criterion(id).expect("suite criteria are runnable");
        progress(&outcome);
        outcomes.push(outcome);
    }
    if suite == Suite::All {
        let seconds = start.elapsed().as_secs_f64();
        let failures = outcomes.iter().filter(|o| !o.passed).count();
        let passed = failures == 0 && seconds < FULL_RUN_BUDGET_SECONDS;
        let outcome = CriterionOutcome {
            id: 12,
            title: title(12),
            passed,
            detail: format!("criteria 1-11 took {seconds:.1} s with {failures} failures"),
            seconds,
            budget_seconds: budget(12),
        };
        progress(&outcome);
        outcomes.push(outcome);
    }
    VerifyReport { suite, outcomes, seconds: start.elapsed().as_secs_f64() }
}

pub fn verify(suite: Suite) -> VerifyReport {
    verify_with(suite, |_| {})
}

fn entry(id: &str, params: &[(&str, f64)]) -> Result<TestFunction> {
    let map: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    catalog::lookup(id, &map)
}

fn kernel_identities() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut scaling, mut conjugation, mut second, mut fejer) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let step = 1e-4;
    for _ in 0..1000 {
        let s: f64 = rng.gen_range(-3.0..3.0);
        let t: f64 = rng.gen_range(-10.0..10.0);
        let h: f64 = rng.gen_range(0.01..1.0);
        let v = kernels::v(s, t);
        scaling = scaling.max((v - s * s * kernels::v(1.0, s * t)).norm() / (1.0 + v.norm()));
        conjugation = conjugation.max((kernels::v(-s, t) - v.conj()).norm());
        conjugation = conjugation.max((kernels::u(-s, t) + kernels::u(s, t).conj()).norm());
        let d2 = (kernels::v(s + step, t) - 2.0 * v + kernels::v(s - step, t)) / (step * step);
        second = second.max((d2 - Complex64::from_polar(1.0, -s * t)).norm());
        let diff = kernels::v(s + h, t) - 2.0 * v + kernels::v(s - h, t);
        fejer = fejer.max((diff - kernels::second_difference_kernel(s, h, t)).norm());
    }
    let passed = scaling <= 1e-13 && conjugation <= 1e-12 && second <= 1e-6 && fejer <= 1e-12;
    Ok((
        passed,
        format!(
            "1000 samples: scaling {scaling:.1e}, conjugation {conjugation:.1e}, second difference {second:.1e}, Fejér identity {fejer:.1e}"
        ),
    ))
}

fn variation_constant() -> Check {
    let c = kernels::var_v1(1e-6)?;
    let halved = kernels::var_v1(5e-7)?;
    let drift = (c.value - halved.value).abs();
    let c = c.value;
    let mut worst_margin = f64::INFINITY;
    let mut pairs = 0;
    let functions = [
        entry("indicator", &[])?,
        entry("gauss", &[])?,
        entry("sinc_abs", &[])?,
        entry("bessel_k0", &[])?,
        entry("bessel_window", &[("nu", 2.0)])?,
        entry("log_lorentz", &[])?,
        entry("triangle", &[])?,
    ];
    for f in &functions {
        let norm = omega::alexiewicz_norm(&NormSource::Function(f), None, 1e-10)?.value;
        for s in [0.1, 1.0, 10.0] {
            let o = omega::omega(f, s, 1e-11)?;
            worst_margin = worst_margin.min(c * norm * s * s + 1e-9 - o.value.norm());
            pairs += 1;
        }
    }
    Ok((
        drift <= 1e-6 && worst_margin >= 0.0 && pairs >= 20,
        format!("c = {c:.15}, change under halving {drift:.1e}; {pairs} pairs, smallest margin {worst_margin:.3e}"),
    ))
}

/// `∫_0^x f` with the sign convention for `x < 0`.
fn signed(spec: &IntegrandSpec<'_>, x: f64, tol: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let r = quadrature::integrate_finite(spec, x.min(0.0), x.max(0.0), tol)?.require("nested oracle")?;
    Ok(if x > 0.0 { r.value.re } else { -r.value.re })
}

fn gaussian_omega() -> Check {
    let f = entry("gauss", &[])?;
    let hat = f.transform_fn().ok_or_else(|| Error::Missing("Gaussian transform".into()))?;
    let inner = |sigma: f64| {
        let spec = IntegrandSpec::real(|tau| hat(tau).re);
        signed(&spec, sigma, 1e-15).unwrap_or(f64::NAN)
    };
    let mut worst = 0.0f64;
    for k in 0..21 {
        let s = -5.0 + 0.5 * k as f64;
        let spec = IntegrandSpec::real(inner);
        let oracle = signed(&spec, s, 1e-13)?;
        let value = omega::omega(&f, s, 1e-13)?.value;
        let err = if oracle == 0.0 { value.norm() } else { (value - oracle).norm() / oracle.abs() };
        worst = worst.max(err);
    }
    Ok((worst <= 1e-8, format!("21 points on [-5, 5], max relative error {worst:.2e}")))
}

fn asymptotics() -> Check {
    let f = entry("indicator", &[])?;
    let small = omega::omega(&f, 1e-3, 1e-14)?.value;
    let large = omega::omega(&f, 1e3, 1e-8)?.value;
    let a = (small / 1e-6 - 0.5).norm();
    let b = large.norm() / 1e6;
    Ok((a < 1e-3 && b < 1e-2, format!("|Ω(1e-3)/1e-6 - 1/2| = {a:.2e}, |Ω(1e3)|/1e6 = {b:.2e}")))
}

fn transform_recovery() -> Check {
    let cases: [(&str, &[f64], f64); 3] =
        [("sinc_abs", &[0.5, 2.0, 5.0], 1e-3), ("gauss", &[0.0, 1.0, 3.0], 1e-6), ("bessel_k0", &[0.0, 1.0], 1e-5)];
    let mut passed = true;
    let mut parts = Vec::new();
    for (id, points, limit) in cases {
        let f = entry(id, &[])?;
        let mut worst = 0.0f64;
        for &s in points {
            let est = transform::ft_extrapolated(&f, s, DEFAULT_H0, DEFAULT_LEVELS, 1e-10)?;
            let exact = f.transform_at(s).ok_or_else(|| Error::Missing(format!("transform of {id}")))?;
            worst = worst.max((est.value - exact).norm() / exact.norm());
        }
        passed &= worst <= limit;
        parts.push(format!("{id} {worst:.1e}"));
    }
    Ok((passed, format!("max relative errors: {}", parts.join(", "))))
}

fn inversion_decay() -> Check {
    let f = entry("triangle", &[])?;
    let grid = SamplingGrid::uniform(-4.0, 4.0, 321)?;
    let norm = omega::alexiewicz_norm(&NormSource::Function(&f), None, 1e-10)?.value;
    let errs = inversion::inversion_error_sweep(&f, KernelFamily::GaussWeierstrass, &[0.4, 0.2, 0.1], Some(&grid), 1e-10)
        .into_iter()
        .map(|r| r.map(|n| n.value))
        .collect::<Result<Vec<f64>>>()?;
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let small = errs[2] < 0.05 * norm;
    let rejected = matches!(
        inversion::inversion_error(&f, KernelFamily::Dirichlet, 0.1, Some(&grid), 1e-10),
        Err(Error::Unsupported(_))
    );
    Ok((
        decreasing && small && rejected,
        format!(
            "errors {:.3e}, {:.3e}, {:.3e} against ‖f‖ = {norm:.4}; Dirichlet {}",
            errs[0],
            errs[1],
            errs[2],
            if rejected { "rejected" } else { "not rejected" }
        ),
    ))
}

fn lp_inversion() -> Check {
    let f = entry("odd_lorentz", &[])?;
    let value = inversion::lp_pointwise_inverse(&f, 1.0, 0.05, 1e-8)?.value;
    let pointwise = (value - 0.5).norm();
    let g = f.transform_as_function()?;
    let lhs = omega::omega(&g, -1.0, 1e-12)?.value / (2.0 * PI);
    let spec = IntegrandSpec::real(|y| (1.0 - y) * f.eval(y).re);
    let rhs = quadrature::integrate_finite(&spec, 0.0, 1.0, 1e-14)?.value;
    let identity = (lhs - rhs).norm();
    Ok((
        pointwise <= 1e-3 && identity <= 1e-6,
        format!("f(1) recovered within {pointwise:.1e}; (1/2π)Ω_f̂(-1) - ∫_0^1 (1-y) f(y) dy = {identity:.1e}"),
    ))
}

fn exchange_identity() -> Check {
    let gauss = entry("gauss", &[])?;
    let shifted = gauss.shifted(0.7)?;
    let pairs = [
        ("sinc_abs", entry("sinc_abs", &[])?, &gauss),
        ("indicator", entry("indicator", &[])?, &gauss),
        // companion: the translate breaks the parity that makes the first pair 0 = 0
        ("sinc_abs/shifted", entry("sinc_abs", &[])?, &shifted),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, f, g) in pairs {
        let r = analysis::exchange_check(&f, g, None, 1e-9)?;
        let rel = r.difference() / r.rhs.norm().max(f64::MIN_POSITIVE);
        let ok = r.difference() <= 1e-6 * r.rhs.norm() && r.lhs.norm() <= r.bound;
        passed &= ok;
        parts.push(format!("{name}: |Δ| = {:.1e} (rel {rel:.1e}), |lhs| {:.4} ≤ bound {:.3}", r.difference(), r.lhs.norm(), r.bound));
    }
    Ok((passed, parts.join("; ")))
}

fn eligibility_verdicts() -> Check {
    let tol = 1e-8;
    let mut cases: Vec<(String, TestFunction, bool)> = vec![("bessel_k0".into(), entry("bessel_k0", &[])?, true)];
    for nu in [1.0, 1.5, 2.0] {
        cases.push((format!("bessel_window(ν={nu})"), entry("bessel_window", &[("nu", nu)])?, nu >= 1.5));
    }
    cases.push(("Dirichlet K_1".into(), KernelFamily::Dirichlet.k_function(1.0)?, false));
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, g, expected) in cases {
        let r = analysis::exchange_eligible(&g, tol)?;
        let eligible = r.verdict == Verdict::Eligible;
        passed &= eligible == expected && r.verdict != Verdict::Borderline;
        parts.push(format!("{name} {:?}", r.verdict).to_lowercase());
    }
    Ok((passed, parts.join(", ")))
}

fn example_integral() -> Check {
    let mut passed = true;
    let mut worst = 0.0f64;
    let mut oracle_gap = 0.0f64;
    for (nu, x, y, oracle) in EXAMPLE_ORACLES {
        let r = analysis::example_integral(nu, x, y, 1e-10)?;
        worst = worst.max(r.relative_error());
        oracle_gap = oracle_gap.max((r.closed_form - oracle).abs() / oracle);
        passed &= r.relative_error() <= 1e-6;
    }
    passed &= oracle_gap <= 1e-12;
    Ok((passed, format!("max relative error {worst:.1e}; closed form vs oracle {oracle_gap:.1e}")))
}

fn convolution_identities() -> Check {
    let tol = 1e-8;
    let gauss = entry("gauss", &[])?;
    let indicator = entry("indicator", &[])?;
    let sinc = entry("sinc_abs", &[])?;
    let zero = TestFunction::zero();
    let smooth = analysis::triangle_smoothed_gauss();
    let mut passed = true;
    let mut parts = Vec::new();
    let mut record = |name: &str, r: analysis::ConvolutionCheck| {
        passed &= r.relative_difference() <= 1e-5;
        parts.push(format!("{name} {:.1e}", r.relative_difference()));
    };
    record("exchange(indicator, gauss, gauss)", analysis::convolution_exchange_check(&indicator, &gauss, &gauss, tol)?);
    record("exchange(zero, gauss, gauss)", analysis::convolution_exchange_check(&zero, &gauss, &gauss, tol)?);
    record("exchange(indicator, gauss, smoothed triangle)", analysis::convolution_exchange_check(&indicator, &gauss, &smooth, tol)?);
    record("hat(sinc_abs, gauss, gauss)", analysis::convolution_hat_check(&sinc, &gauss, &gauss, tol)?);
    record("hat(shifted sinc_abs, gauss, gauss)", analysis::convolution_hat_check(&sinc.shifted(0.5)?, &gauss, &gauss, tol)?);
    record("hat(zero, gauss, gauss)", analysis::convolution_hat_check(&zero, &gauss, &gauss, tol)?);
    Ok((passed, format!("relative differences: {}", parts.join(", "))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse_and_list_criteria() {
        assert_eq!("exchange".parse::<Suite>().unwrap().criteria(), vec![8, 9, 10, 11]);
        assert_eq!(Suite::All.criteria().len(), 11);
        assert!("bogus".parse::<Suite>().is_err());
        assert!(run_criterion(12).is_err());
    }

    #[test]
    fn kernels_suite_is_fast_and_passes() {
        let report = verify(Suite::Kernels);
        assert!(report.all_passed(), "{report}");
        assert!(report.seconds < 1.0);
    }
}
