//! Special functions needed by the catalog and the acceptance oracles.
//!
//! Everything here is real-valued and double precision. The Bessel routines
//! switch between a convergent power series for small argument and the
//! Hankel asymptotic expansion for large argument.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function by the Lanczos approximation (g = 7, nine terms), with the
/// reflection formula below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEFFS[0];
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x < 2.0 {
        // e^{-x^2} * 2/sqrt(pi) * sum x^{2n+1} 2^n / (2n+1)!!, all terms positive
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        sum * (-x2).exp() * 2.0 / PI.sqrt()
    } else {
        1.0 - erfc(x)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x < 2.0 {
        return 1.0 - erf(x);
    }
    // Continued fraction x + (1/2)/(x + 1/(x + (3/2)/(x + ...))), evaluated by
    // modified Lentz.
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * PI.sqrt())
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Argument above which K_0 and K_1 come from the integral representation
/// instead of the power series.
pub const K_SWITCH: f64 = 2.0;
/// Argument at which J_ν leaves the power series.
pub const J_SWITCH: f64 = 12.0;

/// Modified Bessel function of the second kind, order zero, for x > 0.
pub fn bessel_k0(x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k0 requires a positive argument");
    if x <= K_SWITCH {
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut harmonic = 0.0;
        let mut i0 = 1.0;
        let mut tail = 0.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * k);
            harmonic += 1.0 / k;
            i0 += term;
            tail += term * harmonic;
            if term * harmonic < 1e-18 * tail.abs().max(1e-300) {
                break;
            }
        }
        -((x / 2.0).ln() + EULER_GAMMA) * i0 + tail
    } else {
        bessel_k_integral(0.0, x)
    }
}

/// Modified Bessel function of the second kind, order one, for x > 0.
pub fn bessel_k1(x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k1 requires a positive argument");
    if x <= K_SWITCH {
        // 1/x + ln(x/2) I_1(x) - (x/4) Σ [ψ(k+1) + ψ(k+2)] q^k / (k!(k+1)!)
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut psi_k1 = -EULER_GAMMA;
        let mut i1 = 1.0;
        let mut tail = psi_k1 + (1.0 - EULER_GAMMA);
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * (k + 1.0));
            psi_k1 += 1.0 / k;
            let psi_k2 = psi_k1 + 1.0 / (k + 1.0);
            i1 += term;
            let t = term * (psi_k1 + psi_k2);
            tail += t;
            if t.abs() < 1e-18 * tail.abs().max(1e-300) && term < 1e-18 * i1 {
                break;
            }
        }
        1.0 / x + (x / 2.0).ln() * (x / 2.0) * i1 - x / 4.0 * tail
    } else {
        bessel_k_integral(1.0, x)
    }
}

/// `K_ν(x) = ∫_0^∞ e^{-x cosh t} cosh(νt) dt` by the trapezoid rule, which
/// converges geometrically in the step for this entire integrand.
fn bessel_k_integral(nu: f64, x: f64) -> f64 {
    // the integrand has width ~1/√x about t = 0
    let step = 0.2f64.min(0.5 / x.sqrt());
    // e^{-x (cosh t - 1)} below 1e-18 beyond here
    let t_max = (1.0 + 42.0 / x).acosh();
    let mut sum = 0.5;
    let mut k = 1.0;
    loop {
        let t = k * step;
        if t > t_max {
            break;
        }
        sum += (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
        k += 1.0;
    }
    (-x).exp() * step * sum
}

/// Sums the Hankel asymptotic coefficients a_k(ν)/x^k up to the smallest term.
///
/// With `alternating_sum` the plain sum Σ a_k/x^k is returned (the K_ν
/// expansion, terms with sign (μ - (2k-1)^2)); otherwise the even/odd parts P
/// and Q used by J_ν are returned separately.
fn hankel_series(nu: f64, x: f64, alternating_sum: bool) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut a = 1.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut plain = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        a *= (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x);
        if a.abs() >= prev || a == 0.0 {
            break;
        }
        prev = a.abs();
        plain += a;
        // P = Σ (-1)^j a_{2j} x^{-2j}, Q = Σ (-1)^j a_{2j+1} x^{-2j-1}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    if alternating_sum {
        (plain, 0.0)
    } else {
        (p, q)
    }
}

/// `J_ν(x) / x^ν` for ν ≥ 0 and x ≥ 0, finite at x = 0 where it equals
/// `1 / (2^ν Γ(ν + 1))`.
pub fn bessel_j_over_pow(nu: f64, x: f64) -> f64 {
    assert!(nu >= 0.0, "order must be non-negative");
    let x = x.abs();
    if x < J_SWITCH {
        let q = -x * x / 4.0;
        let mut term = 1.0 / gamma(nu + 1.0);
        let mut sum = term;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * (k + nu));
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > x {
                break;
            }
            if k > 400.0 {
                break;
            }
        }
        sum * 2f64.powf(-nu)
    } else {
        bessel_j(nu, x) / x.powf(nu)
    }
}

/// Bessel function of the first kind J_ν(x) for ν ≥ 0, x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    assert!(nu >= 0.0 && x >= 0.0);
    if x < J_SWITCH {
        if x == 0.0 {
            return if nu == 0.0 { 1.0 } else { 0.0 };
        }
        bessel_j_over_pow(nu, x) * x.powf(nu)
    } else {
        let (p, q) = hankel_series(nu, x, false);
        let chi = x - nu * FRAC_PI_2 - FRAC_PI_4;
        (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// Sine integral Si(x) = ∫_0^x sin(t)/t dt.
pub fn sine_integral(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= 2.0 {
        // Σ (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
        let x2 = ax * ax;
        let mut fact_term = ax;
        let mut sum = ax;
        let mut k = 0.0;
        loop {
            k += 1.0;
            fact_term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
            let term = fact_term / (2.0 * k + 1.0);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        // E1(i x) by a continued fraction: Si = π/2 + Im[e^{-ix} h]
        let tiny = 1e-300;
        let (mut br, bi) = (1.0, ax);
        let (mut cr, mut ci) = (1.0 / tiny, 0.0);
        let (mut dr, mut di) = complex_recip(br, bi);
        let (mut hr, mut hi) = (dr, di);
        for i in 2..1000 {
            let a = -((i - 1) as f64).powi(2);
            br += 2.0;
            // d = 1 / (a d + b)
            let (tr, ti) = (a * dr + br, a * di + bi);
            let r = complex_recip(tr, ti);
            dr = r.0;
            di = r.1;
            // c = b + a / c
            let (ir, ii) = complex_recip(cr, ci);
            cr = br + a * ir;
            ci = bi + a * ii;
            let (delr, deli) = (cr * dr - ci * di, cr * di + ci * dr);
            let (nr, ni) = (hr * delr - hi * deli, hr * deli + hi * delr);
            hr = nr;
            hi = ni;
            if (delr - 1.0).abs() + deli.abs() < 1e-16 {
                break;
            }
        }
        let (c, s) = (ax.cos(), ax.sin());
        let im = hr * (-s) + hi * c;
        FRAC_PI_2 + im
    };
    value.copysign(x)
}

fn complex_recip(re: f64, im: f64) -> (f64, f64) {
    let d = re * re + im * im;
    (re / d, -im / d)
}

/// `sin(x)/x` with the removable singularity at zero handled by a short
/// series below |x| < 1e-4.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}
