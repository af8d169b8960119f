//! Frozen reference values, each computed independently of the library.

use std::f64::consts::PI;

use omega_ft::analysis::{convolution_exchange_check, example_closed_form, example_integral, exchange_check};
use omega_ft::catalog::lookup_default;
use omega_ft::omega::omega;
use omega_ft::special::erf;
use omega_ft::transform::{ft_extrapolated, DEFAULT_H0, DEFAULT_LEVELS};
use omega_ft::verify::EXAMPLE_ORACLES;

#[test]
fn omega_of_gauss_at_one() {
    let o = omega(&lookup_default("gauss").unwrap(), 1.0, 1e-12).unwrap();
    assert!((o.value.re - 1.158450919616096273).abs() < 1e-10, "{o:?}");
    assert!(o.value.im.abs() < 1e-12);
}

#[test]
fn transform_of_sinc_abs_at_two() {
    let e = ft_extrapolated(&lookup_default("sinc_abs").unwrap(), 2.0, DEFAULT_H0, DEFAULT_LEVELS, 1e-10).unwrap();
    assert!(e.value.re.abs() < 1e-8, "{e:?}");
    assert!((e.value.im + 3f64.ln()).abs() < 1e-6, "{e:?}");
}

#[test]
fn example_integral_oracles() {
    for (nu, x, y, value) in EXAMPLE_ORACLES {
        assert!((example_closed_form(nu, x, y) - value).abs() < 1e-12 * value);
        let r = example_integral(nu, x, y, 1e-10).unwrap();
        assert!(r.relative_error() < 1e-8, "{r:?}");
    }
}

#[test]
fn exchange_of_indicator_and_gauss() {
    let r = exchange_check(&lookup_default("indicator").unwrap(), &lookup_default("gauss").unwrap(), None, 1e-10).unwrap();
    let expected = PI * erf(0.5f64.sqrt());
    assert!((r.lhs.re - expected).abs() < 1e-8 && (r.rhs.re - expected).abs() < 1e-8, "{r:?}");
    assert!((expected - 2.1447322931808159).abs() < 1e-14);
}

#[test]
fn convolution_exchange_of_indicator_gauss_gauss() {
    let ind = lookup_default("indicator").unwrap();
    let gauss = lookup_default("gauss").unwrap();
    let r = convolution_exchange_check(&ind, &gauss, &gauss, 1e-8).unwrap();
    let expected = PI * (2.0 * PI).sqrt() * erf(0.5);
    assert!((expected - 4.09883502617583).abs() < 1e-12);
    assert!((r.lhs - expected).norm() < 1e-6 && (r.rhs - expected).norm() < 1e-6, "{r:?}");
}
