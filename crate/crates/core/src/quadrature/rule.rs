//! The 7/15-point Gauss–Kronrod pair.

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub(crate) const EVALUATIONS_PER_PANEL: usize = 15;

/// Result of one panel.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PanelEstimate {
    pub value: Complex64,
    pub error: f64,
    /// Roundoff level below which the error estimate cannot fall.
    pub floor: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

/// Applies the pair on `[a, b]`. Endpoints are never evaluated.
pub(crate) fn gk15<F: Fn(f64) -> Complex64 + ?Sized>(f: &F, a: f64, b: f64) -> PanelEstimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let f_center = f(center);
    let mut res_kronrod = f_center * WGK[7];
    let mut res_gauss = f_center * WG[3];
    let mut res_abs = f_center.norm() * WGK[7];
    let mut left = [Complex64::new(0.0, 0.0); 7];
    let mut right = [Complex64::new(0.0, 0.0); 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        left[j] = f1;
        right[j] = f2;
        res_kronrod += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            res_gauss += (f1 + f2) * WG[j / 2];
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = (f_center - mean).norm() * WGK[7];
    for j in 0..7 {
        res_asc += ((left[j] - mean).norm() + (right[j] - mean).norm()) * WGK[j];
    }

    let value = res_kronrod * half;
    let raw = ((res_kronrod - res_gauss) * half).norm();
    let floor = 50.0 * f64::EPSILON * res_abs * abs_half;
    PanelEstimate {
        value,
        error: rescale_error(raw, res_abs * abs_half, res_asc * abs_half),
        floor: floor * 1.0001,
    }
}
