//! Test-only reference integrator (adaptive Gauss-Kronrod 7/15).
//!
//! Shared between unit tests and the integration suites through `#[path]`
//! includes. It depends only on `num_complex` and deliberately knows nothing
//! about the engines it is used to check.
#![allow(dead_code)]

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let pair = f(c - x) + f(c + x);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let (v, err) = gk15(f, a, b);
    // the relative floor stops refinement once the error is at round-off level
    if err <= tol || err <= 1e-15 * v.abs() || depth == 0 {
        return v;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// `∫_a^b f` to roughly absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    // split into panels first so narrow features are not missed
    let panels = 32;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| adapt(&f, a + i as f64 * h, a + (i + 1) as f64 * h, tol / panels as f64, 40))
        .sum()
}

pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    let re = integrate(|x| f(x).re, a, b, tol);
    let im = integrate(|x| f(x).im, a, b, tol);
    Complex64::new(re, im)
}

/// `∫_0^∞ x^{s-1} pdf(x) dx` via `x = e^t`; `origin_exponent` is `a` in
/// `pdf(x) ~ x^{a-1}` near zero and `x_max` bounds the numerically relevant support.
pub fn mellin_transform<F: Fn(f64) -> f64>(pdf: F, s: Complex64, origin_exponent: f64, x_max: f64) -> Complex64 {
    let decay = s.re + origin_exponent - 1.0;
    assert!(decay > 0.0, "Mellin integral diverges at the origin");
    let t_lo = -45.0 / decay.min(1.0);
    let t_hi = x_max.ln();
    integrate_complex(
        |t| {
            let x = t.exp();
            (s * t).exp() * pdf(x)
        },
        t_lo,
        t_hi,
        1e-13,
    )
}

/// `∫_0^∞ x^{s-1} F̄(x) dx` for real `s > 0`, with the complementary CDF
/// `F̄(x) = ∫_x^∞ pdf` computed by an inner quadrature.
pub fn ccdf_mellin_transform<F: Fn(f64) -> f64>(pdf: F, s: f64, x_max: f64) -> f64 {
    let ccdf = |x: f64| {
        if x >= x_max {
            0.0
        } else {
            integrate(&pdf, x, x_max, 1e-14)
        }
    };
    let t_lo = -45.0 / s.min(1.0);
    let t_hi = x_max.ln();
    integrate(|t| (s * t).exp() * ccdf(t.exp()), t_lo, t_hi, 1e-12)
}
