//! Complex special functions used by the Mellin-domain engines.
//!
//! Everything here works on [`Complex64`] and returns [`Result`] so that a
//! pole hit or a stalled series surfaces as an error instead of a NaN deep
//! inside a contour sum.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex number carried through the analytic engines.
pub type ComplexValue = Complex64;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Relative stopping threshold for the hypergeometric series.
const SERIES_TOL: f64 = 1e-16;
/// Number of consecutive small terms required before a series is accepted.
const SERIES_QUIET_TERMS: usize = 3;
/// Hard cap on series length.
pub const SERIES_MAX_TERMS: usize = 10_000;

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn ensure_finite(what: &'static str, z: Complex64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Domain(format!("{what} produced a non-finite value")))
    }
}

fn lanczos_right(z: Complex64) -> Complex64 {
    // Valid for Re(z) >= 0.5.
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `ln sin(pi z)` evaluated without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    // sin(pi z) = (e^{i pi z} - e^{-i pi z}) / 2i; keep the dominant exponential symbolic.
    if z.im > 0.0 {
        let small = (2.0 * i * PI * z).exp();
        -i * PI * z + (1.0 - small).ln() - (2.0 * i).ln() + Complex64::new(0.0, PI)
    } else {
        let small = (-2.0 * i * PI * z).exp();
        i * PI * z + (1.0 - small).ln() - (2.0 * i).ln()
    }
}

/// Logarithm of the Gamma function.
///
/// For `Re z >= 0.5` this is a Lanczos approximation (g = 7, nine terms),
/// which is the analytic continuation of `ln Γ` from the positive real axis
/// with its cut on the negative real axis. Left of that line the upward
/// recurrence keeps the same branch; far to the left (`Re z < -30`) the
/// reflection formula is used and only `exp(log_gamma(z))` is guaranteed.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("log_gamma of a non-finite argument".into()));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::PoleHit {
            what: "gamma",
            at: z.into(),
        });
    }
    if z.re >= 0.5 {
        return Ok(lanczos_right(z));
    }
    if z.re >= -30.0 {
        let shift = (0.5 - z.re).ceil() as usize;
        let mut acc = lanczos_right(z + shift as f64);
        for k in 0..shift {
            acc -= (z + k as f64).ln();
        }
        return Ok(acc);
    }
    Ok(PI.ln() - ln_sin_pi(z) - lanczos_right(1.0 - z))
}

/// The Gamma function, `exp(log_gamma(z))`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    ensure_finite("gamma", log_gamma(z)?.exp())
}

/// Real-argument convenience wrapper around [`log_gamma`]; the argument must be positive.
pub fn ln_gamma_real(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    lanczos_right(Complex64::new(x, 0.0)).re
}

/// Real Gamma function for positive arguments.
pub fn gamma_real(x: f64) -> f64 {
    ln_gamma_real(x).exp()
}

/// Sums a hypergeometric-type series given the ratio of consecutive terms.
fn sum_series(what: &'static str, mut ratio: impl FnMut(usize) -> Complex64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut quiet = 0;
    let mut previous = sum;
    for j in 0..SERIES_MAX_TERMS {
        term *= ratio(j);
        sum += term;
        if term.norm() < SERIES_TOL * sum.norm() || term == Complex64::new(0.0, 0.0) {
            quiet += 1;
            if quiet >= SERIES_QUIET_TERMS {
                return ensure_finite(what, sum);
            }
        } else {
            quiet = 0;
        }
        if !(sum.re.is_finite() && sum.im.is_finite()) {
            return Err(Error::NonConvergence {
                what,
                last: sum.norm(),
                previous: previous.norm(),
            });
        }
        previous = sum;
    }
    Err(Error::NonConvergence {
        what,
        last: sum.norm(),
        previous: previous.norm(),
    })
}

/// Confluent hypergeometric function `1F1(a; b; k)` for real `k >= 0`.
pub fn hyp1f1(a: Complex64, b: Complex64, k: f64) -> Result<Complex64> {
    if is_nonpositive_integer(b) {
        return Err(Error::PoleHit {
            what: "hyp1f1 lower parameter",
            at: b.into(),
        });
    }
    if !k.is_finite() {
        return Err(Error::Domain(format!("hyp1f1 argument {k} is not finite")));
    }
    if k == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    sum_series("hyp1f1 series", |j| {
        let j = j as f64;
        (a + j) * k / ((b + j) * (j + 1.0))
    })
}

/// Gauss hypergeometric function `2F1(a, b; c; x)` for `0 <= x < 1`.
pub fn hyp2f1(a: Complex64, b: Complex64, c: Complex64, x: f64) -> Result<Complex64> {
    if is_nonpositive_integer(c) {
        return Err(Error::PoleHit {
            what: "hyp2f1 lower parameter",
            at: c.into(),
        });
    }
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("hyp2f1 argument {x} outside [0, 1)")));
    }
    if x == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    sum_series("hyp2f1 series", |j| {
        let j = j as f64;
        (a + j) * (b + j) * x / ((c + j) * (j + 1.0))
    })
}

/// Derivatives `f^(k)(center)` for `k = 0..=max_order` from Cauchy's integral formula.
///
/// The circle integral is a trapezoidal sum whose node count doubles until the
/// normalised Taylor coefficients `f^(k) r^k / k!` of two successive passes
/// agree to `1e-10` relative to their largest magnitude. The caller must pick
/// `radius` so that the closed disc holds no singularity of `f`.
pub fn cauchy_derivatives<F>(f: F, center: Complex64, max_order: usize, radius: f64) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("cauchy radius {radius} must be positive")));
    }
    const MAX_NODES: usize = 1 << 14;
    let mut nodes = 16usize;
    while nodes < 4 * (max_order + 1) {
        nodes *= 2;
    }
    let sample = |n: usize, j: usize| -> Result<Complex64> {
        let theta = 2.0 * PI * j as f64 / n as f64;
        f(center + Complex64::from_polar(radius, theta))
    };
    let mut values: Vec<Complex64> = (0..nodes).map(|j| sample(nodes, j)).collect::<Result<_>>()?;
    let coeffs = |values: &[Complex64]| -> Vec<Complex64> {
        let n = values.len();
        (0..=max_order)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, v) in values.iter().enumerate() {
                    let theta = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    acc += v * Complex64::from_polar(1.0, theta);
                }
                acc / n as f64
            })
            .collect()
    };
    let mut current = coeffs(&values);
    loop {
        let refined_n = 2 * nodes;
        let mut refined = Vec::with_capacity(refined_n);
        for (j, v) in values.iter().enumerate() {
            refined.push(*v);
            refined.push(sample(refined_n, 2 * j + 1)?);
        }
        let next = coeffs(&refined);
        let scale = next.iter().map(|c| c.norm()).fold(0.0, f64::max);
        // coefficients that vanish at the centre can only be resolved to round-off of the samples
        let floor = 64.0 * f64::EPSILON * refined.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff = next
            .iter()
            .zip(&current)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if diff <= (1e-10 * scale).max(floor) || scale == 0.0 {
            let mut factorial = 1.0;
            let mut rpow = 1.0;
            return next
                .into_iter()
                .enumerate()
                .map(|(k, a)| {
                    if k > 0 {
                        factorial *= k as f64;
                        rpow *= radius;
                    }
                    ensure_finite("cauchy derivative", a * factorial / rpow)
                })
                .collect();
        }
        if refined_n >= MAX_NODES {
            return Err(Error::NonConvergence {
                what: "cauchy derivatives",
                last: diff,
                previous: scale,
            });
        }
        values = refined;
        nodes = refined_n;
        current = next;
    }
}

/// `e^{-x} I_0(x)` for `x >= 0`: power series below 12, asymptotic expansion above.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x < 12.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            let odd = (2 * k - 1) as f64;
            let next = term * odd * odd / (k as f64 * 8.0 * x);
            if next.abs() > term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term.abs() < 1e-17 * sum {
                break;
            }
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// Ratio `Γ(lambda - s) / Γ(1 - s)` for a nonnegative integer `lambda`.
///
/// For `lambda = 0` this is `-1/s`; for `lambda >= 1` it is the polynomial
/// `(1 - s)(2 - s)...(lambda - 1 - s)`, which has no poles at all.
pub fn gamma_ratio_shift(lambda: usize, s: Complex64) -> Result<Complex64> {
    if lambda == 0 {
        if s == Complex64::new(0.0, 0.0) {
            return Err(Error::PoleHit {
                what: "gamma(-s)/gamma(1-s)",
                at: s.into(),
            });
        }
        return Ok(-1.0 / s);
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 1..lambda {
        acc *= k as f64 - s;
    }
    Ok(acc)
}
