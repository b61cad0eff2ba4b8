//! Channel-power distributions for the four supported fading families.
//!
//! Each model describes the law of `X = |h|^2`. Throughout, `theta` is the
//! scale symbol of the usual tabulated densities: it equals the mean power for
//! Rician and Hoyt fading, while the Nakagami mean is `m * theta` and the
//! Weibull mean is `theta * Γ(1 + 1/m)`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::special::{bessel_i0_scaled, gamma, gamma_real, hyp1f1, hyp2f1, ln_gamma_real};

/// Smallest admissible Hoyt parameter; below it the `2F1` argument approaches 1.
pub const HOYT_Q_MIN: f64 = 0.05;

/// Channel-power distribution of one hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingModel {
    Nakagami { m: f64, theta: f64 },
    Weibull { m: f64, theta: f64 },
    Rician { k: f64, theta: f64 },
    Hoyt { q: f64, theta: f64 },
}

/// Arithmetic ladder of pole locations `offset + step * j`, `j = 0, 1, ...`,
/// measured relative to the cumulative index shift of the hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleLadder {
    pub offset: f64,
    pub step: f64,
}

impl PoleLadder {
    pub fn iter(&self, shift: f64, up_to: f64) -> impl Iterator<Item = f64> + '_ {
        let start = self.offset + shift;
        let step = self.step;
        (0..)
            .map(move |j| start + step * j as f64)
            .take_while(move |&p| p <= up_to)
    }
}

/// Decomposition `M[f_X; 1 + u] = prefactor * scale^u * reduced(u)` of a
/// Mellin transform. The `scale^u` part is what the asymptotic engine folds
/// into the SNR variable; `reduced` carries every Gamma/hypergeometric factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinParts {
    pub prefactor: f64,
    pub scale: f64,
}

impl FadingModel {
    pub fn nakagami(m: f64, theta: f64) -> Result<Self> {
        FadingModel::Nakagami { m, theta }.validated()
    }

    pub fn weibull(m: f64, theta: f64) -> Result<Self> {
        FadingModel::Weibull { m, theta }.validated()
    }

    pub fn rician(k: f64, theta: f64) -> Result<Self> {
        FadingModel::Rician { k, theta }.validated()
    }

    pub fn hoyt(q: f64, theta: f64) -> Result<Self> {
        FadingModel::Hoyt { q, theta }.validated()
    }

    /// Family name as used in configuration files.
    pub fn family(&self) -> &'static str {
        match self {
            FadingModel::Nakagami { .. } => "nakagami",
            FadingModel::Weibull { .. } => "weibull",
            FadingModel::Rician { .. } => "rician",
            FadingModel::Hoyt { .. } => "hoyt",
        }
    }

    pub fn theta(&self) -> f64 {
        match *self {
            FadingModel::Nakagami { theta, .. }
            | FadingModel::Weibull { theta, .. }
            | FadingModel::Rician { theta, .. }
            | FadingModel::Hoyt { theta, .. } => theta,
        }
    }

    /// Checks every parameter against its admissible range.
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(field, v, "must be finite and > 0"))
            }
        };
        match *self {
            FadingModel::Nakagami { m, theta } | FadingModel::Weibull { m, theta } => {
                positive("m", m)?;
                positive("theta", theta)
            }
            FadingModel::Rician { k, theta } => {
                if !(k.is_finite() && k >= 0.0) {
                    return Err(invalid("k", k, "must be finite and >= 0"));
                }
                positive("theta", theta)
            }
            FadingModel::Hoyt { q, theta } => {
                if !(q.is_finite() && (HOYT_Q_MIN..=1.0).contains(&q)) {
                    return Err(invalid("q", q, "must lie in [0.05, 1]"));
                }
                positive("theta", theta)
            }
        }
    }

    fn validated(self) -> Result<Self> {
        self.validate().map(|_| self)
    }

    /// The same family with `theta` multiplied by `factor`, i.e. the law of `factor * X`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            FadingModel::Nakagami { m, theta } => FadingModel::Nakagami {
                m,
                theta: theta * factor,
            },
            FadingModel::Weibull { m, theta } => FadingModel::Weibull {
                m,
                theta: theta * factor,
            },
            FadingModel::Rician { k, theta } => FadingModel::Rician {
                k,
                theta: theta * factor,
            },
            FadingModel::Hoyt { q, theta } => FadingModel::Hoyt {
                q,
                theta: theta * factor,
            },
        }
    }

    /// `E[X]`.
    pub fn mean_power(&self) -> f64 {
        match *self {
            FadingModel::Nakagami { m, theta } => m * theta,
            FadingModel::Weibull { m, theta } => theta * gamma_real(1.0 + 1.0 / m),
            FadingModel::Rician { theta, .. } | FadingModel::Hoyt { theta, .. } => theta,
        }
    }

    /// Density of the channel power at `x` (zero for negative `x`).
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            FadingModel::Nakagami { m, theta } => {
                if x == 0.0 {
                    return if m < 1.0 {
                        f64::INFINITY
                    } else if m == 1.0 {
                        1.0 / theta
                    } else {
                        0.0
                    };
                }
                ((m - 1.0) * x.ln() - x / theta - m * theta.ln() - ln_gamma_real(m)).exp()
            }
            FadingModel::Weibull { m, theta } => {
                if x == 0.0 {
                    return if m < 1.0 {
                        f64::INFINITY
                    } else if m == 1.0 {
                        1.0 / theta
                    } else {
                        0.0
                    };
                }
                let r = x / theta;
                m / theta * r.powf(m - 1.0) * (-r.powf(m)).exp()
            }
            FadingModel::Rician { k, theta } => {
                let y = (4.0 * k * (k + 1.0) * x / theta).sqrt();
                (k + 1.0) / theta * (-(k + (k + 1.0) * x / theta) + y).exp() * bessel_i0_scaled(y)
            }
            FadingModel::Hoyt { q, theta } => {
                let q2 = q * q;
                let a = (1.0 + q2) * (1.0 + q2) / (4.0 * q2 * theta);
                let b = (1.0 - q2 * q2) / (4.0 * q2 * theta);
                (1.0 + q2) / (2.0 * q * theta) * ((b - a) * x).exp() * bessel_i0_scaled(b * x)
            }
        }
    }

    /// Prefactor and scale of the Mellin decomposition (see [`MellinParts`]).
    pub fn mellin_parts(&self) -> MellinParts {
        match *self {
            FadingModel::Nakagami { m, theta } => MellinParts {
                prefactor: 1.0 / gamma_real(m),
                scale: theta,
            },
            FadingModel::Weibull { theta, .. } => MellinParts {
                prefactor: 1.0,
                scale: theta,
            },
            FadingModel::Rician { k, theta } => MellinParts {
                prefactor: (-k).exp(),
                scale: theta / (k + 1.0),
            },
            FadingModel::Hoyt { q, theta } => {
                let r = 2.0 * q / (1.0 + q * q);
                MellinParts {
                    prefactor: r,
                    scale: theta * r * r,
                }
            }
        }
    }

    /// Argument of the Hoyt `2F1` factor, `((1 - q^2) / (1 + q^2))^2`.
    fn hoyt_argument(q: f64) -> f64 {
        let r = (1.0 - q * q) / (1.0 + q * q);
        r * r
    }

    /// The Gamma/hypergeometric part `reduced(u)` of `M[f_X; 1 + u]`.
    pub fn mellin_reduced(&self, u: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            FadingModel::Nakagami { m, .. } => gamma(u + m),
            FadingModel::Weibull { m, .. } => gamma(u / m + 1.0),
            FadingModel::Rician { k, .. } => Ok(gamma(u + 1.0)? * hyp1f1(u + 1.0, one, k)?),
            FadingModel::Hoyt { q, .. } => {
                Ok(gamma(u + 1.0)? * hyp2f1((u + 1.0) / 2.0, (u + 2.0) / 2.0, one, Self::hoyt_argument(q))?)
            }
        }
    }

    /// Mellin transform `M[f_X; s] = E[X^{s-1}]`, taking the raw Mellin argument `s`.
    pub fn mellin(&self, s: Complex64) -> Result<Complex64> {
        let u = s - 1.0;
        let parts = self.mellin_parts();
        let reduced = self.mellin_reduced(u).map_err(|e| match e {
            Error::PoleHit { .. } => Error::PoleHit {
                what: "mellin transform",
                at: s.into(),
            },
            other => other,
        })?;
        Ok(parts.prefactor * (u * parts.scale.ln()).exp() * reduced)
    }

    /// Exponent of the density near the origin (`f(x) ~ x^{shape - 1}`) and the
    /// pole ladder of `reduced(lambda - s)` as a function of `s`.
    pub fn shape_and_pole_offsets(&self) -> (f64, PoleLadder) {
        match *self {
            FadingModel::Nakagami { m, .. } => (m, PoleLadder { offset: m, step: 1.0 }),
            FadingModel::Weibull { m, .. } => (m, PoleLadder { offset: m, step: m }),
            FadingModel::Rician { .. } | FadingModel::Hoyt { .. } => (1.0, PoleLadder { offset: 1.0, step: 1.0 }),
        }
    }

    pub fn min_shape(&self) -> f64 {
        self.shape_and_pole_offsets().0
    }

    /// Draws one channel power.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        PowerSampler::new(self).sample(rng)
    }
}

/// Prepared sampler for repeated draws from one model.
#[derive(Debug, Clone, Copy)]
pub enum PowerSampler {
    Gamma(Gamma<f64>),
    Weibull { inv_m: f64, theta: f64 },
    Rician { los: f64, sigma: f64 },
    Hoyt { sigma_x: f64, sigma_y: f64 },
}

impl PowerSampler {
    pub fn new(model: &FadingModel) -> Self {
        match *model {
            FadingModel::Nakagami { m, theta } => {
                PowerSampler::Gamma(Gamma::new(m, theta).expect("validated gamma parameters"))
            }
            FadingModel::Weibull { m, theta } => PowerSampler::Weibull { inv_m: 1.0 / m, theta },
            FadingModel::Rician { k, theta } => PowerSampler::Rician {
                los: (k * theta / (k + 1.0)).sqrt(),
                // per-dimension standard deviation of the scattered part
                sigma: (theta / (2.0 * (k + 1.0))).sqrt(),
            },
            FadingModel::Hoyt { q, theta } => PowerSampler::Hoyt {
                sigma_x: (theta / (1.0 + q * q)).sqrt(),
                sigma_y: (q * q * theta / (1.0 + q * q)).sqrt(),
            },
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            PowerSampler::Gamma(g) => g.sample(rng),
            PowerSampler::Weibull { inv_m, theta } => {
                // 1 - U lies in (0, 1], so the logarithm is finite.
                let u: f64 = rng.random();
                theta * (-(1.0 - u).ln()).powf(inv_m)
            }
            PowerSampler::Rician { los, sigma } => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let a = los + sigma * re;
                let b = sigma * im;
                a * a + b * b
            }
            PowerSampler::Hoyt { sigma_x, sigma_y } => {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                let a = sigma_x * x;
                let b = sigma_y * y;
                a * a + b * b
            }
        }
    }
}

#[cfg(test)]
#[path = "oracle.rs"]
mod oracle;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mellin_by_quadrature(model: &FadingModel, s: Complex64) -> Complex64 {
        oracle::mellin_transform(|x| model.pdf(x), s, model.min_shape(), 200.0 * model.mean_power())
    }

    fn ccdf_mellin_by_quadrature(model: &FadingModel, s: f64) -> f64 {
        oracle::ccdf_mellin_transform(|x| model.pdf(x), s, 200.0 * model.mean_power())
    }

    fn all_models() -> Vec<FadingModel> {
        vec![
            FadingModel::nakagami(2.0, 1.0).unwrap(),
            FadingModel::nakagami(0.7, 1.8).unwrap(),
            FadingModel::weibull(1.5, 1.0).unwrap(),
            FadingModel::weibull(2.5, 0.6).unwrap(),
            FadingModel::rician(2.0, 1.0).unwrap(),
            FadingModel::rician(5.0, 1.3).unwrap(),
            FadingModel::hoyt(0.75, 1.0).unwrap(),
            FadingModel::hoyt(0.25, 2.0).unwrap(),
        ]
    }

    #[test]
    fn pdf_examples() {
        assert_eq!(FadingModel::nakagami(1.0, 1.0).unwrap().pdf(0.0), 1.0);
        let w = FadingModel::weibull(2.0, 1.0).unwrap().pdf(1.0);
        assert!((w - 2.0 * (-1f64).exp()).abs() < 1e-15);
        let h = FadingModel::hoyt(1.0, 1.0).unwrap().pdf(1.0);
        assert!((h - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(FadingModel::rician(1.0, 1.0).unwrap().pdf(-0.5), 0.0);
    }

    #[test]
    fn pdf_normalised() {
        for model in all_models() {
            let upper = 50.0 * model.mean_power();
            let total = oracle::integrate(|x| model.pdf(x), 0.0, upper, 1e-12);
            assert!((total - 1.0).abs() < 1e-8, "{model:?}: {total}");
            for i in 0..200 {
                assert!(model.pdf(i as f64 * upper / 200.0) >= 0.0);
            }
        }
    }

    #[test]
    fn mellin_examples() {
        let nak = FadingModel::nakagami(2.0, 1.0).unwrap();
        assert!((nak.mellin(c(2.0, 0.0)).unwrap().re - 2.0).abs() < 1e-13);
        let wei = FadingModel::weibull(2.0, 1.0).unwrap();
        let v = wei.mellin(c(2.0, 0.0)).unwrap();
        assert!((v.re - 0.886_226_925_452_758).abs() < 1e-13);
        // adaptive-quadrature value of the Rician transform at 1.7 + 0.3i
        let ric = FadingModel::rician(2.0, 1.0).unwrap();
        let s = c(1.7, 0.3);
        let v = ric.mellin(s).unwrap();
        let reference = c(0.920_520_700_816_340_0, 0.037_061_119_937_651_17);
        assert!((v - reference).norm() / reference.norm() < 1e-10);
        let quad = mellin_by_quadrature(&ric, s);
        assert!((v - quad).norm() / quad.norm() < 1e-8);
    }

    #[test]
    fn mellin_matches_quadrature_for_every_family() {
        for model in all_models() {
            for s in [c(1.5, 0.0), c(2.2, 1.1), c(0.9, -0.7)] {
                if let FadingModel::Nakagami { m, .. } | FadingModel::Weibull { m, .. } = model {
                    if m < 1.0 && s.re < 1.0 {
                        continue;
                    }
                }
                let v = model.mellin(s).unwrap();
                let q = mellin_by_quadrature(&model, s);
                assert!((v - q).norm() / q.norm() < 1e-8, "{model:?} at {s}: {v} vs {q}");
            }
        }
    }

    #[test]
    fn mellin_normalisation_and_mean() {
        for model in all_models() {
            let one = model.mellin(c(1.0, 0.0)).unwrap();
            assert!((one - 1.0).norm() < 1e-12, "{model:?}: {one}");
            let two = model.mellin(c(2.0, 0.0)).unwrap();
            assert!((two.re - model.mean_power()).abs() / model.mean_power() < 1e-10);
        }
    }

    #[test]
    fn exponential_reduction_chain() {
        let theta = 1.7;
        let models = [
            FadingModel::rician(0.0, theta).unwrap(),
            FadingModel::hoyt(1.0, theta).unwrap(),
            FadingModel::nakagami(1.0, theta).unwrap(),
            FadingModel::weibull(1.0, theta).unwrap(),
        ];
        for s in [c(0.5, 0.0), c(1.3, 2.0), c(3.0, -1.5), c(2.2, 7.0)] {
            let base = models[0].mellin(s).unwrap();
            for m in &models[1..] {
                let v = m.mellin(s).unwrap();
                assert!((v - base).norm() / base.norm() < 1e-10, "{m:?} at {s}");
            }
        }
    }

    #[test]
    fn ccdf_mellin_identity() {
        for model in all_models() {
            for s in [0.5, 1.0, 1.7, 2.5] {
                let lhs = ccdf_mellin_by_quadrature(&model, s);
                let rhs = model.mellin(c(s + 1.0, 0.0)).unwrap().re / s;
                assert!((lhs - rhs).abs() / rhs < 1e-6, "{model:?} s={s}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn mellin_pole_hit() {
        let nak = FadingModel::nakagami(2.0, 1.0).unwrap();
        // M[f; s] has poles where s - 1 + m is a nonpositive integer
        assert!(matches!(nak.mellin(c(-1.0, 0.0)), Err(Error::PoleHit { .. })));
    }

    #[test]
    fn mean_power_examples() {
        assert_eq!(FadingModel::nakagami(3.0, 2.0).unwrap().mean_power(), 6.0);
        assert!((FadingModel::weibull(1.0, 5.0).unwrap().mean_power() - 5.0).abs() < 1e-13);
        assert_eq!(FadingModel::hoyt(0.5, 1.3).unwrap().mean_power(), 1.3);
    }

    #[test]
    fn pole_ladders() {
        let (m, ladder) = FadingModel::rician(3.0, 1.0).unwrap().shape_and_pole_offsets();
        assert_eq!(m, 1.0);
        assert_eq!(ladder.iter(0.0, 3.5).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
        let (m, ladder) = FadingModel::nakagami(2.5, 1.0).unwrap().shape_and_pole_offsets();
        assert_eq!(m, 2.5);
        assert_eq!(ladder.iter(0.0, 4.6).collect::<Vec<_>>(), vec![2.5, 3.5, 4.5]);
        let (m, ladder) = FadingModel::weibull(1.5, 1.0).unwrap().shape_and_pole_offsets();
        assert_eq!(m, 1.5);
        assert_eq!(ladder.iter(0.0, 4.5).collect::<Vec<_>>(), vec![1.5, 3.0, 4.5]);
        // the Weibull reduced transform Γ(1 + (0 - s)/1.5) really is singular there
        let w = FadingModel::weibull(1.5, 1.0).unwrap();
        for p in [1.5, 3.0, 4.5] {
            assert!(w.mellin_reduced(c(-p, 0.0)).is_err());
        }
    }

    #[test]
    fn parameter_ranges() {
        assert!(FadingModel::hoyt(0.0, 1.0).is_err());
        assert!(FadingModel::hoyt(0.04, 1.0).is_err());
        assert!(FadingModel::hoyt(1.2, 1.0).is_err());
        assert!(FadingModel::rician(-0.1, 1.0).is_err());
        assert!(FadingModel::nakagami(0.0, 1.0).is_err());
        assert!(FadingModel::weibull(1.0, -2.0).is_err());
        match FadingModel::hoyt(0.0, 1.0) {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "q"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empirical_means() {
        let n = 1_000_000;
        for (i, model) in all_models().into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(17 + i as u64);
            let sampler = PowerSampler::new(&model);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let x = sampler.sample(&mut rng);
                s1 += x;
                s2 += x * x;
            }
            let mean = s1 / n as f64;
            let var = s2 / n as f64 - mean * mean;
            let se = (var / n as f64).sqrt();
            assert!(
                (mean - model.mean_power()).abs() < 5.0 * se,
                "{model:?}: {mean} vs {}",
                model.mean_power()
            );
        }
    }

    #[test]
    fn nakagami_half_moment() {
        let model = FadingModel::nakagami(2.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let v = model.sample(&mut rng).sqrt();
            s1 += v;
            s2 += v * v;
        }
        let mean = s1 / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 1.329_340_388_179_137).abs() < 5.0 * se);
    }

    #[test]
    fn rician_without_los_is_exponential() {
        // one-sample Kolmogorov-Smirnov against Exp(theta) at level 0.01
        let theta = 1.4;
        let model = FadingModel::rician(0.0, theta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 20_000;
        let mut xs: Vec<f64> = (0..n).map(|_| model.sample(&mut rng)).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = 1.0 - (-x / theta).exp();
                (f - i as f64 / n as f64)
                    .abs()
                    .max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.628 / (n as f64).sqrt(), "D = {d}");
    }
}
