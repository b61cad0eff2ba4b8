//! High-SNR behaviour: dominant pole, index-set partition, expansion
//! coefficients, coding gain and finite-SNR diversity.
//!
//! Under the high-SNR gains every hop factor splits as
//! `M[f_{X_n}; 1 + u] = d_n * c_n^u * g_n(u)` (see [`crate::fading::MellinParts`]),
//! so the integrand of tuple `l` becomes
//!
//! ```text
//! I_l(s) = B_l * (A / gamma_bar)^s * Gamma(lambda_{N-1} - s) / Gamma(1 - s) * prod_n g_n(lambda_{n-1} - s),
//! A   = rho_N * gamma_th / prod_n c_n,
//! B_l = weight_l * prod_n d_n * c_n^{lambda_{n-1}}.
//! ```
//!
//! Only the pole at `s = m`, the smallest shape, contributes at order
//! `gamma_bar^{-m}`. A tuple in class `L_r` has a pole of order at most `r`
//! there, and with `C_r(s) = (s - m)^r * I_l(s) * (gamma_bar / A)^s / B_l` its residue
//! expands into powers of `ln gamma_bar`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fading::FadingModel;
use crate::integral::{enumerate_index_tuples, ExpansionConfig, IndexTuple, POLE_MERGE_TOL};
use crate::link::{effective_models, GainRegime, LinkSpec};
use crate::montecarlo::{Method, OutageEstimate};
use crate::special::{cauchy_derivatives, gamma_ratio_shift};

/// Shapes this close are treated as one (multiplicity detection).
pub const SHAPE_TIE_TOL: f64 = 1e-9;

/// Distinct shapes closer than this make the expansion converge slowly.
pub const NEAR_TIE_GAP: f64 = 0.05;

/// The dominant pole `s = m` and the hops that produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSpec {
    /// Smallest shape over all hops.
    pub m: f64,
    /// Number of hops attaining it.
    pub mu: usize,
    /// 0-based indices of those hops, increasing.
    pub hop_indices: Vec<usize>,
}

/// Smallest shape, its multiplicity and where it occurs.
pub fn min_pole(link: &LinkSpec) -> PoleSpec {
    let shapes: Vec<f64> = link.hops().iter().map(|h| h.fading.min_shape()).collect();
    let m = shapes.iter().copied().fold(f64::INFINITY, f64::min);
    let hop_indices: Vec<usize> = shapes
        .iter()
        .enumerate()
        .filter(|(_, &s)| (s - m).abs() <= SHAPE_TIE_TOL)
        .map(|(i, _)| i)
        .collect();
    PoleSpec {
        m,
        mu: hop_indices.len(),
        hop_indices,
    }
}

/// Classes `L_1 .. L_mu` of index tuples by the order of their pole at `s = m`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexPartition {
    /// `classes[r - 1]` is `L_r`.
    pub classes: Vec<Vec<IndexTuple>>,
    /// Tuples without a pole at `s = m`.
    pub excluded: Vec<IndexTuple>,
}

/// Class index `r` of a tuple: `lambda` vanishes at hop `q_r` but not at `q_{r+1}`.
pub fn class_of(tuple: &IndexTuple, pole: &PoleSpec) -> Option<usize> {
    let q = &pole.hop_indices;
    (1..=pole.mu).find(|&r| tuple.lambda[q[r - 1]] == 0 && (r == pole.mu || tuple.lambda[q[r]] > 0))
}

pub fn partition_index_tuples(tuples: &[IndexTuple], pole: &PoleSpec) -> IndexPartition {
    let mut classes = vec![Vec::new(); pole.mu];
    let mut excluded = Vec::new();
    for t in tuples {
        match class_of(t, pole) {
            Some(r) => classes[r - 1].push(t.clone()),
            None => excluded.push(t.clone()),
        }
    }
    IndexPartition { classes, excluded }
}

/// Contribution of one tuple to the expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct TupleTerm {
    pub tuple: IndexTuple,
    /// Class index (pole order bound at `s = m`).
    pub r: usize,
    /// `B_l` without the sign.
    pub b: f64,
    /// `C_r^{(k)}(m)`, `k = 0 .. r - 1`.
    pub c_derivs: Vec<f64>,
}

/// `P_o ~ sum_p coeffs[p] * (ln gamma_bar)^p * gamma_bar^{-m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSeries {
    pub m: f64,
    pub mu: usize,
    /// `c_0 .. c_{mu-1}`.
    pub coeffs: Vec<f64>,
    /// The constant `A`.
    pub a: f64,
    pub terms: Vec<TupleTerm>,
    /// Set when the minimum is shared by hops of different families, a case
    /// built by pole-order accumulation rather than taken from a known closed form.
    pub extrapolated: bool,
    pub warnings: Vec<String>,
}

/// Coding gain and decay of the leading term `psi (ln gamma_bar)^{mu-1} gamma_bar^{-m}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingOrder {
    pub psi: f64,
    pub mu: usize,
    pub m: f64,
}

impl AsymptoticSeries {
    /// All terms of order `gamma_bar^{-m}`.
    pub fn eval(&self, gamma_bar: f64) -> f64 {
        let l = gamma_bar.ln();
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * l + c);
        poly * gamma_bar.powf(-self.m)
    }

    pub fn leading_order(&self) -> LeadingOrder {
        LeadingOrder {
            psi: self.coeffs[self.mu - 1],
            mu: self.mu,
            m: self.m,
        }
    }

    /// The top term only.
    pub fn eval_leading(&self, gamma_bar: f64) -> f64 {
        self.leading_order().eval(gamma_bar)
    }

    pub fn estimate(&self, gamma_bar: f64, method: Method) -> Result<OutageEstimate> {
        let value = match method {
            Method::AsymptoticFull => self.eval(gamma_bar),
            Method::AsymptoticLeading => self.eval_leading(gamma_bar),
            other => {
                return Err(Error::Domain(format!("{other:?} is not an asymptotic method")));
            }
        };
        if !value.is_finite() {
            return Err(Error::NonConvergence {
                what: "asymptotic series",
                last: value,
                previous: value,
            });
        }
        let mut warnings = self.warnings.clone();
        if !(0.0..=1.0).contains(&value) {
            warnings.push(format!(
                "asymptotic value {value:e} outside [0, 1]; gamma_bar is below the series' range"
            ));
        }
        Ok(OutageEstimate {
            value: value.clamp(0.0, 1.0),
            stderr: None,
            tolerance: None,
            method,
            trials: None,
            warnings,
        })
    }
}

impl LeadingOrder {
    pub fn eval(&self, gamma_bar: f64) -> f64 {
        self.psi * gamma_bar.ln().powi(self.mu as i32 - 1) * gamma_bar.powf(-self.m)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `C_r(s) = (s - m)^r * Gamma(lambda_{N-1} - s) / Gamma(1 - s) * prod_n g_n(lambda_{n-1} - s)`.
fn c_r(models: &[FadingModel], tuple: &IndexTuple, m: f64, r: usize, s: Complex64) -> Result<Complex64> {
    let mut acc = (s - m).powu(r as u32) * gamma_ratio_shift(tuple.lambda_last(), s)?;
    for (model, &shift) in models.iter().zip(&tuple.lambda) {
        acc *= model.mellin_reduced(shift as f64 - s)?;
    }
    Ok(acc)
}

/// Distance from `m` to the nearest other singularity of the tuple's integrand.
fn isolation(models: &[FadingModel], tuple: &IndexTuple, m: f64) -> f64 {
    let mut nearest = if tuple.lambda_last() == 0 { m } else { f64::INFINITY };
    for (model, &shift) in models.iter().zip(&tuple.lambda) {
        let (_, ladder) = model.shape_and_pole_offsets();
        for p in ladder.iter(shift as f64, m + 2.0) {
            let d = (p - m).abs();
            if d > POLE_MERGE_TOL {
                nearest = nearest.min(d);
            }
        }
    }
    if nearest.is_finite() {
        nearest
    } else {
        1.0
    }
}

/// Expansion coefficients of `P_o` in `(ln gamma_bar)^p gamma_bar^{-m}`.
pub fn expansion_coeffs(link: &LinkSpec, config: &ExpansionConfig) -> Result<AsymptoticSeries> {
    let models = effective_models(link, GainRegime::Asymptotic);
    let pole = min_pole(link);
    let m = pole.m;
    let mu = pole.mu;
    let rho = link.rhos();
    let tuples = enumerate_index_tuples(config, &rho)?;
    let parts: Vec<_> = models.iter().map(|f| f.mellin_parts()).collect();
    let a = rho[rho.len() - 1] * link.gamma_th() / parts.iter().map(|p| p.scale).product::<f64>();
    let ln_a = a.ln();

    let mut coeffs = vec![0.0; mu];
    let mut terms = Vec::new();
    for tuple in tuples {
        let Some(r) = class_of(&tuple, &pole) else {
            continue;
        };
        let b = tuple.weight
            * parts
                .iter()
                .zip(&tuple.lambda)
                .map(|(p, &l)| p.prefactor * p.scale.powi(l as i32))
                .product::<f64>();
        let radius = 0.45 * isolation(&models, &tuple, m);
        let derivs = cauchy_derivatives(|s| c_r(&models, &tuple, m, r, s), Complex64::new(m, 0.0), r - 1, radius)?;
        let c_derivs: Vec<f64> = derivs.iter().map(|d| d.re).collect();
        let scale = a.powf(m) * tuple.sign * b;
        for (p, coeff) in coeffs.iter_mut().enumerate().take(r) {
            let mut acc = 0.0;
            for l in p..r {
                acc += c_derivs[r - 1 - l] / (factorial(r - 1 - l) * factorial(l))
                    * binomial(l, p)
                    * ln_a.powi((l - p) as i32);
            }
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            *coeff += scale * sign * acc;
        }
        terms.push(TupleTerm { tuple, r, b, c_derivs });
    }

    let mut warnings = Vec::new();
    let shapes: Vec<f64> = link.hops().iter().map(|h| h.fading.min_shape()).collect();
    if let Some(gap) = shapes
        .iter()
        .map(|s| s - m)
        .filter(|&d| d > SHAPE_TIE_TOL && d < NEAR_TIE_GAP)
        .reduce(f64::min)
    {
        warnings.push(format!(
            "a hop shape lies {gap:.3e} above the minimum {m}; the expansion converges slowly"
        ));
    }
    let families: Vec<&str> = pole
        .hop_indices
        .iter()
        .map(|&i| link.hops()[i].fading.family())
        .collect();
    let extrapolated = families.windows(2).any(|w| w[0] != w[1]);
    if extrapolated {
        warnings.push(format!(
            "minimum shape {m} is shared by different families ({}); coefficients extrapolate the single-family forms",
            families.join(", ")
        ));
    }

    Ok(AsymptoticSeries {
        m,
        mu,
        coeffs,
        a,
        terms,
        extrapolated,
        warnings,
    })
}

/// Coding gain `psi` with the customary `L_n = 2` expansion.
pub fn leading_order(link: &LinkSpec) -> Result<LeadingOrder> {
    Ok(expansion_coeffs(link, &ExpansionConfig::for_link(link))?.leading_order())
}

/// `d(gamma_bar) = m - (mu - 1) ln ln gamma_bar / ln gamma_bar`.
pub fn finite_snr_diversity(link: &LinkSpec, gamma_bar: f64) -> Result<f64> {
    diversity_from_pole(&min_pole(link), gamma_bar)
}

pub fn diversity_from_pole(pole: &PoleSpec, gamma_bar: f64) -> Result<f64> {
    if gamma_bar.is_nan() || gamma_bar <= std::f64::consts::E || !gamma_bar.is_finite() {
        return Err(Error::Domain(format!(
            "finite-SNR diversity needs gamma_bar > e, got {gamma_bar}"
        )));
    }
    let l = gamma_bar.ln();
    Ok(pole.m - (pole.mu as f64 - 1.0) * l.ln() / l)
}

/// `e^{(mu - 1) / m}`, where the leading term peaks; the expansion needs SNRs well above it.
pub fn convergence_threshold(pole: &PoleSpec) -> f64 {
    ((pole.mu as f64 - 1.0) / pole.m).exp()
}
