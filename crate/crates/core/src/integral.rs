//! The Mellin-Barnes outage representation and its two exact evaluators.
//!
//! For an index tuple `l` with running sums `lambda`, the integrand is
//!
//! ```text
//! I_l(s) = z^s * Gamma(lambda_{N-1} - s) / Gamma(1 - s) * prod_n M[f_{X_n}; 1 + lambda_{n-1} - s],
//! z = rho_N * gamma_th / gamma_bar,
//! ```
//!
//! and `P_o = 1 - sum_l sign_l * weight_l * (1 / 2 pi i) * int_{-kappa} I_l(s) ds`
//! with the line to the left of every pole. The only pole at `Re s <= 0` is the
//! simple pole at `s = 0` of the all-zero tuple, whose residue is `-1`. Moving
//! the line just right of the origin therefore cancels the leading `1` exactly:
//!
//! ```text
//! P_o = -sum_l sign_l * weight_l * (1 / 2 pi i) * int_{c} I_l(s) ds,   0 < c < first pole,
//!     =  sum_l sign_l * weight_l * sum_{p > 0} res_p I_l.
//! ```
//!
//! The shifted form is the default; it keeps full relative precision when
//! `P_o` is tiny. The left-of-poles form is kept as [`ContourPlacement::LeftOfPoles`].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fading::FadingModel;
use crate::link::{effective_models, GainRegime, LinkSpec};
use crate::montecarlo::{Method, OutageEstimate};
use crate::quadrature::GaussLegendre;
use crate::special::{cauchy_derivatives, gamma_ratio_shift};

/// Ladder points closer than this are one pole.
pub const POLE_MERGE_TOL: f64 = 1e-9;

/// Pre-clamp slack allowed outside `[0, 1]`.
pub const RANGE_SLACK: f64 = 1e-6;

/// Where the vertical integration line sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourPlacement {
    /// `Re s = c` strictly between the origin and the first positive pole.
    RightOfOrigin,
    /// `Re s = -(lambda_{N-1} + kappa_offset)`, left of every pole.
    LeftOfPoles { kappa_offset: f64 },
}

/// Truncation and panel controls of the line integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// First truncation height; doubled until the estimate settles.
    pub height: f64,
    /// Largest height tried before giving up.
    pub max_height: f64,
    /// Upper bound on the width of one Gauss-Legendre panel.
    pub panel_width: f64,
    /// Nodes per panel.
    pub panel_nodes: usize,
    /// Relative change between successive heights treated as converged.
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            height: 200.0,
            max_height: 800.0,
            panel_width: 4.0,
            panel_nodes: 64,
            rel_tol: 1e-9,
        }
    }
}

/// Truncation orders of the per-relay expansion plus contour controls.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionConfig {
    /// `L_1 .. L_{N-1}`; tuple index `l_n` runs over `0 .. L_n`.
    pub orders: Vec<usize>,
    pub placement: ContourPlacement,
    pub quadrature: QuadratureConfig,
}

impl ExpansionConfig {
    /// Same order `L` on every relay.
    pub fn uniform(num_hops: usize, order: usize) -> Self {
        ExpansionConfig {
            orders: vec![order; num_hops.saturating_sub(1)],
            placement: ContourPlacement::RightOfOrigin,
            quadrature: QuadratureConfig::default(),
        }
    }

    /// The customary first-order correction, `L_n = 2`.
    pub fn for_link(link: &LinkSpec) -> Self {
        Self::uniform(link.num_hops(), 2)
    }

    pub fn with_placement(mut self, placement: ContourPlacement) -> Self {
        self.placement = placement;
        self
    }

    pub fn validate(&self, num_hops: usize) -> Result<()> {
        if self.orders.len() + 1 != num_hops {
            return Err(invalid(
                "orders",
                self.orders.len() as f64,
                "need one expansion order per relay (N - 1)",
            ));
        }
        if let Some(&bad) = self.orders.iter().find(|&&l| l == 0) {
            return Err(invalid("orders", bad as f64, "every order must be >= 1"));
        }
        if let ContourPlacement::LeftOfPoles { kappa_offset } = self.placement {
            if !(kappa_offset > 0.0 && kappa_offset.is_finite()) {
                return Err(invalid("kappa_offset", kappa_offset, "must be finite and > 0"));
            }
        }
        let q = &self.quadrature;
        if !(q.height > 0.0 && q.max_height >= q.height && q.panel_width > 0.0) {
            return Err(invalid(
                "quadrature.height",
                q.height,
                "heights and width must be positive",
            ));
        }
        if q.panel_nodes < 2 {
            return Err(invalid(
                "quadrature.panel_nodes",
                q.panel_nodes as f64,
                "need >= 2 nodes",
            ));
        }
        Ok(())
    }
}

/// One term `(l_1 .. l_{N-1})` of the truncated expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexTuple {
    pub ell: Vec<usize>,
    /// Running sums, `lambda[0] = 0` and `lambda[n] = l_1 + .. + l_n`; hop `h`
    /// (0-based) sees the shift `lambda[h]`.
    pub lambda: Vec<usize>,
    /// `(-1)^{lambda_{N-1}}`.
    pub sign: f64,
    /// `prod_n (rho_n / rho_N)^{l_n} / l_n!`.
    pub weight: f64,
}

impl IndexTuple {
    pub fn new(ell: Vec<usize>, rho: &[f64]) -> Self {
        let rho_n = *rho.last().expect("nonempty rho");
        let mut lambda = Vec::with_capacity(ell.len() + 1);
        lambda.push(0);
        let mut weight = 1.0;
        for (n, &l) in ell.iter().enumerate() {
            lambda.push(lambda[n] + l);
            let ratio = rho[n] / rho_n;
            weight *= ratio.powi(l as i32) / factorial(l);
        }
        let last = *lambda.last().unwrap();
        IndexTuple {
            sign: if last % 2 == 0 { 1.0 } else { -1.0 },
            ell,
            lambda,
            weight,
        }
    }

    /// `lambda_{N-1}`, the argument of the leading Gamma ratio.
    pub fn lambda_last(&self) -> usize {
        *self.lambda.last().unwrap()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// All `prod L_n` tuples in lexicographic order.
pub fn enumerate_index_tuples(config: &ExpansionConfig, rho: &[f64]) -> Result<Vec<IndexTuple>> {
    config.validate(rho.len())?;
    let mut out = Vec::new();
    let mut ell = vec![0usize; config.orders.len()];
    loop {
        out.push(IndexTuple::new(ell.clone(), rho));
        // odometer increment, last position fastest
        let mut pos = ell.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            ell[pos] += 1;
            if ell[pos] < config.orders[pos] {
                break;
            }
            ell[pos] = 0;
        }
    }
}

/// The integrand for fixed effective hop laws.
#[derive(Debug, Clone)]
pub struct Integrand {
    models: Vec<FadingModel>,
    ln_z: f64,
}

impl Integrand {
    /// Effective laws under the given gain regime at SNR `gamma_bar`.
    pub fn new(link: &LinkSpec, gamma_bar: f64, regime: GainRegime) -> Result<Self> {
        if !(gamma_bar.is_finite() && gamma_bar > 0.0) {
            return Err(Error::Domain(format!("gamma_bar = {gamma_bar} must be finite and > 0")));
        }
        let rho_n = link.hops().last().unwrap().rho;
        Ok(Integrand {
            models: effective_models(link, regime),
            ln_z: (rho_n * link.gamma_th() / gamma_bar).ln(),
        })
    }

    /// Integrand at the operating SNR with the link's own gain policy.
    pub fn at_snr(link: &LinkSpec, gamma_bar: f64) -> Result<Self> {
        Self::new(link, gamma_bar, GainRegime::AtSnr(gamma_bar))
    }

    pub fn models(&self) -> &[FadingModel] {
        &self.models
    }

    /// `ln z` with `z = rho_N gamma_th / gamma_bar`.
    pub fn ln_z(&self) -> f64 {
        self.ln_z
    }

    pub fn eval(&self, tuple: &IndexTuple, s: Complex64) -> Result<Complex64> {
        let mut acc = (s * self.ln_z).exp() * gamma_ratio_shift(tuple.lambda_last(), s)?;
        for (model, &shift) in self.models.iter().zip(&tuple.lambda) {
            acc *= model.mellin(1.0 + shift as f64 - s)?;
        }
        Ok(acc)
    }
}

/// Integrand value `I_l(s)` at SNR `gamma_bar` with the link's gain policy.
pub fn integrand(link: &LinkSpec, tuple: &IndexTuple, gamma_bar: f64, s: Complex64) -> Result<Complex64> {
    Integrand::at_snr(link, gamma_bar)?.eval(tuple, s)
}

/// One pole of an integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: f64,
    /// Order after cancellation against the zeros of `1 / Gamma(1 - s)`.
    pub order: usize,
    /// Number of hop ladders meeting at this point, before cancellation.
    pub ladder_order: usize,
}

/// Poles of `I_l` in `(0, s_max]`, merged and sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleList {
    /// Genuine poles, `order >= 1`, strictly increasing locations.
    pub poles: Vec<Pole>,
    /// Ladder points fully cancelled by the Gamma ratio (removable).
    pub cancelled: Vec<Pole>,
    /// Whether the simple pole at `s = 0` is present (`lambda_{N-1} = 0`).
    pub origin_pole: bool,
}

impl PoleList {
    /// The pole or cancelled ladder point at `s`, if any.
    pub fn at(&self, s: f64) -> Option<Pole> {
        self.poles
            .iter()
            .chain(&self.cancelled)
            .find(|p| (p.location - s).abs() <= POLE_MERGE_TOL)
            .copied()
    }

    /// Smallest positive ladder point, genuine or cancelled.
    pub fn first_ladder_point(&self) -> Option<f64> {
        let a = self.poles.first().map(|p| p.location);
        let b = self.cancelled.first().map(|p| p.location);
        match (a, b) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

fn enumerate_poles(models: &[FadingModel], tuple: &IndexTuple, s_max: f64) -> PoleList {
    let mut points: Vec<f64> = Vec::new();
    for (model, &shift) in models.iter().zip(&tuple.lambda) {
        let (_, ladder) = model.shape_and_pole_offsets();
        points.extend(ladder.iter(shift as f64, s_max));
    }
    points.sort_by(|a, b| a.total_cmp(b));
    let lam = tuple.lambda_last();
    let mut poles = Vec::new();
    let mut cancelled = Vec::new();
    let mut i = 0;
    while i < points.len() {
        let location = points[i];
        let mut j = i;
        while j < points.len() && points[j] - location <= POLE_MERGE_TOL {
            j += 1;
        }
        let ladder_order = j - i;
        // (1 - s)(2 - s)...(lam - 1 - s) vanishes simply at s = 1 .. lam - 1
        let nearest = location.round();
        let zero =
            lam >= 2 && (location - nearest).abs() <= POLE_MERGE_TOL && nearest >= 1.0 && nearest <= (lam - 1) as f64;
        let order = ladder_order - usize::from(zero);
        let pole = Pole {
            location,
            order,
            ladder_order,
        };
        if order > 0 {
            poles.push(pole);
        } else {
            cancelled.push(pole);
        }
        i = j;
    }
    PoleList {
        poles,
        cancelled,
        origin_pole: lam == 0,
    }
}

/// Leftmost positive ladder point of `I_l`.
fn first_ladder_point(models: &[FadingModel], tuple: &IndexTuple) -> f64 {
    models
        .iter()
        .zip(&tuple.lambda)
        .map(|(m, &shift)| m.shape_and_pole_offsets().1.offset + shift as f64)
        .fold(f64::INFINITY, f64::min)
}

/// Poles of the tuple's integrand in `(0, s_max]` at SNR-independent pole locations.
pub fn pole_enumeration(link: &LinkSpec, tuple: &IndexTuple, s_max: f64) -> Result<PoleList> {
    if s_max.is_nan() || s_max <= 0.0 {
        return Err(Error::Domain(format!("s_max = {s_max} must be > 0")));
    }
    let models: Vec<FadingModel> = link.hops().iter().map(|h| h.fading).collect();
    Ok(enumerate_poles(&models, tuple, s_max))
}

/// Default residue cut-off: `m_min + 40 / ln(gamma_bar)`, kept within `[m_min + 2, m_min + 25]`.
pub fn default_s_max(link: &LinkSpec, gamma_bar: f64) -> f64 {
    let m_min = link
        .hops()
        .iter()
        .map(|h| h.fading.min_shape())
        .fold(f64::INFINITY, f64::min);
    let ln_g = gamma_bar.ln();
    let extra = if ln_g > 0.0 { 40.0 / ln_g } else { f64::INFINITY };
    m_min + extra.clamp(2.0, 25.0)
}

fn finalize(raw: f64, method: Method, tolerance: f64, warnings: Vec<String>) -> Result<OutageEstimate> {
    if !raw.is_finite() {
        return Err(Error::NonConvergence {
            what: "outage estimate",
            last: raw,
            previous: raw,
        });
    }
    if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&raw) {
        return Err(Error::RangeOvershoot { value: raw });
    }
    Ok(OutageEstimate {
        value: raw.clamp(0.0, 1.0),
        stderr: None,
        tolerance: Some(tolerance),
        method,
        trials: None,
        warnings,
    })
}

/// `(1 / pi) * int_0^inf Re f(c + i t) dt`, i.e. `(1 / 2 pi i) int_{c - i inf}^{c + i inf} f`
/// for a conjugate-symmetric `f`. Returns the value and the last height change.
fn line_integral<F>(
    f: F,
    c: f64,
    pole_distance: f64,
    ln_z: f64,
    q: &QuadratureConfig,
    rule: &GaussLegendre,
) -> Result<(f64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut width_cap = q.panel_width;
    if ln_z != 0.0 {
        // z^{it} oscillates with period 2 pi / |ln z|; keep about four periods per panel
        width_cap = width_cap.min(8.0 * std::f64::consts::PI / ln_z.abs());
    }
    let near = 8.0 * pole_distance;
    let mut t = 0.0;
    let mut total = 0.0;
    let mut checkpoint = q.height;
    let mut previous: Option<f64> = None;
    let mut quiet = 0;
    loop {
        let width = width_cap.min(near.max(t));
        let b = (t + width).min(checkpoint);
        let mut failure = None;
        let panel: f64 = rule.integrate(t, b, |x| match f(Complex64::new(c, x)) {
            Ok(v) if v.re.is_finite() => v.re,
            Ok(v) => {
                failure.get_or_insert(Error::NonConvergence {
                    what: "contour integrand",
                    last: v.re,
                    previous: x,
                });
                0.0
            }
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        total += panel;
        t = b;
        if panel.abs() <= 1e-17 * total.abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok((total / std::f64::consts::PI, 0.0));
            }
        } else {
            quiet = 0;
        }
        if t >= checkpoint {
            if let Some(prev) = previous {
                if (total - prev).abs() <= q.rel_tol * total.abs() {
                    return Ok((
                        total / std::f64::consts::PI,
                        (total - prev).abs() / std::f64::consts::PI,
                    ));
                }
            }
            if checkpoint * 2.0 > q.max_height {
                return Err(Error::NonConvergence {
                    what: "contour truncation height",
                    last: total / std::f64::consts::PI,
                    previous: previous.unwrap_or(f64::NAN) / std::f64::consts::PI,
                });
            }
            previous = Some(total);
            checkpoint *= 2.0;
        }
    }
}

/// Numerical Mellin-Barnes evaluation of `P_o`.
pub fn outage_contour(link: &LinkSpec, gamma_bar: f64, config: &ExpansionConfig) -> Result<OutageEstimate> {
    let eval = Integrand::at_snr(link, gamma_bar)?;
    contour_with(&eval, link, config)
}

/// Contour evaluation for an already prepared integrand.
pub fn contour_with(eval: &Integrand, link: &LinkSpec, config: &ExpansionConfig) -> Result<OutageEstimate> {
    let tuples = enumerate_index_tuples(config, &link.rhos())?;
    let rule = GaussLegendre::new(config.quadrature.panel_nodes);
    let terms: Vec<(f64, f64)> = tuples
        .par_iter()
        .map(|tuple| {
            let (c, distance) = match config.placement {
                ContourPlacement::RightOfOrigin => {
                    let first = first_ladder_point(eval.models(), tuple);
                    let gap = (0.5f64).min(first / 2.0);
                    (first - gap, gap)
                }
                ContourPlacement::LeftOfPoles { kappa_offset } => {
                    let lam = tuple.lambda_last() as f64;
                    // the nearest singular point is s = 0 (lambda = 0) or the first ladder point
                    (-(lam + kappa_offset), kappa_offset.min(lam + kappa_offset))
                }
            };
            let (value, change) = line_integral(
                |s| eval.eval(tuple, s),
                c,
                distance,
                eval.ln_z(),
                &config.quadrature,
                &rule,
            )?;
            Ok((tuple.sign * tuple.weight * value, tuple.weight * change))
        })
        .collect::<Result<_>>()?;
    let sum: f64 = terms.iter().map(|t| t.0).sum();
    let change: f64 = terms.iter().map(|t| t.1).sum();
    let raw = match config.placement {
        ContourPlacement::RightOfOrigin => -sum,
        ContourPlacement::LeftOfPoles { .. } => 1.0 - sum,
    };
    let tolerance = change.max(config.quadrature.rel_tol * raw.abs());
    finalize(raw, Method::Contour, tolerance, Vec::new())
}

/// Residue of `I_l` at `pole`, via the Taylor coefficient of `(s - p)^r I_l(s)`.
pub fn residue(eval: &Integrand, tuple: &IndexTuple, pole: Pole, radius: f64) -> Result<Complex64> {
    let p = Complex64::new(pole.location, 0.0);
    let r = pole.order;
    let g = |s: Complex64| -> Result<Complex64> { Ok((s - p).powu(r as u32) * eval.eval(tuple, s)?) };
    let derivs = cauchy_derivatives(g, p, r - 1, radius)?;
    Ok(derivs[r - 1] / factorial(r - 1))
}

/// Disc radius for a residue at `location`: 0.45 of the distance to the nearest other singular point.
fn residue_radius(list: &PoleList, extra: &[Pole], location: f64) -> f64 {
    let mut nearest = if list.origin_pole { location } else { f64::INFINITY };
    for p in list.poles.iter().chain(&list.cancelled).chain(extra) {
        let d = (p.location - location).abs();
        if d > POLE_MERGE_TOL {
            nearest = nearest.min(d);
        }
    }
    if !nearest.is_finite() {
        nearest = 1.0;
    }
    0.45 * nearest
}

/// Residue-sum evaluation of `P_o` over all poles in `(0, s_max]`.
pub fn outage_residue_series(
    link: &LinkSpec,
    gamma_bar: f64,
    config: &ExpansionConfig,
    s_max: f64,
) -> Result<OutageEstimate> {
    let eval = Integrand::at_snr(link, gamma_bar)?;
    residue_series_with(&eval, link, config, s_max)
}

/// Residue series starting from [`default_s_max`] and widened in steps of two
/// while the last unit strip is still significant, up to `m_min + 25`.
///
/// Links with large shapes carry residues whose Gamma factors outgrow `z^s`
/// for a while, so the default cut-off alone can stop too early.
pub fn outage_residue_series_auto(link: &LinkSpec, gamma_bar: f64, config: &ExpansionConfig) -> Result<OutageEstimate> {
    let eval = Integrand::at_snr(link, gamma_bar)?;
    let m_min = link
        .hops()
        .iter()
        .map(|h| h.fading.min_shape())
        .fold(f64::INFINITY, f64::min);
    let ceiling = m_min + 25.0;
    let mut s_max = default_s_max(link, gamma_bar);
    loop {
        let est = residue_series_with(&eval, link, config, s_max);
        let settled = matches!(&est, Ok(e) if e.warnings.is_empty());
        if settled || s_max >= ceiling {
            return est;
        }
        s_max = (s_max + 2.0).min(ceiling);
    }
}

/// Residue series for an already prepared integrand.
pub fn residue_series_with(
    eval: &Integrand,
    link: &LinkSpec,
    config: &ExpansionConfig,
    s_max: f64,
) -> Result<OutageEstimate> {
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(Error::Domain(format!("s_max = {s_max} must be finite and > 0")));
    }
    let tuples = enumerate_index_tuples(config, &link.rhos())?;
    // (weighted contribution, weighted magnitude of the last unit strip)
    let terms: Vec<(f64, f64)> = tuples
        .par_iter()
        .map(|tuple| {
            // one more unit of ladder so radii near s_max see their right neighbours
            let list = enumerate_poles(eval.models(), tuple, s_max + 1.0);
            let mut sum = 0.0;
            let mut tail = 0.0;
            for pole in list.poles.iter().filter(|p| p.location <= s_max) {
                let radius = residue_radius(&list, &[], pole.location);
                let res = residue(eval, tuple, *pole, radius)?;
                sum += res.re;
                if pole.location > s_max - 1.0 {
                    tail += res.re.abs();
                }
            }
            Ok((tuple.sign * tuple.weight * sum, tuple.weight * tail))
        })
        .collect::<Result<_>>()?;
    let raw: f64 = terms.iter().map(|t| t.0).sum();
    let tail: f64 = terms.iter().map(|t| t.1).sum();
    let mut warnings = Vec::new();
    if tail > 1e-12 * raw.abs() {
        warnings.push(format!(
            "residue tail not negligible: last unit strip below s_max = {s_max} contributes {tail:e} against {raw:e}"
        ));
    }
    finalize(raw, Method::ResidueSeries, tail, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::AmplificationPolicy;
    use crate::special::gamma;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn nakagami_link(ms: &[f64], policy: AmplificationPolicy) -> LinkSpec {
        let hops: Vec<_> = ms
            .iter()
            .map(|&m| (FadingModel::nakagami(m, 1.0).unwrap(), 1.0))
            .collect();
        LinkSpec::from_models(&hops, 1.0, policy).unwrap()
    }

    fn ells(tuples: &[IndexTuple]) -> Vec<Vec<usize>> {
        tuples.iter().map(|t| t.ell.clone()).collect()
    }

    #[test]
    fn tuple_enumeration_examples() {
        let cfg = ExpansionConfig::uniform(3, 2);
        let t = enumerate_index_tuples(&cfg, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(ells(&t), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let lambdas: Vec<_> = t.iter().map(|t| t.lambda.clone()).collect();
        assert_eq!(
            lambdas,
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1], vec![0, 1, 2]]
        );

        let cfg = ExpansionConfig::uniform(2, 1);
        let t = enumerate_index_tuples(&cfg, &[1.0, 1.0]).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].sign, t[0].weight), (1.0, 1.0));

        let cfg = ExpansionConfig::uniform(4, 2);
        let t = enumerate_index_tuples(&cfg, &[1.0; 4]).unwrap();
        assert_eq!(t.len(), 8);
        assert_eq!(t[7].ell, vec![1, 1, 1]);
        assert_eq!(t[7].sign, -1.0);
    }

    #[test]
    fn tuple_weights_use_noise_ratios() {
        let t = IndexTuple::new(vec![2, 1], &[1.0, 0.5, 2.0]);
        // (1/2)^2 / 2! * (1/4)^1 / 1!
        assert!((t.weight - 0.25 / 2.0 * 0.25).abs() < 1e-15);
        assert_eq!(t.sign, -1.0);
        assert_eq!(t.lambda, vec![0, 2, 3]);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExpansionConfig::uniform(3, 2);
        assert!(cfg.validate(3).is_ok());
        assert!(cfg.validate(4).is_err());
        cfg.orders[1] = 0;
        assert!(cfg.validate(3).is_err());
        let cfg = ExpansionConfig::uniform(3, 2).with_placement(ContourPlacement::LeftOfPoles { kappa_offset: 0.0 });
        assert!(cfg.validate(3).is_err());
    }

    #[test]
    fn gamma_ratio_identity_at_lambda_zero() {
        let s = c(0.7, 2.0);
        let direct = gamma(-s).unwrap() / gamma(1.0 - s).unwrap();
        let short = gamma_ratio_shift(0, s).unwrap();
        assert!((direct - short).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn rayleigh_integrand_example() {
        let link = nakagami_link(&[1.0, 1.0], AmplificationPolicy::FixedGains(vec![1.0]));
        let tuple = IndexTuple::new(vec![0], &[1.0, 1.0]);
        let gamma_bar = 10.0;
        let s = c(0.5, 0.0);
        let v = integrand(&link, &tuple, gamma_bar, s).unwrap();
        let half = gamma(c(0.5, 0.0)).unwrap().re;
        let expected = -(1.0 / 0.5) * (1.0 / gamma_bar).sqrt() * half * half;
        assert!((v.re - expected).abs() < 1e-12 * expected.abs());
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn pole_enumeration_examples() {
        let link = nakagami_link(&[1.0, 2.0, 1.0], AmplificationPolicy::PaperGain);
        let tuple = IndexTuple::new(vec![0, 0], &[1.0, 1.0, 1.0]);
        let list = pole_enumeration(&link, &tuple, 1.5).unwrap();
        assert!(list.origin_pole);
        assert_eq!(list.poles.len(), 1);
        assert_eq!((list.poles[0].location, list.poles[0].order), (1.0, 2));

        let link = nakagami_link(&[1.0, 1.0], AmplificationPolicy::PaperGain);
        let tuple = IndexTuple::new(vec![1], &[1.0, 1.0]);
        let list = pole_enumeration(&link, &tuple, 3.5).unwrap();
        assert!(!list.origin_pole);
        let summary: Vec<_> = list.poles.iter().map(|p| (p.location, p.order)).collect();
        assert_eq!(summary, vec![(1.0, 1), (2.0, 2), (3.0, 2)]);

        // lambda = 2 puts a zero of (1 - s) on the first pole
        let tuple = IndexTuple::new(vec![2], &[1.0, 1.0]);
        let list = pole_enumeration(&link, &tuple, 3.5).unwrap();
        assert_eq!(list.cancelled.len(), 1);
        assert_eq!(list.at(1.0).unwrap().ladder_order, 1);
        assert_eq!(list.at(1.0).unwrap().order, 0);
    }

    #[test]
    fn weibull_ladder_poles() {
        let link = LinkSpec::from_models(
            &[
                (FadingModel::weibull(1.5, 1.0).unwrap(), 1.0),
                (FadingModel::nakagami(3.0, 1.0).unwrap(), 1.0),
            ],
            1.0,
            AmplificationPolicy::PaperGain,
        )
        .unwrap();
        let tuple = IndexTuple::new(vec![0], &[1.0, 1.0]);
        let list = pole_enumeration(&link, &tuple, 5.0).unwrap();
        let summary: Vec<_> = list.poles.iter().map(|p| (p.location, p.order)).collect();
        assert_eq!(summary, vec![(1.5, 1), (3.0, 2), (4.0, 1), (4.5, 1), (5.0, 1)]);
    }

    #[test]
    fn origin_residue_is_minus_one() {
        let link = nakagami_link(&[1.0, 2.0, 3.0], AmplificationPolicy::PaperGain);
        let eval = Integrand::at_snr(&link, 100.0).unwrap();
        let tuple = IndexTuple::new(vec![0, 0], &[1.0; 3]);
        let pole = Pole {
            location: 0.0,
            order: 1,
            ladder_order: 0,
        };
        let res = residue(&eval, &tuple, pole, 0.45).unwrap();
        assert!((res - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn vanishing_threshold_gives_no_outage() {
        let link = nakagami_link(&[1.0, 2.0, 3.0], AmplificationPolicy::PaperGain)
            .with_gamma_th(1e-12)
            .unwrap();
        let cfg = ExpansionConfig::for_link(&link);
        let p = outage_contour(&link, 10.0, &cfg).unwrap();
        assert!(p.value < 1e-6);
    }

    #[test]
    fn both_placements_agree_at_low_snr() {
        let link = nakagami_link(&[1.0, 2.0, 3.0], AmplificationPolicy::PaperGain);
        let cfg = ExpansionConfig::for_link(&link);
        let left = cfg
            .clone()
            .with_placement(ContourPlacement::LeftOfPoles { kappa_offset: 0.5 });
        // the left line sees |z^s| = z^{-(lambda + 1/2)} and loses digits to cancellation
        for gamma_bar in [1.0, 3.0, 10.0] {
            let a = outage_contour(&link, gamma_bar, &cfg).unwrap().value;
            let b = outage_contour(&link, gamma_bar, &left).unwrap().value;
            assert!((a - b).abs() < 1e-8 * a, "{gamma_bar}: {a} vs {b}");
        }
    }

    #[test]
    fn contour_matches_residues_on_small_link() {
        let link = nakagami_link(&[1.0, 2.0, 3.0], AmplificationPolicy::PaperGain);
        let cfg = ExpansionConfig::for_link(&link);
        for db in [10.0, 20.0, 30.0] {
            let g = 10f64.powf(db / 10.0);
            let a = outage_contour(&link, g, &cfg).unwrap().value;
            let r = outage_residue_series(&link, g, &cfg, default_s_max(&link, g)).unwrap();
            assert!((a - r.value).abs() < 1e-8 * a, "{db} dB: {a} vs {}", r.value);
            assert!(r.warnings.is_empty(), "{:?}", r.warnings);
        }
    }

    #[test]
    fn residue_cut_off_widens_for_large_shapes() {
        let link = nakagami_link(&[5.0, 5.0, 2.5, 2.5, 1.5], AmplificationPolicy::PaperGain);
        let cfg = ExpansionConfig::for_link(&link);
        let g = 1e3;
        let contour = outage_contour(&link, g, &cfg).unwrap().value;
        let short = outage_residue_series(&link, g, &cfg, default_s_max(&link, g)).unwrap();
        assert!(!short.warnings.is_empty());
        let auto = outage_residue_series_auto(&link, g, &cfg).unwrap();
        assert!(auto.warnings.is_empty(), "{:?}", auto.warnings);
        assert!((auto.value - contour).abs() < 1e-9 * contour);
    }

    proptest! {
        #[test]
        fn integrand_is_conjugate_symmetric(
            re in -0.4f64..0.9,
            im in -30.0f64..30.0,
            ell in prop::collection::vec(0usize..3, 2),
            gamma_bar in 1.0f64..1e5,
        ) {
            let link = LinkSpec::from_models(
                &[
                    (FadingModel::rician(2.0, 1.0).unwrap(), 1.0),
                    (FadingModel::hoyt(0.5, 1.0).unwrap(), 0.8),
                    (FadingModel::weibull(1.5, 1.0).unwrap(), 1.2),
                ],
                1.0,
                AmplificationPolicy::PaperGain,
            )
            .unwrap();
            let tuple = IndexTuple::new(ell, &link.rhos());
            prop_assume!(tuple.lambda_last() > 0 || re.abs() > 1e-3 || im.abs() > 1e-3);
            let s = c(re, im);
            let a = integrand(&link, &tuple, gamma_bar, s).unwrap();
            let b = integrand(&link, &tuple, gamma_bar, s.conj()).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1e-300));
        }
    }
}
