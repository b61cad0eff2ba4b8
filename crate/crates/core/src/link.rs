//! Multihop system model: hops, amplification gains and the end-to-end SNR.

use crate::error::{invalid, Error, Result};
use crate::fading::FadingModel;

/// One hop: channel-power law and receiver noise scaling `rho`
/// (the receiver noise is `rho / gamma_bar`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopSpec {
    pub fading: FadingModel,
    pub rho: f64,
}

impl HopSpec {
    pub fn new(fading: FadingModel, rho: f64) -> Result<Self> {
        fading.validate()?;
        if !(rho.is_finite() && rho > 0.0) {
            return Err(invalid("rho", rho, "must be finite and > 0"));
        }
        Ok(HopSpec { fading, rho })
    }
}

/// How relay `n` chooses its fixed amplification `A_n`.
#[derive(Debug, Clone, PartialEq)]
pub enum AmplificationPolicy {
    /// `A_n = 1 / sqrt(E|h_n|^2 + rho_n / gamma_bar)`.
    PaperGain,
    /// High-SNR limit of [`AmplificationPolicy::PaperGain`]: `A_n = 1 / sqrt(E|h_n|^2)`.
    AsymptoticGain,
    /// Explicit gains `A_1 .. A_{N-1}`.
    FixedGains(Vec<f64>),
}

impl AmplificationPolicy {
    /// The `gamma_bar -> infinity` limit of this policy.
    pub fn asymptotic(&self) -> AmplificationPolicy {
        match self {
            AmplificationPolicy::PaperGain => AmplificationPolicy::AsymptoticGain,
            other => other.clone(),
        }
    }

    /// Whether the gains depend on the operating SNR.
    pub fn depends_on_snr(&self) -> bool {
        matches!(self, AmplificationPolicy::PaperGain)
    }
}

/// A complete `N`-hop link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    hops: Vec<HopSpec>,
    gamma_th: f64,
    amplification: AmplificationPolicy,
}

impl LinkSpec {
    pub fn new(hops: Vec<HopSpec>, gamma_th: f64, amplification: AmplificationPolicy) -> Result<Self> {
        if hops.len() < 2 {
            return Err(invalid("hops", hops.len() as f64, "a link needs at least two hops"));
        }
        for hop in &hops {
            hop.fading.validate()?;
            if !(hop.rho.is_finite() && hop.rho > 0.0) {
                return Err(invalid("rho", hop.rho, "must be finite and > 0"));
            }
        }
        if hops[0].rho != 1.0 {
            return Err(invalid(
                "hop[0].rho",
                hops[0].rho,
                "the first hop is the reference, rho = 1",
            ));
        }
        if !(gamma_th.is_finite() && gamma_th > 0.0) {
            return Err(invalid("gamma_th", gamma_th, "must be finite and > 0"));
        }
        if let AmplificationPolicy::FixedGains(g) = &amplification {
            if g.len() != hops.len() - 1 {
                return Err(invalid(
                    "gains",
                    g.len() as f64,
                    "need exactly one gain per relay (N - 1)",
                ));
            }
            for &a in g {
                if !(a.is_finite() && a > 0.0) {
                    return Err(invalid("gains", a, "must be finite and > 0"));
                }
            }
        }
        Ok(LinkSpec {
            hops,
            gamma_th,
            amplification,
        })
    }

    /// Convenience constructor from `(model, rho)` pairs.
    pub fn from_models(hops: &[(FadingModel, f64)], gamma_th: f64, amplification: AmplificationPolicy) -> Result<Self> {
        let hops = hops
            .iter()
            .map(|&(f, rho)| HopSpec::new(f, rho))
            .collect::<Result<Vec<_>>>()?;
        LinkSpec::new(hops, gamma_th, amplification)
    }

    pub fn hops(&self) -> &[HopSpec] {
        &self.hops
    }

    pub fn num_hops(&self) -> usize {
        self.hops.len()
    }

    pub fn gamma_th(&self) -> f64 {
        self.gamma_th
    }

    pub fn amplification(&self) -> &AmplificationPolicy {
        &self.amplification
    }

    pub fn rhos(&self) -> Vec<f64> {
        self.hops.iter().map(|h| h.rho).collect()
    }

    /// The same link with another amplification policy.
    pub fn with_amplification(&self, amplification: AmplificationPolicy) -> Result<Self> {
        LinkSpec::new(self.hops.clone(), self.gamma_th, amplification)
    }

    /// The same link with another outage threshold.
    pub fn with_gamma_th(&self, gamma_th: f64) -> Result<Self> {
        LinkSpec::new(self.hops.clone(), gamma_th, self.amplification.clone())
    }
}

/// Which gains to use when the policy depends on the SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainRegime {
    /// Gains evaluated at this reference SNR (linear).
    AtSnr(f64),
    /// The policy's high-SNR limit.
    Asymptotic,
}

fn check_gamma_bar(gamma_bar: f64) -> Result<()> {
    if gamma_bar.is_finite() && gamma_bar > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("gamma_bar = {gamma_bar} must be finite and > 0")))
    }
}

/// Relay gains `A_1 .. A_{N-1}`.
pub fn amplification_gains(link: &LinkSpec, gamma_bar: f64) -> Result<Vec<f64>> {
    check_gamma_bar(gamma_bar)?;
    Ok(gains_in_regime(link, GainRegime::AtSnr(gamma_bar)))
}

pub fn gains_in_regime(link: &LinkSpec, regime: GainRegime) -> Vec<f64> {
    let relays = &link.hops[..link.hops.len() - 1];
    let policy = match regime {
        GainRegime::AtSnr(_) => link.amplification.clone(),
        GainRegime::Asymptotic => link.amplification.asymptotic(),
    };
    match policy {
        AmplificationPolicy::PaperGain => {
            let gamma_bar = match regime {
                GainRegime::AtSnr(g) => g,
                GainRegime::Asymptotic => unreachable!("asymptotic policy never keeps PaperGain"),
            };
            relays
                .iter()
                .map(|h| 1.0 / (h.fading.mean_power() + h.rho / gamma_bar).sqrt())
                .collect()
        }
        AmplificationPolicy::AsymptoticGain => relays.iter().map(|h| 1.0 / h.fading.mean_power().sqrt()).collect(),
        AmplificationPolicy::FixedGains(g) => g,
    }
}

/// Laws of the effective hop powers `X_n = A_{n-1}^2 |h_n|^2` (with `A_0 = 1`).
pub fn effective_models(link: &LinkSpec, regime: GainRegime) -> Vec<FadingModel> {
    let gains = gains_in_regime(link, regime);
    link.hops
        .iter()
        .enumerate()
        .map(|(n, hop)| {
            if n == 0 {
                hop.fading
            } else {
                hop.fading.scaled(gains[n - 1] * gains[n - 1])
            }
        })
        .collect()
}

/// Instantaneous end-to-end SNR
/// `gamma_bar * prod_n X_n / sum_n rho_n prod_{j>n} X_j` for realised powers `|h_n|^2`.
pub fn end_to_end_snr(link: &LinkSpec, gamma_bar: f64, powers: &[f64]) -> Result<f64> {
    check_gamma_bar(gamma_bar)?;
    if powers.len() != link.num_hops() {
        return Err(Error::Domain(format!(
            "expected {} hop powers, got {}",
            link.num_hops(),
            powers.len()
        )));
    }
    let gains = amplification_gains(link, gamma_bar)?;
    let mut x = powers.to_vec();
    for n in 1..x.len() {
        x[n] *= gains[n - 1] * gains[n - 1];
    }
    Ok(snr_from_effective(&x, &link.rhos(), gamma_bar))
}

/// End-to-end SNR from already-amplified powers `X_n`.
#[inline]
pub fn snr_from_effective(x: &[f64], rho: &[f64], gamma_bar: f64) -> f64 {
    let mut suffix = 1.0;
    let mut denominator = 0.0;
    for n in (0..x.len()).rev() {
        denominator += rho[n] * suffix;
        suffix *= x[n];
    }
    gamma_bar * suffix / denominator
}

/// Average SNR of each hop, `(E|h_n|^2 / rho_n) * gamma_bar`.
pub fn per_hop_avg_snr(link: &LinkSpec, gamma_bar: f64) -> Result<Vec<f64>> {
    check_gamma_bar(gamma_bar)?;
    Ok(link
        .hops
        .iter()
        .map(|h| h.fading.mean_power() / h.rho * gamma_bar)
        .collect())
}
