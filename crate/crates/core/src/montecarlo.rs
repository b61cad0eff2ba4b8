//! Direct simulation of the end-to-end SNR.
//!
//! Trials are split into fixed chunks of [`CHUNK`] draws. Chunk `k` uses a
//! ChaCha8 generator seeded with the run seed and switched to stream `k`, so
//! each trial index maps to the same draws whatever thread runs it, and the
//! integer outage counts are summed exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fading::PowerSampler;
use crate::link::{amplification_gains, snr_from_effective, LinkSpec};

/// Trials per random stream.
pub const CHUNK: u64 = 1 << 16;

/// Which engine produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Contour,
    ResidueSeries,
    AsymptoticFull,
    AsymptoticLeading,
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Contour,
        Method::ResidueSeries,
        Method::AsymptoticFull,
        Method::AsymptoticLeading,
        Method::MonteCarlo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Contour => "contour",
            Method::ResidueSeries => "residue",
            Method::AsymptoticFull => "asymptotic_full",
            Method::AsymptoticLeading => "asymptotic_leading",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "contour" => Ok(Method::Contour),
            "residue" | "residue_series" => Ok(Method::ResidueSeries),
            "asymptotic_full" => Ok(Method::AsymptoticFull),
            "asymptotic_leading" => Ok(Method::AsymptoticLeading),
            "monte_carlo" | "mc" => Ok(Method::MonteCarlo),
            other => Err(Error::Domain(format!("unknown engine `{other}`"))),
        }
    }
}

/// An outage probability with its uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageEstimate {
    pub value: f64,
    /// Monte Carlo standard error `sqrt(p (1 - p) / trials)`.
    pub stderr: Option<f64>,
    /// Numerical error indicator of an analytic engine.
    pub tolerance: Option<f64>,
    pub method: Method,
    pub trials: Option<u64>,
    pub warnings: Vec<String>,
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_len(trials: u64, chunk: u64) -> u64 {
    CHUNK.min(trials - chunk * CHUNK)
}

/// Effective powers `X_n = A_{n-1}^2 |h_n|^2` of one trial, written into `x`.
#[inline]
fn draw(samplers: &[PowerSampler], gains_sq: &[f64], rng: &mut ChaCha8Rng, x: &mut [f64]) {
    for (n, s) in samplers.iter().enumerate() {
        let p = s.sample(rng);
        x[n] = if n == 0 { p } else { p * gains_sq[n - 1] };
    }
}

struct Setup {
    samplers: Vec<PowerSampler>,
    gains_sq: Vec<f64>,
    rho: Vec<f64>,
}

fn setup(link: &LinkSpec, gamma_bar: f64, trials: u64) -> Result<Setup> {
    if trials == 0 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    let gains = amplification_gains(link, gamma_bar)?;
    Ok(Setup {
        samplers: link.hops().iter().map(|h| PowerSampler::new(&h.fading)).collect(),
        gains_sq: gains.iter().map(|a| a * a).collect(),
        rho: link.rhos(),
    })
}

/// Empirical `P(SNR < gamma_th)` over `trials` independent draws.
///
/// Runs on the current rayon pool; the result depends only on `seed` and `trials`.
pub fn estimate_outage(link: &LinkSpec, gamma_bar: f64, trials: u64, seed: u64) -> Result<OutageEstimate> {
    let st = setup(link, gamma_bar, trials)?;
    let gamma_th = link.gamma_th();
    let chunks = trials.div_ceil(CHUNK);
    let outages: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(seed, k);
            let mut x = vec![0.0; st.samplers.len()];
            let mut count = 0u64;
            for _ in 0..chunk_len(trials, k) {
                draw(&st.samplers, &st.gains_sq, &mut rng, &mut x);
                if snr_from_effective(&x, &st.rho, gamma_bar) < gamma_th {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let p = outages as f64 / trials as f64;
    Ok(OutageEstimate {
        value: p,
        stderr: Some((p * (1.0 - p) / trials as f64).sqrt()),
        tolerance: None,
        method: Method::MonteCarlo,
        trials: Some(trials),
        warnings: Vec::new(),
    })
}

/// Outcome of comparing the SNR test with the nested threshold recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConsistencyReport {
    pub trials: u64,
    /// Trials where the two floating-point tests differed and exact arithmetic decided.
    pub boundary_ties: u64,
    /// Trials where the two tests differ in exact arithmetic (always a defect).
    pub disagreements: u64,
}

/// Outage decisions of one trial by the two routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialComparison {
    pub direct: bool,
    pub recursive: bool,
    /// Whether exact arithmetic was needed.
    pub tie: bool,
    pub exact_direct: bool,
    pub exact_recursive: bool,
}

/// `((X_1 - s_1) X_2 - s_2) ... X_N < s_N` with `s_n = rho_n gamma_th / gamma_bar`.
fn recursive_float(x: &[f64], sigma: &[f64]) -> bool {
    let n = x.len();
    let mut acc = x[0];
    for k in 1..n {
        acc = (acc - sigma[k - 1]) * x[k];
    }
    acc < sigma[n - 1]
}

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite value")
}

fn exact_direct(x: &[BigRational], rho: &[BigRational], gamma_bar: &BigRational, gamma_th: &BigRational) -> bool {
    let zero = BigRational::from_integer(BigInt::from(0));
    let mut suffix = BigRational::from_integer(BigInt::from(1));
    let mut denominator = zero;
    for n in (0..x.len()).rev() {
        denominator += &rho[n] * &suffix;
        suffix *= &x[n];
    }
    // SNR < gamma_th with a positive denominator
    gamma_bar * suffix < gamma_th * denominator
}

fn exact_recursive(x: &[BigRational], sigma: &[BigRational]) -> bool {
    let mut acc = x[0].clone();
    for k in 1..x.len() {
        acc = (acc - &sigma[k - 1]) * &x[k];
    }
    acc < sigma[x.len() - 1]
}

/// Compares both outage tests on given effective powers.
pub fn compare_trial(link: &LinkSpec, gamma_bar: f64, x: &[f64]) -> TrialComparison {
    let rho = link.rhos();
    let gamma_th = link.gamma_th();
    let sigma: Vec<f64> = rho.iter().map(|r| r * gamma_th / gamma_bar).collect();
    let direct = snr_from_effective(x, &rho, gamma_bar) < gamma_th;
    let recursive = recursive_float(x, &sigma);
    if direct == recursive {
        return TrialComparison {
            direct,
            recursive,
            tie: false,
            exact_direct: direct,
            exact_recursive: recursive,
        };
    }
    let xq: Vec<_> = x.iter().map(|&v| rational(v)).collect();
    let rq: Vec<_> = rho.iter().map(|&v| rational(v)).collect();
    let gq = rational(gamma_bar);
    let tq = rational(gamma_th);
    let sq: Vec<_> = rq.iter().map(|r| r * &tq / &gq).collect();
    TrialComparison {
        direct,
        recursive,
        tie: true,
        exact_direct: exact_direct(&xq, &rq, &gq, &tq),
        exact_recursive: exact_recursive(&xq, &sq),
    }
}

/// Checks, trial by trial, that the SNR threshold test and the nested
/// recursion agree; floating disagreements are settled exactly.
pub fn recursion_consistency_check(
    link: &LinkSpec,
    gamma_bar: f64,
    trials: u64,
    seed: u64,
) -> Result<ConsistencyReport> {
    let st = setup(link, gamma_bar, trials)?;
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<ConsistencyReport> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(seed, k);
            let mut x = vec![0.0; st.samplers.len()];
            let mut rep = ConsistencyReport::default();
            for _ in 0..chunk_len(trials, k) {
                draw(&st.samplers, &st.gains_sq, &mut rng, &mut x);
                let c = compare_trial(link, gamma_bar, &x);
                rep.trials += 1;
                rep.boundary_ties += u64::from(c.tie);
                rep.disagreements += u64::from(c.exact_direct != c.exact_recursive);
            }
            rep
        })
        .collect();
    Ok(parts
        .into_iter()
        .fold(ConsistencyReport::default(), |a, b| ConsistencyReport {
            trials: a.trials + b.trials,
            boundary_ties: a.boundary_ties + b.boundary_ties,
            disagreements: a.disagreements + b.disagreements,
        }))
}
