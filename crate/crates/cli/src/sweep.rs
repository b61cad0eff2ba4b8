//! Evaluation of the configured engines over the SNR grid.

use afrelay::asymptotics::expansion_coeffs;
use afrelay::integral::{outage_contour, outage_residue_series_auto};
use afrelay::montecarlo::estimate_outage;
use afrelay::{AsymptoticSeries, Method, OutageEstimate};
use rayon::prelude::*;

use crate::config::RunConfig;

/// Smallest contour value at which `--check` compares against Monte Carlo.
pub const CHECK_FLOOR: f64 = 1e-5;

/// One grid point. `values` follows `RunConfig::engines`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub gamma_bar_db: f64,
    pub values: Vec<Option<f64>>,
    pub mc_stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub header: Vec<String>,
    pub rows: Vec<Row>,
    /// One line per failure or warning, in grid order.
    pub diagnostics: Vec<String>,
    /// Cells left empty because an engine failed.
    pub failures: usize,
}

/// `gamma_bar = 10^(dB / 10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Seed of the Monte Carlo run at grid index `k`.
pub fn point_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add(k as u64)
}

pub fn header(cfg: &RunConfig) -> Vec<String> {
    let mut h = vec!["gamma_bar_db".to_string()];
    h.extend(cfg.engines.iter().map(|m| m.name().to_string()));
    if cfg.engines.contains(&Method::MonteCarlo) {
        h.push("mc_stderr".to_string());
    }
    h
}

/// Runs every engine at every grid point on the current rayon pool.
pub fn run_sweep(cfg: &RunConfig) -> SweepOutput {
    let mut diagnostics = Vec::new();
    let wants_series = cfg
        .engines
        .iter()
        .any(|m| matches!(m, Method::AsymptoticFull | Method::AsymptoticLeading));
    let series: Option<Result<AsymptoticSeries, String>> =
        wants_series.then(|| expansion_coeffs(&cfg.link, &cfg.expansion).map_err(|e| e.to_string()));
    if let Some(Ok(s)) = &series {
        diagnostics.extend(s.warnings.iter().map(|w| format!("asymptotic series: {w}")));
    }

    let grid = cfg.sweep.grid_db();
    let points: Vec<(Row, Vec<String>, usize)> = grid
        .par_iter()
        .enumerate()
        .map(|(k, &db)| evaluate_point(cfg, series.as_ref(), k, db))
        .collect();

    let mut rows = Vec::with_capacity(points.len());
    let mut failures = 0;
    for (row, diag, failed) in points {
        diagnostics.extend(diag);
        failures += failed;
        rows.push(row);
    }
    SweepOutput {
        header: header(cfg),
        rows,
        diagnostics,
        failures,
    }
}

fn evaluate_point(
    cfg: &RunConfig,
    series: Option<&Result<AsymptoticSeries, String>>,
    k: usize,
    db: f64,
) -> (Row, Vec<String>, usize) {
    let gamma_bar = db_to_linear(db);
    let mut values = Vec::with_capacity(cfg.engines.len());
    let mut mc_stderr = None;
    let mut diag = Vec::new();
    let mut failed = 0;
    for &method in &cfg.engines {
        let result: Result<OutageEstimate, String> = match method {
            Method::Contour => outage_contour(&cfg.link, gamma_bar, &cfg.expansion).map_err(|e| e.to_string()),
            Method::ResidueSeries => {
                outage_residue_series_auto(&cfg.link, gamma_bar, &cfg.expansion).map_err(|e| e.to_string())
            }
            Method::AsymptoticFull | Method::AsymptoticLeading => match series {
                Some(Ok(s)) => s.estimate(gamma_bar, method).map_err(|e| e.to_string()),
                Some(Err(e)) => Err(e.clone()),
                None => unreachable!("series is built whenever an asymptotic engine is selected"),
            },
            Method::MonteCarlo => estimate_outage(&cfg.link, gamma_bar, cfg.mc.trials, point_seed(cfg.mc.seed, k))
                .map_err(|e| e.to_string()),
        };
        match result {
            Ok(est) => {
                diag.extend(est.warnings.iter().map(|w| format!("{db} dB {method}: warning: {w}")));
                if method == Method::MonteCarlo {
                    mc_stderr = est.stderr;
                }
                values.push(Some(est.value));
            }
            Err(e) => {
                diag.push(format!("{db} dB {method}: error: {e}"));
                failed += 1;
                values.push(None);
            }
        }
    }
    let row = Row {
        gamma_bar_db: db,
        values,
        mc_stderr,
    };
    (row, diag, failed)
}

impl SweepOutput {
    /// The CSV document: `{}` for the dB column, shortest round-trip `{:e}` for values.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        let mc = self.header.iter().any(|h| h == "mc_stderr");
        for row in &self.rows {
            let mut rec = vec![format!("{}", row.gamma_bar_db)];
            rec.extend(
                row.values
                    .iter()
                    .map(|v| v.map(|x| format!("{x:e}")).unwrap_or_default()),
            );
            if mc {
                rec.push(row.mc_stderr.map(|x| format!("{x:e}")).unwrap_or_default());
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    fn column(&self, name: &str) -> Option<usize> {
        // values are offset by the leading dB column
        self.header.iter().position(|h| h == name).map(|i| i - 1)
    }

    /// Rows where Monte Carlo and the contour disagree by more than
    /// `3 * stderr + 1e-3 * contour`, for contour values of at least [`CHECK_FLOOR`].
    pub fn check_breaches(&self) -> Vec<String> {
        let (Some(c), Some(m)) = (
            self.column(Method::Contour.name()),
            self.column(Method::MonteCarlo.name()),
        ) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for row in &self.rows {
            let (Some(contour), Some(mc), Some(se)) = (row.values[c], row.values[m], row.mc_stderr) else {
                continue;
            };
            if contour < CHECK_FLOOR {
                continue;
            }
            let bound = 3.0 * se + 1e-3 * contour;
            if (mc - contour).abs() > bound {
                out.push(format!(
                    "{} dB: monte_carlo {mc:e} vs contour {contour:e}, |diff| {:e} > {bound:e}",
                    row.gamma_bar_db,
                    (mc - contour).abs()
                ));
            }
        }
        out
    }
}
