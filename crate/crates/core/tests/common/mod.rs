//! Link parameter sets shared by the integration suites.
#![allow(dead_code)]

use afrelay::{AmplificationPolicy, FadingModel, LinkSpec};

pub fn nakagami(m: f64, theta: f64) -> FadingModel {
    FadingModel::nakagami(m, theta).unwrap()
}

pub fn link(hops: &[(FadingModel, f64)]) -> LinkSpec {
    LinkSpec::from_models(hops, 1.0, AmplificationPolicy::PaperGain).unwrap()
}

/// The eight figure parameter sets with `gamma_th = 1` and the `gamma_bar`-dependent gains.
pub fn figure_links() -> Vec<(&'static str, LinkSpec)> {
    let unit = |f: fn(f64, f64) -> afrelay::Result<FadingModel>, params: &[f64]| -> LinkSpec {
        let hops: Vec<_> = params.iter().map(|&p| (f(p, 1.0).unwrap(), 1.0)).collect();
        link(&hops)
    };
    vec![
        ("fig2", unit(FadingModel::nakagami, &[1.0, 2.0, 3.0])),
        ("fig3", unit(FadingModel::nakagami, &[3.0, 2.0, 1.0])),
        (
            "fig4",
            link(&[
                (nakagami(1.0, 1.5), 1.0),
                (nakagami(2.0, 1.0), 1.0 / 3.0),
                (nakagami(1.0, 0.5), 5.0 / 3.0),
            ]),
        ),
        ("fig5", unit(FadingModel::nakagami, &[5.0, 5.0, 2.5, 2.5, 1.5])),
        ("fig6", unit(FadingModel::weibull, &[1.5, 2.0, 2.5, 1.0])),
        ("fig7", unit(FadingModel::rician, &[1.0, 3.0, 5.0, 0.0])),
        ("fig8", unit(FadingModel::hoyt, &[0.75, 0.5, 1.0 / 3.0, 0.25])),
        (
            "fig9",
            link(&[
                (nakagami(2.0, 0.5), 1.0),
                (FadingModel::weibull(1.5, 1.0).unwrap(), 0.9),
                (FadingModel::rician(3.0, 1.5).unwrap(), 0.8),
                (FadingModel::hoyt(0.75, 2.0).unwrap(), 0.7),
            ]),
        ),
    ]
}

pub fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
