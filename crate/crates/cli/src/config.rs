//! Run configuration: the TOML document, its validation and a canonical writer.

use std::fmt::Write as _;
use std::path::PathBuf;

use afrelay::{AmplificationPolicy, ContourPlacement, ExpansionConfig, FadingModel, LinkSpec, Method};
use serde::Deserialize;

/// Default Monte Carlo budget when `[mc]` is omitted.
pub const DEFAULT_TRIALS: u64 = 10_000_000;

/// Upper bound on sweep length, against typos such as `step_db = 0.0001`.
pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path} = {value}: {reason}")]
    Range {
        path: String,
        value: String,
        reason: String,
    },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn range(path: impl Into<String>, value: impl ToString, reason: impl Into<String>) -> ConfigError {
    ConfigError::Range {
        path: path.into(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl Sweep {
    /// Grid points `start + k * step` up to and including `stop`.
    pub fn grid_db(&self) -> Vec<f64> {
        let n = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize + 1;
        (0..n).map(|k| self.start_db + k as f64 * self.step_db).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub link: LinkSpec,
    pub sweep: Sweep,
    /// Sorted, duplicate free; this is also the CSV column order.
    pub engines: Vec<Method>,
    pub mc: McSettings,
    pub expansion: ExpansionConfig,
    pub output: Option<PathBuf>,
    /// Non-fatal adjustments made while parsing.
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    gamma_th: Option<f64>,
    amplification: Option<String>,
    gains: Option<Vec<f64>>,
    engines: Option<Vec<String>>,
    output: Option<PathBuf>,
    sweep: SweepDoc,
    mc: Option<McDoc>,
    expansion: Option<ExpansionDoc>,
    hop: Vec<HopDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepDoc {
    start_db: f64,
    stop_db: f64,
    step_db: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct McDoc {
    trials: Option<u64>,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpansionDoc {
    orders: Option<Vec<usize>>,
    placement: Option<String>,
    kappa: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HopDoc {
    family: String,
    m: Option<f64>,
    k: Option<f64>,
    q: Option<f64>,
    theta: f64,
    rho: Option<f64>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| schema("<document>", e.to_string().trim_end()))?;
    let doc: Doc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().message().to_string())
    })?;
    build(doc)
}

fn build(doc: Doc) -> Result<RunConfig, ConfigError> {
    let mut warnings = Vec::new();

    if doc.hop.len() < 2 {
        return Err(range(
            "hop",
            doc.hop.len(),
            "a relay link needs at least two [[hop]] tables",
        ));
    }
    let mut hops = Vec::with_capacity(doc.hop.len());
    for (i, h) in doc.hop.iter().enumerate() {
        let model = hop_model(i, h)?;
        let mut rho = h.rho.unwrap_or(1.0);
        if !(rho.is_finite() && rho > 0.0) {
            return Err(range(format!("hop[{i}].rho"), rho, "must be finite and > 0"));
        }
        if i == 0 && rho != 1.0 {
            warnings.push(format!(
                "hop[0].rho = {rho} overridden to 1 (the first hop sets the noise reference)"
            ));
            rho = 1.0;
        }
        hops.push((model, rho));
    }
    let n = hops.len();

    let gamma_th = doc.gamma_th.unwrap_or(1.0);
    if !(gamma_th.is_finite() && gamma_th > 0.0) {
        return Err(range("gamma_th", gamma_th, "must be finite and > 0"));
    }

    let policy = match doc.amplification.as_deref().unwrap_or("paper") {
        "paper" => AmplificationPolicy::PaperGain,
        "asymptotic" => AmplificationPolicy::AsymptoticGain,
        "fixed" => {
            let gains = doc
                .gains
                .clone()
                .ok_or_else(|| schema("gains", "required when amplification = \"fixed\""))?;
            if gains.len() != n - 1 {
                return Err(range(
                    "gains",
                    gains.len(),
                    format!("need one gain per relay ({})", n - 1),
                ));
            }
            if let Some((i, g)) = gains.iter().enumerate().find(|(_, g)| !(g.is_finite() && **g > 0.0)) {
                return Err(range(format!("gains[{i}]"), g, "must be finite and > 0"));
            }
            AmplificationPolicy::FixedGains(gains)
        }
        other => {
            return Err(schema(
                "amplification",
                format!("unknown policy `{other}`, expected paper, asymptotic or fixed"),
            ))
        }
    };
    if doc.gains.is_some() && !matches!(policy, AmplificationPolicy::FixedGains(_)) {
        return Err(schema("gains", "only allowed with amplification = \"fixed\""));
    }

    let link = LinkSpec::from_models(&hops, gamma_th, policy).map_err(|e| schema("hop", e.to_string()))?;

    let s = &doc.sweep;
    for (name, v) in [("start_db", s.start_db), ("stop_db", s.stop_db), ("step_db", s.step_db)] {
        if !v.is_finite() {
            return Err(range(format!("sweep.{name}"), v, "must be finite"));
        }
    }
    if s.step_db <= 0.0 {
        return Err(range("sweep.step_db", s.step_db, "must be > 0"));
    }
    if s.stop_db < s.start_db {
        return Err(range(
            "sweep.stop_db",
            s.stop_db,
            format!("must be >= start_db ({})", s.start_db),
        ));
    }
    let sweep = Sweep {
        start_db: s.start_db,
        stop_db: s.stop_db,
        step_db: s.step_db,
    };
    if (s.stop_db - s.start_db) / s.step_db >= MAX_GRID_POINTS as f64 {
        return Err(range(
            "sweep.step_db",
            s.step_db,
            format!("grid exceeds {MAX_GRID_POINTS} points"),
        ));
    }

    let engines = match &doc.engines {
        None => Method::ALL.to_vec(),
        Some(names) => parse_engines(names.iter().map(String::as_str))?,
    };

    let mc = doc.mc.as_ref();
    let mc = McSettings {
        trials: mc.and_then(|m| m.trials).unwrap_or(DEFAULT_TRIALS),
        seed: mc.and_then(|m| m.seed).unwrap_or(0),
    };
    if mc.trials == 0 {
        return Err(range("mc.trials", 0, "must be >= 1"));
    }

    let mut expansion = ExpansionConfig::for_link(&link);
    if let Some(e) = &doc.expansion {
        if let Some(orders) = &e.orders {
            if orders.len() != n - 1 {
                return Err(range(
                    "expansion.orders",
                    orders.len(),
                    format!("need one order per relay ({})", n - 1),
                ));
            }
            if let Some(i) = orders.iter().position(|&l| l == 0) {
                return Err(range(format!("expansion.orders[{i}]"), 0, "must be >= 1"));
            }
            expansion.orders = orders.clone();
        }
        expansion.placement = match (e.placement.as_deref().unwrap_or("right"), e.kappa) {
            ("right", None) => ContourPlacement::RightOfOrigin,
            ("right", Some(_)) => return Err(schema("expansion.kappa", "only allowed with placement = \"left\"")),
            ("left", kappa) => {
                let kappa_offset = kappa.unwrap_or(0.5);
                if !(kappa_offset.is_finite() && kappa_offset > 0.0) {
                    return Err(range("expansion.kappa", kappa_offset, "must be finite and > 0"));
                }
                ContourPlacement::LeftOfPoles { kappa_offset }
            }
            (other, _) => {
                return Err(schema(
                    "expansion.placement",
                    format!("unknown placement `{other}`, expected right or left"),
                ))
            }
        };
    }

    Ok(RunConfig {
        link,
        sweep,
        engines,
        mc,
        expansion,
        output: doc.output,
        warnings,
    })
}

type Constructor = fn(f64, f64) -> afrelay::Result<FadingModel>;

fn hop_model(i: usize, h: &HopDoc) -> Result<FadingModel, ConfigError> {
    let path = |field: &str| format!("hop[{i}].{field}");
    let (name, value, ctor): (&str, Option<f64>, Constructor) = match h.family.as_str() {
        "nakagami" => ("m", h.m, FadingModel::nakagami),
        "weibull" => ("m", h.m, FadingModel::weibull),
        "rician" => ("k", h.k, FadingModel::rician),
        "hoyt" => ("q", h.q, FadingModel::hoyt),
        other => {
            return Err(schema(
                path("family"),
                format!("unknown family `{other}`, expected nakagami, weibull, rician or hoyt"),
            ))
        }
    };
    for (field, v) in [("m", h.m), ("k", h.k), ("q", h.q)] {
        if field != name && v.is_some() {
            return Err(schema(
                path(field),
                format!("not a parameter of the {} family", h.family),
            ));
        }
    }
    let value = value.ok_or_else(|| schema(path(name), format!("required for the {} family", h.family)))?;
    ctor(value, h.theta).map_err(|e| match e {
        afrelay::Error::InvalidParameter { field, value, reason } => range(path(&field), value, reason),
        other => schema(path("family"), other.to_string()),
    })
}

/// Parses engine names, returning them in canonical column order.
pub fn parse_engines<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Vec<Method>, ConfigError> {
    let mut engines = Vec::new();
    for (i, name) in names.into_iter().enumerate() {
        let m: Method = name
            .trim()
            .parse()
            .map_err(|_| schema(format!("engines[{i}]"), format!("unknown engine `{name}`")))?;
        engines.push(m);
    }
    if engines.is_empty() {
        return Err(schema("engines", "at least one engine is required"));
    }
    engines.sort();
    engines.dedup();
    Ok(engines)
}

impl RunConfig {
    /// Canonical document for this configuration; [`parse_config`] maps it back to `self`.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        let link = &self.link;
        let _ = writeln!(out, "gamma_th = {}", link.gamma_th());
        match link.amplification() {
            AmplificationPolicy::PaperGain => out.push_str("amplification = \"paper\"\n"),
            AmplificationPolicy::AsymptoticGain => out.push_str("amplification = \"asymptotic\"\n"),
            AmplificationPolicy::FixedGains(g) => {
                out.push_str("amplification = \"fixed\"\n");
                let _ = writeln!(out, "gains = {}", list(g.iter()));
            }
        }
        let names: Vec<String> = self.engines.iter().map(|m| format!("\"{}\"", m.name())).collect();
        let _ = writeln!(out, "engines = [{}]", names.join(", "));
        if let Some(p) = &self.output {
            let _ = writeln!(out, "output = {:?}", p.display().to_string());
        }
        let s = &self.sweep;
        let _ = write!(
            out,
            "\n[sweep]\nstart_db = {}\nstop_db = {}\nstep_db = {}\n",
            s.start_db, s.stop_db, s.step_db
        );
        let _ = write!(out, "\n[mc]\ntrials = {}\nseed = {}\n", self.mc.trials, self.mc.seed);
        let _ = write!(out, "\n[expansion]\norders = {}\n", list(self.expansion.orders.iter()));
        match self.expansion.placement {
            ContourPlacement::RightOfOrigin => out.push_str("placement = \"right\"\n"),
            ContourPlacement::LeftOfPoles { kappa_offset } => {
                let _ = writeln!(out, "placement = \"left\"\nkappa = {kappa_offset}");
            }
        }
        for hop in link.hops() {
            let (name, value) = match hop.fading {
                FadingModel::Nakagami { m, .. } | FadingModel::Weibull { m, .. } => ("m", m),
                FadingModel::Rician { k, .. } => ("k", k),
                FadingModel::Hoyt { q, .. } => ("q", q),
            };
            let _ = write!(
                out,
                "\n[[hop]]\nfamily = \"{}\"\n{name} = {value}\ntheta = {}\nrho = {}\n",
                hop.fading.family(),
                hop.fading.theta(),
                hop.rho
            );
        }
        out
    }
}

fn list<T: std::fmt::Display>(items: impl Iterator<Item = T>) -> String {
    let parts: Vec<String> = items.map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[sweep]
start_db = 0
stop_db = 10
step_db = 5

[[hop]]
family = "nakagami"
m = 1
theta = 1

[[hop]]
family = "hoyt"
q = 0.5
theta = 2
rho = 0.5
"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.link.gamma_th(), 1.0);
        assert_eq!(cfg.engines, Method::ALL.to_vec());
        assert_eq!(cfg.expansion.orders, vec![2]);
        assert_eq!(cfg.mc.trials, DEFAULT_TRIALS);
        assert_eq!(cfg.sweep.grid_db(), vec![0.0, 5.0, 10.0]);
        assert!(cfg.warnings.is_empty());
    }

    #[test]
    fn first_rho_is_forced_to_one() {
        let text = MINIMAL.replacen("theta = 1\n", "theta = 1\nrho = 3\n", 1);
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.link.hops()[0].rho, 1.0);
        assert_eq!(cfg.warnings.len(), 1);
    }

    #[test]
    fn hoyt_q_zero_names_the_field() {
        let err = parse_config(&MINIMAL.replace("q = 0.5", "q = 0")).unwrap_err();
        match err {
            ConfigError::Range { path, .. } => assert_eq!(path, "hop[1].q"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = parse_config(&MINIMAL.replace("theta = 2", "theta = \"two\"")).unwrap_err();
        assert!(
            matches!(&err, ConfigError::Schema { path, .. } if path == "hop[1].theta"),
            "{err}"
        );
        let err = parse_config(&MINIMAL.replace("family = \"hoyt\"", "family = \"rayleigh\"")).unwrap_err();
        assert!(
            matches!(&err, ConfigError::Schema { path, .. } if path == "hop[1].family"),
            "{err}"
        );
        let err = parse_config(&MINIMAL.replace("q = 0.5", "m = 0.5")).unwrap_err();
        assert!(
            matches!(&err, ConfigError::Schema { path, .. } if path == "hop[1].m"),
            "{err}"
        );
        let err = parse_config(&format!("colour = 1\n{MINIMAL}")).unwrap_err();
        assert!(matches!(&err, ConfigError::Schema { .. }), "{err}");
    }

    #[test]
    fn sweep_bounds() {
        let err = parse_config(&MINIMAL.replace("stop_db = 10", "stop_db = -1")).unwrap_err();
        assert!(matches!(&err, ConfigError::Range { path, .. } if path == "sweep.stop_db"));
        let err = parse_config(&MINIMAL.replace("step_db = 5", "step_db = 0")).unwrap_err();
        assert!(matches!(&err, ConfigError::Range { path, .. } if path == "sweep.step_db"));
        let single = parse_config(&MINIMAL.replace("stop_db = 10", "stop_db = 0")).unwrap();
        assert_eq!(single.sweep.grid_db(), vec![0.0]);
    }

    #[test]
    fn engines_are_canonicalised() {
        let text = format!("engines = [\"mc\", \"contour\", \"contour\"]\n{MINIMAL}");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.engines, vec![Method::Contour, Method::MonteCarlo]);
        let err = parse_config(&format!("engines = []\n{MINIMAL}")).unwrap_err();
        assert!(matches!(err, ConfigError::Schema { .. }));
    }

    #[test]
    fn fixed_gains_need_one_per_relay() {
        let text = format!("amplification = \"fixed\"\ngains = [1, 2]\n{MINIMAL}");
        assert!(matches!(parse_config(&text), Err(ConfigError::Range { path, .. }) if path == "gains"));
        let text = format!("amplification = \"fixed\"\ngains = [0.5]\n{MINIMAL}");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.link.amplification(), &AmplificationPolicy::FixedGains(vec![0.5]));
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = format!(
            "amplification = \"fixed\"\ngains = [0.5]\noutput = \"x.csv\"\n{MINIMAL}\n[mc]\nseed = 9\n\n[expansion]\nplacement = \"left\"\nkappa = 0.25\n"
        );
        let cfg = parse_config(&text).unwrap();
        let canon = cfg.to_toml();
        let again = parse_config(&canon).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_toml(), canon);
    }
}
