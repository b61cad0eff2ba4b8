//! Parameter sets shipped with the binary; the files live in `presets/`.

use crate::config::{parse_config, ConfigError, RunConfig};

/// `(name, document)` pairs in display order.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../../../presets/fig2.toml")),
    ("fig3", include_str!("../../../presets/fig3.toml")),
    ("fig4", include_str!("../../../presets/fig4.toml")),
    ("fig5", include_str!("../../../presets/fig5.toml")),
    ("fig6", include_str!("../../../presets/fig6.toml")),
    ("fig6-n2", include_str!("../../../presets/fig6-n2.toml")),
    ("fig6-n3", include_str!("../../../presets/fig6-n3.toml")),
    ("fig7", include_str!("../../../presets/fig7.toml")),
    ("fig7-n2", include_str!("../../../presets/fig7-n2.toml")),
    ("fig7-n3", include_str!("../../../presets/fig7-n3.toml")),
    ("fig8", include_str!("../../../presets/fig8.toml")),
    ("fig8-n2", include_str!("../../../presets/fig8-n2.toml")),
    ("fig8-n3", include_str!("../../../presets/fig8-n3.toml")),
    ("fig9", include_str!("../../../presets/fig9.toml")),
];

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn load_preset(name: &str) -> Result<RunConfig, ConfigError> {
    let text = preset_text(name).ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))?;
    parse_config(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use afrelay::FadingModel;

    /// Preset documents are stored in canonical form, so stripping comments
    /// must give back exactly what the writer produces.
    #[test]
    fn presets_round_trip_byte_for_byte() {
        for (name, text) in PRESETS {
            let cfg = parse_config(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            let body: String = text
                .lines()
                .filter(|l| !l.starts_with('#'))
                .map(|l| format!("{l}\n"))
                .collect();
            assert_eq!(cfg.to_toml(), body, "{name}");
            assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg, "{name}");
            assert!(cfg.warnings.is_empty(), "{name}");
        }
    }

    #[test]
    fn fig2_is_three_nakagami_hops() {
        let cfg = load_preset("fig2").unwrap();
        let hops = cfg.link.hops();
        assert_eq!(hops.len(), 3);
        for (n, hop) in hops.iter().enumerate() {
            assert_eq!(
                hop.fading,
                FadingModel::Nakagami {
                    m: (n + 1) as f64,
                    theta: 1.0
                }
            );
            assert_eq!(hop.rho, 1.0);
        }
        assert_eq!(cfg.link.gamma_th(), 1.0);
        assert_eq!(cfg.sweep.grid_db().len(), 17);
    }

    #[test]
    fn fig9_mixes_all_families() {
        let cfg = load_preset("fig9").unwrap();
        let fading: Vec<_> = cfg.link.hops().iter().map(|h| h.fading).collect();
        assert_eq!(
            fading,
            vec![
                FadingModel::Nakagami { m: 2.0, theta: 0.5 },
                FadingModel::Weibull { m: 1.5, theta: 1.0 },
                FadingModel::Rician { k: 3.0, theta: 1.5 },
                FadingModel::Hoyt { q: 0.75, theta: 2.0 },
            ]
        );
        let rho: Vec<f64> = cfg.link.rhos();
        assert_eq!(rho, vec![1.0, 0.9, 0.8, 0.7]);
    }

    #[test]
    fn unknown_preset() {
        assert_eq!(load_preset("fig1"), Err(ConfigError::UnknownPreset("fig1".into())));
    }
}
