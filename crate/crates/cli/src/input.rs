//! JSON input files: channels and distributions.

use anyhow::{anyhow, bail, Context, Result};
use oic_core::{
    canonicalize, normalize, sort_and_merge, BoundedDist, ChannelSpec, DiscreteDist, Kind,
    PiecewiseExpDist, RawChannelSpec,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormalizedFile {
    h: Vec<f64>,
    alpha: Vec<f64>,
    #[serde(default = "unit")]
    sigma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    h_raw: Vec<f64>,
    peaks: Vec<f64>,
    alpha: Vec<f64>,
    #[serde(default = "unit")]
    sigma_raw: f64,
}

fn unit() -> f64 {
    1.0
}

/// A channel read from disk; `peaks` is present for the physical form.
#[derive(Debug, Clone)]
pub struct Channel {
    pub spec: ChannelSpec,
    pub peaks: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum DistFile {
    Discrete {
        support: Vec<f64>,
        masses: Vec<f64>,
    },
    Maxent,
    Pwexp {
        nu0: f64,
        lambdas: Vec<f64>,
        #[serde(default)]
        breakpoints: Option<Vec<f64>>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Deserializes with the path of the offending field in the error.
fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        if field == "." {
            anyhow!("{}: {}", path.display(), e.inner())
        } else {
            anyhow!("{}: field `{field}`: {}", path.display(), e.inner())
        }
    })
}

pub fn load_channel(path: &Path) -> Result<Channel> {
    let text = read(path)?;
    let value: serde_json::Value = parse(path, &text)?;
    let channel = if value.get("h_raw").is_some() {
        let RawFile {
            h_raw,
            peaks,
            alpha,
            sigma_raw,
        } = parse(path, &text)?;
        {
            let raw = RawChannelSpec {
                gains: h_raw,
                peaks: peaks.clone(),
                alpha,
                sigma: sigma_raw,
            };
            Channel {
                spec: normalize(&raw)?,
                peaks: Some(peaks),
            }
        }
    } else {
        let NormalizedFile { h, alpha, sigma } = parse(path, &text)?;
        Channel {
            spec: ChannelSpec::new(h, alpha, sigma)?,
            peaks: None,
        }
    };
    Ok(channel)
}

/// Loads a law of the equivalent input `S` in the channel's own orientation.
///
/// `maxent` is solved on the reduced channel and mapped back; `pwexp` without
/// explicit breakpoints uses the cumulative gains of the channel sorted by
/// decreasing ratio.
pub fn load_dist(path: &Path, spec: &ChannelSpec, kind: Kind) -> Result<BoundedDist> {
    let text = read(path)?;
    let file: DistFile = parse(path, &text)?;
    match file {
        DistFile::Discrete { support, masses } => Ok(DiscreteDist::new(support, masses)?.into()),
        DistFile::Maxent => maxent_law(spec, kind),
        DistFile::Pwexp {
            nu0,
            lambdas,
            breakpoints,
        } => {
            let breakpoints = match breakpoints {
                Some(b) => b,
                None => {
                    let (sorted, _) = sort_and_merge(spec);
                    sorted.cums().to_vec()
                }
            };
            if breakpoints.len() != lambdas.len() + 1 {
                bail!(
                    "field `lambdas`: expected {} entries for {} breakpoints, found {}",
                    breakpoints.len() - 1,
                    breakpoints.len(),
                    lambdas.len()
                );
            }
            let d = PiecewiseExpDist::normalized(breakpoints, lambdas)?;
            if (d.nu0() - nu0).abs() > 1e-3 {
                bail!(
                    "field `nu0`: {nu0} does not normalize the density (expected {:.6})",
                    d.nu0()
                );
            }
            Ok(d.into())
        }
    }
}

/// The max-entropy law for `kind`, expressed for the channel as given.
pub fn maxent_law(spec: &ChannelSpec, kind: Kind) -> Result<BoundedDist> {
    let (canon, red) = canonicalize(spec, kind);
    let sol = oic_core::solve_gamma(&canon, kind)?;
    let d = if red.flipped {
        sol.density.reflect()
    } else {
        sol.density
    };
    Ok(d.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use oic_core::Distribution;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn raw_channel_is_normalized() {
        let f = file(r#"{"h_raw": [4e-6, 1.5e-6, 3e-6], "peaks": [2, 3, 2.5], "alpha": [0.4, 0.1, 0.1], "sigma_raw": 1e-6}"#);
        let ch = load_channel(f.path()).unwrap();
        assert_eq!(ch.peaks.as_deref(), Some(&[2.0, 3.0, 2.5][..]));
        let h = ch.spec.h();
        assert!((h[0] - 0.4).abs() < 1e-12 && (h[1] - 0.225).abs() < 1e-12 && (h[2] - 0.375).abs() < 1e-12);
        assert!((ch.spec.sigma() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn unknown_channel_field_is_reported() {
        let f = file(r#"{"h": [1.0], "alpha": [0.5], "noise": 1}"#);
        let err = load_channel(f.path()).unwrap_err().to_string();
        assert!(err.contains("noise"), "{err}");
    }

    #[test]
    fn pwexp_breakpoints_default_to_sorted_cumulative_gains() {
        let spec = ChannelSpec::new(vec![0.2, 0.8], vec![0.1, 0.5], 1.0).unwrap();
        let want = PiecewiseExpDist::normalized(vec![0.0, 0.8, 1.0], vec![1.0, -2.0]).unwrap();
        let f = file(&format!(r#"{{"type": "pwexp", "nu0": {}, "lambdas": [1.0, -2.0]}}"#, want.nu0()));
        let d = load_dist(f.path(), &spec, Kind::Ec).unwrap();
        assert!((d.mean() - want.mean()).abs() < 1e-14);
        let f = file(r#"{"type": "pwexp", "nu0": 0, "lambdas": [1.0]}"#);
        let err = load_dist(f.path(), &spec, Kind::Ec).unwrap_err().to_string();
        assert!(err.contains("lambdas"), "{err}");
    }

    #[test]
    fn maxent_law_keeps_the_channel_orientation() {
        // alpha above one half on a single antenna reduces through the flip
        let spec = ChannelSpec::new(vec![1.0], vec![0.7], 1.0).unwrap();
        let d = maxent_law(&spec, Kind::Ec).unwrap();
        assert!((d.mean() - 0.7).abs() < 1e-9);
    }
}
