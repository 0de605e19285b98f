//! Sweep configuration: a single JSON document, optionally overridden field by
//! field from the command line.
//!
//! ```json
//! {
//!   "channels": [{"pi": [0.9, 0.05, 0.03, 0.02]}, {"preset": {"name": "dephasing", "strength": 0.7}}],
//!   "grid": {"family": "depolarizing", "from": 0.0, "to": 1.0, "step": 0.01},
//!   "random_channels": 200,
//!   "n_values": {"from": 2, "to": 6},
//!   "cuts": "all",
//!   "oracle": false,
//!   "out": "rows.csv",
//!   "format": "csv",
//!   "seed": 42,
//!   "workers": 4
//! }
//! ```
//!
//! Channels are enumerated in the order: `channels`, top-level `pi`/`preset`,
//! `grid`, then `random_channels` draws.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelFamily, PauliChannel};
use crate::error::{Error, Result};
use crate::oracle::N_MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetSpec {
    pub name: String,
    pub strength: f64,
}

/// One channel, either as raw probabilities or as a named preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ChannelSpec {
    Pi { pi: [f64; 4] },
    Preset { preset: PresetSpec },
}

impl ChannelSpec {
    pub fn resolve(&self) -> Result<PauliChannel> {
        match self {
            ChannelSpec::Pi { pi } => PauliChannel::new(*pi),
            ChannelSpec::Preset { preset } => {
                PauliChannel::preset_by_name(&preset.name, preset.strength)
            }
        }
    }
}

/// `family` at strengths `from, from + step, ..., to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub family: ChannelFamily,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn strengths(&self) -> Result<Vec<f64>> {
        if self.step.is_nan() || self.step <= 0.0 || !self.from.is_finite() || !self.to.is_finite() || self.to < self.from {
            return Err(Error::Config(format!(
                "grid needs from <= to and step > 0 (got {} .. {} step {})",
                self.from, self.to, self.step
            )));
        }
        let count = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        if count > 10_000_000 {
            return Err(Error::Config(format!("grid has {count} points")));
        }
        Ok((0..count)
            .map(|i| (self.from + i as f64 * self.step).clamp(0.0, 1.0))
            .collect())
    }

    pub fn channels(&self) -> Result<Vec<PauliChannel>> {
        self.strengths()?
            .into_iter()
            .map(|s| PauliChannel::preset(self.family, s))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NValues {
    List(Vec<u64>),
    Range { from: u64, to: u64 },
}

impl NValues {
    pub fn values(&self) -> Vec<u64> {
        match self {
            NValues::List(v) => v.clone(),
            NValues::Range { from, to } => (*from..=*to).collect(),
        }
    }

    /// Parses `"8"`, `"2,3,5"` or `"2..6"` (inclusive).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse N values from `{s}`"));
        if let Some((a, b)) = s.split_once("..") {
            let from = a.trim().parse().map_err(|_| bad())?;
            let to = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            return Ok(NValues::Range { from, to });
        }
        s.split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()
            .map(NValues::List)
    }
}

/// Which cuts produce rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutSelection {
    /// Every `k` in `1..=N/2`.
    All,
    /// One row per `(channel, N)` at the smallest entangled cut (or `N/2`
    /// when none is entangled).
    MinOnly,
    List(Vec<u64>),
}

impl CutSelection {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(CutSelection::All),
            "min-only" | "min" => Ok(CutSelection::MinOnly),
            other => other
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Config(format!("bad cut list `{s}`")))
                })
                .collect::<Result<Vec<_>>>()
                .map(CutSelection::List),
        }
    }

    pub fn ks(&self, n: u64, min_k: Option<u64>) -> Vec<u64> {
        match self {
            CutSelection::All => (1..=n / 2).collect(),
            CutSelection::MinOnly => vec![min_k.unwrap_or(n / 2)],
            CutSelection::List(ks) => ks.clone(),
        }
    }
}

impl Serialize for CutSelection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CutSelection::All => s.serialize_str("all"),
            CutSelection::MinOnly => s.serialize_str("min-only"),
            CutSelection::List(ks) => ks.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for CutSelection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            List(Vec<u64>),
        }
        match Raw::deserialize(d)? {
            Raw::Name(s) => CutSelection::parse(&s).map_err(serde::de::Error::custom),
            Raw::List(ks) => Ok(CutSelection::List(ks)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("unknown format `{s}`"))),
        }
    }
}

fn default_cuts() -> CutSelection {
    CutSelection::All
}

/// The configuration document as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub channels: Vec<ChannelSpec>,
    #[serde(default)]
    pub pi: Option<[f64; 4]>,
    #[serde(default)]
    pub preset: Option<PresetSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub random_channels: Option<usize>,
    #[serde(default)]
    pub n_values: Option<NValues>,
    #[serde(default = "default_cuts")]
    pub cuts: CutSelection,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            channels: Vec::new(),
            pi: None,
            preset: None,
            grid: None,
            random_channels: None,
            n_values: None,
            cuts: CutSelection::All,
            oracle: false,
            out: None,
            format: OutputFormat::Csv,
            seed: 0,
            workers: None,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn has_channel_source(&self) -> bool {
        !self.channels.is_empty()
            || self.pi.is_some()
            || self.preset.is_some()
            || self.grid.is_some()
            || self.random_channels.is_some()
    }

    /// Validates the document and expands every generator.
    pub fn resolve(&self) -> Result<ResolvedSweep> {
        let mut channels = Vec::new();
        for spec in &self.channels {
            channels.push(spec.resolve()?);
        }
        if let Some(pi) = self.pi {
            channels.push(PauliChannel::new(pi)?);
        }
        if let Some(p) = &self.preset {
            channels.push(PauliChannel::preset_by_name(&p.name, p.strength)?);
        }
        if let Some(grid) = &self.grid {
            channels.extend(grid.channels()?);
        }
        if let Some(count) = self.random_channels {
            channels.extend(random_channels(count, self.seed));
        }
        if channels.is_empty() {
            return Err(Error::Config("no channels given".into()));
        }
        let n_values = self
            .n_values
            .as_ref()
            .map(NValues::values)
            .ok_or_else(|| Error::Config("no N values given".into()))?;
        if n_values.is_empty() {
            return Err(Error::Config("empty N list".into()));
        }
        if let Some(&n) = n_values.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("N = {n} is below 2")));
        }
        let max_n = *n_values.iter().max().unwrap();
        if self.oracle && max_n as usize > N_MAX {
            return Err(Error::SizeTooLarge {
                n: max_n as usize,
                max: N_MAX,
            });
        }
        if let CutSelection::List(ks) = &self.cuts {
            let min_n = *n_values.iter().min().unwrap();
            if ks.is_empty() {
                return Err(Error::Config("empty cut list".into()));
            }
            if let Some(&k) = ks.iter().find(|&&k| k < 1 || k > min_n / 2) {
                return Err(Error::InvalidCut { n: min_n, k });
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(ResolvedSweep {
            channels,
            n_values,
            cuts: self.cuts.clone(),
            oracle: self.oracle,
            workers: self.workers,
        })
    }
}

/// A validated sweep ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSweep {
    pub channels: Vec<PauliChannel>,
    pub n_values: Vec<u64>,
    pub cuts: CutSelection,
    pub oracle: bool,
    pub workers: Option<usize>,
}

/// `count` channels drawn uniformly from the probability simplex.
pub fn random_channels(count: usize, seed: u64) -> Vec<PauliChannel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            // flat Dirichlet via normalized exponentials
            let w: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln());
            let s: f64 = w.iter().sum();
            PauliChannel::new(w.map(|x| x / s)).expect("normalized weights")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_document() {
        let cfg = SweepConfig::from_json(
            r#"{
                "channels": [{"pi": [0.9, 0.05, 0.03, 0.02]},
                             {"preset": {"name": "dephasing", "strength": 0.7}}],
                "grid": {"family": "depolarizing", "from": 0.0, "to": 1.0, "step": 0.25},
                "random_channels": 3,
                "n_values": {"from": 2, "to": 4},
                "cuts": [1],
                "seed": 9
            }"#,
        )
        .unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.channels.len(), 2 + 5 + 3);
        assert_eq!(r.n_values, vec![2, 3, 4]);
        assert_eq!(r.cuts, CutSelection::List(vec![1]));
        assert_eq!(r.channels[6], PauliChannel::identity());
    }

    #[test]
    fn top_level_channel_keys() {
        let cfg = SweepConfig::from_json(r#"{"pi": [1, 0, 0, 0], "n_values": [3]}"#).unwrap();
        assert_eq!(cfg.resolve().unwrap().channels, vec![PauliChannel::identity()]);
        let cfg = SweepConfig::from_json(
            r#"{"preset": {"name": "depolarizing", "strength": 1.0}, "n_values": [3], "cuts": "min-only"}"#,
        )
        .unwrap();
        assert_eq!(cfg.cuts, CutSelection::MinOnly);
    }

    #[test]
    fn rejects_bad_documents() {
        let bad = [
            r#"{"n_values": [3]}"#,
            r#"{"pi": [0.5, 0.6, 0, 0], "n_values": [3]}"#,
            r#"{"pi": [1, 0, 0, 0], "n_values": [1]}"#,
            r#"{"pi": [1, 0, 0, 0], "n_values": [12], "oracle": true}"#,
            r#"{"pi": [1, 0, 0, 0], "n_values": [4, 6], "cuts": [3]}"#,
            r#"{"pi": [1, 0, 0, 0], "n_values": [4], "bogus": 1}"#,
            r#"{"preset": {"name": "amplitude", "strength": 0.5}, "n_values": [4]}"#,
        ];
        for text in bad {
            let res = SweepConfig::from_json(text).and_then(|c| c.resolve());
            assert!(res.is_err(), "accepted {text}");
        }
    }

    #[test]
    fn grid_endpoints() {
        let g = GridSpec {
            family: ChannelFamily::Depolarizing,
            from: 0.0,
            to: 1.0,
            step: 0.01,
        };
        let s = g.strengths().unwrap();
        assert_eq!(s.len(), 101);
        assert!((s[100] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn n_value_syntax() {
        assert_eq!(NValues::parse("2..6").unwrap().values(), vec![2, 3, 4, 5, 6]);
        assert_eq!(NValues::parse("2..=3").unwrap().values(), vec![2, 3]);
        assert_eq!(NValues::parse("4, 8").unwrap().values(), vec![4, 8]);
        assert!(NValues::parse("x").is_err());
    }

    #[test]
    fn random_channels_are_reproducible() {
        assert_eq!(random_channels(5, 11), random_channels(5, 11));
        assert_ne!(random_channels(5, 11), random_channels(5, 12));
    }
}
