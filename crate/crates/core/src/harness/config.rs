//! File formats for game instances and experiment configurations.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{Algorithm, Stride};
use crate::error::{Error, Result};
use crate::game::{random_instance_with, CournotGame, FirmParams, InstanceParams, MarketParams, NoiseModel, Profile};
use crate::network::{GraphSchedule, ScheduleSpec, SelectionMode};
use crate::scalar::Scalar;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseToggle {
    pub enabled: bool,
}

/// JSON form of a Cournot instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct GameFile<T> {
    pub n_players: usize,
    pub n_markets: usize,
    pub firms: Vec<FirmParams<T>>,
    pub market: MarketParams<T>,
    pub noise: NoiseToggle,
}

impl<T: Scalar> GameFile<T> {
    pub fn from_game(game: &CournotGame<T>, noise: &NoiseModel<T>) -> Self {
        Self {
            n_players: game.firms().len(),
            n_markets: game.n_markets(),
            firms: game.firms().to_vec(),
            market: game.market().clone(),
            noise: NoiseToggle { enabled: noise.enabled },
        }
    }

    /// Validates counts and parameters; noise half-widths are `c_i/8`, `d/8`.
    pub fn into_game(self) -> Result<(CournotGame<T>, NoiseModel<T>)> {
        if self.firms.len() != self.n_players {
            return Err(Error::Config(format!(
                "n_players = {} but {} firms listed",
                self.n_players,
                self.firms.len()
            )));
        }
        if self.market.d.len() != self.n_markets {
            return Err(Error::Config(format!(
                "n_markets = {} but market.d has {} entries",
                self.n_markets,
                self.market.d.len()
            )));
        }
        let game = CournotGame::new(self.firms, self.market)?;
        let noise = NoiseModel::standard(&game, self.noise.enabled);
        Ok((game, noise))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GameSource {
    /// Path to a [`GameFile`]; relative paths resolve against the config file.
    File(PathBuf),
    Random {
        seed: u64,
        #[serde(default = "default_players")]
        n_players: usize,
        #[serde(default = "default_markets")]
        n_markets: usize,
        /// Per-coordinate capacity `[lower, upper]`; `[2, 10]` when omitted.
        #[serde(default = "default_capacity")]
        capacity: (f64, f64),
    },
    Inline(GameFile<f64>),
}

fn default_players() -> usize {
    20
}

fn default_markets() -> usize {
    3
}

fn default_capacity() -> (f64, f64) {
    InstanceParams::default().capacity
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologyConfig {
    /// Four sparse graphs with a connected union.
    FourGraph { mode: SelectionMode, seed: u64 },
    Complete,
    Custom { schedule: ScheduleSpec },
}

impl TopologyConfig {
    pub fn build<T: Scalar>(&self, n: usize) -> Result<GraphSchedule<T>> {
        match self {
            TopologyConfig::FourGraph { mode, seed } => GraphSchedule::four_graph(n, *seed, *mode),
            TopologyConfig::Complete => GraphSchedule::complete(n),
            TopologyConfig::Custom { schedule } => {
                if schedule.n != n {
                    return Err(Error::Config(format!(
                        "topology has {} nodes but the game has {n} players",
                        schedule.n
                    )));
                }
                GraphSchedule::new(schedule.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitPolicy {
    Midpoint,
    Point(Profile<f64>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub oracle_cache: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub game: GameSource,
    pub algorithm: Algorithm,
    pub iterations: u64,
    pub trials: usize,
    pub seed: u64,
    pub topology: TopologyConfig,
    /// Share one graph-draw sequence across trials.
    #[serde(default = "yes")]
    pub shared_topology: bool,
    #[serde(default = "midpoint")]
    pub init: InitPolicy,
    /// Overrides the game's noise flag when set.
    #[serde(default)]
    pub noise: Option<bool>,
    #[serde(default = "euclidean")]
    pub regularizer: String,
    /// Constant step for the PGA and Extra-G baselines.
    #[serde(default)]
    pub step_override: Option<f64>,
    #[serde(default)]
    pub stride: Stride,
    #[serde(default)]
    pub output: OutputConfig,
}

fn yes() -> bool {
    true
}

fn midpoint() -> InitPolicy {
    InitPolicy::Midpoint
}

fn euclidean() -> String {
    "euclidean".into()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            game: GameSource::Random {
                seed: 1,
                n_players: default_players(),
                n_markets: default_markets(),
                capacity: default_capacity(),
            },
            algorithm: Algorithm::OperatorExtrapolation,
            iterations: 10_000,
            trials: 20,
            seed: 0,
            topology: TopologyConfig::FourGraph {
                mode: SelectionMode::Random,
                seed: 0,
            },
            shared_topology: true,
            init: InitPolicy::Midpoint,
            noise: None,
            regularizer: euclidean(),
            step_override: None,
            stride: Stride::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let game_path = match &mut cfg.game {
            GameSource::File(p) => Some(p),
            _ => None,
        };
        for p in [game_path, cfg.output.csv.as_mut(), cfg.output.oracle_cache.as_mut()].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.iterations < 1 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        if self.regularizer != "euclidean" {
            return Err(Error::Config(format!(
                "unsupported regularizer {:?} (only \"euclidean\")",
                self.regularizer
            )));
        }
        if let Some(a) = self.step_override {
            if !(a > 0.0) {
                return Err(Error::Config("step_override must be > 0".into()));
            }
        }
        Ok(())
    }

    /// Loads or draws the game, applying the noise override.
    pub fn load_game(&self) -> Result<(CournotGame<f64>, NoiseModel<f64>)> {
        let (game, mut noise) = match &self.game {
            GameSource::File(path) => GameFile::load(path)?.into_game()?,
            GameSource::Inline(file) => file.clone().into_game()?,
            GameSource::Random { seed, n_players, n_markets, capacity } => {
                if *n_players == 0 || *n_markets == 0 {
                    return Err(Error::Config("random instance needs players and markets".into()));
                }
                random_instance_with(
                    *seed,
                    &InstanceParams {
                        n_players: *n_players,
                        n_markets: *n_markets,
                        capacity: *capacity,
                        ..InstanceParams::default()
                    },
                )?
            }
        };
        if let Some(enabled) = self.noise {
            noise.enabled = enabled;
        }
        Ok((game, noise))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn game_file_schema_round_trip() {
        let text = r#"{
            "n_players": 2, "n_markets": 1,
            "firms": [
                {"c": [3.0], "lower": [2.0], "upper": [10.0]},
                {"c": [3.0], "lower": [2.0], "upper": [10.0]}
            ],
            "market": {"d": [10.0], "b": [1.0]},
            "noise": {"enabled": false}
        }"#;
        let file: GameFile<f64> = serde_json::from_str(text).unwrap();
        let (game, noise) = file.clone().into_game().unwrap();
        assert!(!noise.enabled);
        assert_eq!(GameFile::from_game(&game, &noise), file);
        let v: serde_json::Value = serde_json::to_value(&file).unwrap();
        assert_eq!(v["firms"][1]["upper"][0], 10.0);
        assert_eq!(v["market"]["b"][0], 1.0);
    }

    #[test]
    fn game_file_count_mismatch_is_rejected() {
        let text = r#"{"n_players": 3, "n_markets": 1,
            "firms": [{"c": [3.0], "lower": [2.0], "upper": [10.0]}],
            "market": {"d": [10.0], "b": [1.0]}, "noise": {"enabled": true}}"#;
        let file: GameFile<f64> = serde_json::from_str(text).unwrap();
        assert!(matches!(file.into_game(), Err(Error::Config(_))));
    }

    #[test]
    fn default_config_serializes_and_validates() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert!(text.contains("\"algorithm\": \"oe\""));
    }

    #[test]
    fn malformed_configs_are_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.regularizer = "entropy".into();
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.version = 7;
        assert!(cfg.validate().is_err());
        let bad = r#"{"version": 1, "algorithm": "sgd"}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(bad).is_err());
    }

    #[test]
    fn noise_override_applies() {
        let mut cfg = ExperimentConfig::default();
        cfg.noise = Some(false);
        let (_, noise) = cfg.load_game().unwrap();
        assert!(!noise.enabled);
    }

    #[test]
    fn custom_topology_must_match_player_count() {
        let t = TopologyConfig::Custom {
            schedule: ScheduleSpec {
                n: 3,
                base_graphs: vec![vec![(0, 1), (1, 2)]],
                mode: SelectionMode::Cyclic,
                window: 1,
            },
        };
        assert!(t.build::<f64>(3).is_ok());
        assert!(t.build::<f64>(4).is_err());
    }

    #[test]
    fn relative_paths_resolve_against_the_config_directory() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("cfg");
        fs::create_dir(&sub).unwrap();
        let game = random_instance_with::<f64>(2, &InstanceParams { n_players: 3, n_markets: 1, ..InstanceParams::default() }).unwrap();
        GameFile::from_game(&game.0, &game.1).save(&sub.join("game.json")).unwrap();
        let text = r#"{"version":1,"game":{"file":"game.json"},"algorithm":"pga","iterations":5,"trials":1,"seed":0,
            "topology":{"kind":"complete"},"output":{"csv":"out/r.csv","oracle_cache":"/abs/cache"}}"#;
        fs::write(sub.join("c.json"), text).unwrap();
        let cfg = ExperimentConfig::load(&sub.join("c.json")).unwrap();
        assert_eq!(cfg.game, GameSource::File(sub.join("game.json")));
        assert_eq!(cfg.output.csv, Some(sub.join("out/r.csv")));
        assert_eq!(cfg.output.oracle_cache, Some(PathBuf::from("/abs/cache")));
        assert_eq!(cfg.load_game().unwrap().0, game.0);
    }
}
