//! Seeded multi-trial execution and fixed-order aggregation.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{run, substream_seed, Algorithm, RunOptions, Schedule, StepRule, Trajectory};
use crate::error::{check_len, Error, Result};
use crate::game::{game_constants, profile_in_sets, AggregativeGame, CournotGame, GameConstants, NoiseModel, Profile};
use crate::harness::config::{ExperimentConfig, GameFile, InitPolicy};
use crate::harness::plot::emit_plot_script;
use crate::harness::results::{write_results, AggregateResult, AggregateRow};
use crate::mirror::Euclidean;
use crate::network::{mixing_constants, GraphSchedule, MixingConstants};
use crate::oracle::{solve_ne, OracleCache, ViSolution, DEFAULT_TOL};

const GRAPH_DOMAIN: u64 = 0x6772_6170_6873;
const NOISE_DOMAIN: u64 = 0x006e_6f69_7365;

/// Everything shared by the trials of one instance.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub game: CournotGame<f64>,
    pub noise: NoiseModel<f64>,
    pub constants: GameConstants<f64>,
    pub schedule: Schedule<f64>,
    pub graphs: GraphSchedule<f64>,
    pub mixing: MixingConstants<f64>,
    pub solution: ViSolution<f64>,
    pub init: Profile<f64>,
}

/// Aggregate table plus per-trial diagnostics that do not go to the CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutcome {
    pub algorithm: Algorithm,
    pub result: AggregateResult,
    /// Largest tracking drift `|Σv − σ(x)|_∞` seen in any trial.
    pub max_tracking_drift: f64,
    /// Gradient samples drawn across all trials.
    pub total_samples: u64,
    pub trials: Vec<Trajectory<f64>>,
}

#[derive(Serialize)]
struct InstanceKey<'a> {
    game: &'a GameFile<f64>,
    tol: f64,
}

impl Experiment {
    /// Builds the instance and topology and solves for the equilibrium once.
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let (game, noise) = config.load_game()?;
        let constants = game_constants(&game, &noise);
        let schedule = Schedule::from_constants(&constants)?;
        let graphs = config.topology.build(game.n_players())?;
        let mixing = mixing_constants(&graphs);
        let solution = solve_cached(&game, &noise, &constants, config.output.oracle_cache.as_deref())?;
        let init = match &config.init {
            InitPolicy::Midpoint => game.midpoint_profile(),
            InitPolicy::Point(p) => {
                check_len(game.n_players(), p.len())?;
                if !profile_in_sets(&game, p) {
                    return Err(Error::Config("initial point outside the strategy sets".into()));
                }
                p.clone()
            }
        };
        Ok(Self {
            config,
            game,
            noise,
            constants,
            schedule,
            graphs,
            mixing,
            solution,
            init,
        })
    }

    pub fn step_rule(&self, algorithm: Algorithm) -> StepRule<f64> {
        match (algorithm, self.config.step_override) {
            (Algorithm::OperatorExtrapolation, _) | (_, None) => StepRule::Decaying(self.schedule),
            (_, Some(a)) => StepRule::Constant(a),
        }
    }

    pub fn graph_seed(&self, trial: usize) -> u64 {
        let base = substream_seed(self.config.seed, GRAPH_DOMAIN);
        if self.config.shared_topology {
            base
        } else {
            substream_seed(base, trial as u64)
        }
    }

    pub fn noise_seed(&self, trial: usize) -> u64 {
        substream_seed(substream_seed(self.config.seed, NOISE_DOMAIN), trial as u64)
    }

    pub fn run_trial(&self, algorithm: Algorithm, trial: usize) -> Result<Trajectory<f64>> {
        let opts = RunOptions {
            iterations: self.config.iterations,
            stride: self.config.stride,
            reference: Some(&self.solution.x_star),
            graph_seed: self.graph_seed(trial),
            noise_seed: self.noise_seed(trial),
        };
        run(
            algorithm,
            &self.game,
            &self.noise,
            &Euclidean,
            &self.step_rule(algorithm),
            &self.graphs,
            self.init.clone(),
            &opts,
        )
    }

    /// Runs every trial (in parallel) and reduces them in trial-index order.
    pub fn run(&self, algorithm: Algorithm) -> Result<ExperimentOutcome> {
        let trials: Vec<Trajectory<f64>> = (0..self.config.trials)
            .into_par_iter()
            .map(|t| self.run_trial(algorithm, t))
            .collect::<Result<_>>()?;
        let result = aggregate_trials(&trials)?;
        Ok(ExperimentOutcome {
            algorithm,
            max_tracking_drift: trials.iter().map(|t| t.max_tracking_drift).fold(0.0, f64::max),
            total_samples: trials.iter().map(|t| t.total_samples).sum(),
            result,
            trials,
        })
    }

    /// `D̂(x_1, x*)` for the shared initial point.
    pub fn initial_bregman(&self) -> f64 {
        crate::algorithms::errors(&Euclidean, &self.init, &self.solution.x_star)
            .map(|(_, b)| b)
            .unwrap_or(f64::NAN)
    }
}

fn solve_cached(
    game: &CournotGame<f64>,
    noise: &NoiseModel<f64>,
    constants: &GameConstants<f64>,
    cache_dir: Option<&Path>,
) -> Result<ViSolution<f64>> {
    let Some(dir) = cache_dir else {
        return solve_ne(game, constants.lip, DEFAULT_TOL);
    };
    let cache = OracleCache::new(dir);
    let file = GameFile::from_game(game, noise);
    let key = OracleCache::key(&InstanceKey { game: &file, tol: DEFAULT_TOL })?;
    if let Some(sol) = cache.load(&key)? {
        return Ok(sol);
    }
    let sol = solve_ne(game, constants.lip, DEFAULT_TOL)?;
    cache.store(&key, &sol)?;
    Ok(sol)
}

/// Means and population standard deviations over trials, row by row.
pub fn aggregate_trials(trials: &[Trajectory<f64>]) -> Result<AggregateResult> {
    let first = trials
        .first()
        .ok_or_else(|| Error::InvalidArgument("no trials to aggregate".into()))?;
    let m = trials.len() as f64;
    let mut rows = Vec::with_capacity(first.rows.len());
    for (r, head) in first.rows.iter().enumerate() {
        let mut sum_sq = 0.0;
        let mut sum_breg = 0.0;
        let mut sum_cons = 0.0;
        let mut max_cons = 0.0f64;
        for t in trials {
            let row = t
                .rows
                .get(r)
                .filter(|row| row.k == head.k)
                .ok_or_else(|| Error::InvalidArgument("trials recorded different iterations".into()))?;
            sum_sq += row.sq_err;
            sum_breg += row.bregman;
            sum_cons += row.consensus;
            max_cons = max_cons.max(row.consensus);
        }
        let mean_sq = sum_sq / m;
        let var = trials
            .iter()
            .map(|t| (t.rows[r].sq_err - mean_sq).powi(2))
            .sum::<f64>()
            / m;
        rows.push(AggregateRow {
            k: head.k,
            mean_sq_err: mean_sq,
            std_sq_err: var.sqrt(),
            mean_bregman: sum_breg / m,
            mean_consensus: sum_cons / m,
            max_consensus: max_cons,
            samples_per_iter: head.samples_per_player,
        });
    }
    Ok(AggregateResult { rows })
}

/// Prepares the configured instance and runs the configured algorithm.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    Experiment::prepare(config.clone())?.run(config.algorithm)
}

/// Paths produced by [`compare`].
#[derive(Clone, Debug, PartialEq)]
pub struct CompareOutput {
    pub csvs: Vec<(Algorithm, PathBuf)>,
    pub script: PathBuf,
    pub outcomes: Vec<ExperimentOutcome>,
}

/// Runs all three methods on one instance, writes `<algo>.csv` for each and a
/// `compare.gp` plot script into `out_dir`.
pub fn compare(config: &ExperimentConfig, out_dir: &Path) -> Result<CompareOutput> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let experiment = Experiment::prepare(config.clone())?;
    let mut csvs = Vec::new();
    let mut outcomes = Vec::new();
    for algorithm in Algorithm::ALL {
        let outcome = experiment.run(algorithm)?;
        let path = out_dir.join(format!("{}.csv", algorithm.name()));
        write_results(&outcome.result, &path)?;
        csvs.push((algorithm, path));
        outcomes.push(outcome);
    }
    let inputs: Vec<(String, PathBuf)> = csvs
        .iter()
        .map(|(a, p)| (a.name().to_string(), PathBuf::from(p.file_name().expect("csv file name"))))
        .collect();
    let script = out_dir.join("compare.gp");
    emit_plot_script(&inputs, &script)?;
    Ok(CompareOutput { csvs, script, outcomes })
}
