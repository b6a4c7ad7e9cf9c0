//! The ev-MOGA loop: main population, epsilon archive and auxiliary
//! offspring population.

use std::time::Instant;

use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::archive::{dominates, EpsArchive, MinimizedObjectives, MAX_N_BOX};
use crate::error::{Error, Result};
use crate::hypervolume::hypervolume;
use crate::market_data::AssetUniverse;
use crate::portfolio::{evaluate_weights, random_portfolio, repair, Bounds, ObjectiveVector, Portfolio};

/// Algorithm parameters. Defaults are the published experiment settings.
///
/// `p_cm` is compared against a uniform draw `u`: `u > p_cm` selects
/// crossover and `u <= p_cm` mutation, so it is effectively the mutation rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvMogaConfig {
    pub nind_p: usize,
    pub nind_ga: usize,
    pub k_max: u64,
    pub p_cm: f64,
    pub n_box: u32,
    pub seed: u64,
    /// Extension `d` of the recombination segment: `alpha ~ U[-d, 1 + d]`.
    pub recomb_extension: f64,
    /// Mutation standard deviation as a fraction of each weight's range.
    pub mutation_scale: f64,
    /// Iterations between checkpoints. `None` means `k_max / 10`; `0` keeps
    /// only the initial and final checkpoints.
    pub checkpoint_every: Option<u64>,
}

impl Default for EvMogaConfig {
    fn default() -> Self {
        EvMogaConfig {
            nind_p: 10_000,
            nind_ga: 500,
            k_max: 100_000,
            p_cm: 0.2,
            n_box: 300,
            seed: 0,
            recomb_extension: 0.25,
            mutation_scale: 0.1,
            checkpoint_every: None,
        }
    }
}

impl EvMogaConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(m));
        if self.nind_p == 0 {
            return fail("nind_p must be at least 1".into());
        }
        if self.nind_ga == 0 || !self.nind_ga.is_multiple_of(2) {
            return fail(format!("nind_ga must be a positive even number, got {}", self.nind_ga));
        }
        if !(0.0..=1.0).contains(&self.p_cm) {
            return fail(format!("p_cm must lie in [0, 1], got {}", self.p_cm));
        }
        if self.n_box == 0 || self.n_box > MAX_N_BOX {
            return fail(format!("n_box must be in 1..={MAX_N_BOX}, got {}", self.n_box));
        }
        if !(self.recomb_extension >= 0.0 && self.recomb_extension.is_finite()) {
            return fail(format!("recomb_extension must be >= 0, got {}", self.recomb_extension));
        }
        if !(self.mutation_scale > 0.0 && self.mutation_scale.is_finite()) {
            return fail(format!("mutation_scale must be > 0, got {}", self.mutation_scale));
        }
        Ok(())
    }

    /// Resolved checkpoint period; `0` disables periodic checkpoints.
    pub fn checkpoint_period(&self) -> u64 {
        self.checkpoint_every.unwrap_or((self.k_max / 10).max(1))
    }
}

/// Archive summary recorded during a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Completed iterations; 0 is the state right after initialization.
    pub iteration: u64,
    pub evaluations: u64,
    pub archive_size: usize,
    /// Minimized objectives of the risk, return and carbon anchors.
    pub anchors: [[f64; 3]; 3],
    /// Hypervolume with the grid's upper corner as reference point.
    pub hypervolume: f64,
}

impl Checkpoint {
    fn of(archive: &EpsArchive, iteration: u64, evaluations: u64) -> Self {
        let anchors = archive
            .anchors()
            .map(|a| a.map(|e| e.minimized().0))
            .unwrap_or([[f64::NAN; 3]; 3]);
        Checkpoint {
            iteration,
            evaluations,
            archive_size: archive.len(),
            anchors,
            hypervolume: archive_hypervolume(archive),
        }
    }
}

/// Hypervolume of the archive against its grid's `f_max`.
pub fn archive_hypervolume(archive: &EpsArchive) -> f64 {
    match archive.grid() {
        None => 0.0,
        Some(g) => {
            let pts: Vec<[f64; 3]> = archive.entries().iter().map(|e| e.minimized().0).collect();
            hypervolume(&pts, g.f_max())
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub archive: EpsArchive,
    pub iterations_done: u64,
    pub evaluations: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub wall_time_secs: f64,
}

/// Child of extended linear recombination for a given `alpha`, repaired.
pub fn recombine(x1: &[f64], x2: &[f64], alpha: f64, bounds: &Bounds) -> Result<Portfolio> {
    let raw: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a + alpha * (b - a)).collect();
    repair(&raw, bounds)
}

/// Extended linear recombination: two children with independent
/// `alpha ~ U[-d, 1 + d]`.
pub fn crossover<R: Rng + ?Sized>(
    x1: &Portfolio,
    x2: &Portfolio,
    d: f64,
    bounds: &Bounds,
    rng: &mut R,
) -> Result<(Portfolio, Portfolio)> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionMismatch {
            context: "crossover parents",
            expected: x1.len(),
            actual: x2.len(),
        });
    }
    let alpha = Uniform::new_inclusive(-d, 1.0 + d)
        .map_err(|e| Error::InvalidConfig(format!("recombination extension {d}: {e}")))?;
    let a1 = alpha.sample(rng);
    let a2 = alpha.sample(rng);
    Ok((
        recombine(x1.weights(), x2.weights(), a1, bounds)?,
        recombine(x1.weights(), x2.weights(), a2, bounds)?,
    ))
}

/// Gaussian mutation with per-weight standard deviation
/// `scale * (upper - lower)`, followed by repair.
pub fn mutate<R: Rng + ?Sized>(x: &Portfolio, scale: f64, bounds: &Bounds, rng: &mut R) -> Result<Portfolio> {
    let raw: Vec<f64> = x
        .weights()
        .iter()
        .zip(bounds.lower().iter().zip(bounds.upper()))
        .map(|(w, (l, u))| {
            let z: f64 = StandardNormal.sample(rng);
            w + z * scale * (u - l)
        })
        .collect();
    repair(&raw, bounds)
}

struct Member {
    portfolio: Portfolio,
    objectives: ObjectiveVector,
}

fn evaluate_member(p: Portfolio, universe: &AssetUniverse) -> Result<Member> {
    let objectives = evaluate_weights(p.weights(), universe)?;
    Ok(Member {
        portfolio: p,
        objectives,
    })
}

/// Runs the algorithm without progress reporting.
pub fn run(universe: &AssetUniverse, bounds: &Bounds, cfg: &EvMogaConfig) -> Result<RunResult> {
    run_with_progress(universe, bounds, cfg, &mut |_, _| {})
}

/// Runs the algorithm, calling `progress` at every checkpoint with the
/// checkpoint and the archive at that moment.
pub fn run_with_progress(
    universe: &AssetUniverse,
    bounds: &Bounds,
    cfg: &EvMogaConfig,
    progress: &mut dyn FnMut(&Checkpoint, &EpsArchive),
) -> Result<RunResult> {
    cfg.validate()?;
    if bounds.len() != universe.n_assets() {
        return Err(Error::DimensionMismatch {
            context: "bounds vs instance",
            expected: universe.n_assets(),
            actual: bounds.len(),
        });
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut population = Vec::with_capacity(cfg.nind_p);
    for _ in 0..cfg.nind_p {
        population.push(evaluate_member(random_portfolio(bounds, &mut rng), universe)?);
    }
    let mut archive = EpsArchive::new(cfg.n_box)?;
    for m in &population {
        archive.try_insert(m.portfolio.clone(), m.objectives);
    }
    let mut evaluations = cfg.nind_p as u64;
    let period = cfg.checkpoint_period();
    let mut checkpoints = vec![Checkpoint::of(&archive, 0, evaluations)];
    progress(&checkpoints[0], &archive);

    let mut offspring: Vec<Portfolio> = Vec::with_capacity(cfg.nind_ga);
    for k in 1..=cfg.k_max {
        offspring.clear();
        for _ in 0..cfg.nind_ga / 2 {
            let x1 = &population[rng.random_range(0..cfg.nind_p)].portfolio;
            let x2 = if archive.is_empty() {
                &population[rng.random_range(0..cfg.nind_p)].portfolio
            } else {
                archive.entries()[rng.random_range(0..archive.len())].portfolio()
            };
            let u: f64 = rng.random();
            if u > cfg.p_cm {
                let (c1, c2) = crossover(x1, x2, cfg.recomb_extension, bounds, &mut rng)?;
                offspring.push(c1);
                offspring.push(c2);
            } else {
                let c1 = mutate(x1, cfg.mutation_scale, bounds, &mut rng)?;
                let c2 = mutate(x2, cfg.mutation_scale, bounds, &mut rng)?;
                offspring.push(c1);
                offspring.push(c2);
            }
        }
        let children = offspring
            .drain(..)
            .map(|p| evaluate_member(p, universe))
            .collect::<Result<Vec<_>>>()?;
        for c in &children {
            archive.try_insert(c.portfolio.clone(), c.objectives);
        }
        for c in children {
            let j = rng.random_range(0..cfg.nind_p);
            let gc = MinimizedObjectives::from(c.objectives);
            if dominates(&gc, &MinimizedObjectives::from(population[j].objectives)) {
                population[j] = c;
            }
        }
        evaluations += cfg.nind_ga as u64;
        if k == cfg.k_max || (period > 0 && k % period == 0) {
            let cp = Checkpoint::of(&archive, k, evaluations);
            progress(&cp, &archive);
            checkpoints.push(cp);
        }
    }

    Ok(RunResult {
        archive,
        iterations_done: cfg.k_max,
        evaluations,
        checkpoints,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
