//! Steady-state genetic search for pairing circuits.
//!
//! A chromosome is a fixed-length list of CSWAP genes over `d` ancillas
//! and `m` registers. Its cost is the number of register pairs the
//! induced labeling fails to cover; cost 0 means the circuit pairs every
//! pair of inputs and is a valid pairing unitary.
//!
//! Each iteration replaces two random individuals with the offspring of
//! the two fittest, so good genes spread while the population size stays
//! fixed. The random-draw order per iteration is part of the contract
//! (it makes runs reproducible across refactors): crossover pivot, then
//! mutation of offspring A, mutation of offspring B, then the two victim
//! indices. Every mutation consumes exactly one probability draw, plus a
//! position draw and one gene (three draws) when it fires.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, Layout};
use crate::error::{Error, Result};
use crate::permlab::ENUMERATION_CAP;
use crate::rng::{derive_seed, rng_from};

/// One CSWAP: control ancilla and two distinct target registers (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gene {
    pub ancilla: u8,
    pub x: u8,
    pub y: u8,
}

/// A fixed-length CSWAP list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chromosome {
    pub genes: Vec<Gene>,
}

impl Chromosome {
    /// Renders the chromosome as a pairing circuit: a Hadamard on each of
    /// the `d` ancillas, then the CSWAPs in gene order.
    pub fn to_circuit(&self, m: usize, q: usize, d: usize) -> Result<Circuit> {
        validate_genes(&self.genes, m, d)?;
        let mut circuit = Circuit::new(Layout::new(m, q, d, false)?);
        for a in 0..d {
            circuit.append(Gate::H { a })?;
        }
        for g in &self.genes {
            circuit.append(Gate::CSwap {
                a: g.ancilla as usize,
                x: g.x as usize,
                y: g.y as usize,
            })?;
        }
        Ok(circuit)
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

/// Extracts the CSWAP list of a pairing circuit as a chromosome.
///
/// Hadamards are dropped (the chromosome encoding implies them); test
/// gates are rejected.
pub fn chromosome_from_circuit(circuit: &Circuit) -> Result<Chromosome> {
    let mut genes = Vec::new();
    for gate in &circuit.gates {
        match *gate {
            Gate::H { .. } => {}
            Gate::CSwap { a, x, y } => genes.push(Gene {
                ancilla: a as u8,
                x: x as u8,
                y: y as u8,
            }),
            Gate::CSwapTest { .. } | Gate::HTest => return Err(Error::TestGatesPresent),
        }
    }
    Ok(Chromosome { genes })
}

fn validate_genes(genes: &[Gene], m: usize, d: usize) -> Result<()> {
    for (i, g) in genes.iter().enumerate() {
        if g.ancilla as usize >= d {
            return Err(Error::InvalidArgument(format!(
                "gene {}: ancilla a{} exceeds the {d} available",
                i + 1,
                g.ancilla + 1
            )));
        }
        if g.x as usize >= m || g.y as usize >= m {
            return Err(Error::InvalidArgument(format!(
                "gene {}: register index out of range for m = {m}",
                i + 1
            )));
        }
        if g.x == g.y {
            return Err(Error::InvalidArgument(format!(
                "gene {}: targets must be distinct registers",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Search-problem and algorithm parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    /// Registers the circuit must pair.
    pub m: usize,
    /// Genes (CSWAPs) per chromosome.
    pub c: usize,
    /// Ancillas available as controls.
    pub d: usize,
    /// Population size.
    pub population: usize,
    /// Probability of mutating each offspring.
    pub mutation_rate: f64,
    /// Iteration budget.
    pub iterations: u64,
    pub seed: u64,
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least two registers, got m = {}",
                self.m
            )));
        }
        if self.m > 255 {
            return Err(Error::InvalidArgument(format!(
                "gene encoding caps registers at 255, got m = {}",
                self.m
            )));
        }
        if self.c == 0 {
            return Err(Error::InvalidArgument(
                "chromosomes need at least one gene".to_owned(),
            ));
        }
        if self.d == 0 || self.d > ENUMERATION_CAP {
            return Err(Error::InvalidArgument(format!(
                "ancilla count must be in 1..={ENUMERATION_CAP}, got {}",
                self.d
            )));
        }
        if self.population < 4 {
            return Err(Error::InvalidArgument(format!(
                "population must hold at least 4 individuals, got {}",
                self.population
            )));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::InvalidArgument(format!(
                "mutation rate must lie in [0, 1], got {}",
                self.mutation_rate
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidArgument(
                "iteration budget must be positive".to_owned(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one search run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaResult {
    /// Seed the run was configured with.
    pub seed: u64,
    pub best: Chromosome,
    pub best_cost: u32,
    /// Best cost so far after each completed iteration.
    pub cost_trace: Vec<u32>,
    pub iterations_run: u64,
    /// Distinct chromosomes actually evaluated (cache misses).
    pub evaluations: u64,
}

impl GaResult {
    pub fn succeeded(&self) -> bool {
        self.best_cost == 0
    }
}

/// Reused buffers for cost evaluation.
struct Scratch {
    contents: Vec<usize>,
    seen: Vec<u64>,
}

impl Scratch {
    fn new(m: usize) -> Self {
        let pairs = m * (m - 1) / 2;
        Scratch {
            contents: vec![0; m],
            seen: vec![0; pairs.div_ceil(64)],
        }
    }
}

fn pair_index(m: usize, lo: usize, hi: usize) -> usize {
    lo * m - lo * (lo + 1) / 2 + (hi - lo - 1)
}

/// Core cost evaluation: pairs left uncovered by the induced labeling.
///
/// Enumerates all `2^d` ancilla values, replays the gene swaps whose
/// control bit is set, and records which pair of original inputs lands in
/// the first two registers — the same map [`crate::permlab`] builds, in a
/// form tight enough to sit inside the search loop.
fn cost_unchecked(genes: &[Gene], m: usize, d: usize, scratch: &mut Scratch) -> u32 {
    let pairs = m * (m - 1) / 2;
    scratch.seen.iter_mut().for_each(|w| *w = 0);
    let mut covered = 0u32;
    for bits in 0..(1u64 << d) {
        let contents = &mut scratch.contents;
        for (k, slot) in contents.iter_mut().enumerate() {
            *slot = k;
        }
        for g in genes {
            if bits >> g.ancilla & 1 == 1 {
                contents.swap(g.x as usize, g.y as usize);
            }
        }
        let (a, b) = (contents[0], contents[1]);
        let idx = pair_index(m, a.min(b), a.max(b));
        let (word, bit) = (idx / 64, idx % 64);
        if scratch.seen[word] >> bit & 1 == 0 {
            scratch.seen[word] |= 1 << bit;
            covered += 1;
            if covered as usize == pairs {
                break;
            }
        }
    }
    pairs as u32 - covered
}

/// Cost of a chromosome for an `(m, d)` search problem: the number of
/// register pairs its labeling leaves uncovered (0 = valid pairing).
pub fn cost(chromosome: &Chromosome, m: usize, d: usize) -> Result<u32> {
    if !(2..=255).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "register count must be in 2..=255, got {m}"
        )));
    }
    if d == 0 || d > ENUMERATION_CAP {
        return Err(Error::InvalidArgument(format!(
            "ancilla count must be in 1..={ENUMERATION_CAP}, got {d}"
        )));
    }
    validate_genes(&chromosome.genes, m, d)?;
    let mut scratch = Scratch::new(m);
    Ok(cost_unchecked(&chromosome.genes, m, d, &mut scratch))
}

/// One uniformly random gene. Draw order: ancilla, first target, second
/// target (drawn from the remaining registers).
fn random_gene(m: usize, d: usize, rng: &mut impl Rng) -> Gene {
    let ancilla = rng.random_range(0..d) as u8;
    let x = rng.random_range(0..m) as u8;
    let mut y = rng.random_range(0..m - 1) as u8;
    if y >= x {
        y += 1;
    }
    Gene { ancilla, x, y }
}

/// A uniformly random chromosome of `c` genes.
pub fn random_chromosome(c: usize, m: usize, d: usize, rng: &mut impl Rng) -> Chromosome {
    Chromosome {
        genes: (0..c).map(|_| random_gene(m, d, rng)).collect(),
    }
}

/// One-point crossover at `pivot` (1-based, in `1..=c`): offspring A takes
/// the first `pivot - 1` genes of A and the rest of B; offspring B is the
/// mirror image.
pub fn crossover(a: &Chromosome, b: &Chromosome, pivot: usize) -> Result<(Chromosome, Chromosome)> {
    let c = a.genes.len();
    if b.genes.len() != c {
        return Err(Error::InvalidArgument(format!(
            "crossover needs equal lengths, got {c} and {}",
            b.genes.len()
        )));
    }
    if pivot == 0 || pivot > c {
        return Err(Error::InvalidArgument(format!(
            "pivot must lie in 1..={c}, got {pivot}"
        )));
    }
    let cut = pivot - 1;
    let mut left = a.genes[..cut].to_vec();
    left.extend_from_slice(&b.genes[cut..]);
    let mut right = b.genes[..cut].to_vec();
    right.extend_from_slice(&a.genes[cut..]);
    Ok((Chromosome { genes: left }, Chromosome { genes: right }))
}

/// With probability `rate`, replaces one uniformly chosen gene with a
/// fresh random gene. Always consumes exactly one probability draw.
pub fn mutate(
    chromosome: &mut Chromosome,
    rate: f64,
    m: usize,
    d: usize,
    rng: &mut impl Rng,
) {
    let fire = rng.random::<f64>() < rate;
    if fire {
        let pos = rng.random_range(0..chromosome.genes.len());
        chromosome.genes[pos] = random_gene(m, d, rng);
    }
}

/// Runs the steady-state search.
///
/// Stops when the iteration budget is spent or a zero-cost chromosome has
/// been found. The best individual ever seen is tracked outside the
/// population, so it survives even if later replacements overwrite it.
pub fn run_ga(cfg: &GaConfig) -> Result<GaResult> {
    cfg.validate()?;
    let mut rng = rng_from(cfg.seed);
    let mut scratch = Scratch::new(cfg.m);
    let mut memo: HashMap<Vec<Gene>, u32> = HashMap::new();
    let mut evaluations = 0u64;

    let mut eval = |genes: &[Gene], scratch: &mut Scratch, evals: &mut u64| -> u32 {
        if let Some(&c) = memo.get(genes) {
            return c;
        }
        let c = cost_unchecked(genes, cfg.m, cfg.d, scratch);
        memo.insert(genes.to_vec(), c);
        *evals += 1;
        c
    };

    let mut population: Vec<Chromosome> = (0..cfg.population)
        .map(|_| random_chromosome(cfg.c, cfg.m, cfg.d, &mut rng))
        .collect();
    let mut costs: Vec<u32> = population
        .iter()
        .map(|ch| eval(&ch.genes, &mut scratch, &mut evaluations))
        .collect();

    let mut best_idx = 0;
    for (i, &c) in costs.iter().enumerate() {
        if c < costs[best_idx] {
            best_idx = i;
        }
    }
    let mut best = population[best_idx].clone();
    let mut best_cost = costs[best_idx];

    let mut cost_trace = Vec::new();
    let mut iterations_run = 0u64;
    while iterations_run < cfg.iterations && best_cost > 0 {
        // Parents: the two lowest costs, ties broken by population index.
        let (mut i1, mut i2) = if costs[0] <= costs[1] { (0, 1) } else { (1, 0) };
        for i in 2..cfg.population {
            if costs[i] < costs[i1] {
                i2 = i1;
                i1 = i;
            } else if costs[i] < costs[i2] {
                i2 = i;
            }
        }

        let pivot = rng.random_range(1..=cfg.c);
        let (mut off_a, mut off_b) = crossover(&population[i1], &population[i2], pivot)?;
        mutate(&mut off_a, cfg.mutation_rate, cfg.m, cfg.d, &mut rng);
        mutate(&mut off_b, cfg.mutation_rate, cfg.m, cfg.d, &mut rng);
        let cost_a = eval(&off_a.genes, &mut scratch, &mut evaluations);
        let cost_b = eval(&off_b.genes, &mut scratch, &mut evaluations);

        // Victims: uniform, distinct, may hit the parents.
        let v1 = rng.random_range(0..cfg.population);
        let mut v2 = rng.random_range(0..cfg.population - 1);
        if v2 >= v1 {
            v2 += 1;
        }

        if cost_a < best_cost {
            best = off_a.clone();
            best_cost = cost_a;
        }
        if cost_b < best_cost {
            best = off_b.clone();
            best_cost = cost_b;
        }

        population[v1] = off_a;
        costs[v1] = cost_a;
        population[v2] = off_b;
        costs[v2] = cost_b;

        iterations_run += 1;
        cost_trace.push(best_cost);
    }

    Ok(GaResult {
        seed: cfg.seed,
        best,
        best_cost,
        cost_trace,
        iterations_run,
        evaluations,
    })
}

/// Runs `trials` independent searches in parallel, trial `t` seeded with
/// `derive_seed(master_seed, t)`; reproducible and independent of thread
/// count. Returns the full per-trial results, cost traces included.
pub fn run_trials(base: &GaConfig, trials: u64, master_seed: u64) -> Result<Vec<GaResult>> {
    base.validate()?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trial count must be positive".to_owned()));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| {
            run_ga(&GaConfig {
                seed: derive_seed(master_seed, t),
                ..base.clone()
            })
        })
        .collect()
}

/// One trial inside a [`success_rate`] experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub seed: u64,
    pub best_cost: u32,
    pub iterations_run: u64,
    pub succeeded: bool,
}

/// Aggregate outcome of repeated independent searches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessReport {
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    /// Mean iterations among successful trials, if any succeeded.
    pub mean_success_iterations: Option<f64>,
    pub trial_results: Vec<TrialSummary>,
}

/// Runs `trials` independent searches and summarizes the outcomes; see
/// [`run_trials`] for the seeding contract.
pub fn success_rate(base: &GaConfig, trials: u64, master_seed: u64) -> Result<SuccessReport> {
    let trial_results: Vec<TrialSummary> = run_trials(base, trials, master_seed)?
        .into_iter()
        .map(|result| TrialSummary {
            seed: result.seed,
            best_cost: result.best_cost,
            iterations_run: result.iterations_run,
            succeeded: result.succeeded(),
        })
        .collect();

    let successes = trial_results.iter().filter(|t| t.succeeded).count() as u64;
    let mean_success_iterations = if successes > 0 {
        Some(
            trial_results
                .iter()
                .filter(|t| t.succeeded)
                .map(|t| t.iterations_run as f64)
                .sum::<f64>()
                / successes as f64,
        )
    } else {
        None
    };
    Ok(SuccessReport {
        trials,
        successes,
        rate: successes as f64 / trials as f64,
        mean_success_iterations,
        trial_results,
    })
}
