//! Binary genetic algorithm with immigration, and the design workflows
//! built on it.
//!
//! Genomes concatenate one fixed-width unsigned field per active variable,
//! most significant bit first. All random draws happen on the coordinating
//! thread from one seeded stream; objective evaluations run in parallel and
//! are merged back in index order, so results do not depend on the thread
//! count.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DesignVector, VARIABLES};
use crate::pipeline::{evaluate, evaluate_for, EvaluationContext, Evaluation, Objective};

pub const REPORT_SCHEMA: &str = "wavedesal.optimization/1";
pub const HISTORY_HEADER: &str = "generation,best,mean,feasible_fraction";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub elites: usize,
    pub tournament_size: usize,
    pub bits_per_variable: u32,
    pub immigration_interval: usize,
    pub immigrant_count: usize,
    pub max_generations: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 400,
            mutation_rate: 0.2,
            crossover_rate: 0.8,
            elites: 1,
            tournament_size: 2,
            bits_per_variable: 8,
            immigration_interval: 50,
            immigrant_count: 300,
            max_generations: 400,
            seed: 0,
        }
    }
}

impl GaConfig {
    /// Small budget keeping the immigrant share at three quarters.
    pub fn desk(population_size: usize, max_generations: usize, seed: u64) -> Self {
        GaConfig {
            population_size,
            immigrant_count: population_size * 3 / 4,
            max_generations,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invalid(format!("GA config: {m}")));
        if self.population_size < 2 {
            return bad("population must hold at least 2 individuals");
        }
        if self.elites >= self.population_size {
            return bad("elites must be fewer than the population");
        }
        if self.immigrant_count + self.elites > self.population_size {
            return bad("immigrants plus elites exceed the population");
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return bad("tournament size out of range");
        }
        if !(1..=32).contains(&self.bits_per_variable) {
            return bad("bits per variable must be 1..=32");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) || !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("rates must lie in [0, 1]");
        }
        if self.max_generations == 0 {
            return bad("need at least one generation");
        }
        Ok(())
    }
}

/// Fixed-width binary encoding of a box.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    pub bounds: Vec<(f64, f64)>,
    pub bits: u32,
}

impl Encoding {
    pub fn new(bounds: Vec<(f64, f64)>, bits: u32) -> Self {
        Encoding { bounds, bits }
    }

    pub fn len(&self) -> usize {
        self.bounds.len() * self.bits as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    fn levels(&self) -> f64 {
        ((1u64 << self.bits) - 1) as f64
    }

    /// Per-variable unsigned codes.
    pub fn codes(&self, genome: &[bool]) -> Vec<u32> {
        assert_eq!(genome.len(), self.len(), "genome length");
        genome
            .chunks(self.bits as usize)
            .map(|c| c.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32))
            .collect()
    }

    pub fn decode(&self, genome: &[bool]) -> Vec<f64> {
        self.codes(genome)
            .into_iter()
            .zip(&self.bounds)
            .map(|(code, &(lo, hi))| {
                if code as f64 == self.levels() {
                    hi
                } else {
                    lo + code as f64 / self.levels() * (hi - lo)
                }
            })
            .collect()
    }

    /// Nearest grid point, clamped into the box.
    pub fn encode(&self, x: &[f64]) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.len());
        for (&xi, &(lo, hi)) in x.iter().zip(&self.bounds) {
            let frac = if hi > lo { ((xi - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
            let code = (frac * self.levels()).round() as u32;
            for b in (0..self.bits).rev() {
                out.push((code >> b) & 1 == 1);
            }
        }
        out
    }

    /// Grid spacing of variable `i`.
    pub fn step(&self, i: usize) -> f64 {
        let (lo, hi) = self.bounds[i];
        (hi - lo) / self.levels()
    }
}

/// Objective value with its feasibility flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub value: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Best value in this generation's population.
    pub best: f64,
    pub mean: f64,
    pub feasible_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaResult {
    pub best_x: Vec<f64>,
    pub best_value: f64,
    pub best_feasible: bool,
    pub history: Vec<GenerationStats>,
    /// Distinct genomes evaluated.
    pub evaluations: usize,
}

pub fn write_history_csv<W: Write>(history: &[GenerationStats], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{HISTORY_HEADER}")?;
    for h in history {
        writeln!(out, "{},{},{},{}", h.generation, h.best, h.mean, h.feasible_fraction)?;
    }
    Ok(())
}

struct Population {
    genomes: Vec<Vec<bool>>,
    scores: Vec<Score>,
}

/// Minimizes `objective` over the box in `encoding`. `initial` points are
/// encoded into the first slots of generation 0.
pub fn ga_run<F>(objective: F, encoding: &Encoding, config: &GaConfig, initial: &[Vec<f64>]) -> Result<GaResult>
where
    F: Fn(&[f64]) -> Score + Sync,
{
    config.validate()?;
    if encoding.bits != config.bits_per_variable {
        return Err(Error::Invalid("encoding width differs from GA config".into()));
    }
    let n = config.population_size;
    let len = encoding.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut cache: HashMap<Vec<bool>, Score> = HashMap::new();

    let mut genomes: Vec<Vec<bool>> = (0..n).map(|_| random_genome(&mut rng, len)).collect();
    for (slot, x) in genomes.iter_mut().zip(initial) {
        *slot = encoding.encode(x);
    }

    let mut best: Option<(Vec<bool>, Score)> = None;
    let mut history = Vec::with_capacity(config.max_generations);

    for generation in 0..config.max_generations {
        let mut pop = Population { scores: score_all(&genomes, &objective, encoding, &mut cache), genomes };

        if generation > 0 && config.immigration_interval > 0 && generation % config.immigration_interval == 0 {
            let order = ranking(&pop.scores);
            let worst = &order[n - config.immigrant_count..];
            for &i in worst {
                pop.genomes[i] = random_genome(&mut rng, len);
            }
            let fresh: Vec<Vec<bool>> = worst.iter().map(|&i| pop.genomes[i].clone()).collect();
            let scores = score_all(&fresh, &objective, encoding, &mut cache);
            for (&i, s) in worst.iter().zip(scores) {
                pop.scores[i] = s;
            }
        }

        let order = ranking(&pop.scores);
        let top = order[0];
        if best.as_ref().is_none_or(|(_, s)| pop.scores[top].value < s.value) {
            best = Some((pop.genomes[top].clone(), pop.scores[top]));
        }
        history.push(GenerationStats {
            generation,
            best: pop.scores[top].value,
            mean: pop.scores.iter().map(|s| s.value).sum::<f64>() / n as f64,
            feasible_fraction: pop.scores.iter().filter(|s| s.feasible).count() as f64 / n as f64,
        });
        if generation + 1 == config.max_generations {
            break;
        }
        genomes = breed(&pop, &order, config, &mut rng);
    }

    let (genome, score) = best.expect("at least one generation ran");
    Ok(GaResult {
        best_x: encoding.decode(&genome),
        best_value: score.value,
        best_feasible: score.feasible,
        history,
        evaluations: cache.len(),
    })
}

fn random_genome(rng: &mut ChaCha8Rng, len: usize) -> Vec<bool> {
    (0..len).map(|_| rng.random::<bool>()).collect()
}

/// Indices sorted by value, ties broken by index.
fn ranking(scores: &[Score]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].value.total_cmp(&scores[b].value).then(a.cmp(&b)));
    order
}

fn score_all<F>(genomes: &[Vec<bool>], objective: &F, encoding: &Encoding, cache: &mut HashMap<Vec<bool>, Score>) -> Vec<Score>
where
    F: Fn(&[f64]) -> Score + Sync,
{
    let mut todo: Vec<&Vec<bool>> = genomes.iter().filter(|g| !cache.contains_key(*g)).collect();
    todo.sort();
    todo.dedup();
    let fresh: Vec<Score> = todo.par_iter().map(|g| objective(&encoding.decode(g))).collect();
    for (g, s) in todo.into_iter().zip(fresh) {
        cache.insert(g.clone(), s);
    }
    genomes.iter().map(|g| cache[g]).collect()
}

fn tournament(pop: &Population, config: &GaConfig, rng: &mut ChaCha8Rng) -> usize {
    let n = pop.genomes.len();
    let mut winner = rng.random_range(0..n);
    for _ in 1..config.tournament_size {
        let c = rng.random_range(0..n);
        if pop.scores[c].value < pop.scores[winner].value {
            winner = c;
        }
    }
    winner
}

fn breed(pop: &Population, order: &[usize], config: &GaConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<bool>> {
    let n = config.population_size;
    let len = pop.genomes[0].len();
    let mut next: Vec<Vec<bool>> = order[..config.elites].iter().map(|&i| pop.genomes[i].clone()).collect();
    while next.len() < n {
        let a = pop.genomes[tournament(pop, config, rng)].clone();
        let b = pop.genomes[tournament(pop, config, rng)].clone();
        let (mut c1, mut c2) = (a, b);
        if len > 1 && rng.random::<f64>() < config.crossover_rate {
            let cut = rng.random_range(1..len);
            for i in cut..len {
                std::mem::swap(&mut c1[i], &mut c2[i]);
            }
        }
        for child in [c1, c2] {
            if next.len() == n {
                break;
            }
            let mut child = child;
            if len > 0 && rng.random::<f64>() < config.mutation_rate {
                let bit = rng.random_range(0..len);
                child[bit] = !child[bit];
            }
            next.push(child);
        }
    }
    next
}

/// Subset of the design vector a stage optimizes; the rest is frozen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub objective: Objective,
    /// Indices into [`VARIABLES`].
    pub active: Vec<usize>,
}

impl Stage {
    pub fn new(name: &str, objective: Objective, active: &[&str]) -> Self {
        let active = active
            .iter()
            .map(|a| VARIABLES.iter().position(|v| v.name == *a).expect("known variable name"))
            .collect();
        Stage { name: name.to_owned(), objective, active }
    }

    fn encoding(&self, bits: u32) -> Encoding {
        Encoding::new(self.active.iter().map(|&i| (VARIABLES[i].lo, VARIABLES[i].hi)).collect(), bits)
    }

    fn apply(&self, base: &DesignVector, x: &[f64]) -> DesignVector {
        let mut full = base.to_array();
        for (&i, &v) in self.active.iter().zip(x) {
            full[i] = v;
        }
        DesignVector::from_array(full)
    }

    fn project(&self, d: &DesignVector) -> Vec<f64> {
        let full = d.to_array();
        self.active.iter().map(|&i| full[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: Stage,
    pub start: DesignVector,
    pub best_design: DesignVector,
    pub best_value: f64,
    pub best_feasible: bool,
    pub evaluations: usize,
    pub history: Vec<GenerationStats>,
}

/// Optimizes the active variables of `stage`, holding the others at `base`.
pub fn run_stage(ctx: &EvaluationContext, stage: &Stage, base: &DesignVector, config: &GaConfig) -> Result<StageReport> {
    if stage.active.is_empty() {
        let e = evaluate_for(base, ctx, stage.objective, false);
        return Ok(StageReport {
            stage: stage.clone(),
            start: *base,
            best_design: *base,
            best_value: e.penalized,
            best_feasible: e.feasible,
            evaluations: 1,
            history: Vec::new(),
        });
    }
    let encoding = stage.encoding(config.bits_per_variable);
    let objective = |x: &[f64]| {
        let e = evaluate_for(&stage.apply(base, x), ctx, stage.objective, false);
        Score { value: e.penalized, feasible: e.feasible }
    };
    let result = ga_run(objective, &encoding, config, &[stage.project(base)])?;
    Ok(StageReport {
        stage: stage.clone(),
        start: *base,
        best_design: stage.apply(base, &result.best_x),
        best_value: result.best_value,
        best_feasible: result.best_feasible,
        evaluations: result.evaluations,
        history: result.history,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Workflow {
    Mdo,
    SdoA,
    SdoB,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub schema: String,
    pub workflow: Workflow,
    pub hs: f64,
    pub tp: f64,
    pub seed: u64,
    pub ga: GaConfig,
    pub stages: Vec<StageReport>,
    pub best_design: DesignVector,
    /// Final LCOW evaluation of `best_design`.
    pub best: Evaluation,
    /// LCOW evaluation of the literature nominal design under the same context.
    pub nominal: Evaluation,
}

impl OptimizationReport {
    pub fn lcow(&self) -> f64 {
        self.best.levelized_cost
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: OptimizationReport = serde_json::from_str(text)?;
        if r.schema != REPORT_SCHEMA {
            return Err(Error::Invalid(format!("report schema `{}`, expected `{REPORT_SCHEMA}`", r.schema)));
        }
        Ok(r)
    }
}

const WEC: [&str; 3] = ["w", "t", "m"];
const PTO: [&str; 4] = ["l1", "ap", "vacc", "p0"];
const ALL: [&str; 8] = ["w", "t", "m", "l1", "ap", "vacc", "p0", "qpmax"];

/// Stages of each workflow, in order.
pub fn workflow_stages(workflow: Workflow) -> Vec<Stage> {
    match workflow {
        Workflow::Mdo => vec![Stage::new("mdo", Objective::Lcow, &ALL)],
        Workflow::SdoA => vec![
            Stage::new("wec", Objective::Lcoke, &WEC),
            Stage::new("pto", Objective::Lcof, &PTO),
            Stage::new("plant", Objective::Lcow, &["qpmax"]),
        ],
        Workflow::SdoB => vec![
            Stage::new("wec", Objective::Lcoke, &WEC),
            Stage::new("plant", Objective::Lcow, &["qpmax"]),
            Stage::new("pto", Objective::Lcow, &PTO),
        ],
    }
}

/// Runs a workflow; MDO starts from the previously published optimum, the
/// sequential variants from the literature nominal.
pub fn run_workflow(ctx: &EvaluationContext, workflow: Workflow, config: &GaConfig) -> Result<OptimizationReport> {
    let start = match workflow {
        Workflow::Mdo => DesignVector::mdo_initial(),
        Workflow::SdoA | Workflow::SdoB => DesignVector::literature_nominal(),
    };
    run_workflow_from(ctx, workflow, config, start)
}

pub fn run_workflow_from(
    ctx: &EvaluationContext,
    workflow: Workflow,
    config: &GaConfig,
    start: DesignVector,
) -> Result<OptimizationReport> {
    let mut base = start;
    let mut stages = Vec::new();
    for stage in workflow_stages(workflow) {
        let report = run_stage(ctx, &stage, &base, config)?;
        base = report.best_design;
        stages.push(report);
    }
    Ok(OptimizationReport {
        schema: REPORT_SCHEMA.to_owned(),
        workflow,
        hs: ctx.seastate.hs,
        tp: ctx.seastate.tp,
        seed: config.seed,
        ga: *config,
        stages,
        best_design: base,
        best: evaluate(&base, ctx),
        nominal: evaluate(&DesignVector::literature_nominal(), ctx),
    })
}

pub fn run_mdo(ctx: &EvaluationContext, config: &GaConfig) -> Result<OptimizationReport> {
    run_workflow(ctx, Workflow::Mdo, config)
}

pub fn run_sdo_a(ctx: &EvaluationContext, config: &GaConfig) -> Result<OptimizationReport> {
    run_workflow(ctx, Workflow::SdoA, config)
}

pub fn run_sdo_b(ctx: &EvaluationContext, config: &GaConfig) -> Result<OptimizationReport> {
    run_workflow(ctx, Workflow::SdoB, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_examples() {
        let enc = Encoding::new(vec![(4.0, 24.0)], 8);
        assert_eq!(enc.decode(&[false; 8]), vec![4.0]);
        assert_eq!(enc.decode(&[true; 8]), vec![24.0]);
        let g = enc.encode(&[4.0 + 128.0 / 255.0 * 20.0]);
        assert_eq!(enc.codes(&g), vec![128]);
        assert!((enc.decode(&g)[0] - 14.039).abs() < 1e-3);
    }

    #[test]
    fn msb_first() {
        let enc = Encoding::new(vec![(0.0, 255.0)], 8);
        let mut g = vec![false; 8];
        g[0] = true;
        assert_eq!(enc.codes(&g), vec![128]);
    }

    #[test]
    fn bad_configs_rejected() {
        let mut c = GaConfig::desk(10, 5, 0);
        c.elites = 10;
        assert!(c.validate().is_err());
        let mut c = GaConfig::desk(10, 5, 0);
        c.immigrant_count = 10;
        assert!(c.validate().is_err());
    }

    #[test]
    fn workflows_share_wec_stage() {
        let a = workflow_stages(Workflow::SdoA);
        let b = workflow_stages(Workflow::SdoB);
        assert_eq!(a[0], b[0]);
        assert_eq!(workflow_stages(Workflow::Mdo)[0].active.len(), 8);
    }
}
