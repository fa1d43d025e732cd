//! Experiment orchestration: reduction runs (Experiment 1), mutant testing
//! in default and reduced bases (Experiment 2), CSV records and summaries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basis::{greedy_reduce, random_reduce, reduction_rate, BasisMask, ReductionResult};
use crate::error::{Error, Result};
use crate::harness::{build_test_case, run_test, ExecutionMode, GammaPolicy};
use crate::mutation::{apply_mutant, generate_suite, mutation_score, MutationOp};
use crate::programs::{
    gen_grover, gen_quantum_walk, gen_ring_graph_state, simulate, Category, Circuit, GroverIterations, GroverSpec,
};
use crate::statevector::{Statevector, DEFAULT_RANK_EPS};
use crate::stats::{h_test, is_significant, mann_whitney_u, mean_std, spearman, speedup_slowdown, vargha_delaney};

/// Largest register an experiment may simulate.
pub const EXPERIMENT_QUBIT_LIMIT: usize = 20;

/// Mutant id used for the fault-free calibration rows of Experiment 2.
pub const CALIBRATION_ID: &str = "none";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub categories: Vec<Category>,
    /// Inclusive qubit range of the Grover programs.
    pub grov_qubits: [usize; 2],
    /// Inclusive qubit range of the graph-state programs.
    pub gs_qubits: [usize; 2],
    /// Inclusive range of walk position qubits (one coin qubit is added).
    pub qwalk_positions: [usize; 2],
    pub programs_per_category: usize,
    pub r1: usize,
    pub r2: usize,
    pub gamma: usize,
    pub alpha: f64,
    pub per_op: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; `None` uses one per core.
    pub workers: Option<usize>,
    /// When false, timing columns stay empty and the output is a pure
    /// function of the configuration.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            categories: vec![Category::Grov, Category::Gs, Category::Qwalk],
            grov_qubits: [3, 6],
            gs_qubits: [3, 8],
            qwalk_positions: [2, 3],
            programs_per_category: 20,
            r1: 100,
            r2: 30,
            gamma: 10,
            alpha: 0.05,
            per_op: 5,
            base_seed: 0,
            output_dir: PathBuf::from("results"),
            workers: None,
            record_timing: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.categories.is_empty() {
            return bad("no categories".into());
        }
        if self.categories.contains(&Category::Custom) {
            return bad("CUSTOM is not a generated category".into());
        }
        for (name, v) in [
            ("r1", self.r1),
            ("r2", self.r2),
            ("gamma", self.gamma),
            ("per_op", self.per_op),
            ("programs_per_category", self.programs_per_category),
        ] {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha {} not in (0, 1)", self.alpha));
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        let ranges = [
            ("grov_qubits", self.grov_qubits, 2, 0),
            ("gs_qubits", self.gs_qubits, 3, 0),
            ("qwalk_positions", self.qwalk_positions, 1, 1),
        ];
        for (name, [lo, hi], min, extra) in ranges {
            if lo > hi || lo < min || hi + extra > EXPERIMENT_QUBIT_LIMIT {
                return bad(format!(
                    "{name} [{lo}, {hi}] must be ordered, start at {min} or more and stay within {} qubits",
                    EXPERIMENT_QUBIT_LIMIT
                ));
            }
        }
        Ok(())
    }

    fn policy(&self) -> Result<GammaPolicy> {
        GammaPolicy::new(self.gamma)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = self.workers {
            builder = builder.num_threads(w);
        }
        builder.build().map_err(|e| Error::Config(e.to_string()))
    }
}

/// Seed of one run, derived from everything that identifies it.
pub fn derive_seed(base_seed: u64, program_id: &str, approach: &str, repetition: usize, mutant_id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(base_seed.to_le_bytes());
    for part in [program_id, approach] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    h.update((repetition as u64).to_le_bytes());
    h.update((mutant_id.len() as u64).to_le_bytes());
    h.update(mutant_id.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub id: String,
    pub category: Category,
    pub circuit: Circuit,
}

/// The generated study subjects, `programs_per_category` per category with
/// sizes cycling through the configured range.
pub fn build_corpus(config: &ExperimentConfig) -> Result<Vec<Program>> {
    config.validate()?;
    let mut out = Vec::new();
    for &category in &config.categories {
        for k in 0..config.programs_per_category {
            let id = format!("{category}-{k:03}");
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.base_seed, &id, "corpus", 0, ""));
            let pick = |[lo, hi]: [usize; 2]| lo + k % (hi - lo + 1);
            let mut circuit = match category {
                Category::Grov => {
                    let n = pick(config.grov_qubits);
                    let dim = 1usize << n;
                    let marked = sample(&mut rng, dim, dim / 4).into_vec();
                    gen_grover(&GroverSpec::new(n, marked, GroverIterations::Auto))?
                }
                Category::Gs => {
                    let n = pick(config.gs_qubits);
                    let c = gen_ring_graph_state(n)?;
                    let input = rng.random_range(0..1usize << n);
                    Circuit::with_gates(n, input, Category::Gs, c.gates().to_vec())?
                }
                Category::Qwalk => {
                    let width = config.qwalk_positions[1] - config.qwalk_positions[0] + 1;
                    let p = pick(config.qwalk_positions);
                    let steps = 1 + k / width;
                    let c = gen_quantum_walk(p, steps)?;
                    let input = rng.random_range(0..1usize << (p + 1));
                    Circuit::with_gates(p + 1, input, Category::Qwalk, c.gates().to_vec())?
                }
                Category::Custom => unreachable!("rejected by validate"),
            };
            circuit.set_label(category);
            out.push(Program { id, category, circuit });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Approach {
    Default,
    Greedy,
    Random,
}

impl Approach {
    pub const ALL: [Approach; 3] = [Approach::Default, Approach::Greedy, Approach::Random];

    pub fn as_str(&self) -> &'static str {
        match self {
            Approach::Default => "default",
            Approach::Greedy => "greedy",
            Approach::Random => "random",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Approach::Default),
            "greedy" => Ok(Approach::Greedy),
            "random" => Ok(Approach::Random),
            _ => Err(Error::InvalidArgument(format!("unknown approach {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            _ => Err(Error::InvalidArgument(format!("unknown verdict {s:?}"))),
        }
    }
}

/// Column names of the experiment CSVs, in order.
pub const CSV_COLUMNS: [&str; 18] = [
    "experiment",
    "program_id",
    "category",
    "n_qubits",
    "depth",
    "approach",
    "repetition",
    "mask",
    "default_rank",
    "reduced_rank",
    "reduction_rate",
    "objective_calls",
    "search_time_s",
    "test_runtime_s",
    "mutant_id",
    "verdict",
    "p_value",
    "seed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: u8,
    pub program_id: String,
    pub category: Category,
    pub n_qubits: usize,
    pub depth: usize,
    pub approach: Approach,
    pub repetition: usize,
    pub mask: BasisMask,
    pub default_rank: usize,
    pub reduced_rank: usize,
    pub reduction_rate: f64,
    pub objective_calls: usize,
    pub search_time_s: Option<f64>,
    pub test_runtime_s: Option<f64>,
    pub mutant_id: Option<String>,
    pub verdict: Option<Verdict>,
    pub p_value: Option<f64>,
    pub seed: u64,
}

impl ExperimentRecord {
    fn sort_key(&self) -> (u8, &str, &str, usize, Approach) {
        (
            self.experiment,
            &self.program_id,
            self.mutant_id.as_deref().unwrap_or(""),
            self.repetition,
            self.approach,
        )
    }

    fn fields(&self) -> [String; 18] {
        let secs = |v: Option<f64>| v.map(|s| format!("{s:.6}")).unwrap_or_default();
        [
            self.experiment.to_string(),
            self.program_id.clone(),
            self.category.to_string(),
            self.n_qubits.to_string(),
            self.depth.to_string(),
            self.approach.to_string(),
            self.repetition.to_string(),
            self.mask.to_string(),
            self.default_rank.to_string(),
            self.reduced_rank.to_string(),
            self.reduction_rate.to_string(),
            self.objective_calls.to_string(),
            secs(self.search_time_s),
            secs(self.test_runtime_s),
            self.mutant_id.clone().unwrap_or_default(),
            self.verdict.map(|v| v.as_str().to_string()).unwrap_or_default(),
            self.p_value.map(|p| p.to_string()).unwrap_or_default(),
            self.seed.to_string(),
        ]
    }

    pub fn is_calibration(&self) -> bool {
        self.mutant_id.as_deref() == Some(CALIBRATION_ID)
    }

    /// Operator of the mutant behind an Experiment 2 row.
    pub fn mutation_op(&self) -> Option<MutationOp> {
        let id = self.mutant_id.as_deref()?;
        if id.starts_with("ry") {
            Some(MutationOp::Ry)
        } else if id.starts_with('x') {
            Some(MutationOp::X)
        } else if id.starts_with('z') {
            Some(MutationOp::Z)
        } else {
            None
        }
    }
}

pub fn write_records(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let mut col = BTreeMap::new();
    for name in CSV_COLUMNS {
        let i = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        col.insert(name, i);
    }
    let mut out = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row?;
        let at = |name: &str| row.get(col[name]).unwrap_or("");
        let bad = |name: &str| Error::Csv(format!("row {}: bad {name} {:?}", line + 2, at(name)));
        let num = |name: &str| at(name).parse::<usize>().map_err(|_| bad(name));
        let opt_f64 = |name: &str| -> Result<Option<f64>> {
            match at(name) {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(name)),
            }
        };
        out.push(ExperimentRecord {
            experiment: at("experiment").parse().map_err(|_| bad("experiment"))?,
            program_id: at("program_id").to_string(),
            category: at("category").parse().map_err(|_| bad("category"))?,
            n_qubits: num("n_qubits")?,
            depth: num("depth")?,
            approach: at("approach").parse().map_err(|_| bad("approach"))?,
            repetition: num("repetition")?,
            mask: at("mask").parse().map_err(|_| bad("mask"))?,
            default_rank: num("default_rank")?,
            reduced_rank: num("reduced_rank")?,
            reduction_rate: at("reduction_rate").parse().map_err(|_| bad("reduction_rate"))?,
            objective_calls: num("objective_calls")?,
            search_time_s: opt_f64("search_time_s")?,
            test_runtime_s: opt_f64("test_runtime_s")?,
            mutant_id: Some(at("mutant_id")).filter(|s| !s.is_empty()).map(str::to_string),
            verdict: match at("verdict") {
                "" => None,
                s => Some(s.parse().map_err(|_| bad("verdict"))?),
            },
            p_value: opt_f64("p_value")?,
            seed: at("seed").parse().map_err(|_| bad("seed"))?,
        });
    }
    Ok(out)
}

fn reduction_record(
    program: &Program,
    approach: Approach,
    repetition: usize,
    result: &ReductionResult,
    seed: u64,
    timing: bool,
) -> ExperimentRecord {
    ExperimentRecord {
        experiment: 1,
        program_id: program.id.clone(),
        category: program.category,
        n_qubits: program.circuit.num_qubits(),
        depth: program.circuit.depth(),
        approach,
        repetition,
        mask: result.mask.clone(),
        default_rank: result.default_rank,
        reduced_rank: result.reduced_rank,
        reduction_rate: result.reduction_rate(),
        objective_calls: result.objective_calls,
        search_time_s: timing.then_some(result.wall_time.as_secs_f64()),
        test_runtime_s: None,
        mutant_id: None,
        verdict: None,
        p_value: None,
        seed,
    }
}

fn sort_records(records: &mut [ExperimentRecord]) {
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// Experiment 1 over the given programs: per repetition one Greedy run and
/// one Random run whose budget is that Greedy run's objective calls.
pub fn experiment1_records(programs: &[Program], config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let states = programs
        .iter()
        .map(|p| simulate(&p.circuit))
        .collect::<Result<Vec<Statevector>>>()?;
    let jobs: Vec<(usize, usize)> = (0..programs.len())
        .flat_map(|p| (0..config.r1).map(move |r| (p, r)))
        .collect();
    let timing = config.record_timing;
    let nested: Vec<Result<[ExperimentRecord; 2]>> = config.pool()?.install(|| {
        jobs.par_iter()
            .map(|&(p, rep)| {
                let program = &programs[p];
                let gseed = derive_seed(config.base_seed, &program.id, "greedy", rep, "");
                let greedy = greedy_reduce(&states[p], &mut ChaCha8Rng::seed_from_u64(gseed));
                let rseed = derive_seed(config.base_seed, &program.id, "random", rep, "");
                let random = random_reduce(
                    &states[p],
                    greedy.objective_calls,
                    &mut ChaCha8Rng::seed_from_u64(rseed),
                )?;
                Ok([
                    reduction_record(program, Approach::Greedy, rep, &greedy, gseed, timing),
                    reduction_record(program, Approach::Random, rep, &random, rseed, timing),
                ])
            })
            .collect()
    });
    let mut records = Vec::with_capacity(2 * jobs.len());
    for pair in nested {
        records.extend(pair?);
    }
    sort_records(&mut records);
    Ok(records)
}

pub fn run_experiment1(config: &ExperimentConfig) -> Result<PathBuf> {
    let records = experiment1_records(&build_corpus(config)?, config)?;
    let path = config.output_dir.join("exp1.csv");
    write_records(&path, &records)?;
    Ok(path)
}

/// The mask of the run whose reduction rate is the lower median of all runs,
/// ties broken by the lexicographically smallest mask.
pub fn median_mask(records: &[&ExperimentRecord]) -> Option<BasisMask> {
    let mut rates: Vec<f64> = records.iter().map(|r| r.reduction_rate).collect();
    rates.sort_by(f64::total_cmp);
    let median = *rates.get((rates.len().checked_sub(1)?) / 2)?;
    records
        .iter()
        .filter(|r| r.reduction_rate == median)
        .map(|r| r.mask.clone())
        .min_by_key(|m| m.to_string())
}

struct Exp2Plan {
    program: Program,
    state: Statevector,
    masks: [(Approach, BasisMask, usize); 3],
    mutants: Vec<(String, Circuit)>,
}

/// Experiment 2 over the given programs. Masks come from an in-memory rerun
/// of Experiment 1 with the same seeds, so the two CSVs are consistent.
pub fn experiment2_records(programs: &[Program], config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let policy = config.policy()?;
    let exp1 = experiment1_records(programs, config)?;
    let mut plans = Vec::with_capacity(programs.len());
    for program in programs {
        let state = simulate(&program.circuit)?;
        let rows = |approach: Approach| -> Vec<&ExperimentRecord> {
            exp1.iter()
                .filter(|r| r.program_id == program.id && r.approach == approach)
                .collect()
        };
        let pick = |approach| -> Result<(Approach, BasisMask, usize)> {
            let rows = rows(approach);
            let mask = median_mask(&rows).ok_or_else(|| Error::InvalidState("no experiment 1 runs".into()))?;
            let calls = rows
                .iter()
                .filter(|r| r.mask == mask)
                .map(|r| r.objective_calls)
                .min()
                .unwrap_or(0);
            Ok((approach, mask, calls))
        };
        let n = program.circuit.num_qubits();
        let masks = [
            (Approach::Default, BasisMask::identity(n), 0),
            pick(Approach::Greedy)?,
            pick(Approach::Random)?,
        ];
        let suite_seed = derive_seed(config.base_seed, &program.id, "suite", 0, "");
        let suite = generate_suite(
            &program.id,
            &program.circuit,
            config.per_op,
            &mut ChaCha8Rng::seed_from_u64(suite_seed),
        )?;
        let mut mutants = vec![(CALIBRATION_ID.to_string(), program.circuit.clone())];
        for m in &suite.mutants {
            mutants.push((m.id.clone(), apply_mutant(&program.circuit, m)?));
        }
        plans.push(Exp2Plan {
            program: program.clone(),
            state,
            masks,
            mutants,
        });
    }

    let mut jobs = Vec::new();
    for (p, plan) in plans.iter().enumerate() {
        for m in 0..plan.mutants.len() {
            for rep in 0..config.r2 {
                for a in 0..3 {
                    jobs.push((p, m, rep, a));
                }
            }
        }
    }
    let cases = plans
        .iter()
        .map(|plan| {
            plan.masks
                .iter()
                .map(|(_, mask, _)| build_test_case(&plan.state, mask, plan.program.circuit.input_index()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mode = if config.record_timing {
        ExecutionMode::Timed
    } else {
        ExecutionMode::Cached
    };
    let results: Vec<Result<ExperimentRecord>> = config.pool()?.install(|| {
        jobs.par_iter()
            .map(|&(p, m, rep, a)| {
                let plan = &plans[p];
                let (approach, mask, calls) = &plan.masks[a];
                let (mutant_id, sut) = &plan.mutants[m];
                let tc = &cases[p][a];
                let seed = derive_seed(config.base_seed, &plan.program.id, approach.as_str(), rep, mutant_id);
                let verdict = run_test(sut, tc, policy, config.alpha, seed, mode)?;
                let default_rank = plan.state.rank(DEFAULT_RANK_EPS);
                let reduced_rank = tc.outputs.len();
                Ok(ExperimentRecord {
                    experiment: 2,
                    program_id: plan.program.id.clone(),
                    category: plan.program.category,
                    n_qubits: sut.num_qubits(),
                    depth: plan.program.circuit.depth(),
                    approach: *approach,
                    repetition: rep,
                    mask: mask.clone(),
                    default_rank,
                    reduced_rank,
                    reduction_rate: reduction_rate(default_rank, reduced_rank)?,
                    objective_calls: *calls,
                    search_time_s: None,
                    test_runtime_s: config.record_timing.then_some(verdict.runtime.as_secs_f64()),
                    mutant_id: Some(mutant_id.clone()),
                    verdict: Some(if verdict.failed() { Verdict::Fail } else { Verdict::Pass }),
                    p_value: verdict.p_value,
                    seed,
                })
            })
            .collect()
    });
    let mut records = results.into_iter().collect::<Result<Vec<_>>>()?;
    sort_records(&mut records);
    Ok(records)
}

pub fn run_experiment2(config: &ExperimentConfig) -> Result<PathBuf> {
    let records = experiment2_records(&build_corpus(config)?, config)?;
    let path = config.output_dir.join("exp2.csv");
    write_records(&path, &records)?;
    Ok(path)
}

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub table: String,
    pub category: String,
    pub subject: String,
    pub metric: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub report: String,
}

impl Summary {
    pub fn get(&self, table: &str, category: &str, subject: &str, metric: &str) -> Option<&str> {
        self.rows
            .iter()
            .find(|r| r.table == table && r.category == category && r.subject == subject && r.metric == metric)
            .map(|r| r.value.as_str())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Collector {
    rows: Vec<SummaryRow>,
    alpha: f64,
}

impl Collector {
    fn push(&mut self, table: &str, category: &str, subject: &str, metric: &str, value: impl ToString) {
        self.rows.push(SummaryRow {
            table: table.into(),
            category: category.into(),
            subject: subject.into(),
            metric: metric.into(),
            value: value.to_string(),
        });
    }

    fn mean_std(&mut self, table: &str, category: &str, subject: &str, metric: &str, xs: &[f64]) {
        if xs.is_empty() {
            return;
        }
        let (m, s) = mean_std(xs);
        self.push(table, category, subject, &format!("{metric}_mean"), format!("{m:.6}"));
        self.push(table, category, subject, &format!("{metric}_std"), format!("{s:.6}"));
    }

    /// MWU plus A12 of `a` against `b`; the winner is the larger sample when
    /// the difference is significant and non-negligible.
    fn compare(&mut self, table: &str, category: &str, names: (&str, &str), metric: &str, a: &[f64], b: &[f64]) {
        let subject = format!("{}_vs_{}", names.0, names.1);
        let (Ok(test), Ok(effect)) = (mann_whitney_u(a, b), vargha_delaney(a, b)) else {
            return;
        };
        self.push(table, category, &subject, &format!("{metric}_mwu_p"), test.p_value);
        self.push(table, category, &subject, &format!("{metric}_a12"), effect.a12);
        self.push(table, category, &subject, &format!("{metric}_magnitude"), effect.magnitude);
        let winner = if !is_significant(test.p_value, &effect, self.alpha) {
            "Equal"
        } else if effect.a12 > 0.5 {
            names.0
        } else {
            names.1
        };
        self.push(table, category, &subject, &format!("{metric}_winner"), winner);
    }

    fn correlate(&mut self, category: &str, metric: &str, x: &[f64], y: &[f64]) {
        if let Ok(c) = spearman(x, y) {
            self.push("correlation", category, "greedy", &format!("{metric}_rs"), c.r_s);
            self.push("correlation", category, "greedy", &format!("{metric}_p"), c.p_value);
            self.push("correlation", category, "greedy", &format!("{metric}_magnitude"), c.label());
        }
    }
}

fn op_label(op: Option<MutationOp>) -> String {
    op.map(|o| o.to_string()).unwrap_or_else(|| "ALL".into())
}

/// Aggregates experiment CSVs into summary tables.
pub fn summarize(paths: &[PathBuf], alpha: f64) -> Result<Summary> {
    let mut records = Vec::new();
    for p in paths {
        records.extend(read_records(p)?);
    }
    summarize_records(&records, alpha)
}

pub fn summarize_records(records: &[ExperimentRecord], alpha: f64) -> Result<Summary> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} not in (0, 1)")));
    }
    let mut out = Collector { rows: Vec::new(), alpha };
    let categories: BTreeSet<String> = records.iter().map(|r| r.category.to_string()).collect();
    let scopes: Vec<String> = categories.into_iter().chain(["ALL".to_string()]).collect();
    let in_scope = |r: &ExperimentRecord, scope: &str| scope == "ALL" || r.category.to_string() == scope;

    for scope in &scopes {
        let exp1: Vec<&ExperimentRecord> = records.iter().filter(|r| r.experiment == 1 && in_scope(r, scope)).collect();
        if !exp1.is_empty() {
            let mut rates = BTreeMap::new();
            for approach in [Approach::Greedy, Approach::Random] {
                let rows: Vec<&&ExperimentRecord> = exp1.iter().filter(|r| r.approach == approach).collect();
                let rate: Vec<f64> = rows.iter().map(|r| r.reduction_rate).collect();
                let time: Vec<f64> = rows.iter().filter_map(|r| r.search_time_s).collect();
                let calls: Vec<f64> = rows.iter().map(|r| r.objective_calls as f64).collect();
                out.mean_std("exp1", scope, approach.as_str(), "reduction_rate", &rate);
                out.mean_std("exp1", scope, approach.as_str(), "search_time_s", &time);
                out.mean_std("exp1", scope, approach.as_str(), "objective_calls", &calls);
                rates.insert(approach, rate);
            }
            out.compare(
                "exp1",
                scope,
                ("greedy", "random"),
                "reduction_rate",
                &rates[&Approach::Greedy],
                &rates[&Approach::Random],
            );
        }

        let exp2: Vec<&ExperimentRecord> = records.iter().filter(|r| r.experiment == 2 && in_scope(r, scope)).collect();
        if exp2.is_empty() {
            continue;
        }
        // (approach, op) -> per (program, repetition) scores
        let mut scores: BTreeMap<(Approach, String), Vec<f64>> = BTreeMap::new();
        let mut units: BTreeMap<(Approach, &str, usize), Vec<&ExperimentRecord>> = BTreeMap::new();
        for r in exp2.iter().filter(|r| !r.is_calibration()) {
            units.entry((r.approach, &r.program_id, r.repetition)).or_default().push(r);
        }
        for ((approach, _, _), rows) in &units {
            for op in [Some(MutationOp::X), Some(MutationOp::Z), Some(MutationOp::Ry), None] {
                let of_op: Vec<&&ExperimentRecord> =
                    rows.iter().filter(|r| op.is_none() || r.mutation_op() == op).collect();
                if of_op.is_empty() {
                    continue;
                }
                let killed = of_op.iter().filter(|r| r.verdict == Some(Verdict::Fail)).count();
                scores
                    .entry((*approach, op_label(op)))
                    .or_default()
                    .push(mutation_score(killed, of_op.len())?);
            }
        }
        for approach in Approach::ALL {
            for op in ["X", "Z", "RY", "ALL"] {
                if let Some(s) = scores.get(&(approach, op.to_string())) {
                    out.mean_std("exp2", scope, approach.as_str(), &format!("mutation_score_{op}"), s);
                }
            }
            let calib: Vec<&&ExperimentRecord> =
                exp2.iter().filter(|r| r.is_calibration() && r.approach == approach).collect();
            if !calib.is_empty() {
                let fails = calib.iter().filter(|r| r.verdict == Some(Verdict::Fail)).count();
                out.push(
                    "exp2",
                    scope,
                    approach.as_str(),
                    "calibration_failure_rate",
                    format!("{:.6}", fails as f64 / calib.len() as f64),
                );
            }
            let times: Vec<f64> = exp2
                .iter()
                .filter(|r| r.approach == approach)
                .filter_map(|r| r.test_runtime_s)
                .collect();
            out.mean_std("exp2", scope, approach.as_str(), "test_runtime_s", &times);
        }
        let all = |a: Approach| scores.get(&(a, "ALL".to_string())).cloned().unwrap_or_default();
        let (d, g, r) = (all(Approach::Default), all(Approach::Greedy), all(Approach::Random));
        if let Ok(kw) = h_test(&[&d, &g, &r]) {
            out.push("exp2", scope, "default_greedy_random", "mutation_score_kw_h", kw.h);
            out.push("exp2", scope, "default_greedy_random", "mutation_score_kw_p", kw.p_value);
        }
        out.compare("exp2", scope, ("greedy", "random"), "mutation_score", &g, &r);

        // per program: runtime ratio against default and greedy mutation score
        let mut programs: BTreeMap<&str, BTreeMap<Approach, (Vec<f64>, f64)>> = BTreeMap::new();
        for r in &exp2 {
            let entry = programs
                .entry(&r.program_id)
                .or_default()
                .entry(r.approach)
                .or_insert((Vec::new(), r.reduction_rate));
            if let Some(t) = r.test_runtime_s {
                entry.0.push(t);
            }
        }
        let (mut corr_rate, mut corr_speed, mut corr_rate_s, mut corr_score) = (vec![], vec![], vec![], vec![]);
        for (pid, by_approach) in &programs {
            let mean_time = |a: Approach| {
                by_approach
                    .get(&a)
                    .filter(|(t, _)| !t.is_empty())
                    .map(|(t, _)| t.iter().sum::<f64>() / t.len() as f64)
            };
            let rate = by_approach.get(&Approach::Greedy).map(|(_, rate)| *rate);
            for a in [Approach::Greedy, Approach::Random] {
                if let (Some(td), Some(ta)) = (mean_time(Approach::Default), mean_time(a)) {
                    if let Ok(s) = speedup_slowdown(td, ta) {
                        out.push("speedup", scope, pid, &format!("{a}_speedup"), format!("{s:.6}"));
                        if a == Approach::Greedy {
                            if let Some(rate) = rate {
                                corr_rate_s.push(rate);
                                corr_speed.push(s);
                            }
                        }
                    }
                }
            }
            let greedy_units: Vec<f64> = units
                .iter()
                .filter(|((a, p, _), _)| *a == Approach::Greedy && p == pid)
                .map(|(_, rows)| {
                    let killed = rows.iter().filter(|r| r.verdict == Some(Verdict::Fail)).count();
                    100.0 * killed as f64 / rows.len() as f64
                })
                .collect();
            if let (Some(rate), false) = (rate, greedy_units.is_empty()) {
                corr_rate.push(rate);
                corr_score.push(greedy_units.iter().sum::<f64>() / greedy_units.len() as f64);
            }
        }
        out.correlate(scope, "rate_vs_speedup", &corr_rate_s, &corr_speed);
        out.correlate(scope, "rate_vs_mutation_score", &corr_rate, &corr_score);
    }

    let mut report = String::new();
    let mut last = None;
    for r in &out.rows {
        let head = (&r.table, &r.category);
        if last != Some(head) {
            report.push_str(&format!("\n[{} / {}]\n", r.table, r.category));
            last = Some(head);
        }
        report.push_str(&format!("  {:<24} {:<36} {}\n", r.subject, r.metric, r.value));
    }
    Ok(Summary { rows: out.rows, report })
}
