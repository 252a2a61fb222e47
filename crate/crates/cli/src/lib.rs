//! Command logic for the `orbitmln` binary: model loading, engine routing,
//! the validation battery, the scaling benchmark, and report rendering.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use orbitmln_core::detect::{classify, conditional_structure, monadic_decomposition, FragmentClass};
use orbitmln_core::exchange::statistic_space_size;
use orbitmln_core::infer::{
    binary_context, bounded_binary_marginal, bounded_binary_mpe, lifted_marginal, lifted_mpe,
    EngineOptions, InferError,
};
use orbitmln_core::num_bigint::BigUint;
use orbitmln_core::oracle::{self, CachedOracle};
use orbitmln_core::world::{parse_evidence, Evidence, GroundModel};
use orbitmln_core::MlnModel;

/// Error carrying the process exit code.
///
/// * 2 — unreadable or malformed inputs;
/// * 3 — the requested engine cannot serve the query (unsupported fragment,
///   oracle over its cap, context bound exceeded, work budget exceeded);
/// * 4 — evidence or query assigns an atom two different values, or no
///   completion of the evidence exists.
#[derive(Debug)]
pub struct AppError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for AppError {}

impl AppError {
    pub fn input(message: impl Into<String>) -> AppError {
        AppError { code: 2, message: message.into() }
    }

    pub fn engine(message: impl Into<String>) -> AppError {
        AppError { code: 3, message: message.into() }
    }

    pub fn evidence(message: impl Into<String>) -> AppError {
        AppError { code: 4, message: message.into() }
    }
}

fn engine_err(e: InferError) -> AppError {
    match e {
        InferError::NoFeasibleStatistic => AppError::evidence(e.to_string()),
        other => AppError::engine(other.to_string()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Marginal,
    Mpe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum EnginePref {
    Auto,
    Lifted,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn load_model(path: &Path) -> Result<GroundModel, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::input(format!("cannot read {}: {e}", path.display())))?;
    let model = MlnModel::parse(&text)
        .map_err(|e| AppError::input(format!("{}: {e}", path.display())))?;
    GroundModel::ground(model).map_err(|e| AppError::input(format!("{}: {e}", path.display())))
}

pub fn load_evidence(path: &Path, gm: &GroundModel) -> Result<Evidence, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::input(format!("cannot read {}: {e}", path.display())))?;
    parse_evidence(&text, gm).map_err(|e| AppError::input(format!("{}: {e}", path.display())))
}

/// Parses `"Atom=0|1[,Atom=0|1...]"`, splitting on commas outside parentheses.
pub fn parse_query(text: &str, gm: &GroundModel) -> Result<Evidence, AppError> {
    let mut out = Evidence::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut pieces: Vec<&str> = Vec::new();
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                pieces.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    pieces.push(&text[start..]);
    for piece in pieces {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let eq = piece
            .rfind('=')
            .ok_or_else(|| AppError::input(format!("query item `{piece}` lacks `=0` or `=1`")))?;
        let atom_text = piece[..eq].trim();
        let value = match piece[eq + 1..].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(AppError::input(format!(
                    "query value for `{atom_text}` must be 0 or 1, got `{other}`"
                )))
            }
        };
        let atom = gm
            .parse_atom(atom_text)
            .map_err(|e| AppError::input(e.to_string()))?;
        out.set(atom, value)
            .map_err(|_| AppError::evidence(format!("query assigns `{atom_text}` twice")))?;
    }
    Ok(out)
}

fn union(a: &Evidence, b: &Evidence, gm: &GroundModel) -> Result<Evidence, AppError> {
    a.union(b).map_err(|c| {
        AppError::evidence(format!(
            "conflicting assignments to `{}`",
            gm.atom_name(c.atom)
        ))
    })
}

// ---- infer ----------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct InferConfig {
    pub model: PathBuf,
    pub evidence: Option<PathBuf>,
    pub query: Option<String>,
    pub mode: Mode,
    pub engine: EnginePref,
    pub k_bound: usize,
    pub memo: bool,
    pub jobs: usize,
    pub format: Format,
    pub oracle_cap: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct InferReport {
    pub mode: &'static str,
    pub engine: &'static str,
    pub fragment: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mpe_assignment: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_weight: Option<f64>,
    pub log_partition: f64,
    pub statistics_visited: u64,
    pub elapsed_ms: u64,
}

impl InferReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes"),
            Format::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "mode: {}", self.mode);
                let _ = writeln!(s, "engine: {}", self.engine);
                let _ = writeln!(s, "fragment: {}", self.fragment);
                if let Some(p) = self.probability {
                    let _ = writeln!(s, "probability: {p}");
                }
                if let Some(assignment) = &self.mpe_assignment {
                    let _ = writeln!(s, "mpe_assignment: {}", assignment.join(", "));
                }
                if let Some(w) = self.log_weight {
                    let _ = writeln!(s, "log_weight: {w}");
                }
                let _ = writeln!(s, "log_partition: {}", self.log_partition);
                let _ = writeln!(s, "statistics_visited: {}", self.statistics_visited);
                let _ = writeln!(s, "elapsed_ms: {}", self.elapsed_ms);
                s
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pick {
    Monadic,
    TwoVariable,
    Oracle,
}

fn engine_name(pick: Pick) -> &'static str {
    match pick {
        Pick::Monadic | Pick::TwoVariable => "lifted",
        Pick::Oracle => "oracle",
    }
}

/// Chooses the engine for a query. Auto prefers the lifted engines and
/// falls back to the oracle only when the fragment or the context bound
/// rules them out; the choice is always reported, never silent.
fn pick_engine(
    gm: &GroundModel,
    fragment: FragmentClass,
    target: &Evidence,
    pref: EnginePref,
    k_bound: usize,
    oracle_cap: u32,
) -> Result<Pick, AppError> {
    let oracle_fits = gm.atom_count() <= oracle_cap.min(63);
    let oracle_or = |why: String| {
        if oracle_fits {
            Ok(Pick::Oracle)
        } else {
            Err(AppError::engine(format!(
                "{why}, and the oracle cannot enumerate {} atoms (cap {})",
                gm.atom_count(),
                oracle_cap
            )))
        }
    };
    let context_overflow = |n: usize| {
        format!("query names binary atoms over {n} constants, above --k-bound {k_bound}")
    };
    match pref {
        EnginePref::Oracle => oracle_or("the oracle was requested".into()),
        EnginePref::Lifted => match fragment {
            FragmentClass::Monadic => Ok(Pick::Monadic),
            FragmentClass::TwoVariable => {
                let context = binary_context(gm, target);
                if context.len() <= k_bound {
                    Ok(Pick::TwoVariable)
                } else {
                    Err(AppError::engine(context_overflow(context.len())))
                }
            }
            FragmentClass::Unsupported => Err(AppError::engine(
                "model is outside the monadic and two-variable fragments; \
                 no lifted guarantee applies (try --engine oracle)",
            )),
        },
        EnginePref::Auto => match fragment {
            FragmentClass::Monadic => Ok(Pick::Monadic),
            FragmentClass::TwoVariable => {
                let context = binary_context(gm, target);
                if context.len() <= k_bound {
                    Ok(Pick::TwoVariable)
                } else {
                    oracle_or(context_overflow(context.len()))
                }
            }
            FragmentClass::Unsupported => {
                oracle_or("model is outside the monadic and two-variable fragments".into())
            }
        },
    }
}

struct MarginalRun {
    log_posterior: f64,
    log_partition: f64,
    visited: u64,
}

fn marginal_once(
    gm: &GroundModel,
    pick: Pick,
    e: &Evidence,
    opts: &EngineOptions,
    k_bound: usize,
    oracle_cap: u32,
) -> Result<MarginalRun, AppError> {
    match pick {
        Pick::Monadic => {
            let d = monadic_decomposition(gm).map_err(|e| AppError::engine(e.to_string()))?;
            let out = lifted_marginal(gm, &d, e, opts).map_err(engine_err)?;
            Ok(MarginalRun {
                log_posterior: out.log_evidence,
                log_partition: out.log_partition,
                visited: out.statistics_visited,
            })
        }
        Pick::TwoVariable => {
            let out = bounded_binary_marginal(gm, e, k_bound, opts).map_err(engine_err)?;
            Ok(MarginalRun {
                log_posterior: out.log_evidence,
                log_partition: out.log_partition,
                visited: out.statistics_visited,
            })
        }
        Pick::Oracle => {
            let out = oracle::brute_posterior(gm, e, oracle_cap)
                .map_err(|e| AppError::engine(e.to_string()))?;
            Ok(MarginalRun {
                log_posterior: out.log_evidence,
                log_partition: out.log_partition,
                visited: out.worlds,
            })
        }
    }
}

pub fn run_infer(cfg: &InferConfig) -> Result<InferReport, AppError> {
    let started = Instant::now();
    let gm = load_model(&cfg.model)?;
    let evidence = match &cfg.evidence {
        Some(path) => load_evidence(path, &gm)?,
        None => Evidence::new(),
    };
    let query = match &cfg.query {
        Some(text) => parse_query(text, &gm)?,
        None => Evidence::new(),
    };
    let fragment = classify(&gm.model);
    let target = union(&query, &evidence, &gm)?;
    let opts = EngineOptions {
        jobs: cfg.jobs.max(1),
        memo: cfg.memo,
        ..EngineOptions::default()
    };
    let pick = pick_engine(&gm, fragment, &target, cfg.engine, cfg.k_bound, cfg.oracle_cap)?;

    let report = match cfg.mode {
        Mode::Marginal => {
            let joint = marginal_once(&gm, pick, &target, &opts, cfg.k_bound, cfg.oracle_cap)?;
            let mut visited = joint.visited;
            // conditional query: P(q | e) = P(q, e) / P(e)
            let probability = if evidence.is_empty() || query.is_empty() {
                orbitmln_core::numeric::exp(joint.log_posterior - joint.log_partition).min(1.0)
            } else {
                let base = marginal_once(&gm, pick, &evidence, &opts, cfg.k_bound, cfg.oracle_cap)?;
                visited += base.visited;
                orbitmln_core::numeric::exp(joint.log_posterior - base.log_posterior).min(1.0)
            };
            InferReport {
                mode: "marginal",
                engine: engine_name(pick),
                fragment: fragment.to_string(),
                probability: Some(probability),
                mpe_assignment: None,
                log_weight: None,
                log_partition: joint.log_partition,
                statistics_visited: visited,
                elapsed_ms: started.elapsed().as_millis() as u64,
            }
        }
        Mode::Mpe => {
            let (assignment, log_weight, log_partition, visited) = match pick {
                Pick::Monadic => {
                    let d =
                        monadic_decomposition(&gm).map_err(|e| AppError::engine(e.to_string()))?;
                    let out = lifted_mpe(&gm, &d, &target, &opts).map_err(engine_err)?;
                    (
                        out.assignment,
                        out.log_weight,
                        out.log_partition,
                        out.statistics_visited,
                    )
                }
                Pick::TwoVariable => {
                    let out =
                        bounded_binary_mpe(&gm, &target, cfg.k_bound, &opts).map_err(engine_err)?;
                    (
                        out.assignment,
                        out.log_weight,
                        out.log_partition,
                        out.statistics_visited,
                    )
                }
                Pick::Oracle => {
                    let (world, lw) = oracle::brute_mpe(&gm, &target, cfg.oracle_cap)
                        .map_err(|e| AppError::engine(e.to_string()))?;
                    let z = oracle::brute_posterior(&gm, &Evidence::new(), cfg.oracle_cap)
                        .map_err(|e| AppError::engine(e.to_string()))?;
                    let assignment = world
                        .iter()
                        .enumerate()
                        .map(|(a, &v)| (a as u32, v))
                        .collect();
                    (assignment, lw, z.log_partition, z.worlds)
                }
            };
            InferReport {
                mode: "mpe",
                engine: engine_name(pick),
                fragment: fragment.to_string(),
                probability: None,
                mpe_assignment: Some(
                    assignment
                        .iter()
                        .map(|&(a, v)| format!("{}={}", gm.atom_name(a), v as u8))
                        .collect(),
                ),
                log_weight: Some(log_weight),
                log_partition,
                statistics_visited: visited,
                elapsed_ms: started.elapsed().as_millis() as u64,
            }
        }
    };
    Ok(report)
}

// ---- describe ---------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct DescribeReport {
    pub fragment: String,
    pub domain_size: u16,
    pub atoms: u32,
    pub ground_formulas: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistic_space: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    pub oracle_feasible: bool,
    pub summary: String,
}

pub fn run_describe(model: &Path, oracle_cap: u32, format: Format) -> Result<String, AppError> {
    let gm = load_model(model)?;
    let fragment = classify(&gm.model);
    let k = gm.domain_size();
    let oracle_feasible = gm.atom_count() <= oracle_cap.min(63);
    let report = match fragment {
        FragmentClass::Monadic => {
            let d = monadic_decomposition(&gm).expect("fragment checked");
            let parts = 1u64 << d.width();
            let space = statistic_space_size(k as u64, d.width());
            let summary = format!(
                "Monadic, width {}, {} blocks, |T| = C({},{}) = {}",
                d.width(),
                d.block_count(),
                k as u64 + parts - 1,
                parts - 1,
                space
            );
            DescribeReport {
                fragment: fragment.to_string(),
                domain_size: k,
                atoms: gm.atom_count(),
                ground_formulas: gm.factors.len(),
                width: Some(d.width()),
                blocks: Some(d.block_count()),
                statistic_space: Some(space.to_string()),
                pairs: None,
                oracle_feasible,
                summary,
            }
        }
        FragmentClass::TwoVariable => {
            let cs = conditional_structure(&gm, &[]).expect("fragment checked");
            let w = cs.decomp.width();
            let parts = 1u64 << w;
            let space = statistic_space_size(k as u64, w);
            let summary = format!(
                "TwoVariable, block width {}, {} blocks, {} pairs, |T| = C({},{}) = {}",
                w,
                cs.decomp.block_count(),
                cs.pairs.len(),
                k as u64 + parts - 1,
                parts - 1,
                space
            );
            DescribeReport {
                fragment: fragment.to_string(),
                domain_size: k,
                atoms: gm.atom_count(),
                ground_formulas: gm.factors.len(),
                width: Some(w),
                blocks: Some(cs.decomp.block_count()),
                statistic_space: Some(space.to_string()),
                pairs: Some(cs.pairs.len()),
                oracle_feasible,
                summary,
            }
        }
        FragmentClass::Unsupported => DescribeReport {
            fragment: fragment.to_string(),
            domain_size: k,
            atoms: gm.atom_count(),
            ground_formulas: gm.factors.len(),
            width: None,
            blocks: None,
            statistic_space: None,
            pairs: None,
            oracle_feasible,
            summary: "Unsupported (oracle only)".into(),
        },
    };
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
        Format::Text => format!(
            "{}\ndomain_size: {}\natoms: {}\nground_formulas: {}\noracle_feasible: {}\n",
            report.summary,
            report.domain_size,
            report.atoms,
            report.ground_formulas,
            report.oracle_feasible
        ),
    })
}

// ---- validate -----------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ValidateConfig {
    pub model: PathBuf,
    pub seed: u64,
    pub trials: u32,
    pub jobs: usize,
    pub k_bound: usize,
    pub memo: bool,
    pub oracle_cap: u32,
    pub format: Format,
}

pub struct ValidateOutcome {
    pub ok: bool,
    pub max_rel_err: f64,
    pub report: String,
}

const VALIDATE_TOLERANCE: f64 = 1e-10;
const MPE_TOLERANCE: f64 = 1e-12;

/// Runs a seeded random query battery, lifted engine against the cached
/// oracle. `perturb` multiplicatively skews the lifted probabilities and
/// exists so the harness itself can be tested; pass 0.0 for real runs.
pub fn run_validate(cfg: &ValidateConfig, perturb: f64) -> Result<ValidateOutcome, AppError> {
    let gm = load_model(&cfg.model)?;
    let fragment = classify(&gm.model);
    if fragment == FragmentClass::Unsupported {
        return Err(AppError::engine(
            "validate needs a monadic or two-variable model",
        ));
    }
    let oracle = CachedOracle::new(&gm, cfg.oracle_cap)
        .map_err(|e| AppError::engine(format!("validate needs the oracle: {e}")))?;
    let opts = EngineOptions {
        jobs: cfg.jobs.max(1),
        memo: cfg.memo,
        ..EngineOptions::default()
    };
    let monadic = fragment == FragmentClass::Monadic;
    let decomp = if monadic {
        Some(monadic_decomposition(&gm).expect("fragment checked"))
    } else {
        None
    };

    // atoms eligible for evidence and queries: everything in the monadic
    // case; unary plus reflexive binary atoms in the two-variable case,
    // with at most one off-diagonal binary atom per trial when the context
    // bound allows it
    let scope_atoms: Vec<u32> = (0..gm.atom_count())
        .filter(|&a| {
            let atom = gm.atom(a);
            atom.args.len() == 1 || atom.args[0] == atom.args[1]
        })
        .collect();
    let off_diag: Vec<u32> = (0..gm.atom_count())
        .filter(|&a| {
            let atom = gm.atom(a);
            atom.args.len() == 2 && atom.args[0] != atom.args[1]
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = String::new();
    let _ = writeln!(
        report,
        "validate model={} fragment={} atoms={} seed={} trials={} jobs={}",
        cfg.model.display(),
        fragment,
        gm.atom_count(),
        cfg.seed,
        cfg.trials,
        cfg.jobs.max(1)
    );
    let mut max_rel_err = 0.0f64;
    let mut mpe_checks = 0u32;
    let mut max_mpe_diff = 0.0f64;

    for trial in 0..cfg.trials {
        let mut e = Evidence::new();
        for &atom in &scope_atoms {
            if rng.gen_bool(0.25) {
                e.set(atom, rng.gen_bool(0.5)).unwrap();
            }
        }
        let binary_ok = !monadic && cfg.k_bound >= 2 && !off_diag.is_empty();
        let mut query_pool: Vec<u32> = scope_atoms
            .iter()
            .copied()
            .filter(|&a| e.get(a).is_none())
            .collect();
        if binary_ok && rng.gen_bool(0.35) {
            let atom = off_diag[rng.gen_range(0..off_diag.len())];
            if rng.gen_bool(0.5) {
                e.set(atom, rng.gen_bool(0.5)).unwrap();
            } else {
                query_pool = vec![atom];
            }
        }
        if query_pool.is_empty() {
            e = Evidence::new();
            query_pool = vec![scope_atoms[rng.gen_range(0..scope_atoms.len())]];
        }
        let q_atom = query_pool[rng.gen_range(0..query_pool.len())];
        let mut q = Evidence::new();
        q.set(q_atom, true).unwrap();
        let joint = q.union(&e).unwrap();

        let lifted_p = match &decomp {
            Some(d) => {
                let top = lifted_marginal(&gm, d, &joint, &opts).map_err(engine_err)?;
                let bottom = lifted_marginal(&gm, d, &e, &opts).map_err(engine_err)?;
                orbitmln_core::numeric::exp(top.log_evidence - bottom.log_evidence)
            }
            None => {
                let top =
                    bounded_binary_marginal(&gm, &joint, cfg.k_bound, &opts).map_err(engine_err)?;
                let bottom =
                    bounded_binary_marginal(&gm, &e, cfg.k_bound, &opts).map_err(engine_err)?;
                orbitmln_core::numeric::exp(top.log_evidence - bottom.log_evidence)
            }
        };
        let lifted_p = (lifted_p * (1.0 + perturb)).min(1.0);
        let oracle_p = oracle.conditional(&q, &e);
        let rel = (lifted_p - oracle_p).abs() / oracle_p.abs().max(f64::MIN_POSITIVE);
        if rel > max_rel_err {
            max_rel_err = rel;
        }
        let _ = writeln!(
            report,
            "trial {trial:03} |e|={} q={}=1 lifted={lifted_p} oracle={oracle_p} rel={rel:e}",
            e.len(),
            gm.atom_name(q_atom)
        );

        if monadic && trial % 4 == 0 {
            let d = decomp.as_ref().expect("monadic");
            let out = lifted_mpe(&gm, d, &e, &opts).map_err(engine_err)?;
            let (_, brute_w) = oracle.mpe(&e);
            let diff = (out.log_weight - brute_w).abs();
            if diff > max_mpe_diff {
                max_mpe_diff = diff;
            }
            mpe_checks += 1;
        }
    }

    let ok = max_rel_err <= VALIDATE_TOLERANCE && max_mpe_diff <= MPE_TOLERANCE;
    let _ = writeln!(
        report,
        "mpe_checks: {mpe_checks} max_log_weight_diff: {max_mpe_diff:e}"
    );
    let _ = writeln!(report, "max_relative_error: {max_rel_err:e}");
    let _ = writeln!(report, "result: {}", if ok { "PASS" } else { "FAIL" });

    let rendered = match cfg.format {
        Format::Text => report,
        Format::Json => {
            #[derive(Serialize)]
            struct Summary<'a> {
                model: String,
                fragment: String,
                seed: u64,
                trials: u32,
                max_relative_error: f64,
                mpe_checks: u32,
                max_log_weight_diff: f64,
                result: &'a str,
            }
            serde_json::to_string_pretty(&Summary {
                model: cfg.model.display().to_string(),
                fragment: fragment.to_string(),
                seed: cfg.seed,
                trials: cfg.trials,
                max_relative_error: max_rel_err,
                mpe_checks,
                max_log_weight_diff: max_mpe_diff,
                result: if ok { "PASS" } else { "FAIL" },
            })
            .expect("summary serializes")
        }
    };
    Ok(ValidateOutcome {
        ok,
        max_rel_err,
        report: rendered,
    })
}

// ---- bench ----------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub model: PathBuf,
    pub k_list: Vec<u16>,
    pub jobs: usize,
    pub memo: bool,
    pub oracle_cap: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub k: u16,
    pub statistics: String,
    pub elapsed_ms: String,
    pub engine: &'static str,
}

/// Re-grounds the model at every requested domain size (constants renamed
/// to `C1..Ck`), runs one single-atom marginal per size on the lifted
/// engine, and reports the oracle alongside — run when it fits its cap,
/// marked infeasible otherwise.
pub fn run_bench(cfg: &BenchConfig) -> Result<(Vec<BenchRow>, String), AppError> {
    let text = std::fs::read_to_string(&cfg.model)
        .map_err(|e| AppError::input(format!("cannot read {}: {e}", cfg.model.display())))?;
    let base = MlnModel::parse(&text)
        .map_err(|e| AppError::input(format!("{}: {e}", cfg.model.display())))?;
    let opts = EngineOptions {
        jobs: cfg.jobs.max(1),
        memo: cfg.memo,
        ..EngineOptions::default()
    };
    let mut rows: Vec<BenchRow> = Vec::new();
    for &k in &cfg.k_list {
        if k == 0 {
            return Err(AppError::input("domain sizes must be positive"));
        }
        let mut model = base.clone();
        model.constants = (1..=k).map(|i| format!("C{i}")).collect();
        let gm =
            GroundModel::ground(model).map_err(|e| AppError::input(format!("k={k}: {e}")))?;
        let fragment = classify(&gm.model);
        let mut e = Evidence::new();
        e.set(0, true).unwrap();
        let started = Instant::now();
        let visited = match fragment {
            FragmentClass::Monadic => {
                let d = monadic_decomposition(&gm).expect("fragment checked");
                lifted_marginal(&gm, &d, &e, &opts)
                    .map_err(engine_err)?
                    .statistics_visited
            }
            FragmentClass::TwoVariable => bounded_binary_marginal(&gm, &e, 0, &opts)
                .map_err(engine_err)?
                .statistics_visited,
            FragmentClass::Unsupported => {
                return Err(AppError::engine(
                    "bench needs a monadic or two-variable model",
                ))
            }
        };
        rows.push(BenchRow {
            k,
            statistics: visited.to_string(),
            elapsed_ms: started.elapsed().as_millis().to_string(),
            engine: "lifted",
        });
        // the oracle entry: run it when it fits, otherwise mark infeasible
        let n = gm.atom_count();
        let worlds = (BigUint::from(1u32) << n).to_string();
        if n <= cfg.oracle_cap.min(63) {
            let started = Instant::now();
            oracle::brute_marginal(&gm, &e, cfg.oracle_cap)
                .map_err(|e| AppError::engine(e.to_string()))?;
            rows.push(BenchRow {
                k,
                statistics: worlds,
                elapsed_ms: started.elapsed().as_millis().to_string(),
                engine: "oracle",
            });
        } else {
            rows.push(BenchRow {
                k,
                statistics: worlds,
                elapsed_ms: "infeasible".into(),
                engine: "oracle",
            });
        }
    }
    let mut csv = String::from("k,statistics,elapsed_ms,engine\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            row.k, row.statistics, row.elapsed_ms, row.engine
        );
    }
    Ok((rows, csv))
}
