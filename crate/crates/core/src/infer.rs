//! Orbit-sum inference engines.
//!
//! All engines share one scheme: enumerate every value `t` of the sufficient
//! statistic, compute the unnormalized log weight of one representative
//! world per `t` (all members of an orbit weigh the same), and accumulate
//!
//! * the evidence sum  `sum_t |S_{t,e}| * weight(t)` and
//! * the partition sum `sum_t |S_t|     * weight(t)`
//!
//! in a single pass, in log space. Marginals are the ratio of the two sums;
//! MPE picks the feasible statistic with the largest weight. The full-scope
//! engine covers models whose whole atom set is exchangeably decomposed
//! (monadic models); the conditional engine handles the two-variable
//! fragment by evaluating per-block scope factors on the representative and
//! summing each lifted pair's off-diagonal atoms out exactly; queries that
//! name off-diagonal binary atoms are routed through an exhaustive sweep of
//! the bounded context those atoms span.
//!
//! The statistic stream is split into fixed-size chunks whose partial
//! accumulators are merged in chunk order, so results are byte-identical
//! for every thread count.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::combi::{advance_composition, composition_at_rank, Factorials};
use crate::detect::{ConditionalStructure, FactorGroup, FragmentError};
use crate::exchange::{
    evidence_profile, first_fill, statistic_space_size, suborbit_and_first, write_canonical,
    write_fill, Decomposition, EvidenceProfile, ScopeError,
};
use crate::numeric::{exp, ln_big, LogSumExp};
use crate::world::{AtomId, Evidence, GroundModel};

const CHUNK: u64 = 4096;

/// How the per-statistic weight is obtained in the full-scope engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightEval {
    /// Tabulated per-statistic evaluation when the model is monadic and the
    /// decomposition is the canonical per-constant one; per-world otherwise.
    Auto,
    /// Always build the representative and evaluate every ground factor.
    PerWorld,
    /// Require the tabulated path; error when it does not apply.
    Tabulated,
}

#[derive(Clone, Copy, Debug)]
pub struct EngineOptions {
    pub jobs: usize,
    /// Cache pair sums by block-pattern pair instead of recomputing them.
    pub memo: bool,
    pub weight_eval: WeightEval,
    /// Upper bound on (context states) x (statistics) x (patterns); the
    /// engine refuses work beyond it rather than running for hours.
    pub work_budget: u64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            jobs: 1,
            memo: true,
            weight_eval: WeightEval::Auto,
            work_budget: 2_000_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MarginalOutcome {
    pub probability: f64,
    pub log_evidence: f64,
    pub log_partition: f64,
    pub statistics_visited: u64,
    pub statistics_infeasible: u64,
}

#[derive(Clone, Debug)]
pub struct MpeOutcome {
    /// Maximum-weight completion over the engine's scope (all atoms for the
    /// full-scope engine; block and context atoms for the conditional one).
    pub assignment: Vec<(AtomId, bool)>,
    pub log_weight: f64,
    pub log_partition: f64,
    pub statistics_visited: u64,
    pub statistics_infeasible: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InferError {
    /// The decomposition must cover every ground atom.
    ScopeNotCovered,
    EvidenceOutsideScope(AtomId),
    /// Conditional evidence may not touch off-diagonal atoms of lifted pairs.
    PairEvidence(AtomId),
    Fragment(FragmentError),
    ContextTooLarge { constants: usize, bound: usize },
    WorkBudget { estimate: u128, budget: u64 },
    TabulationUnavailable,
    NoFeasibleStatistic,
}

impl fmt::Display for InferError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InferError::ScopeNotCovered => {
                write!(f, "the decomposition does not cover every ground atom")
            }
            InferError::EvidenceOutsideScope(a) => {
                write!(f, "evidence atom {a} lies outside the decomposition scope")
            }
            InferError::PairEvidence(a) => write!(
                f,
                "evidence atom {a} is an off-diagonal binary atom; route it through the bounded binary query"
            ),
            InferError::Fragment(e) => write!(f, "{e}"),
            InferError::ContextTooLarge { constants, bound } => write!(
                f,
                "the query's binary atoms span {constants} constants, above the bound of {bound}"
            ),
            InferError::WorkBudget { estimate, budget } => write!(
                f,
                "estimated lifted work {estimate} exceeds the budget {budget}; the width or domain is too large"
            ),
            InferError::TabulationUnavailable => write!(
                f,
                "tabulated weights require a monadic model with its canonical decomposition"
            ),
            InferError::NoFeasibleStatistic => {
                write!(f, "no statistic admits the evidence")
            }
        }
    }
}

impl core::error::Error for InferError {}

impl From<FragmentError> for InferError {
    fn from(e: FragmentError) -> Self {
        InferError::Fragment(e)
    }
}

impl From<ScopeError> for InferError {
    fn from(e: ScopeError) -> Self {
        match e {
            ScopeError::OutOfScope(a) => InferError::EvidenceOutsideScope(a),
        }
    }
}

// ---- chunk scheduling ---------------------------------------------------

#[derive(Clone, Debug)]
struct Partial {
    num: LogSumExp,
    den: LogSumExp,
    visited: u64,
    infeasible: u64,
    best: Option<(f64, u64, Vec<u64>)>, // (log weight, context state, statistic)
}

impl Partial {
    fn new() -> Partial {
        Partial {
            num: LogSumExp::new(),
            den: LogSumExp::new(),
            visited: 0,
            infeasible: 0,
            best: None,
        }
    }

    /// Folds a later partial into this one; ties keep the earlier candidate,
    /// which is the lexicographically smaller statistic.
    fn absorb(&mut self, other: Partial) {
        self.num.merge(&other.num);
        self.den.merge(&other.den);
        self.visited += other.visited;
        self.infeasible += other.infeasible;
        if let Some((lw, q, t)) = other.best {
            if self.best.as_ref().map(|(b, _, _)| lw > *b).unwrap_or(true) {
                self.best = Some((lw, q, t));
            }
        }
    }
}

/// Runs `work` over chunk indices `0..chunk_count` and returns the results
/// in index order. Worker scheduling never affects the output because each
/// chunk is a pure function of its index.
fn run_chunks<P: Send>(jobs: usize, chunk_count: u64, work: impl Fn(u64) -> P + Sync) -> Vec<P> {
    #[cfg(feature = "std")]
    if jobs > 1 && chunk_count > 1 {
        use std::sync::atomic::{AtomicU64, Ordering};
        use std::sync::Mutex;
        let next = AtomicU64::new(0);
        let results: Mutex<Vec<Option<P>>> =
            Mutex::new((0..chunk_count).map(|_| None).collect());
        std::thread::scope(|s| {
            for _ in 0..jobs.min(chunk_count as usize) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= chunk_count {
                        break;
                    }
                    let p = work(i);
                    results.lock().unwrap()[i as usize] = Some(p);
                });
            }
        });
        return results
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|p| p.expect("every chunk ran"))
            .collect();
    }
    #[cfg(not(feature = "std"))]
    let _ = jobs;
    (0..chunk_count).map(work).collect()
}

fn statistic_count_u64(k: u64, width: u32) -> Result<u64, InferError> {
    u64::try_from(&statistic_space_size(k, width)).map_err(|_| InferError::WorkBudget {
        estimate: u128::MAX,
        budget: 0,
    })
}

fn check_budget(states: u128, t_count: u64, parts: u64, budget: u64) -> Result<(), InferError> {
    let estimate = states
        .saturating_mul(t_count as u128)
        .saturating_mul(parts as u128);
    if estimate > budget as u128 {
        return Err(InferError::WorkBudget { estimate, budget });
    }
    Ok(())
}

fn probability_of(log_num: f64, log_den: f64) -> f64 {
    if log_num == f64::NEG_INFINITY {
        return 0.0;
    }
    exp(log_num - log_den).min(1.0)
}

// ---- tabulated weights for monadic models -------------------------------

/// Per-formula truth tables over block-pattern tuples. For a monadic model
/// the truth of a grounding depends only on each variable's block pattern,
/// so the satisfied-grounding count of a formula with `v` variables is
/// `sum over pattern tuples tau of [truth(tau)] * prod_p counts[tau_p]`
/// (ordered tuples, repeats included, exactly like the grounding).
pub(crate) struct StatTables {
    parts: usize,
    entries: Vec<TableEntry>,
}

struct TableEntry {
    weight: f64,
    vars: usize,
    truth: Vec<bool>,
}

const MAX_TABLE: usize = 1 << 22;

impl StatTables {
    /// Builds the tables when the model is monadic and `d` is its canonical
    /// per-constant decomposition; `None` otherwise.
    pub(crate) fn build(gm: &GroundModel, d: &Decomposition) -> Option<StatTables> {
        let preds = gm.model.predicates.len();
        if preds == 0 || gm.model.predicates.iter().any(|p| p.arity != 1) {
            return None;
        }
        let k = gm.domain_size();
        if d.block_count() != k as usize || d.width() as usize != preds {
            return None;
        }
        for (i, block) in d.blocks().iter().enumerate() {
            for (p, &atom) in block.iter().enumerate() {
                if atom != gm.atom_id(p as u16, &[i as u16]) {
                    return None;
                }
            }
        }
        let parts = 1usize << preds;
        let width = preds as u32;
        let mut entries = Vec::with_capacity(gm.model.formulas.len());
        for wf in &gm.model.formulas {
            let v = wf.vars.len();
            let size = parts.checked_pow(v as u32).filter(|&s| s <= MAX_TABLE)?;
            // counts can overflow u128 only for absurd (k, v) combinations
            (k as u128).checked_pow(v as u32)?;
            let mut truth = Vec::with_capacity(size);
            let mut tuple = vec![0usize; v];
            for code in 0..size {
                let mut rest = code;
                for slot in (0..v).rev() {
                    tuple[slot] = rest % parts;
                    rest /= parts;
                }
                let sat = wf.formula.eval_with(&mut |atom: &crate::fol::Atom| {
                    let pattern = tuple[atom.args[0] as usize];
                    (pattern >> (width - 1 - atom.pred as u32)) & 1 == 1
                });
                truth.push(sat);
            }
            entries.push(TableEntry {
                weight: wf.weight,
                vars: v,
                truth,
            });
        }
        Some(StatTables { parts, entries })
    }

    pub(crate) fn log_weight(&self, counts: &[u64]) -> f64 {
        let mut total = 0.0;
        for e in &self.entries {
            let sat = count_satisfied(&e.truth, self.parts, counts, 0, e.vars, 0, 1);
            total += e.weight * sat as f64;
        }
        total
    }
}

fn count_satisfied(
    truth: &[bool],
    parts: usize,
    counts: &[u64],
    depth: usize,
    vars: usize,
    base: usize,
    mult: u128,
) -> u128 {
    if depth == vars {
        return if truth[base] { mult } else { 0 };
    }
    let mut acc = 0u128;
    for (p, &c) in counts.iter().enumerate().take(parts) {
        if c > 0 {
            acc += count_satisfied(
                truth,
                parts,
                counts,
                depth + 1,
                vars,
                base * parts + p,
                mult * c as u128,
            );
        }
    }
    acc
}

// ---- full-scope engine ---------------------------------------------------

struct FullScopePlan<'a> {
    gm: &'a GroundModel,
    d: &'a Decomposition,
    facts: Factorials,
    profile: EvidenceProfile,
    tables: Option<StatTables>,
    k: u64,
    parts: u64,
    t_count: u64,
}

fn full_scope_plan<'a>(
    gm: &'a GroundModel,
    d: &'a Decomposition,
    e: &Evidence,
    opts: &EngineOptions,
) -> Result<FullScopePlan<'a>, InferError> {
    if d.scope_size() != gm.atom_count() as usize {
        return Err(InferError::ScopeNotCovered);
    }
    let k = d.block_count() as u64;
    let parts = 1u64 << d.width();
    let t_count = statistic_count_u64(k, d.width())?;
    check_budget(1, t_count, parts, opts.work_budget)?;
    let profile = evidence_profile(e, d)?;
    let tables = match opts.weight_eval {
        WeightEval::PerWorld => None,
        WeightEval::Auto => StatTables::build(gm, d),
        WeightEval::Tabulated => {
            Some(StatTables::build(gm, d).ok_or(InferError::TabulationUnavailable)?)
        }
    };
    Ok(FullScopePlan {
        gm,
        d,
        facts: Factorials::upto(k),
        profile,
        tables,
        k,
        parts,
        t_count,
    })
}

fn full_scope_sweep(plan: &FullScopePlan<'_>, opts: &EngineOptions, want_mpe: bool) -> Partial {
    let chunks = plan.t_count.div_ceil(CHUNK);
    let n = plan.gm.atom_count() as usize;
    let parts = plan.parts;
    let per_world = plan.tables.is_none();
    let partials = run_chunks(opts.jobs, chunks, |ci| {
        let start = ci * CHUNK;
        let len = CHUNK.min(plan.t_count - start);
        let mut counts = composition_at_rank(plan.k, parts, start);
        let mut world = vec![false; if per_world { n } else { 0 }];
        let mut codes = vec![0u64; plan.k as usize];
        let mut partial = Partial::new();
        for _ in 0..len {
            let (sub, fill) = suborbit_and_first(&counts, &plan.profile, &plan.facts);
            let feasible = sub != BigUint::ZERO;
            let lw = match &plan.tables {
                Some(tables) => tables.log_weight(&counts),
                None => {
                    // any orbit member weighs the same; prefer the
                    // evidence-compatible one when it exists
                    match &fill {
                        Some(cells) => {
                            write_fill(cells, &plan.profile, plan.d, &mut world, &mut codes)
                        }
                        None => write_canonical(&counts, plan.d, &mut world, &mut codes),
                    }
                    plan.gm.log_weight(&world)
                }
            };
            let orbit = plan
                .facts
                .multinomial(plan.k, counts.iter().copied().filter(|&c| c > 0));
            partial.den.add(ln_big(&orbit) + lw);
            partial.visited += 1;
            if feasible {
                partial.num.add(ln_big(&sub) + lw);
                if want_mpe
                    && partial
                        .best
                        .as_ref()
                        .map(|(b, _, _)| lw > *b)
                        .unwrap_or(true)
                {
                    partial.best = Some((lw, 0, counts.clone()));
                }
            } else {
                partial.infeasible += 1;
            }
            advance_composition(&mut counts);
        }
        partial
    });
    let mut total = Partial::new();
    for p in partials {
        total.absorb(p);
    }
    total
}

/// Marginal probability of the evidence under a decomposition covering all
/// ground atoms: `sum_t |S_{t,e}| w(t) / sum_t |S_t| w(t)`.
pub fn lifted_marginal(
    gm: &GroundModel,
    d: &Decomposition,
    e: &Evidence,
    opts: &EngineOptions,
) -> Result<MarginalOutcome, InferError> {
    let plan = full_scope_plan(gm, d, e, opts)?;
    let total = full_scope_sweep(&plan, opts, false);
    Ok(MarginalOutcome {
        probability: probability_of(total.num.value(), total.den.value()),
        log_evidence: total.num.value(),
        log_partition: total.den.value(),
        statistics_visited: total.visited,
        statistics_infeasible: total.infeasible,
    })
}

/// Maximum-weight world compatible with the evidence, over the same scope.
/// Weight ties go to the lexicographically smallest statistic, then to the
/// canonical representative.
pub fn lifted_mpe(
    gm: &GroundModel,
    d: &Decomposition,
    e: &Evidence,
    opts: &EngineOptions,
) -> Result<MpeOutcome, InferError> {
    let plan = full_scope_plan(gm, d, e, opts)?;
    let total = full_scope_sweep(&plan, opts, true);
    let (lw, _, counts) = total.best.ok_or(InferError::NoFeasibleStatistic)?;
    let cells = first_fill(&counts, &plan.profile, &plan.facts)
        .expect("the argmax statistic is feasible");
    let mut world = vec![false; gm.atom_count() as usize];
    let mut codes = vec![0u64; plan.k as usize];
    write_fill(&cells, &plan.profile, plan.d, &mut world, &mut codes);
    let assignment = (0..gm.atom_count())
        .map(|a| (a, world[a as usize]))
        .collect();
    Ok(MpeOutcome {
        assignment,
        log_weight: lw,
        log_partition: total.den.value(),
        statistics_visited: total.visited,
        statistics_infeasible: total.infeasible,
    })
}

// ---- two-variable conditional engine -------------------------------------

struct CondPlan<'a> {
    gm: &'a GroundModel,
    cs: &'a ConditionalStructure,
    facts: Factorials,
    profile: EvidenceProfile,
    q_mask: u64,
    q_vals: u64,
    q_len: u32,
    scope_factors: Vec<u32>,
    pair_factors: Vec<Vec<u32>>,
    memo: Option<Vec<f64>>,
    bw: u32,
    shift: u32,
    kb: u64,
    parts: u64,
    t_count: u64,
}

/// The exact pair sum: log of the sum over all assignments to the pair's
/// off-diagonal atoms of the exponentiated weight of its satisfied pair
/// factors, in the context of whatever block values `world` already holds.
fn pair_sum_direct(
    gm: &GroundModel,
    atoms: &[AtomId],
    factor_ids: &[u32],
    world: &mut [bool],
) -> f64 {
    let zb = atoms.len();
    let mut lse = LogSumExp::new();
    for zc in 0u64..(1u64 << zb) {
        for (i, &atom) in atoms.iter().enumerate() {
            world[atom as usize] = (zc >> i) & 1 == 1;
        }
        let mut w = 0.0;
        for &fid in factor_ids {
            let factor = &gm.factors[fid as usize];
            if factor.formula.eval_with(&mut |&id| world[id as usize]) {
                w += factor.weight;
            }
        }
        lse.add(w);
    }
    lse.value()
}

/// Log sum over a lifted pair's off-diagonal atom assignments given the two
/// block patterns. Depends only on the (ordered) pattern pair, which is what
/// makes memoization sound; the value is identical for every pair by the
/// domain renaming symmetry.
pub fn pair_factor_sum(
    gm: &GroundModel,
    cs: &ConditionalStructure,
    pattern_i: u64,
    pattern_j: u64,
    pair: usize,
) -> f64 {
    let width = cs.decomp.width();
    let (bi, bj) = cs.pairs[pair];
    let mut world = vec![false; gm.atom_count() as usize];
    for (pos, &atom) in cs.decomp.blocks()[bi as usize].iter().enumerate() {
        world[atom as usize] = (pattern_i >> (width as usize - 1 - pos)) & 1 == 1;
    }
    for (pos, &atom) in cs.decomp.blocks()[bj as usize].iter().enumerate() {
        world[atom as usize] = (pattern_j >> (width as usize - 1 - pos)) & 1 == 1;
    }
    let ids: Vec<u32> = cs
        .factor_groups
        .iter()
        .enumerate()
        .filter(|&(_, g)| *g == FactorGroup::Pair(pair as u32))
        .map(|(i, _)| i as u32)
        .collect();
    pair_sum_direct(gm, &cs.pair_atoms[pair], &ids, &mut world)
}

const MAX_MEMO_WIDTH: u32 = 10;

fn cond_plan<'a>(
    gm: &'a GroundModel,
    cs: &'a ConditionalStructure,
    e: &Evidence,
    opts: &EngineOptions,
) -> Result<CondPlan<'a>, InferError> {
    let width = cs.decomp.width();
    let kb = cs.decomp.block_count() as u64;
    let parts = 1u64 << width;
    let t_count = statistic_count_u64(kb, width)?;
    let q_len = cs.context_atoms.len() as u32;
    if q_len > 32 {
        return Err(InferError::WorkBudget {
            estimate: u128::MAX,
            budget: opts.work_budget,
        });
    }
    check_budget(1u128 << q_len, t_count, parts, opts.work_budget)?;

    // split the evidence into the context part and the block-scope part
    let mut e_scope = Evidence::new();
    let mut q_mask = 0u64;
    let mut q_vals = 0u64;
    for (atom, v) in e.iter() {
        if let Ok(pos) = cs.context_atoms.binary_search(&atom) {
            q_mask |= 1 << pos;
            if v {
                q_vals |= 1 << pos;
            }
        } else if cs.decomp.contains(atom) {
            e_scope.set(atom, v).expect("fresh evidence set");
        } else {
            return Err(InferError::PairEvidence(atom));
        }
    }
    let profile = evidence_profile(&e_scope, &cs.decomp)?;

    let scope_factors: Vec<u32> = cs
        .factor_groups
        .iter()
        .enumerate()
        .filter(|&(_, g)| *g == FactorGroup::Scope)
        .map(|(i, _)| i as u32)
        .collect();
    let mut pair_factors: Vec<Vec<u32>> = vec![Vec::new(); cs.pairs.len()];
    for (i, g) in cs.factor_groups.iter().enumerate() {
        if let FactorGroup::Pair(p) = g {
            pair_factors[*p as usize].push(i as u32);
        }
    }

    let bw = cs.base_width;
    let memo = if opts.memo && !cs.pairs.is_empty() && bw <= MAX_MEMO_WIDTH {
        let side = 1usize << bw;
        let mut table = vec![0.0f64; side * side];
        let mut scratch = vec![false; gm.atom_count() as usize];
        let (b0, b1) = cs.pairs[0];
        let blocks = cs.decomp.blocks();
        for a in 0..side as u64 {
            for (pos, &atom) in blocks[b0 as usize].iter().take(bw as usize).enumerate() {
                scratch[atom as usize] = (a >> (bw as usize - 1 - pos)) & 1 == 1;
            }
            for b in 0..side as u64 {
                for (pos, &atom) in blocks[b1 as usize].iter().take(bw as usize).enumerate() {
                    scratch[atom as usize] = (b >> (bw as usize - 1 - pos)) & 1 == 1;
                }
                table[(a as usize) * side + b as usize] =
                    pair_sum_direct(gm, &cs.pair_atoms[0], &pair_factors[0], &mut scratch);
            }
        }
        Some(table)
    } else {
        None
    };

    Ok(CondPlan {
        gm,
        cs,
        facts: Factorials::upto(kb),
        profile,
        q_mask,
        q_vals,
        q_len,
        scope_factors,
        pair_factors,
        memo,
        bw,
        // zero blocks leave the width at 0; the shift is unused then
        shift: width.saturating_sub(cs.base_width),
        kb,
        parts,
        t_count,
    })
}

fn cond_sweep(plan: &CondPlan<'_>, opts: &EngineOptions, want_mpe: bool) -> Partial {
    let n = plan.gm.atom_count() as usize;
    let chunks = plan.t_count.div_ceil(CHUNK);
    let side = 1usize << plan.bw;
    let mut total = Partial::new();
    for q in 0u64..(1u64 << plan.q_len) {
        let eligible = q & plan.q_mask == plan.q_vals;
        let partials = run_chunks(opts.jobs, chunks, |ci| {
            let start = ci * CHUNK;
            let len = CHUNK.min(plan.t_count - start);
            let mut counts = composition_at_rank(plan.kb, plan.parts, start);
            let mut world = vec![false; n];
            let mut codes = vec![0u64; plan.kb as usize];
            for (pos, &atom) in plan.cs.context_atoms.iter().enumerate() {
                world[atom as usize] = (q >> pos) & 1 == 1;
            }
            let mut partial = Partial::new();
            for _ in 0..len {
                let (sub, fill) = if eligible {
                    suborbit_and_first(&counts, &plan.profile, &plan.facts)
                } else {
                    (BigUint::ZERO, None)
                };
                match &fill {
                    Some(cells) => {
                        write_fill(cells, &plan.profile, &plan.cs.decomp, &mut world, &mut codes)
                    }
                    None => write_canonical(&counts, &plan.cs.decomp, &mut world, &mut codes),
                }
                let mut lw = 0.0;
                for &fid in &plan.scope_factors {
                    let factor = &plan.gm.factors[fid as usize];
                    if factor.formula.eval_with(&mut |&id| world[id as usize]) {
                        lw += factor.weight;
                    }
                }
                for (pid, &(bi, bj)) in plan.cs.pairs.iter().enumerate() {
                    lw += match &plan.memo {
                        Some(table) => {
                            let a = (codes[bi as usize] >> plan.shift) as usize;
                            let b = (codes[bj as usize] >> plan.shift) as usize;
                            table[a * side + b]
                        }
                        None => pair_sum_direct(
                            plan.gm,
                            &plan.cs.pair_atoms[pid],
                            &plan.pair_factors[pid],
                            &mut world,
                        ),
                    };
                }
                let orbit = plan
                    .facts
                    .multinomial(plan.kb, counts.iter().copied().filter(|&c| c > 0));
                partial.den.add(ln_big(&orbit) + lw);
                partial.visited += 1;
                if eligible {
                    if sub != BigUint::ZERO {
                        partial.num.add(ln_big(&sub) + lw);
                        if want_mpe
                            && partial
                                .best
                                .as_ref()
                                .map(|(b, _, _)| lw > *b)
                                .unwrap_or(true)
                        {
                            partial.best = Some((lw, q, counts.clone()));
                        }
                    } else {
                        partial.infeasible += 1;
                    }
                }
                advance_composition(&mut counts);
            }
            partial
        });
        for p in partials {
            total.absorb(p);
        }
    }
    total
}

/// Marginal probability of evidence over the exchangeable block scope (and
/// context atoms, when the structure carries a context). For every feasible
/// statistic the engine builds a representative block assignment, adds the
/// scope-factor weight, and sums each lifted pair's off-diagonal atoms out
/// through the pair-sum table.
pub fn conditional_marginal(
    gm: &GroundModel,
    cs: &ConditionalStructure,
    e: &Evidence,
    opts: &EngineOptions,
) -> Result<MarginalOutcome, InferError> {
    let plan = cond_plan(gm, cs, e, opts)?;
    let total = cond_sweep(&plan, opts, false);
    Ok(MarginalOutcome {
        probability: probability_of(total.num.value(), total.den.value()),
        log_evidence: total.num.value(),
        log_partition: total.den.value(),
        statistics_visited: total.visited,
        statistics_infeasible: total.infeasible,
    })
}

/// MPE over the marginal distribution of the block scope (plus context):
/// the returned assignment maximizes the summed-out weight
/// `sum_z weight(scope, z)`, not the joint weight of a single world.
pub fn conditional_mpe(
    gm: &GroundModel,
    cs: &ConditionalStructure,
    e: &Evidence,
    opts: &EngineOptions,
) -> Result<MpeOutcome, InferError> {
    let plan = cond_plan(gm, cs, e, opts)?;
    let total = cond_sweep(&plan, opts, true);
    let (lw, q, counts) = total.best.ok_or(InferError::NoFeasibleStatistic)?;
    let cells = first_fill(&counts, &plan.profile, &plan.facts)
        .expect("the argmax statistic is feasible");
    let mut world = vec![false; gm.atom_count() as usize];
    let mut codes = vec![0u64; plan.kb as usize];
    write_fill(&cells, &plan.profile, &cs.decomp, &mut world, &mut codes);
    let mut assignment: Vec<(AtomId, bool)> = cs
        .context_atoms
        .iter()
        .enumerate()
        .map(|(pos, &atom)| (atom, (q >> pos) & 1 == 1))
        .chain(cs.decomp.scope().map(|a| (a, world[a as usize])))
        .collect();
    assignment.sort_unstable();
    Ok(MpeOutcome {
        assignment,
        log_weight: lw,
        log_partition: total.den.value(),
        statistics_visited: total.visited,
        statistics_infeasible: total.infeasible,
    })
}

/// Constants named by off-diagonal binary evidence atoms, ascending. These
/// are the constants a bounded binary query must enumerate exhaustively.
/// Reflexive binary atoms stay inside their constant's block and contribute
/// nothing here.
pub fn binary_context(gm: &GroundModel, e: &Evidence) -> Vec<u16> {
    let mut set = alloc::collections::BTreeSet::new();
    for (atom, _) in e.iter() {
        let a = gm.atom(atom);
        if a.args.len() == 2 && a.args[0] != a.args[1] {
            set.insert(a.args[0]);
            set.insert(a.args[1]);
        }
    }
    set.into_iter().collect()
}

fn bounded_structure(
    gm: &GroundModel,
    e: &Evidence,
    bound: usize,
) -> Result<ConditionalStructure, InferError> {
    let context = binary_context(gm, e);
    if context.len() > bound {
        return Err(InferError::ContextTooLarge {
            constants: context.len(),
            bound,
        });
    }
    Ok(crate::detect::conditional_structure(gm, &context)?)
}

/// Marginal query that may name off-diagonal binary atoms, as long as the
/// constants they span fit the bound. All atoms over those constants are
/// enumerated exhaustively; the remaining constants keep their (widened)
/// exchangeable blocks. With no binary evidence this is exactly
/// [`conditional_marginal`], statistic for statistic.
pub fn bounded_binary_marginal(
    gm: &GroundModel,
    e: &Evidence,
    bound: usize,
    opts: &EngineOptions,
) -> Result<MarginalOutcome, InferError> {
    let cs = bounded_structure(gm, e, bound)?;
    conditional_marginal(gm, &cs, e, opts)
}

/// MPE twin of [`bounded_binary_marginal`]: maximizes the summed-out weight
/// over the context atoms and the widened blocks.
pub fn bounded_binary_mpe(
    gm: &GroundModel,
    e: &Evidence,
    bound: usize,
    opts: &EngineOptions,
) -> Result<MpeOutcome, InferError> {
    let cs = bounded_structure(gm, e, bound)?;
    conditional_mpe(gm, &cs, e, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{monadic_decomposition, two_var_structure};
    use crate::oracle;
    use crate::world::ground_text;

    fn ev(gm: &GroundModel, pairs: &[(&str, bool)]) -> Evidence {
        let mut e = Evidence::new();
        for &(name, v) in pairs {
            e.set(gm.parse_atom(name).unwrap(), v).unwrap();
        }
        e
    }

    fn opts() -> EngineOptions {
        EngineOptions::default()
    }

    #[test]
    fn closed_form_independent_smokers() {
        let expected = 1.5f64.exp() / (1.0 + 1.5f64.exp());
        for k in [1u16, 2, 7, 50] {
            let gm = ground_text(&alloc::format!("domain {k}\n1.5\tSmokes(x)\n"));
            let d = monadic_decomposition(&gm).unwrap();
            let e = ev(&gm, &[("Smokes(C1)", true)]);
            let out = lifted_marginal(&gm, &d, &e, &opts()).unwrap();
            assert!((out.probability - expected).abs() < 1e-12, "k={k}");
            assert_eq!(out.statistics_visited, k as u64 + 1);
        }
    }

    #[test]
    fn empty_evidence_is_exactly_one() {
        let gm = ground_text("domain 6\n1.5\tS(x) & S(y)\n0.3\tS(x)\n");
        let d = monadic_decomposition(&gm).unwrap();
        let out = lifted_marginal(&gm, &d, &Evidence::new(), &opts()).unwrap();
        assert_eq!(out.probability, 1.0);
    }

    #[test]
    fn pair_model_matches_oracle() {
        let gm = ground_text("domain 3\n1.5\tS(x) & S(y)\n");
        let d = monadic_decomposition(&gm).unwrap();
        let e = ev(&gm, &[("S(C1)", true)]);
        let lifted = lifted_marginal(&gm, &d, &e, &opts()).unwrap().probability;
        let brute = oracle::brute_marginal(&gm, &e, 25).unwrap();
        assert!((lifted - brute).abs() <= 1e-12 * brute);
    }

    #[test]
    fn tabulated_matches_per_world_small_domains() {
        let models = [
            "domain 4\n1.5\tS(x) & S(y)\n1.3\tS(x) => C(x)\n",
            "domain 3\n-0.7\tA(x) | B(y)\n0.4\tA(x) <=> B(x)\n",
            "domain 2\n0.9\tA(x) & B(y) & A(z)\n",
        ];
        for src in models {
            let gm = ground_text(src);
            let d = monadic_decomposition(&gm).unwrap();
            for atom in 0..gm.atom_count().min(3) {
                let mut e = Evidence::new();
                e.set(atom, atom % 2 == 0).unwrap();
                let mut tab = opts();
                tab.weight_eval = WeightEval::Tabulated;
                let mut direct = opts();
                direct.weight_eval = WeightEval::PerWorld;
                let a = lifted_marginal(&gm, &d, &e, &tab).unwrap();
                let b = lifted_marginal(&gm, &d, &e, &direct).unwrap();
                assert!(
                    (a.probability - b.probability).abs() <= 1e-12,
                    "{src} atom {atom}: {} vs {}",
                    a.probability,
                    b.probability
                );
                assert!((a.log_partition - b.log_partition).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn tabulated_weight_equals_representative_weight_per_statistic() {
        // the table route must agree with scoring the canonical orbit member
        // directly, statistic for statistic, before it is trusted at scale
        let models = [
            "domain 6\n1.5\tS(x) & S(y)\n1.3\tS(x) => C(x)\n",
            "domain 5\n-0.7\tA(x) | B(y)\n0.4\tA(x) <=> B(x)\n0.9\tB(x) & A(y) & B(z)\n",
            "domain 4\n0.25\tA(x) & !A(y)\n",
        ];
        for src in models {
            let gm = ground_text(src);
            let d = monadic_decomposition(&gm).unwrap();
            let tables = StatTables::build(&gm, &d).unwrap();
            let n = gm.atom_count() as usize;
            let k = d.block_count() as u64;
            let mut world = vec![false; n];
            let mut codes = vec![0u64; k as usize];
            for t in crate::exchange::enumerate_statistics(k, d.width()) {
                write_canonical(&t.counts, &d, &mut world, &mut codes);
                let direct = gm.log_weight(&world);
                let tabulated = tables.log_weight(&t.counts);
                assert!(
                    (direct - tabulated).abs() < 1e-9,
                    "{src}: t={:?} direct {direct} vs tabulated {tabulated}",
                    t.counts
                );
            }
        }
    }

    #[test]
    fn mpe_sign_examples() {
        let gm = ground_text("domain 3\n1.5\tS(x)\n");
        let d = monadic_decomposition(&gm).unwrap();
        let out = lifted_mpe(&gm, &d, &Evidence::new(), &opts()).unwrap();
        assert!(out.assignment.iter().all(|&(_, v)| v));
        assert!((out.log_weight - 4.5).abs() < 1e-12);

        let gm = ground_text("domain 3\n-1.5\tS(x)\n");
        let d = monadic_decomposition(&gm).unwrap();
        let out = lifted_mpe(&gm, &d, &Evidence::new(), &opts()).unwrap();
        assert!(out.assignment.iter().all(|&(_, v)| !v));
        assert_eq!(out.log_weight, 0.0);
    }

    #[test]
    fn mpe_weight_matches_oracle_exactly() {
        let gm = ground_text("domain 3\n1.5\tS(x) & S(y)\n1.3\tS(x) => C(x)\n");
        let d = monadic_decomposition(&gm).unwrap();
        let e = ev(&gm, &[("S(C2)", false), ("C(C1)", true)]);
        let lifted = lifted_mpe(&gm, &d, &e, &opts()).unwrap();
        let (_, brute) = oracle::brute_mpe(&gm, &e, 25).unwrap();
        assert!((lifted.log_weight - brute).abs() < 1e-12);
        // the reported assignment reaches the reported weight
        let world: Vec<bool> = {
            let mut w = vec![false; gm.atom_count() as usize];
            for &(a, v) in &lifted.assignment {
                w[a as usize] = v;
            }
            w
        };
        assert!((gm.log_weight(&world) - lifted.log_weight).abs() < 1e-12);
        assert!(e.compatible(&world));
    }

    const FRIENDS2: &str = "constants A B\n1.3\tSmokes(x) => Cancer(x)\n1.5\tSmokes(x) & Friends(x,y) => Smokes(y)\n";
    const FRIENDS3: &str = "constants A B C\n1.3\tSmokes(x) => Cancer(x)\n1.5\tSmokes(x) & Friends(x,y) => Smokes(y)\n";

    #[test]
    fn conditional_matches_oracle_k2() {
        let gm = ground_text(FRIENDS2);
        let cs = two_var_structure(&gm).unwrap();
        let e = ev(&gm, &[("Smokes(A)", true)]);
        let out = conditional_marginal(&gm, &cs, &e, &opts()).unwrap();
        let brute = oracle::brute_marginal(&gm, &e, 25).unwrap();
        assert!((out.probability - brute).abs() <= 1e-12 * brute);
    }

    #[test]
    fn conditional_rejects_pair_evidence() {
        let gm = ground_text(FRIENDS2);
        let cs = two_var_structure(&gm).unwrap();
        let e = ev(&gm, &[("Friends(A,B)", true)]);
        assert!(matches!(
            conditional_marginal(&gm, &cs, &e, &opts()),
            Err(InferError::PairEvidence(_))
        ));
    }

    #[test]
    fn conditional_without_binary_formulas_matches_full_scope() {
        // reflexive-only binary use: pair sums are a uniform constant that
        // cancels in the normalization
        let gm = ground_text("constants A B C\n0.8\tSmokes(x)\n0.3\tFriends(x,x)\n");
        let cs = two_var_structure(&gm).unwrap();
        let e = ev(&gm, &[("Smokes(A)", true), ("Friends(B,B)", false)]);
        let cond = conditional_marginal(&gm, &cs, &e, &opts()).unwrap();
        let brute = oracle::brute_marginal(&gm, &e, 25).unwrap();
        assert!((cond.probability - brute).abs() <= 1e-12 * brute.max(1e-300));
    }

    #[test]
    fn conditional_single_constant_degenerate() {
        let gm = ground_text("constants A\n1.3\tSmokes(x) => Cancer(x)\n1.5\tSmokes(x) & Friends(x,y) => Smokes(y)\n");
        let cs = two_var_structure(&gm).unwrap();
        assert!(cs.pairs.is_empty());
        let e = ev(&gm, &[("Smokes(A)", true)]);
        let out = conditional_marginal(&gm, &cs, &e, &opts()).unwrap();
        let brute = oracle::brute_marginal(&gm, &e, 25).unwrap();
        assert!((out.probability - brute).abs() <= 1e-12 * brute);
    }

    #[test]
    fn pair_sum_closed_forms() {
        let gm = ground_text(FRIENDS3);
        let cs = two_var_structure(&gm).unwrap();
        // both blocks all-false: premises fail, both implications hold for
        // all four off-diagonal assignments: ln(4 e^3)
        let s = pair_factor_sum(&gm, &cs, 0, 0, 0);
        assert!((s - (4.0f64.ln() + 3.0)).abs() < 1e-12);
        // memoized-by-pattern value is pair independent
        for pair in 0..cs.pairs.len() {
            assert_eq!(pair_factor_sum(&gm, &cs, 0, 0, pair), s);
            assert_eq!(
                pair_factor_sum(&gm, &cs, 5, 3, pair),
                pair_factor_sum(&gm, &cs, 5, 3, 0)
            );
        }
        // reflexive-only binary predicate: uniform over 2^(2N)
        let gm2 = ground_text("constants A B\n0.7\tSmokes(x)\n0.2\tFriends(x,x)\n");
        let cs2 = two_var_structure(&gm2).unwrap();
        let s2 = pair_factor_sum(&gm2, &cs2, 0, 0, 0);
        assert!((s2 - 4.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn memoized_equals_direct() {
        let gm = ground_text(FRIENDS3);
        let cs = two_var_structure(&gm).unwrap();
        let e = ev(&gm, &[("Smokes(A)", true), ("Cancer(B)", false)]);
        let mut memo = opts();
        memo.memo = true;
        let mut direct = opts();
        direct.memo = false;
        let a = conditional_marginal(&gm, &cs, &e, &memo).unwrap();
        let b = conditional_marginal(&gm, &cs, &e, &direct).unwrap();
        assert!((a.probability - b.probability).abs() <= 1e-12 * b.probability);
        assert_eq!(a.statistics_visited, b.statistics_visited);
    }

    #[test]
    fn bounded_no_binary_is_conditional_statistic_for_statistic() {
        let gm = ground_text(FRIENDS3);
        let cs = two_var_structure(&gm).unwrap();
        let e = ev(&gm, &[("Smokes(A)", true)]);
        let cond = conditional_marginal(&gm, &cs, &e, &opts()).unwrap();
        let bounded = bounded_binary_marginal(&gm, &e, 2, &opts()).unwrap();
        assert_eq!(bounded.statistics_visited, cond.statistics_visited);
        assert_eq!(bounded.statistics_infeasible, cond.statistics_infeasible);
        assert_eq!(bounded.probability, cond.probability);
    }

    #[test]
    fn bounded_binary_matches_oracle() {
        let gm = ground_text(FRIENDS3);
        let e = ev(&gm, &[("Friends(A,B)", true)]);
        let out = bounded_binary_marginal(&gm, &e, 2, &opts()).unwrap();
        let brute = oracle::brute_marginal(&gm, &e, 25).unwrap();
        assert!(
            (out.probability - brute).abs() <= 1e-10 * brute,
            "{} vs {}",
            out.probability,
            brute
        );
    }

    #[test]
    fn bounded_joint_query_matches_oracle() {
        let gm = ground_text(FRIENDS3);
        let e = ev(&gm, &[("Smokes(A)", true), ("Friends(A,B)", true)]);
        let out = bounded_binary_marginal(&gm, &e, 2, &opts()).unwrap();
        let brute = oracle::brute_marginal(&gm, &e, 25).unwrap();
        assert!((out.probability - brute).abs() <= 1e-10 * brute);
    }

    #[test]
    fn bounded_with_lifted_pairs_matches_oracle() {
        // four constants, two in the context: the remaining pair of widened
        // blocks still factorizes over its off-diagonal atoms
        let gm = ground_text("constants A B C D\n0.6\tS(x) & F(x,y) => S(y)\n");
        let e = ev(&gm, &[("F(A,B)", true), ("S(C)", true)]);
        let out = bounded_binary_marginal(&gm, &e, 2, &opts()).unwrap();
        let brute = oracle::brute_marginal(&gm, &e, 25).unwrap();
        assert!(
            (out.probability - brute).abs() <= 1e-10 * brute,
            "{} vs {}",
            out.probability,
            brute
        );
        let mut no_memo = opts();
        no_memo.memo = false;
        let direct = bounded_binary_marginal(&gm, &e, 2, &no_memo).unwrap();
        assert!((out.probability - direct.probability).abs() <= 1e-12 * brute);
    }

    #[test]
    fn bounded_rejects_wide_contexts() {
        let gm = ground_text(FRIENDS3);
        let e = ev(&gm, &[("Friends(A,B)", true), ("Friends(B,C)", false)]);
        assert_eq!(binary_context(&gm, &e), vec![0, 1, 2]);
        assert!(matches!(
            bounded_binary_marginal(&gm, &e, 2, &opts()),
            Err(InferError::ContextTooLarge { constants: 3, bound: 2 })
        ));
    }

    #[test]
    fn reflexive_binary_evidence_needs_no_context() {
        let gm = ground_text(FRIENDS3);
        let e = ev(&gm, &[("Friends(A,A)", true)]);
        assert!(binary_context(&gm, &e).is_empty());
        let out = bounded_binary_marginal(&gm, &e, 2, &opts()).unwrap();
        let brute = oracle::brute_marginal(&gm, &e, 25).unwrap();
        assert!((out.probability - brute).abs() <= 1e-10 * brute);
    }

    #[test]
    fn conditional_mpe_maximizes_summed_out_weight() {
        use crate::numeric::LogSumExp;
        let gm = ground_text(FRIENDS2);
        let cs = two_var_structure(&gm).unwrap();
        let e = ev(&gm, &[("Cancer(A)", false)]);
        let out = conditional_mpe(&gm, &cs, &e, &opts()).unwrap();

        // brute force over the 2^6 block-scope assignments, summing the two
        // off-diagonal atoms out of each
        let scope: Vec<u32> = cs.decomp.scope().collect();
        let hidden: Vec<u32> = (0..gm.atom_count())
            .filter(|a| !scope.contains(a))
            .collect();
        assert_eq!(hidden.len(), 2);
        let mut world = vec![false; gm.atom_count() as usize];
        let mut best = f64::NEG_INFINITY;
        for bits in 0u32..(1 << scope.len()) {
            for (i, &a) in scope.iter().enumerate() {
                world[a as usize] = (bits >> i) & 1 == 1;
            }
            if !e.compatible(&world) {
                continue;
            }
            let mut lse = LogSumExp::new();
            for z in 0u32..(1 << hidden.len()) {
                for (i, &a) in hidden.iter().enumerate() {
                    world[a as usize] = (z >> i) & 1 == 1;
                }
                lse.add(gm.log_weight(&world));
            }
            if lse.value() > best {
                best = lse.value();
            }
        }
        assert!((out.log_weight - best).abs() < 1e-9, "{} vs {best}", out.log_weight);

        // and the reported assignment attains the reported weight
        for (i, &a) in scope.iter().enumerate() {
            let (_, v) = out.assignment.iter().find(|&&(x, _)| x == a).copied().unwrap();
            world[a as usize] = v;
            let _ = i;
        }
        let mut lse = LogSumExp::new();
        for z in 0u32..(1 << hidden.len()) {
            for (i, &a) in hidden.iter().enumerate() {
                world[a as usize] = (z >> i) & 1 == 1;
            }
            lse.add(gm.log_weight(&world));
        }
        assert!((lse.value() - out.log_weight).abs() < 1e-9);
    }

    #[test]
    fn bounded_mpe_with_full_context_equals_joint_mpe() {
        // k=2 with binary evidence puts every atom in the context, so the
        // summed-out objective degenerates to the plain world weight
        let gm = ground_text(FRIENDS2);
        let e = ev(&gm, &[("Friends(A,B)", true)]);
        let out = bounded_binary_mpe(&gm, &e, 2, &opts()).unwrap();
        assert_eq!(out.assignment.len(), gm.atom_count() as usize);
        let (_, brute_w) = oracle::brute_mpe(&gm, &e, 25).unwrap();
        assert!((out.log_weight - brute_w).abs() < 1e-12);
        let mut world = vec![false; gm.atom_count() as usize];
        for &(a, v) in &out.assignment {
            world[a as usize] = v;
        }
        assert!(e.compatible(&world));
    }

    #[test]
    fn complement_identity() {
        let gm = ground_text("domain 4\n1.5\tS(x) & S(y)\n1.3\tS(x) => C(x)\n");
        let d = monadic_decomposition(&gm).unwrap();
        for atom in 0..gm.atom_count() {
            let mut hi = Evidence::new();
            hi.set(atom, true).unwrap();
            let mut lo = Evidence::new();
            lo.set(atom, false).unwrap();
            let p1 = lifted_marginal(&gm, &d, &hi, &opts()).unwrap().probability;
            let p0 = lifted_marginal(&gm, &d, &lo, &opts()).unwrap().probability;
            assert!((p1 + p0 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn nested_evidence_monotone() {
        let gm = ground_text("domain 3\n0.9\tS(x) & S(y)\n");
        let d = monadic_decomposition(&gm).unwrap();
        let smaller = ev(&gm, &[("S(C1)", true)]);
        let larger = ev(&gm, &[("S(C1)", true), ("S(C2)", false)]);
        let p_small = lifted_marginal(&gm, &d, &smaller, &opts()).unwrap().probability;
        let p_large = lifted_marginal(&gm, &d, &larger, &opts()).unwrap().probability;
        assert!(p_large <= p_small + 1e-12);
    }

    #[test]
    fn jobs_do_not_change_bytes() {
        let gm = ground_text("domain 30\n1.5\tS(x) & S(y)\n1.3\tS(x) => C(x)\n");
        let d = monadic_decomposition(&gm).unwrap();
        let e = ev(&gm, &[("S(C1)", true), ("C(C7)", false)]);
        let mut one = opts();
        one.jobs = 1;
        let mut four = opts();
        four.jobs = 4;
        let a = lifted_marginal(&gm, &d, &e, &one).unwrap();
        let b = lifted_marginal(&gm, &d, &e, &four).unwrap();
        assert_eq!(a.probability.to_bits(), b.probability.to_bits());
        assert_eq!(a.log_partition.to_bits(), b.log_partition.to_bits());
    }

    #[test]
    fn partial_scope_decomposition_rejected() {
        let gm = ground_text("domain 3\n1.5\tS(x)\n0.5\tC(x)\n");
        // blocks covering only the S atoms
        let partial = crate::exchange::Decomposition::new(vec![vec![0], vec![1], vec![2]]).unwrap();
        assert!(matches!(
            lifted_marginal(&gm, &partial, &Evidence::new(), &opts()),
            Err(InferError::ScopeNotCovered)
        ));
    }

    #[test]
    fn budget_guard_trips() {
        let gm = ground_text("domain 200\n1.5\tS(x) & S(y)\n1.3\tS(x) => C(x)\n");
        let d = monadic_decomposition(&gm).unwrap();
        let mut tight = opts();
        tight.work_budget = 1000;
        assert!(matches!(
            lifted_marginal(&gm, &d, &Evidence::new(), &tight),
            Err(InferError::WorkBudget { .. })
        ));
    }
}
