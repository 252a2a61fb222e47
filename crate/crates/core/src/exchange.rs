//! Sufficient statistics for exchangeable decompositions, orbit sizes, and
//! suborbit counting under partial evidence.
//!
//! A decomposition partitions ground atoms into `k` blocks of equal width
//! `w`, with position `p` playing the same role in every block. A world then
//! projects each block to a bit pattern, and the tuple counting blocks per
//! pattern is a sufficient statistic whenever the distribution is invariant
//! under permuting whole blocks. Worlds sharing a statistic value form an
//! orbit of equal-probability states; evidence carves each orbit into a
//! suborbit whose size is counted exactly here by enumerating completion
//! matrices — non-negative integer matrices whose rows are bit patterns,
//! whose columns are evidence patterns over `{0,1,*}`, with prescribed row
//! and column sums and zeros on incompatible cells. Each matrix accounts for
//! a disjoint set of completions, counted by a product of per-column
//! multinomials, and the suborbit size is the sum over matrices.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::combi::{compositions, compositions_count, Compositions, Factorials};
use crate::world::{AtomId, Evidence};

/// Largest supported block width. Pattern codes are `u64` bit strings and
/// evidence pattern codes are `u64` base-3 strings, so 32 is comfortable;
/// engines impose far tighter work budgets anyway.
pub const MAX_WIDTH: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionError {
    UnequalWidths,
    DuplicateAtom(AtomId),
    TooWide(usize),
}

impl fmt::Display for DecompositionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionError::UnequalWidths => write!(f, "all blocks must have the same width"),
            DecompositionError::DuplicateAtom(a) => write!(f, "atom {a} appears in two blocks"),
            DecompositionError::TooWide(w) => {
                write!(f, "block width {w} exceeds the supported maximum {MAX_WIDTH}")
            }
        }
    }
}

impl core::error::Error for DecompositionError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScopeError {
    OutOfScope(AtomId),
}

impl fmt::Display for ScopeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScopeError::OutOfScope(a) => write!(f, "atom {a} is outside the decomposition scope"),
        }
    }
}

impl core::error::Error for ScopeError {}

/// A partition of (a subset of) the ground atoms into equal-width blocks.
/// Block order and within-block position order are canonical: position `p`
/// plays the same role in every block.
#[derive(Clone, Debug)]
pub struct Decomposition {
    blocks: Vec<Vec<AtomId>>,
    width: u32,
    slots: BTreeMap<AtomId, (u32, u32)>,
}

impl Decomposition {
    pub fn new(blocks: Vec<Vec<AtomId>>) -> Result<Decomposition, DecompositionError> {
        let width = blocks.first().map(|b| b.len()).unwrap_or(0);
        if width > MAX_WIDTH as usize {
            return Err(DecompositionError::TooWide(width));
        }
        let mut slots = BTreeMap::new();
        for (bi, block) in blocks.iter().enumerate() {
            if block.len() != width {
                return Err(DecompositionError::UnequalWidths);
            }
            for (pos, &atom) in block.iter().enumerate() {
                if slots.insert(atom, (bi as u32, pos as u32)).is_some() {
                    return Err(DecompositionError::DuplicateAtom(atom));
                }
            }
        }
        Ok(Decomposition {
            blocks,
            width: width as u32,
            slots,
        })
    }

    pub fn blocks(&self) -> &[Vec<AtomId>] {
        &self.blocks
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Number of distinct block bit patterns, `2^width`.
    pub fn pattern_count(&self) -> usize {
        1usize << self.width
    }

    pub fn slot(&self, atom: AtomId) -> Option<(u32, u32)> {
        self.slots.get(&atom).copied()
    }

    pub fn contains(&self, atom: AtomId) -> bool {
        self.slots.contains_key(&atom)
    }

    pub fn scope(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.blocks.iter().flatten().copied()
    }

    pub fn scope_size(&self) -> usize {
        self.blocks.len() * self.width as usize
    }
}

/// The sufficient statistic: `counts[p]` blocks carry bit pattern `p`.
/// Pattern codes order the pattern string lexicographically, so code 0 is
/// the all-zeros pattern and the first string position is the high bit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Statistic {
    pub counts: Vec<u64>,
}

impl Statistic {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn parts(&self) -> usize {
        self.counts.len()
    }
}

#[inline]
pub(crate) fn block_pattern(world: &[bool], block: &[AtomId], width: u32) -> u64 {
    let mut code = 0u64;
    for (pos, &atom) in block.iter().enumerate() {
        if world[atom as usize] {
            code |= 1 << (width as usize - 1 - pos);
        }
    }
    code
}

/// Projects a world onto the decomposition and counts blocks per pattern.
pub fn statistic_of(world: &[bool], d: &Decomposition) -> Statistic {
    let mut counts = vec![0u64; d.pattern_count()];
    for block in &d.blocks {
        counts[block_pattern(world, block, d.width) as usize] += 1;
    }
    Statistic { counts }
}

/// Number of distinct statistic values for `k` blocks of width `w`:
/// `C(k + 2^w - 1, 2^w - 1)`.
pub fn statistic_space_size(k: u64, width: u32) -> BigUint {
    compositions_count(k, 1u64 << width)
}

/// All statistics for `k` blocks of width `width`, in lexicographic order.
pub fn enumerate_statistics(k: u64, width: u32) -> impl Iterator<Item = Statistic> {
    assert!(width <= MAX_WIDTH);
    let parts: Compositions = compositions(k, 1u64 << width);
    parts.map(|counts| Statistic { counts })
}

/// `|S_t|`: the number of worlds with statistic `t`, i.e. the multinomial
/// `k! / prod(counts[p]!)`.
pub fn orbit_size(t: &Statistic) -> BigUint {
    crate::combi::multinomial(t.total(), t.counts.iter().copied())
}

/// Per-block evidence projection, grouped by pattern. `code` indexes the
/// `{0,1,*}` string base-3 with `0 < 1 < *`, so the all-unassigned pattern
/// carries the largest code and sorts last.
#[derive(Clone, Debug)]
pub struct ProfileColumn {
    pub code: u64,
    pub count: u64,
    /// Bit positions the evidence fixes, in pattern-code bit layout.
    pub mask: u64,
    /// The fixed values on `mask`.
    pub vals: u64,
    /// Blocks projecting to this pattern, ascending.
    pub blocks: Vec<u32>,
}

impl ProfileColumn {
    #[inline]
    pub fn admits(&self, pattern: u64) -> bool {
        pattern & self.mask == self.vals
    }

    /// Number of assigned positions in this evidence pattern.
    pub fn assigned(&self) -> u32 {
        self.mask.count_ones()
    }
}

/// Evidence projected onto a decomposition: for every realized evidence
/// pattern, how many blocks carry it and which ones.
#[derive(Clone, Debug)]
pub struct EvidenceProfile {
    pub width: u32,
    pub columns: Vec<ProfileColumn>,
}

impl EvidenceProfile {
    pub fn block_count(&self) -> u64 {
        self.columns.iter().map(|c| c.count).sum()
    }

    /// Total number of atoms the evidence assigns inside the scope.
    pub fn assigned_atoms(&self) -> u64 {
        self.columns
            .iter()
            .map(|c| c.assigned() as u64 * c.count)
            .sum()
    }

    /// The profile of empty evidence: every block is all-unassigned.
    pub fn empty(d: &Decomposition) -> EvidenceProfile {
        let width = d.width();
        let code = pow3(width) - 1;
        EvidenceProfile {
            width,
            columns: vec![ProfileColumn {
                code,
                count: d.block_count() as u64,
                mask: 0,
                vals: 0,
                blocks: (0..d.block_count() as u32).collect(),
            }],
        }
    }
}

fn pow3(width: u32) -> u64 {
    3u64.pow(width)
}

/// Projects evidence onto per-block `{0,1,*}` patterns. Errors if the
/// evidence assigns an atom outside the decomposition's scope; routing
/// out-of-scope evidence is the caller's job.
pub fn evidence_profile(e: &Evidence, d: &Decomposition) -> Result<EvidenceProfile, ScopeError> {
    let width = d.width();
    let all_star = pow3(width) - 1;
    // per-block (code, mask, vals), lazily created
    let mut touched: BTreeMap<u32, (u64, u64, u64)> = BTreeMap::new();
    for (atom, value) in e.iter() {
        let (block, pos) = d.slot(atom).ok_or(ScopeError::OutOfScope(atom))?;
        let entry = touched.entry(block).or_insert((all_star, 0, 0));
        let place = width - 1 - pos;
        // digit drops from `*` (2) to the assigned value
        entry.0 -= (2 - value as u64) * 3u64.pow(place);
        entry.1 |= 1 << place;
        if value {
            entry.2 |= 1 << place;
        }
    }
    let mut columns: BTreeMap<u64, ProfileColumn> = BTreeMap::new();
    for block in 0..d.block_count() as u32 {
        let (code, mask, vals) = touched
            .get(&block)
            .copied()
            .unwrap_or((all_star, 0, 0));
        let col = columns.entry(code).or_insert(ProfileColumn {
            code,
            count: 0,
            mask,
            vals,
            blocks: Vec::new(),
        });
        col.count += 1;
        col.blocks.push(block);
    }
    Ok(EvidenceProfile {
        width,
        columns: columns.into_values().collect(),
    })
}

/// One matrix of the suborbit count: `cells[j]` lists the nonzero
/// `(pattern, count)` entries of profile column `j`, patterns ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionMatrix {
    pub cells: Vec<Vec<(u64, u64)>>,
}

/// Number of completions a single matrix stands for: for every evidence
/// column, the multinomial choosing which of its blocks complete to which
/// bit pattern.
pub fn completion_count(m: &CompletionMatrix, profile: &EvidenceProfile) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for (col, cells) in profile.columns.iter().zip(&m.cells) {
        acc *= crate::combi::multinomial(col.count, cells.iter().map(|&(_, a)| a));
    }
    acc
}

type Cells = Vec<Vec<(u64, u64)>>;

struct MatrixEnum<'a, 'v> {
    profile: &'a EvidenceProfile,
    facts: &'a Factorials,
    /// (pattern code, remaining capacity) for patterns with t > 0.
    rows: Vec<(u64, u64)>,
    cells: Cells,
    want_count: bool,
    want_first: bool,
    total: BigUint,
    first: Option<Cells>,
    visit: Option<&'v mut dyn FnMut(&CompletionMatrix) -> bool>,
    stopped: bool,
}

impl MatrixEnum<'_, '_> {
    fn binom(&self, n: u64, r: u64) -> BigUint {
        self.facts.factorial(n) / (self.facts.factorial(r) * self.facts.factorial(n - r))
    }

    fn run(&mut self) {
        self.descend(0, BigUint::from(1u32));
    }

    fn descend(&mut self, ci: usize, acc: BigUint) {
        if self.stopped {
            return;
        }
        if ci == self.profile.columns.len() {
            if self.want_count {
                self.total += &acc;
            }
            let mut need_more = self.want_count;
            if self.want_first && self.first.is_none() {
                self.first = Some(self.cells.clone());
            }
            if let Some(v) = self.visit.as_mut() {
                let m = CompletionMatrix {
                    cells: self.cells.clone(),
                };
                need_more = v(&m);
            }
            if !need_more {
                self.stopped = true;
            }
            return;
        }
        let col = &self.profile.columns[ci];
        let cands: Vec<usize> = (0..self.rows.len())
            .filter(|&ri| self.rows[ri].1 > 0 && col.admits(self.rows[ri].0))
            .collect();
        let mut caps = vec![0u64; cands.len() + 1];
        for i in (0..cands.len()).rev() {
            caps[i] = caps[i + 1] + self.rows[cands[i]].1;
        }
        let d = col.count;
        self.fill(ci, &cands, &caps, 0, d, acc);
    }

    fn fill(&mut self, ci: usize, cands: &[usize], caps: &[u64], pos: usize, d_left: u64, acc: BigUint) {
        if self.stopped {
            return;
        }
        if d_left == 0 {
            self.descend(ci + 1, acc);
            return;
        }
        if pos == cands.len() {
            return;
        }
        let row = cands[pos];
        let lo = d_left.saturating_sub(caps[pos + 1]);
        let hi = d_left.min(self.rows[row].1);
        if lo > hi {
            return;
        }
        for a in lo..=hi {
            let next_acc = if a == 0 {
                acc.clone()
            } else {
                &acc * self.binom(d_left, a)
            };
            if a > 0 {
                self.rows[row].1 -= a;
                self.cells[ci].push((self.rows[row].0, a));
            }
            self.fill(ci, cands, caps, pos + 1, d_left - a, next_acc);
            if a > 0 {
                self.rows[row].1 += a;
                self.cells[ci].pop();
            }
            if self.stopped {
                return;
            }
        }
    }
}

fn run_enum(
    t: &[u64],
    profile: &EvidenceProfile,
    facts: &Factorials,
    want_count: bool,
    want_first: bool,
    visit: Option<&mut dyn FnMut(&CompletionMatrix) -> bool>,
) -> (BigUint, Option<Cells>) {
    debug_assert_eq!(
        t.iter().sum::<u64>(),
        profile.block_count(),
        "statistic and profile must cover the same blocks"
    );
    let rows: Vec<(u64, u64)> = t
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(p, &c)| (p as u64, c))
        .collect();
    let mut e = MatrixEnum {
        profile,
        facts,
        rows,
        cells: vec![Vec::new(); profile.columns.len()],
        want_count,
        want_first,
        total: BigUint::zero(),
        first: None,
        visit,
        stopped: false,
    };
    e.run();
    (e.total, e.first)
}

/// Streams every completion matrix for `(t, evidence profile)` exactly once,
/// in a fixed canonical order. The callback returns `false` to stop early.
pub fn for_each_completion_matrix(
    t: &Statistic,
    profile: &EvidenceProfile,
    mut f: impl FnMut(&CompletionMatrix) -> bool,
) {
    let facts = Factorials::upto(t.total());
    run_enum(&t.counts, profile, &facts, false, false, Some(&mut f));
}

/// Collects the full completion-matrix set (small inputs only; prefer the
/// streaming form otherwise).
pub fn completion_matrices(t: &Statistic, profile: &EvidenceProfile) -> Vec<CompletionMatrix> {
    let mut out = Vec::new();
    for_each_completion_matrix(t, profile, |m| {
        out.push(m.clone());
        true
    });
    out
}

pub(crate) fn suborbit_profiled(
    t: &[u64],
    profile: &EvidenceProfile,
    facts: &Factorials,
) -> BigUint {
    run_enum(t, profile, facts, true, false, None).0
}

pub(crate) fn suborbit_and_first(
    t: &[u64],
    profile: &EvidenceProfile,
    facts: &Factorials,
) -> (BigUint, Option<Cells>) {
    run_enum(t, profile, facts, true, true, None)
}

pub(crate) fn first_fill(t: &[u64], profile: &EvidenceProfile, facts: &Factorials) -> Option<Cells> {
    run_enum(t, profile, facts, false, true, None).1
}

/// `|S_{t,e}|`: the number of worlds over the scope with statistic `t` that
/// are compatible with `e`, as the sum of completion counts over all
/// completion matrices.
pub fn suborbit_size(t: &Statistic, e: &Evidence, d: &Decomposition) -> Result<BigUint, ScopeError> {
    let profile = evidence_profile(e, d)?;
    let facts = Factorials::upto(t.total());
    Ok(suborbit_profiled(&t.counts, &profile, &facts))
}

/// Writes the block assignment described by matrix cells into `world`
/// (indexed by `AtomId`) and records each block's pattern in `codes`.
/// Within each evidence column, blocks are assigned to bit patterns in
/// canonical (ascending) order.
pub(crate) fn write_fill(
    cells: &[Vec<(u64, u64)>],
    profile: &EvidenceProfile,
    d: &Decomposition,
    world: &mut [bool],
    codes: &mut [u64],
) {
    let width = d.width();
    for (col, col_cells) in profile.columns.iter().zip(cells) {
        let mut next = col.blocks.iter();
        for &(pattern, count) in col_cells {
            for _ in 0..count {
                let &b = next.next().expect("cell counts sum to the column count");
                codes[b as usize] = pattern;
                let block = &d.blocks[b as usize];
                for (pos, &atom) in block.iter().enumerate() {
                    world[atom as usize] = (pattern >> (width as usize - 1 - pos)) & 1 == 1;
                }
            }
        }
    }
}

/// The canonical orbit member without evidence: blocks in order receive
/// patterns in ascending order with multiplicity `t`.
pub(crate) fn write_canonical(t: &[u64], d: &Decomposition, world: &mut [bool], codes: &mut [u64]) {
    let width = d.width();
    let mut b = 0usize;
    for (pattern, &count) in t.iter().enumerate() {
        for _ in 0..count {
            codes[b] = pattern as u64;
            for (pos, &atom) in d.blocks[b].iter().enumerate() {
                world[atom as usize] = (pattern >> (width as usize - 1 - pos)) & 1 == 1;
            }
            b += 1;
        }
    }
}

/// A member of the suborbit `S_{t,e}`, or `None` when it is empty. Built
/// from the first completion matrix in canonical order, so the result is
/// deterministic. Returned as `(atom, value)` pairs over the scope.
pub fn representative(
    t: &Statistic,
    e: &Evidence,
    d: &Decomposition,
) -> Result<Option<Vec<(AtomId, bool)>>, ScopeError> {
    let profile = evidence_profile(e, d)?;
    let facts = Factorials::upto(t.total());
    let Some(cells) = first_fill(&t.counts, &profile, &facts) else {
        return Ok(None);
    };
    let n = d.scope().max().map(|a| a as usize + 1).unwrap_or(0);
    let mut world = vec![false; n];
    let mut codes = vec![0u64; d.block_count()];
    write_fill(&cells, &profile, d, &mut world, &mut codes);
    let mut out: Vec<(AtomId, bool)> = d.scope().map(|a| (a, world[a as usize])).collect();
    out.sort_unstable();
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decomp(k: usize, w: usize) -> Decomposition {
        // block i owns atoms [i*w, (i+1)*w)
        let blocks = (0..k)
            .map(|i| ((i * w) as u32..((i + 1) * w) as u32).collect())
            .collect();
        Decomposition::new(blocks).unwrap()
    }

    fn ev(pairs: &[(u32, bool)]) -> Evidence {
        let mut e = Evidence::new();
        for &(a, v) in pairs {
            e.set(a, v).unwrap();
        }
        e
    }

    #[test]
    fn statistic_of_width_one() {
        let d = decomp(3, 1);
        let s = statistic_of(&[true, true, false], &d);
        assert_eq!(s.counts, vec![1, 2]);
    }

    #[test]
    fn statistic_of_width_two() {
        // blocks (0,1) and (2,3); world 10 / 01 -> patterns 10 and 01
        let d = decomp(2, 2);
        let s = statistic_of(&[true, false, false, true], &d);
        assert_eq!(s.counts, vec![0, 1, 1, 0]);
        // swapping the two blocks' contents leaves the statistic unchanged
        let swapped = statistic_of(&[false, true, true, false], &d);
        assert_eq!(swapped.counts, s.counts);
    }

    #[test]
    fn enumeration_order_and_counts() {
        let all: Vec<Statistic> = enumerate_statistics(2, 1).collect();
        assert_eq!(
            all.iter().map(|s| s.counts.clone()).collect::<Vec<_>>(),
            vec![vec![0, 2], vec![1, 1], vec![2, 0]]
        );
        assert_eq!(statistic_space_size(2, 1), BigUint::from(3u32));

        assert_eq!(enumerate_statistics(0, 3).count(), 1);
        assert_eq!(enumerate_statistics(3, 2).count(), 20);
        assert_eq!(statistic_space_size(3, 2), BigUint::from(20u32));
    }

    #[test]
    fn orbit_size_examples() {
        assert_eq!(orbit_size(&Statistic { counts: vec![2, 1] }), BigUint::from(3u32));
        assert_eq!(orbit_size(&Statistic { counts: vec![4, 0, 0, 0] }), BigUint::from(1u32));
        assert_eq!(
            orbit_size(&Statistic { counts: vec![1, 1, 1, 1] }),
            BigUint::from(24u32)
        );
    }

    #[test]
    fn orbit_sizes_partition_the_state_space() {
        for (k, w) in [(4u64, 1u32), (3, 2), (2, 3)] {
            let total: BigUint = enumerate_statistics(k, w).map(|t| orbit_size(&t)).sum();
            assert_eq!(total, BigUint::from(2u32).pow((k * w as u64) as u32));
        }
    }

    #[test]
    fn profile_of_empty_evidence() {
        let d = decomp(3, 2);
        let p = evidence_profile(&Evidence::new(), &d).unwrap();
        assert_eq!(p.columns.len(), 1);
        assert_eq!(p.columns[0].count, 3);
        assert_eq!(p.columns[0].code, 8); // "**" in base 3
        assert_eq!(p.columns[0].mask, 0);
    }

    #[test]
    fn profile_single_assignment() {
        let d = decomp(3, 1);
        let p = evidence_profile(&ev(&[(1, true)]), &d).unwrap();
        assert_eq!(p.columns.len(), 2);
        // "1" sorts before "*"
        assert_eq!(p.columns[0].code, 1);
        assert_eq!(p.columns[0].count, 1);
        assert_eq!(p.columns[0].blocks, vec![1]);
        assert_eq!(p.columns[1].code, 2);
        assert_eq!(p.columns[1].count, 2);
    }

    #[test]
    fn profile_fully_assigned_has_no_stars() {
        let d = decomp(2, 2);
        let e = ev(&[(0, true), (1, false), (2, false), (3, false)]);
        let p = evidence_profile(&e, &d).unwrap();
        assert_eq!(p.block_count(), 2);
        for col in &p.columns {
            assert_eq!(col.assigned(), 2);
        }
        assert_eq!(p.assigned_atoms(), 4);
    }

    #[test]
    fn profile_rejects_out_of_scope() {
        let d = decomp(2, 1);
        assert_eq!(
            evidence_profile(&ev(&[(7, true)]), &d).unwrap_err(),
            ScopeError::OutOfScope(7)
        );
    }

    #[test]
    fn matrices_empty_evidence_single() {
        let d = decomp(3, 1);
        let t = Statistic { counts: vec![1, 2] };
        let p = evidence_profile(&Evidence::new(), &d).unwrap();
        let ms = completion_matrices(&t, &p);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].cells, vec![vec![(0, 1), (1, 2)]]);
        assert_eq!(completion_count(&ms[0], &p), orbit_size(&t));
    }

    #[test]
    fn matrices_fully_assigned_forced() {
        let d = decomp(2, 1);
        let p = evidence_profile(&ev(&[(0, true), (1, false)]), &d).unwrap();
        // matches t = (1,1)
        let ms = completion_matrices(&Statistic { counts: vec![1, 1] }, &p);
        assert_eq!(ms.len(), 1);
        assert_eq!(completion_count(&ms[0], &p), BigUint::from(1u32));
        // contradicts t = (2,0)
        let none = completion_matrices(&Statistic { counts: vec![2, 0] }, &p);
        assert!(none.is_empty());
    }

    #[test]
    fn matrices_mixed_case_w1() {
        // k=3, w=1, t=(1,2), one atom fixed to 1: the "1" column must send
        // its block to pattern 1 and the "*" column splits (1,1).
        let d = decomp(3, 1);
        let p = evidence_profile(&ev(&[(0, true)]), &d).unwrap();
        let t = Statistic { counts: vec![1, 2] };
        let ms = completion_matrices(&t, &p);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].cells, vec![vec![(1, 1)], vec![(0, 1), (1, 1)]]);
        assert_eq!(suborbit_size(&t, &ev(&[(0, true)]), &d).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn gamma_choose_example() {
        // w=1, k=4, t=(2,2), empty evidence: one matrix, count C(4,2)=6
        let d = decomp(4, 1);
        let p = evidence_profile(&Evidence::new(), &d).unwrap();
        let ms = completion_matrices(&Statistic { counts: vec![2, 2] }, &p);
        assert_eq!(ms.len(), 1);
        assert_eq!(completion_count(&ms[0], &p), BigUint::from(6u32));
    }

    #[test]
    fn suborbit_empty_evidence_is_orbit() {
        let d = decomp(5, 2);
        for t in enumerate_statistics(5, 2) {
            let s = suborbit_size(&t, &Evidence::new(), &d).unwrap();
            assert_eq!(s, orbit_size(&t));
        }
    }

    #[test]
    fn suborbit_contradiction_is_zero() {
        // three blocks forced to 1 but t allows only one
        let d = decomp(3, 1);
        let e = ev(&[(0, true), (1, true), (2, true)]);
        let t = Statistic { counts: vec![2, 1] };
        assert_eq!(suborbit_size(&t, &e, &d).unwrap(), BigUint::zero());
        assert_eq!(representative(&t, &e, &d).unwrap(), None);
    }

    #[test]
    fn representative_canonical_fill() {
        let d = decomp(3, 1);
        let t = Statistic { counts: vec![1, 2] };
        let rep = representative(&t, &Evidence::new(), &d).unwrap().unwrap();
        assert_eq!(rep, vec![(0, false), (1, true), (2, true)]);
    }

    #[test]
    fn representative_respects_evidence_and_statistic() {
        let d = decomp(4, 2);
        let e = ev(&[(0, true), (5, false)]);
        for t in enumerate_statistics(4, 2) {
            let sub = suborbit_size(&t, &e, &d).unwrap();
            match representative(&t, &e, &d).unwrap() {
                None => assert!(sub.is_zero()),
                Some(rep) => {
                    assert!(!sub.is_zero());
                    let mut world = vec![false; 8];
                    for &(a, v) in &rep {
                        world[a as usize] = v;
                    }
                    assert!(e.compatible(&world));
                    assert_eq!(statistic_of(&world, &d), t);
                }
            }
        }
    }

    #[test]
    fn suborbits_partition_compatible_worlds() {
        // sum over t of |S_{t,e}| = 2^(k*w - |e|)
        let d = decomp(3, 2);
        let e = ev(&[(0, true), (3, false), (4, true)]);
        let total: BigUint = enumerate_statistics(3, 2)
            .map(|t| suborbit_size(&t, &e, &d).unwrap())
            .sum();
        assert_eq!(total, BigUint::from(2u32).pow(6 - 3));
    }

    #[test]
    fn suborbit_matches_brute_enumeration() {
        // exhaustive check on a small scope with several evidence shapes
        let d = decomp(3, 2);
        let evidences = [
            ev(&[]),
            ev(&[(0, true)]),
            ev(&[(0, true), (1, true)]),
            ev(&[(0, true), (2, false), (5, true)]),
            ev(&[(0, false), (1, false), (2, false), (3, true), (4, true), (5, true)]),
        ];
        for e in &evidences {
            let mut census: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
            for bits in 0u32..(1 << 6) {
                let world: Vec<bool> = (0..6).map(|i| (bits >> i) & 1 == 1).collect();
                if !e.compatible(&world) {
                    continue;
                }
                *census.entry(statistic_of(&world, &d).counts).or_default() += 1;
            }
            for t in enumerate_statistics(3, 2) {
                let expect = census.get(&t.counts).copied().unwrap_or(0);
                assert_eq!(
                    suborbit_size(&t, e, &d).unwrap(),
                    BigUint::from(expect),
                    "t={:?} e={:?}",
                    t.counts,
                    e
                );
            }
        }
    }

    #[test]
    fn gamma_sum_independent_of_order() {
        let d = decomp(4, 2);
        let e = ev(&[(0, true), (4, false), (7, true)]);
        let p = evidence_profile(&e, &d).unwrap();
        for t in enumerate_statistics(4, 2) {
            let ms = completion_matrices(&t, &p);
            let forward: BigUint = ms.iter().map(|m| completion_count(m, &p)).sum();
            let backward: BigUint = ms.iter().rev().map(|m| completion_count(m, &p)).sum();
            assert_eq!(forward, backward);
            assert_eq!(forward, suborbit_size(&t, &e, &d).unwrap());
        }
    }
}
