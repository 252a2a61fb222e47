//! Ground-truth inference by exhaustive world enumeration.
//!
//! Deliberately free of pruning or cleverness: its value is its obviousness.
//! Worlds are swept in the integer order of their atom-index bit strings
//! (atom 0 is the least significant bit), which fixes all tie-breaks.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::exchange::{Decomposition, ScopeError, Statistic};
use crate::numeric::{exp, LogSumExp};
use crate::world::{Evidence, GroundModel, World};

pub const DEFAULT_CAP: u32 = 25;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    OverCap { atoms: u32, cap: u32 },
    Scope(ScopeError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::OverCap { atoms, cap } => write!(
                f,
                "exhaustive enumeration over {atoms} atoms exceeds the cap of {cap}"
            ),
            OracleError::Scope(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for OracleError {}

impl From<ScopeError> for OracleError {
    fn from(e: ScopeError) -> Self {
        OracleError::Scope(e)
    }
}

fn check_cap(bits: u32, cap: u32) -> Result<(), OracleError> {
    // 63 is a hard bound from the integer world encoding
    if bits > cap || bits > 63 {
        Err(OracleError::OverCap { atoms: bits, cap: cap.min(63) })
    } else {
        Ok(())
    }
}

fn evidence_mask(e: &Evidence) -> (u64, u64) {
    let mut mask = 0u64;
    let mut vals = 0u64;
    for (atom, v) in e.iter() {
        mask |= 1 << atom;
        if v {
            vals |= 1 << atom;
        }
    }
    (mask, vals)
}

/// Log evidence weight and log partition function by full enumeration.
#[derive(Clone, Copy, Debug)]
pub struct BrutePosterior {
    pub log_evidence: f64,
    pub log_partition: f64,
    pub worlds: u64,
}

pub fn brute_posterior(
    gm: &GroundModel,
    e: &Evidence,
    cap: u32,
) -> Result<BrutePosterior, OracleError> {
    let n = gm.atom_count();
    check_cap(n, cap)?;
    let (mask, vals) = evidence_mask(e);
    let mut num = LogSumExp::new();
    let mut den = LogSumExp::new();
    for w in 0u64..(1u64 << n) {
        let lw = gm.log_weight_with(|a| (w >> a) & 1 == 1);
        den.add(lw);
        if w & mask == vals {
            num.add(lw);
        }
    }
    Ok(BrutePosterior {
        log_evidence: num.value(),
        log_partition: den.value(),
        worlds: 1u64 << n,
    })
}

/// `Pr(e)` by full enumeration, exact up to float rounding.
pub fn brute_marginal(gm: &GroundModel, e: &Evidence, cap: u32) -> Result<f64, OracleError> {
    let p = brute_posterior(gm, e, cap)?;
    Ok(exp(p.log_evidence - p.log_partition))
}

/// Exhaustive argmax of the world weight over worlds compatible with `e`.
/// Ties go to the smallest world bit string.
pub fn brute_mpe(gm: &GroundModel, e: &Evidence, cap: u32) -> Result<(World, f64), OracleError> {
    let n = gm.atom_count();
    check_cap(n, cap)?;
    let (mask, vals) = evidence_mask(e);
    let mut best: Option<(u64, f64)> = None;
    for w in 0u64..(1u64 << n) {
        if w & mask != vals {
            continue;
        }
        let lw = gm.log_weight_with(|a| (w >> a) & 1 == 1);
        if best.map(|(_, b)| lw > b).unwrap_or(true) {
            best = Some((w, lw));
        }
    }
    let (w, lw) = best.expect("consistent evidence always admits a world");
    Ok(((0..n).map(|a| (w >> a) & 1 == 1).collect(), lw))
}

/// `|{x over scope : T(x) = t and x ~ e}|` by enumerating scope assignments.
pub fn brute_suborbit(
    t: &Statistic,
    e: &Evidence,
    d: &Decomposition,
    cap: u32,
) -> Result<BigUint, OracleError> {
    let census = suborbit_census(e, d, cap)?;
    Ok(BigUint::from(census.get(&t.counts).copied().unwrap_or(0)))
}

/// Suborbit sizes of every realized statistic at once, by one sweep over
/// all compatible scope assignments.
pub fn suborbit_census(
    e: &Evidence,
    d: &Decomposition,
    cap: u32,
) -> Result<BTreeMap<Vec<u64>, u64>, OracleError> {
    let scope: Vec<u32> = d.scope().collect();
    let bits = scope.len() as u32;
    check_cap(bits, cap)?;
    // evidence as (mask, vals) over scope bit positions
    let mut mask = 0u64;
    let mut vals = 0u64;
    let mut slot_of = BTreeMap::new();
    for (i, &atom) in scope.iter().enumerate() {
        slot_of.insert(atom, i);
    }
    for (atom, v) in e.iter() {
        let &i = slot_of.get(&atom).ok_or(ScopeError::OutOfScope(atom))?;
        mask |= 1 << i;
        if v {
            vals |= 1 << i;
        }
    }
    let width = d.width();
    let mut census: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut counts = alloc::vec![0u64; d.pattern_count()];
    for w in 0u64..(1u64 << bits) {
        if w & mask != vals {
            continue;
        }
        counts.iter_mut().for_each(|c| *c = 0);
        for (bi, block) in d.blocks().iter().enumerate() {
            let base = bi * width as usize;
            let mut code = 0u64;
            for pos in 0..width as usize {
                if (w >> (base + pos)) & 1 == 1 {
                    code |= 1 << (width as usize - 1 - pos);
                }
            }
            counts[code as usize] += 1;
            let _ = block;
        }
        if let Some(c) = census.get_mut(&counts) {
            *c += 1;
        } else {
            census.insert(counts.clone(), 1);
        }
    }
    Ok(census)
}

/// Per-world log weights cached once so whole query batteries can be
/// checked against the same enumeration. Only for small models.
pub struct CachedOracle {
    log_w: Vec<f64>,
    atoms: u32,
}

pub const CACHE_CAP: u32 = 24;

impl CachedOracle {
    pub fn new(gm: &GroundModel, cap: u32) -> Result<CachedOracle, OracleError> {
        let n = gm.atom_count();
        check_cap(n, cap.min(CACHE_CAP))?;
        let log_w = (0u64..(1u64 << n))
            .map(|w| gm.log_weight_with(|a| (w >> a) & 1 == 1))
            .collect();
        Ok(CachedOracle { log_w, atoms: n })
    }

    pub fn atom_count(&self) -> u32 {
        self.atoms
    }

    pub fn log_partition(&self) -> f64 {
        let mut z = LogSumExp::new();
        for &lw in &self.log_w {
            z.add(lw);
        }
        z.value()
    }

    pub fn log_evidence(&self, e: &Evidence) -> f64 {
        let (mask, vals) = evidence_mask(e);
        let mut num = LogSumExp::new();
        for (w, &lw) in self.log_w.iter().enumerate() {
            if w as u64 & mask == vals {
                num.add(lw);
            }
        }
        num.value()
    }

    pub fn marginal(&self, e: &Evidence) -> f64 {
        exp(self.log_evidence(e) - self.log_partition())
    }

    /// Conditional `Pr(q | e)` from the same cached sweep.
    pub fn conditional(&self, q: &Evidence, e: &Evidence) -> f64 {
        let joint = q.union(e).expect("query and evidence must not conflict");
        exp(self.log_evidence(&joint) - self.log_evidence(e))
    }

    pub fn mpe(&self, e: &Evidence) -> (World, f64) {
        let (mask, vals) = evidence_mask(e);
        let mut best: Option<(u64, f64)> = None;
        for (w, &lw) in self.log_w.iter().enumerate() {
            if w as u64 & mask != vals {
                continue;
            }
            if best.map(|(_, b)| lw > b).unwrap_or(true) {
                best = Some((w as u64, lw));
            }
        }
        let (w, lw) = best.expect("consistent evidence always admits a world");
        ((0..self.atoms).map(|a| (w >> a) & 1 == 1).collect(), lw)
    }
}
