//! Exact combinatorics: binomials, multinomials, and lexicographic
//! enumeration of weak compositions, all over arbitrary-precision integers.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Binomial coefficient `C(n, r)`, exactly. Returns zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        // the running product of i+1 consecutive integers is divisible by (i+1)!
        acc /= i + 1;
    }
    acc
}

/// Multinomial coefficient `n! / (parts[0]! * parts[1]! * ...)`.
/// The parts must sum to `n`.
pub fn multinomial(n: u64, parts: impl IntoIterator<Item = u64>) -> BigUint {
    let mut remaining = n;
    let mut acc = BigUint::one();
    for p in parts {
        acc *= binomial(remaining, p);
        remaining = remaining.saturating_sub(p);
    }
    debug_assert_eq!(remaining, 0, "multinomial parts must sum to n");
    acc
}

/// Factorial table `0! ..= n!` so the engines can take multinomials of the
/// same `n` once per statistic without re-multiplying.
pub struct Factorials {
    table: Vec<BigUint>,
}

impl Factorials {
    pub fn upto(n: u64) -> Self {
        let mut table = Vec::with_capacity(n as usize + 1);
        table.push(BigUint::one());
        let mut acc = BigUint::one();
        for i in 1..=n {
            acc *= i;
            table.push(acc.clone());
        }
        Factorials { table }
    }

    pub fn factorial(&self, n: u64) -> &BigUint {
        &self.table[n as usize]
    }

    /// `n! / prod(parts[i]!)`; parts may omit zeros and must sum to `n`.
    pub fn multinomial(&self, n: u64, parts: impl IntoIterator<Item = u64>) -> BigUint {
        let mut den = BigUint::one();
        let mut total = 0u64;
        for p in parts {
            total += p;
            if p > 1 {
                den *= &self.table[p as usize];
            }
        }
        debug_assert_eq!(total, n, "multinomial parts must sum to n");
        if den.is_one() {
            self.table[n as usize].clone()
        } else {
            &self.table[n as usize] / den
        }
    }
}

/// Number of weak compositions of `total` into exactly `parts` parts:
/// `C(total + parts - 1, parts - 1)`.
pub fn compositions_count(total: u64, parts: u64) -> BigUint {
    assert!(parts >= 1, "need at least one part");
    binomial(total + parts - 1, parts - 1)
}

/// Advances `c` to the lexicographically next weak composition with the same
/// sum, returning `false` after the last one (`(sum, 0, ..., 0)`).
pub fn advance_composition(c: &mut [u64]) -> bool {
    let m = c.len();
    if m <= 1 {
        return false;
    }
    // rightmost position (excluding the last) with mass strictly to its right
    let mut suffix = c[m - 1];
    for j in (0..m - 1).rev() {
        if suffix > 0 {
            c[j] += 1;
            for q in c.iter_mut().take(m - 1).skip(j + 1) {
                *q = 0;
            }
            c[m - 1] = suffix - 1;
            return true;
        }
        suffix += c[j];
    }
    false
}

/// The weak composition of `total` into `parts` parts at lexicographic
/// `rank` (0-based). The caller must ensure the rank is in range.
pub fn composition_at_rank(total: u64, parts: u64, rank: u64) -> Vec<u64> {
    let mut out = vec![0u64; parts as usize];
    let mut rem = total;
    let mut rank = BigUint::from(rank);
    for j in 0..parts.saturating_sub(1) {
        for v in 0..=rem {
            let below = compositions_count(rem - v, parts - 1 - j);
            if rank < below {
                out[j as usize] = v;
                rem -= v;
                break;
            }
            rank -= below;
        }
    }
    if parts >= 1 {
        out[parts as usize - 1] = rem;
    }
    out
}

/// Iterator over all weak compositions of `total` into `parts` parts in
/// lexicographic order, starting from `(0, ..., 0, total)`.
pub fn compositions(total: u64, parts: u64) -> Compositions {
    assert!(parts >= 1, "need at least one part");
    let mut buf = vec![0u64; parts as usize];
    buf[parts as usize - 1] = total;
    Compositions { buf, fresh: true, done: false }
}

pub struct Compositions {
    buf: Vec<u64>,
    fresh: bool,
    done: bool,
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.buf.clone());
        }
        if advance_composition(&mut self.buf) {
            Some(self.buf.clone())
        } else {
            self.done = true;
            None
        }
    }
}
