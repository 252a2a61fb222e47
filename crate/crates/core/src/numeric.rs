//! Log-domain arithmetic.
//!
//! All weight sums in the engines run through [`LogSumExp`], a streaming
//! max-shifted accumulator, so that models whose unnormalized weights span
//! hundreds of orders of magnitude never leave log space. Orbit cardinalities
//! are computed exactly as big integers first and enter float arithmetic
//! through a single [`ln_big`] conversion.

use num_bigint::BigUint;

pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

/// Natural log of a non-negative big integer. Zero maps to `-inf`.
///
/// The value is reduced to its top 64 bits plus a power of two, so the
/// result is exact to within one ulp of the true logarithm regardless of
/// the integer's size.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return ln(u64::try_from(x).expect("fits in 64 bits") as f64);
    }
    let shift = bits - 64;
    let top = u64::try_from(&(x >> shift)).expect("top word fits") as f64;
    ln(top) + shift as f64 * core::f64::consts::LN_2
}

/// Streaming log-sum-exp accumulator with running max shift.
///
/// `add` folds one term `exp(x)` into the sum; `merge` combines two partial
/// accumulators. Results depend only on the order of operations, never on
/// wall-clock scheduling, which keeps chunked parallel reductions
/// reproducible.
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.max == f64::NEG_INFINITY
    }

    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if self.is_empty() {
            self.max = x;
            self.sum = 1.0;
        } else if x <= self.max {
            self.sum += exp(x - self.max);
        } else {
            self.sum = self.sum * exp(self.max - x) + 1.0;
            self.max = x;
        }
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        if other.is_empty() {
            return;
        }
        if self.is_empty() {
            *self = *other;
        } else if other.max <= self.max {
            self.sum += other.sum * exp(other.max - self.max);
        } else {
            self.sum = self.sum * exp(self.max - other.max) + other.sum;
            self.max = other.max;
        }
    }

    /// `ln` of the accumulated sum; `-inf` when nothing was added.
    pub fn value(&self) -> f64 {
        if self.is_empty() {
            f64::NEG_INFINITY
        } else {
            self.max + ln(self.sum)
        }
    }
}
