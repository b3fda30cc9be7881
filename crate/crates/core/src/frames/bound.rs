//! The size bound behind the finite model property.
//!
//! With `s = |Σ|` the number of bisimilarity classes of depth 0 is at most
//! `2^s · 2^(2^s)`, and of depth `n` at most `2^s · 2^(2^s) · 2^(b(n-1))`
//! where `b(n-1)` bounds depth `n-1`. Every term is a power of two, so each is
//! kept as its exponent, and exponents that are too large to write out are
//! kept as `offset + 2^inner`. The total is a sum of distinct powers of two.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::FrameError;

/// Largest accepted `|Σ|`. Keeps every `offset` far below [`EXPAND_BITS`].
pub const MAX_SIGMA_SIZE: usize = 4096;

/// Exponents whose value needs more bits than this stay symbolic.
const EXPAND_BITS: u64 = 1 << 16;

/// Integers written out in full only up to this many bits.
const PRINT_BITS: u64 = 4096;

/// An exponent: either an integer or `offset + 2^inner`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Int(BigUint),
    AddPow { offset: BigUint, inner: Box<Exponent> },
}

impl Exponent {
    fn add_pow(offset: BigUint, inner: Exponent) -> Exponent {
        Exponent::AddPow {
            offset,
            inner: Box::new(inner),
        }
    }

    /// The value, if it fits in `cap` bits.
    pub fn value(&self, cap: u64) -> Option<BigUint> {
        let v = match self {
            Exponent::Int(k) => k.clone(),
            Exponent::AddPow { offset, inner } => {
                let k = inner.value(cap.min(64))?;
                let k: u64 = k.try_into().ok()?;
                if k >= cap {
                    return None;
                }
                offset + (BigUint::one() << k)
            }
        };
        (v.bits() <= cap).then_some(v)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.value(EXPAND_BITS), other.value(EXPAND_BITS)) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => match (self, other) {
                (
                    Exponent::AddPow {
                        offset: o1,
                        inner: i1,
                    },
                    Exponent::AddPow {
                        offset: o2,
                        inner: i2,
                    },
                ) => i1.cmp(i2).then_with(|| o1.cmp(o2)),
                _ => unreachable!("integer exponents are always expandable"),
            },
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.value(64) {
            return write!(f, "{v}");
        }
        match self {
            Exponent::Int(k) => write!(f, "{k}"),
            Exponent::AddPow { offset, inner } => {
                let pow = match inner.value(64) {
                    Some(k) => format!("2^{k}"),
                    None => format!("2^({inner})"),
                };
                if offset.is_zero() {
                    f.write_str(&pow)
                } else {
                    write!(f, "{offset}+{pow}")
                }
            }
        }
    }
}

/// A sum of distinct powers of two, exponents in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TowerInt {
    exponents: Vec<Exponent>,
}

impl TowerInt {
    pub fn power_of_two(e: Exponent) -> TowerInt {
        TowerInt { exponents: vec![e] }
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exponents
    }

    /// The exact value when every exponent is at most `cap_bits`.
    pub fn to_biguint(&self, cap_bits: u64) -> Option<BigUint> {
        let mut total = BigUint::zero();
        for e in &self.exponents {
            let k: u64 = e.value(64)?.try_into().ok()?;
            if k > cap_bits {
                return None;
            }
            total += BigUint::one() << k;
        }
        Some(total)
    }

    /// Decimal digits when small enough to print, otherwise a sum of powers.
    pub fn render(&self) -> String {
        self.to_string()
    }

    pub fn is_printable(&self) -> bool {
        self.to_biguint(PRINT_BITS).is_some()
    }
}

impl fmt::Display for TowerInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.to_biguint(PRINT_BITS) {
            return write!(f, "{v}");
        }
        let parts: Vec<String> = self.exponents.iter().map(|e| format!("2^({e})")).collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FmpBound {
    pub sigma_size: usize,
    pub per_depth: Vec<TowerInt>,
    pub total: TowerInt,
    pub depth_bound: usize,
}

/// Per-depth and total bounds on the quotient size for `|Σ| = sigma_size`.
pub fn fmp_bound(sigma_size: usize) -> Result<FmpBound, FrameError> {
    if sigma_size == 0 {
        return Err(FrameError::InvalidInput(
            "sigma size must be positive (the closure set contains its seed)".into(),
        ));
    }
    if sigma_size > MAX_SIGMA_SIZE {
        return Err(FrameError::InvalidInput(format!(
            "sigma size {sigma_size} exceeds the supported maximum {MAX_SIGMA_SIZE}"
        )));
    }
    let s = BigUint::from(sigma_size);
    // 2^s · 2^(2^s) = 2^(s + 2^s)
    let base = &s + (BigUint::one() << sigma_size);
    let mut exps: Vec<Exponent> = Vec::with_capacity(sigma_size);
    exps.push(Exponent::Int(base.clone()));
    for n in 1..sigma_size {
        let prev = exps[n - 1].clone();
        exps.push(Exponent::add_pow(base.clone(), prev));
    }
    let per_depth = exps.iter().cloned().map(TowerInt::power_of_two).collect();
    let mut descending = exps;
    descending.reverse();
    Ok(FmpBound {
        sigma_size,
        per_depth,
        total: TowerInt {
            exponents: descending,
        },
        depth_bound: sigma_size - 1,
    })
}
