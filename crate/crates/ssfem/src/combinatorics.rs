//! Exact counting primitives: binomials, polynomial-space dimensions,
//! hockey-stick sums, and chopped simplex-grid counts.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Nonnegative arbitrary-precision count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Count(BigUint);

impl Count {
    pub fn zero() -> Self {
        Count(BigUint::zero())
    }

    pub fn one() -> Self {
        Count(BigUint::one())
    }

    pub fn from_u64(v: u64) -> Self {
        Count(BigUint::from(v))
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    /// Value as u64 when it fits; counts in this crate stay far below 2^64
    /// for every supported configuration, but the storage is unbounded.
    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.0).ok()
    }

    /// Subtraction that reports over-chopping instead of wrapping.
    pub fn checked_sub(&self, rhs: &Count) -> Result<Count> {
        if self.0 >= rhs.0 {
            Ok(Count(&self.0 - &rhs.0))
        } else {
            Err(Error::InvalidConfiguration(format!(
                "count underflow: {} - {}",
                self.0, rhs.0
            )))
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for Count {
    fn from(v: u64) -> Self {
        Count::from_u64(v)
    }
}

impl Add for Count {
    type Output = Count;
    fn add(self, rhs: Count) -> Count {
        Count(self.0 + rhs.0)
    }
}

impl Add<&Count> for Count {
    type Output = Count;
    fn add(self, rhs: &Count) -> Count {
        Count(self.0 + &rhs.0)
    }
}

impl AddAssign<&Count> for Count {
    fn add_assign(&mut self, rhs: &Count) {
        self.0 += &rhs.0;
    }
}

impl Sub for Count {
    type Output = Count;
    fn sub(self, rhs: Count) -> Count {
        self.checked_sub(&rhs).expect("count subtraction underflow")
    }
}

impl Mul for Count {
    type Output = Count;
    fn mul(self, rhs: Count) -> Count {
        Count(self.0 * rhs.0)
    }
}

impl Mul<u64> for Count {
    type Output = Count;
    fn mul(self, rhs: u64) -> Count {
        Count(self.0 * BigUint::from(rhs))
    }
}

/// Binomial coefficient C(m, n), exact. Errors when n > m.
pub fn binomial(m: u64, n: u64) -> Result<Count> {
    if n > m {
        return Err(Error::InvalidArgument(format!(
            "binomial({m}, {n}): lower index exceeds upper index"
        )));
    }
    // Multiplicative form; each partial product is divisible by i because
    // C(m-n+i, i) is an integer.
    let n = n.min(m - n);
    let mut acc = BigUint::one();
    for i in 1..=n {
        acc = acc * BigUint::from(m - n + i) / BigUint::from(i);
    }
    Ok(Count(acc))
}

/// Binomial that treats a negative upper index slot as an empty count.
/// Convenience for chopped corners whose size parameter can go below zero.
pub(crate) fn binomial_or_zero(m: i64, n: u64) -> Count {
    if m < 0 || (m as u64) < n {
        Count::zero()
    } else {
        binomial(m as u64, n).expect("checked range")
    }
}

/// Dimension of the degree-k polynomial space in n variables: C(k+n, n).
pub fn poly_dim(n: usize, k: u32) -> Count {
    binomial(k as u64 + n as u64, n as u64).expect("k+n >= n")
}

/// Sum of shallow-diagonal binomials: sum_{i=0..=k} C(n+i, i) = C(n+k+1, k).
pub fn hockey_stick_a(n: usize, k: u32) -> Count {
    binomial(n as u64 + k as u64 + 1, k as u64).expect("identity range")
}

/// Sum of fixed-lower-index binomials: sum_{i=0..=k} C(n+i, n) = C(n+k+1, n+1).
pub fn hockey_stick_b(n: usize, k: u32) -> Count {
    binomial(n as u64 + k as u64 + 1, n as u64 + 1).expect("identity range")
}

/// Size of a degree-`degree` simplex grid in `face_dim` variables after
/// removing a degree-`corner_degree` sub-grid at each of the face_dim + 1
/// corners: C(degree+face_dim, face_dim) - (face_dim+1) * C(corner_degree+face_dim, face_dim).
///
/// `corner_degree = None` means no chopping (plain grid size).
pub fn chopped_count(face_dim: usize, degree: u32, corner_degree: Option<u32>) -> Result<Count> {
    let full = poly_dim(face_dim, degree);
    let Some(c) = corner_degree else {
        return Ok(full);
    };
    let corner = poly_dim(face_dim, c);
    let removed = corner * (face_dim as u64 + 1);
    full.checked_sub(&removed).map_err(|_| {
        Error::InvalidConfiguration(format!(
            "chopped_count({face_dim}, {degree}, {c}): corners exceed the grid"
        ))
    })
}

/// Number of integer vectors of length `vars` with entries in [low, high]
/// summing to `total`. Exact inclusion-exclusion over the upper bounds.
pub fn bounded_sum_count(vars: usize, total: i64, low: i64, high: i64) -> Count {
    if vars == 0 {
        return if total == 0 { Count::one() } else { Count::zero() };
    }
    if low > high {
        return Count::zero();
    }
    let shifted = total - low * vars as i64;
    if shifted < 0 {
        return Count::zero();
    }
    let span = (high - low) as u64 + 1;
    // #{x in [0, span-1]^vars, sum x = shifted}
    //   = sum_j (-1)^j C(vars, j) C(shifted - j*span + vars - 1, vars - 1)
    let mut acc = Count::zero();
    let mut neg = Count::zero();
    for j in 0..=vars as u64 {
        let rem = shifted - (j * span) as i64;
        if rem < 0 {
            break;
        }
        let term = binomial(vars as u64, j).expect("j <= vars")
            * binomial_or_zero(rem + vars as i64 - 1, vars as u64 - 1);
        if j % 2 == 0 {
            acc += &term;
        } else {
            neg += &term;
        }
    }
    acc.checked_sub(&neg).expect("inclusion-exclusion is nonnegative")
}
