//! Exact polynomial arithmetic in the Bernstein basis: evaluation,
//! directional derivatives, nodal-matrix assembly, and fraction-free
//! elimination for rank and solves. Everything runs over arbitrary-precision
//! rationals, so a zero is a zero and full rank is a theorem about the
//! element, not about floating-point luck.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bernstein::{enumerate_indices, index_iter, BernsteinIndex};
use crate::combinatorics::binomial;
use crate::dofs::{DofFunctional, ElementSpec};
use crate::simplex::{normal_directions, BaryPoint, Direction};
use crate::{Error, Result};

pub type Rational = BigRational;

/// A polynomial on the reference simplex in Bernstein-Bézier form:
/// p = Σ c_α · multinomial(k; α) · λ^α over the degree-k index grid.
/// Coefficients are stored sparsely; absent indices are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    ambient_dim: usize,
    degree: u32,
    coeffs: BTreeMap<BernsteinIndex, Rational>,
}

// k! / Π α_i!, built as a product of binomials over partial sums.
fn multinomial(index: &BernsteinIndex) -> BigUint {
    let mut total = 0u64;
    let mut result = BigUint::one();
    for &a in index.entries() {
        total += a as u64;
        result *= binomial(total, a as u64)
            .expect("partial sums dominate entries")
            .as_biguint();
    }
    result
}

// Value of the Bernstein basis function B_α at a barycentric point.
fn basis_value(index: &BernsteinIndex, point: &BaryPoint) -> Rational {
    let mut value = Rational::from_integer(multinomial(index).into());
    for (lambda, &a) in point.coords().iter().zip(index.entries()) {
        if a == 0 {
            continue;
        }
        if lambda.is_zero() {
            return Rational::zero();
        }
        value *= num_traits::pow(lambda.clone(), a as usize);
    }
    value
}

impl Polynomial {
    pub fn zero(ambient_dim: usize, degree: u32) -> Self {
        Polynomial {
            ambient_dim,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The single basis function B_α (coefficient one at `index`).
    pub fn bernstein_basis(index: BernsteinIndex) -> Self {
        let ambient_dim = index.ambient_dim();
        let degree = index.degree();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(index, Rational::one());
        Polynomial {
            ambient_dim,
            degree,
            coeffs,
        }
    }

    pub fn from_coeffs(
        ambient_dim: usize,
        degree: u32,
        coeffs: BTreeMap<BernsteinIndex, Rational>,
    ) -> Result<Self> {
        for index in coeffs.keys() {
            if index.ambient_dim() != ambient_dim || index.degree() != degree {
                return Err(Error::InvalidArgument(format!(
                    "coefficient index {index} does not sit on the degree-{degree} grid \
                     of a {ambient_dim}-simplex"
                )));
            }
        }
        let mut coeffs = coeffs;
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Polynomial {
            ambient_dim,
            degree,
            coeffs,
        })
    }

    /// Builds a polynomial from a dense coefficient vector aligned with the
    /// lexicographic index enumeration (the same order `vandermonde` uses
    /// for its columns).
    pub fn from_dense(ambient_dim: usize, degree: u32, coeffs: &[Rational]) -> Result<Self> {
        let indices = enumerate_indices(ambient_dim, degree)?;
        if coeffs.len() != indices.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                indices.len(),
                coeffs.len()
            )));
        }
        let map = indices
            .into_iter()
            .zip(coeffs.iter().cloned())
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Ok(Polynomial {
            ambient_dim,
            degree,
            coeffs: map,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeff(&self, index: &BernsteinIndex) -> Rational {
        self.coeffs.get(index).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, point: &BaryPoint) -> Result<Rational> {
        if point.ambient_dim() != self.ambient_dim {
            return Err(Error::InvalidArgument(format!(
                "point has ambient dimension {}, polynomial {}",
                point.ambient_dim(),
                self.ambient_dim
            )));
        }
        let mut acc = Rational::zero();
        for (alpha, c) in &self.coeffs {
            let b = basis_value(alpha, point);
            if !b.is_zero() {
                acc += b * c;
            }
        }
        Ok(acc)
    }

    /// Derivative along a barycentric direction d (weights summing to zero):
    /// the degree drops by one and c'_β = k · Σ_i d_i · c_{β+e_i}.
    pub fn directional_derivative(&self, direction: &Direction) -> Result<Polynomial> {
        if direction.ambient_dim() != self.ambient_dim {
            return Err(Error::InvalidArgument(format!(
                "direction has ambient dimension {}, polynomial {}",
                direction.ambient_dim(),
                self.ambient_dim
            )));
        }
        if self.degree == 0 {
            return Ok(Polynomial::zero(self.ambient_dim, 0));
        }
        let factor = Rational::from_integer(self.degree.into());
        let mut coeffs: BTreeMap<BernsteinIndex, Rational> = BTreeMap::new();
        for (alpha, c) in &self.coeffs {
            for (i, &d_i) in direction.deltas().iter().enumerate() {
                if d_i == 0 || alpha.entries()[i] == 0 {
                    continue;
                }
                let mut entries = alpha.entries().to_vec();
                entries[i] -= 1;
                let beta = BernsteinIndex::new(entries)?;
                let term = &factor * Rational::from_integer(d_i.into()) * c;
                *coeffs.entry(beta).or_insert_with(Rational::zero) += term;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Polynomial {
            ambient_dim: self.ambient_dim,
            degree: self.degree - 1,
            coeffs,
        })
    }

    /// Mixed derivative: each direction applied the given number of times.
    /// Directional derivatives commute, so the order is immaterial.
    pub fn apply_derivatives(&self, steps: &[(Direction, u32)]) -> Result<Polynomial> {
        let mut p = self.clone();
        for (direction, count) in steps {
            for _ in 0..*count {
                p = p.directional_derivative(direction)?;
            }
        }
        Ok(p)
    }
}

/// Applies one nodal functional: the mixed normal derivative prescribed by
/// the owner face and multi-order, evaluated at the functional's point.
/// Interior functionals are plain point evaluations.
pub fn apply_functional(functional: &DofFunctional, p: &Polynomial) -> Result<Rational> {
    if p.ambient_dim() != functional.owner.ambient_dim() {
        return Err(Error::InvalidArgument(format!(
            "functional lives on a {}-simplex, polynomial on a {}-simplex",
            functional.owner.ambient_dim(),
            p.ambient_dim()
        )));
    }
    if functional.owner.is_full_simplex() {
        return p.eval(&functional.point);
    }
    let directions = normal_directions(&functional.owner)?;
    if directions.len() != functional.direction_multiorder.len() {
        return Err(Error::InvalidArgument(format!(
            "multi-order has {} entries for a face with {} normal directions",
            functional.direction_multiorder.len(),
            directions.len()
        )));
    }
    let steps: Vec<(Direction, u32)> = directions
        .into_iter()
        .zip(functional.direction_multiorder.iter().copied())
        .collect();
    p.apply_derivatives(&steps)?.eval(&functional.point)
}

// A functional as a linear form over degree-k coefficient space. The row it
// produces equals [apply_functional(f, B_γ)]_γ, but is assembled in one
// cascade: start from the evaluation weights of the lower-degree basis at
// the point, then pull back through each derivative step, using
// q = D_d p  ⟹  L(q) = Σ_γ (deg p) · (Σ_{i: γ_i ≥ 1} d_i · w_{γ-e_i}) · p_γ.
fn functional_weights(
    functional: &DofFunctional,
    degree: u32,
) -> Result<BTreeMap<BernsteinIndex, Rational>> {
    let n = functional.owner.ambient_dim();
    let eff = degree - functional.order;
    let mut weights = BTreeMap::new();
    for beta in index_iter(n, eff)? {
        let w = basis_value(&beta, &functional.point);
        if !w.is_zero() {
            weights.insert(beta, w);
        }
    }
    if functional.owner.is_full_simplex() {
        return Ok(weights);
    }
    let directions = normal_directions(&functional.owner)?;
    let mut current = eff;
    for (direction, &count) in directions.iter().zip(&functional.direction_multiorder) {
        for _ in 0..count {
            let factor = Rational::from_integer((current + 1).into());
            let mut next: BTreeMap<BernsteinIndex, Rational> = BTreeMap::new();
            for (beta, w) in &weights {
                for (i, &d_i) in direction.deltas().iter().enumerate() {
                    if d_i == 0 {
                        continue;
                    }
                    let mut entries = beta.entries().to_vec();
                    entries[i] += 1;
                    let gamma = BernsteinIndex::new(entries)?;
                    let term = &factor * Rational::from_integer(d_i.into()) * w;
                    *next.entry(gamma).or_insert_with(Rational::zero) += term;
                }
            }
            next.retain(|_, c| !c.is_zero());
            weights = next;
            current += 1;
        }
    }
    Ok(weights)
}

/// The nodal matrix of an element: entry (i, j) is functional i applied to
/// basis function j, with columns in lexicographic index order. `cap`, when
/// given, bounds the matrix dimension; larger elements are refused rather
/// than silently ground through.
pub fn vandermonde(element: &ElementSpec, cap: Option<usize>) -> Result<Vec<Vec<Rational>>> {
    let dim = element.functionals.len();
    if let Some(cap) = cap {
        if dim > cap {
            return Err(Error::SizeExceeded(format!(
                "the nodal matrix is {dim}x{dim} in exact rationals, above the cap of {cap}; \
                 this check is sized for desk-scale elements — raise the cap to force the run"
            )));
        }
    }
    let n = element.profile.ambient_dim();
    let k = element.profile.degree();
    let basis = enumerate_indices(n, k)?;
    let mut rows = Vec::with_capacity(dim);
    for functional in &element.functionals {
        let weights = functional_weights(functional, k)?;
        let row: Vec<Rational> = basis
            .iter()
            .map(|b| weights.get(b).cloned().unwrap_or_else(Rational::zero))
            .collect();
        rows.push(row);
    }
    Ok(rows)
}

// Scale each row by the LCM of its denominators: integer rows, same rank,
// same solution set once the right-hand side is scaled along.
fn clear_denominators(matrix: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    matrix
        .iter()
        .map(|row| {
            let mut l = BigInt::one();
            for e in row {
                l = l.lcm(e.denom());
            }
            row.iter().map(|e| e.numer() * (&l / e.denom())).collect()
        })
        .collect()
}

/// Exact matrix rank by Bareiss fraction-free elimination: every division is
/// exact (entries stay minors of the integer matrix), pivots are the first
/// nonzero entry below the diagonal, and columns with no pivot are skipped.
pub fn exact_rank(matrix: &[Vec<Rational>]) -> usize {
    let rows = matrix.len();
    if rows == 0 {
        return 0;
    }
    let cols = matrix[0].len();
    let mut m = clear_denominators(matrix);
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            col += 1;
            continue;
        };
        m.swap(rank, pivot);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let num = &m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j];
                m[i][j] = num / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        col += 1;
    }
    rank
}

/// Solves a square rational system exactly: fraction-free forward
/// elimination on the augmented integer matrix, then rational back
/// substitution. Returns None when the matrix is singular.
pub fn solve_linear_system(
    matrix: &[Vec<Rational>],
    rhs: &[Rational],
) -> Result<Option<Vec<Rational>>> {
    let size = matrix.len();
    if size == 0 || rhs.len() != size || matrix.iter().any(|r| r.len() != size) {
        return Err(Error::InvalidArgument(
            "solve needs a square system with a matching right-hand side".into(),
        ));
    }
    let augmented: Vec<Vec<Rational>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| row.iter().chain(std::iter::once(b)).cloned().collect())
        .collect();
    let mut m = clear_denominators(&augmented);
    let mut prev = BigInt::one();
    for s in 0..size {
        let Some(pivot) = (s..size).find(|&r| !m[r][s].is_zero()) else {
            return Ok(None);
        };
        m.swap(s, pivot);
        for i in s + 1..size {
            for j in s + 1..=size {
                let num = &m[s][s] * &m[i][j] - &m[i][s] * &m[s][j];
                m[i][j] = num / &prev;
            }
            m[i][s] = BigInt::zero();
        }
        prev = m[s][s].clone();
    }
    let mut x = vec![Rational::zero(); size];
    for i in (0..size).rev() {
        let mut acc = Rational::from_integer(m[i][size].clone());
        for j in i + 1..size {
            acc -= Rational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Ok(Some(x))
}
