//! Coefficient arithmetics shared by the exterior algebra.
//!
//! Identity checks run over exact rationals, the dynamics over `f64`. Both go
//! through the same generic code.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Arbitrary precision rational used for exact computations.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Whether a pivot of this size can be divided by. Exact types accept any
    /// nonzero value.
    fn is_usable_pivot(&self, scale: f64) -> bool;
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_usable_pivot(&self, scale: f64) -> bool {
        self.abs() > 1e-13 * scale.max(f64::MIN_POSITIVE)
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_usable_pivot(&self, _scale: f64) -> bool {
        !self.is_zero()
    }
}

/// Shorthand for `p/q` as an exact rational.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    if n == 0 {
        return S::one();
    }
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&a, &b| {
                m[a][col]
                    .to_f64()
                    .abs()
                    .partial_cmp(&m[b][col].to_f64().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(p) = pivot else {
            return S::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det = det * pv.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / pv.clone();
            for c in col..n {
                let v = m[col][c].clone();
                m[r][c] = m[r][c].clone() - factor.clone() * v;
            }
        }
    }
    det
}

/// Inverse by Gauss-Jordan elimination; `None` when singular.
pub fn invert<S: Scalar>(m: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    let n = m.len();
    let scale = m
        .iter()
        .flat_map(|row| row.iter().map(|v| v.to_f64().abs()))
        .fold(0.0, f64::max);
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut inv: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| {
            a[x][col]
                .to_f64()
                .abs()
                .partial_cmp(&a[y][col].to_f64().abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        let p = if a[p][col].is_zero() {
            (col..n).find(|&r| !a[r][col].is_zero())?
        } else {
            p
        };
        if !a[p][col].is_usable_pivot(scale) {
            return None;
        }
        a.swap(p, col);
        inv.swap(p, col);
        let pv = a[col][col].clone();
        for c in 0..n {
            a[col][c] = a[col][c].clone() / pv.clone();
            inv[col][c] = inv[col][c].clone() / pv.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let av = a[col][c].clone();
                let iv = inv[col][c].clone();
                a[r][c] = a[r][c].clone() - factor.clone() * av;
                inv[r][c] = inv[r][c].clone() - factor.clone() * iv;
            }
        }
    }
    Some(inv)
}
