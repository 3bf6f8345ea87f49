use std::sync::Arc;

use serde_json::Value;

use super::laurent_poly::LaurentPolynomial;
use super::ratfunc::RationalFunction;
use crate::error::{Error, Result};
use crate::exactfield::{FieldElement, NumberField};
use crate::linalg::FieldMatrix;

/// Dense matrix of Laurent polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    field: Arc<NumberField>,
    data: Vec<LaurentPolynomial>,
}

impl LaurentMatrix {
    pub fn zeros(field: &Arc<NumberField>, rows: usize, cols: usize) -> Self {
        LaurentMatrix {
            rows,
            cols,
            field: field.clone(),
            data: vec![LaurentPolynomial::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &Arc<NumberField>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, LaurentPolynomial::one(field));
        }
        m
    }

    pub fn from_fn(
        field: &Arc<NumberField>,
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> LaurentPolynomial,
    ) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        LaurentMatrix {
            rows,
            cols,
            field: field.clone(),
            data,
        }
    }

    /// `sum_k X_k t^k` from coefficient matrices.
    pub fn from_coefficients(
        field: &Arc<NumberField>,
        parts: &[(i64, FieldMatrix)],
    ) -> Result<Self> {
        let (r, c) = parts.first().map_or((0, 0), |(_, m)| (m.rows(), m.cols()));
        if parts.iter().any(|(_, m)| (m.rows(), m.cols()) != (r, c)) {
            return Err(Error::Dimension(
                "coefficient matrices differ in shape".into(),
            ));
        }
        Ok(Self::from_fn(field, r, c, |i, j| {
            LaurentPolynomial::from_terms(
                field,
                parts.iter().map(|(k, m)| (*k, m.get(i, j).clone())),
            )
        }))
    }

    /// The constant matrix `m`.
    pub fn constant(m: &FieldMatrix) -> Self {
        Self::from_fn(m.field(), m.rows(), m.cols(), |i, j| {
            LaurentPolynomial::constant(m.get(i, j).clone())
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPolynomial {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentPolynomial) {
        self.data[i * self.cols + j] = v;
    }

    /// Range of exponents appearing in any entry.
    pub fn exponent_range(&self) -> Option<(i64, i64)> {
        let lows = self.data.iter().filter_map(LaurentPolynomial::low).min()?;
        let highs = self.data.iter().filter_map(LaurentPolynomial::high).max()?;
        Some((lows, highs))
    }

    /// Coefficient matrix of `t^k`.
    pub fn coefficient(&self, k: i64) -> FieldMatrix {
        FieldMatrix::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).coeff(k)
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    /// `M(1/t)`.
    pub fn invert_variable(&self) -> Self {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).invert_variable()
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).add(other.get(i, j))
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).sub(other.get(i, j))
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        Self::from_fn(&self.field, self.rows, other.cols, |i, j| {
            (0..self.cols).fold(LaurentPolynomial::zero(&self.field), |acc, k| {
                acc.add(&self.get(i, k).mul(other.get(k, j)))
            })
        })
    }

    pub fn eval(&self, a: &FieldElement) -> Result<FieldMatrix> {
        let data = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).eval(a))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FieldMatrix::from_rows(&self.field, data)
    }

    pub fn eval_one(&self) -> FieldMatrix {
        FieldMatrix::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).eval_one()
        })
    }

    /// Fraction-free elimination on `[self | rhs]`. Returns the final pivot
    /// `d` and the right block, which equals `d * self^{-1} * rhs`.
    fn bareiss(&self, rhs: Option<&Self>) -> Result<(LaurentPolynomial, Option<Self>, bool)> {
        if self.rows != self.cols {
            return Err(Error::Dimension("square matrix required".into()));
        }
        let n = self.rows;
        let extra = rhs.map_or(0, |r| r.cols);
        let width = n + extra;
        let mut a: Vec<Vec<LaurentPolynomial>> = (0..n)
            .map(|i| {
                let mut row: Vec<_> = (0..n).map(|j| self.get(i, j).clone()).collect();
                if let Some(r) = rhs {
                    row.extend((0..extra).map(|j| r.get(i, j).clone()));
                }
                row
            })
            .collect();
        let mut prev = LaurentPolynomial::one(&self.field);
        let mut negated = false;
        let full = rhs.is_some();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok((LaurentPolynomial::zero(&self.field), None, negated));
            };
            if p != k {
                a.swap(k, p);
                negated = !negated;
            }
            let pivot = a[k][k].clone();
            let targets: Vec<usize> = if full {
                (0..n).filter(|&i| i != k).collect()
            } else {
                (k + 1..n).collect()
            };
            for i in targets {
                let aik = a[i][k].clone();
                for j in 0..width {
                    if j == k {
                        continue;
                    }
                    let v = pivot.mul(&a[i][j]).sub(&aik.mul(&a[k][j]));
                    a[i][j] = v.div_exact(&prev).expect("fraction-free step is exact");
                }
                a[i][k] = LaurentPolynomial::zero(&self.field);
            }
            prev = pivot;
        }
        let right = rhs.map(|r| Self::from_fn(&self.field, n, r.cols, |i, j| a[i][n + j].clone()));
        Ok((prev, right, negated))
    }

    pub fn det(&self) -> Result<LaurentPolynomial> {
        let (d, _, negated) = self.bareiss(None)?;
        Ok(if negated { d.neg() } else { d })
    }

    /// Exact inverse with rational-function entries.
    pub fn inverse(&self) -> Result<RatMatrix> {
        let (d, right, _) = self.bareiss(Some(&Self::identity(&self.field, self.rows)))?;
        if d.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let right = right.unwrap();
        let entries = (0..self.rows * self.cols)
            .map(|k| RationalFunction::new(right.data[k].clone(), d.clone()).unwrap())
            .collect();
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field.clone(),
            data: entries,
        })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| Value::Array((0..self.cols).map(|j| self.get(i, j).to_json()).collect()))
                .collect(),
        )
    }
}

/// Dense matrix of rational functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    field: Arc<NumberField>,
    data: Vec<RationalFunction>,
}

impl RatMatrix {
    pub fn from_fn(
        field: &Arc<NumberField>,
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> RationalFunction,
    ) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        RatMatrix {
            rows,
            cols,
            field: field.clone(),
            data,
        }
    }

    pub fn from_laurent(m: &LaurentMatrix) -> Self {
        Self::from_fn(&m.field, m.rows, m.cols, |i, j| {
            RationalFunction::from_laurent(m.get(i, j).clone())
        })
    }

    pub fn identity(field: &Arc<NumberField>, n: usize) -> Self {
        Self::from_laurent(&LaurentMatrix::identity(field, n))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalFunction {
        &self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[RationalFunction] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn invert_variable(&self) -> Self {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).invert_variable()
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).add(other.get(i, j))
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).sub(other.get(i, j))
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        Self::from_fn(&self.field, self.rows, other.cols, |i, j| {
            (0..self.cols).fold(RationalFunction::zero(&self.field), |acc, k| {
                acc.add(&self.get(i, k).mul(other.get(k, j)))
            })
        })
    }

    pub fn is_identity(&self) -> bool {
        (0..self.rows).all(|i| {
            (0..self.cols).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.as_laurent()
                        .is_some_and(|p| p.is_constant() && p.coeff(0).is_one())
                } else {
                    e.is_zero()
                }
            })
        })
    }

    pub fn eval(&self, a: &FieldElement) -> Result<FieldMatrix> {
        let data = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).eval(a))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FieldMatrix::from_rows(&self.field, data)
    }

    /// Product of the denominators' least common multiple, as a polynomial.
    pub fn common_denominator(&self) -> LaurentPolynomial {
        let mut acc = LaurentPolynomial::one(&self.field).to_poly().1;
        for e in &self.data {
            let d = e.den_poly();
            let g = acc.gcd(&d);
            acc = acc.mul(&d.div_exact(&g).unwrap());
        }
        LaurentPolynomial::from_poly(&acc, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(f: &Arc<NumberField>, low: i64, c: &[i64]) -> LaurentPolynomial {
        LaurentPolynomial::from_ints(f, low, c)
    }

    #[test]
    fn one_by_one_inverse() {
        let q = NumberField::rationals();
        let d = lp(&q, -1, &[1, -5, 1]);
        let m = LaurentMatrix::from_fn(&q, 1, 1, |_, _| d.clone());
        let inv = m.inverse().unwrap();
        assert_eq!(inv.get(0, 0), &RationalFunction::recip_of(&d).unwrap());
        assert_eq!(m.det().unwrap(), d);
    }

    #[test]
    fn three_by_three_inverse() {
        let q = NumberField::rationals();
        let entries = [
            lp(&q, -1, &[1, 2]),
            lp(&q, 0, &[3]),
            lp(&q, 0, &[0, 1]),
            lp(&q, 0, &[1, -1]),
            lp(&q, -1, &[2, 0, 1]),
            lp(&q, 0, &[5]),
            lp(&q, 0, &[0]),
            lp(&q, 0, &[1, 1]),
            lp(&q, -2, &[1]),
        ];
        let m = LaurentMatrix::from_fn(&q, 3, 3, |i, j| entries[3 * i + j].clone());
        let inv = m.inverse().unwrap();
        let mr = RatMatrix::from_laurent(&m);
        assert!(mr.mul(&inv).is_identity());
        assert!(inv.mul(&mr).is_identity());
        let x = q.from_int(3);
        assert_eq!(
            m.det().unwrap().eval(&x).unwrap(),
            m.eval(&x).unwrap().det().unwrap()
        );
    }

    #[test]
    fn singular_is_reported() {
        let q = NumberField::rationals();
        let a = lp(&q, 0, &[1, 1]);
        let m = LaurentMatrix::from_fn(&q, 2, 2, |_, _| a.clone());
        assert_eq!(m.inverse(), Err(Error::SingularMatrix));
        assert!(m.det().unwrap().is_zero());
    }
}
