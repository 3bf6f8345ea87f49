//! Block circulant matrices and their representers.
//!
//! Block row `a` of the full matrix is the first block row shifted right by
//! `a`, so block `(a, b)` is `C_{(b - a) mod n}` and the representer is
//! `r(t) = sum_i C_i t^i`. Exact constructions fold exponents mod `n`; complex
//! roots of unity appear only in [`block_diagonalize_check`].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactfield::{bits_for_digits, ComplexBall, NumberField};
use crate::laurent::{LaurentMatrix, LaurentPolynomial, RatMatrix, RationalFunction};
use crate::linalg::FieldMatrix;
use crate::rootsum::av_exact;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCirculant {
    blocks: Vec<FieldMatrix>,
}

impl BlockCirculant {
    pub fn new(blocks: Vec<FieldMatrix>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::Dimension(
                "a block circulant needs at least one block".into(),
            ));
        };
        let size = first.rows();
        if blocks.iter().any(|b| b.rows() != size || b.cols() != size) {
            return Err(Error::Dimension(
                "blocks must be square of equal size".into(),
            ));
        }
        Ok(BlockCirculant { blocks })
    }

    /// Folds the exponents of a Laurent matrix mod `n`.
    pub fn from_representer(r: &LaurentMatrix, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("n must be positive".into()));
        }
        let field = r.field().clone();
        let size = r.rows();
        let mut blocks = vec![FieldMatrix::zeros(&field, size, size); n];
        if let Some((lo, hi)) = r.exponent_range() {
            for k in lo..=hi {
                let i = k.rem_euclid(n as i64) as usize;
                blocks[i] = blocks[i].add(&r.coefficient(k));
            }
        }
        Self::new(blocks)
    }

    /// Blocks `C_i = (1/n) sum_{w^n=1} w^-i r(w)` for a rational representer,
    /// computed exactly through [`av_exact`].
    pub fn from_rational_representer(r: &RatMatrix, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("n must be positive".into()));
        }
        let field = r.field().clone();
        let size = r.rows();
        let inv_n = crate::exactfield::rat(1, n as i64);
        let mut blocks = Vec::with_capacity(n);
        for i in 0..n {
            let shift = LaurentPolynomial::t_pow(&field, -(i as i64));
            let mut m = FieldMatrix::zeros(&field, size, size);
            for a in 0..size {
                for b in 0..size {
                    let f: &RationalFunction = r.get(a, b);
                    let v = av_exact(&f.mul_laurent(&shift), n as u64)?;
                    m.set(a, b, v.scale(&inv_n));
                }
            }
            blocks.push(m);
        }
        Self::new(blocks)
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].rows()
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.blocks[0].field()
    }

    pub fn blocks(&self) -> &[FieldMatrix] {
        &self.blocks
    }

    /// Block at block-row `a`, block-column `b`.
    pub fn block(&self, a: usize, b: usize) -> &FieldMatrix {
        let n = self.n();
        &self.blocks[(b + n - a % n) % n]
    }

    pub fn representer(&self) -> LaurentMatrix {
        let parts: Vec<(i64, FieldMatrix)> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| (i as i64, b.clone()))
            .collect();
        LaurentMatrix::from_coefficients(self.field(), &parts).unwrap()
    }

    pub fn to_matrix(&self) -> FieldMatrix {
        let size = self.block_size();
        FieldMatrix::from_fn(self.field(), self.n() * size, self.n() * size, |i, j| {
            self.block(i / size, j / size)
                .get(i % size, j % size)
                .clone()
        })
    }

    /// Entry of the full `nN x nN` matrix.
    pub fn entry(&self, i: usize, j: usize) -> &crate::exactfield::FieldElement {
        let size = self.block_size();
        self.block(i / size, j / size).get(i % size, j % size)
    }

    /// Product; its representer is `r s mod (t^n - 1)`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() || self.block_size() != other.block_size() {
            return Err(Error::Dimension(
                "block circulants of different shapes".into(),
            ));
        }
        let n = self.n();
        let blocks = (0..n)
            .map(|k| {
                (0..n).fold(
                    FieldMatrix::zeros(self.field(), self.block_size(), self.block_size()),
                    |acc, i| acc.add(&self.blocks[i].mul(&other.blocks[(k + n - i) % n])),
                )
            })
            .collect();
        Self::new(blocks)
    }

    pub fn transpose(&self) -> Self {
        let n = self.n();
        let blocks = (0..n)
            .map(|i| self.blocks[(n - i) % n].transpose())
            .collect();
        BlockCirculant { blocks }
    }
}

/// Residuals of `V C V^-1` with `V_jk = w^(-jk) / n`, `w = exp(2 pi i / n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalizationResidual {
    /// Largest entry outside the diagonal blocks.
    pub off_diagonal: f64,
    /// Largest deviation of diagonal block `k` from `r(w^k)`.
    pub diagonal: f64,
}

type BallMatrix = Vec<Vec<ComplexBall>>;

fn embed_matrix(m: &FieldMatrix, root: &ComplexBall) -> BallMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).eval_at(root)).collect())
        .collect()
}

/// Conjugates by the block Vandermonde matrix in ball arithmetic, embedding
/// the coefficient field through root `root_index`.
pub fn block_diagonalize_check_at(
    c: &BlockCirculant,
    digits: u32,
    root_index: usize,
) -> Result<DiagonalizationResidual> {
    let bits = bits_for_digits(digits) + 32;
    let root = c.field().root_ball(root_index, bits)?;
    let n = c.n();
    let size = c.block_size();
    let blocks: Vec<BallMatrix> = c.blocks.iter().map(|b| embed_matrix(b, &root)).collect();
    let omega: Vec<ComplexBall> = (0..n)
        .map(|k| ComplexBall::root_of_unity(k as i64, n as u64, bits))
        .collect();
    let inv_n = crate::exactfield::rat(1, n as i64);
    let mut off = 0f64;
    let mut diag = 0f64;
    for j in 0..n {
        for k in 0..n {
            // (V C W)_{jk} = (1/n) sum_{a,b} w^(-ja) C_{b-a} w^(kb)
            let mut acc: BallMatrix = vec![vec![ComplexBall::zero(bits); size]; size];
            for a in 0..n {
                for b in 0..n {
                    let phase = &omega[((k * b) % n + n - (j * a) % n) % n];
                    let blk = &blocks[(b + n - a) % n];
                    for (x, row) in acc.iter_mut().enumerate() {
                        for (y, e) in row.iter_mut().enumerate() {
                            *e = e.add(&blk[x][y].mul(phase));
                        }
                    }
                }
            }
            for row in &mut acc {
                for e in row.iter_mut() {
                    *e = e.mul_rational(&inv_n);
                }
            }
            if j == k {
                // r(w^k)
                for (x, row) in acc.iter().enumerate() {
                    for (y, e) in row.iter().enumerate() {
                        let mut r = ComplexBall::zero(bits);
                        for (i, blk) in blocks.iter().enumerate() {
                            r = r.add(&blk[x][y].mul(&omega[(i * k) % n]));
                        }
                        diag = diag.max(e.sub(&r).abs_upper_f64());
                    }
                }
            } else {
                for e in acc.iter().flatten() {
                    off = off.max(e.abs_upper_f64());
                }
            }
        }
    }
    Ok(DiagonalizationResidual {
        off_diagonal: off,
        diagonal: diag,
    })
}

pub fn block_diagonalize_check(c: &BlockCirculant, digits: u32) -> Result<DiagonalizationResidual> {
    block_diagonalize_check_at(c, digits, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Arc<NumberField> {
        NumberField::rationals()
    }

    fn m(rows: &[Vec<i64>]) -> FieldMatrix {
        FieldMatrix::from_ints(&q(), rows).unwrap()
    }

    #[test]
    fn folds_exponents() {
        let (x0, x1, x2) = (
            m(&[vec![1, 2], vec![3, 4]]),
            m(&[vec![0, 1], vec![1, 0]]),
            m(&[vec![5, 0], vec![0, 5]]),
        );
        let r = LaurentMatrix::from_coefficients(
            &q(),
            &[(0, x0.clone()), (1, x1.clone()), (2, x2.clone())],
        )
        .unwrap();
        let c = BlockCirculant::from_representer(&r, 2).unwrap();
        assert_eq!(c.blocks(), &[x0.add(&x2), x1.clone()]);
        let c3 = BlockCirculant::from_representer(&r, 3).unwrap();
        assert_eq!(c3.representer(), r);
        let c1 = BlockCirculant::from_representer(&r, 1).unwrap();
        assert_eq!(c1.blocks()[0], r.eval_one());
    }

    #[test]
    fn product_matches_full_matrix() {
        let a = BlockCirculant::new(vec![
            m(&[vec![1, 2], vec![0, 1]]),
            m(&[vec![3, 0], vec![1, 1]]),
            m(&[vec![0, 0], vec![2, 0]]),
        ])
        .unwrap();
        let b = BlockCirculant::new(vec![
            m(&[vec![2, 0], vec![1, 1]]),
            m(&[vec![0, 1], vec![0, 0]]),
            m(&[vec![1, 1], vec![1, 1]]),
        ])
        .unwrap();
        assert_eq!(
            a.product(&b).unwrap().to_matrix(),
            a.to_matrix().mul(&b.to_matrix())
        );
        assert_eq!(a.transpose().to_matrix(), a.to_matrix().transpose());
    }

    #[test]
    fn rational_representer_inverse() {
        // (t + 1/t - 5)^-1 as a 1x1 representer; its blocks invert the cover of t + 1/t - 5
        let qf = q();
        let d = LaurentPolynomial::from_ints(&qf, -1, &[1, -5, 1]);
        let lm = LaurentMatrix::from_fn(&qf, 1, 1, |_, _| d.clone());
        let inv = RatMatrix::from_fn(&qf, 1, 1, |_, _| RationalFunction::recip_of(&d).unwrap());
        for n in 1..6 {
            let c = BlockCirculant::from_representer(&lm, n).unwrap();
            let ci = BlockCirculant::from_rational_representer(&inv, n).unwrap();
            let p = c.product(&ci).unwrap();
            assert_eq!(p.to_matrix(), FieldMatrix::identity(&qf, n));
        }
    }

    #[test]
    fn vandermonde_residual() {
        let c = BlockCirculant::new(vec![
            m(&[vec![1, 2], vec![0, 1]]),
            m(&[vec![3, 0], vec![1, -1]]),
            m(&[vec![0, 7], vec![2, 0]]),
        ])
        .unwrap();
        let r = block_diagonalize_check(&c, 50).unwrap();
        assert!(r.off_diagonal < 1e-40 && r.diagonal < 1e-40, "{r:?}");
        let one = BlockCirculant::new(vec![m(&[vec![4]])]).unwrap();
        assert_eq!(block_diagonalize_check(&one, 30).unwrap().off_diagonal, 0.0);
    }
}
