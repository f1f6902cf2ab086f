//! Dense matrices over a prime field, with Gaussian elimination as the
//! single rank/kernel/solve workhorse.

use super::field::PrimeField;
use crate::error::{input_err, Result};
use crate::rng::Rng;
use std::fmt;

/// Row-major dense matrix over GF(p). Entries always reduced mod p.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} mod {}", self.rows, self.cols, self.field.modulus())?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        for row in rows {
            if row.len() != c {
                return input_err("ragged matrix rows");
            }
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            for &x in row {
                data.push(field.reduce_u64(x));
            }
        }
        Ok(Matrix {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_fn(field: PrimeField, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut m = Matrix::zero(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn random(field: PrimeField, rows: usize, cols: usize, rng: &mut Rng) -> Self {
        Matrix::from_fn(field, rows, cols, |_, _| rng.below(field.modulus()))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = self.field.reduce_u64(v);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        assert_eq!(self.field, other.field);
        let f = self.field;
        let mut out = Matrix::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.data[i * out.cols + j] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let f = self.field;
        let mut out = vec![0u64; self.rows];
        for i in 0..self.rows {
            let mut acc = 0u64;
            for j in 0..self.cols {
                acc = f.add(acc, f.mul(self.get(i, j), v[j]));
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let mut out = self.clone();
        for i in 0..self.data.len() {
            out.data[i] = f.add(self.data[i], other.data[i]);
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let mut out = self.clone();
        for i in 0..self.data.len() {
            out.data[i] = f.sub(self.data[i], other.data[i]);
        }
        out
    }

    pub fn scale(&self, c: u64) -> Matrix {
        let f = self.field;
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = f.mul(*x, c);
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    /// Stack `self` above `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.field, other.field);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Place `self` left of `other`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.field, other.field);
        let mut out = Matrix::zero(self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * out.cols + j] = self.get(i, j);
            }
            for j in 0..other.cols {
                out.data[i * out.cols + self.cols + j] = other.get(i, j);
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zero(self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.data[i * out.cols + jj] = self.get(i, j);
            }
        }
        out
    }

    /// Write `block` into `self` with top-left corner at (r0, c0).
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = block.get(i, j);
            }
        }
    }

    /// Kronecker product, row-major basis order (i1,i2) x (j1,j2).
    pub fn kronecker(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.field, other.field);
        let mut out = Matrix::zero(self.field, self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a == 0 {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        let v = self.field.mul(a, other.get(i2, j2));
                        out.data[(i1 * other.rows + i2) * out.cols + j1 * other.cols + j2] = v;
                    }
                }
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns in
    /// ascending order (lowest-index pivot convention).
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let mut sel = None;
            for i in r..self.rows {
                if self.get(i, c) != 0 {
                    sel = Some(i);
                    break;
                }
            }
            let Some(i) = sel else { continue };
            if i != r {
                for j in 0..self.cols {
                    self.data.swap(i * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c));
            for j in c..self.cols {
                let v = f.mul(self.get(r, j), inv);
                self.data[r * self.cols + j] = v;
            }
            for i2 in 0..self.rows {
                if i2 == r {
                    continue;
                }
                let factor = self.get(i2, c);
                if factor == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let v = f.sub(self.get(i2, j), f.mul(factor, self.get(r, j)));
                    self.data[i2 * self.cols + j] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Basis of the right kernel {x : self * x = 0}; one vector per row of
    /// the returned matrix, in reduced echelon form. A trivial kernel
    /// yields a 0 x cols matrix.
    pub fn kernel_basis(&self) -> Matrix {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let f = self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        if free.is_empty() {
            return Matrix::zero(f, 0, self.cols);
        }
        let mut rows = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![0u64; self.cols];
            v[fc] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.get(ri, fc));
            }
            rows.push(v);
        }
        let mut out = Matrix::from_rows(f, &rows).expect("kernel rows are rectangular");
        out.rref_in_place();
        #[cfg(debug_assertions)]
        for i in 0..out.rows() {
            debug_assert!(
                self.mul_vec(out.row(i)).iter().all(|&x| x == 0),
                "kernel vector fails verification"
            );
        }
        out
    }

    /// Solve self * x = b for column vector b; None when inconsistent.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zero(self.field, self.rows, self.cols + 1);
        aug.paste(0, 0, self);
        for i in 0..self.rows {
            aug.set(i, self.cols, b[i]);
        }
        let pivots = aug.rref_in_place();
        if pivots.contains(&self.cols) {
            return None; // pivot in the augmented column
        }
        let mut x = vec![0u64; self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(ri, self.cols);
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f101() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    #[test]
    fn rank_identity_and_zero() {
        assert_eq!(Matrix::identity(f101(), 5).rank(), 5);
        assert_eq!(Matrix::zero(f101(), 3, 4).rank(), 0);
        let k = Matrix::zero(f101(), 3, 4).kernel_basis();
        assert_eq!(k.rows(), 4);
    }

    #[test]
    fn rank_plus_nullity() {
        let mut rng = Rng::new(11);
        for _ in 0..50 {
            let m = Matrix::random(f101(), 4, 6, &mut rng);
            let k = m.kernel_basis();
            assert_eq!(m.rank() + k.rows(), 6);
            for i in 0..k.rows() {
                assert!(m.mul_vec(k.row(i)).iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn rank_invariant_under_permutation() {
        let mut rng = Rng::new(3);
        for _ in 0..20 {
            let m = Matrix::random(f101(), 3, 5, &mut rng);
            let mut cperm: Vec<usize> = (0..5).collect();
            rng.shuffle(&mut cperm);
            assert_eq!(m.rank(), m.select_columns(&cperm).rank());
            let mut rperm: Vec<usize> = (0..3).collect();
            rng.shuffle(&mut rperm);
            let rows: Vec<Vec<u64>> = rperm.iter().map(|&i| m.row(i).to_vec()).collect();
            let rpermuted = Matrix::from_rows(f101(), &rows).unwrap();
            assert_eq!(m.rank(), rpermuted.rank());
        }
    }

    #[test]
    fn solve_round_trip() {
        let mut rng = Rng::new(9);
        for _ in 0..20 {
            let m = Matrix::random(f101(), 4, 4, &mut rng);
            let x: Vec<u64> = (0..4).map(|_| rng.below(101)).collect();
            let b = m.mul_vec(&x);
            let got = m.solve(&b).expect("consistent system");
            assert_eq!(m.mul_vec(&got), b);
        }
    }

    #[test]
    fn kronecker_shapes_and_rank() {
        let a = Matrix::from_rows(f101(), &[vec![1, 2], vec![3, 4]]).unwrap();
        let b = Matrix::from_rows(f101(), &[vec![0, 1], vec![1, 0]]).unwrap();
        let k = a.kronecker(&b);
        assert_eq!((k.rows(), k.cols()), (4, 4));
        assert_eq!(k.rank(), a.rank() * b.rank());
    }
}
