//! Subspaces of GF(p)^n in canonical reduced-echelon form, plus the
//! small-field enumeration helpers the excess oracles rely on.

use super::field::PrimeField;
use super::matrix::Matrix;
use crate::error::{input_err, Result};
use crate::rng::Rng;

/// A subspace of GF(p)^ambient. The basis is a reduced-row-echelon matrix
/// with one basis vector per row; equal subspaces have equal
/// representations, so `==` is subspace equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zero(field, 0, ambient),
        }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(field, ambient),
        }
    }

    /// Span of the rows of `gens`.
    pub fn span(gens: &Matrix) -> Self {
        let mut m = gens.clone();
        let pivots = m.rref_in_place();
        let dim = pivots.len();
        if dim == 0 {
            return Subspace::zero(gens.field(), gens.cols());
        }
        let rows: Vec<Vec<u64>> = (0..dim).map(|i| m.row(i).to_vec()).collect();
        Subspace {
            ambient: gens.cols(),
            basis: Matrix::from_rows(gens.field(), &rows).expect("rectangular"),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.basis.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Echelon basis rows.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient || self.field() != other.field() {
            return input_err(format!(
                "subspace ambient mismatch: {} vs {}",
                self.ambient, other.ambient
            ));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        Ok(Subspace::span(&self.basis.vstack(&other.basis)))
    }

    /// Zassenhaus: rref of [B1 | B1; B2 | 0]; rows whose left half is zero
    /// carry an intersection basis in the right half.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let f = self.field();
        let n = self.ambient;
        let top = self.basis.hstack(&self.basis);
        let bottom = other.basis.hstack(&Matrix::zero(f, other.basis.rows(), n));
        let mut big = top.vstack(&bottom);
        big.rref_in_place();
        let mut rows = Vec::new();
        for i in 0..big.rows() {
            let left_zero = (0..n).all(|j| big.get(i, j) == 0);
            let right_nonzero = (n..2 * n).any(|j| big.get(i, j) != 0);
            if left_zero && right_nonzero {
                rows.push((n..2 * n).map(|j| big.get(i, j)).collect::<Vec<u64>>());
            }
        }
        if rows.is_empty() {
            return Ok(Subspace::zero(f, n));
        }
        Ok(Subspace::span(&Matrix::from_rows(f, &rows)?))
    }

    /// Membership by echelon reduction against the basis.
    pub fn contains_vector(&self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let f = self.field();
        let mut w = v.to_vec();
        for i in 0..self.basis.rows() {
            let pivot_col = (0..self.ambient)
                .find(|&j| self.basis.get(i, j) != 0)
                .expect("echelon rows are nonzero");
            let c = w[pivot_col];
            if c != 0 {
                for j in 0..self.ambient {
                    w[j] = f.sub(w[j], f.mul(c, self.basis.get(i, j)));
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        (0..other.basis.rows()).all(|i| self.contains_vector(other.basis.row(i)))
    }

    /// dim(self / (self ∩ other)).
    pub fn quotient_dim(&self, other: &Subspace) -> Result<usize> {
        let inter = self.intersection(other)?;
        Ok(self.dim() - inter.dim())
    }

    /// Matrix of the canonical projection GF(p)^ambient -> complement
    /// coordinates of this subspace (the non-pivot coordinates after
    /// reducing modulo the subspace). Composing with any vector kills
    /// exactly this subspace.
    pub fn quotient_map(&self) -> Matrix {
        let f = self.field();
        let n = self.ambient;
        let pivots: Vec<usize> = (0..self.basis.rows())
            .map(|i| (0..n).find(|&j| self.basis.get(i, j) != 0).expect("nonzero row"))
            .collect();
        let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
        // row per free coordinate: e_free - sum of basis contributions
        let mut q = Matrix::zero(f, free.len(), n);
        for (r, &fc) in free.iter().enumerate() {
            q.set(r, fc, 1);
            for (bi, &pc) in pivots.iter().enumerate() {
                // reducing v by the basis subtracts v[pc] * basis_row(bi)
                q.set(r, pc, f.neg(self.basis.get(bi, fc)));
            }
        }
        q
    }
}

/// All subspaces of GF(q)^dim, q in {2, 3}, dim <= 4, enumerated
/// deterministically (by dimension, then pivot set, then free entries).
pub fn enumerate_subspaces(field: PrimeField, dim: usize) -> Result<Vec<Subspace>> {
    let q = field.modulus();
    if q != 2 && q != 3 {
        return input_err(format!("subspace enumeration supports GF(2), GF(3); got GF({q})"));
    }
    if dim > 4 {
        return input_err(format!("subspace enumeration limited to ambient dim <= 4; got {dim}"));
    }
    let mut out = Vec::new();
    for k in 0..=dim {
        for pivots in combinations(dim, k) {
            // free positions of the k x dim rref with these pivot columns
            let mut free_pos = Vec::new();
            for (r, &p) in pivots.iter().enumerate() {
                for c in (p + 1)..dim {
                    if !pivots.contains(&c) {
                        free_pos.push((r, c));
                    }
                }
            }
            let total = (q as u128).pow(free_pos.len() as u32) as u64;
            for code in 0..total {
                let mut m = Matrix::zero(field, k, dim);
                for (r, &p) in pivots.iter().enumerate() {
                    m.set(r, p, 1);
                }
                let mut c = code;
                for &(r, col) in &free_pos {
                    m.set(r, col, c % q);
                    c /= q;
                }
                out.push(Subspace {
                    ambient: dim,
                    basis: m,
                });
            }
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// A k x |labels| Vandermonde matrix with distinct nonzero nodes drawn from
/// a seeded shuffle of 1..p-1: column for label g is (1, x_g, ..., x_g^{k-1}),
/// so every k columns are linearly independent.
pub fn vandermonde_totally_independent(
    k: usize,
    labels: usize,
    field: PrimeField,
    seed: u64,
) -> Result<Matrix> {
    let p = field.modulus();
    if labels as u64 > p - 1 {
        return input_err(format!(
            "need {labels} distinct nonzero nodes but GF({p}) has only {}",
            p - 1
        ));
    }
    let mut nodes: Vec<u64> = (1..p).take(labels.max(1) * 4 + 16).collect();
    // shuffle a bounded prefix pool; enough distinct values, deterministic
    let mut rng = Rng::new(seed);
    rng.shuffle(&mut nodes);
    nodes.truncate(labels);
    let mut m = Matrix::zero(field, k, labels);
    for (j, &x) in nodes.iter().enumerate() {
        let mut acc = 1u64;
        for i in 0..k {
            m.set(i, j, acc);
            acc = field.mul(acc, x);
        }
    }
    Ok(m)
}

/// Check total independence directly: every k-subset of columns has rank k.
pub fn is_totally_independent(m: &Matrix) -> bool {
    let k = m.rows();
    if k == 0 {
        return true;
    }
    if m.cols() < k {
        return false;
    }
    combinations(m.cols(), k)
        .into_iter()
        .all(|cols| m.select_columns(&cols).rank() == k)
}
