//! Small exact linear algebra toolkit: signed permutation matrices, dense
//! rational matrices, a parity-aware union-find for two-term linear systems,
//! and sparse rank over prime fields.
//!
//! Generator actions on admissible modules are signed permutations, so most
//! structural checks reduce to O(n) sign bookkeeping instead of O(n^3)
//! matrix products.  The heavier engines (dense rational elimination, sparse
//! modular elimination) exist for cross-checks and for the few places where
//! genuine rank computations are needed.

use num::{BigRational, One, Signed, Zero};
use std::collections::HashMap;

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(n.into())
}

// ============================ signed permutations ============================

/// Matrix with exactly one entry +-1 in every row and column, stored
/// column-wise: column `j` equals `sign[j] * e_{target[j]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPerm {
    target: Vec<u32>,
    sign: Vec<i8>,
}

impl SignedPerm {
    pub fn identity(n: usize) -> Self {
        SignedPerm {
            target: (0..n as u32).collect(),
            sign: vec![1; n],
        }
    }

    pub fn new(target: Vec<u32>, sign: Vec<i8>) -> Self {
        assert_eq!(target.len(), sign.len());
        let n = target.len();
        let mut seen = vec![false; n];
        for (&t, &s) in target.iter().zip(&sign) {
            assert!((t as usize) < n && !seen[t as usize], "not a permutation");
            assert!(s == 1 || s == -1, "signs must be +-1");
            seen[t as usize] = true;
        }
        SignedPerm { target, sign }
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn target(&self, j: usize) -> usize {
        self.target[j] as usize
    }

    pub fn sign(&self, j: usize) -> i8 {
        self.sign[j]
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut target = vec![0u32; n];
        let mut sign = vec![1i8; n];
        for j in 0..n {
            let k = other.target[j] as usize;
            target[j] = self.target[k];
            sign[j] = other.sign[j] * self.sign[k];
        }
        SignedPerm { target, sign }
    }

    pub fn inverse(&self) -> SignedPerm {
        let n = self.dim();
        let mut target = vec![0u32; n];
        let mut sign = vec![1i8; n];
        for j in 0..n {
            let t = self.target[j] as usize;
            target[t] = j as u32;
            sign[t] = self.sign[j];
        }
        SignedPerm { target, sign }
    }

    /// For entries of absolute value one the transpose equals the inverse.
    pub fn transpose(&self) -> SignedPerm {
        self.inverse()
    }

    pub fn is_involution(&self) -> bool {
        self.compose(self).as_scalar() == Some(1)
    }

    pub fn negate(&self) -> SignedPerm {
        SignedPerm {
            target: self.target.clone(),
            sign: self.sign.iter().map(|s| -s).collect(),
        }
    }

    /// Some(+-1) when the matrix is +-identity.
    pub fn as_scalar(&self) -> Option<i8> {
        let s0 = self.sign[0];
        for j in 0..self.dim() {
            if self.target[j] as usize != j || self.sign[j] != s0 {
                return None;
            }
        }
        Some(s0)
    }

    pub fn commutes_with(&self, other: &SignedPerm) -> bool {
        self.compose(other) == other.compose(self)
    }

    pub fn anticommutes_with(&self, other: &SignedPerm) -> bool {
        self.compose(other) == other.compose(self).negate()
    }

    /// Whether `diag(eta) * self` is a symmetric matrix.
    pub fn symmetric_wrt(&self, eta: &[i8]) -> bool {
        let n = self.dim();
        for j in 0..n {
            let t = self.target[j] as usize;
            if self.target[t] as usize != j {
                return false;
            }
            if eta[t] * self.sign[j] != eta[j] * self.sign[t] {
                return false;
            }
        }
        true
    }

    /// Whether `diag(eta) * self` is antisymmetric.
    pub fn antisymmetric_wrt(&self, eta: &[i8]) -> bool {
        let n = self.dim();
        for j in 0..n {
            let t = self.target[j] as usize;
            if self.target[t] as usize != j {
                return false;
            }
            if eta[t] * self.sign[j] != -(eta[j] * self.sign[t]) {
                return false;
            }
        }
        true
    }

    /// Whether the map preserves the sign classes of `eta`: positive basis
    /// directions go to positive ones and negative to negative.
    pub fn preserves_sign_classes(&self, eta: &[i8]) -> bool {
        (0..self.dim()).all(|j| eta[self.target[j] as usize] == eta[j])
    }

    /// Whether the map swaps the sign classes of `eta`.
    pub fn reverses_sign_classes(&self, eta: &[i8]) -> bool {
        (0..self.dim()).all(|j| eta[self.target[j] as usize] == -eta[j])
    }

    /// `self^tau = eta^{-1} self^T eta`, the adjoint with respect to the
    /// bilinear form diag(eta).
    pub fn form_adjoint(&self, eta: &[i8]) -> SignedPerm {
        let tr = self.transpose();
        let mut sign = tr.sign.clone();
        for (j, s) in sign.iter_mut().enumerate() {
            let t = tr.target[j] as usize;
            *s *= eta[j] * eta[t];
        }
        SignedPerm {
            target: tr.target,
            sign,
        }
    }

    /// Direct sum with another signed permutation.
    pub fn direct_sum(&self, other: &SignedPerm) -> SignedPerm {
        let n = self.dim();
        let mut target = self.target.clone();
        let mut sign = self.sign.clone();
        target.extend(other.target.iter().map(|t| t + n as u32));
        sign.extend(other.sign.iter().copied());
        SignedPerm { target, sign }
    }

    /// Kronecker product `self (x) other`; index `i * dim(other) + j`.
    pub fn kron(&self, other: &SignedPerm) -> SignedPerm {
        let n = self.dim();
        let m = other.dim();
        let mut target = vec![0u32; n * m];
        let mut sign = vec![1i8; n * m];
        for i in 0..n {
            for j in 0..m {
                let col = i * m + j;
                target[col] = (self.target[i] as usize * m + other.target[j] as usize) as u32;
                sign[col] = self.sign[i] * other.sign[j];
            }
        }
        SignedPerm { target, sign }
    }

    /// Apply to a coordinate vector of rationals.
    pub fn apply_rat(&self, v: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        let mut out = vec![Rat::zero(); n];
        for j in 0..n {
            let t = self.target[j] as usize;
            out[t] = if self.sign[j] > 0 {
                v[j].clone()
            } else {
                -v[j].clone()
            };
        }
        out
    }

    /// Apply to an integer coordinate vector.
    pub fn apply_i64(&self, v: &[i64]) -> Vec<i64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        let mut out = vec![0i64; n];
        for j in 0..n {
            out[self.target[j] as usize] = self.sign[j] as i64 * v[j];
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let n = self.dim();
        let mut rows = vec![vec![0i64; n]; n];
        for j in 0..n {
            rows[self.target[j] as usize][j] = self.sign[j] as i64;
        }
        rows
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Option<SignedPerm> {
        let n = rows.len();
        let mut target = vec![u32::MAX; n];
        let mut sign = vec![0i8; n];
        for j in 0..n {
            let mut hit = None;
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return None;
                }
                match row[j] {
                    0 => {}
                    1 | -1 if hit.is_none() => hit = Some((i, row[j] as i8)),
                    _ => return None,
                }
            }
            let (i, s) = hit?;
            target[j] = i as u32;
            sign[j] = s;
        }
        let mut seen = vec![false; n];
        for &t in &target {
            if t == u32::MAX || seen[t as usize] {
                return None;
            }
            seen[t as usize] = true;
        }
        Some(SignedPerm { target, sign })
    }

    pub fn to_rational(&self) -> RMat {
        let n = self.dim();
        let mut m = RMat::zero(n, n);
        for j in 0..n {
            m.set(self.target[j] as usize, j, rat(self.sign[j] as i64));
        }
        m
    }
}

// ============================ dense rational ============================

/// Dense matrix over the rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RMat {
    nrows: usize,
    ncols: usize,
    data: Vec<Rat>,
}

impl RMat {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        RMat {
            nrows,
            ncols,
            data: vec![Rat::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r);
        }
        RMat { nrows, ncols, data }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn diagonal_i8(diag: &[i8]) -> Self {
        let n = diag.len();
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, rat(diag[i] as i64));
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn transpose(&self) -> RMat {
        let mut out = RMat::zero(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &RMat) -> RMat {
        assert_eq!(self.ncols, other.nrows, "shape mismatch in matrix product");
        let mut out = RMat::zero(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j).clone();
                        out.set(i, j, cur + a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RMat) -> RMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn neg(&self) -> RMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = -a.clone();
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> RMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.ncols {
                    let a = self.get(i, j);
                    if !a.is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// In-place reduction to row echelon form; returns the rank.
    pub fn rank(mut self) -> usize {
        let mut rank = 0;
        for col in 0..self.ncols {
            let pivot = (rank..self.nrows).find(|&i| !self.get(i, col).is_zero());
            let Some(p) = pivot else { continue };
            self.data.swap_rows(self.ncols, p, rank);
            let inv = self.get(rank, col).clone();
            for i in 0..self.nrows {
                if i != rank && !self.get(i, col).is_zero() {
                    let factor = self.get(i, col) / &inv;
                    for j in col..self.ncols {
                        let sub = &factor * self.get(rank, j);
                        let cur = self.get(i, j).clone();
                        self.set(i, j, cur - sub);
                    }
                }
            }
            rank += 1;
            if rank == self.nrows {
                break;
            }
        }
        rank
    }

    /// Basis of the right nullspace `{x : Ax = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut rank = 0;
        for col in 0..m.ncols {
            let pivot = (rank..m.nrows).find(|&i| !m.get(i, col).is_zero());
            let Some(p) = pivot else { continue };
            m.data.swap_rows(m.ncols, p, rank);
            let inv = m.get(rank, col).clone();
            for j in col..m.ncols {
                let v = m.get(rank, j) / &inv;
                m.set(rank, j, v);
            }
            for i in 0..m.nrows {
                if i != rank && !m.get(i, col).is_zero() {
                    let factor = m.get(i, col).clone();
                    for j in col..m.ncols {
                        let sub = &factor * m.get(rank, j);
                        let cur = m.get(i, j).clone();
                        m.set(i, j, cur - sub);
                    }
                }
            }
            pivots.push((rank, col));
            rank += 1;
            if rank == m.nrows {
                break;
            }
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let free_cols: Vec<usize> = (0..m.ncols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = Vec::with_capacity(free_cols.len());
        for &fc in &free_cols {
            let mut v = vec![Rat::zero(); m.ncols];
            v[fc] = Rat::one();
            for &(prow, pcol) in &pivots {
                v[pcol] = -m.get(prow, fc).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `Ax = b`; returns None when inconsistent.  When the system is
    /// underdetermined the free variables are set to zero.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.nrows);
        let mut m = RMat::zero(self.nrows, self.ncols + 1);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                m.set(i, j, self.get(i, j).clone());
            }
            m.set(i, self.ncols, b[i].clone());
        }
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut rank = 0;
        for col in 0..self.ncols {
            let pivot = (rank..m.nrows).find(|&i| !m.get(i, col).is_zero());
            let Some(p) = pivot else { continue };
            m.data.swap_rows(m.ncols, p, rank);
            let inv = m.get(rank, col).clone();
            for j in col..=self.ncols {
                let v = m.get(rank, j) / &inv;
                m.set(rank, j, v);
            }
            for i in 0..m.nrows {
                if i != rank && !m.get(i, col).is_zero() {
                    let factor = m.get(i, col).clone();
                    for j in col..=self.ncols {
                        let sub = &factor * m.get(rank, j);
                        let cur = m.get(i, j).clone();
                        m.set(i, j, cur - sub);
                    }
                }
            }
            pivots.push((rank, col));
            rank += 1;
            if rank == m.nrows {
                break;
            }
        }
        for i in rank..m.nrows {
            if !m.get(i, self.ncols).is_zero() {
                return None;
            }
        }
        let mut x = vec![Rat::zero(); self.ncols];
        for &(prow, pcol) in &pivots {
            x[pcol] = m.get(prow, self.ncols).clone();
        }
        Some(x)
    }

    /// Signature of a symmetric matrix as (positives, negatives, zeros),
    /// computed by symmetric Gaussian reduction (Lagrange).
    pub fn symmetric_signature(&self) -> (usize, usize, usize) {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut m = self.clone();
        let mut pos = 0;
        let mut neg = 0;
        let mut zero = 0;
        let mut rows: Vec<usize> = (0..n).collect();
        // diagonalize the quadratic form on the subspace spanned so far
        while let Some(&_first) = rows.first() {
            // find a nonzero diagonal entry among the remaining rows
            let diag = rows.iter().position(|&i| !m.get(i, i).is_zero());
            let pivot_row = if let Some(pi) = diag {
                rows[pi]
            } else {
                // all remaining diagonal entries are zero; look for an
                // off-diagonal entry and mix the two rows
                let mut found = None;
                'outer: for (ai, &i) in rows.iter().enumerate() {
                    for &j in rows.iter().skip(ai + 1) {
                        if !m.get(i, j).is_zero() {
                            found = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                let Some((i, j)) = found else {
                    zero += rows.len();
                    break;
                };
                // replace e_i by e_i + e_j: new diagonal entry 2 m_ij != 0
                for k in 0..n {
                    let v = m.get(j, k).clone();
                    let cur = m.get(i, k).clone();
                    m.set(i, k, cur + v);
                }
                for k in 0..n {
                    let v = m.get(k, j).clone();
                    let cur = m.get(k, i).clone();
                    m.set(k, i, cur + v);
                }
                i
            };
            let d = m.get(pivot_row, pivot_row).clone();
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            rows.retain(|&i| i != pivot_row);
            // clear the pivot row/column on the remaining block
            for &i in rows.clone().iter() {
                let c = m.get(i, pivot_row) / &d;
                if c.is_zero() {
                    continue;
                }
                for &j in rows.iter() {
                    let sub = &c * m.get(pivot_row, j);
                    let cur = m.get(i, j).clone();
                    m.set(i, j, cur - sub);
                }
                m.set(i, pivot_row, Rat::zero());
                m.set(pivot_row, i, Rat::zero());
            }
        }
        (pos, neg, zero)
    }
}

trait SwapRows {
    fn swap_rows(&mut self, ncols: usize, a: usize, b: usize);
}

impl SwapRows for Vec<Rat> {
    fn swap_rows(&mut self, ncols: usize, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..ncols {
            self.swap(a * ncols + j, b * ncols + j);
        }
    }
}

// ===================== parity union-find for 2-term systems =====================

/// Solves homogeneous systems whose equations each couple at most two
/// unknowns with +-1 coefficients: `x_p = +- x_q` or `x_p = 0`.  The
/// dimension of the solution space equals the number of surviving classes.
pub struct SignedUnionFind {
    parent: Vec<u32>,
    // sign of this node relative to its parent
    rel: Vec<i8>,
    killed: Vec<bool>,
}

impl SignedUnionFind {
    pub fn new(n: usize) -> Self {
        SignedUnionFind {
            parent: (0..n as u32).collect(),
            rel: vec![1; n],
            killed: vec![false; n],
        }
    }

    /// Root of x and the sign of x relative to the root.
    pub fn find(&mut self, x: usize) -> (usize, i8) {
        let mut path = Vec::new();
        let mut cur = x;
        while self.parent[cur] as usize != cur {
            path.push(cur);
            cur = self.parent[cur] as usize;
        }
        let root = cur;
        // compress the path, rewriting each sign as relative to the root
        let mut parent_sign = 1i8;
        for &node in path.iter().rev() {
            let s = self.rel[node] * parent_sign;
            self.parent[node] = root as u32;
            self.rel[node] = s;
            parent_sign = s;
        }
        let sx = if x == root { 1 } else { self.rel[x] };
        (root, sx)
    }

    /// Impose `x = sign * y`.
    pub fn relate(&mut self, x: usize, y: usize, sign: i8) {
        let (rx, sx) = self.find(x);
        let (ry, sy) = self.find(y);
        if rx == ry {
            // x = sx * rx and y = sy * rx; constraint x = sign*y becomes
            // sx = sign * sy; contradiction kills the class.
            if sx != sign * sy {
                self.killed[rx] = true;
            }
            return;
        }
        // attach ry under rx: ry = (sx * sign * sy) ... solve x = sign y:
        // sx * rx = sign * sy * ry  =>  ry = (sx * sign * sy) * rx
        self.parent[ry] = rx as u32;
        self.rel[ry] = sx * sign * sy;
        if self.killed[ry] {
            self.killed[rx] = true;
        }
    }

    /// Impose `x = 0`.
    pub fn kill(&mut self, x: usize) {
        let (r, _) = self.find(x);
        self.killed[r] = true;
    }

    /// Number of classes not forced to zero: the solution space dimension.
    pub fn live_classes(&mut self) -> usize {
        let n = self.parent.len();
        let mut count = 0;
        for x in 0..n {
            let (r, _) = self.find(x);
            if r == x && !self.killed[r] {
                count += 1;
            }
        }
        count
    }

    /// Whether the unknown is forced to zero.
    pub fn is_killed(&mut self, x: usize) -> bool {
        let (r, _) = self.find(x);
        self.killed[r]
    }
}

// ============================ sparse modular rank ============================

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Sparse row: sorted (column, coefficient mod p) pairs.
type SparseRow = Vec<(u32, u64)>;

fn normalize_row(row: &mut SparseRow, p: u64) {
    row.sort_by_key(|&(c, _)| c);
    let mut out: SparseRow = Vec::with_capacity(row.len());
    for &(c, v) in row.iter() {
        let v = v % p;
        if let Some(last) = out.last_mut() {
            if last.0 == c {
                last.1 = (last.1 + v) % p;
                continue;
            }
        }
        out.push((c, v));
    }
    out.retain(|&(_, v)| v != 0);
    *row = out;
}

/// row - val * piv, both sorted by column, piv lead coefficient already 1.
fn merge_scaled(row: &SparseRow, val: u64, piv: &SparseRow, p: u64) -> SparseRow {
    let mut merged: SparseRow = Vec::with_capacity(row.len() + piv.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < row.len() || j < piv.len() {
        if j >= piv.len() || (i < row.len() && row[i].0 < piv[j].0) {
            merged.push(row[i]);
            i += 1;
        } else if i >= row.len() || piv[j].0 < row[i].0 {
            let sub = p - mul_mod(val, piv[j].1, p);
            if sub != p {
                merged.push((piv[j].0, sub % p));
            }
            j += 1;
        } else {
            let v = (row[i].1 + p - mul_mod(val, piv[j].1, p)) % p;
            if v != 0 {
                merged.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    merged
}

/// Reduce the pivot row led by `col` until its tail mentions no other pivot
/// lead.  Substituting one pivot into another only adds a multiple of a row
/// already counted, so the rank is untouched; what it buys is compression
/// of long substitution chains, which keeps two-term systems (the shape the
/// symmetry equations produce) close to linear instead of quadratic.
fn compress_pivot(col: u32, pivots: &mut HashMap<u32, SparseRow>, p: u64) {
    // Tail columns are strictly larger than the lead, so the chase below
    // cannot cycle; an explicit stack avoids deep recursion.
    let mut stack = vec![col];
    while let Some(&c) = stack.last() {
        let next = pivots[&c]
            .iter()
            .skip(1)
            .find(|&&(t, _)| pivots.contains_key(&t))
            .map(|&(t, _)| t);
        let Some(t) = next else {
            stack.pop();
            continue;
        };
        let t_reduced = pivots[&t]
            .iter()
            .skip(1)
            .all(|&(u, _)| !pivots.contains_key(&u));
        if !t_reduced {
            stack.push(t);
            continue;
        }
        let piv = pivots[&t].clone();
        let row = &pivots[&c];
        let val = row.iter().find(|&&(u, _)| u == t).unwrap().1;
        let merged = merge_scaled(row, val, &piv, p);
        pivots.insert(c, merged);
    }
}

/// Rank of a sparse integer matrix modulo a prime.  Rows are (column, value)
/// lists; values may be any i64 and are reduced mod p.
pub fn sparse_rank_mod_p(rows: &[Vec<(u32, i64)>], p: u64) -> usize {
    let mut pivots: HashMap<u32, SparseRow> = HashMap::new();
    let mut rank = 0usize;
    for raw in rows {
        let mut row: SparseRow = raw
            .iter()
            .map(|&(c, v)| (c, (v.rem_euclid(p as i64)) as u64))
            .collect();
        normalize_row(&mut row, p);
        loop {
            let Some(&(lead, val)) = row.first() else { break };
            if !pivots.contains_key(&lead) {
                // scale so the leading coefficient is 1
                let inv = inv_mod(val, p);
                for e in row.iter_mut() {
                    e.1 = mul_mod(e.1, inv, p);
                }
                pivots.insert(lead, row);
                rank += 1;
                break;
            }
            compress_pivot(lead, &mut pivots, p);
            row = merge_scaled(&row, val, &pivots[&lead], p);
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_perm_compose_and_inverse_roundtrip() {
        let a = SignedPerm::new(vec![1, 0, 2], vec![1, -1, 1]);
        let b = SignedPerm::new(vec![2, 1, 0], vec![-1, 1, 1]);
        let ab = a.compose(&b);
        let back = ab.compose(&b.inverse());
        assert_eq!(back, a);
        assert_eq!(
            a.compose(&a.inverse()).as_scalar(),
            Some(1),
            "a a^{{-1}} = Id"
        );
    }

    #[test]
    fn signed_perm_dense_roundtrip() {
        let a = SignedPerm::new(vec![2, 0, 1, 3], vec![1, 1, -1, -1]);
        let dense = a.to_dense();
        assert_eq!(SignedPerm::from_dense(&dense), Some(a));
    }

    #[test]
    fn form_adjoint_matches_dense_computation() {
        let a = SignedPerm::new(vec![1, 0, 3, 2], vec![1, -1, 1, 1]);
        let eta = [1i8, 1, -1, -1];
        let adj = a.form_adjoint(&eta);
        // eta^{-1} A^T eta computed densely
        let e = RMat::diagonal_i8(&eta);
        let lhs = e.mul(&a.to_rational().transpose()).mul(&e);
        assert_eq!(adj.to_rational(), lhs);
    }

    #[test]
    fn rank_and_nullspace_agree_on_a_small_system() {
        // x + y = 0, y + z = 0, x - z = 0  ->  rank 2, nullity 1
        let m = RMat::from_i64_rows(&[
            vec![1, 1, 0],
            vec![0, 1, 1],
            vec![1, 0, -1],
        ]);
        assert_eq!(m.clone().rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        for v in &ns {
            let img = m.apply(v);
            assert!(img.iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn union_find_counts_solution_dimension() {
        // unknowns x0..x4: x0 = x1, x1 = -x2, x3 = 0 => classes {x0,x1,x2} live,
        // {x3} dead, {x4} live -> dimension 2.
        let mut uf = SignedUnionFind::new(5);
        uf.relate(0, 1, 1);
        uf.relate(1, 2, -1);
        uf.kill(3);
        assert_eq!(uf.live_classes(), 2);
    }

    #[test]
    fn union_find_contradiction_kills_the_class() {
        let mut uf = SignedUnionFind::new(2);
        uf.relate(0, 1, 1);
        uf.relate(0, 1, -1);
        assert_eq!(uf.live_classes(), 0, "x = y and x = -y force both to zero");
    }

    #[test]
    fn sparse_modular_rank_matches_dense_rational_rank() {
        let rows_dense = vec![
            vec![1i64, 2, 0, 1],
            vec![0, 1, 1, 0],
            vec![1, 3, 1, 1],
            vec![2, 4, 0, 2],
        ];
        let dense = RMat::from_i64_rows(&rows_dense);
        let sparse: Vec<Vec<(u32, i64)>> = rows_dense
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(c, &v)| (c as u32, v))
                    .collect()
            })
            .collect();
        let p = 1_073_741_827u64; // prime just above 2^30
        assert!(is_prime_u64(p));
        assert_eq!(sparse_rank_mod_p(&sparse, p), dense.rank());
    }

    #[test]
    fn sparse_modular_rank_handles_star_shaped_systems() {
        // Every row couples x0 to a fresh unknown, the shape that makes an
        // uncompressed elimination re-walk an ever longer substitution
        // chain.  All unknowns collapse to zero here, so the rank is full.
        let p = 1_073_741_827u64;
        let n = 20_000u32;
        let mut rows: Vec<Vec<(u32, i64)>> =
            (1..=n).map(|k| vec![(0u32, 1i64), (k, 1)]).collect();
        rows.push(vec![(0, 5)]);
        assert_eq!(sparse_rank_mod_p(&rows, p), n as usize + 1);
    }

    #[test]
    fn symmetric_signature_of_a_neutral_form() {
        let m = RMat::from_i64_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.symmetric_signature(), (1, 1, 0));
        let d = RMat::from_i64_rows(&[vec![2, 0], vec![0, -3]]);
        assert_eq!(d.symmetric_signature(), (1, 1, 0));
        let z = RMat::zero(2, 2);
        assert_eq!(z.symmetric_signature(), (0, 0, 2));
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division_on_small_numbers() {
        let naive = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..500u64 {
            assert_eq!(is_prime_u64(n), naive(n), "primality of {n}");
        }
        assert!(is_prime_u64((1 << 31) - 1), "Mersenne prime 2^31 - 1");
    }
}
