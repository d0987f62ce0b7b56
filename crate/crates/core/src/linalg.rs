//! Dense exact linear algebra over F_p.
//!
//! Everything downstream (socle machinery, Hom spaces, spins, rank checks)
//! reduces to row elimination here. Elimination uses a fixed pivot order
//! (leftmost column, first nonzero row) so all computed bases are
//! deterministic and reports are reproducible.

use crate::fp;

/// Dense row-major matrix over F_p. Entries are kept reduced mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMat {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl FpMat {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMat {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(p: u64, rows: Vec<Vec<u64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row.into_iter().map(|x| x % p));
        }
        FpMat {
            p,
            rows: r,
            cols: c,
            data,
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> FpMat {
        let mut t = FpMat::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, o: &FpMat) -> FpMat {
        assert_eq!(self.cols, o.rows);
        assert_eq!(self.p, o.p);
        let p = self.p;
        let mut out = FpMat::zeros(p, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                let orow = o.row(k);
                let out_row = out.row_mut(i);
                for j in 0..o.cols {
                    out_row[j] = fp::add(p, out_row[j], fp::mul(p, a, orow[j]));
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        let p = self.p;
        let mut out = vec![0u64; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc: u128 = 0;
            for j in 0..self.cols {
                acc += row[j] as u128 * v[j] as u128;
            }
            out[i] = (acc % p as u128) as u64;
        }
        out
    }

    pub fn scale(&self, c: u64) -> FpMat {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = fp::mul(self.p, *x, c);
        }
        out
    }

    pub fn add(&self, o: &FpMat) -> FpMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(o.data.iter()) {
            *x = fp::add(self.p, *x, *y);
        }
        out
    }

    pub fn sub(&self, o: &FpMat) -> FpMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(o.data.iter()) {
            *x = fp::sub(self.p, *x, *y);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn stack(mats: &[&FpMat]) -> FpMat {
        assert!(!mats.is_empty());
        let p = mats[0].p;
        let cols = mats[0].cols;
        let mut data = Vec::new();
        let mut rows = 0;
        for m in mats {
            assert_eq!(m.cols, cols);
            data.extend_from_slice(&m.data);
            rows += m.rows;
        }
        FpMat {
            p,
            rows,
            cols,
            data,
        }
    }

    /// Horizontal concatenation [self | o].
    pub fn hcat(&self, o: &FpMat) -> FpMat {
        assert_eq!(self.rows, o.rows);
        let mut m = FpMat::zeros(self.p, self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            m.row_mut(i)[..self.cols].copy_from_slice(self.row(i));
            m.row_mut(i)[self.cols..].copy_from_slice(o.row(i));
        }
        m
    }

    /// Row echelon reduction in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // find pivot
            let mut piv = None;
            for i in r..self.rows {
                if self[(i, c)] != 0 {
                    piv = Some(i);
                    break;
                }
            }
            let Some(piv) = piv else { continue };
            self.data.swap_rows(self.cols, r, piv);
            let inv = fp::inv(p, self[(r, c)]).expect("pivot nonzero");
            if inv != 1 {
                for x in self.row_mut(r) {
                    *x = fp::mul(p, *x, inv);
                }
            }
            for i in 0..self.rows {
                if i != r && self[(i, c)] != 0 {
                    let f = self[(i, c)];
                    // row_i -= f * row_r, split borrows via raw indexing
                    for j in 0..self.cols {
                        let v = fp::sub(p, self[(i, j)], fp::mul(p, f, self[(r, j)]));
                        self[(i, j)] = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right nullspace, one row per basis vector.
    pub fn nullspace(&self) -> FpMat {
        let p = self.p;
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = FpMat::zeros(p, free.len(), self.cols);
        for (bi, &fc) in free.iter().enumerate() {
            basis[(bi, fc)] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                basis[(bi, pc)] = fp::neg(p, m[(ri, fc)]);
            }
        }
        basis
    }

    /// Solve self * x = b; returns one solution if consistent.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.rows);
        let p = self.p;
        let mut aug = FpMat::zeros(p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            aug.row_mut(i)[..self.cols].copy_from_slice(self.row(i));
            aug[(i, self.cols)] = b[i] % p;
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![0u64; self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[(ri, self.cols)];
        }
        Some(x)
    }

    /// Inverse of a square invertible matrix.
    pub fn inverse(&self) -> Option<FpMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = self.hcat(&FpMat::identity(self.p, n));
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = FpMat::zeros(self.p, n, n);
        for i in 0..n {
            inv.row_mut(i).copy_from_slice(&aug.row(i)[n..]);
        }
        Some(inv)
    }
}

trait SwapRows {
    fn swap_rows(&mut self, cols: usize, a: usize, b: usize);
}

impl SwapRows for Vec<u64> {
    fn swap_rows(&mut self, cols: usize, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..cols {
            self.swap(a * cols + j, b * cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for FpMat {
    type Output = u64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &u64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for FpMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u64 {
        &mut self.data[i * self.cols + j]
    }
}

/// A subspace of F_p^n held as an RREF basis, supporting incremental
/// insertion and membership tests. Used for spans, spins and quotients.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub p: u64,
    pub ambient: usize,
    /// RREF rows.
    basis: Vec<Vec<u64>>,
    /// pivot column of each basis row
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(p: u64, ambient: usize) -> Self {
        Subspace {
            p,
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows(p: u64, ambient: usize, rows: impl IntoIterator<Item = Vec<u64>>) -> Self {
        let mut s = Subspace::new(p, ambient);
        for r in rows {
            s.insert(r);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_rows(&self) -> &[Vec<u64>] {
        &self.basis
    }

    /// Reduce v against the basis; returns the residual.
    pub fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        let p = self.p;
        for (row, &piv) in self.basis.iter().zip(self.pivots.iter()) {
            let c = v[piv] % p;
            if c != 0 {
                for j in piv..self.ambient {
                    v[j] = fp::sub(p, v[j] % p, fp::mul(p, c, row[j]));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v.to_vec()).iter().all(|&x| x == 0)
    }

    pub fn contains_all(&self, rows: &[Vec<u64>]) -> bool {
        rows.iter().all(|r| self.contains(r))
    }

    /// Insert v; returns true if the dimension grew.
    pub fn insert(&mut self, v: Vec<u64>) -> bool {
        let p = self.p;
        let mut r = self.reduce(v);
        let Some(piv) = r.iter().position(|&x| x % p != 0) else {
            return false;
        };
        let inv = fp::inv(p, r[piv]).expect("nonzero");
        for x in r.iter_mut() {
            *x = fp::mul(p, *x, inv);
        }
        // back-reduce existing rows
        for (row, &_rp) in self.basis.iter_mut().zip(self.pivots.iter()) {
            let c = row[piv];
            if c != 0 {
                for j in 0..self.ambient {
                    row[j] = fp::sub(p, row[j], fp::mul(p, c, r[j]));
                }
            }
        }
        // keep rows sorted by pivot for determinism
        let at = self
            .pivots
            .iter()
            .position(|&q| q > piv)
            .unwrap_or(self.pivots.len());
        self.pivots.insert(at, piv);
        self.basis.insert(at, r);
        true
    }

    /// Coordinates of v in terms of the (RREF) basis, if v lies in the span.
    pub fn coordinates(&self, v: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        let mut v = v.to_vec();
        let mut coords = vec![0u64; self.basis.len()];
        for (k, (row, &piv)) in self.basis.iter().zip(self.pivots.iter()).enumerate() {
            let c = v[piv] % p;
            coords[k] = c;
            if c != 0 {
                for j in piv..self.ambient {
                    v[j] = fp::sub(p, v[j] % p, fp::mul(p, c, row[j]));
                }
            }
        }
        if v.iter().all(|&x| x % p == 0) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn to_matrix(&self) -> FpMat {
        FpMat::from_rows(self.p, self.basis.clone().into_iter().collect())
    }

    /// Intersection with another subspace of the same ambient space.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        // rows of A span US, rows of B span VS; intersection = {xA : xA = yB}
        let a = self.to_matrix();
        let b = other.to_matrix();
        if a.rows == 0 || b.rows == 0 {
            return Subspace::new(self.p, self.ambient);
        }
        // nullspace of [A^T | -B^T]
        let at = a.transpose();
        let bt = b.transpose().scale(self.p - 1);
        let sys = at.hcat(&bt);
        let ns = sys.nullspace();
        let mut out = Subspace::new(self.p, self.ambient);
        for i in 0..ns.rows {
            let coeffs = &ns.row(i)[..a.rows];
            let mut v = vec![0u64; self.ambient];
            for (k, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    for j in 0..self.ambient {
                        v[j] = fp::add(self.p, v[j], fp::mul(self.p, c, a[(k, j)]));
                    }
                }
            }
            out.insert(v);
        }
        out
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for r in other.basis_rows() {
            s.insert(r.clone());
        }
        s
    }
}

/// Closure of a set of seed vectors under a list of linear operators.
///
/// The raw (pre-reduction) basis vectors form an independent spanning set;
/// each is either a seed or `op` applied to an earlier raw vector. Every
/// linearly dependent application is recorded with the coordinates of its
/// image on the raw basis, so an equivariant map can be propagated along the
/// forest and checked for consistency without re-solving.
pub struct Spin {
    p: u64,
    ambient: usize,
    /// RREF rows with their pivots, plus the expression of each RREF row on
    /// the raw basis.
    rref: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    expr: Vec<Vec<u64>>,
    /// raw vectors in discovery order (linearly independent)
    pub raw: Vec<Vec<u64>>,
    /// for each raw vector: None if a seed, Some((op, parent raw index))
    pub provenance: Vec<Option<(usize, usize)>>,
    /// dependent applications: (op, source raw index, raw-basis coordinates
    /// of the image)
    pub dependencies: Vec<(usize, usize, Vec<u64>)>,
}

/// Applies the closure construction. `ops` act on column vectors.
pub fn spin(p: u64, ambient: usize, seeds: &[Vec<u64>], ops: &[&FpMat]) -> Spin {
    let apply = |op: usize, v: &[u64]| ops[op].apply(v);
    spin_with(p, ambient, seeds, ops.len(), apply)
}

/// Generic spin over an arbitrary operator-application closure.
pub fn spin_with(
    p: u64,
    ambient: usize,
    seeds: &[Vec<u64>],
    n_ops: usize,
    apply: impl Fn(usize, &[u64]) -> Vec<u64>,
) -> Spin {
    let mut s = Spin {
        p,
        ambient,
        rref: Vec::new(),
        pivots: Vec::new(),
        expr: Vec::new(),
        raw: Vec::new(),
        provenance: Vec::new(),
        dependencies: Vec::new(),
    };
    for seed in seeds {
        s.try_insert(seed.clone(), None);
    }
    let mut frontier = 0;
    while frontier < s.raw.len() {
        let idx = frontier;
        frontier += 1;
        for op in 0..n_ops {
            let img = apply(op, &s.raw[idx]);
            if let Some(coords) = s.try_insert(img, Some((op, idx))) {
                s.dependencies.push((op, idx, coords));
            }
        }
    }
    s
}

impl Spin {
    /// Reduce v against the RREF rows, tracking raw-basis coordinates of the
    /// reduced-away part. Returns (residual, raw_coords).
    fn reduce_tracked(&self, mut v: Vec<u64>) -> (Vec<u64>, Vec<u64>) {
        let p = self.p;
        let mut coords = vec![0u64; self.raw.len()];
        for (k, (row, &piv)) in self.rref.iter().zip(self.pivots.iter()).enumerate() {
            let c = v[piv] % p;
            if c != 0 {
                for j in piv..self.ambient {
                    v[j] = fp::sub(p, v[j] % p, fp::mul(p, c, row[j]));
                }
                for (cj, ej) in coords.iter_mut().zip(self.expr[k].iter()) {
                    *cj = fp::add(p, *cj, fp::mul(p, c, *ej));
                }
            }
        }
        (v, coords)
    }

    /// Insert v. Returns None if independent (v becomes a raw basis vector),
    /// or Some(raw-basis coordinates) if dependent.
    fn try_insert(&mut self, v: Vec<u64>, prov: Option<(usize, usize)>) -> Option<Vec<u64>> {
        let p = self.p;
        let (mut r, coords) = self.reduce_tracked(v.clone());
        let Some(piv) = r.iter().position(|&x| x % p != 0) else {
            if prov.is_none() && v.iter().all(|&x| x % p == 0) {
                // zero seed: ignore silently
                return None;
            }
            return Some(coords);
        };
        // new raw vector
        let raw_idx = self.raw.len();
        self.raw.push(v);
        self.provenance.push(prov);
        // new rref row = (v - sum coords*raw)/lead; its raw expression
        let lead_inv = fp::inv(p, r[piv]).expect("nonzero");
        for x in r.iter_mut() {
            *x = fp::mul(p, *x, lead_inv);
        }
        let mut e = vec![0u64; raw_idx + 1];
        for (j, &c) in coords.iter().enumerate() {
            e[j] = fp::mul(p, fp::neg(p, c), lead_inv);
        }
        e[raw_idx] = lead_inv;
        // pad earlier expressions to the new raw count
        for old in self.expr.iter_mut() {
            old.resize(raw_idx + 1, 0);
        }
        // back-reduce existing rref rows against the new one
        for k in 0..self.rref.len() {
            let c = self.rref[k][piv];
            if c != 0 {
                for j in 0..self.ambient {
                    let v = fp::sub(p, self.rref[k][j], fp::mul(p, c, r[j]));
                    self.rref[k][j] = v;
                }
                for j in 0..=raw_idx {
                    let v = fp::sub(p, self.expr[k][j], fp::mul(p, c, e[j]));
                    self.expr[k][j] = v;
                }
            }
        }
        let at = self
            .pivots
            .iter()
            .position(|&q| q > piv)
            .unwrap_or(self.pivots.len());
        self.pivots.insert(at, piv);
        self.rref.insert(at, r);
        self.expr.insert(at, e);
        None
    }

    /// Coordinates of v on the raw basis, if v is in the span.
    pub fn raw_coordinates(&self, v: &[u64]) -> Option<Vec<u64>> {
        let (r, coords) = self.reduce_tracked(v.to_vec());
        if r.iter().all(|&x| x % self.p == 0) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn dim(&self) -> usize {
        self.raw.len()
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let (r, _) = self.reduce_tracked(v.to_vec());
        r.iter().all(|&x| x % self.p == 0)
    }

    pub fn subspace(&self) -> Subspace {
        Subspace::from_rows(self.p, self.ambient, self.raw.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_rank_nullspace() {
        // rows: r3 = r1 + r2 mod 5
        let m = FpMat::from_rows(5, vec![vec![1, 2, 3], vec![0, 1, 4], vec![1, 3, 2]]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.rows, 1);
        // check A x = 0
        let x = ns.row(0);
        assert!(m.apply(x).iter().all(|&v| v == 0));
    }

    #[test]
    fn solve_and_inverse() {
        let m = FpMat::from_rows(7, vec![vec![1, 2], vec![3, 4]]);
        let b = vec![5, 6];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), FpMat::identity(7, 2));
    }

    #[test]
    fn subspace_ops() {
        let mut s = Subspace::new(5, 3);
        assert!(s.insert(vec![1, 2, 3]));
        assert!(s.insert(vec![0, 1, 1]));
        assert!(!s.insert(vec![1, 3, 4])); // sum of the two
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[2, 4, 6]));
        let t = Subspace::from_rows(5, 3, vec![vec![0, 1, 1]]);
        let i = s.intersect(&t);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&[0, 1, 1]));
    }

    #[test]
    fn spin_closure() {
        // shift operator on F_5^3 spinning e1 gives everything
        let shift = FpMat::from_rows(
            5,
            vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]],
        );
        let s = spin(5, 3, &[vec![1, 0, 0]], &[&shift]);
        assert_eq!(s.dim(), 3);
        // spinning 0 gives the zero module
        let z = spin(5, 3, &[vec![0, 0, 0]], &[&shift]);
        assert_eq!(z.dim(), 0);
    }
}
