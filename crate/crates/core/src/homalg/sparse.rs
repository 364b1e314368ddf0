//! Sparse matrices over `Q` and their elimination.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::q::{mulmod, powmod, Q};

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SVec = Vec<(usize, Q)>;

/// `a + c·b`.
pub fn axpy(a: &[(usize, Q)], c: &Q, b: &[(usize, Q)]) -> SVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + &(c * &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn svec_get(v: &[(usize, Q)], i: usize) -> Option<&Q> {
    v.binary_search_by_key(&i, |e| e.0).ok().map(|k| &v[k].1)
}

pub fn svec_from_map(m: BTreeMap<usize, Q>) -> SVec {
    m.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

pub fn svec_scale(v: &[(usize, Q)], c: &Q) -> SVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, c * x)).collect()
}

/// Matrix stored by rows. Rows index the target, columns the source, so a
/// differential acts on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<SVec>,
}

impl SparseMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> SparseMatrix {
        SparseMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(n: usize) -> SparseMatrix {
        SparseMatrix { nrows: n, ncols: n, rows: (0..n).map(|i| vec![(i, Q::one())]).collect() }
    }

    /// Build from triplets; duplicate positions are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, t: impl IntoIterator<Item = (usize, usize, Q)>) -> SparseMatrix {
        let mut rows: Vec<BTreeMap<usize, Q>> = vec![BTreeMap::new(); nrows];
        for (r, c, v) in t {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) outside {nrows}x{ncols}");
            *rows[r].entry(c).or_insert_with(Q::zero) += v;
        }
        SparseMatrix { nrows, ncols, rows: rows.into_iter().map(svec_from_map).collect() }
    }

    pub fn from_columns(nrows: usize, cols: &[SVec]) -> SparseMatrix {
        let t = cols.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v.clone())));
        SparseMatrix::from_triplets(nrows, cols.len(), t)
    }

    pub fn from_dense(d: &[Vec<Q>]) -> SparseMatrix {
        let nrows = d.len();
        let ncols = d.first().map_or(0, |r| r.len());
        SparseMatrix {
            nrows,
            ncols,
            rows: d.iter().map(|r| r.iter().cloned().enumerate().filter(|(_, v)| !v.is_zero()).collect()).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut d = vec![vec![Q::zero(); self.ncols]; self.nrows];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                d[r][*c] = v.clone();
            }
        }
        d
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        svec_get(&self.rows[r], c).cloned().unwrap_or_else(Q::zero)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, Q)> {
        self.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v.clone()))).collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows: Vec<SVec> = vec![Vec::new(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                rows[*c].push((r, v.clone()));
            }
        }
        SparseMatrix { nrows: self.ncols, ncols: self.nrows, rows }
    }

    pub fn columns(&self) -> Vec<SVec> {
        self.transpose().rows
    }

    pub fn mul_vec(&self, x: &[(usize, Q)]) -> SVec {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(r, row)| {
                let mut acc = Q::zero();
                let (mut i, mut j) = (0, 0);
                while i < row.len() && j < x.len() {
                    match row[i].0.cmp(&x[j].0) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            acc += &row[i].1 * &x[j].1;
                            i += 1;
                            j += 1;
                        }
                    }
                }
                (!acc.is_zero()).then_some((r, acc))
            })
            .collect()
    }

    /// `self · other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch in product");
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                for (k, a) in row {
                    for (c, b) in &other.rows[*k] {
                        *acc.entry(*c).or_insert_with(Q::zero) += a * b;
                    }
                }
                svec_from_map(acc)
            })
            .collect();
        SparseMatrix { nrows: self.nrows, ncols: other.ncols, rows }
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| axpy(a, &Q::one(), b)).collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn scale(&self, c: &Q) -> SparseMatrix {
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows: self.rows.iter().map(|r| svec_scale(r, c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    /// Determinant of a square matrix by dense elimination.
    pub fn determinant(&self) -> Q {
        assert_eq!(self.nrows, self.ncols, "determinant of a non-square matrix");
        let mut d = self.to_dense();
        let n = self.nrows;
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !d[r][c].is_zero()) else { return Q::zero() };
            if p != c {
                d.swap(p, c);
                det = -det;
            }
            let piv = d[c][c].clone();
            det = det * piv.clone();
            for r in c + 1..n {
                if d[r][c].is_zero() {
                    continue;
                }
                let f = d[r][c].clone() / piv.clone();
                for k in c..n {
                    let t = f.clone() * d[c][k].clone();
                    d[r][k] -= t;
                }
            }
        }
        det
    }

    /// Exact rank.
    pub fn rank(&self) -> usize {
        let rows: Vec<SVec> = self.rows.iter().filter(|r| !r.is_empty()).cloned().collect();
        markowitz_rank(rows, self.ncols, |a, b| -(&a / &b), axpy, |v: &Q| v.is_zero())
    }

    /// Rank modulo the prime `p`; `None` when an entry has a denominator divisible by `p`.
    pub fn rank_mod(&self, p: u64) -> Option<usize> {
        let mut rows = Vec::new();
        for r in &self.rows {
            let mut v = Vec::new();
            for (c, x) in r {
                let m = x.mod_p(p)?;
                if m != 0 {
                    v.push((*c, m));
                }
            }
            if !v.is_empty() {
                rows.push(v);
            }
        }
        let div = |a: u64, b: u64| (p - mulmod(a, powmod(b, p - 2, p), p)) % p;
        let ax = |a: &[(usize, u64)], c: &u64, b: &[(usize, u64)]| {
            let mut out = Vec::with_capacity(a.len() + b.len());
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                    out.push(a[i]);
                    i += 1;
                } else if i == a.len() || b[j].0 < a[i].0 {
                    out.push((b[j].0, mulmod(*c, b[j].1, p)));
                    j += 1;
                } else {
                    let v = (a[i].1 + mulmod(*c, b[j].1, p)) % p;
                    if v != 0 {
                        out.push((a[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            out
        };
        Some(markowitz_rank(rows, self.ncols, div, ax, |v: &u64| *v == 0))
    }

    /// Largest rank over the fixed primes; a lower bound for the rational rank that
    /// is almost always equal to it.
    pub fn modular_rank(&self) -> usize {
        PRIMES.iter().filter_map(|&p| self.rank_mod(p)).max().unwrap_or(0)
    }

    /// Reduced row echelon form with pivots chosen left to right.
    pub fn rref(&self) -> Rref {
        rref(self.rows.iter().filter(|r| !r.is_empty()).cloned().collect(), self.ncols)
    }

    /// Kernel basis, one vector per non-pivot column of the RREF, with a 1 in that
    /// column.
    pub fn kernel_basis(&self) -> Vec<SVec> {
        let r = self.rref();
        let pivots: BTreeSet<usize> = r.pivots.iter().copied().collect();
        (0..self.ncols)
            .filter(|c| !pivots.contains(c))
            .map(|f| {
                let mut v: BTreeMap<usize, Q> = BTreeMap::new();
                v.insert(f, Q::one());
                for (row, &p) in r.rows.iter().zip(&r.pivots) {
                    if let Some(x) = svec_get(row, f) {
                        v.insert(p, -x.clone());
                    }
                }
                svec_from_map(v)
            })
            .collect()
    }
}

/// Primes just above 2^30 used by the modular fast path.
pub const PRIMES: [u64; 3] = [1073741827, 1073741831, 1073741833];

fn markowitz_rank<T: Clone>(
    rows: Vec<Vec<(usize, T)>>,
    ncols: usize,
    neg_div: impl Fn(T, T) -> T,
    axpy: impl Fn(&[(usize, T)], &T, &[(usize, T)]) -> Vec<(usize, T)>,
    is_zero: impl Fn(&T) -> bool,
) -> usize {
    let mut rows: Vec<Option<Vec<(usize, T)>>> = rows.into_iter().map(Some).collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    let mut queue: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_ref().unwrap();
        for (c, _) in r {
            col_rows[*c].insert(i);
        }
        queue.insert((r.len(), i));
    }
    let mut rank = 0;
    while let Some((_, pr)) = queue.pop_first() {
        let prow = rows[pr].take().unwrap();
        let &(pc, ref pv) = prow.iter().min_by_key(|(c, _)| (col_rows[*c].len(), *c)).unwrap();
        let pv = pv.clone();
        for (c, _) in &prow {
            col_rows[*c].remove(&pr);
        }
        rank += 1;
        let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
        for t in targets {
            let old = rows[t].take().unwrap();
            queue.remove(&(old.len(), t));
            let x = old[old.binary_search_by_key(&pc, |e| e.0).unwrap()].1.clone();
            let factor = neg_div(x, pv.clone());
            let new = axpy(&old, &factor, &prow);
            debug_assert!(new.iter().all(|(_, v)| !is_zero(v)));
            for (c, _) in &old {
                col_rows[*c].remove(&t);
            }
            for (c, _) in &new {
                col_rows[*c].insert(t);
            }
            if !new.is_empty() {
                queue.insert((new.len(), t));
                rows[t] = Some(new);
            }
        }
    }
    rank
}

#[derive(Clone, Debug)]
pub struct Rref {
    /// Rows with leading 1 in the matching pivot column, pivots increasing.
    pub rows: Vec<SVec>,
    pub pivots: Vec<usize>,
}

fn rref(rows: Vec<SVec>, ncols: usize) -> Rref {
    // Forward pass: echelon rows keyed by pivot column, each normalized.
    let mut by_pivot: BTreeMap<usize, SVec> = BTreeMap::new();
    for mut r in rows {
        loop {
            let Some(&(c, ref v)) = r.first() else { break };
            match by_pivot.get(&c) {
                Some(p) => {
                    let f = -v.clone();
                    r = axpy(&r, &f, p);
                }
                None => {
                    let inv = v.inv();
                    by_pivot.insert(c, svec_scale(&r, &inv));
                    break;
                }
            }
        }
    }
    let _ = ncols;
    // Backward pass: clear entries above each pivot.
    let pivots: Vec<usize> = by_pivot.keys().copied().collect();
    for &p in pivots.iter().rev() {
        let prow = by_pivot[&p].clone();
        for (_, row) in by_pivot.range_mut(..p) {
            if let Some(x) = svec_get(row, p).cloned() {
                *row = axpy(row, &-x, &prow);
            }
        }
    }
    Rref { pivots, rows: by_pivot.into_values().collect() }
}

/// Incremental echelon basis that also records how each stored row is expressed
/// in terms of tagged generators. Used to solve in a quotient space.
#[derive(Clone, Debug, Default)]
pub struct Reducer {
    rows: BTreeMap<usize, (SVec, SVec)>,
}

impl Reducer {
    pub fn new() -> Reducer {
        Reducer::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduce `v` against the stored rows; returns the remainder and the tag
    /// combination that was subtracted.
    pub fn reduce(&self, v: &[(usize, Q)]) -> (SVec, SVec) {
        let mut v: SVec = v.to_vec();
        let mut tag: SVec = Vec::new();
        let mut pos = 0;
        while pos < v.len() {
            let (c, x) = v[pos].clone();
            if let Some((row, rtag)) = self.rows.get(&c) {
                let f = -x;
                v = axpy(&v, &f, row);
                tag = axpy(&tag, &-f, rtag);
            } else {
                pos += 1;
            }
        }
        (v, tag)
    }

    /// Insert `v` with tag `t`; returns false if `v` was already in the span.
    pub fn insert(&mut self, v: &[(usize, Q)], t: &[(usize, Q)]) -> bool {
        let (r, sub) = self.reduce(v);
        if r.is_empty() {
            return false;
        }
        // r = v − Σ(sub-tags): its tag is t − sub
        let tag = axpy(t, &-Q::one(), &sub);
        let inv = r[0].1.inv();
        self.rows.insert(r[0].0, (svec_scale(&r, &inv), svec_scale(&tag, &inv)));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_rank(mut d: Vec<Vec<Q>>) -> usize {
        let mut rank = 0;
        let ncols = d.first().map_or(0, |r| r.len());
        for c in 0..ncols {
            let Some(p) = (rank..d.len()).find(|&r| !d[r][c].is_zero()) else { continue };
            d.swap(rank, p);
            for r in 0..d.len() {
                if r != rank && !d[r][c].is_zero() {
                    let f = &d[r][c] / &d[rank][c];
                    for k in 0..ncols {
                        let s = &f * &d[rank][k];
                        d[r][k] = &d[r][k] - &s;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn random(rng: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> SparseMatrix {
        let mut t = Vec::new();
        for r in 0..n {
            for c in 0..m {
                if rng.gen_bool(density) {
                    t.push((r, c, Q::from_int(if rng.gen_bool(0.5) { 1 } else { -1 })));
                }
            }
        }
        SparseMatrix::from_triplets(n, m, t)
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(SparseMatrix::identity(7).rank(), 7);
        let z = SparseMatrix::zero(3, 5);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.kernel_basis().len(), 5);
    }

    #[test]
    fn random_sign_matrices_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, density) in [(100, 0.03), (100, 0.01), (40, 0.2), (30, 0.05)] {
            let m = random(&mut rng, n, n, density);
            let r = m.rank();
            assert_eq!(r, dense_rank(m.to_dense()));
            assert_eq!(r, m.modular_rank());
            assert_eq!(r, m.rref().pivots.len());
            let k = m.kernel_basis();
            assert_eq!(r + k.len(), n);
            for v in &k {
                assert!(m.mul_vec(v).is_empty());
            }
        }
    }

    #[test]
    fn reducer_tracks_tags() {
        let mut red = Reducer::new();
        let a = vec![(0, Q::one()), (1, Q::from_int(2))];
        let b = vec![(1, Q::one()), (2, Q::one())];
        assert!(red.insert(&a, &[(0, Q::one())]));
        assert!(red.insert(&b, &[(1, Q::one())]));
        // 3a − 2b
        let v = axpy(&svec_scale(&a, &Q::from_int(3)), &Q::from_int(-2), &b);
        let (rem, tag) = red.reduce(&v);
        assert!(rem.is_empty());
        assert_eq!(tag, vec![(0, Q::from_int(3)), (1, Q::from_int(-2))]);
        assert!(!red.insert(&v, &[]));
    }
}
