//! Chain complexes and their homology.

use std::collections::BTreeMap;

use serde::Serialize;

use super::sparse::{Reducer, SVec, SparseMatrix};
use super::{HomalgError, Q};

/// A bounded chain complex with differential of degree −1.
///
/// `diff[k]` maps degree `k` to degree `k − 1`; a missing entry is the zero map.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ChainComplex {
    pub dims: BTreeMap<i64, usize>,
    pub diff: BTreeMap<i64, SparseMatrix>,
}

impl ChainComplex {
    pub fn dim(&self, k: i64) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    /// The differential out of degree `k`, as a `dim(k−1) × dim(k)` matrix.
    pub fn d(&self, k: i64) -> SparseMatrix {
        self.diff.get(&k).cloned().unwrap_or_else(|| SparseMatrix::zero(self.dim(k - 1), self.dim(k)))
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.dims.iter().filter(|(_, &n)| n > 0).map(|(&k, _)| k).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().map(|(&k, &n)| if k.rem_euclid(2) == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    /// Check `d∘d = 0`; returns the first degree and column where it fails.
    pub fn check_d_squared(&self) -> Result<(), HomalgError> {
        for &k in self.diff.keys() {
            if let Some(next) = self.diff.get(&(k - 1)) {
                let dd = next.mul(&self.diff[&k]);
                if let Some((r, row)) = dd.rows.iter().enumerate().find(|(_, r)| !r.is_empty()) {
                    return Err(HomalgError::NotAComplex { degree: k, row: r, col: row[0].0 });
                }
            }
        }
        Ok(())
    }

    /// Ranks of all differentials.
    pub fn ranks(&self, exact: bool) -> BTreeMap<i64, usize> {
        self.diff.iter().map(|(&k, m)| (k, if exact { m.rank() } else { m.modular_rank() })).collect()
    }

    pub fn betti_from_ranks(&self, ranks: &BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
        self.dims
            .iter()
            .map(|(&k, &n)| {
                let out = ranks.get(&k).copied().unwrap_or(0);
                let inc = ranks.get(&(k + 1)).copied().unwrap_or(0);
                (k, n - out - inc)
            })
            .collect()
    }
}

/// Homology of one degree with chosen representatives.
#[derive(Clone, Debug, Serialize)]
pub struct HomologyGroup {
    pub degree: i64,
    pub betti: usize,
    /// Closed chains whose classes form a basis.
    pub representatives: Vec<SVec>,
    #[serde(skip)]
    reducer: Reducer,
}

impl HomologyGroup {
    /// Coordinates of the class of a closed chain in the representative basis.
    pub fn coordinates(&self, z: &[(usize, Q)]) -> Result<Vec<Q>, HomalgError> {
        let (rem, tag) = self.reducer.reduce(z);
        if !rem.is_empty() {
            return Err(HomalgError::ProjectionFailure { degree: self.degree });
        }
        let mut out = vec![Q::zero(); self.betti];
        for (i, v) in tag {
            out[i] = v;
        }
        Ok(out)
    }

    /// Matrix of a chain map `f` (acting on this degree) on homology, columns
    /// indexed by representatives.
    pub fn induced(&self, f: &SparseMatrix) -> Result<Vec<Vec<Q>>, HomalgError> {
        let cols: Vec<Vec<Q>> =
            self.representatives.iter().map(|z| self.coordinates(&f.mul_vec(z))).collect::<Result<_, _>>()?;
        Ok((0..self.betti).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyResult {
    pub betti: BTreeMap<i64, usize>,
    pub groups: BTreeMap<i64, HomologyGroup>,
    /// Optional induced action matrices per degree, one per adjacent transposition.
    pub action: BTreeMap<i64, Vec<Vec<Vec<Q>>>>,
}

impl HomologyResult {
    pub fn nonzero(&self) -> BTreeMap<i64, usize> {
        self.betti.iter().filter(|(_, &b)| b > 0).map(|(&k, &b)| (k, b)).collect()
    }

    pub fn total(&self) -> usize {
        self.betti.values().sum()
    }
}

/// Betti numbers only.
pub fn betti_numbers(c: &ChainComplex) -> BTreeMap<i64, usize> {
    c.betti_from_ranks(&c.ranks(true))
}

/// Homology with representatives in the listed degrees (all nonzero degrees when
/// `degrees` is `None`). `actions[k]` are optional chain maps on degree `k` whose
/// induced matrices are recorded.
pub fn homology(
    c: &ChainComplex,
    degrees: Option<&[i64]>,
    actions: &BTreeMap<i64, Vec<SparseMatrix>>,
) -> Result<HomologyResult, HomalgError> {
    c.check_d_squared()?;
    let betti = betti_numbers(c);
    let wanted: Vec<i64> = match degrees {
        Some(d) => d.to_vec(),
        None => betti.iter().filter(|(_, &b)| b > 0).map(|(&k, _)| k).collect(),
    };
    let mut groups = BTreeMap::new();
    let mut action = BTreeMap::new();
    for k in wanted {
        let g = homology_group(c, k)?;
        debug_assert_eq!(g.betti, betti.get(&k).copied().unwrap_or(0));
        if let Some(maps) = actions.get(&k) {
            action.insert(k, maps.iter().map(|m| g.induced(m)).collect::<Result<_, _>>()?);
        }
        groups.insert(k, g);
    }
    Ok(HomologyResult { betti, groups, action })
}

/// Representatives for degree `k`: RREF kernel vectors of `d_k` kept in order
/// when independent of the image of `d_{k+1}` and of earlier choices.
pub fn homology_group(c: &ChainComplex, k: i64) -> Result<HomologyGroup, HomalgError> {
    let ker = c.d(k).kernel_basis();
    let im = c.d(k + 1).columns();
    let mut red = Reducer::new();
    for col in &im {
        red.insert(col, &[]);
    }
    let mut reps = Vec::new();
    for z in ker {
        let idx = reps.len();
        if red.insert(&z, &[(idx, Q::one())]) {
            reps.push(z);
        }
    }
    Ok(HomologyGroup { degree: k, betti: reps.len(), representatives: reps, reducer: red })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Simplicial chains of the boundary of a triangle: H = k in degrees 0 and 1.
    fn circle() -> ChainComplex {
        let mut c = ChainComplex::default();
        c.dims.insert(0, 3);
        c.dims.insert(1, 3);
        let d1 = SparseMatrix::from_dense(&[
            vec![Q::from_int(-1), Q::zero(), Q::from_int(1)],
            vec![Q::from_int(1), Q::from_int(-1), Q::zero()],
            vec![Q::zero(), Q::from_int(1), Q::from_int(-1)],
        ]);
        c.diff.insert(1, d1);
        c
    }

    #[test]
    fn circle_homology() {
        let c = circle();
        // rotation of the triangle
        let rot = SparseMatrix::from_dense(&[
            vec![Q::zero(), Q::zero(), Q::one()],
            vec![Q::one(), Q::zero(), Q::zero()],
            vec![Q::zero(), Q::one(), Q::zero()],
        ]);
        let acts = BTreeMap::from([(1, vec![rot.clone()]), (0, vec![rot])]);
        let h = homology(&c, None, &acts).unwrap();
        assert_eq!(h.nonzero(), BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(h.action[&1][0], vec![vec![Q::one()]]);
        assert_eq!(h.action[&0][0], vec![vec![Q::one()]]);
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn detects_non_complex() {
        let mut c = ChainComplex::default();
        c.dims.insert(0, 1);
        c.dims.insert(1, 1);
        c.dims.insert(2, 1);
        c.diff.insert(1, SparseMatrix::identity(1));
        c.diff.insert(2, SparseMatrix::identity(1));
        assert!(matches!(c.check_d_squared(), Err(HomalgError::NotAComplex { degree: 2, .. })));
    }
}
