//! Symmetric-group characters.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use super::{HomalgError, Q};
use crate::perm;

pub type Partition = Vec<usize>;

/// Partitions of `n` in decreasing lexicographic order, starting with `(n)`.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn go(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            go(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Irreducible character value χ^λ(μ) by rim-hook removal.
pub fn mn_character(lambda: &[usize], mu: &[usize]) -> i64 {
    let Some((&k, rest)) = mu.split_first() else {
        return if lambda.is_empty() { 1 } else { 0 };
    };
    // beta numbers: removing a k-rim hook = moving a bead from b to b−k
    let len = lambda.len();
    let beta: Vec<i64> = lambda.iter().enumerate().map(|(i, &l)| l as i64 + (len - 1 - i) as i64).collect();
    let mut total = 0;
    for i in 0..len {
        let nb = beta[i] - k as i64;
        if nb < 0 || beta.contains(&nb) {
            continue;
        }
        // height = number of beads strictly between nb and beta[i]
        let height = beta.iter().filter(|&&b| b > nb && b < beta[i]).count();
        let mut nbeta = beta.clone();
        nbeta[i] = nb;
        nbeta.sort_unstable_by(|a, b| b.cmp(a));
        let m = nbeta.len();
        let new: Vec<usize> =
            nbeta.iter().enumerate().map(|(j, &b)| (b - (m - 1 - j) as i64) as usize).filter(|&p| p > 0).collect();
        let s = if height % 2 == 0 { 1 } else { -1 };
        total += s * mn_character(&new, rest);
    }
    total
}

pub struct CharacterTable {
    pub n: usize,
    pub partitions: Vec<Partition>,
    /// `values[λ][μ]`, both indexed in `partitions` order (μ as cycle types).
    pub values: Vec<Vec<i64>>,
}

/// Size of the conjugacy class with cycle type `mu`.
pub fn class_size(mu: &[usize]) -> u64 {
    let n: usize = mu.iter().sum();
    let mut z: u64 = 1;
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &k in mu {
        *counts.entry(k).or_default() += 1;
    }
    for (&k, &m) in &counts {
        z *= (k as u64).pow(m as u32) * perm::factorial(m as usize);
    }
    perm::factorial(n) / z
}

/// Character table of S_n, cached for n ≤ 8.
pub fn character_table(n: usize) -> std::sync::Arc<CharacterTable> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, std::sync::Arc<CharacterTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return t.clone();
    }
    let parts = partitions(n);
    let values = parts.iter().map(|l| parts.iter().map(|m| mn_character(l, m)).collect()).collect();
    let t = std::sync::Arc::new(CharacterTable { n, partitions: parts, values });
    if n <= 8 {
        cache.lock().unwrap().insert(n, t.clone());
    }
    t
}

/// A permutation of cycle type `mu` built from consecutive cycles.
pub fn class_representative(mu: &[usize]) -> Vec<usize> {
    let n: usize = mu.iter().sum();
    let mut p = vec![0; n];
    let mut start = 0;
    for &k in mu {
        for i in 0..k {
            p[start + i] = start + (i + 1) % k;
        }
        start += k;
    }
    p
}

fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![Q::zero(); m]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

fn identity(d: usize) -> Vec<Vec<Q>> {
    (0..d).map(|i| (0..d).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

/// Matrix of `σ` from the matrices of the adjacent transpositions `s_i = (i, i+1)`.
pub fn action_matrix(gens: &[Vec<Vec<Q>>], dim: usize, sigma: &[usize]) -> Vec<Vec<Q>> {
    let mut m = identity(dim);
    for &i in &perm::reduced_word(sigma) {
        m = mat_mul(&m, &gens[i]);
    }
    m
}

/// Traces on one representative per cycle type, keyed by cycle type.
pub fn character(gens: &[Vec<Vec<Q>>], n: usize, dim: usize) -> BTreeMap<Partition, Q> {
    partitions(n)
        .into_iter()
        .map(|mu| {
            let m = action_matrix(gens, dim, &class_representative(&mu));
            let tr = (0..dim).fold(Q::zero(), |acc, i| acc + m[i][i].clone());
            (mu, tr)
        })
        .collect()
}

/// Multiplicities of irreducibles in a class function.
pub fn decompose_character(n: usize, chi: &BTreeMap<Partition, Q>) -> Result<BTreeMap<Partition, u64>, HomalgError> {
    let t = character_table(n);
    let order = Q::from_int(perm::factorial(n) as i64);
    let mut out = BTreeMap::new();
    for (li, lambda) in t.partitions.iter().enumerate() {
        let mut s = Q::zero();
        for (mi, mu) in t.partitions.iter().enumerate() {
            let v = chi.get(mu).cloned().unwrap_or_else(Q::zero);
            s += v * Q::from_int(class_size(mu) as i64 * t.values[li][mi]);
        }
        let m = s / order.clone();
        match m.to_i64() {
            Some(k) if k >= 0 => {
                if k > 0 {
                    out.insert(lambda.clone(), k as u64);
                }
            }
            _ => return Err(HomalgError::NonIntegralMultiplicity { partition: lambda.clone(), value: m.to_string() }),
        }
    }
    Ok(out)
}
