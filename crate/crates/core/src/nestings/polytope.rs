//! Tubings of line graphs and the comparison with nesting posets.
//!
//! The tube code below deliberately shares nothing with the nest code: tubes are
//! vertex sets of a simple graph checked by breadth-first search.
//!
//! Tube convention: two disjoint tubes are compatible when their union does not
//! induce a connected subgraph. A union equal to the whole vertex set of a
//! connected graph is connected, so such pairs are never compatible.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use super::EdgeHost;
use crate::graphs::ModularGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    pub n: usize,
    pub adj: Vec<BTreeSet<usize>>,
}

impl SimpleGraph {
    fn induced_connected(&self, set: &BTreeSet<usize>) -> bool {
        let Some(&start) = set.iter().next() else {
            return false;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if set.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == set.len()
    }
}

/// Line graph: one vertex per edge, adjacent when the edges share an endpoint.
/// Legs and genus labels play no role.
pub fn line_graph(g: &ModularGraph) -> SimpleGraph {
    let ends = g.edge_endpoints();
    let n = ends.len();
    let mut adj = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = ends[i];
            let (c, d) = ends[j];
            if a == c || a == d || b == c || b == d {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    SimpleGraph { n, adj }
}

type Tube = BTreeSet<usize>;

fn all_tubes(l: &SimpleGraph) -> Vec<Tube> {
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << l.n) - 1 {
        let t: Tube = (0..l.n).filter(|&i| mask >> i & 1 == 1).collect();
        if l.induced_connected(&t) {
            out.push(t);
        }
    }
    out
}

fn tubes_compatible(l: &SimpleGraph, a: &Tube, b: &Tube) -> bool {
    if a.is_subset(b) || b.is_subset(a) {
        return true;
    }
    if !a.is_disjoint(b) {
        return false;
    }
    let union: Tube = a.union(b).copied().collect();
    if union.len() == l.n {
        return false;
    }
    !l.induced_connected(&union)
}

/// All tubings (sets of pairwise compatible tubes), the empty tubing included.
pub fn tubings(l: &SimpleGraph) -> Vec<Vec<Tube>> {
    let tubes = all_tubes(l);
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn go(l: &SimpleGraph, tubes: &[Tube], start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<Tube>>) {
        out.push(cur.iter().map(|&i| tubes[i].clone()).collect());
        for i in start..tubes.len() {
            if cur.iter().all(|&c| tubes_compatible(l, &tubes[c], &tubes[i])) {
                cur.push(i);
                go(l, tubes, i + 1, cur, out);
                cur.pop();
            }
        }
    }
    go(l, &tubes, 0, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PolytopeReport {
    /// `f[i]` = number of faces of dimension `i`, from nestings.
    pub nesting_f_vector: Vec<usize>,
    pub tubing_f_vector: Vec<usize>,
    pub isomorphic: bool,
    pub full_nestings: usize,
    pub euler_characteristic: i64,
}

/// Poset given by its elements (as sets of atoms) ordered by inclusion.
struct Poset {
    rank: Vec<usize>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

impl Poset {
    fn from_sets(sets: &[BTreeSet<BTreeSet<usize>>]) -> Poset {
        let index: HashMap<&BTreeSet<BTreeSet<usize>>, usize> = sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let n = sets.len();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for (i, s) in sets.iter().enumerate() {
            for atom in s {
                let mut smaller = s.clone();
                smaller.remove(atom);
                if let Some(&j) = index.get(&smaller) {
                    up[j].push(i);
                    down[i].push(j);
                }
            }
        }
        Poset { rank: sets.iter().map(|s| s.len()).collect(), up, down }
    }

    /// Colour refinement on the Hasse diagram; returns the sorted final colours.
    fn invariant(&self) -> Vec<u64> {
        let mut colour: Vec<u64> = self.rank.iter().map(|&r| r as u64).collect();
        for _ in 0..self.rank.len().min(8) {
            let sigs: Vec<(u64, Vec<u64>, Vec<u64>)> = (0..colour.len())
                .map(|i| {
                    let mut u: Vec<u64> = self.up[i].iter().map(|&j| colour[j]).collect();
                    let mut d: Vec<u64> = self.down[i].iter().map(|&j| colour[j]).collect();
                    u.sort_unstable();
                    d.sort_unstable();
                    (colour[i], u, d)
                })
                .collect();
            let mut sorted = sigs.clone();
            sorted.sort();
            sorted.dedup();
            colour = sigs.iter().map(|s| sorted.binary_search(s).unwrap() as u64).collect();
        }
        let mut c = colour;
        c.sort_unstable();
        c
    }
}

/// Compare the nesting poset of `g` with the tubing poset of its line graph.
pub fn verify_polytope(g: &ModularGraph) -> PolytopeReport {
    let host = EdgeHost::of(g);
    let ne = host.nedges();
    let nestings = host.nestings();
    let l = line_graph(g);
    let tubs = tubings(&l);
    let f_vector = |sizes: &mut dyn Iterator<Item = usize>| {
        let mut f = vec![0usize; ne];
        for s in sizes {
            f[ne - 1 - s] += 1;
        }
        f
    };
    let nesting_f_vector = f_vector(&mut nestings.iter().map(|n| n.len()));
    let tubing_f_vector = f_vector(&mut tubs.iter().map(|t| t.len()));
    let nest_sets: Vec<BTreeSet<BTreeSet<usize>>> =
        nestings.iter().map(|n| n.nests.iter().map(|m| m.edges().into_iter().collect()).collect()).collect();
    let tube_sets: Vec<BTreeSet<BTreeSet<usize>>> = tubs.iter().map(|t| t.iter().cloned().collect()).collect();
    // explicit witness: a nest and a tube with the same edge ids correspond
    let mut witness = nest_sets.to_vec();
    witness.sort();
    let mut tsorted = tube_sets.clone();
    tsorted.sort();
    let same_elements = witness == tsorted;
    let same_shape = Poset::from_sets(&nest_sets).invariant() == Poset::from_sets(&tube_sets).invariant();
    let euler: i64 = nesting_f_vector.iter().enumerate().map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) }).sum();
    PolytopeReport {
        full_nestings: nesting_f_vector.first().copied().unwrap_or(0),
        isomorphic: same_elements && same_shape && nesting_f_vector == tubing_f_vector,
        nesting_f_vector,
        tubing_f_vector,
        euler_characteristic: euler,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::families;

    fn catalan(m: u64) -> u64 {
        let mut c = 1u64;
        for i in 0..m {
            c = c * 2 * (2 * i + 1) / (i + 2);
        }
        c
    }

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn permutohedra() {
        for k in 2..=4 {
            let r = verify_polytope(&families::bouquet(k));
            assert!(r.isomorphic);
            assert_eq!(r.full_nestings as u64, crate::perm::factorial(k));
            assert_eq!(r.euler_characteristic, 1);
        }
    }

    #[test]
    fn associahedra_and_cyclohedra() {
        for m in 2..=5 {
            let r = verify_polytope(&families::path(m));
            assert!(r.isomorphic);
            assert_eq!(r.full_nestings as u64, catalan(m as u64));
            assert_eq!(r.euler_characteristic, 1);
        }
        for m in 3..=5 {
            let r = verify_polytope(&families::cycle(m));
            assert!(r.isomorphic);
            assert_eq!(r.full_nestings as u64, binom(2 * m as u64 - 2, m as u64 - 1));
            assert_eq!(r.euler_characteristic, 1);
        }
    }
}
