//! Nests, nestings, the `min` map and layers.
//!
//! A nest is a proper non-empty edge set whose closure (edges plus incident
//! vertices) is connected. Nests are bitsets over the host's reference edge order.

mod polytope;

pub use polytope::{line_graph, tubings, verify_polytope, PolytopeReport, SimpleGraph};

use serde::Serialize;

use crate::graphs::{contract_edges, flag_closure, GraphError, ModularGraph};

/// A nest as a bitset of reference-order edge indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Nest(pub u64);

impl Nest {
    pub fn contains_edge(self, e: usize) -> bool {
        self.0 >> e & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: Nest) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn edges(self) -> Vec<usize> {
        (0..64).filter(|&e| self.contains_edge(e)).collect()
    }

    pub fn without(self, e: usize) -> Nest {
        Nest(self.0 & !(1u64 << e))
    }
}

/// A set of pairwise compatible nests, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Nesting {
    pub nests: Vec<Nest>,
}

impl Nesting {
    pub fn new(mut nests: Vec<Nest>) -> Nesting {
        nests.sort();
        Nesting { nests }
    }

    pub fn len(&self) -> usize {
        self.nests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nests.is_empty()
    }

    pub fn contains(&self, n: Nest) -> bool {
        self.nests.binary_search(&n).is_ok()
    }
}

/// Edge-level view of a graph: endpoints per edge, enough for nest combinatorics.
/// `universe` is the set of edges present; deleting an edge keeps the ids of the
/// others, so nests of γ∖e are bitsets over the edge ids of γ.
#[derive(Clone, Debug)]
pub struct EdgeHost {
    pub ends: Vec<(usize, usize)>,
    pub universe: u64,
}

impl EdgeHost {
    pub fn of(g: &ModularGraph) -> EdgeHost {
        let ends = g.edge_endpoints();
        assert!(ends.len() <= 64, "nest bitsets hold at most 64 edges");
        let universe = if ends.len() == 64 { u64::MAX } else { (1u64 << ends.len()) - 1 };
        EdgeHost { ends, universe }
    }

    pub fn nedges(&self) -> usize {
        self.universe.count_ones() as usize
    }

    pub fn all(&self) -> u64 {
        self.universe
    }

    /// Host with edge `e` removed.
    pub fn delete(&self, e: usize) -> EdgeHost {
        EdgeHost { ends: self.ends.clone(), universe: self.universe & !(1u64 << e) }
    }

    /// Vertex bitset of the closure of an edge set.
    pub fn closure(&self, set: u64) -> u128 {
        let mut vs = 0u128;
        for (e, &(a, b)) in self.ends.iter().enumerate() {
            if set >> e & 1 == 1 && self.universe >> e & 1 == 1 {
                vs |= 1 << a;
                vs |= 1 << b;
            }
        }
        vs
    }

    /// Connected components (as edge sets) of the subgraph spanned by `set`.
    pub fn components(&self, set: u64) -> Vec<u64> {
        let mut left = set;
        let mut out = Vec::new();
        while left != 0 {
            let first = left.trailing_zeros() as usize;
            let mut comp = 1u64 << first;
            let mut verts = self.closure(comp);
            loop {
                let mut grew = false;
                for e in 0..self.ends.len() {
                    if left >> e & 1 == 1 && self.universe >> e & 1 == 1 && comp >> e & 1 == 0 {
                        let (a, b) = self.ends[e];
                        if verts >> a & 1 == 1 || verts >> b & 1 == 1 {
                            comp |= 1 << e;
                            verts |= (1 << a) | (1 << b);
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            left &= !comp;
            out.push(comp);
        }
        out
    }

    pub fn is_connected_set(&self, set: u64) -> bool {
        set != 0 && self.components(set).len() == 1
    }

    pub fn is_nest(&self, set: u64) -> bool {
        set != 0 && set & !self.all() == 0 && set != self.all() && self.is_connected_set(set)
    }

    pub fn compatible(&self, a: Nest, b: Nest) -> bool {
        a.is_subset(b) || b.is_subset(a) || self.closure(a.0) & self.closure(b.0) == 0
    }

    /// All nests, in increasing bitset order.
    pub fn nests(&self) -> Vec<Nest> {
        let all = self.all();
        let mut out = Vec::new();
        // increasing submasks of the universe
        let mut s = all.wrapping_neg() & all;
        while s != 0 && s != all {
            if self.is_connected_set(s) {
                out.push(Nest(s));
            }
            s = (s | !all).wrapping_add(1) & all;
        }
        out
    }

    pub fn is_nesting(&self, nests: &[Nest]) -> bool {
        for (i, &a) in nests.iter().enumerate() {
            if !self.is_nest(a.0) {
                return false;
            }
            for &b in &nests[i + 1..] {
                if a == b || !self.compatible(a, b) {
                    return false;
                }
            }
        }
        true
    }

    /// Every nesting (including the empty one), each sorted, listed by size then
    /// lexicographically.
    pub fn nestings(&self) -> Vec<Nesting> {
        let nests = self.nests();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn go(h: &EdgeHost, nests: &[Nest], start: usize, cur: &mut Vec<Nest>, out: &mut Vec<Nesting>) {
            out.push(Nesting { nests: cur.clone() });
            for i in start..nests.len() {
                if cur.iter().all(|&c| h.compatible(c, nests[i])) {
                    cur.push(nests[i]);
                    go(h, nests, i + 1, cur, out);
                    cur.pop();
                }
            }
        }
        go(self, &nests, 0, &mut cur, &mut out);
        out.sort_by(|a, b| (a.len(), &a.nests).cmp(&(b.len(), &b.nests)));
        out
    }

    /// Nests compatible with every member of `nesting` and not already in it.
    pub fn addable(&self, nesting: &[Nest]) -> Vec<Nest> {
        self.nests()
            .into_iter()
            .filter(|&n| !nesting.contains(&n) && nesting.iter().all(|&m| self.compatible(m, n)))
            .collect()
    }

    /// Sends each edge to the index (in `nesting`) of the smallest nest containing
    /// it, or `None` when no nest contains it.
    pub fn min_map(&self, nesting: &[Nest]) -> Vec<Option<usize>> {
        (0..self.ends.len())
            .map(|e| {
                nesting
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| n.contains_edge(e))
                    .min_by_key(|(_, n)| n.len())
                    .map(|(i, _)| i)
            })
            .collect()
    }

    pub fn is_full(&self, nesting: &[Nest]) -> bool {
        self.addable(nesting).is_empty()
    }
}

/// Enumerate all nests of a graph.
pub fn enumerate_nests(g: &ModularGraph) -> Vec<Nest> {
    EdgeHost::of(g).nests()
}

pub fn is_compatible(g: &ModularGraph, a: Nest, b: Nest) -> bool {
    EdgeHost::of(g).compatible(a, b)
}

pub fn enumerate_nestings(g: &ModularGraph) -> Vec<Nesting> {
    EdgeHost::of(g).nestings()
}

/// `min` map of a nesting: `Some(i)` is the `i`-th nest of the nesting, `None` is `∗`.
pub fn min_map(g: &ModularGraph, nesting: &Nesting) -> Vec<Option<usize>> {
    EdgeHost::of(g).min_map(&nesting.nests)
}

/// The layers of a nesting: one graph per nest (in nesting order) and a final one
/// for the whole graph. Each shows the edges inside the nest with its maximal
/// proper sub-nests collapsed to single vertices.
pub fn layers(g: &ModularGraph, nesting: &Nesting) -> Result<Vec<ModularGraph>, GraphError> {
    let host = EdgeHost::of(g);
    if !host.is_nesting(&nesting.nests) {
        return Err(GraphError::NotANest);
    }
    let maximal_inside = |outer: u64| -> Vec<Nest> {
        let inner: Vec<Nest> = nesting.nests.iter().copied().filter(|n| n.0 != outer && n.0 & !outer == 0).collect();
        inner.iter().copied().filter(|&n| !inner.iter().any(|&m| m != n && n.is_subset(m))).collect()
    };
    let mut out = Vec::new();
    for &n in &nesting.nests {
        let cl = flag_closure(g, &n.edges())?;
        // closure edge k ↔ host edge containing its first flag
        let host_edges = g.edges();
        let cl_edges: Vec<usize> = cl
            .graph
            .edges()
            .iter()
            .map(|&(a, _)| host_edges.iter().position(|&(x, y)| x == cl.flags[a] || y == cl.flags[a]).unwrap())
            .collect();
        let mut collapse = Vec::new();
        for m in maximal_inside(n.0) {
            for e in m.edges() {
                collapse.push(cl_edges.iter().position(|&x| x == e).unwrap());
            }
        }
        out.push(contract_edges(&cl.graph, &collapse).graph);
    }
    let collapse: Vec<usize> = maximal_inside(host.all()).iter().flat_map(|m| m.edges()).collect();
    out.push(contract_edges(g, &collapse).graph);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::families;

    #[test]
    fn nests_of_small_graphs() {
        assert_eq!(enumerate_nests(&families::path(2)), vec![Nest(1), Nest(2)]);
        for k in 2..=5 {
            assert_eq!(enumerate_nests(&families::bouquet(k)).len(), (1 << k) - 2);
        }
        // path a-b-c: {a},{b},{c},{ab},{bc}
        let n = enumerate_nests(&families::path(3));
        assert_eq!(n, vec![Nest(0b001), Nest(0b010), Nest(0b011), Nest(0b100), Nest(0b110)]);
    }

    #[test]
    fn nestings_of_two_edge_graph() {
        let all = enumerate_nestings(&families::path(2));
        assert_eq!(all.len(), 3);
        assert!(all[0].is_empty());
    }

    #[test]
    fn triangle_nestings_match_brute_force() {
        let g = families::cycle(3);
        let host = EdgeHost::of(&g);
        let nests = host.nests();
        let mut brute = 0;
        for mask in 0u32..(1 << nests.len()) {
            let chosen: Vec<Nest> = (0..nests.len()).filter(|&i| mask >> i & 1 == 1).map(|i| nests[i]).collect();
            if host.is_nesting(&chosen) {
                brute += 1;
            }
        }
        assert_eq!(enumerate_nestings(&g).len(), brute);
    }

    #[test]
    fn full_nestings_and_min_map() {
        for g in [families::k4(), families::theta(), families::cycle(4), families::path(4)] {
            let host = EdgeHost::of(&g);
            let ne = host.nedges();
            for n in host.nestings() {
                let m = host.min_map(&n.nests);
                // surjective onto nests ∪ {∗}
                for i in 0..n.len() {
                    assert!(m.contains(&Some(i)));
                }
                assert!(m.contains(&None));
                let full = host.is_full(&n.nests);
                assert_eq!(full, n.len() == ne - 1);
                let mut img = m.clone();
                img.sort();
                img.dedup();
                assert_eq!(full, img.len() == ne);
                let ls = layers(&g, &n).unwrap();
                assert_eq!(ls.len(), n.len() + 1);
                if full {
                    assert!(ls.iter().all(|l| l.num_edges() == 1));
                }
                let total: usize = ls.iter().map(|l| l.num_edges()).sum();
                assert_eq!(total, ne);
            }
        }
    }

    #[test]
    fn empty_nesting_layer_is_graph() {
        let g = families::k4();
        let ls = layers(&g, &Nesting::default()).unwrap();
        assert_eq!(ls, vec![g]);
    }
}
