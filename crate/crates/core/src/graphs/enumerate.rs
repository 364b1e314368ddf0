//! Enumeration of isomorphism classes of modular graphs of a given type.
//!
//! Level `E + 1` is obtained from level `E` by all one-edge vertex expansions,
//! deduplicated by canonical key. Contracting any edge of a stable graph gives a
//! stable graph, so every class is reached from the corolla.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{canonicalize, CanonicalGraph, GraphError, ModularGraph};

/// All graphs obtained from `g` by expanding one vertex into an edge: either a
/// split into two stable vertices or a new loop lowering the genus label by one.
pub fn expansions(g: &ModularGraph) -> Vec<ModularGraph> {
    let mut out = Vec::new();
    for v in 0..g.num_vertices() {
        let gv = g.genus[v];
        let flags = g.flags_at(v);
        if gv >= 1 {
            let f = g.num_flags();
            let mut involution = g.involution.clone();
            involution.extend([f + 1, f]);
            let mut adjacency = g.adjacency.clone();
            adjacency.extend([v, v]);
            let mut genus = g.genus.clone();
            genus[v] -= 1;
            out.push(ModularGraph::from_parts(involution, adjacency, genus, g.legs.clone()));
        }
        let k = flags.len();
        // subsets A of flags staying at v; the rest move to the new vertex
        for mask in 0u64..(1u64 << k) {
            let a = mask.count_ones() as usize;
            let b = k - a;
            for g1 in 0..=gv {
                let g2 = gv - g1;
                if a + 1 + 2 * (g1 as usize) < 3 || b + 1 + 2 * (g2 as usize) < 3 {
                    continue;
                }
                // count each unordered split once: the flag set containing the
                // smallest flag (or, with no flags, the larger genus) stays at v
                if k > 0 && mask & 1 == 0 {
                    continue;
                }
                if k == 0 && g1 < g2 {
                    continue;
                }
                let nv = g.num_vertices();
                let f = g.num_flags();
                let mut involution = g.involution.clone();
                involution.extend([f + 1, f]);
                let mut adjacency = g.adjacency.clone();
                for (i, &fl) in flags.iter().enumerate() {
                    if mask >> i & 1 == 0 {
                        adjacency[fl] = nv;
                    }
                }
                adjacency.extend([v, nv]);
                let mut genus = g.genus.clone();
                genus[v] = g1;
                genus.push(g2);
                out.push(ModularGraph::from_parts(involution, adjacency, genus, g.legs.clone()));
            }
        }
    }
    out
}

fn check_type(g: usize, n: usize) -> Result<(), GraphError> {
    if n + 2 * g < 3 {
        return Err(GraphError::BadType { g, n });
    }
    Ok(())
}

/// Graphs of type `(g, n)` grouped by edge count; index 0 holds the corolla.
pub fn graphs_by_edges(g: usize, n: usize, max_edges: Option<usize>) -> Result<Vec<Vec<CanonicalGraph>>, GraphError> {
    check_type(g, n)?;
    let top = 3 * g + n - 3;
    let top = max_edges.map_or(top, |m| m.min(top));
    let mut levels = vec![vec![canonicalize(&ModularGraph::corolla(g, n)).0]];
    for _ in 0..top {
        let prev = levels.last().unwrap();
        let found: Vec<Vec<CanonicalGraph>> = prev
            .par_iter()
            .map(|c| expansions(c.graph()).iter().map(|x| canonicalize(x).0).collect())
            .collect();
        let mut next: BTreeMap<String, CanonicalGraph> = BTreeMap::new();
        for c in found.into_iter().flatten() {
            next.entry(c.key().to_string()).or_insert(c);
        }
        if next.is_empty() {
            break;
        }
        levels.push(next.into_values().collect());
    }
    Ok(levels)
}

/// Every graph of type `(g, n)` with at most `max_edges` edges, the corolla first,
/// then by edge count and canonical key.
pub fn enumerate_graphs(g: usize, n: usize, max_edges: Option<usize>) -> Result<Vec<CanonicalGraph>, GraphError> {
    Ok(graphs_by_edges(g, n, max_edges)?.into_iter().flatten().collect())
}
