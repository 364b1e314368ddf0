//! Named graph families. Legs are added where needed to keep every vertex stable.

use super::{GraphError, ModularGraph};

/// Assemble a graph from a vertex count, edges as endpoint pairs, genus labels and
/// the number of legs to hang on each vertex. Legs are labelled in vertex order.
pub fn from_edges(nv: usize, edges: &[(usize, usize)], genus: Vec<u32>, legs_per_vertex: &[usize]) -> ModularGraph {
    let mut involution = Vec::new();
    let mut adjacency = Vec::new();
    let mut legs = Vec::new();
    for v in 0..nv {
        for _ in 0..legs_per_vertex.get(v).copied().unwrap_or(0) {
            let f = involution.len();
            involution.push(f);
            adjacency.push(v);
            legs.push(f);
        }
    }
    for &(a, b) in edges {
        let f = involution.len();
        involution.push(f + 1);
        involution.push(f);
        adjacency.push(a);
        adjacency.push(b);
    }
    ModularGraph::from_parts(involution, adjacency, genus, legs)
}

/// Path with `k` edges on `k + 1` genus-0 vertices.
pub fn path(k: usize) -> ModularGraph {
    let edges: Vec<(usize, usize)> = (0..k).map(|i| (i, i + 1)).collect();
    let legs: Vec<usize> = (0..=k).map(|v| if v == 0 || v == k { 2 } else { 1 }).collect();
    from_edges(k + 1, &edges, vec![0; k + 1], &legs)
}

/// Cycle with `k` edges; `k = 1` is a loop and `k = 2` a double edge.
pub fn cycle(k: usize) -> ModularGraph {
    let edges: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
    from_edges(k, &edges, vec![0; k], &vec![1; k])
}

/// `k` loops at one genus-0 vertex.
pub fn bouquet(k: usize) -> ModularGraph {
    let edges = vec![(0, 0); k];
    from_edges(1, &edges, vec![0], &[if k == 1 { 1 } else { 0 }])
}

pub fn k4() -> ModularGraph {
    let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    from_edges(4, &edges, vec![0; 4], &[])
}

/// Two genus-0 vertices joined by three edges.
pub fn theta() -> ModularGraph {
    from_edges(2, &[(0, 1), (0, 1), (0, 1)], vec![0, 0], &[])
}

/// Parse `path:k`, `cycle:k`, `bouquet:k`, `K4` or `theta`.
pub fn by_name(name: &str) -> Result<ModularGraph, GraphError> {
    let bad = || GraphError::Malformed(format!("unknown graph family {name:?}"));
    let g = match name {
        "K4" | "k4" => k4(),
        "theta" => theta(),
        _ => {
            let (kind, k) = name.split_once(':').ok_or_else(bad)?;
            let k: usize = k.parse().map_err(|_| bad())?;
            match kind {
                "path" if k >= 1 => path(k),
                "cycle" if k >= 1 => cycle(k),
                "bouquet" if k >= 1 => bouquet(k),
                _ => return Err(bad()),
            }
        }
    };
    g.check_stable_connected()?;
    Ok(g)
}
