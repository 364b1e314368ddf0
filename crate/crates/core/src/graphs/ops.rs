//! Gluing, contraction, flag closure and vertex substitution.

use super::{GraphError, ModularGraph};

fn check_leg(g: &ModularGraph, i: usize) -> Result<usize, GraphError> {
    if i == 0 || i > g.num_legs() {
        return Err(GraphError::BadLegIndex { index: i, legs: g.num_legs() });
    }
    Ok(g.legs[i - 1])
}

/// Glue legs `i` and `j` of `g` into a loop-or-edge. Remaining legs keep their
/// relative order.
pub fn glue_self(g: &ModularGraph, i: usize, j: usize) -> Result<ModularGraph, GraphError> {
    let (fi, fj) = (check_leg(g, i)?, check_leg(g, j)?);
    if i == j {
        return Err(GraphError::BadLegIndex { index: j, legs: g.num_legs() });
    }
    let mut involution = g.involution.clone();
    involution[fi] = fj;
    involution[fj] = fi;
    let legs = g.legs.iter().copied().filter(|&f| f != fi && f != fj).collect();
    Ok(ModularGraph::from_parts(involution, g.adjacency.clone(), g.genus.clone(), legs))
}

/// Glue leg `i` of `left` to leg `j` of `right`. Flags and vertices of `right` are
/// shifted past those of `left`. The surviving legs are ordered
/// `{1..i-1}^l < {j+1..m}^r < {1..j-1}^r < {i+1..n}^l`.
pub fn glue_pair(left: &ModularGraph, i: usize, right: &ModularGraph, j: usize) -> Result<ModularGraph, GraphError> {
    let fi = check_leg(left, i)?;
    let fj = check_leg(right, j)? + left.num_flags();
    let fo = left.num_flags();
    let vo = left.num_vertices();
    let mut involution = left.involution.clone();
    involution.extend(right.involution.iter().map(|&x| x + fo));
    let mut adjacency = left.adjacency.clone();
    adjacency.extend(right.adjacency.iter().map(|&x| x + vo));
    let mut genus = left.genus.clone();
    genus.extend_from_slice(&right.genus);
    involution[fi] = fj;
    involution[fj] = fi;
    let (n, m) = (left.num_legs(), right.num_legs());
    let mut legs = Vec::with_capacity(n + m - 2);
    legs.extend_from_slice(&left.legs[..i - 1]);
    legs.extend(right.legs[j..m].iter().map(|&f| f + fo));
    legs.extend(right.legs[..j - 1].iter().map(|&f| f + fo));
    legs.extend_from_slice(&left.legs[i..n]);
    Ok(ModularGraph::from_parts(involution, adjacency, genus, legs))
}

/// Result of contracting a set of edges.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: ModularGraph,
    /// Old flag → new flag, `None` for flags of contracted edges.
    pub flag_map: Vec<Option<usize>>,
    /// Old vertex → new vertex.
    pub vertex_map: Vec<usize>,
}

/// Contract the edges with the given reference-order indices. Each connected
/// component of contracted edges becomes one vertex carrying the total genus of
/// that component; new vertices are numbered by their smallest old vertex.
pub fn contract_edges(g: &ModularGraph, edge_ids: &[usize]) -> Contraction {
    let edges = g.edges();
    let nv = g.num_vertices();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut dead = vec![false; g.num_flags()];
    let mut internal_edges = vec![0usize; nv];
    for &e in edge_ids {
        let (a, b) = edges[e];
        dead[a] = true;
        dead[b] = true;
        let (ra, rb) = (find(&mut parent, g.adjacency[a]), find(&mut parent, g.adjacency[b]));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut vertex_map = vec![usize::MAX; nv];
    let mut reps = Vec::new();
    for v in 0..nv {
        let r = find(&mut parent, v);
        if r == v {
            vertex_map[v] = reps.len();
            reps.push(v);
        }
    }
    for v in 0..nv {
        let r = find(&mut parent, v);
        vertex_map[v] = vertex_map[r];
    }
    let mut genus = vec![0u32; reps.len()];
    let mut verts = vec![0usize; reps.len()];
    for v in 0..nv {
        genus[vertex_map[v]] += g.genus[v];
        verts[vertex_map[v]] += 1;
    }
    for &e in edge_ids {
        internal_edges[vertex_map[g.adjacency[edges[e].0]]] += 1;
    }
    for k in 0..reps.len() {
        genus[k] += (internal_edges[k] + 1 - verts[k]) as u32;
    }
    let mut flag_map = vec![None; g.num_flags()];
    let mut next = 0;
    for f in 0..g.num_flags() {
        if !dead[f] {
            flag_map[f] = Some(next);
            next += 1;
        }
    }
    let mut involution = vec![0; next];
    let mut adjacency = vec![0; next];
    for f in 0..g.num_flags() {
        if let Some(nf) = flag_map[f] {
            involution[nf] = flag_map[g.involution[f]].unwrap();
            adjacency[nf] = vertex_map[g.adjacency[f]];
        }
    }
    let legs = g.legs.iter().map(|&f| flag_map[f].unwrap()).collect();
    Contraction { graph: ModularGraph::from_parts(involution, adjacency, genus, legs), flag_map, vertex_map }
}

/// Remove one edge (by reference index). The result may be disconnected; the
/// removed flags are dropped and the rest renumbered in order.
pub fn delete_edge(g: &ModularGraph, e: usize) -> ModularGraph {
    let (a, b) = g.edges()[e];
    let keep: Vec<usize> = (0..g.num_flags()).filter(|&f| f != a && f != b).collect();
    let mut fmap = vec![usize::MAX; g.num_flags()];
    for (k, &f) in keep.iter().enumerate() {
        fmap[f] = k;
    }
    let involution = keep.iter().map(|&f| fmap[g.involution[f]]).collect();
    let adjacency = keep.iter().map(|&f| g.adjacency[f]).collect();
    let legs = g.legs.iter().map(|&f| fmap[f]).collect();
    ModularGraph::from_parts(involution, adjacency, g.genus.clone(), legs)
}

/// The flag closure `N̂` of an edge set, as a modular graph whose legs are the
/// flags adjacent to the closure but outside the edges of `N`.
#[derive(Clone, Debug)]
pub struct Closure {
    pub graph: ModularGraph,
    /// Host flag carrying each leg label, in label order (increasing host flag).
    pub leg_flags: Vec<usize>,
    /// Host vertices of the closure, in increasing order.
    pub vertices: Vec<usize>,
    /// Host flag of each closure flag.
    pub flags: Vec<usize>,
}

/// Check that `edge_ids` is a proper non-empty edge set with connected closure.
pub(crate) fn check_nest(g: &ModularGraph, edge_ids: &[usize]) -> Result<(), GraphError> {
    let ne = g.num_edges();
    let mut ids = edge_ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.is_empty() || ids.len() >= ne || ids.iter().any(|&e| e >= ne) || ids.len() != edge_ids.len() {
        return Err(GraphError::NotANest);
    }
    let ends = g.edge_endpoints();
    let mut reached = vec![false; g.num_vertices()];
    let mut used = vec![false; ids.len()];
    reached[ends[ids[0]].0] = true;
    reached[ends[ids[0]].1] = true;
    used[0] = true;
    let mut grew = true;
    while grew {
        grew = false;
        for (k, &e) in ids.iter().enumerate() {
            if !used[k] && (reached[ends[e].0] || reached[ends[e].1]) {
                used[k] = true;
                reached[ends[e].0] = true;
                reached[ends[e].1] = true;
                grew = true;
            }
        }
    }
    if used.iter().all(|&u| u) {
        Ok(())
    } else {
        Err(GraphError::NotANest)
    }
}

pub fn flag_closure(g: &ModularGraph, nest: &[usize]) -> Result<Closure, GraphError> {
    check_nest(g, nest)?;
    let edges = g.edges();
    let mut in_nest = vec![false; g.num_flags()];
    let mut vset = vec![false; g.num_vertices()];
    for &e in nest {
        let (a, b) = edges[e];
        in_nest[a] = true;
        in_nest[b] = true;
        vset[g.adjacency[a]] = true;
        vset[g.adjacency[b]] = true;
    }
    let vertices: Vec<usize> = (0..g.num_vertices()).filter(|&v| vset[v]).collect();
    let mut vmap = vec![usize::MAX; g.num_vertices()];
    for (k, &v) in vertices.iter().enumerate() {
        vmap[v] = k;
    }
    let flags: Vec<usize> = (0..g.num_flags()).filter(|&f| vset[g.adjacency[f]]).collect();
    let mut fmap = vec![usize::MAX; g.num_flags()];
    for (k, &f) in flags.iter().enumerate() {
        fmap[f] = k;
    }
    let mut involution = Vec::with_capacity(flags.len());
    let mut leg_flags = Vec::new();
    let mut legs = Vec::new();
    for &f in &flags {
        if in_nest[f] {
            involution.push(fmap[g.involution[f]]);
        } else {
            involution.push(fmap[f]);
            legs.push(fmap[f]);
            leg_flags.push(f);
        }
    }
    let adjacency = flags.iter().map(|&f| vmap[g.adjacency[f]]).collect();
    let genus = vertices.iter().map(|&v| g.genus[v]).collect();
    Ok(Closure { graph: ModularGraph::from_parts(involution, adjacency, genus, legs), leg_flags, vertices, flags })
}

/// Contract a nest to a single vertex; returns the graph and the new vertex.
pub fn contract_nest(g: &ModularGraph, nest: &[usize]) -> Result<(ModularGraph, usize), GraphError> {
    check_nest(g, nest)?;
    let c = contract_edges(g, nest);
    let v = c.vertex_map[g.adjacency[g.edges()[nest[0]].0]];
    Ok((c.graph, v))
}

/// Substitute `inner` for vertex `v`. Leg `k` of `inner` is attached where the
/// `k`-th flag of `v` (in increasing order) was.
pub fn substitute(g: &ModularGraph, v: usize, inner: &ModularGraph) -> Result<ModularGraph, GraphError> {
    let at_v = g.flags_at(v);
    if inner.total_genus() != g.genus[v] as usize || inner.num_legs() != at_v.len() {
        return Err(GraphError::TypeMismatch(format!(
            "vertex has type ({},{}) but graph has type ({},{})",
            g.genus[v],
            at_v.len(),
            inner.total_genus(),
            inner.num_legs()
        )));
    }
    let nv = g.num_vertices();
    // vertices of g except v keep order, inner vertices appended
    let vmap: Vec<usize> = (0..nv).map(|w| if w < v { w } else { w.wrapping_sub(1) }).collect();
    let voff = nv - 1;
    let mut genus: Vec<u32> = (0..nv).filter(|&w| w != v).map(|w| g.genus[w]).collect();
    genus.extend_from_slice(&inner.genus);
    let mut involution = g.involution.clone();
    let mut adjacency: Vec<usize> = g.adjacency.iter().map(|&w| if w == v { usize::MAX } else { vmap[w] }).collect();
    for (k, &host) in at_v.iter().enumerate() {
        adjacency[host] = inner.adjacency[inner.legs[k]] + voff;
    }
    // internal flags of inner get fresh numbers
    let fo = g.num_flags();
    let mut imap = vec![usize::MAX; inner.num_flags()];
    let mut next = fo;
    for f in 0..inner.num_flags() {
        if !inner.is_leg(f) {
            imap[f] = next;
            next += 1;
        }
    }
    involution.resize(next, 0);
    adjacency.resize(next, 0);
    for f in 0..inner.num_flags() {
        if !inner.is_leg(f) {
            involution[imap[f]] = imap[inner.involution[f]];
            adjacency[imap[f]] = inner.adjacency[f] + voff;
        }
    }
    Ok(ModularGraph::from_parts(involution, adjacency, genus, g.legs.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{canonicalize, families};

    #[test]
    fn glue_self_on_corolla() {
        let g = glue_self(&ModularGraph::corolla(0, 4), 1, 2).unwrap();
        assert_eq!(g.gtype(), (1, 2));
        assert_eq!(g.leg_flags(), &[2, 3]);
        assert!(glue_self(&g, 1, 1).is_err());
        assert!(glue_self(&g, 1, 5).is_err());
    }

    #[test]
    fn glue_pair_relabels() {
        let c = ModularGraph::corolla(0, 3);
        let g = glue_pair(&c, 1, &c, 1).unwrap();
        assert_eq!(g.gtype(), (0, 4));
        // right legs 2,3 (flags 4,5) then left legs 2,3 (flags 1,2)
        assert_eq!(g.leg_flags(), &[4, 5, 1, 2]);
    }

    #[test]
    fn contraction_and_round_trip() {
        let g = families::path(2);
        let (h, _) = contract_nest(&g, &[0]).unwrap();
        assert_eq!(h.num_edges(), 1);
        assert_eq!(h.gtype(), g.gtype());
        let k4 = families::k4();
        for nest in [vec![0usize], vec![0, 1], vec![0, 1, 3], vec![0, 1, 2, 3, 4]] {
            let (q, v) = contract_nest(&k4, &nest).unwrap();
            let cl = flag_closure(&k4, &nest).unwrap();
            let back = substitute(&q, v, &cl.graph).unwrap();
            assert_eq!(canonicalize(&back).0.key(), canonicalize(&k4).0.key());
            assert_eq!(back.num_edges(), q.num_edges() + cl.graph.num_edges());
        }
        assert_eq!(contract_nest(&k4, &[0, 5]).unwrap_err(), GraphError::NotANest);
    }
}
