//! Graphs with a coefficient at every vertex.
//!
//! A labelled graph is a pure tensor over the vertices: entry `v` is a basis index
//! of `A(g_v, n_v)`, where the legs of that color are the flags at `v` in
//! increasing order. For even systems the tensor also carries one odd token per
//! edge. Tokens are kept in the canonical order: edges in reference order, then
//! vertices in index order; every reordering contributes its Koszul sign.

use std::collections::BTreeMap;

use super::{compose_color, contract_color, Color, ModularOperadData, Parity};
use crate::graphs::{Contraction, ModularGraph};
use crate::homalg::{SVec, Q};
use crate::perm;

/// Linear combination of pure tensors, keyed by the per-vertex basis indices.
pub type Tensor = BTreeMap<Vec<usize>, Q>;

pub(crate) fn vertex_color(g: &ModularGraph, v: usize) -> Color {
    (g.genus_labels()[v] as usize, g.valence(v))
}

pub(crate) fn odd_label(data: &ModularOperadData, c: Color, i: usize) -> bool {
    data.degree(c, i).rem_euclid(2) == 1
}

pub(crate) fn add_term(t: &mut Tensor, key: Vec<usize>, c: Q) {
    if c.is_zero() {
        return;
    }
    match t.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Expand a product of vectors into pure tensors, scaled by `c`.
fn expand_into(out: &mut Tensor, factors: &[SVec], c: &Q) {
    let mut acc: Vec<(Vec<usize>, Q)> = vec![(Vec::with_capacity(factors.len()), c.clone())];
    for f in factors {
        let mut next = Vec::with_capacity(acc.len() * f.len());
        for (k, x) in &acc {
            for (i, y) in f {
                let mut k2 = k.clone();
                k2.push(*i);
                next.push((k2, x * y));
            }
        }
        acc = next;
    }
    for (k, x) in acc {
        add_term(out, k, x);
    }
}

fn position(list: &[usize], x: usize) -> usize {
    list.iter().position(|&y| y == x).expect("flag present")
}

/// Vertex images of a flag bijection between two graphs.
fn vertex_map(src: &ModularGraph, dst: &ModularGraph, fmap: &[usize]) -> Vec<usize> {
    let mut vmap = vec![0; src.num_vertices()];
    for (f, &v) in src.adjacency().iter().enumerate() {
        vmap[v] = dst.adjacency()[fmap[f]];
    }
    vmap
}

/// Push a pure tensor along an isomorphism `src → dst` given on flags.
pub fn transport(data: &ModularOperadData, src: &ModularGraph, dst: &ModularGraph, fmap: &[usize], t: &[usize]) -> Tensor {
    let mut out = Tensor::new();
    transport_into(&mut out, data, src, dst, fmap, t, &Q::one());
    out
}

pub(crate) fn transport_into(
    out: &mut Tensor,
    data: &ModularOperadData,
    src: &ModularGraph,
    dst: &ModularGraph,
    fmap: &[usize],
    t: &[usize],
    coeff: &Q,
) {
    let vmap = vertex_map(src, dst, fmap);
    let nv = vmap.len();
    let mut sign = 1i32;
    if data.parity == Parity::Even {
        let dst_edges = dst.edges();
        let p: Vec<usize> = src
            .edges()
            .iter()
            .map(|&(a, _)| {
                let x = fmap[a].min(dst.involution()[fmap[a]]);
                dst_edges.binary_search_by_key(&x, |e| e.0).expect("edge image")
            })
            .collect();
        sign *= perm::sign(&p);
    }
    let odd: Vec<bool> = (0..nv).map(|v| odd_label(data, vertex_color(src, v), t[v])).collect();
    sign *= perm::koszul_sign(&perm::inverse(&vmap), &odd);
    let mut factors: Vec<SVec> = vec![Vec::new(); nv];
    for v in 0..nv {
        let fs = src.flags_at(v);
        let fd = dst.flags_at(vmap[v]);
        let sigma: Vec<usize> = fs.iter().map(|&f| position(&fd, fmap[f])).collect();
        factors[vmap[v]] = data.act(vertex_color(src, v), &sigma, &[(t[v], Q::one())]);
    }
    let c = if sign < 0 { -coeff.clone() } else { coeff.clone() };
    expand_into(out, &factors, &c);
}

/// Contract edge `e` (reference index) of `g` in a pure tensor. `c` must be
/// `contract_edges(g, &[e])`; the result lives on `c.graph`. With `flip` the
/// edge's flags are used in the opposite orientation, which must not change the
/// result.
pub fn contract_edge(data: &ModularOperadData, g: &ModularGraph, e: usize, c: &Contraction, t: &[usize], flip: bool) -> Tensor {
    let mut out = Tensor::new();
    contract_edge_into(&mut out, data, g, e, c, t, flip, &Q::one());
    out
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn contract_edge_into(
    out: &mut Tensor,
    data: &ModularOperadData,
    g: &ModularGraph,
    e: usize,
    c: &Contraction,
    t: &[usize],
    flip: bool,
    coeff: &Q,
) {
    let edges = g.edges();
    let (mut h1, mut h2) = edges[e];
    if flip {
        std::mem::swap(&mut h1, &mut h2);
    }
    let adj = g.adjacency();
    let (v1, v2) = (adj[h1], adj[h2]);
    let even = data.parity == Parity::Even;
    let ne = if even { edges.len() } else { 0 };
    let nv = g.num_vertices();

    // tokens: edges (if even) then vertices
    let mut odd: Vec<bool> = vec![true; ne];
    odd.extend((0..nv).map(|v| odd_label(data, vertex_color(g, v), t[v])));
    let mut front: Vec<usize> = Vec::new();
    if even {
        front.push(e);
    }
    front.push(ne + v1);
    if v2 != v1 {
        front.push(ne + v2);
    }
    let rest_edges: Vec<usize> = if even { (0..ne).filter(|&x| x != e).collect() } else { Vec::new() };
    let rest_vertices: Vec<usize> = (0..nv).filter(|&v| v != v1 && v != v2).collect();
    let mut order = front.clone();
    order.extend(&rest_edges);
    order.extend(rest_vertices.iter().map(|v| ne + v));
    let s1 = perm::koszul_sign(&order, &odd);

    let c1 = vertex_color(g, v1);
    let f1 = g.flags_at(v1);
    let (w, cw, legs): (SVec, Color, Vec<usize>) = if v1 != v2 {
        let c2 = vertex_color(g, v2);
        let f2 = g.flags_at(v2);
        let (p1, p2) = (position(&f1, h1), position(&f2, h2));
        let n1 = f1.len();
        let alpha: Vec<usize> = (0..n1).map(|k| if k == p1 { n1 - 1 } else if k < p1 { k } else { k - 1 }).collect();
        let beta: Vec<usize> = (0..f2.len()).map(|k| if k == p2 { 0 } else if k < p2 { k + 1 } else { k }).collect();
        let x1 = data.act(c1, &alpha, &[(t[v1], Q::one())]);
        let x2 = data.act(c2, &beta, &[(t[v2], Q::one())]);
        let cw = compose_color(c1, c2);
        if data.dim(cw) == 0 {
            return;
        }
        let legs = f1.iter().filter(|&&f| f != h1).chain(f2.iter().filter(|&&f| f != h2)).copied().collect();
        (data.compose_vec(c1, c2, &x1, &x2), cw, legs)
    } else {
        let (p1, p2) = (position(&f1, h1), position(&f1, h2));
        let n = f1.len();
        let mut alpha = vec![0; n];
        let mut next = 0;
        for (k, a) in alpha.iter_mut().enumerate() {
            *a = if k == p1 {
                n - 2
            } else if k == p2 {
                n - 1
            } else {
                next += 1;
                next - 1
            };
        }
        let x = data.act(c1, &alpha, &[(t[v1], Q::one())]);
        let cw = contract_color(c1);
        if data.dim(cw) == 0 {
            return;
        }
        let legs = f1.iter().filter(|&&f| f != h1 && f != h2).copied().collect();
        (data.contract_vec(c1, &x), cw, legs)
    };
    if w.is_empty() {
        return;
    }
    let m = c.vertex_map[v1];
    let fm = c.graph.flags_at(m);
    let pi: Vec<usize> = legs.iter().map(|&f| position(&fm, c.flag_map[f].expect("surviving flag"))).collect();
    let w = data.act(cw, &pi, &w);

    // after the operation: [w, rest edges, rest vertices] → canonical order of c.graph
    let ne2 = rest_edges.len();
    let nv2 = c.graph.num_vertices();
    let mut order2 = vec![0; 1 + ne2 + rest_vertices.len()];
    order2[ne2 + m] = 0;
    for k in 0..ne2 {
        order2[k] = 1 + k;
    }
    for (k, &v) in rest_vertices.iter().enumerate() {
        order2[ne2 + c.vertex_map[v]] = 1 + ne2 + k;
    }
    debug_assert_eq!(order2.len(), ne2 + nv2);
    let mut odd2: Vec<bool> = vec![false; order2.len()];
    for k in 0..ne2 {
        odd2[1 + k] = true;
    }
    for (k, &v) in rest_vertices.iter().enumerate() {
        odd2[1 + ne2 + k] = odd[ne + v];
    }
    let mut key = vec![0; nv2];
    for &v in &rest_vertices {
        key[c.vertex_map[v]] = t[v];
    }
    for (i, x) in w {
        odd2[0] = odd_label(data, cw, i);
        let s = s1 * perm::koszul_sign(&order2, &odd2);
        key[m] = i;
        let val = if s < 0 { -(x * coeff.clone()) } else { x * coeff.clone() };
        add_term(out, key.clone(), val);
    }
}
