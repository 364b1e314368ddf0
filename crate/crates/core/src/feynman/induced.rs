//! The modular operad structure on the homology of a Feynman transform.
//!
//! Gluing two graphs along a new edge is dual to cutting an edge. Cutting commutes
//! with contraction of the remaining edges, so the cochain
//! `(φ ∘ ψ)(x) = Σ_{cuts} ± φ(x_left) ψ(x_right)` of two cocycles is a cocycle
//! whose class is the composite; likewise for `ξ` with non-separating edges. All
//! edges and both orientations of each edge are summed over.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{build_ft, FeynmanComplex, FeynmanError};
use crate::coefficients::labeled::{odd_label, transport_into, vertex_color, Tensor};
use crate::coefficients::{compose_color, contract_color, is_stable, Bounds, Color, ColorData, ModularOperadData, Parity};
use crate::graphs::{canonicalize, ModularGraph};
use crate::homalg::{homology, HomologyResult, SVec, SparseMatrix, Q};
use crate::perm;

/// Homology of one `FT(A)(g, n)` with representatives and the leg action.
pub struct GraphHomology {
    pub complex: FeynmanComplex,
    pub homology: HomologyResult,
    /// Added to transform degrees to get the degrees of the induced system: the
    /// lowest degree of the complex becomes 0, provided every such shift is even
    /// across the system. Otherwise it is 0 everywhere.
    pub shift: i64,
    /// `(transform degree, index within that degree)` of each induced basis vector.
    pub classes: Vec<(i64, usize)>,
}

pub struct InducedStructure {
    pub data: ModularOperadData,
    pub homology: BTreeMap<Color, GraphHomology>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InducedSummary {
    pub color: Color,
    pub betti: BTreeMap<i64, usize>,
}

impl InducedStructure {
    pub fn summary(&self) -> Vec<InducedSummary> {
        self.homology
            .iter()
            .map(|(&c, h)| InducedSummary {
                color: c,
                betti: h.homology.nonzero().into_iter().map(|(k, b)| (k + h.shift, b)).collect(),
            })
            .collect()
    }
}

fn graph_homology(data: &ModularOperadData, c: Color) -> Result<GraphHomology, FeynmanError> {
    let complex = build_ft(data, c.0, c.1)?;
    let actions = complex.sn_actions()?;
    let homology = homology(&complex.complex, None, &actions)?;
    let shift = -complex.complex.degrees().first().copied().unwrap_or(0);
    let classes = homology.groups.iter().flat_map(|(&k, g)| (0..g.betti).map(move |i| (k, i))).collect();
    Ok(GraphHomology { complex, homology, shift, classes })
}

struct Piece {
    graph: ModularGraph,
    labels: Vec<usize>,
    /// Original leg positions kept by this piece.
    legs: Vec<usize>,
}

/// Cut the edge `(h1, h2)` of `g` carrying the pure tensor `t`. A separating edge
/// gives the piece containing `h1` (legs in label order, then `h1`) and the piece
/// containing `h2` (`h2`, then its legs). Otherwise one piece with legs in label
/// order, then `h1`, `h2`. The sign reorders tokens to `[e, left, right]`.
fn cut(data: &ModularOperadData, g: &ModularGraph, h1: usize, h2: usize, t: &[usize]) -> (Piece, Option<Piece>, i32) {
    let inv = g.involution();
    let adj = g.adjacency();
    let nv = g.num_vertices();
    let mut side = vec![false; nv];
    let mut stack = vec![adj[h1]];
    side[adj[h1]] = true;
    while let Some(v) = stack.pop() {
        for f in g.flags_at(v) {
            if f == h1 || f == h2 || inv[f] == f {
                continue;
            }
            let w = adj[inv[f]];
            if !side[w] {
                side[w] = true;
                stack.push(w);
            }
        }
    }
    let separating = !side[adj[h2]];
    let edges = g.edges();
    let even = data.parity == Parity::Even;
    let ne = if even { edges.len() } else { 0 };
    let e = edges.iter().position(|&(a, _)| a == h1.min(h2)).expect("edge");
    let mut odd: Vec<bool> = vec![true; ne];
    odd.extend((0..nv).map(|v| odd_label(data, vertex_color(g, v), t[v])));
    let mut order: Vec<usize> = if even { vec![e] } else { Vec::new() };
    let parts: Vec<bool> = if separating { vec![true, false] } else { vec![true] };
    for &s in &parts {
        let on = |v: usize| !separating || side[v] == s;
        if even {
            order.extend((0..ne).filter(|&x| x != e && on(adj[edges[x].0])));
        }
        order.extend((0..nv).filter(|&v| on(v)).map(|v| ne + v));
    }
    let sign = perm::koszul_sign(&order, &odd);

    let legs = g.leg_flags();
    let build = |keep: &dyn Fn(usize) -> bool, front: Option<usize>, back: &[usize]| -> Piece {
        let flags: Vec<usize> = (0..g.num_flags()).filter(|&f| keep(adj[f])).collect();
        let verts: Vec<usize> = (0..nv).filter(|&v| keep(v)).collect();
        let mut fmap = vec![usize::MAX; g.num_flags()];
        for (i, &f) in flags.iter().enumerate() {
            fmap[f] = i;
        }
        let mut vmap = vec![usize::MAX; nv];
        for (i, &v) in verts.iter().enumerate() {
            vmap[v] = i;
        }
        let involution = flags.iter().map(|&f| if f == h1 || f == h2 { fmap[f] } else { fmap[inv[f]] }).collect();
        let adjacency = flags.iter().map(|&f| vmap[adj[f]]).collect();
        let genus = verts.iter().map(|&v| g.genus_labels()[v]).collect();
        let mut new_legs: Vec<usize> = front.into_iter().map(|f| fmap[f]).collect();
        new_legs.extend(legs.iter().filter(|&&f| keep(adj[f])).map(|&f| fmap[f]));
        new_legs.extend(back.iter().map(|&f| fmap[f]));
        Piece {
            graph: ModularGraph::from_parts(involution, adjacency, genus, new_legs),
            labels: verts.iter().map(|&v| t[v]).collect(),
            legs: legs.iter().enumerate().filter(|(_, &f)| keep(adj[f])).map(|(i, _)| i).collect(),
        }
    };
    if separating {
        let left = build(&|v| side[v], None, &[h1]);
        let right = build(&|v| !side[v], Some(h2), &[]);
        (left, Some(right), sign)
    } else {
        (build(&|_| true, None, &[h1, h2]), None, sign)
    }
}

/// Coordinates of a piece in the basis of `FT(A)(type of piece)` in degree `deg`.
fn piece_coords(gh: &GraphHomology, p: &Piece, deg: i64) -> SVec {
    let fc = &gh.complex;
    let (cg, fmap) = canonicalize(&p.graph);
    let Some(&bi) = fc.index.get(cg.key()) else { return Vec::new() };
    let b = &fc.blocks[bi];
    let mut t = Tensor::new();
    transport_into(&mut t, &fc.data, &p.graph, &cg, &fmap, &p.labels, &Q::one());
    let c = b.coords(&fc.data, &t);
    if c.first().is_some_and(|(r, _)| b.degree[*r] != deg) {
        return Vec::new();
    }
    let mut out: SVec = c.into_iter().map(|(r, v)| (b.pos[r], v)).collect();
    out.sort_by_key(|x| x.0);
    out
}

fn dot(a: &[(usize, Q)], b: &[(usize, Q)]) -> Q {
    let (mut i, mut j) = (0, 0);
    let mut s = Q::zero();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += &a[i].1 * &b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

/// Values `φ(x)` of the representatives of degree `deg` on a chain `x`.
fn pair(gh: &GraphHomology, deg: i64, x: &[(usize, Q)]) -> Vec<Q> {
    match gh.homology.groups.get(&deg) {
        None => Vec::new(),
        Some(g) => g.representatives.iter().map(|z| dot(z, x)).collect(),
    }
}

/// Positions in the induced basis of the classes of transform degree `deg`.
fn class_offset(gh: &GraphHomology, deg: i64) -> usize {
    gh.classes.iter().position(|&(k, _)| k == deg).unwrap_or(0)
}

fn ft_edge_degree(data: &ModularOperadData) -> i64 {
    if data.parity == Parity::Even {
        -1
    } else {
        0
    }
}

fn compose_matrix(data: &ModularOperadData, a: &GraphHomology, b: &GraphHomology, out: &GraphHomology) -> Result<SparseMatrix, FeynmanError> {
    let (na, nb) = (a.classes.len(), b.classes.len());
    let n1 = a.complex.n;
    let ta = (a.complex.g, a.complex.n);
    let tb = (b.complex.g, b.complex.n);
    let mut triplets = Vec::new();
    for (&da, ga) in &a.homology.groups {
        for (&db, gb) in &b.homology.groups {
            let dt = da + db + ft_edge_degree(data);
            let Some(gt) = out.homology.groups.get(&dt) else { continue };
            let basis = &out.complex.basis[&dt];
            // values[p][x][y]: the cochain φ_x ∘ ψ_y at target basis element p
            let values: Vec<Vec<Vec<Q>>> = basis
                .par_iter()
                .map(|el| {
                    let mut v = vec![vec![Q::zero(); gb.betti]; ga.betti];
                    let g = &*el.graph;
                    for (h1, h2) in g.edges().into_iter().flat_map(|(x, y)| [(x, y), (y, x)]) {
                        let (l, r, s) = cut(data, g, h1, h2, &el.labels);
                        let Some(r) = r else { continue };
                        if l.graph.gtype() != ta || r.graph.gtype() != tb {
                            continue;
                        }
                        if l.legs != (0..n1 - 1).collect::<Vec<_>>() {
                            continue;
                        }
                        let ca = piece_coords(a, &l, da);
                        let cb = piece_coords(b, &r, db);
                        if ca.is_empty() || cb.is_empty() {
                            continue;
                        }
                        let pa = pair(a, da, &ca);
                        let pb = pair(b, db, &cb);
                        let sq = Q::from_int(s as i64);
                        for x in 0..ga.betti {
                            if pa[x].is_zero() {
                                continue;
                            }
                            let f = &sq * &pa[x];
                            for y in 0..gb.betti {
                                v[x][y] += &f * &pb[y];
                            }
                        }
                    }
                    v
                })
                .collect();
            let (oa, ob, ot) = (class_offset(a, da), class_offset(b, db), class_offset(out, dt));
            for x in 0..ga.betti {
                for y in 0..gb.betti {
                    let z: SVec = values
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| !v[x][y].is_zero())
                        .map(|(p, v)| (p, v[x][y].clone()))
                        .collect();
                    for (i, c) in gt.coordinates(&z)?.into_iter().enumerate() {
                        if !c.is_zero() {
                            triplets.push((ot + i, (oa + x) * nb + ob + y, c));
                        }
                    }
                }
            }
        }
    }
    Ok(SparseMatrix::from_triplets(out.classes.len(), na * nb, triplets))
}

fn contract_matrix(data: &ModularOperadData, a: &GraphHomology, out: &GraphHomology) -> Result<SparseMatrix, FeynmanError> {
    let ta = (a.complex.g, a.complex.n);
    let mut triplets = Vec::new();
    for (&da, ga) in &a.homology.groups {
        let dt = da + ft_edge_degree(data);
        let Some(gt) = out.homology.groups.get(&dt) else { continue };
        let basis = &out.complex.basis[&dt];
        let values: Vec<Vec<Q>> = basis
            .par_iter()
            .map(|el| {
                let mut v = vec![Q::zero(); ga.betti];
                let g = &*el.graph;
                for (h1, h2) in g.edges().into_iter().flat_map(|(x, y)| [(x, y), (y, x)]) {
                    let (p, rest, s) = cut(data, g, h1, h2, &el.labels);
                    if rest.is_some() || p.graph.gtype() != ta {
                        continue;
                    }
                    let ca = piece_coords(a, &p, da);
                    if ca.is_empty() {
                        continue;
                    }
                    let sq = Q::from_int(s as i64);
                    for (x, val) in pair(a, da, &ca).into_iter().enumerate() {
                        v[x] += &sq * &val;
                    }
                }
                v
            })
            .collect();
        let (oa, ot) = (class_offset(a, da), class_offset(out, dt));
        for x in 0..ga.betti {
            let z: SVec =
                values.iter().enumerate().filter(|(_, v)| !v[x].is_zero()).map(|(p, v)| (p, v[x].clone())).collect();
            for (i, c) in gt.coordinates(&z)?.into_iter().enumerate() {
                if !c.is_zero() {
                    triplets.push((ot + i, oa + x, c));
                }
            }
        }
    }
    Ok(SparseMatrix::from_triplets(out.classes.len(), a.classes.len(), triplets))
}

fn color_data(gh: &GraphHomology) -> ColorData {
    let degrees = gh.classes.iter().map(|&(k, _)| k + gh.shift).collect();
    let dim = gh.classes.len();
    let generators = (0..gh.complex.n.saturating_sub(1))
        .map(|i| {
            let mut t = Vec::new();
            for (&k, mats) in &gh.homology.action {
                let off = class_offset(gh, k);
                for (r, row) in mats[i].iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        if !v.is_zero() {
                            t.push((off + r, off + c, v.clone()));
                        }
                    }
                }
            }
            SparseMatrix::from_triplets(dim, dim, t)
        })
        .collect();
    ColorData { degrees, generators }
}

/// Structure maps of the induced system have degree `ft_edge_degree + shift(out) − Σ shift(in)`;
/// this must be 0 or −1 uniformly.
fn induced_parity(
    data: &ModularOperadData,
    name: &str,
    homology: &BTreeMap<Color, GraphHomology>,
    compose: &BTreeMap<(Color, Color), SparseMatrix>,
    contract: &BTreeMap<Color, SparseMatrix>,
) -> Result<Parity, FeynmanError> {
    let e = ft_edge_degree(data);
    let s = |c: &Color| homology[c].shift;
    let degrees = compose
        .keys()
        .map(|(a, b)| (format!("∘ {a:?} {b:?}"), e + s(&compose_color(*a, *b)) - s(a) - s(b)))
        .chain(contract.keys().map(|a| (format!("ξ {a:?}"), e + s(&contract_color(*a)) - s(a))));
    let mut found = None;
    for (map, d) in degrees {
        let expected = *found.get_or_insert(d);
        if d != expected || !(d == 0 || d == -1) {
            return Err(FeynmanError::ParityMismatch { system: name.to_string(), map, expected });
        }
    }
    Ok(match found {
        Some(0) => Parity::Even,
        Some(_) => Parity::Odd,
        None => data.parity.flip(),
    })
}

/// The system `H(FT(A))` on every stable color in `bounds`, with structure maps
/// induced by gluing representatives.
pub fn induced_modular_structure(data: &ModularOperadData, bounds: Bounds) -> Result<InducedStructure, FeynmanError> {
    let colors: Vec<Color> = (0..=bounds.genus)
        .flat_map(|g| (0..=bounds.weight.saturating_sub(2 * g)).map(move |n| (g, n)))
        .filter(|&c| is_stable(c))
        .collect();
    let mut homology: BTreeMap<Color, GraphHomology> = colors
        .par_iter()
        .map(|&c| graph_homology(data, c).map(|h| (c, h)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .collect();
    // An odd regrading would change the structure signs; keep transform degrees then.
    if homology.values().any(|h| h.shift % 2 != 0) {
        for h in homology.values_mut() {
            h.shift = 0;
        }
    }
    let nonzero: Vec<Color> = colors.iter().copied().filter(|c| !homology[c].classes.is_empty()).collect();
    let mut compose = BTreeMap::new();
    for &a in &nonzero {
        for &b in &nonzero {
            let out = compose_color(a, b);
            if a.1 == 0 || b.1 == 0 || !nonzero.contains(&out) {
                continue;
            }
            compose.insert((a, b), compose_matrix(data, &homology[&a], &homology[&b], &homology[&out])?);
        }
    }
    let mut contract = BTreeMap::new();
    for &a in &nonzero {
        if a.1 < 2 {
            continue;
        }
        let out = contract_color(a);
        if nonzero.contains(&out) {
            contract.insert(a, contract_matrix(data, &homology[&a], &homology[&out])?);
        }
    }
    let name = format!("H(FT({}))", data.name);
    let parity = induced_parity(data, &name, &homology, &compose, &contract)?;
    let colors = homology.iter().map(|(&c, gh)| (c, color_data(gh))).collect();
    let data = ModularOperadData {
        name,
        parity,
        bounds,
        colors,
        compose,
        contract,
    };
    Ok(InducedStructure { data, homology })
}
