//! Relation checks for coefficient systems and for graph gluing.
//!
//! On a system, the relations among the generating operations are checked in the
//! form used by the Feynman transform: contracting the two edges of any graph
//! with two edges in either order gives opposite results (the edges are odd
//! tokens, or the operations are odd). The four shapes of such graphs (path,
//! double edge, edge with loop, two loops) are the four relation families. The
//! remaining checks are the Coxeter relations, homogeneity, equivariance of the
//! generators, and independence of the orientation chosen on a contracted edge.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::labeled::{add_term, contract_edge_into, Tensor};
use super::{compose_color, contract_color, CoeffError, Color, ModularOperadData};
use crate::graphs::{canonicalize, contract_edges, expansions, glue_pair, glue_self, ModularGraph};
use crate::homalg::{SparseMatrix, Q};

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub family: String,
    pub checked: usize,
    pub violation: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub system: String,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.violation.is_none())
    }

    pub fn into_result(self) -> Result<RelationReport, CoeffError> {
        match self.checks.iter().find(|c| c.violation.is_some()) {
            Some(c) => Err(CoeffError::RelationViolation {
                family: c.family.clone(),
                witness: c.violation.clone().unwrap_or_default(),
            }),
            None => Ok(self),
        }
    }
}

struct Family {
    name: &'static str,
    checked: usize,
    violation: Option<String>,
}

impl Family {
    fn new(name: &'static str) -> Family {
        Family { name, checked: 0, violation: None }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.violation.is_none() {
            self.violation = Some(witness());
        }
    }

    fn done(self) -> RelationCheck {
        RelationCheck { family: self.name.into(), checked: self.checked, violation: self.violation }
    }
}

fn gen(n: usize, i: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (0..n).collect();
    s.swap(i, i + 1);
    s
}

fn coxeter(data: &ModularOperadData) -> Family {
    let mut fam = Family::new("coxeter");
    for (&c, d) in &data.colors {
        let id = SparseMatrix::identity(d.dim());
        let g = &d.generators;
        for i in 0..g.len() {
            fam.check(g[i].mul(&g[i]) == id, || format!("s_{}² at {c:?}", i + 1));
            for j in i + 1..g.len() {
                let p = g[i].mul(&g[j]);
                let ok = if j == i + 1 { p.mul(&p).mul(&p) == id } else { p.mul(&p) == id };
                fam.check(ok, || format!("(s_{} s_{}) at {c:?}", i + 1, j + 1));
            }
        }
    }
    fam
}

fn homogeneity(data: &ModularOperadData) -> Family {
    let mut fam = Family::new("degree");
    let shift = data.parity.map_degree();
    for (&c, d) in &data.colors {
        for (i, s) in d.generators.iter().enumerate() {
            let ok = s.triplets().iter().all(|(r, col, _)| d.degrees[*r] == d.degrees[*col]);
            fam.check(ok, || format!("s_{} at {c:?} mixes degrees", i + 1));
        }
    }
    for (&(a, b), m) in &data.compose {
        let db = data.dim(b);
        let out = compose_color(a, b);
        let ok = m.triplets().iter().all(|(r, col, _)| {
            data.degree(out, *r) == data.degree(a, col / db) + data.degree(b, col % db) + shift
        });
        fam.check(ok, || format!("∘ {a:?} {b:?} is not homogeneous"));
    }
    for (&a, m) in &data.contract {
        let out = contract_color(a);
        let ok = m.triplets().iter().all(|(r, col, _)| data.degree(out, *r) == data.degree(a, *col) + shift);
        fam.check(ok, || format!("ξ {a:?} is not homogeneous"));
    }
    fam
}

fn unit(i: usize) -> Vec<(usize, Q)> {
    vec![(i, Q::one())]
}

fn equivariance(data: &ModularOperadData) -> Family {
    let mut fam = Family::new("equivariance");
    for &(a, b) in data.compose.keys() {
        let out = compose_color(a, b);
        if data.dim(out) == 0 {
            continue;
        }
        let (n1, n2) = (a.1, b.1);
        for x in 0..data.dim(a) {
            for y in 0..data.dim(b) {
                let base = data.compose_vec(a, b, &unit(x), &unit(y));
                for i in 0..n1.saturating_sub(2) {
                    let lhs = data.compose_vec(a, b, &data.act(a, &gen(n1, i), &unit(x)), &unit(y));
                    let rhs = data.act(out, &gen(out.1, i), &base);
                    fam.check(lhs == rhs, || format!("∘ {a:?} {b:?}, s_{} on the left, basis ({x}, {y})", i + 1));
                }
                for i in 1..n2.saturating_sub(1) {
                    let lhs = data.compose_vec(a, b, &unit(x), &data.act(b, &gen(n2, i), &unit(y)));
                    let rhs = data.act(out, &gen(out.1, n1 + i - 2), &base);
                    fam.check(lhs == rhs, || format!("∘ {a:?} {b:?}, s_{} on the right, basis ({x}, {y})", i + 1));
                }
            }
        }
    }
    for &a in data.contract.keys() {
        let out = contract_color(a);
        if data.dim(out) == 0 {
            continue;
        }
        for x in 0..data.dim(a) {
            let base = data.contract_vec(a, &unit(x));
            for i in 0..a.1.saturating_sub(3) {
                let lhs = data.contract_vec(a, &data.act(a, &gen(a.1, i), &unit(x)));
                let rhs = data.act(out, &gen(out.1, i), &base);
                fam.check(lhs == rhs, || format!("ξ {a:?}, s_{}, basis {x}", i + 1));
            }
        }
    }
    fam
}

/// A raw graph from vertex colors and edges between `(vertex, slot)` pairs;
/// unused slots become legs in order.
fn raw_graph(colors: &[Color], edges: &[((usize, usize), (usize, usize))]) -> ModularGraph {
    let mut first = vec![0; colors.len()];
    let mut f = 0;
    for (v, c) in colors.iter().enumerate() {
        first[v] = f;
        f += c.1;
    }
    let mut involution: Vec<usize> = (0..f).collect();
    for &((v, i), (w, j)) in edges {
        let (a, b) = (first[v] + i, first[w] + j);
        involution[a] = b;
        involution[b] = a;
    }
    let mut adjacency = Vec::with_capacity(f);
    for (v, c) in colors.iter().enumerate() {
        adjacency.extend(std::iter::repeat_n(v, c.1));
    }
    let legs = (0..f).filter(|&x| involution[x] == x).collect();
    ModularGraph::from_parts(involution, adjacency, colors.iter().map(|c| c.0 as u32).collect(), legs)
}

fn shuffled(g: &ModularGraph, rng: &mut ChaCha8Rng) -> ModularGraph {
    let mut fmap: Vec<usize> = (0..g.num_flags()).collect();
    fmap.shuffle(rng);
    let mut vmap: Vec<usize> = (0..g.num_vertices()).collect();
    vmap.shuffle(rng);
    g.renumber(&fmap, &vmap)
}

fn all_tensors(data: &ModularOperadData, g: &ModularGraph) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for v in 0..g.num_vertices() {
        let d = data.dim((g.genus_labels()[v] as usize, g.valence(v)));
        out = out.into_iter().flat_map(|k| (0..d).map(move |i| [k.clone(), vec![i]].concat())).collect();
    }
    out
}

fn contract_tensor(data: &ModularOperadData, g: &ModularGraph, e: usize, x: &Tensor, flip: bool) -> (ModularGraph, Tensor) {
    let c = contract_edges(g, &[e]);
    let mut out = Tensor::new();
    for (k, q) in x {
        contract_edge_into(&mut out, data, g, e, &c, k, flip, q);
    }
    (c.graph, out)
}

fn in_bounds(data: &ModularOperadData, cs: &[Color]) -> bool {
    cs.iter().all(|&c| data.bounds.contains(c))
}

/// Orientation independence on the two one-edge shapes.
fn exchange(data: &ModularOperadData, rng: &mut ChaCha8Rng, trials: usize) -> Family {
    let mut fam = Family::new("exchange");
    let support = data.support();
    let mut graphs: Vec<ModularGraph> = Vec::new();
    for &a in &support {
        for &b in &support {
            if a.1 >= 1 && b.1 >= 1 && in_bounds(data, &[compose_color(a, b)]) {
                graphs.push(raw_graph(&[a, b], &[((0, 0), (1, 0))]));
            }
        }
        if a.1 >= 2 && in_bounds(data, &[contract_color(a)]) {
            graphs.push(raw_graph(&[a], &[((0, 0), (0, 1))]));
        }
    }
    for g0 in graphs {
        for k in 0..=trials {
            let g = if k == 0 { g0.clone() } else { shuffled(&g0, rng) };
            for t in all_tensors(data, &g) {
                let x = Tensor::from([(t.clone(), Q::one())]);
                let (_, a) = contract_tensor(data, &g, 0, &x, false);
                let (_, b) = contract_tensor(data, &g, 0, &x, true);
                fam.check(a == b, || format!("graph {} tensor {t:?}", g.to_json()));
            }
        }
    }
    fam
}

/// `T_f T_e + T_e T_f = 0` on a two-edge graph, for every pure tensor.
fn anticommute(data: &ModularOperadData, g: &ModularGraph, fam: &mut Family) {
    for t in all_tensors(data, g) {
        let x = Tensor::from([(t.clone(), Q::one())]);
        let (ge, ye) = contract_tensor(data, g, 0, &x, false);
        let (_, a) = contract_tensor(data, &ge, 0, &ye, false);
        let (gf, yf) = contract_tensor(data, g, 1, &x, false);
        let (_, b) = contract_tensor(data, &gf, 0, &yf, false);
        let mut sum = a;
        for (k, q) in b {
            add_term(&mut sum, k, q);
        }
        fam.check(sum.is_empty(), || format!("graph {} tensor {t:?}", g.to_json()));
    }
}

fn two_edge_families(data: &ModularOperadData, rng: &mut ChaCha8Rng, trials: usize) -> Vec<Family> {
    let support = data.support();
    let mut path = Family::new("rel2: ∘∘ (path)");
    let mut double = Family::new("rel1: ξ∘ (double edge)");
    let mut edge_loop = Family::new("rel2: ∘ξ (edge and loop)");
    let mut loops = Family::new("rel1: ξξ (two loops)");
    let run = |g0: ModularGraph, fam: &mut Family, rng: &mut ChaCha8Rng| {
        for k in 0..=trials {
            let g = if k == 0 { g0.clone() } else { shuffled(&g0, rng) };
            anticommute(data, &g, fam);
        }
    };
    for &a in &support {
        for &b in &support {
            // path a − b − c
            if a.1 >= 1 && b.1 >= 2 {
                for &c in &support {
                    let ab = compose_color(a, b);
                    let bc = compose_color(b, c);
                    if c.1 >= 1 && in_bounds(data, &[ab, bc, compose_color(ab, c)]) {
                        run(raw_graph(&[a, b, c], &[((0, 0), (1, 0)), ((1, 1), (2, 0))]), &mut path, rng);
                    }
                }
            }
            // double edge
            if a.1 >= 2 && b.1 >= 2 {
                let ab = compose_color(a, b);
                if in_bounds(data, &[ab, contract_color(ab)]) {
                    run(raw_graph(&[a, b], &[((0, 0), (1, 0)), ((0, 1), (1, 1))]), &mut double, rng);
                }
            }
            // loop at a, edge to b
            if a.1 >= 3 && b.1 >= 1 {
                let ab = compose_color(a, b);
                if in_bounds(data, &[ab, contract_color(a), contract_color(ab)]) {
                    run(raw_graph(&[a, b], &[((0, 0), (1, 0)), ((0, 1), (0, 2))]), &mut edge_loop, rng);
                }
            }
        }
        if a.1 >= 4 {
            let x = contract_color(a);
            if in_bounds(data, &[x, contract_color(x)]) {
                run(raw_graph(&[a], &[((0, 0), (0, 1)), ((0, 2), (0, 3))]), &mut loops, rng);
            }
        }
    }
    vec![path, double, edge_loop, loops]
}

/// Check every relation family on the full support of `data`. `trials` extra
/// random flag numberings are tried for each graph shape.
pub fn verify_relations(data: &ModularOperadData, seed: u64, trials: usize) -> RelationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fams = vec![coxeter(data), homogeneity(data), equivariance(data), exchange(data, &mut rng, trials)];
    fams.extend(two_edge_families(data, &mut rng, trials));
    RelationReport { system: data.name.clone(), checks: fams.into_iter().map(Family::done).collect() }
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphRelationReport {
    pub checked: usize,
    /// Instances per family: ∘∘, ξ∘, ∘ξ, ξξ.
    pub per_family: [usize; 4],
    pub failures: Vec<String>,
}

impl GraphRelationReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A graph whose current leg `k` carries the identity `ids[k−1]`.
#[derive(Clone)]
struct Piece {
    graph: ModularGraph,
    ids: Vec<usize>,
}

/// Perform the gluings one at a time. Each gluing joins the legs with the two
/// identities, using the current labels; legs of one piece are joined by `ξ`,
/// legs of two pieces by `∘` with the first identity on the left.
fn assemble(pieces: &[Piece], gluings: &[(usize, usize)]) -> Result<Piece, String> {
    let mut ps: Vec<Piece> = pieces.to_vec();
    for &(x, y) in gluings {
        let find = |ps: &[Piece], id: usize| {
            ps.iter().enumerate().find_map(|(p, pc)| pc.ids.iter().position(|&z| z == id).map(|k| (p, k + 1)))
        };
        let (pa, i) = find(&ps, x).ok_or("missing leg")?;
        let (pb, j) = find(&ps, y).ok_or("missing leg")?;
        if pa == pb {
            let pc = &ps[pa];
            let graph = glue_self(&pc.graph, i, j).map_err(|e| e.to_string())?;
            let ids = pc.ids.iter().copied().filter(|&z| z != x && z != y).collect();
            ps[pa] = Piece { graph, ids };
        } else {
            let (l, r) = (&ps[pa], &ps[pb]);
            let graph = glue_pair(&l.graph, i, &r.graph, j).map_err(|e| e.to_string())?;
            let mut ids = l.ids[..i - 1].to_vec();
            ids.extend(&r.ids[j..]);
            ids.extend(&r.ids[..j - 1]);
            ids.extend(&l.ids[i..]);
            let merged = Piece { graph, ids };
            let (lo, hi) = (pa.min(pb), pa.max(pb));
            ps.remove(hi);
            ps[lo] = merged;
        }
    }
    if ps.len() != 1 {
        return Err("gluing left several components".into());
    }
    Ok(ps.pop().unwrap())
}

/// Compare the two orders of a pair of gluings as canonical graphs after
/// matching legs by identity.
fn same_graph(pieces: &[Piece], g1: (usize, usize), g2: (usize, usize)) -> Result<bool, String> {
    let a = assemble(pieces, &[g1, g2])?;
    let b = assemble(pieces, &[g2, g1])?;
    // leg k of b should get the label of its identity in a
    let perm: Vec<usize> = b.ids.iter().map(|id| a.ids.iter().position(|z| z == id).expect("same legs")).collect();
    let b = b.graph.relabel_legs(&perm);
    Ok(canonicalize(&a.graph).0 == canonicalize(&b).0)
}

fn random_piece(rng: &mut ChaCha8Rng, min_legs: usize, next_id: &mut usize) -> Piece {
    let g = rng.gen_range(0..=1usize);
    let n = rng.gen_range(min_legs..=min_legs + 2).max(3 - 2 * g.min(1)).max(min_legs);
    let mut graph = ModularGraph::corolla(g, n);
    for _ in 0..rng.gen_range(0..=2) {
        let ex = expansions(&graph);
        if ex.is_empty() {
            break;
        }
        graph = ex[rng.gen_range(0..ex.len())].clone();
    }
    let ids = (0..n).map(|k| *next_id + k).collect();
    *next_id += n;
    Piece { graph, ids }
}

fn pick_two(rng: &mut ChaCha8Rng, ids: &[usize]) -> (usize, usize) {
    let mut v = ids.to_vec();
    v.shuffle(rng);
    (v[0], v[1])
}

/// Random instances of the four relation families on modular graphs: gluing
/// in either order gives the same graph up to the relabelling determined by
/// tracking legs.
pub fn verify_graph_relations(seed: u64, count: usize) -> GraphRelationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_family = [0usize; 4];
    let mut failures = Vec::new();
    for inst in 0..count {
        let fam = inst % 4;
        let mut next = 0;
        let (pieces, g1, g2) = match fam {
            0 => {
                let a = random_piece(&mut rng, 1, &mut next);
                let b = random_piece(&mut rng, 2, &mut next);
                let c = random_piece(&mut rng, 1, &mut next);
                let (x, y) = (a.ids[rng.gen_range(0..a.ids.len())], b.ids[rng.gen_range(0..b.ids.len())]);
                let free: Vec<usize> = a.ids.iter().chain(&b.ids).copied().filter(|&z| z != x && z != y).collect();
                let u = free[rng.gen_range(0..free.len())];
                let w = c.ids[rng.gen_range(0..c.ids.len())];
                (vec![a, b, c], (x, y), (u, w))
            }
            1 => {
                let a = random_piece(&mut rng, 2, &mut next);
                let b = random_piece(&mut rng, 2, &mut next);
                let (x1, x2) = pick_two(&mut rng, &a.ids);
                let (y1, y2) = pick_two(&mut rng, &b.ids);
                (vec![a, b], (x1, y1), (y2, x2))
            }
            2 => {
                let a = random_piece(&mut rng, 3, &mut next);
                let b = random_piece(&mut rng, 1, &mut next);
                let mut v = a.ids.clone();
                v.shuffle(&mut rng);
                let y = b.ids[rng.gen_range(0..b.ids.len())];
                let (e, l) = if rng.gen_bool(0.5) { ((v[0], y), (v[1], v[2])) } else { ((y, v[0]), (v[2], v[1])) };
                (vec![a, b], e, l)
            }
            _ => {
                let a = random_piece(&mut rng, 4, &mut next);
                let mut v = a.ids.clone();
                v.shuffle(&mut rng);
                (vec![a], (v[0], v[1]), (v[2], v[3]))
            }
        };
        per_family[fam] += 1;
        match same_graph(&pieces, g1, g2) {
            Ok(true) => {}
            Ok(false) => failures.push(format!("instance {inst}: gluings {g1:?}, {g2:?} disagree")),
            Err(e) => failures.push(format!("instance {inst}: {e}")),
        }
    }
    GraphRelationReport { checked: count, per_family, failures }
}
