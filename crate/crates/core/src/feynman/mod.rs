//! The Feynman transform of a coefficient system.
//!
//! The chains on a graph γ are dual to the `Aut(γ)`-coinvariants of `⊗_v A(v)`,
//! which for even systems also carries one odd token per edge. Coinvariants are
//! computed by averaging over the group and row reducing. The contraction
//! differential is assembled on coinvariants edge by edge; the transform's
//! differential is its transpose and expands one edge at a time.
//!
//! Degrees: a basis element sits in degree `−Σ(label degrees) − |E|` for even
//! systems and `−Σ(label degrees)` for odd ones.

mod induced;

pub use induced::{induced_modular_structure, GraphHomology, InducedStructure};

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coefficients::labeled::{contract_edge_into, transport_into, vertex_color, Tensor};
use crate::coefficients::{compose_color, contract_color, is_stable, Color, ModularOperadData, Parity};
use crate::graphs::{canonicalize, contract_edges, graphs_by_edges, CanonicalGraph, GraphError};
use crate::homalg::{ChainComplex, HomalgError, Reducer, SVec, SparseMatrix, Q};

#[derive(Debug, Error)]
pub enum FeynmanError {
    #[error("coefficient system `{system}` does not describe color {color:?}")]
    SupportTooSmall { system: String, color: Color },
    #[error("`{system}`: {map} is not homogeneous of degree {expected}")]
    ParityMismatch { system: String, map: String, expected: i64 },
    #[error("transposition s_{0} out of range")]
    BadTransposition(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Homalg(#[from] HomalgError),
}

/// A basis element: the dual of the class of the pure tensor `labels` on `graph`.
#[derive(Clone, Debug)]
pub struct FtBasisElement {
    pub graph: CanonicalGraph,
    pub labels: Vec<usize>,
    pub degree: i64,
    /// Sum of the label degrees.
    pub label_degree: i64,
}

impl FtBasisElement {
    pub fn edges(&self) -> usize {
        self.graph.num_edges()
    }
}

/// Coinvariants on one canonical graph.
struct Block {
    graph: CanonicalGraph,
    auts: Vec<Vec<usize>>,
    strides: Vec<usize>,
    reps: Vec<Vec<usize>>,
    reducer: Reducer,
    degree: Vec<i64>,
    label_degree: Vec<i64>,
    pos: Vec<usize>,
}

impl Block {
    fn new(data: &ModularOperadData, graph: CanonicalGraph) -> Option<Block> {
        let nv = graph.num_vertices();
        let dims: Vec<usize> = (0..nv).map(|v| data.dim(vertex_color(&graph, v))).collect();
        if dims.contains(&0) {
            return None;
        }
        let mut strides = vec![1; nv];
        for v in (0..nv.saturating_sub(1)).rev() {
            strides[v] = strides[v + 1] * dims[v + 1];
        }
        let total: usize = dims.iter().product();
        let mut block = Block {
            auts: graph.aut_elements(),
            graph,
            strides,
            reps: Vec::new(),
            reducer: Reducer::new(),
            degree: Vec::new(),
            label_degree: Vec::new(),
            pos: Vec::new(),
        };
        let edge_shift = if data.parity == Parity::Even { block.graph.num_edges() as i64 } else { 0 };
        for idx in 0..total {
            let key: Vec<usize> = (0..nv).map(|v| idx / block.strides[v] % dims[v]).collect();
            let sym = block.symmetrize(data, &Tensor::from([(key.clone(), Q::one())]));
            if block.reducer.insert(&sym, &[(block.reps.len(), Q::one())]) {
                let ld: i64 = (0..nv).map(|v| data.degree(vertex_color(&block.graph, v), key[v])).sum();
                block.label_degree.push(ld);
                block.degree.push(-ld - edge_shift);
                block.reps.push(key);
            }
        }
        if block.reps.is_empty() {
            None
        } else {
            Some(block)
        }
    }

    fn index(&self, key: &[usize]) -> usize {
        key.iter().zip(&self.strides).map(|(k, s)| k * s).sum()
    }

    /// `Σ_{σ ∈ Aut} σ·t` as a vector over pure tensors.
    fn symmetrize(&self, data: &ModularOperadData, t: &Tensor) -> SVec {
        let mut acc = Tensor::new();
        for (k, c) in t {
            for s in &self.auts {
                transport_into(&mut acc, data, &self.graph, &self.graph, s, k, c);
            }
        }
        acc.into_iter().map(|(k, c)| (self.index(&k), c)).collect()
    }

    /// Coordinates of the class of `t` in the representative basis.
    fn coords(&self, data: &ModularOperadData, t: &Tensor) -> SVec {
        let (rem, tag) = self.reducer.reduce(&self.symmetrize(data, t));
        debug_assert!(rem.is_empty(), "averaged tensor outside the coinvariant span");
        tag
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerTable {
    pub dims: BTreeMap<i64, usize>,
    pub chi: i64,
}

/// `FT(A)(g, n)` with its basis and differential.
pub struct FeynmanComplex {
    pub system: String,
    pub g: usize,
    pub n: usize,
    /// Parity of the transform (opposite to that of the coefficients).
    pub parity: Parity,
    pub basis: BTreeMap<i64, Vec<FtBasisElement>>,
    pub complex: ChainComplex,
    data: ModularOperadData,
    blocks: Vec<Block>,
    index: HashMap<String, usize>,
}

fn check_support(data: &ModularOperadData, g: usize, n: usize) -> Result<(), FeynmanError> {
    let weight = n + 2 * g;
    for g2 in 0..=g {
        for n2 in 0..=weight - 2 * g2 {
            if is_stable((g2, n2)) && !data.bounds.contains((g2, n2)) {
                return Err(FeynmanError::SupportTooSmall { system: data.name.clone(), color: (g2, n2) });
            }
        }
    }
    Ok(())
}

fn check_parity(data: &ModularOperadData) -> Result<(), FeynmanError> {
    let shift = data.parity.map_degree();
    let fail = |map: String| FeynmanError::ParityMismatch { system: data.name.clone(), map, expected: shift };
    for (&(a, b), m) in &data.compose {
        let db = data.dim(b);
        let out = compose_color(a, b);
        for (r, c, _) in m.triplets() {
            if data.degree(out, r) != data.degree(a, c / db) + data.degree(b, c % db) + shift {
                return Err(fail(format!("∘ {a:?} {b:?}")));
            }
        }
    }
    for (&a, m) in &data.contract {
        for (r, c, _) in m.triplets() {
            if data.degree(contract_color(a), r) != data.degree(a, c) + shift {
                return Err(fail(format!("ξ {a:?}")));
            }
        }
    }
    Ok(())
}

/// Build `FT(A)(g, n)` over every graph of type `(g, n)` and the corolla.
pub fn build_ft(data: &ModularOperadData, g: usize, n: usize) -> Result<FeynmanComplex, FeynmanError> {
    check_support(data, g, n)?;
    check_parity(data)?;
    let graphs: Vec<CanonicalGraph> = graphs_by_edges(g, n, None)?.into_iter().flatten().collect();
    let mut blocks: Vec<Block> = graphs.into_par_iter().filter_map(|cg| Block::new(data, cg)).collect();
    let mut basis: BTreeMap<i64, Vec<FtBasisElement>> = BTreeMap::new();
    for b in blocks.iter_mut() {
        for (r, key) in b.reps.iter().enumerate() {
            let list = basis.entry(b.degree[r]).or_default();
            b.pos.push(list.len());
            list.push(FtBasisElement {
                graph: b.graph.clone(),
                labels: key.clone(),
                degree: b.degree[r],
                label_degree: b.label_degree[r],
            });
        }
    }
    let index: HashMap<String, usize> = blocks.iter().enumerate().map(|(i, b)| (b.graph.key().to_string(), i)).collect();

    // contraction: (source block, rep) ↦ coordinates on the contracted graph
    let entries: Vec<Vec<(i64, usize, usize, Q)>> = blocks
        .par_iter()
        .map(|b| {
            let mut out = Vec::new();
            for e in 0..b.graph.num_edges() {
                let c = contract_edges(&b.graph, &[e]);
                let (cg, fmap) = canonicalize(&c.graph);
                let Some(&ti) = index.get(cg.key()) else { continue };
                let tb = &blocks[ti];
                for (ri, rep) in b.reps.iter().enumerate() {
                    let mut t = Tensor::new();
                    contract_edge_into(&mut t, data, &b.graph, e, &c, rep, false, &Q::one());
                    let mut moved = Tensor::new();
                    for (k, v) in &t {
                        transport_into(&mut moved, data, &c.graph, &cg, &fmap, k, v);
                    }
                    for (tj, val) in tb.coords(data, &moved) {
                        debug_assert_eq!(tb.degree[tj], b.degree[ri] + 1);
                        out.push((tb.degree[tj], b.pos[ri], tb.pos[tj], val));
                    }
                }
            }
            out
        })
        .collect();
    let mut triplets: BTreeMap<i64, Vec<(usize, usize, Q)>> = BTreeMap::new();
    for (deg, row, col, v) in entries.into_iter().flatten() {
        triplets.entry(deg).or_default().push((row, col, v));
    }
    let dims: BTreeMap<i64, usize> = basis.iter().map(|(&k, v)| (k, v.len())).collect();
    let dim = |k: i64| dims.get(&k).copied().unwrap_or(0);
    let diff = triplets.into_iter().map(|(k, t)| (k, SparseMatrix::from_triplets(dim(k - 1), dim(k), t))).collect();
    let complex = ChainComplex { dims, diff };
    complex.check_d_squared()?;
    Ok(FeynmanComplex {
        system: data.name.clone(),
        g,
        n,
        parity: data.parity.flip(),
        basis,
        complex,
        data: data.clone(),
        blocks,
        index,
    })
}

#[derive(Serialize)]
struct DumpBasis {
    degree: i64,
    index: usize,
    graph: serde_json::Value,
    labels: Vec<usize>,
}

#[derive(Serialize)]
struct DumpDifferential {
    from_degree: i64,
    rows: usize,
    cols: usize,
    /// `(row, col, "p/q")`.
    entries: Vec<(usize, usize, String)>,
}

#[derive(Serialize)]
struct Dump {
    system: String,
    g: usize,
    n: usize,
    basis: Vec<DumpBasis>,
    differential: Vec<DumpDifferential>,
}

impl FeynmanComplex {
    pub fn coefficients(&self) -> &ModularOperadData {
        &self.data
    }

    pub fn euler_characteristic(&self) -> EulerTable {
        EulerTable { dims: self.complex.dims.clone(), chi: self.complex.euler_characteristic() }
    }

    /// The contraction complex this transform is dual to, in degrees `−k`.
    pub fn contraction_complex(&self) -> ChainComplex {
        ChainComplex {
            dims: self.complex.dims.iter().map(|(&k, &n)| (-k, n)).collect(),
            diff: self.complex.diff.iter().map(|(&k, m)| (1 - k, m.transpose())).collect(),
        }
    }

    /// Action of the transposition of legs `i` and `i + 1` (1-based), per degree.
    pub fn sn_action(&self, i: usize) -> Result<BTreeMap<i64, SparseMatrix>, FeynmanError> {
        if i == 0 || i >= self.n {
            return Err(FeynmanError::BadTransposition(i));
        }
        let mut s: Vec<usize> = (0..self.n).collect();
        s.swap(i - 1, i);
        let data = &self.data;
        let entries: Vec<Vec<(i64, usize, usize, Q)>> = self
            .blocks
            .par_iter()
            .map(|b| {
                let rg = b.graph.relabel_legs(&s);
                let (cg, fmap) = canonicalize(&rg);
                let tb = &self.blocks[self.index[cg.key()]];
                let mut out = Vec::new();
                for (ri, rep) in b.reps.iter().enumerate() {
                    let mut moved = Tensor::new();
                    transport_into(&mut moved, data, &rg, &cg, &fmap, rep, &Q::one());
                    for (tj, val) in tb.coords(data, &moved) {
                        out.push((b.degree[ri], b.pos[ri], tb.pos[tj], val));
                    }
                }
                out
            })
            .collect();
        let mut triplets: BTreeMap<i64, Vec<(usize, usize, Q)>> =
            self.complex.dims.keys().map(|&k| (k, Vec::new())).collect();
        for (deg, row, col, v) in entries.into_iter().flatten() {
            triplets.entry(deg).or_default().push((row, col, v));
        }
        Ok(triplets
            .into_iter()
            .map(|(k, t)| {
                let d = self.complex.dim(k);
                (k, SparseMatrix::from_triplets(d, d, t))
            })
            .collect())
    }

    /// Action matrices of all `s_1, …, s_{n−1}`, grouped by degree.
    pub fn sn_actions(&self) -> Result<BTreeMap<i64, Vec<SparseMatrix>>, FeynmanError> {
        let mut out: BTreeMap<i64, Vec<SparseMatrix>> = BTreeMap::new();
        for i in 1..self.n {
            for (k, m) in self.sn_action(i)? {
                out.entry(k).or_default().push(m);
            }
        }
        Ok(out)
    }

    /// Basis (graph JSON and labels) and differential as sparse triplets.
    pub fn dump(&self) -> String {
        let basis = self
            .basis
            .iter()
            .flat_map(|(&k, list)| {
                list.iter().enumerate().map(move |(i, b)| DumpBasis {
                    degree: k,
                    index: i,
                    graph: serde_json::from_str(&b.graph.to_json()).expect("graph json"),
                    labels: b.labels.clone(),
                })
            })
            .collect();
        let differential = self
            .complex
            .diff
            .iter()
            .map(|(&k, m)| DumpDifferential {
                from_degree: k,
                rows: m.nrows,
                cols: m.ncols,
                entries: m.triplets().into_iter().map(|(r, c, v)| (r, c, v.to_string())).collect(),
            })
            .collect();
        let dump = Dump { system: self.system.clone(), g: self.g, n: self.n, basis, differential };
        serde_json::to_string_pretty(&dump).expect("serializable")
    }
}

/// A basis of the coinvariants on one graph, as label tuples with degrees.
pub fn coinvariant_basis(data: &ModularOperadData, graph: &CanonicalGraph) -> Vec<FtBasisElement> {
    match Block::new(data, graph.clone()) {
        None => Vec::new(),
        Some(b) => (0..b.reps.len())
            .map(|r| FtBasisElement {
                graph: b.graph.clone(),
                labels: b.reps[r].clone(),
                degree: b.degree[r],
                label_degree: b.label_degree[r],
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests;
