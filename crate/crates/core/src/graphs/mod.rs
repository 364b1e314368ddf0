//! Modular graphs in the flag model `(V, F, a, i)`.
//!
//! A graph is a set of flags `0..F`, an involution whose fixed points are legs and
//! whose 2-cycles are edges, an adjacency map from flags to vertices, a genus label
//! per vertex and a labelling of the legs by `1..=n`.

mod canon;
mod enumerate;
pub mod families;
mod ops;

pub use canon::{canonicalize, AutGroup, CanonicalGraph};
pub use enumerate::{enumerate_graphs, expansions, graphs_by_edges};
pub use ops::{contract_edges, contract_nest, delete_edge, flag_closure, glue_pair, glue_self, substitute, Closure, Contraction};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("involution is not self-inverse at flag {0}")]
    NonInvolutive(usize),
    #[error("vertex {0} is unstable")]
    Unstable(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no edges")]
    NoEdges,
    #[error("bad leg labels: {0}")]
    BadLegLabels(String),
    #[error("bad leg index {index} (graph has {legs} legs)")]
    BadLegIndex { index: usize, legs: usize },
    #[error("edge set is not a nest")]
    NotANest,
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("unstable type ({g},{n})")]
    BadType { g: usize, n: usize },
    #[error("malformed graph data: {0}")]
    Malformed(String),
}

/// A modular graph. Construct through [`ModularGraph::validate`], the JSON reader,
/// [`ModularGraph::corolla`] or the gluing operations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModularGraph {
    pub(crate) involution: Vec<usize>,
    pub(crate) adjacency: Vec<usize>,
    pub(crate) genus: Vec<u32>,
    /// `legs[k]` is the flag carrying leg label `k + 1`.
    pub(crate) legs: Vec<usize>,
}

/// The five raw fields, as they appear in the JSON format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawGraph {
    pub flags: usize,
    pub involution: Vec<usize>,
    pub adjacency: Vec<usize>,
    pub genus: Vec<u32>,
    pub legs: BTreeMap<String, usize>,
}

impl ModularGraph {
    /// Build without checking stability, connectivity or the edge count.
    /// The involution and leg data must still be consistent.
    pub(crate) fn from_parts(
        involution: Vec<usize>,
        adjacency: Vec<usize>,
        genus: Vec<u32>,
        legs: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(involution.len(), adjacency.len());
        ModularGraph { involution, adjacency, genus, legs }
    }

    /// The edgeless corolla `*_{g,n}`: one vertex of genus `g` with `n` legs.
    pub fn corolla(g: usize, n: usize) -> Self {
        ModularGraph {
            involution: (0..n).collect(),
            adjacency: vec![0; n],
            genus: vec![g as u32],
            legs: (0..n).collect(),
        }
    }

    /// Validate raw data into a modular graph with at least one edge.
    pub fn validate(
        involution: Vec<usize>,
        adjacency: Vec<usize>,
        genus: Vec<u32>,
        leg_labels: &BTreeMap<usize, usize>,
    ) -> Result<Self, GraphError> {
        let f = involution.len();
        if adjacency.len() != f {
            return Err(GraphError::Malformed(format!(
                "involution has {} entries but adjacency has {}",
                f,
                adjacency.len()
            )));
        }
        for (i, &j) in involution.iter().enumerate() {
            if j >= f || involution[j] != i {
                return Err(GraphError::NonInvolutive(i));
            }
        }
        if let Some(&a) = adjacency.iter().find(|&&a| a >= genus.len()) {
            return Err(GraphError::Malformed(format!("adjacency names missing vertex {a}")));
        }
        let fixed: Vec<usize> = (0..f).filter(|&i| involution[i] == i).collect();
        if leg_labels.len() != fixed.len() {
            return Err(GraphError::BadLegLabels(format!(
                "{} legs but {} labels",
                fixed.len(),
                leg_labels.len()
            )));
        }
        let n = fixed.len();
        let mut legs = vec![usize::MAX; n];
        for (&flag, &label) in leg_labels {
            if flag >= f || involution[flag] != flag {
                return Err(GraphError::BadLegLabels(format!("flag {flag} is not a leg")));
            }
            if label == 0 || label > n || legs[label - 1] != usize::MAX {
                return Err(GraphError::BadLegLabels(format!("label {label} is not a bijection onto 1..={n}")));
            }
            legs[label - 1] = flag;
        }
        let g = ModularGraph { involution, adjacency, genus, legs };
        if g.num_edges() == 0 {
            return Err(GraphError::NoEdges);
        }
        g.check_stable_connected()?;
        Ok(g)
    }

    pub(crate) fn check_stable_connected(&self) -> Result<(), GraphError> {
        for v in 0..self.num_vertices() {
            if !self.vertex_is_stable(v) {
                return Err(GraphError::Unstable(v));
            }
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(())
    }

    pub fn from_raw(raw: &RawGraph) -> Result<Self, GraphError> {
        if raw.involution.len() != raw.flags {
            return Err(GraphError::Malformed(format!(
                "flags = {} but involution has {} entries",
                raw.flags,
                raw.involution.len()
            )));
        }
        let mut labels = BTreeMap::new();
        for (k, &v) in &raw.legs {
            let flag: usize = k
                .parse()
                .map_err(|_| GraphError::Malformed(format!("leg key {k:?} is not a flag index")))?;
            labels.insert(flag, v);
        }
        Self::validate(raw.involution.clone(), raw.adjacency.clone(), raw.genus.clone(), &labels)
    }

    /// Parse the JSON graph format. Graphs with no edges are accepted only in the
    /// shape of a corolla.
    pub fn from_json(s: &str) -> Result<Self, GraphError> {
        let raw: RawGraph = serde_json::from_str(s).map_err(|e| GraphError::Malformed(e.to_string()))?;
        match Self::from_raw(&raw) {
            Err(GraphError::NoEdges) if raw.genus.len() == 1 => {
                let n = raw.flags;
                let mut g = ModularGraph::corolla(raw.genus[0] as usize, n);
                for (k, &label) in &raw.legs {
                    let flag: usize = k.parse().map_err(|_| GraphError::Malformed(k.clone()))?;
                    if flag >= n || label == 0 || label > n {
                        return Err(GraphError::BadLegLabels(format!("{k}:{label}")));
                    }
                    g.legs[label - 1] = flag;
                }
                Ok(g)
            }
            other => other,
        }
    }

    /// The JSON encoding, fields in fixed order and legs sorted by flag.
    pub fn to_json(&self) -> String {
        fn list<T: std::fmt::Display>(v: &[T]) -> String {
            let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
        let mut legs: Vec<(usize, usize)> = self.legs.iter().enumerate().map(|(k, &f)| (f, k + 1)).collect();
        legs.sort();
        let legs: Vec<String> = legs.iter().map(|(f, l)| format!("\"{f}\":{l}")).collect();
        format!(
            "{{\"flags\":{},\"involution\":{},\"adjacency\":{},\"genus\":{},\"legs\":{{{}}}}}",
            self.num_flags(),
            list(&self.involution),
            list(&self.adjacency),
            list(&self.genus),
            legs.join(",")
        )
    }

    pub fn num_flags(&self) -> usize {
        self.involution.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.genus.len()
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn num_edges(&self) -> usize {
        (self.num_flags() - self.num_legs()) / 2
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    pub fn adjacency(&self) -> &[usize] {
        &self.adjacency
    }

    pub fn genus_labels(&self) -> &[u32] {
        &self.genus
    }

    /// Flags carrying leg labels `1..=n`, in label order.
    pub fn leg_flags(&self) -> &[usize] {
        &self.legs
    }

    pub fn leg_label(&self, flag: usize) -> Option<usize> {
        self.legs.iter().position(|&f| f == flag).map(|k| k + 1)
    }

    pub fn is_leg(&self, flag: usize) -> bool {
        self.involution[flag] == flag
    }

    pub fn is_corolla(&self) -> bool {
        self.num_edges() == 0
    }

    /// Edges as `(a, b)` flag pairs with `a < b`, sorted by `a`. This is the
    /// reference edge order used throughout.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.num_flags())
            .filter(|&f| self.involution[f] > f)
            .map(|f| (f, self.involution[f]))
            .collect()
    }

    pub fn edge_endpoints(&self) -> Vec<(usize, usize)> {
        self.edges()
            .into_iter()
            .map(|(a, b)| (self.adjacency[a], self.adjacency[b]))
            .collect()
    }

    /// Flags at `v` in increasing order.
    pub fn flags_at(&self, v: usize) -> Vec<usize> {
        (0..self.num_flags()).filter(|&f| self.adjacency[f] == v).collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.adjacency.iter().filter(|&&a| a == v).count()
    }

    pub fn vertex_is_stable(&self, v: usize) -> bool {
        self.valence(v) + 2 * self.genus[v] as usize >= 3
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.num_vertices();
        if nv == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for (a, b) in self.edge_endpoints() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let r0 = find(&mut parent, 0);
        (0..nv).all(|v| find(&mut parent, v) == r0)
    }

    /// First Betti number of the underlying graph.
    pub fn betti(&self) -> usize {
        self.num_edges() + 1 - self.num_vertices()
    }

    pub fn total_genus(&self) -> usize {
        self.betti() + self.genus.iter().map(|&g| g as usize).sum::<usize>()
    }

    /// The type `(g, n)`.
    pub fn gtype(&self) -> (usize, usize) {
        (self.total_genus(), self.num_legs())
    }

    /// Relabel legs: leg `k` becomes leg `perm[k-1] + 1`.
    pub fn relabel_legs(&self, perm: &[usize]) -> ModularGraph {
        let mut legs = vec![0; self.legs.len()];
        for (k, &f) in self.legs.iter().enumerate() {
            legs[perm[k]] = f;
        }
        ModularGraph { legs, ..self.clone() }
    }

    /// Renumber flags by `fmap` (old → new) and vertices by `vmap` (old → new).
    pub fn renumber(&self, fmap: &[usize], vmap: &[usize]) -> ModularGraph {
        let f = self.num_flags();
        let mut involution = vec![0; f];
        let mut adjacency = vec![0; f];
        for old in 0..f {
            involution[fmap[old]] = fmap[self.involution[old]];
            adjacency[fmap[old]] = vmap[self.adjacency[old]];
        }
        let mut genus = vec![0; self.num_vertices()];
        for (v, &g) in self.genus.iter().enumerate() {
            genus[vmap[v]] = g;
        }
        let legs = self.legs.iter().map(|&fl| fmap[fl]).collect();
        ModularGraph { involution, adjacency, genus, legs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn genus_one_loop_is_type_two_zero() {
        let g = ModularGraph::validate(vec![1, 0], vec![0, 0], vec![1], &labels(&[])).unwrap();
        assert_eq!(g.gtype(), (2, 0));
    }

    #[test]
    fn bivalent_loop_vertex_is_unstable() {
        let e = ModularGraph::validate(vec![1, 0], vec![0, 0], vec![0], &labels(&[])).unwrap_err();
        assert_eq!(e, GraphError::Unstable(0));
    }

    #[test]
    fn theta_graph() {
        let g = ModularGraph::validate(vec![3, 4, 5, 0, 1, 2], vec![0, 0, 0, 1, 1, 1], vec![0, 0], &labels(&[]))
            .unwrap();
        assert_eq!(g.gtype(), (2, 0));
        assert_eq!(g.betti(), 2);
    }

    #[test]
    fn rejects_bad_data() {
        assert_eq!(
            ModularGraph::validate(vec![1, 2, 0], vec![0, 0, 0], vec![1], &labels(&[])).unwrap_err(),
            GraphError::NonInvolutive(0)
        );
        assert_eq!(
            ModularGraph::validate(vec![0, 1, 2], vec![0, 0, 0], vec![0], &labels(&[(0, 1), (1, 2), (2, 3)]))
                .unwrap_err(),
            GraphError::NoEdges
        );
        // two disjoint genus-1 loops
        assert_eq!(
            ModularGraph::validate(vec![1, 0, 3, 2], vec![0, 0, 1, 1], vec![1, 1], &labels(&[])).unwrap_err(),
            GraphError::Disconnected
        );
        assert!(matches!(
            ModularGraph::validate(vec![0, 2, 1], vec![0, 0, 0], vec![1], &labels(&[(0, 2)])).unwrap_err(),
            GraphError::BadLegLabels(_)
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = ModularGraph::validate(vec![0, 2, 1, 3], vec![0, 0, 0, 0], vec![0], &labels(&[(0, 2), (3, 1)]))
            .unwrap();
        let s = g.to_json();
        assert_eq!(s, r#"{"flags":4,"involution":[0,2,1,3],"adjacency":[0,0,0,0],"genus":[0],"legs":{"0":2,"3":1}}"#);
        assert_eq!(ModularGraph::from_json(&s).unwrap(), g);
        let c = ModularGraph::corolla(1, 2);
        assert_eq!(ModularGraph::from_json(&c.to_json()).unwrap(), c);
    }
}
