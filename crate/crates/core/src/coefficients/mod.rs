//! Coefficient systems: strong modular operads given by structure constants.
//!
//! A system assigns to every color `(g, n)` in its support a graded vector space
//! with an action of `S_n` (matrices of the adjacent transpositions), together
//! with the two generating operations
//!
//! * `∘ : A(g₁,n₁) ⊗ A(g₂,n₂) → A(g₁+g₂, n₁+n₂−2)`, gluing leg `n₁` of the left
//!   factor to leg `1` of the right one; the output legs are the remaining left
//!   legs followed by the remaining right legs;
//! * `ξ : A(g,n) → A(g+1, n−2)`, gluing legs `n−1` and `n`.
//!
//! Every other `∘_{i,j}` and `ξ_{i,j}` is obtained from these by the leg action.
//! In odd systems both operations have degree −1.

mod com;
pub(crate) mod labeled;
mod lie;
mod relations;

pub use com::{com_system, ComKind};
pub use labeled::{contract_edge, transport, Tensor};
pub use lie::{caterpillar_count, lie_coordinates, lie_system, Bracket, LieTree};
pub use relations::{verify_graph_relations, verify_relations, GraphRelationReport, RelationCheck, RelationReport};

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homalg::{SVec, SparseMatrix, Q};
use crate::perm;

/// `(genus, number of legs)`.
pub type Color = (usize, usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoeffError {
    #[error("malformed coefficient file: {0}")]
    MalformedFile(String),
    #[error("relation {family} violated at {witness}")]
    RelationViolation { family: String, witness: String },
    #[error("arity {0} is too small (need at least 3)")]
    ArityTooSmall(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Degree of the generating operations.
    pub fn map_degree(self) -> i64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => -1,
        }
    }
}

/// Colors with `g ≤ genus` and `n + 2g ≤ weight` are described by the data; a
/// color in bounds without an entry is zero. These are exactly the vertex colors
/// of graphs of type `(genus, weight − 2·genus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub genus: usize,
    pub weight: usize,
}

impl Bounds {
    pub fn contains(&self, c: Color) -> bool {
        c.0 <= self.genus && c.1 + 2 * c.0 <= self.weight
    }

    /// Bounds covering every vertex of every `(g, n)` graph.
    pub fn for_type(g: usize, n: usize) -> Bounds {
        Bounds { genus: g, weight: n + 2 * g }
    }
}

pub fn is_stable(c: Color) -> bool {
    c.1 + 2 * c.0 >= 3
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColorData {
    pub degrees: Vec<i64>,
    /// Matrices of `s_1, …, s_{n−1}`.
    pub generators: Vec<SparseMatrix>,
}

impl ColorData {
    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// The trivial one-dimensional module in degree `deg`.
    pub fn trivial(n: usize, deg: i64) -> ColorData {
        ColorData { degrees: vec![deg], generators: vec![SparseMatrix::identity(1); n.saturating_sub(1)] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModularOperadData {
    pub name: String,
    pub parity: Parity,
    pub bounds: Bounds,
    pub colors: BTreeMap<Color, ColorData>,
    /// `∘` as a `dim(out) × dim(left)·dim(right)` matrix; column `a·dim(right)+b`.
    pub compose: BTreeMap<(Color, Color), SparseMatrix>,
    /// `ξ` as a `dim(out) × dim(in)` matrix.
    pub contract: BTreeMap<Color, SparseMatrix>,
}

pub fn compose_color(a: Color, b: Color) -> Color {
    (a.0 + b.0, a.1 + b.1 - 2)
}

pub fn contract_color(a: Color) -> Color {
    (a.0 + 1, a.1 - 2)
}

impl ModularOperadData {
    pub fn color(&self, c: Color) -> Option<&ColorData> {
        self.colors.get(&c).filter(|d| d.dim() > 0)
    }

    pub fn dim(&self, c: Color) -> usize {
        self.color(c).map_or(0, |d| d.dim())
    }

    pub fn degree(&self, c: Color, i: usize) -> i64 {
        self.colors[&c].degrees[i]
    }

    /// Apply `ρ(σ)` (leg `k` goes to `σ(k)`) to a vector of color `c`.
    pub fn act(&self, c: Color, sigma: &[usize], x: &[(usize, Q)]) -> SVec {
        let data = &self.colors[&c];
        let mut v: SVec = x.to_vec();
        for &i in perm::reduced_word(sigma).iter().rev() {
            v = data.generators[i].mul_vec(&v);
        }
        v
    }

    pub fn action_matrix(&self, c: Color, sigma: &[usize]) -> SparseMatrix {
        let d = self.dim(c);
        let cols: Vec<SVec> = (0..d).map(|i| self.act(c, sigma, &[(i, Q::one())])).collect();
        SparseMatrix::from_columns(d, &cols)
    }

    /// `∘(x ⊗ y)`; zero when the operation is not stored.
    pub fn compose_vec(&self, a: Color, b: Color, x: &[(usize, Q)], y: &[(usize, Q)]) -> SVec {
        let Some(m) = self.compose.get(&(a, b)) else { return Vec::new() };
        let db = self.dim(b);
        let mut t: SVec = Vec::with_capacity(x.len() * y.len());
        for (i, xi) in x {
            for (j, yj) in y {
                t.push((i * db + j, xi * yj));
            }
        }
        t.sort_by_key(|e| e.0);
        m.mul_vec(&t)
    }

    pub fn contract_vec(&self, a: Color, x: &[(usize, Q)]) -> SVec {
        match self.contract.get(&a) {
            Some(m) => m.mul_vec(x),
            None => Vec::new(),
        }
    }

    /// Colors of positive dimension.
    pub fn support(&self) -> Vec<Color> {
        self.colors.iter().filter(|(_, d)| d.dim() > 0).map(|(&c, _)| c).collect()
    }

    /// The genus-zero part, extended by zero to higher genus.
    pub fn cyclic_part(&self) -> ModularOperadData {
        let mut out = self.clone();
        out.name = format!("{}|genus0", self.name);
        out.colors.retain(|c, _| c.0 == 0);
        out.compose.retain(|(a, b), _| a.0 == 0 && b.0 == 0);
        out.contract.clear();
        out.bounds.genus = usize::MAX;
        out
    }

    /// Drop colors outside `bounds` (which must lie inside the current bounds).
    pub fn restrict(&self, bounds: Bounds) -> ModularOperadData {
        let mut out = self.clone();
        out.bounds = bounds;
        out.colors.retain(|&c, _| bounds.contains(c));
        out.compose.retain(|&(a, b), _| bounds.contains(a) && bounds.contains(b) && bounds.contains(compose_color(a, b)));
        out.contract.retain(|&a, _| bounds.contains(a) && bounds.contains(contract_color(a)));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FileFormat::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<ModularOperadData, CoeffError> {
        let f: FileFormat = serde_json::from_str(s).map_err(|e| CoeffError::MalformedFile(e.to_string()))?;
        f.into_data()
    }

    pub fn load(path: &Path) -> Result<ModularOperadData, CoeffError> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| CoeffError::MalformedFile(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    /// The odd cyclic system `sΣ⁻¹` of the genus-zero part: degrees shift by
    /// `n − 1`, the leg action is twisted by the sign character and `∘` by
    /// `(−1)^{n₁}` with `n₁` the arity of the left factor. Higher genus is
    /// dropped (extension by zero). Applying it to an odd system undoes the twist.
    pub fn oddify(&self) -> ModularOperadData {
        let (shift, parity) = match self.parity {
            Parity::Even => (1i64, Parity::Odd),
            Parity::Odd => (-1i64, Parity::Even),
        };
        let mut colors = BTreeMap::new();
        for (&c, d) in &self.colors {
            if c.0 != 0 {
                continue;
            }
            colors.insert(
                c,
                ColorData {
                    degrees: d.degrees.iter().map(|&x| x + shift * (c.1 as i64 - 1)).collect(),
                    generators: d.generators.iter().map(|m| m.scale(&-Q::one())).collect(),
                },
            );
        }
        let compose = self
            .compose
            .iter()
            .filter(|((a, b), _)| a.0 == 0 && b.0 == 0)
            .map(|(&(a, b), m)| ((a, b), if a.1 % 2 == 0 { m.clone() } else { m.scale(&-Q::one()) }))
            .collect();
        ModularOperadData {
            name: format!("odd({})", self.name),
            parity,
            bounds: Bounds { genus: usize::MAX, weight: self.bounds.weight },
            colors,
            compose,
            contract: BTreeMap::new(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FileColor {
    g: usize,
    n: usize,
    degrees: Vec<i64>,
    /// Dense matrices of `s_1, …, s_{n−1}`.
    action: Vec<Vec<Vec<Q>>>,
}

#[derive(Serialize, Deserialize)]
struct FileCompose {
    left: [usize; 2],
    right: [usize; 2],
    matrix: Vec<Vec<Q>>,
}

#[derive(Serialize, Deserialize)]
struct FileContract {
    color: [usize; 2],
    matrix: Vec<Vec<Q>>,
}

#[derive(Serialize, Deserialize)]
struct FileFormat {
    name: String,
    parity: Parity,
    bounds: Bounds,
    colors: Vec<FileColor>,
    #[serde(default)]
    compose: Vec<FileCompose>,
    #[serde(default)]
    contract: Vec<FileContract>,
}

fn dense(m: &SparseMatrix) -> Vec<Vec<Q>> {
    m.to_dense()
}

impl From<&ModularOperadData> for FileFormat {
    fn from(d: &ModularOperadData) -> FileFormat {
        FileFormat {
            name: d.name.clone(),
            parity: d.parity,
            bounds: d.bounds,
            colors: d
                .colors
                .iter()
                .map(|(&(g, n), c)| FileColor {
                    g,
                    n,
                    degrees: c.degrees.clone(),
                    action: c.generators.iter().map(dense).collect(),
                })
                .collect(),
            compose: d
                .compose
                .iter()
                .map(|(&(a, b), m)| FileCompose { left: [a.0, a.1], right: [b.0, b.1], matrix: dense(m) })
                .collect(),
            contract: d.contract.iter().map(|(&a, m)| FileContract { color: [a.0, a.1], matrix: dense(m) }).collect(),
        }
    }
}

fn sparse_checked(m: &[Vec<Q>], rows: usize, cols: usize, what: &str) -> Result<SparseMatrix, CoeffError> {
    if (rows == 0 || cols == 0)
        && m.iter().all(|r| r.is_empty()) && (m.len() == rows || m.is_empty()) {
            return Ok(SparseMatrix::zero(rows, cols));
        }
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(CoeffError::MalformedFile(format!("{what}: expected a {rows}×{cols} matrix")));
    }
    Ok(SparseMatrix::from_dense(m))
}

impl FileFormat {
    fn into_data(self) -> Result<ModularOperadData, CoeffError> {
        let mut colors = BTreeMap::new();
        for c in self.colors {
            let key = (c.g, c.n);
            if !is_stable(key) {
                return Err(CoeffError::MalformedFile(format!("unstable color ({}, {})", c.g, c.n)));
            }
            if !self.bounds.contains(key) {
                return Err(CoeffError::MalformedFile(format!("color ({}, {}) outside bounds", c.g, c.n)));
            }
            if c.action.len() != c.n.saturating_sub(1) {
                return Err(CoeffError::MalformedFile(format!(
                    "color ({}, {}) needs {} generator matrices",
                    c.g,
                    c.n,
                    c.n.saturating_sub(1)
                )));
            }
            let d = c.degrees.len();
            let generators = c
                .action
                .iter()
                .enumerate()
                .map(|(i, m)| sparse_checked(m, d, d, &format!("s_{} at ({}, {})", i + 1, c.g, c.n)))
                .collect::<Result<_, _>>()?;
            if colors.insert(key, ColorData { degrees: c.degrees, generators }).is_some() {
                return Err(CoeffError::MalformedFile(format!("duplicate color ({}, {})", c.g, c.n)));
            }
        }
        let dim = |c: Color| colors.get(&c).map_or(0, |d: &ColorData| d.dim());
        let mut compose = BTreeMap::new();
        for e in self.compose {
            let (a, b) = ((e.left[0], e.left[1]), (e.right[0], e.right[1]));
            if a.1 == 0 || b.1 == 0 {
                return Err(CoeffError::MalformedFile("composition needs a leg on each side".into()));
            }
            let out = compose_color(a, b);
            let m = sparse_checked(&e.matrix, dim(out), dim(a) * dim(b), &format!("∘ {a:?} {b:?}"))?;
            compose.insert((a, b), m);
        }
        let mut contract = BTreeMap::new();
        for e in self.contract {
            let a = (e.color[0], e.color[1]);
            if a.1 < 2 {
                return Err(CoeffError::MalformedFile("contraction needs two legs".into()));
            }
            let m = sparse_checked(&e.matrix, dim(contract_color(a)), dim(a), &format!("ξ {a:?}"))?;
            contract.insert(a, m);
        }
        Ok(ModularOperadData { name: self.name, parity: self.parity, bounds: self.bounds, colors, compose, contract })
    }
}
