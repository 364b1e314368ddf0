//! Complexes of mod-2-ordered nestings and their deformation retract onto
//! the complex of a graph with one edge removed.
//!
//! A basis element is a nesting with its nests in sorted order. An arbitrary
//! order is normalized to the sorted one times the sign of the sorting
//! permutation. The differential adds a nest in the last position.
//!
//! For an admissible edge `e` the maps are
//! - `ι`: append `N_max` (all edges but `e`) in the last position;
//! - `π`: remove `e` from every nest, after moving `N_max` to the last position
//!   or the smallest nest containing `e` to the penultimate one;
//! - `H`: remove `e` one nest at a time, after moving the smallest nest
//!   containing `e` to the last position.
//!
//! The source of `ι` is the desuspension of the complex of `γ∖e`, whose
//! differential is the negative of the nesting differential.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graphs::{enumerate_graphs, GraphError, ModularGraph};
use crate::homalg::{betti_numbers, ChainComplex, SparseMatrix, Q};
use crate::nestings::{EdgeHost, Nest, Nesting};
use crate::perm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiberError {
    #[error("edge {0} is not admissible: removing it must leave the remaining edges connected")]
    BadEdgeChoice(usize),
    #[error("edge set {0:#b} is not a nest")]
    NotANest(u64),
    #[error("edge order must list every edge exactly once")]
    BadEdgeOrder,
}

/// A nesting with a sign relative to the sorted order of its nests.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrderedNesting {
    pub nesting: Nesting,
    pub sign: i8,
}

impl OrderedNesting {
    /// Normalize an ordered list of nests.
    pub fn from_order(order: &[Nest]) -> OrderedNesting {
        let (nesting, sign) = normalize(order.to_vec(), 1);
        OrderedNesting { nesting, sign: sign as i8 }
    }

    pub fn degree(&self) -> i64 {
        -1 - self.nesting.len() as i64
    }
}

/// Finite linear combination of sorted nestings.
pub type Chain = BTreeMap<Nesting, Q>;

fn normalize(mut order: Vec<Nest>, sign: i64) -> (Nesting, i64) {
    // insertion sort counting transpositions
    let mut s = sign;
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 && order[j - 1] > order[j] {
            order.swap(j - 1, j);
            s = -s;
            j -= 1;
        }
    }
    (Nesting { nests: order }, s)
}

fn pow_sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Structural case of a nesting with respect to `e`. The suffix `a` means every
/// other nest `N ∋ e` with `N − e` disconnected has exactly one of its two
/// components in the nesting; `b` means this fails somewhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Case {
    C1,
    C2a,
    C2b,
    C3a,
    C3b,
    C4a,
    C4b,
    C5,
}

impl Case {
    pub fn pi_nonzero(self) -> bool {
        matches!(self, Case::C1 | Case::C2a | Case::C3a | Case::C4a)
    }

    pub fn homotopy_nonzero(self) -> bool {
        !matches!(self, Case::C1 | Case::C5)
    }
}

/// `γ` together with an admissible edge `e`.
#[derive(Clone, Debug)]
pub struct Retract {
    pub host: EdgeHost,
    pub sub: EdgeHost,
    pub e: usize,
    pub n_max: Nest,
}

struct Smallest {
    pos: usize,
    kind: u8,
}

impl Retract {
    pub fn new(g: &ModularGraph, e: usize) -> Result<Retract, FiberError> {
        Retract::on_host(EdgeHost::of(g), e)
    }

    pub fn on_host(host: EdgeHost, e: usize) -> Result<Retract, FiberError> {
        if host.universe >> e & 1 == 0 || host.nedges() < 2 {
            return Err(FiberError::BadEdgeChoice(e));
        }
        let n_max = Nest(host.universe & !(1u64 << e));
        if !host.is_connected_set(n_max.0) {
            return Err(FiberError::BadEdgeChoice(e));
        }
        let sub = host.delete(e);
        Ok(Retract { host, sub, e, n_max })
    }

    fn eb(&self) -> u64 {
        1u64 << self.e
    }

    /// Nests of `order` containing `e`, by increasing size, with positions.
    fn containing(&self, order: &[Nest]) -> Vec<(usize, Nest)> {
        let mut v: Vec<(usize, Nest)> = order.iter().copied().enumerate().filter(|(_, n)| n.0 & self.eb() != 0).collect();
        v.sort_by_key(|(_, n)| n.len());
        v
    }

    /// Smallest nest containing `e` and which of cases 2, 3, 4 applies (0 if none).
    fn smallest(&self, order: &[Nest]) -> Option<Smallest> {
        let (pos, nest) = *self.containing(order).first()?;
        let rest = nest.0 & !self.eb();
        let kind = if rest == 0 {
            2
        } else {
            let comps = self.host.components(rest);
            if comps.len() == 1 && order.contains(&Nest(rest)) {
                3
            } else if comps.len() == 2 && comps.iter().all(|c| order.contains(&Nest(*c))) {
                4
            } else {
                0
            }
        };
        Some(Smallest { pos, kind })
    }

    pub fn classify(&self, n: &Nesting) -> Case {
        let order = &n.nests;
        if order.contains(&self.n_max) {
            return Case::C1;
        }
        let Some(s) = self.smallest(order) else { return Case::C5 };
        // Strip e from the larger nests in turn; a split is fine when exactly one
        // component is among the nests seen so far (after their own stripping).
        let mut seen: std::collections::BTreeSet<u64> = order.iter().map(|n| n.0 & !self.eb()).collect();
        let mut good = true;
        for (_, m) in self.containing(order).into_iter().skip(1) {
            let comps = self.host.components(m.0 & !self.eb());
            if comps.len() == 2 {
                let present: Vec<u64> = comps.iter().copied().filter(|c| seen.contains(c)).collect();
                if present.len() != 1 {
                    good = false;
                    break;
                }
                seen.extend(comps);
            }
        }
        match (s.kind, good) {
            (2, true) => Case::C2a,
            (2, false) => Case::C2b,
            (3, true) => Case::C3a,
            (3, false) => Case::C3b,
            (4, true) => Case::C4a,
            (4, false) => Case::C4b,
            _ => Case::C5,
        }
    }

    /// Remove `e` from the nest `n` in place inside `list`. Returns false when
    /// `n − e` splits and not exactly one component is already listed.
    fn strip(&self, list: &mut [Nest], n: Nest) -> bool {
        let comps = self.host.components(n.0 & !self.eb());
        let at = list.iter().position(|&m| m == n).unwrap();
        match comps.as_slice() {
            [c] => {
                list[at] = Nest(*c);
                true
            }
            [a, b] => match (list.contains(&Nest(*a)), list.contains(&Nest(*b))) {
                (true, false) => {
                    list[at] = Nest(*b);
                    true
                }
                (false, true) => {
                    list[at] = Nest(*a);
                    true
                }
                _ => false,
            },
            _ => unreachable!("removing one edge leaves at most two components"),
        }
    }

    /// `ι` on an ordered nesting of `γ∖e`.
    pub fn iota_order(&self, order: &[Nest]) -> (Vec<Nest>, i64) {
        let mut v = order.to_vec();
        v.push(self.n_max);
        (v, 1)
    }

    /// `π` on an ordered nesting of `γ`.
    pub fn pi_order(&self, order: &[Nest]) -> Option<(Vec<Nest>, i64)> {
        let r = order.len() as i64;
        if let Some(p) = order.iter().position(|&n| n == self.n_max) {
            let mut v = order.to_vec();
            v.remove(p);
            return Some((v, pow_sign(r - 1 - p as i64)));
        }
        let s = self.smallest(order)?;
        if s.kind == 0 {
            return None;
        }
        // move to the penultimate position (1-based r−1); for {N_e} alone this is −1
        let sign = pow_sign(r - 2 - s.pos as i64);
        let mut list = order.to_vec();
        list.remove(s.pos);
        for (_, n) in self.containing(order).into_iter().skip(1) {
            if !self.strip(&mut list, n) {
                return None;
            }
        }
        Some((list, sign))
    }

    /// `H` on an ordered nesting of `γ`.
    pub fn homotopy_order(&self, order: &[Nest]) -> Vec<(Vec<Nest>, i64)> {
        let Some(s) = self.smallest(order) else { return Vec::new() };
        if s.kind == 0 || order.contains(&self.n_max) {
            return Vec::new();
        }
        let r = order.len() as i64;
        let sign = pow_sign(r - 1 - s.pos as i64);
        let mut cur = order.to_vec();
        cur.remove(s.pos);
        let mut out = vec![(cur.clone(), sign)];
        for (_, n) in self.containing(order).into_iter().skip(1) {
            if !self.strip(&mut cur, n) {
                break;
            }
            out.push((cur.clone(), sign));
        }
        out
    }

    pub fn iota(&self, x: &Chain) -> Chain {
        apply(x, |o| vec![self.iota_order(o)])
    }

    pub fn pi(&self, x: &Chain) -> Chain {
        apply(x, |o| self.pi_order(o).into_iter().collect())
    }

    pub fn homotopy(&self, x: &Chain) -> Chain {
        apply(x, |o| self.homotopy_order(o))
    }

    /// Differential of `C∗(γ)`.
    pub fn d(&self, x: &Chain) -> Chain {
        differential(&self.host, x)
    }

    /// Differential of the desuspended `C∗(γ∖e)`.
    pub fn d_sub(&self, x: &Chain) -> Chain {
        let y = differential(&self.sub, x);
        y.into_iter().map(|(k, v)| (k, -v)).collect()
    }
}

fn apply(x: &Chain, f: impl Fn(&[Nest]) -> Vec<(Vec<Nest>, i64)>) -> Chain {
    let mut out = Chain::new();
    for (n, c) in x {
        for (order, s) in f(&n.nests) {
            let (key, s) = normalize(order, s);
            add_term(&mut out, key, c * &Q::from_int(s));
        }
    }
    out
}

fn add_term(out: &mut Chain, key: Nesting, v: Q) {
    match out.entry(key) {
        Entry::Vacant(slot) => {
            if !v.is_zero() {
                slot.insert(v);
            }
        }
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += v;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
    }
}

/// Terms of `d` on one sorted nesting: every addable nest in the last position.
pub fn differential_terms(host: &EdgeHost, n: &Nesting) -> Vec<(Nesting, i64)> {
    host.addable(&n.nests)
        .into_iter()
        .map(|m| {
            let mut v = n.nests.clone();
            v.push(m);
            normalize(v, 1)
        })
        .collect()
}

pub fn differential(host: &EdgeHost, x: &Chain) -> Chain {
    let mut out = Chain::new();
    for (n, c) in x {
        for (key, s) in differential_terms(host, n) {
            add_term(&mut out, key, c * &Q::from_int(s));
        }
    }
    out
}

pub fn basis_chain(n: &Nesting) -> Chain {
    Chain::from([(n.clone(), Q::one())])
}

/// The complex `C∗(γ)` with its basis per degree.
#[derive(Clone, Debug)]
pub struct FiberComplex {
    pub basis: BTreeMap<i64, Vec<Nesting>>,
    pub complex: ChainComplex,
}

pub fn build_complex(g: &ModularGraph) -> FiberComplex {
    build_on_host(&EdgeHost::of(g))
}

pub fn build_on_host(host: &EdgeHost) -> FiberComplex {
    let mut basis: BTreeMap<i64, Vec<Nesting>> = BTreeMap::new();
    for n in host.nestings() {
        basis.entry(-1 - n.len() as i64).or_default().push(n);
    }
    let index: HashMap<&Nesting, usize> = basis.values().flat_map(|v| v.iter().enumerate().map(|(i, n)| (n, i))).collect();
    let mut complex = ChainComplex::default();
    for (&k, b) in &basis {
        complex.dims.insert(k, b.len());
    }
    for (&k, b) in &basis {
        let rows = complex.dim(k - 1);
        if rows == 0 {
            continue;
        }
        let mut t = Vec::new();
        for (j, n) in b.iter().enumerate() {
            for (key, s) in differential_terms(host, n) {
                t.push((index[&key], j, Q::from_int(s)));
            }
        }
        complex.diff.insert(k, SparseMatrix::from_triplets(rows, b.len(), t));
    }
    FiberComplex { basis, complex }
}

/// Edges whose removal leaves the other edges connected.
pub fn admissible_edges(g: &ModularGraph) -> Vec<usize> {
    let host = EdgeHost::of(g);
    (0..host.ends.len()).filter(|&e| Retract::on_host(host.clone(), e).is_ok()).collect()
}

/// Preferred edge for the induction: one whose removal keeps the graph
/// connected, else one cutting off a lone vertex.
pub fn preferred_edge(g: &ModularGraph) -> Option<usize> {
    let ends = g.edge_endpoints();
    let host = EdgeHost::of(g);
    let ok = admissible_edges(g);
    ok.iter()
        .copied()
        .find(|&e| {
            let rest = host.universe & !(1u64 << e);
            let (a, b) = ends[e];
            let touched = host.closure(rest);
            touched >> a & 1 == 1 && touched >> b & 1 == 1
        })
        .or_else(|| ok.first().copied())
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub identity: String,
    pub basis_element: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RetractReport {
    pub edge: usize,
    pub d_squared: bool,
    pub pi_chain_map: bool,
    pub iota_chain_map: bool,
    pub pi_iota: bool,
    pub homotopy: bool,
    pub first_failure: Option<Failure>,
}

impl RetractReport {
    pub fn all_hold(&self) -> bool {
        self.d_squared && self.pi_chain_map && self.iota_chain_map && self.pi_iota && self.homotopy
    }
}

/// Check the five retract identities on every basis element.
pub fn verify_retract(g: &ModularGraph, e: usize) -> Result<RetractReport, FiberError> {
    let r = Retract::new(g, e)?;
    Ok(verify_with(&r, &|o| r.pi_order(o)))
}

/// As [`verify_retract`] with a replacement for `π` on ordered nestings.
pub fn verify_with(r: &Retract, pi: &dyn Fn(&[Nest]) -> Option<(Vec<Nest>, i64)>) -> RetractReport {
    let pi_chain = |x: &Chain| apply(x, |o| pi(o).into_iter().collect());
    let mut report = RetractReport {
        edge: r.e,
        d_squared: true,
        pi_chain_map: true,
        iota_chain_map: true,
        pi_iota: true,
        homotopy: true,
        first_failure: None,
    };
    let fail = |report: &mut RetractReport, which: &str, n: &Nesting| {
        match which {
            "d^2=0" => report.d_squared = false,
            "pi d=d pi" => report.pi_chain_map = false,
            "iota d=d iota" => report.iota_chain_map = false,
            "pi iota=id" => report.pi_iota = false,
            _ => report.homotopy = false,
        }
        if report.first_failure.is_none() {
            report.first_failure =
                Some(Failure { identity: which.to_string(), basis_element: n.nests.iter().map(|m| m.0).collect() });
        }
    };
    for n in r.host.nestings() {
        let x = basis_chain(&n);
        let dx = r.d(&x);
        if !r.d(&dx).is_empty() {
            fail(&mut report, "d^2=0", &n);
        }
        if pi_chain(&dx) != r.d_sub(&pi_chain(&x)) {
            fail(&mut report, "pi d=d pi", &n);
        }
        let mut lhs = r.d(&r.homotopy(&x));
        for (k, v) in r.homotopy(&dx) {
            add_term(&mut lhs, k, v);
        }
        let mut rhs = x.clone();
        for (k, v) in r.iota(&pi_chain(&x)) {
            add_term(&mut rhs, k, -v);
        }
        if lhs != rhs {
            fail(&mut report, "dH+Hd=id-iota pi", &n);
        }
    }
    for n in r.sub.nestings() {
        let x = basis_chain(&n);
        if r.d(&r.iota(&x)) != r.iota(&r.d_sub(&x)) {
            fail(&mut report, "iota d=d iota", &n);
        }
        if pi_chain(&r.iota(&x)) != x {
            fail(&mut report, "pi iota=id", &n);
        }
        if !r.d_sub(&r.d_sub(&x)).is_empty() {
            fail(&mut report, "d^2=0", &n);
        }
    }
    report
}

/// Outcome of [`verify_all`].
#[derive(Clone, Debug, Serialize)]
pub struct ExhaustiveReport {
    pub graphs: usize,
    pub retracts: usize,
    /// `(graph json, edge, report)` for every retract with a failing identity.
    pub failures: Vec<(String, usize, RetractReport)>,
    /// Graphs whose complex does not have homology `k` in degree `−|E|`.
    pub bad_homology: Vec<String>,
}

impl ExhaustiveReport {
    pub fn all_hold(&self) -> bool {
        self.failures.is_empty() && self.bad_homology.is_empty()
    }
}

/// Check every retract identity and the homology of `C∗(γ)` for every modular
/// graph with `1..=max_edges` edges, total genus `≤ max_genus` and at most
/// `max_legs` legs.
pub fn verify_all(max_edges: usize, max_genus: usize, max_legs: usize) -> Result<ExhaustiveReport, GraphError> {
    let mut graphs = Vec::new();
    for g in 0..=max_genus {
        for n in 0..=max_legs {
            if n + 2 * g < 3 {
                continue;
            }
            graphs.extend(enumerate_graphs(g, n, Some(max_edges))?.into_iter().filter(|c| c.num_edges() > 0));
        }
    }
    let per_graph: Vec<(usize, Vec<(String, usize, RetractReport)>, Option<String>)> = graphs
        .par_iter()
        .map(|c| {
            let g: &ModularGraph = c;
            let mut failures = Vec::new();
            let edges = admissible_edges(g);
            for &e in &edges {
                let r = verify_retract(g, e).expect("admissible");
                if !r.all_hold() {
                    failures.push((g.to_json(), e, r));
                }
            }
            let ne = g.num_edges() as i64;
            let bad = (homology_profile(g) != BTreeMap::from([(-ne, 1)])).then(|| g.to_json());
            (edges.len(), failures, bad)
        })
        .collect();
    let mut report = ExhaustiveReport { graphs: graphs.len(), retracts: 0, failures: Vec::new(), bad_homology: Vec::new() };
    for (k, f, b) in per_graph {
        report.retracts += k;
        report.failures.extend(f);
        report.bad_homology.extend(b);
    }
    Ok(report)
}

/// Betti numbers of `C∗(γ)` by degree (zeros omitted).
pub fn homology_profile(g: &ModularGraph) -> BTreeMap<i64, usize> {
    let fc = build_complex(g);
    betti_numbers(&fc.complex).into_iter().filter(|(_, b)| *b > 0).collect()
}

/// Sign of the shuffle placing the edges outside `n` (in `psi` order) before
/// those inside `n` (in `psi` order). `psi[k]` is the edge in position `k`.
pub fn kappa_sign(g: &ModularGraph, psi: &[usize], n: Nest) -> Result<i64, FiberError> {
    let host = EdgeHost::of(g);
    if !host.is_nest(n.0) {
        return Err(FiberError::NotANest(n.0));
    }
    let mut seen = vec![false; host.ends.len()];
    if psi.len() != host.ends.len() || psi.iter().any(|&x| x >= seen.len() || std::mem::replace(&mut seen[x], true)) {
        return Err(FiberError::BadEdgeOrder);
    }
    let outside = (0..psi.len()).filter(|&k| !n.contains_edge(psi[k]));
    let inside = (0..psi.len()).filter(|&k| n.contains_edge(psi[k]));
    let sigma: Vec<usize> = outside.chain(inside).collect();
    Ok(perm::sign(&sigma) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::families;

    #[test]
    fn one_and_two_edges() {
        let g = families::path(1);
        assert_eq!(homology_profile(&g), BTreeMap::from([(-1, 1)]));
        let g = families::path(2);
        let fc = build_complex(&g);
        assert_eq!(fc.complex.dim(-1), 1);
        assert_eq!(fc.complex.dim(-2), 2);
        let d = fc.complex.d(-1);
        assert_eq!(d.to_dense(), vec![vec![Q::one()], vec![Q::one()]]);
        assert_eq!(homology_profile(&g), BTreeMap::from([(-2, 1)]));
    }

    #[test]
    fn two_edge_retract_values() {
        let g = families::path(2);
        let r = Retract::new(&g, 1).unwrap();
        let empty = Nesting::default();
        let e1 = Nesting::new(vec![Nest(0b01)]);
        let e2 = Nesting::new(vec![Nest(0b10)]);
        assert_eq!(r.iota(&basis_chain(&empty)), basis_chain(&e1));
        assert_eq!(r.pi(&basis_chain(&e1)), basis_chain(&empty));
        assert_eq!(r.pi(&basis_chain(&e2)), Chain::from([(empty.clone(), -Q::one())]));
        assert!(r.pi(&basis_chain(&empty)).is_empty());
        assert!(r.homotopy(&basis_chain(&e1)).is_empty());
        assert!(verify_retract(&g, 1).unwrap().all_hold());
    }

    #[test]
    fn retract_identities_on_families() {
        for g in [families::k4(), families::theta(), families::cycle(4), families::path(4), families::bouquet(3)] {
            for e in admissible_edges(&g) {
                let rep = verify_retract(&g, e).unwrap();
                assert!(rep.all_hold(), "{:?}", rep);
            }
            let ne = g.num_edges() as i64;
            assert_eq!(homology_profile(&g), BTreeMap::from([(-ne, 1)]));
        }
    }

    #[test]
    fn cases_predict_vanishing() {
        for g in [families::k4(), families::cycle(5), families::path(4)] {
            for e in admissible_edges(&g) {
                let r = Retract::new(&g, e).unwrap();
                for n in r.host.nestings() {
                    let c = r.classify(&n);
                    assert_eq!(c.pi_nonzero(), r.pi_order(&n.nests).is_some(), "{c:?}");
                    assert_eq!(c.homotopy_nonzero(), !r.homotopy_order(&n.nests).is_empty(), "{c:?}");
                }
            }
        }
    }

    #[test]
    fn corrupted_sign_is_reported() {
        let g = families::cycle(4);
        let r = Retract::new(&g, 1).unwrap();
        let bad = |o: &[Nest]| {
            r.pi_order(o).map(|(v, s)| if r.classify(&Nesting::new(o.to_vec())) == Case::C3a { (v, -s) } else { (v, s) })
        };
        let rep = verify_with(&r, &bad);
        assert!(!rep.all_hold());
        assert!(rep.d_squared && rep.iota_chain_map);
        assert!(rep.first_failure.is_some());
    }

    #[test]
    fn kappa() {
        let g = families::path(3);
        assert_eq!(kappa_sign(&g, &[0, 1, 2], Nest(0b001)).unwrap(), 1);
        assert_eq!(kappa_sign(&g, &[0, 1, 2], Nest(0b010)).unwrap(), -1);
        assert_eq!(kappa_sign(&g, &[0, 1, 2], Nest(0b110)).unwrap(), 1);
        assert!(kappa_sign(&g, &[0, 1, 2], Nest(0b101)).is_err());
    }

    #[test]
    fn transposition_flips_sign() {
        let a = OrderedNesting::from_order(&[Nest(1), Nest(4)]);
        let b = OrderedNesting::from_order(&[Nest(4), Nest(1)]);
        assert_eq!(a.nesting, b.nesting);
        assert_eq!(a.sign, -b.sign);
    }
}
