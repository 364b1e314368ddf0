//! The cyclic Lie operad as trivalent trees with oriented vertices modulo
//! antisymmetry and Jacobi.
//!
//! Rooting a tree with `n` leaves at leaf 2 turns it into a bracket expression in
//! the letters `1, 3, …, n`. Such an expression is rewritten into left-normed
//! brackets `[[…[x₁, x_a], x_b]…]` by antisymmetry (to move `x₁` left) and the
//! Jacobi identity `[L, [P, Q]] = [[L, P], Q] − [[L, Q], P]`. Each rewrite
//! strictly shrinks the right argument, so this terminates; the left-normed
//! brackets starting with `x₁` are a basis (the caterpillars with leaves 1 and 2
//! at the ends of the spine), of size `(n−2)!`.

use std::collections::{BTreeMap, HashMap};

use super::{Bounds, CoeffError, ColorData, ModularOperadData, Parity};
use crate::homalg::{SVec, SparseMatrix, Q};
use crate::perm;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bracket {
    Leaf(usize),
    Node(Box<Bracket>, Box<Bracket>),
}

impl Bracket {
    pub fn node(a: Bracket, b: Bracket) -> Bracket {
        Bracket::Node(Box::new(a), Box::new(b))
    }

    /// `[[…[x_{w₀}, x_{w₁}]…], x_{w_k}]`.
    pub fn left_normed(word: &[usize]) -> Bracket {
        let mut b = Bracket::Leaf(word[0]);
        for &a in &word[1..] {
            b = Bracket::node(b, Bracket::Leaf(a));
        }
        b
    }

    pub fn contains(&self, leaf: usize) -> bool {
        match self {
            Bracket::Leaf(k) => *k == leaf,
            Bracket::Node(a, b) => a.contains(leaf) || b.contains(leaf),
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        match self {
            Bracket::Leaf(k) => vec![*k],
            Bracket::Node(a, b) => {
                let mut v = a.leaves();
                v.extend(b.leaves());
                v
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ref {
    Leaf(usize),
    Node(usize),
}

/// An unrooted trivalent tree; each internal vertex lists its three neighbours in
/// cyclic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieTree {
    leaves: usize,
    nodes: Vec<[Ref; 3]>,
}

impl LieTree {
    /// The tree of a bracket expression with one extra leaf `root` attached to the
    /// outermost bracket. A node `[a, b]` with parent `p` has cyclic order `(p, a, b)`.
    pub fn from_rooted(root: usize, b: &Bracket) -> LieTree {
        let leaves = b.leaves().len() + 1;
        let mut t = LieTree { leaves, nodes: Vec::new() };
        t.build(Ref::Leaf(root), b);
        t
    }

    fn build(&mut self, parent: Ref, b: &Bracket) -> Ref {
        match b {
            Bracket::Leaf(k) => Ref::Leaf(*k),
            Bracket::Node(x, y) => {
                let id = self.nodes.len();
                self.nodes.push([parent, Ref::Leaf(0), Ref::Leaf(0)]);
                let rx = self.build(Ref::Node(id), x);
                let ry = self.build(Ref::Node(id), y);
                self.nodes[id][1] = rx;
                self.nodes[id][2] = ry;
                Ref::Node(id)
            }
        }
    }

    /// Basis caterpillar: `x₂` paired with `[[x₁, x_{w₀}], …]`.
    pub fn caterpillar(word: &[usize]) -> LieTree {
        let mut full = vec![1];
        full.extend_from_slice(word);
        LieTree::from_rooted(2, &Bracket::left_normed(&full))
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves
    }

    /// Relabel leaf `k` as `σ(k−1)+1`.
    pub fn relabel(&self, sigma: &[usize]) -> LieTree {
        let map = |r: Ref| match r {
            Ref::Leaf(k) => Ref::Leaf(sigma[k - 1] + 1),
            x => x,
        };
        LieTree { leaves: self.leaves, nodes: self.nodes.iter().map(|s| [map(s[0]), map(s[1]), map(s[2])]).collect() }
    }

    fn leaf_slot(&self, leaf: usize) -> (usize, usize) {
        for (i, s) in self.nodes.iter().enumerate() {
            for (j, r) in s.iter().enumerate() {
                if *r == Ref::Leaf(leaf) {
                    return (i, j);
                }
            }
        }
        panic!("leaf {leaf} not in tree")
    }

    /// Glue leaf `n₁` of `self` to leaf `1` of `other`. Leaves `1..n₁−1` keep
    /// their labels, leaf `k ≥ 2` of `other` becomes `n₁ + k − 2`.
    pub fn graft(&self, other: &LieTree) -> LieTree {
        let n1 = self.leaves;
        let off = self.nodes.len();
        let (u1, s1) = self.leaf_slot(n1);
        let (u2, s2) = other.leaf_slot(1);
        let mut nodes = self.nodes.clone();
        for s in &other.nodes {
            nodes.push(s.map(|r| match r {
                Ref::Leaf(k) => Ref::Leaf(if k == 1 { 0 } else { n1 + k - 2 }),
                Ref::Node(i) => Ref::Node(i + off),
            }));
        }
        nodes[u1][s1] = Ref::Node(u2 + off);
        nodes[u2 + off][s2] = Ref::Node(u1);
        LieTree { leaves: n1 + other.leaves - 2, nodes }
    }

    /// The bracket expression obtained by rooting at leaf `r`.
    pub fn rooted_at(&self, r: usize) -> Bracket {
        let (u, s) = self.leaf_slot(r);
        self.expr(u, s)
    }

    fn expr(&self, u: usize, from: usize) -> Bracket {
        let sub = |slot: usize| match self.nodes[u][slot] {
            Ref::Leaf(k) => Bracket::Leaf(k),
            Ref::Node(w) => {
                let back = self.nodes[w].iter().position(|&x| x == Ref::Node(u)).expect("tree edge is symmetric");
                self.expr(w, back)
            }
        };
        Bracket::node(sub((from + 1) % 3), sub((from + 2) % 3))
    }
}

/// Rewrite a multilinear bracket containing `x₁` into left-normed brackets
/// `[x₁, w…]`; keys are the words `w`.
fn normalize(b: &Bracket) -> BTreeMap<Vec<usize>, i64> {
    match b {
        Bracket::Leaf(1) => BTreeMap::from([(Vec::new(), 1)]),
        Bracket::Leaf(k) => panic!("bracket without x1 (leaf {k})"),
        Bracket::Node(p, q) => {
            if q.contains(1) {
                return normalize(&Bracket::Node(q.clone(), p.clone())).into_iter().map(|(w, c)| (w, -c)).collect();
            }
            let mut out = BTreeMap::new();
            for (w, c) in normalize(p) {
                for (w2, c2) in right_bracket(&w, q) {
                    *out.entry(w2).or_insert(0) += c * c2;
                }
            }
            out.retain(|_, c| *c != 0);
            out
        }
    }
}

/// `[L_w, q]` for a left-normed `L_w` and a bracket `q` without `x₁`.
fn right_bracket(w: &[usize], q: &Bracket) -> BTreeMap<Vec<usize>, i64> {
    match q {
        Bracket::Leaf(a) => {
            let mut v = w.to_vec();
            v.push(*a);
            BTreeMap::from([(v, 1)])
        }
        Bracket::Node(q1, q2) => {
            let mut out = BTreeMap::new();
            for (x, c) in right_bracket(w, q1) {
                for (y, d) in right_bracket(&x, q2) {
                    *out.entry(y).or_insert(0) += c * d;
                }
            }
            for (x, c) in right_bracket(w, q2) {
                for (y, d) in right_bracket(&x, q1) {
                    *out.entry(y).or_insert(0) -= c * d;
                }
            }
            out.retain(|_, c| *c != 0);
            out
        }
    }
}

/// Lexicographic rank of a word in the letters `3..=n` among all such orderings.
fn word_index(w: &[usize]) -> usize {
    let m = w.len();
    let mut idx = 0u64;
    for i in 0..m {
        let smaller = w[i + 1..].iter().filter(|&&x| x < w[i]).count() as u64;
        idx += smaller * perm::factorial(m - 1 - i);
    }
    idx as usize
}

/// Basis words in index order.
fn basis_words(n: usize) -> Vec<Vec<usize>> {
    perm::all_perms(n - 2).into_iter().map(|p| p.into_iter().map(|x| x + 3).collect()).collect()
}

/// Coordinates of a tree in the caterpillar basis.
pub fn lie_coordinates(t: &LieTree) -> SVec {
    let mut v: Vec<(usize, Q)> =
        normalize(&t.rooted_at(2)).into_iter().map(|(w, c)| (word_index(&w), Q::from_int(c))).collect();
    v.sort_by_key(|e| e.0);
    v
}

/// `(n−2)!`, counted directly.
pub fn caterpillar_count(n: usize) -> usize {
    basis_words(n).len()
}

/// Cyclic Lie in arities `3..=max_legs`, genus 0, extended by zero.
pub fn lie_system(max_legs: usize) -> Result<ModularOperadData, CoeffError> {
    if max_legs < 3 {
        return Err(CoeffError::ArityTooSmall(max_legs));
    }
    let mut trees: HashMap<usize, Vec<LieTree>> = HashMap::new();
    let mut colors = BTreeMap::new();
    for n in 3..=max_legs {
        let basis: Vec<LieTree> = basis_words(n).iter().map(|w| LieTree::caterpillar(w)).collect();
        let d = basis.len();
        let generators = (0..n - 1)
            .map(|i| {
                let mut s: Vec<usize> = (0..n).collect();
                s.swap(i, i + 1);
                let cols: Vec<SVec> = basis.iter().map(|t| lie_coordinates(&t.relabel(&s))).collect();
                SparseMatrix::from_columns(d, &cols)
            })
            .collect();
        colors.insert((0, n), ColorData { degrees: vec![0; d], generators });
        trees.insert(n, basis);
    }
    let mut compose = BTreeMap::new();
    for n1 in 3..=max_legs {
        for n2 in 3..=max_legs + 2 - n1 {
            let out = n1 + n2 - 2;
            let (b1, b2) = (&trees[&n1], &trees[&n2]);
            let cols: Vec<SVec> =
                b1.iter().flat_map(|x| b2.iter().map(move |y| lie_coordinates(&x.graft(y)))).collect();
            compose.insert(((0, n1), (0, n2)), SparseMatrix::from_columns(trees[&out].len(), &cols));
        }
    }
    Ok(ModularOperadData {
        name: "lie".into(),
        parity: Parity::Even,
        bounds: Bounds { genus: usize::MAX, weight: max_legs },
        colors,
        compose,
        contract: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Coefficient of each associative word `x₁w` in the expansion of `b`.
    fn word_oracle(b: &Bracket) -> BTreeMap<Vec<usize>, i64> {
        fn expand(b: &Bracket) -> BTreeMap<Vec<usize>, i64> {
            match b {
                Bracket::Leaf(k) => BTreeMap::from([(vec![*k], 1)]),
                Bracket::Node(p, q) => {
                    let (ep, eq) = (expand(p), expand(q));
                    let mut out = BTreeMap::new();
                    for (u, c) in &ep {
                        for (v, d) in &eq {
                            let mut uv = u.clone();
                            uv.extend(v);
                            *out.entry(uv).or_insert(0) += c * d;
                            let mut vu = v.clone();
                            vu.extend(u);
                            *out.entry(vu).or_insert(0) -= c * d;
                        }
                    }
                    out
                }
            }
        }
        expand(b).into_iter().filter(|(w, c)| w[0] == 1 && *c != 0).map(|(w, c)| (w[1..].to_vec(), c)).collect()
    }

    /// Every bracket expression using each letter once.
    fn all_brackets(letters: &[usize]) -> Vec<Bracket> {
        if letters.len() == 1 {
            return vec![Bracket::Leaf(letters[0])];
        }
        let mut out = Vec::new();
        let m = letters.len();
        for mask in 1..(1u32 << m) - 1 {
            let (l, r): (Vec<usize>, Vec<usize>) = {
                let mut l = Vec::new();
                let mut r = Vec::new();
                for (i, &x) in letters.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        l.push(x)
                    } else {
                        r.push(x)
                    }
                }
                (l, r)
            };
            for a in all_brackets(&l) {
                for b in all_brackets(&r) {
                    out.push(Bracket::node(a.clone(), b));
                }
            }
        }
        out
    }

    #[test]
    fn rewriting_matches_word_oracle() {
        for n in 3..=6 {
            let letters: Vec<usize> = std::iter::once(1).chain(3..=n).collect();
            for b in all_brackets(&letters) {
                assert_eq!(normalize(&b), word_oracle(&b), "{b:?}");
            }
        }
    }

    #[test]
    fn dimensions_are_factorials() {
        for n in 3..=7 {
            assert_eq!(caterpillar_count(n) as u64, perm::factorial(n - 2));
        }
        let l = lie_system(7).unwrap();
        for n in 3..=7 {
            assert_eq!(l.dim((0, n)) as u64, perm::factorial(n - 2));
        }
        assert_eq!(lie_system(2).unwrap_err(), CoeffError::ArityTooSmall(2));
    }

    #[test]
    fn rewriting_rank_equals_dimension() {
        // the normal forms of all trees span a space of dimension (n−2)!
        for n in 3..=6 {
            let letters: Vec<usize> = std::iter::once(1).chain(3..=n).collect();
            let cols: Vec<SVec> =
                all_brackets(&letters).iter().map(|b| lie_coordinates(&LieTree::from_rooted(2, b))).collect();
            let m = SparseMatrix::from_columns(caterpillar_count(n), &cols);
            assert_eq!(m.rank(), caterpillar_count(n));
        }
    }

    #[test]
    fn caterpillars_are_a_basis() {
        for n in 3..=6 {
            for (i, w) in basis_words(n).iter().enumerate() {
                assert_eq!(lie_coordinates(&LieTree::caterpillar(w)), vec![(i, Q::one())]);
            }
        }
    }

    #[test]
    fn antisymmetry_and_cyclic_invariance() {
        // rerooting at another leaf and reading back gives the same element
        let t = LieTree::caterpillar(&[4, 3, 5]);
        let b = t.rooted_at(4);
        let t2 = LieTree::from_rooted(4, &b);
        assert_eq!(lie_coordinates(&t2), lie_coordinates(&t));
        // swapping the two children of the top bracket negates
        if let Bracket::Node(x, y) = t.rooted_at(2) {
            let swapped = LieTree::from_rooted(2, &Bracket::Node(y, x));
            let neg: SVec = lie_coordinates(&t).into_iter().map(|(i, c)| (i, -c)).collect();
            assert_eq!(lie_coordinates(&swapped), neg);
        }
    }

    #[test]
    fn coxeter_and_determinant() {
        let l = lie_system(6).unwrap();
        for n in 3..=6 {
            let gens = &l.colors[&(0, n)].generators;
            let d = l.dim((0, n));
            for (i, s) in gens.iter().enumerate() {
                assert_eq!(s.mul(s), SparseMatrix::identity(d));
                if i + 1 < gens.len() {
                    let t = s.mul(&gens[i + 1]);
                    assert_eq!(t.mul(&t).mul(&t), SparseMatrix::identity(d));
                }
                let det = crate::homalg::SparseMatrix::determinant(s);
                assert!(det == Q::one() || det == -Q::one());
            }
        }
    }

    #[test]
    fn three_leg_action_is_sign() {
        // the unique tree with three leaves is odd under transpositions
        let l = lie_system(3).unwrap();
        for s in &l.colors[&(0, 3)].generators {
            assert_eq!(*s, SparseMatrix::identity(1).scale(&-Q::one()));
        }
    }
}
