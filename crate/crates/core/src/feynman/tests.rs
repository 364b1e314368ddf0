use std::collections::BTreeMap;

use super::*;
use crate::coefficients::{com_system, lie_system, verify_relations, Bounds, ComKind};
use crate::graphs::{enumerate_graphs, families};
use crate::homalg::{betti_numbers, character, decompose_character, homology};
use crate::perm;

fn com(kind: ComKind, g: usize, n: usize) -> ModularOperadData {
    com_system(kind, Bounds::for_type(g, n))
}

fn nonzero_betti(f: &FeynmanComplex) -> BTreeMap<i64, usize> {
    betti_numbers(&f.complex).into_iter().filter(|&(_, b)| b > 0).collect()
}

#[test]
fn genus_one_one_leg() {
    let f = build_ft(&com(ComKind::Envelope, 1, 1), 1, 1).unwrap();
    // corolla in degree 0, the loop graph in degree −1
    assert_eq!(f.complex.dims, BTreeMap::from([(-1, 1), (0, 1)]));
    let d = f.complex.d(0);
    assert_eq!(d.nnz(), 1);
    assert!(d.get(0, 0) == Q::one() || d.get(0, 0) == -Q::one());
    assert!(nonzero_betti(&f).is_empty());
}

#[test]
fn parallel_edges_die_and_k4_survives() {
    let c = com(ComKind::Envelope, 3, 0);
    let theta = canonicalize(&families::theta().relabel_legs(&[])).0;
    assert!(coinvariant_basis(&c, &theta).is_empty());
    let k4 = canonicalize(&families::k4()).0;
    let b = coinvariant_basis(&c, &k4);
    assert_eq!(b.len(), 1);
    assert_eq!(b[0].degree, -6);
    // a loop at a genus-0 vertex: the flag swap fixes the edge set
    let tadpole = canonicalize(&families::bouquet(1)).0;
    assert_eq!(coinvariant_basis(&com(ComKind::Envelope, 1, 1), &tadpole).len(), 1);
}

#[test]
fn genus_three_commutative() {
    let f = build_ft(&com(ComKind::Envelope, 3, 0), 3, 0).unwrap();
    assert_eq!(nonzero_betti(&f), BTreeMap::from([(-6, 1)]));
}

#[test]
fn genus_one_commutative() {
    for (n, b) in [(3, 1), (4, 3), (5, 12)] {
        let f = build_ft(&com(ComKind::Envelope, 1, n), 1, n).unwrap();
        assert_eq!(nonzero_betti(&f), BTreeMap::from([(-(n as i64), b)]), "n = {n}");
    }
}

#[test]
fn genus_zero_extension() {
    for n in 4..=6usize {
        let f = build_ft(&com(ComKind::Extension, 0, n), 0, n).unwrap();
        let expect = perm::factorial(n - 2) as usize;
        assert_eq!(nonzero_betti(&f), BTreeMap::from([(3 - n as i64, expect)]));
    }
}

#[test]
fn genus_one_lie() {
    let l = lie_system(7).unwrap().oddify();
    for (n, total, betti) in [(3, 18, vec![1, 1]), (4, 174, vec![1, 3])] {
        let f = build_ft(&l, 1, n).unwrap();
        assert_eq!(f.complex.dims.values().sum::<usize>(), total);
        assert_eq!(nonzero_betti(&f).into_values().collect::<Vec<_>>(), betti);
    }
}

#[test]
fn lie_character() {
    let l = lie_system(6).unwrap().oddify();
    let f = build_ft(&l, 1, 4).unwrap();
    let acts = f.sn_actions().unwrap();
    let h = homology(&f.complex, None, &acts).unwrap();
    let (&top, _) = h.betti.iter().find(|(_, &b)| b == 3).unwrap();
    let chi = character(&h.action[&top], 4, 3);
    assert_eq!(decompose_character(4, &chi).unwrap(), BTreeMap::from([(vec![2, 1, 1], 1)]));
}

#[test]
fn action_commutes_with_d() {
    let cases = [
        (com(ComKind::Envelope, 1, 4), 1, 4),
        (com(ComKind::Extension, 0, 5), 0, 5),
        (lie_system(6).unwrap().oddify(), 1, 4),
    ];
    for (data, g, n) in cases {
        let f = build_ft(&data, g, n).unwrap();
        let acts = f.sn_actions().unwrap();
        for (&k, mats) in &acts {
            let id = SparseMatrix::identity(f.complex.dim(k));
            for (i, s) in mats.iter().enumerate() {
                assert_eq!(s.mul(s), id);
                if let Some(t) = mats.get(i + 1) {
                    let st = s.mul(t);
                    assert_eq!(st.mul(&st).mul(&st), id);
                }
                let d = f.complex.d(k);
                if let Some(below) = acts.get(&(k - 1)) {
                    assert_eq!(d.mul(s), below[i].mul(&d), "{} degree {k} s_{}", data.name, i + 1);
                }
            }
        }
    }
}

#[test]
fn euler_matches_homology() {
    for (data, g, n) in [(com(ComKind::Envelope, 2, 1), 2, 1), (lie_system(6).unwrap().oddify(), 1, 4)] {
        let f = build_ft(&data, g, n).unwrap();
        let chi: i64 = betti_numbers(&f.complex).iter().map(|(&k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        assert_eq!(f.euler_characteristic().chi, chi);
    }
}

/// Dimension of the coinvariants as the average trace of the group action.
fn trace_dimension(data: &ModularOperadData, cg: &CanonicalGraph) -> usize {
    let nv = cg.num_vertices();
    let dims: Vec<usize> = (0..nv).map(|v| data.dim(vertex_color(cg, v))).collect();
    if dims.contains(&0) {
        return 0;
    }
    let mut keys: Vec<Vec<usize>> = vec![Vec::new()];
    for &d in &dims {
        keys = keys.into_iter().flat_map(|k| (0..d).map(move |i| [k.clone(), vec![i]].concat())).collect();
    }
    let auts = cg.aut_elements();
    let mut total = Q::zero();
    for s in &auts {
        for k in &keys {
            let mut t = Tensor::new();
            transport_into(&mut t, data, cg, cg, s, k, &Q::one());
            if let Some(v) = t.get(k) {
                total += v.clone();
            }
        }
    }
    let d = &total / &Q::from_int(auts.len() as i64);
    d.to_i64().expect("integral average") as usize
}

#[test]
fn coinvariant_dimension_is_average_trace() {
    let l = lie_system(6).unwrap().oddify();
    for cg in enumerate_graphs(1, 4, None).unwrap() {
        assert_eq!(coinvariant_basis(&l, &cg).len(), trace_dimension(&l, &cg), "{}", cg.to_json());
    }
    let c = com(ComKind::Envelope, 2, 2);
    for cg in enumerate_graphs(2, 2, None).unwrap() {
        assert_eq!(coinvariant_basis(&c, &cg).len(), trace_dimension(&c, &cg));
    }
}

/// For commutative coefficients a graph survives iff no automorphism permutes
/// its edges oddly.
#[test]
fn commutative_dimensions_match_sign_filter() {
    for (g, n) in [(1, 3), (2, 1), (3, 0), (1, 5)] {
        let c = com(ComKind::Envelope, g, n);
        let f = build_ft(&c, g, n).unwrap();
        let mut naive: BTreeMap<i64, usize> = BTreeMap::new();
        for cg in enumerate_graphs(g, n, None).unwrap() {
            let edges = cg.edges();
            let odd = cg.aut_elements().iter().any(|s| {
                let p: Vec<usize> = edges
                    .iter()
                    .map(|&(a, _)| {
                        let x = s[a].min(cg.involution()[s[a]]);
                        edges.iter().position(|e| e.0 == x).unwrap()
                    })
                    .collect();
                perm::sign(&p) < 0
            });
            if !odd {
                *naive.entry(-(edges.len() as i64)).or_default() += 1;
            }
        }
        assert_eq!(f.complex.dims, naive, "({g},{n})");
    }
}

#[test]
fn support_and_parity_errors() {
    let c = com(ComKind::Envelope, 1, 3);
    assert!(matches!(build_ft(&c, 2, 1), Err(FeynmanError::SupportTooSmall { .. })));
    let mut bad = lie_system(5).unwrap();
    for d in bad.colors.values_mut() {
        for x in d.degrees.iter_mut() {
            *x += 1;
        }
    }
    assert!(matches!(build_ft(&bad, 0, 4), Err(FeynmanError::ParityMismatch { .. })));
}

#[test]
fn contraction_complex_is_dual() {
    let f = build_ft(&com(ComKind::Envelope, 1, 4), 1, 4).unwrap();
    let c = f.contraction_complex();
    c.check_d_squared().unwrap();
    let b: BTreeMap<i64, usize> = betti_numbers(&c).into_iter().filter(|&(_, x)| x > 0).map(|(k, x)| (-k, x)).collect();
    assert_eq!(b, nonzero_betti(&f));
}

#[test]
fn dump_is_deterministic() {
    let c = com(ComKind::Envelope, 1, 3);
    let a = build_ft(&c, 1, 3).unwrap().dump();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| build_ft(&c, 1, 3).unwrap().dump());
    assert_eq!(a, b);
    assert!(a.contains("\"entries\""));
}

#[test]
fn induced_structure_on_lie_graph_homology() {
    let l = lie_system(5).unwrap().oddify();
    let ind = induced_modular_structure(&l, Bounds { genus: 1, weight: 5 }).unwrap();
    let dims: BTreeMap<Color, usize> = ind.data.colors.iter().map(|(&c, d)| (c, d.dim())).collect();
    assert_eq!(dims[&(0, 5)], 1);
    assert_eq!(dims[&(1, 3)], 2);
    assert_eq!(ind.data.colors[&(1, 3)].degrees, vec![0, 2]);
    let r = verify_relations(&ind.data, 5, 1);
    assert!(r.all_pass(), "{r:?}");
    assert!(ind.data.compose.values().any(|m| !m.is_zero()));
    assert!(ind.data.contract.values().any(|m| !m.is_zero()));
}

#[test]
fn genus_zero_commutative_homology_is_lie() {
    // the genus-zero part of H(FT(ι_*Com)) has dimension (n−2)! in arity n
    let c = com(ComKind::Envelope, 0, 6);
    let ind = induced_modular_structure(&c, Bounds { genus: 0, weight: 6 }).unwrap();
    for n in 3..=6usize {
        assert_eq!(ind.data.dim((0, n)), perm::factorial(n - 2) as usize);
    }
    let r = verify_relations(&ind.data, 6, 1);
    assert!(r.all_pass(), "{r:?}");
}
