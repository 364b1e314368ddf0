//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

mod common;

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use modgraph::coefficients::{
    caterpillar_count, com_system, lie_system, verify_graph_relations, verify_relations, Bounds, ComKind, ModularOperadData,
};
use modgraph::feynman::{build_ft, induced_modular_structure, FeynmanComplex};
use modgraph::fiber_complex::verify_all;
use modgraph::graphs::families;
use modgraph::homalg::{character, decompose_character, homology, SparseMatrix};
use modgraph::nestings::verify_polytope;
use modgraph::perm::factorial;
use modgraph::spectral::{genus_bottom_row, internal_pages};

type Check = Result<String, String>;

/// Consistency findings over every complex built by the suite.
#[derive(Default)]
struct Ledger {
    complexes: usize,
    matrices: usize,
    problems: Vec<String>,
}

thread_local! {
    static LEDGER: RefCell<Ledger> = RefCell::new(Ledger::default());
}

fn nonzero(b: &BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    b.iter().filter(|(_, &v)| v > 0).map(|(&k, &v)| (k, v)).collect()
}

fn euler(b: &BTreeMap<i64, usize>) -> i64 {
    b.iter().map(|(&k, &v)| if k.rem_euclid(2) == 0 { v as i64 } else { -(v as i64) }).sum()
}

/// Betti numbers from exact ranks, recording the χ and modular-rank checks.
fn betti(f: &FeynmanComplex) -> BTreeMap<i64, usize> {
    let exact = f.complex.ranks(true);
    let modular = f.complex.ranks(false);
    let b = f.complex.betti_from_ranks(&exact);
    LEDGER.with(|l| {
        let mut l = l.borrow_mut();
        l.complexes += 1;
        l.matrices += exact.len();
        let what = format!("{} ({},{})", f.system, f.g, f.n);
        for (k, r) in &exact {
            if modular[k] != *r {
                l.problems.push(format!("{what}: modular rank {} vs exact {r} out of degree {k}", modular[k]));
            }
        }
        if euler(&b) != f.complex.euler_characteristic() {
            l.problems.push(format!("{what}: χ(complex) {} ≠ χ(homology) {}", f.complex.euler_characteristic(), euler(&b)));
        }
    });
    nonzero(&b)
}

fn ft(data: &ModularOperadData, g: usize, n: usize) -> Result<FeynmanComplex, String> {
    build_ft(data, g, n).map_err(|e| e.to_string())
}

fn com(kind: ComKind, g: usize, n: usize) -> ModularOperadData {
    com_system(kind, Bounds::for_type(g, n))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn genus_three() -> Check {
    let b = betti(&ft(&com(ComKind::Envelope, 3, 0), 3, 0)?);
    ensure(b == BTreeMap::from([(-6, 1)]), || format!("betti {b:?}"))?;
    Ok(format!("betti {b:?}"))
}

fn genus_one_commutative() -> Check {
    let mut seen = Vec::new();
    for n in 3..=6usize {
        let b = betti(&ft(&com(ComKind::Envelope, 1, n), 1, n)?);
        let want = BTreeMap::from([(-(n as i64), factorial(n - 1) as usize / 2)]);
        ensure(b == want, || format!("(1,{n}): betti {b:?}, expected {want:?}"))?;
        seen.push(format!("n={n}: {}", want.values().next().unwrap()));
    }
    Ok(seen.join(", "))
}

fn genus_zero_hairy() -> Check {
    let mut seen = Vec::new();
    for n in 4..=7usize {
        let b = betti(&ft(&com(ComKind::Extension, 0, n), 0, n)?);
        let oracle = caterpillar_count(n);
        let rank = lie_system(n).map_err(|e| e.to_string())?.dim((0, n));
        ensure(oracle == factorial(n - 2) as usize && rank == oracle, || format!("(0,{n}): oracle {oracle}, rank {rank}"))?;
        let want = BTreeMap::from([(3 - n as i64, oracle)]);
        ensure(b == want, || format!("(0,{n}): betti {b:?}, expected {want:?}"))?;
        seen.push(format!("n={n}: {oracle}"));
    }
    Ok(seen.join(", "))
}

fn binomial(n: usize, k: usize) -> usize {
    (factorial(n) / (factorial(k) * factorial(n - k))) as usize
}

fn genus_one_lie() -> Check {
    let lie = lie_system(7).map_err(|e| e.to_string())?.oddify();
    let mut seen = Vec::new();
    for n in 3..=5usize {
        let f = ft(&lie, 1, n)?;
        let b = betti(&f);
        let mut got: Vec<usize> = b.values().copied().collect();
        let mut want: Vec<usize> = (0..n).step_by(2).map(|i| binomial(n - 1, i)).collect();
        got.sort_unstable();
        want.sort_unstable();
        ensure(got == want, || format!("(1,{n}): betti {b:?}, expected multiset {want:?}"))?;
        seen.push(format!("n={n}: {got:?}"));
    }
    let f = ft(&lie, 1, 4)?;
    let acts = f.sn_actions().map_err(|e| e.to_string())?;
    let h = homology(&f.complex, None, &acts).map_err(|e| e.to_string())?;
    let (&k, _) = h.betti.iter().find(|(_, &b)| b == 3).ok_or("no 3-dimensional group at (1,4)")?;
    let dec = decompose_character(4, &character(&h.action[&k], 4, 3)).map_err(|e| e.to_string())?;
    let dec = nonzero_u64(&dec);
    ensure(dec == BTreeMap::from([(vec![2, 1, 1], 1)]), || format!("(1,4) character decomposes as {dec:?}"))?;
    Ok(format!("{}; (1,4) degree {k} is V(2,1,1)", seen.join(", ")))
}

fn nonzero_u64(m: &BTreeMap<Vec<usize>, u64>) -> BTreeMap<Vec<usize>, u64> {
    m.iter().filter(|(_, &v)| v > 0).map(|(k, &v)| (k.clone(), v)).collect()
}

fn koszul_retract() -> Check {
    let r = verify_all(4, 2, 3).map_err(|e| e.to_string())?;
    ensure(r.all_hold(), || {
        format!("{} failing retracts, {} graphs with wrong homology; first {:?}", r.failures.len(), r.bad_homology.len(), r.failures.first())
    })?;
    for (name, res) in common::figures::all() {
        res.map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} graphs, {} retracts, figures pi1-pi5 reproduced", r.graphs, r.retracts))
}

fn catalan(m: usize) -> usize {
    binomial(2 * m, m) / (m + 1)
}

fn polytopes() -> Check {
    let mut cases: Vec<(String, Option<usize>)> = Vec::new();
    cases.extend((2..=4).map(|k| (format!("bouquet:{k}"), Some(factorial(k) as usize))));
    cases.extend((2..=5).map(|m| (format!("path:{m}"), Some(catalan(m)))));
    cases.extend((3..=5).map(|m| (format!("cycle:{m}"), Some(binomial(2 * m - 2, m - 1)))));
    for (name, full) in &cases {
        let g = families::by_name(name).map_err(|e| e.to_string())?;
        let r = verify_polytope(&g);
        ensure(r.isomorphic && r.nesting_f_vector == r.tubing_f_vector, || format!("{name}: posets differ"))?;
        ensure(r.euler_characteristic == 1, || format!("{name}: alternating f-vector sum {}", r.euler_characteristic))?;
        if let Some(f) = full {
            ensure(r.full_nestings == *f, || format!("{name}: {} full nestings, expected {f}", r.full_nestings))?;
        }
    }
    Ok(format!("{} graphs", cases.len()))
}

fn relations() -> Check {
    let g = verify_graph_relations(7, 1000);
    ensure(g.checked == 1000 && g.all_pass(), || format!("graph relations: {} checked, failures {:?}", g.checked, g.failures.first()))?;
    let lie = lie_system(8).map_err(|e| e.to_string())?;
    let systems = [
        com_system(ComKind::Envelope, Bounds { genus: 2, weight: 8 }),
        com_system(ComKind::Extension, Bounds { genus: 2, weight: 8 }),
        lie.oddify(),
        lie,
    ];
    let mut total = 0;
    for s in &systems {
        let r = verify_relations(s, 7, 2);
        if let Some(c) = r.checks.iter().find(|c| c.violation.is_some()) {
            return Err(format!("{}: {} fails at {}", s.name, c.family, c.violation.as_deref().unwrap_or("")));
        }
        total += r.checks.iter().map(|c| c.checked).sum::<usize>();
    }
    Ok(format!("1000 gluing instances; {total} matrix identities over {} systems", systems.len()))
}

fn spectral_rows() -> Check {
    let lie = lie_system(7).map_err(|e| e.to_string())?.oddify();
    let l = genus_bottom_row(&lie, 1, 5).map_err(|e| e.to_string())?;
    let row: Vec<usize> = l.e1.row(0).into_values().collect();
    ensure(row == vec![1, 6, 1], || format!("L1 row 0 is {row:?}"))?;
    let a = induced_modular_structure(&lie, Bounds::for_type(1, 5)).map_err(|e| e.to_string())?.data;
    let e = internal_pages(&a, 1, 5).map_err(|e| e.to_string())?;
    let bottom = e.e1.flip().row_total(0);
    ensure(bottom == 12, || format!("E1 bottom row total {bottom}"))?;
    let odd_rows: Vec<i64> = e.e1.flip().rows().into_iter().filter(|r| *r < 0 || r % 2 != 0).collect();
    ensure(odd_rows.is_empty(), || format!("unexpected rows {odd_rows:?}"))?;
    Ok(format!("L1 row 0 = {row:?}; E1 bottom row = {bottom}"))
}

fn with_threads<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool").install(f)
}

fn consistency() -> Check {
    let jobs: Vec<(ModularOperadData, usize, usize)> = vec![
        (com(ComKind::Envelope, 1, 5), 1, 5),
        (com(ComKind::Extension, 0, 6), 0, 6),
        (lie_system(6).map_err(|e| e.to_string())?.oddify(), 1, 4),
        (com(ComKind::Envelope, 2, 2), 2, 2),
    ];
    let many = rayon::current_num_threads().max(4);
    for (data, g, n) in &jobs {
        let one = with_threads(1, || ft(data, *g, *n))?;
        let par = with_threads(many, || ft(data, *g, *n))?;
        ensure(one.dump() == par.dump(), || format!("{} ({g},{n}): dumps differ between 1 and {many} threads", data.name))?;
        betti(&par);
    }
    // a differential whose rank the primes could get wrong is still caught
    let probe = SparseMatrix::from_dense(&[vec![1073741827i64.into(), 0.into()], vec![0.into(), 1.into()]]);
    ensure(probe.rank() == 2, || "exact rank of the probe matrix".into())?;
    LEDGER.with(|l| {
        let l = l.borrow();
        ensure(l.problems.is_empty(), || l.problems.join("; "))?;
        Ok(format!("{} complexes, {} differentials: χ and ranks agree; output identical on 1 and {many} threads", l.complexes, l.matrices))
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("genus-3 commutative graph homology", genus_three),
        ("genus-1 commutative graph homology", genus_one_commutative),
        ("genus-0 hairy commutative graph homology", genus_zero_hairy),
        ("genus-1 Lie graph homology", genus_one_lie),
        ("Koszulity retract on fiber complexes", koszul_retract),
        ("nestings vs graph associahedra", polytopes),
        ("relation identities", relations),
        ("spectral bottom rows", spectral_rows),
        ("pipeline consistency", consistency),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
