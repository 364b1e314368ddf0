//! Caption computations for the transcribed fiber-complex figures.

use std::collections::BTreeMap;
use std::path::PathBuf;

use modgraph::fiber_complex::{Chain, OrderedNesting, Retract};
use modgraph::graphs::{ModularGraph, RawGraph};
use modgraph::homalg::Q;
use modgraph::nestings::Nest;
use serde::Deserialize;

#[derive(Deserialize)]
struct Fixture {
    graph: RawGraph,
    edges: BTreeMap<String, usize>,
    removed: String,
}

pub struct Figure {
    pub retract: Retract,
    names: BTreeMap<char, usize>,
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.json"))
}

pub fn load(name: &str) -> Figure {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    let fx: Fixture = serde_json::from_str(&text).unwrap();
    let g = ModularGraph::from_raw(&fx.graph).unwrap();
    let names: BTreeMap<char, usize> = fx.edges.iter().map(|(k, &v)| (k.chars().next().unwrap(), v)).collect();
    let retract = Retract::new(&g, names[&fx.removed.chars().next().unwrap()]).unwrap();
    Figure { retract, names }
}

impl Figure {
    fn nest(&self, s: &str) -> Nest {
        Nest(s.chars().map(|c| 1u64 << self.names[&c]).sum())
    }

    /// Sum of ordered nestings written as in the captions, e.g. `+{ace,e}`.
    pub fn chain(&self, terms: &[(i64, &[&str])]) -> Chain {
        let mut out = Chain::new();
        for (c, nests) in terms {
            let order: Vec<Nest> = nests.iter().map(|s| self.nest(s)).collect();
            let o = OrderedNesting::from_order(&order);
            let v = out.entry(o.nesting).or_insert_with(Q::zero);
            *v += Q::from_int(c * o.sign as i64);
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

fn add(a: &Chain, b: &Chain) -> Chain {
    let mut out = a.clone();
    for (k, v) in b {
        let e = out.entry(k.clone()).or_insert_with(Q::zero);
        *e += v.clone();
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn neg(a: &Chain) -> Chain {
    a.iter().map(|(k, v)| (k.clone(), -v.clone())).collect()
}

fn expect(what: &str, got: &Chain, want: &Chain) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

/// Nesting {ace,e}: π vanishes, the two surviving terms of d map to {c,a} and
/// {a,c}, and πd = dπ = 0.
pub fn pi1() -> Result<(), String> {
    let f = load("pi1");
    let r = &f.retract;
    let n = f.chain(&[(1, &["ace", "e"])]);
    expect("pi(N)", &r.pi(&n), &Chain::new())?;
    let dn = r.d(&n);
    let surviving: Chain = dn.iter().filter(|(k, _)| !r.pi(&Chain::from([((*k).clone(), Q::one())])).is_empty()).map(|(k, v)| (k.clone(), v.clone())).collect();
    expect("surviving terms", &surviving, &f.chain(&[(1, &["ace", "e", "ae"]), (1, &["ace", "e", "ce"])]))?;
    expect("pi{ace,e,ae}", &r.pi(&f.chain(&[(1, &["ace", "e", "ae"])])), &f.chain(&[(1, &["c", "a"])]))?;
    expect("pi{ace,e,ce}", &r.pi(&f.chain(&[(1, &["ace", "e", "ce"])])), &f.chain(&[(1, &["a", "c"])]))?;
    expect("pi d(N)", &r.pi(&dn), &Chain::new())?;
    expect("d pi(N)", &r.d_sub(&r.pi(&n)), &Chain::new())
}

/// Nesting {ace}: π{ace,e} = −{ac}, π{ace,ac} = {ac}, πd = 0.
pub fn pi2() -> Result<(), String> {
    let f = load("pi2");
    let r = &f.retract;
    let n = f.chain(&[(1, &["ace"])]);
    expect("pi(N)", &r.pi(&n), &Chain::new())?;
    let dn = r.d(&n);
    let surviving: Chain = dn.iter().filter(|(k, _)| !r.pi(&Chain::from([((*k).clone(), Q::one())])).is_empty()).map(|(k, v)| (k.clone(), v.clone())).collect();
    expect("surviving terms", &surviving, &f.chain(&[(1, &["ace", "e"]), (1, &["ace", "ac"])]))?;
    expect("pi{ace,e}", &r.pi(&f.chain(&[(1, &["ace", "e"])])), &f.chain(&[(-1, &["ac"])]))?;
    expect("pi{ace,ac}", &r.pi(&f.chain(&[(1, &["ace", "ac"])])), &f.chain(&[(1, &["ac"])]))?;
    expect("pi d(N)", &r.pi(&dn), &Chain::new())
}

/// Nesting {ae}: H = π = 0, H{ea,a} = −{a}, H{ea,e} = {ea}+{a}, Hd(N) = N.
pub fn pi3() -> Result<(), String> {
    let f = load("pi3");
    let r = &f.retract;
    let n = f.chain(&[(1, &["ae"])]);
    expect("H(N)", &r.homotopy(&n), &Chain::new())?;
    expect("pi(N)", &r.pi(&n), &Chain::new())?;
    let dn = r.d(&n);
    let surviving: Chain = dn.iter().filter(|(k, _)| !r.homotopy(&Chain::from([((*k).clone(), Q::one())])).is_empty()).map(|(k, v)| (k.clone(), v.clone())).collect();
    expect("surviving terms", &surviving, &f.chain(&[(1, &["ea", "a"]), (1, &["ea", "e"])]))?;
    expect("H{ea,a}", &r.homotopy(&f.chain(&[(1, &["ea", "a"])])), &f.chain(&[(-1, &["a"])]))?;
    expect("H{ea,e}", &r.homotopy(&f.chain(&[(1, &["ea", "e"])])), &f.chain(&[(1, &["ea"]), (1, &["a"])]))?;
    expect("Hd(N)", &r.homotopy(&dn), &n)
}

/// Nesting {ac,ace}: dH, Hd and ιπ as in the caption; dH+Hd = id−ιπ.
pub fn pi4() -> Result<(), String> {
    let f = load("pi4");
    let r = &f.retract;
    let n = f.chain(&[(1, &["ac", "ace"])]);
    expect("H(N)", &r.homotopy(&n), &f.chain(&[(1, &["ac"])]))?;
    let dh = r.d(&r.homotopy(&n));
    expect("dH(N)", &dh, &f.chain(&[(1, &["ac", "a"]), (1, &["ac", "c"]), (1, &["ac", "abc"]), (1, &["ac", "ace"])]))?;
    let dn = r.d(&n);
    expect("d(N)", &dn, &f.chain(&[(1, &["ac", "ace", "a"]), (1, &["ac", "ace", "c"])]))?;
    let hd = r.homotopy(&dn);
    expect("Hd(N)", &hd, &f.chain(&[(-1, &["ac", "a"]), (-1, &["ac", "c"])]))?;
    expect("pi(N)", &r.pi(&n), &f.chain(&[(-1, &["ac"])]))?;
    let ip = r.iota(&r.pi(&n));
    expect("iota pi(N)", &ip, &f.chain(&[(-1, &["ac", "abc"])]))?;
    expect("dH+Hd", &add(&dh, &hd), &add(&n, &neg(&ip)))
}

/// Nesting {ace,e}: dH, Hd and ιπ as in the caption; dH+Hd = id−ιπ.
pub fn pi5() -> Result<(), String> {
    let f = load("pi5");
    let r = &f.retract;
    let n = f.chain(&[(1, &["ace", "e"])]);
    let h = r.homotopy(&n);
    expect("H(N)", &h, &f.chain(&[(1, &["ace"]), (1, &["ac"])]))?;
    let dh = r.d(&h);
    let want_dh = f.chain(&[
        (1, &["ace", "a"]),
        (1, &["ace", "c"]),
        (1, &["ace", "e"]),
        (1, &["ace", "ac"]),
        (1, &["ace", "ce"]),
        (1, &["ac", "a"]),
        (1, &["ac", "c"]),
        (1, &["ac", "abc"]),
        (1, &["ac", "ace"]),
    ]);
    expect("dH(N)", &dh, &want_dh)?;
    let dn = r.d(&n);
    expect("d(N)", &dn, &f.chain(&[(1, &["ace", "e", "a"]), (1, &["ace", "e", "ce"])]))?;
    let hd = r.homotopy(&dn);
    let want_hd = f.chain(&[
        (-1, &["ace", "a"]),
        (-1, &["ac", "a"]),
        (-1, &["ace", "ce"]),
        (-1, &["ace", "c"]),
        (-1, &["ac", "c"]),
    ]);
    expect("Hd(N)", &hd, &want_hd)?;
    let ip = r.iota(&r.pi(&n));
    expect("iota pi(N)", &ip, &f.chain(&[(-1, &["ac", "abc"])]))?;
    expect("dH+Hd", &add(&dh, &hd), &add(&n, &neg(&ip)))
}

pub fn all() -> Vec<(&'static str, Result<(), String>)> {
    vec![("pi1", pi1()), ("pi2", pi2()), ("pi3", pi3()), ("pi4", pi4()), ("pi5", pi5())]
}
