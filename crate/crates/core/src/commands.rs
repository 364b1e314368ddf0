use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use modgraph::coefficients::{com_system, lie_system, verify_graph_relations, verify_relations, Bounds, ComKind, ModularOperadData};
use modgraph::feynman::{build_ft, induced_modular_structure};
use modgraph::fiber_complex::verify_all;
use modgraph::graphs::{enumerate_graphs, families, ModularGraph};
use modgraph::homalg::{self, character, decompose_character};
use modgraph::nestings::verify_polytope;
use modgraph::spectral::{genus_bottom_row, internal_pages, BigradedTable, Pages, LATER_PAGES};

use crate::cache::Cache;
use crate::{CoeffArgs, FiltrationArg, Format, TypeArgs, View};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Module(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Module(_) => 1,
        }
    }
}

fn module<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Module(e.to_string())
}

pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    /// False when a verified invariant failed.
    pub ok: bool,
}

impl Outcome {
    fn new(stdout: String, ok: bool) -> Outcome {
        Outcome { stdout, stderr: String::new(), ok }
    }
}

pub struct Context {
    pub format: Format,
    pub seed: u64,
    pub cache: Cache,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Stable `(g, n)` pairs of the requested ranges, genus-major.
fn types(ty: &TypeArgs) -> Result<Vec<(usize, usize)>, CliError> {
    let out: Vec<(usize, usize)> =
        ty.g.0.clone().flat_map(|g| ty.n.0.clone().map(move |n| (g, n))).filter(|&(g, n)| n + 2 * g >= 3).collect();
    if out.is_empty() {
        return Err(CliError::Usage("no stable type in range: need n + 2g ≥ 3".into()));
    }
    Ok(out)
}

fn single_type(ty: &TypeArgs) -> Result<(usize, usize), CliError> {
    match types(ty)?.as_slice() {
        [t] => Ok(*t),
        _ => Err(CliError::Usage("this command takes a single --g and --n".into())),
    }
}

/// The coefficient system for transforms of type `(g, n)`.
fn coefficients(sel: &str, g: usize, n: usize) -> Result<ModularOperadData, CliError> {
    let bounds = Bounds::for_type(g, n);
    match sel {
        "com-envelope" => Ok(com_system(ComKind::Envelope, bounds)),
        "com-extension" => Ok(com_system(ComKind::Extension, bounds)),
        "lie-odd" => Ok(lie_system(bounds.weight.max(3)).map_err(module)?.oddify()),
        _ => match sel.strip_prefix("file:") {
            Some(path) => ModularOperadData::load(Path::new(path)).map_err(|e| CliError::Usage(e.to_string())),
            None => Err(CliError::Usage(format!(
                "unknown coefficient system {sel:?}; use com-envelope, com-extension, lie-odd or file:<path>"
            ))),
        },
    }
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn graphs(ctx: &Context, ty: &TypeArgs, max_edges: Option<usize>) -> Result<Outcome, CliError> {
    let lists: Vec<((usize, usize), Vec<_>)> = types(ty)?
        .into_par_iter()
        .map(|(g, n)| enumerate_graphs(g, n, max_edges).map(|l| ((g, n), l)))
        .collect::<Result<_, _>>()
        .map_err(module)?;
    let mut rows = Vec::new();
    for ((g, n), list) in &lists {
        for (i, c) in list.iter().enumerate() {
            rows.push(json!({
                "g": g, "n": n, "index": i,
                "edges": c.num_edges(), "vertices": c.num_vertices(),
                "automorphisms": c.aut_elements().len(),
                "graph": serde_json::from_str::<Value>(c.key()).expect("graph json"),
            }));
        }
    }
    let stdout = match ctx.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("g,n,index,edges,vertices,automorphisms,graph\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r["g"], r["n"], r["index"], r["edges"], r["vertices"], r["automorphisms"],
                    csv_quote(&r["graph"].to_string())
                );
            }
            s
        }
    };
    Ok(Outcome::new(stdout, true))
}

#[derive(Serialize)]
struct HomologyRow {
    g: usize,
    n: usize,
    coefficients: String,
    dims: BTreeMap<i64, usize>,
    betti: BTreeMap<i64, usize>,
    euler_characteristic: i64,
    /// χ(complex) = χ(homology) and modular ranks equal exact ranks.
    consistent: bool,
}

fn parse_table(s: &str) -> Option<(BTreeMap<i64, usize>, BTreeMap<i64, usize>, bool)> {
    let mut lines = s.lines();
    let consistent = lines.next()?.strip_prefix("consistent,")?.parse().ok()?;
    let (mut dims, mut betti) = (BTreeMap::new(), BTreeMap::new());
    for l in lines {
        let v: Vec<&str> = l.split(',').collect();
        let [k, d, b] = v.as_slice() else { return None };
        let k: i64 = k.parse().ok()?;
        dims.insert(k, d.parse().ok()?);
        betti.insert(k, b.parse().ok()?);
    }
    Some((dims, betti, consistent))
}

fn homology_job(ctx: &Context, sel: &str, g: usize, n: usize) -> Result<HomologyRow, CliError> {
    let data = coefficients(sel, g, n)?;
    let key = Cache::key(&["homology", &data.to_json(), &g.to_string(), &n.to_string()]);
    let (dims, betti, consistent) = match ctx.cache.get(&key, "csv").and_then(|s| parse_table(&s)) {
        Some(t) => t,
        None => {
            let ft = build_ft(&data, g, n).map_err(module)?;
            let exact = ft.complex.ranks(true);
            let modular = ft.complex.ranks(false);
            let betti = ft.complex.betti_from_ranks(&exact);
            let chi_h: i64 = betti.iter().map(|(&k, &b)| if k.rem_euclid(2) == 0 { b as i64 } else { -(b as i64) }).sum();
            let consistent = exact == modular && chi_h == ft.complex.euler_characteristic();
            let dims = ft.complex.dims.clone();
            if ctx.cache.enabled() {
                let mut body = format!("consistent,{consistent}\n");
                for (k, d) in &dims {
                    let _ = writeln!(body, "{k},{d},{}", betti[k]);
                }
                ctx.cache.put(&key, "csv", &body);
                ctx.cache.put(&key, "dump.json", &ft.dump());
            }
            (dims, betti, consistent)
        }
    };
    let euler_characteristic = dims.iter().map(|(&k, &d)| if k.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) }).sum();
    Ok(HomologyRow {
        g,
        n,
        coefficients: data.name.clone(),
        dims: dims.into_iter().filter(|&(_, d)| d > 0).collect(),
        betti: betti.into_iter().filter(|&(_, b)| b > 0).collect(),
        euler_characteristic,
        consistent,
    })
}

pub fn homology(ctx: &Context, coeff: &CoeffArgs, ty: &TypeArgs) -> Result<Outcome, CliError> {
    let rows: Vec<HomologyRow> = types(ty)?
        .into_par_iter()
        .map(|(g, n)| homology_job(ctx, &coeff.coeff, g, n))
        .collect::<Result<_, _>>()?;
    let ok = rows.iter().all(|r| r.consistent);
    let stdout = match ctx.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("g,n,degree,betti\n");
            for r in &rows {
                for (k, b) in &r.betti {
                    let _ = writeln!(s, "{},{},{k},{b}", r.g, r.n);
                }
            }
            s
        }
    };
    let mut out = Outcome::new(stdout, ok);
    for r in rows.iter().filter(|r| !r.consistent) {
        let _ = writeln!(out.stderr, "({},{}): rank or Euler characteristic mismatch", r.g, r.n);
    }
    Ok(out)
}

pub fn fiber_verify(ctx: &Context, max_edges: usize, max_genus: usize, max_legs: usize) -> Result<Outcome, CliError> {
    if max_edges > 6 {
        return Err(CliError::Usage("--max-edges above 6 is not supported".into()));
    }
    let r = verify_all(max_edges, max_genus, max_legs).map_err(module)?;
    let stdout = match ctx.format {
        Format::Json => to_json(&r),
        Format::Csv => format!(
            "graphs,retracts,failures,bad_homology,all_hold\n{},{},{},{},{}\n",
            r.graphs,
            r.retracts,
            r.failures.len(),
            r.bad_homology.len(),
            r.all_hold()
        ),
    };
    Ok(Outcome::new(stdout, r.all_hold()))
}

fn named_graph(name: &str) -> Result<ModularGraph, CliError> {
    if name.ends_with(".json") {
        let s = std::fs::read_to_string(name).map_err(|e| CliError::Usage(format!("{name}: {e}")))?;
        return ModularGraph::from_json(&s).map_err(|e| CliError::Usage(e.to_string()));
    }
    families::by_name(name).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn polytope_verify(ctx: &Context, names: &[String]) -> Result<Outcome, CliError> {
    let graphs: Vec<ModularGraph> = names.iter().map(|n| named_graph(n)).collect::<Result<_, _>>()?;
    let reports: Vec<_> = graphs.par_iter().map(verify_polytope).collect();
    let pass = |r: &modgraph::nestings::PolytopeReport| {
        r.isomorphic && r.nesting_f_vector == r.tubing_f_vector && r.euler_characteristic == 1
    };
    let ok = reports.iter().all(pass);
    let stdout = match ctx.format {
        Format::Json => {
            let v: Vec<Value> = names.iter().zip(&reports).map(|(n, r)| json!({ "graph": n, "report": r })).collect();
            to_json(&v)
        }
        Format::Csv => {
            let mut s = String::from("graph,isomorphic,full_nestings,euler_characteristic,f_vector\n");
            for (n, r) in names.iter().zip(&reports) {
                let f: Vec<String> = r.nesting_f_vector.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "{n},{},{},{},{}", r.isomorphic, r.full_nestings, r.euler_characteristic, f.join(" "));
            }
            s
        }
    };
    Ok(Outcome::new(stdout, ok))
}

pub fn spectral(
    ctx: &Context,
    coeff: &CoeffArgs,
    ty: &TypeArgs,
    filtration: FiltrationArg,
    of_homology: bool,
    view: View,
    grid: bool,
) -> Result<Outcome, CliError> {
    let (g, n) = single_type(ty)?;
    let mut data = coefficients(&coeff.coeff, g, n)?;
    if of_homology {
        data = induced_modular_structure(&data, Bounds::for_type(g, n)).map_err(module)?.data;
    }
    let pages: Pages = match filtration {
        FiltrationArg::Internal => internal_pages(&data, g, n),
        FiltrationArg::Genus => genus_bottom_row(&data, g, n),
    }
    .map_err(module)?;
    let shown = |t: &BigradedTable| if view == View::Figure { t.flip() } else { t.clone() };
    let (e0, e1) = (shown(&pages.e0), shown(&pages.e1));
    let mut out = Outcome::new(String::new(), true);
    if grid {
        out.stdout = format!("{}\n{}\n{LATER_PAGES}\n", e0.render(), e1.render());
        return Ok(out);
    }
    match ctx.format {
        Format::Json => out.stdout = to_json(&json!({ "system": data.name, "pages": [e0, e1], "later_pages": LATER_PAGES })),
        Format::Csv => {
            out.stdout = format!("{}{}", e0.to_csv(true), e1.to_csv(false));
            out.stderr = format!("{LATER_PAGES}\n");
        }
    }
    Ok(out)
}

fn partition_name(p: &[usize]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("+")
}

pub fn action(ctx: &Context, coeff: &CoeffArgs, ty: &TypeArgs) -> Result<Outcome, CliError> {
    let (g, n) = single_type(ty)?;
    let data = coefficients(&coeff.coeff, g, n)?;
    let ft = build_ft(&data, g, n).map_err(module)?;
    let acts = ft.sn_actions().map_err(module)?;
    let h = homalg::homology(&ft.complex, None, &acts).map_err(module)?;
    let mut rows = Vec::new();
    for (&k, &b) in h.betti.iter().filter(|(_, &b)| b > 0) {
        let chi = if n >= 1 { character(&h.action[&k], n, b) } else { BTreeMap::from([(Vec::new(), (b as i64).into())]) };
        let dec = if n >= 1 { decompose_character(n, &chi).map_err(module)? } else { BTreeMap::from([(Vec::new(), b as u64)]) };
        rows.push((k, b, chi, dec));
    }
    let stdout = match ctx.format {
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(k, b, chi, dec)| {
                    json!({
                        "g": g, "n": n, "degree": k, "betti": b,
                        "character": chi.iter().map(|(p, x)| (partition_name(p), x.to_string())).collect::<BTreeMap<_, _>>(),
                        "decomposition": dec.iter().map(|(p, m)| (partition_name(p), m)).collect::<BTreeMap<_, _>>(),
                    })
                })
                .collect();
            to_json(&v)
        }
        Format::Csv => {
            let mut s = String::from("g,n,degree,irreducible,multiplicity\n");
            for (k, _, _, dec) in &rows {
                for (p, m) in dec.iter().filter(|(_, &m)| m > 0) {
                    let _ = writeln!(s, "{g},{n},{k},{},{m}", partition_name(p));
                }
            }
            s
        }
    };
    Ok(Outcome::new(stdout, true))
}

pub fn dump_complex(_ctx: &Context, coeff: &CoeffArgs, ty: &TypeArgs) -> Result<Outcome, CliError> {
    let (g, n) = single_type(ty)?;
    let data = coefficients(&coeff.coeff, g, n)?;
    let ft = build_ft(&data, g, n).map_err(module)?;
    let mut s = ft.dump();
    s.push('\n');
    Ok(Outcome::new(s, true))
}

pub fn coeffs_verify(ctx: &Context, coeff: &CoeffArgs, g: usize, n: usize, instances: usize) -> Result<Outcome, CliError> {
    let data = coefficients(&coeff.coeff, g, n)?;
    let data = if coeff.coeff.starts_with("file:") { data } else { data.restrict(Bounds::for_type(g, n)) };
    let report = verify_relations(&data, ctx.seed, 2);
    let graphs = verify_graph_relations(ctx.seed, instances);
    let ok = report.all_pass() && graphs.all_pass();
    let stdout = match ctx.format {
        Format::Json => to_json(&json!({ "system": report, "graph_relations": graphs })),
        Format::Csv => {
            let mut s = String::from("family,checked,pass,witness\n");
            for c in &report.checks {
                let w = c.violation.as_deref().unwrap_or("");
                let _ = writeln!(s, "{},{},{},{}", csv_quote(&c.family), c.checked, c.violation.is_none(), csv_quote(w));
            }
            let w = graphs.failures.first().map(String::as_str).unwrap_or("");
            let _ = writeln!(s, "graph gluings,{},{},{}", graphs.checked, graphs.all_pass(), csv_quote(w));
            s
        }
    };
    Ok(Outcome::new(stdout, ok))
}
