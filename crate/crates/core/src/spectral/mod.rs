//! First pages of the two filtrations on a Feynman transform.
//!
//! For an even system `A` a basis graph with `s` edges in transform degree `m` has
//! internal degree `r = m + s`, which is minus the sum of its label degrees. The
//! transform differential of a strict system preserves `r`, so `E⁰` is the
//! transform split by `r` and `E¹` is the homology of each row.
//!
//! The genus-label filtration is only computed on its bottom row `ℓ = 0`, which
//! is the transform of the genus-zero part extended by zero.
//!
//! Later pages need the transferred higher operations and are not computed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::coefficients::{verify_relations, ModularOperadData, Parity};
use crate::feynman::{build_ft, FeynmanComplex, FeynmanError};
use crate::homalg::{betti_numbers, ChainComplex, SparseMatrix};

pub const LATER_PAGES: &str = "page ≥ 2: not computed";

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("{system} is not a strict modular operad: {reason}")]
    NotStrong { system: String, reason: String },
    #[error("the internal-degree filtration is defined here for even systems; {0} is odd")]
    OddSystem(String),
    #[error(transparent)]
    Feynman(#[from] FeynmanError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filtration {
    /// Rows are the internal degree `r`; the figure view shows `−r`.
    InternalDegree,
    /// Rows are the sum `ℓ` of the vertex genus labels.
    GenusLabel,
}

/// Dimensions indexed by `(column, row)`; the column is always the total degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BigradedTable {
    pub filtration: Filtration,
    pub page: u32,
    pub g: usize,
    pub n: usize,
    /// Whether rows are shown negated (the figure convention).
    pub flipped: bool,
    pub entries: BTreeMap<(i64, i64), usize>,
}

impl BigradedTable {
    fn new(filtration: Filtration, page: u32, g: usize, n: usize) -> BigradedTable {
        BigradedTable { filtration, page, g, n, flipped: false, entries: BTreeMap::new() }
    }

    fn add(&mut self, col: i64, row: i64, dim: usize) {
        if dim > 0 {
            *self.entries.entry((col, row)).or_default() += dim;
        }
    }

    pub fn get(&self, col: i64, row: i64) -> usize {
        self.entries.get(&(col, row)).copied().unwrap_or(0)
    }

    pub fn rows(&self) -> Vec<i64> {
        let mut r: Vec<i64> = self.entries.keys().map(|k| k.1).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    pub fn columns(&self) -> Vec<i64> {
        let mut c: Vec<i64> = self.entries.keys().map(|k| k.0).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// The table rebinned by total degree.
    pub fn column_totals(&self) -> BTreeMap<i64, usize> {
        let mut t = BTreeMap::new();
        for (&(c, _), &d) in &self.entries {
            *t.entry(c).or_default() += d;
        }
        t
    }

    pub fn row(&self, row: i64) -> BTreeMap<i64, usize> {
        self.entries.iter().filter(|(k, _)| k.1 == row).map(|(k, &d)| (k.0, d)).collect()
    }

    pub fn row_total(&self, row: i64) -> usize {
        self.row(row).values().sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.entries.iter().map(|(&(c, _), &d)| sign(c) * d as i64).sum()
    }

    /// The figure view: rows negated for the internal-degree filtration.
    pub fn flip(&self) -> BigradedTable {
        let mut out = self.clone();
        out.flipped = !self.flipped;
        if self.filtration == Filtration::InternalDegree {
            out.entries = self.entries.iter().map(|(&(c, r), &d)| ((c, -r), d)).collect();
        }
        out
    }

    /// Lines `page,row,col,dim`, sorted by row then column.
    pub fn to_csv(&self, header: bool) -> String {
        let mut s = String::new();
        if header {
            s.push_str("page,row,col,dim\n");
        }
        let mut keys: Vec<_> = self.entries.keys().copied().collect();
        keys.sort_by_key(|&(c, r)| (r, c));
        for (c, r) in keys {
            let _ = writeln!(s, "{},{},{},{}", self.page, r, c, self.entries[&(c, r)]);
        }
        s
    }

    /// A text grid with the highest row on top.
    pub fn render(&self) -> String {
        let (name, axis) = match (self.filtration, self.flipped) {
            (Filtration::InternalDegree, false) => ("E", "internal degree r"),
            (Filtration::InternalDegree, true) => ("E", "−(internal degree)"),
            (Filtration::GenusLabel, _) => ("L", "genus labels ℓ"),
        };
        let mut s = format!("{name}^{} at (g,n) = ({},{}); rows: {axis}; columns: total degree\n", self.page, self.g, self.n);
        let cols = self.columns();
        let w = self.entries.values().map(|d| d.to_string().len()).chain(cols.iter().map(|c| c.to_string().len())).max().unwrap_or(1);
        let rw = self.rows().iter().map(|r| r.to_string().len()).max().unwrap_or(1);
        for &r in self.rows().iter().rev() {
            let _ = write!(s, "{r:>rw$} |");
            for &c in &cols {
                match self.get(c, r) {
                    0 => { let _ = write!(s, " {:>w$}", "."); }
                    d => { let _ = write!(s, " {d:>w$}"); }
                }
            }
            s.push('\n');
        }
        let _ = write!(s, "{:>rw$} +", "");
        s.push_str(&"-".repeat(cols.len() * (w + 1)));
        s.push('\n');
        let _ = write!(s, "{:>rw$}  ", "");
        s.push_str(&cols.iter().map(|c| format!("{c:>w$}")).collect::<Vec<_>>().join(" "));
        s.push('\n');
        s
    }
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 { 1 } else { -1 }
}

/// Pages 0 and 1 of one filtration.
#[derive(Clone, Debug, Serialize)]
pub struct Pages {
    pub e0: BigradedTable,
    pub e1: BigradedTable,
}

fn require_strict(data: &ModularOperadData) -> Result<(), SpectralError> {
    let report = verify_relations(data, 0, 1);
    match report.checks.iter().find(|c| c.violation.is_some()) {
        None => Ok(()),
        Some(c) => Err(SpectralError::NotStrong {
            system: data.name.clone(),
            reason: format!("{}: {}", c.family, c.violation.as_deref().unwrap_or_default()),
        }),
    }
}

/// Split a transform by a per-basis-element row. Fails if the differential
/// connects different rows.
fn split_rows(ft: &FeynmanComplex, row_of: impl Fn(i64, usize) -> i64) -> Result<BTreeMap<i64, ChainComplex>, String> {
    // (degree, index) -> (row, index within the row)
    let mut place: BTreeMap<i64, Vec<(i64, usize)>> = BTreeMap::new();
    let mut rows: BTreeMap<i64, ChainComplex> = BTreeMap::new();
    for (&k, basis) in &ft.basis {
        let v = place.entry(k).or_default();
        for i in 0..basis.len() {
            let r = row_of(k, i);
            let c = rows.entry(r).or_default();
            let slot = c.dims.entry(k).or_default();
            v.push((r, *slot));
            *slot += 1;
        }
    }
    let mut triplets: BTreeMap<(i64, i64), Vec<(usize, usize, crate::homalg::Q)>> = BTreeMap::new();
    for (&k, m) in &ft.complex.diff {
        for (i, j, x) in m.triplets() {
            let (ri, pi) = place[&(k - 1)][i];
            let (rj, pj) = place[&k][j];
            if ri != rj {
                return Err(format!("the differential out of degree {k} moves row {rj} to row {ri}"));
            }
            triplets.entry((ri, k)).or_default().push((pi, pj, x));
        }
    }
    for ((r, k), t) in triplets {
        let c = rows.get_mut(&r).expect("row exists");
        let m = SparseMatrix::from_triplets(c.dim(k - 1), c.dim(k), t);
        c.diff.insert(k, m);
    }
    Ok(rows)
}

fn tables(ft: &FeynmanComplex, rows: &BTreeMap<i64, ChainComplex>, filtration: Filtration) -> Pages {
    let mut e0 = BigradedTable::new(filtration, 0, ft.g, ft.n);
    let mut e1 = BigradedTable::new(filtration, 1, ft.g, ft.n);
    for (&r, c) in rows {
        for (&k, &d) in &c.dims {
            e0.add(k, r, d);
        }
        for (k, b) in betti_numbers(c) {
            e1.add(k, r, b);
        }
    }
    Pages { e0, e1 }
}

/// `E⁰` and `E¹` of the internal-degree filtration of `FT(A)(g, n)`, with the
/// raw bigrading `(m, r)`.
pub fn internal_pages(data: &ModularOperadData, g: usize, n: usize) -> Result<Pages, SpectralError> {
    if data.parity == Parity::Odd {
        return Err(SpectralError::OddSystem(data.name.clone()));
    }
    require_strict(data)?;
    let ft = build_ft(data, g, n)?;
    let rows = split_rows(&ft, |k, i| k + ft.basis[&k][i].edges() as i64)
        .map_err(|reason| SpectralError::NotStrong { system: data.name.clone(), reason })?;
    Ok(tables(&ft, &rows, Filtration::InternalDegree))
}

/// Row `ℓ = 0` of pages 0 and 1 of the genus-label filtration: the transform of
/// the genus-zero part of `cyclic` extended by zero, and its homology.
pub fn genus_bottom_row(cyclic: &ModularOperadData, g: usize, n: usize) -> Result<Pages, SpectralError> {
    let b = cyclic.cyclic_part();
    require_strict(&b)?;
    let ft = build_ft(&b, g, n)?;
    let rows = split_rows(&ft, |_, _| 0).expect("a single row");
    Ok(tables(&ft, &rows, Filtration::GenusLabel))
}

#[derive(Clone, Debug, Serialize)]
pub struct ColumnCheck {
    pub column: i64,
    pub table: usize,
    pub abutment: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub table_euler: i64,
    pub abutment_euler: i64,
    pub columns: Vec<ColumnCheck>,
    pub failure: Option<String>,
}

impl ConvergenceReport {
    pub fn pass(&self) -> bool {
        self.failure.is_none()
    }
}

/// Compare a page with the homology it converges to. Each column of a page
/// surjects onto a subquotient filtration of the abutment in that degree, so
/// column totals bound the abutment from above; the Euler characteristics agree.
pub fn convergence_check(table: &BigradedTable, abutment: &BTreeMap<i64, usize>) -> ConvergenceReport {
    let totals = table.column_totals();
    let mut cols: Vec<i64> = totals.keys().chain(abutment.keys()).copied().collect();
    cols.sort_unstable();
    cols.dedup();
    let columns: Vec<ColumnCheck> = cols
        .iter()
        .map(|&c| ColumnCheck {
            column: c,
            table: totals.get(&c).copied().unwrap_or(0),
            abutment: abutment.get(&c).copied().unwrap_or(0),
        })
        .collect();
    let table_euler = table.euler_characteristic();
    let abutment_euler: i64 = abutment.iter().map(|(&k, &d)| sign(k) * d as i64).sum();
    let failure = columns
        .iter()
        .find(|c| c.table < c.abutment)
        .map(|c| format!("column {}: page total {} is below the abutment {}", c.column, c.table, c.abutment))
        .or_else(|| {
            (table_euler != abutment_euler)
                .then(|| format!("Euler characteristic {table_euler} differs from the abutment's {abutment_euler}"))
        });
    ConvergenceReport { table_euler, abutment_euler, columns, failure }
}

/// `d₀` is horizontal, so each row has the same Euler characteristic on both
/// pages. Returns the first row where they differ.
pub fn row_euler_mismatch(pages: &Pages) -> Option<i64> {
    let euler = |t: &BigradedTable, r: i64| t.row(r).iter().map(|(&c, &d)| sign(c) * d as i64).sum::<i64>();
    let mut rows = pages.e0.rows();
    rows.extend(pages.e1.rows());
    rows.sort_unstable();
    rows.dedup();
    rows.into_iter().find(|&r| euler(&pages.e0, r) != euler(&pages.e1, r))
}
