//! Dense brute-force homology used to check the sparse fast path.
//!
//! Nothing here touches [`crate::persistence`], [`crate::local_sheaf`] or
//! [`crate::linalg::reduce`]: boundary matrices are rebuilt from vertex tuples
//! and ranks come from plain Gauss-Jordan elimination over exact rationals.
//! Everything is exponential-ish and meant for complexes with a few dozen
//! simplices.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{Filtration, Simplex, SimplexSubset};
use crate::error::{Error, Result};
use crate::linalg::Exact;

/// Row-major dense matrix of exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Exact>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Exact::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Exact::one());
        }
        m
    }

    /// Matrix whose columns are `columns`, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Exact>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Exact>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn from_f64(rows: &[Vec<f64>]) -> Self {
        let r: Vec<Vec<Exact>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| Exact::from_float(x).expect("finite entry")).collect())
            .collect();
        Self::from_rows(&r)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Exact {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Exact) {
        self.data[i * self.cols + j] = x;
    }

    pub fn column(&self, j: usize) -> Vec<Exact> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j).clone();
                        out.set(i, j, cur + a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::contract("shape mismatch in matrix sum"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    /// Reduced row echelon form and its pivot columns.
    fn rref(&self) -> (Vec<Vec<Exact>>, Vec<usize>) {
        let mut m: Vec<Vec<Exact>> = (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(r, p);
            let inv = Exact::one() / m[r][c].clone();
            for x in m[r].iter_mut().skip(c) {
                *x = &*x * &inv;
            }
            let pivot_row = m[r].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    if !y.is_zero() {
                        *x = &*x - &factor * y;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Basis of the right null space, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Exact>> {
        let (m, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Exact::zero(); self.cols];
                v[free] = Exact::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m[r][free].clone();
                }
                v
            })
            .collect()
    }
}

/// Simplex indices grouped by dimension, ascending within each group.
fn cells(filtration: &Filtration, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); filtration.dim_cap() + 1];
    for i in (0..filtration.len()).filter(|&i| keep(i)) {
        let d = filtration.simplex(i).dim();
        if by_dim.len() <= d {
            by_dim.resize(d + 1, Vec::new());
        }
        by_dim[d].push(i);
    }
    by_dim
}

fn cells_of(by_dim: &[Vec<usize>], d: usize) -> &[usize] {
    by_dim.get(d).map_or(&[], Vec::as_slice)
}

/// Boundary matrix from the `cols` simplices to the `rows` simplices. Faces
/// outside `rows` are dropped, which is the quotient by whatever is missing.
fn boundary(filtration: &Filtration, rows: &[usize], cols: &[usize]) -> DenseMatrix {
    let lookup: HashMap<&[usize], usize> =
        rows.iter().enumerate().map(|(r, &i)| (filtration.simplex(i).vertices(), r)).collect();
    let mut m = DenseMatrix::zeros(rows.len(), cols.len());
    for (c, &j) in cols.iter().enumerate() {
        let verts = filtration.simplex(j).vertices();
        if verts.len() < 2 {
            continue;
        }
        for skip in 0..verts.len() {
            let face: Vec<usize> = verts.iter().enumerate().filter(|&(p, _)| p != skip).map(|(_, &v)| v).collect();
            if let Some(&r) = lookup.get(face.as_slice()) {
                m.set(r, c, Exact::from_integer(if skip % 2 == 0 { 1.into() } else { (-1).into() }));
            }
        }
    }
    m
}

/// `dim ker d_k - rank d_{k+1}` of the chain complex spanned by `by_dim`.
fn chain_betti(filtration: &Filtration, by_dim: &[Vec<usize>], k: usize) -> usize {
    let ck = cells_of(by_dim, k);
    let rank_k = if k == 0 { 0 } else { boundary(filtration, cells_of(by_dim, k - 1), ck).rank() };
    let rank_k1 = boundary(filtration, ck, cells_of(by_dim, k + 1)).rank();
    ck.len() - rank_k - rank_k1
}

/// Betti number `dim H_k(S_t)`.
pub fn betti_dense(filtration: &Filtration, t: f64, k: usize) -> usize {
    let by_dim = cells(filtration, |i| filtration.value(i) <= t);
    chain_betti(filtration, &by_dim, k)
}

/// Betti numbers `dim H_k(S_t)` at each distinct filtration value.
pub fn betti_curve(filtration: &Filtration, k: usize) -> Vec<(f64, usize)> {
    filtration.critical_values().into_iter().map(|t| (t, betti_dense(filtration, t, k))).collect()
}

fn check_closed(filtration: &Filtration, members: &[usize]) -> Result<()> {
    let present: std::collections::HashSet<&[usize]> =
        members.iter().map(|&i| filtration.simplex(i).vertices()).collect();
    for &i in members {
        let verts = filtration.simplex(i).vertices();
        if verts.len() < 2 {
            continue;
        }
        for skip in 0..verts.len() {
            let face: Vec<usize> = verts.iter().enumerate().filter(|&(p, _)| p != skip).map(|(_, &v)| v).collect();
            if !present.contains(face.as_slice()) {
                return Err(Error::contract(format!("subset is not closed: {verts:?} lacks face {face:?}")));
            }
        }
    }
    Ok(())
}

/// Betti number of the quotient complex `C(S_t) / C(A_t)` for a closed `A`.
pub fn relative_betti_dense(filtration: &Filtration, t: f64, closed: &SimplexSubset, k: usize) -> Result<usize> {
    check_closed(filtration, closed.members())?;
    let by_dim = cells(filtration, |i| filtration.value(i) <= t && !closed.contains(i));
    Ok(chain_betti(filtration, &by_dim, k))
}

/// `dim H_k(S_t, S_t \ U)` for an open `U`: the quotient complex is spanned
/// by the simplices of `U`.
pub fn local_betti_dense(filtration: &Filtration, t: f64, open: &SimplexSubset, k: usize) -> Result<usize> {
    require_open(filtration, open)?;
    let by_dim = cells(filtration, |i| filtration.value(i) <= t && open.contains(i));
    Ok(chain_betti(filtration, &by_dim, k))
}

fn require_open(filtration: &Filtration, open: &SimplexSubset) -> Result<()> {
    // independent of the subset's own flag: U is open iff every coface of a
    // member is a member
    let members: std::collections::HashSet<&[usize]> =
        open.members().iter().map(|&i| filtration.simplex(i).vertices()).collect();
    for i in 0..filtration.len() {
        let s = filtration.simplex(i);
        if members.contains(s.vertices()) {
            continue;
        }
        if members.iter().any(|m| m.iter().all(|v| s.vertices().contains(v))) {
            return Err(Error::contract(format!("subset is not open: {:?} is a coface of a member", s.vertices())));
        }
    }
    Ok(())
}

/// Hodge Laplacian `d_k^T d_k + d_{k+1} d_{k+1}^T` of `S_t`.
pub fn hodge_laplacian_dense(filtration: &Filtration, t: f64, k: usize) -> DenseMatrix {
    let by_dim = cells(filtration, |i| filtration.value(i) <= t);
    let ck = cells_of(&by_dim, k);
    let down = if k == 0 {
        DenseMatrix::zeros(ck.len(), ck.len())
    } else {
        let d = boundary(filtration, cells_of(&by_dim, k - 1), ck);
        d.transpose().mul(&d).expect("shapes")
    };
    let d1 = boundary(filtration, ck, cells_of(&by_dim, k + 1));
    let up = d1.mul(&d1.transpose()).expect("shapes");
    down.add(&up).expect("shapes")
}

/// Keep the coordinates of `v` (indexed by `from`) that appear in `to`.
fn project(v: &[Exact], from: &[usize], to: &[usize]) -> Vec<Exact> {
    let mut out = vec![Exact::zero(); to.len()];
    for (x, i) in v.iter().zip(from) {
        if let Ok(p) = to.binary_search(i) {
            out[p] = x.clone();
        }
    }
    out
}

fn projected(vs: &[Vec<Exact>], from: &[usize], to: &[usize]) -> DenseMatrix {
    let cols: Vec<Vec<Exact>> = vs.iter().map(|v| project(v, from, to)).collect();
    DenseMatrix::from_columns(to.len(), &cols)
}

/// Cycles and boundaries of `H_k(S_t, S_t \ U)`, as vectors over `U_t`'s
/// k-simplices.
struct LocalHomology {
    cells: Vec<usize>,
    cycles: Vec<Vec<Exact>>,
    boundaries: DenseMatrix,
}

impl LocalHomology {
    fn new(filtration: &Filtration, t: f64, open: &SimplexSubset, k: usize) -> Self {
        let by_dim = cells(filtration, |i| filtration.value(i) <= t && open.contains(i));
        let ck = cells_of(&by_dim, k).to_vec();
        let cycles = if k == 0 {
            DenseMatrix::zeros(0, ck.len()).nullspace()
        } else {
            boundary(filtration, cells_of(&by_dim, k - 1), &ck).nullspace()
        };
        let boundaries = boundary(filtration, &ck, cells_of(&by_dim, k + 1));
        Self { cells: ck, cycles, boundaries }
    }

    fn dim(&self) -> usize {
        self.cycles.len() - self.boundaries.rank()
    }
}

/// Image rank and kernel dimension at the middle of
/// `H(A u B) -> H(A) + H(B) -> H(A n B)` at one threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MvPosition {
    pub value: f64,
    pub im_rank: usize,
    pub ker_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MvReport {
    pub order: usize,
    pub positions: Vec<MvPosition>,
}

impl MvReport {
    pub fn is_exact(&self) -> bool {
        self.positions.iter().all(|p| p.im_rank == p.ker_dim)
    }
}

/// Checks exactness of the local Mayer-Vietoris sequence at
/// `H_k(S_t, S_t \ A) + H_k(S_t, S_t \ B)` for every filtration value.
pub fn check_mayer_vietoris(
    filtration: &Filtration,
    open_a: &SimplexSubset,
    open_b: &SimplexSubset,
    k: usize,
) -> Result<MvReport> {
    require_open(filtration, open_a)?;
    require_open(filtration, open_b)?;
    let union = filtration.union(open_a, open_b);
    let meet = filtration.intersection(open_a, open_b);
    let mut positions = Vec::new();
    for t in filtration.critical_values() {
        let hu = LocalHomology::new(filtration, t, &union, k);
        let ha = LocalHomology::new(filtration, t, open_a, k);
        let hb = LocalHomology::new(filtration, t, open_b, k);
        let hc = LocalHomology::new(filtration, t, &meet, k);

        // first map: z -> (z|A, z|B), stacked into one block matrix
        let pa = projected(&hu.cycles, &hu.cells, &ha.cells);
        let pb = projected(&hu.cycles, &hu.cells, &hb.cells);
        let (na, nb) = (ha.cells.len(), hb.cells.len());
        let (ba, bb) = (&ha.boundaries, &hb.boundaries);
        let mut stacked = DenseMatrix::zeros(na + nb, pa.cols() + ba.cols() + bb.cols());
        for j in 0..pa.cols() {
            for i in 0..na {
                stacked.set(i, j, pa.get(i, j).clone());
            }
            for i in 0..nb {
                stacked.set(na + i, j, pb.get(i, j).clone());
            }
        }
        for j in 0..ba.cols() {
            for i in 0..na {
                stacked.set(i, pa.cols() + j, ba.get(i, j).clone());
            }
        }
        for j in 0..bb.cols() {
            for i in 0..nb {
                stacked.set(na + i, pa.cols() + ba.cols() + j, bb.get(i, j).clone());
            }
        }
        let im_rank = stacked.rank() - ba.rank() - bb.rank();

        // second map: (a, b) -> a|C - b|C; its image is spanned by both parts
        let ca = projected(&ha.cycles, &ha.cells, &hc.cells);
        let cb = projected(&hb.cycles, &hb.cells, &hc.cells);
        let second = ca.hcat(&cb).hcat(&hc.boundaries).rank() - hc.boundaries.rank();
        let ker_dim = ha.dim() + hb.dim() - second;
        positions.push(MvPosition { value: t, im_rank, ker_dim });
    }
    Ok(MvReport { order: k, positions })
}

/// Step at which a theorem check failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub step: usize,
    pub value: f64,
    pub simplex: Vec<usize>,
}

/// Outcome of a step-by-step theorem check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub order: usize,
    pub steps_checked: usize,
    /// Filtration values of the steps where the hypothesis was not vacuous.
    pub firings: Vec<f64>,
    pub counterexample: Option<Counterexample>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Absolute and relative cochain data of a filtration prefix.
struct Cochains {
    k_cells: Vec<usize>,
    rel_cells: Vec<usize>,
    cocycles: Vec<Vec<Exact>>,
    coboundaries: DenseMatrix,
    rel_cocycles: Vec<Vec<Exact>>,
    rel_coboundaries: DenseMatrix,
}

impl Cochains {
    fn new(filtration: &Filtration, prefix: usize, open: &SimplexSubset, k: usize) -> Self {
        let abs = cells(filtration, |i| i < prefix);
        let rel = cells(filtration, |i| i < prefix && open.contains(i));
        let delta = |by_dim: &[Vec<usize>], d: usize| boundary(filtration, cells_of(by_dim, d), cells_of(by_dim, d + 1)).transpose();
        let lower = |by_dim: &[Vec<usize>]| {
            if k == 0 {
                DenseMatrix::zeros(cells_of(by_dim, 0).len(), 0)
            } else {
                delta(by_dim, k - 1)
            }
        };
        Self {
            k_cells: cells_of(&abs, k).to_vec(),
            rel_cells: cells_of(&rel, k).to_vec(),
            cocycles: delta(&abs, k).nullspace(),
            coboundaries: lower(&abs),
            rel_cocycles: delta(&rel, k).nullspace(),
            rel_coboundaries: lower(&rel),
        }
    }
}

fn theorem_steps(filtration: &Filtration, k: usize) -> impl Iterator<Item = usize> + '_ {
    // a simplex of any other dimension leaves every k-th cochain group,
    // cocycle and coboundary space of both sides unchanged
    (0..filtration.len()).filter(move |&p| {
        let d = filtration.simplex(p).dim();
        d == k || d == k + 1
    })
}

/// "The restriction of a cocycle dies earlier": if a relative class at step
/// `p + 1` restricts to step `p`, its image in `H^k(S_p)` extends to
/// `S_{p+1}`. Contrapositive form: a class of `H^k(S_p)` coming from a
/// relative class that dies drags the relative class down with it.
pub fn check_theorem_dies_earlier(filtration: &Filtration, open: &SimplexSubset, k: usize) -> Result<TheoremReport> {
    require_open(filtration, open)?;
    let mut report = TheoremReport { order: k, steps_checked: 0, firings: Vec::new(), counterexample: None };
    for p in theorem_steps(filtration, k) {
        let before = Cochains::new(filtration, p, open, k);
        let after = Cochains::new(filtration, p + 1, open, k);
        let survivors = projected(&after.cocycles, &after.k_cells, &before.k_cells).hcat(&before.coboundaries);
        let base = survivors.rank();
        let restricted = projected(&after.rel_cocycles, &after.rel_cells, &before.k_cells);
        let current = projected(&before.rel_cocycles, &before.rel_cells, &before.k_cells);
        report.steps_checked += 1;
        if survivors.hcat(&current).rank() > base {
            push_firing(&mut report.firings, filtration.value(p));
        }
        if survivors.hcat(&restricted).rank() > base {
            report.counterexample = Some(counterexample(filtration, p));
            break;
        }
    }
    Ok(report)
}

/// "The restriction of a cocycle appears earlier": a relative class at step
/// `p + 1` whose restriction to step `p` is trivial relatively has a trivial
/// absolute image at step `p` too.
pub fn check_theorem_appears_earlier(filtration: &Filtration, open: &SimplexSubset, k: usize) -> Result<TheoremReport> {
    require_open(filtration, open)?;
    let mut report = TheoremReport { order: k, steps_checked: 0, firings: Vec::new(), counterexample: None };
    for p in theorem_steps(filtration, k) {
        let before = Cochains::new(filtration, p, open, k);
        let after = Cochains::new(filtration, p + 1, open, k);
        let rz = projected(&after.rel_cocycles, &after.rel_cells, &before.rel_cells);
        let brel = &before.rel_coboundaries;
        // z in span(rZ) with z = Brel * y: null vectors of [rZ | Brel]
        let kernel = rz.hcat(brel).nullspace();
        let relative_zero: Vec<Vec<Exact>> = kernel
            .iter()
            .map(|c| {
                let mut v = vec![Exact::zero(); before.rel_cells.len()];
                for (j, cj) in c.iter().take(rz.cols()).enumerate() {
                    if cj.is_zero() {
                        continue;
                    }
                    for (i, x) in v.iter_mut().enumerate() {
                        *x = &*x + cj * rz.get(i, j);
                    }
                }
                v
            })
            .collect();
        let b = &before.coboundaries;
        let base = b.rank();
        report.steps_checked += 1;
        let images = DenseMatrix::from_columns(
            before.k_cells.len(),
            &(0..rz.cols()).map(|j| project(&rz.column(j), &before.rel_cells, &before.k_cells)).collect::<Vec<_>>(),
        );
        if b.hcat(&images).rank() > base {
            push_firing(&mut report.firings, filtration.value(p));
        }
        if b.hcat(&projected(&relative_zero, &before.rel_cells, &before.k_cells)).rank() > base {
            report.counterexample = Some(counterexample(filtration, p));
            break;
        }
    }
    Ok(report)
}

fn push_firing(firings: &mut Vec<f64>, t: f64) {
    if firings.last() != Some(&t) {
        firings.push(t);
    }
}

fn counterexample(filtration: &Filtration, p: usize) -> Counterexample {
    Counterexample { step: p, value: filtration.value(p), simplex: filtration.simplex(p).vertices().to_vec() }
}

/// Per-threshold relative Betti numbers of `(S, S \ st v)` and of
/// `(cl st v, frontier st v)`, the latter built as a separate complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcisionReport {
    pub vertex: usize,
    pub order: usize,
    /// `(threshold, full, excised)`.
    pub rows: Vec<(f64, usize, usize)>,
}

impl ExcisionReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.1 == r.2)
    }
}

pub fn excision_check(filtration: &Filtration, vertex: usize, k: usize) -> Result<ExcisionReport> {
    let star = filtration.vertex_star(vertex)?;
    let closure = filtration.closure(&star);
    let entries: Vec<(Simplex, f64)> =
        closure.members().iter().map(|&i| (filtration.simplex(i).clone(), filtration.value(i))).collect();
    let small = Filtration::from_simplices(entries, Some(filtration.dim_cap()))?;
    let small_star = small.vertex_star(vertex)?;
    let small_frontier = small.frontier(&small_star)?;
    let complement = filtration.complement(&star);
    let mut rows = Vec::new();
    for t in filtration.critical_values() {
        let full = relative_betti_dense(filtration, t, &complement, k)?;
        let excised = relative_betti_dense(&small, t, &small_frontier, k)?;
        rows.push((t, full, excised));
    }
    Ok(ExcisionReport { vertex, order: k, rows })
}

/// One line of a `verify` report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyRecord {
    pub check: String,
    pub fixture: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl VerifyRecord {
    pub fn new(check: &str, fixture: &str, failure: Option<String>) -> Self {
        Self {
            check: check.to_owned(),
            fixture: fixture.to_owned(),
            status: if failure.is_none() { Status::Pass } else { Status::Fail },
            counterexample: failure,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_flag_complex;
    use crate::fixtures;

    fn q(v: i64) -> Exact {
        Exact::from_integer(v.into())
    }

    #[test]
    fn rank_and_nullspace() {
        let m = DenseMatrix::from_rows(&[vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]]);
        assert_eq!(m.rank(), 1);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let col = DenseMatrix::from_columns(3, &[v]);
            let prod = m.mul(&col).unwrap();
            assert!((0..2).all(|i| prod.get(i, 0).is_zero()));
        }
        assert_eq!(DenseMatrix::identity(4).rank(), 4);
        assert_eq!(DenseMatrix::zeros(0, 3).nullspace().len(), 3);
    }

    #[test]
    fn golden_betti() {
        for g in fixtures::golden() {
            let f = build_flag_complex(&g.graph, g.max_dim).unwrap();
            let got: Vec<_> = (0..g.betti.len()).map(|k| betti_dense(&f, f.horizon(), k)).collect();
            assert_eq!(got, g.betti, "{}", g.name);
        }
        let p = build_flag_complex(&fixtures::single_point(), 1).unwrap();
        assert_eq!(betti_dense(&p, 0.0, 0), 1);
        let c4 = build_flag_complex(&fixtures::cycle(4), 2).unwrap();
        assert_eq!(betti_dense(&c4, 1.0, 1), 1);
        assert_eq!(betti_dense(&c4, 0.5, 0), 4);
    }

    #[test]
    fn octahedron_second_boundary_has_rank_seven() {
        let f = build_flag_complex(&fixtures::octahedron(), 2).unwrap();
        let by_dim = cells(&f, |_| true);
        assert_eq!(by_dim[2].len(), 8);
        assert_eq!(boundary(&f, &by_dim[1], &by_dim[2]).rank(), 7);
    }

    #[test]
    fn relative_betti_examples() {
        let k3 = build_flag_complex(&fixtures::triangle(), 2).unwrap();
        let opposite = k3.closure(&k3.star(&Simplex::new(vec![1, 2]).unwrap()).unwrap());
        for k in 0..=2 {
            assert_eq!(relative_betti_dense(&k3, 1.0, &opposite, k).unwrap(), 0);
        }
        assert!(relative_betti_dense(&k3, 1.0, &k3.vertex_star(0).unwrap(), 0).is_err());

        // path rel its endpoints
        let c4 = build_flag_complex(&fixtures::cycle(4), 2).unwrap();
        let st = c4.vertex_star(0).unwrap();
        let cl = c4.closure(&st);
        let small = Filtration::from_simplices(
            cl.members().iter().map(|&i| (c4.simplex(i).clone(), c4.value(i))).collect(),
            Some(2),
        )
        .unwrap();
        let ends = small.frontier(&small.vertex_star(0).unwrap()).unwrap();
        assert_eq!(ends.len(), 2);
        assert_eq!(relative_betti_dense(&small, 1.0, &ends, 1).unwrap(), 1);
        assert_eq!(relative_betti_dense(&c4, 1.0, &c4.empty_subset(), 1).unwrap(), 1);
    }

    #[test]
    fn hodge_kernels() {
        let path = build_flag_complex(&fixtures::cycle(3), 1).unwrap();
        let l0 = hodge_laplacian_dense(&path, 1.0, 0);
        let expect = DenseMatrix::from_rows(&[
            vec![q(2), q(-1), q(-1)],
            vec![q(-1), q(2), q(-1)],
            vec![q(-1), q(-1), q(2)],
        ]);
        assert_eq!(l0, expect);
        let c4 = build_flag_complex(&fixtures::cycle(4), 2).unwrap();
        assert_eq!(hodge_laplacian_dense(&c4, 1.0, 1).nullity(), 1);
        let oct = build_flag_complex(&fixtures::octahedron(), 3).unwrap();
        let l2 = hodge_laplacian_dense(&oct, 1.0, 2);
        assert!(l2.is_symmetric());
        assert_eq!(l2.nullity(), 1);
    }

    #[test]
    fn mayer_vietoris_examples() {
        let c4 = build_flag_complex(&fixtures::cycle(4), 2).unwrap();
        let (a, b) = (c4.vertex_star(0).unwrap(), c4.vertex_star(2).unwrap());
        for k in 0..=1 {
            assert!(check_mayer_vietoris(&c4, &a, &b, k).unwrap().is_exact());
            assert!(check_mayer_vietoris(&c4, &a, &a, k).unwrap().is_exact());
        }
        let oct = build_flag_complex(&fixtures::octahedron(), 3).unwrap();
        let (a, b) = (oct.vertex_star(0).unwrap(), oct.vertex_star(1).unwrap());
        for k in 0..=2 {
            assert!(check_mayer_vietoris(&oct, &a, &b, k).unwrap().is_exact(), "k={k}");
        }
        assert!(check_mayer_vietoris(&oct, &oct.closure(&a), &b, 1).is_err());
    }

    #[test]
    fn theorems_on_small_fixtures() {
        let sq = build_flag_complex(&fixtures::unit_square(), 3).unwrap();
        let st = sq.vertex_star(0).unwrap();
        let r = check_theorem_dies_earlier(&sq, &st, 1).unwrap();
        assert!(r.holds());
        assert_eq!(r.firings, vec![2f64.sqrt()]);
        assert!(check_theorem_appears_earlier(&sq, &st, 1).unwrap().holds());

        let c4 = build_flag_complex(&fixtures::cycle(4), 2).unwrap();
        for v in 0..4 {
            let st = c4.vertex_star(v).unwrap();
            assert!(check_theorem_appears_earlier(&c4, &st, 1).unwrap().holds());
            assert!(check_theorem_dies_earlier(&c4, &st, 1).unwrap().holds());
        }
        // no 2-simplices ever appear, so nothing dies in order 1
        let r = check_theorem_dies_earlier(&c4, &c4.vertex_star(0).unwrap(), 1).unwrap();
        assert!(r.firings.is_empty());
    }

    #[test]
    fn excision_examples() {
        let oct = build_flag_complex(&fixtures::octahedron(), 3).unwrap();
        let r = excision_check(&oct, 0, 2).unwrap();
        assert!(r.holds());
        assert_eq!(r.rows.last().unwrap().1, 1);
        let k3 = build_flag_complex(&fixtures::triangle(), 2).unwrap();
        for k in 0..=2 {
            let r = excision_check(&k3, 1, k).unwrap();
            assert!(r.holds());
            assert!(r.rows.iter().filter(|row| row.0 >= 1.0).all(|row| row.1 == 0));
        }
        // an edge plus the isolated vertex 2
        let lone = crate::complex::WeightedGraph::new(3, [(0, 1, 1.0)]).unwrap();
        let f = build_flag_complex(&lone, 1).unwrap();
        let r = excision_check(&f, 2, 0).unwrap();
        assert!(r.holds());
        assert!(r.rows.iter().all(|row| row.1 == 1));
    }
}
