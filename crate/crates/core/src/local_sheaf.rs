//! Stalks of persistent local cohomology and the sheaf Laplacian between
//! neighboring vertices.
//!
//! A vertex's stalk is the persistent relative cohomology of
//! `(S_t, S_t \ st v)`, computed on a truncated neighborhood. For an edge
//! `(u, v)` the extended coboundary matrix stacks the coboundaries of the
//! `(k-1)`-simplices of `D' = st u ∪ st v` next to one column per stalk
//! cocycle; reducing it pairs cocycles of `u` and `v` whose restrictions to
//! `st u ∩ st v` agree (up to sign and connecting coboundaries), together
//! with the interval over which they do. Each pair becomes a rank-one atom
//! `v_A v_B^T` of the off-diagonal Laplacian block.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Filtration, Simplex};
use crate::error::{Error, Result};
use crate::linalg::{reduce, Column, Field, ReduceOptions, SparseColumnMatrix};
use crate::persistence::{persistent_relative_cohomology, PersistentCocycle};

/// Persistent local cohomology of one vertex, orders `1..=max_order`.
///
/// Order 0 is left out: every vertex carries the relative class of the
/// vertex itself until its first edge arrives, which says nothing about the
/// local shape. Cocycle indices refer to the parent filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalStalk<F> {
    pub vertex: usize,
    pub max_order: usize,
    /// Sorted by `(order, birth, death, birth_index)`.
    pub cocycles: Vec<PersistentCocycle<F>>,
    /// Parent indices of the truncated neighborhood the stalk was computed on.
    pub neighborhood: Vec<usize>,
}

impl<F: Field> LocalStalk<F> {
    /// Cocycles of order `k`, in stalk order. Their position in this list is
    /// the cocycle index used by features and Laplacian blocks.
    pub fn of_order(&self, k: usize) -> Vec<&PersistentCocycle<F>> {
        self.cocycles.iter().filter(|c| c.order == k).collect()
    }

    pub fn dim(&self, k: usize) -> usize {
        self.cocycles.iter().filter(|c| c.order == k).count()
    }

    pub fn is_empty(&self) -> bool {
        self.cocycles.is_empty()
    }

    /// `(order, birth, death)` of the order-`k` cocycles.
    pub fn descriptors(&self, k: usize) -> Vec<(usize, f64, f64)> {
        self.of_order(k).iter().map(|c| (c.order, c.birth, c.death)).collect()
    }
}

/// Stalk of `vertex` computed on its `rings`-fold neighborhood.
pub fn compute_stalk<F: Field>(
    filtration: &Filtration,
    vertex: usize,
    max_order: usize,
    rings: usize,
    opts: &ReduceOptions,
) -> Result<LocalStalk<F>> {
    let (trunc, star) = filtration.truncate_neighborhood(&[vertex], rings)?;
    let diagram = persistent_relative_cohomology::<F>(&trunc.filtration, &star, max_order, opts)?;
    let cocycles = diagram
        .cocycles
        .into_iter()
        .filter(|c| c.order >= 1)
        .map(|c| c.remap(|i| trunc.parent_index[i]))
        .collect();
    Ok(LocalStalk { vertex, max_order, cocycles, neighborhood: trunc.parent_index })
}

/// Stalks of every vertex, computed in parallel on `threads` workers
/// (0 means all available cores). Output is in vertex order regardless of
/// scheduling.
pub fn compute_stalks<F: Field>(
    filtration: &Filtration,
    max_order: usize,
    rings: usize,
    opts: &ReduceOptions,
    threads: usize,
) -> Result<Vec<LocalStalk<F>>> {
    let vertices = filtration.vertices();
    with_pool(threads, || {
        vertices.par_iter().map(|&v| compute_stalk(filtration, v, max_order, rings, opts)).collect()
    })
}

pub(crate) fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(job)
}

/// Which block of rows of the extended matrix a row belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RowGroup {
    /// A k-simplex of `D'`.
    Shared,
    /// A (k+1)-simplex of `st u`.
    A,
    /// A (k+1)-simplex of `st v`.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RowKey {
    pub group: RowGroup,
    pub simplex: usize,
}

/// Where a column of the extended matrix came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ColumnSource {
    /// Coboundary of a (k-1)-simplex of `D'`.
    Coboundary { simplex: usize },
    /// Stalk cocycle `index` (among order `k`) of vertex `owner`.
    Cocycle { owner: usize, index: usize },
}

/// The block matrix `[B_D, B_AB]` for an edge and an order.
#[derive(Clone, Debug)]
pub struct ExtendedCoboundaryMatrix<F> {
    pub u: usize,
    pub v: usize,
    pub order: usize,
    pub matrix: SparseColumnMatrix<F>,
    /// Row keys, in row order (decreasing filtration index).
    pub rows: Vec<RowKey>,
    /// Column sources; the first `d_columns` are coboundary columns.
    pub columns: Vec<ColumnSource>,
    pub d_columns: usize,
}

/// Builds the extended coboundary matrix of the edge `(u, v)` in order `k`.
pub fn build_extended_matrix<F: Field>(
    stalk_u: &LocalStalk<F>,
    stalk_v: &LocalStalk<F>,
    filtration: &Filtration,
    k: usize,
) -> Result<ExtendedCoboundaryMatrix<F>> {
    let (u, v) = (stalk_u.vertex, stalk_v.vertex);
    if u == v {
        return Err(Error::contract(format!("sheaf block needs two distinct vertices, got {u} twice")));
    }
    let edge = Simplex::new(vec![u, v])?;
    if filtration.index_of(&edge).is_err() {
        return Err(Error::EmptyIntersection(u, v));
    }
    let star_u = filtration.vertex_star(u)?;
    let star_v = filtration.vertex_star(v)?;
    let d = filtration.union(&star_u, &star_v);

    let of_dim = |set: &[usize], dim: usize| -> Vec<usize> {
        set.iter().copied().filter(|&i| filtration.dim(i) == dim).collect()
    };
    let mut rows: Vec<RowKey> = of_dim(d.members(), k)
        .into_iter()
        .map(|simplex| RowKey { group: RowGroup::Shared, simplex })
        .chain(of_dim(star_u.members(), k + 1).into_iter().map(|simplex| RowKey { group: RowGroup::A, simplex }))
        .chain(of_dim(star_v.members(), k + 1).into_iter().map(|simplex| RowKey { group: RowGroup::B, simplex }))
        .collect();
    rows.sort_by(|a, b| b.simplex.cmp(&a.simplex).then(a.group.cmp(&b.group)));
    let row_of: BTreeMap<RowKey, usize> = rows.iter().enumerate().map(|(r, &key)| (key, r)).collect();
    let find = |group, simplex| row_of.get(&RowKey { group, simplex }).copied();

    let mut columns = Vec::new();
    let mut data: Vec<Column<F>> = Vec::new();

    if k >= 1 {
        let mut lower = of_dim(d.members(), k - 1);
        lower.sort_unstable_by(|a, b| b.cmp(a));
        for s in lower {
            let col: Column<F> = filtration
                .cofacets(s)
                .iter()
                .filter_map(|&c| {
                    let r = find(RowGroup::Shared, c)?;
                    let pos = filtration.facets(c).iter().position(|&x| x == s).expect("facet");
                    Some((r, F::from_i64(if pos % 2 == 0 { 1 } else { -1 })))
                })
                .collect();
            columns.push(ColumnSource::Coboundary { simplex: s });
            data.push(sorted(col));
        }
    }
    let d_columns = columns.len();

    let mut cocycle_cols: Vec<(f64, usize, usize, Column<F>)> = Vec::new();
    for (stalk, group) in [(stalk_u, RowGroup::A), (stalk_v, RowGroup::B)] {
        for (index, c) in stalk.of_order(k).into_iter().enumerate() {
            let mut col: Column<F> = Vec::new();
            for (s, x) in &c.representative {
                let r = find(RowGroup::Shared, *s)
                    .ok_or_else(|| Error::contract(format!("stalk of {} has a cocycle outside its star", stalk.vertex)))?;
                col.push((r, x.clone()));
            }
            for (s, x) in &c.coboundary {
                let r = find(group, *s)
                    .ok_or_else(|| Error::contract(format!("stalk of {} has a coboundary outside its star", stalk.vertex)))?;
                col.push((r, x.clone()));
            }
            cocycle_cols.push((c.birth, stalk.vertex, index, sorted(col)));
        }
    }
    // decreasing birth; equal births by owner vertex, then cocycle index
    cocycle_cols.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (_, owner, index, col) in cocycle_cols {
        columns.push(ColumnSource::Cocycle { owner, index });
        data.push(col);
    }
    let matrix = SparseColumnMatrix::new(rows.len(), data)?;
    Ok(ExtendedCoboundaryMatrix { u, v, order: k, matrix, rows, columns, d_columns })
}

fn sorted<F>(mut col: Column<F>) -> Column<F> {
    col.sort_by_key(|&(i, _)| i);
    col
}

/// Half-open interval `[start, end)`; `end` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.end
    }

    pub fn meet(&self, other: &Interval) -> Interval {
        Interval::new(self.start.max(other.start), self.end.min(other.end))
    }

    /// Length with an infinite end cut off at `horizon`.
    pub fn length(&self, horizon: f64) -> f64 {
        (self.end.min(horizon) - self.start).max(0.0)
    }
}

/// One rank-one piece `v_A v_B^T`, valid on `interval`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom<F> {
    /// Coefficients over the order-k cocycles of `u`.
    pub v_a: Vec<(usize, F)>,
    /// Coefficients over the order-k cocycles of `v`.
    pub v_b: Vec<(usize, F)>,
    pub interval: Interval,
}

/// `(a, b)` entry of an atom with its own validity interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntryInterval {
    pub a: usize,
    pub b: usize,
    pub interval: Interval,
}

/// Sheaf Laplacian data of the edge `(u, v)` in order `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SheafLaplacianBlock<F> {
    pub u: usize,
    pub v: usize,
    pub order: usize,
    pub atoms: Vec<Atom<F>>,
    /// Lifespans of the order-k cocycles of `u` and `v`.
    pub lifespans_u: Vec<Interval>,
    pub lifespans_v: Vec<Interval>,
}

impl<F: Field> SheafLaplacianBlock<F> {
    pub fn dims(&self) -> (usize, usize) {
        (self.lifespans_u.len(), self.lifespans_v.len())
    }

    /// Per-entry validity of the off-diagonal entries of atom `i`.
    pub fn entry_intervals(&self, i: usize) -> Vec<EntryInterval> {
        let atom = &self.atoms[i];
        let mut out = Vec::new();
        for (a, _) in &atom.v_a {
            for (b, _) in &atom.v_b {
                let interval = atom.interval.meet(&self.lifespans_u[*a]).meet(&self.lifespans_v[*b]);
                out.push(EntryInterval { a: *a, b: *b, interval });
            }
        }
        out
    }
}

/// Reduces the extended matrix of `(u, v)` and reads off the atoms.
pub fn sheaf_laplacian_block<F: Field>(
    stalk_u: &LocalStalk<F>,
    stalk_v: &LocalStalk<F>,
    filtration: &Filtration,
    k: usize,
    opts: &ReduceOptions,
) -> Result<SheafLaplacianBlock<F>> {
    let ext = build_extended_matrix(stalk_u, stalk_v, filtration, k)?;
    let red = reduce(&ext.matrix, opts)?;
    let lifespan = |c: &&PersistentCocycle<F>| Interval::new(c.birth, c.death);
    let lifespans_u: Vec<Interval> = stalk_u.of_order(k).iter().map(lifespan).collect();
    let lifespans_v: Vec<Interval> = stalk_v.of_order(k).iter().map(lifespan).collect();

    let mut atoms = Vec::new();
    for j in ext.d_columns..ext.columns.len() {
        let mut v_a = Vec::new();
        let mut v_b = Vec::new();
        for (c, x) in red.v.column(j) {
            // coboundary-column parts are the connecting corrections; dropped
            if let ColumnSource::Cocycle { owner, index } = ext.columns[*c] {
                if owner == ext.u {
                    v_a.push((index, x.clone()));
                } else {
                    v_b.push((index, x.clone()));
                }
            }
        }
        v_a.sort_by_key(|e| e.0);
        v_b.sort_by_key(|e| e.0);
        let first_birth = |v: &[(usize, F)], spans: &[Interval]| {
            v.iter().map(|(i, _)| spans[*i].start).fold(f64::INFINITY, f64::min)
        };
        let s_a = first_birth(&v_a, &lifespans_u);
        let s_b = first_birth(&v_b, &lifespans_v);
        let start = match (v_a.is_empty(), v_b.is_empty()) {
            (false, false) => s_a.max(s_b),
            (false, true) => s_a,
            _ => s_b,
        };
        let end = red.pivot(j).map_or(f64::INFINITY, |r| filtration.value(ext.rows[r].simplex));
        let interval = Interval::new(start, end);
        if !interval.is_empty() {
            atoms.push(Atom { v_a, v_b, interval });
        }
    }
    Ok(SheafLaplacianBlock { u: ext.u, v: ext.v, order: k, atoms, lifespans_u, lifespans_v })
}

/// `Σ_i v_A|t (v_B|t)^T` over the atoms valid at `t`, as a dense
/// `dim_u x dim_v` matrix.
pub fn laplacian_at_time<F: Field>(block: &SheafLaplacianBlock<F>, t: f64) -> Vec<Vec<F>> {
    let (du, dv) = block.dims();
    let mut m = vec![vec![F::zero(); dv]; du];
    for atom in block.atoms.iter().filter(|a| a.interval.contains(t)) {
        for (a, x) in atom.v_a.iter().filter(|(a, _)| block.lifespans_u[*a].contains(t)) {
            for (b, y) in atom.v_b.iter().filter(|(b, _)| block.lifespans_v[*b].contains(t)) {
                m[*a][*b] = m[*a][*b].clone() + x.clone() * y.clone();
            }
        }
    }
    m
}

/// Blocks of every edge, computed in parallel, in edge order.
pub fn laplacian_blocks<F: Field>(
    filtration: &Filtration,
    stalks: &[LocalStalk<F>],
    k: usize,
    opts: &ReduceOptions,
    threads: usize,
) -> Result<Vec<SheafLaplacianBlock<F>>> {
    let lookup = stalk_lookup(filtration, stalks)?;
    let edges: Vec<(usize, usize)> = (0..filtration.len())
        .filter(|&i| filtration.dim(i) == 1)
        .map(|i| {
            let s = filtration.simplex(i).vertices();
            (s[0], s[1])
        })
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    with_pool(threads, || {
        edges
            .par_iter()
            .map(|&(u, v)| sheaf_laplacian_block(&stalks[lookup[&u]], &stalks[lookup[&v]], filtration, k, opts))
            .collect()
    })
}

fn stalk_lookup<F>(filtration: &Filtration, stalks: &[LocalStalk<F>]) -> Result<BTreeMap<usize, usize>> {
    let lookup: BTreeMap<usize, usize> = stalks.iter().enumerate().map(|(i, s)| (s.vertex, i)).collect();
    if let Some(v) = filtration.vertices().into_iter().find(|v| !lookup.contains_key(v)) {
        return Err(Error::contract(format!("no stalk for vertex {v}")));
    }
    Ok(lookup)
}

/// How to turn interval-tagged atoms into one operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LaplacianMode {
    /// Atoms and cocycles alive at `t`.
    Slice(f64),
    /// Every entry weighted by its overlap with the row cocycle's lifespan.
    Weighted,
}

/// The Laplacian over the direct sum of all order-k stalks, vertex-major.
#[derive(Clone, Debug)]
pub struct AssembledLaplacian<F> {
    pub order: usize,
    pub mode: LaplacianMode,
    /// `offsets[i]..offsets[i + 1]` are the coordinates of `vertices[i]`.
    pub vertices: Vec<usize>,
    pub offsets: Vec<usize>,
    /// Lifespan of the cocycle behind each coordinate.
    pub lifespans: Vec<Interval>,
    pub matrix: SparseColumnMatrix<F>,
}

impl<F: Field> AssembledLaplacian<F> {
    pub fn dim(&self) -> usize {
        self.lifespans.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<F>> {
        self.matrix.to_dense()
    }

    /// Coordinates whose cocycle is alive at `t`.
    pub fn alive_at(&self, t: f64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.lifespans[i].contains(t)).collect()
    }

    /// The operator restricted to the coordinates alive at the slice time
    /// (all coordinates in weighted mode).
    pub fn alive_part(&self) -> SparseColumnMatrix<F> {
        let keep = match self.mode {
            LaplacianMode::Slice(t) => self.alive_at(t),
            LaplacianMode::Weighted => (0..self.dim()).collect(),
        };
        self.matrix.restrict_rows_cols(&keep, &keep).expect("indices in range")
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::contract(format!("feature length {} does not match Laplacian size {}", x.len(), self.dim())));
        }
        let mut y = vec![0.0; self.dim()];
        for (j, col) in self.matrix.columns().iter().enumerate() {
            for (i, a) in col {
                y[*i] += a.to_f64() * x[j];
            }
        }
        Ok(y)
    }

    pub fn is_symmetric(&self) -> bool {
        self.matrix.transpose() == self.matrix
    }
}

/// Assembles the global operator from all edge blocks.
///
/// In slice mode this is `δ^T δ` for the coboundary `δ` that sends `x` to
/// `<v_A|t, x_u> + <v_B|t, x_v>` on every atom of every edge; so the
/// off-diagonal blocks are `Σ v_A v_B^T` and the diagonal blocks collect
/// `v_A v_A^T` and `v_B v_B^T`. Weighted mode multiplies entry `(a, b)` of
/// every contribution by the length of its validity interval over the
/// lifespan of the row cocycle `a`, with `t⁺` standing in for infinity.
/// That is an average over the output cocycle's lifespan, so the weighted
/// operator is symmetric only after scaling row `a` by that lifespan.
pub fn assemble_laplacian<F: Field>(
    filtration: &Filtration,
    stalks: &[LocalStalk<F>],
    blocks: &[SheafLaplacianBlock<F>],
    k: usize,
    mode: LaplacianMode,
) -> Result<AssembledLaplacian<F>> {
    let lookup = stalk_lookup(filtration, stalks)?;
    let vertices: Vec<usize> = lookup.keys().copied().collect();
    let mut offsets = vec![0];
    let mut lifespans = Vec::new();
    let mut offset_of = BTreeMap::new();
    for &v in &vertices {
        offset_of.insert(v, *offsets.last().expect("nonempty"));
        for c in stalks[lookup[&v]].of_order(k) {
            lifespans.push(Interval::new(c.birth, c.death));
        }
        offsets.push(lifespans.len());
    }
    let horizon = filtration.horizon();
    let weight = |row: usize, entry: Interval| -> Option<f64> {
        match mode {
            LaplacianMode::Slice(t) => entry.contains(t).then_some(1.0),
            LaplacianMode::Weighted => {
                let life = lifespans[row];
                let span = life.end.min(horizon) - life.start;
                if span > 0.0 {
                    let w = entry.length(horizon) / span;
                    (w > 0.0).then_some(w)
                } else {
                    // an essential class born at t⁺ has no lifespan to average over
                    entry.contains(horizon).then_some(1.0)
                }
            }
        }
    };

    let mut acc: BTreeMap<(usize, usize), F> = BTreeMap::new();
    let mut add = |row: usize, col: usize, x: F| {
        let e = acc.entry((col, row)).or_insert_with(F::zero);
        *e = e.clone() + x;
    };
    for block in blocks.iter().filter(|b| b.order == k) {
        let (ou, ov) = (
            *offset_of.get(&block.u).ok_or_else(|| Error::contract(format!("no stalk for vertex {}", block.u)))?,
            *offset_of.get(&block.v).ok_or_else(|| Error::contract(format!("no stalk for vertex {}", block.v)))?,
        );
        for atom in &block.atoms {
            let sides = [(ou, &atom.v_a), (ov, &atom.v_b)];
            for (or, vr) in sides {
                for (oc, vc) in sides {
                    for (a, x) in vr.iter() {
                        for (b, y) in vc.iter() {
                            let (r, c) = (or + a, oc + b);
                            let entry = atom.interval.meet(&lifespans[r]).meet(&lifespans[c]);
                            if let Some(w) = weight(r, entry) {
                                let mut val = x.clone() * y.clone();
                                if w != 1.0 {
                                    val = val * F::from_f64(w);
                                }
                                add(r, c, val);
                            }
                        }
                    }
                }
            }
        }
    }
    let n = lifespans.len();
    let mut cols: Vec<Column<F>> = vec![Vec::new(); n];
    for ((c, r), x) in acc {
        if !x.is_zero() {
            cols[c].push((r, x));
        }
    }
    let matrix = SparseColumnMatrix::new(n, cols)?;
    Ok(AssembledLaplacian { order: k, mode, vertices, offsets, lifespans, matrix })
}

/// JSON form of the block list.
#[derive(Clone, Debug, Serialize)]
pub struct LaplacianDump {
    pub order: usize,
    pub stalk_dims: BTreeMap<String, usize>,
    pub blocks: Vec<BlockDump>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockDump {
    pub u: usize,
    pub v: usize,
    pub atoms: Vec<AtomDump>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomDump {
    /// `[start, end]`, with an infinite end written as `"inf"`.
    pub interval: (serde_json::Value, serde_json::Value),
    #[serde(rename = "vA")]
    pub v_a: Vec<f64>,
    #[serde(rename = "vB")]
    pub v_b: Vec<f64>,
}

/// Dump of the nonempty blocks. Atom vectors are written densely over the
/// stalk's order-k cocycles.
pub fn laplacian_dump<F: Field>(stalks: &[LocalStalk<F>], blocks: &[SheafLaplacianBlock<F>], k: usize) -> LaplacianDump {
    let stalk_dims = stalks.iter().map(|s| (s.vertex.to_string(), s.dim(k))).collect();
    let dense = |v: &[(usize, F)], n: usize| {
        let mut out = vec![0.0; n];
        for (i, x) in v {
            out[*i] = x.to_f64();
        }
        out
    };
    let blocks = blocks
        .iter()
        .filter(|b| b.order == k && !b.atoms.is_empty())
        .map(|b| {
            let (du, dv) = b.dims();
            BlockDump {
                u: b.u,
                v: b.v,
                atoms: b
                    .atoms
                    .iter()
                    .map(|a| AtomDump {
                        interval: (crate::io::float_value(a.interval.start), crate::io::float_value(a.interval.end)),
                        v_a: dense(&a.v_a, du),
                        v_b: dense(&a.v_b, dv),
                    })
                    .collect(),
            }
        })
        .collect();
    LaplacianDump { order: k, stalk_dims, blocks }
}
