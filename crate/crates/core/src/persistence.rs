//! Persistent cohomology and persistent relative cohomology with
//! representative cocycles.
//!
//! The coboundary matrix is reduced with rows and columns in decreasing
//! filtration order. A nonzero reduced column pairs its simplex (birth) with
//! its pivot (death); a zero column whose simplex is nobody's pivot is an
//! essential class. Relative cohomology of `(S_t, S_t \ U)` for an open `U`
//! comes from the same reduction restricted to the simplices of `U`.

use crate::complex::{Filtration, SimplexSubset};
use crate::error::{Error, Result};
use crate::linalg::{reduce_graded, Column, Field, ReduceOptions, SparseColumnMatrix};

/// A persistent class with its representative cocycle.
///
/// Indices refer to the filtration the class was computed on.
#[derive(Clone, Debug, PartialEq)]
pub struct PersistentCocycle<F> {
    pub order: usize,
    pub birth: f64,
    /// `f64::INFINITY` for essential classes.
    pub death: f64,
    pub birth_index: usize,
    pub death_index: Option<usize>,
    /// Cochain over `order`-simplices, sorted by simplex index.
    pub representative: Vec<(usize, F)>,
    /// Its coboundary over `(order + 1)`-simplices; empty for essential classes.
    pub coboundary: Vec<(usize, F)>,
}

impl<F> PersistentCocycle<F> {
    pub fn is_essential(&self) -> bool {
        self.death_index.is_none()
    }

    /// Whether the class is alive at `t`, i.e. `birth <= t < death`.
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }

    /// Death time, with essential classes cut off at `horizon`.
    pub fn finite_death(&self, horizon: f64) -> f64 {
        if self.is_essential() {
            horizon
        } else {
            self.death
        }
    }

    pub(crate) fn remap(self, map: impl Fn(usize) -> usize) -> Self {
        Self {
            birth_index: map(self.birth_index),
            death_index: self.death_index.map(&map),
            representative: self.representative.into_iter().map(|(i, x)| (map(i), x)).collect(),
            coboundary: self.coboundary.into_iter().map(|(i, x)| (map(i), x)).collect(),
            ..self
        }
    }
}

/// Persistence diagram with representatives, sorted by
/// `(order, birth, death, birth_index)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram<F> {
    pub cocycles: Vec<PersistentCocycle<F>>,
    /// `(birth_index, death_index)` of pairs with equal birth and death values.
    pub zero_length: Vec<(usize, usize)>,
    /// Largest filtration value of the underlying filtration.
    pub horizon: f64,
}

impl<F: Field> Diagram<F> {
    pub fn of_order(&self, k: usize) -> impl Iterator<Item = &PersistentCocycle<F>> {
        self.cocycles.iter().filter(move |c| c.order == k)
    }

    /// Number of order-`k` classes alive at `t`.
    pub fn betti_at(&self, t: f64, k: usize) -> usize {
        self.of_order(k).filter(|c| c.alive_at(t)).count()
    }

    /// Sorted `(order, birth, death)` triples.
    pub fn triples(&self) -> Vec<(usize, f64, f64)> {
        let mut v: Vec<_> = self.cocycles.iter().map(|c| (c.order, c.birth, c.death)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
        v
    }
}

/// Free-function form of [`Diagram::betti_at`].
pub fn betti_at<F: Field>(diagram: &Diagram<F>, t: f64, k: usize) -> usize {
    diagram.betti_at(t, k)
}

/// Persistent cohomology of the filtration in orders `0..=max_order`.
pub fn persistent_cohomology<F: Field>(
    filtration: &Filtration,
    max_order: usize,
    opts: &ReduceOptions,
) -> Result<Diagram<F>> {
    check_order(filtration, max_order)?;
    let members: Vec<usize> = (0..filtration.len()).collect();
    reduce_cochains(filtration, &members, max_order, opts)
}

/// Persistent cohomology of the pairs `(S_t, S_t \ U)` for an open set `U`.
pub fn persistent_relative_cohomology<F: Field>(
    filtration: &Filtration,
    open_set: &SimplexSubset,
    max_order: usize,
    opts: &ReduceOptions,
) -> Result<Diagram<F>> {
    check_order(filtration, max_order)?;
    if !open_set.is_open() {
        return Err(Error::contract("relative cohomology needs an open subset"));
    }
    reduce_cochains(filtration, open_set.members(), max_order, opts)
}

fn check_order(filtration: &Filtration, max_order: usize) -> Result<()> {
    if max_order + 1 > filtration.dim_cap() {
        return Err(Error::contract(format!(
            "order {max_order} needs simplices of dimension {} but the complex is capped at {}",
            max_order + 1,
            filtration.dim_cap()
        )));
    }
    Ok(())
}

/// Coboundary matrix on `members` (up to dimension `max_order + 1`), indexed
/// in decreasing filtration order. Returns the matrix, the parent index of
/// each local index and the column grades (dimensions).
pub(crate) fn coboundary_matrix<F: Field>(
    filtration: &Filtration,
    members: &[usize],
    max_dim: usize,
) -> (SparseColumnMatrix<F>, Vec<usize>, Vec<usize>) {
    let mut parent: Vec<usize> = members.iter().copied().filter(|&i| filtration.dim(i) <= max_dim).collect();
    parent.sort_unstable_by(|a, b| b.cmp(a));
    let mut local = vec![usize::MAX; filtration.len()];
    for (l, &p) in parent.iter().enumerate() {
        local[p] = l;
    }
    let cols: Vec<Column<F>> = parent
        .iter()
        .map(|&p| {
            let mut col: Column<F> = filtration
                .cofacets(p)
                .iter()
                .filter(|&&c| local[c] != usize::MAX)
                .map(|&c| {
                    let pos = filtration.facets(c).iter().position(|&x| x == p).expect("facet");
                    (local[c], F::from_i64(if pos % 2 == 0 { 1 } else { -1 }))
                })
                .collect();
            col.sort_by_key(|&(i, _)| i);
            col
        })
        .collect();
    let grades = parent.iter().map(|&p| filtration.dim(p)).collect();
    let n = parent.len();
    (SparseColumnMatrix::new(n, cols).expect("well-formed coboundary"), parent, grades)
}

fn reduce_cochains<F: Field>(
    filtration: &Filtration,
    members: &[usize],
    max_order: usize,
    opts: &ReduceOptions,
) -> Result<Diagram<F>> {
    let (matrix, parent, grades) = coboundary_matrix::<F>(filtration, members, max_order + 1);
    let red = reduce_graded(&matrix, &grades, opts)?;
    let to_parent = |col: &[(usize, F)]| -> Vec<(usize, F)> {
        let mut v: Vec<(usize, F)> = col.iter().map(|(i, x)| (parent[*i], x.clone())).collect();
        v.sort_by_key(|&(i, _)| i);
        v
    };
    let mut cocycles = Vec::new();
    let mut zero_length = Vec::new();
    for (j, &p) in parent.iter().enumerate() {
        let order = filtration.dim(p);
        if order > max_order {
            continue;
        }
        let birth = filtration.value(p);
        match red.pivot(j) {
            Some(row) => {
                let q = parent[row];
                let death = filtration.value(q);
                if death == birth {
                    zero_length.push((p, q));
                    continue;
                }
                cocycles.push(PersistentCocycle {
                    order,
                    birth,
                    death,
                    birth_index: p,
                    death_index: Some(q),
                    representative: to_parent(red.v.column(j)),
                    coboundary: to_parent(red.r.column(j)),
                });
            }
            None if red.owner_of_row(j).is_none() => cocycles.push(PersistentCocycle {
                order,
                birth,
                death: f64::INFINITY,
                birth_index: p,
                death_index: None,
                representative: to_parent(red.v.column(j)),
                coboundary: Vec::new(),
            }),
            None => {}
        }
    }
    cocycles.sort_by(|a, b| {
        a.order
            .cmp(&b.order)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
            .then(a.birth_index.cmp(&b.birth_index))
    });
    zero_length.sort_unstable();
    Ok(Diagram { cocycles, zero_length, horizon: filtration.horizon() })
}
