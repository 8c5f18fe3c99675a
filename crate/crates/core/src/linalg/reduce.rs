//! Left-to-right column reduction `R = M * V`.

use super::field::Field;
use super::sparse::{Column, SparseColumnMatrix};
use crate::error::{Error, Result};

/// Tolerance and optimization switches for [`reduce`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReduceOptions {
    /// Float carrier only: entries at most `eps` times the column's largest
    /// magnitude are dropped, and entries above `1/eps` abort the reduction.
    pub eps: f64,
    /// Skip columns already known to reduce to zero (see [`reduce_graded`]).
    pub clearing: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self { eps: 1e-9, clearing: false }
    }
}

/// Result of a reduction: `r = m * v` with `v` unit upper triangular and the
/// nonzero columns of `r` having pairwise distinct lowest rows.
#[derive(Clone, Debug)]
pub struct Reduction<F> {
    pub r: SparseColumnMatrix<F>,
    pub v: SparseColumnMatrix<F>,
    /// `pivot_owner[row]` is the column whose lowest nonzero is `row`.
    pivot_owner: Vec<Option<usize>>,
}

impl<F: Field> Reduction<F> {
    /// Lowest nonzero row of column `j` of R.
    pub fn pivot(&self, j: usize) -> Option<usize> {
        self.r.column(j).last().map(|&(i, _)| i)
    }

    pub fn owner_of_row(&self, row: usize) -> Option<usize> {
        self.pivot_owner[row]
    }

    pub fn rank(&self) -> usize {
        self.pivot_owner.iter().flatten().count()
    }

    /// `(column, pivot row)` pairs in column order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.r.col_count()).filter_map(|j| self.pivot(j).map(|p| (j, p))).collect()
    }
}

/// `target + factor * source`, dropping negligible results.
fn axpy<F: Field>(target: &[(usize, F)], factor: &F, source: &[(usize, F)], eps: f64) -> Result<Column<F>> {
    let scale = if F::EXACT {
        0.0
    } else {
        let t = target.iter().map(|(_, v)| v.magnitude()).fold(0.0, f64::max);
        let s = source.iter().map(|(_, v)| v.magnitude()).fold(0.0, f64::max) * factor.magnitude();
        t.max(s)
    };
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut a, mut b) = (target.iter().peekable(), source.iter().peekable());
    loop {
        let next = match (a.peek(), b.peek()) {
            (Some(&&(i, ref x)), Some(&&(j, ref y))) => {
                if i < j {
                    a.next();
                    (i, x.clone())
                } else if j < i {
                    b.next();
                    (j, factor.clone() * y.clone())
                } else {
                    a.next();
                    b.next();
                    (i, x.clone() + factor.clone() * y.clone())
                }
            }
            (Some(&&(i, ref x)), None) => {
                a.next();
                (i, x.clone())
            }
            (None, Some(&&(j, ref y))) => {
                b.next();
                (j, factor.clone() * y.clone())
            }
            (None, None) => break,
        };
        if next.1.is_negligible(scale, eps) {
            continue;
        }
        if !F::EXACT {
            let m = next.1.magnitude();
            if m > 1.0 / eps || !m.is_finite() {
                return Err(Error::IllConditioned { magnitude: m });
            }
        }
        out.push(next);
    }
    Ok(out)
}

/// Standard persistence reduction of `matrix`, columns left to right.
pub fn reduce<F: Field>(matrix: &SparseColumnMatrix<F>, opts: &ReduceOptions) -> Result<Reduction<F>> {
    let grades = vec![0; matrix.col_count()];
    reduce_graded(matrix, &grades, &ReduceOptions { clearing: false, ..*opts })
}

/// Reduction processing columns grade by grade (ascending), left to right
/// within a grade.
///
/// With `opts.clearing`, the matrix must be square with `M * M = 0` (a
/// coboundary over one index set), and columns are graded by dimension so that
/// column `j` only ever meets rows of grade `grade(j) + 1`. A column whose
/// index already appeared as a pivot row of a lower grade is then set to zero
/// without reduction, and its V column to the R column owning that pivot.
pub fn reduce_graded<F: Field>(
    matrix: &SparseColumnMatrix<F>,
    grades: &[usize],
    opts: &ReduceOptions,
) -> Result<Reduction<F>> {
    let n = matrix.col_count();
    if grades.len() != n {
        return Err(Error::contract("one grade per column required"));
    }
    if opts.clearing && matrix.row_count() != n {
        return Err(Error::contract("clearing needs a square matrix"));
    }
    let mut r: Vec<Column<F>> = matrix.columns().to_vec();
    let mut v: Vec<Column<F>> = (0..n).map(|j| vec![(j, F::one())]).collect();
    let mut pivot_owner: Vec<Option<usize>> = vec![None; matrix.row_count()];

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (grades[j], j));
    for j in order {
        if opts.clearing {
            if let Some(i) = pivot_owner[j] {
                if grades[i] < grades[j] {
                    let lead = r[i].last().expect("owner column is nonzero").1.clone();
                    v[j] = r[i].iter().map(|(k, x)| (*k, x.clone() / lead.clone())).collect();
                    r[j].clear();
                    continue;
                }
            }
        }
        let mut col = std::mem::take(&mut r[j]);
        let mut vcol = std::mem::take(&mut v[j]);
        while let Some((p, x)) = col.last().cloned() {
            match pivot_owner[p] {
                Some(i) => {
                    let lead = r[i].last().expect("owner column is nonzero").1.clone();
                    let factor = -(x / lead);
                    col = axpy(&col, &factor, &r[i], opts.eps)?;
                    if col.last().is_some_and(|&(k, _)| k == p) {
                        // float round-off can leave a residue on the cancelled pivot
                        col.pop();
                    }
                    vcol = axpy(&vcol, &factor, &v[i], opts.eps)?;
                }
                None => {
                    pivot_owner[p] = Some(j);
                    break;
                }
            }
        }
        r[j] = col;
        v[j] = vcol;
    }
    Ok(Reduction {
        r: SparseColumnMatrix::from_parts_unchecked(matrix.row_count(), r),
        v: SparseColumnMatrix::from_parts_unchecked(n, v),
        pivot_owner,
    })
}

/// Number of pivot columns after reduction.
pub fn rank<F: Field>(matrix: &SparseColumnMatrix<F>, opts: &ReduceOptions) -> Result<usize> {
    Ok(reduce(matrix, opts)?.rank())
}
