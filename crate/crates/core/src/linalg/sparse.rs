use std::fmt::Write as _;

use super::field::Field;
use crate::error::{Error, Result};

/// Sorted `(row, value)` pairs with no stored zeros.
pub type Column<F> = Vec<(usize, F)>;

/// Column-major sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseColumnMatrix<F> {
    rows: usize,
    cols: Vec<Column<F>>,
}

impl<F: Field> SparseColumnMatrix<F> {
    /// Checks that every column has strictly increasing in-range row indices
    /// and no explicit zeros.
    pub fn new(rows: usize, cols: Vec<Column<F>>) -> Result<Self> {
        for (j, col) in cols.iter().enumerate() {
            if col.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(Error::contract(format!("column {j} rows are not strictly increasing")));
            }
            if let Some(&(r, _)) = col.last() {
                if r >= rows {
                    return Err(Error::contract(format!("column {j} has row {r} >= {rows}")));
                }
            }
            if col.iter().any(|(_, v)| v.is_zero()) {
                return Err(Error::contract(format!("column {j} stores a zero")));
            }
        }
        Ok(Self { rows, cols })
    }

    pub(crate) fn from_parts_unchecked(rows: usize, cols: Vec<Column<F>>) -> Self {
        Self { rows, cols }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: (0..n).map(|i| vec![(i, F::one())]).collect() }
    }

    pub fn from_dense(rows: usize, data: &[Vec<F>]) -> Result<Self> {
        let ncols = data.first().map_or(0, Vec::len);
        if data.len() != rows || data.iter().any(|r| r.len() != ncols) {
            return Err(Error::contract("ragged dense matrix"));
        }
        let cols = (0..ncols)
            .map(|j| {
                (0..rows)
                    .filter(|&i| !data[i][j].is_zero())
                    .map(|i| (i, data[i][j].clone()))
                    .collect()
            })
            .collect();
        Ok(Self { rows, cols })
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, F)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Column<F>] {
        &self.cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        match self.cols[j].binary_search_by_key(&i, |&(r, _)| r) {
            Ok(k) => self.cols[j][k].1.clone(),
            Err(_) => F::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<F>> {
        let mut out = vec![vec![F::zero(); self.cols.len()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                out[*i][j] = v.clone();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<Column<F>> = vec![Vec::new(); self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                cols[*i].push((j, v.clone()));
            }
        }
        Self { rows: self.cols.len(), cols }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols.len() != other.rows {
            return Err(Error::contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols.len(),
                other.rows,
                other.cols.len()
            )));
        }
        let cols = other
            .cols
            .iter()
            .map(|ocol| {
                let mut acc = vec![F::zero(); self.rows];
                for (k, b) in ocol {
                    for (i, a) in &self.cols[*k] {
                        acc[*i] = acc[*i].clone() + a.clone() * b.clone();
                    }
                }
                acc.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Ok(Self { rows: self.rows, cols })
    }

    /// Submatrix on the given row and column index sets, re-enumerated in
    /// their original order.
    pub fn restrict_rows_cols(&self, keep_rows: &[usize], keep_cols: &[usize]) -> Result<Self> {
        let mut row_map = vec![None; self.rows];
        let mut rows: Vec<usize> = keep_rows.to_vec();
        rows.sort_unstable();
        rows.dedup();
        for (new, &old) in rows.iter().enumerate() {
            *row_map
                .get_mut(old)
                .ok_or_else(|| Error::contract(format!("row {old} out of range")))? = Some(new);
        }
        let mut cols: Vec<usize> = keep_cols.to_vec();
        cols.sort_unstable();
        cols.dedup();
        let out = cols
            .iter()
            .map(|&j| {
                let col = self
                    .cols
                    .get(j)
                    .ok_or_else(|| Error::contract(format!("column {j} out of range")))?;
                Ok(col
                    .iter()
                    .filter_map(|(i, v)| row_map[*i].map(|r| (r, v.clone())))
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows: rows.len(), cols: out })
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> SparseColumnMatrix<G> {
        SparseColumnMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .map(|c| c.iter().map(|(i, v)| (*i, f(v))).filter(|(_, v)| !v.is_zero()).collect())
                .collect(),
        }
    }

    /// MatrixMarket coordinate dump (1-based indices, real values).
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
        let _ = writeln!(s, "{} {} {}", self.rows, self.cols.len(), self.nnz());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                let _ = writeln!(s, "{} {} {:?}", i + 1, j + 1, v.to_f64());
            }
        }
        s
    }
}

impl SparseColumnMatrix<f64> {
    pub fn from_matrix_market(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.starts_with('%') && !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::contract("empty MatrixMarket input"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::contract(format!("bad header {header:?}"))))
            .collect::<Result<_>>()?;
        let [rows, ncols, _] = dims[..] else {
            return Err(Error::contract(format!("bad header {header:?}")));
        };
        let mut cols: Vec<Column<f64>> = vec![Vec::new(); ncols];
        for line in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::contract(format!("bad entry {line:?}"));
            if t.len() != 3 {
                return Err(bad());
            }
            let i: usize = t[0].parse().map_err(|_| bad())?;
            let j: usize = t[1].parse().map_err(|_| bad())?;
            let v: f64 = t[2].parse().map_err(|_| bad())?;
            if i == 0 || j == 0 || j > ncols {
                return Err(bad());
            }
            cols[j - 1].push((i - 1, v));
        }
        for c in &mut cols {
            c.sort_by_key(|&(i, _)| i);
        }
        Self::new(rows, cols)
    }
}
