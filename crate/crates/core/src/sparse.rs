//! Compressed sparse row storage and a triplet builder.

use std::io::{BufRead, Write};

use crate::{Error, Result};

/// Triplet accumulator. Duplicates are summed on compression.
#[derive(Debug, Clone, Default)]
pub struct Triplets {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols, "({i},{j}) out of range");
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    /// Add `block` with its origin at `(r0, c0)`.
    pub fn push_block(&mut self, r0: usize, c0: usize, block: &CsrMatrix, scale: f64) {
        for i in 0..block.nrows {
            for (j, v) in block.row(i) {
                self.push(r0 + i, c0 + j, scale * v);
            }
        }
    }

    pub fn extend(&mut self, other: Triplets) {
        self.entries.extend(other.entries);
    }

    /// Sort by `(row, col)` and sum duplicates. Summation order within a
    /// duplicate group is the insertion order, so the result does not depend
    /// on how the triplets were produced as long as that order is fixed.
    pub fn to_csr(mut self) -> CsrMatrix {
        self.entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Triplets::new(nrows, ncols).to_csr()
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Triplets::new(n, n);
        for i in 0..n {
            t.push(i, i, 1.0);
        }
        t.to_csr()
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut t = Triplets::new(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                t.push(i, j, v);
            }
        }
        t.to_csr()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `self^T x`
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            for (j, v) in self.row(i) {
                y[j] += v * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut t = Triplets::new(self.ncols, self.nrows);
        for (i, j, v) in self.triplets() {
            t.push(j, i, v);
        }
        t.to_csr()
    }

    pub fn scale(&self, s: f64) -> CsrMatrix {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= s);
        m
    }

    pub fn matmul(&self, rhs: &CsrMatrix) -> Result<CsrMatrix> {
        if self.ncols != rhs.nrows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.nrows, self.ncols, rhs.nrows, rhs.ncols
            )));
        }
        let mut t = Triplets::new(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in rhs.row(k) {
                    t.push(i, j, a * b);
                }
            }
        }
        Ok(t.to_csr())
    }

    pub fn add(&self, rhs: &CsrMatrix, scale: f64) -> Result<CsrMatrix> {
        if self.nrows != rhs.nrows || self.ncols != rhs.ncols {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let mut t = Triplets::new(self.nrows, self.ncols);
        t.push_block(0, 0, self, 1.0);
        t.push_block(0, 0, rhs, scale);
        Ok(t.to_csr())
    }

    /// Largest `|A_ij - A_ji|`, or infinity for non-square matrices.
    pub fn asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }

    /// Symmetric permutation `P A P^T` with `new_index = perm[old_index]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> CsrMatrix {
        let mut t = Triplets::new(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            t.push(perm[i], perm[j], v);
        }
        t.to_csr()
    }

    /// Restrict to the listed rows and columns, renumbered in list order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            col_map[c] = k;
        }
        let mut t = Triplets::new(rows.len(), cols.len());
        for (k, &r) in rows.iter().enumerate() {
            for (j, v) in self.row(r) {
                if col_map[j] != usize::MAX {
                    t.push(k, col_map[j], v);
                }
            }
        }
        t.to_csr()
    }

    /// MatrixMarket coordinate format. Symmetric matrices store the lower
    /// triangle only; indices are 1-based.
    pub fn write_matrix_market<W: Write>(&self, mut w: W, symmetric: bool) -> Result<()> {
        let entries: Vec<(usize, usize, f64)> = self
            .triplets()
            .filter(|&(i, j, _)| !symmetric || j <= i)
            .collect();
        let kind = if symmetric { "symmetric" } else { "general" };
        writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, entries.len())?;
        for (i, j, v) in entries {
            writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }

    pub fn read_matrix_market<R: BufRead>(r: R) -> Result<CsrMatrix> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty MatrixMarket file".into()))??;
        let lower = header.to_ascii_lowercase();
        if !lower.starts_with("%%matrixmarket matrix coordinate real") {
            return Err(Error::Parse(format!("unsupported header: {header}")));
        }
        let symmetric = lower.contains("symmetric");
        let mut size: Option<(usize, usize, usize)> = None;
        let mut t = Triplets::default();
        let mut read = 0usize;
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_usize = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{s}: {e}")))
            };
            match size {
                None => {
                    if fields.len() != 3 {
                        return Err(Error::Parse(format!("bad size line: {line}")));
                    }
                    let s = (
                        parse_usize(fields[0])?,
                        parse_usize(fields[1])?,
                        parse_usize(fields[2])?,
                    );
                    t = Triplets::new(s.0, s.1);
                    size = Some(s);
                }
                Some((nr, nc, _)) => {
                    if fields.len() != 3 {
                        return Err(Error::Parse(format!("bad entry line: {line}")));
                    }
                    let i = parse_usize(fields[0])?;
                    let j = parse_usize(fields[1])?;
                    let v: f64 = fields[2]
                        .parse()
                        .map_err(|e| Error::Parse(format!("{}: {e}", fields[2])))?;
                    if i == 0 || j == 0 || i > nr || j > nc {
                        return Err(Error::Parse(format!("index out of range: {line}")));
                    }
                    t.push(i - 1, j - 1, v);
                    if symmetric && i != j {
                        t.push(j - 1, i - 1, v);
                    }
                    read += 1;
                }
            }
        }
        match size {
            Some((_, _, nnz)) if nnz == read => Ok(t.to_csr()),
            Some((_, _, nnz)) => Err(Error::Parse(format!("expected {nnz} entries, read {read}"))),
            None => Err(Error::Parse("missing size line".into())),
        }
    }
}
