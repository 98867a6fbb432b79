use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Rows shorter than this average are not worth splitting across threads.
const PARALLEL_MIN_NNZ: usize = 1 << 15;

/// Square compressed-sparse-row matrix.
///
/// Column indices are strictly increasing within each row and explicit zeros
/// are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, offsets: vec![0; n + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self { n, offsets: (0..=n).collect(), cols: (0..n).collect(), vals: vec![1.0; n] }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_rows(diag.iter().enumerate().map(|(i, &d)| vec![(i, d)]).collect())
            .expect("diagonal entries are in range")
    }

    /// Builds a matrix from per-row `(column, value)` lists in any order.
    /// Duplicate columns are summed and zero results dropped.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n = rows.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let start = cols.len();
            for (c, v) in row {
                if c >= n {
                    return Err(Error::DimensionMismatch { expected: n, actual: c + 1 });
                }
                if cols.len() > start && cols[cols.len() - 1] == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            // compact away zeros produced by summation or given explicitly
            let mut keep = start;
            for k in start..cols.len() {
                if vals[k] != 0.0 {
                    cols[keep] = cols[k];
                    vals[keep] = vals[k];
                    keep += 1;
                }
            }
            cols.truncate(keep);
            vals.truncate(keep);
            offsets.push(cols.len());
        }
        Ok(Self { n, offsets, cols, vals })
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows = vec![Vec::new(); n];
        for &(r, c, v) in triplets {
            if r >= n {
                return Err(Error::DimensionMismatch { expected: n, actual: r + 1 });
            }
            rows[r].push((c, v));
        }
        Self::from_rows(rows)
    }

    /// Takes pre-sorted, zero-free rows without re-checking them.
    pub(crate) fn from_sorted_rows(rows: Vec<(Vec<usize>, Vec<f64>)>) -> Self {
        let n = rows.len();
        let nnz = rows.iter().map(|r| r.0.len()).sum();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        for (c, v) in rows {
            debug_assert!(c.windows(2).all(|w| w[0] < w[1]));
            debug_assert!(v.iter().all(|&x| x != 0.0));
            cols.extend(c);
            vals.extend(v);
            offsets.push(cols.len());
        }
        Self { n, offsets, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_range(i);
        (&self.cols[range.clone()], &self.vals[range])
    }

    /// Positions of row `i` within the flat entry arrays.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn row_iter(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (c, v) = self.row(i);
        c.iter().copied().zip(v.iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (c, v) = self.row(i);
        match c.binary_search(&j) {
            Ok(k) => v[k],
            Err(_) => 0.0,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row_iter(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.n + 1];
        for &c in &self.cols {
            counts[c + 1] += 1;
        }
        for k in 0..self.n {
            counts[k + 1] += counts[k];
        }
        let offsets = counts.clone();
        let mut next = counts;
        let mut cols = vec![0; self.nnz()];
        let mut vals = vec![0.0; self.nnz()];
        for i in 0..self.n {
            for (j, v) in self.row_iter(i) {
                let slot = next[j];
                cols[slot] = i;
                vals[slot] = v;
                next[j] += 1;
            }
        }
        CsrMatrix { n: self.n, offsets, cols, vals }
    }

    /// Principal submatrix on `keep` (sorted, unique): entry `(a, b)` is
    /// `self[keep[a]][keep[b]]`.
    pub fn principal_submatrix(&self, keep: &[usize]) -> CsrMatrix {
        const DROPPED: usize = usize::MAX;
        let mut local = vec![DROPPED; self.n];
        for (a, &i) in keep.iter().enumerate() {
            local[i] = a;
        }
        let rows = keep
            .iter()
            .map(|&i| {
                let mut c = Vec::new();
                let mut v = Vec::new();
                for (j, x) in self.row_iter(i) {
                    if local[j] != DROPPED {
                        c.push(local[j]);
                        v.push(x);
                    }
                }
                (c, v)
            })
            .collect();
        CsrMatrix::from_sorted_rows(rows)
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> CsrMatrix {
        let rows = (0..self.n)
            .map(|i| {
                let mut entries: Vec<(usize, f64)> = self.row_iter(i).map(|(j, v)| (j, -v)).collect();
                match entries.binary_search_by_key(&i, |e| e.0) {
                    Ok(k) => entries[k].1 += 1.0,
                    Err(k) => entries.insert(k, (i, 1.0)),
                }
                entries.retain(|e| e.1 != 0.0);
                entries.into_iter().unzip()
            })
            .collect();
        CsrMatrix::from_sorted_rows(rows)
    }

    /// `y = self · x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y, Execution::Sequential)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64], exec: Execution) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: x.len() });
        }
        if y.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: y.len() });
        }
        let exec = if self.nnz() >= PARALLEL_MIN_NNZ { exec } else { Execution::Sequential };
        par::fill_indexed(exec, y, |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum()
        });
        Ok(())
    }

    /// Writes the matrix as a Matrix Market coordinate file (1-based indices).
    pub fn write_matrix_market<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.n, self.n, self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn printed_b() -> CsrMatrix {
        CsrMatrix::from_rows(vec![
            vec![(0, 11.0 / 20.0), (1, 0.25), (2, 0.2)],
            vec![(0, 0.25), (1, 11.0 / 20.0), (2, 0.2)],
            vec![(0, 0.2), (1, 0.2), (2, 0.5)],
        ])
        .unwrap()
    }

    #[test]
    fn identity_matvec() {
        let v = vec![3.0, -1.5, 2.25, 0.0];
        assert_eq!(CsrMatrix::identity(4).matvec(&v).unwrap(), v);
    }

    #[test]
    fn worked_example_row_sums_by_matvec() {
        let y = printed_b().matvec(&[1.0, 1.0, 1.0]).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-15);
        assert!((y[1] - 1.0).abs() < 1e-15);
        assert!((y[2] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_matvec() {
        assert_eq!(CsrMatrix::zeros(3).matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn dimension_mismatch() {
        let err = CsrMatrix::identity(3).matvec(&[1.0]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, actual: 1 });
    }

    #[test]
    fn from_rows_sums_duplicates_and_drops_zeros() {
        let m = CsrMatrix::from_rows(vec![vec![(1, 2.0), (0, 0.0), (1, -2.0)], vec![(1, 1.0), (0, 4.0), (0, 1.0)]])
            .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.row(0).0.len(), 0);
        assert_eq!(m.row(1), (&[0, 1][..], &[5.0, 1.0][..]));
    }

    #[test]
    fn submatrix_and_identity_minus() {
        let b = printed_b();
        let sub = b.principal_submatrix(&[0, 2]);
        assert_eq!(sub.get(0, 0), 11.0 / 20.0);
        assert_eq!(sub.get(0, 1), 0.2);
        assert_eq!(sub.get(1, 1), 0.5);

        let a = CsrMatrix::from_rows(vec![vec![(1, 1.0)], vec![(1, 1.0)]]).unwrap().identity_minus();
        assert_eq!(a.row(0), (&[0, 1][..], &[1.0, -1.0][..]));
        assert_eq!(a.row(1).0.len(), 0);
    }

    #[test]
    fn transpose_roundtrip() {
        let m = CsrMatrix::from_triplets(3, &[(0, 2, 1.0), (1, 0, 2.0), (2, 1, 3.0), (2, 2, 4.0)]).unwrap();
        let t = m.transpose();
        assert_eq!(t.get(2, 0), 1.0);
        assert_eq!(t.get(0, 1), 2.0);
        assert_eq!(t.transpose(), m);
    }

    fn arb_matrix() -> impl Strategy<Value = (CsrMatrix, Vec<f64>, Vec<f64>, f64, f64)> {
        (1usize..30).prop_flat_map(|n| {
            (
                proptest::collection::vec((0..n, 0..n, -5.0f64..5.0), 0..(4 * n)),
                proptest::collection::vec(-10.0f64..10.0, n),
                proptest::collection::vec(-10.0f64..10.0, n),
                -3.0f64..3.0,
                -3.0f64..3.0,
            )
                .prop_map(move |(t, u, v, a, b)| (CsrMatrix::from_triplets(n, &t).unwrap(), u, v, a, b))
        })
    }

    proptest! {
        #[test]
        fn matvec_is_linear((m, u, v, a, b) in arb_matrix()) {
            let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
            let lhs = m.matvec(&combo).unwrap();
            let mu = m.matvec(&u).unwrap();
            let mv = m.matvec(&v).unwrap();
            for i in 0..lhs.len() {
                let rhs = a * mu[i] + b * mv[i];
                let scale = 1.0 + lhs[i].abs().max(rhs.abs());
                prop_assert!((lhs[i] - rhs).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn structure_invariants((m, ..) in arb_matrix()) {
            for i in 0..m.dim() {
                let (c, v) = m.row(i);
                prop_assert!(c.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(c.iter().all(|&j| j < m.dim()));
                prop_assert!(v.iter().all(|&x| x != 0.0));
            }
        }
    }
}
