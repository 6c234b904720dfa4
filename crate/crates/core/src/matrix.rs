//! Dense matrices over 𝔽_p.

use std::fmt;

use crate::field::Fp;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    f: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over F_{}", self.rows, self.cols, self.f.p())?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(f: Fp, rows: usize, cols: usize) -> Self {
        Matrix { f, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(f: Fp, n: usize) -> Self {
        let mut m = Matrix::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Build from integer rows, reducing mod p.
    pub fn from_rows(f: Fp, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(f, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, f.reduce(v));
            }
        }
        m
    }

    pub fn field(&self) -> Fp {
        self.f
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        let p = self.f.p();
        self.data[i * self.cols + j] = v % p;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: u32) {
        let cur = self.get(i, j);
        self.set(i, j, self.f.add(cur, v));
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<u32> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn set_column(&mut self, j: usize, v: &[u32]) {
        for (i, &x) in v.iter().enumerate() {
            self.set(i, j, x);
        }
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.rows).flat_map(move |i| (0..self.cols).map(move |j| (i, j))).filter_map(move |(i, j)| {
            let v = self.get(i, j);
            (v != 0).then_some((i, j, v))
        })
    }

    pub fn from_columns(f: Fp, rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Matrix::zeros(f, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            m.set_column(j, c);
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.f, self.cols, self.rows);
        for (i, j, v) in self.entries() {
            t.set(j, i, v);
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        assert_eq!(self.f, other.f, "field mismatch in product");
        let p = self.f.p() as u64;
        let mut out = Matrix::zeros(self.f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j) as u64;
                    if b != 0 {
                        let idx = i * out.cols + j;
                        out.data[idx] = ((out.data[idx] as u64 + a * b) % p) as u32;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| (0..self.cols).fold(0, |acc, j| self.f.add(acc, self.f.mul(self.get(i, j), v[j])))).collect()
    }

    fn zip(&self, other: &Matrix, op: impl Fn(u32, u32) -> u32) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        assert_eq!(self.f, other.f, "field mismatch");
        Matrix { f: self.f, rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(&a, &b)| op(a, b)).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        let f = self.f;
        self.zip(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let f = self.f;
        self.zip(other, |a, b| f.sub(a, b))
    }

    pub fn scale(&self, k: u32) -> Matrix {
        let f = self.f;
        Matrix { f, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.mul(a, k)).collect() }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(self.f.neg(1))
    }

    /// Select rows and columns by index.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.f, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let (r, cc) = (a.rows + c.rows, a.cols + b.cols);
        let mut m = Matrix::zeros(a.f, r, cc);
        for (i, j, v) in a.entries() {
            m.set(i, j, v);
        }
        for (i, j, v) in b.entries() {
            m.set(i, a.cols + j, v);
        }
        for (i, j, v) in c.entries() {
            m.set(a.rows + i, j, v);
        }
        for (i, j, v) in d.entries() {
            m.set(a.rows + i, a.cols + j, v);
        }
        m
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.f;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = m.get(r, j);
                m.set(r, j, f.mul(v, inv));
            }
            for i in 0..m.rows {
                if i != r {
                    let k = m.get(i, c);
                    if k != 0 {
                        for j in 0..m.cols {
                            let v = f.sub(m.get(i, j), f.mul(k, m.get(r, j)));
                            m.set(i, j, v);
                        }
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

    /// Basis of the right kernel `{x : A x = 0}`, as columns.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let f = self.f;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0u32; self.cols];
                v[fc] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(row, fc));
                }
                v
            })
            .collect()
    }

    /// Solve `A x = b`; `None` if inconsistent.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.f, self.rows, self.cols + 1);
        for (i, &bi) in b.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, bi);
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols);
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let id = Matrix::identity(self.f, n);
        let aug = Matrix::block(self, &id, &Matrix::zeros(self.f, 0, n), &Matrix::zeros(self.f, 0, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Some(r.submatrix(&rows, &cols))
    }
}

/// Dimension of the span of a set of vectors.
pub fn span_dim(f: Fp, len: usize, vectors: &[Vec<u32>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_columns(f, len, vectors).rank()
}

/// Whether `v` lies in the span of `vectors`.
pub fn in_span(f: Fp, len: usize, vectors: &[Vec<u32>], v: &[u32]) -> bool {
    if v.iter().all(|&x| x == 0) {
        return true;
    }
    let mut all = vectors.to_vec();
    all.push(v.to_vec());
    span_dim(f, len, &all) == span_dim(f, len, vectors)
}
