use faer::sparse::linalg::solvers::SpSolver;
use faer::sparse::SparseColMat;
use faer::Mat;

use crate::error::{Error, Result};

/// Solve a tridiagonal system by the Thomas algorithm. `lower` and `upper`
/// hold the sub- and super-diagonal (length n − 1).
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || rhs.len() != n || lower.len() + 1 != n || upper.len() + 1 != n {
        return Err(Error::Precondition("tridiagonal dimensions disagree".into()));
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    check_pivot(pivot, diag[0].abs() + upper.first().map_or(0.0, |u| u.abs()), 0)?;
    c[0] = if n > 1 { upper[0] / pivot } else { 0.0 };
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i - 1] * c[i - 1];
        let scale = diag[i].abs() + lower[i - 1].abs() + if i < n - 1 { upper[i].abs() } else { 0.0 };
        check_pivot(pivot, scale, i)?;
        if i < n - 1 {
            c[i] = upper[i] / pivot;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

fn check_pivot(pivot: f64, scale: f64, row: usize) -> Result<()> {
    if !pivot.is_finite() || pivot.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
        Err(Error::SingularPivot { row })
    } else {
        Ok(())
    }
}

/// A tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, Default)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            upper: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Add `v` at (row, col); col must be row − 1, row or row + 1.
    pub fn add(&mut self, row: usize, col: usize, v: f64) {
        if col == row {
            self.diag[row] += v;
        } else if col + 1 == row {
            self.lower[col] += v;
        } else if col == row + 1 {
            self.upper[row] += v;
        } else {
            panic!("entry ({row}, {col}) is outside the tridiagonal band");
        }
    }

    /// Entry at (row, col), zero outside the band.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        if col == row {
            self.diag[row]
        } else if col + 1 == row {
            self.lower[col]
        } else if col == row + 1 {
            self.upper[row]
        } else {
            0.0
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        solve_tridiagonal(&self.lower, &self.diag, &self.upper, rhs)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

/// Triplet accumulator for a square sparse matrix, solved by sparse LU.
#[derive(Debug, Clone)]
pub struct SparseBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::with_capacity(9 * n),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, row: usize, col: usize, v: f64) {
        if v != 0.0 {
            self.entries.push((row, col, v));
        }
    }

    /// Visit the stored triplets; repeated positions are visited once each.
    pub fn for_each(&self, mut f: impl FnMut(usize, usize, f64)) {
        for &(r, c, v) in &self.entries {
            f(r, c, v);
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::Precondition("right-hand side has wrong length".into()));
        }
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(self.n, self.n, &self.entries)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let lu = a.sp_lu().map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let mut b = Mat::<f64>::from_fn(self.n, 1, |i, _| rhs[i]);
        lu.solve_in_place(b.as_mut());
        let x: Vec<f64> = (0..self.n).map(|i| b.read(i, 0)).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Factorization("non-finite solution".into()));
        }
        Ok(x)
    }
}
