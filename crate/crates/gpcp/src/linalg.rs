//! Minimal dense square-matrix support for the Newton-type solvers.

/// Pivot magnitudes below this floor are reported as singular rather than
/// regularized, so structural degeneracy surfaces instead of being masked.
pub const PIVOT_FLOOR: f64 = 1e-12;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix rows must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn copy_row_from(&mut self, i: usize, src: &Mat, src_row: usize) {
        let n = self.n;
        self.data[i * n..(i + 1) * n].copy_from_slice(src.row(src_row));
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub pivot: f64,
    pub column: usize,
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Fails with the offending pivot magnitude when the best available pivot
/// falls below [`PIVOT_FLOOR`].
pub fn solve(mut a: Mat, mut b: Vec<f64>) -> Result<Vec<f64>, SingularPivot> {
    let n = a.n;
    assert_eq!(b.len(), n, "right-hand side length must match matrix size");

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = a.get(col, col).abs();
        for r in col + 1..n {
            let mag = a.get(r, col).abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag < PIVOT_FLOOR {
            return Err(SingularPivot { pivot: pivot_mag, column: col });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a.get(col, j);
                a.set(col, j, a.get(pivot_row, j));
                a.set(pivot_row, j, tmp);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a.get(col, col);
        for r in col + 1..n {
            let factor = a.get(r, col) / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a.get(r, j) - factor * a.get(col, j);
                a.set(r, j, v);
            }
            b[r] -= factor * b[col];
        }
    }

    // back substitution
    for col in (0..n).rev() {
        let mut acc = b[col];
        for j in col + 1..n {
            acc -= a.get(col, j) * b[j];
        }
        b[col] = acc / a.get(col, col);
    }
    Ok(b)
}
