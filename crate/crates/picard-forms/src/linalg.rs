//! Dense exact linear algebra over `Q(r)`.
//!
//! Plain fraction Gaussian elimination; every matrix in this crate is small
//! (a few hundred rows at most), so no fraction-free tricks are needed.

use crate::cyclotomic::Cyc;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Cyc>>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![vec![Cyc::zero(); cols]; rows],
        }
    }

    pub fn from_rows(data: Vec<Vec<Cyc>>) -> Self {
        let rows = data.len();
        let cols = data.first().map(|r| r.len()).unwrap_or(0);
        assert!(data.iter().all(|r| r.len() == cols));
        Mat { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.data[i][i] = Cyc::one();
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> &Cyc {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Cyc) {
        self.data[r][c] = v;
    }

    pub fn mul_vec(&self, v: &[Cyc]) -> Vec<Cyc> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                let mut acc = Cyc::zero();
                for (a, x) in row.iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul_mat(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if other.data[k][j].is_zero() {
                        continue;
                    }
                    let p = &self.data[i][k] * &other.data[k][j];
                    out.data[i][j] += &p;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i][j] -= &other.data[i][j];
            }
        }
        out
    }

    pub fn scale(&self, c: &Cyc) -> Mat {
        let mut out = self.clone();
        for row in out.data.iter_mut() {
            for v in row.iter_mut() {
                *v = &*v * c;
            }
        }
        out
    }

    /// Row-reduce in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.data[r][col].is_zero()) else {
                continue;
            };
            self.data.swap(row, p);
            let inv = self.data[row][col].inv().unwrap();
            for j in col..self.cols {
                self.data[row][j] = &self.data[row][j] * &inv;
            }
            for r in 0..self.rows {
                if r != row && !self.data[r][col].is_zero() {
                    let f = self.data[r][col].clone();
                    for j in col..self.cols {
                        let d = &self.data[row][j] * &f;
                        self.data[r][j] -= &d;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<Vec<Cyc>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::new();
        for &f in &free {
            let mut v = vec![Cyc::zero(); self.cols];
            v[f] = Cyc::one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.data[ri][f].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `self * x = b`.  Returns `None` when inconsistent.  When the
    /// system is underdetermined the free variables are set to zero; the
    /// returned vector always satisfies the system exactly.
    pub fn solve(&self, b: &[Cyc]) -> Option<Vec<Cyc>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Mat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.data[i][j] = self.data[i][j].clone();
            }
            aug.data[i][self.cols] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![Cyc::zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.data[ri][self.cols].clone();
        }
        Some(x)
    }

    /// Solve `self * X = B` for several right-hand sides at once.
    pub fn solve_many(&self, bs: &[Vec<Cyc>]) -> Option<Vec<Vec<Cyc>>> {
        bs.iter().map(|b| self.solve(b)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::Cyc;

    fn c(n: i64) -> Cyc {
        Cyc::from_int(n)
    }

    #[test]
    fn solve_and_kernel() {
        let m = Mat::from_rows(vec![
            vec![c(1), c(2), c(3)],
            vec![c(2), c(4), c(6)],
            vec![c(0), c(1), c(1)],
        ]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        let b = vec![c(6), c(12), c(2)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        // inconsistent
        let b2 = vec![c(6), c(13), c(2)];
        assert!(m.solve(&b2).is_none());
    }
}
