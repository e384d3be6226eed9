//! Gaussian elimination over F_p.

use super::poly::inv_mod_p;

/// Dense row-major matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Solution set of `A x = b`: `particular + span(kernel)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<u64>,
    pub kernel: Vec<Vec<u64>>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.p;
    }

    /// Overwrites column `c` with `v`.
    pub fn set_col(&mut self, c: usize, v: &[u64]) {
        for (r, &x) in v.iter().enumerate() {
            self.set(r, c, x);
        }
    }

    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(0u64, |acc, c| (acc + self.get(r, c) * x[c]) % self.p)
            })
            .collect()
    }

    /// Solves `self * x = rhs`. Returns `None` when the system is inconsistent.
    /// Free variables are set to zero in the particular solution.
    pub fn solve(&self, rhs: &[u64]) -> Option<AffineSolution> {
        assert_eq!(rhs.len(), self.rows);
        let p = self.p;
        let (m, n) = (self.rows, self.cols);
        let width = n + 1;
        let mut a: Vec<u64> = Vec::with_capacity(m * width);
        for r in 0..m {
            a.extend_from_slice(&self.data[r * n..(r + 1) * n]);
            a.push(rhs[r] % p);
        }
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row == m {
                break;
            }
            let Some(piv) = (row..m).find(|&r| a[r * width + col] != 0) else {
                continue;
            };
            if piv != row {
                for c in 0..width {
                    a.swap(piv * width + c, row * width + c);
                }
            }
            let inv = inv_mod_p(a[row * width + col], p);
            for c in 0..width {
                a[row * width + c] = a[row * width + c] * inv % p;
            }
            for r in 0..m {
                if r == row {
                    continue;
                }
                let f = a[r * width + col];
                if f == 0 {
                    continue;
                }
                for c in 0..width {
                    let sub = f * a[row * width + c] % p;
                    a[r * width + c] = (a[r * width + c] + p - sub) % p;
                }
            }
            pivots.push(col);
            row += 1;
        }
        if (row..m).any(|r| a[r * width + n] != 0) {
            return None;
        }
        let mut particular = vec![0u64; n];
        for (r, &c) in pivots.iter().enumerate() {
            particular[c] = a[r * width + n];
        }
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let kernel = (0..n)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![0u64; n];
                v[f] = 1;
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = (p - a[r * width + f]) % p;
                }
                v
            })
            .collect();
        Some(AffineSolution { particular, kernel })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_consistent_and_rejects_inconsistent() {
        // x + y = 1, y = 1 over F_3
        let mut a = FpMatrix::zeros(3, 2, 2);
        a.set(0, 0, 1);
        a.set(0, 1, 1);
        a.set(1, 1, 1);
        let s = a.solve(&[1, 1]).unwrap();
        assert_eq!(s.particular, vec![0, 1]);
        assert!(s.kernel.is_empty());

        // x + y = 1, 2x + 2y = 0 over F_3 is inconsistent
        let mut b = FpMatrix::zeros(3, 2, 2);
        b.set(0, 0, 1);
        b.set(0, 1, 1);
        b.set(1, 0, 2);
        b.set(1, 1, 2);
        assert!(b.solve(&[1, 0]).is_none());
        let hom = b.solve(&[0, 0]).unwrap();
        assert_eq!(hom.kernel.len(), 1);
        assert_eq!(b.mul_vec(&hom.kernel[0]), vec![0, 0]);
    }
}
