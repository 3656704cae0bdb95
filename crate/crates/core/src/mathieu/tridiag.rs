//! Real symmetric tridiagonal eigenproblems.
//!
//! Only what the Mathieu kernel needs: the k-th smallest eigenvalue by
//! Sturm-sequence bisection, and its eigenvector by inverse iteration.

/// Symmetric tridiagonal matrix. `off[i]` couples rows `i` and `i + 1`.
#[derive(Debug, Clone)]
pub(crate) struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub(crate) fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty tridiagonal matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length mismatch");
        Self { diag, off }
    }

    pub(crate) fn len(&self) -> usize {
        self.diag.len()
    }

    fn pivot_floor(&self) -> f64 {
        let max_off2 = self.off.iter().fold(1.0_f64, |acc, e| acc.max(e * e));
        f64::MIN_POSITIVE * max_off2
    }

    /// Number of eigenvalues strictly below `x`.
    pub(crate) fn count_below(&self, x: f64) -> usize {
        let pivmin = self.pivot_floor();
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let e = self.off[i - 1];
            d = self.diag[i] - x - e * e / d;
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) * n as f64;
        (lo - pad, hi + pad)
    }

    /// The `k`-th smallest eigenvalue (0-based), to full double precision.
    pub(crate) fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len(), "eigenvalue index {k} out of range");
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector for an (accurate) eigenvalue `lambda`.
    pub(crate) fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            return vec![1.0];
        }
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64).sqrt()).collect();
        normalize(&mut x);
        for _ in 0..3 {
            x = self.solve_shifted(lambda, &x);
            normalize(&mut x);
        }
        x
    }

    /// Solves (T - shift) y = rhs by Gaussian elimination with partial
    /// pivoting; exact zero pivots are nudged so inverse iteration works at
    /// an eigenvalue.
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let scale = self
            .diag
            .iter()
            .map(|d| (d - shift).abs())
            .chain(self.off.iter().map(|e| e.abs()))
            .fold(f64::MIN_POSITIVE, f64::max);
        let tiny = f64::EPSILON * scale;

        let mut d: Vec<f64> = self.diag.iter().map(|v| v - shift).collect();
        let mut du = self.off.clone();
        let dl = self.off.clone();
        let mut du2 = vec![0.0; n];
        let mut b = rhs.to_vec();

        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let m = dl[i] / d[i];
                d[i + 1] -= m * du[i];
                b[i + 1] -= m * b[i];
            } else {
                // swap rows i and i+1
                let m = d[i] / dl[i];
                let old_du = du[i];
                let old_d_next = d[i + 1];
                d[i] = dl[i];
                du[i] = old_d_next;
                d[i + 1] = old_du - m * old_d_next;
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -m;
                }
                b.swap(i, i + 1);
                b[i + 1] -= m * b[i];
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }

        let mut y = vec![0.0; n];
        y[n - 1] = b[n - 1] / d[n - 1];
        if n >= 2 {
            y[n - 2] = (b[n - 2] - du[n - 2] * y[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            y[i] = (b[i] - du[i] * y[i + 1] - du2[i] * y[i + 2]) / d[i];
        }
        y
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn second_difference(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn second_difference_spectrum() {
        // eigenvalues 2 - 2 cos(k pi / (n + 1))
        let n = 12;
        let t = second_difference(n);
        for k in 0..n {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k) - exact).abs() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn eigenvector_residual() {
        let t = SymTridiagonal::new(
            vec![4.0, 1.0, 9.0, 0.0, 16.0, 4.0],
            vec![0.7, -1.3, 2.0, 0.1, 5.0],
        );
        for k in 0..t.len() {
            let lambda = t.eigenvalue(k);
            let v = t.eigenvector(lambda);
            for i in 0..t.len() {
                let mut r = (t.diag[i] - lambda) * v[i];
                if i > 0 {
                    r += t.off[i - 1] * v[i - 1];
                }
                if i + 1 < t.len() {
                    r += t.off[i] * v[i + 1];
                }
                assert!(r.abs() < 1e-12, "k = {k}, row {i}, residual {r}");
            }
        }
    }

    #[test]
    fn sturm_count_is_monotone() {
        let t = second_difference(9);
        let mut last = 0;
        for i in 0..=80 {
            let c = t.count_below(-0.5 + 0.0625 * i as f64);
            assert!(c >= last);
            last = c;
        }
        assert_eq!(last, 9);
    }
}
