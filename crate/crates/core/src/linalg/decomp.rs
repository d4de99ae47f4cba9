//! LU, Cholesky and singular values.

use super::{LinalgError, Mat};

/// LU factorization with partial pivoting, `P·A = L·U` packed in one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Mat,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(a: &Mat) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= f64::EPSILON * scale * 1e-3 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        let v = lu[(k, j)];
                        lu[(i, j)] -= f * v;
                    }
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            sign,
            singular,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        (0..self.lu.rows()).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }

    /// Solves `A·X = B` for every column of `B`.
    pub fn solve(&self, b: &Mat) -> Result<Mat, LinalgError> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(LinalgError::DimensionMismatch {
                op: "solve",
                left: self.lu.shape(),
                right: b.shape(),
            });
        }
        if self.singular {
            return Err(LinalgError::Singular);
        }
        let mut x = Mat::zeros(n, b.cols());
        let mut col = vec![0.0; n];
        for c in 0..b.cols() {
            for i in 0..n {
                col[i] = b[(self.perm[i], c)];
            }
            for i in 0..n {
                let mut s = col[i];
                for j in 0..i {
                    s -= self.lu[(i, j)] * col[j];
                }
                col[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = col[i];
                for j in (i + 1)..n {
                    s -= self.lu[(i, j)] * col[j];
                }
                col[i] = s / self.lu[(i, i)];
            }
            for i in 0..n {
                x[(i, c)] = col[i];
            }
        }
        if !x.all_finite() {
            return Err(LinalgError::Singular);
        }
        Ok(x)
    }
}

impl Mat {
    pub fn solve(&self, b: &Mat) -> Result<Mat, LinalgError> {
        Lu::new(self)?.solve(b)
    }

    pub fn inverse(&self) -> Result<Mat, LinalgError> {
        Lu::new(self)?.solve(&Mat::identity(self.rows()))
    }

    pub fn determinant(&self) -> Result<f64, LinalgError> {
        Ok(Lu::new(self)?.determinant())
    }

    /// Lower-triangular `L` with `A = L·Lᵀ`; fails unless `A` is symmetric
    /// positive definite.
    pub fn cholesky(&self) -> Result<Mat, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        if !self.is_symmetric(1e-10) {
            return Err(LinalgError::NotSymmetric);
        }
        let n = self.rows();
        let mut l = Mat::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(LinalgError::NotPositiveDefinite);
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_ok()
    }

    /// Singular values in decreasing order (one-sided Jacobi).
    pub fn singular_values(&self) -> Vec<f64> {
        // Work on the orientation with more rows than columns.
        let a = if self.rows() >= self.cols() {
            self.clone()
        } else {
            self.transpose()
        };
        let (m, n) = a.shape();
        let mut u = a;
        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                    for i in 0..m {
                        let (x, y) = (u[(i, p)], u[(i, q)]);
                        alpha += x * x;
                        beta += y * y;
                        gamma += x * y;
                    }
                    if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..m {
                        let (x, y) = (u[(i, p)], u[(i, q)]);
                        u[(i, p)] = c * x - s * y;
                        u[(i, q)] = s * x + c * y;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv: Vec<f64> = (0..n)
            .map(|j| (0..m).map(|i| u[(i, j)] * u[(i, j)]).sum::<f64>().sqrt())
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// 2-norm condition number; infinite when singular.
    pub fn condition_number(&self) -> f64 {
        let sv = self.singular_values();
        match (sv.first(), sv.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        }
    }
}

/// Numerical rank: number of singular values above `tol · σ_max`.
pub fn rank(m: &Mat, tol: f64) -> usize {
    assert!(tol > 0.0, "rank tolerance must be positive");
    let sv = m.singular_values();
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Mat::identity(3), 1e-9), 3);
        assert_eq!(rank(&Mat::zeros(2, 2), 1e-9), 0);
        assert_eq!(rank(&Mat::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]), 1e-9), 1);
        assert_eq!(rank(&Mat::from_rows(&[&[1.0, 2.0, 3.0]]), 1e-9), 1);
    }

    #[test]
    fn lu_solves_and_determinant() {
        let a = Mat::from_rows(&[&[0.0, 2.0, 1.0], &[1.0, 1.0, 0.0], &[3.0, 0.0, 1.0]]);
        let b = Mat::column(&[1.0, 2.0, 3.0]);
        let x = a.solve(&b).unwrap();
        assert!((&(&a * &x) - &b).frobenius_norm() < 1e-14);
        // 0*(1) - 2*(1 - 0) + 1*(0 - 3) = -5
        assert!((a.determinant().unwrap() + 5.0).abs() < 1e-14);
        assert!(matches!(
            Mat::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).solve(&Mat::column(&[1.0, 1.0])),
            Err(LinalgError::Singular)
        ));
    }

    #[test]
    fn cholesky_detects_indefinite() {
        assert!(Mat::diag(&[2.0, 1.0]).is_positive_definite());
        assert!(!Mat::diag(&[2.0, -1.0]).is_positive_definite());
        assert!(!Mat::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).is_positive_definite());
    }

    #[test]
    fn singular_values_of_diagonal() {
        let sv = Mat::diag(&[3.0, -5.0, 1.0]).singular_values();
        assert!((sv[0] - 5.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14 && (sv[2] - 1.0).abs() < 1e-14);
        assert!((Mat::diag(&[10.0, 0.1]).condition_number() - 100.0).abs() < 1e-10);
    }
}
