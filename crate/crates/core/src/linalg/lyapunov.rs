//! Continuous-time Lyapunov equations by Kronecker vectorization.

use super::{spectral_abscissa, LinalgError, Lu, Mat, Stability};

/// Which side the coefficient matrix multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LyapunovForm {
    /// `F·X + X·Fᵀ + Q = 0`
    Standard,
    /// `Fᵀ·X + X·F + Q = 0`
    Transposed,
}

#[derive(Debug, Clone, Copy)]
pub struct LyapunovSolver {
    /// `F` counts as Hurwitz when its abscissa is below `-hurwitz_tol`.
    pub hurwitz_tol: f64,
    /// Rounds of iterative refinement after the direct solve.
    pub refinement_steps: usize,
}

impl Default for LyapunovSolver {
    fn default() -> Self {
        Self {
            hurwitz_tol: 1e-9,
            refinement_steps: 2,
        }
    }
}

impl LyapunovSolver {
    pub fn solve(&self, f: &Mat, q: &Mat, form: LyapunovForm) -> Result<Mat, LinalgError> {
        if !f.is_square() {
            return Err(LinalgError::NotSquare {
                rows: f.rows(),
                cols: f.cols(),
            });
        }
        if q.shape() != f.shape() {
            return Err(LinalgError::DimensionMismatch {
                op: "lyapunov",
                left: f.shape(),
                right: q.shape(),
            });
        }
        if !q.is_symmetric(1e-10) {
            return Err(LinalgError::NotSymmetric);
        }
        let abscissa = spectral_abscissa(f)?.abscissa;
        if Stability::classify(abscissa, self.hurwitz_tol) != Stability::Hurwitz {
            return Err(LinalgError::NotHurwitz { abscissa });
        }
        let f = match form {
            LyapunovForm::Standard => f.clone(),
            LyapunovForm::Transposed => f.transpose(),
        };
        let n = f.rows();
        let lu = Lu::new(&kronecker_operator(&f))?;
        if lu.is_singular() {
            return Err(LinalgError::Singular);
        }
        let rhs = Mat::column(&q.as_slice().iter().map(|v| -v).collect::<Vec<_>>());
        let mut x = unvec(&lu.solve(&rhs)?, n).symmetrized();
        for _ in 0..self.refinement_steps {
            let r = residual(&f, &x, q);
            if r.frobenius_norm() == 0.0 {
                break;
            }
            let neg = Mat::column(&r.as_slice().iter().map(|v| -v).collect::<Vec<_>>());
            let dx = unvec(&lu.solve(&neg)?, n);
            x = (&x + &dx).symmetrized();
        }
        Ok(x)
    }
}

/// Solves the Lyapunov equation in the requested form with default settings.
pub fn solve_lyapunov_ct(f: &Mat, q: &Mat, form: LyapunovForm) -> Result<Mat, LinalgError> {
    LyapunovSolver::default().solve(f, q, form)
}

/// `‖F·X + X·Fᵀ + Q‖_F` (or the transposed form).
pub fn lyapunov_residual(f: &Mat, x: &Mat, q: &Mat, form: LyapunovForm) -> f64 {
    match form {
        LyapunovForm::Standard => residual(f, x, q).frobenius_norm(),
        LyapunovForm::Transposed => residual(&f.transpose(), x, q).frobenius_norm(),
    }
}

fn residual(f: &Mat, x: &Mat, q: &Mat) -> Mat {
    let fx = f * x;
    &(&fx + &fx.transpose()) + q
}

/// Matrix of `X ↦ F·X + X·Fᵀ` on row-major `vec(X)`.
fn kronecker_operator(f: &Mat) -> Mat {
    let n = f.rows();
    let mut m = Mat::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                m[(row, k * n + j)] += f[(i, k)];
                m[(row, i * n + k)] += f[(j, k)];
            }
        }
    }
    m
}

fn unvec(v: &Mat, n: usize) -> Mat {
    Mat::from_fn(n, n, |i, j| v[(i * n + j, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_and_diagonal() {
        let x = solve_lyapunov_ct(&Mat::scalar(-1.0), &Mat::scalar(2.0), LyapunovForm::Standard).unwrap();
        assert!((x[(0, 0)] - 1.0).abs() < 1e-15);
        let x = solve_lyapunov_ct(&(-&Mat::identity(2)), &Mat::identity(2), LyapunovForm::Standard).unwrap();
        assert!((&x - &Mat::identity(2).scale(0.5)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn companion_case_by_hand() {
        // F = [[0,1],[-1,-2]], Q = I. Entries (x11, x12, x22) satisfy
        //   2·x12 + 1 = 0
        //   x22 − x11 − 2·x12 = 0
        //   −2·x12 − 4·x22 + 1 = 0
        // so x12 = −1/2, x22 = 1/2, x11 = 3/2.
        let f = Mat::from_rows(&[&[0.0, 1.0], &[-1.0, -2.0]]);
        let x = solve_lyapunov_ct(&f, &Mat::identity(2), LyapunovForm::Standard).unwrap();
        let want = Mat::from_rows(&[&[1.5, -0.5], &[-0.5, 0.5]]);
        assert!((&x - &want).frobenius_norm() < 1e-14, "{x:?}");

        let xt = solve_lyapunov_ct(&f, &Mat::identity(2), LyapunovForm::Transposed).unwrap();
        assert!(lyapunov_residual(&f, &xt, &Mat::identity(2), LyapunovForm::Transposed) < 1e-13);
    }

    #[test]
    fn rejects_unstable_and_marginal() {
        let q = Mat::identity(2);
        let err = solve_lyapunov_ct(&Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]), &q, LyapunovForm::Standard);
        assert!(matches!(err, Err(LinalgError::NotHurwitz { .. })));
        let err = solve_lyapunov_ct(&Mat::diag(&[1.0, -1.0]), &q, LyapunovForm::Standard);
        assert!(matches!(err, Err(LinalgError::NotHurwitz { abscissa }) if abscissa == 1.0));
    }
}
