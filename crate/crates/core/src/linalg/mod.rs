//! Dense real linear algebra for small systems (n ≤ 50, typically n ≤ 8).

mod decomp;
mod eigen;
mod lyapunov;
mod mat;

pub use decomp::{rank, Lu};
pub use eigen::{is_diagonalizable, spectral_abscissa, EigenSolver, Eigenvalue, Spectrum, Stability};
pub use lyapunov::{lyapunov_residual, solve_lyapunov_ct, LyapunovForm, LyapunovSolver};
pub use mat::Mat;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("expected {expected} entries, got {got}")]
    InvalidData { expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not Hurwitz (spectral abscissa {abscissa:e})")]
    NotHurwitz { abscissa: f64 },
    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },
}

/// `[B, AB, A²B, …, Aⁿ⁻¹B]`.
pub fn controllability_matrix(a: &Mat, b: &Mat) -> Result<Mat, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if b.rows() != a.rows() {
        return Err(LinalgError::DimensionMismatch {
            op: "controllability_matrix",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let n = a.rows();
    let mut out = b.clone();
    let mut block = b.clone();
    for _ in 1..n {
        block = a * &block;
        out = out.hstack(&block)?;
    }
    Ok(out)
}

/// Whether `(A, B)` is controllable at rank tolerance `1e-10`.
pub fn is_controllable(a: &Mat, b: &Mat) -> Result<bool, LinalgError> {
    Ok(rank(&controllability_matrix(a, b)?, 1e-10) == a.rows())
}

/// Coefficients `[1, c₁, …, cₙ]` of `det(sI − M) = sⁿ + c₁sⁿ⁻¹ + … + cₙ`
/// (Faddeev–LeVerrier).
pub fn characteristic_polynomial(m: &Mat) -> Result<Vec<f64>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut coeffs = vec![1.0];
    let mut mk = Mat::zeros(n, n);
    for k in 1..=n {
        let prev = *coeffs.last().unwrap();
        mk = &(m * &mk) + &Mat::identity(n).scale(prev);
        let c = -(m * &mk).trace() / k as f64;
        coeffs.push(c);
    }
    Ok(coeffs)
}
