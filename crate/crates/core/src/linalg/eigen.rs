//! Eigenvalues of a real square matrix.
//!
//! Balancing, Householder reduction to upper Hessenberg form, then the
//! Francis double-shift QR iteration (EISPACK `hqr` structure). Only
//! eigenvalues are computed.

use super::{LinalgError, Mat};

/// A (possibly complex) eigenvalue `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Eigenvalues with their spectral abscissa (largest real part).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Eigenvalue>,
    pub abscissa: f64,
}

impl Spectrum {
    fn from_eigenvalues(mut eigenvalues: Vec<Eigenvalue>) -> Self {
        eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        let abscissa = eigenvalues.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
        Self { eigenvalues, abscissa }
    }

    /// Sum of eigenvalues (real part; the imaginary parts cancel in pairs).
    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.re).sum()
    }

    /// Product of eigenvalues as a complex number `(re, im)`.
    pub fn product(&self) -> (f64, f64) {
        self.eigenvalues
            .iter()
            .fold((1.0, 0.0), |(pr, pi), e| (pr * e.re - pi * e.im, pr * e.im + pi * e.re))
    }
}

/// Where a matrix sits relative to the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Hurwitz,
    /// Abscissa inside the dead zone `[-tol, 0]`.
    Marginal,
    Unstable,
}

impl Stability {
    pub fn classify(abscissa: f64, tol: f64) -> Self {
        if abscissa < -tol {
            Stability::Hurwitz
        } else if abscissa <= 0.0 {
            Stability::Marginal
        } else {
            Stability::Unstable
        }
    }
}

/// Eigenvalue solver settings.
#[derive(Debug, Clone, Copy)]
pub struct EigenSolver {
    /// Total QR sweeps allowed are `sweeps_per_dim · n`.
    pub sweeps_per_dim: usize,
    pub balance: bool,
}

impl Default for EigenSolver {
    fn default() -> Self {
        Self {
            sweeps_per_dim: 100,
            balance: true,
        }
    }
}

impl EigenSolver {
    pub fn spectrum(&self, m: &Mat) -> Result<Spectrum, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if !m.all_finite() {
            return Err(LinalgError::NonFinite { row: 0, col: 0 });
        }
        let n = m.rows();
        if n == 0 {
            return Ok(Spectrum::from_eigenvalues(Vec::new()));
        }
        let mut a = m.clone();
        if self.balance {
            balance(&mut a);
        }
        hessenberg(&mut a);
        let eig = hqr(a, self.sweeps_per_dim * n)?;
        Ok(Spectrum::from_eigenvalues(eig))
    }
}

/// All eigenvalues of `m` and their largest real part.
pub fn spectral_abscissa(m: &Mat) -> Result<Spectrum, LinalgError> {
    EigenSolver::default().spectrum(m)
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable. Eigenvalues are unchanged.
fn balance(a: &mut Mat) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = a.rows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= ginv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut Mat) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..(n - 2) {
        let alpha_norm = ((k + 1)..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = if x0 >= 0.0 { -alpha_norm } else { alpha_norm };
        for i in 0..n {
            v[i] = 0.0;
        }
        v[k + 1] = x0 - alpha;
        for i in (k + 2)..n {
            v[i] = a[(i, k)];
        }
        let vnorm2: f64 = v[(k + 1)..].iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A ← H·A with H = I − 2vvᵀ/‖v‖²
        for j in 0..n {
            let dot: f64 = ((k + 1)..n).map(|i| v[i] * a[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in (k + 1)..n {
                a[(i, j)] -= f * v[i];
            }
        }
        // A ← A·H
        for i in 0..n {
            let dot: f64 = ((k + 1)..n).map(|j| a[(i, j)] * v[j]).sum();
            let f = 2.0 * dot / vnorm2;
            for j in (k + 1)..n {
                a[(i, j)] -= f * v[j];
            }
        }
        for i in (k + 2)..n {
            a[(i, k)] = 0.0;
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Double-shift QR on an upper Hessenberg matrix. Indices below follow the
/// 1-based EISPACK layout through the `h` accessor.
fn hqr(mut a: Mat, max_sweeps: usize) -> Result<Vec<Eigenvalue>, LinalgError> {
    let n = a.rows();
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    macro_rules! h {
        ($i:expr, $j:expr) => {
            a[($i - 1, $j - 1)]
        };
    }

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += h!(i, j).abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let mut total_sweeps = 0usize;
    let (mut p, mut q, mut r): (f64, f64, f64);
    let (mut x, mut y, mut z, mut w): (f64, f64, f64, f64);
    while nn >= 1 {
        let mut its = 0;
        loop {
            // Look for a single small subdiagonal element.
            let mut l = nn;
            while l >= 2 {
                let mut s = h!(l - 1, l - 1).abs() + h!(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h!(l, l - 1).abs() + s == s {
                    h!(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            x = h!(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            y = h!(nn - 1, nn - 1);
            w = h!(nn, nn - 1) * h!(nn - 1, nn);
            if l == nn - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn -= 2;
                break;
            }
            if total_sweeps >= max_sweeps {
                return Err(LinalgError::NoConvergence {
                    iterations: total_sweeps,
                });
            }
            if its == 10 || its == 20 {
                // Exceptional shift.
                t += x;
                for i in 1..=nn {
                    h!(i, i) -= x;
                }
                let s = h!(nn, nn - 1).abs() + h!(nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_sweeps += 1;
            // Look for two consecutive small subdiagonal elements.
            let mut m = nn - 2;
            loop {
                z = h!(m, m);
                r = x - z;
                let s0 = y - z;
                p = (r * s0 - w) / h!(m + 1, m) + h!(m, m + 1);
                q = h!(m + 1, m + 1) - z - r - s0;
                r = h!(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h!(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (h!(m - 1, m - 1).abs() + z.abs() + h!(m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                h!(i, i - 2) = 0.0;
                if i != m + 2 {
                    h!(i, i - 3) = 0.0;
                }
            }
            // Double QR step on rows l..nn and columns m..nn.
            let mut k = m;
            while k < nn {
                if k != m {
                    p = h!(k, k - 1);
                    q = h!(k + 1, k - 1);
                    r = 0.0;
                    if k != nn - 1 {
                        r = h!(k + 2, k - 1);
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            h!(k, k - 1) = -h!(k, k - 1);
                        }
                    } else {
                        h!(k, k - 1) = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = h!(k, j) + q * h!(k + 1, j);
                        if k != nn - 1 {
                            p += r * h!(k + 2, j);
                            h!(k + 2, j) -= p * z;
                        }
                        h!(k + 1, j) -= p * y;
                        h!(k, j) -= p * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        p = x * h!(i, k) + y * h!(i, k + 1);
                        if k != nn - 1 {
                            p += z * h!(i, k + 2);
                            h!(i, k + 2) -= p * r;
                        }
                        h!(i, k + 1) -= p * q;
                        h!(i, k) -= p;
                    }
                }
                k += 1;
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Eigenvalue { re: wr[i], im: wi[i] }).collect())
}

/// Whether `m` is diagonalizable: every eigenvalue cluster (within `tol`
/// relative to the spectral radius) has geometric multiplicity equal to its
/// algebraic multiplicity.
pub fn is_diagonalizable(m: &Mat, tol: f64) -> Result<bool, LinalgError> {
    let spec = spectral_abscissa(m)?;
    let n = m.rows();
    let radius = spec
        .eigenvalues
        .iter()
        .map(Eigenvalue::modulus)
        .fold(0.0, f64::max)
        .max(m.max_abs())
        .max(f64::MIN_POSITIVE);
    let cluster_tol = tol.sqrt() * radius;
    let mut used = vec![false; spec.eigenvalues.len()];
    for i in 0..spec.eigenvalues.len() {
        if used[i] || spec.eigenvalues[i].im < 0.0 {
            continue;
        }
        let lam = spec.eigenvalues[i];
        let mut mult = 0;
        for (j, e) in spec.eigenvalues.iter().enumerate() {
            if (e.re - lam.re).hypot(e.im - lam.im) <= cluster_tol {
                used[j] = true;
                mult += 1;
            }
        }
        let nullity = if lam.im.abs() <= cluster_tol {
            n - super::rank(&m.shift_diag(lam.re), tol.max(1e-14))
        } else {
            // Real embedding of M − λI for complex λ: rank doubles.
            let big = Mat::from_fn(2 * n, 2 * n, |r, c| {
                let (bi, bj) = (r / n, c / n);
                let (i, j) = (r % n, c % n);
                let diag = if i == j { 1.0 } else { 0.0 };
                match (bi, bj) {
                    (0, 0) | (1, 1) => m[(i, j)] - lam.re * diag,
                    (0, 1) => lam.im * diag,
                    _ => -lam.im * diag,
                }
            });
            (2 * n - super::rank(&big, tol.max(1e-14))) / 2
        };
        if nullity < mult {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(e: &Eigenvalue, re: f64, im: f64, tol: f64) -> bool {
        (e.re - re).abs() <= tol && (e.im - im).abs() <= tol
    }

    #[test]
    fn diagonal_matrix() {
        let s = spectral_abscissa(&Mat::diag(&[-1.0, -2.0])).unwrap();
        assert_eq!(s.abscissa, -1.0);
        assert!(close(&s.eigenvalues[0], -1.0, 0.0, 0.0));
        assert!(close(&s.eigenvalues[1], -2.0, 0.0, 0.0));
    }

    #[test]
    fn complex_pair() {
        // s² + 2s + 2 → −1 ± i
        let s = spectral_abscissa(&Mat::from_rows(&[&[0.0, 1.0], &[-2.0, -2.0]])).unwrap();
        assert!((s.abscissa + 1.0).abs() < 1e-14);
        assert!(s.eigenvalues.iter().any(|e| close(e, -1.0, 1.0, 1e-14)));
        assert!(s.eigenvalues.iter().any(|e| close(e, -1.0, -1.0, 1e-14)));
    }

    #[test]
    fn nilpotent() {
        let s = spectral_abscissa(&Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap();
        assert_eq!(s.abscissa, 0.0);
    }

    #[test]
    fn companion_of_known_polynomial() {
        // (s+1)(s+2)(s+3)(s−4) = s⁴ + 2s³ − 13s² − 38s − 24
        let c = Mat::from_rows(&[
            &[-2.0, 13.0, 38.0, 24.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        let s = spectral_abscissa(&c).unwrap();
        let re: Vec<f64> = s.eigenvalues.iter().map(|e| e.re).collect();
        for (got, want) in re.iter().zip([4.0, -1.0, -2.0, -3.0]) {
            assert!((got - want).abs() < 1e-10, "{re:?}");
        }
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(
            spectral_abscissa(&Mat::zeros(2, 3)),
            Err(LinalgError::NotSquare { .. })
        ));
    }

    #[test]
    fn stability_dead_zone() {
        assert_eq!(Stability::classify(-1e-3, 1e-9), Stability::Hurwitz);
        assert_eq!(Stability::classify(-1e-10, 1e-9), Stability::Marginal);
        assert_eq!(Stability::classify(0.5, 1e-9), Stability::Unstable);
    }

    #[test]
    fn diagonalizability() {
        assert!(is_diagonalizable(&Mat::diag(&[1.0, 1.0, 2.0]), 1e-10).unwrap());
        assert!(!is_diagonalizable(&Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]), 1e-10).unwrap());
        assert!(is_diagonalizable(&Mat::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]), 1e-10).unwrap());
        // rank-one B·K with nonzero trace
        assert!(is_diagonalizable(&Mat::from_rows(&[&[0.0, 0.0], &[9.0, 6.0]]), 1e-10).unwrap());
    }
}
