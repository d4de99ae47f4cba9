//! Sampling grids and monotonicity checks used by the sweeps.

/// `n` points from `lo` to `hi` (inclusive), equally spaced in log scale.
pub fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > 0.0, "geometric grid needs positive endpoints");
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (l0, l1) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// `n` equally spaced points from `lo` to `hi` (inclusive).
pub fn linear(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

pub fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

pub fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Minimizer of a unimodal `f` on `[lo, hi]` by golden-section search.
/// Returns `(x, f(x))`.
pub fn golden_section(mut lo: f64, mut hi: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..500 {
        if (hi - lo) <= tol * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = geometric(10.0, 1e4, 4);
        assert_eq!(g.len(), 4);
        assert!((g[1] - 100.0).abs() < 1e-9 && g[3] == 1e4);
        assert_eq!(linear(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert!(strictly_increasing(&g) && !strictly_decreasing(&g));
    }

    #[test]
    fn golden() {
        let (x, fx) = golden_section(0.0, 5.0, 1e-12, |x| (x - 2.0) * (x - 2.0) + 1.0);
        assert!((x - 2.0).abs() < 1e-6 && (fx - 1.0).abs() < 1e-12);
    }
}
