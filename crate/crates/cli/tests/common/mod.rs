//! Test oracles, deliberately independent of the library's own kernels:
//! a dense Gaussian elimination solver and a compensated dot product.

/// Solve a dense row-major `n x n` system by Gaussian elimination with
/// partial pivoting. Panics on a numerically singular pivot.
pub fn lu_solve(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let w = n + 1;
    let mut aug = vec![0.0; n * w];
    for r in 0..n {
        aug[r * w..r * w + n].copy_from_slice(&a[r * n..(r + 1) * n]);
        aug[r * w + n] = b[r];
    }
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if aug[i * w + k].abs() > aug[p * w + k].abs() {
                p = i;
            }
        }
        assert!(aug[p * w + k] != 0.0, "singular matrix in LU oracle");
        if p != k {
            for c in 0..w {
                aug.swap(k * w + c, p * w + c);
            }
        }
        for i in k + 1..n {
            let f = aug[i * w + k] / aug[k * w + k];
            if f != 0.0 {
                for c in k..w {
                    aug[i * w + c] -= f * aug[k * w + c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = aug[i * w + n];
        for c in i + 1..n {
            s -= aug[i * w + c] * x[c];
        }
        x[i] = s / aug[i * w + i];
    }
    x
}

/// Neumaier-compensated dot product, accurate to ~1 ulp of the true value.
#[allow(dead_code)]
pub fn compensated_dot(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for i in 0..x.len() {
        let p = x[i] * y[i];
        let t = s + p;
        if s.abs() >= p.abs() {
            c += (s - t) + p;
        } else {
            c += (p - t) + s;
        }
        s = t;
    }
    s + c
}

/// Largest absolute elementwise difference.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}
