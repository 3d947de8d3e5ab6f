//! Independent reference computations shared by the test suites.

use pcm_core::PCMatrix;

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Right and left Perron vectors (unit sum) from `A^(2^squarings)`.
///
/// The power converges to `lambda^k w v^T`, so any column is proportional to
/// the right vector and any row to the left vector. The matrix is rescaled
/// after each squaring to stay in range.
pub fn perron_by_squaring(a: &PCMatrix, squarings: usize) -> (Vec<f64>, Vec<f64>) {
    let n = a.order();
    let mut p = a.as_slice().to_vec();
    for _ in 0..squarings {
        p = matmul(&p, &p, n);
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
    }
    let col: Vec<f64> = (0..n).map(|i| (0..n).map(|j| p[i * n + j]).sum()).collect();
    let row: Vec<f64> = (0..n).map(|j| (0..n).map(|i| p[i * n + j]).sum()).collect();
    (unit_sum(&col), unit_sum(&row))
}

pub fn unit_sum(v: &[f64]) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
