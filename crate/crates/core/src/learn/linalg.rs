use alloc::vec;
use alloc::vec::Vec;

use crate::par;

/// Dot product with four independent accumulators; the summation order is
/// fixed, so results are reproducible.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            let t = x[l] - y[l];
            acc[l] += t * t;
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += (x - y) * (x - y);
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Symmetric `n x n` matrix of inner products between the rows of `x`.
pub(crate) fn gram(x: &[f64], d: usize) -> Vec<f64> {
    let n = x.len() / d;
    let rows: Vec<Vec<f64>> = par::map_range(n, |i| {
        let xi = &x[i * d..(i + 1) * d];
        (0..=i).map(|j| dot(xi, &x[j * d..(j + 1) * d])).collect()
    });
    let mut g = vec![0.0; n * n];
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            g[i * n + j] = v;
            g[j * n + i] = v;
        }
    }
    g
}

/// `m x n` inner products between rows of `a` and rows of `b`.
pub(crate) fn cross_gram(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let (m, n) = (a.len() / d, b.len() / d);
    par::map_range(m, |i| {
        let ai = &a[i * d..(i + 1) * d];
        (0..n).map(|j| dot(ai, &b[j * d..(j + 1) * d])).collect::<Vec<_>>()
    })
    .concat()
}

pub(crate) fn sq_norms(x: &[f64], d: usize) -> Vec<f64> {
    x.chunks_exact(d).map(|r| dot(r, r)).collect()
}
