#![allow(dead_code)]

use subwave_core::{CMatrix, C64};

/// Gaussian elimination with partial pivoting on a copy.
pub fn det_by_elimination(m: &CMatrix) -> C64 {
    let n = m.dim();
    let mut a: Vec<Vec<C64>> = (0..n).map(|r| m.row(r).to_vec()).collect();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        let (top, bottom) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in bottom.iter_mut() {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
    }
    det
}

/// exp(A)·v by scaling and squaring a truncated Taylor series.
pub fn expm_apply(a: &CMatrix, v: &[C64]) -> Vec<C64> {
    let n = a.dim();
    let norm = (0..n)
        .map(|r| a.row(r).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
    let mut exp = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..30 {
        term = term.matmul(&scaled).scale(C64::new(1.0 / k as f64, 0.0));
        exp = exp.add(&term);
    }
    for _ in 0..squarings {
        exp = exp.matmul(&exp);
    }
    exp.mul_vec(v)
}

/// α(t) = exp(−γ₀tJ/2)·α₀ from the Taylor oracle.
pub fn oracle_amplitudes(j: &CMatrix, gamma0: f64, t: f64, alpha0: &[C64]) -> Vec<C64> {
    expm_apply(&j.scale(C64::new(-0.5 * gamma0 * t, 0.0)), alpha0)
}

pub fn real_unit(v: &[f64]) -> Vec<C64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|&x| C64::new(x / norm, 0.0)).collect()
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
