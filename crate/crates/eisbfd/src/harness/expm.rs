//! Dense reference solutions, independent of the time integrator: a
//! scaling-and-squaring matrix exponential and a Duhamel-quadrature solve of
//! the semi-discrete system `u′ = Q·u + b(t)`.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::operator::SpatialOperator;
use crate::timestepper::ForcingRef;

/// Matrix exponential by the degree-13 Padé approximant with scaling and
/// squaring — the standard double-precision algorithm.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.nrows(), a.ncols(), "matrix exponential needs a square matrix");
    // Largest 1-norm at which the degree-13 approximant is full-precision.
    const THETA13: f64 = 5.371_920_351_148_152;
    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        ((norm / THETA13).log2().ceil() as i32).max(0)
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);
    let mut r = pade13(&scaled);
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade13(a: &DMatrix<f64>) -> DMatrix<f64> {
    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u = a * (&a6 * (&a6 * B[13] + &a4 * B[11] + &a2 * B[9])
        + &a6 * B[7]
        + &a4 * B[5]
        + &a2 * B[3]
        + &id * B[1]);
    let v = &a6 * (&a6 * B[12] + &a4 * B[10] + &a2 * B[8])
        + &a6 * B[6]
        + &a4 * B[4]
        + &a2 * B[2]
        + &id * B[0];
    (&v - &u)
        .lu()
        .solve(&(&v + &u))
        .expect("Padé denominator is nonsingular")
}

/// Gauss–Legendre nodes (ascending) and weights on `[−1, 1]`, by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-angle initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `(P_n(x), P_n′(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut curr = x;
    for j in 1..n {
        let next = ((2 * j + 1) as f64 * x * curr - j as f64 * prev) / (j + 1) as f64;
        prev = curr;
        curr = next;
    }
    let dp = n as f64 * (x * curr - prev) / (x * x - 1.0);
    (curr, dp)
}

/// Reference solve of `u′ = Q·u + b(t) + F(t)` by the variation-of-constants
/// formula: `u(T) = e^{Q·(T−t0)}·u0 + ∫ e^{Q·(T−s)}·(b+F)(s) ds`, with the
/// integral evaluated by `n_quad`-point Gauss–Legendre quadrature. `Q` and
/// the boundary lift `b` come from the operator's dense assembly; `F` is the
/// same accumulating volume-forcing callback the time integrator takes.
/// Independent of the Runge–Kutta path, so agreement validates both.
pub fn duhamel_reference(
    op: &SpatialOperator,
    forcing: Option<ForcingRef<'_>>,
    u0: &[f64],
    t0: f64,
    t1: f64,
    n_quad: usize,
) -> Result<Vec<f64>> {
    let (q, _) = op.assemble_dense(t0)?;
    let span = t1 - t0;
    let mut u = expm(&(&q * span)) * DVector::from_column_slice(u0);
    let (xs, ws) = gauss_legendre(n_quad);
    let mut sample = vec![0.0; u0.len()];
    for (&x, &w) in xs.iter().zip(&ws) {
        let s = t0 + 0.5 * span * (x + 1.0);
        let (_, mut b) = op.assemble_dense(s)?;
        if let Some(f) = forcing {
            sample.iter_mut().for_each(|v| *v = 0.0);
            f(s, &mut sample);
            for (bi, &e) in b.iter_mut().zip(&sample) {
                *bi += e;
            }
        }
        u += expm(&(&q * (t1 - s))) * b * (0.5 * span * w);
    }
    Ok(u.as_slice().to_vec())
}
