//! Dense assembly of the spatial operator: the literal stencil rows, the
//! boundary closure rows, and the inhomogeneous boundary lift. This path
//! exists for verification — eigenvalue studies, equality oracles for the
//! matrix-free kernel, and the matrix-exponential reference solver — not for
//! production time stepping.

use nalgebra::{DMatrix, DVector};

/// Interior stencil coefficients (unscaled by `1/(3h²)`).
///
/// The first row acts at the left node of a cell with column offsets
/// `-2..=3`; the second acts at the right node with offsets `-3..=2` and is
/// the reversal of the first.
pub fn stencil_rows(c: f64) -> ([f64; 6], [f64; 6]) {
    let even = [
        -1.0 + c,
        16.0 - 5.0 * c,
        -30.0 + 10.0 * c,
        16.0 - 10.0 * c,
        -1.0 + 5.0 * c,
        -c,
    ];
    let mut odd = even;
    odd.reverse();
    (even, odd)
}

/// Homogeneous boundary closure rows for the first cell (unscaled by
/// `1/(3h²)`), acting on the first four interior nodes. The last cell uses
/// the same rows mirrored.
pub fn closure_rows(c: f64) -> [[f64; 4]; 2] {
    [
        [-46.0 + 15.0 * c, 17.0 - 11.0 * c, -1.0 + 5.0 * c, -c],
        [17.0 - 15.0 * c, -30.0 + 11.0 * c, 16.0 - 5.0 * c, -1.0 + c],
    ]
}

/// Boundary lift coefficients `(w_g, w_2, w_4)` for the two rows of a
/// boundary cell, nearest-node row first. The lift contribution of a face
/// with traces `(g, u_xx, u_xxxx)` to its row is
/// `(w_g·g + w_2·q²·u_xx + w_4·q⁴·u_xxxx) / (3h²)` with `q = h/4`.
pub fn lift_coeffs(c: f64) -> ([f64; 3], [f64; 3]) {
    (
        [30.0 - 8.0 * c, 7.0 + 4.0 * c, (-65.0 + 76.0 * c) / 12.0],
        [-2.0 + 8.0 * c, -1.0 - 4.0 * c, (-1.0 - 76.0 * c) / 12.0],
    )
}

/// Scalar lift value for one face and one row.
pub fn lift_value(coeffs: [f64; 3], traces: [f64; 3], h: f64) -> f64 {
    let q = 0.25 * h;
    (coeffs[0] * traces[0] + coeffs[1] * q * q * traces[1] + coeffs[2] * q.powi(4) * traces[2])
        / (3.0 * h * h)
}

/// Dense periodic operator on one axis: `2N × 2N`.
pub fn q1d_periodic(n_cells: usize, c: f64, h: f64) -> DMatrix<f64> {
    let n = 2 * n_cells;
    let scale = 1.0 / (3.0 * h * h);
    let (even, odd) = stencil_rows(c);
    let mut a = DMatrix::zeros(n, n);
    for k in (0..n).step_by(2) {
        for (off, &v) in (-2..=3).zip(even.iter()) {
            let col = (k as isize + off).rem_euclid(n as isize) as usize;
            a[(k, col)] += v * scale;
        }
        for (off, &v) in (-3..=2).zip(odd.iter()) {
            let col = (k as isize + 1 + off).rem_euclid(n as isize) as usize;
            a[(k + 1, col)] += v * scale;
        }
    }
    a
}

/// Dense Dirichlet operator on one axis: interior stencil rows plus the
/// closure rows in the first and last cells (homogeneous part only; the
/// data-dependent part is the lift).
pub fn q1d_dirichlet(n_cells: usize, c: f64, h: f64) -> DMatrix<f64> {
    let n = 2 * n_cells;
    let scale = 1.0 / (3.0 * h * h);
    let (even, odd) = stencil_rows(c);
    let mut a = DMatrix::zeros(n, n);
    for k in (2..n - 2).step_by(2) {
        for (off, &v) in (-2..=3).zip(even.iter()) {
            a[(k, (k as isize + off) as usize)] = v * scale;
        }
    }
    for k in (3..n - 2).step_by(2) {
        for (off, &v) in (-3..=2).zip(odd.iter()) {
            a[(k, (k as isize + off) as usize)] = v * scale;
        }
    }
    let rows = closure_rows(c);
    for j in 0..4 {
        a[(0, j)] = rows[0][j] * scale;
        a[(1, j)] = rows[1][j] * scale;
        // Mirrored: same coefficients read right-to-left from the last node.
        a[(n - 1, n - 1 - j)] = rows[0][j] * scale;
        a[(n - 2, n - 1 - j)] = rows[1][j] * scale;
    }
    a
}

/// Dirichlet boundary lift vector on one axis for face traces
/// `tr0 = [g, u_xx, u_xxxx]` (left) and `tr1` (right).
pub fn lift1d(n_cells: usize, c: f64, h: f64, tr0: [f64; 3], tr1: [f64; 3]) -> DVector<f64> {
    let n = 2 * n_cells;
    let (first, second) = lift_coeffs(c);
    let mut b = DVector::zeros(n);
    b[0] = lift_value(first, tr0, h);
    b[1] = lift_value(second, tr0, h);
    b[n - 1] = lift_value(first, tr1, h);
    b[n - 2] = lift_value(second, tr1, h);
    b
}
