//! Matrix-free application of the two-node block stencil along one grid line.
//!
//! The interior stencil mixes a five-point second-difference part with a
//! `c`-weighted fifth-difference part whose coefficients are large and of
//! opposite signs (entries up to `30/(3h²)`). Evaluating rows literally
//! cancels catastrophically: the result is `O(u'')` but the summands are
//! `O(u/h²)`, so every application injects rounding noise of order
//! `eps·|u|/h²`, which over the many steps of a refinement study drowns the
//! fifth-to-seventh-order error levels being measured. Both stencil rows are
//! therefore evaluated in an algebraically identical difference form on a
//! ghost-extended line:
//!
//! - five-point part: `14·d2[k] − d2[k−1] − d2[k+1]` of second differences
//!   `d2`, whose magnitude is already `O(h²u'')`;
//! - `c` part: a forward fifth difference `d5` of the extension, shared by
//!   the two rows of each cell with opposite signs.
//!
//! Dense assembly (`dense.rs`) keeps the literal rows and serves as the
//! equality oracle for this kernel.

/// Ghost pad width on each side of an extended line.
pub(crate) const PAD: usize = 2;

/// Extend a periodic line: `w = [u[n-2], u[n-1], u..., u[0], u[1]]`.
pub(crate) fn extend_periodic_into(u: &[f64], w: &mut Vec<f64>) {
    let n = u.len();
    w.clear();
    w.reserve(n + 2 * PAD);
    w.extend_from_slice(&u[n - 2..]);
    w.extend_from_slice(u);
    w.extend_from_slice(&u[..2]);
}

/// Antisymmetric ghost extension for a Dirichlet line.
///
/// `tr0 = [g, u_xx, u_xxxx]` at the left face and `tr1` at the right face.
/// The ghost value at distance `a` past a face with boundary value `g` is
/// `-u(a) + 2g + u_xx·a² + u_xxxx·a⁴/12`, which matches the interior solution
/// to `O(a⁶)` for smooth data. The first interior nodes sit at `a = h/4` and
/// `a = 3h/4` from each face.
pub(crate) fn extend_dirichlet_into(u: &[f64], h: f64, tr0: [f64; 3], tr1: [f64; 3], w: &mut Vec<f64>) {
    let n = u.len();
    let a1 = 0.25 * h;
    let a2 = 0.75 * h;
    let [g0, x2, x4] = tr0;
    let [g1, y2, y4] = tr1;
    let gm1 = -u[0] + 2.0 * g0 + x2 * a1 * a1 + x4 * a1.powi(4) / 12.0;
    let gm2 = -u[1] + 2.0 * g0 + x2 * a2 * a2 + x4 * a2.powi(4) / 12.0;
    let gp1 = -u[n - 1] + 2.0 * g1 + y2 * a1 * a1 + y4 * a1.powi(4) / 12.0;
    let gp2 = -u[n - 2] + 2.0 * g1 + y2 * a2 * a2 + y4 * a2.powi(4) / 12.0;
    w.clear();
    w.reserve(n + 2 * PAD);
    w.push(gm2);
    w.push(gm1);
    w.extend_from_slice(u);
    w.push(gp1);
    w.push(gp2);
}

/// Apply the stencil to an extended line `w` (length `n + 4`), writing the
/// `n` node values of the discrete second derivative into `out`.
pub(crate) fn kernel_into(w: &[f64], c: f64, h: f64, out: &mut [f64]) {
    let n = out.len();
    debug_assert_eq!(w.len(), n + 2 * PAD);
    debug_assert_eq!(n % 2, 0);
    let inv = 1.0 / (3.0 * h * h);
    // Second differences of the extension: d2(i) = w[i] - 2w[i+1] + w[i+2],
    // so d2(i) is centered at extended index i+1 = interior node i-1.
    let d2 = |i: usize| w[i] - 2.0 * w[i + 1] + w[i + 2];
    let mut da = d2(0);
    let mut db = d2(1);
    let mut k = 0;
    while k < n {
        let dc = d2(k + 2);
        let dd = d2(k + 3);
        // Fifth difference via nested first differences (better cancellation
        // than the expanded binomial form when the line is smooth).
        let e1 = db - da;
        let e2 = dc - db;
        let e3 = dd - dc;
        let d5 = (e3 - e2) - (e2 - e1);
        let base_even = 14.0 * db - da - dc;
        let base_odd = 14.0 * dc - db - dd;
        out[k] = (base_even - c * d5) * inv;
        out[k + 1] = (base_odd + c * d5) * inv;
        da = dc;
        db = dd;
        k += 2;
    }
}
