//! Equivalence of the block finite-difference stencil with a nodal
//! discontinuous-Galerkin scheme.
//!
//! The two-node-per-cell stencil of [`crate::operator`] is not an arbitrary
//! finite-difference formula: it is exactly the strong (mass-matrix-inverted)
//! form of a penalized local DG discretization of `u_t = u_xx` with linear hat
//! bases on each cell, generalized interface fluxes, and a one-parameter
//! family of interface penalties. This module assembles that weak form
//! explicitly and demonstrates the equality — entrywise, and exactly in
//! rational arithmetic for rational inputs.
//!
//! The weak form on a cell reads, for each test function `v ∈ {φ_left, φ_right}`:
//!
//! ```text
//! (u_t, v) = −∫ u_x v_x dx
//!            + û_x·v⁻|_right − û_x·v⁺|_left
//!            + (C₁/h·[u] + C₂·[u_x])·v⁻|_right − (D₁/h·[u] + D₂·[u_x])·v⁺|_left
//!            + (E₁·[u] + h·E₂·[u_x])·v_x|_right − (F₁·[u] + h·F₂·[u_x])·v_x|_left
//! ```
//!
//! with jumps `[w] = w⁺ − w⁻` and fluxes `û_x = α·u_x⁻ + (1−α)·u_x⁺` (right
//! face) and `û_x = β·u_x⁻ + (1−β)·u_x⁺` (left face). For a specific choice of
//! the eight penalty coefficients — [`PenaltyCoefficients::interior_solution`]
//! — the resulting nodal update blocks coincide with the interior stencil for
//! every `c`, `α`, and `β`. A second solution with `α = 1`, `β = 0` and bare
//! boundary traces in place of jumps — [`PenaltyCoefficients::boundary_solution`]
//! — reproduces the one-sided first-cell closure rows of the Dirichlet
//! operator. The classical Baumann–Oden choice (central flux, no penalties,
//! `E₁ = 1/2`, `F₁ = −1/2`) falls out of the same assembly as a cross-check.
//!
//! All quadrature here is exact: the integrands are piecewise polynomials of
//! degree ≤ 2, so the volume term and the 2×2 local mass matrix are hard-coded
//! closed forms, and the assembly is evaluated either in `f64` or in exact
//! `i64` rationals. Rounding is the only error on the float path; the rational
//! path has none.

use num_rational::Ratio;
use num_traits::FromPrimitive;
use std::fmt::Write as _;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::operator::dense;

/// One 2×2 nodal coupling block, row-major, in units of `1/h²`.
pub type Block2 = [[f64; 2]; 2];

/// The three nodal update blocks of an interior cell: couplings of the cell's
/// two nodes to the left neighbor cell (`a`), to the cell itself (`b`), and to
/// the right neighbor cell (`c`). Scale `1/h²`.
///
/// Consistency invariant: the scheme annihilates constants, so each row of
/// `a + b + c` sums to zero (see [`Self::consistency_residual`]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodalBlockTriple {
    /// Coupling to the two nodes of the left neighbor cell.
    pub a: Block2,
    /// Coupling of the cell's two nodes to themselves.
    pub b: Block2,
    /// Coupling to the two nodes of the right neighbor cell.
    pub c: Block2,
}

impl NodalBlockTriple {
    /// Maximum over rows of `|Σ_k (a + b + c)[row][k]|` — zero (up to
    /// rounding) exactly when the update annihilates constant fields.
    pub fn consistency_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for row in 0..2 {
            let mut s = 0.0;
            for col in 0..2 {
                s += self.a[row][col] + self.b[row][col] + self.c[row][col];
            }
            worst = worst.max(s.abs());
        }
        worst
    }

    /// Largest entrywise absolute difference against another triple.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for (mine, theirs) in [
            (&self.a, &other.a),
            (&self.b, &other.b),
            (&self.c, &other.c),
        ] {
            for row in 0..2 {
                for col in 0..2 {
                    worst = worst.max((mine[row][col] - theirs[row][col]).abs());
                }
            }
        }
        worst
    }
}

/// The interface penalty and flux weights of the generalized weak form.
///
/// `c1, c2` act on the value/derivative jumps at a cell's right face tested
/// with `v⁻`; `d1, d2` likewise at the left face tested with `v⁺`; `e1, e2`
/// and `f1, f2` are the corresponding penalties tested with `v_x`. `alpha`
/// and `beta` weight the one-sided derivative traces in the right and left
/// numerical fluxes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
    pub e1: f64,
    pub e2: f64,
    pub f1: f64,
    pub f2: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl PenaltyCoefficients {
    /// The unique penalty choice that makes the weak form reproduce the
    /// interior stencil blocks for the free parameter `c`, independent of the
    /// flux weights: `C₁ = D₁ = 7/3`, `C₂ = α − 1/2`, `D₂ = β − 1/2`,
    /// `E₁ = −(8c+5)/18`, `E₂ = −(c+1)/18`, `F₁ = (8c+5)/18`,
    /// `F₂ = −(c+1)/18`.
    ///
    /// The `α` and `β` dependence of the fluxes is exactly compensated by
    /// `C₂` and `D₂`, which is why the equivalence holds for every flux pair.
    pub fn interior_solution(c: f64, alpha: f64, beta: f64) -> Self {
        Self {
            c1: 7.0 / 3.0,
            c2: alpha - 0.5,
            d1: 7.0 / 3.0,
            d2: beta - 0.5,
            e1: -(8.0 * c + 5.0) / 18.0,
            e2: -(c + 1.0) / 18.0,
            f1: (8.0 * c + 5.0) / 18.0,
            f2: -(c + 1.0) / 18.0,
            alpha,
            beta,
        }
    }

    /// The classical Baumann–Oden scheme: central flux, no interface
    /// penalties, and the symmetrizing `v_x`-tested value terms with weights
    /// `E₁ = 1/2`, `F₁ = −1/2`.
    pub fn baumann_oden() -> Self {
        Self {
            c1: 0.0,
            c2: 0.0,
            d1: 0.0,
            d2: 0.0,
            e1: 0.5,
            e2: 0.0,
            f1: -0.5,
            f2: 0.0,
            alpha: 0.5,
            beta: 0.5,
        }
    }

    /// The penalty solution for the first Dirichlet cell, whose left face is
    /// the physical boundary: `C₁ = 7/3`, `C₂ = 1/2`, `D₁ = 14/3 = 2C₁`,
    /// `D₂ = 0`, `E₁ = −(8c+5)/18`, `E₂ = −(c+1)/18`, `F₁ = (8c+5)/9`,
    /// `F₂ = 0`, with flux weights `α = 1` and `β = 0` (there is no cell on
    /// the minus side of the boundary face). Left-face "jumps" degenerate to
    /// the bare interior traces, since the homogeneous boundary state is zero.
    pub fn boundary_solution(c: f64) -> Self {
        Self {
            c1: 7.0 / 3.0,
            c2: 0.5,
            d1: 14.0 / 3.0,
            d2: 0.0,
            e1: -(8.0 * c + 5.0) / 18.0,
            e2: -(c + 1.0) / 18.0,
            f1: (8.0 * c + 5.0) / 9.0,
            f2: 0.0,
            alpha: 1.0,
            beta: 0.0,
        }
    }

    /// All penalties zero with the given flux weights (the bare central-flux
    /// scheme when `α = β = 1/2`).
    pub fn fluxes_only(alpha: f64, beta: f64) -> Self {
        Self {
            c1: 0.0,
            c2: 0.0,
            d1: 0.0,
            d2: 0.0,
            e1: 0.0,
            e2: 0.0,
            f1: 0.0,
            f2: 0.0,
            alpha,
            beta,
        }
    }
}

// ---------------------------------------------------------------------------
// Generic weak-form assembly, shared by the f64 and exact-rational paths.
// ---------------------------------------------------------------------------

/// Scalar fields the assembly is generic over: `f64` and `Ratio<i64>`.
trait Scalar:
    Copy
    + PartialEq
    + FromPrimitive
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Scalar for Ratio<i64> {
    fn zero() -> Self {
        Ratio::new(0, 1)
    }
}

/// The fraction `n/d` in the target scalar field (exact for rationals,
/// correctly rounded for `f64`).
fn frac<T: Scalar>(n: i64, d: i64) -> T {
    T::from_i64(n).expect("small integer is representable")
        / T::from_i64(d).expect("small integer is representable")
}

/// Penalty coefficients in the generic scalar field.
struct Pen<T> {
    c1: T,
    c2: T,
    d1: T,
    d2: T,
    e1: T,
    e2: T,
    f1: T,
    f2: T,
    alpha: T,
    beta: T,
}

impl From<&PenaltyCoefficients> for Pen<f64> {
    fn from(p: &PenaltyCoefficients) -> Self {
        Pen {
            c1: p.c1,
            c2: p.c2,
            d1: p.d1,
            d2: p.d2,
            e1: p.e1,
            e2: p.e2,
            f1: p.f1,
            f2: p.f2,
            alpha: p.alpha,
            beta: p.beta,
        }
    }
}

type Q = Ratio<i64>;

/// Exact-rational interior penalty solution (mirrors
/// [`PenaltyCoefficients::interior_solution`]).
fn pen_interior_exact(c: Q, alpha: Q, beta: Q) -> Pen<Q> {
    let half = frac::<Q>(1, 2);
    Pen {
        c1: frac(7, 3),
        c2: alpha - half,
        d1: frac(7, 3),
        d2: beta - half,
        e1: -(frac::<Q>(8, 18) * c + frac::<Q>(5, 18)),
        e2: -(c + frac::<Q>(1, 1)) / frac::<Q>(18, 1),
        f1: frac::<Q>(8, 18) * c + frac::<Q>(5, 18),
        f2: -(c + frac::<Q>(1, 1)) / frac::<Q>(18, 1),
        alpha,
        beta,
    }
}

/// Exact-rational boundary penalty solution (mirrors
/// [`PenaltyCoefficients::boundary_solution`]).
fn pen_boundary_exact(c: Q) -> Pen<Q> {
    Pen {
        c1: frac(7, 3),
        c2: frac(1, 2),
        d1: frac(14, 3),
        d2: frac(0, 1),
        e1: -(frac::<Q>(8, 18) * c + frac::<Q>(5, 18)),
        e2: -(c + frac::<Q>(1, 1)) / frac::<Q>(18, 1),
        f1: frac::<Q>(8, 9) * c + frac::<Q>(5, 9),
        f2: frac(0, 1),
        alpha: frac(1, 1),
        beta: frac(0, 1),
    }
}

/// `acc += s·v`, elementwise.
fn axpy<T: Scalar, const W: usize>(acc: &mut [T; W], v: &[T; W], s: T) {
    for k in 0..W {
        acc[k] = acc[k] + s * v[k];
    }
}

/// Face traces of the numerical solution around one cell, each expressed as a
/// row vector over the `W` nodal unknowns entering the cell's update. `m`/`p`
/// denote the minus (left-of-face) and plus (right-of-face) sides; `l`/`r`
/// the cell's left and right faces. A physical boundary face is encoded by
/// zero minus-side traces, which turns the face jumps into the bare interior
/// traces used there (homogeneous boundary data).
struct FaceTraces<T, const W: usize> {
    u_m_l: [T; W],
    ux_m_l: [T; W],
    u_p_l: [T; W],
    ux_p_l: [T; W],
    u_m_r: [T; W],
    ux_m_r: [T; W],
    u_p_r: [T; W],
    ux_p_r: [T; W],
    /// The (constant) derivative of the numerical solution inside the cell.
    ux_cell: [T; W],
}

/// Interior-cell traces over the six nodal values
/// `[u_{j−5/4}, u_{j−3/4}, u_{j−1/4}, u_{j+1/4}, u_{j+3/4}, u_{j+5/4}]`
/// at unit cell width. Hat-basis traces extrapolate to a face as
/// `(3/2)·near − (1/2)·far`; cell slopes are `2·(right − left)`.
fn interior_traces<T: Scalar>() -> FaceTraces<T, 6> {
    let o = T::zero();
    let h3 = frac::<T>(3, 2);
    let mh = frac::<T>(-1, 2);
    let two = frac::<T>(2, 1);
    let mtwo = frac::<T>(-2, 1);
    FaceTraces {
        u_m_l: [mh, h3, o, o, o, o],
        ux_m_l: [mtwo, two, o, o, o, o],
        u_p_l: [o, o, h3, mh, o, o],
        ux_p_l: [o, o, mtwo, two, o, o],
        u_m_r: [o, o, mh, h3, o, o],
        ux_m_r: [o, o, mtwo, two, o, o],
        u_p_r: [o, o, o, o, h3, mh],
        ux_p_r: [o, o, o, o, mtwo, two],
        ux_cell: [o, o, mtwo, two, o, o],
    }
}

/// First-cell traces over the four nodal values
/// `[u_{1−1/4}, u_{1+1/4}, u_{1+3/4}, u_{1+5/4}]` at unit cell width. The
/// left face is the physical boundary: its minus-side traces are zero.
fn boundary_traces<T: Scalar>() -> FaceTraces<T, 4> {
    let o = T::zero();
    let h3 = frac::<T>(3, 2);
    let mh = frac::<T>(-1, 2);
    let two = frac::<T>(2, 1);
    let mtwo = frac::<T>(-2, 1);
    FaceTraces {
        u_m_l: [o; 4],
        ux_m_l: [o; 4],
        u_p_l: [h3, mh, o, o],
        ux_p_l: [mtwo, two, o, o],
        u_m_r: [mh, h3, o, o],
        ux_m_r: [mtwo, two, o, o],
        u_p_r: [o, o, h3, mh],
        ux_p_r: [o, o, mtwo, two],
        ux_cell: [mtwo, two, o, o],
    }
}

/// Evaluate the penalized weak form on one cell at unit width and invert the
/// local mass matrix, producing the two nodal update rows over the `W`
/// participating nodal values. Blocks for width `h` are these rows times
/// `1/h²` (every term of the weak form scales as `1/h`, as does the mass
/// matrix).
///
/// Quadrature is exact: the volume term of two piecewise-linear factors is
/// `−h·u_x·v_x` (both slopes constant per cell), and the hat-basis mass
/// matrix `h/12·[[7,−1],[−1,7]]` has the closed-form inverse
/// `1/(4h)·[[7,1],[1,7]]`.
fn weak_rows_unit<T: Scalar, const W: usize>(p: &Pen<T>, tr: &FaceTraces<T, W>) -> [[T; W]; 2] {
    let one = frac::<T>(1, 1);

    // Jumps (plus minus minus) and one-parameter fluxes at both faces.
    let mut jump_u_r = [T::zero(); W];
    let mut jump_ux_r = [T::zero(); W];
    let mut jump_u_l = [T::zero(); W];
    let mut jump_ux_l = [T::zero(); W];
    let mut flux_r = [T::zero(); W];
    let mut flux_l = [T::zero(); W];
    for k in 0..W {
        jump_u_r[k] = tr.u_p_r[k] - tr.u_m_r[k];
        jump_ux_r[k] = tr.ux_p_r[k] - tr.ux_m_r[k];
        jump_u_l[k] = tr.u_p_l[k] - tr.u_m_l[k];
        jump_ux_l[k] = tr.ux_p_l[k] - tr.ux_m_l[k];
        flux_r[k] = p.alpha * tr.ux_m_r[k] + (one - p.alpha) * tr.ux_p_r[k];
        flux_l[k] = p.beta * tr.ux_m_l[k] + (one - p.beta) * tr.ux_p_l[k];
    }

    // Test-function traces for the two hat functions of the cell: row 0 tests
    // with the left-node hat, row 1 with the right-node hat.
    let v_p_l = [frac::<T>(3, 2), frac::<T>(-1, 2)];
    let v_m_r = [frac::<T>(-1, 2), frac::<T>(3, 2)];
    let v_x = [frac::<T>(-2, 1), frac::<T>(2, 1)];

    let mut rows = [[T::zero(); W]; 2];
    for i in 0..2 {
        let r = &mut rows[i];
        // −∫ u_x v_x over the unit cell.
        axpy(r, &tr.ux_cell, -v_x[i]);
        // Flux terms: +û_x v⁻ at the right face, −û_x v⁺ at the left face.
        axpy(r, &flux_r, v_m_r[i]);
        axpy(r, &flux_l, -v_p_l[i]);
        // Value/derivative jump penalties tested with the face traces of v.
        axpy(r, &jump_u_r, p.c1 * v_m_r[i]);
        axpy(r, &jump_ux_r, p.c2 * v_m_r[i]);
        axpy(r, &jump_u_l, -(p.d1 * v_p_l[i]));
        axpy(r, &jump_ux_l, -(p.d2 * v_p_l[i]));
        // Jump penalties tested with v_x.
        axpy(r, &jump_u_r, p.e1 * v_x[i]);
        axpy(r, &jump_ux_r, p.e2 * v_x[i]);
        axpy(r, &jump_u_l, -(p.f1 * v_x[i]));
        axpy(r, &jump_ux_l, -(p.f2 * v_x[i]));
    }

    // Invert the unit-width mass matrix: M⁻¹ = (1/4)·[[7, 1], [1, 7]].
    let seven = frac::<T>(7, 1);
    let quarter = frac::<T>(1, 4);
    let mut out = [[T::zero(); W]; 2];
    for k in 0..W {
        out[0][k] = (seven * rows[0][k] + rows[1][k]) * quarter;
        out[1][k] = (rows[0][k] + seven * rows[1][k]) * quarter;
    }
    out
}

/// Split the 2×6 interior update rows into the (A, B, C) block triple.
fn split_triple<T: Scalar>(rows: [[T; 6]; 2]) -> [[[T; 2]; 2]; 3] {
    let mut blocks = [[[T::zero(); 2]; 2]; 3];
    for (bi, block) in blocks.iter_mut().enumerate() {
        for row in 0..2 {
            for col in 0..2 {
                block[row][col] = rows[row][2 * bi + col];
            }
        }
    }
    blocks
}

// ---------------------------------------------------------------------------
// Public operations.
// ---------------------------------------------------------------------------

/// The interior nodal update blocks of the block finite-difference stencil,
/// read directly off the stencil rows: `A = [[−1+c, 16−5c], [−c, −1+5c]]/(3h²)`,
/// `B = [[−30+10c, 16−10c], [16−10c, −30+10c]]/(3h²)`,
/// `C = [[−1+5c, −c], [16−5c, −1+c]]/(3h²)`.
pub fn bfd_blocks_interior(c: f64, h: f64) -> NodalBlockTriple {
    assert!(h > 0.0, "cell width must be positive");
    let (even, odd) = dense::stencil_rows(c);
    let scale = 1.0 / (3.0 * h * h);
    let block = |offset: usize| -> Block2 {
        [
            [even[offset] * scale, even[offset + 1] * scale],
            [odd[offset] * scale, odd[offset + 1] * scale],
        ]
    };
    NodalBlockTriple {
        a: block(0),
        b: block(2),
        c: block(4),
    }
}

/// Assemble the generalized-penalty DG weak form on an interior cell with the
/// given coefficients and return the mass-matrix-inverted nodal update blocks.
pub fn dg_blocks_from_weak_form(coeffs: &PenaltyCoefficients, h: f64) -> NodalBlockTriple {
    assert!(h > 0.0, "cell width must be positive");
    let rows = weak_rows_unit(&Pen::from(coeffs), &interior_traces::<f64>());
    let [a, b, c] = split_triple(rows);
    let s = 1.0 / (h * h);
    let scale = |m: [[f64; 2]; 2]| -> Block2 { [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]] };
    NodalBlockTriple {
        a: scale(a),
        b: scale(b),
        c: scale(c),
    }
}

/// The first-cell blocks of the Dirichlet closure,
/// `B = [[−46+15c, 17−11c], [17−15c, −30+11c]]/(3h²)` and
/// `C = [[−1+5c, −c], [16−5c, −1+c]]/(3h²)`, together with the penalty
/// solution under which the boundary weak form reproduces them.
pub fn dg_blocks_boundary_cell(c: f64, h: f64) -> (Block2, Block2, PenaltyCoefficients) {
    assert!(h > 0.0, "cell width must be positive");
    let rows = dense::closure_rows(c);
    let scale = 1.0 / (3.0 * h * h);
    let b = [
        [rows[0][0] * scale, rows[0][1] * scale],
        [rows[1][0] * scale, rows[1][1] * scale],
    ];
    let cc = [
        [rows[0][2] * scale, rows[0][3] * scale],
        [rows[1][2] * scale, rows[1][3] * scale],
    ];
    (b, cc, PenaltyCoefficients::boundary_solution(c))
}

/// Assemble the weak form on the first cell — left face on the physical
/// boundary with homogeneous data, so left-face jumps degenerate to bare
/// interior traces — and return the mass-matrix-inverted (B, C) blocks.
pub fn dg_blocks_boundary_from_weak_form(coeffs: &PenaltyCoefficients, h: f64) -> (Block2, Block2) {
    assert!(h > 0.0, "cell width must be positive");
    let rows = weak_rows_unit(&Pen::from(coeffs), &boundary_traces::<f64>());
    let s = 1.0 / (h * h);
    let mut b = [[0.0; 2]; 2];
    let mut c = [[0.0; 2]; 2];
    for row in 0..2 {
        for col in 0..2 {
            b[row][col] = rows[row][col] * s;
            c[row][col] = rows[row][col + 2] * s;
        }
    }
    (b, c)
}

// ---------------------------------------------------------------------------
// Exact-rational equality checks (zero rounding).
// ---------------------------------------------------------------------------

/// Interior stencil blocks at unit width in exact rationals, as 2×6 rows.
fn interior_rows_exact(c: Q) -> [[Q; 6]; 2] {
    let third = frac::<Q>(1, 3);
    let e = |n: i64, k: i64| (frac::<Q>(n, 1) + frac::<Q>(k, 1) * c) * third;
    let even = [e(-1, 1), e(16, -5), e(-30, 10), e(16, -10), e(-1, 5), e(0, -1)];
    let mut odd = even;
    odd.reverse();
    [even, odd]
}

/// First-cell closure rows at unit width in exact rationals, as 2×4 rows.
fn boundary_rows_exact(c: Q) -> [[Q; 4]; 2] {
    let third = frac::<Q>(1, 3);
    let e = |n: i64, k: i64| (frac::<Q>(n, 1) + frac::<Q>(k, 1) * c) * third;
    [
        [e(-46, 15), e(17, -11), e(-1, 5), e(0, -1)],
        [e(17, -15), e(-30, 11), e(16, -5), e(-1, 1)],
    ]
}

/// Whether the interior weak form with the interior penalty solution equals
/// the stencil blocks *exactly* in rational arithmetic, for rational `c` and
/// flux weights.
pub fn interior_equality_is_exact(c: (i64, i64), alpha: (i64, i64), beta: (i64, i64)) -> bool {
    let c = Ratio::new(c.0, c.1);
    let pen = pen_interior_exact(c, Ratio::new(alpha.0, alpha.1), Ratio::new(beta.0, beta.1));
    weak_rows_unit(&pen, &interior_traces::<Q>()) == interior_rows_exact(c)
}

/// Whether the boundary weak form with the boundary penalty solution equals
/// the first-cell closure blocks *exactly* in rational arithmetic.
pub fn boundary_equality_is_exact(c: (i64, i64)) -> bool {
    let c = Ratio::new(c.0, c.1);
    let pen = pen_boundary_exact(c);
    weak_rows_unit(&pen, &boundary_traces::<Q>()) == boundary_rows_exact(c)
}

// ---------------------------------------------------------------------------
// Equivalence report.
// ---------------------------------------------------------------------------

/// Outcome of the full equivalence check suite.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    /// True when every check passed.
    pub passed: bool,
    /// Largest interior deviation seen on the float sweep.
    pub max_interior_deviation: f64,
    /// Largest boundary deviation seen on the float sweep.
    pub max_boundary_deviation: f64,
    /// Human-readable report, one line per check.
    pub text: String,
}

/// Run the equivalence checks: a float sweep of `c_samples` values of `c`
/// over `[−1, 1]` (plus the canonical rational values) against three flux
/// pairs and two cell widths, exact-rational equality at the canonical `c`
/// values, Baumann–Oden recovery, the boundary-cell comparison, and the
/// consistency invariant. Deviations are compared against `tol`.
pub fn equivalence_report(c_samples: usize, tol: f64) -> EquivalenceReport {
    let canonical: [(i64, i64); 5] = [(-1, 1), (-4, 13), (-1, 4), (0, 1), (1, 1)];
    let flux_pairs = [(0.5, 0.5), (1.0, 0.0), (0.25, 0.75)];
    let widths = [1.0, 0.1];

    let mut c_values: Vec<f64> = (0..c_samples.max(2))
        .map(|i| -1.0 + 2.0 * i as f64 / (c_samples.max(2) - 1) as f64)
        .collect();
    c_values.extend(canonical.iter().map(|&(n, d)| n as f64 / d as f64));

    let mut text = String::from("DG equivalence checks\n");
    let mut passed = true;
    let mut record = |line: String, ok: bool, text: &mut String| {
        let _ = writeln!(text, "  [{}] {line}", if ok { "PASS" } else { "FAIL" });
        passed &= ok;
    };

    // Interior float sweep.
    let mut max_interior = 0.0f64;
    for &c in &c_values {
        for &(alpha, beta) in &flux_pairs {
            for &h in &widths {
                let dg = dg_blocks_from_weak_form(
                    &PenaltyCoefficients::interior_solution(c, alpha, beta),
                    h,
                );
                max_interior = max_interior.max(dg.max_abs_diff(&bfd_blocks_interior(c, h)));
            }
        }
    }
    let ok = max_interior <= tol;
    record(
        format!(
            "interior weak form equals stencil blocks: max |Δ| = {max_interior:.3e} over {} c-values × {} flux pairs × {} widths (tol {tol:.1e})",
            c_values.len(),
            flux_pairs.len(),
            widths.len()
        ),
        ok,
        &mut text,
    );

    // Exact-rational equality at the canonical c values.
    let exact_pairs = [(1, 2, 1, 2), (1, 1, 0, 1), (1, 4, 3, 4)];
    let exact_ok = canonical.iter().all(|&c| {
        exact_pairs
            .iter()
            .all(|&(an, ad, bn, bd)| interior_equality_is_exact(c, (an, ad), (bn, bd)))
            && boundary_equality_is_exact(c)
    });
    record(
        "exact rational assembly: interior and boundary equality exact at c ∈ {-1, -4/13, -1/4, 0, 1}"
            .to_string(),
        exact_ok,
        &mut text,
    );

    // Baumann–Oden recovery.
    let bo = dg_blocks_from_weak_form(&PenaltyCoefficients::baumann_oden(), 1.0);
    let bo_expect = NodalBlockTriple {
        a: [[7.0 / 4.0, -1.0 / 4.0], [1.0 / 4.0, -7.0 / 4.0]],
        b: [[-6.0, 6.0], [6.0, -6.0]],
        c: [[-7.0 / 4.0, 1.0 / 4.0], [-1.0 / 4.0, 7.0 / 4.0]],
    };
    let bo_dev = bo.max_abs_diff(&bo_expect);
    record(
        format!("Baumann–Oden coefficients recover the central nodal scheme: max |Δ| = {bo_dev:.3e}"),
        bo_dev <= tol,
        &mut text,
    );

    // Boundary float sweep.
    let mut max_boundary = 0.0f64;
    for &c in &c_values {
        for &h in &widths {
            let (b_ref, c_ref, pen) = dg_blocks_boundary_cell(c, h);
            let (b_dg, c_dg) = dg_blocks_boundary_from_weak_form(&pen, h);
            for row in 0..2 {
                for col in 0..2 {
                    max_boundary = max_boundary
                        .max((b_dg[row][col] - b_ref[row][col]).abs())
                        .max((c_dg[row][col] - c_ref[row][col]).abs());
                }
            }
        }
    }
    record(
        format!(
            "boundary-cell weak form equals one-sided closure blocks: max |Δ| = {max_boundary:.3e}"
        ),
        max_boundary <= tol,
        &mut text,
    );

    // Consistency invariant.
    let mut max_consistency = 0.0f64;
    for &c in &c_values {
        max_consistency = max_consistency.max(bfd_blocks_interior(c, 1.0).consistency_residual());
    }
    record(
        format!("interior blocks annihilate constants: max row sum = {max_consistency:.3e}"),
        max_consistency <= tol,
        &mut text,
    );

    let _ = writeln!(text, "overall: {}", if passed { "PASS" } else { "FAIL" });
    EquivalenceReport {
        passed,
        max_interior_deviation: max_interior,
        max_boundary_deviation: max_boundary,
        text,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C_VALUES: [f64; 5] = [-1.0, -4.0 / 13.0, -0.25, 0.0, 1.0];

    #[test]
    fn interior_blocks_match_stated_entries_at_c_zero() {
        let t = bfd_blocks_interior(0.0, 1.0);
        let expect_a = [[-1.0 / 3.0, 16.0 / 3.0], [0.0, -1.0 / 3.0]];
        let expect_b = [[-10.0, 16.0 / 3.0], [16.0 / 3.0, -10.0]];
        let expect_c = [[-1.0 / 3.0, 0.0], [16.0 / 3.0, -1.0 / 3.0]];
        for (got, want) in [(t.a, expect_a), (t.b, expect_b), (t.c, expect_c)] {
            for row in 0..2 {
                for col in 0..2 {
                    assert!(
                        (got[row][col] - want[row][col]).abs() < 1e-14,
                        "entry [{row}][{col}]: {} vs {}",
                        got[row][col],
                        want[row][col]
                    );
                }
            }
        }
    }

    #[test]
    fn interior_triple_annihilates_constants() {
        for c in C_VALUES {
            for h in [1.0, 0.1] {
                let r = bfd_blocks_interior(c, h).consistency_residual();
                assert!(r < 1e-12 / (h * h), "c={c}, h={h}: residual {r}");
            }
        }
    }

    #[test]
    fn interior_blocks_reproduce_dense_matrix_rows_exactly() {
        // The blocks and the dense assembly must agree bitwise: both read the
        // same stencil rows and apply the same scale factor.
        let (c, h) = (-4.0 / 13.0, 0.37);
        let t = bfd_blocks_interior(c, h);
        let q = dense::q1d_periodic(6, c, h);
        let (row0, row1) = (4, 5); // middle cell j=2 of N=6
        for col in 0..2 {
            assert_eq!(t.a[0][col], q[(row0, 2 + col)]);
            assert_eq!(t.a[1][col], q[(row1, 2 + col)]);
            assert_eq!(t.b[0][col], q[(row0, 4 + col)]);
            assert_eq!(t.b[1][col], q[(row1, 4 + col)]);
            assert_eq!(t.c[0][col], q[(row0, 6 + col)]);
            assert_eq!(t.c[1][col], q[(row1, 6 + col)]);
        }
    }

    #[test]
    fn weak_form_with_interior_solution_matches_stencil_blocks() {
        // The equality holds for every c and every pair of flux weights: the
        // flux dependence is absorbed by the C₂, D₂ penalties.
        let flux_pairs = [(0.5, 0.5), (1.0, 0.0), (0.3, 0.9)];
        for i in 0..41 {
            let c = -1.0 + 2.0 * i as f64 / 40.0;
            for (alpha, beta) in flux_pairs {
                for h in [1.0, 0.1] {
                    let dg = dg_blocks_from_weak_form(
                        &PenaltyCoefficients::interior_solution(c, alpha, beta),
                        h,
                    );
                    let diff = dg.max_abs_diff(&bfd_blocks_interior(c, h));
                    assert!(diff <= 1e-12, "c={c}, α={alpha}, β={beta}, h={h}: {diff}");
                }
            }
        }
    }

    #[test]
    fn weak_form_equality_is_exact_in_rational_arithmetic() {
        let canonical = [(-1, 1), (-4, 13), (-1, 4), (0, 1), (1, 1)];
        let flux_pairs = [((1, 2), (1, 2)), ((1, 1), (0, 1)), ((1, 4), (3, 4))];
        for c in canonical {
            for (alpha, beta) in flux_pairs {
                assert!(
                    interior_equality_is_exact(c, alpha, beta),
                    "interior equality not exact at c={c:?}, α={alpha:?}, β={beta:?}"
                );
            }
            assert!(
                boundary_equality_is_exact(c),
                "boundary equality not exact at c={c:?}"
            );
        }
    }

    #[test]
    fn baumann_oden_coefficients_recover_central_scheme() {
        for h in [1.0, 0.25] {
            let t = dg_blocks_from_weak_form(&PenaltyCoefficients::baumann_oden(), h);
            let s = 1.0 / (h * h);
            let expect = NodalBlockTriple {
                a: [[7.0 / 4.0 * s, -s / 4.0], [s / 4.0, -7.0 / 4.0 * s]],
                b: [[-6.0 * s, 6.0 * s], [6.0 * s, -6.0 * s]],
                c: [[-7.0 / 4.0 * s, s / 4.0], [-s / 4.0, 7.0 / 4.0 * s]],
            };
            assert!(t.max_abs_diff(&expect) <= 1e-13 * s, "h={h}");
        }
    }

    #[test]
    fn flux_weight_changes_are_compensated_by_jump_penalties() {
        // A non-central flux α adds (α−1/2)·[u_x] to the central flux, which
        // the C₂ penalty cancels when C₂ = α−1/2 — and likewise β with D₂.
        // So these two coefficient sets define the same scheme.
        let central = dg_blocks_from_weak_form(&PenaltyCoefficients::fluxes_only(0.5, 0.5), 1.0);
        let mut skewed = PenaltyCoefficients::fluxes_only(0.9, 0.2);
        skewed.c2 = 0.9 - 0.5;
        skewed.d2 = 0.2 - 0.5;
        let compensated = dg_blocks_from_weak_form(&skewed, 1.0);
        assert!(central.max_abs_diff(&compensated) <= 1e-15);

        // Without the compensation the blocks genuinely differ.
        let uncompensated =
            dg_blocks_from_weak_form(&PenaltyCoefficients::fluxes_only(0.9, 0.2), 1.0);
        assert!(central.max_abs_diff(&uncompensated) > 1e-3);
    }

    #[test]
    fn boundary_cell_blocks_match_dense_closure_rows_exactly() {
        let (c, h) = (-4.0 / 13.0, 0.37);
        let (b, cc, pen) = dg_blocks_boundary_cell(c, h);
        let q = dense::q1d_dirichlet(6, c, h);
        for col in 0..2 {
            assert_eq!(b[0][col], q[(0, col)]);
            assert_eq!(b[1][col], q[(1, col)]);
            assert_eq!(cc[0][col], q[(0, 2 + col)]);
            assert_eq!(cc[1][col], q[(1, 2 + col)]);
        }

        // Stated top-left entry at the optimal parameter.
        let expect = (-46.0 - 60.0 / 13.0) / (3.0 * h * h);
        assert!((b[0][0] - expect).abs() <= 1e-12 * expect.abs());

        // The boundary penalty solution doubles the value penalty at the
        // boundary face and keeps the stated fixed entries.
        assert_eq!(pen.d1, 2.0 * pen.c1);
        assert_eq!(pen.c2, 0.5);
        assert_eq!(pen.d2, 0.0);
        assert_eq!(pen.f2, 0.0);
        assert_eq!(pen.alpha, 1.0);
        assert_eq!(pen.beta, 0.0);
        assert!((pen.e1 + 11.0 / 78.0).abs() < 1e-15); // −(8·(−4/13)+5)/18 = −11/78
        assert!((pen.f1 + 2.0 * pen.e1).abs() < 1e-15); // F₁ = (8c+5)/9 = −2E₁
    }

    #[test]
    fn boundary_weak_form_matches_closure_blocks_in_floats() {
        for i in 0..41 {
            let c = -1.0 + 2.0 * i as f64 / 40.0;
            for h in [1.0, 0.1] {
                let (b_ref, c_ref, pen) = dg_blocks_boundary_cell(c, h);
                let (b_dg, c_dg) = dg_blocks_boundary_from_weak_form(&pen, h);
                for row in 0..2 {
                    for col in 0..2 {
                        assert!(
                            (b_dg[row][col] - b_ref[row][col]).abs() <= 1e-12 / (h * h),
                            "B[{row}][{col}] at c={c}, h={h}"
                        );
                        assert!(
                            (c_dg[row][col] - c_ref[row][col]).abs() <= 1e-12 / (h * h),
                            "C[{row}][{col}] at c={c}, h={h}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn equivalence_report_passes_and_reads_cleanly() {
        let report = equivalence_report(51, 1e-12);
        assert!(report.passed, "\n{}", report.text);
        assert!(report.text.contains("overall: PASS"));
        assert!(!report.text.contains("FAIL"));
        assert!(report.max_interior_deviation <= 1e-12);
        assert!(report.max_boundary_deviation <= 1e-12);
    }
}
