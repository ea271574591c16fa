//! Stability certification through the face quadratic form.
//!
//! The semidiscrete scheme is stable when the net energy contribution of each
//! cell face — numerical fluxes, interface penalties, and each adjacent
//! cell's share of `−∫(u_x)²` — is non-positive as a quadratic form in the
//! four nodal values surrounding the face. This module assembles that form's
//! symmetric matrix `M` for an interior face (scale `1/(12h)`) and for the
//! face between the first and second Dirichlet cells (scale `1/(36h)`), and
//! certifies non-positivity across the stencil-parameter range `c ∈ [−1, 1]`.
//!
//! For the interior form, `M` annihilates constants, so its fourth row and
//! column are linearly dependent on the others; non-positivity is certified
//! on the leading 3×3 truncation `M′`, cross-checked two ways: eigenvalues of
//! `M′` directly, and the closed-form diagonal `D` of a congruence
//! `D = S·M′·Sᵀ`, whose sign pattern must match the inertia of `M′` by
//! Sylvester's law. The boundary form is certified by its full 4×4
//! eigenvalues. Certification is numeric over a dense `c` grid (the
//! closed-form `D` factors vary monotonically between widely separated
//! roots, so dense sampling is conclusive at practical tolerances).

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use std::fmt;

use crate::error::{Error, Result};
use crate::operator::SpatialOperator;

/// Which face the quadratic form describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaKind {
    /// A face between two interior cells.
    Interior,
    /// The face between the first and second cells of a Dirichlet domain.
    Boundary,
}

/// The symmetric matrix of the face quadratic form, with its 3×3 truncation.
#[derive(Clone, Debug)]
pub struct ThetaMatrix {
    /// The full 4×4 form over the four nodal values around the face, scaled
    /// by `1/(12h)` (interior) or `1/(36h)` (boundary).
    pub m: Matrix4<f64>,
    /// The leading 3×3 truncation `M′` (drop the fourth row and column).
    pub reduced: Matrix3<f64>,
    /// Interior or boundary face.
    pub kind: ThetaKind,
    /// Stencil parameter the form was built for.
    pub c: f64,
    /// Cell width the form was built for.
    pub h: f64,
}

impl ThetaMatrix {
    /// The matrix with its positive `1/(12h)` or `1/(36h)` prefactor removed
    /// — the form whose entries are the closed-form polynomials in `c`.
    /// Positive scalings preserve eigenvalue signs, so certification works on
    /// this representative.
    pub fn unscaled(&self) -> Matrix4<f64> {
        self.m * self.prefactor_inverse()
    }

    /// Unscaled 3×3 truncation.
    pub fn unscaled_reduced(&self) -> Matrix3<f64> {
        self.reduced * self.prefactor_inverse()
    }

    fn prefactor_inverse(&self) -> f64 {
        match self.kind {
            ThetaKind::Interior => 12.0 * self.h,
            ThetaKind::Boundary => 36.0 * self.h,
        }
    }
}

/// Unscaled interior face matrix (the polynomial entries; full matrix is
/// this divided by `12h`).
fn interior_entries(c: f64) -> Matrix4<f64> {
    let e01 = (71.0 - 40.0 * c) / 3.0;
    let e02 = 8.0 * c - 5.0;
    let e03 = (1.0 - 8.0 * c) / 3.0;
    let e11 = (56.0 * c - 169.0) / 3.0;
    let e12 = (113.0 - 40.0 * c) / 3.0;
    let e00 = 8.0 * c - 19.0;
    Matrix4::new(
        e00, e01, e02, e03, //
        e01, e11, e12, e02, //
        e02, e12, e11, e01, //
        e03, e02, e01, e00,
    )
}

/// Unscaled boundary face matrix (full matrix is this divided by `36h`).
/// The printed form writes entry (0,2) as `−(7−8c)/2` and (2,0) as
/// `(8c−7)/2`; these are equal, and the assembled matrix is symmetric.
fn boundary_entries(c: f64) -> Matrix4<f64> {
    let corner = 3.0 * (8.0 * c - 19.0);
    let e01 = 71.0 - 40.0 * c;
    let e02 = (8.0 * c - 7.0) / 2.0;
    let e03 = (1.0 - 8.0 * c) / 2.0;
    let e11 = 56.0 * c - 169.0;
    let e12 = (113.0 - 40.0 * c) / 2.0;
    let e13 = (40.0 * c - 23.0) / 2.0;
    Matrix4::new(
        corner, e01, e02, e03, //
        e01, e11, e12, e13, //
        e02, e12, e11, e01, //
        e03, e13, e01, corner,
    )
}

/// The closed-form diagonal of a congruence `D = S·M′·Sᵀ` of the unscaled
/// interior truncation, used for the Sylvester-inertia cross-check. All three
/// entries are non-positive exactly when the interior form is.
pub fn d_factors(c: f64) -> [f64; 3] {
    let lead = 8.0 * c - 19.0;
    let g = 2.0 * c * (8.0 * c + 49.0) - 287.0;
    let p = 2.0 * c * (2.0 * c + 7.0) - 35.0;
    [
        lead,
        -(16.0 / 9.0) * lead * g,
        (16384.0 / 243.0) * (19.0 - 8.0 * c).powi(4) * (2.0 * c - 7.0) * p * g,
    ]
}

/// Signed eigenvalue counts `(negative, zero, positive)` with `|λ| ≤ tol`
/// counted as zero.
fn inertia_of(eigs: &[f64], tol: f64) -> (usize, usize, usize) {
    let mut counts = (0, 0, 0);
    for &e in eigs {
        if e < -tol {
            counts.0 += 1;
        } else if e > tol {
            counts.2 += 1;
        } else {
            counts.1 += 1;
        }
    }
    counts
}

fn symmetric_eigenvalues_4(m: &Matrix4<f64>) -> Vec<f64> {
    m.symmetric_eigen().eigenvalues.iter().copied().collect()
}

fn symmetric_eigenvalues_3(m: &Matrix3<f64>) -> Vec<f64> {
    m.symmetric_eigen().eigenvalues.iter().copied().collect()
}

/// Interior face quadratic-form matrix.
///
/// The form does not depend on the flux weights `α`, `β`: their contribution
/// is cancelled exactly by the derivative-jump penalties tied to them. It
/// annihilates constants, so `M` is singular with the constant null vector;
/// the constructor verifies this direction and that deleting the dependent
/// fourth row/column preserves the rank.
pub fn theta_interior(c: f64, h: f64) -> ThetaMatrix {
    assert!(h > 0.0, "cell width must be positive");
    let unscaled = interior_entries(c);

    // Rank-reduction direction: constants are annihilated identically in c.
    let ones = nalgebra::Vector4::from_element(1.0);
    let residual = (unscaled * ones).amax();
    let scale = unscaled.amax().max(1.0);
    assert!(
        residual <= 1e-12 * scale,
        "constant direction must be in the null space (residual {residual:.3e})"
    );

    // Deleting the dependent fourth row/column must not lose rank.
    let zero_tol = 1e-9 * scale;
    let rank4 = symmetric_eigenvalues_4(&unscaled)
        .iter()
        .filter(|e| e.abs() > zero_tol)
        .count();
    let reduced_unscaled = unscaled.fixed_view::<3, 3>(0, 0).into_owned();
    let rank3 = symmetric_eigenvalues_3(&reduced_unscaled)
        .iter()
        .filter(|e| e.abs() > zero_tol)
        .count();
    assert_eq!(
        rank4, rank3,
        "truncation must preserve rank (rank(M) = {rank4}, rank(M′) = {rank3})"
    );

    let s = 1.0 / (12.0 * h);
    ThetaMatrix {
        m: unscaled * s,
        reduced: reduced_unscaled * s,
        kind: ThetaKind::Interior,
        c,
        h,
    }
}

/// Boundary face quadratic-form matrix (face between the first and second
/// Dirichlet cells).
pub fn theta_boundary(c: f64, h: f64) -> ThetaMatrix {
    assert!(h > 0.0, "cell width must be positive");
    let unscaled = boundary_entries(c);
    let s = 1.0 / (36.0 * h);
    ThetaMatrix {
        m: unscaled * s,
        reduced: unscaled.fixed_view::<3, 3>(0, 0).into_owned() * s,
        kind: ThetaKind::Boundary,
        c,
        h,
    }
}

/// Certification result for a single stencil parameter.
#[derive(Clone, Copy, Debug)]
pub struct CertificationRecord {
    /// The stencil parameter examined.
    pub c: f64,
    /// Largest eigenvalue of the certified (unscaled) form: `M′` for
    /// interior faces, the full 4×4 for boundary faces.
    pub max_eigenvalue: f64,
    /// Closed-form congruence diagonal (interior faces only).
    pub d_factors: Option<[f64; 3]>,
    /// Eigenvalue inertia `(negative, zero, positive)` of the certified form.
    pub inertia: (usize, usize, usize),
    /// Whether the inertia matches the sign pattern of `d_factors`
    /// (interior faces only).
    pub inertia_matches: Option<bool>,
    /// Whether `c` lies in the proven range `[−1, 1]`; outside it the record
    /// is informational.
    pub in_proven_range: bool,
    /// All applicable checks passed at the report's tolerance.
    pub certified: bool,
}

/// Certification sweep over a set of stencil parameters.
#[derive(Clone, Debug)]
pub struct CertificationReport {
    /// Which face form was certified.
    pub kind: ThetaKind,
    /// Eigenvalue/sign tolerance the checks ran at.
    pub tol: f64,
    /// Per-parameter outcomes, in input order.
    pub records: Vec<CertificationRecord>,
    /// True when every record with `in_proven_range` is certified.
    pub all_certified: bool,
}

impl CertificationReport {
    /// CSV rendering: one row per examined `c`.
    pub fn csv(&self) -> String {
        let mut out =
            String::from("c,max_eigenvalue,d1,d2,d3,inertia_neg,inertia_zero,inertia_pos,inertia_matches,in_proven_range,certified\n");
        for r in &self.records {
            let (d1, d2, d3) = match r.d_factors {
                Some([a, b, c]) => (format!("{a:.6e}"), format!("{b:.6e}"), format!("{c:.6e}")),
                None => (String::new(), String::new(), String::new()),
            };
            let matches = r
                .inertia_matches
                .map(|m| m.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{:.10},{:.6e},{},{},{},{},{},{},{},{},{}\n",
                r.c,
                r.max_eigenvalue,
                d1,
                d2,
                d3,
                r.inertia.0,
                r.inertia.1,
                r.inertia.2,
                matches,
                r.in_proven_range,
                r.certified
            ));
        }
        out
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} face certification over {} parameter value(s), tol {:.1e}:",
            match self.kind {
                ThetaKind::Interior => "interior",
                ThetaKind::Boundary => "boundary",
            },
            self.records.len(),
            self.tol
        )?;
        for r in &self.records {
            let flags = match (r.inertia_matches, r.in_proven_range) {
                (Some(true), true) => "inertia=match",
                (Some(false), true) => "inertia=MISMATCH",
                (Some(true), false) => "inertia=match (outside proven range)",
                (Some(false), false) => "inertia=MISMATCH (outside proven range)",
                (None, true) => "",
                (None, false) => "(outside proven range)",
            };
            writeln!(
                f,
                "  c = {:+.6}: max eig = {:+.6e} {} -> {}",
                r.c,
                r.max_eigenvalue,
                flags,
                if r.certified { "PASS" } else { "FAIL" }
            )?;
        }
        write!(
            f,
            "overall: {}",
            if self.all_certified { "PASS" } else { "FAIL" }
        )
    }
}

/// Certify the interior face form over the given stencil parameters: for
/// each `c`, (a) the eigenvalues of the unscaled `M′` must all be `≤ tol`,
/// (b) the closed-form congruence diagonal must be non-positive, and (c) the
/// inertia of `M′` must match the diagonal's sign pattern. Failures are
/// reported, not raised. Values of `c` outside `[−1, 1]` are marked
/// informational and do not affect `all_certified`.
pub fn certify_interior(c_samples: &[f64], tol: f64) -> CertificationReport {
    let records: Vec<CertificationRecord> = c_samples
        .par_iter()
        .map(|&c| {
            let reduced = interior_entries(c).fixed_view::<3, 3>(0, 0).into_owned();
            let eigs = symmetric_eigenvalues_3(&reduced);
            let max_eigenvalue = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let d = d_factors(c);
            let d_nonpositive = d.iter().all(|&x| x <= tol);
            let inertia = inertia_of(&eigs, tol);
            let d_pattern = inertia_of(&d, tol);
            let inertia_matches = inertia == d_pattern;
            CertificationRecord {
                c,
                max_eigenvalue,
                d_factors: Some(d),
                inertia,
                inertia_matches: Some(inertia_matches),
                in_proven_range: (-1.0..=1.0).contains(&c),
                certified: max_eigenvalue <= tol && d_nonpositive && inertia_matches,
            }
        })
        .collect();
    let all_certified = records
        .iter()
        .filter(|r| r.in_proven_range)
        .all(|r| r.certified);
    CertificationReport {
        kind: ThetaKind::Interior,
        tol,
        records,
        all_certified,
    }
}

/// Certify the boundary face form: all eigenvalues of the unscaled 4×4
/// matrix must be `≤ tol` for each sampled `c`.
pub fn certify_boundary(c_samples: &[f64], tol: f64) -> CertificationReport {
    let records: Vec<CertificationRecord> = c_samples
        .par_iter()
        .map(|&c| {
            let m = boundary_entries(c);
            let eigs = symmetric_eigenvalues_4(&m);
            let max_eigenvalue = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            CertificationRecord {
                c,
                max_eigenvalue,
                d_factors: None,
                inertia: inertia_of(&eigs, tol),
                inertia_matches: None,
                in_proven_range: (-1.0..=1.0).contains(&c),
                certified: max_eigenvalue <= tol,
            }
        })
        .collect();
    let all_certified = records
        .iter()
        .filter(|r| r.in_proven_range)
        .all(|r| r.certified);
    CertificationReport {
        kind: ThetaKind::Boundary,
        tol,
        records,
        all_certified,
    }
}

/// Outcome of the discrete semiboundedness spot check on an assembled
/// periodic operator.
#[derive(Clone, Debug)]
pub struct EnergyCheckReport {
    /// Number of random trial vectors examined.
    pub trials: usize,
    /// Tolerance the trials were compared against.
    pub tol: f64,
    /// Largest observed `uᵀ(Q+Qᵀ)u / ‖u‖²` over the trials.
    pub max_rayleigh_quotient: f64,
    /// Largest eigenvalue of the symmetric part `(Q+Qᵀ)/2`.
    pub max_symmetric_eigenvalue: f64,
    /// The quadratic form evaluated on the constant vector (must vanish).
    pub constant_form_value: f64,
    /// Every trial satisfied `uᵀ(Q+Qᵀ)u ≤ tol·‖u‖²`.
    pub all_within_tol: bool,
}

/// Verify the discrete semiboundedness the face certificates imply:
/// `uᵀ(Q+Qᵀ)u ≤ tol·‖u‖²` for random `u`, on the densely assembled periodic
/// operator. Also eigensolves the symmetric part for its exact maximum.
pub fn semidiscrete_energy_check(
    op: &SpatialOperator,
    trials: usize,
    tol: f64,
) -> Result<EnergyCheckReport> {
    if !op.periodic() {
        return Err(Error::Usage(
            "the semidiscrete energy check applies to periodic operators".into(),
        ));
    }
    let (q, _) = op.assemble_dense(0.0)?;
    let s = &q + q.transpose();

    let n = s.nrows();
    let mut rng = StdRng::seed_from_u64(0x5EED_BA11);
    let mut max_rq = f64::NEG_INFINITY;
    let mut all_within = true;
    for _ in 0..trials.max(1) {
        let u = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let norm2 = u.norm_squared();
        let form = u.dot(&(&s * &u));
        let rq = form / norm2;
        max_rq = max_rq.max(rq);
        all_within &= form <= tol * norm2;
    }

    let ones = DVector::from_element(n, 1.0);
    let constant_form_value = ones.dot(&(&s * &ones));

    let half: DMatrix<f64> = &s * 0.5;
    let max_symmetric_eigenvalue = half
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(EnergyCheckReport {
        trials: trials.max(1),
        tol,
        max_rayleigh_quotient: max_rq,
        max_symmetric_eigenvalue,
        constant_form_value,
        all_within_tol: all_within,
    })
}
