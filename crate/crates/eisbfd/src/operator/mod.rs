//! The block finite-difference spatial operator: a matrix-free discrete
//! Laplacian on block grids with one free parameter `c`, supporting periodic
//! and Dirichlet boundaries in 1D/2D and periodic boundaries in 3D, plus a
//! dense assembly path used as a verification oracle.
//!
//! Under Dirichlet data the operator is affine: `apply` returns `Q·u + b(t)`,
//! where the lift `b(t)` collects the boundary-data terms of the closure
//! rows. The lift is therefore re-evaluated at every stage time of a
//! Runge–Kutta step.

pub mod dense;
pub(crate) mod kernel;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{BlockGrid2D, BlockGrid3D, Grid};

/// Node cap for dense assembly (dense paths are verification oracles, not
/// production).
pub const DENSE_NODE_CAP: usize = 10_000;

/// A solution snapshot: node values in row-major order (x fastest) plus the
/// time stamp they belong to. The shape contract against a grid is enforced
/// by [`SpatialOperator::check_field`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    /// Node values, length `(2N)^d`.
    pub values: Vec<f64>,
    /// Simulation time of the snapshot.
    pub time: f64,
}

impl Field {
    pub fn new(values: Vec<f64>, time: f64) -> Field {
        Field { values, time }
    }
}

/// A boundary-trace callable `(tangential coordinate, time) -> value`.
/// One-dimensional faces ignore the tangential argument.
pub type TraceFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

fn zero_trace() -> TraceFn {
    Box::new(|_, _| 0.0)
}

/// Dirichlet data for one boundary face, given as the physically available
/// quantities: the boundary value `g` with its time derivatives, traces of
/// the forcing, and (for 2D) tangential derivatives of the solution and
/// forcing along the face.
///
/// The solver needs `[g, u_nn, u_nnnn]` at each face (`n` = face normal);
/// the normal derivatives are derived from this data through the heat
/// equation `u_t = Δu + F` restricted to the face:
///
/// - 1D: `u_xx = g_t − F`, `u_xxxx = g_tt − F_t − F_xx`;
/// - 2D: `u_xx = g_t − u_yy − F`,
///   `u_xxxx = g_tt − 2u_tyy + u_yyyy − F_t + F_yy − F_xx`
///   (for an x-face; `y` denotes the tangential direction).
pub struct FaceData {
    /// Boundary value `g`.
    pub g: TraceFn,
    /// `∂_t g`.
    pub g_t: TraceFn,
    /// `∂_tt g`.
    pub g_tt: TraceFn,
    /// Forcing trace `F` on the face.
    pub forcing: TraceFn,
    /// `∂_t F` on the face.
    pub forcing_t: TraceFn,
    /// Second derivative of `F` along the face normal.
    pub forcing_nn: TraceFn,
    /// Second tangential derivative of the solution along the face (2D).
    pub u_tan2: TraceFn,
    /// `∂_t` of [`FaceData::u_tan2`] (2D).
    pub u_tan2_t: TraceFn,
    /// Fourth tangential derivative of the solution along the face (2D).
    pub u_tan4: TraceFn,
    /// Second tangential derivative of `F` along the face (2D).
    pub forcing_tan2: TraceFn,
}

impl std::fmt::Debug for FaceData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FaceData").finish_non_exhaustive()
    }
}

impl FaceData {
    /// Face with identically zero data (homogeneous boundary, no forcing).
    pub fn homogeneous() -> FaceData {
        FaceData {
            g: zero_trace(),
            g_t: zero_trace(),
            g_tt: zero_trace(),
            forcing: zero_trace(),
            forcing_t: zero_trace(),
            forcing_nn: zero_trace(),
            u_tan2: zero_trace(),
            u_tan2_t: zero_trace(),
            u_tan4: zero_trace(),
            forcing_tan2: zero_trace(),
        }
    }

    /// Face data with zero tangential terms — sufficient in 1D, or in 2D when
    /// the solution is constant along the face.
    pub fn new(
        g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g_t: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g_tt: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        forcing: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        forcing_t: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        forcing_nn: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> FaceData {
        FaceData {
            g: Box::new(g),
            g_t: Box::new(g_t),
            g_tt: Box::new(g_tt),
            forcing: Box::new(forcing),
            forcing_t: Box::new(forcing_t),
            forcing_nn: Box::new(forcing_nn),
            ..FaceData::homogeneous()
        }
    }

    /// Attach the tangential solution/forcing derivatives a 2D face needs.
    pub fn with_tangential(
        mut self,
        u_tan2: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        u_tan2_t: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        u_tan4: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        forcing_tan2: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> FaceData {
        self.u_tan2 = Box::new(u_tan2);
        self.u_tan2_t = Box::new(u_tan2_t);
        self.u_tan4 = Box::new(u_tan4);
        self.forcing_tan2 = Box::new(forcing_tan2);
        self
    }

    /// Replace `g_t` and `g_tt` by fourth-order centered finite differences
    /// of `g` in time — the fallback for boundary data whose time
    /// derivatives are not available analytically. Samples `g` at `t ± 2δ`
    /// with small `δ`, so `g` must be defined slightly beyond the simulation
    /// interval; accuracy is limited to roughly `1e-10` on unit-scale data.
    pub fn with_time_differenced_g(mut self) -> FaceData {
        let g = std::sync::Arc::new(std::mem::replace(&mut self.g, zero_trace()));
        let g1 = std::sync::Arc::clone(&g);
        let g2 = std::sync::Arc::clone(&g);
        // Step sizes near the optima for 4th-order first/second derivatives.
        let d1 = 1e-3;
        let d2 = 4e-3;
        self.g_t = Box::new(move |s, t| {
            (-g1(s, t + 2.0 * d1) + 8.0 * g1(s, t + d1) - 8.0 * g1(s, t - d1)
                + g1(s, t - 2.0 * d1))
                / (12.0 * d1)
        });
        self.g_tt = Box::new(move |s, t| {
            (-g2(s, t + 2.0 * d2) + 16.0 * g2(s, t + d2) - 30.0 * g2(s, t)
                + 16.0 * g2(s, t - d2)
                - g2(s, t - 2.0 * d2))
                / (12.0 * d2 * d2)
        });
        self.g = Box::new(move |s, t| g(s, t));
        self
    }

    /// `[g, u_nn, u_nnnn]` at tangential coordinate `s` and time `t`,
    /// derived from the stored data via the heat-equation trace identities.
    pub fn traces(&self, dimension: usize, s: f64, t: f64) -> [f64; 3] {
        let g = (self.g)(s, t);
        let gt = (self.g_t)(s, t);
        let gtt = (self.g_tt)(s, t);
        let f = (self.forcing)(s, t);
        let ft = (self.forcing_t)(s, t);
        let fnn = (self.forcing_nn)(s, t);
        if dimension == 1 {
            [g, gt - f, gtt - ft - fnn]
        } else {
            let ut2 = (self.u_tan2)(s, t);
            let ut2t = (self.u_tan2_t)(s, t);
            let ut4 = (self.u_tan4)(s, t);
            let ft2 = (self.forcing_tan2)(s, t);
            [
                g,
                gt - ut2 - f,
                gtt - 2.0 * ut2t + ut4 - ft + ft2 - fnn,
            ]
        }
    }
}

/// Dirichlet boundary data for every face of the grid: `faces[axis][side]`,
/// side 0 at the low coordinate, side 1 at the high coordinate.
#[derive(Debug)]
pub struct BoundaryData {
    pub faces: Vec<[FaceData; 2]>,
}

impl BoundaryData {
    pub fn new_1d(left: FaceData, right: FaceData) -> BoundaryData {
        BoundaryData {
            faces: vec![[left, right]],
        }
    }

    pub fn new_2d(x_faces: [FaceData; 2], y_faces: [FaceData; 2]) -> BoundaryData {
        BoundaryData {
            faces: vec![x_faces, y_faces],
        }
    }

    /// Identically zero data on every face.
    pub fn homogeneous(dimension: usize) -> BoundaryData {
        BoundaryData {
            faces: (0..dimension)
                .map(|_| [FaceData::homogeneous(), FaceData::homogeneous()])
                .collect(),
        }
    }
}

/// The block finite-difference Laplacian.
#[derive(Debug)]
pub struct SpatialOperator {
    /// Free stencil parameter. Stability is certified for `|c| ≤ 1`.
    pub c: f64,
    /// The grid the operator acts on.
    pub grid: Grid,
    /// Dirichlet boundary data; `None` for periodic grids.
    pub boundary: Option<BoundaryData>,
}

impl SpatialOperator {
    /// Build an operator, enforcing `|c| ≤ 1` (the range on which energy
    /// stability is certified) and the boundary-data contract.
    pub fn new(c: f64, grid: Grid, boundary: Option<BoundaryData>) -> Result<SpatialOperator> {
        if !c.is_finite() || c.abs() > 1.0 {
            return Err(Error::InvalidDomain(format!(
                "stencil parameter must satisfy |c| <= 1 (stability-certified range), got {c}; \
                 use new_unrestricted to study other values"
            )));
        }
        SpatialOperator::new_unrestricted(c, grid, boundary)
    }

    /// Build an operator without the `|c| ≤ 1` restriction (for parameter
    /// studies); all structural checks still apply.
    pub fn new_unrestricted(
        c: f64,
        grid: Grid,
        boundary: Option<BoundaryData>,
    ) -> Result<SpatialOperator> {
        if !c.is_finite() {
            return Err(Error::InvalidDomain(format!(
                "stencil parameter must be finite, got {c}"
            )));
        }
        if grid.periodic() {
            if boundary.is_some() {
                return Err(Error::Usage(
                    "periodic grids take no boundary data".into(),
                ));
            }
        } else {
            if grid.dimension() == 3 {
                return Err(Error::Unsupported(
                    "3D supports periodic boundaries only".into(),
                ));
            }
            match &boundary {
                None => {
                    return Err(Error::MissingBoundaryData(
                        "Dirichlet grids require boundary data for every face".into(),
                    ))
                }
                Some(b) if b.faces.len() != grid.dimension() => {
                    return Err(Error::DimensionMismatch(format!(
                        "boundary data covers {} axes but the grid has {}",
                        b.faces.len(),
                        grid.dimension()
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(SpatialOperator { c, grid, boundary })
    }

    /// Cell width `h` of the (shared) axis grid.
    pub fn h(&self) -> f64 {
        self.grid.axis().h
    }

    /// Space dimension.
    pub fn dimension(&self) -> usize {
        self.grid.dimension()
    }

    /// Total node count `(2N)^d`.
    pub fn n_nodes(&self) -> usize {
        self.grid.n_nodes()
    }

    /// Whether the operator is periodic.
    pub fn periodic(&self) -> bool {
        self.grid.periodic()
    }

    /// Validate a field against the grid: matching length, finite entries,
    /// finite time stamp.
    pub fn check_field(&self, field: &Field) -> Result<()> {
        if field.values.len() != self.n_nodes() {
            return Err(Error::DimensionMismatch(format!(
                "field has {} values but the grid has {} nodes",
                field.values.len(),
                self.n_nodes()
            )));
        }
        if !field.time.is_finite() {
            return Err(Error::InvalidDomain(format!(
                "field time stamp must be finite, got {}",
                field.time
            )));
        }
        if field.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDomain(
                "field contains non-finite values".into(),
            ));
        }
        Ok(())
    }

    /// Apply the operator: `out = Q·u + b(t)`. Sizes must already be valid
    /// (see [`SpatialOperator::check_field`]); this hot path only
    /// debug-asserts them.
    pub fn apply_into(&self, u: &[f64], t: f64, out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.n_nodes());
        debug_assert_eq!(out.len(), self.n_nodes());
        match &self.grid {
            Grid::One(_) => self.apply_1d(u, t, out),
            Grid::Two(g) => self.apply_2d(g, u, t, out),
            Grid::Three(g) => self.apply_3d(g, u, out),
        }
    }

    /// Validating wrapper around [`SpatialOperator::apply_into`]; evaluates
    /// the operator at the field's own time stamp.
    pub fn apply(&self, field: &Field) -> Result<Field> {
        self.check_field(field)?;
        let mut out = vec![0.0; field.values.len()];
        self.apply_into(&field.values, field.time, &mut out);
        Ok(Field {
            values: out,
            time: field.time,
        })
    }

    fn face_pair(&self, axis: usize) -> &[FaceData; 2] {
        &self
            .boundary
            .as_ref()
            .expect("Dirichlet operator was constructed without boundary data")
            .faces[axis]
    }

    fn apply_1d(&self, u: &[f64], t: f64, out: &mut [f64]) {
        let ax = self.grid.axis();
        let h = ax.h;
        let mut w = Vec::with_capacity(u.len() + 2 * kernel::PAD);
        if ax.periodic {
            kernel::extend_periodic_into(u, &mut w);
        } else {
            let [lo, hi] = self.face_pair(0);
            kernel::extend_dirichlet_into(u, h, lo.traces(1, 0.0, t), hi.traces(1, 0.0, t), &mut w);
        }
        kernel::kernel_into(&w, self.c, h, out);
    }

    fn apply_2d(&self, g2: &BlockGrid2D, u: &[f64], t: f64, out: &mut [f64]) {
        let ax = &g2.axis;
        let n = ax.n_nodes();
        let h = ax.h;
        let c = self.c;
        let periodic = ax.periodic;
        let nodes = &ax.nodes;

        // x sweep: rows are contiguous; each output row is written once.
        let faces_x = (!periodic).then(|| self.face_pair(0));
        out.par_chunks_mut(n)
            .enumerate()
            .for_each_init(Vec::new, |w, (iy, orow)| {
                let urow = &u[iy * n..(iy + 1) * n];
                match faces_x {
                    None => kernel::extend_periodic_into(urow, w),
                    Some([lo, hi]) => {
                        let s = nodes[iy];
                        kernel::extend_dirichlet_into(
                            urow,
                            h,
                            lo.traces(2, s, t),
                            hi.traces(2, s, t),
                            w,
                        );
                    }
                }
                kernel::kernel_into(w, c, h, orow);
            });

        // y sweep on the transpose, then accumulate back. Each output element
        // receives exactly one addition, so the result is deterministic
        // regardless of the thread count.
        let mut ut = vec![0.0; n * n];
        transpose_into(u, n, &mut ut);
        let mut outt = vec![0.0; n * n];
        let faces_y = (!periodic).then(|| self.face_pair(1));
        outt.par_chunks_mut(n)
            .enumerate()
            .for_each_init(Vec::new, |w, (ix, orow)| {
                let urow = &ut[ix * n..(ix + 1) * n];
                match faces_y {
                    None => kernel::extend_periodic_into(urow, w),
                    Some([lo, hi]) => {
                        let s = nodes[ix];
                        kernel::extend_dirichlet_into(
                            urow,
                            h,
                            lo.traces(2, s, t),
                            hi.traces(2, s, t),
                            w,
                        );
                    }
                }
                kernel::kernel_into(w, c, h, orow);
            });
        add_transposed(out, &outt, n);
    }

    /// 3D periodic apply (verification scale only; sequential line sweeps).
    fn apply_3d(&self, g3: &BlockGrid3D, u: &[f64], out: &mut [f64]) {
        let ax = &g3.axis;
        let n = ax.n_nodes();
        let n2 = n * n;
        let h = ax.h;
        let c = self.c;
        let mut w = Vec::with_capacity(n + 2 * kernel::PAD);
        let mut line = vec![0.0; n];
        let mut res = vec![0.0; n];

        // x lines: contiguous; write.
        for base in (0..n * n2).step_by(n) {
            kernel::extend_periodic_into(&u[base..base + n], &mut w);
            kernel::kernel_into(&w, c, h, &mut out[base..base + n]);
        }
        // y lines (base iz·n² + ix, stride n) and z lines (base iy·n + ix,
        // stride n²): gather, apply, accumulate.
        for (stride, outer_stride) in [(n, n2), (n2, n)] {
            for a in 0..n {
                for ix in 0..n {
                    let base = a * outer_stride + ix;
                    for k in 0..n {
                        line[k] = u[base + k * stride];
                    }
                    kernel::extend_periodic_into(&line, &mut w);
                    kernel::kernel_into(&w, c, h, &mut res);
                    for k in 0..n {
                        out[base + k * stride] += res[k];
                    }
                }
            }
        }
    }

    /// Assemble the dense matrix and lift vector with `apply(u) = Q·u + b`
    /// exactly (up to rounding). Refuses grids above [`DENSE_NODE_CAP`].
    pub fn assemble_dense(&self, t: f64) -> Result<(DMatrix<f64>, DVector<f64>)> {
        let rows = self.n_nodes();
        if rows > DENSE_NODE_CAP {
            return Err(Error::SizeCap {
                rows,
                cap: DENSE_NODE_CAP,
            });
        }
        let ax = self.grid.axis();
        let (nc, h, c) = (ax.n_cells, ax.h, self.c);
        let n = ax.n_nodes();
        let q1 = if ax.periodic {
            dense::q1d_periodic(nc, c, h)
        } else {
            dense::q1d_dirichlet(nc, c, h)
        };
        match &self.grid {
            Grid::One(_) => {
                let b = if ax.periodic {
                    DVector::zeros(n)
                } else {
                    let [lo, hi] = self.face_pair(0);
                    dense::lift1d(nc, c, h, lo.traces(1, 0.0, t), hi.traces(1, 0.0, t))
                };
                Ok((q1, b))
            }
            Grid::Two(_) => {
                let eye = DMatrix::<f64>::identity(n, n);
                let q2 = eye.kronecker(&q1) + q1.kronecker(&eye);
                let mut b = DVector::zeros(n * n);
                if !ax.periodic {
                    let [xlo, xhi] = self.face_pair(0);
                    for iy in 0..n {
                        let s = ax.nodes[iy];
                        let bl =
                            dense::lift1d(nc, c, h, xlo.traces(2, s, t), xhi.traces(2, s, t));
                        for ix in 0..n {
                            b[iy * n + ix] += bl[ix];
                        }
                    }
                    let [ylo, yhi] = self.face_pair(1);
                    for ix in 0..n {
                        let s = ax.nodes[ix];
                        let bl =
                            dense::lift1d(nc, c, h, ylo.traces(2, s, t), yhi.traces(2, s, t));
                        for iy in 0..n {
                            b[iy * n + ix] += bl[iy];
                        }
                    }
                }
                Ok((q2, b))
            }
            Grid::Three(_) => {
                let eye_n = DMatrix::<f64>::identity(n, n);
                let eye_n2 = DMatrix::<f64>::identity(n * n, n * n);
                let q3 = eye_n2.kronecker(&q1)
                    + eye_n.kronecker(&q1.kronecker(&eye_n))
                    + q1.kronecker(&eye_n2);
                Ok((q3, DVector::zeros(n * n * n)))
            }
        }
    }
}

/// `dst[j·n+i] = src[i·n+j]`, cache-blocked.
fn transpose_into(src: &[f64], n: usize, dst: &mut [f64]) {
    const B: usize = 64;
    for ib in (0..n).step_by(B) {
        let imax = (ib + B).min(n);
        for jb in (0..n).step_by(B) {
            let jmax = (jb + B).min(n);
            for i in ib..imax {
                for j in jb..jmax {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

/// `dst[i·n+j] += src[j·n+i]`, cache-blocked.
fn add_transposed(dst: &mut [f64], src: &[f64], n: usize) {
    const B: usize = 64;
    for ib in (0..n).step_by(B) {
        let imax = (ib + B).min(n);
        for jb in (0..n).step_by(B) {
            let jmax = (jb + B).min(n);
            for i in ib..imax {
                for j in jb..jmax {
                    dst[i * n + j] += src[j * n + i];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid_1d, build_grid_2d, build_grid_3d};
    use crate::harness::ExpCosProfile;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn periodic_op_1d(n: usize, c: f64, length: f64) -> SpatialOperator {
        SpatialOperator::new(c, build_grid_1d(n, length, true).unwrap().into(), None).unwrap()
    }

    /// Dirichlet face holding time-independent analytic traces `[g, u_xx,
    /// u_xxxx]`, encoded through the 1D identities (g_t = g_tt = 0, so
    /// F = −u_xx and F_t = 0, F_xx = −u_xxxx).
    fn static_face(g: f64, uxx: f64, uxxxx: f64) -> FaceData {
        FaceData::new(
            move |_, _| g,
            |_, _| 0.0,
            |_, _| 0.0,
            move |_, _| -uxx,
            |_, _| 0.0,
            move |_, _| -uxxxx,
        )
    }

    #[test]
    fn constructor_enforces_contracts() {
        let gp = build_grid_1d(4, 1.0, true).unwrap();
        let gd = build_grid_1d(4, 1.0, false).unwrap();
        assert!(matches!(
            SpatialOperator::new(1.5, gp.clone().into(), None),
            Err(Error::InvalidDomain(_))
        ));
        assert!(SpatialOperator::new_unrestricted(1.5, gp.clone().into(), None).is_ok());
        assert!(matches!(
            SpatialOperator::new(0.0, gd.clone().into(), None),
            Err(Error::MissingBoundaryData(_))
        ));
        assert!(matches!(
            SpatialOperator::new(
                0.0,
                gp.into(),
                Some(BoundaryData::homogeneous(1))
            ),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            SpatialOperator::new(
                0.0,
                gd.into(),
                Some(BoundaryData::homogeneous(2))
            ),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            SpatialOperator::new(0.0, build_grid_3d(3, 1.0, false).unwrap().into(), None),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn check_field_rejects_bad_shapes_and_values() {
        let op = periodic_op_1d(4, 0.0, 1.0);
        assert!(op.check_field(&Field::new(vec![0.0; 8], 0.0)).is_ok());
        assert!(matches!(
            op.check_field(&Field::new(vec![0.0; 7], 0.0)),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(op
            .check_field(&Field::new(vec![f64::NAN; 8], 0.0))
            .is_err());
    }

    #[test]
    fn constant_field_maps_to_zero_periodic_1d_and_2d() {
        let op = periodic_op_1d(5, -4.0 / 13.0, 1.0);
        let out = op.apply(&Field::new(vec![1.0; 10], 0.0)).unwrap();
        assert!(out.values.iter().all(|&v| v == 0.0));

        let op2 = SpatialOperator::new(
            1.0,
            build_grid_2d(4, 2.0, true).unwrap().into(),
            None,
        )
        .unwrap();
        let out2 = op2.apply(&Field::new(vec![1.0; 64], 0.0)).unwrap();
        assert!(out2.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matrix_free_matches_dense_on_random_vectors_1d() {
        let mut rng = StdRng::seed_from_u64(7);
        for &c in &[0.0, -4.0 / 13.0, 1.0, -1.0] {
            for periodic in [true, false] {
                let grid = build_grid_1d(8, 1.0, periodic).unwrap();
                let boundary = (!periodic).then(|| {
                    BoundaryData::new_1d(
                        static_face(rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()),
                        static_face(rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()),
                    )
                });
                let op = SpatialOperator::new(c, grid.into(), boundary).unwrap();
                let (q, b) = op.assemble_dense(0.0).unwrap();
                let h = op.h();
                let scale = 64.0 / (3.0 * h * h);
                for _ in 0..25 {
                    let u: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let out = op.apply(&Field::new(u.clone(), 0.0)).unwrap();
                    let dense_out = q.clone() * DVector::from_vec(u) + &b;
                    let maxdiff = out
                        .values
                        .iter()
                        .zip(dense_out.iter())
                        .map(|(a, d)| (a - d).abs())
                        .fold(0.0f64, f64::max);
                    assert!(
                        maxdiff <= 1e-12 * scale,
                        "c={c} periodic={periodic}: diff {maxdiff:e} vs scale {scale:e}"
                    );
                }
            }
        }
    }

    #[test]
    fn steady_linear_profile_is_annihilated_dirichlet() {
        // u(x) = x with g = (0, 1) and no forcing is a steady state: the
        // discrete Laplacian must vanish identically (linear data is in the
        // exactness class of every row).
        let n = 6;
        let grid = build_grid_1d(n, 1.0, false).unwrap();
        let nodes = grid.nodes.clone();
        let boundary = BoundaryData::new_1d(static_face(0.0, 0.0, 0.0), static_face(1.0, 0.0, 0.0));
        let op = SpatialOperator::new(-4.0 / 13.0, grid.into(), Some(boundary)).unwrap();
        let out = op.apply(&Field::new(nodes, 0.0)).unwrap();
        let h = op.h();
        let tol = 1e-13 * 64.0 / (3.0 * h * h);
        for (i, v) in out.values.iter().enumerate() {
            assert!(v.abs() <= tol, "node {i}: {v:e}");
        }
    }

    #[test]
    fn dirichlet_rows_are_exact_on_degree_5_polynomials() {
        // The ghost extrapolation reproduces polynomials of degree ≤ 5
        // exactly, and at c = 0 the interior stencil's truncation starts at
        // the sixth derivative, so the full Dirichlet apply must equal p''
        // at every node.
        let mut rng = StdRng::seed_from_u64(11);
        let coef: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let p = |x: f64| coef.iter().rev().fold(0.0, |acc, &a| acc * x + a);
        let d2 = |x: f64| {
            (2..6).rev().fold(0.0, |acc, k| {
                acc * x + coef[k] * (k * (k - 1)) as f64
            })
        };
        let d4 = |x: f64| coef[4] * 24.0 + coef[5] * 120.0 * x;

        let n = 5;
        let grid = build_grid_1d(n, 1.0, false).unwrap();
        let samples: Vec<f64> = grid.nodes.iter().map(|&x| p(x)).collect();
        let boundary = BoundaryData::new_1d(
            static_face(p(0.0), d2(0.0), d4(0.0)),
            static_face(p(1.0), d2(1.0), d4(1.0)),
        );
        let op = SpatialOperator::new(0.0, grid.clone().into(), Some(boundary)).unwrap();
        let out = op.apply(&Field::new(samples.clone(), 0.0)).unwrap();
        let h = op.h();
        let tol = 1e-11 * 64.0 / (3.0 * h * h);
        for (i, (&x, v)) in grid.nodes.iter().zip(&out.values).enumerate() {
            assert!(
                (v - d2(x)).abs() <= tol,
                "node {i}: got {v}, want {}",
                d2(x)
            );
        }

        // For general c the closure may deviate from p'' at O(h³·p⁽⁵⁾), but
        // it must agree with the interior stencil applied to the polynomial's
        // true extension: the ghost values themselves are reproduced exactly.
        let mut w = Vec::new();
        kernel::extend_dirichlet_into(
            &samples,
            h,
            [p(0.0), d2(0.0), d4(0.0)],
            [p(1.0), d2(1.0), d4(1.0)],
            &mut w,
        );
        for (wv, x) in w.iter().zip(
            std::iter::once(-0.75 * h)
                .chain(std::iter::once(-0.25 * h))
                .chain(grid.nodes.iter().copied())
                .chain([1.0 + 0.25 * h, 1.0 + 0.75 * h]),
        ) {
            assert!((wv - p(x)).abs() <= 1e-13, "ghost at {x}: {wv} vs {}", p(x));
        }
    }

    #[test]
    fn sine_samples_recover_negative_sine_fourth_order() {
        // c = 0, u = sin(x) on (0, 2π), N = 8: the result is
        // −(1 + O(h⁴))·sin(x) and must also match the dense assembly.
        let l = 2.0 * std::f64::consts::PI;
        let op = periodic_op_1d(8, 0.0, l);
        let nodes = op.grid.axis().nodes.clone();
        let u: Vec<f64> = nodes.iter().map(|&x| x.sin()).collect();
        let out = op.apply(&Field::new(u.clone(), 0.0)).unwrap();
        let (q, _) = op.assemble_dense(0.0).unwrap();
        let dense_out = q * DVector::from_vec(u);
        for ((&x, v), d) in nodes.iter().zip(&out.values).zip(dense_out.iter()) {
            assert!((v - d).abs() <= 1e-11);
            // h = 2π/8; the fourth-order truncation constant is small, so 1e-3
            // cleanly bounds |out + sin|.
            assert!((v + x.sin()).abs() <= 1e-3, "at {x}: {v}");
        }
    }

    #[test]
    fn lift_vector_carries_the_boundary_value_coefficients() {
        // u = 0, g_left = 1 (static), everything else zero: the output is the
        // lift alone, whose first two entries are the g-weights of the two
        // closure rows, (30−8c)/(3h²) and (−2+8c)/(3h²).
        let n = 3;
        let c = -4.0 / 13.0;
        let grid = build_grid_1d(n, 1.0, false).unwrap();
        let boundary = BoundaryData::new_1d(static_face(1.0, 0.0, 0.0), static_face(0.0, 0.0, 0.0));
        let op = SpatialOperator::new(c, grid.into(), Some(boundary)).unwrap();
        let h = op.h();
        let out = op.apply(&Field::new(vec![0.0; 2 * n], 0.0)).unwrap();
        let scale = 1.0 / (3.0 * h * h);
        assert!((out.values[0] - (30.0 - 8.0 * c) * scale).abs() <= 1e-9);
        assert!((out.values[1] - (-2.0 + 8.0 * c) * scale).abs() <= 1e-9);
        for v in &out.values[2..] {
            assert_eq!(*v, 0.0);
        }
        // And the assembled lift agrees.
        let (_, b) = op.assemble_dense(0.0).unwrap();
        for (i, v) in out.values.iter().enumerate() {
            assert!((v - b[i]).abs() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn boundary_truncation_has_the_stated_leading_constants() {
        // Apply the operator to exact samples of exp(cos(x)) and compare the
        // residual at the first node against the predicted leading truncation
        //   −(2359/4423680)·h⁴·u⁽⁶⁾ + c·(−h³/96·u⁽⁵⁾ − (3061/1105920)·h⁴·u⁽⁶⁾)
        // and at the second node against
        //   −(3071/4423680)·h⁴·u⁽⁶⁾ + c·(+h³/96·u⁽⁵⁾ − (2699/1105920)·h⁴·u⁽⁶⁾),
        // with derivatives evaluated at the node itself. The gap must be
        // relatively small and shrink by ≥ 30× when h halves (O(h⁵) remainder
        // versus the O(h³)/O(h⁴) prediction).
        let profile = ExpCosProfile::new(1.0);
        let residuals = |n: usize, c: f64| -> [(f64, f64); 2] {
            let grid = build_grid_1d(n, 1.0, false).unwrap();
            let h = grid.h;
            let nodes = grid.nodes.clone();
            let u: Vec<f64> = nodes.iter().map(|&x| profile.deriv(0, x)).collect();
            let boundary = BoundaryData::new_1d(
                static_face(
                    profile.deriv(0, 0.0),
                    profile.deriv(2, 0.0),
                    profile.deriv(4, 0.0),
                ),
                static_face(
                    profile.deriv(0, 1.0),
                    profile.deriv(2, 1.0),
                    profile.deriv(4, 1.0),
                ),
            );
            let op = SpatialOperator::new(c, grid.into(), Some(boundary)).unwrap();
            let out = op.apply(&Field::new(u, 0.0)).unwrap();
            let pred = |node: f64, row: usize| -> f64 {
                let u5 = profile.deriv(5, node);
                let u6 = profile.deriv(6, node);
                let h3 = h.powi(3);
                let h4 = h.powi(4);
                if row == 0 {
                    -2359.0 / 4_423_680.0 * h4 * u6
                        + c * (-h3 / 96.0 * u5 - 3061.0 / 1_105_920.0 * h4 * u6)
                } else {
                    -3071.0 / 4_423_680.0 * h4 * u6
                        + c * (h3 / 96.0 * u5 - 2699.0 / 1_105_920.0 * h4 * u6)
                }
            };
            [0, 1].map(|row| {
                let r = out.values[row] - profile.deriv(2, nodes[row]);
                (r, pred(nodes[row], row))
            })
        };
        for &c in &[0.0, -4.0 / 13.0, 1.0] {
            for row in 0..2 {
                let (r16, p16) = residuals(16, c)[row];
                let (r32, p32) = residuals(32, c)[row];
                let gap16 = (r16 - p16).abs();
                let gap32 = (r32 - p32).abs();
                assert!(
                    gap16 <= 8e-3 * r16.abs(),
                    "c={c} row={row}: residual {r16:e} vs prediction {p16:e}"
                );
                assert!(
                    gap32 <= 3e-3 * r32.abs(),
                    "c={c} row={row}: residual {r32:e} vs prediction {p32:e}"
                );
                assert!(
                    gap16 / gap32 >= 30.0,
                    "c={c} row={row}: remainder ratio {} (gaps {gap16:e}, {gap32:e})",
                    gap16 / gap32
                );
            }
        }
    }

    #[test]
    fn dirichlet_residual_drops_eighth_fold_refining_24_to_48() {
        // Apply the full Dirichlet operator to exact solution samples of
        // u = exp(cos(x − t)) at t = 0.3 and measure the defect against the
        // analytic u_xx − forcing-free residual; N = 24 → 48 must shrink the
        // norm by ≥ 2³ (third-order boundary closures dominate).
        let profile = ExpCosProfile::new(1.0);
        let t = 0.3;
        let residual_norm = |n: usize, c: f64| -> f64 {
            let grid = build_grid_1d(n, 1.0, false).unwrap();
            let h = grid.h;
            let nodes = grid.nodes.clone();
            let u: Vec<f64> = nodes.iter().map(|&x| profile.deriv(0, x - t)).collect();
            let mk_face = |x0: f64| {
                FaceData::new(
                    move |_, tt| profile.deriv(0, x0 - tt),
                    move |_, tt| -profile.deriv(1, x0 - tt),
                    move |_, tt| profile.deriv(2, x0 - tt),
                    move |_, tt| {
                        -profile.deriv(1, x0 - tt) - profile.deriv(2, x0 - tt)
                    },
                    move |_, tt| profile.deriv(2, x0 - tt) + profile.deriv(3, x0 - tt),
                    move |_, tt| {
                        -profile.deriv(3, x0 - tt) - profile.deriv(4, x0 - tt)
                    },
                )
            };
            let boundary = BoundaryData::new_1d(mk_face(0.0), mk_face(1.0));
            let op = SpatialOperator::new(c, grid.into(), Some(boundary)).unwrap();
            let out = op.apply(&Field::new(u, t)).unwrap();
            let mut sq = 0.0;
            for (&x, v) in nodes.iter().zip(&out.values) {
                let d = v - profile.deriv(2, x - t);
                sq += d * d;
            }
            (sq * (0.5 * h)).sqrt()
        };
        // At c = −4/13 the deliberate c·h³·u⁽⁵⁾ truncation term makes the
        // pointwise residual exactly third order, so each doubling shrinks
        // the norm by 2³ asymptotically; allow a few percent of wobble on
        // the observed order.
        let r24 = residual_norm(24, -4.0 / 13.0);
        let r48 = residual_norm(48, -4.0 / 13.0);
        let r96 = residual_norm(96, -4.0 / 13.0);
        for (hi, lo) in [(r24, r48), (r48, r96)] {
            let order = (hi / lo).log2();
            assert!(order >= 2.9, "observed order {order} (ratio {})", hi / lo);
        }
        // At c = 0 that term vanishes and the residual is fourth order.
        let s24 = residual_norm(24, 0.0);
        let s48 = residual_norm(48, 0.0);
        assert!(
            s24 / s48 >= 2.0f64.powf(3.5),
            "c=0 ratio {} (s24={s24:e}, s48={s48:e})",
            s24 / s48
        );
    }

    #[test]
    fn pde_trace_identities_recover_analytic_traces() {
        // For the traveling wave u = f(x + y − t), the face data built from
        // PDE-available quantities must reproduce the analytic [g, u_xx,
        // u_xxxx] traces in both 1D (f(x − t)) and 2D form.
        let profile = ExpCosProfile::new(1.0);
        let d = move |k: usize, s: f64| profile.deriv(k, s);

        // 1D left face of u = f(x − t).
        let f1 = FaceData::new(
            move |_, t| d(0, -t),
            move |_, t| -d(1, -t),
            move |_, t| d(2, -t),
            move |_, t| -d(1, -t) - d(2, -t),
            move |_, t| d(2, -t) + d(3, -t),
            move |_, t| -d(3, -t) - d(4, -t),
        );
        for &t in &[0.0, 0.37, 1.0] {
            let tr = f1.traces(1, 0.0, t);
            assert!((tr[0] - d(0, -t)).abs() < 1e-14);
            assert!((tr[1] - d(2, -t)).abs() < 1e-13);
            assert!((tr[2] - d(4, -t)).abs() < 1e-13);
        }

        // 2D x-low face of u = f(x + y − t): forcing F = −f' − 2f''.
        let f2 = FaceData::new(
            move |s, t| d(0, s - t),
            move |s, t| -d(1, s - t),
            move |s, t| d(2, s - t),
            move |s, t| -d(1, s - t) - 2.0 * d(2, s - t),
            move |s, t| d(2, s - t) + 2.0 * d(3, s - t),
            move |s, t| -d(3, s - t) - 2.0 * d(4, s - t),
        )
        .with_tangential(
            move |s, t| d(2, s - t),
            move |s, t| -d(3, s - t),
            move |s, t| d(4, s - t),
            move |s, t| -d(3, s - t) - 2.0 * d(4, s - t),
        );
        for &(s, t) in &[(0.2, 0.0), (0.9, 0.41), (0.5, 1.0)] {
            let tr = f2.traces(2, s, t);
            assert!((tr[0] - d(0, s - t)).abs() < 1e-13);
            assert!((tr[1] - d(2, s - t)).abs() < 1e-12);
            assert!((tr[2] - d(4, s - t)).abs() < 1e-12);
        }
    }

    #[test]
    fn time_differenced_boundary_values_approximate_analytic_derivatives() {
        let profile = ExpCosProfile::new(1.0);
        let d = move |k: usize, s: f64| profile.deriv(k, s);
        let face = FaceData::new(
            move |_, t| d(0, -t),
            |_, _| f64::NAN, // must be replaced by the differenced version
            |_, _| f64::NAN,
            |_, _| 0.0,
            |_, _| 0.0,
            |_, _| 0.0,
        )
        .with_time_differenced_g();
        for &t in &[0.1, 0.5, 0.9] {
            let gt = (face.g_t)(0.0, t);
            let gtt = (face.g_tt)(0.0, t);
            assert!((gt - -d(1, -t)).abs() < 1e-9, "g_t at {t}");
            assert!((gtt - d(2, -t)).abs() < 1e-7, "g_tt at {t}");
        }
    }

    #[test]
    fn periodic_2d_matches_kronecker_assembly() {
        let mut rng = StdRng::seed_from_u64(3);
        let op = SpatialOperator::new(
            -4.0 / 13.0,
            build_grid_2d(4, 1.0, true).unwrap().into(),
            None,
        )
        .unwrap();
        let (q, b) = op.assemble_dense(0.0).unwrap();
        assert_eq!(q.nrows(), 64);
        assert!(b.iter().all(|&v| v == 0.0));
        let h = op.h();
        let scale = 128.0 / (3.0 * h * h);
        for _ in 0..10 {
            let u: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let out = op.apply(&Field::new(u.clone(), 0.0)).unwrap();
            let dense_out = q.clone() * DVector::from_vec(u);
            for (a, d) in out.values.iter().zip(dense_out.iter()) {
                assert!((a - d).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn dirichlet_2d_matches_dense_assembly_with_lift() {
        let mut rng = StdRng::seed_from_u64(5);
        let profile = ExpCosProfile::new(1.0);
        let d = move |k: usize, s: f64| profile.deriv(k, s);
        let mk_face = |off: f64| {
            FaceData::new(
                move |s, t| d(0, off + s - t),
                move |s, t| -d(1, off + s - t),
                move |s, t| d(2, off + s - t),
                move |s, t| -d(1, off + s - t) - 2.0 * d(2, off + s - t),
                move |s, t| d(2, off + s - t) + 2.0 * d(3, off + s - t),
                move |s, t| -d(3, off + s - t) - 2.0 * d(4, off + s - t),
            )
            .with_tangential(
                move |s, t| d(2, off + s - t),
                move |s, t| -d(3, off + s - t),
                move |s, t| d(4, off + s - t),
                move |s, t| -d(3, off + s - t) - 2.0 * d(4, off + s - t),
            )
        };
        let boundary = BoundaryData::new_2d(
            [mk_face(0.0), mk_face(1.0)],
            [mk_face(0.0), mk_face(1.0)],
        );
        let op = SpatialOperator::new(
            -0.25,
            build_grid_2d(4, 1.0, false).unwrap().into(),
            Some(boundary),
        )
        .unwrap();
        let t = 0.21;
        let (q, b) = op.assemble_dense(t).unwrap();
        let h = op.h();
        let scale = 128.0 / (3.0 * h * h);
        for _ in 0..10 {
            let u: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let out = op.apply(&Field::new(u.clone(), t)).unwrap();
            let dense_out = q.clone() * DVector::from_vec(u) + &b;
            for (a, dv) in out.values.iter().zip(dense_out.iter()) {
                assert!((a - dv).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn periodic_3d_sin_product_refines_at_fourth_order() {
        let l = 2.0 * std::f64::consts::PI;
        let err_norm = |n: usize, c: f64| -> f64 {
            let op = SpatialOperator::new(
                c,
                build_grid_3d(n, l, true).unwrap().into(),
                None,
            )
            .unwrap();
            let nodes = op.grid.axis().nodes.clone();
            let m = nodes.len();
            let mut u = vec![0.0; m * m * m];
            for iz in 0..m {
                for iy in 0..m {
                    for ix in 0..m {
                        u[(iz * m + iy) * m + ix] =
                            nodes[ix].sin() * nodes[iy].sin() * nodes[iz].sin();
                    }
                }
            }
            let out = op.apply(&Field::new(u.clone(), 0.0)).unwrap();
            let h = op.h();
            let mut sq = 0.0;
            for (v, uu) in out.values.iter().zip(&u) {
                let diff = v + 3.0 * uu; // exact Laplacian is −3u
                sq += diff * diff;
            }
            (sq).sqrt() * (0.5 * h).powf(1.5)
        };
        // At c = 0 the interior truncation starts at h⁴·u⁽⁶⁾, so the defect
        // against the exact Laplacian refines at fourth order.
        let e4 = err_norm(4, 0.0);
        let e8 = err_norm(8, 0.0);
        assert!(
            e4 / e8 >= 2.0f64.powf(3.5),
            "refinement ratio {} (e4={e4:e}, e8={e8:e})",
            e4 / e8
        );
        // And the result is close to −3u at N=8 already.
        assert!(e8 < 0.05, "e8 = {e8}");
        // With c ≠ 0 the deliberate c·h³·u⁽⁵⁾ truncation dominates: applying
        // the operator to exact samples is only third-order accurate (the
        // scheme recovers the higher solution orders through error
        // inhibition during integration, not pointwise consistency).
        let f4 = err_norm(4, -4.0 / 13.0);
        let f8 = err_norm(8, -4.0 / 13.0);
        assert!(
            f4 / f8 >= 2.0f64.powf(2.5),
            "c-part refinement ratio {} (f4={f4:e}, f8={f8:e})",
            f4 / f8
        );
    }

    #[test]
    fn matrix_free_3d_matches_kronecker_assembly() {
        let mut rng = StdRng::seed_from_u64(13);
        let op = SpatialOperator::new(
            0.5,
            build_grid_3d(3, 1.0, true).unwrap().into(),
            None,
        )
        .unwrap();
        let (q, _) = op.assemble_dense(0.0).unwrap();
        let m = 216;
        assert_eq!(q.nrows(), m);
        let h = op.h();
        let scale = 192.0 / (3.0 * h * h);
        let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let out = op.apply(&Field::new(u.clone(), 0.0)).unwrap();
        let dense_out = q * DVector::from_vec(u);
        for (a, d) in out.values.iter().zip(dense_out.iter()) {
            assert!((a - d).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn dense_cap_refuses_large_grids() {
        let op = SpatialOperator::new(
            0.0,
            build_grid_2d(51, 1.0, true).unwrap().into(),
            None,
        )
        .unwrap();
        assert!(matches!(
            op.assemble_dense(0.0),
            Err(Error::SizeCap { rows: 10404, cap: 10000 })
        ));
    }

    #[test]
    fn periodic_eigenvalues_are_real_and_non_positive() {
        for &c in &[-1.0, -4.0 / 13.0, 0.0, 1.0] {
            let op = periodic_op_1d(6, c, 1.0);
            let (q, _) = op.assemble_dense(0.0).unwrap();
            let rho = 32.0 * (2.0 - c) / (3.0 * op.h() * op.h());
            let eigs = q.complex_eigenvalues();
            for e in eigs.iter() {
                assert!(e.im.abs() <= 1e-10 * rho, "c={c}: imaginary part {}", e.im);
                assert!(e.re <= 1e-10 * rho, "c={c}: positive eigenvalue {}", e.re);
            }
        }
    }
}
