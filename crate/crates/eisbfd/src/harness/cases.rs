//! Manufactured test cases: exact solutions with closed-form derivatives,
//! the matching heat forcing `F = u_t − Δu`, and Dirichlet face traces.

use std::cell::Cell;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::grid::{build_grid_1d, build_grid_2d, Grid};
use crate::operator::{BoundaryData, FaceData, Field};

use super::profile::ExpCosProfile;

/// The stencil parameter at which the leading accumulated error term
/// vanishes and the scheme gains an extra order.
pub const OPTIMAL_C: f64 = -4.0 / 13.0;

/// Owned volume-forcing callback in the shape the time integrator expects:
/// adds the forcing samples at time `t` into the right-hand-side buffer.
pub type BoxedForcing = Box<dyn Fn(f64, &mut [f64]) + Send + Sync>;

/// Closed-form exact solutions available to the manufactured runs.
#[derive(Clone, Copy, Debug)]
pub enum SolutionForm {
    /// `u(x̄, t) = f(Σᵢ xᵢ − t)` with `f(s) = exp(cos(a·s))`: a smooth
    /// traveling wave; the forcing `F = −f′ − d·f″` makes it an exact heat
    /// solution in `d` dimensions.
    TravelingWave { profile: ExpCosProfile },
    /// `u(x, t) = e^{−ω²t}·cos(ω x)`: an exact unforced heat solution used
    /// to validate the per-wavenumber symbol analysis (1D, integer `ω`).
    DecayingMode { omega: f64 },
    /// `u ≡ value`: an exact steady solution with zero forcing.
    Constant { value: f64 },
}

/// A manufactured convergence case: exact solution, forcing, boundary
/// traces, stencil parameter, resolution ladder, and final time.
#[derive(Clone, Debug)]
pub struct TestCase {
    pub name: String,
    /// Space dimension (1 or 2 for solver runs).
    pub dimension: usize,
    pub periodic: bool,
    /// Domain edge length; the domain is `[0, L]^d`.
    pub length: f64,
    pub form: SolutionForm,
    /// Stencil parameter the case is normally run with.
    pub c: f64,
    /// Cell counts of the convergence ladder, coarse to fine.
    pub resolutions: Vec<usize>,
    pub t_final: f64,
}

impl TestCase {
    /// Same case with a different stencil parameter.
    pub fn with_c(mut self, c: f64) -> TestCase {
        self.c = c;
        self
    }

    /// Same case with a different resolution ladder.
    pub fn with_resolutions(mut self, resolutions: Vec<usize>) -> TestCase {
        self.resolutions = resolutions;
        self
    }

    /// Same case with a different final time.
    pub fn with_t_final(mut self, t_final: f64) -> TestCase {
        self.t_final = t_final;
        self
    }

    /// Build this case's grid at `n_cells` cells per direction.
    pub fn build_grid(&self, n_cells: usize) -> Result<Grid> {
        match self.dimension {
            1 => Ok(Grid::One(build_grid_1d(
                n_cells,
                self.length,
                self.periodic,
            )?)),
            2 => Ok(Grid::Two(build_grid_2d(
                n_cells,
                self.length,
                self.periodic,
            )?)),
            d => Err(Error::Unsupported(format!(
                "convergence cases cover 1D and 2D, not {d}D"
            ))),
        }
    }

    /// Exact solution at a point.
    pub fn exact_at(&self, coords: &[f64], t: f64) -> f64 {
        match self.form {
            SolutionForm::TravelingWave { profile } => {
                profile.value(coords.iter().sum::<f64>() - t)
            }
            SolutionForm::DecayingMode { omega } => {
                (-omega * omega * t).exp() * (omega * coords[0]).cos()
            }
            SolutionForm::Constant { value } => value,
        }
    }

    /// `∂u/∂t` at a point.
    pub fn time_derivative_at(&self, coords: &[f64], t: f64) -> f64 {
        match self.form {
            SolutionForm::TravelingWave { profile } => {
                -profile.deriv(1, coords.iter().sum::<f64>() - t)
            }
            SolutionForm::DecayingMode { omega } => {
                -omega * omega * self.exact_at(coords, t)
            }
            SolutionForm::Constant { .. } => 0.0,
        }
    }

    /// `Δu` at a point.
    pub fn laplacian_at(&self, coords: &[f64], t: f64) -> f64 {
        match self.form {
            SolutionForm::TravelingWave { profile } => {
                self.dimension as f64 * profile.deriv(2, coords.iter().sum::<f64>() - t)
            }
            SolutionForm::DecayingMode { omega } => {
                -omega * omega * self.exact_at(coords, t)
            }
            SolutionForm::Constant { .. } => 0.0,
        }
    }

    /// Manufactured forcing `F = u_t − Δu` at a point.
    pub fn forcing_at(&self, coords: &[f64], t: f64) -> f64 {
        match self.form {
            SolutionForm::TravelingWave { profile } => {
                let s = coords.iter().sum::<f64>() - t;
                let (d1, d2) = profile.first_two(s);
                -d1 - self.dimension as f64 * d2
            }
            // Unforced exact heat solutions.
            SolutionForm::DecayingMode { .. } | SolutionForm::Constant { .. } => 0.0,
        }
    }

    /// Exact solution sampled on every node of `grid` at time `t`.
    pub fn exact_field(&self, grid: &Grid, t: f64) -> Field {
        assert_eq!(
            grid.dimension(),
            self.dimension,
            "grid dimension does not match the case"
        );
        let values = match grid {
            Grid::One(ax) => ax.nodes.iter().map(|&x| self.exact_at(&[x], t)).collect(),
            Grid::Two(g2) => {
                let ax = &g2.axis;
                let n = ax.n_nodes();
                if let SolutionForm::TravelingWave { profile } = self.form {
                    // The wave depends on x+y only, and node-coordinate sums
                    // lie on a uniform ladder: evaluate 2n−1 profile values
                    // and gather.
                    let vals: Vec<f64> = (0..2 * n - 1)
                        .map(|k| {
                            profile.value(2.0 * ax.nodes[0] + 0.5 * ax.h * k as f64 - t)
                        })
                        .collect();
                    let mut out = vec![0.0; n * n];
                    for iy in 0..n {
                        for ix in 0..n {
                            out[iy * n + ix] = vals[iy + ix];
                        }
                    }
                    out
                } else {
                    let mut out = vec![0.0; n * n];
                    for iy in 0..n {
                        for ix in 0..n {
                            out[iy * n + ix] = self.exact_at(&[ax.nodes[ix], ax.nodes[iy]], t);
                        }
                    }
                    out
                }
            }
            Grid::Three(_) => panic!("convergence cases cover 1D and 2D"),
        };
        Field::new(values, t)
    }

    /// Dirichlet face data for this case (`None` on periodic domains).
    pub fn boundary_data(&self) -> Option<BoundaryData> {
        if self.periodic {
            return None;
        }
        let l = self.length;
        Some(match (self.dimension, self.form) {
            (1, SolutionForm::TravelingWave { profile }) => BoundaryData::new_1d(
                wave_face_1d(profile, 0.0),
                wave_face_1d(profile, l),
            ),
            (2, SolutionForm::TravelingWave { profile }) => BoundaryData::new_2d(
                [wave_face_2d(profile, 0.0), wave_face_2d(profile, l)],
                [wave_face_2d(profile, 0.0), wave_face_2d(profile, l)],
            ),
            (1, SolutionForm::DecayingMode { omega }) => BoundaryData::new_1d(
                mode_face(omega, 0.0),
                mode_face(omega, l),
            ),
            (_, SolutionForm::Constant { value }) => {
                let face = || {
                    FaceData::new(
                        move |_, _| value,
                        |_, _| 0.0,
                        |_, _| 0.0,
                        |_, _| 0.0,
                        |_, _| 0.0,
                        |_, _| 0.0,
                    )
                };
                if self.dimension == 1 {
                    BoundaryData::new_1d(face(), face())
                } else {
                    BoundaryData::new_2d([face(), face()], [face(), face()])
                }
            }
            (d, form) => panic!("no Dirichlet traces for {form:?} in {d}D"),
        })
    }

    /// Volume forcing sampled on `grid`, as the accumulating callback the
    /// time integrator expects; `None` when the case is unforced.
    pub fn volume_forcing(&self, grid: &Grid) -> Option<BoxedForcing> {
        let SolutionForm::TravelingWave { profile } = self.form else {
            return None;
        };
        match grid {
            Grid::One(ax) => {
                let nodes = ax.nodes.clone();
                Some(Box::new(move |t, out| {
                    for (o, &x) in out.iter_mut().zip(&nodes) {
                        let (d1, d2) = profile.first_two(x - t);
                        *o += -d1 - d2;
                    }
                }))
            }
            Grid::Two(g2) => {
                let ax = &g2.axis;
                let n = ax.n_nodes();
                // Node-coordinate sums x_i + x_j form a uniform ladder of
                // 2n−1 values; evaluate the profile once per ladder point.
                let svals: Vec<f64> = (0..2 * n - 1)
                    .map(|k| 2.0 * ax.nodes[0] + 0.5 * ax.h * k as f64)
                    .collect();
                Some(Box::new(move |t, out| {
                    let vals: Vec<f64> = svals
                        .iter()
                        .map(|&s| {
                            let (d1, d2) = profile.first_two(s - t);
                            -d1 - 2.0 * d2
                        })
                        .collect();
                    for iy in 0..n {
                        let row = &mut out[iy * n..(iy + 1) * n];
                        for (ix, o) in row.iter_mut().enumerate() {
                            *o += vals[iy + ix];
                        }
                    }
                }))
            }
            Grid::Three(_) => panic!("convergence cases cover 1D and 2D"),
        }
    }
}

/// Profile derivatives at one argument, memoized in a one-slot thread-local
/// cache. A face's ten trace closures are called back to back at the same
/// `(s, t)`, so nine of the ten calls hit the cache and the face costs one
/// transcendental evaluation instead of ten.
fn cached_derivs(profile: ExpCosProfile, arg: f64) -> [f64; 7] {
    thread_local! {
        static SLOT: Cell<([u64; 2], [f64; 7])> =
            const { Cell::new(([u64::MAX, u64::MAX], [0.0; 7])) };
    }
    let key = [arg.to_bits(), profile.scale.to_bits()];
    SLOT.with(|slot| {
        let (stored_key, stored) = slot.get();
        if stored_key == key {
            return stored;
        }
        let fresh = profile.derivs_through_six(arg);
        slot.set((key, fresh));
        fresh
    })
}

/// Traces of the 1D traveling wave on the face at `x0`: the wave argument is
/// `x0 − t`, the forcing is `−f′ − f″`.
fn wave_face_1d(profile: ExpCosProfile, x0: f64) -> FaceData {
    FaceData::new(
        move |_, t| cached_derivs(profile, x0 - t)[0],
        move |_, t| -cached_derivs(profile, x0 - t)[1],
        move |_, t| cached_derivs(profile, x0 - t)[2],
        move |_, t| {
            let d = cached_derivs(profile, x0 - t);
            -d[1] - d[2]
        },
        move |_, t| {
            let d = cached_derivs(profile, x0 - t);
            d[2] + d[3]
        },
        move |_, t| {
            let d = cached_derivs(profile, x0 - t);
            -d[3] - d[4]
        },
    )
}

/// Traces of the 2D traveling wave on the face whose normal coordinate is
/// fixed at `a0`: with tangential coordinate `s` the wave argument is
/// `a0 + s − t`, and the forcing is `−f′ − 2f″`.
fn wave_face_2d(profile: ExpCosProfile, a0: f64) -> FaceData {
    FaceData::new(
        move |s, t| cached_derivs(profile, a0 + s - t)[0],
        move |s, t| -cached_derivs(profile, a0 + s - t)[1],
        move |s, t| cached_derivs(profile, a0 + s - t)[2],
        move |s, t| {
            let d = cached_derivs(profile, a0 + s - t);
            -d[1] - 2.0 * d[2]
        },
        move |s, t| {
            let d = cached_derivs(profile, a0 + s - t);
            d[2] + 2.0 * d[3]
        },
        move |s, t| {
            let d = cached_derivs(profile, a0 + s - t);
            -d[3] - 2.0 * d[4]
        },
    )
    .with_tangential(
        move |s, t| cached_derivs(profile, a0 + s - t)[2],
        move |s, t| -cached_derivs(profile, a0 + s - t)[3],
        move |s, t| cached_derivs(profile, a0 + s - t)[4],
        move |s, t| {
            let d = cached_derivs(profile, a0 + s - t);
            -d[3] - 2.0 * d[4]
        },
    )
}

/// Traces of the decaying mode on the face at `x0` (unforced).
fn mode_face(omega: f64, x0: f64) -> FaceData {
    let spatial = (omega * x0).cos();
    let w2 = omega * omega;
    FaceData::new(
        move |_, t| (-w2 * t).exp() * spatial,
        move |_, t| -w2 * (-w2 * t).exp() * spatial,
        move |_, t| w2 * w2 * (-w2 * t).exp() * spatial,
        |_, _| 0.0,
        |_, _| 0.0,
        |_, _| 0.0,
    )
}

/// The registry of built-in convergence cases.
pub fn builtin_cases() -> Vec<TestCase> {
    vec![
        TestCase {
            name: "dirichlet1d".into(),
            dimension: 1,
            periodic: false,
            length: 1.0,
            form: SolutionForm::TravelingWave {
                profile: ExpCosProfile::new(1.0),
            },
            c: OPTIMAL_C,
            resolutions: vec![24, 36, 48, 60, 72],
            t_final: 1.0,
        },
        TestCase {
            name: "periodic2d".into(),
            dimension: 2,
            periodic: true,
            length: 1.0,
            form: SolutionForm::TravelingWave {
                profile: ExpCosProfile::new(TAU),
            },
            c: OPTIMAL_C,
            resolutions: vec![50, 60, 70, 80],
            t_final: 1.0,
        },
        TestCase {
            name: "dirichlet2d".into(),
            dimension: 2,
            periodic: false,
            length: 1.0,
            form: SolutionForm::TravelingWave {
                profile: ExpCosProfile::new(1.0),
            },
            c: OPTIMAL_C,
            resolutions: vec![24, 36, 48, 60, 72, 96],
            t_final: 1.0,
        },
        TestCase {
            name: "mode2".into(),
            dimension: 1,
            periodic: true,
            length: TAU,
            form: SolutionForm::DecayingMode { omega: 2.0 },
            c: OPTIMAL_C,
            resolutions: vec![12, 16, 24, 32, 48],
            t_final: 0.5,
        },
        TestCase {
            name: "mode3".into(),
            dimension: 1,
            periodic: true,
            length: TAU,
            form: SolutionForm::DecayingMode { omega: 3.0 },
            c: OPTIMAL_C,
            resolutions: vec![16, 24, 32, 48, 64],
            t_final: 0.25,
        },
    ]
}

/// Look up a built-in case by name.
pub fn find_case(name: &str) -> Option<TestCase> {
    builtin_cases().into_iter().find(|c| c.name == name)
}
