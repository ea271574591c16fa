//! Block grids: each cell of width `h` carries two nodes per axis, offset
//! `h/4` on either side of the cell center, so consecutive nodes are spaced
//! `h/2` and no node touches the domain boundary.

use crate::error::{Error, Result};

/// Two ghost-node coordinates past each boundary of a Dirichlet grid.
///
/// The ghosts mirror the first two interior node offsets across the boundary:
/// left ghosts at `-h/4` and `-3h/4`, right ghosts at `L + h/4` and `L + 3h/4`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostLayer {
    /// Coordinates past the left edge, nearest first: `[-h/4, -3h/4]`.
    pub left: [f64; 2],
    /// Coordinates past the right edge, nearest first: `[L + h/4, L + 3h/4]`.
    pub right: [f64; 2],
}

/// One-dimensional block grid on the open interval `(0, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrid1D {
    /// Number of cells `N`.
    pub n_cells: usize,
    /// Domain length `L`.
    pub length: f64,
    /// Cell width `h = L / N`.
    pub h: f64,
    /// The `2N` node coordinates in increasing order.
    pub nodes: Vec<f64>,
    /// Whether the grid is periodic; non-periodic grids carry a ghost layer.
    pub periodic: bool,
    /// Ghost coordinates (Dirichlet grids only).
    pub ghosts: Option<GhostLayer>,
}

impl BlockGrid1D {
    /// Total node count `2N`.
    pub fn n_nodes(&self) -> usize {
        2 * self.n_cells
    }
}

/// Two-dimensional tensor-product block grid: `4N²` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrid2D {
    /// The shared per-axis grid (same `N` and `L` in x and y).
    pub axis: BlockGrid1D,
}

impl BlockGrid2D {
    /// Total node count `4N²`.
    pub fn n_nodes(&self) -> usize {
        self.axis.n_nodes() * self.axis.n_nodes()
    }
}

/// Three-dimensional tensor-product block grid: `8N³` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrid3D {
    /// The shared per-axis grid.
    pub axis: BlockGrid1D,
}

impl BlockGrid3D {
    /// Total node count `8N³`.
    pub fn n_nodes(&self) -> usize {
        let m = self.axis.n_nodes();
        m * m * m
    }
}

/// A block grid of any supported dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    One(BlockGrid1D),
    Two(BlockGrid2D),
    Three(BlockGrid3D),
}

impl Grid {
    /// Space dimension: 1, 2, or 3.
    pub fn dimension(&self) -> usize {
        match self {
            Grid::One(_) => 1,
            Grid::Two(_) => 2,
            Grid::Three(_) => 3,
        }
    }

    /// The shared per-axis 1D grid.
    pub fn axis(&self) -> &BlockGrid1D {
        match self {
            Grid::One(g) => g,
            Grid::Two(g) => &g.axis,
            Grid::Three(g) => &g.axis,
        }
    }

    /// Total node count: `(2N)^d`.
    pub fn n_nodes(&self) -> usize {
        match self {
            Grid::One(g) => g.n_nodes(),
            Grid::Two(g) => g.n_nodes(),
            Grid::Three(g) => g.n_nodes(),
        }
    }

    /// Whether the grid is periodic on every axis.
    pub fn periodic(&self) -> bool {
        self.axis().periodic
    }
}

impl From<BlockGrid1D> for Grid {
    fn from(g: BlockGrid1D) -> Grid {
        Grid::One(g)
    }
}

impl From<BlockGrid2D> for Grid {
    fn from(g: BlockGrid2D) -> Grid {
        Grid::Two(g)
    }
}

impl From<BlockGrid3D> for Grid {
    fn from(g: BlockGrid3D) -> Grid {
        Grid::Three(g)
    }
}

/// Build a 1D block grid with `n_cells` cells on `(0, length)`.
///
/// Nodes sit at `x_j ∓ h/4` with cell centers `x_j = h(j-1) + h/2`,
/// `j = 1..=N`. Dirichlet (non-periodic) grids get a [`GhostLayer`].
pub fn build_grid_1d(n_cells: usize, length: f64, periodic: bool) -> Result<BlockGrid1D> {
    if n_cells < 3 {
        return Err(Error::InvalidSize(format!(
            "need at least 3 cells for the interior stencil, got {n_cells}"
        )));
    }
    if !length.is_finite() || length <= 0.0 {
        return Err(Error::InvalidDomain(format!(
            "domain length must be positive and finite, got {length}"
        )));
    }
    let h = length / n_cells as f64;
    let mut nodes = Vec::with_capacity(2 * n_cells);
    for j in 1..=n_cells {
        let center = h * (j as f64 - 1.0) + 0.5 * h;
        nodes.push(center - 0.25 * h);
        nodes.push(center + 0.25 * h);
    }
    let ghosts = if periodic {
        None
    } else {
        Some(GhostLayer {
            left: [-0.25 * h, -0.75 * h],
            right: [length + 0.25 * h, length + 0.75 * h],
        })
    };
    Ok(BlockGrid1D {
        n_cells,
        length,
        h,
        nodes,
        periodic,
        ghosts,
    })
}

/// Build a 2D tensor-product grid (same cell count and length per axis).
pub fn build_grid_2d(n_cells: usize, length: f64, periodic: bool) -> Result<BlockGrid2D> {
    Ok(BlockGrid2D {
        axis: build_grid_1d(n_cells, length, periodic)?,
    })
}

/// Build a 3D tensor-product grid (same cell count and length per axis).
pub fn build_grid_3d(n_cells: usize, length: f64, periodic: bool) -> Result<BlockGrid3D> {
    Ok(BlockGrid3D {
        axis: build_grid_1d(n_cells, length, periodic)?,
    })
}
