//! Sampled vertical and radial graphs, their finite difference geometry,
//! triangulations and weighted integrals.

mod geometry;
mod graph;
mod grid;
mod integrals;
pub mod io;
mod mesh;

pub use geometry::{geometry_radial, geometry_vertical, trapezoid_weights, GeometryField, GraphKind, LocalGeometry};
pub use graph::{sphere_chart, RadialGraph, VerticalGraph, MIN_NODES};
pub use grid::Grid;
pub use integrals::{adaptive_simpson, weighted_area, weighted_volume_between, COLUMN_TOL};
pub use mesh::{simplex_measure, triangulate_grid, TriMesh};

use crate::error::Result;

pub fn triangulate_vertical(graph: &VerticalGraph) -> Result<TriMesh> {
    triangulate_grid(&graph.grid, graph.points())
}

pub fn triangulate_radial(graph: &RadialGraph) -> Result<TriMesh> {
    triangulate_grid(&graph.grid, graph.points())
}

/// Either kind of sampled graph.
#[derive(Clone, Debug)]
pub enum Surface {
    Vertical(VerticalGraph),
    Radial(RadialGraph),
}

impl Surface {
    pub fn grid(&self) -> &Grid {
        match self {
            Surface::Vertical(g) => &g.grid,
            Surface::Radial(g) => &g.grid,
        }
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    pub fn geometry(&self, density: &crate::density::Density) -> Result<GeometryField> {
        match self {
            Surface::Vertical(g) => geometry_vertical(g, density),
            Surface::Radial(g) => geometry_radial(g, density),
        }
    }

    pub fn triangulate(&self) -> Result<TriMesh> {
        match self {
            Surface::Vertical(g) => triangulate_vertical(g),
            Surface::Radial(g) => triangulate_radial(g),
        }
    }

    /// Nodal values of the graph function (heights or radii).
    pub fn values(&self) -> &[f64] {
        match self {
            Surface::Vertical(g) => &g.heights,
            Surface::Radial(g) => &g.radii,
        }
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Surface> {
        Ok(match self {
            Surface::Vertical(g) => Surface::Vertical(g.with_heights(values)?),
            Surface::Radial(g) => Surface::Radial(g.with_radii(values)?),
        })
    }
}
