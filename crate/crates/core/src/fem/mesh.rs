//! Structured mesh of the cracked half model.
//!
//! The solved domain is the upper half of a unit square plate: `nx` by `ny`
//! square elements on [0, 1] x [0, 0.5] with `nx = 2 ny`. Node `(i, j)` sits
//! at `(i h, j h)` and gets index `j (nx+1) + i`; its DOFs are `2 idx`
//! (horizontal) and `2 idx + 1` (vertical). Element `(r, c)` spans column
//! `c`, row `r`, with corner nodes counter-clockwise from bottom-left.
//!
//! The crack runs along the symmetry line from the left edge over the first
//! `crack_elements` element edges. Bottom nodes ahead of the crack (the
//! ligament) get the symmetry condition `u_y = 0`; the crack faces stay
//! free; the top edge is pulled to the applied displacement with horizontal
//! motion left free, and the crack-tip node is pinned horizontally to remove
//! the remaining rigid-body mode.

use crate::grid::Grid;

use super::FemError;

/// Geometry, numbering, and boundary conditions of the half model.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfModelMesh {
    grid: Grid,
    crack_elements: usize,
}

impl HalfModelMesh {
    /// Mesh with the standard edge crack over a quarter of the width.
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            crack_elements: grid.crack_elements(),
        }
    }

    /// Mesh with an explicit crack length in element edges. Zero gives the
    /// uncracked validation configuration; the crack must leave at least one
    /// bonded element on the symmetry line.
    pub fn with_crack_elements(grid: Grid, crack_elements: usize) -> Result<Self, FemError> {
        if crack_elements >= grid.width() {
            return Err(FemError::InvalidCrack {
                crack: crack_elements,
                nx: grid.width(),
            });
        }
        Ok(Self {
            grid,
            crack_elements,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn nx(&self) -> usize {
        self.grid.width()
    }

    pub fn ny(&self) -> usize {
        self.grid.height()
    }

    pub fn element_size(&self) -> f64 {
        1.0 / self.nx() as f64
    }

    pub fn crack_elements(&self) -> usize {
        self.crack_elements
    }

    pub fn node_count(&self) -> usize {
        (self.nx() + 1) * (self.ny() + 1)
    }

    pub fn dof_count(&self) -> usize {
        2 * self.node_count()
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.nx() && j <= self.ny());
        j * (self.nx() + 1) + i
    }

    pub fn node_coords(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.element_size();
        (i as f64 * h, j as f64 * h)
    }

    /// Corner nodes of element `(row, col)`, counter-clockwise from
    /// bottom-left.
    pub fn element_nodes(&self, row: usize, col: usize) -> [usize; 4] {
        debug_assert!(row < self.ny() && col < self.nx());
        [
            self.node_index(col, row),
            self.node_index(col + 1, row),
            self.node_index(col + 1, row + 1),
            self.node_index(col, row + 1),
        ]
    }

    /// The 8 global DOFs of element `(row, col)` in element-local order.
    pub fn element_dofs(&self, row: usize, col: usize) -> [usize; 8] {
        let nodes = self.element_nodes(row, col);
        let mut dofs = [0usize; 8];
        for (n, node) in nodes.into_iter().enumerate() {
            dofs[2 * n] = 2 * node;
            dofs[2 * n + 1] = 2 * node + 1;
        }
        dofs
    }

    /// The crack-tip ligament element `(row, col)`: first bonded element on
    /// the symmetry line.
    pub fn crack_tip_element(&self) -> (usize, usize) {
        (0, self.crack_elements)
    }

    /// Prescribed DOFs and values for an applied top-edge displacement,
    /// sorted by DOF index: ligament symmetry (u_y = 0 for bottom nodes at
    /// and past the crack tip), the horizontal pin at the crack-tip node,
    /// and the top edge (u_y = applied).
    pub fn prescribed_dofs(&self, applied_displacement: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        out.push((2 * self.node_index(self.crack_elements, 0), 0.0));
        for i in self.crack_elements..=self.nx() {
            out.push((2 * self.node_index(i, 0) + 1, 0.0));
        }
        for i in 0..=self.nx() {
            out.push((2 * self.node_index(i, self.ny()) + 1, applied_displacement));
        }
        out.sort_unstable_by_key(|&(dof, _)| dof);
        out
    }

    /// Vertical DOFs of the loaded top edge.
    pub fn top_y_dofs(&self) -> Vec<usize> {
        (0..=self.nx())
            .map(|i| 2 * self.node_index(i, self.ny()) + 1)
            .collect()
    }

    /// Vertical DOFs of the bonded ligament on the symmetry line.
    pub fn ligament_y_dofs(&self) -> Vec<usize> {
        (self.crack_elements..=self.nx())
            .map(|i| 2 * self.node_index(i, 0) + 1)
            .collect()
    }
}
