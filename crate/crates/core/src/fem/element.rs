//! Four-node bilinear quadrilateral under plane stress: stiffness
//! integration (2x2 Gauss) and strain/stress recovery at quadrature points.
//!
//! Element-local node order is counter-clockwise from the bottom-left
//! corner; the 8 element DOFs interleave as [u1x, u1y, ..., u4x, u4y].
//! Strain vectors in matrix form use engineering shear [e11, e22, gamma12];
//! recovered states carry the tensorial e12 = gamma12/2 instead, which is
//! what the failure criterion consumes.

use nalgebra::{SMatrix, SVector};

use crate::material::ElasticMaterial;

/// The four 2x2 Gauss points in element order (matching local node order).
pub fn gauss_points() -> [(f64, f64); 4] {
    let g = 1.0 / 3.0_f64.sqrt();
    [(-g, -g), (g, -g), (g, g), (-g, g)]
}

/// Shape-function derivatives wrt the natural coordinates at `(xi, eta)`:
/// `(dN/dxi, dN/deta)` for the four nodes.
fn shape_derivatives(xi: f64, eta: f64) -> ([f64; 4], [f64; 4]) {
    (
        [
            -(1.0 - eta) / 4.0,
            (1.0 - eta) / 4.0,
            (1.0 + eta) / 4.0,
            -(1.0 + eta) / 4.0,
        ],
        [
            -(1.0 - xi) / 4.0,
            -(1.0 + xi) / 4.0,
            (1.0 + xi) / 4.0,
            (1.0 - xi) / 4.0,
        ],
    )
}

/// Strain-displacement matrix for a square element of side `element_size`
/// at natural coordinates `(xi, eta)`. Rows: e11, e22, gamma12.
pub fn b_matrix(xi: f64, eta: f64, element_size: f64) -> SMatrix<f64, 3, 8> {
    let (dxi, deta) = shape_derivatives(xi, eta);
    // Square element: x = x0 + h(1+xi)/2, so d/dx = (2/h) d/dxi.
    let scale = 2.0 / element_size;
    let mut b = SMatrix::<f64, 3, 8>::zeros();
    for n in 0..4 {
        let dx = dxi[n] * scale;
        let dy = deta[n] * scale;
        b[(0, 2 * n)] = dx;
        b[(1, 2 * n + 1)] = dy;
        b[(2, 2 * n)] = dy;
        b[(2, 2 * n + 1)] = dx;
    }
    b
}

/// Plane-stress constitutive matrix D = E/(1-nu^2) [[1, nu, 0], [nu, 1, 0],
/// [0, 0, (1-nu)/2]] relating [e11, e22, gamma12] to [s11, s22, s12].
pub fn plane_stress_d(material: &ElasticMaterial) -> SMatrix<f64, 3, 3> {
    let nu = material.poisson_ratio();
    let f = material.youngs_modulus() / (1.0 - nu * nu);
    SMatrix::<f64, 3, 3>::new(
        f,
        nu * f,
        0.0,
        nu * f,
        f,
        0.0,
        0.0,
        0.0,
        f * (1.0 - nu) / 2.0,
    )
}

/// Element stiffness integral of Bt D B over the square element with 2x2
/// Gauss quadrature (exact for the bilinear quad). Independent of
/// `element_size` for a square element; the parameter stays in the signature
/// because the Jacobian cancellation is a property of this geometry, not of
/// the formulation.
pub fn element_stiffness(material: &ElasticMaterial, element_size: f64) -> SMatrix<f64, 8, 8> {
    let d = plane_stress_d(material);
    let det_j = element_size * element_size / 4.0;
    let mut k = SMatrix::<f64, 8, 8>::zeros();
    for (xi, eta) in gauss_points() {
        let b = b_matrix(xi, eta, element_size);
        k += b.transpose() * d * b * det_j;
    }
    k
}

/// Strain and stress at one quadrature point. `strain` holds
/// [e11, e22, e12 (tensorial), e33]; `stress` holds [s11, s22, s12].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePointState {
    pub strain: [f64; 4],
    pub stress: [f64; 3],
}

/// Recovered state of one element at its four quadrature points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementState {
    pub points: [QuadraturePointState; 4],
}

impl ElementState {
    /// Strain components averaged over the four quadrature points, in the
    /// same [e11, e22, e12, e33] order.
    pub fn averaged_strain(&self) -> [f64; 4] {
        let mut avg = [0.0; 4];
        for p in &self.points {
            for (a, s) in avg.iter_mut().zip(p.strain) {
                *a += s;
            }
        }
        avg.map(|v| v / 4.0)
    }
}

/// Recovers the element state from its nodal displacements. The
/// out-of-plane strain comes from the plane-stress relation
/// e33 = -(nu/E)(s11 + s22).
pub fn element_state(
    material: &ElasticMaterial,
    element_size: f64,
    displacements: &[f64; 8],
) -> ElementState {
    let d = plane_stress_d(material);
    let u = SVector::<f64, 8>::from_column_slice(displacements);
    let nu = material.poisson_ratio();
    let e = material.youngs_modulus();
    let points = gauss_points().map(|(xi, eta)| {
        let eps = b_matrix(xi, eta, element_size) * u; // [e11, e22, gamma12]
        let sig = d * eps;
        let e33 = -(nu / e) * (sig[0] + sig[1]);
        QuadraturePointState {
            strain: [eps[0], eps[1], eps[2] / 2.0, e33],
            stress: [sig[0], sig[1], sig[2]],
        }
    });
    ElementState { points }
}

/// Von Mises strain of an element: quadrature-point-averaged strain
/// components fed through the failure-criterion formula.
pub fn von_mises_strain(state: &ElementState) -> f64 {
    let [e11, e22, e12, e33] = state.averaged_strain();
    von_mises_from_components(e11, e22, e33, e12)
}

/// The von Mises strain formula applied verbatim to the given components
/// (`e12` tensorial): (2/3) * sqrt( (3/2)(e11^2+e22^2+e33^2) + (3/4) e12^2 ).
pub fn von_mises_from_components(e11: f64, e22: f64, e33: f64, e12: f64) -> f64 {
    (2.0 / 3.0) * (1.5 * (e11 * e11 + e22 * e22 + e33 * e33) + 0.75 * e12 * e12).sqrt()
}
