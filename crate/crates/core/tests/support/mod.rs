//! Independent reference solve path used only by tests.
//!
//! Everything here re-derives the half-model mechanics from scratch with
//! deliberately different numerics and data layout than the library:
//! element matrices come from 3x3 Simpson quadrature instead of 2x2 Gauss,
//! matrices live in flat row-major `Vec<f64>`, and the linear system is
//! solved by Gaussian elimination with partial pivoting. Only the public
//! conventions (node numbering, boundary conditions, property definitions)
//! are shared, so agreement means the library's math, not its code, is
//! right.

pub const E_STIFF: f64 = 1.0;
pub const E_SOFT: f64 = 0.1;
pub const NU: f64 = 1.0 / 3.0;
pub const FAIL_STIFF: f64 = 0.1;
pub const FAIL_SOFT: f64 = 1.0;

/// dN/dxi and dN/deta for corner `n` (counter-clockwise from bottom-left)
/// at natural coordinates (xi, eta), written from the sign pattern of the
/// bilinear shape functions N_n = (1 + s_n xi)(1 + t_n eta)/4.
fn dshape(n: usize, xi: f64, eta: f64) -> (f64, f64) {
    let (s, t) = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)][n];
    (s * (1.0 + t * eta) / 4.0, t * (1.0 + s * xi) / 4.0)
}

fn d_matrix(e: f64) -> [[f64; 3]; 3] {
    let f = e / (1.0 - NU * NU);
    [
        [f, NU * f, 0.0],
        [NU * f, f, 0.0],
        [0.0, 0.0, f * (1.0 - NU) / 2.0],
    ]
}

fn b_rows(xi: f64, eta: f64, h: f64) -> [[f64; 8]; 3] {
    let mut b = [[0.0; 8]; 3];
    for n in 0..4 {
        let (dxi, deta) = dshape(n, xi, eta);
        let (dx, dy) = (dxi * 2.0 / h, deta * 2.0 / h);
        b[0][2 * n] = dx;
        b[1][2 * n + 1] = dy;
        b[2][2 * n] = dy;
        b[2][2 * n + 1] = dx;
    }
    b
}

/// Element stiffness by 3x3 Simpson quadrature over [-1,1]^2 (exact here:
/// the integrand is quadratic per coordinate, Simpson is exact to cubic).
/// Returned flat row-major 8x8.
pub fn ref_element_stiffness(e: f64, h: f64) -> Vec<f64> {
    let pts = [-1.0, 0.0, 1.0];
    let wts = [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0];
    let d = d_matrix(e);
    let det_j = h * h / 4.0;
    let mut k = vec![0.0; 64];
    for (pi, &xi) in pts.iter().enumerate() {
        for (pj, &eta) in pts.iter().enumerate() {
            let w = wts[pi] * wts[pj] * det_j;
            let b = b_rows(xi, eta, h);
            // k += w * B^T D B
            for i in 0..8 {
                for j in 0..8 {
                    let mut sum = 0.0;
                    for r in 0..3 {
                        for c in 0..3 {
                            sum += b[r][i] * d[r][c] * b[c][j];
                        }
                    }
                    k[i * 8 + j] += w * sum;
                }
            }
        }
    }
    k
}

struct RefMesh {
    nx: usize,
    ny: usize,
    h: f64,
}

impl RefMesh {
    fn node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    fn element_dofs(&self, r: usize, c: usize) -> [usize; 8] {
        let nodes = [
            self.node(c, r),
            self.node(c + 1, r),
            self.node(c + 1, r + 1),
            self.node(c, r + 1),
        ];
        let mut dofs = [0; 8];
        for (n, nd) in nodes.into_iter().enumerate() {
            dofs[2 * n] = 2 * nd;
            dofs[2 * n + 1] = 2 * nd + 1;
        }
        dofs
    }
}

fn assemble(mesh: &RefMesh, bits: &[bool]) -> Vec<f64> {
    let ndof = 2 * (mesh.nx + 1) * (mesh.ny + 1);
    let k_stiff = ref_element_stiffness(E_STIFF, mesh.h);
    let k_soft = ref_element_stiffness(E_SOFT, mesh.h);
    let mut k = vec![0.0; ndof * ndof];
    for r in 0..mesh.ny {
        for c in 0..mesh.nx {
            let ke = if bits[r * mesh.nx + c] { &k_soft } else { &k_stiff };
            let dofs = mesh.element_dofs(r, c);
            for a in 0..8 {
                for b in 0..8 {
                    k[dofs[a] * ndof + dofs[b]] += ke[a * 8 + b];
                }
            }
        }
    }
    k
}

/// Gaussian elimination with partial pivoting on a dense row-major system.
fn gauss_solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| {
                a[p * n + col]
                    .abs()
                    .partial_cmp(&a[q * n + col].abs())
                    .unwrap()
            })
            .unwrap();
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        assert!(diag.abs() > 1e-300, "reference system singular");
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut sum = b[row];
        for j in row + 1..n {
            sum -= a[row * n + j] * x[j];
        }
        x[row] = sum / a[row * n + row];
    }
    x
}

/// Solves the cracked half model and returns the full displacement vector.
/// `bits` is the genome (row-major from the symmetry line, 1 = soft);
/// `delta` the prescribed top-edge vertical displacement.
pub fn ref_solve(nx: usize, ny: usize, crack: usize, bits: &[bool], delta: f64) -> Vec<f64> {
    let mesh = RefMesh {
        nx,
        ny,
        h: 1.0 / nx as f64,
    };
    let ndof = 2 * (nx + 1) * (ny + 1);
    let k = assemble(&mesh, bits);

    let mut value = vec![f64::NAN; ndof];
    value[2 * mesh.node(crack, 0)] = 0.0;
    for i in crack..=nx {
        value[2 * mesh.node(i, 0) + 1] = 0.0;
    }
    for i in 0..=nx {
        value[2 * mesh.node(i, ny) + 1] = delta;
    }

    let free: Vec<usize> = (0..ndof).filter(|&d| value[d].is_nan()).collect();
    let nf = free.len();
    let mut kff = vec![0.0; nf * nf];
    let mut rhs = vec![0.0; nf];
    for (a, &da) in free.iter().enumerate() {
        for (b, &db) in free.iter().enumerate() {
            kff[a * nf + b] = k[da * ndof + db];
        }
        let mut load = 0.0;
        for dc in 0..ndof {
            if !value[dc].is_nan() {
                load -= k[da * ndof + dc] * value[dc];
            }
        }
        rhs[a] = load;
    }
    let uf = gauss_solve(kff, rhs);

    let mut u = vec![0.0; ndof];
    for (a, &da) in free.iter().enumerate() {
        u[da] = uf[a];
    }
    for d in 0..ndof {
        if !value[d].is_nan() {
            u[d] = value[d];
        }
    }
    u
}

/// Labels a genome through the reference path: (modulus, strength,
/// toughness) at unit nominal strain.
pub fn ref_properties(nx: usize, ny: usize, crack: usize, bits: &[bool]) -> [f64; 3] {
    let mesh = RefMesh {
        nx,
        ny,
        h: 1.0 / nx as f64,
    };
    let ndof = 2 * (nx + 1) * (ny + 1);
    let delta = 0.5;
    let u = ref_solve(nx, ny, crack, bits, delta);
    let k = assemble(&mesh, bits);

    let mut top = 0.0;
    for i in 0..=nx {
        let dof = 2 * mesh.node(i, ny) + 1;
        let mut r = 0.0;
        for d in 0..ndof {
            r += k[dof * ndof + d] * u[d];
        }
        top += r;
    }
    let modulus = top; // width 1, unit nominal strain

    let tip_soft = bits[crack];
    let e = if tip_soft { E_SOFT } else { E_STIFF };
    let fail = if tip_soft { FAIL_SOFT } else { FAIL_STIFF };
    let d = d_matrix(e);
    let dofs = mesh.element_dofs(0, crack);
    let ue: Vec<f64> = dofs.iter().map(|&dof| u[dof]).collect();

    let g = 1.0 / 3.0_f64.sqrt();
    let mut avg = [0.0; 4]; // e11, e22, e12 tensorial, e33
    for (xi, eta) in [(-g, -g), (g, -g), (g, g), (-g, g)] {
        let b = b_rows(xi, eta, mesh.h);
        let mut eps = [0.0; 3];
        for (r, row) in b.iter().enumerate() {
            eps[r] = row.iter().zip(&ue).map(|(bi, ui)| bi * ui).sum();
        }
        let sig: Vec<f64> = (0..3)
            .map(|r| (0..3).map(|c| d[r][c] * eps[c]).sum())
            .collect();
        avg[0] += eps[0];
        avg[1] += eps[1];
        avg[2] += eps[2] / 2.0;
        avg[3] += -(NU / e) * (sig[0] + sig[1]);
    }
    for a in &mut avg {
        *a /= 4.0;
    }
    let vm = (2.0 / 3.0)
        * (1.5 * (avg[0] * avg[0] + avg[1] * avg[1] + avg[3] * avg[3]) + 0.75 * avg[2] * avg[2])
            .sqrt();
    let s = fail / vm;
    let strength = modulus * s;
    [modulus, strength, 0.5 * strength * s]
}
