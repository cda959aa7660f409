//! The space-stochastic coefficient tensor: storage layout, evaluation,
//! projection of initial data and the Galerkin flux projection.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::euler::{self, ConservedState, Direction, GasModel};
use crate::mesh::Mesh;
use crate::quadrature::{
    gauss_legendre_rule, gauss_lobatto_rule, scheme_lobatto_points, QuadratureKind, QuadratureRule,
};
use crate::stochastic::{
    complete_index_set, tensor_index_set, MultiElementGrid, MultiIndexSet, OrthonormalBasis,
    OrthonormalBasis1d,
};

pub const N_COMP: usize = 4;

/// Quadrature point counts used by the scheme. Zeros select the defaults
/// derived from the polynomial orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// In-cell Gauss-Lobatto points per flux direction.
    pub lobatto_points: usize,
    /// Gauss-Legendre points on faces and transverse to the flux direction.
    pub face_points: usize,
    /// Stochastic quadrature points per random dimension and element.
    pub stoch_points: usize,
    pub stoch_kind: QuadratureKind,
    /// Points per dimension of the statistics/norm grid in every cell.
    pub output_points: usize,
}

impl QuadratureConfig {
    pub fn auto() -> Self {
        Self {
            lobatto_points: 0,
            face_points: 0,
            stoch_points: 0,
            stoch_kind: QuadratureKind::GaussLegendre,
            output_points: 15,
        }
    }

    fn resolve(self, k_d: usize, k_gamma: usize) -> Self {
        Self {
            lobatto_points: if self.lobatto_points == 0 {
                scheme_lobatto_points(k_d)
            } else {
                self.lobatto_points.max(2)
            },
            face_points: if self.face_points == 0 {
                k_d + 1
            } else {
                self.face_points
            },
            stoch_points: if self.stoch_points == 0 {
                ((k_gamma + 1).div_ceil(2) + 1).max(k_gamma + 1)
            } else {
                self.stoch_points
            },
            stoch_kind: self.stoch_kind,
            output_points: self.output_points.max(1),
        }
    }
}

/// Cached basis values at every quadrature grid the scheme touches.
#[derive(Debug, Clone)]
pub struct EvaluationTables {
    pub lobatto: QuadratureRule,
    pub face_leg: QuadratureRule,
    /// Spatial 1D basis values [mode][node].
    pub phi_lob: Vec<Vec<f64>>,
    pub dphi_lob: Vec<Vec<f64>>,
    pub phi_face: Vec<Vec<f64>>,
    /// Basis traces at the reference endpoints r = 0 and r = 1.
    pub phi_edge: [Vec<f64>; 2],
    /// Tensor stochastic nodes in reference coordinates [node][dim].
    pub stoch_ref_nodes: Vec<Vec<f64>>,
    pub stoch_weights: Vec<f64>,
    /// Multivariate stochastic basis values [mode][node]; shared by all
    /// elements because the uniform partition makes them congruent.
    pub phi_st: Vec<Vec<f64>>,
    /// Physical random coordinates [element][node][dim].
    pub xi_phys: Vec<Vec<Vec<f64>>>,
    pub output: QuadratureRule,
    pub phi_out: Vec<Vec<f64>>,
    /// Exact spatial projection rule (Gauss-Legendre, K_D + 1 points).
    pub proj: QuadratureRule,
    pub phi_proj: Vec<Vec<f64>>,
}

fn tabulate(basis: &OrthonormalBasis1d, nodes: &[f64], n_modes: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; nodes.len()]; n_modes];
    let mut buf = vec![0.0; n_modes];
    for (j, &r) in nodes.iter().enumerate() {
        basis.eval_all(r, &mut buf);
        for m in 0..n_modes {
            out[m][j] = buf[m];
        }
    }
    out
}

fn tabulate_derivative(basis: &OrthonormalBasis1d, nodes: &[f64], n_modes: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; nodes.len()]; n_modes];
    let mut buf = vec![0.0; n_modes];
    for (j, &r) in nodes.iter().enumerate() {
        basis.eval_all_derivative(r, &mut buf);
        for m in 0..n_modes {
            out[m][j] = buf[m];
        }
    }
    out
}

/// Full discretization descriptor shared by all fields of one run.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub gas: GasModel,
    pub me_grid: MultiElementGrid,
    pub spatial_order: usize,
    pub stoch_order: usize,
    pub spatial_modes: MultiIndexSet,
    pub stoch_modes: MultiIndexSet,
    pub spatial_basis: OrthonormalBasis1d,
    pub stoch_basis: OrthonormalBasis,
    pub quad: QuadratureConfig,
    pub tables: EvaluationTables,
}

impl Discretization {
    pub fn new(
        mesh: Mesh,
        gas: GasModel,
        me_grid: MultiElementGrid,
        spatial_order: usize,
        stoch_order: usize,
        quad: QuadratureConfig,
    ) -> Result<Arc<Self>> {
        let quad = quad.resolve(spatial_order, stoch_order);
        let n_random = me_grid.space.dims();
        let spatial_modes = tensor_index_set(mesh.dim, spatial_order);
        let stoch_modes = complete_index_set(n_random, stoch_order);
        let spatial_basis = OrthonormalBasis1d::uniform(spatial_order);
        let stoch_basis = OrthonormalBasis {
            modes: stoch_modes.clone(),
            basis1d: OrthonormalBasis1d::uniform(stoch_order),
        };

        let lobatto = gauss_lobatto_rule(quad.lobatto_points)?;
        let face_leg = gauss_legendre_rule(quad.face_points)?;
        let stoch_1d = match quad.stoch_kind {
            QuadratureKind::GaussLegendre => gauss_legendre_rule(quad.stoch_points)?,
            QuadratureKind::GaussLobatto => gauss_lobatto_rule(quad.stoch_points.max(2))?,
        };
        let output = gauss_legendre_rule(quad.output_points)?;
        let proj = gauss_legendre_rule(spatial_order + 1)?;

        let n_sp = spatial_order + 1;
        let phi_lob = tabulate(&spatial_basis, &lobatto.nodes, n_sp);
        let dphi_lob = tabulate_derivative(&spatial_basis, &lobatto.nodes, n_sp);
        let phi_face = tabulate(&spatial_basis, &face_leg.nodes, n_sp);
        let phi_edge = [
            tabulate(&spatial_basis, &[0.0], n_sp)
                .into_iter()
                .map(|v| v[0])
                .collect(),
            tabulate(&spatial_basis, &[1.0], n_sp)
                .into_iter()
                .map(|v| v[0])
                .collect(),
        ];
        let phi_out = tabulate(&spatial_basis, &output.nodes, n_sp);
        let phi_proj = tabulate(&spatial_basis, &proj.nodes, n_sp);

        // Tensor stochastic nodes, last dimension fastest.
        let q = stoch_1d.len();
        let n_nodes = q.pow(n_random as u32);
        let mut stoch_ref_nodes = Vec::with_capacity(n_nodes);
        let mut stoch_weights = Vec::with_capacity(n_nodes);
        for flat in 0..n_nodes {
            let mut rest = flat;
            let mut node = vec![0.0; n_random];
            let mut w = 1.0;
            for d in (0..n_random).rev() {
                let k = rest % q;
                rest /= q;
                node[d] = stoch_1d.nodes[k];
                w *= stoch_1d.weights[k];
            }
            stoch_ref_nodes.push(node);
            stoch_weights.push(w);
        }
        let mut phi_st = vec![vec![0.0; n_nodes]; stoch_modes.len()];
        let mut buf = vec![0.0; stoch_modes.len()];
        for (j, node) in stoch_ref_nodes.iter().enumerate() {
            stoch_basis.eval_modes(node, &mut buf);
            for k in 0..stoch_modes.len() {
                phi_st[k][j] = buf[k];
            }
        }
        let xi_phys = me_grid
            .elements()
            .iter()
            .map(|el| {
                stoch_ref_nodes
                    .iter()
                    .map(|r| el.from_reference(r))
                    .collect()
            })
            .collect();

        Ok(Arc::new(Self {
            mesh,
            gas,
            me_grid,
            spatial_order,
            stoch_order,
            spatial_modes,
            stoch_modes,
            spatial_basis,
            stoch_basis,
            quad,
            tables: EvaluationTables {
                lobatto,
                face_leg,
                phi_lob,
                dphi_lob,
                phi_face,
                phi_edge,
                stoch_ref_nodes,
                stoch_weights,
                phi_st,
                xi_phys,
                output,
                phi_out,
                proj,
                phi_proj,
            },
        }))
    }

    pub fn n_spatial_modes(&self) -> usize {
        self.spatial_modes.len()
    }

    pub fn n_stoch_modes(&self) -> usize {
        self.stoch_modes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.me_grid.n_elements()
    }

    pub fn n_stoch_nodes(&self) -> usize {
        self.tables.stoch_ref_nodes.len()
    }

    pub fn block_len(&self) -> usize {
        self.n_spatial_modes() * self.n_stoch_modes() * N_COMP
    }

    /// First weight of the in-cell Lobatto rule; enters the CFL condition.
    pub fn lobatto_first_weight(&self) -> f64 {
        self.tables.lobatto.weights[0]
    }

    /// Spatial basis value of tensor mode `m` at reference point.
    pub fn spatial_mode_value(&self, m: usize, rx: f64, ry: f64) -> f64 {
        let idx = self.spatial_modes.index(m);
        let mut buf = vec![0.0; self.spatial_order + 1];
        self.spatial_basis.eval_all(rx, &mut buf);
        let mut v = buf[idx[0]];
        if self.mesh.dim == 2 {
            self.spatial_basis.eval_all(ry, &mut buf);
            v *= buf[idx[1]];
        }
        v
    }
}

/// Initial data, either a pointwise function or a piecewise-constant state
/// pair separated by an interface x = position(y, xi). The interface form
/// admits an exact-in-x projection, which keeps the projected coefficients
/// of discontinuous data accurate to quadrature precision in xi.
#[derive(Clone)]
pub enum InitialData {
    Smooth(Arc<dyn Fn(f64, f64, &[f64]) -> ConservedState + Send + Sync>),
    Interface {
        left: Arc<dyn Fn(&[f64]) -> ConservedState + Send + Sync>,
        right: Arc<dyn Fn(&[f64]) -> ConservedState + Send + Sync>,
        position: Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>,
    },
}

impl InitialData {
    pub fn eval(&self, x: f64, y: f64, xi: &[f64]) -> ConservedState {
        match self {
            InitialData::Smooth(f) => f(x, y, xi),
            InitialData::Interface {
                left,
                right,
                position,
            } => {
                if x < position(y, xi) {
                    left(xi)
                } else {
                    right(xi)
                }
            }
        }
    }
}

/// Coefficient tensor u_{m,kappa} for every cell and random element.
/// Layout: [cell][element][spatial mode][stochastic mode][component].
#[derive(Debug, Clone)]
pub struct SgDgField {
    pub disc: Arc<Discretization>,
    pub data: Vec<f64>,
}

impl SgDgField {
    pub fn zeros(disc: Arc<Discretization>) -> Self {
        let len = disc.mesh.n_cells() * disc.n_elements() * disc.block_len();
        Self {
            disc,
            data: vec![0.0; len],
        }
    }

    pub fn block_index(&self, cell: usize, element: usize) -> usize {
        (cell * self.disc.n_elements() + element) * self.disc.block_len()
    }

    pub fn block(&self, cell: usize, element: usize) -> &[f64] {
        let start = self.block_index(cell, element);
        &self.data[start..start + self.disc.block_len()]
    }

    pub fn block_mut(&mut self, cell: usize, element: usize) -> &mut [f64] {
        let start = self.block_index(cell, element);
        let len = self.disc.block_len();
        &mut self.data[start..start + len]
    }

    pub fn coeff(&self, cell: usize, element: usize, m: usize, kappa: usize) -> ConservedState {
        let nk = self.disc.n_stoch_modes();
        let b = self.block(cell, element);
        let o = (m * nk + kappa) * N_COMP;
        ConservedState::new(b[o], b[o + 1], b[o + 2], b[o + 3])
    }

    pub fn set_coeff(
        &mut self,
        cell: usize,
        element: usize,
        m: usize,
        kappa: usize,
        value: ConservedState,
    ) {
        let nk = self.disc.n_stoch_modes();
        let o = (m * nk + kappa) * N_COMP;
        let b = self.block_mut(cell, element);
        b[o..o + 4].copy_from_slice(&value.as_array());
    }

    /// The joint spatial-stochastic cell mean; with orthonormal bases and
    /// unit-sum weights this is exactly the (0, 0) coefficient.
    pub fn cell_mean(&self, cell: usize, element: usize) -> ConservedState {
        let b = self.block(cell, element);
        ConservedState::new(b[0], b[1], b[2], b[3])
    }

    /// Evaluate the local polynomial at reference coordinates.
    pub fn evaluate(
        &self,
        cell: usize,
        element: usize,
        spatial_ref: &[f64],
        xi_ref: &[f64],
    ) -> Result<ConservedState> {
        let disc = &self.disc;
        if cell >= disc.mesh.n_cells() {
            return Err(Error::IndexOutOfRange {
                what: "cell",
                got: cell,
                limit: disc.mesh.n_cells(),
            });
        }
        if element >= disc.n_elements() {
            return Err(Error::IndexOutOfRange {
                what: "element",
                got: element,
                limit: disc.n_elements(),
            });
        }
        let n_sp = disc.spatial_order + 1;
        let mut bx = vec![0.0; n_sp];
        let mut by = vec![0.0; n_sp];
        disc.spatial_basis.eval_all(spatial_ref[0], &mut bx);
        if disc.mesh.dim == 2 {
            disc.spatial_basis.eval_all(spatial_ref[1], &mut by);
        }
        let mut phi_k = vec![0.0; disc.n_stoch_modes()];
        disc.stoch_basis.eval_modes(xi_ref, &mut phi_k);

        let b = self.block(cell, element);
        let nk = disc.n_stoch_modes();
        let mut acc = [0.0; N_COMP];
        for (m, idx) in disc.spatial_modes.indices().iter().enumerate() {
            let mut phi_m = bx[idx[0]];
            if disc.mesh.dim == 2 {
                phi_m *= by[idx[1]];
            }
            let row = &b[m * nk * N_COMP..(m + 1) * nk * N_COMP];
            for (k, &pk) in phi_k.iter().enumerate() {
                let w = phi_m * pk;
                for c in 0..N_COMP {
                    acc[c] += w * row[k * N_COMP + c];
                }
            }
        }
        Ok(ConservedState::from_array(acc))
    }

    /// Stochastic coefficients c_kappa(x) of the local polynomial at a fixed
    /// spatial reference point; the statistics path consumes these.
    pub fn stoch_coefficients_at(
        &self,
        cell: usize,
        element: usize,
        phi_spatial: &[f64],
    ) -> Vec<[f64; 4]> {
        let disc = &self.disc;
        let nk = disc.n_stoch_modes();
        let b = self.block(cell, element);
        let mut out = vec![[0.0; 4]; nk];
        for (m, &pm) in phi_spatial.iter().enumerate() {
            let row = &b[m * nk * N_COMP..(m + 1) * nk * N_COMP];
            for k in 0..nk {
                for c in 0..N_COMP {
                    out[k][c] += pm * row[k * N_COMP + c];
                }
            }
        }
        out
    }

    /// Galerkin projection of the physical flux onto the local basis,
    /// using quadrature that is exact when the flux is linear in the state.
    pub fn galerkin_flux_moments(
        &self,
        cell: usize,
        element: usize,
        dir: Direction,
    ) -> Result<Vec<[f64; 4]>> {
        let disc = &self.disc;
        let gas = disc.gas;
        let t = &disc.tables;
        let nm = disc.n_spatial_modes();
        let nk = disc.n_stoch_modes();
        let mut moments = vec![[0.0; 4]; nm * nk];
        let spatial_nodes: Vec<(f64, f64, f64)> = if disc.mesh.dim == 1 {
            t.proj
                .nodes
                .iter()
                .zip(&t.proj.weights)
                .map(|(&r, &w)| (r, 0.0, w))
                .collect()
        } else {
            let mut v = Vec::new();
            for (rx, wx) in t.proj.nodes.iter().zip(&t.proj.weights) {
                for (ry, wy) in t.proj.nodes.iter().zip(&t.proj.weights) {
                    v.push((*rx, *ry, wx * wy));
                }
            }
            v
        };
        let mut node_id = 0usize;
        for (rho, (xi_ref, w_xi)) in t
            .stoch_ref_nodes
            .iter()
            .zip(&t.stoch_weights)
            .enumerate()
        {
            for &(rx, ry, w_sp) in &spatial_nodes {
                let u = self.evaluate(cell, element, &[rx, ry], xi_ref)?;
                if !euler::is_admissible(u, gas) {
                    return Err(Error::InadmissibleNode {
                        cell,
                        element,
                        node: node_id,
                        state: u,
                    });
                }
                let f = euler::flux(u, gas, dir)?;
                let w = w_sp * w_xi;
                for (m, midx) in disc.spatial_modes.indices().iter().enumerate() {
                    let mut phi_m = disc.spatial_basis.eval(midx[0], rx);
                    if disc.mesh.dim == 2 {
                        phi_m *= disc.spatial_basis.eval(midx[1], ry);
                    }
                    for k in 0..nk {
                        let weight = w * phi_m * t.phi_st[k][rho];
                        let slot = &mut moments[m * nk + k];
                        let fa = f.as_array();
                        for c in 0..N_COMP {
                            slot[c] += weight * fa[c];
                        }
                    }
                }
                node_id += 1;
            }
        }
        Ok(moments)
    }

    /// Maximum absolute coefficient; useful for diagnostics and tests.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
    }
}

/// Antiderivative of the shifted orthonormal Legendre basis on [0, 1]:
/// F_m(r) = integral of phi_m over [0, r].
fn basis_antiderivative(m: usize, r: f64, legendre_buf: &mut [f64]) -> f64 {
    if m == 0 {
        return r;
    }
    let t = 2.0 * r - 1.0;
    // legendre_buf holds P_0 .. P_{m+1} at t.
    legendre_buf[0] = 1.0;
    legendre_buf[1] = t;
    for k in 2..=m + 1 {
        let kf = k as f64;
        legendre_buf[k] =
            ((2.0 * kf - 1.0) * t * legendre_buf[k - 1] - (kf - 1.0) * legendre_buf[k - 2]) / kf;
    }
    (legendre_buf[m + 1] - legendre_buf[m - 1]) / (2.0 * (2.0 * m as f64 + 1.0).sqrt())
}

/// Roots of `f` inside [lo, hi], located by sign-change bracketing.
fn bracket_roots(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    const SAMPLES: usize = 64;
    let mut roots = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    for k in 1..=SAMPLES {
        let x = lo + (hi - lo) * (k as f64) / (SAMPLES as f64);
        let fx = f(x);
        if prev_f == 0.0 {
            roots.push(prev_x);
        } else if prev_f * fx < 0.0 {
            let (mut a, mut b) = (prev_x, x);
            let mut fa = prev_f;
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = fx;
    }
    roots
}

/// Project initial data onto the full coefficient tensor.
pub fn project_initial(disc: Arc<Discretization>, ic: &InitialData) -> Result<SgDgField> {
    let mut field = SgDgField::zeros(disc.clone());
    match ic {
        InitialData::Smooth(f) => project_smooth(&mut field, f.as_ref())?,
        InitialData::Interface {
            left,
            right,
            position,
        } => project_interface(&mut field, left.as_ref(), right.as_ref(), position.as_ref())?,
    }
    Ok(field)
}

fn project_smooth(
    field: &mut SgDgField,
    ic: &(dyn Fn(f64, f64, &[f64]) -> ConservedState + Send + Sync),
) -> Result<()> {
    let disc = field.disc.clone();
    let t = &disc.tables;
    let nm = disc.n_spatial_modes();
    let nk = disc.n_stoch_modes();
    let dim = disc.mesh.dim;

    // Tensor spatial projection nodes with basis values per mode.
    let mut spatial_nodes: Vec<(f64, f64, f64, Vec<f64>)> = Vec::new();
    for (ai, (&rx, &wx)) in t.proj.nodes.iter().zip(&t.proj.weights).enumerate() {
        if dim == 1 {
            let phis = (0..nm).map(|m| t.phi_proj[m][ai]).collect();
            spatial_nodes.push((rx, 0.5, wx, phis));
        } else {
            for (bi, (&ry, &wy)) in t.proj.nodes.iter().zip(&t.proj.weights).enumerate() {
                let phis = disc
                    .spatial_modes
                    .indices()
                    .iter()
                    .map(|idx| t.phi_proj[idx[0]][ai] * t.phi_proj[idx[1]][bi])
                    .collect();
                spatial_nodes.push((rx, ry, wx * wy, phis));
            }
        }
    }

    for cell in 0..disc.mesh.n_cells() {
        let (i, j) = disc.mesh.cell_coords(cell);
        for element in 0..disc.n_elements() {
            let block = field.block_mut(cell, element);
            for (rho, w_xi) in t.stoch_weights.iter().enumerate() {
                let xi = &t.xi_phys[element][rho];
                for (rx, ry, w_sp, phis) in &spatial_nodes {
                    let (x, y) = disc.mesh.to_physical(i, j, *rx, *ry);
                    let u = ic(x, y, xi);
                    if !u.is_finite() {
                        return Err(Error::NonFiniteInitialData {
                            x,
                            y,
                            xi: xi.clone(),
                        });
                    }
                    let ua = u.as_array();
                    let w = w_sp * w_xi;
                    for (m, &phi_m) in phis.iter().enumerate() {
                        for k in 0..nk {
                            let weight = w * phi_m * t.phi_st[k][rho];
                            let o = (m * nk + k) * N_COMP;
                            for c in 0..N_COMP {
                                block[o + c] += weight * ua[c];
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn project_interface(
    field: &mut SgDgField,
    left: &(dyn Fn(&[f64]) -> ConservedState + Send + Sync),
    right: &(dyn Fn(&[f64]) -> ConservedState + Send + Sync),
    position: &(dyn Fn(f64, &[f64]) -> f64 + Send + Sync),
) -> Result<()> {
    let disc = field.disc.clone();
    if disc.me_grid.space.dims() != 1 {
        return Err(Error::Scenario(
            "interface initial data requires exactly one random dimension".into(),
        ));
    }
    let nk = disc.n_stoch_modes();
    let n_sp1 = disc.spatial_order + 1;
    let mesh = disc.mesh;
    let piece_rule = gauss_legendre_rule((disc.stoch_order + disc.spatial_order) / 2 + 8)?;
    let y_rule = gauss_legendre_rule(disc.spatial_order + 4)?;
    let mut leg_buf = vec![0.0; n_sp1 + 2];
    let mut phi_k = vec![0.0; nk];
    let mut phi_y = vec![0.0; n_sp1];

    // x-mode integrals of the two half-cell indicator functions.
    let mut left_int = vec![0.0; n_sp1];
    let mut right_int = vec![0.0; n_sp1];

    for cell in 0..mesh.n_cells() {
        let (i, j) = mesh.cell_coords(cell);
        let (x0, y0) = mesh.cell_origin(i, j);
        let x1 = x0 + mesh.dx;
        for element in 0..disc.n_elements() {
            let el = disc.me_grid.element(element).clone();
            let (xi_lo, xi_hi) = (el.lower[0], el.upper[0]);

            // Integrate over y (trivial in 1D), splitting in xi where the
            // interface enters or leaves the cell.
            let mut y_nodes: Vec<(f64, f64)> = Vec::new();
            if mesh.dim == 1 {
                y_nodes.push((0.5, 1.0));
            }

            let block = field.block_mut(cell, element);
            block.fill(0.0);

            // xi breakpoints where the interface crosses a cell x-boundary
            // for some y in the cell (only used to restore smoothness of the
            // xi-integrand in 1D; in 2D the y-split below handles it).
            let mut cuts = vec![xi_lo];
            if mesh.dim == 1 {
                for xb in [x0, x1] {
                    let f = |xi: f64| position(0.0, &[xi]) - xb;
                    for r in bracket_roots(&f, xi_lo, xi_hi) {
                        cuts.push(r);
                    }
                }
            }
            cuts.push(xi_hi);
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * (xi_hi - xi_lo));

            for piece in cuts.windows(2) {
                let (a, b) = (piece[0], piece[1]);
                if b - a < 1e-14 * (xi_hi - xi_lo) {
                    continue;
                }
                let scale = (b - a) / (xi_hi - xi_lo);
                for (rq, wq) in piece_rule.nodes.iter().zip(&piece_rule.weights) {
                    let xi = a + (b - a) * rq;
                    let w_xi = wq * scale;
                    let r_el = el.to_reference(&[xi]);
                    disc.stoch_basis.eval_modes(&r_el, &mut phi_k);
                    let ul = left(&[xi]).as_array();
                    let ur = right(&[xi]).as_array();

                    // y nodes for this xi, split where the interface crosses
                    // the x-bounds as y varies.
                    if mesh.dim == 2 {
                        y_nodes.clear();
                        let y1 = y0 + mesh.dy;
                        let mut ycuts = vec![y0];
                        for xb in [x0, x1] {
                            let f = |y: f64| position(y, &[xi]) - xb;
                            for r in bracket_roots(&f, y0, y1) {
                                ycuts.push(r);
                            }
                        }
                        ycuts.push(y1);
                        ycuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
                        ycuts.dedup_by(|p, q| (*p - *q).abs() < 1e-13 * mesh.dy);
                        for yp in ycuts.windows(2) {
                            let ys = (yp[1] - yp[0]) / mesh.dy;
                            if ys < 1e-14 {
                                continue;
                            }
                            for (ry, wy) in y_rule.nodes.iter().zip(&y_rule.weights) {
                                let y = yp[0] + (yp[1] - yp[0]) * ry;
                                y_nodes.push(((y - y0) / mesh.dy, wy * ys));
                            }
                        }
                    }

                    for &(ry, wy) in &y_nodes {
                        let y_phys = y0 + ry * mesh.dy;
                        let pos = position(y_phys, &[xi]);
                        let r0 = ((pos - x0) / mesh.dx).clamp(0.0, 1.0);
                        for m1 in 0..n_sp1 {
                            let f_r0 = basis_antiderivative(m1, r0, &mut leg_buf);
                            let f_1 = basis_antiderivative(m1, 1.0, &mut leg_buf);
                            left_int[m1] = f_r0;
                            right_int[m1] = f_1 - f_r0;
                        }
                        if mesh.dim == 2 {
                            disc.spatial_basis.eval_all(ry, &mut phi_y);
                        } else {
                            phi_y[0] = 1.0;
                        }
                        for (m, midx) in disc.spatial_modes.indices().iter().enumerate() {
                            let py = if mesh.dim == 2 { phi_y[midx[1]] } else { 1.0 };
                            let wl = left_int[midx[0]] * py * wy * w_xi;
                            let wr = right_int[midx[0]] * py * wy * w_xi;
                            for k in 0..nk {
                                let o = (m * nk + k) * N_COMP;
                                for c in 0..N_COMP {
                                    block[o + c] += phi_k[k] * (wl * ul[c] + wr * ur[c]);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Re-project a field onto its own basis through quadrature; used as the
/// round-trip oracle in tests and by the limiter equivalence check.
pub fn reproject(field: &SgDgField) -> Result<SgDgField> {
    let disc = field.disc.clone();
    let mut out = SgDgField::zeros(disc.clone());
    let f = move |x: f64, y: f64, xi: &[f64]| -> ConservedState {
        let mesh = disc.mesh;
        let i = (((x - mesh.x_min) / mesh.dx) as usize).min(mesh.nx - 1);
        let j = if mesh.dim == 2 {
            (((y - mesh.y_min) / mesh.dy) as usize).min(mesh.ny - 1)
        } else {
            0
        };
        let cell = mesh.cell_id(i, j);
        let element = disc.me_grid.locate(xi).expect("xi inside random space");
        let (x0, y0) = mesh.cell_origin(i, j);
        let rx = (x - x0) / mesh.dx;
        let ry = if mesh.dim == 2 { (y - y0) / mesh.dy } else { 0.5 };
        let r_el = disc.me_grid.element(element).to_reference(xi);
        field
            .evaluate(cell, element, &[rx, ry], &r_el)
            .expect("in-range evaluation")
    };
    project_smooth(&mut out, &f)?;
    Ok(out)
}
