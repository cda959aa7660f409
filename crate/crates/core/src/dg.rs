//! Semi-discrete DG right-hand side: volume integrals on the mixed
//! Lobatto/Legendre grids, interface fluxes with a single shared evaluation
//! per face, boundary conditions and global wave-speed estimates.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::euler::{self, ConservedState, Direction, GasModel};
use crate::field::{Discretization, SgDgField, N_COMP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxKind {
    LaxFriedrichs,
    Hlle,
}

pub type BoundaryFn = Arc<dyn Fn(f64, f64, f64, &[f64]) -> ConservedState + Send + Sync>;
pub type SourceFn = Arc<dyn Fn(f64, f64, f64, &[f64]) -> [f64; 4] + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition {
    Periodic,
    /// Ghost state prescribed as a function of (t, x, y, xi).
    Dirichlet(BoundaryFn),
    /// Mirror state with the wall-normal momentum negated.
    Reflective,
    /// Ghost copies the interior trace.
    Outflow,
}

impl BoundaryCondition {
    fn is_periodic(&self) -> bool {
        matches!(self, BoundaryCondition::Periodic)
    }
}

#[derive(Clone)]
pub struct BoundarySet {
    pub west: BoundaryCondition,
    pub east: BoundaryCondition,
    pub south: BoundaryCondition,
    pub north: BoundaryCondition,
}

impl BoundarySet {
    pub fn periodic() -> Self {
        Self {
            west: BoundaryCondition::Periodic,
            east: BoundaryCondition::Periodic,
            south: BoundaryCondition::Periodic,
            north: BoundaryCondition::Periodic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.west.is_periodic() != self.east.is_periodic() {
            return Err(Error::UnmatchedPeriodicBoundary { side: "west/east" });
        }
        if self.south.is_periodic() != self.north.is_periodic() {
            return Err(Error::UnmatchedPeriodicBoundary { side: "south/north" });
        }
        Ok(())
    }
}

/// Ghost trace state for one boundary node.
pub fn apply_boundary(
    bc: &BoundaryCondition,
    interior: ConservedState,
    normal: Direction,
    t: f64,
    x: f64,
    y: f64,
    xi: &[f64],
) -> ConservedState {
    match bc {
        BoundaryCondition::Periodic => interior,
        BoundaryCondition::Dirichlet(f) => f(t, x, y, xi),
        BoundaryCondition::Reflective => match normal {
            Direction::X => ConservedState::new(interior.rho, -interior.m1, interior.m2, interior.e),
            Direction::Y => ConservedState::new(interior.rho, interior.m1, -interior.m2, interior.e),
        },
        BoundaryCondition::Outflow => interior,
    }
}

/// Scratch buffers reused across right-hand-side evaluations.
pub struct RhsWorkspace {
    /// States on the (Lobatto-x, Legendre-y, stochastic) grid per block.
    pub vol_x: Vec<f64>,
    /// States on the (Legendre-x, Lobatto-y, stochastic) grid per block (2D).
    pub vol_y: Vec<f64>,
    /// Per-block maxima of |v| + c per direction.
    lambda: Vec<[f64; 2]>,
    flux_x: Vec<f64>,
    flux_y: Vec<f64>,
}

impl RhsWorkspace {
    pub fn new(disc: &Discretization) -> Self {
        let n_blocks = disc.mesh.n_cells() * disc.n_elements();
        let n_vol = n_blocks * disc.vol_nodes_per_block() * N_COMP;
        let (fx, fy) = disc.face_array_lens();
        Self {
            vol_x: vec![0.0; n_vol],
            vol_y: if disc.mesh.dim == 2 { vec![0.0; n_vol] } else { Vec::new() },
            lambda: vec![[0.0; 2]; n_blocks],
            flux_x: vec![0.0; fx],
            flux_y: vec![0.0; fy],
        }
    }
}

impl Discretization {
    /// Nodes per block of one mixed volume grid.
    pub fn vol_nodes_per_block(&self) -> usize {
        let q_lob = self.tables.lobatto.len();
        let n_st = self.n_stoch_nodes();
        if self.mesh.dim == 1 {
            q_lob * n_st
        } else {
            q_lob * self.tables.face_leg.len() * n_st
        }
    }

    /// Nodes per face (transverse Legendre x stochastic).
    pub fn face_nodes(&self) -> usize {
        let n_st = self.n_stoch_nodes();
        if self.mesh.dim == 1 {
            n_st
        } else {
            self.tables.face_leg.len() * n_st
        }
    }

    fn face_array_lens(&self) -> (usize, usize) {
        let per_face = self.n_elements() * self.face_nodes() * N_COMP;
        let fx = (self.mesh.nx + 1) * self.mesh.ny * per_face;
        let fy = if self.mesh.dim == 2 {
            (self.mesh.ny + 1) * self.mesh.nx * per_face
        } else {
            0
        };
        (fx, fy)
    }
}

/// Evaluate one block's coefficients on the (Lobatto-dir0, Legendre-dir1,
/// stochastic) tensor grid. `swap` selects the y-direction variant.
/// Output layout: [lobatto][legendre][stoch_node][comp] (1D drops legendre).
pub fn evaluate_block_mixed(
    disc: &Discretization,
    block: &[f64],
    swap: bool,
    scratch: &mut Vec<f64>,
    out: &mut [f64],
) {
    let t = &disc.tables;
    let nk = disc.n_stoch_modes();
    let n_sp1 = disc.spatial_order + 1;
    let n_st = disc.n_stoch_nodes();
    let q_lob = t.lobatto.len();

    if disc.mesh.dim == 1 {
        // A[alpha][kappa][c] = sum_m block[m][kappa][c] phi_lob[m][alpha]
        scratch.clear();
        scratch.resize(q_lob * nk * N_COMP, 0.0);
        for m in 0..n_sp1 {
            let row = &block[m * nk * N_COMP..(m + 1) * nk * N_COMP];
            for alpha in 0..q_lob {
                let p = t.phi_lob[m][alpha];
                let dst = &mut scratch[alpha * nk * N_COMP..(alpha + 1) * nk * N_COMP];
                for (d, &s) in dst.iter_mut().zip(row) {
                    *d += p * s;
                }
            }
        }
        for alpha in 0..q_lob {
            let src = &scratch[alpha * nk * N_COMP..(alpha + 1) * nk * N_COMP];
            for rho in 0..n_st {
                let dst = &mut out[(alpha * n_st + rho) * N_COMP..(alpha * n_st + rho + 1) * N_COMP];
                dst.fill(0.0);
                for k in 0..nk {
                    let p = t.phi_st[k][rho];
                    for c in 0..N_COMP {
                        dst[c] += p * src[k * N_COMP + c];
                    }
                }
            }
        }
        return;
    }

    let q_leg = t.face_leg.len();
    // Mode (m1, m2) has flat index m1 * n_sp1 + m2 with m1 the x-degree.
    // For the x-grid (swap = false) Lobatto acts on m1 and the output node
    // is (alpha * q_leg + b); for the y-grid Lobatto acts on m2 and the
    // output node is (b * q_lob + beta), i.e. the Legendre-x index is outer.
    let len_a = q_lob * n_sp1 * nk * N_COMP;
    let len_b = q_lob * q_leg * nk * N_COMP;
    scratch.clear();
    scratch.resize(len_a + len_b, 0.0);
    let (sa, sb) = scratch.split_at_mut(len_a);
    for ma in 0..n_sp1 {
        for mb in 0..n_sp1 {
            let flat = if swap { mb * n_sp1 + ma } else { ma * n_sp1 + mb };
            let row = &block[flat * nk * N_COMP..(flat + 1) * nk * N_COMP];
            for a in 0..q_lob {
                let p = t.phi_lob[ma][a];
                let dst = &mut sa[(a * n_sp1 + mb) * nk * N_COMP..(a * n_sp1 + mb + 1) * nk * N_COMP];
                for (d, &s) in dst.iter_mut().zip(row) {
                    *d += p * s;
                }
            }
        }
    }
    for a in 0..q_lob {
        for mb in 0..n_sp1 {
            let src = &sa[(a * n_sp1 + mb) * nk * N_COMP..(a * n_sp1 + mb + 1) * nk * N_COMP];
            for b in 0..q_leg {
                let p = t.phi_face[mb][b];
                let dst = &mut sb[(a * q_leg + b) * nk * N_COMP..(a * q_leg + b + 1) * nk * N_COMP];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += p * s;
                }
            }
        }
    }
    for a in 0..q_lob {
        for b in 0..q_leg {
            let src = &sb[(a * q_leg + b) * nk * N_COMP..(a * q_leg + b + 1) * nk * N_COMP];
            let node = if swap {
                b * q_lob + a
            } else {
                a * q_leg + b
            };
            for rho in 0..n_st {
                let dst = &mut out[(node * n_st + rho) * N_COMP..(node * n_st + rho + 1) * N_COMP];
                dst.fill(0.0);
                for k in 0..nk {
                    let p = t.phi_st[k][rho];
                    for c in 0..N_COMP {
                        dst[c] += p * src[k * N_COMP + c];
                    }
                }
            }
        }
    }
}

fn state_at(buf: &[f64], node: usize) -> ConservedState {
    ConservedState::new(
        buf[node * N_COMP],
        buf[node * N_COMP + 1],
        buf[node * N_COMP + 2],
        buf[node * N_COMP + 3],
    )
}

/// The semi-discrete operator with its boundary conditions, flux choice and
/// optional source term.
pub struct SemiDiscreteSystem {
    pub disc: Arc<Discretization>,
    pub bc: BoundarySet,
    pub flux: FluxKind,
    pub source: Option<SourceFn>,
}

pub struct RhsOutput {
    /// Time derivative of the coefficient tensor, same layout as the field.
    pub du: Vec<f64>,
    /// Global wave-speed estimates (lambda_max per direction) of the input.
    pub lambda: (f64, f64),
}

impl SemiDiscreteSystem {
    pub fn new(
        disc: Arc<Discretization>,
        bc: BoundarySet,
        flux: FluxKind,
        source: Option<SourceFn>,
    ) -> Result<Self> {
        bc.validate()?;
        Ok(Self {
            disc,
            bc,
            flux,
            source,
        })
    }

    /// Evaluate all volume-grid states of `field` into the workspace and
    /// check admissibility; returns the global wave-speed estimates.
    pub fn evaluate_states(&self, field: &SgDgField, ws: &mut RhsWorkspace) -> Result<(f64, f64)> {
        let disc = &*self.disc;
        let gas = disc.gas;
        let n_vol = disc.vol_nodes_per_block() * N_COMP;
        let n_elem = disc.n_elements();

        let lambda = &mut ws.lambda;
        let vol_y_present = disc.mesh.dim == 2;

        let process = |grid: &mut Vec<f64>, swap: bool, lam: &mut Vec<[f64; 2]>| -> Result<()> {
            grid.par_chunks_mut(n_vol)
                .zip(lam.par_iter_mut())
                .enumerate()
                .try_for_each_init(
                    Vec::new,
                    |scratch, (blk, (chunk, lam_blk))| -> Result<()> {
                        let cell = blk / n_elem;
                        let element = blk % n_elem;
                        evaluate_block_mixed(disc, field.block(cell, element), swap, scratch, chunk);
                        let mut l1 = if swap { lam_blk[0] } else { 0.0 };
                        let mut l2 = if swap { lam_blk[1] } else { 0.0 };
                        for node in 0..disc.vol_nodes_per_block() {
                            let u = state_at(chunk, node);
                            if !euler::is_admissible(u, gas) {
                                return Err(Error::InadmissibleNode {
                                    cell,
                                    element,
                                    node,
                                    state: u,
                                });
                            }
                            l1 = l1.max(euler::max_signal_speed_unchecked(u, gas, Direction::X));
                            if vol_y_present {
                                l2 = l2.max(euler::max_signal_speed_unchecked(u, gas, Direction::Y));
                            }
                        }
                        *lam_blk = [l1, l2];
                        Ok(())
                    },
                )
        };

        process(&mut ws.vol_x, false, lambda)?;
        if vol_y_present {
            process(&mut ws.vol_y, true, lambda)?;
        }
        let mut l1 = 0.0f64;
        let mut l2 = 0.0f64;
        for l in lambda.iter() {
            l1 = l1.max(l[0]);
            l2 = l2.max(l[1]);
        }
        Ok((l1, l2))
    }

    /// Global wave-speed estimates over every volume and trace node.
    pub fn estimate_global_wave_speeds(
        &self,
        field: &SgDgField,
        ws: &mut RhsWorkspace,
    ) -> Result<(f64, f64)> {
        self.evaluate_states(field, ws)
    }

    /// Semi-discrete right-hand side d(u_hat)/dt at time `t`.
    pub fn compute_rhs(&self, field: &SgDgField, t: f64, ws: &mut RhsWorkspace) -> Result<RhsOutput> {
        let lambda = self.evaluate_states(field, ws)?;
        self.compute_face_fluxes(t, lambda, ws)?;
        let mut du = vec![0.0; field.data.len()];
        self.assemble(t, ws, &mut du)?;
        Ok(RhsOutput { du, lambda })
    }

    fn numerical_flux(
        &self,
        left: ConservedState,
        right: ConservedState,
        lambda: (f64, f64),
        dir: Direction,
    ) -> Result<ConservedState> {
        match self.flux {
            FluxKind::LaxFriedrichs => {
                let lam = match dir {
                    Direction::X => lambda.0,
                    Direction::Y => lambda.1,
                };
                euler::lax_friedrichs_flux(left, right, lam, self.disc.gas, dir)
            }
            FluxKind::Hlle => euler::hlle_flux(left, right, self.disc.gas, dir),
        }
    }

    fn compute_face_fluxes(
        &self,
        t: f64,
        lambda: (f64, f64),
        ws: &mut RhsWorkspace,
    ) -> Result<()> {
        let disc = self.disc.clone();
        let mesh = disc.mesh;
        let n_elem = disc.n_elements();
        let face_nodes = disc.face_nodes();
        let per_face = n_elem * face_nodes * N_COMP;
        let n_st = disc.n_stoch_nodes();
        let q_leg = if mesh.dim == 1 { 1 } else { disc.tables.face_leg.len() };

        // x-faces: face i of row j sits between cells (i-1, j) and (i, j).
        let nx = mesh.nx;
        let ny = mesh.ny;
        let periodic_x = self.bc.west.is_periodic();
        let vol_x_view = &ws.vol_x;
        let vol_y_view = &ws.vol_y;
        let face_state = |block: usize, side: usize, axis: Direction, trans: usize, rho: usize| {
            let t = &disc.tables;
            let per_block = disc.vol_nodes_per_block();
            match (mesh.dim, axis) {
                (1, _) => {
                    let alpha = if side == 0 { 0 } else { t.lobatto.len() - 1 };
                    state_at(vol_x_view, block * per_block + alpha * n_st + rho)
                }
                (_, Direction::X) => {
                    let alpha = if side == 0 { 0 } else { t.lobatto.len() - 1 };
                    state_at(
                        vol_x_view,
                        block * per_block + (alpha * q_leg + trans) * n_st + rho,
                    )
                }
                (_, Direction::Y) => {
                    let beta = if side == 0 { 0 } else { t.lobatto.len() - 1 };
                    state_at(
                        vol_y_view,
                        block * per_block + (trans * t.lobatto.len() + beta) * n_st + rho,
                    )
                }
            }
        };

        let result_x: Result<()> = ws
            .flux_x
            .par_chunks_mut(per_face)
            .enumerate()
            .try_for_each(|(fid, chunk)| -> Result<()> {
                let j = fid / (nx + 1);
                let i = fid % (nx + 1);
                if periodic_x && i == nx {
                    return Ok(()); // copied from face 0 afterwards
                }
                let x_face = mesh.x_min + i as f64 * mesh.dx;
                for element in 0..n_elem {
                    for trans in 0..q_leg {
                        let y = if mesh.dim == 1 {
                            0.0
                        } else {
                            mesh.y_min + (j as f64 + disc.tables.face_leg.nodes[trans]) * mesh.dy
                        };
                        for rho in 0..n_st {
                            let xi = &disc.tables.xi_phys[element][rho];
                            let (ul, ur) = if i == 0 {
                                let interior =
                                    face_state(mesh.cell_id(0, j) * n_elem + element, 0, Direction::X, trans, rho);
                                let ghost = if periodic_x {
                                    face_state(
                                        mesh.cell_id(nx - 1, j) * n_elem + element,
                                        1,
                                        Direction::X,
                                        trans,
                                        rho,
                                    )
                                } else {
                                    apply_boundary(&self.bc.west, interior, Direction::X, t, x_face, y, xi)
                                };
                                (ghost, interior)
                            } else if i == nx {
                                let interior = face_state(
                                    mesh.cell_id(nx - 1, j) * n_elem + element,
                                    1,
                                    Direction::X,
                                    trans,
                                    rho,
                                );
                                let ghost =
                                    apply_boundary(&self.bc.east, interior, Direction::X, t, x_face, y, xi);
                                (interior, ghost)
                            } else {
                                (
                                    face_state(mesh.cell_id(i - 1, j) * n_elem + element, 1, Direction::X, trans, rho),
                                    face_state(mesh.cell_id(i, j) * n_elem + element, 0, Direction::X, trans, rho),
                                )
                            };
                            let f = self.numerical_flux(ul, ur, lambda, Direction::X)?;
                            let o = (element * q_leg * n_st + trans * n_st + rho) * N_COMP;
                            chunk[o..o + 4].copy_from_slice(&f.as_array());
                        }
                    }
                }
                Ok(())
            });
        result_x?;
        if periodic_x {
            for j in 0..ny {
                let src = (j * (nx + 1)) * per_face;
                let dst = (j * (nx + 1) + nx) * per_face;
                let (a, b) = ws.flux_x.split_at_mut(dst);
                b[..per_face].copy_from_slice(&a[src..src + per_face]);
            }
        }

        if mesh.dim == 2 {
            let periodic_y = self.bc.south.is_periodic();
            let vol_y_view = &ws.vol_y;
            let face_state = |block: usize, side: usize, trans: usize, rho: usize| {
                let t = &disc.tables;
                let per_block = disc.vol_nodes_per_block();
                let beta = if side == 0 { 0 } else { t.lobatto.len() - 1 };
                state_at(
                    vol_y_view,
                    block * per_block + (trans * t.lobatto.len() + beta) * n_st + rho,
                )
            };
            let result_y: Result<()> = ws
                .flux_y
                .par_chunks_mut(per_face)
                .enumerate()
                .try_for_each(|(fid, chunk)| -> Result<()> {
                    let j = fid / nx;
                    let i = fid % nx;
                    if periodic_y && j == ny {
                        return Ok(());
                    }
                    let y_face = mesh.y_min + j as f64 * mesh.dy;
                    for element in 0..n_elem {
                        for trans in 0..q_leg {
                            let x = mesh.x_min + (i as f64 + disc.tables.face_leg.nodes[trans]) * mesh.dx;
                            for rho in 0..n_st {
                                let xi = &disc.tables.xi_phys[element][rho];
                                let (ul, ur) = if j == 0 {
                                    let interior =
                                        face_state(mesh.cell_id(i, 0) * n_elem + element, 0, trans, rho);
                                    let ghost = if periodic_y {
                                        face_state(mesh.cell_id(i, ny - 1) * n_elem + element, 1, trans, rho)
                                    } else {
                                        apply_boundary(&self.bc.south, interior, Direction::Y, t, x, y_face, xi)
                                    };
                                    (ghost, interior)
                                } else if j == ny {
                                    let interior =
                                        face_state(mesh.cell_id(i, ny - 1) * n_elem + element, 1, trans, rho);
                                    let ghost =
                                        apply_boundary(&self.bc.north, interior, Direction::Y, t, x, y_face, xi);
                                    (interior, ghost)
                                } else {
                                    (
                                        face_state(mesh.cell_id(i, j - 1) * n_elem + element, 1, trans, rho),
                                        face_state(mesh.cell_id(i, j) * n_elem + element, 0, trans, rho),
                                    )
                                };
                                let f = self.numerical_flux(ul, ur, lambda, Direction::Y)?;
                                let o = (element * q_leg * n_st + trans * n_st + rho) * N_COMP;
                                chunk[o..o + 4].copy_from_slice(&f.as_array());
                            }
                        }
                    }
                    Ok(())
                });
            result_y?;
            if periodic_y {
                for i in 0..nx {
                    let src = i * per_face;
                    let dst = (ny * nx + i) * per_face;
                    let (a, b) = ws.flux_y.split_at_mut(dst);
                    b[..per_face].copy_from_slice(&a[src..src + per_face]);
                }
            }
        }
        Ok(())
    }

    fn assemble(&self, t: f64, ws: &RhsWorkspace, du: &mut [f64]) -> Result<()> {
        let disc = self.disc.clone();
        let mesh = disc.mesh;
        let gas = disc.gas;
        let n_elem = disc.n_elements();
        let nk = disc.n_stoch_modes();
        let n_sp1 = disc.spatial_order + 1;
        let n_st = disc.n_stoch_nodes();
        let tables = &disc.tables;
        let q_lob = tables.lobatto.len();
        let q_leg = if mesh.dim == 1 { 1 } else { tables.face_leg.len() };
        let block_len = disc.block_len();
        let per_block_nodes = disc.vol_nodes_per_block();
        let per_face = n_elem * disc.face_nodes() * N_COMP;
        let inv_dx = 1.0 / mesh.dx;
        let inv_dy = 1.0 / mesh.dy;

        du.par_chunks_mut(block_len)
            .enumerate()
            .try_for_each_init(Vec::new, |scratch: &mut Vec<f64>, (blk, out)| -> Result<()> {
                let cell = blk / n_elem;
                let element = blk % n_elem;
                let (ci, cj) = mesh.cell_coords(cell);

                // g[kappa][c] accumulators per (lobatto, legendre) pair.
                scratch.clear();
                scratch.resize(nk * N_COMP, 0.0);

                // Volume term, x-direction.
                let vol = &ws.vol_x[blk * per_block_nodes * N_COMP..(blk + 1) * per_block_nodes * N_COMP];
                for alpha in 0..q_lob {
                    for b in 0..q_leg {
                        let w_t = if mesh.dim == 1 {
                            1.0
                        } else {
                            tables.face_leg.weights[b]
                        };
                        let g = &mut scratch[..nk * N_COMP];
                        g.fill(0.0);
                        for rho in 0..n_st {
                            let node = if mesh.dim == 1 {
                                alpha * n_st + rho
                            } else {
                                (alpha * q_leg + b) * n_st + rho
                            };
                            let u = state_at(vol, node);
                            let p = (gas.gamma - 1.0)
                                * (u.e - 0.5 * (u.m1 * u.m1 + u.m2 * u.m2) / u.rho);
                            let f = euler::flux_unchecked(u, p, Direction::X).as_array();
                            let w = tables.stoch_weights[rho];
                            for k in 0..nk {
                                let pw = tables.phi_st[k][rho] * w;
                                for c in 0..N_COMP {
                                    g[k * N_COMP + c] += pw * f[c];
                                }
                            }
                        }
                        let w_a = tables.lobatto.weights[alpha] * w_t * inv_dx;
                        for m1 in 0..n_sp1 {
                            let dphi = tables.dphi_lob[m1][alpha] * w_a;
                            if dphi == 0.0 {
                                continue;
                            }
                            for m2 in 0..if mesh.dim == 1 { 1 } else { n_sp1 } {
                                let phi2 = if mesh.dim == 1 {
                                    1.0
                                } else {
                                    tables.phi_face[m2][b]
                                };
                                let flat = if mesh.dim == 1 { m1 } else { m1 * n_sp1 + m2 };
                                let dst = &mut out[flat * nk * N_COMP..(flat + 1) * nk * N_COMP];
                                let w = dphi * phi2;
                                for (d, &s) in dst.iter_mut().zip(g.iter()) {
                                    *d += w * s;
                                }
                            }
                        }
                    }
                }

                // Volume term, y-direction (2D).
                if mesh.dim == 2 {
                    let vol =
                        &ws.vol_y[blk * per_block_nodes * N_COMP..(blk + 1) * per_block_nodes * N_COMP];
                    for p_idx in 0..q_leg {
                        for beta in 0..q_lob {
                            let g = &mut scratch[..nk * N_COMP];
                            g.fill(0.0);
                            for rho in 0..n_st {
                                let node = (p_idx * q_lob + beta) * n_st + rho;
                                let u = state_at(vol, node);
                                let p = (gas.gamma - 1.0)
                                    * (u.e - 0.5 * (u.m1 * u.m1 + u.m2 * u.m2) / u.rho);
                                let f = euler::flux_unchecked(u, p, Direction::Y).as_array();
                                let w = tables.stoch_weights[rho];
                                for k in 0..nk {
                                    let pw = tables.phi_st[k][rho] * w;
                                    for c in 0..N_COMP {
                                        g[k * N_COMP + c] += pw * f[c];
                                    }
                                }
                            }
                            let w_b = tables.lobatto.weights[beta] * tables.face_leg.weights[p_idx] * inv_dy;
                            for m2 in 0..n_sp1 {
                                let dphi = tables.dphi_lob[m2][beta] * w_b;
                                if dphi == 0.0 {
                                    continue;
                                }
                                for m1 in 0..n_sp1 {
                                    let phi1 = tables.phi_face[m1][p_idx];
                                    let flat = m1 * n_sp1 + m2;
                                    let dst = &mut out[flat * nk * N_COMP..(flat + 1) * nk * N_COMP];
                                    let w = dphi * phi1;
                                    for (d, &s) in dst.iter_mut().zip(g.iter()) {
                                        *d += w * s;
                                    }
                                }
                            }
                        }
                    }
                }

                // Face terms, x-direction.
                let fx_lo = (cj * (mesh.nx + 1) + ci) * per_face + element * q_leg * n_st * N_COMP;
                let fx_hi = (cj * (mesh.nx + 1) + ci + 1) * per_face + element * q_leg * n_st * N_COMP;
                for (side, off) in [(0usize, fx_lo), (1usize, fx_hi)] {
                    let sign = if side == 0 { 1.0 } else { -1.0 };
                    for b in 0..q_leg {
                        let w_t = if mesh.dim == 1 {
                            1.0
                        } else {
                            tables.face_leg.weights[b]
                        };
                        let g = &mut scratch[..nk * N_COMP];
                        g.fill(0.0);
                        for rho in 0..n_st {
                            let fo = off + (b * n_st + rho) * N_COMP;
                            let w = tables.stoch_weights[rho];
                            for k in 0..nk {
                                let pw = tables.phi_st[k][rho] * w;
                                for c in 0..N_COMP {
                                    g[k * N_COMP + c] += pw * ws.flux_x[fo + c];
                                }
                            }
                        }
                        let w_all = sign * w_t * inv_dx;
                        for m1 in 0..n_sp1 {
                            let phi_e = tables.phi_edge[side][m1] * w_all;
                            for m2 in 0..if mesh.dim == 1 { 1 } else { n_sp1 } {
                                let phi2 = if mesh.dim == 1 {
                                    1.0
                                } else {
                                    tables.phi_face[m2][b]
                                };
                                let flat = if mesh.dim == 1 { m1 } else { m1 * n_sp1 + m2 };
                                let dst = &mut out[flat * nk * N_COMP..(flat + 1) * nk * N_COMP];
                                let w = phi_e * phi2;
                                for (d, &s) in dst.iter_mut().zip(g.iter()) {
                                    *d += w * s;
                                }
                            }
                        }
                    }
                }

                // Face terms, y-direction.
                if mesh.dim == 2 {
                    let fy_lo = (cj * mesh.nx + ci) * per_face + element * q_leg * n_st * N_COMP;
                    let fy_hi = ((cj + 1) * mesh.nx + ci) * per_face + element * q_leg * n_st * N_COMP;
                    for (side, off) in [(0usize, fy_lo), (1usize, fy_hi)] {
                        let sign = if side == 0 { 1.0 } else { -1.0 };
                        for p_idx in 0..q_leg {
                            let w_t = tables.face_leg.weights[p_idx];
                            let g = &mut scratch[..nk * N_COMP];
                            g.fill(0.0);
                            for rho in 0..n_st {
                                let fo = off + (p_idx * n_st + rho) * N_COMP;
                                let w = tables.stoch_weights[rho];
                                for k in 0..nk {
                                    let pw = tables.phi_st[k][rho] * w;
                                    for c in 0..N_COMP {
                                        g[k * N_COMP + c] += pw * ws.flux_y[fo + c];
                                    }
                                }
                            }
                            let w_all = sign * w_t * inv_dy;
                            for m2 in 0..n_sp1 {
                                let phi_e = tables.phi_edge[side][m2] * w_all;
                                for m1 in 0..n_sp1 {
                                    let phi1 = tables.phi_face[m1][p_idx];
                                    let flat = m1 * n_sp1 + m2;
                                    let dst = &mut out[flat * nk * N_COMP..(flat + 1) * nk * N_COMP];
                                    let w = phi_e * phi1;
                                    for (d, &s) in dst.iter_mut().zip(g.iter()) {
                                        *d += w * s;
                                    }
                                }
                            }
                        }
                    }
                }

                // Source term on the x-mixed grid.
                if let Some(src) = &self.source {
                    for alpha in 0..q_lob {
                        let rx = tables.lobatto.nodes[alpha];
                        for b in 0..q_leg {
                            let (ry, w_t) = if mesh.dim == 1 {
                                (0.5, 1.0)
                            } else {
                                (tables.face_leg.nodes[b], tables.face_leg.weights[b])
                            };
                            let (x, y) = mesh.to_physical(ci, cj, rx, ry);
                            let w_sp = tables.lobatto.weights[alpha] * w_t;
                            for rho in 0..n_st {
                                let xi = &tables.xi_phys[element][rho];
                                let s = src(t, x, y, xi);
                                let w = w_sp * tables.stoch_weights[rho];
                                for m1 in 0..n_sp1 {
                                    let pa = tables.phi_lob[m1][alpha];
                                    for m2 in 0..if mesh.dim == 1 { 1 } else { n_sp1 } {
                                        let pb = if mesh.dim == 1 {
                                            1.0
                                        } else {
                                            tables.phi_face[m2][b]
                                        };
                                        let flat = if mesh.dim == 1 { m1 } else { m1 * n_sp1 + m2 };
                                        for k in 0..nk {
                                            let pw = w * pa * pb * tables.phi_st[k][rho];
                                            let o = (flat * nk + k) * N_COMP;
                                            for c in 0..N_COMP {
                                                out[o + c] += pw * s[c];
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }

                Ok(())
            })
    }
}
