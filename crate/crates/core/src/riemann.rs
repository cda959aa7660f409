//! Exact Riemann solver for the 1D Euler equations: star-region Newton
//! iteration on the pressure function and self-similar sampling.

use crate::error::{Error, Result};
use crate::euler::GasModel;

/// Primitive state (density, velocity, pressure) for the 1D solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState1d {
    pub rho: f64,
    pub v: f64,
    pub p: f64,
}

impl PrimitiveState1d {
    pub const fn new(rho: f64, v: f64, p: f64) -> Self {
        Self { rho, v, p }
    }

    pub fn sound_speed(&self, gas: GasModel) -> f64 {
        (gas.gamma * self.p / self.rho).sqrt()
    }

    fn as_array(&self) -> [f64; 3] {
        [self.rho, self.v, self.p]
    }
}

/// Solved star region of a Riemann problem; sampling is cheap afterwards.
#[derive(Debug, Clone, Copy)]
pub struct RiemannSolution {
    pub left: PrimitiveState1d,
    pub right: PrimitiveState1d,
    pub gas: GasModel,
    pub p_star: f64,
    pub v_star: f64,
    /// Residual of the pressure function at `p_star`.
    pub residual: f64,
}

fn pressure_function(p: f64, s: PrimitiveState1d, gas: GasModel) -> (f64, f64) {
    let g = gas.gamma;
    let c = s.sound_speed(gas);
    if p > s.p {
        // Shock branch.
        let a = 2.0 / ((g + 1.0) * s.rho);
        let b = (g - 1.0) / (g + 1.0) * s.p;
        let root = (a / (p + b)).sqrt();
        let f = (p - s.p) * root;
        let df = root * (1.0 - 0.5 * (p - s.p) / (p + b));
        (f, df)
    } else {
        // Rarefaction branch.
        let z = (g - 1.0) / (2.0 * g);
        let f = 2.0 * c / (g - 1.0) * ((p / s.p).powf(z) - 1.0);
        let df = (1.0 / (s.rho * c)) * (p / s.p).powf(-(g + 1.0) / (2.0 * g));
        (f, df)
    }
}

/// Solve for the star-region pressure and velocity.
pub fn solve_star(
    left: PrimitiveState1d,
    right: PrimitiveState1d,
    gas: GasModel,
) -> Result<RiemannSolution> {
    for s in [&left, &right] {
        if !(s.rho > 0.0 && s.p > 0.0) {
            return Err(Error::RiemannVacuum {
                left: left.as_array(),
                right: right.as_array(),
            });
        }
    }
    let g = gas.gamma;
    let cl = left.sound_speed(gas);
    let cr = right.sound_speed(gas);

    // Positivity of the pressure function at p -> 0: otherwise vacuum forms.
    if 2.0 * (cl + cr) / (g - 1.0) <= right.v - left.v {
        return Err(Error::RiemannVacuum {
            left: left.as_array(),
            right: right.as_array(),
        });
    }

    // Two-rarefaction initial guess.
    let z = (g - 1.0) / (2.0 * g);
    let guess = ((cl + cr - 0.5 * (g - 1.0) * (right.v - left.v))
        / (cl / left.p.powf(z) + cr / right.p.powf(z)))
    .powf(1.0 / z);
    let mut p = guess.max(1e-14 * (left.p + right.p));

    let mut residual = f64::INFINITY;
    for _ in 0..100 {
        let (fl, dfl) = pressure_function(p, left, gas);
        let (fr, dfr) = pressure_function(p, right, gas);
        let f = fl + fr + right.v - left.v;
        residual = f.abs();
        let step = f / (dfl + dfr);
        let p_new = (p - step).max(1e-14 * p);
        let change = (p_new - p).abs() / (0.5 * (p_new + p));
        p = p_new;
        if residual < 1e-12 || change < 1e-14 {
            let (fl, _) = pressure_function(p, left, gas);
            let (fr, _) = pressure_function(p, right, gas);
            let v_star = 0.5 * (left.v + right.v) + 0.5 * (fr - fl);
            return Ok(RiemannSolution {
                left,
                right,
                gas,
                p_star: p,
                v_star,
                residual: (fl + fr + right.v - left.v).abs(),
            });
        }
    }
    Err(Error::RiemannNoConvergence {
        iterations: 100,
        residual,
    })
}

impl RiemannSolution {
    /// Sample the self-similar solution at speed `s = x / t`.
    pub fn sample(&self, s: f64) -> PrimitiveState1d {
        let g = self.gas.gamma;
        let gm = (g - 1.0) / (g + 1.0);
        if s <= self.v_star {
            // Left of the contact.
            let st = self.left;
            let c = st.sound_speed(self.gas);
            let pr = self.p_star / st.p;
            if self.p_star > st.p {
                // Left shock.
                let shock_speed = st.v - c * ((g + 1.0) / (2.0 * g) * pr + (g - 1.0) / (2.0 * g)).sqrt();
                if s <= shock_speed {
                    st
                } else {
                    let rho = st.rho * ((pr + gm) / (gm * pr + 1.0));
                    PrimitiveState1d::new(rho, self.v_star, self.p_star)
                }
            } else {
                // Left rarefaction.
                let head = st.v - c;
                let c_star = c * pr.powf((g - 1.0) / (2.0 * g));
                let tail = self.v_star - c_star;
                if s <= head {
                    st
                } else if s >= tail {
                    let rho = st.rho * pr.powf(1.0 / g);
                    PrimitiveState1d::new(rho, self.v_star, self.p_star)
                } else {
                    let factor = 2.0 / (g + 1.0) + gm / c * (st.v - s);
                    PrimitiveState1d::new(
                        st.rho * factor.powf(2.0 / (g - 1.0)),
                        2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * st.v + s),
                        st.p * factor.powf(2.0 * g / (g - 1.0)),
                    )
                }
            }
        } else {
            // Right of the contact.
            let st = self.right;
            let c = st.sound_speed(self.gas);
            let pr = self.p_star / st.p;
            if self.p_star > st.p {
                // Right shock.
                let shock_speed = st.v + c * ((g + 1.0) / (2.0 * g) * pr + (g - 1.0) / (2.0 * g)).sqrt();
                if s >= shock_speed {
                    st
                } else {
                    let rho = st.rho * ((pr + gm) / (gm * pr + 1.0));
                    PrimitiveState1d::new(rho, self.v_star, self.p_star)
                }
            } else {
                // Right rarefaction.
                let head = st.v + c;
                let c_star = c * pr.powf((g - 1.0) / (2.0 * g));
                let tail = self.v_star + c_star;
                if s >= head {
                    st
                } else if s <= tail {
                    let rho = st.rho * pr.powf(1.0 / g);
                    PrimitiveState1d::new(rho, self.v_star, self.p_star)
                } else {
                    let factor = 2.0 / (g + 1.0) - gm / c * (st.v - s);
                    PrimitiveState1d::new(
                        st.rho * factor.powf(2.0 / (g - 1.0)),
                        2.0 / (g + 1.0) * (-c + 0.5 * (g - 1.0) * st.v + s),
                        st.p * factor.powf(2.0 * g / (g - 1.0)),
                    )
                }
            }
        }
    }

    /// Speeds of the outermost left and right waves.
    pub fn wave_span(&self) -> (f64, f64) {
        let g = self.gas.gamma;
        let cl = self.left.sound_speed(self.gas);
        let cr = self.right.sound_speed(self.gas);
        let left_speed = if self.p_star > self.left.p {
            self.left.v
                - cl * ((g + 1.0) / (2.0 * g) * self.p_star / self.left.p + (g - 1.0) / (2.0 * g)).sqrt()
        } else {
            self.left.v - cl
        };
        let right_speed = if self.p_star > self.right.p {
            self.right.v
                + cr * ((g + 1.0) / (2.0 * g) * self.p_star / self.right.p + (g - 1.0) / (2.0 * g))
                    .sqrt()
        } else {
            self.right.v + cr
        };
        (left_speed, right_speed)
    }

    /// All interior wave speeds (heads, tails, contact) in ascending order.
    pub fn wave_speeds(&self) -> Vec<f64> {
        let g = self.gas.gamma;
        let mut speeds = Vec::with_capacity(5);
        let cl = self.left.sound_speed(self.gas);
        let cr = self.right.sound_speed(self.gas);
        if self.p_star > self.left.p {
            speeds.push(
                self.left.v
                    - cl * ((g + 1.0) / (2.0 * g) * self.p_star / self.left.p
                        + (g - 1.0) / (2.0 * g))
                        .sqrt(),
            );
        } else {
            let c_star = cl * (self.p_star / self.left.p).powf((g - 1.0) / (2.0 * g));
            speeds.push(self.left.v - cl);
            speeds.push(self.v_star - c_star);
        }
        speeds.push(self.v_star);
        if self.p_star > self.right.p {
            speeds.push(
                self.right.v
                    + cr * ((g + 1.0) / (2.0 * g) * self.p_star / self.right.p
                        + (g - 1.0) / (2.0 * g))
                        .sqrt(),
            );
        } else {
            let c_star = cr * (self.p_star / self.right.p).powf((g - 1.0) / (2.0 * g));
            speeds.push(self.v_star + c_star);
            speeds.push(self.right.v + cr);
        }
        speeds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        speeds
    }
}

/// Sample the exact solution at `xi_over_t = x / t`.
pub fn exact_riemann_solve(
    left: PrimitiveState1d,
    right: PrimitiveState1d,
    gas: GasModel,
    xi_over_t: f64,
) -> Result<PrimitiveState1d> {
    Ok(solve_star(left, right, gas)?.sample(xi_over_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{flux, ConservedState, Direction};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn gas() -> GasModel {
        GasModel::air()
    }

    fn sod() -> (PrimitiveState1d, PrimitiveState1d) {
        (
            PrimitiveState1d::new(1.0, 0.0, 1.0),
            PrimitiveState1d::new(0.125, 0.0, 0.1),
        )
    }

    #[test]
    fn equal_states_are_fixed_points() {
        let s = PrimitiveState1d::new(1.3, 0.4, 2.0);
        for x_over_t in [-3.0, -0.1, 0.0, 0.4, 2.5] {
            let got = exact_riemann_solve(s, s, gas(), x_over_t).unwrap();
            assert_relative_eq!(got.rho, s.rho, epsilon = 1e-12);
            assert_relative_eq!(got.v, s.v, epsilon = 1e-12);
            assert_relative_eq!(got.p, s.p, epsilon = 1e-12);
        }
    }

    #[test]
    fn sod_star_pressure() {
        let (l, r) = sod();
        let sol = solve_star(l, r, gas()).unwrap();
        assert!(sol.residual < 1e-12, "residual {}", sol.residual);
        assert_abs_diff_eq!(sol.p_star, 0.30313, epsilon = 1e-4);
        assert_abs_diff_eq!(sol.v_star, 0.92745, epsilon = 1e-4);
    }

    #[test]
    fn undisturbed_regions() {
        let (l, r) = sod();
        let sol = solve_star(l, r, gas()).unwrap();
        let far_left = sol.sample(-100.0);
        assert_eq!(far_left, l);
        let far_right = sol.sample(100.0);
        assert_eq!(far_right, r);
    }

    #[test]
    fn vacuum_is_rejected() {
        let l = PrimitiveState1d::new(1.0, -10.0, 0.1);
        let r = PrimitiveState1d::new(1.0, 10.0, 0.1);
        assert!(matches!(
            solve_star(l, r, gas()),
            Err(Error::RiemannVacuum { .. })
        ));
    }

    /// First-order Godunov update with the exact-solver interface flux.
    fn godunov_reference(
        left: PrimitiveState1d,
        right: PrimitiveState1d,
        n_cells: usize,
        t_end: f64,
    ) -> Vec<ConservedState> {
        let g = gas();
        let dx = 1.0 / n_cells as f64;
        let to_conserved =
            |s: PrimitiveState1d| ConservedState::from_primitive(s.rho, s.v, 0.0, s.p, g);
        let mut u: Vec<ConservedState> = (0..n_cells)
            .map(|i| {
                let x = (i as f64 + 0.5) * dx;
                if x < 0.5 {
                    to_conserved(left)
                } else {
                    to_conserved(right)
                }
            })
            .collect();
        let primitive = |c: ConservedState| {
            let p = (g.gamma - 1.0) * (c.e - 0.5 * c.m1 * c.m1 / c.rho);
            PrimitiveState1d::new(c.rho, c.m1 / c.rho, p)
        };
        let mut t = 0.0;
        while t < t_end {
            let mut lambda: f64 = 0.0;
            for c in &u {
                let s = primitive(*c);
                lambda = lambda.max(s.v.abs() + s.sound_speed(g));
            }
            let dt = (0.45 * dx / lambda).min(t_end - t);
            let mut fluxes = Vec::with_capacity(n_cells + 1);
            for i in 0..=n_cells {
                let sl = primitive(u[i.saturating_sub(1).min(n_cells - 1)]);
                let sr = primitive(u[i.min(n_cells - 1)]);
                let (sl, sr) = if i == 0 {
                    (sl, sl)
                } else if i == n_cells {
                    (sr, sr)
                } else {
                    (sl, sr)
                };
                let face = exact_riemann_solve(sl, sr, g, 0.0).unwrap();
                let c = ConservedState::from_primitive(face.rho, face.v, 0.0, face.p, g);
                fluxes.push(flux(c, g, Direction::X).unwrap());
            }
            for i in 0..n_cells {
                u[i] = u[i] - (fluxes[i + 1] - fluxes[i]) * (dt / dx);
            }
            t += dt;
        }
        u
    }

    #[test]
    fn conserves_against_godunov_reference() {
        // The integral of the sampled exact solution over an interval that
        // contains the whole wave fan must match the Godunov integral.
        let (l, r) = sod();
        let g = gas();
        let t_end = 0.2;
        let n_cells = 2000;
        let reference = godunov_reference(l, r, n_cells, t_end);
        let dx = 1.0 / n_cells as f64;
        let lo = 0.25;
        let hi = 0.75;
        let mut ref_integral = ConservedState::ZERO;
        for (i, c) in reference.iter().enumerate() {
            let x = (i as f64 + 0.5) * dx;
            if x >= lo && x < hi {
                ref_integral = ref_integral + *c * dx;
            }
        }

        let sol = solve_star(l, r, g).unwrap();
        let n_quad = 20_000;
        let h = (hi - lo) / n_quad as f64;
        let mut exact_integral = ConservedState::ZERO;
        for k in 0..n_quad {
            let x = lo + (k as f64 + 0.5) * h;
            let s = sol.sample((x - 0.5) / t_end);
            exact_integral =
                exact_integral + ConservedState::from_primitive(s.rho, s.v, 0.0, s.p, g) * h;
        }
        for (a, b) in exact_integral
            .as_array()
            .iter()
            .zip(ref_integral.as_array())
        {
            assert_abs_diff_eq!(a, &b, epsilon = 1e-4);
        }
    }

    #[test]
    fn rankine_hugoniot_across_right_shock() {
        let (l, r) = sod();
        let g = gas();
        let sol = solve_star(l, r, g).unwrap();
        // Right wave is a shock for Sod data; flux jump equals s * state jump.
        let speeds = sol.wave_speeds();
        let s_shock = *speeds.last().unwrap();
        let ahead = ConservedState::from_primitive(r.rho, r.v, 0.0, r.p, g);
        let behind_p = sol.sample(s_shock - 1e-9);
        let behind = ConservedState::from_primitive(behind_p.rho, behind_p.v, 0.0, behind_p.p, g);
        let f_ahead = flux(ahead, g, Direction::X).unwrap();
        let f_behind = flux(behind, g, Direction::X).unwrap();
        let lhs = f_ahead - f_behind;
        let rhs = (ahead - behind) * s_shock;
        assert!((lhs - rhs).abs_max() < 1e-6);
    }
}
