//! Compressible Euler physics: states, fluxes, wave speeds, admissibility
//! and the closed-form blending factor used by the hyperbolicity limiter.

use std::ops::{Add, Div, Mul, Sub};

use crate::error::{Error, Result};

/// One conserved Euler state (density, x/y-momentum, total energy).
///
/// The same type is used for flux vectors, which keeps the arithmetic
/// operators reusable in the update loops.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConservedState {
    pub rho: f64,
    pub m1: f64,
    pub m2: f64,
    pub e: f64,
}

impl ConservedState {
    pub const fn new(rho: f64, m1: f64, m2: f64, e: f64) -> Self {
        Self { rho, m1, m2, e }
    }

    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);

    pub fn from_primitive(rho: f64, v1: f64, v2: f64, p: f64, gas: GasModel) -> Self {
        Self {
            rho,
            m1: rho * v1,
            m2: rho * v2,
            e: p / (gas.gamma - 1.0) + 0.5 * rho * (v1 * v1 + v2 * v2),
        }
    }

    pub fn as_array(self) -> [f64; 4] {
        [self.rho, self.m1, self.m2, self.e]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(self) -> bool {
        self.rho.is_finite() && self.m1.is_finite() && self.m2.is_finite() && self.e.is_finite()
    }

    /// Momentum component along `dir`.
    pub fn momentum(self, dir: Direction) -> f64 {
        match dir {
            Direction::X => self.m1,
            Direction::Y => self.m2,
        }
    }

    pub fn abs_max(self) -> f64 {
        self.rho
            .abs()
            .max(self.m1.abs())
            .max(self.m2.abs())
            .max(self.e.abs())
    }
}

impl Add for ConservedState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.rho + o.rho, self.m1 + o.m1, self.m2 + o.m2, self.e + o.e)
    }
}

impl Sub for ConservedState {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.rho - o.rho, self.m1 - o.m1, self.m2 - o.m2, self.e - o.e)
    }
}

impl Mul<f64> for ConservedState {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.rho * s, self.m1 * s, self.m2 * s, self.e * s)
    }
}

impl Div<f64> for ConservedState {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        self * (1.0 / s)
    }
}

/// Ideal-gas model; only the adiabatic exponent enters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidGamma(gamma));
        }
        Ok(Self { gamma })
    }

    pub fn air() -> Self {
        Self { gamma: 1.4 }
    }
}

/// Coordinate direction selecting the first or second flux component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

/// p = (gamma - 1) (E - (m1^2 + m2^2) / (2 rho)). May be negative; callers
/// test admissibility separately.
pub fn pressure(u: ConservedState, gas: GasModel) -> Result<f64> {
    if u.rho == 0.0 {
        return Err(Error::ZeroDensity(u));
    }
    Ok((gas.gamma - 1.0) * (u.e - 0.5 * (u.m1 * u.m1 + u.m2 * u.m2) / u.rho))
}

/// True iff the state lies in the hyperbolicity set: rho > 0 and p > 0,
/// with strict inequalities. Non-finite entries are never admissible.
pub fn is_admissible(u: ConservedState, gas: GasModel) -> bool {
    if !u.is_finite() || !(u.rho > 0.0) {
        return false;
    }
    let p = (gas.gamma - 1.0) * (u.e - 0.5 * (u.m1 * u.m1 + u.m2 * u.m2) / u.rho);
    p > 0.0
}

fn require_admissible(u: ConservedState, gas: GasModel, context: &'static str) -> Result<()> {
    if is_admissible(u, gas) {
        Ok(())
    } else {
        Err(Error::InadmissibleState { context, state: u })
    }
}

/// Physical flux component along `dir`.
pub fn flux(u: ConservedState, gas: GasModel, dir: Direction) -> Result<ConservedState> {
    if !(u.rho > 0.0) {
        return Err(Error::InadmissibleState {
            context: "flux",
            state: u,
        });
    }
    let p = (gas.gamma - 1.0) * (u.e - 0.5 * (u.m1 * u.m1 + u.m2 * u.m2) / u.rho);
    Ok(flux_unchecked(u, p, dir))
}

#[inline]
pub(crate) fn flux_unchecked(u: ConservedState, p: f64, dir: Direction) -> ConservedState {
    let inv_rho = 1.0 / u.rho;
    match dir {
        Direction::X => {
            let v = u.m1 * inv_rho;
            ConservedState::new(u.m1, u.m1 * v + p, u.m2 * v, (u.e + p) * v)
        }
        Direction::Y => {
            let v = u.m2 * inv_rho;
            ConservedState::new(u.m2, u.m1 * v, u.m2 * v + p, (u.e + p) * v)
        }
    }
}

pub fn sound_speed(u: ConservedState, gas: GasModel) -> Result<f64> {
    require_admissible(u, gas, "sound_speed")?;
    let p = pressure(u, gas)?;
    Ok((gas.gamma * p / u.rho).sqrt())
}

/// Smallest and largest characteristic speed (v - c, v + c) along `dir`.
pub fn wave_speeds(u: ConservedState, gas: GasModel, dir: Direction) -> Result<(f64, f64)> {
    require_admissible(u, gas, "wave_speeds")?;
    let p = (gas.gamma - 1.0) * (u.e - 0.5 * (u.m1 * u.m1 + u.m2 * u.m2) / u.rho);
    let c = (gas.gamma * p / u.rho).sqrt();
    let v = u.momentum(dir) / u.rho;
    Ok((v - c, v + c))
}

/// |v| + c along `dir`; the quantity entering the CFL condition and the
/// Lax-Friedrichs viscosity. Assumes the caller verified admissibility.
#[inline]
pub(crate) fn max_signal_speed_unchecked(u: ConservedState, gas: GasModel, dir: Direction) -> f64 {
    let p = (gas.gamma - 1.0) * (u.e - 0.5 * (u.m1 * u.m1 + u.m2 * u.m2) / u.rho);
    let c = (gas.gamma * p / u.rho).sqrt();
    (u.momentum(dir) / u.rho).abs() + c
}

/// Lax-Friedrichs numerical flux with a global viscosity constant.
pub fn lax_friedrichs_flux(
    ul: ConservedState,
    ur: ConservedState,
    lambda_max: f64,
    gas: GasModel,
    dir: Direction,
) -> Result<ConservedState> {
    require_admissible(ul, gas, "lax_friedrichs_flux (left)")?;
    require_admissible(ur, gas, "lax_friedrichs_flux (right)")?;
    let fl = flux(ul, gas, dir)?;
    let fr = flux(ur, gas, dir)?;
    Ok((fl + fr - (ur - ul) * lambda_max) * 0.5)
}

/// Roe mean values used for the HLLE signal speed estimates.
#[derive(Debug, Clone, Copy)]
pub struct RoeAverage {
    pub v1: f64,
    pub v2: f64,
    pub enthalpy: f64,
}

impl RoeAverage {
    pub fn sound_speed(&self, gas: GasModel) -> f64 {
        let q2 = self.v1 * self.v1 + self.v2 * self.v2;
        ((gas.gamma - 1.0) * (self.enthalpy - 0.5 * q2)).max(0.0).sqrt()
    }

    pub fn wave_speeds(&self, gas: GasModel, dir: Direction) -> (f64, f64) {
        let c = self.sound_speed(gas);
        let v = match dir {
            Direction::X => self.v1,
            Direction::Y => self.v2,
        };
        (v - c, v + c)
    }
}

/// Square-root-density weighted averages of velocity and total enthalpy.
pub fn roe_average(ul: ConservedState, ur: ConservedState, gas: GasModel) -> Result<RoeAverage> {
    if !(ul.rho > 0.0) || !(ur.rho > 0.0) {
        return Err(Error::InadmissibleState {
            context: "roe_average",
            state: if ul.rho > 0.0 { ur } else { ul },
        });
    }
    let sl = ul.rho.sqrt();
    let sr = ur.rho.sqrt();
    let pl = pressure(ul, gas)?;
    let pr = pressure(ur, gas)?;
    let hl = (ul.e + pl) / ul.rho;
    let hr = (ur.e + pr) / ur.rho;
    let w = 1.0 / (sl + sr);
    Ok(RoeAverage {
        v1: (sl * ul.m1 / ul.rho + sr * ur.m1 / ur.rho) * w,
        v2: (sl * ul.m2 / ul.rho + sr * ur.m2 / ur.rho) * w,
        enthalpy: (sl * hl + sr * hr) * w,
    })
}

/// HLLE numerical flux with Roe-based signal speeds clipped to include zero.
pub fn hlle_flux(
    ul: ConservedState,
    ur: ConservedState,
    gas: GasModel,
    dir: Direction,
) -> Result<ConservedState> {
    require_admissible(ul, gas, "hlle_flux (left)")?;
    require_admissible(ur, gas, "hlle_flux (right)")?;
    let roe = roe_average(ul, ur, gas)?;
    let (roe_min, roe_max) = roe.wave_speeds(gas, dir);
    let (l_min, _) = wave_speeds(ul, gas, dir)?;
    let (_, r_max) = wave_speeds(ur, gas, dir)?;
    let b_minus = roe_min.min(l_min).min(0.0);
    let b_plus = roe_max.max(r_max).max(0.0);
    let fl = flux(ul, gas, dir)?;
    let fr = flux(ur, gas, dir)?;
    let span = b_plus - b_minus;
    debug_assert!(span > 0.0);
    Ok((fl * b_plus - fr * b_minus + (ur - ul) * (b_plus * b_minus)) / span)
}

/// Minimal theta in [0, 1] such that `theta * mean + (1 - theta) * point`
/// is admissible. The caller adds the epsilon shift; theta = 0 means the
/// point needs no limiting.
pub fn limiter_theta(mean: ConservedState, point: ConservedState, gas: GasModel) -> Result<f64> {
    if !is_admissible(mean, gas) {
        return Err(Error::InadmissibleState {
            context: "limiter_theta (mean)",
            state: mean,
        });
    }
    if is_admissible(point, gas) {
        return Ok(0.0);
    }

    // Density is linear along the blend; it only constrains when the point
    // density is non-positive.
    let theta_rho = if point.rho == mean.rho {
        0.0
    } else {
        cut(point.rho / (point.rho - mean.rho))
    };

    // The pressure constraint: with b(theta) the blended state,
    // g(theta) = rho_b * E_b - |m_b|^2 / 2 is a quadratic in theta that is
    // positive iff the blended pressure is positive (given rho_b > 0).
    let d_rho = mean.rho - point.rho;
    let d_m1 = mean.m1 - point.m1;
    let d_m2 = mean.m2 - point.m2;
    let d_e = mean.e - point.e;
    let a = d_e * d_rho - 0.5 * (d_m1 * d_m1 + d_m2 * d_m2);
    let b = point.e * d_rho + point.rho * d_e - point.m1 * d_m1 - point.m2 * d_m2;
    let c = point.e * point.rho - 0.5 * (point.m1 * point.m1 + point.m2 * point.m2);

    let (theta_p_minus, theta_p_plus) = if a == 0.0 {
        if b == 0.0 {
            (0.0, 0.0)
        } else {
            (cut(-c / b), 0.0)
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            // No real roots: g has one sign, and g(1) > 0 for an admissible
            // mean, so the pressure constraint never binds.
            (0.0, 0.0)
        } else {
            let sq = disc.sqrt();
            let q = -0.5 * (b + sq.copysign(if b == 0.0 { 1.0 } else { b }));
            let r1 = q / a;
            let r2 = if q == 0.0 { 0.0 } else { c / q };
            (cut(r1), cut(r2))
        }
    };

    Ok(theta_rho.max(theta_p_minus).max(theta_p_plus))
}

#[inline]
fn cut(x: f64) -> f64 {
    if (0.0..=1.0).contains(&x) {
        x
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gas() -> GasModel {
        GasModel::air()
    }

    pub(crate) fn random_admissible(rng: &mut impl Rng) -> ConservedState {
        let rho = rng.gen_range(0.1..10.0);
        let v1 = rng.gen_range(-5.0..5.0);
        let v2 = rng.gen_range(-5.0..5.0);
        let p = rng.gen_range(0.01..10.0);
        ConservedState::from_primitive(rho, v1, v2, p, gas())
    }

    #[test]
    fn pressure_examples() {
        let g = gas();
        let p = pressure(ConservedState::new(1.0, 0.0, 0.0, 2.5), g).unwrap();
        assert_relative_eq!(p, 1.0, epsilon = 1e-14);
        let p = pressure(ConservedState::new(0.125, 0.0, 0.0, 0.25), g).unwrap();
        assert_relative_eq!(p, 0.1, epsilon = 1e-14);
        // hand evaluation: 0.4 * (3 - 4/(2*2)) = 0.8
        let p = pressure(ConservedState::new(2.0, 2.0, 0.0, 3.0), g).unwrap();
        assert_relative_eq!(p, 0.8, epsilon = 1e-14);
        assert!(pressure(ConservedState::new(0.0, 0.0, 0.0, 1.0), g).is_err());
    }

    #[test]
    fn flux_examples() {
        let g = gas();
        let u = ConservedState::new(1.0, 0.0, 0.0, 2.5);
        let fx = flux(u, g, Direction::X).unwrap();
        let fy = flux(u, g, Direction::Y).unwrap();
        for k in 0..4 {
            assert_relative_eq!(fx.as_array()[k], [0.0, 1.0, 0.0, 0.0][k], epsilon = 1e-15);
            assert_relative_eq!(fy.as_array()[k], [0.0, 0.0, 1.0, 0.0][k], epsilon = 1e-15);
        }

        // p = 0.4 * (2.5 - 0.5) = 0.8
        let u = ConservedState::new(1.0, 1.0, 0.0, 2.5);
        let fx = flux(u, g, Direction::X).unwrap();
        assert_relative_eq!(fx.rho, 1.0, epsilon = 1e-14);
        assert_relative_eq!(fx.m1, 1.8, epsilon = 1e-14);
        assert_relative_eq!(fx.m2, 0.0, epsilon = 1e-14);
        assert_relative_eq!(fx.e, 3.3, epsilon = 1e-14);

        assert!(flux(ConservedState::new(-1.0, 0.0, 0.0, 1.0), g, Direction::X).is_err());
    }

    #[test]
    fn wave_speed_examples() {
        let g = gas();
        let (lo, hi) = wave_speeds(ConservedState::new(1.0, 0.0, 0.0, 2.5), g, Direction::X).unwrap();
        assert_relative_eq!(lo, -1.4f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(hi, 1.4f64.sqrt(), epsilon = 1e-14);

        let c = (1.4f64 * 0.8).sqrt();
        let (lo, hi) = wave_speeds(ConservedState::new(1.0, 1.0, 0.0, 2.5), g, Direction::X).unwrap();
        assert_relative_eq!(lo, 1.0 - c, epsilon = 1e-14);
        assert_relative_eq!(hi, 1.0 + c, epsilon = 1e-14);

        let (lo, hi) = wave_speeds(ConservedState::new(1.0, 1.0, 0.0, 2.5), g, Direction::Y).unwrap();
        assert_relative_eq!(lo, -c, epsilon = 1e-14);
        assert_relative_eq!(hi, c, epsilon = 1e-14);
    }

    #[test]
    fn admissibility_examples() {
        let g = gas();
        assert!(is_admissible(ConservedState::new(1.0, 0.0, 0.0, 2.5), g));
        assert!(!is_admissible(ConservedState::new(-0.1, 0.0, 0.0, 2.5), g));
        // E - m^2 / (2 rho) = 2.5 - 4.5 < 0
        assert!(!is_admissible(ConservedState::new(1.0, 3.0, 0.0, 2.5), g));
        assert!(!is_admissible(ConservedState::new(f64::NAN, 0.0, 0.0, 2.5), g));
        assert!(!is_admissible(ConservedState::new(1.0, 0.0, f64::NAN, 2.5), g));
    }

    #[test]
    fn convexity_of_admissible_set() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10_000 {
            let a = random_admissible(&mut rng);
            let b = random_admissible(&mut rng);
            let t: f64 = rng.gen_range(0.0..=1.0);
            let blend = a * t + b * (1.0 - t);
            assert!(is_admissible(blend, g), "blend {blend:?} of {a:?}, {b:?}");
        }
    }

    #[test]
    fn theta_zero_for_admissible_point() {
        let g = gas();
        let mean = ConservedState::new(1.0, 0.0, 0.0, 2.5);
        let point = ConservedState::new(2.0, 1.0, 0.0, 5.0);
        assert_eq!(limiter_theta(mean, point, g).unwrap(), 0.0);
    }

    #[test]
    fn theta_density_only_case() {
        let g = gas();
        // Fields chosen so that only the density constraint binds.
        let mean = ConservedState::new(1.0, 0.0, 0.0, 10.0);
        let point = ConservedState::new(-1.0, 0.0, 0.0, 10.0);
        let theta = limiter_theta(mean, point, g).unwrap();
        assert_relative_eq!(theta, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn theta_rejects_inadmissible_mean() {
        let g = gas();
        let mean = ConservedState::new(-1.0, 0.0, 0.0, 1.0);
        assert!(limiter_theta(mean, ConservedState::new(1.0, 0.0, 0.0, 1.0), g).is_err());
    }

    fn bisect_theta(mean: ConservedState, point: ConservedState, g: GasModel) -> f64 {
        if is_admissible(point, g) {
            return 0.0;
        }
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if is_admissible(mean * mid + point * (1.0 - mid), g) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn theta_matches_bisection_oracle() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut limited = 0;
        for _ in 0..1000 {
            let mean = random_admissible(&mut rng);
            // Random, frequently inadmissible point.
            let point = ConservedState::new(
                rng.gen_range(-2.0..4.0),
                rng.gen_range(-6.0..6.0),
                rng.gen_range(-6.0..6.0),
                rng.gen_range(-2.0..6.0),
            );
            let theta = limiter_theta(mean, point, g).unwrap();
            let oracle = bisect_theta(mean, point, g);
            assert_abs_diff_eq!(theta, oracle, epsilon = 1e-10);
            if theta > 0.0 {
                limited += 1;
                // Slightly past theta* the blend must be admissible.
                let shifted = (theta + 1e-9).min(1.0);
                assert!(is_admissible(mean * shifted + point * (1.0 - shifted), g));
            }
        }
        assert!(limited > 200, "oracle exercised only {limited} limited cases");
    }

    #[test]
    fn lax_friedrichs_consistency_and_pairing() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let u = random_admissible(&mut rng);
            for dir in [Direction::X, Direction::Y] {
                let f = flux(u, g, dir).unwrap();
                let lf = lax_friedrichs_flux(u, u, 10.0, g, dir).unwrap();
                assert!((lf - f).abs_max() < 1e-13 * (1.0 + f.abs_max()));
            }
        }
    }

    #[test]
    fn lax_friedrichs_matches_formula_on_sod_states() {
        let g = gas();
        let ul = ConservedState::new(1.0, 0.0, 0.0, 2.5);
        let ur = ConservedState::new(0.125, 0.0, 0.0, 0.25);
        let lambda = 10.0;
        let got = lax_friedrichs_flux(ul, ur, lambda, g, Direction::X).unwrap();
        // Independent evaluation of the flux average plus dissipation.
        let fl = [0.0, 1.0, 0.0, 0.0];
        let fr = [0.0, 0.1, 0.0, 0.0];
        for k in 0..4 {
            let want = 0.5 * (fl[k] + fr[k] - lambda * (ur.as_array()[k] - ul.as_array()[k]));
            assert_relative_eq!(got.as_array()[k], want, epsilon = 1e-14);
        }
    }

    #[test]
    fn hlle_consistency_and_upwind_branch() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let u = random_admissible(&mut rng);
            for dir in [Direction::X, Direction::Y] {
                let f = flux(u, g, dir).unwrap();
                let h = hlle_flux(u, u, g, dir).unwrap();
                assert!((h - f).abs_max() < 1e-13 * (1.0 + f.abs_max()));
            }
        }

        // Fully right-moving fan: all eigenvalues positive, flux upwinds to f(uL).
        let ul = ConservedState::from_primitive(1.0, 5.0, 0.0, 1.0, g);
        let ur = ConservedState::from_primitive(1.1, 5.2, 0.0, 1.1, g);
        let h = hlle_flux(ul, ur, g, Direction::X).unwrap();
        let f = flux(ul, g, Direction::X).unwrap();
        assert!((h - f).abs_max() < 1e-13 * f.abs_max());
    }

    #[test]
    fn hlle_matches_formula_on_sod_states() {
        let g = gas();
        let ul = ConservedState::new(1.0, 0.0, 0.0, 2.5);
        let ur = ConservedState::new(0.125, 0.0, 0.0, 0.25);
        let got = hlle_flux(ul, ur, g, Direction::X).unwrap();

        // Scripted evaluation with explicit Roe averages.
        let sl = 1.0f64.sqrt();
        let sr = 0.125f64.sqrt();
        let hl = (2.5 + 1.0) / 1.0;
        let hr = (0.25 + 0.1) / 0.125;
        let h_bar = (sl * hl + sr * hr) / (sl + sr);
        let v_bar = 0.0;
        let c_bar = (0.4 * (h_bar - 0.5 * v_bar * v_bar)).sqrt();
        let cl = (1.4f64 * 1.0 / 1.0).sqrt();
        let cr = (1.4f64 * 0.1 / 0.125).sqrt();
        let b_minus = (v_bar - c_bar).min(-cl).min(0.0);
        let b_plus = (v_bar + c_bar).max(cr).max(0.0);
        let fl = [0.0, 1.0, 0.0, 0.0];
        let fr = [0.0, 0.1, 0.0, 0.0];
        for k in 0..4 {
            let jump = ur.as_array()[k] - ul.as_array()[k];
            let want =
                (b_plus * fl[k] - b_minus * fr[k] + b_plus * b_minus * jump) / (b_plus - b_minus);
            assert_relative_eq!(got.as_array()[k], want, epsilon = 1e-13);
        }
    }

    #[test]
    fn roe_average_examples() {
        let g = gas();
        let u = ConservedState::from_primitive(1.3, 0.7, -0.2, 2.0, g);
        let roe = roe_average(u, u, g).unwrap();
        assert_relative_eq!(roe.v1, 0.7, epsilon = 1e-14);
        assert_relative_eq!(roe.v2, -0.2, epsilon = 1e-14);
        let h = (u.e + pressure(u, g).unwrap()) / u.rho;
        assert_relative_eq!(roe.enthalpy, h, epsilon = 1e-14);

        // densities (1, 4), velocities (0, 3): sqrt-density weights 1 and 2.
        let ul = ConservedState::from_primitive(1.0, 0.0, 0.0, 1.0, g);
        let ur = ConservedState::from_primitive(4.0, 3.0, 0.0, 1.0, g);
        let roe = roe_average(ul, ur, g).unwrap();
        assert_relative_eq!(roe.v1, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn first_order_update_preserves_positivity() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let dx = 1.0;
        for trial in 0..10_000 {
            let triple = [
                random_admissible(&mut rng),
                random_admissible(&mut rng),
                random_admissible(&mut rng),
            ];
            let lambda = triple
                .iter()
                .map(|u| max_signal_speed_unchecked(*u, g, Direction::X))
                .fold(0.0f64, f64::max);
            let use_hlle = trial % 2 == 1;
            let cfl = if use_hlle { 0.5 } else { 1.0 };
            let dt = cfl * dx / lambda;
            let [a, b, c] = triple;
            let (f_left, f_right) = if use_hlle {
                (
                    hlle_flux(a, b, g, Direction::X).unwrap(),
                    hlle_flux(b, c, g, Direction::X).unwrap(),
                )
            } else {
                (
                    lax_friedrichs_flux(a, b, lambda, g, Direction::X).unwrap(),
                    lax_friedrichs_flux(b, c, lambda, g, Direction::X).unwrap(),
                )
            };
            let next = b - (f_right - f_left) * (dt / dx);
            assert!(
                is_admissible(next, g),
                "trial {trial}: {next:?} from {a:?} {b:?} {c:?}"
            );
        }
    }
}
