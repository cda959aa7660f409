//! Random-space discretization: uniform product distributions, the
//! multi-element decomposition, per-element orthonormal polynomial bases,
//! multi-index sets and the recombination of element-local statistics.

use crate::error::{Error, Result};

/// Product of independent uniform distributions on per-dimension supports.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpace {
    supports: Vec<(f64, f64)>,
}

impl RandomSpace {
    pub fn uniform(supports: Vec<(f64, f64)>) -> Result<Self> {
        if supports.is_empty() {
            return Err(Error::Scenario("random space needs at least one dimension".into()));
        }
        for &(a, b) in &supports {
            if !(a < b) {
                return Err(Error::Scenario(format!(
                    "invalid random support [{a}, {b}]"
                )));
            }
        }
        Ok(Self { supports })
    }

    pub fn dims(&self) -> usize {
        self.supports.len()
    }

    pub fn support(&self, dim: usize) -> (f64, f64) {
        self.supports[dim]
    }
}

/// One element of the multi-element partition of the random space.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiElement {
    pub index: Vec<usize>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// P(chi_l = 1), the probability mass carried by the element.
    pub probability: f64,
    pub volume: f64,
}

impl MultiElement {
    /// Reference coordinates in [0, 1]^N of a physical point in the element.
    pub fn to_reference(&self, xi: &[f64]) -> Vec<f64> {
        xi.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&x, (&a, &b))| (x - a) / (b - a))
            .collect()
    }

    pub fn from_reference(&self, r: &[f64]) -> Vec<f64> {
        r.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&t, (&a, &b))| a + (b - a) * t)
            .collect()
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        xi.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&x, (&a, &b))| x >= a && x <= b)
    }
}

/// Disjoint tensor partition of the random space with uniform breakpoints
/// per dimension, plus element probabilities under the uniform density.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiElementGrid {
    pub space: RandomSpace,
    pub breakpoints: Vec<Vec<f64>>,
    elements: Vec<MultiElement>,
}

pub fn build_multi_element_grid(
    space: &RandomSpace,
    elements_per_dim: &[usize],
) -> Result<MultiElementGrid> {
    if elements_per_dim.len() != space.dims() {
        return Err(Error::Scenario(format!(
            "expected {} per-dimension element counts, got {}",
            space.dims(),
            elements_per_dim.len()
        )));
    }
    if elements_per_dim.iter().any(|&n| n == 0) {
        return Err(Error::Scenario("element count must be at least 1".into()));
    }
    let breakpoints: Vec<Vec<f64>> = (0..space.dims())
        .map(|d| {
            let (a, b) = space.support(d);
            let n = elements_per_dim[d];
            (0..=n)
                .map(|k| a + (b - a) * (k as f64) / (n as f64))
                .collect()
        })
        .collect();

    let mut elements = Vec::new();
    let mut index = vec![0usize; space.dims()];
    loop {
        let mut lower = Vec::with_capacity(space.dims());
        let mut upper = Vec::with_capacity(space.dims());
        let mut probability = 1.0;
        let mut volume = 1.0;
        for d in 0..space.dims() {
            let lo = breakpoints[d][index[d]];
            let hi = breakpoints[d][index[d] + 1];
            let (a, b) = space.support(d);
            lower.push(lo);
            upper.push(hi);
            probability *= (hi - lo) / (b - a);
            volume *= hi - lo;
        }
        elements.push(MultiElement {
            index: index.clone(),
            lower,
            upper,
            probability,
            volume,
        });
        // Lexicographic advance, last dimension fastest.
        let mut d = space.dims();
        loop {
            if d == 0 {
                return Ok(MultiElementGrid {
                    space: space.clone(),
                    breakpoints,
                    elements,
                });
            }
            d -= 1;
            index[d] += 1;
            if index[d] < elements_per_dim[d] {
                break;
            }
            index[d] = 0;
        }
    }
}

impl MultiElementGrid {
    pub fn single_element(space: &RandomSpace) -> Self {
        build_multi_element_grid(space, &vec![1; space.dims()]).expect("valid single element")
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[MultiElement] {
        &self.elements
    }

    pub fn element(&self, l: usize) -> &MultiElement {
        &self.elements[l]
    }

    /// Index of the element containing `xi` (upper-closed only on the last
    /// element per dimension).
    pub fn locate(&self, xi: &[f64]) -> Option<usize> {
        let mut flat = 0usize;
        for d in 0..self.space.dims() {
            let pts = &self.breakpoints[d];
            let n = pts.len() - 1;
            let x = xi[d];
            if x < pts[0] || x > pts[n] {
                return None;
            }
            let mut k = pts[1..n].partition_point(|&p| p <= x);
            if k >= n {
                k = n - 1;
            }
            flat = flat * n + k;
        }
        Some(flat)
    }
}

/// Multi-index sets over the stochastic (complete) or spatial (tensor)
/// polynomial spaces. Indices are lexicographically sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiIndexSet {
    pub dims: usize,
    pub order: usize,
    indices: Vec<Vec<usize>>,
}

impl MultiIndexSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    pub fn index(&self, k: usize) -> &[usize] {
        &self.indices[k]
    }
}

/// All multi-indices with component sum at most `order`.
pub fn complete_index_set(dims: usize, order: usize) -> MultiIndexSet {
    let mut indices = Vec::new();
    let mut current = vec![0usize; dims];
    collect_complete(dims, order, 0, order, &mut current, &mut indices);
    indices.sort();
    indices.dedup();
    MultiIndexSet {
        dims,
        order,
        indices,
    }
}

fn collect_complete(
    dims: usize,
    order: usize,
    dim: usize,
    budget: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if dim == dims {
        out.push(current.clone());
        return;
    }
    for k in 0..=budget {
        current[dim] = k;
        collect_complete(dims, order, dim + 1, budget - k, current, out);
    }
    current[dim] = 0;
}

/// All multi-indices with every component at most `order`.
pub fn tensor_index_set(dims: usize, order: usize) -> MultiIndexSet {
    let mut indices = Vec::new();
    let mut current = vec![0usize; dims];
    loop {
        indices.push(current.clone());
        let mut d = dims;
        loop {
            if d == 0 {
                indices.sort();
                indices.dedup();
                return MultiIndexSet {
                    dims,
                    order,
                    indices,
                };
            }
            d -= 1;
            current[d] += 1;
            if current[d] <= order {
                break;
            }
            current[d] = 0;
        }
    }
}

/// Monic three-term recurrence coefficients of an orthogonal family:
/// p_{k+1} = (t - alpha_k) p_k - beta_k p_{k-1}. Only the uniform-density
/// (Legendre) family ships, but the evaluation path is generic in these
/// coefficients so other Wiener-Askey families can slot in.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCoefficients {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl RecurrenceCoefficients {
    /// Legendre on [-1, 1] with the normalized weight 1/2.
    pub fn legendre(max_degree: usize) -> Self {
        let alpha = vec![0.0; max_degree + 1];
        let mut beta = Vec::with_capacity(max_degree + 1);
        beta.push(1.0);
        for k in 1..=max_degree {
            let kf = k as f64;
            beta.push(kf * kf / (4.0 * kf * kf - 1.0));
        }
        Self { alpha, beta }
    }
}

/// Orthonormal polynomials on one reference interval [0, 1] with respect to
/// the uniform density, evaluated by the stabilized three-term recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis1d {
    pub max_degree: usize,
    recurrence: RecurrenceCoefficients,
    sqrt_beta: Vec<f64>,
}

impl OrthonormalBasis1d {
    pub fn uniform(max_degree: usize) -> Self {
        let recurrence = RecurrenceCoefficients::legendre(max_degree + 1);
        let sqrt_beta = recurrence.beta.iter().map(|&b| b.sqrt()).collect();
        Self {
            max_degree,
            recurrence,
            sqrt_beta,
        }
    }

    /// Evaluate phi_0 .. phi_max_degree at reference coordinate `r` in [0, 1].
    pub fn eval_all(&self, r: f64, out: &mut [f64]) {
        let t = 2.0 * r - 1.0;
        let n = out.len().min(self.max_degree + 1);
        if n == 0 {
            return;
        }
        out[0] = 1.0;
        if n == 1 {
            return;
        }
        // Orthonormal recurrence: sqrt(b_{k+1}) p_{k+1} = (t - a_k) p_k - sqrt(b_k) p_{k-1}.
        let mut prev = 0.0;
        let mut cur = 1.0;
        for k in 0..n - 1 {
            let next = ((t - self.recurrence.alpha[k]) * cur - self.sqrt_beta[k] * prev)
                / self.sqrt_beta[k + 1];
            out[k + 1] = next;
            prev = cur;
            cur = next;
        }
    }

    pub fn eval(&self, degree: usize, r: f64) -> f64 {
        let mut buf = vec![0.0; degree + 1];
        self.eval_all(r, &mut buf);
        buf[degree]
    }

    /// Derivative values d(phi_k)/dr at `r` (reference coordinate).
    pub fn eval_all_derivative(&self, r: f64, out: &mut [f64]) {
        let t = 2.0 * r - 1.0;
        let n = out.len().min(self.max_degree + 1);
        if n == 0 {
            return;
        }
        out[0] = 0.0;
        if n == 1 {
            return;
        }
        let mut p_prev = 0.0;
        let mut p = 1.0;
        let mut d_prev = 0.0;
        let mut d = 0.0;
        for k in 0..n - 1 {
            let p_next =
                ((t - self.recurrence.alpha[k]) * p - self.sqrt_beta[k] * p_prev) / self.sqrt_beta[k + 1];
            // Chain rule: dt/dr = 2.
            let d_next = ((t - self.recurrence.alpha[k]) * d + 2.0 * p - self.sqrt_beta[k] * d_prev)
                / self.sqrt_beta[k + 1];
            out[k + 1] = d_next;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
        }
    }
}

/// Multivariate orthonormal basis on one random element: products of the
/// per-dimension families over a multi-index set.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    pub modes: MultiIndexSet,
    pub basis1d: OrthonormalBasis1d,
}

pub fn orthonormal_basis_for(modes: &MultiIndexSet, order: usize) -> OrthonormalBasis {
    OrthonormalBasis {
        modes: modes.clone(),
        basis1d: OrthonormalBasis1d::uniform(order),
    }
}

impl OrthonormalBasis {
    /// Evaluate every multivariate mode at reference coordinates `r`.
    pub fn eval_modes(&self, r: &[f64], out: &mut [f64]) {
        let dims = self.modes.dims;
        let per_dim = self.basis1d.max_degree + 1;
        let mut vals = vec![0.0; dims * per_dim];
        for d in 0..dims {
            self.basis1d
                .eval_all(r[d], &mut vals[d * per_dim..(d + 1) * per_dim]);
        }
        for (k, idx) in self.modes.indices().iter().enumerate() {
            let mut v = 1.0;
            for d in 0..dims {
                v *= vals[d * per_dim + idx[d]];
            }
            out[k] = v;
        }
    }
}

/// Probability-weighted recombination of element means:
/// E(u) = sum_l P(chi_l = 1) u_{0,l}.
pub fn me_mean(zero_moments: &[[f64; 4]], grid: &MultiElementGrid) -> Result<[f64; 4]> {
    if zero_moments.len() != grid.n_elements() {
        return Err(Error::ElementCountMismatch {
            expected: grid.n_elements(),
            got: zero_moments.len(),
        });
    }
    let mut mean = [0.0; 4];
    for (m, el) in zero_moments.iter().zip(grid.elements()) {
        for c in 0..4 {
            mean[c] += el.probability * m[c];
        }
    }
    Ok(mean)
}

/// Variance recombination from per-element orthonormal coefficients:
/// Var(u) = sum_l (Var(u_l) + (u_{0,l} - E(u))^2) P(chi_l = 1) with
/// Var(u_l) = sum_{kappa != 0} u_{kappa,l}^2.
pub fn me_variance(
    coefficients: &[Vec<[f64; 4]>],
    grid: &MultiElementGrid,
    global_mean: [f64; 4],
) -> Result<[f64; 4]> {
    if coefficients.len() != grid.n_elements() {
        return Err(Error::ElementCountMismatch {
            expected: grid.n_elements(),
            got: coefficients.len(),
        });
    }
    let stats: Vec<([f64; 4], [f64; 4])> = coefficients
        .iter()
        .map(|coeffs| {
            let mean_l = coeffs[0];
            let mut var_l = [0.0; 4];
            for c_k in &coeffs[1..] {
                for c in 0..4 {
                    var_l[c] += c_k[c] * c_k[c];
                }
            }
            (mean_l, var_l)
        })
        .collect();
    Ok(me_combine_variance(&stats, grid, global_mean))
}

/// Shared recombination used by both the intrusive statistics (from
/// coefficients) and the collocation path (from nodal moments).
pub fn me_combine_variance(
    element_stats: &[([f64; 4], [f64; 4])],
    grid: &MultiElementGrid,
    global_mean: [f64; 4],
) -> [f64; 4] {
    let mut var = [0.0; 4];
    for ((mean_l, var_l), el) in element_stats.iter().zip(grid.elements()) {
        for c in 0..4 {
            let d = mean_l[c] - global_mean[c];
            var[c] += el.probability * (var_l[c] + d * d);
        }
    }
    for v in &mut var {
        // Clamp tiny negative round-off.
        if *v < 0.0 {
            debug_assert!(*v > -1e-14);
            *v = 0.0;
        }
    }
    var
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre_rule;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binom(n: usize, k: usize) -> usize {
        (1..=k).fold(1usize, |acc, i| acc * (n - k + i) / i)
    }

    #[test]
    fn complete_index_set_cardinality() {
        assert_eq!(complete_index_set(1, 10).len(), 11);
        assert_eq!(complete_index_set(3, 10).len(), 286);
        assert_eq!(binom(13, 3), 286);
        let set = complete_index_set(2, 0);
        assert_eq!(set.indices(), &[vec![0, 0]]);
        for (n, k) in [(2usize, 3usize), (4, 2), (3, 5)] {
            assert_eq!(complete_index_set(n, k).len(), binom(n + k, n));
        }
    }

    #[test]
    fn tensor_index_set_cardinality() {
        assert_eq!(tensor_index_set(2, 3).len(), 16);
        assert_eq!(tensor_index_set(1, 4).len(), 5);
    }

    #[test]
    fn multi_element_probabilities() {
        let space = RandomSpace::uniform(vec![(0.0, 1.0)]).unwrap();
        let grid = build_multi_element_grid(&space, &[2]).unwrap();
        assert_eq!(grid.n_elements(), 2);
        for el in grid.elements() {
            assert_relative_eq!(el.probability, 0.5, epsilon = 1e-15);
        }

        let space = RandomSpace::uniform(vec![(-1.0, 1.0)]).unwrap();
        let grid = build_multi_element_grid(&space, &[10]).unwrap();
        let total: f64 = grid.elements().iter().map(|e| e.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
        for el in grid.elements() {
            assert_relative_eq!(el.probability, 0.1, epsilon = 1e-14);
        }

        let space = RandomSpace::uniform(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let grid = build_multi_element_grid(&space, &[2, 2]).unwrap();
        assert_eq!(grid.n_elements(), 4);
        for el in grid.elements() {
            assert_relative_eq!(el.probability, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn locate_finds_elements() {
        let space = RandomSpace::uniform(vec![(-1.0, 1.0), (0.0, 2.0)]).unwrap();
        let grid = build_multi_element_grid(&space, &[4, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let xi = [rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0)];
            let l = grid.locate(&xi).unwrap();
            assert!(grid.element(l).contains(&xi));
        }
        assert_eq!(grid.locate(&[1.0, 2.0]), Some(grid.n_elements() - 1));
        assert_eq!(grid.locate(&[-1.5, 0.5]), None);
    }

    #[test]
    fn basis_constant_mode_is_one() {
        let basis = OrthonormalBasis1d::uniform(20);
        let mut vals = vec![0.0; 21];
        for r in [0.0, 0.3, 0.77, 1.0] {
            basis.eval_all(r, &mut vals);
            assert_eq!(vals[0], 1.0);
            assert!(vals.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn basis_linear_mode_matches_gram_schmidt() {
        // Gram-Schmidt on {1, r} under the uniform density on [0, 1] gives
        // sqrt(3) (2r - 1).
        let basis = OrthonormalBasis1d::uniform(3);
        for r in [0.0, 0.25, 0.5, 1.0] {
            assert_relative_eq!(
                basis.eval(1, r),
                3.0f64.sqrt() * (2.0 * r - 1.0),
                epsilon = 1e-14
            );
        }
        assert_relative_eq!(basis.eval(1, 1.0), 3.0f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn basis_orthonormality_by_quadrature() {
        let max_k = 20;
        let basis = OrthonormalBasis1d::uniform(max_k);
        let rule = gauss_legendre_rule(max_k + 1).unwrap();
        let mut vals = vec![0.0; max_k + 1];
        let mut gram = vec![vec![0.0; max_k + 1]; max_k + 1];
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            basis.eval_all(*x, &mut vals);
            for j in 0..=max_k {
                for k in 0..=max_k {
                    gram[j][k] += w * vals[j] * vals[k];
                }
            }
        }
        for j in 0..=max_k {
            for k in 0..=max_k {
                let want = if j == k { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[j][k], want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn basis_derivative_matches_difference_quotient() {
        let basis = OrthonormalBasis1d::uniform(8);
        let mut d = vec![0.0; 9];
        let mut lo = vec![0.0; 9];
        let mut hi = vec![0.0; 9];
        let h = 1e-6;
        for r in [0.1, 0.5, 0.9] {
            basis.eval_all_derivative(r, &mut d);
            basis.eval_all(r - h, &mut lo);
            basis.eval_all(r + h, &mut hi);
            for k in 0..=8 {
                let fd = (hi[k] - lo[k]) / (2.0 * h);
                assert_abs_diff_eq!(d[k], fd, epsilon = 1e-6 * (1.0 + d[k].abs()));
            }
        }
    }

    #[test]
    fn me_mean_examples() {
        let space = RandomSpace::uniform(vec![(0.0, 1.0)]).unwrap();
        let single = MultiElementGrid::single_element(&space);
        let m = me_mean(&[[2.0, 0.0, 0.0, 1.0]], &single).unwrap();
        assert_eq!(m, [2.0, 0.0, 0.0, 1.0]);

        let grid = build_multi_element_grid(&space, &[2]).unwrap();
        let m = me_mean(&[[2.0; 4], [4.0; 4]], &grid).unwrap();
        assert_relative_eq!(m[0], 3.0, epsilon = 1e-15);

        // probabilities {0.25, 0.75}: emulate via a 4-element grid merged 1 + 3.
        let grid4 = build_multi_element_grid(&space, &[4]).unwrap();
        let m = me_mean(&[[0.0; 4], [4.0; 4], [4.0; 4], [4.0; 4]], &grid4).unwrap();
        assert_relative_eq!(m[0], 3.0, epsilon = 1e-15);

        assert!(me_mean(&[[0.0; 4]], &grid).is_err());
    }

    #[test]
    fn me_variance_examples() {
        let space = RandomSpace::uniform(vec![(0.0, 1.0)]).unwrap();
        let grid = build_multi_element_grid(&space, &[2]).unwrap();

        // Constant field: zero variance.
        let coeffs = vec![vec![[2.0; 4], [0.0; 4]], vec![[2.0; 4], [0.0; 4]]];
        let var = me_variance(&coeffs, &grid, [2.0; 4]).unwrap();
        assert_eq!(var, [0.0; 4]);

        // Two equal-probability elements with local means 2 and 4.
        let coeffs = vec![vec![[2.0; 4]], vec![[4.0; 4]]];
        let var = me_variance(&coeffs, &grid, [3.0; 4]).unwrap();
        assert_relative_eq!(var[0], 1.0, epsilon = 1e-15);

        // Single element, coefficients (0, a): variance a^2 by Parseval.
        let single = MultiElementGrid::single_element(&space);
        let a = 0.7;
        let coeffs = vec![vec![[0.0; 4], [a; 4]]];
        let var = me_variance(&coeffs, &single, [0.0; 4]).unwrap();
        assert_relative_eq!(var[0], a * a, epsilon = 1e-15);
    }

    #[test]
    fn parseval_consistency_on_random_polynomials() {
        // A random polynomial of degree <= K_Gamma projected exactly must
        // reproduce the analytic mean and variance through the ME statistics.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let space = RandomSpace::uniform(vec![(-1.0, 1.0)]).unwrap();
        let k_gamma = 4usize;
        let modes = complete_index_set(1, k_gamma);
        for n_elem in [1usize, 2, 5] {
            let grid = build_multi_element_grid(&space, &[n_elem]).unwrap();
            let poly: Vec<f64> = (0..=k_gamma).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let eval = |xi: f64| poly.iter().rev().fold(0.0, |acc, &c| acc * xi + c);

            // Analytic moments over U(-1, 1) from monomial moments.
            let mono = |j: usize| -> f64 {
                if j % 2 == 1 {
                    0.0
                } else {
                    1.0 / (j as f64 + 1.0)
                }
            };
            let mut mean_exact = 0.0;
            let mut second = 0.0;
            for (i, &a) in poly.iter().enumerate() {
                mean_exact += a * mono(i);
                for (j, &b) in poly.iter().enumerate() {
                    second += a * b * mono(i + j);
                }
            }
            let var_exact = second - mean_exact * mean_exact;

            // Exact per-element projection by Gauss quadrature.
            let rule = gauss_legendre_rule(k_gamma + 1).unwrap();
            let basis = orthonormal_basis_for(&modes, k_gamma);
            let mut coeffs = Vec::new();
            for el in grid.elements() {
                let mut c = vec![[0.0; 4]; modes.len()];
                let mut phi = vec![0.0; modes.len()];
                for (r, w) in rule.nodes.iter().zip(&rule.weights) {
                    let xi = el.from_reference(&[*r]);
                    basis.eval_modes(&[*r], &mut phi);
                    let v = eval(xi[0]);
                    for k in 0..modes.len() {
                        c[k][0] += w * v * phi[k];
                    }
                }
                coeffs.push(c);
            }
            let zeros: Vec<[f64; 4]> = coeffs.iter().map(|c| c[0]).collect();
            let mean = me_mean(&zeros, &grid).unwrap();
            let var = me_variance(&coeffs, &grid, mean).unwrap();
            assert_abs_diff_eq!(mean[0], mean_exact, epsilon = 1e-12);
            assert_abs_diff_eq!(var[0], var_exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn refinement_preserves_mean() {
        // Splitting an element in two leaves the recombined mean unchanged
        // for polynomial data.
        let space = RandomSpace::uniform(vec![(0.0, 1.0)]).unwrap();
        let k_gamma = 3usize;
        let modes = complete_index_set(1, k_gamma);
        let rule = gauss_legendre_rule(k_gamma + 1).unwrap();
        let basis = orthonormal_basis_for(&modes, k_gamma);
        let poly = [0.3, -1.2, 0.5, 2.0];
        let eval = |xi: f64| poly.iter().rev().fold(0.0, |acc, &c| acc * xi + c);

        let mut means = Vec::new();
        for n_elem in [1usize, 2] {
            let grid = build_multi_element_grid(&space, &[n_elem]).unwrap();
            let mut zeros = Vec::new();
            for el in grid.elements() {
                let mut c0 = [0.0; 4];
                let mut phi = vec![0.0; modes.len()];
                for (r, w) in rule.nodes.iter().zip(&rule.weights) {
                    let xi = el.from_reference(&[*r]);
                    basis.eval_modes(&[*r], &mut phi);
                    c0[0] += w * eval(xi[0]);
                }
                zeros.push(c0);
            }
            means.push(me_mean(&zeros, &grid).unwrap()[0]);
        }
        assert_abs_diff_eq!(means[0], means[1], epsilon = 1e-12);
    }
}
