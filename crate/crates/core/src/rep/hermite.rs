//! Hermite functions and the matching Gauss–Hermite rule.

use nalgebra::DMatrix;

/// `M`-node Gauss–Hermite rule in the form used for Hermite-function Galerkin
/// matrices.
///
/// `modes[(k, i)] = √w̃ᵢ · hₖ(xᵢ)` for `k < M`, where `hₖ` are the orthonormal
/// Hermite functions and `w̃ᵢ = wᵢ e^{xᵢ²}`. These are exactly the normalized
/// eigenvectors of the Jacobi matrix, so no Hermite function is ever evaluated
/// far out in its Gaussian tail.
#[derive(Clone, Debug)]
pub(crate) struct Quadrature {
    pub nodes: Vec<f64>,
    pub modes: DMatrix<f64>,
    /// `ln √w̃ᵢ`.
    pub log_sqrt_weight: Vec<f64>,
}

impl Quadrature {
    pub fn new(m: usize) -> Self {
        let jacobi = DMatrix::from_fn(m, m, |r, c| {
            if r + 1 == c || c + 1 == r {
                (r.max(c) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let (nodes, mut modes) = crate::linalg::eigh_real(&jacobi);
        // Fix each eigenvector's sign against the recurrence at its largest entry;
        // the leading entry underflows for outer nodes and cannot be trusted.
        let mut log_sqrt_weight = Vec::with_capacity(m);
        for i in 0..m {
            let col = modes.column(i);
            let peak = col.iamax();
            let (log_w, sign) = christoffel(m, nodes[i], peak);
            if sign * modes[(peak, i)] < 0.0 {
                modes.column_mut(i).neg_mut();
            }
            log_sqrt_weight.push(0.5 * log_w);
        }
        Self { nodes, modes, log_sqrt_weight }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// `∫ hₖ f hₗ dx` for `k, l < n`, symmetric bitwise.
    pub fn galerkin(&self, n: usize, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let rows = self.modes.rows(0, n);
        let mut scaled = rows.into_owned();
        for (i, &x) in self.nodes.iter().enumerate() {
            let v = f(x);
            for k in 0..n {
                scaled[(k, i)] *= v;
            }
        }
        let g = scaled * rows.transpose();
        DMatrix::from_fn(n, n, |r, c| if r <= c { g[(r, c)] } else { g[(c, r)] })
    }
}

/// `ln w̃(x) = −ln Σ_{k<m} hₖ(x)²` and the sign of `h_probe(x)`, from a
/// rescaled recurrence so the Gaussian factor never underflows.
fn christoffel(m: usize, x: f64, probe: usize) -> (f64, f64) {
    // hₖ = π^{-1/4} e^{-x²/2} ĥₖ with ĥ₀ = 1.
    let (mut prev, mut cur) = (0.0_f64, 1.0_f64);
    let (mut sum, mut log_scale) = (1.0_f64, 0.0_f64);
    let mut sign = 1.0;
    for k in 0..m.saturating_sub(1) {
        let next = (2.0 / (k + 1) as f64).sqrt() * x * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
        sum += cur * cur;
        if k + 1 == probe {
            sign = cur.signum();
        }
        if cur.abs() > 1e100 {
            prev *= 1e-100;
            cur *= 1e-100;
            sum *= 1e-200;
            log_scale += 100.0 * std::f64::consts::LN_10;
        }
    }
    (x * x + 0.5 * std::f64::consts::PI.ln() - sum.ln() - 2.0 * log_scale, sign)
}

/// Orthonormal Hermite functions `h₀..h_{n-1}` at `x` by the stable recurrence.
#[cfg(test)]
pub(crate) fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut h = vec![0.0; n];
    if n == 0 {
        return h;
    }
    h[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n > 1 {
        h[1] = std::f64::consts::SQRT_2 * x * h[0];
    }
    for k in 1..n.saturating_sub(1) {
        h[k + 1] = (2.0 / (k + 1) as f64).sqrt() * x * h[k] - (k as f64 / (k + 1) as f64).sqrt() * h[k - 1];
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_match_recurrence() {
        let q = Quadrature::new(24);
        for i in [0, 5, 11, 23] {
            let h = hermite_functions(24, q.nodes[i]);
            let sw = q.log_sqrt_weight[i].exp();
            for (k, hk) in h.iter().enumerate().take(24) {
                assert!((q.modes[(k, i)] - sw * hk).abs() < 1e-12, "k={k} i={i}");
            }
        }
    }

    #[test]
    fn constant_function_gives_identity() {
        let q = Quadrature::new(40);
        let g = q.galerkin(10, |_| 1.0);
        assert!((g - DMatrix::<f64>::identity(10, 10)).amax() < 1e-12);
    }

    #[test]
    fn position_operator_matches_ladder() {
        // x hₙ = √(n/2) h_{n-1} + √((n+1)/2) h_{n+1}
        let q = Quadrature::new(40);
        let g = q.galerkin(10, |x| x);
        for n in 1..10 {
            assert!((g[(n - 1, n)] - (n as f64 / 2.0).sqrt()).abs() < 1e-12);
        }
        assert!(g[(0, 0)].abs() < 1e-12);
    }
}
