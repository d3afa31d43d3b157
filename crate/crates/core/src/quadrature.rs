//! Product Gauss-Legendre (in `cos theta`) x uniform-`phi` quadrature for the
//! normalized measure `dn = sin theta dtheta dphi / (4 pi)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::SphericalDirection;
use crate::scalar::{compensated_sum, Real};

pub const DEFAULT_ORDER_THETA: usize = 128;
pub const DEFAULT_ORDER_PHI: usize = 256;

/// Quadrature nodes with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid<T> {
    nodes: Vec<(SphericalDirection<T>, T)>,
    order_theta: usize,
    order_phi: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    let one = T::one();
    let two = T::lit(2.0);
    let nf = T::from_count(n);
    let mut out = vec![(T::zero(), T::zero()); n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root
        let mut x = (T::PI() * (T::from_count(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (one, x);
            for k in 2..=n {
                let kf = T::from_count(k);
                let p2 = ((two * kf - one) * x * p1 - (kf - one) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = nf * (x * p1 - p0) / (x * x - one);
            let dx = p1 / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * T::lit(2.0) {
                break;
            }
        }
        let (mut p0, mut p1) = (one, x);
        for k in 2..=n {
            let kf = T::from_count(k);
            let p2 = ((two * kf - one) * x * p1 - (kf - one) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = nf * (x * p1 - p0) / (x * x - one);
        let w = two / ((one - x * x) * dp * dp);
        out[n - 1 - i] = (x, w);
        out[i] = (-x, w);
    }
    out
}

impl<T: Real> SphereGrid<T> {
    pub fn new(order_theta: usize, order_phi: usize) -> Result<Self> {
        build_grid(order_theta, order_phi)
    }

    pub fn nodes(&self) -> &[(SphericalDirection<T>, T)] {
        &self.nodes
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.order_theta, self.order_phi)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Grid with both orders halved (clamped to the minimum valid orders).
    pub fn coarsened(&self) -> Result<Self> {
        build_grid((self.order_theta / 2).max(2), (self.order_phi / 2).max(4))
    }

    pub fn integrate<F>(&self, f: F) -> Result<T>
    where
        F: Fn(&SphericalDirection<T>) -> T + Sync,
    {
        integrate(self, f)
    }

    /// Node values `f(d_i)` in index order, evaluated in parallel.
    pub fn evaluate<V, F>(&self, f: F) -> Vec<V>
    where
        V: Send,
        F: Fn(&SphericalDirection<T>) -> V + Sync,
    {
        self.nodes.par_iter().map(|(d, _)| f(d)).collect()
    }

    /// `sum_i w_i v_i` over precomputed node values, failing on non-finite ones.
    pub fn reduce(&self, values: &[T]) -> Result<T> {
        debug_assert_eq!(values.len(), self.nodes.len());
        for (index, (v, (d, _))) in values.iter().zip(self.nodes.iter()).enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand {
                    index,
                    theta: d.theta().to_f64_lossy(),
                    phi: d.phi().to_f64_lossy(),
                });
            }
        }
        Ok(compensated_sum(
            values.iter().zip(self.nodes.iter()).map(|(&v, &(_, w))| w * v),
        ))
    }
}

pub fn build_grid<T: Real>(order_theta: usize, order_phi: usize) -> Result<SphereGrid<T>> {
    if order_theta < 2 || order_phi < 4 {
        return Err(Error::InvalidGridOrders { order_theta, order_phi });
    }
    let rule = gauss_legendre::<T>(order_theta);
    let phi_step = T::TAU() / T::from_count(order_phi);
    let phi_weight = T::one() / T::from_count(order_phi);
    let half = T::lit(0.5);
    let mut nodes = Vec::with_capacity(order_theta * order_phi);
    for &(u, wu) in &rule {
        let theta = u.max(-T::one()).min(T::one()).acos();
        for j in 0..order_phi {
            let phi = phi_step * T::from_count(j);
            let d = SphericalDirection::new(theta, phi)?;
            nodes.push((d, wu * half * phi_weight));
        }
    }
    // absorb the residual rounding of the Gauss weights into the normalization
    let total = compensated_sum(nodes.iter().map(|n| n.1));
    for n in nodes.iter_mut() {
        n.1 = n.1 / total;
    }
    Ok(SphereGrid {
        nodes,
        order_theta,
        order_phi,
    })
}

/// `sum_i w_i f(d_i)`, gathered in parallel and reduced in node order.
pub fn integrate<T: Real, F>(g: &SphereGrid<T>, f: F) -> Result<T>
where
    F: Fn(&SphericalDirection<T>) -> T + Sync,
{
    let values = g.evaluate(f);
    g.reduce(&values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedIntegral<T> {
    pub value: T,
    pub error_estimate: T,
}

/// Integrates on `base_orders` and on `factor * base_orders`; reports the
/// refined value and `|refined - base|`.
pub fn integrate_with_refinement<T: Real, F>(
    f: F,
    base_orders: (usize, usize),
    factor: usize,
) -> Result<RefinedIntegral<T>>
where
    F: Fn(&SphericalDirection<T>) -> T + Sync,
{
    if factor < 2 {
        return Err(Error::InvalidRefinementFactor(factor));
    }
    let base = build_grid::<T>(base_orders.0, base_orders.1)?;
    let fine = build_grid::<T>(base_orders.0 * factor, base_orders.1 * factor)?;
    let coarse_value = integrate(&base, &f)?;
    let value = integrate(&fine, &f)?;
    Ok(RefinedIntegral {
        value,
        error_estimate: (value - coarse_value).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_small_orders() {
        assert!(build_grid::<f64>(1, 8).is_err());
        assert!(build_grid::<f64>(4, 3).is_err());
        assert!(integrate_with_refinement(|_: &SphericalDirection<f64>| 1.0, (4, 8), 1).is_err());
    }

    #[test]
    fn gauss_legendre_small_rules() {
        let r = gauss_legendre::<f64>(2);
        assert_abs_diff_eq!(r[1].0, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r[0].1, 1.0, epsilon = 1e-15);
        let r3 = gauss_legendre::<f64>(3);
        assert_abs_diff_eq!(r3[1].0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r3[1].1, 8.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r3[2].0, 0.6f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn weights_are_normalized_and_positive() {
        let g = build_grid::<f64>(17, 9).unwrap();
        assert_eq!(g.len(), 17 * 9);
        assert!(g.nodes().iter().all(|n| n.1 > 0.0));
        assert_abs_diff_eq!(g.nodes().iter().map(|n| n.1).sum::<f64>(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn moments() {
        let g = build_grid::<f64>(16, 8).unwrap();
        assert_abs_diff_eq!(g.integrate(|_| 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.integrate(|d| d.theta().cos()).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            g.integrate(|d| d.theta().cos().powi(2)).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            g.integrate(|d| (1.0 + d.theta().cos()) / 2.0).unwrap(),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn non_finite_integrand_names_the_node() {
        let g = build_grid::<f64>(4, 4).unwrap();
        let err = g.integrate(|d| if d.phi() > 3.0 { f64::NAN } else { 1.0 }).unwrap_err();
        match err {
            Error::NonFiniteIntegrand { index, phi, .. } => {
                assert_eq!(index, 2);
                assert!(phi > 3.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn refinement_of_constant_and_polynomial() {
        let r = integrate_with_refinement(|_: &SphericalDirection<f64>| 2.5, (4, 4), 2).unwrap();
        assert_eq!(r.error_estimate, 0.0);
        let p = integrate_with_refinement(
            |d: &SphericalDirection<f64>| {
                let v = d.unit_vector();
                v.x * v.x * v.z * v.z + v.y.powi(4)
            },
            (8, 16),
            2,
        )
        .unwrap();
        // <x^2 z^2> = 1/15, <y^4> = 1/5
        assert_abs_diff_eq!(p.value, 1.0 / 15.0 + 0.2, epsilon = 1e-13);
        assert!(p.error_estimate < 1e-12);
    }

    #[test]
    fn f32_grid() {
        let g = build_grid::<f32>(12, 8).unwrap();
        let s = g.integrate(|d| d.theta().cos().powi(2)).unwrap();
        assert!((s - 1.0 / 3.0).abs() < 1e-5);
    }
}
