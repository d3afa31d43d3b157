//! Constrained maximization of `sum_r c_r F(theta_r)` subject to
//! `sum c_r = 4`, `sum c_r cos theta_r = 0`, for `F = I` or its Jensen bound
//! `F = J`.
//!
//! [`solve_stationarity`] follows the Lagrange-multiplier argument: `h` is
//! strictly decreasing, so every stationary point has equal angles, and the
//! linear constraint pins them to `pi/2`. [`numeric_maximize`] is an
//! independent search over the feasible region used to cross-check it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::info::{bound_second_derivative, bound_theta, bound_theta_derivative, h_derivative, info_theta};
use crate::povm::ReducedMeasurement;
use crate::quadrature::SphereGrid;
use crate::scalar::{compensated_sum, Real};

/// Number of interior samples used to verify that `h` is decreasing.
pub const MONOTONICITY_SAMPLES: usize = 500;
/// Step of the central differences applied to `I(theta)`.
pub const FD_STEP: f64 = 1e-4;
/// Step of the second difference used for the `I` Hessian.
pub const HESSIAN_STEP: f64 = 2e-3;
/// Chebyshev degree of the tabulated `I(theta)` used by the numeric search.
pub const INFO_TABLE_DEGREE: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Mutual information `I`.
    Info,
    /// Jensen upper bound `J`.
    Bound,
}

impl Objective {
    pub fn symbol(self) -> &'static str {
        match self {
            Objective::Info => "I",
            Objective::Bound => "J",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    pub objective: Objective,
    /// Common angle (weighted mean of `thetas` for numeric results).
    pub theta_opt: T,
    pub weights: Vec<T>,
    pub thetas: Vec<T>,
    pub objective_bits: T,
    pub hessian_diag: Vec<T>,
    /// Largest violation among: equal `h(theta_r)`, equal second multiplier,
    /// `sum c cos theta = 0`, `sum c = 4`.
    pub stationarity_residual: T,
    pub iterations: usize,
    /// Iterates visited by the numeric search, when requested.
    pub trace: Vec<ReducedMeasurement<T>>,
}

impl<T: Real> OptimizationResult<T> {
    pub fn measurement(&self) -> ReducedMeasurement<T> {
        ReducedMeasurement::new(self.weights.iter().copied().zip(self.thetas.iter().copied()).collect())
            .expect("optimizer keeps iterates in range")
    }
}

/// One-angle objective with its derivative.
trait Profile<T> {
    fn value(&self, theta: T) -> T;
    fn derivative(&self, theta: T) -> T;
}

struct BoundProfile;

impl<T: Real> Profile<T> for BoundProfile {
    fn value(&self, theta: T) -> T {
        bound_theta(theta)
    }
    fn derivative(&self, theta: T) -> T {
        bound_theta_derivative(theta)
    }
}

/// Chebyshev interpolant of `I(theta)` on `[0, pi]`.
struct InfoTable<T> {
    coeffs: Vec<T>,
    deriv: Vec<T>,
}

impl<T: Real> InfoTable<T> {
    fn build(g: &SphereGrid<T>, degree: usize) -> Result<Self> {
        let n = degree;
        let nf = T::from_count(n);
        let half = T::lit(0.5);
        // Chebyshev-Lobatto samples x_k = cos(k pi / n)
        let samples = (0..=n)
            .map(|k| {
                let x = (T::PI() * T::from_count(k) / nf).cos();
                info_theta((x + T::one()) * half * T::PI(), g)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut coeffs = vec![T::zero(); n + 1];
        for (j, cj) in coeffs.iter_mut().enumerate() {
            let mut s = T::zero();
            for (k, &v) in samples.iter().enumerate() {
                let w = if k == 0 || k == n { half } else { T::one() };
                s = s + w * v * (T::PI() * T::from_count(j * k) / nf).cos();
            }
            let scale = if j == 0 || j == n {
                T::one() / nf
            } else {
                T::lit(2.0) / nf
            };
            *cj = s * scale;
        }
        // derivative coefficients in x, by the standard backward recurrence
        let mut deriv = vec![T::zero(); n + 1];
        for j in (0..n).rev() {
            let next = if j + 2 <= n { deriv[j + 2] } else { T::zero() };
            deriv[j] = next + T::lit(2.0) * T::from_count(j + 1) * coeffs[j + 1];
        }
        deriv[0] = deriv[0] * half;
        Ok(Self { coeffs, deriv })
    }

    fn clenshaw(c: &[T], x: T) -> T {
        let (mut b1, mut b2) = (T::zero(), T::zero());
        for &ck in c.iter().skip(1).rev() {
            let b0 = ck + T::lit(2.0) * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        c[0] + x * b1 - b2
    }

    fn to_x(theta: T) -> T {
        T::lit(2.0) * theta / T::PI() - T::one()
    }
}

impl<T: Real> Profile<T> for InfoTable<T> {
    fn value(&self, theta: T) -> T {
        Self::clenshaw(&self.coeffs, Self::to_x(theta))
    }
    fn derivative(&self, theta: T) -> T {
        Self::clenshaw(&self.deriv, Self::to_x(theta)) * T::lit(2.0) / T::PI()
    }
}

fn check_m(m: usize) -> Result<()> {
    if m < 4 {
        Err(Error::TooFewOutcomes { min: 4, got: m })
    } else {
        Ok(())
    }
}

fn interior_samples<T: Real>(count: usize) -> impl Iterator<Item = (usize, T)> {
    let denom = T::from_count(count + 1);
    (1..=count).map(move |k| (k - 1, T::PI() * T::from_count(k) / denom))
}

/// Numeric `h(theta) = I'(theta) / sin theta` by central differences.
pub fn info_h<T: Real>(theta: T, g: &SphereGrid<T>) -> Result<T> {
    let d = T::lit(FD_STEP);
    let lo = (theta - d).max(T::zero());
    let hi = (theta + d).min(T::PI());
    let deriv = (info_theta(hi, g)? - info_theta(lo, g)?) / (hi - lo);
    Ok(deriv / theta.sin())
}

/// Verifies that `h` is strictly decreasing on `samples` interior points.
pub fn check_h_monotonic<T: Real>(objective: Objective, g: &SphereGrid<T>, samples: usize) -> Result<()> {
    match objective {
        Objective::Bound => {
            for (index, theta) in interior_samples::<T>(samples) {
                if !(h_derivative(theta) < T::zero()) {
                    return Err(Error::MonotonicityViolated {
                        index,
                        theta: theta.to_f64_lossy(),
                    });
                }
            }
        }
        Objective::Info => {
            let mut prev: Option<T> = None;
            for (index, theta) in interior_samples::<T>(samples) {
                let h = info_h(theta, g)?;
                if let Some(p) = prev {
                    if !(h < p) {
                        return Err(Error::MonotonicityViolated {
                            index,
                            theta: theta.to_f64_lossy(),
                        });
                    }
                }
                prev = Some(h);
            }
        }
    }
    Ok(())
}

fn objective_value<T: Real>(objective: Objective, theta: T, g: &SphereGrid<T>) -> Result<T> {
    match objective {
        Objective::Bound => Ok(bound_theta(theta)),
        Objective::Info => info_theta(theta, g),
    }
}

/// `d^2 (c_k F(theta_k)) / d theta_k^2` for every pair: analytic for `J`,
/// second central difference for `I`.
pub fn hessian_diagonal<T: Real>(m: &ReducedMeasurement<T>, objective: Objective, g: &SphereGrid<T>) -> Result<Vec<T>> {
    let d = T::lit(HESSIAN_STEP);
    m.pairs()
        .iter()
        .map(|&(c, t)| match objective {
            Objective::Bound => Ok(c * bound_second_derivative(t)),
            Objective::Info => {
                let lo = (t - d).max(T::zero());
                let hi = lo + d + d;
                let mid = lo + d;
                let second = (info_theta(hi, g)? - T::lit(2.0) * info_theta(mid, g)? + info_theta(lo, g)?) / (d * d);
                Ok(c * second)
            }
        })
        .collect()
}

fn stationarity_residual<T: Real>(pairs: &[(T, T)], value: &dyn Fn(T) -> T, deriv: &dyn Fn(T) -> T) -> T {
    let h: Vec<T> = pairs.iter().map(|&(_, t)| deriv(t) / t.sin()).collect();
    let lambda2: Vec<T> = pairs
        .iter()
        .map(|&(_, t)| -value(t) - t.cos() / t.sin() * deriv(t))
        .collect();
    let spread = |v: &[T]| {
        let lo = v.iter().copied().fold(T::infinity(), T::min);
        let hi = v.iter().copied().fold(T::neg_infinity(), T::max);
        hi - lo
    };
    let sum_c: T = pairs.iter().map(|p| p.0).sum();
    let sum_cos: T = pairs.iter().map(|&(c, t)| c * t.cos()).sum();
    spread(&h)
        .max(spread(&lambda2))
        .max(sum_cos.abs())
        .max((sum_c - T::lit(4.0)).abs())
}

/// Analytic stationary point: all `theta_r = pi/2`, weights `4/M`.
///
/// Fails with [`Error::MonotonicityViolated`] if `h` is not decreasing on the
/// sample grid.
pub fn solve_stationarity<T: Real>(m: usize, objective: Objective, g: &SphereGrid<T>) -> Result<OptimizationResult<T>> {
    check_m(m)?;
    check_h_monotonic(objective, g, MONOTONICITY_SAMPLES)?;
    // equal angles: sum c cos theta = 4 cos theta = 0
    let theta_opt = T::zero().acos();
    let reduced = ReducedMeasurement::uniform(m, theta_opt)?;
    let f_opt = objective_value(objective, theta_opt, g)?;
    let objective_bits = compensated_sum(reduced.pairs().iter().map(|&(c, _)| c * f_opt));
    let hessian_diag = hessian_diagonal(&reduced, objective, g)?;
    let residual = match objective {
        Objective::Bound => stationarity_residual(reduced.pairs(), &bound_theta, &bound_theta_derivative),
        Objective::Info => {
            let h = info_h(theta_opt, g)?;
            let value = |_: T| f_opt;
            let deriv = |t: T| h * t.sin();
            stationarity_residual(reduced.pairs(), &value, &deriv)
        }
    };
    Ok(OptimizationResult {
        objective,
        theta_opt,
        weights: reduced.pairs().iter().map(|p| p.0).collect(),
        thetas: reduced.pairs().iter().map(|p| p.1).collect(),
        objective_bits,
        hessian_diag,
        stationarity_residual: residual,
        iterations: 0,
        trace: Vec::new(),
    })
}

/// `theta_r -> pi - theta_r`: maps antiparallel-spin parameters to parallel ones.
pub fn parallel_map<T: Real>(m: &ReducedMeasurement<T>) -> ReducedMeasurement<T> {
    ReducedMeasurement::new(m.pairs().iter().map(|&(c, t)| (c, T::PI() - t)).collect()).expect("mirror keeps ranges")
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximizeOptions {
    pub max_iterations: usize,
    pub stall_window: usize,
    pub stall_tol: f64,
    pub feasibility_tol: f64,
    pub record_trace: bool,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            stall_window: 50,
            stall_tol: 1e-10,
            feasibility_tol: 1e-10,
            record_trace: false,
        }
    }
}

/// Unconstrained coordinates: softmax logits for `c/4`, logits for `theta/pi`.
struct Point<T> {
    x: Vec<T>,
    m: usize,
}

impl<T: Real> Point<T> {
    fn decode(&self) -> (Vec<T>, Vec<T>) {
        let a = &self.x[..self.m];
        let amax = a.iter().copied().fold(T::neg_infinity(), T::max);
        let e: Vec<T> = a.iter().map(|&v| (v - amax).exp()).collect();
        let z: T = e.iter().copied().sum();
        let c = e.iter().map(|&v| T::lit(4.0) * v / z).collect();
        let t = self.x[self.m..]
            .iter()
            .map(|&b| T::PI() / (T::one() + (-b).exp()))
            .collect();
        (c, t)
    }
}

struct Lagrangian<'a, T> {
    profile: &'a dyn Profile<T>,
    lambda: T,
    mu: T,
    m: usize,
}

impl<T: Real> Lagrangian<'_, T> {
    /// Returns `(L, F, g, dL/dx)` where `L = F - lambda g - mu/2 g^2`.
    fn eval(&self, x: &[T]) -> (T, T, T, Vec<T>) {
        let p = Point {
            x: x.to_vec(),
            m: self.m,
        };
        let (c, t) = p.decode();
        let f: Vec<T> = t.iter().map(|&v| self.profile.value(v)).collect();
        let df: Vec<T> = t.iter().map(|&v| self.profile.derivative(v)).collect();
        let obj = compensated_sum(c.iter().zip(&f).map(|(&c, &f)| c * f));
        let g = compensated_sum(c.iter().zip(&t).map(|(&c, &t)| c * t.cos()));
        let k = self.lambda + self.mu * g;
        let l = obj - self.lambda * g - self.mu * T::lit(0.5) * g * g;
        let gc: Vec<T> = (0..self.m).map(|r| f[r] - k * t[r].cos()).collect();
        let mean: T = (0..self.m).map(|r| c[r] / T::lit(4.0) * gc[r]).sum();
        let mut grad = vec![T::zero(); 2 * self.m];
        for r in 0..self.m {
            grad[r] = c[r] * (gc[r] - mean);
            let s = T::one() / (T::one() + (-x[self.m + r]).exp());
            let dtheta = T::PI() * s * (T::one() - s);
            grad[self.m + r] = c[r] * (df[r] + k * t[r].sin()) * dtheta;
        }
        (l, obj, g, grad)
    }
}

fn dotv<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Random feasible start: weights on the simplex, cosines shifted and shrunk so
/// that `sum c cos theta = 0` with every angle strictly inside `(0, pi)`.
fn feasible_start<T: Real>(m: usize, rng: &mut ChaCha8Rng) -> (Vec<T>, Vec<T>) {
    let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let c: Vec<f64> = raw.iter().map(|v| 4.0 * v / total).collect();
    let mut x: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.9..0.9)).collect();
    let mean = c.iter().zip(&x).map(|(c, x)| c * x).sum::<f64>() / 4.0;
    x.iter_mut().for_each(|v| *v -= mean);
    let peak = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if peak > 0.9 {
        x.iter_mut().for_each(|v| *v *= 0.9 / peak);
    }
    (
        c.into_iter().map(T::lit).collect(),
        x.into_iter().map(|v| T::lit(v.acos())).collect(),
    )
}

fn encode<T: Real>(c: &[T], t: &[T]) -> Vec<T> {
    let mut x: Vec<T> = c.iter().map(|&v| (v / T::lit(4.0)).ln()).collect();
    x.extend(t.iter().map(|&v| {
        let s = v / T::PI();
        (s / (T::one() - s)).ln()
    }));
    x
}

pub fn numeric_maximize<T: Real>(
    m: usize,
    objective: Objective,
    g: &SphereGrid<T>,
    seed: u64,
) -> Result<OptimizationResult<T>> {
    numeric_maximize_with(m, objective, g, seed, &MaximizeOptions::default())
}

/// Augmented-Lagrangian search with BFGS inner iterations over the softmax /
/// logistic parameterization of the feasible region.
pub fn numeric_maximize_with<T: Real>(
    m: usize,
    objective: Objective,
    g: &SphereGrid<T>,
    seed: u64,
    opts: &MaximizeOptions,
) -> Result<OptimizationResult<T>> {
    check_m(m)?;
    let table;
    let profile: &dyn Profile<T> = match objective {
        Objective::Bound => &BoundProfile,
        Objective::Info => {
            table = InfoTable::build(g, INFO_TABLE_DEGREE)?;
            &table
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (c0, t0) = feasible_start::<T>(m, &mut rng);
    let mut x = encode(&c0, &t0);
    let n = 2 * m;
    let mut lag = Lagrangian {
        profile,
        lambda: T::zero(),
        mu: T::lit(10.0),
        m,
    };
    let mut trace = Vec::new();
    let record = |x: &[T], trace: &mut Vec<ReducedMeasurement<T>>| {
        if opts.record_trace {
            let (c, t) = Point { x: x.to_vec(), m }.decode();
            if let Ok(r) = ReducedMeasurement::new(c.into_iter().zip(t).collect()) {
                trace.push(r);
            }
        }
    };
    record(&x, &mut trace);

    let mut iterations = 0usize;
    let mut last_g = T::infinity();
    let mut converged = false;
    let feas_tol = T::lit(opts.feasibility_tol);
    let stall_tol = T::lit(opts.stall_tol);
    'outer: for _ in 0..200 {
        // inner BFGS on -L
        let mut hinv = identity(n);
        let (mut l, _, _, mut grad) = lag.eval(&x);
        let mut history: Vec<T> = vec![l];
        loop {
            if iterations >= opts.max_iterations {
                break 'outer;
            }
            let dir: Vec<T> = (0..n).map(|i| dotv(&hinv[i], &grad)).collect();
            let mut slope = dotv(&dir, &grad);
            let dir = if slope > T::zero() {
                dir
            } else {
                hinv = identity(n);
                slope = dotv(&grad, &grad);
                grad.clone()
            };
            if !(slope > T::epsilon() * T::epsilon()) {
                break;
            }
            let mut step = T::one();
            let mut accepted = None;
            for _ in 0..60 {
                let trial: Vec<T> = x.iter().zip(&dir).map(|(&a, &d)| a + step * d).collect();
                let (lt, _, _, gt) = lag.eval(&trial);
                if lt.is_finite() && lt >= l + T::lit(1e-4) * step * slope {
                    accepted = Some((trial, lt, gt));
                    break;
                }
                step = step * T::lit(0.5);
            }
            iterations += 1;
            let Some((xn, ln, gn)) = accepted else { break };
            let s: Vec<T> = xn.iter().zip(&x).map(|(&a, &b)| a - b).collect();
            // ascent on L == descent on -L: y = grad(-L)_new - grad(-L)_old
            let y: Vec<T> = gn.iter().zip(&grad).map(|(&a, &b)| b - a).collect();
            let sy = dotv(&s, &y);
            if sy > T::epsilon() {
                bfgs_update(&mut hinv, &s, &y, sy);
            }
            x = xn;
            l = ln;
            grad = gn;
            record(&x, &mut trace);
            history.push(l);
            let w = opts.stall_window;
            if history.len() > w && (history[history.len() - 1] - history[history.len() - 1 - w]).abs() < stall_tol {
                break;
            }
            if dotv(&grad, &grad).sqrt() < T::lit(1e-13) {
                break;
            }
        }
        let (_, _, gval, _) = lag.eval(&x);
        if gval.abs() < feas_tol {
            converged = true;
            break;
        }
        lag.lambda = lag.lambda + lag.mu * gval;
        if gval.abs() > T::lit(0.25) * last_g {
            lag.mu = (lag.mu * T::lit(10.0)).min(T::lit(1e8));
        }
        last_g = gval.abs();
    }

    let (c, t) = Point { x: x.clone(), m }.decode();
    let pairs: Vec<(T, T)> = c.iter().copied().zip(t.iter().copied()).collect();
    let objective_bits = compensated_sum(pairs.iter().map(|&(c, t)| c * profile.value(t)));
    if !converged {
        return Err(Error::NonConvergence {
            iterations,
            best_objective: objective_bits.to_f64_lossy(),
            best_pairs: pairs
                .iter()
                .map(|&(c, t)| (c.to_f64_lossy(), t.to_f64_lossy()))
                .collect(),
        });
    }
    let reduced = ReducedMeasurement::new(pairs.clone())?;
    let hessian_diag = hessian_diagonal(&reduced, objective, g)?;
    let value = |t: T| profile.value(t);
    let deriv = |t: T| profile.derivative(t);
    let residual = stationarity_residual(&pairs, &value, &deriv);
    let theta_opt = compensated_sum(pairs.iter().map(|&(c, t)| c * t)) / T::lit(4.0);
    Ok(OptimizationResult {
        objective,
        theta_opt,
        weights: c,
        thetas: t,
        objective_bits,
        hessian_diag,
        stationarity_residual: residual,
        iterations,
        trace,
    })
}

fn identity<T: Real>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

/// Inverse-Hessian BFGS update `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T`.
fn bfgs_update<T: Real>(h: &mut [Vec<T>], s: &[T], y: &[T], sy: T) {
    let n = s.len();
    let rho = T::one() / sy;
    let hy: Vec<T> = (0..n).map(|i| dotv(&h[i], y)).collect();
    let yhy = dotv(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] = h[i][j] - rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
