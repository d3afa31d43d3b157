//! Born probabilities, Bayes posteriors, Kullback-Leibler gains and the
//! mutual information of a POVM, plus the reduced one-angle functions
//! `I(theta)`, its Jensen bound `J(theta)` and `h(theta) = J'(theta) / sin theta`.
//!
//! Information is always in bits.

use crate::error::{Error, Result};
use crate::geometry::{signal_state, EnsembleKind, SphericalDirection, TwoQubitState};
use crate::povm::{validate_completeness, Povm, PovmElement, ReducedMeasurement, DEFAULT_COMPLETENESS_TOL};
use crate::quadrature::SphereGrid;
use crate::scalar::{compensated_sum, xlog2x, Real};

/// Outcomes with `p(r)` below this contribute nothing and are flagged.
pub const DEGENERATE_OUTCOME: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeInfo<T> {
    pub probability: T,
    pub kl_bits: T,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfoReport<T> {
    pub mutual_information_bits: T,
    pub per_outcome: Vec<OutcomeInfo<T>>,
    pub grid_orders: (usize, usize),
    /// `|I(grid) - I(grid with halved orders)|`
    pub error_estimate: T,
}

impl<T: Real> InfoReport<T> {
    pub fn probability_sum(&self) -> T {
        self.per_outcome.iter().map(|o| o.probability).sum()
    }

    pub fn degenerate_outcomes(&self) -> Vec<usize> {
        self.per_outcome
            .iter()
            .enumerate()
            .filter(|(_, o)| o.degenerate)
            .map(|(i, _)| i)
            .collect()
    }
}

/// `p(r|n) = c_r |<A(n)|psi_r>|^2`.
pub fn conditional_probability<T: Real>(e: &PovmElement<T>, n: &SphericalDirection<T>, kind: EnsembleKind) -> T {
    born(e, &signal_state(n, kind))
}

fn born<T: Real>(e: &PovmElement<T>, signal: &TwoQubitState<T>) -> T {
    e.weight() * signal.inner(e.state()).norm_sqr()
}

/// `p(r) = int dn p(r|n)`.
pub fn outcome_probability<T: Real>(e: &PovmElement<T>, g: &SphereGrid<T>, kind: EnsembleKind) -> Result<T> {
    g.integrate(|n| conditional_probability(e, n, kind))
}

/// Closed-form `p(r)` of a reduced antiparallel element: `c (3 - cos theta_r) / 12`.
pub fn reduced_outcome_probability<T: Real>(c: T, theta_r: T) -> T {
    c * (T::lit(3.0) - theta_r.cos()) / T::lit(12.0)
}

/// [`reduced_outcome_probability`] for either ensemble; parallel spins see
/// `c (3 + cos theta_r) / 12`.
pub fn reduced_outcome_probability_for<T: Real>(kind: EnsembleKind, c: T, theta_r: T) -> T {
    match kind {
        EnsembleKind::Antiparallel => reduced_outcome_probability(c, theta_r),
        EnsembleKind::Parallel => c * (T::lit(3.0) + theta_r.cos()) / T::lit(12.0),
    }
}

/// `p(c, theta_r | n)` for the reduced element `c |z>|n_r>`.
pub fn reduced_conditional_probability<T: Real>(kind: EnsembleKind, c: T, theta_r: T, n: &SphericalDirection<T>) -> T {
    let half = T::lit(0.5);
    let (st, ct) = n.theta().sin_cos();
    let (sr, cr) = theta_r.sin_cos();
    let overlap = ct * cr + n.phi().cos() * st * sr;
    let second = match kind {
        EnsembleKind::Antiparallel => T::one() - overlap,
        EnsembleKind::Parallel => T::one() + overlap,
    };
    let first = (n.theta() * half).cos().powi(2);
    c * half * first * second
}

/// `p(n|r) = p(r|n) / p(r)` against the uniform prior.
pub fn posterior_density<T: Real>(
    e: &PovmElement<T>,
    n: &SphericalDirection<T>,
    g: &SphereGrid<T>,
    kind: EnsembleKind,
) -> Result<T> {
    let pr = outcome_probability(e, g, kind)?;
    if !(pr >= T::lit(DEGENERATE_OUTCOME)) {
        return Err(Error::DegenerateOutcome {
            probability: pr.to_f64_lossy(),
        });
    }
    Ok(conditional_probability(e, n, kind) / pr)
}

fn outcome_table<T: Real>(p: &Povm<T>, g: &SphereGrid<T>, kind: EnsembleKind) -> Result<Vec<OutcomeInfo<T>>> {
    let signals = g.evaluate(|n| signal_state(n, kind));
    let mut out = Vec::with_capacity(p.len());
    for e in p.elements() {
        let cond: Vec<T> = signals.iter().map(|s| born(e, s)).collect();
        let pr = g.reduce(&cond)?;
        if !(pr >= T::lit(DEGENERATE_OUTCOME)) {
            out.push(OutcomeInfo {
                probability: pr.max(T::zero()),
                kl_bits: T::zero(),
                degenerate: true,
            });
            continue;
        }
        let integrand: Vec<T> = cond.iter().map(|&v| xlog2x(v / pr)).collect();
        out.push(OutcomeInfo {
            probability: pr,
            kl_bits: g.reduce(&integrand)?,
            degenerate: false,
        });
    }
    Ok(out)
}

fn weighted_total<T: Real>(table: &[OutcomeInfo<T>]) -> T {
    compensated_sum(table.iter().map(|o| o.probability * o.kl_bits))
}

/// `I_av = sum_r p(r) K(p(n|r) / p(n))` with a halved-order error estimate.
/// Fails with [`Error::IncompletePovm`] unless the POVM is complete to the
/// default tolerance.
pub fn mutual_information<T: Real>(p: &Povm<T>, g: &SphereGrid<T>, kind: EnsembleKind) -> Result<InfoReport<T>> {
    let report = validate_completeness(p, T::tolerance(DEFAULT_COMPLETENESS_TOL));
    if !report.ok {
        return Err(Error::IncompletePovm {
            max_entry_error: report.max_entry_error.to_f64_lossy(),
        });
    }
    let per_outcome = outcome_table(p, g, kind)?;
    let value = weighted_total(&per_outcome);
    let coarse = weighted_total(&outcome_table(p, &g.coarsened()?, kind)?);
    Ok(InfoReport {
        mutual_information_bits: value,
        per_outcome,
        grid_orders: g.orders(),
        error_estimate: (value - coarse).abs(),
    })
}

fn check_angle<T: Real>(what: &'static str, theta: T) -> Result<()> {
    if theta >= T::zero() && theta <= T::PI() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: theta.to_f64_lossy(),
        })
    }
}

/// `I(theta)` for either ensemble, evaluated with an explicit weight `c`
/// (which cancels).
pub fn info_theta_for<T: Real>(kind: EnsembleKind, c: T, theta: T, g: &SphereGrid<T>) -> Result<T> {
    check_angle("info_theta", theta)?;
    let mean = reduced_outcome_probability_for(kind, c, theta);
    let kl = g.integrate(|n| xlog2x(reduced_conditional_probability(kind, c, theta, n) / mean))?;
    Ok(mean / c * kl)
}

/// `I(theta)` for antiparallel spins.
pub fn info_theta<T: Real>(theta: T, g: &SphereGrid<T>) -> Result<T> {
    info_theta_for(EnsembleKind::Antiparallel, T::one(), theta, g)
}

fn big_b<T: Real>(c: T, c2: T) -> T {
    T::lit(27.0) - T::lit(20.0) * c + c2
}

/// Closed-form Jensen bound
/// `J(theta) = ((3 - cos)/12) log2[(3/5)(27 - 20 cos + cos 2theta) / (3 - cos)^2]`.
pub fn bound_theta<T: Real>(theta: T) -> T {
    let c = theta.cos();
    let a = T::lit(3.0) - c;
    let q = T::lit(0.6) * big_b(c, (theta + theta).cos()) / (a * a);
    a / T::lit(12.0) * q.log2()
}

/// `dJ/dtheta`, valid on all of `[0, pi]`.
pub fn bound_theta_derivative<T: Real>(theta: T) -> T {
    theta.sin() * h_unchecked(theta)
}

fn h_unchecked<T: Real>(theta: T) -> T {
    let c = theta.cos();
    let a = T::lit(3.0) - c;
    let b = big_b(c, (theta + theta).cos());
    let q = T::lit(0.6) * b / (a * a);
    (q.ln() + a * (T::lit(20.0) - T::lit(4.0) * c) / b - T::lit(2.0)) / (T::lit(12.0) * T::LN_2())
}

/// `h(theta) = J'(theta) / sin theta`, defined on the open interval `(0, pi)`.
pub fn h_function<T: Real>(theta: T) -> Result<T> {
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(Error::Domain {
            what: "h_function",
            value: theta.to_f64_lossy(),
        });
    }
    Ok(h_unchecked(theta))
}

/// `dh/dtheta = -16/(3 ln 2) (15 - 8 cos + cos 2t)/(27 - 20 cos + cos 2t)^2 sin/(3 - cos)`.
pub fn h_derivative<T: Real>(theta: T) -> T {
    // sin(pi) rounds to 1.2e-16; the factor vanishes exactly at both poles
    if theta == T::zero() || theta == T::PI() {
        return T::zero();
    }
    let c = theta.cos();
    let c2 = (theta + theta).cos();
    let b = big_b(c, c2);
    let num = T::lit(15.0) - T::lit(8.0) * c + c2;
    -T::lit(16.0) / (T::lit(3.0) * T::LN_2()) * num / (b * b) * theta.sin() / (T::lit(3.0) - c)
}

/// `d^2 J / dtheta^2 = cos h + sin h'`.
pub fn bound_second_derivative<T: Real>(theta: T) -> T {
    theta.cos() * h_unchecked(theta) + theta.sin() * h_derivative(theta)
}

/// `sum_r c_r I(theta_r)`.
pub fn reduced_info<T: Real>(m: &ReducedMeasurement<T>, g: &SphereGrid<T>, kind: EnsembleKind) -> Result<T> {
    let terms = m
        .pairs()
        .iter()
        .map(|&(c, t)| info_theta_for(kind, T::one(), t, g).map(|i| c * i))
        .collect::<Result<Vec<_>>>()?;
    Ok(compensated_sum(terms))
}

/// `sum_r c_r J(theta_r)`; parallel spins use `J(pi - theta_r)`.
pub fn reduced_bound<T: Real>(m: &ReducedMeasurement<T>, kind: EnsembleKind) -> T {
    compensated_sum(m.pairs().iter().map(|&(c, t)| {
        let t = match kind {
            EnsembleKind::Antiparallel => t,
            EnsembleKind::Parallel => T::PI() - t,
        };
        c * bound_theta(t)
    }))
}
