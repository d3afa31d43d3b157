//! Rank-one POVM data model, completeness and entanglement checks, and the
//! collective-rotation reduction of product measurements to `(c_r, theta_r)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{Rotation3, SphericalDirection, Spinor, TwoQubitState, UnitVector3};
use crate::scalar::Real;

/// Default entrywise tolerance for `sum_r c_r |psi_r><psi_r| = I`.
pub const DEFAULT_COMPLETENESS_TOL: f64 = 1e-9;
/// Tolerance on the reduced constraints `sum c = 4`, `sum c cos theta = 0`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// `E_r = c_r |psi_r><psi_r|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmElement<T> {
    weight: T,
    state: TwoQubitState<T>,
}

impl<T: Real> PovmElement<T> {
    pub fn new(weight: T, state: TwoQubitState<T>) -> Result<Self> {
        if !(weight > T::zero()) || !weight.is_finite() {
            return Err(Error::InvalidWeight {
                index: 0,
                weight: weight.to_f64_lossy(),
            });
        }
        Ok(Self { weight, state })
    }

    pub fn weight(&self) -> T {
        self.weight
    }

    pub fn state(&self) -> &TwoQubitState<T> {
        &self.state
    }
}

/// Ordered list of rank-one elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm<T> {
    elements: Vec<PovmElement<T>>,
}

impl<T: Real> Povm<T> {
    /// Accepts any non-empty list; completeness is checked separately by
    /// [`validate_completeness`].
    pub fn new(elements: Vec<PovmElement<T>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::TooFewOutcomes { min: 1, got: 0 });
        }
        Ok(Self { elements })
    }

    /// Requires at least four outcomes and completeness within `tol`.
    pub fn checked(elements: Vec<PovmElement<T>>, tol: T) -> Result<Self> {
        if elements.len() < 4 {
            return Err(Error::TooFewOutcomes {
                min: 4,
                got: elements.len(),
            });
        }
        let povm = Self::new(elements)?;
        let report = validate_completeness(&povm, tol);
        if !report.ok {
            return Err(Error::IncompletePovm {
                max_entry_error: report.max_entry_error.to_f64_lossy(),
            });
        }
        Ok(povm)
    }

    pub fn elements(&self) -> &[PovmElement<T>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn weight_sum(&self) -> T {
        self.elements.iter().map(|e| e.weight).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletenessReport<T> {
    pub max_entry_error: T,
    pub weight_sum: T,
    pub ok: bool,
}

/// Entrywise deviation of `sum_r c_r |psi_r><psi_r|` from the 4x4 identity.
pub fn validate_completeness<T: Real>(p: &Povm<T>, tol: T) -> CompletenessReport<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut acc = [[zero; 4]; 4];
    for e in p.elements() {
        let a = e.state.amplitudes();
        for i in 0..4 {
            for j in 0..4 {
                acc[i][j] = acc[i][j] + a[i] * a[j].conj() * e.weight;
            }
        }
    }
    let mut max_err = T::zero();
    for (i, row) in acc.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let target = if i == j { T::one() } else { T::zero() };
            max_err = max_err.max((z - Complex::new(target, T::zero())).norm());
        }
    }
    CompletenessReport {
        max_entry_error: max_err,
        weight_sum: p.weight_sum(),
        ok: max_err <= tol,
    }
}

/// Smaller squared Schmidt coefficient, in `[0, 1/2]`; zero exactly for products.
pub fn entanglement_measure<T: Real>(s: &TwoQubitState<T>) -> T {
    let a = s.amplitudes();
    let det2 = (a[0] * a[3] - a[1] * a[2]).norm_sqr();
    let four = T::lit(4.0);
    let disc = (T::one() - four * det2).max(T::zero()).sqrt();
    (T::lit(2.0) * det2 / (T::one() + disc)).min(T::lit(0.5))
}

/// Factors a product state into its two spinors, or `None` if the
/// entanglement measure exceeds `tol`.
pub fn try_factor_product<T: Real>(s: &TwoQubitState<T>, tol: T) -> Option<(Spinor<T>, Spinor<T>)> {
    if entanglement_measure(s) > tol {
        return None;
    }
    let a = s.amplitudes();
    let rows = [[a[0], a[1]], [a[2], a[3]]];
    let norm = |r: &[Complex<T>; 2]| r[0].norm_sqr() + r[1].norm_sqr();
    let pivot = if norm(&rows[0]) >= norm(&rows[1]) { 0 } else { 1 };
    let second = Spinor::new(rows[pivot][0], rows[pivot][1]).ok()?;
    let [b0, b1] = second.amplitudes();
    let first_amp = |r: &[Complex<T>; 2]| r[0] * b0.conj() + r[1] * b1.conj();
    let first = Spinor::new(first_amp(&rows[0]), first_amp(&rows[1])).ok()?;
    Some((first, second))
}

/// Product element `c |n1>|n2>` described by its two directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductElement<T> {
    pub weight: T,
    pub first: SphericalDirection<T>,
    pub second: SphericalDirection<T>,
}

impl<T: Real> ProductElement<T> {
    pub fn new(weight: T, first: SphericalDirection<T>, second: SphericalDirection<T>) -> Result<Self> {
        if !(weight > T::zero()) || !weight.is_finite() {
            return Err(Error::InvalidWeight {
                index: 0,
                weight: weight.to_f64_lossy(),
            });
        }
        Ok(Self { weight, first, second })
    }

    pub fn state(&self) -> TwoQubitState<T> {
        TwoQubitState::product(
            &Spinor::from_direction(&self.first),
            &Spinor::from_direction(&self.second),
        )
    }

    pub fn to_povm_element(&self) -> PovmElement<T> {
        PovmElement {
            weight: self.weight,
            state: self.state(),
        }
    }

    /// Recovers the directions of a product-state element.
    pub fn from_povm_element(e: &PovmElement<T>, tol: T) -> Option<Self> {
        let (a, b) = try_factor_product(e.state(), tol)?;
        Some(Self {
            weight: e.weight,
            first: a.direction(),
            second: b.direction(),
        })
    }
}

/// Reduced product measurement: one `(c_r, theta_r)` per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedMeasurement<T> {
    pairs: Vec<(T, T)>,
}

impl<T: Real> ReducedMeasurement<T> {
    /// Checks per-pair ranges (`c > 0`, `theta` in `[0, pi]`); the linear
    /// constraints are left to [`feasibility_check`].
    pub fn new(pairs: Vec<(T, T)>) -> Result<Self> {
        for (index, &(c, theta)) in pairs.iter().enumerate() {
            if !(c > T::zero()) || !c.is_finite() {
                return Err(Error::InvalidWeight {
                    index,
                    weight: c.to_f64_lossy(),
                });
            }
            if !(theta >= T::zero() && theta <= T::PI()) {
                return Err(Error::Domain {
                    what: "reduced angle",
                    value: theta.to_f64_lossy(),
                });
            }
        }
        Ok(Self { pairs })
    }

    /// `M` copies of `(4/M, theta)`.
    pub fn uniform(m: usize, theta: T) -> Result<Self> {
        let c = T::lit(4.0) / T::from_count(m.max(1));
        Self::new(vec![(c, theta); m])
    }

    pub fn pairs(&self) -> &[(T, T)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// `theta_r = arccos(n1 . n2)` for each element; weights copied.
pub fn reduce_product_measurement<T: Real>(elements: &[ProductElement<T>]) -> ReducedMeasurement<T> {
    let pairs = elements
        .iter()
        .map(|e| {
            let cos = e
                .first
                .unit_vector()
                .dot(&e.second.unit_vector())
                .max(-T::one())
                .min(T::one());
            (e.weight, cos.acos())
        })
        .collect();
    ReducedMeasurement { pairs }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport<T> {
    pub sum_c: T,
    pub sum_c_cos: T,
    pub ok: bool,
}

/// `sum c = 4`, `sum c cos theta = 0` and the per-pair ranges.
pub fn feasibility_check<T: Real>(m: &ReducedMeasurement<T>) -> FeasibilityReport<T> {
    let sum_c: T = m.pairs.iter().map(|p| p.0).sum();
    let sum_c_cos: T = m.pairs.iter().map(|&(c, t)| c * t.cos()).sum();
    let tol = T::tolerance(FEASIBILITY_TOL);
    let ranges = m
        .pairs
        .iter()
        .all(|&(c, t)| c > T::zero() && t >= T::zero() && t <= T::PI());
    FeasibilityReport {
        sum_c,
        sum_c_cos,
        ok: ranges && (sum_c - T::lit(4.0)).abs() <= tol && sum_c_cos.abs() <= tol,
    }
}

pub fn apply_collective_rotation<T: Real>(e: &ProductElement<T>, r: &Rotation3<T>) -> ProductElement<T> {
    let rot = |d: &SphericalDirection<T>| SphericalDirection::from_unit_vector(&r.apply(&d.unit_vector()));
    ProductElement {
        weight: e.weight,
        first: rot(&e.first),
        second: rot(&e.second),
    }
}

/// Rotation taking `first` to the north pole and `second` onto the `phi = 0`
/// meridian.
pub fn canonical_rotation<T: Real>(e: &ProductElement<T>) -> Rotation3<T> {
    let z = UnitVector3::ez();
    let to_pole = Rotation3::aligning(&e.first.unit_vector(), &z);
    let v = to_pole.apply(&e.second.unit_vector());
    let spin = if v.x == T::zero() && v.y == T::zero() {
        Rotation3::identity()
    } else {
        Rotation3::about_axis(&z, -v.y.atan2(v.x))
    };
    spin.compose(&to_pole)
}
