//! Named measurements: the orthogonal LOCC measurement and the two
//! tetrahedral entangled von Neumann measurements.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{EnsembleKind, SphericalDirection, Spinor, TwoQubitState, UnitVector3};
use crate::povm::{validate_completeness, Povm, PovmElement, ProductElement};
use crate::scalar::Real;

pub const LOCC_ORTHOGONAL: &str = "locc-orthogonal";
pub const BAGAN_ANTIPARALLEL: &str = "bagan-antiparallel";
pub const TARRACH_VIDAL_PARALLEL: &str = "tarrach-vidal-parallel";

pub const CATALOG_NAMES: [&str; 3] = [LOCC_ORTHOGONAL, BAGAN_ANTIPARALLEL, TARRACH_VIDAL_PARALLEL];

/// Catalog constructors assert completeness at this tolerance.
const CONSTRUCTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct NamedMeasurement<T> {
    pub name: &'static str,
    pub povm: Povm<T>,
    pub ensemble_hint: EnsembleKind,
    /// Regression value for the hinted ensemble, in bits.
    pub expected_bits: Option<T>,
}

pub fn by_name<T: Real>(name: &str) -> Option<Result<NamedMeasurement<T>>> {
    match name {
        LOCC_ORTHOGONAL => Some(locc_orthogonal()),
        BAGAN_ANTIPARALLEL => Some(bagan_antiparallel()),
        TARRACH_VIDAL_PARALLEL => Some(tarrach_vidal_parallel()),
        _ => None,
    }
}

type Amps<T> = [Complex<T>; 4];

fn zero_amps<T: Real>() -> Amps<T> {
    [Complex::new(T::zero(), T::zero()); 4]
}

fn axpy<T: Real>(acc: &mut Amps<T>, s: Complex<T>, x: &Amps<T>) {
    for (a, b) in acc.iter_mut().zip(x.iter()) {
        *a = *a + s * b;
    }
}

fn dot<T: Real>(a: &Amps<T>, b: &Amps<T>) -> Complex<T> {
    a.iter()
        .zip(b.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn real(v: f64) -> Complex<f64> {
    Complex::new(v, 0.0)
}

fn lift<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::lit(z.re), T::lit(z.im))
}

/// `(|z>|z> + ...)` style 2-spin product amplitudes.
fn product_amps<T: Real>(a: &Spinor<T>, b: &Spinor<T>) -> Amps<T> {
    TwoQubitState::product(a, b).amplitudes()
}

/// Spin-1 zero-projection state along `m`, written in the Cartesian triplet
/// basis with real coefficients `m_x T_x + m_y T_y + m_z T_z`.
fn cartesian_triplet<T: Real>(m: &UnitVector3<T>) -> Amps<T> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let tx: Amps<T> = [real(-r), real(0.0), real(0.0), real(r)].map(lift);
    let ty: Amps<T> = [Complex::new(0.0, r), real(0.0), real(0.0), Complex::new(0.0, r)].map(lift);
    let tz: Amps<T> = [real(0.0), real(r), real(r), real(0.0)].map(lift);
    let mut out = zero_amps();
    axpy(&mut out, Complex::new(m.x, T::zero()), &tx);
    axpy(&mut out, Complex::new(m.y, T::zero()), &ty);
    axpy(&mut out, Complex::new(m.z, T::zero()), &tz);
    out
}

fn phase_of<T: Real>(z: Complex<T>) -> Complex<T> {
    let n = z.norm();
    if n > T::zero() {
        z / n
    } else {
        Complex::new(T::one(), T::zero())
    }
}

/// Regular tetrahedron `(1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1)` over `sqrt 3`.
pub fn tetrahedron<T: Real>() -> [UnitVector3<T>; 4] {
    let v = |x: f64, y: f64, z: f64| UnitVector3::new(T::lit(x), T::lit(y), T::lit(z)).expect("nonzero");
    [
        v(1.0, 1.0, 1.0),
        v(1.0, -1.0, -1.0),
        v(-1.0, 1.0, -1.0),
        v(-1.0, -1.0, 1.0),
    ]
}

/// `|z> (|z> + |-z>) / sqrt 2`
pub fn reference_state_b<T: Real>() -> TwoQubitState<T> {
    let plus = Spinor::new(Complex::new(T::one(), T::zero()), Complex::new(T::one(), T::zero())).expect("nonzero");
    TwoQubitState::product(&Spinor::up(), &plus)
}

fn locc_angles<T: Real>() -> [SphericalDirection<T>; 4] {
    let (z, pi) = (T::zero(), T::PI());
    [(z, z), (z, pi), (pi, z), (pi, pi)].map(|(t, p)| SphericalDirection::new(t, p).expect("valid angles"))
}

/// `(|m> + |-m>) / sqrt 2` for each catalog direction `m`.
fn locc_factors<T: Real>() -> Vec<(Spinor<T>, Spinor<T>)> {
    locc_angles::<T>()
        .iter()
        .map(|m| {
            let a = Spinor::from_direction(m);
            let b = Spinor::from_direction(&m.antipode());
            let [a0, a1] = a.amplitudes();
            let [b0, b1] = b.amplitudes();
            (a, Spinor::new(a0 + b0, a1 + b1).expect("orthogonal spinors"))
        })
        .collect()
}

/// The four LOCC elements as explicit direction pairs.
pub fn locc_product_elements<T: Real>() -> Vec<ProductElement<T>> {
    locc_factors::<T>()
        .iter()
        .map(|(a, b)| ProductElement::new(T::one(), a.direction(), b.direction()).expect("unit weight"))
        .collect()
}

fn finish<T: Real>(
    name: &'static str,
    states: Vec<TwoQubitState<T>>,
    ensemble_hint: EnsembleKind,
    expected_bits: Option<T>,
) -> Result<NamedMeasurement<T>> {
    let elements = states
        .into_iter()
        .map(|s| PovmElement::new(T::one(), s))
        .collect::<Result<Vec<_>>>()?;
    let povm = Povm::new(elements)?;
    let report = validate_completeness(&povm, T::tolerance(CONSTRUCTION_TOL));
    if !report.ok {
        return Err(Error::IncompletePovm {
            max_entry_error: report.max_entry_error.to_f64_lossy(),
        });
    }
    Ok(NamedMeasurement {
        name,
        povm,
        ensemble_hint,
        expected_bits,
    })
}

/// Von Neumann measurement `|m_r> (|m_r> + |-m_r>)/sqrt 2` for
/// `m_r` at `(0,0), (0,pi), (pi,0), (pi,pi)`.
pub fn locc_orthogonal<T: Real>() -> Result<NamedMeasurement<T>> {
    let states = locc_factors::<T>()
        .iter()
        .map(|(a, b)| TwoQubitState::product(a, b))
        .collect();
    finish(LOCC_ORTHOGONAL, states, EnsembleKind::Antiparallel, Some(T::lit(0.557)))
}

/// `(sqrt3/2) (|m,-m> + |-m,m>)/sqrt2 + (1/2)|psi->` over the given tetrahedron.
///
/// The symmetric part of each element is rephased onto the real Cartesian
/// triplet vector `m . T`, so the four symmetric parts sum to zero and share a
/// real relative phase with the singlet.
pub fn bagan_from_directions<T: Real>(dirs: &[UnitVector3<T>; 4]) -> Result<NamedMeasurement<T>> {
    let r2 = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    let sym_w = Complex::new(T::lit(3.0).sqrt() * T::lit(0.5), T::zero());
    let singlet_w = Complex::new(T::lit(0.5), T::zero());
    let singlet = TwoQubitState::<T>::singlet().amplitudes();
    let mut states = Vec::with_capacity(4);
    for m in dirs {
        let d = SphericalDirection::from_unit_vector(m);
        let a = Spinor::from_direction(&d);
        let b = Spinor::from_direction(&d.antipode());
        let mut sym = zero_amps();
        axpy(&mut sym, r2, &product_amps(&a, &b));
        axpy(&mut sym, r2, &product_amps(&b, &a));
        let phase = phase_of(dot(&cartesian_triplet(m), &sym));
        let mut psi = zero_amps();
        axpy(&mut psi, sym_w * phase.conj(), &sym);
        axpy(&mut psi, singlet_w, &singlet);
        states.push(TwoQubitState::new(psi)?);
    }
    finish(
        BAGAN_ANTIPARALLEL,
        states,
        EnsembleKind::Antiparallel,
        Some(T::lit(0.8664)),
    )
}

pub fn bagan_antiparallel<T: Real>() -> Result<NamedMeasurement<T>> {
    bagan_from_directions(&tetrahedron())
}

/// `(sqrt3/2)|m,m> + (1/2)|psi->` over the given tetrahedron; each `|m,m>`
/// is rephased so its overlap with the first is real and negative, which
/// makes the four sum to zero.
pub fn tarrach_vidal_from_directions<T: Real>(dirs: &[UnitVector3<T>; 4]) -> Result<NamedMeasurement<T>> {
    let sym_w = Complex::new(T::lit(3.0).sqrt() * T::lit(0.5), T::zero());
    let singlet_w = Complex::new(T::lit(0.5), T::zero());
    let singlet = TwoQubitState::<T>::singlet().amplitudes();
    let pairs: Vec<Amps<T>> = dirs
        .iter()
        .map(|m| {
            let s = Spinor::from_direction(&SphericalDirection::from_unit_vector(m));
            product_amps(&s, &s)
        })
        .collect();
    let mut states = Vec::with_capacity(4);
    for (k, v) in pairs.iter().enumerate() {
        let phase = if k == 0 {
            Complex::new(T::one(), T::zero())
        } else {
            -phase_of(dot(&pairs[0], v)).conj()
        };
        let mut psi = zero_amps();
        axpy(&mut psi, sym_w * phase, v);
        axpy(&mut psi, singlet_w, &singlet);
        states.push(TwoQubitState::new(psi)?);
    }
    let expected = T::lit(3.0).log2() - T::lit(2.0 / 3.0) * T::E().log2();
    finish(TARRACH_VIDAL_PARALLEL, states, EnsembleKind::Parallel, Some(expected))
}

pub fn tarrach_vidal_parallel<T: Real>() -> Result<NamedMeasurement<T>> {
    tarrach_vidal_from_directions(&tetrahedron())
}
