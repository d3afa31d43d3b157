//! Bloch-sphere directions, spin-1/2 states, rotations and two-spin signal states.
//!
//! Conventions:
//! - `n(theta, phi) = (cos phi sin theta, sin phi sin theta, cos theta)`.
//! - `|n> = (cos theta/2, e^{i phi} sin theta/2)` in the `{|z>, |-z>}` basis.
//! - The antipode of `(theta, phi)` is `(pi - theta, phi + pi mod 2 pi)`.
//! - Two-spin amplitudes are ordered `|z z>, |z -z>, |-z z>, |-z -z>`.

use std::ops::Neg;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which two-spin product ensemble encodes the direction `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleKind {
    /// `|n>|-n>`
    Antiparallel,
    /// `|n>|n>`
    Parallel,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Antiparallel => "antiparallel",
            EnsembleKind::Parallel => "parallel",
        }
    }
}

/// A point on the Bloch sphere, `theta` in `[0, pi]`, `phi` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalDirection<T> {
    theta: T,
    phi: T,
}

fn wrap_phi<T: Real>(phi: T) -> T {
    let two_pi = T::TAU();
    let mut p = phi % two_pi;
    if p < T::zero() {
        p = p + two_pi;
    }
    // `-tiny % 2pi + 2pi` can round up to exactly 2pi
    if p >= two_pi {
        p = T::zero();
    }
    p
}

impl<T: Real> SphericalDirection<T> {
    /// Builds a direction, wrapping `phi` into `[0, 2 pi)`.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() || theta < T::zero() || theta > T::PI() {
            return Err(Error::InvalidDirection {
                theta: theta.to_f64_lossy(),
                phi: phi.to_f64_lossy(),
            });
        }
        Ok(Self {
            theta,
            phi: wrap_phi(phi),
        })
    }

    pub fn north_pole() -> Self {
        Self {
            theta: T::zero(),
            phi: T::zero(),
        }
    }

    pub fn south_pole() -> Self {
        Self {
            theta: T::PI(),
            phi: T::zero(),
        }
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn unit_vector(&self) -> UnitVector3<T> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        UnitVector3 {
            x: cp * st,
            y: sp * st,
            z: ct,
        }
    }

    /// Spherical coordinates of a unit vector; `phi = 0` at the poles.
    pub fn from_unit_vector(v: &UnitVector3<T>) -> Self {
        let z = v.z.max(-T::one()).min(T::one());
        let theta = z.acos();
        let phi = if v.x == T::zero() && v.y == T::zero() {
            T::zero()
        } else {
            wrap_phi(v.y.atan2(v.x))
        };
        Self { theta, phi }
    }

    pub fn antipode(&self) -> Self {
        Self {
            theta: T::PI() - self.theta,
            phi: wrap_phi(self.phi + T::PI()),
        }
    }
}

/// Real unit 3-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> UnitVector3<T> {
    /// Normalizes `(x, y, z)`.
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn ez() -> Self {
        Self {
            x: T::zero(),
            y: T::zero(),
            z: T::one(),
        }
    }

    pub fn ex() -> Self {
        Self {
            x: T::one(),
            y: T::zero(),
            z: T::zero(),
        }
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Unnormalized cross product components.
    pub fn cross(&self, o: &Self) -> [T; 3] {
        [
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        ]
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Real> Neg for UnitVector3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Proper rotation of R^3, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3<T> {
    m: [[T; 3]; 3],
}

impl<T: Real> Rotation3<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            m: [[o, z, z], [z, o, z], [z, z, o]],
        }
    }

    /// Rotation by `angle` about `axis` (right-hand rule).
    pub fn about_axis(axis: &UnitVector3<T>, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let t = T::one() - c;
        let (x, y, z) = (axis.x, axis.y, axis.z);
        Self {
            m: [
                [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
                [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
                [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
            ],
        }
    }

    /// Rotation from a (not necessarily normalized) quaternion `w + xi + yj + zk`.
    pub fn from_quaternion(w: T, x: T, y: T, z: T) -> Result<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let (w, x, y, z) = (w / n, x / n, y / n, z / n);
        let two = T::lit(2.0);
        let o = T::one();
        Ok(Self {
            m: [
                [o - two * (y * y + z * z), two * (x * y - w * z), two * (x * z + w * y)],
                [two * (x * y + w * z), o - two * (x * x + z * z), two * (y * z - w * x)],
                [two * (x * z - w * y), two * (y * z + w * x), o - two * (x * x + y * y)],
            ],
        })
    }

    /// A rotation taking `from` onto `to`.
    pub fn aligning(from: &UnitVector3<T>, to: &UnitVector3<T>) -> Self {
        let c = from.dot(to).max(-T::one()).min(T::one());
        let [cx, cy, cz] = from.cross(to);
        let s = (cx * cx + cy * cy + cz * cz).sqrt();
        let eps = T::epsilon() * T::lit(16.0);
        if s > eps {
            let axis = UnitVector3 {
                x: cx / s,
                y: cy / s,
                z: cz / s,
            };
            return Self::about_axis(&axis, s.atan2(c));
        }
        if c > T::zero() {
            return Self::identity();
        }
        // antiparallel: half turn about any axis orthogonal to `from`
        let trial = if from.x.abs() < lit_half::<T>() {
            UnitVector3::ex()
        } else {
            UnitVector3 {
                x: T::zero(),
                y: T::one(),
                z: T::zero(),
            }
        };
        let [ax, ay, az] = from.cross(&trial);
        let axis = UnitVector3::new(ax, ay, az).expect("nonzero perpendicular");
        Self::about_axis(&axis, T::PI())
    }

    pub fn entries(&self) -> [[T; 3]; 3] {
        self.m
    }

    pub fn apply(&self, v: &UnitVector3<T>) -> UnitVector3<T> {
        let a = v.to_array();
        let row = |i: usize| self.m[i][0] * a[0] + self.m[i][1] * a[1] + self.m[i][2] * a[2];
        UnitVector3 {
            x: row(0),
            y: row(1),
            z: row(2),
        }
    }

    /// `self * rhs`: apply `rhs` first.
    pub fn compose(&self, rhs: &Self) -> Self {
        let mut m = [[T::zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..3).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        Self { m }
    }

    pub fn transpose(&self) -> Self {
        let mut m = self.m;
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.m[j][i];
            }
        }
        Self { m }
    }

    pub fn determinant(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest entrywise deviation of `R^T R` from the identity.
    pub fn orthogonality_error(&self) -> T {
        let p = self.transpose().compose(self);
        let mut err = T::zero();
        for (i, row) in p.m.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                let target = if i == j { T::one() } else { T::zero() };
                err = err.max((e - target).abs());
            }
        }
        err
    }
}

fn lit_half<T: Real>() -> T {
    T::lit(0.5)
}

pub fn rotate_direction<T: Real>(r: &Rotation3<T>, d: &SphericalDirection<T>) -> SphericalDirection<T> {
    SphericalDirection::from_unit_vector(&r.apply(&d.unit_vector()))
}

/// Normalized spin-1/2 state `a|z> + b|-z>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor<T> {
    a: Complex<T>,
    b: Complex<T>,
}

impl<T: Real> Spinor<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { a: a / n, b: b / n })
    }

    pub fn from_direction(d: &SphericalDirection<T>) -> Self {
        let half = d.theta() * lit_half::<T>();
        let (s, c) = half.sin_cos();
        Self {
            a: Complex::new(c, T::zero()),
            b: Complex::from_polar(s, d.phi()),
        }
    }

    pub fn up() -> Self {
        Self {
            a: Complex::new(T::one(), T::zero()),
            b: Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn down() -> Self {
        Self {
            a: Complex::new(T::zero(), T::zero()),
            b: Complex::new(T::one(), T::zero()),
        }
    }

    pub fn amplitudes(&self) -> [Complex<T>; 2] {
        [self.a, self.b]
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.a.conj() * other.a + self.b.conj() * other.b
    }

    /// Multiplies by the global phase `e^{i alpha}`.
    pub fn with_phase(&self, alpha: T) -> Self {
        let z = Complex::from_polar(T::one(), alpha);
        Self {
            a: self.a * z,
            b: self.b * z,
        }
    }

    /// Expectation of the Pauli vector.
    pub fn bloch_vector(&self) -> UnitVector3<T> {
        let two = T::lit(2.0);
        let ab = self.a.conj() * self.b;
        let x = two * ab.re;
        let y = two * ab.im;
        let z = self.a.norm_sqr() - self.b.norm_sqr();
        UnitVector3::new(x, y, z).unwrap_or_else(|_| UnitVector3::ez())
    }

    pub fn direction(&self) -> SphericalDirection<T> {
        SphericalDirection::from_unit_vector(&self.bloch_vector())
    }

    /// `(sigma . n)|self>`, unnormalized.
    pub fn pauli_apply(&self, n: &UnitVector3<T>) -> [Complex<T>; 2] {
        let i = Complex::new(T::zero(), T::one());
        let nz = Complex::new(n.z, T::zero());
        let nm = Complex::new(n.x, T::zero()) - i * n.y;
        let np = Complex::new(n.x, T::zero()) + i * n.y;
        [nz * self.a + nm * self.b, np * self.a - nz * self.b]
    }
}

/// `|<a|b>|^2`
pub fn transition_probability<T: Real>(a: &Spinor<T>, b: &Spinor<T>) -> T {
    a.inner(b).norm_sqr()
}

/// Normalized two-spin pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState<T> {
    amps: [Complex<T>; 4],
}

impl<T: Real> TwoQubitState<T> {
    /// Normalizes the given amplitudes.
    pub fn new(amps: [Complex<T>; 4]) -> Result<Self> {
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amps: amps.map(|z| z / n),
        })
    }

    /// Keeps the amplitudes bit-for-bit when their norm is within `tol` of 1.
    pub fn from_normalized(amps: [Complex<T>; 4], tol: T) -> Result<Self> {
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !((n - T::one()).abs() <= tol) {
            return Err(Error::Domain {
                what: "state norm",
                value: n.to_f64_lossy(),
            });
        }
        Ok(Self { amps })
    }

    pub fn product(first: &Spinor<T>, second: &Spinor<T>) -> Self {
        let [a0, a1] = first.amplitudes();
        let [b0, b1] = second.amplitudes();
        Self {
            amps: [a0 * b0, a0 * b1, a1 * b0, a1 * b1],
        }
    }

    /// `(|z,-z> - |-z,z>)/sqrt 2`
    pub fn singlet() -> Self {
        let r = T::FRAC_1_SQRT_2();
        let z = T::zero();
        Self {
            amps: [
                Complex::new(z, z),
                Complex::new(r, z),
                Complex::new(-r, z),
                Complex::new(z, z),
            ],
        }
    }

    pub fn amplitudes(&self) -> [Complex<T>; 4] {
        self.amps
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }
}

/// `|n>|-n>` for antiparallel, `|n>|n>` for parallel.
pub fn signal_state<T: Real>(d: &SphericalDirection<T>, kind: EnsembleKind) -> TwoQubitState<T> {
    let first = Spinor::from_direction(d);
    let second = match kind {
        EnsembleKind::Antiparallel => Spinor::from_direction(&d.antipode()),
        EnsembleKind::Parallel => first,
    };
    TwoQubitState::product(&first, &second)
}
