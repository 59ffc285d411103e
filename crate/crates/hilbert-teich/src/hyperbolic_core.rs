//! Upper half-plane primitives: Möbius maps, horoball-decorated cusps,
//! truncated lengths, λ-lengths and hyperbolic axes.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point of the ideal boundary `R ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IdealPoint<T> {
    Finite(T),
    Infinity,
}

impl<T: Scalar> IdealPoint<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            IdealPoint::Finite(x) => Some(x),
            IdealPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, IdealPoint::Infinity)
    }
}

/// `z ↦ (az + b)/(cz + d)` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> MobiusMap<T> {
    /// Normalizes to determinant one. Rejects nonpositive determinants.
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > T::zero()) || !det.is_finite() {
            return Err(Error::InvalidStructure(format!(
                "Möbius determinant must be positive, got {det}"
            )));
        }
        let k = det.sqrt().recip();
        Ok(Self { a: a * k, b: b * k, c: c * k, d: d * k })
    }

    /// Builds from entries already of determinant one, without rescaling.
    pub fn from_entries(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::from_entries(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn diagonal(lambda: T) -> Self {
        Self::from_entries(lambda, T::zero(), T::zero(), lambda.recip())
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        Self::from_entries(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        Self::from_entries(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn entries(&self) -> [[T; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    /// Largest absolute entry.
    pub fn scale(&self) -> T {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Divides by `sqrt(det)` if the determinant has drifted from one.
    pub fn renormalized(self) -> Self {
        let det = self.det();
        // Drift below the rounding noise of `ad - bc` itself is left alone.
        let noise = T::epsilon() * T::lit(64.0) * ((self.a * self.d).abs() + (self.b * self.c).abs());
        if (det - T::one()).abs() > T::tol(1e-12).max(noise) && det > T::zero() {
            let k = det.sqrt().recip();
            Self::from_entries(self.a * k, self.b * k, self.c * k, self.d * k)
        } else {
            self
        }
    }

    pub fn apply_point(&self, z: IdealPoint<T>) -> IdealPoint<T> {
        match z {
            IdealPoint::Infinity => {
                if self.c.is_zero() {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite(self.a / self.c)
                }
            }
            IdealPoint::Finite(x) => {
                let den = self.c * x + self.d;
                if den.is_zero() {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }

    /// Action on an interior point `x + iy`.
    pub fn apply_interior(&self, x: T, y: T) -> (T, T) {
        let (re, im) = (self.c * x + self.d, self.c * y);
        let den = re * re + im * im;
        let (nr, ni) = (self.a * x + self.b, self.a * y);
        ((nr * re + ni * im) / den, (ni * re - nr * im) / den)
    }
}

impl<T: Scalar> Mul for MobiusMap<T> {
    type Output = MobiusMap<T>;

    fn mul(self, v: Self) -> Self {
        let u = self;
        Self::from_entries(
            u.a * v.a + u.b * v.c,
            u.a * v.b + u.b * v.d,
            u.c * v.a + u.d * v.c,
            u.c * v.b + u.d * v.d,
        )
        .renormalized()
    }
}

/// Coordinate of `z` after the projective map sending `z1, z2, z3` to `0, 1, ∞`.
///
/// The map may reverse orientation; only the real value is used.
pub fn cross_ratio<T: Scalar>(
    z: IdealPoint<T>,
    z1: IdealPoint<T>,
    z2: IdealPoint<T>,
    z3: IdealPoint<T>,
) -> Result<IdealPoint<T>> {
    use IdealPoint::*;
    let one = T::one();
    let zero = T::zero();
    let (a, b, c, d) = match (z1, z2, z3) {
        (Infinity, Finite(p2), Finite(p3)) => (zero, p3 - p2, one, -p3),
        (Finite(p1), Infinity, Finite(p3)) => (one, -p1, one, -p3),
        (Finite(p1), Finite(p2), Infinity) => (one, -p1, zero, p2 - p1),
        (Finite(p1), Finite(p2), Finite(p3)) => (p2 - p3, -p1 * (p2 - p3), p2 - p1, -p3 * (p2 - p1)),
        _ => return Err(Error::EqualBasePoints),
    };
    if (a * d - b * c).is_zero() {
        return Err(Error::EqualBasePoints);
    }
    Ok(MobiusMap::from_entries(a, b, c, d).apply_point(z))
}

/// A cusp with a horoball: the Euclidean diameter for a finite base point,
/// the height of the horizontal horocycle for `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoratedCusp<T> {
    pub base: IdealPoint<T>,
    pub size: T,
}

impl<T: Scalar> DecoratedCusp<T> {
    pub fn new(base: IdealPoint<T>, size: T) -> Result<Self> {
        if !(size > T::zero()) || !size.is_finite() {
            return Err(Error::InvalidStructure(format!("horoball size must be positive, got {size}")));
        }
        Ok(Self { base, size })
    }

    pub fn finite(p: T, diameter: T) -> Result<Self> {
        Self::new(IdealPoint::Finite(p), diameter)
    }

    pub fn at_infinity(height: T) -> Result<Self> {
        Self::new(IdealPoint::Infinity, height)
    }

    /// Signed offset of `(x, y)` from the horocycle, zero on it.
    pub fn boundary_residual(&self, x: T, y: T) -> T {
        match self.base {
            IdealPoint::Infinity => y - self.size,
            IdealPoint::Finite(p) => {
                let r = self.size * T::lit(0.5);
                ((x - p).powi(2) + (y - r).powi(2)).sqrt() - r
            }
        }
    }

    /// Boundary point of the horocycle at angle `theta` (finite base) or
    /// abscissa offset `theta` (base at infinity).
    pub fn boundary_point(&self, theta: T) -> (T, T) {
        match self.base {
            IdealPoint::Infinity => (theta, self.size),
            IdealPoint::Finite(p) => {
                let r = self.size * T::lit(0.5);
                (p + r * theta.cos(), r + r * theta.sin())
            }
        }
    }
}

/// Image of a decorated cusp under a Möbius map.
pub fn apply_mobius<T: Scalar>(m: &MobiusMap<T>, cusp: &DecoratedCusp<T>) -> DecoratedCusp<T> {
    match cusp.base {
        IdealPoint::Infinity => {
            if m.c.is_zero() {
                DecoratedCusp { base: IdealPoint::Infinity, size: cusp.size / (m.d * m.d) }
            } else {
                DecoratedCusp {
                    base: IdealPoint::Finite(m.a / m.c),
                    size: (m.c * m.c * cusp.size).recip(),
                }
            }
        }
        IdealPoint::Finite(p) => {
            let den = m.c * p + m.d;
            if den.is_zero() {
                DecoratedCusp {
                    base: IdealPoint::Infinity,
                    size: (m.c * m.c * cusp.size).recip(),
                }
            } else {
                DecoratedCusp {
                    base: IdealPoint::Finite((m.a * p + m.b) / den),
                    size: cusp.size / (den * den),
                }
            }
        }
    }
}

/// Signed hyperbolic length of the geodesic segment between two horocycles.
pub fn truncated_length<T: Scalar>(c1: &DecoratedCusp<T>, c2: &DecoratedCusp<T>) -> Result<T> {
    match (c1.base, c2.base) {
        (IdealPoint::Finite(p), IdealPoint::Finite(q)) => {
            if p == q {
                return Err(Error::EqualBasePoints);
            }
            Ok(((p - q) * (p - q) / (c1.size * c2.size)).ln())
        }
        (IdealPoint::Finite(_), IdealPoint::Infinity) => Ok((c2.size / c1.size).ln()),
        (IdealPoint::Infinity, IdealPoint::Finite(_)) => Ok((c1.size / c2.size).ln()),
        (IdealPoint::Infinity, IdealPoint::Infinity) => Err(Error::EqualBasePoints),
    }
}

/// `exp(truncated_length / 2)`.
pub fn lambda_length<T: Scalar>(c1: &DecoratedCusp<T>, c2: &DecoratedCusp<T>) -> Result<T> {
    Ok((truncated_length(c1, c2)? * T::lit(0.5)).exp())
}

/// An oriented geodesic between two distinct ideal points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic<T> {
    pub start: IdealPoint<T>,
    pub end: IdealPoint<T>,
}

impl<T: Scalar> Geodesic<T> {
    pub fn new(start: IdealPoint<T>, end: IdealPoint<T>) -> Result<Self> {
        if start == end {
            return Err(Error::EqualBasePoints);
        }
        Ok(Self { start, end })
    }
}

fn check_hyperbolic<T: Scalar>(m: &MobiusMap<T>) -> Result<()> {
    let t = m.trace().abs();
    if !(t > T::lit(2.0)) {
        return Err(Error::NotHyperbolic(t.to_f64_lossy()));
    }
    Ok(())
}

/// Fixed points `(repelling, attracting)` of a hyperbolic map.
pub fn fixed_points<T: Scalar>(m: &MobiusMap<T>) -> Result<(IdealPoint<T>, IdealPoint<T>)> {
    check_hyperbolic(m)?;
    let two = T::lit(2.0);
    let tr = m.trace();
    let disc = (tr * tr - two * two).sqrt();
    if m.c.is_zero() {
        let finite = IdealPoint::Finite(m.b / (m.d - m.a));
        // z ↦ a² z + ab expands exactly when |a| > 1.
        return Ok(if m.a.abs() > T::one() {
            (finite, IdealPoint::Infinity)
        } else {
            (IdealPoint::Infinity, finite)
        });
    }
    // Roots of c z² + (d − a) z − b = 0 without cancellation.
    let e = m.d - m.a;
    let sign = if e < T::zero() { -T::one() } else { T::one() };
    let q = -(e + sign * disc) / two;
    let z1 = q / m.c;
    let z2 = -m.b / q;
    // Derivative at a fixed point is 1/(cz + d)²; attracting iff |cz + d| > 1.
    if (m.c * z1 + m.d).abs() > (m.c * z2 + m.d).abs() {
        Ok((IdealPoint::Finite(z2), IdealPoint::Finite(z1)))
    } else {
        Ok((IdealPoint::Finite(z1), IdealPoint::Finite(z2)))
    }
}

/// Axis oriented from the repelling to the attracting fixed point, and the
/// translation length `2 arccosh(|tr|/2)`.
pub fn axis_and_translation_length<T: Scalar>(m: &MobiusMap<T>) -> Result<(Geodesic<T>, T)> {
    let (rep, att) = fixed_points(m)?;
    let len = translation_length(m)?;
    Ok((Geodesic::new(rep, att)?, len))
}

pub fn translation_length<T: Scalar>(m: &MobiusMap<T>) -> Result<T> {
    check_hyperbolic(m)?;
    Ok(T::lit(2.0) * (m.trace().abs() / T::lit(2.0)).acosh())
}

/// A map `R` with `R(0)` repelling and `R(∞)` attracting for `m`.
pub fn axis_frame<T: Scalar>(m: &MobiusMap<T>) -> Result<MobiusMap<T>> {
    let (rep, att) = fixed_points(m)?;
    let one = T::one();
    let zero = T::zero();
    Ok(match (rep, att) {
        (IdealPoint::Finite(r), IdealPoint::Infinity) => MobiusMap::from_entries(one, r, zero, one),
        (IdealPoint::Infinity, IdealPoint::Finite(a)) => MobiusMap::from_entries(a, -one, one, zero),
        (IdealPoint::Finite(r), IdealPoint::Finite(a)) => {
            if a > r {
                MobiusMap::new(a, r, one, one)?
            } else {
                MobiusMap::new(a, -r, one, -one)?
            }
        }
        _ => unreachable!("fixed points of a hyperbolic map are distinct"),
    })
}

/// The one-parameter subgroup through `m` along its axis: `E_t` translates by
/// `t` in the direction of `m`, and `E_ℓ = ±m` for the translation length `ℓ`.
pub fn translation_along_axis<T: Scalar>(m: &MobiusMap<T>, t: T) -> Result<MobiusMap<T>> {
    let r = axis_frame(m)?;
    let h = (t * T::lit(0.5)).exp();
    Ok(r * MobiusMap::diagonal(h) * r.inverse())
}
