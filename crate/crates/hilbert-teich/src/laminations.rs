//! Weighted simple closed curves standing in for measured laminations.

use serde::{Deserialize, Serialize};

use crate::decorated_surface::{arc_slopes, Slope};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::triangulation::PreferredTriangulation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct RawComponent {
    p: i64,
    q: i64,
    w: f64,
}

/// A multicurve with positive weights and pairwise disjoint components. On
/// the once-punctured torus distinct slopes always meet, so there is at most
/// one component. Serialized as a list of `{p, q, w}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve", bound = "T: Scalar")]
pub struct WeightedMulticurve<T> {
    components: Vec<(Slope, T)>,
}

pub fn intersection_number(s1: Slope, s2: Slope) -> u64 {
    s1.intersection(&s2)
}

impl<T: Scalar> WeightedMulticurve<T> {
    pub fn new(components: Vec<(Slope, T)>) -> Result<Self> {
        for (i, &(s, w)) in components.iter().enumerate() {
            if !(w > T::zero()) {
                return Err(Error::InvalidSlope(format!("weight of {s} must be positive, got {w}")));
            }
            for &(t, _) in &components[i + 1..] {
                if s == t || s.intersection(&t) != 0 {
                    return Err(Error::InvalidSlope(format!("components {s} and {t} are not disjoint")));
                }
            }
        }
        Ok(Self { components })
    }

    pub fn single(s: Slope, w: T) -> Result<Self> {
        Self::new(vec![(s, w)])
    }

    pub fn empty() -> Self {
        Self { components: Vec::new() }
    }

    pub fn components(&self) -> &[(Slope, T)] {
        &self.components
    }

    pub fn scaled(&self, k: T) -> Result<Self> {
        Self::new(self.components.iter().map(|&(s, w)| (s, w * k)).collect())
    }

    /// `i(η, μ)` for one slope.
    pub fn intersection_with(&self, s: Slope) -> T {
        self.components
            .iter()
            .fold(T::zero(), |acc, &(c, w)| acc + w * T::from_int(c.intersection(&s) as i64))
    }

    /// `(i(η_1, μ), ..., i(η_N, μ))`, checked to lie on the boundary of the
    /// lamination cone when nonzero.
    pub fn intersection_vector(&self, tri: &PreferredTriangulation) -> Result<Vec<T>> {
        let v: Vec<T> = arc_slopes(tri)?.into_iter().map(|s| self.intersection_with(s)).collect();
        let scale = v.iter().fold(T::one(), |m, x| m.max(x.abs()));
        let vals = tri.cone_of_laminations::<T>().evaluate(&v)?;
        // weights are arbitrary reals, so boundary equalities hold only up to rounding
        if vals.iter().any(|&f| f < -T::tol(1e-12) * scale) {
            return Err(Error::Internal(format!("intersection vector {v:?} outside the lamination cone")));
        }
        if !self.components.is_empty() && !tri.on_boundary(&v)? {
            return Err(Error::Internal(format!("intersection vector {v:?} is interior")));
        }
        Ok(v)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RawCurve(Vec<RawComponent>);

impl<T: Scalar> TryFrom<RawCurve> for WeightedMulticurve<T> {
    type Error = Error;

    fn try_from(raw: RawCurve) -> Result<Self> {
        let comps = raw
            .0
            .into_iter()
            .map(|c| Ok((Slope::new(c.p, c.q)?, T::lit(c.w))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }
}

impl<T: Scalar> From<WeightedMulticurve<T>> for RawCurve {
    fn from(m: WeightedMulticurve<T>) -> Self {
        RawCurve(m.components.iter().map(|&(s, w)| RawComponent { p: s.p(), q: s.q(), w: w.to_f64_lossy() }).collect())
    }
}
