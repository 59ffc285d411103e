//! Hilbert (Birkhoff) metric on polyhedral cones given by facet functionals.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A closed polyhedral cone `{x : f_k(x) >= 0}` in H-representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeFunctionalSet<T> {
    dim: usize,
    functionals: Vec<Vec<T>>,
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&u, &v)| acc + u * v)
}

impl<T: Scalar> ConeFunctionalSet<T> {
    /// Builds the cone and checks that `witness` lies strictly inside it.
    pub fn new(dim: usize, functionals: Vec<Vec<T>>, witness: &[T]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCone("dimension must be positive".into()));
        }
        if functionals.is_empty() {
            return Err(Error::InvalidCone("no functionals".into()));
        }
        for (k, f) in functionals.iter().enumerate() {
            if f.len() != dim {
                return Err(Error::Dimension { expected: dim, got: f.len() });
            }
            if f.iter().all(|c| c.is_zero()) {
                return Err(Error::InvalidCone(format!("functional {k} is zero")));
            }
        }
        let cone = Self { dim, functionals };
        cone.check_interior(witness)
            .map_err(|e| Error::InvalidCone(format!("witness rejected: {e}")))?;
        Ok(cone)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn functionals(&self) -> &[Vec<T>] {
        &self.functionals
    }

    fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Values `f_k(x)` for every functional.
    pub fn evaluate(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x)?;
        Ok(self.functionals.iter().map(|f| dot(f, x)).collect())
    }

    pub fn contains(&self, x: &[T]) -> Result<bool> {
        Ok(self.evaluate(x)?.iter().all(|&v| v >= T::zero()))
    }

    fn check_interior(&self, x: &[T]) -> Result<Vec<T>> {
        let vals = self.evaluate(x)?;
        for (k, &v) in vals.iter().enumerate() {
            if !(v > T::zero()) {
                return Err(Error::NotInterior { facet: k, value: v.to_f64_lossy() });
            }
        }
        Ok(vals)
    }

    /// `½ log(M/m)` with `M`, `m` the extreme facet ratios `f_k(x)/f_k(y)`.
    pub fn birkhoff_distance(&self, x: &[T], y: &[T]) -> Result<T> {
        let fx = self.check_interior(x)?;
        let fy = self.check_interior(y)?;
        let mut big = T::neg_infinity();
        let mut small = T::infinity();
        for (a, b) in fx.iter().zip(&fy) {
            let r = *a / *b;
            big = big.max(r);
            small = small.min(r);
        }
        Ok(((big / small).ln() * T::lit(0.5)).max(T::zero()))
    }

    /// Sup of log ratios of Euclidean distances to the facet hyperplanes, symmetrized.
    pub fn yamada_distance(&self, x: &[T], y: &[T]) -> Result<T> {
        self.check_interior(x)?;
        self.check_interior(y)?;
        let mut fwd = T::neg_infinity();
        let mut back = T::neg_infinity();
        for f in &self.functionals {
            let norm = dot(f, f).sqrt();
            let dx = dot(f, x) / norm;
            let dy = dot(f, y) / norm;
            fwd = fwd.max((dx / dy).ln());
            back = back.max((dy / dx).ln());
        }
        Ok(((fwd + back) * T::lit(0.5)).max(T::zero()))
    }

    /// Line parameters where `x + s(y - x)` leaves the cone: the largest
    /// negative root and the smallest root above 1, if they exist.
    fn exit_parameters(&self, x: &[T], y: &[T]) -> (Option<T>, Option<T>) {
        let d: Vec<T> = y.iter().zip(x).map(|(&b, &a)| b - a).collect();
        let mut lo: Option<T> = None;
        let mut hi: Option<T> = None;
        for f in &self.functionals {
            let fd = dot(f, &d);
            if fd.is_zero() {
                continue;
            }
            let s = -dot(f, x) / fd;
            if s < T::zero() {
                lo = Some(lo.map_or(s, |v| v.max(s)));
            } else if s > T::one() {
                hi = Some(hi.map_or(s, |v| v.min(s)));
            }
        }
        (lo, hi)
    }

    /// Boundary points `a` (behind `x`) and `b` (beyond `y`) on the line through
    /// `x` and `y`, ordered `a, x, y, b`. `None` marks an exit at infinity.
    pub fn boundary_points(&self, x: &[T], y: &[T]) -> Result<(Option<Vec<T>>, Option<Vec<T>>)> {
        self.check_interior(x)?;
        self.check_interior(y)?;
        let (lo, hi) = self.exit_parameters(x, y);
        let at = |s: T| -> Vec<T> { x.iter().zip(y).map(|(&a, &b)| a + s * (b - a)).collect() };
        Ok((lo.map(at), hi.map(at)))
    }

    /// `½ log [a, b, y, x]` along the line through `x` and the rescaling of
    /// `y` onto the affine slice of `x`.
    ///
    /// The slice is `{z : Σ_k f_k(z) = Σ_k f_k(x)}`. Rescaling does not change
    /// the projective class of `y`, and on a slice the cross-ratio reproduces
    /// the Birkhoff ratio exactly. With `a` at infinity the one-sided term
    /// `|b - x| / |b - y|` is used, and symmetrically for `b`.
    pub fn cross_ratio_distance(&self, x: &[T], y: &[T]) -> Result<T> {
        let fx = self.check_interior(x)?;
        let fy = self.check_interior(y)?;
        let phi_x = fx.iter().fold(T::zero(), |a, &b| a + b);
        let phi_y = fy.iter().fold(T::zero(), |a, &b| a + b);
        let scale = phi_x / phi_y;
        let ys: Vec<T> = y.iter().map(|&v| v * scale).collect();

        let size = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let gap = x.iter().zip(&ys).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
        if gap <= size * T::epsilon() * T::lit(16.0) {
            return Ok(T::zero());
        }

        // Parameters: x at 0, ys at 1, a at sa < 0, b at sb > 1.
        let ratio = match self.exit_parameters(x, &ys) {
            (Some(sa), Some(sb)) => ((T::one() - sa) * sb) / ((-sa) * (sb - T::one())),
            (Some(sa), None) => (T::one() - sa) / (-sa),
            (None, Some(sb)) => sb / (sb - T::one()),
            (None, None) => T::one(),
        };
        Ok((ratio.ln() * T::lit(0.5)).max(T::zero()))
    }
}

/// The nonnegative orthant of `R^n`.
pub fn orthant<T: Scalar>(n: usize) -> ConeFunctionalSet<T> {
    let functionals = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    ConeFunctionalSet::new(n, functionals, &vec![T::one(); n]).expect("orthant is a valid cone")
}
