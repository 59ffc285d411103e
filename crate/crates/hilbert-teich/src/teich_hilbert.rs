//! The Hilbert metric `d^Γ_h` on truncated length vectors and comparisons
//! between triangulations.

use crate::decorated_surface::{corner_lengths, ptolemy_flip_length, TruncatedLengthVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::triangulation::PreferredTriangulation;

fn half_log_ratio_spread<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut up = T::neg_infinity();
    let mut down = T::neg_infinity();
    for (&x, &y) in a.iter().zip(b) {
        let r = (x / y).ln();
        up = up.max(r);
        down = down.max(-r);
    }
    (up + down) * T::lit(0.5)
}

/// `½ (sup log f(v1)/f(v2) + sup log f(v2)/f(v1))` over the distinct cyclic
/// functionals `f = l_i - l_j + l_k`.
pub fn hilbert_distance<T: Scalar>(
    tri: &PreferredTriangulation,
    v1: &TruncatedLengthVector<T>,
    v2: &TruncatedLengthVector<T>,
) -> Result<T> {
    v1.validate(tri)?;
    v2.validate(tri)?;
    let fs = tri.triangle_functionals();
    let a: Vec<T> = fs.iter().map(|f| f.eval(&v1.lengths)).collect();
    let b: Vec<T> = fs.iter().map(|f| f.eval(&v2.lengths)).collect();
    Ok(half_log_ratio_spread(&a, &b))
}

/// The same distance through the corner lengths of every triangle.
pub fn hilbert_distance_corners<T: Scalar>(
    tri: &PreferredTriangulation,
    v1: &TruncatedLengthVector<T>,
    v2: &TruncatedLengthVector<T>,
) -> Result<T> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for t in 0..tri.triangles().len() {
        a.extend(corner_lengths(v1, tri, t)?);
        b.extend(corner_lengths(v2, tri, t)?);
    }
    Ok(half_log_ratio_spread(&a, &b))
}

/// The same distance as the Birkhoff metric of the hyperplane cone.
pub fn hilbert_distance_cone<T: Scalar>(
    tri: &PreferredTriangulation,
    v1: &TruncatedLengthVector<T>,
    v2: &TruncatedLengthVector<T>,
) -> Result<T> {
    v1.validate(tri)?;
    v2.validate(tri)?;
    tri.hyperplane_functionals::<T>().birkhoff_distance(&v1.lengths, &v2.lengths)
}

/// `max{½ sup log l_η(X0) - log rho0, ½ sup l_η(X0) + ½ log 2}`.
pub fn o_dist_constant<T: Scalar>(tri: &PreferredTriangulation, v0: &TruncatedLengthVector<T>) -> Result<T> {
    v0.validate(tri)?;
    let half = T::lit(0.5);
    let sup = v0.sup();
    Ok((half * sup.ln() - v0.rho0.ln()).max(half * sup + half * T::LN_2()))
}

/// `d(v0, v) - ½ sup log l_η(v)`; bounded in absolute value by [`o_dist_constant`].
pub fn radial_comparison<T: Scalar>(
    tri: &PreferredTriangulation,
    v0: &TruncatedLengthVector<T>,
    v: &TruncatedLengthVector<T>,
) -> Result<T> {
    Ok(hilbert_distance(tri, v0, v)? - T::lit(0.5) * v.sup().ln())
}

/// Lengths after flipping `arc`: the new diagonal from Ptolemy on the
/// quadrilateral `x y z w` around it, all other entries unchanged.
pub fn flip_length_vector<T: Scalar>(
    tri: &PreferredTriangulation,
    v: &TruncatedLengthVector<T>,
    arc: usize,
) -> Result<TruncatedLengthVector<T>> {
    let (t1, t2) = tri.adjacent_triangles(arc)?;
    let rot = |t: [usize; 3]| {
        let p = t.iter().position(|&a| a == arc).expect("arc in adjacent triangle");
        (t[(p + 1) % 3], t[(p + 2) % 3])
    };
    let (x, y) = rot(tri.triangles()[t1]);
    let (z, w) = rot(tri.triangles()[t2]);
    let l = &v.lengths;
    let mut lengths = l.clone();
    lengths[arc] = ptolemy_flip_length(l[arc], [l[x], l[y], l[z], l[w]]);
    TruncatedLengthVector::new(&tri.flip(arc)?, lengths, v.rho0)
}

/// Outcome of comparing `d^Γ` and `d^{Γ'}` from a common base point.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipComparison<T> {
    pub d_gamma: Vec<T>,
    pub d_gamma_prime: Vec<T>,
    pub max_diff: T,
    /// `C_Γ + C_{Γ'} + ½ log 2`.
    pub ceiling: T,
}

/// Compares the two metrics on vectors given in `Γ` coordinates; the `Γ'`
/// coordinates come from [`flip_length_vector`].
pub fn flip_comparison<T: Scalar>(
    gamma: &PreferredTriangulation,
    gamma_prime: &PreferredTriangulation,
    v0: &TruncatedLengthVector<T>,
    vs: &[TruncatedLengthVector<T>],
) -> Result<FlipComparison<T>> {
    let arc = gamma.flipped_arc(gamma_prime).ok_or_else(|| Error::Flip {
        arc: "?".into(),
        reason: "second triangulation is not a diagonal flip of the first".into(),
    })?;
    let v0p = flip_length_vector(gamma, v0, arc)?;
    let ceiling = o_dist_constant(gamma, v0)? + o_dist_constant(gamma_prime, &v0p)? + T::lit(0.5) * T::LN_2();
    let mut d_gamma = Vec::with_capacity(vs.len());
    let mut d_gamma_prime = Vec::with_capacity(vs.len());
    let mut max_diff = T::zero();
    for v in vs {
        let vp = flip_length_vector(gamma, v, arc)?;
        let a = hilbert_distance(gamma, v0, v)?;
        let b = hilbert_distance(gamma_prime, &v0p, &vp)?;
        max_diff = max_diff.max((a - b).abs());
        d_gamma.push(a);
        d_gamma_prime.push(b);
    }
    Ok(FlipComparison { d_gamma, d_gamma_prime, max_diff, ceiling })
}
