//! Mapping classes of the once-punctured torus as `SL(2, Z)` matrices acting
//! on slopes and, through automorphisms of the free group `<A, B>`, on
//! marked structures.

use std::ops::Mul;

use crate::decorated_surface::{arc_slopes, MarkedStructure, Slope, TruncatedLengthVector};
use crate::earthquake::TwistFlow;
use crate::error::{Error, Result};
use crate::hyperbolic_core::MobiusMap;
use crate::scalar::Scalar;
use crate::teich_hilbert::hilbert_distance;
use crate::triangulation::PreferredTriangulation;

pub type IntMatrix = [[i64; 2]; 2];

fn mat_mul(x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
    [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]
}

/// Generators of `SL(2, Z)` realized by automorphisms preserving `[A, B]`:
/// `U: A ↦ A, B ↦ BA` (homology `[[1,1],[0,1]]`) and
/// `L: A ↦ AB, B ↦ B` (homology `[[1,0],[1,1]]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    U,
    L,
}

pub type Word = Vec<(Generator, i64)>;

/// Euclidean reduction of `m` to a word `G_1^{k_1} ⋯ G_n^{k_n} = ±m`.
pub fn word_for(m: &IntMatrix) -> Word {
    let [[mut a, mut b], [mut c, mut d]] = *m;
    let mut ops = Vec::new();
    while c != 0 {
        if a == 0 {
            a += c;
            b += d;
            ops.push((Generator::U, -1));
        } else if a.abs() > c.abs() {
            let k = a / c;
            a -= k * c;
            b -= k * d;
            ops.push((Generator::U, k));
        } else {
            let k = c / a;
            c -= k * a;
            d -= k * b;
            ops.push((Generator::L, k));
        }
    }
    // Now the matrix is a·[[1, ab], [0, 1]] with a = ±1.
    ops.push((Generator::U, b * a));
    ops
}

/// Homology matrix of a word.
pub fn word_matrix(w: &Word) -> IntMatrix {
    w.iter().fold([[1, 0], [0, 1]], |acc, &(g, k)| {
        let step = match g {
            Generator::U => [[1, k], [0, 1]],
            Generator::L => [[1, 0], [k, 1]],
        };
        mat_mul(&acc, &step)
    })
}

/// Applies the automorphism of a word to a holonomy pair. The result `θ(A, B)`
/// satisfies `tr_{θ}(σ) = tr(H(θ) σ)` for every slope `σ`.
pub fn substitute<T: Scalar>(w: &Word, a: MobiusMap<T>, b: MobiusMap<T>) -> (MobiusMap<T>, MobiusMap<T>) {
    let (mut x, mut y) = (a, b);
    for &(g, k) in w {
        for _ in 0..k.unsigned_abs() {
            match g {
                Generator::U => y = y * if k > 0 { x } else { x.inverse() },
                Generator::L => x = x * if k > 0 { y } else { y.inverse() },
            }
        }
    }
    (x, y)
}

fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// A unimodular matrix whose first column is `s`.
pub fn basis_matrix(s: Slope) -> IntMatrix {
    let (p, q) = (s.p(), s.q());
    let (g, mut x, mut y) = egcd(p, q);
    if g < 0 {
        x = -x;
        y = -y;
    }
    [[p, -y], [q, x]]
}

/// Element of `SL(2, Z)` acting on first homology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MappingClass {
    m: IntMatrix,
}

impl MappingClass {
    pub fn new(m: IntMatrix) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det != 1 {
            return Err(Error::InvalidStructure(format!("mapping class determinant {det} != 1")));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self { m: [[1, 0], [0, 1]] }
    }

    /// Positive Dehn twist `v ↦ v + det(α, v) α`; about `1/0` it is `[[1,1],[0,1]]`.
    pub fn dehn_twist(alpha: Slope) -> Self {
        let (p, q) = (alpha.p(), alpha.q());
        Self { m: [[1 - p * q, p * p], [-q * q, 1 + p * q]] }
    }

    pub fn matrix(&self) -> IntMatrix {
        self.m
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        Self { m: [[d, -b], [-c, a]] }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        (0..n.unsigned_abs()).fold(Self::identity(), |acc, _| acc * base)
    }

    pub fn act_on_slope(&self, s: Slope) -> Slope {
        let [[a, b], [c, d]] = self.m;
        Slope::new(a * s.p() + b * s.q(), c * s.p() + d * s.q()).expect("unimodular image is primitive")
    }

    /// `(X, f ∘ g^{-1})`, so that `l_σ(gX) = l_{g^{-1} σ}(X)`. The result is in
    /// the normal form of [`MarkedStructure::from_traces`], with the traces of
    /// `1/0, 0/1, 1/1` read off the log-space arc lengths of their preimages.
    pub fn act_on_structure<T: Scalar>(&self, x: &MarkedStructure<T>) -> Result<MarkedStructure<T>> {
        let back = self.inverse();
        let base = [Slope::new(1, 0)?, Slope::new(0, 1)?, Slope::new(1, 1)?];
        let half = T::lit(0.5);
        let tr = base.map(|s| ((x.arc_length(back.act_on_slope(s)) - T::lit(2.0) * x.rho0()) * half - T::LN_2()).exp());
        let larger = tr[2] + tr[2] >= tr[0] * tr[1];
        MarkedStructure::from_traces(tr[0], tr[1], larger, x.rho0())
    }

    /// The same remarking by substituting a word for `g^{-1}` into the
    /// holonomy; loses precision as the word grows.
    pub fn act_on_structure_matrices<T: Scalar>(&self, x: &MarkedStructure<T>) -> Result<MarkedStructure<T>> {
        let w = word_for(&self.inverse().m);
        let (a, b) = substitute(&w, x.a(), x.b());
        x.with_holonomy(a, b)
    }
}

impl Mul for MappingClass {
    type Output = MappingClass;

    fn mul(self, rhs: Self) -> Self {
        Self { m: mat_mul(&self.m, &rhs.m) }
    }
}

/// `Σ_i i(η_i, α)` over the arcs of a slope-labelled triangulation.
pub fn intersection_sum(tri: &PreferredTriangulation, alpha: Slope) -> Result<u64> {
    Ok(arc_slopes(tri)?.iter().map(|s| s.intersection(&alpha)).sum())
}

/// Bound on `|d(X, Y) - d(gX, gY)|` for a positive twist `g` about `α` and
/// `X, Y` with `l_α <= l`: `log` of `[1 + (l/rho0) Σ i(η_i, α)]²`.
pub fn twist_distortion_bound<T: Scalar>(
    tri: &PreferredTriangulation,
    alpha: Slope,
    l: T,
    rho0: T,
) -> Result<T> {
    let s = T::from_int(intersection_sum(tri, alpha)? as i64);
    let factor = T::one() + l / rho0 * s;
    Ok(T::lit(2.0) * factor.ln())
}

/// Length vector of `g^n X` on `tri`, read as lengths of `g^{-n} η_i` on `X`.
pub fn orbit_lengths<T: Scalar>(
    g: &MappingClass,
    n: i64,
    x: &MarkedStructure<T>,
    tri: &PreferredTriangulation,
) -> Result<TruncatedLengthVector<T>> {
    let back = g.pow(-n);
    let slopes: Vec<Slope> = arc_slopes(tri)?.into_iter().map(|s| back.act_on_slope(s)).collect();
    TruncatedLengthVector::new(tri, x.lengths_of(&slopes), x.rho0())
}

/// `d(g^n X, g^n Y)` and `d(g^n X, g^{n+1} X)` for `n = 0..=N`.
pub fn orbit_distances<T: Scalar>(
    g: &MappingClass,
    x: &MarkedStructure<T>,
    y: &MarkedStructure<T>,
    n_max: usize,
    tri: &PreferredTriangulation,
) -> Result<(Vec<T>, Vec<T>)> {
    let mut pair = Vec::with_capacity(n_max + 1);
    let mut consecutive = Vec::with_capacity(n_max + 1);
    let mut gx = orbit_lengths(g, 0, x, tri)?;
    for n in 0..=n_max as i64 {
        let gy = orbit_lengths(g, n, y, tri)?;
        let next = orbit_lengths(g, n + 1, x, tri)?;
        pair.push(hilbert_distance(tri, &gx, &gy)?);
        consecutive.push(hilbert_distance(tri, &gx, &next)?);
        gx = next;
    }
    Ok((pair, consecutive))
}

/// Scans `X = E^s_α X0`, `Y = E^t_α X0` over `grid × grid` for the largest
/// `|d(gX, gY) - d(X, Y)|`; returns `(s, t, |Δd|)`.
pub fn non_isometry_witness<T: Scalar>(
    g: &MappingClass,
    x0: &MarkedStructure<T>,
    alpha: Slope,
    tri: &PreferredTriangulation,
    grid: &[T],
) -> Result<(T, T, T)> {
    let slopes = arc_slopes(tri)?;
    let back = g.inverse();
    let moved: Vec<Slope> = slopes.iter().map(|&s| back.act_on_slope(s)).collect();
    let flow = TwistFlow::new(x0, alpha, T::one(), &slopes)?;
    let moved_flow = TwistFlow::new(x0, alpha, T::one(), &moved)?;
    let at = |f: &TwistFlow<T>, t: T| TruncatedLengthVector::new(tri, f.lengths(t), x0.rho0());
    let mut best = (T::zero(), T::zero(), T::neg_infinity());
    for &s in grid {
        for &t in grid {
            let d = hilbert_distance(tri, &at(&flow, s)?, &at(&flow, t)?)?;
            let dg = hilbert_distance(tri, &at(&moved_flow, s)?, &at(&moved_flow, t)?)?;
            if (dg - d).abs() > best.2 {
                best = (s, t, (dg - d).abs());
            }
        }
    }
    Ok(best)
}
