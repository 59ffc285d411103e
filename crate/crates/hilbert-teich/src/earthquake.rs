//! Earthquakes along weighted simple closed curves, the length defects
//! `f_i(t) = l_{η_i}(E^t X) - t i(η_i, μ)`, and reparametrized rays.

use std::collections::BTreeMap;

use crate::decorated_surface::{arc_slopes, christoffel, MarkedStructure, Slope, TruncatedLengthVector};
use crate::error::{Error, Result};
use crate::hyperbolic_core::{axis_frame, translation_along_axis, MobiusMap};
use crate::laminations::WeightedMulticurve;
use crate::mcg::{basis_matrix, substitute, word_for};
use crate::scalar::Scalar;
use crate::teich_hilbert::hilbert_distance;
use crate::triangulation::PreferredTriangulation;

/// Moves the marking so that `alpha` becomes `1/0`, returning the remarked
/// pair and the inverse basis change.
fn adapted_pair<T: Scalar>(x: &MarkedStructure<T>, alpha: Slope) -> (MobiusMap<T>, MobiusMap<T>, [[i64; 2]; 2]) {
    let m = basis_matrix(alpha);
    let (a, b) = substitute(&word_for(&m), x.a(), x.b());
    let inv = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]];
    (a, b, inv)
}

/// `E^{wt}_α X` computed on matrices: `B ↦ E_{-wt} B` in a marking where `α`
/// is carried by `A`. The holonomy grows badly conditioned within a few units
/// of `wt`; [`earthquake`] is the accurate path.
pub fn earthquake_matrices<T: Scalar>(x: &MarkedStructure<T>, alpha: Slope, w: T, t: T) -> Result<MarkedStructure<T>> {
    let (a, b, inv) = adapted_pair(x, alpha);
    let b = translation_along_axis(&a, -w * t)? * b;
    let (a, b) = substitute(&word_for(&inv), a, b);
    x.with_holonomy(a, b)
}

/// `E^{wt}_α X`, returned in the normal form of [`MarkedStructure::from_traces`]
/// with the traces of `1/0`, `0/1`, `1/1` read off [`TwistFlow`].
pub fn earthquake<T: Scalar>(x: &MarkedStructure<T>, alpha: Slope, w: T, t: T) -> Result<MarkedStructure<T>> {
    let base = [Slope::new(1, 0)?, Slope::new(0, 1)?, Slope::new(1, 1)?];
    let tr = TwistFlow::new(x, alpha, w, &base)?.abs_traces(t);
    let larger = tr[2] + tr[2] >= tr[0] * tr[1];
    MarkedStructure::from_traces(tr[0], tr[1], larger, x.rho0())
}

type Laurent<T> = BTreeMap<i32, T>;
type LaurentMatrix<T> = [[Laurent<T>; 2]; 2];

fn lmul<T: Scalar>(x: &LaurentMatrix<T>, y: &LaurentMatrix<T>) -> LaurentMatrix<T> {
    let entry = |i: usize, j: usize| {
        let mut out = Laurent::new();
        for k in 0..2 {
            for (&e1, &c1) in &x[i][k] {
                for (&e2, &c2) in &y[k][j] {
                    let c = out.entry(e1 + e2).or_insert(T::zero());
                    *c = *c + c1 * c2;
                }
            }
        }
        out
    };
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

fn lconst<T: Scalar>(m: &MobiusMap<T>, exps: [i32; 2]) -> LaurentMatrix<T> {
    let e = m.entries();
    let cell = |i: usize, j: usize| Laurent::from([(exps[i], e[i][j])]);
    [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]]
}

/// The earthquake flow along one weighted slope, with each arc's trace kept as
/// an exact Laurent polynomial in `u = e^{wt/2}`. Lengths are evaluated by
/// log-sum-exp, so the flow stays accurate for amplitudes far beyond the
/// matrix path.
#[derive(Debug, Clone)]
pub struct TwistFlow<T> {
    alpha: Slope,
    w: T,
    rho0: T,
    slopes: Vec<Slope>,
    intersections: Vec<u64>,
    polys: Vec<Vec<(i32, T)>>,
}

impl<T: Scalar> TwistFlow<T> {
    pub fn new(x: &MarkedStructure<T>, alpha: Slope, w: T, arcs: &[Slope]) -> Result<Self> {
        if !(w > T::zero()) {
            return Err(Error::InvalidArgument(format!("earthquake weight must be positive, got {w}")));
        }
        let (a, b, inv) = adapted_pair(x, alpha);
        let r = axis_frame(&a)?;
        let ri = r.inverse();
        let ad = ri * a * r;
        let bd = ri * b * r;
        let ap = lconst(&ad, [0, 0]);
        let ai = lconst(&ad.inverse(), [0, 0]);
        let bp = lconst(&bd, [-1, 1]);
        let mul = |u: LaurentMatrix<T>, v: LaurentMatrix<T>| lmul(&u, &v);
        let mut polys = Vec::with_capacity(arcs.len());
        for s in arcs {
            let (mut tp, mut tq) = (inv[0][0] * s.p() + inv[0][1] * s.q(), inv[1][0] * s.p() + inv[1][1] * s.q());
            if tq < 0 || (tq == 0 && tp < 0) {
                (tp, tq) = (-tp, -tq);
            }
            let x = if tp >= 0 { ap.clone() } else { ai.clone() };
            let wm = christoffel(tp.abs(), tq, x, bp.clone(), mul);
            let mut tr = wm[0][0].clone();
            for (&e, &c) in &wm[1][1] {
                let v = tr.entry(e).or_insert(T::zero());
                *v = *v + c;
            }
            polys.push(tr.into_iter().filter(|&(_, c)| c != T::zero()).collect());
        }
        Ok(Self {
            alpha,
            w,
            rho0: x.rho0(),
            slopes: arcs.to_vec(),
            intersections: arcs.iter().map(|s| s.intersection(&alpha)).collect(),
            polys,
        })
    }

    /// The flow restricted to the arcs of a slope-labelled triangulation.
    pub fn on_triangulation(x: &MarkedStructure<T>, alpha: Slope, w: T, tri: &PreferredTriangulation) -> Result<Self> {
        Self::new(x, alpha, w, &arc_slopes(tri)?)
    }

    pub fn alpha(&self) -> Slope {
        self.alpha
    }

    pub fn weight(&self) -> T {
        self.w
    }

    pub fn slopes(&self) -> &[Slope] {
        &self.slopes
    }

    pub fn intersections(&self) -> &[u64] {
        &self.intersections
    }

    /// `(log |P(x)|, P'(x)/P(x))` at `x = wt`, with `P' = dP/dx`.
    fn log_and_slope(&self, i: usize, t: T) -> (T, T) {
        let x = self.w * t;
        let half = T::lit(0.5);
        let p = &self.polys[i];
        let m = p
            .iter()
            .map(|&(k, c)| T::from_int(k as i64) * x * half + c.abs().ln())
            .fold(T::neg_infinity(), T::max);
        let mut tot = T::zero();
        let mut der = T::zero();
        for &(k, c) in p {
            let k = T::from_int(k as i64);
            let e = c.signum() * (k * x * half + c.abs().ln() - m).exp();
            tot = tot + e;
            der = der + k * half * e;
        }
        (m + tot.abs().ln(), der / tot)
    }

    /// `|tr γ_{η_i}|` of the closed curves parallel to the arcs at `E^t X`.
    pub fn abs_traces(&self, t: T) -> Vec<T> {
        (0..self.polys.len()).map(|i| self.log_and_slope(i, t).0.exp()).collect()
    }

    /// `l_{η_i}(E^t X)` for every arc.
    pub fn lengths(&self, t: T) -> Vec<T> {
        let two = T::lit(2.0);
        (0..self.polys.len())
            .map(|i| two * self.rho0 + two * T::LN_2() + two * self.log_and_slope(i, t).0)
            .collect()
    }

    /// Exact `d/dt l_{η_i}(E^t X)`.
    pub fn derivatives(&self, t: T) -> Vec<T> {
        let two = T::lit(2.0);
        (0..self.polys.len()).map(|i| two * self.w * self.log_and_slope(i, t).1).collect()
    }

    /// `f_i(t) = l_{η_i}(E^t X) - |t| w i(η_i, α)`.
    pub fn defects(&self, t: T) -> Vec<T> {
        self.lengths(t)
            .into_iter()
            .zip(&self.intersections)
            .map(|(l, &n)| l - t.abs() * self.w * T::from_int(n as i64))
            .collect()
    }

    pub fn length_vector(&self, t: T, tri: &PreferredTriangulation) -> Result<TruncatedLengthVector<T>> {
        TruncatedLengthVector::new(tri, self.lengths(t), self.rho0)
    }

    /// Central difference `(l(t + h) - l(t - h)) / 2h` for every arc.
    pub fn derivative_check(&self, t: T, h: T) -> Vec<T> {
        let up = self.lengths(t + h);
        let down = self.lengths(t - h);
        up.into_iter().zip(down).map(|(a, b)| (a - b) / (T::lit(2.0) * h)).collect()
    }
}

/// `f_i(t)` for a single arc `eta`.
pub fn length_defect<T: Scalar>(x: &MarkedStructure<T>, alpha: Slope, w: T, eta: Slope, t: T) -> Result<T> {
    Ok(TwistFlow::new(x, alpha, w, &[eta])?.defects(t)[0])
}

/// Estimate of `c_i = lim f_i(t)` with the bracket `[f_i(2T), f_i(T)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate<T> {
    pub value: T,
    pub lower: T,
    pub upper: T,
    pub horizon: T,
}

/// Doubles `T` from `t0` until every bracket `[f_i(2T), f_i(T)]` is narrower
/// than `tol`; the estimate is `f_i(2T)`.
pub fn estimate_limits<T: Scalar>(flow: &TwistFlow<T>, t0: T, tol: T, t_max: T) -> Result<Vec<LimitEstimate<T>>> {
    let mut t = t0;
    let mut f = flow.defects(t);
    loop {
        let g = flow.defects(t + t);
        let width = f.iter().zip(&g).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max);
        if width < tol {
            return Ok(f
                .iter()
                .zip(&g)
                .map(|(&hi, &lo)| LimitEstimate { value: lo, lower: lo.min(hi), upper: hi.max(lo), horizon: t })
                .collect());
        }
        if t + t > t_max {
            return Err(Error::Horizon { horizon: (t + t).to_f64_lossy(), width: width.to_f64_lossy() });
        }
        t = t + t;
        f = g;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleType {
    /// No side meets the lamination.
    A,
    /// Exactly two sides meet it.
    B,
    /// All three sides meet it.
    C,
}

/// Classifies each triangle by how many of its sides meet `mu`.
pub fn triangle_types<T: Scalar>(tri: &PreferredTriangulation, mu: &WeightedMulticurve<T>) -> Result<Vec<TriangleType>> {
    let iv = mu.intersection_vector(tri)?;
    tri.triangles()
        .iter()
        .enumerate()
        .map(|(t, sides)| match sides.iter().filter(|&&a| iv[a] > T::zero()).count() {
            0 => Ok(TriangleType::A),
            2 => Ok(TriangleType::B),
            3 => Ok(TriangleType::C),
            _ => Err(Error::Internal(format!("triangle {t} has exactly one side meeting the lamination"))),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayConstants<T> {
    pub d: T,
    pub d_bar: T,
    /// Set when no functional vanishes on a triangle meeting the lamination
    /// and `d` defaulted to 1.
    pub fallback: bool,
}

/// `d = min (c_i - c_j + c_k)/(l_i - l_j + l_k)` over functionals vanishing on
/// the intersection vector of a triangle that meets the lamination, and
/// `d̄ = max (i_i - i_j + i_k)/(l_i - l_j + l_k)` over positive ones.
pub fn ray_constants<T: Scalar>(
    tri: &PreferredTriangulation,
    v0: &TruncatedLengthVector<T>,
    iv: &[T],
    c: &[T],
) -> Result<RayConstants<T>> {
    v0.validate(tri)?;
    let n = tri.arcs().len();
    if iv.len() != n || c.len() != n {
        return Err(Error::Dimension { expected: n, got: iv.len().min(c.len()) });
    }
    let scale = iv.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let tol = T::tol(1e-12) * scale;
    let mut d: Option<T> = None;
    let mut d_bar: Option<T> = None;
    for f in tri.triangle_functionals() {
        let fi = f.eval(iv);
        let fl = f.eval(&v0.lengths);
        let meets = iv[f.i] + iv[f.j] + iv[f.k] > tol;
        if fi.abs() <= tol && meets {
            let fc = f.eval(c);
            if !(fc > T::zero()) {
                return Err(Error::Internal(format!(
                    "limit functional {fc} is not positive on triangle {}",
                    f.triangle
                )));
            }
            d = Some(d.map_or(fc / fl, |x| x.min(fc / fl)));
        } else if fi > tol {
            d_bar = Some(d_bar.map_or(fi / fl, |x| x.max(fi / fl)));
        }
    }
    let d_bar = d_bar.ok_or_else(|| Error::InvalidArgument("lamination has no positive functional".into()))?;
    Ok(match d {
        Some(d) => RayConstants { d, d_bar, fallback: false },
        None => RayConstants { d: T::one(), d_bar, fallback: true },
    })
}

/// `s ↦ E^{(d/d̄) e^{2s}}_μ X` for a one-component weighted curve `μ`.
#[derive(Debug, Clone)]
pub struct EarthquakeRay<T> {
    base: MarkedStructure<T>,
    curve: WeightedMulticurve<T>,
    tri: PreferredTriangulation,
    flow: TwistFlow<T>,
    v0: TruncatedLengthVector<T>,
    limits: Vec<LimitEstimate<T>>,
    constants: RayConstants<T>,
}

impl<T: Scalar> EarthquakeRay<T> {
    /// Estimates the limits `c_i` by doubling from `t = 50` up to `1e9` with
    /// bracket width `tol`, then the constants `d, d̄`.
    pub fn new(
        base: &MarkedStructure<T>,
        curve: &WeightedMulticurve<T>,
        tri: &PreferredTriangulation,
        tol: T,
    ) -> Result<Self> {
        let &[(alpha, w)] = curve.components() else {
            return Err(Error::InvalidArgument("an earthquake ray needs exactly one weighted curve".into()));
        };
        let flow = TwistFlow::on_triangulation(base, alpha, w, tri)?;
        let v0 = base.length_vector(tri)?;
        let limits = estimate_limits(&flow, T::lit(50.0), tol, T::lit(1e9))?;
        let c: Vec<T> = limits.iter().map(|e| e.value).collect();
        let iv = curve.intersection_vector(tri)?;
        let constants = ray_constants(tri, &v0, &iv, &c)?;
        Ok(Self { base: *base, curve: curve.clone(), tri: tri.clone(), flow, v0, limits, constants })
    }

    pub fn base(&self) -> &MarkedStructure<T> {
        &self.base
    }

    pub fn curve(&self) -> &WeightedMulticurve<T> {
        &self.curve
    }

    pub fn flow(&self) -> &TwistFlow<T> {
        &self.flow
    }

    pub fn base_vector(&self) -> &TruncatedLengthVector<T> {
        &self.v0
    }

    pub fn limits(&self) -> &[LimitEstimate<T>] {
        &self.limits
    }

    pub fn constants(&self) -> RayConstants<T> {
        self.constants
    }

    pub fn amplitude(&self, s: T) -> T {
        self.constants.d / self.constants.d_bar * (T::lit(2.0) * s).exp()
    }

    pub fn gamma(&self, s: T) -> Result<TruncatedLengthVector<T>> {
        self.flow.length_vector(self.amplitude(s), &self.tri)
    }

    /// `|d(X0, γ(s)) + d(γ(s), γ(t)) - t|`, measured from the base structure.
    pub fn almost_geodesic_defect(&self, s: T, t: T) -> Result<T> {
        if !(T::zero() <= s && s <= t) {
            return Err(Error::InvalidArgument(format!("need 0 <= s <= t, got s = {s}, t = {t}")));
        }
        let gs = self.gamma(s)?;
        let gt = self.gamma(t)?;
        Ok((hilbert_distance(&self.tri, &self.v0, &gs)? + hilbert_distance(&self.tri, &gs, &gt)? - t).abs())
    }
}
