//! Decorated hyperbolic structures on the once-punctured torus.
//!
//! A point of `T_{1,1}` is a holonomy pair `(A, B)` whose commutator is
//! parabolic, plus the truncation height `rho0`. The truncated length of the
//! arc of slope `σ` is `2 rho0 + 2 log(2 |tr γ_σ|)`, where `γ_σ` is the closed
//! curve of the same slope.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic_core::{
    apply_mobius, cross_ratio, truncated_length, DecoratedCusp, IdealPoint, MobiusMap,
};
use crate::mcg;
use crate::scalar::{log_sum_exp, Scalar};
use crate::triangulation::PreferredTriangulation;

/// Coprime integer pair, canonicalized with `q >= 0`, and `p > 0` when `q = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    p: i64,
    q: i64,
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if gcd(p, q) != 1 {
            return Err(Error::InvalidSlope(format!("{p}/{q} is not a primitive pair")));
        }
        Ok(if q < 0 || (q == 0 && p < 0) { Self { p: -p, q: -q } } else { Self { p, q } })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `p1 q2 - p2 q1`.
    pub fn det(&self, other: &Slope) -> i64 {
        self.p * other.q - self.q * other.p
    }

    /// Geometric intersection number of the two simple closed curves.
    pub fn intersection(&self, other: &Slope) -> u64 {
        self.det(other).unsigned_abs()
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSlope(format!("cannot parse {s:?} as p/q"));
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        Slope::new(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?)
    }
}

impl Serialize for Slope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Slopes carried by the arc names of a triangulation of `S_{1,1}`.
pub fn arc_slopes(tri: &PreferredTriangulation) -> Result<Vec<Slope>> {
    if tri.genus() != 1 || tri.punctures() != 1 {
        return Err(Error::InvalidTriangulation("slope labels need S_{1,1}".into()));
    }
    tri.arcs().iter().map(|a| a.parse()).collect()
}

/// The triangulation of `S_{1,1}` by three arcs of pairwise intersection one.
pub fn torus_triangulation(s: [Slope; 3]) -> Result<PreferredTriangulation> {
    let [a, b, c] = s;
    if a.intersection(&b) != 1 || b.intersection(&c) != 1 || a.intersection(&c) != 1 {
        return Err(Error::InvalidTriangulation(format!("{a}, {b}, {c} do not form a Farey triangle")));
    }
    // Choose signs so the three side vectors close up, then order them counterclockwise.
    let v = |s: Slope, e: i64| (e * s.p, e * s.q);
    let mut order = None;
    for e2 in [1, -1] {
        for e3 in [1, -1] {
            let (x1, x2, x3) = (v(a, 1), v(b, e2), v(c, e3));
            if x1.0 + x2.0 + x3.0 == 0 && x1.1 + x2.1 + x3.1 == 0 {
                let ccw = x1.0 * x2.1 - x1.1 * x2.0 > 0;
                order = Some(if ccw { [0, 1, 2] } else { [1, 0, 2] });
            }
        }
    }
    let order = order.ok_or_else(|| Error::InvalidTriangulation("slopes do not close up".into()))?;
    PreferredTriangulation::new(1, 1, s.iter().map(|x| x.to_string()).collect(), vec![order, order], vec![])
}

/// Arcs of slope `1/0`, `0/1`, `1/1`.
pub fn base_triangulation() -> PreferredTriangulation {
    torus_triangulation([Slope { p: 1, q: 0 }, Slope { p: 0, q: 1 }, Slope { p: 1, q: 1 }])
        .expect("base Farey triangle")
}

/// Flips `arc` of a slope-labelled torus triangulation, labelling the new arc by its slope.
pub fn flip_torus(tri: &PreferredTriangulation, arc: usize) -> Result<PreferredTriangulation> {
    let slopes = arc_slopes(tri)?;
    let others: Vec<Slope> = (0..3).filter(|&i| i != arc).map(|i| slopes[i]).collect();
    let (a, b) = (others[0], others[1]);
    let sum = Slope::new(a.p + b.p, a.q + b.q)?;
    let diff = Slope::new(a.p - b.p, a.q - b.q)?;
    let new = if sum == slopes[arc] { diff } else { sum };
    tri.flip_named(arc, &new.to_string())
}

/// Truncated lengths indexed like the arcs of a triangulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedLengthVector<T> {
    pub lengths: Vec<T>,
    pub rho0: T,
}

impl<T: Scalar> TruncatedLengthVector<T> {
    /// Checks that every triangle functional is at least `2 rho0`.
    pub fn new(tri: &PreferredTriangulation, lengths: Vec<T>, rho0: T) -> Result<Self> {
        let v = Self { lengths, rho0 };
        v.validate(tri)?;
        Ok(v)
    }

    pub fn validate(&self, tri: &PreferredTriangulation) -> Result<()> {
        if self.lengths.len() != tri.arcs().len() {
            return Err(Error::Dimension { expected: tri.arcs().len(), got: self.lengths.len() });
        }
        let two = T::lit(2.0);
        for f in tri.triangle_functionals() {
            let val = f.eval(&self.lengths);
            let floor = two * self.rho0;
            if val < floor - T::tol(1e-9) * floor.max(val.abs()) {
                return Err(Error::Functional { triangle: f.triangle, value: val.to_f64_lossy() });
            }
        }
        Ok(())
    }

    pub fn sup(&self) -> T {
        self.lengths.iter().copied().fold(T::neg_infinity(), T::max)
    }
}

/// Corner lengths `((l_i - l_j + l_k)/2, (l_j - l_k + l_i)/2, (l_k - l_i + l_j)/2)`
/// of triangle `t`, each checked against `rho0`.
pub fn corner_lengths<T: Scalar>(
    v: &TruncatedLengthVector<T>,
    tri: &PreferredTriangulation,
    t: usize,
) -> Result<[T; 3]> {
    let [i, j, k] = *tri
        .triangles()
        .get(t)
        .ok_or_else(|| Error::InvalidTriangulation(format!("no triangle {t}")))?;
    let l = &v.lengths;
    let half = T::lit(0.5);
    let c = [(l[i] - l[j] + l[k]) * half, (l[j] - l[k] + l[i]) * half, (l[k] - l[i] + l[j]) * half];
    for &x in &c {
        if x < v.rho0 - T::tol(1e-9) * v.rho0.max(x.abs()) {
            return Err(Error::Corner { triangle: t, value: x.to_f64_lossy(), rho0: v.rho0.to_f64_lossy() });
        }
    }
    Ok(c)
}

/// `Σ` over all triangle corners of `exp(-corner length)`.
pub fn horocycle_budget<T: Scalar>(v: &TruncatedLengthVector<T>, tri: &PreferredTriangulation) -> Result<T> {
    let mut s = T::zero();
    for t in 0..tri.triangles().len() {
        for c in corner_lengths(v, tri, t)? {
            s = s + (-c).exp();
        }
    }
    Ok(s)
}

/// Flipped diagonal from `λ_α λ_β = λ_1 λ_3 + λ_2 λ_4`, in length coordinates.
pub fn ptolemy_flip_length<T: Scalar>(l_alpha: T, sides: [T; 4]) -> T {
    let half = T::lit(0.5);
    let [l1, l2, l3, l4] = sides;
    T::lit(2.0) * log_sum_exp(&[(l1 + l3) * half, (l2 + l4) * half]) - l_alpha
}

/// A marked point of `T_{1,1}` with its truncation height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStructure<T>", into = "RawStructure<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct MarkedStructure<T> {
    a: MobiusMap<T>,
    b: MobiusMap<T>,
    rho0: T,
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct RawStructure<T> {
    A: [[T; 2]; 2],
    B: [[T; 2]; 2],
    rho0: T,
}

impl<T: Scalar> TryFrom<RawStructure<T>> for MarkedStructure<T> {
    type Error = Error;

    fn try_from(r: RawStructure<T>) -> Result<Self> {
        let m = |e: [[T; 2]; 2]| MobiusMap::new(e[0][0], e[0][1], e[1][0], e[1][1]);
        MarkedStructure::new(m(r.A)?, m(r.B)?, r.rho0)
    }
}

impl<T: Scalar> From<MarkedStructure<T>> for RawStructure<T> {
    fn from(s: MarkedStructure<T>) -> Self {
        RawStructure { A: s.a.entries(), B: s.b.entries(), rho0: s.rho0 }
    }
}

fn commutator<T: Scalar>(a: &MobiusMap<T>, b: &MobiusMap<T>) -> MobiusMap<T> {
    *a * *b * a.inverse() * b.inverse()
}

impl<T: Scalar> MarkedStructure<T> {
    pub fn new(a: MobiusMap<T>, b: MobiusMap<T>, rho0: T) -> Result<Self> {
        if !(rho0 > T::zero()) {
            return Err(Error::InvalidStructure(format!("rho0 must be positive, got {rho0}")));
        }
        let s = Self { a, b, rho0 };
        let k = commutator(&a, &b).trace();
        let scale = (a.scale() * b.scale()).powi(2).max(T::one());
        if (k + T::lit(2.0)).abs() > T::tol(1e-9) * scale {
            return Err(Error::InvalidStructure(format!("commutator trace {k} is not -2")));
        }
        let (x, y, z) = s.trace_triple();
        for (name, t) in [("A", x), ("B", y), ("AB", z)] {
            if !(t.abs() > T::lit(2.0)) {
                return Err(Error::InvalidStructure(format!("{name} is not hyperbolic (trace {t})")));
            }
        }
        let tri = base_triangulation();
        let v = s.base_lengths();
        for t in 0..2 {
            corner_lengths(&v, &tri, t)?;
        }
        Ok(s)
    }

    /// `A = [[1,1],[1,2]]`, `B = [[1,-1],[-1,2]]`: all three traces equal 3.
    pub fn modular_torus(rho0: T) -> Result<Self> {
        let one = T::one();
        let two = T::lit(2.0);
        Self::new(
            MobiusMap::from_entries(one, one, one, two),
            MobiusMap::from_entries(one, -one, -one, two),
            rho0,
        )
    }

    /// Structure with prescribed traces `x = tr A`, `y = tr B` and `z = tr AB`
    /// a root of `z² - xyz + x² + y² = 0`.
    pub fn from_traces(x: T, y: T, larger_root: bool, rho0: T) -> Result<Self> {
        let four = T::lit(4.0);
        let disc = (x * y).powi(2) - four * (x * x + y * y);
        if disc < T::zero() {
            return Err(Error::InvalidStructure(format!("no real structure with traces {x}, {y}")));
        }
        let r = disc.sqrt();
        let two = T::lit(2.0);
        let z = if larger_root { (x * y + r) / two } else { (x * x + y * y) * two / (x * y + r) };
        if !(z > two) {
            return Err(Error::InvalidStructure(format!("AB is not hyperbolic (trace {z})")));
        }
        let t = (z + (z * z - four).sqrt()) / two;
        let a = MobiusMap::from_entries(x, -T::one(), T::one(), T::zero());
        let b = MobiusMap::from_entries(T::zero(), t, -t.recip(), y);
        Self::new(a, b, rho0)
    }

    /// Random structure in the normal form of [`from_traces`](Self::from_traces),
    /// with `tr A, tr B` uniform in `[2.05, trace_max)` and a random root.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, rho0: T, trace_max: f64) -> Self {
        loop {
            let x = rng.gen_range(2.05..trace_max);
            let y = rng.gen_range(2.05..trace_max);
            if let Ok(s) = Self::from_traces(T::lit(x), T::lit(y), rng.gen_bool(0.5), rho0) {
                return s;
            }
        }
    }

    pub fn a(&self) -> MobiusMap<T> {
        self.a
    }

    pub fn b(&self) -> MobiusMap<T> {
        self.b
    }

    pub fn rho0(&self) -> T {
        self.rho0
    }

    /// Horocycle budget `e^{-rho0}`.
    pub fn h0(&self) -> T {
        (-self.rho0).exp()
    }

    pub fn with_holonomy(&self, a: MobiusMap<T>, b: MobiusMap<T>) -> Result<Self> {
        Self::new(a, b, self.rho0)
    }

    pub fn conjugate(&self, g: &MobiusMap<T>) -> Result<Self> {
        let gi = g.inverse();
        self.with_holonomy(*g * self.a * gi, *g * self.b * gi)
    }

    /// `(tr A, tr B, tr AB)`.
    pub fn trace_triple(&self) -> (T, T, T) {
        (self.a.trace(), self.b.trace(), (self.a * self.b).trace())
    }

    pub fn commutator_trace(&self) -> T {
        commutator(&self.a, &self.b).trace()
    }

    /// Holonomy of the closed curve of slope `s`: a positive word in `A^{±1}`
    /// and `B` read off the Stern–Brocot path.
    pub fn holonomy_of(&self, s: Slope) -> MobiusMap<T> {
        let x = if s.p >= 0 { self.a } else { self.a.inverse() };
        christoffel(s.p.abs(), s.q, x, self.b, |u, v| u * v)
    }

    /// Closed-curve length `2 arccosh(|tr|/2)`.
    pub fn curve_length(&self, s: Slope) -> T {
        let t = self.holonomy_of(s).trace().abs();
        T::lit(2.0) * (t / T::lit(2.0)).max(T::one()).acosh()
    }

    /// Arc length through the holonomy trace of the parallel closed curve.
    pub fn arc_length_by_trace(&self, s: Slope) -> T {
        let t = self.holonomy_of(s).trace().abs();
        T::lit(2.0) * self.rho0 + T::lit(2.0) * (T::lit(2.0) * t).ln()
    }

    /// Lengths of the arcs `1/0, 0/1, 1/1` from the trace triple: λ-lengths
    /// solve `bc = S/x`, `ac = S/y`, `ab = S/z` with `S = a² + b² + c²`, scaled
    /// so that the six corner horocycles have total length `e^{-rho0}`.
    pub fn base_lengths(&self) -> TruncatedLengthVector<T> {
        let (x, y, z) = self.trace_triple();
        let (x, y, z) = (x.abs(), y.abs(), z.abs());
        // The system fixes a : b : c = x : y : z; the budget 2S/(abc) = h0 fixes the scale.
        let k = T::lit(2.0) * (x * x + y * y + z * z) / (self.h0() * x * y * z);
        let two = T::lit(2.0);
        TruncatedLengthVector {
            lengths: vec![two * (k * x).ln(), two * (k * y).ln(), two * (k * z).ln()],
            rho0: self.rho0,
        }
    }

    /// Arc length by Stern–Brocot descent from the base arcs with Ptolemy.
    pub fn arc_length(&self, s: Slope) -> T {
        let base = self.base_lengths().lengths;
        arc_length_from_base(&base, s)
    }

    /// Half-plane oracle: conjugate the cusp to `∞`, decorate it by the horoball
    /// whose horocycle has length `e^{-rho0}`, and measure the arc lift from
    /// `∞` to `W(∞)`, where `W = θ(A)` for a marking change `θ` taking `1/0` to `s`.
    pub fn arc_length_by_lift(&self, s: Slope) -> Result<T> {
        let (n, tau) = self.cusp_frame();
        let height = tau.abs() / self.h0();
        let theta = mcg::word_for(&mcg::basis_matrix(s));
        let (w, _) = mcg::substitute(&theta, self.a, self.b);
        let w = n * w * n.inverse();
        let top = DecoratedCusp::at_infinity(height)?;
        let image = apply_mobius(&w, &top);
        truncated_length(&top, &image)
    }

    /// A map `N` with `N K N^{-1}` fixing `∞`, and the translation length `τ`
    /// of that parabolic.
    pub fn cusp_frame(&self) -> (MobiusMap<T>, T) {
        let k = commutator(&self.a, &self.b);
        let n = if k.c.is_zero() {
            MobiusMap::identity()
        } else {
            let xi = (k.a - k.d) / (T::lit(2.0) * k.c);
            MobiusMap::from_entries(T::zero(), -T::one(), T::one(), -xi)
        };
        let kp = n * k * n.inverse();
        (n, kp.b / kp.a)
    }

    /// Length vector on a slope-labelled triangulation of `S_{1,1}`.
    pub fn length_vector(&self, tri: &PreferredTriangulation) -> Result<TruncatedLengthVector<T>> {
        let (x, y, z) = self.trace_triple();
        let markov = x * x + y * y + z * z - x * y * z;
        if markov.abs() > T::tol(1e-6) * (x * y * z).abs().max(T::one()) {
            return Err(Error::InvalidStructure(format!("trace triple violates Markov identity by {markov}")));
        }
        let base = self.base_lengths().lengths;
        let lengths = arc_slopes(tri)?.into_iter().map(|s| arc_length_from_base(&base, s)).collect();
        TruncatedLengthVector::new(tri, lengths, self.rho0)
    }

    /// Length vector from an arbitrary slope-indexed length function.
    pub fn lengths_of(&self, slopes: &[Slope]) -> Vec<T> {
        let base = self.base_lengths().lengths;
        slopes.iter().map(|&s| arc_length_from_base(&base, s)).collect()
    }
}

/// Christoffel word of slope `p/q` (`p, q >= 0`) in letters `x` (for `1/0`)
/// and `y` (for `0/1`), combined with `mul`.
pub fn christoffel<M: Clone>(p: i64, q: i64, x: M, y: M, mul: impl Fn(M, M) -> M) -> M {
    if q == 0 {
        return x;
    }
    if p == 0 {
        return y;
    }
    let (mut l, mut lw) = ((1i64, 0i64), x);
    let (mut r, mut rw) = ((0i64, 1i64), y);
    loop {
        let m = (l.0 + r.0, l.1 + r.1);
        let w = mul(lw.clone(), rw.clone());
        if m == (p, q) {
            return w;
        }
        if m.0 * q - m.1 * p < 0 {
            (r, rw) = (m, w);
        } else {
            (l, lw) = (m, w);
        }
    }
}

/// Length of the arc of slope `s` from the lengths of `1/0, 0/1, 1/1`.
pub fn arc_length_from_base<T: Scalar>(base: &[T], s: Slope) -> T {
    let (la, lb, lc) = (base[0], base[1], base[2]);
    let two = T::lit(2.0);
    match (s.p, s.q) {
        (1, 0) => return la,
        (0, 1) => return lb,
        (1, 1) => return lc,
        (-1, 1) => return two * log_sum_exp(&[la, lb]) - lc,
        _ => {}
    }
    // Farey triangle (L, R, L + R) with known lengths, descending toward s.
    let (mut l, mut r, mut ll, mut lr, mut lm) = if s.p > 0 {
        ((1i64, 0i64), (0i64, 1i64), la, lb, lc)
    } else {
        ((0, 1), (-1, 0), lb, la, two * log_sum_exp(&[la, lb]) - lc)
    };
    loop {
        let m = (l.0 + r.0, l.1 + r.1);
        if m == (s.p, s.q) {
            return lm;
        }
        if m.0 * s.q - m.1 * s.p < 0 {
            let next = two * log_sum_exp(&[ll, lm]) - lr;
            (r, lr, lm) = (m, lm, next);
        } else {
            let next = two * log_sum_exp(&[lm, lr]) - ll;
            (l, ll, lm) = (m, lm, next);
        }
    }
}

/// Ideal quadrilateral `O1 O2 O3 O4` in positive cyclic order with horoballs.
/// Side `η_i` joins `O_{i-1}` and `O_i`; the diagonal `α` joins `O2, O4` and
/// `β` joins `O1, O3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoratedQuad<T> {
    pub cusps: [DecoratedCusp<T>; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagonal {
    /// `O2 O4`.
    Alpha,
    /// `O1 O3`.
    Beta,
}

fn positively_ordered<T: Scalar>(a: IdealPoint<T>, b: IdealPoint<T>, c: IdealPoint<T>) -> bool {
    use IdealPoint::*;
    match (a, b, c) {
        (Finite(a), Finite(b), Finite(c)) => (b - a) * (c - b) * (a - c) < T::zero(),
        (Finite(a), Finite(b), Infinity) => a < b,
        (Finite(a), Infinity, Finite(c)) => c < a,
        (Infinity, Finite(b), Finite(c)) => b < c,
        _ => false,
    }
}

/// Corner and side quantities of a quadrilateral before and after the flip `α → β`.
///
/// `l1[i]`, `l2[i]` are the distances from the midpoint of `η_{i+1}` to the
/// horocycles at `O_i` and `O_{i+1}` with respect to the triangles cut by `α`;
/// `n1`, `n2` are the same with respect to `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipData<T> {
    pub shr_alpha: T,
    pub shr_beta: T,
    pub l1: [T; 4],
    pub l2: [T; 4],
    pub n1: [T; 4],
    pub n2: [T; 4],
}

impl<T: Scalar> FlipData<T> {
    /// The four families of flip inequalities; each entry should be at most `log 2`.
    ///
    /// Order: `|l'_{i1} - l_{i1} + shr|` and `|l'_{i2} - l_{i2} - shr|` over
    /// `i = 1, 3`, then `|l'_{i1} - l_{i1}|` and `|l'_{i2} - l_{i2}|` over `i = 2, 4`.
    pub fn residuals(&self) -> [T; 4] {
        let s = self.shr_alpha;
        let m = |a: T, b: T| a.max(b);
        [
            m((self.n1[0] - self.l1[0] + s).abs(), (self.n1[2] - self.l1[2] + s).abs()),
            m((self.n2[0] - self.l2[0] - s).abs(), (self.n2[2] - self.l2[2] - s).abs()),
            m((self.n1[1] - self.l1[1]).abs(), (self.n1[3] - self.l1[3]).abs()),
            m((self.n2[1] - self.l2[1]).abs(), (self.n2[3] - self.l2[3]).abs()),
        ]
    }

    /// `l_{11} >= l_{42}`, the standing assumption of the flip inequalities;
    /// equivalent to `shr(α) >= 0`.
    pub fn hypothesis_holds(&self) -> bool {
        self.l1[0] >= self.l2[3]
    }

    /// `l'_{42} - log(e^{l_{42}} R / (1 + R))` with `R = e^{shr(α)}`.
    pub fn l42_residual(&self) -> T {
        let r = self.shr_alpha.exp();
        self.n2[3] - (self.l2[3] + r.ln() - (T::one() + r).ln())
    }
}

impl<T: Scalar> DecoratedQuad<T> {
    pub fn new(cusps: [DecoratedCusp<T>; 4]) -> Result<Self> {
        let b: Vec<IdealPoint<T>> = cusps.iter().map(|c| c.base).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                if b[i] == b[j] {
                    return Err(Error::EqualBasePoints);
                }
            }
        }
        if !(positively_ordered(b[0], b[1], b[2]) && positively_ordered(b[0], b[2], b[3])) {
            return Err(Error::InvalidStructure("quadrilateral vertices must be in positive cyclic order".into()));
        }
        Ok(Self { cusps })
    }

    /// Normalized quadrilateral `0, 1, 1 + R, ∞` with the given horoball sizes.
    pub fn normalized(r: T, sizes: [T; 4]) -> Result<Self> {
        Self::new([
            DecoratedCusp::finite(T::zero(), sizes[0])?,
            DecoratedCusp::finite(T::one(), sizes[1])?,
            DecoratedCusp::finite(T::one() + r, sizes[2])?,
            DecoratedCusp::at_infinity(sizes[3])?,
        ])
    }

    /// Relabels `O_i → O_{i+1}`, which exchanges the roles of `α` and `β`.
    pub fn rotated(&self) -> Self {
        let c = self.cusps;
        Self { cusps: [c[1], c[2], c[3], c[0]] }
    }

    /// The labelling among `self` and [`rotated`](Self::rotated) whose
    /// shearing along `α` is nonnegative.
    pub fn oriented_for_flip(&self) -> Result<Self> {
        Ok(if shearing(self, Diagonal::Alpha)? >= T::zero() { *self } else { self.rotated() })
    }

    pub fn image(&self, m: &MobiusMap<T>) -> Result<Self> {
        Self::new(self.cusps.map(|c| apply_mobius(m, &c)))
    }

    /// Random quadrilateral: four increasing real points, or three plus `∞`,
    /// with horoball sizes spread over several orders of magnitude.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut xs: Vec<f64> = (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            let with_inf = rng.gen_bool(0.3);
            let mk = |i: usize, rng: &mut R| -> Option<DecoratedCusp<T>> {
                let size = T::lit(10f64.powf(rng.gen_range(-3.0..0.0)));
                if with_inf && i == 3 {
                    DecoratedCusp::at_infinity(T::lit(10f64.powf(rng.gen_range(0.5..3.0)))).ok()
                } else {
                    DecoratedCusp::finite(T::lit(xs[i]), size).ok()
                }
            };
            let cs: Option<Vec<DecoratedCusp<T>>> = (0..4).map(|i| mk(i, rng)).collect();
            if let Some(cs) = cs {
                if let Ok(q) = Self::new([cs[0], cs[1], cs[2], cs[3]]) {
                    return q;
                }
            }
        }
    }

    fn delta(&self, i: usize, j: usize) -> Result<T> {
        truncated_length(&self.cusps[i], &self.cusps[j])
    }

    /// Distance from the midpoint of side `PQ` (foot of the perpendicular from
    /// the opposite vertex `O`) to the horocycle at `P`.
    fn corner(&self, p: usize, q: usize, o: usize) -> Result<T> {
        Ok((self.delta(p, q)? + self.delta(p, o)? - self.delta(q, o)?) * T::lit(0.5))
    }

    pub fn flip_data(&self) -> Result<FlipData<T>> {
        // Sides η_1..η_4 as (O_{i-1}, O_i) in zero-based vertex indices.
        let sides = [(3, 0), (0, 1), (1, 2), (2, 3)];
        let old_opp = [1, 3, 3, 1];
        let new_opp = [2, 2, 0, 0];
        let mut d = FlipData {
            shr_alpha: shearing(self, Diagonal::Alpha)?,
            shr_beta: shearing(self, Diagonal::Beta)?,
            l1: [T::zero(); 4],
            l2: [T::zero(); 4],
            n1: [T::zero(); 4],
            n2: [T::zero(); 4],
        };
        for (i, &(p, q)) in sides.iter().enumerate() {
            d.l1[i] = self.corner(p, q, old_opp[i])?;
            d.l2[i] = self.corner(q, p, old_opp[i])?;
            d.n1[i] = self.corner(p, q, new_opp[i])?;
            d.n2[i] = self.corner(q, p, new_opp[i])?;
        }
        Ok(d)
    }

    /// Truncated lengths `(l_1, l_2, l_3, l_4, l_α, l_β)` of sides and diagonals.
    pub fn lengths(&self) -> Result<[T; 6]> {
        Ok([
            self.delta(3, 0)?,
            self.delta(0, 1)?,
            self.delta(1, 2)?,
            self.delta(2, 3)?,
            self.delta(1, 3)?,
            self.delta(0, 2)?,
        ])
    }
}

/// Signed shearing along a diagonal: `log R` after normalizing the endpoints
/// of the diagonal and the next vertex of `Δ_1` to `1, ∞, 0`, the fourth
/// vertex landing at `1 + R`.
pub fn shearing<T: Scalar>(quad: &DecoratedQuad<T>, diagonal: Diagonal) -> Result<T> {
    let o = quad.cusps.map(|c| c.base);
    let (z, z1, z2, z3) = match diagonal {
        Diagonal::Alpha => (o[2], o[0], o[1], o[3]),
        Diagonal::Beta => (o[3], o[1], o[2], o[0]),
    };
    match cross_ratio(z, z1, z2, z3)? {
        IdealPoint::Finite(g) if g > T::one() => Ok((g - T::one()).ln()),
        other => Err(Error::Internal(format!("normalized fourth vertex at {other:?}"))),
    }
}
