//! Preferred ideal triangulations: arcs, oriented ideal triangles and
//! once-punctured disc pieces, diagonal flips, and the hyperplanes
//! `a_i - a_j + a_k = 0` they generate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cone_hilbert::ConeFunctionalSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Serialized form: `{g, n, arcs, triangles, discs}` with arc indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawTriangulation {
    g: usize,
    n: usize,
    arcs: Vec<String>,
    triangles: Vec<[usize; 3]>,
    #[serde(default)]
    discs: Vec<Vec<usize>>,
}

/// Triangles list their sides in counterclockwise order; side `m` runs from
/// corner `m` to corner `m + 1`. Each disc piece is a monogon bounded by one arc.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTriangulation", into = "RawTriangulation")]
pub struct PreferredTriangulation {
    genus: usize,
    punctures: usize,
    arcs: Vec<String>,
    triangles: Vec<[usize; 3]>,
    discs: Vec<Vec<usize>>,
}

impl TryFrom<RawTriangulation> for PreferredTriangulation {
    type Error = Error;

    fn try_from(r: RawTriangulation) -> Result<Self> {
        Self::new(r.g, r.n, r.arcs, r.triangles, r.discs)
    }
}

impl From<PreferredTriangulation> for RawTriangulation {
    fn from(t: PreferredTriangulation) -> Self {
        RawTriangulation { g: t.genus, n: t.punctures, arcs: t.arcs, triangles: t.triangles, discs: t.discs }
    }
}

/// One cyclic triangle functional `a_i - a_j + a_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleFunctional {
    pub triangle: usize,
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl TriangleFunctional {
    pub fn eval<T: Scalar>(&self, a: &[T]) -> T {
        a[self.i] - a[self.j] + a[self.k]
    }

    fn coefficients(&self, n: usize) -> Vec<i64> {
        let mut c = vec![0i64; n];
        c[self.i] += 1;
        c[self.j] -= 1;
        c[self.k] += 1;
        c
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

impl PreferredTriangulation {
    pub fn new(
        genus: usize,
        punctures: usize,
        arcs: Vec<String>,
        triangles: Vec<[usize; 3]>,
        discs: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let bad = |m: String| Error::InvalidTriangulation(m);
        if punctures == 0 {
            return Err(bad("at least one puncture is required".into()));
        }
        let (g, n) = (genus as i64, punctures as i64);
        let want_arcs = 6 * g - 5 + 2 * n;
        let want_tri = 4 * g - 3 + n;
        if want_arcs <= 0 || want_tri <= 0 {
            return Err(bad(format!("S_{{{genus},{punctures}}} has no preferred triangulation")));
        }
        if arcs.len() as i64 != want_arcs {
            return Err(bad(format!("expected {want_arcs} arcs, got {}", arcs.len())));
        }
        if triangles.len() as i64 != want_tri {
            return Err(bad(format!("expected {want_tri} triangles, got {}", triangles.len())));
        }
        if discs.len() != punctures - 1 {
            return Err(bad(format!("expected {} disc pieces, got {}", punctures - 1, discs.len())));
        }
        let mut names = arcs.clone();
        names.sort();
        names.dedup();
        if names.len() != arcs.len() {
            return Err(bad("arc names must be distinct".into()));
        }
        let m = arcs.len();
        let mut count = vec![0usize; m];
        for (t, tri) in triangles.iter().enumerate() {
            for &a in tri {
                if a >= m {
                    return Err(bad(format!("triangle {t} references arc {a}")));
                }
                count[a] += 1;
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(bad(format!("triangle {t} is self-folded")));
            }
        }
        for (d, disc) in discs.iter().enumerate() {
            if disc.len() != 1 {
                return Err(bad(format!("disc piece {d} must be bounded by exactly one arc")));
            }
            if disc[0] >= m {
                return Err(bad(format!("disc piece {d} references arc {}", disc[0])));
            }
            count[disc[0]] += 1;
        }
        if let Some(a) = count.iter().position(|&c| c != 2) {
            return Err(bad(format!("arc {} occurs {} times", arcs[a], count[a])));
        }
        let tri = Self { genus, punctures, arcs, triangles, discs };
        let v = tri.vertex_count();
        if v != 1 {
            return Err(bad(format!("gluing has {v} vertices; all arcs must end at one puncture")));
        }
        Ok(tri)
    }

    /// Number of vertex classes after gluing paired sides with opposite orientation.
    fn vertex_count(&self) -> usize {
        let nt = self.triangles.len();
        let corners = 3 * nt + self.discs.len();
        let mut occ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.arcs.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for (m, &a) in tri.iter().enumerate() {
                occ[a].push((3 * t + m, 3 * t + (m + 1) % 3));
            }
        }
        for (d, disc) in self.discs.iter().enumerate() {
            let c = 3 * nt + d;
            occ[disc[0]].push((c, c));
        }
        let mut uf = UnionFind((0..corners).collect());
        for o in &occ {
            let ((s1, e1), (s2, e2)) = (o[0], o[1]);
            uf.union(s1, e2);
            uf.union(e1, s2);
        }
        let mut roots: Vec<usize> = (0..corners).map(|c| uf.find(c)).collect();
        roots.sort();
        roots.dedup();
        roots.len()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn punctures(&self) -> usize {
        self.punctures
    }

    pub fn arcs(&self) -> &[String] {
        &self.arcs
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn discs(&self) -> &[Vec<usize>] {
        &self.discs
    }

    pub fn arc_index(&self, name: &str) -> Option<usize> {
        self.arcs.iter().position(|a| a == name)
    }

    /// Cyclic functionals of every triangle, deduplicated by coefficient vector.
    pub fn triangle_functionals(&self) -> Vec<TriangleFunctional> {
        let n = self.arcs.len();
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for (t, &[a, b, c]) in self.triangles.iter().enumerate() {
            for (i, j, k) in [(a, b, c), (b, c, a), (c, a, b)] {
                let f = TriangleFunctional { triangle: t, i, j, k };
                let coef = f.coefficients(n);
                if !seen.contains(&coef) {
                    seen.push(coef);
                    out.push(f);
                }
            }
        }
        out
    }

    /// The cone bounded by the hyperplanes `a_i - a_j + a_k = 0`.
    pub fn hyperplane_functionals<T: Scalar>(&self) -> ConeFunctionalSet<T> {
        let n = self.arcs.len();
        let fs = self
            .triangle_functionals()
            .iter()
            .map(|f| f.coefficients(n).into_iter().map(T::from_int).collect())
            .collect();
        ConeFunctionalSet::new(n, fs, &vec![T::one(); n]).expect("all-ones vector is interior")
    }

    /// `{a >= 0 : a_i <= a_j + a_k}`: nonnegativity followed by the triangle functionals.
    pub fn cone_of_laminations<T: Scalar>(&self) -> ConeFunctionalSet<T> {
        let n = self.arcs.len();
        let mut fs: Vec<Vec<T>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        fs.extend(self.hyperplane_functionals::<T>().functionals().iter().cloned());
        ConeFunctionalSet::new(n, fs, &vec![T::one(); n]).expect("all-ones vector is interior")
    }

    /// Some triangle equality `a_i = a_j + a_k` holds within `1e-12` (relative to `max|a|`).
    pub fn on_boundary<T: Scalar>(&self, a: &[T]) -> Result<bool> {
        if a.len() != self.arcs.len() {
            return Err(Error::Dimension { expected: self.arcs.len(), got: a.len() });
        }
        let scale = a.iter().fold(T::one(), |m, v| m.max(v.abs()));
        let tol = T::tol(1e-12) * scale;
        Ok(self.triangle_functionals().iter().any(|f| f.eval(a).abs() <= tol))
    }

    /// The two triangles containing `arc`, if it borders no disc piece.
    pub fn adjacent_triangles(&self, arc: usize) -> Result<(usize, usize)> {
        let name = self.arcs.get(arc).cloned().unwrap_or_else(|| format!("#{arc}"));
        let err = |reason: &str| Error::Flip { arc: name.clone(), reason: reason.into() };
        if arc >= self.arcs.len() {
            return Err(err("no such arc"));
        }
        if self.discs.iter().any(|d| d.contains(&arc)) {
            return Err(err("arc bounds a punctured disc piece"));
        }
        let ts: Vec<usize> = (0..self.triangles.len())
            .filter(|&t| self.triangles[t].contains(&arc))
            .collect();
        match ts.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(err("arc is not shared by two distinct triangles")),
        }
    }

    /// Replaces the diagonal `arc` of its quadrilateral by the other diagonal,
    /// named by appending `'`.
    pub fn flip(&self, arc: usize) -> Result<Self> {
        let (t1, t2) = self.adjacent_triangles(arc)?;
        let rot = |t: [usize; 3]| -> [usize; 3] {
            let p = t.iter().position(|&a| a == arc).expect("arc in triangle");
            [t[p], t[(p + 1) % 3], t[(p + 2) % 3]]
        };
        let [_, x, y] = rot(self.triangles[t1]);
        let [_, z, w] = rot(self.triangles[t2]);
        let mut arcs = self.arcs.clone();
        arcs[arc] = format!("{}'", self.arcs[arc]);
        let mut triangles = self.triangles.clone();
        triangles[t1] = [arc, w, x];
        triangles[t2] = [arc, y, z];
        Self::new(self.genus, self.punctures, arcs, triangles, self.discs.clone())
    }

    /// Same as [`flip`](Self::flip) with an explicit name for the new arc.
    pub fn flip_named(&self, arc: usize, name: &str) -> Result<Self> {
        let mut t = self.flip(arc)?;
        t.arcs[arc] = name.to_string();
        Self::new(t.genus, t.punctures, t.arcs, t.triangles, t.discs)
    }

    /// Triangles as name triples, each rotated to its least rotation, sorted.
    pub fn canonical_triangles(&self) -> Vec<[String; 3]> {
        let mut out: Vec<[String; 3]> = self
            .triangles
            .iter()
            .map(|t| {
                let n = |i: usize| self.arcs[t[i]].clone();
                let rots = [[n(0), n(1), n(2)], [n(1), n(2), n(0)], [n(2), n(0), n(1)]];
                rots.into_iter().min().expect("three rotations")
            })
            .collect();
        out.sort();
        out
    }

    /// Equal combinatorics after renaming arcs of `other` through `rename`.
    pub fn same_combinatorics(&self, other: &Self, rename: impl Fn(&str) -> String) -> bool {
        if self.genus != other.genus || self.punctures != other.punctures {
            return false;
        }
        let arcs: Vec<String> = other.arcs.iter().map(|a| rename(a)).collect();
        let Ok(renamed) = Self::new(other.genus, other.punctures, arcs, other.triangles.clone(), other.discs.clone())
        else {
            return false;
        };
        let disc_names = |t: &Self| -> Vec<String> {
            let mut v: Vec<String> = t.discs.iter().map(|d| t.arcs[d[0]].clone()).collect();
            v.sort();
            v
        };
        self.canonical_triangles() == renamed.canonical_triangles() && disc_names(self) == disc_names(&renamed)
    }

    /// If `other` is a flip of `self`, the index of the flipped arc.
    pub fn flipped_arc(&self, other: &Self) -> Option<usize> {
        if self.arcs.len() != other.arcs.len() {
            return None;
        }
        let diff: Vec<usize> = (0..self.arcs.len()).filter(|&i| self.arcs[i] != other.arcs[i]).collect();
        let [arc] = diff.as_slice() else { return None };
        let flipped = self.flip_named(*arc, &other.arcs[*arc]).ok()?;
        flipped.same_combinatorics(other, |s| s.to_string()).then_some(*arc)
    }

    /// Occurrence counts of arc names in triangles and discs, keyed by name.
    pub fn side_counts(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for t in &self.triangles {
            for &a in t {
                *m.entry(self.arcs[a].clone()).or_insert(0) += 1;
            }
        }
        for d in &self.discs {
            *m.entry(self.arcs[d[0]].clone()).or_insert(0) += 1;
        }
        m
    }
}
