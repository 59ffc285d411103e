use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hilbert_teich::cone_hilbert::ConeFunctionalSet;
use hilbert_teich::decorated_surface::{base_triangulation, flip_torus, DecoratedQuad, MarkedStructure, Slope};
use hilbert_teich::earthquake::{EarthquakeRay, TwistFlow};
use hilbert_teich::mcg::{basis_matrix, non_isometry_witness, orbit_distances, orbit_lengths, twist_distortion_bound};
use hilbert_teich::teich_hilbert::{flip_comparison, hilbert_distance, o_dist_constant, radial_comparison};
use hilbert_teich::{Error, LengthVector, MappingClass, Result, WeightedMulticurve};

use crate::output::{Claim, Report, Table};
use crate::Config;

const CONES: usize = 1000;
const QUADS: usize = 1000;
const PAIRS: usize = 200;

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn linear_grid(cfg: &Config) -> Vec<f64> {
    (0..cfg.steps).map(|k| cfg.tmax * k as f64 / (cfg.steps - 1) as f64).collect()
}

// geometric in t, so uniform in the ray parameter s
fn geometric_grid(cfg: &Config) -> Vec<f64> {
    let n = (cfg.steps - 1) as f64;
    (0..cfg.steps).map(|k| cfg.tmax * 2f64.powf(-10.0 * (n - k as f64) / n)).collect()
}

fn random_cone(rng: &mut ChaCha8Rng) -> Result<(ConeFunctionalSet<f64>, Vec<f64>)> {
    let n = rng.gen_range(2..=5);
    let k = rng.gen_range(n..=n + 4);
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let fs: Vec<Vec<f64>> = (0..k)
        .map(|_| loop {
            let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: f64 = f.iter().zip(&x0).map(|(a, b)| a * b).sum();
            if v.abs() > 0.05 {
                break if v > 0.0 { f } else { f.iter().map(|a| -a).collect() };
            }
        })
        .collect();
    Ok((ConeFunctionalSet::new(n, fs, &x0)?, x0))
}

fn interior_near(rng: &mut ChaCha8Rng, cone: &ConeFunctionalSet<f64>, x0: &[f64]) -> Result<Vec<f64>> {
    loop {
        let x: Vec<f64> = x0.iter().map(|v| v + rng.gen_range(-0.3..0.3)).collect();
        if cone.evaluate(&x)?.iter().all(|&f| f > 1e-3) {
            return Ok(x);
        }
    }
}

pub fn axioms(cfg: &Config) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::with_capacity(CONES);
    for _ in 0..CONES {
        let (cone, x0) = random_cone(&mut rng)?;
        let x = interior_near(&mut rng, &cone, &x0)?;
        let y = interior_near(&mut rng, &cone, &x0)?;
        let z = interior_near(&mut rng, &cone, &x0)?;
        let (lam, mu) = (rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0));
        samples.push((cone, x, y, z, lam, mu));
    }
    let rows: Vec<Vec<f64>> = samples
        .par_iter()
        .enumerate()
        .map(|(i, (cone, x, y, z, lam, mu))| {
            let b = cone.birkhoff_distance(x, y)?;
            let ya = cone.yamada_distance(x, y)?;
            let cr = cone.cross_ratio_distance(x, y)?;
            let sym = (cone.birkhoff_distance(y, x)? - b).abs();
            let tri = cone.birkhoff_distance(x, z)? - b - cone.birkhoff_distance(y, z)?;
            let lx: Vec<f64> = x.iter().map(|v| v * lam).collect();
            let my: Vec<f64> = y.iter().map(|v| v * mu).collect();
            let proj = (cone.birkhoff_distance(&lx, &my)? - b).abs();
            let (dim, facets) = (cone.dimension() as f64, cone.functionals().len() as f64);
            Ok(vec![i as f64, dim, facets, b, ya, cr, sym, tri, proj])
        })
        .collect::<Result<_>>()?;
    let claims = vec![
        Claim::new(
            "Birkhoff, Yamada and cross-ratio distances agree",
            1e-9,
            max_of(rows.iter().map(|r| (r[3] - r[4]).abs().max((r[3] - r[5]).abs()))),
        ),
        Claim::new("symmetry d(x,y) = d(y,x)", 1e-9, max_of(rows.iter().map(|r| r[6]))),
        Claim::new("triangle inequality d(x,z) <= d(x,y) + d(y,z)", 1e-9, max_of(rows.iter().map(|r| r[7]))),
        Claim::new("projective invariance d(lx, my) = d(x, y)", 1e-9, max_of(rows.iter().map(|r| r[8]))),
    ];
    let columns = cols(&[
        "sample", "dim", "facets", "birkhoff", "yamada", "cross_ratio", "symmetry_gap", "triangle_excess",
        "projective_gap",
    ]);
    Ok(Report { tables: vec![Table { name: "axioms", columns, rows }], claims })
}

/// `max_i (|f_i| - l_i(X) - e^{-rho0})` and the largest rise of any `f_i` along the rows.
fn defect_claims(rows: &[Vec<f64>], f_col: usize, l0: &[f64], h0: f64) -> Vec<Claim> {
    let excess = max_of(rows.iter().flat_map(|r| (0..3).map(move |i| r[f_col + i].abs() - l0[i] - h0)));
    let rise = max_of(rows.windows(2).flat_map(|w| (0..3).map(move |i| w[1][f_col + i] - w[0][f_col + i])));
    vec![
        Claim::new("length defect: |f_i(t)| <= l_eta_i(X) + exp(-rho0)", 1e-9, excess),
        Claim::new("length defect: f_i non-increasing in t", 1e-9, rise),
    ]
}

pub fn ray(cfg: &Config) -> Result<Report> {
    let tri = base_triangulation();
    let x = MarkedStructure::modular_torus(cfg.rho0)?;
    let mu = WeightedMulticurve::single(cfg.slope, cfg.weight)?;
    let ray = EarthquakeRay::new(&x, &mu, &tri, 1e-10)?;
    let k = ray.constants();
    let v0 = ray.base_vector().clone();
    let rows: Vec<Vec<f64>> = geometric_grid(cfg)
        .par_iter()
        .map(|&t| {
            let s = 0.5 * (t * k.d_bar / k.d).ln();
            let flow = ray.flow();
            let v = flow.length_vector(t, &tri)?;
            let d = hilbert_distance(&tri, &v0, &v)?;
            let mut row = vec![t, s];
            row.extend(&v.lengths);
            row.extend(flow.defects(t));
            row.extend([d, (d - s).abs()]);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut claims = defect_claims(&rows, 5, &v0.lengths, (-cfg.rho0).exp());
    let defects: Vec<f64> = (2..=5).map(|s| ray.almost_geodesic_defect(s as f64, s as f64 + 1.0)).collect::<Result<_>>()?;
    claims.push(Claim::new(
        "almost geodesic: defect at (s, s+1) decreasing over s = 2..5 (largest step)",
        0.0,
        max_of(defects.windows(2).map(|w| w[1] - w[0])),
    ));
    claims.push(Claim::new("almost geodesic: defect at (5, 6)", 0.1, defects[3]));
    let columns = cols(&[
        "t", "s", "l_eta1", "l_eta2", "l_eta3", "f_1", "f_2", "f_3", "d_hilbert_from_base", "defect",
    ]);
    Ok(Report { tables: vec![Table { name: "ray", columns, rows }], claims })
}

pub fn bounds(cfg: &Config) -> Result<Report> {
    let tri = base_triangulation();
    let x = MarkedStructure::modular_torus(cfg.rho0)?;
    let flow = TwistFlow::on_triangulation(&x, cfg.slope, cfg.weight, &tri)?;
    let l0 = x.length_vector(&tri)?.lengths;
    let caps: Vec<f64> = flow.intersections().iter().map(|&i| cfg.weight * i as f64).collect();
    let rows: Vec<Vec<f64>> = linear_grid(cfg)
        .par_iter()
        .map(|&t| {
            let mut row = vec![t];
            row.extend(flow.lengths(t));
            row.extend(flow.defects(t));
            row.extend(flow.derivative_check(t, 1e-4));
            row.extend(&caps);
            row
        })
        .collect();
    let mut claims = defect_claims(&rows, 4, &l0, (-cfg.rho0).exp());
    claims.push(Claim::new(
        "length derivative: |dl_eta_i/dt| <= w i(alpha, eta_i)",
        1e-6,
        max_of(rows.iter().flat_map(|r| (0..3).map(move |i| r[7 + i].abs() - r[10 + i]))),
    ));
    claims.push(Claim::new(
        "length derivative: dl_eta_i/dt non-decreasing in t",
        1e-6,
        max_of(rows.windows(2).flat_map(|w| (0..3).map(move |i| w[0][7 + i] - w[1][7 + i]))),
    ));
    let columns = cols(&[
        "t", "l_eta1", "l_eta2", "l_eta3", "f_1", "f_2", "f_3", "dl_1", "dl_2", "dl_3", "cap_1", "cap_2", "cap_3",
    ]);
    Ok(Report { tables: vec![Table { name: "bounds", columns, rows }], claims })
}

fn slope_of_fit(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn sweep(cfg: &Config, grid: &[f64]) -> Result<(hilbert_teich::PreferredTriangulation, LengthVector, Vec<LengthVector>)> {
    let tri = base_triangulation();
    let x = MarkedStructure::modular_torus(cfg.rho0)?;
    let flow = TwistFlow::on_triangulation(&x, cfg.slope, cfg.weight, &tri)?;
    let v0 = x.length_vector(&tri)?;
    let vs = grid.par_iter().map(|&t| flow.length_vector(t, &tri)).collect::<Result<_>>()?;
    Ok((tri, v0, vs))
}

pub fn flip(cfg: &Config) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let quads: Vec<DecoratedQuad<f64>> = (0..QUADS).map(|_| DecoratedQuad::random(&mut rng)).collect();
    let quad_rows: Vec<Vec<f64>> = quads
        .par_iter()
        .enumerate()
        .map(|(i, raw)| {
            let raw_data = raw.flip_data()?;
            let data = raw.oriented_for_flip()?.flip_data()?;
            let mut row = vec![i as f64, raw_data.shr_alpha, raw_data.shr_beta, data.shr_alpha];
            row.extend(data.residuals());
            row.push(data.l42_residual().abs().max(raw_data.l42_residual().abs()));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let log2 = 2f64.ln();
    let names = [
        "|l'_i1 - l_i1 + shr|, i = 1, 3",
        "|l'_i2 - l_i2 - shr|, i = 1, 3",
        "|l'_i1 - l_i1|, i = 2, 4",
        "|l'_i2 - l_i2|, i = 2, 4",
    ];
    let mut claims: Vec<Claim> = names
        .iter()
        .enumerate()
        .map(|(k, n)| Claim::new(format!("flip inequality: {n} <= log 2"), log2 + 1e-9, max_of(quad_rows.iter().map(|r| r[4 + k]))))
        .collect();
    claims.push(Claim::new(
        "shr(beta) = -shr(alpha)",
        1e-10,
        max_of(quad_rows.iter().map(|r| (r[1] + r[2]).abs())),
    ));
    claims.push(Claim::new("flip: l'_42 closed form", 1e-9, max_of(quad_rows.iter().map(|r| r[8]))));
    claims.push(Claim::new(
        "flip: shr(alpha) >= 0 after orientation (negated minimum)",
        0.0,
        max_of(quad_rows.iter().map(|r| -r[3])),
    ));

    let grid = linear_grid(cfg);
    let (tri, v0, vs) = sweep(cfg, &grid)?;
    let flipped = flip_torus(&tri, 2)?;
    let cmp = flip_comparison(&tri, &flipped, &v0, &vs)?;
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .zip(cmp.d_gamma.iter().zip(&cmp.d_gamma_prime))
        .map(|(&t, (&a, &b))| vec![t, a, b, (a - b).abs(), cmp.ceiling])
        .collect();
    claims.push(Claim::new(
        "flip comparison: |d_Gamma - d_Gamma'| <= C_Gamma + C_Gamma' + log(2)/2",
        cmp.ceiling,
        cmp.max_diff,
    ));
    let (lx, dy): (Vec<f64>, Vec<f64>) = grid
        .iter()
        .zip(&cmp.d_gamma)
        .filter(|(t, _)| (50.0..=200.0).contains(*t))
        .map(|(t, d)| (t.ln(), *d))
        .unzip();
    if lx.len() >= 3 {
        claims.push(Claim::new(
            "growth: |slope of d_Gamma against log t on [50, 200] - 1/2|",
            0.05,
            (slope_of_fit(&lx, &dy) - 0.5).abs(),
        ));
    }
    let quad_cols = cols(&[
        "sample", "shr_alpha_raw", "shr_beta_raw", "shr_alpha", "r_1", "r_2", "r_3", "r_4", "l42_residual",
    ]);
    Ok(Report {
        tables: vec![
            Table { name: "flip_quads", columns: quad_cols, rows: quad_rows },
            Table { name: "flip", columns: cols(&["t", "d_gamma", "d_gamma_prime", "diff", "ceiling"]), rows },
        ],
        claims,
    })
}

pub fn radial(cfg: &Config) -> Result<Report> {
    let grid = linear_grid(cfg);
    let (tri, v0, vs) = sweep(cfg, &grid)?;
    let c = o_dist_constant(&tri, &v0)?;
    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .zip(&vs)
        .map(|(&t, v)| {
            let r = radial_comparison(&tri, &v0, v)?;
            let half_log = 0.5 * v.sup().ln();
            Ok(vec![t, r + half_log, half_log, r, c])
        })
        .collect::<Result<_>>()?;
    let claims = vec![Claim::new(
        "radial: |d(X0, X) - log(sup l_eta(X))/2| <= C",
        c,
        max_of(rows.iter().map(|r| r[3].abs())),
    )];
    let columns = cols(&["t", "d_hilbert_from_base", "half_log_sup", "radial", "bound"]);
    Ok(Report { tables: vec![Table { name: "radial", columns, rows }], claims })
}

pub fn mcg(cfg: &Config) -> Result<Report> {
    let tri = base_triangulation();
    let alpha = cfg.slope;
    let g = MappingClass::dehn_twist(alpha);
    let x0 = MarkedStructure::modular_torus(cfg.rho0)?;
    let e = Slope::new(1, 0)?;
    // structures with l_{1/0} below that of the modular torus, carried to alpha
    let h = MappingClass::new(basis_matrix(alpha))?;
    let l = x0.curve_length(e);
    let tr_cap = x0.a().trace().abs();
    let rho0 = cfg.rho0;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sample = |rng: &mut ChaCha8Rng| -> Result<MarkedStructure<f64>> {
        let s = loop {
            let x = rng.gen_range(2.05..tr_cap);
            let y = rng.gen_range(2.05..12.0);
            if let Ok(s) = MarkedStructure::from_traces(x, y, rng.gen_bool(0.5), rho0) {
                break s;
            }
        };
        let s = h.act_on_structure(&s)?;
        if s.curve_length(alpha) > l * (1.0 + 1e-9) {
            return Err(Error::Internal(format!("sampled l_alpha {} exceeds {l}", s.curve_length(alpha))));
        }
        Ok(s)
    };
    let pairs: Vec<_> = (0..PAIRS).map(|_| Ok((sample(&mut rng)?, sample(&mut rng)?))).collect::<Result<_>>()?;
    let y = sample(&mut rng)?;
    let bound = twist_distortion_bound(&tri, alpha, l, rho0)?;
    let pair_rows: Vec<Vec<f64>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (x, y))| {
            let d = hilbert_distance(&tri, &x.length_vector(&tri)?, &y.length_vector(&tri)?)?;
            let dg = hilbert_distance(&tri, &orbit_lengths(&g, 1, x, &tri)?, &orbit_lengths(&g, 1, y, &tri)?)?;
            Ok(vec![i as f64, d, dg, (d - dg).abs(), bound])
        })
        .collect::<Result<_>>()?;
    let n_max = cfg.steps;
    let (pair, consecutive) = orbit_distances(&g, &x0, &y, n_max, &tri)?;
    let orbit_rows: Vec<Vec<f64>> =
        (0..=n_max).map(|n| vec![n as f64, pair[n], consecutive[n]]).collect();
    let grid: Vec<f64> = (0..=10).map(f64::from).collect();
    let (_, _, delta) = non_isometry_witness(&g, &x0, alpha, &tri, &grid)?;
    let claims = vec![
        Claim::new(
            "twist distortion: |d(X,Y) - d(gX,gY)| <= 2 log(1 + (l/rho0) sum_i i(eta_i, alpha))",
            bound,
            max_of(pair_rows.iter().map(|r| r[3])),
        ),
        Claim::new(format!("orbit: d(g^n X, g^(n+1) X) at n = {n_max}"), 0.05, consecutive[n_max]),
        Claim::new(
            "twist is not an isometry (negated largest |d(gX,gY) - d(X,Y)| on earthquake pairs)",
            -0.01,
            -delta,
        ),
    ];
    Ok(Report {
        tables: vec![
            Table { name: "mcg_pairs", columns: cols(&["sample", "d", "d_twisted", "diff", "bound"]), rows: pair_rows },
            Table { name: "mcg", columns: cols(&["n", "d_orbit_pair", "d_consecutive"]), rows: orbit_rows },
        ],
        claims,
    })
}
