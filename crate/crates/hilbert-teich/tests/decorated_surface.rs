use hilbert_teich::decorated_surface::{
    arc_slopes, base_triangulation, corner_lengths, flip_torus, horocycle_budget, ptolemy_flip_length, shearing,
    torus_triangulation, DecoratedQuad, Diagonal, MarkedStructure, Slope, TruncatedLengthVector,
};
use hilbert_teich::hyperbolic_core::{lambda_length, MobiusMap};
use hilbert_teich::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type S = MarkedStructure<f64>;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn slope(s: &str) -> Slope {
    s.parse().unwrap()
}

const SHORT: [&str; 9] = ["1/0", "0/1", "1/1", "-1/1", "2/1", "1/2", "-2/1", "-1/2", "3/2"];

fn structure() -> impl Strategy<Value = S> {
    (2.05f64..8.0, 2.05f64..8.0, prop::bool::ANY, 0.5f64..4.0)
        .prop_filter_map("no real structure", |(x, y, big, rho0)| S::from_traces(x, y, big, rho0).ok())
}

#[test]
fn modular_torus_numbers() {
    let x = S::modular_torus(2.0).unwrap();
    assert_eq!(x.trace_triple(), (3.0, 3.0, 3.0));
    assert!((x.commutator_trace() + 2.0).abs() < 1e-12);
    for s in ["1/0", "0/1", "1/1"] {
        let l = x.arc_length_by_lift(slope(s)).unwrap();
        assert!((l - 7.5835).abs() < 5e-5, "{s}: {l}");
        assert!(close(l, x.arc_length(slope(s)), 1e-12));
    }
    // the slopes with Markov neighbour trace 6
    for s in ["-1/1", "2/1", "1/2"] {
        let l = x.arc_length_by_lift(slope(s)).unwrap();
        assert!(close(l, 4.0 + 2.0 * 12f64.ln(), 1e-12), "{s}: {l}");
    }
    assert!(close(x.h0(), (-2f64).exp(), 1e-15));
}

#[test]
fn structure_validation() {
    let id = MobiusMap::<f64>::identity();
    assert!(matches!(S::new(id, id, 1.0), Err(Error::InvalidStructure(_))));
    let x = S::modular_torus(2.0).unwrap();
    assert!(S::new(x.a(), x.b(), 0.0).is_err());
    assert!(S::new(x.a(), x.a(), 2.0).is_err());
    assert!(S::from_traces(2.1, 2.1, true, 1.0).is_err());
}

#[test]
fn corners() {
    let tri = base_triangulation();
    let v = TruncatedLengthVector { lengths: vec![2.0, 1.0, 1.0], rho0: 0.5 };
    assert!(matches!(corner_lengths(&v, &tri, 0), Err(Error::Corner { .. })));
    let v = TruncatedLengthVector::new(&tri, vec![5.0, 4.0, 3.0], 1.0).unwrap();
    for t in 0..2 {
        let c = corner_lengths(&v, &tri, t).unwrap();
        assert!(close(c.iter().sum::<f64>(), 6.0, 1e-15));
        assert!(c.iter().all(|&x| x >= 1.0));
    }
    assert!(matches!(corner_lengths(&v, &tri, 2), Err(Error::InvalidTriangulation(_))));
    assert!(matches!(TruncatedLengthVector::new(&tri, vec![1.0; 2], 1.0), Err(Error::Dimension { .. })));
}

#[test]
fn ptolemy_examples() {
    assert!(close(ptolemy_flip_length(0.0, [0.0; 4]), 2.0 * 2f64.ln(), 1e-15));
    // the torus flip of 1/1 produces -1/1 with sides 1/0, 0/1 twice each
    let x = S::modular_torus(1.0).unwrap();
    let [a, b, c] = [x.arc_length(slope("1/0")), x.arc_length(slope("0/1")), x.arc_length(slope("1/1"))];
    let flipped = ptolemy_flip_length(c, [a, b, a, b]);
    assert!(close(flipped, x.arc_length_by_lift(slope("-1/1")).unwrap(), 1e-12));
}

#[test]
fn flip_torus_labels() {
    let t = base_triangulation();
    let f = flip_torus(&t, 0).unwrap();
    assert_eq!(arc_slopes(&f).unwrap(), vec![slope("1/2"), slope("0/1"), slope("1/1")]);
    let g = flip_torus(&f, 0).unwrap();
    assert!(g.same_combinatorics(&t, |s| s.to_string()));
    assert!(torus_triangulation([slope("1/0"), slope("0/1"), slope("2/1")]).is_err());
}

#[test]
fn structure_json() {
    let x = S::modular_torus(2.0).unwrap();
    let s = serde_json::to_string(&x).unwrap();
    assert_eq!(s, r#"{"A":[[1.0,1.0],[1.0,2.0]],"B":[[1.0,-1.0],[-1.0,2.0]],"rho0":2.0}"#);
    let back: S = serde_json::from_str(&s).unwrap();
    assert_eq!(back, x);
    let bad = r#"{"A":[[1.0,0.0],[0.0,1.0]],"B":[[1.0,0.0],[0.0,1.0]],"rho0":2.0}"#;
    assert!(serde_json::from_str::<S>(bad).is_err());
}

#[test]
fn single_precision() {
    let x = MarkedStructure::<f32>::modular_torus(2.0).unwrap();
    let v = x.length_vector(&base_triangulation()).unwrap();
    for l in v.lengths {
        assert!((l - 7.5835).abs() < 1e-3);
    }
}

#[test]
fn random_quad_ptolemy_and_shear() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let q = DecoratedQuad::<f64>::random(&mut rng);
        let [l1, l2, l3, l4, la, lb] = q.lengths().unwrap();
        assert!(close(ptolemy_flip_length(la, [l1, l2, l3, l4]), lb, 1e-10));
        let lam = |i: usize, j: usize| lambda_length(&q.cusps[i], &q.cusps[j]).unwrap();
        // sides η1 = O4O1, η2 = O1O2, η3 = O2O3, η4 = O3O4
        let by_lambda = (lam(3, 0) * lam(1, 2) / (lam(0, 1) * lam(2, 3))).ln();
        let sa = shearing(&q, Diagonal::Alpha).unwrap();
        assert!((sa - by_lambda).abs() < 1e-9 * (1.0 + sa.abs()));
        assert!((sa + shearing(&q, Diagonal::Beta).unwrap()).abs() < 1e-9 * (1.0 + sa.abs()));
        let o = q.oriented_for_flip().unwrap();
        let d = o.flip_data().unwrap();
        assert!(d.shr_alpha >= 0.0);
        assert!(d.hypothesis_holds());
        assert!(d.residuals().iter().all(|&r| r <= 2f64.ln() + 1e-9));
    }
}

proptest! {
    #[test]
    fn markov_and_commutator(x in structure()) {
        let (a, b, c) = x.trace_triple();
        prop_assert!((a * a + b * b + c * c - a * b * c).abs() < 1e-9 * a * b * c);
        prop_assert!((x.commutator_trace() + 2.0).abs() < 1e-9);
    }

    #[test]
    fn three_length_routes_agree(x in structure()) {
        // the lift goes through the commutator, whose rounding grows with the entries
        let cond = (x.a().scale() * x.b().scale()).powi(2);
        for s in SHORT {
            let s = slope(s);
            let desc = x.arc_length(s);
            prop_assert!(close(desc, x.arc_length_by_trace(s), 1e-10));
            prop_assert!(close(desc, x.arc_length_by_lift(s).unwrap(), 1e-12 * cond), "{}", s);
        }
    }

    #[test]
    fn budget_is_horocycle_length(x in structure()) {
        let tri = base_triangulation();
        let lifted: Vec<f64> = ["1/0", "0/1", "1/1"].iter().map(|s| x.arc_length_by_lift(slope(s)).unwrap()).collect();
        let v = TruncatedLengthVector { lengths: lifted, rho0: x.rho0() };
        prop_assert!(close(horocycle_budget(&v, &tri).unwrap(), x.h0(), 1e-9));
    }

    #[test]
    fn conjugation_keeps_lengths(x in structure(), a in 0.5f64..2.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
        let g = MobiusMap::from_entries(a, b, c, (1.0 + b * c) / a);
        let y = x.conjugate(&g).unwrap();
        let tri = base_triangulation();
        let (u, v) = (x.length_vector(&tri).unwrap(), y.length_vector(&tri).unwrap());
        for i in 0..3 {
            prop_assert!(close(u.lengths[i], v.lengths[i], 1e-9));
        }
    }

    #[test]
    fn symmetric_traces_give_symmetric_lengths(t in 2.05f64..8.0, rho0 in 0.5f64..3.0) {
        prop_assume!(S::from_traces(t, t, true, rho0).is_ok());
        let x = S::from_traces(t, t, true, rho0).unwrap();
        prop_assert!(close(x.arc_length(slope("1/0")), x.arc_length(slope("0/1")), 1e-12));
        prop_assert!(close(x.arc_length(slope("2/1")), x.arc_length(slope("1/2")), 1e-10));
    }
}
