//! Engine benchmarks: functional evaluation, vertex enumeration, lattice
//! sums, and the numeric quadrature path.

use criterion::{criterion_group, criterion_main, Criterion};

use kstab_core::geom::{HPolytope, Ineq};
use kstab_core::oracle;
use kstab_core::rat::{rat, rat_i};
use kstab_core::weight::WeightFunction;
use kstab_core::{evaluate, load_datum_str, load_tc_str};

fn blp2_json() -> &'static str {
    r#"{
        "name": "blp2", "dimension": 2, "rank": 2,
        "polytope": {"facets": [
            {"normal": [1, 0], "n_D": 1, "kind": "g-divisor"},
            {"normal": [0, 1], "n_D": 1, "kind": "g-divisor"},
            {"normal": [-1, -1], "n_D": 1, "kind": "g-divisor"},
            {"normal": [1, 1], "n_D": 1, "kind": "g-divisor"}
        ]},
        "roots": [], "kappa_p": [0, 0], "spherical_roots": [],
        "torus": {"xi": [[1, 0], [0, 1]], "chi": "canonical"}
    }"#
}

fn bench_evaluate(c: &mut Criterion) {
    let datum = load_datum_str(blp2_json()).unwrap();
    let tc = load_tc_str(
        &datum,
        r#"{"pieces": [{"c": 1, "lambda": [0, 0]}, {"c": 1, "lambda": [-1, -1]}]}"#,
    )
    .unwrap();
    let weight = WeightFunction::one(2);
    c.bench_function("evaluate blp2 two-piece", |b| {
        b.iter(|| evaluate(&datum, &tc, &weight).unwrap())
    });
}

fn bench_vertices(c: &mut Criterion) {
    // A 4-dimensional box with two diagonal cuts.
    let d = 4;
    let mut ineqs = Vec::new();
    for i in 0..d {
        let mut n = vec![rat_i(0); d];
        n[i] = rat_i(1);
        ineqs.push(Ineq::new(n.clone(), rat_i(1)));
        n[i] = rat_i(-1);
        ineqs.push(Ineq::new(n, rat_i(1)));
    }
    ineqs.push(Ineq::new(vec![rat_i(-1); d], rat(5, 2)));
    ineqs.push(Ineq::new(vec![rat_i(1); d], rat(5, 2)));
    let p = HPolytope::new(d, ineqs);
    c.bench_function("vertex enumeration 4d", |b| {
        b.iter(|| p.vertices().unwrap().len())
    });
}

fn bench_hilbert(c: &mut Criterion) {
    let datum = load_datum_str(blp2_json()).unwrap();
    c.bench_function("hilbert blp2 k=64", |b| {
        b.iter(|| oracle::hilbert(&datum, 64).unwrap())
    });
}

fn bench_numeric_quadrature(c: &mut Criterion) {
    let datum = load_datum_str(blp2_json()).unwrap();
    let poly = datum.polytope();
    c.bench_function("adaptive quadrature exp weight", |b| {
        b.iter(|| {
            kstab_core::quad::integrate_numeric(
                &poly,
                &|x| (-(x[0] + x[1])).exp(),
                1e-10,
                22,
            )
            .unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_evaluate,
    bench_vertices,
    bench_hilbert,
    bench_numeric_quadrature
);
criterion_main!(benches);
