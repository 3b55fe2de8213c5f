use std::f64::consts::{PI, TAU};

use hypflex_core::flexibility::{feasible_intervals, lateral_bounds};
use hypflex_core::hypgeom::PointH3;
use hypflex_core::suspension::*;
use proptest::prelude::*;

/// A suspension with poles `(0,0,t)`, `(0,0,1)` and equator vertices
/// spread around the axis, some steps turning backwards.
#[derive(Debug, Clone)]
struct Drawn {
    t: f64,
    equator: Vec<PointH3>,
}

fn drawn() -> impl Strategy<Value = Drawn> {
    (1.2..8.0f64, 4usize..=8)
        .prop_flat_map(|(t, v)| {
            let vertex = (0.3..2.0f64, 0.2..3.0f64, 0.2..1.2f64);
            (
                Just(t),
                prop::collection::vec(vertex, v),
                prop::collection::vec(any::<bool>(), v),
            )
        })
        .prop_map(|(t, verts, flips)| {
            let mut theta = 0.0;
            let mut equator = Vec::new();
            let total: f64 = verts.iter().map(|v| v.2).sum();
            for (k, (rho, z, step)) in verts.iter().enumerate() {
                let (s, c) = f64::sin_cos(theta);
                equator.push(PointH3 {
                    x: rho * c,
                    y: rho * s,
                    z: *z,
                });
                let step = step * TAU / total;
                theta += if flips[k] && step < PI { -step } else { step };
            }
            Drawn { t, equator }
        })
}

fn spec_of(d: &Drawn) -> SuspensionSpec {
    let n = PointH3 {
        x: 0.0,
        y: 0.0,
        z: d.t,
    };
    let s = PointH3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };
    from_coordinates(&n, &s, &d.equator).unwrap().0
}

/// Sign of the counter-clockwise turn from vertex `j` to `j+1`.
fn true_signs(eq: &[PointH3]) -> SignVector {
    let v = eq.len();
    SignVector::new(
        (0..v)
            .map(|j| {
                let (a, b) = (eq[j], eq[(j + 1) % v]);
                if a.x * b.y - a.y * b.x >= 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn placement_round_trip(d in drawn()) {
        let spec = spec_of(&d);
        let signs = true_signs(&d.equator);
        let p = place(&spec, d.t, &signs, 0.0).unwrap();
        prop_assert!(p.defect < 1e-9);
        prop_assert!(spec_distance(&measure_edges(&p), &spec) < 1e-9);
        for j in 0..p.v() {
            prop_assert!((d.equator[j].z - p.z[j]).abs() < 1e-9 * p.z[j].max(1.0));
        }
    }

    #[test]
    fn pole_distance_identities(d in drawn()) {
        let spec = spec_of(&d);
        let p = place(&spec, d.t, &SignVector::all_plus(spec.v()), 0.0).unwrap();
        for j in 0..p.v() {
            let (r2, z) = (p.rho[j] * p.rho[j], p.z[j]);
            let south = r2 + z * z + 1.0 - 2.0 * z * spec.south[j].cosh();
            let north = r2 + z * z + d.t * d.t - 2.0 * d.t * z * spec.north[j].cosh();
            prop_assert!(south.abs() < 1e-10 * (2.0 * z * spec.south[j].cosh()).max(1.0));
            prop_assert!(north.abs() < 1e-10 * (2.0 * d.t * z * spec.north[j].cosh()).max(1.0));
        }
    }

    #[test]
    fn gauge_covariance(d in drawn(), gauge in -3.0..3.0f64) {
        let spec = spec_of(&d);
        let signs = true_signs(&d.equator);
        let p0 = place(&spec, d.t, &signs, 0.0).unwrap();
        let p1 = place(&spec, d.t, &signs, gauge).unwrap();
        prop_assert_eq!(p0.defect, p1.defect);
        for j in 0..p0.v() {
            let (a, b) = (p0.vertex(j), p1.vertex(j));
            let (s, c) = gauge.sin_cos();
            prop_assert!((a.x * c - a.y * s - b.x).abs() < 1e-12 * p0.rho[j].max(1.0));
            prop_assert!((a.x * s + a.y * c - b.y).abs() < 1e-12 * p0.rho[j].max(1.0));
        }
        prop_assert!(spec_distance(&measure_edges(&p0), &measure_edges(&p1)) < 1e-10);
    }

    #[test]
    fn feasibility_boundary_is_flat(d in drawn()) {
        let spec = spec_of(&d);
        let (lo, hi) = lateral_bounds(&spec);
        let hi = hi.min(lo * 1e4);
        for (a, b) in feasible_intervals(&spec, lo, hi, 200) {
            for t in [a, b] {
                if t == lo || t == hi {
                    continue;
                }
                let p = place(&spec, t, &SignVector::all_plus(spec.v()), 0.0).unwrap();
                let flat = p.cos_dihedral.iter().map(|c| 1.0 - c.abs()).fold(f64::INFINITY, f64::min);
                prop_assert!(flat < 1e-8, "no flat edge at boundary t = {t}: {flat:e}");
            }
        }
    }
}
