//! Random instances of each octahedron type.
//!
//! Draws are retried when they land on a degenerate configuration, when the
//! feasible range of `t` around the drawn position is narrower than
//! `MIN_REL_WINDOW`, or when two type-3 sides meeting at `P₁`/`P₂` are
//! nearly the same geodesic (endpoints closer than `MIN_SIDE_SEPARATION`
//! relative to the radius). After `MAX_ATTEMPTS` failures the last error is
//! returned.

use nalgebra::Vector3;
use rand::Rng;

use super::*;
use crate::hypgeom::{half_turn_about_line, PointHyperboloid};

const MAX_ATTEMPTS: usize = 200;
const MIN_REL_WINDOW: f64 = 1e-2;
const MIN_SIDE_SEPARATION: f64 = 1e-3;

fn traceable(oct: Octahedron) -> Result<Octahedron> {
    let (a, b) = oct.trace_window()?;
    if (b - a) / a < MIN_REL_WINDOW {
        return Err(Error::Degenerate(format!(
            "feasible range [{a}, {b}] is too narrow to trace"
        )));
    }
    Ok(oct)
}

fn endpoints(g: &GeodesicH2) -> (f64, f64) {
    match *g {
        GeodesicH2::Semicircle { center, radius } => (center - radius, center + radius),
        GeodesicH2::Vertical { rho } => (rho, f64::INFINITY),
    }
}

fn transversal(q: &TangentialQuad) -> Result<()> {
    let sides = q.side_lines();
    for (a, b) in [(&sides[0], &sides[1]), (&sides[2], &sides[3])] {
        let ((a0, a1), (b0, b1)) = (endpoints(&a.geodesic), endpoints(&b.geodesic));
        let gap = (a0 - b0).abs().max(if a1.is_finite() && b1.is_finite() {
            (a1 - b1).abs()
        } else {
            0.0
        });
        let scale = [a0, b0, a1, b1]
            .iter()
            .filter(|x| x.is_finite())
            .fold(1.0f64, |m, x| m.max(x.abs()));
        if a1.is_finite() == b1.is_finite() && gap < MIN_SIDE_SEPARATION * scale {
            return Err(Error::Degenerate(format!(
                "sides through a vertex nearly coincide (gap {gap:e})"
            )));
        }
    }
    Ok(())
}

fn traceable_config(cfg: FlatOctahedronConfig) -> Result<FlatOctahedronConfig> {
    transversal(&cfg.quad_b)?;
    transversal(&cfg.quad_c)?;
    traceable(lift_type3(&cfg)?)?;
    Ok(cfg)
}

fn retry<R: Rng + ?Sized, T>(rng: &mut R, mut f: impl FnMut(&mut R) -> Result<T>) -> Result<T> {
    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        match f(rng) {
            Ok(v) => return Ok(v),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// A point within hyperbolic distance ~2 of `(0, 0, 1)`.
pub fn random_point_h3<R: Rng + ?Sized>(rng: &mut R) -> PointH3 {
    PointH3 {
        x: rng.random_range(-1.0..1.0),
        y: rng.random_range(-1.0..1.0),
        z: rng.random_range(0.4..2.0),
    }
}

/// The point at distance `d` from `(0, 1)` in direction `psi`.
pub fn polar_point_h2(d: f64, psi: f64) -> Result<PointH2> {
    PointH2::from_lift(&Vector3::new(
        d.cosh(),
        d.sinh() * psi.cos(),
        d.sinh() * psi.sin(),
    ))
}

/// Type-1 instance: `A`, `B` random, `C`, `D` their images under a random
/// half-turn.
pub fn random_type1<R: Rng + ?Sized>(
    rng: &mut R,
) -> Result<(QuadrilateralH3, PointH3, Octahedron)> {
    retry(rng, |rng| {
        let (p, q) = (random_point_h3(rng), random_point_h3(rng));
        let h = half_turn_about_line(&p, &q)?;
        let (a, b) = (random_point_h3(rng), random_point_h3(rng));
        let quad = QuadrilateralH3 {
            a,
            b,
            c: h.apply(&a)?,
            d: h.apply(&b)?,
        };
        let n = random_point_h3(rng);
        let oct = traceable(construct_type1(&quad, &n)?)?;
        Ok((quad, n, oct))
    })
}

/// Type-2 instance: `A` random, `C` its mirror image, `B`, `D` on the mirror.
pub fn random_type2<R: Rng + ?Sized>(
    rng: &mut R,
) -> Result<(QuadrilateralH3, PointH3, Octahedron)> {
    retry(rng, |rng| {
        let (p, q) = (random_point_h3(rng), random_point_h3(rng));
        let mirror = reflection_swapping(&p, &q)?;
        let on_mirror = |x: PointH3| -> Result<PointH3> {
            let y = mirror.apply(&x)?;
            PointHyperboloid::normalized(x.lift() + y.lift())?.to_h3()
        };
        let a = random_point_h3(rng);
        let quad = QuadrilateralH3 {
            a,
            b: on_mirror(random_point_h3(rng))?,
            c: mirror.apply(&a)?,
            d: on_mirror(random_point_h3(rng))?,
        };
        let n = random_point_h3(rng);
        let oct = traceable(construct_type2(&quad, &n)?)?;
        Ok((quad, n, oct))
    })
}

/// Horocycle instance with `R = 1`.
pub fn random_horocycle<R: Rng + ?Sized>(rng: &mut R) -> Result<FlatOctahedronConfig> {
    retry(rng, |rng| {
        let a1 = PointH2 {
            rho: rng.random_range(-1.0..0.0),
            z: rng.random_range(0.2..0.7),
        };
        let a2 = PointH2 {
            rho: rng.random_range(0.3..1.3),
            z: rng.random_range(0.2..0.7),
        };
        let top = a1.z.max(a2.z);
        let r2 = rng.random_range(top + 0.05..0.95);
        traceable_config(flat_config_horocycle(
            1.0,
            &a1,
            &a2,
            r2,
            Pairings::default(),
        )?)
    })
}

/// Hypercycle instance with `α ∈ (0.3, 1.2)`, `α₂ ∈ (α, 1.3)`.
pub fn random_hypercycle<R: Rng + ?Sized>(rng: &mut R) -> Result<FlatOctahedronConfig> {
    retry(rng, |rng| {
        let alpha = rng.random_range(0.3..1.2);
        let l1 = rng.random_range(0.5..1.5);
        let r1 = l1 * rng.random_range(1.3..3.0);
        let l2 = rng.random_range(0.5..1.5);
        let r2 = l2 * rng.random_range(1.3..3.0);
        // near π/2 the tangents are huge semicircles and the intersection
        // oracle loses digits
        let alpha2 = rng.random_range(alpha + 0.05..1.3);
        traceable_config(flat_config_hypercycle(
            alpha,
            [l1, r1, l2, r2],
            alpha2,
            Pairings::default(),
        )?)
    })
}

/// Circle instance centered at `(0, 1)`; the circle is inscribed in the
/// `B`-quadrilateral when the crossing tangents meet.
pub fn random_circle<R: Rng + ?Sized>(rng: &mut R) -> Result<FlatOctahedronConfig> {
    let m = PointH2 { rho: 0.0, z: 1.0 };
    retry(rng, |rng| {
        let r = rng.random_range(0.3..1.0);
        let r2 = r * rng.random_range(0.3..0.8);
        let psi1 = rng.random_range(0.0..std::f64::consts::TAU);
        let psi2 = psi1 + rng.random_range(0.6..std::f64::consts::TAU - 0.6);
        let a1 = polar_point_h2(r + rng.random_range(0.2..1.5), psi1)?;
        let a2 = polar_point_h2(r + rng.random_range(0.2..1.5), psi2)?;
        let pairings = Pairings {
            b: PairingChoice::Auto,
            c: PairingChoice::Auto,
        };
        traceable_config(flat_config_circle(&m, r, r2, &a1, &a2, pairings)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_produce_certified_octahedra() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let octs = [
                random_type1(&mut rng).unwrap().2,
                random_type2(&mut rng).unwrap().2,
                lift_type3(&random_horocycle(&mut rng).unwrap()).unwrap(),
                lift_type3(&random_hypercycle(&mut rng).unwrap()).unwrap(),
                lift_type3(&random_circle(&mut rng).unwrap()).unwrap(),
            ];
            for oct in octs {
                let certs = crate::flexibility::certify_octahedron(&oct.spec, 1e-9).unwrap();
                assert!(certs.iter().all(|c| !c.is_empty()), "{:?}", oct.kind);
            }
        }
    }
}
