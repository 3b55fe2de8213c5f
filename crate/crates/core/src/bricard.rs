//! Bricard–Stachel flexible octahedra.
//!
//! Types 1 and 2 are built from a symmetric quadrilateral and a free vertex
//! `N`; type 3 from two tangential quadrilaterals of a flat configuration.
//! Octahedra use the vertex order `N, A, B, C, D, S` with equator `ABCD`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::flexibility::trace_window;
use crate::hypgeom::{
    collinearity_measure, dist_h2, dist_h3, hypercycle_cos_phi, hypercycle_point_from_centers,
    midpoint, minkowski_dot, reflection_swapping, signed_arc, tangent_geodesics_to_circle,
    tangent_geodesics_to_horocycle, tangent_geodesics_to_hypercycle, tangent_length_circle,
    GeodesicH2, IsometryH3, PointH2, PointH3, TangentLine, TangentPair, EPS_DEGENERATE,
    EPS_GEOMETRIC,
};
use crate::suspension::{classify_degeneracy, DegeneracyKind, SuspensionSpec};

pub mod random;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrilateralH3 {
    pub a: PointH3,
    pub b: PointH3,
    pub c: PointH3,
    pub d: PointH3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OctahedronKind {
    Type1,
    Type2,
    Type3Circle,
    Type3Horocycle,
    Type3Hypercycle,
    Other,
}

/// An octahedron `N, A, B, C, D, S` with its 12 edge lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Octahedron {
    pub kind: OctahedronKind,
    /// Vertex positions `[N, A, B, C, D, S]`; type-3 octahedra carry their
    /// flat position embedded in the plane `y = 0`.
    pub vertices: Option<[PointH3; 6]>,
    pub spec: SuspensionSpec,
}

impl Octahedron {
    pub fn from_vertices(kind: OctahedronKind, v: [PointH3; 6]) -> Result<Self> {
        let [n, a, b, c, d, s] = v;
        let eq = [a, b, c, d];
        let spec = SuspensionSpec::new(
            eq.iter().map(|p| dist_h3(&n, p)).collect::<Result<_>>()?,
            eq.iter().map(|p| dist_h3(&s, p)).collect::<Result<_>>()?,
            (0..4)
                .map(|j| dist_h3(&eq[j], &eq[(j + 1) % 4]))
                .collect::<Result<_>>()?,
        )?;
        Ok(Octahedron {
            kind,
            vertices: Some(v),
            spec,
        })
    }

    /// `e^{d(N,S)}` of the stored position.
    pub fn t0(&self) -> Option<f64> {
        self.vertices
            .map(|v| dist_h3(&v[0], &v[5]).map(f64::exp).unwrap_or(f64::NAN))
    }

    /// [`trace_window`](crate::flexibility::trace_window) around
    /// [`t0`](Self::t0).
    pub fn trace_window(&self) -> Result<(f64, f64)> {
        trace_window(&self.spec, self.t0())
    }
}

fn equal_within(x: f64, y: f64, what: &str) -> Result<()> {
    if (x - y).abs() > EPS_GEOMETRIC * x.abs().max(1.0) {
        return Err(Error::SymmetryViolation(format!("{what}: {x} vs {y}")));
    }
    Ok(())
}

fn maps_to(iso: &IsometryH3, p: &PointH3, q: &PointH3, what: &str) -> Result<()> {
    let d = dist_h3(&iso.apply(p)?, q)?;
    if d > EPS_GEOMETRIC {
        return Err(Error::SymmetryViolation(format!("{what} (off by {d:e})")));
    }
    Ok(())
}

fn check_nondegenerate(oct: &Octahedron) -> Result<()> {
    let v = oct.vertices.expect("types 1 and 2 carry vertices");
    let report = classify_degeneracy(&v[0], &v[5], &v[1..5]);
    match report.kind {
        DegeneracyKind::Nondegenerate => Ok(()),
        kind => Err(Error::Degenerate(format!(
            "suspension is {kind:?} (witness {:e})",
            report.witness
        ))),
    }
}

/// The half-turn of a type-1 quadrilateral: about the line through the
/// diagonal midpoints, or about the normal of the quadrilateral's plane when
/// those midpoints coincide.
pub fn type1_symmetry(quad: &QuadrilateralH3) -> Result<IsometryH3> {
    let QuadrilateralH3 { a, b, c, d } = quad;
    equal_within(dist_h3(a, b)?, dist_h3(c, d)?, "d(A,B) != d(C,D)")?;
    equal_within(dist_h3(b, c)?, dist_h3(d, a)?, "d(B,C) != d(D,A)")?;
    let m_ac = midpoint(a, c)?;
    let m_bd = midpoint(b, d)?;
    let h = if dist_h3(&m_ac, &m_bd)? > 1e-9 {
        crate::hypgeom::half_turn_about_line(&m_ac, &m_bd)?
    } else {
        if collinearity_measure(a, b, c) < EPS_DEGENERATE {
            return Err(Error::Degenerate(
                "quadrilateral vertices lie on one geodesic".into(),
            ));
        }
        let n = crate::hypgeom::cross4(&a.lift(), &b.lift(), &c.lift());
        let normal = Vector4::new(n[0], -n[1], -n[2], -n[3]);
        if minkowski_dot(&normal, &d.lift()).abs() > 1e-9 * normal.norm() * d.lift().norm() {
            return Err(Error::SymmetryViolation(
                "diagonal midpoints coincide but quadrilateral is skew".into(),
            ));
        }
        crate::hypgeom::half_turn_about_span(&m_ac.lift(), &normal)?
    };
    maps_to(&h, a, c, "half-turn does not map A to C")?;
    maps_to(&h, b, d, "half-turn does not map B to D")?;
    Ok(h)
}

/// Type 1: `S` is the image of `N` under the half-turn exchanging `A ↔ C`
/// and `B ↔ D`.
pub fn construct_type1(quad: &QuadrilateralH3, n: &PointH3) -> Result<Octahedron> {
    n.validate()?;
    let h = type1_symmetry(quad)?;
    let s = h.apply(n)?;
    let QuadrilateralH3 { a, b, c, d } = *quad;
    equal_within(dist_h3(&a, n)?, dist_h3(&c, &s)?, "d(A,N) != d(C,S)")?;
    equal_within(dist_h3(&b, n)?, dist_h3(&d, &s)?, "d(B,N) != d(D,S)")?;
    equal_within(dist_h3(&c, n)?, dist_h3(&a, &s)?, "d(C,N) != d(A,S)")?;
    equal_within(dist_h3(&d, n)?, dist_h3(&b, &s)?, "d(D,N) != d(B,S)")?;
    let oct = Octahedron::from_vertices(OctahedronKind::Type1, [*n, a, b, c, d, s])?;
    check_nondegenerate(&oct)?;
    Ok(oct)
}

/// The mirror of a type-2 quadrilateral: the perpendicular bisector of `AC`,
/// which contains `B` and `D`.
pub fn type2_symmetry(quad: &QuadrilateralH3) -> Result<IsometryH3> {
    let QuadrilateralH3 { a, b, c, d } = quad;
    equal_within(dist_h3(a, b)?, dist_h3(b, c)?, "d(A,B) != d(B,C)")?;
    equal_within(dist_h3(c, d)?, dist_h3(d, a)?, "d(C,D) != d(D,A)")?;
    let r = reflection_swapping(a, c)?;
    maps_to(&r, b, b, "mirror does not fix B")?;
    maps_to(&r, d, d, "mirror does not fix D")?;
    Ok(r)
}

/// Type 2: `S` is the mirror image of `N` in the plane through `B`, `D`
/// bisecting the dihedral angle at `BD`.
pub fn construct_type2(quad: &QuadrilateralH3, n: &PointH3) -> Result<Octahedron> {
    n.validate()?;
    let r = type2_symmetry(quad)?;
    let s = r.apply(n)?;
    let QuadrilateralH3 { a, b, c, d } = *quad;
    equal_within(dist_h3(&a, n)?, dist_h3(&c, &s)?, "d(A,N) != d(C,S)")?;
    equal_within(dist_h3(&c, n)?, dist_h3(&a, &s)?, "d(C,N) != d(A,S)")?;
    equal_within(dist_h3(&b, n)?, dist_h3(&b, &s)?, "d(B,N) != d(B,S)")?;
    equal_within(dist_h3(&d, n)?, dist_h3(&d, &s)?, "d(D,N) != d(D,S)")?;
    let oct = Octahedron::from_vertices(OctahedronKind::Type2, [*n, a, b, c, d, s])?;
    check_nondegenerate(&oct)?;
    Ok(oct)
}

/// Common tangent length from `x` to the circle `(m, r)`.
pub fn tangent_lengths_circle(m: &PointH2, r: f64, x: &PointH2) -> Result<f64> {
    tangent_length_circle(m, r, x)
}

/// Sides of a quadrilateral `A₁B₂A₂B₁` tangent to a circle, from tangent
/// lengths `a = τ(A₁)`, `b = τ(B₂)`, `c = τ(A₂)`, `d = τ(B₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleQuadSides {
    /// `d(A₁,B₂), d(A₂,B₂), d(A₂,B₁), d(A₁,B₁)`.
    pub sides: [f64; 4],
    pub signed_sum: f64,
}

/// Inscribed circle: sides `a+b, b+c, c+d, d+a` with alternating sum 0.
/// Externally tangent circle: sides `a−b, b+c, c−d, a+d` with
/// `s₁ + s₂ − s₃ − s₄ = 0`.
pub fn circle_quad_identity(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    inscribed: bool,
) -> Result<CircleQuadSides> {
    if [a, b, c, d].iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return domain("tangent lengths must be positive");
    }
    if inscribed {
        let sides = [a + b, b + c, c + d, d + a];
        Ok(CircleQuadSides {
            sides,
            signed_sum: sides[0] - sides[1] + sides[2] - sides[3],
        })
    } else {
        if !(a > b && c > d) {
            return domain(format!(
                "external tangency needs a > b and c > d, got {a}, {b}, {c}, {d}"
            ));
        }
        let sides = [a - b, b + c, c - d, a + d];
        Ok(CircleQuadSides {
            sides,
            signed_sum: sides[0] + sides[1] - sides[2] - sides[3],
        })
    }
}

/// The unique upper-half-plane intersection of two geodesics.
pub fn intersect_geodesics(g1: &GeodesicH2, g2: &GeodesicH2) -> Result<PointH2> {
    use GeodesicH2::*;
    match (*g1, *g2) {
        (
            Semicircle {
                center: a1,
                radius: b1,
            },
            Semicircle {
                center: a2,
                radius: b2,
            },
        ) => {
            // measure from the smaller circle so that nearly vertical
            // (huge) semicircles do not cost digits
            let ((c1, r1), (c2, r2)) = if b1 <= b2 {
                ((a1, b1), (a2, b2))
            } else {
                ((a2, b2), (a1, b1))
            };
            let dc = c2 - c1;
            let scale = c1.abs().max(c2.abs()).max(r1).max(1.0);
            if dc.abs() <= 1e-14 * scale {
                if (r1 - r2).abs() <= 1e-14 * scale {
                    return Err(Error::Degenerate("identical geodesics".into()));
                }
                return Err(Error::NoIntersection("concentric semicircles".into()));
            }
            let d = dc.abs();
            let x = ((d - r2) * (d + r2) + r1 * r1) / (2.0 * d);
            let h2 = (r1 - x) * (r1 + x);
            if !(h2 > 0.0) {
                return Err(Error::NoIntersection(format!(
                    "semicircles ({c1}, {r1}) and ({c2}, {r2}) are disjoint or meet at infinity"
                )));
            }
            PointH2::new(c1 + x * dc.signum(), h2.sqrt())
        }
        (Semicircle { center, radius }, Vertical { rho })
        | (Vertical { rho }, Semicircle { center, radius }) => {
            let dx = rho - center;
            let h2 = (radius - dx) * (radius + dx);
            if !(h2 > 0.0) {
                return Err(Error::NoIntersection(
                    "vertical line misses the semicircle".into(),
                ));
            }
            PointH2::new(rho, h2.sqrt())
        }
        (Vertical { rho: a }, Vertical { rho: b }) => {
            if a == b {
                Err(Error::Degenerate("identical geodesics".into()))
            } else {
                Err(Error::NoIntersection(
                    "vertical lines meet only at infinity".into(),
                ))
            }
        }
    }
}

/// The conic the tangent lines touch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "conic", rename_all = "snake_case")]
pub enum Conic {
    Circle { center: PointH2, radius: f64 },
    Horocycle { height: f64 },
    Hypercycle { alpha: f64 },
}

impl Conic {
    pub fn tangents(&self, x: &PointH2) -> Result<TangentPair> {
        match *self {
            Conic::Circle { center, radius } => tangent_geodesics_to_circle(&center, radius, x),
            Conic::Horocycle { height } => tangent_geodesics_to_horocycle(height, x),
            Conic::Hypercycle { alpha } => tangent_geodesics_to_hypercycle(alpha, x),
        }
    }

    /// Closed-form `cos φ` on `own` of its intersection with `other`.
    pub fn closed_form_cos(&self, own: &TangentLine, other: &TangentLine) -> Option<f64> {
        let (GeodesicH2::Semicircle { center: c, .. }, GeodesicH2::Semicircle { center: c2, .. }) =
            (own.geodesic, other.geodesic)
        else {
            return None;
        };
        match *self {
            Conic::Horocycle { height } => Some((c2 - c) / (2.0 * height)),
            Conic::Hypercycle { alpha } => Some(hypercycle_cos_phi(alpha, c, c2)),
            Conic::Circle { .. } => None,
        }
    }
}

/// How the second vertex pair is cut from the tangents of `A₁` and `A₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `P₁ = l^{A₁} ∩ l^{A₂}`, `P₂ = r^{A₁} ∩ r^{A₂}`.
    Same,
    /// `P₁ = r^{A₁} ∩ l^{A₂}`, `P₂ = l^{A₁} ∩ r^{A₂}`.
    Cross,
}

/// `cos φ` of one vertex on one side line, by closed form (when the conic
/// has one) and by intersecting the Euclidean circles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexAngle {
    pub closed_form: Option<f64>,
    pub oracle: f64,
}

impl VertexAngle {
    pub fn value(&self) -> f64 {
        self.closed_form.unwrap_or(self.oracle)
    }
}

/// Quadrilateral `A₁ P₁ A₂ P₂` whose four side lines touch one conic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentialQuad {
    pub conic: Conic,
    pub pairing: Pairing,
    pub a1: PointH2,
    pub a2: PointH2,
    pub lines_a1: TangentPair,
    pub lines_a2: TangentPair,
    pub p1: PointH2,
    pub p2: PointH2,
}

/// Index of a vertex of a tangential quadrilateral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QV {
    A1,
    P1,
    A2,
    P2,
}

impl TangentialQuad {
    pub fn new(conic: Conic, a1: &PointH2, a2: &PointH2, pairing: Pairing) -> Result<Self> {
        let lines_a1 = conic.tangents(a1)?;
        let lines_a2 = conic.tangents(a2)?;
        let (g1, g2) = match pairing {
            Pairing::Same => (
                (lines_a1.left, lines_a2.left),
                (lines_a1.right, lines_a2.right),
            ),
            Pairing::Cross => (
                (lines_a1.right, lines_a2.left),
                (lines_a1.left, lines_a2.right),
            ),
        };
        let p1 = intersect_geodesics(&g1.0.geodesic, &g1.1.geodesic)?;
        let p2 = intersect_geodesics(&g2.0.geodesic, &g2.1.geodesic)?;
        Ok(TangentialQuad {
            conic,
            pairing,
            a1: *a1,
            a2: *a2,
            lines_a1,
            lines_a2,
            p1,
            p2,
        })
    }

    /// Lines of the sides `A₁P₁, P₁A₂, A₂P₂, P₂A₁`.
    pub fn side_lines(&self) -> [TangentLine; 4] {
        let (l1, r1, l2, r2) = (
            self.lines_a1.left,
            self.lines_a1.right,
            self.lines_a2.left,
            self.lines_a2.right,
        );
        match self.pairing {
            Pairing::Same => [l1, l2, r2, r1],
            Pairing::Cross => [r1, l2, r2, l1],
        }
    }

    fn point(&self, v: QV) -> PointH2 {
        match v {
            QV::A1 => self.a1,
            QV::P1 => self.p1,
            QV::A2 => self.a2,
            QV::P2 => self.p2,
        }
    }

    /// `cos φ` of vertex `v` on side line `k` (which must contain it).
    fn angle(&self, v: QV, k: usize) -> VertexAngle {
        let lines = self.side_lines();
        let line = lines[k];
        let p = self.point(v);
        let oracle = line.geodesic.cos_angle_of(&p).unwrap_or(f64::NAN);
        let closed_form = match v {
            QV::A1 | QV::A2 => {
                (!matches!(self.conic, Conic::Circle { .. })).then_some(line.cos_phi)
            }
            QV::P1 | QV::P2 => {
                // the other side line through this vertex
                let other = match (v, k) {
                    (QV::P1, 0) => lines[1],
                    (QV::P1, _) => lines[0],
                    (QV::P2, 2) => lines[3],
                    (_, _) => lines[2],
                };
                self.conic.closed_form_cos(&line, &other)
            }
        };
        VertexAngle {
            closed_form,
            oracle,
        }
    }

    /// Every (vertex, side) incidence as `cos φ` closed form and oracle.
    pub fn vertex_angles(&self) -> Vec<VertexAngle> {
        let inc = [
            (QV::A1, 0),
            (QV::P1, 0),
            (QV::P1, 1),
            (QV::A2, 1),
            (QV::A2, 2),
            (QV::P2, 2),
            (QV::P2, 3),
            (QV::A1, 3),
        ];
        inc.iter().map(|&(v, k)| self.angle(v, k)).collect()
    }

    /// Side lengths `d(A₁,P₁), d(P₁,A₂), d(A₂,P₂), d(P₂,A₁)`.
    pub fn sides(&self) -> Result<[f64; 4]> {
        Ok([
            dist_h2(&self.a1, &self.p1)?,
            dist_h2(&self.p1, &self.a2)?,
            dist_h2(&self.a2, &self.p2)?,
            dist_h2(&self.p2, &self.a1)?,
        ])
    }

    /// Signed arc `L(X, Y)` on side `k` from the angular coordinates.
    fn signed_side(&self, x: QV, y: QV, k: usize) -> f64 {
        signed_arc(self.angle(x, k).value(), self.angle(y, k).value())
    }

    /// Residual of the signed-length identity of the quadrilateral.
    ///
    /// Horocycle and hypercycle: with the same pairing
    /// `L(A₁,P₁) + L(A₂,P₁) − L(P₂,A₁) − L(P₂,A₂)`, with the crossing pairing
    /// `L(P₂,A₁) + L(P₁,A₁) − L(A₂,P₁) − L(A₂,P₂)`, arcs measured by angular
    /// coordinates. Circle: the tangent-length identity of
    /// [`circle_identity`](Self::circle_identity).
    pub fn identity_residual(&self) -> Result<f64> {
        if let Conic::Circle { .. } = self.conic {
            return Ok(self.circle_identity()?.residual);
        }
        use QV::*;
        Ok(match self.pairing {
            Pairing::Same => {
                self.signed_side(A1, P1, 0) + self.signed_side(A2, P1, 1)
                    - self.signed_side(P2, A1, 3)
                    - self.signed_side(P2, A2, 2)
            }
            Pairing::Cross => {
                self.signed_side(P2, A1, 3) + self.signed_side(P1, A1, 0)
                    - self.signed_side(A2, P1, 1)
                    - self.signed_side(A2, P2, 2)
            }
        })
    }

    /// For the circle: each side is `τ(X) + τ(Y)` when its tangency point
    /// lies between the vertices and `|τ(X) − τ(Y)|` otherwise.
    pub fn circle_identity(&self) -> Result<CircleIdentity> {
        let Conic::Circle { center, radius } = self.conic else {
            return domain("circle identity on a non-circle conic");
        };
        let verts = [self.a1, self.p1, self.a2, self.p2];
        let tau: Vec<f64> = verts
            .iter()
            .map(|p| tangent_length_circle(&center, radius, p))
            .collect::<Result<_>>()?;
        let sides = self.sides()?;
        let lines = self.side_lines();
        // coefficient of τ(start), τ(end) in side k
        let mut coef = [(1i8, 1i8); 4];
        let mut external = [false; 4];
        for k in 0..4 {
            let (x, y) = (verts[k], verts[(k + 1) % 4]);
            let t = lines[k].touch;
            let between =
                (dist_h2(&x, &t)? + dist_h2(&t, &y)? - sides[k]).abs() <= 1e-9 * sides[k].max(1.0);
            if !between {
                external[k] = true;
                coef[k] = if tau[k] > tau[(k + 1) % 4] {
                    (1, -1)
                } else {
                    (-1, 1)
                };
            }
        }
        // propagate κ so each shared τ cancels
        let mut kappa = [1i8; 4];
        for k in 0..3 {
            kappa[k + 1] = -kappa[k] * coef[k].1 * coef[k + 1].0;
        }
        let consistent = kappa[3] * coef[3].1 + kappa[0] * coef[0].0 == 0;
        if !consistent {
            return Err(Error::Degenerate(
                "tangent-length pattern admits no balancing signs".into(),
            ));
        }
        let residual = (0..4).map(|k| f64::from(kappa[k]) * sides[k]).sum();
        Ok(CircleIdentity {
            tau: [tau[0], tau[1], tau[2], tau[3]],
            external,
            kappa,
            residual,
        })
    }
}

/// Tangent-length bookkeeping of a circle-tangential quadrilateral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleIdentity {
    /// `τ(A₁), τ(P₁), τ(A₂), τ(P₂)`.
    pub tau: [f64; 4],
    /// Sides (`A₁P₁, P₁A₂, A₂P₂, P₂A₁`) whose tangency point lies outside.
    pub external: [bool; 4],
    pub kappa: [i8; 4],
    pub residual: f64,
}

impl CircleIdentity {
    /// `true` when the circle is inscribed (all sides are sums).
    pub fn inscribed(&self) -> bool {
        self.external.iter().all(|e| !e)
    }

    /// The externally tangent pattern: two opposite sides are differences.
    pub fn external_pattern(&self) -> bool {
        self.external == [true, false, true, false] || self.external == [false, true, false, true]
    }
}

/// Flat configuration of a type-3 octahedron: the `B`-quadrilateral from one
/// conic and the `C`-quadrilateral from a second conic of the same family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatOctahedronConfig {
    pub a1: PointH2,
    pub a2: PointH2,
    pub quad_b: TangentialQuad,
    pub quad_c: TangentialQuad,
}

impl FlatOctahedronConfig {
    pub fn b1(&self) -> PointH2 {
        self.quad_b.p1
    }
    pub fn b2(&self) -> PointH2 {
        self.quad_b.p2
    }
    pub fn c1(&self) -> PointH2 {
        self.quad_c.p1
    }
    pub fn c2(&self) -> PointH2 {
        self.quad_c.p2
    }

    /// `[N, A, B, C, D, S] = [C₁, A₁, B₁, A₂, B₂, C₂]`.
    pub fn octahedron_points(&self) -> [PointH2; 6] {
        [self.c1(), self.a1, self.b1(), self.a2, self.b2(), self.c2()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingChoice {
    Same,
    Cross,
    /// Crossing when its intersections exist, otherwise same-side.
    Auto,
}

impl PairingChoice {
    fn build(self, conic: Conic, a1: &PointH2, a2: &PointH2) -> Result<TangentialQuad> {
        match self {
            PairingChoice::Same => TangentialQuad::new(conic, a1, a2, Pairing::Same),
            PairingChoice::Cross => TangentialQuad::new(conic, a1, a2, Pairing::Cross),
            PairingChoice::Auto => TangentialQuad::new(conic, a1, a2, Pairing::Cross)
                .or_else(|_| TangentialQuad::new(conic, a1, a2, Pairing::Same)),
        }
    }
}

/// Pairings of the `B`- and `C`-quadrilaterals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairings {
    pub b: PairingChoice,
    pub c: PairingChoice,
}

impl Default for Pairings {
    fn default() -> Self {
        Pairings {
            b: PairingChoice::Same,
            c: PairingChoice::Auto,
        }
    }
}

fn build_config(
    b_conic: Conic,
    c_conic: Conic,
    a1: &PointH2,
    a2: &PointH2,
    pairings: Pairings,
) -> Result<FlatOctahedronConfig> {
    let quad_b = pairings.b.build(b_conic, a1, a2)?;
    let quad_c = pairings.c.build(c_conic, a1, a2)?;
    let cfg = FlatOctahedronConfig {
        a1: *a1,
        a2: *a2,
        quad_b,
        quad_c,
    };
    validate_config(&cfg)?;
    Ok(cfg)
}

fn validate_config(cfg: &FlatOctahedronConfig) -> Result<()> {
    let pts = cfg.octahedron_points();
    let names = ["C1", "A1", "B1", "A2", "B2", "C2"];
    for i in 0..6 {
        for j in i + 1..6 {
            if dist_h2(&pts[i], &pts[j])? <= 1e-9 {
                return Err(Error::Degenerate(format!(
                    "vertices {} and {} coincide",
                    names[i], names[j]
                )));
            }
        }
    }
    let p3: Vec<PointH3> = pts.iter().map(|p| p.to_h3()).collect();
    // faces N-P_j-P_{j+1} and S-P_j-P_{j+1} with N = 0, S = 5, equator 1..=4
    for pole in [0, 5] {
        for j in 0..4 {
            let (x, y) = (1 + j, 1 + (j + 1) % 4);
            if collinearity_measure(&p3[pole], &p3[x], &p3[y]) < EPS_DEGENERATE {
                return Err(Error::Degenerate(format!(
                    "face {}-{}-{} is collinear",
                    names[pole], names[x], names[y]
                )));
            }
        }
    }
    Ok(())
}

/// Type 3 tangent to the horocycles `z = r` (B) and `z = r2` (C).
pub fn flat_config_horocycle(
    r: f64,
    a1: &PointH2,
    a2: &PointH2,
    r2: f64,
    pairings: Pairings,
) -> Result<FlatOctahedronConfig> {
    for (name, p) in [("A1", a1), ("A2", a2)] {
        p.validate()?;
        for h in [r, r2] {
            if p.z >= h {
                return Err(Error::Degenerate(format!(
                    "{name} at height {} is not below the horocycle z = {h}",
                    p.z
                )));
            }
        }
    }
    if (r - r2).abs() <= 1e-12 * r {
        return Err(Error::Degenerate(
            "both quadrilaterals use the same horocycle".into(),
        ));
    }
    build_config(
        Conic::Horocycle { height: r },
        Conic::Horocycle { height: r2 },
        a1,
        a2,
        pairings,
    )
}

/// Type 3 tangent to the hypercycles `z = ρ tan α` (B) and `z = ρ tan α₂`
/// (C), with `A₁`, `A₂` given by the centers of their tangents to the first.
/// Angles in `(π/2, π)` are handled in the mirror frame `ρ → −ρ`.
pub fn flat_config_hypercycle(
    alpha: f64,
    centers: [f64; 4],
    alpha2: f64,
    pairings: Pairings,
) -> Result<FlatOctahedronConfig> {
    let (alpha, alpha2, centers) = if alpha > FRAC_PI_2 && alpha < std::f64::consts::PI {
        let [l1, r1, l2, r2] = centers;
        (
            std::f64::consts::PI - alpha,
            std::f64::consts::PI - alpha2,
            [-r1, -l1, -r2, -l2],
        )
    } else {
        (alpha, alpha2, centers)
    };
    for a in [alpha, alpha2] {
        if !(a > 0.0 && a < FRAC_PI_2) {
            return domain(format!("hypercycle angle {a} must lie in (0, pi/2)"));
        }
    }
    let [l1, r1, l2, r2] = centers;
    if !(0.0 < l1 && l1 < r1 && 0.0 < l2 && l2 < r2) {
        return domain(format!("centers must satisfy 0 < l < r, got {centers:?}"));
    }
    for (x, y) in [(l1, l2), (r1, r2), (l1, r2), (r1, l2)] {
        if (x - y).abs() <= 1e-12 * x.max(y) {
            return Err(Error::Degenerate(format!(
                "tangent geodesics with center {x} coincide"
            )));
        }
    }
    if (alpha - alpha2).abs() <= 1e-12 {
        return Err(Error::Degenerate(
            "both quadrilaterals use the same hypercycle".into(),
        ));
    }
    let a1 = hypercycle_point_from_centers(alpha, l1, r1)?;
    let a2 = hypercycle_point_from_centers(alpha, l2, r2)?;
    let cfg = build_config(
        Conic::Hypercycle { alpha },
        Conic::Hypercycle { alpha: alpha2 },
        &a1,
        &a2,
        pairings,
    )?;
    for angle in cfg
        .quad_b
        .vertex_angles()
        .iter()
        .chain(&cfg.quad_c.vertex_angles())
    {
        if !(angle.value().abs() < 1.0) {
            return domain(format!(
                "vertex angle cosine {} outside (-1, 1)",
                angle.value()
            ));
        }
    }
    Ok(cfg)
}

/// Type 3 tangent to the concentric circles `(m, r)` (B) and `(m, r2)` (C).
pub fn flat_config_circle(
    m: &PointH2,
    r: f64,
    r2: f64,
    a1: &PointH2,
    a2: &PointH2,
    pairings: Pairings,
) -> Result<FlatOctahedronConfig> {
    if (r - r2).abs() <= 1e-12 * r {
        return Err(Error::Degenerate(
            "both quadrilaterals use the same circle".into(),
        ));
    }
    build_config(
        Conic::Circle {
            center: *m,
            radius: r,
        },
        Conic::Circle {
            center: *m,
            radius: r2,
        },
        a1,
        a2,
        pairings,
    )
}

/// The octahedron of a flat configuration with poles `C₁`, `C₂` and equator
/// `A₁ B₁ A₂ B₂`, embedded in the plane `y = 0`.
pub fn lift_type3(cfg: &FlatOctahedronConfig) -> Result<Octahedron> {
    validate_config(cfg)?;
    let kind = match cfg.quad_b.conic {
        Conic::Circle { .. } => OctahedronKind::Type3Circle,
        Conic::Horocycle { .. } => OctahedronKind::Type3Horocycle,
        Conic::Hypercycle { .. } => OctahedronKind::Type3Hypercycle,
    };
    let p = cfg.octahedron_points().map(|q| q.to_h3());
    Octahedron::from_vertices(kind, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexibility::certify_octahedron;

    fn p3(x: f64, y: f64, z: f64) -> PointH3 {
        PointH3 { x, y, z }
    }

    /// Point reflection through (0,0,1) inside the plane y = 0.
    fn opposite(p: PointH3) -> PointH3 {
        let r2 = p.x * p.x + p.z * p.z;
        p3(-p.x / r2, 0.0, p.z / r2)
    }

    fn parallelogram() -> QuadrilateralH3 {
        let a = p3(0.8, 0.0, 0.9);
        let b = p3(-0.3, 0.0, 1.6);
        QuadrilateralH3 {
            a,
            b,
            c: opposite(a),
            d: opposite(b),
        }
    }

    #[test]
    fn planar_parallelogram_type1() {
        let oct = construct_type1(&parallelogram(), &p3(0.3, 0.7, 1.2)).unwrap();
        let certs = certify_octahedron(&oct.spec, 1e-9).unwrap();
        assert!(certs.iter().all(|c| !c.is_empty()));
    }

    #[test]
    fn type1_rejects_asymmetric_quad() {
        let mut q = parallelogram();
        q.d.z *= 1.1;
        assert!(matches!(
            construct_type1(&q, &p3(0.3, 0.7, 1.2)),
            Err(Error::SymmetryViolation(_))
        ));
    }

    #[test]
    fn type1_rejects_n_on_axis() {
        // the axis of the planar half-turn is the unit semicircle in x = 0
        let n = p3(0.0, 0.6, 0.8);
        let err = construct_type1(&parallelogram(), &n).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)), "{err:?}");
    }

    fn kite() -> QuadrilateralH3 {
        // mirror y = 0: A, C mirror images; B, D in the mirror
        QuadrilateralH3 {
            a: p3(0.2, 0.9, 1.1),
            b: p3(1.0, 0.0, 0.8),
            c: p3(0.2, -0.9, 1.1),
            d: p3(-0.9, 0.0, 1.3),
        }
    }

    #[test]
    fn kite_type2() {
        let q = kite();
        let r = type2_symmetry(&q).unwrap();
        assert!(dist_h3(&r.apply(&q.a).unwrap(), &q.c).unwrap() < 1e-10);
        assert!(dist_h3(&r.apply(&q.b).unwrap(), &q.b).unwrap() < 1e-10);
        let oct = construct_type2(&q, &p3(0.4, 0.5, 2.0)).unwrap();
        let certs = certify_octahedron(&oct.spec, 1e-9).unwrap();
        assert!(certs.iter().all(|c| !c.is_empty()));
        assert!(construct_type2(&q, &p3(0.4, 0.0, 2.0)).is_err());
    }

    #[test]
    fn circle_quad_arithmetic() {
        let q = circle_quad_identity(0.3, 0.5, 0.7, 0.2, true).unwrap();
        for (s, e) in q.sides.iter().zip([0.8, 1.2, 0.9, 0.5]) {
            assert!((s - e).abs() < 1e-15);
        }
        assert!(q.signed_sum.abs() < 1e-12);
        let q = circle_quad_identity(0.9, 0.2, 0.8, 0.3, false).unwrap();
        for (s, e) in q.sides.iter().zip([0.7, 1.0, 0.5, 1.2]) {
            assert!((s - e).abs() < 1e-15);
        }
        assert!(q.signed_sum.abs() < 1e-12);
        let q = circle_quad_identity(0.4, 0.4, 0.4, 0.4, true).unwrap();
        assert!(q.sides.iter().all(|s| (s - 0.8).abs() < 1e-15));
        assert!(circle_quad_identity(0.2, 0.9, 0.8, 0.3, false).is_err());
    }

    #[test]
    fn intersection_examples() {
        let g1 = GeodesicH2::Semicircle {
            center: -0.8,
            radius: 1.0,
        };
        let g2 = GeodesicH2::Semicircle {
            center: 0.8,
            radius: 1.0,
        };
        let p = intersect_geodesics(&g1, &g2).unwrap();
        assert!(p.rho.abs() < 1e-15 && (p.z - 0.6).abs() < 1e-15);
        assert!(intersect_geodesics(&g1, &g1).is_err());
        let v = GeodesicH2::Vertical { rho: -0.8 };
        let p = intersect_geodesics(&g1, &v).unwrap();
        assert!((p.rho + 0.8).abs() < 1e-15 && (p.z - 1.0).abs() < 1e-15);
        let far = GeodesicH2::Semicircle {
            center: 5.0,
            radius: 1.0,
        };
        assert!(matches!(
            intersect_geodesics(&g1, &far),
            Err(Error::NoIntersection(_))
        ));
    }

    #[test]
    fn horocycle_example_config() {
        let a1 = PointH2 { rho: -0.5, z: 0.6 };
        let a2 = PointH2 { rho: 0.7, z: 0.5 };
        let cfg = flat_config_horocycle(1.0, &a1, &a2, 0.8, Pairings::default()).unwrap();
        assert!(cfg.quad_b.identity_residual().unwrap().abs() < 1e-12);
        assert!(cfg.quad_c.identity_residual().unwrap().abs() < 1e-12);
        for a in cfg
            .quad_b
            .vertex_angles()
            .iter()
            .chain(&cfg.quad_c.vertex_angles())
        {
            assert!((a.closed_form.unwrap() - a.oracle).abs() < 1e-12);
        }
        let oct = lift_type3(&cfg).unwrap();
        assert_eq!(oct.kind, OctahedronKind::Type3Horocycle);
        let certs = certify_octahedron(&oct.spec, 1e-9).unwrap();
        assert!(certs.iter().all(|c| !c.is_empty()));
        let inside = PointH2 { rho: 0.0, z: 1.2 };
        assert!(flat_config_horocycle(1.0, &inside, &a2, 0.8, Pairings::default()).is_err());
    }

    #[test]
    fn horocycle_mirror_symmetric() {
        let a1 = PointH2 { rho: -0.6, z: 0.4 };
        let a2 = PointH2 { rho: 0.6, z: 0.4 };
        let cfg = flat_config_horocycle(1.0, &a1, &a2, 0.7, Pairings::default()).unwrap();
        // the mirror ρ → −ρ swaps B1 and B2
        assert!(
            (cfg.b1().rho + cfg.b2().rho).abs() < 1e-14 && (cfg.b1().z - cfg.b2().z).abs() < 1e-14
        );
        let s = cfg.quad_b.sides().unwrap();
        assert!((s[0] - s[2]).abs() < 1e-12 && (s[1] - s[3]).abs() < 1e-12);
    }

    #[test]
    fn hypercycle_example_config() {
        let alpha = std::f64::consts::FRAC_PI_4;
        let cfg =
            flat_config_hypercycle(alpha, [1.0, 2.0, 1.5, 3.0], 1.2, Pairings::default()).unwrap();
        let a = hypercycle_cos_phi(alpha, 1.0, 2.0);
        assert!((cfg.quad_b.lines_a1.left.cos_phi - a).abs() < 1e-12);
        assert!(cfg.quad_b.identity_residual().unwrap().abs() < 1e-10);
        assert!(cfg.quad_c.identity_residual().unwrap().abs() < 1e-10);
        for a in cfg
            .quad_b
            .vertex_angles()
            .iter()
            .chain(&cfg.quad_c.vertex_angles())
        {
            assert!((a.closed_form.unwrap() - a.oracle).abs() < 1e-12);
        }
        assert!(
            flat_config_hypercycle(alpha, [1.0, 2.0, 1.0, 3.0], 1.2, Pairings::default()).is_err()
        );
        // scaling all centers keeps every angle and side
        let scaled =
            flat_config_hypercycle(alpha, [2.5, 5.0, 3.75, 7.5], 1.2, Pairings::default()).unwrap();
        let (s0, s1) = (cfg.quad_b.sides().unwrap(), scaled.quad_b.sides().unwrap());
        for k in 0..4 {
            assert!((s0[k] - s1[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_config_identities() {
        let m = PointH2 { rho: 0.0, z: 1.0 };
        let at = |d: f64, psi: f64| {
            let v = nalgebra::Vector3::new(d.cosh(), d.sinh() * psi.cos(), d.sinh() * psi.sin());
            PointH2::from_lift(&v).unwrap()
        };
        let inscribed = Pairings {
            b: PairingChoice::Cross,
            c: PairingChoice::Auto,
        };
        let cfg =
            flat_config_circle(&m, 0.6, 0.3, &at(1.4, 0.3), &at(1.1, 3.5), inscribed).unwrap();
        assert!(cfg.quad_b.circle_identity().unwrap().inscribed());
        let ext = flat_config_circle(
            &m,
            0.6,
            0.3,
            &at(1.4, 0.3),
            &at(1.1, 1.0),
            Pairings::default(),
        )
        .unwrap();
        let id = ext.quad_b.circle_identity().unwrap();
        assert!(id.external_pattern() && id.residual.abs() < 1e-10);
        assert!(lift_type3(&ext).is_ok());
        let id = cfg.quad_b.circle_identity().unwrap();
        assert!(id.residual.abs() < 1e-10);
        let oct = lift_type3(&cfg).unwrap();
        let certs = certify_octahedron(&oct.spec, 1e-9).unwrap();
        assert!(certs.iter().all(|c| !c.is_empty()));
    }

    #[test]
    fn single_conic_is_rejected() {
        let a1 = PointH2 { rho: -0.5, z: 0.6 };
        let a2 = PointH2 { rho: 0.7, z: 0.5 };
        assert!(flat_config_horocycle(
            1.0,
            &a1,
            &a2,
            1.0,
            Pairings {
                b: PairingChoice::Same,
                c: PairingChoice::Cross
            }
        )
        .is_err());
    }
}
