//! Upper half-plane / half-space, hyperboloid and Klein models of the
//! hyperbolic plane and space (curvature −1).
//!
//! Conversions fix (0,0,1) ↔ (1,0,0,0) ↔ Klein origin, with the z-axis of the
//! half-space sent to the x1-axis of the hyperboloid.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Slack for algebraic identities evaluated in double precision.
pub const EPS_IDENTITY: f64 = 1e-12;
/// Slack for composed geometric checks.
pub const EPS_GEOMETRIC: f64 = 1e-10;
/// Normalized-determinant threshold for collinearity / coplanarity.
pub const EPS_DEGENERATE: f64 = 1e-9;

/// A point `(rho, z)` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointH2 {
    pub rho: f64,
    pub z: f64,
}

/// A point `(x, y, z)` of the upper half-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointH3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A point on the upper sheet of the hyperboloid `x0² − x1² − x2² − x3² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointHyperboloid(pub Vector4<f64>);

impl PointH2 {
    pub fn new(rho: f64, z: f64) -> Result<Self> {
        let p = PointH2 { rho, z };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.z.is_finite()) || self.z <= 0.0 {
            return domain(format!(
                "point ({}, {}) is not in the upper half-plane",
                self.rho, self.z
            ));
        }
        Ok(())
    }

    /// Embeds the half-plane as the vertical plane `y = 0` of the half-space.
    pub fn to_h3(self) -> PointH3 {
        PointH3 {
            x: self.rho,
            y: 0.0,
            z: self.z,
        }
    }

    /// Lift to the 2-dimensional hyperboloid `(X0, X1, X2)`.
    pub fn lift(&self) -> Vector3<f64> {
        let r2 = self.rho * self.rho + self.z * self.z;
        Vector3::new(
            (1.0 + r2) / (2.0 * self.z),
            (r2 - 1.0) / (2.0 * self.z),
            self.rho / self.z,
        )
    }

    pub fn from_lift(v: &Vector3<f64>) -> Result<Self> {
        let n = minkowski_dot3(v, v);
        if !(n > 0.0) || v[0] <= 0.0 {
            return domain("vector is not on the upper sheet");
        }
        let v = v / n.sqrt();
        let z = 1.0 / (v[0] - v[1]);
        PointH2::new(v[2] * z, z)
    }
}

impl PointH3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let p = PointH3 { x, y, z };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.y.is_finite() && self.z.is_finite()) || self.z <= 0.0 {
            return domain(format!(
                "point ({}, {}, {}) is not in the upper half-space",
                self.x, self.y, self.z
            ));
        }
        Ok(())
    }

    pub fn to_hyperboloid(&self) -> PointHyperboloid {
        let r2 = self.x * self.x + self.y * self.y + self.z * self.z;
        PointHyperboloid(Vector4::new(
            (1.0 + r2) / (2.0 * self.z),
            (r2 - 1.0) / (2.0 * self.z),
            self.x / self.z,
            self.y / self.z,
        ))
    }

    pub fn lift(&self) -> Vector4<f64> {
        self.to_hyperboloid().0
    }

    fn euclid_dist2(&self, q: &PointH3) -> f64 {
        let (dx, dy, dz) = (self.x - q.x, self.y - q.y, self.z - q.z);
        dx * dx + dy * dy + dz * dz
    }
}

impl PointHyperboloid {
    /// Rescales an arbitrary timelike future vector onto the hyperboloid.
    pub fn normalized(v: Vector4<f64>) -> Result<Self> {
        let n = minkowski_dot(&v, &v);
        if !(n > 0.0) || v[0] <= 0.0 {
            return domain("vector is not timelike future-pointing");
        }
        Ok(PointHyperboloid(v / n.sqrt()))
    }

    pub fn to_h3(&self) -> Result<PointH3> {
        let v = &self.0;
        let z = 1.0 / (v[0] - v[1]);
        PointH3::new(v[2] * z, v[3] * z, z)
    }
}

/// Minkowski form with signature (+,−,−,−).
pub fn minkowski_dot(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Minkowski form with signature (+,−,−).
pub fn minkowski_dot3(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
}

fn j4() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// Hyperbolic distance in the half-space, `2 asinh(|p−q| / (2√(z_p z_q)))`.
pub fn dist_h3(p: &PointH3, q: &PointH3) -> Result<f64> {
    p.validate()?;
    q.validate()?;
    let s = p.euclid_dist2(q).sqrt() / (2.0 * (p.z * q.z).sqrt());
    Ok(2.0 * s.asinh())
}

/// Hyperbolic distance in the half-plane.
pub fn dist_h2(a: &PointH2, b: &PointH2) -> Result<f64> {
    dist_h3(&a.to_h3(), &b.to_h3())
}

/// `cosh` of the half-plane distance: `((ρB−ρA)² + zA² + zB²) / (2 zA zB)`.
pub fn cosh_dist_h2(a: &PointH2, b: &PointH2) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    let dr = b.rho - a.rho;
    Ok((dr * dr + a.z * a.z + b.z * b.z) / (2.0 * a.z * b.z))
}

/// Distance between two points on one vertical line.
pub fn dist_vertical(za: f64, zb: f64) -> Result<f64> {
    if !(za > 0.0 && zb > 0.0) || !za.is_finite() || !zb.is_finite() {
        return domain(format!("heights must be positive, got {za}, {zb}"));
    }
    Ok((zb / za).ln().abs())
}

/// Length of the arc between angular coordinates `phi_a ≤ phi_b` on a
/// semicircular geodesic.
pub fn arc_length_on_geodesic(phi_a: f64, phi_b: f64) -> Result<f64> {
    let open = |p: f64| p > 0.0 && p < std::f64::consts::PI;
    if !open(phi_a) || !open(phi_b) {
        return domain(format!("angles must lie in (0, pi), got {phi_a}, {phi_b}"));
    }
    if phi_a > phi_b {
        return domain(format!("phi_a = {phi_a} exceeds phi_b = {phi_b}"));
    }
    Ok(signed_arc(phi_a.cos(), phi_b.cos()).max(0.0))
}

/// Signed arc length from the point with `cos φ = cos_a` to the point with
/// `cos φ = cos_b` on a semicircle, positive when moving towards larger φ.
pub fn signed_arc(cos_a: f64, cos_b: f64) -> f64 {
    cos_a.atanh() - cos_b.atanh()
}

/// A geodesic of the half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeodesicH2 {
    Semicircle { center: f64, radius: f64 },
    Vertical { rho: f64 },
}

impl GeodesicH2 {
    pub fn semicircle(center: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return domain(format!("semicircle radius must be positive, got {radius}"));
        }
        Ok(GeodesicH2::Semicircle { center, radius })
    }

    /// The geodesic through two distinct points.
    pub fn through(p: &PointH2, q: &PointH2) -> Result<Self> {
        p.validate()?;
        q.validate()?;
        let dr = q.rho - p.rho;
        let scale = 1.0 + p.rho.abs().max(q.rho.abs());
        if dr.abs() <= 1e-14 * scale {
            if (p.z - q.z).abs() <= 1e-14 * p.z.max(q.z) {
                return Err(Error::Degenerate(
                    "geodesic through coincident points".into(),
                ));
            }
            return Ok(GeodesicH2::Vertical {
                rho: 0.5 * (p.rho + q.rho),
            });
        }
        let c = ((q.rho * q.rho + q.z * q.z) - (p.rho * p.rho + p.z * p.z)) / (2.0 * dr);
        let radius = (p.rho - c).hypot(p.z);
        GeodesicH2::semicircle(c, radius)
    }

    pub fn contains(&self, p: &PointH2, tol: f64) -> bool {
        match *self {
            GeodesicH2::Semicircle { center, radius } => {
                ((p.rho - center).hypot(p.z) - radius).abs() <= tol * radius.max(1.0)
            }
            GeodesicH2::Vertical { rho } => (p.rho - rho).abs() <= tol * rho.abs().max(1.0),
        }
    }

    /// Angular coordinate of `p` on a semicircle, measured from the positive
    /// ρ direction at the center.
    pub fn angle_of(&self, p: &PointH2) -> Option<f64> {
        match *self {
            GeodesicH2::Semicircle { center, .. } => Some(p.z.atan2(p.rho - center)),
            GeodesicH2::Vertical { .. } => None,
        }
    }

    pub fn cos_angle_of(&self, p: &PointH2) -> Option<f64> {
        match *self {
            GeodesicH2::Semicircle { center, .. } => {
                let dr = p.rho - center;
                Some(dr / dr.hypot(p.z))
            }
            GeodesicH2::Vertical { .. } => None,
        }
    }

    pub fn point_at(&self, phi: f64) -> Option<PointH2> {
        match *self {
            GeodesicH2::Semicircle { center, radius } => Some(PointH2 {
                rho: center + radius * phi.cos(),
                z: radius * phi.sin(),
            }),
            GeodesicH2::Vertical { .. } => None,
        }
    }
}

/// One tangent geodesic through a point `T`, with `cos φ` of `T` on it and
/// the point where it touches the conic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentLine {
    pub geodesic: GeodesicH2,
    pub cos_phi: f64,
    pub touch: PointH2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentPair {
    pub left: TangentLine,
    pub right: TangentLine,
}

/// The two geodesics through `t` tangent to the horocycle `z = r`.
pub fn tangent_geodesics_to_horocycle(r: f64, t: &PointH2) -> Result<TangentPair> {
    t.validate()?;
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("horocycle height must be positive, got {r}"));
    }
    if t.z >= r {
        return Err(Error::Degenerate(format!(
            "point at height {} is not below the horocycle z = {r}",
            t.z
        )));
    }
    let s = ((r - t.z) * (r + t.z)).sqrt();
    let mk = |center: f64, cos_phi: f64| TangentLine {
        geodesic: GeodesicH2::Semicircle { center, radius: r },
        cos_phi,
        touch: PointH2 { rho: center, z: r },
    };
    Ok(TangentPair {
        left: mk(t.rho - s, s / r),
        right: mk(t.rho + s, -s / r),
    })
}

/// The two geodesics through `t` tangent to the hypercycle `z = ρ tan α`.
pub fn tangent_geodesics_to_hypercycle(alpha: f64, t: &PointH2) -> Result<TangentPair> {
    t.validate()?;
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2) {
        return domain(format!("alpha must lie in (0, pi/2), got {alpha}"));
    }
    let (sa, ca) = alpha.sin_cos();
    let c2 = ca * ca;
    // centers c solve c² cos²α − 2 ρ_T c + (ρ_T² + z_T²) = 0
    let disc = t.rho * t.rho - c2 * (t.rho * t.rho + t.z * t.z);
    if !(t.rho > 0.0) || t.z >= t.rho * alpha.tan() || disc <= 0.0 {
        return Err(Error::Degenerate(format!(
            "point ({}, {}) admits no two tangents to the hypercycle of angle {alpha}",
            t.rho, t.z
        )));
    }
    let sq = disc.sqrt();
    let c_r = (t.rho + sq) / c2;
    // product of roots avoids cancellation in the smaller one
    let c_l = (t.rho * t.rho + t.z * t.z) / (c2 * c_r);
    let mk = |center: f64, other: f64| TangentLine {
        geodesic: GeodesicH2::Semicircle {
            center,
            radius: center * sa,
        },
        cos_phi: hypercycle_cos_phi(alpha, center, other),
        touch: PointH2 {
            rho: center * c2,
            z: center * ca * sa,
        },
    };
    Ok(TangentPair {
        left: mk(c_l, c_r),
        right: mk(c_r, c_l),
    })
}

/// `cos φ` on the tangent of center `own` at the point where it meets the
/// tangent of center `other` (both tangent to `z = ρ tan α`).
pub fn hypercycle_cos_phi(alpha: f64, own: f64, other: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    (other / own) * (ca * ca / (2.0 * sa)) - 1.0 / (2.0 * sa) - sa / 2.0
}

/// The point where the hypercycle tangents with centers `c_l < c_r` meet.
pub fn hypercycle_point_from_centers(alpha: f64, c_l: f64, c_r: f64) -> Result<PointH2> {
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2) {
        return domain(format!("alpha must lie in (0, pi/2), got {alpha}"));
    }
    if !(c_l > 0.0 && c_r > 0.0) {
        return domain("tangent centers must be positive");
    }
    if (c_r - c_l).abs() <= 1e-14 * c_r {
        return Err(Error::Degenerate("coincident tangent geodesics".into()));
    }
    let sa = alpha.sin();
    let c = hypercycle_cos_phi(alpha, c_l, c_r);
    if !(c.abs() < 1.0) {
        return Err(Error::NoIntersection(format!(
            "tangents with centers {c_l}, {c_r} do not meet (cos phi = {c})"
        )));
    }
    let r = c_l * sa;
    PointH2::new(c_l + r * c, r * (1.0 - c * c).sqrt())
}

/// Common tangent length from `x` to the circle of center `m` and radius `r`.
pub fn tangent_length_circle(m: &PointH2, r: f64, x: &PointH2) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("circle radius must be positive, got {r}"));
    }
    let d = dist_h2(x, m)?;
    if d < r {
        return domain(format!(
            "point at distance {d} lies inside the circle of radius {r}"
        ));
    }
    Ok((d.cosh() / r.cosh()).max(1.0).acosh())
}

/// The two geodesics through `x` tangent to the circle of center `m` and
/// radius `r`. Left and right are taken facing `m`.
pub fn tangent_geodesics_to_circle(m: &PointH2, r: f64, x: &PointH2) -> Result<TangentPair> {
    m.validate()?;
    x.validate()?;
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("circle radius must be positive, got {r}"));
    }
    let d = dist_h2(x, m)?;
    if d <= r * (1.0 + 1e-12) {
        return Err(Error::Degenerate(format!(
            "point at distance {d} is not outside the circle of radius {r}"
        )));
    }
    // unit normals n of the tangents: ⟨n,X⟩ = 0, ⟨n,M⟩ = ±sinh r, written in
    // the orthonormal frame (toward M, normal to the plane of X and M)
    let xl = x.lift();
    let ml = m.lift();
    let u = minkowski_dot3(&xl, &ml);
    let e1 = (ml - xl * u) / d.sinh();
    let jc = xl.cross(&ml);
    let mut e2 = Vector3::new(jc[0], -jc[1], -jc[2]);
    e2 -= xl * minkowski_dot3(&e2, &xl);
    e2 /= (-minkowski_dot3(&e2, &e2)).sqrt();
    let al = r.sinh() / d.sinh();
    let be = ((1.0 - al) * (1.0 + al)).sqrt();
    let side = |p: &PointH2| {
        Matrix3::from_rows(&[xl.transpose(), ml.transpose(), p.lift().transpose()]).determinant()
    };
    let mk = |n: Vector3<f64>| -> Result<TangentLine> {
        // foot of the perpendicular from M
        let touch = PointH2::from_lift(&(ml + n * minkowski_dot3(&ml, &n)))?;
        let den = n[0] - n[1];
        if den.abs() <= 1e-14 * n.norm() {
            return Err(Error::Degenerate(
                "tangent geodesic is vertical; angular coordinates undefined".into(),
            ));
        }
        let center = n[2] / den;
        let geodesic = GeodesicH2::semicircle(center, (touch.rho - center).hypot(touch.z))?;
        let cos_phi = geodesic.cos_angle_of(x).expect("semicircle");
        Ok(TangentLine {
            geodesic,
            cos_phi,
            touch,
        })
    };
    let mut lines = [mk(e1 * al + e2 * be)?, mk(e1 * al - e2 * be)?];
    if side(&lines[0].touch) > 0.0 {
        lines.swap(0, 1);
    }
    let [left, right] = lines;
    Ok(TangentPair { left, right })
}

/// An isometry of H³ acting linearly on the hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryH3 {
    pub m: Matrix4<f64>,
}

impl IsometryH3 {
    pub fn identity() -> Self {
        IsometryH3 {
            m: Matrix4::identity(),
        }
    }

    pub fn apply_hyperboloid(&self, v: &Vector4<f64>) -> Vector4<f64> {
        self.m * v
    }

    pub fn apply(&self, p: &PointH3) -> Result<PointH3> {
        PointHyperboloid::normalized(self.m * p.lift())?.to_h3()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &IsometryH3) -> IsometryH3 {
        IsometryH3 {
            m: self.m * other.m,
        }
    }

    pub fn inverse(&self) -> IsometryH3 {
        let j = j4();
        IsometryH3 {
            m: j * self.m.transpose() * j,
        }
    }

    /// Pulls a nearly Lorentz matrix back onto the group by Newton–Schulz
    /// steps `M ← M (3I − J Mᵀ J M) / 2`.
    pub fn polished(self) -> IsometryH3 {
        let j = j4();
        let mut m = self.m;
        for _ in 0..3 {
            let e = j * m.transpose() * j * m;
            m = m * (Matrix4::identity() * 3.0 - e) * 0.5;
        }
        IsometryH3 { m }
    }

    /// Maximum entry of `M J Mᵀ − J`.
    pub fn form_error(&self) -> f64 {
        let j = j4();
        (self.m * j * self.m.transpose() - j).abs().max()
    }
}

fn proj_onto(v: &Vector4<f64>) -> Matrix4<f64> {
    let jv = Vector4::new(v[0], -v[1], -v[2], -v[3]);
    v * jv.transpose() / minkowski_dot(v, v)
}

/// Half-turn about the geodesic spanned by the timelike `p` and any second
/// vector `w` of the same Minkowski 2-plane.
pub(crate) fn half_turn_about_span(p: &Vector4<f64>, w: &Vector4<f64>) -> Result<IsometryH3> {
    let pn = p / minkowski_dot(p, p).sqrt();
    let u = w - pn * minkowski_dot(w, &pn);
    let uu = minkowski_dot(&u, &u);
    if !(uu < -1e-24 * w.norm_squared().max(1.0)) {
        return Err(Error::Degenerate("axis of half-turn is not a line".into()));
    }
    let proj = proj_onto(&pn) + proj_onto(&u);
    Ok(IsometryH3 {
        m: proj * 2.0 - Matrix4::identity(),
    }
    .polished())
}

/// The half-turn about the geodesic through `p` and `q`.
pub fn half_turn_about_line(p: &PointH3, q: &PointH3) -> Result<IsometryH3> {
    p.validate()?;
    q.validate()?;
    if dist_h3(p, q)? <= 1e-12 {
        return Err(Error::Degenerate(
            "half-turn axis through coincident points".into(),
        ));
    }
    half_turn_about_span(&p.lift(), &q.lift())
}

/// Generalized cross product: the vector `c` with `det[x; a; b; c3] = c·x`.
pub(crate) fn cross4(a: &Vector4<f64>, b: &Vector4<f64>, c: &Vector4<f64>) -> Vector4<f64> {
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
        Matrix3::from_fn(|r, s| {
            let row = [a, b, c][r];
            row[cols[s]]
        })
        .determinant()
    };
    Vector4::new(minor(0), -minor(1), minor(2), -minor(3))
}

/// Ratio of the smallest to the largest singular value of the matrix whose
/// columns are the Euclidean-normalized lifts of `pts`.
fn lift_rank_ratio(pts: &[&PointH3]) -> f64 {
    let cols: Vec<Vector4<f64>> = pts.iter().map(|p| p.lift().normalize()).collect();
    let m = nalgebra::DMatrix::from_fn(4, cols.len(), |r, c| cols[c][r]);
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0.0;
    }
    sv.min() / max
}

/// Zero iff the three points lie on one geodesic.
pub fn collinearity_measure(p1: &PointH3, p2: &PointH3, p3: &PointH3) -> f64 {
    lift_rank_ratio(&[p1, p2, p3])
}

/// Zero iff the four points lie in one plane.
pub fn coplanarity_measure(p: [&PointH3; 4]) -> f64 {
    lift_rank_ratio(&p)
}

/// Reflection across a spacelike normal vector's orthogonal hyperplane.
pub(crate) fn reflection_with_normal(n: &Vector4<f64>) -> Result<IsometryH3> {
    let nn = minkowski_dot(n, n);
    if !(nn < 0.0) {
        return Err(Error::Degenerate("mirror normal is not spacelike".into()));
    }
    Ok(IsometryH3 {
        m: Matrix4::identity() - proj_onto(n) * 2.0,
    }
    .polished())
}

/// Reflection across the plane through three points.
pub fn reflect_across_plane(p1: &PointH3, p2: &PointH3, p3: &PointH3) -> Result<IsometryH3> {
    p1.validate()?;
    p2.validate()?;
    p3.validate()?;
    if collinearity_measure(p1, p2, p3) < EPS_DEGENERATE {
        return Err(Error::Degenerate(
            "mirror points lie on one geodesic".into(),
        ));
    }
    let c = cross4(&p1.lift(), &p2.lift(), &p3.lift());
    reflection_with_normal(&Vector4::new(c[0], -c[1], -c[2], -c[3]))
}

/// Reflection across the perpendicular bisector plane of `a` and `c`.
pub fn reflection_swapping(a: &PointH3, c: &PointH3) -> Result<IsometryH3> {
    a.validate()?;
    c.validate()?;
    if dist_h3(a, c)? <= 1e-12 {
        return Err(Error::Degenerate("bisector of coincident points".into()));
    }
    reflection_with_normal(&(a.lift() - c.lift()))
}

/// Point at fraction `s` of the way from `p` to `q` along the geodesic.
pub fn geodesic_point(p: &PointH3, q: &PointH3, s: f64) -> Result<PointH3> {
    let d = dist_h3(p, q)?;
    if d == 0.0 {
        return Ok(*p);
    }
    let v = (p.lift() * ((1.0 - s) * d).sinh() + q.lift() * (s * d).sinh()) / d.sinh();
    PointHyperboloid::normalized(v)?.to_h3()
}

pub fn midpoint(p: &PointH3, q: &PointH3) -> Result<PointH3> {
    p.validate()?;
    q.validate()?;
    PointHyperboloid::normalized(p.lift() + q.lift())?.to_h3()
}

pub fn to_klein(p: &PointH3) -> Result<[f64; 3]> {
    p.validate()?;
    let v = p.lift();
    Ok([v[1] / v[0], v[2] / v[0], v[3] / v[0]])
}

pub fn from_klein(k: [f64; 3]) -> Result<PointH3> {
    let r2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if !(r2 < 1.0) {
        return domain(format!("Klein point {k:?} is outside the unit ball"));
    }
    PointHyperboloid::normalized(Vector4::new(1.0, k[0], k[1], k[2]))?.to_h3()
}
