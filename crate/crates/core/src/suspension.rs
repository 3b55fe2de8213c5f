//! Suspensions: edge-length data, placement at pole parameter `t`, and
//! degeneracy classification.
//!
//! The south pole sits at `(0,0,1)` and the north pole at `(0,0,t)` with
//! `t = e^{d(N,S)}`. Equator vertices and edges are indexed from 0; edge `j`
//! joins `P_j` to `P_{j+1}` cyclically.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hypgeom::{
    collinearity_measure, coplanarity_measure, dist_h3, minkowski_dot, IsometryH3, PointH3,
    EPS_DEGENERATE, EPS_IDENTITY,
};

/// Below this, `t cosh e − cosh e'` is treated as zero.
pub const SINGULAR_GAP: f64 = 1e-14;

/// Edge lengths of a suspension with `V` equator vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspensionSpec {
    pub north: Vec<f64>,
    pub south: Vec<f64>,
    pub equator: Vec<f64>,
}

impl SuspensionSpec {
    pub fn new(north: Vec<f64>, south: Vec<f64>, equator: Vec<f64>) -> Result<Self> {
        let spec = SuspensionSpec {
            north,
            south,
            equator,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.north.len();
        if v < 3 {
            return Err(Error::InvalidSpec(format!("V = {v}, need at least 3")));
        }
        if self.south.len() != v || self.equator.len() != v {
            return Err(Error::InvalidSpec(format!(
                "length lists disagree: north {}, south {}, equator {}",
                v,
                self.south.len(),
                self.equator.len()
            )));
        }
        for (name, list) in [
            ("north", &self.north),
            ("south", &self.south),
            ("equator", &self.equator),
        ] {
            if let Some((j, e)) = list
                .iter()
                .enumerate()
                .find(|(_, e)| !(e.is_finite() && **e > 0.0))
            {
                return Err(Error::InvalidSpec(format!(
                    "{name}[{j}] = {e} is not a positive length"
                )));
            }
        }
        Ok(())
    }

    pub fn v(&self) -> usize {
        self.north.len()
    }

    /// `V = 4`, all lateral edges `arccosh 2`, all equator edges `arccosh 3`.
    pub fn symmetric_demo() -> Self {
        let e = 2f64.acosh();
        SuspensionSpec {
            north: vec![e; 4],
            south: vec![e; 4],
            equator: vec![3f64.acosh(); 4],
        }
    }
}

/// `z_j = (t² − 1) / (2 (t cosh e − cosh e'))`.
pub fn pole_gap_z(t: f64, e: f64, e_south: f64) -> Result<f64> {
    pole_gap_z_at(t, e, e_south, 0)
}

fn pole_gap_z_at(t: f64, e: f64, e_south: f64, index: usize) -> Result<f64> {
    if !(t > 1.0) {
        return domain(format!("t must exceed 1, got {t}"));
    }
    let gap = t * e.cosh() - e_south.cosh();
    if gap.abs() < SINGULAR_GAP {
        return Err(Error::Singular {
            index,
            gap: gap.abs(),
        });
    }
    Ok((t * t - 1.0) / (2.0 * gap))
}

/// `ρ_j² = 2 z_j cosh e' − z_j² − 1`.
pub fn rho_sq(t: f64, e: f64, e_south: f64) -> Result<f64> {
    let z = pole_gap_z(t, e, e_south)?;
    Ok(2.0 * z * e_south.cosh() - z * z - 1.0)
}

/// Squared Euclidean distance between the projections of `P_j` and `P_{j+1}`.
pub fn chord_sq(t: f64, spec: &SuspensionSpec, j: usize) -> Result<f64> {
    let k = (j + 1) % spec.v();
    let zj = pole_gap_z_at(t, spec.north[j], spec.south[j], j)?;
    let zk = pole_gap_z_at(t, spec.north[k], spec.south[k], k)?;
    Ok(2.0 * zj * zk * spec.equator[j].cosh() - zj * zj - zk * zk)
}

/// `x_j x_{j+1} + y_j y_{j+1}` expressed through the edge lengths.
pub fn re_g(t: f64, spec: &SuspensionSpec, j: usize) -> Result<f64> {
    let k = (j + 1) % spec.v();
    let zj = pole_gap_z_at(t, spec.north[j], spec.south[j], j)?;
    let zk = pole_gap_z_at(t, spec.north[k], spec.south[k], k)?;
    Ok(zj * spec.south[j].cosh() + zk * spec.south[k].cosh()
        - zj * zk * spec.equator[j].cosh()
        - 1.0)
}

/// Cosine of the dihedral increment `θ_{j,j+1}`, clamped within slack.
pub fn cos_dihedral(t: f64, spec: &SuspensionSpec, j: usize) -> Result<f64> {
    let k = (j + 1) % spec.v();
    let r2j = vertex_rho_sq(t, spec, j)?;
    let r2k = vertex_rho_sq(t, spec, k)?;
    let c = re_g(t, spec, j)? / (r2j * r2k).sqrt();
    clamp_cos(c, t, j)
}

fn vertex_rho_sq(t: f64, spec: &SuspensionSpec, j: usize) -> Result<f64> {
    let z = pole_gap_z_at(t, spec.north[j], spec.south[j], j)?;
    if z <= 0.0 {
        return Err(Error::Infeasible {
            t,
            what: format!("vertex {j} has height z = {z}"),
        });
    }
    let r2 = 2.0 * z * spec.south[j].cosh() - z * z - 1.0;
    if r2 <= 0.0 {
        return Err(Error::Infeasible {
            t,
            what: format!("vertex {j} has rho^2 = {r2}"),
        });
    }
    Ok(r2)
}

fn clamp_cos(c: f64, t: f64, j: usize) -> Result<f64> {
    if c.abs() > 1.0 + EPS_IDENTITY || c.is_nan() {
        return Err(Error::Infeasible {
            t,
            what: format!("edge {j} has cos theta = {c}"),
        });
    }
    Ok(c.clamp(-1.0, 1.0))
}

/// Per-vertex heights and radii plus unclamped per-edge cosines at one `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeData {
    pub t: f64,
    pub z: Vec<f64>,
    pub rho_sq: Vec<f64>,
    pub cos_raw: Vec<f64>,
}

impl EdgeData {
    pub fn evaluate(spec: &SuspensionSpec, t: f64) -> Result<Self> {
        let v = spec.v();
        let mut z = Vec::with_capacity(v);
        let mut rho_sq = Vec::with_capacity(v);
        for j in 0..v {
            z.push(pole_gap_z_at(t, spec.north[j], spec.south[j], j)?);
            rho_sq.push(vertex_rho_sq(t, spec, j)?);
        }
        let cos_raw = (0..v)
            .map(|j| {
                let k = (j + 1) % v;
                let re = z[j] * spec.south[j].cosh() + z[k] * spec.south[k].cosh()
                    - z[j] * z[k] * spec.equator[j].cosh()
                    - 1.0;
                re / (rho_sq[j] * rho_sq[k]).sqrt()
            })
            .collect();
        Ok(EdgeData {
            t,
            z,
            rho_sq,
            cos_raw,
        })
    }

    /// Clamped cosines, or the first edge outside the slack.
    pub fn cosines(&self) -> Result<Vec<f64>> {
        self.cos_raw
            .iter()
            .enumerate()
            .map(|(j, &c)| clamp_cos(c, self.t, j))
            .collect()
    }

    /// Unsigned dihedral increments `arccos(cos θ_{j,j+1})`.
    pub fn angles(&self) -> Result<Vec<f64>> {
        Ok(self.cosines()?.into_iter().map(f64::acos).collect())
    }
}

/// Whether a real placement exists at `t`.
pub fn feasible(spec: &SuspensionSpec, t: f64) -> bool {
    EdgeData::evaluate(spec, t)
        .and_then(|d| d.cosines())
        .is_ok()
}

/// Orientation choices `σ_j ∈ {+1, −1}` for the equator edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Parse(format!(
                "sign vector {signs:?} has entries other than +-1"
            )));
        }
        Ok(SignVector(signs))
    }

    pub fn all_plus(v: usize) -> Self {
        SignVector(vec![1; v])
    }

    /// `(+,−,+,−,…)`.
    pub fn alternating(v: usize) -> Self {
        SignVector((0..v).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect())
    }

    /// Bit `j` of `mask` set means `σ_j = −1`.
    pub fn from_mask(mask: u64, v: usize) -> Self {
        SignVector(
            (0..v)
                .map(|j| if mask >> j & 1 == 1 { -1 } else { 1 })
                .collect(),
        )
    }

    pub fn mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < 0)
            .map(|(j, _)| 1u64 << j)
            .sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> f64 {
        f64::from(self.0[j])
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn flipped(&self) -> Self {
        SignVector(self.0.iter().map(|s| -s).collect())
    }

    pub fn hamming(&self, other: &SignVector) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .0
            .iter()
            .map(|&x| if x > 0 { '+' } else { '-' })
            .collect();
        f.write_str(&s)
    }
}

impl FromStr for SignVector {
    type Err = Error;

    /// Accepts `+-+-`, `(+,-,+,-)` or `1,-1,1,-1`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        if body.contains(',') {
            let signs = body
                .split(',')
                .map(|tok| match tok.trim() {
                    "+" | "1" | "+1" => Ok(1),
                    "-" | "-1" => Ok(-1),
                    other => Err(Error::Parse(format!("bad sign {other:?}"))),
                })
                .collect::<Result<Vec<i8>>>()?;
            return SignVector::new(signs);
        }
        let signs = body
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::Parse(format!("bad sign {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if signs.is_empty() {
            return Err(Error::Parse("empty sign vector".into()));
        }
        SignVector::new(signs)
    }
}

impl TryFrom<String> for SignVector {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SignVector> for String {
    fn from(s: SignVector) -> String {
        s.to_string()
    }
}

/// Signed angle sum `D`, nearest winding `m` and defect `|D − 2πm|`.
pub fn closure(dihedral_sum: f64) -> (i64, f64) {
    let m = (dihedral_sum / TAU).round();
    (m as i64, (dihedral_sum - TAU * m).abs())
}

/// Vertex coordinates of a suspension at one `t` and sign choice.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub t: f64,
    pub signs: SignVector,
    pub theta1: f64,
    pub z: Vec<f64>,
    pub rho: Vec<f64>,
    pub theta: Vec<f64>,
    pub cos_dihedral: Vec<f64>,
    /// Signed increments `σ_j arccos(cos θ_{j,j+1})`.
    pub dihedral: Vec<f64>,
    pub winding: i64,
    pub defect: f64,
}

impl Placement {
    pub fn v(&self) -> usize {
        self.z.len()
    }

    pub fn north(&self) -> PointH3 {
        PointH3 {
            x: 0.0,
            y: 0.0,
            z: self.t,
        }
    }

    pub fn south(&self) -> PointH3 {
        PointH3 {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        }
    }

    pub fn vertex(&self, j: usize) -> PointH3 {
        let (s, c) = self.theta[j].sin_cos();
        PointH3 {
            x: self.rho[j] * c,
            y: self.rho[j] * s,
            z: self.z[j],
        }
    }

    pub fn vertices(&self) -> Vec<PointH3> {
        (0..self.v()).map(|j| self.vertex(j)).collect()
    }
}

/// Places the suspension at `t` with orientation `signs`, `θ_1 = theta1`.
pub fn place(spec: &SuspensionSpec, t: f64, signs: &SignVector, theta1: f64) -> Result<Placement> {
    spec.validate()?;
    if signs.len() != spec.v() {
        return Err(Error::InvalidSpec(format!(
            "{} signs for V = {}",
            signs.len(),
            spec.v()
        )));
    }
    let data = EdgeData::evaluate(spec, t)?;
    let cos = data.cosines()?;
    let dihedral: Vec<f64> = cos
        .iter()
        .enumerate()
        .map(|(j, c)| signs.get(j) * c.acos())
        .collect();
    let mut theta = Vec::with_capacity(spec.v());
    let mut acc = theta1;
    for d in &dihedral {
        theta.push(acc);
        acc += d;
    }
    let (winding, defect) = closure(dihedral.iter().sum());
    Ok(Placement {
        t,
        signs: signs.clone(),
        theta1,
        rho: data.rho_sq.iter().map(|r| r.sqrt()).collect(),
        z: data.z,
        theta,
        cos_dihedral: cos,
        dihedral,
        winding,
        defect,
    })
}

/// Recomputes all edge lengths of a placement from its coordinates.
pub fn measure_edges(p: &Placement) -> SuspensionSpec {
    let pts = p.vertices();
    let v = pts.len();
    let d = |a: &PointH3, b: &PointH3| dist_h3(a, b).unwrap_or(f64::NAN);
    let (n, s) = (p.north(), p.south());
    SuspensionSpec {
        north: pts.iter().map(|q| d(&n, q)).collect(),
        south: pts.iter().map(|q| d(&s, q)).collect(),
        equator: (0..v).map(|j| d(&pts[j], &pts[(j + 1) % v])).collect(),
    }
}

/// Maximum absolute difference between corresponding lengths.
pub fn spec_distance(a: &SuspensionSpec, b: &SuspensionSpec) -> f64 {
    let pairs = a
        .north
        .iter()
        .zip(&b.north)
        .chain(a.south.iter().zip(&b.south))
        .chain(a.equator.iter().zip(&b.equator));
    pairs.map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Measures the spec of a suspension given by coordinates, together with the
/// isometry moving the south pole to `(0,0,1)` and the north pole above it.
pub fn from_coordinates(
    north: &PointH3,
    south: &PointH3,
    equator: &[PointH3],
) -> Result<(SuspensionSpec, IsometryH3)> {
    north.validate()?;
    south.validate()?;
    for p in equator {
        p.validate()?;
    }
    if equator.len() < 3 {
        return Err(Error::InvalidSpec(format!(
            "V = {}, need at least 3",
            equator.len()
        )));
    }
    let d_ns = dist_h3(north, south)?;
    if d_ns <= 1e-12 {
        return Err(Error::Degenerate(
            "north and south poles coincide (double covered cap)".into(),
        ));
    }
    let v = equator.len();
    let spec = SuspensionSpec::new(
        equator
            .iter()
            .map(|p| dist_h3(north, p))
            .collect::<Result<_>>()?,
        equator
            .iter()
            .map(|p| dist_h3(south, p))
            .collect::<Result<_>>()?,
        (0..v)
            .map(|j| dist_h3(&equator[j], &equator[(j + 1) % v]))
            .collect::<Result<_>>()?,
    )?;
    Ok((spec, normalizing_isometry(north, south)?))
}

fn normalizing_isometry(north: &PointH3, south: &PointH3) -> Result<IsometryH3> {
    let f0 = south.lift();
    let nl = north.lift();
    let f1 = nl - f0 * minkowski_dot(&nl, &f0);
    let n1 = -minkowski_dot(&f1, &f1);
    if !(n1 > 0.0) {
        return Err(Error::Degenerate("poles do not span a line".into()));
    }
    let f1 = f1 / n1.sqrt();
    let mut frame = vec![f0, f1];
    let residual = |e: &Vector4<f64>, frame: &[Vector4<f64>]| {
        let mut r = *e;
        for (i, f) in frame.iter().enumerate() {
            let sign = if i == 0 { 1.0 } else { -1.0 };
            r -= f * (minkowski_dot(&r, f) * sign);
        }
        r
    };
    for _ in 0..2 {
        let mut best = residual(&Vector4::ith(1, 1.0), &frame);
        for k in 2..4 {
            let r = residual(&Vector4::ith(k, 1.0), &frame);
            if -minkowski_dot(&r, &r) > -minkowski_dot(&best, &best) + 1e-12 {
                best = r;
            }
        }
        frame.push(best / (-minkowski_dot(&best, &best)).sqrt());
    }
    let mut f = Matrix4::from_columns(&frame);
    if f.determinant() < 0.0 {
        f.set_column(3, &(-frame[3]));
    }
    Ok(IsometryH3 { m: f }.polished().inverse())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum DegeneracyKind {
    Nondegenerate,
    DoubleCoveredCap,
    /// `N`, `S`, `P_{i−1}`, `P_{i+1}` lie on one geodesic.
    Wing(usize),
    /// `N`, `S`, `P_j`, `P_{j+1}` lie in one plane.
    FlatTetrahedron(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub kind: DegeneracyKind,
    /// The measure that triggered the class, or the smallest coplanarity
    /// measure over all tetrahedra when nondegenerate.
    pub witness: f64,
}

pub fn classify_degeneracy(
    north: &PointH3,
    south: &PointH3,
    equator: &[PointH3],
) -> DegeneracyReport {
    let d = dist_h3(north, south).unwrap_or(0.0);
    if d <= 1e-12 {
        return DegeneracyReport {
            kind: DegeneracyKind::DoubleCoveredCap,
            witness: d,
        };
    }
    let v = equator.len();
    for i in 0..v {
        let prev = &equator[(i + v - 1) % v];
        let next = &equator[(i + 1) % v];
        let w =
            collinearity_measure(north, south, prev).max(collinearity_measure(north, south, next));
        if w < EPS_DEGENERATE {
            return DegeneracyReport {
                kind: DegeneracyKind::Wing(i),
                witness: w,
            };
        }
    }
    let mut min = f64::INFINITY;
    for j in 0..v {
        let w = coplanarity_measure([north, south, &equator[j], &equator[(j + 1) % v]]);
        if w < EPS_DEGENERATE {
            return DegeneracyReport {
                kind: DegeneracyKind::FlatTetrahedron(j),
                witness: w,
            };
        }
        min = min.min(w);
    }
    DegeneracyReport {
        kind: DegeneracyKind::Nondegenerate,
        witness: min,
    }
}
