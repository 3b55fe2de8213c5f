//! The closure equation `Σ σ_j θ_{j,j+1} = 2πm`, its complex form
//! `∏ G_{j,j+1}/ρ_j² = 1`, tracing over `t`, large-`t` limits and the
//! signed-sum condition on equator lengths.

mod certificate;
mod limits;
mod trace;

pub use certificate::{
    certify_octahedron, necessary_condition, repole, EquatorCertificate, MAX_CERT_V,
};
pub use limits::{limit_edge_factor, limit_ratios, numeric_ratios, LimitRatios};
pub use trace::{
    feasible_intervals, lateral_bounds, trace_flex, trace_window, FlatKind, FlatPosition,
    FlexTrace, Run, TraceEvent, TraceOptions, TraceSample, Verdict,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeom::PointH3;
pub use crate::suspension::SignVector;
use crate::suspension::{closure, EdgeData, Placement, SuspensionSpec};

/// Default closure tolerance in radians.
pub const TOL_CLOSURE: f64 = 1e-9;
/// Largest `V` for exhaustive sign enumeration in the closure solver.
pub const MAX_SOLVE_V: usize = 24;

/// A sign vector closing the fan of tetrahedra at one `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureSolution {
    pub t: f64,
    pub signs: SignVector,
    pub m: i64,
    pub defect: f64,
}

/// `G_{j,j+1} = ρ_j ρ_{j+1} e^{iσ_j θ_{j,j+1}}`, built from the edge-length
/// data of the placement (so the closing edge is not forced by the gauge).
pub fn g_term(p: &Placement, j: usize) -> Complex64 {
    let k = (j + 1) % p.v();
    let c = p.cos_dihedral[j];
    let s = p.signs.get(j) * (1.0 - c * c).max(0.0).sqrt();
    Complex64::new(c, s) * (p.rho[j] * p.rho[k])
}

/// `x_a x_b + y_a y_b + i (x_a y_b − y_a x_b)` from coordinates.
pub fn g_from_coordinates(a: &PointH3, b: &PointH3) -> Complex64 {
    Complex64::new(a.x * b.x + a.y * b.y, a.x * b.y - a.y * b.x)
}

/// `∏_j G_{j,j+1} / ρ_j²`; equals 1 exactly when the fan closes.
pub fn flex_product(p: &Placement) -> Complex64 {
    (0..p.v())
        .map(|j| g_term(p, j) / (p.rho[j] * p.rho[j]))
        .product()
}

/// Calls `f(mask, Σ σ_j w_j)` for every mask in `0..2^n` (bit set means
/// `σ_j = −1`), walking a Gray code.
pub(crate) fn for_each_signed_sum(w: &[f64], mut f: impl FnMut(u64, f64)) {
    let n = w.len();
    let mut mask = 0u64;
    let mut sum: f64 = w.iter().sum();
    f(mask, sum);
    for i in 1..(1u64 << n) {
        let bit = i.trailing_zeros() as usize;
        mask ^= 1 << bit;
        if i & 1023 == 0 {
            sum = signed_sum(w, mask);
        } else if mask >> bit & 1 == 1 {
            sum -= 2.0 * w[bit];
        } else {
            sum += 2.0 * w[bit];
        }
        f(mask, sum);
    }
}

pub(crate) fn signed_sum(w: &[f64], mask: u64) -> f64 {
    w.iter()
        .enumerate()
        .map(|(j, x)| if mask >> j & 1 == 1 { -x } else { *x })
        .sum()
}

/// `(mask, m, defect)`.
pub(crate) type MaskClosure = (u64, i64, f64);

/// All closing masks for given unsigned increments, plus the minimum-defect
/// mask. Defects are recomputed exactly for reported masks.
pub(crate) fn closing_masks(angles: &[f64], tol: f64) -> (Vec<MaskClosure>, MaskClosure) {
    let mut hits = Vec::new();
    let mut best = (0u64, f64::INFINITY);
    let slack = tol + 1e-10;
    for_each_signed_sum(angles, |mask, d| {
        let (_, defect) = closure(d);
        if defect < slack {
            hits.push(mask);
        }
        if defect < best.1 || (defect == best.1 && mask < best.0) {
            best = (mask, defect);
        }
    });
    let exact = |mask: u64| {
        let (m, defect) = closure(signed_sum(angles, mask));
        (mask, m, defect)
    };
    let mut sols: Vec<MaskClosure> = hits.into_iter().map(exact).filter(|s| s.2 < tol).collect();
    sols.sort_by_key(|s| s.0);
    (sols, exact(best.0))
}

/// Every sign vector closing the suspension at `t` within `tol`. With a hint,
/// solutions are ordered by Hamming distance to it.
pub fn solve_signs(
    spec: &SuspensionSpec,
    t: f64,
    hint: Option<&SignVector>,
    tol: f64,
) -> Result<Vec<ClosureSolution>> {
    spec.validate()?;
    let v = spec.v();
    if v > MAX_SOLVE_V {
        return Err(Error::Size(format!(
            "V = {v} exceeds the sign enumeration bound {MAX_SOLVE_V}"
        )));
    }
    if let Some(h) = hint {
        if h.len() != v {
            return Err(Error::InvalidSpec(format!(
                "hint has {} signs for V = {v}",
                h.len()
            )));
        }
    }
    let angles = EdgeData::evaluate(spec, t)?.angles()?;
    let (sols, _) = closing_masks(&angles, tol);
    let mut out: Vec<ClosureSolution> = sols
        .into_iter()
        .map(|(mask, m, defect)| ClosureSolution {
            t,
            signs: SignVector::from_mask(mask, v),
            m,
            defect,
        })
        .collect();
    if let Some(h) = hint {
        out.sort_by_key(|s| (s.signs.hamming(h), s.signs.mask()));
    }
    Ok(out)
}
