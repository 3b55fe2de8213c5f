//! Behaviour of the placement formulas as `t → ∞`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::suspension::{pole_gap_z, rho_sq};

/// Limits of `ρ_j²/t²`, `Re G_{j,j+1}/t²` and `|Im G_{j,j+1}|/t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRatios {
    pub rho: f64,
    pub re_g: f64,
    pub abs_im_g: f64,
}

/// Closed-form limits for the edge `j` with north lengths `e_j`, `e_next`
/// and equator length `e_eq`.
pub fn limit_ratios(e_j: f64, e_next: f64, e_eq: f64) -> LimitRatios {
    let (cj, ck, ce) = (e_j.cosh(), e_next.cosh(), e_eq.cosh());
    LimitRatios {
        rho: -1.0 / (4.0 * cj * cj),
        re_g: -ce / (4.0 * cj * ck),
        abs_im_g: (ce * ce - 1.0).sqrt() / (4.0 * cj * ck),
    }
}

/// The same ratios evaluated from the finite-`t` formulas.
pub fn numeric_ratios(
    t: f64,
    e_j: f64,
    e_south_j: f64,
    e_next: f64,
    e_south_next: f64,
    e_eq: f64,
) -> Result<LimitRatios> {
    let zj = pole_gap_z(t, e_j, e_south_j)?;
    let zk = pole_gap_z(t, e_next, e_south_next)?;
    let r2j = rho_sq(t, e_j, e_south_j)?;
    let r2k = rho_sq(t, e_next, e_south_next)?;
    let re = zj * e_south_j.cosh() + zk * e_south_next.cosh() - zj * zk * e_eq.cosh() - 1.0;
    let t2 = t * t;
    Ok(LimitRatios {
        rho: r2j / t2,
        re_g: re / t2,
        // Im² = ρ_j²ρ_k² − Re² is negative for large t
        abs_im_g: (re * re - r2j * r2k).abs().sqrt() / t2,
    })
}

/// `cosh e + σ sinh e = e^{σe}`.
pub fn limit_edge_factor(e: f64, sigma: i8) -> f64 {
    (f64::from(sigma) * e).exp()
}
