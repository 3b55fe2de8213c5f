//! Signed sums `Σ σ_j e_{j,j+1}` of equator lengths.

use serde::{Deserialize, Serialize};

use super::{for_each_signed_sum, signed_sum};
use crate::error::{Error, Result};
use crate::suspension::{SignVector, SuspensionSpec};

/// Largest equator for the certificate search.
pub const MAX_CERT_V: usize = 30;
const DIRECT_V: usize = 20;

/// Sign vectors balancing the equator lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquatorCertificate {
    pub equator: Vec<f64>,
    pub solutions: Vec<SignVector>,
    pub residuals: Vec<f64>,
    /// `min_σ |Σ σ_j e_j|` over all sign vectors.
    pub min_residual: f64,
}

impl EquatorCertificate {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// All sign vectors (global flips included) with `|Σ σ_j e_j| < tol`.
pub fn necessary_condition(equator: &[f64], tol: f64) -> Result<EquatorCertificate> {
    let v = equator.len();
    if v < 3 {
        return Err(Error::InvalidSpec(format!("equator of {v} edges")));
    }
    if v > MAX_CERT_V {
        return Err(Error::Size(format!(
            "V = {v} exceeds the certificate bound {MAX_CERT_V}"
        )));
    }
    if let Some(e) = equator.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::InvalidSpec(format!(
            "equator length {e} is not positive"
        )));
    }
    let slack = tol + 1e-9;
    let (mut masks, min_residual) = if v <= DIRECT_V {
        direct(equator, slack)
    } else {
        meet_in_middle(equator, slack)
    };
    masks.sort_unstable();
    let mut solutions = Vec::new();
    let mut residuals = Vec::new();
    for mask in masks {
        let r = signed_sum(equator, mask).abs();
        if r < tol {
            solutions.push(SignVector::from_mask(mask, v));
            residuals.push(r);
        }
    }
    Ok(EquatorCertificate {
        equator: equator.to_vec(),
        solutions,
        residuals,
        min_residual,
    })
}

fn direct(w: &[f64], slack: f64) -> (Vec<u64>, f64) {
    let mut hits = Vec::new();
    let mut best = f64::INFINITY;
    for_each_signed_sum(w, |mask, s| {
        if s.abs() < slack {
            hits.push(mask);
        }
        best = best.min(s.abs());
    });
    (hits, best)
}

// Both sides walk Gray codes, so residuals carry ~1e-13 drift; callers
// recompute reported sums exactly.
fn meet_in_middle(w: &[f64], slack: f64) -> (Vec<u64>, f64) {
    let h = w.len() / 2;
    let (left, right) = w.split_at(h);
    let mut rs: Vec<(f64, u64)> = Vec::with_capacity(1 << right.len());
    for_each_signed_sum(right, |mask, s| rs.push((s, mask)));
    rs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut hits = Vec::new();
    let mut best = f64::INFINITY;
    for_each_signed_sum(left, |lmask, ls| {
        let target = -ls;
        let lo = rs.partition_point(|r| r.0 < target - slack);
        let near = rs.partition_point(|r| r.0 < target);
        for k in [near.wrapping_sub(1), near] {
            if let Some(r) = rs.get(k) {
                best = best.min((ls + r.0).abs());
            }
        }
        for r in rs[lo..].iter().take_while(|r| r.0 <= target + slack) {
            hits.push(lmask | (r.1 << h));
        }
    });
    (hits, best)
}

/// The octahedron described by `spec` (V = 4, order N,A,B,C,D,S) seen as a
/// suspension with another pair of opposite vertices as poles:
/// `0` keeps (N,S), `1` uses (A,C) with equator N,D,S,B, `2` uses (B,D)
/// with equator N,C,S,A.
pub fn repole(spec: &SuspensionSpec, pair: usize) -> Result<SuspensionSpec> {
    spec.validate()?;
    if spec.v() != 4 {
        return Err(Error::InvalidSpec(format!(
            "octahedron needs V = 4, got {}",
            spec.v()
        )));
    }
    let (n, s, e) = (&spec.north, &spec.south, &spec.equator);
    let (a, b, c, d) = (0, 1, 2, 3);
    let (ab, bc, cd, da) = (e[0], e[1], e[2], e[3]);
    let out = match pair {
        0 => spec.clone(),
        1 => SuspensionSpec {
            north: vec![n[a], da, s[a], ab],
            south: vec![n[c], cd, s[c], bc],
            equator: vec![n[d], s[d], s[b], n[b]],
        },
        2 => SuspensionSpec {
            north: vec![n[b], bc, s[b], ab],
            south: vec![n[d], cd, s[d], da],
            equator: vec![n[c], s[c], s[a], n[a]],
        },
        _ => {
            return Err(Error::InvalidSpec(format!(
                "pole pair {pair} out of range 0..3"
            )))
        }
    };
    Ok(out)
}

/// Certificates for the three equators of an octahedron.
pub fn certify_octahedron(spec: &SuspensionSpec, tol: f64) -> Result<[EquatorCertificate; 3]> {
    let cert = |pair| necessary_condition(&repole(spec, pair)?.equator, tol);
    Ok([cert(0)?, cert(1)?, cert(2)?])
}
