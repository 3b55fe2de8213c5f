//! Grid continuation of closure solutions over the pole parameter `t`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{closing_masks, signed_sum, ClosureSolution, TOL_CLOSURE};
use crate::error::{domain, Error, Result};
use crate::hypgeom::EPS_IDENTITY;
use crate::suspension::{closure, EdgeData, SignVector, SuspensionSpec};

/// Largest `V` the tracer enumerates signs for.
pub const MAX_TRACE_V: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub tol_closure: f64,
    /// Minimum number of consecutive closing samples for a flexible verdict.
    pub steps_min: usize,
    /// Minimum `(t_b − t_a)/t_a` of the closing run.
    pub min_rel_width: f64,
    /// Only start branches from this sign vector.
    pub restrict: Option<SignVector>,
    /// `1 ∓ cos θ` below this counts as a flat position.
    pub flat_tol: f64,
    /// Grid steps searched beyond each end of the window for flat positions.
    pub margin_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            tol_closure: TOL_CLOSURE,
            steps_min: 25,
            min_rel_width: 1e-3,
            restrict: None,
            flat_tol: 1e-10,
            margin_steps: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatKind {
    /// `|cos θ|` reaches 1 and the placement ceases to exist beyond.
    Boundary,
    /// `|cos θ|` touches 1 and returns.
    Touch,
}

/// A `t` where some dihedral increments become 0 (`cos_sign = 1`) or π.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatPosition {
    pub t: f64,
    pub edges: Vec<usize>,
    pub cos_sign: i8,
    pub kind: FlatKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// Several sign vectors continue a branch across a flat position.
    Fork {
        t: f64,
        from: SignVector,
        to: Vec<SignVector>,
    },
    SignChange {
        t: f64,
        from: SignVector,
        to: SignVector,
    },
    /// No sign vector continues the branch.
    BranchLost { t: f64, signs: SignVector },
    /// The winding integer jumped without a flat position.
    Discontinuity {
        t: f64,
        signs: SignVector,
        m_before: i64,
        m_after: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    /// Tracked sign vector at this `t` (`None` where no placement exists).
    pub solution: Option<ClosureSolution>,
    /// `θ_1..θ_V` of the tracked placement with `θ_1 = 0`.
    pub theta: Vec<f64>,
    /// Number of closing sign vectors.
    pub n_solutions: usize,
}

/// Consecutive closing samples followed by one branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub start_index: usize,
    pub end_index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub signs_start: SignVector,
    pub signs_end: SignVector,
    #[serde(skip)]
    masks: Vec<u64>,
}

impl Run {
    pub fn samples(&self) -> usize {
        self.end_index - self.start_index + 1
    }

    pub fn signs_at(&self, i: usize, v: usize) -> Option<SignVector> {
        (self.start_index..=self.end_index)
            .contains(&i)
            .then(|| SignVector::from_mask(self.masks[i - self.start_index], v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Flexible { t_a: f64, t_b: f64 },
    Rigid,
}

impl Verdict {
    pub fn is_flexible(&self) -> bool {
        matches!(self, Verdict::Flexible { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexTrace {
    pub requested: (f64, f64),
    pub t_lo: f64,
    pub t_hi: f64,
    /// The grid was shrunk to a feasible sub-interval of the request.
    pub trimmed: bool,
    pub samples: Vec<TraceSample>,
    pub flats: Vec<FlatPosition>,
    pub events: Vec<TraceEvent>,
    pub runs: Vec<Run>,
    pub verdict: Verdict,
}

impl FlexTrace {
    pub fn grid_step(&self) -> f64 {
        if self.samples.len() < 2 {
            return 0.0;
        }
        (self.t_hi - self.t_lo) / (self.samples.len() - 1) as f64
    }
}

/// `[max_j e^{|e_j − e'_j|}, min_j e^{e_j + e'_j}]`, the range of `t`
/// allowed by the lateral triangle inequalities.
pub fn lateral_bounds(spec: &SuspensionSpec) -> (f64, f64) {
    let lo = spec
        .north
        .iter()
        .zip(&spec.south)
        .map(|(a, b)| (a - b).abs().exp())
        .fold(1.0, f64::max);
    let hi = spec
        .north
        .iter()
        .zip(&spec.south)
        .map(|(a, b)| (a + b).exp())
        .fold(f64::INFINITY, f64::min);
    (lo, hi)
}

fn feasible_raw(spec: &SuspensionSpec, t: f64) -> Option<Vec<f64>> {
    if !(t > 1.0) {
        return None;
    }
    let d = EdgeData::evaluate(spec, t).ok()?;
    d.cos_raw
        .iter()
        .all(|c| c.abs() <= 1.0 + EPS_IDENTITY)
        .then_some(d.cos_raw)
}

/// Bisects between a feasible `a` and an infeasible `b`, returning the
/// feasible side of the boundary.
fn bisect_boundary(spec: &SuspensionSpec, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if feasible_raw(spec, mid).is_some() {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// Maximal feasible sub-intervals of `[lo, hi]`, located on `probes`
/// geometrically spaced points and refined by bisection.
pub fn feasible_intervals(
    spec: &SuspensionSpec,
    lo: f64,
    hi: f64,
    probes: usize,
) -> Vec<(f64, f64)> {
    let probes = probes.max(2);
    let ratio = (hi / lo).ln();
    let ts: Vec<f64> = (0..probes)
        .map(|i| match i {
            0 => lo,
            _ if i == probes - 1 => hi,
            _ => lo * (ratio * i as f64 / (probes - 1) as f64).exp(),
        })
        .collect();
    let ok: Vec<bool> = ts
        .par_iter()
        .map(|&t| feasible_raw(spec, t).is_some())
        .collect();
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    for i in 0..probes {
        match (ok[i], start) {
            (true, None) => {
                start = Some(if i == 0 {
                    ts[0]
                } else {
                    bisect_boundary(spec, ts[i], ts[i - 1])
                })
            }
            (false, Some(s)) => {
                out.push((s, bisect_boundary(spec, ts[i - 1], ts[i])));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, hi));
    }
    out.retain(|(a, b)| b > a);
    out
}

struct Eval {
    angles: Vec<f64>,
    sols: Vec<(u64, i64, f64)>,
    best: (u64, i64, f64),
}

struct Branch {
    masks: Vec<u64>,
    start: usize,
    m: i64,
}

/// The feasible interval of `t` to trace: the one containing (or nearest
/// to) `t0`, or the widest one when `t0` is not given. The search range is
/// [`lateral_bounds`] with the upper end capped at `10⁶` times the lower.
pub fn trace_window(spec: &SuspensionSpec, t0: Option<f64>) -> Result<(f64, f64)> {
    let (lo, hi) = lateral_bounds(spec);
    let hi = hi.min(lo * 1e6);
    let Some(t0) = t0.filter(|t| *t > lo && *t < hi) else {
        return feasible_intervals(spec, lo, hi, 2000)
            .into_iter()
            .max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
            .ok_or(Error::NoFeasibleInterval { lo, hi });
    };
    // t0 is a probe of both halves, so a narrow interval around it is kept
    let below = feasible_intervals(spec, lo, t0, 1000);
    let above = feasible_intervals(spec, t0, hi, 1000);
    let gap = |iv: &(f64, f64)| (iv.0 - t0).max(t0 - iv.1).max(0.0);
    match (below.last(), above.first()) {
        (Some(&(a, b)), Some(&(c, d))) if b == t0 && c == t0 => Ok((a, d)),
        _ => below
            .into_iter()
            .chain(above)
            .min_by(|a, b| gap(a).total_cmp(&gap(b)))
            .ok_or(Error::NoFeasibleInterval { lo, hi }),
    }
}

/// Samples the closure equation on `steps` evenly spaced values of `t` and
/// follows closing sign vectors from sample to sample.
pub fn trace_flex(
    spec: &SuspensionSpec,
    t_lo: f64,
    t_hi: f64,
    steps: usize,
    opts: &TraceOptions,
) -> Result<FlexTrace> {
    spec.validate()?;
    let v = spec.v();
    if v > MAX_TRACE_V {
        return Err(Error::Size(format!(
            "V = {v} exceeds the tracing bound {MAX_TRACE_V}"
        )));
    }
    if !(t_lo > 1.0) || !t_lo.is_finite() {
        return domain(format!("t_lo must exceed 1, got {t_lo}"));
    }
    if !(t_hi > t_lo) || !t_hi.is_finite() {
        return domain(format!("t_hi = {t_hi} must exceed t_lo = {t_lo}"));
    }
    if steps < 2 {
        return domain(format!("need at least 2 steps, got {steps}"));
    }
    if let Some(r) = &opts.restrict {
        if r.len() != v {
            return Err(Error::InvalidSpec(format!(
                "restricting sign vector has {} entries for V = {v}",
                r.len()
            )));
        }
    }
    let intervals = feasible_intervals(spec, t_lo, t_hi, (4 * steps).max(400));
    let (lo, hi) = intervals
        .iter()
        .copied()
        .max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
        .ok_or(Error::NoFeasibleInterval { lo: t_lo, hi: t_hi })?;
    let trimmed = lo != t_lo || hi != t_hi;
    let h = (hi - lo) / (steps - 1) as f64;
    let grid: Vec<f64> = (0..steps)
        .map(|i| {
            if i == steps - 1 {
                hi
            } else {
                lo + h * i as f64
            }
        })
        .collect();

    let evals: Vec<Option<Eval>> = grid
        .par_iter()
        .map(|&t| {
            let angles = EdgeData::evaluate(spec, t).ok()?.angles().ok()?;
            let (sols, best) = closing_masks(&angles, opts.tol_closure);
            Some(Eval { angles, sols, best })
        })
        .collect();

    let flats = detect_flats(spec, &grid, h, opts);
    let (runs, events) = continue_branches(&grid, &evals, &flats, opts, v);

    let samples = grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let Some(ev) = &evals[i] else {
                return TraceSample {
                    t,
                    solution: None,
                    theta: Vec::new(),
                    n_solutions: 0,
                };
            };
            let covering = runs
                .iter()
                .filter(|r| (r.start_index..=r.end_index).contains(&i))
                .max_by(|a, b| {
                    a.samples()
                        .cmp(&b.samples())
                        .then(b.start_index.cmp(&a.start_index))
                });
            let mask = match (covering, &opts.restrict) {
                (Some(r), _) => r.masks[i - r.start_index],
                (None, Some(r)) => r.mask(),
                (None, None) => ev.best.0,
            };
            let (m, defect) = closure(signed_sum(&ev.angles, mask));
            let signs = SignVector::from_mask(mask, v);
            let mut theta = Vec::with_capacity(v);
            let mut acc = 0.0;
            for j in 0..v {
                theta.push(acc);
                acc += signs.get(j) * ev.angles[j];
            }
            TraceSample {
                t,
                solution: Some(ClosureSolution {
                    t,
                    signs,
                    m,
                    defect,
                }),
                theta,
                n_solutions: ev.sols.len(),
            }
        })
        .collect();

    let verdict = runs
        .iter()
        .filter(|r| {
            r.samples() >= opts.steps_min && (r.t_end - r.t_start) / r.t_start >= opts.min_rel_width
        })
        .max_by(|a, b| {
            a.samples()
                .cmp(&b.samples())
                .then(b.start_index.cmp(&a.start_index))
        })
        .map_or(Verdict::Rigid, |r| Verdict::Flexible {
            t_a: r.t_start,
            t_b: r.t_end,
        });

    Ok(FlexTrace {
        requested: (t_lo, t_hi),
        t_lo: lo,
        t_hi: hi,
        trimmed,
        samples,
        flats,
        events,
        runs,
        verdict,
    })
}

fn continue_branches(
    grid: &[f64],
    evals: &[Option<Eval>],
    flats: &[FlatPosition],
    opts: &TraceOptions,
    v: usize,
) -> (Vec<Run>, Vec<TraceEvent>) {
    let mut events = Vec::new();
    let mut active: Vec<Branch> = Vec::new();
    let mut finished: Vec<Branch> = Vec::new();
    for (i, ev) in evals.iter().enumerate() {
        let Some(ev) = ev else {
            finished.append(&mut active);
            continue;
        };
        let t = grid[i];
        let sols: HashMap<u64, i64> = ev.sols.iter().map(|s| (s.0, s.1)).collect();
        let mut flagged: Vec<usize> = Vec::new();
        if i > 0 {
            let (a, b) = (grid[i - 1], grid[i]);
            for f in flats {
                let slack = 1e-9 * f.t;
                if f.t >= a - slack && f.t <= b + slack {
                    flagged.extend(&f.edges);
                }
            }
            flagged.sort_unstable();
            flagged.dedup();
        }
        let mut next: Vec<Branch> = Vec::new();
        for mut b in active.drain(..) {
            let cur = *b.masks.last().expect("branches are nonempty");
            if let Some(&m) = sols.get(&cur) {
                if m != b.m && flagged.is_empty() {
                    events.push(TraceEvent::Discontinuity {
                        t,
                        signs: SignVector::from_mask(cur, v),
                        m_before: b.m,
                        m_after: m,
                    });
                    finished.push(b);
                    continue;
                }
                b.m = m;
                b.masks.push(cur);
                next.push(b);
                continue;
            }
            let cands: Vec<u64> = if flagged.is_empty() || flagged.len() > 16 {
                Vec::new()
            } else {
                (1u64..(1 << flagged.len()))
                    .map(|sub| {
                        flagged
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| sub >> k & 1 == 1)
                            .fold(cur, |acc, (_, &e)| acc ^ (1 << e))
                    })
                    .filter(|m| sols.contains_key(m))
                    .collect()
            };
            let from = SignVector::from_mask(cur, v);
            match cands.len() {
                0 => {
                    events.push(TraceEvent::BranchLost { t, signs: from });
                    finished.push(b);
                }
                1 => {
                    events.push(TraceEvent::SignChange {
                        t,
                        from,
                        to: SignVector::from_mask(cands[0], v),
                    });
                    b.m = sols[&cands[0]];
                    b.masks.push(cands[0]);
                    next.push(b);
                }
                _ => {
                    events.push(TraceEvent::Fork {
                        t,
                        from,
                        to: cands.iter().map(|&c| SignVector::from_mask(c, v)).collect(),
                    });
                    for &c in &cands {
                        let mut masks = b.masks.clone();
                        masks.push(c);
                        next.push(Branch {
                            masks,
                            start: b.start,
                            m: sols[&c],
                        });
                    }
                }
            }
        }
        for &(mask, m, _) in &ev.sols {
            if next.iter().any(|b| b.masks.last() == Some(&mask)) {
                continue;
            }
            if opts.restrict.as_ref().is_some_and(|r| r.mask() != mask) {
                continue;
            }
            next.push(Branch {
                masks: vec![mask],
                start: i,
                m,
            });
        }
        next.sort_by_key(|b| (*b.masks.last().expect("nonempty"), b.start));
        next.dedup_by_key(|b| *b.masks.last().expect("nonempty"));
        active = next;
    }
    finished.append(&mut active);
    let runs = finished
        .into_iter()
        .map(|b| {
            let end = b.start + b.masks.len() - 1;
            Run {
                start_index: b.start,
                end_index: end,
                t_start: grid[b.start],
                t_end: grid[end],
                signs_start: SignVector::from_mask(b.masks[0], v),
                signs_end: SignVector::from_mask(*b.masks.last().expect("nonempty"), v),
                masks: b.masks,
            }
        })
        .collect();
    (runs, events)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * a.abs().max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn detect_flats(
    spec: &SuspensionSpec,
    grid: &[f64],
    h: f64,
    opts: &TraceOptions,
) -> Vec<FlatPosition> {
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let mut ext: Vec<f64> = (1..=opts.margin_steps)
        .rev()
        .map(|k| lo - h * k as f64)
        .filter(|&t| t > 1.0)
        .collect();
    ext.extend_from_slice(grid);
    ext.extend((1..=opts.margin_steps).map(|k| hi + h * k as f64));
    let raw: Vec<Option<Vec<f64>>> = ext.par_iter().map(|&t| feasible_raw(spec, t)).collect();
    let v = spec.v();
    let mut flats: Vec<FlatPosition> = Vec::new();
    let mut push = |t: f64, j: usize, sign: i8, kind: FlatKind| {
        if let Some(f) = flats
            .iter_mut()
            .find(|f| f.kind == kind && f.cos_sign == sign && (f.t - t).abs() <= 1e-7 * t)
        {
            if !f.edges.contains(&j) {
                f.edges.push(j);
                f.edges.sort_unstable();
            }
        } else {
            flats.push(FlatPosition {
                t,
                edges: vec![j],
                cos_sign: sign,
                kind,
            });
        }
    };
    for i in 1..ext.len() {
        let (a, b) = (&raw[i - 1], &raw[i]);
        if a.is_some() != b.is_some() {
            let tb = if a.is_some() {
                bisect_boundary(spec, ext[i - 1], ext[i])
            } else {
                bisect_boundary(spec, ext[i], ext[i - 1])
            };
            if let Some(c) = feasible_raw(spec, tb) {
                for (j, cj) in c.iter().enumerate() {
                    if 1.0 - cj.abs() < 1e-8 {
                        push(tb, j, if *cj > 0.0 { 1 } else { -1 }, FlatKind::Boundary);
                    }
                }
            }
        }
    }
    for j in 0..v {
        for sign in [1i8, -1] {
            let s = f64::from(sign);
            let g = |c: &Option<Vec<f64>>| c.as_ref().map(|c| 1.0 - s * c[j]);
            for i in 1..ext.len().saturating_sub(1) {
                let (Some(gp), Some(gi), Some(gn)) = (g(&raw[i - 1]), g(&raw[i]), g(&raw[i + 1]))
                else {
                    continue;
                };
                if !(gi <= gp && gi <= gn && gi < 0.5) {
                    continue;
                }
                let f = |t: f64| feasible_raw(spec, t).map_or(f64::INFINITY, |c| 1.0 - s * c[j]);
                let (tm, gm) = golden_min(f, ext[i - 1], ext[i + 1]);
                let (tm, gm) = if gi <= gm { (ext[i], gi) } else { (tm, gm) };
                if gm < opts.flat_tol {
                    push(tm, j, sign, FlatKind::Touch);
                }
            }
        }
    }
    flats.sort_by(|a, b| a.t.total_cmp(&b.t));
    flats
}
