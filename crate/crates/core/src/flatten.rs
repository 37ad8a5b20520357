//! Flatness measure and a gradient-descent flattening heuristic.
//!
//! The solver works in edge-angle coordinates of a rooted tree, so edge
//! lengths hold exactly at every sample. A step is kept only if it lowers
//! the descent objective, moves no vertex more than
//! [`FlattenOptions::max_step`], and the straight-line sweep to it is
//! certified clear (every bisected piece moves less than the clearance at
//! its start); otherwise the step size is halved. Endpoint-and-midpoint
//! checks are not enough: adjacent bars a hair apart can swap sides in one
//! step. Success is sound but not
//! complete: failing to flatten certifies nothing.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{point_segment_distance, Point};
use crate::model::{first_contact, swept_clear, Configuration, Linkage, Motion};
use crate::{FLAT_TOL, TOL_LEN};

/// Bisection levels allowed when certifying one step.
const SWEEP_DEPTH: u32 = 6;
/// Bisection levels allowed when merging recorded steps into one sample;
/// cheap, since failing only costs an extra sample.
const MERGE_DEPTH: u32 = 1;
/// Angle steps below this (radians) count as no progress.
const MIN_ANGLE_STEP: f64 = 1e-13;

/// Σ_v (y_v² + max(0, −x_v)²) with the root moved to the origin; zero iff
/// every vertex lies on the ray from the root in direction +x.
pub fn flatness(c: &Configuration, root: usize) -> f64 {
    flatness_of(c.coords(), root)
}

fn flatness_of(coords: &[Point], root: usize) -> f64 {
    let r = coords[root];
    coords
        .iter()
        .map(|&p| {
            let d = p - r;
            let back = if d.x < 0.0 { -d.x } else { 0.0 };
            d.y * d.y + back * back
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlattenStatus {
    Flattened,
    Stalled,
    BudgetExhausted,
}

impl FlattenStatus {
    pub fn name(self) -> &'static str {
        match self {
            FlattenStatus::Flattened => "flattened",
            FlattenStatus::Stalled => "stalled",
            FlattenStatus::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FlattenError {
    UnknownRoot(usize),
    NotATree,
    Touching,
    /// `max_displacement` needs a positive-length pin edge.
    ZeroLengthPin(usize),
    NoPositiveEdge,
}

impl fmt::Display for FlattenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlattenError::UnknownRoot(r) => write!(f, "root {r} is not a vertex"),
            FlattenError::NotATree => write!(f, "flattening needs a tree"),
            FlattenError::Touching => write!(f, "start configuration is not nontouching"),
            FlattenError::ZeroLengthPin(e) => write!(f, "pin edge {e} has zero length"),
            FlattenError::NoPositiveEdge => write!(f, "no positive-length edge to pin"),
        }
    }
}

impl core::error::Error for FlattenError {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlattenOptions {
    /// Descent steps (accepted or rejected) allowed per restart.
    pub budget: u64,
    pub seed: u64,
    pub restarts: u32,
    /// Largest vertex displacement of one step.
    pub max_step: f64,
    pub initial_step: f64,
    /// Largest joint-angle change of the jitter applied before restarts ≥ 1.
    pub jitter: f64,
    /// A restart stalls when flatness improves by less than this fraction
    /// over `stall_window` steps.
    pub stall_ratio: f64,
    pub stall_window: u64,
    /// Strength and range of the vertex–edge repulsion in the descent objective.
    pub repulsion_weight: f64,
    pub repulsion_reach: f64,
}

impl Default for FlattenOptions {
    fn default() -> Self {
        FlattenOptions {
            budget: 100_000,
            seed: 0,
            restarts: 20,
            max_step: 0.01,
            initial_step: 1e-2,
            jitter: 0.5,
            stall_ratio: 1e-6,
            stall_window: 2_000,
            repulsion_weight: 0.1,
            repulsion_reach: f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlattenResult {
    pub motion: Motion,
    pub final_flatness: f64,
    pub max_displacement: f64,
    pub status: FlattenStatus,
    /// Restart that produced this result.
    pub restart: u32,
    /// Descent steps used by that restart.
    pub steps: u64,
}

/// [`flatten_with`] with default options except budget and seed.
pub fn flatten(c: &Configuration, root: usize, budget: u64, seed: u64) -> Result<FlattenResult, FlattenError> {
    flatten_with(c, root, &FlattenOptions { budget, seed, ..FlattenOptions::default() })
}

/// Runs the restarts in order and keeps the lowest final flatness (earliest
/// restart on ties). Stops early once a restart flattens.
pub fn flatten_with(c: &Configuration, root: usize, opts: &FlattenOptions) -> Result<FlattenResult, FlattenError> {
    let l = c.linkage();
    if root >= l.vertex_count() {
        return Err(FlattenError::UnknownRoot(root));
    }
    if !l.is_tree() {
        return Err(FlattenError::NotATree);
    }
    if !c.is_nontouching() {
        return Err(FlattenError::Touching);
    }
    let tree = Rooted::new(l, root);
    let pin = root_pin(l, root);
    let mut best: Option<FlattenResult> = None;
    for r in 0..opts.restarts.max(1) {
        let run = run_restart(c, &tree, opts, r);
        let md = match pin {
            Some(e) => max_displacement(&run.motion, e)?,
            None => 0.0,
        };
        let res = FlattenResult {
            status: if run.flatness <= FLAT_TOL { FlattenStatus::Flattened } else { run.status },
            final_flatness: run.flatness,
            max_displacement: md,
            motion: run.motion,
            restart: r,
            steps: run.steps,
        };
        let done = res.status == FlattenStatus::Flattened;
        if best.as_ref().is_none_or(|b| res.final_flatness < b.final_flatness) {
            best = Some(res);
        }
        if done {
            break;
        }
    }
    Ok(best.expect("at least one restart"))
}

/// The first positive-length edge at the root in rotation order, else the
/// first positive-length edge.
fn root_pin(l: &Linkage, root: usize) -> Option<usize> {
    l.incident(root).iter().copied().find(|&e| l.length(e) > TOL_LEN).or_else(|| (0..l.edge_count()).find(|&e| l.length(e) > TOL_LEN))
}

/// Flattens each connected component separately. The root of a component
/// is `preferred` if it belongs to it, else its first vertex.
pub fn flatten_components(c: &Configuration, preferred: &str, opts: &FlattenOptions) -> Result<Vec<(Configuration, FlattenResult)>, FlattenError> {
    c.components()
        .into_iter()
        .map(|part| {
            let root = part.linkage().index_of(preferred).unwrap_or(0);
            let res = flatten_with(&part, root, opts)?;
            Ok((part, res))
        })
        .collect()
}

/// Largest vertex travel from the first sample after aligning every sample
/// so that `pin_edge` keeps its first-sample source and direction.
pub fn max_displacement(m: &Motion, pin_edge: usize) -> Result<f64, FlattenError> {
    let l = m.linkage();
    if pin_edge >= l.edge_count() || l.length(pin_edge) <= TOL_LEN {
        return Err(FlattenError::ZeroLengthPin(pin_edge));
    }
    let (a, b) = l.endpoints(pin_edge);
    let s0 = &m.samples()[0].coords;
    let (a0, d0) = (s0[a], s0[b] - s0[a]);
    let mut worst: f64 = 0.0;
    for s in m.samples() {
        let (ak, dk) = (s.coords[a], s.coords[b] - s.coords[a]);
        // Rotation taking dk onto d0.
        let (cos, sin) = {
            let n = d0.norm() * dk.norm();
            (dk.dot(d0) / n, dk.cross(d0) / n)
        };
        for (v, &p) in s.coords.iter().enumerate() {
            let q = p - ak;
            let aligned = Point::new(cos * q.x - sin * q.y, sin * q.x + cos * q.y) + a0;
            worst = worst.max(aligned.dist(s0[v]));
        }
    }
    Ok(worst)
}

/// What the solver descends. Three terms, all zero or negligible on a flat
/// nontouching chain:
/// - flatness itself;
/// - Σ_v (L_v − x_v), where L_v is the tree distance from the root: zero
///   only when every edge points in +x away from the root, i.e. in the
///   trailing state itself. It has no plateaus (flatness alone is flat
///   behind the root) and, unlike flatness, does not reward folding back
///   along the ray;
/// - a repulsion `weight · Σ (1/d − 1/reach)` over vertex–edge pairs closer
///   than `reach`, which spreads the linkage out and turns contacts into
///   sliding instead of rejected steps (an energy-driven unfolding).
struct Objective {
    root: usize,
    /// Tree distance of each vertex from the root.
    reach_len: Vec<f64>,
    /// (vertex, edge end, edge end) triples the barrier watches.
    near: Vec<(usize, usize, usize)>,
    weight: f64,
    reach: f64,
}

impl Objective {
    fn new(l: &Linkage, tree: &Rooted, weight: f64, reach: f64) -> Self {
        let root = tree.root;
        let mut reach_len = vec![0.0; l.vertex_count()];
        for &v in &tree.order[1..] {
            reach_len[v] = reach_len[tree.parent[v]] + tree.length[v];
        }
        let mut uf = crate::unionfind::UnionFind::new(l.vertex_count());
        for e in 0..l.edge_count() {
            if l.length(e) <= TOL_LEN {
                let (a, b) = l.endpoints(e);
                uf.union(a, b);
            }
        }
        let mut near = Vec::new();
        if weight > 0.0 {
            for e in 0..l.edge_count() {
                if l.length(e) <= TOL_LEN {
                    continue;
                }
                let (a, b) = l.endpoints(e);
                for v in 0..l.vertex_count() {
                    if !uf.same(v, a) && !uf.same(v, b) {
                        near.push((v, a, b));
                    }
                }
            }
        }
        Objective { root, reach_len, near, weight, reach }
    }

    fn repulsion(&self, d: f64) -> f64 {
        if d >= self.reach {
            0.0
        } else {
            self.weight * (1.0 / d - 1.0 / self.reach)
        }
    }

    fn value(&self, coords: &[Point]) -> f64 {
        let r = coords[self.root];
        let mut total = 0.0;
        for (&p, &len) in coords.iter().zip(&self.reach_len) {
            total += len - (p.x - r.x);
        }
        for &(v, a, b) in &self.near {
            let d = point_segment_distance(coords[v], coords[a], coords[b]);
            if d < self.reach {
                total += self.repulsion(d);
            }
        }
        total
    }

    /// Gradient with respect to each vertex position.
    fn point_gradient(&self, coords: &[Point], out: &mut Vec<Point>) {
        out.clear();
        out.resize(coords.len(), Point::new(-1.0, 0.0));
        for &(v, a, b) in &self.near {
            let (p, pa, pb) = (coords[v], coords[a], coords[b]);
            let ab = pb - pa;
            let t = ((p - pa).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
            let c = pa + ab * t;
            let d = p.dist(c);
            if d >= self.reach || d == 0.0 {
                continue;
            }
            // d/dd of weight·(1/d − 1/reach).
            let slope = -self.weight / (d * d);
            let u = (p - c) * (slope / d);
            out[v] = out[v] + u;
            out[a] = out[a] - u * (1.0 - t);
            out[b] = out[b] - u * t;
        }
    }
}

/// A tree hung from its root: BFS order and the edge to each parent.
struct Rooted {
    root: usize,
    order: Vec<usize>,
    parent: Vec<usize>,
    length: Vec<f64>,
}

impl Rooted {
    fn new(l: &Linkage, root: usize) -> Self {
        let n = l.vertex_count();
        let mut parent = vec![usize::MAX; n];
        let mut length = vec![0.0; n];
        let mut order = vec![root];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for &e in l.incident(v) {
                let w = l.other_end(e, v);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    length[w] = l.length(e);
                    order.push(w);
                }
            }
            i += 1;
        }
        Rooted { root, order, parent, length }
    }

    fn angles(&self, coords: &[Point]) -> Vec<f64> {
        let mut th = vec![0.0; coords.len()];
        for &v in &self.order[1..] {
            let d = coords[v] - coords[self.parent[v]];
            th[v] = libm::atan2(d.y, d.x);
        }
        th
    }

    fn place(&self, anchor: Point, th: &[f64], out: &mut [Point]) {
        out[self.root] = anchor;
        for &v in &self.order[1..] {
            let p = out[self.parent[v]];
            out[v] = p + Point::new(libm::cos(th[v]), libm::sin(th[v])) * self.length[v];
        }
    }

    /// Chain rule from vertex-position gradients to edge angles (θ_v is
    /// the angle of the edge from v's parent to v).
    fn gradient(&self, coords: &[Point], point_grad: &[Point], grad: &mut [f64]) {
        let mut acc = point_grad.to_vec();
        for &v in self.order[1..].iter().rev() {
            let e = coords[v] - coords[self.parent[v]];
            grad[v] = e.perp().dot(acc[v]);
            let p = self.parent[v];
            acc[p] = acc[p] + acc[v];
        }
        grad[self.root] = 0.0;
    }
}

fn max_shift(a: &[Point], b: &[Point]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.dist(*q)).fold(0.0, f64::max)
}

/// Collects accepted configurations into motion samples, skipping those
/// whose omission keeps every interval within `max_step` and certified clear.
struct Recorder<'a> {
    l: &'a Linkage,
    max_step: f64,
    frames: Vec<Vec<Point>>,
    pending: Option<Vec<Point>>,
}

impl<'a> Recorder<'a> {
    fn new(l: &'a Linkage, start: &[Point], max_step: f64) -> Self {
        Recorder { l, max_step, frames: vec![start.to_vec()], pending: None }
    }

    fn push(&mut self, next: &[Point]) {
        let last = self.frames.last().expect("start frame");
        let skippable = max_shift(last, next) <= self.max_step && swept_clear(self.l, last, next, MERGE_DEPTH);
        if !skippable {
            if let Some(p) = self.pending.take() {
                self.frames.push(p);
            }
        }
        self.pending = Some(next.to_vec());
    }

    fn finish(mut self, arc: Arc<Linkage>) -> Motion {
        if let Some(p) = self.pending.take() {
            self.frames.push(p);
        }
        Motion::from_frames(arc, self.frames).expect("recorded frames are valid")
    }
}

struct Run {
    motion: Motion,
    flatness: f64,
    status: FlattenStatus,
    steps: u64,
}

/// Tries to move from `cur` to the configuration with angles `th + dth`,
/// scaled down so no vertex moves more than `max_step`. Returns the new
/// coordinates if the straight-line sweep to them is certified clear, and
/// the factor `dth` was scaled by either way.
fn try_move(l: &Linkage, tree: &Rooted, cur: &[Point], th: &[f64], dth: &[f64], max_step: f64) -> (Option<(Vec<Point>, Vec<f64>)>, f64) {
    let mut scale = 1.0;
    let mut next = vec![Point::default(); cur.len()];
    let mut nth = vec![0.0; th.len()];
    for _ in 0..60 {
        for v in 0..th.len() {
            nth[v] = th[v] + scale * dth[v];
        }
        tree.place(cur[tree.root], &nth, &mut next);
        let shift = max_shift(cur, &next);
        if shift <= max_step {
            break;
        }
        scale *= 0.9 * max_step / shift;
    }
    if max_shift(cur, &next) > max_step || first_contact(l, &next).is_some() || !swept_clear(l, cur, &next, SWEEP_DEPTH) {
        return (None, scale);
    }
    (Some((next, nth)), scale)
}

fn run_restart(c: &Configuration, tree: &Rooted, opts: &FlattenOptions, restart: u32) -> Run {
    let l = c.linkage();
    let n = l.vertex_count();
    let mut cur = c.coords().to_vec();
    // Re-place from angles so lengths are exact in the solver's own arithmetic.
    let mut th = tree.angles(&cur);
    let mut rec = Recorder::new(l, &cur, opts.max_step);

    if restart > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let target: Vec<f64> = (0..n).map(|v| if v == tree.root { 0.0 } else { rng.random_range(-opts.jitter..=opts.jitter) }).collect();
        // Walk towards the jittered angles in validated steps; stop at the first blocked one.
        let mut remaining = 1.0;
        while remaining > 1e-9 {
            let dth: Vec<f64> = target.iter().map(|t| t * remaining).collect();
            match try_move(l, tree, &cur, &th, &dth, opts.max_step).0 {
                Some((next, nth)) => {
                    let used = nth.iter().zip(&th).zip(&target).map(|((a, b), t)| if *t != 0.0 { (a - b) / t } else { 0.0 }).fold(0.0_f64, f64::max);
                    remaining -= used.max(1e-9);
                    rec.push(&next);
                    cur = next;
                    th = nth;
                }
                None => break,
            }
        }
    }

    let goal = Objective::new(l, tree, opts.repulsion_weight, opts.repulsion_reach);
    let mut pg = Vec::with_capacity(n);
    let mut obj = goal.value(&cur);
    let mut f = flatness_of(&cur, tree.root);
    let mut eta = opts.initial_step;
    let mut grad = vec![0.0; n];
    let mut steps = 0;
    let mut status = FlattenStatus::BudgetExhausted;
    let mut window_start = obj;
    while steps < opts.budget {
        if f <= FLAT_TOL {
            status = FlattenStatus::Flattened;
            break;
        }
        steps += 1;
        goal.point_gradient(&cur, &mut pg);
        tree.gradient(&cur, &pg, &mut grad);
        let gmax = grad.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
        // Stalled once no angle would move by more than rounding noise.
        if eta * gmax < MIN_ANGLE_STEP {
            status = FlattenStatus::Stalled;
            break;
        }
        let dth: Vec<f64> = grad.iter().map(|g| -eta * g).collect();
        let (moved, scale) = try_move(l, tree, &cur, &th, &dth, opts.max_step);
        // Halve relative to the step actually tried, not the nominal one.
        eta *= scale;
        let accepted = moved.filter(|(next, _)| goal.value(next) < obj);
        match accepted {
            Some((next, nth)) => {
                obj = goal.value(&next);
                f = flatness_of(&next, tree.root);
                rec.push(&next);
                cur = next;
                th = nth;
                eta = (eta * 2.0).min(1e6);
            }
            None => eta *= 0.5,
        }
        if steps % opts.stall_window == 0 {
            if window_start - obj < opts.stall_ratio * window_start {
                status = FlattenStatus::Stalled;
                break;
            }
            window_start = obj;
        }
    }
    if f <= FLAT_TOL {
        status = FlattenStatus::Flattened;
    }
    Run { motion: rec.finish(c.linkage_arc().clone()), flatness: f, status, steps }
}
