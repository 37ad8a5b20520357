//! Collocation rules, the merge reduction and the first-order rank test.
//!
//! Two rules force collocated bars of a self-touching configuration to stay
//! collocated for positive time:
//! - **Rule 1.** A bar `b` collocated with an equal-length bar `b'`, where at
//!   each end of `b'` some bar leaves at an angle below 90° on `b`'s side.
//! - **Rule 2.** A bar `b` collocated with an incident equal-length bar `b'`,
//!   where a bar at the far end of `b'` forms a convex angle with `b'` that
//!   surrounds `b`.
//!
//! Conclusions become pins between coincident endpoints; rules are re-run
//! on the merged system until nothing new fires, then the merged system's
//! infinitesimal degrees of freedom decide the verdict.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt::Write;

use nalgebra::DMatrix;

use crate::geom::{angle_at, convex_angle_surrounds, swept_angle, Point, Segment, Side};
use crate::model::{Configuration, Edge, Linkage};
use crate::touching::{CollocationGroup, TouchError, TouchingConfig};
use crate::unionfind::UnionFind;
use crate::{TOL_ANG, TOL_GEOM, TOL_LEN, TOL_RANK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Rule1,
    Rule2,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Rule1 => "Rule1",
            Rule::Rule2 => "Rule2",
        }
    }
}

/// One rule firing. Conclusion: `bar` stays collocated with `collocated_with`
/// for positive time.
///
/// For Rule 1, `witnesses` are the bars enclosing `collocated_with`, one per
/// end. For Rule 2, `bar` is the bar whose far end carries the single
/// witness and `collocated_with` is the incident bar it surrounds.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleApplication {
    pub rule: Rule,
    pub bar: usize,
    pub collocated_with: usize,
    pub witnesses: Vec<usize>,
    /// Reduction pass (from 0) in which the rule fired.
    pub pass: usize,
}

impl RuleApplication {
    pub fn describe(&self, l: &Linkage) -> String {
        let ws: Vec<String> = self.witnesses.iter().map(|&w| l.label(w)).collect();
        match self.rule {
            Rule::Rule1 => format!(
                "Rule 1: {} stays collocated with {} (enclosing bars {})",
                l.label(self.bar),
                l.label(self.collocated_with),
                ws.join(" and ")
            ),
            Rule::Rule2 => format!(
                "Rule 2: {} stays collocated with the adjacent bar {} (enclosing bar {})",
                l.label(self.bar),
                l.label(self.collocated_with),
                ws.join(", ")
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Rigid,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Rigid => "rigid",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionTrace {
    pub steps: Vec<RuleApplication>,
    /// Vertex pairs forced to coincide, in the order they were added.
    pub pins: Vec<(usize, usize)>,
    pub verdict: Verdict,
    /// Infinitesimal dof of the merged system, measured on the ε₀/2 drawing.
    pub dof: usize,
    /// The same count on the touching limit itself, where collinear bars make
    /// the first-order test degenerate. Reported, never used for the verdict.
    pub dof_touching: usize,
    pub passes: usize,
}

impl ReductionTrace {
    /// Human-readable log of the reduction.
    pub fn proof_log(&self, l: &Linkage) -> String {
        let mut s = String::new();
        let mut pass = usize::MAX;
        for st in &self.steps {
            if st.pass != pass {
                pass = st.pass;
                let _ = writeln!(s, "pass {}:", pass + 1);
            }
            let _ = writeln!(s, "  {}", st.describe(l));
        }
        if self.steps.is_empty() {
            let _ = writeln!(s, "no rule applies");
        }
        let pins: Vec<String> = self.pins.iter().map(|&(a, b)| format!("{}={}", l.vertices()[a], l.vertices()[b])).collect();
        let _ = writeln!(s, "pins: {}", if pins.is_empty() { String::from("none") } else { pins.join(", ") });
        let _ = writeln!(s, "infinitesimal dof of the merged system: {} (touching limit: {})", self.dof, self.dof_touching);
        let _ = write!(s, "verdict: {}", self.verdict.name());
        if self.verdict == Verdict::Rigid {
            let _ = write!(s, " (only rigid motions remain)");
        }
        s.push('\n');
        s
    }
}

/// Shared state for detection: the touching configuration, its collocation
/// groups and the current vertex classes.
struct Ctx<'a> {
    tc: &'a TouchingConfig,
    groups: Vec<CollocationGroup>,
    uf: UnionFind,
    /// Edges incident to each vertex.
    inc: Vec<Vec<usize>>,
}

impl<'a> Ctx<'a> {
    fn new(tc: &'a TouchingConfig) -> Result<Self, TouchError> {
        let l = tc.linkage();
        let mut uf = UnionFind::new(l.vertex_count());
        for e in 0..l.edge_count() {
            if l.length(e) <= TOL_LEN {
                let (a, b) = l.endpoints(e);
                uf.union(a, b);
            }
        }
        let inc = (0..l.vertex_count()).map(|v| l.incident(v).to_vec()).collect();
        Ok(Ctx { tc, groups: tc.collocation_groups()?, uf, inc })
    }

    fn l(&self) -> &Linkage {
        self.tc.linkage()
    }

    fn at(&self, v: usize) -> Point {
        self.tc.base().coords()[v]
    }

    fn common_group(&self, b: usize, bp: usize) -> Option<&CollocationGroup> {
        self.groups.iter().find(|g| g.contains(b) && g.contains(bp))
    }

    fn coincident(&self, p: usize, q: usize) -> bool {
        self.at(p).dist(self.at(q)) <= TOL_GEOM
    }

    /// Every coincident endpoint pair of the two bars is already pinned.
    fn fully_merged(&self, b: usize, bp: usize) -> bool {
        let (b1, b2) = self.l().endpoints(b);
        let (c1, c2) = self.l().endpoints(bp);
        [b1, b2].iter().all(|&p| [c1, c2].iter().all(|&q| !self.coincident(p, q) || self.uf.same(p, q)))
    }

    fn candidate(&self, b: usize, bp: usize) -> bool {
        let l = self.l();
        b != bp
            && l.length(b) > TOL_LEN
            && l.length(bp) > TOL_LEN
            && (l.length(b) - l.length(bp)).abs() <= TOL_LEN
            && self.common_group(b, bp).is_some()
            && !self.fully_merged(b, bp)
    }

    /// Bars leaving the class of `v`: (edge, its end outside the class).
    fn leaving(&self, v: usize, exclude: [usize; 2]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.l().vertex_count() {
            if !self.uf.same(u, v) {
                continue;
            }
            for &w in &self.inc[u] {
                let o = self.l().other_end(w, u);
                if !exclude.contains(&w) && self.l().length(w) > TOL_LEN && !self.uf.same(o, v) {
                    out.push((w, o));
                }
            }
        }
        out
    }

    /// Side of `b` relative to `bp` across the directed line `from → to`.
    fn side_of(&self, b: usize, bp: usize, from: Point, to: Point) -> Option<Side> {
        let g = self.common_group(b, bp)?;
        let dir = unit(to - from);
        // Parametrize along the given direction through the group's anchor.
        self.tc.side_along(b, bp, g.anchor, dir, 0.0)
    }

    /// Rule 1 witness test at end `p` (far end `q`) of `bp`. Returns the
    /// witness angle when `w` (leaving `p`'s class towards `o`) qualifies.
    fn rule1_witness(&self, bp: usize, p: usize, q: usize, w: usize, o: usize, side_b: Side) -> Option<f64> {
        let (pp, pq, po) = (self.at(p), self.at(q), self.at(o));
        let ang = angle_at(po, pp, pq).ok()?;
        if ang >= FRAC_PI_2 - TOL_ANG {
            return None;
        }
        let side = if ang <= TOL_ANG {
            let s = 0.5 * self.l().length(w).min(self.l().length(bp));
            self.tc.side_along(w, bp, pp, unit(pq - pp), s)?
        } else {
            Side::of(pq - pp, pp, po)?
        };
        (side == side_b).then_some(ang)
    }

    /// Rule 2 witness test: `bp` runs from the shared class end `v` to the
    /// apex `a`; `w` leaves `a`'s class towards `o`. Returns the swept angle.
    fn rule2_witness(&self, b: usize, bp: usize, v: usize, a: usize, w: usize, o: usize, side_b: Side) -> Option<f64> {
        let (pv, pa, po) = (self.at(v), self.at(a), self.at(o));
        let b_seg = Segment { a: pa, b: pv };
        // Listed apex-first so the shared vertex is found even when w folds back onto b'.
        let bp_seg = Segment { a: pa, b: pv };
        let w_seg = Segment { a: pa, b: po };
        if !convex_angle_surrounds(b_seg, bp_seg, w_seg, side_b).ok()? {
            return None;
        }
        let ang = angle_at(po, pa, pv).ok()?;
        if ang <= TOL_ANG {
            // Folding back along b': the sector is degenerate, so w must
            // itself lie on b's side.
            let s = 0.5 * self.l().length(w).min(self.l().length(bp));
            if self.tc.side_along(w, bp, pa, unit(pv - pa), s)? != side_b {
                return None;
            }
            let _ = b;
            return Some(0.0);
        }
        Some(swept_angle(pv - pa, po - pa, side_b))
    }

    fn detect_rule1(&self, pass: usize) -> Vec<RuleApplication> {
        let m = self.l().edge_count();
        let mut out = Vec::new();
        for b in 0..m {
            for bp in 0..m {
                if !self.candidate(b, bp) {
                    continue;
                }
                let (p1, p2) = self.l().endpoints(bp);
                let mut ws = Vec::new();
                for (p, q) in [(p1, p2), (p2, p1)] {
                    let Some(side_b) = self.side_of(b, bp, self.at(p), self.at(q)) else { break };
                    let best = self
                        .leaving(p, [b, bp])
                        .into_iter()
                        .filter_map(|(w, o)| self.rule1_witness(bp, p, q, w, o, side_b).map(|ang| (ang, self.l().label(w), w)))
                        .min_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
                    match best {
                        Some((_, _, w)) => ws.push(w),
                        None => break,
                    }
                }
                if ws.len() == 2 {
                    out.push(RuleApplication { rule: Rule::Rule1, bar: b, collocated_with: bp, witnesses: ws, pass });
                }
            }
        }
        out
    }

    fn detect_rule2(&self, pass: usize) -> Vec<RuleApplication> {
        let m = self.l().edge_count();
        let mut out = Vec::new();
        for b in 0..m {
            for bp in 0..m {
                if !self.candidate(b, bp) {
                    continue;
                }
                if let Some(w) = self.rule2_for(b, bp) {
                    out.push(RuleApplication { rule: Rule::Rule2, bar: bp, collocated_with: b, witnesses: vec![w], pass });
                }
            }
        }
        out
    }

    fn rule2_for(&self, b: usize, bp: usize) -> Option<usize> {
        let (b1, b2) = self.l().endpoints(b);
        let (c1, c2) = self.l().endpoints(bp);
        for (v, a) in [(c1, c2), (c2, c1)] {
            if !(self.uf.same(v, b1) || self.uf.same(v, b2)) || self.uf.same(v, a) {
                continue;
            }
            let Some(side_b) = self.side_of(b, bp, self.at(a), self.at(v)) else { continue };
            let best = self
                .leaving(a, [b, bp])
                .into_iter()
                .filter_map(|(w, o)| self.rule2_witness(b, bp, v, a, w, o, side_b).map(|ang| (ang, self.l().label(w), w)))
                .min_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
            if let Some((_, _, w)) = best {
                return Some(w);
            }
        }
        None
    }

    /// Re-checks one application against the current classes without searching.
    fn certify(&self, app: &RuleApplication) -> Result<(), String> {
        let l = self.l();
        let name = || app.describe(l);
        match app.rule {
            Rule::Rule1 => {
                let (b, bp) = (app.bar, app.collocated_with);
                if !self.candidate(b, bp) {
                    return Err(format!("{}: bars are not equal-length collocated and unmerged", name()));
                }
                let (p1, p2) = l.endpoints(bp);
                if app.witnesses.len() != 2 {
                    return Err(format!("{}: needs one witness per end", name()));
                }
                for ((p, q), &w) in [(p1, p2), (p2, p1)].into_iter().zip(&app.witnesses) {
                    let side_b = self.side_of(b, bp, self.at(p), self.at(q)).ok_or_else(|| format!("{}: side undefined", name()))?;
                    let ok = self.leaving(p, [b, bp]).into_iter().any(|(x, o)| x == w && self.rule1_witness(bp, p, q, w, o, side_b).is_some());
                    if !ok {
                        return Err(format!("{}: witness {} fails at {}", name(), l.label(w), l.vertices()[p]));
                    }
                }
                Ok(())
            }
            Rule::Rule2 => {
                let (b, bp) = (app.collocated_with, app.bar);
                if !self.candidate(b, bp) || l.shared_vertex(b, bp).is_none() && !self.shares_class(b, bp) {
                    return Err(format!("{}: bars are not incident equal-length collocated and unmerged", name()));
                }
                let [w] = app.witnesses[..] else {
                    return Err(format!("{}: needs exactly one witness", name()));
                };
                let (c1, c2) = l.endpoints(bp);
                let (b1, b2) = l.endpoints(b);
                for (v, a) in [(c1, c2), (c2, c1)] {
                    if !(self.uf.same(v, b1) || self.uf.same(v, b2)) || self.uf.same(v, a) {
                        continue;
                    }
                    let Some(side_b) = self.side_of(b, bp, self.at(a), self.at(v)) else { continue };
                    if self.leaving(a, [b, bp]).into_iter().any(|(x, o)| x == w && self.rule2_witness(b, bp, v, a, w, o, side_b).is_some()) {
                        return Ok(());
                    }
                }
                Err(format!("{}: witness does not surround", name()))
            }
        }
    }

    fn shares_class(&self, b: usize, bp: usize) -> bool {
        let (b1, b2) = self.l().endpoints(b);
        let (c1, c2) = self.l().endpoints(bp);
        [b1, b2].iter().any(|&p| [c1, c2].iter().any(|&q| self.uf.same(p, q)))
    }

    /// Pins the coincident endpoint pairs of an application's two bars.
    fn merge(&mut self, app: &RuleApplication, pins: &mut Vec<(usize, usize)>) {
        let (b1, b2) = self.l().endpoints(app.bar);
        let (c1, c2) = self.l().endpoints(app.collocated_with);
        for p in [b1, b2] {
            for q in [c1, c2] {
                if self.coincident(p, q) && self.uf.union(p, q) {
                    pins.push((p.min(q), p.max(q)));
                }
            }
        }
    }
}

fn unit(d: Point) -> Point {
    d * (1.0 / d.norm())
}

fn sorted(mut apps: Vec<RuleApplication>, l: &Linkage) -> Vec<RuleApplication> {
    apps.sort_by(|x, y| (l.label(x.bar), l.label(x.collocated_with)).cmp(&(l.label(y.bar), l.label(y.collocated_with))));
    apps
}

/// All Rule 1 firings on the unmerged configuration, sorted by (bar, partner) label.
pub fn detect_rule1(tc: &TouchingConfig) -> Result<Vec<RuleApplication>, TouchError> {
    let ctx = Ctx::new(tc)?;
    Ok(sorted(ctx.detect_rule1(0), tc.linkage()))
}

/// All Rule 2 firings on the unmerged configuration, sorted by (bar, partner) label.
pub fn detect_rule2(tc: &TouchingConfig) -> Result<Vec<RuleApplication>, TouchError> {
    let ctx = Ctx::new(tc)?;
    Ok(sorted(ctx.detect_rule2(0), tc.linkage()))
}

/// Runs both rules to a fixed point, then the rank test on the merged system.
pub fn reduce(tc: &TouchingConfig) -> Result<ReductionTrace, TouchError> {
    let l = tc.linkage();
    let mut ctx = Ctx::new(tc)?;
    let mut steps = Vec::new();
    let mut pins = Vec::new();
    let mut pass = 0;
    loop {
        let mut apps = sorted(ctx.detect_rule1(pass), l);
        apps.extend(sorted(ctx.detect_rule2(pass), l));
        if apps.is_empty() {
            break;
        }
        for a in &apps {
            ctx.merge(a, &mut pins);
        }
        steps.extend(apps);
        pass += 1;
    }
    let dof = infinitesimal_dof(&tc.pulled_apart(tc.eps0() / 2.0), &pins);
    let dof_touching = infinitesimal_dof(tc.base(), &pins);
    let verdict = if dof == 3 { Verdict::Rigid } else { Verdict::Inconclusive };
    Ok(ReductionTrace { steps, pins, verdict, dof, dof_touching, passes: pass })
}

/// Independently replays a trace: every step is re-certified against the
/// classes in force at its pass, and the pins and dof are recomputed.
pub fn verify(tc: &TouchingConfig, trace: &ReductionTrace) -> Result<(), String> {
    let mut ctx = Ctx::new(tc).map_err(|e| format!("{e}"))?;
    let mut pins = Vec::new();
    let mut i = 0;
    let mut pass = 0;
    while i < trace.steps.len() {
        let start = i;
        while i < trace.steps.len() && trace.steps[i].pass == pass {
            ctx.certify(&trace.steps[i])?;
            i += 1;
        }
        if i == start {
            return Err(format!("pass {pass} is empty"));
        }
        for a in &trace.steps[start..i] {
            ctx.merge(a, &mut pins);
        }
        pass += 1;
    }
    if pins != trace.pins {
        return Err("pins do not follow from the steps".into());
    }
    let dof = infinitesimal_dof(&tc.pulled_apart(tc.eps0() / 2.0), &pins);
    if dof != trace.dof {
        return Err(format!("dof is {dof}, trace says {}", trace.dof));
    }
    if (trace.verdict == Verdict::Rigid) != (dof == 3) {
        return Err("verdict does not match dof".into());
    }
    Ok(())
}

/// Dimension of the first-order motion space.
///
/// Pins and zero-length edges identify vertices; each identified class is
/// moved to its centroid. The constraint matrix has one row per
/// positive-length edge and two rows per identification; rank is counted
/// with singular values above `TOL_RANK` times the largest.
pub fn infinitesimal_dof(c: &Configuration, pins: &[(usize, usize)]) -> usize {
    let l = c.linkage();
    let n = l.vertex_count();
    let mut uf = UnionFind::new(n);
    let mut ties: Vec<(usize, usize)> = pins.to_vec();
    for e in 0..l.edge_count() {
        if l.length(e) <= TOL_LEN {
            ties.push(l.endpoints(e));
        }
    }
    for &(a, b) in &ties {
        uf.union(a, b);
    }
    let mut sum = vec![(Point::default(), 0usize); n];
    for v in 0..n {
        let r = uf.find(v);
        sum[r].0 = sum[r].0 + c.coords()[v];
        sum[r].1 += 1;
    }
    let pos: Vec<Point> = (0..n).map(|v| {
        let (s, k) = sum[uf.find(v)];
        s * (1.0 / k as f64)
    }).collect();

    let positive: Vec<usize> = (0..l.edge_count()).filter(|&e| l.length(e) > TOL_LEN).collect();
    let rows = positive.len() + 2 * ties.len();
    if rows == 0 {
        return 2 * n;
    }
    let mut m = DMatrix::<f64>::zeros(rows, 2 * n);
    for (r, &e) in positive.iter().enumerate() {
        let (a, b) = l.endpoints(e);
        let d = pos[a] - pos[b];
        m[(r, 2 * a)] = d.x;
        m[(r, 2 * a + 1)] = d.y;
        m[(r, 2 * b)] = -d.x;
        m[(r, 2 * b + 1)] = -d.y;
    }
    for (k, &(a, b)) in ties.iter().enumerate() {
        let r = positive.len() + 2 * k;
        for axis in 0..2 {
            m[(r + axis, 2 * a + axis)] = 1.0;
            m[(r + axis, 2 * b + axis)] = -1.0;
        }
    }
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let rank = if top == 0.0 { 0 } else { sv.iter().filter(|&&s| s > TOL_RANK * top).count() };
    2 * n - rank
}

/// The merged system as a linkage: one vertex per class of pinned (or
/// zero-length-joined) vertices, named by joining member names with `+`,
/// and one edge per distinct pair of classes joined by a positive-length
/// bar. Coordinates are class centroids of `c`.
pub fn merged_system(c: &Configuration, pins: &[(usize, usize)]) -> Configuration {
    let l = c.linkage();
    let n = l.vertex_count();
    let mut uf = UnionFind::new(n);
    for &(a, b) in pins {
        uf.union(a, b);
    }
    for e in 0..l.edge_count() {
        if l.length(e) <= TOL_LEN {
            let (a, b) = l.endpoints(e);
            uf.union(a, b);
        }
    }
    let mut roots: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
    roots.sort_unstable();
    roots.dedup();
    let class_of = |v: usize| roots.binary_search(&uf.find(v)).unwrap_or(0);
    let mut names = vec![Vec::new(); roots.len()];
    let mut sums = vec![(Point::default(), 0usize); roots.len()];
    for v in 0..n {
        let k = class_of(v);
        names[k].push(l.vertices()[v].as_str());
        sums[k].0 = sums[k].0 + c.coords()[v];
        sums[k].1 += 1;
    }
    let vertices: Vec<String> = names.iter().map(|ns| ns.join("+")).collect();
    let coords: Vec<Point> = sums.iter().map(|&(s, k)| s * (1.0 / k as f64)).collect();
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for e in 0..l.edge_count() {
        if l.length(e) <= TOL_LEN {
            continue;
        }
        let (a, b) = l.endpoints(e);
        let (ka, kb) = (class_of(a), class_of(b));
        if ka != kb && seen.insert((ka.min(kb), ka.max(kb))) {
            edges.push(Edge::new(&vertices[ka], &vertices[kb], l.length(e)));
        }
    }
    let linkage = Linkage::from_drawing(vertices, edges, &coords).expect("quotient of a valid linkage is valid");
    Configuration::new(Arc::new(linkage), coords).expect("centroids are finite")
}
