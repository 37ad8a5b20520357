//! Self-touching configurations encoded as limits of pulled-apart drawings.
//!
//! A [`TouchingConfig`] is a base configuration (which may have coincident
//! vertices and overlapping bars) plus one offset vector per vertex. The
//! drawing `base + ε·offsets` must be nontouching for every `0 < ε ≤ ε₀`;
//! which side of each other collocated bars lie on is read off that drawing.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{classify_pair, swept_angle, ContactKind, Point, Side};
use crate::model::{first_contact, Configuration, Edge, Linkage, ModelError};
use crate::{TOL_GEOM, TOL_LEN};

const BISECTION_STEPS: u32 = 20;
/// Largest tangential jitter of `perturb`, as a fraction of δ.
pub const JITTER: f64 = 0.1;
const JITTER_HALVINGS: u32 = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum TouchError {
    Model(ModelError),
    OffsetCount { expected: usize, found: usize },
    NonFiniteOffset(String),
    /// No ε in (0, 1] gives a nontouching drawing.
    NotSeparable,
    /// Side order of collocated bars changes with ε or is a tie.
    AmbiguousAnnotation(String),
    DeltaTooLarge { delta: f64, max_safe: f64 },
    NegativeDelta(f64),
    UnknownVertex(String),
    BadSlot { host: String, pos: usize, degree: usize },
}

impl fmt::Display for TouchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TouchError::Model(e) => write!(f, "{e}"),
            TouchError::OffsetCount { expected, found } => write!(f, "{found} offsets for {expected} vertices"),
            TouchError::NonFiniteOffset(v) => write!(f, "offset of {v:?} is not finite"),
            TouchError::NotSeparable => write!(f, "offsets never pull the configuration apart"),
            TouchError::AmbiguousAnnotation(m) => write!(f, "ambiguous annotation: {m}"),
            TouchError::DeltaTooLarge { delta, max_safe } => {
                write!(f, "perturbation {delta} may cross; largest safe value is {max_safe}")
            }
            TouchError::NegativeDelta(d) => write!(f, "perturbation size {d} is negative"),
            TouchError::UnknownVertex(v) => write!(f, "unknown vertex {v:?}"),
            TouchError::BadSlot { host, pos, degree } => {
                write!(f, "rotation slot {pos} at {host:?} is invalid (degree {degree})")
            }
        }
    }
}

impl core::error::Error for TouchError {}

impl From<ModelError> for TouchError {
    fn from(e: ModelError) -> Self {
        TouchError::Model(e)
    }
}

/// Bars that occupy a common stretch of one line in the base configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct CollocationGroup {
    /// Edge indices ordered across the line, in increasing direction of
    /// `normal` (the line direction turned clockwise).
    pub members: Vec<usize>,
    /// Point on the common stretch at which the order was read.
    pub anchor: Point,
    /// Unit direction of the line.
    pub direction: Point,
}

impl CollocationGroup {
    pub fn normal(&self) -> Point {
        -self.direction.perp()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.members.contains(&e)
    }

    pub fn position(&self, e: usize) -> Option<usize> {
        self.members.iter().position(|&m| m == e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TouchingConfig {
    base: Configuration,
    offsets: Vec<Point>,
    eps0: f64,
}

impl TouchingConfig {
    /// Validates the offsets and computes ε₀ by bisection on (0, 1].
    pub fn new(base: Configuration, offsets: Vec<Point>) -> Result<Self, TouchError> {
        let n = base.linkage().vertex_count();
        if offsets.len() != n {
            return Err(TouchError::OffsetCount { expected: n, found: offsets.len() });
        }
        if let Some(i) = offsets.iter().position(|o| !o.is_finite()) {
            return Err(TouchError::NonFiniteOffset(base.linkage().vertices()[i].clone()));
        }
        base.check_lengths()?;
        let mut tc = TouchingConfig { base, offsets, eps0: 0.0 };
        tc.eps0 = tc.bisect_eps0().ok_or(TouchError::NotSeparable)?;
        Ok(tc)
    }

    fn separated_at(&self, eps: f64) -> bool {
        first_contact(self.base.linkage(), &self.pulled_coords(eps)).is_none()
    }

    fn bisect_eps0(&self) -> Option<f64> {
        if self.separated_at(1.0) {
            return Some(1.0);
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if self.separated_at(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo > 0.0).then_some(lo)
    }

    pub fn base(&self) -> &Configuration {
        &self.base
    }

    pub fn linkage(&self) -> &Linkage {
        self.base.linkage()
    }

    pub fn offsets(&self) -> &[Point] {
        &self.offsets
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn max_offset_norm(&self) -> f64 {
        self.offsets.iter().map(|o| o.norm()).fold(0.0, f64::max)
    }

    fn pulled_coords(&self, eps: f64) -> Vec<Point> {
        self.base.coords().iter().zip(&self.offsets).map(|(&p, &o)| p + o * eps).collect()
    }

    /// `base + ε·offsets`, on the base linkage (lengths are off by O(ε)).
    pub fn pulled_apart(&self, eps: f64) -> Configuration {
        self.base.with_coords(self.pulled_coords(eps)).expect("finite offsets give finite coordinates")
    }

    /// Signed position of edge `e` across the directed line through `origin`
    /// with unit direction `dir`, at line parameter `t`, in the drawing
    /// pulled apart by `eps`. Positive values are on the right of `dir`.
    /// `None` if the pulled-apart edge is (nearly) perpendicular to the line.
    pub fn transverse_position(&self, e: usize, origin: Point, dir: Point, t: f64, eps: f64) -> Option<f64> {
        let (a, b) = self.linkage().endpoints(e);
        let pa = self.base.coords()[a] + self.offsets[a] * eps - origin;
        let pb = self.base.coords()[b] + self.offsets[b] * eps - origin;
        let n = -dir.perp();
        let (ta, tb) = (pa.dot(dir), pb.dot(dir));
        if (tb - ta).abs() <= TOL_GEOM {
            return None;
        }
        let u = (t - ta) / (tb - ta);
        Some(pa.dot(n) + u * (pb.dot(n) - pa.dot(n)))
    }

    /// Side of edge `x` relative to edge `reference`, both running along the
    /// directed line `origin + t·dir`, compared at parameter `t` in the
    /// ε₀/10 drawing. `None` on a tie.
    pub fn side_along(&self, x: usize, reference: usize, origin: Point, dir: Point, t: f64) -> Option<Side> {
        let eps = self.eps0 / 10.0;
        let px = self.transverse_position(x, origin, dir, t, eps)?;
        let pr = self.transverse_position(reference, origin, dir, t, eps)?;
        let d = px - pr;
        if d.abs() <= TOL_GEOM * eps {
            None
        } else if d > 0.0 {
            Some(Side::Right)
        } else {
            Some(Side::Left)
        }
    }

    /// Maximal sets of bars sharing a common stretch of one line in the base,
    /// each ordered across the line. Bars that overlap nothing (including
    /// zero-length edges) form singleton groups. A bar whose overlaps differ
    /// along its length can belong to several groups.
    pub fn collocation_groups(&self) -> Result<Vec<CollocationGroup>, TouchError> {
        let l = self.linkage();
        let coords = self.base.coords();
        let m = l.edge_count();
        let seg = |e: usize| {
            let (a, b) = l.endpoints(e);
            (coords[a], coords[b])
        };
        let positive: Vec<usize> = (0..m).filter(|&e| l.length(e) > TOL_LEN).collect();
        let mut uf = crate::unionfind::UnionFind::new(m);
        for (i, &e) in positive.iter().enumerate() {
            for &f in &positive[i + 1..] {
                let ((p1, p2), (q1, q2)) = (seg(e), seg(f));
                if classify_pair(p1, p2, q1, q2).kind == ContactKind::OverlappingCollinear {
                    uf.union(e, f);
                }
            }
        }
        let mut groups = Vec::new();
        let mut grouped = vec![false; m];
        let mut roots: Vec<usize> = positive.iter().map(|&e| uf.find(e)).collect();
        roots.sort_unstable();
        roots.dedup();
        for r in roots {
            let comp: Vec<usize> = positive.iter().copied().filter(|&e| uf.find(e) == r).collect();
            if comp.len() < 2 {
                continue;
            }
            let (o, q) = seg(comp[0]);
            let mut dir = (q - o) * (1.0 / o.dist(q));
            if dir.x < 0.0 || (dir.x == 0.0 && dir.y < 0.0) {
                dir = -dir;
            }
            let span = |e: usize| {
                let (p1, p2) = seg(e);
                let (t1, t2) = ((p1 - o).dot(dir), (p2 - o).dot(dir));
                (t1.min(t2), t1.max(t2))
            };
            let mut cuts: Vec<f64> = comp.iter().flat_map(|&e| {
                let (s, t) = span(e);
                [s, t]
            }).collect();
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|a, b| (*a - *b).abs() <= TOL_GEOM);
            let mut covers: Vec<(BTreeSet<usize>, f64)> = Vec::new();
            for w in cuts.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                let set: BTreeSet<usize> = comp
                    .iter()
                    .copied()
                    .filter(|&e| {
                        let (s, t) = span(e);
                        s <= w[0] + TOL_GEOM && t >= w[1] - TOL_GEOM
                    })
                    .collect();
                if !set.is_empty() && !covers.iter().any(|(c, _)| *c == set) {
                    covers.push((set, mid));
                }
            }
            let maximal: Vec<&(BTreeSet<usize>, f64)> =
                covers.iter().filter(|(c, _)| !covers.iter().any(|(d, _)| d != c && c.is_subset(d))).collect();
            for (set, t) in maximal {
                for &e in set {
                    grouped[e] = true;
                }
                let members = self.order_across(set, o, dir, *t)?;
                groups.push(CollocationGroup { members, anchor: o + dir * *t, direction: dir });
            }
        }
        for e in 0..m {
            if !grouped[e] {
                let (p1, p2) = seg(e);
                let d = p2 - p1;
                let direction = if d.norm() > 0.0 { d * (1.0 / d.norm()) } else { Point::new(1.0, 0.0) };
                groups.push(CollocationGroup { members: vec![e], anchor: p1.lerp(p2, 0.5), direction });
            }
        }
        groups.sort_by(|a, b| a.members.iter().min().cmp(&b.members.iter().min()).then(a.members.len().cmp(&b.members.len())));
        Ok(groups)
    }

    fn order_across(&self, set: &BTreeSet<usize>, o: Point, dir: Point, t: f64) -> Result<Vec<usize>, TouchError> {
        let names = |v: &[usize]| v.iter().map(|&e| self.linkage().label(e)).collect::<Vec<_>>().join(", ");
        let mut reference: Option<Vec<usize>> = None;
        for eps in [self.eps0, self.eps0 / 2.0, self.eps0 / 10.0] {
            let mut pos = Vec::with_capacity(set.len());
            for &e in set {
                let p = self
                    .transverse_position(e, o, dir, t, eps)
                    .ok_or_else(|| TouchError::AmbiguousAnnotation(format!("{} turns across its line", self.linkage().label(e))))?;
                pos.push((p, e));
            }
            pos.sort_by(|a, b| a.0.total_cmp(&b.0));
            if let Some(w) = pos.windows(2).find(|w| w[1].0 - w[0].0 <= TOL_GEOM * eps) {
                return Err(TouchError::AmbiguousAnnotation(format!("{} and {} tie at ε = {eps}", self.linkage().label(w[0].1), self.linkage().label(w[1].1))));
            }
            let order: Vec<usize> = pos.into_iter().map(|(_, e)| e).collect();
            match &reference {
                None => reference = Some(order),
                Some(r) if *r != order => {
                    return Err(TouchError::AmbiguousAnnotation(format!("order [{}] becomes [{}] at ε = {eps}", names(r), names(&order))));
                }
                _ => {}
            }
        }
        Ok(reference.unwrap_or_default())
    }

    /// A δ-perturbation that keeps the side combinatorics: each vertex moves
    /// by `δ·offset/M` plus a seeded tangential jitter of at most δ/10, where
    /// M is the largest offset norm; displacements are clipped to δ. If the
    /// jitter makes edges touch, its amplitude is halved (same random draws)
    /// until they do not, ending at zero jitter, which is the drawing pulled
    /// apart by δ/M. Edge lengths are re-measured. δ = 0 returns the base.
    ///
    /// δ above ε₀·M is refused with that bound as the safe value.
    pub fn perturb(&self, delta: f64, seed: u64) -> Result<Configuration, TouchError> {
        if !(delta >= 0.0) {
            return Err(TouchError::NegativeDelta(delta));
        }
        if delta == 0.0 {
            return Ok(self.base.clone());
        }
        let ceiling = self.max_safe_delta();
        if delta > ceiling {
            return Err(TouchError::DeltaTooLarge { delta, max_safe: ceiling });
        }
        let mut amp = JITTER;
        for _ in 0..JITTER_HALVINGS {
            let coords = self.perturbed_coords(delta, seed, amp);
            if first_contact(self.linkage(), &coords).is_none() {
                return Ok(self.base.with_coords(coords)?.remeasured());
            }
            amp *= 0.5;
        }
        let coords = self.perturbed_coords(delta, seed, 0.0);
        if first_contact(self.linkage(), &coords).is_some() {
            return Err(TouchError::DeltaTooLarge { delta, max_safe: self.bisect_safe(delta) });
        }
        Ok(self.base.with_coords(coords)?.remeasured())
    }

    /// ε₀ · M: the largest δ `perturb` accepts.
    pub fn max_safe_delta(&self) -> f64 {
        self.eps0 * self.max_offset_norm()
    }

    fn perturbed_coords(&self, delta: f64, seed: u64, amp: f64) -> Vec<Point> {
        let m = self.max_offset_norm();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.base
            .coords()
            .iter()
            .zip(&self.offsets)
            .map(|(&p, &o)| {
                let j: f64 = rng.random_range(-1.0..=1.0) * amp;
                let n = o.norm();
                let mut d = o * (delta / m);
                if n > 0.0 {
                    d = d + o.perp() * (j * delta / n);
                }
                let dn = d.norm();
                if dn > delta {
                    d = d * (delta / dn);
                }
                // Rounding in p + d can overshoot δ by an ulp or two.
                while (p + d).dist(p) > delta {
                    d = d * (1.0 - 1e-12);
                }
                p + d
            })
            .collect()
    }

    /// Largest unjittered δ below `upper` that stays nontouching. Only
    /// reached when ε₀'s sampled check missed a contact.
    fn bisect_safe(&self, upper: f64) -> f64 {
        let ok = |d: f64| first_contact(self.linkage(), &self.perturbed_coords(d, 0, 0.0)).is_none();
        let (mut lo, mut hi) = (0.0, upper);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Adds one zero-length pendant edge per `(host, slot)`, in order. The new
    /// vertex is named `host.k` (smallest unused k ≥ 1) and its edge is
    /// inserted at index `slot` of the host's rotation (`0..=degree`). Its
    /// offset points into the middle of the angular gap it occupies; the
    /// offset length is halved until ε₀ is at least half the old value.
    pub fn add_zero_length_edges(&self, spec: &[(&str, usize)]) -> Result<TouchingConfig, TouchError> {
        let mut tc = self.clone();
        for &(host, slot) in spec {
            tc = tc.add_one(host, slot)?;
        }
        Ok(tc)
    }

    fn add_one(&self, host: &str, slot: usize) -> Result<TouchingConfig, TouchError> {
        let l = self.linkage();
        let h = l.index_of(host).ok_or_else(|| TouchError::UnknownVertex(host.into()))?;
        let rot = l.incident(h);
        let deg = rot.len();
        if slot > deg {
            return Err(TouchError::BadSlot { host: host.into(), pos: slot, degree: deg });
        }
        let mut k = 1;
        let name = loop {
            let cand = format!("{host}.{k}");
            if l.index_of(&cand).is_none() {
                break cand;
            }
            k += 1;
        };
        // Directions of the edges around the host in the ε₀ drawing.
        let drawn = self.pulled_coords(self.eps0);
        let dir_of = |e: usize| drawn[l.other_end(e, h)] - drawn[h];
        let bisector = match deg {
            0 => Point::new(1.0, 0.0),
            _ => {
                let before = dir_of(rot[(slot + deg - 1) % deg]);
                let after = dir_of(rot[slot % deg]);
                let mut sweep = swept_angle(before, after, Side::Left);
                if deg == 1 || sweep == 0.0 {
                    sweep = core::f64::consts::TAU;
                }
                let a = libm::atan2(before.y, before.x) + 0.5 * sweep;
                Point::new(libm::cos(a), libm::sin(a))
            }
        };

        let mut vertices = l.vertices().to_vec();
        vertices.push(name.clone());
        let mut edges = l.edges().to_vec();
        let e_new = edges.len();
        edges.push(Edge::new(host, &name, 0.0));
        let mut rotation = l.rotation().to_vec();
        rotation[h].insert(slot, e_new);
        rotation.push(vec![e_new]);
        let linkage = Arc::new(Linkage::new(vertices, edges, rotation, l.outer_face().into())?);
        let mut coords = self.base.coords().to_vec();
        coords.push(coords[h]);
        let base = Configuration::new(linkage, coords)?;

        let m = self.max_offset_norm();
        let mut lambda = 0.1 * if m > 0.0 { m } else { 1.0 };
        for _ in 0..60 {
            let mut offsets = self.offsets.clone();
            offsets.push(self.offsets[h] + bisector * lambda);
            if let Ok(tc) = TouchingConfig::new(base.clone(), offsets) {
                if tc.eps0 >= 0.5 * self.eps0 {
                    return Ok(tc);
                }
            }
            lambda *= 0.5;
        }
        Err(TouchError::NotSeparable)
    }

    /// The same touching configuration with edge `e` deleted.
    pub fn without_edge(&self, e: usize) -> Result<TouchingConfig, TouchError> {
        TouchingConfig::new(self.base.without_edge(e), self.offsets.clone())
    }

    /// Vertices whose base positions coincide, as lists of indices, each list
    /// sorted and of length ≥ 1; ordered by first member.
    pub fn coincidence_classes(&self) -> Vec<Vec<usize>> {
        let c = self.base.coords();
        let mut uf = crate::unionfind::UnionFind::new(c.len());
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                if c[i].dist(c[j]) <= TOL_GEOM {
                    uf.union(i, j);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..c.len() {
            let r = uf.find(i);
            match out.iter_mut().find(|g| uf.find(g[0]) == r) {
                Some(g) => g.push(i),
                None => out.push(vec![i]),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_bars() -> TouchingConfig {
        let base = Configuration::from_drawing(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            &[("a", "b"), ("c", "d")],
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0)],
        )
        .unwrap();
        let off = vec![Point::new(0.0, 0.1), Point::new(0.0, 0.1), Point::new(0.0, -0.1), Point::new(0.0, -0.1)];
        TouchingConfig::new(base, off).unwrap()
    }

    #[test]
    fn overlapping_pair_is_one_ordered_group() {
        let tc = two_bars();
        assert_eq!(tc.eps0(), 1.0);
        let g = tc.collocation_groups().unwrap();
        assert_eq!(g.len(), 1);
        // Line direction +x, so the normal is -y: the upper bar (ab) comes first.
        assert_eq!(g[0].members, vec![0, 1]);
    }

    #[test]
    fn flipping_offsets_is_ambiguous_or_unseparable() {
        let base = two_bars().base().clone();
        let off = vec![Point::new(0.0, 0.1), Point::new(0.0, -0.1), Point::new(0.0, -0.1), Point::new(0.0, 0.1)];
        assert!(TouchingConfig::new(base, off).is_err());
    }

    #[test]
    fn zero_delta_is_identity() {
        let tc = two_bars();
        assert_eq!(tc.perturb(0.0, 7).unwrap(), *tc.base());
    }

    #[test]
    fn oversize_delta_reports_safe_bound() {
        let tc = two_bars();
        match tc.perturb(0.5, 1) {
            Err(TouchError::DeltaTooLarge { max_safe, .. }) => assert_eq!(max_safe, 0.1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_length_edge_on_unit_segment() {
        let base = Configuration::from_drawing(vec!["u".into(), "v".into()], &[("u", "v")], vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).unwrap();
        let tc = TouchingConfig::new(base, vec![Point::default(); 2]).unwrap();
        assert!(matches!(tc.add_zero_length_edges(&[("v", 2)]), Err(TouchError::BadSlot { .. })));
        let z = tc.add_zero_length_edges(&[("v", 1)]).unwrap();
        assert_eq!(z.linkage().edge_count(), 2);
        assert!(z.linkage().is_tree());
        assert_eq!(z.linkage().vertices()[2], "v.1");
        assert_eq!(z.linkage().length(1), 0.0);
        assert!(z.pulled_apart(z.eps0()).is_nontouching());
    }
}
