//! Orientation, segment contact classification and angle predicates.
//!
//! All predicates are tolerant: contacts within [`TOL_GEOM`] are reported as
//! touching, never as crossing, so a `ProperlyCrossing` verdict can be trusted.

use core::cmp::Ordering;
use core::f64::consts::{PI, TAU};
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::{TOL_ANG, TOL_GEOM};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-d cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Rotation by +90°.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn lex_cmp(&self, o: &Point) -> Ordering {
        self.x.total_cmp(&o.x).then(self.y.total_cmp(&o.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn dir(&self) -> Point {
        self.b - self.a
    }

    pub fn len(&self) -> f64 {
        self.a.dist(self.b)
    }
}

/// Twice the signed area of `abc`; positive when `c` is left of `a → b`.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Distance from `p` to the closed segment `ab` (handles `a == b`).
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let l2 = ab.dot(ab);
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / l2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContactKind {
    Disjoint,
    SharedEndpointOnly,
    TouchingNoncrossing,
    ProperlyCrossing,
    OverlappingCollinear,
}

impl ContactKind {
    pub fn name(self) -> &'static str {
        match self {
            ContactKind::Disjoint => "disjoint",
            ContactKind::SharedEndpointOnly => "shared-endpoint-only",
            ContactKind::TouchingNoncrossing => "touching-noncrossing",
            ContactKind::ProperlyCrossing => "properly-crossing",
            ContactKind::OverlappingCollinear => "overlapping-collinear",
        }
    }
}

impl fmt::Display for ContactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Witness {
    None,
    Point(Point),
    Segment(Point, Point),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentPairClass {
    pub kind: ContactKind,
    pub witness: Witness,
}

impl SegmentPairClass {
    const DISJOINT: SegmentPairClass = SegmentPairClass { kind: ContactKind::Disjoint, witness: Witness::None };

    fn at(kind: ContactKind, p: Point) -> Self {
        SegmentPairClass { kind, witness: Witness::Point(p) }
    }
}

/// Classifies how the closed segments `p1p2` and `q1q2` meet.
///
/// The answer is exactly symmetric: both segments are put in a canonical
/// order before any arithmetic happens.
pub fn classify_pair(p1: Point, p2: Point, q1: Point, q2: Point) -> SegmentPairClass {
    let canon = |a: Point, b: Point| if a.lex_cmp(&b) == Ordering::Greater { (b, a) } else { (a, b) };
    let p = canon(p1, p2);
    let q = canon(q1, q2);
    let ord = p.0.lex_cmp(&q.0).then(p.1.lex_cmp(&q.1));
    let (p, q) = if ord == Ordering::Greater { (q, p) } else { (p, q) };
    classify_canonical(p.0, p.1, q.0, q.1)
}

fn classify_canonical(p1: Point, p2: Point, q1: Point, q2: Point) -> SegmentPairClass {
    let tol = TOL_GEOM;
    let lp = p1.dist(p2);
    let lq = q1.dist(q2);
    if lp <= tol && lq <= tol {
        return if p1.dist(q1) <= tol {
            SegmentPairClass::at(ContactKind::SharedEndpointOnly, p1)
        } else {
            SegmentPairClass::DISJOINT
        };
    }
    if lp <= tol {
        return point_against(p1, q1, q2);
    }
    if lq <= tol {
        return point_against(q1, p1, p2);
    }

    let u = (p2 - p1) * (1.0 / lp);
    let v = (q2 - q1) * (1.0 / lq);
    // Signed distances of each segment's endpoints from the other's line.
    let dq1 = u.cross(q1 - p1);
    let dq2 = u.cross(q2 - p1);
    let dp1 = v.cross(p1 - q1);
    let dp2 = v.cross(p2 - q1);

    let q_on_p = dq1.abs() <= tol && dq2.abs() <= tol;
    let p_on_q = dp1.abs() <= tol && dp2.abs() <= tol;
    if q_on_p || p_on_q {
        let s1 = u.dot(q1 - p1);
        let s2 = u.dot(q2 - p1);
        let lo = s1.min(s2).max(0.0);
        let hi = s1.max(s2).min(lp);
        if hi - lo > tol {
            return SegmentPairClass {
                kind: ContactKind::OverlappingCollinear,
                witness: Witness::Segment(p1 + u * lo, p1 + u * hi),
            };
        }
        if hi - lo < -tol {
            return SegmentPairClass::DISJOINT;
        }
        return point_contact(p1 + u * (0.5 * (lo + hi)), p1, p2, q1, q2);
    }

    let straddles = |a: f64, b: f64| (a > tol && b < -tol) || (a < -tol && b > tol);
    if straddles(dq1, dq2) && straddles(dp1, dp2) {
        let t = dq1 / (dq1 - dq2);
        return SegmentPairClass::at(ContactKind::ProperlyCrossing, q1 + (q2 - q1) * t);
    }

    // Not collinear and not transversal: at most one contact point, at an endpoint.
    let cands = [
        (point_segment_distance(p1, q1, q2), p1),
        (point_segment_distance(p2, q1, q2), p2),
        (point_segment_distance(q1, p1, p2), q1),
        (point_segment_distance(q2, p1, p2), q2),
    ];
    let mut best = cands[0];
    for c in &cands[1..] {
        if c.0 < best.0 {
            best = *c;
        }
    }
    if best.0 > tol {
        return SegmentPairClass::DISJOINT;
    }
    point_contact(best.1, p1, p2, q1, q2)
}

fn point_against(pt: Point, a: Point, b: Point) -> SegmentPairClass {
    if point_segment_distance(pt, a, b) > TOL_GEOM {
        SegmentPairClass::DISJOINT
    } else if pt.dist(a) <= TOL_GEOM || pt.dist(b) <= TOL_GEOM {
        SegmentPairClass::at(ContactKind::SharedEndpointOnly, pt)
    } else {
        SegmentPairClass::at(ContactKind::TouchingNoncrossing, pt)
    }
}

fn point_contact(x: Point, p1: Point, p2: Point, q1: Point, q2: Point) -> SegmentPairClass {
    let end_p = x.dist(p1) <= TOL_GEOM || x.dist(p2) <= TOL_GEOM;
    let end_q = x.dist(q1) <= TOL_GEOM || x.dist(q2) <= TOL_GEOM;
    let kind = if end_p && end_q { ContactKind::SharedEndpointOnly } else { ContactKind::TouchingNoncrossing };
    SegmentPairClass::at(kind, x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeomError {
    /// A ray of zero length has no direction.
    UndefinedAngle,
    /// The two sector arms do not share an endpoint.
    NotAdjacent,
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::UndefinedAngle => f.write_str("undefined-angle: zero-length ray"),
            GeomError::NotAdjacent => f.write_str("sector arms do not share an endpoint"),
        }
    }
}

impl core::error::Error for GeomError {}

/// Unsigned angle in `[0, π]` between the rays `apex → a` and `apex → b`.
pub fn angle_at(a: Point, apex: Point, b: Point) -> Result<f64, GeomError> {
    let u = a - apex;
    let v = b - apex;
    if u.norm() <= TOL_GEOM || v.norm() <= TOL_GEOM {
        return Err(GeomError::UndefinedAngle);
    }
    Ok(libm::atan2(u.cross(v).abs(), u.dot(v)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// Side of `p` relative to the directed line through `a` with direction `d`;
    /// `None` when `p` is on the line within tolerance.
    pub fn of(d: Point, a: Point, p: Point) -> Option<Side> {
        let n = d.norm();
        if n == 0.0 {
            return None;
        }
        let s = d.cross(p - a) / n;
        if s > TOL_GEOM {
            Some(Side::Left)
        } else if s < -TOL_GEOM {
            Some(Side::Right)
        } else {
            None
        }
    }
}

/// Angle swept from direction `from` to direction `to`, turning toward `side`
/// (counter-clockwise for `Left`), in `[0, 2π)`.
pub fn swept_angle(from: Point, to: Point, side: Side) -> f64 {
    let mut a = libm::atan2(from.cross(to), from.dot(to));
    if side == Side::Right {
        a = -a;
    }
    if a < 0.0 {
        a += TAU;
    }
    if a >= TAU {
        a -= TAU;
    }
    a
}

/// Whether the convex sector at the shared vertex of `b_prime` and
/// `b_double_prime`, swept from `b_prime` toward `side`, contains the
/// direction of `b` (taken from `b.a` to `b.b`). Boundaries count as inside.
/// A sector wider than π is not convex and contains nothing.
pub fn convex_angle_surrounds(b: Segment, b_prime: Segment, b_double_prime: Segment, side: Side) -> Result<bool, GeomError> {
    let (apex, arm1, arm2) = shared_apex(b_prime, b_double_prime).ok_or(GeomError::NotAdjacent)?;
    let d1 = arm1 - apex;
    let d2 = arm2 - apex;
    let db = b.dir();
    if d1.norm() <= TOL_GEOM || d2.norm() <= TOL_GEOM || db.norm() <= TOL_GEOM {
        return Err(GeomError::UndefinedAngle);
    }
    let sweep = swept_angle(d1, d2, side);
    // A fold back onto the first arm sweeps 0, not 2π.
    let sweep = if TAU - sweep <= TOL_ANG { 0.0 } else { sweep };
    if sweep > PI + TOL_ANG {
        return Ok(false);
    }
    let phi = swept_angle(d1, db, side);
    Ok(phi <= sweep + TOL_ANG || TAU - phi <= TOL_ANG)
}

/// Finds the endpoint shared by two segments: `(apex, far end of s, far end of t)`.
fn shared_apex(s: Segment, t: Segment) -> Option<(Point, Point, Point)> {
    for (sa, sf) in [(s.a, s.b), (s.b, s.a)] {
        for (ta, tf) in [(t.a, t.b), (t.b, t.a)] {
            if sa.dist(ta) <= TOL_GEOM {
                return Some((sa, sf, tf));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn transversal_crossing() {
        let c = classify_pair(p(0.0, 0.0), p(2.0, 0.0), p(1.0, -1.0), p(1.0, 1.0));
        assert_eq!(c.kind, ContactKind::ProperlyCrossing);
        assert_eq!(c.witness, Witness::Point(p(1.0, 0.0)));
    }

    #[test]
    fn chain_joint_is_shared_endpoint() {
        let c = classify_pair(p(0.0, 0.0), p(1.0, 0.0), p(1.0, 0.0), p(2.0, 0.0));
        assert_eq!(c.kind, ContactKind::SharedEndpointOnly);
    }

    #[test]
    fn identical_bars_overlap_fully() {
        let c = classify_pair(p(0.0, 0.0), p(0.0, 1.0), p(0.0, 0.0), p(0.0, 1.0));
        assert_eq!(c.kind, ContactKind::OverlappingCollinear);
        assert_eq!(c.witness, Witness::Segment(p(0.0, 0.0), p(0.0, 1.0)));
    }

    #[test]
    fn t_junction_touches() {
        let c = classify_pair(p(0.0, 0.0), p(2.0, 0.0), p(1.0, 0.0), p(1.0, 1.0));
        assert_eq!(c.kind, ContactKind::TouchingNoncrossing);
        let near = classify_pair(p(0.0, 0.0), p(2.0, 0.0), p(1.0, 1e-12), p(1.0, -1.0));
        assert_eq!(near.kind, ContactKind::TouchingNoncrossing);
    }

    #[test]
    fn point_segments() {
        let on = classify_pair(p(0.5, 0.0), p(0.5, 0.0), p(0.0, 0.0), p(1.0, 0.0));
        assert_eq!(on.kind, ContactKind::TouchingNoncrossing);
        let end = classify_pair(p(1.0, 0.0), p(1.0, 0.0), p(0.0, 0.0), p(1.0, 0.0));
        assert_eq!(end.kind, ContactKind::SharedEndpointOnly);
        let both = classify_pair(p(1.0, 1.0), p(1.0, 1.0), p(1.0, 1.0), p(1.0, 1.0));
        assert_eq!(both.kind, ContactKind::SharedEndpointOnly);
        let off = classify_pair(p(0.5, 0.1), p(0.5, 0.1), p(0.0, 0.0), p(1.0, 0.0));
        assert_eq!(off.kind, ContactKind::Disjoint);
    }

    #[test]
    fn collinear_gap_is_disjoint() {
        let c = classify_pair(p(0.0, 0.0), p(1.0, 0.0), p(1.5, 0.0), p(3.0, 0.0));
        assert_eq!(c.kind, ContactKind::Disjoint);
    }

    #[test]
    fn angles() {
        let o = p(0.0, 0.0);
        assert!((angle_at(p(1.0, 0.0), o, p(0.0, 1.0)).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(angle_at(p(0.0, 1.0), o, p(0.0, 1.0)).unwrap(), 0.0);
        assert!((angle_at(p(0.0, 1.0), o, p(0.0, -1.0)).unwrap() - PI).abs() < 1e-15);
        assert_eq!(angle_at(o, o, p(1.0, 0.0)), Err(GeomError::UndefinedAngle));
    }

    #[test]
    fn sector_membership() {
        let o = p(0.0, 0.0);
        let xa = Segment::new(o, p(1.0, 0.0));
        let ya = Segment::new(o, p(0.0, 1.0));
        let diag = Segment::new(o, p(1.0, 1.0));
        let back = Segment::new(o, p(-1.0, 0.0));
        assert_eq!(convex_angle_surrounds(diag, xa, ya, Side::Left), Ok(true));
        assert_eq!(convex_angle_surrounds(back, xa, ya, Side::Left), Ok(false));
        // Turning right from +x to +y sweeps 270°: not convex.
        assert_eq!(convex_angle_surrounds(diag, xa, ya, Side::Right), Ok(false));
        // Boundary directions are inside.
        assert_eq!(convex_angle_surrounds(Segment::new(o, p(0.0, 2.0)), xa, ya, Side::Left), Ok(true));
    }

    #[test]
    fn straight_sector_contains_its_arm() {
        let o = p(0.0, 0.0);
        let up = Segment::new(o, p(0.0, 1.0));
        let down = Segment::new(o, p(0.0, -1.0));
        let b = Segment::new(p(0.0, 0.0), p(0.0, 1.0));
        assert_eq!(convex_angle_surrounds(b, up, down, Side::Left), Ok(true));
        assert_eq!(convex_angle_surrounds(b, up, down, Side::Right), Ok(true));
    }

    #[test]
    fn folded_sector_is_a_ray() {
        let o = p(0.0, 0.0);
        let up = Segment::new(o, p(0.0, 1.0));
        let up2 = Segment::new(o, p(0.0, 0.5));
        assert_eq!(convex_angle_surrounds(up, up, up2, Side::Left), Ok(true));
        let tilted = Segment::new(o, p(0.1, 1.0));
        assert_eq!(convex_angle_surrounds(tilted, up, up2, Side::Right), Ok(false));
    }

    #[test]
    fn degenerate_sector_errors() {
        let o = p(0.0, 0.0);
        let z = Segment::new(o, o);
        let up = Segment::new(o, p(0.0, 1.0));
        assert_eq!(convex_angle_surrounds(up, z, up, Side::Left), Err(GeomError::UndefinedAngle));
        let far = Segment::new(p(5.0, 5.0), p(6.0, 5.0));
        assert_eq!(convex_angle_surrounds(up, up, far, Side::Left), Err(GeomError::NotAdjacent));
    }
}
