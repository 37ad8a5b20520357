use std::f64::consts::{FRAC_PI_2, PI};

use linklock_core::geom::{angle_at, classify_pair, convex_angle_surrounds, ContactKind, Segment, Side, Witness};
use linklock_core::Point;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Ip = (i64, i64);

fn sub(a: Ip, b: Ip) -> Ip {
    (a.0 - b.0, a.1 - b.1)
}

fn cross(a: Ip, b: Ip) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

fn dot(a: Ip, b: Ip) -> i64 {
    a.0 * b.0 + a.1 * b.1
}

/// Exact classification of two integer segments by parametric intersection:
/// solve p1 + s·(p2 − p1) = q1 + t·(q2 − q1) over the rationals.
fn oracle(p1: Ip, p2: Ip, q1: Ip, q2: Ip) -> ContactKind {
    let is_end = |x: (i128, i128, i128), ends: [Ip; 2]| {
        // x is (X, Y, W) in homogeneous form.
        ends.iter().any(|e| x.0 == e.0 as i128 * x.2 && x.1 == e.1 as i128 * x.2)
    };
    let point_contact = |x: (i128, i128, i128)| {
        if is_end(x, [p1, p2]) && is_end(x, [q1, q2]) {
            ContactKind::SharedEndpointOnly
        } else {
            ContactKind::TouchingNoncrossing
        }
    };
    // Whether integer point c lies on the closed segment ab.
    let on_seg = |c: Ip, a: Ip, b: Ip| {
        cross(sub(b, a), sub(c, a)) == 0
            && c.0 >= a.0.min(b.0)
            && c.0 <= a.0.max(b.0)
            && c.1 >= a.1.min(b.1)
            && c.1 <= a.1.max(b.1)
    };
    let hom = |c: Ip| (c.0 as i128, c.1 as i128, 1i128);
    let (dp, dq) = (sub(p2, p1), sub(q2, q1));
    match (dp == (0, 0), dq == (0, 0)) {
        (true, true) => return if p1 == q1 { ContactKind::SharedEndpointOnly } else { ContactKind::Disjoint },
        (true, false) => return if on_seg(p1, q1, q2) { point_contact(hom(p1)) } else { ContactKind::Disjoint },
        (false, true) => return if on_seg(q1, p1, p2) { point_contact(hom(q1)) } else { ContactKind::Disjoint },
        _ => {}
    }
    let den = cross(dp, dq);
    let w = sub(q1, p1);
    if den == 0 {
        if cross(dp, w) != 0 {
            return ContactKind::Disjoint;
        }
        // Collinear: q's endpoints at parameters s = dot(q − p1, dp) / |dp|².
        let l2 = dot(dp, dp);
        let (s1, s2) = (dot(sub(q1, p1), dp), dot(sub(q2, p1), dp));
        let lo = s1.min(s2).max(0);
        let hi = s1.max(s2).min(l2);
        return match hi.cmp(&lo) {
            std::cmp::Ordering::Greater => ContactKind::OverlappingCollinear,
            std::cmp::Ordering::Less => ContactKind::Disjoint,
            std::cmp::Ordering::Equal => {
                // Single point p1 + dp·lo/l2.
                let x = (p1.0 as i128 * l2 as i128 + dp.0 as i128 * lo as i128, p1.1 as i128 * l2 as i128 + dp.1 as i128 * lo as i128, l2 as i128);
                point_contact(x)
            }
        };
    }
    let (sn, tn) = (cross(w, dq), cross(w, dp));
    // Normalize to a positive denominator.
    let (sn, tn, den) = if den < 0 { (-sn, -tn, -den) } else { (sn, tn, den) };
    let inside = |n: i64| (0..=den).contains(&n);
    if !inside(sn) || !inside(tn) {
        return ContactKind::Disjoint;
    }
    if sn > 0 && sn < den && tn > 0 && tn < den {
        return ContactKind::ProperlyCrossing;
    }
    let x = (p1.0 as i128 * den as i128 + dp.0 as i128 * sn as i128, p1.1 as i128 * den as i128 + dp.1 as i128 * sn as i128, den as i128);
    point_contact(x)
}

fn fp(p: Ip, scale: f64) -> Point {
    Point::new(p.0 as f64 * scale, p.1 as f64 * scale)
}

/// Integer pairs on a small grid, with forced degenerate and collinear cases.
fn random_pair(rng: &mut ChaCha8Rng) -> [Ip; 4] {
    let mut pt = |r: i64| (rng.random_range(-r..=r), rng.random_range(-r..=r));
    let mut s = [pt(4), pt(4), pt(4), pt(4)];
    match rng.random_range(0..6) {
        0 => s[1] = s[0],
        1 => s[3] = s[2],
        2 => {
            // q on p's line.
            let d = sub(s[1], s[0]);
            let (k1, k2) = (rng.random_range(-2..=3), rng.random_range(-2..=3));
            s[2] = (s[0].0 + k1 * d.0, s[0].1 + k1 * d.1);
            s[3] = (s[0].0 + k2 * d.0, s[0].1 + k2 * d.1);
        }
        3 => s[2] = s[rng.random_range(0..2)],
        _ => {}
    }
    s
}

#[test]
fn classify_pair_matches_exact_oracle_on_ten_thousand_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut disagreements = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..10_000 {
        let [p1, p2, q1, q2] = random_pair(&mut rng);
        // Half the pairs at a scale whose products are still exact in binary.
        let scale = if i % 2 == 0 { 1.0 } else { 0.125 };
        let want = oracle(p1, p2, q1, q2);
        let got = classify_pair(fp(p1, scale), fp(p2, scale), fp(q1, scale), fp(q2, scale)).kind;
        seen.insert(want);
        if got != want {
            disagreements.push((p1, p2, q1, q2, want, got));
        }
    }
    assert!(disagreements.is_empty(), "{} disagreements, first: {:?}", disagreements.len(), disagreements.first());
    assert_eq!(seen.len(), 5, "every contact kind exercised");
}

#[test]
fn spec_examples() {
    let c = classify_pair(Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, -1.0), Point::new(1.0, 1.0));
    assert_eq!(c.kind, ContactKind::ProperlyCrossing);
    match c.witness {
        Witness::Point(w) => assert!(w.dist(Point::new(1.0, 0.0)) < 1e-12),
        other => panic!("witness {other:?}"),
    }
    let j = classify_pair(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0));
    assert_eq!(j.kind, ContactKind::SharedEndpointOnly);
    let o = classify_pair(Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(0.0, 0.0), Point::new(0.0, 1.0));
    assert_eq!(o.kind, ContactKind::OverlappingCollinear);
    match o.witness {
        Witness::Segment(a, b) => {
            let whole = (a.dist(Point::new(0.0, 0.0)) < 1e-12 && b.dist(Point::new(0.0, 1.0)) < 1e-12)
                || (b.dist(Point::new(0.0, 0.0)) < 1e-12 && a.dist(Point::new(0.0, 1.0)) < 1e-12);
            assert!(whole, "witness {a:?}-{b:?}");
        }
        other => panic!("witness {other:?}"),
    }
}

#[test]
fn angle_examples() {
    let o = Point::new(0.0, 0.0);
    assert!((angle_at(Point::new(1.0, 0.0), o, Point::new(0.0, 1.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert_eq!(angle_at(Point::new(0.0, 1.0), o, Point::new(0.0, 1.0)).unwrap(), 0.0);
    assert!((angle_at(Point::new(0.0, 1.0), o, Point::new(0.0, -1.0)).unwrap() - PI).abs() < 1e-15);
    assert!(angle_at(o, o, Point::new(0.0, 1.0)).is_err());
}

#[test]
fn quadrant_sector_examples() {
    let o = Point::new(0.0, 0.0);
    let bp = Segment::new(o, Point::new(1.0, 0.0));
    let bpp = Segment::new(o, Point::new(0.0, 1.0));
    let inside = Segment::new(o, Point::new(1.0, 1.0));
    let outside = Segment::new(o, Point::new(-1.0, 0.0));
    // The quadrant lies to the left of +x.
    assert!(convex_angle_surrounds(inside, bp, bpp, Side::Left).unwrap());
    assert!(!convex_angle_surrounds(outside, bp, bpp, Side::Left).unwrap());
}

fn pt() -> impl Strategy<Value = Point> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Point::new(x, y))
}

fn grid_pt() -> impl Strategy<Value = Point> {
    (-3i32..=3, -3i32..=3).prop_map(|(x, y)| Point::new(x as f64, y as f64))
}

fn rotate(p: Point, th: f64, t: Point) -> Point {
    let (s, c) = th.sin_cos();
    Point::new(c * p.x - s * p.y, s * p.x + c * p.y) + t
}

proptest! {
    #[test]
    fn classify_pair_is_symmetric(p1 in grid_pt(), p2 in grid_pt(), q1 in grid_pt(), q2 in grid_pt()) {
        let k = classify_pair(p1, p2, q1, q2);
        prop_assert_eq!(classify_pair(q1, q2, p1, p2), k);
        prop_assert_eq!(classify_pair(p2, p1, q1, q2), k);
        prop_assert_eq!(classify_pair(p1, p2, q2, q1), k);
    }

    #[test]
    fn classify_pair_is_symmetric_off_grid(p1 in pt(), p2 in pt(), q1 in pt(), q2 in pt()) {
        let k = classify_pair(p1, p2, q1, q2);
        prop_assert_eq!(classify_pair(q2, q1, p2, p1), k);
    }

    #[test]
    fn angle_is_symmetric_and_rigid_invariant(a in pt(), apex in pt(), b in pt(), th in -PI..PI, t in pt()) {
        prop_assume!(a.dist(apex) > 1e-3 && b.dist(apex) > 1e-3);
        let x = angle_at(a, apex, b).unwrap();
        prop_assert!((0.0..=PI).contains(&x));
        prop_assert_eq!(angle_at(b, apex, a).unwrap(), x);
        let y = angle_at(rotate(a, th, t), rotate(apex, th, t), rotate(b, th, t)).unwrap();
        prop_assert!((x - y).abs() < 1e-9, "{} vs {}", x, y);
    }
}
