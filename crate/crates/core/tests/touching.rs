use std::f64::consts::PI;

use linklock_core::constructions::{fig2_augmented, fig2_mirror, fig2_tree, fig2b_tree, random_chain, FixtureParams};
use linklock_core::touching::{TouchError, TouchingConfig};
use linklock_core::Point;
use proptest::prelude::*;

fn fig2() -> TouchingConfig {
    fig2_tree(&FixtureParams::default()).unwrap()
}

fn labels(tc: &TouchingConfig, members: &[usize]) -> Vec<String> {
    members.iter().map(|&e| tc.linkage().label(e)).collect()
}

/// The multi-bar group containing `bar`.
fn group_of(tc: &TouchingConfig, bar: &str) -> Vec<String> {
    let e = tc.linkage().edge_by_label(bar).unwrap();
    let g = tc.collocation_groups().unwrap().into_iter().find(|g| g.members.len() > 1 && g.contains(e)).unwrap();
    labels(tc, &g.members)
}

#[test]
fn fig2_top_and_bottom_groups() {
    let tc = fig2();
    assert_eq!(group_of(&tc, "CA"), ["CF", "CA", "EF", "BH", "DG", "DB"]);
    assert_eq!(group_of(&tc, "CH"), ["CH", "CG'", "BH", "E'F'", "DA'", "DF'"]);
}

fn mirror_label(bar: &str, tc: &TouchingConfig) -> String {
    let e = tc.linkage().edge_by_label(bar).unwrap();
    let (a, b) = tc.linkage().endpoints(e);
    let (ma, mb) = (fig2_mirror(&tc.linkage().vertices()[a]).unwrap(), fig2_mirror(&tc.linkage().vertices()[b]).unwrap());
    let l = tc.linkage();
    let (ia, ib) = (l.index_of(ma).unwrap(), l.index_of(mb).unwrap());
    let m = (0..l.edge_count()).find(|&x| {
        let (p, q) = l.endpoints(x);
        (p, q) == (ia, ib) || (q, p) == (ia, ib)
    });
    l.label(m.unwrap_or_else(|| panic!("mirror of {bar} is not an edge")))
}

#[test]
fn fig2_is_mirror_symmetric() {
    let tc = fig2();
    let l = tc.linkage();
    let base = tc.base();
    for v in l.vertices() {
        let p = base.coord(v).unwrap();
        let q = base.coord(fig2_mirror(v).unwrap()).unwrap();
        assert_eq!((p.x, p.y), (q.x, -q.y), "{v}");
    }
    // Mirroring the top group lists the bottom group, read from the other side.
    let top: Vec<String> = group_of(&tc, "CA").iter().map(|b| mirror_label(b, &tc)).collect();
    let mut bottom = group_of(&tc, "CH");
    bottom.reverse();
    assert_eq!(top, bottom);
}

#[test]
fn fig2_has_three_base_points_and_eleven_edges() {
    let tc = fig2();
    assert_eq!(tc.linkage().edge_count(), 11);
    let mut pts: Vec<(u64, u64)> = tc.base().coords().iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
    pts.sort_unstable();
    pts.dedup();
    assert_eq!(pts.len(), 3);
}

#[test]
fn nontouching_configuration_has_singleton_groups() {
    let c = random_chain(8, 4);
    let tc = TouchingConfig::new(c.clone(), vec![Point::default(); c.linkage().vertex_count()]).unwrap();
    let groups = tc.collocation_groups().unwrap();
    assert_eq!(groups.len(), 8);
    assert!(groups.iter().all(|g| g.members.len() == 1));
}

fn fixtures() -> Vec<(&'static str, TouchingConfig)> {
    let p = FixtureParams::default();
    vec![("fig2", fig2_tree(&p).unwrap()), ("fig2b", fig2b_tree(&p).unwrap()), ("fig2-aug", fig2_augmented(&p).unwrap())]
}

#[test]
fn pulled_apart_is_nontouching_below_eps0() {
    for (name, tc) in fixtures() {
        for eps in [tc.eps0(), tc.eps0() / 2.0, tc.eps0() / 10.0] {
            assert!(tc.pulled_apart(eps).is_nontouching(), "{name} at ε = {eps}");
        }
        // Groups are read at ε₀, ε₀/2 and ε₀/10 and must agree.
        tc.collocation_groups().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn augmented_fig2_has_21_edges_and_short_perturbed_stubs() {
    let tc = fig2_augmented(&FixtureParams::default()).unwrap();
    let l = tc.linkage();
    assert_eq!(l.edge_count(), 21);
    let zero: Vec<usize> = (0..21).filter(|&e| l.length(e) == 0.0).collect();
    assert_eq!(zero.len(), 10);
    let c = tc.perturb(0.01, 3).unwrap();
    assert!(c.is_nontouching());
    for e in zero {
        let len = c.linkage().length(e);
        assert!(len > 0.0 && len <= 0.01, "{}: {len}", l.label(e));
    }
}

#[test]
fn oversize_perturbation_names_the_safe_bound() {
    let tc = fig2();
    let safe = tc.max_safe_delta();
    match tc.perturb(2.0 * safe, 0) {
        Err(TouchError::DeltaTooLarge { max_safe, .. }) => assert!(max_safe > 0.0 && max_safe <= safe),
        other => panic!("{other:?}"),
    }
}

fn rigidly_moved(tc: &TouchingConfig, th: f64, t: Point) -> TouchingConfig {
    let (s, c) = th.sin_cos();
    let rot = |p: Point| Point::new(c * p.x - s * p.y, s * p.x + c * p.y);
    let base = tc.base().with_coords(tc.base().coords().iter().map(|&p| rot(p) + t).collect()).unwrap();
    TouchingConfig::new(base, tc.offsets().iter().map(|&o| rot(o)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn perturbation_moves_no_vertex_more_than_delta(frac in 0.001..1.0f64, seed in 0u64..10_000, aug in any::<bool>()) {
        let p = FixtureParams::default();
        let tc = if aug { fig2_augmented(&p).unwrap() } else { fig2_tree(&p).unwrap() };
        let delta = frac * tc.max_safe_delta();
        let c = tc.perturb(delta, seed).unwrap();
        prop_assert!(c.is_nontouching());
        for (a, b) in c.coords().iter().zip(tc.base().coords()) {
            prop_assert!(a.dist(*b) <= delta, "moved {} > {}", a.dist(*b), delta);
        }
        prop_assert_eq!(tc.perturb(delta, seed).unwrap(), c);
    }

    #[test]
    fn groups_are_invariant_under_rigid_motions(th in -PI..PI, tx in -3.0..3.0f64, ty in -3.0..3.0f64) {
        let tc = fig2();
        let moved = rigidly_moved(&tc, th, Point::new(tx, ty));
        let a = tc.collocation_groups().unwrap();
        let b = moved.collocation_groups().unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (g, h) in a.iter().zip(&b) {
            // The line's reference direction may flip, reversing the order.
            let mut rev = h.members.clone();
            rev.reverse();
            prop_assert!(g.members == h.members || g.members == rev, "{:?} vs {:?}", g.members, h.members);
        }
    }
}
