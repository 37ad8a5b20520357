use linklock::render::{parse_vertex_marks, render_configuration, render_motion, render_touching, RenderError, RenderStyle};
use linklock_core::constructions::{fig2_tree, random_chain, FixtureParams};
use linklock_core::{Configuration, Motion, Point};

fn segment() -> Configuration {
    Configuration::from_drawing(vec!["a".into(), "b".into()], &[("a", "b")], vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).unwrap()
}

fn count(svg: &str, tag: &str) -> usize {
    svg.matches(tag).count()
}

#[test]
fn unit_segment_is_one_line_and_two_marks() {
    let svg = render_configuration(&segment(), &RenderStyle::default()).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert_eq!(count(&svg, "<line "), 1);
    assert_eq!(count(&svg, "<circle "), 2);
    let marks = parse_vertex_marks(&svg);
    assert_eq!(marks.len(), 2);
    assert_eq!(marks[0], ("a".to_string(), Point::new(0.0, 0.0)));
    assert_eq!(marks[1], ("b".to_string(), Point::new(1.0, 0.0)));
}

#[test]
fn pulled_apart_fig2_parses_back() {
    let tc = fig2_tree(&FixtureParams::default()).unwrap();
    let style = RenderStyle { pull_apart_epsilon: Some(0.05), ..RenderStyle::default() };
    let svg = render_touching(&tc, &style).unwrap();
    assert_eq!(count(&svg, "<line "), 11);
    let marks = parse_vertex_marks(&svg);
    assert_eq!(marks.len(), 12);
    let want = tc.pulled_apart(0.05);
    for (name, p) in marks {
        let q = want.coord(&name).unwrap();
        assert!(p.dist(q) <= 1e-6, "{name}: {p:?} vs {q:?}");
    }
}

#[test]
fn default_epsilon_is_half_the_bound_and_oversize_is_refused() {
    let tc = fig2_tree(&FixtureParams::default()).unwrap();
    let svg = render_touching(&tc, &RenderStyle::default()).unwrap();
    let want = tc.pulled_apart(tc.eps0() / 2.0);
    for (name, p) in parse_vertex_marks(&svg) {
        assert!(p.dist(want.coord(&name).unwrap()) <= 1e-6);
    }
    let style = RenderStyle { pull_apart_epsilon: Some(2.0 * tc.eps0()), ..RenderStyle::default() };
    assert!(matches!(render_touching(&tc, &style), Err(RenderError::EpsilonTooLarge { .. })));
}

#[test]
fn bad_styles_are_rejected() {
    for style in [
        RenderStyle { stroke_width: 0.0, ..RenderStyle::default() },
        RenderStyle { vertex_radius: f64::NAN, ..RenderStyle::default() },
        RenderStyle { canvas: (600.0, -1.0), ..RenderStyle::default() },
        RenderStyle { pull_apart_epsilon: Some(0.0), ..RenderStyle::default() },
    ] {
        assert!(matches!(render_configuration(&segment(), &style), Err(RenderError::BadStyle(_))));
    }
}

#[test]
fn labels_can_be_turned_off() {
    let with = render_configuration(&segment(), &RenderStyle::default()).unwrap();
    let without = render_configuration(&segment(), &RenderStyle { labels: false, ..RenderStyle::default() }).unwrap();
    assert!(count(&with, "<text") > 0);
    assert_eq!(count(&without, "<text"), 0);
}

#[test]
fn constant_motion_gives_identical_frames() {
    let c = segment();
    let frames = vec![c.coords().to_vec(); 5];
    let m = Motion::from_frames(c.linkage_arc().clone(), frames).unwrap();
    let out = render_motion(&m, &RenderStyle::default()).unwrap();
    assert_eq!(out.frames.len(), 5);
    assert!(out.frames.iter().all(|f| f == &out.frames[0]));
    assert_eq!(out.frames[0], render_configuration(&c, &RenderStyle::default()).unwrap());
    assert!(out.animated.contains("<animate"));
}

#[test]
fn moving_frames_share_one_view_box() {
    let c = random_chain(4, 3);
    let shifted: Vec<Point> = c.coords().iter().map(|&p| p + Point::new(5.0, -2.0)).collect();
    let m = Motion::from_frames(c.linkage_arc().clone(), vec![c.coords().to_vec(), shifted]).unwrap();
    let out = render_motion(&m, &RenderStyle::default()).unwrap();
    let vb = |s: &str| s.split("viewBox=\"").nth(1).unwrap().split('"').next().unwrap().to_string();
    assert_eq!(vb(&out.frames[0]), vb(&out.frames[1]));
    assert_eq!(vb(&out.frames[0]), vb(&out.animated));
    assert_ne!(out.frames[0], out.frames[1]);
}

#[test]
fn output_is_deterministic() {
    let c = random_chain(7, 11);
    let s = RenderStyle::default();
    assert_eq!(render_configuration(&c, &s).unwrap(), render_configuration(&c, &s).unwrap());
}
