//! Fixture generators: the eleven-edge locked tree, its merged form, the
//! 21-edge orthogonal variant, and flattenable controls.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::Point;
use crate::model::{first_contact, Configuration, Edge, Linkage, ModelError};
use crate::touching::{TouchError, TouchingConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixtureParams {
    /// Half-height of the vertical segment.
    pub scale: f64,
    /// Horizontal edge length of the orthogonal tree.
    pub h: f64,
    /// Vertical gap of the orthogonal tree.
    pub g: f64,
    /// Perturbation size for perturbed fixtures.
    pub delta: f64,
    pub seed: u64,
}

impl Default for FixtureParams {
    fn default() -> Self {
        FixtureParams { scale: 1.0, h: 0.01, g: 0.01, delta: 0.01, seed: 0 }
    }
}

impl FixtureParams {
    pub fn validate(&self) -> Result<(), ConstructionError> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(ConstructionError::InvalidParams(format!("scale must be positive, got {}", self.scale)));
        }
        for (name, v) in [("h", self.h), ("g", self.g), ("delta", self.delta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ConstructionError::InvalidParams(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConstructionError {
    InvalidParams(String),
    /// The orthogonal tree needs h, g > 0; use the zero-length augmentation instead.
    Degenerate,
    Model(ModelError),
    Touch(TouchError),
    UnknownFixture(String),
}

impl fmt::Display for ConstructionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionError::InvalidParams(m) => write!(f, "invalid parameters: {m}"),
            ConstructionError::Degenerate => write!(f, "h and g must be positive; use the zero-length augmented tree for the limit"),
            ConstructionError::Model(e) => write!(f, "{e}"),
            ConstructionError::Touch(e) => write!(f, "{e}"),
            ConstructionError::UnknownFixture(n) => write!(f, "unknown fixture {n:?}"),
        }
    }
}

impl core::error::Error for ConstructionError {}

impl From<ModelError> for ConstructionError {
    fn from(e: ModelError) -> Self {
        ConstructionError::Model(e)
    }
}

impl From<TouchError> for ConstructionError {
    fn from(e: TouchError) -> Self {
        ConstructionError::Touch(e)
    }
}

/// Vertex, level (+1 top, 0 middle, -1 bottom) and offset in units of scale/20.
const FIG2_VERTICES: [(&str, i32, (i32, i32)); 12] = [
    ("A", 1, (-3, -4)),
    ("B", 1, (3, 1)),
    ("C", 0, (-4, 1)),
    ("D", 0, (4, 3)),
    ("E", 0, (0, 4)),
    ("F", 1, (-3, 4)),
    ("G", 1, (3, -4)),
    ("H", -1, (1, 0)),
    ("A'", -1, (3, 1)),
    ("E'", 0, (2, 0)),
    ("F'", -1, (3, 0)),
    ("G'", -1, (1, 2)),
];

/// The six bars named in the rigidity argument, then their mirror images
/// (A↔A', B↔H, C↔D, E↔E', F↔F', G↔G'; BH is its own mirror).
const FIG2_EDGES: [(&str, &str); 11] = [
    ("C", "A"),
    ("C", "F"),
    ("E", "F"),
    ("D", "G"),
    ("D", "B"),
    ("B", "H"),
    ("D", "A'"),
    ("D", "F'"),
    ("E'", "F'"),
    ("C", "G'"),
    ("C", "H"),
];

/// The mirror involution of the eleven-edge tree's labels.
pub fn fig2_mirror(v: &str) -> Option<&'static str> {
    Some(match v {
        "A" => "A'",
        "A'" => "A",
        "B" => "H",
        "H" => "B",
        "C" => "D",
        "D" => "C",
        "E" => "E'",
        "E'" => "E",
        "F" => "F'",
        "F'" => "F",
        "G" => "G'",
        "G'" => "G",
        _ => return None,
    })
}

/// The eleven-edge locked tree as a self-touching configuration.
///
/// Every vertex sits at T = (0, s), M = (0, 0) or B = (0, -s). Bars spanning
/// T–M or M–B have length s; BH spans T–B and has length 2s. The offsets
/// reproduce the pulled-apart drawing, whose rotation system is adopted.
pub fn fig2_tree(params: &FixtureParams) -> Result<TouchingConfig, ConstructionError> {
    params.validate()?;
    let s = params.scale;
    let vertices: Vec<String> = FIG2_VERTICES.iter().map(|v| v.0.to_string()).collect();
    let base: Vec<Point> = FIG2_VERTICES.iter().map(|&(_, lv, _)| Point::new(0.0, lv as f64 * s)).collect();
    let offsets: Vec<Point> = FIG2_VERTICES.iter().map(|&(_, _, (dx, dy))| Point::new(dx as f64, dy as f64) * (0.05 * s)).collect();
    let index = |id: &str| FIG2_VERTICES.iter().position(|v| v.0 == id).expect("fixture label");
    let edges: Vec<Edge> = FIG2_EDGES
        .iter()
        .map(|&(a, b)| Edge::new(a, b, base[index(a)].dist(base[index(b)])))
        .collect();
    let drawing: Vec<Point> = base.iter().zip(&offsets).map(|(&p, &o)| p + o).collect();
    let linkage = Linkage::from_drawing(vertices, edges, &drawing)?;
    Ok(TouchingConfig::new(Configuration::new(Arc::new(linkage), base)?, offsets)?)
}

/// The merged system the reduction of [`fig2_tree`] arrives at: the three
/// levels joined by bars of length s, s and 2s. It is a degenerate triangle,
/// pulled apart by moving the middle vertex sideways.
pub fn fig2b_tree(params: &FixtureParams) -> Result<TouchingConfig, ConstructionError> {
    params.validate()?;
    let s = params.scale;
    let base = Configuration::from_drawing(
        vec!["T*".into(), "M*".into(), "Bo*".into()],
        &[("T*", "M*"), ("M*", "Bo*"), ("T*", "Bo*")],
        vec![Point::new(0.0, s), Point::new(0.0, 0.0), Point::new(0.0, -s)],
    )?;
    // Rotation from the drawing with M* pulled to the right.
    let drawing = [Point::new(0.0, s), Point::new(0.25 * s, 0.0), Point::new(0.0, -s)];
    let l = base.linkage();
    let linkage = Linkage::from_drawing(l.vertices().to_vec(), l.edges().to_vec(), &drawing)?;
    let base = Configuration::new(Arc::new(linkage), base.coords().to_vec())?;
    Ok(TouchingConfig::new(base, vec![Point::default(), Point::new(0.25 * s, 0.0), Point::default()])?)
}

/// Where the orthogonal tree has horizontal edges, one per extra incident bar.
fn branch_sites() -> Vec<(&'static str, usize)> {
    let mut deg = [0usize; 12];
    for (a, b) in FIG2_EDGES {
        for v in [a, b] {
            deg[FIG2_VERTICES.iter().position(|x| x.0 == v).expect("fixture label")] += 1;
        }
    }
    let mut out = Vec::new();
    for (i, &(v, _, _)) in FIG2_VERTICES.iter().enumerate() {
        for k in 1..deg[i] {
            // Appending to the rotation lands in the wide gap between the
            // upward and downward bars.
            out.push((v, deg[i] - 1 + k));
        }
    }
    out
}

/// [`fig2_tree`] with a zero-length pendant edge for every horizontal edge
/// of the orthogonal tree (10 in all), named like the orthogonal tree's
/// extra vertices (`C.1`, `C.2`, …).
pub fn fig2_augmented(params: &FixtureParams) -> Result<TouchingConfig, ConstructionError> {
    let tc = fig2_tree(params)?;
    let sites = branch_sites();
    let spec: Vec<(&str, usize)> = sites.iter().map(|&(v, slot)| (v, slot)).collect();
    Ok(tc.add_zero_length_edges(&spec)?)
}

/// Horizontal position (in units of h) of each bar of the orthogonal tree.
const FIG3_BAR_X: [(&str, &str, i32); 11] = [
    ("C", "F", -5),
    ("C", "A", -4),
    ("E", "F", -3),
    ("C", "H", -2),
    ("C", "G'", -1),
    ("B", "H", 0),
    ("D", "G", 1),
    ("D", "B", 2),
    ("E'", "F'", 3),
    ("D", "A'", 4),
    ("D", "F'", 5),
];

/// Which of two vertically separated copies of a level a vertex sits on.
fn fig3_stack(v: &str) -> i32 {
    match v {
        "A'" | "B" | "D" | "E" | "F" | "G'" => 1,
        _ => 0,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalTree {
    pub config: Configuration,
    /// Every vertex lies within `bound_constant · max(h, g)` of its position
    /// in the zero-length augmented base.
    pub bound_constant: f64,
}

/// The 21-edge orthogonal tree. Each vertex of the eleven-edge tree becomes
/// a horizontal path through the x positions of its bars (named `v`, `v.1`,
/// `v.2`, … from left to right); the two copies of a level are `g` apart.
pub fn fig3_orthogonal_tree(params: &FixtureParams) -> Result<OrthogonalTree, ConstructionError> {
    params.validate()?;
    if params.h == 0.0 || params.g == 0.0 {
        return Err(ConstructionError::Degenerate);
    }
    let (s, h, g) = (params.scale, params.h, params.g);
    let mut vertices: Vec<String> = Vec::new();
    let mut coords: Vec<Point> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut bound: f64 = 0.0;
    // Point of each (vertex, bar x) pair.
    let mut point_at: Vec<(&str, i32, String)> = Vec::new();
    for &(v, level, _) in FIG2_VERTICES.iter() {
        let mut xs: Vec<i32> = FIG3_BAR_X.iter().filter(|b| b.0 == v || b.1 == v).map(|b| b.2).collect();
        xs.sort_unstable();
        let stack = fig3_stack(v);
        let y = level as f64 * s + g * stack as f64;
        for (k, &x) in xs.iter().enumerate() {
            let name = if k == 0 { v.to_string() } else { format!("{v}.{k}") };
            vertices.push(name.clone());
            coords.push(Point::new(x as f64 * h, y));
            bound = bound.max(Point::new(x as f64, stack as f64).norm());
            if k > 0 {
                let prev = point_at.last().expect("previous point").2.clone();
                edges.push(Edge::new(&prev, &name, (x - xs[k - 1]) as f64 * h));
            }
            point_at.push((v, x, name));
        }
    }
    let find = |v: &str, x: i32| point_at.iter().find(|p| p.0 == v && p.1 == x).expect("bar endpoint").2.clone();
    let idx = |name: &str, vs: &[String]| vs.iter().position(|v| v == name).expect("vertex");
    for &(a, b, x) in FIG3_BAR_X.iter() {
        let (na, nb) = (find(a, x), find(b, x));
        let len = coords[idx(&na, &vertices)].dist(coords[idx(&nb, &vertices)]);
        edges.push(Edge::new(&na, &nb, len));
    }
    let linkage = Linkage::from_drawing(vertices, edges, &coords)?;
    Ok(OrthogonalTree { config: Configuration::new(Arc::new(linkage), coords)?, bound_constant: bound })
}

/// A nontouching open chain of `n` unit edges with random turns, named
/// `v0 … vn` from the root end. Turns that would make the chain touch
/// itself are resampled.
pub fn random_chain(n: usize, seed: u64) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..=n).map(|i| format!("v{i}")).collect();
    let edges: Vec<Edge> = names.windows(2).map(|w| Edge::new(&w[0], &w[1], 1.0)).collect();
    let path = |k: usize| -> Linkage {
        let vs = names[..=k].to_vec();
        let es = edges[..k].to_vec();
        let rot = (0..=k).map(|i| match (i, k) {
            (_, 0) => vec![],
            (0, _) => vec![0],
            (i, k) if i == k => vec![i - 1],
            (i, _) => vec![i - 1, i],
        }).collect();
        Linkage::new(vs, es, rot, "outer".into()).expect("path")
    };
    'restart: loop {
        let mut pts = vec![Point::new(0.0, 0.0)];
        let mut heading: f64 = rng.random_range(-core::f64::consts::PI..core::f64::consts::PI);
        for k in 1..=n {
            let prefix = path(k);
            let mut placed = false;
            for _ in 0..200 {
                let turn: f64 = if k == 1 { 0.0 } else { rng.random_range(-2.6..2.6) };
                let hd = heading + turn;
                let p = pts[k - 1] + Point::new(libm::cos(hd), libm::sin(hd));
                pts.push(p);
                if first_contact(&prefix, &pts).is_none() {
                    heading = hd;
                    placed = true;
                    break;
                }
                pts.pop();
            }
            if !placed {
                continue 'restart;
            }
        }
        let linkage = Linkage::from_drawing(names.clone(), edges.clone(), &pts).expect("chain");
        return Configuration::new(Arc::new(linkage), pts).expect("finite");
    }
}

/// An orthogonal caterpillar: a 5-edge horizontal spine with a unit tooth
/// hanging up from each of its 6 vertices.
pub fn comb() -> Configuration {
    let mut names: Vec<String> = (0..6).map(|i| format!("s{i}")).collect();
    names.extend((0..6).map(|i| format!("t{i}")));
    let mut coords: Vec<Point> = (0..6).map(|i| Point::new(i as f64, 0.0)).collect();
    coords.extend((0..6).map(|i| Point::new(i as f64, 1.0)));
    let mut pairs: Vec<(String, String)> = (0..5).map(|i| (format!("s{i}"), format!("s{}", i + 1))).collect();
    pairs.extend((0..6).map(|i| (format!("s{i}"), format!("t{i}"))));
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Configuration::from_drawing(names, &refs, coords).expect("comb")
}

/// The eleven-edge tree perturbed by `params.delta`, with bar DG removed.
/// The result is a forest of two trees.
pub fn fig2_cut(params: &FixtureParams) -> Result<Configuration, ConstructionError> {
    let tc = fig2_tree(params)?;
    let c = tc.perturb(params.delta, params.seed)?;
    let dg = c.linkage().edge_by_label("DG").expect("DG");
    Ok(c.without_edge(dg))
}

/// Named controls: `chain-4`, `chain-8`, `chain-16`, `comb`, `fig2-cut`.
pub fn control_instances(params: &FixtureParams) -> Result<Vec<(String, Configuration)>, ConstructionError> {
    let mut out = Vec::new();
    for n in [4usize, 8, 16] {
        out.push((format!("chain-{n}"), random_chain(n, params.seed)));
    }
    out.push(("comb".into(), comb()));
    out.push(("fig2-cut".into(), fig2_cut(params)?));
    Ok(out)
}
