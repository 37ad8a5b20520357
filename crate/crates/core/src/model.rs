//! Linkages, configurations and motions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::geom::{classify_pair, orient, point_segment_distance, ContactKind, Point, SegmentPairClass};
use crate::TOL_LEN;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub length: f64,
}

impl Edge {
    pub fn new(a: &str, b: &str, length: f64) -> Self {
        Edge { a: a.into(), b: b.into(), length }
    }

    /// Concatenated endpoint ids, e.g. `"DG"`; this is how proof traces name bars.
    pub fn label(&self) -> String {
        format!("{}{}", self.a, self.b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    EmptyVertexId,
    DuplicateVertex(String),
    UnknownVertex { edge: usize, id: String },
    SelfLoop(usize),
    DuplicateEdge(usize),
    NegativeLength { edge: usize, length: f64 },
    NonFiniteLength(usize),
    /// The rotation list of a vertex is not a permutation of its incident edges.
    BadRotation(String),
    RotationVertexCount { expected: usize, found: usize },
    CoordCount { expected: usize, found: usize },
    NonFiniteCoord(String),
    LengthResidual { edge: String, residual: f64 },
    NoSamples,
    SampleTimes(String),
    NotATree,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ModelError::*;
        match self {
            EmptyVertexId => write!(f, "vertex ids must be non-empty"),
            DuplicateVertex(v) => write!(f, "duplicate vertex id {v:?}"),
            UnknownVertex { edge, id } => write!(f, "edge {edge} names unknown vertex {id:?}"),
            SelfLoop(e) => write!(f, "edge {e} is a self-loop"),
            DuplicateEdge(e) => write!(f, "edge {e} duplicates an earlier edge"),
            NegativeLength { edge, length } => write!(f, "edge {edge} has negative length {length}"),
            NonFiniteLength(e) => write!(f, "edge {e} has a non-finite length"),
            BadRotation(v) => write!(f, "rotation at {v:?} does not list exactly its incident edges"),
            RotationVertexCount { expected, found } => {
                write!(f, "rotation covers {found} vertices, linkage has {expected}")
            }
            CoordCount { expected, found } => write!(f, "{found} coordinates for {expected} vertices"),
            NonFiniteCoord(v) => write!(f, "coordinate of {v:?} is not finite"),
            LengthResidual { edge, residual } => {
                write!(f, "edge {edge} misses its length by {residual:e} (tolerance {TOL_LEN:e})")
            }
            NoSamples => write!(f, "a motion needs at least two samples"),
            SampleTimes(m) => write!(f, "sample times: {m}"),
            NotATree => write!(f, "linkage is not a tree"),
        }
    }
}

impl core::error::Error for ModelError {}

/// A simple graph with nonnegative edge lengths and a rotation system.
///
/// Fixtures are trees. Reduced rigidity systems are connected but may have
/// cycles, and cut controls are forests, so the constructor only insists on
/// a simple graph. [`Linkage::is_tree`] reports tree-ness.
#[derive(Clone, Debug, PartialEq)]
pub struct Linkage {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    rotation: Vec<Vec<usize>>,
    outer_face: String,
    index: BTreeMap<String, usize>,
    ends: Vec<(usize, usize)>,
}

impl Linkage {
    /// `rotation[v]` is the cyclic (counter-clockwise) order of edge indices at vertex `v`.
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>, rotation: Vec<Vec<usize>>, outer_face: String) -> Result<Self, ModelError> {
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if v.is_empty() {
                return Err(ModelError::EmptyVertexId);
            }
            if index.insert(v.clone(), i).is_some() {
                return Err(ModelError::DuplicateVertex(v.clone()));
            }
        }
        let mut ends = Vec::with_capacity(edges.len());
        let mut seen = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            let a = *index.get(&e.a).ok_or_else(|| ModelError::UnknownVertex { edge: i, id: e.a.clone() })?;
            let b = *index.get(&e.b).ok_or_else(|| ModelError::UnknownVertex { edge: i, id: e.b.clone() })?;
            if a == b {
                return Err(ModelError::SelfLoop(i));
            }
            if !e.length.is_finite() {
                return Err(ModelError::NonFiniteLength(i));
            }
            if e.length < 0.0 {
                return Err(ModelError::NegativeLength { edge: i, length: e.length });
            }
            if seen.insert((a.min(b), a.max(b)), i).is_some() {
                return Err(ModelError::DuplicateEdge(i));
            }
            ends.push((a, b));
        }
        if rotation.len() != vertices.len() {
            return Err(ModelError::RotationVertexCount { expected: vertices.len(), found: rotation.len() });
        }
        let mut count = vec![0usize; edges.len()];
        for (v, rot) in rotation.iter().enumerate() {
            for &e in rot {
                if e >= edges.len() || (ends[e].0 != v && ends[e].1 != v) {
                    return Err(ModelError::BadRotation(vertices[v].clone()));
                }
                count[e] += 1;
            }
        }
        if let Some(e) = count.iter().position(|&c| c != 2) {
            let (a, b) = ends[e];
            let culprit = rotation[a].iter().filter(|&&x| x == e).count();
            let v = if culprit != 1 { a } else { b };
            return Err(ModelError::BadRotation(vertices[v].clone()));
        }
        Ok(Linkage { vertices, edges, rotation, outer_face, index, ends })
    }

    /// Builds a linkage whose rotation system is read off a drawing:
    /// incident edges sorted counter-clockwise by direction, zero-length
    /// edges last (in index order).
    pub fn from_drawing(vertices: Vec<String>, edges: Vec<Edge>, coords: &[Point]) -> Result<Self, ModelError> {
        let n = vertices.len();
        if coords.len() != n {
            return Err(ModelError::CoordCount { expected: n, found: coords.len() });
        }
        let pos: BTreeMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut rotation = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            for id in [&e.a, &e.b] {
                if let Some(&v) = pos.get(id.as_str()) {
                    rotation[v].push(i);
                }
            }
        }
        for (v, rot) in rotation.iter_mut().enumerate() {
            let key = |e: usize| {
                let ed = &edges[e];
                let other = if ed.a == vertices[v] { &ed.b } else { &ed.a };
                let d = pos.get(other.as_str()).map(|&o| coords[o] - coords[v]).unwrap_or_default();
                if d.norm() == 0.0 {
                    (1u8, 0.0)
                } else {
                    (0u8, libm::atan2(d.y, d.x))
                }
            };
            rot.sort_by(|&x, &y| {
                let (kx, ky) = (key(x), key(y));
                kx.0.cmp(&ky.0).then(kx.1.total_cmp(&ky.1)).then(x.cmp(&y))
            });
        }
        Linkage::new(vertices, edges, rotation, String::from("outer"))
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn rotation(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    /// Incident edges of `v` in rotation order.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn outer_face(&self) -> &str {
        &self.outer_face
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn label(&self, e: usize) -> String {
        self.edges[e].label()
    }

    pub fn edge_by_label(&self, label: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.label() == label)
    }

    pub fn length(&self, e: usize) -> f64 {
        self.edges[e].length
    }

    /// The vertex the two edges share, if any.
    pub fn shared_vertex(&self, e: usize, f: usize) -> Option<usize> {
        let (a, b) = self.ends[e];
        let (c, d) = self.ends[f];
        if a == c || a == d {
            Some(a)
        } else if b == c || b == d {
            Some(b)
        } else {
            None
        }
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertices.len()];
        let mut out = Vec::new();
        for s in 0..self.vertices.len() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                for &e in &self.rotation[v] {
                    let w = self.other_end(e, v);
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    pub fn is_tree(&self) -> bool {
        !self.vertices.is_empty() && self.edges.len() + 1 == self.vertices.len() && self.is_connected()
    }

    /// Same graph and rotation with new edge lengths.
    pub fn with_lengths(&self, lengths: &[f64]) -> Result<Linkage, ModelError> {
        let edges = self.edges.iter().zip(lengths).map(|(e, &l)| Edge { length: l, ..e.clone() }).collect();
        Linkage::new(self.vertices.clone(), edges, self.rotation.clone(), self.outer_face.clone())
    }

    /// The linkage with edge `e` deleted; later edge indices shift down by one.
    pub fn without_edge(&self, e: usize) -> Linkage {
        let mut edges = self.edges.clone();
        edges.remove(e);
        let rotation = self
            .rotation
            .iter()
            .map(|rot| rot.iter().filter(|&&x| x != e).map(|&x| if x > e { x - 1 } else { x }).collect())
            .collect();
        Linkage::new(self.vertices.clone(), edges, rotation, self.outer_face.clone()).expect("deleting an edge keeps a valid linkage")
    }

    /// The subgraph induced by `keep` (vertex indices, any order). Returns the
    /// new linkage and, for each new vertex, its index in `self`.
    pub fn induced(&self, keep: &[usize]) -> (Linkage, Vec<usize>) {
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut order: Vec<usize> = keep.to_vec();
        order.sort_unstable();
        for (i, &v) in order.iter().enumerate() {
            map[v] = i;
        }
        let mut emap = vec![usize::MAX; self.edges.len()];
        let mut edges = Vec::new();
        for (i, &(a, b)) in self.ends.iter().enumerate() {
            if map[a] != usize::MAX && map[b] != usize::MAX {
                emap[i] = edges.len();
                edges.push(self.edges[i].clone());
            }
        }
        let rotation = order
            .iter()
            .map(|&v| self.rotation[v].iter().filter(|&&e| emap[e] != usize::MAX).map(|&e| emap[e]).collect())
            .collect();
        let vertices = order.iter().map(|&v| self.vertices[v].clone()).collect();
        let l = Linkage::new(vertices, edges, rotation, self.outer_face.clone()).expect("induced subgraph of a valid linkage is valid");
        (l, order)
    }
}

/// Vertex positions for a linkage. Lengths are not enforced at construction
/// because pulled-apart drawings only approximate them; see
/// [`Configuration::check_lengths`].
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    linkage: Arc<Linkage>,
    coords: Vec<Point>,
}

impl Configuration {
    pub fn new(linkage: Arc<Linkage>, coords: Vec<Point>) -> Result<Self, ModelError> {
        if coords.len() != linkage.vertex_count() {
            return Err(ModelError::CoordCount { expected: linkage.vertex_count(), found: coords.len() });
        }
        if let Some(i) = coords.iter().position(|p| !p.is_finite()) {
            return Err(ModelError::NonFiniteCoord(linkage.vertices()[i].clone()));
        }
        Ok(Configuration { linkage, coords })
    }

    /// A configuration whose linkage takes its lengths from the drawing.
    pub fn from_drawing(vertices: Vec<String>, pairs: &[(&str, &str)], coords: Vec<Point>) -> Result<Self, ModelError> {
        let pos: BTreeMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut edges = Vec::with_capacity(pairs.len());
        for (i, &(a, b)) in pairs.iter().enumerate() {
            let ia = *pos.get(a).ok_or_else(|| ModelError::UnknownVertex { edge: i, id: a.into() })?;
            let ib = *pos.get(b).ok_or_else(|| ModelError::UnknownVertex { edge: i, id: b.into() })?;
            let (pa, pb) = (coords.get(ia).copied().unwrap_or_default(), coords.get(ib).copied().unwrap_or_default());
            edges.push(Edge::new(a, b, pa.dist(pb)));
        }
        let linkage = Linkage::from_drawing(vertices, edges, &coords)?;
        Configuration::new(Arc::new(linkage), coords)
    }

    pub fn linkage(&self) -> &Linkage {
        &self.linkage
    }

    pub fn linkage_arc(&self) -> &Arc<Linkage> {
        &self.linkage
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn coord(&self, id: &str) -> Option<Point> {
        self.linkage.index_of(id).map(|i| self.coords[i])
    }

    pub fn with_coords(&self, coords: Vec<Point>) -> Result<Self, ModelError> {
        Configuration::new(self.linkage.clone(), coords)
    }

    pub fn edge_length_residual(&self) -> f64 {
        edge_length_residual_of(&self.linkage, &self.coords)
    }

    /// Errors when some edge misses its length by more than [`TOL_LEN`].
    pub fn check_lengths(&self) -> Result<(), ModelError> {
        for (i, e) in self.linkage.edges().iter().enumerate() {
            let (a, b) = self.linkage.endpoints(i);
            let r = (self.coords[a].dist(self.coords[b]) - e.length).abs();
            if r > TOL_LEN {
                return Err(ModelError::LengthResidual { edge: e.label(), residual: r });
            }
        }
        Ok(())
    }

    pub fn is_nontouching(&self) -> bool {
        first_contact(&self.linkage, &self.coords).is_none()
    }

    /// The first offending edge pair (by index order) and its classification.
    pub fn first_contact(&self) -> Option<(usize, usize, SegmentPairClass)> {
        first_contact(&self.linkage, &self.coords)
    }

    /// Same linkage graph, lengths re-measured from these coordinates.
    pub fn remeasured(&self) -> Configuration {
        let lengths: Vec<f64> = (0..self.linkage.edge_count())
            .map(|e| {
                let (a, b) = self.linkage.endpoints(e);
                self.coords[a].dist(self.coords[b])
            })
            .collect();
        let linkage = self.linkage.with_lengths(&lengths).expect("measured lengths are valid");
        Configuration { linkage: Arc::new(linkage), coords: self.coords.clone() }
    }

    /// Each connected component as its own configuration.
    pub fn components(&self) -> Vec<Configuration> {
        self.linkage
            .components()
            .into_iter()
            .map(|comp| {
                let (l, order) = self.linkage.induced(&comp);
                let coords = order.iter().map(|&v| self.coords[v]).collect();
                Configuration { linkage: Arc::new(l), coords }
            })
            .collect()
    }

    pub fn without_edge(&self, e: usize) -> Configuration {
        Configuration { linkage: Arc::new(self.linkage.without_edge(e)), coords: self.coords.clone() }
    }
}

/// Maximum over edges of the absolute length error.
pub fn edge_length_residual(c: &Configuration) -> f64 {
    c.edge_length_residual()
}

/// True iff no two edges meet except adjacent edges at their shared vertex.
pub fn is_nontouching(c: &Configuration) -> bool {
    c.is_nontouching()
}

pub(crate) fn edge_length_residual_of(l: &Linkage, coords: &[Point]) -> f64 {
    (0..l.edge_count())
        .map(|e| {
            let (a, b) = l.endpoints(e);
            (coords[a].dist(coords[b]) - l.length(e)).abs()
        })
        .fold(0.0, f64::max)
}

/// Gap that certifies the pair `(i, j)` of edges: the distance between
/// nonadjacent edges, or for adjacent ones the distance from each far end to
/// the other edge. `None` when the pair cannot come into contact (it shares
/// a zero-length edge's point) and `Some(0.0)` when it already touches.
fn pair_gap(l: &Linkage, coords: &[Point], i: usize, j: usize) -> Option<f64> {
    let (a, b) = l.endpoints(i);
    let (c, d) = l.endpoints(j);
    let shared = if a == c || a == d {
        Some(a)
    } else if b == c || b == d {
        Some(b)
    } else {
        None
    };
    match shared {
        None => {
            let (p, q, r, s) = (coords[a], coords[b], coords[c], coords[d]);
            // A proper crossing has positive endpoint distances; catch it first.
            let (o1, o2) = (orient(p, q, r), orient(p, q, s));
            let (o3, o4) = (orient(r, s, p), orient(r, s, q));
            if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
                return Some(0.0);
            }
            Some(point_segment_distance(p, r, s).min(point_segment_distance(q, r, s)).min(point_segment_distance(r, p, q)).min(point_segment_distance(s, p, q)))
        }
        Some(v) => {
            if l.length(i) <= TOL_LEN || l.length(j) <= TOL_LEN {
                return None;
            }
            let x = if a == v { b } else { a };
            let y = if c == v { d } else { c };
            Some(point_segment_distance(coords[x], coords[v], coords[y]).min(point_segment_distance(coords[y], coords[v], coords[x])))
        }
    }
}

/// True iff the straight-line interpolation from `p` to `q` provably stays
/// nontouching, bisecting at most `depth` times. Every point of a segment
/// moves at most as far as its farther-moving endpoint, so a pair whose gap
/// exceeds the sum of those bounds cannot close during the sweep.
pub(crate) fn swept_clear(l: &Linkage, p: &[Point], q: &[Point], depth: u32) -> bool {
    let m = l.edge_count();
    let moved: Vec<f64> = (0..m)
        .map(|e| {
            let (a, b) = l.endpoints(e);
            p[a].dist(q[a]).max(p[b].dist(q[b]))
        })
        .collect();
    let mut ok = true;
    'pairs: for i in 0..m {
        for j in i + 1..m {
            if let Some(g) = pair_gap(l, p, i, j) {
                if g <= moved[i] + moved[j] {
                    ok = false;
                    break 'pairs;
                }
            }
        }
    }
    if ok {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let mid: Vec<Point> = p.iter().zip(q).map(|(a, b)| a.lerp(*b, 0.5)).collect();
    swept_clear(l, p, &mid, depth - 1) && swept_clear(l, &mid, q, depth - 1)
}

pub(crate) fn first_contact(l: &Linkage, coords: &[Point]) -> Option<(usize, usize, SegmentPairClass)> {
    let m = l.edge_count();
    for i in 0..m {
        let (a, b) = l.endpoints(i);
        for j in i + 1..m {
            let (c, d) = l.endpoints(j);
            let class = classify_pair(coords[a], coords[b], coords[c], coords[d]);
            let adjacent = a == c || a == d || b == c || b == d;
            let ok = match class.kind {
                ContactKind::Disjoint => true,
                ContactKind::SharedEndpointOnly => adjacent,
                _ => false,
            };
            if !ok {
                return Some((i, j, class));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub coords: Vec<Point>,
}

/// A piecewise-linear path through configuration space of one linkage.
#[derive(Clone, Debug, PartialEq)]
pub struct Motion {
    linkage: Arc<Linkage>,
    samples: Vec<Sample>,
}

impl Motion {
    pub fn new(linkage: Arc<Linkage>, samples: Vec<Sample>) -> Result<Self, ModelError> {
        if samples.len() < 2 {
            return Err(ModelError::NoSamples);
        }
        if samples[0].t != 0.0 || samples[samples.len() - 1].t != 1.0 {
            return Err(ModelError::SampleTimes("must start at t = 0 and end at t = 1".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(ModelError::SampleTimes(format!("not strictly increasing at t = {}", w[1].t)));
            }
        }
        for s in &samples {
            if s.coords.len() != linkage.vertex_count() {
                return Err(ModelError::CoordCount { expected: linkage.vertex_count(), found: s.coords.len() });
            }
            if let Some(i) = s.coords.iter().position(|p| !p.is_finite()) {
                return Err(ModelError::NonFiniteCoord(linkage.vertices()[i].clone()));
            }
        }
        Ok(Motion { linkage, samples })
    }

    /// Evenly timed samples from a list of positions (at least one).
    pub fn from_frames(linkage: Arc<Linkage>, mut frames: Vec<Vec<Point>>) -> Result<Self, ModelError> {
        if frames.len() == 1 {
            frames.push(frames[0].clone());
        }
        let n = frames.len();
        let samples = frames
            .into_iter()
            .enumerate()
            .map(|(i, coords)| Sample { t: if i + 1 == n { 1.0 } else { i as f64 / (n - 1) as f64 }, coords })
            .collect();
        Motion::new(linkage, samples)
    }

    /// A motion that stays at `c`, sampled `n ≥ 2` times.
    pub fn constant(c: &Configuration, n: usize) -> Self {
        let frames = vec![c.coords().to_vec(); n.max(2)];
        Motion::from_frames(c.linkage_arc().clone(), frames).expect("constant motion is valid")
    }

    pub fn linkage(&self) -> &Linkage {
        &self.linkage
    }

    pub fn linkage_arc(&self) -> &Arc<Linkage> {
        &self.linkage
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn configuration(&self, i: usize) -> Configuration {
        Configuration { linkage: self.linkage.clone(), coords: self.samples[i].coords.clone() }
    }

    pub fn last(&self) -> Configuration {
        self.configuration(self.samples.len() - 1)
    }

    /// Re-checks the motion independently of how it was produced:
    /// - lengths hold within `TOL_LEN` at every sample;
    /// - no two edges touch illegally at any sample;
    /// - no two edges touch illegally at the midpoint of each interval,
    ///   refined `depth` times.
    ///
    /// Returns the first failing time.
    /// Like [`Motion::first_invalid_time`], but the interpolated segments are
    /// certified rather than sampled: an interval passes only once bisection
    /// (at most `depth` levels) shows every piece moves less than the
    /// clearance at its start. Returns the start time of the first interval
    /// that cannot be certified.
    pub fn first_uncertified_time(&self, depth: u32) -> Option<f64> {
        for s in &self.samples {
            if edge_length_residual_of(&self.linkage, &s.coords) > TOL_LEN || first_contact(&self.linkage, &s.coords).is_some() {
                return Some(s.t);
            }
        }
        self.samples.windows(2).find(|w| !swept_clear(&self.linkage, &w[0].coords, &w[1].coords, depth)).map(|w| w[0].t)
    }

    pub fn first_invalid_time(&self, depth: u32) -> Option<f64> {
        for s in &self.samples {
            if edge_length_residual_of(&self.linkage, &s.coords) > TOL_LEN || first_contact(&self.linkage, &s.coords).is_some() {
                return Some(s.t);
            }
        }
        let mut buf = Vec::with_capacity(self.linkage.vertex_count());
        for w in self.samples.windows(2) {
            let pieces = 1u32 << depth;
            for k in 0..pieces {
                let u = (k as f64 + 0.5) / pieces as f64;
                buf.clear();
                buf.extend(w[0].coords.iter().zip(&w[1].coords).map(|(a, b)| a.lerp(*b, u)));
                if first_contact(&self.linkage, &buf).is_some() {
                    return Some(w[0].t + u * (w[1].t - w[0].t));
                }
            }
        }
        None
    }
}
