//! Edge-indexed graphs carrying a finite-volume measure.
//!
//! A [`Diagram`] is a connected graph whose oriented edges (half-edges) come
//! in partner pairs and carry positive rational indices `i(e)`. The measure is
//! determined by the indices up to one global scale: fixing the mass of a base
//! vertex and walking any path multiplies by `Δ(e) = i(e)/i(ē)` per step. A
//! diagram is only accepted when that walk is path independent, i.e. the
//! product of `Δ` around every cycle is one.
//!
//! Everything here is exact. Floating point shows up only in `spectral`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational used for indices and measures.
pub type Rational = BigRational;

/// Build a rational from a small numerator/denominator pair.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("diagram has no vertices")]
    Empty,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate half-edge id `{0}`")]
    DuplicateHalfEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("half-edge `{0}` has no valid partner")]
    DanglingPartner(String),
    #[error("half-edge `{0}` is paired with itself")]
    FixedPointInvolution(String),
    #[error("half-edge `{0}` has non-positive index {1}")]
    NonPositiveIndex(String, Rational),
    #[error("base mass must be positive, got {0}")]
    NonPositiveMass(Rational),
    #[error("vertex `{0}` is not reachable from the base")]
    Disconnected(String),
    #[error("cycle {cycle:?} has index-ratio product {product}, expected 1")]
    CycleInconsistent { cycle: Vec<String>, product: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub label: Option<String>,
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdge {
    pub id: String,
    pub origin: usize,
    pub partner: usize,
    pub index: Rational,
}

#[derive(Debug, Clone)]
struct HalfEdgeSpec {
    id: String,
    origin: String,
    partner: String,
    index: Rational,
}

/// Unvalidated description of a diagram. Call [`DiagramSpec::build`] to get a
/// [`Diagram`].
#[derive(Debug, Clone, Default)]
pub struct DiagramSpec {
    pub(crate) vertices: Vec<Vertex>,
    half_edges: Vec<HalfEdgeSpec>,
    pub(crate) base: Option<(String, Rational)>,
}

impl DiagramSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, id: impl Into<String>) -> &mut Self {
        self.push_vertex(id.into(), false)
    }

    pub fn boundary_vertex(&mut self, id: impl Into<String>) -> &mut Self {
        self.push_vertex(id.into(), true)
    }

    pub fn labeled_vertex(
        &mut self,
        id: impl Into<String>,
        label: impl Into<String>,
        boundary: bool,
    ) -> &mut Self {
        self.vertices.push(Vertex {
            id: id.into(),
            label: Some(label.into()),
            boundary,
        });
        self
    }

    fn push_vertex(&mut self, id: String, boundary: bool) -> &mut Self {
        self.vertices.push(Vertex {
            id,
            label: None,
            boundary,
        });
        self
    }

    /// Add one half-edge with an explicitly named partner.
    pub fn half_edge(
        &mut self,
        id: impl Into<String>,
        origin: impl Into<String>,
        partner: impl Into<String>,
        index: Rational,
    ) -> &mut Self {
        self.half_edges.push(HalfEdgeSpec {
            id: id.into(),
            origin: origin.into(),
            partner: partner.into(),
            index,
        });
        self
    }

    /// Add a partner pair `from -> to` (id `id`) and `to -> from` (id `id'`).
    pub fn edge(
        &mut self,
        id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        forward: Rational,
        backward: Rational,
    ) -> &mut Self {
        let id = id.into();
        let back = format!("{id}'");
        self.half_edge(id.clone(), from, back.clone(), forward);
        self.half_edge(back, to, id, backward);
        self
    }

    pub fn base(&mut self, id: impl Into<String>, mass: Rational) -> &mut Self {
        self.base = Some((id.into(), mass));
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Validate the structure only (no measure), e.g. for unfolding graphs
    /// without an invariant measure.
    pub fn build_graph(&self) -> Result<IndexedGraph, DiagramError> {
        if self.vertices.is_empty() {
            return Err(DiagramError::Empty);
        }
        let mut vertex_index = HashMap::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if vertex_index.insert(v.id.clone(), i).is_some() {
                return Err(DiagramError::DuplicateVertex(v.id.clone()));
            }
        }
        let mut edge_index = HashMap::with_capacity(self.half_edges.len());
        for (i, h) in self.half_edges.iter().enumerate() {
            if edge_index.insert(h.id.clone(), i).is_some() {
                return Err(DiagramError::DuplicateHalfEdge(h.id.clone()));
            }
        }
        let mut half_edges = Vec::with_capacity(self.half_edges.len());
        for (i, h) in self.half_edges.iter().enumerate() {
            let origin = *vertex_index
                .get(&h.origin)
                .ok_or_else(|| DiagramError::UnknownVertex(h.origin.clone()))?;
            let partner = *edge_index
                .get(&h.partner)
                .ok_or_else(|| DiagramError::DanglingPartner(h.id.clone()))?;
            if partner == i {
                return Err(DiagramError::FixedPointInvolution(h.id.clone()));
            }
            if !h.index.is_positive() {
                return Err(DiagramError::NonPositiveIndex(h.id.clone(), h.index.clone()));
            }
            half_edges.push(HalfEdge {
                id: h.id.clone(),
                origin,
                partner,
                index: h.index.clone(),
            });
        }
        for (i, h) in half_edges.iter().enumerate() {
            if half_edges[h.partner].partner != i {
                return Err(DiagramError::DanglingPartner(h.id.clone()));
            }
        }
        Ok(IndexedGraph::new(self.vertices.clone(), half_edges))
    }

    /// Validate and populate the measure. Base mass defaults to 1 at the
    /// first vertex when no base was declared.
    pub fn build(&self) -> Result<Diagram, DiagramError> {
        let graph = self.build_graph()?;
        let (base, mass) = match &self.base {
            Some((id, mass)) => {
                let b = graph
                    .find_vertex(id)
                    .ok_or_else(|| DiagramError::UnknownVertex(id.clone()))?;
                (b, mass.clone())
            }
            None => (0, Rational::one()),
        };
        Diagram::assemble(graph.vertices, graph.half_edges, base, mass)
    }
}

/// Edge-indexed graph without a measure: vertices, half-edges, the partner
/// involution and positive indices.
#[derive(Debug, Clone)]
pub struct IndexedGraph {
    vertices: Vec<Vertex>,
    half_edges: Vec<HalfEdge>,
    out: Vec<Vec<usize>>,
    vertex_index: HashMap<String, usize>,
}

impl IndexedGraph {
    fn new(vertices: Vec<Vertex>, half_edges: Vec<HalfEdge>) -> Self {
        let mut out = vec![Vec::new(); vertices.len()];
        for (h, e) in half_edges.iter().enumerate() {
            out[e.origin].push(h);
        }
        let vertex_index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.clone(), i))
            .collect();
        IndexedGraph {
            vertices,
            half_edges,
            out,
            vertex_index,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn half_edge_count(&self) -> usize {
        self.half_edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn half_edge(&self, h: usize) -> &HalfEdge {
        &self.half_edges[h]
    }

    pub fn find_vertex(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.vertices[v].boundary
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn terminus(&self, h: usize) -> usize {
        self.half_edges[self.half_edges[h].partner].origin
    }

    pub fn partner(&self, h: usize) -> usize {
        self.half_edges[h].partner
    }

    pub fn index(&self, h: usize) -> &Rational {
        &self.half_edges[h].index
    }
}

/// Validated edge-indexed graph with its measure. Immutable once built.
#[derive(Debug, Clone)]
pub struct Diagram {
    vertices: Vec<Vertex>,
    half_edges: Vec<HalfEdge>,
    out: Vec<Vec<usize>>,
    base: usize,
    base_mass: Rational,
    mu_vertex: Vec<Rational>,
    mu_edge: Vec<Rational>,
    vertex_index: HashMap<String, usize>,
}

/// Vertex and half-edge measures produced by [`propagate_measure`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    pub vertex: Vec<Rational>,
    pub edge: Vec<Rational>,
}

/// Propagate `mass` at `base` along half-edges, multiplying by
/// `i(e)/i(ē)` per step. Fails on a disconnected graph or on the first
/// non-tree edge whose endpoints disagree, reporting its fundamental cycle.
pub fn propagate_measure(
    vertices: &[Vertex],
    half_edges: &[HalfEdge],
    base: usize,
    mass: &Rational,
) -> Result<Measure, DiagramError> {
    if !mass.is_positive() {
        return Err(DiagramError::NonPositiveMass(mass.clone()));
    }
    let n = vertices.len();
    let mut out = vec![Vec::new(); n];
    for (h, e) in half_edges.iter().enumerate() {
        out[e.origin].push(h);
    }
    let mut mu: Vec<Option<Rational>> = vec![None; n];
    // half-edge used to reach each vertex, for cycle reporting
    let mut via: Vec<Option<usize>> = vec![None; n];
    mu[base] = Some(mass.clone());
    let mut queue = VecDeque::from([base]);
    while let Some(x) = queue.pop_front() {
        let mx = mu[x].clone().expect("queued vertices carry a measure");
        for &h in &out[x] {
            let e = &half_edges[h];
            let back = &half_edges[e.partner];
            let y = back.origin;
            let my = &mx * &e.index / &back.index;
            match &mu[y] {
                None => {
                    mu[y] = Some(my);
                    via[y] = Some(h);
                    queue.push_back(y);
                }
                Some(existing) if *existing == my => {}
                Some(existing) => {
                    let product = &my / existing;
                    let cycle = fundamental_cycle(half_edges, &via, x, y, h);
                    return Err(DiagramError::CycleInconsistent { cycle, product });
                }
            }
        }
    }
    let vertex: Vec<Rational> = mu
        .into_iter()
        .enumerate()
        .map(|(i, m)| m.ok_or_else(|| DiagramError::Disconnected(vertices[i].id.clone())))
        .collect::<Result<_, _>>()?;
    let edge = half_edges
        .iter()
        .map(|e| &e.index * &vertex[e.origin])
        .collect();
    Ok(Measure { vertex, edge })
}

fn fundamental_cycle(
    half_edges: &[HalfEdge],
    via: &[Option<usize>],
    x: usize,
    y: usize,
    closing: usize,
) -> Vec<String> {
    let to_root = |mut v: usize| {
        let mut path = Vec::new();
        while let Some(h) = via[v] {
            path.push(h);
            v = half_edges[h].origin;
        }
        path
    };
    let mut px = to_root(x);
    let mut py = to_root(y);
    // strip the shared part above the lowest common ancestor
    while let (Some(a), Some(b)) = (px.last(), py.last()) {
        if a != b {
            break;
        }
        px.pop();
        py.pop();
    }
    let mut cycle: Vec<String> = px.iter().rev().map(|&h| half_edges[h].id.clone()).collect();
    cycle.push(half_edges[closing].id.clone());
    cycle.extend(py.iter().map(|&h| half_edges[half_edges[h].partner].id.clone()));
    cycle
}

/// Per-vertex in-degrees and the k-regularity decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityReport {
    pub indeg: Vec<Rational>,
    pub is_k_regular: bool,
    pub k: Option<Rational>,
    pub exempted: Vec<usize>,
}

impl Diagram {
    fn assemble(
        vertices: Vec<Vertex>,
        half_edges: Vec<HalfEdge>,
        base: usize,
        base_mass: Rational,
    ) -> Result<Self, DiagramError> {
        let measure = propagate_measure(&vertices, &half_edges, base, &base_mass)?;
        let mut out = vec![Vec::new(); vertices.len()];
        for (h, e) in half_edges.iter().enumerate() {
            out[e.origin].push(h);
        }
        let vertex_index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.clone(), i))
            .collect();
        let diagram = Diagram {
            vertices,
            half_edges,
            out,
            base,
            base_mass,
            mu_vertex: measure.vertex,
            mu_edge: measure.edge,
            vertex_index,
        };
        debug_assert!(diagram.measure_laws_hold());
        Ok(diagram)
    }

    /// Same graph, measure recomputed from a different base vertex.
    pub fn rebased(&self, base: usize, mass: Rational) -> Result<Diagram, DiagramError> {
        Diagram::assemble(self.vertices.clone(), self.half_edges.clone(), base, mass)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn half_edge_count(&self) -> usize {
        self.half_edges.len()
    }

    /// The underlying edge-indexed graph, measure dropped.
    pub fn indexed_graph(&self) -> IndexedGraph {
        IndexedGraph::new(self.vertices.clone(), self.half_edges.clone())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v].id
    }

    pub fn find_vertex(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.vertices[v].boundary
    }

    pub fn half_edge(&self, h: usize) -> &HalfEdge {
        &self.half_edges[h]
    }

    pub fn origin(&self, h: usize) -> usize {
        self.half_edges[h].origin
    }

    pub fn terminus(&self, h: usize) -> usize {
        self.half_edges[self.half_edges[h].partner].origin
    }

    pub fn partner(&self, h: usize) -> usize {
        self.half_edges[h].partner
    }

    pub fn index(&self, h: usize) -> &Rational {
        &self.half_edges[h].index
    }

    /// `Δ(e) = i(e)/i(ē)`.
    pub fn delta(&self, h: usize) -> Rational {
        self.index(h) / self.index(self.partner(h))
    }

    /// Half-edges with origin `v`.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn base_mass(&self) -> &Rational {
        &self.base_mass
    }

    pub fn mu(&self, v: usize) -> &Rational {
        &self.mu_vertex[v]
    }

    pub fn mu_edge(&self, h: usize) -> &Rational {
        &self.mu_edge[h]
    }

    pub fn mu_vertices(&self) -> &[Rational] {
        &self.mu_vertex
    }

    pub fn mu_edges(&self) -> &[Rational] {
        &self.mu_edge
    }

    pub fn indeg(&self, v: usize) -> Rational {
        self.out[v]
            .iter()
            .fold(Rational::zero(), |acc, &h| acc + self.index(h))
    }

    /// Exact `Σ_x μ(x)`.
    pub fn total_volume(&self) -> Rational {
        self.mu_vertex.iter().fold(Rational::zero(), |acc, m| acc + m)
    }

    /// Measure of a vertex set.
    pub fn volume_of(&self, set: &[usize]) -> Rational {
        set.iter()
            .fold(Rational::zero(), |acc, &v| acc + &self.mu_vertex[v])
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.vertices[v].boundary)
            .collect()
    }

    pub fn regularity(&self) -> RegularityReport {
        let indeg: Vec<Rational> = (0..self.vertex_count()).map(|v| self.indeg(v)).collect();
        let exempted = self.boundary_vertices();
        let mut interior = indeg
            .iter()
            .enumerate()
            .filter(|&(v, _)| !self.vertices[v].boundary)
            .map(|(_, d)| d);
        let k = interior.next().cloned();
        // an empty sum is never k-regular for k > 0
        let regular = k
            .as_ref()
            .is_some_and(|k| k.is_positive() && interior.all(|d| d == k));
        RegularityReport {
            k: if regular { k } else { None },
            is_k_regular: regular,
            indeg,
            exempted,
        }
    }

    /// `max i(ē)/i(e)` over all half-edges.
    pub fn max_index_ratio(&self) -> Rational {
        (0..self.half_edge_count())
            .map(|h| self.index(self.partner(h)) / self.index(h))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn max_indeg(&self) -> Rational {
        (0..self.vertex_count())
            .map(|v| self.indeg(v))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Neighbours of `v` (with multiplicity, loops included).
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v].iter().map(move |&h| self.terminus(h))
    }

    /// Two-colouring from the base, if the graph is bipartite.
    pub fn parity(&self) -> Option<Vec<u8>> {
        let mut color = vec![u8::MAX; self.vertex_count()];
        color[self.base] = 0;
        let mut queue = VecDeque::from([self.base]);
        while let Some(x) = queue.pop_front() {
            for y in self.neighbors(x) {
                if color[y] == u8::MAX {
                    color[y] = 1 - color[x];
                    queue.push_back(y);
                } else if color[y] == color[x] {
                    return None;
                }
            }
        }
        Some(color)
    }

    /// Whether the vertices in `set` induce a connected subgraph.
    pub fn is_connected_subset(&self, set: &[usize]) -> bool {
        let Some(&start) = set.first() else {
            return false;
        };
        let mut inside = vec![false; self.vertex_count()];
        for &v in set {
            inside[v] = true;
        }
        let mut seen = vec![false; self.vertex_count()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for y in self.neighbors(x) {
                if inside[y] && !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == set.iter().filter(|&&v| inside[v]).count()
    }

    /// Resolve vertex ids to indices.
    pub fn resolve(&self, ids: &[&str]) -> Result<Vec<usize>, DiagramError> {
        ids.iter()
            .map(|id| {
                self.find_vertex(id)
                    .ok_or_else(|| DiagramError::UnknownVertex(id.to_string()))
            })
            .collect()
    }

    fn measure_laws_hold(&self) -> bool {
        (0..self.half_edge_count()).all(|h| {
            self.mu_edge[h] == self.index(h) * &self.mu_vertex[self.origin(h)]
                && self.mu_edge[h] == self.mu_edge[self.partner(h)]
        })
    }

    /// Convert back to a spec (used by generators that extend diagrams).
    pub fn to_spec(&self) -> DiagramSpec {
        let mut spec = DiagramSpec::new();
        spec.vertices = self.vertices.clone();
        spec.half_edges = self
            .half_edges
            .iter()
            .map(|h| HalfEdgeSpec {
                id: h.id.clone(),
                origin: self.vertices[h.origin].id.clone(),
                partner: self.half_edges[h.partner].id.clone(),
                index: h.index.clone(),
            })
            .collect();
        spec.base = Some((self.vertices[self.base].id.clone(), self.base_mass.clone()));
        spec
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "diagram: {} vertices, {} half-edges, base {} (mass {}), volume {}",
            self.vertex_count(),
            self.half_edge_count(),
            self.vertex_id(self.base),
            self.base_mass,
            self.total_volume()
        )
    }
}
