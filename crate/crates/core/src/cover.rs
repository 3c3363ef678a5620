//! Finite groupings and universal covers of edge-indexed graphs.
//!
//! A grouping records only group orders: `n_x` per vertex and `n_e` per
//! half-edge with `n_x = i(e)·n_e` whenever `∂0 e = x`. Orders are tied to
//! the measure by `n_x = λ/μ(x)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::diagram::{Diagram, DiagramError, DiagramSpec, IndexedGraph, Rational};

/// Cap on the number of vertices `universal_cover_ball` will build.
pub const COVER_VERTEX_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("half-edge `{0}` has non-integer index {1}")]
    NonIntegerIndex(String, Rational),
    #[error("radius must be at least 1")]
    BadRadius,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("cover ball would exceed {COVER_VERTEX_LIMIT} vertices")]
    TooLarge,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphOfGroups {
    pub vertex_order: Vec<BigInt>,
    /// Indexed by half-edge; partners carry equal orders.
    pub edge_order: Vec<BigInt>,
    pub scale: Rational,
}

impl GraphOfGroups {
    /// The grouping with every order multiplied by `m`.
    pub fn scaled(&self, m: u64) -> GraphOfGroups {
        let m = BigInt::from(m);
        GraphOfGroups {
            vertex_order: self.vertex_order.iter().map(|n| n * &m).collect(),
            edge_order: self.edge_order.iter().map(|n| n * &m).collect(),
            scale: &self.scale * Rational::from_integer(m),
        }
    }

    /// `n_{∂0 e} / n_e` for each half-edge.
    pub fn indices(&self, d: &Diagram) -> Vec<Rational> {
        (0..d.half_edge_count())
            .map(|h| {
                Rational::new(
                    self.vertex_order[d.origin(h)].clone(),
                    self.edge_order[h].clone(),
                )
            })
            .collect()
    }
}

fn require_integer_indices(d: &IndexedGraph) -> Result<(), CoverError> {
    match (0..d.half_edge_count()).find(|&h| !d.index(h).is_integer()) {
        Some(h) => Err(CoverError::NonIntegerIndex(
            d.half_edge(h).id.clone(),
            d.index(h).clone(),
        )),
        None => Ok(()),
    }
}

/// Smallest grouping compatible with `μ`: `λ` is the least positive rational
/// that is an integer multiple of every `μ(x)` and every `μ(e)`.
pub fn finite_grouping(d: &Diagram) -> Result<GraphOfGroups, CoverError> {
    require_integer_indices(&d.indexed_graph())?;
    let masses = d.mu_vertices().iter().chain(d.mu_edges());
    let (numer, denom) = masses.fold((BigInt::one(), BigInt::zero()), |(l, g), r| {
        (l.lcm(r.numer()), g.gcd(r.denom()))
    });
    let scale = Rational::new(numer, denom);
    let order = |m: &Rational| {
        let n = &scale / m;
        debug_assert!(n.is_integer());
        n.to_integer()
    };
    Ok(GraphOfGroups {
        vertex_order: d.mu_vertices().iter().map(order).collect(),
        edge_order: d.mu_edges().iter().map(order).collect(),
        scale,
    })
}

/// `Σ_x 1/n_x`.
pub fn covolume(g: &GraphOfGroups) -> Rational {
    g.vertex_order
        .iter()
        .map(|n| Rational::new(BigInt::one(), n.clone()))
        .sum()
}

/// Ball in the universal cover, with the covering map.
#[derive(Debug, Clone)]
pub struct CoverBall {
    pub tree: Diagram,
    /// Cover vertex → vertex of the base diagram.
    pub projection: Vec<usize>,
    /// Cover half-edge → half-edge of the base diagram.
    pub lift_of: Vec<usize>,
    pub depth: Vec<u32>,
    pub radius: u32,
}

impl CoverBall {
    /// Vertices strictly inside the ball that lie over non-boundary vertices.
    pub fn interior(&self, base: &IndexedGraph) -> Vec<usize> {
        (0..self.projection.len())
            .filter(|&v| self.depth[v] < self.radius && !base.is_boundary(self.projection[v]))
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.tree.out_edges(v).len()
    }
}

/// Unfold `d` from `base` to depth `radius`. Vertex names are access paths:
/// the root is `@<base>`, a child is `<parent>/<half-edge>#<j>`. No measure
/// is needed, so graphs without an invariant measure unfold too.
pub fn universal_cover_ball(
    d: &IndexedGraph,
    base: &str,
    radius: u32,
) -> Result<CoverBall, CoverError> {
    require_integer_indices(d)?;
    if radius < 1 {
        return Err(CoverError::BadRadius);
    }
    let root = d
        .find_vertex(base)
        .ok_or_else(|| CoverError::UnknownVertex(base.to_string()))?;
    let count = |h: usize| -> usize { d.index(h).to_integer().try_into().unwrap_or(usize::MAX) };

    let mut names = vec![format!("@{base}")];
    let mut projection = vec![root];
    let mut depth = vec![0u32];
    // (parent, lifted half-edge of d) per non-root vertex
    let mut entry: Vec<Option<(usize, usize)>> = vec![None];
    let mut frontier = vec![0usize];
    for r in 0..radius {
        let mut next = Vec::new();
        for &v in &frontier {
            let x = projection[v];
            let back = entry[v].map(|(_, e)| d.partner(e));
            for &e in d.out_edges(x) {
                let lifts = count(e) - usize::from(Some(e) == back);
                for j in 0..lifts {
                    if names.len() >= COVER_VERTEX_LIMIT {
                        return Err(CoverError::TooLarge);
                    }
                    names.push(format!("{}/{}#{j}", names[v], d.half_edge(e).id));
                    projection.push(d.terminus(e));
                    depth.push(r + 1);
                    entry.push(Some((v, e)));
                    next.push(names.len() - 1);
                }
            }
        }
        frontier = next;
    }

    let mut s = DiagramSpec::new();
    for (v, name) in names.iter().enumerate() {
        if depth[v] == radius {
            s.boundary_vertex(name.clone());
        } else {
            s.vertex(name.clone());
        }
    }
    let mut lift_by_id: HashMap<String, usize> = HashMap::new();
    for (v, e) in entry.iter().enumerate() {
        if let Some((p, e)) = *e {
            let id = format!("u{v}");
            lift_by_id.insert(format!("{id}'"), d.partner(e));
            lift_by_id.insert(id.clone(), e);
            s.edge(id, names[p].clone(), names[v].clone(), Rational::one(), Rational::one());
        }
    }
    s.base(names[0].clone(), Rational::one());
    let tree = s.build()?;
    let lift_of = tree
        .half_edges()
        .iter()
        .map(|h| lift_by_id[&h.id])
        .collect();
    Ok(CoverBall {
        tree,
        projection,
        lift_of,
        depth,
        radius,
    })
}
