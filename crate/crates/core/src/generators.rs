//! Diagram families: the ray of blocks (a k-regular finite-volume diagram
//! that does not expand), cusped diagrams (a finite core with decaying rays),
//! and plain balls in (bi)regular trees.
//!
//! Every generator goes through [`DiagramSpec::build`], so its output is a
//! validated diagram, and additionally asserts the measure and degree laws it
//! promises.

use num_traits::One;
use thiserror::Error;

use crate::diagram::{int, ratio, Diagram, DiagramError, DiagramSpec, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("generated diagram violates its own law: {0}")]
    InvariantViolated(String),
}

fn pow(q: u32, n: u32) -> Rational {
    Rational::from_integer(num_bigint::BigInt::from(q).pow(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RayBlocksSpec {
    pub q: u32,
    pub blocks: u32,
}

/// The ray `x0 − x1 − D1 − x2 − x3 − D2 − …` cut after block `N` and the
/// ray vertex `x_{2N+1}`.
#[derive(Debug, Clone)]
pub struct RayBlocks {
    pub diagram: Diagram,
    pub q: u32,
    /// `ray[m]` is the vertex `x_m`, `m = 0..=2N+1`.
    pub ray: Vec<usize>,
    /// `blocks[n-1][j-1]` is the block vertex `x_j^(n)`.
    pub blocks: Vec<Vec<usize>>,
}

impl RayBlocks {
    pub fn block(&self, n: u32) -> &[usize] {
        &self.blocks[n as usize - 1]
    }

    pub fn k(&self) -> u32 {
        self.q + 1
    }

    /// `(q+1)/(2n+1)`, the isoperimetric ratio of block `n`.
    pub fn block_ratio(&self, n: u32) -> Rational {
        ratio(self.q as i64 + 1, 2 * n as i64 + 1)
    }
}

pub fn gen_ray_blocks(spec: &RayBlocksSpec) -> Result<RayBlocks, GeneratorError> {
    let RayBlocksSpec { q, blocks } = *spec;
    if q < 2 {
        return Err(GeneratorError::InvalidSpec(format!("q must be at least 2, got {q}")));
    }
    if blocks < 1 {
        return Err(GeneratorError::InvalidSpec("need at least one block".into()));
    }
    let qi = int(q as i64);
    let one = Rational::one();
    let x = |m: u32| format!("x{m}");
    let b = |n: u32, j: u32| format!("d{n}_{j}");

    let mut s = DiagramSpec::new();
    s.vertex(x(0)).vertex(x(1));
    for n in 1..=blocks {
        for j in 1..=2 * n + 1 {
            s.vertex(b(n, j));
        }
        s.vertex(x(2 * n));
        if n == blocks {
            s.boundary_vertex(x(2 * n + 1));
        } else {
            s.vertex(x(2 * n + 1));
        }
    }
    s.edge("r0", x(0), x(1), int(q as i64 + 1), qi.clone());
    for n in 1..=blocks {
        // block path: (x_1,x_2) is 1/1, then q/q after even m and 1/1 after odd m
        for m in 1..=2 * n {
            let w = if m % 2 == 0 { qi.clone() } else { one.clone() };
            s.edge(format!("d{n}_e{m}"), b(n, m), b(n, m + 1), w.clone(), w);
        }
        // x_{2n+1}^(n) is one short of q+1 inside the block, x_1^(n) is q short;
        // these are the only indices with μ(e)=μ(ē) and indeg q+1 at both ends
        s.edge(format!("a{n}"), x(2 * n - 1), b(n, 2 * n + 1), one.clone(), one.clone());
        s.edge(format!("h{n}"), b(n, 1), x(2 * n), qi.clone(), qi.clone());
        s.edge(format!("r{}", 2 * n), x(2 * n), x(2 * n + 1), one.clone(), qi.clone());
    }
    s.base(x(0), ratio(1, q as i64 + 1));
    let diagram = s.build()?;

    let ray: Vec<usize> = (0..=2 * blocks + 1)
        .map(|m| diagram.find_vertex(&x(m)).expect("ray vertex"))
        .collect();
    let block_sets: Vec<Vec<usize>> = (1..=blocks)
        .map(|n| {
            (1..=2 * n + 1)
                .map(|j| diagram.find_vertex(&b(n, j)).expect("block vertex"))
                .collect()
        })
        .collect();
    let out = RayBlocks {
        diagram,
        q,
        ray,
        blocks: block_sets,
    };
    check_ray_blocks(&out)?;
    Ok(out)
}

fn check_ray_blocks(rb: &RayBlocks) -> Result<(), GeneratorError> {
    let d = &rb.diagram;
    let q = rb.q;
    let k = int(q as i64 + 1);
    let reg = d.regularity();
    if !reg.is_k_regular || reg.k.as_ref() != Some(&k) || reg.exempted.len() != 1 {
        return Err(GeneratorError::InvariantViolated(format!(
            "interior is not {k}-regular"
        )));
    }
    let bad = |what: String| Err(GeneratorError::InvariantViolated(what));
    if d.mu(rb.ray[0]) != &ratio(1, q as i64 + 1) {
        return bad("mu(x0) != 1/(q+1)".into());
    }
    let last = rb.ray.len() as u32 - 1;
    for m in 1..=last.div_ceil(2) {
        if d.mu(rb.ray[(2 * m - 1) as usize]) != &(Rational::one() / pow(q, m)) {
            return bad(format!("mu(x{}) != 1/q^{m}", 2 * m - 1));
        }
        if m >= 2 && d.mu(rb.ray[(2 * m - 2) as usize]) != &(Rational::one() / pow(q, m - 1)) {
            return bad(format!("mu(x{}) != 1/q^{}", 2 * m - 2, m - 1));
        }
    }
    for (i, block) in rb.blocks.iter().enumerate() {
        let expected = Rational::one() / pow(q, i as u32 + 1);
        if block.iter().any(|&v| d.mu(v) != &expected) {
            return bad(format!("block {} is not uniformly 1/q^{}", i + 1, i + 1));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaySpec {
    /// Core vertex the ray hangs from.
    pub attach: String,
    pub length: u32,
    /// Each step outward divides μ by `decay`.
    pub decay: u32,
}

/// A finite core plus rays. The core's base and mass carry over.
#[derive(Debug, Clone)]
pub struct CuspSpec {
    pub core: DiagramSpec,
    pub rays: Vec<RaySpec>,
}

#[derive(Debug, Clone)]
pub struct Cusp {
    pub diagram: Diagram,
    pub core: Vec<usize>,
    /// Ray vertices, ordered outward from the core.
    pub rays: Vec<Vec<usize>>,
    /// Edge-measure factor guaranteed on every tail's first boundary edge.
    pub c: Rational,
    /// Guaranteed per-step decay of μ along every ray.
    pub d: Rational,
}

pub fn gen_cusp(spec: &CuspSpec) -> Result<Cusp, GeneratorError> {
    if spec.rays.is_empty() {
        return Err(GeneratorError::InvalidSpec("a cusp needs at least one ray".into()));
    }
    for r in &spec.rays {
        if r.decay < 2 {
            return Err(GeneratorError::InvalidSpec(format!("decay must be >= 2, got {}", r.decay)));
        }
        if r.length < 1 {
            return Err(GeneratorError::InvalidSpec("ray length must be >= 1".into()));
        }
    }
    let core_len = spec.core.vertex_count();
    let mut s = spec.core.clone();
    for (j, r) in spec.rays.iter().enumerate() {
        let j = j + 1;
        let d = int(r.decay as i64);
        let mut prev = r.attach.clone();
        for t in 1..=r.length {
            let id = format!("r{j}_{t}");
            if t == r.length {
                s.boundary_vertex(id.clone());
            } else {
                s.vertex(id.clone());
            }
            s.edge(format!("r{j}_e{t}"), prev, id.clone(), Rational::one(), d.clone());
            prev = id;
        }
    }
    let diagram = s.build()?;
    let rays = spec
        .rays
        .iter()
        .enumerate()
        .map(|(j, r)| {
            (1..=r.length)
                .map(|t| diagram.find_vertex(&format!("r{}_{t}", j + 1)).expect("ray vertex"))
                .collect()
        })
        .collect();
    let d = spec.rays.iter().map(|r| r.decay).min().expect("non-empty");
    // the edge back from a tail's first vertex has index d, so μ(e) = d·μ(vertex)
    Ok(Cusp {
        diagram,
        core: (0..core_len).collect(),
        rays,
        c: int(d as i64),
        d: int(d as i64),
    })
}

/// Rank-one cusp in the shape of the quotient by `PGL2(F_q[t])`: core
/// `v0 −(q+1 | q)− v1`, then one ray from `v1` decaying by `q`.
pub fn nagao_cusp(q: u32, length: u32) -> Result<Cusp, GeneratorError> {
    if q < 2 {
        return Err(GeneratorError::InvalidSpec(format!("q must be at least 2, got {q}")));
    }
    let mut core = DiagramSpec::new();
    core.vertex("v0")
        .vertex("v1")
        .edge("c0", "v0", "v1", int(q as i64 + 1), int(q as i64))
        .base("v0", ratio(1, q as i64 + 1));
    gen_cusp(&CuspSpec {
        core,
        rays: vec![RaySpec {
            attach: "v1".into(),
            length,
            decay: q,
        }],
    })
}

/// Ball of radius `R` around a degree-`k0` vertex of the tree whose degrees
/// alternate `k0, k1` by parity.
#[derive(Debug, Clone)]
pub struct TreeBall {
    pub diagram: Diagram,
    pub depth: Vec<u32>,
    pub parent: Vec<Option<usize>>,
}

impl TreeBall {
    pub fn sphere(&self, n: u32) -> impl Iterator<Item = usize> + '_ {
        self.depth
            .iter()
            .enumerate()
            .filter(move |(_, &d)| d == n)
            .map(|(v, _)| v)
    }
}

pub fn gen_tree_ball(k0: u32, k1: u32, radius: u32) -> Result<TreeBall, GeneratorError> {
    if k0 < 2 || k1 < 2 {
        return Err(GeneratorError::InvalidSpec(format!("degrees must be >= 2, got ({k0},{k1})")));
    }
    if radius < 1 {
        return Err(GeneratorError::InvalidSpec("radius must be >= 1".into()));
    }
    let mut names = vec!["o".to_string()];
    let mut depth = vec![0u32];
    let mut parent = vec![None];
    let mut frontier = vec![0usize];
    for r in 0..radius {
        let mut next = Vec::new();
        for &v in &frontier {
            let deg = if r % 2 == 0 { k0 } else { k1 };
            let children = if r == 0 { deg } else { deg - 1 };
            for c in 0..children {
                names.push(format!("{}.{c}", names[v]));
                depth.push(r + 1);
                parent.push(Some(v));
                next.push(names.len() - 1);
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
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            s.edge(format!("t{v}"), names[p].clone(), names[v].clone(), Rational::one(), Rational::one());
        }
    }
    s.base("o", Rational::one());
    Ok(TreeBall {
        diagram: s.build()?,
        depth,
        parent,
    })
}

/// A truncation ladder: one finite diagram per size parameter `n`.
pub trait DiagramFamily: Sync {
    fn name(&self) -> String;

    /// Family parameter reported in tables (0 when meaningless).
    fn q(&self) -> u32;

    fn generate(&self, n: u32) -> Result<FamilyMember, GeneratorError>;
}

/// One rung of a ladder, with whatever the family knows about it.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub diagram: Diagram,
    /// Designated small-ratio cut, if the family has one.
    pub witness: Option<Vec<usize>>,
    /// `(core, c, d)` for the gap certificate, if the family has one.
    pub certificate: Option<(Vec<usize>, Rational, Rational)>,
}

#[derive(Debug, Clone, Copy)]
pub struct RayBlocksFamily {
    pub q: u32,
}

impl DiagramFamily for RayBlocksFamily {
    fn name(&self) -> String {
        "ray-blocks".into()
    }

    fn q(&self) -> u32 {
        self.q
    }

    fn generate(&self, n: u32) -> Result<FamilyMember, GeneratorError> {
        let rb = gen_ray_blocks(&RayBlocksSpec { q: self.q, blocks: n })?;
        let witness = rb.block(n).to_vec();
        Ok(FamilyMember {
            diagram: rb.diagram,
            witness: Some(witness),
            certificate: None,
        })
    }
}

/// Nagao-shaped cusps, `n` = ray length.
#[derive(Debug, Clone, Copy)]
pub struct CuspFamily {
    pub q: u32,
}

impl DiagramFamily for CuspFamily {
    fn name(&self) -> String {
        "cusp".into()
    }

    fn q(&self) -> u32 {
        self.q
    }

    fn generate(&self, n: u32) -> Result<FamilyMember, GeneratorError> {
        let cusp = nagao_cusp(self.q, n)?;
        Ok(FamilyMember {
            diagram: cusp.diagram,
            witness: None,
            certificate: Some((cusp.core, cusp.c, cusp.d)),
        })
    }
}

/// A single diagram posing as a ladder; every `n` gives the same member.
#[derive(Debug, Clone)]
pub struct FixedFamily(pub Diagram);

impl DiagramFamily for FixedFamily {
    fn name(&self) -> String {
        "fixed".into()
    }

    fn q(&self) -> u32 {
        0
    }

    fn generate(&self, _n: u32) -> Result<FamilyMember, GeneratorError> {
        Ok(FamilyMember {
            diagram: self.0.clone(),
            witness: None,
            certificate: None,
        })
    }
}

/// Closed-form vertex count of the ray-blocks truncation: `N² + 4N + 2`.
pub fn ray_blocks_vertex_count(blocks: u32) -> usize {
    let n = blocks as usize;
    n * n + 4 * n + 2
}

/// Sum of the closed-form masses of a ray-blocks truncation.
pub fn ray_blocks_closed_volume(q: u32, blocks: u32) -> Rational {
    let mut total = ratio(1, q as i64 + 1);
    for m in 1..=blocks + 1 {
        total += Rational::one() / pow(q, m);
    }
    for m in 2..=blocks + 1 {
        total += Rational::one() / pow(q, m - 1);
    }
    for n in 1..=blocks {
        total += int(2 * n as i64 + 1) / pow(q, n);
    }
    total
}
