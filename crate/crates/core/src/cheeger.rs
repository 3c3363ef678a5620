//! Isoperimetric ratios, Cheeger constants and expansion verdicts.
//!
//! For a vertex set `S` the boundary is `E(S, Sᶜ) = {e : ∂0 e ∈ S, ∂1 e ∉ S}`
//! and the ratio is `μ(E(S, Sᶜ)) / μ(S)`. A cut is feasible when
//! `μ(S) ≤ μ(D)/2`.

use std::cmp::Ordering;
use std::ops::{AddAssign, Mul, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{Diagram, Rational};
use crate::generators::{DiagramFamily, GeneratorError};
use crate::spectral::{self, SpectralError, SpectralOptions};

/// Largest vertex count `cheeger_exact` accepts.
pub const EXACT_CUTOFF: usize = 22;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheegerError {
    #[error("cut must be a nonempty proper subset of the vertices")]
    EmptyOrFullSet,
    #[error("vertex index {0} out of range")]
    UnknownVertex(usize),
    #[error("{0} vertices exceed the exact enumeration cutoff of {EXACT_CUTOFF}; use the sweep")]
    TooLarge(usize),
    #[error("core has μ = {core}, needs more than half of μ(D) = {total}")]
    CoreTooSmall { core: Box<Rational>, total: Box<Rational> },
    #[error("core is empty or not connected")]
    CoreDisconnected,
    #[error("decay hypothesis fails at `{vertex}`: {reason}")]
    DecayViolated { vertex: String, reason: String },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("truncation list must be nonempty and strictly increasing")]
    BadLadder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutResult {
    /// Sorted vertex indices of `S`.
    pub set: Vec<usize>,
    pub ids: Vec<String>,
    pub mu_set: Rational,
    pub mu_boundary: Rational,
    pub ratio: Rational,
    pub feasible: bool,
}

pub fn boundary_measure(d: &Diagram, set: &[usize]) -> Result<CutResult, CheegerError> {
    let n = d.vertex_count();
    let mut inside = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(CheegerError::UnknownVertex(v));
        }
        inside[v] = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    if size == 0 || size == n {
        return Err(CheegerError::EmptyOrFullSet);
    }
    Ok(cut_from_membership(d, &inside))
}

fn cut_from_membership(d: &Diagram, inside: &[bool]) -> CutResult {
    let set: Vec<usize> = (0..inside.len()).filter(|&v| inside[v]).collect();
    let mu_set = d.volume_of(&set);
    let mut mu_boundary = Rational::zero();
    for &v in &set {
        for &h in d.out_edges(v) {
            if !inside[d.terminus(h)] {
                mu_boundary += d.mu_edge(h);
            }
        }
    }
    let feasible = &mu_set * Rational::from_integer(2.into()) <= d.total_volume();
    CutResult {
        ids: set.iter().map(|&v| d.vertex_id(v).to_string()).collect(),
        ratio: &mu_boundary / &mu_set,
        set,
        mu_set,
        mu_boundary,
        feasible,
    }
}

trait Scaled:
    Clone + Ord + Zero + Send + Sync + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self>
where
    for<'a> &'a Self: Mul<&'a Self, Output = Self>,
{
}

impl Scaled for i128 {}
impl Scaled for BigInt {}

/// Vertex masses and per-vertex neighbour lists with edge masses, all
/// multiplied by one common integer.
struct ScaledGraph<T> {
    mass: Vec<T>,
    total: T,
    adj: Vec<Vec<(usize, T)>>,
}

fn scaled_graph(d: &Diagram) -> ScaledGraph<BigInt> {
    let lcm = d
        .mu_vertices()
        .iter()
        .chain(d.mu_edges())
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scale = |r: &Rational| (r * Rational::from_integer(lcm.clone())).to_integer();
    let n = d.vertex_count();
    let mass: Vec<BigInt> = d.mu_vertices().iter().map(scale).collect();
    let mut adj = vec![Vec::new(); n];
    for (v, list) in adj.iter_mut().enumerate() {
        for &h in d.out_edges(v) {
            let y = d.terminus(h);
            if y != v {
                list.push((y, scale(d.mu_edge(h))));
            }
        }
    }
    ScaledGraph {
        total: mass.iter().sum(),
        mass,
        adj,
    }
}

fn narrow(g: &ScaledGraph<BigInt>) -> Option<ScaledGraph<i128>> {
    // keep every sum below 2^56 so cross products stay inside i128
    let limit = BigInt::one() << 56;
    let edge_total: BigInt = g.adj.iter().flatten().map(|(_, m)| m).sum();
    if g.total >= limit || edge_total >= limit {
        return None;
    }
    let conv = |b: &BigInt| b.to_i128().expect("bounded");
    Some(ScaledGraph {
        mass: g.mass.iter().map(conv).collect(),
        total: conv(&g.total),
        adj: g
            .adj
            .iter()
            .map(|row| row.iter().map(|(y, m)| (*y, conv(m))).collect())
            .collect(),
    })
}

/// Minimiser state: boundary, mass, mask.
type Best<T> = Option<(T, T, u32)>;

/// `A < B` for the sorted index lists of two distinct masks.
fn mask_lex_less(a: u32, b: u32) -> bool {
    let diff = a ^ b;
    let j = diff.trailing_zeros();
    let above = |m: u32| j < 31 && (m >> (j + 1)) != 0;
    if a & (1 << j) != 0 {
        above(b)
    } else {
        !above(a)
    }
}

fn better<T: Scaled>(cand: (&T, &T, u32), best: &Best<T>) -> bool
where
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    match best {
        None => true,
        Some((bb, bm, mask)) => match (cand.0 * bm).cmp(&(bb * cand.1)) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => mask_lex_less(cand.2, *mask),
        },
    }
}

fn enumerate<T: Scaled>(g: &ScaledGraph<T>) -> u32
where
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    let n = g.mass.len();
    let top = n.min(6);
    let low = n - top;
    let chunks: Vec<Best<T>> = (0u32..1 << top)
        .into_par_iter()
        .map(|hi| {
            let mut mask = hi << low;
            let mut inside = vec![false; n];
            let mut mass = T::zero();
            let mut boundary = T::zero();
            for v in 0..n {
                if mask & (1 << v) != 0 {
                    toggle(g, &mut inside, &mut mass, &mut boundary, v);
                }
            }
            let mut best: Best<T> = None;
            let mut consider = |mask: u32, mass: &T, boundary: &T| {
                let mut twice = mass.clone();
                twice += mass;
                if mask == 0 || mask.count_ones() as usize == n || twice > g.total {
                    return;
                }
                if better((boundary, mass, mask), &best) {
                    best = Some((boundary.clone(), mass.clone(), mask));
                }
            };
            consider(mask, &mass, &boundary);
            for step in 1u32..1 << low {
                let v = step.trailing_zeros() as usize;
                toggle(g, &mut inside, &mut mass, &mut boundary, v);
                mask ^= 1 << v;
                consider(mask, &mass, &boundary);
            }
            best
        })
        .collect();
    let mut best: Best<T> = None;
    for (b, m, mask) in chunks.into_iter().flatten() {
        if better((&b, &m, mask), &best) {
            best = Some((b, m, mask));
        }
    }
    best.expect("a feasible cut exists when n >= 2").2
}

fn toggle<T: Scaled>(g: &ScaledGraph<T>, inside: &mut [bool], mass: &mut T, boundary: &mut T, v: usize)
where
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    let entering = !inside[v];
    inside[v] = entering;
    if entering {
        *mass += &g.mass[v];
    } else {
        *mass -= &g.mass[v];
    }
    for (y, m) in &g.adj[v] {
        // an edge v–y crosses the cut iff exactly one end is inside
        if inside[*y] == entering {
            *boundary -= m;
        } else {
            *boundary += m;
        }
    }
}

/// Exact Cheeger constant by enumerating every feasible cut. Ties go to the
/// lexicographically smallest list of vertex indices.
pub fn cheeger_exact(d: &Diagram) -> Result<CutResult, CheegerError> {
    let n = d.vertex_count();
    if n > EXACT_CUTOFF {
        return Err(CheegerError::TooLarge(n));
    }
    if n < 2 {
        return Err(CheegerError::EmptyOrFullSet);
    }
    let g = scaled_graph(d);
    let mask = match narrow(&g) {
        Some(small) => enumerate(&small),
        None => enumerate(&g),
    };
    let inside: Vec<bool> = (0..n).map(|v| mask & (1 << v) != 0).collect();
    Ok(cut_from_membership(d, &inside))
}

pub fn cheeger_sweep(d: &Diagram) -> Result<CutResult, CheegerError> {
    cheeger_sweep_with(
        d,
        &SpectralOptions {
            tol: 1e-8,
            ..SpectralOptions::default()
        },
    )
}

pub fn cheeger_sweep_with(d: &Diagram, opts: &SpectralOptions) -> Result<CutResult, CheegerError> {
    let report = spectral::lambda_bottom_with(d, opts)?;
    sweep_by(d, &report.eigenvector)
}

/// Best feasible cut among the level sets of `f`: vertices are ordered by
/// `(f, index)` and each proper prefix or its complement is tried.
pub fn sweep_by(d: &Diagram, f: &[f64]) -> Result<CutResult, CheegerError> {
    let n = d.vertex_count();
    if n < 2 || f.len() != n {
        return Err(CheegerError::EmptyOrFullSet);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    let total = d.total_volume();
    let mut inside = vec![false; n];
    let mut mass = Rational::zero();
    let mut boundary = Rational::zero();
    let mut best: Option<(Rational, usize, bool)> = None;
    for (k, &v) in order[..n - 1].iter().enumerate() {
        inside[v] = true;
        mass += d.mu(v);
        for &h in d.out_edges(v) {
            let y = d.terminus(h);
            if y == v {
                continue;
            }
            if inside[y] {
                boundary -= d.mu_edge(h);
            } else {
                boundary += d.mu_edge(h);
            }
        }
        let prefix_feasible = &mass * Rational::from_integer(2.into()) <= total;
        let side_mass = if prefix_feasible { mass.clone() } else { &total - &mass };
        let ratio = &boundary / side_mass;
        if best.as_ref().is_none_or(|(r, _, _)| ratio < *r) {
            best = Some((ratio, k, prefix_feasible));
        }
    }
    let (_, k, prefix) = best.expect("n >= 2");
    let mut member = vec![!prefix; n];
    for &v in &order[..=k] {
        member[v] = prefix;
    }
    Ok(cut_from_membership(d, &member))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapCertificate {
    pub core: Vec<usize>,
    pub c: Rational,
    pub d: Rational,
    /// `c·(1 − 1/d)`
    pub tail_bound: Rational,
    /// `C/μ(D)`, `C` the least measure of an edge inside the core; `None`
    /// when the core has no internal edge.
    pub core_bound: Option<Rational>,
    pub certified: Rational,
}

/// Lower bound for the Cheeger constant of a finite core with decaying
/// tails. Checks, exactly:
///
/// * the core is connected and carries more than half the volume;
/// * every component of `D \ core` is a path hanging from the core at one end;
/// * along each such path `μ(x_{t+1}) ≤ μ(x_t)/d`;
/// * at every path vertex the edges pointing back toward the core have total
///   measure at least `c·μ(x_t)`.
pub fn gap_certificate(
    d: &Diagram,
    core: &[usize],
    c: &Rational,
    decay: &Rational,
) -> Result<GapCertificate, CheegerError> {
    let n = d.vertex_count();
    let mut in_core = vec![false; n];
    for &v in core {
        if v >= n {
            return Err(CheegerError::UnknownVertex(v));
        }
        in_core[v] = true;
    }
    let mut core: Vec<usize> = (0..n).filter(|&v| in_core[v]).collect();
    core.dedup();
    if core.is_empty() || !d.is_connected_subset(&core) {
        return Err(CheegerError::CoreDisconnected);
    }
    let total = d.total_volume();
    let core_mass = d.volume_of(&core);
    if core_mass.clone() * Rational::from_integer(2.into()) <= total {
        return Err(CheegerError::CoreTooSmall {
            core: Box::new(core_mass),
            total: Box::new(total),
        });
    }
    if *decay <= Rational::one() {
        return Err(CheegerError::DecayViolated {
            vertex: d.vertex_id(core[0]).to_string(),
            reason: format!("decay factor {decay} must exceed 1"),
        });
    }
    if !c.is_positive() {
        return Err(CheegerError::DecayViolated {
            vertex: d.vertex_id(core[0]).to_string(),
            reason: format!("edge factor {c} must be positive"),
        });
    }
    for tail in tails(d, &in_core)? {
        for (t, &x) in tail.iter().enumerate() {
            let toward: Rational = d
                .out_edges(x)
                .iter()
                .filter(|&&h| {
                    let y = d.terminus(h);
                    if t == 0 {
                        in_core[y]
                    } else {
                        y == tail[t - 1]
                    }
                })
                .map(|&h| d.mu_edge(h))
                .sum();
            if toward < c * d.mu(x) {
                return Err(CheegerError::DecayViolated {
                    vertex: d.vertex_id(x).to_string(),
                    reason: format!("inward edge measure {toward} < c·μ = {}", c * d.mu(x)),
                });
            }
            if let Some(&next) = tail.get(t + 1) {
                if d.mu(next) * decay > *d.mu(x) {
                    return Err(CheegerError::DecayViolated {
                        vertex: d.vertex_id(next).to_string(),
                        reason: format!("μ = {} exceeds μ(previous)/d = {}", d.mu(next), d.mu(x) / decay),
                    });
                }
            }
        }
    }
    let tail_bound = c * (Rational::one() - decay.recip());
    let core_bound = core
        .iter()
        .flat_map(|&v| d.out_edges(v).iter().copied())
        .filter(|&h| in_core[d.terminus(h)])
        .map(|h| d.mu_edge(h).clone())
        .min()
        .map(|m| m / &total);
    let certified = match &core_bound {
        Some(b) => b.clone().min(tail_bound.clone()),
        None => tail_bound.clone(),
    };
    Ok(GapCertificate {
        core,
        c: c.clone(),
        d: decay.clone(),
        tail_bound,
        core_bound,
        certified,
    })
}

/// Components of `D \ core`, each as a path ordered outward from its unique
/// attachment to the core.
fn tails(d: &Diagram, in_core: &[bool]) -> Result<Vec<Vec<usize>>, CheegerError> {
    let n = d.vertex_count();
    let mut seen = in_core.to_vec();
    let mut out = Vec::new();
    let not_a_ray = |v: usize, why: &str| CheegerError::DecayViolated {
        vertex: d.vertex_id(v).to_string(),
        reason: why.to_string(),
    };
    for start in 0..n {
        if seen[start] || !d.neighbors(start).any(|y| in_core[y]) {
            continue;
        }
        let mut path = vec![start];
        seen[start] = true;
        let mut prev: Option<usize> = None;
        let mut cur = start;
        loop {
            let mut outside: Vec<usize> = d.neighbors(cur).filter(|&y| !in_core[y] && Some(y) != prev && y != cur).collect();
            outside.sort_unstable();
            outside.dedup();
            if cur != start && d.neighbors(cur).any(|y| in_core[y]) {
                return Err(not_a_ray(cur, "tail touches the core twice"));
            }
            match outside.as_slice() {
                [] => break,
                [next] => {
                    if seen[*next] {
                        return Err(not_a_ray(*next, "tail closes a cycle"));
                    }
                    seen[*next] = true;
                    path.push(*next);
                    prev = Some(cur);
                    cur = *next;
                }
                _ => return Err(not_a_ray(cur, "tail branches")),
            }
        }
        out.push(path);
    }
    if let Some(v) = (0..n).find(|&v| !seen[v]) {
        return Err(not_a_ray(v, "not on a tail attached to the core"));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Cut ratios fall along the ladder and drop below ε.
    NoExpansionWitness,
    /// Every rung keeps its Cheeger constant (or certified bound) ≥ ε.
    ExpansionConsistent,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::NoExpansionWitness => "no-expansion-witness",
            Verdict::ExpansionConsistent => "expansion-consistent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperSource {
    Exact,
    Witness,
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderEntry {
    pub n: u32,
    pub dimension: usize,
    pub h_upper: Rational,
    pub upper_source: UpperSource,
    /// Ids of the cut achieving `h_upper`.
    pub witness: Vec<String>,
    pub h_exact: Option<Rational>,
    /// Sweep-cut ratio, computed when the exact constant is out of reach.
    pub sweep_upper: Option<Rational>,
    pub certified_lower: Option<Rational>,
    pub lambda: f64,
    pub max_index_ratio: Rational,
    pub max_indeg: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictRecord {
    pub family: String,
    pub q: u32,
    pub eps: Rational,
    pub entries: Vec<LadderEntry>,
    pub verdict: Verdict,
    /// Boundedness hypotheses that look violated along the ladder.
    pub warnings: Vec<String>,
}

impl VerdictRecord {
    /// Evidence about the finite ladder only; says nothing certain about the
    /// infinite diagram.
    pub fn summary(&self) -> String {
        format!(
            "{} (family {}, q={}, eps={}, N={:?}; truncation evidence, not a statement about the infinite diagram)",
            self.verdict.label(),
            self.family,
            self.q,
            self.eps,
            self.entries.iter().map(|e| e.n).collect::<Vec<_>>()
        )
    }
}

pub fn expander_verdict(
    family: &dyn DiagramFamily,
    ladder: &[u32],
    eps: &Rational,
    opts: &SpectralOptions,
) -> Result<VerdictRecord, CheegerError> {
    if ladder.is_empty() || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CheegerError::BadLadder);
    }
    let entries: Vec<LadderEntry> = ladder
        .par_iter()
        .map(|&n| ladder_entry(family, n, opts))
        .collect::<Result<_, _>>()?;

    let mut warnings = Vec::new();
    let rising = |f: &dyn Fn(&LadderEntry) -> &Rational| {
        entries.len() > 1 && entries.windows(2).all(|w| f(&w[0]) < f(&w[1]))
    };
    if rising(&|e| &e.max_index_ratio) {
        warnings.push("max i(ē)/i(e) grows along the ladder".to_string());
    }
    if rising(&|e| &e.max_indeg) {
        warnings.push("max indeg grows along the ladder".to_string());
    }

    let decreasing = entries.windows(2).all(|w| w[1].h_upper < w[0].h_upper);
    let last = entries.last().expect("nonempty");
    let lower = |e: &LadderEntry| {
        e.certified_lower
            .clone()
            .or_else(|| e.h_exact.clone())
            .unwrap_or_else(|| e.h_upper.clone())
    };
    let verdict = if decreasing && last.h_upper < *eps {
        Verdict::NoExpansionWitness
    } else if entries.iter().all(|e| lower(e) >= *eps) {
        Verdict::ExpansionConsistent
    } else {
        Verdict::Inconclusive
    };
    Ok(VerdictRecord {
        family: family.name(),
        q: family.q(),
        eps: eps.clone(),
        entries,
        verdict,
        warnings,
    })
}

fn ladder_entry(family: &dyn DiagramFamily, n: u32, opts: &SpectralOptions) -> Result<LadderEntry, CheegerError> {
    let member = family.generate(n)?;
    let d = &member.diagram;
    let report = spectral::lambda_bottom_with(d, opts)?;
    let exact = if d.vertex_count() <= EXACT_CUTOFF {
        Some(cheeger_exact(d)?)
    } else {
        None
    };
    // a family's designated cut wins, so ladders report the cut they promise
    let sweep = match &exact {
        Some(_) => None,
        None => Some(sweep_by(d, &report.eigenvector)?),
    };
    let witness = match &member.witness {
        Some(w) => Some(boundary_measure(d, w)?).filter(|c| c.feasible),
        None => None,
    };
    let (cut, source) = match (witness, &exact, &sweep) {
        (Some(w), _, _) => (w, UpperSource::Witness),
        (None, Some(e), _) => (e.clone(), UpperSource::Exact),
        (None, None, Some(s)) => (s.clone(), UpperSource::Sweep),
        (None, None, None) => unreachable!("sweep runs whenever exact does not"),
    };
    let certified_lower = match &member.certificate {
        Some((core, c, decay)) => Some(gap_certificate(d, core, c, decay)?.certified),
        None => None,
    };
    Ok(LadderEntry {
        n,
        dimension: d.vertex_count(),
        h_upper: cut.ratio,
        upper_source: source,
        witness: cut.ids,
        h_exact: exact.map(|c| c.ratio),
        sweep_upper: sweep.map(|c| c.ratio),
        certified_lower,
        lambda: report.lambda,
        max_index_ratio: d.max_index_ratio(),
        max_indeg: d.max_indeg(),
    })
}

/// `ratio` as a float, for plots and logs.
pub fn approx(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{int, DiagramSpec};

    fn path2() -> Diagram {
        let mut s = DiagramSpec::new();
        s.vertex("u").vertex("v").edge("e", "u", "v", int(1), int(1));
        s.build().unwrap()
    }

    fn cycle4() -> Diagram {
        let mut s = DiagramSpec::new();
        for i in 0..4 {
            s.vertex(format!("c{i}"));
        }
        for i in 0..4 {
            s.edge(format!("e{i}"), format!("c{i}"), format!("c{}", (i + 1) % 4), int(1), int(1));
        }
        s.build().unwrap()
    }

    #[test]
    fn two_vertex_cut() {
        let d = path2();
        let cut = boundary_measure(&d, &[0]).unwrap();
        assert_eq!((cut.mu_set.clone(), cut.mu_boundary.clone(), cut.ratio.clone()), (int(1), int(1), int(1)));
        assert!(cut.feasible);
        let exact = cheeger_exact(&d).unwrap();
        assert_eq!(exact.set, vec![0]);
        assert_eq!(exact.ratio, int(1));
        assert_eq!(cheeger_sweep(&d).unwrap().ratio, int(1));
        assert_eq!(boundary_measure(&d, &[]).unwrap_err(), CheegerError::EmptyOrFullSet);
        assert_eq!(boundary_measure(&d, &[0, 1]).unwrap_err(), CheegerError::EmptyOrFullSet);
    }

    #[test]
    fn four_cycle_constant() {
        // an arc of two adjacent vertices: two boundary edges over mass two
        let exact = cheeger_exact(&cycle4()).unwrap();
        assert_eq!(exact.ratio, int(1));
        assert_eq!(exact.set, vec![0, 1]);
    }

    #[test]
    fn lex_order_on_masks() {
        // {0,2} < {1}, {0} < {0,1}, {0,1} < {0,2}
        assert!(mask_lex_less(0b101, 0b010));
        assert!(mask_lex_less(0b001, 0b011));
        assert!(!mask_lex_less(0b011, 0b001));
        assert!(mask_lex_less(0b011, 0b101));
        assert!(!mask_lex_less(0b010, 0b101));
    }

    #[test]
    fn bigint_and_i128_paths_agree() {
        let d = cycle4();
        let g = scaled_graph(&d);
        let small = narrow(&g).unwrap();
        assert_eq!(enumerate(&g), enumerate(&small));
    }

    #[test]
    fn certificate_rejects_no_decay() {
        let mut s = DiagramSpec::new();
        s.vertex("a").vertex("b").vertex("c");
        s.edge("ab", "a", "b", int(3), int(3)).edge("bc", "b", "c", int(1), int(1));
        let d = s.build().unwrap();
        let err = gap_certificate(&d, &[0, 1], &int(1), &int(1)).unwrap_err();
        assert!(matches!(err, CheegerError::DecayViolated { .. }));
        let err = gap_certificate(&d, &[0], &int(1), &int(2)).unwrap_err();
        assert!(matches!(err, CheegerError::CoreTooSmall { .. }));
        // a core that holds half the volume and no more is too small
        let half = gap_certificate(&path2(), &[0], &int(1), &int(2)).unwrap_err();
        assert_eq!(half, CheegerError::CoreTooSmall { core: Box::new(int(1)), total: Box::new(int(2)) });
    }
}
