//! Radial functions on (bi)regular trees and their convolution, computed by
//! counting paths on generated tree balls.
//!
//! A radial function lives on the class `X0` of the base point and depends
//! only on the (even) distance to it. `δ_n` is the indicator of the sphere of
//! radius `n`, and `(a ∗ b)(y) = Σ_z a(d(x0, z)) b(d(z, y))`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{ratio, Rational};
use crate::generators::{gen_tree_ball, GeneratorError, TreeBall};

/// Largest tree-ball radius the counting routines will generate.
pub const RADIUS_BUDGET: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeckeError {
    #[error("needs a tree ball of radius {0}, budget is {RADIUS_BUDGET}")]
    BudgetExceeded(u32),
    #[error("radial functions live on different trees or base classes")]
    Mismatch,
    #[error("degrees must be >= 2, got ({0},{1})")]
    BadDegrees(u32, u32),
    #[error("convolution is not radial at distance {0}")]
    NotRadial(u32),
    #[error("n_max must be >= 2")]
    BadRange,
    #[error(transparent)]
    Generator(#[from] GeneratorError),
}

/// Which vertex class the base point lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseClass {
    /// Base point of degree `k0`.
    X0,
    /// Base point of degree `k1`.
    X1,
}

/// `|{y : d(x0, y) = n}|` for `x0` of degree `k0` (neighbours of degree `k1`).
///
/// Panics on overflow of `u128`.
pub fn sphere_size(k0: u32, k1: u32, n: u32) -> u128 {
    if n == 0 {
        return 1;
    }
    let mut size = k0 as u128;
    for depth in 1..n {
        let deg = if depth % 2 == 1 { k1 } else { k0 } as u128;
        size = size.checked_mul(deg - 1).expect("sphere size overflows u128");
    }
    size
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialFunction {
    pub k0: u32,
    pub k1: u32,
    pub base: BaseClass,
    /// Even radius → value; zero coefficients are never stored.
    coeffs: BTreeMap<u32, Rational>,
}

impl RadialFunction {
    pub fn zero(k0: u32, k1: u32, base: BaseClass) -> Self {
        RadialFunction {
            k0,
            k1,
            base,
            coeffs: BTreeMap::new(),
        }
    }

    /// `δ_radius`.
    pub fn delta(k0: u32, k1: u32, base: BaseClass, radius: u32) -> Self {
        Self::zero(k0, k1, base).with(radius, Rational::one())
    }

    /// Set the value on the sphere of radius `radius` (must be even).
    pub fn with(mut self, radius: u32, value: Rational) -> Self {
        assert!(radius.is_multiple_of(2), "radial functions live on even spheres");
        if value.is_zero() {
            self.coeffs.remove(&radius);
        } else {
            self.coeffs.insert(radius, value);
        }
        self
    }

    pub fn coeff(&self, radius: u32) -> Rational {
        self.coeffs.get(&radius).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(r, c)| (*r, c))
    }

    pub fn max_radius(&self) -> u32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    /// Degree of the base point and of its neighbours.
    fn local_degrees(&self) -> (u32, u32) {
        match self.base {
            BaseClass::X0 => (self.k0, self.k1),
            BaseClass::X1 => (self.k1, self.k0),
        }
    }

    fn same_space(&self, other: &Self) -> bool {
        (self.k0, self.k1, self.base) == (other.k0, other.k1, other.base)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.same_space(other));
        let mut out = self.clone();
        for (r, c) in other.support() {
            let v = out.coeff(r) + c;
            out = out.with(r, v);
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(self.k0, self.k1, self.base);
        for (r, c) in self.support() {
            out = out.with(r, c * s);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    /// `Σ_r |coeff(r)|·|S_r|`.
    pub fn l1_norm(&self) -> Rational {
        let (a, b) = self.local_degrees();
        self.support()
            .map(|(r, c)| {
                let size = Rational::from_integer(sphere_size(a, b, r).into());
                num_traits::abs(c.clone()) * size
            })
            .sum()
    }
}

impl fmt::Display for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.support().map(|(r, c)| format!("{c}·δ{r}")).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn ball(a: u32, b: u32, radius: u32) -> Result<TreeBall, HeckeError> {
    if radius > RADIUS_BUDGET {
        return Err(HeckeError::BudgetExceeded(radius));
    }
    Ok(gen_tree_ball(a, b, radius.max(1))?)
}

/// Distances from `src` within the ball, cut off at `limit`. The ball is a
/// tree, so remembering the previous vertex is enough to avoid revisits.
fn distances(t: &TreeBall, src: usize, limit: u32) -> Vec<(usize, u32)> {
    let d = &t.diagram;
    let mut out = vec![(src, 0)];
    let mut queue = VecDeque::from([(src, usize::MAX, 0u32)]);
    while let Some((v, from, dist)) = queue.pop_front() {
        if dist == limit {
            continue;
        }
        for y in d.neighbors(v) {
            if y != from {
                out.push((y, dist + 1));
                queue.push_back((y, v, dist + 1));
            }
        }
    }
    out
}

/// `#{z : d(x0, z) = r, d(z, y) = s}` as a function of `d(x0, y)`; checks
/// that the count is the same for every `y` on each sphere.
fn sphere_product(t: &TreeBall, r: u32, s: u32) -> Result<BTreeMap<u32, u64>, HeckeError> {
    let radius = r + s;
    let by_depth: Vec<Vec<usize>> = (0..=radius).map(|n| t.sphere(n).collect()).collect();
    let per_depth: Vec<(u32, u64)> = (0..=radius)
        .into_par_iter()
        .map(|n| {
            let mut value: Option<u64> = None;
            for &y in &by_depth[n as usize] {
                let count = distances(t, y, s)
                    .into_iter()
                    .filter(|&(z, dz)| dz == s && t.depth[z] == r)
                    .count() as u64;
                match value {
                    None => value = Some(count),
                    Some(v) if v == count => {}
                    Some(_) => return Err(HeckeError::NotRadial(n)),
                }
            }
            Ok((n, value.unwrap_or(0)))
        })
        .collect::<Result<_, _>>()?;
    Ok(per_depth.into_iter().filter(|&(_, c)| c > 0).collect())
}

/// `a ∗ b` by path counting on a ball of radius `max(a) + max(b)` about the
/// base point, so no count ever reaches the ball's rim.
pub fn radial_convolve(a: &RadialFunction, b: &RadialFunction) -> Result<RadialFunction, HeckeError> {
    if !a.same_space(b) {
        return Err(HeckeError::Mismatch);
    }
    let radius = a.max_radius() + b.max_radius();
    let (da, db) = a.local_degrees();
    let t = ball(da, db, radius)?;
    let mut out = RadialFunction::zero(a.k0, a.k1, a.base);
    for (r, ca) in a.support() {
        for (s, cb) in b.support() {
            for (n, count) in sphere_product(&t, r, s)? {
                let v = out.coeff(n) + ca * cb * Rational::from_integer(count.into());
                out = out.with(n, v);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    /// `delta4` or `delta(2n+2)`.
    pub name: String,
    pub n: u32,
    pub lhs: RadialFunction,
    pub rhs: RadialFunction,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceReport {
    pub k0: u32,
    pub k1: u32,
    pub checks: Vec<IdentityCheck>,
    pub max_radius: u32,
}

impl RecurrenceReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    /// `identity,n,status` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("identity,n,status\n");
        for c in &self.checks {
            let status = if c.holds { "ok" } else { "FAIL" };
            out.push_str(&format!("{},{},{}\n", c.name, c.n, status));
        }
        out
    }
}

/// Check, by path counting and exact arithmetic,
///
/// ```text
/// δ4       = δ2∗δ2  − k0(k1−1)·δ0            − (k1−2)·δ2
/// δ(2n+2)  = δ2∗δ2n − (k0−1)(k1−1)·δ(2n−2)   − (k1−2)·δ2n     (2 ≤ n ≤ n_max)
/// ```
///
/// for the base point in `X0`.
pub fn verify_recurrences(k0: u32, k1: u32, n_max: u32) -> Result<RecurrenceReport, HeckeError> {
    if k0 < 2 || k1 < 2 {
        return Err(HeckeError::BadDegrees(k0, k1));
    }
    if n_max < 2 {
        return Err(HeckeError::BadRange);
    }
    if 2 * n_max + 2 > RADIUS_BUDGET {
        return Err(HeckeError::BudgetExceeded(2 * n_max + 2));
    }
    let delta = |r: u32| RadialFunction::delta(k0, k1, BaseClass::X0, r);
    let c = |v: i64| ratio(v, 1);
    let k0i = k0 as i64;
    let k1i = k1 as i64;
    let d2 = delta(2);

    let mut checks = Vec::new();
    let sq = radial_convolve(&d2, &d2)?;
    let rhs = sq
        .sub(&delta(0).scale(&c(k0i * (k1i - 1))))
        .sub(&d2.scale(&c(k1i - 2)));
    checks.push(IdentityCheck {
        name: "delta4".into(),
        n: 1,
        holds: rhs == delta(4),
        lhs: delta(4),
        rhs,
    });
    for n in 2..=n_max {
        let prod = radial_convolve(&d2, &delta(2 * n))?;
        let rhs = prod
            .sub(&delta(2 * n - 2).scale(&c((k0i - 1) * (k1i - 1))))
            .sub(&delta(2 * n).scale(&c(k1i - 2)));
        checks.push(IdentityCheck {
            name: "delta(2n+2)".into(),
            n,
            holds: rhs == delta(2 * n + 2),
            lhs: delta(2 * n + 2),
            rhs,
        });
    }
    Ok(RecurrenceReport {
        k0,
        k1,
        checks,
        max_radius: 2 * n_max + 2,
    })
}

/// `α·δ0 + (1 − α)·δ2/‖δ2‖₁`, the normalised distance-≤2 kernel with
/// identity weight `α`.
pub fn g_kernel(k0: u32, k1: u32, base: BaseClass, alpha: &Rational) -> RadialFunction {
    let d2 = RadialFunction::delta(k0, k1, base, 2);
    let f0 = d2.scale(&d2.l1_norm().recip());
    RadialFunction::delta(k0, k1, base, 0)
        .scale(alpha)
        .add(&f0.scale(&(Rational::one() - alpha)))
}

/// Identity weight `1/(k0 k1)`.
pub fn product_weight(k0: u32, k1: u32) -> Rational {
    ratio(1, k0 as i64 * k1 as i64)
}

/// Identity weight `deg(x0)/(k0 k1)`, i.e. `1/k` of the neighbour class.
pub fn tree_weight(k0: u32, k1: u32, base: BaseClass) -> Rational {
    match base {
        BaseClass::X0 => ratio(1, k1 as i64),
        BaseClass::X1 => ratio(1, k0 as i64),
    }
}

/// Kernel of the squared averaging operator `A²` seen from every vertex of
/// the base class within distance 2 of the centre of a radius-4 ball (all
/// their 2-neighbourhoods lie inside). Returns one radial function per such
/// vertex, or `NotRadial` if some kernel is not.
pub fn squared_adjacency_kernels(k0: u32, k1: u32, base: BaseClass) -> Result<Vec<RadialFunction>, HeckeError> {
    let (a, b) = match base {
        BaseClass::X0 => (k0, k1),
        BaseClass::X1 => (k1, k0),
    };
    let t = ball(a, b, 4)?;
    let d = &t.diagram;
    let deg = |v: usize| if t.depth[v] % 2 == 0 { a } else { b } as i64;
    let mut out = Vec::new();
    for x in (0..d.vertex_count()).filter(|&v| t.depth[v] % 2 == 0 && t.depth[v] <= 2) {
        let mut kernel: BTreeMap<usize, Rational> = BTreeMap::new();
        for y in d.neighbors(x) {
            for z in d.neighbors(y) {
                *kernel.entry(z).or_insert_with(Rational::zero) += ratio(1, deg(x) * deg(y));
            }
        }
        let dist: BTreeMap<usize, u32> = distances(&t, x, 2).into_iter().collect();
        let mut radial = RadialFunction::zero(k0, k1, base);
        for (z, v) in kernel {
            let r = dist[&z];
            let existing = radial.coeff(r);
            if !existing.is_zero() && existing != v {
                return Err(HeckeError::NotRadial(r));
            }
            radial = radial.with(r, v);
        }
        out.push(radial);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_sizes() {
        assert_eq!(sphere_size(3, 3, 1), 3);
        assert_eq!(sphere_size(3, 4, 2), 9);
        assert_eq!(sphere_size(3, 3, 4), 24);
        assert_eq!(sphere_size(3, 4, 0), 1);
        assert_eq!(sphere_size(3, 4, 3), 3 * 3 * 2);
    }

    #[test]
    fn sphere_sizes_match_bfs() {
        for (k0, k1) in [(3, 3), (3, 4), (2, 5)] {
            let t = gen_tree_ball(k0, k1, 8).unwrap();
            for n in 0..=8 {
                assert_eq!(t.sphere(n).count() as u128, sphere_size(k0, k1, n));
            }
        }
    }

    #[test]
    fn delta_two_squared() {
        let d2 = RadialFunction::delta(3, 4, BaseClass::X0, 2);
        let sq = radial_convolve(&d2, &d2).unwrap();
        assert_eq!(sq.coeff(0), ratio(9, 1));
        assert_eq!(sq.coeff(2), ratio(2, 1));
        assert_eq!(sq.coeff(4), ratio(1, 1));
    }

    #[test]
    fn identity_element() {
        let a = RadialFunction::delta(3, 4, BaseClass::X0, 2).with(4, ratio(-2, 3));
        let id = RadialFunction::delta(3, 4, BaseClass::X0, 0);
        assert_eq!(radial_convolve(&id, &a).unwrap(), a);
        assert_eq!(radial_convolve(&a, &id).unwrap(), a);
    }

    #[test]
    fn recurrences_hold_on_a_regular_tree() {
        let rep = verify_recurrences(3, 3, 3).unwrap();
        assert!(rep.all_hold(), "{rep:?}");
        assert_eq!(rep.checks.len(), 3);
        assert_eq!(rep.to_csv(), "identity,n,status\ndelta4,1,ok\ndelta(2n+2),2,ok\ndelta(2n+2),3,ok\n");
    }

    #[test]
    fn budget() {
        assert_eq!(verify_recurrences(3, 3, 5).unwrap_err(), HeckeError::BudgetExceeded(12));
        let big = RadialFunction::delta(3, 3, BaseClass::X0, 6);
        assert_eq!(radial_convolve(&big, &big).unwrap_err(), HeckeError::BudgetExceeded(12));
        assert_eq!(verify_recurrences(3, 3, 1).unwrap_err(), HeckeError::BadRange);
    }

    #[test]
    fn squared_kernel_matches_tree_weight() {
        for (k0, k1) in [(3, 3), (3, 4)] {
            for base in [BaseClass::X0, BaseClass::X1] {
                let tree = g_kernel(k0, k1, base, &tree_weight(k0, k1, base));
                for kernel in squared_adjacency_kernels(k0, k1, base).unwrap() {
                    assert_eq!(kernel, tree);
                }
            }
        }
    }

    #[test]
    fn product_weight_misses_the_diagonal() {
        let kernel = &squared_adjacency_kernels(3, 4, BaseClass::X0).unwrap()[0];
        let literal = g_kernel(3, 4, BaseClass::X0, &product_weight(3, 4));
        assert_eq!(kernel.coeff(0), ratio(1, 4));
        assert_eq!(literal.coeff(0), ratio(1, 12));
    }
}
