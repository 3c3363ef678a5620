//! Diagram adjacency and Laplace operators, and the bottom of the nonzero
//! spectrum.
//!
//! The averaging operator is
//!
//! ```text
//! (A f)(x) = 1/indeg(x) · Σ_{e: ∂0 e = x} μ(e)/μ(x) · f(∂1 e)
//! ```
//!
//! and `Δ = I − A`. `A` is self-adjoint for the vertex weight
//! `w(x) = indeg(x)·μ(x)`; when the in-degree is constant this is the plain
//! μ-weighted inner product up to scale. All solvers work on the symmetric
//! conjugate `S = W^{1/2} A W^{-1/2}`, whose off-diagonal entries are
//! `Σ μ(e) / sqrt(w(x) w(y))` computed from exact rationals, so `S` is
//! symmetric bit for bit.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diagram::{Diagram, Rational};

/// Above this dimension `lambda_bottom` switches to Lanczos.
pub const DENSE_CUTOFF: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("vertex `{0}` has no outgoing half-edges")]
    ZeroIndeg(String),
    #[error("a single vertex has no nonconstant functions")]
    Trivial,
    #[error("eigensolver did not reach tolerance (best lambda {:.3e}, residual {:.3e})", .0.lambda, .0.residual)]
    ConvergenceFailure(Box<SpectralReport>),
    #[error("function is constant (nothing left after removing the mean)")]
    DegenerateFunction,
    #[error("function has {got} entries, diagram has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("diagram is not bipartite")]
    NotBipartite,
    #[error("diagram is not (bi)regular: {0}")]
    NotRegular(String),
}

/// Assembled operators for one diagram.
#[derive(Debug, Clone)]
pub struct OperatorBundle {
    ids: Vec<String>,
    indeg: Vec<Rational>,
    weights: Vec<Rational>,
    sqrt_w: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    /// exact entries of `A`
    transition: Vec<Rational>,
    /// entries of `S`, same sparsity as `transition`
    symmetric: Vec<f64>,
    parity: Option<Vec<u8>>,
    constant_indeg: bool,
}

pub fn assemble_operators(d: &Diagram) -> Result<OperatorBundle, SpectralError> {
    let n = d.vertex_count();
    let mut indeg = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for v in 0..n {
        if d.out_edges(v).is_empty() {
            return Err(SpectralError::ZeroIndeg(d.vertex_id(v).to_string()));
        }
        let k = d.indeg(v);
        weights.push(&k * d.mu(v));
        indeg.push(k);
    }
    let mut row_ptr = vec![0];
    let mut cols = Vec::new();
    let mut transition = Vec::new();
    let mut symmetric = Vec::new();
    for x in 0..n {
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        for &h in d.out_edges(x) {
            *row.entry(d.terminus(h)).or_insert_with(Rational::zero) += d.mu_edge(h);
        }
        for (y, m) in row {
            // w(x)·w(y) is the same product from either side, so S[x][y] == S[y][x]
            let scale = (&weights[x] * &weights[y]).to_f64().expect("finite").sqrt();
            symmetric.push(m.to_f64().expect("finite") / scale);
            transition.push(m / &weights[x]);
            cols.push(y);
        }
        row_ptr.push(cols.len());
    }
    let sqrt_w = weights
        .iter()
        .map(|w| w.to_f64().expect("finite").sqrt())
        .collect();
    let constant_indeg = indeg.windows(2).all(|p| p[0] == p[1]);
    Ok(OperatorBundle {
        ids: d.vertices().iter().map(|v| v.id.clone()).collect(),
        indeg,
        weights,
        sqrt_w,
        row_ptr,
        cols,
        transition,
        symmetric,
        parity: d.parity(),
        constant_indeg,
    })
}

impl OperatorBundle {
    pub fn dimension(&self) -> usize {
        self.ids.len()
    }

    pub fn vertex_order(&self) -> &[String] {
        &self.ids
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn indeg(&self) -> &[Rational] {
        &self.indeg
    }

    pub fn parity(&self) -> Option<&[u8]> {
        self.parity.as_deref()
    }

    /// False when in-degree varies, i.e. when `w` and μ differ by more than scale.
    pub fn constant_indeg(&self) -> bool {
        self.constant_indeg
    }

    /// Exact row sums of `A` (all equal to one for a valid diagram).
    pub fn transition_row_sums(&self) -> Vec<Rational> {
        (0..self.dimension())
            .map(|x| {
                self.transition[self.row_ptr[x]..self.row_ptr[x + 1]]
                    .iter()
                    .fold(Rational::zero(), |acc, a| acc + a)
            })
            .collect()
    }

    /// `A` applied to `f` in the natural basis.
    pub fn apply_transition(&self, f: &[f64]) -> Vec<f64> {
        (0..self.dimension())
            .map(|x| {
                (self.row_ptr[x]..self.row_ptr[x + 1])
                    .map(|k| self.transition[k].to_f64().expect("finite") * f[self.cols[k]])
                    .sum()
            })
            .collect()
    }

    fn apply_symmetric_laplacian(&self, v: &[f64], out: &mut [f64]) {
        for x in 0..self.dimension() {
            let mut acc = v[x];
            for k in self.row_ptr[x]..self.row_ptr[x + 1] {
                acc -= self.symmetric[k] * v[self.cols[k]];
            }
            out[x] = acc;
        }
    }

    pub fn transition_dense(&self) -> DMatrix<f64> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        for x in 0..n {
            for k in self.row_ptr[x]..self.row_ptr[x + 1] {
                m[(x, self.cols[k])] = self.transition[k].to_f64().expect("finite");
            }
        }
        m
    }

    pub fn symmetric_dense(&self) -> DMatrix<f64> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        for x in 0..n {
            for k in self.row_ptr[x]..self.row_ptr[x + 1] {
                m[(x, self.cols[k])] = self.symmetric[k];
            }
        }
        m
    }

    /// Unit vector along the constants in the symmetric frame (`∝ sqrt w`).
    fn constant_direction(&self) -> Vec<f64> {
        let norm = self.sqrt_w.iter().map(|s| s * s).sum::<f64>().sqrt();
        self.sqrt_w.iter().map(|s| s / norm).collect()
    }

    fn w_f64(&self) -> Vec<f64> {
        self.sqrt_w.iter().map(|s| s * s).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    DenseOracle,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// Target residual norm `‖Δv − λv‖`.
    pub tol: f64,
    pub method: Method,
    /// Seed for the Lanczos start vector.
    pub seed: u64,
    /// Lanczos step budget; defaults to the dimension.
    pub max_iter: Option<usize>,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tol: 1e-10,
            method: Method::Auto,
            seed: 0x5eed,
            max_iter: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub lambda: f64,
    pub method: SolverKind,
    pub residual: f64,
    pub dimension: usize,
    /// `|⟨v, 1⟩|` for the unit eigenvector in the symmetric frame.
    pub deflation: f64,
    /// Eigenfunction on vertices, `w`-orthogonal to constants, unit `w`-norm.
    pub eigenvector: Vec<f64>,
    /// Set when in-degree is not constant (see module docs on the weight).
    pub nonconstant_indeg: bool,
    pub iterations: usize,
}

pub fn lambda_bottom(d: &Diagram, tol: f64) -> Result<SpectralReport, SpectralError> {
    lambda_bottom_with(
        d,
        &SpectralOptions {
            tol,
            ..SpectralOptions::default()
        },
    )
}

pub fn lambda_bottom_with(
    d: &Diagram,
    opts: &SpectralOptions,
) -> Result<SpectralReport, SpectralError> {
    let ops = assemble_operators(d)?;
    lambda_of_bundle(&ops, opts)
}

pub fn lambda_of_bundle(
    ops: &OperatorBundle,
    opts: &SpectralOptions,
) -> Result<SpectralReport, SpectralError> {
    assert!(opts.tol > 0.0, "tolerance must be positive");
    let n = ops.dimension();
    if n < 2 {
        return Err(SpectralError::Trivial);
    }
    let dense = match opts.method {
        Method::Dense => true,
        Method::Iterative => false,
        Method::Auto => n <= DENSE_CUTOFF,
    };
    let (lambda, v, iterations, kind) = if dense {
        let (l, v) = dense_bottom(ops);
        (l, v, 0, SolverKind::DenseOracle)
    } else {
        let (l, v, it) = lanczos_bottom(ops, opts);
        (l, v, it, SolverKind::Iterative)
    };
    let report = finish_report(ops, lambda, v, iterations, kind);
    if report.residual > opts.tol {
        return Err(SpectralError::ConvergenceFailure(Box::new(report)));
    }
    Ok(report)
}

fn finish_report(
    ops: &OperatorBundle,
    lambda: f64,
    v: Vec<f64>,
    iterations: usize,
    method: SolverKind,
) -> SpectralReport {
    let n = ops.dimension();
    let u = ops.constant_direction();
    let mut lv = vec![0.0; n];
    ops.apply_symmetric_laplacian(&v, &mut lv);
    let residual = lv
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt();
    let deflation = dot(&u, &v).abs();
    let eigenvector = v.iter().zip(&ops.sqrt_w).map(|(x, s)| x / s).collect();
    SpectralReport {
        lambda: lambda.max(0.0),
        method,
        residual,
        dimension: n,
        deflation,
        eigenvector,
        nonconstant_indeg: !ops.constant_indeg,
        iterations,
    }
}

/// Smallest eigenpair of `I − S + 3·uuᵀ`; the shift lifts the constant
/// direction above the rest of the spectrum (which lies in `[0, 2]`).
fn dense_bottom(ops: &OperatorBundle) -> (f64, Vec<f64>) {
    let n = ops.dimension();
    let u = DVector::from_vec(ops.constant_direction());
    let mut l = DMatrix::identity(n, n) - ops.symmetric_dense();
    l += (&u * u.transpose()) * 3.0;
    let eig = SymmetricEigen::new(l);
    let (i, lambda) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
    normalize(&mut v);
    (lambda, v)
}

/// Lanczos with full reorthogonalisation on the complement of the constants.
fn lanczos_bottom(ops: &OperatorBundle, opts: &SpectralOptions) -> (f64, Vec<f64>, usize) {
    let n = ops.dimension();
    let u = ops.constant_direction();
    let budget = opts.max_iter.unwrap_or(n).min(n - 1).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project_out(&mut v, &u);
    normalize(&mut v);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut best = (f64::INFINITY, Vec::new());
    // the Ritz check costs O(m³), so space checks out geometrically
    let mut next_check = 8;
    for j in 0..budget {
        ops.apply_symmetric_laplacian(&basis[j], &mut w);
        project_out(&mut w, &u);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
            project_out(&mut w, &u);
        }
        let b = norm(&w);
        let steps = j + 1;
        let check = steps == budget || b < 1e-13 || steps >= next_check;
        if check {
            next_check = (steps + 8).max(steps + steps / 4);
            let (theta, s) = tridiagonal_bottom(&alpha, &beta);
            let estimate = b * s[steps - 1].abs();
            if estimate < 0.1 * opts.tol || b < 1e-13 || steps == budget {
                let mut y = vec![0.0; n];
                for (coef, q) in s.iter().zip(&basis) {
                    axpy(*coef, q, &mut y);
                }
                normalize(&mut y);
                let mut ly = vec![0.0; n];
                ops.apply_symmetric_laplacian(&y, &mut ly);
                let r = ly
                    .iter()
                    .zip(&y)
                    .map(|(p, q)| (p - theta * q).powi(2))
                    .sum::<f64>()
                    .sqrt();
                best = (theta, y);
                if r <= opts.tol || b < 1e-13 {
                    return (best.0, best.1, steps);
                }
            }
        }
        if steps == budget {
            return (best.0, best.1, steps);
        }
        beta.push(b);
        let next: Vec<f64> = w.iter().map(|x| x / b).collect();
        basis.push(next);
    }
    (best.0, best.1, budget)
}

/// Smallest eigenpair of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`: Sturm-count bisection for the value,
/// inverse iteration for the vector.
fn tridiagonal_bottom(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    if m == 1 {
        return (alpha[0], vec![1.0]);
    }
    let radius = |i: usize| {
        let left = if i > 0 { beta[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < m { beta[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..m).map(|i| alpha[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..m).map(|i| alpha[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    // number of eigenvalues below x
    let below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..m {
            let off = if i > 0 { beta[i - 1] * beta[i - 1] / d } else { 0.0 };
            d = alpha[i] - x - off;
            if d == 0.0 {
                d = -f64::EPSILON * scale;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    while hi - lo > 4.0 * f64::EPSILON * scale {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let shift = theta - 16.0 * f64::EPSILON * scale;
    let mut y = vec![1.0 / (m as f64).sqrt(); m];
    for _ in 0..3 {
        y = tridiagonal_solve(alpha, beta, shift, &y);
        normalize(&mut y);
    }
    (theta, y)
}

/// Solve `(T − σI) x = r` by Gaussian elimination along the band.
fn tridiagonal_solve(alpha: &[f64], beta: &[f64], sigma: f64, r: &[f64]) -> Vec<f64> {
    let m = alpha.len();
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut piv = alpha[0] - sigma;
    for i in 0..m {
        if i > 0 {
            piv = alpha[i] - sigma - beta[i - 1] * c[i - 1];
        }
        if piv.abs() < tiny {
            piv = tiny;
        }
        c[i] = if i + 1 < m { beta[i] / piv } else { 0.0 };
        d[i] = (r[i] - if i > 0 { beta[i - 1] * d[i - 1] } else { 0.0 }) / piv;
    }
    let mut x = d;
    for i in (0..m - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn normalize(v: &mut [f64]) {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

fn project_out(v: &mut [f64], unit: &[f64]) {
    let c = dot(v, unit);
    axpy(-c, unit, v);
}

/// `⟨Δf₀, f₀⟩ / ⟨f₀, f₀⟩` in the `w` inner product, `f₀ = f − mean_w(f)`.
pub fn rayleigh(d: &Diagram, f: &[f64]) -> Result<f64, SpectralError> {
    let ops = assemble_operators(d)?;
    rayleigh_of_bundle(&ops, f)
}

pub fn rayleigh_of_bundle(ops: &OperatorBundle, f: &[f64]) -> Result<f64, SpectralError> {
    let n = ops.dimension();
    if f.len() != n {
        return Err(SpectralError::DimensionMismatch {
            expected: n,
            got: f.len(),
        });
    }
    let w = ops.w_f64();
    let total: f64 = w.iter().sum();
    let mean = w.iter().zip(f).map(|(a, b)| a * b).sum::<f64>() / total;
    let f0: Vec<f64> = f.iter().map(|x| x - mean).collect();
    let norm_f = w.iter().zip(f).map(|(a, b)| a * b * b).sum::<f64>();
    let norm_f0 = w.iter().zip(&f0).map(|(a, b)| a * b * b).sum::<f64>();
    if norm_f0 <= 1e-24 * norm_f.max(f64::MIN_POSITIVE) || norm_f0 == 0.0 {
        return Err(SpectralError::DegenerateFunction);
    }
    let af = ops.apply_transition(&f0);
    let quad: f64 = (0..n).map(|x| w[x] * (f0[x] - af[x]) * f0[x]).sum();
    Ok(quad / norm_f0)
}

/// Parity class relative to the base vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityClass {
    Even,
    Odd,
}

impl ParityClass {
    fn tag(self) -> u8 {
        match self {
            ParityClass::Even => 0,
            ParityClass::Odd => 1,
        }
    }
}

/// Squared averaging operator of a bipartite (bi)regular diagram, split by
/// parity, next to the normalised distance-two (non-backtracking) operator.
#[derive(Debug, Clone)]
pub struct ParityBlocks {
    parity: Vec<u8>,
    /// in-degree of the even and odd classes
    pub k: [f64; 2],
    adjacency: DMatrix<f64>,
    squared: DMatrix<f64>,
    two_step: DMatrix<f64>,
    sqrt_w: Vec<f64>,
    interior: [Vec<usize>; 2],
}

pub fn parity_blocks(d: &Diagram) -> Result<ParityBlocks, SpectralError> {
    let ops = assemble_operators(d)?;
    let parity = d.parity().ok_or(SpectralError::NotBipartite)?;
    let mut k: [Option<Rational>; 2] = [None, None];
    for (v, &class) in parity.iter().enumerate() {
        if d.is_boundary(v) {
            continue;
        }
        let c = class as usize;
        let deg = d.indeg(v);
        match &k[c] {
            None => k[c] = Some(deg),
            Some(existing) if *existing == deg => {}
            Some(existing) => {
                return Err(SpectralError::NotRegular(format!(
                    "class {c} has in-degrees {existing} and {deg}"
                )))
            }
        }
    }
    let k: Vec<f64> = k
        .iter()
        .map(|k| k.as_ref().map_or(0.0, |k| k.to_f64().expect("finite")))
        .collect();
    if k.iter().any(|&k| k <= 1.0) {
        return Err(SpectralError::NotRegular(format!(
            "need in-degree > 1 on both classes, got {k:?}"
        )));
    }
    let n = d.vertex_count();
    let adjacency = ops.transition_dense();
    let squared = &adjacency * &adjacency;

    // W f(x) = 1/(k_c (k_c' − 1)) Σ_{e: x→y} Σ_{e': y→z} i(e)(i(e') − [e' = ē]) f(z)
    let mut two_step = DMatrix::zeros(n, n);
    for x in 0..n {
        let c = parity[x] as usize;
        let norm = k[c] * (k[1 - c] - 1.0);
        for &e in d.out_edges(x) {
            let y = d.terminus(e);
            let ie = d.index(e).to_f64().expect("finite");
            for &e2 in d.out_edges(y) {
                let mut lifts = d.index(e2).to_f64().expect("finite");
                if e2 == d.partner(e) {
                    lifts -= 1.0;
                }
                two_step[(x, d.terminus(e2))] += ie * lifts / norm;
            }
        }
    }
    let near_boundary = |x: usize| d.is_boundary(x) || d.neighbors(x).any(|y| d.is_boundary(y));
    let interior = [0u8, 1u8].map(|c| {
        (0..n)
            .filter(|&x| parity[x] == c && !near_boundary(x))
            .collect::<Vec<_>>()
    });
    Ok(ParityBlocks {
        parity,
        k: [k[0], k[1]],
        adjacency,
        squared,
        two_step,
        sqrt_w: ops.sqrt_w.clone(),
        interior,
    })
}

impl ParityBlocks {
    /// Weight of the identity in `A² = α I + (1 − α) W` on class `c` of a
    /// (bi)regular tree: `deg(x)/(k0 k1)`, i.e. `1/k` of the other class.
    pub fn tree_weight(&self, class: ParityClass) -> f64 {
        let c = class.tag() as usize;
        1.0 / self.k[1 - c]
    }

    /// `1/(k0 k1)`.
    pub fn product_weight(&self) -> f64 {
        1.0 / (self.k[0] * self.k[1])
    }

    pub fn interior(&self, class: ParityClass) -> &[usize] {
        &self.interior[class.tag() as usize]
    }

    /// Largest `|A[x][y]|` with `x`, `y` of equal parity (zero when `A`
    /// swaps the classes).
    pub fn parity_leak(&self) -> f64 {
        let n = self.parity.len();
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                if self.parity[x] == self.parity[y] {
                    worst = worst.max(self.adjacency[(x, y)].abs());
                }
            }
        }
        worst
    }

    /// Max entry deviation of `A² − (α I + (1 − α) W)` over interior rows of
    /// `class`.
    pub fn identity_deviation(&self, class: ParityClass, alpha: f64) -> f64 {
        let n = self.parity.len();
        let mut worst: f64 = 0.0;
        for &x in self.interior(class) {
            for z in 0..n {
                let id = if x == z { alpha } else { 0.0 };
                let rhs = id + (1.0 - alpha) * self.two_step[(x, z)];
                worst = worst.max((self.squared[(x, z)] - rhs).abs());
            }
        }
        worst
    }

    fn compressed(&self, m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
        let r = rows.len();
        let mut c = DMatrix::zeros(r, r);
        for (i, &x) in rows.iter().enumerate() {
            for (j, &z) in rows.iter().enumerate() {
                c[(i, j)] = m[(x, z)] * self.sqrt_w[x] / self.sqrt_w[z];
            }
        }
        // symmetric up to rounding; average out the last bits
        (&c + c.transpose()) * 0.5
    }

    /// Sorted spectrum of `A²` compressed to the interior of `class`.
    pub fn squared_spectrum(&self, class: ParityClass) -> Vec<f64> {
        sorted_eigenvalues(self.compressed(&self.squared, self.interior(class)))
    }

    /// Sorted spectrum of `W` compressed to the interior of `class`.
    pub fn two_step_spectrum(&self, class: ParityClass) -> Vec<f64> {
        sorted_eigenvalues(self.compressed(&self.two_step, self.interior(class)))
    }

    /// Max `|σ_i(A²) − (α + (1 − α) σ_i(W))|` over the interior compressions.
    pub fn affine_deviation(&self, class: ParityClass, alpha: f64) -> f64 {
        let sq = self.squared_spectrum(class);
        let w = self.two_step_spectrum(class);
        sq.iter()
            .zip(&w)
            .map(|(s, t)| (s - (alpha + (1.0 - alpha) * t)).abs())
            .fold(0.0, f64::max)
    }

    /// Spectrum of `A²` on the full class (no compression).
    pub fn class_block_spectrum(&self, class: ParityClass) -> Vec<f64> {
        let rows: Vec<usize> = (0..self.parity.len())
            .filter(|&x| self.parity[x] == class.tag())
            .collect();
        sorted_eigenvalues(self.compressed(&self.squared, &rows))
    }
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquareSplitReport {
    pub k0: f64,
    pub k1: f64,
    /// Identity weight used per class (`deg/(k0 k1)`).
    pub alpha: [f64; 2],
    pub parity_leak: f64,
    pub identity_deviation: f64,
    pub affine_deviation: f64,
    /// Same two checks with the weight `1/(k0 k1)` on both classes.
    pub product_weight_identity_deviation: f64,
    pub product_weight_affine_deviation: f64,
    pub interior_rows: [usize; 2],
    pub passed: bool,
}

/// Check that `A` swaps the parity classes and that on each class
/// `A² = α I + (1 − α) W` with `α = deg/(k0 k1)`, entrywise on interior rows
/// and on the spectra of the interior compressions.
pub fn square_split_check(d: &Diagram, tol: f64) -> Result<SquareSplitReport, SpectralError> {
    let blocks = parity_blocks(d)?;
    let classes = [ParityClass::Even, ParityClass::Odd];
    let alpha = classes.map(|c| blocks.tree_weight(c));
    let beta = blocks.product_weight();
    let max_over = |f: &dyn Fn(ParityClass) -> f64| classes.iter().map(|&c| f(c)).fold(0.0, f64::max);
    let identity_deviation = max_over(&|c| blocks.identity_deviation(c, blocks.tree_weight(c)));
    let affine_deviation = max_over(&|c| blocks.affine_deviation(c, blocks.tree_weight(c)));
    let product_weight_identity_deviation = max_over(&|c| blocks.identity_deviation(c, beta));
    let product_weight_affine_deviation = max_over(&|c| blocks.affine_deviation(c, beta));
    let parity_leak = blocks.parity_leak();
    Ok(SquareSplitReport {
        k0: blocks.k[0],
        k1: blocks.k[1],
        alpha,
        parity_leak,
        identity_deviation,
        affine_deviation,
        product_weight_identity_deviation,
        product_weight_affine_deviation,
        interior_rows: [blocks.interior[0].len(), blocks.interior[1].len()],
        passed: parity_leak <= tol && identity_deviation <= tol && affine_deviation <= tol,
    })
}
