#![allow(dead_code)]

use lattice_gap::{int, ratio, Diagram, DiagramSpec, Rational};
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;

/// Connected diagram with `n` vertices: a random spanning tree plus `extra`
/// edges (parallel edges and loops allowed). Vertex and edge masses are
/// drawn first, indices are then `μ(e)/μ(∂0 e)`, so every cycle is
/// consistent by construction.
pub fn random_diagram<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Diagram {
    let mu: Vec<Rational> = (0..n)
        .map(|_| ratio(rng.gen_range(1..=6), rng.gen_range(1..=6)))
        .collect();
    let mut s = DiagramSpec::new();
    for v in 0..n {
        s.vertex(format!("v{v}"));
    }
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for _ in 0..extra {
        pairs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    for (k, (a, b)) in pairs.into_iter().enumerate() {
        let m = if a == b {
            // a loop needs equal indices on both halves
            mu[a].clone() * int(rng.gen_range(1..=3))
        } else {
            ratio(rng.gen_range(1..=5), rng.gen_range(1..=5))
        };
        s.edge(format!("e{k}"), format!("v{a}"), format!("v{b}"), &m / &mu[a], &m / &mu[b]);
    }
    s.base("v0", mu[0].clone());
    s.build().expect("consistent by construction")
}

/// Connected diagram with integer indices: vertex orders `n_x` from a
/// divisor-rich set, edge orders dividing both endpoint orders.
pub fn random_integer_diagram<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Diagram {
    const ORDERS: [i64; 8] = [1, 2, 3, 4, 6, 8, 12, 24];
    let order: Vec<i64> = (0..n).map(|_| *ORDERS.choose(rng).unwrap()).collect();
    let mut s = DiagramSpec::new();
    for v in 0..n {
        s.vertex(format!("v{v}"));
    }
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            pairs.push((a, b));
        }
    }
    for (k, (a, b)) in pairs.into_iter().enumerate() {
        let g = order[a].gcd(&order[b]);
        let divisors: Vec<i64> = (1..=g).filter(|d| g % d == 0).collect();
        let ne = *divisors.choose(rng).unwrap();
        s.edge(format!("e{k}"), format!("v{a}"), format!("v{b}"), int(order[a] / ne), int(order[b] / ne));
    }
    s.base("v0", ratio(1, order[0]));
    s.build().expect("consistent by construction")
}
