mod common;

use lattice_gap::cheeger::{
    boundary_measure, cheeger_exact, cheeger_sweep, expander_verdict, gap_certificate, sweep_by, CheegerError,
    UpperSource, Verdict, EXACT_CUTOFF,
};
use lattice_gap::generators::{gen_ray_blocks, nagao_cusp, CuspFamily, FixedFamily, RayBlocksFamily, RayBlocksSpec};
use lattice_gap::spectral::{lambda_bottom, rayleigh, SpectralOptions};
use lattice_gap::{int, ratio, Diagram, Rational};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Reference minimiser: every subset, exact rationals, no shortcuts.
fn brute_force(d: &Diagram) -> (Rational, Vec<usize>) {
    let n = d.vertex_count();
    let total = d.total_volume();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for mask in 1u32..(1 << n) - 1 {
        let set: Vec<usize> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
        let cut = boundary_measure(d, &set).unwrap();
        if cut.mu_set.clone() * int(2) > total {
            continue;
        }
        let better = match &best {
            None => true,
            Some((r, s)) => cut.ratio < *r || (cut.ratio == *r && set < *s),
        };
        if better {
            best = Some((cut.ratio, set));
        }
    }
    best.unwrap()
}

#[test]
fn block_two_boundary() {
    let rb = gen_ray_blocks(&RayBlocksSpec { q: 2, blocks: 2 }).unwrap();
    let cut = boundary_measure(&rb.diagram, rb.block(2)).unwrap();
    assert_eq!(cut.mu_boundary, ratio(3, 4));
    assert_eq!(cut.ratio, ratio(3, 5));
    assert!(cut.feasible);
}

#[test]
fn block_ratios_for_all_q() {
    for q in [2, 3, 4] {
        let rb = gen_ray_blocks(&RayBlocksSpec { q, blocks: 5 }).unwrap();
        for n in 1..=5 {
            assert_eq!(
                boundary_measure(&rb.diagram, rb.block(n)).unwrap().ratio,
                ratio(q as i64 + 1, 2 * n as i64 + 1)
            );
        }
    }
}

#[test]
fn exact_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=12 {
        let d = common::random_diagram(&mut rng, n, n / 2);
        let exact = cheeger_exact(&d).unwrap();
        let (r, set) = brute_force(&d);
        assert_eq!(exact.ratio, r);
        assert_eq!(exact.set, set, "tie-break must pick the smallest index list");
    }
}

#[test]
fn exact_on_small_ray_blocks() {
    let rb = gen_ray_blocks(&RayBlocksSpec { q: 2, blocks: 2 }).unwrap();
    assert_eq!(rb.diagram.vertex_count(), 14);
    let exact = cheeger_exact(&rb.diagram).unwrap();
    assert!(exact.ratio <= ratio(3, 5));
    assert_eq!((exact.ratio.clone(), exact.set.clone()), brute_force(&rb.diagram));
    let big = gen_ray_blocks(&RayBlocksSpec { q: 2, blocks: 4 }).unwrap();
    assert_eq!(cheeger_exact(&big.diagram).unwrap_err(), CheegerError::TooLarge(34));
}

#[test]
fn exact_handles_the_cutoff_size() {
    let cusp = nagao_cusp(2, 20).unwrap();
    assert_eq!(cusp.diagram.vertex_count(), EXACT_CUTOFF);
    let exact = cheeger_exact(&cusp.diagram).unwrap();
    assert!(exact.feasible);
}

#[test]
fn sweep_on_ray_blocks_ten() {
    let rb = gen_ray_blocks(&RayBlocksSpec { q: 2, blocks: 10 }).unwrap();
    let sweep = cheeger_sweep(&rb.diagram).unwrap();
    assert!(sweep.feasible);
    assert!(sweep.ratio <= ratio(1, 4), "{}", sweep.ratio);
}

#[test]
fn best_cut_indicator_dominates_lambda() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [4, 8, 12, 16] {
        let d = common::random_diagram(&mut rng, n, n / 2);
        let exact = cheeger_exact(&d).unwrap();
        let mut f = vec![0.0; n];
        for &v in &exact.set {
            f[v] = 1.0;
        }
        let lambda = lambda_bottom(&d, 1e-10).unwrap().lambda;
        assert!(rayleigh(&d, &f).unwrap() >= lambda - 1e-9);
    }
}

#[test]
fn sweep_by_constant_vector_still_returns_a_feasible_cut() {
    let rb = gen_ray_blocks(&RayBlocksSpec { q: 2, blocks: 1 }).unwrap();
    let cut = sweep_by(&rb.diagram, &vec![0.0; rb.diagram.vertex_count()]).unwrap();
    assert!(cut.feasible);
}

#[test]
fn ray_blocks_verdict() {
    let rec = expander_verdict(&RayBlocksFamily { q: 2 }, &[5, 10, 20], &ratio(1, 10), &SpectralOptions::default())
        .unwrap();
    assert_eq!(rec.verdict, Verdict::NoExpansionWitness);
    let witnesses: Vec<Rational> = rec.entries.iter().map(|e| e.h_upper.clone()).collect();
    assert_eq!(witnesses, vec![ratio(3, 11), ratio(3, 21), ratio(3, 41)]);
    assert!(rec.entries.iter().all(|e| e.upper_source == UpperSource::Witness));
    // the rim of a truncation admits even smaller cuts than the block
    for e in &rec.entries {
        assert!(e.sweep_upper.as_ref().unwrap() < &e.h_upper);
    }
    assert!(rec.entries.windows(2).all(|w| w[1].lambda < w[0].lambda));
    assert!(rec.warnings.is_empty(), "{:?}", rec.warnings);
    assert!(rec.summary().starts_with("no-expansion-witness"));
}

#[test]
fn cusp_verdict() {
    let cusp = nagao_cusp(2, 5).unwrap();
    let cert = gap_certificate(&cusp.diagram, &cusp.core, &cusp.c, &cusp.d).unwrap();
    // the certificate moves with N; take the smallest over the ladder as ε
    let eps = [5u32, 10, 20]
        .iter()
        .map(|&n| {
            let c = nagao_cusp(2, n).unwrap();
            gap_certificate(&c.diagram, &c.core, &c.c, &c.d).unwrap().certified
        })
        .min()
        .unwrap();
    assert!(eps <= cert.certified);
    let rec = expander_verdict(&CuspFamily { q: 2 }, &[5, 10, 20], &eps, &SpectralOptions::default()).unwrap();
    assert_eq!(rec.verdict, Verdict::ExpansionConsistent, "{rec:?}");
    for e in &rec.entries {
        assert!(e.h_exact.as_ref().unwrap() >= e.certified_lower.as_ref().unwrap());
    }
}

#[test]
fn fixed_diagram_verdict() {
    let d = gen_ray_blocks(&RayBlocksSpec { q: 3, blocks: 1 }).unwrap().diagram;
    let h = cheeger_exact(&d).unwrap().ratio;
    let fam = FixedFamily(d);
    let opts = SpectralOptions::default();
    let below = expander_verdict(&fam, &[1], &(h.clone() / int(2)), &opts).unwrap();
    assert_eq!(below.verdict, Verdict::ExpansionConsistent);
    let above = expander_verdict(&fam, &[1], &(h * int(2)), &opts).unwrap();
    assert_eq!(above.verdict, Verdict::NoExpansionWitness);
    assert_eq!(expander_verdict(&fam, &[2, 1], &int(1), &opts).unwrap_err(), CheegerError::BadLadder);
}

#[test]
fn certificate_parameters() {
    let cusp = nagao_cusp(3, 4).unwrap();
    let d = &cusp.diagram;
    // a stronger decay than the diagram has is rejected at a named vertex
    match gap_certificate(d, &cusp.core, &cusp.c, &int(4)) {
        Err(CheegerError::DecayViolated { vertex, .. }) => assert_eq!(vertex, "r1_2"),
        other => panic!("{other:?}"),
    }
    match gap_certificate(d, &cusp.core, &int(4), &cusp.d) {
        Err(CheegerError::DecayViolated { vertex, .. }) => assert_eq!(vertex, "r1_1"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        gap_certificate(d, &[0], &cusp.c, &cusp.d),
        Err(CheegerError::CoreTooSmall { .. })
    ));
    let weaker = gap_certificate(d, &cusp.core, &int(1), &int(2)).unwrap();
    assert_eq!(weaker.tail_bound, ratio(1, 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sweep_never_beats_exact(seed in any::<u64>(), n in 2usize..=14, extra in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_diagram(&mut rng, n, extra);
        let exact = cheeger_exact(&d).unwrap();
        let sweep = cheeger_sweep(&d).unwrap();
        prop_assert!(exact.feasible && sweep.feasible);
        prop_assert!(sweep.ratio >= exact.ratio);
    }

    #[test]
    fn certificate_is_a_lower_bound(q in 2u32..=4, length in 1u32..=12) {
        let cusp = nagao_cusp(q, length).unwrap();
        let cert = gap_certificate(&cusp.diagram, &cusp.core, &cusp.c, &cusp.d).unwrap();
        let exact = cheeger_exact(&cusp.diagram).unwrap();
        prop_assert!(exact.ratio >= cert.certified);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Lower Cheeger inequality for the reversible walk `A_D`: the conductance
    /// is at least `h / max indeg`, so `λ ≥ (h / max indeg)² / 2`.
    #[test]
    fn lambda_respects_the_conductance_floor(seed in any::<u64>(), n in 2usize..=12, extra in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_diagram(&mut rng, n, extra);
        let h = lattice_gap::cheeger::approx(&cheeger_exact(&d).unwrap().ratio);
        let phi = h / lattice_gap::cheeger::approx(&d.max_indeg());
        let lambda = lambda_bottom(&d, 1e-10).unwrap().lambda;
        prop_assert!(lambda >= phi * phi / 2.0 - 1e-9, "{lambda} < {}", phi * phi / 2.0);
    }
}
