use lattice_gap::generators::gen_tree_ball;
use lattice_gap::hecke::{
    g_kernel, product_weight, radial_convolve, sphere_size, squared_adjacency_kernels, tree_weight,
    verify_recurrences, BaseClass, RadialFunction,
};
use lattice_gap::ratio;
use proptest::prelude::*;

fn delta(k0: u32, k1: u32, r: u32) -> RadialFunction {
    RadialFunction::delta(k0, k1, BaseClass::X0, r)
}

#[test]
fn sphere_sizes_follow_the_two_step_recursion() {
    for (k0, k1) in [(3, 3), (3, 4), (4, 5)] {
        for n in 1..12 {
            let deg = if n % 2 == 1 { k1 } else { k0 };
            assert_eq!(sphere_size(k0, k1, n + 1), sphere_size(k0, k1, n) * (deg as u128 - 1));
        }
    }
    let t = gen_tree_ball(4, 3, 8).unwrap();
    for n in 0..=8 {
        assert_eq!(t.sphere(n).count() as u128, sphere_size(4, 3, n));
    }
}

#[test]
fn recurrences_on_biregular_trees() {
    for (k0, k1) in [(3, 4), (4, 3), (2, 3)] {
        let rep = verify_recurrences(k0, k1, 3).unwrap();
        assert!(rep.all_hold(), "({k0},{k1})");
        assert_eq!(rep.max_radius, 8);
    }
}

#[test]
fn delta_four_radius_zero_cancels() {
    let (k0, k1) = (3, 4);
    let sq = radial_convolve(&delta(k0, k1, 2), &delta(k0, k1, 2)).unwrap();
    assert_eq!(sq.coeff(0), ratio(k0 as i64 * (k1 as i64 - 1), 1));
    let rest = sq.sub(&delta(k0, k1, 0).scale(&ratio(9, 1)));
    assert!(rest.coeff(0) == ratio(0, 1));
}

#[test]
fn other_base_class_swaps_degrees() {
    let a = RadialFunction::delta(3, 4, BaseClass::X1, 2);
    let sq = radial_convolve(&a, &a).unwrap();
    assert_eq!(sq.coeff(0), ratio(4 * 2, 1));
    assert_eq!(sq.coeff(2), ratio(1, 1));
}

#[test]
fn g_kernel_normalisation() {
    for (k0, k1) in [(3, 3), (3, 4), (4, 3)] {
        let kernels = squared_adjacency_kernels(k0, k1, BaseClass::X0).unwrap();
        assert!(kernels.len() > 1);
        let tree = g_kernel(k0, k1, BaseClass::X0, &tree_weight(k0, k1, BaseClass::X0));
        assert!(kernels.iter().all(|k| *k == tree));
        // weight 1/(k0 k1) puts too little mass on the diagonal
        let literal = g_kernel(k0, k1, BaseClass::X0, &product_weight(k0, k1));
        assert_ne!(kernels[0], literal);
        assert_eq!(literal.l1_norm(), ratio(1, 1));
        assert_eq!(tree.l1_norm(), ratio(1, 1));
    }
}

fn small_radial() -> impl Strategy<Value = RadialFunction> {
    proptest::collection::vec((0u32..=2, -3i64..=3), 1..3).prop_map(|terms| {
        terms
            .into_iter()
            .fold(RadialFunction::zero(3, 4, BaseClass::X0), |f, (r, c)| {
                let v = f.coeff(2 * r) + ratio(c, 1);
                f.with(2 * r, v)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn convolution_commutes(a in small_radial(), b in small_radial()) {
        prop_assert_eq!(radial_convolve(&a, &b).unwrap(), radial_convolve(&b, &a).unwrap());
    }

    #[test]
    fn convolution_associates(a in small_radial(), b in small_radial()) {
        let c = delta(3, 4, 2);
        let left = radial_convolve(&radial_convolve(&a, &b).unwrap(), &c).unwrap();
        let right = radial_convolve(&a, &radial_convolve(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}
