//! Invariance and consistency properties of the covering radius search.

use covrad_core::linalg::{integer_kernel_basis, maximal_minors, rat, rat_int};
use covrad_core::lonely_runner::{
    hexagon_hrep, interior_lattice_points, slrc_check_general, zonotope_from_triple,
    zonotope_general,
};
use covrad_core::polytope::{lattice_scaling, polygon_area};
use covrad_core::{
    covering_radius, grid_oracle, lattice_width, normalize, normalize_velocities, slrc_check,
    verify_certificate, vertices, HPolytope, Rational, SearchConfig,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn cfg() -> SearchConfig {
    SearchConfig {
        worker_count: 2,
        ..SearchConfig::default()
    }
}

fn mu(p: &HPolytope) -> Rational {
    covering_radius(p, &cfg()).unwrap().mu
}

fn hexagon(v: &[u64]) -> HPolytope {
    hexagon_hrep(&zonotope_from_triple(&normalize_velocities(v).unwrap()).unwrap()).unwrap()
}

fn ints(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| rat_int(v)).collect())
        .collect()
}

#[test]
fn simplex_plane() {
    let (p, _) = normalize(&ints(&[&[-1, 0], &[0, -1], &[1, 1]]), &[rat_int(0), rat_int(0), rat_int(1)]).unwrap();
    assert_eq!(mu(&p), rat(2, 1));
}

#[test]
fn simplex_space() {
    let (p, _) = normalize(
        &ints(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1], &[1, 1, 1]]),
        &[rat_int(0), rat_int(0), rat_int(0), rat_int(1)],
    )
    .unwrap();
    let cert = covering_radius(&p, &cfg()).unwrap();
    assert_eq!(cert.mu, rat(3, 1));
    assert!(verify_certificate(&p, &cert));
}

#[test]
fn scaling_divides_the_radius() {
    for v in [[1, 2, 3], [1, 3, 5], [2, 5, 7]] {
        let h = hexagon(&v);
        let base = mu(&h);
        for c in [2u32, 3] {
            assert_eq!(mu(&h.dilate(c)), &base / rat_int(c), "{v:?} scaled by {c}");
        }
    }
}

#[test]
fn translation_does_not_matter() {
    // uncentred square [0,1]^2 and a copy shifted by (7/3, -5/2)
    let a = ints(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
    let (p, _) = normalize(&a, &[rat_int(1), rat_int(0), rat_int(1), rat_int(0)]).unwrap();
    let t = [rat(7, 3), rat(-5, 2)];
    let b = vec![
        rat_int(1) + &t[0],
        -t[0].clone(),
        rat_int(1) + &t[1],
        -t[1].clone(),
    ];
    let (q, shift) = normalize(&a, &b).unwrap();
    assert_eq!(shift.entries(), &[rat(17, 6), rat(-2, 1)]);
    assert_eq!(mu(&p), mu(&q));

    // the hexagon written with the triangle's centroid as origin instead of its centre
    let h = hexagon(&[1, 2, 5]);
    let shifted_b: Vec<Rational> = (0..h.facet_count())
        .map(|i| rat_int(h.offset(i).clone()) + rat(1, 3) * rat_int(h.normal(i)[0].clone()))
        .collect();
    let rows: Vec<Vec<Rational>> = h
        .normals()
        .iter()
        .map(|r| r.iter().cloned().map(rat_int).collect())
        .collect();
    let (h2, _) = normalize(&rows, &shifted_b).unwrap();
    assert_eq!(mu(&h), mu(&h2));
}

#[test]
fn unimodular_maps_do_not_matter() {
    // U^{-1} for U = [[1,1],[0,1]] and U = [[2,1],[1,1]]
    let maps: [&[Vec<i64>]; 2] = [&[vec![1, -1], vec![0, 1]], &[vec![1, -1], vec![-1, 2]]];
    for v in [[1, 2, 3], [1, 3, 4], [2, 3, 7]] {
        let h = hexagon(&v);
        let base = mu(&h);
        for m in maps {
            assert_eq!(mu(&h.transform(m).unwrap()), base, "{v:?}");
        }
    }
}

#[test]
fn containment_reverses_the_order() {
    let square = ints(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
    let (sq, _) = normalize(&square, &[rat_int(1), rat_int(0), rat_int(1), rat_int(0)]).unwrap();
    let (tri, _) = normalize(&ints(&[&[-1, 0], &[0, -1], &[1, 1]]), &[rat_int(0), rat_int(0), rat_int(1)]).unwrap();
    let (big, _) = normalize(&square, &[rat_int(2), rat_int(0), rat_int(2), rat_int(0)]).unwrap();
    let (mu_tri, mu_sq, mu_big) = (mu(&tri), mu(&sq), mu(&big));
    assert!(mu_tri >= mu_sq);
    assert!(mu_sq >= mu_big);
    assert_eq!(mu_big, rat(1, 2));
}

#[test]
fn kernel_of_one_to_four() {
    let v: Vec<BigInt> = (1..=4).map(BigInt::from).collect();
    let basis = integer_kernel_basis(&v).unwrap();
    assert_eq!(basis.len(), 3);
    for row in &basis {
        let dot: BigInt = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert_eq!(dot, BigInt::from(0));
    }
    let mut minors: Vec<BigInt> = maximal_minors(&basis).into_iter().map(|m| if m < BigInt::from(0) { -m } else { m }).collect();
    minors.sort();
    assert_eq!(minors, v);
    // the display basis with first row (2,-1,0,0) spans the same lattice:
    // both are bases of Z^4 ∩ v⊥, so every minor agrees up to one common sign
    let display: Vec<Vec<BigInt>> = [[2, -1, 0, 0], [3, 0, -1, 0], [4, 0, 0, -1]]
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let a = maximal_minors(&basis);
    let b = maximal_minors(&display);
    assert!(a == b || a.iter().zip(&b).all(|(x, y)| x == &-y));
    let z = zonotope_general(&normalize_velocities(&[1, 2, 3, 4]).unwrap()).unwrap();
    assert_eq!(z.minor_multiset(), vec![1, 2, 3, 4]);
}

#[test]
fn high_dimension_needs_the_flag() {
    let z = zonotope_general(&normalize_velocities(&[1, 2, 3, 4, 5]).unwrap()).unwrap();
    assert_eq!(z.d(), 5);
    let mut a = Vec::new();
    for k in 0..4 {
        let mut e = vec![0i64; 4];
        e[k] = 2;
        a.push(e.clone());
        e[k] = -2;
        a.push(e);
    }
    let cube = HPolytope::from_i64(&a, &[1; 8]).unwrap();
    assert!(matches!(covering_radius(&cube, &cfg()), Err(covrad_core::Error::Usage(_))));
}

#[test]
fn both_zonotope_constructions_agree() {
    for v in [[1, 2, 3], [2, 3, 5], [2, 5, 7], [3, 4, 5]] {
        let v = normalize_velocities(&v).unwrap();
        assert_eq!(slrc_check(&v, 1).unwrap().mu, slrc_check_general(&v, 1).unwrap().mu);
    }
}

#[test]
fn oracle_meets_the_radius_at_the_point_denominator() {
    for v in [[1, 2, 3], [1, 3, 5]] {
        let h = hexagon(&v);
        let cert = covering_radius(&h, &cfg()).unwrap();
        let q = cert
            .last_covered
            .iter()
            .fold(BigInt::from(1), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
        let q: u64 = q.try_into().unwrap();
        assert_eq!(grid_oracle(&h, q, 1 << 24).unwrap(), cert.mu);
        assert!(grid_oracle(&h, 1, 1 << 24).unwrap() <= cert.mu);
    }
}

#[test]
fn hexagon_widths_and_interior_points() {
    for (v, w) in [([1, 2, 3], 3), ([1, 2, 5], 3), ([1, 3, 4], 3), ([1, 3, 5], 4)] {
        let h = hexagon(&v);
        assert_eq!(lattice_width(&h).width, rat_int(w));
        let z = zonotope_from_triple(&normalize_velocities(&v).unwrap()).unwrap();
        assert!(!interior_lattice_points(&z).unwrap().is_empty());
        // the centred hexagon is a translate of a lattice polygon
        let verts = vertices(&h);
        assert!(lattice_scaling(&verts) <= rat_int(2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boxes_have_radius_one_over_shortest_side(a in 1i64..5, b in 1i64..5, c in 1i64..4, d in 1i64..4) {
        // [0, a/c] x [0, b/d]
        let rows = ints(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        let (p, _) = normalize(&rows, &[rat(a, c), rat_int(0), rat(b, d), rat_int(0)]).unwrap();
        let expect = std::cmp::max(rat(c, a), rat(d, b));
        let cert = covering_radius(&p, &cfg()).unwrap();
        prop_assert_eq!(&cert.mu, &expect);
        prop_assert!(verify_certificate(&p, &cert));
        prop_assert!(grid_oracle(&p, 2, 1 << 20).unwrap() <= expect);
    }

    #[test]
    fn hexagon_area_is_the_velocity_sum(v1 in 1u64..12, dv2 in 1u64..12, dv3 in 1u64..12) {
        let raw = [v1, v1 + dv2, v1 + dv2 + dv3];
        let v = normalize_velocities(&raw).unwrap();
        let z = zonotope_from_triple(&v).unwrap();
        prop_assert_eq!(z.minor_multiset(), v.as_slice().to_vec());
        let h = hexagon_hrep(&z).unwrap();
        prop_assert_eq!(polygon_area(&h).unwrap(), rat_int(v.sum()));
        prop_assert!(lattice_width(&h).width >= rat_int(3));
    }
}
