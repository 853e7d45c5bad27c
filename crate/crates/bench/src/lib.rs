//! Fixtures shared by the benchmarks.

use covrad_core::linalg::rat_int;
use covrad_core::lonely_runner::{hexagon_hrep, zonotope_from_triple};
use covrad_core::{normalize, normalize_velocities, HPolytope};

/// Standard simplex `conv{0, e_1, …, e_n}`, recentred.
pub fn simplex(n: usize) -> HPolytope {
    let mut a: Vec<Vec<_>> = (0..n)
        .map(|k| (0..n).map(|j| rat_int(-i64::from(j == k))).collect())
        .collect();
    a.push(vec![rat_int(1); n]);
    let mut b = vec![rat_int(0); n];
    b.push(rat_int(1));
    normalize(&a, &b).expect("simplex is full-dimensional").0
}

/// Centred hexagon of a velocity triple.
pub fn hexagon(v: [u64; 3]) -> HPolytope {
    let v = normalize_velocities(&v).expect("distinct velocities");
    hexagon_hrep(&zonotope_from_triple(&v).expect("triple")).expect("hexagon")
}
