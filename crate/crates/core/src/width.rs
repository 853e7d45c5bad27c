//! Lattice width and flatness bounds on the covering radius.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ceil_sqrt, floor_int, rat, rat_int, to_i64, RatVec, Rational};
use crate::polytope::{vertices, HPolytope};

/// `w(P)` and a direction attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WidthResult {
    #[serde(with = "crate::linalg::serde_rational")]
    pub width: Rational,
    /// Minimizing direction with positive leading nonzero coordinate.
    pub direction: Vec<i64>,
    pub candidates_scanned: u64,
}

fn width_along(verts: &[RatVec], z: &[i64]) -> Rational {
    let zb: Vec<BigInt> = z.iter().copied().map(BigInt::from).collect();
    let values: Vec<Rational> = verts.iter().map(|v| v.dot_int(&zb)).collect();
    let max = values.iter().max().expect("vertices");
    let min = values.iter().min().expect("vertices");
    max - min
}

/// All nonzero `z` with `‖z‖_1 <= r` whose first nonzero entry is positive.
fn canonical_ball(n: usize, r: i64) -> Vec<Vec<i64>> {
    fn rec(prefix: &mut Vec<i64>, n: usize, budget: i64, leading: bool, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == n {
            if !leading {
                out.push(prefix.clone());
            }
            return;
        }
        let lo = if leading { 0 } else { -budget };
        for c in lo..=budget {
            prefix.push(c);
            rec(prefix, n, budget - c.abs(), leading && c == 0, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), n, r, true, &mut out);
    out
}

/// Exact lattice width.
///
/// `P` contains the box `[-ρ, ρ]^n` with `ρ = min_i b_i/‖a_i‖_1`, so the width
/// along `z` is at least `2ρ‖z‖_1`. Any direction beating the best unit
/// vector therefore has `‖z‖_1 <= W/(2ρ)`, and that ball is scanned fully.
///
/// Among minimizers the one with the smallest `‖z‖_1` wins, then the
/// lexicographically largest, so coordinate directions come out as `e_1`
/// before `e_2`.
pub fn lattice_width(p: &HPolytope) -> WidthResult {
    let n = p.dim();
    let verts = vertices(p);
    let unit = |k: usize| -> Vec<i64> { (0..n).map(|j| i64::from(j == k)).collect() };
    let w_axis = (0..n)
        .map(|k| width_along(&verts, &unit(k)))
        .min()
        .expect("dimension is positive");
    let rho = (0..p.facet_count())
        .map(|i| {
            let l1: BigInt = p.normal(i).iter().map(|v| v.abs()).sum();
            Rational::new(p.offset(i).clone(), l1)
        })
        .min()
        .expect("facets");
    let radius = floor_int(&(&w_axis / (rat_int(2) * rho)));
    let radius = to_i64(&radius, "width search radius").unwrap_or(i64::MAX);

    let mut best: Option<(Rational, i64, Vec<i64>)> = None;
    let mut scanned = 0u64;
    for z in canonical_ball(n, radius.max(1)) {
        scanned += 1;
        let w = width_along(&verts, &z);
        let l1: i64 = z.iter().map(|v| v.abs()).sum();
        let better = match &best {
            None => true,
            Some((bw, bl, bz)) => (&w, l1).cmp(&(bw, *bl)).then_with(|| bz.cmp(&z)).is_lt(),
        };
        if better {
            best = Some((w, l1, z));
        }
    }
    let (width, _, direction) = best.expect("ball contains the unit vectors");
    WidthResult {
        width,
        direction,
        candidates_scanned: scanned,
    }
}

/// Upper bound on `µ(P)` from the flatness theorem.
///
/// For a centrally symmetric planar body the constant is 2; otherwise the
/// general constant `n^{5/2}` is used, rounded up to two decimals.
pub fn flatness_mu_bound(p: &HPolytope, centrally_symmetric_2d: bool) -> Result<Rational> {
    let w = lattice_width(p).width;
    if w.is_zero() {
        return Err(Error::domain("polytope has zero lattice width"));
    }
    if centrally_symmetric_2d {
        if p.dim() != 2 {
            return Err(Error::usage(format!(
                "the symmetric planar bound needs dimension 2, got {}",
                p.dim()
            )));
        }
        if !p.is_centrally_symmetric() {
            return Err(Error::usage("the symmetric planar bound needs a centrally symmetric polygon"));
        }
        return Ok(rat(2, 1) / w);
    }
    let n = BigInt::from(p.dim());
    let flt = Rational::new(ceil_sqrt(&(n.pow(5) * BigInt::from(10_000))), BigInt::from(100));
    Ok(flt / w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> HPolytope {
        HPolytope::from_i64(&[vec![2, 0], vec![-2, 0], vec![0, 2], vec![0, -2]], &[1, 1, 1, 1]).unwrap()
    }

    #[test]
    fn unit_square() {
        let r = lattice_width(&square());
        assert_eq!(r.width, rat(1, 1));
        assert_eq!(r.direction, vec![1, 0]);
        assert_eq!(flatness_mu_bound(&square(), true).unwrap(), rat(2, 1));
    }

    #[test]
    fn sheared_square_prefers_the_short_direction() {
        // |x2| <= 1/2, |x1 - 2x2| <= 1/2: width 1 along both (0,1) and (1,-2)
        let p = HPolytope::from_i64(
            &[vec![0, 2], vec![0, -2], vec![2, -4], vec![-2, 4]],
            &[1, 1, 1, 1],
        )
        .unwrap();
        let r = lattice_width(&p);
        assert_eq!(r.width, rat(1, 1));
        assert_eq!(r.direction, vec![0, 1]);
    }

    #[test]
    fn symmetric_flag_needs_the_plane() {
        let seg = HPolytope::from_i64(&[vec![1], vec![-1]], &[1, 1]).unwrap();
        assert!(matches!(flatness_mu_bound(&seg, true), Err(Error::Usage(_))));
        // 1^{5/2} = 1, width 2
        assert_eq!(flatness_mu_bound(&seg, false).unwrap(), rat(1, 2));
    }

    #[test]
    fn general_constant_rounds_up() {
        // 2^{5/2} = 5.656..., rounded up to 5.66
        let b = flatness_mu_bound(&square(), false).unwrap();
        assert_eq!(b, rat(566, 100));
    }

    #[test]
    fn ball_is_canonical() {
        let ball = canonical_ball(2, 1);
        assert_eq!(ball, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(canonical_ball(2, 2).len(), 6);
    }
}
