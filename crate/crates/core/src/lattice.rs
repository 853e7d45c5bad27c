//! Integer points in boxes and the candidate translate set `L̄_P`.

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{ceil_int, floor_int, rat_int, RatVec, Rational};
use crate::polytope::{coordinate_ranges, HPolytope};

/// Default cap on the number of points materialized by [`lbar`].
pub const DEFAULT_LBAR_CAP: u128 = 10_000_000;

/// Lexicographically sorted, duplicate-free set of integer points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePointSet {
    dim: usize,
    points: Vec<Vec<i64>>,
}

impl LatticePointSet {
    /// Builds a set from arbitrary points; sorts and deduplicates.
    pub fn from_points(dim: usize, mut points: Vec<Vec<i64>>) -> Result<Self> {
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::usage("lattice point of the wrong dimension"));
        }
        points.sort();
        points.dedup();
        Ok(LatticePointSet { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn contains(&self, z: &[i64]) -> bool {
        self.points.binary_search_by(|p| p.as_slice().cmp(z)).is_ok()
    }
}

/// Integer range `[lo, hi]` per axis; `None` when some axis is empty.
fn axis_ranges(lo: &RatVec, hi: &RatVec) -> Result<Option<Vec<(i64, i64)>>> {
    if lo.dim() != hi.dim() {
        return Err(Error::usage("box corners have different dimensions"));
    }
    let mut ranges = Vec::with_capacity(lo.dim());
    for (l, h) in lo.iter().zip(hi.iter()) {
        let (l, h) = (ceil_int(l), floor_int(h));
        if l > h {
            return Ok(None);
        }
        let l = l
            .to_i64()
            .ok_or_else(|| Error::domain("box corner out of 64-bit range"))?;
        let h = h
            .to_i64()
            .ok_or_else(|| Error::domain("box corner out of 64-bit range"))?;
        ranges.push((l, h));
    }
    Ok(Some(ranges))
}

fn predicted_count(ranges: &[(i64, i64)]) -> u128 {
    ranges
        .iter()
        .map(|&(l, h)| (h as i128 - l as i128 + 1) as u128)
        .fold(1u128, |acc, k| acc.saturating_mul(k))
}

fn enumerate_ranges(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(predicted_count(ranges) as usize);
    let mut current: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if ranges.is_empty() {
        return out;
    }
    loop {
        out.push(current.clone());
        // odometer, last coordinate fastest, so output is lexicographic
        let mut k = ranges.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if current[k] < ranges[k].1 {
                current[k] += 1;
                for (c, r) in current.iter_mut().zip(ranges).skip(k + 1) {
                    *c = r.0;
                }
                break;
            }
        }
    }
}

/// `{ z ∈ Z^n : lo <= z <= hi }` in lexicographic order, refusing to
/// materialize more than `cap` points.
pub fn lattice_points_in_box_capped(lo: &RatVec, hi: &RatVec, cap: u128) -> Result<LatticePointSet> {
    let dim = lo.dim();
    let Some(ranges) = axis_ranges(lo, hi)? else {
        return Ok(LatticePointSet {
            dim,
            points: Vec::new(),
        });
    };
    let predicted = predicted_count(&ranges);
    if predicted > cap {
        return Err(Error::Resource {
            what: "lattice box",
            predicted,
            cap,
        });
    }
    Ok(LatticePointSet {
        dim,
        points: enumerate_ranges(&ranges),
    })
}

pub fn lattice_points_in_box(lo: &RatVec, hi: &RatVec) -> Result<LatticePointSet> {
    lattice_points_in_box_capped(lo, hi, DEFAULT_LBAR_CAP)
}

/// Integer range of each axis of `[0,1]^n - µ0·[-β0, β0]^n`.
pub fn lbar_axis(mu0: &Rational, beta0: &Rational) -> Result<(i64, i64)> {
    if !(mu0 > &Rational::zero() && beta0 > &Rational::zero()) {
        return Err(Error::usage("µ0 and β0 must be positive"));
    }
    let r = mu0 * beta0;
    let lo = ceil_int(&-r.clone());
    let hi = floor_int(&(r + rat_int(1)));
    match (lo.to_i64(), hi.to_i64()) {
        (Some(l), Some(h)) => Ok((l, h)),
        _ => Err(Error::Resource {
            what: "candidate lattice set",
            predicted: u128::MAX,
            cap: DEFAULT_LBAR_CAP,
        }),
    }
}

/// Predicted `|L̄_P|` without materializing it.
pub fn lbar_count(dim: usize, mu0: &Rational, beta0: &Rational) -> Result<u128> {
    let (lo, hi) = lbar_axis(mu0, beta0)?;
    Ok(predicted_count(&vec![(lo, hi); dim]))
}

/// `L̄_P = Z^n ∩ ([0,1]^n - µ0·[-β0, β0]^n)`.
pub fn lbar(p: &HPolytope, mu0: &Rational, beta0: &Rational, cap: u128) -> Result<LatticePointSet> {
    let (lo, hi) = lbar_axis(mu0, beta0)?;
    let ranges = vec![(lo, hi); p.dim()];
    let predicted = predicted_count(&ranges);
    if predicted > cap {
        return Err(Error::Resource {
            what: "candidate lattice set",
            predicted,
            cap,
        });
    }
    Ok(LatticePointSet {
        dim: p.dim(),
        points: enumerate_ranges(&ranges),
    })
}

/// `L_P = Z^n ∩ ([0,1]^n - µ0·P)`, computed directly: `z` belongs iff the
/// polytope `[0,1]^n ∩ (z + µ0·P)` has a vertex.
///
/// Exponential in the facet count; meant for small instances and for
/// measuring how much larger `L̄_P` is.
pub fn lattice_points_lp(p: &HPolytope, mu0: &Rational) -> Result<LatticePointSet> {
    let n = p.dim();
    let ranges = coordinate_ranges(p);
    // z = x - µ0 y with x in [0,1]^n and y in P
    let lo = RatVec::new(ranges.iter().map(|(_, hi)| -(mu0 * hi)).collect());
    let hi = RatVec::new(ranges.iter().map(|(lo, _)| rat_int(1) - mu0 * lo).collect());
    let candidates = lattice_points_in_box(&lo, &hi)?;
    let mut rows: Vec<Vec<Rational>> = p
        .normals()
        .iter()
        .map(|r| r.iter().cloned().map(rat_int).collect())
        .collect();
    for k in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[k] = rat_int(1);
        rows.push(e.clone());
        e[k] = rat_int(-1);
        rows.push(e);
    }
    let mut kept = Vec::new();
    for z in candidates.points() {
        let zq = RatVec::from_ints(z.iter().copied());
        let mut rhs: Vec<Rational> = (0..p.facet_count())
            .map(|i| mu0 * rat_int(p.offset(i).clone()) + zq.dot_int(p.normal(i)))
            .collect();
        for _ in 0..n {
            rhs.push(rat_int(1));
            rhs.push(Rational::zero());
        }
        if has_vertex(&rows, &rhs, n)? {
            kept.push(z.clone());
        }
    }
    LatticePointSet::from_points(n, kept)
}

fn has_vertex(rows: &[Vec<Rational>], rhs: &[Rational], n: usize) -> Result<bool> {
    use itertools::Itertools;
    for subset in (0..rows.len()).combinations(n) {
        let m = crate::linalg::RatMat::from_rows(subset.iter().map(|&i| rows[i].clone()).collect())?;
        let b = RatVec::new(subset.iter().map(|&i| rhs[i].clone()).collect());
        if let Some(x) = crate::linalg::solve_square(&m, &b)? {
            let ok = rows.iter().zip(rhs).all(|(r, bi)| {
                x.iter().zip(r).fold(Rational::zero(), |s, (p, q)| s + p * q) <= *bi
            });
            if ok {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn v(entries: &[(i64, i64)]) -> RatVec {
        RatVec::new(entries.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn unit_box() {
        let s = lattice_points_in_box(&v(&[(0, 1), (0, 1)]), &v(&[(1, 1), (1, 1)])).unwrap();
        assert_eq!(s.points(), &[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn half_box() {
        let s = lattice_points_in_box(&v(&[(-1, 2), (-1, 2)]), &v(&[(1, 2), (1, 2)])).unwrap();
        assert_eq!(s.points(), &[vec![0, 0]]);
    }

    #[test]
    fn skewed_box() {
        let s = lattice_points_in_box(&v(&[(-3, 2), (0, 1)]), &v(&[(1, 2), (1, 1)])).unwrap();
        // x ∈ {-1, 0}, y ∈ {0, 1}
        assert_eq!(s.len(), 4);
        assert!(s.contains(&[-1, 1]));
    }

    #[test]
    fn empty_box_is_not_an_error() {
        let s = lattice_points_in_box(&v(&[(1, 3)]), &v(&[(2, 3)])).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn lbar_examples() {
        let sq = HPolytope::from_i64(&[vec![2, 0], vec![-2, 0], vec![0, 2], vec![0, -2]], &[1, 1, 1, 1])
            .unwrap();
        let s = lbar(&sq, &rat(1, 1), &rat(1, 2), DEFAULT_LBAR_CAP).unwrap();
        assert_eq!(s.points(), &[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);

        let seg = HPolytope::from_i64(&[vec![1], vec![-1]], &[1, 1]).unwrap();
        let s = lbar(&seg, &rat(1, 1), &rat(1, 1), DEFAULT_LBAR_CAP).unwrap();
        assert_eq!(s.points(), &[vec![-1], vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn lbar_cap_is_enforced() {
        let sq = HPolytope::from_i64(&[vec![2, 0], vec![-2, 0], vec![0, 2], vec![0, -2]], &[1, 1, 1, 1])
            .unwrap();
        let err = lbar(&sq, &rat(100, 1), &rat(1, 2), 100).unwrap_err();
        assert!(matches!(err, Error::Resource { predicted: 10404, .. }), "{err}");
    }

    #[test]
    fn lp_is_inside_lbar_and_within_bound() {
        let sq = HPolytope::from_i64(&[vec![2, 0], vec![-2, 0], vec![0, 2], vec![0, -2]], &[1, 1, 1, 1])
            .unwrap();
        let tri = HPolytope::from_i64(&[vec![-3, 0], vec![0, -3], vec![3, 3]], &[1, 1, 1]).unwrap();
        for p in [sq, tri] {
            let b = crate::polytope::bounds(&p);
            let exact = lattice_points_lp(&p, &b.mu0).unwrap();
            let sup = lbar(&p, &b.mu0, &b.beta0, DEFAULT_LBAR_CAP).unwrap();
            assert!(exact.points().iter().all(|z| sup.contains(z)));
            let bound = (rat_int(2) + rat_int(2) * &b.mu0 * &b.beta0).pow(p.dim() as i32);
            assert!(rat_int(sup.len() as i64) <= bound);
            assert!(!exact.is_empty());
        }
    }
}
