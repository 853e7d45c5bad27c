//! Brute-force lower bound on the covering radius from a rational grid.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lattice::{lbar, DEFAULT_LBAR_CAP};
use crate::linalg::Rational;
use crate::polytope::{bounds, HPolytope};

/// `h_q = max_{p ∈ {0,1/q,…,1}^n} min_{z ∈ L̄_P} max_i a_i·(p - z)/b_i`.
///
/// Every grid point is covered by `h·P + Z^n` only for `h >= h_q`, so
/// `h_q <= µ(P)`; equality holds once `q` is a multiple of the denominators
/// of some last-covered point. Refuses grids with more than `cap` points.
pub fn grid_oracle(p: &HPolytope, q: u64, cap: u128) -> Result<Rational> {
    if q == 0 {
        return Err(Error::usage("grid denominator must be positive"));
    }
    let n = p.dim();
    let side = q as u128 + 1;
    let predicted = (0..n).fold(1u128, |acc, _| acc.saturating_mul(side));
    if predicted > cap {
        return Err(Error::Resource {
            what: "oracle grid",
            predicted,
            cap,
        });
    }
    let b = bounds(p);
    let lattice = lbar(p, &b.mu0, &b.beta0, DEFAULT_LBAR_CAP)?;
    let overflow = || Error::domain("oracle arithmetic exceeds 128 bits");
    let small = |v: &BigInt| v.to_i128().ok_or_else(overflow);
    let normals: Vec<Vec<i128>> = p
        .normals()
        .iter()
        .map(|r| r.iter().map(small).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let offsets: Vec<i128> = p.offsets().iter().map(small).collect::<Result<_>>()?;
    let q = q as i128;
    // a_i·z·q for every lattice point, precomputed
    let scaled: Vec<Vec<i128>> = lattice
        .points()
        .iter()
        .map(|z| {
            normals
                .iter()
                .map(|a| {
                    a.iter()
                        .zip(z)
                        .try_fold(0i128, |s, (ak, &zk)| s.checked_add(ak.checked_mul(zk as i128)?))
                        .and_then(|v| v.checked_mul(q))
                        .ok_or_else(overflow)
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;

    // Fractions num/den with den > 0; the common factor 1/q is applied at the end.
    let less = |a: (i128, i128), c: (i128, i128)| -> Result<Ordering> {
        let l = a.0.checked_mul(c.1).ok_or_else(overflow)?;
        let r = c.0.checked_mul(a.1).ok_or_else(overflow)?;
        Ok(l.cmp(&r))
    };

    let mut best: Option<(i128, i128)> = None;
    let mut k = vec![0i128; n];
    loop {
        let ak: Vec<i128> = normals
            .iter()
            .map(|a| {
                a.iter()
                    .zip(&k)
                    .try_fold(0i128, |s, (x, y)| s.checked_add(x.checked_mul(*y)?))
                    .ok_or_else(overflow)
            })
            .collect::<Result<_>>()?;
        let mut inner: Option<(i128, i128)> = None;
        for az in &scaled {
            let mut gauge: Option<(i128, i128)> = None;
            for i in 0..normals.len() {
                let v = (ak[i] - az[i], offsets[i]);
                if gauge.map_or(Ok(true), |g| less(v, g).map(|o| o == Ordering::Greater))? {
                    gauge = Some(v);
                }
                // this z cannot beat the current minimum
                if let (Some(g), Some(m)) = (gauge, inner) {
                    if less(g, m)? != Ordering::Less {
                        break;
                    }
                }
            }
            let g = gauge.expect("polytope has facets");
            if inner.map_or(Ok(true), |m| less(g, m).map(|o| o == Ordering::Less))? {
                inner = Some(g);
            }
            // the grid point is already covered below the running maximum
            if let (Some(m), Some(b)) = (inner, best) {
                if less(m, b)? != Ordering::Greater {
                    break;
                }
            }
        }
        let m = inner.expect("lattice set is nonempty");
        if best.map_or(Ok(true), |b| less(m, b).map(|o| o == Ordering::Greater))? {
            best = Some(m);
        }
        let mut axis = n;
        loop {
            if axis == 0 {
                let (num, den) = best.expect("grid is nonempty");
                return Ok(Rational::new(BigInt::from(num), BigInt::from(den) * BigInt::from(q)));
            }
            axis -= 1;
            if k[axis] < q {
                k[axis] += 1;
                k[axis + 1..].iter_mut().for_each(|c| *c = 0);
                break;
            }
        }
    }
}
