//! Rational polytopes in facet form `{x : Ax <= b}`.
//!
//! Every algorithm in this crate works on a *normalized* description: integer
//! rows, strictly positive right-hand sides (so the origin is interior), no
//! duplicate rows, bounded and full-dimensional. [`normalize`] produces such a
//! description from arbitrary rational data by recentring at the vertex
//! centroid, which leaves the covering radius unchanged.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, lcm_of_denominators, nullspace_basis, primitive_integer_row, rat_int, RatMat, RatVec,
    Rational,
};

/// Integer facet description with `b > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    a: Vec<Vec<BigInt>>,
    b: Vec<BigInt>,
    dim: usize,
}

impl HPolytope {
    /// Wraps integer data that is already normalized.
    ///
    /// Checks the shape, `b > 0`, distinct rows and boundedness; fails with a
    /// domain error otherwise. Use [`normalize`] for general input.
    pub fn new(a: Vec<Vec<BigInt>>, b: Vec<BigInt>) -> Result<Self> {
        let dim = a.first().map_or(0, Vec::len);
        if dim == 0 || a.len() != b.len() || a.iter().any(|r| r.len() != dim) {
            return Err(Error::usage(format!(
                "malformed facet description: {} rows, {} right-hand sides",
                a.len(),
                b.len()
            )));
        }
        if let Some(i) = b.iter().position(|v| !v.is_positive()) {
            return Err(Error::domain(format!(
                "right-hand side b[{i}] = {} is not positive; the origin must be interior",
                b[i]
            )));
        }
        let rows: BTreeSet<_> = a.iter().zip(&b).collect();
        if rows.len() != a.len() {
            return Err(Error::domain("duplicate inequalities"));
        }
        let rational: Vec<Vec<Rational>> = a
            .iter()
            .map(|r| r.iter().cloned().map(rat_int).collect())
            .collect();
        check_bounded(&rational, dim)?;
        Ok(HPolytope { a, b, dim })
    }

    pub fn from_i64(a: &[Vec<i64>], b: &[i64]) -> Result<Self> {
        HPolytope::new(
            a.iter()
                .map(|r| r.iter().copied().map(BigInt::from).collect())
                .collect(),
            b.iter().copied().map(BigInt::from).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facet_count(&self) -> usize {
        self.a.len()
    }

    pub fn normals(&self) -> &[Vec<BigInt>] {
        &self.a
    }

    pub fn offsets(&self) -> &[BigInt] {
        &self.b
    }

    pub fn normal(&self, i: usize) -> &[BigInt] {
        &self.a[i]
    }

    pub fn offset(&self, i: usize) -> &BigInt {
        &self.b[i]
    }

    /// `{x : Ax <= c·b}`.
    pub fn dilate(&self, c: u32) -> HPolytope {
        let c = BigInt::from(c);
        let mut scaled: Vec<BigInt> = self.b.iter().map(|v| v * &c).collect();
        let mut rows = self.a.clone();
        reduce_rows(&mut rows, &mut scaled);
        HPolytope {
            a: rows,
            b: scaled,
            dim: self.dim,
        }
    }

    /// Image under the linear map `x -> U x` for a unimodular integer `U`.
    ///
    /// The inequality `a·x <= b` becomes `(a U^{-1})·y <= b`; the caller
    /// passes `U^{-1}` directly.
    pub fn transform(&self, inverse: &[Vec<i64>]) -> Result<HPolytope> {
        let n = self.dim;
        if inverse.len() != n || inverse.iter().any(|r| r.len() != n) {
            return Err(Error::usage("transform matrix has the wrong shape"));
        }
        let a = self
            .a
            .iter()
            .map(|row| {
                (0..n)
                    .map(|j| (0..n).map(|k| &row[k] * BigInt::from(inverse[k][j])).sum())
                    .collect()
            })
            .collect();
        HPolytope::new(a, self.b.clone())
    }

    /// Strict feasibility `a_i·x < b_i` for every row.
    pub fn contains_interior(&self, x: &RatVec) -> bool {
        (0..self.facet_count()).all(|i| x.dot_int(&self.a[i]) < rat_int(self.b[i].clone()))
    }

    pub fn contains(&self, x: &RatVec) -> bool {
        (0..self.facet_count()).all(|i| x.dot_int(&self.a[i]) <= rat_int(self.b[i].clone()))
    }

    /// True when the facet list is closed under `(a, b) -> (-a, b)`.
    pub fn is_centrally_symmetric(&self) -> bool {
        let rows: BTreeSet<(Vec<BigInt>, BigInt)> = self
            .a
            .iter()
            .cloned()
            .zip(self.b.iter().cloned())
            .collect();
        rows.iter().all(|(a, b)| {
            let neg: Vec<BigInt> = a.iter().map(|v| -v).collect();
            rows.contains(&(neg, b.clone()))
        })
    }

    fn rational_rows(&self) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        (
            self.a
                .iter()
                .map(|r| r.iter().cloned().map(rat_int).collect())
                .collect(),
            self.b.iter().cloned().map(rat_int).collect(),
        )
    }

    pub fn to_json(&self) -> PolytopeJson {
        PolytopeJson {
            a: self
                .a
                .iter()
                .map(|r| r.iter().cloned().map(rat_int).collect())
                .collect(),
            b: self.b.iter().cloned().map(rat_int).collect(),
        }
    }
}

/// Divides each row `(a_i, b_i)` by its content.
fn reduce_rows(a: &mut [Vec<BigInt>], b: &mut [BigInt]) {
    for (row, rhs) in a.iter_mut().zip(b.iter_mut()) {
        let g = row.iter().fold(rhs.clone(), |acc, v| acc.gcd(v));
        if g > BigInt::one() {
            row.iter_mut().for_each(|v| *v = &*v / &g);
            *rhs = &*rhs / &g;
        }
    }
}

/// Wire format: `{"A": [[..], ..], "b": [..]}` with integer or `"p/q"` entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeJson {
    #[serde(rename = "A", with = "crate::linalg::serde_rational::matrix")]
    pub a: Vec<Vec<Rational>>,
    #[serde(with = "crate::linalg::serde_rational::vec")]
    pub b: Vec<Rational>,
}

impl PolytopeJson {
    pub fn from_reader(reader: impl std::io::Read) -> Result<Self> {
        serde_json::from_reader(reader).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn normalize(&self) -> Result<(HPolytope, RatVec)> {
        normalize(&self.a, &self.b)
    }
}

/// Size parameters feeding the covering radius search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeBounds {
    /// Largest absolute value among the entries of `A` and `b`.
    #[serde(with = "bigint_string")]
    pub inf_norm: BigInt,
    /// Exact `max {‖x‖∞ : x ∈ P}`.
    #[serde(with = "crate::linalg::serde_rational")]
    pub beta: Rational,
    /// Upper bound on `beta` used to build the candidate lattice set.
    #[serde(with = "crate::linalg::serde_rational")]
    pub beta0: Rational,
    /// Smallest `α > 0` such that `αP` is a lattice polytope.
    #[serde(with = "crate::linalg::serde_rational")]
    pub alpha: Rational,
    /// Upper bound on the covering radius.
    #[serde(with = "crate::linalg::serde_rational")]
    pub mu0: Rational,
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Fails with a witness direction when `{x : Ax <= b}` is unbounded.
fn check_bounded(a: &[Vec<Rational>], dim: usize) -> Result<()> {
    let matrix = RatMat::from_rows(a.to_vec())?;
    if let Some(d) = nullspace_basis(&matrix).into_iter().next() {
        return Err(Error::domain(format!(
            "unbounded: the lineality space contains the direction {d}"
        )));
    }
    // A pointed recession cone {d : Ad <= 0} is trivial iff none of its
    // candidate extreme rays (kernels of n-1 independent rows) lies in it.
    for subset in (0..a.len()).combinations(dim - 1) {
        let sub = if subset.is_empty() {
            RatMat::zeros(0, dim)
        } else {
            RatMat::from_rows(subset.iter().map(|&i| a[i].clone()).collect())?
        };
        let kernel = nullspace_basis(&sub);
        if kernel.len() != 1 {
            continue;
        }
        let d = &kernel[0];
        for dir in [d.clone(), d.scale(&-Rational::one())] {
            let ray = a
                .iter()
                .all(|row| dir.iter().zip(row).fold(Rational::zero(), |s, (x, y)| s + x * y) <= Rational::zero());
            if ray {
                return Err(Error::domain(format!(
                    "unbounded: recession direction {dir}"
                )));
            }
        }
    }
    Ok(())
}

/// Vertices of `{x : Ax <= b}` by brute force over `n`-subsets of rows.
fn vertices_of(a: &[Vec<Rational>], b: &[Rational], dim: usize) -> Result<Vec<RatVec>> {
    let mut found = BTreeSet::new();
    for subset in (0..a.len()).combinations(dim) {
        let m = RatMat::from_rows(subset.iter().map(|&i| a[i].clone()).collect())?;
        let rhs = RatVec::new(subset.iter().map(|&i| b[i].clone()).collect());
        let Some(x) = linalg::solve_square(&m, &rhs)? else {
            continue;
        };
        let feasible = a.iter().zip(b).all(|(row, bi)| {
            x.iter().zip(row).fold(Rational::zero(), |s, (p, q)| s + p * q) <= *bi
        });
        if feasible {
            found.insert(x);
        }
    }
    Ok(found.into_iter().collect())
}

/// Normalizes `{x : Ax <= b}` to an integer description with `b > 0`.
///
/// Returns the normalized polytope (describing `P - t`) and the translation
/// `t`, the centroid of the vertices.
pub fn normalize(a: &[Vec<Rational>], b: &[Rational]) -> Result<(HPolytope, RatVec)> {
    let dim = a.first().map_or(0, Vec::len);
    if dim == 0 || a.len() != b.len() || a.iter().any(|r| r.len() != dim) {
        return Err(Error::usage(format!(
            "malformed facet description: {} rows, {} right-hand sides",
            a.len(),
            b.len()
        )));
    }
    let mut rows = Vec::with_capacity(a.len());
    let mut rhs = Vec::with_capacity(b.len());
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        if row.iter().all(Zero::is_zero) {
            if bi.is_negative() {
                return Err(Error::domain(format!("row {i} reads 0 <= {bi}: empty polytope")));
            }
            log::warn!("dropping trivial inequality in row {i}");
            continue;
        }
        rows.push(row.clone());
        rhs.push(bi.clone());
    }
    check_bounded(&rows, dim)?;
    let verts = vertices_of(&rows, &rhs, dim)?;
    if verts.is_empty() {
        return Err(Error::domain("empty polytope: no vertices"));
    }
    let count = rat_int(verts.len() as i64);
    let centroid = RatVec::new(
        (0..dim)
            .map(|k| verts.iter().fold(Rational::zero(), |s, v| s + &v[k]) / &count)
            .collect(),
    );
    let shifted_rhs: Vec<Rational> = rows
        .iter()
        .zip(&rhs)
        .map(|(row, bi)| bi - centroid.iter().zip(row).fold(Rational::zero(), |s, (x, y)| s + x * y))
        .collect();
    if shifted_rhs.iter().any(|v| !v.is_positive()) {
        let base = &verts[0];
        let diffs = RatMat::from_rows(
            verts.iter().skip(1).map(|v| v.sub(base).into_entries()).collect(),
        )?;
        let affine_rank = if diffs.rows() == 0 { 0 } else { linalg::rank(&diffs) };
        return Err(Error::domain(format!(
            "not full-dimensional: the vertices span an affine space of dimension {affine_rank} < {dim}"
        )));
    }
    let mut int_a = Vec::with_capacity(rows.len());
    let mut int_b = Vec::with_capacity(rows.len());
    let mut seen = BTreeSet::new();
    for (row, bi) in rows.iter().zip(&shifted_rhs) {
        let mut full = row.clone();
        full.push(bi.clone());
        let mut ints = primitive_integer_row(&full);
        let b_int = ints.pop().expect("row has a right-hand side");
        if !seen.insert((ints.clone(), b_int.clone())) {
            log::warn!("dropping duplicate inequality {ints:?} <= {b_int}");
            continue;
        }
        int_a.push(ints);
        int_b.push(b_int);
    }
    Ok((
        HPolytope {
            a: int_a,
            b: int_b,
            dim,
        },
        centroid,
    ))
}

/// Exact vertex set, sorted lexicographically.
pub fn vertices(p: &HPolytope) -> Vec<RatVec> {
    let (a, b) = p.rational_rows();
    vertices_of(&a, &b, p.dim).expect("shapes validated on construction")
}

/// Per-coordinate `[min, max]` of `P`, read off the vertices.
pub fn coordinate_ranges(p: &HPolytope) -> Vec<(Rational, Rational)> {
    let verts = vertices(p);
    (0..p.dim)
        .map(|k| {
            let lo = verts.iter().map(|v| v[k].clone()).min().expect("nonempty");
            let hi = verts.iter().map(|v| v[k].clone()).max().expect("nonempty");
            (lo, hi)
        })
        .collect()
}

/// `‖P‖∞^n · n!`, the Cramer-rule bound on `β(P)` and `α(P)`.
pub fn cramer_bound(p: &HPolytope) -> BigInt {
    let norm = inf_norm(p);
    let n = p.dim as u32;
    let fact: BigInt = (1..=p.dim as u64).map(BigInt::from).product();
    norm.pow(n) * fact
}

fn inf_norm(p: &HPolytope) -> BigInt {
    p.a.iter()
        .flatten()
        .chain(p.b.iter())
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

/// Smallest `α > 0` with `α·v` integral for every vertex `v`.
///
/// The coordinates generate the additive group `(g/h)Z`, with `h` the lcm of
/// the denominators and `g` the gcd of the scaled numerators; `α = h/g`.
pub fn lattice_scaling(verts: &[RatVec]) -> Rational {
    let h = lcm_of_denominators(verts.iter().flat_map(RatVec::iter));
    let hq = rat_int(h.clone());
    let g = verts
        .iter()
        .flat_map(RatVec::iter)
        .map(|v| (v * &hq).to_integer())
        .fold(BigInt::zero(), |acc, v| acc.gcd(&v));
    if g.is_zero() {
        return Rational::one();
    }
    Rational::new(h, g)
}

/// Bounds with exact `β`, `β0 = β` and `µ0 = n·α`.
pub fn bounds(p: &HPolytope) -> PolytopeBounds {
    let verts = vertices(p);
    let beta = verts
        .iter()
        .map(RatVec::inf_norm)
        .max()
        .expect("bounded polytope has vertices");
    let cramer = rat_int(cramer_bound(p));
    let beta0 = if beta <= cramer { beta.clone() } else { cramer };
    let alpha = lattice_scaling(&verts);
    let mu0 = &alpha * rat_int(p.dim as i64);
    PolytopeBounds {
        inf_norm: inf_norm(p),
        beta,
        beta0,
        alpha,
        mu0,
    }
}

/// Area of a planar polytope by the shoelace formula over its vertices.
pub fn polygon_area(p: &HPolytope) -> Result<Rational> {
    if p.dim != 2 {
        return Err(Error::usage("polygon area needs a planar polytope"));
    }
    let mut verts = vertices(p);
    // The origin is interior, so sorting by angle around it orders the boundary.
    verts.sort_by(|u, v| angle_cmp(u, v));
    let k = verts.len();
    let twice: Rational = (0..k)
        .map(|i| {
            let (u, v) = (&verts[i], &verts[(i + 1) % k]);
            &u[0] * &v[1] - &u[1] * &v[0]
        })
        .fold(Rational::zero(), |s, t| s + t);
    Ok(twice.abs() / rat_int(2))
}

fn angle_cmp(u: &RatVec, v: &RatVec) -> Ordering {
    let half = |w: &RatVec| -> u8 {
        if w[1].is_positive() || (w[1].is_zero() && w[0].is_positive()) {
            0
        } else {
            1
        }
    };
    half(u).cmp(&half(v)).then_with(|| {
        let cross = &u[0] * &v[1] - &u[1] * &v[0];
        Rational::zero().cmp(&cross)
    })
}
