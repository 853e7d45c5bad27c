//! Exact rational scalars, vectors and matrices.
//!
//! Scalars are `num_rational::BigRational`, which keeps every value in lowest
//! terms with a positive denominator. Elimination is fraction-free: rows are
//! first scaled to integers and then reduced with Bareiss' method, so the only
//! divisions performed are exact integer divisions.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number in lowest terms.
pub type Rational = BigRational;

/// Builds `num / den`. Panics when `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(value: impl Into<BigInt>) -> Rational {
    Rational::from_integer(value.into())
}

/// Parses `"p/q"`, `"p"` or `"-p/q"` with optional surrounding whitespace.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational `{text}`")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational `{text}`")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{text}`")));
    }
    Ok(Rational::new(num, den))
}

/// Smallest integer `>= r`.
pub fn ceil_int(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// Largest integer `<= r`.
pub fn floor_int(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// Least common multiple of the denominators of `values` (1 for an empty slice).
pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales a rational row to the primitive integer row with the same direction.
///
/// Returns the zero vector unchanged when every entry is zero.
pub fn primitive_integer_row(row: &[Rational]) -> Vec<BigInt> {
    let scale = lcm_of_denominators(row);
    let ints: Vec<BigInt> = row
        .iter()
        .map(|v| (v * Rational::from_integer(scale.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() || g.is_one() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}

/// Serde adapters rendering rationals as `"p/q"` strings (`"p"` when `q = 1`).
///
/// Deserialization also accepts bare JSON integers.
pub mod serde_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Text(String),
        Int(i64),
    }

    impl Repr {
        fn into_rational<E: serde::de::Error>(self) -> Result<Rational, E> {
            match self {
                Repr::Text(s) => parse_rational(&s).map_err(E::custom),
                Repr::Int(i) => Ok(rat_int(i)),
            }
        }
    }

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        Repr::deserialize(d)?.into_rational()
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(values.iter().map(|v| v.to_string()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<Repr>::deserialize(d)?
                .into_iter()
                .map(Repr::into_rational)
                .collect()
        }
    }

    pub mod matrix {
        use super::*;

        pub fn serialize<S: Serializer>(rows: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(
                rows.iter()
                    .map(|row| row.iter().map(|v| v.to_string()).collect::<Vec<_>>()),
            )
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<Vec<Rational>>, D::Error> {
            Vec::<Vec<Repr>>::deserialize(d)?
                .into_iter()
                .map(|row| row.into_iter().map(Repr::into_rational).collect())
                .collect()
        }
    }
}

/// Dense vector of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatVec(#[serde(with = "serde_rational::vec")] Vec<Rational>);

impl RatVec {
    pub fn new(entries: Vec<Rational>) -> Self {
        RatVec(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RatVec(vec![Rational::zero(); dim])
    }

    pub fn from_ints<I: Into<BigInt>>(entries: impl IntoIterator<Item = I>) -> Self {
        RatVec(entries.into_iter().map(rat_int).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn dot_int(&self, row: &[BigInt]) -> Rational {
        debug_assert_eq!(row.len(), self.dim());
        self.0
            .iter()
            .zip(row)
            .map(|(x, a)| x * Rational::from_integer(a.clone()))
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    pub fn sub(&self, other: &RatVec) -> RatVec {
        RatVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn sub_int(&self, z: &[i64]) -> RatVec {
        RatVec(
            self.0
                .iter()
                .zip(z)
                .map(|(a, &b)| a - rat_int(b))
                .collect(),
        )
    }

    pub fn scale(&self, factor: &Rational) -> RatVec {
        RatVec(self.0.iter().map(|a| a * factor).collect())
    }

    pub fn inf_norm(&self) -> Rational {
        self.0
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl Index<usize> for RatVec {
    type Output = Rational;

    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for RatVec {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl From<Vec<Rational>> for RatVec {
    fn from(v: Vec<Rational>) -> Self {
        RatVec(v)
    }
}

impl fmt::Display for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Dense row-major matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::usage("ragged matrix rows"));
        }
        Ok(RatMat {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_int_rows<I: Into<BigInt> + Clone>(rows: &[Vec<I>]) -> Result<Self> {
        RatMat::from_rows(
            rows.iter()
                .map(|r| r.iter().cloned().map(rat_int).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul_vec(&self, x: &RatVec) -> Result<RatVec> {
        if x.dim() != self.cols {
            return Err(Error::usage(format!(
                "dimension mismatch: {}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.dim()
            )));
        }
        Ok(RatVec::new(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(x.iter())
                        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
                })
                .collect(),
        ))
    }

    pub fn mul(&self, other: &RatMat) -> Result<RatMat> {
        if self.cols != other.rows {
            return Err(Error::usage("dimension mismatch in matrix product"));
        }
        let mut out = RatMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                out[(i, j)] = (0..self.cols)
                    .fold(Rational::zero(), |acc, k| acc + &self[(i, k)] * &other[(k, j)]);
            }
        }
        Ok(out)
    }

    /// Each row multiplied by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let scale = Rational::from_integer(lcm_of_denominators(row));
                row.iter().map(|v| (v * &scale).to_integer()).collect()
            })
            .collect()
    }

    fn row_scales(&self) -> Vec<BigInt> {
        (0..self.rows)
            .map(|i| lcm_of_denominators(self.row(i)))
            .collect()
    }
}

impl Index<(usize, usize)> for RatMat {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of fraction-free forward elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivot_cols: Vec<usize>,
    /// +1 or -1 depending on the parity of row swaps.
    sign: i8,
}

/// Bareiss elimination of an integer matrix, pivoting only in the first
/// `pivot_limit` columns. All columns are updated.
fn bareiss(mut a: Vec<Vec<BigInt>>, pivot_limit: usize) -> Echelon {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut sign = 1i8;
    let mut pivot_cols = Vec::new();
    for c in 0..pivot_limit.min(ncols) {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            sign = -sign;
        }
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivot_cols.push(c);
        r += 1;
    }
    Echelon {
        rows: a,
        pivot_cols,
        sign,
    }
}

/// Determinant of a square integer matrix.
pub fn det_int(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let e = bareiss(m.to_vec(), n);
    if e.pivot_cols.len() < n {
        return BigInt::zero();
    }
    let d = e.rows[n - 1][n - 1].clone();
    if e.sign < 0 {
        -d
    } else {
        d
    }
}

/// Adjugate of a square integer matrix, so that `m * adj = det(m) * I`.
pub fn adjugate_int(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![BigInt::one()]];
    }
    let mut adj = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<BigInt>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let cof = det_int(&minor);
            // adj = transpose of the cofactor matrix
            adj[j][i] = if (i + j) % 2 == 0 { cof } else { -cof };
        }
    }
    adj
}

/// Rank of an integer matrix.
pub fn rank_int(m: &[Vec<BigInt>]) -> usize {
    let ncols = m.first().map_or(0, Vec::len);
    bareiss(m.to_vec(), ncols).pivot_cols.len()
}

/// Exact rank over the rationals.
pub fn rank(m: &RatMat) -> usize {
    rank_int(&m.integer_rows())
}

/// Exact determinant.
pub fn det(m: &RatMat) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::usage(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let scale = m
        .row_scales()
        .into_iter()
        .fold(BigInt::one(), |acc, s| acc * s);
    Ok(Rational::new(det_int(&m.integer_rows()), scale))
}

/// Solves `m x = rhs` exactly. Returns `None` when `m` is singular.
pub fn solve_square(m: &RatMat, rhs: &RatVec) -> Result<Option<RatVec>> {
    let n = m.rows();
    if !m.is_square() || rhs.dim() != n {
        return Err(Error::usage(format!(
            "solve_square needs a square system, got {}x{} with rhs of length {}",
            m.rows(),
            m.cols(),
            rhs.dim()
        )));
    }
    // Augment row by row, then clear denominators per row.
    let augmented: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = m.row(i).to_vec();
            row.push(rhs[i].clone());
            let scale = Rational::from_integer(lcm_of_denominators(&row));
            row.iter().map(|v| (v * &scale).to_integer()).collect()
        })
        .collect();
    let e = bareiss(augmented, n);
    if e.pivot_cols.len() < n {
        return Ok(None);
    }
    let u = e.rows;
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(u[i][n].clone());
        for j in i + 1..n {
            acc -= Rational::from_integer(u[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(u[i][i].clone());
    }
    Ok(Some(RatVec::new(x)))
}

/// Basis of the right nullspace `{x : m x = 0}` via reduced row echelon form.
pub fn nullspace_basis(m: &RatMat) -> Vec<RatVec> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<Rational>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][c].recip();
        a[r].iter_mut().for_each(|v| *v *= &inv);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![Rational::zero(); cols];
            x[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = -a[row][free].clone();
            }
            RatVec::new(x)
        })
        .collect()
}

/// Flips the sign of `row` so that its first nonzero entry is positive.
pub fn canonical_sign(row: &mut [BigInt]) {
    if let Some(first) = row.iter().find(|v| !v.is_zero()) {
        if first.is_negative() {
            row.iter_mut().for_each(|v| *v = -&*v);
        }
    }
}

/// Basis of the lattice `Z^d ∩ v⊥` as the rows of a `(d-1) x d` matrix.
///
/// Column operations reduce `v` (read as a `1 x d` matrix) to `g·e_k` while a
/// unimodular transform accumulates alongside; the transform's columns other
/// than `k` span the kernel. Rows are returned with canonical sign.
pub fn integer_kernel_basis(v: &[BigInt]) -> Result<Vec<Vec<BigInt>>> {
    let d = v.len();
    if d == 0 || v.iter().all(Zero::is_zero) {
        return Err(Error::domain("kernel basis of the zero vector"));
    }
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_one() {
        return Err(Error::domain(format!(
            "kernel basis needs a primitive vector, entries share the factor {g}"
        )));
    }
    let mut w = v.to_vec();
    // transform[c] is column c of the unimodular matrix.
    let mut transform: Vec<Vec<BigInt>> = (0..d)
        .map(|c| {
            (0..d)
                .map(|r| if r == c { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    loop {
        let pivot = (0..d)
            .filter(|&k| !w[k].is_zero())
            .min_by(|&a, &b| w[a].abs().cmp(&w[b].abs()).then(a.cmp(&b)))
            .expect("v is nonzero");
        let mut done = true;
        for j in 0..d {
            if j == pivot || w[j].is_zero() {
                continue;
            }
            let q = w[j].div_floor(&w[pivot]);
            let step = &q * &w[pivot];
            w[j] -= step;
            let (pcol, jcol) = if pivot < j {
                let (lo, hi) = transform.split_at_mut(j);
                (&lo[pivot], &mut hi[0])
            } else {
                let (lo, hi) = transform.split_at_mut(pivot);
                (&hi[0], &mut lo[j])
            };
            for (t, p) in jcol.iter_mut().zip(pcol) {
                *t -= &q * p;
            }
            if !w[j].is_zero() {
                done = false;
            }
        }
        if done {
            let mut basis: Vec<Vec<BigInt>> = (0..d)
                .filter(|&c| c != pivot)
                .map(|c| transform[c].clone())
                .collect();
            basis.iter_mut().for_each(|r| canonical_sign(r));
            return Ok(basis);
        }
    }
}

/// Maximal minors of a `(d-1) x d` integer matrix: entry `i` is the
/// determinant with column `i` deleted.
pub fn maximal_minors(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let d = rows.first().map_or(0, Vec::len);
    (0..d)
        .map(|skip| {
            let sub: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != skip)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            det_int(&sub)
        })
        .collect()
}

/// Integer `ceil(sqrt(n))` for `n >= 0`.
pub fn ceil_sqrt(n: &BigInt) -> BigInt {
    let r = n.sqrt();
    if &(&r * &r) == n {
        r
    } else {
        r + 1
    }
}

pub(crate) fn to_i64(v: &BigInt, what: &str) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::domain(format!("{what} {v} does not fit in 64 bits")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> RatMat {
        RatMat::from_int_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().copied().map(BigInt::from).collect()
    }

    #[test]
    fn solve_identity() {
        let x = solve_square(&RatMat::identity(2), &RatVec::from_ints([3, 5]))
            .unwrap()
            .unwrap();
        assert_eq!(x, RatVec::from_ints([3, 5]));
    }

    #[test]
    fn solve_homogeneous() {
        let x = solve_square(&mat(&[&[2, -1], &[3, 0]]), &RatVec::zeros(2))
            .unwrap()
            .unwrap();
        assert_eq!(x, RatVec::zeros(2));
    }

    #[test]
    fn solve_half_half() {
        let m = mat(&[&[1, 1], &[1, -1]]);
        let rhs = RatVec::from_ints([1, 0]);
        let x = solve_square(&m, &rhs).unwrap().unwrap();
        assert_eq!(x, RatVec::new(vec![rat(1, 2), rat(1, 2)]));
        assert_eq!(m.mul_vec(&x).unwrap(), rhs);
    }

    #[test]
    fn solve_singular_and_mismatch() {
        let m = mat(&[&[1, 2], &[2, 4]]);
        assert!(solve_square(&m, &RatVec::from_ints([1, 1])).unwrap().is_none());
        assert!(matches!(
            solve_square(&m, &RatVec::from_ints([1, 1, 1])),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn solve_with_fractions() {
        let m = RatMat::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(-2, 5), rat(7, 4)],
        ])
        .unwrap();
        let rhs = RatVec::new(vec![rat(1, 7), rat(-3, 2)]);
        let x = solve_square(&m, &rhs).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), rhs);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RatMat::zeros(3, 3)), 0);
        assert_eq!(rank(&RatMat::identity(4)), 4);
        assert_eq!(rank(&mat(&[&[2, -1, 0], &[3, 0, -1]])), 2);
        assert_eq!(rank(&mat(&[&[0, 1, 2], &[0, 2, 4], &[0, 0, 0]])), 1);
        assert_eq!(rank(&mat(&[&[0, 0, 1], &[0, 1, 0]])), 2);
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&RatMat::identity(5)).unwrap(), rat_int(1));
        assert_eq!(det(&mat(&[&[2, -1], &[3, 0]])).unwrap(), rat_int(3));
        assert_eq!(det(&mat(&[&[2, -1], &[1, 1]])).unwrap(), rat_int(3));
        assert_eq!(det(&mat(&[&[0, 1], &[1, 0]])).unwrap(), rat_int(-1));
        assert!(matches!(det(&RatMat::zeros(2, 3)), Err(Error::Usage(_))));
        let m = RatMat::from_rows(vec![vec![rat(1, 2), rat(0, 1)], vec![rat(3, 1), rat(2, 3)]])
            .unwrap();
        assert_eq!(det(&m).unwrap(), rat(1, 3));
    }

    #[test]
    fn adjugate_identity() {
        let m = vec![ints(&[2, -1, 0]), ints(&[3, 0, -1]), ints(&[1, 4, 2])];
        let adj = adjugate_int(&m);
        let d = det_int(&m);
        for i in 0..3 {
            for j in 0..3 {
                let v: BigInt = (0..3).map(|k| &m[i][k] * &adj[k][j]).sum();
                let expect = if i == j { d.clone() } else { BigInt::zero() };
                assert_eq!(v, expect);
            }
        }
    }

    #[test]
    fn kernel_of_123_matches_display_rows() {
        let basis = integer_kernel_basis(&ints(&[1, 2, 3])).unwrap();
        assert_eq!(basis, vec![ints(&[2, -1, 0]), ints(&[3, 0, -1])]);
    }

    #[test]
    fn kernel_of_11() {
        let basis = integer_kernel_basis(&ints(&[1, 1])).unwrap();
        assert_eq!(basis, vec![ints(&[1, -1])]);
    }

    #[test]
    fn kernel_minors_are_velocities() {
        let basis = integer_kernel_basis(&ints(&[2, 5, 7])).unwrap();
        let mut minors: Vec<BigInt> = maximal_minors(&basis).iter().map(|m| m.abs()).collect();
        minors.sort();
        assert_eq!(minors, ints(&[2, 5, 7]));
    }

    #[test]
    fn kernel_rejects_bad_input() {
        assert!(matches!(integer_kernel_basis(&ints(&[0, 0])), Err(Error::Domain(_))));
        assert!(matches!(integer_kernel_basis(&ints(&[2, 4, 6])), Err(Error::Domain(_))));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert_eq!(parse_rational(" -5 ").unwrap(), rat_int(-5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(rat(4, 2).to_string(), "2");
        assert_eq!(rat(-3, 6).to_string(), "-1/2");
        let v = RatVec::new(vec![rat(1, 2), rat(3, 1)]);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"["1/2","3"]"#);
        let back: RatVec = serde_json::from_str(r#"["1/2", 3]"#).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6]]);
        let basis = nullspace_basis(&m);
        assert_eq!(basis.len(), 2);
        for x in &basis {
            assert!(m.mul_vec(x).unwrap().iter().all(Zero::is_zero));
        }
        assert!(nullspace_basis(&RatMat::identity(3)).is_empty());
        assert_eq!(nullspace_basis(&RatMat::zeros(0, 1)).len(), 1);
    }

    #[test]
    fn ceil_sqrt_values() {
        assert_eq!(ceil_sqrt(&BigInt::from(32)), BigInt::from(6));
        assert_eq!(ceil_sqrt(&BigInt::from(36)), BigInt::from(6));
        assert_eq!(ceil_sqrt(&BigInt::from(0)), BigInt::from(0));
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-6i64..=6, n), n)
    }

    proptest! {
        #[test]
        fn det_is_multiplicative(a in small_matrix(3), b in small_matrix(3)) {
            let (ma, mb) = (RatMat::from_int_rows(&a).unwrap(), RatMat::from_int_rows(&b).unwrap());
            let prod = ma.mul(&mb).unwrap();
            prop_assert_eq!(det(&prod).unwrap(), det(&ma).unwrap() * det(&mb).unwrap());
        }

        #[test]
        fn solve_reproduces_rhs(a in small_matrix(3), rhs in prop::collection::vec(-9i64..=9, 3)) {
            let m = RatMat::from_int_rows(&a).unwrap();
            let rhs = RatVec::from_ints(rhs);
            match solve_square(&m, &rhs).unwrap() {
                Some(x) => prop_assert_eq!(m.mul_vec(&x).unwrap(), rhs),
                None => prop_assert!(det(&m).unwrap().is_zero()),
            }
        }

        #[test]
        fn kernel_basis_properties(v in prop::collection::vec(1i64..40, 2..5)) {
            let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
            let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x / g)).collect();
            let basis = integer_kernel_basis(&v).unwrap();
            prop_assert_eq!(basis.len(), v.len() - 1);
            for row in &basis {
                let dot: BigInt = row.iter().zip(&v).map(|(a, b)| a * b).sum();
                prop_assert!(dot.is_zero());
            }
            let mut minors: Vec<BigInt> = maximal_minors(&basis).iter().map(|m| m.abs()).collect();
            minors.sort();
            let mut expect = v.clone();
            expect.sort();
            prop_assert_eq!(minors, expect);
        }

        #[test]
        fn arithmetic_stays_in_lowest_terms(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
            let x = rat(a, b) * rat(c, d) + rat(a, d);
            prop_assert!(x.denom().is_positive());
            prop_assert!(x.numer().gcd(x.denom()).is_one());
        }
    }
}
