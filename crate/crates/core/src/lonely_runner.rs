//! Three-runner shifted lonely runner bound via covering radii of hexagons.
//!
//! For pairwise distinct velocities `v = (v1, v2, v3)` the zonotope `Z_v`
//! spanned by the columns of a basis of `Z^3 ∩ v⊥` is a centrally symmetric
//! lattice hexagon of area `v1 + v2 + v3`, and the bound holds for `v` iff
//! `µ(Z_v) <= 1/2`.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::covering::{covering_radius, Certificate, SearchConfig};
use crate::error::{Error, Result};
use crate::linalg::{integer_kernel_basis, maximal_minors, primitive_integer_row, rat, rat_int, to_i64, Rational};
use crate::polytope::HPolytope;
use crate::width::lattice_width;

/// Positive, strictly increasing speeds with overall gcd 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct VelocityVector(Vec<u64>);

impl VelocityVector {
    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }

    fn to_bigints(&self) -> Vec<BigInt> {
        self.0.iter().map(|&x| BigInt::from(x)).collect()
    }
}

impl fmt::Display for VelocityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Sorts, divides out the common factor and rejects repeated speeds.
pub fn normalize_velocities(raw: &[u64]) -> Result<VelocityVector> {
    if raw.is_empty() {
        return Err(Error::usage("no velocities given"));
    }
    if raw.contains(&0) {
        return Err(Error::domain("velocities must be positive"));
    }
    let g = raw.iter().fold(0u64, |acc, &x| acc.gcd(&x));
    let mut v: Vec<u64> = raw.iter().map(|&x| x / g).collect();
    v.sort_unstable();
    if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::domain(format!(
            "velocities must be pairwise distinct; {} appears twice",
            w[0] * g
        )));
    }
    Ok(VelocityVector(v))
}

fn require_triple(v: &VelocityVector) -> Result<[u64; 3]> {
    match *v.as_slice() {
        [a, b, c] => Ok([a, b, c]),
        _ => Err(Error::usage(format!("expected three velocities, got {}", v.d()))),
    }
}

/// Outcome of the pairwise-coprimality test for triples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "dispatch", rename_all = "snake_case")]
pub enum CoprimeDispatch {
    /// All pairs coprime: the covering radius has to be computed.
    Coprime,
    /// Two speeds share `ell > 1`; the bound holds without computation.
    Dismissed { pair: (u64, u64), ell: u64 },
}

pub fn pairwise_coprime_filter(v: &VelocityVector) -> Result<CoprimeDispatch> {
    let t = require_triple(v)?;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let ell = t[i].gcd(&t[j]);
        if ell > 1 {
            return Ok(CoprimeDispatch::Dismissed {
                pair: (t[i], t[j]),
                ell,
            });
        }
    }
    Ok(CoprimeDispatch::Coprime)
}

/// Generator matrix of `Z_v`; its columns are the generators `u_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Zonotope {
    rows: Vec<Vec<i64>>,
}

impl Zonotope {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if d < 2 || rows.len() + 1 != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::usage("generator matrix must be (d-1) x d"));
        }
        Ok(Zonotope { rows })
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn d(&self) -> usize {
        self.rows.len() + 1
    }

    pub fn generator(&self, j: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Absolute maximal minors, one per velocity position.
    pub fn abs_minors(&self) -> Vec<u64> {
        let big: Vec<Vec<BigInt>> = self
            .rows
            .iter()
            .map(|r| r.iter().copied().map(BigInt::from).collect())
            .collect();
        maximal_minors(&big)
            .iter()
            .map(|m| m.abs().to_u64().expect("minor fits"))
            .collect()
    }

    /// Sorted absolute minors; equals the sorted velocities for `Z_v`.
    pub fn minor_multiset(&self) -> Vec<u64> {
        let mut m = self.abs_minors();
        m.sort_unstable();
        m
    }

    /// `[[a,b,c],[d,e,f]]`, the format used in tables.
    pub fn matrix_string(&self) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(i64::to_string).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }
}

/// Zonotope of a triple from one Euclid step: rows `(v2, -v1, 0)` and
/// `(κ, λ, -1)` with `κ = a·v3`, `λ = b·v3`, `a·v1 + b·v2 = 1` and `a` the
/// smallest non-negative choice. Falls back to [`zonotope_general`] when
/// `v1`, `v2` are not coprime.
pub fn zonotope_from_triple(v: &VelocityVector) -> Result<Zonotope> {
    let [v1, v2, v3] = require_triple(v)?;
    if v1.gcd(&v2) != 1 {
        return zonotope_general(v);
    }
    let (v1, v2, v3) = (v1 as i128, v2 as i128, v3 as i128);
    let a = (0..v2)
        .find(|a| (a * v1 - 1).rem_euclid(v2) == 0)
        .expect("v1 is invertible modulo v2");
    let b = (1 - a * v1) / v2;
    let small = |x: i128| -> Result<i64> {
        x.to_i64()
            .ok_or_else(|| Error::domain("generator entries exceed 64 bits"))
    };
    Zonotope::from_rows(vec![
        vec![small(v2)?, small(-v1)?, 0],
        vec![small(a * v3)?, small(b * v3)?, -1],
    ])
}

/// Zonotope from a lattice basis of `Z^d ∩ v⊥`; any `d`.
pub fn zonotope_general(v: &VelocityVector) -> Result<Zonotope> {
    let basis = integer_kernel_basis(&v.to_bigints())?;
    let rows = basis
        .iter()
        .map(|r| r.iter().map(|x| to_i64(x, "generator entry")).collect())
        .collect::<Result<_>>()?;
    Zonotope::from_rows(rows)
}

/// Facet description of the hexagon `Z − (u1+u2+u3)/2`.
///
/// Each generator `u` contributes the normals `±(−u_y, u_x)`; the support
/// value of the centred zonotope in direction `n` is `Σ_j |n·u_j| / 2`.
pub fn hexagon_hrep(z: &Zonotope) -> Result<HPolytope> {
    if z.d() != 3 {
        return Err(Error::usage(format!(
            "hexagons come from three generators, got {}",
            z.d()
        )));
    }
    let gens: Vec<Vec<i64>> = (0..3).map(|j| z.generator(j)).collect();
    for i in 0..3 {
        for j in i + 1..3 {
            let cross = gens[i][0] as i128 * gens[j][1] as i128 - gens[i][1] as i128 * gens[j][0] as i128;
            if cross == 0 {
                return Err(Error::domain(format!(
                    "generators u{} and u{} are parallel; the zonotope is not a hexagon",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let mut a = Vec::with_capacity(6);
    let mut b = Vec::with_capacity(6);
    for u in &gens {
        let normal = [-u[1], u[0]];
        let support: i128 = gens
            .iter()
            .map(|w| (normal[0] as i128 * w[0] as i128 + normal[1] as i128 * w[1] as i128).abs())
            .sum();
        for sign in [1i64, -1] {
            // 2·(±n)·x <= Σ |n·u_j|
            let row = [
                rat_int(2 * sign * normal[0]),
                rat_int(2 * sign * normal[1]),
                rat_int(BigInt::from(support)),
            ];
            let mut prim = primitive_integer_row(&row);
            let rhs = prim.pop().expect("row has three entries");
            a.push(prim);
            b.push(rhs);
        }
    }
    HPolytope::new(a, b)
}

/// Lattice points strictly inside the (uncentred) hexagon `Σ [0, u_j]`.
pub fn interior_lattice_points(z: &Zonotope) -> Result<Vec<Vec<i64>>> {
    let hex = hexagon_hrep(z)?;
    let gens: Vec<Vec<i64>> = (0..z.d()).map(|j| z.generator(j)).collect();
    // centre s/2; work with doubled coordinates to stay integral
    let s: Vec<i64> = (0..2).map(|k| gens.iter().map(|g| g[k]).sum()).collect();
    let mut lo = [0i64; 2];
    let mut hi = [0i64; 2];
    for k in 0..2 {
        lo[k] = gens.iter().map(|g| g[k].min(0)).sum();
        hi[k] = gens.iter().map(|g| g[k].max(0)).sum();
    }
    let mut out = Vec::new();
    for x in lo[0]..=hi[0] {
        for y in lo[1]..=hi[1] {
            let p = [2 * x - s[0], 2 * y - s[1]];
            let inside = (0..hex.facet_count()).all(|i| {
                let a = hex.normal(i);
                let lhs = &a[0] * BigInt::from(p[0]) + &a[1] * BigInt::from(p[1]);
                lhs < BigInt::from(2) * hex.offset(i)
            });
            if inside {
                out.push(vec![x, y]);
            }
        }
    }
    Ok(out)
}

/// Position of `µ(Z_v)` relative to the conjectured bound `(d−1)/(d+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Passes,
    Tight,
    Fails,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Passes => "passes",
            Verdict::Tight => "tight",
            Verdict::Fails => "fails",
        })
    }
}

/// Where a covering radius sits among the families `(m+1)/(3m+j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Spectrum {
    /// `µ <= 1/3`.
    BelowThird,
    /// `µ = (m+1)/(3m+1)`.
    Kravitz { m: u64 },
    /// `µ = (m+1)/(3m+j)` with `j ∈ {0, -1}`.
    Extended { m: u64, j: i64 },
    /// None of the above.
    Unclassified,
}

impl Spectrum {
    /// Values above `1/3` not of the form `(m+1)/(3m+1)`.
    pub fn is_exception(&self) -> bool {
        matches!(self, Spectrum::Extended { .. } | Spectrum::Unclassified)
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spectrum::BelowThird => f.write_str("below_third"),
            Spectrum::Kravitz { m } => write!(f, "kravitz(m={m})"),
            Spectrum::Extended { m, j } => write!(f, "extended(m={m},j={j})"),
            Spectrum::Unclassified => f.write_str("unclassified"),
        }
    }
}

/// Classifies `mu` for three runners. Solving `mu = (m+1)/(3m+j)` for `m`
/// gives `m = (1 − j·mu)/(3·mu − 1)`; the first `j` in `1, 0, −1` producing a
/// positive integer wins.
pub fn spectrum_classify(mu: &Rational) -> Spectrum {
    let third = rat(1, 3);
    if mu <= &third {
        return Spectrum::BelowThird;
    }
    let denom = mu * rat_int(3) - Rational::one();
    for j in [1i64, 0, -1] {
        let m = (Rational::one() - mu * rat_int(j)) / &denom;
        if m.is_integer() && m.is_positive() {
            let Some(m) = m.to_integer().to_u64() else {
                continue;
            };
            return if j == 1 {
                Spectrum::Kravitz { m }
            } else {
                Spectrum::Extended { m, j }
            };
        }
    }
    Spectrum::Unclassified
}

/// One table row.
#[derive(Clone, Debug)]
pub struct ScanRecord {
    pub v: VelocityVector,
    pub zonotope: Zonotope,
    pub hexagon: HPolytope,
    pub mu: Rational,
    pub width: u64,
    pub verdict: Verdict,
    pub spectrum: Spectrum,
    pub certificate: Certificate,
}

/// Serialized form of a [`ScanRecord`], columns in table order.
#[derive(Serialize)]
pub struct ScanRow {
    pub v1: u64,
    pub v2: u64,
    pub v3: u64,
    pub generators: String,
    pub mu: String,
    pub width: u64,
    pub verdict: String,
    pub spectrum: String,
}

impl ScanRecord {
    pub fn row(&self) -> ScanRow {
        let v = self.v.as_slice();
        ScanRow {
            v1: v[0],
            v2: v[1],
            v3: v[2],
            generators: self.zonotope.matrix_string(),
            mu: self.mu.to_string(),
            width: self.width,
            verdict: self.verdict.to_string(),
            spectrum: self.spectrum.to_string(),
        }
    }
}

/// Computes `µ(Z_v)`, the width and the verdict for a triple.
///
/// The width is computed first so the search can start from the planar
/// symmetric flatness bound `µ <= 2/w`.
pub fn slrc_check(v: &VelocityVector, workers: usize) -> Result<ScanRecord> {
    require_triple(v)?;
    let zonotope = zonotope_from_triple(v)?;
    record_for(v, zonotope, workers)
}

fn record_for(v: &VelocityVector, zonotope: Zonotope, workers: usize) -> Result<ScanRecord> {
    let hexagon = hexagon_hrep(&zonotope)?;
    let w = lattice_width(&hexagon).width;
    if !w.is_integer() {
        return Err(Error::internal(format!("lattice hexagon has fractional width {w}")));
    }
    let width = w
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::internal("width out of range"))?;
    let cfg = SearchConfig {
        worker_count: workers.max(1),
        centrally_symmetric: true,
        ..SearchConfig::default()
    };
    let certificate = covering_radius(&hexagon, &cfg)?;
    let mu = certificate.mu.clone();
    let d = v.d() as i64;
    let bound = rat(d - 1, d + 1);
    let verdict = match mu.cmp(&bound) {
        std::cmp::Ordering::Less => Verdict::Passes,
        std::cmp::Ordering::Equal => Verdict::Tight,
        std::cmp::Ordering::Greater => Verdict::Fails,
    };
    Ok(ScanRecord {
        v: v.clone(),
        zonotope,
        hexagon,
        spectrum: spectrum_classify(&mu),
        mu,
        width,
        verdict,
        certificate,
    })
}

/// `µ(Z_v)` from the kernel-basis zonotope instead of the Euclid one.
pub fn slrc_check_general(v: &VelocityVector, workers: usize) -> Result<ScanRecord> {
    require_triple(v)?;
    let zonotope = zonotope_general(v)?;
    record_for(v, zonotope, workers)
}

/// How the reduction chain treats a triple.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionEntry {
    pub v: VelocityVector,
    #[serde(flatten)]
    pub dispatch: CoprimeDispatch,
    pub width: u64,
    /// `µ < 1/2` follows from width ≥ 4 (symmetric flatness) or from
    /// width 3 and `v1 + v2 + v3 >= 10` (area bound).
    pub settled_by_bounds: bool,
    /// Pairwise coprime with `v1 + v2 + v3 <= 9`: must be computed.
    pub survivor: bool,
}

/// Result of [`scan`].
#[derive(Clone, Debug)]
pub struct ScanReport {
    pub records: Vec<ScanRecord>,
    pub reduction: Vec<ReductionEntry>,
}

impl ScanReport {
    pub fn survivors(&self) -> Vec<&VelocityVector> {
        self.reduction
            .iter()
            .filter(|e| e.survivor)
            .map(|e| &e.v)
            .collect()
    }

    pub fn write_csv(&self, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r.row()).map_err(|e| Error::internal(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::internal(e.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "records": self.records.iter().map(ScanRecord::row).collect::<Vec<_>>(),
            "reduction": self.reduction,
        })
    }
}

/// Strictly increasing triples with gcd 1 and `v1 + v2 + v3 <= sum_limit`,
/// ordered by sum and then lexicographically.
pub fn triples_up_to(sum_limit: u64) -> Vec<VelocityVector> {
    let mut out = Vec::new();
    for s in 6..=sum_limit {
        for a in 1..s {
            for b in a + 1..s {
                if s <= a + 2 * b {
                    break;
                }
                let c = s - a - b;
                if a.gcd(&b).gcd(&c) == 1 {
                    out.push(VelocityVector(vec![a, b, c]));
                }
            }
        }
    }
    out
}

/// Computes every triple up to `sum_limit` on `workers` threads.
pub fn scan(sum_limit: u64, workers: usize) -> Result<ScanReport> {
    if sum_limit < 6 {
        return Err(Error::usage(format!(
            "the smallest triple (1,2,3) has sum 6; got limit {sum_limit}"
        )));
    }
    let triples = triples_up_to(sum_limit);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<ScanRecord>>>> =
        Mutex::new((0..triples.len()).map(|_| None).collect());
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(v) = triples.get(i) else {
            return;
        };
        let r = slrc_check(v, 1);
        slots.lock().expect("poisoned")[i] = Some(r);
    };
    let workers = workers.max(1).min(triples.len().max(1));
    if workers == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(work);
            }
        });
    }
    let records = slots
        .into_inner()
        .expect("poisoned")
        .into_iter()
        .map(|r| r.expect("every triple visited"))
        .collect::<Result<Vec<_>>>()?;
    let reduction = records
        .iter()
        .map(|r| {
            let dispatch = pairwise_coprime_filter(&r.v)?;
            let sum = r.v.sum();
            Ok(ReductionEntry {
                v: r.v.clone(),
                dispatch,
                width: r.width,
                settled_by_bounds: r.width >= 4 || (r.width == 3 && sum >= 10),
                survivor: dispatch == CoprimeDispatch::Coprime && sum <= 9,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ScanReport { records, reduction })
}

/// Area bound for planar bodies with `µ·w > 1`: `vol <= w² / (2µw − 2)`.
pub fn area_bound_holds(area: &Rational, mu: &Rational, width: u64) -> bool {
    let w = rat_int(width);
    let mw = mu * &w;
    if mw <= Rational::one() {
        return true;
    }
    area <= &(&w * &w / (rat_int(2) * mw - rat_int(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{polygon_area, vertices};

    fn vv(v: &[u64]) -> VelocityVector {
        normalize_velocities(v).unwrap()
    }

    #[test]
    fn velocity_normalization() {
        assert_eq!(vv(&[6, 4, 2]).as_slice(), &[1, 2, 3]);
        assert_eq!(vv(&[3, 6, 9]).as_slice(), &[1, 2, 3]);
        assert!(matches!(normalize_velocities(&[2, 2, 3]), Err(Error::Domain(_))));
        assert!(matches!(normalize_velocities(&[0, 2, 3]), Err(Error::Domain(_))));
    }

    #[test]
    fn coprime_filter() {
        assert_eq!(
            pairwise_coprime_filter(&vv(&[2, 4, 5])).unwrap(),
            CoprimeDispatch::Dismissed { pair: (2, 4), ell: 2 }
        );
        assert_eq!(pairwise_coprime_filter(&vv(&[1, 2, 3])).unwrap(), CoprimeDispatch::Coprime);
        assert_eq!(
            pairwise_coprime_filter(&vv(&[3, 5, 9])).unwrap(),
            CoprimeDispatch::Dismissed { pair: (3, 9), ell: 3 }
        );
    }

    #[test]
    fn euclid_zonotopes() {
        let z = zonotope_from_triple(&vv(&[1, 2, 3])).unwrap();
        assert_eq!(z.rows(), &[vec![2, -1, 0], vec![3, 0, -1]]);
        let z = zonotope_from_triple(&vv(&[1, 3, 4])).unwrap();
        assert_eq!(z.rows(), &[vec![3, -1, 0], vec![4, 0, -1]]);
        let z = zonotope_from_triple(&vv(&[2, 3, 5])).unwrap();
        assert_eq!(z.minor_multiset(), vec![2, 3, 5]);
        // gcd(2, 4) = 2 falls back to the kernel basis
        let z = zonotope_from_triple(&vv(&[2, 4, 5])).unwrap();
        assert_eq!(z.minor_multiset(), vec![2, 4, 5]);
    }

    #[test]
    fn hexagon_areas_and_symmetry() {
        for (v, area) in [([1, 2, 3], 6), ([1, 3, 5], 9), ([2, 5, 7], 14)] {
            let z = zonotope_from_triple(&vv(&v)).unwrap();
            let h = hexagon_hrep(&z).unwrap();
            assert_eq!(h.facet_count(), 6);
            assert_eq!(vertices(&h).len(), 6);
            assert!(h.is_centrally_symmetric());
            assert_eq!(polygon_area(&h).unwrap(), rat_int(area));
        }
    }

    #[test]
    fn hexagons_have_interior_points() {
        let z = zonotope_from_triple(&vv(&[1, 2, 3])).unwrap();
        assert!(!interior_lattice_points(&z).unwrap().is_empty());
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(spectrum_classify(&rat(1, 2)), Spectrum::Kravitz { m: 1 });
        assert_eq!(spectrum_classify(&rat(4, 9)), Spectrum::Extended { m: 3, j: 0 });
        assert_eq!(spectrum_classify(&rat(15, 41)), Spectrum::Extended { m: 14, j: -1 });
        assert_eq!(spectrum_classify(&rat(1, 4)), Spectrum::BelowThird);
        assert_eq!(spectrum_classify(&rat(3, 7)), Spectrum::Kravitz { m: 2 });
        assert!(spectrum_classify(&rat(4, 9)).is_exception());
        assert_eq!(spectrum_classify(&rat(4, 9)).to_string(), "extended(m=3,j=0)");
    }

    #[test]
    fn first_check() {
        let r = slrc_check(&vv(&[1, 2, 3]), 1).unwrap();
        assert_eq!(r.mu, rat(1, 2));
        assert_eq!(r.verdict, Verdict::Tight);
        assert_eq!(r.width, 3);
    }

    #[test]
    fn triple_enumeration() {
        assert_eq!(triples_up_to(6), vec![vv(&[1, 2, 3])]);
        assert_eq!(triples_up_to(18).len(), 94);
    }
}
