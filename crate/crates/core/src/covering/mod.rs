//! Covering radius by enumeration of last-covered-point systems.
//!
//! A last-covered point `p` of `µ(P)·P + Z^n` lies on the boundary of `n+1`
//! lattice translates `z_j + µP`, each touching along some facet `i_j`; the
//! pair `(µ, p)` is then the unique solution of `a_{i_j}·(p - z_j) = µ·b_{i_j}`.
//! The search enumerates all such systems with `z_j` in the candidate box
//! `L̄_P` (see [`crate::lattice::lbar`]), keeps the solutions with
//! `p ∈ [0,1]^n` that are not covered by an open translate, and returns the
//! largest `µ` together with a certificate that can be re-checked
//! independently by [`verify_certificate`].

mod oracle;
mod search;

use std::io::{Read, Write};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{lattice_points_in_box_capped, lbar_axis, lbar_count, LatticePointSet, DEFAULT_LBAR_CAP};
use crate::linalg::{rank_int, rat_int, RatVec, Rational};
use crate::polytope::{bounds, coordinate_ranges, HPolytope, PolytopeBounds, PolytopeJson};
use crate::width::flatness_mu_bound;

pub use oracle::grid_oracle;
pub use search::SearchStats;

/// Knobs for [`covering_radius`].
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Replaces the default upper bound `µ0` on the covering radius.
    pub mu0_override: Option<Rational>,
    /// Replaces `β0`; must not be below the exact `β(P)`.
    pub beta0_override: Option<Rational>,
    pub worker_count: usize,
    /// Refuse to search when `|L̄_P|` would exceed this.
    pub lbar_cap: u128,
    /// Break ties between maximizers so output is independent of scheduling.
    pub deterministic: bool,
    /// Permit dimensions above 3.
    pub allow_high_dim: bool,
    /// Tighten `µ0` to `2/w(P)`; requires a centrally symmetric planar `P`.
    pub centrally_symmetric: bool,
    /// Tighten `µ0` with the general flatness bound.
    pub flatness: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mu0_override: None,
            beta0_override: None,
            worker_count: std::thread::available_parallelism().map_or(1, |n| n.get()),
            lbar_cap: DEFAULT_LBAR_CAP,
            deterministic: true,
            allow_high_dim: false,
            centrally_symmetric: false,
            flatness: false,
        }
    }
}

/// One `(facet, lattice point)` pair of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificatePair {
    pub facet: usize,
    pub z: Vec<i64>,
}

/// Proof of `µ(P) = mu`: the last-covered point and the `n+1` translates
/// whose boundaries meet there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub mu: Rational,
    pub last_covered: RatVec,
    pub pairs: Vec<CertificatePair>,
    pub bounds_used: PolytopeBounds,
    pub lbar_size: u128,
}

/// On-disk certificate. `bounds` and `polytope` are informational; only the
/// first four keys are needed to verify.
#[derive(Serialize, Deserialize)]
struct CertificateFile {
    #[serde(with = "crate::linalg::serde_rational")]
    mu: Rational,
    point: RatVec,
    pairs: Vec<CertificatePair>,
    lbar_size: u128,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bounds: Option<PolytopeBounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    polytope: Option<PolytopeJson>,
}

/// A certificate read back from JSON, with the polytope it was issued for
/// when the file records one.
#[derive(Clone, Debug)]
pub struct LoadedCertificate {
    pub certificate: Certificate,
    pub polytope: Option<PolytopeJson>,
}

impl Certificate {
    pub fn dim(&self) -> usize {
        self.last_covered.dim()
    }

    fn file(&self, p: &HPolytope) -> CertificateFile {
        CertificateFile {
            mu: self.mu.clone(),
            point: self.last_covered.clone(),
            pairs: self.pairs.clone(),
            lbar_size: self.lbar_size,
            bounds: Some(self.bounds_used.clone()),
            polytope: Some(p.to_json()),
        }
    }

    /// JSON document for the certificate, recording `p` alongside.
    pub fn to_json(&self, p: &HPolytope) -> serde_json::Value {
        serde_json::to_value(self.file(p)).expect("certificate serializes")
    }

    pub fn write_json(&self, p: &HPolytope, mut out: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.file(p))
            .map_err(|e| Error::internal(e.to_string()))?;
        writeln!(out).map_err(|e| Error::internal(e.to_string()))
    }

    /// Reads a certificate. Missing bounds are recomputed from `p`.
    pub fn from_reader(reader: impl Read, p: &HPolytope) -> Result<LoadedCertificate> {
        let file: CertificateFile =
            serde_json::from_reader(reader).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(LoadedCertificate {
            certificate: Certificate {
                mu: file.mu,
                last_covered: file.point,
                pairs: file.pairs,
                bounds_used: file.bounds.unwrap_or_else(|| bounds(p)),
                lbar_size: file.lbar_size,
            },
            polytope: file.polytope,
        })
    }
}

/// Bounds the search will actually use for `p` under `cfg`.
pub fn effective_bounds(p: &HPolytope, cfg: &SearchConfig) -> Result<PolytopeBounds> {
    let mut b = bounds(p);
    if let Some(beta0) = &cfg.beta0_override {
        if beta0 < &b.beta {
            return Err(Error::usage(format!(
                "β0 = {beta0} is below the exact β(P) = {}",
                b.beta
            )));
        }
        b.beta0 = beta0.clone();
    }
    if cfg.centrally_symmetric {
        let bound = flatness_mu_bound(p, true)?;
        if bound < b.mu0 {
            b.mu0 = bound;
        }
    }
    if cfg.flatness {
        let bound = flatness_mu_bound(p, false)?;
        if bound < b.mu0 {
            b.mu0 = bound;
        }
    }
    if let Some(mu0) = &cfg.mu0_override {
        b.mu0 = mu0.clone();
    }
    if !b.mu0.is_positive() || !b.beta0.is_positive() {
        return Err(Error::usage("µ0 and β0 must be positive"));
    }
    Ok(b)
}

/// Computes `µ(P)` with a certificate.
pub fn covering_radius(p: &HPolytope, cfg: &SearchConfig) -> Result<Certificate> {
    covering_radius_with_stats(p, cfg).map(|(c, _)| c)
}

/// [`covering_radius`] plus enumeration counters.
pub fn covering_radius_with_stats(
    p: &HPolytope,
    cfg: &SearchConfig,
) -> Result<(Certificate, SearchStats)> {
    let n = p.dim();
    if n > 3 && !cfg.allow_high_dim {
        return Err(Error::usage(format!(
            "dimension {n} is above the supported envelope of 3; enable high-dimensional search explicitly"
        )));
    }
    if cfg.worker_count == 0 {
        return Err(Error::usage("worker count must be at least 1"));
    }
    let b = effective_bounds(p, cfg)?;
    let lbar_size = lbar_count(n, &b.mu0, &b.beta0)?;
    if lbar_size > cfg.lbar_cap {
        return Err(Error::Resource {
            what: "candidate lattice set",
            predicted: lbar_size,
            cap: cfg.lbar_cap,
        });
    }
    let params = search::SearchParams {
        polytope: p,
        mu0: &b.mu0,
        axis: lbar_axis(&b.mu0, &b.beta0)?,
        workers: cfg.worker_count,
        deterministic: cfg.deterministic,
    };
    let (found, stats) = match search::run::<i128>(&params) {
        Ok(r) => r,
        Err(search::Overflow) => {
            log::debug!("128-bit kernel overflowed, retrying with big integers");
            search::run::<BigInt>(&params)
                .map_err(|_| Error::internal("big-integer kernel reported overflow"))?
        }
    };
    log::debug!("search stats: {stats:?}");
    let found = found.ok_or_else(|| {
        Error::internal(format!(
            "no relevant candidate below µ0 = {}; the bound is smaller than the covering radius",
            b.mu0
        ))
    })?;
    let cert = Certificate {
        mu: found.mu,
        last_covered: found.point,
        pairs: found
            .pairs
            .into_iter()
            .map(|(facet, z)| CertificatePair { facet, z })
            .collect(),
        bounds_used: b,
        lbar_size,
    };
    if !verify_certificate(p, &cert) {
        return Err(Error::internal(format!(
            "computed certificate for µ = {} failed verification",
            cert.mu
        )));
    }
    Ok((cert, stats))
}

/// Does some `z ∈ l` satisfy `a_i·(p - z) < mu·b_i` for every facet?
pub fn is_covered(p: &RatVec, mu: &Rational, poly: &HPolytope, l: &LatticePointSet) -> bool {
    if !mu.is_positive() {
        return false;
    }
    let rhs: Vec<Rational> = poly
        .offsets()
        .iter()
        .map(|b| mu * rat_int(b.clone()))
        .collect();
    l.points().iter().any(|z| {
        let d = p.sub_int(z);
        (0..poly.facet_count()).all(|i| d.dot_int(poly.normal(i)) < rhs[i])
    })
}

/// Re-checks a certificate from scratch: the pairs have independent
/// normalized normals, `p` solves the system for `mu`, `p ∈ [0,1]^n`, and no
/// open translate `z + int(mu·P)`, `z ∈ Z^n`, contains `p`.
pub fn verify_certificate(poly: &HPolytope, cert: &Certificate) -> bool {
    let n = poly.dim();
    let p = &cert.last_covered;
    if p.dim() != n || cert.pairs.len() != n + 1 || !cert.mu.is_positive() {
        return false;
    }
    if cert
        .pairs
        .iter()
        .any(|pair| pair.facet >= poly.facet_count() || pair.z.len() != n)
    {
        return false;
    }
    // (a_i / b_i, 1) independent  <=>  (a_i, b_i) independent
    let rows: Vec<Vec<BigInt>> = cert
        .pairs
        .iter()
        .map(|pair| {
            let mut r = poly.normal(pair.facet).to_vec();
            r.push(poly.offset(pair.facet).clone());
            r
        })
        .collect();
    if rank_int(&rows) != n + 1 {
        return false;
    }
    let system_holds = cert.pairs.iter().all(|pair| {
        p.sub_int(&pair.z).dot_int(poly.normal(pair.facet))
            == &cert.mu * rat_int(poly.offset(pair.facet).clone())
    });
    if !system_holds {
        return false;
    }
    if p.iter().any(|x| x.is_negative() || x > &Rational::one()) {
        return false;
    }
    // Only z with p - z ∈ mu·P can cover p; those lie in a small box.
    let ranges = coordinate_ranges(poly);
    let lo = RatVec::new(
        ranges
            .iter()
            .zip(p.iter())
            .map(|((_, hi), x)| x - &cert.mu * hi)
            .collect(),
    );
    let hi = RatVec::new(
        ranges
            .iter()
            .zip(p.iter())
            .map(|((lo, _), x)| x - &cert.mu * lo)
            .collect(),
    );
    match lattice_points_in_box_capped(&lo, &hi, DEFAULT_LBAR_CAP) {
        Ok(local) => !is_covered(p, &cert.mu, poly, &local),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use num_traits::Zero;

    pub(crate) fn square() -> HPolytope {
        HPolytope::from_i64(&[vec![2, 0], vec![-2, 0], vec![0, 2], vec![0, -2]], &[1, 1, 1, 1]).unwrap()
    }

    fn simplex2() -> HPolytope {
        let rows = [[-1, 0], [0, -1], [1, 1]]
            .iter()
            .map(|r| r.iter().map(|&v| rat_int(v)).collect())
            .collect::<Vec<Vec<Rational>>>();
        crate::polytope::normalize(&rows, &[rat_int(0), rat_int(0), rat_int(1)])
            .unwrap()
            .0
    }

    fn single() -> SearchConfig {
        SearchConfig {
            worker_count: 1,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn unit_square_has_radius_one() {
        let cert = covering_radius(&square(), &single()).unwrap();
        assert_eq!(cert.mu, rat(1, 1));
        assert!(verify_certificate(&square(), &cert));
    }

    #[test]
    fn triangle_has_radius_two() {
        let p = simplex2();
        let cert = covering_radius(&p, &single()).unwrap();
        assert_eq!(cert.mu, rat(2, 1));
    }

    #[test]
    fn coverage_examples() {
        let p = square();
        let l = LatticePointSet::from_points(2, vec![vec![0, 0]]).unwrap();
        let half = RatVec::new(vec![rat(1, 2), rat(1, 2)]);
        assert!(!is_covered(&half, &rat(1, 1), &p, &l));
        assert!(is_covered(&half, &rat(3, 2), &p, &l));
        assert!(!is_covered(&half, &rat(0, 1), &p, &l));
    }

    #[test]
    fn perturbed_certificates_fail() {
        let p = square();
        let cert = covering_radius(&p, &single()).unwrap();
        let mut bad = cert.clone();
        bad.mu = &bad.mu - rat(1, 7);
        assert!(!verify_certificate(&p, &bad));
        let mut bad = cert.clone();
        let j = bad
            .pairs
            .iter()
            .position(|pr| !p.normal(pr.facet)[0].is_zero())
            .unwrap();
        bad.pairs[j].z[0] += 1;
        assert!(!verify_certificate(&p, &bad));
    }

    #[test]
    fn worker_count_does_not_change_the_certificate() {
        let p = simplex2();
        let one = covering_radius(&p, &single()).unwrap();
        let four = covering_radius(
            &p,
            &SearchConfig {
                worker_count: 4,
                ..SearchConfig::default()
            },
        )
        .unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn beta0_below_beta_is_rejected() {
        let cfg = SearchConfig {
            beta0_override: Some(rat(1, 4)),
            ..single()
        };
        assert!(matches!(covering_radius(&square(), &cfg), Err(Error::Usage(_))));
    }

    #[test]
    fn small_mu0_is_detected() {
        let cfg = SearchConfig {
            mu0_override: Some(rat(1, 2)),
            ..single()
        };
        assert!(matches!(covering_radius(&square(), &cfg), Err(Error::Internal(_))));
    }

    #[test]
    fn lbar_cap_is_reported() {
        let cfg = SearchConfig {
            lbar_cap: 3,
            ..single()
        };
        assert!(matches!(
            covering_radius(&square(), &cfg),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let p = square();
        let cert = covering_radius(&p, &single()).unwrap();
        let mut buf = Vec::new();
        cert.write_json(&p, &mut buf).unwrap();
        let back = Certificate::from_reader(buf.as_slice(), &p).unwrap();
        assert_eq!(back.certificate, cert);
        assert_eq!(back.polytope, Some(p.to_json()));
    }
}
