//! Exact covering radii of rational polytopes, with certificates, and their
//! application to the three-runner shifted lonely runner problem.
//!
//! ```
//! use covrad_core::{covering_radius, HPolytope, SearchConfig};
//!
//! // the unit square, centred: |2x| <= 1, |2y| <= 1
//! let p = HPolytope::from_i64(&[vec![2, 0], vec![-2, 0], vec![0, 2], vec![0, -2]], &[1, 1, 1, 1]).unwrap();
//! let cert = covering_radius(&p, &SearchConfig::default()).unwrap();
//! assert_eq!(cert.mu.to_string(), "1");
//! ```

pub mod covering;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod lonely_runner;
pub mod polytope;
pub mod width;

pub use covering::{
    covering_radius, covering_radius_with_stats, effective_bounds, grid_oracle, is_covered,
    verify_certificate, Certificate, CertificatePair, LoadedCertificate, SearchConfig, SearchStats,
};
pub use error::{Error, Result};
pub use lattice::{lattice_points_in_box, lbar, LatticePointSet, DEFAULT_LBAR_CAP};
pub use linalg::{parse_rational, RatMat, RatVec, Rational};
pub use lonely_runner::{
    normalize_velocities, scan, slrc_check, spectrum_classify, ScanRecord, ScanReport, Spectrum,
    Verdict, VelocityVector, Zonotope,
};
pub use polytope::{bounds, normalize, vertices, HPolytope, PolytopeBounds, PolytopeJson};
pub use width::{flatness_mu_bound, lattice_width, WidthResult};
