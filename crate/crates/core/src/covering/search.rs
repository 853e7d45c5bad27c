//! Enumeration kernel for the last-covered-point systems.
//!
//! A candidate system picks `n+1` distinct facets `i_0 < … < i_n` and lattice
//! points `z_j ∈ L̄_P`, and solves `a_{i_j}·(x - z_j) = µ·b_{i_j}` for
//! `(x, µ)`. Multiplying out, the unknowns satisfy `M (x; µ) = c` where row
//! `j` of `M` is `(a_{i_j}, -b_{i_j})` and `c_j = a_{i_j}·z_j`. The solution
//! only depends on the values `c_j`, so for each facet we enumerate the
//! distinct values `{a_i·z : z ∈ L̄_P}` instead of the points themselves,
//! and recover a representative point (the lexicographically first one)
//! afterwards. With `D = det M > 0` and `adj M` the adjugate,
//! `D·(x; µ) = adj(M)·c`, which keeps the inner loop in integers.
//!
//! Values for position `j` are restricted to an interval derived from
//! `0 <= x <= 1`, `0 < µ <= µ0` and `µ >= current best`, using the range of
//! the positions not yet chosen. These filters only drop systems whose
//! solution would be discarded anyway.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

use crate::linalg::{adjugate_int, det_int, RatVec, Rational};
use crate::polytope::{coordinate_ranges, HPolytope};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

type Res<T> = Result<T, Overflow>;

/// Integer type the kernel runs on; `i128` first, `BigInt` when that overflows.
pub(crate) trait KernelInt:
    Clone + Ord + Debug + Send + Sync + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul
{
    fn from_big(v: &BigInt) -> Option<Self>;
    fn from_i64(v: i64) -> Self;
    fn to_big(&self) -> BigInt;
}

impl KernelInt for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }

    fn from_i64(v: i64) -> Self {
        v as i128
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl KernelInt for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }

    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }

    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

fn add<T: KernelInt>(a: &T, b: &T) -> Res<T> {
    a.checked_add(b).ok_or(Overflow)
}

fn sub<T: KernelInt>(a: &T, b: &T) -> Res<T> {
    a.checked_sub(b).ok_or(Overflow)
}

fn mul<T: KernelInt>(a: &T, b: &T) -> Res<T> {
    a.checked_mul(b).ok_or(Overflow)
}

fn floor_div<T: KernelInt>(a: &T, b: &T) -> T {
    a.div_floor(b)
}

fn ceil_div<T: KernelInt>(a: &T, b: &T) -> T {
    -((-a.clone()).div_floor(b))
}

fn conv<T: KernelInt>(v: &BigInt) -> Res<T> {
    T::from_big(v).ok_or(Overflow)
}

/// Compares `a/b` with `c/d` for positive `b`, `d`.
fn cmp_frac<T: KernelInt>(a: &T, b: &T, c: &T, d: &T) -> Res<Ordering> {
    Ok(mul(a, d)?.cmp(&mul(c, b)?))
}

/// Search parameters after bounds have been settled.
pub(crate) struct SearchParams<'a> {
    pub polytope: &'a HPolytope,
    pub mu0: &'a Rational,
    /// Integer range shared by every axis of `L̄_P`.
    pub axis: (i64, i64),
    pub workers: usize,
    pub deterministic: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Facet subsets whose normalized normals are affinely independent.
    pub facet_systems: u64,
    /// Systems solved with `p ∈ [0,1]^n` and `µ` in the admissible window.
    pub candidates: u64,
    /// Coverage scans performed.
    pub coverage_tests: u64,
    /// Candidates that survived the coverage scan and improved the maximum.
    pub improvements: u64,
}

impl SearchStats {
    fn merge(&mut self, other: &SearchStats) {
        self.facet_systems += other.facet_systems;
        self.candidates += other.candidates;
        self.coverage_tests += other.coverage_tests;
        self.improvements += other.improvements;
    }
}

/// Best relevant solution, in exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Found {
    pub mu: Rational,
    pub point: RatVec,
    pub pairs: Vec<(usize, Vec<i64>)>,
}

struct System<T> {
    facets: Vec<usize>,
    det: T,
    /// `adj[r][j]`: coefficient of `c_j` in `D·x_r` (row `n` is `D·µ`).
    adj: Vec<Vec<T>>,
    /// Range of `Σ_{j > level} adj[r][j]·c_j` over admissible values.
    rem_lo: Vec<Vec<T>>,
    rem_hi: Vec<Vec<T>>,
    high_u: T,
}

struct FacetValues<T> {
    values: Vec<T>,
    reps: Vec<Vec<i64>>,
}

struct Ctx<T> {
    n: usize,
    normals: Vec<Vec<T>>,
    offsets: Vec<T>,
    values: Vec<FacetValues<T>>,
    axis: (i64, i64),
    /// Coordinate ranges of P as (num, den) pairs with den > 0.
    ranges: Vec<((T, T), (T, T))>,
    systems: Vec<System<T>>,
    deterministic: bool,
}

#[derive(Clone)]
struct Best<T> {
    u: T,
    d: T,
    x: Vec<T>,
    pairs: Vec<(usize, Vec<i64>)>,
}

impl<T: KernelInt> Best<T> {
    /// Ordering where `Less` means "preferred": larger µ, then smaller point,
    /// then smaller pair list.
    fn preference(&self, other: &Best<T>) -> Res<Ordering> {
        let by_mu = cmp_frac(&other.u, &other.d, &self.u, &self.d)?;
        if by_mu != Ordering::Equal {
            return Ok(by_mu);
        }
        for (a, b) in self.x.iter().zip(&other.x) {
            let o = cmp_frac(a, &self.d, b, &other.d)?;
            if o != Ordering::Equal {
                return Ok(o);
            }
        }
        Ok(self.pairs.cmp(&other.pairs))
    }

    fn into_found(self) -> Found {
        let d = self.d.to_big();
        Found {
            mu: Rational::new(self.u.to_big(), d.clone()),
            point: RatVec::new(
                self.x
                    .iter()
                    .map(|v| Rational::new(v.to_big(), d.clone()))
                    .collect(),
            ),
            pairs: self.pairs,
        }
    }
}

/// Distinct values of `a·z` over the box `[lo, hi]^n`, each with the
/// lexicographically first point attaining it.
fn facet_values<T: KernelInt>(normal: &[T], axis: (i64, i64)) -> Res<FacetValues<T>> {
    let n = normal.len();
    let mut map: BTreeMap<T, Vec<i64>> = BTreeMap::new();
    let mut z = vec![axis.0; n];
    loop {
        let mut v = T::zero();
        for (a, &zk) in normal.iter().zip(&z) {
            v = add(&v, &mul(a, &T::from_i64(zk))?)?;
        }
        map.entry(v).or_insert_with(|| z.clone());
        let mut k = n;
        loop {
            if k == 0 {
                let (values, reps) = map.into_iter().unzip();
                return Ok(FacetValues { values, reps });
            }
            k -= 1;
            if z[k] < axis.1 {
                z[k] += 1;
                for c in z.iter_mut().skip(k + 1) {
                    *c = axis.0;
                }
                break;
            }
        }
    }
}

impl<T: KernelInt> Ctx<T> {
    fn build(params: &SearchParams<'_>) -> Res<Self> {
        let p = params.polytope;
        let n = p.dim();
        let m = p.facet_count();
        let normals: Vec<Vec<T>> = p
            .normals()
            .iter()
            .map(|r| r.iter().map(conv).collect::<Res<Vec<T>>>())
            .collect::<Res<_>>()?;
        let offsets: Vec<T> = p.offsets().iter().map(conv).collect::<Res<_>>()?;
        let values: Vec<FacetValues<T>> = normals
            .iter()
            .map(|a| facet_values(a, params.axis))
            .collect::<Res<_>>()?;
        let ranges = coordinate_ranges(p)
            .into_iter()
            .map(|(lo, hi)| {
                Ok((
                    (conv(lo.numer())?, conv(lo.denom())?),
                    (conv(hi.numer())?, conv(hi.denom())?),
                ))
            })
            .collect::<Res<_>>()?;
        let mu0_num: T = conv(params.mu0.numer())?;
        let mu0_den: T = conv(params.mu0.denom())?;

        let mut systems = Vec::new();
        for facets in (0..m).combinations(n + 1) {
            let rows: Vec<Vec<BigInt>> = facets
                .iter()
                .map(|&i| {
                    let mut r = p.normal(i).to_vec();
                    r.push(-p.offset(i).clone());
                    r
                })
                .collect();
            let det = det_int(&rows);
            if det.is_zero() {
                continue;
            }
            let mut adj = adjugate_int(&rows);
            let det = if det.is_negative() {
                adj.iter_mut().flatten().for_each(|v| *v = -&*v);
                -det
            } else {
                det
            };
            let det: T = conv(&det)?;
            let adj: Vec<Vec<T>> = adj
                .iter()
                .map(|r| r.iter().map(conv).collect::<Res<Vec<T>>>())
                .collect::<Res<_>>()?;
            let mut rem_lo = vec![vec![T::zero(); n + 1]; n + 1];
            let mut rem_hi = vec![vec![T::zero(); n + 1]; n + 1];
            for level in (0..n).rev() {
                let next = level + 1;
                let vals = &values[facets[next]].values;
                let (vmin, vmax) = (&vals[0], &vals[vals.len() - 1]);
                for r in 0..=n {
                    let lo_term = mul(&adj[r][next], vmin)?;
                    let hi_term = mul(&adj[r][next], vmax)?;
                    let (lo_t, hi_t) = if lo_term <= hi_term {
                        (lo_term, hi_term)
                    } else {
                        (hi_term, lo_term)
                    };
                    rem_lo[level][r] = add(&rem_lo[next][r], &lo_t)?;
                    rem_hi[level][r] = add(&rem_hi[next][r], &hi_t)?;
                }
            }
            let high_u = floor_div(&mul(&mu0_num, &det)?, &mu0_den);
            systems.push(System {
                facets,
                det,
                adj,
                rem_lo,
                rem_hi,
                high_u,
            });
        }
        Ok(Ctx {
            n,
            normals,
            offsets,
            values,
            axis: params.axis,
            ranges,
            systems,
            deterministic: params.deterministic,
        })
    }

    /// Smallest admissible `U = D·µ` given the current best.
    fn low_u(&self, det: &T, best: &Option<Best<T>>) -> Res<T> {
        let floor = T::one();
        let Some(b) = best else {
            return Ok(floor);
        };
        let scaled = mul(&b.u, det)?;
        let bound = if self.deterministic {
            ceil_div(&scaled, &b.d)
        } else {
            add(&floor_div(&scaled, &b.d), &T::one())?
        };
        Ok(bound.max(floor))
    }

    /// Interval of admissible values `c` for position `level`.
    fn interval(
        &self,
        sys: &System<T>,
        level: usize,
        sums: &[T],
        low_u: &T,
    ) -> Res<Option<(Option<T>, Option<T>)>> {
        let n = self.n;
        let mut lo: Option<T> = None;
        let mut hi: Option<T> = None;
        for r in 0..=n {
            let coef = &sys.adj[r][level];
            let (min_target, max_target) = if r < n {
                (T::zero(), sys.det.clone())
            } else {
                (low_u.clone(), sys.high_u.clone())
            };
            // coef·c >= min_target - sums[r] - rem_hi
            let t_lo = sub(&sub(&min_target, &sums[r])?, &sys.rem_hi[level][r])?;
            // coef·c <= max_target - sums[r] - rem_lo
            let t_hi = sub(&sub(&max_target, &sums[r])?, &sys.rem_lo[level][r])?;
            if coef.is_zero() {
                if t_lo.is_positive() || t_hi.is_negative() {
                    return Ok(None);
                }
                continue;
            }
            let (l, h) = if coef.is_positive() {
                (ceil_div(&t_lo, coef), floor_div(&t_hi, coef))
            } else {
                (ceil_div(&t_hi, coef), floor_div(&t_lo, coef))
            };
            lo = Some(match lo {
                Some(cur) if cur >= l => cur,
                _ => l,
            });
            hi = Some(match hi {
                Some(cur) if cur <= h => cur,
                _ => h,
            });
        }
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                return Ok(None);
            }
        }
        Ok(Some((lo, hi)))
    }

    fn value_range(&self, facet: usize, window: &(Option<T>, Option<T>)) -> std::ops::Range<usize> {
        let vals = &self.values[facet].values;
        let start = match &window.0 {
            Some(l) => vals.partition_point(|v| v < l),
            None => 0,
        };
        let end = match &window.1 {
            Some(h) => vals.partition_point(|v| v <= h),
            None => vals.len(),
        };
        start..end.max(start)
    }

    fn descend(
        &self,
        sys: &System<T>,
        level: usize,
        sums: &[T],
        chosen: &mut Vec<usize>,
        best: &mut Option<Best<T>>,
        stats: &mut SearchStats,
    ) -> Res<()> {
        let low_u = self.low_u(&sys.det, best)?;
        let Some(window) = self.interval(sys, level, sums, &low_u)? else {
            return Ok(());
        };
        let facet = sys.facets[level];
        for idx in self.value_range(facet, &window) {
            let c = &self.values[facet].values[idx];
            let mut next = Vec::with_capacity(sums.len());
            for (r, s) in sums.iter().enumerate() {
                next.push(add(s, &mul(&sys.adj[r][level], c)?)?);
            }
            chosen.push(idx);
            if level == self.n {
                self.leaf(sys, &next, chosen, best, stats)?;
            } else {
                self.descend(sys, level + 1, &next, chosen, best, stats)?;
            }
            chosen.pop();
        }
        Ok(())
    }

    fn leaf(
        &self,
        sys: &System<T>,
        sums: &[T],
        chosen: &[usize],
        best: &mut Option<Best<T>>,
        stats: &mut SearchStats,
    ) -> Res<()> {
        let n = self.n;
        let d = &sys.det;
        let (x, u) = (&sums[..n], &sums[n]);
        if x.iter().any(|v| v.is_negative() || v > d) || !u.is_positive() || u > &sys.high_u {
            return Ok(());
        }
        stats.candidates += 1;
        let candidate = Best {
            u: u.clone(),
            d: d.clone(),
            x: x.to_vec(),
            pairs: sys
                .facets
                .iter()
                .zip(chosen)
                .map(|(&f, &idx)| (f, self.values[f].reps[idx].clone()))
                .collect(),
        };
        if let Some(b) = best.as_ref() {
            match candidate.preference(b)? {
                Ordering::Less => {}
                Ordering::Equal => return Ok(()),
                Ordering::Greater => return Ok(()),
            }
            if !self.deterministic && cmp_frac(u, d, &b.u, &b.d)? != Ordering::Greater {
                return Ok(());
            }
        }
        stats.coverage_tests += 1;
        if self.covered(x, u, d)? {
            return Ok(());
        }
        stats.improvements += 1;
        *best = Some(candidate);
        Ok(())
    }

    /// Is `p = x/D` in `int(µP) + L̄_P` for `µ = u/D`?
    fn covered(&self, x: &[T], u: &T, d: &T) -> Res<bool> {
        let n = self.n;
        let mut ranges = Vec::with_capacity(n);
        for k in 0..n {
            let ((ln, ld), (hn, hd)) = &self.ranges[k];
            // z_k ∈ [p_k - µ·hi_k, p_k - µ·lo_k]
            let lo = ceil_div(&sub(&mul(&x[k], hd)?, &mul(u, hn)?)?, &mul(d, hd)?);
            let hi = floor_div(&sub(&mul(&x[k], ld)?, &mul(u, ln)?)?, &mul(d, ld)?);
            let lo = lo.max(T::from_i64(self.axis.0));
            let hi = hi.min(T::from_i64(self.axis.1));
            if lo > hi {
                return Ok(false);
            }
            ranges.push((lo, hi));
        }
        let mut ax = Vec::with_capacity(self.normals.len());
        let mut ub = Vec::with_capacity(self.normals.len());
        for (a, b) in self.normals.iter().zip(&self.offsets) {
            let mut s = T::zero();
            for (ak, xk) in a.iter().zip(x) {
                s = add(&s, &mul(ak, xk)?)?;
            }
            ax.push(s);
            ub.push(mul(u, b)?);
        }
        let mut z: Vec<T> = ranges.iter().map(|r| r.0.clone()).collect();
        loop {
            let mut inside = true;
            for ((a, axi), ubi) in self.normals.iter().zip(&ax).zip(&ub) {
                let mut az = T::zero();
                for (ak, zk) in a.iter().zip(&z) {
                    az = add(&az, &mul(ak, zk)?)?;
                }
                // a·x - D·a·z < U·b
                if sub(axi, &mul(d, &az)?)? >= *ubi {
                    inside = false;
                    break;
                }
            }
            if inside {
                return Ok(true);
            }
            let mut k = n;
            loop {
                if k == 0 {
                    return Ok(false);
                }
                k -= 1;
                if z[k] < ranges[k].1 {
                    z[k] = add(&z[k], &T::one())?;
                    for j in k + 1..n {
                        z[j] = ranges[j].0.clone();
                    }
                    break;
                }
            }
        }
    }
}

/// Runs the search on integer type `T`.
pub(crate) fn run<T: KernelInt>(params: &SearchParams<'_>) -> Res<(Option<Found>, SearchStats)> {
    let ctx = Ctx::<T>::build(params)?;
    let units: Vec<(usize, usize)> = ctx
        .systems
        .iter()
        .enumerate()
        .flat_map(|(s, sys)| {
            let count = ctx.values[sys.facets[0]].values.len();
            (0..count).map(move |idx| (s, idx))
        })
        .collect();
    let next_unit = AtomicUsize::new(0);
    let overflow = AtomicBool::new(false);
    let results: Mutex<Vec<(Option<Best<T>>, SearchStats)>> = Mutex::new(Vec::new());
    let workers = params.workers.max(1);

    let work = || {
        let mut best: Option<Best<T>> = None;
        let mut stats = SearchStats::default();
        let outcome: Res<()> = (|| {
            loop {
                if overflow.load(AtomicOrdering::Relaxed) {
                    return Ok(());
                }
                let i = next_unit.fetch_add(1, AtomicOrdering::Relaxed);
                let Some(&(s, idx)) = units.get(i) else {
                    return Ok(());
                };
                let sys = &ctx.systems[s];
                let low_u = ctx.low_u(&sys.det, &best)?;
                let zeros = vec![T::zero(); ctx.n + 1];
                let Some(window) = ctx.interval(sys, 0, &zeros, &low_u)? else {
                    continue;
                };
                if !ctx.value_range(sys.facets[0], &window).contains(&idx) {
                    continue;
                }
                let c = &ctx.values[sys.facets[0]].values[idx];
                let sums: Vec<T> = (0..=ctx.n)
                    .map(|r| mul(&sys.adj[r][0], c))
                    .collect::<Res<_>>()?;
                let mut chosen = vec![idx];
                if ctx.n == 0 {
                    ctx.leaf(sys, &sums, &chosen, &mut best, &mut stats)?;
                } else {
                    ctx.descend(sys, 1, &sums, &mut chosen, &mut best, &mut stats)?;
                }
            }
        })();
        if outcome.is_err() {
            overflow.store(true, AtomicOrdering::Relaxed);
        }
        results.lock().expect("poisoned").push((best, stats));
    };

    if workers == 1 {
        work();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(work);
            }
        });
    }
    if overflow.load(AtomicOrdering::Relaxed) {
        return Err(Overflow);
    }

    let mut stats = SearchStats {
        facet_systems: ctx.systems.len() as u64,
        ..SearchStats::default()
    };
    let mut overall: Option<Best<T>> = None;
    for (best, s) in results.into_inner().expect("poisoned") {
        stats.merge(&s);
        if let Some(b) = best {
            overall = match overall {
                Some(cur) if cur.preference(&b)? != Ordering::Greater => Some(cur),
                _ => Some(b),
            };
        }
    }
    Ok((overall.map(Best::into_found), stats))
}
