//! Per-edge energy bounds and the max–min problems behind the guaranteed
//! approximation ratios.
//!
//! With `cos 2θ = exp(−κm)` every edge of a magic graph state satisfies
//! `⟨g_e⟩ ≥ T(κ, m_e)`, where
//!
//! ```text
//! T(κ, m) = ½ (1 + e^{−2κ(1−m)} + 2 √(1 − e^{−2κm}) e^{−κ(1−m)})
//! R(κ, m) = T(κ, m) / (1 + m)
//! ```
//!
//! Summing over edges and comparing with `w_G + w(FM)` turns any lower bound
//! `min_x R(κ, x)` over the fractions in use into an approximation ratio;
//! maximizing over κ gives the best such ratio.

use serde::Serialize;

use crate::graph::Graph;
use crate::magic_state::{self, DEFAULT_ZZ_CAP};
use crate::matching::{self, FractionalMatching, MatchingKind};
use crate::rational::{self, Rational};
use crate::search::{golden_max, golden_min};

pub const PHI: f64 = 1.618_033_988_749_895;
/// φ/2, the max–min over the full interval [0, 1].
pub const R0: f64 = PHI / 2.0;
/// (3 + √5)/6, the single-fraction optimum at m = 1/2.
pub const R2: f64 = 0.872_677_996_249_964_9;

/// ½ ln φ, the optimal κ for the full interval.
pub fn kappa0() -> f64 {
    0.5 * PHI.ln()
}

const GRID_POINTS: usize = 10_000;
const KAPPA_FLOOR: f64 = 1e-4;
const KAPPA_CEILING: f64 = 2.0;
const KAPPA_LIMIT: f64 = 512.0;
const KAPPA_SCAN: usize = 600;
const KAPPA_TOL: f64 = 1e-9;
const X_TOL: f64 = 1e-12;
/// Secondary inner minimizers within this of `r` are reported as ties.
pub const TIE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RatioError {
    #[error("kappa must be positive and finite, got {0}")]
    Kappa(f64),
    #[error("fraction {0} is outside [0, 1]")]
    Fraction(f64),
    #[error("invalid interval [{lo}, {hi}]: need 0 ≤ lo ≤ hi ≤ 1")]
    Interval { lo: f64, hi: f64 },
    #[error("degree must be at least 2, got {0}")]
    Degree(usize),
    #[error("fraction set is empty")]
    EmptySet,
}

fn check(kappa: f64, m: f64) -> Result<(), RatioError> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(RatioError::Kappa(kappa));
    }
    if !(0.0..=1.0).contains(&m) {
        return Err(RatioError::Fraction(m));
    }
    Ok(())
}

pub fn t_bound(kappa: f64, m: f64) -> Result<f64, RatioError> {
    check(kappa, m)?;
    Ok(t_bound_unchecked(kappa, m))
}

pub fn r_ratio(kappa: f64, m: f64) -> Result<f64, RatioError> {
    check(kappa, m)?;
    Ok(r_unchecked(kappa, m))
}

pub(crate) fn t_bound_unchecked(kappa: f64, m: f64) -> f64 {
    let rest = (-kappa * (1.0 - m)).exp();
    let sine = (1.0 - (-2.0 * kappa * m).exp()).max(0.0).sqrt();
    0.5 * (1.0 + rest * rest + 2.0 * sine * rest)
}

fn r_unchecked(kappa: f64, m: f64) -> f64 {
    t_bound_unchecked(kappa, m) / (1.0 + m)
}

/// Set of fractions the inner minimum ranges over.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InnerDomain {
    Interval { lo: f64, hi: f64 },
    Fractions { values: Vec<f64> },
}

impl InnerDomain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self, RatioError> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(RatioError::Interval { lo, hi });
        }
        Ok(Self::Interval { lo, hi })
    }

    pub fn fractions(values: impl IntoIterator<Item = f64>) -> Result<Self, RatioError> {
        let mut values: Vec<f64> = values.into_iter().collect();
        if values.is_empty() {
            return Err(RatioError::EmptySet);
        }
        if let Some(&bad) = values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(RatioError::Fraction(bad));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Self::Fractions { values })
    }

    fn grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
        let step = (hi - lo) / GRID_POINTS as f64;
        (0..=GRID_POINTS).map(move |i| {
            if i == GRID_POINTS {
                hi
            } else {
                lo + step * i as f64
            }
        })
    }

    /// `min_x R(κ, x)` and an argmin.
    pub fn min_r(&self, kappa: f64) -> (f64, f64) {
        match self {
            InnerDomain::Fractions { values } => values
                .iter()
                .map(|&x| (x, r_unchecked(kappa, x)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty fraction set"),
            InnerDomain::Interval { lo, hi } => {
                let (lo, hi) = (*lo, *hi);
                if lo == hi {
                    return (lo, r_unchecked(kappa, lo));
                }
                let step = (hi - lo) / GRID_POINTS as f64;
                let (x, v) = Self::grid(lo, hi)
                    .map(|x| (x, r_unchecked(kappa, x)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                let (rx, rv) = golden_min(
                    |x| r_unchecked(kappa, x),
                    (x - step).max(lo),
                    (x + step).min(hi),
                    X_TOL,
                );
                if rv < v {
                    (rx, rv)
                } else {
                    (x, v)
                }
            }
        }
    }

    /// All inner minimizers within [`TIE_TOL`] of the minimum, ascending.
    pub fn minimizers(&self, kappa: f64) -> Vec<f64> {
        let (_, best) = self.min_r(kappa);
        let mut out = match self {
            InnerDomain::Fractions { values } => values
                .iter()
                .copied()
                .filter(|&x| r_unchecked(kappa, x) <= best + TIE_TOL)
                .collect(),
            InnerDomain::Interval { lo, hi } => {
                let (lo, hi) = (*lo, *hi);
                if lo == hi {
                    return vec![lo];
                }
                let pts: Vec<(f64, f64)> = Self::grid(lo, hi)
                    .map(|x| (x, r_unchecked(kappa, x)))
                    .collect();
                let step = (hi - lo) / GRID_POINTS as f64;
                let mut found = Vec::new();
                for i in 0..pts.len() {
                    let left = i == 0 || pts[i].1 <= pts[i - 1].1;
                    let right = i + 1 == pts.len() || pts[i].1 <= pts[i + 1].1;
                    if left && right {
                        let (x, v) = golden_min(
                            |x| r_unchecked(kappa, x),
                            (pts[i].0 - step).max(lo),
                            (pts[i].0 + step).min(hi),
                            X_TOL,
                        );
                        let (x, v) = if v < pts[i].1 { (x, v) } else { pts[i] };
                        if v <= best + TIE_TOL {
                            found.push(x);
                        }
                    }
                }
                found
            }
        };
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSolution {
    pub kappa_star: f64,
    pub r: f64,
    pub domain: InnerDomain,
    /// Argmin of `R(κ*, ·)` followed by any near-ties, ascending.
    pub minimizers: Vec<f64>,
}

/// `max_{κ>0} min_{x ∈ domain} R(κ, x)`.
///
/// A log-spaced scan over κ locates the best bracket, which golden-section
/// search then refines. The scan ceiling grows when the best κ sits on it;
/// for the degenerate domain {1} the supremum is only approached as κ → ∞
/// and the search stops at an internal limit.
pub fn solve_max_min(domain: &InnerDomain) -> RatioSolution {
    let objective = |k: f64| domain.min_r(k).1;
    let mut ceiling = KAPPA_CEILING;
    let (lo, hi) = loop {
        let ratio = (ceiling / KAPPA_FLOOR).powf(1.0 / (KAPPA_SCAN - 1) as f64);
        let ks: Vec<f64> = (0..KAPPA_SCAN)
            .map(|i| KAPPA_FLOOR * ratio.powi(i as i32))
            .collect();
        let best = (0..KAPPA_SCAN)
            .map(|i| (i, objective(ks[i])))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        if best + 1 == KAPPA_SCAN && ceiling < KAPPA_LIMIT {
            ceiling *= 4.0;
            continue;
        }
        break (
            ks[best.saturating_sub(1)],
            ks[(best + 1).min(KAPPA_SCAN - 1)],
        );
    };
    let (kappa_star, _) = golden_max(objective, lo, hi, KAPPA_TOL);
    let (argmin, r) = domain.min_r(kappa_star);
    let mut minimizers = vec![argmin];
    minimizers.extend(
        domain
            .minimizers(kappa_star)
            .into_iter()
            .filter(|x| (x - argmin).abs() > 1e-9),
    );
    RatioSolution {
        kappa_star,
        r,
        domain: domain.clone(),
        minimizers,
    }
}

/// The full-interval problem; `r₀ = φ/2` at `κ₀ = ½ ln φ`.
pub fn solve_r0() -> RatioSolution {
    solve_max_min(&InnerDomain::Interval { lo: 0.0, hi: 1.0 })
}

/// `r_d = max_κ R(κ, 1/d)` for d-regular graphs.
pub fn solve_rd(d: usize) -> Result<RatioSolution, RatioError> {
    if d < 2 {
        return Err(RatioError::Degree(d));
    }
    Ok(solve_max_min(&InnerDomain::fractions([1.0 / d as f64])?))
}

/// `r_{δ,Δ}` over `[lo, hi] = [1/Δ, 1/δ]`.
pub fn solve_r_interval(lo: f64, hi: f64) -> Result<RatioSolution, RatioError> {
    Ok(solve_max_min(&InnerDomain::interval(lo, hi)?))
}

/// Same max–min over an explicit finite set of fractions.
pub fn solve_r_fractions(values: &[f64]) -> Result<RatioSolution, RatioError> {
    Ok(solve_max_min(&InnerDomain::fractions(
        values.iter().copied(),
    )?))
}

/// How `certify` builds the inner domain from a matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DomainMode {
    /// The distinct fractions the matching actually uses.
    #[default]
    Fractions,
    /// The box of a constrained matching, otherwise the closed interval
    /// between the smallest and largest fraction.
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KappaMode {
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    pub domain: DomainMode,
    pub kappa: KappaMode,
    pub evaluate_energy: bool,
    pub zz_cap: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            domain: DomainMode::Fractions,
            kappa: KappaMode::Auto,
            evaluate_energy: true,
            zz_cap: DEFAULT_ZZ_CAP,
        }
    }
}

/// Audit record for the guaranteed ratio `r · ŝ` of a matching.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub graph_fingerprint: String,
    pub vertex_count: usize,
    pub edge_count: usize,
    /// Parallel-edge free; the matching upper bound on λ_max is only
    /// guaranteed in that case.
    pub simple: bool,
    pub matching: MatchingKind,
    pub matching_value: String,
    pub mwfm_value: String,
    pub total_weight: String,
    pub fraction_lo: String,
    pub fraction_hi: String,
    /// Edge-degree style bounds δ = 1/hi and Δ = 1/lo; absent when lo = 0.
    pub delta: Option<f64>,
    pub big_delta: Option<f64>,
    pub fractions: Vec<String>,
    pub domain_mode: DomainMode,
    pub kappa_mode: KappaMode,
    pub kappa_star: f64,
    pub r: f64,
    pub minimizers: Vec<f64>,
    pub s: String,
    pub s_hat: String,
    pub s_hat_f64: f64,
    pub guarantee: f64,
    /// Closed-form energy of the state at κ*.
    pub energy: Option<f64>,
    /// energy / (w_G + w(MWFM)).
    pub achieved_ratio: Option<f64>,
    pub lambda_max: Option<f64>,
    /// energy / λ_max.
    pub true_ratio: Option<f64>,
}

impl Certificate {
    pub fn attach_lambda_max(&mut self, lambda_max: f64) {
        self.lambda_max = Some(lambda_max);
        self.true_ratio = self.energy.map(|e| e / lambda_max);
    }
}

pub fn certify(
    g: &Graph,
    fm: &FractionalMatching,
    opts: &CertifyOptions,
) -> Result<Certificate, crate::Error> {
    fm.check_feasible(g)?;
    let quality = matching::quality(g, fm)?;
    let set = fm.fraction_set();
    let (lo, hi) = fm.span().ok_or(crate::graph::GraphError::NoEdges)?;
    let domain = match opts.domain {
        DomainMode::Fractions => InnerDomain::fractions(set.iter().map(rational::to_f64))?,
        DomainMode::Interval => {
            let (a, b) = match fm.kind() {
                MatchingKind::Constrained { lo, hi } => (lo, hi),
                _ => (&lo, &hi),
            };
            InnerDomain::interval(rational::to_f64(a), rational::to_f64(b))?
        }
    };
    let solution = match opts.kappa {
        KappaMode::Auto => solve_max_min(&domain),
        KappaMode::Fixed(kappa) => {
            check(kappa, 0.0)?;
            let (x, r) = domain.min_r(kappa);
            RatioSolution {
                kappa_star: kappa,
                r,
                domain: domain.clone(),
                minimizers: vec![x],
            }
        }
    };
    let s_hat_f64 = rational::to_f64(&quality.s_hat);
    let guarantee = solution.r * s_hat_f64;

    let (energy, achieved_ratio) = if opts.evaluate_energy {
        let th = magic_state::assign_thetas(g, fm, solution.kappa_star)?;
        let report = magic_state::total_energy(g, &th, opts.zz_cap)?;
        let e = report.totals.energy;
        let denom = rational::to_f64(&(g.total_weight() + &quality.mwfm_value));
        (Some(e), Some(e / denom))
    } else {
        (None, None)
    };
    let recip = |r: &Rational| {
        use num_traits::Zero;
        (!r.is_zero()).then(|| 1.0 / rational::to_f64(r))
    };

    Ok(Certificate {
        graph_fingerprint: g.fingerprint(),
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        simple: g.is_simple(),
        matching: fm.kind().clone(),
        matching_value: rational::format(fm.value()),
        mwfm_value: rational::format(&quality.mwfm_value),
        total_weight: rational::format(&g.total_weight()),
        fraction_lo: rational::format(&lo),
        fraction_hi: rational::format(&hi),
        delta: recip(&hi),
        big_delta: recip(&lo),
        fractions: set.iter().map(rational::format).collect(),
        domain_mode: opts.domain,
        kappa_mode: opts.kappa,
        kappa_star: solution.kappa_star,
        r: solution.r,
        minimizers: solution.minimizers,
        s: rational::format(&quality.s),
        s_hat: rational::format(&quality.s_hat),
        s_hat_f64,
        guarantee,
        energy,
        achieved_ratio,
        lambda_max: None,
        true_ratio: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_at_zero_fraction() {
        for k in [0.1f64, 0.5, 1.7] {
            let want = 0.5 * (1.0 + (-2.0 * k).exp());
            assert!((t_bound(k, 0.0).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn t_at_golden_kappa_full_edge() {
        let t = t_bound(kappa0(), 1.0).unwrap();
        let want = 1.0 + (1.0 - 1.0 / PHI).sqrt();
        assert!((t - want).abs() < 1e-14);
        assert!((t - 2.0 * R0).abs() < 1e-14);
    }

    #[test]
    fn t_is_monotone_in_fraction_on_grid() {
        // Grid oracle: T(κ, ·) is non-decreasing on [0, 1].
        for k in [0.05, 0.24, 0.5, 1.0, 2.0] {
            let mut prev = t_bound(k, 0.0).unwrap();
            for i in 1..=1000 {
                let t = t_bound(k, i as f64 / 1000.0).unwrap();
                assert!(t >= prev - 1e-15, "κ={k} i={i}");
                assert!((0.5..=2.0).contains(&t));
                prev = t;
            }
        }
    }

    #[test]
    fn r_at_golden_kappa_endpoints() {
        let k0 = kappa0();
        assert!((r_ratio(k0, 0.0).unwrap() - R0).abs() < 1e-14);
        assert!((r_ratio(k0, 1.0).unwrap() - R0).abs() < 1e-14);
        assert!((r_ratio(0.324, 0.5).unwrap() - 0.872).abs() < 1e-3);
    }

    #[test]
    fn domain_errors() {
        assert_eq!(t_bound(0.0, 0.5).unwrap_err(), RatioError::Kappa(0.0));
        assert_eq!(t_bound(1.0, 1.5).unwrap_err(), RatioError::Fraction(1.5));
        assert!(r_ratio(f64::NAN, 0.5).is_err());
        assert_eq!(solve_rd(1).unwrap_err(), RatioError::Degree(1));
        assert!(solve_r_interval(0.6, 0.4).is_err());
        assert!(solve_r_interval(-0.1, 0.4).is_err());
        assert!(solve_r_fractions(&[]).is_err());
    }

    #[test]
    fn r0_matches_golden_ratio() {
        let sol = solve_r0();
        assert!((sol.r - R0).abs() < 1e-8, "r = {}", sol.r);
        assert!((sol.kappa_star - kappa0()).abs() < 1e-6);
        let (a, b) = (sol.minimizers[0], *sol.minimizers.last().unwrap());
        assert!(sol.minimizers.len() >= 2, "{:?}", sol.minimizers);
        assert!(a.min(b) < 1e-6 && a.max(b) > 1.0 - 1e-6);
    }

    #[test]
    fn r0_is_locally_optimal() {
        let domain = InnerDomain::interval(0.0, 1.0).unwrap();
        let at = domain.min_r(kappa0()).1;
        assert!(domain.min_r(kappa0() + 0.01).1 < at);
        assert!(domain.min_r(kappa0() - 0.01).1 < at);
    }

    #[test]
    fn r2_closed_form() {
        let sol = solve_rd(2).unwrap();
        assert!((sol.r - R2).abs() < 1e-12);
        assert!((R2 - (3.0 + 5f64.sqrt()) / 6.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_interval_matches_single_fraction() {
        for d in 2..=6 {
            let x = 1.0 / d as f64;
            let a = solve_r_interval(x, x).unwrap().r;
            let b = solve_rd(d).unwrap().r;
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn minimizer_reproduces_r() {
        let sol = solve_r_interval(0.2, 0.8).unwrap();
        let x = sol.minimizers[0];
        assert!((r_ratio(sol.kappa_star, x).unwrap() - sol.r).abs() < 1e-9);
    }

    #[test]
    fn full_edge_only_approaches_one() {
        let sol = solve_r_fractions(&[1.0]).unwrap();
        assert!(sol.r > 0.999 && sol.r <= 1.0, "{sol:?}");
    }
}
