//! Fractional matchings: LP optima, homogeneous and quasi-homogeneous
//! constructions, interval-constrained optima and their quality ratios.
//!
//! A fractional matching assigns every edge a fraction `m_e ∈ [0, 1]` with
//! `Σ_{e∋v} m_e ≤ 1` at every vertex. Everything here is exact rational
//! arithmetic; conversion to floating point happens in the state layer.

mod simplex;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::graph::{edge_degree_profile, EdgeId, Graph, GraphError, VertexId};
use crate::rational::{self, Rational};

pub use simplex::LpError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatchingError {
    #[error("graph is not {expected}-regular: vertex {vertex} has degree {degree}")]
    NotRegular {
        vertex: VertexId,
        degree: usize,
        expected: usize,
    },
    #[error(
        "fraction box [{lo}, {hi}] is infeasible at vertex {vertex}: lower bounds sum to {load}"
    )]
    InfeasibleBox {
        vertex: VertexId,
        lo: String,
        hi: String,
        load: String,
    },
    #[error("invalid fraction interval: {0}")]
    InvalidInterval(String),
    #[error("matching has {found} fractions but the graph has {expected} edges")]
    LengthMismatch { found: usize, expected: usize },
    #[error("fraction on edge {edge} is outside [0, 1]")]
    FractionOutOfRange { edge: EdgeId },
    #[error("vertex {vertex} is over capacity: incident fractions sum to {load}")]
    OverCapacity { vertex: VertexId, load: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// How a matching was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MatchingKind {
    /// Maximum-weight fractional matching.
    Mwfm,
    /// Homogeneous `1/d` on a d-regular graph.
    Hfm { degree: usize },
    /// Quasi-homogeneous `1/d_e` from edge degrees.
    Qhfm,
    /// LP optimum with every fraction boxed into `[lo, hi]`.
    Constrained {
        #[serde(with = "rational::as_string")]
        lo: Rational,
        #[serde(with = "rational::as_string")]
        hi: Rational,
    },
    /// Caller-supplied fractions.
    Supplied,
}

impl MatchingKind {
    pub fn short_name(&self) -> &'static str {
        match self {
            MatchingKind::Mwfm => "mwfm",
            MatchingKind::Hfm { .. } => "hfm",
            MatchingKind::Qhfm => "qhfm",
            MatchingKind::Constrained { .. } => "constrained",
            MatchingKind::Supplied => "supplied",
        }
    }
}

/// Per-edge fraction box `[lo, hi] ⊆ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionBox {
    lo: Rational,
    hi: Rational,
}

impl FractionBox {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, MatchingError> {
        if lo.is_negative() {
            return Err(MatchingError::InvalidInterval(format!(
                "lower bound {} is negative",
                rational::format(&lo)
            )));
        }
        if lo > hi {
            return Err(MatchingError::InvalidInterval(format!(
                "lower bound {} exceeds upper bound {}",
                rational::format(&lo),
                rational::format(&hi)
            )));
        }
        let hi = hi.min(Rational::one());
        if lo > hi {
            return Err(MatchingError::InvalidInterval(format!(
                "lower bound {} exceeds 1",
                rational::format(&lo)
            )));
        }
        Ok(Self { lo, hi })
    }

    /// The unconstrained box `[0, 1]`.
    pub fn unit() -> Self {
        Self {
            lo: Rational::zero(),
            hi: Rational::one(),
        }
    }

    /// `I_{δ,Δ} = [1/Δ, 1/δ]`, the upper end clipped to 1.
    pub fn from_degrees(delta: &Rational, big_delta: &Rational) -> Result<Self, MatchingError> {
        if !delta.is_positive() || delta > big_delta {
            return Err(MatchingError::InvalidInterval(format!(
                "need 0 < δ ≤ Δ, got δ = {}, Δ = {}",
                rational::format(delta),
                rational::format(big_delta)
            )));
        }
        Self::new(big_delta.recip(), delta.recip())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }
}

/// LP dual solution proving optimality of a boxed matching.
///
/// For prices `p_v ≥ 0`, `q_e ≥ 0` with `p_u + p_v + q_e ≥ w_e` on every
/// edge, `Σ_e w_e lo + Σ_v p_v (1 − Σ_{e∋v} lo) + Σ_e q_e (hi − lo)` bounds
/// every feasible matching value from above.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    pub vertex_prices: Vec<Rational>,
    pub edge_prices: Vec<Rational>,
}

impl DualCertificate {
    pub fn upper_bound(&self, g: &Graph, fbox: &FractionBox) -> Option<Rational> {
        let width = &fbox.hi - &fbox.lo;
        let mut bound = Rational::zero();
        for (id, e) in g.edges().iter().enumerate() {
            let q = &self.edge_prices[id];
            let lhs = &self.vertex_prices[e.u] + &self.vertex_prices[e.v] + q;
            if q.is_negative() || lhs < e.weight {
                return None;
            }
            bound += &e.weight * &fbox.lo + q * &width;
        }
        for v in 0..g.vertex_count() {
            let p = &self.vertex_prices[v];
            if p.is_negative() {
                return None;
            }
            let load = Rational::from_integer(g.degree(v).into()) * &fbox.lo;
            bound += p * (Rational::one() - load);
        }
        Some(bound)
    }

    /// Exact strong-duality check against a claimed optimum.
    pub fn certifies(&self, g: &Graph, fbox: &FractionBox, value: &Rational) -> bool {
        self.upper_bound(g, fbox).is_some_and(|b| b == *value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalMatching {
    fractions: Vec<Rational>,
    value: Rational,
    kind: MatchingKind,
    degenerate: bool,
    certificate: Option<DualCertificate>,
}

impl FractionalMatching {
    /// Wraps caller-supplied fractions after checking feasibility on `g`.
    pub fn from_fractions(g: &Graph, fractions: Vec<Rational>) -> Result<Self, MatchingError> {
        let fm = Self::assemble(g, fractions, MatchingKind::Supplied, false, None);
        fm.check_feasible(g)?;
        Ok(fm)
    }

    fn assemble(
        g: &Graph,
        fractions: Vec<Rational>,
        kind: MatchingKind,
        degenerate: bool,
        certificate: Option<DualCertificate>,
    ) -> Self {
        let value = weighted_value(g, &fractions);
        Self {
            fractions,
            value,
            kind,
            degenerate,
            certificate,
        }
    }

    pub fn fractions(&self) -> &[Rational] {
        &self.fractions
    }

    pub fn fraction(&self, e: EdgeId) -> &Rational {
        &self.fractions[e]
    }

    /// Σ_e w_e m_e.
    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn kind(&self) -> &MatchingKind {
        &self.kind
    }

    /// The LP optimum is not a unique vertex.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn certificate(&self) -> Option<&DualCertificate> {
        self.certificate.as_ref()
    }

    /// Distinct fractions in ascending order.
    pub fn fraction_set(&self) -> Vec<Rational> {
        let mut set = self.fractions.clone();
        set.sort();
        set.dedup();
        set
    }

    /// Smallest and largest fraction.
    pub fn span(&self) -> Option<(Rational, Rational)> {
        let set = self.fraction_set();
        Some((set.first()?.clone(), set.last()?.clone()))
    }

    pub fn check_feasible(&self, g: &Graph) -> Result<(), MatchingError> {
        if self.fractions.len() != g.edge_count() {
            return Err(MatchingError::LengthMismatch {
                found: self.fractions.len(),
                expected: g.edge_count(),
            });
        }
        for (e, m) in self.fractions.iter().enumerate() {
            if m.is_negative() || *m > Rational::one() {
                return Err(MatchingError::FractionOutOfRange { edge: e });
            }
        }
        for v in 0..g.vertex_count() {
            let load: Rational = g
                .incident(v)
                .iter()
                .fold(Rational::zero(), |acc, &e| acc + &self.fractions[e]);
            if load > Rational::one() {
                return Err(MatchingError::OverCapacity {
                    vertex: v,
                    load: rational::format(&load),
                });
            }
        }
        Ok(())
    }

    pub fn fractions_f64(&self) -> Vec<f64> {
        self.fractions.iter().map(rational::to_f64).collect()
    }
}

impl Serialize for FractionalMatching {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Fractions<'a>(&'a [Rational]);
        impl Serialize for Fractions<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (e, m) in self.0.iter().enumerate() {
                    map.serialize_entry(&e.to_string(), &rational::format(m))?;
                }
                map.end()
            }
        }
        let mut map = s.serialize_map(Some(5))?;
        map.serialize_entry("kind", &self.kind)?;
        map.serialize_entry("value", &rational::format(&self.value))?;
        map.serialize_entry("value_f64", &rational::to_f64(&self.value))?;
        map.serialize_entry("degenerate", &self.degenerate)?;
        map.serialize_entry("fractions", &Fractions(&self.fractions))?;
        map.end()
    }
}

fn weighted_value(g: &Graph, fractions: &[Rational]) -> Rational {
    g.edges()
        .iter()
        .zip(fractions)
        .fold(Rational::zero(), |acc, (e, m)| acc + &e.weight * m)
}

/// Maximum-weight fractional matching.
pub fn mwfm(g: &Graph) -> FractionalMatching {
    let mut fm = solve_boxed(g, &FractionBox::unit()).expect("the unit box is always feasible");
    fm.kind = MatchingKind::Mwfm;
    fm
}

/// Homogeneous matching `1/d` on a d-regular graph.
pub fn hfm(g: &Graph, d: usize) -> Result<FractionalMatching, MatchingError> {
    if d == 0 {
        return Err(MatchingError::InvalidInterval(
            "degree must be positive".into(),
        ));
    }
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) != d) {
        return Err(MatchingError::NotRegular {
            vertex: v,
            degree: g.degree(v),
            expected: d,
        });
    }
    let m = Rational::new(1.into(), d.into());
    Ok(FractionalMatching::assemble(
        g,
        vec![m; g.edge_count()],
        MatchingKind::Hfm { degree: d },
        false,
        None,
    ))
}

/// Quasi-homogeneous matching `m_e = 1/d_e`.
pub fn qhfm(g: &Graph) -> Result<FractionalMatching, MatchingError> {
    let profile = edge_degree_profile(g)?;
    let fractions = profile
        .degrees
        .iter()
        .map(|&d| Rational::new(1.into(), d.into()))
        .collect();
    Ok(FractionalMatching::assemble(
        g,
        fractions,
        MatchingKind::Qhfm,
        false,
        None,
    ))
}

/// Optimal fractional matching with every `m_e` confined to `fbox`.
pub fn constrained_fm(g: &Graph, fbox: &FractionBox) -> Result<FractionalMatching, MatchingError> {
    let mut fm = solve_boxed(g, fbox)?;
    fm.kind = MatchingKind::Constrained {
        lo: fbox.lo.clone(),
        hi: fbox.hi.clone(),
    };
    Ok(fm)
}

// Substituting y = m − lo turns the box LP into `max w·y` with
// `Σ_{e∋v} y_e ≤ 1 − deg(v)·lo` and `y_e ≤ hi − lo`, whose origin is feasible.
fn solve_boxed(g: &Graph, fbox: &FractionBox) -> Result<FractionalMatching, MatchingError> {
    let lo = &fbox.lo;
    let width = &fbox.hi - lo;
    let capacity: Vec<Rational> = (0..g.vertex_count())
        .map(|v| Rational::one() - Rational::from_integer(g.degree(v).into()) * lo)
        .collect();
    if let Some(v) = capacity.iter().position(|c| c.is_negative()) {
        return Err(MatchingError::InfeasibleBox {
            vertex: v,
            lo: rational::format(&fbox.lo),
            hi: rational::format(&fbox.hi),
            load: rational::format(&(Rational::one() - &capacity[v])),
        });
    }

    let mut rows: Vec<simplex::Row> = (0..g.vertex_count())
        .map(|v| simplex::Row {
            coefficients: g
                .incident(v)
                .iter()
                .map(|&e| (e, Rational::one()))
                .collect(),
            rhs: capacity[v].clone(),
        })
        .collect();
    // Box rows are only needed where the vertex rows do not already imply them.
    let mut box_rows: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        if width < capacity[e.u].clone().min(capacity[e.v].clone()) {
            box_rows.insert(id, rows.len());
            rows.push(simplex::Row {
                coefficients: vec![(id, Rational::one())],
                rhs: width.clone(),
            });
        }
    }
    let objective: Vec<Rational> = g.edges().iter().map(|e| e.weight.clone()).collect();
    let sol = simplex::maximize(&objective, &rows)?;

    let fractions: Vec<Rational> = sol.x.iter().map(|y| y + lo).collect();
    debug_assert_eq!(
        weighted_value(g, &fractions),
        &sol.objective + lo * g.total_weight()
    );
    let certificate = DualCertificate {
        vertex_prices: sol.duals[..g.vertex_count()].to_vec(),
        edge_prices: (0..g.edge_count())
            .map(|e| {
                box_rows
                    .get(&e)
                    .map_or_else(Rational::zero, |&r| sol.duals[r].clone())
            })
            .collect(),
    };
    Ok(FractionalMatching::assemble(
        g,
        fractions,
        MatchingKind::Supplied,
        sol.multiple_optima,
        Some(certificate),
    ))
}

/// Exact quality ratios of a matching against the maximum one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchingQuality {
    /// |FM'| / |FM|
    #[serde(with = "rational::as_string")]
    pub s: Rational,
    /// (w_G + |FM'|) / (w_G + |FM|)
    #[serde(with = "rational::as_string")]
    pub s_hat: Rational,
    #[serde(with = "rational::as_string")]
    pub mwfm_value: Rational,
}

pub fn quality(g: &Graph, fm: &FractionalMatching) -> Result<MatchingQuality, MatchingError> {
    fm.check_feasible(g)?;
    if g.edge_count() == 0 {
        return Err(GraphError::NoEdges.into());
    }
    let best = mwfm(g);
    quality_against(g, fm, best.value())
}

/// Same as [`quality`] with a precomputed MWFM value.
pub fn quality_against(
    g: &Graph,
    fm: &FractionalMatching,
    mwfm_value: &Rational,
) -> Result<MatchingQuality, MatchingError> {
    if mwfm_value.is_zero() {
        return Err(GraphError::NoEdges.into());
    }
    let w = g.total_weight();
    Ok(MatchingQuality {
        s: fm.value() / mwfm_value,
        s_hat: (&w + fm.value()) / (&w + mwfm_value),
        mwfm_value: mwfm_value.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::rational::{int, ratio};

    fn all(fm: &FractionalMatching, m: Rational) -> bool {
        fm.fractions().iter().all(|x| *x == m)
    }

    #[test]
    fn single_edge_is_fully_matched() {
        let g = Graph::unweighted(2, &[(0, 1)]).unwrap();
        let fm = mwfm(&g);
        assert_eq!(fm.fractions(), &[int(1)]);
        assert_eq!(*fm.value(), int(1));
        assert_eq!(qhfm(&g).unwrap().fractions(), &[int(1)]);
    }

    #[test]
    fn triangle_takes_halves() {
        let g = generators::cycle(3);
        let fm = mwfm(&g);
        assert_eq!(*fm.value(), ratio(3, 2));
        assert!(all(&fm, ratio(1, 2)));
        let cert = fm.certificate().unwrap();
        assert!(cert.certifies(&g, &FractionBox::unit(), fm.value()));
    }

    #[test]
    fn homogeneous_matchings() {
        let c5 = generators::cycle(5);
        let fm = hfm(&c5, 2).unwrap();
        assert!(all(&fm, ratio(1, 2)));
        assert_eq!(*fm.value(), ratio(5, 2));
        let k4 = generators::complete(4);
        assert_eq!(*hfm(&k4, 3).unwrap().value(), int(2));
        let p3 = generators::path(3);
        assert_eq!(
            hfm(&p3, 2).unwrap_err(),
            MatchingError::NotRegular {
                vertex: 0,
                degree: 1,
                expected: 2
            }
        );
    }

    #[test]
    fn box_pinned_at_one_over_d_recovers_hfm() {
        let g = generators::complete(4);
        let fbox = FractionBox::from_degrees(&int(3), &int(3)).unwrap();
        let fm = constrained_fm(&g, &fbox).unwrap();
        assert_eq!(fm.fractions(), hfm(&g, 3).unwrap().fractions());
    }

    #[test]
    fn infeasible_box_names_vertex() {
        let g = generators::star(5);
        let fbox = FractionBox::from_degrees(&int(1), &int(4)).unwrap();
        match constrained_fm(&g, &fbox).unwrap_err() {
            MatchingError::InfeasibleBox { vertex, load, .. } => {
                assert_eq!(vertex, 0);
                assert_eq!(load, "5/4");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn interval_validation() {
        assert!(FractionBox::new(ratio(1, 2), ratio(1, 3)).is_err());
        assert!(FractionBox::new(ratio(-1, 2), int(1)).is_err());
        assert!(FractionBox::from_degrees(&int(0), &int(3)).is_err());
        assert!(FractionBox::from_degrees(&int(4), &int(3)).is_err());
        // δ < 1 clips the upper end to 1.
        let b = FractionBox::from_degrees(&ratio(1, 2), &int(2)).unwrap();
        assert_eq!(*b.hi(), int(1));
    }

    #[test]
    fn quality_of_maximum_is_one() {
        let g = generators::complete_bipartite(2, 3);
        let q = quality(&g, &mwfm(&g)).unwrap();
        assert_eq!((q.s.clone(), q.s_hat.clone()), (int(1), int(1)));
    }

    #[test]
    fn supplied_fractions_are_validated() {
        let g = generators::path(3);
        assert!(FractionalMatching::from_fractions(&g, vec![ratio(1, 2), ratio(1, 2)]).is_ok());
        assert!(matches!(
            FractionalMatching::from_fractions(&g, vec![ratio(2, 3), ratio(1, 2)]),
            Err(MatchingError::OverCapacity { vertex: 1, .. })
        ));
        assert!(matches!(
            FractionalMatching::from_fractions(&g, vec![int(1)]),
            Err(MatchingError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn weighted_mwfm_prefers_heavy_edge() {
        let g = Graph::new(3, [(0, 1, int(1)), (1, 2, int(3))]).unwrap();
        let fm = mwfm(&g);
        assert_eq!(fm.fractions(), &[int(0), int(1)]);
        assert_eq!(*fm.value(), int(3));
    }

    #[test]
    fn json_export_uses_exact_strings() {
        let g = generators::cycle(3);
        let v = serde_json::to_value(mwfm(&g)).unwrap();
        assert_eq!(v["value"], "3/2");
        assert_eq!(v["fractions"]["2"], "1/2");
        assert_eq!(v["kind"]["type"], "mwfm");
    }
}
