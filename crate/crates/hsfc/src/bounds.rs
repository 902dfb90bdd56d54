//! Closed-form probabilistic bounds on the star discrepancy and the
//! quantities feeding them: the confidence constant `c(d,q)`, its
//! sample-size companion `A(d,q,N)`, the HSFC stratified-sampling bound,
//! two Monte Carlo bounds, the covering-number bound, and the weighted
//! variant assembled from per-subset evaluations.
//!
//! All evaluators accumulate in log space where growth in `d` could
//! overflow, and validate their domains. Bound values can exceed 1; since
//! the star discrepancy never does, reports carry both the raw value and
//! the value clamped at 1.

use crate::discrepancy::WeightSpec;
use crate::{invalid, Error, Result};

const LN_2E: f64 = core::f64::consts::LN_2 + 1.0;

fn check_dq(d: u32, q: f64) -> Result<()> {
    if d == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid(format!("confidence q = {q} outside (0,1)")));
    }
    Ok(())
}

/// `c(d,q) = ln( (2e)^d / (sqrt(2 pi d) (1-q)) )`, evaluated in log space.
pub fn c_dq(d: u32, q: f64) -> Result<f64> {
    check_dq(d, q)?;
    let d_f = d as f64;
    Ok(d_f * LN_2E - 0.5 * (2.0 * std::f64::consts::PI * d_f).ln() - (-q).ln_1p())
}

/// `A(d,q,N) = c(d,q) + d ln(N+1)`.
pub fn a_dqn(d: u32, q: f64, n: u64) -> Result<f64> {
    if n == 0 {
        // ln(0+1) = 0: the identity still holds, so allow N = 0 explicitly.
        return c_dq(d, q);
    }
    Ok(c_dq(d, q)? + d as f64 * ((n + 1) as f64).ln())
}

/// Probabilistic bound for HSFC stratified samples:
/// `6 d^{3/4} N^{-1/2 - 1/(2d)} sqrt(d ln(N+1) + c(d,q)) + 2 c(d,q) / (3N)`,
/// holding with probability at least `q`.
pub fn hsfc_bound(d: u32, q: f64, n: u64) -> Result<f64> {
    check_dq(d, q)?;
    if n == 0 {
        return Err(invalid("sample size must be >= 1"));
    }
    let c = c_dq(d, q)?;
    let d_f = d as f64;
    let n_f = n as f64;
    let exponent = -(0.5 + 0.5 / d_f);
    let main = 6.0 * d_f.powf(0.75) * n_f.powf(exponent) * (d_f * (n_f + 1.0).ln() + c).sqrt();
    Ok(main + 2.0 * c / (3.0 * n_f))
}

/// Monte Carlo bound `5.7 sqrt(4.9 - ln(1-q)/d) sqrt(d/N)`, holding with
/// probability at least `q`.
pub fn mc_bound_aistleitner(d: u32, q: f64, n: u64) -> Result<f64> {
    check_dq(d, q)?;
    if n == 0 {
        return Err(invalid("sample size must be >= 1"));
    }
    let d_f = d as f64;
    Ok(5.7 * (4.9 - (-q).ln_1p() / d_f).sqrt() * (d_f / n as f64).sqrt())
}

/// Monte Carlo bound `0.7729 sqrt(10.7042 - ln(1-q)/d) sqrt(d/N)`, holding
/// with probability at least `q`.
pub fn mc_bound_gnewuch(d: u32, q: f64, n: u64) -> Result<f64> {
    check_dq(d, q)?;
    if n == 0 {
        return Err(invalid("sample size must be >= 1"));
    }
    let d_f = d as f64;
    Ok(0.7729 * (10.7042 - (-q).ln_1p() / d_f).sqrt() * (d_f / n as f64).sqrt())
}

/// Covering-number bound `2^d e^d / sqrt(2 pi d) (1/δ + 1)^d` on the minimal
/// δ-cover cardinality.
pub fn cover_cardinality_bound(d: u32, delta: f64) -> Result<f64> {
    if d == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta {delta} outside (0,1)")));
    }
    let d_f = d as f64;
    let log = d_f * LN_2E - 0.5 * (2.0 * std::f64::consts::PI * d_f).ln()
        + d_f * (1.0 / delta + 1.0).ln();
    Ok(log.exp())
}

/// Koksma–Hlawka error bound `D* x V(f)`.
pub fn kh_error_bound(dstar: f64, variation: f64) -> f64 {
    debug_assert!(dstar >= 0.0 && variation >= 0.0);
    dstar * variation
}

/// Weighted bound: `max_{∅ != u} γ_u [hsfc_bound(|u|, q, N)]`.
pub fn weighted_bound_rhs(d: u32, q: f64, n: u64, weights: &WeightSpec) -> Result<f64> {
    check_dq(d, q)?;
    if d > crate::discrepancy::MAX_WEIGHTED_DIM {
        return Err(Error::BudgetExceeded {
            what: "weighted bound subset enumeration",
            required: 1u128 << d,
            budget: 1u128 << crate::discrepancy::MAX_WEIGHTED_DIM,
        });
    }
    if let WeightSpec::Product(gs) = weights {
        if gs.len() != d as usize {
            return Err(Error::DimensionMismatch { expected: d as usize, actual: gs.len() });
        }
    }
    // The bound only depends on |u|; cache per size.
    let per_size: Vec<f64> = (0..=d)
        .map(|size| if size == 0 { 0.0 } else { hsfc_bound(size, q, n).unwrap_or(f64::NAN) })
        .collect();
    let mut best = 0.0f64;
    for mask in 1u32..(1 << d) {
        let gamma = weights.gamma(mask);
        if gamma > 0.0 {
            best = best.max(gamma * per_size[mask.count_ones() as usize]);
        }
    }
    Ok(best)
}

/// Upper bound `2 sqrt(d+3) N^{-1/d}` on HSFC stratum diameters
/// (re-exported from the curve module for report assembly).
pub use crate::hilbert::diameter_bound;

/// Everything evaluated at one `(d, N, q)` query, for reporting.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub d: u32,
    pub n: u64,
    pub q: f64,
    pub c_dq: f64,
    pub a_dqn: f64,
    pub hsfc: f64,
    pub hsfc_clamped: f64,
    pub mc_aistleitner: f64,
    pub mc_aistleitner_clamped: f64,
    pub mc_gnewuch: f64,
    pub mc_gnewuch_clamped: f64,
    pub diameter: f64,
    /// `(δ, bound)` when a cover cardinality was requested.
    pub cover_cardinality: Option<(f64, f64)>,
}

impl BoundReport {
    pub fn evaluate(d: u32, n: u64, q: f64, delta: Option<f64>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("sample size must be >= 1"));
        }
        let hsfc = hsfc_bound(d, q, n)?;
        let aist = mc_bound_aistleitner(d, q, n)?;
        let gnew = mc_bound_gnewuch(d, q, n)?;
        let cover = match delta {
            Some(delta) => Some((delta, cover_cardinality_bound(d, delta)?)),
            None => None,
        };
        Ok(BoundReport {
            d,
            n,
            q,
            c_dq: c_dq(d, q)?,
            a_dqn: a_dqn(d, q, n)?,
            hsfc,
            hsfc_clamped: hsfc.min(1.0),
            mc_aistleitner: aist,
            mc_aistleitner_clamped: aist.min(1.0),
            mc_gnewuch: gnew,
            mc_gnewuch_clamped: gnew.min(1.0),
            diameter: diameter_bound(d, n),
            cover_cardinality: cover,
        })
    }
}
