//! Star discrepancy: exact values on desk-scale instances, δ-cover
//! enclosures, weighted and region-restricted variants, and expected
//! discrepancy over replications.
//!
//! The exact algorithm enumerates the critical grid spanned by the point
//! coordinates (plus 1.0 per axis) and evaluates closed and open box counts
//! at every corner, so the half-open supremum in the definition is attained.
//! Runtime is governed by an explicit grid-cell budget; instances past the
//! budget are refused, never silently approximated.

mod grid;
mod region;

pub use region::{restricted_discrepancy, ConvexRegion, Halfspace, VolumeEstimate};

use crate::rng::RngState;
use crate::sampler::{GeneratorSpec, Point};
use crate::stats;
use crate::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

const LBL_REPLICATION: u64 = 40;

/// Default ceiling on the number of corner-grid cells an exact or cover
/// evaluation may enumerate.
pub const DEFAULT_GRID_BUDGET: u128 = 100_000_000;

/// Largest dimension for which `2^d - 1` projections are enumerated.
pub const MAX_WEIGHTED_DIM: u32 = 12;

/// A star-discrepancy value tagged with what it means.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscrepancyEstimate {
    pub value: f64,
    pub kind: EstimateKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EstimateKind {
    /// The exact supremum.
    Exact,
    /// Lower edge of a cover interval: the exact value lies in
    /// `[value, value + delta]`.
    CoverInterval { delta: f64 },
    /// Sampled lower bound (restricted discrepancy); the oracle error of the
    /// maximizing box is reported.
    SampledLower { oracle_std_error: f64 },
}

impl DiscrepancyEstimate {
    /// Upper end of the enclosure this estimate certifies (equals `value`
    /// unless the estimate is a cover interval).
    pub fn upper(&self) -> f64 {
        match self.kind {
            EstimateKind::CoverInterval { delta } => self.value + delta,
            _ => self.value,
        }
    }
}

/// Volume of the anchored box `[0, x]`.
pub fn box_volume(x: &[f64]) -> f64 {
    debug_assert!(x.iter().all(|v| (0.0..=1.0).contains(v)));
    x.iter().product()
}

fn check_points(points: &[Point]) -> Result<usize> {
    let first = points.first().ok_or_else(|| invalid("empty point set"))?;
    let d = first.dim();
    if points.iter().any(|p| p.dim() != d) {
        return Err(invalid("points have mixed dimensions"));
    }
    Ok(d)
}

fn critical_axes(points: &[Point], d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|j| {
            let mut v: Vec<f64> = points.iter().map(|p| p.coords()[j]).collect();
            v.push(1.0);
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect()
}

fn grid_cells(axes: &[Vec<f64>]) -> u128 {
    axes.iter().map(|a| a.len() as u128).product()
}

/// Exact star discrepancy under the default grid budget.
pub fn star_discrepancy_exact(points: &[Point]) -> Result<DiscrepancyEstimate> {
    star_discrepancy_exact_budgeted(points, DEFAULT_GRID_BUDGET)
}

/// Exact star discrepancy; refuses instances whose critical grid exceeds
/// `max_cells`, reporting the budget that would be required.
pub fn star_discrepancy_exact_budgeted(
    points: &[Point],
    max_cells: u128,
) -> Result<DiscrepancyEstimate> {
    let d = check_points(points)?;
    let axes = critical_axes(points, d);
    let cells = grid_cells(&axes);
    if cells > max_cells {
        return Err(Error::BudgetExceeded {
            what: "exact star discrepancy critical grid",
            required: cells,
            budget: max_cells,
        });
    }
    Ok(DiscrepancyEstimate { value: grid::corner_max(points, &axes), kind: EstimateKind::Exact })
}

/// The uniform-grid δ-cover `{k/M : k = 1..M}^d` with `M = ceil(d/δ)`.
///
/// Not the minimal cover — its cardinality is reported for diagnostics and is
/// generally above the covering-number bound — but the cover property holds
/// by construction: componentwise grid brackets differ in volume by at most
/// `1 - (1 - 1/M)^d <= d/M <= δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaCover {
    d: u32,
    delta: f64,
    resolution: u64,
}

impl DeltaCover {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Grid resolution `M`.
    pub fn resolution(&self) -> u64 {
        self.resolution
    }

    /// Number of cover points, `M^d`.
    pub fn cardinality(&self) -> u128 {
        (self.resolution as u128).pow(self.d)
    }

    /// The per-axis values `k/M, k = 1..M` (the last is exactly 1.0).
    pub fn axis_values(&self) -> Vec<f64> {
        let m = self.resolution as f64;
        (1..=self.resolution).map(|k| k as f64 / m).collect()
    }

    /// Componentwise grid bracket `x <= y <= z` with `x` drawn from the
    /// cover plus the origin and `z` from the cover.
    pub fn bracket(&self, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.resolution as f64;
        let lo = y.iter().map(|&v| (v * m).floor() / m).collect();
        let hi = y.iter().map(|&v| (v * m).ceil() / m).collect();
        (lo, hi)
    }

    /// All cover points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let axis = self.axis_values();
        let d = self.d as usize;
        let total = self.cardinality();
        (0..total).map(move |mut flat| {
            let mut p = vec![0.0; d];
            for slot in p.iter_mut().rev() {
                *slot = axis[(flat % self.resolution as u128) as usize];
                flat /= self.resolution as u128;
            }
            p
        })
    }
}

/// Build the uniform-grid δ-cover, refusing cardinalities past the budget.
pub fn build_delta_cover(d: u32, delta: f64) -> Result<DeltaCover> {
    build_delta_cover_budgeted(d, delta, DEFAULT_GRID_BUDGET)
}

pub fn build_delta_cover_budgeted(d: u32, delta: f64, max_points: u128) -> Result<DeltaCover> {
    if d == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid(format!("delta {delta} outside (0, 1]")));
    }
    let resolution = ((d as f64 / delta).ceil() as u64).max(1);
    let cover = DeltaCover { d, delta, resolution };
    if cover.cardinality() > max_points {
        return Err(Error::BudgetExceeded {
            what: "delta cover grid",
            required: cover.cardinality(),
            budget: max_points,
        });
    }
    Ok(cover)
}

/// Cover-based enclosure: returns `D_Γ(P)` with the guarantee that the exact
/// discrepancy lies in `[D_Γ, D_Γ + δ]`.
pub fn star_discrepancy_cover(points: &[Point], delta: f64) -> Result<DiscrepancyEstimate> {
    let d = check_points(points)?;
    let cover = build_delta_cover(d as u32, delta)?;
    let axes = vec![cover.axis_values(); d];
    Ok(DiscrepancyEstimate {
        value: grid::corner_max(points, &axes),
        kind: EstimateKind::CoverInterval { delta },
    })
}

/// How to compute a star discrepancy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscrepancyMethod {
    Exact,
    Cover { delta: f64 },
}

pub fn star_discrepancy(points: &[Point], method: DiscrepancyMethod) -> Result<DiscrepancyEstimate> {
    match method {
        DiscrepancyMethod::Exact => star_discrepancy_exact(points),
        DiscrepancyMethod::Cover { delta } => star_discrepancy_cover(points, delta),
    }
}

/// Weights `γ_u` over nonempty coordinate subsets.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    /// `γ_u = prod_{j in u} γ_j`.
    Product(Vec<f64>),
    /// Explicit per-subset weights keyed by bitmask; missing subsets weigh 0.
    Explicit(std::collections::BTreeMap<u32, f64>),
}

impl WeightSpec {
    pub fn product(gammas: Vec<f64>) -> Result<Self> {
        if gammas.iter().any(|g| g.is_nan() || *g < 0.0) {
            return Err(invalid("weights must be nonnegative"));
        }
        Ok(WeightSpec::Product(gammas))
    }

    pub fn explicit(map: std::collections::BTreeMap<u32, f64>) -> Result<Self> {
        if map.values().any(|g| g.is_nan() || *g < 0.0) {
            return Err(invalid("weights must be nonnegative"));
        }
        if map.keys().any(|&mask| mask == 0) {
            return Err(invalid("explicit weights are keyed by nonempty subsets"));
        }
        Ok(WeightSpec::Explicit(map))
    }

    /// Weight of the subset encoded by `mask` (bit j = coordinate j).
    pub fn gamma(&self, mask: u32) -> f64 {
        match self {
            WeightSpec::Product(gs) => {
                let mut g = 1.0;
                for (j, gj) in gs.iter().enumerate() {
                    if mask & (1 << j) != 0 {
                        g *= gj;
                    }
                }
                g
            }
            WeightSpec::Explicit(map) => map.get(&mask).copied().unwrap_or(0.0),
        }
    }
}

/// Weighted star discrepancy: `max_{∅ != u ⊆ {1..d}} γ_u D*(P(u))` where
/// `P(u)` is the projection of `P` onto the coordinates in `u`.
pub fn weighted_star_discrepancy(
    points: &[Point],
    weights: &WeightSpec,
    method: DiscrepancyMethod,
) -> Result<f64> {
    let d = check_points(points)? as u32;
    if d > MAX_WEIGHTED_DIM {
        return Err(Error::BudgetExceeded {
            what: "weighted subset enumeration",
            required: 1u128 << d,
            budget: 1u128 << MAX_WEIGHTED_DIM,
        });
    }
    if let WeightSpec::Product(gs) = weights {
        if gs.len() != d as usize {
            return Err(Error::DimensionMismatch { expected: d as usize, actual: gs.len() });
        }
    }
    let mut best = 0.0f64;
    for mask in 1u32..(1 << d) {
        let gamma = weights.gamma(mask);
        if gamma == 0.0 {
            continue;
        }
        let axes: Vec<usize> = (0..d).filter(|j| mask & (1 << j) != 0).map(|j| j as usize).collect();
        let projected: Vec<Point> = points
            .iter()
            .map(|p| {
                Point::unchecked(axes.iter().map(|&j| p.coords()[j]).collect())
            })
            .collect();
        let est = star_discrepancy(&projected, method)?;
        best = best.max(gamma * est.value);
    }
    Ok(best)
}

/// The stream used for replication `rep` of `spec` under a master state:
/// labeled by (sampler id, N, replication), so enlarging an experiment never
/// perturbs existing replications.
pub fn replication_state(master: &RngState, spec: &GeneratorSpec, rep: u32) -> RngState {
    master.derive(&[LBL_REPLICATION, spec.id_code(), spec.n(), rep as u64])
}

/// Summary of replicated discrepancy values.
#[derive(Clone, Debug)]
pub struct ExpectedDiscrepancy {
    pub mean: f64,
    pub std: f64,
    /// Normal-approximation 95% interval for the mean.
    pub ci95: (f64, f64),
    /// Per-replication values, in replication order.
    pub values: Vec<f64>,
}

/// Run `replications` independent replications of `spec` and summarize the
/// chosen discrepancy. Deterministic in the master state.
pub fn expected_discrepancy(
    spec: &GeneratorSpec,
    replications: u32,
    master: &RngState,
    method: DiscrepancyMethod,
) -> Result<ExpectedDiscrepancy> {
    if replications == 0 {
        return Err(invalid("replications must be >= 1"));
    }
    let mut values = Vec::with_capacity(replications as usize);
    for rep in 0..replications {
        let state = replication_state(master, spec, rep);
        let set = spec.generate(&state)?;
        values.push(star_discrepancy(set.points(), method)?.value);
    }
    let (mean, std) = stats::mean_std(&values);
    let ci95 = stats::ci95(mean, std, values.len());
    Ok(ExpectedDiscrepancy { mean, std, ci95, values })
}
