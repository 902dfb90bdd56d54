//! Convex subregions of the cube and the restricted star discrepancy
//! estimator.

use crate::quadrature;
use crate::rng::RngState;
use crate::sampler::Point;
use crate::{invalid, Result};

use super::{DiscrepancyEstimate, EstimateKind};

const LBL_VOLUME: u64 = 21;
const LBL_BOX: u64 = 22;

/// A closed half-space `normal . x <= offset`.
#[derive(Clone, Debug)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug)]
enum RegionKind {
    UnitCube,
    /// `x_1 >= x_2 >= ... >= x_d >= eps` and `1 - sum x >= eps`.
    SimplexEps { eps: f64 },
    Halfspaces(Vec<Halfspace>),
}

/// A Borel convex subset of the unit cube with a deterministic membership
/// predicate and a quasi-Monte Carlo volume oracle.
#[derive(Clone, Debug)]
pub struct ConvexRegion {
    d: u32,
    kind: RegionKind,
    volume_samples: u64,
    volume_shifts: u32,
}

/// A volume (or integral) estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
}

impl ConvexRegion {
    pub fn unit_cube(d: u32) -> Self {
        ConvexRegion { d, kind: RegionKind::UnitCube, volume_samples: 4096, volume_shifts: 8 }
    }

    pub fn simplex_eps(d: u32, eps: f64) -> Result<Self> {
        if eps <= 0.0 {
            return Err(invalid("simplex eps must be positive"));
        }
        Ok(ConvexRegion {
            d,
            kind: RegionKind::SimplexEps { eps },
            volume_samples: 4096,
            volume_shifts: 8,
        })
    }

    pub fn from_halfspaces(d: u32, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if halfspaces.iter().any(|h| h.normal.len() != d as usize) {
            return Err(invalid("halfspace normal has wrong dimension"));
        }
        Ok(ConvexRegion {
            d,
            kind: RegionKind::Halfspaces(halfspaces),
            volume_samples: 4096,
            volume_shifts: 8,
        })
    }

    /// Set the per-shift sample budget of the volume oracle.
    pub fn with_volume_samples(mut self, samples: u64) -> Self {
        self.volume_samples = samples.max(16);
        self
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn is_unit_cube(&self) -> bool {
        matches!(self.kind, RegionKind::UnitCube)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.d as usize {
            return false;
        }
        match &self.kind {
            RegionKind::UnitCube => true,
            RegionKind::SimplexEps { eps } => {
                let mut prev = f64::INFINITY;
                let mut sum = 0.0;
                for &xi in x {
                    if xi > prev || xi < *eps {
                        return false;
                    }
                    prev = xi;
                    sum += xi;
                }
                1.0 - sum >= *eps
            }
            RegionKind::Halfspaces(hs) => hs.iter().all(|h| {
                h.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() <= h.offset
            }),
        }
    }

    /// Estimate `lambda(region ∩ [lo, hi])`. Exact (zero error) for the unit
    /// cube; otherwise shift-averaged QMC with a reported standard error.
    pub fn volume_in_box(&self, lo: &[f64], hi: &[f64], rng: &RngState) -> VolumeEstimate {
        debug_assert_eq!(lo.len(), self.d as usize);
        debug_assert_eq!(hi.len(), self.d as usize);
        let box_vol: f64 = lo.iter().zip(hi).map(|(a, b)| (b - a).max(0.0)).product();
        if box_vol == 0.0 {
            return VolumeEstimate { value: 0.0, std_error: 0.0 };
        }
        if matches!(self.kind, RegionKind::UnitCube) {
            return VolumeEstimate { value: box_vol, std_error: 0.0 };
        }
        let d = self.d as usize;
        let mut mapped = vec![0.0; d];
        let (frac, se) = quadrature::mean_over_cube(
            d,
            self.volume_samples,
            self.volume_shifts,
            &rng.derive(&[LBL_VOLUME]),
            |u| {
                for j in 0..d {
                    mapped[j] = lo[j] + (hi[j] - lo[j]) * u[j];
                }
                if self.contains(&mapped) {
                    1.0
                } else {
                    0.0
                }
            },
        );
        VolumeEstimate { value: box_vol * frac, std_error: box_vol * se }
    }
}

/// Axis-parallel box `[lo, hi]`.
#[derive(Clone, Debug)]
struct BoxAp {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxAp {
    fn anchored(hi: Vec<f64>) -> Self {
        BoxAp { lo: vec![0.0; hi.len()], hi }
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.lo.iter().zip(&self.hi).zip(x).all(|((a, b), v)| v >= a && v <= b)
    }
}

/// Sampled lower bound on the restricted star discrepancy
/// `2^d sup_A |count(Ω ∩ A)/N - λ(Ω ∩ A)|` over axis-parallel boxes `A`.
///
/// The box family consists of the anchored boxes at every point, the full
/// cube, and `box_budget` random boxes from per-index streams; enlarging the
/// budget never decreases the estimate. The returned value is a lower bound
/// on the true supremum up to the volume-oracle error, which is reported for
/// the maximizing box.
pub fn restricted_discrepancy(
    points: &[Point],
    region: &ConvexRegion,
    box_budget: u32,
    rng: &RngState,
) -> Result<DiscrepancyEstimate> {
    if points.is_empty() {
        return Err(invalid("restricted_discrepancy needs a nonempty point set"));
    }
    let d = region.d() as usize;
    if points[0].dim() != d {
        return Err(crate::Error::DimensionMismatch { expected: d, actual: points[0].dim() });
    }
    if d >= 30 {
        return Err(invalid("restricted_discrepancy supports d < 30"));
    }
    let n = points.len() as f64;

    let mut boxes: Vec<BoxAp> = Vec::with_capacity(points.len() + 1 + box_budget as usize);
    boxes.push(BoxAp::anchored(vec![1.0; d]));
    for p in points {
        boxes.push(BoxAp::anchored(p.coords().to_vec()));
    }
    for k in 0..box_budget {
        let mut stream = rng.derive(&[LBL_BOX, k as u64]).stream();
        let mut lo = vec![0.0; d];
        let mut hi = vec![0.0; d];
        for j in 0..d {
            let a: f64 = rand::Rng::gen(&mut stream);
            let b: f64 = rand::Rng::gen(&mut stream);
            lo[j] = a.min(b);
            hi[j] = a.max(b);
        }
        boxes.push(BoxAp { lo, hi });
    }

    let mut best = 0.0f64;
    let mut best_se = 0.0f64;
    for bx in &boxes {
        let count = points
            .iter()
            .filter(|p| bx.contains(p.coords()) && region.contains(p.coords()))
            .count() as f64;
        let vol = region.volume_in_box(&bx.lo, &bx.hi, rng);
        let score = (count / n - vol.value).abs();
        if score > best {
            best = score;
            best_se = vol.std_error;
        }
    }
    let scale = 2f64.powi(region.d() as i32);
    Ok(DiscrepancyEstimate {
        value: scale * best,
        kind: EstimateKind::SampledLower { oracle_std_error: scale * best_se },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_volume_is_exact() {
        let region = ConvexRegion::unit_cube(2);
        let v = region.volume_in_box(&[0.0, 0.0], &[0.5, 0.5], &RngState::new(1));
        assert_eq!(v, VolumeEstimate { value: 0.25, std_error: 0.0 });
    }

    #[test]
    fn simplex_membership() {
        let region = ConvexRegion::simplex_eps(2, 0.2).unwrap();
        assert!(region.contains(&[0.3, 0.25]));
        assert!(!region.contains(&[0.25, 0.3])); // violates ordering
        assert!(!region.contains(&[0.5, 0.4])); // violates 1 - sum >= eps
        assert!(!region.contains(&[0.3, 0.1])); // below eps
    }

    #[test]
    fn simplex_volume_matches_geometry() {
        // Triangle y in [0.2, 0.4], x in [y, 0.8 - y]: area 0.04.
        let region = ConvexRegion::simplex_eps(2, 0.2).unwrap().with_volume_samples(16384);
        let v = region.volume_in_box(&[0.0, 0.0], &[1.0, 1.0], &RngState::new(5));
        assert!((v.value - 0.04).abs() < 5e-3, "value {}", v.value);
        assert!(v.std_error < 5e-3);
    }

    #[test]
    fn critical_anchored_box_is_always_scored() {
        // Omega = unit square, single midpoint: the anchored box at the point
        // scores |1 - 0.25| = 0.75, scaled by 2^2.
        let points = vec![Point::new(vec![0.5, 0.5]).unwrap()];
        let region = ConvexRegion::unit_cube(2);
        let est = restricted_discrepancy(&points, &region, 0, &RngState::new(9)).unwrap();
        assert!(est.value >= 3.0 - 1e-12);
    }

    #[test]
    fn estimate_monotone_in_box_budget() {
        let rng = RngState::new(11);
        let points: Vec<Point> = crate::sampler::monte_carlo(2, 16, &rng)
            .unwrap()
            .points()
            .to_vec();
        let region = ConvexRegion::unit_cube(2);
        let mut prev = 0.0;
        for budget in [0u32, 8, 32, 128] {
            let est = restricted_discrepancy(&points, &region, budget, &rng).unwrap();
            assert!(est.value >= prev - 1e-15, "budget {budget}");
            prev = est.value;
        }
    }

    #[test]
    fn estimate_invariant_to_point_order() {
        let rng = RngState::new(21);
        let mut points: Vec<Point> =
            crate::sampler::monte_carlo(2, 12, &rng).unwrap().points().to_vec();
        let region = ConvexRegion::simplex_eps(2, 0.2).unwrap();
        let a = restricted_discrepancy(&points, &region, 16, &rng).unwrap();
        points.reverse();
        points.swap(0, 5);
        let b = restricted_discrepancy(&points, &region, 16, &rng).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn empty_region_intersection_scores_zero_on_contained_boxes() {
        // Omega =  thin simplex far from the points: no point inside, boxes
        // away from it have ~zero measure, so the anchored-at-point boxes
        // score ~0 but the full cube still scores lambda(Omega).
        let region = ConvexRegion::simplex_eps(2, 0.2).unwrap();
        let points = vec![Point::new(vec![0.05, 0.9]).unwrap()];
        let est = restricted_discrepancy(&points, &region, 0, &RngState::new(13)).unwrap();
        // Full-cube box: |0 - 0.04| * 4 = 0.16 up to oracle error.
        assert!((est.value - 0.16).abs() < 0.05);
    }
}
