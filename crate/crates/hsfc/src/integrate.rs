//! Built-in integrands with exact integrals and Hardy–Krause-style
//! variation, sample-mean estimation, and Koksma–Hlawka error-bound checks
//! (the plain inequality and the `2^d`-factor variant for integrands
//! restricted to a convex region).
//!
//! The variation functional is
//! `V(f) = sum_u 2^{d-|u|} ∫ |∂^{|u|} f / ∂x_u| dx`, with the sum running
//! over *all* subsets including the empty one (whose term is `2^d ∫ |f|`).
//! For the built-ins this has a closed form; for the simplex integrand the
//! integrals are taken over the simplex and evaluated by a quasi-Monte Carlo
//! oracle whose results (with seed and standard error) are cached in a
//! fixtures file shipped with the crate.

use crate::discrepancy::{star_discrepancy, ConvexRegion, DiscrepancyEstimate, DiscrepancyMethod};
use crate::quadrature;
use crate::rng::RngState;
use crate::sampler::Point;
use crate::stats;
use crate::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

/// Default per-shift sample count of the integral oracles (8 shifts, so the
/// total is ~10^6 evaluations).
pub const ORACLE_SAMPLES: u64 = 1 << 17;
pub const ORACLE_SHIFTS: u32 = 8;
const ORACLE_SEED: u64 = 0x5eed_0123;

/// A value from an exact formula (`std_error == 0`) or a quadrature oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: f64,
    pub std_error: f64,
}

impl OracleValue {
    fn exact(value: f64) -> Self {
        OracleValue { value, std_error: 0.0 }
    }
}

/// The built-in integrands.
#[derive(Clone, Debug, PartialEq)]
pub enum Integrand {
    /// `f(x) = prod_j x_j`: smooth, integral `2^-d`, variation `2^d`.
    ProductPoly { d: u32 },
    /// `f = 1_{[0,corner]}`: discontinuous indicator of an anchored box.
    IndicatorBox { corner: Vec<f64> },
    /// `f(x) = (1 - sum x_j) / prod x_j`, paired with the simplex
    /// `x_1 >= ... >= x_d >= eps`, `1 - sum x >= eps`; singular towards the
    /// coordinate hyperplanes, so it is only integrated against the simplex.
    SimplexF { d: u32, eps: f64 },
}

impl Integrand {
    /// The constant-one integrand, realized as the indicator of the full cube.
    pub fn one(d: u32) -> Self {
        Integrand::IndicatorBox { corner: vec![1.0; d as usize] }
    }

    pub fn dim(&self) -> u32 {
        match self {
            Integrand::ProductPoly { d } | Integrand::SimplexF { d, .. } => *d,
            Integrand::IndicatorBox { corner } => corner.len() as u32,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Integrand::ProductPoly { .. } => x.iter().product(),
            Integrand::IndicatorBox { corner } => {
                if x.iter().zip(corner).all(|(v, c)| v <= c) {
                    1.0
                } else {
                    0.0
                }
            }
            Integrand::SimplexF { .. } => {
                let s: f64 = x.iter().sum();
                let p: f64 = x.iter().product();
                (1.0 - s) / p
            }
        }
    }

    /// Exact integral for the closed-form integrands; for the simplex
    /// integrand, the oracle value of its defining integral over the simplex.
    pub fn exact_integral(&self) -> Result<OracleValue> {
        match self {
            Integrand::ProductPoly { d } => Ok(OracleValue::exact(2f64.powi(-(*d as i32)))),
            Integrand::IndicatorBox { corner } => {
                Ok(OracleValue::exact(corner.iter().product()))
            }
            Integrand::SimplexF { d, eps } => Ok(simplex_oracles(*d, *eps)?.integral),
        }
    }

    /// The variation `V(f)`.
    ///
    /// Closed forms: `2^d` for the product polynomial (every subset term
    /// contributes 1); `prod_j (2 a_j + [a_j < 1])` for the box indicator,
    /// reading the mixed distributional derivatives as jump masses (a jump on
    /// the far face of the cube carries no mass, so the constant-one
    /// integrand comes out at `2^d`). The simplex integrand uses the
    /// quadrature oracle over the simplex.
    pub fn variation(&self) -> Result<OracleValue> {
        match self {
            Integrand::ProductPoly { d } => Ok(OracleValue::exact(2f64.powi(*d as i32))),
            Integrand::IndicatorBox { corner } => {
                let v = corner
                    .iter()
                    .map(|&a| 2.0 * a + if a < 1.0 { 1.0 } else { 0.0 })
                    .product();
                Ok(OracleValue::exact(v))
            }
            Integrand::SimplexF { d, eps } => Ok(simplex_oracles(*d, *eps)?.variation),
        }
    }
}

/// `|∂^u f|` for the simplex integrand:
/// `(1 - sum_{j not in u} x_j) / (prod_{j in u} x_j^2 prod_{j not in u} x_j)`.
fn simplex_abs_partial(x: &[f64], mask: u32) -> f64 {
    let mut num = 1.0;
    let mut den = 1.0;
    for (j, &xj) in x.iter().enumerate() {
        if mask & (1 << j) != 0 {
            den *= xj * xj;
        } else {
            num -= xj;
            den *= xj;
        }
    }
    (num / den).abs()
}

#[derive(Clone, Copy, Debug)]
struct SimplexOracles {
    integral: OracleValue,
    variation: OracleValue,
}

/// Quadrature oracle for the simplex integrand: `∫_Σ f` and the variation
/// over `Σ`, both with standard errors. Deterministic in `seed`.
pub fn compute_simplex_oracles(
    d: u32,
    eps: f64,
    samples: u64,
    shifts: u32,
    seed: u64,
) -> Result<(OracleValue, OracleValue)> {
    if eps <= 0.0 {
        return Err(invalid("simplex eps must be positive"));
    }
    if d == 0 || d > 16 {
        return Err(invalid("simplex oracle supports 1 <= d <= 16"));
    }
    let region = ConvexRegion::simplex_eps(d, eps)?;
    let f = Integrand::SimplexF { d, eps };
    let rng = RngState::new(seed);
    let (iv, ise) = quadrature::mean_over_cube(d as usize, samples, shifts, &rng.derive(&[1]), |x| {
        if region.contains(x) {
            f.eval(x)
        } else {
            0.0
        }
    });
    let weights: Vec<f64> =
        (0..(1u32 << d)).map(|m| 2f64.powi(d as i32 - m.count_ones() as i32)).collect();
    let (vv, vse) = quadrature::mean_over_cube(d as usize, samples, shifts, &rng.derive(&[2]), |x| {
        if !region.contains(x) {
            return 0.0;
        }
        (0..(1u32 << d)).map(|m| weights[m as usize] * simplex_abs_partial(x, m)).sum()
    });
    Ok((
        OracleValue { value: iv, std_error: ise },
        OracleValue { value: vv, std_error: vse },
    ))
}

#[derive(Debug, Deserialize, Serialize)]
struct FixtureFile {
    schema: u32,
    entries: Vec<FixtureEntry>,
}

#[derive(Debug, Deserialize, Serialize)]
struct FixtureEntry {
    integrand: String,
    d: u32,
    eps: f64,
    kind: String,
    value: f64,
    std_error: f64,
    seed: u64,
    samples: u64,
    shifts: u32,
}

fn fixtures() -> &'static [FixtureEntry] {
    static FIXTURES: std::sync::OnceLock<Vec<FixtureEntry>> = std::sync::OnceLock::new();
    FIXTURES.get_or_init(|| {
        let raw = include_str!("../fixtures/oracle_integrals.json");
        let file: FixtureFile = serde_json::from_str(raw).expect("malformed oracle fixtures");
        assert_eq!(file.schema, 1, "unsupported fixture schema");
        file.entries
    })
}

fn fixture_lookup(d: u32, eps: f64, kind: &str) -> Option<OracleValue> {
    fixtures()
        .iter()
        .find(|e| e.integrand == "simplex_f" && e.d == d && e.eps == eps && e.kind == kind)
        .map(|e| OracleValue { value: e.value, std_error: e.std_error })
}

fn simplex_oracles(d: u32, eps: f64) -> Result<SimplexOracles> {
    if let (Some(integral), Some(variation)) =
        (fixture_lookup(d, eps, "integral"), fixture_lookup(d, eps, "variation"))
    {
        return Ok(SimplexOracles { integral, variation });
    }
    // Not cached: compute on the fly at the fixture budget (deterministic).
    let (integral, variation) =
        compute_simplex_oracles(d, eps, ORACLE_SAMPLES, ORACLE_SHIFTS, ORACLE_SEED)?;
    Ok(SimplexOracles { integral, variation })
}

fn check_dims(f: &Integrand, points: &[Point]) -> Result<()> {
    let first = points.first().ok_or_else(|| invalid("empty point set"))?;
    if first.dim() != f.dim() as usize {
        return Err(Error::DimensionMismatch {
            expected: f.dim() as usize,
            actual: first.dim(),
        });
    }
    Ok(())
}

/// Arithmetic mean of `f` over the points (compensated summation).
pub fn sample_mean(f: &Integrand, points: &[Point]) -> Result<f64> {
    check_dims(f, points)?;
    let sum = stats::kahan_sum(points.iter().map(|p| f.eval(p.coords())));
    Ok(sum / points.len() as f64)
}

/// `|integral - sample mean|`, carrying the oracle error when the integral
/// itself is an oracle value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorEstimate {
    pub error: f64,
    pub oracle_std_error: f64,
}

pub fn integration_error(f: &Integrand, points: &[Point]) -> Result<ErrorEstimate> {
    let integral = f.exact_integral()?;
    let mean = sample_mean(f, points)?;
    Ok(ErrorEstimate { error: (integral.value - mean).abs(), oracle_std_error: integral.std_error })
}

/// Result of a Koksma–Hlawka check.
#[derive(Clone, Copy, Debug)]
pub struct KhCheck {
    pub holds: bool,
    /// `bound - error` (raw, without the oracle slack applied to `holds`).
    pub margin: f64,
    pub bound: f64,
    pub error: f64,
}

/// Check `E_N(f) <= D* V(f)`, allowing three standard errors of oracle slack
/// where the integral or variation is itself an estimate.
pub fn kh_check(f: &Integrand, points: &[Point], dstar: &DiscrepancyEstimate) -> Result<KhCheck> {
    let err = integration_error(f, points)?;
    let variation = f.variation()?;
    let d_upper = dstar.upper();
    let bound = crate::bounds::kh_error_bound(d_upper, variation.value);
    let slack = 3.0 * (err.oracle_std_error + d_upper * variation.std_error);
    Ok(KhCheck {
        holds: err.error <= bound + slack,
        margin: bound - err.error,
        bound,
        error: err.error,
    })
}

/// An integrand restricted to a convex region (`f * 1_Ω`).
#[derive(Clone, Debug)]
pub struct RegionIntegrand {
    integrand: Integrand,
    region: ConvexRegion,
}

impl RegionIntegrand {
    pub fn new(integrand: Integrand, region: ConvexRegion) -> Result<Self> {
        if integrand.dim() != region.d() {
            return Err(Error::DimensionMismatch {
                expected: integrand.dim() as usize,
                actual: region.d() as usize,
            });
        }
        Ok(RegionIntegrand { integrand, region })
    }

    /// The canonical pairing: the simplex integrand on its own simplex.
    pub fn simplex(d: u32, eps: f64) -> Result<Self> {
        RegionIntegrand::new(
            Integrand::SimplexF { d, eps },
            ConvexRegion::simplex_eps(d, eps)?,
        )
    }

    pub fn integrand(&self) -> &Integrand {
        &self.integrand
    }

    pub fn region(&self) -> &ConvexRegion {
        &self.region
    }

    /// `∫_Ω f`, exact where the region is the full cube, else by oracle.
    fn integral_oracle(&self) -> Result<OracleValue> {
        match (&self.integrand, self.region.is_unit_cube()) {
            (_, true) => self.integrand.exact_integral(),
            (Integrand::SimplexF { d, eps }, false) => Ok(simplex_oracles(*d, *eps)?.integral),
            (Integrand::ProductPoly { d }, false) => {
                let region = self.region.clone();
                let f = self.integrand.clone();
                let rng = RngState::new(ORACLE_SEED).derive(&[3]);
                let (v, se) = quadrature::mean_over_cube(
                    *d as usize,
                    ORACLE_SAMPLES,
                    ORACLE_SHIFTS,
                    &rng,
                    |x| if region.contains(x) { f.eval(x) } else { 0.0 },
                );
                Ok(OracleValue { value: v, std_error: se })
            }
            (Integrand::IndicatorBox { .. }, false) => Err(invalid(
                "indicator integrands restricted to a proper subregion are not supported",
            )),
        }
    }

    /// `V(f)` with the subset integrals restricted to the region.
    fn variation_oracle(&self) -> Result<OracleValue> {
        match (&self.integrand, self.region.is_unit_cube()) {
            (_, true) => self.integrand.variation(),
            (Integrand::SimplexF { d, eps }, false) => Ok(simplex_oracles(*d, *eps)?.variation),
            (Integrand::ProductPoly { d }, false) => {
                let d = *d;
                let region = self.region.clone();
                let weights: Vec<f64> = (0..(1u32 << d))
                    .map(|m| 2f64.powi(d as i32 - m.count_ones() as i32))
                    .collect();
                let rng = RngState::new(ORACLE_SEED).derive(&[4]);
                let (v, se) = quadrature::mean_over_cube(
                    d as usize,
                    ORACLE_SAMPLES,
                    ORACLE_SHIFTS,
                    &rng,
                    |x| {
                        if !region.contains(x) {
                            return 0.0;
                        }
                        (0..(1u32 << d))
                            .map(|m| {
                                // |∂^u prod x| = prod_{j not in u} x_j.
                                let mut p = 1.0;
                                for (j, &xj) in x.iter().enumerate() {
                                    if m & (1 << j) == 0 {
                                        p *= xj;
                                    }
                                }
                                weights[m as usize] * p
                            })
                            .sum()
                    },
                );
                Ok(OracleValue { value: v, std_error: se })
            }
            (Integrand::IndicatorBox { .. }, false) => Err(invalid(
                "indicator integrands restricted to a proper subregion are not supported",
            )),
        }
    }
}

/// Result of estimating `∫_Ω f` by the restricted sample mean.
#[derive(Clone, Debug)]
pub struct RestrictedIntegration {
    /// `(1/N) sum f(x_i) 1_Ω(x_i)`.
    pub estimate: f64,
    /// Oracle value of `∫_Ω f`.
    pub oracle: OracleValue,
    /// `|estimate - oracle|`.
    pub error: f64,
    /// The variant bound `2^d D* V(f)`.
    pub kh_variant_bound: f64,
    /// Whether the variant inequality holds (with oracle slack).
    pub holds: bool,
    pub dstar: DiscrepancyEstimate,
    pub variation: OracleValue,
}

/// Estimate `∫_Ω f` from the points and verify the `2^d` Koksma–Hlawka
/// variant against the points' star discrepancy.
pub fn restricted_integrate(
    rf: &RegionIntegrand,
    points: &[Point],
    method: DiscrepancyMethod,
) -> Result<RestrictedIntegration> {
    check_dims(&rf.integrand, points)?;
    let d = rf.integrand.dim();
    let sum = stats::kahan_sum(points.iter().map(|p| {
        if rf.region.contains(p.coords()) {
            rf.integrand.eval(p.coords())
        } else {
            0.0
        }
    }));
    let estimate = sum / points.len() as f64;
    let oracle = rf.integral_oracle()?;
    let variation = rf.variation_oracle()?;
    let dstar = star_discrepancy(points, method)?;
    let scale = 2f64.powi(d as i32);
    let bound = scale * dstar.upper() * variation.value;
    let error = (estimate - oracle.value).abs();
    let slack = 3.0 * (oracle.std_error + scale * dstar.upper() * variation.std_error);
    Ok(RestrictedIntegration {
        estimate,
        oracle,
        error,
        kh_variant_bound: bound,
        holds: error <= bound + slack,
        dstar,
        variation,
    })
}
