//! Point-set generators for the unit cube.
//!
//! * [`hsfc_stratified`] — one point per length-`1/N` parameter stratum,
//!   pushed through the Hilbert curve map; the stratum offsets come either
//!   from Owen-scrambled van der Corput points or from direct jitter
//!   (the two laws coincide, see [`hsfc_stratum_offsets`]).
//! * [`monte_carlo`] — i.i.d. uniform points.
//! * [`jittered`] — one uniform point per cell of an `m^d` axis-aligned grid.
//! * [`latin_hypercube`] — one point per bin in every 1-d projection.
//! * [`theta_partition_sample`] — a grid partition whose two top-right cells
//!   are merged into a rectangle and re-split by a line through its center at
//!   angle θ; one uniform point per cell.
//!
//! All generators are pure functions of their spec and an [`RngState`].

use crate::hilbert;
use crate::rng::RngState;
use crate::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

const LBL_OFFSETS: u64 = 1;
const LBL_RESIDUAL: u64 = 2;
const LBL_PLACEMENT: u64 = 3;
const LBL_POINTS: u64 = 4;
const LBL_PERMS: u64 = 5;
const LBL_HALVES: u64 = 6;

/// Largest base accepted by the digit scrambler (permutations are drawn by
/// Fisher–Yates over `base` elements, so huge bases are refused).
pub const MAX_SCRAMBLE_BASE: u32 = 4096;

const MAX_REJECTION_ATTEMPTS: u32 = 10_000;

/// A point of the closed unit cube.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("point must have dimension >= 1"));
        }
        if let Some(bad) = coords.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(invalid(format!("coordinate {bad} outside [0,1]")));
        }
        Ok(Point { coords })
    }

    pub(crate) fn unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| (0.0..=1.0).contains(c)));
        Point { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

/// Which family produced a sample set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorId {
    Hsfc,
    Mc,
    Jittered,
    Lhs,
    Theta,
}

impl std::fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GeneratorId::Hsfc => "hsfc",
            GeneratorId::Mc => "mc",
            GeneratorId::Jittered => "jittered",
            GeneratorId::Lhs => "lhs",
            GeneratorId::Theta => "theta",
        };
        f.write_str(s)
    }
}

/// Which partition cell a stratified point came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stratum {
    /// Parameter interval `I_i = [i/count, (i+1)/count)` (0-based).
    UnitInterval { index: u64, count: u64 },
    /// Axis-aligned grid cell of an `m^d` partition.
    GridCell { coords: Vec<u64>, resolution: u32 },
    /// Cell of a θ-partition.
    Theta(ThetaCell),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaCell {
    HalfA,
    HalfB,
    Square { col: u32, row: u32 },
}

/// A generated point set together with its provenance.
#[derive(Clone, Debug)]
pub struct SampleSet {
    d: u32,
    points: Vec<Point>,
    generator: GeneratorId,
    seed: u64,
    strata: Option<Vec<Stratum>>,
}

impl SampleSet {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn generator(&self) -> GeneratorId {
        self.generator
    }

    /// Key of the stream that produced this set.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Per-point stratum descriptors, present for stratified generators.
    pub fn strata(&self) -> Option<&[Stratum]> {
        self.strata.as_deref()
    }
}

/// Radical inverse of `i - 1` in base `b`: the i-th van der Corput point.
pub fn van_der_corput(i: u64, base: u32) -> f64 {
    assert!(i >= 1 && base >= 2, "van_der_corput requires i >= 1, base >= 2");
    let b = base as u64;
    let mut n = i - 1;
    let mut inv = 0.0;
    let mut scale = 1.0 / base as f64;
    while n > 0 {
        inv += (n % b) as f64 * scale;
        n /= b;
        scale /= base as f64;
    }
    inv
}

/// First `len` base-`b` fraction digits of the van der Corput point `a_i`
/// (most significant first). Digits beyond the expansion of `i - 1` are 0.
pub fn vdc_digits(i: u64, base: u32, len: usize) -> Vec<u32> {
    assert!(i >= 1 && base >= 2);
    let b = base as u64;
    let mut n = i - 1;
    let mut digits = Vec::with_capacity(len);
    for _ in 0..len {
        digits.push((n % b) as u32);
        n /= b;
    }
    digits
}

/// Source of the digit permutations used by Owen scrambling.
///
/// `scramble` replaces `digits[j]` by `π_prefix(digits[j])` where the
/// permutation applied at position `j` is keyed by the *original* digits
/// before position `j`; expansions sharing an original prefix therefore see
/// the same permutations.
pub trait PermutationSource {
    fn scramble(&self, base: u32, digits: &mut [u32]);
}

/// Nested uniform scrambling: one independent uniformly random permutation
/// per digit prefix, drawn lazily from a keyed stream (the permutation tree
/// is never materialized).
pub struct NestedUniformScrambling {
    state: RngState,
}

impl NestedUniformScrambling {
    pub fn new(state: RngState) -> Self {
        NestedUniformScrambling { state: state.derive_word(LBL_PERMS) }
    }
}

impl PermutationSource for NestedUniformScrambling {
    fn scramble(&self, base: u32, digits: &mut [u32]) {
        let mut perm = vec![0u32; base as usize];
        let mut key = self.state;
        for digit in digits.iter_mut() {
            key.permutation_into(&mut perm);
            let original = *digit;
            *digit = perm[original as usize];
            key = key.derive_word(original as u64);
        }
    }
}

/// Leaves every digit unchanged; useful as a baseline and in tests.
pub struct IdentityScrambling;

impl PermutationSource for IdentityScrambling {
    fn scramble(&self, _base: u32, _digits: &mut [u32]) {}
}

/// Owen-scramble base-`b` digit expansions and return them as reals.
///
/// Each expansion is padded (with zero digits) or truncated to `digit_depth`
/// digits, scrambled, and completed by one uniform residual in
/// `[0, b^{-digit_depth})` so the output is a continuous value in `[0,1)`.
pub fn scramble_owen(
    expansions: &[Vec<u32>],
    base: u32,
    digit_depth: usize,
    perms: &impl PermutationSource,
    rng: &RngState,
) -> Result<Vec<f64>> {
    if base < 2 {
        return Err(invalid("scramble base must be >= 2"));
    }
    if base > MAX_SCRAMBLE_BASE {
        return Err(invalid(format!("scramble base {base} exceeds {MAX_SCRAMBLE_BASE}")));
    }
    if digit_depth == 0 {
        return Err(invalid("digit depth must be >= 1"));
    }
    let mut residuals = rng.derive(&[LBL_RESIDUAL]).stream();
    let mut out = Vec::with_capacity(expansions.len());
    let mut digits = vec![0u32; digit_depth];
    for expansion in expansions {
        if let Some(bad) = expansion.iter().find(|&&v| v >= base) {
            return Err(invalid(format!("digit {bad} not valid in base {base}")));
        }
        digits.fill(0);
        let take = expansion.len().min(digit_depth);
        digits[..take].copy_from_slice(&expansion[..take]);
        perms.scramble(base, &mut digits);
        let residual: f64 = rand::Rng::gen(&mut residuals);
        let mut value = residual;
        for &dg in digits.iter().rev() {
            value = (dg as f64 + value) / base as f64;
        }
        out.push(value);
    }
    Ok(out)
}

/// How the per-stratum offsets of the HSFC sampler are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HsfcMode {
    /// Owen-scramble the first `N` base-`2^d` van der Corput points and
    /// reorder them so `x_i` lies in `I_i`.
    #[default]
    ScrambledVdc,
    /// `x_i = (i + U_i)/N` with independent uniforms; same law.
    DirectOffset,
}

/// Per-stratum offsets `u_i`, with `x_i = (i + u_i)/N` and `N = 2^{d m}`.
///
/// Offsets are indexed by stratum: position `i` of the result is the offset
/// of the point whose parameter lies in `I_i = [i/N, (i+1)/N)`. Both modes
/// make each `u_i` uniform on `[0,1)`.
pub fn hsfc_stratum_offsets(d: u32, m: u32, mode: HsfcMode, rng: &RngState) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    let bits = d.saturating_mul(m);
    if bits > hilbert::MAX_INDEX_BITS {
        return Err(Error::PrecisionExceeded { required: bits, max: hilbert::MAX_INDEX_BITS });
    }
    let n = 1u64 << bits;
    match mode {
        HsfcMode::DirectOffset => {
            let mut stream = rng.derive(&[LBL_OFFSETS]).stream();
            Ok((0..n).map(|_| rand::Rng::gen::<f64>(&mut stream)).collect())
        }
        HsfcMode::ScrambledVdc => {
            if d >= 31 || (1u32 << d) > MAX_SCRAMBLE_BASE {
                return Err(invalid(format!(
                    "scrambled van der Corput mode supports bases up to {MAX_SCRAMBLE_BASE} (d too large)"
                )));
            }
            let base = 1u32 << d;
            // m digits locate the stratum; 52 further bits of offset resolution.
            let extra = 52u32.div_ceil(d);
            let depth = (m + extra) as usize;
            let perms = NestedUniformScrambling::new(*rng);
            let mut residuals = rng.derive(&[LBL_RESIDUAL]).stream();
            let mut offsets = vec![f64::NAN; n as usize];
            let mut digits = vec![0u32; depth];
            for i in 1..=n {
                let expansion = vdc_digits(i, base, depth);
                digits.copy_from_slice(&expansion);
                perms.scramble(base, &mut digits);
                // Stratum id from the leading m digits (exact integers).
                let mut stratum = 0u64;
                for &dg in digits.iter().take(m as usize) {
                    stratum = (stratum << d) | dg as u64;
                }
                let residual: f64 = rand::Rng::gen(&mut residuals);
                let mut u = residual;
                for j in (m as usize..depth).rev() {
                    u = (digits[j] as f64 + u) / base as f64;
                }
                debug_assert!(offsets[stratum as usize].is_nan(), "stratum hit twice");
                offsets[stratum as usize] = u;
            }
            Ok(offsets)
        }
    }
}

/// HSFC stratified sample: `N = 2^{d m}` points, one uniform point in each
/// Hilbert cell `E_i = H(I_i)`.
pub fn hsfc_stratified(d: u32, m: u32, mode: HsfcMode, rng: &RngState) -> Result<SampleSet> {
    let offsets = hsfc_stratum_offsets(d, m, mode, rng)?;
    let n = offsets.len() as u64;
    let level = hilbert::max_level(d);
    let sub_bits = d * (level - m);
    let sub_cells = 1u64 << sub_bits;
    let mut placement = rng.derive(&[LBL_PLACEMENT]).stream();
    let mut points = Vec::with_capacity(offsets.len());
    let mut strata = Vec::with_capacity(offsets.len());
    for (i, &u) in offsets.iter().enumerate() {
        // Deepest-cell index of x_i = (i + u)/N, computed exactly: the level-m
        // prefix is the stratum, the remaining bits come from the offset.
        let sub = ((u * sub_cells as f64) as u64).min(sub_cells - 1);
        let deep = ((i as u64) << sub_bits) | sub;
        let cell = hilbert::decode(hilbert::HilbertIndex::new(d, level, deep)?);
        let jitter: Vec<f64> = (0..d).map(|_| rand::Rng::gen::<f64>(&mut placement)).collect();
        points.push(Point::unchecked(hilbert::place_in_cell(&cell, &jitter)));
        strata.push(Stratum::UnitInterval { index: i as u64, count: n });
    }
    Ok(SampleSet {
        d,
        points,
        generator: GeneratorId::Hsfc,
        seed: rng.key(),
        strata: Some(strata),
    })
}

/// `n` i.i.d. uniform points.
pub fn monte_carlo(d: u32, n: u64, rng: &RngState) -> Result<SampleSet> {
    if d == 0 || n == 0 {
        return Err(invalid("monte_carlo requires d >= 1 and n >= 1"));
    }
    let mut stream = rng.derive(&[LBL_POINTS]).stream();
    let points = (0..n)
        .map(|_| Point::unchecked((0..d).map(|_| rand::Rng::gen::<f64>(&mut stream)).collect()))
        .collect();
    Ok(SampleSet { d, points, generator: GeneratorId::Mc, seed: rng.key(), strata: None })
}

/// One uniform point per cell of the `m^d` grid.
pub fn jittered(d: u32, m: u32, rng: &RngState) -> Result<SampleSet> {
    if d == 0 || m == 0 {
        return Err(invalid("jittered requires d >= 1 and m >= 1"));
    }
    let n = (m as u64)
        .checked_pow(d)
        .filter(|&n| n <= 1 << 32)
        .ok_or_else(|| invalid(format!("jittered grid {m}^{d} is too large")))?;
    let mut stream = rng.derive(&[LBL_POINTS]).stream();
    let mut points = Vec::with_capacity(n as usize);
    let mut strata = Vec::with_capacity(n as usize);
    for flat in 0..n {
        let mut rest = flat;
        let mut coords = vec![0u64; d as usize];
        for c in coords.iter_mut().rev() {
            *c = rest % m as u64;
            rest /= m as u64;
        }
        let point: Vec<f64> = coords
            .iter()
            .map(|&c| (c as f64 + rand::Rng::gen::<f64>(&mut stream)) / m as f64)
            .collect();
        points.push(Point::unchecked(point));
        strata.push(Stratum::GridCell { coords, resolution: m });
    }
    Ok(SampleSet { d, points, generator: GeneratorId::Jittered, seed: rng.key(), strata: Some(strata) })
}

/// Latin hypercube: every 1-d projection has exactly one point per bin
/// `[j/n, (j+1)/n)`, bins permuted independently per axis.
pub fn latin_hypercube(d: u32, n: u64, rng: &RngState) -> Result<SampleSet> {
    if d == 0 || n == 0 {
        return Err(invalid("latin_hypercube requires d >= 1 and n >= 1"));
    }
    if n > 1 << 32 {
        return Err(invalid("latin_hypercube size too large"));
    }
    let mut bins: Vec<Vec<u32>> = Vec::with_capacity(d as usize);
    for axis in 0..d {
        let mut perm = vec![0u32; n as usize];
        rng.derive(&[LBL_PERMS, axis as u64]).permutation_into(&mut perm);
        bins.push(perm);
    }
    let mut stream = rng.derive(&[LBL_POINTS]).stream();
    let points = (0..n as usize)
        .map(|i| {
            Point::unchecked(
                (0..d as usize)
                    .map(|j| (bins[j][i] as f64 + rand::Rng::gen::<f64>(&mut stream)) / n as f64)
                    .collect(),
            )
        })
        .collect();
    Ok(SampleSet { d, points, generator: GeneratorId::Lhs, seed: rng.key(), strata: None })
}

/// The two-dimensional equivolume partition obtained from the `m x m` grid by
/// merging the two top-right cells into the rectangle
/// `I = [a1, a1+2b] x [a2, a2+b]` (`a1 = (m-2)/m`, `a2 = (m-1)/m`, `b = 1/m`)
/// and splitting `I` by the line through its center at angle `theta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaPartitionSpec {
    m: u32,
    theta: f64,
}

impl ThetaPartitionSpec {
    pub fn new(m: u32, theta: f64) -> Result<Self> {
        if m < 2 {
            return Err(invalid("theta partition requires m >= 2"));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(invalid(format!("theta {theta} outside [0, pi/2]")));
        }
        Ok(ThetaPartitionSpec { m, theta })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn n(&self) -> u64 {
        (self.m as u64) * (self.m as u64)
    }

    fn b(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Lower corner of the merged rectangle.
    fn rect_lo(&self) -> (f64, f64) {
        let m = self.m as f64;
        ((m - 2.0) / m, (m - 1.0) / m)
    }

    fn center(&self) -> (f64, f64) {
        let (x0, y0) = self.rect_lo();
        (x0 + self.b(), y0 + self.b() / 2.0)
    }

    /// Split direction, with exact snapping of the axis-aligned cases.
    fn direction(&self) -> (f64, f64) {
        let (mut s, mut c) = self.theta.sin_cos();
        if s.abs() < 1e-15 {
            s = 0.0;
        }
        if c.abs() < 1e-15 {
            c = 0.0;
        }
        (c, s)
    }

    /// True if `p` lies in half A (the non-negative side of the split line).
    pub fn in_half_a(&self, p: (f64, f64)) -> bool {
        let (cx, cy) = self.center();
        let (dx, dy) = self.direction();
        dx * (p.1 - cy) - dy * (p.0 - cx) >= 0.0
    }

    /// True if `p` lies inside the merged rectangle.
    pub fn in_rect(&self, p: (f64, f64)) -> bool {
        let (x0, y0) = self.rect_lo();
        p.0 >= x0 && p.0 < x0 + 2.0 * self.b() && p.1 >= y0 && p.1 < y0 + self.b()
    }

    fn merged_cols(&self) -> (u32, u32) {
        (self.m - 2, self.m - 1)
    }
}

/// One uniform point per cell of the θ-partition: the two halves of the
/// merged rectangle first, then the unmerged grid squares in row-major
/// order. Every cell has volume `1/m^2` (a chord through a rectangle's
/// center bisects its area).
pub fn theta_partition_sample(spec: &ThetaPartitionSpec, rng: &RngState) -> Result<SampleSet> {
    let m = spec.m;
    let b = spec.b();
    let (x0, y0) = spec.rect_lo();
    let mut points = Vec::with_capacity(spec.n() as usize);
    let mut strata = Vec::with_capacity(spec.n() as usize);

    // Rejection from the merged rectangle into each half: acceptance is
    // exactly 1/2 per draw.
    for (which, want_a) in [(ThetaCell::HalfA, true), (ThetaCell::HalfB, false)] {
        let mut stream = rng.derive(&[LBL_HALVES, want_a as u64]).stream();
        let mut accepted = None;
        for _ in 0..MAX_REJECTION_ATTEMPTS {
            let px = x0 + 2.0 * b * rand::Rng::gen::<f64>(&mut stream);
            let py = y0 + b * rand::Rng::gen::<f64>(&mut stream);
            if spec.in_half_a((px, py)) == want_a {
                accepted = Some((px, py));
                break;
            }
        }
        let (px, py) =
            accepted.ok_or(Error::RejectionBudget { attempts: MAX_REJECTION_ATTEMPTS })?;
        points.push(Point::unchecked(vec![px, py]));
        strata.push(Stratum::Theta(which));
    }

    let (mc0, mc1) = spec.merged_cols();
    let mut stream = rng.derive(&[LBL_POINTS]).stream();
    for row in 0..m {
        for col in 0..m {
            if row == m - 1 && (col == mc0 || col == mc1) {
                continue;
            }
            let px = (col as f64 + rand::Rng::gen::<f64>(&mut stream)) * b;
            let py = (row as f64 + rand::Rng::gen::<f64>(&mut stream)) * b;
            points.push(Point::unchecked(vec![px, py]));
            strata.push(Stratum::Theta(ThetaCell::Square { col, row }));
        }
    }

    Ok(SampleSet {
        d: 2,
        points,
        generator: GeneratorId::Theta,
        seed: rng.key(),
        strata: Some(strata),
    })
}

/// A fully-parameterized generator, the unit of replication in experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Hsfc {
        d: u32,
        m: u32,
        #[serde(default)]
        mode: HsfcMode,
    },
    Mc {
        d: u32,
        n: u64,
    },
    Jittered {
        d: u32,
        m: u32,
    },
    Lhs {
        d: u32,
        n: u64,
    },
    Theta {
        m: u32,
        theta: f64,
    },
}

impl GeneratorSpec {
    pub fn d(&self) -> u32 {
        match *self {
            GeneratorSpec::Hsfc { d, .. }
            | GeneratorSpec::Mc { d, .. }
            | GeneratorSpec::Jittered { d, .. }
            | GeneratorSpec::Lhs { d, .. } => d,
            GeneratorSpec::Theta { .. } => 2,
        }
    }

    pub fn n(&self) -> u64 {
        match *self {
            GeneratorSpec::Hsfc { d, m, .. } => 1u64 << (d as u64 * m as u64).min(63),
            GeneratorSpec::Mc { n, .. } | GeneratorSpec::Lhs { n, .. } => n,
            GeneratorSpec::Jittered { d, m } => (m as u64).pow(d),
            GeneratorSpec::Theta { m, .. } => (m as u64) * (m as u64),
        }
    }

    pub fn id(&self) -> GeneratorId {
        match self {
            GeneratorSpec::Hsfc { .. } => GeneratorId::Hsfc,
            GeneratorSpec::Mc { .. } => GeneratorId::Mc,
            GeneratorSpec::Jittered { .. } => GeneratorId::Jittered,
            GeneratorSpec::Lhs { .. } => GeneratorId::Lhs,
            GeneratorSpec::Theta { .. } => GeneratorId::Theta,
        }
    }

    /// Stable code used in stream labels.
    pub fn id_code(&self) -> u64 {
        match self {
            GeneratorSpec::Hsfc { .. } => 1,
            GeneratorSpec::Mc { .. } => 2,
            GeneratorSpec::Jittered { .. } => 3,
            GeneratorSpec::Lhs { .. } => 4,
            GeneratorSpec::Theta { .. } => 5,
        }
    }

    pub fn generate(&self, rng: &RngState) -> Result<SampleSet> {
        match *self {
            GeneratorSpec::Hsfc { d, m, mode } => hsfc_stratified(d, m, mode, rng),
            GeneratorSpec::Mc { d, n } => monte_carlo(d, n, rng),
            GeneratorSpec::Jittered { d, m } => jittered(d, m, rng),
            GeneratorSpec::Lhs { d, n } => latin_hypercube(d, n, rng),
            GeneratorSpec::Theta { m, theta } => {
                theta_partition_sample(&ThetaPartitionSpec::new(m, theta)?, rng)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{decode, HilbertIndex};

    fn rng(seed: u64) -> RngState {
        RngState::new(seed)
    }

    #[test]
    fn van_der_corput_known_values() {
        assert_eq!(van_der_corput(1, 2), 0.0);
        assert_eq!(van_der_corput(3, 2), 0.25);
        assert!((van_der_corput(2, 3) - 1.0 / 3.0).abs() < 1e-15);
        // First eight base-2 points.
        let expect = [0.0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(van_der_corput(i as u64 + 1, 2), *e);
        }
    }

    #[test]
    fn identity_scramble_reproduces_input() {
        let expansions: Vec<Vec<u32>> = (1..=8).map(|i| vdc_digits(i, 2, 20)).collect();
        let out = scramble_owen(&expansions, 2, 20, &IdentityScrambling, &rng(1)).unwrap();
        for (i, v) in out.iter().enumerate() {
            let expect = van_der_corput(i as u64 + 1, 2);
            // Residual only perturbs below 2^-20.
            assert!((v - expect) >= 0.0 && (v - expect) < 2f64.powi(-20));
        }
    }

    /// Reverses every digit: for base 2 this is the swap permutation at
    /// every node of the scrambling tree.
    struct ReverseScrambling;
    impl PermutationSource for ReverseScrambling {
        fn scramble(&self, base: u32, digits: &mut [u32]) {
            for d in digits.iter_mut() {
                *d = base - 1 - *d;
            }
        }
    }

    #[test]
    fn forced_swap_scramble_hand_value() {
        // Input 0.00 in base 2, swaps at both levels, J = 2: output 0.11 = 0.75.
        let out = scramble_owen(&[vec![0, 0]], 2, 2, &ReverseScrambling, &rng(3)).unwrap();
        assert!(out[0] >= 0.75 && out[0] < 0.75 + 0.25);
    }

    #[test]
    fn scramble_outputs_stay_in_unit_interval() {
        let expansions: Vec<Vec<u32>> = (1..=64).map(|i| vdc_digits(i, 4, 10)).collect();
        let scr = NestedUniformScrambling::new(rng(7));
        let out = scramble_owen(&expansions, 4, 10, &scr, &rng(7)).unwrap();
        assert!(out.iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn scramble_shares_permutations_across_common_prefixes() {
        let scr = NestedUniformScrambling::new(rng(11));
        // All first digits pass through one permutation keyed by the empty
        // prefix, so their images form a permutation of 0..4.
        let mut firsts: Vec<u32> = (0..4)
            .map(|v| {
                let mut ds = vec![v, 0];
                scr.scramble(4, &mut ds);
                ds[0]
            })
            .collect();
        firsts.sort_unstable();
        assert_eq!(firsts, vec![0, 1, 2, 3]);
        // Equal original prefix (2): same permutation at position 1, so equal
        // inputs map equal and distinct inputs map distinct.
        let (mut a, mut b, mut c) = (vec![2, 3], vec![2, 3], vec![2, 0]);
        scr.scramble(4, &mut a);
        scr.scramble(4, &mut b);
        scr.scramble(4, &mut c);
        assert_eq!(a, b);
        assert_eq!(a[0], c[0]);
        assert_ne!(a[1], c[1]);
    }

    #[test]
    fn hsfc_offsets_land_one_per_stratum() {
        for mode in [HsfcMode::ScrambledVdc, HsfcMode::DirectOffset] {
            let offsets = hsfc_stratum_offsets(2, 2, mode, &rng(5)).unwrap();
            assert_eq!(offsets.len(), 16);
            assert!(offsets.iter().all(|u| (0.0..1.0).contains(u)));
        }
    }

    #[test]
    fn hsfc_d1_points_fill_quarters() {
        let set = hsfc_stratified(1, 2, HsfcMode::ScrambledVdc, &rng(9)).unwrap();
        assert_eq!(set.n(), 4);
        for (i, p) in set.points().iter().enumerate() {
            let x = p.coords()[0];
            assert!(x >= i as f64 / 4.0 && x < (i as f64 + 1.0) / 4.0);
        }
    }

    #[test]
    fn hsfc_d2_level1_matches_orientation_table() {
        let set = hsfc_stratified(2, 1, HsfcMode::ScrambledVdc, &rng(17)).unwrap();
        assert_eq!(set.n(), 4);
        for (i, p) in set.points().iter().enumerate() {
            let cell = decode(HilbertIndex::new(2, 1, i as u64).unwrap());
            assert!(cell.contains(p.coords()), "point {i} outside its quadrant");
        }
    }

    #[test]
    fn hsfc_m0_is_single_uniform_point() {
        for mode in [HsfcMode::ScrambledVdc, HsfcMode::DirectOffset] {
            let set = hsfc_stratified(2, 0, mode, &rng(23)).unwrap();
            assert_eq!(set.n(), 1);
            let p = set.points()[0].coords();
            assert!(p.iter().all(|x| (0.0..1.0).contains(x)));
        }
    }

    #[test]
    fn hsfc_points_stay_in_their_cells() {
        for (d, m) in [(1u32, 3u32), (2, 2), (3, 1), (3, 2)] {
            for mode in [HsfcMode::ScrambledVdc, HsfcMode::DirectOffset] {
                let set = hsfc_stratified(d, m, mode, &rng(31)).unwrap();
                for (i, p) in set.points().iter().enumerate() {
                    let cell = decode(HilbertIndex::new(d, m, i as u64).unwrap());
                    assert!(cell.contains(p.coords()), "d={d} m={m} point {i}");
                }
            }
        }
    }

    #[test]
    fn monte_carlo_is_deterministic_and_in_range() {
        let a = monte_carlo(3, 100, &rng(77)).unwrap();
        let b = monte_carlo(3, 100, &rng(77)).unwrap();
        assert_eq!(a.points(), b.points());
        assert!(a.points().iter().flat_map(|p| p.coords()).all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn monte_carlo_mean_near_half() {
        let set = monte_carlo(2, 10_000, &rng(123)).unwrap();
        for axis in 0..2 {
            let mean: f64 = set.points().iter().map(|p| p.coords()[axis]).sum::<f64>() / 1e4;
            assert!((mean - 0.5).abs() < 0.02, "axis {axis} mean {mean}");
        }
    }

    #[test]
    fn jittered_one_point_per_cell() {
        let set = jittered(2, 2, &rng(41)).unwrap();
        assert_eq!(set.n(), 4);
        let mut seen = std::collections::HashSet::new();
        for p in set.points() {
            let cell = (
                (p.coords()[0] * 2.0).floor() as u64,
                (p.coords()[1] * 2.0).floor() as u64,
            );
            assert!(seen.insert(cell));
        }
        // m = 1: one cell covering the cube, i.e. the Monte Carlo law.
        let single = jittered(2, 1, &rng(41)).unwrap();
        assert_eq!(single.n(), 1);
    }

    #[test]
    fn hsfc_generation_is_deterministic() {
        let a = hsfc_stratified(2, 2, HsfcMode::ScrambledVdc, &rng(88)).unwrap();
        let b = hsfc_stratified(2, 2, HsfcMode::ScrambledVdc, &rng(88)).unwrap();
        assert_eq!(a.points(), b.points());
    }

    #[test]
    fn latin_hypercube_projections_hit_every_bin() {
        let set = latin_hypercube(2, 8, &rng(55)).unwrap();
        for axis in 0..2 {
            let mut bins: Vec<u64> =
                set.points().iter().map(|p| (p.coords()[axis] * 8.0).floor() as u64).collect();
            bins.sort_unstable();
            assert_eq!(bins, (0..8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn theta_half_areas_are_equal() {
        // Count midpoints of a fine grid over the merged rectangle.
        for theta in [0.0, 0.3, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2] {
            let spec = ThetaPartitionSpec::new(4, theta).unwrap();
            let (x0, y0) = spec.rect_lo();
            let b = 0.25;
            let grid = 512;
            let mut in_a = 0u64;
            for i in 0..grid {
                for j in 0..grid {
                    let p = (
                        x0 + 2.0 * b * (i as f64 + 0.5) / grid as f64,
                        y0 + b * (j as f64 + 0.5) / grid as f64,
                    );
                    if spec.in_half_a(p) {
                        in_a += 1;
                    }
                }
            }
            let frac = in_a as f64 / (grid * grid) as f64;
            assert!((frac - 0.5).abs() < 0.01, "theta={theta} frac={frac}");
        }
    }

    #[test]
    fn theta_right_angle_recovers_grid_squares() {
        let spec = ThetaPartitionSpec::new(4, std::f64::consts::FRAC_PI_2).unwrap();
        let set = theta_partition_sample(&spec, &rng(61)).unwrap();
        assert_eq!(set.n(), 16);
        let (x0, y0) = spec.rect_lo();
        let b = 0.25;
        let strata = set.strata().unwrap();
        for (p, s) in set.points().iter().zip(strata) {
            let (px, py) = (p.coords()[0], p.coords()[1]);
            match s {
                Stratum::Theta(ThetaCell::HalfA) => {
                    assert!(px >= x0 && px < x0 + b && py >= y0 && py < y0 + b);
                }
                Stratum::Theta(ThetaCell::HalfB) => {
                    assert!(px >= x0 + b && px < x0 + 2.0 * b && py >= y0 && py < y0 + b);
                }
                Stratum::Theta(ThetaCell::Square { col, row }) => {
                    assert!(px >= *col as f64 * b && px < (*col + 1) as f64 * b);
                    assert!(py >= *row as f64 * b && py < (*row + 1) as f64 * b);
                }
                other => panic!("unexpected stratum {other:?}"),
            }
        }
    }

    #[test]
    fn theta_zero_gives_flat_half_rectangles() {
        let spec = ThetaPartitionSpec::new(4, 0.0).unwrap();
        let set = theta_partition_sample(&spec, &rng(67)).unwrap();
        let (x0, y0) = spec.rect_lo();
        let b = 0.25;
        let cy = y0 + b / 2.0;
        let strata = set.strata().unwrap();
        for (p, s) in set.points().iter().zip(strata) {
            let (px, py) = (p.coords()[0], p.coords()[1]);
            match s {
                Stratum::Theta(ThetaCell::HalfA) => {
                    assert!(px >= x0 && px < x0 + 2.0 * b && py >= cy && py < y0 + b);
                }
                Stratum::Theta(ThetaCell::HalfB) => {
                    assert!(px >= x0 && px < x0 + 2.0 * b && py >= y0 && py < cy);
                }
                _ => {}
            }
        }
    }

    #[test]
    fn theta_counts_one_point_per_cell() {
        let spec = ThetaPartitionSpec::new(5, 0.7).unwrap();
        let set = theta_partition_sample(&spec, &rng(71)).unwrap();
        assert_eq!(set.n(), 25);
        let strata = set.strata().unwrap();
        let mut seen = std::collections::HashSet::new();
        for s in strata {
            assert!(seen.insert(format!("{s:?}")), "duplicate stratum {s:?}");
        }
        // Merged rectangle cells never appear as squares.
        for s in strata {
            if let Stratum::Theta(ThetaCell::Square { col, row }) = s {
                assert!(!(*row == 4 && (*col == 3 || *col == 4)));
            }
        }
    }

    #[test]
    fn generator_spec_round_trips_serde() {
        let spec = GeneratorSpec::Hsfc { d: 2, m: 3, mode: HsfcMode::DirectOffset };
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<GeneratorSpec>(&json).unwrap(), spec);
        let parsed: GeneratorSpec =
            serde_json::from_str(r#"{"id":"theta","m":4,"theta":0.5}"#).unwrap();
        assert_eq!(parsed.n(), 16);
        assert_eq!(parsed.d(), 2);
    }
}
