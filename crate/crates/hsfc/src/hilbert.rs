//! Integer encode/decode of the d-dimensional Hilbert curve on dyadic grids,
//! and the induced map from unit-interval fractions to points of the cube.
//!
//! The curve is realized with the Gray-code transpose transform of Skilling,
//! "Programming the Hilbert curve" (AIP Conf. Proc. 707, 2004): exact integer
//! arithmetic, and refinements nest (the level-(k+1) cells with indices in
//! `[2^d j, 2^d (j+1))` tile the level-k cell with index `j`).
//!
//! Orientation convention, fixed for determinism: in two dimensions at level 1
//! the curve visits the quadrants anchored at (0,0), (0,0.5), (0.5,0.5),
//! (0.5,0) in that order; higher dimensions follow from the transform. All
//! discrepancy quantities downstream are invariant to this choice.

use crate::{invalid, Error, Result};

/// Maximum total index width `level * d`, so indices fit comfortably in u64.
pub const MAX_INDEX_BITS: u32 = 62;

/// Position along the Hilbert curve: dimension, refinement level, and an
/// index in `[0, 2^{level*d})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HilbertIndex {
    d: u32,
    level: u32,
    index: u64,
}

impl HilbertIndex {
    pub fn new(d: u32, level: u32, index: u64) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be >= 1"));
        }
        let required = level
            .checked_mul(d)
            .ok_or(Error::PrecisionExceeded { required: u32::MAX, max: MAX_INDEX_BITS })?;
        if required > MAX_INDEX_BITS {
            return Err(Error::PrecisionExceeded { required, max: MAX_INDEX_BITS });
        }
        if level_bits(d, level) <= index {
            return Err(invalid(format!(
                "index {index} out of range for d={d}, level={level} (must be < 2^{})",
                d * level
            )));
        }
        Ok(HilbertIndex { d, level, index })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> u64 {
        self.index
    }
}

/// Number of cells at `level`, i.e. `2^{level*d}` (caller guarantees fit).
fn level_bits(d: u32, level: u32) -> u64 {
    1u64 << (d * level)
}

/// A dyadic subcube visited by the curve: the image `H(I)` of one length
/// `2^{-level*d}` parameter interval.
///
/// Cell coordinates are kept as exact integers; `anchor()` and `side()` are
/// floating-point views (exact while `level <= 52`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertCell {
    d: u32,
    level: u32,
    index: u64,
    coords: Vec<u64>,
}

impl HilbertCell {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Integer grid coordinates, each in `[0, 2^level)`.
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// Lower corner of the cell.
    pub fn anchor(&self) -> Vec<f64> {
        let side = self.side();
        self.coords.iter().map(|&c| c as f64 * side).collect()
    }

    /// Edge length `2^{-level}`.
    pub fn side(&self) -> f64 {
        2f64.powi(-(self.level as i32))
    }

    /// Cell midpoint.
    pub fn center(&self) -> Vec<f64> {
        let side = self.side();
        self.coords.iter().map(|&c| (c as f64 + 0.5) * side).collect()
    }

    /// Half-open membership `point in [anchor, anchor + side)`, exact on the
    /// integer grid for levels up to 52.
    pub fn contains(&self, point: &[f64]) -> bool {
        if point.len() != self.d as usize {
            return false;
        }
        let scale = (1u64 << self.level.min(63)) as f64;
        self.coords.iter().zip(point).all(|(&c, &x)| {
            (0.0..1.0).contains(&x) && (x * scale).floor() as u64 == c
        })
    }

    /// Cell volume `2^{-level*d}`.
    pub fn volume(&self) -> f64 {
        2f64.powi(-((self.level * self.d) as i32))
    }
}

/// Map a curve position to the cell it occupies.
///
/// Consecutive indices at one level decode to face-adjacent cells, and decode
/// is a bijection onto the level's `2^{level*d}` cells.
pub fn decode(h: HilbertIndex) -> HilbertCell {
    let (d, level, index) = (h.d as usize, h.level, h.index);
    let mut x = vec![0u64; d];
    if h.level == 0 {
        return HilbertCell { d: h.d, level, index, coords: x };
    }

    // De-interleave: axis i takes index bits i, i+d, i+2d, ... from the MSB.
    for bit in 0..level {
        for (i, xi) in x.iter_mut().enumerate() {
            let pos = (level - 1 - bit) as usize * d + (d - 1 - i);
            *xi |= ((index >> pos) & 1) << (level - 1 - bit);
        }
    }

    // Gray decode: H ^ (H >> 1), expressed on the transposed layout.
    let t = x[d - 1] >> 1;
    for i in (1..d).rev() {
        x[i] ^= x[i - 1];
    }
    x[0] ^= t;

    // Undo excess work (Skilling), low bit planes to high.
    let top = 1u64 << level;
    let mut q = 2u64;
    while q != top {
        let p = q - 1;
        for i in (0..d).rev() {
            if x[i] & q != 0 {
                x[0] ^= p;
            } else {
                let t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
        q <<= 1;
    }

    HilbertCell { d: h.d, level, index, coords: x }
}

/// Inverse of [`decode`]: the curve position of the level-`level` cell with
/// the given integer coordinates.
pub fn encode(coords: &[u64], level: u32) -> Result<HilbertIndex> {
    let d = coords.len() as u32;
    if d == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    let required = level.saturating_mul(d);
    if required > MAX_INDEX_BITS {
        return Err(Error::PrecisionExceeded { required, max: MAX_INDEX_BITS });
    }
    if level < 64 {
        for &c in coords {
            if level == 63 || c >= (1u64 << level) {
                return Err(Error::CoordinateOutOfRange { value: c, level });
            }
        }
    }
    if level == 0 {
        return HilbertIndex::new(d, 0, 0);
    }

    let d = d as usize;
    let mut x = coords.to_vec();

    // Inverse undo, high bit planes to low.
    let mut q = 1u64 << (level - 1);
    while q > 1 {
        let p = q - 1;
        for i in 0..d {
            if x[i] & q != 0 {
                x[0] ^= p;
            } else {
                let t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
        q >>= 1;
    }

    // Gray encode.
    for i in 1..d {
        x[i] ^= x[i - 1];
    }
    let mut t = 0u64;
    let mut q = 1u64 << (level - 1);
    while q > 1 {
        if x[d - 1] & q != 0 {
            t ^= q - 1;
        }
        q >>= 1;
    }
    for xi in x.iter_mut() {
        *xi ^= t;
    }

    // Interleave back into a single index.
    let mut index = 0u64;
    for bit in (0..level).rev() {
        for xi in &x {
            index = (index << 1) | ((xi >> bit) & 1);
        }
    }

    HilbertIndex::new(d as u32, level, index)
}

/// Deepest refinement level supported in `d` dimensions.
pub fn max_level(d: u32) -> u32 {
    MAX_INDEX_BITS.checked_div(d).unwrap_or(0)
}

/// The level-`level` cell containing the curve point with parameter `t`.
pub fn cell_from_unit(t: f64, d: u32, level: u32) -> Result<HilbertCell> {
    if !(0.0..1.0).contains(&t) {
        return Err(invalid(format!("curve parameter {t} outside [0,1)")));
    }
    let bits = d
        .checked_mul(level)
        .filter(|&b| b <= MAX_INDEX_BITS)
        .ok_or(Error::PrecisionExceeded {
            required: d.saturating_mul(level),
            max: MAX_INDEX_BITS,
        })?;
    let cells = 1u64 << bits;
    let mut index = (t * cells as f64) as u64;
    if index >= cells {
        index = cells - 1; // t just below 1 can round up
    }
    Ok(decode(HilbertIndex::new(d, level, index)?))
}

/// Approximate the curve map `H(t)` at refinement `level`, placing the
/// residual mass below that depth at the cell center. Deterministic; the
/// result is within `sqrt(d) * 2^{-level}` of the exact curve point.
pub fn point_from_unit(t: f64, d: u32, level: u32) -> Result<Vec<f64>> {
    Ok(cell_from_unit(t, d, level)?.center())
}

/// Like [`point_from_unit`] but placing the residual mass at a caller-chosen
/// offset inside the cell (each component in `[0,1)`); used by samplers to
/// make the image exactly uniform within the resolved cell.
pub fn point_from_unit_with_offset(t: f64, d: u32, level: u32, offset: &[f64]) -> Result<Vec<f64>> {
    if offset.len() != d as usize {
        return Err(Error::DimensionMismatch { expected: d as usize, actual: offset.len() });
    }
    let cell = cell_from_unit(t, d, level)?;
    Ok(place_in_cell(&cell, offset))
}

/// `anchor + side * offset`, componentwise.
pub(crate) fn place_in_cell(cell: &HilbertCell, offset: &[f64]) -> Vec<f64> {
    let side = cell.side();
    cell.coords()
        .iter()
        .zip(offset)
        .map(|(&c, &u)| (c as f64 + u) * side)
        .collect()
}

/// Upper bound `2 sqrt(d+3) N^{-1/d}` on the diameter of the image of one
/// length-`1/N` stratum under the curve map.
pub fn diameter_bound(d: u32, n: u64) -> f64 {
    assert!(d >= 1 && n >= 1, "diameter_bound requires d >= 1 and N >= 1");
    2.0 * ((d + 3) as f64).sqrt() * (n as f64).powf(-1.0 / d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(d: u32, level: u32, index: u64) -> HilbertCell {
        decode(HilbertIndex::new(d, level, index).unwrap())
    }

    #[test]
    fn one_dimensional_curve_is_identity() {
        for level in 0..=10 {
            for index in 0..(1u64 << level) {
                let c = cell(1, level, index);
                assert_eq!(c.coords(), &[index]);
                assert_eq!(encode(&[index], level).unwrap().index(), index);
            }
        }
        // d=1, k=3, index=5 -> anchor 0.625, side 0.125
        let c = cell(1, 3, 5);
        assert_eq!(c.anchor(), vec![0.625]);
        assert_eq!(c.side(), 0.125);
    }

    #[test]
    fn level_one_orientation_is_pinned() {
        // Visit order lower-left, upper-left, upper-right, lower-right.
        let anchors: Vec<Vec<f64>> = (0..4).map(|i| cell(2, 1, i).anchor()).collect();
        assert_eq!(
            anchors,
            vec![vec![0.0, 0.0], vec![0.0, 0.5], vec![0.5, 0.5], vec![0.5, 0.0]]
        );
    }

    #[test]
    fn curve_starts_at_origin() {
        for d in 1..=4 {
            for level in 0..=3 {
                assert!(cell(d, level, 0).coords().iter().all(|&c| c == 0));
            }
        }
    }

    #[test]
    fn decode_bijective_and_tiling() {
        for d in 1..=4u32 {
            for level in 0..=4u32.min(MAX_INDEX_BITS / d) {
                let n = 1u64 << (d * level);
                let mut seen = std::collections::HashSet::new();
                for index in 0..n {
                    let c = cell(d, level, index);
                    assert!(c.coords().iter().all(|&x| x < (1u64 << level)));
                    assert!(seen.insert(c.coords().to_vec()), "collision at {d},{level},{index}");
                }
                assert_eq!(seen.len() as u64, n);
            }
        }
    }

    #[test]
    fn consecutive_cells_share_a_face() {
        for d in 1..=4u32 {
            for level in 1..=4u32.min(MAX_INDEX_BITS / d) {
                let n = 1u64 << (d * level);
                let mut prev = cell(d, level, 0);
                for index in 1..n {
                    let cur = cell(d, level, index);
                    let diffs: Vec<u64> = prev
                        .coords()
                        .iter()
                        .zip(cur.coords())
                        .map(|(&a, &b)| a.abs_diff(b))
                        .collect();
                    assert_eq!(diffs.iter().sum::<u64>(), 1, "not adjacent at {d},{level},{index}");
                    prev = cur;
                }
            }
        }
    }

    #[test]
    fn refinement_nests() {
        // Children 2^d j .. 2^d (j+1) at level k+1 live inside cell j at level k.
        for d in 1..=4u32 {
            for level in 0..=3u32.min(MAX_INDEX_BITS / d - 1) {
                for j in 0..(1u64 << (d * level)) {
                    let parent = cell(d, level, j);
                    for r in 0..(1u64 << d) {
                        let child = cell(d, level + 1, (j << d) | r);
                        let shifted: Vec<u64> = child.coords().iter().map(|&c| c >> 1).collect();
                        assert_eq!(shifted, parent.coords());
                    }
                }
            }
        }
    }

    #[test]
    fn encode_inverts_decode() {
        for d in 1..=4u32 {
            for level in 0..=4u32.min(MAX_INDEX_BITS / d) {
                for index in 0..(1u64 << (d * level)) {
                    let c = cell(d, level, index);
                    assert_eq!(encode(c.coords(), level).unwrap().index(), index);
                }
            }
        }
    }

    #[test]
    fn three_d_level_two_round_trip() {
        for index in 0..64u64 {
            let c = cell(3, 2, index);
            assert_eq!(encode(c.coords(), 2).unwrap().index(), index);
        }
    }

    #[test]
    fn precision_limits_are_enforced() {
        assert!(matches!(
            HilbertIndex::new(2, 32, 0),
            Err(Error::PrecisionExceeded { required: 64, max: MAX_INDEX_BITS })
        ));
        assert!(HilbertIndex::new(2, 31, 0).is_ok());
        assert!(HilbertIndex::new(1, 62, (1u64 << 62) - 1).is_ok());
        assert!(HilbertIndex::new(1, 62, 1u64 << 62).is_err());
        assert!(matches!(
            encode(&[4, 0], 2),
            Err(Error::CoordinateOutOfRange { value: 4, level: 2 })
        ));
    }

    #[test]
    fn point_from_unit_matches_identity_in_1d() {
        for k in [1u32, 4, 10] {
            for j in 0..64 {
                let t = j as f64 / 64.0;
                let p = point_from_unit(t, 1, k).unwrap();
                assert!((p[0] - t).abs() <= 2f64.powi(-(k as i32)), "k={k} t={t}");
            }
        }
    }

    #[test]
    fn point_from_unit_origin_convention() {
        for k in 1..=8 {
            let p = point_from_unit(0.0, 2, k).unwrap();
            let tol = 2f64.powi(-(k as i32));
            assert!(p.iter().all(|&x| x <= tol));
        }
    }

    #[test]
    fn point_from_unit_offset_stays_in_cell() {
        let t = 0.37;
        let cell = cell_from_unit(t, 3, 4).unwrap();
        let p = point_from_unit_with_offset(t, 3, 4, &[0.1, 0.9, 0.5]).unwrap();
        assert!(cell.contains(&p));
    }

    #[test]
    fn diameter_bound_values() {
        assert!((diameter_bound(2, 16) - 1.118033988749895).abs() < 1e-12);
        assert!((diameter_bound(1, 1) - 4.0).abs() < 1e-12);
        assert!((diameter_bound(3, 8) - 2.449489742783178).abs() < 1e-12);
    }

    #[test]
    fn curve_locality_matches_diameter_bound() {
        // |t - t'| = 2^-16 in d=2: images within 2 sqrt(5) * (2^-16)^(1/2).
        let gap = 2f64.powi(-16);
        let bound = 2.0 * 5f64.sqrt() * gap.sqrt();
        for level in [8u32, 16, 31] {
            for j in 0..1000 {
                let t = j as f64 / 1001.0;
                let a = point_from_unit(t, 2, level).unwrap();
                let b = point_from_unit(t + gap, 2, level).unwrap();
                let dist = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                assert!(dist <= bound, "level={level} t={t} dist={dist} bound={bound}");
            }
        }
    }

    #[test]
    fn stratum_images_respect_diameter_bound() {
        // Probe every stratum I_i at N = 2^{dm}; the probed image diameter
        // must stay within diameter_bound(d, N).
        for (d, m) in [(1u32, 3u32), (2, 2), (3, 1)] {
            let n = 1u64 << (d * m);
            let bound = diameter_bound(d, n);
            let probes = 64;
            let level = max_level(d).min(20);
            for i in 0..n {
                let pts: Vec<Vec<f64>> = (0..probes)
                    .map(|j| {
                        let t = (i as f64 + (j as f64 + 0.5) / probes as f64) / n as f64;
                        point_from_unit(t, d, level).unwrap()
                    })
                    .collect();
                let mut max_d2 = 0f64;
                for a in 0..pts.len() {
                    for b in (a + 1)..pts.len() {
                        let d2: f64 = pts[a]
                            .iter()
                            .zip(&pts[b])
                            .map(|(x, y)| (x - y) * (x - y))
                            .sum();
                        max_d2 = max_d2.max(d2);
                    }
                }
                assert!(max_d2.sqrt() <= bound, "d={d} m={m} stratum {i}");
            }
        }
    }
}
