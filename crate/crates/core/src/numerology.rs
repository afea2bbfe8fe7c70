//! NR numerologies and comb-type PRS subcarrier maps.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Subcarrier spacing of numerology 0 (Hz).
pub const BASE_SCS_HZ: f64 = 15_000.0;
/// Largest supported numerology index.
pub const MAX_NUMEROLOGY: u32 = 6;

/// Derived parameters of one numerology inside a fixed band.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NumerologyConfig {
    pub index: u32,
    pub scs_hz: f64,
    pub symbol_s: f64,
    /// Subcarriers in the band, a multiple of the comb size.
    pub subcarriers: usize,
    /// Subcarriers one PRS symbol occupies.
    pub active: usize,
    pub comb: usize,
    /// Index of the subcarrier mapped to 0 Hz.
    pub center_shift: i64,
}

impl NumerologyConfig {
    /// Frequency (Hz, relative to the carrier) of grid position `pos`.
    pub fn frequency(&self, pos: usize) -> f64 {
        (pos as i64 - self.center_shift) as f64 * self.scs_hz
    }

    /// PRS symbols per base slot.
    pub fn symbols_per_slot(&self) -> u64 {
        1u64 << self.index
    }

    /// Grid positions used by symbol `m` with comb offset `offset`.
    pub fn positions(&self, m: u64, offset: usize) -> impl Iterator<Item = usize> + '_ {
        let r = comb_residue(m, offset, self.comb);
        (0..self.active).map(move |n| self.comb * n + r)
    }
}

/// Parameters of numerology `l` in a band of `bandwidth_hz`.
pub fn numerology_params(l: u32, bandwidth_hz: f64, comb: usize) -> Result<NumerologyConfig> {
    if l > MAX_NUMEROLOGY {
        return Err(Error::InvalidArgument(alloc::format!("numerology {l} exceeds {MAX_NUMEROLOGY}")));
    }
    if comb == 0 {
        return Err(Error::InvalidArgument("comb size must be at least 1".into()));
    }
    if !(bandwidth_hz > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("bandwidth {bandwidth_hz} must be positive")));
    }
    let scs = BASE_SCS_HZ * (1u64 << l) as f64;
    let groups = libm::floor(bandwidth_hz / (comb as f64 * scs) + 1e-9) as usize;
    if groups == 0 {
        return Err(Error::BandTooNarrow { numerology: l, bandwidth_hz });
    }
    Ok(NumerologyConfig {
        index: l,
        scs_hz: scs,
        symbol_s: 1.0 / scs,
        subcarriers: groups * comb,
        active: groups,
        comb,
        center_shift: libm::floor(bandwidth_hz / (2.0 * scs) + 1e-9) as i64,
    })
}

/// All numerologies `0..count` for one band.
pub fn numerology_set(count: u32, bandwidth_hz: f64, comb: usize) -> Result<Vec<NumerologyConfig>> {
    (0..count).map(|l| numerology_params(l, bandwidth_hz, comb)).collect()
}

/// Per-symbol comb shift `r/2 + 3/4 (1 - (-1)^r)` with `r = m mod comb`,
/// i.e. `r/2` for even and `(r+3)/2` for odd residues. For comb 4 this
/// staggers symbols as 0, 2, 1, 3.
pub fn symbol_shift(m: u64, comb: usize) -> usize {
    let r = (m % comb as u64) as usize;
    if r.is_multiple_of(2) {
        r / 2
    } else {
        (r + 3) / 2
    }
}

/// Grid residue of symbol `m` with comb offset `offset`.
pub fn comb_residue(m: u64, offset: usize, comb: usize) -> usize {
    (offset + symbol_shift(m, comb)) % comb
}

/// Signed subcarrier index of the first PRS subcarrier of symbol `m`.
pub fn comb_offset(m: u64, offset: usize, num: &NumerologyConfig) -> Result<i64> {
    if offset >= num.comb {
        return Err(Error::InvalidArgument(alloc::format!("offset {offset} >= comb {}", num.comb)));
    }
    Ok(comb_residue(m, offset, num.comb) as i64 - num.center_shift)
}

/// Signed subcarrier indices used by symbol `m` with comb offset `offset`.
pub fn prs_subcarriers(m: u64, offset: usize, num: &NumerologyConfig) -> Result<Vec<i64>> {
    let first = comb_offset(m, offset, num)?;
    Ok((0..num.active as i64).map(|n| first + n * num.comb as i64).collect())
}

/// Frequency of the `n`-th PRS subcarrier of symbol `m`.
pub fn subcarrier_frequency(n: usize, m: u64, offset: usize, num: &NumerologyConfig) -> Result<f64> {
    if n >= num.active {
        return Err(Error::InvalidArgument(alloc::format!("subcarrier {n} >= {}", num.active)));
    }
    Ok((comb_offset(m, offset, num)? + (n * num.comb) as i64) as f64 * num.scs_hz)
}

/// Selected numerology and comb offset of one anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CombChoice {
    pub numerology: u32,
    pub offset: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_numerology_at_4mhz() {
        let n = numerology_params(0, 4e6, 4).unwrap();
        assert_eq!(n.subcarriers, 264);
        assert_eq!(n.active, 66);
        assert!((n.symbol_s - 66.666_666_7e-6).abs() < 1e-12);
        assert_eq!(n.center_shift, 133);
    }

    #[test]
    fn staggered_shift() {
        let s: Vec<usize> = (0..8).map(|m| symbol_shift(m, 4)).collect();
        assert_eq!(s, [0, 2, 1, 3, 0, 2, 1, 3]);
        let s2: Vec<usize> = (0..4).map(|m| comb_residue(m, 1, 2)).collect();
        assert_eq!(s2, [1, 1, 1, 1]);
    }

    #[test]
    fn narrow_band_is_rejected() {
        assert!(matches!(numerology_params(3, 100e3, 4), Err(Error::BandTooNarrow { .. })));
    }
}
