//! Precomputed `Q` and `C` integrals for one radio configuration.
//!
//! `Q` depends on (numerology, grid position); `C` on a pair of them.
//! Positions sharing a comb residue are grouped into blocks so that each
//! (interferer numerology, residue, victim numerology, residue) lookup is a
//! dense `N_a x N_a` matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerology::NumerologyConfig;
use crate::specfun::closed::{c_from_aux, term_alphas};
use crate::specfun::{partial_fractions, q_closed, PoleAux};

/// One block: interferer `(l_int, r_int)` rows against victim `(l_vic, r_vic)` columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    pub l_int: usize,
    pub r_int: usize,
    pub l_vic: usize,
    pub r_vic: usize,
}

/// Cached integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralTable {
    pub numerologies: Vec<NumerologyConfig>,
    pub halfband: f64,
    q: Vec<Vec<f64>>,
    blocks: Vec<Vec<f64>>,
}

fn comb_of(nums: &[NumerologyConfig]) -> Result<usize> {
    let comb = nums.first().ok_or_else(|| Error::InvalidArgument("no numerologies".into()))?.comb;
    if nums.iter().any(|n| n.comb != comb) {
        return Err(Error::InvalidArgument("numerologies disagree on comb size".into()));
    }
    Ok(comb)
}

fn key(comb: usize, l: usize, r: usize) -> usize {
    l * comb + r
}

/// Canonical blocks (interferer key <= victim key); the rest follow by
/// transposition since `C` is symmetric in its two subcarriers.
pub fn block_specs(numerologies: &[NumerologyConfig]) -> Result<Vec<BlockSpec>> {
    let comb = comb_of(numerologies)?;
    let nc = numerologies.len() * comb;
    let mut out = Vec::with_capacity(nc * (nc + 1) / 2);
    for a in 0..nc {
        for b in a..nc {
            out.push(BlockSpec { l_int: a / comb, r_int: a % comb, l_vic: b / comb, r_vic: b % comb });
        }
    }
    Ok(out)
}

/// Entries of one block, row-major over (interferer n', victim n).
pub fn compute_block(numerologies: &[NumerologyConfig], halfband: f64, spec: BlockSpec) -> Result<Vec<f64>> {
    let ni = numerologies.get(spec.l_int).ok_or(Error::InvalidArgument("interferer numerology".into()))?;
    let nv = numerologies.get(spec.l_vic).ok_or(Error::InvalidArgument("victim numerology".into()))?;
    let (t1, t2) = (ni.symbol_s, nv.symbol_s);
    let alphas = term_alphas(t1, t2);
    let fa: Vec<f64> = (0..ni.active).map(|n| ni.frequency(ni.comb * n + spec.r_int)).collect();
    let fb: Vec<f64> = (0..nv.active).map(|n| nv.frequency(nv.comb * n + spec.r_vic)).collect();
    let aux = |freqs: &[f64]| -> Result<Vec<[PoleAux; 5]>> {
        freqs
            .iter()
            .map(|&f| {
                let mut out = [PoleAux::new(0.0, f, halfband)?; 5];
                for k in 1..5 {
                    out[k] = PoleAux::new(alphas[k], f, halfband)?;
                }
                Ok(out)
            })
            .collect()
    };
    let aa = aux(&fa)?;
    let ab = aux(&fb)?;
    let mut out = Vec::with_capacity(fa.len() * fb.len());
    for (x, &a) in aa.iter().zip(&fa) {
        let ra: [&PoleAux; 5] = core::array::from_fn(|k| &x[k]);
        for (y, &b) in ab.iter().zip(&fb) {
            let rb: [&PoleAux; 5] = core::array::from_fn(|k| &y[k]);
            out.push(c_from_aux(&partial_fractions(a, b), a, b, t1, t2, ra, rb));
        }
    }
    Ok(out)
}

impl IntegralTable {
    /// Assemble from computed canonical blocks.
    pub fn from_blocks(
        numerologies: Vec<NumerologyConfig>,
        halfband: f64,
        computed: Vec<(BlockSpec, Vec<f64>)>,
    ) -> Result<Self> {
        let comb = comb_of(&numerologies)?;
        let nc = numerologies.len() * comb;
        let mut blocks = vec![Vec::new(); nc * nc];
        for (s, data) in computed {
            let (ni, nv) = (numerologies[s.l_int].active, numerologies[s.l_vic].active);
            if data.len() != ni * nv {
                return Err(Error::LengthMismatch { expected: ni * nv, got: data.len() });
            }
            let a = key(comb, s.l_int, s.r_int);
            let b = key(comb, s.l_vic, s.r_vic);
            if a != b {
                let mut t = vec![0.0; data.len()];
                for r in 0..ni {
                    for c in 0..nv {
                        t[c * ni + r] = data[r * nv + c];
                    }
                }
                blocks[b * nc + a] = t;
            }
            blocks[a * nc + b] = data;
        }
        if let Some(i) = blocks.iter().position(Vec::is_empty) {
            return Err(Error::InvalidArgument(alloc::format!("missing integral block {i}")));
        }
        let q = numerologies
            .iter()
            .map(|n| (0..n.subcarriers).map(|p| q_closed(n.frequency(p), n.symbol_s, halfband)).collect())
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(Self { numerologies, halfband, q, blocks })
    }

    /// Compute every block sequentially.
    pub fn build(numerologies: Vec<NumerologyConfig>, halfband: f64) -> Result<Self> {
        let specs = block_specs(&numerologies)?;
        let computed = specs
            .into_iter()
            .map(|s| Ok((s, compute_block(&numerologies, halfband, s)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_blocks(numerologies, halfband, computed)
    }

    pub fn comb(&self) -> usize {
        self.numerologies[0].comb
    }

    /// `Q` at grid position `pos` of numerology `l`.
    pub fn q(&self, l: usize, pos: usize) -> f64 {
        self.q[l][pos]
    }

    pub fn q_row(&self, l: usize) -> &[f64] {
        &self.q[l]
    }

    /// Block with rows over the interferer's PRS subcarriers and columns
    /// over the victim's.
    pub fn block(&self, l_int: usize, r_int: usize, l_vic: usize, r_vic: usize) -> &[f64] {
        let comb = self.comb();
        let nc = self.numerologies.len() * comb;
        &self.blocks[key(comb, l_int, r_int) * nc + key(comb, l_vic, r_vic)]
    }

    /// `C` between grid position `pos_int` of `l_int` and `pos_vic` of `l_vic`.
    pub fn c(&self, l_int: usize, pos_int: usize, l_vic: usize, pos_vic: usize) -> f64 {
        let comb = self.comb();
        let nv = self.numerologies[l_vic].active;
        self.block(l_int, pos_int % comb, l_vic, pos_vic % comb)[(pos_int / comb) * nv + pos_vic / comb]
    }
}
