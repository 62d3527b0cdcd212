//! Diagonal discrete Hodge star.

use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::error::Result;
use crate::signed_dual;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HodgeMode {
    /// Dual volumes are sums of signed elementary volumes.
    Signed,
    /// Sums of unsigned elementary volumes. Only meaningful for reproducing
    /// the failure of that convention.
    Unsigned,
}

/// The diagonal of `⋆_p`: dual volume over primal volume per p-simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HodgeStar {
    pub p: usize,
    pub mode: HodgeMode,
    pub entries: Vec<f64>,
}

impl HodgeStar {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `aᵀ ⋆ b` for two p-cochains.
    pub fn inner_product(&self, a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), self.entries.len());
        assert_eq!(b.len(), self.entries.len());
        self.entries.iter().zip(a).zip(b).map(|((s, x), y)| s * x * y).sum()
    }
}

pub fn hodge_star(complex: &SimplicialComplex, p: usize, mode: HodgeMode) -> Result<HodgeStar> {
    let duals = signed_dual::dual_volumes(complex, p)?;
    let dual = match mode {
        HodgeMode::Signed => duals.signed,
        HodgeMode::Unsigned => duals.unsigned,
    };
    let entries = dual
        .iter()
        .enumerate()
        .map(|(i, d)| d / complex.volume(p, i))
        .collect();
    Ok(HodgeStar { p, mode, entries })
}

/// Indices of entries `<= 0`. Empty iff the star defines an inner product.
pub fn validate_hodge(star: &HodgeStar) -> Vec<usize> {
    star.entries
        .iter()
        .enumerate()
        .filter(|(_, &e)| e <= 0.0)
        .map(|(i, _)| i)
        .collect()
}
