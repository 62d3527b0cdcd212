//! Numerical tolerance policy.
//!
//! All geometric comparisons use a single relative tolerance, scaled by a
//! local feature size (longest edge or circumradius) at the call site.

/// Environment variable that overrides the default relative tolerance.
pub const EPS_ENV_VAR: &str = "SIGNED_DEC_EPS";

/// Default relative tolerance.
pub const DEFAULT_EPS: f64 = 1e-10;

/// A simplex whose k-volume falls below this fraction of `longest_edge^k`
/// is treated as degenerate.
pub const DEGENERACY_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eps: DEFAULT_EPS }
    }
}

impl Tolerance {
    pub fn new(eps: f64) -> Self {
        assert!(eps.is_finite() && eps > 0.0, "tolerance must be positive");
        Self { eps }
    }

    /// Reads `SIGNED_DEC_EPS`, falling back to the default when the variable
    /// is unset or does not hold a positive finite number.
    pub fn from_env() -> Self {
        std::env::var(EPS_ENV_VAR)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|e| e.is_finite() && *e > 0.0)
            .map(Self::new)
            .unwrap_or_default()
    }

    /// Looser tolerance for affine-hull membership, where the query point is
    /// itself the output of a linear solve.
    pub(crate) fn hull(&self) -> f64 {
        self.eps * 100.0
    }
}
