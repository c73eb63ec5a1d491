use std::fmt;

use serde::{Deserialize, Serialize};

use crate::params::{ConfigError, ModelParams};

/// Constants of the forced construction for one parameter set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub b: u64,
    pub b_min: u64,
    /// Level `a*` below which the free-tip count is driven by the coupling.
    pub a_star: u64,
    /// Uniform bound on the gap between the free-tip count and its martingale.
    pub delta_yf: u64,
    pub kappa_a: u64,
    pub kappa_b: u64,
    pub kappa_c: u64,
    /// Lower bound on the probability that the schedule is realized.
    pub rho: LogProb,
}

/// Checked thresholds for `params`; fails when `b` is not admissible.
pub fn thresholds(params: &ModelParams) -> Result<Thresholds, ConfigError> {
    params.validate()?;
    thresholds_for_b(params, params.b)
}

/// Thresholds computed for an arbitrary `b`, admissible or not. Only the
/// duration and lookback supports of `params` are used.
pub fn thresholds_for_b(params: &ModelParams, b: u64) -> Result<Thresholds, ConfigError> {
    let hm = params.h_max() as u64;
    let h1 = params.h_min() as u64;
    let m = params.m();
    let (e_min, e_max) = (params.eps_min() as u64, params.eps_max() as u64);
    if hm < 2 {
        return Err(ConfigError::Invalid(
            "the largest proof-of-work duration must be at least 2".into(),
        ));
    }
    let kappa_a = kappa_a(hm, e_min);
    let kappa_b = kappa_a + e_min + 1;
    let side = b + m * kappa_b + hm;
    let kappa_c = side
        .checked_mul(side)
        .and_then(|s| s.checked_mul(2))
        .and_then(|s| s.checked_add(kappa_b + hm + e_max + 1))
        .ok_or_else(|| ConfigError::Invalid("kappa_C overflows u64".into()))?;
    Ok(Thresholds {
        b,
        b_min: params.b_min(),
        a_star: 2 * hm + 3 * m * e_max + 2,
        delta_yf: 2 * (hm - h1),
        kappa_a,
        kappa_b,
        kappa_c,
        rho: rho(params, b, kappa_c),
    })
}

/// Smallest integer strictly above `1 + max(2 h_M, 3 h_M (h_M + eps_min) / (h_M - 1))`.
fn kappa_a(hm: u64, e_min: u64) -> u64 {
    let ratio_floor = 3 * hm * (hm + e_min) / (hm - 1);
    (2 * hm).max(ratio_floor) + 2
}

/// `(min p_theta * min p_eps / (b + 2 kappa M))^kappa`, in log10.
pub fn rho(params: &ModelParams, b: u64, kappa: u64) -> LogProb {
    let min_theta = params.p_theta.iter().copied().fold(f64::INFINITY, f64::min);
    let min_eps = params.p_eps.iter().copied().fold(f64::INFINITY, f64::min);
    let denom = b as f64 + 2.0 * kappa as f64 * params.m() as f64;
    LogProb(kappa as f64 * (min_theta.log10() + min_eps.log10() - denom.log10()))
}

/// A probability stored as its base-10 logarithm, for values far below
/// the `f64` range.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogProb(pub f64);

impl LogProb {
    pub fn log10(self) -> f64 {
        self.0
    }

    /// `(mantissa, exponent)` with `1 <= mantissa < 10`.
    pub fn scientific(self) -> (f64, i64) {
        let mut exp = self.0.floor();
        let mut mant = 10f64.powf(self.0 - exp);
        if mant >= 9.9995 {
            mant = 1.0;
            exp += 1.0;
        }
        (mant, exp as i64)
    }
}

impl fmt::Display for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, e) = self.scientific();
        write!(f, "{m:.3}e{e}")
    }
}
